//! PCA by cyclic Jacobi eigendecomposition of the sample covariance.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const JACOBI_TOL: f64 = 1e-9;
pub const JACOBI_MAX_SWEEPS: usize = 10_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PcaModel {
    pub mean: Vec<f64>,
    /// One entry per principal axis (the columns of the `dim x d` projection
    /// matrix), ordered by descending explained variance.
    pub components: Vec<Vec<f64>>,
    pub explained_variance: Vec<f64>,
}

impl PcaModel {
    pub fn input_dim(&self) -> usize {
        self.mean.len()
    }

    pub fn output_dim(&self) -> usize {
        self.components.len()
    }

    /// `components^T (x - mean)`.
    pub fn project(&self, x: &[f64]) -> Vec<f64> {
        self.components
            .iter()
            .map(|c| c.iter().zip(x).zip(&self.mean).map(|((c, x), m)| c * (x - m)).sum())
            .collect()
    }
}

/// Eigenpairs of a symmetric matrix, eigenvalues descending.
#[derive(Clone, Debug)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    /// `vectors[k]` belongs to `values[k]`.
    pub vectors: Vec<Vec<f64>>,
    pub sweeps: usize,
}

/// Cyclic Jacobi on a dense symmetric `n x n` row-major matrix.
///
/// Sweeps until the off-diagonal Frobenius norm is at most
/// `JACOBI_TOL * ||A||_F`.
pub fn jacobi_eigen(matrix: &[f64], n: usize) -> Result<SymmetricEigen> {
    assert_eq!(matrix.len(), n * n, "matrix must be n x n");
    let mut a = matrix.to_vec();
    // rows of `vt` are the eigenvector estimates
    let mut vt = vec![0.0; n * n];
    for i in 0..n {
        vt[i * n + i] = 1.0;
    }
    let frob = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let target = JACOBI_TOL * frob;
    let off_norm = |a: &[f64]| {
        let mut s = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                s += 2.0 * a[p * n + q] * a[p * n + q];
            }
        }
        s.sqrt()
    };

    let mut sweeps = 0;
    let mut off = off_norm(&a);
    let mut row_p = vec![0.0; n];
    let mut row_q = vec![0.0; n];
    while off > target {
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps, residual: off });
        }
        sweeps += 1;
        // early sweeps skip small pivots, as in the classical threshold scheme
        let threshold = if sweeps < 4 { 0.2 * off / (n * n) as f64 } else { 0.0 };
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq.abs() <= threshold {
                    continue;
                }
                let (app, aqq) = (a[p * n + p], a[q * n + q]);
                if apq.abs() <= f64::EPSILON * 1e-3 * (app.abs().max(aqq.abs())) {
                    a[p * n + q] = 0.0;
                    a[q * n + p] = 0.0;
                    continue;
                }
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                row_p.copy_from_slice(&a[p * n..(p + 1) * n]);
                row_q.copy_from_slice(&a[q * n..(q + 1) * n]);
                for k in 0..n {
                    let (xp, xq) = (row_p[k], row_q[k]);
                    a[p * n + k] = c * xp - s * xq;
                    a[q * n + k] = s * xp + c * xq;
                }
                a[p * n + p] = app - t * apq;
                a[q * n + q] = aqq + t * apq;
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for k in 0..n {
                    if k != p && k != q {
                        a[k * n + p] = a[p * n + k];
                        a[k * n + q] = a[q * n + k];
                    }
                }

                let (vp, vq) = vt.split_at_mut(q * n);
                let vp = &mut vp[p * n..(p + 1) * n];
                let vq = &mut vq[..n];
                for k in 0..n {
                    let (xp, xq) = (vp[k], vq[k]);
                    vp[k] = c * xp - s * xq;
                    vq[k] = s * xp + c * xq;
                }
            }
        }
        off = off_norm(&a);
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[j * n + j].total_cmp(&a[i * n + i]).then(i.cmp(&j)));
    Ok(SymmetricEigen {
        values: order.iter().map(|&i| a[i * n + i]).collect(),
        vectors: order.iter().map(|&i| vt[i * n..(i + 1) * n].to_vec()).collect(),
        sweeps,
    })
}

/// Flips `v` so that its largest-magnitude entry (first on ties) is positive.
fn fix_sign(v: &mut [f64]) {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    if v[best] < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

/// Fits the top-`out_dim` principal axes of `samples`.
///
/// Coordinates with zero variance are deflated out before the
/// eigendecomposition; they are exact null directions of the covariance.
pub fn fit_pca(samples: &[Vec<f64>], out_dim: usize) -> Result<PcaModel> {
    let m = samples.len();
    if m <= out_dim {
        return Err(Error::TooFewSamples {
            samples: m,
            dim: out_dim,
        });
    }
    let dim = samples[0].len();
    if out_dim == 0 || out_dim > dim {
        return Err(Error::InvalidPca(format!(
            "cannot extract {out_dim} components from {dim} inputs"
        )));
    }
    if samples.iter().any(|s| s.len() != dim) {
        return Err(Error::InvalidPca("samples differ in length".into()));
    }

    let mut mean = vec![0.0; dim];
    for s in samples {
        for (m, x) in mean.iter_mut().zip(s) {
            *m += x;
        }
    }
    mean.iter_mut().for_each(|x| *x /= m as f64);

    let active: Vec<usize> = (0..dim).filter(|&j| samples.iter().any(|s| s[j] != mean[j])).collect();
    let k = active.len();

    let mut cov = vec![0.0; k * k];
    let mut centered = vec![0.0; k];
    for s in samples {
        for (c, &j) in centered.iter_mut().zip(&active) {
            *c = s[j] - mean[j];
        }
        for a in 0..k {
            let ca = centered[a];
            if ca == 0.0 {
                continue;
            }
            let row = &mut cov[a * k..(a + 1) * k];
            for b in a..k {
                row[b] += ca * centered[b];
            }
        }
    }
    let scale = 1.0 / (m - 1) as f64;
    for a in 0..k {
        for b in a..k {
            let v = cov[a * k + b] * scale;
            cov[a * k + b] = v;
            cov[b * k + a] = v;
        }
    }

    let eig = if k > 0 {
        jacobi_eigen(&cov, k)?
    } else {
        SymmetricEigen {
            values: Vec::new(),
            vectors: Vec::new(),
            sweeps: 0,
        }
    };
    log::debug!("PCA: {k} active of {dim} inputs, {} Jacobi sweeps", eig.sweeps);

    let mut components = Vec::with_capacity(out_dim);
    let mut explained_variance = Vec::with_capacity(out_dim);
    for (value, vector) in eig.values.iter().zip(&eig.vectors).take(out_dim) {
        let mut full = vec![0.0; dim];
        for (&j, x) in active.iter().zip(vector) {
            full[j] = *x;
        }
        fix_sign(&mut full);
        components.push(full);
        explained_variance.push(value.max(0.0));
    }
    // pad with null directions of the covariance
    for j in (0..dim).filter(|j| !active.contains(j)) {
        if components.len() == out_dim {
            break;
        }
        let mut e = vec![0.0; dim];
        e[j] = 1.0;
        components.push(e);
        explained_variance.push(0.0);
    }

    Ok(PcaModel {
        mean,
        components,
        explained_variance,
    })
}
