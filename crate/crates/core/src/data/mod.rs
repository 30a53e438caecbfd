//! Datasets: raw MNIST images, PCA-reduced unit-norm encodings, and
//! synthetic Gaussian blobs.

mod idx;
mod pca;

use std::collections::BTreeMap;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

pub use idx::{load_idx, write_idx, IMAGE_MAGIC, LABEL_MAGIC};
pub use pca::{fit_pca, jacobi_eigen, PcaModel, SymmetricEigen, JACOBI_MAX_SWEEPS, JACOBI_TOL};

use crate::error::{Error, Result};

/// Projections shorter than this are replaced by `e_0`.
pub const DEGENERATE_NORM: f64 = 1e-9;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RawDataset {
    pub rows: usize,
    pub cols: usize,
    /// Row-major pixel grids.
    pub images: Vec<Vec<u8>>,
    pub labels: Vec<u8>,
}

impl RawDataset {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Flattened images with pixels scaled to `[0, 1]`.
    pub fn scaled(&self) -> Vec<Vec<f64>> {
        self.images
            .iter()
            .map(|img| img.iter().map(|&p| p as f64 / 255.0).collect())
            .collect()
    }
}

/// Unit-norm feature vectors with labels remapped to `0..C`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EncodedDataset {
    pub features: Vec<Vec<f64>>,
    pub labels: Vec<usize>,
    /// Original class id to remapped index.
    pub class_map: BTreeMap<u8, usize>,
}

impl EncodedDataset {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn n_classes(&self) -> usize {
        self.class_map.len()
    }

    pub fn dim(&self) -> usize {
        self.features.first().map_or(0, Vec::len)
    }

    /// Splits off the last `fraction` of samples.
    pub fn split_tail(&self, fraction: f64) -> (EncodedDataset, EncodedDataset) {
        let cut = self.len() - ((self.len() as f64 * fraction).round() as usize).min(self.len());
        let part = |r: std::ops::Range<usize>| EncodedDataset {
            features: self.features[r.clone()].to_vec(),
            labels: self.labels[r].to_vec(),
            class_map: self.class_map.clone(),
        };
        (part(0..cut), part(cut..self.len()))
    }
}

/// Balanced per-class sample without replacement, shuffled.
///
/// Classes with fewer than `per_class` samples contribute all they have,
/// and a warning is logged.
pub fn subset_classes<R: Rng + ?Sized>(
    raw: &RawDataset,
    classes: &[u8],
    per_class: usize,
    rng: &mut R,
) -> Result<RawDataset> {
    if let Some(&bad) = classes.iter().find(|&&c| c > 9) {
        return Err(Error::UnknownClass(bad));
    }
    let mut chosen = Vec::new();
    for &class in classes {
        let pool: Vec<usize> = (0..raw.len()).filter(|&i| raw.labels[i] == class).collect();
        if pool.len() < per_class {
            log::warn!(
                "class {class}: requested {per_class} samples but only {} available; taking all",
                pool.len()
            );
        }
        chosen.extend(pool.choose_multiple(rng, per_class.min(pool.len())).copied());
    }
    chosen.shuffle(rng);
    Ok(RawDataset {
        rows: raw.rows,
        cols: raw.cols,
        images: chosen.iter().map(|&i| raw.images[i].clone()).collect(),
        labels: chosen.iter().map(|&i| raw.labels[i]).collect(),
    })
}

/// Maps classes to `0..C` by ascending original id.
pub fn class_map(classes: &[u8]) -> BTreeMap<u8, usize> {
    let mut sorted = classes.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    sorted.into_iter().enumerate().map(|(i, c)| (c, i)).collect()
}

fn normalize_or_fallback(mut y: Vec<f64>) -> (Vec<f64>, bool) {
    let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm < DEGENERATE_NORM {
        let mut e0 = vec![0.0; y.len()];
        e0[0] = 1.0;
        return (e0, true);
    }
    y.iter_mut().for_each(|v| *v /= norm);
    (y, false)
}

/// Projects scaled pixels through `pca` and L2-normalises each sample.
pub fn project_and_normalize(pca: &PcaModel, raw: &RawDataset, classes: &[u8]) -> Result<EncodedDataset> {
    let map = class_map(classes);
    let mut out = EncodedDataset {
        class_map: map.clone(),
        ..EncodedDataset::default()
    };
    let mut degenerate = 0;
    for (img, label) in raw.scaled().iter().zip(&raw.labels) {
        let Some(&idx) = map.get(label) else {
            return Err(Error::UnknownClass(*label));
        };
        let (y, fell_back) = normalize_or_fallback(pca.project(img));
        degenerate += fell_back as usize;
        out.features.push(y);
        out.labels.push(idx);
    }
    if degenerate > 0 {
        log::warn!("{degenerate} samples projected to ~0 and were replaced by e_0");
    }
    Ok(out)
}

/// Class `c` is centred on basis vector `e_c`, jittered by isotropic
/// Gaussian noise of standard deviation `spread`, then normalised.
pub fn synthetic_blobs<R: Rng + ?Sized>(
    classes: usize,
    dim: usize,
    per_class: usize,
    spread: f64,
    rng: &mut R,
) -> Result<EncodedDataset> {
    if classes > dim {
        return Err(Error::TooManyClasses { classes, dim });
    }
    let noise = Normal::new(0.0, spread.max(0.0)).map_err(|e| Error::InvalidPca(e.to_string()))?;
    let mut samples = Vec::with_capacity(classes * per_class);
    for c in 0..classes {
        for _ in 0..per_class {
            let mut x: Vec<f64> = (0..dim)
                .map(|_| if spread > 0.0 { noise.sample(rng) } else { 0.0 })
                .collect();
            x[c] += 1.0;
            let (x, _) = normalize_or_fallback(x);
            samples.push((x, c));
        }
    }
    samples.shuffle(rng);
    let (features, labels) = samples.into_iter().unzip();
    Ok(EncodedDataset {
        features,
        labels,
        class_map: (0..classes).map(|c| (c as u8, c)).collect(),
    })
}
