//! Five-gene architecture encoding `[g1R, g1C, g2R, g2C, L]` and its
//! genetic operators.
//!
//! `gℓR` is the number of RX gates in layer ℓ, `gℓC` the number of CNOTs,
//! and `L` the number of active layers. Only the first `2L` genes are read
//! when building a circuit; the rest ride along and can become active
//! again if a later mutation raises `L`.

use std::fmt;
use std::ops::RangeInclusive;

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const CHROMOSOME_LEN: usize = 5;
pub const MAX_LAYERS: usize = 2;
pub const DEPTH_GENE: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Chromosome([u32; CHROMOSOME_LEN]);

impl Chromosome {
    pub const fn new(genes: [u32; CHROMOSOME_LEN]) -> Self {
        Chromosome(genes)
    }

    pub fn genes(&self) -> &[u32; CHROMOSOME_LEN] {
        &self.0
    }

    /// Number of active layers `L`.
    pub fn depth(&self) -> usize {
        self.0[DEPTH_GENE] as usize
    }

    /// `(rx, cnot)` widths of 1-based `layer`.
    pub fn layer(&self, layer: usize) -> (u32, u32) {
        (self.0[2 * (layer - 1)], self.0[2 * (layer - 1) + 1])
    }

    /// The first `2L` genes.
    pub fn active_genes(&self) -> &[u32] {
        &self.0[..2 * self.depth().min(MAX_LAYERS)]
    }

    /// The chromosome with every width at its maximum and all layers
    /// active, i.e. the macroCircuit itself.
    pub fn full(bounds: &GeneBounds) -> Self {
        let w = *bounds.width.end();
        Chromosome([w, w, w, w, *bounds.depth.end()])
    }
}

impl fmt::Display for Chromosome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g = &self.0;
        write!(f, "[{},{},{},{},{}]", g[0], g[1], g[2], g[3], g[4])
    }
}

impl From<[u32; CHROMOSOME_LEN]> for Chromosome {
    fn from(genes: [u32; CHROMOSOME_LEN]) -> Self {
        Chromosome(genes)
    }
}

/// Admissible gene values.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneBounds {
    pub width: RangeInclusive<u32>,
    pub depth: RangeInclusive<u32>,
    pub n_qubits: usize,
}

impl GeneBounds {
    pub fn new(width: RangeInclusive<u32>, depth: RangeInclusive<u32>, n_qubits: usize) -> Result<Self> {
        let bounds = GeneBounds { width, depth, n_qubits };
        bounds.validate()?;
        Ok(bounds)
    }

    /// Widths `1..=n`, depth `1..=2`.
    pub fn for_qubits(n_qubits: usize) -> Result<Self> {
        GeneBounds::new(1..=n_qubits as u32, 1..=MAX_LAYERS as u32, n_qubits)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidBounds(msg));
        if self.n_qubits < 2 || self.n_qubits > crate::sim::MAX_QUBITS {
            return bad(format!(
                "qubit count {} outside 2..={}",
                self.n_qubits,
                crate::sim::MAX_QUBITS
            ));
        }
        if self.width.is_empty() || *self.width.start() < 1 {
            return bad(format!(
                "width range {:?} must be non-empty and start at >= 1",
                self.width
            ));
        }
        if *self.width.end() as usize > self.n_qubits {
            return bad(format!(
                "width max {} exceeds qubit count {}",
                self.width.end(),
                self.n_qubits
            ));
        }
        if self.depth.is_empty() || *self.depth.start() < 1 || *self.depth.end() as usize > MAX_LAYERS {
            return bad(format!("depth range {:?} must lie within 1..={MAX_LAYERS}", self.depth));
        }
        Ok(())
    }

    pub fn range_for(&self, position: usize) -> &RangeInclusive<u32> {
        if position == DEPTH_GENE {
            &self.depth
        } else {
            &self.width
        }
    }

    pub fn contains(&self, ch: &Chromosome) -> bool {
        ch.0.iter().enumerate().all(|(i, g)| self.range_for(i).contains(g))
    }

    pub fn check(&self, ch: &Chromosome) -> Result<()> {
        if self.contains(ch) {
            Ok(())
        } else {
            Err(Error::InvalidChromosome {
                genes: ch.0,
                reason: format!("outside width {:?} / depth {:?}", self.width, self.depth),
            })
        }
    }
}

pub fn random_chromosome<R: Rng + ?Sized>(bounds: &GeneBounds, rng: &mut R) -> Chromosome {
    let mut genes = [0; CHROMOSOME_LEN];
    for (i, g) in genes.iter_mut().enumerate() {
        *g = rng.random_range(bounds.range_for(i).clone());
    }
    Chromosome(genes)
}

/// Multi-point crossover producing one child.
///
/// `num_points` distinct cuts are drawn from the internal boundaries
/// `1..CHROMOSOME_LEN`; segments are copied alternately from `p1` and `p2`,
/// starting with `p1`.
pub fn crossover<R: Rng + ?Sized>(
    p1: &Chromosome,
    p2: &Chromosome,
    num_points: usize,
    rng: &mut R,
) -> Result<Chromosome> {
    let available = CHROMOSOME_LEN - 1;
    if num_points > available {
        return Err(Error::TooManyPoints {
            points: num_points,
            available,
        });
    }
    let mut cuts: Vec<usize> = index::sample(rng, available, num_points)
        .into_iter()
        .map(|i| i + 1)
        .collect();
    cuts.sort_unstable();
    Ok(crossover_at(p1, p2, &cuts))
}

/// Crossover with explicit, ascending cut positions.
pub fn crossover_at(p1: &Chromosome, p2: &Chromosome, cuts: &[usize]) -> Chromosome {
    let mut child = [0; CHROMOSOME_LEN];
    let mut from_first = true;
    let mut next_cut = cuts.iter().peekable();
    for (i, gene) in child.iter_mut().enumerate() {
        while next_cut.next_if(|&&c| c == i).is_some() {
            from_first = !from_first;
        }
        *gene = if from_first { p1.0[i] } else { p2.0[i] };
    }
    Chromosome(child)
}

/// Resamples one gene to a different admissible value.
///
/// The position is drawn uniformly among genes whose admissible set has
/// more than one value; with all sets singleton the input is returned.
pub fn mutate<R: Rng + ?Sized>(ch: &Chromosome, bounds: &GeneBounds, rng: &mut R) -> Chromosome {
    let mutable: Vec<usize> = (0..CHROMOSOME_LEN)
        .filter(|&i| {
            let r = bounds.range_for(i);
            r.end() > r.start()
        })
        .collect();
    if mutable.is_empty() {
        return *ch;
    }
    let position = mutable[rng.random_range(0..mutable.len())];
    mutate_at(ch, position, bounds, rng)
}

/// Resamples gene `position` uniformly from its admissible set minus the
/// current value.
pub fn mutate_at<R: Rng + ?Sized>(ch: &Chromosome, position: usize, bounds: &GeneBounds, rng: &mut R) -> Chromosome {
    let range = bounds.range_for(position);
    let (lo, hi) = (*range.start(), *range.end());
    let current = ch.0[position];
    let mut out = *ch;
    if hi == lo {
        return out;
    }
    if range.contains(&current) {
        // draw from the set with `current` removed, then shift past it
        let v = rng.random_range(lo..hi);
        out.0[position] = if v >= current { v + 1 } else { v };
    } else {
        out.0[position] = rng.random_range(lo..=hi);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn default_bounds() -> GeneBounds {
        GeneBounds::for_qubits(4).unwrap()
    }

    #[test]
    fn active_genes_follow_depth() {
        assert_eq!(Chromosome::new([1, 1, 4, 1, 1]).active_genes(), &[1, 1]);
        assert_eq!(Chromosome::new([3, 2, 2, 1, 2]).active_genes(), &[3, 2, 2, 1]);
        assert_eq!(Chromosome::new([4, 4, 4, 4, 2]).active_genes(), &[4, 4, 4, 4]);
    }

    #[test]
    fn singleton_bounds() {
        let b = GeneBounds::new(1..=1, 1..=1, 4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let ch = random_chromosome(&b, &mut rng);
            assert_eq!(ch, Chromosome::new([1, 1, 1, 1, 1]));
            assert_eq!(mutate(&ch, &b, &mut rng), ch);
        }
    }

    #[test]
    fn width_frequencies_are_uniform() {
        let b = default_bounds();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let mut counts = [0usize; 5];
        let draws = 10_000;
        for _ in 0..draws {
            let ch = random_chromosome(&b, &mut rng);
            assert!(b.contains(&ch));
            counts[ch.genes()[0] as usize] += 1;
        }
        for &c in &counts[1..] {
            assert!((c as f64 / draws as f64 - 0.25).abs() <= 0.02);
        }
    }

    #[test]
    fn crossover_with_fixed_cuts() {
        let p1 = Chromosome::new([1, 1, 1, 1, 1]);
        let p2 = Chromosome::new([4, 4, 4, 4, 2]);
        assert_eq!(crossover_at(&p1, &p2, &[1, 2, 3]), Chromosome::new([1, 4, 1, 4, 2]));
        assert_eq!(crossover_at(&p1, &p2, &[]), p1);
        assert_eq!(crossover_at(&p1, &p2, &[4]), Chromosome::new([1, 1, 1, 1, 2]));
    }

    #[test]
    fn crossover_rejects_too_many_points() {
        let p = Chromosome::new([1, 1, 1, 1, 1]);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(
            crossover(&p, &p, 5, &mut rng),
            Err(Error::TooManyPoints {
                points: 5,
                available: 4
            })
        ));
        assert!(crossover(&p, &p, 4, &mut rng).is_ok());
    }

    #[test]
    fn identical_parents_give_identical_child() {
        let p = Chromosome::new([3, 2, 4, 1, 2]);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..10 {
            assert_eq!(crossover(&p, &p, 3, &mut rng).unwrap(), p);
        }
    }

    #[test]
    fn mutate_depth_gene() {
        let b = default_bounds();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let ch = Chromosome::new([1, 1, 4, 1, 1]);
        assert_eq!(
            mutate_at(&ch, DEPTH_GENE, &b, &mut rng),
            Chromosome::new([1, 1, 4, 1, 2])
        );
    }

    #[test]
    fn bounds_validation() {
        assert!(GeneBounds::new(1..=5, 1..=2, 4).is_err());
        assert!(GeneBounds::new(1..=4, 1..=3, 4).is_err());
        assert!(GeneBounds::new(0..=4, 1..=2, 4).is_err());
        assert!(GeneBounds::new(1..=2, 1..=2, 1).is_err());
        assert!(GeneBounds::new(1..=6, 1..=2, 6).is_ok());
    }

    #[test]
    fn json_is_a_plain_array() {
        let ch = Chromosome::new([3, 2, 2, 1, 2]);
        assert_eq!(serde_json::to_string(&ch).unwrap(), "[3,2,2,1,2]");
        let back: Chromosome = serde_json::from_str("[3,2,2,1,2]").unwrap();
        assert_eq!(back, ch);
        assert_eq!(ch.to_string(), "[3,2,2,1,2]");
    }
}
