//! Dummy annotations.
//!
//! A gold score `c` sits between two adjacent grid labels `low` and `high`
//! with `c = α·low + (1 − α)·high`. A set of `n` simulated annotators is
//! built from `floor(n·α)` copies of `low` and the rest `high`; a small
//! fraction of positions is then overwritten with uniformly random grid
//! labels, and the set is sorted so that slot `i` always models the same
//! position in the confidence ordering of annotators.

use std::fmt;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Absorbs rounding in `n·α` so that e.g. `5 · 0.19999999999999996` counts as 1.
const FLOOR_EPS: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum AnnotateError {
    #[error("complexity {0} outside [0, 1]")]
    OutOfRange(f64),
    #[error("bracket bounds must satisfy low < high and low <= c <= high")]
    BadBracket,
    #[error("{0} is not a grid label")]
    NotOnGrid(f64),
    #[error("class id {0} outside 1..=5")]
    BadClass(u8),
    #[error("cannot aggregate an empty label set")]
    Empty,
    #[error("invalid annotation config: {0}")]
    BadConfig(&'static str),
}

/// One of the five labels `0, 0.25, 0.5, 0.75, 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GridLabel(u8);

impl GridLabel {
    pub const ALL: [GridLabel; 5] = [
        GridLabel(0),
        GridLabel(1),
        GridLabel(2),
        GridLabel(3),
        GridLabel(4),
    ];

    pub fn from_index(idx: u8) -> Option<Self> {
        (idx < 5).then_some(GridLabel(idx))
    }

    pub fn index(self) -> u8 {
        self.0
    }

    pub fn value(self) -> f64 {
        f64::from(self.0) * 0.25
    }

    /// Exact match against the grid values.
    pub fn from_value(v: f64) -> Result<Self, AnnotateError> {
        Self::ALL
            .into_iter()
            .find(|l| l.value() == v)
            .ok_or(AnnotateError::NotOnGrid(v))
    }

    /// Categorical class id: 0 → 1, 0.25 → 2, …, 1 → 5.
    pub fn to_categorical(self) -> u8 {
        self.0 + 1
    }

    pub fn from_categorical(class: u8) -> Result<Self, AnnotateError> {
        class
            .checked_sub(1)
            .and_then(Self::from_index)
            .ok_or(AnnotateError::BadClass(class))
    }
}

impl fmt::Display for GridLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnotationConfig {
    /// Number of simulated annotators.
    pub n: usize,
    /// Fraction of annotators replaced by random labels.
    pub rho: f64,
    pub seed: u64,
}

impl Default for AnnotationConfig {
    fn default() -> Self {
        Self {
            n: 5,
            rho: 0.05,
            seed: 0,
        }
    }
}

impl AnnotationConfig {
    pub fn validate(&self) -> Result<(), AnnotateError> {
        if self.n == 0 {
            return Err(AnnotateError::BadConfig("n must be at least 1"));
        }
        if !(0.0..1.0).contains(&self.rho) {
            return Err(AnnotateError::BadConfig("rho must lie in [0, 1)"));
        }
        if self.random_count() >= self.n {
            return Err(AnnotateError::BadConfig("floor(rho * n) must be below n"));
        }
        Ok(())
    }

    /// Number of randomized positions, `floor(rho·n)`.
    pub fn random_count(&self) -> usize {
        floor_count(self.rho * self.n as f64)
    }
}

fn floor_count(x: f64) -> usize {
    (x + FLOOR_EPS).floor().max(0.0) as usize
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnnotationSet {
    labels: Vec<GridLabel>,
    pub rho: f64,
    pub seed: u64,
}

impl AnnotationSet {
    /// Sorted ascending.
    pub fn labels(&self) -> &[GridLabel] {
        &self.labels
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn values(&self) -> Vec<f64> {
        self.labels.iter().map(|l| l.value()).collect()
    }
}

fn check_range(c: f64) -> Result<(), AnnotateError> {
    if (0.0..=1.0).contains(&c) {
        Ok(())
    } else {
        Err(AnnotateError::OutOfRange(c))
    }
}

/// Adjacent grid labels around `c`; the top cell is closed so `c = 1` maps to
/// `(0.75, 1)`.
pub fn bracket(c: f64) -> Result<(GridLabel, GridLabel), AnnotateError> {
    check_range(c)?;
    let low = (c / 0.25).floor().min(3.0) as u8;
    Ok((GridLabel(low), GridLabel(low + 1)))
}

/// Weight of `low` in `c = α·low + (1 − α)·high`.
pub fn alpha(c: f64, low: GridLabel, high: GridLabel) -> Result<f64, AnnotateError> {
    let (lo, hi) = (low.value(), high.value());
    if lo >= hi || c < lo || c > hi {
        return Err(AnnotateError::BadBracket);
    }
    Ok((hi - c) / (hi - lo))
}

/// Deterministic annotation set for `c`, seeded from `cfg.seed`.
pub fn generate_annotations(
    c: f64,
    cfg: &AnnotationConfig,
) -> Result<AnnotationSet, AnnotateError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    generate_annotations_with(c, cfg, &mut rng)
}

/// Like [`generate_annotations`] but draws from a caller-owned generator, so a
/// sequence of instances gets independent random positions.
pub fn generate_annotations_with<R: Rng + ?Sized>(
    c: f64,
    cfg: &AnnotationConfig,
    rng: &mut R,
) -> Result<AnnotationSet, AnnotateError> {
    check_range(c)?;
    cfg.validate()?;
    let (low, high) = bracket(c)?;
    let a = alpha(c, low, high)?;
    let n = cfg.n;
    let n_low = floor_count(n as f64 * a).min(n);

    let mut labels = vec![low; n_low];
    labels.resize(n, high);

    let m = cfg.random_count();
    if m > 0 {
        for pos in index::sample(rng, n, m) {
            labels[pos] = GridLabel(rng.gen_range(0..5));
        }
    }
    labels.sort_unstable();

    Ok(AnnotationSet {
        labels,
        rho: cfg.rho,
        seed: cfg.seed,
    })
}

/// Mean label value.
pub fn aggregate(labels: &[GridLabel]) -> Result<f64, AnnotateError> {
    if labels.is_empty() {
        return Err(AnnotateError::Empty);
    }
    let sum: f64 = labels.iter().map(|l| l.value()).sum();
    Ok(sum / labels.len() as f64)
}
