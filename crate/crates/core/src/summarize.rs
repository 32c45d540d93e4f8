//! Persistence histograms over birth time.
//!
//! A [`HistogramModel`] holds `M − 1` interior breakpoints on the birth axis,
//! trained once on pre-change diagrams so that every bin receives roughly the
//! same total persistence. Each later diagram is binned with the same model:
//! the persistence of every finite pair is added to the bin containing its
//! birth, and the result is normalized into an [`EmpiricalDistribution`].

use crate::error::{Error, Result};
use crate::types::PersistenceDiagram;

/// Variance floor used by [`HistogramModel::with_inverse_variance_sigma`].
pub const VARIANCE_FLOOR: f64 = 1e-6;
/// Minimum number of frames for inverse-variance weights.
pub const MIN_VARIANCE_FRAMES: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct HistogramModel {
    bins: usize,
    breakpoints: Vec<f64>,
    sigma: Vec<f64>,
    trained_dim: usize,
    training_frames: usize,
    include_infinite: bool,
}

/// A length-`M` probability vector together with the total persistence it
/// was normalized from.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalDistribution {
    pub mass: Vec<f64>,
    /// Raw persistence sum before normalization; zero for the uniform
    /// fallback.
    pub total: f64,
}

impl EmpiricalDistribution {
    pub fn uniform(bins: usize) -> Self {
        Self {
            mass: vec![1.0 / bins as f64; bins],
            total: 0.0,
        }
    }

    /// Normalizes a raw histogram, falling back to uniform when it carries no
    /// mass.
    pub fn from_raw(raw: Vec<f64>) -> Self {
        let total: f64 = raw.iter().sum();
        if total > 0.0 {
            Self {
                mass: raw.iter().map(|h| h / total).collect(),
                total,
            }
        } else {
            Self::uniform(raw.len())
        }
    }

    pub fn bins(&self) -> usize {
        self.mass.len()
    }

    /// Concatenates several distributions, each scaled by `1/n`, so that the
    /// result still sums to one.
    pub fn concat(parts: &[EmpiricalDistribution]) -> Self {
        let scale = 1.0 / parts.len() as f64;
        Self {
            mass: parts
                .iter()
                .flat_map(|p| p.mass.iter().map(move |m| m * scale))
                .collect(),
            total: parts.iter().map(|p| p.total).sum(),
        }
    }
}

/// Finite pairs of `dim` as `(birth, persistence)`, optionally with essential
/// classes closed off at the diagram's largest filtration value.
fn masses(
    diagram: &PersistenceDiagram,
    dim: usize,
    include_infinite: bool,
) -> impl Iterator<Item = (f64, f64)> + '_ {
    let finite = diagram.finite(dim).map(|p| (p.birth, p.persistence));
    let infinite = diagram
        .infinite(dim)
        .iter()
        .filter(move |_| include_infinite)
        .map(move |&b| (b, diagram.max_value - b));
    finite.chain(infinite)
}

/// Trains breakpoints as persistence-weighted quantiles of the pooled birth
/// times, with essential classes ignored.
pub fn train_breakpoints(
    training: &[PersistenceDiagram],
    bins: usize,
    dim: usize,
) -> Result<HistogramModel> {
    HistogramModel::train(training, bins, dim, false)
}

/// Bins one diagram with a trained model.
pub fn bin_diagram(diagram: &PersistenceDiagram, model: &HistogramModel) -> EmpiricalDistribution {
    EmpiricalDistribution::from_raw(model.raw_histogram(diagram))
}

impl HistogramModel {
    /// Breakpoint `b_m` (for `m = 1..M−1`) is the smallest pooled birth such
    /// that the persistence born strictly before it is at least `m/M` of the
    /// total. Bins are left-closed: `(−∞, b_1), [b_1, b_2), …, [b_{M−1}, ∞)`.
    /// When atoms make two breakpoints coincide, the later one moves to the
    /// next larger birth (or the next representable value) to keep the
    /// sequence strictly increasing.
    pub fn train(
        training: &[PersistenceDiagram],
        bins: usize,
        dim: usize,
        include_infinite: bool,
    ) -> Result<Self> {
        if bins < 2 {
            return Err(Error::InvalidBinCount(bins));
        }
        if dim > 1 {
            return Err(Error::InvalidParameter(format!("homology dimension {dim}")));
        }
        let mut pool: Vec<(f64, f64)> = training
            .iter()
            .flat_map(|d| masses(d, dim, include_infinite))
            .filter(|&(_, p)| p > 0.0)
            .collect();
        if pool.is_empty() {
            return Err(Error::NoTrainingMass);
        }
        pool.sort_by(|a, b| a.0.total_cmp(&b.0));

        // collapse equal births into atoms: (birth, mass strictly before it)
        let mut atoms: Vec<(f64, f64)> = Vec::new();
        let mut cumulative = 0.0;
        for &(birth, p) in &pool {
            if atoms.last().is_none_or(|a| a.0 != birth) {
                atoms.push((birth, cumulative));
            }
            cumulative += p;
        }
        let total = cumulative;

        let mut breakpoints = Vec::with_capacity(bins - 1);
        let mut lo = 0usize;
        for m in 1..bins {
            let target = total * m as f64 / bins as f64;
            while lo < atoms.len() && atoms[lo].1 < target {
                lo += 1;
            }
            let mut b = atoms.get(lo).map_or(atoms[atoms.len() - 1].0, |a| a.0);
            if let Some(&prev) = breakpoints.last() {
                if b <= prev {
                    b = atoms
                        .iter()
                        .map(|a| a.0)
                        .find(|&x| x > prev)
                        .unwrap_or_else(|| prev.next_up());
                }
            }
            breakpoints.push(b);
        }

        Ok(Self {
            bins,
            breakpoints,
            sigma: vec![1.0; bins],
            trained_dim: dim,
            training_frames: training.len(),
            include_infinite,
        })
    }

    /// Rebuilds a model from stored parts, checking its invariants.
    pub fn from_parts(
        breakpoints: Vec<f64>,
        sigma: Vec<f64>,
        trained_dim: usize,
        training_frames: usize,
        include_infinite: bool,
    ) -> Result<Self> {
        let bins = sigma.len();
        if bins < 2 {
            return Err(Error::InvalidBinCount(bins));
        }
        if breakpoints.len() + 1 != bins {
            return Err(Error::DimensionMismatch {
                expected: bins - 1,
                got: breakpoints.len(),
            });
        }
        if breakpoints.iter().any(|b| !b.is_finite())
            || breakpoints.windows(2).any(|w| w[0] >= w[1])
        {
            return Err(Error::InvalidParameter(
                "breakpoints must be finite and strictly increasing".into(),
            ));
        }
        if sigma.iter().any(|s| !(s.is_finite() && *s >= 0.0)) {
            return Err(Error::InvalidParameter("sigma must be finite and >= 0".into()));
        }
        if trained_dim > 1 {
            return Err(Error::InvalidParameter(format!(
                "homology dimension {trained_dim}"
            )));
        }
        Ok(Self {
            bins,
            breakpoints,
            sigma,
            trained_dim,
            training_frames,
            include_infinite,
        })
    }

    pub fn bins(&self) -> usize {
        self.bins
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn sigma(&self) -> &[f64] {
        &self.sigma
    }

    pub fn trained_dim(&self) -> usize {
        self.trained_dim
    }

    pub fn training_frames(&self) -> usize {
        self.training_frames
    }

    pub fn include_infinite(&self) -> bool {
        self.include_infinite
    }

    /// Bin index of a birth value.
    pub fn bin_of(&self, birth: f64) -> usize {
        self.breakpoints.partition_point(|&b| b <= birth)
    }

    /// Per-bin persistence sums before normalization.
    pub fn raw_histogram(&self, diagram: &PersistenceDiagram) -> Vec<f64> {
        let mut raw = vec![0.0; self.bins];
        for (birth, p) in masses(diagram, self.trained_dim, self.include_infinite) {
            raw[self.bin_of(birth)] += p;
        }
        raw
    }

    pub fn bin(&self, diagram: &PersistenceDiagram) -> EmpiricalDistribution {
        bin_diagram(diagram, self)
    }

    /// Replaces the all-ones weights by `1 / max(var_m, floor)` where `var_m`
    /// is the variance of bin `m` across the given pre-change frames.
    pub fn with_inverse_variance_sigma(&self, frames: &[EmpiricalDistribution]) -> Result<Self> {
        if frames.len() < MIN_VARIANCE_FRAMES {
            return Err(Error::TrainingPrefixTooShort {
                needed: MIN_VARIANCE_FRAMES,
                got: frames.len(),
            });
        }
        if let Some(f) = frames.iter().find(|f| f.bins() != self.bins) {
            return Err(Error::DimensionMismatch {
                expected: self.bins,
                got: f.bins(),
            });
        }
        let n = frames.len() as f64;
        let sigma = (0..self.bins)
            .map(|m| {
                let mean = frames.iter().map(|f| f.mass[m]).sum::<f64>() / n;
                let var = frames.iter().map(|f| (f.mass[m] - mean).powi(2)).sum::<f64>() / (n - 1.0);
                1.0 / var.max(VARIANCE_FLOOR)
            })
            .collect();
        Ok(Self {
            sigma,
            ..self.clone()
        })
    }
}
