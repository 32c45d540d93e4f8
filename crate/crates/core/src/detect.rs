//! Online scan statistic over a stream of persistence histograms.
//!
//! Frames are numbered `t = 1, 2, …` in arrival order. For a candidate change
//! time `k`, four consecutive windows of `w` frames are compared:
//!
//! ```text
//!   (k−2w, k−w]   (k−w, k]   |   (k, k+w]   (k+w, k+2w]
//!       ω            ω′      k       ξ           ξ′
//! ```
//!
//! and `χ(t, k) = Σ_m σ_m (ω_m − ξ_m)(ω′_m − ξ′_m)`. At every frame the detector reports the maximum of `χ(t, k)` over all candidates `k`
//! whose four windows lie inside the lookback, and alarms the first time that
//! maximum reaches the threshold.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::summarize::EmpiricalDistribution;
use crate::synth::rng::StreamRng;

#[derive(Debug, Clone, PartialEq)]
pub struct DetectorConfig {
    /// Length `w` of each of the four windows.
    pub window: usize,
    /// Oldest frame a window may reach back to, counted from the current
    /// frame. `None` scans every candidate since the first frame.
    pub lookback: Option<usize>,
    pub threshold: f64,
    pub sigma: Vec<f64>,
    /// Pool raw persistence across a window's frames before normalizing,
    /// instead of averaging per-frame distributions.
    pub pool_raw_mass: bool,
}

impl DetectorConfig {
    /// Defaults: lookback `8w`, infinite threshold, averaged distributions.
    pub fn new(window: usize, sigma: Vec<f64>) -> Self {
        Self {
            window,
            lookback: Some(8 * window),
            threshold: f64::INFINITY,
            sigma,
            pool_raw_mass: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let w = self.window;
        if w == 0 {
            return Err(Error::InvalidParameter("window must be at least 1".into()));
        }
        if let Some(l) = self.lookback {
            if l < 4 * w {
                return Err(Error::InvalidParameter(format!(
                    "lookback {l} is shorter than four windows ({})",
                    4 * w
                )));
            }
        }
        if self.threshold.is_nan() || self.threshold < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "threshold must be >= 0, got {}",
                self.threshold
            )));
        }
        if self.sigma.is_empty() || self.sigma.iter().any(|s| !(s.is_finite() && *s >= 0.0)) {
            return Err(Error::InvalidParameter(
                "sigma must be nonempty, finite and >= 0".into(),
            ));
        }
        Ok(())
    }
}

/// What the detector reports after one frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    pub t: usize,
    /// `None` until a full four-window layout fits.
    pub chi_max: Option<f64>,
    pub k_hat: Option<usize>,
    pub alarm: bool,
    pub alarmed_at: Option<usize>,
}

/// Weighted bilinear form `Σ σ_m (ω_m − ξ_m)(ω′_m − ξ′_m)`. May be negative.
pub fn chi_statistic(
    omega: &[f64],
    omega2: &[f64],
    xi: &[f64],
    xi2: &[f64],
    sigma: &[f64],
) -> Result<f64> {
    let m = sigma.len();
    for v in [omega, omega2, xi, xi2] {
        if v.len() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                got: v.len(),
            });
        }
    }
    Ok(chi(omega, omega2, xi, xi2, sigma))
}

fn chi(omega: &[f64], omega2: &[f64], xi: &[f64], xi2: &[f64], sigma: &[f64]) -> f64 {
    let mut acc = 0.0;
    for m in 0..sigma.len() {
        acc += sigma[m] * (omega[m] - xi[m]) * (omega2[m] - xi2[m]);
    }
    acc
}

#[derive(Debug, Clone)]
pub struct Detector {
    cfg: DetectorConfig,
    history: VecDeque<EmpiricalDistribution>,
    t: usize,
    alarmed_at: Option<usize>,
    last: Option<(f64, usize)>,
    means: Vec<Vec<f64>>,
}

impl Detector {
    pub fn new(cfg: DetectorConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Self {
            cfg,
            history: VecDeque::new(),
            t: 0,
            alarmed_at: None,
            last: None,
            means: Vec::new(),
        })
    }

    pub fn config(&self) -> &DetectorConfig {
        &self.cfg
    }

    /// Number of frames seen so far.
    pub fn t(&self) -> usize {
        self.t
    }

    /// The stopping time: first frame whose statistic reached the threshold.
    pub fn alarmed_at(&self) -> Option<usize> {
        self.alarmed_at
    }

    /// `(chi_max, k_hat)` of the latest frame, if it had a candidate.
    pub fn last(&self) -> Option<(f64, usize)> {
        self.last
    }

    /// Feeds one frame and rescans every admissible candidate.
    pub fn step(&mut self, dist: EmpiricalDistribution) -> Result<StepOutcome> {
        let bins = self.cfg.sigma.len();
        if dist.bins() != bins {
            return Err(Error::DimensionMismatch {
                expected: bins,
                got: dist.bins(),
            });
        }
        self.t += 1;
        self.history.push_back(dist);
        if let Some(l) = self.cfg.lookback {
            while self.history.len() > l {
                self.history.pop_front();
            }
        }

        self.last = self.scan();
        let (chi_max, k_hat) = match self.last {
            Some((c, k)) => (Some(c), Some(k)),
            None => (None, None),
        };
        let alarm = chi_max.is_some_and(|c| c >= self.cfg.threshold);
        if alarm && self.alarmed_at.is_none() {
            self.alarmed_at = Some(self.t);
        }
        Ok(StepOutcome {
            t: self.t,
            chi_max,
            k_hat,
            alarm,
            alarmed_at: self.alarmed_at,
        })
    }

    fn scan(&mut self) -> Option<(f64, usize)> {
        let w = self.cfg.window;
        let t = self.t;
        // history holds frames first..=t
        let first = t + 1 - self.history.len();
        let k_lo = first - 1 + 2 * w;
        if t < 2 * w || k_lo > t - 2 * w {
            return None;
        }
        let k_hi = t - 2 * w;

        // window means for windows ending at e = first-1+w ..= t
        let e0 = first - 1 + w;
        let n_windows = t - e0 + 1;
        let bins = self.cfg.sigma.len();
        self.means.resize_with(n_windows.max(self.means.len()), Vec::new);
        for (i, mean) in self.means.iter_mut().take(n_windows).enumerate() {
            let start = e0 + i + 1 - w - first;
            let frames = self.history.range(start..start + w);
            window_mean(frames, bins, self.cfg.pool_raw_mass, mean);
        }

        let sigma = &self.cfg.sigma;
        let mean_at = |e: usize| self.means[e - e0].as_slice();
        let mut best: Option<(f64, usize)> = None;
        for k in k_lo..=k_hi {
            let c = chi(mean_at(k - w), mean_at(k), mean_at(k + w), mean_at(k + 2 * w), sigma);
            if best.is_none_or(|(b, _)| c > b) {
                best = Some((c, k));
            }
        }
        best
    }

    /// Runs a fresh detector over a whole stream.
    pub fn run(cfg: DetectorConfig, stream: &[EmpiricalDistribution]) -> Result<Vec<StepOutcome>> {
        let mut det = Self::new(cfg)?;
        stream.iter().map(|d| det.step(d.clone())).collect()
    }
}

fn window_mean<'a>(
    frames: impl Iterator<Item = &'a EmpiricalDistribution>,
    bins: usize,
    pool_raw_mass: bool,
    out: &mut Vec<f64>,
) {
    out.clear();
    out.resize(bins, 0.0);
    let mut count = 0usize;
    let mut total = 0.0;
    for f in frames {
        count += 1;
        if pool_raw_mass {
            total += f.total;
            for (o, m) in out.iter_mut().zip(&f.mass) {
                *o += m * f.total;
            }
        } else {
            for (o, m) in out.iter_mut().zip(&f.mass) {
                *o += m;
            }
        }
    }
    if pool_raw_mass {
        if total > 0.0 {
            out.iter_mut().for_each(|o| *o /= total);
        } else {
            out.iter_mut().for_each(|o| *o = 1.0 / bins as f64);
        }
    } else {
        let n = count as f64;
        out.iter_mut().for_each(|o| *o /= n);
    }
}

/// Chooses a threshold from pre-change data by circular block bootstrap.
///
/// Each replicate stitches blocks of `2w` consecutive pre-change frames
/// (wrapping around the end) into a stream of `horizon` frames, runs the
/// detector over it and records the largest statistic. The threshold is the
/// `⌈(1 − α) R⌉`-th smallest of the `R` recorded maxima.
pub fn calibrate_threshold(
    pre_change: &[EmpiricalDistribution],
    cfg: &DetectorConfig,
    alpha: f64,
    horizon: usize,
    replicates: usize,
    seed: u64,
) -> Result<f64> {
    let mut cfg = cfg.clone();
    cfg.threshold = f64::INFINITY;
    cfg.validate()?;
    let w = cfg.window;
    if pre_change.len() < 4 * w {
        return Err(Error::TrainingPrefixTooShort {
            needed: 4 * w,
            got: pre_change.len(),
        });
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "false alarm probability must lie in (0, 1], got {alpha}"
        )));
    }
    if replicates == 0 {
        return Err(Error::InvalidParameter("need at least one replicate".into()));
    }
    if horizon < 4 * w {
        return Err(Error::InvalidParameter(format!(
            "horizon {horizon} is shorter than four windows ({})",
            4 * w
        )));
    }

    let n = pre_change.len();
    let block = 2 * w;
    let mut rng = StreamRng::new(seed);
    let mut maxima = Vec::with_capacity(replicates);
    for _ in 0..replicates {
        let mut det = Detector::new(cfg.clone())?;
        let mut peak = f64::NEG_INFINITY;
        while det.t() < horizon {
            let start = rng.below(n as u64) as usize;
            for j in 0..block.min(horizon - det.t()) {
                let out = det.step(pre_change[(start + j) % n].clone())?;
                if let Some(c) = out.chi_max {
                    peak = peak.max(c);
                }
            }
        }
        maxima.push(peak);
    }
    maxima.sort_by(f64::total_cmp);
    let rank = (((1.0 - alpha) * replicates as f64) - 1e-9).ceil().max(1.0) as usize;
    Ok(maxima[rank.min(replicates) - 1])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dist(v: &[f64]) -> EmpiricalDistribution {
        EmpiricalDistribution {
            mass: v.to_vec(),
            total: 1.0,
        }
    }

    #[test]
    fn chi_examples() {
        let p = [1.0, 0.0];
        let q = [0.0, 1.0];
        assert_eq!(chi_statistic(&p, &[0.3, 0.7], &p, &q, &[1.0, 1.0]).unwrap(), 0.0);
        assert_eq!(chi_statistic(&p, &p, &q, &q, &[1.0, 1.0]).unwrap(), 2.0);
        assert_eq!(chi_statistic(&p, &p, &q, &q, &[2.0, 1.0]).unwrap(), 3.0);
        assert_eq!(chi_statistic(&p, &q, &q, &p, &[1.0, 1.0]).unwrap(), -2.0);
        assert_eq!(
            chi_statistic(&p, &p, &q, &[1.0], &[1.0, 1.0]),
            Err(Error::DimensionMismatch {
                expected: 2,
                got: 1
            })
        );
    }

    #[test]
    fn config_checks() {
        let mut cfg = DetectorConfig::new(2, vec![1.0; 3]);
        assert!(cfg.validate().is_ok());
        cfg.lookback = Some(7);
        assert!(cfg.validate().is_err());
        cfg.lookback = None;
        cfg.threshold = f64::NAN;
        assert!(cfg.validate().is_err());
        cfg.threshold = 1.0;
        cfg.window = 0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn constant_stream_never_alarms() {
        let mut cfg = DetectorConfig::new(3, vec![1.0; 2]);
        cfg.threshold = 1e-12;
        let stream = vec![dist(&[0.3, 0.7]); 60];
        let out = Detector::run(cfg, &stream).unwrap();
        assert!(out.iter().all(|o| !o.alarm));
        assert!(out.iter().filter_map(|o| o.chi_max).all(|c| c == 0.0));
    }

    #[test]
    fn switch_is_located_when_windows_align() {
        let w = 2;
        let k0 = 10;
        let mut stream = vec![dist(&[1.0, 0.0]); k0];
        stream.extend(vec![dist(&[0.0, 1.0]); 10]);
        let mut cfg = DetectorConfig::new(w, vec![1.0, 1.0]);
        cfg.lookback = None;
        let out = Detector::run(cfg, &stream).unwrap();
        let at = &out[k0 + 2 * w - 1];
        assert_eq!(at.t, k0 + 2 * w);
        assert_eq!(at.chi_max, Some(2.0));
        assert_eq!(at.k_hat, Some(k0));
    }

    #[test]
    fn short_stream_has_no_candidate() {
        let w = 3;
        let out = Detector::run(DetectorConfig::new(w, vec![1.0; 2]), &vec![dist(&[0.5, 0.5]); 4 * w - 1])
            .unwrap();
        assert!(out.iter().all(|o| o.chi_max.is_none() && !o.alarm));
        let out = Detector::run(DetectorConfig::new(w, vec![1.0; 2]), &vec![dist(&[0.5, 0.5]); 4 * w])
            .unwrap();
        assert_eq!(out.last().unwrap().k_hat, Some(2 * w));
    }

    #[test]
    fn alarm_time_is_frozen() {
        let mut stream = vec![dist(&[1.0, 0.0]); 8];
        stream.extend(vec![dist(&[0.0, 1.0]); 8]);
        stream.extend(vec![dist(&[1.0, 0.0]); 8]);
        let mut cfg = DetectorConfig::new(1, vec![1.0, 1.0]);
        cfg.threshold = 1.0;
        let out = Detector::run(cfg, &stream).unwrap();
        let first = out.iter().find(|o| o.alarm).unwrap().t;
        assert!(out.iter().skip(first).all(|o| o.alarmed_at == Some(first)));
        assert!(out.iter().filter(|o| o.alarm).count() > 1);
    }

    #[test]
    fn dimension_mismatch_in_step() {
        let mut det = Detector::new(DetectorConfig::new(1, vec![1.0; 3])).unwrap();
        assert!(det.step(dist(&[1.0, 0.0])).is_err());
    }

    #[test]
    fn pooled_raw_mass_weights_by_total() {
        let frames = [
            EmpiricalDistribution {
                mass: vec![1.0, 0.0],
                total: 3.0,
            },
            EmpiricalDistribution {
                mass: vec![0.0, 1.0],
                total: 1.0,
            },
        ];
        let mut out = Vec::new();
        window_mean(frames.iter(), 2, true, &mut out);
        assert_eq!(out, vec![0.75, 0.25]);
        window_mean(frames.iter(), 2, false, &mut out);
        assert_eq!(out, vec![0.5, 0.5]);
        let empty = [EmpiricalDistribution::uniform(2)];
        window_mean(empty.iter(), 2, true, &mut out);
        assert_eq!(out, vec![0.5, 0.5]);
    }

    #[test]
    fn degenerate_calibration() {
        let cfg = DetectorConfig::new(2, vec![1.0; 2]);
        let pre = vec![dist(&[0.2, 0.8]); 10];
        assert_eq!(calibrate_threshold(&pre, &cfg, 0.05, 30, 20, 1).unwrap(), 0.0);
        assert!(matches!(
            calibrate_threshold(&pre[..7], &cfg, 0.05, 30, 20, 1),
            Err(Error::TrainingPrefixTooShort { needed: 8, got: 7 })
        ));
    }

    #[test]
    fn calibration_quantile_boundaries() {
        let cfg = DetectorConfig::new(1, vec![1.0; 2]);
        let pre: Vec<_> = (0..12)
            .map(|i| {
                let a = ((i * 7) % 11) as f64 / 10.0;
                dist(&[a, 1.0 - a])
            })
            .collect();
        let all_min = calibrate_threshold(&pre, &cfg, 1.0, 20, 50, 9).unwrap();
        let mid = calibrate_threshold(&pre, &cfg, 0.5, 20, 50, 9).unwrap();
        let strict = calibrate_threshold(&pre, &cfg, 0.01, 20, 50, 9).unwrap();
        assert!(all_min <= mid && mid <= strict);
        assert!(calibrate_threshold(&pre, &cfg, 0.0, 20, 50, 9).is_err());
    }
}
