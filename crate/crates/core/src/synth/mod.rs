//! Seeded scenario generators with known change-points.
//!
//! Every generator is a pure function of its arguments; randomness comes from
//! [`rng::StreamRng`], whose algorithm is documented there.

pub mod rng;

use crate::error::{Error, Result};
use crate::types::{PointCloud, ScalarGrid};
use rng::StreamRng;

/// `n_points` drawn uniformly on the union of circles of radius `radius`
/// around `centers`, each perturbed by isotropic Gaussian noise.
///
/// Per point: pick a circle with `below(len)`, an angle `2π · uniform()`, then
/// two normal draws scaled by `noise_sd` (drawn even when `noise_sd` is zero).
pub fn sample_circles(
    n_points: usize,
    centers: &[[f64; 2]],
    radius: f64,
    noise_sd: f64,
    seed: u64,
) -> Result<PointCloud> {
    if centers.is_empty() || n_points == 0 {
        return Err(Error::EmptyInput);
    }
    if !(radius > 0.0 && radius.is_finite()) || !(noise_sd >= 0.0 && noise_sd.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "radius {radius} must be positive and noise_sd {noise_sd} nonnegative"
        )));
    }
    let mut rng = StreamRng::new(seed);
    let mut coords = Vec::with_capacity(2 * n_points);
    for _ in 0..n_points {
        let c = centers[rng.below(centers.len() as u64) as usize];
        let theta = std::f64::consts::TAU * rng.uniform();
        let (nx, ny) = (rng.gaussian(), rng.gaussian());
        coords.push(c[0] + radius * theta.cos() + noise_sd * nx);
        coords.push(c[1] + radius * theta.sin() + noise_sd * ny);
    }
    PointCloud::from_flat(2, coords)
}

/// A stream of images made of fixed Gaussian bumps plus pixel noise, whose
/// bump amplitude switches at `change_at`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridStream {
    pub rows: usize,
    pub cols: usize,
    /// Number of frames `T`.
    pub frames: usize,
    /// First post-change frame (1-based). Frames `1..change_at` use
    /// `pre_amp`, frames `change_at..=T` use `post_amp`.
    pub change_at: usize,
    pub pre_amp: f64,
    pub post_amp: f64,
    pub noise_sd: f64,
    pub bumps: usize,
    /// Bump standard deviation as a fraction of `min(rows, cols)`.
    pub bump_width: f64,
    pub seed: u64,
}

impl GridStream {
    /// The defaults used by the synthetic acceptance experiment.
    pub fn new(rows: usize, cols: usize, frames: usize, change_at: usize) -> Self {
        Self {
            rows,
            cols,
            frames,
            change_at,
            pre_amp: 1.0,
            post_amp: 2.0,
            noise_sd: 0.05,
            bumps: 3,
            bump_width: 0.25,
            seed: 0,
        }
    }

    /// Generates all frames. Bump centers are drawn first (uniform over the
    /// middle 70% of each axis), then each frame draws one normal variate per
    /// pixel in row-major order.
    pub fn generate(&self) -> Result<Vec<ScalarGrid>> {
        if self.rows == 0 || self.cols == 0 || self.frames == 0 {
            return Err(Error::EmptyInput);
        }
        if self.change_at == 0 || self.change_at >= self.frames {
            return Err(Error::InvalidParameter(format!(
                "change_at {} must lie in 1..{}",
                self.change_at, self.frames
            )));
        }
        if self.noise_sd.is_nan() || self.noise_sd < 0.0 || self.bump_width.is_nan() || self.bump_width <= 0.0 {
            return Err(Error::InvalidParameter(
                "noise_sd must be >= 0 and bump_width > 0".into(),
            ));
        }
        let mut rng = StreamRng::new(self.seed);
        let centers: Vec<(f64, f64)> = (0..self.bumps)
            .map(|_| {
                let r = (0.15 + 0.7 * rng.uniform()) * (self.rows - 1) as f64;
                let c = (0.15 + 0.7 * rng.uniform()) * (self.cols - 1) as f64;
                (r, c)
            })
            .collect();
        let s = self.bump_width * self.rows.min(self.cols) as f64;
        let profile: Vec<f64> = (0..self.rows * self.cols)
            .map(|i| {
                let (r, c) = ((i / self.cols) as f64, (i % self.cols) as f64);
                centers
                    .iter()
                    .map(|&(cr, cc)| {
                        let d2 = (r - cr).powi(2) + (c - cc).powi(2);
                        (-d2 / (2.0 * s * s)).exp()
                    })
                    .sum()
            })
            .collect();

        (1..=self.frames)
            .map(|t| {
                let amp = if t < self.change_at {
                    self.pre_amp
                } else {
                    self.post_amp
                };
                let values = profile
                    .iter()
                    .map(|p| amp * p + self.noise_sd * rng.gaussian())
                    .collect();
                ScalarGrid::new(self.rows, self.cols, values)
            })
            .collect()
    }
}

/// Convenience wrapper around [`GridStream`].
#[allow(clippy::too_many_arguments)]
pub fn gen_grid_stream(
    rows: usize,
    cols: usize,
    frames: usize,
    change_at: usize,
    pre_amp: f64,
    post_amp: f64,
    noise_sd: f64,
    seed: u64,
) -> Result<Vec<ScalarGrid>> {
    GridStream {
        pre_amp,
        post_amp,
        noise_sd,
        seed,
        ..GridStream::new(rows, cols, frames, change_at)
    }
    .generate()
}
