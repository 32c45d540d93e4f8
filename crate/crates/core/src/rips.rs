//! Vietoris–Rips filtration of a point cloud.

use crate::error::{Error, Result};
use crate::types::{FilteredComplex, PointCloud, Simplex};

/// Truncation scale and maximum simplex dimension. The metric is Euclidean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RipsConfig {
    pub eps_max: f64,
    pub max_dim: usize,
}

impl RipsConfig {
    pub fn new(eps_max: f64, max_dim: usize) -> Result<Self> {
        let cfg = Self { eps_max, max_dim };
        cfg.check()?;
        Ok(cfg)
    }

    fn check(&self) -> Result<()> {
        if self.eps_max.is_nan() || self.eps_max <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "eps_max must be positive, got {}",
                self.eps_max
            )));
        }
        if !(1..=2).contains(&self.max_dim) {
            return Err(Error::InvalidParameter(format!(
                "max_dim must be 1 or 2, got {}",
                self.max_dim
            )));
        }
        Ok(())
    }
}

/// Builds the Rips complex truncated at `cfg.eps_max`.
///
/// Vertices enter at 0, an edge enters at the distance between its endpoints
/// and a triangle at the longest of its three edges. All pairwise distances
/// are computed; there is no spatial index.
pub fn build_rips(cloud: &PointCloud, cfg: &RipsConfig) -> Result<FilteredComplex> {
    cfg.check()?;
    let n = cloud.len();
    if n == 0 {
        return Err(Error::EmptyInput);
    }

    let mut simplices: Vec<Simplex> = (0..n as u32).map(|v| Simplex::vertex(v, 0.0)).collect();
    // dist[i * n + j] for present edges, NaN otherwise
    let mut dist = if cfg.max_dim == 2 {
        vec![f64::NAN; n * n]
    } else {
        Vec::new()
    };
    let mut upper: Vec<Vec<u32>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in i + 1..n {
            let d = cloud.distance(i, j);
            if d <= cfg.eps_max {
                simplices.push(Simplex::edge(i as u32, j as u32, d));
                if cfg.max_dim == 2 {
                    dist[i * n + j] = d;
                    upper[i].push(j as u32);
                }
            }
        }
    }

    if cfg.max_dim == 2 {
        for (i, nbrs) in upper.iter().enumerate() {
            for (a, &j) in nbrs.iter().enumerate() {
                let dij = dist[i * n + j as usize];
                for &k in &nbrs[a + 1..] {
                    let djk = dist[j as usize * n + k as usize];
                    if djk.is_nan() {
                        continue;
                    }
                    let value = dij.max(dist[i * n + k as usize]).max(djk);
                    simplices.push(Simplex::triangle(i as u32, j, k, value));
                }
            }
        }
    }

    Ok(FilteredComplex::from_simplices(simplices))
}
