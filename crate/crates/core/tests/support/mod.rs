//! Independent reference implementations used to check the library.
//!
//! Nothing here calls into the reduction, the union-find or the scan of the
//! library; only plain data types are shared.
#![allow(dead_code)]

use std::collections::HashMap;

use tdacp::synth::rng::StreamRng;
use tdacp::{FilteredComplex, PersistenceDiagram, PointCloud, Simplex};

/// `(dim, birth, death)` of every finite pair and `(dim, birth)` of every
/// essential class in dimensions 0 and 1, sorted.
#[derive(Debug, Clone, PartialEq)]
pub struct Bars {
    pub finite: Vec<(usize, f64, f64)>,
    pub essential: Vec<(usize, f64)>,
}

impl Bars {
    pub fn sorted(mut self) -> Self {
        self.finite
            .sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
        self.essential
            .sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
        self
    }

    pub fn from_diagram(d: &PersistenceDiagram) -> Self {
        Self {
            finite: d
                .pairs
                .iter()
                .map(|p| (p.dim as usize, p.birth, p.birth + p.persistence))
                .collect(),
            essential: (0..2)
                .flat_map(|dim| d.infinite(dim).iter().map(move |&b| (dim, b)))
                .collect(),
        }
        .sorted()
    }
}

/// Dense Z/2 boundary matrix reduced column by column, left to right, with no
/// shortcuts. `O(m^3)`.
pub fn naive_reduction(complex: &FilteredComplex) -> Bars {
    let simplices = complex.simplices();
    let m = simplices.len();
    let position: HashMap<Vec<u32>, usize> = simplices
        .iter()
        .enumerate()
        .map(|(i, s)| (s.vertices().to_vec(), i))
        .collect();

    let mut columns: Vec<Vec<bool>> = simplices
        .iter()
        .map(|s| {
            let mut col = vec![false; m];
            let v = s.vertices();
            if v.len() > 1 {
                for skip in 0..v.len() {
                    let face: Vec<u32> = v
                        .iter()
                        .enumerate()
                        .filter(|&(i, _)| i != skip)
                        .map(|(_, &x)| x)
                        .collect();
                    col[position[&face]] = true;
                }
            }
            col
        })
        .collect();

    let low = |col: &[bool]| col.iter().rposition(|&x| x);
    let mut low_owner: HashMap<usize, usize> = HashMap::new();
    for j in 0..m {
        while let Some(l) = low(&columns[j]) {
            match low_owner.get(&l) {
                Some(&other) => {
                    let add = columns[other].clone();
                    for (x, y) in columns[j].iter_mut().zip(add) {
                        *x ^= y;
                    }
                }
                None => {
                    low_owner.insert(l, j);
                    break;
                }
            }
        }
    }

    let mut finite = Vec::new();
    let mut paired = vec![false; m];
    for (&b, &d) in &low_owner {
        paired[b] = true;
        paired[d] = true;
        let dim = simplices[b].dim();
        finite.push((dim, simplices[b].value(), simplices[d].value()));
    }
    let essential = (0..m)
        .filter(|&i| !paired[i] && columns[i].iter().all(|&x| !x) && simplices[i].dim() < 2)
        .map(|i| (simplices[i].dim(), simplices[i].value()))
        .collect();
    Bars { finite, essential }.sorted()
}

/// A random filtered complex on at most `max_vertices` vertices, up to the
/// full 2-skeleton. Values are small integers so ties are common.
pub fn random_complex(rng: &mut StreamRng, max_vertices: usize) -> FilteredComplex {
    let n = 1 + rng.below(max_vertices as u64) as usize;
    let p_edge = 0.3 + 0.7 * rng.uniform();
    let p_tri = rng.uniform();
    let mut simplices = Vec::new();
    let mut vertex_value = vec![0.0; n];
    for (v, val) in vertex_value.iter_mut().enumerate() {
        *val = rng.below(6) as f64;
        simplices.push(Simplex::new(&[v as u32], *val).unwrap());
    }
    let mut edge_value: HashMap<(usize, usize), f64> = HashMap::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.uniform() < p_edge {
                let v = vertex_value[a].max(vertex_value[b]) + rng.below(4) as f64;
                edge_value.insert((a, b), v);
                simplices.push(Simplex::new(&[a as u32, b as u32], v).unwrap());
            }
        }
    }
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                let (Some(ab), Some(ac), Some(bc)) = (
                    edge_value.get(&(a, b)),
                    edge_value.get(&(a, c)),
                    edge_value.get(&(b, c)),
                ) else {
                    continue;
                };
                if rng.uniform() < p_tri {
                    let v = ab.max(*ac).max(*bc) + rng.below(3) as f64;
                    simplices.push(Simplex::new(&[a as u32, b as u32, c as u32], v).unwrap());
                }
            }
        }
    }
    FilteredComplex::from_simplices(simplices)
}

/// Euclidean minimum spanning forest weights (Kruskal) that are at most
/// `eps_max`, sorted.
pub fn kruskal_weights(cloud: &PointCloud, eps_max: f64) -> Vec<f64> {
    let n = cloud.len();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let d: f64 = cloud
                .point(i)
                .iter()
                .zip(cloud.point(j))
                .map(|(a, b)| (a - b).powi(2))
                .sum::<f64>()
                .sqrt();
            if d <= eps_max {
                edges.push((d, i, j));
            }
        }
    }
    edges.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut label: Vec<usize> = (0..n).collect();
    let mut out = Vec::new();
    for (d, i, j) in edges {
        let (li, lj) = (label[i], label[j]);
        if li != lj {
            for l in label.iter_mut() {
                if *l == lj {
                    *l = li;
                }
            }
            out.push(d);
        }
    }
    out
}

/// Bottleneck distance between two finite diagrams given as `(birth, death)`
/// points, by trying every bijection of the diagonal-augmented sets.
pub fn bottleneck_exhaustive(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    #[derive(Clone, Copy)]
    enum Slot {
        Point(f64, f64),
        Diagonal(f64, f64),
    }
    let left: Vec<Slot> = a
        .iter()
        .map(|&(x, y)| Slot::Point(x, y))
        .chain(b.iter().map(|&(x, y)| Slot::Diagonal(x, y)))
        .collect();
    let right: Vec<Slot> = b
        .iter()
        .map(|&(x, y)| Slot::Point(x, y))
        .chain(a.iter().map(|&(x, y)| Slot::Diagonal(x, y)))
        .collect();
    let cost = |l: Slot, r: Slot| match (l, r) {
        (Slot::Point(x1, y1), Slot::Point(x2, y2)) => (x1 - x2).abs().max((y1 - y2).abs()),
        (Slot::Point(x, y), Slot::Diagonal(..)) | (Slot::Diagonal(..), Slot::Point(x, y)) => {
            (y - x) / 2.0
        }
        (Slot::Diagonal(..), Slot::Diagonal(..)) => 0.0,
    };
    let n = left.len();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best = f64::INFINITY;
    permute(&mut perm, 0, &mut |p| {
        let c = (0..n).map(|i| cost(left[i], right[p[i]])).fold(0.0, f64::max);
        best = best.min(c);
    });
    if n == 0 {
        0.0
    } else {
        best
    }
}

fn permute(p: &mut Vec<usize>, k: usize, visit: &mut impl FnMut(&[usize])) {
    if k == p.len() {
        visit(p);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permute(p, k + 1, visit);
        p.swap(k, i);
    }
}

/// Every `χ(t, k)` at time `t` (1-based, frames `1..=t` of `stream`), with no
/// lookback limit, computed directly from the window definitions.
pub fn brute_chis(stream: &[Vec<f64>], t: usize, w: usize, sigma: &[f64]) -> Vec<(usize, f64)> {
    let mean = |end: usize| -> Vec<f64> {
        // frames end-w+1 ..= end, 1-based
        (0..sigma.len())
            .map(|m| {
                let mut s = 0.0;
                for f in end - w + 1..=end {
                    s += stream[f - 1][m];
                }
                s / w as f64
            })
            .collect()
    };
    let mut out = Vec::new();
    if t < 4 * w {
        return out;
    }
    for k in 2 * w..=t - 2 * w {
        let (o, o2, x, x2) = (mean(k - w), mean(k), mean(k + w), mean(k + 2 * w));
        let mut c = 0.0;
        for m in 0..sigma.len() {
            c += sigma[m] * (o[m] - x[m]) * (o2[m] - x2[m]);
        }
        out.push((k, c));
    }
    out
}

/// Maximum of [`brute_chis`] with the earliest maximizing `k`.
pub fn brute_max(stream: &[Vec<f64>], t: usize, w: usize, sigma: &[f64]) -> Option<(f64, usize)> {
    let mut best: Option<(f64, usize)> = None;
    for (k, c) in brute_chis(stream, t, w, sigma) {
        if best.is_none_or(|(b, _)| c > b) {
            best = Some((c, k));
        }
    }
    best
}

/// Persistence-weighted quantile breakpoints by plain cumulative sums over
/// the pooled `(birth, persistence)` points: for each `m`, the smallest
/// distinct birth whose strictly-earlier mass reaches `m/M` of the total.
pub fn quantile_breakpoints(points: &[(f64, f64)], bins: usize) -> Vec<f64> {
    let mut births: Vec<f64> = points.iter().map(|p| p.0).collect();
    births.sort_by(|a, b| a.partial_cmp(b).unwrap());
    births.dedup();
    let total: f64 = points.iter().map(|p| p.1).sum();
    (1..bins)
        .map(|m| {
            let target = total * m as f64 / bins as f64;
            births
                .iter()
                .copied()
                .find(|&b| {
                    let below: f64 = points.iter().filter(|p| p.0 < b).map(|p| p.1).sum();
                    below >= target
                })
                .unwrap_or(*births.last().unwrap())
        })
        .collect()
}

pub fn random_distribution(rng: &mut StreamRng, bins: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..bins).map(|_| rng.uniform() + 1e-3).collect();
    let s: f64 = raw.iter().sum();
    raw.iter().map(|x| x / s).collect()
}
