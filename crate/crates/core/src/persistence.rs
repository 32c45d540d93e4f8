//! Persistent homology in dimensions 0 and 1 over Z/2.
//!
//! Dimension 0 is computed with a union-find pass over the edges (elder rule).
//! Dimension 1 reduces the triangle boundary columns left to right. Rows of
//! edges that already merged two components can never be pivots of a triangle
//! column, so they are removed from every column before reduction. Edges that
//! end up as pivots are thereby paired with a triangle and never need a column
//! of their own.

use crate::error::{Error, Result};
use crate::types::{FilteredComplex, PersistenceDiagram, PersistencePair};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Dimensions {
    H0,
    H1,
    #[default]
    Both,
}

impl Dimensions {
    pub fn includes(self, dim: usize) -> bool {
        matches!(
            (self, dim),
            (Self::H0, 0) | (Self::H1, 1) | (Self::Both, 0) | (Self::Both, 1)
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReductionOptions {
    pub dims: Dimensions,
    pub drop_zero_persistence: bool,
}

impl Default for ReductionOptions {
    fn default() -> Self {
        Self {
            dims: Dimensions::Both,
            drop_zero_persistence: true,
        }
    }
}

/// Birth/death pairing by simplex position in the filtration, including
/// zero-persistence pairs.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Pairing {
    /// `(dim, birth position, death position)`
    pub pairs: Vec<(u8, u32, u32)>,
    /// `(dim, birth position)` of classes that never die.
    pub essential: Vec<(u8, u32)>,
}

struct UnionFind {
    parent: Vec<u32>,
    size: Vec<u32>,
    /// Filtration position of the oldest vertex in each root's component.
    birth: Vec<u32>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n as u32).collect(),
            size: vec![1; n],
            birth: vec![u32::MAX; n],
        }
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let grand = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = grand;
            x = grand;
        }
        x
    }

    /// Merges the components of `a` and `b`; returns the birth position of the
    /// younger one, or `None` if they were already joined.
    fn union(&mut self, a: u32, b: u32) -> Option<u32> {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return None;
        }
        let (ba, bb) = (self.birth[ra as usize], self.birth[rb as usize]);
        let (big, small) = if self.size[ra as usize] >= self.size[rb as usize] {
            (ra, rb)
        } else {
            (rb, ra)
        };
        self.parent[small as usize] = big;
        self.size[big as usize] += self.size[small as usize];
        self.birth[big as usize] = ba.min(bb);
        Some(ba.max(bb))
    }
}

/// Computes the pairing of `complex` for the requested dimensions. The
/// union-find pass always runs because dimension 1 relies on it.
pub fn pairing(complex: &FilteredComplex, dims: Dimensions) -> Result<Pairing> {
    let index = complex.index().map_err(Error::InvalidFiltration)?;
    let simplices = complex.simplices();
    let mut out = Pairing::default();

    let mut uf = UnionFind::new(index.vertex_slots);
    let mut negative = vec![false; simplices.len()];
    for (pos, s) in simplices.iter().enumerate() {
        match s.dim() {
            0 => uf.birth[s.vertices()[0] as usize] = pos as u32,
            1 => {
                let v = s.vertices();
                if let Some(born) = uf.union(v[0], v[1]) {
                    negative[pos] = true;
                    if dims.includes(0) {
                        out.pairs.push((0, born, pos as u32));
                    }
                }
            }
            _ => {}
        }
    }
    if dims.includes(0) {
        for s in simplices.iter().filter(|s| s.dim() == 0) {
            let v = s.vertices()[0];
            if uf.find(v) == v {
                out.essential.push((0, uf.birth[v as usize]));
            }
        }
        out.essential.sort_unstable();
    }

    if dims.includes(1) {
        let pivot_owner = reduce_triangles(complex, &index.faces, &negative, &mut out.pairs);
        for (pos, s) in simplices.iter().enumerate() {
            if s.dim() == 1 && !negative[pos] && pivot_owner[pos] == u32::MAX {
                out.essential.push((1, pos as u32));
            }
        }
    }
    Ok(out)
}

/// Column reduction of the triangle boundaries. Returns, for every simplex
/// position, the triangle whose reduced column has it as pivot.
fn reduce_triangles(
    complex: &FilteredComplex,
    faces: &[[u32; 3]],
    negative: &[bool],
    pairs: &mut Vec<(u8, u32, u32)>,
) -> Vec<u32> {
    let simplices = complex.simplices();
    let mut pivot_owner = vec![u32::MAX; simplices.len()];
    // reduced columns, looked up through the triangle position
    let mut reduced: Vec<Vec<u32>> = Vec::new();
    let mut slot = vec![u32::MAX; simplices.len()];
    let mut col: Vec<u32> = Vec::with_capacity(16);
    let mut scratch: Vec<u32> = Vec::with_capacity(16);

    for (pos, s) in simplices.iter().enumerate() {
        if s.dim() != 2 {
            continue;
        }
        col.clear();
        col.extend(faces[pos].iter().copied().filter(|&e| !negative[e as usize]));
        col.sort_unstable();

        while let Some(&pivot) = col.last() {
            let owner = pivot_owner[pivot as usize];
            if owner == u32::MAX {
                break;
            }
            symmetric_difference(&col, &reduced[slot[owner as usize] as usize], &mut scratch);
            std::mem::swap(&mut col, &mut scratch);
        }

        if let Some(&pivot) = col.last() {
            pivot_owner[pivot as usize] = pos as u32;
            slot[pos] = reduced.len() as u32;
            reduced.push(col.clone());
            pairs.push((1, pivot, pos as u32));
        }
    }
    pivot_owner
}

fn symmetric_difference(a: &[u32], b: &[u32], out: &mut Vec<u32>) {
    out.clear();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
}

/// Persistence diagram of `complex` in tilted coordinates.
pub fn compute_persistence(
    complex: &FilteredComplex,
    opts: &ReductionOptions,
) -> Result<PersistenceDiagram> {
    let pairing = pairing(complex, opts.dims)?;
    Ok(to_diagram(complex, &pairing, opts))
}

/// Dimension-0 diagram only. Agrees with [`compute_persistence`] restricted to
/// dimension 0 but skips the triangle reduction.
pub fn h0_union_find(
    complex: &FilteredComplex,
    drop_zero_persistence: bool,
) -> Result<PersistenceDiagram> {
    compute_persistence(
        complex,
        &ReductionOptions {
            dims: Dimensions::H0,
            drop_zero_persistence,
        },
    )
}

fn to_diagram(
    complex: &FilteredComplex,
    pairing: &Pairing,
    opts: &ReductionOptions,
) -> PersistenceDiagram {
    let value = |pos: u32| complex.simplices()[pos as usize].value();
    let mut diagram = PersistenceDiagram {
        computed: [opts.dims.includes(0), opts.dims.includes(1)],
        max_value: complex.max_value().unwrap_or(0.0),
        ..Default::default()
    };
    for &(dim, b, d) in &pairing.pairs {
        let birth = value(b);
        let persistence = value(d) - birth;
        if opts.drop_zero_persistence && persistence == 0.0 {
            continue;
        }
        diagram.pairs.push(PersistencePair {
            dim,
            birth,
            persistence,
        });
    }
    for &(dim, b) in &pairing.essential {
        diagram.infinite_births[dim as usize].push(value(b));
    }
    diagram
}
