//! Domain types shared by every stage of the pipeline.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

/// A finite set of points in `d`-dimensional Euclidean space.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    dim: usize,
    coords: Vec<f64>,
}

impl PointCloud {
    /// Builds a cloud from rows of coordinates. Every row must have the same
    /// length and every coordinate must be finite.
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self> {
        let dim = points.first().map_or(0, Vec::len);
        if points.is_empty() || dim == 0 {
            return Err(Error::EmptyInput);
        }
        let mut coords = Vec::with_capacity(points.len() * dim);
        for (i, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::Shape(format!(
                    "point {i} has {} coordinates, expected {dim}",
                    p.len()
                )));
            }
            for (axis, &x) in p.iter().enumerate() {
                if !x.is_finite() {
                    return Err(Error::InvalidCoordinate { point: i, axis });
                }
            }
            coords.extend_from_slice(p);
        }
        Ok(Self { dim, coords })
    }

    /// Builds a cloud from a flat row-major coordinate buffer.
    pub fn from_flat(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 || coords.is_empty() {
            return Err(Error::EmptyInput);
        }
        if !coords.len().is_multiple_of(dim) {
            return Err(Error::Shape(format!(
                "{} coordinates is not a multiple of dimension {dim}",
                coords.len()
            )));
        }
        if let Some(i) = coords.iter().position(|x| !x.is_finite()) {
            return Err(Error::InvalidCoordinate {
                point: i / dim,
                axis: i % dim,
            });
        }
        Ok(Self { dim, coords })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.dim)
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.point(i)
            .iter()
            .zip(self.point(j))
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    /// Largest pairwise distance; a convenient `eps_max` for an untruncated
    /// Rips filtration.
    pub fn diameter(&self) -> f64 {
        let n = self.len();
        let mut best = 0.0f64;
        for i in 0..n {
            for j in i + 1..n {
                best = best.max(self.distance(i, j));
            }
        }
        best
    }
}

/// A row-major grid of intensities, e.g. one grayscale image.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarGrid {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
}

impl ScalarGrid {
    pub fn new(rows: usize, cols: usize, values: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyInput);
        }
        if values.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{} values for a {rows}x{cols} grid",
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidValue(i));
        }
        Ok(Self { rows, cols, values })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.values[r * self.cols + c]
    }

    /// Applies `f` to every value, keeping the shape.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(self.rows, self.cols, self.values.iter().map(|&v| f(v)).collect())
    }
}

/// A vertex, edge or triangle together with the scale at which it enters the
/// filtration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Simplex {
    verts: [u32; 3],
    dim: u8,
    value: f64,
}

impl Simplex {
    /// Checked constructor: 1 to 3 strictly increasing vertex ids and a finite
    /// filtration value.
    pub fn new(vertices: &[u32], value: f64) -> Result<Self> {
        if vertices.is_empty() || vertices.len() > 3 {
            return Err(Error::InvalidParameter(format!(
                "simplex with {} vertices",
                vertices.len()
            )));
        }
        if vertices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter(format!(
                "simplex vertices {vertices:?} are not strictly increasing"
            )));
        }
        if !value.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "simplex {vertices:?} has non-finite value"
            )));
        }
        let mut verts = [0; 3];
        verts[..vertices.len()].copy_from_slice(vertices);
        Ok(Self {
            verts,
            dim: (vertices.len() - 1) as u8,
            value,
        })
    }

    pub(crate) fn vertex(v: u32, value: f64) -> Self {
        Self {
            verts: [v, 0, 0],
            dim: 0,
            value,
        }
    }

    /// `a < b` is required.
    pub(crate) fn edge(a: u32, b: u32, value: f64) -> Self {
        debug_assert!(a < b);
        Self {
            verts: [a, b, 0],
            dim: 1,
            value,
        }
    }

    /// `a < b < c` is required.
    pub(crate) fn triangle(a: u32, b: u32, c: u32, value: f64) -> Self {
        debug_assert!(a < b && b < c);
        Self {
            verts: [a, b, c],
            dim: 2,
            value,
        }
    }

    pub fn vertices(&self) -> &[u32] {
        &self.verts[..self.dim as usize + 1]
    }

    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    /// A key whose integer order is the filtration order:
    /// `value (64 bits) | dim (2) | three vertex ids (20 each)`.
    fn packed_key(&self) -> u128 {
        let bits = self.value.to_bits();
        let ordered = if bits >> 63 == 1 { !bits } else { bits | 1 << 63 };
        let [a, b, c] = self.verts.map(u128::from);
        let w = PACKED_VERTEX_BITS;
        (u128::from(ordered) << (2 + 3 * w)) | (u128::from(self.dim) << (3 * w)) | (a << (2 * w)) | (b << w) | c
    }

    fn from_packed_key(key: u128) -> Self {
        let w = PACKED_VERTEX_BITS;
        let mask = (1u128 << w) - 1;
        let ordered = (key >> (2 + 3 * w)) as u64;
        let bits = if ordered >> 63 == 1 { ordered & !(1 << 63) } else { !ordered };
        Self {
            verts: [(key >> (2 * w)) & mask, (key >> w) & mask, key & mask].map(|v| v as u32),
            dim: ((key >> (3 * w)) & 3) as u8,
            value: f64::from_bits(bits),
        }
    }

    /// The filtration order: value, then dimension, then vertex tuple.
    pub fn filtration_cmp(&self, other: &Self) -> Ordering {
        self.value
            .total_cmp(&other.value)
            .then(self.dim.cmp(&other.dim))
            .then_with(|| self.vertices().cmp(other.vertices()))
    }
}

/// First invariant a [`FilteredComplex`] fails, reported by
/// [`FilteredComplex::validate`].
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    FaceClosure { simplex: Vec<u32>, missing: Vec<u32> },
    Monotonicity { simplex: Vec<u32>, face: Vec<u32> },
    SortOrder { position: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::FaceClosure { simplex, missing } => {
                write!(f, "face closure: {simplex:?} is missing face {missing:?}")
            }
            Self::Monotonicity { simplex, face } => {
                write!(f, "monotonicity: face {face:?} enters after {simplex:?}")
            }
            Self::SortOrder { position } => {
                write!(f, "sort order: simplex {position} is out of order")
            }
        }
    }
}

/// Simplices listed in filtration order. Every prefix is a subcomplex.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FilteredComplex {
    simplices: Vec<Simplex>,
}

/// Face lookup built while validating; shared with the reduction.
pub(crate) struct ComplexIndex {
    /// Position of each face in the simplex list. Unused slots are zero.
    pub faces: Vec<[u32; 3]>,
    /// Largest vertex id plus one.
    pub vertex_slots: usize,
}

const PACKED_VERTEX_BITS: u32 = 20;

/// Edge positions grouped by lower endpoint, each group sorted by the upper
/// endpoint.
struct EdgeLookup {
    start: Vec<u32>,
    entries: Vec<(u32, u32)>,
}

impl EdgeLookup {
    fn new(simplices: &[Simplex]) -> Self {
        let edges = || simplices.iter().enumerate().filter(|(_, s)| s.dim == 1);
        let slots = edges().map(|(_, s)| s.verts[0] as usize + 1).max().unwrap_or(0);
        let mut start = vec![0u32; slots + 1];
        for (_, s) in edges() {
            start[s.verts[0] as usize + 1] += 1;
        }
        for i in 0..slots {
            start[i + 1] += start[i];
        }
        let mut fill = start.clone();
        let mut entries = vec![(0, 0); start[slots] as usize];
        for (i, s) in edges() {
            let slot = &mut fill[s.verts[0] as usize];
            entries[*slot as usize] = (s.verts[1], i as u32);
            *slot += 1;
        }
        for a in 0..slots {
            entries[start[a] as usize..start[a + 1] as usize].sort_unstable();
        }
        Self { start, entries }
    }

    fn find(&self, a: u32, b: u32) -> Option<u32> {
        let a = a as usize;
        if a + 1 >= self.start.len() {
            return None;
        }
        let group = &self.entries[self.start[a] as usize..self.start[a + 1] as usize];
        group
            .binary_search_by_key(&b, |&(v, _)| v)
            .ok()
            .map(|k| group[k].1)
    }
}

impl FilteredComplex {
    /// Sorts `simplices` into filtration order. No other checks are made; use
    /// [`validate`](Self::validate) for that.
    pub fn from_simplices(mut simplices: Vec<Simplex>) -> Self {
        if simplices.iter().all(|s| s.verts.iter().all(|&v| v < 1 << PACKED_VERTEX_BITS)) {
            let mut keys: Vec<u128> = simplices.iter().map(Simplex::packed_key).collect();
            keys.sort_unstable();
            simplices.clear();
            simplices.extend(keys.into_iter().map(Simplex::from_packed_key));
        } else {
            simplices.sort_unstable_by(Simplex::filtration_cmp);
        }
        Self { simplices }
    }

    /// Wraps a list without re-sorting it.
    pub fn from_sorted(simplices: Vec<Simplex>) -> Self {
        Self { simplices }
    }

    pub fn simplices(&self) -> &[Simplex] {
        &self.simplices
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    /// Number of simplices of each dimension `[vertices, edges, triangles]`.
    pub fn counts(&self) -> [usize; 3] {
        let mut c = [0; 3];
        for s in &self.simplices {
            c[s.dim()] += 1;
        }
        c
    }

    pub fn max_value(&self) -> Option<f64> {
        self.simplices.last().map(Simplex::value)
    }

    pub fn validate(&self) -> std::result::Result<(), Violation> {
        self.index().map(|_| ())
    }

    pub(crate) fn index(&self) -> std::result::Result<ComplexIndex, Violation> {
        let simplices = &self.simplices;
        let vertex_slots = simplices
            .iter()
            .filter(|s| s.dim == 0)
            .map(|s| s.verts[0] as usize + 1)
            .max()
            .unwrap_or(0);
        let mut vertex_pos = vec![u32::MAX; vertex_slots];
        for (i, s) in simplices.iter().enumerate() {
            if s.dim == 0 {
                vertex_pos[s.verts[0] as usize] = i as u32;
            }
        }
        let edges = EdgeLookup::new(simplices);

        let mut faces = vec![[0u32; 3]; simplices.len()];
        let mut monotonicity: Option<Violation> = None;
        for (i, s) in simplices.iter().enumerate() {
            let [a, b, c] = s.verts;
            let found: [Option<u32>; 3] = match s.dim {
                0 => continue,
                1 => [
                    vertex_pos.get(a as usize).copied().filter(|&p| p != u32::MAX),
                    vertex_pos.get(b as usize).copied().filter(|&p| p != u32::MAX),
                    None,
                ],
                _ => [
                    edges.find(b, c),
                    edges.find(a, c),
                    edges.find(a, b),
                ],
            };
            let nfaces = s.dim as usize + 1;
            for (k, pos) in found.iter().take(nfaces).enumerate() {
                let Some(pos) = *pos else {
                    let mut missing = s.vertices().to_vec();
                    missing.remove(if s.dim == 1 { 1 - k } else { k });
                    return Err(Violation::FaceClosure {
                        simplex: s.vertices().to_vec(),
                        missing,
                    });
                };
                faces[i][k] = pos;
                if monotonicity.is_none() && simplices[pos as usize].value > s.value {
                    monotonicity = Some(Violation::Monotonicity {
                        simplex: s.vertices().to_vec(),
                        face: simplices[pos as usize].vertices().to_vec(),
                    });
                }
            }
        }
        if let Some(v) = monotonicity {
            return Err(v);
        }
        if let Some(w) = simplices
            .windows(2)
            .position(|w| w[0].filtration_cmp(&w[1]) != Ordering::Less)
        {
            return Err(Violation::SortOrder { position: w + 1 });
        }
        Ok(ComplexIndex {
            faces,
            vertex_slots,
        })
    }
}

/// One finite bar in tilted coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PersistencePair {
    pub dim: u8,
    pub birth: f64,
    pub persistence: f64,
}

impl PersistencePair {
    pub fn death(&self) -> f64 {
        self.birth + self.persistence
    }
}

/// Finite bars in tilted `(birth, persistence)` form plus the births of
/// essential classes, for homology dimensions 0 and 1.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PersistenceDiagram {
    pub frame_index: usize,
    pub pairs: Vec<PersistencePair>,
    pub infinite_births: [Vec<f64>; 2],
    /// Which of H0 and H1 were computed.
    pub computed: [bool; 2],
    /// Largest filtration value of the source complex.
    pub max_value: f64,
}

impl PersistenceDiagram {
    pub fn finite(&self, dim: usize) -> impl Iterator<Item = &PersistencePair> {
        self.pairs.iter().filter(move |p| p.dim as usize == dim)
    }

    pub fn infinite(&self, dim: usize) -> &[f64] {
        &self.infinite_births[dim]
    }

    pub fn has_dim(&self, dim: usize) -> bool {
        self.computed.get(dim).copied().unwrap_or(false)
    }

    pub fn total_persistence(&self, dim: usize) -> f64 {
        self.finite(dim).map(|p| p.persistence).sum()
    }
}
