//! Lower-star (sublevel set) filtration of a scalar grid.
//!
//! Pixels are vertices with id `row * cols + col`. Each unit square is split
//! along its top-left to bottom-right diagonal, so the grid is covered by
//! horizontal, vertical and diagonal edges and two triangles per square. A
//! simplex enters at the largest value among its vertices, which makes every
//! sublevel set `{f <= eps}` a prefix of the sorted simplex list.

use crate::error::Result;
use crate::types::{FilteredComplex, ScalarGrid, Simplex};

pub fn build_lower_star(grid: &ScalarGrid) -> Result<FilteredComplex> {
    let (rows, cols) = (grid.rows(), grid.cols());
    let f = grid.values();
    let id = |r: usize, c: usize| (r * cols + c) as u32;
    let val = |r: usize, c: usize| f[r * cols + c];

    let squares = rows.saturating_sub(1) * cols.saturating_sub(1);
    let n_edges = rows * cols.saturating_sub(1) + cols * rows.saturating_sub(1) + squares;
    let mut simplices = Vec::with_capacity(rows * cols + n_edges + 2 * squares);

    for r in 0..rows {
        for c in 0..cols {
            let v = val(r, c);
            simplices.push(Simplex::vertex(id(r, c), v));
            if c + 1 < cols {
                simplices.push(Simplex::edge(id(r, c), id(r, c + 1), v.max(val(r, c + 1))));
            }
            if r + 1 < rows {
                simplices.push(Simplex::edge(id(r, c), id(r + 1, c), v.max(val(r + 1, c))));
            }
            if r + 1 < rows && c + 1 < cols {
                let right = val(r, c + 1);
                let below = val(r + 1, c);
                let diag = val(r + 1, c + 1);
                let d = v.max(diag);
                simplices.push(Simplex::edge(id(r, c), id(r + 1, c + 1), d));
                simplices.push(Simplex::triangle(
                    id(r, c),
                    id(r, c + 1),
                    id(r + 1, c + 1),
                    d.max(right),
                ));
                simplices.push(Simplex::triangle(
                    id(r, c),
                    id(r + 1, c),
                    id(r + 1, c + 1),
                    d.max(below),
                ));
            }
        }
    }

    Ok(FilteredComplex::from_simplices(simplices))
}
