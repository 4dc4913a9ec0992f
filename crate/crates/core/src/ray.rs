//! Voxel ray traversal over a [`GridLattice`].
//!
//! [`ray_traverse`] walks the cells a world-space segment passes through in
//! order, stepping one face at a time (the classic incremental voxel walk):
//! per axis it tracks the segment parameter of the next face crossing and
//! always advances across the nearest face. The cell list therefore never
//! contains duplicates and consecutive entries always share a face, even when
//! the segment passes arbitrarily close to an edge or corner.
//!
//! Face ownership matches [`GridLattice::world_to_cell`]: along each axis a
//! cell owns the half-open interval (center − res/2, center + res/2], so a segment
//! *ending* exactly on a face stops in the lower cell while one *crossing*
//! downward through the same face enters it.

use crate::error::{Error, Result};
use crate::grid::GridLattice;

/// Ordered list of the cells a segment passes through, from the cell
/// containing `origin` to the cell containing `endpoint`, clipped at the
/// lattice bounds.
///
/// The origin must lie inside the lattice; the endpoint may lie anywhere
/// (the walk stops at the last in-bounds cell). A zero-length segment yields
/// exactly the origin cell.
pub fn ray_traverse(
    lattice: &GridLattice,
    origin: &[f64],
    endpoint: &[f64],
) -> Result<Vec<usize>> {
    let nd = lattice.ndims();
    assert_eq!(origin.len(), nd, "origin has wrong number of axes");
    assert_eq!(endpoint.len(), nd, "endpoint has wrong number of axes");

    let Some(start) = lattice.world_to_cell(origin) else {
        let mut o = [0.0f64; 3];
        o[..nd].copy_from_slice(origin);
        return Err(Error::OriginOutsideLattice { origin: o });
    };

    let res = lattice.resolution();
    let mut dir = [0.0f64; 3];
    for a in 0..nd {
        dir[a] = endpoint[a] - origin[a];
    }

    // Parameter (0 = origin, 1 = endpoint) at which the segment leaves the
    // lattice box, if it does before reaching the endpoint.
    let mut s_exit = 1.0f64;
    for a in 0..nd {
        let t = if dir[a] > 0.0 {
            (lattice.upper_bound(a) - origin[a]) / dir[a]
        } else if dir[a] < 0.0 {
            (lattice.lower_bound(a) - origin[a]) / dir[a]
        } else {
            f64::INFINITY
        };
        s_exit = s_exit.min(t);
    }

    let mut coords = lattice.cell_coords(start);
    let mut cells = vec![start];
    loop {
        // Nearest upcoming face crossing across all moving axes. Recomputing
        // from the face coordinate (instead of accumulating increments) keeps
        // every crossing parameter exact to one rounding, so long walks
        // cannot drift relative to `world_to_cell`.
        let mut axis = usize::MAX;
        let mut s_face = f64::INFINITY;
        for a in 0..nd {
            if dir[a] == 0.0 {
                continue;
            }
            let half = if dir[a] > 0.0 { 0.5 } else { -0.5 };
            let face = lattice.origin()[a] + (coords[a] as f64 + half) * res;
            let s = (face - origin[a]) / dir[a];
            if s < s_face {
                s_face = s;
                axis = a;
            }
        }
        if axis == usize::MAX {
            break; // zero direction: the segment never leaves the start cell
        }
        // A face point belongs to the lower cell, so a segment ending exactly
        // on a face enters the next cell only when stepping downward.
        let crosses = if dir[axis] > 0.0 { s_face < s_exit } else { s_face <= s_exit };
        if !crosses {
            break;
        }
        if dir[axis] > 0.0 {
            if coords[axis] + 1 >= lattice.dims()[axis] {
                break;
            }
            coords[axis] += 1;
        } else {
            if coords[axis] == 0 {
                break;
            }
            coords[axis] -= 1;
        }
        cells.push(lattice.index_from_coords(&coords[..nd]));
    }
    Ok(cells)
}
