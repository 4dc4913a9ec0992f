//! Lattice geometry, occupancy labels, and ternary classification.
//!
//! A [`GridLattice`] is a 1-, 2- or 3-axis tessellation described by per-axis
//! cell counts, one scalar resolution (cell edge length), and the world
//! coordinate of the *center* of cell (0, …, 0). Cells are addressed either by
//! per-axis coordinates or by a linear index in row-major order over the axes
//! as declared (first axis slowest, last axis fastest).

use crate::error::{Error, Result};
use crate::map::LatentMap;
use crate::stats::std_normal_cdf;

/// Regular grid over 1–3 axes.
#[derive(Debug, Clone, PartialEq)]
pub struct GridLattice {
    ndims: usize,
    dims: [usize; 3],
    resolution: f64,
    origin: [f64; 3],
}

impl GridLattice {
    /// Builds a lattice from per-axis cell counts, a cell edge length, and the
    /// world position of cell (0, …, 0)'s center.
    pub fn new(dims: &[usize], resolution: f64, origin: &[f64]) -> Result<Self> {
        if dims.is_empty() || dims.len() > 3 {
            return Err(Error::BadLattice {
                reason: format!("need 1-3 axes, got {}", dims.len()),
            });
        }
        if origin.len() != dims.len() {
            return Err(Error::BadLattice {
                reason: format!("{} dims but {} origin axes", dims.len(), origin.len()),
            });
        }
        if dims.iter().any(|&d| d == 0) {
            return Err(Error::BadLattice {
                reason: "every axis needs at least one cell".into(),
            });
        }
        if !(resolution > 0.0) || !resolution.is_finite() {
            return Err(Error::BadLattice {
                reason: format!("resolution must be positive and finite, got {resolution}"),
            });
        }
        if origin.iter().any(|o| !o.is_finite()) {
            return Err(Error::BadLattice {
                reason: "origin must be finite".into(),
            });
        }
        let mut d = [1usize; 3];
        let mut o = [0.0f64; 3];
        d[..dims.len()].copy_from_slice(dims);
        o[..origin.len()].copy_from_slice(origin);
        Ok(GridLattice {
            ndims: dims.len(),
            dims: d,
            resolution,
            origin: o,
        })
    }

    pub fn ndims(&self) -> usize {
        self.ndims
    }

    /// Per-axis cell counts (length = `ndims`).
    pub fn dims(&self) -> &[usize] {
        &self.dims[..self.ndims]
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    /// World position of cell (0, …, 0)'s center (length = `ndims`).
    pub fn origin(&self) -> &[f64] {
        &self.origin[..self.ndims]
    }

    /// Total number of cells N.
    pub fn n_cells(&self) -> usize {
        self.dims[..self.ndims].iter().product()
    }

    /// Linear index for per-axis coordinates (row-major, first axis slowest).
    pub fn index_from_coords(&self, coords: &[usize]) -> usize {
        debug_assert_eq!(coords.len(), self.ndims);
        let mut idx = 0;
        for a in 0..self.ndims {
            debug_assert!(coords[a] < self.dims[a]);
            idx = idx * self.dims[a] + coords[a];
        }
        idx
    }

    /// Per-axis coordinates of a linear index; unused axes read 0.
    pub fn cell_coords(&self, index: usize) -> [usize; 3] {
        debug_assert!(index < self.n_cells());
        let mut coords = [0usize; 3];
        let mut rem = index;
        for a in (0..self.ndims).rev() {
            coords[a] = rem % self.dims[a];
            rem /= self.dims[a];
        }
        coords
    }

    /// World position of a cell's center; unused axes read 0.
    pub fn cell_to_world(&self, index: usize) -> [f64; 3] {
        let c = self.cell_coords(index);
        let mut p = [0.0f64; 3];
        for a in 0..self.ndims {
            p[a] = self.origin[a] + c[a] as f64 * self.resolution;
        }
        p
    }

    /// Cell containing a world point, or `None` outside the lattice.
    ///
    /// Along each axis a cell owns the half-open interval
    /// (center − res/2, center + res/2], so a point exactly midway between two
    /// centers resolves to the lower index, deterministically.
    pub fn world_to_cell(&self, p: &[f64]) -> Option<usize> {
        assert_eq!(p.len(), self.ndims, "point has wrong number of axes");
        let mut coords = [0usize; 3];
        for a in 0..self.ndims {
            let u = (p[a] - self.origin[a]) / self.resolution + 0.5;
            let c = u.ceil() - 1.0;
            if c < 0.0 || c >= self.dims[a] as f64 {
                return None;
            }
            coords[a] = c as usize;
        }
        Some(self.index_from_coords(&coords[..self.ndims]))
    }

    /// Lower world bound per axis (exclusive; the low face of cell 0).
    pub(crate) fn lower_bound(&self, axis: usize) -> f64 {
        self.origin[axis] - 0.5 * self.resolution
    }

    /// Upper world bound per axis (inclusive; the high face of the last cell).
    pub(crate) fn upper_bound(&self, axis: usize) -> f64 {
        self.lower_bound(axis) + self.dims[axis] as f64 * self.resolution
    }
}

/// Occupancy label carried by one measurement: the sign observation y.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Label {
    Free,
    Occupied,
}

impl Label {
    /// The label as the signed scalar y ∈ {−1, +1} used in the update math.
    pub fn sign(self) -> f64 {
        match self {
            Label::Free => -1.0,
            Label::Occupied => 1.0,
        }
    }

    pub fn from_sign(y: i8) -> Option<Label> {
        match y {
            -1 => Some(Label::Free),
            1 => Some(Label::Occupied),
            _ => None,
        }
    }
}

/// One cell observation: which cell, which sign, and when.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Measurement {
    /// Linear cell index in [0, N).
    pub cell: usize,
    pub label: Label,
    /// Step index t ≥ 0; carried through logs, not used by the update math.
    pub time: u64,
}

impl Measurement {
    pub fn new(cell: usize, label: Label, time: u64) -> Self {
        Measurement { cell, label, time }
    }
}

/// Classification thresholds on the occupancy probability Φ(m̂).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    pub r_o: f64,
    pub r_f: f64,
}

impl Thresholds {
    pub fn new(r_o: f64, r_f: f64) -> Result<Self> {
        if !(r_f < 0.5 && 0.5 < r_o && r_o < 1.0 && r_f > 0.0) {
            return Err(Error::BadThresholds { r_o, r_f });
        }
        Ok(Thresholds { r_o, r_f })
    }
}

impl Default for Thresholds {
    /// The experiment defaults: occupied above 0.65, free below 0.35.
    fn default() -> Self {
        Thresholds { r_o: 0.65, r_f: 0.35 }
    }
}

/// Per-cell ternary occupancy estimate: −1 free, 0 unknown, +1 occupied.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TernaryMap {
    pub states: Vec<i8>,
}

impl TernaryMap {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// (occupied, free, unknown) cell counts.
    pub fn counts(&self) -> (usize, usize, usize) {
        let mut occ = 0;
        let mut free = 0;
        let mut unk = 0;
        for &s in &self.states {
            match s {
                1 => occ += 1,
                -1 => free += 1,
                _ => unk += 1,
            }
        }
        (occ, free, unk)
    }

    /// Fraction of cells on which two ternary maps agree.
    pub fn agreement(&self, other: &TernaryMap) -> Result<f64> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch {
                left: self.len(),
                right: other.len(),
            });
        }
        let same = self
            .states
            .iter()
            .zip(&other.states)
            .filter(|(a, b)| a == b)
            .count();
        Ok(same as f64 / self.len() as f64)
    }
}

/// Thresholds the per-cell occupancy probability Φ(m̂ᵢ) into {−1, 0, +1}.
///
/// Deliberately a function of the mean alone: the latent variance plays no
/// role in the decision rule.
pub fn classify(map: &LatentMap, th: &Thresholds) -> TernaryMap {
    let states = map
        .mean()
        .iter()
        .map(|&m| {
            let p = std_normal_cdf(m);
            if p > th.r_o {
                1
            } else if p < th.r_f {
                -1
            } else {
                0
            }
        })
        .collect();
    TernaryMap { states }
}
