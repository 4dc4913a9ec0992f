//! The latent-field state: mean vector plus covariance, over two backends.
//!
//! The filter's covariance work is only ever one of three access patterns —
//! read a diagonal entry, stream a column, subtract a symmetric rank-one
//! term — so the backend is a small enum rather than a trait. [`Cov::Dense`]
//! stores the full N×N matrix and is the reference path (and the only one the
//! EP solver accepts). [`Cov::Sparse`] keeps, per cell, only the entries whose
//! cell-center distance is within a cutoff; rank-one updates drop any fill-in
//! outside that fixed pattern by construction, which is what keeps 3-D maps
//! with hundreds of thousands of cells tractable.
//!
//! Both backends write rank-one updates with an association order that makes
//! entry (i, j) and entry (j, i) bitwise-identical expressions, so the matrix
//! stays exactly symmetric without a separate symmetrization pass.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::grid::GridLattice;

/// Diagonal entries are clamped up to this value after every update.
///
/// The rank-one covariance correction can push a variance a few ulps negative
/// when a cell is measured many times; the floor keeps the state usable as a
/// Gaussian covariance without visibly altering results.
pub const VARIANCE_FLOOR: f64 = 1e-12;

/// Refuse dense priors above this cell count (≈ 200 MB of f64).
pub const DENSE_CELL_LIMIT: usize = 5000;

/// Symmetric covariance storage.
#[derive(Debug, Clone, PartialEq)]
pub enum Cov {
    Dense(DMatrix<f64>),
    Sparse(SparseCov),
}

/// Truncated symmetric matrix: per cell, a sorted list of neighbor indices
/// (always including the cell itself) and the matching values. Both triangles
/// are stored so column reads are contiguous per cell.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseCov {
    pattern: Vec<Vec<u32>>,
    values: Vec<Vec<f64>>,
}

impl SparseCov {
    /// Builds from per-cell neighbor lists; each list must be sorted, contain
    /// the cell itself, and be symmetric (j lists i whenever i lists j).
    pub(crate) fn new(pattern: Vec<Vec<u32>>, values: Vec<Vec<f64>>) -> Self {
        debug_assert_eq!(pattern.len(), values.len());
        debug_assert!(pattern
            .iter()
            .enumerate()
            .all(|(i, p)| p.binary_search(&(i as u32)).is_ok()));
        SparseCov { pattern, values }
    }

    pub fn n(&self) -> usize {
        self.pattern.len()
    }

    /// Number of stored entries (both triangles).
    pub fn nnz(&self) -> usize {
        self.pattern.iter().map(Vec::len).sum()
    }

    fn slot(&self, row: usize, col: u32) -> Option<usize> {
        self.pattern[row].binary_search(&col).ok()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        match self.slot(i, j as u32) {
            Some(s) => self.values[i][s],
            None => 0.0,
        }
    }

    pub(crate) fn pattern(&self) -> &[Vec<u32>] {
        &self.pattern
    }

    pub(crate) fn values(&self) -> &[Vec<f64>] {
        &self.values
    }
}

impl Cov {
    pub fn n(&self) -> usize {
        match self {
            Cov::Dense(m) => m.nrows(),
            Cov::Sparse(s) => s.n(),
        }
    }

    pub fn diag(&self, i: usize) -> f64 {
        match self {
            Cov::Dense(m) => m[(i, i)],
            Cov::Sparse(s) => s.get(i, i),
        }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        match self {
            Cov::Dense(m) => m[(i, j)],
            Cov::Sparse(s) => s.get(i, j),
        }
    }

    /// Calls `f(j, Σ_ji)` for every structurally stored entry of column `i`.
    pub fn for_each_in_column(&self, i: usize, mut f: impl FnMut(usize, f64)) {
        match self {
            Cov::Dense(m) => {
                for (j, v) in m.column(i).iter().enumerate() {
                    f(j, *v);
                }
            }
            Cov::Sparse(s) => {
                for (slot, &j) in s.pattern[i].iter().enumerate() {
                    f(j as usize, s.values[i][slot]);
                }
            }
        }
    }

    /// Applies Σ ← Σ − coeff · Σvᵢ (Σvᵢ)ᵀ, where Σvᵢ is the current column
    /// `i`, then floors the affected diagonal. Returns how many diagonal
    /// entries were clamped.
    ///
    /// `coeff` may be negative (the EP refresh can weaken a site), in which
    /// case the term is added. On the sparse backend any fill-in outside the
    /// fixed pattern is dropped.
    pub fn rank1_col_update(&mut self, i: usize, coeff: f64) -> usize {
        let mut clamped = 0;
        match self {
            Cov::Dense(m) => {
                let n = m.nrows();
                let col: Vec<f64> = m.column(i).iter().copied().collect();
                let data = m.as_mut_slice();
                for c in 0..n {
                    let vc = col[c];
                    if vc == 0.0 {
                        continue;
                    }
                    let seg = &mut data[c * n..(c + 1) * n];
                    for r in 0..n {
                        // association fixed so (r,c) and (c,r) round identically
                        seg[r] -= coeff * (col[r] * vc);
                    }
                }
                for d in 0..n {
                    let v = &mut data[d * n + d];
                    if *v < VARIANCE_FLOOR {
                        *v = VARIANCE_FLOOR;
                        clamped += 1;
                    }
                }
            }
            Cov::Sparse(s) => {
                let idx = s.pattern[i].clone();
                let vals = s.values[i].clone();
                for (a, &ja) in idx.iter().enumerate() {
                    let va = vals[a];
                    if va == 0.0 {
                        continue;
                    }
                    let row = ja as usize;
                    for (b, &jb) in idx.iter().enumerate() {
                        if let Some(slot) = s.pattern[row].binary_search(&jb).ok() {
                            s.values[row][slot] -= coeff * (vals[b] * va);
                        }
                    }
                    if let Some(dslot) = s.pattern[row].binary_search(&ja).ok() {
                        let v = &mut s.values[row][dslot];
                        if *v < VARIANCE_FLOOR {
                            *v = VARIANCE_FLOOR;
                            clamped += 1;
                        }
                    }
                }
            }
        }
        clamped
    }

    /// Largest |Σᵢⱼ − Σⱼᵢ| over all stored pairs; exactly 0 for matrices only
    /// ever touched through [`Cov::rank1_col_update`].
    pub fn max_abs_asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        match self {
            Cov::Dense(m) => {
                for i in 0..m.nrows() {
                    for j in (i + 1)..m.ncols() {
                        worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
                    }
                }
            }
            Cov::Sparse(s) => {
                for i in 0..s.n() {
                    for (slot, &j) in s.pattern[i].iter().enumerate() {
                        let ji = s.get(j as usize, i);
                        worst = worst.max((s.values[i][slot] - ji).abs());
                    }
                }
            }
        }
        worst
    }

    pub fn as_dense(&self) -> Option<&DMatrix<f64>> {
        match self {
            Cov::Dense(m) => Some(m),
            Cov::Sparse(_) => None,
        }
    }

    /// Materializes the full matrix (test/oracle helper; avoid on large N).
    pub fn to_dense(&self) -> DMatrix<f64> {
        match self {
            Cov::Dense(m) => m.clone(),
            Cov::Sparse(s) => {
                let n = s.n();
                let mut m = DMatrix::zeros(n, n);
                for i in 0..n {
                    for (slot, &j) in s.pattern[i].iter().enumerate() {
                        m[(i, j as usize)] = s.values[i][slot];
                    }
                }
                m
            }
        }
    }
}

/// The filter state: latent mean and covariance over one lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct LatentMap {
    lattice: GridLattice,
    mean: DVector<f64>,
    cov: Cov,
}

impl LatentMap {
    /// Assembles a map from explicit parts, checking that the shapes agree.
    pub fn from_parts(lattice: GridLattice, mean: DVector<f64>, cov: Cov) -> Result<Self> {
        let n = lattice.n_cells();
        if mean.len() != n {
            return Err(Error::LengthMismatch { left: mean.len(), right: n });
        }
        if cov.n() != n {
            return Err(Error::LengthMismatch { left: cov.n(), right: n });
        }
        Ok(LatentMap { lattice, mean, cov })
    }

    pub fn lattice(&self) -> &GridLattice {
        &self.lattice
    }

    pub fn n_cells(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn cov(&self) -> &Cov {
        &self.cov
    }

    /// Marginal variance of one cell.
    pub fn variance(&self, i: usize) -> f64 {
        self.cov.diag(i)
    }

    pub(crate) fn parts_mut(&mut self) -> (&mut DVector<f64>, &mut Cov) {
        (&mut self.mean, &mut self.cov)
    }
}
