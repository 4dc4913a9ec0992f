//! Prior covariance from a normal-pdf kernel over lattice cell centers.
//!
//! The kernel is the density itself, k(x, x′) = φ(‖x − x′‖₂; 0, σ²), *not* a
//! renormalized correlation function: the prior variance of every cell is
//! k(x, x) = 1/(σ√(2π)), which is deliberately ≠ 1 — the measurement updates
//! absorb the scale. Correlation between cells still decays as
//! exp(−d²/(2σ²)) regardless of that normalization.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::grid::GridLattice;
use crate::map::{Cov, LatentMap, SparseCov, DENSE_CELL_LIMIT};
use crate::stats::FRAC_1_SQRT_2PI;

/// Kernel bandwidth and optional hard truncation radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelConfig {
    /// Kernel standard deviation, in the same units as lattice coordinates.
    pub sigma: f64,
    /// Distance beyond which correlation is treated as exactly zero;
    /// `None` means no truncation.
    pub cutoff_radius: Option<f64>,
}

impl KernelConfig {
    /// Untruncated kernel (for the dense backend).
    pub fn dense(sigma: f64) -> Result<Self> {
        Self::new(sigma, None)
    }

    /// Kernel truncated to zero beyond `cutoff_radius` (world units).
    pub fn truncated(sigma: f64, cutoff_radius: f64) -> Result<Self> {
        Self::new(sigma, Some(cutoff_radius))
    }

    pub fn new(sigma: f64, cutoff_radius: Option<f64>) -> Result<Self> {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::BadKernel {
                reason: format!("sigma must be positive and finite, got {sigma}"),
            });
        }
        if let Some(c) = cutoff_radius {
            if !(c > 0.0) || !c.is_finite() {
                return Err(Error::BadKernel {
                    reason: format!("cutoff_radius must be positive and finite, got {c}"),
                });
            }
        }
        Ok(KernelConfig { sigma, cutoff_radius })
    }

    /// The constant prior variance k(x, x) = 1/(σ√(2π)).
    pub fn prior_variance(&self) -> f64 {
        FRAC_1_SQRT_2PI / self.sigma
    }
}

/// Which covariance storage a prior is built into.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    Dense,
    Sparse,
}

/// k(x, x′) = φ(‖x − x′‖₂; 0, σ²), hard-zeroed beyond the cutoff radius.
pub fn kernel_eval(cfg: &KernelConfig, x: &[f64], x2: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), x2.len());
    let d2: f64 = x.iter().zip(x2).map(|(a, b)| (a - b) * (a - b)).sum();
    if let Some(c) = cfg.cutoff_radius {
        if d2 > c * c {
            return 0.0;
        }
    }
    FRAC_1_SQRT_2PI / cfg.sigma * (-0.5 * d2 / (cfg.sigma * cfg.sigma)).exp()
}

/// Builds the prior map: zero mean, Σ₀[i][j] = k(center_i, center_j).
///
/// The dense backend refuses lattices above [`DENSE_CELL_LIMIT`] cells. The
/// sparse backend requires a finite cutoff radius; its fixed sparsity pattern
/// (every cell pair within the cutoff) is also the set of entries any later
/// update is allowed to touch.
pub fn build_prior(lattice: &GridLattice, cfg: &KernelConfig, backend: Backend) -> Result<LatentMap> {
    let n = lattice.n_cells();
    let cov = match backend {
        Backend::Dense => {
            if n > DENSE_CELL_LIMIT {
                return Err(Error::DenseCapacityExceeded { cells: n, limit: DENSE_CELL_LIMIT });
            }
            let mut m = nalgebra::DMatrix::zeros(n, n);
            let centers: Vec<[f64; 3]> = (0..n).map(|i| lattice.cell_to_world(i)).collect();
            let nd = lattice.ndims();
            for i in 0..n {
                for j in 0..n {
                    m[(i, j)] = kernel_eval(cfg, &centers[i][..nd], &centers[j][..nd]);
                }
            }
            Cov::Dense(m)
        }
        Backend::Sparse => {
            let cutoff = cfg.cutoff_radius.ok_or_else(|| Error::BadKernel {
                reason: "sparse backend needs a finite cutoff_radius".into(),
            })?;
            Cov::Sparse(build_sparse(lattice, cfg, cutoff))
        }
    };
    LatentMap::from_parts(lattice.clone(), DVector::zeros(n), cov)
}

fn build_sparse(lattice: &GridLattice, cfg: &KernelConfig, cutoff: f64) -> SparseCov {
    let n = lattice.n_cells();
    let nd = lattice.ndims();
    let res = lattice.resolution();
    // per-axis reach of the stencil in cells
    let reach = (cutoff / res).floor() as i64;
    let cutoff2_cells = (cutoff / res) * (cutoff / res);

    // enumerate stencil offsets once, in row-major order so that per-cell
    // neighbor lists come out sorted by linear index
    let mut offsets: Vec<([i64; 3], f64)> = Vec::new();
    let axis_range = |a: usize| if a < nd { -reach..=reach } else { 0..=0 };
    for dx in axis_range(0) {
        for dy in axis_range(1) {
            for dz in axis_range(2) {
                let d2 = (dx * dx + dy * dy + dz * dz) as f64;
                if d2 <= cutoff2_cells {
                    let dist = d2.sqrt() * res;
                    offsets.push(([dx, dy, dz], dist));
                }
            }
        }
    }

    let dims = {
        let mut d = [1i64; 3];
        for (a, &v) in lattice.dims().iter().enumerate() {
            d[a] = v as i64;
        }
        d
    };
    let norm = FRAC_1_SQRT_2PI / cfg.sigma;
    let inv_2s2 = 0.5 / (cfg.sigma * cfg.sigma);

    let mut pattern = Vec::with_capacity(n);
    let mut values = Vec::with_capacity(n);
    for i in 0..n {
        let ci = lattice.cell_coords(i);
        let mut pat = Vec::with_capacity(offsets.len());
        let mut val = Vec::with_capacity(offsets.len());
        for (off, dist) in &offsets {
            let mut ok = true;
            let mut c = [0i64; 3];
            for a in 0..3 {
                c[a] = ci[a] as i64 + off[a];
                if c[a] < 0 || c[a] >= dims[a] {
                    ok = false;
                    break;
                }
            }
            if !ok {
                continue;
            }
            let j = ((c[0] * dims[1] + c[1]) * dims[2] + c[2]) as u32;
            pat.push(j);
            val.push(norm * (-dist * dist * inv_2s2).exp());
        }
        pattern.push(pat);
        values.push(val);
    }
    SparseCov::new(pattern, values)
}
