//! The sequential Gaussian occupancy filter.
//!
//! State is a joint Gaussian (m̂, Σ) over all lattice cells. Each probit
//! measurement (cell i, sign y) multiplies the current Gaussian by the
//! likelihood Φ(y·mᵢ) and replaces the product with the Gaussian matching its
//! first two moments. Because the likelihood acts through a single coordinate,
//! the match is closed-form: with
//!
//! ```text
//! s² = Σᵢᵢ + 1,   z = y·m̂ᵢ/s,   λ = φ(z)/Φ(z)   (inverse Mills ratio)
//! ```
//!
//! the mean shifts along the covariance column, m̂′ = m̂ + (y λ/s)·Σvᵢ, and the
//! covariance shrinks by one symmetric rank-one term,
//!
//! ```text
//! Σ′ = Σ − c·(Σvᵢ)(Σvᵢ)ᵀ,   c = λ(λ + z)/s².
//! ```
//!
//! The textbook form of the update carries two correction terms — the squared
//! mean shift (yλ/s)²·ΣvᵢvᵢᵀΣ and the η-ratio term y·λ·m̂ᵢ/s³·ΣvᵢvᵢᵀΣ — but
//! both are multiples of the same outer product and their coefficients sum to
//! `c` above (using y·m̂ᵢ = z·s). Since λ(z) + z > 0 for every finite z, `c` is
//! strictly positive: the measured cell's variance always contracts, however
//! contradictory the measurement. A unit test checks this algebra against the
//! literal two-term evaluation.
//!
//! Updates are applied strictly in caller order and the result is
//! order-dependent — this is a single-pass approximation, not a batch
//! posterior. Nothing here reorders or parallelizes across measurements, and
//! the per-entry arithmetic uses a fixed association order, so identical
//! inputs give bitwise-identical maps.

use crate::error::{Error, Result};
use crate::grid::Measurement;
use crate::map::LatentMap;
use crate::stats::{inv_mills, std_normal_cdf};

/// Per-update numbers worth surfacing to callers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UpdateDiagnostics {
    /// Marginal likelihood of the measurement, η = Φ(z).
    pub eta: f64,
    /// The standardized probit argument z = y·m̂ᵢ/√(Σᵢᵢ+1).
    pub z_score: f64,
    /// Diagonal entries clamped to the variance floor by this update.
    pub clamped_variances: usize,
}

/// Folds one measurement into the map in place.
pub fn ogf_update(map: &mut LatentMap, meas: &Measurement) -> Result<UpdateDiagnostics> {
    let n = map.n_cells();
    if meas.cell >= n {
        return Err(Error::InvalidCell { cell: meas.cell, n_cells: n });
    }
    let i = meas.cell;
    let y = meas.label.sign();

    let (mean, cov) = map.parts_mut();
    let s2 = cov.diag(i) + 1.0;
    let s = s2.sqrt();
    let z = y * mean[i] / s;
    let lambda = inv_mills(z);
    let eta = std_normal_cdf(z);

    let mean_coef = y * lambda / s;
    cov.for_each_in_column(i, |j, v| mean[j] += mean_coef * v);

    let c = lambda * (lambda + z) / s2;
    let clamped = cov.rank1_col_update(i, c);

    if !mean[i].is_finite() || !cov.diag(i).is_finite() || mean.iter().any(|m| !m.is_finite()) {
        return Err(Error::NonFiniteState { cell: i });
    }

    Ok(UpdateDiagnostics { eta, z_score: z, clamped_variances: clamped })
}

/// Folds a measurement batch left to right, in the given order.
///
/// Cell indices are validated up front so an invalid batch leaves the map
/// untouched.
pub fn ogf_process(map: &mut LatentMap, batch: &[Measurement]) -> Result<Vec<UpdateDiagnostics>> {
    let n = map.n_cells();
    for meas in batch {
        if meas.cell >= n {
            return Err(Error::InvalidCell { cell: meas.cell, n_cells: n });
        }
    }
    batch.iter().map(|meas| ogf_update(map, meas)).collect()
}
