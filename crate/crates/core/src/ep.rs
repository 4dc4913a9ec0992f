//! Expectation Propagation over the latent field — the reference solver the
//! sequential filter is validated against.
//!
//! EP keeps one Gaussian *site* per measurement and iterates to
//! self-consistency: for each site, divide it out of the current posterior
//! (the *cavity*), match the first two moments of cavity × probit likelihood,
//! and refit the site so that cavity × site reproduces the matched Gaussian.
//! Unlike the single-pass filter, revisiting sites lets early measurements be
//! reinterpreted in light of later ones, so the converged result is
//! order-invariant.
//!
//! The posterior is refreshed incrementally: replacing a site's natural
//! parameters (Δτ, Δν) on cell c is a rank-one precision edit, which in
//! covariance form is
//!
//! ```text
//! Σ' = Σ − (Δτ/d)·(Σvc)(Σvc)ᵀ,   m' = m + ((Δν − Δτ·m_c)/d)·Σvc,
//! d  = 1 + Δτ·Σcc,
//! ```
//!
//! exactly the Kalman measurement form of [`kf_site_update`] applied to the
//! site delta. In debug builds every sweep cross-checks the incremental state
//! against a from-scratch reconstruction (full rebuild on small problems, the
//! equivalent probe identity Σ₀ ≈ Σ + Σ₀·D·Σ on large ones, where D is the
//! aggregated site precision).
//!
//! This module is an oracle: single-threaded, correctness over speed, and the
//! multi-sweep solver insists on the dense covariance backend.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::grid::{Label, Measurement};
use crate::map::LatentMap;
use crate::stats::{inv_mills, std_normal_cdf};

/// One Gaussian site t(m_c) = η̃·N(m_c; μ̃, σ̃²), the local approximation of a
/// single probit factor. `sigma2_tilde = +∞` marks a site not yet visited,
/// i.e. the constant factor 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SiteParams {
    pub eta_tilde: f64,
    pub mu_tilde: f64,
    pub sigma2_tilde: f64,
}

impl SiteParams {
    pub fn uninformative() -> Self {
        SiteParams { eta_tilde: 1.0, mu_tilde: 0.0, sigma2_tilde: f64::INFINITY }
    }

    pub fn is_informative(&self) -> bool {
        self.sigma2_tilde.is_finite()
    }

    /// Site precision τ̃ = 1/σ̃² (zero for an uninformative site).
    pub fn tau(&self) -> f64 {
        if self.is_informative() {
            1.0 / self.sigma2_tilde
        } else {
            0.0
        }
    }

    /// Site shift ν̃ = μ̃/σ̃² (zero for an uninformative site).
    pub fn nu(&self) -> f64 {
        if self.is_informative() {
            self.mu_tilde / self.sigma2_tilde
        } else {
            0.0
        }
    }
}

/// The posterior marginal with one site divided out.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavityParams {
    pub mu_cav: f64,
    pub sigma2_cav: f64,
}

/// Moments of cavity × probit likelihood.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentMatch {
    /// Standardized argument z = y·μ_cav/√(1+σ²_cav).
    pub z: f64,
    /// Normalizer η̂ = Φ(z) of the tilted marginal.
    pub eta_hat: f64,
    pub mu_hat: f64,
    pub sigma2_hat: f64,
}

/// Solver controls for [`ep_run`].
#[derive(Debug, Clone, Copy)]
pub struct EpOptions {
    /// Converged when no site's (μ̃, σ̃²) moves by more than this in a sweep.
    pub tol: f64,
    pub max_sweeps: usize,
}

impl Default for EpOptions {
    fn default() -> Self {
        EpOptions { tol: 1e-6, max_sweeps: 100 }
    }
}

/// What happened during an [`ep_run`].
#[derive(Debug, Clone, Copy)]
pub struct EpReport {
    /// Sweeps actually performed.
    pub sweeps: usize,
    /// Whether the site parameters settled below `tol`.
    pub converged: bool,
    /// Largest site-parameter change in the final sweep.
    pub max_delta: f64,
    /// Site updates skipped over all sweeps because the cavity or the matched
    /// moments were pathological.
    pub skipped_sites: usize,
}

/// Full EP state: the prior it started from, the running Gaussian posterior,
/// and one site per measurement.
#[derive(Debug, Clone)]
pub struct EpState {
    pub(crate) prior: LatentMap,
    pub(crate) posterior: LatentMap,
    pub(crate) measurements: Vec<Measurement>,
    pub(crate) sites: Vec<SiteParams>,
}

impl EpState {
    fn fresh(prior: &LatentMap, batch: &[Measurement]) -> Result<Self> {
        let n = prior.n_cells();
        for meas in batch {
            if meas.cell >= n {
                return Err(Error::InvalidCell { cell: meas.cell, n_cells: n });
            }
        }
        Ok(EpState {
            prior: prior.clone(),
            posterior: prior.clone(),
            measurements: batch.to_vec(),
            sites: vec![SiteParams::uninformative(); batch.len()],
        })
    }

    pub fn prior(&self) -> &LatentMap {
        &self.prior
    }

    pub fn posterior(&self) -> &LatentMap {
        &self.posterior
    }

    pub fn sites(&self) -> &[SiteParams] {
        &self.sites
    }

    pub fn measurements(&self) -> &[Measurement] {
        &self.measurements
    }

    pub fn into_posterior(self) -> LatentMap {
        self.posterior
    }

    /// Per-cell aggregation of the site natural parameters: (Στ̃, Σν̃).
    fn aggregated_sites(&self) -> (DVector<f64>, DVector<f64>) {
        let n = self.prior.n_cells();
        let mut tau = DVector::zeros(n);
        let mut nu = DVector::zeros(n);
        for (meas, site) in self.measurements.iter().zip(&self.sites) {
            tau[meas.cell] += site.tau();
            nu[meas.cell] += site.nu();
        }
        (tau, nu)
    }

    /// Rebuilds the posterior from scratch as (Σ₀⁻¹ + diag τ̃)⁻¹ combined with
    /// the aggregated site shifts, ignoring the incrementally held posterior.
    /// Dense backend only.
    pub fn reconstructed_posterior(&self) -> Result<LatentMap> {
        let cov0 = self.prior.cov().as_dense().ok_or(Error::OracleRequiresDense)?;
        let prec0 = cov0
            .clone()
            .cholesky()
            .expect("prior covariance must be positive definite")
            .inverse();
        let (tau, nu) = self.aggregated_sites();
        let mut prec = prec0.clone();
        for c in 0..tau.len() {
            prec[(c, c)] += tau[c];
        }
        let chol = prec.cholesky().expect("posterior precision must be positive definite");
        let cov = chol.inverse();
        let mean = chol.solve(&(&prec0 * self.prior.mean() + nu));
        LatentMap::from_parts(
            self.prior.lattice().clone(),
            mean,
            crate::map::Cov::Dense(cov),
        )
    }
}

/// Divides site `i` out of the current posterior marginal.
///
/// For an uninformative site the cavity *is* the posterior marginal. A
/// non-positive cavity precision (the site claims more certainty than the
/// whole posterior holds) is the standard EP pathology; sweeps skip such
/// sites for the round.
pub fn cavity(state: &EpState, i: usize) -> Result<CavityParams> {
    let cell = state.measurements[i].cell;
    let m = state.posterior.mean()[cell];
    let v = state.posterior.variance(cell);
    let site = &state.sites[i];
    if !site.is_informative() {
        return Ok(CavityParams { mu_cav: m, sigma2_cav: v });
    }
    let tau_cav = 1.0 / v - site.tau();
    if tau_cav <= 0.0 {
        return Err(Error::NegativeCavityVariance { site: i });
    }
    let nu_cav = m / v - site.nu();
    Ok(CavityParams { mu_cav: nu_cav / tau_cav, sigma2_cav: 1.0 / tau_cav })
}

/// First two moments of cavity × Φ(y·m).
pub fn moment_match(cav: &CavityParams, label: Label) -> MomentMatch {
    let y = label.sign();
    let s2 = 1.0 + cav.sigma2_cav;
    let s = s2.sqrt();
    let z = y * cav.mu_cav / s;
    let lambda = inv_mills(z);
    MomentMatch {
        z,
        eta_hat: std_normal_cdf(z),
        mu_hat: cav.mu_cav + y * lambda * cav.sigma2_cav / s,
        sigma2_hat: cav.sigma2_cav * (1.0 - lambda * (lambda + z) * cav.sigma2_cav / s2),
    }
}

/// Refits the site so cavity × site has exactly the matched moments.
///
/// Moment matching against a probit factor always contracts the variance, so
/// a non-contracting input pair signals a broken invariant upstream rather
/// than a representable site.
pub fn site_from_moments(cav: &CavityParams, mm: &MomentMatch) -> Result<SiteParams> {
    if mm.sigma2_hat >= cav.sigma2_cav {
        return Err(Error::NonContractingMoments {
            sigma2_hat: mm.sigma2_hat,
            sigma2_cav: cav.sigma2_cav,
        });
    }
    let tau_hat = 1.0 / mm.sigma2_hat;
    let tau_cav = 1.0 / cav.sigma2_cav;
    let tau_tilde = tau_hat - tau_cav;
    let sigma2_tilde = 1.0 / tau_tilde;
    let mu_tilde = (mm.mu_hat * tau_hat - cav.mu_cav * tau_cav) / tau_tilde;
    // the site's scale factor makes cavity × site integrate to η̂
    let spread = cav.sigma2_cav + sigma2_tilde;
    let eta_tilde = mm.eta_hat
        * (std::f64::consts::TAU * spread).sqrt()
        * ((cav.mu_cav - mu_tilde).powi(2) / (2.0 * spread)).exp();
    Ok(SiteParams { eta_tilde, mu_tilde, sigma2_tilde })
}

/// Folds one Gaussian pseudo-observation (μ̃, σ̃²) on `cell` into the map —
/// the measurement-update step of a Kalman filter with a one-hot observation
/// vector. An uninformative site leaves the map untouched.
pub fn kf_site_update(map: &mut LatentMap, cell: usize, site: &SiteParams) {
    if !site.is_informative() {
        return;
    }
    let (mean, cov) = map.parts_mut();
    let denom = cov.diag(cell) + site.sigma2_tilde;
    let mean_coef = (site.mu_tilde - mean[cell]) / denom;
    cov.for_each_in_column(cell, |j, v| mean[j] += mean_coef * v);
    cov.rank1_col_update(cell, 1.0 / denom);
}

/// Flags divergence when the per-sweep change grows three sweeps in a row.
struct DivergenceWatch {
    prev: f64,
    growing: usize,
}

impl DivergenceWatch {
    fn new() -> Self {
        DivergenceWatch { prev: f64::INFINITY, growing: 0 }
    }

    /// Feeds one sweep's max delta; true means diverged.
    fn observe(&mut self, delta: f64) -> bool {
        if delta > self.prev {
            self.growing += 1;
        } else {
            self.growing = 0;
        }
        self.prev = delta;
        self.growing >= 3
    }
}

#[derive(Debug)]
struct SweepOutcome {
    max_delta: f64,
    skipped: usize,
}

/// One in-order pass over all sites with the fused delta refresh.
fn sweep(state: &mut EpState) -> Result<SweepOutcome> {
    let total = state.sites.len();
    let mut skipped = 0usize;
    let mut max_delta = 0.0f64;
    for k in 0..total {
        let cell = state.measurements[k].cell;
        let label = state.measurements[k].label;
        let Ok(cav) = cavity(state, k) else {
            skipped += 1;
            continue;
        };
        let mm = moment_match(&cav, label);
        let Ok(new_site) = site_from_moments(&cav, &mm) else {
            skipped += 1;
            continue;
        };

        let old = state.sites[k];
        let delta = if old.is_informative() {
            (new_site.mu_tilde - old.mu_tilde)
                .abs()
                .max((new_site.sigma2_tilde - old.sigma2_tilde).abs())
        } else {
            // first visit: the site jumps from the constant factor
            f64::INFINITY
        };
        max_delta = max_delta.max(delta);

        let dtau = new_site.tau() - old.tau();
        let dnu = new_site.nu() - old.nu();
        let (mean, cov) = state.posterior.parts_mut();
        let m_c = mean[cell];
        let denom = 1.0 + dtau * cov.diag(cell);
        debug_assert!(denom > 0.0, "site delta would destroy positivity");
        let mean_coef = (dnu - dtau * m_c) / denom;
        cov.for_each_in_column(cell, |j, v| mean[j] += mean_coef * v);
        cov.rank1_col_update(cell, dtau / denom);
        state.sites[k] = new_site;
    }
    if skipped * 100 > total {
        return Err(Error::EpPathological { skipped, total });
    }
    Ok(SweepOutcome { max_delta, skipped })
}

/// Debug-build consistency check: the incrementally maintained posterior must
/// satisfy the from-scratch reconstruction identities
///
/// ```text
/// Σ₀·x = Σ·x + Σ₀·D·Σ·x          m + Σ₀·D·m = m₀ + Σ₀·ν
/// ```
///
/// (D = diag of aggregated site precisions). Small problems rebuild the full
/// posterior instead; large ones probe the identity along a few directions so
/// the check stays O(N²) per sweep.
#[cfg(debug_assertions)]
fn debug_check_reconstruction(state: &EpState) {
    let Some(cov0) = state.prior.cov().as_dense() else {
        return;
    };
    let n = state.prior.n_cells();
    let tol = 1e-7;
    if n <= 64 {
        let rebuilt = state.reconstructed_posterior().expect("dense reconstruction");
        let dm = (rebuilt.mean() - state.posterior.mean()).amax();
        let dc = (rebuilt.cov().to_dense() - state.posterior.cov().to_dense()).amax();
        debug_assert!(
            dm < tol && dc < tol,
            "incremental EP posterior drifted from reconstruction (Δm={dm}, ΔΣ={dc})"
        );
        return;
    }
    let (tau, nu) = state.aggregated_sites();
    let cov = state.posterior.cov().as_dense().expect("posterior backend matches prior");
    // mean identity
    let m = state.posterior.mean();
    let lhs = m + cov0 * &tau.component_mul(m);
    let rhs = state.prior.mean() + cov0 * &nu;
    debug_assert!((lhs - rhs).amax() < tol, "EP mean drifted from reconstruction");
    // covariance identity probed along a few basis directions
    for probe in [0, n / 3, (2 * n) / 3, n - 1] {
        let sx = cov.column(probe).clone_owned();
        let lhs = &sx + cov0 * &tau.component_mul(&sx);
        let rhs = cov0.column(probe).clone_owned();
        debug_assert!(
            (lhs - rhs).amax() < tol,
            "EP covariance drifted from reconstruction (probe column {probe})"
        );
    }
}

/// Runs EP to convergence on a dense-backend prior.
///
/// Sweeps the measurements in the order given, without damping, until the
/// largest per-sweep site change falls below `opts.tol` or `opts.max_sweeps`
/// is reached (reported via [`EpReport::converged`]). Detected divergence and
/// a sweep skipping more than 1 % of its sites abort with an error.
pub fn ep_run(
    prior: &LatentMap,
    batch: &[Measurement],
    opts: &EpOptions,
) -> Result<(EpState, EpReport)> {
    if prior.cov().as_dense().is_none() {
        return Err(Error::OracleRequiresDense);
    }
    let mut state = EpState::fresh(prior, batch)?;
    let mut report =
        EpReport { sweeps: 0, converged: batch.is_empty(), max_delta: 0.0, skipped_sites: 0 };
    let mut watch = DivergenceWatch::new();
    while !report.converged && report.sweeps < opts.max_sweeps {
        let outcome = sweep(&mut state)?;
        report.sweeps += 1;
        report.max_delta = outcome.max_delta;
        report.skipped_sites += outcome.skipped;
        #[cfg(debug_assertions)]
        debug_check_reconstruction(&state);
        if watch.observe(outcome.max_delta) {
            return Err(Error::EpDiverged { sweeps: report.sweeps });
        }
        report.converged = outcome.max_delta < opts.tol;
    }
    Ok((state, report))
}

/// Exactly one in-order EP pass from uninitialized sites.
///
/// This is the streaming regime: each measurement is seen once, with no
/// revisiting, which is precisely what the sequential filter computes — the
/// two are interchangeable to floating-point accuracy and a test suite holds
/// them to that. Works on either covariance backend.
pub fn ep_single_sweep(prior: &LatentMap, batch: &[Measurement]) -> Result<LatentMap> {
    let mut state = EpState::fresh(prior, batch)?;
    sweep(&mut state)?;
    #[cfg(debug_assertions)]
    debug_check_reconstruction(&state);
    Ok(state.into_posterior())
}
