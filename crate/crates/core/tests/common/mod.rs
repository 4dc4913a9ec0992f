//! Shared oracle machinery for the integration suites.
//!
//! The library computes probit-tilted Gaussian posteriors in closed form. The
//! oracle here recomputes the same moments by brute force — composite
//! Gauss–Legendre quadrature on the tilted scalar marginal, then exact
//! Gaussian conditioning to extend the result over the remaining coordinates
//! — so the two paths share no algebra beyond the definition of Φ itself.

#![allow(dead_code)] // each test binary uses a different subset

use nalgebra::{DMatrix, DVector};
use ogf::stats::{std_normal_cdf, std_normal_pdf};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// Composite 10-point Gauss–Legendre quadrature with `panels` equal panels.
///
/// All oracle integrals are taken in standardized coordinates, where the
/// integrand is φ(t) times a smooth bounded factor, so a fixed rule already
/// reaches machine accuracy; adaptivity would only add failure modes (an
/// adaptive rule keyed to a coarse magnitude estimate dies on near-odd
/// integrands whose estimate cancels to zero, and nesting two adaptive rules
/// makes the outer error estimate chase the inner rule's noise floor).
pub fn composite_gl10(f: &impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    // nodes/weights for 10-point Gauss–Legendre on [-1, 1]
    const X: [f64; 5] = [
        0.1488743389816312,
        0.4333953941292472,
        0.6794095682990244,
        0.8650633666889845,
        0.9739065285171717,
    ];
    const W: [f64; 5] = [
        0.2955242247147529,
        0.2692667193099963,
        0.2190863625159820,
        0.1494513491505806,
        0.0666713443086881,
    ];
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * h;
        let half = 0.5 * h;
        let mut s = 0.0;
        for k in 0..5 {
            s += W[k] * (f(mid - half * X[k]) + f(mid + half * X[k]));
        }
        total += s * half;
    }
    total
}

/// Scalar tilted-Gaussian moments, computed purely by quadrature.
///
/// For the density q(x) ∝ φ((x−μ)/σ)/σ · Φ(y·x) this returns the normalizer
/// Z = ∫ q, the posterior mean, and the posterior variance.
pub struct TiltedScalar {
    pub z_norm: f64,
    pub mean: f64,
    pub var: f64,
}

pub fn tilted_scalar_moments(mu: f64, sigma2: f64, y: f64) -> TiltedScalar {
    let sigma = sigma2.sqrt();
    // integrate in standardized units t = (x − μ)/σ; ±14σ bounds the missing
    // mass far below the rule's roundoff for every z-score we generate
    let g = |t: f64| std_normal_pdf(t) * std_normal_cdf(y * (mu + sigma * t));
    let z_norm = composite_gl10(&g, -14.0, 14.0, 160);
    let m1 = composite_gl10(&|t| t * g(t), -14.0, 14.0, 160) / z_norm;
    let m2 = composite_gl10(&|t| t * t * g(t), -14.0, 14.0, 160) / z_norm;
    TiltedScalar {
        z_norm,
        mean: mu + sigma * m1,
        var: sigma2 * (m2 - m1 * m1),
    }
}

/// Joint tilted-Gaussian moments over an N-cell instance.
///
/// The likelihood touches coordinate `i` only, so the joint posterior factors
/// through the scalar tilted marginal: conditioned on xᵢ the remaining
/// coordinates stay Gaussian with the usual linear-conditioning law, and the
/// law of total (co)variance folds the scalar moments back in:
///
/// ```text
/// E[xⱼ]       = mⱼ + (Σⱼᵢ/Σᵢᵢ)(E[xᵢ] − mᵢ)
/// Cov[xⱼ,xₖ]  = Σⱼₖ − ΣⱼᵢΣₖᵢ/Σᵢᵢ + (Σⱼᵢ/Σᵢᵢ)(Σₖᵢ/Σᵢᵢ)·Var[xᵢ]
/// ```
///
/// (both identities hold for j or k equal to i as well, since the Schur term
/// then cancels the prior entry). Only 1-D quadrature is ever needed.
pub fn tilted_joint_moments(
    mean: &DVector<f64>,
    cov: &DMatrix<f64>,
    i: usize,
    y: f64,
) -> (f64, DVector<f64>, DMatrix<f64>) {
    let n = mean.len();
    let sii = cov[(i, i)];
    let scalar = tilted_scalar_moments(mean[i], sii, y);

    let gain = DVector::from_fn(n, |j, _| cov[(j, i)] / sii);
    let post_mean = DVector::from_fn(n, |j, _| mean[j] + gain[j] * (scalar.mean - mean[i]));
    let post_cov = DMatrix::from_fn(n, n, |j, k| {
        cov[(j, k)] - cov[(j, i)] * cov[(k, i)] / sii + gain[j] * gain[k] * scalar.var
    });
    (scalar.z_norm, post_mean, post_cov)
}

/// Random correlated Gaussian instances for oracle comparisons.
pub struct InstanceGen {
    rng: ChaCha12Rng,
}

impl InstanceGen {
    pub fn new(seed: u64) -> Self {
        InstanceGen { rng: ChaCha12Rng::seed_from_u64(seed) }
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.gen_range(lo..hi)
    }

    pub fn usize_below(&mut self, n: usize) -> usize {
        self.rng.gen_range(0..n)
    }

    pub fn label_sign(&mut self) -> f64 {
        if self.rng.gen_bool(0.5) {
            1.0
        } else {
            -1.0
        }
    }

    /// Draws (mean, covariance) with the covariance built as A·Aᵀ + d·I and
    /// then mirrored so both triangles are bitwise equal.
    pub fn gaussian(&mut self, n: usize) -> (DVector<f64>, DMatrix<f64>) {
        let a = DMatrix::from_fn(n, n, |_, _| self.uniform(-1.0, 1.0));
        let mut cov = &a * a.transpose();
        let d = self.uniform(0.3, 1.0);
        for i in 0..n {
            cov[(i, i)] += d;
        }
        for i in 0..n {
            for j in 0..i {
                cov[(j, i)] = cov[(i, j)];
            }
        }
        let mean = DVector::from_fn(n, |_, _| self.uniform(-2.0, 2.0));
        (mean, cov)
    }
}

/// Relative error between vectors in the Euclidean norm.
pub fn rel_err_vec(got: &DVector<f64>, want: &DVector<f64>) -> f64 {
    (got - want).norm() / want.norm().max(1e-300)
}

/// Relative error between matrices in the Frobenius norm.
pub fn rel_err_mat(got: &DMatrix<f64>, want: &DMatrix<f64>) -> f64 {
    (got - want).norm() / want.norm().max(1e-300)
}
