//! Standard-normal primitives shared by every solver in the crate.
//!
//! Everything here is a pure function of one `f64`. The only subtle piece is
//! [`inv_mills`]: the ratio φ(z)/Φ(z) appears in every measurement update, and
//! for strongly contradicted measurements (z ≪ 0) both numerator and
//! denominator underflow long before the ratio becomes extreme — it grows only
//! like |z|. The naive quotient is therefore computed jointly through the
//! scaled complementary error function, which never underflows.

use std::f64::consts::FRAC_1_SQRT_2;

/// 1/√(2π), the standard normal density at 0.
pub const FRAC_1_SQRT_2PI: f64 = 0.398942280401432677939946059934;

/// √(2/π) = 2·φ(0), the inverse Mills ratio at 0.
const SQRT_2_OVER_PI: f64 = 0.797884560802865355879892119869;

/// Standard normal probability density φ(x) = exp(−x²/2)/√(2π).
pub fn std_normal_pdf(x: f64) -> f64 {
    FRAC_1_SQRT_2PI * (-0.5 * x * x).exp()
}

/// Standard normal cumulative distribution Φ(x).
///
/// Computed as erfc(−x/√2)/2 so the left tail keeps full relative precision
/// (better than 1e-12 relative error on [−8, 8], degrading only to the ~1 ulp
/// accuracy of the underlying `erfc` port).
pub fn std_normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x * FRAC_1_SQRT_2)
}

/// Inverse Mills ratio λ(z) = φ(z)/Φ(z).
///
/// For z ≥ 0 the quotient is harmless (Φ ≥ 1/2). For z < 0 both factors decay
/// like exp(−z²/2) and the quotient dies at z ≈ −26 in f64; substituting
/// Φ(z) = exp(−z²/2)·erfcx(−z/√2)/2 cancels the exponentials exactly and gives
///
/// ```text
/// λ(z) = √(2/π) / erfcx(−z/√2),   z < 0,
/// ```
///
/// which is finite and accurate (< 1e-10 relative error on [−40, 8]) all the
/// way down. As z → −∞, λ(z) → −z from above.
pub fn inv_mills(z: f64) -> f64 {
    if z >= 0.0 {
        std_normal_pdf(z) / std_normal_cdf(z)
    } else {
        SQRT_2_OVER_PI / erfcx(-z * FRAC_1_SQRT_2)
    }
}

/// Scaled complementary error function erfcx(x) = exp(x²)·erfc(x) for x ≥ 0.
///
/// Two regimes: below x = 4 the definition is evaluated directly (exp(x²) is
/// at most e¹⁶, no overflow, and the product loses only ~x² ulp); from x = 4
/// the classical continued fraction
///
/// ```text
/// erfcx(x) = (1/√π) / (x + (1/2)/(x + (2/2)/(x + (3/2)/(x + …))))
/// ```
///
/// is evaluated by backward recurrence, which converges to machine precision
/// in well under 60 terms for x ≥ 4.
fn erfcx(x: f64) -> f64 {
    debug_assert!(x >= 0.0);
    if x < 4.0 {
        (x * x).exp() * erfc(x)
    } else {
        const FRAC_1_SQRT_PI: f64 = 0.564189583547756286948079451561;
        let mut t = 0.0;
        for n in (1..=60).rev() {
            t = (n as f64 / 2.0) / (x + t);
        }
        FRAC_1_SQRT_PI / (x + t)
    }
}

//////////////////////////////////////////////////////////////////////////
// The erf/erfc pair below is ported from Go's math package (erf.go),   //
// which in turn derives from FreeBSD's /usr/src/lib/msun/src/s_erf.c   //
// and carries this notice:                                             //
//                                                                      //
// ====================================================                 //
// Copyright (C) 1993 by Sun Microsystems, Inc. All rights reserved.    //
//                                                                      //
// Developed at SunPro, a Sun Microsystems, Inc. business.              //
// Permission to use, copy, modify, and distribute this                 //
// software is freely granted, provided that this notice                //
// is preserved.                                                        //
// ====================================================                 //
//////////////////////////////////////////////////////////////////////////

const ERX: f64 = 8.45062911510467529297e-01;

// coefficients for approximation to erf in [0, 0.84375]
const PP0: f64 = 1.28379167095512558561e-01;
const PP1: f64 = -3.25042107247001499370e-01;
const PP2: f64 = -2.84817495755985104766e-02;
const PP3: f64 = -5.77027029648944159157e-03;
const PP4: f64 = -2.37630166566501626084e-05;
const QQ1: f64 = 3.97917223959155352819e-01;
const QQ2: f64 = 6.50222499887672944485e-02;
const QQ3: f64 = 5.08130628187576562776e-03;
const QQ4: f64 = 1.32494738004321644526e-04;
const QQ5: f64 = -3.96022827877536812320e-06;

// coefficients for approximation to erf in [0.84375, 1.25]
const PA0: f64 = -2.36211856075265944077e-03;
const PA1: f64 = 4.14856118683748331666e-01;
const PA2: f64 = -3.72207876035701323847e-01;
const PA3: f64 = 3.18346619901161753674e-01;
const PA4: f64 = -1.10894694282396677476e-01;
const PA5: f64 = 3.54783043256182359371e-02;
const PA6: f64 = -2.16637559486879084300e-03;
const QA1: f64 = 1.06420880400844228286e-01;
const QA2: f64 = 5.40397917702171048937e-01;
const QA3: f64 = 7.18286544141962662868e-02;
const QA4: f64 = 1.26171219808761642112e-01;
const QA5: f64 = 1.36370839120290507362e-02;
const QA6: f64 = 1.19844998467991074170e-02;

// coefficients for approximation to erfc in [1.25, 1/0.35]
const RA0: f64 = -9.86494403484714822705e-03;
const RA1: f64 = -6.93858572707181764372e-01;
const RA2: f64 = -1.05586262253232909814e+01;
const RA3: f64 = -6.23753324503260060396e+01;
const RA4: f64 = -1.62396669462573470355e+02;
const RA5: f64 = -1.84605092906711035994e+02;
const RA6: f64 = -8.12874355063065934246e+01;
const RA7: f64 = -9.81432934416914548592e+00;
const SA1: f64 = 1.96512716674392571292e+01;
const SA2: f64 = 1.37657754143519042600e+02;
const SA3: f64 = 4.34565877475229228821e+02;
const SA4: f64 = 6.45387271733267880336e+02;
const SA5: f64 = 4.29008140027567833386e+02;
const SA6: f64 = 1.08635005541779435134e+02;
const SA7: f64 = 6.57024977031928170135e+00;
const SA8: f64 = -6.04244152148580987438e-02;

// coefficients for approximation to erfc in [1/0.35, 28]
const RB0: f64 = -9.86494292470009928597e-03;
const RB1: f64 = -7.99283237680523006574e-01;
const RB2: f64 = -1.77579549177547519889e+01;
const RB3: f64 = -1.60636384855821916062e+02;
const RB4: f64 = -6.37566443368389627722e+02;
const RB5: f64 = -1.02509513161107724954e+03;
const RB6: f64 = -4.83519191608651397019e+02;
const SB1: f64 = 3.03380607434824582924e+01;
const SB2: f64 = 3.25792512996573918826e+02;
const SB3: f64 = 1.53672958608443695994e+03;
const SB4: f64 = 3.19985821950859553908e+03;
const SB5: f64 = 2.55305040643316442583e+03;
const SB6: f64 = 4.74528541206955367215e+02;
const SB7: f64 = -2.24409524465858183362e+01;

// 2**-56
const TINY: f64 = 1.3877787807814457e-17;

/// Complementary error function erfc(x) = 1 − erf(x), full f64 range.
fn erfc(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    } else if x == f64::INFINITY {
        return 0.0;
    } else if x == f64::NEG_INFINITY {
        return 2.0;
    }
    let sign = x < 0.0;
    let x = x.abs();
    if x < 0.84375 {
        let temp = if x < TINY {
            x
        } else {
            let z = x * x;
            let r = PP0 + z * (PP1 + z * (PP2 + z * (PP3 + z * PP4)));
            let s = 1.0 + z * (QQ1 + z * (QQ2 + z * (QQ3 + z * (QQ4 + z * QQ5))));
            let y = r / s;
            if x < 0.25 {
                x + x * y
            } else {
                0.5 + (x * y + (x - 0.5))
            }
        };
        return if sign { 1.0 + temp } else { 1.0 - temp };
    }
    if x < 1.25 {
        let s = x - 1.0;
        let p = PA0 + s * (PA1 + s * (PA2 + s * (PA3 + s * (PA4 + s * (PA5 + s * PA6)))));
        let q = 1.0 + s * (QA1 + s * (QA2 + s * (QA3 + s * (QA4 + s * (QA5 + s * QA6)))));
        return if sign { 1.0 + ERX + p / q } else { 1.0 - ERX - p / q };
    }
    if x < 28.0 {
        let s = 1.0 / (x * x);
        let (r, q);
        if x < 1.0 / 0.35 {
            r = RA0 + s * (RA1 + s * (RA2 + s * (RA3 + s * (RA4 + s * (RA5 + s * (RA6 + s * RA7))))));
            q = 1.0
                + s * (SA1
                    + s * (SA2 + s * (SA3 + s * (SA4 + s * (SA5 + s * (SA6 + s * (SA7 + s * SA8)))))));
        } else {
            if sign && x > 6.0 {
                return 2.0; // x < -6: erfc = 2 to machine precision
            }
            r = RB0 + s * (RB1 + s * (RB2 + s * (RB3 + s * (RB4 + s * (RB5 + s * RB6)))));
            q = 1.0 + s * (SB1 + s * (SB2 + s * (SB3 + s * (SB4 + s * (SB5 + s * (SB6 + s * SB7))))));
        }
        // split x into a high-bits part z so that -x*x is computed without
        // rounding the dominant term: -x*x = -z*z + (z-x)*(z+x)
        let z = f64::from_bits(x.to_bits() & 0xffff_ffff_0000_0000);
        let r = (-z * z - 0.5625).exp() * ((z - x) * (z + x) + r / q).exp();
        return if sign { 2.0 - r / x } else { r / x };
    }
    if sign {
        2.0
    } else {
        0.0
    }
}
