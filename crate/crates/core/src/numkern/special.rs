//! Error function family, normal distribution helpers, `sinh(x)/x`-type
//! kernels and log-domain accumulation.
//!
//! The erf/erfc rational approximations are ported from FreeBSD's
//! `s_erf.c`, which carries this notice:
//!
//! ```text
//! Copyright (C) 1993 by Sun Microsystems, Inc. All rights reserved.
//!
//! Developed at SunPro, a Sun Microsystems, Inc. business.
//! Permission to use, copy, modify, and distribute this
//! software is freely granted, provided that this notice
//! is preserved.
//! ```

use std::f64::consts::{FRAC_1_SQRT_2, LN_2, PI};

const ERX: f64 = 8.45062911510467529297e-01;
const EFX: f64 = 1.28379167095512586316e-01;

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

/// `(P(s), Q(s))` for `erf(1 + s) − ERX` on `|x| ∈ [0.84375, 1.25)`.
#[inline]
fn erf_near_one(ax: f64) -> f64 {
    let s = ax - 1.0;
    let p = PA0 + s * (PA1 + s * (PA2 + s * (PA3 + s * (PA4 + s * (PA5 + s * PA6)))));
    let q = 1.0 + s * (QA1 + s * (QA2 + s * (QA3 + s * (QA4 + s * (QA5 + s * QA6)))));
    p / q
}

/// `R/S − 0.5625` such that `erfc(x) = exp(−x² + tail(x)) / x` for `x ≥ 1.25`.
#[inline]
fn erfc_tail_exponent(ax: f64) -> f64 {
    let s = 1.0 / (ax * ax);
    let (r, q) = if ax < 1.0 / 0.35 {
        (
            RA0 + s * (RA1 + s * (RA2 + s * (RA3 + s * (RA4 + s * (RA5 + s * (RA6 + s * RA7)))))),
            1.0 + s
                * (SA1
                    + s * (SA2 + s * (SA3 + s * (SA4 + s * (SA5 + s * (SA6 + s * (SA7 + s * SA8))))))),
        )
    } else {
        (
            RB0 + s * (RB1 + s * (RB2 + s * (RB3 + s * (RB4 + s * (RB5 + s * RB6))))),
            1.0 + s * (SB1 + s * (SB2 + s * (SB3 + s * (SB4 + s * (SB5 + s * (SB6 + s * SB7)))))),
        )
    };
    r / q - 0.5625
}

/// `erfc(x)` for `x ≥ 1.25`, with the exp(−x²) split that keeps full precision.
#[inline]
fn erfc_large(ax: f64) -> f64 {
    if ax >= 28.0 {
        return erfcx(ax) * (-ax * ax).exp();
    }
    let z = f64::from_bits(ax.to_bits() & 0xffff_ffff_0000_0000);
    (-z * z).exp() * ((z - ax) * (z + ax) + erfc_tail_exponent(ax)).exp() / ax
}

#[inline]
fn erf_small_poly(x: f64) -> f64 {
    let z = x * x;
    let r = PP0 + z * (PP1 + z * (PP2 + z * (PP3 + z * PP4)));
    let s = 1.0 + z * (QQ1 + z * (QQ2 + z * (QQ3 + z * (QQ4 + z * QQ5))));
    x + x * (r / s)
}

/// Error function.
pub fn erf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    let ax = x.abs();
    let v = if ax < 0.84375 {
        if ax < 3.7252902984619140625e-9 {
            return x + EFX * x;
        }
        return erf_small_poly(x);
    } else if ax < 1.25 {
        ERX + erf_near_one(ax)
    } else if ax >= 6.0 {
        1.0
    } else {
        1.0 - erfc_large(ax)
    };
    v.copysign(x)
}

/// Complementary error function `1 − erf(x)`.
pub fn erfc(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    let ax = x.abs();
    if ax < 0.84375 {
        if ax < 1.3877787807814457e-17 {
            return 1.0 - x;
        }
        let e = erf_small_poly(x);
        if x < 0.25 {
            return 1.0 - e;
        }
        return 0.5 - (e - 0.5);
    }
    if ax < 1.25 {
        let p = erf_near_one(ax);
        return if x >= 0.0 { 1.0 - ERX - p } else { 1.0 + ERX + p };
    }
    if x > 0.0 {
        erfc_large(ax)
    } else if ax < 6.0 {
        2.0 - erfc_large(ax)
    } else {
        2.0
    }
}

/// Scaled complementary error function `exp(x²) · erfc(x)`.
///
/// Finite for all `x ≥ 0`; overflows only where `exp(x²)` does for
/// negative arguments.
pub fn erfcx(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x < 0.0 {
        return 2.0 * (x * x).exp() - erfcx(-x);
    }
    if x < 1.25 {
        return (x * x).exp() * erfc(x);
    }
    if x < 28.0 {
        return erfc_tail_exponent(x).exp() / x;
    }
    // Asymptotic series 1/(x√π) · Σ (−1)^k (2k−1)!! / (2x²)^k.
    let inv2 = 1.0 / (2.0 * x * x);
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..10 {
        term *= -((2 * k - 1) as f64) * inv2;
        sum += term;
    }
    sum / (x * PI.sqrt())
}

/// Standard normal density.
pub fn norm_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// Standard normal distribution function.
pub fn norm_cdf(x: f64) -> f64 {
    0.5 * erfc(-x * FRAC_1_SQRT_2)
}

/// `Φ(x)/φ(x)`, finite wherever `exp(x²/2)` is.
pub fn mills_ratio_complement(x: f64) -> f64 {
    let half_sqrt_2pi = (0.5 * PI).sqrt();
    if x <= 0.0 {
        half_sqrt_2pi * erfcx(-x * FRAC_1_SQRT_2)
    } else {
        (2.0 * PI).sqrt() * (0.5 * x * x).exp() - half_sqrt_2pi * erfcx(x * FRAC_1_SQRT_2)
    }
}

const SERIES_SWITCH: f64 = 1e-4;

/// `sinh(x)/x`, equal to 1 at the origin.
pub fn sinch(x: f64) -> f64 {
    if x.abs() < SERIES_SWITCH {
        let x2 = x * x;
        1.0 + x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sinh() / x
    }
}

/// `sin(x)/x`, equal to 1 at the origin.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < SERIES_SWITCH {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

/// `ln(sinh(rate·r)/rate)` for `rate ≥ 0`, `r > 0`; `ln r` when `rate = 0`.
///
/// Never forms `sinh` for large arguments, so it stays finite far past the
/// point where `sinh` overflows.
pub fn log_sinh_ratio(rate: f64, r: f64) -> f64 {
    let x = rate * r;
    if x <= 1.0 {
        r.ln() + (sinch(x) - 1.0).ln_1p()
    } else {
        x - LN_2 + (-(-2.0 * x).exp()).ln_1p() - rate.ln()
    }
}

/// `ln|sin(rate·r)/rate|` for `rate ≥ 0`, `r > 0`; `ln r` when `rate = 0`.
pub fn log_abs_sin_ratio(rate: f64, r: f64) -> f64 {
    r.ln() + sinc(rate * r).abs().ln()
}

/// `ln Γ(k/2)` for a positive integer `k`, by exact half-integer recursion.
pub fn ln_gamma_half(k: usize) -> f64 {
    assert!(k > 0, "Γ(0) is undefined");
    let (mut x, mut acc) = if k % 2 == 0 {
        (1.0, 0.0)
    } else {
        (0.5, 0.5 * PI.ln())
    };
    let target = k as f64 / 2.0;
    while x < target {
        acc += x.ln();
        x += 1.0;
    }
    acc
}

/// Running `ln Σ exp(terms)` that never leaves the log domain.
#[derive(Clone, Copy, Debug)]
pub struct LogSumExp {
    max: f64,
    scaled_sum: f64,
}

impl Default for LogSumExp {
    fn default() -> Self {
        Self {
            max: f64::NEG_INFINITY,
            scaled_sum: 0.0,
        }
    }
}

impl LogSumExp {
    pub fn add(&mut self, log_term: f64) {
        if log_term == f64::NEG_INFINITY {
            return;
        }
        if log_term > self.max {
            self.scaled_sum = self.scaled_sum * (self.max - log_term).exp() + 1.0;
            self.max = log_term;
        } else {
            self.scaled_sum += (log_term - self.max).exp();
        }
    }

    pub fn value(&self) -> f64 {
        if self.scaled_sum == 0.0 {
            f64::NEG_INFINITY
        } else {
            self.max + self.scaled_sum.ln()
        }
    }
}

impl FromIterator<f64> for LogSumExp {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = Self::default();
        for t in iter {
            acc.add(t);
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkern::quadrature::adaptive_simpson;

    #[test]
    fn erf_basic_values() {
        assert_eq!(erf(0.0), 0.0);
        assert_eq!(norm_cdf(0.0), 0.5);
        // Reference values from 50-digit evaluation.
        let table = [
            (0.1, 0.112462916018284898404712251014),
            (0.5, 0.520499877813046537682746653892),
            (1.0, 0.842700792949714869341220635083),
            (1.5, 0.966105146475310727066976261646),
            (2.5, 0.999593047982555041060435784260),
            (4.0, 0.999999984582742099719981147840),
        ];
        for (x, want) in table {
            assert!((erf(x) - want).abs() <= 1e-15, "erf({x})");
        }
        let erfc_table = [
            (3.0, 2.20904969985854413727761295823e-5),
            (5.0, 1.53745979442803485018834348538e-12),
            (10.0, 2.08848758376254475700078629495e-45),
        ];
        for (x, want) in erfc_table {
            assert!(((erfc(x) - want) / want).abs() <= 1e-13, "erfc({x})");
        }
    }

    #[test]
    fn erf_is_odd() {
        for i in 0..200 {
            let x = -7.0 + 0.07 * i as f64;
            assert_eq!(erf(-x), -erf(x));
            assert!((erf(x) + erfc(x) - 1.0).abs() < 2e-16 * 4.0);
        }
    }

    #[test]
    fn erfcx_is_continuous_and_matches_scaled_erfc() {
        for &x in &[0.0f64, 0.5, 1.2499, 1.25, 2.0, 2.857, 2.858, 10.0, 25.0] {
            let direct = (x * x).exp() * erfc(x);
            assert!(((erfcx(x) - direct) / direct).abs() < 1e-14, "x={x}");
        }
        // Either side of the asymptotic switch, against 40-digit values.
        assert!((erfcx(27.999999999) / 0.0201368019649325339354776 - 1.0).abs() < 1e-14);
        assert!((erfcx(28.000000001) / 0.0201368019634960196175937 - 1.0).abs() < 1e-14);
        // 50-digit reference.
        assert!((erfcx(100.0) - 5.64161378298943e-3).abs() / 5.64e-3 < 1e-13);
        assert!((erfcx(-1.0) - 5.00898008076228346630982459821).abs() < 1e-13);
    }

    #[test]
    fn norm_cdf_matches_quadrature_of_density() {
        let integral = adaptive_simpson(&norm_pdf, 0.0, 1.0, 1e-15);
        let want = 0.5 + integral;
        assert!((norm_cdf(1.0) - want).abs() <= 1e-12);
        assert!((norm_cdf(1.0) - 0.841344746068542948585).abs() <= 1e-15);
    }

    #[test]
    fn mills_ratio_matches_definition() {
        for &x in &[-8.0, -2.0, -0.3, 0.0, 0.4, 1.0, 3.0, 6.0] {
            let want = norm_cdf(x) / norm_pdf(x);
            assert!(((mills_ratio_complement(x) - want) / want).abs() < 1e-13, "x={x}");
        }
    }

    #[test]
    fn sinch_and_sinc_limits() {
        assert_eq!(sinch(0.0), 1.0);
        assert_eq!(sinc(0.0), 1.0);
        assert!(sinc(PI).abs() < 1e-16);
        // sinh(1e-5)/1e-5 = 1 + 1.6666666666666667e-11 + ...
        let want = 1.0000000000166666666667500000;
        assert!(((sinch(1e-5) - want) / want).abs() <= 1e-15);
    }

    #[test]
    fn series_switchover_is_smooth() {
        for &x in &[1e-4, -1e-4] {
            let below = x * (1.0 - 1e-12);
            let above = x * (1.0 + 1e-12);
            assert!((sinch(below) - sinch(above)).abs() < 1e-14);
            assert!((sinc(below) - sinc(above)).abs() < 1e-14);
        }
    }

    #[test]
    fn log_sinh_ratio_is_stable() {
        let rate = FRAC_1_SQRT_2;
        for &r in &[1e-8, 0.1, 1.0, 1.5, 2.0, 30.0] {
            let direct = ((rate * r).sinh() / rate).ln();
            assert!((log_sinh_ratio(rate, r) - direct).abs() < 1e-13 * direct.abs().max(1.0));
        }
        assert_eq!(log_sinh_ratio(0.0, 2.0), 2f64.ln());
        let big = log_sinh_ratio(rate, 5000.0);
        assert!(big.is_finite());
        assert!((big - (rate * 5000.0 - LN_2 - rate.ln())).abs() < 1e-9);
    }

    #[test]
    fn half_integer_gamma() {
        assert!((ln_gamma_half(1) - PI.sqrt().ln()).abs() < 1e-15);
        assert_eq!(ln_gamma_half(2), 0.0);
        assert!((ln_gamma_half(6) - 2f64.ln()).abs() < 1e-15);
        assert!((ln_gamma_half(7) - (15.0 * PI.sqrt() / 8.0).ln()).abs() < 1e-14);
    }

    #[test]
    fn log_sum_exp() {
        let acc: LogSumExp = [1000.0, 1000.0, -f64::INFINITY].into_iter().collect();
        assert!((acc.value() - (1000.0 + LN_2)).abs() < 1e-12);
        assert_eq!(LogSumExp::default().value(), f64::NEG_INFINITY);
    }
}
