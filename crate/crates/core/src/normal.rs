//! Standard normal distribution function, density and quantile.
//!
//! The distribution function goes through `libm::erfc`, which is accurate to a
//! few ulps over the whole line. The quantile starts from a rational
//! approximation and is polished with two Halley steps against that
//! distribution function, so `cdf(quantile(p))` reproduces `p` to rounding.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

/// Φ(x).
pub fn cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}

/// 1 − Φ(x), without cancellation in the upper tail.
pub fn sf(x: f64) -> f64 {
    0.5 * libm::erfc(x * FRAC_1_SQRT_2)
}

/// P(|Z| ≤ |t|) = 2Φ(|t|) − 1.
pub fn central(t: f64) -> f64 {
    libm::erf(t.abs() * FRAC_1_SQRT_2)
}

pub fn pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// Φ⁻¹(p). Returns ∓∞ at p = 0 and p = 1, NaN outside [0, 1].
pub fn quantile(p: f64) -> f64 {
    if p.is_nan() || !(0.0..=1.0).contains(&p) {
        return f64::NAN;
    }
    if p == 0.0 {
        return f64::NEG_INFINITY;
    }
    if p == 1.0 {
        return f64::INFINITY;
    }
    if p > 0.5 {
        // 1 - p is exact here
        return -lower_quantile(1.0 - p);
    }
    lower_quantile(p)
}

// p in (0, 0.5]
fn lower_quantile(p: f64) -> f64 {
    let mut x = initial_guess(p);
    for _ in 0..2 {
        let err = cdf(x) - p;
        let u = err / pdf(x);
        x -= u / (1.0 + 0.5 * x * u);
    }
    x
}

// Acklam's rational approximation, relative error about 1e-9.
fn initial_guess(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.38357751867269e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    const P_LOW: f64 = 0.02425;

    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Reference values from a 30-digit arbitrary precision evaluation.
    const Z975: f64 = 1.959_963_984_540_054_2;

    #[test]
    fn quantile_matches_reference() {
        assert!((quantile(0.975) - Z975).abs() < 1e-14);
        assert!((quantile(0.025) + Z975).abs() < 1e-14);
        assert_eq!(quantile(0.5), 0.0);
        assert_eq!(quantile(0.0), f64::NEG_INFINITY);
        assert_eq!(quantile(1.0), f64::INFINITY);
        assert!(quantile(1.5).is_nan());
    }

    #[test]
    fn cdf_matches_reference() {
        let table = [
            (-8.0, 6.220_960_574_271_784e-16),
            (-3.0, 1.349_898_031_630_094_5e-3),
            (-0.5, 0.308_537_538_725_986_9),
            (1.0, 0.841_344_746_068_542_9),
            (5.0, 0.999_999_713_348_428_1),
        ];
        for (x, want) in table {
            let got = cdf(x);
            assert!(((got - want) / want).abs() < 1e-14, "x={x} got={got} want={want}");
        }
    }

    #[test]
    fn round_trip_is_tight() {
        for i in 1..20_000 {
            let p = i as f64 / 20_000.0;
            assert!((cdf(quantile(p)) - p).abs() < 1e-15, "p={p}");
        }
        for p in [1e-300, 1e-100, 1e-20, 1e-10, 1e-5] {
            let rel = (cdf(quantile(p)) - p).abs() / p;
            assert!(rel < 1e-12, "p={p} rel={rel}");
        }
    }
}
