//! Scalar numerics shared by the pricers and the calibrator.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{Error, Result};

/// Standard normal cumulative distribution function.
///
/// Evaluated through the complementary error function so that both tails
/// keep full relative precision.
pub fn norm_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}

pub fn norm_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// Brent's method on a bracket `[a, b]` with `f(a)` and `f(b)` of opposite
/// sign. Stops when the bracket is narrower than `xtol` (plus a few ulps of
/// the iterate) or `f` hits zero exactly.
pub fn brent<F>(mut f: F, a: f64, b: f64, xtol: f64, max_iter: usize) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let (mut a, mut b) = (a, b);
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::Numerical(format!(
            "root not bracketed on [{a}, {b}]: f(a)={fa:e}, f(b)={fb:e}"
        )));
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol;
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b);
    }
    Err(Error::Numerical(format!(
        "Brent iteration did not converge in {max_iter} steps"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    // Reference values from mpmath at 50 digits: ncdf(x).
    const CDF_ORACLE: &[(f64, f64)] = &[
        (0.0, 0.5),
        (0.005, 0.501_994_703_090_740_82),
        (1.0, 0.841_344_746_068_542_95),
        (-1.0, 0.158_655_253_931_457_05),
        (2.5, 0.993_790_334_674_223_86),
        (-3.0, 0.001_349_898_031_630_094_5),
        (-8.0, 6.220_960_574_271_784e-16),
        (6.0, 0.999_999_999_013_412_35),
    ];

    #[test]
    fn cdf_matches_high_precision_oracle() {
        for &(x, want) in CDF_ORACLE {
            let got = norm_cdf(x);
            assert!((got - want).abs() < 1e-15, "x={x}: {got} vs {want}");
        }
    }

    #[test]
    fn cdf_symmetry() {
        for i in 0..200 {
            let x = -10.0 + 0.1 * i as f64;
            assert!((norm_cdf(x) + norm_cdf(-x) - 1.0).abs() < 2e-16);
        }
    }

    #[test]
    fn brent_finds_cubic_root() {
        let r = brent(|x| x * x * x - 2.0, 0.0, 2.0, 1e-15, 100).unwrap();
        assert!((r - 2f64.cbrt()).abs() < 1e-14);
    }

    #[test]
    fn brent_rejects_unbracketed() {
        assert!(brent(|x| x * x + 1.0, -1.0, 1.0, 1e-12, 50).is_err());
    }
}
