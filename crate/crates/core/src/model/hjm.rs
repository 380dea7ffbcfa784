//! Checks linking the discrete model to its continuous-tenor limit: the
//! real-bond consistency condition and the real-forward drift it implies.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Central-difference step in maturity for the infinitesimal checks.
pub const FD_STEP: f64 = 1e-4;

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `(Σ_R(t,T2) - Σ_R(t,T1)) · (Σ(t,T1) - Σ_R(t,T1))`, zero for an
/// arbitrage-free pair of nominal and real bond volatilities.
pub fn consistency_residual<N, R>(sigma: N, sigma_real: R, t: f64, t1: f64, t2: f64) -> f64
where
    N: Fn(f64, f64) -> Vec<f64>,
    R: Fn(f64, f64) -> Vec<f64>,
{
    let r1 = sigma_real(t, t1);
    let r2 = sigma_real(t, t2);
    dot(&sub(&r2, &r1), &sub(&sigma(t, t1), &r1))
}

/// Infinitesimal form `∂_T Σ_R(t,T) · Σ_I(t,T)` with `Σ_I = Σ - Σ_R`, the
/// derivative taken by central difference with step [`FD_STEP`].
pub fn consistency_rate<N, R>(sigma: N, sigma_real: R, t: f64, maturity: f64) -> f64
where
    N: Fn(f64, f64) -> Vec<f64>,
    R: Fn(f64, f64) -> Vec<f64>,
{
    let h = FD_STEP;
    let up = sigma_real(t, maturity + h);
    let dn = sigma_real(t, maturity - h);
    let deriv: Vec<f64> = up
        .iter()
        .zip(&dn)
        .map(|(u, d)| (u - d) / (2.0 * h))
        .collect();
    let r = sigma_real(t, maturity);
    dot(&deriv, &sub(&sigma(t, maturity), &r))
}

/// Drift of `dF_R / F_R` for the forward real-bond price, computed two ways:
/// as a `T1`-forward-measure martingale (nominal bond numeraire) and from the
/// real-bond dynamics directly. The two agree exactly when the consistency
/// residual vanishes; their difference is minus that residual.
pub fn real_forward_drifts<N, R>(sigma: N, sigma_real: R, t: f64, t1: f64, t2: f64) -> (f64, f64)
where
    N: Fn(f64, f64) -> Vec<f64>,
    R: Fn(f64, f64) -> Vec<f64>,
{
    let r1 = sigma_real(t, t1);
    let dv = sub(&sigma_real(t, t2), &r1);
    (-dot(&dv, &sigma(t, t1)), -dot(&dv, &r1))
}

const GL_NODES: [f64; 8] = [
    -0.960_289_856_497_536_2,
    -0.796_666_477_413_626_7,
    -0.525_532_409_916_329_0,
    -0.183_434_642_495_649_8,
    0.183_434_642_495_649_8,
    0.525_532_409_916_329_0,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_2,
];
const GL_WEIGHTS: [f64; 8] = [
    0.101_228_536_290_376_3,
    0.222_381_034_453_374_5,
    0.313_706_645_877_887_3,
    0.362_683_783_378_362_0,
    0.362_683_783_378_362_0,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

/// `∫_a^b v(s) ds` for a vector-valued integrand, composite 8-point
/// Gauss–Legendre on panels of at most 1/8 year.
pub fn integrate<V: Fn(f64) -> Vec<f64>>(v: V, a: f64, b: f64, dim: usize) -> Vec<f64> {
    let mut out = vec![0.0; dim];
    if b <= a {
        return out;
    }
    let panels = ((b - a) * 8.0).ceil().max(1.0) as usize;
    let w = (b - a) / panels as f64;
    for p in 0..panels {
        let lo = a + w * p as f64;
        for (x, wt) in GL_NODES.iter().zip(GL_WEIGHTS) {
            let s = lo + 0.5 * w * (x + 1.0);
            for (o, y) in out.iter_mut().zip(v(s)) {
                *o += 0.5 * w * wt * y;
            }
        }
    }
    out
}

/// Instantaneous forward-rate volatilities `σ(t,T)` (nominal) and
/// `σ^(I)(t,T)` (inflation), as loadings on `factors` independent
/// Brownian motions.
pub struct ForwardVols<N, I> {
    pub factors: usize,
    pub nominal: N,
    pub inflation: I,
}

impl<N, I> ForwardVols<N, I>
where
    N: Fn(f64, f64) -> Vec<f64>,
    I: Fn(f64, f64) -> Vec<f64>,
{
    /// `Σ(t,T) = -∫_t^T σ(t,s) ds`.
    pub fn bond_vol(&self, t: f64, maturity: f64) -> Vec<f64> {
        integrate(|s| (self.nominal)(t, s), t, maturity, self.factors)
            .into_iter()
            .map(|x| -x)
            .collect()
    }

    /// `Σ_I(t,T) = -∫_t^T σ^(I)(t,s) ds`.
    pub fn inflation_bond_vol(&self, t: f64, maturity: f64) -> Vec<f64> {
        integrate(|s| (self.inflation)(t, s), t, maturity, self.factors)
            .into_iter()
            .map(|x| -x)
            .collect()
    }

    /// `Σ_R = Σ - Σ_I`, with zero CPI volatility.
    pub fn real_bond_vol(&self, t: f64, maturity: f64) -> Vec<f64> {
        sub(
            &self.bond_vol(t, maturity),
            &self.inflation_bond_vol(t, maturity),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JyReport {
    /// Largest `|∂_T Σ_R · Σ_I|` over the checked maturities.
    pub consistency: f64,
    /// Largest deviation of the finite-difference `σ_R` from `σ - σ^(I)`.
    pub sigma_real_error: f64,
    /// Largest gap between the real-forward drift obtained by subtracting
    /// the nominal and inflation forward dynamics and the foreign-currency
    /// analogy drift `σ_R · ∫σ_R` (CPI volatility zero).
    pub drift_mismatch: f64,
    pub maturities: Vec<f64>,
}

/// Checks, at time `t` and maturities spread over `(t, t + horizon]`, that
/// the real forward rate implied by the nominal and inflation forward-rate
/// volatilities follows the foreign-currency-analogy dynamics with zero CPI
/// volatility. Fails fast with [`Error::ConsistencyViolated`] when the
/// surface breaks the consistency condition by more than `tolerance`.
pub fn jy_drift_check<N, I>(
    vols: &ForwardVols<N, I>,
    t: f64,
    horizon: f64,
    epsilon: f64,
    tolerance: f64,
) -> Result<JyReport>
where
    N: Fn(f64, f64) -> Vec<f64>,
    I: Fn(f64, f64) -> Vec<f64>,
{
    if !(horizon > 2.0 * epsilon && epsilon > 0.0) {
        return Err(Error::invalid(format!(
            "need horizon > 2·epsilon > 0, got horizon {horizon}, epsilon {epsilon}"
        )));
    }
    let maturities: Vec<f64> = (1..=16).map(|m| t + horizon * m as f64 / 16.0).collect();
    let sr = |u: f64| vols.real_bond_vol(t, u);

    let mut consistency = 0.0f64;
    for &u in &maturities {
        let up = sr(u + epsilon);
        let dn = sr(u - epsilon);
        let deriv: Vec<f64> = up
            .iter()
            .zip(&dn)
            .map(|(a, b)| (a - b) / (2.0 * epsilon))
            .collect();
        consistency = consistency.max(dot(&deriv, &vols.inflation_bond_vol(t, u)).abs());
    }
    if consistency > tolerance {
        return Err(Error::ConsistencyViolated {
            residual: consistency,
            tolerance,
        });
    }

    let mut sigma_real_error = 0.0f64;
    let mut drift_mismatch = 0.0f64;
    for &u in &maturities {
        let up = sr(u + epsilon);
        let dn = sr(u - epsilon);
        let sigma_r_fd: Vec<f64> = up
            .iter()
            .zip(&dn)
            .map(|(a, b)| -(a - b) / (2.0 * epsilon))
            .collect();
        let sigma_r = sub(&(vols.nominal)(t, u), &(vols.inflation)(t, u));
        sigma_real_error = sigma_real_error.max(
            sub(&sigma_r_fd, &sigma_r)
                .iter()
                .fold(0.0, |m, x| m.max(x.abs())),
        );

        // nominal minus inflation forward drift: (σ - σ^(I)) · ∫σ
        let int_sigma: Vec<f64> = vols.bond_vol(t, u).iter().map(|x| -x).collect();
        let reconstructed = dot(&sigma_r_fd, &int_sigma);
        // σ_R · (∫σ_R - σ_I(t)) with σ_I(t) = 0 and ∫σ_R = -Σ_R
        let int_sigma_r: Vec<f64> = sr(u).iter().map(|x| -x).collect();
        let analogy = dot(&sigma_r_fd, &int_sigma_r);
        drift_mismatch = drift_mismatch.max((reconstructed - analogy).abs());
    }
    Ok(JyReport {
        consistency,
        sigma_real_error,
        drift_mismatch,
        maturities,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_smooth_functions() {
        let v = integrate(|s| vec![s.exp(), s * s], 0.0, 2.3, 2);
        assert!((v[0] - (2.3f64.exp() - 1.0)).abs() < 1e-13);
        assert!((v[1] - 2.3f64.powi(3) / 3.0).abs() < 1e-13);
    }

    #[test]
    fn residual_vanishes_without_inflation_vol() {
        let s = |_t: f64, u: f64| vec![-0.1 * u, 0.02 * u * u];
        assert_eq!(consistency_residual(s, s, 0.0, 1.0, 3.0), 0.0);
    }

    #[test]
    fn residual_vanishes_for_flat_real_vol() {
        let s = |_t: f64, u: f64| vec![-0.1 * u, 0.0];
        let r = |_t: f64, _u: f64| vec![0.03, -0.01];
        assert_eq!(consistency_residual(s, r, 0.0, 1.0, 3.0), 0.0);
    }

    #[test]
    fn residual_is_linear_in_cross_factor_perturbation() {
        // Σ_R moves in factor 1 only, Σ_I = Σ - Σ_R sits in factor 2;
        // leaking ε of Σ_I into factor 1 gives ε · ‖ΔΣ_R‖ (here ΔΣ_R = -0.2).
        for eps in [1e-3, 1e-2, 1e-1] {
            let r = |_t: f64, u: f64| vec![-0.1 * u, 0.0];
            let s = move |_t: f64, u: f64| vec![-0.1 * u + eps, 0.05];
            let res = consistency_residual(s, r, 0.0, 1.0, 3.0);
            assert!((res - eps * -0.2).abs() < 1e-15, "{res}");
        }
    }

    #[test]
    fn drifts_differ_by_the_residual() {
        let r = |_t: f64, u: f64| vec![-0.1 * u, 0.01 * u];
        let s = |_t: f64, u: f64| vec![-0.12 * u, 0.04];
        let (a, b) = real_forward_drifts(s, r, 0.0, 1.0, 2.0);
        let res = consistency_residual(s, r, 0.0, 1.0, 2.0);
        assert!((a - b + res).abs() < 1e-16);
    }

    #[test]
    fn zero_inflation_vol_reduces_to_nominal_hjm() {
        let vols = ForwardVols {
            factors: 2,
            nominal: |_t: f64, u: f64| vec![0.01 + 0.002 * u, 0.005 * (-u).exp()],
            inflation: |_t: f64, _u: f64| vec![0.0, 0.0],
        };
        let rep = jy_drift_check(&vols, 0.0, 5.0, FD_STEP, 1e-10).unwrap();
        assert_eq!(rep.consistency, 0.0);
        assert!(rep.drift_mismatch < 1e-15);
        assert!(rep.sigma_real_error < 1e-8);
    }

    #[test]
    fn flat_inflation_vol_without_nominal_vol_breaks_consistency() {
        let vols = ForwardVols {
            factors: 1,
            nominal: |_t: f64, _u: f64| vec![0.0],
            inflation: |_t: f64, _u: f64| vec![0.01],
        };
        let err = jy_drift_check(&vols, 0.0, 5.0, FD_STEP, 1e-10).unwrap_err();
        assert!(matches!(err, Error::ConsistencyViolated { .. }));
    }
}
