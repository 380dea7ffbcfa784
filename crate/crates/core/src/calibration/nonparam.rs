use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::calibration::sqp::{self, IterationRecord, Nlp, SolverSettings};
use crate::calibration::{CalibrationTarget, TargetKind, TargetResidual};
use crate::curves::InflationCurve;
use crate::error::{Error, Result};
use crate::math::norm_pdf;
use crate::model::{CorrelationSpec, VolSurface};
use crate::pricing::{black_call, displace, price_cap_span, swap_rate_view, SwaptionVariance};

/// Inflation loadings are solved for in percent so that all unknowns are of
/// order one.
const G_SCALE: f64 = 0.01;

/// How the nominal/inflation correlation enters a calibration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum CorrelationMode {
    /// Given correlation: one value for all periods or one per period.
    Fixed { rho: Vec<f64> },
    /// Piecewise-constant correlation solved jointly with the loadings.
    Solve { initial: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CalibrationSettings {
    /// Weight of squared differences between neighbouring loadings.
    pub alpha: f64,
    /// Weight of squared differences between neighbouring correlations.
    pub beta: f64,
    pub correlation: CorrelationMode,
    /// One loading per forward, constant in calendar time.
    pub time_homogeneous: bool,
    pub solver: SolverSettings,
}

impl Default for CalibrationSettings {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            beta: 1.0,
            correlation: CorrelationMode::Fixed { rho: vec![-0.0535] },
            time_homogeneous: true,
            solver: SolverSettings::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationResult {
    pub surface: VolSurface,
    /// Per-period correlation when it was solved for.
    pub rho: Option<Vec<f64>>,
    pub residuals: Vec<TargetResidual>,
    /// Regulariser value at the solution.
    pub objective: f64,
    pub converged: bool,
    pub message: String,
    /// Largest relative constraint violation seen by the solver.
    pub max_violation: f64,
    /// Scaled norm of the Lagrangian gradient at the solution.
    pub stationarity: f64,
    pub iterations: Vec<IterationRecord>,
}

impl CalibrationResult {
    pub fn max_relative_residual(&self) -> f64 {
        self.residuals
            .iter()
            .fold(0.0, |m, r| m.max(r.relative.abs()))
    }
}

/// `Σ_terms τ (G² + 2ρcG + c²)` with `G = Σ coef · z[var]`: the total
/// variance of a caplet or a frozen-coefficient swap rate.
#[derive(Debug, Clone)]
struct Term {
    tau: f64,
    period: usize,
    coeffs: Vec<(usize, f64)>,
    c: f64,
}

#[derive(Debug, Clone, Default)]
struct Form {
    terms: Vec<Term>,
}

struct CapletForm {
    form: Form,
    scale: f64,
    mu: f64,
    k: f64,
}

enum Equation {
    Variance {
        form: Form,
        target: f64,
        weight: f64,
    },
    Cap {
        caplets: Vec<CapletForm>,
        target: f64,
        weight: f64,
    },
}

struct Problem {
    n: usize,
    rho_var: Vec<Option<usize>>,
    rho_fixed: Vec<f64>,
    lo: Vec<f64>,
    hi: Vec<f64>,
    g_pairs: Vec<(usize, usize)>,
    rho_pairs: Vec<(usize, usize)>,
    alpha: f64,
    beta: f64,
    f_scale: f64,
    equations: Vec<Equation>,
}

impl Problem {
    fn rho(&self, z: &[f64], period: usize) -> f64 {
        match self.rho_var[period - 1] {
            Some(v) => z[v],
            None => self.rho_fixed[period - 1],
        }
    }

    fn form_value(&self, f: &Form, z: &[f64]) -> f64 {
        f.terms
            .iter()
            .map(|t| {
                let g: f64 = t.coeffs.iter().map(|(v, a)| a * z[*v]).sum();
                let r = self.rho(z, t.period);
                t.tau * (g * g + 2.0 * r * t.c * g + t.c * t.c)
            })
            .sum()
    }

    fn form_grad(&self, f: &Form, z: &[f64], scale: f64, out: &mut [f64]) {
        for t in &f.terms {
            let g: f64 = t.coeffs.iter().map(|(v, a)| a * z[*v]).sum();
            let r = self.rho(z, t.period);
            for (v, a) in &t.coeffs {
                out[*v] += scale * t.tau * (2.0 * g + 2.0 * r * t.c) * a;
            }
            if let Some(rv) = self.rho_var[t.period - 1] {
                out[rv] += scale * t.tau * 2.0 * t.c * g;
            }
        }
    }

    fn form_hessian(&self, f: &Form, scale: f64, h: &mut DMatrix<f64>) {
        for t in &f.terms {
            for (u, au) in &t.coeffs {
                for (v, av) in &t.coeffs {
                    h[(*u, *v)] += scale * 2.0 * t.tau * au * av;
                }
                if let Some(rv) = self.rho_var[t.period - 1] {
                    let x = scale * 2.0 * t.tau * t.c * au;
                    h[(*u, rv)] += x;
                    h[(rv, *u)] += x;
                }
            }
        }
    }

    fn dense_grad(&self, f: &Form, z: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; self.n];
        self.form_grad(f, z, 1.0, &mut g);
        g
    }
}

/// Value, first and second derivative in total variance of
/// `scale·Black(μ, K, √v)`.
fn black_in_variance(c: &CapletForm, v: f64) -> (f64, f64, f64) {
    let v = v.max(1e-30);
    let sd = v.sqrt();
    let x = (c.mu / c.k).ln();
    let d1 = x / sd + 0.5 * sd;
    let price = c.scale * black_call(c.mu, c.k, sd);
    let first = c.scale * c.mu * norm_pdf(d1) / (2.0 * sd);
    let d1_v = -x / (2.0 * v * sd) + 1.0 / (4.0 * sd);
    let second = first * (-d1 * d1_v - 0.5 / v);
    (price, first, second)
}

impl Nlp for Problem {
    fn dim(&self) -> usize {
        self.n
    }

    fn bounds(&self) -> (Vec<f64>, Vec<f64>) {
        (self.lo.clone(), self.hi.clone())
    }

    fn objective(&self, z: &[f64]) -> (f64, DVector<f64>, DMatrix<f64>) {
        let mut f = 0.0;
        let mut g = DVector::zeros(self.n);
        let mut h = DMatrix::zeros(self.n, self.n);
        let ga = self.alpha * G_SCALE * G_SCALE / self.f_scale;
        let rb = self.beta / self.f_scale;
        for (pairs, w) in [(&self.g_pairs, ga), (&self.rho_pairs, rb)] {
            for &(a, b) in pairs {
                let d = z[a] - z[b];
                f += w * d * d;
                g[a] += 2.0 * w * d;
                g[b] -= 2.0 * w * d;
                h[(a, a)] += 2.0 * w;
                h[(b, b)] += 2.0 * w;
                h[(a, b)] -= 2.0 * w;
                h[(b, a)] -= 2.0 * w;
            }
        }
        (f, g, h)
    }

    fn constraints(&self, z: &[f64]) -> (DVector<f64>, DMatrix<f64>) {
        let m = self.equations.len();
        let mut c = DVector::zeros(m);
        let mut j = DMatrix::zeros(m, self.n);
        for (k, eq) in self.equations.iter().enumerate() {
            let mut row = vec![0.0; self.n];
            match eq {
                Equation::Variance {
                    form,
                    target,
                    weight,
                } => {
                    c[k] = weight * (self.form_value(form, z) - target) / target;
                    self.form_grad(form, z, weight / target, &mut row);
                }
                Equation::Cap {
                    caplets,
                    target,
                    weight,
                } => {
                    let mut price = 0.0;
                    for cf in caplets {
                        let (p, d1, _) = black_in_variance(cf, self.form_value(&cf.form, z));
                        price += p;
                        self.form_grad(&cf.form, z, weight * d1 / target, &mut row);
                    }
                    c[k] = weight * (price - target) / target;
                }
            }
            for (i, x) in row.into_iter().enumerate() {
                j[(k, i)] = x;
            }
        }
        (c, j)
    }

    fn constraint_hessian(&self, z: &[f64], lambda: &DVector<f64>) -> DMatrix<f64> {
        let mut h = DMatrix::zeros(self.n, self.n);
        for (k, eq) in self.equations.iter().enumerate() {
            let l = lambda[k];
            if l == 0.0 {
                continue;
            }
            match eq {
                Equation::Variance {
                    form,
                    target,
                    weight,
                } => self.form_hessian(form, l * weight / target, &mut h),
                Equation::Cap {
                    caplets,
                    target,
                    weight,
                } => {
                    let s = l * weight / target;
                    for cf in caplets {
                        let (_, d1, d2) = black_in_variance(cf, self.form_value(&cf.form, z));
                        self.form_hessian(&cf.form, s * d1, &mut h);
                        let gv = self.dense_grad(&cf.form, z);
                        for a in 0..self.n {
                            if gv[a] == 0.0 {
                                continue;
                            }
                            for b in 0..self.n {
                                h[(a, b)] += s * d2 * gv[a] * gv[b];
                            }
                        }
                    }
                }
            }
        }
        h
    }
}

/// Scalar nominal loading of forward `k` over period `p`, requiring the
/// two-factor layout with nominal rates on the first factor.
fn nominal_scalar(base: &VolSurface, k: usize, p: usize) -> f64 {
    base.nominal_loading(k, p)[0]
}

fn check_base(base: &VolSurface) -> Result<()> {
    if base.factors() != 2 {
        return Err(Error::invalid(format!(
            "calibration works on the two-factor model, surface has {} factors",
            base.factors()
        )));
    }
    let n = base.grid().periods();
    for k in 0..n {
        for p in 1..=n {
            if base.nominal_loading(k, p)[1] != 0.0 {
                return Err(Error::invalid(
                    "calibration expects nominal loadings on the first factor only",
                ));
            }
        }
    }
    Ok(())
}

struct Layout {
    /// `g_var[j - 1][p - 1]`.
    g_var: Vec<Vec<Option<usize>>>,
    rho_var: Vec<Option<usize>>,
    rho_fixed: Vec<f64>,
    n: usize,
    homogeneous_var: Vec<Option<usize>>,
}

fn layout(base: &VolSurface, settings: &CalibrationSettings) -> Result<Layout> {
    let grid = base.grid();
    let n_per = grid.periods();
    let live = |p: usize| grid.date(p) > 0.0;
    let mut n = 0;
    let mut g_var = vec![vec![None; n_per]; n_per];
    let mut homogeneous_var = vec![None; n_per];
    for j in 1..=n_per {
        if !live(j) {
            continue;
        }
        if settings.time_homogeneous {
            homogeneous_var[j - 1] = Some(n);
            for p in 1..=j {
                if live(p) {
                    g_var[j - 1][p - 1] = Some(n);
                }
            }
            n += 1;
        } else {
            for p in 1..=j {
                if live(p) {
                    g_var[j - 1][p - 1] = Some(n);
                    n += 1;
                }
            }
        }
    }
    let mut rho_var = vec![None; n_per];
    let rho_fixed = match &settings.correlation {
        CorrelationMode::Fixed { rho } => {
            CorrelationSpec::TwoFactor { rho: rho.clone() }.validate()?;
            match rho.len() {
                1 => vec![rho[0]; n_per],
                l if l == n_per => rho.clone(),
                l => {
                    return Err(Error::invalid(format!(
                        "correlation needs 1 or {n_per} values, got {l}"
                    )))
                }
            }
        }
        CorrelationMode::Solve { initial } => {
            if !(-1.0..=1.0).contains(initial) {
                return Err(Error::invalid(format!(
                    "initial correlation {initial} outside [-1, 1]"
                )));
            }
            for (p, slot) in rho_var.iter_mut().enumerate() {
                if live(p + 1) {
                    *slot = Some(n);
                    n += 1;
                }
            }
            vec![*initial; n_per]
        }
    };
    Ok(Layout {
        g_var,
        rho_var,
        rho_fixed,
        n,
        homogeneous_var,
    })
}

fn caplet_form(base: &VolSurface, lay: &Layout, j: usize) -> Form {
    let grid = base.grid();
    let terms = (1..=j)
        .filter_map(|p| {
            let v = lay.g_var[j - 1][p - 1]?;
            let (a, b) = grid.live_span(p);
            Some(Term {
                tau: b - a,
                period: p,
                coeffs: vec![(v, G_SCALE)],
                c: 0.0,
            })
        })
        .collect();
    Form { terms }
}

fn swaption_form(sv: &SwaptionVariance, lay: &Layout) -> Form {
    let terms = sv
        .periods
        .iter()
        .map(|(p, tau, c)| {
            let mut coeffs: Vec<(usize, f64)> = Vec::new();
            for (idx, a) in sv.alphas.iter().enumerate() {
                let i = sv.start + 1 + idx;
                if let Some(v) = lay.g_var[i - 1][p - 1] {
                    coeffs.push((v, a * G_SCALE));
                }
            }
            Term {
                tau: *tau,
                period: *p,
                coeffs,
                c: c[0],
            }
        })
        .collect();
    Form { terms }
}

/// Regularised non-parametric calibration of the inflation loadings.
///
/// Minimises `α Σ (γ_a - γ_b)²` over neighbouring loading pieces (in both
/// maturity and calendar time when loadings vary in time) plus
/// `β Σ (ρ_i - ρ_{i-1})²` when correlations are solved for, subject to
/// reproducing every target. `base` supplies the grid and the nominal
/// loadings (two-factor layout); its inflation loadings are ignored.
pub fn calibrate_nonparametric(
    curves: &InflationCurve,
    base: &VolSurface,
    targets: &[CalibrationTarget],
    settings: &CalibrationSettings,
) -> Result<CalibrationResult> {
    check_base(base)?;
    if targets.is_empty() {
        return Err(Error::invalid("calibration needs at least one target"));
    }
    if !(settings.alpha > 0.0) {
        return Err(Error::invalid("alpha must be positive"));
    }
    let solving = matches!(settings.correlation, CorrelationMode::Solve { .. });
    if solving && !(settings.beta > 0.0) {
        return Err(Error::invalid(
            "beta must be positive when solving for correlation",
        ));
    }
    let grid = base.grid().clone();
    let n_per = grid.periods();
    let lay = layout(base, settings)?;
    let fwd = curves.nominal().forwards_on(&grid)?;

    let mut equations = Vec::with_capacity(targets.len());
    let mut swaption_vars: Vec<Option<SwaptionVariance>> = Vec::new();
    for t in targets {
        if !(t.value.is_finite() && t.value > 0.0 && t.weight > 0.0) {
            return Err(Error::invalid(format!(
                "target {} has value {} and weight {}",
                t.label(),
                t.value,
                t.weight
            )));
        }
        let mut sv_slot = None;
        let eq = match t.kind {
            TargetKind::CapletVol { index: j } => {
                if j == 0 || j > n_per || grid.date(j) <= 0.0 {
                    return Err(Error::invalid(format!(
                        "target {}: caplet is not live",
                        t.label()
                    )));
                }
                Equation::Variance {
                    form: caplet_form(base, &lay, j),
                    target: t.value * t.value * grid.date(j),
                    weight: t.weight,
                }
            }
            TargetKind::CapPrice { start, end, strike } => {
                if !(start < end && end <= n_per) {
                    return Err(Error::invalid(format!(
                        "target {}: span outside the grid",
                        t.label()
                    )));
                }
                let mut caplets = Vec::new();
                let (mut lower, mut upper) = (0.0, 0.0);
                for j in (start + 1).max(grid.first_live())..=end {
                    let tj = grid.date(j);
                    let acc = grid.accrual(j);
                    let f = curves.inflation_forward(grid.date(j - 1), tj)?;
                    let (mu, k) = displace(acc, f, strike)?;
                    let scale = acc * curves.nominal().discount(tj)?;
                    lower += scale * (mu - k).max(0.0);
                    upper += scale * mu;
                    caplets.push(CapletForm {
                        form: caplet_form(base, &lay, j),
                        scale,
                        mu,
                        k,
                    });
                }
                if !(t.value > lower && t.value < upper) {
                    return Err(Error::BandViolation {
                        price: t.value,
                        lower,
                        upper,
                    });
                }
                Equation::Cap {
                    caplets,
                    target: t.value,
                    weight: t.weight,
                }
            }
            TargetKind::SwaptionVol { start, end } => {
                if !(start >= 1 && start < end && end <= n_per && grid.date(start) > 0.0) {
                    return Err(Error::invalid(format!(
                        "target {}: span outside the grid",
                        t.label()
                    )));
                }
                let view = swap_rate_view(curves, &grid, start, end)?;
                let sv = SwaptionVariance::new(&view, base, &fwd)?;
                let form = swaption_form(&sv, &lay);
                sv_slot = Some(sv);
                Equation::Variance {
                    form,
                    target: t.value * t.value * grid.date(start),
                    weight: t.weight,
                }
            }
        };
        swaption_vars.push(sv_slot);
        equations.push(eq);
    }

    if solving {
        let swaptions: Vec<&Equation> = targets
            .iter()
            .zip(&equations)
            .filter(|(t, _)| matches!(t.kind, TargetKind::SwaptionVol { .. }))
            .map(|(_, e)| e)
            .collect();
        if swaptions.is_empty() {
            return Err(Error::Unidentifiable(
                "no swaption targets; caplet and cap prices do not depend on the correlation"
                    .into(),
            ));
        }
        let sensitive = swaptions.iter().any(|e| match e {
            Equation::Variance { form, .. } => form
                .terms
                .iter()
                .any(|t| t.c != 0.0 && !t.coeffs.is_empty()),
            _ => false,
        });
        if !sensitive {
            return Err(Error::Unidentifiable(
                "swaption variances have no nominal/inflation cross term, so correlation does not enter them".into(),
            ));
        }
    }

    // initial loadings: caplet-vol targets where given, their mean elsewhere
    let caplet_targets: Vec<(usize, f64)> = targets
        .iter()
        .filter_map(|t| match t.kind {
            TargetKind::CapletVol { index } => Some((index, t.value)),
            _ => None,
        })
        .collect();
    let mean_vol = if caplet_targets.is_empty() {
        0.005
    } else {
        caplet_targets.iter().map(|x| x.1).sum::<f64>() / caplet_targets.len() as f64
    };
    let mut z0 = vec![0.0; lay.n];
    for j in 1..=n_per {
        let vol = caplet_targets
            .iter()
            .find(|x| x.0 == j)
            .map(|x| x.1)
            .unwrap_or(mean_vol);
        for p in 1..=j {
            if let Some(v) = lay.g_var[j - 1][p - 1] {
                z0[v] = vol / G_SCALE;
            }
        }
    }
    for (p, v) in lay.rho_var.iter().enumerate() {
        if let Some(v) = v {
            z0[*v] = lay.rho_fixed[p];
        }
    }

    if settings.time_homogeneous {
        check_pinned_feasibility(targets, &equations, &lay, &z0, &grid)?;
    }

    let mut lo = vec![0.0; lay.n];
    let mut hi = vec![f64::INFINITY; lay.n];
    for v in lay.rho_var.iter().flatten() {
        lo[*v] = -1.0;
        hi[*v] = 1.0;
    }
    let mut g_pairs = Vec::new();
    if settings.time_homogeneous {
        let vars: Vec<usize> = lay.homogeneous_var.iter().flatten().copied().collect();
        g_pairs.extend(vars.windows(2).map(|w| (w[0], w[1])));
    } else {
        for j in 1..=n_per {
            for p in 1..=j {
                let Some(v) = lay.g_var[j - 1][p - 1] else {
                    continue;
                };
                if j >= 2 && p < j {
                    if let Some(u) = lay.g_var[j - 2][p - 1] {
                        g_pairs.push((u, v));
                    }
                }
                if p >= 2 {
                    if let Some(u) = lay.g_var[j - 1][p - 2] {
                        g_pairs.push((u, v));
                    }
                }
            }
        }
    }
    let rvars: Vec<usize> = lay.rho_var.iter().flatten().copied().collect();
    let rho_pairs = rvars.windows(2).map(|w| (w[0], w[1])).collect();
    let f_scale = settings.alpha * G_SCALE * G_SCALE + if solving { settings.beta } else { 0.0 };
    let problem = Problem {
        n: lay.n,
        rho_var: lay.rho_var.clone(),
        rho_fixed: lay.rho_fixed.clone(),
        lo,
        hi,
        g_pairs,
        rho_pairs,
        alpha: settings.alpha,
        beta: if solving { settings.beta } else { 0.0 },
        f_scale,
        equations,
    };
    let out = sqp::solve(&problem, &z0, &settings.solver);

    // assemble the surface
    let z = &out.z;
    let rho: Vec<f64> = (1..=n_per).map(|p| problem.rho(z, p)).collect();
    let surface = VolSurface::two_factor(
        grid.clone(),
        |k, p| nominal_scalar(base, k, p),
        |j, p| {
            lay.g_var[j - 1][p - 1]
                .map(|v| z[v] * G_SCALE)
                .unwrap_or(0.0)
        },
        &CorrelationSpec::TwoFactor { rho: rho.clone() },
    )?;
    let residuals = targets
        .iter()
        .zip(&swaption_vars)
        .map(|(t, sv)| residual(curves, &surface, t, sv.as_ref()))
        .collect::<Result<Vec<_>>>()?;
    Ok(CalibrationResult {
        surface,
        rho: solving.then_some(rho),
        residuals,
        objective: problem.objective(z).0 * problem.f_scale,
        converged: out.converged,
        message: out.message,
        max_violation: out.max_violation,
        stationarity: out.stationarity,
        iterations: out.log,
    })
}

/// With time-homogeneous loadings pinned by caplet-volatility targets, a
/// swaption variance can only move through the correlation; report targets
/// outside the attainable range before solving.
fn check_pinned_feasibility(
    targets: &[CalibrationTarget],
    equations: &[Equation],
    lay: &Layout,
    z0: &[f64],
    grid: &crate::curves::TenorGrid,
) -> Result<()> {
    let pinned: Vec<usize> = targets
        .iter()
        .filter_map(|t| match t.kind {
            TargetKind::CapletVol { index } => lay.homogeneous_var[index - 1],
            _ => None,
        })
        .collect();
    for (t, eq) in targets.iter().zip(equations) {
        let (TargetKind::SwaptionVol { start, .. }, Equation::Variance { form, target, .. }) =
            (t.kind, eq)
        else {
            continue;
        };
        if !form
            .terms
            .iter()
            .all(|term| term.coeffs.iter().all(|(v, _)| pinned.contains(v)))
        {
            continue;
        }
        let mut centre = 0.0;
        let mut spread = 0.0;
        for term in &form.terms {
            let g: f64 = term.coeffs.iter().map(|(v, a)| a * z0[*v]).sum();
            centre += term.tau * (g * g + term.c * term.c);
            match lay.rho_var[term.period - 1] {
                Some(_) => spread += (2.0 * term.tau * term.c * g).abs(),
                None => centre += 2.0 * term.tau * lay.rho_fixed[term.period - 1] * term.c * g,
            }
        }
        let (lo, hi) = (centre - spread, centre + spread);
        let tol = 1e-10 * target;
        if *target < lo - tol || *target > hi + tol {
            let tm = grid.date(start);
            let vol = |v: f64| (v.max(0.0) / tm).sqrt();
            return Err(Error::Infeasible {
                target: t.label(),
                requested: t.value,
                lower: vol(lo),
                upper: vol(hi),
            });
        }
    }
    Ok(())
}

fn residual(
    curves: &InflationCurve,
    surface: &VolSurface,
    t: &CalibrationTarget,
    sv: Option<&SwaptionVariance>,
) -> Result<TargetResidual> {
    let grid = surface.grid();
    let (model, left, right) = match t.kind {
        TargetKind::CapletVol { index } => {
            let var = surface.inflation_total_variance(index);
            let tj = grid.date(index);
            ((var / tj).sqrt(), t.value * t.value * tj, var)
        }
        TargetKind::SwaptionVol { start, .. } => {
            let var = sv
                .expect("swaption target carries its variance")
                .total_variance(surface);
            let tm = grid.date(start);
            ((var / tm).sqrt(), t.value * t.value * tm, var)
        }
        TargetKind::CapPrice { start, end, strike } => {
            let p = price_cap_span(curves, surface, start, end, strike, 1.0)?;
            (p, t.value, p)
        }
    };
    Ok(TargetResidual {
        target: *t,
        model,
        residual: left - right,
        relative: (left - right) / left,
    })
}

/// Piecewise correlations `ρ_i` (index `i - 1`) backed out jointly with the
/// loadings; needs swaption targets.
pub fn implied_correlation(
    curves: &InflationCurve,
    base: &VolSurface,
    targets: &[CalibrationTarget],
    settings: &CalibrationSettings,
) -> Result<Vec<f64>> {
    let mut s = settings.clone();
    if !matches!(s.correlation, CorrelationMode::Solve { .. }) {
        s.correlation = CorrelationMode::Solve { initial: 0.0 };
    }
    let r = calibrate_nonparametric(curves, base, targets, &s)?;
    if !r.converged {
        return Err(Error::Numerical(format!(
            "correlation calibration did not converge: {}",
            r.message
        )));
    }
    Ok(r.rho.expect("solved correlation"))
}
