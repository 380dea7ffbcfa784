//! Sequential quadratic programming for smooth objectives with equality
//! constraints and simple bounds.
//!
//! Each iteration solves the KKT system of the quadratic model built from
//! the exact Lagrangian Hessian, shifted by a multiple of the identity when
//! the model lacks curvature along the step. Steps are globalised with an ℓ1
//! merit function, Armijo backtracking and a second-order correction. Bounds
//! are handled by an active set: blocked variables are frozen at the bound
//! and released when their multiplier has the wrong sign.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

pub(crate) trait Nlp {
    fn dim(&self) -> usize;
    fn bounds(&self) -> (Vec<f64>, Vec<f64>);
    /// Objective value, gradient and Hessian.
    fn objective(&self, z: &[f64]) -> (f64, DVector<f64>, DMatrix<f64>);
    /// Constraint values and Jacobian (one row per constraint).
    fn constraints(&self, z: &[f64]) -> (DVector<f64>, DMatrix<f64>);
    /// `Σ_k λ_k ∇²c_k(z)`.
    fn constraint_hessian(&self, z: &[f64], lambda: &DVector<f64>) -> DMatrix<f64>;
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverSettings {
    pub max_iter: usize,
    /// Largest constraint violation accepted as feasible.
    pub feasibility_tol: f64,
    /// Violation the iteration keeps driving towards before stopping.
    pub feasibility_goal: f64,
    /// Projected Lagrangian-gradient size accepted as stationary, relative
    /// to the objective gradient.
    pub stationarity_tol: f64,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            max_iter: 500,
            feasibility_tol: 1e-8,
            feasibility_goal: 1e-13,
            stationarity_tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub objective: f64,
    pub merit_before: f64,
    pub merit_after: f64,
    pub max_violation: f64,
    pub stationarity: f64,
    pub step_norm: f64,
    pub step_length: f64,
    pub regularization: f64,
    pub active_bounds: usize,
}

#[derive(Debug, Clone)]
pub(crate) struct Outcome {
    pub z: Vec<f64>,
    pub log: Vec<IterationRecord>,
    pub max_violation: f64,
    pub stationarity: f64,
    pub converged: bool,
    pub message: String,
}

fn max_abs(v: &DVector<f64>) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn l1(v: &DVector<f64>) -> f64 {
    v.iter().map(|x| x.abs()).sum()
}

struct Bounds {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl Bounds {
    fn project(&self, z: &mut [f64]) {
        for (i, x) in z.iter_mut().enumerate() {
            *x = x.clamp(self.lo[i], self.hi[i]);
        }
    }
}

/// Columns of `j` and entries of vectors restricted to `free`.
fn restrict_cols(j: &DMatrix<f64>, free: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(j.nrows(), free.len(), |r, c| j[(r, free[c])])
}

/// Least-squares multipliers minimising `‖g_F + J_Fᵀ λ‖` and the size of
/// that residual.
fn ls_multipliers(g: &DVector<f64>, jf: &DMatrix<f64>, free: &[usize]) -> (DVector<f64>, f64) {
    let gf = DVector::from_iterator(free.len(), free.iter().map(|&i| g[i]));
    let m = jf.nrows();
    if m == 0 {
        return (DVector::zeros(0), max_abs(&gf));
    }
    let jjt = jf * jf.transpose() + DMatrix::identity(m, m) * 1e-300;
    let rhs = -(jf * &gf);
    let lambda = jjt.lu().solve(&rhs).unwrap_or_else(|| DVector::zeros(m));
    let r = gf + jf.transpose() * &lambda;
    (lambda, max_abs(&r))
}

/// Minimum-norm correction `q_F = -J_Fᵀ (J_F J_Fᵀ)⁻¹ c`.
fn feasibility_step(jf: &DMatrix<f64>, c: &DVector<f64>) -> Option<DVector<f64>> {
    let jjt = jf * jf.transpose();
    let y = jjt.lu().solve(c)?;
    Some(-(jf.transpose() * y))
}

pub(crate) fn solve<P: Nlp>(problem: &P, z0: &[f64], settings: &SolverSettings) -> Outcome {
    let n = problem.dim();
    let (lo, hi) = problem.bounds();
    let bounds = Bounds { lo, hi };
    let mut z = z0.to_vec();
    bounds.project(&mut z);
    let mut active: Vec<bool> = (0..n)
        .map(|i| z[i] <= bounds.lo[i] || z[i] >= bounds.hi[i])
        .collect();
    let mut nu = 1.0f64;
    let mut log = Vec::new();
    let (mut c, mut jac) = problem.constraints(&z);
    let m = c.len();
    let mut lambda = DVector::zeros(m);
    let mut converged = false;
    let mut message = String::from("iteration limit reached");
    let mut stationarity = f64::INFINITY;

    let merit = |z: &[f64], nu: f64| -> f64 {
        let (f, _, _) = problem.objective(z);
        let (c, _) = problem.constraints(z);
        f + nu * l1(&c)
    };

    for iter in 0..settings.max_iter {
        let (f, g, hf) = problem.objective(&z);
        let free: Vec<usize> = (0..n).filter(|&i| !active[i]).collect();
        let jf = restrict_cols(&jac, &free);
        let (lam_ls, stat) = ls_multipliers(&g, &jf, &free);
        stationarity = stat / g.amax().max(1.0);
        let viol = max_abs(&c);

        // release bounds whose multipliers point inward
        let full_grad = &g + jac.transpose() * &lam_ls;
        let release = (0..n)
            .filter(|&i| active[i])
            .filter(|&i| {
                let r = full_grad[i];
                (z[i] <= bounds.lo[i] && r < -1e-14) || (z[i] >= bounds.hi[i] && r > 1e-14)
            })
            .max_by(|&a, &b| full_grad[a].abs().total_cmp(&full_grad[b].abs()));

        if viol <= settings.feasibility_goal && stationarity <= settings.stationarity_tol {
            if let Some(i) = release {
                active[i] = false;
                continue;
            }
            converged = true;
            message = "converged".into();
            break;
        }

        let w = &hf + problem.constraint_hessian(&z, &lambda);
        let nf = free.len();
        let gf = DVector::from_iterator(nf, free.iter().map(|&i| g[i]));
        let mut tau = 0.0f64;
        let scale = w.amax().max(1e-12);
        let mut step = None;
        for _ in 0..60 {
            let mut k = DMatrix::zeros(nf + m, nf + m);
            for (a, &ia) in free.iter().enumerate() {
                for (b, &ib) in free.iter().enumerate() {
                    k[(a, b)] = w[(ia, ib)];
                }
                k[(a, a)] += tau;
            }
            for r in 0..m {
                for a in 0..nf {
                    k[(nf + r, a)] = jf[(r, a)];
                    k[(a, nf + r)] = jf[(r, a)];
                }
            }
            let mut rhs = DVector::zeros(nf + m);
            rhs.rows_mut(0, nf).copy_from(&(-&gf));
            rhs.rows_mut(nf, m).copy_from(&(-&c));
            if let Some(sol) = k.lu().solve(&rhs) {
                let p = sol.rows(0, nf).into_owned();
                let lam = sol.rows(nf, m).into_owned();
                let wf = DMatrix::from_fn(nf, nf, |a, b| w[(free[a], free[b])]);
                let curv = p.dot(&(&wf * &p)) + tau * p.norm_squared();
                let ok =
                    p.iter().all(|x| x.is_finite()) && curv >= 1e-10 * scale * p.norm_squared();
                if ok || p.norm() == 0.0 {
                    step = Some((p, lam));
                    break;
                }
            }
            tau = if tau == 0.0 { 1e-8 * scale } else { tau * 10.0 };
        }
        let Some((pf, lam_new)) = step else {
            message = "KKT system could not be solved".into();
            break;
        };

        let mut p = vec![0.0; n];
        for (a, &i) in free.iter().enumerate() {
            p[i] = pf[a];
        }
        let pnorm = pf.amax();
        if pnorm <= 1e-15 * z.iter().fold(1.0f64, |m, x| m.max(x.abs()))
            && viol <= settings.feasibility_tol
        {
            if let Some(i) = release {
                active[i] = false;
                continue;
            }
            converged = stationarity <= settings.stationarity_tol.max(1e-8);
            message = "step below resolution".into();
            break;
        }

        // longest step inside the box
        let mut a_max = 1.0f64;
        let mut blocking = None;
        for i in 0..n {
            if p[i] < 0.0 && z[i] + p[i] < bounds.lo[i] {
                let a = (bounds.lo[i] - z[i]) / p[i];
                if a < a_max {
                    a_max = a;
                    blocking = Some(i);
                }
            } else if p[i] > 0.0 && z[i] + p[i] > bounds.hi[i] {
                let a = (bounds.hi[i] - z[i]) / p[i];
                if a < a_max {
                    a_max = a;
                    blocking = Some(i);
                }
            }
        }

        nu = nu.max(1.1 * max_abs(&lam_new)).max(1e-12);
        let phi0 = f + nu * l1(&c);
        let deriv = gf.dot(&pf) - nu * l1(&c);
        let mut accepted: Option<(Vec<f64>, f64, f64)> = None;
        let mut a = a_max;
        for trial in 0..50 {
            let mut zt: Vec<f64> = z.iter().zip(&p).map(|(x, d)| x + a * d).collect();
            if let (0, Some(i)) = (trial, blocking) {
                zt[i] = if p[i] < 0.0 {
                    bounds.lo[i]
                } else {
                    bounds.hi[i]
                };
            }
            bounds.project(&mut zt);
            let phi = merit(&zt, nu);
            if phi <= phi0 + 1e-4 * a * deriv.min(0.0) {
                accepted = Some((zt, a, phi));
                break;
            }
            if trial == 0 {
                let (ct, _) = problem.constraints(&zt);
                if let Some(q) = feasibility_step(&jf, &ct) {
                    let mut zs = zt.clone();
                    for (b, &i) in free.iter().enumerate() {
                        zs[i] += q[b];
                    }
                    bounds.project(&mut zs);
                    let phis = merit(&zs, nu);
                    if phis <= phi0 + 1e-4 * a * deriv.min(0.0) {
                        accepted = Some((zs, a, phis));
                        break;
                    }
                }
            }
            a *= 0.5;
        }
        let Some((z_new, a, phi_new)) = accepted else {
            message = "line search failed".into();
            break;
        };
        if a == a_max && a_max < 1.0 {
            if let Some(i) = blocking {
                active[i] = true;
            }
        }
        let step_norm = z
            .iter()
            .zip(&z_new)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        z = z_new;
        lambda = lam_new;
        let (c2, j2) = problem.constraints(&z);
        c = c2;
        jac = j2;
        log.push(IterationRecord {
            iteration: iter,
            objective: problem.objective(&z).0,
            merit_before: phi0,
            merit_after: phi_new,
            max_violation: max_abs(&c),
            stationarity,
            step_norm,
            step_length: a,
            regularization: tau,
            active_bounds: active.iter().filter(|x| **x).count(),
        });
    }

    // tighten feasibility with minimum-norm Newton corrections
    for _ in 0..8 {
        let viol = max_abs(&c);
        if viol <= settings.feasibility_goal {
            break;
        }
        let free: Vec<usize> = (0..n).filter(|&i| !active[i]).collect();
        let jf = restrict_cols(&jac, &free);
        let Some(q) = feasibility_step(&jf, &c) else {
            break;
        };
        let mut zt = z.clone();
        for (b, &i) in free.iter().enumerate() {
            zt[i] += q[b];
        }
        bounds.project(&mut zt);
        let (ct, jt) = problem.constraints(&zt);
        if max_abs(&ct) >= viol {
            break;
        }
        z = zt;
        c = ct;
        jac = jt;
    }

    let max_violation = max_abs(&c);
    if converged && max_violation > settings.feasibility_tol {
        converged = false;
    }
    if !converged
        && max_violation <= settings.feasibility_tol
        && stationarity <= settings.stationarity_tol.max(1e-8)
    {
        converged = true;
    }
    Outcome {
        z,
        log,
        max_violation,
        stationarity,
        converged,
        message,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// min (x-2)² + (y-1)² s.t. x² + y² = 1, optionally x <= xmax.
    struct Circle {
        xmax: f64,
    }

    impl Nlp for Circle {
        fn dim(&self) -> usize {
            2
        }
        fn bounds(&self) -> (Vec<f64>, Vec<f64>) {
            (vec![-10.0, -10.0], vec![self.xmax, 10.0])
        }
        fn objective(&self, z: &[f64]) -> (f64, DVector<f64>, DMatrix<f64>) {
            let f = (z[0] - 2.0).powi(2) + (z[1] - 1.0).powi(2);
            let g = DVector::from_vec(vec![2.0 * (z[0] - 2.0), 2.0 * (z[1] - 1.0)]);
            (f, g, DMatrix::identity(2, 2) * 2.0)
        }
        fn constraints(&self, z: &[f64]) -> (DVector<f64>, DMatrix<f64>) {
            let c = DVector::from_vec(vec![z[0] * z[0] + z[1] * z[1] - 1.0]);
            let j = DMatrix::from_row_slice(1, 2, &[2.0 * z[0], 2.0 * z[1]]);
            (c, j)
        }
        fn constraint_hessian(&self, _z: &[f64], l: &DVector<f64>) -> DMatrix<f64> {
            DMatrix::identity(2, 2) * (2.0 * l[0])
        }
    }

    #[test]
    fn projects_onto_circle() {
        let out = solve(
            &Circle { xmax: 10.0 },
            &[0.1, -0.5],
            &SolverSettings::default(),
        );
        assert!(out.converged, "{}", out.message);
        let r = 5f64.sqrt();
        assert!((out.z[0] - 2.0 / r).abs() < 1e-12);
        assert!((out.z[1] - 1.0 / r).abs() < 1e-12);
        for rec in &out.log {
            assert!(rec.merit_after <= rec.merit_before);
        }
    }

    #[test]
    fn respects_active_bound() {
        let out = solve(
            &Circle { xmax: 0.6 },
            &[0.1, 0.9],
            &SolverSettings::default(),
        );
        assert!(out.converged, "{}", out.message);
        assert!((out.z[0] - 0.6).abs() < 1e-15);
        assert!((out.z[1] - 0.8).abs() < 1e-12);
    }
}
