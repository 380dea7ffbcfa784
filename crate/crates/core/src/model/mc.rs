use std::io::Write;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::MarketModel;

/// Pricing measure of a simulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Measure {
    /// Spot-LIBOR measure; numeraire is the discretely compounded money
    /// market account rolled at the grid dates.
    Spot,
    /// `T_maturity`-forward measure; numeraire `P(t, T_maturity)`.
    Forward { maturity: usize },
    /// Annuity measure of the swap over `[T_start, T_end]`; numeraire
    /// `Σ_{i=start+1}^{end} ΔT_i P(t, T_i)`.
    Annuity { start: usize, end: usize },
}

impl std::fmt::Display for Measure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Measure::Spot => write!(f, "spot"),
            Measure::Forward { maturity } => write!(f, "forward({maturity})"),
            Measure::Annuity { start, end } => write!(f, "annuity({start},{end})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct McConfig {
    pub paths: usize,
    pub steps_per_year: usize,
    pub seed: u64,
    pub antithetic: bool,
    pub measure: Measure,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            paths: 100_000,
            steps_per_year: 4,
            seed: 1,
            antithetic: true,
            measure: Measure::Spot,
        }
    }
}

/// Relative gap between a zero-variance estimate and a closed form that is
/// still read as agreement: path-wise products and sums round differently.
pub const ROUNDING_TOLERANCE: f64 = 1e-12;

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    /// Independent samples behind the estimate (antithetic pairs count once).
    pub samples: usize,
}

impl McEstimate {
    /// Number of standard errors between the estimate and `value`.
    /// With zero standard error, agreement to [`ROUNDING_TOLERANCE`]
    /// relative counts as zero; a larger gap is infinite.
    pub fn z_score(&self, value: f64) -> f64 {
        let diff = self.mean - value;
        let scale = self.mean.abs().max(value.abs());
        if diff == 0.0 || (self.std_error == 0.0 && diff.abs() <= ROUNDING_TOLERANCE * scale) {
            0.0
        } else {
            diff / self.std_error
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Acc {
    n: f64,
    mean: f64,
    m2: f64,
}

impl Acc {
    fn push(&mut self, x: f64) {
        self.n += 1.0;
        let d = x - self.mean;
        self.mean += d / self.n;
        self.m2 += d * (x - self.mean);
    }

    fn merge(&mut self, o: &Acc) {
        if o.n == 0.0 {
            return;
        }
        let n = self.n + o.n;
        let d = o.mean - self.mean;
        self.mean += d * o.n / n;
        self.m2 += o.m2 + d * d * self.n * o.n / n;
        self.n = n;
    }

    fn estimate(&self) -> McEstimate {
        let var = if self.n > 1.0 {
            self.m2 / (self.n - 1.0)
        } else {
            0.0
        };
        McEstimate {
            mean: self.mean,
            std_error: (var / self.n).sqrt(),
            samples: self.n as usize,
        }
    }
}

/// Grid-date state of one simulated path, handed to payoff functions.
///
/// Snapshots exist for grid indices `first_live - 1 ..= horizon`; the first
/// one is the valuation-date state. A forward that has fixed keeps its fixing
/// in later snapshots.
pub struct PathView<'a> {
    rows: &'a [f64],
    n: usize,
    base: usize,
    accruals: &'a [f64],
}

impl PathView<'_> {
    fn row(&self, i: usize) -> &[f64] {
        assert!(
            i >= self.base,
            "no snapshot before grid index {}",
            self.base
        );
        let w = 2 * self.n + 1;
        &self.rows[(i - self.base) * w..(i - self.base + 1) * w]
    }

    /// `f_k(T_i)`.
    pub fn nominal_forward(&self, i: usize, k: usize) -> f64 {
        self.row(i)[k]
    }

    /// `μ_j(T_i)`.
    pub fn displaced(&self, i: usize, j: usize) -> f64 {
        self.row(i)[self.n + j - 1]
    }

    /// `f^(I)_j(T_i)`.
    pub fn inflation_forward(&self, i: usize, j: usize) -> f64 {
        self.displaced(i, j) - 1.0 / self.accruals[j - 1]
    }

    /// Numeraire deflator `N(0)/N(T_i)`; multiply a payoff paid at `T_i`
    /// by this and average to get its price.
    pub fn deflator(&self, i: usize) -> f64 {
        self.row(i)[2 * self.n]
    }

    /// `P(T_i, T_l)` for `l >= i`.
    pub fn bond(&self, i: usize, l: usize) -> f64 {
        let r = self.row(i);
        (i..l)
            .map(|k| 1.0 / (1.0 + self.accruals[k] * r[k]))
            .product()
    }

    /// `A_{m,n}(T_i) = Σ_{l=m+1}^{n} ΔT_l P(T_i, T_l)` for `i <= m + 1`.
    pub fn annuity(&self, i: usize, m: usize, n: usize) -> f64 {
        let r = self.row(i);
        let mut p = 1.0;
        let mut a = 0.0;
        for k in i..n {
            p /= 1.0 + self.accruals[k] * r[k];
            if k + 1 > m {
                a += self.accruals[k] * p;
            }
        }
        a
    }

    /// `I(T_b) / I(T_a)` implied by the fixed inflation forwards,
    /// `Π_{j=a+1}^{b} ΔT_j μ_j(T_j)`; needs `b` within the horizon.
    pub fn cpi_ratio(&self, a: usize, b: usize) -> f64 {
        let r = self.row(b);
        (a + 1..=b)
            .map(|j| self.accruals[j - 1] * r[self.n + j - 1])
            .product()
    }
}

struct Plan<'a> {
    model: &'a MarketModel,
    n: usize,
    d: usize,
    first: usize,
    horizon: usize,
    /// Step end times; `times[0] = 0`.
    times: Vec<f64>,
    /// Period of the step ending at `times[s + 1]`.
    step_period: Vec<usize>,
    /// Grid index reached at time index `s`, if any.
    grid_at: Vec<Option<usize>>,
    /// `ΔT_{k+1}` at index `k`.
    accruals: Vec<f64>,
    /// Per period `i` (index `i - first`): nominal then inflation loadings,
    /// each `[n][d]`.
    nom: Vec<Vec<f64>>,
    inf: Vec<Vec<f64>>,
    nom_half: Vec<Vec<f64>>,
    inf_half: Vec<Vec<f64>>,
    measure: Measure,
    annuity0: f64,
}

impl<'a> Plan<'a> {
    fn new(model: &'a MarketModel, horizon: f64, cfg: &McConfig) -> Result<Self> {
        let grid = model.grid();
        let n = grid.periods();
        let d = model.surface().factors();
        if cfg.paths == 0 {
            return Err(Error::invalid("need at least one path"));
        }
        if cfg.antithetic && !cfg.paths.is_multiple_of(2) {
            return Err(Error::invalid(format!(
                "antithetic sampling needs an even path count, got {}",
                cfg.paths
            )));
        }
        if cfg.steps_per_year == 0 {
            return Err(Error::invalid("steps_per_year must be positive"));
        }
        if horizon > grid.last_date() + 1e-9 {
            return Err(Error::invalid(format!(
                "horizon {horizon} beyond the last grid date {}",
                grid.last_date()
            )));
        }
        let h = grid.require_index(horizon)?;
        let first = grid.first_live();
        if h < first {
            return Err(Error::invalid(format!(
                "horizon {horizon} is not after the valuation date"
            )));
        }
        let annuity0 = match cfg.measure {
            Measure::Spot => 0.0,
            Measure::Forward { maturity } => {
                if maturity > n || maturity < h {
                    return Err(Error::invalid(format!(
                        "forward measure maturity {maturity} must lie in [{h}, {n}]"
                    )));
                }
                0.0
            }
            Measure::Annuity { start, end } => {
                if !(start < end && end <= n && start >= h) {
                    return Err(Error::invalid(format!(
                        "annuity measure ({start}, {end}) needs {h} <= start < end <= {n}"
                    )));
                }
                (start + 1..=end)
                    .map(|l| grid.accrual(l) * model.discount(l))
                    .sum()
            }
        };

        let mut times = vec![0.0];
        let mut step_period = Vec::new();
        let mut grid_at = vec![Some(first - 1)];
        for i in first..=h {
            let (a, b) = grid.live_span(i);
            let m = ((b - a) * cfg.steps_per_year as f64 - 1e-9).ceil().max(1.0) as usize;
            for s in 1..=m {
                times.push(if s == m {
                    b
                } else {
                    a + (b - a) * s as f64 / m as f64
                });
                step_period.push(i);
                grid_at.push(if s == m { Some(i) } else { None });
            }
        }

        let accruals: Vec<f64> = (1..=n).map(|j| grid.accrual(j)).collect();
        let s = model.surface();
        let mut nom = Vec::new();
        let mut inf = Vec::new();
        let mut nom_half = Vec::new();
        let mut inf_half = Vec::new();
        for i in first..=h {
            let mut gn = vec![0.0; n * d];
            let mut gi = vec![0.0; n * d];
            for k in 0..n {
                gn[k * d..(k + 1) * d].copy_from_slice(s.nominal_loading(k, i));
                gi[k * d..(k + 1) * d].copy_from_slice(s.inflation_loading(k + 1, i));
            }
            let half = |g: &[f64]| -> Vec<f64> {
                g.chunks(d)
                    .map(|v| 0.5 * v.iter().map(|x| x * x).sum::<f64>())
                    .collect()
            };
            nom_half.push(half(&gn));
            inf_half.push(half(&gi));
            nom.push(gn);
            inf.push(gi);
        }

        Ok(Self {
            model,
            n,
            d,
            first,
            horizon: h,
            times,
            step_period,
            grid_at,
            accruals,
            nom,
            inf,
            nom_half,
            inf_half,
            measure: cfg.measure,
            annuity0,
        })
    }

    fn snapshots(&self) -> usize {
        self.horizon - self.first + 2
    }

    fn row_width(&self) -> usize {
        2 * self.n + 1
    }
}

struct Workspace {
    lnf: Vec<f64>,
    lnmu: Vec<f64>,
    f: Vec<f64>,
    sig: Vec<f64>,
    shift: Vec<f64>,
    dw: Vec<f64>,
    rows: Vec<f64>,
    money_market: f64,
}

impl Workspace {
    fn new(plan: &Plan) -> Self {
        Self {
            lnf: vec![0.0; plan.n],
            lnmu: vec![0.0; plan.n],
            f: vec![0.0; plan.n],
            sig: vec![0.0; (plan.n + 1) * plan.d],
            shift: vec![0.0; plan.d],
            dw: vec![0.0; plan.d],
            rows: vec![0.0; plan.snapshots() * plan.row_width()],
            money_market: 1.0,
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Simulates one path, filling the snapshot rows; `record` sees the state
/// after every time step (time index, forwards, displaced rates).
fn run_path<R: Rng, F: FnMut(usize, &[f64], &[f64])>(
    plan: &Plan,
    rng: &mut R,
    sign: f64,
    ws: &mut Workspace,
    mut record: F,
) {
    let (n, d) = (plan.n, plan.d);
    let m = plan.model;
    for k in 0..n {
        ws.f[k] = m.nominal_forwards()[k];
        ws.lnf[k] = ws.f[k].ln();
        ws.lnmu[k] = m.displaced(k + 1).ln();
    }
    ws.money_market = 1.0;
    record(0, &ws.f, &ws.lnmu);
    snapshot(plan, ws, plan.first - 1);

    for (s, &i) in plan.step_period.iter().enumerate() {
        let dt = plan.times[s + 1] - plan.times[s];
        let sq = dt.sqrt();
        let p = i - plan.first;
        let (gn, gi) = (&plan.nom[p], &plan.inf[p]);

        // bond vols Σ_l, l = i..=n, stored at sig[l * d]
        ws.sig[i * d..(i + 1) * d].fill(0.0);
        for k in i..n {
            let x = plan.accruals[k] * ws.f[k];
            let w = x / (1.0 + x);
            for c in 0..d {
                ws.sig[(k + 1) * d + c] = ws.sig[k * d + c] - w * gn[k * d + c];
            }
        }
        match plan.measure {
            Measure::Spot => ws.shift.fill(0.0),
            Measure::Forward { maturity } => ws
                .shift
                .copy_from_slice(&ws.sig[maturity * d..(maturity + 1) * d]),
            Measure::Annuity { start, end } => {
                ws.shift.fill(0.0);
                let mut pl = 1.0;
                let mut total = 0.0;
                for k in i..end {
                    pl /= 1.0 + plan.accruals[k] * ws.f[k];
                    let l = k + 1;
                    if l > start {
                        let wgt = plan.accruals[k] * pl;
                        total += wgt;
                        for c in 0..d {
                            ws.shift[c] += wgt * ws.sig[l * d + c];
                        }
                    }
                }
                ws.shift.iter_mut().for_each(|x| *x /= total);
            }
        }
        for c in 0..d {
            let z: f64 = rng.sample(StandardNormal);
            ws.dw[c] = sign * z * sq;
        }

        for k in i..n {
            let g = &gn[k * d..(k + 1) * d];
            let mut drift = -plan.nom_half[p][k];
            for c in 0..d {
                drift += g[c] * (ws.shift[c] - ws.sig[(k + 1) * d + c]);
            }
            ws.lnf[k] += drift * dt + dot(g, &ws.dw);
            ws.f[k] = ws.lnf[k].exp();
        }
        for j in i..=n {
            let g = &gi[(j - 1) * d..j * d];
            let mut drift = -plan.inf_half[p][j - 1];
            for c in 0..d {
                drift += g[c] * (ws.shift[c] - ws.sig[j * d + c]);
            }
            ws.lnmu[j - 1] += drift * dt + dot(g, &ws.dw);
        }
        record(s + 1, &ws.f, &ws.lnmu);
        if let Some(gi) = plan.grid_at[s + 1] {
            snapshot(plan, ws, gi);
        }
    }
}

fn snapshot(plan: &Plan, ws: &mut Workspace, i: usize) {
    let n = plan.n;
    let w = plan.row_width();
    let base = plan.first - 1;
    let at_valuation = i == base;
    let deflator = if at_valuation {
        1.0
    } else {
        match plan.measure {
            Measure::Spot => {
                ws.money_market = if i == plan.first {
                    1.0 / plan.model.discount(i)
                } else {
                    ws.money_market * (1.0 + plan.accruals[i - 1] * ws.f[i - 1])
                };
                1.0 / ws.money_market
            }
            Measure::Forward { maturity } => {
                let p: f64 = (i..maturity)
                    .map(|k| 1.0 / (1.0 + plan.accruals[k] * ws.f[k]))
                    .product();
                plan.model.discount(maturity) / p
            }
            Measure::Annuity { start, end } => {
                let mut p = 1.0;
                let mut a = 0.0;
                for k in i..end {
                    p /= 1.0 + plan.accruals[k] * ws.f[k];
                    if k + 1 > start {
                        a += plan.accruals[k] * p;
                    }
                }
                plan.annuity0 / a
            }
        }
    };
    let row = &mut ws.rows[(i - base) * w..(i - base + 1) * w];
    row[..n].copy_from_slice(&ws.f);
    for j in 0..n {
        row[n + j] = ws.lnmu[j].exp();
    }
    row[2 * n] = deflator;
}

const CHUNK: usize = 512;

fn unit_rng(seed: u64, unit: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(unit as u64);
    rng
}

/// Monte Carlo estimates of `outputs` discounted payoffs.
///
/// `payoff` writes one value per output for each path; values must already
/// be multiplied by the relevant [`PathView::deflator`]. Paths are driven by
/// a ChaCha8 stream keyed by `(seed, path)` and processed in parallel
/// chunks merged in a fixed order, so results do not depend on the thread
/// count. Antithetic pairs share a stream with negated normals and count as
/// one sample.
pub fn monte_carlo<F>(
    model: &MarketModel,
    horizon: f64,
    cfg: &McConfig,
    outputs: usize,
    payoff: F,
) -> Result<Vec<McEstimate>>
where
    F: Fn(&PathView, &mut [f64]) + Sync,
{
    let plan = Plan::new(model, horizon, cfg)?;
    let units = if cfg.antithetic {
        cfg.paths / 2
    } else {
        cfg.paths
    };
    let chunks = units.div_ceil(CHUNK);
    let partial: Vec<Vec<Acc>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut ws = Workspace::new(&plan);
            let mut acc = vec![Acc::default(); outputs];
            let mut a = vec![0.0; outputs];
            let mut b = vec![0.0; outputs];
            for u in c * CHUNK..((c + 1) * CHUNK).min(units) {
                let mut rng = unit_rng(cfg.seed, u);
                run_path(&plan, &mut rng, 1.0, &mut ws, |_, _, _| {});
                payoff(&view(&plan, &ws.rows), &mut a);
                if cfg.antithetic {
                    let mut rng = unit_rng(cfg.seed, u);
                    run_path(&plan, &mut rng, -1.0, &mut ws, |_, _, _| {});
                    payoff(&view(&plan, &ws.rows), &mut b);
                    for o in 0..outputs {
                        acc[o].push(0.5 * (a[o] + b[o]));
                    }
                } else {
                    for o in 0..outputs {
                        acc[o].push(a[o]);
                    }
                }
            }
            acc
        })
        .collect();
    let mut total = vec![Acc::default(); outputs];
    for part in &partial {
        for (t, p) in total.iter_mut().zip(part) {
            t.merge(p);
        }
    }
    Ok(total.iter().map(Acc::estimate).collect())
}

fn view<'a>(plan: &'a Plan, rows: &'a [f64]) -> PathView<'a> {
    PathView {
        rows,
        n: plan.n,
        base: plan.first - 1,
        accruals: &plan.accruals,
    }
}

/// Stored simulation: every path at every time step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathSet {
    pub measure: Measure,
    pub seed: u64,
    pub n_paths: usize,
    pub steps_per_year: usize,
    pub antithetic: bool,
    times: Vec<f64>,
    /// Time index of each snapshot.
    grid_steps: Vec<usize>,
    n: usize,
    base: usize,
    accruals: Vec<f64>,
    /// `[path][step][k]`.
    nominal: Vec<f64>,
    /// `[path][step][j - 1]`.
    displaced: Vec<f64>,
    /// `[path][snapshot][..]`, the layout read by [`PathView`].
    rows: Vec<f64>,
}

/// Simulates and stores `cfg.paths` paths up to `horizon`. Paths `2p` and
/// `2p + 1` form an antithetic pair when antithetic sampling is on. Memory
/// grows as paths × steps × forwards; use [`monte_carlo`] for large runs.
pub fn simulate(model: &MarketModel, horizon: f64, cfg: &McConfig) -> Result<PathSet> {
    let plan = Plan::new(model, horizon, cfg)?;
    let steps = plan.times.len();
    let n = plan.n;
    let rw = plan.snapshots() * plan.row_width();
    let per_path = |p: usize| -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let (unit, sign) = if cfg.antithetic {
            (p / 2, if p.is_multiple_of(2) { 1.0 } else { -1.0 })
        } else {
            (p, 1.0)
        };
        let mut rng = unit_rng(cfg.seed, unit);
        let mut ws = Workspace::new(&plan);
        let mut nominal = vec![0.0; steps * n];
        let mut displaced = vec![0.0; steps * n];
        run_path(&plan, &mut rng, sign, &mut ws, |s, f, lnmu| {
            nominal[s * n..(s + 1) * n].copy_from_slice(f);
            for j in 0..n {
                displaced[s * n + j] = lnmu[j].exp();
            }
        });
        (nominal, displaced, ws.rows)
    };
    let results: Vec<_> = (0..cfg.paths).into_par_iter().map(per_path).collect();
    let mut nominal = Vec::with_capacity(cfg.paths * steps * n);
    let mut displaced = Vec::with_capacity(cfg.paths * steps * n);
    let mut rows = Vec::with_capacity(cfg.paths * rw);
    for (a, b, c) in results {
        nominal.extend(a);
        displaced.extend(b);
        rows.extend(c);
    }
    Ok(PathSet {
        measure: cfg.measure,
        seed: cfg.seed,
        n_paths: cfg.paths,
        steps_per_year: cfg.steps_per_year,
        antithetic: cfg.antithetic,
        grid_steps: (0..steps).filter(|&s| plan.grid_at[s].is_some()).collect(),
        times: plan.times,
        n,
        base: plan.first - 1,
        accruals: plan.accruals,
        nominal,
        displaced,
        rows,
    })
}

impl PathSet {
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// Number of forwards of each kind.
    pub fn forwards(&self) -> usize {
        self.n
    }

    fn at(&self, path: usize, step: usize) -> usize {
        (path * self.times.len() + step) * self.n
    }

    /// `f_k` on `path` after time step `step`.
    pub fn nominal_forward(&self, path: usize, step: usize, k: usize) -> f64 {
        self.nominal[self.at(path, step) + k]
    }

    /// `μ_j` on `path` after time step `step`.
    pub fn displaced(&self, path: usize, step: usize, j: usize) -> f64 {
        self.displaced[self.at(path, step) + j - 1]
    }

    pub fn view(&self, path: usize) -> PathView<'_> {
        let rw = self.rows.len() / self.n_paths;
        PathView {
            rows: &self.rows[path * rw..(path + 1) * rw],
            n: self.n,
            base: self.base,
            accruals: &self.accruals,
        }
    }

    /// Estimate of `E[statistic]`, pairing antithetic paths.
    pub fn estimate<F: Fn(&PathView) -> f64>(&self, statistic: F) -> McEstimate {
        let mut acc = Acc::default();
        if self.antithetic {
            for p in (0..self.n_paths).step_by(2) {
                acc.push(0.5 * (statistic(&self.view(p)) + statistic(&self.view(p + 1))));
            }
        } else {
            for p in 0..self.n_paths {
                acc.push(statistic(&self.view(p)));
            }
        }
        acc.estimate()
    }

    /// Smallest simulated `f_k` and `μ_j` over all paths and steps.
    pub fn minima(&self) -> (f64, f64) {
        let m = |v: &[f64]| v.iter().copied().fold(f64::INFINITY, f64::min);
        (m(&self.nominal), m(&self.displaced))
    }

    /// Long-format dump with columns `path,step,time,variable,value`;
    /// variables are `f_k`, `mu_j` and, at grid dates, `deflator`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::Numerical(format!("writing path csv: {e}"));
        w.write_record(["path", "step", "time", "variable", "value"])
            .map_err(io)?;
        for p in 0..self.n_paths {
            let mut snap = 0;
            for (s, t) in self.times.iter().enumerate() {
                let (ps, ss, ts) = (p.to_string(), s.to_string(), format!("{t:.16e}"));
                for k in 0..self.n {
                    let v = format!("{:.16e}", self.nominal_forward(p, s, k));
                    w.write_record([ps.as_str(), &ss, &ts, &format!("f_{k}"), &v])
                        .map_err(io)?;
                }
                for j in 1..=self.n {
                    let v = format!("{:.16e}", self.displaced(p, s, j));
                    w.write_record([ps.as_str(), &ss, &ts, &format!("mu_{j}"), &v])
                        .map_err(io)?;
                }
                if snap < self.grid_steps.len() && self.grid_steps[snap] == s {
                    let v = format!("{:.16e}", self.view(p).deflator(self.base + snap));
                    w.write_record([ps.as_str(), &ss, &ts, "deflator", &v])
                        .map_err(io)?;
                    snap += 1;
                }
            }
        }
        w.flush()
            .map_err(|e| Error::Numerical(format!("writing path csv: {e}")))?;
        Ok(())
    }
}
