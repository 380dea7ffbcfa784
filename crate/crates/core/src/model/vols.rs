use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::curves::TenorGrid;
use crate::error::{Error, Result};

/// Loadings with a larger Euclidean norm than this (per √year) are
/// rejected as probable unit errors.
pub const DEFAULT_LOADING_CAP: f64 = 5.0;

/// Factor correlation attached to a set of loadings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorrelationSpec {
    /// Loadings are already expressed on independent Brownian factors.
    Independent,
    /// Two-factor model: factor 1 drives nominal forwards, factor 2 the
    /// inflation forwards, correlated by `rho[i]` over period `i + 1`. A
    /// single entry applies to every period.
    TwoFactor { rho: Vec<f64> },
    /// Correlation matrix of the `d` factors the loadings are written on.
    Matrix(Vec<Vec<f64>>),
}

impl CorrelationSpec {
    pub fn constant(rho: f64) -> Self {
        CorrelationSpec::TwoFactor { rho: vec![rho] }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            CorrelationSpec::Independent => Ok(()),
            CorrelationSpec::TwoFactor { rho } => {
                if rho.is_empty() {
                    return Err(Error::invalid("empty correlation vector"));
                }
                if let Some(r) = rho.iter().find(|r| !(-1.0..=1.0).contains(*r)) {
                    return Err(Error::invalid(format!("correlation {r} outside [-1, 1]")));
                }
                Ok(())
            }
            CorrelationSpec::Matrix(m) => correlation_root(m).map(|_| ()),
        }
    }

    /// Correlation over period `i` (1-based) for the two-factor form.
    pub fn rho(&self, i: usize) -> Option<f64> {
        match self {
            CorrelationSpec::TwoFactor { rho } if rho.len() == 1 => Some(rho[0]),
            CorrelationSpec::TwoFactor { rho } => rho.get(i - 1).copied(),
            _ => None,
        }
    }
}

/// Square root `L` with `L Lᵀ = C` for a positive semidefinite correlation
/// matrix.
fn correlation_root(m: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let d = m.len();
    if d == 0 || m.iter().any(|row| row.len() != d) {
        return Err(Error::invalid(
            "correlation matrix must be square and non-empty",
        ));
    }
    let c = DMatrix::from_fn(d, d, |i, j| m[i][j]);
    for i in 0..d {
        if (c[(i, i)] - 1.0).abs() > 1e-12 {
            return Err(Error::invalid("correlation matrix must have unit diagonal"));
        }
        for j in 0..d {
            if (c[(i, j)] - c[(j, i)]).abs() > 1e-12 {
                return Err(Error::invalid("correlation matrix must be symmetric"));
            }
            if !(-1.0..=1.0).contains(&c[(i, j)]) {
                return Err(Error::invalid("correlation entries must lie in [-1, 1]"));
            }
        }
    }
    let eig = SymmetricEigen::new(c);
    if eig.eigenvalues.iter().any(|&l| l < -1e-12) {
        return Err(Error::invalid(
            "correlation matrix is not positive semidefinite",
        ));
    }
    let sqrt_l = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| l.max(0.0).sqrt()));
    Ok(&eig.eigenvectors * sqrt_l)
}

/// Piecewise-constant factor loadings of the nominal forwards `f_k`
/// (`k = 0..N-1`) and inflation forwards `f^(I)_j` (`j = 1..=N`).
///
/// Loadings are constant over each period `[T_{i-1}, T_i)` of the grid. A
/// nominal forward is live on periods `i <= k` (it fixes at `T_k`); an
/// inflation forward on periods `i <= j` (it fixes at `T_j`). Entries for
/// dead periods and for periods already elapsed are zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VolSurface {
    grid: TenorGrid,
    factors: usize,
    /// `nominal[k][i - 1]`.
    nominal: Vec<Vec<Vec<f64>>>,
    /// `inflation[j - 1][i - 1]`.
    inflation: Vec<Vec<Vec<f64>>>,
}

impl VolSurface {
    pub fn new(
        grid: TenorGrid,
        factors: usize,
        nominal: Vec<Vec<Vec<f64>>>,
        inflation: Vec<Vec<Vec<f64>>>,
    ) -> Result<Self> {
        let s = Self {
            grid,
            factors,
            nominal,
            inflation,
        };
        s.validate(DEFAULT_LOADING_CAP)?;
        Ok(s)
    }

    /// Builds a surface from loading functions; dead and elapsed entries are
    /// zeroed regardless of what the closures return.
    pub fn from_fn<N, I>(
        grid: TenorGrid,
        factors: usize,
        mut nominal: N,
        mut inflation: I,
    ) -> Result<Self>
    where
        N: FnMut(usize, usize) -> Vec<f64>,
        I: FnMut(usize, usize) -> Vec<f64>,
    {
        let n = grid.periods();
        let live = |fix: usize, i: usize| i <= fix && grid.date(i) > 0.0;
        let nom = (0..n)
            .map(|k| {
                (1..=n)
                    .map(|i| {
                        if live(k, i) {
                            nominal(k, i)
                        } else {
                            vec![0.0; factors]
                        }
                    })
                    .collect()
            })
            .collect();
        let inf = (1..=n)
            .map(|j| {
                (1..=n)
                    .map(|i| {
                        if live(j, i) {
                            inflation(j, i)
                        } else {
                            vec![0.0; factors]
                        }
                    })
                    .collect()
            })
            .collect();
        Self::new(grid, factors, nom, inf)
    }

    /// Two-factor surface from scalar volatilities: nominal loading
    /// `(γ, 0)`, inflation loading `γ^(I) (ρ_i, √(1-ρ_i²))`.
    pub fn two_factor<N, I>(
        grid: TenorGrid,
        nominal: N,
        inflation: I,
        corr: &CorrelationSpec,
    ) -> Result<Self>
    where
        N: Fn(usize, usize) -> f64,
        I: Fn(usize, usize) -> f64,
    {
        corr.validate()?;
        if !matches!(corr, CorrelationSpec::TwoFactor { .. }) {
            return Err(Error::invalid(
                "two_factor surface needs a TwoFactor correlation spec",
            ));
        }
        if let CorrelationSpec::TwoFactor { rho } = corr {
            if rho.len() != 1 && rho.len() != grid.periods() {
                return Err(Error::invalid(format!(
                    "piecewise correlation needs {} entries, got {}",
                    grid.periods(),
                    rho.len()
                )));
            }
        }
        Self::from_fn(
            grid,
            2,
            |k, i| vec![nominal(k, i), 0.0],
            |j, i| {
                let r = corr.rho(i).unwrap();
                let g = inflation(j, i);
                vec![g * r, g * (1.0 - r * r).max(0.0).sqrt()]
            },
        )
    }

    /// Rewrites loadings given on correlated factors as loadings on
    /// independent ones.
    pub fn decorrelated(&self, corr: &CorrelationSpec) -> Result<Self> {
        match corr {
            CorrelationSpec::Independent => Ok(self.clone()),
            CorrelationSpec::TwoFactor { .. } => Err(Error::invalid(
                "two-factor correlation is applied when building the surface",
            )),
            CorrelationSpec::Matrix(m) => {
                if m.len() != self.factors {
                    return Err(Error::invalid(format!(
                        "correlation matrix is {}x{} but surface has {} factors",
                        m.len(),
                        m.len(),
                        self.factors
                    )));
                }
                let l = correlation_root(m)?;
                let map = |v: &Vec<f64>| -> Vec<f64> {
                    (0..self.factors)
                        .map(|c| (0..self.factors).map(|r| l[(r, c)] * v[r]).sum())
                        .collect()
                };
                let conv = |x: &Vec<Vec<Vec<f64>>>| {
                    x.iter().map(|row| row.iter().map(map).collect()).collect()
                };
                Self::new(
                    self.grid.clone(),
                    self.factors,
                    conv(&self.nominal),
                    conv(&self.inflation),
                )
            }
        }
    }

    fn validate(&self, cap: f64) -> Result<()> {
        let n = self.grid.periods();
        if self.factors == 0 {
            return Err(Error::invalid("surface needs at least one factor"));
        }
        if self.nominal.len() != n || self.inflation.len() != n {
            return Err(Error::invalid(format!(
                "surface needs {n} nominal and {n} inflation rows, got {} and {}",
                self.nominal.len(),
                self.inflation.len()
            )));
        }
        let check = |rows: &Vec<Vec<Vec<f64>>>, what: &str, first: usize| -> Result<()> {
            for (r, row) in rows.iter().enumerate() {
                let fix = r + first;
                if row.len() != n {
                    return Err(Error::invalid(format!(
                        "{what} row {fix} needs {n} periods"
                    )));
                }
                for (p, v) in row.iter().enumerate() {
                    let i = p + 1;
                    if v.len() != self.factors {
                        return Err(Error::invalid(format!(
                            "{what} loading ({fix}, {i}) has {} factors, expected {}",
                            v.len(),
                            self.factors
                        )));
                    }
                    if v.iter().any(|x| !x.is_finite()) {
                        return Err(Error::invalid(format!(
                            "{what} loading ({fix}, {i}) is not finite"
                        )));
                    }
                    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                    if norm > cap {
                        return Err(Error::invalid(format!(
                            "{what} loading ({fix}, {i}) has norm {norm} above cap {cap}"
                        )));
                    }
                    let dead = i > fix || self.grid.date(i) <= 0.0;
                    if dead && norm != 0.0 {
                        return Err(Error::invalid(format!(
                            "{what} loading ({fix}, {i}) must be zero after the forward fixes"
                        )));
                    }
                }
            }
            Ok(())
        };
        check(&self.nominal, "nominal", 0)?;
        check(&self.inflation, "inflation", 1)
    }

    pub fn grid(&self) -> &TenorGrid {
        &self.grid
    }

    pub fn factors(&self) -> usize {
        self.factors
    }

    /// `γ_k` over period `i`.
    pub fn nominal_loading(&self, k: usize, i: usize) -> &[f64] {
        &self.nominal[k][i - 1]
    }

    /// `γ^(I)_j` over period `i`.
    pub fn inflation_loading(&self, j: usize, i: usize) -> &[f64] {
        &self.inflation[j - 1][i - 1]
    }

    /// Nominal loading at calendar time `t` (zero once the forward fixed).
    pub fn nominal_loading_at(&self, k: usize, t: f64) -> Vec<f64> {
        match self.grid.eta(t) {
            Some(i) if i >= 1 => self.nominal[k][i - 1].clone(),
            _ => vec![0.0; self.factors],
        }
    }

    /// `∫_0^{T_j} ‖γ^(I)_j(s)‖² ds`, summed exactly over the periods.
    pub fn inflation_total_variance(&self, j: usize) -> f64 {
        (1..=j)
            .map(|i| {
                let (a, b) = self.grid.live_span(i);
                let v = self.inflation_loading(j, i);
                (b - a) * v.iter().map(|x| x * x).sum::<f64>()
            })
            .sum()
    }

    /// Implied caplet volatility of the displaced forward `j`:
    /// `sqrt(total variance / T_j)`.
    pub fn caplet_vol(&self, j: usize) -> f64 {
        let t = self.grid.date(j);
        if t <= 0.0 {
            return 0.0;
        }
        (self.inflation_total_variance(j) / t).sqrt()
    }

    /// Same surface with every inflation loading replaced.
    pub fn with_inflation(&self, inflation: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        Self::new(
            self.grid.clone(),
            self.factors,
            self.nominal.clone(),
            inflation,
        )
    }

    /// Same surface with every inflation loading multiplied by `scale`.
    pub fn scale_inflation(&self, scale: f64) -> Result<Self> {
        let inf = self
            .inflation
            .iter()
            .map(|row| {
                row.iter()
                    .map(|v| v.iter().map(|x| x * scale).collect())
                    .collect()
            })
            .collect();
        self.with_inflation(inf)
    }

    /// Surface on the first `n` periods only.
    pub fn truncated(&self, n: usize) -> Result<Self> {
        let grid = self.grid.truncated(n)?;
        let cut = |rows: &[Vec<Vec<f64>>]| rows[..n].iter().map(|r| r[..n].to_vec()).collect();
        Self::new(grid, self.factors, cut(&self.nominal), cut(&self.inflation))
    }

    /// Norm of each live inflation loading, `rows[j - 1][i - 1]`; the data
    /// behind a volatility-surface plot.
    pub fn inflation_norms(&self) -> Vec<Vec<f64>> {
        self.inflation
            .iter()
            .map(|row| {
                row.iter()
                    .map(|v| v.iter().map(|x| x * x).sum::<f64>().sqrt())
                    .collect()
            })
            .collect()
    }
}
