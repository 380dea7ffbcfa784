use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::curves::{InflationCurve, TenorGrid};
use crate::error::{Error, Result};
use crate::io::quotes::csv_error;
use crate::model::VolSurface;

/// A row type with a fixed CSV header.
pub trait CsvRow: Serialize + DeserializeOwned {
    const HEADER: &'static [&'static str];
}

/// Floats are written as `{:.16e}`, enough digits to read back the same
/// `f64`.
mod sci {
    use serde::Serializer;

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format!("{x:.16e}"))
    }

    pub mod opt {
        use serde::Serializer;

        pub fn serialize<S: Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
            match x {
                Some(x) => s.serialize_str(&format!("{x:.16e}")),
                None => s.serialize_str(""),
            }
        }
    }
}

/// Nominal, real and inflation discount factors and the period forwards
/// ending at `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    #[serde(rename = "T", serialize_with = "sci::serialize")]
    pub t: f64,
    #[serde(rename = "P", serialize_with = "sci::serialize")]
    pub nominal: f64,
    #[serde(rename = "P_R", serialize_with = "sci::serialize")]
    pub real: f64,
    #[serde(rename = "P_I", serialize_with = "sci::serialize")]
    pub inflation: f64,
    #[serde(rename = "f", serialize_with = "sci::serialize")]
    pub nominal_forward: f64,
    #[serde(rename = "f_I", serialize_with = "sci::serialize")]
    pub inflation_forward: f64,
}

impl CsvRow for CurveRow {
    const HEADER: &'static [&'static str] = &["T", "P", "P_R", "P_I", "f", "f_I"];
}

/// One live entry of a loading surface: `rate` is `nominal` or `inflation`,
/// `forward` the rate index and `vol` the norm of its loading over
/// `[t_start, t_end]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VolRow {
    pub rate: String,
    pub forward: usize,
    pub period: usize,
    #[serde(serialize_with = "sci::serialize")]
    pub t_start: f64,
    #[serde(serialize_with = "sci::serialize")]
    pub t_end: f64,
    #[serde(serialize_with = "sci::serialize")]
    pub vol: f64,
}

impl CsvRow for VolRow {
    const HEADER: &'static [&'static str] =
        &["rate", "forward", "period", "t_start", "t_end", "vol"];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapRepricingRow {
    #[serde(serialize_with = "sci::serialize")]
    pub maturity: f64,
    #[serde(serialize_with = "sci::serialize")]
    pub strike_pct: f64,
    #[serde(serialize_with = "sci::serialize")]
    pub market_bps: f64,
    #[serde(serialize_with = "sci::serialize")]
    pub model_bps: f64,
    #[serde(serialize_with = "sci::serialize")]
    pub error_bps: f64,
    /// False for strikes reported only as diagnostics.
    pub calibrated: bool,
}

impl CsvRow for CapRepricingRow {
    const HEADER: &'static [&'static str] = &[
        "maturity",
        "strike_pct",
        "market_bps",
        "model_bps",
        "error_bps",
        "calibrated",
    ];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriceRow {
    pub id: String,
    pub kind: String,
    #[serde(serialize_with = "sci::opt::serialize")]
    pub pv: Option<f64>,
    #[serde(serialize_with = "sci::opt::serialize")]
    pub pv_per_unit: Option<f64>,
    #[serde(serialize_with = "sci::opt::serialize")]
    pub vol: Option<f64>,
    /// `ok`, or the reason the instrument could not be valued.
    pub status: String,
}

impl CsvRow for PriceRow {
    const HEADER: &'static [&'static str] = &["id", "kind", "pv", "pv_per_unit", "vol", "status"];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SwaptionGridRow {
    pub start: usize,
    pub end: usize,
    #[serde(serialize_with = "sci::serialize")]
    pub strike_pct: f64,
    #[serde(serialize_with = "sci::serialize")]
    pub price: f64,
    #[serde(serialize_with = "sci::serialize")]
    pub vol: f64,
}

impl CsvRow for SwaptionGridRow {
    const HEADER: &'static [&'static str] = &["start", "end", "strike_pct", "price", "vol"];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SwapRateRow {
    pub start: usize,
    pub end: usize,
    #[serde(serialize_with = "sci::serialize")]
    pub rate: f64,
    #[serde(serialize_with = "sci::serialize")]
    pub annuity: f64,
}

impl CsvRow for SwapRateRow {
    const HEADER: &'static [&'static str] = &["start", "end", "rate", "annuity"];
}

/// Curve report on every grid date after the valuation date.
pub fn curve_table(curves: &InflationCurve, grid: &TenorGrid) -> Result<Vec<CurveRow>> {
    (1..=grid.periods())
        .filter(|&i| grid.date(i) > 0.0)
        .map(|i| {
            let t = grid.date(i);
            let t0 = grid.date(i - 1).max(0.0);
            Ok(CurveRow {
                t,
                nominal: curves.nominal().discount(t)?,
                real: curves.real().discount(t)?,
                inflation: curves.discount(t)?,
                nominal_forward: curves.nominal().forward_rate(t0, t)?,
                inflation_forward: curves.inflation_forward(t0, t)?,
            })
        })
        .collect()
}

/// Long-format loading norms of every live (forward, period) pair.
pub fn vol_table(surface: &VolSurface) -> Vec<VolRow> {
    let grid = surface.grid();
    let n = grid.periods();
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let mut rows = Vec::new();
    for k in 0..n {
        for i in 1..=k.min(n) {
            if grid.date(i) <= 0.0 {
                continue;
            }
            let (a, b) = grid.live_span(i);
            rows.push(VolRow {
                rate: "nominal".into(),
                forward: k,
                period: i,
                t_start: a,
                t_end: b,
                vol: norm(surface.nominal_loading(k, i)),
            });
        }
    }
    for j in 1..=n {
        for i in 1..=j {
            if grid.date(i) <= 0.0 {
                continue;
            }
            let (a, b) = grid.live_span(i);
            rows.push(VolRow {
                rate: "inflation".into(),
                forward: j,
                period: i,
                t_start: a,
                t_end: b,
                vol: norm(surface.inflation_loading(j, i)),
            });
        }
    }
    rows
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|source| Error::Io {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    File::create(path)
        .map(BufWriter::new)
        .map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
}

pub fn write_csv_to<T: CsvRow, W: Write>(rows: &[T], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    let io = |e: csv::Error| Error::Numerical(format!("csv write: {e}"));
    w.write_record(T::HEADER).map_err(io)?;
    for r in rows {
        w.serialize(r).map_err(io)?;
    }
    w.flush()
        .map_err(|e| Error::Numerical(format!("csv write: {e}")))
}

pub fn write_csv<T: CsvRow>(rows: &[T], path: &Path) -> Result<()> {
    let file = create(path)?;
    write_csv_to(rows, file).map_err(|e| match e {
        Error::Numerical(m) => Error::Io {
            path: path.to_path_buf(),
            source: std::io::Error::other(m),
        },
        e => e,
    })
}

pub fn read_csv_str<T: CsvRow>(text: &str, origin: &str) -> Result<Vec<T>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(text.as_bytes());
    let header = rdr.headers().map_err(|e| csv_error(origin, e))?.clone();
    if !header.iter().eq(T::HEADER.iter().copied()) {
        return Err(Error::Schema {
            path: origin.to_string(),
            line: 1,
            column: 1,
            message: format!("expected header `{}`", T::HEADER.join(",")),
        });
    }
    rdr.deserialize()
        .map(|r| r.map_err(|e| csv_error(origin, e)))
        .collect()
}

pub fn read_csv<T: CsvRow>(path: &Path) -> Result<Vec<T>> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_csv_str(&text, &path.display().to_string())
}

/// Pretty JSON; `f64` values are written in shortest round-trip form.
pub fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let mut file = create(path)?;
    serde_json::to_writer_pretty(&mut file, value)?;
    writeln!(file)
        .and_then(|_| file.flush())
        .map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(serde_json::from_str(&text)?)
}
