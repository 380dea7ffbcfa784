use std::collections::HashSet;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::calibration::CapQuote;
use crate::curves::ZciisQuote;
use crate::error::{Error, Result};
use crate::pricing::{Instrument, InstrumentKind};

pub const TABLE1_ZCIIS: &str = include_str!("../../fixtures/table1_zciis.csv");
pub const TABLE2_CAPS: &str = include_str!("../../fixtures/table2_caps.csv");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuoteKind {
    Zciis,
    Cap,
    NominalCurve,
    CpiFixings,
    InstrumentBook,
}

impl QuoteKind {
    pub fn header(&self) -> &'static [&'static str] {
        match self {
            QuoteKind::Zciis => &["maturity_years", "swap_rate_pct"],
            QuoteKind::Cap => &["maturity_years", "strike_pct", "price_bps"],
            QuoteKind::NominalCurve => &["maturity_years", "discount_factor"],
            QuoteKind::CpiFixings => &["date_years_offset", "index_level"],
            QuoteKind::InstrumentBook => &[
                "id",
                "kind",
                "start_years",
                "end_years",
                "freq_years",
                "strike_pct",
                "notional",
            ],
        }
    }
}

impl std::fmt::Display for QuoteKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            QuoteKind::Zciis => "zciis",
            QuoteKind::Cap => "cap",
            QuoteKind::NominalCurve => "nominal-curve",
            QuoteKind::CpiFixings => "cpi-fixings",
            QuoteKind::InstrumentBook => "instrument-book",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscountQuote {
    pub maturity: f64,
    pub discount: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CpiFixing {
    /// Non-positive year offset from the valuation date.
    pub offset: f64,
    pub level: f64,
}

/// Parsed rows, already converted to decimals per unit notional.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "records", rename_all = "kebab-case")]
pub enum Records {
    Zciis(Vec<ZciisQuote>),
    Cap(Vec<CapQuote>),
    NominalCurve(Vec<DiscountQuote>),
    CpiFixings(Vec<CpiFixing>),
    InstrumentBook(Vec<Instrument>),
}

impl Records {
    pub fn len(&self) -> usize {
        match self {
            Records::Zciis(v) => v.len(),
            Records::Cap(v) => v.len(),
            Records::NominalCurve(v) => v.len(),
            Records::CpiFixings(v) => v.len(),
            Records::InstrumentBook(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuoteFile {
    pub kind: QuoteKind,
    /// From a `# as_of: <date>` comment line, if present.
    pub as_of: Option<String>,
    pub records: Records,
}

impl QuoteFile {
    pub fn into_zciis(self) -> Result<Vec<ZciisQuote>> {
        match self.records {
            Records::Zciis(v) => Ok(v),
            _ => Err(kind_mismatch(QuoteKind::Zciis, self.kind)),
        }
    }

    pub fn into_caps(self) -> Result<Vec<CapQuote>> {
        match self.records {
            Records::Cap(v) => Ok(v),
            _ => Err(kind_mismatch(QuoteKind::Cap, self.kind)),
        }
    }

    pub fn into_discounts(self) -> Result<Vec<DiscountQuote>> {
        match self.records {
            Records::NominalCurve(v) => Ok(v),
            _ => Err(kind_mismatch(QuoteKind::NominalCurve, self.kind)),
        }
    }

    pub fn into_fixings(self) -> Result<Vec<CpiFixing>> {
        match self.records {
            Records::CpiFixings(v) => Ok(v),
            _ => Err(kind_mismatch(QuoteKind::CpiFixings, self.kind)),
        }
    }

    pub fn into_instruments(self) -> Result<Vec<Instrument>> {
        match self.records {
            Records::InstrumentBook(v) => Ok(v),
            _ => Err(kind_mismatch(QuoteKind::InstrumentBook, self.kind)),
        }
    }
}

fn kind_mismatch(want: QuoteKind, got: QuoteKind) -> Error {
    Error::invalid(format!("expected a {want} file, got {got}"))
}

/// Reads a quote file from `path`, or from stdin when `path` is `-`.
pub fn parse_quotes(path: &Path, kind: QuoteKind) -> Result<QuoteFile> {
    let text = if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|source| Error::Io {
                path: path.to_path_buf(),
                source,
            })?;
        s
    } else {
        std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?
    };
    parse_quotes_str(&text, kind, &path.display().to_string())
}

/// Parses quote text; `origin` names the source in error messages.
pub fn parse_quotes_str(text: &str, kind: QuoteKind, origin: &str) -> Result<QuoteFile> {
    let schema = |line: u64, column: usize, message: String| Error::Schema {
        path: origin.to_string(),
        line,
        column,
        message,
    };
    let as_of = text.lines().find_map(|l| {
        let body = l.trim().strip_prefix('#')?.trim();
        let rest = body.strip_prefix("as_of")?.trim_start();
        let value = rest
            .strip_prefix(':')
            .or_else(|| rest.strip_prefix('='))?
            .trim();
        (!value.is_empty()).then(|| value.to_string())
    });

    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .has_headers(true)
        .from_reader(text.as_bytes());
    let header = rdr.headers().map_err(|e| csv_error(origin, e))?.clone();
    let want = kind.header();
    if header.is_empty() {
        return Err(schema(
            1,
            1,
            format!("missing header; expected `{}`", want.join(",")),
        ));
    }
    let header_line = header.position().map_or(1, |p| p.line());
    if header.len() != want.len() || header.iter().zip(want).any(|(a, b)| a != *b) {
        let column = header
            .iter()
            .zip(want)
            .position(|(a, b)| a != *b)
            .unwrap_or(header.len().min(want.len()))
            + 1;
        return Err(schema(
            header_line,
            column,
            format!(
                "header `{}` does not match the {kind} schema `{}`",
                header.iter().collect::<Vec<_>>().join(","),
                want.join(",")
            ),
        ));
    }

    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| csv_error(origin, e))?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != want.len() {
            return Err(schema(
                line,
                rec.len().min(want.len()) + 1,
                format!("expected {} fields, got {}", want.len(), rec.len()),
            ));
        }
        rows.push((line, rec));
    }

    let num = |line: u64, rec: &csv::StringRecord, col: usize| -> Result<f64> {
        let field = &rec[col];
        let x: f64 = field.parse().map_err(|_| {
            schema(
                line,
                col + 1,
                format!("`{}`: `{field}` is not a number", want[col]),
            )
        })?;
        if !x.is_finite() {
            return Err(schema(
                line,
                col + 1,
                format!("`{}` must be finite, got `{field}`", want[col]),
            ));
        }
        Ok(x)
    };
    let positive = |line: u64, rec: &csv::StringRecord, col: usize| -> Result<f64> {
        let x = num(line, rec, col)?;
        if x <= 0.0 {
            return Err(schema(
                line,
                col + 1,
                format!("`{}` must be positive, got {x}", want[col]),
            ));
        }
        Ok(x)
    };
    let mut seen = HashSet::new();
    let mut unique = |line: u64, key: String| -> Result<()> {
        if seen.insert(key.clone()) {
            Ok(())
        } else {
            Err(schema(line, 1, format!("duplicate record for {key}")))
        }
    };

    let records = match kind {
        QuoteKind::Zciis => {
            let mut out = Vec::with_capacity(rows.len());
            for (line, r) in &rows {
                let maturity = positive(*line, r, 0)?;
                unique(*line, format!("maturity {maturity}"))?;
                out.push(ZciisQuote {
                    maturity,
                    rate: num(*line, r, 1)? / 100.0,
                });
            }
            Records::Zciis(out)
        }
        QuoteKind::Cap => {
            let mut out = Vec::with_capacity(rows.len());
            for (line, r) in &rows {
                let maturity = positive(*line, r, 0)?;
                let strike = num(*line, r, 1)? / 100.0;
                unique(*line, format!("maturity {maturity}, strike {strike}"))?;
                let price = num(*line, r, 2)?;
                if price < 0.0 {
                    return Err(schema(
                        *line,
                        3,
                        format!("cap price must not be negative, got {price}"),
                    ));
                }
                out.push(CapQuote {
                    maturity,
                    strike,
                    price: price / 10_000.0,
                });
            }
            Records::Cap(out)
        }
        QuoteKind::NominalCurve => {
            let mut out = Vec::with_capacity(rows.len());
            for (line, r) in &rows {
                let maturity = positive(*line, r, 0)?;
                unique(*line, format!("maturity {maturity}"))?;
                out.push(DiscountQuote {
                    maturity,
                    discount: positive(*line, r, 1)?,
                });
            }
            Records::NominalCurve(out)
        }
        QuoteKind::CpiFixings => {
            let mut out = Vec::with_capacity(rows.len());
            for (line, r) in &rows {
                let offset = num(*line, r, 0)?;
                if offset > 0.0 {
                    return Err(schema(
                        *line,
                        1,
                        format!("fixing date offset {offset} is after the valuation date"),
                    ));
                }
                unique(*line, format!("date offset {offset}"))?;
                out.push(CpiFixing {
                    offset,
                    level: positive(*line, r, 1)?,
                });
            }
            Records::CpiFixings(out)
        }
        QuoteKind::InstrumentBook => {
            let mut out = Vec::with_capacity(rows.len());
            for (line, r) in &rows {
                let id = r[0].to_string();
                if id.is_empty() {
                    return Err(schema(*line, 1, "empty instrument id".into()));
                }
                unique(*line, format!("id `{id}`"))?;
                let kind: InstrumentKind = r[1]
                    .parse()
                    .map_err(|e: Error| schema(*line, 2, e.to_string()))?;
                let start = num(*line, r, 2)?;
                let end = num(*line, r, 3)?;
                if start < 0.0 || end < 0.0 {
                    return Err(schema(
                        *line,
                        3,
                        "instrument dates must not be negative".into(),
                    ));
                }
                out.push(Instrument {
                    id,
                    kind,
                    start,
                    end,
                    freq: positive(*line, r, 4)?,
                    strike: num(*line, r, 5)? / 100.0,
                    notional: positive(*line, r, 6)?,
                });
            }
            Records::InstrumentBook(out)
        }
    };
    Ok(QuoteFile {
        kind,
        as_of,
        records,
    })
}

pub(crate) fn csv_error(origin: &str, e: csv::Error) -> Error {
    let (line, column) = match e.position() {
        Some(p) => (p.line(), 1),
        None => (0, 0),
    };
    Error::Schema {
        path: origin.to_string(),
        line,
        column,
        message: e.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_one_fixture() {
        let q = parse_quotes_str(TABLE1_ZCIIS, QuoteKind::Zciis, "t1").unwrap();
        assert_eq!(q.as_of.as_deref(), Some("2008-04-07"));
        let z = q.into_zciis().unwrap();
        assert_eq!(z.len(), 9);
        assert_eq!(z[4].maturity, 10.0);
        assert_eq!(z[4].rate, 2.3530 / 100.0);
    }

    #[test]
    fn table_two_fixture() {
        let caps = parse_quotes_str(TABLE2_CAPS, QuoteKind::Cap, "t2")
            .unwrap()
            .into_caps()
            .unwrap();
        assert_eq!(caps.len(), 27);
        let c = caps
            .iter()
            .find(|c| c.maturity == 5.0 && c.strike == 0.02)
            .unwrap();
        assert!((c.price - 0.02532).abs() < 1e-17);
    }

    #[test]
    fn wrong_header_is_a_schema_error() {
        let e = parse_quotes_str("maturity,rate_pct\n1,2\n", QuoteKind::Cap, "x.csv").unwrap_err();
        let Error::Schema { line, column, .. } = e else {
            panic!("{e}")
        };
        assert_eq!((line, column), (1, 1));
        // percent column without its unit suffix is ambiguous
        assert!(
            parse_quotes_str("maturity_years,swap_rate\n1,2\n", QuoteKind::Zciis, "x").is_err()
        );
    }

    #[test]
    fn bad_values_report_their_position() {
        let text = "maturity_years,strike_pct,price_bps\n2,2,101.6\n3,2,NaN\n";
        let Error::Schema { line, column, .. } =
            parse_quotes_str(text, QuoteKind::Cap, "x").unwrap_err()
        else {
            panic!()
        };
        assert_eq!((line, column), (3, 3));
        let neg = "maturity_years,swap_rate_pct\n-1,2\n";
        assert!(matches!(
            parse_quotes_str(neg, QuoteKind::Zciis, "x"),
            Err(Error::Schema {
                line: 2,
                column: 1,
                ..
            })
        ));
        let dup = "maturity_years,swap_rate_pct\n1,2\n1,2.1\n";
        assert!(parse_quotes_str(dup, QuoteKind::Zciis, "x").is_err());
        let decimal_comma = "maturity_years,swap_rate_pct\n1,\"2,1\"\n";
        assert!(parse_quotes_str(decimal_comma, QuoteKind::Zciis, "x").is_err());
    }

    #[test]
    fn instrument_book() {
        let text = "id,kind,start_years,end_years,freq_years,strike_pct,notional\n\
                    a,cap,0,5,1,2,1000000\n\
                    b,swaption,2,5,1,2.5,1\n";
        let b = parse_quotes_str(text, QuoteKind::InstrumentBook, "x")
            .unwrap()
            .into_instruments()
            .unwrap();
        assert_eq!(b[0].kind, InstrumentKind::Cap);
        assert_eq!(b[1].strike, 0.025);
        assert!(parse_quotes_str(
            &text.replace("swaption", "bond"),
            QuoteKind::InstrumentBook,
            "x"
        )
        .is_err());
    }

    #[test]
    fn fixings_and_discounts() {
        let f = parse_quotes_str(
            "date_years_offset,index_level\n-0.25,105.2\n0,106\n",
            QuoteKind::CpiFixings,
            "x",
        )
        .unwrap()
        .into_fixings()
        .unwrap();
        assert_eq!(
            f[1],
            CpiFixing {
                offset: 0.0,
                level: 106.0
            }
        );
        let d = parse_quotes_str(
            "maturity_years,discount_factor\n1,0.96\n",
            QuoteKind::NominalCurve,
            "x",
        )
        .unwrap()
        .into_discounts()
        .unwrap();
        assert_eq!(d[0].discount, 0.96);
        assert!(parse_quotes_str(
            "maturity_years,discount_factor\n",
            QuoteKind::NominalCurve,
            "x"
        )
        .unwrap()
        .records
        .is_empty());
    }
}
