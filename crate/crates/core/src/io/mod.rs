//! Quote files in, reports out.
//!
//! Quote CSVs carry their units in the column names (`_pct`, `_bps`) and are
//! converted to decimals per unit notional on reading. Reports use fixed
//! headers and read back to the same values.

mod quotes;
mod report;

pub use quotes::{
    parse_quotes, parse_quotes_str, CpiFixing, DiscountQuote, QuoteFile, QuoteKind, Records,
    TABLE1_ZCIIS, TABLE2_CAPS,
};
pub use report::{
    curve_table, read_csv, read_csv_str, read_json, vol_table, write_csv, write_csv_to, write_json,
    CapRepricingRow, CsvRow, CurveRow, PriceRow, SwapRateRow, SwaptionGridRow, VolRow,
};
