//! Matrix ingestion, generators and report serialization.

pub mod export;
pub mod generators;
pub mod matrix_market;

pub use export::{
    csv_string, fmt_num, format_trace_table, trace_to_json, write_json, write_run_meta, SCHEMA,
};
pub use generators::{grcar, toeplitz_band};
pub use matrix_market::{
    format_matrix_market, parse_matrix_market, parse_pattern_list, read_matrix_market,
    read_matrix_market_pattern, read_pattern_list, write_matrix_market, MatrixMarketData,
    MatrixMarketHeader, MmField, MmFormat, MmSymmetry,
};
