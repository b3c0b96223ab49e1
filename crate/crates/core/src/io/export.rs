//! JSON reports, CSV tables and the text layout of outer-iteration traces.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::Result;
use crate::outer::{Mode, OuterTrace};

pub const SCHEMA: &str = "stabrad/1";

/// 17 significant digits in scientific notation.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Aligned table with columns `k`, `delta_k` or `eps_k`, `Re lambda_k`, `# steps`.
pub fn format_trace_table(trace: &OuterTrace) -> String {
    let name = match trace.mode {
        Mode::SolveDelta => "delta_k",
        Mode::SolveEps => "eps_k",
    };
    let mut s = String::new();
    let _ = writeln!(s, "{:>3}  {:>24}  {:>24}  {:>8}", "k", name, "Re lambda_k", "# steps");
    for r in &trace.rows {
        let _ = writeln!(
            s,
            "{:>3}  {:>24}  {:>24}  {:>8}",
            r.k,
            fmt_num(r.value),
            fmt_num(r.re_lambda),
            r.steps
        );
    }
    s
}

/// Versioned JSON document for a trace; `extra` fields are merged at the top level.
pub fn trace_to_json(trace: &OuterTrace, extra: Value) -> Result<Value> {
    let mut doc = json!({
        "schema": SCHEMA,
        "mode": trace.mode,
        "fixed": trace.fixed,
        "eps": trace.eps(),
        "delta": trace.delta(),
        "result": trace.final_value,
        "status": trace.status,
        "bracket": [trace.bracket.0, trace.bracket.1],
        "rows": serde_json::to_value(&trace.rows)?,
        "warnings": trace.warnings,
        "rightmost": {
            "re": trace.state.triple.lambda.re,
            "im": trace.state.triple.lambda.im,
            "kappa": trace.state.triple.kappa,
            "gap": trace.state.triple.gap,
            "separation": trace.state.triple.separation,
        },
        "sign": trace.state.sign,
    });
    if let (Value::Object(d), Value::Object(e)) = (&mut doc, extra) {
        d.extend(e);
    }
    Ok(doc)
}

pub fn write_json<T: Serialize>(path: impl AsRef<Path>, value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    fs::write(path, s)?;
    Ok(())
}

/// Timestamp and invocation go to a side file so reports stay reproducible.
pub fn write_run_meta(dir: impl AsRef<Path>, command: &[String]) -> Result<()> {
    let secs = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let meta = json!({
        "schema": SCHEMA,
        "unix_time": secs,
        "command": command,
        "version": env!("CARGO_PKG_VERSION"),
        "rng": crate::rng::RNG_ALGORITHM,
    });
    write_json(dir.as_ref().join("run_meta.json"), &meta)
}

/// CSV with a header row; each record is a list of preformatted fields.
pub fn csv_string(header: &str, records: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut s = String::new();
    s.push_str(header);
    s.push('\n');
    for r in records {
        s.push_str(&r.join(","));
        s.push('\n');
    }
    s
}
