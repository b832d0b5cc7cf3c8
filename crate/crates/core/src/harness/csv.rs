//! CSV output for sweep summaries.
//!
//! Header:
//! `param_log2,lambda,runs,mean_gens,std_gens,success_rate,mean_best,std_best,mean_evals`.
//! Floats use six significant digits in the style of C's `%g`; rows are sorted
//! by parameter, then λ; lines end with `\n`. Metrics that were not requested
//! are left empty.

use std::collections::BTreeSet;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use super::{CellSummary, Metric};
use crate::error::{Error, Result};

pub const HEADER: &str =
    "param_log2,lambda,runs,mean_gens,std_gens,success_rate,mean_best,std_best,mean_evals";

/// `%.6g`-style formatting.
pub fn format_sig6(x: f64) -> String {
    const SIG: i32 = 6;
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    // the exponent after rounding to SIG digits
    let sci = format!("{:.*e}", (SIG - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..SIG).contains(&exp) {
        let mantissa = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (SIG - 1 - exp).max(0) as usize;
        strip_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn param_log2(param: f64) -> String {
    format_sig6(param.log2())
}

fn metric_field(metrics: &BTreeSet<Metric>, m: Metric, v: f64) -> String {
    if metrics.contains(&m) {
        format_sig6(v)
    } else {
        String::new()
    }
}

/// Sorted CSV text for `summaries`.
pub fn render_csv(summaries: &[CellSummary], metrics: &BTreeSet<Metric>) -> Result<String> {
    if summaries.is_empty() {
        return Err(Error::invalid("no cell summaries to write"));
    }
    if metrics.is_empty() {
        return Err(Error::invalid("at least one metric must be requested"));
    }
    let mut rows: Vec<&CellSummary> = summaries.iter().collect();
    rows.sort_by(|a, b| a.param.total_cmp(&b.param).then(a.lambda.cmp(&b.lambda)));
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(HEADER);
    out.push('\n');
    for s in rows {
        let fields = [
            param_log2(s.param),
            s.lambda.to_string(),
            s.runs.to_string(),
            metric_field(metrics, Metric::MeanGenerations, s.mean_generations),
            metric_field(metrics, Metric::StdGenerations, s.std_generations),
            metric_field(metrics, Metric::SuccessRate, s.success_rate),
            metric_field(metrics, Metric::MeanBestFitness, s.mean_best_fitness),
            metric_field(metrics, Metric::StdBestFitness, s.std_best_fitness),
            metric_field(metrics, Metric::MeanEvaluations, s.mean_evaluations),
        ];
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    Ok(out)
}

pub fn emit_csv(summaries: &[CellSummary], metrics: &BTreeSet<Metric>, path: &Path) -> Result<()> {
    let text = render_csv(summaries, metrics)?;
    let io_err = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = File::create(path).map_err(io_err)?;
    let mut w = BufWriter::new(file);
    w.write_all(text.as_bytes()).map_err(io_err)?;
    w.flush().map_err(io_err)
}
