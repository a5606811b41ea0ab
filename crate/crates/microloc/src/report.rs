//! Bit-exact serialization of trajectories, wave front reports, detector
//! reports, and verification summaries.
//!
//! CSV: comma separated, '.' decimal, every float printed as `{:.16e}`
//! (17 significant digits), fixed header rows, no timestamps. JSON: UTF-8
//! with keys sorted (the default map ordering of the JSON values used here).

use crate::flow::{BicharStrip, PolarizedStrip};
use crate::hadamard::{PolElement, WFElement};
use crate::verify::CheckResult;
use crate::wfdetect::{PolReportEntry, Verdict, WFReport};
use num_complex::Complex64;
use serde_json::{json, Map, Value};

/// The one float format every data file uses.
pub fn fmt_f64(v: f64) -> String {
    format!("{:.16e}", v)
}

fn push_floats(row: &mut Vec<String>, vals: &[f64]) {
    row.extend(vals.iter().map(|v| fmt_f64(*v)));
}

/// Trajectory CSV: `tau,x0..x3,xi0..xi3,q` and, when a polarized strip is
/// given, fibre entries appended row-major as `w<k>_re,w<k>_im` pairs.
pub fn strip_csv(strip: &BicharStrip, fibre: Option<&PolarizedStrip>) -> String {
    let mut header: Vec<String> = vec!["tau".into()];
    for i in 0..4 {
        header.push(format!("x{}", i));
    }
    for i in 0..4 {
        header.push(format!("xi{}", i));
    }
    header.push("q".into());
    let n_fibre = fibre.map_or(0, |p| p.fibre[0].len());
    for k in 0..n_fibre {
        header.push(format!("w{}_re", k));
        header.push(format!("w{}_im", k));
    }
    let mut out = header.join(",");
    out.push('\n');
    for k in 0..strip.taus.len() {
        let mut row: Vec<String> = vec![fmt_f64(strip.taus[k])];
        push_floats(&mut row, &strip.states[k]);
        row.push(fmt_f64(strip.q_values[k]));
        if let Some(p) = fibre {
            let w = &p.fibre[k];
            for i in 0..w.nrows() {
                for j in 0..w.ncols() {
                    row.push(fmt_f64(w[(i, j)].re));
                    row.push(fmt_f64(w[(i, j)].im));
                }
            }
        }
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Grid CSV: one row per grid point, coordinates first, then component
/// re/im pairs. Used for sampler output and loadable spinor-field grids.
pub fn grid_csv(sample: &crate::wfdetect::GridSample) -> String {
    let dim = sample.dim;
    let mut header: Vec<String> = (0..dim).map(|i| format!("s{}", i)).collect();
    for c in 0..sample.components.len() {
        header.push(format!("u{}_re", c));
        header.push(format!("u{}_im", c));
    }
    let mut out = header.join(",");
    out.push('\n');
    let mut idx = vec![0usize; dim];
    for flat in 0..sample.n_points() {
        let mut rem = flat;
        for ax in (0..dim).rev() {
            idx[ax] = rem % sample.shape[ax];
            rem /= sample.shape[ax];
        }
        let mut row: Vec<String> = (0..dim)
            .map(|ax| fmt_f64(sample.origin[ax] + sample.spacing * idx[ax] as f64))
            .collect();
        for comp in &sample.components {
            row.push(fmt_f64(comp[flat].re));
            row.push(fmt_f64(comp[flat].im));
        }
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

fn float_array(vals: &[f64]) -> Value {
    Value::Array(vals.iter().map(|v| json!(v)).collect())
}

fn complex_split(vals: &[Complex64]) -> (Value, Value) {
    (
        Value::Array(vals.iter().map(|v| json!(v.re)).collect()),
        Value::Array(vals.iter().map(|v| json!(v.im)).collect()),
    )
}

fn wf_record(e: &WFElement, fibre: Option<&[Complex64]>, diagnostics: Map<String, Value>) -> Value {
    let mut m = Map::new();
    m.insert("x".into(), float_array(&e.x));
    m.insert("y".into(), float_array(&e.y));
    m.insert("xi".into(), float_array(&e.xi));
    m.insert("eta".into(), float_array(&e.eta));
    m.insert("frequency_flag".into(), json!(e.frequency_flag));
    let (re, im) = match fibre {
        Some(f) => complex_split(f),
        None => (Value::Array(vec![]), Value::Array(vec![])),
    };
    m.insert("fibre_re".into(), re);
    m.insert("fibre_im".into(), im);
    m.insert("diagnostics".into(), Value::Object(diagnostics));
    Value::Object(m)
}

/// Wave front prediction records: the shared JSON schema with an empty
/// fibre and a `diagonal` diagnostic.
pub fn wf_elements_json(elements: &[WFElement]) -> Value {
    Value::Array(
        elements
            .iter()
            .map(|e| {
                let mut d = Map::new();
                d.insert("diagonal".into(), json!(e.diagonal));
                wf_record(e, None, d)
            })
            .collect(),
    )
}

/// Polarization prediction records: fibre matrices flattened row-major.
pub fn pol_elements_json(elements: &[PolElement]) -> Value {
    Value::Array(
        elements
            .iter()
            .map(|e| {
                let mut d = Map::new();
                d.insert("diagonal".into(), json!(e.wf.diagonal));
                let mut flat = Vec::with_capacity(16);
                for i in 0..4 {
                    for j in 0..4 {
                        flat.push(e.fibre[(i, j)]);
                    }
                }
                wf_record(&e.wf, Some(&flat), d)
            })
            .collect(),
    )
}

fn verdict_str(v: Verdict) -> &'static str {
    match v {
        Verdict::Regular => "regular",
        Verdict::Singular => "singular",
        Verdict::Inconclusive => "inconclusive",
    }
}

/// Detector report records: the shared schema with base/direction in the
/// `x`/`xi` slots and slope/residual diagnostics.
pub fn wf_report_json(report: &WFReport) -> Value {
    Value::Array(
        report
            .entries
            .iter()
            .map(|e| {
                let mut m = Map::new();
                m.insert("x".into(), float_array(&e.base));
                m.insert("y".into(), Value::Array(vec![]));
                m.insert("xi".into(), float_array(&e.direction));
                m.insert("eta".into(), Value::Array(vec![]));
                m.insert("frequency_flag".into(), json!(e.direction.first().map_or(false, |v| *v > 0.0)));
                m.insert("fibre_re".into(), Value::Array(vec![]));
                m.insert("fibre_im".into(), Value::Array(vec![]));
                let mut d = Map::new();
                d.insert("slope".into(), json!(e.slope));
                d.insert("residual".into(), json!(e.residual));
                d.insert("max_amp".into(), json!(e.max_amp));
                d.insert("verdict".into(), json!(verdict_str(e.verdict)));
                m.insert("diagnostics".into(), Value::Object(d));
                Value::Object(m)
            })
            .collect(),
    )
}

/// Polarization detector records: fibre vector plus dominance diagnostic.
pub fn pol_report_json(entries: &[PolReportEntry]) -> Value {
    Value::Array(
        entries
            .iter()
            .map(|e| {
                let mut m = Map::new();
                m.insert("x".into(), float_array(&e.base));
                m.insert("y".into(), Value::Array(vec![]));
                m.insert("xi".into(), float_array(&e.direction));
                m.insert("eta".into(), Value::Array(vec![]));
                m.insert("frequency_flag".into(), json!(e.direction.first().map_or(false, |v| *v > 0.0)));
                let (re, im) = complex_split(&e.fibre);
                m.insert("fibre_re".into(), re);
                m.insert("fibre_im".into(), im);
                let mut d = Map::new();
                d.insert("dominance".into(), json!(e.dominance));
                d.insert("verdict".into(), json!(verdict_str(e.verdict)));
                m.insert("diagnostics".into(), Value::Object(d));
                Value::Object(m)
            })
            .collect(),
    )
}

/// Detector CSV summary: `base..,direction..,slope,verdict`.
pub fn wf_report_csv(report: &WFReport) -> String {
    let dim = report.entries.first().map_or(1, |e| e.base.len());
    let mut header: Vec<String> = (0..dim).map(|i| format!("base{}", i)).collect();
    header.extend((0..dim).map(|i| format!("dir{}", i)));
    header.push("slope".into());
    header.push("verdict".into());
    let mut out = header.join(",");
    out.push('\n');
    for e in &report.entries {
        let mut row: Vec<String> = Vec::new();
        push_floats(&mut row, &e.base);
        push_floats(&mut row, &e.direction);
        row.push(fmt_f64(e.slope));
        row.push(verdict_str(e.verdict).to_string());
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Verification suite JSON: one record per named check.
pub fn checks_json(results: &[CheckResult]) -> Value {
    Value::Array(
        results
            .iter()
            .map(|r| {
                let mut m = Map::new();
                m.insert("name".into(), json!(r.name));
                m.insert("max_residual".into(), json!(r.max_residual));
                m.insert("tolerance".into(), json!(r.tolerance));
                m.insert("pass".into(), json!(r.pass));
                Value::Object(m)
            })
            .collect(),
    )
}

/// Canonical JSON rendering: pretty printed with sorted keys and a trailing
/// newline, so identical values yield identical bytes.
pub fn render_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable value");
    s.push('\n');
    s
}
