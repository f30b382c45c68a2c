//! CSV, JSON and SVG output.
//!
//! Floats are written with Rust's shortest round-trip formatting, so CSV
//! files parse back to the exact stored values.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::Serialize;

use crate::dispersion::{BranchKind, SpectralBranch};
use crate::error::{Error, Result};
use crate::perturbation::{HomotopyCount, SpectralPoint, Verdict};

pub const CSV_HEADER: [&str; 5] = ["mu", "branch", "re_lambda", "im_lambda", "kind"];

fn csv_error(e: csv::Error) -> Error {
    Error::domain(format!("csv: {e}"))
}

/// One row per sample; a gap is a row with `NaN` for both λ parts.
pub fn branches_to_csv(branches: &[SpectralBranch]) -> Result<String> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(CSV_HEADER).map_err(csv_error)?;
    for b in branches {
        let kind = b.kind.to_string();
        let id = b.branch_id.to_string();
        let mut rows: Vec<(f64, Option<Complex64>)> = b.samples.iter().map(|(mu, z)| (*mu, Some(*z))).collect();
        rows.extend(b.gaps.iter().map(|g| (*g, None)));
        rows.sort_by(|a, b| a.0.total_cmp(&b.0));
        for (mu, z) in rows {
            let (re, im) = z.map_or((f64::NAN, f64::NAN), |z| (z.re, z.im));
            w.write_record([mu.to_string(), id.clone(), re.to_string(), im.to_string(), kind.clone()])
                .map_err(csv_error)?;
        }
    }
    let bytes = w.into_inner().map_err(|e| Error::domain(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

/// Inverse of [`branches_to_csv`]. Branches come back in order of first
/// appearance.
pub fn branches_from_csv(text: &str) -> Result<Vec<SpectralBranch>> {
    let mut r = csv::ReaderBuilder::new().from_reader(text.as_bytes());
    let header = r.headers().map_err(csv_error)?.clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(Error::domain(format!("unexpected csv header {:?}", header.iter().collect::<Vec<_>>())));
    }
    let mut out: Vec<SpectralBranch> = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec.map_err(csv_error)?;
        let bad = |what: &str| Error::domain(format!("csv line {}: bad {what}", line + 2));
        let num = |k: usize, what: &str| rec[k].parse::<f64>().map_err(|_| bad(what));
        let mu = num(0, "mu")?;
        let id: usize = rec[1].parse().map_err(|_| bad("branch"))?;
        let (re, im) = (num(2, "re_lambda")?, num(3, "im_lambda")?);
        let kind: BranchKind = rec[4].parse().map_err(|_| bad("kind"))?;
        let idx = match out.iter().position(|b| b.branch_id == id && b.kind == kind) {
            Some(i) => i,
            None => {
                out.push(SpectralBranch { branch_id: id, kind, samples: Vec::new(), gaps: Vec::new() });
                out.len() - 1
            }
        };
        if re.is_nan() && im.is_nan() {
            out[idx].gaps.push(mu);
        } else {
            out[idx].samples.push((mu, Complex64::new(re, im)));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct Witness {
    pub re: f64,
    pub im: f64,
    pub mu: f64,
}

impl From<&SpectralPoint> for Witness {
    fn from(p: &SpectralPoint) -> Self {
        Witness { re: p.lambda.re, im: p.lambda.im, mu: p.mu }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CountEntry {
    pub s: f64,
    pub count: Option<i64>,
}

impl From<&HomotopyCount> for CountEntry {
    fn from(h: &HomotopyCount) -> Self {
        CountEntry { s: h.s, count: h.count }
    }
}

/// Common envelope of every JSON report.
#[derive(Debug, Clone, Serialize)]
pub struct JsonReport {
    pub command: String,
    pub model: String,
    pub params: BTreeMap<String, f64>,
    pub verdict: Option<Verdict>,
    pub witness: Option<Witness>,
    pub counts: Vec<CountEntry>,
    pub tolerances: BTreeMap<String, f64>,
    pub runtime_ms: Option<f64>,
    pub result: serde_json::Value,
}

impl JsonReport {
    pub fn new(command: &str, model: &str, params: &[(String, f64)]) -> Self {
        JsonReport {
            command: command.to_string(),
            model: model.to_string(),
            params: params.iter().cloned().collect(),
            verdict: None,
            witness: None,
            counts: Vec::new(),
            tolerances: BTreeMap::new(),
            runtime_ms: None,
            result: serde_json::Value::Null,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

fn nice_step(span: f64) -> f64 {
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let r = raw / mag;
    mag * if r < 1.5 {
        1.0
    } else if r < 3.5 {
        2.0
    } else if r < 7.5 {
        5.0
    } else {
        10.0
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Static SVG 1.1 plot of branches in the complex λ-plane. Each branch is
/// drawn as polylines broken at its gaps.
pub fn branches_svg(branches: &[SpectralBranch], title: &str) -> String {
    let (w, h) = (640.0, 480.0);
    let (ml, mr, mt, mb) = (70.0, 20.0, 40.0, 50.0);
    let pts = branches.iter().flat_map(|b| b.samples.iter().map(|(_, z)| *z));
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for z in pts {
        x0 = x0.min(z.re);
        x1 = x1.max(z.re);
        y0 = y0.min(z.im);
        y1 = y1.max(z.im);
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (-1.0, 1.0, -1.0, 1.0);
    }
    let pad = |lo: f64, hi: f64| {
        let span = (hi - lo).max(1e-9 * (1.0 + lo.abs().max(hi.abs())));
        (lo - 0.05 * span, hi + 0.05 * span)
    };
    let (x0, x1) = pad(x0, x1);
    let (y0, y1) = pad(y0, y1);
    let px = |x: f64| ml + (x - x0) / (x1 - x0) * (w - ml - mr);
    let py = |y: f64| h - mb - (y - y0) / (y1 - y0) * (h - mt - mb);

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#, w / 2.0, escape(title));
    let _ = writeln!(
        s,
        r#"<rect x="{ml}" y="{mt}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        w - ml - mr,
        h - mt - mb
    );
    for (lo, hi, horizontal) in [(x0, x1, true), (y0, y1, false)] {
        let step = nice_step(hi - lo);
        let mut t = (lo / step).ceil() * step;
        while t <= hi {
            let label = format!("{}", (t / step).round() * step);
            let label = if label.len() > 8 { format!("{t:.3e}") } else { label };
            if horizontal {
                let x = px(t);
                let _ = writeln!(s, r##"<line x1="{x:.2}" y1="{}" x2="{x:.2}" y2="{}" stroke="#ddd"/>"##, mt, h - mb);
                let _ = writeln!(s, r#"<text x="{x:.2}" y="{}" text-anchor="middle">{label}</text>"#, h - mb + 16.0);
            } else {
                let y = py(t);
                let _ = writeln!(s, r##"<line x1="{ml}" y1="{y:.2}" x2="{}" y2="{y:.2}" stroke="#ddd"/>"##, w - mr);
                let _ = writeln!(s, r#"<text x="{}" y="{:.2}" text-anchor="end">{label}</text>"#, ml - 6.0, y + 4.0);
            }
            t += step;
        }
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">Re λ</text>"#, ml + (w - ml - mr) / 2.0, h - 12.0);
    let _ = writeln!(
        s,
        r#"<text x="18" y="{0}" text-anchor="middle" transform="rotate(-90 18 {0})">Im λ</text>"#,
        mt + (h - mt - mb) / 2.0
    );
    for (k, b) in branches.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let mut runs: Vec<Vec<Complex64>> = vec![Vec::new()];
        for (i, (mu, z)) in b.samples.iter().enumerate() {
            let prev = if i > 0 { Some(b.samples[i - 1].0) } else { None };
            if prev.is_some_and(|p| b.gaps.iter().any(|g| *g > p && *g < *mu)) {
                runs.push(Vec::new());
            }
            runs.last_mut().expect("run").push(*z);
        }
        for run in runs.iter().filter(|r| !r.is_empty()) {
            let coords: Vec<String> = run.iter().map(|z| format!("{:.2},{:.2}", px(z.re), py(z.im))).collect();
            let _ = writeln!(
                s,
                r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"><title>branch {} ({})</title></polyline>"#,
                coords.join(" "),
                b.branch_id,
                b.kind
            );
        }
    }
    s.push_str("</svg>\n");
    s
}

/// Header `xi,x,y`.
pub fn orbit_to_csv(samples: &[(f64, [f64; 2])]) -> String {
    let mut s = String::from("xi,x,y\n");
    for (xi, z) in samples {
        let _ = writeln!(s, "{xi},{},{}", z[0], z[1]);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    fn branch(id: usize, n: usize) -> SpectralBranch {
        SpectralBranch {
            branch_id: id,
            kind: BranchKind::Limiting,
            samples: (0..n).map(|k| (0.1 * k as f64, c(1.0 / 3.0 + k as f64, -0.7 * k as f64))).collect(),
            gaps: vec![],
        }
    }

    #[test]
    fn empty_csv_is_header_only() {
        assert_eq!(branches_to_csv(&[]).unwrap(), "mu,branch,re_lambda,im_lambda,kind\n");
    }

    #[test]
    fn three_rows_constant_id() {
        let csv = branches_to_csv(&[branch(2, 3)]).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 4);
        assert!(lines[1..].iter().all(|l| l.split(',').nth(1) == Some("2")));
    }

    #[test]
    fn csv_round_trip_with_gap_and_perturbed_kind() {
        let mut a = branch(1, 5);
        a.samples.remove(2);
        a.gaps = vec![0.2];
        let mut b = branch(1, 4);
        b.kind = BranchKind::Perturbed(1e-4);
        let back = branches_from_csv(&branches_to_csv(&[a.clone(), b.clone()]).unwrap()).unwrap();
        assert_eq!(back, vec![a, b]);
    }

    #[test]
    fn bad_csv_lines_are_reported() {
        let err = branches_from_csv("mu,branch,re_lambda,im_lambda,kind\n0,1,x,0,limiting\n").unwrap_err();
        assert!(err.to_string().contains("line 2"));
    }

    #[test]
    fn svg_has_axis_labels() {
        let svg = branches_svg(&[branch(1, 4)], "test <curves>");
        assert!(svg.contains("Re λ") && svg.contains("Im λ"));
        assert!(svg.contains("&lt;curves&gt;"));
        assert!(svg.contains("<polyline"));
        assert!(branches_svg(&[], "empty").ends_with("</svg>\n"));
    }

    #[test]
    fn json_envelope_fields() {
        let r = JsonReport::new("verdict", "gle", &[("p1".into(), 0.5)]);
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        for k in ["model", "params", "verdict", "witness", "counts", "tolerances", "runtime_ms"] {
            assert!(v.get(k).is_some(), "{k}");
        }
        assert!(v["runtime_ms"].is_null());
    }
}
