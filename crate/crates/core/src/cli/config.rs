//! `key = value` run configuration with `[section]` headers.
//!
//! ```text
//! # GLE pattern near the centre
//! [model]
//! name = gle
//! p1 = 0.5
//! delta = 0.05
//!
//! [numerics]
//! tol = 1e-10
//! mu = -1:1:101
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};

const SECTIONS: &[(&str, &[&str])] = &[
    ("model", &["name", "omega", "p1", "delta", "c0", "varpi0", "eps", "htilde", "a0"]),
    (
        "numerics",
        &["tol", "margin", "grid", "mu", "window", "lambda", "center", "radius", "s", "branch", "candidates"],
    ),
    ("output", &["out", "svg"]),
];

fn known_in(section: &str, key: &str) -> bool {
    SECTIONS.iter().any(|(s, keys)| (section.is_empty() || *s == section) && keys.contains(&key))
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Config {
    origin: String,
    values: BTreeMap<String, (String, usize)>,
}

impl Config {
    pub fn load(path: &Path) -> Result<Config> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::domain(format!("cannot read config {}: {e}", path.display())))?;
        Config::parse(&text, &path.display().to_string())
    }

    /// Keys outside any section may come from any section.
    pub fn parse(text: &str, origin: &str) -> Result<Config> {
        let mut cfg = Config { origin: origin.to_string(), values: BTreeMap::new() };
        let mut section = String::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let err = |msg: String| Error::domain(format!("{origin}:{line_no}: {msg}"));
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest.strip_suffix(']').ok_or_else(|| err(format!("malformed section header '{line}'")))?.trim();
                if !SECTIONS.iter().any(|(s, _)| *s == name) {
                    return Err(err(format!("unknown section [{name}]")));
                }
                section = name.to_string();
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| err(format!("expected 'key = value', got '{line}'")))?;
            let (key, value) = (key.trim(), value.trim());
            if key.is_empty() || value.is_empty() {
                return Err(err("empty key or value".into()));
            }
            if !known_in(&section, key) {
                let place = if section.is_empty() { String::new() } else { format!(" in [{section}]") };
                return Err(err(format!("unknown key '{key}'{place}")));
            }
            if cfg.values.insert(key.to_string(), (value.to_string(), line_no)).is_some() {
                return Err(err(format!("duplicate key '{key}'")));
            }
        }
        Ok(cfg)
    }

    fn typed<T>(&self, key: &str, what: &str, parse: impl Fn(&str) -> Result<T>) -> Result<Option<T>> {
        match self.values.get(key) {
            None => Ok(None),
            Some((v, line)) => parse(v).map(Some).map_err(|e| {
                Error::domain(format!("{}:{line}: cannot read '{v}' as {what} for '{key}' ({e})", self.origin))
            }),
        }
    }

    pub fn str(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(|(v, _)| v.as_str())
    }

    pub fn f64(&self, key: &str) -> Result<Option<f64>> {
        self.typed(key, "a number", parse_f64)
    }

    pub fn usize(&self, key: &str) -> Result<Option<usize>> {
        self.typed(key, "a count", |s| s.parse().map_err(|_| Error::domain("not a non-negative integer")))
    }

    pub fn complex(&self, key: &str) -> Result<Option<Complex64>> {
        self.typed(key, "a complex number", parse_complex)
    }

    pub fn range(&self, key: &str) -> Result<Option<Range>> {
        self.typed(key, "a range lo:hi:count", parse_range)
    }

    pub fn window(&self, key: &str) -> Result<Option<(f64, f64)>> {
        self.typed(key, "a window lo:hi", parse_window)
    }

    pub fn list(&self, key: &str) -> Result<Option<Vec<f64>>> {
        self.typed(key, "a list of numbers", parse_list)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Range {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

pub fn parse_f64(s: &str) -> Result<f64> {
    let v: f64 = s.trim().parse().map_err(|_| Error::domain(format!("'{s}' is not a number")))?;
    if !v.is_finite() {
        return Err(Error::domain(format!("'{s}' is not finite")));
    }
    Ok(v)
}

/// `re,im`, or a bare real number.
pub fn parse_complex(s: &str) -> Result<Complex64> {
    match s.split_once(',') {
        Some((re, im)) => Ok(Complex64::new(parse_f64(re)?, parse_f64(im)?)),
        None => Ok(Complex64::new(parse_f64(s)?, 0.0)),
    }
}

/// Inclusive grid `lo:hi:count`, `count ≥ 2`.
pub fn parse_range(s: &str) -> Result<Range> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::domain(format!("'{s}' is not lo:hi:count")));
    }
    let (lo, hi) = (parse_f64(parts[0])?, parse_f64(parts[1])?);
    let count: usize = parts[2].trim().parse().map_err(|_| Error::domain(format!("bad count in '{s}'")))?;
    if count < 2 || !(lo < hi) {
        return Err(Error::domain(format!("range '{s}' needs lo < hi and count >= 2")));
    }
    Ok(Range { lo, hi, count })
}

pub fn parse_window(s: &str) -> Result<(f64, f64)> {
    let (lo, hi) = s.split_once(':').ok_or_else(|| Error::domain(format!("'{s}' is not lo:hi")))?;
    let (lo, hi) = (parse_f64(lo)?, parse_f64(hi)?);
    if !(lo < hi) {
        return Err(Error::domain(format!("window '{s}' needs lo < hi")));
    }
    Ok((lo, hi))
}

pub fn parse_list(s: &str) -> Result<Vec<f64>> {
    s.split(',').map(parse_f64).collect()
}
