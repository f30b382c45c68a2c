//! Limiting dispersion relation `Δ(λ, μ) = det(λI − a0⁰ − iμ a1⁰ + μ² D)`,
//! its root curves and generalized algebraic multiplicities.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::degree::{winding_number, Contour};
use crate::error::{Error, Result};
use crate::linalg::{c, eigenvalues_real, I};
use crate::model::{CoefficientModel, ModelCase};
use crate::par;
use crate::poly::{poly_det, Poly};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum BranchKind {
    Limiting,
    Perturbed(f64),
}

impl fmt::Display for BranchKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BranchKind::Limiting => write!(f, "limiting"),
            BranchKind::Perturbed(eps) => write!(f, "perturbed:{eps}"),
        }
    }
}

impl std::str::FromStr for BranchKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "limiting" {
            return Ok(BranchKind::Limiting);
        }
        s.strip_prefix("perturbed:")
            .and_then(|e| e.parse().ok())
            .map(BranchKind::Perturbed)
            .ok_or_else(|| Error::domain(format!("unknown branch kind '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralBranch {
    /// 1-based label.
    pub branch_id: usize,
    pub kind: BranchKind,
    pub samples: Vec<(f64, Complex64)>,
    pub gaps: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MultiplicityReport {
    pub lambda0: Complex64,
    /// Real μ-roots of `Δ(λ0, ·)` in the window with the λ-order of `λ0`.
    pub mu_roots: Vec<(f64, usize)>,
    /// `None` when `Δ(λ0, ·)` vanishes identically.
    pub m_ga: Option<usize>,
    pub flat_branch: bool,
}

fn d_entry(case: ModelCase, i: usize) -> f64 {
    match case {
        ModelCase::C1 => 1.0,
        ModelCase::C2 { m } => {
            if i < m {
                1.0
            } else {
                0.0
            }
        }
        ModelCase::C3 => 0.0,
    }
}

/// The λ-polynomial `Δ(·, μ)`, monic of degree `n`.
pub fn lambda_polynomial(model: &CoefficientModel, mu: f64) -> Poly {
    let n = model.n;
    let rows: Vec<Vec<Poly>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let mut k = c(-model.a0_lim[(i, j)], 0.0) - I * (mu * model.a1_lim[(i, j)]);
                    if i == j {
                        k += mu * mu * d_entry(model.case, i);
                        Poly(vec![k, c(1.0, 0.0)])
                    } else {
                        Poly::constant(k)
                    }
                })
                .collect()
        })
        .collect();
    poly_det(&rows)
}

/// The μ-polynomial `Δ(λ0, ·)`, of degree at most `2n`.
pub fn mu_polynomial(model: &CoefficientModel, lambda0: Complex64) -> Poly {
    let n = model.n;
    let rows: Vec<Vec<Poly>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let delta = if i == j { 1.0 } else { 0.0 };
                    Poly::quadratic(
                        lambda0 * delta - model.a0_lim[(i, j)],
                        -I * model.a1_lim[(i, j)],
                        c(delta * d_entry(model.case, i), 0.0),
                    )
                })
                .collect()
        })
        .collect();
    poly_det(&rows)
}

pub fn dispersion_value(model: &CoefficientModel, lambda: Complex64, mu: f64) -> Complex64 {
    let n = model.n;
    let m = crate::linalg::CMatrix::from_fn(n, n, |i, j| {
        let mut v = c(-model.a0_lim[(i, j)], 0.0) - I * (mu * model.a1_lim[(i, j)]);
        if i == j {
            v += lambda + mu * mu * d_entry(model.case, i);
        }
        v
    });
    crate::linalg::det(&m)
}

fn sort_desc(roots: &mut [Complex64]) {
    roots.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));
}

/// All `n` roots of `Δ(·, μ)` with multiplicity, sorted by decreasing real
/// part, then decreasing imaginary part.
pub fn dispersion_roots(model: &CoefficientModel, mu: f64) -> Result<Vec<Complex64>> {
    let mut roots = lambda_polynomial(model, mu).roots()?;
    if roots.len() != model.n {
        return Err(Error::NumericalFailure {
            message: format!("expected {} roots at mu = {mu}, found {}", model.n, roots.len()),
            residuals: vec![],
        });
    }
    sort_desc(&mut roots);
    Ok(roots)
}

/// Spectral abscissa of `a0⁰` exceeds `1e-10`.
pub fn limiting_instability_hint(model: &CoefficientModel) -> bool {
    eigenvalues_real(&model.a0_lim)
        .map(|ev| ev.iter().any(|z| z.re > 1e-10))
        .unwrap_or(false)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for k in 0..used.len() {
            if !used[k] {
                used[k] = true;
                prefix.push(k);
                rec(prefix, used, out);
                prefix.pop();
                used[k] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Reorder `next` so that `next[j]` continues `prev[j]`, minimizing the
/// total displacement. Greedy for large `n`.
pub(crate) fn match_roots(prev: &[Complex64], next: &[Complex64]) -> Vec<Complex64> {
    let n = prev.len();
    if n <= 6 {
        let mut best: Option<(f64, Vec<usize>)> = None;
        for p in permutations(n) {
            let cost: f64 = (0..n).map(|j| (next[p[j]] - prev[j]).norm()).sum();
            if best.as_ref().map_or(true, |(b, _)| cost < *b) {
                best = Some((cost, p));
            }
        }
        let p = best.map(|b| b.1).unwrap_or_default();
        p.iter().map(|&k| next[k]).collect()
    } else {
        let mut taken = vec![false; n];
        prev.iter()
            .map(|z| {
                let k = (0..n)
                    .filter(|&k| !taken[k])
                    .min_by(|&a, &b| (next[a] - z).norm().total_cmp(&(next[b] - z).norm()))
                    .expect("free root");
                taken[k] = true;
                next[k]
            })
            .collect()
    }
}

fn min_separation(roots: &[Complex64]) -> f64 {
    let mut sep = f64::INFINITY;
    for i in 0..roots.len() {
        for j in i + 1..roots.len() {
            sep = sep.min((roots[i] - roots[j]).norm());
        }
    }
    sep
}

const MAX_BISECTIONS: u32 = 12;
const COLLISION_FACTOR: f64 = 10.0;
const COINCIDENCE: f64 = 1e-7;

struct Sweep<'a> {
    model: &'a CoefficientModel,
    points: Vec<(f64, Vec<Complex64>)>,
    /// `(μ, separation)` at endpoints of cells that stayed ambiguous.
    unresolved: Vec<(f64, f64)>,
}

impl Sweep<'_> {
    fn advance(&mut self, mu_b: f64, roots_b: Vec<Complex64>, depth: u32) -> Result<()> {
        let (mu_a, roots_a) = self.points.last().cloned().expect("sweep has a start point");
        let matched = match_roots(&roots_a, &roots_b);
        if self.model.n == 1 {
            self.points.push((mu_b, matched));
            return Ok(());
        }
        let jump = roots_a.iter().zip(&matched).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        let sep_a = min_separation(&roots_a);
        let sep_b = min_separation(&matched);
        // coincident at both ends: any labeling is continuous
        let scale = 1.0 + roots_a.iter().chain(&matched).map(|z| z.norm()).fold(0.0, f64::max);
        let coincident = sep_a.max(sep_b) <= COINCIDENCE * scale;
        if coincident || sep_a.min(sep_b) >= COLLISION_FACTOR * jump {
            self.points.push((mu_b, matched));
            return Ok(());
        }
        if depth >= MAX_BISECTIONS {
            self.unresolved.push((mu_a, sep_a));
            self.unresolved.push((mu_b, sep_b));
            self.points.push((mu_b, matched));
            return Ok(());
        }
        let mid = 0.5 * (mu_a + mu_b);
        let roots_mid = dispersion_roots(self.model, mid)?;
        self.advance(mid, roots_mid, depth + 1)?;
        self.advance(mu_b, roots_b, depth + 1)
    }
}

/// Inclusive equispaced grid of `count` points.
pub fn grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    (0..count)
        .map(|k| if k + 1 == count { hi } else { lo + (hi - lo) * (k as f64 / (count - 1) as f64) })
        .collect()
}

/// Sample the `n` limiting curves on `[μ_lo, μ_hi]` and label them
/// continuously. Cells where two curves come closer than ten times the
/// local jump are bisected up to twelve times; collisions that remain
/// ambiguous become gaps at the point of smallest separation.
pub fn sample_branches(model: &CoefficientModel, mu_lo: f64, mu_hi: f64, count: usize) -> Result<Vec<SpectralBranch>> {
    if !(mu_lo < mu_hi) || count < 2 {
        return Err(Error::domain("need mu_lo < mu_hi and at least two grid points"));
    }
    let mus = grid(mu_lo, mu_hi, count);
    let roots: Vec<Result<Vec<Complex64>>> = par::map(&mus, |&mu| dispersion_roots(model, mu));
    let mut roots = roots.into_iter().collect::<Result<Vec<_>>>()?;

    let first = std::mem::take(&mut roots[0]);
    let mut sweep = Sweep { model, points: vec![(mus[0], first)], unresolved: Vec::new() };
    for (mu, r) in mus.iter().zip(roots).skip(1) {
        sweep.advance(*mu, r, 0)?;
    }

    let gaps = collision_gaps(&sweep.points, &sweep.unresolved);
    let n = model.n;
    let branches = (0..n)
        .map(|j| SpectralBranch {
            branch_id: j + 1,
            kind: BranchKind::Limiting,
            samples: sweep
                .points
                .iter()
                .filter(|(mu, _)| !gaps.contains(mu))
                .map(|(mu, r)| (*mu, r[j]))
                .collect(),
            gaps: gaps.clone(),
        })
        .collect();
    Ok(branches)
}

/// Group unresolved endpoints into runs of consecutive sweep points and
/// keep the point of minimum separation from each run.
fn collision_gaps(points: &[(f64, Vec<Complex64>)], unresolved: &[(f64, f64)]) -> Vec<f64> {
    if unresolved.is_empty() {
        return Vec::new();
    }
    let flagged: Vec<bool> = points
        .iter()
        .map(|(mu, _)| unresolved.iter().any(|(u, _)| u == mu))
        .collect();
    let sep_of = |mu: f64| unresolved.iter().filter(|(u, _)| *u == mu).map(|(_, s)| *s).fold(f64::INFINITY, f64::min);
    let mut gaps = Vec::new();
    let mut k = 0;
    while k < points.len() {
        if !flagged[k] {
            k += 1;
            continue;
        }
        let mut best = (sep_of(points[k].0), points[k].0);
        while k < points.len() && flagged[k] {
            let s = sep_of(points[k].0);
            if s < best.0 {
                best = (s, points[k].0);
            }
            k += 1;
        }
        gaps.push(best.1);
    }
    gaps
}

fn is_real_root(z: Complex64) -> bool {
    z.im.abs() < 1e-8 * (1.0 + z.re.abs())
}

const FLAT_SAMPLES: usize = 64;
const FLAT_THRESHOLD: f64 = 1e-12;

/// λ-order of `λ0` as a zero of `Δ(·, μ)`, as a winding count on a circle
/// reaching half way to the nearest other root.
pub fn order_at(model: &CoefficientModel, lambda0: Complex64, mu: f64) -> Result<usize> {
    let p = lambda_polynomial(model, mu);
    let roots = p.roots()?;
    let cluster = 1e-6 * (1.0 + lambda0.norm());
    let nearest = roots
        .iter()
        .map(|z| (z - lambda0).norm())
        .filter(|d| *d > cluster)
        .fold(f64::INFINITY, f64::min);
    let radius = if nearest.is_finite() { 0.5 * nearest } else { 0.5 };
    if radius <= 2.0 * cluster {
        return Err(Error::Isolation { lambda: lambda0, distance: nearest });
    }
    let report = winding_number(|z| Ok(p.eval(z)), &Contour::circle(lambda0, radius)?)?;
    Ok(report.count.max(0) as usize)
}

/// Generalized algebraic multiplicity of `λ0` over the real μ in `window`.
pub fn generalized_multiplicity(
    model: &CoefficientModel,
    lambda0: Complex64,
    window: (f64, f64),
    tol: f64,
) -> Result<MultiplicityReport> {
    if !(tol > 0.0) {
        return Err(Error::domain("tol must be positive"));
    }
    let (lo, hi) = window;
    if !(lo < hi) {
        return Err(Error::domain("empty mu window"));
    }
    let p = mu_polynomial(model, lambda0);
    let flat = grid(lo, hi, FLAT_SAMPLES).iter().all(|&mu| {
        let z = c(mu, 0.0);
        p.eval(z).norm() <= FLAT_THRESHOLD * p.eval_scale(z).max(1.0)
    });
    if flat {
        return Ok(MultiplicityReport { lambda0, mu_roots: Vec::new(), m_ga: None, flat_branch: true });
    }

    let mut mus: Vec<f64> = p
        .roots()?
        .into_iter()
        .filter(|z| is_real_root(*z))
        .map(|z| z.re)
        .filter(|mu| *mu >= lo && *mu <= hi)
        .filter(|&mu| {
            let z = c(mu, 0.0);
            p.eval(z).norm() <= tol * p.eval_scale(z).max(1.0)
        })
        .collect();
    mus.sort_by(f64::total_cmp);
    mus.dedup_by(|a, b| (*a - *b).abs() <= 1e-7 * (1.0 + b.abs()));

    let mut mu_roots = Vec::with_capacity(mus.len());
    for mu in mus {
        let order = order_at(model, lambda0, mu)?;
        if order > 0 {
            mu_roots.push((mu, order));
        }
    }
    let m_ga = mu_roots.iter().map(|(_, k)| k).sum();
    Ok(MultiplicityReport { lambda0, mu_roots, m_ga: Some(m_ga), flat_branch: false })
}
