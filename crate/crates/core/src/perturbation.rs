//! Perturbed spectral points, homotopy count sweeps, continuation of
//! perturbed curves and stability verdicts.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::degree::{locate_zeros, winding_number, Contour, Zero};
use crate::dispersion::{dispersion_roots, sample_branches, BranchKind, SpectralBranch};
use crate::error::{Error, Result};
use crate::linalg::{c, eigenvalues};
use crate::model::{limiting_system, CoefficientModel};
use crate::monodromy::{evans, evans_with_derivative, homotopy_evans};
use crate::ode::Tolerances;
use crate::par;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PointSource {
    Limiting,
    Perturbed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralPoint {
    pub lambda: Complex64,
    /// Bloch parameter reduced into `(−π/T, π/T]`.
    pub mu: f64,
    /// The unreduced μ at which the point was computed.
    pub mu_sampled: f64,
    pub eps: f64,
    pub source: PointSource,
    pub multiplicity: usize,
}

/// `μ` reduced into `(−π/T, π/T]`.
pub fn reduce_mu(mu: f64, period: f64) -> f64 {
    let w = 2.0 * PI / period;
    let mut r = mu - w * (mu / w).round();
    if r <= -0.5 * w {
        r += w;
    } else if r > 0.5 * w {
        r -= w;
    }
    r
}

const ALIASES: i32 = 8;
const RADIUS_CAP: f64 = 0.5;
const SEPARATION_SLACK: f64 = 1.02;
const BOUNDARY_SAMPLES: usize = 64;

/// How `λ0` sits among the Evans zeros of the frozen system at `μ0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Isolation {
    /// λ-order of `λ0` as a zero of `Δ(·, μ0)`.
    pub order: usize,
    pub radius: f64,
    /// Distance to the nearest other root of `Δ(·, μ0 + 2πk/T_ε)`.
    pub nearest: f64,
    pub period: f64,
}

fn cluster_radius(lambda0: Complex64) -> f64 {
    1e-6 * (1.0 + lambda0.norm())
}

/// Roots of `Δ(·, μ0 + 2πk/T)` for `|k| ≤ 8`: the zeros of the frozen Evans
/// function near the origin.
fn alias_roots(model: &CoefficientModel, mu0: f64, period: f64) -> Result<Vec<(i32, Complex64)>> {
    let mut out = Vec::new();
    for k in -ALIASES..=ALIASES {
        let mu = mu0 + 2.0 * PI * k as f64 / period;
        out.extend(dispersion_roots(model, mu)?.into_iter().map(|z| (k, z)));
    }
    Ok(out)
}

/// Check that `λ0` is a root of `Δ(·, μ0)` and that a circle around it
/// contains no other zero of the frozen Evans function. The default radius
/// is half the distance to the nearest such zero, capped at 0.5.
pub fn isolate(model: &CoefficientModel, lambda0: Complex64, mu0: f64, eps: f64, radius: Option<f64>) -> Result<Isolation> {
    let period = model.period(eps)?;
    let cluster = cluster_radius(lambda0);
    let roots = alias_roots(model, mu0, period)?;
    let order = roots.iter().filter(|(k, z)| *k == 0 && (z - lambda0).norm() <= cluster).count();
    if order == 0 {
        let d = roots
            .iter()
            .filter(|(k, _)| *k == 0)
            .map(|(_, z)| (z - lambda0).norm())
            .fold(f64::INFINITY, f64::min);
        return Err(Error::precondition(format!(
            "{lambda0} is not a root of the dispersion relation at mu = {mu0} (nearest root at distance {d:.3e})"
        )));
    }
    let (nearest, witness) = roots
        .iter()
        .filter(|(k, z)| *k != 0 || (z - lambda0).norm() > cluster)
        .map(|(k, z)| ((z - lambda0).norm(), (*k, *z)))
        .fold((f64::INFINITY, (0, lambda0)), |a, b| if b.0 < a.0 { b } else { a });
    let radius = match radius {
        Some(r) if !(r > 0.0 && r.is_finite()) => return Err(Error::domain(format!("radius must be positive, got {r}"))),
        Some(r) => r,
        None => (0.5 * nearest).min(RADIUS_CAP),
    };
    if nearest <= radius * SEPARATION_SLACK {
        let (k, z) = witness;
        return Err(Error::precondition(format!(
            "circle of radius {radius} around {lambda0} also encloses the limiting root {z} at mu = {}",
            mu0 + 2.0 * PI * k as f64 / period
        )));
    }
    check_boundary(model, lambda0, radius, mu0, period)?;
    Ok(Isolation { order, radius, nearest, period })
}

/// Eigenvalues `α + iβ` of `A(λ)` on the circle must stay away from the
/// lattice `i(μ0 + 2πk/T)`.
fn check_boundary(model: &CoefficientModel, center: Complex64, radius: f64, mu0: f64, period: f64) -> Result<()> {
    for j in 0..BOUNDARY_SAMPLES {
        let theta = 2.0 * PI * j as f64 / BOUNDARY_SAMPLES as f64;
        let lambda = center + c(radius * theta.cos(), radius * theta.sin());
        let ev = eigenvalues(&limiting_system(model, lambda)?).ok_or_else(|| Error::NumericalFailure {
            message: format!("eigenvalue iteration failed at {lambda}"),
            residuals: vec![],
        })?;
        for nu in ev {
            let gap = nu.re.abs() + reduce_mu(nu.im - mu0, period).abs();
            if gap <= 1e-9 * (1.0 + nu.norm()) {
                return Err(Error::precondition(format!(
                    "boundary point {lambda} is a frozen spectral point (exponent {nu})"
                )));
            }
        }
    }
    Ok(())
}

fn locate_tol(tol: f64) -> f64 {
    (0.1 * tol.sqrt()).max(1e-10)
}

fn evans_zeros(
    model: &CoefficientModel,
    contour: &Contour,
    mu: f64,
    eps: f64,
    tol: f64,
) -> Result<Vec<Zero>> {
    let t = Tolerances::from_tol(tol);
    let mut df = |z| evans_with_derivative(model, z, mu, eps, t).map(|p| p.1);
    locate_zeros(|z| evans(model, z, mu, eps, t), Some(&mut df), contour, locate_tol(tol))
}

fn to_points(zeros: &[Zero], mu: f64, eps: f64, period: f64) -> Vec<SpectralPoint> {
    zeros
        .iter()
        .map(|z| SpectralPoint {
            lambda: z.lambda,
            mu: reduce_mu(mu, period),
            mu_sampled: mu,
            eps,
            source: PointSource::Perturbed,
            multiplicity: z.multiplicity,
        })
        .collect()
}

/// Zeros of `E(·, μ0, ε)` near a limiting spectral point `λ0`. Their
/// multiplicities add up to the order of `λ0` as a zero of `Δ(·, μ0)`.
pub fn perturbed_points(
    model: &CoefficientModel,
    lambda0: Complex64,
    mu0: f64,
    eps: f64,
    radius: Option<f64>,
    tol: f64,
) -> Result<Vec<SpectralPoint>> {
    if !(tol > 0.0) {
        return Err(Error::domain("tol must be positive"));
    }
    model.check_eps(eps)?;
    let iso = isolate(model, lambda0, mu0, eps, radius)?;
    let zeros = evans_zeros(model, &Contour::circle(lambda0, iso.radius)?, mu0, eps, tol)?;
    let total: usize = zeros.iter().map(|z| z.multiplicity).sum();
    if total != iso.order {
        return Err(Error::Consistency(format!(
            "found {total} Evans zeros within {} of {lambda0}, expected {}",
            iso.radius, iso.order
        )));
    }
    Ok(to_points(&zeros, mu0, eps, iso.period))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HomotopyCount {
    pub s: f64,
    pub count: Option<i64>,
    pub error: Option<String>,
}

/// Winding counts of `ℰ(s, ·, μ0, ε)` on the isolating circle around `λ0`.
/// A failure at one `s` is recorded and the sweep continues.
pub fn homotopy_count_sweep(
    model: &CoefficientModel,
    lambda0: Complex64,
    mu0: f64,
    eps: f64,
    radius: Option<f64>,
    s_grid: &[f64],
    tol: f64,
) -> Result<Vec<HomotopyCount>> {
    if let Some(s) = s_grid.iter().find(|s| !(0.0..=1.0).contains(*s)) {
        return Err(Error::domain(format!("homotopy parameter {s} outside [0, 1]")));
    }
    model.check_eps(eps)?;
    let iso = isolate(model, lambda0, mu0, eps, radius)?;
    let contour = Contour::circle(lambda0, iso.radius)?;
    let t = Tolerances::from_tol(tol);
    Ok(par::map(s_grid, |&s| {
        match winding_number(|z| homotopy_evans(model, s, z, mu0, eps, t), &contour) {
            Ok(r) => HomotopyCount { s, count: Some(r.count), error: None },
            Err(e) => HomotopyCount { s, count: None, error: Some(e.to_string()) },
        }
    }))
}

/// Closest distance of `[lo, hi]` to a point `kπ/T`.
fn kt_clearance(lo: f64, hi: f64, period: f64) -> (f64, i64) {
    let step = PI / period;
    let k_lo = (lo / step).floor() as i64 - 1;
    let k_hi = (hi / step).ceil() as i64 + 1;
    (k_lo..=k_hi)
        .map(|k| {
            let x = k as f64 * step;
            let d = if x < lo { lo - x } else if x > hi { x - hi } else { 0.0 };
            (d, k)
        })
        .fold((f64::INFINITY, 0), |a, b| if b.0 < a.0 { b } else { a })
}

const KT_MARGIN: f64 = 0.02;
const NEWTON_ITERATIONS: usize = 50;

/// Continue a limiting branch into the zeros of `E(·, μ, ε)` on
/// `μ ∈ interval`, one Newton solve per branch sample, each seeded from the
/// previous solution shifted along the limiting branch.
pub fn trace_curve(
    model: &CoefficientModel,
    branch: &SpectralBranch,
    interval: (f64, f64),
    eps: f64,
    tol: f64,
) -> Result<SpectralBranch> {
    if branch.kind != BranchKind::Limiting {
        return Err(Error::precondition("trace_curve needs a limiting branch"));
    }
    if !(tol > 0.0) {
        return Err(Error::domain("tol must be positive"));
    }
    let (lo, hi) = interval;
    if !(lo <= hi) {
        return Err(Error::domain("empty mu interval"));
    }
    model.check_eps(eps)?;
    let period = model.period(eps)?;
    let margin = KT_MARGIN * PI / period;
    let (clearance, k) = kt_clearance(lo, hi, period);
    if clearance < margin {
        return Err(Error::precondition(format!(
            "mu interval [{lo}, {hi}] comes within {clearance:.3e} of {k}π/T = {} (margin {margin:.3e})",
            k as f64 * PI / period
        )));
    }
    if let Some(g) = branch.gaps.iter().find(|g| **g >= lo && **g <= hi) {
        return Err(Error::precondition(format!("branch {} collides with another branch near mu = {g}", branch.branch_id)));
    }
    let samples: Vec<(f64, Complex64)> = branch.samples.iter().copied().filter(|(mu, _)| *mu >= lo && *mu <= hi).collect();
    if samples.is_empty() {
        return Err(Error::domain("no branch samples inside the mu interval"));
    }

    let t = Tolerances::from_tol(tol);
    let mut out = Vec::with_capacity(samples.len());
    let mut prev: Option<(f64, Complex64, Complex64)> = None;
    for &(mu, lim) in &samples {
        let trust = trust_radius(model, lim, mu, period)?;
        let mut z = match prev {
            Some((_, lim_prev, z_prev)) => z_prev + (lim - lim_prev),
            None => lim,
        };
        let last_mu = prev.map_or(lo, |p| p.0);
        let mut converged = false;
        for _ in 0..NEWTON_ITERATIONS {
            let (e, de) = evans_with_derivative(model, z, mu, eps, t)?;
            if de.norm() == 0.0 || !de.is_finite() {
                return Err(Error::ContinuationBreak { last_mu, reason: format!("singular Newton step at mu = {mu}") });
            }
            let step = e / de;
            z -= step;
            if (z - lim).norm() > trust {
                return Err(Error::ContinuationBreak {
                    last_mu,
                    reason: format!("Newton left the trust radius {trust:.3e} around {lim} at mu = {mu}"),
                });
            }
            if step.norm() <= 10.0 * tol * (1.0 + z.norm()) {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::ContinuationBreak { last_mu, reason: format!("Newton did not converge at mu = {mu}") });
        }
        out.push((mu, z));
        prev = Some((mu, lim, z));
    }
    Ok(SpectralBranch { branch_id: branch.branch_id, kind: BranchKind::Perturbed(eps), samples: out, gaps: Vec::new() })
}

/// Half the distance from the branch value to every other frozen zero.
fn trust_radius(model: &CoefficientModel, lim: Complex64, mu: f64, period: f64) -> Result<f64> {
    let cluster = cluster_radius(lim);
    let mut own = false;
    let mut sep = f64::INFINITY;
    for (k, z) in alias_roots(model, mu, period)? {
        let d = (z - lim).norm();
        if k == 0 && !own && d <= cluster {
            own = true;
            continue;
        }
        sep = sep.min(d);
    }
    if sep <= cluster {
        return Err(Error::precondition(format!("branch value {lim} collides with another frozen zero at mu = {mu}")));
    }
    Ok(0.5 * sep)
}

/// Symmetric discrete Hausdorff distance between the sampled λ values.
pub fn hausdorff_distance(a: &SpectralBranch, b: &SpectralBranch) -> f64 {
    let directed = |x: &SpectralBranch, y: &SpectralBranch| {
        x.samples
            .iter()
            .map(|(_, p)| y.samples.iter().map(|(_, q)| (p - q).norm()).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    directed(a, b).max(directed(b, a))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    StableAtResolution,
    Unstable,
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::StableAtResolution => "stable-at-resolution",
            Verdict::Unstable => "unstable",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CandidateLog {
    pub mu: f64,
    pub lambda0: Complex64,
    pub radius: f64,
    pub count: Option<i64>,
    /// Whether the count equals the λ-order of `λ0`.
    pub count_matches_order: Option<bool>,
    pub zeros: Vec<SpectralPoint>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WindowLog {
    pub window: (f64, f64),
    pub max_re: f64,
    /// Branches with `λ ≡ 0` on the window, never used as witnesses.
    pub flat_branches: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchLog {
    pub windows: Vec<WindowLog>,
    pub candidates: Vec<CandidateLog>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityVerdict {
    pub verdict: Verdict,
    pub witness: Option<SpectralPoint>,
    pub search_log: SearchLog,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VerdictOptions {
    pub margin: f64,
    pub tol: f64,
    pub grid: usize,
    pub max_candidates: usize,
}

impl Default for VerdictOptions {
    fn default() -> Self {
        VerdictOptions { margin: 1e-3, tol: 1e-10, grid: 41, max_candidates: 8 }
    }
}

struct Candidate {
    mu: f64,
    lambda0: Complex64,
    iso: Isolation,
}

const FLAT_LEVEL: f64 = 1e-12;

/// Scan the limiting branches on each window for `Re λ > margin` and try to
/// certify nearby Evans zeros of the perturbed operator.
///
/// Candidates are ranked by `Re λ0 − r`, where `r` is the isolation radius,
/// so well separated, strongly unstable points are tried first. Any zero
/// located inside a candidate circle with `Re λ > margin` is a spectral
/// point; the witness is the one with the largest real part.
pub fn stability_verdict(
    model: &CoefficientModel,
    eps: f64,
    windows: &[(f64, f64)],
    opts: VerdictOptions,
) -> Result<StabilityVerdict> {
    model.check_eps(eps)?;
    if !(opts.margin >= 0.0 && opts.tol > 0.0 && opts.grid >= 2) {
        return Err(Error::domain("need margin >= 0, tol > 0 and grid >= 2"));
    }
    let margin = opts.margin;
    let mut log = SearchLog { windows: Vec::new(), candidates: Vec::new() };
    let mut points: Vec<(f64, Complex64)> = Vec::new();
    let mut degenerate = false;
    for &(lo, hi) in windows {
        let branches = match sample_branches(model, lo, hi, opts.grid) {
            Ok(b) => b,
            Err(_) => {
                degenerate = true;
                continue;
            }
        };
        let mut flat = Vec::new();
        let mut max_re = f64::NEG_INFINITY;
        for b in &branches {
            if b.samples.iter().all(|(_, z)| z.norm() <= FLAT_LEVEL) {
                flat.push(b.branch_id);
                continue;
            }
            for &(mu, z) in &b.samples {
                max_re = max_re.max(z.re);
                points.push((mu, z));
            }
        }
        log.windows.push(WindowLog { window: (lo, hi), max_re, flat_branches: flat });
    }
    let max_re = log.windows.iter().map(|w| w.max_re).fold(f64::NEG_INFINITY, f64::max);
    if max_re <= margin {
        let verdict = if max_re < -margin && !degenerate { Verdict::StableAtResolution } else { Verdict::Inconclusive };
        return Ok(StabilityVerdict { verdict, witness: None, search_log: log });
    }

    let candidates = rank_candidates(model, eps, &points, margin, opts.max_candidates)?;
    let results = par::map(&candidates, |cand| certify(model, cand, eps, opts.tol));
    let mut witness: Option<SpectralPoint> = None;
    for (cand, res) in candidates.iter().zip(results) {
        let mut entry = CandidateLog {
            mu: cand.mu,
            lambda0: cand.lambda0,
            radius: cand.iso.radius,
            count: None,
            count_matches_order: None,
            zeros: Vec::new(),
            error: None,
        };
        match res {
            Ok(zeros) => {
                let count: usize = zeros.iter().map(|p| p.multiplicity).sum();
                entry.count = Some(count as i64);
                entry.count_matches_order = Some(count == cand.iso.order);
                for p in zeros.iter().filter(|p| p.lambda.re > margin) {
                    if witness.map_or(true, |w| better_witness(p, &w)) {
                        witness = Some(*p);
                    }
                }
                entry.zeros = zeros;
            }
            Err(e) => entry.error = Some(e.to_string()),
        }
        log.candidates.push(entry);
    }
    let verdict = if witness.is_some() { Verdict::Unstable } else { Verdict::Inconclusive };
    Ok(StabilityVerdict { verdict, witness, search_log: log })
}

/// Larger real part first, then smaller `|μ|`, then lexicographic λ.
fn better_witness(p: &SpectralPoint, w: &SpectralPoint) -> bool {
    p.lambda
        .re
        .total_cmp(&w.lambda.re)
        .then(w.mu.abs().total_cmp(&p.mu.abs()))
        .then(w.lambda.re.total_cmp(&p.lambda.re))
        .then(w.lambda.im.total_cmp(&p.lambda.im))
        .is_gt()
}

fn rank_candidates(
    model: &CoefficientModel,
    eps: f64,
    points: &[(f64, Complex64)],
    margin: f64,
    max: usize,
) -> Result<Vec<Candidate>> {
    let hot: Vec<(f64, Complex64)> = points.iter().copied().filter(|(_, z)| z.re > margin).collect();
    let isolated = par::map(&hot, |&(mu, z)| isolate(model, z, mu, eps, None).ok().map(|iso| Candidate { mu, lambda0: z, iso }));
    let mut ranked: Vec<Candidate> = isolated.into_iter().flatten().filter(|c| c.iso.radius > margin).collect();
    let score = |c: &Candidate| c.lambda0.re - c.iso.radius;
    ranked.sort_by(|a, b| {
        score(b)
            .total_cmp(&score(a))
            .then(a.mu.abs().total_cmp(&b.mu.abs()))
            .then(a.lambda0.re.total_cmp(&b.lambda0.re))
            .then(a.lambda0.im.total_cmp(&b.lambda0.im))
    });
    // spread the attempts over distinct μ
    let (mu_min, mu_max) = points.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), (mu, _)| (a.min(*mu), b.max(*mu)));
    let spacing = (mu_max - mu_min) / 40.0;
    let mut chosen: Vec<Candidate> = Vec::new();
    for cand in ranked {
        if chosen.len() >= max {
            break;
        }
        if chosen.iter().all(|c| (c.mu - cand.mu).abs() > spacing || (c.lambda0 - cand.lambda0).norm() > c.iso.radius) {
            chosen.push(cand);
        }
    }
    Ok(chosen)
}

fn certify(model: &CoefficientModel, cand: &Candidate, eps: f64, tol: f64) -> Result<Vec<SpectralPoint>> {
    let contour = Contour::circle(cand.lambda0, cand.iso.radius)?;
    let zeros = evans_zeros(model, &contour, cand.mu, eps, tol)?;
    Ok(to_points(&zeros, cand.mu, eps, cand.iso.period))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dispersion::grid;
    use crate::linalg::RMatrix;
    use crate::model::ModelCase;

    fn frozen_bf() -> CoefficientModel {
        let a1 = RMatrix::from_row_slice(2, 2, &[0.5, -1.0, -1.0, 0.5]);
        let a0 = RMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        let (b1, b0) = (a1.clone(), a0.clone());
        let t = 3.0_f64.sqrt() * PI;
        CoefficientModel::from_fns("frozen", ModelCase::C3, 2, 1.0, a1, a0, move |_| t, move |_, _| b1.clone(), move |_, _| b0.clone())
            .unwrap()
    }

    #[test]
    fn reduce_mu_window() {
        let t = 2.0;
        for mu in [-7.3, -1.0, 0.0, 0.4, PI / t, 9.9] {
            let r = reduce_mu(mu, t);
            assert!(r > -PI / t && r <= PI / t + 1e-15, "{mu} -> {r}");
            let k = (mu - r) / (2.0 * PI / t);
            assert!((k - k.round()).abs() < 1e-12);
        }
    }

    #[test]
    fn frozen_point_is_exact() {
        let m = frozen_bf();
        let pts = perturbed_points(&m, c(1.0, 0.0), 0.0, 0.5, Some(0.3), 1e-10).unwrap();
        assert_eq!(pts.len(), 1);
        assert!((pts[0].lambda - c(1.0, 0.0)).norm() < 1e-7, "{:?}", pts[0]);
    }

    #[test]
    fn isolation_rejects_foreign_roots() {
        let m = frozen_bf();
        assert!(matches!(isolate(&m, c(1.0, 0.0), 0.0, 0.0, Some(2.5)), Err(Error::Precondition(_))));
        assert!(matches!(isolate(&m, c(0.7, 0.0), 0.0, 0.0, None), Err(Error::Precondition(_))));
        let iso = isolate(&m, c(1.0, 0.0), 0.0, 0.0, None).unwrap();
        assert_eq!(iso.order, 1);
        assert!(iso.radius <= 0.5);
    }

    #[test]
    fn frozen_trace_reproduces_branch() {
        let m = frozen_bf();
        let br = sample_branches(&m, 0.1, 0.5, 9).unwrap();
        let traced = trace_curve(&m, &br[0], (0.1, 0.5), 0.3, 1e-10).unwrap();
        assert!(hausdorff_distance(&traced, &br[0]) < 1e-7);
        let err = trace_curve(&m, &br[0], (0.5, 0.6), 0.3, 1e-10).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)) || matches!(err, Error::Domain(_)));
        let wide = sample_branches(&m, 0.1, 0.7, 13).unwrap();
        assert!(matches!(trace_curve(&m, &wide[0], (0.1, 0.7), 0.3, 1e-10), Err(Error::Precondition(_))));
    }

    #[test]
    fn hausdorff_shift() {
        let mus = grid(0.0, 1.0, 11);
        let a = SpectralBranch {
            branch_id: 1,
            kind: BranchKind::Limiting,
            samples: mus.iter().map(|&m| (m, c(m, 0.0))).collect(),
            gaps: vec![],
        };
        let mut b = a.clone();
        for s in &mut b.samples {
            s.1 += c(0.0, 0.1);
        }
        assert_eq!(hausdorff_distance(&a, &a), 0.0);
        assert!((hausdorff_distance(&a, &b) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn damped_model_is_stable() {
        let a1 = RMatrix::zeros(2, 2);
        let a0 = -RMatrix::identity(2, 2);
        let m = CoefficientModel::from_fns(
            "damped",
            ModelCase::C1,
            2,
            1.0,
            a1.clone(),
            a0.clone(),
            |_| 2.0,
            |_, _| RMatrix::zeros(2, 2),
            |xi, e| -RMatrix::identity(2, 2) + RMatrix::identity(2, 2) * (e * (PI * xi).cos()),
        )
        .unwrap();
        let v = stability_verdict(&m, 1e-3, &[(0.0, PI)], VerdictOptions::default()).unwrap();
        assert_eq!(v.verdict, Verdict::StableAtResolution);
        assert!(v.witness.is_none());
    }

    #[test]
    fn mathieu_sweep_counts() {
        let m = crate::applications::build_mathieu(1.0, 0.05).unwrap().model;
        let counts = homotopy_count_sweep(&m, c(1.0, 0.0), 0.0, 0.05, Some(0.4), &[0.0, 0.5, 1.0], 1e-10).unwrap();
        for h in counts {
            assert_eq!(h.count, Some(1), "{h:?}");
        }
        assert!(homotopy_count_sweep(&m, c(1.0, 0.0), 0.0, 0.05, None, &[1.5], 1e-10).is_err());
    }
}
