//! Concrete wave models: the real Ginzburg–Landau amplitude equation, a
//! reaction–diffusion/ODE fold-Hopf fixture, the hyperbolic Burgers–Fisher
//! model and the Mathieu operator, together with a shooting routine for
//! periodic orbits of planar vector fields.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::RMatrix;
use crate::model::{CoefficientField, CoefficientModel, ModelCase};
use crate::ode::{integrate, integrate_until_event, IntegratorStats, Tolerances};

pub trait PlanarField: Send + Sync {
    fn rhs(&self, z: [f64; 2]) -> [f64; 2];

    /// Conserved quantity, if the field has one.
    fn energy(&self, _z: [f64; 2]) -> Option<f64> {
        None
    }
}

impl<F> PlanarField for F
where
    F: Fn([f64; 2]) -> [f64; 2] + Send + Sync,
{
    fn rhs(&self, z: [f64; 2]) -> [f64; 2] {
        self(z)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlanarOrbit {
    /// Equispaced in `ξ` over one period, first and last state included.
    pub samples: Vec<(f64, [f64; 2])>,
    pub period: f64,
    pub energy: Option<f64>,
    /// Half the extent of the first coordinate.
    pub amplitude: f64,
}

const ORBIT_SAMPLES: usize = 512;
const ORBIT_CUTOFF: f64 = 1e4;

/// Periodic orbit through `start`, with the period taken as the first
/// return to the line through `start` orthogonal to the flow there.
pub fn periodic_orbit(field: &dyn PlanarField, start: [f64; 2], tol: f64) -> Result<PlanarOrbit> {
    periodic_orbit_with(field, start, tol, ORBIT_CUTOFF, ORBIT_SAMPLES)
}

pub fn periodic_orbit_with(
    field: &dyn PlanarField,
    start: [f64; 2],
    tol: f64,
    cutoff: f64,
    samples: usize,
) -> Result<PlanarOrbit> {
    if !(tol > 0.0) || samples < 2 {
        return Err(Error::domain("orbit tolerance must be positive and samples >= 2"));
    }
    let f0 = field.rhs(start);
    if f0[0] == 0.0 && f0[1] == 0.0 {
        return Err(Error::domain(format!("start point {start:?} is an equilibrium")));
    }
    let tolerances = Tolerances { rtol: tol, atol: tol * 1e-2 };
    let rhs = |_: f64, y: &[f64], dy: &mut [f64]| {
        let d = field.rhs([y[0], y[1]]);
        dy[0] = d[0];
        dy[1] = d[1];
    };
    let section = |y: &[f64]| (y[0] - start[0]) * f0[0] + (y[1] - start[1]) * f0[1];
    let mut stats = IntegratorStats::default();
    let (period, _) = integrate_until_event(rhs, section, 0.0, cutoff, &start, tolerances, &mut stats)?
        .ok_or(Error::NonPeriodic { cutoff })?;

    let mut pts = Vec::with_capacity(samples + 1);
    let mut y = start.to_vec();
    let mut at = 0.0;
    pts.push((0.0, start));
    for k in 1..=samples {
        let xi = period * k as f64 / samples as f64;
        integrate(rhs, at, xi, &mut y, tolerances, &mut stats)?;
        at = xi;
        pts.push((xi, [y[0], y[1]]));
    }
    let (lo, hi) = pts
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (_, z)| (lo.min(z[0]), hi.max(z[0])));
    Ok(PlanarOrbit { samples: pts, period, energy: field.energy(start), amplitude: 0.5 * (hi - lo) })
}

type StartFn = dyn Fn(f64) -> Result<[f64; 2]> + Send + Sync;
type CoeffsFn = dyn Fn([f64; 2]) -> (RMatrix, RMatrix) + Send + Sync;

/// Coefficients evaluated along a periodic orbit selected by `ε`.
struct OrbitField {
    planar: Arc<dyn PlanarField>,
    start: Box<StartFn>,
    equilibrium: [f64; 2],
    limit_period: f64,
    coeffs: Box<CoeffsFn>,
    cache: Mutex<HashMap<u64, Arc<PlanarOrbit>>>,
}

const ORBIT_TOL: f64 = 1e-12;

impl OrbitField {
    fn orbit(&self, eps: f64) -> Result<Arc<PlanarOrbit>> {
        let key = eps.to_bits();
        if let Some(o) = self.cache.lock().expect("orbit cache").get(&key) {
            return Ok(o.clone());
        }
        let start = (self.start)(eps)?;
        let orbit = Arc::new(periodic_orbit(self.planar.as_ref(), start, ORBIT_TOL)?);
        self.cache.lock().expect("orbit cache").insert(key, orbit.clone());
        Ok(orbit)
    }
}

impl CoefficientField for OrbitField {
    fn period(&self, eps: f64) -> Result<f64> {
        if eps == 0.0 {
            return Ok(self.limit_period);
        }
        Ok(self.orbit(eps)?.period)
    }

    fn aux_dim(&self) -> usize {
        2
    }

    fn aux_initial(&self, eps: f64) -> Result<Vec<f64>> {
        let z = if eps == 0.0 { self.equilibrium } else { (self.start)(eps)? };
        Ok(z.to_vec())
    }

    fn aux_rhs(&self, _xi: f64, aux: &[f64], _eps: f64, out: &mut [f64]) {
        let d = self.planar.rhs([aux[0], aux[1]]);
        out[0] = d[0];
        out[1] = d[1];
    }

    fn coefficients(&self, _xi: f64, aux: &[f64], _eps: f64) -> (RMatrix, RMatrix) {
        (self.coeffs)([aux[0], aux[1]])
    }
}

/// A model family together with the member selected by the builder
/// parameters.
#[derive(Clone)]
pub struct BuiltModel {
    pub model: CoefficientModel,
    pub eps: f64,
    orbit_field: Option<Arc<OrbitField>>,
}

impl std::fmt::Debug for BuiltModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BuiltModel").field("model", &self.model).field("eps", &self.eps).finish()
    }
}

impl BuiltModel {
    /// The wave profile behind the coefficients, for orbit-based models.
    pub fn orbit(&self) -> Result<Option<Arc<PlanarOrbit>>> {
        match &self.orbit_field {
            Some(f) if self.eps > 0.0 => Ok(Some(f.orbit(self.eps)?)),
            _ => Ok(None),
        }
    }

    pub fn period(&self) -> Result<f64> {
        self.model.period(self.eps)
    }

    pub fn at_eps(&self, eps: f64) -> Result<BuiltModel> {
        self.model.check_eps(eps)?;
        Ok(BuiltModel { eps, ..self.clone() })
    }
}

fn bisect(mut lo: f64, mut hi: f64, g: impl Fn(f64) -> f64) -> f64 {
    let mut glo = g(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let gm = g(mid);
        if gm == 0.0 {
            return mid;
        }
        if (gm < 0.0) == (glo < 0.0) {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * hi {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Largest ω for which the Ginzburg–Landau profile equation has a centre.
pub fn gle_omega_max() -> f64 {
    (4.0_f64 / 27.0).sqrt()
}

/// Positive zeros `p1 < p2` of `f(p) = −ω²/p³ + p − p³`, the smaller one
/// being the centre.
pub fn gle_equilibria(omega: f64) -> Result<(f64, f64)> {
    if !(omega > 0.0 && omega < gle_omega_max()) {
        return Err(Error::domain(format!("omega = {omega} outside (0, sqrt(4/27))")));
    }
    let w2 = omega * omega;
    let g = |x: f64| x * x - x * x * x - w2;
    let x1 = bisect(0.0, 2.0 / 3.0, g);
    let x2 = bisect(2.0 / 3.0, 1.0, g);
    Ok((x1.sqrt(), x2.sqrt()))
}

pub fn gle_omega_from_p1(p1: f64) -> Result<f64> {
    if !(p1 > 0.0 && p1 < (2.0_f64 / 3.0).sqrt()) {
        return Err(Error::domain(format!("p1 = {p1} outside (0, sqrt(2/3))")));
    }
    Ok((p1.powi(4) - p1.powi(6)).sqrt())
}

struct GleProfile {
    omega: f64,
}

impl PlanarField for GleProfile {
    fn rhs(&self, z: [f64; 2]) -> [f64; 2] {
        let p = z[0];
        let f = -self.omega * self.omega / p.powi(3) + p - p.powi(3);
        [z[1], -f]
    }

    fn energy(&self, z: [f64; 2]) -> Option<f64> {
        let p = z[0];
        Some(0.5 * z[1] * z[1] + self.omega * self.omega / (2.0 * p * p) + 0.5 * p * p - 0.25 * p.powi(4))
    }
}

/// Ginzburg–Landau quasi-periodic patterns, case C1 with `n = 2`. The
/// perturbation parameter is the initial displacement `δ` of the profile
/// from the centre `(p1, 0)`.
pub fn build_gle(omega: f64, delta: f64) -> Result<BuiltModel> {
    let (p1, p2) = gle_equilibria(omega)?;
    let eps_max = p2 - p1;
    if !(delta >= 0.0 && delta < eps_max) {
        return Err(Error::domain(format!("delta = {delta} outside [0, {eps_max})")));
    }
    let k = omega / (p1 * p1);
    let a1_lim = RMatrix::from_row_slice(2, 2, &[0.0, -2.0 * k, 2.0 * k, 0.0]);
    let a0_lim = RMatrix::from_row_slice(2, 2, &[-2.0 * p1 * p1, 0.0, 0.0, 0.0]);
    let limit_period = 2.0 * PI / (4.0 - 6.0 * p1 * p1).sqrt();
    let field = Arc::new(OrbitField {
        planar: Arc::new(GleProfile { omega }),
        start: Box::new(move |eps| Ok([p1 + eps, 0.0])),
        equilibrium: [p1, 0.0],
        limit_period,
        coeffs: Box::new(move |z| {
            let (p, dp) = (z[0], z[1]);
            let w = omega;
            let a1 = RMatrix::from_row_slice(2, 2, &[0.0, -2.0 * w / (p * p), 2.0 * w / (p * p), 0.0]);
            let base = 1.0 - w * w / p.powi(4);
            let off = 2.0 * w * dp / p.powi(3);
            let a0 = RMatrix::from_row_slice(2, 2, &[base - 3.0 * p * p, off, -off, base - p * p]);
            (a1, a0)
        }),
        cache: Mutex::new(HashMap::new()),
    });
    let model = CoefficientModel::new("gle", ModelCase::C1, 2, eps_max, a1_lim, a0_lim, field.clone())?
        .with_params(&[("omega", omega), ("p1", p1), ("delta", delta)]);
    Ok(BuiltModel { model, eps: delta, orbit_field: Some(field) })
}

/// Transformed Burgers–Fisher profile field in `(u, w)`, `w = u − 2v`.
struct BurgersFisherProfile;

impl PlanarField for BurgersFisherProfile {
    fn rhs(&self, z: [f64; 2]) -> [f64; 2] {
        let (u, w) = (z[0], z[1]);
        [2.0 / 3.0 * w, 2.0 * u * u - 2.0 * u]
    }

    fn energy(&self, z: [f64; 2]) -> Option<f64> {
        Some(burgers_fisher_htilde(z[0], z[1]))
    }
}

/// `h̃ = w²/3 + u² − 2u³/3`.
pub fn burgers_fisher_htilde(u: f64, w: f64) -> f64 {
    w * w / 3.0 + u * u - 2.0 / 3.0 * u.powi(3)
}

/// First integral in the original `(u, v)` coordinates; equals `−h̃/2`.
pub fn burgers_fisher_h(u: f64, v: f64) -> f64 {
    -2.0 / 3.0 * u * u + u.powi(3) / 3.0 + 2.0 / 3.0 * u * v - 2.0 / 3.0 * v * v
}

/// Map an orbit state `(u, w)` back to `(u, v)`.
pub fn burgers_fisher_uv(z: [f64; 2]) -> [f64; 2] {
    [z[0], 0.5 * (z[0] - z[1])]
}

/// Hyperbolic Burgers–Fisher periodic waves, case C3 with `n = 2`. The
/// public parameter is the energy `h̃ ∈ (0, 1/3)`; the perturbation
/// parameter is `ε = √h̃`.
pub fn build_burgers_fisher(htilde: f64) -> Result<BuiltModel> {
    if !(htilde > 0.0 && htilde < 1.0 / 3.0) {
        return Err(Error::domain(format!("htilde = {htilde} outside (0, 1/3)")));
    }
    let a1 = RMatrix::from_row_slice(2, 2, &[0.5, -1.0, -1.0, 0.5]);
    let a0_lim = RMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
    let a1_field = a1.clone();
    let field = Arc::new(OrbitField {
        planar: Arc::new(BurgersFisherProfile),
        start: Box::new(|eps| {
            let h = eps * eps;
            if !(h < 1.0 / 3.0) {
                return Err(Error::domain(format!("htilde = {h} outside (0, 1/3)")));
            }
            // right turning point: u² − 2u³/3 = h̃ with 0 < u < 1
            Ok([bisect(0.0, 1.0, |u| u * u - 2.0 / 3.0 * u.powi(3) - h), 0.0])
        }),
        equilibrium: [0.0, 0.0],
        limit_period: 3.0_f64.sqrt() * PI,
        coeffs: Box::new(move |z| {
            let u = z[0];
            (a1_field.clone(), RMatrix::from_row_slice(2, 2, &[1.0 - 2.0 * u, 0.0, u, -1.0]))
        }),
        cache: Mutex::new(HashMap::new()),
    });
    let eps_max = (1.0_f64 / 3.0).sqrt();
    let model = CoefficientModel::new("burgers-fisher", ModelCase::C3, 2, eps_max, a1, a0_lim, field.clone())?
        .with_params(&[("htilde", htilde)]);
    Ok(BuiltModel { model, eps: htilde.sqrt(), orbit_field: Some(field) })
}

/// Scalar Hill operator `p'' + (a0 + 2ε cos 2ξ) p`, period π.
pub fn build_mathieu(a0: f64, eps: f64) -> Result<BuiltModel> {
    if !(eps >= 0.0 && eps.is_finite() && a0.is_finite()) {
        return Err(Error::domain(format!("need eps >= 0 and finite a0, got a0 = {a0}, eps = {eps}")));
    }
    let model = CoefficientModel::from_fns(
        "mathieu",
        ModelCase::C1,
        1,
        f64::INFINITY,
        RMatrix::zeros(1, 1),
        RMatrix::from_element(1, 1, a0),
        |_| PI,
        |_, _| RMatrix::zeros(1, 1),
        move |xi, e| RMatrix::from_element(1, 1, a0 + 2.0 * e * (2.0 * xi).cos()),
    )?
    .with_params(&[("a0", a0), ("eps", eps)]);
    Ok(BuiltModel { model, eps, orbit_field: None })
}

type MapFn = dyn Fn(f64, f64) -> RMatrix + Send + Sync;

/// Reaction–diffusion equation coupled to an ODE, case C2 with `n = 2`,
/// `m = 1` and `a1 = diag(−c0, −c0)`. The Jacobian along the wave is
/// supplied by the caller.
pub fn build_rdode(
    c0: f64,
    a0_lim: RMatrix,
    a0: Box<MapFn>,
    period: impl Fn(f64) -> f64 + Send + Sync + 'static,
    eps_max: f64,
) -> Result<CoefficientModel> {
    if c0 == 0.0 || !c0.is_finite() {
        return Err(Error::SingularCoefficient { what: "a22", rcond: 0.0 });
    }
    if a0_lim.nrows() != 2 || a0_lim.ncols() != 2 {
        return Err(Error::domain("rdode Jacobian must be 2x2"));
    }
    let a1 = RMatrix::from_row_slice(2, 2, &[-c0, 0.0, 0.0, -c0]);
    let a1_field = a1.clone();
    CoefficientModel::from_fns(
        "rdode",
        ModelCase::C2 { m: 1 },
        2,
        eps_max,
        a1,
        a0_lim,
        period,
        move |_, _| a1_field.clone(),
        move |xi, e| a0(xi, e),
    )
}

/// Limiting Jacobian of the fold-Hopf fixture:
/// `f_u = ϖ0² + c0²`, `f_w = 1`, `g_u = −(ϖ0² + c0²) c0²`, `g_w = −c0²`.
pub fn fold_hopf_jacobian(c0: f64, varpi0: f64) -> RMatrix {
    let fu = varpi0 * varpi0 + c0 * c0;
    let gw = -c0 * c0;
    RMatrix::from_row_slice(2, 2, &[fu, 1.0, fu * gw, gw])
}

/// Fold-Hopf fixture: constant limiting Jacobian plus a mean-free periodic
/// perturbation `ε cos(2πξ/T_ε) K`, with `T_ε = (2π/ϖ0)(1 + ε)`.
pub fn build_rdode_fixture(c0: f64, varpi0: f64, eps: f64) -> Result<BuiltModel> {
    if !(varpi0 > 0.0) {
        return Err(Error::domain(format!("varpi0 = {varpi0} must be positive")));
    }
    let eps_max = 0.5;
    if !(eps >= 0.0 && eps < eps_max) {
        return Err(Error::domain(format!("eps = {eps} outside [0, {eps_max})")));
    }
    let j0 = fold_hopf_jacobian(c0, varpi0);
    let k = RMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.5, -1.0]);
    let base = j0.clone();
    let period = move |e: f64| 2.0 * PI / varpi0 * (1.0 + e);
    let a0 = Box::new(move |xi: f64, e: f64| &base + &k * (e * (2.0 * PI * xi / period(e)).cos()));
    let model = build_rdode(c0, j0, a0, period, eps_max)?.with_params(&[("c0", c0), ("varpi0", varpi0), ("eps", eps)]);
    Ok(BuiltModel { model, eps, orbit_field: None })
}

/// Names accepted by [`build_named`].
pub const MODELS: [&str; 4] = ["gle", "rdode", "burgers-fisher", "mathieu"];

/// Build a named model from `key, value` parameters; missing ones take
/// defaults (gle p1 = 0.5, δ = 0.05; rdode c0 = ϖ0 = 1, ε = 0.01;
/// burgers-fisher h̃ = 1e-4; mathieu a0 = 1, ε = 0.05). Parameters that do
/// not belong to the model are rejected.
pub fn build_named(name: &str, params: &[(&str, f64)]) -> Result<BuiltModel> {
    let allowed: &[&str] = match name {
        "gle" => &["omega", "p1", "delta"],
        "rdode" => &["c0", "varpi0", "eps"],
        "burgers-fisher" => &["htilde"],
        "mathieu" => &["a0", "eps"],
        other => return Err(Error::domain(format!("unknown model '{other}' (expected one of {})", MODELS.join(", ")))),
    };
    if let Some((k, _)) = params.iter().find(|(k, _)| !allowed.contains(k)) {
        return Err(Error::domain(format!("parameter '{k}' does not apply to model {name}")));
    }
    let get = |key: &str| params.iter().rev().find(|(k, _)| *k == key).map(|(_, v)| *v);
    match name {
        "gle" => {
            let omega = match (get("omega"), get("p1")) {
                (Some(_), Some(_)) => return Err(Error::domain("give either omega or p1, not both")),
                (Some(w), None) => w,
                (None, p1) => gle_omega_from_p1(p1.unwrap_or(0.5))?,
            };
            build_gle(omega, get("delta").unwrap_or(0.05))
        }
        "rdode" => build_rdode_fixture(get("c0").unwrap_or(1.0), get("varpi0").unwrap_or(1.0), get("eps").unwrap_or(0.01)),
        "burgers-fisher" => build_burgers_fisher(get("htilde").unwrap_or(1e-4)),
        _ => build_mathieu(get("a0").unwrap_or(1.0), get("eps").unwrap_or(0.05)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, max_norm_real};
    use crate::model::{assemble_system, perturbation_matrix, system_dim, validate_model};

    #[test]
    fn harmonic_oscillator_period() {
        let o = periodic_orbit(&|z: [f64; 2]| [z[1], -z[0]], [1.0, 0.0], 1e-12).unwrap();
        assert!((o.period - 2.0 * PI).abs() < 1e-8, "{}", o.period);
        let last = o.samples.last().unwrap().1;
        assert!((last[0] - 1.0).abs() < 1e-8 && last[1].abs() < 1e-8);
        assert!((o.amplitude - 1.0).abs() < 1e-6);
    }

    #[test]
    fn equilibrium_start_is_rejected() {
        assert!(periodic_orbit(&|z: [f64; 2]| [z[1], -z[0]], [0.0, 0.0], 1e-10).is_err());
    }

    #[test]
    fn gle_center_and_limits() {
        let omega = gle_omega_from_p1(0.5).unwrap();
        assert!((omega * omega - 0.046875).abs() < 1e-15);
        let (p1, _) = gle_equilibria(omega).unwrap();
        assert!((p1.powi(4) - p1.powi(6) - omega * omega).abs() < 1e-10);
        assert!((p1 - 0.5).abs() < 1e-12);
        let k = omega / (p1 * p1);
        assert!((k * k + p1 * p1 - 1.0).abs() < 1e-12);

        let b = build_gle(omega, 0.02).unwrap();
        assert_eq!(system_dim(&b.model), 4);
        assert!((b.model.a0_lim[(0, 0)] + 0.5).abs() < 1e-12 && b.model.a0_lim[(1, 1)].abs() < 1e-12);
        let t = b.period().unwrap();
        let t0 = 2.0 * PI / 2.5_f64.sqrt();
        assert!((t - t0).abs() / t0 < 0.01, "{t} vs {t0}");
        assert!(gle_equilibria(0.5).is_err());
    }

    #[test]
    fn gle_energy_is_conserved() {
        let omega = gle_omega_from_p1(0.5).unwrap();
        let b = build_gle(omega, 0.05).unwrap();
        let orbit = b.orbit().unwrap().unwrap();
        let field = GleProfile { omega };
        let e0 = orbit.energy.unwrap();
        for (_, z) in &orbit.samples {
            assert!((field.energy(*z).unwrap() - e0).abs() < 1e-8 * e0.abs());
        }
    }

    #[test]
    fn burgers_fisher_orbit_and_coefficients() {
        let b = build_burgers_fisher(1e-3).unwrap();
        let o = b.orbit().unwrap().unwrap();
        assert!((o.period - 3.0_f64.sqrt() * PI).abs() < 0.2, "{}", o.period);
        let h0 = burgers_fisher_h(burgers_fisher_uv(o.samples[0].1)[0], burgers_fisher_uv(o.samples[0].1)[1]);
        assert!((h0 + 0.5e-3).abs() < 1e-12);
        for (_, z) in &o.samples {
            let [u, v] = burgers_fisher_uv(*z);
            assert!((burgers_fisher_h(u, v) - h0).abs() < 1e-8 * h0.abs());
        }
        assert_eq!(b.model.a0_lim, RMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]));
        assert!(build_burgers_fisher(0.4).is_err());
    }

    #[test]
    fn burgers_fisher_perturbation_is_small() {
        let b = build_burgers_fisher(1e-4).unwrap();
        let t = b.period().unwrap();
        let mut sup = 0.0_f64;
        for k in 0..32 {
            let xi = t * k as f64 / 32.0;
            let bm = perturbation_matrix(&b.model, xi, c(1.0, 0.0), b.eps).unwrap();
            sup = sup.max(crate::linalg::max_norm(&bm));
        }
        assert!(sup < 0.1, "{sup}");
        assert!(sup > 0.0);
    }

    #[test]
    fn mathieu_periodicity_and_convergence() {
        let b = build_mathieu(1.0, 0.1).unwrap();
        let a = assemble_system(&b.model, 0.3, c(0.2, 0.0), 0.1).unwrap();
        let a_shift = assemble_system(&b.model, 0.3 + PI, c(0.2, 0.0), 0.1).unwrap();
        assert!(crate::linalg::max_norm(&(a - a_shift)) < 1e-14);
        let r = validate_model(&b.model, &[0.1, 0.05, 0.025]);
        assert!(r.ok(), "{:?}", r.violations);
        let sups: Vec<f64> = r.samples.iter().map(|s| s.sup_a0).collect();
        for (s, e) in sups.iter().zip([0.2, 0.1, 0.05]) {
            assert!((s - e).abs() < 1e-12, "{s}");
        }
        assert!((r.order.unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn built_models_converge() {
        let omega = gle_omega_from_p1(0.5).unwrap();
        let models = [
            (build_gle(omega, 0.04).unwrap().model, [0.04, 0.02, 0.01]),
            (build_burgers_fisher(1e-2).unwrap().model, [0.1, 0.05, 0.025]),
            (build_rdode_fixture(1.0, 1.0, 0.1).unwrap().model, [0.1, 0.05, 0.025]),
        ];
        for (m, seq) in models {
            let r = validate_model(&m, &seq);
            assert!(r.ok(), "{}: {:?}", m.name, r.violations);
            let order = r.order.unwrap();
            assert!((0.4..=1.2).contains(&order), "{}: order {order}", m.name);
        }
    }

    #[test]
    fn rdode_fixture_structure() {
        let b = build_rdode_fixture(1.0, 1.0, 0.1).unwrap();
        assert_eq!(system_dim(&b.model), 3);
        assert_eq!(b.model.a0_lim, RMatrix::from_row_slice(2, 2, &[2.0, 1.0, -2.0, -1.0]));
        let a = assemble_system(&b.model, 0.0, c(0.7, 0.2), 0.0).unwrap();
        assert!((a[(2, 2)] - (-(c(0.7, 0.2) + 1.0))).norm() < 1e-15);
        assert!(build_rdode(0.0, RMatrix::zeros(2, 2), Box::new(|_, _| RMatrix::zeros(2, 2)), |_| 1.0, 1.0).is_err());
        let drift = max_norm_real(&(&b.model.a1_lim - RMatrix::from_row_slice(2, 2, &[-1.0, 0.0, 0.0, -1.0])));
        assert_eq!(drift, 0.0);
    }
}
