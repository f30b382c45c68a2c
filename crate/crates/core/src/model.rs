//! Second-order operators `L = D ∂² + a1(ξ, ε) ∂ + a0(ξ, ε)` with periodic,
//! asymptotically constant coefficients, and their first-order spectral
//! systems `X' = A(ξ, λ, ε) X`.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{c, max_norm_real, rcond, CMatrix, RMatrix};
use crate::ode::{integrate, IntegratorStats, Tolerances};

/// Reciprocal condition number below which a coefficient block is singular.
pub const RCOND_MIN: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ModelCase {
    /// `D = I`
    C1,
    /// `D = diag(I_m, 0)` with `0 < m < n`
    C2 { m: usize },
    /// `D = 0`, `a1` independent of `ξ`
    C3,
}

impl fmt::Display for ModelCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelCase::C1 => write!(f, "C1"),
            ModelCase::C2 { m } => write!(f, "C2(m={m})"),
            ModelCase::C3 => write!(f, "C3"),
        }
    }
}

/// Source of the periodic coefficients.
///
/// A field may carry an auxiliary real state (for instance a wave profile)
/// that is integrated alongside any spectral system so that coefficients are
/// evaluated exactly along the flow instead of being interpolated.
pub trait CoefficientField: Send + Sync {
    fn period(&self, eps: f64) -> Result<f64>;

    fn aux_dim(&self) -> usize {
        0
    }

    fn aux_initial(&self, _eps: f64) -> Result<Vec<f64>> {
        Ok(Vec::new())
    }

    fn aux_rhs(&self, _xi: f64, _aux: &[f64], _eps: f64, _out: &mut [f64]) {}

    /// `(a1, a0)` at `ξ` given the auxiliary state at `ξ`.
    fn coefficients(&self, xi: f64, aux: &[f64], eps: f64) -> (RMatrix, RMatrix);
}

type PeriodFn = dyn Fn(f64) -> f64 + Send + Sync;
type CoeffFn = dyn Fn(f64, f64) -> RMatrix + Send + Sync;

/// Coefficients given directly as closures of `(ξ, ε)`.
pub struct FnField {
    period: Box<PeriodFn>,
    a1: Box<CoeffFn>,
    a0: Box<CoeffFn>,
}

impl FnField {
    pub fn new(
        period: impl Fn(f64) -> f64 + Send + Sync + 'static,
        a1: impl Fn(f64, f64) -> RMatrix + Send + Sync + 'static,
        a0: impl Fn(f64, f64) -> RMatrix + Send + Sync + 'static,
    ) -> Self {
        FnField { period: Box::new(period), a1: Box::new(a1), a0: Box::new(a0) }
    }
}

impl CoefficientField for FnField {
    fn period(&self, eps: f64) -> Result<f64> {
        let t = (self.period)(eps);
        if t.is_finite() && t > 0.0 {
            Ok(t)
        } else {
            Err(Error::domain(format!("period map returned {t} at eps = {eps}")))
        }
    }

    fn coefficients(&self, xi: f64, _aux: &[f64], eps: f64) -> (RMatrix, RMatrix) {
        ((self.a1)(xi, eps), (self.a0)(xi, eps))
    }
}

#[derive(Clone)]
pub struct CoefficientModel {
    pub name: String,
    pub case: ModelCase,
    pub n: usize,
    /// Upper bound on the perturbation parameter; `f64::INFINITY` if none.
    pub eps_max: f64,
    pub a1_lim: RMatrix,
    pub a0_lim: RMatrix,
    /// Named builder parameters, echoed in reports.
    pub params: Vec<(String, f64)>,
    field: Arc<dyn CoefficientField>,
}

impl fmt::Debug for CoefficientModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CoefficientModel")
            .field("name", &self.name)
            .field("case", &self.case)
            .field("n", &self.n)
            .field("eps_max", &self.eps_max)
            .field("a1_lim", &self.a1_lim)
            .field("a0_lim", &self.a0_lim)
            .finish_non_exhaustive()
    }
}

impl CoefficientModel {
    pub fn new(
        name: impl Into<String>,
        case: ModelCase,
        n: usize,
        eps_max: f64,
        a1_lim: RMatrix,
        a0_lim: RMatrix,
        field: Arc<dyn CoefficientField>,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("model dimension must be positive"));
        }
        if let ModelCase::C2 { m } = case {
            if m == 0 || m >= n {
                return Err(Error::domain(format!("case C2 needs 0 < m < n, got m = {m}, n = {n}")));
            }
        }
        for (what, mat) in [("a1_lim", &a1_lim), ("a0_lim", &a0_lim)] {
            if mat.nrows() != n || mat.ncols() != n {
                return Err(Error::domain(format!("{what} must be {n}x{n}")));
            }
        }
        if !(eps_max > 0.0) {
            return Err(Error::domain("eps_max must be positive"));
        }
        Ok(CoefficientModel {
            name: name.into(),
            case,
            n,
            eps_max,
            a1_lim,
            a0_lim,
            params: Vec::new(),
            field,
        })
    }

    /// Convenience constructor for coefficients given as closures.
    #[allow(clippy::too_many_arguments)]
    pub fn from_fns(
        name: impl Into<String>,
        case: ModelCase,
        n: usize,
        eps_max: f64,
        a1_lim: RMatrix,
        a0_lim: RMatrix,
        period: impl Fn(f64) -> f64 + Send + Sync + 'static,
        a1: impl Fn(f64, f64) -> RMatrix + Send + Sync + 'static,
        a0: impl Fn(f64, f64) -> RMatrix + Send + Sync + 'static,
    ) -> Result<Self> {
        Self::new(name, case, n, eps_max, a1_lim, a0_lim, Arc::new(FnField::new(period, a1, a0)))
    }

    pub fn with_params(mut self, params: &[(&str, f64)]) -> Self {
        self.params = params.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        self
    }

    pub fn field(&self) -> &dyn CoefficientField {
        self.field.as_ref()
    }

    pub fn check_eps(&self, eps: f64) -> Result<()> {
        if !eps.is_finite() || eps < 0.0 || eps >= self.eps_max {
            return Err(Error::domain(format!(
                "eps = {eps} outside [0, {}) for model {}",
                self.eps_max, self.name
            )));
        }
        Ok(())
    }

    pub fn period(&self, eps: f64) -> Result<f64> {
        self.check_eps(eps)?;
        self.field.period(eps)
    }

    /// Auxiliary state at `ξ`, integrated from `ξ = 0` after reducing `ξ`
    /// modulo the period.
    pub fn aux_at(&self, xi: f64, eps: f64) -> Result<Vec<f64>> {
        let mut aux = self.field.aux_initial(eps)?;
        if aux.is_empty() {
            return Ok(aux);
        }
        let t = self.period(eps)?;
        let target = xi.rem_euclid(t);
        self.advance_aux(&mut aux, 0.0, target, eps)?;
        Ok(aux)
    }

    fn advance_aux(&self, aux: &mut [f64], from: f64, to: f64, eps: f64) -> Result<()> {
        let mut stats = IntegratorStats::default();
        let field = self.field.as_ref();
        integrate(
            |xi, y: &[f64], dy: &mut [f64]| field.aux_rhs(xi, y, eps, dy),
            from,
            to,
            aux,
            Tolerances { rtol: 1e-12, atol: 1e-14 },
            &mut stats,
        )
    }

    /// `(a1, a0)` at `ξ`.
    pub fn coefficients_at(&self, xi: f64, eps: f64) -> Result<(RMatrix, RMatrix)> {
        let aux = self.aux_at(xi, eps)?;
        Ok(self.field.coefficients(xi, &aux, eps))
    }

    /// Coefficients on an increasing grid of `ξ` values, integrating the
    /// auxiliary state straight through without reducing `ξ`.
    pub fn sample_coefficients(&self, xis: &[f64], eps: f64) -> Result<Vec<(RMatrix, RMatrix)>> {
        self.check_eps(eps)?;
        let mut aux = self.field.aux_initial(eps)?;
        let mut at = 0.0;
        let mut out = Vec::with_capacity(xis.len());
        for &xi in xis {
            if !aux.is_empty() {
                if xi < at {
                    return Err(Error::domain("sample grid must be increasing"));
                }
                self.advance_aux(&mut aux, at, xi, eps)?;
                at = xi;
            }
            out.push(self.field.coefficients(xi, &aux, eps));
        }
        Ok(out)
    }
}

pub fn system_dim(model: &CoefficientModel) -> usize {
    match model.case {
        ModelCase::C1 => 2 * model.n,
        ModelCase::C2 { m } => m + model.n,
        ModelCase::C3 => model.n,
    }
}

fn checked_inverse(m: &RMatrix, what: &'static str) -> Result<RMatrix> {
    let r = rcond(m);
    if !(r > RCOND_MIN) {
        return Err(Error::SingularCoefficient { what, rcond: r });
    }
    m.clone()
        .try_inverse()
        .ok_or(Error::SingularCoefficient { what, rcond: r })
}

/// The system matrix split as `A(λ) = base + λ · lambda_part`.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemParts {
    pub base: CMatrix,
    pub lambda_part: CMatrix,
}

impl SystemParts {
    pub fn at(&self, lambda: Complex64) -> CMatrix {
        &self.base + &self.lambda_part * lambda
    }
}

/// Structural `∂λ A` for the given coefficients; constant in `ξ` for every
/// valid model.
pub fn lambda_part(case: ModelCase, n: usize, a1: &RMatrix) -> Result<CMatrix> {
    Ok(system_parts(case, n, a1, &RMatrix::zeros(n, n))?.lambda_part)
}

/// First-order system blocks for `(a1, a0)`.
pub fn system_parts(case: ModelCase, n: usize, a1: &RMatrix, a0: &RMatrix) -> Result<SystemParts> {
    let z = |x: f64| c(x, 0.0);
    match case {
        ModelCase::C1 => {
            let mut base = CMatrix::zeros(2 * n, 2 * n);
            let mut lp = CMatrix::zeros(2 * n, 2 * n);
            for i in 0..n {
                base[(i, n + i)] = z(1.0);
                lp[(n + i, i)] = z(1.0);
                for j in 0..n {
                    base[(n + i, j)] = z(-a0[(i, j)]);
                    base[(n + i, n + j)] = z(-a1[(i, j)]);
                }
            }
            Ok(SystemParts { base, lambda_part: lp })
        }
        ModelCase::C2 { m } => {
            let k = n - m;
            let a11 = a1.view((0, 0), (m, m));
            let a21 = a1.view((m, 0), (k, m));
            let a22 = a1.view((m, m), (k, k)).into_owned();
            let b11 = a0.view((0, 0), (m, m));
            let b12 = a0.view((0, m), (m, k));
            let b21 = a0.view((m, 0), (k, m));
            let b22 = a0.view((m, m), (k, k));
            let inv = checked_inverse(&a22, "a22")?;
            let g21 = -(&inv * b21);
            let g22 = -(&inv * a21);
            let g23 = -(&inv * b22);

            let dim = m + n;
            let mut base = CMatrix::zeros(dim, dim);
            let mut lp = CMatrix::zeros(dim, dim);
            for i in 0..m {
                base[(i, m + i)] = z(1.0);
                lp[(m + i, i)] = z(1.0);
                for j in 0..m {
                    base[(m + i, j)] = z(-b11[(i, j)]);
                    base[(m + i, m + j)] = z(-a11[(i, j)]);
                }
                for j in 0..k {
                    base[(m + i, 2 * m + j)] = z(-b12[(i, j)]);
                }
            }
            for i in 0..k {
                for j in 0..m {
                    base[(2 * m + i, j)] = z(g21[(i, j)]);
                    base[(2 * m + i, m + j)] = z(g22[(i, j)]);
                }
                for j in 0..k {
                    base[(2 * m + i, 2 * m + j)] = z(g23[(i, j)]);
                    lp[(2 * m + i, 2 * m + j)] = z(inv[(i, j)]);
                }
            }
            Ok(SystemParts { base, lambda_part: lp })
        }
        ModelCase::C3 => {
            let inv = checked_inverse(a1, "a1")?;
            Ok(SystemParts { base: (-(&inv * a0)).map(z), lambda_part: inv.map(z) })
        }
    }
}

/// `A(ξ, λ, ε)`.
pub fn assemble_system(model: &CoefficientModel, xi: f64, lambda: Complex64, eps: f64) -> Result<CMatrix> {
    let (a1, a0) = model.coefficients_at(xi, eps)?;
    Ok(system_parts(model.case, model.n, &a1, &a0)?.at(lambda))
}

pub fn limiting_parts(model: &CoefficientModel) -> Result<SystemParts> {
    system_parts(model.case, model.n, &model.a1_lim, &model.a0_lim)
}

/// `A(λ)` built from the limiting coefficients.
pub fn limiting_system(model: &CoefficientModel, lambda: Complex64) -> Result<CMatrix> {
    Ok(limiting_parts(model)?.at(lambda))
}

/// `B(ξ, λ, ε) = A(ξ, λ, ε) − A(λ)`.
pub fn perturbation_matrix(model: &CoefficientModel, xi: f64, lambda: Complex64, eps: f64) -> Result<CMatrix> {
    Ok(assemble_system(model, xi, lambda, eps)? - limiting_system(model, lambda)?)
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceSample {
    pub eps: f64,
    pub period: f64,
    pub periodicity_residual: f64,
    pub sup_a1: f64,
    pub sup_a0: f64,
}

impl ConvergenceSample {
    pub fn sup_total(&self) -> f64 {
        self.sup_a1.max(self.sup_a0)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub model: String,
    pub samples: Vec<ConvergenceSample>,
    /// Least-squares slope of `log sup|a − a_lim|` against `log ε`.
    pub order: Option<f64>,
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

const VALIDATION_GRID: usize = 64;
const PERIODICITY_TOL: f64 = 1e-6;

fn structural_checks(model: &CoefficientModel, label: &str, a1: &RMatrix, violations: &mut Vec<String>) {
    match model.case {
        ModelCase::C1 => {}
        ModelCase::C2 { m } => {
            let k = model.n - m;
            let a12 = a1.view((0, m), (m, k));
            if a12.iter().any(|x| *x != 0.0) {
                violations.push(format!("{label}: block a12 is not identically zero"));
            }
            let a22 = a1.view((m, m), (k, k)).into_owned();
            let r = rcond(&a22);
            if !(r > RCOND_MIN) {
                violations.push(format!("{label}: a22 singular (rcond {r:.3e})"));
            }
        }
        ModelCase::C3 => {
            let r = rcond(a1);
            if !(r > RCOND_MIN) {
                violations.push(format!("{label}: a1 singular (rcond {r:.3e})"));
            }
        }
    }
}

/// Check periodicity, convergence to the limiting coefficients and the
/// case-specific structure over a decreasing sequence of `ε`.
pub fn validate_model(model: &CoefficientModel, eps_sequence: &[f64]) -> ValidationReport {
    let mut violations = Vec::new();
    structural_checks(model, "limit", &model.a1_lim, &mut violations);
    if eps_sequence.windows(2).any(|w| w[1] >= w[0]) {
        violations.push("eps sequence is not strictly decreasing".into());
    }

    let mut samples = Vec::new();
    for &eps in eps_sequence {
        if eps <= 0.0 || eps >= model.eps_max {
            violations.push(format!("eps = {eps} outside (0, {})", model.eps_max));
            continue;
        }
        let period = match model.period(eps) {
            Ok(t) => t,
            Err(e) => {
                violations.push(format!("eps = {eps}: period unavailable: {e}"));
                continue;
            }
        };
        let grid: Vec<f64> = (0..2 * VALIDATION_GRID)
            .map(|k| {
                if k < VALIDATION_GRID {
                    period * k as f64 / VALIDATION_GRID as f64
                } else {
                    period + period * (k - VALIDATION_GRID) as f64 / VALIDATION_GRID as f64
                }
            })
            .collect();
        let coeffs = match model.sample_coefficients(&grid, eps) {
            Ok(c) => c,
            Err(e) => {
                violations.push(format!("eps = {eps}: coefficient sampling failed: {e}"));
                continue;
            }
        };
        let (first, second) = coeffs.split_at(VALIDATION_GRID);
        let mut residual = 0.0_f64;
        let mut sup_a1 = 0.0_f64;
        let mut sup_a0 = 0.0_f64;
        for ((a1, a0), (b1, b0)) in first.iter().zip(second) {
            residual = residual.max(max_norm_real(&(a1 - b1))).max(max_norm_real(&(a0 - b0)));
            sup_a1 = sup_a1.max(max_norm_real(&(a1 - &model.a1_lim)));
            sup_a0 = sup_a0.max(max_norm_real(&(a0 - &model.a0_lim)));
        }
        if residual > PERIODICITY_TOL {
            violations.push(format!("eps = {eps}: periodicity residual {residual:.3e}"));
        }
        let label = format!("eps = {eps}");
        structural_checks(model, &label, &first[0].0, &mut violations);
        if model.case == ModelCase::C3 {
            let drift = first.iter().map(|(a1, _)| max_norm_real(&(a1 - &first[0].0))).fold(0.0, f64::max);
            if drift > 0.0 {
                violations.push(format!("{label}: a1 varies with xi (drift {drift:.3e})"));
            }
        }
        if let ModelCase::C2 { m } = model.case {
            let k = model.n - m;
            let a22_0: DMatrix<f64> = first[0].0.view((m, m), (k, k)).into_owned();
            let drift = first
                .iter()
                .map(|(a1, _)| max_norm_real(&(a1.view((m, m), (k, k)).into_owned() - &a22_0)))
                .fold(0.0, f64::max);
            if drift > 0.0 {
                violations.push(format!("{label}: a22 varies with xi (drift {drift:.3e})"));
            }
        }
        samples.push(ConvergenceSample { eps, period, periodicity_residual: residual, sup_a1, sup_a0 });
    }

    let order = fit_order(&samples);
    ValidationReport { model: model.name.clone(), samples, order, violations }
}

fn fit_order(samples: &[ConvergenceSample]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = samples
        .iter()
        .filter(|s| s.sup_total() > 0.0)
        .map(|s| (s.eps.ln(), s.sup_total().ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar(x: f64) -> RMatrix {
        RMatrix::from_element(1, 1, x)
    }

    fn toy_c3() -> CoefficientModel {
        CoefficientModel::from_fns(
            "toy",
            ModelCase::C3,
            1,
            f64::INFINITY,
            scalar(1.0),
            scalar(0.0),
            |_| 2.0 * std::f64::consts::PI,
            |_, _| scalar(1.0),
            |xi, _| scalar(xi.cos()),
        )
        .unwrap()
    }

    #[test]
    fn scalar_c3_assembly() {
        let a = assemble_system(&toy_c3(), 0.0, c(2.0, 0.0), 0.1).unwrap();
        assert_eq!(a[(0, 0)], c(1.0, 0.0));
    }

    #[test]
    fn c1_block_layout() {
        let m = CoefficientModel::from_fns(
            "zero",
            ModelCase::C1,
            2,
            1.0,
            RMatrix::zeros(2, 2),
            RMatrix::zeros(2, 2),
            |_| 1.0,
            |_, _| RMatrix::zeros(2, 2),
            |_, _| RMatrix::zeros(2, 2),
        )
        .unwrap();
        assert_eq!(system_dim(&m), 4);
        let a = assemble_system(&m, 0.3, c(1.0, 0.0), 0.5).unwrap();
        let expect = CMatrix::from_fn(4, 4, |i, j| if i.abs_diff(j) == 2 { c(1.0, 0.0) } else { c(0.0, 0.0) });
        assert_eq!(a, expect);
        let nil = limiting_system(&m, c(0.0, 0.0)).unwrap();
        assert_eq!(&nil * &nil, CMatrix::zeros(4, 4));
    }

    #[test]
    fn c1_perturbation_is_lambda_free() {
        let m = CoefficientModel::from_fns(
            "wiggle",
            ModelCase::C1,
            1,
            1.0,
            scalar(0.3),
            scalar(-1.0),
            |_| 2.0,
            |xi, e| scalar(0.3 + e * (std::f64::consts::PI * xi).sin()),
            |xi, e| scalar(-1.0 + e * (std::f64::consts::PI * xi).cos()),
        )
        .unwrap();
        let b1 = perturbation_matrix(&m, 0.7, c(1.0, 2.0), 0.2).unwrap();
        let b2 = perturbation_matrix(&m, 0.7, c(-3.0, 0.5), 0.2).unwrap();
        assert!(crate::linalg::max_norm(&(b1 - b2)) < 1e-15);
        let b0 = perturbation_matrix(&m, 0.7, c(1.0, 0.0), 0.0).unwrap();
        assert!(crate::linalg::max_norm(&b0) == 0.0);
    }

    #[test]
    fn c2_rows_and_bottom_right() {
        // n = 2, m = 1, a22 = -c0 with c0 = 1; hand-expanded reference
        let (fu, fw, gu, gw) = (2.0, 1.0, -2.0, -1.0);
        let a1 = RMatrix::from_row_slice(2, 2, &[-1.0, 0.0, 0.0, -1.0]);
        let a0 = RMatrix::from_row_slice(2, 2, &[fu, fw, gu, gw]);
        let lam = c(0.4, -1.1);
        let a = system_parts(ModelCase::C2 { m: 1 }, 2, &a1, &a0).unwrap().at(lam);
        let one = c(1.0, 0.0);
        let zero = c(0.0, 0.0);
        let expect = CMatrix::from_row_slice(
            3,
            3,
            &[zero, one, zero, lam - fu, one, c(-fw, 0.0), c(gu, 0.0), zero, -(lam - gw)],
        );
        assert!(crate::linalg::max_norm(&(a - expect)) < 1e-15);
    }

    #[test]
    fn singular_blocks_are_rejected() {
        let a1 = RMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        let err = system_parts(ModelCase::C3, 2, &a1, &RMatrix::zeros(2, 2)).unwrap_err();
        assert!(matches!(err, Error::SingularCoefficient { what: "a1", .. }));
        let a1 = RMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        let err = system_parts(ModelCase::C2 { m: 1 }, 2, &a1, &RMatrix::zeros(2, 2)).unwrap_err();
        assert!(matches!(err, Error::SingularCoefficient { what: "a22", .. }));
    }

    #[test]
    fn validation_of_constant_model_is_clean() {
        let m = CoefficientModel::from_fns(
            "frozen",
            ModelCase::C1,
            1,
            1.0,
            scalar(0.0),
            scalar(2.0),
            |_| 1.0,
            |_, _| scalar(0.0),
            |_, _| scalar(2.0),
        )
        .unwrap();
        let r = validate_model(&m, &[0.1, 0.05]);
        assert!(r.ok(), "{:?}", r.violations);
        assert!(r.samples.iter().all(|s| s.sup_total() == 0.0 && s.periodicity_residual == 0.0));
        assert!(r.order.is_none());
    }

    #[test]
    fn singular_c3_limit_is_flagged() {
        let m = CoefficientModel::from_fns(
            "bad",
            ModelCase::C3,
            1,
            1.0,
            scalar(0.0),
            scalar(0.0),
            |_| 1.0,
            |_, _| scalar(1.0),
            |_, _| scalar(0.0),
        )
        .unwrap();
        let r = validate_model(&m, &[0.5]);
        assert!(r.violations.iter().any(|v| v.contains("a1 singular")));
    }
}
