//! Principal fundamental matrices over one period, Floquet data, the
//! periodic Evans function and its homotopy family.
//!
//! The Bloch shift `−iμI` commutes with everything, so the μ-free system is
//! integrated once and the result multiplied by `exp(−iμT)`. This makes the
//! homotopy Evans function exactly `2π/T`-periodic in μ.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{c, det_and_derivative, eigenvalues, expm, identity, CMatrix, I};
use crate::model::{lambda_part, limiting_parts, system_dim, system_parts, CoefficientModel};
use crate::ode::{integrate, IntegratorStats, Tolerances};

#[derive(Debug, Clone, Serialize)]
pub struct MonodromyResult {
    #[serde(skip)]
    pub matrix: CMatrix,
    #[serde(skip)]
    pub multipliers: Vec<Complex64>,
    #[serde(skip)]
    pub exponents: Vec<Complex64>,
    pub period: f64,
    pub integrator_stats: IntegratorStats,
}

/// Principal matrix and its λ-derivative, both including the Bloch phase.
#[derive(Debug, Clone)]
pub struct Fundamental {
    pub matrix: CMatrix,
    pub d_lambda: Option<CMatrix>,
    pub period: f64,
    pub stats: IntegratorStats,
}

fn check_s(s: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::domain(format!("homotopy parameter s = {s} outside [0, 1]")));
    }
    Ok(())
}

fn bloch_phase(mu: f64, period: f64) -> Complex64 {
    (-I * (mu * period)).exp()
}

/// `Φ(T)` for `Y' = (A(λ) − iμ + s B(ξ, ε)) Y`, optionally with `∂λ Φ(T)`.
///
/// With `force_integration = false` the constant-coefficient case `s = 0`
/// is evaluated with matrix exponentials.
pub fn fundamental(
    model: &CoefficientModel,
    s: f64,
    lambda: Complex64,
    mu: f64,
    eps: f64,
    tol: Tolerances,
    with_derivative: bool,
    force_integration: bool,
) -> Result<Fundamental> {
    check_s(s)?;
    if !(tol.rtol > 0.0 && tol.atol > 0.0) {
        return Err(Error::domain("tolerances must be positive"));
    }
    let period = model.period(eps)?;
    let lim = limiting_parts(model)?;
    let phase = bloch_phase(mu, period);
    let dim = system_dim(model);

    if s == 0.0 && !force_integration {
        let a = lim.at(lambda) * c(period, 0.0);
        let (matrix, d_lambda) = if with_derivative {
            let mut big = CMatrix::zeros(2 * dim, 2 * dim);
            big.view_mut((0, 0), (dim, dim)).copy_from(&a);
            big.view_mut((dim, dim), (dim, dim)).copy_from(&a);
            big.view_mut((0, dim), (dim, dim)).copy_from(&(&lim.lambda_part * c(period, 0.0)));
            let e = expm(&big);
            (e.view((0, 0), (dim, dim)).into_owned(), Some(e.view((0, dim), (dim, dim)).into_owned()))
        } else {
            (expm(&a), None)
        };
        return Ok(Fundamental {
            matrix: matrix * phase,
            d_lambda: d_lambda.map(|d| d * phase),
            period,
            stats: IntegratorStats { rtol: tol.rtol, atol: tol.atol, ..Default::default() },
        });
    }

    let field = model.field();
    let (a1_eps, _) = model.coefficients_at(0.0, eps)?;
    let lam_eps = lambda_part(model.case, model.n, &a1_eps)?;
    let lam_s = &lim.lambda_part * c(1.0 - s, 0.0) + &lam_eps * c(s, 0.0);
    let frozen = lim.at(lambda) * c(1.0 - s, 0.0);
    // validate once so the right-hand side can assume invertible blocks
    system_parts(model.case, model.n, &a1_eps, &model.a0_lim)?;

    let na = field.aux_dim();
    let nn = dim * dim;
    let blocks = if with_derivative { 2 } else { 1 };
    let mut y = vec![c(0.0, 0.0); na + blocks * nn];
    for (k, v) in field.aux_initial(eps)?.into_iter().enumerate() {
        y[k] = c(v, 0.0);
    }
    for i in 0..dim {
        y[na + i * dim + i] = c(1.0, 0.0);
    }

    let case = model.case;
    let n = model.n;
    let mut aux = vec![0.0; na];
    let mut daux = vec![0.0; na];
    let mut failure: Option<Error> = None;
    let rhs = |xi: f64, y: &[Complex64], dy: &mut [Complex64]| {
        for k in 0..na {
            aux[k] = y[k].re;
        }
        field.aux_rhs(xi, &aux, eps, &mut daux);
        for k in 0..na {
            dy[k] = c(daux[k], 0.0);
        }
        let (a1, a0) = field.coefficients(xi, &aux, eps);
        let a = match system_parts(case, n, &a1, &a0) {
            Ok(p) => &frozen + p.at(lambda) * c(s, 0.0),
            Err(e) => {
                failure.get_or_insert(e);
                frozen.clone()
            }
        };
        let phi = &y[na..na + nn];
        mat_cols(&a, phi, &mut dy[na..na + nn], dim);
        if with_derivative {
            let dphi = &y[na + nn..];
            let out = &mut dy[na + nn..];
            mat_cols(&a, dphi, out, dim);
            add_mat_cols(&lam_s, phi, out, dim);
        }
    };
    let mut stats = IntegratorStats::default();
    integrate(rhs, 0.0, period, &mut y, tol, &mut stats)?;
    if let Some(e) = failure {
        return Err(e);
    }
    let matrix = CMatrix::from_column_slice(dim, dim, &y[na..na + nn]) * phase;
    let d_lambda = with_derivative.then(|| CMatrix::from_column_slice(dim, dim, &y[na + nn..]) * phase);
    Ok(Fundamental { matrix, d_lambda, period, stats })
}

/// `out[:, j] = a · x[:, j]` on column-major slices.
fn mat_cols(a: &CMatrix, x: &[Complex64], out: &mut [Complex64], dim: usize) {
    for j in 0..dim {
        for i in 0..dim {
            let mut acc = c(0.0, 0.0);
            for k in 0..dim {
                acc += a[(i, k)] * x[j * dim + k];
            }
            out[j * dim + i] = acc;
        }
    }
}

fn add_mat_cols(a: &CMatrix, x: &[Complex64], out: &mut [Complex64], dim: usize) {
    for j in 0..dim {
        for i in 0..dim {
            let mut acc = c(0.0, 0.0);
            for k in 0..dim {
                acc += a[(i, k)] * x[j * dim + k];
            }
            out[j * dim + i] += acc;
        }
    }
}

/// Fundamental solution at `t_end` of `Y' = a(ξ) Y`, `Y(0) = I`, by direct
/// integration.
pub fn fundamental_solution(
    a: impl Fn(f64) -> CMatrix,
    dim: usize,
    t_end: f64,
    tol: Tolerances,
) -> Result<(CMatrix, IntegratorStats)> {
    let mut y: Vec<Complex64> = identity(dim).as_slice().to_vec();
    let mut stats = IntegratorStats::default();
    integrate(
        |xi, y: &[Complex64], dy: &mut [Complex64]| mat_cols(&a(xi), y, dy, dim),
        0.0,
        t_end,
        &mut y,
        tol,
        &mut stats,
    )?;
    Ok((CMatrix::from_column_slice(dim, dim, &y), stats))
}

fn monodromy_from(f: Fundamental) -> Result<MonodromyResult> {
    let multipliers = eigenvalues(&f.matrix).ok_or_else(|| Error::NumericalFailure {
        message: "eigenvalues of the monodromy matrix did not converge".into(),
        residuals: vec![],
    })?;
    let exponents = exponents_of(&multipliers, f.period)?;
    Ok(MonodromyResult { matrix: f.matrix, multipliers, exponents, period: f.period, integrator_stats: f.stats })
}

/// Monodromy of the homotopy system at parameter `s`.
pub fn principal_matrix(
    model: &CoefficientModel,
    s: f64,
    lambda: Complex64,
    mu: f64,
    eps: f64,
    tol: Tolerances,
) -> Result<MonodromyResult> {
    monodromy_from(fundamental(model, s, lambda, mu, eps, tol, false, false)?)
}

pub fn homotopy_evans(
    model: &CoefficientModel,
    s: f64,
    lambda: Complex64,
    mu: f64,
    eps: f64,
    tol: Tolerances,
) -> Result<Complex64> {
    let f = fundamental(model, s, lambda, mu, eps, tol, false, false)?;
    Ok(crate::linalg::det(&(f.matrix - identity(system_dim(model)))))
}

/// `ℰ(s, λ)` together with `∂λ ℰ`.
pub fn homotopy_evans_with_derivative(
    model: &CoefficientModel,
    s: f64,
    lambda: Complex64,
    mu: f64,
    eps: f64,
    tol: Tolerances,
) -> Result<(Complex64, Complex64)> {
    let f = fundamental(model, s, lambda, mu, eps, tol, true, false)?;
    let dim = system_dim(model);
    let d = f.d_lambda.expect("derivative requested");
    Ok(det_and_derivative(&(f.matrix - identity(dim)), &d))
}

/// `E(λ, μ, ε) = det(Ψ(T) − I)`.
pub fn evans(model: &CoefficientModel, lambda: Complex64, mu: f64, eps: f64, tol: Tolerances) -> Result<Complex64> {
    homotopy_evans(model, 1.0, lambda, mu, eps, tol)
}

pub fn evans_with_derivative(
    model: &CoefficientModel,
    lambda: Complex64,
    mu: f64,
    eps: f64,
    tol: Tolerances,
) -> Result<(Complex64, Complex64)> {
    homotopy_evans_with_derivative(model, 1.0, lambda, mu, eps, tol)
}

fn exponents_of(multipliers: &[Complex64], period: f64) -> Result<Vec<Complex64>> {
    multipliers
        .iter()
        .map(|m| {
            let modulus = m.norm();
            if !(modulus >= 1e-300) {
                return Err(Error::Underflow { modulus });
            }
            // principal logarithm: imaginary part in (−π, π]
            Ok(m.ln() / period)
        })
        .collect()
}

/// Floquet exponents with imaginary parts in `(−π/T, π/T]`.
pub fn floquet_exponents(result: &MonodromyResult) -> Result<Vec<Complex64>> {
    exponents_of(&result.multipliers, result.period)
}
