//! Small dense complex linear-algebra helpers on top of nalgebra.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type RMatrix = DMatrix<f64>;

pub const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn to_complex(m: &RMatrix) -> CMatrix {
    m.map(|x| Complex64::new(x, 0.0))
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn max_norm(m: &CMatrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

pub fn max_norm_real(m: &RMatrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

fn one_norm(m: &CMatrix) -> f64 {
    (0..m.ncols())
        .map(|j| m.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn det(m: &CMatrix) -> Complex64 {
    if m.nrows() == 0 {
        return Complex64::new(1.0, 0.0);
    }
    m.clone().lu().determinant()
}

/// Reciprocal 1-norm condition number; 0 for exactly singular input.
pub fn rcond(m: &RMatrix) -> f64 {
    if m.nrows() == 0 {
        return 1.0;
    }
    let norm = (0..m.ncols())
        .map(|j| m.column(j).iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    match m.clone().try_inverse() {
        Some(inv) => {
            let inv_norm = (0..inv.ncols())
                .map(|j| inv.column(j).iter().map(|x| x.abs()).sum::<f64>())
                .fold(0.0, f64::max);
            if norm == 0.0 || !inv_norm.is_finite() {
                0.0
            } else {
                1.0 / (norm * inv_norm)
            }
        }
        None => 0.0,
    }
}

/// Eigenvalues through the complex Schur form.
pub fn eigenvalues(m: &CMatrix) -> Option<Vec<Complex64>> {
    let n = m.nrows();
    if n == 0 {
        return Some(Vec::new());
    }
    if n == 1 {
        return Some(vec![m[(0, 0)]]);
    }
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return None;
    }
    let schur = m.clone().try_schur(f64::EPSILON, 10_000)?;
    let (_, t) = schur.unpack();
    Some((0..n).map(|i| t[(i, i)]).collect())
}

pub fn eigenvalues_real(m: &RMatrix) -> Option<Vec<Complex64>> {
    eigenvalues(&to_complex(m))
}

/// Matrix exponential by scaling and squaring with a diagonal Padé [8/8]
/// approximant.
pub fn expm(a: &CMatrix) -> CMatrix {
    const Q: usize = 8;
    let n = a.nrows();
    let norm = one_norm(a);
    let mut squarings = 0u32;
    if norm > 0.25 {
        squarings = (norm / 0.25).log2().ceil() as u32;
    }
    let scaled = a * Complex64::new(0.5_f64.powi(squarings as i32), 0.0);

    let mut coeffs = [0.0_f64; Q + 1];
    coeffs[0] = 1.0;
    for k in 1..=Q {
        coeffs[k] = coeffs[k - 1] * ((Q + 1 - k) as f64) / ((k * (2 * Q + 1 - k)) as f64);
    }

    let mut num = identity(n) * Complex64::new(coeffs[0], 0.0);
    let mut den = num.clone();
    let mut power = identity(n);
    for (k, &ck) in coeffs.iter().enumerate().skip(1) {
        power = &power * &scaled;
        let term = &power * Complex64::new(ck, 0.0);
        num += &term;
        if k % 2 == 0 {
            den += &term;
        } else {
            den -= &term;
        }
    }
    let mut result = den.lu().solve(&num).unwrap_or_else(|| identity(n));
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

/// Determinant of `m` and its derivative along `dm`, computed column by
/// column so that singular `m` is handled without inversion.
pub fn det_and_derivative(m: &CMatrix, dm: &CMatrix) -> (Complex64, Complex64) {
    let value = det(m);
    let mut deriv = Complex64::new(0.0, 0.0);
    for k in 0..m.ncols() {
        let mut replaced = m.clone();
        replaced.set_column(k, &dm.column(k));
        deriv += det(&replaced);
    }
    (value, deriv)
}
