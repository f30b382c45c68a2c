//! Dense complex polynomials: arithmetic, determinants of polynomial
//! matrices by cofactor expansion, and companion-matrix root finding.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{eigenvalues, CMatrix};

/// Coefficients in ascending order of degree.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly(pub Vec<Complex64>);

impl Poly {
    pub fn zero() -> Self {
        Poly(vec![])
    }

    pub fn constant(c: Complex64) -> Self {
        Poly(vec![c])
    }

    /// `a + b x + c x^2`
    pub fn quadratic(a: Complex64, b: Complex64, c: Complex64) -> Self {
        Poly(vec![a, b, c])
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.0
    }

    /// Degree after dropping exactly-zero leading coefficients; `None` for
    /// the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.0.iter().rposition(|c| *c != Complex64::new(0.0, 0.0))
    }

    pub fn eval(&self, x: Complex64) -> Complex64 {
        self.0
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * x + c)
    }

    /// Sum of |c_k| |x|^k, the magnitude against which rounding in
    /// `eval(x)` should be judged.
    pub fn eval_scale(&self, x: Complex64) -> f64 {
        let r = x.norm();
        self.0.iter().rev().fold(0.0, |acc, c| acc * r + c.norm())
    }

    pub fn derivative(&self) -> Poly {
        Poly(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * k as f64)
                .collect(),
        )
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.0.len().max(other.0.len());
        let zero = Complex64::new(0.0, 0.0);
        Poly(
            (0..n)
                .map(|k| {
                    self.0.get(k).copied().unwrap_or(zero) + other.0.get(k).copied().unwrap_or(zero)
                })
                .collect(),
        )
    }

    pub fn scale(&self, s: Complex64) -> Poly {
        Poly(self.0.iter().map(|c| c * s).collect())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.0.is_empty() || other.0.is_empty() {
            return Poly::zero();
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly(out)
    }

    /// All complex roots, counted with multiplicity.
    ///
    /// Leading coefficients below `1e-14` of the largest coefficient are
    /// trimmed. Roots are eigenvalues of the companion matrix, polished by
    /// Newton steps on the original coefficients; numerically coincident
    /// roots are replaced by their cluster mean.
    pub fn roots(&self) -> Result<Vec<Complex64>> {
        let scale = self.0.iter().fold(0.0_f64, |m, c| m.max(c.norm()));
        if scale == 0.0 {
            return Err(Error::NumericalFailure {
                message: "roots of the zero polynomial are undefined".into(),
                residuals: vec![],
            });
        }
        let mut coeffs = self.0.clone();
        while let Some(last) = coeffs.last() {
            if last.norm() <= 1e-14 * scale {
                coeffs.pop();
            } else {
                break;
            }
        }
        let deg = coeffs.len() - 1;
        if deg == 0 {
            return Ok(vec![]);
        }
        let lead = coeffs[deg];
        let mut companion = CMatrix::zeros(deg, deg);
        for k in 0..deg {
            companion[(0, k)] = -coeffs[deg - 1 - k] / lead;
        }
        for k in 1..deg {
            companion[(k, k - 1)] = Complex64::new(1.0, 0.0);
        }
        let raw = eigenvalues(&companion).ok_or_else(|| Error::NumericalFailure {
            message: format!("companion eigenvalue iteration did not converge (degree {deg})"),
            residuals: vec![],
        })?;

        let trimmed = Poly(coeffs);
        let dp = trimmed.derivative();
        let mut roots: Vec<Complex64> = raw
            .into_iter()
            .map(|mut z| {
                for _ in 0..3 {
                    let f = trimmed.eval(z);
                    let df = dp.eval(z);
                    if df.norm() == 0.0 {
                        break;
                    }
                    let step = f / df;
                    let candidate = z - step;
                    if trimmed.eval(candidate).norm() < f.norm() {
                        z = candidate;
                    } else {
                        break;
                    }
                }
                z
            })
            .collect();
        merge_clusters(&mut roots, 1e-7);

        let residuals: Vec<f64> = roots
            .iter()
            .map(|z| trimmed.eval(*z).norm() / trimmed.eval_scale(*z).max(f64::MIN_POSITIVE))
            .collect();
        if residuals.iter().any(|r| !r.is_finite() || *r > 1e-6) {
            return Err(Error::NumericalFailure {
                message: "polynomial root residuals too large".into(),
                residuals,
            });
        }
        Ok(roots)
    }
}

/// Replace groups of roots closer than `rel * (1 + |z|)` by their mean.
fn merge_clusters(roots: &mut [Complex64], rel: f64) {
    let n = roots.len();
    let mut group = vec![usize::MAX; n];
    for i in 0..n {
        if group[i] != usize::MAX {
            continue;
        }
        group[i] = i;
        let mut changed = true;
        while changed {
            changed = false;
            for j in 0..n {
                if group[j] != usize::MAX {
                    continue;
                }
                let close = (0..n).any(|k| {
                    group[k] == i && (roots[k] - roots[j]).norm() <= rel * (1.0 + roots[k].norm())
                });
                if close {
                    group[j] = i;
                    changed = true;
                }
            }
        }
    }
    for g in 0..n {
        let members: Vec<usize> = (0..n).filter(|&k| group[k] == g).collect();
        if members.len() > 1 {
            let mean = members.iter().map(|&k| roots[k]).sum::<Complex64>() / members.len() as f64;
            for k in members {
                roots[k] = mean;
            }
        }
    }
}

/// Determinant of a square matrix of polynomials by cofactor expansion
/// along the first row.
pub fn poly_det(m: &[Vec<Poly>]) -> Poly {
    let n = m.len();
    match n {
        0 => Poly::constant(Complex64::new(1.0, 0.0)),
        1 => m[0][0].clone(),
        2 => m[0][0].mul(&m[1][1]).add(&m[0][1].mul(&m[1][0]).scale(Complex64::new(-1.0, 0.0))),
        _ => {
            let mut total = Poly::zero();
            for j in 0..n {
                if m[0][j].degree().is_none() {
                    continue;
                }
                let minor: Vec<Vec<Poly>> = m[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|(k, _)| *k != j)
                            .map(|(_, p)| p.clone())
                            .collect()
                    })
                    .collect();
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                total = total.add(&m[0][j].mul(&poly_det(&minor)).scale(Complex64::new(sign, 0.0)));
            }
            total
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    #[test]
    fn quadratic_roots() {
        // x^2 + 2.5 x - 1.5 = (x - 0.5)(x + 3)
        let p = Poly(vec![c(-1.5, 0.0), c(2.5, 0.0), c(1.0, 0.0)]);
        let mut r = p.roots().unwrap();
        r.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        assert!((r[0] - c(-3.0, 0.0)).norm() < 1e-14);
        assert!((r[1] - c(0.5, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn double_root_is_merged() {
        // (x - i/2)^2
        let a = c(0.0, 0.5);
        let p = Poly(vec![a * a, -a * 2.0, c(1.0, 0.0)]);
        let r = p.roots().unwrap();
        assert_eq!(r.len(), 2);
        for z in r {
            assert!((z - a).norm() < 1e-12, "{z}");
        }
    }

    #[test]
    fn det_of_polynomial_matrix() {
        // det [[x, 1], [2, x]] = x^2 - 2
        let x = Poly(vec![c(0.0, 0.0), c(1.0, 0.0)]);
        let m = vec![
            vec![x.clone(), Poly::constant(c(1.0, 0.0))],
            vec![Poly::constant(c(2.0, 0.0)), x],
        ];
        let d = poly_det(&m);
        assert_eq!(d.degree(), Some(2));
        assert!((d.eval(c(3.0, 0.0)) - c(7.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn det_three_by_three_matches_lu() {
        let vals = [
            [c(1.0, 0.0), c(2.0, 1.0), c(0.0, 0.0)],
            [c(-1.0, 0.5), c(0.3, 0.0), c(4.0, 0.0)],
            [c(0.0, 2.0), c(1.0, 0.0), c(-2.0, 0.0)],
        ];
        let m: Vec<Vec<Poly>> = vals
            .iter()
            .map(|row| row.iter().map(|z| Poly::constant(*z)).collect())
            .collect();
        let lu = crate::linalg::det(&CMatrix::from_fn(3, 3, |i, j| vals[i][j]));
        assert!((poly_det(&m).eval(c(0.0, 0.0)) - lu).norm() < 1e-13);
    }
}
