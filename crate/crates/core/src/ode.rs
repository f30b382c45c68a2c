//! Adaptive Dormand–Prince 5(4) integrator over flat state vectors.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

pub trait Element: Copy + Default + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn magnitude(self) -> f64;
}

impl Element for f64 {
    fn magnitude(self) -> f64 {
        self.abs()
    }
}

impl Element for Complex64 {
    fn magnitude(self) -> f64 {
        self.norm()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
}

impl Tolerances {
    /// Relative tolerance `tol`, absolute tolerance `tol / 100`.
    pub fn from_tol(tol: f64) -> Self {
        Tolerances { rtol: tol, atol: tol * 1e-2 }
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { rtol: 1e-10, atol: 1e-12 }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct IntegratorStats {
    pub steps: usize,
    pub rejections: usize,
    pub rtol: f64,
    pub atol: f64,
}

impl IntegratorStats {
    pub fn absorb(&mut self, other: &IntegratorStats) {
        self.steps += other.steps;
        self.rejections += other.rejections;
        self.rtol = other.rtol;
        self.atol = other.atol;
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// fifth-order minus embedded fourth-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const MAX_STEPS: usize = 2_000_000;

struct Stages<T> {
    k: [Vec<T>; 7],
    tmp: Vec<T>,
    y_new: Vec<T>,
}

impl<T: Element> Stages<T> {
    fn new(n: usize) -> Self {
        Stages {
            k: std::array::from_fn(|_| vec![T::default(); n]),
            tmp: vec![T::default(); n],
            y_new: vec![T::default(); n],
        }
    }
}

fn combine<T: Element>(out: &mut [T], y: &[T], h: f64, terms: &[(f64, &[T])]) {
    for i in 0..y.len() {
        let mut acc = T::default();
        for (w, k) in terms {
            acc = acc + k[i] * *w;
        }
        out[i] = y[i] + acc * h;
    }
}

/// One explicit step of size `h` from `(t, y)`; `k1 = f(t, y)` must already
/// be in `st.k[0]`. Result in `st.y_new`, new derivative in `st.k[6]`.
fn step<T, F>(rhs: &mut F, t: f64, y: &[T], h: f64, st: &mut Stages<T>)
where
    T: Element,
    F: FnMut(f64, &[T], &mut [T]),
{
    let [k1, k2, k3, k4, k5, k6, k7] = &mut st.k;
    combine(&mut st.tmp, y, h, &[(A21, k1)]);
    rhs(t + C2 * h, &st.tmp, k2);
    combine(&mut st.tmp, y, h, &[(A31, k1), (A32, k2)]);
    rhs(t + C3 * h, &st.tmp, k3);
    combine(&mut st.tmp, y, h, &[(A41, k1), (A42, k2), (A43, k3)]);
    rhs(t + C4 * h, &st.tmp, k4);
    combine(&mut st.tmp, y, h, &[(A51, k1), (A52, k2), (A53, k3), (A54, k4)]);
    rhs(t + C5 * h, &st.tmp, k5);
    combine(&mut st.tmp, y, h, &[(A61, k1), (A62, k2), (A63, k3), (A64, k4), (A65, k5)]);
    rhs(t + h, &st.tmp, k6);
    combine(&mut st.y_new, y, h, &[(B1, k1), (B3, k3), (B4, k4), (B5, k5), (B6, k6)]);
    rhs(t + h, &st.y_new, k7);
}

fn error_norm<T: Element>(st: &Stages<T>, y: &[T], h: f64, tol: Tolerances) -> f64 {
    let [k1, _, k3, k4, k5, k6, k7] = &st.k;
    let mut sum = 0.0;
    for i in 0..y.len() {
        let e = (k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6 + k7[i] * E7) * h;
        let sc = tol.atol + tol.rtol * y[i].magnitude().max(st.y_new[i].magnitude());
        let r = e.magnitude() / sc;
        sum += r * r;
    }
    (sum / y.len().max(1) as f64).sqrt()
}

/// Integrate `y' = rhs(t, y)` from `t0` to `t1 > t0` in place.
pub fn integrate<T, F>(
    mut rhs: F,
    t0: f64,
    t1: f64,
    y: &mut [T],
    tol: Tolerances,
    stats: &mut IntegratorStats,
) -> Result<()>
where
    T: Element,
    F: FnMut(f64, &[T], &mut [T]),
{
    stats.rtol = tol.rtol;
    stats.atol = tol.atol;
    if t1 <= t0 {
        return Ok(());
    }
    let n = y.len();
    let mut st = Stages::new(n);
    let span = t1 - t0;
    let mut t = t0;
    rhs(t, y, &mut st.k[0]);

    let mut h = initial_step(y, &st.k[0], span, tol);
    while t < t1 {
        if stats.steps > MAX_STEPS {
            return Err(Error::Stiffness { xi: t });
        }
        let last = t + h >= t1;
        if last {
            h = t1 - t;
        }
        step(&mut rhs, t, y, h, &mut st);
        let err = error_norm(&st, y, h, tol);
        if !err.is_finite() {
            stats.rejections += 1;
            h *= 0.25;
        } else if err <= 1.0 {
            stats.steps += 1;
            t = if last { t1 } else { t + h };
            y.copy_from_slice(&st.y_new);
            st.k.swap(0, 6);
            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            h *= factor;
            continue;
        } else {
            stats.rejections += 1;
            h *= (0.9 * err.powf(-0.2)).clamp(0.1, 1.0);
        }
        if h < 1e-14 * t.abs().max(span) {
            return Err(Error::Stiffness { xi: t });
        }
    }
    Ok(())
}

fn initial_step<T: Element>(y: &[T], f: &[T], span: f64, tol: Tolerances) -> f64 {
    let mut d0 = 0.0;
    let mut d1 = 0.0;
    for i in 0..y.len() {
        let sc = tol.atol + tol.rtol * y[i].magnitude();
        d0 += (y[i].magnitude() / sc).powi(2);
        d1 += (f[i].magnitude() / sc).powi(2);
    }
    let h = if d0 < 1e-10 || d1 < 1e-10 { 1e-6 } else { 0.01 * (d0 / d1).sqrt() };
    h.min(span).max(1e-12 * span)
}

/// Single unchecked step of size `h`; used for locating events inside an
/// already accepted step.
pub fn single_step<T, F>(mut rhs: F, t: f64, y: &[T], h: f64) -> Vec<T>
where
    T: Element,
    F: FnMut(f64, &[T], &mut [T]),
{
    let mut st = Stages::new(y.len());
    rhs(t, y, &mut st.k[0]);
    step(&mut rhs, t, y, h, &mut st);
    st.y_new
}

/// Integrate while watching the scalar `event(y)` for an upward zero
/// crossing after `t_min`. Returns the crossing time and state, or `None`
/// if `t_max` is reached first.
pub fn integrate_until_event<F, G>(
    mut rhs: F,
    event: G,
    t_min: f64,
    t_max: f64,
    y0: &[f64],
    tol: Tolerances,
    stats: &mut IntegratorStats,
) -> Result<Option<(f64, Vec<f64>)>>
where
    F: FnMut(f64, &[f64], &mut [f64]),
    G: Fn(&[f64]) -> f64,
{
    stats.rtol = tol.rtol;
    stats.atol = tol.atol;
    let n = y0.len();
    let mut y = y0.to_vec();
    let mut st = Stages::new(n);
    let mut t = 0.0;
    rhs(t, &y, &mut st.k[0]);
    let mut h = initial_step(&y, &st.k[0], t_max, tol);
    let mut g_prev = event(&y);
    while t < t_max {
        if stats.steps > MAX_STEPS {
            return Err(Error::Stiffness { xi: t });
        }
        step(&mut rhs, t, &y, h, &mut st);
        let err = error_norm(&st, &y, h, tol);
        if !(err <= 1.0) {
            stats.rejections += 1;
            h *= if err.is_finite() { (0.9 * err.powf(-0.2)).clamp(0.1, 1.0) } else { 0.25 };
            if h < 1e-14 * t_max {
                return Err(Error::Stiffness { xi: t });
            }
            continue;
        }
        stats.steps += 1;
        let g_new = event(&st.y_new);
        if t + h > t_min && g_prev < 0.0 && g_new >= 0.0 {
            // Illinois false position on the step length.
            let (mut lo, mut hi) = (0.0, h);
            let (mut g_lo, mut g_hi) = (g_prev, g_new);
            let mut side = 0i32;
            let mut best = (h, st.y_new.clone());
            for _ in 0..100 {
                let tau = (lo * g_hi - hi * g_lo) / (g_hi - g_lo);
                let y_tau = single_step(&mut rhs, t, &y, tau);
                let g_tau = event(&y_tau);
                best = (tau, y_tau);
                if g_tau.abs() < 1e-15 || (hi - lo) < 1e-15 * (1.0 + t) {
                    break;
                }
                if g_tau < 0.0 {
                    lo = tau;
                    g_lo = g_tau;
                    if side == -1 {
                        g_hi *= 0.5;
                    }
                    side = -1;
                } else {
                    hi = tau;
                    g_hi = g_tau;
                    if side == 1 {
                        g_lo *= 0.5;
                    }
                    side = 1;
                }
            }
            return Ok(Some((t + best.0, best.1)));
        }
        g_prev = g_new;
        t += h;
        y.copy_from_slice(&st.y_new);
        st.k.swap(0, 6);
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h *= factor;
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay() {
        let mut y = [1.0_f64];
        let mut stats = IntegratorStats::default();
        integrate(|_, y: &[f64], dy: &mut [f64]| dy[0] = -2.0 * y[0], 0.0, 3.0, &mut y, Tolerances::default(), &mut stats)
            .unwrap();
        assert!((y[0] - (-6.0_f64).exp()).abs() < 1e-11);
        assert!(stats.steps > 0);
    }

    #[test]
    fn complex_rotation() {
        let mut y = [Complex64::new(1.0, 0.0)];
        let mut stats = IntegratorStats::default();
        let w = Complex64::new(0.0, 3.0);
        integrate(
            move |_, y: &[Complex64], dy: &mut [Complex64]| dy[0] = w * y[0],
            0.0,
            2.0,
            &mut y,
            Tolerances::default(),
            &mut stats,
        )
        .unwrap();
        assert!((y[0] - (w * 2.0).exp()).norm() < 1e-9);
    }

    #[test]
    fn harmonic_return_time() {
        let mut stats = IntegratorStats::default();
        // section through (1, 0) orthogonal to the flow direction (0, -1)
        let hit = integrate_until_event(
            |_, y: &[f64], dy: &mut [f64]| {
                dy[0] = y[1];
                dy[1] = -y[0];
            },
            |y| -y[1],
            0.5,
            20.0,
            &[1.0, 0.0],
            Tolerances { rtol: 1e-12, atol: 1e-14 },
            &mut stats,
        )
        .unwrap()
        .unwrap();
        assert!((hit.0 - 2.0 * std::f64::consts::PI).abs() < 1e-9, "{}", hit.0);
    }
}
