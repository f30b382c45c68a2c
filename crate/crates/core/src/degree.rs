//! Zero counting and location for analytic functions by the argument
//! principle.
//!
//! Winding numbers come from phase tracking along the boundary: any segment
//! whose phase jump reaches π/2 is bisected, so the count is an exact
//! integer once refinement terminates. Zeros are located by recursive
//! quadrisection of rectangles followed by Newton polishing.

use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::c;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "shape", rename_all = "lowercase")]
pub enum Shape {
    Circle { center: [f64; 2], radius: f64 },
    Rectangle { lo: [f64; 2], hi: [f64; 2] },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Contour {
    pub shape: Shape,
    pub base_samples: usize,
}

const DEFAULT_CIRCLE_SAMPLES: usize = 64;
const DEFAULT_EDGE_SAMPLES: usize = 8;
const JITTER_TRIES: usize = 3;
const MAX_DEPTH: u32 = 44;

impl Contour {
    pub fn circle(center: Complex64, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::domain(format!("circle radius must be positive, got {radius}")));
        }
        Ok(Contour {
            shape: Shape::Circle { center: [center.re, center.im], radius },
            base_samples: DEFAULT_CIRCLE_SAMPLES,
        })
    }

    /// Axis-aligned rectangle with opposite corners `a` and `b`.
    pub fn rectangle(a: Complex64, b: Complex64) -> Result<Self> {
        if a.re == b.re || a.im == b.im || !(a.re.is_finite() && a.im.is_finite() && b.re.is_finite() && b.im.is_finite()) {
            return Err(Error::domain("rectangle corners must differ in both coordinates"));
        }
        Ok(Contour {
            shape: Shape::Rectangle {
                lo: [a.re.min(b.re), a.im.min(b.im)],
                hi: [a.re.max(b.re), a.im.max(b.im)],
            },
            base_samples: 4 * DEFAULT_EDGE_SAMPLES,
        })
    }

    pub fn with_samples(mut self, n: usize) -> Self {
        self.base_samples = n.max(8);
        self
    }

    pub fn diameter(&self) -> f64 {
        match self.shape {
            Shape::Circle { radius, .. } => 2.0 * radius,
            Shape::Rectangle { lo, hi } => (hi[0] - lo[0]).hypot(hi[1] - lo[1]),
        }
    }

    pub fn contains(&self, z: Complex64) -> bool {
        match self.shape {
            Shape::Circle { center, radius } => (z - c(center[0], center[1])).norm() < radius,
            Shape::Rectangle { lo, hi } => z.re > lo[0] && z.re < hi[0] && z.im > lo[1] && z.im < hi[1],
        }
    }

    fn dilate(&self, amount: f64) -> Contour {
        let shape = match self.shape {
            Shape::Circle { center, radius } => Shape::Circle { center, radius: radius + amount },
            Shape::Rectangle { lo, hi } => Shape::Rectangle {
                lo: [lo[0] - amount, lo[1] - amount],
                hi: [hi[0] + amount, hi[1] + amount],
            },
        };
        Contour { shape, base_samples: self.base_samples }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ZeroCountReport {
    pub contour: Contour,
    pub count: i64,
    pub min_boundary_modulus: f64,
    pub refinement_depth: u32,
    pub samples_used: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Zero {
    pub lambda: Complex64,
    pub multiplicity: usize,
}

/// Memoizing wrapper so shared cell edges are evaluated once.
struct Evaluator<F> {
    f: F,
    cache: HashMap<(u64, u64), Complex64>,
    evals: usize,
}

impl<F: FnMut(Complex64) -> Result<Complex64>> Evaluator<F> {
    fn new(f: F) -> Self {
        Evaluator { f, cache: HashMap::new(), evals: 0 }
    }

    fn eval(&mut self, z: Complex64) -> Result<Complex64> {
        let key = (z.re.to_bits(), z.im.to_bits());
        if let Some(v) = self.cache.get(&key) {
            return Ok(*v);
        }
        let v = (self.f)(z)?;
        self.evals += 1;
        self.cache.insert(key, v);
        Ok(v)
    }
}

/// A boundary piece `t ↦ point(t)`, `t ∈ [0, 1]`.
#[derive(Clone, Copy)]
enum Piece {
    Arc { center: Complex64, radius: f64, t0: f64, t1: f64 },
    /// Points are generated from the canonical endpoint so that an edge
    /// shared by two cells is sampled at bit-identical points.
    Segment { from: Complex64, to: Complex64 },
}

fn lex_less(a: Complex64, b: Complex64) -> bool {
    (a.re, a.im) < (b.re, b.im)
}

impl Piece {
    fn point(&self, t: f64) -> Complex64 {
        match *self {
            Piece::Arc { center, radius, t0, t1 } => {
                let theta = 2.0 * PI * (t0 + (t1 - t0) * t);
                center + c(radius * theta.cos(), radius * theta.sin())
            }
            Piece::Segment { from, to } => {
                if t == 0.0 {
                    from
                } else if t == 1.0 {
                    to
                } else if lex_less(from, to) {
                    from + (to - from) * t
                } else {
                    to + (from - to) * (1.0 - t)
                }
            }
        }
    }
}

fn pieces(contour: &Contour) -> Vec<(Piece, usize)> {
    match contour.shape {
        Shape::Circle { center, radius } => {
            let n = contour.base_samples.max(8);
            let centre = c(center[0], center[1]);
            (0..n)
                .map(|k| {
                    let piece = Piece::Arc { center: centre, radius, t0: k as f64 / n as f64, t1: (k + 1) as f64 / n as f64 };
                    (piece, 1)
                })
                .collect()
        }
        Shape::Rectangle { lo, hi } => {
            let per_edge = (contour.base_samples / 4).max(2);
            let corners = [c(lo[0], lo[1]), c(hi[0], lo[1]), c(hi[0], hi[1]), c(lo[0], hi[1])];
            (0..4).map(|k| (Piece::Segment { from: corners[k], to: corners[(k + 1) % 4] }, per_edge)).collect()
        }
    }
}

struct Tracker {
    total_phase: f64,
    min_modulus: f64,
    min_at: Complex64,
    max_modulus: f64,
    depth: u32,
}

fn check_value(v: Complex64, z: Complex64) -> Result<()> {
    if !(v.re.is_finite() && v.im.is_finite()) {
        return Err(Error::NumericalFailure {
            message: format!("non-finite function value at {z}"),
            residuals: vec![],
        });
    }
    if v.norm() == 0.0 {
        return Err(Error::ZeroOnBoundary { at: z, modulus: 0.0 });
    }
    Ok(())
}

const MAX_TURN: f64 = 1.5;

/// Forward-difference estimate of `|f'(z) / f(z)|`.
fn log_rate<F: FnMut(Complex64) -> Result<Complex64>>(ev: &mut Evaluator<F>, z: Complex64, fz: Complex64) -> Result<f64> {
    let h = 1e-7 * (1.0 + z.norm());
    let f1 = ev.eval(z + h)?;
    Ok(((f1 - fz) / (h * fz)).norm())
}

#[allow(clippy::too_many_arguments)]
fn track_segment<F: FnMut(Complex64) -> Result<Complex64>>(
    ev: &mut Evaluator<F>,
    piece: &Piece,
    ta: f64,
    fa: Complex64,
    tb: f64,
    fb: Complex64,
    depth: u32,
    min_len: f64,
    tr: &mut Tracker,
) -> Result<()> {
    let jump = (fb / fa).arg();
    tr.depth = tr.depth.max(depth);
    let (za, zb) = (piece.point(ta), piece.point(tb));
    let len = (zb - za).norm();
    let short = len < min_len;
    if jump.abs() < FRAC_PI_2 {
        // |f'/f| ~ k / distance to the nearest zeros, so a short enough step
        // cannot hide a full turn
        let rate = log_rate(ev, za, fa)?.max(log_rate(ev, zb, fb)?);
        if len * rate <= MAX_TURN || depth >= MAX_DEPTH || short {
            tr.total_phase += jump;
            return Ok(());
        }
    }
    if depth >= MAX_DEPTH || short {
        let at = piece.point(0.5 * (ta + tb));
        return Err(Error::ZeroOnBoundary { at, modulus: fa.norm().min(fb.norm()) });
    }
    let tm = 0.5 * (ta + tb);
    let zm = piece.point(tm);
    let fm = ev.eval(zm)?;
    check_value(fm, zm)?;
    if fm.norm() < tr.min_modulus {
        tr.min_modulus = fm.norm();
        tr.min_at = zm;
    }
    tr.max_modulus = tr.max_modulus.max(fm.norm());
    track_segment(ev, piece, ta, fa, tm, fm, depth + 1, min_len, tr)?;
    track_segment(ev, piece, tm, fm, tb, fb, depth + 1, min_len, tr)
}

fn winding_once<F: FnMut(Complex64) -> Result<Complex64>>(
    ev: &mut Evaluator<F>,
    contour: &Contour,
) -> Result<ZeroCountReport> {
    let start_evals = ev.evals;
    let min_len = 1e-11 * contour.diameter();
    let mut tr = Tracker { total_phase: 0.0, min_modulus: f64::INFINITY, min_at: c(0.0, 0.0), max_modulus: 0.0, depth: 0 };
    for (piece, n) in pieces(contour) {
        let mut ta = 0.0;
        let za = piece.point(0.0);
        let mut fa = ev.eval(za)?;
        check_value(fa, za)?;
        if fa.norm() < tr.min_modulus {
            tr.min_modulus = fa.norm();
            tr.min_at = za;
        }
        tr.max_modulus = tr.max_modulus.max(fa.norm());
        for k in 1..=n {
            let tb = k as f64 / n as f64;
            let zb = piece.point(tb);
            let fb = ev.eval(zb)?;
            check_value(fb, zb)?;
            if fb.norm() < tr.min_modulus {
                tr.min_modulus = fb.norm();
                tr.min_at = zb;
            }
            tr.max_modulus = tr.max_modulus.max(fb.norm());
            track_segment(ev, &piece, ta, fa, tb, fb, 0, min_len, &mut tr)?;
            ta = tb;
            fa = fb;
        }
    }
    if tr.min_modulus < 1e-13 * tr.max_modulus {
        return Err(Error::ZeroOnBoundary { at: tr.min_at, modulus: tr.min_modulus });
    }
    let turns = tr.total_phase / (2.0 * PI);
    let count = turns.round();
    if (turns - count).abs() > 1e-6 {
        return Err(Error::NumericalFailure {
            message: format!("winding {turns} is not an integer"),
            residuals: vec![(turns - count).abs()],
        });
    }
    Ok(ZeroCountReport {
        contour: *contour,
        count: count as i64,
        min_boundary_modulus: tr.min_modulus,
        refinement_depth: tr.depth,
        samples_used: ev.evals - start_evals,
    })
}

fn winding_jittered<F: FnMut(Complex64) -> Result<Complex64>>(
    ev: &mut Evaluator<F>,
    contour: &Contour,
) -> Result<ZeroCountReport> {
    let step = 1e-6 * contour.diameter();
    let mut last = None;
    for attempt in 0..=JITTER_TRIES {
        let trial = if attempt == 0 { *contour } else { contour.dilate(step * attempt as f64) };
        match winding_once(ev, &trial) {
            Err(e @ Error::ZeroOnBoundary { .. }) => last = Some(e),
            other => return other,
        }
    }
    Err(last.expect("at least one attempt"))
}

/// Winding number of `f` along the contour, i.e. the number of zeros inside
/// counted with multiplicity. A contour that passes through or very close to
/// a zero is dilated outward by `1e-6` of its diameter, at most three times.
pub fn winding_number<F>(f: F, contour: &Contour) -> Result<ZeroCountReport>
where
    F: FnMut(Complex64) -> Result<Complex64>,
{
    let mut ev = Evaluator::new(f);
    winding_jittered(&mut ev, contour)
}

#[derive(Clone, Copy)]
struct Cell {
    lo: Complex64,
    hi: Complex64,
}

impl Cell {
    fn contour(&self, edge_samples: usize) -> Contour {
        Contour {
            shape: Shape::Rectangle { lo: [self.lo.re, self.lo.im], hi: [self.hi.re, self.hi.im] },
            base_samples: 4 * edge_samples,
        }
    }

    fn diameter(&self) -> f64 {
        (self.hi - self.lo).norm()
    }

    fn center(&self) -> Complex64 {
        (self.lo + self.hi) * 0.5
    }

    fn contains_slack(&self, z: Complex64, slack: f64) -> bool {
        let w = (self.hi.re - self.lo.re) * slack;
        let h = (self.hi.im - self.lo.im) * slack;
        z.re >= self.lo.re - w && z.re <= self.hi.re + w && z.im >= self.lo.im - h && z.im <= self.hi.im + h
    }

    fn split(&self, fx: f64, fy: f64) -> [Cell; 4] {
        let mx = self.lo.re + (self.hi.re - self.lo.re) * fx;
        let my = self.lo.im + (self.hi.im - self.lo.im) * fy;
        [
            Cell { lo: self.lo, hi: c(mx, my) },
            Cell { lo: c(mx, self.lo.im), hi: c(self.hi.re, my) },
            Cell { lo: c(self.lo.re, my), hi: c(mx, self.hi.im) },
            Cell { lo: c(mx, my), hi: self.hi },
        ]
    }
}

const SPLIT_OFFSETS: [f64; 4] = [0.0, 0.0137, -0.0291, 0.0413];
const EDGE_SAMPLES: usize = 4;
/// Relative evaluation error assumed when judging whether a cluster is a
/// single multiple zero.
const EVAL_NOISE: f64 = 1e-14;

struct Moments {
    centroid: Complex64,
    centroid_err: f64,
    spread: f64,
    floor: f64,
    /// mean |f| / ρ^k on the circle
    gain: f64,
}

struct Locator<'a, F, D> {
    ev: Evaluator<F>,
    df: Option<&'a mut D>,
    tol: f64,
    /// largest |f| on the region boundary
    scale: f64,
    found: Vec<Zero>,
}

impl<F, D> Locator<'_, F, D>
where
    F: FnMut(Complex64) -> Result<Complex64>,
    D: FnMut(Complex64) -> Result<Complex64>,
{
    fn count(&mut self, cell: &Cell) -> Result<i64> {
        Ok(winding_once(&mut self.ev, &cell.contour(EDGE_SAMPLES))?.count)
    }

    fn derivative(&mut self, z: Complex64, fz: Complex64) -> Result<Complex64> {
        if let Some(df) = self.df.as_mut() {
            return df(z);
        }
        let h = 1e-7 * (1.0 + z.norm());
        let f1 = (self.ev.f)(z + h)?;
        Ok((f1 - fz) / h)
    }

    /// Modified Newton `z ← z − k f/f'` from the cell center; `None` when
    /// the iteration leaves the cell or stalls.
    fn polish(&mut self, cell: &Cell, k: usize) -> Result<Option<Complex64>> {
        let mut z = cell.center();
        let mut fz = (self.ev.f)(z)?;
        let mut best = (fz.norm(), z);
        for _ in 0..60 {
            if fz.norm() == 0.0 {
                return Ok(cell.contains_slack(z, 0.0).then_some(z));
            }
            let d = self.derivative(z, fz)?;
            if d.norm() == 0.0 || !d.re.is_finite() {
                break;
            }
            let step = fz / d * k as f64;
            let next = z - step;
            if !cell.contains_slack(next, 0.5) {
                return Ok(None);
            }
            z = next;
            fz = (self.ev.f)(z)?;
            if fz.norm() < best.0 {
                best = (fz.norm(), z);
            }
            if step.norm() <= 1e-15 * (1.0 + z.norm()) {
                break;
            }
        }
        let z = best.1;
        Ok(cell.contains_slack(z, 0.0).then_some(z))
    }

    /// Power sums of the `k` zeros inside the circle, from the trapezoid
    /// rule on `h = log f − k log(z − c)`, which is periodic on the circle:
    /// `Σ (z_i − c)^p = −p ρ^p mean(e^{ipθ} h)`. Estimates with 64 and 128
    /// nodes are compared to bound the error.
    fn moments(&mut self, center: Complex64, rho: f64, k: usize) -> Result<Option<Moments>> {
        const N: usize = 128;
        let mut vals = Vec::with_capacity(N);
        for j in 0..N {
            let theta = 2.0 * PI * j as f64 / N as f64;
            let z = center + c(rho * theta.cos(), rho * theta.sin());
            let v = match self.ev.eval(z) {
                Ok(v) if v.norm() > 0.0 && v.re.is_finite() && v.im.is_finite() => v,
                Ok(_) | Err(Error::ZeroOnBoundary { .. }) => return Ok(None),
                Err(e) => return Err(e),
            };
            vals.push(v);
        }
        let mut phase = Vec::with_capacity(N);
        let mut acc = vals[0].arg();
        phase.push(acc);
        for j in 0..N {
            let jump = (vals[(j + 1) % N] / vals[j]).arg();
            if jump.abs() >= FRAC_PI_2 {
                return Ok(None);
            }
            acc += jump;
            if j + 1 < N {
                phase.push(acc);
            }
        }
        let turns = (acc - phase[0]) / (2.0 * PI);
        if (turns - k as f64).abs() > 1e-3 {
            return Ok(None);
        }
        let pmax = k.min(8);
        let kf = k as f64;
        let sums = |stride: usize| -> Vec<Complex64> {
            let n = N / stride;
            let mut s = vec![c(kf, 0.0); pmax + 1];
            for (p, slot) in s.iter_mut().enumerate().skip(1) {
                let mut acc = c(0.0, 0.0);
                for j in (0..N).step_by(stride) {
                    let theta = 2.0 * PI * j as f64 / N as f64;
                    let h = c(vals[j].norm().ln(), phase[j] - kf * theta);
                    acc += Complex64::from_polar(1.0, p as f64 * theta) * h;
                }
                *slot = -(acc / n as f64) * (p as f64 * rho.powi(p as i32));
            }
            s
        };
        let central = |s: &[Complex64]| -> (Complex64, Vec<Complex64>) {
            let mean = s[1] / kf;
            let cs = (2..=pmax)
                .map(|p| {
                    let mut binom = 1.0;
                    let mut acc = c(0.0, 0.0);
                    for j in 0..=p {
                        acc += s[j] * (-mean).powu((p - j) as u32) * binom;
                        binom = binom * (p - j) as f64 / (j + 1) as f64;
                    }
                    acc
                })
                .collect();
            (mean, cs)
        };
        let (m_fine, c_fine) = central(&sums(1));
        let (m_coarse, c_coarse) = central(&sums(2));
        let mut spread = 0.0_f64;
        let mut floor = 0.0_f64;
        for (i, (f, g)) in c_fine.iter().zip(&c_coarse).enumerate() {
            let p = (i + 2) as f64;
            spread = spread.max((f.norm() / kf).powf(1.0 / p));
            let noise = 4.0 * (f - g).norm() + 1e-13 * rho.powf(p);
            floor = floor.max((noise / kf).powf(1.0 / p));
        }
        let gain = vals.iter().map(|v| v.norm()).sum::<f64>() / N as f64 / rho.powi(k as i32);
        Ok(Some(Moments { centroid: center + m_fine, centroid_err: (m_fine - m_coarse).norm(), spread, floor, gain }))
    }

    /// Decide whether the `k` zeros in `cell` form a cluster narrower than
    /// `tol` (or narrower than floating point can resolve), zooming in on
    /// the centroid while the circle can shrink. Returns the most accurate
    /// centroid found.
    fn cluster(&mut self, cell: &Cell, k: usize) -> Result<Option<Complex64>> {
        let side = (cell.hi.re - cell.lo.re).max(cell.hi.im - cell.lo.im);
        let (mut center, mut rho) = (cell.center(), 1.5 * side);
        let mut best: Option<(f64, Complex64)> = None;
        // whether the last completed level showed a spread within resolution
        let mut resolved_last = false;
        for _ in 0..16 {
            let Some(m) = self.moments(center, rho, k)? else {
                break;
            };
            // radius to which evaluation noise alone can split a k-fold zero
            let blur = 2.0 * (EVAL_NOISE * self.scale / m.gain).powf(1.0 / k as f64);
            let resolved = self.tol.max(blur);
            if m.spread > m.floor.max(resolved) {
                return Ok(None);
            }
            if best.map_or(true, |b| m.centroid_err < b.0) {
                best = Some((m.centroid_err, m.centroid));
            }
            if m.spread <= self.tol {
                return Ok(best.map(|b| b.1));
            }
            resolved_last = m.spread <= resolved;
            let next = 4.0 * m.spread.max(m.floor);
            if next >= 0.5 * rho {
                break;
            }
            center = m.centroid;
            rho = next;
        }
        Ok(if resolved_last { best.map(|b| b.1) } else { None })
    }

    fn resolve(&mut self, cell: Cell, count: i64) -> Result<()> {
        if count <= 0 {
            return Ok(());
        }
        if count >= 2 {
            if let Some(z) = self.cluster(&cell, count as usize)? {
                self.found.push(Zero { lambda: z, multiplicity: count as usize });
                return Ok(());
            }
        }
        let small = cell.diameter() < self.tol;
        if count == 1 || small {
            let k = count as usize;
            if let Some(z) = self.polish(&cell, k)? {
                self.found.push(Zero { lambda: z, multiplicity: k });
                return Ok(());
            }
            if small {
                self.found.push(Zero { lambda: cell.center(), multiplicity: k });
                return Ok(());
            }
        }
        let mut last_err = None;
        for (i, off) in SPLIT_OFFSETS.iter().enumerate() {
            let off_y = SPLIT_OFFSETS[(i * 3) % SPLIT_OFFSETS.len()];
            let subs = cell.split(0.5 + off, 0.5 - off_y);
            let mut counts = [0i64; 4];
            let mut ok = true;
            for (j, sub) in subs.iter().enumerate() {
                match self.count(sub) {
                    Ok(n) => counts[j] = n,
                    Err(e @ Error::ZeroOnBoundary { .. }) => {
                        last_err = Some(e);
                        ok = false;
                        break;
                    }
                    Err(e) => return Err(e),
                }
            }
            if !ok {
                continue;
            }
            let total: i64 = counts.iter().sum();
            if total != count {
                last_err = Some(Error::Consistency(format!(
                    "sub-cell counts {counts:?} do not add up to {count}"
                )));
                continue;
            }
            for (sub, n) in subs.iter().zip(counts) {
                self.resolve(*sub, n)?;
            }
            return Ok(());
        }
        Err(last_err.unwrap_or_else(|| Error::Consistency("quadrisection failed".into())))
    }
}

/// Zeros of `f` inside `region`, with multiplicities, sorted by real then
/// imaginary part.
///
/// Cells are quadrisected until each holds at most one zero or is smaller
/// than `tol`; single zeros are polished by Newton's method (with `df` if
/// given, else a forward difference), clusters by modified Newton with the
/// cell count as multiplicity. The multiplicities add up to the winding
/// count of the region.
pub fn locate_zeros<F, D>(f: F, df: Option<&mut D>, region: &Contour, tol: f64) -> Result<Vec<Zero>>
where
    F: FnMut(Complex64) -> Result<Complex64>,
    D: FnMut(Complex64) -> Result<Complex64>,
{
    if !(tol > 0.0) {
        return Err(Error::domain("tol must be positive"));
    }
    let mut loc = Locator { ev: Evaluator::new(f), df, tol, scale: 0.0, found: Vec::new() };
    let report = winding_jittered(&mut loc.ev, region)?;
    if report.count == 0 {
        return Ok(Vec::new());
    }
    let used = report.contour;
    let root = match used.shape {
        Shape::Rectangle { lo, hi } => Cell { lo: c(lo[0], lo[1]), hi: c(hi[0], hi[1]) },
        Shape::Circle { center, radius } => {
            // circumscribed square, slightly enlarged so its edges avoid the circle's zeros
            let r = radius * 1.0123;
            Cell { lo: c(center[0] - r, center[1] - r), hi: c(center[0] + r, center[1] + r) }
        }
    };
    let root_count = if matches!(used.shape, Shape::Rectangle { .. }) {
        report.count
    } else {
        winding_jittered(&mut loc.ev, &root.contour(2 * EDGE_SAMPLES))?.count
    };
    loc.scale = loc.ev.cache.values().map(|v| v.norm()).fold(0.0, f64::max);
    loc.resolve(root, root_count)?;

    let mut zeros: Vec<Zero> = merge_close(loc.found, tol)
        .into_iter()
        .filter(|z| used.contains(z.lambda))
        .collect();
    sort_zeros(&mut zeros);
    let total: i64 = zeros.iter().map(|z| z.multiplicity as i64).sum();
    if total != report.count {
        return Err(Error::Consistency(format!(
            "located multiplicities sum to {total}, winding count is {}",
            report.count
        )));
    }
    Ok(zeros)
}

/// Merge zeros closer than `tol` into clusters carrying the summed
/// multiplicity at the weighted mean location.
fn merge_close(zeros: Vec<Zero>, tol: f64) -> Vec<Zero> {
    let mut out: Vec<Zero> = Vec::new();
    for z in zeros {
        match out.iter_mut().find(|o| (o.lambda - z.lambda).norm() < tol) {
            Some(o) => {
                let (ka, kb) = (o.multiplicity as f64, z.multiplicity as f64);
                o.lambda = (o.lambda * ka + z.lambda * kb) / (ka + kb);
                o.multiplicity += z.multiplicity;
            }
            None => out.push(z),
        }
    }
    out
}

pub fn sort_zeros(zeros: &mut [Zero]) {
    zeros.sort_by(|a, b| {
        a.lambda
            .re
            .total_cmp(&b.lambda.re)
            .then(a.lambda.im.total_cmp(&b.lambda.im))
    });
}

/// `locate_zeros` without a derivative.
pub fn locate_zeros_plain<F>(f: F, region: &Contour, tol: f64) -> Result<Vec<Zero>>
where
    F: FnMut(Complex64) -> Result<Complex64>,
{
    locate_zeros::<F, fn(Complex64) -> Result<Complex64>>(f, None, region, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Poly;

    fn ok(f: impl Fn(Complex64) -> Complex64) -> impl FnMut(Complex64) -> Result<Complex64> {
        move |z| Ok(f(z))
    }

    #[test]
    fn simple_and_double_windings() {
        let z0 = c(0.3, -0.2);
        let r = winding_number(ok(move |z| z - z0), &Contour::circle(z0, 1.0).unwrap()).unwrap();
        assert_eq!(r.count, 1);
        let r = winding_number(ok(|z| z * z), &Contour::circle(c(0.0, 0.0), 1.0).unwrap()).unwrap();
        assert_eq!(r.count, 2);
        let r = winding_number(ok(|z| z * z - 4.0), &Contour::circle(c(0.0, 0.0), 1.0).unwrap()).unwrap();
        assert_eq!(r.count, 0);
    }

    #[test]
    fn boundary_zero_is_jittered_away() {
        // zero at distance 1 from the centre of a unit circle
        let r = winding_number(ok(|z| z - 1.0), &Contour::circle(c(0.0, 0.0), 1.0).unwrap()).unwrap();
        assert_eq!(r.count, 1);
        assert!(matches!(r.contour.shape, Shape::Circle { radius, .. } if radius > 1.0));
    }

    #[test]
    fn locate_two_simple_zeros() {
        let region = Contour::rectangle(c(-3.0, -1.0), c(3.0, 1.0)).unwrap();
        let zs = locate_zeros_plain(ok(|z| (z - 1.0) * (z + 2.0)), &region, 1e-8).unwrap();
        assert_eq!(zs.len(), 2);
        assert!((zs[0].lambda - c(-2.0, 0.0)).norm() < 1e-12);
        assert!((zs[1].lambda - c(1.0, 0.0)).norm() < 1e-12);
        assert!(zs.iter().all(|z| z.multiplicity == 1));
    }

    #[test]
    fn locate_double_zero_cluster() {
        let a = c(0.0, 0.5);
        let p = Poly(vec![a * a, -a * 2.0, c(1.0, 0.0)]);
        let region = Contour::circle(a, 0.1).unwrap();
        let dp = p.derivative();
        let mut d = |z| Ok(dp.eval(z));
        let zs = locate_zeros(|z| Ok(p.eval(z)), Some(&mut d), &region, 1e-6).unwrap();
        assert_eq!(zs.len(), 1);
        assert_eq!(zs[0].multiplicity, 2);
        assert!((zs[0].lambda - a).norm() < 1e-8);
    }

    #[test]
    fn additivity_over_quadrisection() {
        let f = |z: Complex64| (z - c(0.2, 0.3)) * (z + c(0.6, 0.1)) * (z - c(-0.3, -0.7));
        let cell = Cell { lo: c(-1.0, -1.0), hi: c(1.0, 1.0) };
        let whole = winding_number(ok(f), &cell.contour(8)).unwrap().count;
        let parts: i64 = cell
            .split(0.5, 0.5)
            .iter()
            .map(|s| winding_number(ok(f), &s.contour(8)).unwrap().count)
            .sum();
        assert_eq!(whole, 3);
        assert_eq!(parts, whole);
    }

    #[test]
    fn rectangle_rejects_degenerate_corners() {
        assert!(Contour::rectangle(c(0.0, 0.0), c(0.0, 1.0)).is_err());
        assert!(Contour::circle(c(0.0, 0.0), 0.0).is_err());
    }
}
