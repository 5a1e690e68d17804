//! Plane curves `f(x, y) = 0` as branched covers of the x-plane.

mod discriminant;
mod monodromy;

pub use discriminant::{critical_points, discriminant};
pub use monodromy::{genus_from, BranchPoint, BranchPointSet, MonodromyData, MonodromyPermutation};

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::cjson;
use crate::error::{Error, Result};
use crate::poly::{horner, BivariatePolynomial};
use crate::roots::{self, min_separation};

/// Fiber roots closer than this (relative) count as colliding.
const SEPARATION_REL: f64 = 1e-10;
/// Relative residual accepted for a point to lie on the curve.
const RESIDUAL_TOL: f64 = 1e-8;
/// Smallest continuation step, relative to `1 + |x|`.
const MIN_STEP: f64 = 1e-13;
/// Default discriminant-root merge tolerance.
pub const CLUSTER_TOL: f64 = 1e-9;

/// One sample of a continued sheet: parameter along the segment, x, y.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TracePoint {
    pub s: f64,
    #[serde(with = "cjson")]
    pub x: C64,
    #[serde(with = "cjson")]
    pub y: C64,
}

#[derive(Clone, Debug)]
pub struct PlaneCurve {
    f: BivariatePolynomial,
    fx: BivariatePolynomial,
    fy: BivariatePolynomial,
    sheet_count: usize,
    base: C64,
    labels: Vec<C64>,
    critical: Vec<(C64, usize)>,
    scale: f64,
    max_step: f64,
}

impl PlaneCurve {
    /// Curve with an automatically chosen base point and the default
    /// labeling (fiber sorted by real part, then imaginary part).
    pub fn new(f: BivariatePolynomial) -> Result<Self> {
        let mut c = Self::bare(f)?;
        c.base = c.choose_base()?;
        c.labels = sort_labels(c.fiber(c.base)?, c.scale);
        Ok(c)
    }

    /// Curve with an explicit base point and optional explicit labels.
    pub fn with_base(f: BivariatePolynomial, base: C64, labels: Option<Vec<C64>>) -> Result<Self> {
        let mut c = Self::bare(f)?;
        c.set_base(base, labels)?;
        Ok(c)
    }

    fn bare(f: BivariatePolynomial) -> Result<Self> {
        let n = f.degree_y() as usize;
        if n == 0 {
            return Err(Error::NotACover(f.vars().1.to_owned()));
        }
        let critical = discriminant::critical_points(&f, CLUSTER_TOL)?;
        let scale = critical.iter().map(|(p, _)| p.norm()).fold(1.0, f64::max);
        Ok(Self {
            fx: f.derivative_x(),
            fy: f.derivative_y(),
            sheet_count: n,
            f,
            base: C64::new(0.0, 0.0),
            labels: Vec::new(),
            critical,
            scale,
            max_step: 0.25 * scale,
        })
    }

    fn set_base(&mut self, base: C64, labels: Option<Vec<C64>>) -> Result<()> {
        let d = self.critical_distance(base);
        if d <= self.clearance() {
            return Err(Error::NearBranchPoint { x: base, separation: d });
        }
        let fiber = self.fiber(base)?;
        self.base = base;
        self.labels = match labels {
            None => sort_labels(fiber, self.scale),
            Some(given) => {
                if given.len() != self.sheet_count {
                    return Err(Error::Labeling { expected: self.sheet_count, got: given.len() });
                }
                let sep = min_separation(&fiber);
                let mut used = vec![false; fiber.len()];
                let mut out = Vec::with_capacity(given.len());
                for &y in &given {
                    let (i, d1, _) = nearest(&fiber, y);
                    if d1 > 0.25 * sep || used[i] {
                        return Err(Error::NotInFiber { x: base, y, residual: self.residual(base, y) });
                    }
                    used[i] = true;
                    out.push(fiber[i]);
                }
                out
            }
        };
        Ok(())
    }

    /// Same curve with a different continuation step bound.
    pub fn with_max_step(mut self, h: f64) -> Self {
        self.max_step = h;
        self
    }

    pub fn polynomial(&self) -> &BivariatePolynomial {
        &self.f
    }

    pub fn sheet_count(&self) -> usize {
        self.sheet_count
    }

    pub fn base_point(&self) -> C64 {
        self.base
    }

    pub fn labels(&self) -> &[C64] {
        &self.labels
    }

    pub fn max_step(&self) -> f64 {
        self.max_step
    }

    /// Distinct discriminant zeros with multiplicity (branch points and
    /// possibly points with trivial local monodromy).
    pub fn critical_points(&self) -> &[(C64, usize)] {
        &self.critical
    }

    /// Typical size of the critical configuration (at least 1).
    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Minimum allowed distance between a path and a critical point.
    pub fn clearance(&self) -> f64 {
        1e-7 * self.scale
    }

    pub fn critical_distance(&self, x: C64) -> f64 {
        self.critical.iter().map(|(p, _)| (p - x).norm()).fold(f64::INFINITY, f64::min)
    }

    /// Distance from the segment `[a, b]` to the nearest critical point.
    pub fn segment_clearance(&self, a: C64, b: C64) -> f64 {
        self.critical.iter().map(|(p, _)| point_segment_distance(*p, a, b)).fold(f64::INFINITY, f64::min)
    }

    pub fn eval(&self, x: C64, y: C64) -> C64 {
        self.f.eval(x, y)
    }

    /// `|f(x, y)|` relative to the sum of its monomial magnitudes.
    pub fn residual(&self, x: C64, y: C64) -> f64 {
        let c = self.f.coeffs_in_y(x);
        let (ax, ay) = (x.norm(), y.norm());
        let size: f64 =
            self.f.terms().iter().map(|(&(i, j), v)| v.norm() * ax.powi(i as i32) * ay.powi(j as i32)).sum();
        horner(&c, y).norm() / size.max(f64::MIN_POSITIVE)
    }

    /// `dy/dx = -f_x / f_y` along the curve.
    pub fn slope(&self, x: C64, y: C64) -> C64 {
        -self.fx.eval(x, y) / self.fy.eval(x, y)
    }

    /// All roots of `f(x, .)`.
    pub fn fiber(&self, x: C64) -> Result<Vec<C64>> {
        self.fiber_guess(x, None)
    }

    fn fiber_guess(&self, x: C64, guess: Option<&[C64]>) -> Result<Vec<C64>> {
        let c = self.f.coeffs_in_y(x);
        // zero of the leading coefficient up to its own rounding
        let n = self.sheet_count as u32;
        let size: f64 = self
            .f
            .terms()
            .iter()
            .filter(|(&(_, j), _)| j == n)
            .map(|(&(i, _), v)| v.norm() * x.norm().powi(i as i32))
            .sum();
        if c[self.sheet_count].norm() <= 1e-13 * size {
            return Err(Error::DegenerateLeading(x));
        }
        let r = roots::roots(&c, guess).map_err(|_| Error::ContinuationFailed(x))?;
        let sep = min_separation(&r);
        let big = r.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if sep <= SEPARATION_REL * (1.0 + big) {
            return Err(Error::NearBranchPoint { x, separation: sep });
        }
        Ok(r)
    }

    fn step_cap(&self, x: C64) -> Result<f64> {
        let d = self.critical_distance(x);
        if d <= self.clearance() {
            return Err(Error::NearBranchPoint { x, separation: d });
        }
        Ok(self.max_step.min(0.5 * d))
    }

    /// Continue the root `y_start` of `f(start, .)` along the segment to `end`.
    pub fn continue_sheet(&self, start: C64, end: C64, y_start: C64) -> Result<C64> {
        Ok(self.trace(start, end, y_start)?.last().expect("trace is never empty").y)
    }

    /// Like [`continue_sheet`](Self::continue_sheet), returning every accepted step.
    pub fn trace(&self, start: C64, end: C64, y_start: C64) -> Result<Vec<TracePoint>> {
        let mut current = self.fiber(start)?;
        let (i0, _, _) = nearest(&current, y_start);
        let res = self.residual(start, y_start);
        let sep0 = min_separation(&current);
        if res > RESIDUAL_TOL && (current[i0] - y_start).norm() > 1e-3 * sep0 {
            return Err(Error::NotInFiber { x: start, y: y_start, residual: res });
        }
        let mut y = current[i0];
        let mut out = vec![TracePoint { s: 0.0, x: start, y }];
        let dir = end - start;
        let len = dir.norm();
        if len == 0.0 {
            out[0].y = y_start;
            return Ok(out);
        }
        let mut s = 0.0;
        let mut x = start;
        let mut h = self.step_cap(start)? / len;
        while s < 1.0 {
            let remaining = 1.0 - s;
            h = h.min(self.step_cap(x)? / len).min(remaining);
            if h < remaining && h * len < MIN_STEP * (1.0 + x.norm()) {
                return Err(Error::ContinuationFailed(x));
            }
            let s1 = if s + h >= 1.0 - 1e-15 { 1.0 } else { s + h };
            let x1 = if s1 == 1.0 { end } else { start + dir * s1 };
            let dx = x1 - x;
            let predicted: Vec<C64> = current.iter().map(|&r| predict(self, x, r, dx)).collect();
            match self.fiber_guess(x1, Some(&predicted)) {
                Ok(next) => {
                    let target = predict(self, x, y, dx);
                    let (i, d1, d2) = nearest(&next, target);
                    let sep = min_separation(&next);
                    if d2 >= 2.0 * d1 && d1 <= 0.25 * sep {
                        y = next[i];
                        current = next;
                        x = x1;
                        s = s1;
                        out.push(TracePoint { s, x, y });
                        h *= 1.5;
                    } else {
                        h *= 0.5;
                    }
                }
                Err(Error::NearBranchPoint { .. }) | Err(Error::ContinuationFailed(_)) => h *= 0.5,
                Err(e) => return Err(e),
            }
        }
        Ok(out)
    }

    /// Continue along a polyline, returning the final value.
    pub fn continue_along(&self, path: &[C64], y_start: C64) -> Result<C64> {
        let mut y = y_start;
        for w in path.windows(2) {
            y = self.continue_sheet(w[0], w[1], y)?;
        }
        Ok(y)
    }

    /// Path from the base point to `x` used to define sheet labels at `x`:
    /// the straight segment, or, when it runs into a critical point, a
    /// slightly rotated segment on the side where `x` lies (anticlockwise
    /// if exactly on the ray) followed by a short chord.
    pub fn label_path(&self, x: C64) -> Result<Vec<C64>> {
        let b = self.base;
        let margin = 1e-6 * self.scale;
        if self.segment_clearance(b, x) > margin {
            return Ok(vec![b, x]);
        }
        if self.critical_distance(x) <= self.clearance() {
            return Err(Error::NearBranchPoint { x, separation: self.critical_distance(x) });
        }
        let blocker = self
            .critical
            .iter()
            .map(|(p, _)| *p)
            .min_by(|p, q| point_segment_distance(*p, b, x).total_cmp(&point_segment_distance(*q, b, x)))
            .expect("blocked path implies a critical point");
        let det = ((blocker - b).conj() * (x - b)).im;
        let side = if det < -1e-14 * (blocker - b).norm() * (x - b).norm() { -1.0 } else { 1.0 };
        for k in 0..12 {
            let delta = side * 0.05 / 2f64.powi(k);
            let xr = b + (x - b) * C64::from_polar(1.0, delta);
            if self.segment_clearance(b, xr) > margin && self.segment_clearance(xr, x) > margin {
                return Ok(vec![b, xr, x]);
            }
        }
        Err(Error::BaseRayBlocked(x))
    }

    /// Value of sheet `k` over `x`.
    pub fn sheet_value(&self, x: C64, k: usize) -> Result<C64> {
        let y0 = *self.labels.get(k).ok_or(Error::SheetIndex(k))?;
        self.continue_along(&self.label_path(x)?, y0)
    }

    /// Values of all sheets over `x`, in label order.
    pub fn labeled_fiber(&self, x: C64) -> Result<Vec<C64>> {
        let path = self.label_path(x)?;
        self.labels.iter().map(|&y0| self.continue_along(&path, y0)).collect()
    }

    /// Sheet index of the point `(x, y)`.
    pub fn sheet_index(&self, x: C64, y: C64) -> Result<usize> {
        let mut path = self.label_path(x)?;
        path.reverse();
        let yb = self.continue_along(&path, y)?;
        self.label_index(yb).ok_or(Error::SheetAmbiguity(x))
    }

    /// Index of the label nearest to a fiber value over the base point.
    pub fn label_index(&self, y: C64) -> Option<usize> {
        let (i, d1, _) = nearest(&self.labels, y);
        (d1 <= 0.25 * min_separation(&self.labels)).then_some(i)
    }

    fn choose_base(&self) -> Result<C64> {
        let pts: Vec<C64> = self.critical.iter().map(|(p, _)| *p).collect();
        if pts.is_empty() {
            for cand in [C64::new(0.0, 0.0), C64::new(0.5137, 0.2291)] {
                if self.fiber(cand).is_ok() {
                    return Ok(cand);
                }
            }
        }
        let m = pts.iter().sum::<C64>() / pts.len().max(1) as f64;
        let l = pts.iter().map(|p| (p - m).norm()).fold(1.0, f64::max);
        let mut best: Option<(f64, C64)> = None;
        for i in 0..9 {
            for j in 0..9 {
                let cand = m + l * C64::new(-1.0 + 0.25 * i as f64 + 0.0137, -1.0 + 0.25 * j as f64 + 0.0291);
                let score = base_score(cand, &pts);
                if best.is_some_and(|(s, _)| s >= score) || self.fiber(cand).is_err() {
                    continue;
                }
                best = Some((score, cand));
            }
        }
        best.map(|(_, c)| c).ok_or_else(|| Error::Input("no admissible base point found".into()))
    }
}

/// Smallest distance from a candidate base point to a critical point or from
/// any critical point to the straight tail leading to another one.
fn base_score(b: C64, pts: &[C64]) -> f64 {
    let mut s = pts.iter().map(|p| (p - b).norm()).fold(f64::INFINITY, f64::min);
    for (i, p) in pts.iter().enumerate() {
        for (j, q) in pts.iter().enumerate() {
            if i != j {
                s = s.min(point_segment_distance(*q, b, *p));
            }
        }
    }
    s
}

fn predict(curve: &PlaneCurve, x: C64, y: C64, dx: C64) -> C64 {
    let p = y + curve.slope(x, y) * dx;
    if p.is_finite() {
        p
    } else {
        y
    }
}

/// Index of the nearest point, its distance, and the second-nearest distance.
pub fn nearest(pts: &[C64], y: C64) -> (usize, f64, f64) {
    let mut best = (0, f64::INFINITY, f64::INFINITY);
    for (i, p) in pts.iter().enumerate() {
        let d = (p - y).norm();
        if d < best.1 {
            best = (i, d, best.1);
        } else if d < best.2 {
            best.2 = d;
        }
    }
    best
}

pub fn point_segment_distance(p: C64, a: C64, b: C64) -> f64 {
    let d = b - a;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = (((p - a) * d.conj()).re / len2).clamp(0.0, 1.0);
    (p - (a + d * t)).norm()
}

fn sort_labels(mut fiber: Vec<C64>, scale: f64) -> Vec<C64> {
    let tol = 1e-9 * scale;
    fiber.sort_by(|a, b| a.re.total_cmp(&b.re));
    let mut out = Vec::with_capacity(fiber.len());
    let mut i = 0;
    while i < fiber.len() {
        let mut j = i + 1;
        while j < fiber.len() && fiber[j].re - fiber[j - 1].re <= tol {
            j += 1;
        }
        let mut group = fiber[i..j].to_vec();
        group.sort_by(|a, b| a.im.total_cmp(&b.im));
        out.extend(group);
        i = j;
    }
    out
}
