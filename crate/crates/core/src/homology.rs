//! Lifted cycles, intersection numbers and integer homology transforms.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::algcurve::{PlaneCurve, TracePoint};
use crate::error::{Error, Result};
use crate::linalg::{is_antisymplectic, is_symplectic, j_matrix, SymplecticMatrix};
use crate::roots::min_separation;

/// Perturbation size for intersection counting, relative to the extent of
/// the two cycles.
const SHIFT_REL: f64 = 1e-9;
/// Crossing parameters closer than this to an edge end count as degenerate.
const END_MARGIN: f64 = 1e-13;

/// A cycle vertex: base-plane point and sheet index.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CyclePoint {
    pub re: f64,
    pub im: f64,
    pub sheet: usize,
}

impl CyclePoint {
    pub fn new(x: C64, sheet: usize) -> Self {
        Self { re: x.re, im: x.im, sheet }
    }

    pub fn x(&self) -> C64 {
        C64::new(self.re, self.im)
    }
}

/// Closed piecewise-linear path with a sheet label at each vertex; the edge
/// from the last vertex back to the first is implicit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurfaceCycle {
    #[serde(default)]
    pub name: String,
    pub points: Vec<CyclePoint>,
}

impl SurfaceCycle {
    pub fn new(name: impl Into<String>, vertices: impl IntoIterator<Item = (C64, usize)>) -> Self {
        Self { name: name.into(), points: vertices.into_iter().map(|(x, s)| CyclePoint::new(x, s)).collect() }
    }

    pub fn xs(&self) -> Vec<C64> {
        self.points.iter().map(CyclePoint::x).collect()
    }

    /// Same cycle traversed backwards from the same first vertex.
    pub fn reversed(&self) -> Self {
        let mut points = self.points.clone();
        if points.len() > 1 {
            points[1..].reverse();
        }
        Self { name: format!("-{}", self.name), points }
    }

    /// `self` followed by `other`; both must start at the same vertex and sheet.
    pub fn concat(&self, other: &SurfaceCycle) -> Result<Self> {
        match (self.points.first(), other.points.first()) {
            (Some(p), Some(q)) if p == q => {}
            _ => {
                return Err(Error::InvalidCycle {
                    name: format!("{}+{}", self.name, other.name),
                    reason: "cycles must share their first vertex".into(),
                })
            }
        }
        let mut points = self.points.clone();
        points.push(self.points[0]);
        points.extend_from_slice(&other.points[1..]);
        Ok(Self { name: format!("{}+{}", self.name, other.name), points })
    }
}

/// Ordered `a`- and `b`-cycles.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HomologyBasis {
    pub a_cycles: Vec<SurfaceCycle>,
    pub b_cycles: Vec<SurfaceCycle>,
}

impl HomologyBasis {
    pub fn genus(&self) -> usize {
        self.a_cycles.len()
    }

    /// `a_1..a_g, b_1..b_g`.
    pub fn cycles(&self) -> impl Iterator<Item = &SurfaceCycle> {
        self.a_cycles.iter().chain(self.b_cycles.iter())
    }

    pub fn from_cycles(cycles: Vec<SurfaceCycle>) -> Result<Self> {
        if !cycles.len().is_multiple_of(2) {
            return Err(Error::Dimension(format!("a basis needs an even number of cycles, got {}", cycles.len())));
        }
        let mut a = cycles;
        let b = a.split_off(a.len() / 2);
        Ok(Self { a_cycles: a, b_cycles: b })
    }
}

/// A closed path on the surface: vertices with y-values and the continuation
/// trace of every edge `i -> i+1 (mod n)`.
#[derive(Clone, Debug)]
pub struct LiftedPath {
    pub name: String,
    pub xs: Vec<C64>,
    pub ys: Vec<C64>,
    traces: Vec<Vec<TracePoint>>,
}

impl LiftedPath {
    pub fn edge_count(&self) -> usize {
        self.traces.len()
    }

    fn next(&self, i: usize) -> usize {
        (i + 1) % self.xs.len()
    }

    /// y-value on edge `edge` at parameter `t`.
    pub fn y_on_edge(&self, curve: &PlaneCurve, edge: usize, t: f64) -> Result<C64> {
        let tr = &self.traces[edge];
        let idx = tr.partition_point(|p| p.s <= t).saturating_sub(1);
        let a = self.xs[edge];
        let p = a + (self.xs[self.next(edge)] - a) * t;
        curve.continue_sheet(tr[idx].x, p, tr[idx].y)
    }

    fn extent(&self) -> (C64, C64) {
        let lo = self
            .xs
            .iter()
            .fold(C64::new(f64::INFINITY, f64::INFINITY), |m, x| C64::new(m.re.min(x.re), m.im.min(x.im)));
        let hi = self
            .xs
            .iter()
            .fold(C64::new(f64::NEG_INFINITY, f64::NEG_INFINITY), |m, x| C64::new(m.re.max(x.re), m.im.max(x.im)));
        (lo, hi)
    }

    /// Sheet label at every vertex.
    pub fn to_cycle(&self, curve: &PlaneCurve) -> Result<SurfaceCycle> {
        let mut pts = Vec::with_capacity(self.xs.len());
        for (&x, &y) in self.xs.iter().zip(&self.ys) {
            pts.push((x, curve.sheet_index(x, y)?));
        }
        Ok(SurfaceCycle::new(self.name.clone(), pts))
    }
}

fn invalid(name: &str, reason: String) -> Error {
    Error::InvalidCycle { name: name.to_owned(), reason }
}

/// Continue along the closed polyline `xs` from `(xs[0], y0)`.
pub fn lift_from(curve: &PlaneCurve, name: &str, xs: Vec<C64>, y0: C64) -> Result<LiftedPath> {
    let n = xs.len();
    if n == 0 {
        return Err(invalid(name, "cycle has no vertices".into()));
    }
    let mut ys = vec![y0];
    let mut traces = Vec::new();
    if n == 1 {
        return Ok(LiftedPath { name: name.to_owned(), xs, ys, traces });
    }
    let mut y = y0;
    for i in 0..n {
        let (a, b) = (xs[i], xs[(i + 1) % n]);
        if curve.segment_clearance(a, b) <= curve.clearance() {
            return Err(invalid(name, format!("segment {i} passes through a branch point")));
        }
        let tr = curve.trace(a, b, y).map_err(|e| invalid(name, format!("segment {i}: {e}")))?;
        y = tr.last().expect("nonempty trace").y;
        if i + 1 < n {
            ys.push(y);
        }
        traces.push(tr);
    }
    let sep = min_separation(&curve.fiber(xs[0])?);
    if (y - y0).norm() > 0.25 * sep {
        return Err(invalid(name, "lift does not close on its starting sheet".into()));
    }
    Ok(LiftedPath { name: name.to_owned(), xs, ys, traces })
}

/// Lift a cycle starting from the sheet stored at its first vertex.
pub fn lift(curve: &PlaneCurve, cycle: &SurfaceCycle) -> Result<LiftedPath> {
    let first = cycle.points.first().ok_or_else(|| invalid(&cycle.name, "cycle has no vertices".into()))?;
    let y0 = curve.sheet_value(first.x(), first.sheet)?;
    lift_from(curve, &cycle.name, cycle.xs(), y0)
}

/// Result of lifting an open or closed polyline from a start sheet.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LiftReport {
    /// Sheet at each vertex reached.
    pub sheets: Vec<usize>,
    /// Sheet reached after the closing edge back to the first vertex.
    pub returns_to: Option<usize>,
    pub closes: bool,
    pub failure: Option<SegmentFailure>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SegmentFailure {
    pub segment: usize,
    pub kind: String,
    pub message: String,
}

fn segment_failure(curve: &PlaneCurve, segment: usize, a: C64, b: C64, e: &Error) -> SegmentFailure {
    let kind = match e {
        Error::NearBranchPoint { .. } => "branch_point",
        Error::ContinuationFailed(_) => "continuation",
        Error::SheetAmbiguity(_) => "sheet_ambiguity",
        Error::BaseRayBlocked(_) => "label_path",
        _ if curve.segment_clearance(a, b) <= curve.clearance() => "branch_point",
        _ => "lift",
    };
    SegmentFailure { segment, kind: kind.into(), message: e.to_string() }
}

/// Lift a polyline vertex by vertex, including the closing edge.
pub fn lift_polyline(curve: &PlaneCurve, xs: &[C64], start_sheet: usize) -> Result<LiftReport> {
    if xs.is_empty() {
        return Err(Error::Input("polyline has no vertices".into()));
    }
    if start_sheet >= curve.sheet_count() {
        return Err(Error::SheetIndex(start_sheet));
    }
    let mut report = LiftReport { sheets: vec![start_sheet], returns_to: None, closes: false, failure: None };
    let mut y = match curve.sheet_value(xs[0], start_sheet) {
        Ok(y) => y,
        Err(e) => {
            report.failure = Some(SegmentFailure { segment: 0, kind: "vertex".into(), message: e.to_string() });
            return Ok(report);
        }
    };
    let n = xs.len();
    if n == 1 {
        report.returns_to = Some(start_sheet);
        report.closes = true;
        return Ok(report);
    }
    for i in 0..n {
        let (a, b) = (xs[i], xs[(i + 1) % n]);
        let step = if curve.segment_clearance(a, b) <= curve.clearance() {
            Err(Error::NearBranchPoint { x: a, separation: curve.segment_clearance(a, b) })
        } else {
            curve.continue_sheet(a, b, y).and_then(|yb| Ok((yb, curve.sheet_index(b, yb)?)))
        };
        match step {
            Ok((yb, s)) => {
                y = yb;
                if i + 1 < n {
                    report.sheets.push(s);
                } else {
                    report.returns_to = Some(s);
                    report.closes = s == start_sheet;
                }
            }
            Err(e) => {
                report.failure = Some(segment_failure(curve, i, a, b, &e));
                return Ok(report);
            }
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EdgeCheck {
    pub segment: usize,
    pub clearance: f64,
    pub expected_sheet: usize,
    pub found_sheet: Option<usize>,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CycleValidation {
    pub name: String,
    pub valid: bool,
    /// Continuing from the first vertex all the way round returns to its sheet.
    pub closed: bool,
    pub end_sheet: Option<usize>,
    /// Vertices whose stored sheet disagrees with continuation along the
    /// preceding edge from the stored sheet of the previous vertex.
    pub inconsistent_vertices: Vec<usize>,
    pub min_clearance: f64,
    pub edges: Vec<EdgeCheck>,
    pub failure: Option<SegmentFailure>,
}

/// Check clearance, per-edge lift consistency and closedness of a cycle.
pub fn validate_cycle(curve: &PlaneCurve, cycle: &SurfaceCycle) -> CycleValidation {
    let n = cycle.points.len();
    let mut v = CycleValidation {
        name: cycle.name.clone(),
        valid: false,
        closed: false,
        end_sheet: None,
        inconsistent_vertices: Vec::new(),
        min_clearance: f64::INFINITY,
        edges: Vec::new(),
        failure: None,
    };
    if n == 0 {
        v.failure = Some(SegmentFailure { segment: 0, kind: "empty".into(), message: "cycle has no vertices".into() });
        return v;
    }
    if let Some(p) = cycle.points.iter().find(|p| p.sheet >= curve.sheet_count()) {
        v.failure = Some(SegmentFailure {
            segment: 0,
            kind: "sheet_index".into(),
            message: Error::SheetIndex(p.sheet).to_string(),
        });
        return v;
    }
    if n == 1 {
        let ok = curve.sheet_value(cycle.points[0].x(), cycle.points[0].sheet).is_ok();
        v.valid = ok;
        v.closed = ok;
        v.end_sheet = Some(cycle.points[0].sheet);
        v.min_clearance = curve.critical_distance(cycle.points[0].x());
        return v;
    }
    // per-edge consistency from stored sheets
    for i in 0..n {
        let p = cycle.points[i];
        let q = cycle.points[(i + 1) % n];
        let clearance = curve.segment_clearance(p.x(), q.x());
        v.min_clearance = v.min_clearance.min(clearance);
        let found = if clearance <= curve.clearance() {
            Err(Error::NearBranchPoint { x: p.x(), separation: clearance })
        } else {
            curve
                .sheet_value(p.x(), p.sheet)
                .and_then(|y| curve.continue_sheet(p.x(), q.x(), y))
                .and_then(|y| curve.sheet_index(q.x(), y))
        };
        let ok = matches!(found, Ok(s) if s == q.sheet);
        if let Err(e) = &found {
            if v.failure.is_none() {
                v.failure = Some(segment_failure(curve, i, p.x(), q.x(), e));
            }
        } else if !ok {
            v.inconsistent_vertices.push((i + 1) % n);
        }
        v.edges.push(EdgeCheck { segment: i, clearance, expected_sheet: q.sheet, found_sheet: found.ok(), ok });
    }
    v.inconsistent_vertices.sort_unstable();
    // closedness of the propagated lift
    if v.failure.is_none() {
        match lift_polyline(curve, &cycle.xs(), cycle.points[0].sheet) {
            Ok(r) => {
                v.end_sheet = r.returns_to;
                v.closed = r.closes;
                if let Some(f) = r.failure {
                    v.failure = Some(f);
                }
            }
            Err(e) => v.failure = Some(SegmentFailure { segment: 0, kind: "lift".into(), message: e.to_string() }),
        }
    }
    if v.failure.is_none() && !v.inconsistent_vertices.is_empty() {
        let vert = v.inconsistent_vertices[0];
        v.failure = Some(SegmentFailure {
            segment: (vert + n - 1) % n,
            kind: "lift_consistency".into(),
            message: format!("stored sheet at vertex {vert} disagrees with continuation"),
        });
    }
    if v.failure.is_none() && !v.closed {
        v.failure = Some(SegmentFailure {
            segment: n - 1,
            kind: "not_closed".into(),
            message: "lift does not return to the starting sheet".into(),
        });
    }
    v.valid = v.failure.is_none();
    v
}

/// Signed crossing count of `l1` with `l2` translated by `shift`; `None`
/// when a crossing is too close to a vertex or edges overlap.
fn count_crossings(curve: &PlaneCurve, l1: &LiftedPath, l2: &LiftedPath, shift: C64) -> Result<Option<i64>> {
    let mut total = 0;
    for i in 0..l1.edge_count() {
        let a = l1.xs[i];
        let d1 = l1.xs[l1.next(i)] - a;
        for j in 0..l2.edge_count() {
            let c = l2.xs[j] + shift;
            let d2 = l2.xs[l2.next(j)] - l2.xs[j];
            let den = (d1.conj() * d2).im;
            let e = c - a;
            if den.abs() <= 1e-14 * d1.norm() * d2.norm() {
                // parallel: degenerate only if collinear and overlapping
                let off = (e.conj() * d1).im.abs() / d1.norm().max(f64::MIN_POSITIVE);
                if off <= 1e-12 * (1.0 + a.norm()) && d1.norm() > 0.0 && d2.norm() > 0.0 {
                    let t0 = (e * d1.conj()).re / d1.norm_sqr();
                    let t1 = ((e + d2) * d1.conj()).re / d1.norm_sqr();
                    if t0.max(t1) > 0.0 && t0.min(t1) < 1.0 {
                        return Ok(None);
                    }
                }
                continue;
            }
            let t = (e.conj() * d2).im / den;
            let u = (e.conj() * d1).im / den;
            if !(0.0..1.0).contains(&t) || !(0.0..1.0).contains(&u) {
                continue;
            }
            if !(END_MARGIN..=1.0 - END_MARGIN).contains(&t) || !(END_MARGIN..=1.0 - END_MARGIN).contains(&u) {
                return Ok(None);
            }
            let p = a + d1 * t;
            let y1 = l1.y_on_edge(curve, i, t)?;
            let y2 = l2.y_on_edge(curve, j, u)?;
            let sep = min_separation(&curve.fiber(p)?);
            if (y1 - y2).norm() < 0.3 * sep {
                total += if den > 0.0 { 1 } else { -1 };
            }
        }
    }
    Ok(Some(total))
}

/// Intersection number of two lifted cycles.
///
/// The second cycle is translated by a tiny amount in generic directions so
/// that all crossings are transversal; two directions must agree.
pub fn intersection_lifted(curve: &PlaneCurve, l1: &LiftedPath, l2: &LiftedPath) -> Result<i64> {
    let (lo1, hi1) = l1.extent();
    let (lo2, hi2) = l2.extent();
    let size = (hi1 - lo1).norm().max((hi2 - lo2).norm()).max(1e-3);
    let eps = SHIFT_REL * size;
    let angles = [
        std::f64::consts::PI * (2f64.sqrt() - 1.0),
        std::f64::consts::PI * (5f64.sqrt() - 2.0) + 1.0,
        std::f64::consts::PI * (3f64.sqrt() - 1.0) + 2.0,
        std::f64::consts::E,
    ];
    let mut found = Vec::new();
    for ang in angles {
        if let Some(v) = count_crossings(curve, l1, l2, C64::from_polar(eps, ang))? {
            found.push(v);
            if found.len() == 2 {
                break;
            }
        }
    }
    match found.as_slice() {
        [a, b] if a == b => Ok(*a),
        [a, b] => Err(Error::UnresolvableDegeneracy(format!(
            "{} . {}: perturbation directions disagree ({a} vs {b})",
            l1.name, l2.name
        ))),
        _ => {
            Err(Error::UnresolvableDegeneracy(format!("{} . {}: no transversal perturbation found", l1.name, l2.name)))
        }
    }
}

pub fn intersection_number(curve: &PlaneCurve, c1: &SurfaceCycle, c2: &SurfaceCycle) -> Result<i64> {
    intersection_lifted(curve, &lift(curve, c1)?, &lift(curve, c2)?)
}

/// Lifted `a`- and `b`-cycles in basis order.
#[derive(Clone, Debug)]
pub struct LiftedBasis {
    pub paths: Vec<LiftedPath>,
}

impl LiftedBasis {
    pub fn new(paths: Vec<LiftedPath>) -> Result<Self> {
        if !paths.len().is_multiple_of(2) {
            return Err(Error::Dimension(format!("a basis needs an even number of cycles, got {}", paths.len())));
        }
        Ok(Self { paths })
    }

    pub fn lift(curve: &PlaneCurve, basis: &HomologyBasis) -> Result<Self> {
        if basis.a_cycles.len() != basis.b_cycles.len() {
            return Err(Error::Dimension("basis needs as many b-cycles as a-cycles".into()));
        }
        Self::new(basis.cycles().map(|c| lift(curve, c)).collect::<Result<_>>()?)
    }

    pub fn genus(&self) -> usize {
        self.paths.len() / 2
    }

    pub fn a(&self) -> &[LiftedPath] {
        &self.paths[..self.genus()]
    }

    pub fn b(&self) -> &[LiftedPath] {
        &self.paths[self.genus()..]
    }

    pub fn to_basis(&self, curve: &PlaneCurve) -> Result<HomologyBasis> {
        HomologyBasis::from_cycles(self.paths.iter().map(|p| p.to_cycle(curve)).collect::<Result<_>>()?)
    }
}

/// Matrix of `<c_i, c_k>` over a list of lifted cycles.
pub fn intersection_matrix_lifted(curve: &PlaneCurve, paths: &[LiftedPath]) -> Result<DMatrix<i64>> {
    let n = paths.len();
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        for k in i..n {
            let v = intersection_lifted(curve, &paths[i], &paths[k])?;
            m[(i, k)] = v;
            m[(k, i)] = -v;
        }
    }
    Ok(m)
}

pub fn intersection_matrix(curve: &PlaneCurve, basis: &HomologyBasis) -> Result<DMatrix<i64>> {
    intersection_matrix_lifted(curve, &LiftedBasis::lift(curve, basis)?.paths)
}

/// Pairings `<c, g_k>` against a list of cycles.
fn pairings(curve: &PlaneCurve, c: &LiftedPath, basis: &LiftedBasis) -> Result<Vec<i64>> {
    basis.paths.iter().map(|g| intersection_lifted(curve, c, g)).collect()
}

fn times_j_inverse(row: &[i64]) -> Vec<i64> {
    // J^{-1} = -J
    let g = row.len() / 2;
    let jinv = -j_matrix(g);
    (0..2 * g).map(|j| (0..2 * g).map(|k| row[k] * jinv[(k, j)]).sum()).collect()
}

pub fn ensure_canonical(curve: &PlaneCurve, basis: &LiftedBasis) -> Result<()> {
    if intersection_matrix_lifted(curve, &basis.paths)? != j_matrix(basis.genus()) {
        return Err(Error::NotCanonical);
    }
    Ok(())
}

/// Integer coordinates of `c` in a canonical basis, without re-checking it.
pub fn expand_lifted(curve: &PlaneCurve, c: &LiftedPath, basis: &LiftedBasis) -> Result<Vec<i64>> {
    Ok(times_j_inverse(&pairings(curve, c, basis)?))
}

pub fn expand_in_basis(curve: &PlaneCurve, c: &SurfaceCycle, basis: &HomologyBasis) -> Result<Vec<i64>> {
    let lb = LiftedBasis::lift(curve, basis)?;
    ensure_canonical(curve, &lb)?;
    expand_lifted(curve, &lift(curve, c)?, &lb)
}

/// Matrix whose row `i` expresses `images[i]` in the canonical `basis`.
pub fn action_matrix(curve: &PlaneCurve, images: &[LiftedPath], basis: &LiftedBasis) -> Result<DMatrix<i64>> {
    let n = basis.paths.len();
    if images.len() != n {
        return Err(Error::Dimension(format!("{} images for a basis of size {n}", images.len())));
    }
    let mut m = DMatrix::zeros(n, n);
    for (i, img) in images.iter().enumerate() {
        for (j, v) in expand_lifted(curve, img, basis)?.into_iter().enumerate() {
            m[(i, j)] = v;
        }
    }
    Ok(m)
}

/// `M` with `dst_i = sum_j M_ij src_j` in homology.
pub fn find_transform_lifted(curve: &PlaneCurve, src: &LiftedBasis, dst: &LiftedBasis) -> Result<SymplecticMatrix> {
    ensure_canonical(curve, src)?;
    ensure_canonical(curve, dst)?;
    SymplecticMatrix::new(action_matrix(curve, &dst.paths, src)?)
}

pub fn find_homology_transform(
    curve: &PlaneCurve,
    src: &HomologyBasis,
    dst: &HomologyBasis,
) -> Result<SymplecticMatrix> {
    find_transform_lifted(curve, &LiftedBasis::lift(curve, src)?, &LiftedBasis::lift(curve, dst)?)
}

/// A point map between curves, `(x, y) -> (x', y')`.
pub trait CurveMap: Sync {
    fn apply(&self, x: C64, y: C64) -> (C64, C64);
}

impl<F: Fn(C64, C64) -> (C64, C64) + Sync> CurveMap for F {
    fn apply(&self, x: C64, y: C64) -> (C64, C64) {
        self(x, y)
    }
}

/// Image of a lifted path under a map from `src` to `dst`.
///
/// Each source edge is sampled adaptively; consecutive image points are
/// joined by chords only when both lie well inside a disc free of critical
/// points of `dst` and continuation along the chord reproduces the mapped
/// y-value, so the image polyline is homotopic to the true image.
pub fn pushforward_lifted(
    src: &PlaneCurve,
    dst: &PlaneCurve,
    map: &dyn CurveMap,
    path: &LiftedPath,
) -> Result<LiftedPath> {
    let bound = 1e6 * dst.scale();
    let image = |x: C64, y: C64| -> Result<(C64, C64)> {
        let (u, v) = map.apply(x, y);
        if !(u.is_finite() && v.is_finite()) || u.norm() > bound {
            return Err(Error::ImageOutOfRange(u));
        }
        if dst.residual(u, v) > 1e-7 {
            return Err(Error::Input(format!("map sends ({x}, {y}) off the target curve")));
        }
        Ok((u, v))
    };
    let (x0, y0) = image(path.xs[0], path.ys[0])?;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut traces = Vec::new();
    if path.edge_count() == 0 {
        return Ok(LiftedPath { name: path.name.clone(), xs: vec![x0], ys: vec![y0], traces });
    }
    let (mut cx, mut cy) = (x0, y0);
    for i in 0..path.edge_count() {
        let a = path.xs[i];
        let b = path.xs[path.next(i)];
        let at = |s: f64| -> Result<(C64, C64)> {
            let y = if s == 0.0 { path.ys[i] } else { path.y_on_edge(src, i, s)? };
            image(a + (b - a) * s, y)
        };
        xs.push(cx);
        ys.push(cy);
        let mut s0 = 0.0;
        let mut h: f64 = 1.0;
        while s0 < 1.0 {
            let s1 = (s0 + h).min(1.0);
            let (x1, y1) = at(s1)?;
            let (xm, _) = at(0.5 * (s0 + s1))?;
            let d = dst.critical_distance(cx);
            let mut accepted = false;
            if (x1 - cx).norm() <= 0.25 * d && (xm - cx).norm() <= 0.25 * d {
                let tr = dst.trace(cx, x1, cy)?;
                let yend = tr.last().expect("nonempty trace").y;
                let sep = min_separation(&dst.fiber(x1)?);
                if (yend - y1).norm() <= 0.25 * sep {
                    traces.push(tr);
                    cx = x1;
                    cy = yend;
                    s0 = s1;
                    if s1 < 1.0 {
                        xs.push(cx);
                        ys.push(cy);
                    }
                    h *= 2.0;
                    accepted = true;
                }
            }
            if !accepted {
                h *= 0.5;
                if h < 1e-10 {
                    return Err(Error::SheetAmbiguity(cx));
                }
            }
        }
    }
    // the last chord ends on the image of the first vertex
    let sep = min_separation(&dst.fiber(x0)?);
    if (cx - x0).norm() > 1e-9 * (1.0 + x0.norm()) || (cy - y0).norm() > 0.25 * sep {
        return Err(Error::SheetAmbiguity(x0));
    }
    Ok(LiftedPath { name: path.name.clone(), xs, ys, traces })
}

/// Image of a cycle under an automorphism of `curve`, with sheets re-identified.
pub fn pushforward_cycle(curve: &PlaneCurve, map: &dyn CurveMap, cycle: &SurfaceCycle) -> Result<SurfaceCycle> {
    pushforward_lifted(curve, curve, map, &lift(curve, cycle)?)?.to_cycle(curve)
}

/// Integer action of a curve map on a canonical basis.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SymmetryAction {
    #[serde(with = "crate::cjson::int_matrix")]
    pub m: DMatrix<i64>,
    pub symplectic: bool,
    pub antisymplectic: bool,
}

pub fn symmetry_matrix_lifted(curve: &PlaneCurve, map: &dyn CurveMap, basis: &LiftedBasis) -> Result<SymmetryAction> {
    let images: Vec<LiftedPath> =
        basis.paths.iter().map(|p| pushforward_lifted(curve, curve, map, p)).collect::<Result<_>>()?;
    let m = action_matrix(curve, &images, basis)?;
    Ok(SymmetryAction { symplectic: is_symplectic(&m), antisymplectic: is_antisymplectic(&m), m })
}

pub fn symmetry_matrix(curve: &PlaneCurve, map: &dyn CurveMap, basis: &HomologyBasis) -> Result<SymmetryAction> {
    let lb = LiftedBasis::lift(curve, basis)?;
    ensure_canonical(curve, &lb)?;
    symmetry_matrix_lifted(curve, map, &lb)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_polynomial, Constants};
    use std::f64::consts::PI;

    fn elliptic() -> PlaneCurve {
        let f = parse_polynomial("y^2 - x*(x-1)*(x-2)", &Constants::default()).unwrap();
        PlaneCurve::with_base(f, C64::new(0.5, -0.8), None).unwrap()
    }

    fn circle(center: C64, r: f64, n: usize) -> Vec<C64> {
        (0..n).map(|k| center + C64::from_polar(r, 2.0 * PI * k as f64 / n as f64)).collect()
    }

    /// Cycle from a closed polyline, sheets filled in by lifting.
    fn cycle(curve: &PlaneCurve, name: &str, xs: Vec<C64>, sheet: usize) -> SurfaceCycle {
        let r = lift_polyline(curve, &xs, sheet).unwrap();
        assert!(r.closes, "{name} does not close: {r:?}");
        SurfaceCycle::new(name, xs.into_iter().zip(r.sheets))
    }

    #[test]
    fn elliptic_basis_is_canonical() {
        let cv = elliptic();
        // a: around [0,1]; b: around [1,2]
        let a = cycle(&cv, "a", circle(C64::new(0.5, 0.0), 0.8, 24), 0);
        let b = cycle(&cv, "b", circle(C64::new(1.5, 0.0), 0.8, 24), 0);
        let ab = intersection_number(&cv, &a, &b).unwrap();
        assert_eq!(ab.abs(), 1);
        assert_eq!(intersection_number(&cv, &b, &a).unwrap(), -ab);
        assert_eq!(intersection_number(&cv, &a, &a).unwrap(), 0);
        // orient so that <a, b> = 1
        let b = if ab == 1 { b } else { b.reversed() };
        let basis = HomologyBasis { a_cycles: vec![a.clone()], b_cycles: vec![b.clone()] };
        assert_eq!(intersection_matrix(&cv, &basis).unwrap(), j_matrix(1));
        assert_eq!(expand_in_basis(&cv, &a, &basis).unwrap(), vec![1, 0]);
        let twice = a.concat(&a).unwrap();
        assert_eq!(expand_in_basis(&cv, &twice, &basis).unwrap(), vec![2, 0]);
        let id = find_homology_transform(&cv, &basis, &basis).unwrap();
        assert_eq!(id, SymplecticMatrix::identity(1));
    }

    #[test]
    fn reversal_negates() {
        let cv = elliptic();
        let a = cycle(&cv, "a", circle(C64::new(0.5, 0.0), 0.8, 24), 0);
        let b = cycle(&cv, "b", circle(C64::new(1.5, 0.0), 0.8, 24), 1);
        let ab = intersection_number(&cv, &a, &b).unwrap();
        assert_eq!(intersection_number(&cv, &a, &b.reversed()).unwrap(), -ab);
    }

    #[test]
    fn disjoint_loops_do_not_meet() {
        let cv = elliptic();
        let twice = |c: Vec<C64>| c.iter().chain(c.iter()).copied().collect::<Vec<_>>();
        let a = cycle(&cv, "a", twice(circle(C64::new(0.0, 0.0), 0.3, 16)), 0);
        let b = cycle(&cv, "b", twice(circle(C64::new(2.0, 0.0), 0.3, 16)), 0);
        assert_eq!(intersection_number(&cv, &a, &b).unwrap(), 0);
    }

    #[test]
    fn validation_reports() {
        let cv = elliptic();
        let a = cycle(&cv, "a", circle(C64::new(0.5, 0.0), 0.8, 24), 0);
        assert!(validate_cycle(&cv, &a).valid);
        let mut bad = a.clone();
        bad.points[0].sheet = 1;
        let v = validate_cycle(&cv, &bad);
        assert!(!v.valid);
        assert!(v.inconsistent_vertices.contains(&0));
        let single = SurfaceCycle::new("p", [(C64::new(0.5, 0.5), 1)]);
        assert!(validate_cycle(&cv, &single).valid);
        // one loop around a single branch point does not close
        let open = SurfaceCycle::new("o", circle(C64::new(0.0, 0.0), 0.3, 12).into_iter().map(|x| (x, 0)));
        let v = validate_cycle(&cv, &open);
        assert!(!v.valid);
        let through =
            SurfaceCycle::new("t", [(C64::new(-0.5, 0.0), 0), (C64::new(0.5, 0.0), 0), (C64::new(0.0, 0.5), 0)]);
        let v = validate_cycle(&cv, &through);
        assert_eq!(v.failure.unwrap().segment, 0);
    }

    #[test]
    fn identity_pushforward() {
        let cv = elliptic();
        let a = cycle(&cv, "a", circle(C64::new(0.5, 0.0), 0.8, 24), 0);
        let b = cycle(&cv, "b", circle(C64::new(1.5, 0.0), 0.8, 24), 0);
        let ab = intersection_number(&cv, &a, &b).unwrap();
        let b = if ab == 1 { b } else { b.reversed() };
        let basis = HomologyBasis { a_cycles: vec![a.clone()], b_cycles: vec![b] };
        let img = pushforward_cycle(&cv, &|x, y| (x, y), &a).unwrap();
        assert_eq!(img.points[0], a.points[0]);
        let act = symmetry_matrix(&cv, &|x, y| (x, y), &basis).unwrap();
        assert_eq!(act.m, DMatrix::identity(2, 2));
        // hyperelliptic involution acts as -1
        let act = symmetry_matrix(&cv, &|x, y: C64| (x, -y), &basis).unwrap();
        assert_eq!(act.m, -DMatrix::<i64>::identity(2, 2));
        assert!(act.symplectic);
    }
}
