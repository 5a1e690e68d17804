//! Local monodromy around critical points and the resulting branch data.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::Serialize;

use super::{point_segment_distance, PlaneCurve};
use crate::cjson;
use crate::error::{Error, Result};
use crate::perm::Permutation;

/// Vertices of the standoff polygon used for monodromy loops.
const LOOP_VERTICES: usize = 32;
/// Standoff radius halvings tried before giving up.
const RADIUS_RETRIES: usize = 4;

/// Sheet permutation for one anticlockwise loop around a finite branch point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MonodromyPermutation {
    #[serde(with = "cjson")]
    pub branch_point: C64,
    pub perm: Permutation,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BranchPoint {
    #[serde(with = "cjson")]
    pub point: C64,
    pub cycle_type: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BranchPointSet {
    pub finite_points: Vec<BranchPoint>,
    pub includes_infinity: bool,
    pub infinity_cycle_type: Vec<usize>,
}

/// All local monodromy of a curve.
///
/// `finite` is in angular order about the base point, starting just
/// anticlockwise of `reference_angle`; following the loops in that order and
/// then the loop around infinity gives the identity.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MonodromyData {
    pub finite: Vec<MonodromyPermutation>,
    pub infinity: Permutation,
    pub reference_angle: f64,
}

impl MonodromyData {
    /// Product of the finite loops in order, followed by infinity.
    pub fn total_product(&self, n: usize) -> Permutation {
        self.finite.iter().fold(Permutation::identity(n), |acc, m| acc.then(&m.perm)).then(&self.infinity)
    }
}

impl PlaneCurve {
    /// Direction from the base point through the widest angular gap between
    /// critical points; loops are ordered starting from it.
    pub fn reference_angle(&self) -> f64 {
        let mut angles: Vec<f64> = self.critical.iter().map(|(p, _)| (p - self.base).arg()).collect();
        if angles.is_empty() {
            return PI;
        }
        angles.sort_by(f64::total_cmp);
        let mut best = (angles[0] + 2.0 * PI - angles[angles.len() - 1], angles[angles.len() - 1]);
        for w in angles.windows(2) {
            if w[1] - w[0] > best.0 {
                best = (w[1] - w[0], w[0]);
            }
        }
        best.1 + 0.5 * best.0
    }

    /// Critical points sorted anticlockwise from the reference direction.
    fn ordered_critical(&self, theta0: f64) -> Vec<C64> {
        let mut pts: Vec<C64> = self.critical.iter().map(|(p, _)| *p).collect();
        let key = |p: &C64| ((p - self.base).arg() - theta0).rem_euclid(2.0 * PI);
        pts.sort_by(|p, q| key(p).total_cmp(&key(q)).then((p - self.base).norm().total_cmp(&(q - self.base).norm())));
        pts
    }

    /// Closed lasso: straight from the base point to a standoff circle of
    /// radius `r` around `p`, once anticlockwise, and back.
    pub fn lasso(&self, p: C64, r: f64, vertices: usize) -> Vec<C64> {
        let b = self.base;
        let entry = p + (b - p) * (r / (b - p).norm());
        let mut path = vec![b, entry];
        for j in 1..=vertices {
            path.push(p + (entry - p) * C64::from_polar(1.0, 2.0 * PI * j as f64 / vertices as f64));
        }
        *path.last_mut().expect("nonempty") = entry;
        path.push(b);
        path
    }

    fn standoff(&self, p: C64) -> f64 {
        let others =
            self.critical.iter().map(|(q, _)| (q - p).norm()).filter(|&d| d > 0.0).fold(f64::INFINITY, f64::min);
        0.25 * others.min((self.base - p).norm())
    }

    /// Permutation of sheet labels induced by a closed path at the base point.
    pub fn path_permutation(&self, path: &[C64]) -> Result<Permutation> {
        let mut images = Vec::with_capacity(self.sheet_count);
        for &y0 in &self.labels {
            let y = self.continue_along(path, y0)?;
            images.push(self.label_index(y).ok_or(Error::SheetAmbiguity(self.base))?);
        }
        Permutation::from_vec(images).map_err(|_| Error::SheetAmbiguity(self.base))
    }

    /// Local monodromy around one critical point.
    pub fn local_monodromy(&self, p: C64) -> Result<Permutation> {
        let b = self.base;
        for (q, _) in &self.critical {
            if *q != p && point_segment_distance(*q, b, p) <= 1e-6 * self.scale {
                return Err(Error::BaseRayBlocked(p));
            }
        }
        let mut r = self.standoff(p);
        for _ in 0..RADIUS_RETRIES {
            match self.path_permutation(&self.lasso(p, r, LOOP_VERTICES)) {
                Ok(perm) => return Ok(perm),
                Err(Error::ContinuationFailed(_)) | Err(Error::NearBranchPoint { .. }) => r *= 0.5,
                Err(e) => return Err(e),
            }
        }
        Err(Error::StandoffExhausted(p))
    }

    /// Local monodromy of every critical point with nontrivial action, plus
    /// the permutation at infinity.
    pub fn monodromy_data(&self) -> Result<MonodromyData> {
        let theta0 = self.reference_angle();
        let mut finite = Vec::new();
        for p in self.ordered_critical(theta0) {
            let perm = self.local_monodromy(p)?;
            if !perm.is_identity() {
                finite.push(MonodromyPermutation { branch_point: p, perm });
            }
        }
        let n = self.sheet_count;
        let product = finite.iter().fold(Permutation::identity(n), |acc, m| acc.then(&m.perm));
        Ok(MonodromyData { finite, infinity: product.inverse(), reference_angle: theta0 })
    }

    /// Finite branch points with their permutations, in angular order.
    pub fn monodromy(&self) -> Result<Vec<MonodromyPermutation>> {
        Ok(self.monodromy_data()?.finite)
    }

    /// Permutation for one anticlockwise loop enclosing every critical point,
    /// computed by direct continuation along a large circle.
    pub fn enclosing_loop_permutation(&self, vertices: usize) -> Result<Permutation> {
        let b = self.base;
        let theta0 = self.reference_angle();
        let radius = 2.0 * self.critical.iter().map(|(p, _)| (p - b).norm()).fold(0.0, f64::max) + 1.0;
        let start = b + C64::from_polar(radius, theta0);
        let mut path = vec![b];
        for j in 0..=vertices {
            path.push(b + C64::from_polar(radius, theta0 + 2.0 * PI * j as f64 / vertices as f64));
        }
        *path.last_mut().expect("nonempty") = start;
        path.push(b);
        self.path_permutation(&path)
    }

    pub fn branch_points(&self) -> Result<BranchPointSet> {
        let data = self.monodromy_data()?;
        Ok(BranchPointSet {
            finite_points: data
                .finite
                .iter()
                .map(|m| BranchPoint { point: m.branch_point, cycle_type: m.perm.cycle_type() })
                .collect(),
            includes_infinity: !data.infinity.is_identity(),
            infinity_cycle_type: data.infinity.cycle_type(),
        })
    }

    /// Genus by Riemann–Hurwitz over all branch points including infinity.
    pub fn genus(&self) -> Result<usize> {
        let data = self.monodromy_data()?;
        genus_from(&data, self.sheet_count)
    }
}

/// Riemann–Hurwitz genus of an `n`-sheeted cover with the given monodromy.
pub fn genus_from(data: &MonodromyData, n: usize) -> Result<usize> {
    let ram: usize = data.finite.iter().map(|m| m.perm.ramification()).sum::<usize>() + data.infinity.ramification();
    if !ram.is_multiple_of(2) || ram + 2 < 2 * n {
        return Err(Error::Input(format!("inconsistent ramification total {ram} for {n} sheets")));
    }
    Ok((ram + 2 - 2 * n) / 2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_polynomial, Constants};

    fn curve(text: &str) -> PlaneCurve {
        PlaneCurve::new(parse_polynomial(text, &Constants::default()).unwrap()).unwrap()
    }

    #[test]
    fn square_root_transposition() {
        let f = parse_polynomial("y^2 - x", &Constants::default()).unwrap();
        let cv = PlaneCurve::with_base(f, C64::new(1.0, 0.0), None).unwrap();
        let m = cv.monodromy().unwrap();
        assert_eq!(m.len(), 1);
        assert_eq!(m[0].perm, Permutation::from_vec(vec![1, 0]).unwrap());
        let bp = cv.branch_points().unwrap();
        assert!(bp.includes_infinity);
        assert_eq!(cv.genus().unwrap(), 0);
    }

    #[test]
    fn hyperelliptic_genus() {
        assert_eq!(curve("y^2 - x*(x-1)*(x-2)*(x-3)*(x-4)").genus().unwrap(), 2);
        assert_eq!(curve("y^2 - x*(x-1)*(x-2)").genus().unwrap(), 1);
    }

    #[test]
    fn klein_affine_model() {
        let cv = curve("x^3*y + y^3 + x");
        let bp = cv.branch_points().unwrap();
        assert_eq!(bp.finite_points.len(), 8);
        assert!(bp.includes_infinity);
        assert_eq!(cv.genus().unwrap(), 3);
    }

    #[test]
    fn product_matches_enclosing_loop() {
        for text in ["x^3*y + y^3 + x", "y^3 - x*(x-1)*(x+2)", "y^2 - x*(x-1)*(x-2)*(x-3)*(x-4)"] {
            let cv = curve(text);
            let data = cv.monodromy_data().unwrap();
            let direct = cv.enclosing_loop_permutation(64).unwrap();
            assert_eq!(direct.inverse(), data.infinity, "{text}");
            assert!(data.total_product(cv.sheet_count()).is_identity());
        }
    }
}
