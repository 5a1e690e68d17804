//! The adapted homology basis in `(z, w)` and the Rauch–Lewittes basis in
//! `(t, s)` assembled from edge words.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use super::symmetry::{map_zw, SymmetryId};
use super::{model, rho, zeta, ModelId, ModelMap};
use crate::algcurve::PlaneCurve;
use crate::error::{Error, Result};
use crate::homology::{lift, lift_polyline, pushforward_lifted, HomologyBasis, LiftedBasis, SurfaceCycle};

/// Sides of the polygons approximating loops around branch points.
pub const LOOP_SIDES: usize = 16;
/// Radius of the loops around branch points in the `z`-plane.
pub const LOOP_RADIUS: f64 = 0.3;
/// Where the `a`- and `b`-cycles leave from: near the base point `z = 0`
/// but off it, since the antiholomorphic map sends `z = 0` to infinity.
pub fn hub() -> C64 {
    C64::from_polar(0.1, 0.35 * PI)
}

/// Polygon loop around `c` starting and ending at the point of the circle
/// nearest the origin; `turns < 0` is clockwise.
fn loop_around(c: C64, turns: i32, r: f64) -> Vec<C64> {
    let d = c / c.norm();
    let entry = c - d * r;
    let a0 = (-d).arg();
    let steps = turns.unsigned_abs() as usize * LOOP_SIDES;
    let sign = f64::from(turns.signum());
    let mut pts = vec![entry];
    for i in 1..steps {
        pts.push(c + C64::from_polar(r, a0 + sign * 2.0 * PI * i as f64 / LOOP_SIDES as f64));
    }
    pts.push(entry);
    pts
}

/// Projection of `a_1` (and `b_1`): clockwise three times around `z = 1`,
/// then once clockwise around `z = rho^2`, through the hub.
pub fn first_cycle_polyline() -> Vec<C64> {
    let h = hub();
    let mut pts = vec![h];
    pts.extend(loop_around(C64::new(1.0, 0.0), -3, LOOP_RADIUS));
    pts.push(h);
    pts.extend(loop_around(rho() * rho(), -1, LOOP_RADIUS));
    pts
}

/// Cycle over `xs` from the given start sheet, with every vertex sheet
/// filled in by continuation.
pub fn cycle_from_polyline(curve: &PlaneCurve, name: &str, xs: Vec<C64>, sheet: usize) -> Result<SurfaceCycle> {
    let r = lift_polyline(curve, &xs, sheet)?;
    if let Some(f) = r.failure {
        return Err(Error::InvalidCycle { name: name.into(), reason: format!("segment {}: {}", f.segment, f.message) });
    }
    if !r.closes {
        return Err(Error::InvalidCycle { name: name.into(), reason: "lift does not close".into() });
    }
    Ok(SurfaceCycle::new(name, xs.into_iter().zip(r.sheets)))
}

/// Image of a cycle under the order-3 map: `z -> rho^2 z` is linear, so the
/// image polyline is the rotated one, started on the image sheet.
fn order3_image(curve: &PlaneCurve, c: &SurfaceCycle, name: &str) -> Result<SurfaceCycle> {
    let x0 = c.points[0].x();
    let y0 = curve.sheet_value(x0, c.points[0].sheet)?;
    let (x1, y1) = map_zw(SymmetryId::Order3, x0, y0);
    let sheet = curve.sheet_index(x1, y1)?;
    let xs = c.xs().into_iter().map(|x| rho() * rho() * x).collect();
    cycle_from_polyline(curve, name, xs, sheet)
}

/// `a_1` from sheet 0 and `b_1` from sheet 2 over the same polyline, the
/// rest by the order-3 symmetry.
pub fn build_adapted_basis() -> Result<HomologyBasis> {
    let curve = &model(ModelId::Zw).curve;
    let a1 = cycle_from_polyline(curve, "a1", first_cycle_polyline(), 0)?;
    let b1 = cycle_from_polyline(curve, "b1", first_cycle_polyline(), 2)?;
    let a2 = order3_image(curve, &a1, "a2")?;
    let a3 = order3_image(curve, &a2, "a3")?;
    let b2 = order3_image(curve, &b1, "b2")?;
    let b3 = order3_image(curve, &b2, "b3")?;
    Ok(HomologyBasis { a_cycles: vec![a1, a2, a3], b_cycles: vec![b1, b2, b3] })
}

/// Edge words of the Rauch–Lewittes cycles `a'_1..a'_3, b'_1..b'_3`.
pub const RL_WORDS: [&[i32]; 6] = [&[1, -7, -4, -9], &[-4, -9], &[-4, -5], &[2, 3, 4, 5], &[-3, 7], &[3, -5]];

/// Exponent `k` with `s` in `zeta^k R` along an edge.
pub fn edge_phase(edge: u32) -> Result<u32> {
    // even edges carry the table; odd edges are identified with even ones
    let even = match edge {
        2 | 11 => 2,
        4 | 13 => 4,
        6 | 1 => 6,
        8 | 3 => 8,
        10 | 5 => 10,
        12 | 7 => 12,
        14 | 9 => 14,
        _ => return Err(Error::Input(format!("no edge numbered {edge}"))),
    };
    Ok(match even {
        2 => 0,
        4 => 4,
        6 => 1,
        8 => 5,
        10 => 2,
        12 => 6,
        _ => 3,
    })
}

/// `(from, to)` in the `t`-plane: odd edges run `1 -> 0`, even edges
/// `0 -> 1`, reversed for negative entries.
fn edge_ends(e: i32) -> (f64, f64) {
    let forward_from_one = e.unsigned_abs() % 2 == 1;
    if forward_from_one == (e > 0) {
        (1.0, 0.0)
    } else {
        (0.0, 1.0)
    }
}

/// Radius of the detours around `t = 0` and `t = 1`.
pub const RL_RADIUS: f64 = 0.22;

/// Polyline in the `t`-plane and the start sheet phase for an edge word.
///
/// Each edge is a real segment kept `RL_RADIUS` away from its ends; between
/// edges a whole number of turns around the shared vertex moves `s` from
/// one phase to the next. Around `t = 0` a turn multiplies `s` by `zeta`,
/// around `t = 1` by `zeta^2`.
pub fn rl_polyline(word: &[i32]) -> Result<(Vec<C64>, u32)> {
    let r = RL_RADIUS;
    let mut segs = Vec::new();
    for &e in word {
        let (f, t) = edge_ends(e);
        segs.push((f, t, edge_phase(e.unsigned_abs())?));
    }
    let mut pts: Vec<C64> = Vec::new();
    for (i, &(f, t, m)) in segs.iter().enumerate() {
        let (fnext, _, mnext) = segs[(i + 1) % segs.len()];
        if fnext != t {
            return Err(Error::Input(format!("edge word is not connected at position {i}")));
        }
        let a = C64::new(f + (t - f) * r, 0.0);
        let b = C64::new(t + (f - t) * r, 0.0);
        if pts.last() != Some(&a) {
            pts.push(a);
        }
        pts.push(b);
        // turns k with zeta^(k * step) = zeta^(mnext - m)
        let inverse_step = if t == 0.0 { 1 } else { 4 };
        let mut k = ((mnext as i64 - m as i64) * inverse_step).rem_euclid(7);
        if k > 3 {
            k -= 7;
        }
        let c = C64::new(t, 0.0);
        let a0 = if t == 0.0 { 0.0 } else { PI };
        let steps = k.unsigned_abs() as usize * LOOP_SIDES;
        for j in 1..steps {
            pts.push(c + C64::from_polar(r, a0 + k.signum() as f64 * 2.0 * PI * j as f64 / LOOP_SIDES as f64));
        }
    }
    if pts.len() > 1 && pts.last() == pts.first() {
        pts.pop();
    }
    Ok((pts, segs[0].2))
}

/// Sheet of the `(t, s)` model whose `s` over real `t` in `(0, 1)` has phase `zeta^m`.
fn sheet_with_phase(curve: &PlaneCurve, t: C64, m: u32) -> Result<usize> {
    let modulus = (t * (t - 1.0) * (t - 1.0)).norm().powf(1.0 / 7.0);
    curve.sheet_index(t, zeta().powu(m) * modulus)
}

pub fn build_rl_basis() -> Result<HomologyBasis> {
    let curve = &model(ModelId::Ts).curve;
    let names = ["a'1", "a'2", "a'3", "b'1", "b'2", "b'3"];
    let mut cycles = Vec::new();
    for (word, name) in RL_WORDS.iter().zip(names) {
        let (xs, m) = rl_polyline(word)?;
        let sheet = sheet_with_phase(curve, xs[0], m)?;
        cycles.push(cycle_from_polyline(curve, name, xs, sheet)?);
    }
    HomologyBasis::from_cycles(cycles)
}

/// Lifted adapted basis carried into another model by the birational map.
pub fn transport_adapted(basis: &HomologyBasis, to: ModelId) -> Result<LiftedBasis> {
    let src = &model(ModelId::Zw).curve;
    let dst = &model(to).curve;
    let map = ModelMap { from: ModelId::Zw, to };
    let paths = basis.cycles().map(|c| pushforward_lifted(src, dst, &map, &lift(src, c)?)).collect::<Result<_>>()?;
    LiftedBasis::new(paths)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homology::{intersection_matrix, validate_cycle};
    use crate::linalg::j_matrix;

    #[test]
    fn loops_close_on_entry() {
        let l = loop_around(C64::new(1.0, 0.0), -3, 0.3);
        assert_eq!(l.len(), 3 * LOOP_SIDES + 1);
        assert_eq!(l[0], *l.last().unwrap());
        assert!((l[0] - C64::new(0.7, 0.0)).norm() < 1e-15);
        // clockwise from the leftmost point: second vertex above the axis
        assert!(l[1].im > 0.0);
    }

    #[test]
    fn adapted_cycles_are_valid() {
        let basis = build_adapted_basis().unwrap();
        let curve = &model(ModelId::Zw).curve;
        for c in basis.cycles() {
            let v = validate_cycle(curve, c);
            assert!(v.valid, "{}: {:?}", c.name, v.failure);
        }
        assert_eq!(basis.a_cycles[0].points[0].sheet, 0);
        assert_eq!(basis.b_cycles[0].points[0].sheet, 2);
    }

    #[test]
    fn rl_words_follow_the_phase_table() {
        let curve = &model(ModelId::Ts).curve;
        for word in RL_WORDS {
            let (xs, m) = rl_polyline(word).unwrap();
            let c = cycle_from_polyline(curve, "w", xs.clone(), sheet_with_phase(curve, xs[0], m).unwrap()).unwrap();
            // every real vertex lies on the sheet of its edge's phase
            let mut e = 0;
            for (k, p) in c.points.iter().enumerate() {
                if p.im == 0.0 && p.re > 0.0 && p.re < 1.0 {
                    let s = curve.sheet_value(p.x(), p.sheet).unwrap();
                    let phase = (s.arg() / (2.0 * PI / 7.0)).round().rem_euclid(7.0) as u32;
                    let allowed: Vec<u32> = word.iter().map(|e| edge_phase(e.unsigned_abs()).unwrap()).collect();
                    assert!(allowed.contains(&phase), "{word:?} vertex {k}");
                    e += 1;
                }
            }
            assert!(e >= word.len());
        }
    }

    #[test]
    fn rl_basis_is_canonical() {
        let basis = build_rl_basis().unwrap();
        let curve = &model(ModelId::Ts).curve;
        assert_eq!(intersection_matrix(curve, &basis).unwrap(), j_matrix(3));
    }
}
