use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use periodlab::homology::{intersection_number, lift, LiftedBasis, SurfaceCycle};
use periodlab::klein::basis::{build_adapted_basis, cycle_from_polyline};
use periodlab::klein::reference::tau_adapted;
use periodlab::klein::{model, rho, ModelId};
use periodlab::linalg::{max_abs, SymplecticMatrix};
use periodlab::periods::{integrate_lifted, modular_transform, period_matrices_lifted, Differential};
use periodlab::{parse_polynomial, Constants, PlaneCurve};
use proptest::prelude::*;

fn zw() -> &'static PlaneCurve {
    &model(ModelId::Zw).curve
}

fn hub() -> C64 {
    C64::from_polar(0.1, 0.35 * PI)
}

fn branch(k: usize) -> C64 {
    [C64::new(1.0, 0.0), rho(), rho() * rho()][k]
}

/// Sheet shift of one anticlockwise turn around each branch point.
const SHIFT: [i64; 3] = [1, 2, 4];

/// Hub, then `turns` around each listed branch point in order, back to the hub.
fn word_polyline(word: &[(usize, i64)]) -> Vec<C64> {
    let mut pts = vec![hub()];
    for &(k, turns) in word {
        let c = branch(k);
        let d = c / c.norm();
        let a0 = (-d).arg();
        let steps = turns.unsigned_abs() as usize * 16;
        for i in 0..steps {
            pts.push(c + C64::from_polar(0.3, a0 + turns.signum() as f64 * 2.0 * PI * i as f64 / 16.0));
        }
        pts.push(c - d * 0.3);
        pts.push(hub());
    }
    pts.pop();
    pts
}

/// A word whose total sheet shift vanishes, so every lift closes.
fn closing_word() -> impl Strategy<Value = Vec<(usize, i64)>> {
    prop::collection::vec((0usize..3, prop_oneof![Just(-2i64), Just(-1), Just(1), Just(2)]), 1..4).prop_map(|mut w| {
        let total: i64 = w.iter().map(|&(k, t)| SHIFT[k] * t).sum();
        let mut fix = (-total).rem_euclid(7);
        if fix > 3 {
            fix -= 7;
        }
        if fix != 0 {
            w.push((0, fix));
        }
        w
    })
}

fn cycle(word: &[(usize, i64)], sheet: usize, name: &str) -> SurfaceCycle {
    cycle_from_polyline(zw(), name, word_polyline(word), sheet).unwrap()
}

fn jitter(c: &SurfaceCycle, offsets: &[(f64, f64)]) -> SurfaceCycle {
    let mut out = c.clone();
    for (p, (dx, dy)) in out.points.iter_mut().zip(offsets.iter().cycle()) {
        p.re += dx;
        p.im += dy;
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn intersection_is_antisymmetric(w1 in closing_word(), w2 in closing_word(), s1 in 0usize..7, s2 in 0usize..7) {
        let (c1, c2) = (cycle(&w1, s1, "c1"), cycle(&w2, s2, "c2"));
        let i12 = intersection_number(zw(), &c1, &c2).unwrap();
        let i21 = intersection_number(zw(), &c2, &c1).unwrap();
        prop_assert_eq!(i12, -i21);
    }

    #[test]
    fn self_intersection_vanishes(w in closing_word(), s in 0usize..7) {
        let c = cycle(&w, s, "c");
        prop_assert_eq!(intersection_number(zw(), &c, &c).unwrap(), 0);
    }

    #[test]
    fn intersection_is_additive(w1 in closing_word(), w2 in closing_word(), w3 in closing_word(), s in 0usize..7, s3 in 0usize..7) {
        let (c1, c2, c3) = (cycle(&w1, s, "c1"), cycle(&w2, s, "c2"), cycle(&w3, s3, "c3"));
        let joined = c1.concat(&c2).unwrap();
        let lhs = intersection_number(zw(), &joined, &c3).unwrap();
        let rhs = intersection_number(zw(), &c1, &c3).unwrap() + intersection_number(zw(), &c2, &c3).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn jitter_leaves_intersections_unchanged(
        w1 in closing_word(), w2 in closing_word(), s1 in 0usize..7, s2 in 0usize..7,
        offsets in prop::collection::vec((-1e-3f64..1e-3, -1e-3f64..1e-3), 1..20),
    ) {
        let (c1, c2) = (cycle(&w1, s1, "c1"), cycle(&w2, s2, "c2"));
        let before = intersection_number(zw(), &c1, &c2).unwrap();
        let after = intersection_number(zw(), &jitter(&c1, &offsets), &jitter(&c2, &offsets[1..].iter().copied().chain([(0.0, 0.0)]).collect::<Vec<_>>())).unwrap();
        prop_assert_eq!(before, after);
    }

    #[test]
    fn continuing_there_and_back_returns(ax in -2.0f64..2.0, ay in -2.0f64..2.0, bx in -2.0f64..2.0, by in -2.0f64..2.0, k in 0usize..7) {
        let (a, b) = (C64::new(ax, ay), C64::new(bx, by));
        prop_assume!(zw().segment_clearance(a, b) > 0.05);
        let y0 = zw().fiber(a).unwrap()[k];
        let y1 = zw().continue_sheet(a, b, y0).unwrap();
        let back = zw().continue_sheet(b, a, y1).unwrap();
        prop_assert!((back - y0).norm() < 1e-10 * (1.0 + y0.norm()));
        prop_assert!(zw().residual(b, y1) < 1e-12);
    }
}

fn roots_strategy() -> impl Strategy<Value = Vec<C64>> {
    prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 3..7)
        .prop_map(|v| v.into_iter().map(|(a, b)| C64::new(a, b)).collect::<Vec<_>>())
        .prop_filter("well separated", |r| {
            r.iter().enumerate().all(|(i, p)| r[i + 1..].iter().all(|q| (p - q).norm() > 0.3))
        })
}

fn hyperelliptic(roots: &[C64]) -> PlaneCurve {
    let factors: Vec<String> = roots.iter().map(|r| format!("(x - ({} + {}*i))", r.re, r.im)).collect();
    let f = parse_polynomial(&format!("y^2 - {}", factors.join("*")), &Constants::default()).unwrap();
    PlaneCurve::new(f).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    #[test]
    fn monodromy_product_matches_the_enclosing_loop(roots in roots_strategy()) {
        let cv = hyperelliptic(&roots);
        let data = cv.monodromy_data().unwrap();
        prop_assert_eq!(data.finite.len(), roots.len());
        prop_assert_eq!(cv.enclosing_loop_permutation(64).unwrap(), data.infinity.inverse());
        prop_assert_eq!(cv.genus().unwrap(), (roots.len() - 1) / 2);
    }

    #[test]
    fn halving_the_step_keeps_every_permutation(roots in roots_strategy()) {
        let cv = hyperelliptic(&roots);
        let halved = cv.clone().with_max_step(cv.max_step() / 2.0);
        let a = cv.monodromy_data().unwrap();
        let b = halved.monodromy_data().unwrap();
        prop_assert_eq!(a.finite, b.finite);
        prop_assert_eq!(a.infinity, b.infinity);
    }
}

/// Random symplectic matrix as a product of generators of `Sp(6, Z)`.
fn symplectic_strategy() -> impl Strategy<Value = SymplecticMatrix> {
    let generator = (0usize..3, 0usize..3, -2i64..=2, 0usize..3).prop_map(|(i, j, v, kind)| {
        let mut m = DMatrix::<i64>::identity(6, 6);
        match kind {
            // symmetric translation (I S; 0 I)
            0 => {
                m[(i, 3 + j)] += v;
                if i != j {
                    m[(j, 3 + i)] += v;
                }
            }
            // (U 0; 0 U^-T) with U elementary
            1 if i != j => {
                m[(i, j)] += v;
                m[(3 + j, 3 + i)] -= v;
            }
            _ => {
                m[(i, i)] = 0;
                m[(3 + i, 3 + i)] = 0;
                m[(i, 3 + i)] = 1;
                m[(3 + i, i)] = -1;
            }
        }
        SymplecticMatrix::new(m).unwrap()
    });
    prop::collection::vec(generator, 1..5)
        .prop_map(|gs| gs.iter().fold(SymplecticMatrix::identity(3), |acc, g| g.mul(&acc)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn modular_transform_is_a_group_action(m1 in symplectic_strategy(), m2 in symplectic_strategy()) {
        let tau = tau_adapted();
        let step = modular_transform(&modular_transform(&tau, &m1).unwrap(), &m2).unwrap();
        let once = modular_transform(&tau, &m2.mul(&m1)).unwrap();
        prop_assert!(max_abs(&(&step - &once)) < 1e-9 * (1.0 + max_abs(&once)));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(3))]

    #[test]
    fn tau_ignores_the_choice_of_differentials(g in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 9)) {
        let g = DMatrix::from_fn(3, 3, |i, j| C64::new(g[3 * i + j].0, g[3 * i + j].1));
        prop_assume!(g.determinant().norm() > 0.1);
        let m = model(ModelId::Zw);
        let mixed: Vec<Differential> = (0..3)
            .map(|j| Differential::combine(&m.differentials, &g.column(j).iter().copied().collect::<Vec<_>>()).unwrap())
            .collect();
        let lifted = LiftedBasis::lift(&m.curve, &build_adapted_basis().unwrap()).unwrap();
        let pd = period_matrices_lifted(&m.curve, &mixed, &lifted, 1e-10).unwrap();
        prop_assert!(max_abs(&(pd.tau - tau_adapted())) < 1e-8);
    }

    #[test]
    fn periods_of_a_jittered_cycle_agree(offsets in prop::collection::vec((-1e-3f64..1e-3, -1e-3f64..1e-3), 1..20)) {
        let m = model(ModelId::Zw);
        let a1 = &build_adapted_basis().unwrap().a_cycles[0];
        let tol = 1e-10;
        let (p, _) = integrate_lifted(&m.curve, &m.differentials, &lift(&m.curve, a1).unwrap(), tol).unwrap();
        let (q, _) = integrate_lifted(&m.curve, &m.differentials, &lift(&m.curve, &jitter(a1, &offsets)).unwrap(), tol).unwrap();
        for (x, y) in p.iter().zip(&q) {
            prop_assert!((x - y).norm() < 2.0 * tol, "{} vs {}", x, y);
        }
    }
}

#[test]
fn genus_is_three_in_every_model() {
    for id in ModelId::ALL {
        assert_eq!(model(id).curve.genus().unwrap(), 3, "{id}");
    }
}

#[test]
fn halving_tolerance_moves_periods_less_than_the_estimate() {
    let m = model(ModelId::Zw);
    let basis = build_adapted_basis().unwrap();
    for c in basis.cycles() {
        let path = lift(&m.curve, c).unwrap();
        let (coarse, err) = integrate_lifted(&m.curve, &m.differentials, &path, 1e-8).unwrap();
        let (fine, _) = integrate_lifted(&m.curve, &m.differentials, &path, 5e-9).unwrap();
        for (x, y) in coarse.iter().zip(&fine) {
            assert!((x - y).norm() <= err.max(1e-15), "{}: {} vs {} (estimate {err:e})", c.name, x, y);
        }
    }
}
