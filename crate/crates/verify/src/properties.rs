//! Seeded property runs for the homology and monodromy invariants.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use periodlab::homology::{intersection_number, SurfaceCycle};
use periodlab::klein::basis::cycle_from_polyline;
use periodlab::klein::{model, rho, ModelId};
use periodlab::{parse_polynomial, Constants, PlaneCurve};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestError, TestRng, TestRunner};

const SEED: [u8; 32] = *b"periodlab acceptance property rn";

fn runner(cases: u32) -> TestRunner {
    let config = Config { cases, failure_persistence: None, ..Config::default() };
    TestRunner::new_with_rng(config, TestRng::from_seed(RngAlgorithm::ChaCha, &SEED))
}

fn zw() -> &'static PlaneCurve {
    &model(ModelId::Zw).curve
}

fn branch(k: usize) -> C64 {
    [C64::new(1.0, 0.0), rho(), rho() * rho()][k]
}

const SHIFT: [i64; 3] = [1, 2, 4];

/// Closed polyline from a hub near the origin: `turns` around each branch point.
pub fn word_polyline(word: &[(usize, i64)]) -> Vec<C64> {
    let hub = C64::from_polar(0.1, 0.35 * PI);
    let mut pts = vec![hub];
    for &(k, turns) in word {
        let c = branch(k);
        let d = c / c.norm();
        let a0 = (-d).arg();
        for i in 0..turns.unsigned_abs() as usize * 16 {
            pts.push(c + C64::from_polar(0.3, a0 + turns.signum() as f64 * 2.0 * PI * i as f64 / 16.0));
        }
        pts.push(c - d * 0.3);
        pts.push(hub);
    }
    pts.pop();
    pts
}

/// Loop words on the `(z, w)` model whose sheet shifts cancel.
pub fn closing_word() -> impl Strategy<Value = Vec<(usize, i64)>> {
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

fn cycle(word: &[(usize, i64)], sheet: usize) -> Result<SurfaceCycle, TestCaseError> {
    cycle_from_polyline(zw(), "c", word_polyline(word), sheet).map_err(|e| TestCaseError::fail(e.to_string()))
}

fn meet(c1: &SurfaceCycle, c2: &SurfaceCycle) -> Result<i64, TestCaseError> {
    intersection_number(zw(), c1, c2).map_err(|e| TestCaseError::fail(e.to_string()))
}

fn hyperelliptic(roots: &[C64]) -> Result<PlaneCurve, TestCaseError> {
    let factors: Vec<String> = roots.iter().map(|r| format!("(x - ({} + {}*i))", r.re, r.im)).collect();
    let f = parse_polynomial(&format!("y^2 - {}", factors.join("*")), &Constants::default())
        .map_err(|e| TestCaseError::fail(e.to_string()))?;
    PlaneCurve::new(f).map_err(|e| TestCaseError::fail(e.to_string()))
}

fn separated_roots() -> impl Strategy<Value = Vec<C64>> {
    prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 3..7)
        .prop_map(|v| v.into_iter().map(|(a, b)| C64::new(a, b)).collect::<Vec<_>>())
        .prop_filter("well separated", |r| {
            r.iter().enumerate().all(|(i, p)| r[i + 1..].iter().all(|q| (p - q).norm() > 0.3))
        })
}

fn outcome<T: std::fmt::Debug>(r: Result<(), TestError<T>>) -> Result<(), String> {
    r.map_err(|e| match e {
        TestError::Abort(why) => format!("aborted: {why}"),
        TestError::Fail(why, input) => format!("{why} for {input:?}"),
    })
}

/// One named property and how it fared.
pub struct PropertyResult {
    pub name: &'static str,
    pub cases: u32,
    pub outcome: Result<(), String>,
}

pub fn run_properties() -> Vec<PropertyResult> {
    let mut out = Vec::new();
    let mut record = |name, cases, outcome| out.push(PropertyResult { name, cases, outcome });

    let pairs = (closing_word(), closing_word(), 0usize..7, 0usize..7);
    record(
        "intersection antisymmetry",
        8,
        outcome(runner(8).run(&pairs, |(w1, w2, s1, s2)| {
            let (c1, c2) = (cycle(&w1, s1)?, cycle(&w2, s2)?);
            prop_assert_eq!(meet(&c1, &c2)?, -meet(&c2, &c1)?);
            Ok(())
        })),
    );

    record(
        "self-intersection zero",
        8,
        outcome(runner(8).run(&(closing_word(), 0usize..7), |(w, s)| {
            let c = cycle(&w, s)?;
            prop_assert_eq!(meet(&c, &c)?, 0);
            Ok(())
        })),
    );

    let jittered = (pairs, prop::collection::vec((-1e-3f64..1e-3, -1e-3f64..1e-3), 1..20));
    record(
        "perturbation invariance",
        8,
        outcome(runner(8).run(&jittered, |((w1, w2, s1, s2), offsets)| {
            let (c1, c2) = (cycle(&w1, s1)?, cycle(&w2, s2)?);
            let shift = |c: &SurfaceCycle, skip: usize| {
                let mut out = c.clone();
                for (p, (dx, dy)) in out.points.iter_mut().zip(offsets.iter().cycle().skip(skip)) {
                    p.re += dx;
                    p.im += dy;
                }
                out
            };
            prop_assert_eq!(meet(&c1, &c2)?, meet(&shift(&c1, 0), &shift(&c2, 1))?);
            Ok(())
        })),
    );

    record(
        "monodromy product identity",
        6,
        outcome(runner(6).run(&separated_roots(), |roots| {
            let cv = hyperelliptic(&roots)?;
            let data = cv.monodromy_data().map_err(|e| TestCaseError::fail(e.to_string()))?;
            let around = cv.enclosing_loop_permutation(64).map_err(|e| TestCaseError::fail(e.to_string()))?;
            prop_assert!(data.total_product(2).is_identity());
            prop_assert_eq!(around, data.infinity.inverse());
            Ok(())
        })),
    );

    record(
        "step-halving stability",
        6,
        outcome(runner(6).run(&separated_roots(), |roots| {
            let cv = hyperelliptic(&roots)?;
            let halved = cv.clone().with_max_step(cv.max_step() / 2.0);
            let fail = |e: periodlab::Error| TestCaseError::fail(e.to_string());
            let (a, b) = (cv.monodromy_data().map_err(fail)?, halved.monodromy_data().map_err(fail)?);
            prop_assert_eq!(a.finite, b.finite);
            prop_assert_eq!(a.infinity, b.infinity);
            Ok(())
        })),
    );

    let genus = ModelId::ALL.iter().try_for_each(|&id| {
        let cv = &model(id).curve;
        let data = cv.monodromy_data().map_err(|e| format!("{id}: {e}"))?;
        if !data.total_product(cv.sheet_count()).is_identity() {
            return Err(format!("{id}: monodromy product is not the identity"));
        }
        match cv.genus() {
            Ok(3) => Ok(()),
            Ok(g) => Err(format!("{id}: genus {g}")),
            Err(e) => Err(format!("{id}: {e}")),
        }
    });
    record("genus 3 across models", ModelId::ALL.len() as u32, genus);
    out
}
