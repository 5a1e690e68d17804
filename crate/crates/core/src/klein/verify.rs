//! Numerical verification of the quartic's period matrix, its symmetry
//! actions and the published equivalent period matrices.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::Serialize;

use super::basis::{build_adapted_basis, build_rl_basis, transport_adapted};
use super::reference::{rauch_lewittes, reference_transforms, tau_adapted};
use super::symmetry::{symmetry, SymmetryId, SymmetryMap};
use super::{model, zeta, KleinConstants, ModelId};
use crate::error::Result;
use crate::homology::{
    find_transform_lifted, intersection_matrix_lifted, symmetry_matrix_lifted, HomologyBasis, LiftedBasis,
};
use crate::linalg::{is_symplectic, j_matrix, max_abs, SymplecticMatrix};
use crate::periods::{
    antiholomorphic_action, character_check, differential_action, modular_transform, period_matrices_lifted,
    riccati_residual, PeriodData,
};
use crate::perm::Permutation;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// Residual or deviation; `0` or `1` for exact checks.
    pub value: f64,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub name: String,
    pub passed: bool,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl VerificationReport {
    fn new(name: &str) -> Self {
        Self { name: name.into(), passed: true, checks: Vec::new(), notes: Vec::new() }
    }

    fn push(&mut self, check: Check) {
        self.passed &= check.passed;
        self.checks.push(check);
    }

    fn residual(&mut self, name: impl Into<String>, value: f64, tol: f64) {
        self.push(Check { name: name.into(), passed: value < tol, value, tolerance: tol, detail: None });
    }

    fn exact(&mut self, name: impl Into<String>, ok: bool, detail: Option<String>) {
        self.push(Check { name: name.into(), passed: ok, value: if ok { 0.0 } else { 1.0 }, tolerance: 0.0, detail });
    }

    fn error(&mut self, name: impl Into<String>, e: &crate::Error) {
        self.exact(name, false, Some(e.to_string()));
    }

    /// Look up a check by name.
    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn show_int(m: &DMatrix<i64>) -> String {
    let rows: Vec<String> = m.row_iter().map(|r| format!("{:?}", r.iter().collect::<Vec<_>>())).collect();
    format!("[{}]", rows.join(","))
}

/// Adapted basis with its lift and periods, computed once.
pub struct KleinWorkbench {
    pub basis: HomologyBasis,
    pub lifted: LiftedBasis,
    pub periods: PeriodData,
    pub tol: f64,
}

impl KleinWorkbench {
    pub fn new(tol: f64) -> Result<Self> {
        let zw = model(ModelId::Zw);
        let basis = build_adapted_basis()?;
        let lifted = LiftedBasis::lift(&zw.curve, &basis)?;
        let periods = period_matrices_lifted(&zw.curve, &zw.differentials, &lifted, tol)?;
        Ok(Self { basis, lifted, periods, tol })
    }
}

/// Sheet shifts around the three branch points of the `(z, w)` model.
pub fn verify_monodromy() -> VerificationReport {
    let mut rep = VerificationReport::new("monodromy");
    let cv = &model(ModelId::Zw).curve;
    let rho = super::rho();
    let expected = [(C64::new(1.0, 0.0), 1usize, "z=1"), (rho, 2, "z=rho"), (rho * rho, 4, "z=rho^2")];
    match cv.monodromy_data() {
        Ok(data) => {
            rep.exact("three finite branch points", data.finite.len() == 3, Some(format!("{}", data.finite.len())));
            for (p, shift, label) in expected {
                let found = data.finite.iter().find(|m| (m.branch_point - p).norm() < 1e-6);
                let want = Permutation::shift(7, shift as i64);
                rep.exact(
                    format!("{label}: k -> k+{shift}"),
                    found.is_some_and(|m| m.perm == want),
                    found.map(|m| m.perm.to_string()),
                );
            }
            rep.exact("product with infinity is identity", data.total_product(7).is_identity(), None);
        }
        Err(e) => rep.error("monodromy", &e),
    }
    rep
}

pub fn verify_canonical_basis(wb: &KleinWorkbench) -> VerificationReport {
    let mut rep = VerificationReport::new("canonical basis");
    rep.notes.push("clockwise loops taken as negatively oriented; branch-point monodromy anticlockwise".into());
    for id in [ModelId::Zw, ModelId::Ts, ModelId::Xy] {
        let m = if id == ModelId::Zw {
            intersection_matrix_lifted(&model(id).curve, &wb.lifted.paths)
        } else {
            transport_adapted(&wb.basis, id).and_then(|lb| intersection_matrix_lifted(&model(id).curve, &lb.paths))
        };
        match m {
            Ok(m) => rep.exact(format!("intersection matrix is J in {id}"), m == j_matrix(3), Some(show_int(&m))),
            Err(e) => rep.error(format!("intersection matrix in {id}"), &e),
        }
    }
    rep
}

/// Integer symmetry matrices on the adapted basis, and their orders.
pub fn verify_symmetry_matrices(wb: &KleinWorkbench) -> VerificationReport {
    let mut rep = VerificationReport::new("symmetry matrices");
    let cv = &model(ModelId::Zw).curve;
    for id in SymmetryId::ALL {
        let s = symmetry(id);
        match symmetry_matrix_lifted(cv, &SymmetryMap { id, model: ModelId::Zw }, &wb.lifted) {
            Ok(act) => {
                rep.exact(format!("{id}: M"), act.m == s.expected_m, Some(show_int(&act.m)));
                let mut p = DMatrix::<i64>::identity(6, 6);
                for _ in 0..id.order() {
                    p = &p * &act.m;
                }
                rep.exact(format!("{id}: M^{} = I", id.order()), p == DMatrix::identity(6, 6), None);
                let kind_ok = if id.holomorphic() { act.symplectic } else { act.antisymplectic };
                rep.exact(
                    format!("{id}: {}", if id.holomorphic() { "symplectic" } else { "antisymplectic" }),
                    kind_ok,
                    None,
                );
            }
            Err(e) => rep.error(format!("{id}: M"), &e),
        }
    }
    // order 7: M^2 a1 = b1, M a2 = b2, M^4 a3 = b3, read off rows
    let m7 = symmetry(SymmetryId::Order7).expected_m;
    let mut power = DMatrix::<i64>::identity(6, 6);
    for k in 1..=4u32 {
        power = &power * &m7;
        if let Some(i) = [(2u32, 0usize), (1, 1), (4, 2)].iter().find(|(p, _)| *p == k).map(|&(_, i)| i) {
            let mut want = vec![0i64; 6];
            want[3 + i] = 1;
            let row: Vec<i64> = power.row(i).iter().copied().collect();
            rep.exact(format!("order7: M^{k} takes a{} to b{}", i + 1, i + 1), row == want, Some(format!("{row:?}")));
        }
    }
    rep
}

/// Computed period matrix against the closed form.
pub fn verify_period_matrix(wb: &KleinWorkbench, tol: f64) -> VerificationReport {
    let mut rep = VerificationReport::new("period matrix");
    let tau = &wb.periods.tau;
    rep.residual("tau matches closed form", max_abs(&(tau - tau_adapted())), tol);
    rep.exact("Riemann conditions", wb.periods.diagnostics.riemann.passed, None);
    rep
}

/// Circulant structure, conjugation symmetry, phases and closed-form moduli
/// of the a-periods.
pub fn verify_period_structure(wb: &KleinWorkbench, tol: f64) -> VerificationReport {
    let mut rep = VerificationReport::new("period structure");
    let a = &wb.periods.a_periods;
    let b = &wb.periods.b_periods;
    let k = KleinConstants::new();
    let (x, y, z) = (a[(0, 0)], a[(0, 1)], a[(0, 2)]);
    let v = [x, y, z];
    let circ = DMatrix::from_fn(3, 3, |i, j| v[(i + j) % 3]);
    rep.residual("A circulant", max_abs(&(a - circ)), tol);
    rep.residual("B = -conj(A)", max_abs(&(b + a.map(|c| c.conj()))), tol);
    let zt = zeta();
    rep.residual("-conj(Y) = zeta^2 Y", (-y.conj() - zt.powu(2) * y).norm(), tol);
    rep.residual("-conj(Z) = zeta Z", (-z.conj() - zt * z).norm(), tol);
    rep.residual("-conj(X) = zeta^4 X", (-x.conj() - zt.powu(4) * x).norm(), tol);
    for (name, val, want) in
        [("X", x, k.expected_xyz()[0]), ("Y", y, k.expected_xyz()[1]), ("Z", z, k.expected_xyz()[2])]
    {
        // positive multiple of the expected phase
        let along = val * want.conj() / want.norm();
        rep.residual(format!("{name} on its phase ray"), along.im.abs() + (-along.re).max(0.0), tol);
    }
    let (mu, nu) = (x.norm() / z.norm(), y.norm() / z.norm());
    rep.residual("|X|/|Z| = zeta + 1/zeta", (mu - k.mu).abs(), tol);
    rep.residual("|Y|/|Z| = 1 + zeta + 1/zeta", (nu - k.nu).abs(), tol);
    rep.residual("|X|/|Z| cubic", (mu.powi(3) + mu.powi(2) - 2.0 * mu - 1.0).abs(), tol);
    rep.residual("|Y|/|Z| cubic", (nu.powi(3) - 2.0 * nu.powi(2) - nu + 1.0).abs(), tol);
    let (al, be, ga) = (k.alpha, k.beta, k.gamma);
    let first = x * al + y * be + z * (ga + 1.0);
    let second = x * (be + 1.0) + y * ga + z * al;
    rep.residual("involution: alpha X + beta Y + gamma Z = -Z", first.norm(), tol);
    rep.residual("involution: (beta + 1) X + gamma Y + alpha Z = 0", second.norm(), tol);
    // first equation times (beta + 1)/alpha has the second's coefficients
    let scale = (be + 1.0) / al;
    let coeff_gap = (scale * al - (be + 1.0)).abs() + (scale * be - ga).abs() + (scale * (ga + 1.0) - al).abs();
    rep.residual("involution: one independent equation", coeff_gap, 1e-14);
    rep.residual("Z = B(4/7,1/7)(zeta^-1 - 1)/7", (z - k.z_value).norm(), tol);
    rep.residual("|Z| = 2 sin(pi/7) G(8/7) G(4/7)/G(5/7)", (z.norm() - k.r3).abs(), tol);
    rep
}

/// Published transforms take `tau` to the published matrices.
pub fn verify_published_transforms(tau: &DMatrix<C64>, tol: f64) -> VerificationReport {
    let mut rep = VerificationReport::new("published transforms");
    let refs = reference_transforms();
    for t in &refs {
        rep.exact(format!("{}: symplectic", t.name), is_symplectic(&t.m), None);
        match SymplecticMatrix::new(t.m.clone()).and_then(|m| modular_transform(tau, &m)) {
            Ok(img) => {
                let dev = max_abs(&(&img - &t.tau));
                let mut c = Check {
                    name: format!("{}: transform matches", t.name),
                    passed: dev < tol,
                    value: dev,
                    tolerance: tol,
                    detail: None,
                };
                if !c.passed {
                    c.detail = Some(format!("transform gives {}", show_complex(&img)));
                }
                rep.push(c);
            }
            Err(e) => rep.error(format!("{}: transform", t.name), &e),
        }
    }
    // every target is reached from the first through M_j M_1^{-1}
    if let Ok(first) = SymplecticMatrix::new(refs[0].m.clone()) {
        for t in &refs[1..] {
            let chained = SymplecticMatrix::new(t.m.clone())
                .map(|m| m.mul(&first.inverse()))
                .and_then(|m| modular_transform(&refs[0].tau, &m));
            match chained {
                Ok(img) => rep.residual(format!("{} from {}", t.name, refs[0].name), max_abs(&(img - &t.tau)), tol),
                Err(e) => rep.error(format!("{} from {}", t.name, refs[0].name), &e),
            }
        }
    }
    rep
}

fn show_complex(m: &DMatrix<C64>) -> String {
    let rows: Vec<String> = m
        .row_iter()
        .map(|r| format!("[{}]", r.iter().map(|c| format!("{:.6}{:+.6}i", c.re, c.im)).collect::<Vec<_>>().join(", ")))
        .collect();
    format!("[{}]", rows.join(", "))
}

/// Constraint, Riccati and trace identities for each symmetry.
pub fn verify_symmetries(wb: &KleinWorkbench, tol: f64) -> VerificationReport {
    let mut rep = VerificationReport::new("symmetry constraints");
    let pd = &wb.periods;
    let k = KleinConstants::new();
    rep.residual("alpha gamma = beta (beta + 1)", (k.alpha * k.gamma - k.beta * (k.beta + 1.0)).abs(), 1e-14);
    rep.residual("beta^2 = (alpha + 1)(gamma + 1)", (k.beta * k.beta - (k.alpha + 1.0) * (k.gamma + 1.0)).abs(), 1e-14);
    let samples = curve_samples();
    for id in SymmetryId::ALL {
        let s = symmetry(id);
        let worst = samples
            .iter()
            .map(|&(z, w)| {
                let (z1, w1) = super::symmetry::map_zw(id, z, w);
                model(ModelId::Zw).curve.residual(z1, w1)
            })
            .fold(0.0, f64::max);
        rep.residual(format!("{id}: preserves the curve"), worst, 1e-12);
        if !id.holomorphic() {
            match antiholomorphic_action(pd, &s.expected_m, tol) {
                Ok(act) => rep.residual(format!("{id}: conjugate action L"), max_abs(&(&act.l - &s.expected_l)), tol),
                Err(e) => rep.error(format!("{id}: conjugate action"), &e),
            }
            rep.residual(
                format!("{id}: B = -conj(A)"),
                max_abs(&(&pd.b_periods + pd.a_periods.map(|c| c.conj()))),
                tol,
            );
            continue;
        }
        let m = match SymplecticMatrix::new(s.expected_m.clone()) {
            Ok(m) => m,
            Err(e) => {
                rep.error(format!("{id}: M"), &e);
                continue;
            }
        };
        match differential_action(pd, &m, tol) {
            Ok(act) => {
                rep.residual(format!("{id}: constraint residual"), act.residual, tol);
                rep.residual(format!("{id}: L matches pullback"), max_abs(&(&act.l - &s.expected_l)), tol);
                match character_check(&act.l, &pd.tau, &m, 7, tol) {
                    Ok(c) => {
                        let worst = c.traces.iter().map(|t| t.difference).fold(0.0, f64::max);
                        rep.residual(format!("{id}: Tr L^n = Tr (A + B tau)^n, n = 1..7"), worst, tol);
                    }
                    Err(e) => rep.error(format!("{id}: character"), &e),
                }
            }
            Err(e) => rep.error(format!("{id}: differential action"), &e),
        }
        match riccati_residual(&pd.tau, &m) {
            Ok(r) => rep.residual(format!("{id}: Riccati residual"), r, tol),
            Err(e) => rep.error(format!("{id}: Riccati"), &e),
        }
    }
    rep
}

fn curve_samples() -> Vec<(C64, C64)> {
    let cv = &model(ModelId::Zw).curve;
    [C64::new(0.31, 0.17), C64::new(-0.66, 0.42), C64::new(1.4, -0.8), C64::new(-2.1, -1.3)]
        .into_iter()
        .filter_map(|z| cv.fiber(z).ok().map(|ws| ws.into_iter().map(move |w| (z, w))))
        .flatten()
        .collect()
}

/// Edge-word basis in `(t, s)`: canonical, and related to the adapted
/// basis by the stored transform.
pub fn verify_rl_basis(wb: &KleinWorkbench, tol: f64) -> VerificationReport {
    let mut rep = VerificationReport::new("edge-word basis");
    let ts = model(ModelId::Ts);
    let built = build_rl_basis().and_then(|b| LiftedBasis::lift(&ts.curve, &b));
    let rl = match built {
        Ok(b) => b,
        Err(e) => {
            rep.error("build", &e);
            return rep;
        }
    };
    match intersection_matrix_lifted(&ts.curve, &rl.paths) {
        Ok(m) => rep.exact("intersection matrix is J", m == j_matrix(3), Some(show_int(&m))),
        Err(e) => rep.error("intersection matrix", &e),
    }
    let found = transport_adapted(&wb.basis, ModelId::Ts).and_then(|src| find_transform_lifted(&ts.curve, &src, &rl));
    match found {
        Ok(m) => {
            rep.exact("transform equals stored", m.entries() == &rauch_lewittes().m, Some(show_int(m.entries())));
            match modular_transform(&wb.periods.tau, &m) {
                Ok(img) => {
                    rep.residual("transform maps tau to stored matrix", max_abs(&(img - rauch_lewittes().tau)), tol)
                }
                Err(e) => rep.error("modular transform", &e),
            }
        }
        Err(e) => rep.error("transform", &e),
    }
    match period_matrices_lifted(&ts.curve, &ts.differentials, &rl, wb.tol) {
        Ok(pd) => rep.residual("direct periods give stored matrix", max_abs(&(pd.tau - rauch_lewittes().tau)), tol),
        Err(e) => rep.error("direct periods", &e),
    }
    rep
}

/// Every verification that uses the adapted basis periods, in order.
pub fn verify_with(wb: &KleinWorkbench, tol: f64) -> Vec<VerificationReport> {
    vec![
        verify_canonical_basis(wb),
        verify_symmetry_matrices(wb),
        verify_period_matrix(wb, tol),
        verify_period_structure(wb, tol),
        verify_published_transforms(&wb.periods.tau, tol),
        verify_symmetries(wb, tol),
        verify_rl_basis(wb, tol),
    ]
}

/// Every verification, in order, with periods computed to `tol / 100`.
pub fn verify_all(tol: f64) -> Vec<VerificationReport> {
    let mut out = vec![verify_monodromy()];
    match KleinWorkbench::new(tol * 1e-2) {
        Ok(wb) => out.extend(verify_with(&wb, tol)),
        Err(e) => {
            let mut rep = VerificationReport::new("periods");
            rep.error("adapted basis periods", &e);
            out.push(rep);
        }
    }
    out
}
