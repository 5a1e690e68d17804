//! Period integrals, period matrices and the constraints an automorphism
//! imposes on them.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::algcurve::PlaneCurve;
use crate::cjson;
use crate::error::{Error, Result};
use crate::homology::{ensure_canonical, lift, HomologyBasis, LiftedBasis, LiftedPath, SurfaceCycle};
use crate::linalg::{invert, max_abs, symmetric_eigenvalues, to_complex, SymplecticMatrix};
use crate::parse::{parse_polynomial_in, Constants};
use crate::poly::BivariatePolynomial;
use crate::quadrature;

/// Default absolute tolerance per period.
pub const DEFAULT_TOL: f64 = 1e-10;

/// `(numerator / denominator) dx` in the curve's variables.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Differential {
    pub numerator: BivariatePolynomial,
    pub denominator: BivariatePolynomial,
}

impl Differential {
    pub fn new(numerator: BivariatePolynomial, denominator: BivariatePolynomial) -> Result<Self> {
        if denominator.is_zero() {
            return Err(Error::Input("differential has a zero denominator".into()));
        }
        Ok(Self { numerator, denominator })
    }

    /// Parse numerator and denominator over the given variable pair.
    pub fn parse(numerator: &str, denominator: &str, vars: (&str, &str), constants: &Constants) -> Result<Self> {
        Self::new(parse_polynomial_in(numerator, vars, constants)?, parse_polynomial_in(denominator, vars, constants)?)
    }

    pub fn eval(&self, x: C64, y: C64) -> C64 {
        self.numerator.eval(x, y) / self.denominator.eval(x, y)
    }

    /// `sum_k c_k omega_k`, over a common denominator.
    pub fn combine(diffs: &[Differential], coeffs: &[C64]) -> Result<Self> {
        if diffs.is_empty() || diffs.len() != coeffs.len() {
            return Err(Error::Dimension("need one coefficient per differential".into()));
        }
        let vars = diffs[0].numerator.vars();
        let vars = (vars.0.to_owned(), vars.1.to_owned());
        let vars = (vars.0.as_str(), vars.1.as_str());
        if diffs.iter().all(|d| d.denominator == diffs[0].denominator) {
            let num = diffs
                .iter()
                .zip(coeffs)
                .fold(BivariatePolynomial::zero(vars), |acc, (d, &c)| &acc + &d.numerator.scale(c));
            return Self::new(num, diffs[0].denominator.clone());
        }
        let one = BivariatePolynomial::constant(C64::new(1.0, 0.0), vars);
        let den = diffs.iter().fold(one.clone(), |acc, d| &acc * &d.denominator);
        let mut num = BivariatePolynomial::zero(vars);
        for (k, (d, &c)) in diffs.iter().zip(coeffs).enumerate() {
            let others = diffs
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != k)
                .fold(one.clone(), |acc, (_, e)| &acc * &e.denominator);
            num = &num + &(&d.numerator * &others).scale(c);
        }
        Self::new(num, den)
    }
}

/// Integrals of several differentials over one lifted closed path.
pub fn integrate_lifted(
    curve: &PlaneCurve,
    diffs: &[Differential],
    path: &LiftedPath,
    tol: f64,
) -> Result<(Vec<C64>, f64)> {
    let edges = path.edge_count();
    let mut total = vec![C64::new(0.0, 0.0); diffs.len()];
    let mut error = 0.0;
    if edges == 0 {
        return Ok((total, 0.0));
    }
    let edge_tol = tol / edges as f64;
    let n = path.xs.len();
    for i in 0..edges {
        let a = path.xs[i];
        let dx = path.xs[(i + 1) % n] - a;
        if dx.norm() == 0.0 {
            continue;
        }
        let integrand = |s: f64| -> Result<Vec<C64>> {
            let x = a + dx * s;
            let y = path.y_on_edge(curve, i, s)?;
            diffs
                .iter()
                .map(|d| {
                    let v = d.eval(x, y) * dx;
                    if v.is_finite() {
                        Ok(v)
                    } else {
                        Err(Error::SingularIntegrand(x))
                    }
                })
                .collect()
        };
        let q = quadrature::integrate(integrand, diffs.len(), edge_tol, i)?;
        for (t, v) in total.iter_mut().zip(q.value) {
            *t += v;
        }
        error += q.error;
    }
    Ok((total, error))
}

pub fn integrate_differential(curve: &PlaneCurve, omega: &Differential, cycle: &SurfaceCycle, tol: f64) -> Result<C64> {
    let (v, _) = integrate_lifted(curve, std::slice::from_ref(omega), &lift(curve, cycle)?, tol)?;
    Ok(v[0])
}

/// Symmetry and positivity of a period matrix.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RiemannReport {
    pub symmetry_error: f64,
    pub min_imag_eigenvalue: f64,
    pub passed: bool,
}

pub fn check_riemann_conditions(tau: &DMatrix<C64>, tol: f64) -> RiemannReport {
    let symmetry_error = max_abs(&(tau - tau.transpose()));
    let im = tau.map(|v| v.im);
    let sym_im = (&im + im.transpose()) * 0.5;
    let min_imag_eigenvalue = symmetric_eigenvalues(&sym_im).first().copied().unwrap_or(f64::NAN);
    RiemannReport { symmetry_error, min_imag_eigenvalue, passed: symmetry_error <= tol && min_imag_eigenvalue > tol }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PeriodDiagnostics {
    /// 1-norm condition number of the a-period matrix.
    pub condition: f64,
    /// Summed quadrature error estimates, worst cycle.
    pub quadrature_error: f64,
    pub tolerance: f64,
    pub riemann: RiemannReport,
}

/// `A_ij` and `B_ij` are the integrals of differential `j` over `a_i`, `b_i`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PeriodData {
    #[serde(rename = "A_periods", with = "cjson::matrix")]
    pub a_periods: DMatrix<C64>,
    #[serde(rename = "B_periods", with = "cjson::matrix")]
    pub b_periods: DMatrix<C64>,
    #[serde(with = "cjson::matrix")]
    pub tau: DMatrix<C64>,
    pub diagnostics: PeriodDiagnostics,
}

impl PeriodData {
    /// Assemble from raw periods, computing `tau = B A^{-1}`.
    pub fn from_periods(a: DMatrix<C64>, b: DMatrix<C64>, tol: f64, quadrature_error: f64) -> Result<Self> {
        let (inv, condition) = invert(&a)?;
        let tau = &b * inv;
        let riemann = check_riemann_conditions(&tau, tol.max(1e-12) * 1e3);
        Ok(Self {
            a_periods: a,
            b_periods: b,
            tau,
            diagnostics: PeriodDiagnostics { condition, quadrature_error, tolerance: tol, riemann },
        })
    }

    pub fn genus(&self) -> usize {
        self.tau.nrows()
    }
}

/// Period matrices over an already lifted basis (canonicity not rechecked).
pub fn period_matrices_lifted(
    curve: &PlaneCurve,
    diffs: &[Differential],
    basis: &LiftedBasis,
    tol: f64,
) -> Result<PeriodData> {
    let g = basis.genus();
    if diffs.len() != g {
        return Err(Error::Dimension(format!("{} differentials for genus {g}", diffs.len())));
    }
    let results: Vec<Result<(Vec<C64>, f64)>> = std::thread::scope(|scope| {
        let handles: Vec<_> =
            basis.paths.iter().map(|p| scope.spawn(move || integrate_lifted(curve, diffs, p, tol))).collect();
        handles.into_iter().map(|h| h.join().expect("period worker panicked")).collect()
    });
    let mut a = DMatrix::zeros(g, g);
    let mut b = DMatrix::zeros(g, g);
    let mut worst = 0.0f64;
    for (i, r) in results.into_iter().enumerate() {
        let (row, err) = r?;
        worst = worst.max(err);
        for (j, v) in row.into_iter().enumerate() {
            if i < g {
                a[(i, j)] = v;
            } else {
                b[(i - g, j)] = v;
            }
        }
    }
    PeriodData::from_periods(a, b, tol, worst)
}

pub fn period_matrices(
    curve: &PlaneCurve,
    diffs: &[Differential],
    basis: &HomologyBasis,
    tol: f64,
) -> Result<PeriodData> {
    let lb = LiftedBasis::lift(curve, basis)?;
    ensure_canonical(curve, &lb)?;
    period_matrices_lifted(curve, diffs, &lb, tol)
}

fn blocks(m: &SymplecticMatrix) -> [DMatrix<C64>; 4] {
    [to_complex(&m.a()), to_complex(&m.b()), to_complex(&m.c()), to_complex(&m.d())]
}

fn check_dims(tau: &DMatrix<C64>, m: &SymplecticMatrix) -> Result<()> {
    if tau.nrows() != tau.ncols() || tau.nrows() != m.genus() {
        return Err(Error::Dimension(format!(
            "{}x{} period matrix with a genus {} transform",
            tau.nrows(),
            tau.ncols(),
            m.genus()
        )));
    }
    Ok(())
}

/// `(C + D tau)(A + B tau)^{-1}`.
///
/// Transforming by `M1` and then by `M2` equals transforming by `M2 * M1`.
pub fn modular_transform(tau: &DMatrix<C64>, m: &SymplecticMatrix) -> Result<DMatrix<C64>> {
    check_dims(tau, m)?;
    let [a, b, c, d] = blocks(m);
    let (inv, _) = invert(&(a + b * tau))?;
    Ok((c + d * tau) * inv)
}

/// Max entry of `tau B tau + tau A - D tau - C`.
pub fn riccati_residual(tau: &DMatrix<C64>, m: &SymplecticMatrix) -> Result<f64> {
    check_dims(tau, m)?;
    let [a, b, c, d] = blocks(m);
    Ok(max_abs(&(tau * b * tau + tau * a - d * tau - c)))
}

/// Linear action `L` of an automorphism on differentials.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DifferentialAction {
    #[serde(rename = "L", with = "cjson::matrix")]
    pub l: DMatrix<C64>,
    /// Max entry of both block rows of the constraint, relative to the
    /// largest period.
    pub residual: f64,
}

fn constraint_action(pd: &PeriodData, m: &DMatrix<i64>, conjugate: bool, tol: f64) -> Result<DifferentialAction> {
    let g = pd.genus();
    if m.nrows() != 2 * g || m.ncols() != 2 * g {
        return Err(Error::Dimension(format!("{}x{} matrix for genus {g}", m.nrows(), m.ncols())));
    }
    let cm = to_complex(m);
    let top = cm.view((0, 0), (g, g)) * &pd.a_periods + cm.view((0, g), (g, g)) * &pd.b_periods;
    let bottom = cm.view((g, 0), (g, g)) * &pd.a_periods + cm.view((g, g), (g, g)) * &pd.b_periods;
    let (pa, pb) = if conjugate {
        (pd.a_periods.map(|v| v.conj()), pd.b_periods.map(|v| v.conj()))
    } else {
        (pd.a_periods.clone(), pd.b_periods.clone())
    };
    let (inv, _) = invert(&pa)?;
    let l = &inv * &top;
    let scale = max_abs(&pd.a_periods).max(max_abs(&pd.b_periods)).max(f64::MIN_POSITIVE);
    let residual = max_abs(&(top - &pa * &l)).max(max_abs(&(bottom - &pb * &l))) / scale;
    if residual > tol {
        return Err(Error::ConstraintResidual { residual, tol });
    }
    Ok(DifferentialAction { l, residual })
}

/// `L = A^{-1}(A_M A + B_M B)` from the period constraint
/// `(A_M B_M; C_M D_M)(A; B) = (A; B) L`.
pub fn differential_action(pd: &PeriodData, m: &SymplecticMatrix, tol: f64) -> Result<DifferentialAction> {
    constraint_action(pd, m.entries(), false, tol)
}

/// Conjugate-linear analogue for an antiholomorphic map, whose homology
/// action is antisymplectic: `M (A; B) = conj(A; B) L`.
pub fn antiholomorphic_action(pd: &PeriodData, m: &DMatrix<i64>, tol: f64) -> Result<DifferentialAction> {
    constraint_action(pd, m, true, tol)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceComparison {
    pub n: u32,
    #[serde(with = "cjson")]
    pub trace_l: C64,
    #[serde(with = "cjson")]
    pub trace_m: C64,
    pub difference: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CharacterReport {
    pub traces: Vec<TraceComparison>,
    pub tolerance: f64,
    pub passed: bool,
}

/// Compare `Tr L^n` with `Tr (A + B tau)^n` for `n = 1..=n_max`.
pub fn character_check(
    l: &DMatrix<C64>,
    tau: &DMatrix<C64>,
    m: &SymplecticMatrix,
    n_max: u32,
    tol: f64,
) -> Result<CharacterReport> {
    check_dims(tau, m)?;
    if l.shape() != tau.shape() {
        return Err(Error::Dimension("L and tau must have the same size".into()));
    }
    let [a, b, _, _] = blocks(m);
    let rep = a + b * tau;
    let g = l.nrows();
    let (mut pl, mut pm) = (DMatrix::<C64>::identity(g, g), DMatrix::<C64>::identity(g, g));
    let mut traces = Vec::new();
    for n in 1..=n_max {
        pl = &pl * l;
        pm = &pm * &rep;
        let (tl, tm) = (pl.trace(), pm.trace());
        traces.push(TraceComparison { n, trace_l: tl, trace_m: tm, difference: (tl - tm).norm() });
    }
    let passed = traces.iter().all(|t| t.difference <= tol);
    Ok(CharacterReport { traces, tolerance: tol, passed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homology::lift_polyline;
    use crate::homology::SurfaceCycle;
    use crate::parse::parse_polynomial;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn elliptic() -> PlaneCurve {
        let f = parse_polynomial("y^2 - x*(x-1)*(x-2)", &Constants::default()).unwrap();
        PlaneCurve::with_base(f, C64::new(0.5, -0.8), None).unwrap()
    }

    fn loop_around(cv: &PlaneCurve, c: C64, r: f64) -> SurfaceCycle {
        let xs: Vec<C64> = (0..24).map(|k| c + C64::from_polar(r, 2.0 * PI * k as f64 / 24.0)).collect();
        let rep = lift_polyline(cv, &xs, 0).unwrap();
        SurfaceCycle::new("c", xs.into_iter().zip(rep.sheets))
    }

    /// 2 * int_0^1 dx / sqrt(x(x-1)(x-2)) by a substitution-smoothed rule.
    fn real_axis_oracle() -> f64 {
        // x = sin^2(u): dx / sqrt(x (1-x)(2-x)) = 2 du / sqrt(2 - sin^2 u)
        let (nodes, weights) = quadrature::gauss_legendre(60);
        let half = PI / 4.0;
        nodes
            .iter()
            .zip(&weights)
            .map(|(t, w)| {
                let u = half * (t + 1.0);
                w * half * 2.0 / (2.0 - u.sin().powi(2)).sqrt()
            })
            .sum::<f64>()
            * 2.0
    }

    #[test]
    fn elliptic_period_matches_real_integral() {
        let cv = elliptic();
        let w = Differential::parse("1", "y", ("x", "y"), &Constants::default()).unwrap();
        let c = loop_around(&cv, C64::new(0.5, 0.0), 0.8);
        let p = integrate_differential(&cv, &w, &c, 1e-12).unwrap();
        // collapsing the loop onto [0,1] doubles the real integral
        assert_relative_eq!(p.norm(), real_axis_oracle(), epsilon = 1e-10);
        let back = integrate_differential(&cv, &w, &c.reversed(), 1e-12).unwrap();
        assert!((p + back).norm() < 1e-11);
    }

    #[test]
    fn elliptic_tau_is_in_upper_half_plane() {
        let cv = elliptic();
        let w = Differential::parse("1", "y", ("x", "y"), &Constants::default()).unwrap();
        let a = loop_around(&cv, C64::new(0.5, 0.0), 0.8);
        let b0 = loop_around(&cv, C64::new(1.5, 0.0), 0.8);
        let b = if crate::homology::intersection_number(&cv, &a, &b0).unwrap() == 1 { b0 } else { b0.reversed() };
        let basis = HomologyBasis { a_cycles: vec![a], b_cycles: vec![b] };
        let pd = period_matrices(&cv, &[w], &basis, 1e-11).unwrap();
        assert!(pd.diagnostics.riemann.passed, "{:?}", pd.tau);
        // y^2 = x(x-1)(x-2) has j = 1728, so tau reduces to i
        let mut t = pd.tau[(0, 0)];
        for _ in 0..50 {
            t -= t.re.round();
            if t.norm() < 1.0 - 1e-12 {
                t = -t.inv();
            } else {
                break;
            }
        }
        assert!((t - C64::new(0.0, 1.0)).norm() < 1e-9, "{t}");
    }

    #[test]
    fn transforms_compose() {
        let tau = DMatrix::from_row_slice(1, 1, &[C64::new(0.3, 1.2)]);
        let m1 = SymplecticMatrix::from_rows(&[&[1, 1], &[0, 1]]).unwrap();
        let m2 = SymplecticMatrix::from_rows(&[&[0, -1], &[1, 0]]).unwrap();
        let two = modular_transform(&modular_transform(&tau, &m1).unwrap(), &m2).unwrap();
        let once = modular_transform(&tau, &m2.mul(&m1)).unwrap();
        assert!((two[(0, 0)] - once[(0, 0)]).norm() < 1e-14);
        assert_eq!(riccati_residual(&tau, &SymplecticMatrix::identity(1)).unwrap(), 0.0);
    }

    #[test]
    fn riemann_rejects_indefinite() {
        let tau = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![C64::new(0.0, 1.0), C64::new(0.0, -1.0)]));
        assert!(!check_riemann_conditions(&tau, 1e-10).passed);
    }

    #[test]
    fn combination_keeps_values() {
        let c = Constants::default();
        let w1 = Differential::parse("x", "y", ("x", "y"), &c).unwrap();
        let w2 = Differential::parse("1", "x+y", ("x", "y"), &c).unwrap();
        let k = [C64::new(2.0, 1.0), C64::new(-1.0, 0.5)];
        let w = Differential::combine(&[w1.clone(), w2.clone()], &k).unwrap();
        let (x, y) = (C64::new(0.3, 0.7), C64::new(-1.1, 0.2));
        assert!((w.eval(x, y) - (k[0] * w1.eval(x, y) + k[1] * w2.eval(x, y))).norm() < 1e-13);
    }
}
