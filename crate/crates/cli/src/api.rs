//! Operations behind both the subcommands and the HTTP endpoints.
//!
//! Every operation takes a request value and returns a serializable
//! response; [`payload`] turns either side into the exact bytes sent.

use std::sync::Arc;

use nalgebra::DMatrix;
use periodlab::algcurve::{BranchPointSet, MonodromyData};
use periodlab::cjson::{self, ComplexJson};
use periodlab::homology::{
    find_transform_lifted, intersection_matrix_lifted, intersection_number, lift, lift_polyline, pushforward_lifted,
    CycleValidation, LiftReport, LiftedBasis,
};
use periodlab::klein::reference::{reference_matrices, ReferenceMatrices};
use periodlab::klein::verify::{verify_monodromy, verify_with, KleinWorkbench, VerificationReport};
use periodlab::klein::{model, ModelId, ModelMap};
use periodlab::linalg::{j_matrix, SymplecticMatrix};
use periodlab::periods::{period_matrices_lifted, Differential, PeriodData, DEFAULT_TOL};
use periodlab::{parse_polynomial, Complex64, Constants, CycleFile, PlaneCurve};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::ApiError;
use crate::session::{CurveEntry, CycleSetEntry, Session};

/// Comparison tolerance of `klein verify` unless overridden.
pub const VERIFY_TOL: f64 = 1e-8;

/// Compact JSON with a trailing newline: the exact bytes of every response.
pub fn payload<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string(value).expect("response serializes");
    s.push('\n');
    s
}

/// Decode a request body, classifying failures for a 400 response.
pub fn parse_request<T: DeserializeOwned>(body: &[u8]) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| {
        use serde_json::error::Category;
        let reason = match e.classify() {
            Category::Data => "invalid_request",
            Category::Syntax | Category::Eof | Category::Io => "invalid_json",
        };
        ApiError::bad_request(reason, e.to_string())
    })
}

fn check_tol(tol: f64) -> Result<f64, ApiError> {
    if tol.is_finite() && tol > 0.0 {
        Ok(tol)
    } else {
        Err(ApiError::bad_request("invalid_tolerance", format!("tolerance must be positive and finite, got {tol}")))
    }
}

// ---- curves ----

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveRequest {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub polynomial: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basepoint: Option<ComplexJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<ComplexJson>>,
}

impl CurveRequest {
    fn build(&self) -> Result<(String, PlaneCurve), ApiError> {
        let base = self.basepoint.map(Complex64::from);
        match (&self.polynomial, &self.model) {
            (Some(_), Some(_)) | (None, None) => {
                Err(ApiError::bad_request("invalid_request", "give exactly one of `polynomial` and `model`"))
            }
            (None, Some(name)) => {
                let id: ModelId = name.parse().map_err(|_| {
                    ApiError::bad_request(
                        "unknown_model",
                        format!("unknown model {name:?}; expected klein-xy, klein-ts or klein-zw"),
                    )
                })?;
                if self.labels.is_some() {
                    return Err(ApiError::bad_request("invalid_request", "Klein models carry their own sheet labels"));
                }
                let curve = periodlab::cyclefile::resolve_curve(id.model_name(), base)?;
                Ok((id.model_name().to_string(), curve))
            }
            (Some(text), None) => {
                let f = parse_polynomial(text, &Constants::default()).map_err(periodlab::Error::from)?;
                let labels = self.labels.as_ref().map(|l| l.iter().map(|&c| c.into()).collect());
                let curve = match (base, labels) {
                    (Some(b), labels) => PlaneCurve::with_base(f, b, labels)?,
                    (None, None) => PlaneCurve::new(f)?,
                    (None, Some(_)) => {
                        return Err(ApiError::bad_request("invalid_request", "sheet labels need an explicit basepoint"))
                    }
                };
                Ok((text.clone(), curve))
            }
        }
    }
}

/// A curve by session id or by definition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CurveRef {
    Id(String),
    Inline(CurveRequest),
}

impl CurveRef {
    fn resolve(&self, session: &Session) -> Result<Arc<CurveEntry>, ApiError> {
        match self {
            CurveRef::Id(id) => session.curve(id),
            CurveRef::Inline(req) => {
                let (source, curve) = req.build()?;
                Ok(session.intern_curve(&source, curve))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurveResponse {
    pub id: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
    pub polynomial: String,
    pub sheets: usize,
    pub genus: usize,
    #[serde(with = "cjson")]
    pub basepoint: Complex64,
    #[serde(with = "cjson::vec")]
    pub labels: Vec<Complex64>,
    pub branch_points: BranchPointSet,
}

/// Define (or reload) a curve and report its branch points and fiber labels.
pub fn curve(session: &Session, req: CurveRequest) -> Result<CurveResponse, ApiError> {
    let (source, curve) = req.build()?;
    let entry = session.load_curve(&source, curve);
    describe(&entry)
}

fn describe(entry: &CurveEntry) -> Result<CurveResponse, ApiError> {
    Ok(CurveResponse {
        id: entry.id.clone(),
        model: entry.model.map(|m| m.model_name().to_string()),
        polynomial: entry.source.clone(),
        sheets: entry.curve.sheet_count(),
        genus: entry.genus()?,
        basepoint: entry.curve.base_point(),
        labels: entry.curve.labels().to_vec(),
        branch_points: entry.branch_points()?.clone(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonodromyRequest {
    pub curve: CurveRef,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MonodromyResponse {
    pub curve: String,
    #[serde(flatten)]
    pub data: MonodromyData,
}

pub fn monodromy(session: &Session, req: MonodromyRequest) -> Result<MonodromyResponse, ApiError> {
    let entry = req.curve.resolve(session)?;
    Ok(MonodromyResponse { curve: entry.id.clone(), data: entry.monodromy()?.clone() })
}

// ---- lifting ----

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LiftRequest {
    pub curve: CurveRef,
    pub points: Vec<ComplexJson>,
    pub start_sheet: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LiftResponse {
    pub curve: String,
    #[serde(flatten)]
    pub report: LiftReport,
}

/// Lift a polyline; a failed segment is a 422 carrying its index.
pub fn lift_path(session: &Session, req: LiftRequest) -> Result<LiftResponse, ApiError> {
    let entry = req.curve.resolve(session)?;
    let xs: Vec<Complex64> = req.points.iter().map(|&p| p.into()).collect();
    let report = lift_polyline(&entry.curve, &xs, req.start_sheet)?;
    if report.failure.is_some() {
        return Err(ApiError::lift_failed(&report));
    }
    Ok(LiftResponse { curve: entry.id.clone(), report })
}

// ---- cycle sets ----

/// A cycle set by session id or as an inline cycle file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CyclesRef {
    Id(String),
    Inline(CycleFile),
}

impl CyclesRef {
    fn resolve(&self, session: &Session) -> Result<Arc<CycleSetEntry>, ApiError> {
        match self {
            CyclesRef::Id(id) => session.cycles(id),
            CyclesRef::Inline(file) => session.load_cycles(file.clone()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CyclesResponse {
    pub id: String,
    pub curve: String,
    pub names: Vec<String>,
    pub validation: Vec<CycleValidation>,
}

/// Load a cycle file and validate each cycle.
pub fn load_cycles(session: &Session, file: CycleFile) -> Result<CyclesResponse, ApiError> {
    let set = session.load_cycles(file)?;
    Ok(CyclesResponse {
        id: set.id.clone(),
        curve: set.curve.id.clone(),
        names: set.file.cycles.iter().map(|c| c.name.clone()).collect(),
        validation: set.validations(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntersectRequest {
    pub cycles: CyclesRef,
    pub pair: (String, String),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IntersectResponse {
    pub cycles: String,
    pub pair: (String, String),
    pub intersection: i64,
}

pub fn intersect(session: &Session, req: IntersectRequest) -> Result<IntersectResponse, ApiError> {
    let set = req.cycles.resolve(session)?;
    let (c1, c2) = (set.cycle(&req.pair.0)?, set.cycle(&req.pair.1)?);
    for c in [c1, c2] {
        let v = periodlab::homology::validate_cycle(&set.curve.curve, c);
        if !v.valid {
            return Err(ApiError::invalid_cycle(&v));
        }
    }
    let value = intersection_number(&set.curve.curve, c1, c2)?;
    Ok(IntersectResponse { cycles: set.id.clone(), pair: req.pair, intersection: value })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisCheckRequest {
    pub cycles: CyclesRef,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BasisCheckResponse {
    pub cycles: String,
    pub names: Vec<String>,
    #[serde(with = "cjson::int_matrix")]
    pub intersection_matrix: DMatrix<i64>,
    pub canonical: bool,
}

/// Pairwise intersection numbers; canonical when the matrix is exactly `J`.
pub fn basis_check(session: &Session, req: BasisCheckRequest) -> Result<BasisCheckResponse, ApiError> {
    let set = req.cycles.resolve(session)?;
    set.ensure_valid()?;
    let curve = &set.curve.curve;
    let paths = set.file.cycles.iter().map(|c| lift(curve, c)).collect::<Result<Vec<_>, _>>()?;
    let m = intersection_matrix_lifted(curve, &paths)?;
    let n = m.nrows();
    let canonical = n > 0 && n % 2 == 0 && m == j_matrix(n / 2);
    Ok(BasisCheckResponse {
        cycles: set.id.clone(),
        names: set.file.cycles.iter().map(|c| c.name.clone()).collect(),
        intersection_matrix: m,
        canonical,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransformRequest {
    pub src: CyclesRef,
    pub dst: CyclesRef,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TransformResponse {
    pub src: String,
    pub dst: String,
    /// `dst_i = sum_j M_ij src_j`.
    pub matrix: SymplecticMatrix,
}

/// Symplectic change of basis between two canonical bases. Bases on
/// different Klein models are compared after carrying `src` across.
pub fn transform(session: &Session, req: TransformRequest) -> Result<TransformResponse, ApiError> {
    let (src, dst) = (req.src.resolve(session)?, req.dst.resolve(session)?);
    let (src_lifted, dst_lifted) = (src.lifted()?, dst.lifted()?);
    let curve = &dst.curve.curve;
    let m = if src.curve.id == dst.curve.id {
        find_transform_lifted(curve, src_lifted, dst_lifted)?
    } else {
        match (src.curve.model, dst.curve.model) {
            (Some(from), Some(to)) => {
                let map = ModelMap { from, to };
                let carried = src_lifted
                    .a()
                    .iter()
                    .chain(src_lifted.b())
                    .map(|p| pushforward_lifted(&model(from).curve, curve, &map, p))
                    .collect::<Result<Vec<_>, _>>()?;
                find_transform_lifted(curve, &LiftedBasis::new(carried)?, dst_lifted)?
            }
            _ => {
                return Err(ApiError::unprocessable(
                    "curve_mismatch",
                    format!("cycle sets live on different curves ({} and {})", src.curve.id, dst.curve.id),
                ))
            }
        }
    };
    Ok(TransformResponse { src: src.id.clone(), dst: dst.id.clone(), matrix: m })
}

// ---- periods ----

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DifferentialSpec {
    pub numerator: String,
    pub denominator: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PeriodsRequest {
    pub cycles: CyclesRef,
    /// Required unless the curve is a Klein model.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub differentials: Option<Vec<DifferentialSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PeriodsResponse {
    pub cycles: String,
    #[serde(flatten)]
    pub periods: PeriodData,
}

pub fn periods(session: &Session, req: PeriodsRequest) -> Result<PeriodsResponse, ApiError> {
    let tol = check_tol(req.tol.unwrap_or(DEFAULT_TOL))?;
    let set = req.cycles.resolve(session)?;
    let curve = &set.curve.curve;
    let diffs = match (&req.differentials, set.curve.model) {
        (Some(specs), _) => {
            let vars = curve.polynomial().vars();
            specs
                .iter()
                .map(|d| Differential::parse(&d.numerator, &d.denominator, vars, &Constants::default()))
                .collect::<Result<Vec<_>, _>>()?
        }
        (None, Some(id)) => model(id).differentials.clone(),
        (None, None) => {
            return Err(ApiError::bad_request(
                "differentials_required",
                "give differentials for a curve that is not a Klein model",
            ))
        }
    };
    let periods = period_matrices_lifted(curve, &diffs, set.lifted()?, tol)?;
    Ok(PeriodsResponse { cycles: set.id.clone(), periods })
}

// ---- Klein reference data ----

pub fn klein_reference() -> ReferenceMatrices {
    reference_matrices()
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KleinVerifyRequest {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KleinVerifyResponse {
    pub passed: bool,
    pub tolerance: f64,
    pub reports: Vec<VerificationReport>,
    #[serde(with = "cjson::matrix")]
    pub tau: DMatrix<Complex64>,
}

/// Every Klein check, followed by the computed period matrix.
pub fn klein_verify(req: KleinVerifyRequest) -> Result<KleinVerifyResponse, ApiError> {
    let tol = check_tol(req.tol.unwrap_or(VERIFY_TOL))?;
    let wb = KleinWorkbench::new(tol * 1e-2)?;
    let mut reports = vec![verify_monodromy()];
    reports.extend(verify_with(&wb, tol));
    Ok(KleinVerifyResponse { passed: reports.iter().all(|r| r.passed), tolerance: tol, reports, tau: wb.periods.tau })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn request_errors_are_classified() {
        let e = parse_request::<CurveRequest>(b"{\"model\":").unwrap_err();
        assert_eq!((e.status, e.error.as_str()), (400, "invalid_json"));
        let e = parse_request::<CurveRequest>(b"{\"model\": 3}").unwrap_err();
        assert_eq!((e.status, e.error.as_str()), (400, "invalid_request"));
    }

    #[test]
    fn model_base_point_must_match() {
        let req = CurveRequest {
            model: Some("klein-ts".into()),
            basepoint: Some(ComplexJson { re: 0.25, im: 0.0 }),
            ..Default::default()
        };
        assert_eq!(req.build().unwrap_err().error, "invalid_input");
        let req = CurveRequest {
            model: Some("klein-ts".into()),
            basepoint: Some(ComplexJson { re: 0.5, im: 0.0 }),
            ..Default::default()
        };
        assert_eq!(req.build().unwrap().0, "klein-ts");
    }

    #[test]
    fn payload_is_compact_with_newline() {
        assert_eq!(payload(&serde_json::json!({"a": 1, "b": [2, 3]})), "{\"a\":1,\"b\":[2,3]}\n");
    }
}
