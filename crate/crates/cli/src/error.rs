//! Errors shared by the command line and the HTTP service.

use periodlab::homology::{CycleValidation, LiftReport};
use periodlab::Error;
use serde::Serialize;

/// Machine-readable failure; `status` is the HTTP code, the rest is the body.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ApiError {
    #[serde(skip)]
    pub status: u16,
    pub error: String,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub segment: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cycle: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vertices: Option<Vec<usize>>,
    /// Sheets reached before a lift failed.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sheets: Option<Vec<usize>>,
}

impl ApiError {
    fn new(status: u16, reason: &str, message: impl Into<String>) -> Self {
        Self {
            status,
            error: reason.into(),
            message: message.into(),
            segment: None,
            cycle: None,
            vertices: None,
            sheets: None,
        }
    }

    pub fn bad_request(reason: &str, message: impl Into<String>) -> Self {
        Self::new(400, reason, message)
    }

    pub fn unprocessable(reason: &str, message: impl Into<String>) -> Self {
        Self::new(422, reason, message)
    }

    pub fn internal(message: impl Into<String>) -> Self {
        Self::new(500, "internal", message)
    }

    pub fn is_usage(&self) -> bool {
        self.status == 400
    }

    /// A lift that stopped part way.
    pub fn lift_failed(report: &LiftReport) -> Self {
        let f = report.failure.as_ref();
        let mut e = Self::unprocessable(
            f.map_or("lift_failed", |f| f.kind.as_str()),
            f.map_or_else(|| "lift failed".to_string(), |f| f.message.clone()),
        );
        e.segment = f.map(|f| f.segment);
        e.sheets = Some(report.sheets.clone());
        e
    }

    /// A stored cycle that fails validation.
    pub fn invalid_cycle(v: &CycleValidation) -> Self {
        let segment =
            v.failure.as_ref().map(|f| f.segment).or_else(|| v.edges.iter().find(|e| !e.ok).map(|e| e.segment));
        let why = match (&v.failure, v.closed) {
            (Some(f), _) => f.message.clone(),
            (None, false) => format!("does not close: returns on sheet {:?}", v.end_sheet),
            (None, true) => {
                format!("stored sheets disagree with continuation at vertices {:?}", v.inconsistent_vertices)
            }
        };
        let mut e = Self::unprocessable("invalid_cycle", format!("cycle {:?}: {why}", v.name));
        e.segment = segment;
        e.cycle = Some(v.name.clone());
        if !v.inconsistent_vertices.is_empty() {
            e.vertices = Some(v.inconsistent_vertices.clone());
        }
        e
    }
}

impl std::fmt::Display for ApiError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.error, self.message)?;
        if let Some(s) = self.segment {
            write!(f, " (segment {s})")?;
        }
        Ok(())
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        let reason = match &e {
            Error::Parse(_) => "parse_error",
            Error::Input(_) => "invalid_input",
            Error::NotACover(_) => "not_a_cover",
            Error::NotSquarefree => "not_squarefree",
            Error::Labeling { .. } => "labeling",
            Error::SheetIndex(_) => "sheet_index",
            Error::NearBranchPoint { .. } => "branch_point",
            Error::InvalidCycle { .. } => "invalid_cycle",
            Error::NotCanonical => "not_canonical",
            Error::NotSymplectic(_) => "not_symplectic",
            Error::Dimension(_) => "dimension",
            _ => "computation_failed",
        };
        let status = match e {
            Error::Parse(_)
            | Error::Input(_)
            | Error::NotACover(_)
            | Error::NotSquarefree
            | Error::Labeling { .. }
            | Error::SheetIndex(_) => 400,
            _ => 422,
        };
        Self::new(status, reason, e.to_string())
    }
}
