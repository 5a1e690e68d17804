//! The cycle file: a curve, its base point and a list of named cycles.
//!
//! ```json
//! {"curve": "klein-zw", "basepoint": {"re": 0.0, "im": 0.0},
//!  "cycles": [{"name": "a1", "points": [{"re": 0.1, "im": 0.2, "sheet": 0}]}]}
//! ```
//!
//! `curve` is either a model name (`klein-xy`, `klein-ts`, `klein-zw`) or a
//! polynomial in the expression grammar.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::algcurve::PlaneCurve;
use crate::cjson;
use crate::error::{Error, Result};
use crate::homology::{HomologyBasis, SurfaceCycle};
use crate::klein::{model, ModelId};
use crate::parse::{parse_polynomial, Constants};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CycleFile {
    pub curve: String,
    #[serde(with = "cjson")]
    pub basepoint: C64,
    pub cycles: Vec<SurfaceCycle>,
}

impl CycleFile {
    pub fn new(curve: impl Into<String>, basepoint: C64, cycles: Vec<SurfaceCycle>) -> Self {
        Self { curve: curve.into(), basepoint, cycles }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Input(format!("cycle file: {e}")))
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("cycle file serializes")
    }

    /// The file's curve with its base point.
    pub fn plane_curve(&self) -> Result<PlaneCurve> {
        resolve_curve(&self.curve, Some(self.basepoint))
    }

    pub fn cycle(&self, name: &str) -> Option<&SurfaceCycle> {
        self.cycles.iter().find(|c| c.name == name)
    }

    /// First half of the cycles as `a`, second half as `b`.
    pub fn basis(&self) -> Result<HomologyBasis> {
        HomologyBasis::from_cycles(self.cycles.clone())
    }

    pub fn from_basis(curve: impl Into<String>, basepoint: C64, basis: &HomologyBasis) -> Self {
        Self::new(curve, basepoint, basis.cycles().cloned().collect())
    }
}

/// Curve from a model name or polynomial text. A Klein model keeps its own
/// base point and labels; a given base point must then agree with it.
pub fn resolve_curve(text: &str, base: Option<C64>) -> Result<PlaneCurve> {
    if let Ok(id) = text.parse::<ModelId>() {
        let curve = &model(id).curve;
        if let Some(b) = base {
            if (b - curve.base_point()).norm() > 1e-12 * (1.0 + b.norm()) {
                return Err(Error::Input(format!(
                    "base point {b} differs from the {id} base point {}",
                    curve.base_point()
                )));
            }
        }
        return Ok(curve.clone());
    }
    let f = parse_polynomial(text, &Constants::default())?;
    match base {
        Some(b) => PlaneCurve::with_base(f, b, None),
        None => PlaneCurve::new(f),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_lossless() {
        let f = CycleFile::new(
            "y^2 - x",
            C64::new(1.0, 0.0),
            vec![SurfaceCycle::new("a", [(C64::new(1.0, 0.0), 0), (C64::new(0.1 + 0.2, 1.2121320343559645), 1)])],
        );
        let back = CycleFile::from_json(&f.to_json_pretty()).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn model_base_point_is_enforced() {
        assert!(resolve_curve("klein-zw", Some(C64::new(0.0, 0.0))).is_ok());
        assert!(matches!(resolve_curve("klein-zw", Some(C64::new(0.5, 0.0))), Err(Error::Input(_))));
    }

    #[test]
    fn malformed_files_are_rejected() {
        for text in ["", "{}", r#"{"curve":"y^2-x","basepoint":{"re":1},"cycles":[]}"#, r#"{"curve":1}"#] {
            assert!(CycleFile::from_json(text).is_err(), "{text}");
        }
    }
}
