//! Klein's quartic in three plane models, with its symmetries, homology
//! bases, reference data and closed-form constants.

pub mod basis;
pub mod reference;
pub mod symmetry;
pub mod verify;

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::algcurve::PlaneCurve;
use crate::cjson;
use crate::error::{Error, Result};
use crate::homology::CurveMap;
use crate::parse::{parse_polynomial, Constants};
use crate::periods::Differential;

pub fn rho() -> C64 {
    C64::from_polar(1.0, 2.0 * PI / 3.0)
}

pub fn zeta() -> C64 {
    C64::from_polar(1.0, 2.0 * PI / 7.0)
}

/// `(-1 + i sqrt 7) / 2`.
pub fn e_const() -> C64 {
    C64::new(-0.5, 7f64.sqrt() / 2.0)
}

/// Closed-form constants attached to the period matrix and the involution.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KleinConstants {
    #[serde(with = "cjson")]
    pub rho: C64,
    #[serde(with = "cjson")]
    pub zeta: C64,
    #[serde(with = "cjson")]
    pub e: C64,
    /// `|X| / |Z| = 2 cos(2 pi / 7)`.
    pub mu: f64,
    /// `|Y| / |Z| = 1 + mu`.
    pub nu: f64,
    /// `|Z| = 2 sin(pi/7) Gamma(8/7) Gamma(4/7) / Gamma(5/7)`.
    pub r3: f64,
    /// `B(4/7, 1/7) (zeta^{-1} - 1) / 7`.
    #[serde(with = "cjson")]
    pub z_value: C64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl KleinConstants {
    pub fn new() -> Self {
        use statrs::function::beta::beta;
        use statrs::function::gamma::gamma;
        let z = zeta();
        let mu = 2.0 * (2.0 * PI / 7.0).cos();
        let theta = 2.0 / 3.0 * (3.0 * 3f64.sqrt()).atan();
        let s3 = 3f64.sqrt();
        Self {
            rho: rho(),
            zeta: z,
            e: e_const(),
            mu,
            nu: 1.0 + mu,
            r3: 2.0 * (PI / 7.0).sin() * gamma(8.0 / 7.0) * gamma(4.0 / 7.0) / gamma(5.0 / 7.0),
            z_value: (z.inv() - 1.0) * (beta(4.0 / 7.0, 1.0 / 7.0) / 7.0),
            alpha: (theta.cos() - s3 * theta.sin() - 1.0) / 3.0,
            beta: (-2.0 * theta.cos() - 1.0) / 3.0,
            gamma: (theta.cos() + s3 * theta.sin() - 1.0) / 3.0,
        }
    }

    /// Expected `X, Y, Z`: moduli `mu r3, nu r3, r3` at phases
    /// `-pi/14, -11 pi/14, -9 pi/14`.
    pub fn expected_xyz(&self) -> [C64; 3] {
        [
            C64::from_polar(self.mu * self.r3, -PI / 14.0),
            C64::from_polar(self.nu * self.r3, -11.0 * PI / 14.0),
            C64::from_polar(self.r3, -9.0 * PI / 14.0),
        ]
    }
}

impl Default for KleinConstants {
    fn default() -> Self {
        Self::new()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelId {
    Xy,
    Ts,
    Zw,
}

impl ModelId {
    pub const ALL: [ModelId; 3] = [ModelId::Xy, ModelId::Ts, ModelId::Zw];

    pub fn as_str(self) -> &'static str {
        match self {
            ModelId::Xy => "xy",
            ModelId::Ts => "ts",
            ModelId::Zw => "zw",
        }
    }

    /// Identifier accepted wherever a curve can be given by name.
    pub fn model_name(self) -> &'static str {
        match self {
            ModelId::Xy => "klein-xy",
            ModelId::Ts => "klein-ts",
            ModelId::Zw => "klein-zw",
        }
    }

    pub fn vars(self) -> (&'static str, &'static str) {
        match self {
            ModelId::Xy => ("x", "y"),
            ModelId::Ts => ("t", "s"),
            ModelId::Zw => ("z", "w"),
        }
    }

    pub fn polynomial_text(self) -> &'static str {
        match self {
            ModelId::Xy => "x^3*y + y^3 + x",
            ModelId::Ts => "s^7 - t*(t-1)^2",
            ModelId::Zw => "w^7 - (z-1)*(z-rho)^2*(z-rho2)^4",
        }
    }
}

impl fmt::Display for ModelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.model_name())
    }
}

impl FromStr for ModelId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "xy" | "klein-xy" => Ok(ModelId::Xy),
            "ts" | "klein-ts" => Ok(ModelId::Ts),
            "zw" | "klein-zw" => Ok(ModelId::Zw),
            other => Err(Error::Input(format!("unknown model '{other}' (expected klein-xy, klein-ts or klein-zw)"))),
        }
    }
}

pub struct KleinModel {
    pub id: ModelId,
    pub curve: PlaneCurve,
    /// The model's forms of the three holomorphic differentials.
    pub differentials: Vec<Differential>,
}

fn diff(num: &str, den: &str, id: ModelId) -> Differential {
    Differential::parse(num, den, id.vars(), &Constants::default()).expect("built-in differential parses")
}

/// Holomorphic differentials in each model, all pullbacks of the `(x, y)` forms.
pub fn differentials(id: ModelId) -> Vec<Differential> {
    match id {
        ModelId::Xy => vec![diff("x", "x^3 + 3*y^2", id), diff("y", "x^3 + 3*y^2", id), diff("1", "x^3 + 3*y^2", id)],
        ModelId::Ts => vec![diff("t - 1", "7*s^5", id), diff("1 - t", "7*s^6", id), diff("1", "7*s^3", id)],
        ModelId::Zw => vec![
            diff("rho*(rho-1)*(z-rho)*(z-rho2)^2", "7*w^5", id),
            diff("rho*(-1-2*rho)*(z-rho)*(z-rho2)^3", "7*w^6", id),
            diff("(rho-1)*(z-rho2)", "7*w^3", id),
        ],
    }
}

pub fn build_model(id: ModelId) -> Result<KleinModel> {
    let f = parse_polynomial(id.polynomial_text(), &Constants::default())?;
    let curve = match id {
        ModelId::Xy => PlaneCurve::new(f)?,
        ModelId::Ts => {
            // s real and positive on sheet 0 over t in (0, 1)
            let m = 0.125f64.powf(1.0 / 7.0);
            let labels = (0..7).map(|k| zeta().powu(k) * m).collect();
            PlaneCurve::with_base(f, C64::new(0.5, 0.0), Some(labels))?
        }
        ModelId::Zw => {
            let labels = (0..7).map(|k| C64::from_polar(1.0, PI * (6 * k - 1) as f64 / 21.0)).collect();
            PlaneCurve::with_base(f, C64::new(0.0, 0.0), Some(labels))?
        }
    };
    Ok(KleinModel { id, curve, differentials: differentials(id) })
}

/// Shared instance of a model.
pub fn model(id: ModelId) -> &'static KleinModel {
    static CELLS: [OnceLock<KleinModel>; 3] = [OnceLock::new(), OnceLock::new(), OnceLock::new()];
    let i = id as usize;
    CELLS[i].get_or_init(|| build_model(id).expect("built-in model constructs"))
}

pub fn xy_to_ts(x: C64, y: C64) -> (C64, C64) {
    (1.0 + x.powu(3) / (y * y), -x / y)
}

pub fn ts_to_xy(t: C64, s: C64) -> (C64, C64) {
    ((t - 1.0) / (s * s), (1.0 - t) / s.powu(3))
}

pub fn ts_to_zw(t: C64, s: C64) -> (C64, C64) {
    let r = rho();
    let d = r * t + r * r;
    ((t + r * r) / d, s * (r * r - 1.0) / d)
}

pub fn zw_to_ts(z: C64, w: C64) -> (C64, C64) {
    let r = rho();
    let d = 1.0 - r * z;
    (r * r * (z - 1.0) / d, w / d)
}

/// Birational map between any two models.
pub fn convert(from: ModelId, to: ModelId, a: C64, b: C64) -> (C64, C64) {
    let (t, s) = match from {
        ModelId::Xy => xy_to_ts(a, b),
        ModelId::Ts => (a, b),
        ModelId::Zw => zw_to_ts(a, b),
    };
    match to {
        ModelId::Xy => ts_to_xy(t, s),
        ModelId::Ts => (t, s),
        ModelId::Zw => ts_to_zw(t, s),
    }
}

/// [`convert`] as a [`CurveMap`].
#[derive(Clone, Copy, Debug)]
pub struct ModelMap {
    pub from: ModelId,
    pub to: ModelId,
}

impl CurveMap for ModelMap {
    fn apply(&self, x: C64, y: C64) -> (C64, C64) {
        convert(self.from, self.to, x, y)
    }
}
