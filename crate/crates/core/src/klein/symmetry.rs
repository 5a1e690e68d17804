//! The order-3, order-7 and involutive automorphisms and the
//! antiholomorphic involution, with their expected homology and
//! differential actions.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::{convert, rho, zeta, KleinConstants, ModelId};
use crate::cjson;
use crate::error::{Error, Result};
use crate::homology::CurveMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SymmetryId {
    Order3,
    Antiholo,
    Order7,
    Involution,
}

impl SymmetryId {
    pub const ALL: [SymmetryId; 4] =
        [SymmetryId::Order3, SymmetryId::Antiholo, SymmetryId::Order7, SymmetryId::Involution];

    pub fn as_str(self) -> &'static str {
        match self {
            SymmetryId::Order3 => "order3",
            SymmetryId::Antiholo => "antiholo",
            SymmetryId::Order7 => "order7",
            SymmetryId::Involution => "involution",
        }
    }

    pub fn order(self) -> u32 {
        match self {
            SymmetryId::Order3 => 3,
            SymmetryId::Order7 => 7,
            SymmetryId::Antiholo | SymmetryId::Involution => 2,
        }
    }

    pub fn holomorphic(self) -> bool {
        self != SymmetryId::Antiholo
    }
}

impl fmt::Display for SymmetryId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SymmetryId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        SymmetryId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::Input(format!("unknown symmetry '{s}'")))
    }
}

/// The symmetry acting on `(x, y)`.
pub fn map_xy(id: SymmetryId, x: C64, y: C64) -> (C64, C64) {
    match id {
        SymmetryId::Order3 => (y / x, x.inv()),
        SymmetryId::Antiholo => (x.conj(), y.conj()),
        SymmetryId::Order7 => (zeta().powu(5) * x, zeta().powu(4) * y),
        SymmetryId::Involution => {
            let k = KleinConstants::new();
            let (a, b, c) = (k.alpha, k.beta, k.gamma);
            let big_x = x * a + y * b + c;
            let big_y = x * b + y * c + a;
            let big_z = x * c + y * a + b;
            (big_x / big_z, big_y / big_z)
        }
    }
}

/// The symmetry acting on `(z, w)`.
pub fn map_zw(id: SymmetryId, z: C64, w: C64) -> (C64, C64) {
    let r = rho();
    match id {
        SymmetryId::Order3 => (r * r * z, r * r * (z - 1.0) * (z - r) * (z - r * r).powu(2) / w.powu(3)),
        SymmetryId::Antiholo => (z.conj().inv(), -r * w.conj() / z.conj()),
        SymmetryId::Order7 => (z, zeta() * w),
        SymmetryId::Involution => {
            let (x, y) = convert(ModelId::Zw, ModelId::Xy, z, w);
            let (x2, y2) = map_xy(id, x, y);
            convert(ModelId::Xy, ModelId::Zw, x2, y2)
        }
    }
}

/// A symmetry as a [`CurveMap`] on one model.
#[derive(Clone, Copy, Debug)]
pub struct SymmetryMap {
    pub id: SymmetryId,
    pub model: ModelId,
}

impl CurveMap for SymmetryMap {
    fn apply(&self, a: C64, b: C64) -> (C64, C64) {
        match self.model {
            ModelId::Zw => map_zw(self.id, a, b),
            ModelId::Xy => map_xy(self.id, a, b),
            ModelId::Ts => {
                let (z, w) = convert(ModelId::Ts, ModelId::Zw, a, b);
                let (z2, w2) = map_zw(self.id, z, w);
                convert(ModelId::Zw, ModelId::Ts, z2, w2)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KleinSymmetry {
    pub id: SymmetryId,
    pub holomorphic: bool,
    pub order: u32,
    /// Action on `(a_1, a_2, a_3, b_1, b_2, b_3)` of the adapted basis.
    #[serde(with = "cjson::int_matrix")]
    pub expected_m: DMatrix<i64>,
    /// Column `j` holds the coefficients of the pullback of `omega_j`; for the
    /// antiholomorphic map the pullback is conjugate-linear.
    #[serde(with = "cjson::matrix")]
    pub expected_l: DMatrix<C64>,
}

fn int6(rows: [[i64; 6]; 6]) -> DMatrix<i64> {
    DMatrix::from_fn(6, 6, |i, j| rows[i][j])
}

pub fn expected_m(id: SymmetryId) -> DMatrix<i64> {
    match id {
        SymmetryId::Order3 => int6([
            [0, 1, 0, 0, 0, 0],
            [0, 0, 1, 0, 0, 0],
            [1, 0, 0, 0, 0, 0],
            [0, 0, 0, 0, 1, 0],
            [0, 0, 0, 0, 0, 1],
            [0, 0, 0, 1, 0, 0],
        ]),
        SymmetryId::Antiholo => int6([
            [0, 0, 0, -1, 0, 0],
            [0, 0, 0, 0, -1, 0],
            [0, 0, 0, 0, 0, -1],
            [-1, 0, 0, 0, 0, 0],
            [0, -1, 0, 0, 0, 0],
            [0, 0, -1, 0, 0, 0],
        ]),
        SymmetryId::Order7 => int6([
            [1, 0, -1, 1, 0, -1],
            [0, 0, 0, 0, 1, 0],
            [-1, 0, -1, 0, 1, 0],
            [-1, 0, 0, 0, 1, 0],
            [0, -1, -1, 1, 0, 0],
            [1, 0, 0, 0, 0, -1],
        ]),
        SymmetryId::Involution => int6([
            [0, 0, -1, 0, 0, 0],
            [0, -1, 0, 0, 0, 0],
            [-1, 0, 0, 0, 0, 0],
            [0, 0, 0, 0, 0, -1],
            [0, 0, 0, 0, -1, 0],
            [0, 0, 0, -1, 0, 0],
        ]),
    }
}

pub fn expected_l(id: SymmetryId) -> DMatrix<C64> {
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    match id {
        // omega_1 -> omega_2 -> omega_3 -> omega_1
        SymmetryId::Order3 => DMatrix::from_row_slice(3, 3, &[zero, zero, one, one, zero, zero, zero, one, zero]),
        SymmetryId::Antiholo => DMatrix::identity(3, 3),
        SymmetryId::Order7 => {
            let z = zeta();
            DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![z * z, z, z.powu(4)]))
        }
        SymmetryId::Involution => {
            let k = KleinConstants::new();
            let (a, b, c) = (C64::from(k.alpha), C64::from(k.beta), C64::from(k.gamma));
            DMatrix::from_row_slice(3, 3, &[a, b, c, b, c, a, c, a, b])
        }
    }
}

pub fn symmetry(id: SymmetryId) -> KleinSymmetry {
    KleinSymmetry {
        id,
        holomorphic: id.holomorphic(),
        order: id.order(),
        expected_m: expected_m(id),
        expected_l: expected_l(id),
    }
}

pub fn symmetries() -> Vec<KleinSymmetry> {
    SymmetryId::ALL.into_iter().map(symmetry).collect()
}
