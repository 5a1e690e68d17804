//! Published period matrices of the quartic and the integer symplectic
//! transforms relating them to the adapted-basis period matrix.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::Serialize;

use super::e_const;
use super::symmetry::{symmetries, KleinSymmetry};
use crate::cjson;

fn s7() -> f64 {
    7f64.sqrt()
}

/// `a + b i sqrt 7`.
fn q(a: f64, b: f64) -> C64 {
    C64::new(a, b * s7())
}

fn cmat(rows: [[C64; 3]; 3], scale: C64) -> DMatrix<C64> {
    DMatrix::from_fn(3, 3, |i, j| rows[i][j] * scale)
}

fn imat(rows: [[i64; 6]; 6]) -> DMatrix<i64> {
    DMatrix::from_fn(6, 6, |i, j| rows[i][j])
}

/// `(1/2) [[e,1,1],[1,e,1],[1,1,e]]` with `e = (-1 + i sqrt 7)/2`.
pub fn tau_adapted() -> DMatrix<C64> {
    let e = e_const();
    let one = C64::new(1.0, 0.0);
    cmat([[e, one, one], [one, e, one], [one, one, e]], C64::new(0.5, 0.0))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReferenceTransform {
    pub name: &'static str,
    /// Takes the adapted-basis period matrix to `tau`.
    #[serde(with = "cjson::int_matrix")]
    pub m: DMatrix<i64>,
    #[serde(with = "cjson::matrix")]
    pub tau: DMatrix<C64>,
}

/// Rauch–Lewittes basis.
pub fn rauch_lewittes() -> ReferenceTransform {
    ReferenceTransform {
        name: "rauch_lewittes",
        m: imat([
            [1, -1, 0, 1, -1, 0],
            [0, -1, 1, 0, -1, 1],
            [-1, -1, 0, 0, 0, 1],
            [0, 1, 0, 0, 0, -1],
            [0, 0, 0, 0, 0, 1],
            [-1, 0, 0, -1, 0, 0],
        ]),
        tau: cmat(
            [
                [q(-1.0, 3.0) / 8.0, q(-1.0, -1.0) / 4.0, q(-3.0, 1.0) / 8.0],
                [q(-1.0, -1.0) / 4.0, q(1.0, 1.0) / 2.0, q(-1.0, -1.0) / 4.0],
                [q(-3.0, 1.0) / 8.0, q(-1.0, -1.0) / 4.0, q(7.0, 3.0) / 8.0],
            ],
            C64::new(1.0, 0.0),
        ),
    }
}

pub fn reference_transforms() -> Vec<ReferenceTransform> {
    vec![
        rauch_lewittes(),
        ReferenceTransform {
            name: "yoshida",
            m: imat([
                [0, 0, 0, -1, 0, 0],
                [0, 1, 0, 0, 0, -1],
                [0, 0, 1, 0, -1, 1],
                [1, 1, 0, 0, 0, -1],
                [0, 1, 1, -1, 0, 0],
                [0, 1, 0, 0, 0, 0],
            ]),
            tau: cmat(
                [
                    [q(0.0, 6.0), q(7.0, 3.0), q(0.0, 2.0)],
                    [q(7.0, 3.0), q(7.0, 5.0), q(7.0, 1.0)],
                    [q(0.0, 2.0), q(7.0, 1.0), q(7.0, 3.0)],
                ],
                C64::new(1.0 / 14.0, 0.0),
            ),
        },
        ReferenceTransform {
            name: "tadokoro",
            m: imat([
                [0, 0, 0, 1, 0, 0],
                [0, -1, 1, 0, -1, 1],
                [0, 1, 0, -1, 0, -1],
                [-1, 1, 0, -1, 1, 0],
                [0, 1, 0, -1, 0, 0],
                [0, 1, 1, -1, 0, 0],
            ]),
            tau: cmat(
                [
                    [q(-1.0, 3.0), q(-3.0, 1.0), q(2.0, 2.0)],
                    [q(-3.0, 1.0), q(-1.0, 3.0), q(2.0, 2.0)],
                    [q(2.0, 2.0), q(2.0, 2.0), q(4.0, 4.0)],
                ],
                C64::new(1.0 / 8.0, 0.0),
            ),
        },
        // corrected 2 tau_3 terms
        ReferenceTransform {
            name: "tretkoff",
            m: imat([
                [0, 0, -1, 1, 0, 0],
                [0, 1, 1, -1, 0, 0],
                [0, 0, -1, 0, 0, 0],
                [-1, 0, -1, 1, 1, 0],
                [0, 0, 0, 0, 1, 0],
                [1, 0, 0, 0, 0, -1],
            ]),
            tau: cmat(
                [
                    [q(7.0, 3.0), q(-3.0, 1.0), q(-5.0, -1.0)],
                    [q(-3.0, 1.0), q(-1.0, 3.0), q(-3.0, 1.0)],
                    [q(-5.0, -1.0), q(-3.0, 1.0), q(-1.0, 3.0)],
                ],
                C64::new(1.0 / 8.0, 0.0),
            ),
        },
        // corrected real parts
        ReferenceTransform {
            name: "schindler",
            m: imat([
                [1, 0, 0, 0, -1, 0],
                [0, -1, -1, 1, 0, 1],
                [0, -2, -1, 2, 0, 1],
                [-1, 0, -1, 1, 1, 1],
                [2, 1, 1, -1, -1, -3],
                [-1, 0, 0, 0, 0, 1],
            ]),
            tau: cmat(
                [
                    [q(-14.0, 6.0), q(21.0, -5.0), q(-7.0, 3.0)],
                    [q(21.0, -5.0), q(-42.0, 10.0), q(14.0, -6.0)],
                    [q(-7.0, 3.0), q(14.0, -6.0), q(-7.0, 5.0)],
                ],
                C64::new(1.0 / 14.0, 0.0),
            ),
        },
        ReferenceTransform {
            name: "rga",
            m: imat([
                [0, 0, 1, -1, 0, 0],
                [0, 1, 1, -1, 0, 0],
                [0, 0, 1, 0, 0, 0],
                [1, -1, 1, -1, -1, 0],
                [0, 2, 0, -1, 1, 0],
                [-1, -1, 1, 1, 0, 1],
            ]),
            tau: {
                let c = C64::new(1.0, 0.0);
                cmat([[c * 3.0, -c, -c], [-c, c * 3.0, -c], [-c, -c, c * 3.0]], q(5.0, 1.0) / 2.0)
            },
        },
    ]
}

/// Everything served as reference data.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReferenceMatrices {
    #[serde(with = "cjson::matrix")]
    pub tau_adapted: DMatrix<C64>,
    pub transforms: Vec<ReferenceTransform>,
    pub symmetries: Vec<KleinSymmetry>,
}

pub fn reference_matrices() -> ReferenceMatrices {
    ReferenceMatrices { tau_adapted: tau_adapted(), transforms: reference_transforms(), symmetries: symmetries() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::is_symplectic;
    use crate::periods::check_riemann_conditions;

    #[test]
    fn stored_data_is_well_formed() {
        assert!(check_riemann_conditions(&tau_adapted(), 1e-14).passed);
        for t in reference_transforms() {
            assert!(is_symplectic(&t.m), "{}", t.name);
            let r = check_riemann_conditions(&t.tau, 1e-14);
            assert!(r.symmetry_error == 0.0 && r.min_imag_eigenvalue > 0.0, "{}", t.name);
        }
    }
}
