//! Integer symplectic matrices and checked complex inversion.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::cjson;
use crate::error::{Error, Result};

/// Refuse inversions whose 1-norm condition estimate exceeds this.
pub const MAX_CONDITION: f64 = 1e8;

/// `J = (0 I; -I 0)` of size `2g`.
pub fn j_matrix(g: usize) -> DMatrix<i64> {
    DMatrix::from_fn(2 * g, 2 * g, |i, j| {
        if j == i + g {
            1
        } else if i == j + g {
            -1
        } else {
            0
        }
    })
}

fn check_square_even(m: &DMatrix<i64>) -> Result<usize> {
    if m.nrows() != m.ncols() || !m.nrows().is_multiple_of(2) {
        return Err(Error::Dimension(format!("expected a 2g x 2g matrix, got {} x {}", m.nrows(), m.ncols())));
    }
    Ok(m.nrows() / 2)
}

/// `M J M^T` for a square matrix of even size; `None` if an entry overflows.
pub fn symplectic_form(m: &DMatrix<i64>) -> Option<DMatrix<i64>> {
    let g = check_square_even(m).ok()?;
    let mut out = DMatrix::zeros(2 * g, 2 * g);
    for i in 0..2 * g {
        for k in 0..2 * g {
            let mut acc: i128 = 0;
            for j in 0..g {
                let t = m[(i, j)] as i128 * m[(k, j + g)] as i128 - m[(i, j + g)] as i128 * m[(k, j)] as i128;
                acc = acc.checked_add(t)?;
            }
            out[(i, k)] = i64::try_from(acc).ok()?;
        }
    }
    Some(out)
}

pub fn is_symplectic(m: &DMatrix<i64>) -> bool {
    symplectic_form(m).is_some_and(|f| f == j_matrix(m.nrows() / 2))
}

pub fn is_antisymplectic(m: &DMatrix<i64>) -> bool {
    symplectic_form(m).is_some_and(|f| f == -j_matrix(m.nrows() / 2))
}

/// A `2g x 2g` integer matrix with `M J M^T = J`, blocks `(A B; C D)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawInt", into = "RawInt")]
pub struct SymplecticMatrix {
    entries: DMatrix<i64>,
}

#[derive(Serialize, Deserialize)]
#[serde(transparent)]
struct RawInt(#[serde(with = "cjson::int_matrix")] DMatrix<i64>);

impl TryFrom<RawInt> for SymplecticMatrix {
    type Error = Error;
    fn try_from(r: RawInt) -> Result<Self> {
        Self::new(r.0)
    }
}

impl From<SymplecticMatrix> for RawInt {
    fn from(m: SymplecticMatrix) -> Self {
        RawInt(m.entries)
    }
}

impl SymplecticMatrix {
    pub fn new(entries: DMatrix<i64>) -> Result<Self> {
        check_square_even(&entries)?;
        if !is_symplectic(&entries) {
            let detail = match symplectic_form(&entries) {
                Some(f) => format!("M J M^T - J = {}", f - j_matrix(entries.nrows() / 2)),
                None => "M J M^T overflows".to_string(),
            };
            return Err(Error::NotSymplectic(detail));
        }
        Ok(Self { entries })
    }

    pub fn from_rows(rows: &[&[i64]]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Dimension("matrix rows must have equal length".into()));
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn identity(g: usize) -> Self {
        Self { entries: DMatrix::identity(2 * g, 2 * g) }
    }

    pub fn genus(&self) -> usize {
        self.entries.nrows() / 2
    }

    pub fn entries(&self) -> &DMatrix<i64> {
        &self.entries
    }

    pub fn into_entries(self) -> DMatrix<i64> {
        self.entries
    }

    fn block(&self, r: usize, c: usize) -> DMatrix<i64> {
        let g = self.genus();
        self.entries.view((r * g, c * g), (g, g)).into_owned()
    }

    pub fn a(&self) -> DMatrix<i64> {
        self.block(0, 0)
    }

    pub fn b(&self) -> DMatrix<i64> {
        self.block(0, 1)
    }

    pub fn c(&self) -> DMatrix<i64> {
        self.block(1, 0)
    }

    pub fn d(&self) -> DMatrix<i64> {
        self.block(1, 1)
    }

    pub fn mul(&self, other: &SymplecticMatrix) -> SymplecticMatrix {
        SymplecticMatrix { entries: &self.entries * &other.entries }
    }

    pub fn pow(&self, k: u32) -> SymplecticMatrix {
        (0..k).fold(Self::identity(self.genus()), |acc, _| acc.mul(self))
    }

    /// `M^{-1} = -J M^T J`.
    pub fn inverse(&self) -> SymplecticMatrix {
        let j = j_matrix(self.genus());
        SymplecticMatrix { entries: -(&j * self.entries.transpose() * &j) }
    }
}

pub fn to_complex(m: &DMatrix<i64>) -> DMatrix<C64> {
    m.map(|v| C64::new(v as f64, 0.0))
}

pub fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

fn one_norm(m: &DMatrix<C64>) -> f64 {
    m.column_iter().map(|c| c.iter().map(|v| v.norm()).sum::<f64>()).fold(0.0, f64::max)
}

/// Inverse by partial-pivot LU together with the 1-norm condition number.
pub fn invert(m: &DMatrix<C64>) -> Result<(DMatrix<C64>, f64)> {
    if m.nrows() != m.ncols() {
        return Err(Error::Dimension(format!("cannot invert a {} x {} matrix", m.nrows(), m.ncols())));
    }
    let inv = m.clone().lu().try_inverse().ok_or(Error::Singular(f64::INFINITY))?;
    let cond = one_norm(m) * one_norm(&inv);
    if !cond.is_finite() || cond > MAX_CONDITION {
        return Err(Error::Singular(cond));
    }
    Ok((inv, cond))
}

/// Round a real matrix to integers, failing if any entry is not integral.
pub fn round_exact(m: &DMatrix<f64>, tol: f64) -> Result<DMatrix<i64>> {
    let mut out = DMatrix::zeros(m.nrows(), m.ncols());
    for (o, v) in out.iter_mut().zip(m.iter()) {
        let r = v.round();
        if (v - r).abs() > tol {
            return Err(Error::NonInteger(*v));
        }
        *o = r as i64;
    }
    Ok(out)
}

/// Eigenvalues of a real symmetric matrix, ascending.
pub fn symmetric_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let mut ev: Vec<f64> = m.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn j_is_symplectic() {
        let j = j_matrix(3);
        assert!(is_symplectic(&j));
        assert_eq!(&j * &j, -DMatrix::<i64>::identity(6, 6));
    }

    #[test]
    fn inverse_and_blocks() {
        let m = SymplecticMatrix::from_rows(&[&[1, 1], &[0, 1]]).unwrap();
        assert_eq!(m.mul(&m.inverse()), SymplecticMatrix::identity(1));
        assert_eq!(m.b()[(0, 0)], 1);
        assert!(SymplecticMatrix::from_rows(&[&[2, 0], &[0, 1]]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let m = SymplecticMatrix::from_rows(&[&[0, 1], &[-1, 0]]).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, "[[0,1],[-1,0]]");
        let back: SymplecticMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
        assert!(serde_json::from_str::<SymplecticMatrix>("[[1,0],[0,2]]").is_err());
        let huge = format!("[[{0},{0}],[{0},1]]", i64::MAX);
        assert!(serde_json::from_str::<SymplecticMatrix>(&huge).is_err());
    }

    #[test]
    fn ill_conditioned_refused() {
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[C64::new(1.0, 0.0), C64::new(1.0, 0.0), C64::new(1.0, 0.0), C64::new(1.0 + 1e-12, 0.0)],
        );
        assert!(matches!(invert(&m), Err(Error::Singular(_))));
        let (inv, cond) = invert(&DMatrix::identity(3, 3)).unwrap();
        assert_eq!(inv, DMatrix::identity(3, 3));
        assert!((cond - 1.0).abs() < 1e-15);
    }
}
