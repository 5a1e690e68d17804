//! Simultaneous root finding for dense univariate polynomials (Aberth–Ehrlich).

use num_complex::Complex64;

use crate::poly::horner_d;

const EPS: f64 = f64::EPSILON;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NoConvergence;

/// All roots of `coeffs[0] + coeffs[1] z + ... + coeffs[n] z^n`.
///
/// `coeffs[n]` must be nonzero. `guess`, when given, must hold `n` starting
/// values (typically the roots of a nearby polynomial).
pub fn roots(coeffs: &[Complex64], guess: Option<&[Complex64]>) -> Result<Vec<Complex64>, NoConvergence> {
    let n = coeffs.len().saturating_sub(1);
    if n == 0 {
        return Ok(Vec::new());
    }
    let lead = coeffs[n];
    if lead == Complex64::new(0.0, 0.0) {
        return Err(NoConvergence);
    }
    if n == 1 {
        return Ok(vec![-coeffs[0] / lead]);
    }
    let a: Vec<Complex64> = coeffs.iter().map(|c| c / lead).collect();
    let abs_a: Vec<f64> = a.iter().map(|c| c.norm()).collect();

    let mut z: Vec<Complex64> = match guess {
        Some(g) if g.len() == n && g.iter().all(|v| v.is_finite()) => perturb_duplicates(g),
        _ => initial_circle(&abs_a),
    };
    let max_iter = if guess.is_some() { 60 } else { 1500 };
    match aberth(&a, &abs_a, &mut z, max_iter) {
        Ok(()) => Ok(z),
        Err(_) if guess.is_some() => {
            let mut z = initial_circle(&abs_a);
            aberth(&a, &abs_a, &mut z, 1500)?;
            Ok(z)
        }
        Err(e) => Err(e),
    }
}

fn initial_circle(abs_a: &[f64]) -> Vec<Complex64> {
    let n = abs_a.len() - 1;
    // radius from the geometric mean of the root moduli, clamped by the Cauchy-type bound
    let mut r = abs_a[0].powf(1.0 / n as f64);
    let bound = (0..n).map(|k| abs_a[k].powf(1.0 / (n - k) as f64)).fold(0.0_f64, f64::max);
    if !(r.is_finite() && r > 0.0) {
        r = bound.max(1.0);
    }
    r = r.min(2.0 * bound).max(1e-3 * bound).max(f64::MIN_POSITIVE);
    (0..n).map(|k| Complex64::from_polar(r, 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4)).collect()
}

fn perturb_duplicates(g: &[Complex64]) -> Vec<Complex64> {
    let mut z = g.to_vec();
    for i in 0..z.len() {
        for j in 0..i {
            if (z[i] - z[j]).norm() <= 1e-14 * (1.0 + z[j].norm()) {
                let bump = Complex64::new(1e-8, 7e-9) * (1.0 + z[i].norm());
                z[i] += bump;
            }
        }
    }
    z
}

fn aberth(a: &[Complex64], abs_a: &[f64], z: &mut [Complex64], max_iter: usize) -> Result<(), NoConvergence> {
    let n = z.len();
    let mut done = vec![false; n];
    for _ in 0..max_iter {
        let mut all_done = true;
        for i in 0..n {
            if done[i] {
                continue;
            }
            let (p, dp) = horner_d(a, z[i]);
            let zr = z[i].norm();
            let bound = horner_abs(abs_a, zr) * 4.0 * EPS * (2 * n) as f64;
            if p.norm() <= bound {
                done[i] = true;
                continue;
            }
            let ratio = p / dp;
            let mut s = Complex64::new(0.0, 0.0);
            for j in 0..n {
                if j != i {
                    let d = z[i] - z[j];
                    if d != Complex64::new(0.0, 0.0) {
                        s += d.inv();
                    }
                }
            }
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            if !w.is_finite() {
                z[i] += Complex64::new(1e-7, 1e-7) * (1.0 + zr);
                all_done = false;
                continue;
            }
            z[i] -= w;
            if w.norm() <= 2.0 * EPS * z[i].norm() {
                done[i] = true;
            } else {
                all_done = false;
            }
        }
        if all_done {
            return Ok(());
        }
    }
    Err(NoConvergence)
}

fn horner_abs(abs_a: &[f64], r: f64) -> f64 {
    abs_a.iter().rev().fold(0.0, |acc, c| acc * r + c)
}

/// Minimum pairwise distance between points.
pub fn min_separation(pts: &[Complex64]) -> f64 {
    let mut m = f64::INFINITY;
    for i in 0..pts.len() {
        for j in 0..i {
            m = m.min((pts[i] - pts[j]).norm());
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::horner;

    fn from_roots(rs: &[Complex64]) -> Vec<Complex64> {
        let mut c = vec![Complex64::new(1.0, 0.0)];
        for &r in rs {
            let mut next = vec![Complex64::new(0.0, 0.0); c.len() + 1];
            for (k, &ck) in c.iter().enumerate() {
                next[k + 1] += ck;
                next[k] -= ck * r;
            }
            c = next;
        }
        c
    }

    #[test]
    fn recovers_known_roots() {
        let rs: Vec<Complex64> = [(1.0, 0.0), (-0.5, 2.0), (0.0, -1.0), (3.0, 0.1), (-2.0, -2.0)]
            .iter()
            .map(|&(a, b)| Complex64::new(a, b))
            .collect();
        let c = from_roots(&rs);
        let found = roots(&c, None).unwrap();
        for r in &rs {
            let d = found.iter().map(|f| (f - r).norm()).fold(f64::INFINITY, f64::min);
            assert!(d < 1e-12, "{r} missed by {d}");
        }
    }

    #[test]
    fn seventh_roots_of_unity() {
        // symmetric polynomial; the rotated starting circle avoids stalling
        let mut c = vec![Complex64::new(0.0, 0.0); 8];
        c[0] = Complex64::new(-1.0, 0.0);
        c[7] = Complex64::new(1.0, 0.0);
        let found = roots(&c, None).unwrap();
        for z in &found {
            assert!((z.powu(7) - 1.0).norm() < 1e-13);
        }
        assert!(min_separation(&found) > 0.8);
    }

    #[test]
    fn multiple_root_converges() {
        let rs = vec![Complex64::new(1.0, 0.0); 6].into_iter().chain([Complex64::new(-1.0, 0.5)]).collect::<Vec<_>>();
        let c = from_roots(&rs);
        let found = roots(&c, None).unwrap();
        for z in &found {
            let v = horner(&c, *z).norm();
            assert!(v < 1e-12);
        }
    }

    #[test]
    fn warm_start() {
        let rs: Vec<Complex64> = (0..5).map(|k| Complex64::from_polar(1.0 + k as f64, k as f64)).collect();
        let c = from_roots(&rs);
        let guess: Vec<Complex64> = rs.iter().map(|r| r * 1.01).collect();
        let found = roots(&c, Some(&guess)).unwrap();
        for (f, r) in found.iter().zip(&rs) {
            assert!((f - r).norm() < 1e-12);
        }
    }
}
