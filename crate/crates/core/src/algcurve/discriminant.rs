//! Zeros of the y-discriminant, grouped into distinct critical points.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::poly::BivariatePolynomial;
use crate::roots;

/// Relative size of the coefficient noise assumed when grouping roots.
const COEFF_NOISE: f64 = 1e-12;

/// Sylvester matrix of `p` and `q` (coefficients lowest degree first).
fn sylvester(p: &[C64], q: &[C64]) -> DMatrix<C64> {
    let n = p.len() - 1;
    let m = q.len() - 1;
    let size = n + m;
    let mut s = DMatrix::zeros(size, size);
    for row in 0..m {
        for (k, &c) in p.iter().rev().enumerate() {
            s[(row, row + k)] = c;
        }
    }
    for row in 0..n {
        for (k, &c) in q.iter().rev().enumerate() {
            s[(m + row, row + k)] = c;
        }
    }
    s
}

/// `Res_y(f, f_y)` at `x` and the Hadamard bound of its Sylvester matrix.
fn sylvester_det(f: &BivariatePolynomial, fy: &BivariatePolynomial, x: C64) -> (C64, f64) {
    let n = f.degree_y() as usize;
    let p = f.coeffs_in_y(x);
    let mut q = fy.coeffs_in_y(x);
    q.truncate(n);
    let s = sylvester(&p, &q);
    let hadamard: f64 = s.row_iter().map(|r| r.norm()).product();
    (s.lu().determinant(), hadamard)
}

/// Highest centred power sum used to decide whether the zeros inside a
/// contour coincide.
const SPREAD_MOMENTS: usize = 8;

/// Locate the discriminant zeros inside the circle `|x - c| = r` by contour
/// integrals of `D'/D`: returns their mean, their number and a spread
/// measure relative to `r`, `max_k (|sum (u_i - mean)^k| / m)^(1/k)` over
/// `k = 2..=min(m, SPREAD_MOMENTS)`, which vanishes only when they coincide.
fn contour_center(f: &BivariatePolynomial, c: C64, r: f64) -> Option<(C64, usize, f64)> {
    let fy = f.derivative_y();
    let k = (f.degree_x() as usize * (2 * f.degree_y() as usize - 1) + 8).max(128);
    let omega: Vec<C64> =
        (0..k).map(|j| C64::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / k as f64)).collect();
    let vals: Vec<C64> = omega.iter().map(|w| sylvester_det(f, &fy, c + r * w).0).collect();
    let mut b = vals.clone();
    FftPlanner::new().plan_fft_forward(k).process(&mut b);
    // D'(x) in terms of u = (x - c)/r, for u on the unit circle;
    // (1/2 pi i) \oint g(u) D_u/D du = mean of g(u) u D_u/D over the samples
    let ratios: Vec<C64> = omega
        .iter()
        .enumerate()
        .map(|(j, w)| {
            let mut du = C64::new(0.0, 0.0);
            let mut wp = C64::new(1.0, 0.0);
            for (m, bm) in b.iter().enumerate().skip(1) {
                du += *bm / k as f64 * m as f64 * wp;
                wp *= w;
            }
            du / vals[j] * w
        })
        .collect();
    let sum = |g: &dyn Fn(C64) -> C64| omega.iter().zip(&ratios).map(|(w, q)| g(*w) * q).sum::<C64>() / k as f64;
    let count = sum(&|_| C64::new(1.0, 0.0));
    let m = count.re.round();
    if m == 0.0 && count.norm() < 1e-3 {
        return Some((c, 0, 0.0));
    }
    if !(m >= 1.0 && (count - m).norm() < 1e-3) {
        return None;
    }
    let mean = sum(&|w| w) / m;
    let spread = (2..=(m as usize).min(SPREAD_MOMENTS))
        .map(|p| (sum(&|w| (w - mean).powu(p as u32)).norm() / m).powf(1.0 / p as f64))
        .fold(0.0, f64::max);
    Some((c + r * mean, m as usize, spread))
}

/// Coefficients (lowest first) of `Res_y(f, f_y)` as a polynomial in x, plus
/// the largest sampled magnitude (the noise reference).
pub fn discriminant(f: &BivariatePolynomial) -> Result<(Vec<C64>, f64)> {
    let n = f.degree_y() as usize;
    if n < 2 {
        return Ok((vec![C64::new(1.0, 0.0)], 1.0));
    }
    let fy = f.derivative_y();
    let bound = f.degree_x() as usize * (2 * n - 1);
    let k = bound + 8;
    let mut samples = Vec::with_capacity(k);
    let mut max_val = 0.0_f64;
    let mut max_hadamard = 0.0_f64;
    for j in 0..k {
        let x = C64::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / k as f64);
        let (d, hadamard) = sylvester_det(f, &fy, x);
        max_val = max_val.max(d.norm());
        max_hadamard = max_hadamard.max(hadamard);
        samples.push(d);
    }
    if max_val <= 1e-11 * max_hadamard {
        return Err(Error::NotSquarefree);
    }
    let mut planner = FftPlanner::new();
    // samples sit at e^{2 pi i j/k}, so the forward transform yields k * a_m
    planner.plan_fft_forward(k).process(&mut samples);
    let mut coeffs: Vec<C64> = samples.iter().map(|c| c / k as f64).collect();
    let cutoff = 1e-10 * coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.norm() <= cutoff) {
        coeffs.pop();
    }
    Ok((coeffs, max_val))
}

/// Coefficients of `p(c + t)` in `t`.
fn taylor_shift(a: &[C64], c: C64) -> Vec<C64> {
    let mut b = a.to_vec();
    let n = b.len() - 1;
    for i in 0..n {
        for j in (i..n).rev() {
            let next = b[j + 1];
            b[j] += c * next;
        }
    }
    b
}

fn taylor_shift_abs(a: &[f64], c: f64) -> Vec<f64> {
    let mut b = a.to_vec();
    let n = b.len() - 1;
    for i in 0..n {
        for j in (i..n).rev() {
            let next = b[j + 1];
            b[j] += c * next;
        }
    }
    b
}

/// Newton iteration on the `(m-1)`-th derivative, which has a simple root
/// at an `m`-fold root. The centroid of perturbed roots is only accurate to
/// a fraction of the cluster spread.
fn refine_center(a: &[C64], centroid: C64, m: usize, spread: f64) -> C64 {
    if m < 2 || a.len() <= m {
        return centroid;
    }
    let d: Vec<C64> = (0..a.len() - m + 1).map(|j| a[j + m - 1] * binom(j + m - 1, m - 1)).collect();
    let mut c = centroid;
    for _ in 0..50 {
        let (v, dv) = crate::poly::horner_d(&d, c);
        let step = v / dv;
        if !step.is_finite() {
            return centroid;
        }
        c -= step;
        if step.norm() <= 1e-15 * (1.0 + c.norm()) {
            break;
        }
    }
    if (c - centroid).norm() > 2.0 * spread + 1e-12 {
        centroid
    } else {
        c
    }
}

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// True when `c` is an `m`-fold root of `a` up to the coefficient noise.
fn consistent(a: &[C64], noise: &[f64], c: C64, m: usize) -> bool {
    let t = taylor_shift(a, c);
    let eta = taylor_shift_abs(noise, c.norm());
    (0..m).all(|k| t[k].norm() <= eta[k])
}

/// Group the computed roots of `a` into multiple roots.
///
/// A set of `m` nearby roots is accepted as one `m`-fold root when the
/// first `m` Taylor coefficients at its centroid are indistinguishable from
/// the coefficient noise. Largest accepted groups are taken first.
pub fn cluster_roots(a: &[C64], rts: &[C64], noise_level: f64, merge_tol: f64) -> Vec<(C64, usize)> {
    let n = rts.len();
    if n == 0 {
        return Vec::new();
    }
    let noise = vec![noise_level; a.len()];
    let mut options: Vec<Vec<Vec<usize>>> = Vec::with_capacity(n);
    for i in 0..n {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&p, &q| (rts[p] - rts[i]).norm().total_cmp(&(rts[q] - rts[i]).norm()));
        let dist: Vec<f64> = order.iter().map(|&j| (rts[j] - rts[i]).norm()).collect();
        let mut found = Vec::new();
        let mut sum = C64::new(0.0, 0.0);
        for m in 1..=n {
            sum += rts[order[m - 1]];
            let gap = m == n || m == 1 || dist[m] > 2.0 * dist[m - 1];
            if !gap {
                continue;
            }
            let c = refine_center(a, sum / m as f64, m, dist[m - 1]);
            if m == 1 || consistent(a, &noise, c, m) {
                found.push(order[..m].to_vec());
            }
        }
        found.reverse();
        options.push(found);
    }
    let mut seeds: Vec<usize> = (0..n).collect();
    seeds.sort_by_key(|&i| std::cmp::Reverse(options[i][0].len()));
    let mut assigned = vec![false; n];
    let mut groups: Vec<(C64, usize)> = Vec::new();
    for &seed in &seeds {
        if assigned[seed] {
            continue;
        }
        let members =
            options[seed].iter().find(|g| g.iter().all(|&j| !assigned[j])).cloned().unwrap_or_else(|| vec![seed]);
        for &j in &members {
            assigned[j] = true;
        }
        let centroid = members.iter().map(|&j| rts[j]).sum::<C64>() / members.len() as f64;
        let spread = members.iter().map(|&j| (rts[j] - centroid).norm()).fold(0.0, f64::max);
        let c = refine_center(a, centroid, members.len(), spread);
        groups.push((c, members.len()));
    }
    // final merge of near-coincident groups
    let mut merged: Vec<(C64, usize)> = Vec::new();
    for (c, m) in groups {
        let scale = 1.0 + c.norm();
        if let Some(g) = merged.iter_mut().find(|(d, _)| (d - c).norm() <= merge_tol * scale) {
            let total = g.1 + m;
            g.0 = (g.0 * g.1 as f64 + c * m as f64) / total as f64;
            g.1 = total;
        } else {
            merged.push((c, m));
        }
    }
    merged
}

/// Distinct zeros of the discriminant with their multiplicities.
pub fn critical_points(f: &BivariatePolynomial, merge_tol: f64) -> Result<Vec<(C64, usize)>> {
    let (a, max_val) = discriminant(f)?;
    if a.len() <= 1 {
        return Ok(Vec::new());
    }
    let rts = roots::roots(&a, None).map_err(|_| Error::Input("discriminant root finding did not converge".into()))?;
    let groups = cluster_roots(&a, &rts, COEFF_NOISE * max_val, merge_tol);
    Ok(merge_by_contour(f, &rts, groups))
}

/// Largest spread, relative to the contour radius, for the zeros inside a
/// contour to count as one point.
const COINCIDENT_SPREAD: f64 = 0.15;

/// Re-centre on a confirmed multiple zero with ever smaller contours; a
/// small circle keeps the dynamic range of `D` along it low.
fn shrink_contour(f: &BivariatePolynomial, mut p: C64, mut r: f64, m: usize) -> C64 {
    let floor = 1e-3 * (1.0 + p.norm());
    while r > floor {
        r = (r / 4.0).max(floor);
        match contour_center(f, p, r) {
            Some((q, count, _)) if count == m && (q - p).norm() < r => p = q,
            _ => break,
        }
    }
    p
}

/// Merge groups whose zeros a contour integral shows to coincide, and
/// refine every multiple zero by a contour around it.
///
/// Root finding on a polynomial with a high-multiplicity zero returns a
/// ring of roots whose radius grows like `noise^(1/m)`; the coefficient
/// test in [`cluster_roots`] can reject such a ring, and a root of a
/// neighbouring cluster can stray into it.
fn merge_by_contour(f: &BivariatePolynomial, rts: &[C64], groups: Vec<(C64, usize)>) -> Vec<(C64, usize)> {
    let mut left = groups;
    left.sort_by_key(|g| std::cmp::Reverse(g.1));
    let mut out: Vec<(C64, usize)> = Vec::new();
    while !left.is_empty() {
        let (c0, m0) = left[0];
        let mut order: Vec<usize> = (0..left.len()).collect();
        order.sort_by(|&p, &q| (left[p].0 - c0).norm().total_cmp(&(left[q].0 - c0).norm()));
        let dist: Vec<f64> = order.iter().map(|&j| (left[j].0 - c0).norm()).collect();
        let mut accepted: Option<(C64, f64, C64, usize)> = None;
        // widest candidate first; only prefixes followed by a clear gap
        for k in (1..=order.len()).rev() {
            if k < order.len() && dist[k] <= 2.0 * dist[k - 1] {
                continue;
            }
            let members = &order[..k];
            let weight: usize = members.iter().map(|&j| left[j].1).sum();
            if weight < 2 {
                continue;
            }
            let centroid = members.iter().map(|&j| left[j].0 * left[j].1 as f64).sum::<C64>() / weight as f64;
            let outside = order[k..].iter().map(|&j| (left[j].0 - centroid).norm()).fold(f64::INFINITY, f64::min);
            let cap = if outside.is_finite() { 0.5 * outside } else { 0.5 * (1.0 + centroid.norm()) };
            // raw roots, not group centres, set how far the cluster reaches
            let reach = members.iter().map(|&j| (left[j].0 - centroid).norm()).fold(0.0, f64::max);
            let spread = rts.iter().map(|x| (x - centroid).norm()).filter(|&e| e < cap).fold(reach, f64::max);
            let r = (2.0 * spread).max(1e-3 * (1.0 + centroid.norm())).min(cap);
            if r <= spread {
                continue;
            }
            if let Some((p, count, rel)) = contour_center(f, centroid, r) {
                if count >= 2 && rel < COINCIDENT_SPREAD && (p - centroid).norm() < r {
                    accepted = Some((centroid, r, shrink_contour(f, p, r, count), count));
                    break;
                }
            }
        }
        match accepted {
            Some((centre, r, p, count)) => {
                // the contour count accounts for every computed root inside
                out.push((p, count));
                left.retain(|g| (g.0 - centre).norm() >= r);
            }
            None => {
                out.push((c0, m0));
                left.remove(0);
            }
        }
    }
    // a root of a noisy multiple zero may end up outside the contour that
    // absorbed its cluster; no zero of D lies under it
    let all: Vec<C64> = out.iter().map(|g| g.0).collect();
    out.into_iter()
        .filter(|&(c, m)| {
            if m != 1 {
                return true;
            }
            let near = all.iter().filter(|&&q| q != c).map(|q| (q - c).norm()).fold(f64::INFINITY, f64::min);
            let r = if near.is_finite() { 0.3 * near } else { 0.5 * (1.0 + c.norm()) };
            !matches!(contour_center(f, c, r), Some((_, 0, _)))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_polynomial, Constants};

    fn crit(text: &str) -> Vec<(C64, usize)> {
        let f = parse_polynomial(text, &Constants::default()).unwrap();
        critical_points(&f, 1e-9).unwrap()
    }

    #[test]
    fn square_root_curve() {
        let c = crit("y^2 - x");
        assert_eq!(c.len(), 1);
        assert!(c[0].0.norm() < 1e-12);
    }

    #[test]
    fn hyperelliptic_quintic() {
        let c = crit("y^2 - x*(x-1)*(x-2)*(x-3)*(x-4)");
        assert_eq!(c.len(), 5);
        for k in 0..5 {
            assert!(c.iter().any(|(p, _)| (p - k as f64).norm() < 1e-9));
        }
    }

    #[test]
    fn klein_affine_discriminant() {
        // -x^2 (4 x^7 + 27): double root at 0 and a septagon
        let c = crit("x^3*y + y^3 + x");
        assert_eq!(c.len(), 8);
        let zero = c.iter().find(|(p, _)| p.norm() < 1e-6).unwrap();
        assert_eq!(zero.1, 2);
        let r = (27.0_f64 / 4.0).powf(1.0 / 7.0);
        assert_eq!(c.iter().filter(|(p, _)| (p.norm() - r).abs() < 1e-9).count(), 7);
    }

    #[test]
    fn high_multiplicity_clusters() {
        let c = crit("w^7 - (z-1)*(z-rho)^2*(z-rho2)^4");
        assert_eq!(c.len(), 3, "{c:?}");
        let rho = C64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
        for (p, m) in [(C64::new(1.0, 0.0), 6), (rho, 12), (rho * rho, 24)] {
            let g = c.iter().find(|(q, _)| (q - p).norm() < 1e-9).unwrap_or_else(|| panic!("missing {p}: {c:?}"));
            assert_eq!(g.1, m);
        }
    }

    #[test]
    fn non_squarefree_rejected() {
        let f = parse_polynomial("(y^2 - x)^2", &Constants::default()).unwrap();
        assert!(matches!(discriminant(&f), Err(Error::NotSquarefree)));
    }
}
