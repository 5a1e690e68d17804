//! Adaptive Gauss–Legendre quadrature for vector-valued complex integrands.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Low and high orders compared on each interval.
pub const LOW_ORDER: usize = 20;
pub const HIGH_ORDER: usize = 30;
/// Maximum bisection depth per edge.
const MAX_DEPTH: usize = 24;

/// Nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // P_n and P_n' by the three-term recurrence
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else { p1 };
            dp = n as f64 * (x * pn - p0) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn rule(n: usize) -> &'static (Vec<f64>, Vec<f64>) {
    static LOW: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    static HIGH: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    match n {
        LOW_ORDER => LOW.get_or_init(|| gauss_legendre(LOW_ORDER)),
        HIGH_ORDER => HIGH.get_or_init(|| gauss_legendre(HIGH_ORDER)),
        _ => unreachable!("only the two fixed orders are cached"),
    }
}

fn apply_rule<F>(f: &mut F, a: f64, b: f64, n: usize, dim: usize) -> Result<Vec<C64>>
where
    F: FnMut(f64) -> Result<Vec<C64>>,
{
    let (nodes, weights) = rule(n);
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    let mut acc = vec![C64::new(0.0, 0.0); dim];
    for (x, w) in nodes.iter().zip(weights) {
        let v = f(mid + half * x)?;
        for (s, vi) in acc.iter_mut().zip(v) {
            *s += vi * (w * half);
        }
    }
    Ok(acc)
}

/// Outcome of an adaptive integration.
#[derive(Clone, Debug)]
pub struct Quadrature {
    pub value: Vec<C64>,
    /// Sum of accepted `|high - low|` differences (max over components).
    pub error: f64,
    pub intervals: usize,
}

/// Integrate `f` over `[0, 1]`, bisecting until both orders agree within
/// `tol` on every accepted interval (tolerance split evenly on bisection).
/// `label` identifies the integration edge in error reports.
pub fn integrate<F>(mut f: F, dim: usize, tol: f64, label: usize) -> Result<Quadrature>
where
    F: FnMut(f64) -> Result<Vec<C64>>,
{
    let mut out = Quadrature { value: vec![C64::new(0.0, 0.0); dim], error: 0.0, intervals: 0 };
    let mut stack = vec![(0.0, 1.0, tol, 0usize)];
    while let Some((a, b, t, depth)) = stack.pop() {
        let lo = apply_rule(&mut f, a, b, LOW_ORDER, dim)?;
        let hi = apply_rule(&mut f, a, b, HIGH_ORDER, dim)?;
        let diff = lo.iter().zip(&hi).map(|(l, h)| (l - h).norm()).fold(0.0, f64::max);
        if !diff.is_finite() {
            return Err(Error::Quadrature { edge: label, estimate: diff });
        }
        if diff <= t {
            for (s, h) in out.value.iter_mut().zip(hi) {
                *s += h;
            }
            out.error += diff;
            out.intervals += 1;
        } else if depth >= MAX_DEPTH {
            return Err(Error::Quadrature { edge: label, estimate: diff });
        } else {
            let m = 0.5 * (a + b);
            stack.push((m, b, 0.5 * t, depth + 1));
            stack.push((a, m, 0.5 * t, depth + 1));
        }
    }
    Ok(out)
}
