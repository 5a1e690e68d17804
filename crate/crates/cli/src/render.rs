//! Plain-text tables for terminal output.

use std::fmt::Write;

use nalgebra::DMatrix;
use periodlab::Complex64;

use crate::api::{
    BasisCheckResponse, CurveResponse, IntersectResponse, KleinVerifyResponse, MonodromyResponse, PeriodsResponse,
    TransformResponse,
};

fn c(z: Complex64) -> String {
    format!("{:.10}{:+.10}i", z.re, z.im)
}

fn int_matrix(out: &mut String, m: &DMatrix<i64>, labels: Option<&[String]>) {
    let w = labels.map_or(0, |l| l.iter().map(String::len).max().unwrap_or(0));
    let cell = m.iter().map(|v| v.to_string().len()).max().unwrap_or(1).max(labels.map_or(1, |_| w));
    if let Some(l) = labels {
        let _ = writeln!(out, "{:w$}  {}", "", l.iter().map(|s| format!("{s:>cell$}")).collect::<Vec<_>>().join(" "));
    }
    for (i, row) in m.row_iter().enumerate() {
        let head = labels.map_or(String::new(), |l| format!("{:w$}  ", l[i]));
        let cells: Vec<String> = row.iter().map(|v| format!("{v:>cell$}")).collect();
        let _ = writeln!(out, "{head}{}", cells.join(" "));
    }
}

fn complex_matrix(out: &mut String, m: &DMatrix<Complex64>) {
    for row in m.row_iter() {
        let cells: Vec<String> = row.iter().map(|&z| format!("{:>28}", c(z))).collect();
        let _ = writeln!(out, "  {}", cells.join(" "));
    }
}

pub fn curve(r: &CurveResponse) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "curve {}  {}", r.id, r.polynomial);
    let _ = writeln!(out, "sheets {}, genus {}, base point {}", r.sheets, r.genus, c(r.basepoint));
    let _ = writeln!(out, "\nsheet  label");
    for (k, l) in r.labels.iter().enumerate() {
        let _ = writeln!(out, "{k:>5}  {}", c(*l));
    }
    let _ = writeln!(out, "\nbranch point{:26}cycle type", "");
    for b in &r.branch_points.finite_points {
        let _ = writeln!(out, "{:<38}{:?}", c(b.point), b.cycle_type);
    }
    if r.branch_points.includes_infinity {
        let _ = writeln!(out, "{:<38}{:?}", "infinity", r.branch_points.infinity_cycle_type);
    }
    out
}

pub fn monodromy(r: &MonodromyResponse) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "curve {}", r.curve);
    let _ = writeln!(out, "{:<38}permutation", "branch point");
    for m in &r.data.finite {
        let _ = writeln!(out, "{:<38}{}", c(m.branch_point), m.perm);
    }
    let _ = writeln!(out, "{:<38}{}", "infinity", r.data.infinity);
    out
}

pub fn intersect(r: &IntersectResponse) -> String {
    format!("{} . {} = {}\n", r.pair.0, r.pair.1, r.intersection)
}

pub fn basis_check(r: &BasisCheckResponse) -> String {
    let mut out = String::new();
    int_matrix(&mut out, &r.intersection_matrix, Some(&r.names));
    let _ = writeln!(out, "canonical: {}", if r.canonical { "yes" } else { "no" });
    out
}

pub fn transform(r: &TransformResponse) -> String {
    let mut out = String::from("M (dst = M src):\n");
    int_matrix(&mut out, r.matrix.entries(), None);
    out
}

pub fn periods(r: &PeriodsResponse) -> String {
    let p = &r.periods;
    let d = &p.diagnostics;
    let mut out = String::from("tau:\n");
    complex_matrix(&mut out, &p.tau);
    let _ = writeln!(out, "A-periods:");
    complex_matrix(&mut out, &p.a_periods);
    let _ = writeln!(out, "B-periods:");
    complex_matrix(&mut out, &p.b_periods);
    let _ = writeln!(
        out,
        "condition {:.3e}, quadrature error {:.3e}, tolerance {:.0e}",
        d.condition, d.quadrature_error, d.tolerance
    );
    let _ = writeln!(
        out,
        "Riemann conditions: {} (symmetry error {:.2e}, min eigenvalue of Im tau {:.6})",
        if d.riemann.passed { "pass" } else { "FAIL" },
        d.riemann.symmetry_error,
        d.riemann.min_imag_eigenvalue
    );
    out
}

pub fn klein_verify(r: &KleinVerifyResponse) -> String {
    let mut out = String::new();
    for rep in &r.reports {
        let _ = writeln!(out, "[{}] {}", if rep.passed { "PASS" } else { "FAIL" }, rep.name);
        for ch in rep.checks.iter().filter(|ch| !ch.passed) {
            let _ = write!(out, "       failed: {} (value {:.3e}, tolerance {:.0e})", ch.name, ch.value, ch.tolerance);
            if let Some(d) = &ch.detail {
                let _ = write!(out, ": {d}");
            }
            out.push('\n');
        }
        for note in &rep.notes {
            let _ = writeln!(out, "       note: {note}");
        }
    }
    let passed = r.reports.iter().filter(|rep| rep.passed).count();
    let _ = writeln!(out, "{passed}/{} verifications passed at tolerance {:.0e}", r.reports.len(), r.tolerance);
    let _ = writeln!(out, "tau:");
    complex_matrix(&mut out, &r.tau);
    out
}
