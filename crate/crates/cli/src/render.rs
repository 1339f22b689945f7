//! Human-readable output.

use eqhs::hypergraph::Topology;
use eqhs::Weight;

/// Incidence matrix with right-aligned rational entries, one row per cell.
pub fn matrix_text(t: &Topology) -> anyhow::Result<String> {
    let c = t.template_matrix::<Weight>()?;
    let cells: Vec<Vec<String>> = (0..c.nrows()).map(|i| c.row(i).iter().map(|w| w.to_string()).collect()).collect();
    let width = cells.iter().flatten().map(String::len).max().unwrap_or(1);
    let mut out = String::new();
    out.push_str(&format!("{:>5} ", ""));
    for l in 1..=c.ncols() {
        out.push_str(&format!(" {:>width$}", format!("e{l}")));
    }
    out.push('\n');
    for (i, row) in cells.iter().enumerate() {
        out.push_str(&format!("{:>5} ", format!("B{}", i + 1)));
        for v in row {
            out.push_str(&format!(" {v:>width$}"));
        }
        out.push('\n');
    }
    if t.is_switched() {
        out.push_str("(switched: the head moves to the highest-SOC cell every step)\n");
    }
    Ok(out)
}

/// Four significant digits, never in exponent form.
pub fn sig4(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    let mag = v.abs().log10().floor() as i32;
    let decimals = (3 - mag).max(0) as usize;
    format!("{v:.decimals$}")
}
