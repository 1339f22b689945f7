use std::fmt::Write;

use crate::hypergraph::TopologyKind;
use crate::montecarlo::histogram::Histogram;
use crate::montecarlo::study::McReport;

pub const REPORT_HEADER: &str = "topology,n,m,lambda2,mean_te_s,std_te_s,converged,samples";
pub const HISTOGRAM_HEADER: &str = "bin_lo,bin_hi,count";

/// 17 significant digits, `.` separator; empty for a missing value.
fn num(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| format!("{x:.16e}"))
}

pub fn report_csv(report: &McReport) -> String {
    let mut out = String::from(REPORT_HEADER);
    out.push('\n');
    for r in &report.rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.topology,
            r.n,
            r.m,
            num(Some(r.lambda2)),
            num(r.mean_te_s),
            num(r.std_te_s),
            r.converged,
            r.samples
        )
        .unwrap();
    }
    out
}

pub fn histogram_csv(h: &Histogram) -> String {
    let mut out = String::from(HISTOGRAM_HEADER);
    out.push('\n');
    for (i, c) in h.counts.iter().enumerate() {
        writeln!(out, "{},{},{}", num(Some(h.edges[i])), num(Some(h.edges[i + 1])), c).unwrap();
    }
    out
}

/// File name used for a row's histogram, e.g. `hist_module-cc_n64_m4.csv`.
pub fn histogram_file_name(topology: TopologyKind, n: usize, m: usize) -> String {
    format!("hist_{topology}_n{n}_m{m}.csv")
}

/// Kinds at `(n, m)` ordered by mean equalization time, fastest first.
/// Rows without any converged sample sort last.
pub fn ranking_by_mean(report: &McReport, n: usize, m: usize) -> Vec<TopologyKind> {
    let mut rows: Vec<_> = report.rows.iter().filter(|r| r.n == n && r.m == m).collect();
    rows.sort_by(|a, b| a.mean_te_s.unwrap_or(f64::INFINITY).total_cmp(&b.mean_te_s.unwrap_or(f64::INFINITY)));
    rows.into_iter().map(|r| r.topology).collect()
}

/// Kinds at `(n, m)` ordered by `λ₂`, largest first (stable for ties).
pub fn ranking_by_lambda2(report: &McReport, n: usize, m: usize) -> Vec<TopologyKind> {
    let mut rows: Vec<_> = report.rows.iter().filter(|r| r.n == n && r.m == m).collect();
    rows.sort_by(|a, b| b.lambda2.total_cmp(&a.lambda2));
    rows.into_iter().map(|r| r.topology).collect()
}

pub fn format_ranking(kinds: &[TopologyKind]) -> String {
    kinds.iter().map(|k| k.as_str()).collect::<Vec<_>>().join(" < ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::montecarlo::histogram::histogram;

    #[test]
    fn histogram_rows() {
        let h = histogram(&[0.0, 10.0], 2).unwrap();
        assert_eq!(
            histogram_csv(&h),
            "bin_lo,bin_hi,count\n0.0000000000000000e0,5.0000000000000000e0,1\n5.0000000000000000e0,1.0000000000000000e1,1\n"
        );
    }

    #[test]
    fn ranking_text() {
        assert_eq!(format_ranking(&[TopologyKind::LayerCc, TopologyKind::Cpc]), "layer-cc < cpc");
    }
}
