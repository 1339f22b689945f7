//! Seeded, parallel Monte Carlo comparison of equalization structures.

mod csv;
mod histogram;
mod study;

pub use csv::{
    format_ranking, histogram_csv, histogram_file_name, ranking_by_lambda2, ranking_by_mean, report_csv,
    HISTOGRAM_HEADER, REPORT_HEADER,
};
pub use histogram::{histogram, Histogram};
pub use study::{draw_initial_soc, run_study, substream_seed, McReport, McRow, McStudy, PackSize, SampleOutcome};
