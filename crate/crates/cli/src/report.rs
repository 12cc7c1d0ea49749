//! CSV report rows and benchmark timing helpers.

use swept2d_core::engines::EngineReport;

pub const CSV_HEADER: &str = "kernel,engine,px,py,n,points_per_rank,tau_injected_us,substeps,us_per_substep,messages_per_rank,bytes_per_rank";

#[derive(Debug, Clone)]
pub struct ReportRow {
    pub kernel: String,
    pub engine: &'static str,
    pub px: u32,
    pub py: u32,
    pub n: usize,
    pub tau_us: f64,
    pub substeps: u64,
    pub us_per_substep: f64,
    pub messages_per_rank: u64,
    pub bytes_per_rank: u64,
}

impl ReportRow {
    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{:.3},{},{}",
            self.kernel,
            self.engine,
            self.px,
            self.py,
            self.n,
            self.n * self.n,
            self.tau_us,
            self.substeps,
            self.us_per_substep,
            self.messages_per_rank,
            self.bytes_per_rank
        )
    }
}

/// Per-rank counters are symmetric across ranks for the shipped engines;
/// report the maximum so any asymmetry is at least visible.
pub fn per_rank_messages(report: &EngineReport) -> (u64, u64) {
    let messages = report
        .ranks
        .iter()
        .map(|r| r.messages_sent)
        .max()
        .unwrap_or(0);
    let bytes = report.ranks.iter().map(|r| r.bytes_sent).max().unwrap_or(0);
    (messages, bytes)
}

pub fn median(mut values: Vec<f64>) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mid = values.len() / 2;
    if values.len() % 2 == 1 {
        values[mid]
    } else {
        0.5 * (values[mid - 1] + values[mid])
    }
}

pub fn write_csv(path: &std::path::Path, rows: &[String]) -> std::io::Result<()> {
    let mut text = String::with_capacity(rows.iter().map(|r| r.len() + 1).sum::<usize>() + 64);
    for row in rows {
        text.push_str(row);
        text.push('\n');
    }
    std::fs::write(path, text)
}
