//! Batch capacity statistics over a directory of PGM images.

use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::codec::{plan_container, CapacityReport};
use crate::error::Error;
use crate::image::read_pgm;

pub const CSV_HEADER: [&str; 21] = [
    "file",
    "rows",
    "cols",
    "ref_rows",
    "ref_cols",
    "ref_count",
    "t0",
    "t1",
    "t2",
    "t3",
    "t4",
    "t5",
    "t6",
    "t7",
    "t8",
    "total_capacity",
    "code_bits",
    "header_bits",
    "net_payload",
    "er_bpp",
    "status",
];

#[derive(Clone, Debug)]
pub struct AnalysisRow {
    pub file: String,
    pub rows: usize,
    pub cols: usize,
    /// `None` when the image cannot host a container.
    pub report: Option<CapacityReport>,
}

impl AnalysisRow {
    pub fn embedding_rate(&self) -> f64 {
        self.report
            .as_ref()
            .map_or(0.0, CapacityReport::embedding_rate)
    }

    fn record(&self) -> Vec<String> {
        let mut rec = vec![
            self.file.clone(),
            self.rows.to_string(),
            self.cols.to_string(),
        ];
        match &self.report {
            Some(rep) => {
                rec.push(rep.ref_rows.to_string());
                rec.push(rep.ref_cols.to_string());
                rec.push(rep.histogram.ref_count.to_string());
                rec.extend(rep.histogram.counts.iter().map(u64::to_string));
                rec.push(rep.total_capacity.to_string());
                rec.push(rep.code_bits.to_string());
                rec.push(rep.header_bits.to_string());
                rec.push(rep.net_payload.to_string());
                rec.push(format!("{:.3}", rep.embedding_rate()));
                rec.push("ok".into());
            }
            None => {
                rec.extend(std::iter::repeat_n(String::new(), 16));
                rec.push("0.000".into());
                rec.push(Error::InsufficientBootstrap.to_string());
            }
        }
        rec
    }
}

/// Best, worst and mean ER over analysed images; unusable images count as 0 bpp.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErSummary {
    pub best: f64,
    pub worst: f64,
    pub average: f64,
}

#[derive(Clone, Debug, Default)]
pub struct Analysis {
    pub rows: Vec<AnalysisRow>,
    pub warnings: Vec<String>,
}

impl Analysis {
    pub fn summary(&self) -> Option<ErSummary> {
        if self.rows.is_empty() {
            return None;
        }
        let ers: Vec<f64> = self.rows.iter().map(AnalysisRow::embedding_rate).collect();
        Some(ErSummary {
            best: ers.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            worst: ers.iter().copied().fold(f64::INFINITY, f64::min),
            average: ers.iter().sum::<f64>() / ers.len() as f64,
        })
    }

    /// One row per image, then `summary:best`, `summary:worst`, `summary:average`.
    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(CSV_HEADER)?;
        for row in &self.rows {
            w.write_record(row.record())?;
        }
        if let Some(s) = self.summary() {
            for (name, value) in [("best", s.best), ("worst", s.worst), ("average", s.average)] {
                let mut rec = vec![format!("summary:{name}")];
                rec.extend(std::iter::repeat_n(String::new(), CSV_HEADER.len() - 3));
                rec.push(format!("{value:.3}"));
                rec.push(String::new());
                w.write_record(rec)?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

fn is_pgm(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("pgm"))
}

/// Analyses every `.pgm` file directly inside `dir`; rows are sorted by file name.
pub fn analyze_dir(dir: &Path) -> std::io::Result<Analysis> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && is_pgm(p))
        .collect();
    paths.sort();

    let results: Vec<Result<AnalysisRow, String>> = paths
        .par_iter()
        .map(|path| {
            let name = path
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_default();
            let bytes = std::fs::read(path).map_err(|e| format!("{name}: {e}"))?;
            let img = read_pgm(&bytes).map_err(|e| format!("{name}: {e}"))?;
            let report = match plan_container(&img) {
                Ok(plan) => Some(plan.report),
                Err(Error::InsufficientBootstrap) => None,
                Err(e) => return Err(format!("{name}: {e}")),
            };
            Ok(AnalysisRow {
                file: name,
                rows: img.rows(),
                cols: img.cols(),
                report,
            })
        })
        .collect();

    let mut analysis = Analysis::default();
    for r in results {
        match r {
            Ok(row) => analysis.rows.push(row),
            Err(w) => analysis.warnings.push(w),
        }
    }
    Ok(analysis)
}
