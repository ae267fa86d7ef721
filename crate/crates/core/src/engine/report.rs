use std::io::Write;

use super::rates::RateReport;
use crate::error::{Error, Result};

/// One line of the evidence table.
#[derive(Clone, Debug, PartialEq)]
pub struct RateRow {
    pub w: usize,
    pub errors: Vec<f64>,
    pub err_f: f64,
    pub ratio_f: f64,
    pub class: &'static str,
}

impl RateRow {
    fn record(&self) -> Vec<String> {
        let mut out = Vec::with_capacity(self.errors.len() + 4);
        out.push(self.w.to_string());
        out.extend(self.errors.iter().map(|e| e.to_string()));
        out.push(self.err_f.to_string());
        out.push(self.ratio_f.to_string());
        out.push(self.class.to_string());
        out
    }
}

/// `w,err_e0,…,err_em,err_f,ratio_f,class`.
pub fn csv_header(m: usize) -> Vec<String> {
    let mut header = vec!["w".to_string()];
    header.extend((0..=m).map(|r| format!("err_e{r}")));
    header.extend(["err_f", "ratio_f", "class"].map(String::from));
    header
}

impl RateReport {
    /// Test functions named `e0, e1, …`; the continuity pipeline's modulus
    /// term is not one of them.
    fn e_records(&self) -> Vec<&super::rates::NetRecord> {
        self.test_functions.iter().filter(|t| t.label.starts_with('e')).collect()
    }

    pub fn m(&self) -> usize {
        self.e_records().len() - 1
    }

    /// Evidence rows for the probe at `probe`.
    pub fn rows(&self, probe: usize) -> Result<Vec<RateRow>> {
        let p = self
            .probes
            .get(probe)
            .ok_or_else(|| Error::InvalidArgument(format!("no probe with index {probe}")))?;
        let tests = self.e_records();
        let class = p.classification.kind.as_str();
        Ok((1..=p.error_net.horizon())
            .map(|w| RateRow {
                w,
                errors: tests.iter().map(|t| t.error_net.sequence_value(w)).collect(),
                err_f: p.error_net.sequence_value(w),
                ratio_f: p.ratio_net.sequence_value(w),
                class,
            })
            .collect())
    }
}

/// Writes an RFC-4180 table with LF line endings.
pub fn write_csv_table<W: Write>(writer: W, header: &[String], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    let mut out = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(writer);
    out.write_record(header)?;
    for row in rows {
        out.write_record(&row)?;
    }
    out.flush()?;
    Ok(())
}

/// Evidence table for one probe of a rate report.
pub fn write_evidence_csv<W: Write>(writer: W, report: &RateReport, probe: usize) -> Result<()> {
    let rows = report.rows(probe)?;
    write_csv_table(writer, &csv_header(report.m()), rows.iter().map(RateRow::record))
}
