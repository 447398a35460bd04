//! Sweep CSV: one line per experiment, speedup filled in per proportion.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use boa_core::experiments::{speedup, ProportionSummary, SweepRow};

use crate::CliError;

pub const HEADER: [&str; 8] = [
    "problem",
    "n",
    "proportion",
    "experiment",
    "seed",
    "min_population",
    "mean_actual_evaluations",
    "speedup",
];

#[derive(Debug, Clone, PartialEq)]
pub struct CsvRecord {
    pub row: SweepRow,
    /// Empty in the file when the rows hold no proportion-0 baseline.
    pub speedup: Option<f64>,
}

/// Attaches the aggregate speedup of each row's `(problem, n, proportion)`.
pub fn with_speedups(rows: &[SweepRow]) -> Vec<CsvRecord> {
    let summaries = speedup(rows).unwrap_or_default();
    rows.iter()
        .map(|row| CsvRecord {
            row: row.clone(),
            speedup: summaries
                .iter()
                .find(|s| s.problem == row.problem && s.n == row.n && s.proportion == row.proportion)
                .map(|s| s.speedup),
        })
        .collect()
}

pub fn write_records<W: Write>(records: &[CsvRecord], out: W) -> Result<(), CliError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(HEADER)?;
    for CsvRecord { row, speedup } in records {
        w.write_record([
            row.problem.clone(),
            row.n.to_string(),
            row.proportion.to_string(),
            row.experiment.to_string(),
            row.seed.to_string(),
            row.min_population.to_string(),
            row.mean_actual_evaluations.to_string(),
            speedup.map(|s| s.to_string()).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `rows` to `path`, or to stdout when `path` is `None`.
pub fn write_csv(rows: &[SweepRow], path: Option<&Path>) -> Result<(), CliError> {
    let records = with_speedups(rows);
    match path {
        Some(path) => {
            let mut file = BufWriter::new(File::create(path)?);
            write_records(&records, &mut file)?;
            file.into_inner().map_err(|e| e.into_error())?.sync_all()?;
            Ok(())
        }
        None => write_records(&records, io::stdout().lock()),
    }
}

pub fn read_records<R: io::Read>(input: R) -> Result<Vec<CsvRecord>, CliError> {
    let mut reader = csv::Reader::from_reader(input);
    if reader.headers()?.iter().ne(HEADER) {
        return Err(CliError::Input(format!("expected header {}", HEADER.join(","))));
    }
    let mut records = Vec::new();
    for (line, result) in reader.records().enumerate() {
        let rec = result?;
        let bad = |field: &str| CliError::Input(format!("record {}: bad {field}", line + 1));
        let num = |i: usize, field: &str| rec[i].parse::<f64>().map_err(|_| bad(field));
        let int = |i: usize, field: &str| rec[i].parse::<u64>().map_err(|_| bad(field));
        records.push(CsvRecord {
            row: SweepRow {
                problem: rec[0].to_string(),
                n: int(1, "n")? as usize,
                proportion: num(2, "proportion")?,
                experiment: int(3, "experiment")? as usize,
                seed: int(4, "seed")?,
                min_population: int(5, "min_population")? as usize,
                mean_actual_evaluations: num(6, "mean_actual_evaluations")?,
            },
            speedup: match &rec[7] {
                "" => None,
                _ => Some(num(7, "speedup")?),
            },
        });
    }
    Ok(records)
}

pub fn read_csv(path: &Path) -> Result<Vec<CsvRecord>, CliError> {
    read_records(File::open(path)?)
}

/// Aggregates the rows of several sweeps for plotting.
pub fn summarize(records: &[CsvRecord]) -> Result<Vec<ProportionSummary>, CliError> {
    let rows: Vec<SweepRow> = records.iter().map(|r| r.row.clone()).collect();
    Ok(speedup(&rows)?)
}
