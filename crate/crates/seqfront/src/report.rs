//! CSV and plot-data output of [`SeReport`]s.

use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use seqfront_core::compression::CompressionOption;
use seqfront_core::experiments::{SeReport, SeRow};
use seqfront_core::resources::{MemoryModel, MemoryScheme, TopologyKind};

use crate::error::{CliError, Result};

pub const CSV_COLUMNS: [&str; 12] = [
    "sweep_param",
    "sweep_value",
    "option",
    "memory_scheme",
    "capacity_bits",
    "topology",
    "K",
    "M",
    "mean_se",
    "std_se",
    "trials",
    "seed",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum OutputFormat {
    #[default]
    Csv,
    Plotdata,
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Plotdata => "dat",
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct CsvRow {
    sweep_param: String,
    sweep_value: String,
    option: String,
    memory_scheme: String,
    capacity_bits: u64,
    topology: String,
    #[serde(rename = "K")]
    k: usize,
    #[serde(rename = "M")]
    m: usize,
    mean_se: f64,
    std_se: f64,
    trials: usize,
    seed: u64,
}

impl From<&SeRow> for CsvRow {
    fn from(r: &SeRow) -> Self {
        CsvRow {
            sweep_param: r.sweep_param.clone(),
            sweep_value: r.sweep_value.clone(),
            option: r.option.to_string(),
            memory_scheme: r.memory.scheme.to_string(),
            capacity_bits: r.memory.capacity_bits,
            topology: r.topology.to_string(),
            k: r.num_users,
            m: r.total_antennas,
            mean_se: r.mean_se,
            std_se: r.std_se,
            trials: r.trials,
            seed: r.seed,
        }
    }
}

fn bad(what: &str, e: impl std::fmt::Display) -> String {
    format!("{what}: {e}")
}

impl TryFrom<CsvRow> for SeRow {
    type Error = String;
    fn try_from(c: CsvRow) -> std::result::Result<Self, String> {
        let scheme =
            MemoryScheme::from_str(&c.memory_scheme).map_err(|e| bad("memory_scheme", e))?;
        let memory = if scheme == MemoryScheme::Infinite {
            MemoryModel::INFINITE
        } else {
            MemoryModel::new(scheme, c.capacity_bits).map_err(|e| bad("capacity_bits", e))?
        };
        Ok(SeRow {
            sweep_param: c.sweep_param,
            sweep_value: c.sweep_value,
            option: CompressionOption::from_str(&c.option).map_err(|e| bad("option", e))?,
            memory,
            topology: TopologyKind::from_str(&c.topology).map_err(|e| bad("topology", e))?,
            num_users: c.k,
            total_antennas: c.m,
            mean_se: c.mean_se,
            std_se: c.std_se,
            trials: c.trials,
            seed: c.seed,
            samples: Vec::new(),
        })
    }
}

/// Writes the rows as CSV. Floats use the shortest representation that
/// parses back to the same value.
pub fn write_csv<W: Write>(report: &SeReport, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if report.rows.is_empty() {
        w.write_record(CSV_COLUMNS)?;
    }
    for r in &report.rows {
        w.serialize(CsvRow::from(r))?;
    }
    w.flush()?;
    Ok(())
}

/// Reads rows written by [`write_csv`]. Per-trial samples are not stored in
/// the file and come back empty.
pub fn read_csv<R: Read>(input: R) -> std::result::Result<Vec<SeRow>, String> {
    let mut rdr = csv::Reader::from_reader(input);
    let header = rdr.headers().map_err(|e| e.to_string())?.clone();
    if header.iter().ne(CSV_COLUMNS.iter().copied()) {
        return Err(format!("unexpected header {header:?}"));
    }
    rdr.deserialize::<CsvRow>()
        .enumerate()
        .map(|(i, r)| {
            r.map_err(|e| e.to_string())
                .and_then(SeRow::try_from)
                .map_err(|e| format!("row {}: {e}", i + 1))
        })
        .collect()
}

fn l_value(row: &SeRow) -> Option<&str> {
    row.sweep_param
        .split(';')
        .zip(row.sweep_value.split(';'))
        .find(|(p, _)| *p == "L")
        .map(|(_, v)| v)
}

/// Rows grouped into curves, one block per curve separated by two blank
/// lines (gnuplot `index` blocks). Each block starts with a `# curve:` label
/// and a column header; the x column is L when L is swept, otherwise the
/// sweep value.
pub fn plotdata(report: &SeReport) -> String {
    let mut curves: Vec<(String, Vec<&SeRow>)> = Vec::new();
    for r in &report.rows {
        let label = r.curve_label();
        match curves.iter_mut().find(|(l, _)| *l == label) {
            Some((_, rows)) => rows.push(r),
            None => curves.push((label, vec![r])),
        }
    }
    let mut s = String::new();
    if !report.metadata.version.is_empty() {
        let _ = writeln!(
            s,
            "# seqfront {} preset {}",
            report.metadata.version, report.metadata.preset
        );
    }
    for (i, (label, rows)) in curves.iter().enumerate() {
        if i > 0 {
            s.push_str("\n\n");
        }
        let x_name = if rows.iter().all(|r| l_value(r).is_some()) {
            "L"
        } else {
            "x"
        };
        let _ = writeln!(s, "# curve: {label}");
        let _ = writeln!(s, "# {x_name} mean_se std_se trials");
        for r in rows {
            let x = l_value(r).map_or_else(|| r.sweep_value.clone(), str::to_string);
            let _ = writeln!(s, "{x} {} {} {}", r.mean_se, r.std_se, r.trials);
        }
    }
    s
}

/// Sidecar text next to an output file: version, preset and the effective
/// spec, loadable again with `-c`.
pub fn metadata_toml(report: &SeReport) -> String {
    format!(
        "# seqfront {} preset {}\n# re-run with: seqfront run -c <this file>\n{}",
        report.metadata.version, report.metadata.preset, report.metadata.config
    )
}

/// Writes the report in `format` to `path`, plus `<path>.meta.toml`.
pub fn emit_report(report: &SeReport, path: &Path, format: OutputFormat) -> Result<()> {
    let io = |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    };
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(io)?;
    }
    let mut file = std::fs::File::create(path).map_err(io)?;
    write_report(report, &mut file, format).map_err(|e| CliError::Format {
        path: path.to_path_buf(),
        message: e,
    })?;
    let mut meta = path.as_os_str().to_owned();
    meta.push(".meta.toml");
    std::fs::write(&meta, metadata_toml(report)).map_err(|source| CliError::Io {
        path: meta.into(),
        source,
    })
}

pub fn write_report<W: Write>(
    report: &SeReport,
    out: &mut W,
    format: OutputFormat,
) -> std::result::Result<(), String> {
    match format {
        OutputFormat::Csv => write_csv(report, out).map_err(|e| e.to_string()),
        OutputFormat::Plotdata => out
            .write_all(plotdata(report).as_bytes())
            .map_err(|e| e.to_string()),
    }
}

/// Human-readable table for the terminal.
pub fn summary(report: &SeReport) -> String {
    let mut s = String::new();
    for r in &report.rows {
        let _ = writeln!(
            s,
            "{:>8}={:<10} {:<7} {:<13} {:<6} K={:<3} M={:<4} mean={:>7} std={:>7} n={}",
            r.sweep_param,
            r.sweep_value,
            r.option.to_string(),
            r.memory.to_string(),
            r.topology.to_string(),
            r.num_users,
            r.total_antennas,
            if r.is_feasible() {
                format!("{:.3}", r.mean_se)
            } else {
                "-".into()
            },
            if r.is_feasible() {
                format!("{:.3}", r.std_se)
            } else {
                "-".into()
            },
            r.trials,
        );
    }
    s
}
