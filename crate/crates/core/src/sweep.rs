//! Seeded experiment sweeps and CSV/JSON reports.

use std::fs::File;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::generators::{complete_host, default_rule, generate, GenError, InstanceKind, InstanceSpec};
use crate::model::{min_star_degree, PatternF};
use crate::pipeline::{find_rainbow_factor, FactorStrategy, PipelineConfig, PipelineError, SolveStatus};

pub const CSV_HEADER: [&str; 11] = [
    "pattern",
    "n",
    "m",
    "frac",
    "seed",
    "strategy",
    "feasible",
    "leftover",
    "copies",
    "ms",
    "stage_stats",
];

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("{path}: {msg}")]
    Io { path: PathBuf, msg: String },
    #[error("csv: {0}")]
    Csv(String),
    #[error("invalid sweep: {0}")]
    Spec(String),
    #[error(transparent)]
    Gen(#[from] GenError),
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
}

impl From<csv::Error> for SweepError {
    fn from(e: csv::Error) -> Self {
        SweepError::Csv(e.to_string())
    }
}

fn io_error(path: &Path, e: impl std::fmt::Display) -> SweepError {
    SweepError::Io {
        path: path.to_path_buf(),
        msg: e.to_string(),
    }
}

#[derive(Clone, Debug)]
pub struct SweepSpec {
    pub pattern: PatternF,
    pub kind: InstanceKind,
    pub ns: Vec<usize>,
    /// Minimum degree targets as fractions of `n`.
    pub fracs: Vec<f64>,
    pub seeds: Vec<u64>,
    pub strategies: Vec<FactorStrategy>,
    pub config: PipelineConfig,
    pub jobs: usize,
    /// Record wall-clock times; off gives byte-identical reports.
    pub timing: bool,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), SweepError> {
        if self.ns.is_empty() || self.fracs.is_empty() || self.strategies.is_empty() {
            return Err(SweepError::Spec(
                "n, fraction and strategy lists must be nonempty".into(),
            ));
        }
        if let Some(f) = self.fracs.iter().find(|f| !(0.0..=1.0).contains(*f)) {
            return Err(SweepError::Spec(format!("fraction {f} is outside [0, 1]")));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub pattern: String,
    pub n: usize,
    pub m: usize,
    pub frac: f64,
    pub seed: u64,
    pub strategy: FactorStrategy,
    pub feasible: bool,
    pub leftover: usize,
    pub copies: usize,
    pub ms: u64,
    pub stage_stats: String,
}

/// `ceil(frac n)` capped by the best degree the host allows.
pub fn degree_target(pattern: &PatternF, n: usize, frac: f64) -> Result<usize, SweepError> {
    let rule = default_rule(pattern);
    let parts = pattern.is_partite().then(|| pattern.k().max(2));
    let max = min_star_degree(&complete_host(n, pattern.k(), &rule, parts)?, &rule).map_err(GenError::from)?;
    Ok(((frac * n as f64).ceil() as usize).min(max))
}

fn run_cell(
    spec: &SweepSpec,
    n: usize,
    frac: f64,
    seed: u64,
    strategy: FactorStrategy,
) -> Result<SweepRow, SweepError> {
    let mut inst = InstanceSpec::new(spec.kind, n, spec.pattern.clone(), seed);
    inst.delta = Some(degree_target(&spec.pattern, n, frac)?);
    let sys = generate(&inst)?;
    let cfg = PipelineConfig {
        seed,
        ..spec.config.clone()
    };
    let start = Instant::now();
    let report = find_rainbow_factor(&sys, &spec.pattern, &cfg, strategy)?;
    let ms = if spec.timing {
        start.elapsed().as_millis() as u64
    } else {
        0
    };
    Ok(SweepRow {
        pattern: spec.pattern.to_string(),
        n,
        m: sys.m(),
        frac,
        seed,
        strategy,
        feasible: report.status == SolveStatus::Factor,
        leftover: report.stats.leftover,
        copies: report.packing.as_ref().map_or(0, |p| p.len()),
        ms,
        stage_stats: report.stats.summary(),
    })
}

/// Runs every `(n, frac, seed, strategy)` cell and returns rows ordered by
/// that tuple.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>, SweepError> {
    spec.validate()?;
    let mut cells = Vec::new();
    for &n in &spec.ns {
        for &frac in &spec.fracs {
            for &seed in &spec.seeds {
                for &strategy in &spec.strategies {
                    cells.push((n, frac, seed, strategy));
                }
            }
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.jobs)
        .build()
        .map_err(|e| SweepError::Spec(e.to_string()))?;
    let mut rows = pool.install(|| {
        cells
            .par_iter()
            .map(|&(n, frac, seed, strategy)| run_cell(spec, n, frac, seed, strategy))
            .collect::<Result<Vec<_>, _>>()
    })?;
    rows.sort_by(|a, b| {
        (a.n, a.frac, a.seed, a.strategy.to_string())
            .partial_cmp(&(b.n, b.frac, b.seed, b.strategy.to_string()))
            .expect("finite fractions")
    });
    Ok(rows)
}

/// Writes the header (always) and the rows.
pub fn write_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<(), SweepError> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| SweepError::Csv(e.to_string()))?;
    Ok(())
}

pub fn parse_csv<R: Read>(input: R) -> Result<Vec<SweepRow>, SweepError> {
    let mut rd = csv::Reader::from_reader(input);
    let header: Vec<String> = rd.headers()?.iter().map(str::to_string).collect();
    if header != CSV_HEADER {
        return Err(SweepError::Csv(format!("unexpected header {header:?}")));
    }
    rd.deserialize().map(|r| r.map_err(SweepError::from)).collect()
}

/// Writes `csv_path` and, if given, a JSON array with the same rows.
pub fn emit_report(rows: &[SweepRow], csv_path: &Path, json_path: Option<&Path>) -> Result<(), SweepError> {
    let file = File::create(csv_path).map_err(|e| io_error(csv_path, e))?;
    write_csv(rows, file)?;
    if let Some(path) = json_path {
        let text = serde_json::to_string_pretty(rows).map_err(|e| io_error(path, e))?;
        std::fs::write(path, text + "\n").map_err(|e| io_error(path, e))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row() -> SweepRow {
        SweepRow {
            pattern: "clique:3".into(),
            n: 9,
            m: 9,
            frac: 0.75,
            seed: 4,
            strategy: FactorStrategy::Exact,
            feasible: true,
            leftover: 0,
            copies: 3,
            ms: 12,
            stage_stats: "restarts=0;nodes=5".into(),
        }
    }

    #[test]
    fn empty_report_has_header() {
        let mut out = Vec::new();
        write_csv(&[], &mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), CSV_HEADER.join(",") + "\n");
    }

    #[test]
    fn csv_round_trip() {
        let mut out = Vec::new();
        write_csv(&[row()], &mut out).unwrap();
        assert_eq!(parse_csv(out.as_slice()).unwrap(), vec![row()]);
    }

    #[test]
    fn degree_targets_are_capped() {
        let k3 = PatternF::clique(3).unwrap();
        assert_eq!(degree_target(&k3, 9, 0.7).unwrap(), 7);
        assert_eq!(degree_target(&k3, 9, 1.0).unwrap(), 8);
    }

    #[test]
    fn bad_fraction() {
        let spec = SweepSpec {
            pattern: PatternF::clique(3).unwrap(),
            kind: InstanceKind::RandomMinDegree,
            ns: vec![6],
            fracs: vec![1.5],
            seeds: vec![0],
            strategies: vec![FactorStrategy::Exact],
            config: PipelineConfig::default(),
            jobs: 1,
            timing: false,
        };
        assert!(matches!(run_sweep(&spec), Err(SweepError::Spec(_))));
    }
}
