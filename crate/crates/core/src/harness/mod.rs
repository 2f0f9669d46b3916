//! Experiment orchestration: configuration, sweeps, and machine-readable
//! output.
//!
//! Every file written here starts with `#`-prefixed metadata lines carrying
//! the code version, a SHA-256 of the canonical configuration JSON, the
//! configuration itself, and the column schema. The body is plain CSV (or a
//! single JSON document). Nothing time-dependent is emitted, so identical
//! configurations give byte-identical output.

pub mod cli;

use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::dynamics::{run_algorithm, Propagator, RunConfig};
use crate::error::{Error, Result};
use crate::nand::{eval_nand, TreeInput};
use crate::scattering::{log_grid, scan_bounds, scan_window};
use crate::spectral::DiagnosticRow;

pub use cli::cli_main;

/// Environment variable holding the sweep worker count (0 or unset: one per
/// core).
pub const WORKERS_ENV: &str = "NANDWALK_WORKERS";

pub const SWEEP_COLUMNS: [&str; 11] = [
    "N",
    "instance_id",
    "gamma",
    "L",
    "M",
    "t_run",
    "p_right",
    "T0_sq",
    "decision",
    "nand",
    "correct",
];
pub const SCATTER_COLUMNS: [&str; 9] = [
    "N",
    "instance_id",
    "E",
    "nand",
    "abs_y",
    "abs_T",
    "bound_y",
    "bound_T",
    "pass",
];
pub const DIAGNOSE_COLUMNS: [&str; 6] = ["L", "eps", "quantity", "value", "bound", "pass"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Everything that determines an experiment's output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub command: String,
    /// Explicit leaf string; overrides random instance generation.
    pub input: Option<String>,
    /// Leaf counts `N` for generated instances.
    pub leaves: Vec<usize>,
    pub instances: usize,
    pub seed: u64,
    pub gammas: Vec<f64>,
    pub m_factor: usize,
    pub propagator: Propagator,
    pub tolerance: f64,
    pub threshold: f64,
    /// Energy grid for bound scans; `emax = None` means the window edge
    /// `1/(16√N)`.
    pub points: usize,
    pub emin: f64,
    pub emax: Option<f64>,
    /// Spectral diagnostics grid.
    pub lengths: Vec<usize>,
    pub epss: Vec<f64>,
    /// Parity embedding: explicit variables or an exhaustive size.
    pub parity_bits: Option<String>,
    pub parity_k: Vec<usize>,
    pub format: OutputFormat,
}

impl ExperimentConfig {
    pub fn defaults(command: &str) -> Self {
        ExperimentConfig {
            command: command.to_string(),
            input: None,
            leaves: vec![16],
            instances: 16,
            seed: 0,
            gammas: if command == "sweep" {
                vec![4.0, 16.0, 64.0]
            } else {
                vec![16.0]
            },
            m_factor: RunConfig::DEFAULT_M_FACTOR,
            propagator: Propagator::Chebyshev,
            tolerance: RunConfig::DEFAULT_TOLERANCE,
            threshold: RunConfig::DEFAULT_THRESHOLD,
            points: 64,
            emin: 1e-8,
            emax: None,
            lengths: vec![16, 64, 256],
            epss: vec![0.1, 0.3],
            parity_bits: None,
            parity_k: vec![2, 4, 8],
            format: OutputFormat::Csv,
        }
    }

    pub fn apply(&mut self, p: PartialConfig) {
        macro_rules! take {
            ($($field:ident),*) => { $(if let Some(v) = p.$field { self.$field = v; })* };
        }
        take!(
            leaves, instances, seed, gammas, m_factor, propagator, tolerance, threshold, points,
            emin
        );
        take!(lengths, epss, parity_k, format);
        if p.input.is_some() {
            self.input = p.input;
        }
        if p.emax.is_some() {
            self.emax = p.emax;
        }
        if p.parity_bits.is_some() {
            self.parity_bits = p.parity_bits;
        }
    }

    /// Canonical JSON: serde_json objects keep keys sorted.
    pub fn canonical_json(&self) -> String {
        serde_json::to_value(self)
            .expect("config serializes")
            .to_string()
    }

    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.canonical_json().as_bytes()))
    }

    pub fn run_config(&self, n_leaves: usize, gamma: f64) -> Result<RunConfig> {
        RunConfig::new(n_leaves, gamma)?
            .with_m_factor(self.m_factor)?
            .with_propagator(self.propagator)
            .with_tolerance(self.tolerance)?
            .with_threshold(self.threshold)
    }

    /// `(N, instance_id, instance)` for every instance the config names.
    pub fn instances(&self) -> Result<Vec<(usize, usize, TreeInput)>> {
        if let Some(text) = &self.input {
            let input = TreeInput::parse(text)?;
            return Ok(vec![(input.len(), 0, input)]);
        }
        if self.leaves.is_empty() || self.instances == 0 {
            return Err(Error::InvalidConfig("empty instance grid".into()));
        }
        let mut out = Vec::new();
        for &n in &self.leaves {
            if n < 2 || !n.is_power_of_two() {
                return Err(Error::NonPowerOfTwo(n));
            }
            let depth = n.trailing_zeros();
            for id in 0..self.instances {
                out.push((n, id, instance_for(self.seed, depth, id)));
            }
        }
        Ok(out)
    }
}

/// Reproducible random instance: one ChaCha stream per `(depth, id)`.
pub fn instance_for(seed: u64, depth: u32, id: usize) -> TreeInput {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((depth as u64) << 32) | id as u64);
    TreeInput::random(depth, &mut rng)
}

/// Optional overrides, from a config file or from command-line flags.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PartialConfig {
    pub input: Option<String>,
    pub leaves: Option<Vec<usize>>,
    pub instances: Option<usize>,
    pub seed: Option<u64>,
    pub gammas: Option<Vec<f64>>,
    pub m_factor: Option<usize>,
    pub propagator: Option<Propagator>,
    pub tolerance: Option<f64>,
    pub threshold: Option<f64>,
    pub points: Option<usize>,
    pub emin: Option<f64>,
    pub emax: Option<f64>,
    pub lengths: Option<Vec<usize>>,
    pub epss: Option<Vec<f64>>,
    pub parity_bits: Option<String>,
    pub parity_k: Option<Vec<usize>>,
    pub format: Option<OutputFormat>,
}

/// Slope of the least-squares line through `(ln x, ln y)`. `None` with fewer
/// than two usable points.
pub fn fit_loglog(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(&x, &y)| x > 0.0 && y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n_leaves: usize,
    pub instance_id: usize,
    pub gamma: f64,
    pub packet_len: usize,
    pub half_len: usize,
    pub t_run: f64,
    /// NaN when the run failed.
    pub p_right: f64,
    pub t0_sq: f64,
    pub decision: bool,
    pub nand: bool,
    pub correct: bool,
    pub error: Option<String>,
}

impl SweepRow {
    fn record(&self) -> Vec<String> {
        let b = |v: bool| (v as u8).to_string();
        vec![
            self.n_leaves.to_string(),
            self.instance_id.to_string(),
            self.gamma.to_string(),
            self.packet_len.to_string(),
            self.half_len.to_string(),
            self.t_run.to_string(),
            self.p_right.to_string(),
            self.t0_sq.to_string(),
            b(self.decision),
            b(self.nand),
            b(self.correct),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaSummary {
    pub gamma: f64,
    pub rows: usize,
    pub failures: usize,
    pub error_rate: f64,
    /// Mean of `|p_right - |T(0)|²|` over successful rows.
    pub mean_abs_dev: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub per_gamma: Vec<GammaSummary>,
    /// `α` in `mean_abs_dev ∝ γ^{-α}`.
    pub alpha: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepOutcome {
    pub rows: Vec<SweepRow>,
    pub summary: SweepSummary,
}

fn worker_pool() -> Result<rayon::ThreadPool> {
    let workers = std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .unwrap_or(0);
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("worker pool: {e}")))
}

/// Runs the algorithm on every (instance, γ) pair. Rows come back in grid
/// order whatever order the workers finish in; a failed run is recorded in
/// its row.
pub fn sweep(config: &ExperimentConfig) -> Result<SweepOutcome> {
    if config.gammas.is_empty() {
        return Err(Error::InvalidConfig("empty gamma list".into()));
    }
    let instances = config.instances()?;
    // validate every grid point before any work starts
    for &(n, _, _) in &instances {
        for &g in &config.gammas {
            config.run_config(n, g)?;
        }
    }
    let grid: Vec<(&(usize, usize, TreeInput), f64)> = instances
        .iter()
        .flat_map(|inst| config.gammas.iter().map(move |&g| (inst, g)))
        .collect();
    let pool = worker_pool()?;
    let rows: Vec<SweepRow> = pool.install(|| {
        grid.par_iter()
            .map(|&((n, id, input), gamma)| {
                let rc = config.run_config(*n, gamma).expect("validated above");
                let nand = eval_nand(input);
                let mut row = SweepRow {
                    n_leaves: *n,
                    instance_id: *id,
                    gamma,
                    packet_len: rc.packet_len,
                    half_len: rc.half_len,
                    t_run: rc.t_run,
                    p_right: f64::NAN,
                    t0_sq: if nand { 1.0 } else { 0.0 },
                    decision: false,
                    nand,
                    correct: false,
                    error: None,
                };
                match run_algorithm(input, &rc) {
                    Ok(v) => {
                        row.p_right = v.p_right;
                        row.t0_sq = v.analytic_t0_sq;
                        row.decision = v.decision;
                        row.correct = v.decision == nand;
                    }
                    Err(e) => row.error = Some(e.to_string()),
                }
                row
            })
            .collect()
    });
    let summary = summarize(&rows, &config.gammas);
    Ok(SweepOutcome { rows, summary })
}

pub fn summarize(rows: &[SweepRow], gammas: &[f64]) -> SweepSummary {
    let per_gamma: Vec<GammaSummary> = gammas
        .iter()
        .map(|&gamma| {
            let sel: Vec<&SweepRow> = rows.iter().filter(|r| r.gamma == gamma).collect();
            let ok: Vec<&&SweepRow> = sel.iter().filter(|r| r.error.is_none()).collect();
            let wrong = sel.iter().filter(|r| !r.correct).count();
            let mean_abs_dev = if ok.is_empty() {
                f64::NAN
            } else {
                ok.iter().map(|r| (r.p_right - r.t0_sq).abs()).sum::<f64>() / ok.len() as f64
            };
            GammaSummary {
                gamma,
                rows: sel.len(),
                failures: sel.len() - ok.len(),
                error_rate: if sel.is_empty() {
                    f64::NAN
                } else {
                    wrong as f64 / sel.len() as f64
                },
                mean_abs_dev,
            }
        })
        .collect();
    let xs: Vec<f64> = per_gamma.iter().map(|s| s.gamma).collect();
    let ys: Vec<f64> = per_gamma.iter().map(|s| s.mean_abs_dev).collect();
    SweepSummary {
        alpha: fit_loglog(&xs, &ys).map(|s| -s),
        per_gamma,
    }
}

/// One row of the bound-scan CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScatterRow {
    pub n_leaves: usize,
    pub instance_id: usize,
    pub energy: f64,
    pub nand: bool,
    pub abs_y: f64,
    /// `|T(E) - T(0)|`.
    pub abs_t: f64,
    pub bound_y: f64,
    pub bound_t: f64,
    pub pass: bool,
}

pub fn scatter_rows(config: &ExperimentConfig) -> Result<Vec<ScatterRow>> {
    let mut out = Vec::new();
    for (n, id, input) in config.instances()? {
        let emax = config.emax.unwrap_or_else(|| scan_window(n));
        if !(config.emin > 0.0 && config.emin < emax) {
            return Err(Error::InvalidConfig(format!(
                "energy range ({}, {emax}) is empty",
                config.emin
            )));
        }
        let report = scan_bounds(&input, &log_grid(config.emin, emax, config.points))?;
        out.extend(report.rows.iter().map(|r| ScatterRow {
            n_leaves: n,
            instance_id: id,
            energy: r.energy,
            nand: report.nand,
            abs_y: r.abs_y,
            abs_t: r.t_dev,
            bound_y: r.bound_y,
            bound_t: r.bound_t,
            pass: r.pass,
        }));
    }
    Ok(out)
}

/// Metadata lines that head every output file.
pub fn write_preamble<W: Write>(
    w: &mut W,
    config: &ExperimentConfig,
    columns: &[&str],
) -> std::io::Result<()> {
    writeln!(w, "# nandwalk {}", env!("CARGO_PKG_VERSION"))?;
    writeln!(w, "# config_hash: {}", config.hash())?;
    writeln!(w, "# config: {}", config.canonical_json())?;
    writeln!(w, "# columns: {}", columns.join(","))
}

fn csv_body(columns: &[&str], records: impl Iterator<Item = Vec<String>>) -> Result<Vec<u8>> {
    let io = |e: csv::Error| Error::InvalidConfig(format!("csv: {e}"));
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(columns).map_err(io)?;
    for rec in records {
        w.write_record(&rec).map_err(io)?;
    }
    w.into_inner()
        .map_err(|e| Error::InvalidConfig(format!("csv: {e}")))
}

pub fn sweep_csv(config: &ExperimentConfig, outcome: &SweepOutcome) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    write_preamble(&mut out, config, &SWEEP_COLUMNS).expect("write to Vec");
    out.extend(csv_body(
        &SWEEP_COLUMNS,
        outcome.rows.iter().map(SweepRow::record),
    )?);
    for s in &outcome.summary.per_gamma {
        writeln!(
            out,
            "# summary gamma={} rows={} failures={} error_rate={} mean_abs_dev={}",
            s.gamma, s.rows, s.failures, s.error_rate, s.mean_abs_dev
        )
        .expect("write to Vec");
    }
    match outcome.summary.alpha {
        Some(a) => writeln!(out, "# fit alpha={a}"),
        None => writeln!(out, "# fit alpha=NA"),
    }
    .expect("write to Vec");
    Ok(out)
}

pub fn scatter_csv(config: &ExperimentConfig, rows: &[ScatterRow]) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    write_preamble(&mut out, config, &SCATTER_COLUMNS).expect("write to Vec");
    let b = |v: bool| (v as u8).to_string();
    out.extend(csv_body(
        &SCATTER_COLUMNS,
        rows.iter().map(|r| {
            vec![
                r.n_leaves.to_string(),
                r.instance_id.to_string(),
                r.energy.to_string(),
                b(r.nand),
                r.abs_y.to_string(),
                r.abs_t.to_string(),
                r.bound_y.to_string(),
                r.bound_t.to_string(),
                b(r.pass),
            ]
        }),
    )?);
    Ok(out)
}

pub fn diagnose_csv(config: &ExperimentConfig, rows: &[DiagnosticRow]) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    write_preamble(&mut out, config, &DIAGNOSE_COLUMNS).expect("write to Vec");
    out.extend(csv_body(
        &DIAGNOSE_COLUMNS,
        rows.iter().map(|r| {
            vec![
                r.packet_len.to_string(),
                if r.eps.is_nan() {
                    String::new()
                } else {
                    r.eps.to_string()
                },
                r.quantity.clone(),
                r.value.to_string(),
                r.bound.to_string(),
                (r.pass as u8).to_string(),
            ]
        }),
    )?);
    Ok(out)
}

/// A JSON document wrapped with the same metadata as the CSV preamble.
pub fn json_document<T: Serialize>(config: &ExperimentConfig, payload: &T) -> Result<Vec<u8>> {
    let doc = serde_json::json!({
        "version": env!("CARGO_PKG_VERSION"),
        "config_hash": config.hash(),
        "config": config,
        "result": payload,
    });
    let mut out =
        serde_json::to_vec_pretty(&doc).map_err(|e| Error::InvalidConfig(format!("json: {e}")))?;
    out.push(b'\n');
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loglog_fit() {
        let xs = [1.0, 2.0, 4.0, 8.0];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 3.0 * x.powf(-0.5)).collect();
        assert!((fit_loglog(&xs, &ys).unwrap() + 0.5).abs() < 1e-12);
        assert_eq!(fit_loglog(&[1.0], &[1.0]), None);
        assert_eq!(fit_loglog(&[1.0, 2.0], &[0.0, 1.0]), None);
    }

    #[test]
    fn hash_is_stable_and_sensitive() {
        let a = ExperimentConfig::defaults("sweep");
        let mut b = a.clone();
        assert_eq!(a.hash(), b.hash());
        b.seed = 1;
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
        // keys sorted
        let json = a.canonical_json();
        assert!(json.find("\"command\"").unwrap() < json.find("\"seed\"").unwrap());
    }

    #[test]
    fn partial_overrides() {
        let mut c = ExperimentConfig::defaults("run");
        let p: PartialConfig =
            serde_json::from_str(r#"{"seed": 9, "gammas": [8.0], "propagator": "exact"}"#).unwrap();
        c.apply(p);
        assert_eq!(
            (c.seed, c.gammas.clone(), c.propagator),
            (9, vec![8.0], Propagator::Exact)
        );
        assert!(serde_json::from_str::<PartialConfig>(r#"{"sed": 9}"#).is_err());
    }

    #[test]
    fn instances_are_reproducible() {
        let mut c = ExperimentConfig::defaults("sweep");
        c.leaves = vec![4, 16];
        c.instances = 3;
        let a = c.instances().unwrap();
        assert_eq!(a.len(), 6);
        assert_eq!(a, c.instances().unwrap());
        c.seed = 5;
        assert_ne!(a, c.instances().unwrap());
        c.leaves = vec![12];
        assert_eq!(c.instances().unwrap_err(), Error::NonPowerOfTwo(12));
    }

    #[test]
    fn empty_gamma_grid_is_rejected() {
        let mut c = ExperimentConfig::defaults("sweep");
        c.gammas.clear();
        assert!(matches!(sweep(&c), Err(Error::InvalidConfig(_))));
    }
}
