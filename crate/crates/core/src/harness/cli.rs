use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use super::{
    diagnose_csv, json_document, scatter_csv, scatter_rows, sweep, sweep_csv, ExperimentConfig,
    OutputFormat, PartialConfig, SweepOutcome, SweepRow,
};
use crate::dynamics::{run_algorithm, Propagator};
use crate::error::Error;
use crate::nand::{embed_parity, eval_nand, parity_layout, randomized_eval, TreeInput};
use crate::spectral::diagnostics;

#[derive(Parser, Debug)]
#[command(
    name = "nandwalk",
    version,
    about = "Quantum-walk NAND tree evaluation experiments"
)]
struct Cli {
    /// JSON file with configuration overrides (flags take precedence)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write output here instead of standard output
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Classical evaluation of a leaf string
    Eval(EvalArgs),
    /// Scattering bound scan near zero energy
    Scatter(InstanceArgs),
    /// One run of the quantum-walk algorithm
    Run(InstanceArgs),
    /// Grid of runs over instances and gamma
    Sweep(InstanceArgs),
    /// Build the NAND tree for a parity function and verify it
    EmbedParity(ParityArgs),
    /// Packet spectrum inequality checks
    Diagnose(DiagnoseArgs),
}

#[derive(Args, Debug)]
struct EvalArgs {
    /// Leaf string of 0s and 1s, length a power of two
    #[arg(long)]
    input: String,
    /// Also run the randomized evaluator with this seed
    #[arg(long)]
    seed: Option<u64>,
    /// Output format [default: csv, plain value]
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
}

#[derive(Args, Debug)]
struct InstanceArgs {
    /// Leaf string; overrides --n
    #[arg(long)]
    input: Option<String>,
    /// Leaf counts for random instances, comma separated [default: 16]
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<usize>>,
    /// Random instances per leaf count [default: 16]
    #[arg(long)]
    instances: Option<usize>,
    /// Instance seed [default: 0]
    #[arg(long)]
    seed: Option<u64>,
    /// Packet length factors, comma separated [default: 16; sweep: 4,16,64]
    #[arg(long, value_delimiter = ',')]
    gamma: Option<Vec<f64>>,
    /// Runway half-length as a multiple of the packet length [default: 3]
    #[arg(long)]
    m_factor: Option<usize>,
    /// Time propagator [default: cheb]
    #[arg(long, value_enum)]
    propagator: Option<PropagatorArg>,
    /// Propagator truncation tolerance [default: 1e-12]
    #[arg(long)]
    tol: Option<f64>,
    /// Decision threshold on the right-runway probability [default: 0.5]
    #[arg(long)]
    threshold: Option<f64>,
    /// Energy grid size for scans [default: 64]
    #[arg(long)]
    points: Option<usize>,
    /// Lowest scanned energy [default: 1e-8]
    #[arg(long)]
    emin: Option<f64>,
    /// Highest scanned energy, or "auto" for 1/(16 sqrt N) [default: auto]
    #[arg(long)]
    emax: Option<String>,
    /// Output format; run defaults to json [default: csv]
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
}

#[derive(Args, Debug)]
struct ParityArgs {
    /// Parity variables as a 0/1 string
    #[arg(long)]
    bits: Option<String>,
    /// Check every assignment for these sizes, comma separated [default: 2,4,8]
    #[arg(long, value_delimiter = ',')]
    k: Option<Vec<usize>>,
}

#[derive(Args, Debug)]
struct DiagnoseArgs {
    /// Packet lengths, comma separated [default: 16,64,256]
    #[arg(long, value_delimiter = ',')]
    l: Option<Vec<usize>>,
    /// Spectral cutoffs, comma separated [default: 0.1,0.3]
    #[arg(long, value_delimiter = ',')]
    eps: Option<Vec<f64>>,
    /// Grid points for pointwise checks [default: 64]
    #[arg(long)]
    points: Option<usize>,
    /// Output format [default: csv]
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
}

#[derive(clap::ValueEnum, Clone, Copy, Debug)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for OutputFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => OutputFormat::Csv,
            FormatArg::Json => OutputFormat::Json,
        }
    }
}

#[derive(clap::ValueEnum, Clone, Copy, Debug)]
enum PropagatorArg {
    Cheb,
    Exact,
}

impl From<PropagatorArg> for Propagator {
    fn from(p: PropagatorArg) -> Self {
        match p {
            PropagatorArg::Cheb => Propagator::Chebyshev,
            PropagatorArg::Exact => Propagator::Exact,
        }
    }
}

enum Failure {
    Usage(String),
    Check(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::EmptyInput
            | Error::IllegalCharacter { .. }
            | Error::NonPowerOfTwo(_)
            | Error::DepthMismatch { .. }
            | Error::InvalidParityLength(_)
            | Error::OutsideScanWindow { .. }
            | Error::EnergyOutOfBand(_)
            | Error::PacketTooLong { .. }
            | Error::InvalidConfig(_) => Failure::Usage(e.to_string()),
            other => Failure::Runtime(other.to_string()),
        }
    }
}

/// Runs the command line `args` (program name first). Returns the process
/// exit code: 0 success, 1 failed check or runtime error, 2 usage error.
pub fn cli_main<I, S, W, E>(args: I, out: &mut W, err: &mut E) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
    W: Write,
    E: Write,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    0
                }
                _ => {
                    let _ = write!(err, "{e}");
                    2
                }
            };
        }
    };
    match execute(cli, out) {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
        Err(Failure::Check(msg)) => {
            let _ = writeln!(err, "check failed: {msg}");
            1
        }
        Err(Failure::Runtime(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            1
        }
    }
}

fn parse_bits(text: &str) -> Result<Vec<bool>, Failure> {
    text.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            other => Err(Failure::Usage(format!("bad parity bit {other:?}"))),
        })
        .collect()
}

fn load_file(path: &Option<PathBuf>) -> Result<PartialConfig, Failure> {
    let Some(path) = path else {
        return Ok(PartialConfig::default());
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn instance_flags(a: InstanceArgs) -> Result<PartialConfig, Failure> {
    let emax = match a.emax.as_deref() {
        None | Some("auto") => None,
        Some(v) => Some(
            v.parse::<f64>()
                .map_err(|_| Failure::Usage(format!("bad --emax {v:?}")))?,
        ),
    };
    Ok(PartialConfig {
        input: a.input,
        leaves: a.n,
        instances: a.instances,
        seed: a.seed,
        gammas: a.gamma,
        m_factor: a.m_factor,
        propagator: a.propagator.map(Into::into),
        tolerance: a.tol,
        threshold: a.threshold,
        points: a.points,
        emin: a.emin,
        emax,
        format: a.format.map(Into::into),
        ..PartialConfig::default()
    })
}

fn emit(out_path: &Option<PathBuf>, stdout: &mut impl Write, bytes: &[u8]) -> Result<(), Failure> {
    let io = |e: std::io::Error| Failure::Runtime(e.to_string());
    match out_path {
        Some(p) => std::fs::write(p, bytes).map_err(io),
        None => stdout.write_all(bytes).map_err(io),
    }
}

fn render<T: Serialize>(config: &ExperimentConfig, payload: &T) -> Result<Vec<u8>, Failure> {
    Ok(json_document(config, payload)?)
}

fn execute(cli: Cli, stdout: &mut impl Write) -> Result<(), Failure> {
    let file = load_file(&cli.config)?;
    match cli.command {
        Command::Eval(a) => {
            let input = TreeInput::parse(&a.input)?;
            let value = eval_nand(&input);
            let trace = a.seed.map(|s| randomized_eval(&input, s));
            let text = match (a.format, trace) {
                (Some(FormatArg::Json), _) => {
                    let doc = serde_json::json!({
                        "input": a.input,
                        "value": value as u8,
                        "randomized": trace.map(|t| serde_json::json!({"value": t.value as u8, "queries": t.queries})),
                    });
                    format!("{doc}\n")
                }
                (_, Some(t)) => format!(
                    "{}\nrandomized {} queries={}\n",
                    value as u8, t.value as u8, t.queries
                ),
                (_, None) => format!("{}\n", value as u8),
            };
            emit(&cli.out, stdout, text.as_bytes())?;
            if trace.is_some_and(|t| t.value != value) {
                return Err(Failure::Check("randomized evaluation disagrees".into()));
            }
            Ok(())
        }
        Command::Scatter(a) => {
            let mut cfg = ExperimentConfig::defaults("scatter");
            cfg.apply(file);
            cfg.apply(instance_flags(a)?);
            let rows = scatter_rows(&cfg)?;
            let bytes = match cfg.format {
                OutputFormat::Csv => scatter_csv(&cfg, &rows)?,
                OutputFormat::Json => render(&cfg, &rows)?,
            };
            emit(&cli.out, stdout, &bytes)?;
            let bad = rows.iter().filter(|r| !r.pass).count();
            if bad > 0 {
                return Err(Failure::Check(format!(
                    "{bad} of {} rows violate the bounds",
                    rows.len()
                )));
            }
            Ok(())
        }
        Command::Run(a) => {
            let mut cfg = ExperimentConfig::defaults("run");
            cfg.format = OutputFormat::Json;
            cfg.instances = 1;
            cfg.apply(file);
            cfg.apply(instance_flags(a)?);
            let (n, _, input) = cfg
                .instances()?
                .into_iter()
                .next()
                .expect("at least one instance");
            let gamma = *cfg
                .gammas
                .first()
                .ok_or_else(|| Failure::Usage("empty gamma list".into()))?;
            let verdict = run_algorithm(&input, &cfg.run_config(n, gamma)?)?;
            let nand = eval_nand(&input);
            let bytes = match cfg.format {
                OutputFormat::Json => {
                    let mut v = serde_json::to_vec_pretty(&verdict).expect("verdict serializes");
                    v.push(b'\n');
                    v
                }
                OutputFormat::Csv => {
                    let row = SweepRow {
                        n_leaves: n,
                        instance_id: 0,
                        gamma,
                        packet_len: verdict.config.packet_len,
                        half_len: verdict.config.half_len,
                        t_run: verdict.config.t_run,
                        p_right: verdict.p_right,
                        t0_sq: verdict.analytic_t0_sq,
                        decision: verdict.decision,
                        nand,
                        correct: verdict.decision == nand,
                        error: None,
                    };
                    let summary = super::summarize(std::slice::from_ref(&row), &[gamma]);
                    sweep_csv(
                        &cfg,
                        &SweepOutcome {
                            rows: vec![row],
                            summary,
                        },
                    )?
                }
            };
            emit(&cli.out, stdout, &bytes)?;
            if verdict.decision != nand {
                return Err(Failure::Check(format!(
                    "decision {} but NAND value {}",
                    verdict.decision as u8, nand as u8
                )));
            }
            Ok(())
        }
        Command::Sweep(a) => {
            let mut cfg = ExperimentConfig::defaults("sweep");
            cfg.apply(file);
            cfg.apply(instance_flags(a)?);
            let outcome = sweep(&cfg)?;
            let bytes = match cfg.format {
                OutputFormat::Csv => sweep_csv(&cfg, &outcome)?,
                OutputFormat::Json => render(&cfg, &outcome)?,
            };
            emit(&cli.out, stdout, &bytes)
        }
        Command::EmbedParity(a) => {
            let mut cfg = ExperimentConfig::defaults("embed-parity");
            cfg.apply(file);
            cfg.apply(PartialConfig {
                parity_bits: a.bits,
                parity_k: a.k,
                ..PartialConfig::default()
            });
            let mut text = String::new();
            let mut failures = 0usize;
            if let Some(bits) = &cfg.parity_bits {
                let vars = parse_bits(bits)?;
                let tree = embed_parity(&vars)?;
                let want = vars.iter().filter(|&&b| b).count() % 2 == 0;
                let got = eval_nand(&tree);
                failures += (got != want) as usize;
                text += &format!("{tree}\nvalue {} expected {}\n", got as u8, want as u8);
            } else {
                for &k in &cfg.parity_k {
                    parity_layout(k)?;
                    let mut wrong = 0usize;
                    for mask in 0..1u64 << k {
                        let vars: Vec<bool> = (0..k).map(|i| mask >> i & 1 == 1).collect();
                        let want = mask.count_ones() % 2 == 0;
                        wrong += (eval_nand(&embed_parity(&vars)?) != want) as usize;
                    }
                    failures += wrong;
                    text += &format!(
                        "k={k} leaves={} assignments={} mismatches={wrong}\n",
                        k * k,
                        1u64 << k
                    );
                }
            }
            emit(&cli.out, stdout, text.as_bytes())?;
            if failures > 0 {
                return Err(Failure::Check(format!(
                    "{failures} mismatching assignments"
                )));
            }
            Ok(())
        }
        Command::Diagnose(a) => {
            let mut cfg = ExperimentConfig::defaults("diagnose");
            cfg.apply(file);
            cfg.apply(PartialConfig {
                lengths: a.l,
                epss: a.eps,
                points: a.points,
                format: a.format.map(Into::into),
                ..PartialConfig::default()
            });
            let rows = diagnostics(&cfg.lengths, &cfg.epss, cfg.points)?;
            let bytes = match cfg.format {
                OutputFormat::Csv => diagnose_csv(&cfg, &rows)?,
                OutputFormat::Json => render(&cfg, &rows)?,
            };
            emit(&cli.out, stdout, &bytes)?;
            let bad = rows.iter().filter(|r| !r.pass).count();
            if bad > 0 {
                return Err(Failure::Check(format!("{bad} diagnostics out of bounds")));
            }
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = cli_main(
            std::iter::once("nandwalk").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn eval_prints_value() {
        assert_eq!(
            call(&["eval", "--input", "0110"]),
            (0, "0\n".into(), String::new())
        );
        assert_eq!(call(&["eval", "--input", "0011"]).1, "1\n");
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(call(&["eval", "--input", "011"]).0, 2);
        assert_eq!(call(&["frobnicate"]).0, 2);
        let (code, out, err) = call(&["eval"]);
        assert_eq!(code, 2);
        assert!(out.is_empty() && !err.is_empty());
    }

    #[test]
    fn help_lists_defaults() {
        let (code, out, _) = call(&["sweep", "--help"]);
        assert_eq!(code, 0);
        for needle in [
            "--m-factor",
            "[default: 3]",
            "--propagator",
            "[default: cheb]",
            "--tol",
            "[default: 1e-12]",
        ] {
            assert!(out.contains(needle), "missing {needle} in help");
        }
    }
}
