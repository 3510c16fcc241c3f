//! The `choi-excl` command line. Every command prints one JSON document with
//! its [`RunManifest`] embedded; `replay` re-runs a saved report and checks
//! the bytes match.
//!
//! Exit codes: 0 success or feasible, 1 infeasible verdict, 2 input error,
//! 3 mathematical precondition failure.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::densegame::{csv_row, run_game, GameReport, CSV_HEADER};
use crate::error::Error;
use crate::exclusion::{
    check_k_exclusion, corollary1_bounds, exclusion_table, lemma1_feasible, lemma1_max_k, reformulate_k_to_1,
    saturation_povm, verify_povm, CorollaryBound, ExclusionMode, ExclusionTable, ExclusionVerdict, Lemma1Report,
    PovmVerdict, DEFAULT_REFORMULATION_CAP,
};
use crate::io::{ChannelSpec, EnsembleSpec, GameSpec, PovmSpec};
use crate::matop::{eig_hermitian, max_eigenvalue, Tolerance};
use crate::quantum::{bell_state, choi_rank, choi_to_kraus, is_cptp, WeylIndex};

pub const THREADS_ENV: &str = "CHOI_EXCL_THREADS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_INFEASIBLE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_PRECONDITION: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "choi-excl", version, about = "Choi-rank bounds and conclusive state exclusion")]
pub struct Cli {
    /// Relative eigenvalue cut for ranks and supports.
    #[arg(long, global = true)]
    pub tol_eig: Option<f64>,
    /// Threshold below which tr[T rho] counts as zero.
    #[arg(long, global = true)]
    pub tol_trace: Option<f64>,
    /// Unix time recorded in the manifest. Falls back to SOURCE_DATE_EPOCH, then the clock.
    #[arg(long, global = true)]
    pub timestamp: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// CPTP check, Choi rank, minimal Kraus count and Bell-basis weights of a channel.
    AnalyzeChannel { spec: PathBuf },
    /// Projector-sum condition and its relaxations for an ensemble.
    ExclusionBound {
        ensemble: PathBuf,
        /// Test this k; without it the largest k passing the condition is reported.
        #[arg(long)]
        k: Option<usize>,
        /// Also build the equivalent 1-exclusion ensemble for --k.
        #[arg(long, requires = "k")]
        reformulate: bool,
        #[arg(long, default_value_t = DEFAULT_REFORMULATION_CAP)]
        cap: usize,
        /// Write the saturating POVM here when the condition holds with equality.
        #[arg(long)]
        emit_povm: Option<PathBuf>,
    },
    /// Does a POVM perform conclusive k-state exclusion on an ensemble?
    CertifyPovm {
        ensemble: PathBuf,
        povm: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value = "weak")]
        mode: ExclusionMode,
    },
    /// Monte-Carlo run of the entanglement-assisted exclusion game.
    Simulate {
        config: PathBuf,
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        /// Directory for report.json and report.csv.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-run the command recorded in a report and compare the output byte for byte.
    Replay { report: PathBuf },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub eig_zero: f64,
    pub psd_slack: f64,
    pub trace_zero: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config_path: String,
    /// SHA-256 of the config file, hex.
    pub config_sha256: String,
    pub seed: Option<u64>,
    pub tool_version: String,
    pub tolerances: Tolerances,
    pub timestamp: u64,
    /// Arguments that reproduce the report (output locations and timestamp dropped).
    pub argv: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
struct Envelope<R> {
    manifest: RunManifest,
    report: R,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Parse {
        path: String,
        source: serde_json::Error,
    },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Lib(#[from] Error),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } | CliError::Parse { .. } | CliError::Usage(_) => EXIT_INPUT,
            CliError::Lib(e) => match e {
                Error::NotHermitian { .. }
                | Error::NotPsd { .. }
                | Error::NotUnitTrace { .. }
                | Error::NotNormalized { .. }
                | Error::NotUnitary { .. }
                | Error::NotTracePreserving { .. }
                | Error::NotUnital { .. }
                | Error::NotCptp { .. }
                | Error::NotSaturated { .. }
                | Error::InvalidPovm { .. }
                | Error::DecoderGap(_)
                | Error::BornNormalization { .. }
                | Error::Unsupported(_) => EXIT_PRECONDITION,
                _ => EXIT_INPUT,
            },
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn read(path: &Path) -> CliResult<Vec<u8>> {
    fs::read(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn parse<T: for<'de> Deserialize<'de>>(path: &Path, bytes: &[u8]) -> CliResult<T> {
    serde_json::from_slice(bytes).map_err(|source| CliError::Parse {
        path: path.display().to_string(),
        source,
    })
}

fn write_file(path: &Path, bytes: &[u8]) -> CliResult<()> {
    fs::write(path, bytes).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn to_json<R: Serialize>(value: &R) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Drops `--timestamp` and `--out` (with their values) from the raw arguments.
fn reproducible_argv(args: &[String]) -> Vec<String> {
    let mut out = Vec::with_capacity(args.len());
    let mut skip_next = false;
    for a in args {
        if skip_next {
            skip_next = false;
            continue;
        }
        if a == "--timestamp" || a == "--out" {
            skip_next = true;
            continue;
        }
        if a.starts_with("--timestamp=") || a.starts_with("--out=") {
            continue;
        }
        out.push(a.clone());
    }
    out
}

fn resolve_timestamp(flag: Option<u64>) -> u64 {
    flag.or_else(|| std::env::var("SOURCE_DATE_EPOCH").ok()?.trim().parse().ok())
        .unwrap_or_else(|| SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0))
}

fn tolerance(cli: &Cli) -> CliResult<Tolerance<f64>> {
    let base = Tolerance::<f64>::default();
    Ok(Tolerance::new(
        cli.tol_eig.unwrap_or(base.eig_zero),
        base.psd_slack,
        cli.tol_trace.unwrap_or(base.trace_zero),
    )?)
}

struct Ctx {
    tol: Tolerance<f64>,
    timestamp: u64,
    argv: Vec<String>,
}

impl Ctx {
    fn manifest(&self, command: &str, config_path: &Path, config: &[u8], seed: Option<u64>) -> RunManifest {
        RunManifest {
            command: command.to_string(),
            config_path: config_path.display().to_string(),
            config_sha256: sha256_hex(config),
            seed,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            tolerances: Tolerances {
                eig_zero: self.tol.eig_zero,
                psd_slack: self.tol.psd_slack,
                trace_zero: self.tol.trace_zero,
            },
            timestamp: self.timestamp,
            argv: self.argv.clone(),
        }
    }
}

struct Output {
    json: String,
    code: i32,
}

/// Parses `args` (without the program name), runs the command, writes the
/// report to `out` and diagnostics to `err`, and returns the exit code.
pub fn run(args: &[String], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let argv: Vec<String> = std::iter::once("choi-excl".to_string()).chain(args.iter().cloned()).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(err, "{e}")
            } else {
                write!(out, "{e}")
            };
            return code;
        }
    };
    match execute(&cli, args) {
        Ok(o) => {
            let _ = out.write_all(o.json.as_bytes());
            o.code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: &Cli, args: &[String]) -> CliResult<Output> {
    let ctx = Ctx {
        tol: tolerance(cli)?,
        timestamp: resolve_timestamp(cli.timestamp),
        argv: reproducible_argv(args),
    };
    match &cli.command {
        Command::AnalyzeChannel { spec } => analyze_channel(&ctx, spec),
        Command::ExclusionBound {
            ensemble,
            k,
            reformulate,
            cap,
            emit_povm,
        } => exclusion_bound(&ctx, ensemble, *k, *reformulate, *cap, emit_povm.as_deref()),
        Command::CertifyPovm { ensemble, povm, k, mode } => certify_povm(&ctx, ensemble, povm, *k, *mode),
        Command::Simulate {
            config,
            trials,
            seed,
            out,
        } => simulate(&ctx, config, *trials, *seed, out.as_deref()),
        Command::Replay { report } => replay(report),
    }
}

#[derive(Debug, Serialize)]
struct BellWeight {
    a: usize,
    b: usize,
    weight: f64,
}

#[derive(Debug, Serialize)]
struct ChannelReport {
    d: usize,
    cptp: bool,
    psd: bool,
    marginal_ok: bool,
    min_eigenvalue: f64,
    marginal_residual: f64,
    choi_rank: usize,
    /// Length of the eigen-derived Kraus form; absent when the map is not CPTP.
    minimal_kraus_count: Option<usize>,
    /// `<Phi_ab|J|Phi_ab>` for every Bell state.
    bell_spectrum: Vec<BellWeight>,
    /// Largest off-diagonal modulus of `J` in the Bell basis.
    bell_off_diagonal: f64,
    choi_eigenvalues: Vec<f64>,
}

fn analyze_channel(ctx: &Ctx, path: &Path) -> CliResult<Output> {
    let bytes = read(path)?;
    let spec: ChannelSpec = parse(path, &bytes)?;
    let j = spec.choi_state()?;
    let d = j.d();
    let verdict = is_cptp(&j, &ctx.tol);
    let rank = choi_rank(&j, &ctx.tol)?;
    let kraus_count = if verdict.cptp {
        Some(choi_to_kraus(&j, &ctx.tol)?.len())
    } else {
        None
    };
    let bell: Vec<_> = WeylIndex::all(d)
        .map(|i| bell_state::<f64>(d, i.a() as i64, i.b() as i64).map(|v| (i, v)))
        .collect::<Result<_, _>>()?;
    let jm = j.matrix().as_matrix();
    let mut off = 0.0f64;
    let mut weights = Vec::with_capacity(bell.len());
    for (p, (ip, vp)) in bell.iter().enumerate() {
        let jv = jm.mul_vec(vp.amplitudes());
        for (q, (_, vq)) in bell.iter().enumerate() {
            let z: num_complex::Complex<f64> = vq.amplitudes().iter().zip(&jv).map(|(a, b)| a.conj() * b).sum();
            if p == q {
                weights.push(BellWeight {
                    a: ip.a(),
                    b: ip.b(),
                    weight: z.re,
                });
            } else {
                off = off.max(z.norm());
            }
        }
    }
    let report = ChannelReport {
        d,
        cptp: verdict.cptp,
        psd: verdict.psd,
        marginal_ok: verdict.marginal_ok,
        min_eigenvalue: verdict.min_eigenvalue,
        marginal_residual: verdict.marginal_residual,
        choi_rank: rank,
        minimal_kraus_count: kraus_count,
        bell_spectrum: weights,
        bell_off_diagonal: off,
        choi_eigenvalues: eig_hermitian(j.matrix()).0.eigenvalues,
    };
    let json = to_json(&Envelope {
        manifest: ctx.manifest("analyze-channel", path, &bytes, None),
        report,
    });
    Ok(Output {
        json,
        code: if verdict.cptp { EXIT_OK } else { EXIT_PRECONDITION },
    })
}

#[derive(Debug, Serialize)]
struct ReformulationSummary {
    k: usize,
    subsets: usize,
    /// The condition at `k = 1` on the reformulated ensemble.
    lemma1_k1: Lemma1Report<f64>,
}

#[derive(Debug, Serialize)]
struct SaturationSummary {
    k: usize,
    emitted: Option<String>,
    povm: Option<PovmVerdict<f64>>,
    reason: Option<String>,
}

#[derive(Debug, Serialize)]
struct BoundReport {
    n: usize,
    dim: usize,
    /// Largest eigenvalue of `sum_x Pi_x`.
    lambda_max: f64,
    max_k: usize,
    lemma1: Option<Lemma1Report<f64>>,
    corollary: CorollaryBound<f64>,
    reformulation: Option<ReformulationSummary>,
    saturation: Option<SaturationSummary>,
}

fn exclusion_bound(
    ctx: &Ctx,
    path: &Path,
    k: Option<usize>,
    reformulate: bool,
    cap: usize,
    emit: Option<&Path>,
) -> CliResult<Output> {
    let bytes = read(path)?;
    let spec: EnsembleSpec = parse(path, &bytes)?;
    let ens = spec.build(&ctx.tol)?;
    let max_k = lemma1_max_k(&ens, &ctx.tol);
    let lemma1 = k.map(|k| lemma1_feasible(&ens, k, &ctx.tol)).transpose()?;
    let reformulation = match (reformulate, k) {
        (true, Some(k)) => {
            let re = reformulate_k_to_1(&ens, k, cap, &ctx.tol)?;
            Some(ReformulationSummary {
                k,
                subsets: re.family.len(),
                lemma1_k1: lemma1_feasible(&re.ensemble, 1, &ctx.tol)?,
            })
        }
        _ => None,
    };
    let saturation = match emit {
        None => None,
        Some(target) => {
            let sk = k.unwrap_or(max_k);
            Some(match saturation_povm(&ens, sk) {
                Ok(p) => {
                    write_file(target, to_json(&PovmSpec::from_povm(&p)).as_bytes())?;
                    SaturationSummary {
                        k: sk,
                        emitted: Some(target.display().to_string()),
                        povm: Some(verify_povm(&p, &ctx.tol)),
                        reason: None,
                    }
                }
                Err(e @ (Error::NotSaturated { .. } | Error::InvalidK { .. })) => SaturationSummary {
                    k: sk,
                    emitted: None,
                    povm: None,
                    reason: Some(e.to_string()),
                },
                Err(e) => return Err(e.into()),
            })
        }
    };
    let code = match &lemma1 {
        Some(r) if !r.feasible => EXIT_INFEASIBLE,
        _ => EXIT_OK,
    };
    let report = BoundReport {
        n: ens.len(),
        dim: ens.dim(),
        lambda_max: max_eigenvalue(&ens.projector_sum()),
        max_k,
        lemma1,
        corollary: corollary1_bounds(&ens, &ctx.tol)?,
        reformulation,
        saturation,
    };
    let json = to_json(&Envelope {
        manifest: ctx.manifest("exclusion-bound", path, &bytes, None),
        report,
    });
    Ok(Output { json, code })
}

#[derive(Debug, Serialize)]
struct CertifyReport {
    povm: PovmVerdict<f64>,
    verdict: ExclusionVerdict<f64>,
    table: ExclusionTable<f64>,
}

fn certify_povm(ctx: &Ctx, ens_path: &Path, povm_path: &Path, k: usize, mode: ExclusionMode) -> CliResult<Output> {
    let bytes = read(ens_path)?;
    let ens = parse::<EnsembleSpec>(ens_path, &bytes)?.build(&ctx.tol)?;
    let povm_bytes = read(povm_path)?;
    let povm = parse::<PovmSpec>(povm_path, &povm_bytes)?.build()?;
    let pv = verify_povm(&povm, &ctx.tol);
    let verdict = check_k_exclusion(&povm, &ens, k, mode, &ctx.tol)?;
    let table = exclusion_table(&povm, &ens, &ctx.tol)?;
    let code = if !pv.valid {
        EXIT_PRECONDITION
    } else if verdict.feasible {
        EXIT_OK
    } else {
        EXIT_INFEASIBLE
    };
    let json = to_json(&Envelope {
        manifest: ctx.manifest("certify-povm", ens_path, &bytes, None),
        report: CertifyReport {
            povm: pv,
            verdict,
            table,
        },
    });
    Ok(Output { json, code })
}

fn thread_pool() -> CliResult<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(raw) = std::env::var(THREADS_ENV) {
        let n: usize = raw
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("{THREADS_ENV}={raw:?} is not a thread count")))?;
        builder = builder.num_threads(n);
    }
    builder.build().map_err(|e| CliError::Usage(e.to_string()))
}

fn simulate(ctx: &Ctx, path: &Path, trials: Option<u64>, seed: Option<u64>, out: Option<&Path>) -> CliResult<Output> {
    let bytes = read(path)?;
    let spec: GameSpec = parse(path, &bytes)?;
    let game = spec.build(trials, seed, &ctx.tol)?;
    let report: GameReport =
        thread_pool()?.install(|| run_game(&game.config, &game.povm, &game.decoder, &ctx.tol))?;
    let manifest = ctx.manifest("simulate", path, &bytes, Some(game.config.seed));
    let row = csv_row(&report, &manifest.config_sha256, spec.channel.p());
    let code = if report.failures == 0 { EXIT_OK } else { EXIT_INFEASIBLE };
    let json = to_json(&Envelope { manifest, report });
    if let Some(dir) = out {
        fs::create_dir_all(dir).map_err(|source| CliError::Io {
            path: dir.display().to_string(),
            source,
        })?;
        write_file(&dir.join("report.json"), json.as_bytes())?;
        write_file(&dir.join("report.csv"), format!("{CSV_HEADER}\n{row}\n").as_bytes())?;
    }
    Ok(Output { json, code })
}

#[derive(Debug, Serialize)]
struct ReplayReport {
    replayed: String,
    command: String,
    identical: bool,
    exit_code: i32,
}

fn replay(path: &Path) -> CliResult<Output> {
    let original = read(path)?;
    let saved: Envelope<serde_json::Value> = parse(path, &original)?;
    let mut args = saved.manifest.argv.clone();
    if args.first().map(String::as_str) == Some("replay") {
        return Err(CliError::Usage("cannot replay a replay".into()));
    }
    args.push("--timestamp".into());
    args.push(saved.manifest.timestamp.to_string());
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let exit_code = run(&args, &mut out, &mut err);
    if out.is_empty() {
        return Err(CliError::Usage(format!(
            "replayed command failed: {}",
            String::from_utf8_lossy(&err).trim()
        )));
    }
    let identical = out == original;
    let json = to_json(&ReplayReport {
        replayed: path.display().to_string(),
        command: saved.manifest.command,
        identical,
        exit_code,
    });
    Ok(Output {
        json,
        code: if identical { EXIT_OK } else { EXIT_INFEASIBLE },
    })
}
