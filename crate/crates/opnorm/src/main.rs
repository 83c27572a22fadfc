use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use opnorm::harness::{run_suite, Format, SuiteConfig};
use opnorm::json::{certificate_json, matrix, read_json, write_json, MapJson, QuadrupleJson, SpaceSpec, Tensor3Json, TensorJson};
use opnorm::{Error, Result};
use opnorm_core::cb::{cb_norm, level_norm};
use opnorm_core::factor::{gamma2_linf, gamma_rc, split_norm};
use opnorm_core::haagerup::{haagerup3_upper, haagerup_upper};
use opnorm_core::mu::{mu_lower, mu_of_space, mu_upper, MuWindow};
use opnorm_core::pairs::theorem2_blocks;
use opnorm_core::space::Hilbertian;
use opnorm_core::{BoundKind, Certificate, NormEstimate, OptOptions};
use serde_json::{json, Value};

const SEED_VAR: &str = "OPNORM_SEED";

/// Tensor norms on concrete operator spaces.
///
/// Inputs are JSON files; results are printed as JSON on standard output.
#[derive(Parser)]
#[command(name = "opnorm", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Restarts of every multi-start search (routine default when unset).
    #[arg(long, global = true)]
    restarts: Option<usize>,
    /// Iterations per restart.
    #[arg(long, global = true)]
    iters: Option<usize>,
    /// Run seed; falls back to $OPNORM_SEED, then 0.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Stopping tolerance of the searches.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Extra terms in decompositions and factorizations.
    #[arg(long, global = true, default_value_t = 0)]
    rank_slack: usize,
    /// Write the certificate of the result to this file.
    #[arg(long, global = true)]
    certificate: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Minimal, Haagerup and completely bounded norms.
    Norm {
        kind: NormKind,
        /// Tensor file (min, h), three-fold tensor file (h3) or map file (cb).
        input: PathBuf,
        /// Amplification level for `cb` instead of the stabilizing one.
        #[arg(long)]
        level: Option<usize>,
    },
    /// Bounds on the μ-norm of a tensor, or the window for μ(E).
    Mu {
        kind: MuKind,
        /// Tensor file; for `space`, a space file or a standard name such as `rowcap:2`.
        input: String,
    },
    /// Factorization norms through row or column Hilbert spaces.
    Gamma { kind: GammaKind, input: PathBuf },
    /// γ₂ norm of a real matrix as a map ℓ∞ → ℓ∞.
    Gamma2 { input: PathBuf },
    /// Commuting block pair from a quadruple.
    Thm2 {
        #[command(subcommand)]
        action: Thm2Action,
    },
    /// The verification suite.
    Verify {
        #[command(subcommand)]
        action: VerifyAction,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum NormKind {
    Min,
    H,
    H3,
    Cb,
}

#[derive(Clone, Copy, ValueEnum)]
enum MuKind {
    Upper,
    Lower,
    Window,
    Space,
}

#[derive(Clone, Copy, ValueEnum)]
enum GammaKind {
    Row,
    Column,
    Split,
}

#[derive(Subcommand)]
enum Thm2Action {
    Build { input: PathBuf },
}

#[derive(Subcommand)]
enum VerifyAction {
    Run(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Dimensions n of the pinned checks.
    #[arg(long, value_delimiter = ',', default_values_t = [2, 3])]
    dims: Vec<usize>,
    /// Report file; the report goes to standard output when unset.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "json", value_parser = parse_format)]
    format: Format,
    #[arg(long, default_value_t = opnorm_core::mu::DEFAULT_COMMUTANT_SAMPLES)]
    commutant_samples: usize,
    #[arg(long, default_value_t = opnorm_core::mu::DEFAULT_BLOCK_SAMPLES)]
    block_samples: usize,
    #[arg(long, default_value_t = 50)]
    corpus_size: usize,
    #[arg(long, default_value_t = 20)]
    quadruples: usize,
    /// Run checks concurrently; the report order is unchanged.
    #[arg(long)]
    parallel: bool,
}

fn parse_format(s: &str) -> std::result::Result<Format, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Failure classes mapped to exit codes.
enum Failure {
    Usage(Error),
    Gating(usize),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e)
    }
}

impl From<opnorm_core::Error> for Failure {
    fn from(e: opnorm_core::Error) -> Self {
        Failure::Usage(e.into())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Gating(n)) => {
            eprintln!("{n} gating check(s) failed");
            ExitCode::from(1)
        }
    }
}

fn seed(flag: Option<u64>) -> Result<u64> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var(SEED_VAR) {
        Ok(v) => v.trim().parse().map_err(|_| Error::Invalid(format!("{SEED_VAR}={v} is not an unsigned integer"))),
        Err(_) => Ok(0),
    }
}

fn print(value: &Value) {
    println!("{}", serde_json::to_string_pretty(value).expect("values serialize"));
}

fn run(cli: Cli) -> std::result::Result<(), Failure> {
    let g = cli.global;
    let seed = seed(g.seed)?;
    let opts = OptOptions { restarts: g.restarts, iters: g.iters, seed, tol: g.tol, rank_slack: g.rank_slack, ..OptOptions::default() };
    let cert_path = g.certificate.as_deref();
    match cli.command {
        Command::Norm { kind, input, level } => {
            let est = match kind {
                NormKind::Min => {
                    let t = read_json::<TensorJson>(&input)?.to_tensor()?;
                    NormEstimate::exact(t.min_norm(), "kronecker", seed)
                }
                NormKind::H => haagerup_upper(&read_json::<TensorJson>(&input)?.to_tensor()?, &opts)?,
                NormKind::H3 => haagerup3_upper(&read_json::<Tensor3Json>(&input)?.to_tensor()?, &opts)?,
                NormKind::Cb => {
                    let u = read_json::<MapJson>(&input)?.to_map()?;
                    match level {
                        Some(k) => level_norm(&u, k, &opts)?,
                        None => cb_norm(&u, &opts)?,
                    }
                }
            };
            emit(&est, cert_path)?;
        }
        Command::Mu { kind, input } => match kind {
            MuKind::Space => {
                let space = if Path::new(&input).is_file() {
                    read_json::<SpaceSpec>(Path::new(&input))?
                } else {
                    SpaceSpec::Named(input)
                };
                emit_window(&mu_of_space(&space.resolve()?, &opts)?, cert_path, seed)?;
            }
            _ => {
                let t = read_json::<TensorJson>(Path::new(&input))?.to_tensor()?;
                match kind {
                    MuKind::Upper => emit(&mu_upper(&t, &opts)?, cert_path)?,
                    MuKind::Lower => emit(&mu_lower(&t, &opts)?, cert_path)?,
                    _ => {
                        let window = MuWindow { lower: mu_lower(&t, &opts)?, upper: mu_upper(&t, &opts)? };
                        emit_window(&window, cert_path, seed)?;
                    }
                }
            }
        },
        Command::Gamma { kind, input } => {
            let u = read_json::<MapJson>(&input)?.to_map()?;
            let est = match kind {
                GammaKind::Row => gamma_rc(&u, Hilbertian::Row, &opts)?,
                GammaKind::Column => gamma_rc(&u, Hilbertian::Column, &opts)?,
                GammaKind::Split => split_norm(&u, &opts)?,
            };
            emit(&est, cert_path)?;
        }
        Command::Gamma2 { input } => {
            let m = matrix(&read_json::<Vec<Vec<opnorm::json::Entry>>>(&input)?)?;
            emit(&gamma2_linf(&m, &opts)?, cert_path)?;
        }
        Command::Thm2 { action: Thm2Action::Build { input } } => {
            let q: QuadrupleJson = read_json(&input)?;
            let (a1, a2, b1, b2) = (q.alpha1.to_map()?, q.alpha2.to_map()?, q.beta1.to_map()?, q.beta2.to_map()?);
            let blocks = theorem2_blocks(&a1, &a2, &b1, &b2)?;
            let certificate_path = match cert_path {
                Some(p) => {
                    let cert = json!({
                        "kind": "block-pair",
                        "sigma1": MapJson::of(&blocks.sigma1),
                        "sigma2": MapJson::of(&blocks.sigma2),
                        "v": opnorm::json::matrix_json(&blocks.v),
                        "w": opnorm::json::matrix_json(&blocks.w),
                    });
                    write_json(p, &cert)?;
                    Some(p.display().to_string())
                }
                None => None,
            };
            print(&json!({
                "size": blocks.v.rows(),
                "commutator_residual": blocks.commutator_residual(),
                "reconstruction_error": blocks.reconstruction_error(&a1, &a2),
                "certificate_path": certificate_path,
                "seed": seed,
            }));
        }
        Command::Verify { action: VerifyAction::Run(args) } => {
            let config = SuiteConfig {
                seed,
                restarts: g.restarts,
                iters: g.iters,
                commutant_samples: args.commutant_samples,
                block_samples: args.block_samples,
                corpus_size: args.corpus_size,
                quadruples: args.quadruples,
                dims: args.dims,
                out: args.out.clone(),
                format: args.format,
                parallel: args.parallel,
            };
            let report = run_suite(&config)?;
            for c in &report.checks {
                eprintln!("{:<14} {:<28} {:>7} ms", c.status.as_str(), c.check_id, c.runtime_ms);
            }
            if args.out.is_none() {
                print!("{}", report.render(args.format));
            }
            let failed = report.gating_failures().count();
            if failed > 0 {
                return Err(Failure::Gating(failed));
            }
        }
    }
    Ok(())
}

fn save_certificate(cert: &Certificate, path: Option<&Path>) -> Result<Option<String>> {
    match path {
        Some(p) => {
            write_json(p, &certificate_json(cert))?;
            Ok(Some(p.display().to_string()))
        }
        None => Ok(None),
    }
}

fn emit(est: &NormEstimate, cert_path: Option<&Path>) -> Result<()> {
    if !est.trace.converged {
        eprintln!("warning: search stopped on its budget ({} restarts, {} iterations)", est.trace.restarts, est.trace.iterations);
    }
    let certificate_path = save_certificate(&est.certificate, cert_path)?;
    print(&json!({
        "value": est.value,
        "bound_kind": est.bound_kind.as_str(),
        "certificate_path": certificate_path,
        "seed": est.trace.seed,
        "method": est.trace.method,
    }));
    Ok(())
}

fn emit_window(w: &MuWindow, cert_path: Option<&Path>, seed: u64) -> Result<()> {
    let certificate_path = save_certificate(&w.upper.certificate, cert_path)?;
    debug_assert_eq!(w.upper.bound_kind, BoundKind::Upper);
    print(&json!({
        "lower": w.lower.value,
        "upper": w.upper.value,
        "lower_method": w.lower.trace.method,
        "upper_method": w.upper.trace.method,
        "bound_kind": "window",
        "certificate_path": certificate_path,
        "seed": seed,
    }));
    Ok(())
}
