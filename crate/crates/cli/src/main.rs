//! `ab-polya`: certification runs, verification sweeps and data emission.
//!
//! Exit codes: 0 when every check passes, 1 when a mathematical check fails,
//! 2 on usage or I/O errors.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use ab_polya::bessel::{Side, ZeroKind};
use ab_polya::emit;
use ab_polya::enclosures::Precision;
use ab_polya::gapcert::{
    certify_large_lambda, certify_small_lambda, float_cross_check, parse_table, recheck_chain,
    run_chain, table1, validate_table, Certificate, GapChain,
};
use ab_polya::lattice::Flux;
use ab_polya::rational::{format_rational, parse_rational, Rational};
use ab_polya::verify::{q_on_grid, sandwich_rows, verify_polya_dirichlet, verify_polya_neumann};
use ab_polya::Error;

#[derive(Parser)]
#[command(name = "ab-polya", version, about = "Polya-type bounds for the Aharonov-Bohm disk")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Produce machine-checkable certificates.
    #[command(subcommand)]
    Certify(CertifyCmd),
    /// Re-verify a stepping table.
    #[command(subcommand)]
    Validate(ValidateCmd),
    /// Empirical Polya sweeps over the disk spectra.
    Check(CheckArgs),
    /// Write plotting data as CSV.
    #[command(subcommand)]
    Emit(EmitCmd),
}

#[derive(Args, Clone)]
struct PrecisionArg {
    /// Enclosure width, e.g. 2^-40 or 1/1000000.
    #[arg(long, default_value = "2^-40", value_parser = parse_precision)]
    precision: Precision,
}

#[derive(Subcommand)]
enum CertifyCmd {
    /// Certify Q(lambda) > lambda^2/4 on [from, to] by a stepping chain.
    Gap {
        #[arg(long, value_parser = parse_rat)]
        from: Rational,
        #[arg(long, value_parser = parse_rat)]
        to: Rational,
        #[command(flatten)]
        precision: PrecisionArg,
        /// Chain JSON destination (default: standard output).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Certify the small-lambda endpoint inequalities.
    SmallLambda {
        #[command(flatten)]
        precision: PrecisionArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Certify the large-lambda threshold inequalities at c = 783/1000.
    LargeLambda {
        #[command(flatten)]
        precision: PrecisionArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum ValidateCmd {
    /// Check every row of a step table (default: the bundled fixture).
    Table {
        path: Option<PathBuf>,
        #[command(flatten)]
        precision: PrecisionArg,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SideArg {
    Dirichlet,
    Neumann,
}

impl From<SideArg> for Side {
    fn from(s: SideArg) -> Side {
        match s {
            SideArg::Dirichlet => Side::Dirichlet,
            SideArg::Neumann => Side::Neumann,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Function,
    Derivative,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(value_enum)]
    side: SideArg,
    /// Comma-separated fluxes in [0, 1/2].
    #[arg(long, value_delimiter = ',', value_parser = parse_flux, default_value = "0,1/10,1/4,2/5,1/2")]
    alpha: Vec<Flux>,
    #[arg(long, default_value_t = 1000)]
    nmax: usize,
    /// Also check the lattice sandwich on start:stop:step.
    #[arg(long, value_parser = parse_grid)]
    lambda_grid: Option<Grid>,
    /// Worker threads.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Report CSV destination (default: standard output).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum EmitCmd {
    /// Samples of G_lambda on [0, lambda].
    Gfun {
        #[arg(long)]
        lambda: f64,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Eigenvalues up to lambda_max^2.
    Spectra {
        #[arg(long, value_enum)]
        side: SideArg,
        #[arg(long, value_delimiter = ',', value_parser = parse_flux, default_value = "0,1/4,1/2")]
        alpha: Vec<Flux>,
        #[arg(long, default_value_t = 20.0)]
        lambda_max: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Counting functions against their lattice bounds on start:stop:step.
    Counts {
        #[arg(long, value_enum)]
        side: SideArg,
        #[arg(long, value_delimiter = ',', value_parser = parse_flux, default_value = "1/2")]
        alpha: Vec<Flux>,
        #[arg(long, value_parser = parse_grid)]
        lambda: Grid,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Zeros of J_{m +- alpha} (or their derivatives) as alpha runs over [0, 1/2].
    ZerosVsAlpha {
        #[arg(long, default_value_t = 3)]
        kmax: usize,
        #[arg(long, default_value_t = 3)]
        mmax: usize,
        #[arg(long, default_value_t = 50)]
        steps: usize,
        #[arg(long, value_enum, default_value = "function")]
        kind: KindArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Debug)]
struct Grid(Vec<f64>);

fn parse_rat(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

fn parse_precision(s: &str) -> Result<Precision, String> {
    Precision::new(parse_rat(s)?).map_err(|e| e.to_string())
}

fn parse_flux(s: &str) -> Result<Flux, String> {
    Flux::new(parse_rat(s)?).map_err(|e| e.to_string())
}

fn parse_grid(s: &str) -> Result<Grid, String> {
    let parts: Vec<f64> = s
        .split(':')
        .map(|p| p.trim().parse::<f64>().map_err(|_| format!("bad number {p:?} in grid")))
        .collect::<Result<_, _>>()?;
    match parts[..] {
        [start, stop, step] if start > 0.0 && stop >= start && step > 0.0 => {
            Ok(Grid(ab_polya::verify::float_grid(start, stop, step)))
        }
        [single] if single > 0.0 => Ok(Grid(vec![single])),
        _ => Err("grid must be start:stop:step with 0 < start <= stop, step > 0".into()),
    }
}

/// Errors mapped onto exit codes.
enum Failure {
    Math(String),
    Usage(String),
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_) | Error::Domain(_) | Error::FluxOutOfRange(_) | Error::NonPositivePrecision(_) => {
                Failure::Usage(e.to_string())
            }
            _ => Failure::Math(e.to_string()),
        }
    }
}

type Outcome = Result<(), Failure>;

fn write_output(out: Option<&Path>, text: &str) -> Outcome {
    match out {
        Some(path) => fs::write(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

#[derive(Serialize)]
struct Metadata {
    generator: &'static str,
    version: &'static str,
}

const METADATA: Metadata = Metadata { generator: "ab-polya", version: env!("CARGO_PKG_VERSION") };

#[derive(Serialize)]
struct ChainDocument<'a> {
    claim: String,
    status: &'static str,
    #[serde(flatten)]
    chain: &'a GapChain,
    metadata: Metadata,
}

#[derive(Serialize)]
struct CertificateDocument<'a> {
    #[serde(flatten)]
    certificate: &'a Certificate,
    metadata: Metadata,
}

fn certify_gap(from: &Rational, to: &Rational, p: &Precision, out: Option<&Path>) -> Outcome {
    if from >= to {
        return Err(Failure::Usage(format!(
            "--from {} must be below --to {}",
            format_rational(from),
            format_rational(to)
        )));
    }
    let chain = run_chain(from, to, p)?;
    eprintln!("chain closed in {} steps, end {}", chain.steps.len(), chain.end);
    recheck_chain(&chain).map_err(Failure::Math)?;
    if !float_cross_check(&chain) {
        eprintln!("warning: floating-point Q disagrees with a certified step");
    }
    let doc = ChainDocument {
        claim: format!(
            "Q(lambda) > lambda^2/4 for all lambda in [{}, {}]",
            format_rational(from),
            format_rational(to)
        ),
        status: "certified",
        chain: &chain,
        metadata: METADATA,
    };
    write_output(out, &to_json(&doc))
}

fn certify_endpoint(cert: Certificate, out: Option<&Path>) -> Outcome {
    write_output(out, &to_json(&CertificateDocument { certificate: &cert, metadata: METADATA }))?;
    if cert.certified() {
        Ok(())
    } else {
        Err(Failure::Math(format!("{}: not certified", cert.claim)))
    }
}

fn validate(path: Option<&Path>, p: &Precision) -> Outcome {
    let rows = match path {
        Some(path) => parse_table(&fs::read_to_string(path)?)?,
        None => table1(),
    };
    let report = validate_table(&rows, p);
    let mut stdout = std::io::stdout().lock();
    for row in &report.rows {
        match (&row.failed, row.q) {
            (Some(check), _) => writeln!(
                stdout,
                "row {} lambda={} FAIL check {check}: {}",
                row.step,
                row.lambda,
                row.message.as_deref().unwrap_or("")
            )?,
            (None, Some(q)) => writeln!(stdout, "row {} lambda={} Q={q} ok", row.step, row.lambda)?,
            (None, None) => writeln!(stdout, "row {} lambda={} end", row.step, row.lambda)?,
        }
    }
    match report.first_failure() {
        Some(bad) => Err(Failure::Math(format!(
            "row {} fails check {}",
            bad.step,
            bad.failed.expect("failure")
        ))),
        None => {
            writeln!(stdout, "all {} rows pass; chain reaches {}", report.rows.len(), report.end)?;
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct CheckRow {
    check: String,
    alpha: String,
    checked: usize,
    violations: usize,
    min_margin: f64,
    min_margin_at: String,
}

fn check_one(side: Side, alpha: &Flux, nmax: usize, grid: Option<(&[f64], &[i64])>) -> Vec<CheckRow> {
    eprintln!("checking {side} alpha={alpha}");
    let polya = match side {
        Side::Dirichlet => verify_polya_dirichlet(alpha, nmax),
        Side::Neumann => verify_polya_neumann(alpha, nmax),
    };
    let mut rows = vec![CheckRow {
        check: format!("polya-{side}"),
        alpha: alpha.to_string(),
        checked: nmax,
        violations: polya.violations.len(),
        min_margin: polya.min_margin,
        min_margin_at: format!("n={}", polya.min_margin_at),
    }];
    if let Some((lambdas, q)) = grid {
        let sandwich = sandwich_rows(alpha, lambdas, q);
        let margin = |r: &ab_polya::verify::SandwichRow| match side {
            Side::Dirichlet => ((r.p_dirichlet - r.n_dirichlet as i64) as f64)
                .min(r.weyl - r.p_dirichlet as f64),
            Side::Neumann => ((r.n_neumann as i64 - r.p_neumann) as f64).min((r.p_neumann - r.q) as f64),
        };
        let ok = |r: &ab_polya::verify::SandwichRow| match side {
            Side::Dirichlet => r.n_dirichlet as i64 <= r.p_dirichlet && (r.p_dirichlet as f64) < r.weyl,
            Side::Neumann => r.n_neumann as i64 >= r.p_neumann && r.p_neumann >= r.q,
        };
        let worst = sandwich
            .iter()
            .min_by(|a, b| margin(a).total_cmp(&margin(b)))
            .expect("nonempty grid");
        rows.push(CheckRow {
            check: format!("sandwich-{side}"),
            alpha: alpha.to_string(),
            checked: sandwich.len(),
            violations: sandwich.iter().filter(|r| !ok(r)).count(),
            min_margin: margin(worst),
            min_margin_at: format!("lambda={}", worst.lambda),
        });
    }
    rows
}

fn check(args: &CheckArgs) -> Outcome {
    if args.nmax == 0 || args.jobs == 0 {
        return Err(Failure::Usage("--nmax and --jobs must be positive".into()));
    }
    let side = Side::from(args.side);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs)
        .build()
        .map_err(|e| Failure::Usage(e.to_string()))?;
    let rows: Vec<CheckRow> = pool.install(|| {
        let grid = args.lambda_grid.as_ref().map(|g| {
            eprintln!("certifying Q on {} grid points", g.0.len());
            let q: Vec<i64> = g.0.par_chunks(16).flat_map_iter(|c| q_on_grid(c)).collect();
            (g.0.clone(), q)
        });
        args.alpha
            .par_iter()
            .map(|a| check_one(side, a, args.nmax, grid.as_ref().map(|(l, q)| (&l[..], &q[..]))))
            .collect::<Vec<_>>()
            .into_iter()
            .flatten()
            .collect()
    });
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in &rows {
        w.serialize(row).map_err(|e| Failure::Usage(e.to_string()))?;
    }
    let text = String::from_utf8(w.into_inner().map_err(|e| Failure::Usage(e.to_string()))?)
        .expect("utf-8");
    write_output(args.out.as_deref(), &text)?;
    let bad: usize = rows.iter().map(|r| r.violations).sum();
    if bad == 0 {
        Ok(())
    } else {
        Err(Failure::Math(format!("{bad} violations")))
    }
}

fn emit_data(cmd: &EmitCmd) -> Outcome {
    let (text, out) = match cmd {
        EmitCmd::Gfun { lambda, samples, out } => (emit::gfun_csv(*lambda, *samples)?, out),
        EmitCmd::Spectra { side, alpha, lambda_max, out } => {
            if !(*lambda_max > 0.0) {
                return Err(Failure::Usage("--lambda-max must be positive".into()));
            }
            (emit::spectra_csv((*side).into(), alpha, *lambda_max)?, out)
        }
        EmitCmd::Counts { side, alpha, lambda, out } => {
            (emit::counts_csv((*side).into(), alpha, &lambda.0)?, out)
        }
        EmitCmd::ZerosVsAlpha { kmax, mmax, steps, kind, out } => {
            if *kmax == 0 || *steps == 0 {
                return Err(Failure::Usage("--kmax and --steps must be positive".into()));
            }
            let kind = match kind {
                KindArg::Function => ZeroKind::Function,
                KindArg::Derivative => ZeroKind::Derivative,
            };
            (emit::zeros_vs_alpha_csv(kind, *kmax, *mmax, *steps)?, out)
        }
    };
    write_output(out.as_deref(), &text)
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Certify(CertifyCmd::Gap { from, to, precision, out }) => {
            certify_gap(&from, &to, &precision.precision, out.as_deref())
        }
        Command::Certify(CertifyCmd::SmallLambda { precision, out }) => {
            certify_endpoint(certify_small_lambda(&precision.precision)?, out.as_deref())
        }
        Command::Certify(CertifyCmd::LargeLambda { precision, out }) => {
            certify_endpoint(certify_large_lambda(&precision.precision)?, out.as_deref())
        }
        Command::Validate(ValidateCmd::Table { path, precision }) => {
            validate(path.as_deref(), &precision.precision)
        }
        Command::Check(args) => check(&args),
        Command::Emit(cmd) => emit_data(&cmd),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Math(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
