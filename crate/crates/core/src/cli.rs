//! Command-line front end. Exit codes: 0 success or all checks pass,
//! 1 a verification failure, 2 a usage or input error.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::constants::arestov_lambda;
use crate::corpus::{generate_corpus, CoefficientLaw, Corpus, CorpusSpec, PolyKind};
use crate::error::{Error, Result};
use crate::norms::{lp_norm, mahler_measure, orlicz_luxemburg_norm, NormResult, OrliczSpec};
use crate::polynomial::Polynomial;
use crate::quadrature::QuadratureSpec;
use crate::verify::{
    sharpness_scan, write_run, write_scan, ReportFormat, ScanFamily, ScanParams, TheoremId, Verifier, VerifyParams,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Overrides the worker thread count.
pub const THREADS_ENV: &str = "POLYTORUS_THREADS";

#[derive(Debug, Parser)]
#[command(name = "polytorus", version, about = "Polynomial norms and Mahler measures on the torus")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// L^p norm of a polynomial.
    Norm {
        #[arg(long)]
        poly: PathBuf,
        #[arg(long)]
        p: f64,
        /// Relative tolerance of the quadrature refinement.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Mahler measure of a polynomial.
    Mahler {
        #[arg(long)]
        poly: PathBuf,
    },
    /// Luxemburg norm for psi(t) = exp(t^alpha) - 1.
    Orlicz {
        #[arg(long)]
        poly: PathBuf,
        #[arg(long)]
        alpha: f64,
    },
    /// Arestov's constant in Gamma and integral form.
    Lambda {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        m: u32,
    },
    /// Generate a seeded random corpus.
    Corpus {
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        deg: u32,
        #[arg(long)]
        count: usize,
        #[arg(long, default_value = "general")]
        kind: PolyKind,
        #[arg(long, default_value = "gaussian")]
        law: CoefficientLaw,
        /// Fixed total degree for homogeneous and multiaffine kinds.
        #[arg(long)]
        exact_degree: Option<u32>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check one inequality over a corpus.
    Verify {
        #[arg(long)]
        theorem: TheoremId,
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        p: f64,
        #[arg(long)]
        q: Option<f64>,
        #[arg(long)]
        theta: Option<f64>,
        /// Report path; `.csv` selects CSV unless `--format` is given.
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long)]
        format: Option<ReportFormat>,
    },
    /// Sharpness scan over a parameterized family.
    Scan {
        #[arg(long)]
        family: ScanFamily,
        /// Comma-separated grid: m values, r^2 values or n values.
        #[arg(long, value_delimiter = ',')]
        grid: Option<Vec<f64>>,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        q: Option<f64>,
        #[arg(long)]
        m: Option<u32>,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long)]
        format: Option<ReportFormat>,
    },
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| Error::invalid(format!("{THREADS_ENV} must be a positive integer, got `{raw}`")))?;
    // a second call in the same process keeps the first pool
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    Ok(())
}

fn print_norm(out: &mut impl Write, r: &NormResult) -> std::io::Result<()> {
    writeln!(out, "value: {}", r.value)?;
    writeln!(out, "method: {}", r.method)?;
    writeln!(out, "error_estimate: {:e}", r.error_estimate)?;
    writeln!(out, "converged: {}", r.converged)?;
    if r.flags.clamped_nodes > 0 {
        writeln!(out, "clamped_nodes: {}", r.flags.clamped_nodes)?;
    }
    if r.flags.near_unit_roots {
        writeln!(out, "near_unit_roots: true")?;
    }
    if r.flags.fallback {
        writeln!(out, "fallback: true")?;
    }
    Ok(())
}

fn execute(command: Command, out: &mut impl Write) -> Result<i32> {
    let io = |e: std::io::Error| Error::io("<stdout>", e);
    match command {
        Command::Norm { poly, p, tol } => {
            let poly = Polynomial::read_json(&poly)?;
            let mut quad = QuadratureSpec::for_dimension(poly.compress_variables().0.n());
            if let Some(t) = tol {
                quad.rel_tol = t;
                quad.validate()?;
            }
            print_norm(out, &lp_norm(&poly, p, &quad)?).map_err(io)?;
        }
        Command::Mahler { poly } => {
            let poly = Polynomial::read_json(&poly)?;
            print_norm(out, &mahler_measure(&poly)?).map_err(io)?;
        }
        Command::Orlicz { poly, alpha } => {
            let poly = Polynomial::read_json(&poly)?;
            let quad = QuadratureSpec::for_dimension(poly.compress_variables().0.n());
            print_norm(out, &orlicz_luxemburg_norm(&poly, &OrliczSpec::new(alpha)?, &quad)?).map_err(io)?;
        }
        Command::Lambda { p, m } => {
            let l = arestov_lambda(p, m)?;
            writeln!(out, "gamma_form: {}", l.value_gamma_form).map_err(io)?;
            writeln!(out, "integral_form: {}", l.value_integral_form).map_err(io)?;
            writeln!(out, "gap: {:e}", l.consistency_gap).map_err(io)?;
        }
        Command::Corpus {
            seed,
            n,
            deg,
            count,
            kind,
            law,
            exact_degree,
            out: path,
        } => {
            let spec = CorpusSpec {
                coefficient_law: law,
                exact_degree,
                ..CorpusSpec::new(seed, n, deg, count, kind)
            };
            let corpus = generate_corpus(&spec)?;
            corpus.write(&path)?;
            writeln!(
                out,
                "wrote {} polynomials to {} (spec {})",
                corpus.len(),
                path.display(),
                &corpus.manifest.spec_hash[..16]
            )
            .map_err(io)?;
        }
        Command::Verify {
            theorem,
            corpus,
            p,
            q,
            theta,
            report,
            format,
        } => {
            let corpus = Corpus::read(&corpus)?;
            let params = VerifyParams { p, q, theta };
            let run = Verifier::new(corpus.polynomials).check(theorem, &params)?;
            if run.checked == 0 {
                return Err(Error::EmptyResult(theorem.to_string()));
            }
            let failed = run.failures().count();
            writeln!(
                out,
                "{theorem}: checked {}, skipped {}, checks {}, failed {failed}, max ratio {}",
                run.checked,
                run.skipped,
                run.checks.len(),
                run.max_ratio()
            )
            .map_err(io)?;
            for f in run.failures() {
                writeln!(
                    out,
                    "FAIL index {} [{}] ratio {} slack {:e}",
                    f.index,
                    f.params.label(),
                    f.ratio,
                    f.slack
                )
                .map_err(io)?;
            }
            if let Some(path) = report {
                let format = format.unwrap_or_else(|| ReportFormat::from_path(&path));
                write_run(&run, &path, format)?;
            }
            return Ok(if failed == 0 { EXIT_OK } else { EXIT_FAIL });
        }
        Command::Scan {
            family,
            grid,
            p,
            q,
            m,
            eps,
            samples,
            seed,
            report,
            format,
        } => {
            let params = ScanParams {
                p,
                q,
                m,
                eps,
                grid,
                samples,
                seed,
            };
            let table = sharpness_scan(family, &params)?;
            for r in &table.rows {
                let reference = r.reference.map(|x| x.to_string()).unwrap_or_else(|| "-".into());
                writeln!(
                    out,
                    "{} value {} reference {reference} error {:e} ({})",
                    r.params.label(),
                    r.value,
                    r.error_estimate,
                    r.method
                )
                .map_err(io)?;
            }
            if let Some(path) = report {
                let format = format.unwrap_or_else(|| ReportFormat::from_path(&path));
                write_scan(&table, &path, format)?;
            }
        }
    }
    Ok(EXIT_OK)
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return EXIT_USAGE;
    }
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match execute(cli.command, &mut out) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}
