//! Command-line front end. Every command prints one JSON document; the exit
//! code is 0 when the inequality holds or the verdict is PASSED, 2 on a
//! violation or FAILED verdict, 3 on an INCONCLUSIVE verdict and 1 on usage or
//! data errors.

use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::parse_scalar_fn;
use crate::functions::{
    kappa, kappa_integral, parse_function, power_integral, Domain, PowerVariant, QuadratureSpec,
    ScalarFn,
};
use crate::matcore::{clamp_tol, eigenvalues, read_matrix, write_matrix, Partition, SymMatrix};
use crate::monotone::{check_ssa_sufficient, test_matrix_monotone, Verdict};
use crate::report::to_json;
use crate::search::{falsify, scan, Family, ScanConfig, SearchConfig, DEFAULT_EPS};
use crate::ssa::{diagnose, log_equality_residual, ssa_gap, DEFAULT_STRUCTURE_TOL};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_VIOLATION: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "ssa-lab",
    version,
    about = "Check strong subadditivity trace inequalities for matrix functions"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Relative tolerance for the holds/equality verdicts.
    #[arg(long, global = true, default_value_t = 1e-8)]
    pub tol_rel: f64,
    /// Seed for every random draw.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Reproducible output: no timestamp, seeds required.
    #[arg(long, global = true)]
    pub ci: bool,
    /// Write the JSON document here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
}

/// A function given either by catalog spec or by expression.
#[derive(Debug, Args, Clone)]
pub struct FnArgs {
    /// Catalog function, `name[:key=value,...]`.
    #[arg(long)]
    pub function: Option<String>,
    /// Expression in `x`, for example "-(x+1)*log(x+1)".
    #[arg(long, allow_hyphen_values = true)]
    pub expr: Option<String>,
    /// Domain of an expression: "(0,inf)" or "[0,inf)".
    #[arg(long, default_value = "(0,inf)")]
    pub domain: String,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate the gap for one matrix and partition.
    Check {
        matrix: PathBuf,
        /// Block sizes `d1,d2,d3`.
        partition: String,
        /// Catalog function (alternative to --function).
        #[arg(id = "function_name", value_name = "FUNCTION")]
        function: Option<String>,
        #[command(flatten)]
        f: FnArgs,
        #[arg(long, default_value = "compressed")]
        form: String,
    },
    /// Evaluate the gap over many generated instances.
    Scan {
        #[command(flatten)]
        f: FnArgs,
        #[arg(long, default_value = "generic_spd")]
        family: String,
        #[arg(long, default_value = "1,1,1")]
        dims: String,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = DEFAULT_EPS)]
        eps: f64,
        #[arg(long, default_value = "compressed")]
        form: String,
        /// Also write the gap histogram as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Hill-climb towards a violation.
    Search {
        #[command(flatten)]
        f: FnArgs,
        #[arg(long, default_value = "generic_spd")]
        family: String,
        #[arg(long, default_value = "1,1,1")]
        dims: String,
        #[arg(long, default_value_t = 10_000)]
        iters: usize,
        #[arg(long, default_value_t = 0.1)]
        step: f64,
        #[arg(long, default_value_t = DEFAULT_EPS)]
        eps: f64,
        /// Start from this matrix instead of a random draw.
        #[arg(long)]
        start: Option<PathBuf>,
        /// Write the best matrix here if it violates the inequality.
        #[arg(long)]
        emit_matrix: Option<PathBuf>,
    },
    /// Loewner-matrix test of matrix monotonicity.
    Monotone {
        #[command(flatten)]
        f: FnArgs,
        /// Test `−f′`, the sufficient condition for the inequality.
        #[arg(long)]
        neg_derivative: bool,
        #[arg(long, default_value = "1e-3,1e3")]
        interval: String,
        #[arg(long, default_value_t = 5)]
        order: usize,
        #[arg(long, default_value_t = 500)]
        trials: usize,
    },
    /// Equality diagnostics for a matrix.
    Equality {
        #[arg(long)]
        matrix: PathBuf,
        /// Block sizes `d1,d2,d3`.
        #[arg(long)]
        split: String,
        #[arg(long, default_value_t = DEFAULT_STRUCTURE_TOL)]
        tol: f64,
    },
    /// Compare an integral representation with the closed form.
    Represent {
        /// `power` or `kappa`.
        #[arg(long)]
        check: String,
        #[arg(long)]
        x: f64,
        #[arg(long, default_value_t = 0.5)]
        t: f64,
        #[arg(long, default_value = "resolvent")]
        variant: String,
    },
    /// Exact reproduction of the three-by-three counterexample.
    Ando,
}

/// Result of one invocation: the JSON document and the exit code.
#[derive(Debug)]
pub struct Outcome {
    pub code: i32,
    pub json: String,
}

fn parse_pair(s: &str, what: &str) -> Result<(f64, f64)> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let bad = || Error::ParamOutOfRange(format!("{what} must be `lo,hi`, got `{s}`"));
    if parts.len() != 2 {
        return Err(bad());
    }
    let lo = parts[0].parse().map_err(|_| bad())?;
    let hi = parts[1].parse().map_err(|_| bad())?;
    Ok((lo, hi))
}

fn resolve_function(positional: Option<&str>, f: &FnArgs) -> Result<ScalarFn> {
    let catalog = match (positional, f.function.as_deref()) {
        (Some(_), Some(_)) => {
            return Err(Error::ParamOutOfRange("function given twice".into()));
        }
        (a, b) => a.or(b),
    };
    match (catalog, f.expr.as_deref()) {
        (Some(spec), None) => parse_function(spec),
        (None, Some(text)) => parse_scalar_fn(text, f.domain.parse::<Domain>()?),
        (Some(_), Some(_)) => Err(Error::ParamOutOfRange(
            "give either a catalog function or --expr, not both".into(),
        )),
        (None, None) => Err(Error::ParamOutOfRange(
            "a function is required: --function NAME or --expr TEXT".into(),
        )),
    }
}

fn load_checked(path: &PathBuf) -> Result<SymMatrix> {
    let a = read_matrix(path)?;
    let ev = eigenvalues(&a)?;
    let norm = ev.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if ev[0] < -clamp_tol(norm) {
        return Err(Error::domain(ev[0], "matrix is not positive semidefinite"));
    }
    Ok(a)
}

fn seed_for(global: &Global, command: &str) -> Result<u64> {
    match global.seed {
        Some(s) => Ok(s),
        None if global.ci => Err(Error::ParamOutOfRange(format!(
            "--seed is required for `{command}` under --ci"
        ))),
        None => Ok(SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map_or(0, |d| d.as_nanos() as u64)),
    }
}

#[derive(Serialize)]
struct RepresentReport {
    check: &'static str,
    x: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    t: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    variant: Option<PowerVariant>,
    value: f64,
    exact: f64,
    abs_err: f64,
    error_estimate: f64,
    evals: usize,
}

#[derive(Serialize)]
struct SearchOutput<'a> {
    #[serde(flatten)]
    result: &'a crate::search::SearchResult,
    emitted: Option<String>,
}

/// Runs a parsed command. The JSON has no timestamp; see [`run_args`].
pub fn execute(cli: &Cli) -> Result<Outcome> {
    let g = &cli.global;
    let ok_if = |holds: bool| if holds { EXIT_OK } else { EXIT_VIOLATION };
    match &cli.command {
        Command::Check {
            matrix,
            partition,
            function,
            f,
            form,
        } => {
            let func = resolve_function(function.as_deref(), f)?;
            let a = load_checked(matrix)?;
            let p: Partition = partition.parse()?;
            p.check(&a)?;
            let r = ssa_gap(&func, &a, &p, form.parse()?, g.tol_rel)?.with_diagnostics(
                &a,
                &p,
                DEFAULT_STRUCTURE_TOL,
            )?;
            Ok(Outcome {
                code: ok_if(r.holds),
                json: to_json(&r),
            })
        }
        Command::Scan {
            f,
            family,
            dims,
            trials,
            eps,
            form,
            csv,
        } => {
            let func = resolve_function(None, f)?;
            let cfg = ScanConfig {
                family: family.parse()?,
                dims: dims.parse()?,
                trials: *trials,
                seed: seed_for(g, "scan")?,
                eps: *eps,
                form: form.parse()?,
                tol_rel: g.tol_rel,
            };
            let s = scan(&func, &cfg)?;
            if let Some(path) = csv {
                std::fs::write(path, s.histogram_csv())?;
            }
            Ok(Outcome {
                code: ok_if(s.violations == 0),
                json: to_json(&s),
            })
        }
        Command::Search {
            f,
            family,
            dims,
            iters,
            step,
            eps,
            start,
            emit_matrix,
        } => {
            let func = resolve_function(None, f)?;
            let fam: Family = family.parse()?;
            let mut cfg = SearchConfig::new(fam, dims.parse()?, *iters, seed_for(g, "search")?);
            cfg.step0 = *step;
            cfg.eps = *eps;
            cfg.tol_rel = g.tol_rel;
            cfg.start = start.as_ref().map(read_matrix).transpose()?;
            let r = falsify(&func, &cfg)?;
            let mut emitted = None;
            if let (Some(path), true) = (emit_matrix, r.violated) {
                write_matrix(path, &r.best_matrix)?;
                emitted = Some(path.display().to_string());
            }
            Ok(Outcome {
                code: ok_if(!r.violated),
                json: to_json(&SearchOutput {
                    result: &r,
                    emitted,
                }),
            })
        }
        Command::Monotone {
            f,
            neg_derivative,
            interval,
            order,
            trials,
        } => {
            let func = resolve_function(None, f)?;
            let iv = parse_pair(interval, "interval")?;
            let seed = seed_for(g, "monotone")?;
            let v = if *neg_derivative {
                check_ssa_sufficient(&func, iv, *order, *trials, seed)?
            } else {
                test_matrix_monotone(
                    |x| func.value(x),
                    |x| func.derivative(x),
                    iv,
                    *order,
                    *trials,
                    seed,
                )?
            };
            let code = match v.verdict {
                Verdict::Passed => EXIT_OK,
                Verdict::Failed => EXIT_VIOLATION,
                Verdict::Inconclusive => EXIT_INCONCLUSIVE,
            };
            Ok(Outcome {
                code,
                json: to_json(&v),
            })
        }
        Command::Equality { matrix, split, tol } => {
            let a = load_checked(matrix)?;
            let p: Partition = split.parse()?;
            p.check(&a)?;
            // surface a singular A22 as an error rather than a null residual
            log_equality_residual(&a, &p)?;
            let d = diagnose(&a, &p, *tol)?;
            #[derive(Serialize)]
            struct EqualityOutput<'a> {
                dim: usize,
                partition: [usize; 3],
                #[serde(flatten)]
                diagnostics: &'a crate::ssa::EqualityDiagnostics,
                krylov: &'a Option<crate::ssa::KrylovStructure>,
            }
            Ok(Outcome {
                code: EXIT_OK,
                json: to_json(&EqualityOutput {
                    dim: a.dim(),
                    partition: p.as_array(),
                    diagnostics: &d,
                    krylov: &d.krylov,
                }),
            })
        }
        Command::Represent {
            check,
            x,
            t,
            variant,
        } => {
            let quad = QuadratureSpec::default();
            let report = match check.as_str() {
                "power" => {
                    let v: PowerVariant = variant.parse()?;
                    let r = power_integral(*x, *t, v, &quad)?;
                    let exact = x.powf(*t);
                    RepresentReport {
                        check: "power",
                        x: *x,
                        t: Some(*t),
                        variant: Some(v),
                        value: r.value,
                        exact,
                        abs_err: (r.value - exact).abs(),
                        error_estimate: r.error_estimate,
                        evals: r.evals,
                    }
                }
                "kappa" => {
                    let r = kappa_integral(*x, &quad)?;
                    let exact = kappa(*x);
                    RepresentReport {
                        check: "kappa",
                        x: *x,
                        t: None,
                        variant: None,
                        value: r.value,
                        exact,
                        abs_err: (r.value - exact).abs(),
                        error_estimate: r.error_estimate,
                        evals: r.evals,
                    }
                }
                other => {
                    return Err(Error::ParamOutOfRange(format!(
                        "--check must be `power` or `kappa`, got `{other}`"
                    )))
                }
            };
            Ok(Outcome {
                code: ok_if(report.abs_err <= 1e-6),
                json: to_json(&report),
            })
        }
        Command::Ando => Ok(Outcome {
            code: EXIT_OK,
            json: to_json(&crate::exact::ando_report()?),
        }),
    }
}

/// Adds a leading `"timestamp"` field (seconds since the epoch).
fn stamp(json: &str) -> String {
    let ts = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_secs());
    match json.strip_prefix('{') {
        Some(rest) if rest.starts_with('}') => format!("{{\"timestamp\":{ts}}}"),
        Some(rest) => format!("{{\"timestamp\":{ts},{rest}"),
        None => json.to_string(),
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var("SSA_LAB_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
    {
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
}

/// Full pipeline for a process: parse `args`, run, write the JSON to stdout
/// or `--output`, and return the exit code. Diagnostics go to stderr.
pub fn run_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    configure_threads();
    match execute(&cli) {
        Ok(out) => {
            let text = if cli.global.ci {
                out.json
            } else {
                stamp(&out.json)
            };
            match &cli.global.output {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, format!("{text}\n")) {
                        eprintln!("error: cannot write {}: {e}", path.display());
                        return EXIT_ERROR;
                    }
                }
                None => println!("{text}"),
            }
            out.code
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}
