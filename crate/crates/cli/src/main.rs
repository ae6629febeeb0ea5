//! Command-line front end: detection, proof, quadrature, coefficient
//! generation, and catalog verification.
//!
//! Exit codes: 0 on success (including a successful detection whose
//! answer is "not invariant"), 1 when a verification fails (a proof
//! cannot be completed, quadrature does not converge, or a catalog
//! entry misses its expectation), 2 on usage errors.

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use paraminv::catalog::{builtin_catalog, verify_catalog};
use paraminv::derivatives::{derivative_coeffs, MAX_DERIVATIVE_ORDER};
use paraminv::detector::detect;
use paraminv::expr::eval::{evaluate, Bindings};
use paraminv::expr::parser::parse;
use paraminv::expr::render::render;
use paraminv::prover::{prove, verify_certificate, Conclusion, IntegralSpec, ProofCertificate};
use paraminv::quadrature::{
    integrate_folded_semi_infinite, integrate_periodic, ProbeVerdict, QuadResult,
};

#[derive(Parser)]
#[command(
    name = "paraminv",
    version,
    about = "Detects and certifies definite integrals that do not depend on a parameter",
    long_about = "Detects and certifies definite integrals that do not depend on a \
                  parameter.\n\nExpressions use the grammar of the library parser: \
                  numbers, pi, the integration variable, free parameters, + - * / ^, \
                  and the functions ln, atan, acot, sin, cos. Parameters without an \
                  explicit --param-range default to the box -3..3."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, PartialEq, Eq, Default, ValueEnum)]
enum Format {
    #[default]
    Text,
    Structured,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum DomainArg {
    /// integrate from 0 to infinity
    #[value(name = "semi-infinite")]
    SemiInfinite,
    /// integrate over one full period of length 2*pi
    #[value(name = "periodic-2pi")]
    Periodic2pi,
}

#[derive(Args)]
struct SpecArgs {
    /// Integrand expression, e.g. "atan(x^a)/(1+x^2)"
    #[arg(long)]
    expr: String,
    /// Integration variable
    #[arg(long, default_value = "x")]
    var: String,
    /// Integration domain
    #[arg(long, value_enum, default_value = "semi-infinite")]
    domain: DomainArg,
    /// Validity box for a parameter, repeatable: name=lo:hi
    #[arg(long = "param-range", value_name = "NAME=LO:HI")]
    param_range: Vec<String>,
    /// Pinned parameter values: name=value,...
    #[arg(long, value_name = "NAME=VALUE,...")]
    params: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Probe an integral numerically and certify it when it is invariant
    Detect {
        #[command(flatten)]
        spec: SpecArgs,
        /// Number of parameter samples to probe
        #[arg(long, default_value_t = 3)]
        samples: usize,
        /// Agreement tolerance between probe values
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// Seed for the deterministic sampler
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Produce and self-check a machine-checkable invariance certificate
    Prove {
        #[command(flatten)]
        spec: SpecArgs,
        /// Seed for the certificate re-verification points
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Evaluate one integral numerically at pinned parameter values
    Quad {
        #[command(flatten)]
        spec: SpecArgs,
        /// Requested absolute tolerance
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Print the numerator coefficient row of the n-th parameter derivative
    GenCoeffs {
        #[arg(long)]
        n: u32,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Run the detector over every built-in integral family
    VerifyCatalog {
        /// Agreement tolerance for probe and certificate values
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
}

/// A value-level error in otherwise well-formed flags: usage, exit 2.
struct UsageError(String);

fn usage(msg: impl Into<String>) -> UsageError {
    UsageError(msg.into())
}

fn parse_pinned(list: &Option<String>) -> Result<Vec<(String, f64)>, UsageError> {
    let Some(list) = list else {
        return Ok(Vec::new());
    };
    list.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|pair| {
            let (name, value) = pair
                .split_once('=')
                .ok_or_else(|| usage(format!("--params entry '{pair}' is not name=value")))?;
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|_| usage(format!("--params value '{value}' is not a number")))?;
            Ok((name.trim().to_string(), value))
        })
        .collect()
}

fn parse_ranges(ranges: &[String]) -> Result<Vec<(String, f64, f64)>, UsageError> {
    ranges
        .iter()
        .map(|r| {
            let bad = || usage(format!("--param-range '{r}' is not name=lo:hi"));
            let (name, span) = r.split_once('=').ok_or_else(bad)?;
            let (lo, hi) = span.split_once(':').ok_or_else(bad)?;
            let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
            let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
            Ok((name.trim().to_string(), lo, hi))
        })
        .collect()
}

/// Default validity box for parameters the user did not range.
const DEFAULT_BOX: (f64, f64) = (-3.0, 3.0);

fn build_spec(args: &SpecArgs) -> Result<IntegralSpec, UsageError> {
    let integrand = parse(&args.expr, &args.var)
        .map_err(|e| usage(format!("cannot parse --expr: {e}")))?;
    let mut spec = match args.domain {
        DomainArg::SemiInfinite => IntegralSpec::semi_infinite(integrand, &args.var),
        DomainArg::Periodic2pi => IntegralSpec::periodic_two_pi(integrand, &args.var),
    };
    let ranges = parse_ranges(&args.param_range)?;
    let pinned = parse_pinned(&args.params)?;
    let mut declared: Vec<String> = Vec::new();
    for (name, lo, hi) in &ranges {
        spec = spec.with_param(name, *lo, *hi);
        declared.push(name.clone());
    }
    for (name, value) in &pinned {
        if declared.contains(name) {
            return Err(usage(format!(
                "parameter '{name}' is both pinned and ranged"
            )));
        }
        spec = spec.with_param(name, *value, *value);
        declared.push(name.clone());
    }
    for name in spec.integrand.param_names() {
        if !declared.contains(&name) {
            spec = spec.with_param(&name, DEFAULT_BOX.0, DEFAULT_BOX.1);
        }
    }
    spec.validate()
        .map_err(|e| usage(format!("invalid integral specification: {e}")))?;
    Ok(spec)
}

fn bindings_only(args: &SpecArgs) -> Result<Bindings, UsageError> {
    if !args.param_range.is_empty() {
        return Err(usage(
            "quad evaluates at pinned values; use --params name=value, not --param-range",
        ));
    }
    let pinned = parse_pinned(&args.params)?;
    let bindings: Bindings = pinned.iter().map(|(n, v)| (n.as_str(), *v)).collect();
    let integrand = parse(&args.expr, &args.var)
        .map_err(|e| usage(format!("cannot parse --expr: {e}")))?;
    for name in integrand.param_names() {
        if bindings.get(&name).is_none() {
            return Err(usage(format!(
                "parameter '{name}' is unbound; pin it with --params {name}=VALUE"
            )));
        }
    }
    Ok(bindings)
}

fn conclusion_text(c: &Conclusion) -> String {
    match c {
        Conclusion::Value(v) => {
            let numeric = evaluate(v, &Bindings::new())
                .map(|x| format!(" (≈ {x:.15})"))
                .unwrap_or_default();
            format!("value = {}{}", render(v), numeric)
        }
        Conclusion::NotProved => "not proved".to_string(),
    }
}

fn print_certificate_text(cert: &ProofCertificate) {
    for a in &cert.assumptions {
        println!("assumption: {a}");
    }
    for (i, s) in cert.steps.iter().enumerate() {
        println!("step {} [{}]: {}", i + 1, s.rule, s.justification);
        println!("  before: {}", render(&s.before));
        println!("  after:  {}", render(&s.after));
    }
    println!("conclusion: {}", conclusion_text(&cert.conclusion));
}

fn quad_json(r: &QuadResult) -> serde_json::Value {
    serde_json::json!({
        "value": r.value,
        "error_estimate": r.error_estimate,
        "evaluations": r.evaluations,
        "converged": r.converged,
    })
}

fn run(cli: Cli) -> Result<ExitCode, UsageError> {
    match cli.command {
        Command::Detect {
            spec,
            samples,
            tol,
            seed,
            format,
        } => {
            let spec = build_spec(&spec)?;
            let report = detect(&spec, samples, tol, seed);
            match format {
                Format::Structured => println!("{}", report.to_json_string()),
                Format::Text => {
                    let verdict = match report.numeric_verdict {
                        ProbeVerdict::Invariant => "invariant",
                        ProbeVerdict::NotInvariant => "not invariant",
                        ProbeVerdict::Undecided => "undecided",
                    };
                    println!("verdict: {verdict}");
                    for (bindings, value) in &report.probes {
                        let at: Vec<String> = bindings
                            .iter()
                            .map(|(n, v)| format!("{n}={v:.6}"))
                            .collect();
                        let shown = match value {
                            Some(v) => format!("{v:.15}"),
                            None => "failed".to_string(),
                        };
                        println!("probe {{{}}} -> {shown}", at.join(", "));
                    }
                    if let Some(v) = report.value_estimate {
                        println!("value estimate: {v:.15}");
                    }
                    match &report.certificate {
                        Some(cert) => print_certificate_text(cert),
                        None => println!("certificate: none"),
                    }
                }
            }
            Ok(if report.numeric_verdict == ProbeVerdict::Undecided {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            })
        }
        Command::Prove { spec, seed, format } => {
            let spec = build_spec(&spec)?;
            let cert = prove(&spec);
            let proved = matches!(cert.conclusion, Conclusion::Value(_));
            let checked = proved && verify_certificate(&cert, seed).is_ok();
            match format {
                Format::Structured => println!("{}", cert.to_json_string()),
                Format::Text => {
                    print_certificate_text(&cert);
                    if proved {
                        println!(
                            "re-verification: {}",
                            if checked { "passed" } else { "FAILED" }
                        );
                    }
                }
            }
            Ok(if checked {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Quad { spec, tol, format } => {
            let bindings = bindings_only(&spec)?;
            let integrand = parse(&spec.expr, &spec.var)
                .map_err(|e| usage(format!("cannot parse --expr: {e}")))?;
            let result = match spec.domain {
                DomainArg::SemiInfinite => {
                    integrate_folded_semi_infinite(&integrand, &bindings, tol)
                }
                DomainArg::Periodic2pi => integrate_periodic(&integrand, &bindings, 64, tol),
            };
            let result = match result {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("integration failed: {e}");
                    return Ok(ExitCode::from(1));
                }
            };
            match format {
                Format::Structured => println!("{}", quad_json(&result)),
                Format::Text => {
                    println!("value: {:.15}", result.value);
                    println!("error estimate: {:.3e}", result.error_estimate);
                    println!("evaluations: {}", result.evaluations);
                    println!("converged: {}", result.converged);
                }
            }
            Ok(if result.converged {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::GenCoeffs { n, format } => {
            if n == 0 || n > MAX_DERIVATIVE_ORDER {
                return Err(usage(format!(
                    "--n must be in 1..={MAX_DERIVATIVE_ORDER}"
                )));
            }
            let row = derivative_coeffs(n);
            match format {
                Format::Structured => {
                    let coeffs: Vec<String> =
                        row.coeffs.iter().map(|c| c.to_string()).collect();
                    println!(
                        "{}",
                        serde_json::json!({ "n": row.n, "coefficients": coeffs })
                    );
                }
                Format::Text => {
                    let line: Vec<String> =
                        row.coeffs.iter().map(|c| c.to_string()).collect();
                    println!("{}", line.join(" "));
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::VerifyCatalog { tol, format } => {
            let entries = builtin_catalog();
            let report = verify_catalog(&entries, tol);
            match format {
                Format::Structured => {
                    let entries: Vec<serde_json::Value> = report
                        .outcomes
                        .iter()
                        .map(|o| {
                            serde_json::json!({
                                "family": o.family,
                                "passed": o.passed,
                                "detail": o.detail,
                                "deviation": o.deviation,
                            })
                        })
                        .collect();
                    println!(
                        "{}",
                        serde_json::json!({
                            "entries": entries,
                            "passed": report.passed,
                            "failed": report.failed,
                            "worst_deviation": report.worst_deviation,
                        })
                    );
                }
                Format::Text => println!("{}", report.summary()),
            }
            Ok(if report.all_passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
    }
}

fn main() -> ExitCode {
    // Die silently when the reader of a pipe goes away (`paraminv ... | head`),
    // like other line-oriented tools, instead of panicking on the next print.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(UsageError(msg)) => {
            eprintln!("error: {msg}");
            eprintln!("run with --help for the full flag grammar");
            ExitCode::from(2)
        }
    }
}
