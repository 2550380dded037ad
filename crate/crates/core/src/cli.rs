// Copyright 2026 The symchar Developers
// SPDX-License-Identifier: Apache-2.0

//! The `symchar` command line.
//!
//! Exit codes: 0 success or diagnostic pass, 1 usage error, 2 data error,
//! 3 diagnostic fail.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use crate::error::Error;
use crate::estimator::{
    correlation_scale, linear_invert, markovianity_test, mle_fit, normalize_reference, scaling_law_test,
    DiagnosticVerdict, MleOptions, SubsetPolicy,
};
use crate::io::{
    emit_plot_data, estimate_from_file, write_trials_file, ExperimentConfig, Method, PlotKind, Report, TrialHeader,
};
use crate::omega::{chernoff_sample_size, omega_exact, omega_inv_exact, union_bound_sample_size};
use crate::twirl::{reference_run, simulate};
use crate::Scalar;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_DIAGNOSTIC_FAIL: i32 = 3;

/// Default tolerance of the correlation-scale test, in standard errors.
pub const DEFAULT_SCALE_TOLERANCE: f64 = 2.0;

#[derive(Debug, Parser)]
#[command(name = "symchar", version, about = "Twirled characterisation of n-qubit noise")]
struct Cli {
    /// Worker threads (defaults to the number of cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the exact Ω matrix (or its inverse) for n qubits.
    Omega {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        inverse: bool,
        #[arg(long, value_enum, default_value_t = OmegaFormat::Rational)]
        format: OmegaFormat,
    },
    /// Run the protocol described by a TOML config and write trial files.
    Simulate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Estimate c and p from a trial file and write a report.
    Estimate {
        #[arg(long)]
        trials: PathBuf,
        /// Reference run used to normalise out SPAM.
        #[arg(long)]
        reference: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = MethodArg::Mle)]
        method: MethodArg,
        #[arg(long)]
        report: PathBuf,
        /// Sample this many subsets per trial instead of the default policy.
        #[arg(long)]
        subsets: Option<usize>,
        /// Skip confidence contours.
        #[arg(long)]
        no_contours: bool,
    },
    /// Run one diagnostic on a report; exit 3 when it fails.
    Diagnose {
        #[arg(long)]
        report: PathBuf,
        #[arg(long, value_enum)]
        test: TestArg,
        /// Report for the m-fold composed channel (markov).
        #[arg(long)]
        against: Option<PathBuf>,
        #[arg(long, default_value_t = 2)]
        m: u32,
        /// Allowance in standard errors (scale-b).
        #[arg(long, default_value_t = DEFAULT_SCALE_TOLERANCE)]
        tolerance: f64,
        /// Write the verdict as JSON here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Trials needed for accuracy delta with failure probability epsilon.
    Samplesize {
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        epsilon: f64,
        /// Bound all n + 1 parameters at once (union bound).
        #[arg(long)]
        n: Option<usize>,
    },
    /// Write CSV data behind a plot.
    Plotdata {
        #[arg(long)]
        report: PathBuf,
        #[arg(long)]
        kind: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OmegaFormat {
    Rational,
    Decimal,
    Csv,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodArg {
    Linear,
    Mle,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TestArg {
    Scaling,
    Markov,
    ScaleB,
}

enum Failure {
    Usage(String),
    Data(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Data(e)
    }
}

fn usage(e: Error) -> Failure {
    Failure::Usage(e.to_string())
}

/// Runs the CLI on `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cli.threads {
        if t == 0 {
            eprintln!("error: --threads must be at least 1");
            return EXIT_USAGE;
        }
        pool = pool.num_threads(t);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_DATA;
        }
    };
    match pool.install(|| dispatch(cli.command)) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Data(e)) => {
            eprintln!("error: {e}");
            EXIT_DATA
        }
    }
}

fn dispatch(cmd: Command) -> Result<i32, Failure> {
    match cmd {
        Command::Omega { n, inverse, format } => {
            let m = if inverse { omega_inv_exact(n) } else { omega_exact(n) }.map_err(usage)?;
            let text = match format {
                OmegaFormat::Rational => m.to_string(),
                OmegaFormat::Decimal => m.cast(Scalar::to_f64).to_string(),
                OmegaFormat::Csv => m
                    .rows()
                    .map(|r| r.iter().map(|x| x.to_f64().to_string()).collect::<Vec<_>>().join(",") + "\n")
                    .collect(),
            };
            print!("{text}");
            Ok(EXIT_OK)
        }
        Command::Simulate { config } => run_simulate(&config),
        Command::Estimate {
            trials,
            reference,
            method,
            report,
            subsets,
            no_contours,
        } => run_estimate(&trials, reference.as_deref(), method, &report, subsets, no_contours),
        Command::Diagnose {
            report,
            test,
            against,
            m,
            tolerance,
            out,
        } => run_diagnose(&report, test, against.as_deref(), m, tolerance, out.as_deref()),
        Command::Samplesize { delta, epsilon, n } => {
            let k = match n {
                Some(n) => union_bound_sample_size(n, delta, epsilon),
                None => chernoff_sample_size(delta, epsilon),
            }
            .map_err(usage)?;
            println!("{k}");
            Ok(EXIT_OK)
        }
        Command::Plotdata { report, kind, out } => {
            let kind: PlotKind = kind.parse().map_err(usage)?;
            let text = emit_plot_data(&Report::load(&report)?, kind)?;
            match out {
                Some(path) => std::fs::write(path, text).map_err(Error::from)?,
                None => print!("{text}"),
            }
            Ok(EXIT_OK)
        }
    }
}

fn run_simulate(path: &Path) -> Result<i32, Failure> {
    let start = Instant::now();
    let config = ExperimentConfig::load(path)?;
    let proto = config.protocol()?;
    let records = simulate(&proto)?;
    write_trials_file(&config.output, &TrialHeader::for_run(&proto, records.len(), false), &records)?;
    if let Some(ref_path) = &config.reference_output {
        let refs = reference_run(&proto)?;
        write_trials_file(ref_path, &TrialHeader::for_run(&proto, refs.len(), true), &refs)?;
    }
    println!(
        "n={} K={} seed={} records={} elapsed={:.3}s",
        proto.num_qubits(),
        proto.trials,
        proto.master_seed,
        records.len(),
        start.elapsed().as_secs_f64()
    );
    Ok(EXIT_OK)
}

fn run_estimate(
    trials: &Path,
    reference: Option<&Path>,
    method: MethodArg,
    report_path: &Path,
    subsets: Option<usize>,
    no_contours: bool,
) -> Result<i32, Failure> {
    let peek = crate::io::TrialReader::open(trials)?.header().clone();
    let policy = match subsets {
        Some(0) => return Err(Failure::Usage("--subsets must be at least 1".into())),
        Some(s) => SubsetPolicy::Sampled {
            subsets: s,
            seed: peek.master_seed,
        },
        None => SubsetPolicy::Auto,
    };
    let (header, raw) = estimate_from_file(trials, policy)?;
    if header.reference {
        return Err(Error::InvalidArgument("--trials names a reference run".into()).into());
    }
    let reference_est = match reference {
        Some(path) => {
            let (h, r) = estimate_from_file(path, policy)?;
            if !h.reference || h.n != header.n || h.variant != header.variant {
                return Err(Error::MixedVariants.into());
            }
            Some(r)
        }
        None => None,
    };
    let est = match &reference_est {
        Some(r) => normalize_reference(&raw, r)?,
        None => raw,
    };
    let linear = linear_invert(&est)?;
    let (method, fit) = match method {
        MethodArg::Linear => (Method::Linear, None),
        MethodArg::Mle => {
            let opts = if no_contours {
                MleOptions::without_contours()
            } else {
                MleOptions::default()
            };
            (Method::Mle, Some(mle_fit(&est.counts, &est.totals, &opts)?))
        }
    };
    let mut report = Report::new(header.master_seed, method, est, reference_est.as_ref(), linear, fit);
    if report.n() >= 2 {
        report.diagnostics.push(scaling_law_test(&report.estimate)?);
    }
    let p = report.p_mle.clone().unwrap_or_else(|| report.p_linear.clone());
    report
        .diagnostics
        .push(correlation_scale(&p, &report.p_linear_stderr, DEFAULT_SCALE_TOLERANCE)?);
    report.save(report_path)?;
    println!(
        "n={} K={} method={:?} p={:?}",
        report.n(),
        report.trials,
        report.method,
        p
    );
    Ok(EXIT_OK)
}

fn run_diagnose(
    report_path: &Path,
    test: TestArg,
    against: Option<&Path>,
    m: u32,
    tolerance: f64,
    out: Option<&Path>,
) -> Result<i32, Failure> {
    let report = Report::load(report_path)?;
    let verdict: DiagnosticVerdict = match test {
        TestArg::Scaling => scaling_law_test(&report.estimate)?,
        TestArg::Markov => {
            let other = against.ok_or_else(|| Failure::Usage("--test markov needs --against".into()))?;
            if m == 0 {
                return Err(Failure::Usage("--m must be at least 1".into()));
            }
            markovianity_test(&report.estimate, &Report::load(other)?.estimate, m)?
        }
        TestArg::ScaleB => {
            let p = report.p_mle.as_ref().unwrap_or(&report.p_linear);
            correlation_scale(p, &report.p_linear_stderr, tolerance).map_err(usage)?
        }
    };
    let text = serde_json::to_string_pretty(&verdict).map_err(Error::from)? + "\n";
    match out {
        Some(path) => std::fs::write(path, &text).map_err(Error::from)?,
        None => print!("{text}"),
    }
    Ok(if verdict.pass { EXIT_OK } else { EXIT_DIAGNOSTIC_FAIL })
}
