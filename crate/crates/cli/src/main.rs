use std::path::PathBuf;
use std::process::ExitCode;

use apinc::engine::{szemeredi_search, Oracle};
use apinc::format::{parse_phase, parse_range, parse_sequence, read_function, read_set};
use apinc::gowers::{ap_count, gowers_norm_with, NormMethod};
use apinc::nil::{partition_nilsequence, LipschitzFunction, Nilmanifold};
use apinc::oracle::verify;
use apinc::polyphase::partition_polyphase;
use apinc::{Error, PartitionCertificate};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

/// Certified partitions, Gowers norms and density increments.
#[derive(Parser)]
#[command(name = "apinc", version)]
struct Cli {
    /// Seed for every sampled check.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Auto,
    Direct,
    Fft,
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleArg {
    Fft,
    Catalog,
}

#[derive(Subcommand)]
enum Cmd {
    /// Count k-term progressions in a set file.
    Count {
        #[arg(long)]
        set: PathBuf,
        #[arg(long)]
        k: usize,
        /// Only progressions with nonzero difference.
        #[arg(long)]
        nontrivial: bool,
    },
    /// Gowers U^k norm of a function file.
    Gowers {
        #[arg(long = "fn")]
        function: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long, value_enum, default_value = "auto")]
        method: Method,
    },
    /// Partition a range so a polynomial phase is nearly constant on each part.
    PartitionPhase {
        #[arg(long)]
        phase: String,
        #[arg(long)]
        range: String,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Partition a range so a nilsequence is nearly constant on each part.
    PartitionNil {
        /// `torus:D` or `heisenberg`.
        #[arg(long)]
        manifold: String,
        /// Coordinate polynomials separated by `;`.
        #[arg(long)]
        seq: String,
        #[arg(long = "fn")]
        function: String,
        #[arg(long)]
        range: String,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Re-verify a certificate independently.
    Verify {
        #[arg(long)]
        cert: PathBuf,
    },
    /// Run the density-increment iteration on a set file.
    Roth {
        #[arg(long)]
        set: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 8)]
        floor: u64,
        #[arg(long, value_enum, default_value = "fft")]
        oracle: OracleArg,
        /// Fourier oracle: smallest U² norm worth pursuing.
        #[arg(long, default_value_t = 0.0)]
        min_norm: f64,
        /// Catalog oracle: coefficient grid.
        #[arg(long, default_value_t = 64)]
        grid: u64,
        /// Catalog oracle: smallest accepted correlation.
        #[arg(long, default_value_t = 0.1)]
        threshold: f64,
        #[arg(long)]
        trace: Option<PathBuf>,
    },
}

enum Failure {
    Error(Error),
    Verification(serde_json::Value),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Error(e)
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::BudgetExceeded { .. } => 3,
        Error::InvalidArgument(_)
        | Error::PreconditionViolated(_)
        | Error::UnsupportedManifold(_)
        | Error::DimensionMismatch { .. }
        | Error::ModulusMismatch(..)
        | Error::Unbounded(_)
        | Error::Parse(_)
        | Error::Io(_) => 4,
        _ => 1,
    }
}

fn certificate_summary(cert: &PartitionCertificate, out: &std::path::Path) -> serde_json::Value {
    json!({
        "out": out.display().to_string(),
        "part_count": cert.part_count,
        "min_len": cert.min_len,
        "max_depth": cert.max_depth,
        "max_diam": cert.max_witness(),
        "epsilon": cert.epsilon,
    })
}

fn run(cli: Cli) -> Result<serde_json::Value, Failure> {
    Ok(match cli.cmd {
        Cmd::Count { set, k, nontrivial } => {
            let a = read_set(&set)?;
            json!(ap_count(&a, k, nontrivial)?)
        }
        Cmd::Gowers { function, k, method } => {
            let f = read_function(&function)?;
            let m = match method {
                Method::Auto => NormMethod::Auto,
                Method::Direct => NormMethod::Direct,
                Method::Fft => NormMethod::Fft,
            };
            json!(gowers_norm_with(&f, k, m)?)
        }
        Cmd::PartitionPhase { phase, range, eps, out } => {
            let phi = parse_phase(&phase)?;
            let cert = partition_polyphase(&phi, &parse_range(&range)?, eps)?;
            cert.write(&out)?;
            certificate_summary(&cert, &out)
        }
        Cmd::PartitionNil { manifold, seq, function, range, eps, out } => {
            let m: Nilmanifold = manifold.parse()?;
            let g = parse_sequence(&seq, &m)?;
            let f = LipschitzFunction::parse(&function)?;
            f.validate(&m)?;
            let (ratio, sup) = f.sampled_lipschitz(&m, 10_000, cli.seed);
            if sup > 1.0 + 1e-12 || ratio > f.lipschitz() * (1.0 + 1e-9) {
                return Err(Error::PreconditionViolated(format!(
                    "function '{function}' fails its sampled bounds (ratio {ratio}, sup {sup})"
                ))
                .into());
            }
            let cert = partition_nilsequence(&m, &g, &f, &parse_range(&range)?, eps)?;
            cert.write(&out)?;
            let mut s = certificate_summary(&cert, &out);
            s["sampled_lipschitz"] = json!(ratio);
            s
        }
        Cmd::Verify { cert } => {
            let c = PartitionCertificate::read(&cert)?;
            let report = serde_json::to_value(verify(&c)?).expect("plain data");
            if report["ok"] != json!(true) {
                return Err(Failure::Verification(report));
            }
            report
        }
        Cmd::Roth { set, k, floor, oracle, min_norm, grid, threshold, trace } => {
            let a = read_set(&set)?;
            let oracle = match oracle {
                OracleArg::Fft => Oracle::Fourier { min_norm },
                OracleArg::Catalog => Oracle::Catalog { grid, threshold },
            };
            let t = szemeredi_search(&a, k, floor, oracle)?;
            if let Some(path) = trace {
                std::fs::write(&path, t.to_json_lines()).map_err(Error::from)?;
            }
            let mut v = serde_json::to_value(&t.outcome).expect("plain data");
            v["iterations"] = json!(t.steps.len());
            v["densities"] = json!(t.steps.iter().map(|s| s.density).collect::<Vec<_>>());
            v["densities_increase"] = json!(t.densities_increase());
            v
        }
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprintln!("{}", json!({"error": "invalid-input", "message": e.to_string().trim()}));
            return ExitCode::from(4);
        }
    };
    match run(cli) {
        Ok(v) => {
            println!("{v}");
            ExitCode::SUCCESS
        }
        Err(Failure::Verification(report)) => {
            println!("{report}");
            eprintln!("{}", json!({"error": "verification-failed", "reasons": report["reasons"]}));
            ExitCode::from(2)
        }
        Err(Failure::Error(e)) => {
            eprintln!("{}", json!({"error": e.kind(), "message": e.to_string()}));
            ExitCode::from(exit_code(&e))
        }
    }
}
