use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use entinflate::measures::CutPolicy;
use entinflate_cli::config::{parse_assignment, ExperimentConfig, OUT_ENV};
use entinflate_cli::registry::{list_experiments, run_experiment};
use entinflate_cli::verify::{run_suite, Suite, VerifyOptions};
use entinflate_cli::CliError;

#[derive(Parser)]
#[command(name = "entinflate", version, about = "Entanglement inflation experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Policy {
    All,
    Reduced,
}

impl From<Policy> for CutPolicy {
    fn from(p: Policy) -> Self {
        match p {
            Policy::All => CutPolicy::All,
            Policy::Reduced => CutPolicy::Reduced,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Quick,
    Full,
}

#[derive(Subcommand)]
enum Command {
    /// List registered experiments, optionally filtered by an id substring.
    List { filter: Option<String> },
    /// Run one experiment and write its CSV files and manifest.
    Run {
        id: String,
        /// Parameter override, repeatable.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, env = OUT_ENV, default_value = "results")]
        out: PathBuf,
        #[arg(long, default_value_t = default_jobs())]
        jobs: usize,
        /// GGM cut enumeration; defaults to all cuts up to seven parties.
        #[arg(long, value_enum)]
        cut_policy: Option<Policy>,
    },
    /// Check the built-in expected values.
    Verify {
        #[arg(long, value_enum, default_value = "quick")]
        suite: SuiteArg,
        /// Only these criteria (repeatable).
        #[arg(long)]
        only: Vec<usize>,
        /// Multiplies every tolerance; 0 is a negative control.
        #[arg(long, default_value_t = 1.0)]
        tol_scale: f64,
        #[arg(long, default_value_t = default_jobs())]
        jobs: usize,
        /// Ensemble size override.
        #[arg(long)]
        samples: Option<usize>,
    },
}

fn default_jobs() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::List { filter } => {
            for e in list_experiments(filter.as_deref()) {
                println!("{:<22} {:>9}  {}", e.id, e.budget, e.summary);
                for p in e.params {
                    println!("    {:<22} = {:<34} {}", p.key, p.default, p.help);
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Run { id, set, seed, out, jobs, cut_policy } => {
            let mut cfg = ExperimentConfig::new(id, out);
            cfg.seed = seed;
            cfg.jobs = jobs;
            cfg.cut_policy = cut_policy.map(Into::into);
            for s in &set {
                let (k, v) = parse_assignment(s)?;
                cfg.overrides.insert(k, v);
            }
            let r = run_experiment(&cfg)?;
            for f in &r.manifest.files {
                println!("{}  {} rows  {}", r.dir.join(&f.file).display(), f.rows, f.sha256);
            }
            println!("wall time {:.1} s", r.manifest.wall_time_s);
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { suite, only, tol_scale, jobs, samples } => {
            let opts = VerifyOptions {
                suite: match suite {
                    SuiteArg::Quick => Suite::Quick,
                    SuiteArg::Full => Suite::Full,
                },
                only,
                tol_scale,
                jobs,
                samples,
                ..VerifyOptions::default()
            };
            let report = run_suite(&opts, |c| println!("{}", c.line()))?;
            if report.all_pass() {
                println!("all {} criteria pass", report.criteria.len());
                Ok(ExitCode::SUCCESS)
            } else {
                let failed: Vec<String> = report.failed().map(|c| c.id.to_string()).collect();
                println!("failed criteria: {}", failed.join(", "));
                Ok(ExitCode::from(1))
            }
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("entinflate: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
