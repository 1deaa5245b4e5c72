use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand};
use retcap_core::algo::report_alpha;
use retcap_core::env::EnvKind;
use retcap_core::oracle::TinyMdp;
use retcap_harness::{
    emit_plotdata, evaluate_checkpoint, experiment, oracle_report, output_root, parse_config, run_experiment,
    EvalRequest, RunError, RunOptions,
};
use std::path::PathBuf;
use std::process::ExitCode;

/// Train and evaluate risk-averse agents with return capping and its baselines.
#[derive(Parser)]
#[command(name = "retcap", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train every seed listed in a configuration file.
    Run {
        config: PathBuf,
        /// Continue seeds from their last checkpoint.
        #[arg(long)]
        resume: bool,
        /// Overrides the RETCAP_OUTPUT_ROOT environment variable.
        #[arg(long)]
        output_root: Option<PathBuf>,
        /// Suppress per-update progress.
        #[arg(long, short)]
        quiet: bool,
    },
    /// Roll out a policy checkpoint and report CVaR, VaR and mean return.
    Eval {
        checkpoint: PathBuf,
        env: EnvKind,
        /// Risk level; defaults to the environment's reporting level.
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long, default_value_t = 1000)]
        episodes: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Return list destination; defaults to eval_returns.txt beside the checkpoint.
        #[arg(long)]
        returns_out: Option<PathBuf>,
    },
    /// Merge the seeds of a run directory into plotdata.csv.
    Plotdata { dir: PathBuf },
    /// Enumerate every policy of a tiny MDP file and check the capped objective.
    Oracle {
        file: PathBuf,
        #[arg(long)]
        alpha: Option<f64>,
    },
}

enum Failure {
    Config(anyhow::Error),
    Runtime(anyhow::Error),
}

fn runtime(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Runtime(e.into())
}

fn from_run(e: RunError) -> Failure {
    match e {
        RunError::Config(_) => Failure::Config(e.into()),
        other => Failure::Runtime(other.into()),
    }
}

fn execute(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Run {
            config,
            resume,
            output_root: root,
            quiet,
        } => {
            let cfg = parse_config(&config)
                .with_context(|| format!("reading {}", config.display()))
                .map_err(Failure::Config)?;
            let root = root.unwrap_or_else(output_root);
            let options = RunOptions {
                resume,
                verbose: !quiet,
                stop_after: None,
            };
            let outcomes = run_experiment(&cfg, &root, options).map_err(from_run)?;
            for o in outcomes {
                let cvar = o.final_eval_cvar().map_or("n/a".to_string(), |c| format!("{c:.4}"));
                println!("seed {}: final eval cvar {cvar} ({})", o.seed, o.dir.display());
            }
            println!("run directory: {}", experiment::run_dir(&cfg, &root).display());
        }
        Command::Eval {
            checkpoint,
            env,
            alpha,
            episodes,
            seed,
            returns_out,
        } => {
            let alpha = alpha.unwrap_or_else(|| report_alpha(env));
            if !(alpha > 0.0 && alpha <= 1.0) {
                return Err(Failure::Config(anyhow!("alpha must lie in (0, 1], got {alpha}")));
            }
            if episodes == 0 {
                return Err(Failure::Config(anyhow!("episodes must be at least 1")));
            }
            let req = EvalRequest {
                checkpoint,
                env,
                alpha,
                episodes,
                seed,
                returns_out,
            };
            let report = evaluate_checkpoint(&req).map_err(from_run)?;
            println!("episodes {episodes} alpha {alpha}");
            println!("cvar {:?}", report.cvar);
            println!("var {:?}", report.var);
            println!("mean {:?}", report.mean);
            println!("returns written to {}", req.returns_path().display());
        }
        Command::Plotdata { dir } => {
            let out = emit_plotdata(&dir).map_err(runtime)?;
            println!("{}", out.display());
        }
        Command::Oracle { file, alpha } => {
            let text = std::fs::read_to_string(&file)
                .with_context(|| format!("reading {}", file.display()))
                .map_err(Failure::Config)?;
            let mdp = TinyMdp::parse(&text)
                .with_context(|| file.display().to_string())
                .map_err(Failure::Config)?;
            if alpha.is_some_and(|a| !(a > 0.0 && a <= 1.0)) {
                return Err(Failure::Config(anyhow!("alpha must lie in (0, 1]")));
            }
            let (report, text) = oracle_report::run(&mdp, alpha).map_err(runtime)?;
            print!("{text}");
            if !report.pass {
                return Err(Failure::Runtime(anyhow!("a capped-objective maximiser is not CVaR-optimal")));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
