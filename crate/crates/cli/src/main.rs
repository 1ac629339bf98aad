//! `edae`: generate, corrupt, train, reconstruct and bench from the
//! command line. Exit status is 0 on success, 1 on usage or config
//! errors and 2 on runtime failures.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use edae::Error;

use config::{BenchRun, CorruptRun, GenerateKind, GenerateRun, ReconstructRun, TrainRun};

#[derive(Parser)]
#[command(name = "edae", version, about = "Missing-data reconstruction for multichannel time series")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArg {
    /// JSON run document; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic series CSV.
    Generate {
        #[command(flatten)]
        cfg: ConfigArg,
        #[arg(long, value_enum)]
        kind: Option<GenerateKind>,
        /// Samples of the random sequence.
        #[arg(long)]
        n: Option<usize>,
        /// Days of the power profile.
        #[arg(long)]
        days: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Zero a random proportion of entries; writes the series and its mask.
    Corrupt {
        #[command(flatten)]
        cfg: ConfigArg,
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        rho: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        mask_out: Option<PathBuf>,
    },
    /// Fit a method on a clean series and save the model.
    Train {
        #[command(flatten)]
        cfg: ConfigArg,
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        mask: Option<PathBuf>,
        /// AE, DAE, EDAE_NN, EDAE_LSTM, IM or ELM.
        #[arg(long)]
        method: Option<String>,
        #[arg(long)]
        model_out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        epochs: Option<usize>,
        #[arg(long)]
        k_back: Option<usize>,
        #[arg(long)]
        k_fwd: Option<usize>,
    },
    /// Fill the masked entries of a corrupted series with a saved model.
    Reconstruct {
        #[command(flatten)]
        cfg: ConfigArg,
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        mask: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run an NMSE grid and write tables and plot data.
    Bench {
        #[command(flatten)]
        cfg: ConfigArg,
        #[arg(long)]
        out_dir: Option<PathBuf>,
        /// Comma-separated method names.
        #[arg(long, value_delimiter = ',')]
        methods: Option<Vec<String>>,
        /// Comma-separated corruption proportions.
        #[arg(long, value_delimiter = ',')]
        proportions: Option<Vec<f64>>,
        #[arg(long)]
        repeats: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        epochs: Option<usize>,
    },
}

fn set<T>(slot: &mut T, flag: Option<T>) {
    if let Some(v) = flag {
        *slot = v;
    }
}

fn set_path(slot: &mut Option<PathBuf>, flag: Option<PathBuf>) {
    if flag.is_some() {
        *slot = flag;
    }
}

fn run(command: Command) -> edae::Result<()> {
    match command {
        Command::Generate {
            cfg,
            kind,
            n,
            days,
            seed,
            out,
        } => {
            let mut r: GenerateRun = config::load(cfg.config.as_deref())?;
            set(&mut r.kind, kind);
            set(&mut r.random.n, n);
            set(&mut r.power.days, days);
            if let Some(s) = seed {
                r.random.seed = s;
                r.power.seed = s;
            }
            set_path(&mut r.out, out);
            commands::generate(&r)
        }
        Command::Corrupt {
            cfg,
            input,
            rho,
            seed,
            out,
            mask_out,
        } => {
            let mut r: CorruptRun = config::load(cfg.config.as_deref())?;
            set_path(&mut r.input, input);
            set(&mut r.rho, rho);
            set(&mut r.seed, seed);
            set_path(&mut r.out, out);
            set_path(&mut r.mask_out, mask_out);
            commands::corrupt(&r)
        }
        Command::Train {
            cfg,
            input,
            mask,
            method,
            model_out,
            seed,
            epochs,
            k_back,
            k_fwd,
        } => {
            let mut r: TrainRun = config::load(cfg.config.as_deref())?;
            set_path(&mut r.input, input);
            set_path(&mut r.mask, mask);
            set(&mut r.method, method);
            set_path(&mut r.model_out, model_out);
            set(&mut r.train.seed, seed);
            set(&mut r.train.epochs, epochs);
            set(&mut r.train.window.k_back, k_back);
            set(&mut r.train.window.k_fwd, k_fwd);
            commands::train(&r)
        }
        Command::Reconstruct {
            cfg,
            model,
            input,
            mask,
            out,
        } => {
            let mut r: ReconstructRun = config::load(cfg.config.as_deref())?;
            set_path(&mut r.model, model);
            set_path(&mut r.input, input);
            set_path(&mut r.mask, mask);
            set_path(&mut r.out, out);
            commands::reconstruct_cmd(&r)
        }
        Command::Bench {
            cfg,
            out_dir,
            methods,
            proportions,
            repeats,
            seed,
            epochs,
        } => {
            let mut r: BenchRun = config::load(cfg.config.as_deref())?;
            set_path(&mut r.out_dir, out_dir);
            set(&mut r.plan.methods, methods);
            set(&mut r.plan.proportions, proportions);
            set(&mut r.plan.repeats, repeats);
            set(&mut r.plan.base_seed, seed);
            set(&mut r.plan.train.epochs, epochs);
            commands::bench(&r)
        }
    }
}

fn exit_code(err: &Error) -> u8 {
    if err.is_usage() {
        1
    } else {
        2
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
