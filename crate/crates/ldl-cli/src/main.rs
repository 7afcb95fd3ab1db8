//! `ldl` — train, evaluate, cross-validate, and visualize label
//! distribution learners from the command line.
//!
//! Exit codes: 0 success, 1 usage error, 2 data/dimension error,
//! 3 convergence or partial failure.

mod commands;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};

use ldl::LdlError;

#[derive(Parser)]
#[command(name = "ldl", version, about = "Label distribution learning toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Algo {
    #[value(name = "pt-bayes")]
    PtBayes,
    #[value(name = "aa-knn")]
    AaKnn,
    #[value(name = "aa-bp")]
    AaBp,
    #[value(name = "sa-iis")]
    SaIis,
    #[value(name = "sa-bfgs")]
    SaBfgs,
}

impl Algo {
    pub fn name(self) -> &'static str {
        match self {
            Algo::PtBayes => "pt-bayes",
            Algo::AaKnn => "aa-knn",
            Algo::AaBp => "aa-bp",
            Algo::SaIis => "sa-iis",
            Algo::SaBfgs => "sa-bfgs",
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate the synthetic benchmark: a seeded training sample and/or the
    /// deterministic 201x201 test manifold, both with ground-truth
    /// distributions.
    Synth {
        /// Training sample size.
        #[arg(long, default_value_t = 500)]
        n: usize,
        /// Training sampler seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output path for the training sample.
        #[arg(long)]
        out: Option<std::path::PathBuf>,
        /// Output path for the test manifold.
        #[arg(long)]
        test_out: Option<std::path::PathBuf>,
    },
    /// Train a model and persist it.
    Train {
        #[arg(long, value_enum)]
        algo: Algo,
        /// Training dataset path.
        #[arg(long)]
        data: std::path::PathBuf,
        /// Where to write the trained model.
        #[arg(long)]
        model_out: Option<std::path::PathBuf>,
        /// Seed for any training-time randomness (weight init, resampling).
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Standardize features to zero mean and unit variance before
        /// training; the transform is stored with the model.
        #[arg(long)]
        standardize: bool,
        /// Neighbor count (aa-knn).
        #[arg(long, default_value_t = 5)]
        k: usize,
        /// Hidden units (aa-bp).
        #[arg(long, default_value_t = 64)]
        hidden: usize,
        /// Learning rate (aa-bp).
        #[arg(long, default_value_t = 0.01)]
        learning_rate: f64,
        /// Training epochs (aa-bp).
        #[arg(long, default_value_t = 500)]
        epochs: usize,
        /// Covariance shrinkage (pt-bayes); omit for automatic trace-scaled
        /// shrinkage.
        #[arg(long)]
        lambda: Option<f64>,
        /// Convergence threshold (sa-iis: objective change; sa-bfgs:
        /// gradient norm).
        #[arg(long, default_value_t = 1e-6)]
        epsilon: f64,
        /// Iteration cap (sa-iis outer loops / sa-bfgs iterations).
        #[arg(long)]
        max_iters: Option<usize>,
        /// Optional ridge penalty on the maximum-entropy parameters.
        #[arg(long, default_value_t = 0.0)]
        l2: f64,
        /// Write the optimizer trace (sa-*) or epoch losses (aa-bp) as CSV.
        #[arg(long)]
        trace_out: Option<std::path::PathBuf>,
    },
    /// Evaluate a model on a dataset with all six measures.
    Eval {
        #[arg(long)]
        model: std::path::PathBuf,
        #[arg(long)]
        data: std::path::PathBuf,
        /// Write the six measure values as CSV.
        #[arg(long)]
        report: Option<std::path::PathBuf>,
    },
    /// Nested ten-fold cross-validation over one or more algorithms,
    /// reporting mean±std(rank) per measure.
    Cv {
        #[arg(long)]
        data: std::path::PathBuf,
        /// Comma-separated algorithms (default: all five).
        #[arg(long, value_delimiter = ',')]
        algos: Vec<Algo>,
        #[arg(long, default_value_t = 10)]
        folds: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the ranked report as CSV.
        #[arg(long)]
        report: Option<std::path::PathBuf>,
        #[arg(long)]
        standardize: bool,
    },
    /// Render label distributions over the test manifold as a PPM image.
    Render {
        /// Model to predict with (omit with --ground-truth).
        #[arg(long, required_unless_present = "ground_truth")]
        model: Option<std::path::PathBuf>,
        /// Render the generator's ground truth instead of predictions.
        #[arg(long)]
        ground_truth: bool,
        #[arg(long)]
        out: std::path::PathBuf,
        /// Apply a per-channel linear min-max stretch before quantizing.
        #[arg(long)]
        stretch: bool,
    },
}

/// 2 for data/shape/format problems, 3 for convergence and training
/// failures.
fn error_exit_code(err: &LdlError) -> u8 {
    match err {
        LdlError::NoSolution { .. }
        | LdlError::NotDescentDirection { .. }
        | LdlError::LineSearchFailed { .. }
        | LdlError::CurvatureViolation { .. }
        | LdlError::Diverged { .. }
        | LdlError::EmptyClass { .. }
        | LdlError::NotPositiveDefinite { .. }
        | LdlError::ZeroTotalWeight
        | LdlError::MissingMeasure { .. } => 3,
        LdlError::FoldFailed { source, .. } => error_exit_code(source),
        _ => 2,
    }
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // Help and version requests are successes; everything else is a
            // usage error.
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Synth {
            n,
            seed,
            out,
            test_out,
        } => commands::synth(n, seed, out.as_deref(), test_out.as_deref()),
        Command::Train {
            algo,
            data,
            model_out,
            seed,
            standardize,
            k,
            hidden,
            learning_rate,
            epochs,
            lambda,
            epsilon,
            max_iters,
            l2,
            trace_out,
        } => commands::train(commands::TrainArgs {
            algo,
            data,
            model_out,
            seed,
            standardize,
            k,
            hidden,
            learning_rate,
            epochs,
            lambda,
            epsilon,
            max_iters,
            l2,
            trace_out,
        }),
        Command::Eval {
            model,
            data,
            report,
        } => commands::eval(&model, &data, report.as_deref()),
        Command::Cv {
            data,
            algos,
            folds,
            seed,
            report,
            standardize,
        } => commands::cv(&data, &algos, folds, seed, report.as_deref(), standardize),
        Command::Render {
            model,
            ground_truth,
            out,
            stretch,
        } => commands::render(model.as_deref(), ground_truth, &out, stretch),
    };
    match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(error_exit_code(&err))
        }
    }
}
