use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use holokit::cli::{
    exit_code_for, load_overlay, resolve_out_dir, run_study, StudyConfig, StudyKind,
};

/// Holonomy reconstruction studies from frame overlaps.
#[derive(Parser)]
#[command(name = "holokit", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct Common {
    /// RNG seed (deterministic default, never wall-clock).
    #[arg(long)]
    seed: Option<u64>,
    /// JSON config file; flags win over its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (overrides HOLOKIT_OUT and the config file).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Reconstruct a single holonomy and report its diagnostics.
    Reconstruct {
        #[command(flatten)]
        common: Common,
        /// Loop sample count.
        #[arg(long)]
        n: Option<usize>,
        /// Tangent-loop polar angle.
        #[arg(long)]
        theta0: Option<f64>,
        /// Transfer-matrix JSON file to reconstruct from instead.
        #[arg(long)]
        transfer: Option<PathBuf>,
        /// Transported subspace rank (transfer input only).
        #[arg(long)]
        m: Option<usize>,
    },
    /// Check gauge covariance over random closed gauge sequences.
    GaugeTest {
        #[command(flatten)]
        common: Common,
        /// Transported subspace rank.
        #[arg(long)]
        m: Option<usize>,
        /// Loop sample count.
        #[arg(long)]
        n: Option<usize>,
        /// Number of random gauge sequences.
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Convergence sweep of the ordered-product integrator on the
    /// benchmark connection.
    ConvergeConnection {
        #[command(flatten)]
        common: Common,
    },
    /// Convergence sweep of the full frame-overlap pipeline on the
    /// tangent-frame loop.
    ConvergeFrames {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        theta0: Option<f64>,
    },
    /// Feed-forward correction study on the benchmark connection.
    Correct {
        #[command(flatten)]
        common: Common,
    },
    /// Overlap-noise scaling study.
    Noise {
        #[command(flatten)]
        common: Common,
        /// Trials per grid point.
        #[arg(long)]
        trials: Option<usize>,
        /// Fixed perturbation for the conditioning sweep.
        #[arg(long)]
        eta: Option<f64>,
        /// Loop sample count.
        #[arg(long)]
        n: Option<usize>,
    },
    /// Run every study and emit the aggregate validation table.
    Summary {
        #[command(flatten)]
        common: Common,
    },
}

impl Command {
    fn kind(&self) -> StudyKind {
        match self {
            Command::Reconstruct { .. } => StudyKind::Reconstruct,
            Command::GaugeTest { .. } => StudyKind::GaugeTest,
            Command::ConvergeConnection { .. } => StudyKind::ConvergeConnection,
            Command::ConvergeFrames { .. } => StudyKind::ConvergeFrames,
            Command::Correct { .. } => StudyKind::Correct,
            Command::Noise { .. } => StudyKind::Noise,
            Command::Summary { .. } => StudyKind::Summary,
        }
    }

    fn common(&self) -> &Common {
        match self {
            Command::Reconstruct { common, .. }
            | Command::GaugeTest { common, .. }
            | Command::ConvergeConnection { common }
            | Command::ConvergeFrames { common, .. }
            | Command::Correct { common }
            | Command::Noise { common, .. }
            | Command::Summary { common } => common,
        }
    }
}

fn build_config(cmd: &Command) -> holokit::error::Result<StudyConfig> {
    let mut config = StudyConfig::new(cmd.kind());
    let common = cmd.common();

    let overlay = match &common.config {
        Some(path) => Some(load_overlay(path)?),
        None => None,
    };
    if let Some(o) = &overlay {
        config.apply_overlay(o);
    }
    config.out_dir = resolve_out_dir(
        common.out.clone(),
        std::env::var_os("HOLOKIT_OUT"),
        overlay.as_ref().and_then(|o| o.out_dir.as_ref()),
    );
    if let Some(seed) = common.seed {
        config.seed = seed;
    }

    match cmd {
        Command::Reconstruct {
            n,
            theta0,
            transfer,
            m,
            ..
        } => {
            if let Some(n) = n {
                config.steps = *n;
            }
            if let Some(t) = theta0 {
                config.theta0 = *t;
            }
            if let Some(path) = transfer {
                config.transfer_model = Some(path.clone());
            }
            if let Some(m) = m {
                config.logical_rank = *m;
            }
        }
        Command::GaugeTest { m, n, trials, .. } => {
            if let Some(m) = m {
                config.logical_rank = *m;
            }
            if let Some(n) = n {
                config.steps = *n;
            } else {
                config.steps = 80;
            }
            if let Some(t) = trials {
                config.gauge_trials = *t;
            }
        }
        Command::ConvergeFrames { theta0, .. } => {
            if let Some(t) = theta0 {
                config.theta0 = *t;
            }
        }
        Command::Noise { trials, eta, n, .. } => {
            if let Some(t) = trials {
                config.trials = *t;
            }
            if let Some(e) = eta {
                config.eta_fixed = *e;
            }
            config.steps = n.unwrap_or(120);
        }
        _ => {}
    }
    Ok(config)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = match build_config(&cli.command) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("holokit: {e}");
            return ExitCode::from(2);
        }
    };
    match run_study(&config) {
        Ok(outcome) => {
            for rec in &outcome.records {
                println!(
                    "{:<45} value {:>13.6e}  expected {:>13.6e}  tol {:>9.1e}  {}",
                    rec.metric,
                    rec.value,
                    rec.expected,
                    rec.tolerance,
                    if rec.passed() { "pass" } else { "FAIL" }
                );
            }
            println!("report: {}", outcome.report_path.display());
            if outcome.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("holokit: {e}");
            ExitCode::from(u8::try_from(exit_code_for(&e)).unwrap_or(1))
        }
    }
}
