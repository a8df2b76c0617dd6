use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mimb::data::SynthSpec;
use mimb_cli::commands::{self, load_config, BaselineMethod, FitOptions, MaskStrategy};
use mimb_cli::config::{BStepName, ClusterOn, DatasetSource, ExperimentConfig, NmiNormName};
use mimb_cli::{CliError, RunReport};

#[derive(Parser)]
#[command(
    name = "mimb",
    version,
    about = "Incomplete multi-view clustering experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the optimizer for every repeat of an experiment.
    Fit {
        #[command(flatten)]
        run: RunArgs,
        /// Write P, S and alpha of every repeat.
        #[arg(long)]
        dump_state: bool,
        #[arg(long, value_enum)]
        b_step: Option<BStepName>,
        #[arg(long, value_enum)]
        cluster_on: Option<ClusterOn>,
    },
    /// Run a k-means baseline on the experiment's masks.
    Baseline {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_enum)]
        method: BaselineMethod,
    },
    /// Write a synthetic labeled dataset.
    Synth {
        #[arg(long, default_value_t = 300)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        c: usize,
        /// Comma-separated feature counts, one per view.
        #[arg(long, value_delimiter = ',', default_value = "20,30")]
        dims: Vec<usize>,
        #[arg(long, default_value_t = 6.0)]
        separation: f64,
        #[arg(long, default_value_t = 1.0)]
        noise: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write an observation mask.
    Mask {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        l: usize,
        #[arg(long, value_enum, default_value = "random_missing")]
        strategy: MaskStrategy,
        /// Missing ratio, or the paired ratio for `paired_preserved`.
        #[arg(long)]
        ratio: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Score a labels file against ground truth.
    Eval {
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        truth: PathBuf,
        #[arg(long, value_enum, default_value = "sqrt")]
        nmi_norm: NmiNormName,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `out_dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Base seed; overrides `seed`.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    repeats: Option<usize>,
    /// View files start with a header line.
    #[arg(long)]
    header: bool,
    #[arg(long, value_enum)]
    nmi_norm: Option<NmiNormName>,
}

impl RunArgs {
    fn load(&self) -> Result<ExperimentConfig, CliError> {
        let mut config = load_config(&self.config)?;
        if let Some(out) = &self.out {
            config.out_dir = out.clone();
        }
        if let Some(seed) = self.seed {
            config.seed = seed;
        }
        if let Some(repeats) = self.repeats {
            config.repeats = repeats;
        }
        if let Some(norm) = self.nmi_norm {
            config.nmi_norm = norm;
        }
        if self.header {
            if let DatasetSource::Files { header, .. } = &mut config.dataset {
                *header = true;
            }
        }
        Ok(config)
    }
}

fn summarize(report: &RunReport) {
    match &report.summary {
        Some(s) => println!(
            "{}: acc {:.4} ± {:.4}, nmi {:.4} ± {:.4}, purity {:.4} ± {:.4} over {} repeats",
            report.method,
            s.mean.acc,
            s.std.acc,
            s.mean.nmi,
            s.std.nmi,
            s.mean.purity,
            s.std.purity,
            report.repeats.len()
        ),
        None => println!(
            "{}: {} repeats, no labels to score",
            report.method,
            report.repeats.len()
        ),
    }
    println!("wrote {}", report.config.out_dir.display());
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Fit {
            run,
            dump_state,
            b_step,
            cluster_on,
        } => {
            let mut config = run.load()?;
            if let Some(b) = b_step {
                config.hyperparams.b_step = b;
            }
            if let Some(target) = cluster_on {
                config.cluster_on = target;
            }
            summarize(&commands::cmd_fit(&config, FitOptions { dump_state })?);
        }
        Command::Baseline { run, method } => {
            summarize(&commands::cmd_baseline(&run.load()?, method)?);
        }
        Command::Synth {
            n,
            c,
            dims,
            separation,
            noise,
            seed,
            out,
        } => {
            let spec = SynthSpec {
                n,
                c,
                dims,
                separation,
                noise,
                seed,
            };
            for path in commands::cmd_synth(&spec, &out)? {
                println!("wrote {}", path.display());
            }
        }
        Command::Mask {
            n,
            l,
            strategy,
            ratio,
            seed,
            out,
        } => {
            commands::cmd_mask(n, l, strategy, ratio, seed, &out)?;
            println!("wrote {}", out.display());
        }
        Command::Eval {
            pred,
            truth,
            nmi_norm,
        } => {
            let m = commands::cmd_eval(&pred, &truth, nmi_norm.into())?;
            println!("{}", serde_json::to_string(&m).expect("metrics serialize"));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            if let CliError::Numerical {
                dump: Some(dir), ..
            } = &err
            {
                eprintln!("state at failure written to {}", dir.display());
            }
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
