use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use fracconn::cli::{
    cmd_estimate, cmd_experiment, cmd_graph, cmd_grid, cmd_simulate, exit_code, ingest_csv, load_json,
    read_matrix_csv, write_all, ExperimentPlan, HeaderMode, IngestOptions, Orientation, OutputSet, SimulateConfig,
};
use fracconn::estimate::{EstimateOptions, GammaMethod, MemoryMethod};
use fracconn::wavelet::FilterKind;
use fracconn::{Error, Result};

#[derive(Parser)]
#[command(name = "fracconn", version, about = "Fractal and nonfractal connectivity of long-memory time series")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct OutDir {
    /// Directory receiving the output files.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a multivariate ARFIMA dataset with known truth.
    Simulate {
        /// JSON simulation config.
        config: PathBuf,
        /// Overrides the seed in the config.
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        out: OutDir,
    },
    /// Estimate d, Gamma, and both connectivity matrices from a CSV of series.
    Estimate {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "ml")]
        memory: MemoryArg,
        #[arg(long, value_enum, default_value = "cov")]
        gamma: GammaArg,
        #[arg(long, value_enum, default_value = "la8")]
        filter: FilterArg,
        /// Decomposition depth; defaults to log2(N) - 3.
        #[arg(long)]
        levels: Option<usize>,
        #[arg(long, value_enum, default_value = "columns")]
        orientation: OrientationArg,
        #[arg(long, default_value = ",")]
        delimiter: char,
        #[arg(long, value_enum, default_value = "auto")]
        header: HeaderArg,
        /// Seconds between samples, recorded in the output metadata.
        #[arg(long)]
        sampling_interval: Option<f64>,
        #[command(flatten)]
        out: OutDir,
    },
    /// Run a Monte Carlo bias experiment, or a sweep of them.
    Experiment {
        config: PathBuf,
        /// Overrides the base seed in the config.
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        out: OutDir,
    },
    /// Tabulate Upsilon over a grid of Hurst exponents.
    Grid {
        #[command(flatten)]
        out: OutDir,
    },
    /// Extract the k strongest edges of a connectivity matrix.
    Graph {
        matrix: PathBuf,
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        out: OutDir,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MemoryArg {
    Lms,
    Ml,
}

#[derive(Clone, Copy, ValueEnum)]
enum GammaArg {
    Lin,
    Cov,
    Sdf,
}

#[derive(Clone, Copy, ValueEnum)]
enum FilterArg {
    Haar,
    La8,
}

#[derive(Clone, Copy, ValueEnum)]
enum OrientationArg {
    Columns,
    Rows,
}

#[derive(Clone, Copy, ValueEnum)]
enum HeaderArg {
    Auto,
    Present,
    Absent,
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var("FRACCONN_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| Error::InvalidInput(format!("FRACCONN_THREADS must be a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Error::InvalidInput(e.to_string()))
}

fn run(command: Command) -> Result<(PathBuf, OutputSet, Vec<String>)> {
    match command {
        Command::Simulate { config, seed, out } => {
            let mut cfg: SimulateConfig = load_json(&config)?;
            if let Some(seed) = seed {
                cfg.seed = seed;
            }
            Ok((out.out_dir, cmd_simulate(&cfg)?, Vec::new()))
        }
        Command::Estimate {
            input,
            memory,
            gamma,
            filter,
            levels,
            orientation,
            delimiter,
            header,
            sampling_interval,
            out,
        } => {
            if !delimiter.is_ascii() {
                return Err(Error::InvalidInput(format!("delimiter `{delimiter}` is not ASCII")));
            }
            let ingest = IngestOptions {
                delimiter: delimiter as u8,
                orientation: match orientation {
                    OrientationArg::Columns => Orientation::Columns,
                    OrientationArg::Rows => Orientation::Rows,
                },
                header: match header {
                    HeaderArg::Auto => HeaderMode::Auto,
                    HeaderArg::Present => HeaderMode::Present,
                    HeaderArg::Absent => HeaderMode::Absent,
                },
            };
            let mut dataset = ingest_csv(&input, ingest)?;
            if let Some(dt) = sampling_interval {
                if !(dt > 0.0 && dt.is_finite()) {
                    return Err(Error::InvalidInput(format!("sampling interval must be positive, got {dt}")));
                }
                dataset.sampling_interval = Some(dt);
            }
            let options = EstimateOptions {
                memory: match memory {
                    MemoryArg::Lms => MemoryMethod::Lms,
                    MemoryArg::Ml => MemoryMethod::Ml,
                },
                gamma: match gamma {
                    GammaArg::Lin => GammaMethod::Lin,
                    GammaArg::Cov => GammaMethod::Cov,
                    GammaArg::Sdf => GammaMethod::Sdf,
                },
                filter: match filter {
                    FilterArg::Haar => FilterKind::Haar,
                    FilterArg::La8 => FilterKind::La8,
                },
                levels,
            };
            let outputs = cmd_estimate(&dataset, options)?;
            Ok((out.out_dir, outputs, dataset.warnings.clone()))
        }
        Command::Experiment { config, seed, out } => {
            let mut plan: ExperimentPlan = load_json(&config)?;
            if let Some(seed) = seed {
                plan.experiment.base_seed = seed;
            }
            Ok((out.out_dir, cmd_experiment(&plan)?, Vec::new()))
        }
        Command::Grid { out } => Ok((out.out_dir, cmd_grid()?, Vec::new())),
        Command::Graph { matrix, k, out } => {
            let m = read_matrix_csv(&matrix)?;
            Ok((out.out_dir, cmd_graph(&m, k)?, Vec::new()))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = configure_threads()
        .and_then(|()| run(cli.command))
        .and_then(|(dir, outputs, warnings)| {
            for w in warnings {
                eprintln!("warning: {w}");
            }
            write_all(&dir, &outputs)
        });
    match result {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
