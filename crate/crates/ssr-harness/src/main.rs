use std::io::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use ssr_core::datagen::{
    classic_irrep, irrep_rho, make_wstar, write_dense_csv, write_sparse_text, Design, Sigma,
    StreamGenerator,
};

use ssr_harness::{
    load_experiment, load_stream_spec, load_sweep, report, run_experiment, sweep, write_grid_csv,
    write_results_csv, HarnessError, PluginRegistry, SvgOptions,
};

#[derive(Parser)]
#[command(
    name = "ssr",
    version,
    about = "Streaming sparse regression experiment driver"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    #[value(name = "dense_csv")]
    DenseCsv,
    #[value(name = "sparse_text")]
    SparseText,
}

#[derive(Subcommand)]
enum Cmd {
    /// Materialize a synthetic stream into a dataset file.
    Gen {
        /// Stream spec JSON.
        #[arg(long)]
        spec: PathBuf,
        /// Output dataset path.
        #[arg(long)]
        out: PathBuf,
        /// Number of examples to draw.
        #[arg(long)]
        n: u64,
        /// Output encoding.
        #[arg(long, value_enum, default_value = "dense_csv")]
        format: FormatArg,
    },
    /// Run one experiment config over all its seeds.
    Run {
        /// Experiment config JSON.
        #[arg(long)]
        config: PathBuf,
        /// Results CSV path; overrides the config's output field.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Grid-search hyperparameters on the dev replicate.
    Sweep {
        /// Sweep config JSON.
        #[arg(long)]
        config: PathBuf,
        /// Grid table CSV path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Aggregate results into a summary CSV (stdout) and optional SVG.
    Report {
        /// Results CSV files; repeatable.
        #[arg(long = "in", required = true)]
        input: Vec<PathBuf>,
        /// Write line charts to this SVG path.
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Log-scale the example axis.
        #[arg(long)]
        logx: bool,
        /// Log-scale the metric axis.
        #[arg(long)]
        logy: bool,
    },
    /// Print design diagnostics for a stream spec.
    Diag {
        /// Stream spec JSON.
        #[arg(long)]
        spec: PathBuf,
    },
}

fn real_main(cli: Cli) -> ssr_harness::Result<()> {
    match cli.cmd {
        Cmd::Gen { spec, out, n, format } => {
            let spec = load_stream_spec(&spec)?;
            let truth = make_wstar(&spec).map_err(HarnessError::from_config)?;
            // Replicate index 1: a generated file is evaluation-grade data,
            // never the reserved dev draw.
            let mut gen =
                StreamGenerator::new(&spec, &truth, 1).map_err(HarnessError::from_config)?;
            let examples: Vec<_> = (0..n).map(|_| gen.next_example()).collect();
            match format {
                FormatArg::DenseCsv => {
                    write_dense_csv(&out, spec.d, &examples).map_err(HarnessError::from_data)?
                }
                FormatArg::SparseText => {
                    write_sparse_text(&out, &examples).map_err(HarnessError::from_data)?
                }
            }
        }
        Cmd::Run { config, out } => {
            let cfg = load_experiment(&config)?;
            let out_path = out.or_else(|| cfg.output.clone()).ok_or_else(|| {
                HarnessError::Config("no output path: pass --out or set output".into())
            })?;
            let run = run_experiment(&cfg, &PluginRegistry::new())?;
            write_results_csv(&out_path, &run.rows)?;
            if !run.failures.is_empty() {
                for f in &run.failures {
                    eprintln!("seed {} failed at step {}: {}", f.seed, f.at_step, f.message);
                }
                return Err(HarnessError::Numerical(format!(
                    "{} of {} seeds failed; healthy rows written to {}",
                    run.failures.len(),
                    cfg.seeds.len(),
                    out_path.display()
                )));
            }
        }
        Cmd::Sweep { config, out } => {
            let cfg = load_sweep(&config)?;
            let outcome = sweep(&cfg, &PluginRegistry::new())?;
            write_grid_csv(&out, &cfg, &outcome)?;
            println!("{}", outcome.best_hp);
        }
        Cmd::Report { input, svg, logx, logy } => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            report(&input, &mut lock, svg.as_deref(), SvgOptions { logx, logy })?;
            lock.flush()?;
        }
        Cmd::Diag { spec } => {
            let spec = load_stream_spec(&spec)?;
            let truth = make_wstar(&spec).map_err(HarnessError::from_config)?;
            let sigma = match spec.design {
                Design::IidGaussian | Design::RandomSign => Sigma::Identity,
                Design::Ar1Correlated { rho_corr } => Sigma::Ar1 { rho: rho_corr },
            };
            let diag =
                irrep_rho(&sigma, spec.d, &truth.support).map_err(HarnessError::from_config)?;
            let classic =
                classic_irrep(&sigma, spec.d, &truth.support).map_err(HarnessError::from_config)?;
            println!("alpha: {}", diag.alpha);
            println!("rho: {}", diag.rho);
            println!("classic_irrep: {classic}");
            println!("l1_radius: {}", truth.l1_radius());
        }
    }
    Ok(())
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = real_main(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
