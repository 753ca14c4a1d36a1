//! Command-line driver for the recurrence-network pipeline.
//!
//! Exit codes: 0 on full success, 2 when a sweep finished with failed
//! cells (partial results were still written), 1 on hard errors.
//!
//! Stage timings go to stderr only; every file the pipeline writes is
//! deterministic for a given configuration.

use std::fs::File;
use std::io::{BufReader, Read};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Context;
use clap::{Parser, Subcommand};
use recnetq_core::metrics::metrics_report;
use recnetq_core::pipeline::{run_cell_with_artifacts, run_sweep, SweepConfig};
use recnetq_core::RecurrenceNetwork;

#[derive(Parser)]
#[command(
    name = "recnet-q",
    version,
    about = "Recurrence-network analysis of mean-photon-number dynamics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full parameter sweep described by a JSON config file.
    Run {
        /// Sweep configuration (JSON); `{}` selects every default.
        #[arg(long)]
        config: PathBuf,
    },
    /// Run a single (kappa, |alpha|^2) cell and write its artifacts.
    Cell {
        /// Intensity-dependence parameter kappa in [0, 1].
        #[arg(long)]
        kappa: f64,
        /// Initial coherent-state intensity |alpha|^2.
        #[arg(long)]
        alpha_sq: f64,
        /// Kerr-to-coupling ratio chi (lambda is fixed at 1).
        #[arg(long, default_value_t = 5.0)]
        chi: f64,
        /// Optional JSON config for grids, thresholds and output layout;
        /// the kappa, alpha_sq and chi flags override its lists.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output directory (overrides the config's).
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Recompute graph measures from a stored edge-list file.
    Metrics {
        /// Edge-list file produced by the pipeline.
        #[arg(long)]
        edges: PathBuf,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load_config(path: &PathBuf) -> anyhow::Result<SweepConfig> {
    let mut text = String::new();
    File::open(path)
        .with_context(|| format!("opening config {}", path.display()))?
        .read_to_string(&mut text)?;
    let cfg: SweepConfig =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    cfg.validate()?;
    Ok(cfg)
}

fn configure_workers(workers: usize) {
    if workers > 0 {
        // Ignore the error when a global pool already exists (tests).
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build_global();
    }
}

fn cmd_run(config: PathBuf) -> anyhow::Result<ExitCode> {
    let cfg = load_config(&config)?;
    configure_workers(cfg.workers);
    let started = Instant::now();
    let summary = run_sweep(&cfg)?;
    eprintln!(
        "sweep: {} cells ok, {} failed in {:.1?}",
        summary.rows.len(),
        summary.failed.len(),
        started.elapsed()
    );
    for f in &summary.failed {
        eprintln!(
            "  failed: alpha_sq={} kappa={}: {}",
            f.alpha_sq, f.kappa, f.error
        );
    }
    println!("{}", cfg.output_dir.display());
    Ok(if summary.complete() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    })
}

fn cmd_cell(
    kappa: f64,
    alpha_sq: f64,
    chi: f64,
    config: Option<PathBuf>,
    output: Option<PathBuf>,
) -> anyhow::Result<ExitCode> {
    let mut cfg = match config {
        Some(path) => load_config(&path)?,
        None => SweepConfig::default(),
    };
    cfg.alpha_sq = vec![alpha_sq];
    cfg.kappa = vec![kappa];
    cfg.chi = chi;
    if let Some(dir) = output {
        cfg.output_dir = dir;
    }
    cfg.validate()?;
    configure_workers(cfg.workers);

    let started = Instant::now();
    let (result, paths) = run_cell_with_artifacts(&cfg, kappa, alpha_sq)?;
    eprintln!("cell finished in {:.1?}", started.elapsed());

    println!(
        "kappa={} alpha_sq={} chi={}",
        result.kappa, result.alpha_sq, result.chi
    );
    println!(
        "t_d={} (clear_minimum={}) d_emb={} (converged={}) nodes={}",
        result.delay.lag,
        result.delay.clear_minimum,
        result.dimension.dim,
        result.dimension.converged,
        result.node_count
    );
    println!(
        "epsilon_c={:.6} (l2={:.3e}, converged={})",
        result.epsilon.epsilon_c, result.epsilon.l2_at_c, result.epsilon.l2_converged
    );
    let m = result.at_critical();
    println!(
        "at epsilon_c: APL={:.4} LD={:.6} CC={:.4} T={:.4} edges={}",
        m.average_path_length.value,
        m.link_density,
        m.global_clustering,
        m.transitivity,
        m.edge_count
    );
    println!("short-time class: {:?}", result.short.class);
    for p in paths {
        println!("wrote {}", p.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_metrics(edges: PathBuf, out: Option<PathBuf>) -> anyhow::Result<ExitCode> {
    let file = File::open(&edges).with_context(|| format!("opening {}", edges.display()))?;
    let (net, headers) = RecurrenceNetwork::read_edge_list(BufReader::new(file))?;
    let report = metrics_report(&net)?;
    let mut doc = serde_json::to_value(&report)?;
    if let serde_json::Value::Object(map) = &mut doc {
        map.insert(
            "source_headers".into(),
            serde_json::to_value(&headers)?,
        );
    }
    let text = serde_json::to_string_pretty(&doc)?;
    match out {
        Some(path) => {
            std::fs::write(&path, text + "\n")?;
            eprintln!("wrote {}", path.display());
        }
        None => println!("{text}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config } => cmd_run(config),
        Command::Cell {
            kappa,
            alpha_sq,
            chi,
            config,
            output,
        } => cmd_cell(kappa, alpha_sq, chi, config, output),
        Command::Metrics { edges, out } => cmd_metrics(edges, out),
    };
    match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
