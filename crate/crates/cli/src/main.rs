use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use kinfluid::bench::{paper_table1, timing_table};
use kinfluid::compare::compare_dirs;
use kinfluid::{CaseConfig, Model};

#[derive(Parser)]
#[command(name = "kinfluid", version, about = "Hybrid kinetic/fluid solver for 1D gas dynamics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one case and write snapshots, a run log and timings.
    Run(Box<RunArgs>),
    /// Error norms between the snapshots of two run directories.
    Compare { a: PathBuf, b: PathBuf },
    /// Timing table over a suite of cases and all models.
    Bench {
        #[arg(long, default_value = "paper-table1")]
        suite: String,
        #[arg(long, default_value_t = 100)]
        nx: usize,
        #[arg(long, default_value_t = 16)]
        nv: usize,
        #[arg(long, default_value_t = 0.1)]
        t_end: f64,
    },
}

#[derive(clap::Args)]
struct RunArgs {
    /// key = value file; flags below override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    case: Option<String>,
    #[arg(long)]
    model: Option<String>,
    /// A number or `far`.
    #[arg(long)]
    epsilon: Option<String>,
    #[arg(long)]
    nx: Option<String>,
    #[arg(long)]
    nv: Option<String>,
    #[arg(long)]
    t_end: Option<String>,
    #[arg(long)]
    eta0: Option<String>,
    #[arg(long)]
    delta0: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Extra `key=value` overrides, applied last.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

fn build_config(args: &RunArgs) -> Result<CaseConfig, String> {
    let mut pairs: Vec<(String, String)> = Vec::new();
    if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        // reuse the file parser for syntax errors, then keep the raw pairs
        CaseConfig::parse(&text).map_err(|e| format!("{}: {e}", path.display()))?;
        for line in text.lines() {
            let line = line.split('#').next().unwrap_or("").trim();
            if let Some((k, v)) = line.split_once('=') {
                pairs.push((k.trim().into(), v.trim().into()));
            }
        }
    }
    let flags = [
        ("case", &args.case),
        ("model", &args.model),
        ("epsilon", &args.epsilon),
        ("nx", &args.nx),
        ("nv", &args.nv),
        ("t_end", &args.t_end),
        ("eta0", &args.eta0),
        ("delta0", &args.delta0),
    ];
    for (k, v) in flags {
        if let Some(v) = v {
            pairs.push((k.into(), v.clone()));
        }
    }
    if let Some(out) = &args.out {
        pairs.push(("out".into(), out.display().to_string()));
    }
    for s in &args.set {
        let (k, v) = s.split_once('=').ok_or_else(|| format!("--set expects KEY=VALUE, got `{s}`"))?;
        pairs.push((k.trim().into(), v.trim().into()));
    }
    let refs: Vec<(&str, &str)> = pairs.iter().map(|(k, v)| (k.as_str(), v.as_str())).collect();
    CaseConfig::from_pairs(&refs).map_err(|e| e.to_string())
}

/// Writes to stdout, ignoring a closed pipe (`kinfluid ... | head`).
fn emit(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => build_config(&args).and_then(|cfg| {
            let out = cfg.out.clone().unwrap_or_else(|| PathBuf::from(format!("out/{}-{}", cfg.case, cfg.model)));
            let r = kinfluid::run(&cfg, &out).map_err(|e| e.to_string())?;
            emit(&format!("{}wrote {}\n", r.timing_summary(&cfg), out.display()));
            Ok(())
        }),
        Command::Compare { a, b } => compare_dirs(&a, &b).map(|r| emit(&r.to_string())).map_err(|e| e.to_string()),
        Command::Bench { suite, nx, nv, t_end } => {
            if suite != "paper-table1" {
                Err(format!("unknown suite `{suite}` (available: paper-table1)"))
            } else {
                timing_table(&paper_table1(), &Model::ALL, nx, nv, t_end)
                    .map(|t| emit(&t.to_string()))
                    .map_err(|e| e.to_string())
            }
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            log::error!("{e}");
            ExitCode::FAILURE
        }
    }
}
