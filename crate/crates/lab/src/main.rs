use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use bergkern_lab::cache::Cache;
use bergkern_lab::{emit_report, Config, Experiment, Lab};
use clap::{Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "bergkern", version, about = "Bergman kernel scaling and equilibrium experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Config file overlaid on the shipped defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory for CSV tables and summary.json.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Comma-separated degrees, e.g. 8,16,32.
    #[arg(long, global = true, value_delimiter = ',')]
    k_list: Option<Vec<usize>>,
    /// Weight spec: fs, log, euclid, torus-fs:a,b or radial:PATH.
    #[arg(long, global = true)]
    weight: Option<String>,
    /// Domain spec: ball, ball-quadratic, chart, ellipsoid:a,b, ...
    #[arg(long, global = true)]
    domain: Option<String>,
    /// Tolerance override KEY=VAL; repeatable.
    #[arg(long = "tol-override", global = true)]
    tol_override: Vec<String>,
    /// Kernel-state cache directory (default: $BERGKERN_CACHE).
    #[arg(long, global = true)]
    cache: Option<PathBuf>,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Slope constancy and the interior plus boundary mass against k⁻ⁿ dim.
    Morse,
    /// Scaled kernel near an interior point against the interior model.
    ScaleInt,
    /// Scaled kernel near a boundary point against the boundary model.
    ScaleBd,
    /// Pairings of the Bergman measures with radial test functions.
    Weakstar,
    /// Rate of k⁻¹ ln K^k towards the equilibrium profile.
    Rate,
    /// Growth of sup B^k against k^{n+1}.
    Bm,
    /// Domination of the scaled boundary diagonal by C max(1, v²)⁻¹.
    Appendix,
    /// Equilibrium measures against envelope Monge–Ampère.
    Equilibrium {
        /// Ungated Bergman-measure comparison for general domains.
        #[arg(long)]
        conjecture: bool,
    },
    All,
}

fn config(cli: &Cli) -> Result<Config> {
    let mut cfg = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default_config(),
    };
    if let Some(ks) = &cli.k_list {
        cfg.set("k_list", toml::Value::Array(ks.iter().map(|&k| toml::Value::Integer(k as i64)).collect()));
    }
    if let Some(w) = &cli.weight {
        cfg.set("weight", toml::Value::String(w.clone()));
    }
    if let Some(d) = &cli.domain {
        cfg.set("domain", toml::Value::String(d.clone()));
    }
    for o in &cli.tol_override {
        cfg.apply_tol_override(o)?;
    }
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<bool> {
    let cfg = config(cli)?;
    let mut lab = Lab::new(cfg, Cache::resolve(cli.cache.as_deref())?)?;
    let experiments: Vec<Experiment> = match cli.command {
        Command::Morse => vec![Experiment::Morse],
        Command::ScaleInt => vec![Experiment::ScaleInt],
        Command::ScaleBd => vec![Experiment::ScaleBd],
        Command::Weakstar => vec![Experiment::Weakstar],
        Command::Rate => vec![Experiment::Rate],
        Command::Bm => vec![Experiment::Bm],
        Command::Appendix => vec![Experiment::Appendix],
        Command::Equilibrium { conjecture } => {
            lab.conjecture = conjecture;
            vec![Experiment::Equilibrium]
        }
        Command::All => Experiment::ALL.to_vec(),
    };
    let mut reports = Vec::new();
    for e in experiments {
        log::info!("running {} on {}", e.name(), lab.example());
        let r = e.run(&lab).with_context(|| format!("experiment {}", e.name()))?;
        for g in &r.gates {
            println!("{:<5} {:<12} {:<40} {:.6e} (bound {:.6e})", if g.pass { "PASS" } else { "FAIL" }, r.experiment, g.name, g.value, g.bound);
        }
        reports.push(r);
    }
    let summary = emit_report(&cli.out, &reports, lab.cfg.tolerances())?;
    println!("wrote {}", summary.display());
    Ok(reports.iter().all(|r| r.pass()))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
