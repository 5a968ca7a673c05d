use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use riesz_core::harness::{
    emit_report, render_report, run_all_checks, run_conjecture_probe, run_generalized_check, run_maximal_check,
    run_norm_validation, run_sandwich_report, run_sharp_probe, run_truncated_check, run_witness_sweep, Report,
    SweepConfig,
};
use riesz_core::Error;

#[derive(Debug, Parser)]
#[command(name = "riesz", version, about = "Numerical checks of Riesz potential bounds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Closed-form against quadrature norms of the witness profiles
    Norms,
    /// Lower-bound witness ratio along the p grid
    Witness,
    /// Trial ratios against the sharp diagonal constant
    Sharp,
    /// Lower bound, sharp constant and upper bound on the diagonal
    Sandwich,
    /// Truncated kernel norm identity and bilinear bound
    Truncated,
    /// Log-weighted kernels
    Generalized,
    /// Hedberg domination and Stein ratios
    Maximal,
    /// Normalised witness supremum across an alpha grid
    Conjecture,
    /// Every check in a fixed order
    AllChecks,
}

#[derive(Debug, clap::Args)]
struct Opts {
    /// Config file of `key = value` lines; flags override its entries
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    d: Option<String>,
    #[arg(long, global = true)]
    alpha: Option<String>,
    /// Comma-separated list, `auto` or `auto:N`
    #[arg(long = "p-grid", global = true)]
    p_grid: Option<String>,
    #[arg(long = "alpha-grid", global = true)]
    alpha_grid: Option<String>,
    /// Comma-separated `r:s` pairs
    #[arg(long = "rs-grid", global = true)]
    rs_grid: Option<String>,
    #[arg(long, global = true)]
    radii: Option<String>,
    #[arg(long = "rel-tol", global = true)]
    rel_tol: Option<String>,
    /// json or csv
    #[arg(long, global = true)]
    format: Option<String>,
    /// Report path; stdout when absent
    #[arg(long, global = true)]
    out: Option<String>,
    /// `name=value`, repeatable
    #[arg(long = "free-const", global = true)]
    free_const: Vec<String>,
    #[arg(long, global = true)]
    beta: Option<String>,
    /// Slowly varying factor: one, log or loglog
    #[arg(long, global = true)]
    q: Option<String>,
    /// plain or shifted
    #[arg(long = "log-form", global = true)]
    log_form: Option<String>,
    /// Reserved; every run is deterministic
    #[arg(long, global = true)]
    seed: Option<String>,
}

impl Opts {
    fn entries(&self) -> Vec<(&'static str, String)> {
        let single = [
            ("d", &self.d),
            ("alpha", &self.alpha),
            ("p-grid", &self.p_grid),
            ("alpha-grid", &self.alpha_grid),
            ("rs-grid", &self.rs_grid),
            ("radii", &self.radii),
            ("rel-tol", &self.rel_tol),
            ("format", &self.format),
            ("out", &self.out),
            ("beta", &self.beta),
            ("q", &self.q),
            ("log-form", &self.log_form),
            ("seed", &self.seed),
        ];
        let mut out: Vec<(&'static str, String)> =
            single.into_iter().filter_map(|(k, v)| v.clone().map(|v| (k, v))).collect();
        out.extend(self.free_const.iter().map(|v| ("free-const", v.clone())));
        out
    }
}

fn build_config(opts: &Opts) -> Result<SweepConfig, Error> {
    let mut entries = match &opts.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            SweepConfig::parse_entries(&text)?
        }
        None => Vec::new(),
    };
    entries.extend(opts.entries().into_iter().map(|(k, v)| (k.to_string(), v)));
    SweepConfig::from_entries(entries.iter().map(|(k, v)| (k.as_str(), v.as_str())))
}

fn run(command: Command, opts: &Opts) -> Result<bool, Error> {
    let cfg = build_config(opts)?;
    let records = match command {
        Command::Norms => run_norm_validation(&cfg),
        Command::Witness => run_witness_sweep(&cfg),
        Command::Sharp => run_sharp_probe(&cfg),
        Command::Sandwich => run_sandwich_report(&cfg),
        Command::Truncated => run_truncated_check(&cfg),
        Command::Generalized => run_generalized_check(&cfg),
        Command::Maximal => run_maximal_check(&cfg),
        Command::Conjecture => run_conjecture_probe(&cfg),
        Command::AllChecks => run_all_checks(&cfg),
    }?;
    let report = Report::new(&cfg, records)?;
    match &cfg.output_path {
        Some(path) => emit_report(&report, cfg.format, path)?,
        None => {
            let text = render_report(&report, cfg.format)?;
            std::io::stdout().lock().write_all(text.as_bytes())?;
        }
    }
    let s = report.summary;
    eprintln!(
        "pass {} fail {} divergent {} recorded_only {}",
        s.pass, s.fail, s.divergent, s.recorded_only
    );
    Ok(s.fail == 0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command, &cli.opts) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("riesz: {e}");
            ExitCode::from(match e {
                Error::Io(_) => 3,
                _ => 2,
            })
        }
    }
}
