//! The `relstandby` command-line tool.
//!
//! Exit status: 0 success, 1 computation or validity failure, 2 usage or
//! configuration error.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{GridConfig, OutputFormat, RunConfig};
use crate::engine::{EvalConfig, EvalPath, Estimate};
use crate::error::{Error, Result};
use crate::mrl::{psi1, psi2, psi3};
use crate::reliability::{cost_rates, survival_kn, survival_t};
use crate::simulate::{simulate_metrics_with, Target};
use crate::system::SystemSpec;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Tolerances for flagging a table cell against its printed reference.
const MTTF_TOL: f64 = 1e-4;
const RATE_TOL: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Validate,
    Curve,
    Table,
    Simulate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    #[value(alias = "SurvivalBare")]
    SurvivalBare,
    #[value(alias = "SurvivalT")]
    SurvivalT,
    #[value(alias = "Psi1")]
    Psi1,
    #[value(alias = "Psi2")]
    Psi2,
    #[value(alias = "Psi3")]
    Psi3,
}

impl Quantity {
    fn is_probability(self) -> bool {
        matches!(self, Quantity::SurvivalBare | Quantity::SurvivalT)
    }

    fn eval(self, spec: &SystemSpec, x: f64, cfg: &EvalConfig) -> Result<Estimate> {
        match self {
            Quantity::SurvivalBare => survival_kn(spec, x),
            Quantity::SurvivalT => survival_t(spec, x, cfg),
            Quantity::Psi1 => psi1(spec, x, cfg),
            Quantity::Psi2 => psi2(spec, x, cfg),
            Quantity::Psi3 => psi3(spec, x, cfg),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "relstandby", version, about = "Reliability of k-out-of-n systems with a cold standby under copula dependence")]
pub struct Cli {
    pub command: Command,
    /// Run configuration (JSON). `table` accepts several.
    #[arg(long, required = true, num_args = 1..)]
    pub config: Vec<PathBuf>,
    #[arg(long, value_enum, default_value = "survival-t")]
    pub quantity: Quantity,
    /// Evaluation grid `start:stop:points`; overrides the config grid.
    #[arg(long)]
    pub grid: Option<String>,
    /// Overrides the Monte Carlo seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Treat an improper copula density as a failure.
    #[arg(long)]
    pub strict: bool,
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Error raised before any computation starts.
struct Usage(Error);

enum Failure {
    Usage(Error),
    Compute(Error),
}

impl From<Usage> for Failure {
    fn from(u: Usage) -> Self {
        Failure::Usage(u.0)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Compute(e)
    }
}

struct Loaded {
    cfg: RunConfig,
    spec: SystemSpec,
}

fn load(cli: &Cli, path: &Path) -> std::result::Result<Loaded, Usage> {
    let mut cfg = RunConfig::load(path).map_err(Usage)?;
    if let Some(seed) = cli.seed {
        cfg.eval.seed = seed;
    }
    let spec = cfg.spec().map_err(|e| Usage(Error::Config(format!("{}: {e}", path.display()))))?;
    Ok(Loaded { cfg, spec })
}

/// Runs one invocation, writing data to `out` (or `--out`) and diagnostics
/// to `err`. Returns the exit status.
pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = match cli.command {
        Command::Validate => cmd_validate(cli, out, err),
        Command::Curve => cmd_curve(cli, out, err),
        Command::Table => cmd_table(cli, out, err),
        Command::Simulate => cmd_simulate(cli, out, err),
    };
    match result {
        Ok(code) => code,
        Err(Failure::Usage(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
        Err(Failure::Compute(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_FAILURE
        }
    }
}

fn single_config(cli: &Cli) -> std::result::Result<&PathBuf, Usage> {
    match cli.config.as_slice() {
        [one] => Ok(one),
        _ => Err(Usage(Error::Config(format!(
            "this command takes exactly one --config, got {}",
            cli.config.len()
        )))),
    }
}

fn format_of(cli: &Cli, cfg: &RunConfig) -> OutputFormat {
    cli.format.unwrap_or(cfg.output.format)
}

fn emit(cli: &Cli, cfg: Option<&RunConfig>, text: &str, out: &mut dyn Write) -> Result<()> {
    let path = cli.out.clone().or_else(|| cfg.and_then(|c| c.output.path.clone()));
    match path {
        Some(p) => std::fs::write(&p, text).map_err(|e| Error::Config(format!("cannot write {}: {e}", p.display()))),
        None => out
            .write_all(text.as_bytes())
            .map_err(|e| Error::Config(format!("cannot write output: {e}"))),
    }
}

/// `x` to 12 significant digits, without trailing zeros.
pub fn sig12(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".into() } else { x.to_string() };
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        let s = if s.contains('.') { s.trim_end_matches('0').trim_end_matches('.').to_string() } else { s };
        if s == "-0" {
            "0".into()
        } else {
            s
        }
    } else {
        let s = format!("{x:.11e}");
        let (mantissa, e) = s.split_once('e').expect("exponent form");
        let mantissa = if mantissa.contains('.') { mantissa.trim_end_matches('0').trim_end_matches('.') } else { mantissa };
        format!("{mantissa}e{e}")
    }
}

fn cmd_validate(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> std::result::Result<i32, Failure> {
    let path = single_config(cli)?;
    let loaded = load(cli, path)?;
    let report = loaded.spec.report();
    let c = &report.copula;
    #[derive(Serialize)]
    struct Json<'a> {
        n: usize,
        k: usize,
        min_corner_density: f64,
        max_corner_density: f64,
        argmin_corner: &'a [f64],
        is_proper_density: bool,
    }
    let body = match format_of(cli, &loaded.cfg) {
        OutputFormat::Json => {
            let j = Json {
                n: report.n,
                k: report.k,
                min_corner_density: c.min_corner_density,
                max_corner_density: c.max_corner_density,
                argmin_corner: &c.argmin_corner,
                is_proper_density: c.is_proper_density,
            };
            serde_json::to_string_pretty(&j).expect("report serializes") + "\n"
        }
        OutputFormat::Csv => format!(
            "n,k,min_corner_density,max_corner_density,argmin_corner,is_proper_density\n{},{},{},{},{},{}\n",
            report.n,
            report.k,
            sig12(c.min_corner_density),
            sig12(c.max_corner_density),
            c.argmin_corner.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(" "),
            c.is_proper_density
        ),
    };
    emit(cli, Some(&loaded.cfg), &body, out)?;
    if !c.is_proper_density {
        let _ = writeln!(
            err,
            "warning: density min {} at corner {:?}; the copula density is not proper",
            sig12(c.min_corner_density),
            c.argmin_corner
        );
        if cli.strict {
            return Ok(EXIT_FAILURE);
        }
    }
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct Row {
    x: f64,
    value: f64,
    error_bound: f64,
    path: EvalPath,
}

fn cmd_curve(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> std::result::Result<i32, Failure> {
    let path = single_config(cli)?;
    let Loaded { cfg, spec } = load(cli, path)?;
    let grid = match (&cli.grid, &cfg.grid) {
        (Some(g), _) => GridConfig::parse(g).map_err(Usage)?,
        (None, Some(g)) => *g,
        (None, None) => return Err(Failure::Usage(Error::Config("no grid: pass --grid or set `grid` in the config".into()))),
    };
    let xs = grid.values().map_err(Usage)?;
    let q = cli.quantity;
    let estimates: Vec<Result<Estimate>> = xs.par_iter().map(|&x| q.eval(&spec, x, &cfg.eval)).collect();
    let mut rows = Vec::with_capacity(xs.len());
    for (&x, e) in xs.iter().zip(estimates) {
        let mut e = e?;
        if q.is_probability() && !(0.0..=1.0).contains(&e.value) {
            let _ = writeln!(err, "note: raw value {} at x = {} clamped to [0, 1]", e.value, sig12(x));
            e.value = e.value.clamp(0.0, 1.0);
        }
        rows.push(Row { x, value: e.value, error_bound: e.error_bound, path: e.path });
    }
    let body = match format_of(cli, &cfg) {
        OutputFormat::Csv => {
            let mut s = String::from("x,value,error_bound,path\n");
            for r in &rows {
                s += &format!("{},{},{},{}\n", sig12(r.x), sig12(r.value), sig12(r.error_bound), r.path.as_str());
            }
            s
        }
        OutputFormat::Json => {
            #[derive(Serialize)]
            struct Json<'a> {
                name: Option<&'a str>,
                quantity: Quantity,
                rows: &'a [Row],
            }
            serde_json::to_string_pretty(&Json { name: cfg.name.as_deref(), quantity: q, rows: &rows }).expect("rows serialize")
                + "\n"
        }
    };
    emit(cli, Some(&cfg), &body, out)?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct TableCell {
    name: String,
    quantity: &'static str,
    value: f64,
    error_bound: f64,
    path: EvalPath,
    printed: Option<f64>,
    flagged: bool,
}

fn cmd_table(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> std::result::Result<i32, Failure> {
    let mut loaded = Vec::new();
    for p in &cli.config {
        let l = load(cli, p)?;
        let name = l.cfg.name.clone().unwrap_or_else(|| p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default());
        loaded.push((name, l));
    }
    let mut cells = Vec::new();
    let mut pretty = format!(
        "{:<28} {:>12} {:>12} {:>12} {:>12}\n",
        "config", "E(bare)", "E(standby)", "C(bare)", "C(standby)"
    );
    let mut notes = Vec::new();
    for (name, Loaded { cfg, spec }) in &loaded {
        let r = cost_rates(spec, cfg.unit_cost, &cfg.eval)?;
        let reference = cfg.reference.unwrap_or_default();
        let rate_err = |rate: f64, m: &Estimate| rate * m.error_bound / m.value;
        let row = [
            ("mttf_bare", r.mttf_bare.value, r.mttf_bare.error_bound, r.mttf_bare.path, reference.mttf_bare, MTTF_TOL),
            ("mttf_standby", r.mttf_standby.value, r.mttf_standby.error_bound, r.mttf_standby.path, reference.mttf_standby, MTTF_TOL),
            ("cost_rate_bare", r.cost_rate_bare, rate_err(r.cost_rate_bare, &r.mttf_bare), r.mttf_bare.path, reference.cost_rate_bare, RATE_TOL),
            (
                "cost_rate_standby",
                r.cost_rate_standby,
                rate_err(r.cost_rate_standby, &r.mttf_standby),
                r.mttf_standby.path,
                reference.cost_rate_standby,
                RATE_TOL,
            ),
        ];
        let mut line = format!("{name:<28}");
        for (quantity, value, error_bound, path, printed, tol) in row {
            let flagged = printed.is_some_and(|p| (p - value).abs() > tol);
            let mark = if flagged {
                notes.push(format!(
                    "[{}] {name} {quantity}: computed {} but the reference gives {}",
                    notes.len() + 1,
                    sig12(value),
                    sig12(printed.unwrap_or_default())
                ));
                format!("[{}]", notes.len())
            } else {
                String::new()
            };
            line += &format!(" {:>12}", format!("{value:.6}{mark}"));
            cells.push(TableCell { name: name.clone(), quantity, value, error_bound, path, printed, flagged });
        }
        pretty += &line;
        pretty.push('\n');
    }
    for n in &notes {
        pretty += n;
        pretty.push('\n');
    }
    let _ = err.write_all(pretty.as_bytes());
    let body = match cli.format.unwrap_or(OutputFormat::Csv) {
        OutputFormat::Csv => {
            let mut s = String::from("name,quantity,value,error_bound,path,printed,flagged\n");
            for c in &cells {
                s += &format!(
                    "{},{},{},{},{},{},{}\n",
                    c.name,
                    c.quantity,
                    sig12(c.value),
                    sig12(c.error_bound),
                    c.path.as_str(),
                    c.printed.map(sig12).unwrap_or_default(),
                    c.flagged
                );
            }
            s
        }
        OutputFormat::Json => serde_json::to_string_pretty(&cells).expect("cells serialize") + "\n",
    };
    emit(cli, None, &body, out)?;
    Ok(EXIT_OK)
}

fn cmd_simulate(cli: &Cli, out: &mut dyn Write, _err: &mut dyn Write) -> std::result::Result<i32, Failure> {
    let path = single_config(cli)?;
    let Loaded { cfg, spec } = load(cli, path)?;
    let (count, targets) = match &cfg.simulate {
        Some(s) => (s.count, s.targets.clone()),
        None => (cfg.eval.mc_samples, vec![Target::Mttf]),
    };
    let r = simulate_metrics_with(&spec, &targets, count, cfg.eval.seed, cfg.eval.substreams)?;
    let body = match cli.format.unwrap_or(OutputFormat::Json) {
        OutputFormat::Json => serde_json::to_string_pretty(&r).expect("result serializes") + "\n",
        OutputFormat::Csv => {
            let mut s = String::from("quantity,x,value,standard_error,draws\n");
            for e in &r.estimates {
                s += &format!(
                    "{},{},{},{},{}\n",
                    e.quantity,
                    e.at.map(sig12).unwrap_or_default(),
                    sig12(e.value),
                    sig12(e.standard_error),
                    e.draws
                );
            }
            s
        }
    };
    emit(cli, Some(&cfg), &body, out)?;
    Ok(EXIT_OK)
}
