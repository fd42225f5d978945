use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use zoneforge::cell::{TransformSpec, WeightAnchorSpec};
use zoneforge::floquet::{self, Propagator};
use zoneforge::sweep::{self, Outcome, ReportFormat, Scenario, ScenarioName, ShiftSpec, SweepReport};
use zoneforge::{Error, Result};

#[derive(Parser)]
#[command(name = "zoneforge", version, about = "Band-structure control of Dirac-comb periodic potentials")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Allowed zones of a comb, optionally with one auxiliary level shifted.
    Bands {
        #[arg(long, default_value_t = 4.0, allow_hyphen_values = true)]
        comb_strength: f64,
        #[arg(long, default_value = "0:16", value_parser = parse_window, allow_hyphen_values = true)]
        window: [f64; 2],
        #[arg(long, default_value_t = 2)]
        level: u32,
        /// Level shift t; 0 leaves the comb untouched.
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        shift: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Shift auxiliary level `n` by `t` and report the zones.
    Shift {
        #[arg(long)]
        level: u32,
        #[arg(long, allow_hyphen_values = true)]
        shift: f64,
        #[arg(long, default_value_t = 4.0, allow_hyphen_values = true)]
        comb_strength: f64,
        #[arg(long, default_value = "-10:16", value_parser = parse_window, allow_hyphen_values = true)]
        window: [f64; 2],
        #[command(flatten)]
        common: Common,
    },
    /// Forbiddenness curves after changing the spectral weight at an energy point.
    Weights {
        #[arg(long, default_value_t = 2.0, allow_hyphen_values = true)]
        energy: f64,
        #[arg(long, conflicts_with = "ratios")]
        ratio: Option<f64>,
        #[arg(long, value_delimiter = ',', conflicts_with = "ratio")]
        ratios: Option<Vec<f64>>,
        #[arg(long, default_value_t = 4.0, allow_hyphen_values = true)]
        comb_strength: f64,
        #[arg(long, default_value = "0:12", value_parser = parse_window, allow_hyphen_values = true)]
        window: [f64; 2],
        #[arg(long, default_value_t = 241)]
        points: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Discriminant and Im K at a single energy.
    Imk {
        #[arg(long, default_value_t = 4.0, allow_hyphen_values = true)]
        comb_strength: f64,
        #[arg(long, allow_hyphen_values = true)]
        energy: f64,
        #[arg(long, requires = "shift")]
        level: Option<u32>,
        #[arg(long, requires = "level", allow_hyphen_values = true)]
        shift: Option<f64>,
        /// Spectral-weight ratio anchored at `--energy`.
        #[arg(long, conflicts_with_all = ["level", "shift"])]
        ratio: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Run a named scenario sweep.
    Sweep {
        #[arg(long, value_parser = parse_scenario)]
        scenario: Option<ScenarioName>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        deltas: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',')]
        ratios: Option<Vec<f64>>,
        #[arg(long, allow_hyphen_values = true)]
        comb_strength: Option<f64>,
        #[arg(long)]
        level: Option<u32>,
        #[arg(long, value_parser = parse_window, allow_hyphen_values = true)]
        window: Option<[f64; 2]>,
        #[arg(long, allow_hyphen_values = true)]
        energy: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Pairwise discriminant distances between level shifts of free motion.
    Symmetry {
        /// Comma-separated `n:t` pairs.
        #[arg(long, value_parser = parse_pairs, value_delimiter = ',', required = true, allow_hyphen_values = true)]
        pairs: Vec<ShiftSpec>,
        #[arg(long, default_value = "0:16", value_parser = parse_window, allow_hyphen_values = true)]
        window: [f64; 2],
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "csv", value_parser = parse_format)]
    format: ReportFormat,
    /// Write the tabulated cell potential of the first entry as JSON.
    #[arg(long)]
    dump_potential: Option<PathBuf>,
    #[arg(long)]
    grid_size: Option<usize>,
    #[arg(long)]
    scan_step: Option<f64>,
    #[arg(long)]
    gap_tol: Option<f64>,
    #[arg(long)]
    root_tol: Option<f64>,
    #[arg(long)]
    ode_rtol: Option<f64>,
    #[arg(long)]
    ode_atol: Option<f64>,
}

impl Common {
    fn apply(&self, s: &mut Scenario) {
        let t = &mut s.tolerances;
        if let Some(v) = self.grid_size {
            s.grid_size = v;
        }
        for (slot, v) in [
            (&mut t.scan_step, self.scan_step),
            (&mut t.gap_tol, self.gap_tol),
            (&mut t.root_tol, self.root_tol),
            (&mut t.ode_rtol, self.ode_rtol),
            (&mut t.ode_atol, self.ode_atol),
        ] {
            if let Some(v) = v {
                *slot = v;
            }
        }
    }
}

fn parse_window(s: &str) -> std::result::Result<[f64; 2], String> {
    let (a, b) = s.split_once(':').ok_or_else(|| format!("expected lo:hi, got {s:?}"))?;
    let lo: f64 = a.trim().parse().map_err(|e| format!("{a:?}: {e}"))?;
    let hi: f64 = b.trim().parse().map_err(|e| format!("{b:?}: {e}"))?;
    if !(lo < hi) {
        return Err(format!("empty window {lo}:{hi}"));
    }
    Ok([lo, hi])
}

fn parse_pairs(s: &str) -> std::result::Result<ShiftSpec, String> {
    let (n, t) = s.split_once(':').ok_or_else(|| format!("expected n:t, got {s:?}"))?;
    Ok(ShiftSpec {
        n: n.trim().parse().map_err(|e| format!("{n:?}: {e}"))?,
        t: t.trim().parse().map_err(|e| format!("{t:?}: {e}"))?,
    })
}

fn parse_scenario(s: &str) -> std::result::Result<ScenarioName, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_format(s: &str) -> std::result::Result<ReportFormat, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn emit_report(report: &SweepReport, common: &Common) -> Result<()> {
    for e in &report.entries {
        if let Outcome::Failed { error, .. } = &e.outcome {
            eprintln!("warning: entry {}: {error}", e.value);
        }
    }
    emit(&sweep::render_report(report, common.format)?, common.out.as_ref())
}

/// Single-entry commands fail with the entry's own exit status.
fn single_entry_result(report: &SweepReport) -> Result<()> {
    match report.entries.first().map(|e| &e.outcome) {
        Some(Outcome::Failed { error, exit_code: 3 }) => Err(Error::Integration(error.clone())),
        Some(Outcome::Failed { error, .. }) => Err(Error::Config(error.clone())),
        _ => Ok(()),
    }
}

fn dump_level_shift(common: &Common, comb: f64, n: u32, t: f64, grid: usize) -> Result<()> {
    if let Some(path) = &common.dump_potential {
        let p = sweep::shifted_potential(comb, n, t, grid)?;
        std::fs::write(path, serde_json::to_string_pretty(&p.dump())?)?;
    }
    Ok(())
}

fn band_command(name: ScenarioName, comb: f64, window: [f64; 2], level: u32, t: f64, common: &Common) -> Result<()> {
    let mut s = Scenario::defaults(name);
    s.comb_strength = comb;
    s.window = window;
    s.level = level;
    s.sweep_values = vec![t];
    common.apply(&mut s);
    let report = sweep::run_scenario(&s)?;
    single_entry_result(&report)?;
    dump_level_shift(common, comb, level, t, s.grid_size)?;
    emit_report(&report, common)
}

#[derive(Serialize)]
struct ImkLine {
    energy: f64,
    delta: f64,
    im_k: f64,
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Bands { comb_strength, window, level, shift, common } => {
            band_command(ScenarioName::Custom, comb_strength, window, level, shift, &common)
        }
        Command::Shift { level, shift, comb_strength, window, common } => {
            band_command(ScenarioName::Custom, comb_strength, window, level, shift, &common)
        }
        Command::Weights { energy, ratio, ratios, comb_strength, window, points, common } => {
            let mut s = Scenario::defaults(ScenarioName::Fig1d);
            s.comb_strength = comb_strength;
            s.energy_point = energy;
            s.window = window;
            s.curve_points = points;
            s.sweep_values = match (ratio, ratios) {
                (Some(r), _) => vec![r],
                (None, Some(rs)) => rs,
                (None, None) => return Err(Error::Config("one of --ratio or --ratios is required".into())),
            };
            common.apply(&mut s);
            let report = sweep::run_scenario(&s)?;
            if s.sweep_values.len() == 1 {
                single_entry_result(&report)?;
            }
            if let Some(path) = &common.dump_potential {
                let spec = TransformSpec::WeightChange {
                    anchor: WeightAnchorSpec::Energy(energy),
                    ratio: s.sweep_values[0],
                };
                let p = spec.build(comb_strength, s.grid_size)?;
                std::fs::write(path, serde_json::to_string_pretty(&p.dump())?)?;
            }
            emit_report(&report, &common)
        }
        Command::Imk { comb_strength, energy, level, shift, ratio, common } => {
            let mut s = Scenario::defaults(ScenarioName::Custom);
            common.apply(&mut s);
            let p = match (level, shift, ratio) {
                (Some(n), Some(t), _) => sweep::shifted_potential(comb_strength, n, t, s.grid_size)?,
                (_, _, Some(r)) => TransformSpec::WeightChange { anchor: WeightAnchorSpec::Energy(energy), ratio: r }
                    .build(comb_strength, s.grid_size)?,
                _ => sweep::shifted_potential(comb_strength, 1, 0.0, s.grid_size)?,
            };
            if let Some(path) = &common.dump_potential {
                std::fs::write(path, serde_json::to_string_pretty(&p.dump())?)?;
            }
            let prop = Propagator::new(s.tolerances.ode_rtol, s.tolerances.ode_atol);
            let delta = prop.discriminant(&p, energy)?;
            let line = ImkLine { energy, delta, im_k: floquet::im_k_from_discriminant(delta) };
            let text = match common.format {
                ReportFormat::Json => serde_json::to_string_pretty(&line)? + "\n",
                ReportFormat::Csv => format!(
                    "E,Delta,ImK\n{:.16e},{:.16e},{:.16e}\n",
                    line.energy, line.delta, line.im_k
                ),
            };
            emit(&text, common.out.as_ref())
        }
        Command::Sweep { scenario, config, deltas, ratios, comb_strength, level, window, energy, common } => {
            let mut s = match (&config, scenario) {
                (Some(path), _) => sweep::parse_config(path)?,
                (None, Some(name)) => Scenario::defaults(name),
                (None, None) => return Err(Error::Config("either --scenario or --config is required".into())),
            };
            if let (Some(_), Some(name)) = (&config, scenario) {
                if name != s.name {
                    return Err(Error::Config(format!("--scenario {name:?} contradicts the config's {:?}", s.name)));
                }
            }
            if let Some(v) = deltas.or(ratios) {
                s.sweep_values = v;
            }
            if let Some(v) = comb_strength {
                s.comb_strength = v;
            }
            if let Some(v) = level {
                s.level = v;
            }
            if let Some(v) = window {
                s.window = v;
            }
            if let Some(v) = energy {
                s.energy_point = v;
            }
            common.apply(&mut s);
            let report = sweep::run_scenario(&s)?;
            emit_report(&report, &common)
        }
        Command::Symmetry { pairs, window, common } => {
            let mut s = Scenario::defaults(ScenarioName::Symmetry);
            s.pairs = pairs;
            s.window = window;
            common.apply(&mut s);
            let report = sweep::run_scenario(&s)?;
            if let Some(sym) = &report.symmetry {
                eprintln!(
                    "coincidence at threshold {:e}: {}",
                    sym.threshold,
                    if sym.all_coincide { "confirmed" } else { "refuted" }
                );
            }
            emit_report(&report, &common)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
