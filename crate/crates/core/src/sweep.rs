//! Scenario runner: the four zone-control sweeps, the free-motion symmetry
//! experiment, config parsing and report output.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cell::{BandStructure, CellPotential, Gap, TransformSpec, WeightAnchorSpec, DEFAULT_GRID_SIZE};
use crate::error::{Error, Result};
use crate::floquet::{self, BandOptions, ForbiddennessCurve, Propagator};

/// Distance below which two discriminant curves count as coinciding.
pub const SYMMETRY_THRESHOLD: f64 = 1e-6;
pub const SYMMETRY_GRID_POINTS: usize = 500;
/// Tolerance for identifying a shifted level with a computed zone edge.
pub const EDGE_MATCH_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioName {
    Fig1a,
    Fig1b,
    Fig1c,
    Fig1d,
    Symmetry,
    /// Level shifts of a user-chosen level on a user-chosen comb.
    Custom,
}

impl ScenarioName {
    /// Zone below the gap each scenario tracks for merge events.
    fn focus_gap(self) -> Option<usize> {
        match self {
            ScenarioName::Fig1a | ScenarioName::Fig1c => Some(2),
            ScenarioName::Fig1b => Some(1),
            _ => None,
        }
    }
}

impl std::str::FromStr for ScenarioName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.to_owned()))
            .map_err(|_| Error::Config(format!("unknown scenario {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub scan_step: f64,
    pub gap_tol: f64,
    pub root_tol: f64,
    pub ode_rtol: f64,
    pub ode_atol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            scan_step: floquet::DEFAULT_SCAN_STEP,
            gap_tol: floquet::DEFAULT_GAP_TOL,
            root_tol: floquet::DEFAULT_ROOT_TOL,
            ode_rtol: 1e-11,
            ode_atol: 1e-11,
        }
    }
}

impl Tolerances {
    pub fn band_options(&self) -> BandOptions {
        BandOptions {
            scan_step: self.scan_step,
            root_tol: self.root_tol,
            gap_tol: self.gap_tol,
            propagator: Propagator::new(self.ode_rtol, self.ode_atol),
        }
    }

    fn validate(&self) -> Result<()> {
        let all = [self.scan_step, self.gap_tol, self.root_tol, self.ode_rtol, self.ode_atol];
        if all.iter().all(|v| v.is_finite() && *v > 0.0) {
            Ok(())
        } else {
            Err(Error::Config(format!("tolerances must be positive and finite: {self:?}")))
        }
    }
}

/// A level-shift request `(n, t)` in the symmetry experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShiftSpec {
    pub n: u32,
    pub t: f64,
}

/// Fully resolved scenario; every field is echoed into the report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: ScenarioName,
    pub comb_strength: f64,
    /// Shifted auxiliary level (band scenarios).
    pub level: u32,
    /// Shifts `t` for band scenarios, ratios `c/c°` for fig1d.
    pub sweep_values: Vec<f64>,
    pub window: [f64; 2],
    pub grid_size: usize,
    pub tolerances: Tolerances,
    /// Anchor energy of the weight change (fig1d).
    pub energy_point: f64,
    /// Samples of the forbiddenness curve (fig1d).
    pub curve_points: usize,
    pub pairs: Vec<ShiftSpec>,
}

impl Scenario {
    /// Scenario with the documented defaults and no sweep values.
    pub fn defaults(name: ScenarioName) -> Self {
        let (comb_strength, level, window) = match name {
            ScenarioName::Fig1a | ScenarioName::Fig1b | ScenarioName::Custom => (4.0, 2, [-10.0, 16.0]),
            ScenarioName::Fig1c => (-4.0, 1, [-10.0, 16.0]),
            ScenarioName::Fig1d => (4.0, 0, [0.0, 12.0]),
            ScenarioName::Symmetry => (0.0, 0, [0.0, 16.0]),
        };
        Self {
            name,
            comb_strength,
            level,
            sweep_values: Vec::new(),
            window,
            grid_size: DEFAULT_GRID_SIZE,
            tolerances: Tolerances::default(),
            energy_point: 2.0,
            curve_points: 241,
            pairs: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let [lo, hi] = self.window;
        if !(lo < hi && lo.is_finite() && hi.is_finite()) {
            return Err(Error::InvalidWindow(lo, hi));
        }
        if !self.comb_strength.is_finite() {
            return Err(Error::Config("comb_strength must be finite".into()));
        }
        if self.grid_size == 0 {
            return Err(Error::Config("grid_size must be positive".into()));
        }
        self.tolerances.validate()?;
        match self.name {
            ScenarioName::Symmetry => {
                if self.pairs.is_empty() {
                    return Err(Error::Config("symmetry scenario needs at least one pair".into()));
                }
                if self.comb_strength != 0.0 {
                    return Err(Error::Config("symmetry experiment starts from free motion (comb_strength 0)".into()));
                }
            }
            ScenarioName::Fig1d => {
                if self.sweep_values.is_empty() {
                    return Err(Error::Config("sweep_values must not be empty".into()));
                }
                if self.curve_points < 2 {
                    return Err(Error::Config("curve_points must be at least 2".into()));
                }
                if !self.energy_point.is_finite() {
                    return Err(Error::Config("energy_point must be finite".into()));
                }
            }
            _ => {
                if self.sweep_values.is_empty() {
                    return Err(Error::Config("sweep_values must not be empty".into()));
                }
                if self.level == 0 {
                    return Err(Error::InvalidLevel);
                }
            }
        }
        if self.sweep_values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("sweep_values must be finite".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    scenario: ScenarioName,
    comb_strength: Option<f64>,
    level: Option<u32>,
    #[serde(default)]
    sweep_values: Vec<f64>,
    window: Option<[f64; 2]>,
    grid_size: Option<usize>,
    tolerances: Option<Tolerances>,
    energy_point: Option<f64>,
    curve_points: Option<usize>,
    pairs: Option<Vec<ShiftSpec>>,
}

/// Parses a JSON scenario config, filling documented defaults.
pub fn parse_config_str(text: &str) -> Result<Scenario> {
    let raw: RawConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    let mut s = Scenario::defaults(raw.scenario);
    if let Some(v) = raw.comb_strength {
        s.comb_strength = v;
    }
    if let Some(v) = raw.level {
        s.level = v;
    }
    s.sweep_values = raw.sweep_values;
    if let Some(v) = raw.window {
        s.window = v;
    }
    if let Some(v) = raw.grid_size {
        s.grid_size = v;
    }
    if let Some(v) = raw.tolerances {
        s.tolerances = v;
    }
    if let Some(v) = raw.energy_point {
        s.energy_point = v;
    }
    if let Some(v) = raw.curve_points {
        s.curve_points = v;
    }
    if let Some(v) = raw.pairs {
        s.pairs = v;
    }
    s.validate()?;
    Ok(s)
}

pub fn parse_config(path: &Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path)?;
    parse_config_str(&text).map_err(|e| match e {
        Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
        other => other,
    })
}

/// Which zone edges a shifted level coincides with.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelRole {
    pub energy: f64,
    pub upper_edge_of: Option<usize>,
    pub lower_edge_of: Option<usize>,
}

impl LevelRole {
    pub fn locate(bands: &BandStructure, energy: f64) -> Self {
        let near = |e: f64| (e - energy).abs() < EDGE_MATCH_TOL;
        let last = bands.zones.len().saturating_sub(1);
        let mut role = Self { energy, upper_edge_of: None, lower_edge_of: None };
        for (i, z) in bands.zones.iter().enumerate() {
            if near(z.upper) && !(i == last && bands.clipped_above) {
                role.upper_edge_of = Some(z.index);
            }
            if near(z.lower) && !(i == 0 && bands.clipped_below) {
                role.lower_edge_of = Some(z.index);
            }
        }
        role
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Outcome {
    Bands {
        bands: BandStructure,
        focus_gap: Option<Gap>,
        shifted_level: Option<LevelRole>,
    },
    Curve {
        curve: ForbiddennessCurve,
        /// `Im K` evaluated exactly at the scenario's energy point.
        im_k_at_point: f64,
    },
    Failed {
        error: String,
        exit_code: i32,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepEntry {
    pub value: f64,
    #[serde(flatten)]
    pub outcome: Outcome,
}

impl SweepEntry {
    pub fn bands(&self) -> Option<&BandStructure> {
        match &self.outcome {
            Outcome::Bands { bands, .. } => Some(bands),
            _ => None,
        }
    }

    pub fn focus_gap(&self) -> Option<&Gap> {
        match &self.outcome {
            Outcome::Bands { focus_gap, .. } => focus_gap.as_ref(),
            _ => None,
        }
    }

    pub fn shifted_level(&self) -> Option<&LevelRole> {
        match &self.outcome {
            Outcome::Bands { shifted_level, .. } => shifted_level.as_ref(),
            _ => None,
        }
    }

    pub fn im_k_at_point(&self) -> Option<f64> {
        match &self.outcome {
            Outcome::Curve { im_k_at_point, .. } => Some(*im_k_at_point),
            _ => None,
        }
    }

    pub fn is_failed(&self) -> bool {
        matches!(self.outcome, Outcome::Failed { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MergeSample {
    pub value: f64,
    pub width: f64,
}

/// Merge events of the tracked gap across the sweep.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MergeSummary {
    pub gap_below_zone: usize,
    /// Entries whose tracked gap is narrower than `gap_tol`.
    pub merged: Vec<MergeSample>,
    /// Linear interpolation of sign changes of `width − gap_tol` between
    /// consecutive successful entries.
    pub crossings: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetryReport {
    pub base_comb_strength: f64,
    pub pairs: Vec<ShiftSpec>,
    pub grid_points: usize,
    pub threshold: f64,
    /// `distances[i][j] = sup_E |Δ_i(E) − Δ_j(E)|`; `None` when either entry failed.
    pub distances: Vec<Vec<Option<f64>>>,
    pub failures: Vec<Option<String>>,
    /// Whether every computed off-diagonal distance is below the threshold.
    pub all_coincide: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub scenario: Scenario,
    pub entries: Vec<SweepEntry>,
    pub merges: Option<MergeSummary>,
    pub symmetry: Option<SymmetryReport>,
}

impl SweepReport {
    pub fn entry(&self, value: f64) -> Option<&SweepEntry> {
        self.entries.iter().find(|e| e.value == value)
    }
}

fn failed(e: &Error) -> Outcome {
    Outcome::Failed { error: e.to_string(), exit_code: e.exit_code() }
}

/// Potential for a level shift `t` of level `n`; `t = 0` is the bare comb.
pub fn shifted_potential(comb_strength: f64, n: u32, t: f64, grid_size: usize) -> Result<CellPotential> {
    if t == 0.0 {
        if n == 0 {
            return Err(Error::InvalidLevel);
        }
        return CellPotential::new(comb_strength, crate::cell::SmoothPart::Zero, grid_size);
    }
    TransformSpec::LevelShift { n, t }.build(comb_strength, grid_size)
}

fn band_entry(s: &Scenario, t: f64) -> Outcome {
    let run = || -> Result<Outcome> {
        let p = shifted_potential(s.comb_strength, s.level, t, s.grid_size)?;
        let bands = floquet::band_edges_with(&p, s.window, &s.tolerances.band_options())?;
        let focus_gap = s.name.focus_gap().and_then(|i| bands.gap_above(i).copied());
        let level = (s.level as f64).powi(2) + t;
        let shifted_level = Some(LevelRole::locate(&bands, level));
        Ok(Outcome::Bands { bands, focus_gap, shifted_level })
    };
    run().unwrap_or_else(|e| failed(&e))
}

fn curve_entry(s: &Scenario, ratio: f64) -> Outcome {
    let run = || -> Result<Outcome> {
        let spec = TransformSpec::WeightChange { anchor: WeightAnchorSpec::Energy(s.energy_point), ratio };
        let p = spec.build(s.comb_strength, s.grid_size)?;
        let prop = Propagator::new(s.tolerances.ode_rtol, s.tolerances.ode_atol);
        let curve = floquet::forbiddenness_curve_with(&p, s.window, s.curve_points, &prop)?;
        let im_k_at_point = floquet::im_k_from_discriminant(prop.discriminant(&p, s.energy_point)?);
        Ok(Outcome::Curve { curve, im_k_at_point })
    };
    run().unwrap_or_else(|e| failed(&e))
}

fn merge_summary(entries: &[SweepEntry], below: usize, gap_tol: f64) -> MergeSummary {
    let mut out = MergeSummary { gap_below_zone: below, ..Default::default() };
    let mut prev: Option<MergeSample> = None;
    for e in entries {
        let Some(gap) = e.focus_gap() else { continue };
        let width = gap.width;
        let sample = MergeSample { value: e.value, width };
        if width < gap_tol {
            out.merged.push(sample);
        }
        if let Some(p) = prev {
            let (a, b) = (p.width - gap_tol, width - gap_tol);
            if a.signum() != b.signum() {
                out.crossings.push(p.value + (sample.value - p.value) * a / (a - b));
            }
        }
        prev = Some(sample);
    }
    out
}

/// Runs any scenario; entries keep the order of `sweep_values`.
pub fn run_scenario(s: &Scenario) -> Result<SweepReport> {
    s.validate()?;
    match s.name {
        ScenarioName::Symmetry => {
            let symmetry = symmetry_report(s);
            Ok(SweepReport { scenario: s.clone(), entries: Vec::new(), merges: None, symmetry: Some(symmetry) })
        }
        ScenarioName::Fig1d => {
            let entries = s.sweep_values.iter().map(|&r| SweepEntry { value: r, outcome: curve_entry(s, r) }).collect();
            Ok(SweepReport { scenario: s.clone(), entries, merges: None, symmetry: None })
        }
        name => {
            let entries: Vec<SweepEntry> =
                s.sweep_values.iter().map(|&t| SweepEntry { value: t, outcome: band_entry(s, t) }).collect();
            let merges = name.focus_gap().map(|i| merge_summary(&entries, i, s.tolerances.gap_tol));
            Ok(SweepReport { scenario: s.clone(), entries, merges, symmetry: None })
        }
    }
}

/// The level that changes sides at the scenario's merge: the shifted level in
/// fig1a, the fixed level below it in fig1b, the fixed level above it in fig1c.
fn pivot_energy(s: &Scenario, t: f64) -> Option<f64> {
    let n = s.level as f64;
    match s.name {
        ScenarioName::Fig1a => Some(n * n + t),
        ScenarioName::Fig1b if s.level >= 2 => Some((n - 1.0).powi(2)),
        ScenarioName::Fig1c => Some((n + 1.0).powi(2)),
        _ => None,
    }
}

/// Width of the tracked gap, positive while the pivot level is the upper edge
/// of the lower zone and negative while it is the lower edge of the upper one.
pub fn signed_focus_gap(s: &Scenario, t: f64) -> Result<f64> {
    let (Some(below), Some(pivot)) = (s.name.focus_gap(), pivot_energy(s, t)) else {
        return Err(Error::Unsupported("merge tracking for this scenario"));
    };
    let p = shifted_potential(s.comb_strength, s.level, t, s.grid_size)?;
    let bands = floquet::band_edges_with(&p, s.window, &s.tolerances.band_options())?;
    let gap = bands
        .gap_above(below)
        .ok_or_else(|| Error::Integration(format!("no gap above zone {below} at t = {t}")))?;
    // edges of a nearly closed gap are double roots of |Δ| − 1 and only
    // accurate to about the square root of the integration error, so the
    // pivot is assigned to the nearer side
    let (to_lower, to_upper) = ((pivot - gap.lower).abs(), (pivot - gap.upper).abs());
    if to_lower.min(to_upper) > 1e-3 {
        return Err(Error::Integration(format!("pivot level {pivot} is not an edge of gap {below} at t = {t}")));
    }
    Ok(if to_lower <= to_upper { gap.width } else { -gap.width })
}

/// Shift at which the tracked gap closes, bracketed by `[lo, hi]`.
pub fn locate_merge(s: &Scenario, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    crate::roots::bisect(|t| signed_focus_gap(s, t), lo, hi, tol)
}

pub fn with_values(name: ScenarioName, values: &[f64]) -> Scenario {
    let mut s = Scenario::defaults(name);
    s.sweep_values = values.to_vec();
    s
}

/// Upward shifts of level 2 on the δ-barrier comb `V° = 4`.
pub fn run_fig1a(deltas: &[f64]) -> Result<SweepReport> {
    run_scenario(&with_values(ScenarioName::Fig1a, deltas))
}

/// Downward shifts of level 2 on the δ-barrier comb `V° = 4`.
pub fn run_fig1b(deltas: &[f64]) -> Result<SweepReport> {
    run_scenario(&with_values(ScenarioName::Fig1b, deltas))
}

/// Upward shifts of the ground level on the δ-well comb `V° = −4`.
pub fn run_fig1c(deltas: &[f64]) -> Result<SweepReport> {
    run_scenario(&with_values(ScenarioName::Fig1c, deltas))
}

/// Spectral-weight ratios at `E = 2` on the `V° = 4` comb.
pub fn run_fig1d(ratios: &[f64]) -> Result<SweepReport> {
    run_scenario(&with_values(ScenarioName::Fig1d, ratios))
}

pub fn run_symmetry_experiment(pairs: &[ShiftSpec]) -> Result<SweepReport> {
    let mut s = Scenario::defaults(ScenarioName::Symmetry);
    s.pairs = pairs.to_vec();
    run_scenario(&s)
}

fn symmetry_report(s: &Scenario) -> SymmetryReport {
    let [lo, hi] = s.window;
    let m = SYMMETRY_GRID_POINTS;
    let grid: Vec<f64> = (0..m).map(|i| lo + (hi - lo) * i as f64 / (m - 1) as f64).collect();
    let prop = Propagator::new(s.tolerances.ode_rtol, s.tolerances.ode_atol);
    let curves: Vec<Result<Vec<f64>>> = s
        .pairs
        .iter()
        .map(|spec| {
            let p = shifted_potential(s.comb_strength, spec.n, spec.t, s.grid_size)?;
            grid.iter().map(|&e| prop.discriminant(&p, e)).collect()
        })
        .collect();
    let k = curves.len();
    let mut distances = vec![vec![None; k]; k];
    let mut all_coincide = true;
    for i in 0..k {
        for j in 0..k {
            if let (Ok(a), Ok(b)) = (&curves[i], &curves[j]) {
                let d = a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
                if i != j && d >= SYMMETRY_THRESHOLD {
                    all_coincide = false;
                }
                distances[i][j] = Some(d);
            }
        }
    }
    let failures = curves.iter().map(|c| c.as_ref().err().map(|e| e.to_string())).collect();
    SymmetryReport {
        base_comb_strength: s.comb_strength,
        pairs: s.pairs.clone(),
        grid_points: m,
        threshold: SYMMETRY_THRESHOLD,
        distances,
        failures,
        all_coincide,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            other => Err(Error::Config(format!("unknown format {other:?} (expected csv or json)"))),
        }
    }
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// CSV rendering: zone rows for band sweeps, curve rows for fig1d, a
/// distance table for the symmetry experiment. Failed entries are omitted.
pub fn to_csv(report: &SweepReport) -> String {
    let mut out = String::new();
    if let Some(sym) = &report.symmetry {
        out.push_str("i,n_i,t_i,j,n_j,t_j,distance\n");
        for (i, row) in sym.distances.iter().enumerate() {
            for (j, d) in row.iter().enumerate() {
                let (a, b) = (sym.pairs[i], sym.pairs[j]);
                let d = d.map(num).unwrap_or_default();
                let _ = writeln!(out, "{i},{},{},{j},{},{},{d}", a.n, num(a.t), b.n, num(b.t));
            }
        }
        return out;
    }
    if report.scenario.name == ScenarioName::Fig1d {
        out.push_str("sweep_value,E,Delta,ImK\n");
        for e in &report.entries {
            if let Outcome::Curve { curve, .. } = &e.outcome {
                for i in 0..curve.len() {
                    let row = [e.value, curve.energies[i], curve.delta[i], curve.im_k[i]].map(num);
                    let _ = writeln!(out, "{}", row.join(","));
                }
            }
        }
        return out;
    }
    out.push_str("sweep_value,zone_index,lower,upper,merged_flag\n");
    for e in &report.entries {
        if let Some(bands) = e.bands() {
            for z in &bands.zones {
                let merged = u8::from(bands.merged_above(z.index));
                let _ = writeln!(out, "{},{},{},{},{merged}", num(e.value), z.index, num(z.lower), num(z.upper));
            }
        }
    }
    out
}

pub fn to_json(report: &SweepReport) -> Result<String> {
    Ok(serde_json::to_string_pretty(report)?)
}

pub fn render_report(report: &SweepReport, format: ReportFormat) -> Result<String> {
    match format {
        ReportFormat::Csv => Ok(to_csv(report)),
        ReportFormat::Json => to_json(report),
    }
}

pub fn write_report(report: &SweepReport, path: &Path, format: ReportFormat) -> Result<()> {
    std::fs::write(path, render_report(report, format)?)?;
    Ok(())
}

pub fn read_report_json(path: &Path) -> Result<SweepReport> {
    Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_gets_defaults() {
        let s = parse_config_str(r#"{"scenario": "fig1a", "sweep_values": [1]}"#).unwrap();
        assert_eq!(s.comb_strength, 4.0);
        assert_eq!(s.level, 2);
        assert_eq!(s.window, [-10.0, 16.0]);
        assert_eq!(s.tolerances, Tolerances::default());
    }

    #[test]
    fn config_rejections() {
        assert!(parse_config_str(r#"{"scenario": "fig1a", "sweep_values": []}"#).is_err());
        let e = parse_config_str(r#"{"scenario": "fig1a", "sweep_values": [1], "colour": 3}"#).unwrap_err();
        assert!(e.to_string().contains("colour"), "{e}");
        let e = parse_config_str("{\"scenario\": \"fig1a\",\n \"sweep_values\": [1,]}").unwrap_err();
        assert!(e.to_string().contains("line 2"), "{e}");
        assert!(parse_config_str(r#"{"scenario": "fig1a", "sweep_values": [1], "window": [3, 1]}"#).is_err());
        assert!(parse_config_str(r#"{"scenario": "symmetry"}"#).is_err());
    }

    #[test]
    fn failed_entry_is_isolated() {
        let s = with_values(ScenarioName::Fig1a, &[0.5, 6.0, 0.5]);
        let r = run_scenario(&s).unwrap();
        assert!(!r.entries[0].is_failed());
        assert!(r.entries[1].is_failed());
        assert_eq!(r.entries[0], r.entries[2]);
    }

    #[test]
    fn zero_shift_is_bare_comb() {
        let r = run_fig1a(&[0.0]).unwrap();
        let bands = r.entries[0].bands().unwrap();
        assert!((bands.zone(2).unwrap().upper - 4.0).abs() < 1e-8);
        assert_eq!(r.entries[0].shifted_level().unwrap().upper_edge_of, Some(2));
    }

    #[test]
    fn crossings_interpolate() {
        let mk = |value: f64, width: f64| SweepEntry {
            value,
            outcome: Outcome::Bands {
                bands: BandStructure {
                    zones: Vec::new(),
                    window: [0.0, 1.0],
                    gaps: Vec::new(),
                    clipped_below: false,
                    clipped_above: false,
                },
                focus_gap: Some(Gap { below: 2, lower: 0.0, upper: width, width, merged: width < 1e-3 }),
                shifted_level: None,
            },
        };
        let m = merge_summary(&[mk(0.0, 3e-3), mk(1.0, 0.0), mk(2.0, 1e-3)], 2, 1e-3);
        assert_eq!(m.merged.len(), 1);
        assert!((m.crossings[0] - 2.0 / 3.0).abs() < 1e-12);
    }
}
