//! Period-cell potentials, their periodic continuation, and the band-structure
//! value types.
//!
//! Conventions: `ℏ²/2m = 1`, period `π`, δ of strength `V°` at the left edge of
//! the cell `[0, π]`. The cell interior carries only the smooth part.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::transforms::{self, LevelShiftProfile, WeightChangeProfile};

pub const DEFAULT_GRID_SIZE: usize = 2048;

/// Closed-form smooth part of the cell potential.
#[derive(Debug, Clone, PartialEq)]
pub enum SmoothPart {
    Zero,
    LevelShift(LevelShiftProfile),
    WeightChange(WeightChangeProfile),
}

impl SmoothPart {
    pub fn is_zero(&self) -> bool {
        matches!(self, SmoothPart::Zero)
    }

    /// Interior points of `(0, π)` where the smooth part may be discontinuous.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            SmoothPart::WeightChange(w) => w.breakpoints(),
            _ => Vec::new(),
        }
    }

    /// Value at `x ∈ [0, π]`, taken as the limit from inside the open
    /// interval `(a, b)` containing no breakpoint.
    pub fn eval_within(&self, x: f64, a: f64, b: f64) -> f64 {
        match self {
            SmoothPart::Zero => 0.0,
            SmoothPart::LevelShift(p) => p.eval(x),
            SmoothPart::WeightChange(w) => w.eval_within(x, a, b),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.eval_within(x, x, x)
    }

    pub fn describe(&self) -> TransformMeta {
        match self {
            SmoothPart::Zero => TransformMeta::None,
            SmoothPart::LevelShift(p) => TransformMeta::LevelShift { n: p.pair().level(), t: p.pair().shift() },
            SmoothPart::WeightChange(w) => w.describe(),
        }
    }
}

/// Description of a transform attached to a dumped potential.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TransformMeta {
    None,
    LevelShift { n: u32, t: f64 },
    WeightChangeLevel { m: u32, ratio: f64 },
    WeightChangeEnergy { energy: f64, bc_angle: f64, ratio: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellPotential {
    delta_strength: f64,
    smooth: SmoothPart,
    grid_size: usize,
    samples: Vec<f64>,
}

impl CellPotential {
    pub fn new(delta_strength: f64, smooth: SmoothPart, grid_size: usize) -> Result<Self> {
        if grid_size == 0 {
            return Err(Error::Config("grid_size must be positive".into()));
        }
        if !delta_strength.is_finite() {
            return Err(Error::NonFinitePotential { x: 0.0 });
        }
        let samples: Vec<f64> = sample_points(grid_size).map(|x| smooth.eval(x)).collect();
        if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinitePotential { x: sample_x(i, grid_size) });
        }
        Ok(Self { delta_strength, smooth, grid_size, samples })
    }

    /// Bare Dirac comb with no smooth part.
    pub fn comb(delta_strength: f64) -> Self {
        Self::new(delta_strength, SmoothPart::Zero, DEFAULT_GRID_SIZE).expect("bare comb is always valid")
    }

    pub fn delta_strength(&self) -> f64 {
        self.delta_strength
    }

    pub fn smooth(&self) -> &SmoothPart {
        &self.smooth
    }

    pub fn grid_size(&self) -> usize {
        self.grid_size
    }

    /// Tabulated smooth part at the cell midpoints `(i + ½)π/N`.
    pub fn samples(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.samples.iter().enumerate().map(|(i, &v)| (sample_x(i, self.grid_size), v))
    }

    /// `|V(ε) − V(π − ε)|`, the mismatch across the lattice seam.
    pub fn seam_mismatch(&self, eps: f64) -> f64 {
        (self.smooth.eval(eps) - self.smooth.eval(PI - eps)).abs()
    }

    pub fn dump(&self) -> PotentialDump {
        PotentialDump {
            delta_strength: self.delta_strength,
            grid: self.samples().map(|(x, v)| GridPoint { x, v }).collect(),
            meta: self.smooth.describe(),
        }
    }
}

fn sample_x(i: usize, n: usize) -> f64 {
    (i as f64 + 0.5) * PI / n as f64
}

fn sample_points(n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| sample_x(i, n))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub x: f64,
    pub v: f64,
}

/// Serialized form written by `--dump-potential`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialDump {
    pub delta_strength: f64,
    pub grid: Vec<GridPoint>,
    pub meta: TransformMeta,
}

/// Smooth part at `x ∈ (0, π)`; the δ is not included.
pub fn eval_cell(p: &CellPotential, x: f64) -> Result<f64> {
    if !(x > 0.0 && x < PI) {
        return Err(Error::OutsideCell { x });
    }
    Ok(p.smooth.eval(x))
}

/// Smooth part of the periodically continued potential.
pub fn eval_periodic(p: &CellPotential, x: f64) -> Result<f64> {
    let r = x.rem_euclid(PI);
    if r == 0.0 || !x.is_finite() {
        return Err(Error::LatticePoint { x });
    }
    eval_cell(p, r)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Zone {
    pub index: usize,
    pub lower: f64,
    pub upper: f64,
    /// Width below the root tolerance: the zone has collapsed to a point.
    pub degenerate: bool,
}

impl Zone {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, e: f64) -> bool {
        e >= self.lower && e <= self.upper
    }
}

/// A forbidden interval between zones `below` and `below + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gap {
    pub below: usize,
    pub lower: f64,
    pub upper: f64,
    pub width: f64,
    pub merged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandStructure {
    pub zones: Vec<Zone>,
    pub window: [f64; 2],
    pub gaps: Vec<Gap>,
    /// The lowest zone was cut off by the window instead of ending at an edge.
    pub clipped_below: bool,
    pub clipped_above: bool,
}

impl BandStructure {
    pub fn gap_widths(&self) -> Vec<f64> {
        self.gaps.iter().map(|g| g.width).collect()
    }

    pub fn zone(&self, index: usize) -> Option<&Zone> {
        self.zones.iter().find(|z| z.index == index)
    }

    /// The gap between zones `below` and `below + 1`.
    pub fn gap_above(&self, below: usize) -> Option<&Gap> {
        self.gaps.iter().find(|g| g.below == below)
    }

    /// Whether the zone touches its upper neighbor.
    pub fn merged_above(&self, index: usize) -> bool {
        self.gap_above(index).is_some_and(|g| g.merged)
    }

    /// All zone edges except window clips.
    pub fn edges(&self) -> Vec<f64> {
        let mut out = Vec::new();
        let last = self.zones.len().saturating_sub(1);
        for (i, z) in self.zones.iter().enumerate() {
            if !(i == 0 && self.clipped_below) {
                out.push(z.lower);
            }
            if !(i == last && self.clipped_above) {
                out.push(z.upper);
            }
        }
        out
    }
}

/// A control-lever request.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TransformSpec {
    LevelShift { n: u32, t: f64 },
    WeightChange { anchor: WeightAnchorSpec, ratio: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightAnchorSpec {
    Level(u32),
    Energy(f64),
}

impl TransformSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            TransformSpec::LevelShift { n, t } => match transforms::validate_shift(n, t) {
                Ok(()) => Ok(()),
                Err(v) => Err(Error::InvalidShift(v)),
            },
            TransformSpec::WeightChange { anchor, ratio } => {
                if !(ratio > 0.0 && ratio.is_finite()) {
                    return Err(Error::NonPositiveRatio(ratio));
                }
                if anchor == WeightAnchorSpec::Level(0) {
                    return Err(Error::InvalidLevel);
                }
                Ok(())
            }
        }
    }

    /// Applies the transform on top of the bare comb of strength `comb_strength`.
    pub fn build(&self, comb_strength: f64, grid_size: usize) -> Result<CellPotential> {
        self.validate()?;
        match *self {
            TransformSpec::LevelShift { n, t } => {
                Ok(transforms::level_shift_on(comb_strength, n, t, grid_size)?.potential)
            }
            TransformSpec::WeightChange { anchor, ratio } => {
                let anchor = match anchor {
                    WeightAnchorSpec::Level(m) => transforms::WeightAnchor::WellLevel(m),
                    WeightAnchorSpec::Energy(e) => transforms::WeightAnchor::GeneralBc(
                        crate::auxiliary::GeneralBcEigenstate::new(comb_strength, e)?,
                    ),
                };
                Ok(transforms::weight_change_on(comb_strength, anchor, ratio, grid_size)?.potential)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn bare_comb_is_zero_inside() {
        let p = CellPotential::comb(4.0);
        assert_eq!(eval_cell(&p, 1.0).unwrap(), 0.0);
        assert_eq!(p.samples().count(), DEFAULT_GRID_SIZE);
    }

    #[test]
    fn eval_cell_rejects_outside() {
        let p = CellPotential::comb(4.0);
        assert!(matches!(eval_cell(&p, 0.0), Err(Error::OutsideCell { .. })));
        assert!(matches!(eval_cell(&p, PI), Err(Error::OutsideCell { .. })));
        assert!(matches!(eval_cell(&p, -0.1), Err(Error::OutsideCell { .. })));
    }

    #[test]
    fn periodic_continuation() {
        let p = TransformSpec::LevelShift { n: 2, t: 1.0 }.build(4.0, 256).unwrap();
        let a = eval_periodic(&p, FRAC_PI_2 + 3.0 * PI).unwrap();
        let b = eval_periodic(&p, FRAC_PI_2).unwrap();
        assert!((a - b).abs() < 1e-12);
        let c = eval_periodic(&p, -PI / 4.0).unwrap();
        let d = eval_periodic(&p, 3.0 * PI / 4.0).unwrap();
        assert!((c - d).abs() < 1e-12);
        assert!(matches!(eval_periodic(&p, 2.0 * PI), Err(Error::LatticePoint { .. })));
        assert!(matches!(eval_periodic(&p, 0.0), Err(Error::LatticePoint { .. })));
    }

    #[test]
    fn dump_carries_meta() {
        let p = TransformSpec::LevelShift { n: 2, t: 1.0 }.build(4.0, 16).unwrap();
        let d = p.dump();
        assert_eq!(d.grid.len(), 16);
        assert_eq!(d.meta, TransformMeta::LevelShift { n: 2, t: 1.0 });
        let json = serde_json::to_string(&d).unwrap();
        assert!(json.contains("\"kind\":\"level_shift\""));
        let back: PotentialDump = serde_json::from_str(&json).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn transform_spec_validation() {
        assert!(TransformSpec::WeightChange { anchor: WeightAnchorSpec::Level(1), ratio: 0.0 }.validate().is_err());
        assert!(TransformSpec::WeightChange { anchor: WeightAnchorSpec::Energy(2.0), ratio: -1.0 }.validate().is_err());
        assert!(TransformSpec::LevelShift { n: 2, t: 5.0 }.validate().is_err());
        assert!(TransformSpec::LevelShift { n: 2, t: 1.0 }.validate().is_ok());
    }
}
