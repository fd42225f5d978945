//! Level-shift and spectral-weight transforms of the period-cell potential.
//!
//! Level shift: with `θ` the Wronskian of `ψ₀(·, E_n)` and the opposite-parity
//! free solution `ψ̄₀(·, E_n + t)`,
//!
//! ```text
//! V₂ = V₀ − 2t d/dx [ψ₀ ψ̄₀ / θ],      θ' = t ψ₀ ψ̄₀
//! ψ(x, E) = ψ₀(x, E) − t ψ̄₀ θ⁻¹ ∫₀ˣ ψ₀(y, E_n) ψ₀(y, E) dy
//! ψ(x, E_n + t) = ψ₀(x, E_n) / θ
//! ```
//!
//! Spectral weight: with `σ = 1 − (c/c°)²`, `I(x) = ∫₀ˣ ψ°²` and
//! `w = 1 − σ I`,
//!
//! ```text
//! V = V° + 2 d/dx [σ ψ°² / w]
//! ψ_n = ψ°_n + σ ψ°_m / w · ∫₀ˣ ψ°_m ψ°_n
//! ```
//!
//! Both potentials are evaluated in closed form; nothing here differentiates
//! numerically.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::auxiliary::{well_energy, FreeMotion, GeneralBcEigenstate, ShiftPair};
use crate::cell::{CellPotential, SmoothPart, TransformMeta, DEFAULT_GRID_SIZE};
use crate::error::{Error, Result};
use crate::roots;

/// Relative threshold on `min|θ| / max|θ|` below which the shift is singular.
pub const THETA_REL_TOL: f64 = 1e-8;

/// Why a level shift was rejected.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "violation", rename_all = "snake_case")]
pub enum ShiftViolation {
    InvalidLevel,
    DegenerateShift,
    /// `E_n + t` reaches or passes `E_{n−1}`.
    CrossesLower { shifted: f64, neighbor: f64 },
    /// `E_n + t` reaches or passes `E_{n+1}`.
    CrossesUpper { shifted: f64, neighbor: f64 },
    /// `θ` vanishes (or nearly so) somewhere in the cell.
    SingularTheta { min_abs: f64, at: f64, threshold: f64 },
}

impl fmt::Display for ShiftViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ShiftViolation::InvalidLevel => write!(f, "level index must be at least 1"),
            ShiftViolation::DegenerateShift => write!(f, "shift t = 0 is degenerate"),
            ShiftViolation::CrossesLower { shifted, neighbor } => {
                write!(f, "shifted level {shifted} does not stay above the neighbor level {neighbor}")
            }
            ShiftViolation::CrossesUpper { shifted, neighbor } => {
                write!(f, "shifted level {shifted} does not stay below the neighbor level {neighbor}")
            }
            ShiftViolation::SingularTheta { min_abs, at, threshold } => {
                write!(f, "|θ| drops to {min_abs:e} at x = {at} (threshold {threshold:e})")
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct ThetaScan {
    min_abs: f64,
    at: f64,
    max_abs: f64,
    sign_change: bool,
}

fn scan_theta(pair: &ShiftPair, grid: usize) -> Result<ThetaScan> {
    let grid = grid.max(16);
    let xs: Vec<f64> = (0..=grid).map(|i| PI * i as f64 / grid as f64).collect();
    let vals: Vec<f64> = xs.iter().map(|&x| pair.theta(x)).collect();
    let sign_change = vals.windows(2).any(|w| w[0] * w[1] <= 0.0);
    let max_abs = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let (imin, _) = vals
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
        .expect("non-empty grid");
    let lo = xs[imin.saturating_sub(1)];
    let hi = xs[(imin + 1).min(grid)];
    let (at, neg) = roots::golden_max(|x| Ok(-pair.theta(x).abs()), lo, hi, 1e-12)?;
    let (min_abs, at) = if -neg < vals[imin].abs() { (-neg, at) } else { (vals[imin].abs(), xs[imin]) };
    Ok(ThetaScan { min_abs, at, max_abs, sign_change })
}

/// Checks the no-crossing rule and nonsingularity of `θ` for shifting level
/// `n` by `t`.
pub fn validate_shift(n: u32, t: f64) -> std::result::Result<(), ShiftViolation> {
    validate_shift_on_grid(n, t, DEFAULT_GRID_SIZE).map(|_| ())
}

fn validate_shift_on_grid(n: u32, t: f64, grid: usize) -> std::result::Result<f64, ShiftViolation> {
    if n == 0 {
        return Err(ShiftViolation::InvalidLevel);
    }
    if t == 0.0 || !t.is_finite() {
        return Err(ShiftViolation::DegenerateShift);
    }
    let shifted = well_energy(n) + t;
    if n > 1 {
        let neighbor = well_energy(n - 1);
        if shifted <= neighbor {
            return Err(ShiftViolation::CrossesLower { shifted, neighbor });
        }
    }
    let neighbor = well_energy(n + 1);
    if shifted >= neighbor {
        return Err(ShiftViolation::CrossesUpper { shifted, neighbor });
    }
    let pair = ShiftPair::new(n, t).map_err(|_| ShiftViolation::DegenerateShift)?;
    let scan = scan_theta(&pair, grid).map_err(|_| ShiftViolation::DegenerateShift)?;
    let threshold = THETA_REL_TOL * scan.max_abs;
    if scan.sign_change || !(scan.min_abs > threshold) {
        return Err(ShiftViolation::SingularTheta { min_abs: scan.min_abs, at: scan.at, threshold });
    }
    Ok(scan.min_abs)
}

/// `−2t d/dx[ψ₀ψ̄₀/θ]` from the values and derivatives of both factors.
///
/// Homogeneous of degree zero in each of `(u, up)` and `(b, bp)`.
pub fn level_shift_value(u: f64, up: f64, b: f64, bp: f64, t: f64) -> f64 {
    let theta = up * b - u * bp;
    let theta_p = t * u * b;
    let prod = u * b;
    let prod_p = up * b + u * bp;
    -2.0 * t * (prod_p * theta - prod * theta_p) / (theta * theta)
}

/// Smooth part produced by a level shift.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelShiftProfile {
    pair: ShiftPair,
}

impl LevelShiftProfile {
    pub fn pair(&self) -> &ShiftPair {
        &self.pair
    }

    pub fn eval(&self, x: f64) -> f64 {
        let (u, up) = self.pair.base(x);
        let (b, bp) = self.pair.auxiliary(x);
        level_shift_value(u, up, b, bp, self.pair.shift())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevelShiftResult {
    pub potential: CellPotential,
    pub n: u32,
    pub t: f64,
    pub theta_min_abs: f64,
}

impl LevelShiftResult {
    pub fn pair(&self) -> &ShiftPair {
        match self.potential.smooth() {
            SmoothPart::LevelShift(p) => p.pair(),
            _ => unreachable!("level-shift result always carries a level-shift profile"),
        }
    }
}

/// Shifts level `n` of the auxiliary well by `t` on top of the bare comb `base`.
pub fn level_shift(base: &CellPotential, n: u32, t: f64) -> Result<LevelShiftResult> {
    if !base.smooth().is_zero() {
        return Err(Error::Unsupported("transforms apply to a bare δ-comb cell only"));
    }
    level_shift_on(base.delta_strength(), n, t, base.grid_size())
}

pub fn level_shift_on(comb_strength: f64, n: u32, t: f64, grid_size: usize) -> Result<LevelShiftResult> {
    let theta_min_abs = validate_shift_on_grid(n, t, grid_size.max(DEFAULT_GRID_SIZE)).map_err(Error::InvalidShift)?;
    let pair = ShiftPair::new(n, t)?;
    let potential = CellPotential::new(comb_strength, SmoothPart::LevelShift(LevelShiftProfile { pair }), grid_size)?;
    Ok(LevelShiftResult { potential, n, t, theta_min_abs })
}

/// Which free solution is fed through the level-shift map.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FreeBase {
    /// `s(0) = 0, s'(0) = 1`.
    Sine,
    /// `c(0) = 1, c'(0) = 0`.
    Cosine,
}

fn sinc(u: f64) -> f64 {
    if u.abs() < 1e-6 {
        1.0 - u * u / 6.0
    } else {
        u.sin() / u
    }
}

/// `∫₀ˣ sin(n y) s(y) dy` with `s` the sine-like free solution at energy `e`.
pub fn well_overlap_sine(n: u32, e: f64, x: f64) -> f64 {
    let nf = n as f64;
    let fm = FreeMotion::new(e);
    if e > 0.0 {
        let k = e.sqrt();
        if (k - nf).abs() < 0.5 {
            // product-to-sum; sinc keeps the k → n limit exact
            return 0.5 / k * (x * sinc((nf - k) * x) - ((nf + k) * x).sin() / (nf + k));
        }
    }
    let (s, sp) = fm.sin_like(x);
    let u = (nf * x).sin();
    let up = nf * (nf * x).cos();
    (u * sp - up * s) / (nf * nf - e)
}

/// Transformed solution at energy `e` built from the chosen free base;
/// returns `(ψ, ψ')`.
pub fn level_shift_solution_with(res: &LevelShiftResult, e: f64, base: FreeBase, x: f64) -> Result<(f64, f64)> {
    let pair = res.pair();
    let n = pair.level();
    let t = pair.shift();
    let fm = FreeMotion::new(e);
    let (phi, phi_p) = match base {
        FreeBase::Sine => fm.sin_like(x),
        FreeBase::Cosine => fm.cos_like(x),
    };
    let (u, up) = pair.base(x);
    let j = match base {
        FreeBase::Sine => well_overlap_sine(n, e, x),
        FreeBase::Cosine => {
            let denom = well_energy(n) - e;
            if denom == 0.0 {
                return Err(Error::Unsupported("cosine base at the unshifted level energy"));
            }
            (u * phi_p - up * phi) / denom
        }
    };
    let (b, bp) = pair.auxiliary(x);
    let theta = pair.theta(x);
    let theta_p = pair.theta_prime(x);
    let ratio = b / theta;
    let ratio_p = (bp * theta - b * theta_p) / (theta * theta);
    let value = phi - t * ratio * j;
    let deriv = phi_p - t * (ratio_p * j + ratio * u * phi);
    Ok((value, deriv))
}

/// Transformed solution at energy `e` with initial data `ψ(0) = 0, ψ'(0) = 1`.
pub fn level_shift_solution(res: &LevelShiftResult, e: f64, x: f64) -> f64 {
    level_shift_solution_with(res, e, FreeBase::Sine, x).expect("sine base is always defined").0
}

/// `ψ₀(x, E_n) / θ(x)`, the eigenfunction at the shifted level.
pub fn shifted_eigenfunction(res: &LevelShiftResult, x: f64) -> f64 {
    let pair = res.pair();
    pair.base(x).0 / pair.theta(x)
}

/// Reference state whose spectral weight is changed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightAnchor {
    /// Level `m` of the empty well, `ψ°_m = √(2/π) sin(m x)`.
    WellLevel(u32),
    /// Comb-cell eigenstate with general boundary conditions.
    GeneralBc(GeneralBcEigenstate),
}

impl WeightAnchor {
    /// `(ψ, ψ', I)` in the anchor's own coordinates, with `ψ'` the limit from
    /// the left when `from_left` is set.
    fn state(&self, x: f64, from_left: bool) -> (f64, f64, f64) {
        match self {
            WeightAnchor::WellLevel(m) => {
                let mf = *m as f64;
                let a = (2.0 / PI).sqrt();
                let i = (2.0 / PI) * (0.5 * x - (2.0 * mf * x).sin() / (4.0 * mf));
                (a * (mf * x).sin(), a * mf * (mf * x).cos(), i)
            }
            WeightAnchor::GeneralBc(st) => {
                let d = if from_left { st.deriv_left(x) } else { st.deriv(x) };
                (st.value(x), d, st.cumulative(x))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightChangeProfile {
    anchor: WeightAnchor,
    ratio: f64,
    sigma: f64,
}

impl WeightChangeProfile {
    pub fn new(anchor: WeightAnchor, ratio: f64) -> Result<Self> {
        if !(ratio > 0.0 && ratio.is_finite()) {
            return Err(Error::NonPositiveRatio(ratio));
        }
        if anchor == WeightAnchor::WellLevel(0) {
            return Err(Error::InvalidLevel);
        }
        Ok(Self { anchor, ratio, sigma: 1.0 - ratio * ratio })
    }

    pub fn anchor(&self) -> &WeightAnchor {
        &self.anchor
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        match self.anchor {
            WeightAnchor::WellLevel(_) => Vec::new(),
            WeightAnchor::GeneralBc(_) => vec![FRAC_PI_2],
        }
    }

    /// Maps a cell coordinate to the anchor's frame.
    ///
    /// The general-BC anchor lives on `[-π/2, π/2]` with the δ at its center;
    /// in the left-edge cell `(0, π/2]` is its right half and `[π/2, π)` its
    /// left half shifted by `π`.
    fn local(&self, x: f64, a: f64, b: f64) -> (f64, bool) {
        match self.anchor {
            WeightAnchor::WellLevel(_) => (x, false),
            WeightAnchor::GeneralBc(_) => {
                let mid = 0.5 * (a + b);
                if mid < FRAC_PI_2 {
                    (x, false)
                } else {
                    (x - PI, true)
                }
            }
        }
    }

    /// The denominator `w = 1 − σ I` at cell coordinate `x`.
    pub fn denominator(&self, x: f64) -> f64 {
        let (lx, left) = self.local(x, x, x);
        1.0 - self.sigma * self.anchor.state(lx, left).2
    }

    pub fn eval_within(&self, x: f64, a: f64, b: f64) -> f64 {
        if self.sigma == 0.0 {
            return 0.0;
        }
        let (lx, left) = self.local(x, a, b);
        let (psi, dpsi, i) = self.anchor.state(lx, left);
        let s = self.sigma;
        let w = 1.0 - s * i;
        2.0 * s * (2.0 * psi * dpsi * w + s * psi.powi(4)) / (w * w)
    }

    pub fn describe(&self) -> TransformMeta {
        match self.anchor {
            WeightAnchor::WellLevel(m) => TransformMeta::WeightChangeLevel { m, ratio: self.ratio },
            WeightAnchor::GeneralBc(st) => {
                TransformMeta::WeightChangeEnergy { energy: st.energy(), bc_angle: st.bc().angle, ratio: self.ratio }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightChangeResult {
    pub potential: CellPotential,
    pub anchor: WeightAnchor,
    pub ratio: f64,
    pub sigma: f64,
    pub denominator_min: f64,
}

impl WeightChangeResult {
    fn profile(&self) -> &WeightChangeProfile {
        match self.potential.smooth() {
            SmoothPart::WeightChange(w) => w,
            _ => unreachable!("weight-change result always carries a weight-change profile"),
        }
    }

    pub fn denominator(&self, x: f64) -> f64 {
        self.profile().denominator(x)
    }
}

/// Changes the spectral weight of `anchor` by the factor `ratio = c/c°` on
/// top of the bare comb `base`.
pub fn weight_change(base: &CellPotential, anchor: WeightAnchor, ratio: f64) -> Result<WeightChangeResult> {
    if !base.smooth().is_zero() {
        return Err(Error::Unsupported("transforms apply to a bare δ-comb cell only"));
    }
    weight_change_on(base.delta_strength(), anchor, ratio, base.grid_size())
}

pub fn weight_change_on(comb_strength: f64, anchor: WeightAnchor, ratio: f64, grid_size: usize) -> Result<WeightChangeResult> {
    if let WeightAnchor::GeneralBc(st) = anchor {
        if st.comb_strength() != comb_strength {
            return Err(Error::CombMismatch { anchor: st.comb_strength(), requested: comb_strength });
        }
    }
    let profile = WeightChangeProfile::new(anchor, ratio)?;
    // I runs monotonically from 0 to 1, so w lies between 1 and ratio²
    let denominator_min = (0..=grid_size)
        .map(|i| profile.denominator(PI * i as f64 / grid_size as f64))
        .fold(f64::INFINITY, f64::min)
        .min(1.0)
        .min(ratio * ratio);
    if denominator_min <= 0.0 {
        return Err(Error::SingularWeight { x: 0.0 });
    }
    let sigma = profile.sigma;
    let potential = CellPotential::new(comb_strength, SmoothPart::WeightChange(profile), grid_size)?;
    Ok(WeightChangeResult { potential, anchor, ratio, sigma, denominator_min })
}

/// `∫₀ˣ ψ°_m ψ°_n` for normalized well eigenfunctions.
fn well_pair_overlap(m: u32, n: u32, x: f64) -> f64 {
    let (mf, nf) = (m as f64, n as f64);
    let raw = if m == n {
        0.5 * x - (2.0 * mf * x).sin() / (4.0 * mf)
    } else {
        0.5 * (((mf - nf) * x).sin() / (mf - nf) - ((mf + nf) * x).sin() / (mf + nf))
    };
    2.0 / PI * raw
}

/// Transformed eigenfunction `ψ_n` for a well-level anchor.
pub fn weight_change_solution(res: &WeightChangeResult, n: u32, x: f64) -> Result<f64> {
    let m = match res.anchor {
        WeightAnchor::WellLevel(m) => m,
        WeightAnchor::GeneralBc(_) => {
            return Err(Error::Unsupported("transformed solutions for the general-BC anchor"));
        }
    };
    if n == 0 {
        return Err(Error::InvalidLevel);
    }
    let a = (2.0 / PI).sqrt();
    let psi_m = a * (m as f64 * x).sin();
    let psi_n = a * (n as f64 * x).sin();
    let w = res.denominator(x);
    Ok(psi_n + res.sigma * psi_m / w * well_pair_overlap(m, n, x))
}
