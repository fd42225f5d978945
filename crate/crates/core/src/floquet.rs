//! Transfer matrices, the Hill discriminant and the band structure of the
//! periodically continued cell potential.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::cell::{BandStructure, CellPotential, Gap, Zone};
use crate::error::{Error, Result};
use crate::ode::Dopri5;
use crate::roots;

pub const DEFAULT_SCAN_STEP: f64 = 0.005;
pub const DEFAULT_ROOT_TOL: f64 = 1e-10;
pub const DEFAULT_GAP_TOL: f64 = 1e-3;

/// One-period transfer of `(ψ, ψ')` at a fixed energy, in the `D·T`
/// convention: free/smooth propagation across the cell followed by the δ kick.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonodromyMatrix {
    pub m11: f64,
    pub m12: f64,
    pub m21: f64,
    pub m22: f64,
    pub energy: f64,
}

impl MonodromyMatrix {
    pub fn det(&self) -> f64 {
        self.m11 * self.m22 - self.m12 * self.m21
    }

    pub fn half_trace(&self) -> f64 {
        0.5 * (self.m11 + self.m22)
    }

    pub fn apply(&self, v: [f64; 2]) -> [f64; 2] {
        [self.m11 * v[0] + self.m12 * v[1], self.m21 * v[0] + self.m22 * v[1]]
    }
}

/// Integration settings shared by every transfer-matrix evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Propagator {
    pub ode: Dopri5,
}

impl Default for Propagator {
    fn default() -> Self {
        Self { ode: Dopri5::new(1e-11, 1e-11) }
    }
}

impl Propagator {
    pub fn new(rtol: f64, atol: f64) -> Self {
        Self { ode: Dopri5::new(rtol, atol) }
    }

    /// `T` with `(ψ(π⁻), ψ'(π⁻)) = T (ψ(0⁺), ψ'(0⁺))`, as `[[t11, t12], [t21, t22]]`.
    pub fn propagate_cell(&self, p: &CellPotential, energy: f64) -> Result<[[f64; 2]; 2]> {
        let smooth = p.smooth();
        let mut cuts = vec![0.0];
        cuts.extend(smooth.breakpoints());
        cuts.push(PI);
        let mut y = [1.0, 0.0, 0.0, 1.0];
        for w in cuts.windows(2) {
            let (a, b) = (w[0], w[1]);
            let rhs = |x: f64, y: &[f64; 4]| {
                let q = smooth.eval_within(x, a, b) - energy;
                [y[1], q * y[0], y[3], q * y[2]]
            };
            y = self.ode.integrate(rhs, a, b, y)?;
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::Integration(format!("non-finite transfer matrix at E = {energy}")));
        }
        Ok([[y[0], y[2]], [y[1], y[3]]])
    }

    pub fn monodromy(&self, p: &CellPotential, energy: f64) -> Result<MonodromyMatrix> {
        let t = self.propagate_cell(p, energy)?;
        let v = p.delta_strength();
        // D(V°) = [[1, 0], [V°, 1]]
        Ok(MonodromyMatrix {
            m11: t[0][0],
            m12: t[0][1],
            m21: v * t[0][0] + t[1][0],
            m22: v * t[0][1] + t[1][1],
            energy,
        })
    }

    pub fn discriminant(&self, p: &CellPotential, energy: f64) -> Result<f64> {
        Ok(self.monodromy(p, energy)?.half_trace())
    }
}

pub fn propagate_cell(p: &CellPotential, energy: f64) -> Result<[[f64; 2]; 2]> {
    Propagator::default().propagate_cell(p, energy)
}

pub fn monodromy(p: &CellPotential, energy: f64) -> Result<MonodromyMatrix> {
    Propagator::default().monodromy(p, energy)
}

/// Hill discriminant `Δ(E) = (m11 + m22) / 2`.
pub fn discriminant(p: &CellPotential, energy: f64) -> Result<f64> {
    Propagator::default().discriminant(p, energy)
}

/// `cos(kπ) + V°/(2k) sin(kπ)` for the bare comb, continued to `E ≤ 0`.
pub fn kronig_penney_discriminant(comb_strength: f64, energy: f64) -> f64 {
    if energy > 0.0 {
        let k = energy.sqrt();
        (k * PI).cos() + comb_strength / (2.0 * k) * (k * PI).sin()
    } else if energy < 0.0 {
        let k = (-energy).sqrt();
        (k * PI).cosh() + comb_strength / (2.0 * k) * (k * PI).sinh()
    } else {
        1.0 + 0.5 * comb_strength * PI
    }
}

/// Im K per unit length from the discriminant: `arccosh|Δ| / π` in gaps.
pub fn im_k_from_discriminant(delta: f64) -> f64 {
    if delta.abs() <= 1.0 {
        0.0
    } else {
        delta.abs().acosh() / PI
    }
}

pub fn imag_quasimomentum(p: &CellPotential, energy: f64) -> Result<f64> {
    Ok(im_k_from_discriminant(discriminant(p, energy)?))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandOptions {
    pub scan_step: f64,
    pub root_tol: f64,
    pub gap_tol: f64,
    pub propagator: Propagator,
}

impl Default for BandOptions {
    fn default() -> Self {
        Self {
            scan_step: DEFAULT_SCAN_STEP,
            root_tol: DEFAULT_ROOT_TOL,
            gap_tol: DEFAULT_GAP_TOL,
            propagator: Propagator::default(),
        }
    }
}

/// Number of allowed zones below a forbidden energy `energy` (`|Δ| > 1`).
///
/// A real Floquet solution in the gap above zone `j` has exactly `j` zeros per
/// period; they are counted through the Prüfer angle `ψ = r sin φ,
/// ψ' = r cos φ`, which increases through every multiple of π.
pub fn zones_below(p: &CellPotential, energy: f64, prop: &Propagator) -> Result<usize> {
    let m = prop.monodromy(p, energy)?;
    let delta = m.half_trace();
    if delta.abs() <= 1.0 {
        return Err(Error::Integration(format!("E = {energy} is not forbidden (Δ = {delta})")));
    }
    let rho = delta + delta.signum() * (delta * delta - 1.0).sqrt();
    let a = [m.m12, rho - m.m11];
    let b = [rho - m.m22, m.m21];
    let v = if a[0].hypot(a[1]) >= b[0].hypot(b[1]) { a } else { b };
    let smooth = p.smooth();
    let mut cuts = vec![0.0];
    cuts.extend(smooth.breakpoints());
    cuts.push(PI);
    let start = v[0].atan2(v[1]);
    let mut phi = [start];
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let rhs = |x: f64, y: &[f64; 1]| {
            let (s, c) = y[0].sin_cos();
            [c * c + (energy - smooth.eval_within(x, a, b)) * s * s]
        };
        phi = prop.ode.integrate(rhs, a, b, phi)?;
    }
    // multiples of π in (start, end]
    let zeros = (phi[0] / PI).floor() - (start / PI).floor();
    Ok(zeros.max(0.0) as usize)
}

/// Global index of the first allowed zone at or above `e_min`, minus one.
fn zone_offset(p: &CellPotential, e_min: f64, opts: &BandOptions) -> Result<usize> {
    let prop = &opts.propagator;
    if prop.discriminant(p, e_min)?.abs() > 1.0 {
        return zones_below(p, e_min, prop);
    }
    let mut drop = 0.5;
    let probe = loop {
        let e = e_min - drop;
        if prop.discriminant(p, e)?.abs() > 1.0 {
            break e;
        }
        drop *= 2.0;
        if drop > 1e6 {
            return Err(Error::Integration("no forbidden energy below the window".into()));
        }
    };
    let below = zones_below(p, probe, prop)?;
    let between = scan_zones(p, [probe, e_min], opts)?;
    // the zone straddling e_min belongs to the window
    let complete = between.zones.len() - usize::from(between.clipped_above);
    Ok(below + complete)
}

pub fn band_edges(p: &CellPotential, window: [f64; 2]) -> Result<BandStructure> {
    band_edges_with(p, window, &BandOptions::default())
}

/// Allowed zones of `p` inside `window`.
///
/// `Δ` is scanned on a uniform grid; sign changes of `|Δ| − 1` are refined by
/// bisection. Inside an allowed zone `Δ` is monotone, so a discrete extremum
/// with `|Δ| ≤ 1` marks a gap too narrow for the grid or a closed gap; it is
/// refined by golden-section search and either yields a thin gap or a touching
/// point of width zero.
pub fn band_edges_with(p: &CellPotential, window: [f64; 2], opts: &BandOptions) -> Result<BandStructure> {
    let mut bs = scan_zones(p, window, opts)?;
    let offset = zone_offset(p, window[0], opts)?;
    for z in &mut bs.zones {
        z.index += offset;
    }
    for g in &mut bs.gaps {
        g.below += offset;
    }
    Ok(bs)
}

/// Band scan with zones numbered from 1 inside the window.
fn scan_zones(p: &CellPotential, window: [f64; 2], opts: &BandOptions) -> Result<BandStructure> {
    let [e_min, e_max] = window;
    if !(e_min < e_max) || !e_min.is_finite() || !e_max.is_finite() {
        return Err(Error::InvalidWindow(e_min, e_max));
    }
    let prop = &opts.propagator;
    let disc = |e: f64| prop.discriminant(p, e);
    let excess = |e: f64| disc(e).map(|d| d.abs() - 1.0);

    let steps = ((e_max - e_min) / opts.scan_step).ceil().max(1.0) as usize;
    let grid: Vec<f64> = (0..=steps)
        .map(|i| if i == steps { e_max } else { e_min + i as f64 * opts.scan_step })
        .collect();
    let values = grid.iter().map(|&e| disc(e)).collect::<Result<Vec<f64>>>()?;
    let allowed: Vec<bool> = values.iter().map(|d| d.abs() <= 1.0).collect();

    // forbidden intervals in increasing order; clipped ones touch the window
    let mut forbidden: Vec<(f64, f64)> = Vec::new();
    let mut open: Option<f64> = if allowed[0] { None } else { Some(e_min) };

    for i in 0..steps {
        if i > 0 && allowed[i - 1] && allowed[i] && allowed[i + 1] {
            let (l, c, r) = (values[i - 1], values[i], values[i + 1]);
            let is_max = c >= l && c >= r && c > 0.0;
            let is_min = c <= l && c <= r && c < 0.0;
            if is_max || is_min {
                let sign = c.signum();
                let (e_ext, peak) = roots::golden_max(|e| disc(e).map(|d| sign * d), grid[i - 1], grid[i + 1], opts.root_tol)?;
                if peak > 1.0 {
                    let lo = roots::bisect(excess, grid[i - 1], e_ext, opts.root_tol)?;
                    let hi = roots::bisect(excess, e_ext, grid[i + 1], opts.root_tol)?;
                    forbidden.push((lo, hi));
                } else {
                    forbidden.push((e_ext, e_ext));
                }
            }
        }
        if allowed[i] != allowed[i + 1] {
            let root = roots::bisect(excess, grid[i], grid[i + 1], opts.root_tol)?;
            if allowed[i] {
                open = Some(root);
            } else {
                forbidden.push((open.take().unwrap_or(e_min), root));
            }
        }
    }
    if let Some(start) = open {
        forbidden.push((start, e_max));
    }

    // a window end sitting exactly on an edge is not an allowed sliver
    let sliver = 1e3 * opts.root_tol;
    let mut clipped_below = allowed[0];
    if clipped_below && forbidden.first().is_some_and(|f| f.0 - e_min < sliver) {
        forbidden[0].0 = e_min;
        clipped_below = false;
    }
    let mut clipped_above = allowed[steps];
    if clipped_above && forbidden.last().is_some_and(|f| e_max - f.1 < sliver) {
        forbidden.last_mut().unwrap().1 = e_max;
        clipped_above = false;
    }
    let mut zones: Vec<Zone> = Vec::new();
    let mut gaps = Vec::new();
    let mut cursor = e_min;
    let mut in_zone = clipped_below;
    let mut previous: Option<(f64, f64)> = None;
    let mut close_zone = |zones: &mut Vec<Zone>, lower: f64, upper: f64, previous: Option<(f64, f64)>| {
        let index = zones.len() + 1;
        if let (Some((glo, ghi)), false) = (previous, zones.is_empty()) {
            let width = ghi - glo;
            gaps.push(Gap { below: index - 1, lower: glo, upper: ghi, width, merged: width < opts.gap_tol });
        }
        zones.push(Zone { index, lower, upper, degenerate: upper - lower < opts.root_tol });
    };
    for &(lo, hi) in &forbidden {
        if in_zone {
            close_zone(&mut zones, cursor, lo, previous);
        }
        previous = Some((lo, hi));
        cursor = hi;
        in_zone = hi < e_max;
    }
    if in_zone {
        close_zone(&mut zones, cursor, e_max, previous);
    }

    Ok(BandStructure { zones, window, gaps, clipped_below, clipped_above })
}

/// Sampled `Im K(E)` over a window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForbiddennessCurve {
    pub energies: Vec<f64>,
    pub delta: Vec<f64>,
    pub im_k: Vec<f64>,
}

impl ForbiddennessCurve {
    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }
}

/// `points` equally spaced samples of `Im K` on `[window[0], window[1]]`.
pub fn forbiddenness_curve(p: &CellPotential, window: [f64; 2], points: usize) -> Result<ForbiddennessCurve> {
    forbiddenness_curve_with(p, window, points, &Propagator::default())
}

pub fn forbiddenness_curve_with(
    p: &CellPotential,
    window: [f64; 2],
    points: usize,
    prop: &Propagator,
) -> Result<ForbiddennessCurve> {
    let [lo, hi] = window;
    if !(lo < hi) || points < 2 {
        return Err(Error::InvalidWindow(lo, hi));
    }
    let energies: Vec<f64> = (0..points)
        .map(|i| if i == points - 1 { hi } else { lo + (hi - lo) * i as f64 / (points - 1) as f64 })
        .collect();
    let delta = energies.iter().map(|&e| prop.discriminant(p, e)).collect::<Result<Vec<f64>>>()?;
    let im_k = delta.iter().map(|&d| im_k_from_discriminant(d)).collect();
    Ok(ForbiddennessCurve { energies, delta, im_k })
}
