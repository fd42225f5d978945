//! Closed-form solutions of the auxiliary problems on one period cell.
//!
//! Two auxiliary problems are supported:
//!
//! - the empty infinite well on `[0, π]` with levels `E_n = n²` and
//!   eigenfunctions `sin(n x)`, which drives the level-shift transform;
//! - the single-δ comb cell re-centered on `[-π/2, π/2]` (δ at the center)
//!   with a homogeneous boundary condition chosen so that a prescribed energy
//!   is an eigenvalue, which drives the spectral-weight transform inside a
//!   forbidden zone.
//!
//! All eigenfunctions here are unnormalized unless stated otherwise.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::cell::CellPotential;
use crate::error::{Error, Result};

/// Parity of a well eigenfunction about the cell midpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of_level(n: u32) -> Self {
        if n % 2 == 1 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

/// A level of the empty infinite well on `[0, π]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AuxLevel {
    pub n: u32,
    pub energy: f64,
    pub parity_about_midpoint: Parity,
}

impl AuxLevel {
    pub fn new(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidLevel);
        }
        Ok(Self { n, energy: well_energy(n), parity_about_midpoint: Parity::of_level(n) })
    }
}

pub fn well_energy(n: u32) -> f64 {
    let n = n as f64;
    n * n
}

/// `sin(n x)`, the `n`-th well eigenfunction.
pub fn well_eigenfunction(n: u32, x: f64) -> f64 {
    (n as f64 * x).sin()
}

pub fn well_eigenfunction_deriv(n: u32, x: f64) -> f64 {
    let n = n as f64;
    n * (n * x).cos()
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Branch {
    Trig,
    Hyperbolic,
    Linear,
}

/// The pair `(ψ₀(x, E_n), ψ̄₀(x, E_n + t))` used by the level-shift transform,
/// together with their Wronskian `θ = ψ₀' ψ̄₀ − ψ₀ ψ̄₀'`.
///
/// `ψ̄₀` solves the free equation at the shifted energy with the parity
/// opposite to `ψ₀`, anchored at the midpoint: `cos(κ(x − π/2))` when `n` is
/// even and `sin(κ(x − π/2))` when `n` is odd. Negative shifted energies use
/// `cosh`/`sinh`, and a shifted energy of exactly zero the linear limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftPair {
    n: u32,
    t: f64,
    kappa: f64,
    branch: Branch,
}

impl ShiftPair {
    pub fn new(n: u32, t: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidLevel);
        }
        if t == 0.0 || !t.is_finite() {
            return Err(Error::DegenerateShift);
        }
        let shifted = well_energy(n) + t;
        let (kappa, branch) = if shifted > 0.0 {
            (shifted.sqrt(), Branch::Trig)
        } else if shifted < 0.0 {
            ((-shifted).sqrt(), Branch::Hyperbolic)
        } else {
            (0.0, Branch::Linear)
        };
        Ok(Self { n, t, kappa, branch })
    }

    pub fn level(&self) -> u32 {
        self.n
    }

    pub fn shift(&self) -> f64 {
        self.t
    }

    pub fn shifted_energy(&self) -> f64 {
        well_energy(self.n) + self.t
    }

    /// `(ψ₀, ψ₀')` at `x`.
    pub fn base(&self, x: f64) -> (f64, f64) {
        (well_eigenfunction(self.n, x), well_eigenfunction_deriv(self.n, x))
    }

    /// `(ψ̄₀, ψ̄₀')` at `x`.
    pub fn auxiliary(&self, x: f64) -> (f64, f64) {
        let u = x - FRAC_PI_2;
        let k = self.kappa;
        let even = self.n % 2 == 0;
        match (self.branch, even) {
            (Branch::Trig, true) => ((k * u).cos(), -k * (k * u).sin()),
            (Branch::Trig, false) => ((k * u).sin(), k * (k * u).cos()),
            (Branch::Hyperbolic, true) => ((k * u).cosh(), k * (k * u).sinh()),
            (Branch::Hyperbolic, false) => ((k * u).sinh(), k * (k * u).cosh()),
            (Branch::Linear, true) => (1.0, 0.0),
            (Branch::Linear, false) => (u, 1.0),
        }
    }

    pub fn theta(&self, x: f64) -> f64 {
        let (u, up) = self.base(x);
        let (b, bp) = self.auxiliary(x);
        up * b - u * bp
    }

    /// `θ'(x) = t ψ₀ ψ̄₀`, from `ψ'' = (V − E) ψ` for both factors.
    pub fn theta_prime(&self, x: f64) -> f64 {
        self.t * well_eigenfunction(self.n, x) * self.auxiliary(x).0
    }
}

/// `ψ̄₀(x, E_n + t)`.
pub fn nonphysical_solution(n: u32, t: f64, x: f64) -> Result<f64> {
    Ok(ShiftPair::new(n, t)?.auxiliary(x).0)
}

pub fn nonphysical_solution_deriv(n: u32, t: f64, x: f64) -> Result<f64> {
    Ok(ShiftPair::new(n, t)?.auxiliary(x).1)
}

/// `θ(x) = ψ₀'(x, E_n) ψ̄₀(x, E_n + t) − ψ₀(x, E_n) ψ̄₀'(x, E_n + t)`.
pub fn wronskian_theta(n: u32, t: f64, x: f64) -> Result<f64> {
    Ok(ShiftPair::new(n, t)?.theta(x))
}

/// `sin(u)/u` for `E > 0`, `sinh(u)/u` for `E < 0`, written in terms of
/// `q = E z²` so that both branches and the `E → 0` limit share one path.
fn sinc_e(q: f64) -> f64 {
    if q.abs() < 1e-8 {
        return 1.0 - q / 6.0;
    }
    if q > 0.0 {
        let u = q.sqrt();
        u.sin() / u
    } else {
        let u = (-q).sqrt();
        u.sinh() / u
    }
}

/// `(1 − sinc_e(q)) / q`.
fn one_minus_sinc_over_q(q: f64) -> f64 {
    if q.abs() < 1e-2 {
        // alternating series in q, truncated well below f64 resolution
        let mut term = 1.0 / 6.0;
        let mut sum = term;
        for j in 2..8 {
            let j = j as f64;
            term *= -q / ((2.0 * j) * (2.0 * j + 1.0));
            sum += term;
        }
        sum
    } else {
        (1.0 - sinc_e(q)) / q
    }
}

/// Free motion `ψ'' = −E ψ` at a fixed energy, with the canonical pair
/// `c(0) = 1, c'(0) = 0` and `s(0) = 0, s'(0) = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreeMotion {
    energy: f64,
    k: f64,
}

impl FreeMotion {
    pub fn new(energy: f64) -> Self {
        Self { energy, k: energy.abs().sqrt() }
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn cos_like(&self, x: f64) -> (f64, f64) {
        let k = self.k;
        if self.energy > 0.0 {
            ((k * x).cos(), -k * (k * x).sin())
        } else if self.energy < 0.0 {
            ((k * x).cosh(), k * (k * x).sinh())
        } else {
            (1.0, 0.0)
        }
    }

    pub fn sin_like(&self, x: f64) -> (f64, f64) {
        let k = self.k;
        if self.energy > 0.0 {
            ((k * x).sin() / k, (k * x).cos())
        } else if self.energy < 0.0 {
            ((k * x).sinh() / k, (k * x).cosh())
        } else {
            (x, 1.0)
        }
    }

    /// `∫₀ˣ c²`.
    pub fn int_cc(&self, x: f64) -> f64 {
        0.5 * x * (1.0 + sinc_e(4.0 * self.energy * x * x))
    }

    /// `∫₀ˣ c s`.
    pub fn int_cs(&self, x: f64) -> f64 {
        let s = x * sinc_e(self.energy * x * x);
        0.5 * s * s
    }

    /// `∫₀ˣ s²`.
    pub fn int_ss(&self, x: f64) -> f64 {
        2.0 * x * x * x * one_minus_sinc_over_q(4.0 * self.energy * x * x)
    }
}

/// Homogeneous boundary condition `ψ cos(angle) + ∂ₙψ sin(angle) = 0`, with
/// `∂ₙ` the outward normal derivative at a cell edge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AuxBC {
    pub angle: f64,
}

impl AuxBC {
    /// The condition satisfied by `(ψ, ∂ₙψ)`, angle reduced to `[0, π)`.
    pub fn from_edge_data(psi: f64, normal_deriv: f64) -> Self {
        let mut angle = (-psi).atan2(normal_deriv);
        if angle < 0.0 {
            angle += PI;
        }
        if angle >= PI {
            angle -= PI;
        }
        Self { angle }
    }

    pub fn residual(&self, psi: f64, normal_deriv: f64) -> f64 {
        psi * self.angle.cos() + normal_deriv * self.angle.sin()
    }
}

/// The δ-symmetric solution of the re-centered comb cell `[-π/2, π/2]` at a
/// prescribed energy, normalized to unit `∫ψ²` over the cell.
///
/// For `x ≥ 0` the profile is `c(x) + (V°/2) s(x)` and it is mirrored for
/// `x < 0`, which produces the derivative jump `V° ψ(0)` at the δ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneralBcEigenstate {
    comb_strength: f64,
    free: FreeMotion,
    norm: f64,
    half_integral: f64,
    bc: AuxBC,
}

impl GeneralBcEigenstate {
    pub fn new(comb_strength: f64, energy: f64) -> Result<Self> {
        if !comb_strength.is_finite() || !energy.is_finite() {
            return Err(Error::Integration("non-finite comb strength or energy".into()));
        }
        let free = FreeMotion::new(energy);
        let a = 0.5 * comb_strength;
        let half_integral = free.int_cc(FRAC_PI_2) + 2.0 * a * free.int_cs(FRAC_PI_2) + a * a * free.int_ss(FRAC_PI_2);
        let norm = (2.0 * half_integral).sqrt().recip();
        let (c, cp) = free.cos_like(FRAC_PI_2);
        let (s, sp) = free.sin_like(FRAC_PI_2);
        let bc = AuxBC::from_edge_data(c + a * s, cp + a * sp);
        if !norm.is_finite() {
            return Err(Error::Integration("eigenstate normalization overflowed".into()));
        }
        Ok(Self { comb_strength, free, norm, half_integral, bc })
    }

    pub fn comb_strength(&self) -> f64 {
        self.comb_strength
    }

    pub fn energy(&self) -> f64 {
        self.free.energy()
    }

    pub fn bc(&self) -> AuxBC {
        self.bc
    }

    fn profile(&self, s: f64) -> (f64, f64) {
        let a = 0.5 * self.comb_strength;
        let (c, cp) = self.free.cos_like(s);
        let (sn, snp) = self.free.sin_like(s);
        (c + a * sn, cp + a * snp)
    }

    fn profile_integral(&self, s: f64) -> f64 {
        let a = 0.5 * self.comb_strength;
        self.free.int_cc(s) + 2.0 * a * self.free.int_cs(s) + a * a * self.free.int_ss(s)
    }

    /// `ψ(x)` on the re-centered cell.
    pub fn value(&self, x: f64) -> f64 {
        self.norm * self.profile(x.abs()).0
    }

    /// `ψ'(x)`; at the δ itself the right-hand limit is returned.
    pub fn deriv(&self, x: f64) -> f64 {
        let d = self.norm * self.profile(x.abs()).1;
        if x < 0.0 {
            -d
        } else {
            d
        }
    }

    /// `ψ'(x)` as the limit from the left of `x`.
    pub fn deriv_left(&self, x: f64) -> f64 {
        if x <= 0.0 {
            -self.norm * self.profile(x.abs()).1
        } else {
            self.deriv(x)
        }
    }

    /// `I(x) = ∫_{-π/2}^{x} ψ²`, with `I(π/2) = 1`.
    pub fn cumulative(&self, x: f64) -> f64 {
        let total = 2.0 * self.half_integral;
        if x < 0.0 {
            (self.half_integral - self.profile_integral(-x)) / total
        } else {
            (self.half_integral + self.profile_integral(x)) / total
        }
    }

    /// Boundary-condition residuals at the left and right edges.
    pub fn edge_residuals(&self) -> (f64, f64) {
        let left = self.bc.residual(self.value(-FRAC_PI_2), -self.deriv(-FRAC_PI_2));
        let right = self.bc.residual(self.value(FRAC_PI_2), self.deriv(FRAC_PI_2));
        (left, right)
    }
}

/// Builds the comb-cell eigenstate at `energy` for the base comb `p`.
pub fn general_bc_eigenstate(p: &CellPotential, energy: f64) -> Result<GeneralBcEigenstate> {
    if !p.smooth().is_zero() {
        return Err(Error::Unsupported("general-BC eigenstates need a bare δ-comb cell"));
    }
    GeneralBcEigenstate::new(p.delta_strength(), energy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn well_eigenfunction_values() {
        assert!((well_eigenfunction(2, FRAC_PI_4) - 1.0).abs() < 1e-15);
        assert!(well_eigenfunction(2, 0.0).abs() < 1e-15);
        assert!(well_eigenfunction(2, PI).abs() < 1e-15);
        assert!((well_eigenfunction(1, FRAC_PI_2) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn well_node_counts() {
        for n in 1..=6u32 {
            let samples: Vec<f64> = (1..20_000).map(|i| well_eigenfunction(n, PI * i as f64 / 20_000.0)).collect();
            let nodes = samples.windows(2).filter(|w| w[0] * w[1] < 0.0).count();
            assert_eq!(nodes as u32, n - 1, "level {n}");
        }
    }

    #[test]
    fn level_records_parity() {
        let l = AuxLevel::new(2).unwrap();
        assert_eq!(l.energy, 4.0);
        assert_eq!(l.parity_about_midpoint, Parity::Odd);
        assert_eq!(AuxLevel::new(3).unwrap().parity_about_midpoint, Parity::Even);
        assert!(AuxLevel::new(0).is_err());
    }

    #[test]
    fn nonphysical_midpoint_values() {
        assert!((nonphysical_solution(2, 1.0, FRAC_PI_2).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(nonphysical_solution(1, -2.0, FRAC_PI_2).unwrap(), 0.0);
        for u in [0.1, 0.7, 1.3] {
            let l = nonphysical_solution(2, 1.0, FRAC_PI_2 - u).unwrap();
            let r = nonphysical_solution(2, 1.0, FRAC_PI_2 + u).unwrap();
            assert!((l - r).abs() < 1e-14);
        }
        assert!(matches!(nonphysical_solution(2, 0.0, 1.0), Err(Error::DegenerateShift)));
    }

    #[test]
    fn auxiliary_solves_free_equation() {
        for (n, t) in [(2, 1.0), (1, -2.0), (3, 2.5), (1, -1.0)] {
            let pair = ShiftPair::new(n, t).unwrap();
            let e = pair.shifted_energy();
            let h = 1e-4;
            for x in [0.3, 1.1, 2.4] {
                let f = |x| pair.auxiliary(x).0;
                let second = (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
                assert!((second + e * f(x)).abs() < 1e-5, "n={n} t={t} x={x}");
                let first = (f(x + h) - f(x - h)) / (2.0 * h);
                assert!((first - pair.auxiliary(x).1).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn theta_at_left_wall() {
        let th = wronskian_theta(2, 1.0, 0.0).unwrap();
        let expected = 2.0 * (5f64.sqrt() * FRAC_PI_2).cos();
        assert!((th - expected).abs() < 1e-14);
        let th_pi = wronskian_theta(2, 1.0, PI).unwrap();
        assert!((th - th_pi).abs() < 1e-12);
    }

    #[test]
    fn theta_derivative_matches_closed_form() {
        // θ' = t ψ₀ ψ̄₀ checked by central differences at pseudo-random points
        let pair = ShiftPair::new(2, 1.0).unwrap();
        let h = 1e-5;
        let mut x = 0.123_f64;
        for _ in 0..100 {
            x = (x * 7.31 + 0.417).fract() * PI;
            let fd = (pair.theta(x + h) - pair.theta(x - h)) / (2.0 * h);
            assert!((fd - pair.theta_prime(x)).abs() < 1e-8, "x = {x}");
        }
    }

    #[test]
    fn free_motion_integrals_match_quadrature() {
        for e in [4.0, 2.0, 1e-9, 0.0, -1e-9, -3.0, 30.0] {
            let fm = FreeMotion::new(e);
            let x = 1.3;
            let n = 20_000;
            let h = x / n as f64;
            let (mut cc, mut cs, mut ss) = (0.0, 0.0, 0.0);
            for i in 0..n {
                let y = (i as f64 + 0.5) * h;
                let c = fm.cos_like(y).0;
                let s = fm.sin_like(y).0;
                cc += c * c * h;
                cs += c * s * h;
                ss += s * s * h;
            }
            assert!((fm.int_cc(x) - cc).abs() < 1e-7, "cc e={e}");
            assert!((fm.int_cs(x) - cs).abs() < 1e-7, "cs e={e}");
            assert!((fm.int_ss(x) - ss).abs() < 1e-7, "ss e={e}");
        }
    }

    #[test]
    fn general_bc_free_motion_is_neumann() {
        let st = GeneralBcEigenstate::new(0.0, 4.0).unwrap();
        assert!((st.bc().angle - FRAC_PI_2).abs() < 1e-12);
        let ratio = st.value(0.4) / st.value(0.0);
        assert!((ratio - (0.8f64).cos()).abs() < 1e-12);
        let (l, r) = st.edge_residuals();
        assert!(l.abs() < 1e-12 && r.abs() < 1e-12);
    }

    #[test]
    fn general_bc_comb_cell_at_gap_energy() {
        let st = GeneralBcEigenstate::new(4.0, 2.0).unwrap();
        let (l, r) = st.edge_residuals();
        assert!(l.abs() < 1e-10 && r.abs() < 1e-10);
        let jump = st.deriv(0.0) - st.deriv_left(0.0);
        assert!((jump - 4.0 * st.value(0.0)).abs() < 1e-12);
        assert!((st.cumulative(FRAC_PI_2) - 1.0).abs() < 1e-12);
        assert!(st.cumulative(-FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn general_bc_normalization_by_quadrature() {
        for (v, e) in [(4.0, 2.0), (-4.0, -1.5), (4.0, 0.0), (0.0, 4.0)] {
            let st = GeneralBcEigenstate::new(v, e).unwrap();
            let n = 40_000;
            let h = PI / n as f64;
            let total: f64 = (0..n)
                .map(|i| {
                    let x = -FRAC_PI_2 + (i as f64 + 0.5) * h;
                    st.value(x).powi(2) * h
                })
                .sum();
            assert!((total - 1.0).abs() < 1e-8, "v={v} e={e}");
            let partial: f64 = (0..n / 4)
                .map(|i| {
                    let x = -FRAC_PI_2 + (i as f64 + 0.5) * h;
                    st.value(x).powi(2) * h
                })
                .sum();
            assert!((st.cumulative(-FRAC_PI_2 + PI / 4.0) - partial).abs() < 1e-8);
        }
    }

    #[test]
    fn general_bc_solves_cell_equation() {
        let st = GeneralBcEigenstate::new(4.0, 2.0).unwrap();
        let h = 1e-4;
        for x in [-1.2, -0.5, 0.3, 1.4] {
            let second = (st.value(x + h) - 2.0 * st.value(x) + st.value(x - h)) / (h * h);
            assert!((second + 2.0 * st.value(x)).abs() < 1e-5);
        }
    }
}
