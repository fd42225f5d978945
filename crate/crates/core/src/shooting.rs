//! Direct integration of the cell equation: Dirichlet spectra of the
//! transformed well by shooting, and sampled solutions from given initial
//! data. Used as the independent check on the closed-form transforms.

use std::f64::consts::PI;

use crate::cell::CellPotential;
use crate::error::Result;
use crate::ode::Dopri5;
use crate::roots;

fn solver() -> Dopri5 {
    Dopri5::new(1e-12, 1e-12)
}

/// `(ψ, ψ')` at each of the increasing points `xs ⊂ [0, π]`, starting from
/// `init` at `xs[0]`.
pub fn integrate_solution(p: &CellPotential, energy: f64, xs: &[f64], init: [f64; 2]) -> Result<Vec<[f64; 2]>> {
    let smooth = p.smooth();
    let cuts = smooth.breakpoints();
    let ode = solver();
    let mut out = Vec::with_capacity(xs.len());
    let Some(&x0) = xs.first() else {
        return Ok(out);
    };
    out.push(init);
    let mut y = init;
    let mut x = x0;
    for &target in &xs[1..] {
        let mut stops: Vec<f64> = cuts.iter().copied().filter(|&c| c > x && c < target).collect();
        stops.push(target);
        for stop in stops {
            let (a, b) = (x, stop);
            let rhs = |s: f64, y: &[f64; 2]| [y[1], (smooth.eval_within(s, a, b) - energy) * y[0]];
            y = ode.integrate(rhs, a, b, y)?;
            x = stop;
        }
        out.push(y);
    }
    Ok(out)
}

/// `ψ(π)` for the solution with `ψ(0) = 0, ψ'(0) = 1`.
pub fn dirichlet_mismatch(p: &CellPotential, energy: f64) -> Result<f64> {
    Ok(integrate_solution(p, energy, &[0.0, PI], [0.0, 1.0])?[1][0])
}

/// The lowest `count` Dirichlet eigenvalues of the well `[0, π]` with the
/// smooth part of `p` inside, found by scanning upward from `start`.
pub fn dirichlet_levels(p: &CellPotential, count: usize, start: f64) -> Result<Vec<f64>> {
    let step = 0.02;
    let mut levels = Vec::with_capacity(count);
    let mut e = start;
    let mut f = dirichlet_mismatch(p, e)?;
    while levels.len() < count {
        let e_next = e + step;
        let f_next = dirichlet_mismatch(p, e_next)?;
        if f == 0.0 {
            levels.push(e);
        } else if f * f_next < 0.0 {
            levels.push(roots::bisect(|x| dirichlet_mismatch(p, x), e, e_next, 1e-12)?);
        }
        e = e_next;
        f = f_next;
    }
    Ok(levels)
}
