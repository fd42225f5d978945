//! Adaptive Dormand–Prince 5(4) integrator for small fixed-size systems.
//!
//! Only what the transfer-matrix and shooting code needs: integrate from `a`
//! to `b` landing exactly on `b`, optionally through a list of output points.

use crate::error::{Error, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// 5th-order weights minus embedded 4th-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dopri5 {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for Dopri5 {
    fn default() -> Self {
        Self { rtol: 1e-10, atol: 1e-10, max_steps: 200_000 }
    }
}

#[inline]
fn axpy<const N: usize>(y: &[f64; N], terms: &[(f64, &[f64; N])], h: f64) -> [f64; N] {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..N {
            out[i] += h * c * k[i];
        }
    }
    out
}

impl Dopri5 {
    pub fn new(rtol: f64, atol: f64) -> Self {
        Self { rtol, atol, ..Self::default() }
    }

    /// Integrates `y' = f(x, y)` from `a` to `b` and returns `y(b)`.
    pub fn integrate<const N: usize, F>(&self, f: F, a: f64, b: f64, y0: [f64; N]) -> Result<[f64; N]>
    where
        F: Fn(f64, &[f64; N]) -> [f64; N],
    {
        let mut h = self.initial_step(a, b);
        self.segment(&f, a, b, y0, &mut h)
    }

    /// Integrates through the increasing output points `xs` (the first one is
    /// the initial point) and returns the state at each of them.
    pub fn integrate_through<const N: usize, F>(&self, f: F, xs: &[f64], y0: [f64; N]) -> Result<Vec<[f64; N]>>
    where
        F: Fn(f64, &[f64; N]) -> [f64; N],
    {
        let mut out = Vec::with_capacity(xs.len());
        let Some(&first) = xs.first() else {
            return Ok(out);
        };
        out.push(y0);
        let mut y = y0;
        let mut h = self.initial_step(first, *xs.last().unwrap());
        for w in xs.windows(2) {
            y = self.segment(&f, w[0], w[1], y, &mut h)?;
            out.push(y);
        }
        Ok(out)
    }

    fn initial_step(&self, a: f64, b: f64) -> f64 {
        (b - a).abs().min(0.02)
    }

    fn segment<const N: usize, F>(&self, f: &F, a: f64, b: f64, y0: [f64; N], h: &mut f64) -> Result<[f64; N]>
    where
        F: Fn(f64, &[f64; N]) -> [f64; N],
    {
        let span = b - a;
        if span == 0.0 {
            return Ok(y0);
        }
        let dir = span.signum();
        let mut x = a;
        let mut y = y0;
        let mut k1 = f(x, &y);
        let mut step = h.abs().min(span.abs()).max(f64::EPSILON * span.abs());
        let mut accepted_last = true;

        for _ in 0..self.max_steps {
            let remaining = (b - x) * dir;
            if remaining <= 0.0 {
                *h = step;
                return Ok(y);
            }
            let last = step >= remaining;
            let hs = if last { remaining } else { step } * dir;

            let k2 = f(x + C2 * hs, &axpy(&y, &[(A21, &k1)], hs));
            let k3 = f(x + C3 * hs, &axpy(&y, &[(A31, &k1), (A32, &k2)], hs));
            let k4 = f(x + C4 * hs, &axpy(&y, &[(A41, &k1), (A42, &k2), (A43, &k3)], hs));
            let k5 = f(
                x + C5 * hs,
                &axpy(&y, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)], hs),
            );
            let k6 = f(
                x + hs,
                &axpy(&y, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)], hs),
            );
            let y_new = axpy(&y, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)], hs);
            let x_new = if last { b } else { x + hs };
            let k7 = f(x_new, &y_new);

            let mut err = 0.0;
            for i in 0..N {
                let e = hs * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
                let scale = self.atol + self.rtol * y[i].abs().max(y_new[i].abs());
                err += (e / scale).powi(2);
            }
            let err = (err / N as f64).sqrt();
            if !err.is_finite() {
                return Err(Error::Integration(format!("non-finite error estimate at x = {x}")));
            }

            if err <= 1.0 {
                x = x_new;
                y = y_new;
                k1 = k7;
                let grow = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                let factor = if accepted_last { grow } else { grow.min(1.0) };
                if !last {
                    step *= factor;
                }
                accepted_last = true;
            } else {
                step *= (0.9 * err.powf(-0.2)).clamp(0.2, 1.0);
                accepted_last = false;
                if step < 1e-14 * span.abs() {
                    return Err(Error::Integration(format!("step size underflow at x = {x}")));
                }
            }
        }
        Err(Error::Integration(format!("step limit {} reached in [{a}, {b}]", self.max_steps)))
    }
}
