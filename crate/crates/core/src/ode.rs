//! Adaptive Runge-Kutta integration for scalar initial value problems.
//!
//! Dormand-Prince 5(4) embedded pair with a standard step controller.
//! The solver integrates y' = f(x, y) from `x0` to `x1` and can record
//! dense samples at caller-chosen abscissae by integrating exactly to
//! each of them (robust, and cheap at the problem sizes used here).

use crate::num::{c, Scalar};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug)]
pub struct OdeOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_steps: 1_000_000,
        }
    }
}

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
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 5179.0 / 57600.0;
const E3: f64 = 7571.0 / 16695.0;
const E4: f64 = 393.0 / 640.0;
const E5: f64 = -92097.0 / 339200.0;
const E6: f64 = 187.0 / 2100.0;
const E7: f64 = 1.0 / 40.0;
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

/// Integrates the scalar IVP to `x1`, returning `y(x1)`.
pub fn solve_to<T: Scalar, F: FnMut(T, T) -> T>(
    mut f: F,
    x0: T,
    y0: T,
    x1: T,
    opts: OdeOptions,
) -> Result<T> {
    if !(x0.is_finite() && y0.is_finite() && x1.is_finite()) {
        return Err(Error::InvalidParameter("ODE data must be finite".into()));
    }
    if x1 == x0 {
        return Ok(y0);
    }
    let dir = if x1 > x0 { T::one() } else { -T::one() };
    let span = (x1 - x0).abs();
    let mut x = x0;
    let mut y = y0;
    let mut h = span * c::<T>(1e-3) * dir;
    let mut k1 = f(x, y);
    let mut steps = 0usize;
    while (x1 - x) * dir > T::zero() {
        steps += 1;
        if steps > opts.max_steps {
            return Err(Error::Numeric(format!(
                "ODE solver exceeded {} steps near x = {x}",
                opts.max_steps
            )));
        }
        if (x + h - x1) * dir > T::zero() {
            h = x1 - x;
        }
        if h.abs() < span * c::<T>(1e-15) {
            // Final sliver: a single Euler step is below tolerance.
            y = y + h * k1;
            break;
        }
        let k2 = f(x + h * c(C2), y + h * (k1 * c(A21)));
        let k3 = f(x + h * c(C3), y + h * (k1 * c(A31) + k2 * c(A32)));
        let k4 = f(x + h * c(C4), y + h * (k1 * c(A41) + k2 * c(A42) + k3 * c(A43)));
        let k5 = f(
            x + h * c(C5),
            y + h * (k1 * c(A51) + k2 * c(A52) + k3 * c(A53) + k4 * c(A54)),
        );
        let k6 = f(
            x + h,
            y + h * (k1 * c(A61) + k2 * c(A62) + k3 * c(A63) + k4 * c(A64) + k5 * c(A65)),
        );
        let y5 = y + h * (k1 * c(B1) + k3 * c(B3) + k4 * c(B4) + k5 * c(B5) + k6 * c(B6));
        let k7 = f(x + h, y5);
        let y4 = y + h * (k1 * c(E1) + k3 * c(E3) + k4 * c(E4) + k5 * c(E5) + k6 * c(E6) + k7 * c(E7));
        if !y5.is_finite() {
            return Err(Error::Numeric(format!(
                "ODE solution became non-finite near x = {x}"
            )));
        }
        let scale = c::<T>(opts.abs_tol) + c::<T>(opts.rel_tol) * y.abs().max(y5.abs());
        let err = (y5 - y4).abs() / scale;
        if err <= T::one() {
            x = x + h;
            y = y5;
            k1 = k7; // first-same-as-last
        } else {
            k1 = f(x, y);
        }
        let order = c::<T>(0.2);
        let factor = if err > T::zero() {
            (c::<T>(0.9) * err.powf(-order)).max(c(0.2)).min(c(5.0))
        } else {
            c(5.0)
        };
        h = h * factor;
    }
    Ok(y)
}

/// Integrates once across `xs[0] .. xs[last]`, reporting y at every `xs[i]`.
///
/// `xs` must be strictly monotone; the first entry is the initial abscissa.
pub fn solve_samples<T: Scalar, F: FnMut(T, T) -> T>(
    mut f: F,
    y0: T,
    xs: &[T],
    opts: OdeOptions,
) -> Result<Vec<T>> {
    if xs.len() < 2 {
        return Err(Error::InsufficientData(
            "sampled ODE solve needs at least two abscissae".into(),
        ));
    }
    let increasing = xs[1] > xs[0];
    for w in xs.windows(2) {
        let ok = if increasing { w[1] > w[0] } else { w[1] < w[0] };
        if !ok {
            return Err(Error::InvalidParameter(
                "sample abscissae must be strictly monotone".into(),
            ));
        }
    }
    let mut out = Vec::with_capacity(xs.len());
    let mut y = y0;
    out.push(y);
    for i in 1..xs.len() {
        y = solve_to(&mut f, xs[i - 1], y, xs[i], opts)?;
        out.push(y);
    }
    Ok(out)
}
