//! Explicit sub- and super-solution barriers for the Yamabe equation
//! on asymptotically locally hyperbolic ends.
//!
//! The sub-solution rises from 0 through a fast `1 - theta e^{-beta r}`
//! ramp to a slow `1 - (1-delta) C e^{-alpha r}` tail; the
//! super-solution is `1 + A e^{-alpha r}` past a switch radius and
//! constant inside. Both are verified against the worst-case radial
//! differential inequality in which every metric error term is absorbed
//! into a single budget `C1 e^{-alpha r}` (plus `C1 e^{-2 alpha r}` on
//! the second-derivative coefficient), with one-sided transmission
//! conditions at the break points.

use crate::error::{Error, Result};
use crate::num::{c, cu, Dimension, Scalar};
use crate::profile::RadialProfile;

/// Which one-sided inequality a profile is tested against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BarrierSense {
    Sub,
    Super,
}

/// Worst-case coefficient data: dimension, the drift ratio `q` (the
/// warped model has drift `(n-1) q(r)`; `q = 1` on the exponential
/// model), the error budget `c1` and the decay exponent feeding the
/// error terms. `c1 = 0` describes an exact model metric.
#[derive(Debug, Clone)]
pub struct BarrierModel<T> {
    dim: Dimension,
    drift_ratio: RadialProfile<T>,
    c1: T,
    alpha: T,
}

impl<T: Scalar> BarrierModel<T> {
    pub fn new(n: usize, drift_ratio: RadialProfile<T>, c1: T, alpha: T) -> Result<Self> {
        let dim = Dimension::new(n)?;
        if !(alpha > T::zero()) || !(alpha < cu(n)) {
            return Err(Error::InvalidParameter(format!(
                "decay exponent must satisfy 0 < alpha < n = {n}, got {alpha}"
            )));
        }
        if c1 < T::zero() || !c1.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "error budget must be a finite non-negative constant, got {c1}"
            )));
        }
        Ok(BarrierModel {
            dim,
            drift_ratio,
            c1,
            alpha,
        })
    }

    /// The exponential model with no error budget: `q = 1`, `c1 = 0`.
    pub fn exact_model(n: usize, alpha: T) -> Result<Self> {
        Self::new(n, RadialProfile::constant(T::one()), T::zero(), alpha)
    }

    pub fn dim(&self) -> Dimension {
        self.dim
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub fn c1(&self) -> T {
        self.c1
    }
}

/// `alpha^2 - (n-1) alpha - n`, the tail bracket's leading coefficient;
/// it factors as `(alpha - n)(alpha + 1)` and is negative exactly on
/// `0 < alpha < n`, which is what makes the exponential tails work.
pub fn leading_tail_coefficient<T: Scalar>(n: usize, alpha: T) -> T {
    alpha * alpha - cu::<T>(n - 1) * alpha - cu::<T>(n)
}

/// Piecewise-smooth radial barrier candidate.
///
/// `offset` is `u - 1` in closed form so the near-1 cancellations in
/// the nonlinearity can be evaluated without loss; `pieces` are the
/// open verification regions whose shared endpoints are the breaks.
pub trait Barrier<T: Scalar> {
    fn sense(&self) -> BarrierSense;
    fn pieces(&self) -> Vec<(T, T)>;
    fn offset(&self, r: T) -> T;
    fn d1(&self, r: T) -> T;
    fn d2(&self, r: T) -> T;
    /// `(location, left slope, right slope)` at each break.
    fn breaks(&self) -> Vec<(T, T, T)>;

    fn value(&self, r: T) -> T {
        T::one() + self.offset(r)
    }
}

/// Sub-solution data: ramp exponent `beta`, tail exponent `alpha`, the
/// ladder parameters `theta` (large) and `delta` (close to 1), and the
/// derived break radii and tail constants.
#[derive(Debug, Clone, Copy)]
pub struct SubSolutionSpec<T> {
    dim: Dimension,
    pub alpha: T,
    pub beta: T,
    pub theta: T,
    pub delta: T,
    /// `(1/beta) log theta`: where the ramp leaves 0.
    pub r_theta: T,
    /// `(1/beta) log(theta/(1-delta))`: where the tail takes over.
    pub r_delta: T,
    /// The displayed tail constant `(theta/(1-delta))^{alpha/beta}`.
    pub big_c: T,
    /// Actual tail amplitude `(1-delta) big_c`. The displayed constant
    /// alone would leave a jump of size `delta` at the switch; scaling
    /// it by `1-delta` makes the profile continuous while keeping the
    /// claimed `1 - u <= big_c e^{-alpha r}` bound and the transmission
    /// inequality intact.
    pub amplitude: T,
}

impl<T: Scalar> SubSolutionSpec<T> {
    pub fn new(n: usize, alpha: T, beta: T, theta: T, delta: T) -> Result<Self> {
        let dim = Dimension::new(n)?;
        let n_f = cu::<T>(n);
        if !(alpha > T::zero()) || !(alpha < n_f) {
            return Err(Error::InvalidParameter(format!(
                "tail exponent must satisfy 0 < alpha < n = {n}, got {alpha}"
            )));
        }
        if !(beta > T::zero()) || !(beta < (n_f - T::one()).min(alpha)) {
            return Err(Error::InvalidParameter(format!(
                "ramp exponent must satisfy 0 < beta < min(n - 1, alpha) = \
                 min({}, {alpha}), got {beta}",
                n_f - T::one()
            )));
        }
        if !(theta >= T::one()) || !theta.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "theta must be at least 1, got {theta}"
            )));
        }
        if !(delta > T::zero()) || !(delta < T::one()) {
            return Err(Error::InvalidParameter(format!(
                "delta must lie in (0, 1), got {delta}"
            )));
        }
        let r_theta = theta.ln() / beta;
        let r_delta = (theta / (T::one() - delta)).ln() / beta;
        let big_c = (theta / (T::one() - delta)).powf(alpha / beta);
        Ok(SubSolutionSpec {
            dim,
            alpha,
            beta,
            theta,
            delta,
            r_theta,
            r_delta,
            big_c,
            amplitude: (T::one() - delta) * big_c,
        })
    }

    pub fn dim(&self) -> Dimension {
        self.dim
    }
}

const TAIL_WINDOW: f64 = 40.0;

impl<T: Scalar> Barrier<T> for SubSolutionSpec<T> {
    fn sense(&self) -> BarrierSense {
        BarrierSense::Sub
    }

    fn pieces(&self) -> Vec<(T, T)> {
        vec![
            (self.r_theta, self.r_delta),
            (self.r_delta, self.r_delta + c::<T>(TAIL_WINDOW) / self.alpha),
        ]
    }

    fn offset(&self, r: T) -> T {
        if r <= self.r_theta {
            -T::one()
        } else if r <= self.r_delta {
            -self.theta * (-self.beta * r).exp()
        } else {
            -self.amplitude * (-self.alpha * r).exp()
        }
    }

    fn d1(&self, r: T) -> T {
        if r <= self.r_theta {
            T::zero()
        } else if r <= self.r_delta {
            self.theta * self.beta * (-self.beta * r).exp()
        } else {
            self.amplitude * self.alpha * (-self.alpha * r).exp()
        }
    }

    fn d2(&self, r: T) -> T {
        if r <= self.r_theta {
            T::zero()
        } else if r <= self.r_delta {
            -self.theta * self.beta * self.beta * (-self.beta * r).exp()
        } else {
            -self.amplitude * self.alpha * self.alpha * (-self.alpha * r).exp()
        }
    }

    fn breaks(&self) -> Vec<(T, T, T)> {
        let ramp_at = |r: T| self.theta * self.beta * (-self.beta * r).exp();
        vec![
            (self.r_theta, T::zero(), ramp_at(self.r_theta)),
            (
                self.r_delta,
                ramp_at(self.r_delta),
                self.amplitude * self.alpha * (-self.alpha * self.r_delta).exp(),
            ),
        ]
    }
}

/// Super-solution data: `1 + a e^{-alpha r}` past the switch radius,
/// constant inside.
#[derive(Debug, Clone, Copy)]
pub struct SuperSolutionSpec<T> {
    dim: Dimension,
    pub alpha: T,
    pub a: T,
    pub r_switch: T,
}

impl<T: Scalar> SuperSolutionSpec<T> {
    pub fn new(n: usize, alpha: T, a: T, r_switch: T) -> Result<Self> {
        let dim = Dimension::new(n)?;
        if !(alpha > T::zero()) || !(alpha < cu(n)) {
            return Err(Error::InvalidParameter(format!(
                "decay exponent must satisfy 0 < alpha < n = {n}, got {alpha}"
            )));
        }
        if !(a > T::zero()) || !(r_switch > T::zero()) {
            return Err(Error::InvalidParameter(format!(
                "amplitude and switch radius must be positive, got {a} and {r_switch}"
            )));
        }
        Ok(SuperSolutionSpec {
            dim,
            alpha,
            a,
            r_switch,
        })
    }

    pub fn dim(&self) -> Dimension {
        self.dim
    }
}

impl<T: Scalar> Barrier<T> for SuperSolutionSpec<T> {
    fn sense(&self) -> BarrierSense {
        BarrierSense::Super
    }

    fn pieces(&self) -> Vec<(T, T)> {
        vec![
            (T::zero(), self.r_switch),
            (
                self.r_switch,
                self.r_switch + c::<T>(TAIL_WINDOW) / self.alpha,
            ),
        ]
    }

    fn offset(&self, r: T) -> T {
        self.a * (-self.alpha * r.max(self.r_switch)).exp()
    }

    fn d1(&self, r: T) -> T {
        if r <= self.r_switch {
            T::zero()
        } else {
            -self.a * self.alpha * (-self.alpha * r).exp()
        }
    }

    fn d2(&self, r: T) -> T {
        if r <= self.r_switch {
            T::zero()
        } else {
            self.a * self.alpha * self.alpha * (-self.alpha * r).exp()
        }
    }

    fn breaks(&self) -> Vec<(T, T, T)> {
        vec![(
            self.r_switch,
            T::zero(),
            -self.a * self.alpha * (-self.alpha * self.r_switch).exp(),
        )]
    }
}

/// Signed worst margin of the one-sided inequality and where it occurs.
#[derive(Debug, Clone, Copy)]
pub struct MarginReport<T> {
    /// `>= 0` everywhere means the barrier property is verified.
    pub worst: T,
    pub at: T,
    /// Worst margin restricted to each verification piece, in order.
    pub per_piece_worst: [T; 2],
}

pub const DEFAULT_BARRIER_NODES: usize = 4096;

/// Evaluates the worst-case differential inequality at interior nodes
/// of each piece (break points excluded).
///
/// For a sub-solution the margin is
/// `-(L u + n(n-1) u^{(n+2)/(n-2)})` with
/// `L u = -c_n u'' - c_n ((n-1) q - C1 e^{-ar}) u' - (n(n-1) - C1 e^{-ar}) u
///  + C1 e^{-2ar} |u''|`;
/// for a super-solution the margin keeps the same worst-case drift but
/// pushes the curvature and second-derivative budgets the other way and
/// flips the overall sense. The `n(n-1)(u^p - u)` cancellation is
/// evaluated through `u - 1` with `ln_1p`/`exp_m1`.
pub fn verify_differential_inequality<T: Scalar, B: Barrier<T>>(
    barrier: &B,
    model: &BarrierModel<T>,
    nodes_per_piece: usize,
) -> Result<MarginReport<T>> {
    if nodes_per_piece < 16 {
        return Err(Error::InvalidParameter(format!(
            "need at least 16 nodes per piece, got {nodes_per_piece}"
        )));
    }
    let pieces = barrier.pieces();
    if pieces.len() != 2 {
        return Err(Error::InvalidParameter(format!(
            "expected two verification pieces, got {}",
            pieces.len()
        )));
    }
    let n = model.dim.n();
    let c_n = model.dim.c_n::<T>();
    let n_n1 = model.dim.n_n1::<T>();
    let ratio = cu::<T>(4) / cu::<T>(n - 2);
    let sense = barrier.sense();

    let mut worst = T::infinity();
    let mut at = T::zero();
    let mut per_piece = [T::infinity(); 2];
    for (k, &(lo, hi)) in pieces.iter().enumerate() {
        if !(hi > lo) {
            return Err(Error::InvalidParameter(format!(
                "verification piece [{lo}, {hi}] is empty"
            )));
        }
        for j in 1..=nodes_per_piece {
            let r = lo + (hi - lo) * cu(j) / cu(nodes_per_piece + 1);
            let y = barrier.offset(r);
            let u = T::one() + y;
            let du = barrier.d1(r);
            let ddu = barrier.d2(r);
            let q = model.drift_ratio.eval(r)?;
            let budget = model.c1 * (-model.alpha * r).exp();
            let budget2 = model.c1 * (-(model.alpha + model.alpha) * r).exp();
            let drift = cu::<T>(n - 1) * q - budget;
            // n(n-1)(u^p - u) = n(n-1) u (u^{4/(n-2)} - 1), kept exact
            // near u = 1 through the offset.
            let nonlinear = n_n1 * u * (ratio * y.ln_1p()).exp_m1();
            let margin = match sense {
                BarrierSense::Sub => {
                    c_n * ddu + c_n * drift * du + budget * u - budget2 * ddu.abs() - nonlinear
                }
                BarrierSense::Super => {
                    -c_n * ddu - c_n * drift * du - budget * u - budget2 * ddu.abs() + nonlinear
                }
            };
            if margin < worst {
                worst = margin;
                at = r;
            }
            if margin < per_piece[k] {
                per_piece[k] = margin;
            }
        }
    }
    Ok(MarginReport {
        worst,
        at,
        per_piece_worst: per_piece,
    })
}

/// One-sided derivative comparison at a break point.
#[derive(Debug, Clone, Copy)]
pub struct BreakReport<T> {
    pub location: T,
    pub left: T,
    pub right: T,
    pub pass: bool,
}

/// Checks the transmission conditions at every break: a sub-solution
/// needs `left slope <= right slope` (upward kink), a super-solution
/// the reverse.
pub fn verify_transmission<T: Scalar, B: Barrier<T>>(barrier: &B) -> Vec<BreakReport<T>> {
    barrier
        .breaks()
        .into_iter()
        .map(|(location, left, right)| BreakReport {
            location,
            left,
            right,
            pass: match barrier.sense() {
                BarrierSense::Sub => left <= right,
                BarrierSense::Super => left >= right,
            },
        })
        .collect()
}

const LADDER_STEPS: u32 = 40;

/// Deterministic ladder search for a verified sub-solution: `theta`
/// doubles from 2, `delta` walks `1 - 2^{-j}` toward 1. Returns the
/// first pair whose differential inequality holds with non-negative
/// margin on both pieces and whose transmission conditions pass.
pub fn build_subsolution<T: Scalar>(
    model: &BarrierModel<T>,
    beta: T,
) -> Result<SubSolutionSpec<T>> {
    let n = model.dim.n();
    let mut best: Option<(T, T, T, T)> = None;
    for i in 1..=LADDER_STEPS {
        let theta = c::<T>(2.0).powi(i as i32);
        for j in 1..=LADDER_STEPS {
            let delta = T::one() - c::<T>(2.0).powi(-(j as i32));
            let cand = SubSolutionSpec::new(n, model.alpha, beta, theta, delta)?;
            let report = verify_differential_inequality(&cand, model, DEFAULT_BARRIER_NODES)?;
            let transmission_ok = verify_transmission(&cand).iter().all(|b| b.pass);
            if report.worst >= T::zero() && transmission_ok {
                return Ok(cand);
            }
            if best.map_or(true, |(w, ..)| report.worst > w) {
                best = Some((report.worst, report.at, theta, delta));
            }
        }
    }
    let (w, at, theta, delta) = best.unwrap();
    Err(Error::ConstructionFailed(format!(
        "sub-solution ladder exhausted (theta <= 2^{LADDER_STEPS}); least violation \
         {w} at r = {at} for theta = {theta}, delta = {delta}"
    )))
}

/// Ladder search for a verified super-solution: switch radius walks
/// 1, 2, ... and the amplitude doubles from 1.
pub fn build_supersolution<T: Scalar>(model: &BarrierModel<T>) -> Result<SuperSolutionSpec<T>> {
    let n = model.dim.n();
    if !(leading_tail_coefficient(n, model.alpha) < T::zero()) {
        return Err(Error::InvalidParameter(format!(
            "tail bracket coefficient must be negative; alpha = {} is too close to n = {n}",
            model.alpha
        )));
    }
    let mut best: Option<(T, T, T, T)> = None;
    for r_int in 1..=LADDER_STEPS {
        let r_switch = cu::<T>(r_int as usize);
        for i in 0..=LADDER_STEPS {
            let a = c::<T>(2.0).powi(i as i32);
            let cand = SuperSolutionSpec::new(n, model.alpha, a, r_switch)?;
            let report = verify_differential_inequality(&cand, model, DEFAULT_BARRIER_NODES)?;
            let transmission_ok = verify_transmission(&cand).iter().all(|b| b.pass);
            if report.worst >= T::zero() && transmission_ok {
                return Ok(cand);
            }
            if best.map_or(true, |(w, ..)| report.worst > w) {
                best = Some((report.worst, report.at, a, r_switch));
            }
        }
    }
    let (w, at, a, r_switch) = best.unwrap();
    Err(Error::ConstructionFailed(format!(
        "super-solution ladder exhausted (amplitude <= 2^{LADDER_STEPS}); least violation \
         {w} at r = {at} for A = {a}, R = {r_switch}"
    )))
}
