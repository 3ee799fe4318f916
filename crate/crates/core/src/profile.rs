//! Radial profiles: scalar functions of the radial coordinate with two
//! derivatives, backed either by a closed-form expression or by sampled
//! grid data interpolated with cubic splines.

use crate::expr::{Expr, Func};
use crate::interp::CubicSpline;
use crate::num::Scalar;
use crate::{Error, Result};

/// Half-open/unbounded interval of admissible radii.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval<T> {
    pub lo: Option<T>,
    pub hi: Option<T>,
}

impl<T: Scalar> Interval<T> {
    pub fn all() -> Self {
        Interval { lo: None, hi: None }
    }

    pub fn from_zero() -> Self {
        Interval {
            lo: Some(T::zero()),
            hi: None,
        }
    }

    pub fn bounded(lo: T, hi: T) -> Result<Self> {
        if !(hi > lo) {
            return Err(Error::InvalidParameter(format!(
                "interval must have positive length, got [{lo}, {hi}]"
            )));
        }
        Ok(Interval {
            lo: Some(lo),
            hi: Some(hi),
        })
    }

    pub fn contains(&self, r: T) -> bool {
        if let Some(lo) = self.lo {
            if r < lo {
                return false;
            }
        }
        if let Some(hi) = self.hi {
            if r > hi {
                return false;
            }
        }
        true
    }

    /// Largest interval contained in both; may be empty (lo > hi).
    pub fn intersect(&self, other: &Interval<T>) -> Interval<T> {
        let lo = match (self.lo, other.lo) {
            (Some(a), Some(b)) => Some(if a > b { a } else { b }),
            (a, None) => a,
            (None, b) => b,
        };
        let hi = match (self.hi, other.hi) {
            (Some(a), Some(b)) => Some(if a < b { a } else { b }),
            (a, None) => a,
            (None, b) => b,
        };
        Interval { lo, hi }
    }
}

#[derive(Clone, Debug)]
enum Backing<T> {
    Closed {
        f: Expr<T>,
        d1: Expr<T>,
        d2: Expr<T>,
    },
    Grid {
        value: CubicSpline<T>,
        d1: Option<CubicSpline<T>>,
        d2: Option<CubicSpline<T>>,
    },
}

/// A radial function with two derivatives on a declared domain.
#[derive(Clone, Debug)]
pub struct RadialProfile<T> {
    domain: Interval<T>,
    backing: Backing<T>,
}

impl<T: Scalar> RadialProfile<T> {
    pub fn closed_form(expr: Expr<T>, domain: Interval<T>) -> Self {
        let d1 = expr.diff();
        let d2 = d1.diff();
        RadialProfile {
            domain,
            backing: Backing::Closed { f: expr, d1, d2 },
        }
    }

    /// Parses the expression grammar (`r`, arithmetic, exp/log/trig/hyperbolics).
    pub fn parse(src: &str, domain: Interval<T>) -> Result<Self> {
        Ok(Self::closed_form(Expr::parse(src)?, domain))
    }

    pub fn constant(v: T) -> Self {
        Self::closed_form(Expr::num(v), Interval::all())
    }

    /// `scale * exp(alpha (r + shift))` on the whole line.
    pub fn exp_warp(alpha: T, shift: T, scale: T) -> Self {
        Self::closed_form(Expr::exp_warp(alpha, shift, scale), Interval::all())
    }

    pub fn sinh_shifted(shift: T) -> Self {
        Self::closed_form(Expr::shifted(Func::Sinh, shift), Interval::from_zero())
    }

    pub fn cosh_shifted(shift: T) -> Self {
        Self::closed_form(Expr::shifted(Func::Cosh, shift), Interval::from_zero())
    }

    /// Cubic-spline interpolation of sampled values.
    pub fn from_grid(rs: &[T], values: &[T]) -> Result<Self> {
        let value = CubicSpline::new(rs, values)?;
        Ok(RadialProfile {
            domain: Interval {
                lo: Some(rs[0]),
                hi: Some(*rs.last().unwrap()),
            },
            backing: Backing::Grid {
                value,
                d1: None,
                d2: None,
            },
        })
    }

    /// Grid backing with explicitly supplied derivative samples; use when
    /// derivatives are known analytically and spline differentiation would
    /// waste accuracy.
    pub fn from_grid_with_derivatives(
        rs: &[T],
        values: &[T],
        d1: &[T],
        d2: &[T],
    ) -> Result<Self> {
        let value = CubicSpline::new(rs, values)?;
        let s1 = CubicSpline::new(rs, d1)?;
        let s2 = CubicSpline::new(rs, d2)?;
        Ok(RadialProfile {
            domain: Interval {
                lo: Some(rs[0]),
                hi: Some(*rs.last().unwrap()),
            },
            backing: Backing::Grid {
                value,
                d1: Some(s1),
                d2: Some(s2),
            },
        })
    }

    pub fn domain(&self) -> Interval<T> {
        self.domain
    }

    pub fn restricted(mut self, domain: Interval<T>) -> Self {
        self.domain = domain;
        self
    }

    fn guard(&self, r: T) -> Result<()> {
        if !self.domain.contains(r) {
            let lo = self
                .domain
                .lo
                .map(|v| format!("{v}"))
                .unwrap_or_else(|| "-inf".into());
            let hi = self
                .domain
                .hi
                .map(|v| format!("{v}"))
                .unwrap_or_else(|| "inf".into());
            return Err(Error::Domain(format!(
                "radius {r} outside profile domain [{lo}, {hi}]"
            )));
        }
        Ok(())
    }

    pub fn eval(&self, r: T) -> Result<T> {
        self.guard(r)?;
        match &self.backing {
            Backing::Closed { f, .. } => Ok(f.eval(r)),
            Backing::Grid { value, .. } => value.eval(r),
        }
    }

    pub fn d1(&self, r: T) -> Result<T> {
        self.guard(r)?;
        match &self.backing {
            Backing::Closed { d1, .. } => Ok(d1.eval(r)),
            Backing::Grid { value, d1, .. } => match d1 {
                Some(s) => s.eval(r),
                None => value.d1(r),
            },
        }
    }

    pub fn d2(&self, r: T) -> Result<T> {
        self.guard(r)?;
        match &self.backing {
            Backing::Closed { d2, .. } => Ok(d2.eval(r)),
            Backing::Grid { value, d2, .. } => match d2 {
                Some(s) => s.eval(r),
                None => value.d2(r),
            },
        }
    }

    /// True when backed by an expression rather than sampled data.
    pub fn is_closed_form(&self) -> bool {
        matches!(self.backing, Backing::Closed { .. })
    }

    /// Uniform sample grid over `[a, b]` with `count >= 2` nodes.
    pub fn sample_uniform(&self, a: T, b: T, count: usize) -> Result<(Vec<T>, Vec<T>)> {
        if count < 2 {
            return Err(Error::InvalidParameter(
                "sampling needs at least two nodes".into(),
            ));
        }
        if !(b > a) {
            return Err(Error::InvalidParameter(format!(
                "sampling interval is empty: [{a}, {b}]"
            )));
        }
        let step = (b - a) / crate::num::cu::<T>(count - 1);
        let mut rs = Vec::with_capacity(count);
        let mut vs = Vec::with_capacity(count);
        for i in 0..count {
            let r = if i + 1 == count {
                b
            } else {
                a + step * crate::num::cu::<T>(i)
            };
            rs.push(r);
            vs.push(self.eval(r)?);
        }
        Ok((rs, vs))
    }
}
