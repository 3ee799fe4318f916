//! Cubic spline interpolation for grid-backed radial profiles.
//!
//! Not-a-knot end conditions give fourth-order interpolation of smooth
//! data; the second derivative of the interpolant carries O(h^2) error,
//! which is why every tolerance quoted against grid-backed `d2` assumes
//! a grid spacing of 1e-3 or finer.

use crate::num::{c, cu, solve_tridiagonal, Scalar};
use crate::{Error, Result};

#[derive(Clone, Debug)]
pub struct CubicSpline<T> {
    xs: Vec<T>,
    ys: Vec<T>,
    // Per-interval coefficients of y_i + b t + c t^2 + d t^3, t = x - x_i.
    b: Vec<T>,
    cc: Vec<T>,
    d: Vec<T>,
}

impl<T: Scalar> CubicSpline<T> {
    /// Builds a spline through `(xs, ys)`; `xs` must be strictly increasing.
    pub fn new(xs: &[T], ys: &[T]) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::InvalidParameter(format!(
                "spline needs matching sample lengths, got {} and {}",
                xs.len(),
                ys.len()
            )));
        }
        if xs.len() < 2 {
            return Err(Error::InsufficientData(
                "spline needs at least two samples".into(),
            ));
        }
        for w in xs.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::InvalidParameter(
                    "spline abscissae must be strictly increasing".into(),
                ));
            }
        }
        for &y in ys {
            if !y.is_finite() {
                return Err(Error::InvalidParameter(
                    "spline ordinates must be finite".into(),
                ));
            }
        }
        let n = xs.len();
        let m = match n {
            2 => vec![T::zero(); 2],
            3 => quadratic_moments(xs, ys),
            _ => not_a_knot_moments(xs, ys)?,
        };
        let mut b = Vec::with_capacity(n - 1);
        let mut cc = Vec::with_capacity(n - 1);
        let mut d = Vec::with_capacity(n - 1);
        let six = cu::<T>(6);
        let two = cu::<T>(2);
        for i in 0..n - 1 {
            let h = xs[i + 1] - xs[i];
            b.push((ys[i + 1] - ys[i]) / h - h * (two * m[i] + m[i + 1]) / six);
            cc.push(m[i] / two);
            d.push((m[i + 1] - m[i]) / (six * h));
        }
        Ok(CubicSpline {
            xs: xs.to_vec(),
            ys: ys.to_vec(),
            b,
            cc,
            d,
        })
    }

    pub fn lo(&self) -> T {
        self.xs[0]
    }

    pub fn hi(&self) -> T {
        *self.xs.last().unwrap()
    }

    fn locate(&self, x: T) -> Result<usize> {
        let lo = self.lo();
        let hi = self.hi();
        let slack = c::<T>(1e-12) * (hi - lo).max(T::one());
        if x < lo - slack || x > hi + slack {
            return Err(Error::Domain(format!(
                "abscissa {x} outside interpolation range [{lo}, {hi}]"
            )));
        }
        let mut a = 0usize;
        let mut bnd = self.xs.len() - 1;
        while bnd - a > 1 {
            let mid = (a + bnd) / 2;
            if self.xs[mid] <= x {
                a = mid;
            } else {
                bnd = mid;
            }
        }
        Ok(a)
    }

    pub fn eval(&self, x: T) -> Result<T> {
        let i = self.locate(x)?;
        let t = x - self.xs[i];
        Ok(self.ys[i] + t * (self.b[i] + t * (self.cc[i] + t * self.d[i])))
    }

    pub fn d1(&self, x: T) -> Result<T> {
        let i = self.locate(x)?;
        let t = x - self.xs[i];
        let two = cu::<T>(2);
        let three = cu::<T>(3);
        Ok(self.b[i] + t * (two * self.cc[i] + three * t * self.d[i]))
    }

    pub fn d2(&self, x: T) -> Result<T> {
        let i = self.locate(x)?;
        let t = x - self.xs[i];
        let two = cu::<T>(2);
        let six = cu::<T>(6);
        Ok(two * self.cc[i] + six * t * self.d[i])
    }
}

/// Moments of the parabola through three points (exact for quadratics).
fn quadratic_moments<T: Scalar>(xs: &[T], ys: &[T]) -> Vec<T> {
    let h0 = xs[1] - xs[0];
    let h1 = xs[2] - xs[1];
    let s0 = (ys[1] - ys[0]) / h0;
    let s1 = (ys[2] - ys[1]) / h1;
    let m = cu::<T>(2) * (s1 - s0) / (h0 + h1);
    vec![m, m, m]
}

fn not_a_knot_moments<T: Scalar>(xs: &[T], ys: &[T]) -> Result<Vec<T>> {
    let n = xs.len();
    let k = n - 2; // unknowns M_1 .. M_{n-2}
    let six = cu::<T>(6);
    let three = cu::<T>(3);
    let h: Vec<T> = (0..n - 1).map(|i| xs[i + 1] - xs[i]).collect();
    let slope: Vec<T> = (0..n - 1).map(|i| (ys[i + 1] - ys[i]) / h[i]).collect();

    let mut lower = vec![T::zero(); k - 1];
    let mut diag = vec![T::zero(); k];
    let mut upper = vec![T::zero(); k - 1];
    let mut rhs = vec![T::zero(); k];
    for (row, i) in (1..n - 1).enumerate() {
        let mut dl = h[i - 1] / six;
        let mut dg = (h[i - 1] + h[i]) / three;
        let mut du = h[i] / six;
        // Not-a-knot folds M_0 and M_{n-1} into the first and last rows:
        // M_0 = (1 + h0/h1) M_1 - (h0/h1) M_2 (third derivative continuous
        // at x_1), and symmetrically on the right.
        if i == 1 {
            let ratio = h[0] / h[1];
            dg = dg + dl * (T::one() + ratio);
            du = du - dl * ratio;
            dl = T::zero();
        }
        if i == n - 2 {
            let ratio = h[n - 2] / h[n - 3];
            dg = dg + du * (T::one() + ratio);
            dl = dl - du * ratio;
            du = T::zero();
        }
        rhs[row] = slope[i] - slope[i - 1];
        diag[row] = dg;
        if row > 0 {
            lower[row - 1] = dl;
        }
        if row + 1 < k {
            upper[row] = du;
        }
    }
    let inner = solve_tridiagonal(&lower, &diag, &upper, &rhs)?;
    let mut m = Vec::with_capacity(n);
    let ratio0 = h[0] / h[1];
    m.push((T::one() + ratio0) * inner[0] - ratio0 * inner[1]);
    m.extend_from_slice(&inner);
    let ratio1 = h[n - 2] / h[n - 3];
    m.push((T::one() + ratio1) * inner[k - 1] - ratio1 * inner[k - 2]);
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_cubics_exactly() {
        let xs: Vec<f64> = (0..9).map(|i| 0.3 * i as f64).collect();
        let f = |x: f64| 2.0 - x + 0.5 * x * x - 0.25 * x * x * x;
        let ys: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
        let s = CubicSpline::new(&xs, &ys).unwrap();
        for k in 0..40 {
            let x = 0.06 * k as f64;
            assert!((s.eval(x).unwrap() - f(x)).abs() < 1e-13);
            let d1 = -1.0 + x - 0.75 * x * x;
            assert!((s.d1(x).unwrap() - d1).abs() < 1e-12);
            let d2 = 1.0 - 1.5 * x;
            assert!((s.d2(x).unwrap() - d2).abs() < 1e-11);
        }
    }

    #[test]
    fn interpolation_orders_on_smooth_data() {
        // eval error O(h^4), d2 error O(h^2) for sin on [0, 1].
        let err = |n: usize| {
            let xs: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
            let ys: Vec<f64> = xs.iter().map(|&x| x.sin()).collect();
            let s = CubicSpline::new(&xs, &ys).unwrap();
            let mut e0: f64 = 0.0;
            let mut e2: f64 = 0.0;
            for k in 0..=700 {
                let x = k as f64 / 700.0;
                e0 = e0.max((s.eval(x).unwrap() - x.sin()).abs());
                e2 = e2.max((s.d2(x).unwrap() + x.sin()).abs());
            }
            (e0, e2)
        };
        let (c0, c2) = err(25);
        let (f0, f2) = err(50);
        assert!(c0 / f0 > 10.0, "eval order: {c0:.3e} vs {f0:.3e}");
        assert!(c2 / f2 > 3.0, "d2 order: {c2:.3e} vs {f2:.3e}");
        // At h = 1e-3 the d2 error of a unit-scale function sits well below 1e-6.
        let xs: Vec<f64> = (0..=1000).map(|i| i as f64 * 1e-3).collect();
        let ys: Vec<f64> = xs.iter().map(|&x| x.sin()).collect();
        let s = CubicSpline::new(&xs, &ys).unwrap();
        let mut worst: f64 = 0.0;
        for k in 0..=997 {
            let x = 0.0005 + k as f64 * 1e-3;
            worst = worst.max((s.d2(x).unwrap() + x.sin()).abs());
        }
        assert!(worst < 1e-6, "d2 error at h=1e-3: {worst:.3e}");
    }

    #[test]
    fn rejects_bad_input() {
        assert!(CubicSpline::new(&[0.0, 0.0, 1.0], &[1.0, 2.0, 3.0]).is_err());
        assert!(CubicSpline::new(&[0.0], &[1.0]).is_err());
        assert!(CubicSpline::new(&[0.0, 1.0], &[1.0, f64::NAN]).is_err());
        let s = CubicSpline::new(&[0.0, 1.0, 2.0, 3.0], &[0.0, 1.0, 0.0, 1.0]).unwrap();
        assert!(s.eval(-0.5).is_err());
        assert!(s.eval(3.5).is_err());
    }
}
