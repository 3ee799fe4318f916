//! Scalar abstraction and dimension-derived constants.

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point scalar the whole crate is generic over.
///
/// `f32` and `f64` implement it; every tolerance quoted in the crate
/// assumes `f64` precision and must be rescaled for narrower types.
pub trait Scalar: Float + FromPrimitive + ToPrimitive + Debug + Display + Copy + 'static {}

impl<T> Scalar for T where T: Float + FromPrimitive + ToPrimitive + Debug + Display + Copy + 'static {}

/// Lifts an `f64` constant into the working scalar type.
#[inline]
pub fn c<T: Scalar>(v: f64) -> T {
    T::from_f64(v).expect("constant must be representable in the scalar type")
}

/// Lifts a `usize` constant into the working scalar type.
#[inline]
pub fn cu<T: Scalar>(v: usize) -> T {
    T::from_usize(v).expect("count must be representable in the scalar type")
}

/// Manifold dimension `n >= 3` with the constants derived from it.
///
/// Everything downstream works with the normalisation in which the
/// model end has scalar curvature `-n(n-1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Dimension(pub usize);

impl Dimension {
    pub fn new(n: usize) -> crate::Result<Self> {
        if n < 3 {
            return Err(crate::Error::InvalidParameter(format!(
                "dimension must be at least 3, got {n}"
            )));
        }
        Ok(Dimension(n))
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.0
    }

    /// `c_n = 4(n-1)/(n-2)`, the conformal Laplacian constant.
    #[inline]
    pub fn c_n<T: Scalar>(&self) -> T {
        let n = self.0 as f64;
        c(4.0 * (n - 1.0) / (n - 2.0))
    }

    /// `n(n-1)`, the magnitude of the model scalar curvature.
    #[inline]
    pub fn n_n1<T: Scalar>(&self) -> T {
        let n = self.0 as f64;
        c(n * (n - 1.0))
    }

    /// Model scalar curvature `-n(n-1)`.
    #[inline]
    pub fn target_scal<T: Scalar>(&self) -> T {
        -self.n_n1::<T>()
    }

    /// Critical exponent `(n+2)/(n-2)` of the Yamabe nonlinearity.
    #[inline]
    pub fn critical_exponent<T: Scalar>(&self) -> T {
        let n = self.0 as f64;
        c((n + 2.0) / (n - 2.0))
    }

    /// Boundary blow-up rate `(n-2)/2`.
    #[inline]
    pub fn blowup_rate<T: Scalar>(&self) -> T {
        c((self.0 as f64 - 2.0) / 2.0)
    }

    /// `sqrt(n(n-2))`, the collar frequency of the sup-norm minimiser.
    #[inline]
    pub fn kappa<T: Scalar>(&self) -> T {
        let n = self.0 as f64;
        c((n * (n - 2.0)).sqrt())
    }
}

/// Least-squares fit of a straight line `y = a + b x`.
///
/// Returns `(a, b)`; at least two distinct abscissae are required.
pub fn linear_fit<T: Scalar>(xs: &[T], ys: &[T]) -> crate::Result<(T, T)> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(crate::Error::InsufficientData(format!(
            "linear fit needs at least two paired samples, got {} and {}",
            xs.len(),
            ys.len()
        )));
    }
    let m = cu::<T>(xs.len());
    let sx = xs.iter().fold(T::zero(), |a, &x| a + x);
    let sy = ys.iter().fold(T::zero(), |a, &y| a + y);
    let mx = sx / m;
    let my = sy / m;
    let mut sxx = T::zero();
    let mut sxy = T::zero();
    for (&x, &y) in xs.iter().zip(ys) {
        sxx = sxx + (x - mx) * (x - mx);
        sxy = sxy + (x - mx) * (y - my);
    }
    if sxx <= T::zero() {
        return Err(crate::Error::InsufficientData(
            "linear fit needs at least two distinct abscissae".into(),
        ));
    }
    let b = sxy / sxx;
    let a = my - b * mx;
    Ok((a, b))
}

/// Solves a tridiagonal system in place by the Thomas algorithm.
///
/// `lower[i]` couples row `i+1` to `i`, `upper[i]` couples row `i` to
/// `i+1`. Returns the solution; fails on a vanishing pivot.
pub fn solve_tridiagonal<T: Scalar>(
    lower: &[T],
    diag: &[T],
    upper: &[T],
    rhs: &[T],
) -> crate::Result<Vec<T>> {
    let m = diag.len();
    assert_eq!(rhs.len(), m);
    assert_eq!(lower.len(), m.saturating_sub(1));
    assert_eq!(upper.len(), m.saturating_sub(1));
    if m == 0 {
        return Ok(Vec::new());
    }
    let mut cp = vec![T::zero(); m];
    let mut dp = vec![T::zero(); m];
    let mut piv = diag[0];
    if piv == T::zero() {
        return Err(crate::Error::Numeric("tridiagonal pivot vanished".into()));
    }
    cp[0] = if m > 1 { upper[0] / piv } else { T::zero() };
    dp[0] = rhs[0] / piv;
    for i in 1..m {
        piv = diag[i] - lower[i - 1] * cp[i - 1];
        if piv == T::zero() {
            return Err(crate::Error::Numeric("tridiagonal pivot vanished".into()));
        }
        if i + 1 < m {
            cp[i] = upper[i] / piv;
        }
        dp[i] = (rhs[i] - lower[i - 1] * dp[i - 1]) / piv;
    }
    let mut x = dp;
    for i in (0..m - 1).rev() {
        let next = x[i + 1];
        x[i] = x[i] - cp[i] * next;
    }
    Ok(x)
}
