//! First Dirichlet eigenvalue of the radial conformal Laplacian on
//! annular domains, the sup-norm minimization problem behind the
//! test-function bounds, and the negativity certificate.
//!
//! The radial operator is `-c_n (w u')' / w + S_g u` with the volume
//! density `w = prod p_i^{n_i}` as weight. Its first eigenvalue is
//! computed by symmetric finite differences plus Sturm-sequence
//! bisection, Richardson-extrapolated over two grids; certificates
//! instead rely on the closed-form test-function bound, which needs no
//! discretization at all. For product specs the reported value is the
//! eigenvalue of the radial problem; on the torus examples this equals
//! the full first eigenvalue because the ground eigenspace is one
//! dimensional and hence invariant under the fibre symmetries.

use crate::error::{Error, Result};
use crate::geometry::{choose_alphas, exp_torus_spec, WarpedProductSpec};
use crate::num::{c, cu, solve_tridiagonal, Dimension, Scalar};
use crate::ode::{self, OdeOptions};
use crate::profile::{Interval, RadialProfile};
use crate::quad;

/// Concentric radial domains: the inner interval `[a, b]` and the
/// outer one obtained by padding both ends with the separation `R`.
#[derive(Debug, Clone, Copy)]
pub struct RadialDomain<T> {
    inner: (T, T),
    separation: T,
}

impl<T: Scalar> RadialDomain<T> {
    pub fn new(a: T, b: T, separation: T) -> Result<Self> {
        if !(a < b) {
            return Err(Error::InvalidParameter(format!(
                "inner interval [{a}, {b}] is empty"
            )));
        }
        if !(separation > T::zero()) {
            return Err(Error::InvalidParameter(format!(
                "separation must be positive, got {separation}"
            )));
        }
        Ok(RadialDomain {
            inner: (a, b),
            separation,
        })
    }

    pub fn inner(&self) -> (T, T) {
        self.inner
    }

    pub fn separation(&self) -> T {
        self.separation
    }

    pub fn outer(&self) -> (T, T) {
        (self.inner.0 - self.separation, self.inner.1 + self.separation)
    }

    pub fn outer_length(&self) -> T {
        let (lo, hi) = self.outer();
        hi - lo
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EigenMethod {
    SturmBisection,
    ClosedForm,
    RayleighBound,
}

/// First-eigenpair data on the outer interval.
#[derive(Debug, Clone)]
pub struct EigenReport<T> {
    /// Richardson-extrapolated first eigenvalue.
    pub lambda: T,
    /// Grid nodes including both endpoints (the finer of the two grids).
    pub grid: Vec<T>,
    /// Eigenfunction samples: positive interior, zero at the ends,
    /// normalized to sup-norm 1.
    pub eigenfunction: Vec<T>,
    pub method: EigenMethod,
    pub grid_size: usize,
    /// `|lambda_2N - lambda_N| / 3`, the extrapolation error indicator.
    pub error_estimate: T,
}

/// `F(y, z) = c_n z^2 - n(n-1) y^2`, the pointwise objective of the
/// sup-norm problem.
pub fn sup_norm_objective<T: Scalar>(dim: Dimension, y: T, z: T) -> T {
    dim.c_n::<T>() * z * z - dim.n_n1::<T>() * y * y
}

/// Closed form of the sup-norm minimization: the least possible
/// `sup F(phi, phi')` over ramps from 0 to 1 on `[0, R]` is
/// `H0 = n(n-1) csch^2(sqrt(n(n-2)) R / 2)`, attained by the sinh ramp
/// returned alongside it.
pub fn supnorm_minimizer_closed_form<T: Scalar>(
    n: usize,
    big_r: T,
) -> Result<(T, RadialProfile<T>)> {
    let dim = Dimension::new(n)?;
    if !(big_r > T::zero()) {
        return Err(Error::InvalidParameter(format!(
            "ramp length must be positive, got {big_r}"
        )));
    }
    let half_kappa = dim.kappa::<T>() * c::<T>(0.5);
    let denom = (half_kappa * big_r).sinh();
    let h0 = dim.n_n1::<T>() / (denom * denom);
    let profile = RadialProfile::parse(
        &format!("sinh({half_kappa} * r) / {denom}"),
        Interval::bounded(T::zero(), big_r)?,
    )?;
    Ok((h0, profile))
}

/// Independent oracle for the same minimum: for each candidate level
/// `c` integrate the ramp ODE `phi' = sqrt((c + n(n-1) phi^2)/c_n)`
/// from 0 and bisect on whether it reaches 1 by `R`. The crossing
/// level is the minimum of the sup-norm problem.
pub fn supnorm_minimize_numeric<T: Scalar>(n: usize, big_r: T, tol: T) -> Result<T> {
    let dim = Dimension::new(n)?;
    if !(big_r > T::zero()) || !(tol > T::zero()) {
        return Err(Error::InvalidParameter(format!(
            "need positive ramp length and tolerance, got {big_r} and {tol}"
        )));
    }
    let c_n = dim.c_n::<T>();
    let n_n1 = dim.n_n1::<T>();
    let opts = OdeOptions {
        rel_tol: 1e-12,
        abs_tol: 1e-14,
        ..OdeOptions::default()
    };
    let endpoint = |level: T| -> Result<T> {
        ode::solve_to(
            |_, phi: T| ((level + n_n1 * phi * phi) / c_n).sqrt(),
            T::zero(),
            T::zero(),
            big_r,
            opts,
        )
    };
    let mut lo = T::zero();
    let mut hi = T::one();
    let mut grew = 0;
    while endpoint(hi)? < T::one() {
        lo = hi;
        hi = hi + hi;
        grew += 1;
        if grew > 200 {
            return Err(Error::Numeric(
                "sup-norm bisection failed to bracket the crossing level".into(),
            ));
        }
    }
    for _ in 0..200 {
        if hi - lo <= tol * hi.max(T::one()) {
            break;
        }
        let mid = lo + (hi - lo) * c::<T>(0.5);
        if endpoint(mid)? < T::one() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo + (hi - lo) * c::<T>(0.5))
}

/// Rayleigh quotient of `phi` for the conformal Laplacian on the
/// outer interval, with the radial volume density as weight.
pub fn rayleigh_quotient<T: Scalar>(
    spec: &WarpedProductSpec<T>,
    phi: &RadialProfile<T>,
    domain: &RadialDomain<T>,
) -> Result<T> {
    let (lo, hi) = domain.outer();
    let end_tol = c::<T>(1e-12);
    for r in [lo, hi] {
        let v = phi.eval(r)?;
        if v.abs() > end_tol {
            return Err(Error::InvalidParameter(format!(
                "test function must vanish at the outer endpoints; |phi({r})| = {}",
                v.abs()
            )));
        }
    }
    let c_n = spec.n().c_n::<T>();
    let numerator = quad::integrate_default(
        |r| {
            let f = || -> Result<T> {
                let v = phi.eval(r)?;
                let dv = phi.d1(r)?;
                Ok((c_n * dv * dv + spec.scalar_curvature(r)? * v * v) * spec.weight(r)?)
            };
            f().unwrap_or_else(|_| T::nan())
        },
        lo,
        hi,
    )?;
    let denominator = quad::integrate_default(
        |r| {
            let f = || -> Result<T> {
                let v = phi.eval(r)?;
                Ok(v * v * spec.weight(r)?)
            };
            f().unwrap_or_else(|_| T::nan())
        },
        lo,
        hi,
    )?;
    if !(denominator > T::zero()) || !denominator.is_finite() || !numerator.is_finite() {
        return Err(Error::InvalidParameter(
            "test function is numerically zero on the domain".into(),
        ));
    }
    Ok(numerator / denominator)
}

/// Symmetrized interior system for `-c_n (w u')'/w + S u` on
/// `[lo, hi]` with `cells` uniform cells: diagonal `d`, off-diagonal
/// `e` (both after the `y = sqrt(w) u` similarity) and the spacing.
fn sturm_system<T: Scalar>(
    spec: &WarpedProductSpec<T>,
    lo: T,
    hi: T,
    cells: usize,
) -> Result<(Vec<T>, Vec<T>, T)> {
    let h = (hi - lo) / cu(cells);
    let c_n = spec.n().c_n::<T>();
    let h2 = h * h;
    let mut w_half = Vec::with_capacity(cells);
    for i in 0..cells {
        let x = lo + h * (cu::<T>(i) + c(0.5));
        let w = spec.weight(x)?;
        if !(w > T::zero()) || !w.is_finite() {
            return Err(Error::Numeric(format!(
                "volume density must be positive, got {w} at r = {x}"
            )));
        }
        w_half.push(w);
    }
    let m = cells - 1;
    let mut w_node = Vec::with_capacity(m);
    let mut d = Vec::with_capacity(m);
    for i in 1..cells {
        let x = lo + h * cu(i);
        let w = spec.weight(x)?;
        if !(w > T::zero()) || !w.is_finite() {
            return Err(Error::Numeric(format!(
                "volume density must be positive, got {w} at r = {x}"
            )));
        }
        w_node.push(w);
        d.push(c_n * (w_half[i - 1] + w_half[i]) / (h2 * w) + spec.scalar_curvature(x)?);
    }
    let mut e = Vec::with_capacity(m - 1);
    for i in 1..m {
        e.push(-c_n * w_half[i] / (h2 * (w_node[i - 1] * w_node[i]).sqrt()));
    }
    Ok((d, e, h))
}

/// Number of eigenvalues of the symmetric tridiagonal matrix strictly
/// below `x`, by the sign count of the LDL^T pivots.
fn count_below<T: Scalar>(d: &[T], e: &[T], x: T) -> usize {
    let tiny = T::min_positive_value().sqrt();
    let mut count = 0usize;
    let mut q = d[0] - x;
    if q < T::zero() {
        count += 1;
    }
    for i in 1..d.len() {
        if q.abs() < tiny {
            q = if q < T::zero() { -tiny } else { tiny };
        }
        q = (d[i] - x) - e[i - 1] * e[i - 1] / q;
        if q < T::zero() {
            count += 1;
        }
    }
    count
}

fn gershgorin_bracket<T: Scalar>(d: &[T], e: &[T]) -> (T, T) {
    let m = d.len();
    let mut lo = T::infinity();
    let mut hi = T::neg_infinity();
    for i in 0..m {
        let mut radius = T::zero();
        if i > 0 {
            radius = radius + e[i - 1].abs();
        }
        if i + 1 < m {
            radius = radius + e[i].abs();
        }
        lo = lo.min(d[i] - radius);
        hi = hi.max(d[i] + radius);
    }
    (lo, hi)
}

fn smallest_eigenvalue<T: Scalar>(d: &[T], e: &[T]) -> T {
    let (mut lo, mut hi) = gershgorin_bracket(d, e);
    let scale = lo.abs().max(hi.abs()).max(T::one());
    let tol = scale * c::<T>(4.0) * T::epsilon();
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        let mid = lo + (hi - lo) * c::<T>(0.5);
        if count_below(d, e, mid) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    lo + (hi - lo) * c::<T>(0.5)
}

/// Ground-state vector by inverse iteration with the bisection value
/// as shift. Returns the vector (sup-norm 1), its Rayleigh quotient
/// and the residual sup-norm.
fn ground_state<T: Scalar>(d: &[T], e: &[T], sigma: T) -> Result<(Vec<T>, T, T)> {
    let m = d.len();
    let (glo, ghi) = gershgorin_bracket(d, e);
    let scale = glo.abs().max(ghi.abs()).max(T::one());
    let apply = |y: &[T]| -> Vec<T> {
        (0..m)
            .map(|i| {
                let mut v = d[i] * y[i];
                if i > 0 {
                    v = v + e[i - 1] * y[i - 1];
                }
                if i + 1 < m {
                    v = v + e[i] * y[i + 1];
                }
                v
            })
            .collect()
    };
    let mut shift = sigma;
    let mut y = vec![T::one(); m];
    let mut rq = sigma;
    let mut residual = T::infinity();
    'attempt: for attempt in 0..4 {
        let diag: Vec<T> = d.iter().map(|&v| v - shift).collect();
        y = vec![T::one(); m];
        for _ in 0..64 {
            let z = match solve_tridiagonal(e, &diag, e, &y) {
                Ok(z) => z,
                Err(_) => {
                    shift = shift - scale * c::<T>(1e-12) * cu(attempt + 1);
                    continue 'attempt;
                }
            };
            let norm = z.iter().fold(T::zero(), |a, &v| a.max(v.abs()));
            if !(norm > T::zero()) || !norm.is_finite() {
                shift = shift - scale * c::<T>(1e-12) * cu(attempt + 1);
                continue 'attempt;
            }
            y = z.iter().map(|&v| v / norm).collect();
            let ay = apply(&y);
            let mut num = T::zero();
            let mut den = T::zero();
            for i in 0..m {
                num = num + y[i] * ay[i];
                den = den + y[i] * y[i];
            }
            rq = num / den;
            residual = (0..m)
                .map(|i| (ay[i] - rq * y[i]).abs())
                .fold(T::zero(), T::max);
            if residual <= scale * c::<T>(1e-12) {
                break;
            }
        }
        break;
    }
    if !(residual <= scale * c::<T>(1e-8)) {
        return Err(Error::Numeric(format!(
            "inverse iteration stalled with residual {residual}"
        )));
    }
    // Fix the overall sign; the ground state cannot change sign.
    let peak = y.iter().fold(T::zero(), |a, &v| if v.abs() > a.abs() { v } else { a });
    if peak < T::zero() {
        for v in &mut y {
            *v = -*v;
        }
    }
    if y.iter().any(|&v| !(v > T::zero())) {
        return Err(Error::Numeric(
            "inverse iteration did not isolate a sign-definite ground state".into(),
        ));
    }
    Ok((y, rq, residual))
}

/// First Dirichlet eigenvalue of the radial conformal Laplacian on the
/// outer interval, with eigenfunction samples on the finer grid.
pub fn first_eigenvalue<T: Scalar>(
    spec: &WarpedProductSpec<T>,
    domain: &RadialDomain<T>,
    grid_size: usize,
) -> Result<EigenReport<T>> {
    if grid_size < 128 {
        return Err(Error::InvalidParameter(format!(
            "need at least 128 cells, got {grid_size}"
        )));
    }
    let (lo, hi) = domain.outer();
    let (d1, e1, _) = sturm_system(spec, lo, hi, grid_size)?;
    let coarse = smallest_eigenvalue(&d1, &e1);
    let (d2, e2, h) = sturm_system(spec, lo, hi, 2 * grid_size)?;
    let fine = smallest_eigenvalue(&d2, &e2);
    let lambda = (c::<T>(4.0) * fine - coarse) / c::<T>(3.0);
    let error_estimate = (fine - coarse).abs() / c::<T>(3.0);

    let (y, _, _) = ground_state(&d2, &e2, fine)?;
    // Undo the sqrt(w) similarity and normalize the sup to 1.
    let cells = 2 * grid_size;
    let mut grid = Vec::with_capacity(cells + 1);
    let mut u = Vec::with_capacity(cells + 1);
    grid.push(lo);
    u.push(T::zero());
    let mut sup = T::zero();
    for i in 1..cells {
        let x = lo + h * cu(i);
        grid.push(x);
        let v = y[i - 1] / spec.weight(x)?.sqrt();
        sup = sup.max(v.abs());
        u.push(v);
    }
    grid.push(hi);
    u.push(T::zero());
    for v in &mut u {
        *v = *v / sup;
    }
    Ok(EigenReport {
        lambda,
        grid,
        eigenfunction: u,
        method: EigenMethod::SturmBisection,
        grid_size,
        error_estimate,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RatioRegime {
    RatioHolds,
    RatioFails,
}

/// Test-function upper bound for the first eigenvalue, with the volume
/// data it was built from.
#[derive(Debug, Clone, Copy)]
pub struct UpperBound<T> {
    /// The displayed bound: numerator over `Vol(O2)` when the ratio
    /// condition holds, over `Vol(O1)` otherwise.
    pub bound: T,
    pub regime: RatioRegime,
    /// Numerator over the exact `int phi^2 dV` of the test function;
    /// always at least as tight as `bound`.
    pub sharp: T,
    pub inner_volume: T,
    pub shell_volume: T,
    pub outer_volume: T,
    pub ratio: T,
    pub sinh2_bound: T,
    pub h0: T,
}

const SCAL_SAMPLE_FACTOR: usize = 10;
const DEFAULT_CERT_GRID: usize = 1024;

/// First sample on `[lo, hi]` violating `S_g <= -n(n-1)`, if any.
fn scalar_condition_violation<T: Scalar>(
    spec: &WarpedProductSpec<T>,
    lo: T,
    hi: T,
    samples: usize,
) -> Result<Option<(T, T)>> {
    let target = -spec.n().n_n1::<T>();
    let slack = c::<T>(1e-9) * spec.n().n_n1::<T>();
    for i in 0..=samples {
        let r = lo + (hi - lo) * cu(i) / cu(samples);
        let s = spec.scalar_curvature(r)?;
        if s > target + slack {
            return Ok(Some((r, s)));
        }
    }
    Ok(None)
}

/// Evaluates the test-function eigenvalue bound on the domain.
///
/// The test function is 1 on the inner interval and the optimal sinh
/// ramp on each padding shell, ramping from 0 at the outer boundary.
pub fn eigen_upper_bound<T: Scalar>(
    spec: &WarpedProductSpec<T>,
    domain: &RadialDomain<T>,
) -> Result<UpperBound<T>> {
    let (lo, hi) = domain.outer();
    let (a, b) = domain.inner();
    let sep = domain.separation();
    if let Some((r, s)) = scalar_condition_violation(
        spec,
        lo,
        hi,
        SCAL_SAMPLE_FACTOR * DEFAULT_CERT_GRID,
    )? {
        return Err(Error::PreconditionViolated(format!(
            "scalar curvature must stay at or below -n(n-1) = {} on the outer \
             interval; sample S({r}) = {s}",
            -spec.n().n_n1::<T>()
        )));
    }
    let dim = spec.n();
    let n_n1 = dim.n_n1::<T>();
    let half_kappa = dim.kappa::<T>() * c::<T>(0.5);
    let sinh_r = (half_kappa * sep).sinh();
    let sinh2_bound = sinh_r * sinh_r;
    let h0 = n_n1 / sinh2_bound;

    let inner_volume = spec.annulus_volume(a, b)?;
    let shell_volume = spec.annulus_volume(lo, a)? + spec.annulus_volume(b, hi)?;
    let outer_volume = inner_volume + shell_volume;
    let ratio = shell_volume / inner_volume;
    let numerator = shell_volume * h0 - n_n1 * inner_volume;

    // int phi^2 dV: 1 on the inner interval, the sinh ramp squared on
    // both shells (distance measured from the outer boundary).
    let ramp = |t: T| (half_kappa * t).sinh() / sinh_r;
    let fib = spec.fibre_volume();
    let left = quad::integrate_default(
        |r| {
            let p = ramp(r - lo);
            spec.weight(r).map_or_else(|_| T::nan(), |w| w * p * p)
        },
        lo,
        a,
    )?;
    let right = quad::integrate_default(
        |r| {
            let p = ramp(hi - r);
            spec.weight(r).map_or_else(|_| T::nan(), |w| w * p * p)
        },
        b,
        hi,
    )?;
    let phi_sq = inner_volume + fib * (left + right);

    let (regime, bound) = if ratio <= sinh2_bound {
        (RatioRegime::RatioHolds, numerator / outer_volume)
    } else {
        (RatioRegime::RatioFails, numerator / inner_volume)
    };
    Ok(UpperBound {
        bound,
        regime,
        sharp: numerator / phi_sq,
        inner_volume,
        shell_volume,
        outer_volume,
        ratio,
        sinh2_bound,
        h0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    NegativeCertified,
    Inconclusive,
}

/// Outcome of the negativity decision procedure.
#[derive(Debug, Clone, Copy)]
pub struct Certificate<T> {
    pub ratio: T,
    pub sinh2_bound: T,
    pub scalar_condition_ok: bool,
    /// Displayed test-function bound; absent when the scalar condition
    /// already failed.
    pub lambda_upper: Option<T>,
    /// Corroborating discrete eigenvalue, when a grid was requested.
    pub lambda_numeric: Option<T>,
    pub verdict: Verdict,
}

/// Decides eigenvalue negativity from volumes alone: certified iff the
/// scalar condition holds on the outer interval and the shell/inner
/// volume ratio is at most `sinh^2(sqrt(n(n-2)) R / 2)`.
pub fn negativity_certificate<T: Scalar>(
    spec: &WarpedProductSpec<T>,
    domain: &RadialDomain<T>,
    numeric_grid: Option<usize>,
) -> Result<Certificate<T>> {
    let (lo, hi) = domain.outer();
    let (a, b) = domain.inner();
    let samples = SCAL_SAMPLE_FACTOR * numeric_grid.unwrap_or(DEFAULT_CERT_GRID);
    let scalar_condition_ok = scalar_condition_violation(spec, lo, hi, samples)?.is_none();

    let inner_volume = spec.annulus_volume(a, b)?;
    let shell_volume = spec.annulus_volume(lo, a)? + spec.annulus_volume(b, hi)?;
    let ratio = shell_volume / inner_volume;
    let half_kappa = spec.n().kappa::<T>() * c::<T>(0.5);
    let sinh_r = (half_kappa * domain.separation()).sinh();
    let sinh2_bound = sinh_r * sinh_r;

    let lambda_upper = if scalar_condition_ok {
        Some(eigen_upper_bound(spec, domain)?.bound)
    } else {
        None
    };
    let lambda_numeric = match numeric_grid {
        Some(g) => Some(first_eigenvalue(spec, domain, g)?.lambda),
        None => None,
    };
    let verdict = if scalar_condition_ok && ratio <= sinh2_bound {
        Verdict::NegativeCertified
    } else {
        Verdict::Inconclusive
    };
    Ok(Certificate {
        ratio,
        sinh2_bound,
        scalar_condition_ok,
        lambda_upper,
        lambda_numeric,
        verdict,
    })
}

/// Outcome of one exponential-torus sharpness run.
#[derive(Debug, Clone)]
pub struct SharpnessReport<T> {
    pub beta: T,
    pub scal: T,
    pub lambda_numeric: T,
    /// `(n-1)/(n-2) beta^2 + S`, the characteristic-root lower bound.
    pub lower_bound: T,
    pub volume_ratio: T,
    /// Amplitude and exponent of the fitted `ratio ~ C e^{b R}` law
    /// over the concentric doubling family.
    pub c_fit: T,
    pub fit_exponent: T,
}

/// Builds the exponential torus with total rate `beta` (curvature
/// target `-n(n-1)` when `beta <= n-1`, the scaled target
/// `-n beta^2/(n-1)` otherwise), computes the first eigenvalue on the
/// doubled annulus `|r| <= 2R`, and checks it against the lower bound
/// forced by the complex characteristic roots.
pub fn sharpness_experiment<T: Scalar>(
    beta: T,
    n: usize,
    big_r: T,
    grid_size: usize,
) -> Result<SharpnessReport<T>> {
    let dim = Dimension::new(n)?;
    if !(beta > T::zero()) || !(big_r > T::zero()) {
        return Err(Error::InvalidParameter(format!(
            "need positive rate and radius, got {beta} and {big_r}"
        )));
    }
    let n1 = cu::<T>(n - 1);
    let alphas = if beta <= n1 {
        choose_alphas(beta, n)?
    } else {
        // The equal-rate torus: total rate beta with constant scalar
        // curvature -n beta^2 / (n-1), still at or below -n(n-1).
        vec![beta / n1; n - 1]
    };
    let (spec, _) = exp_torus_spec(&alphas)?;
    let scal = spec.scalar_curvature(T::zero())?;
    let domain = RadialDomain::new(-big_r, big_r, big_r)?;
    let report = first_eigenvalue(&spec, &domain, grid_size)?;
    let lower_bound = n1 / cu::<T>(n - 2) * beta * beta + scal;
    if !(report.lambda > lower_bound) {
        return Err(Error::Numeric(format!(
            "computed eigenvalue {} fell below the characteristic-root bound {lower_bound}",
            report.lambda
        )));
    }
    let ratios = spec.volume_ratio_annuli(T::zero(), big_r, big_r)?;
    let radii = [
        big_r * c::<T>(0.5),
        big_r * c::<T>(0.75),
        big_r,
        big_r * c::<T>(1.25),
    ];
    let fit = spec.concentric_ratio_fit(T::zero(), &radii)?;
    let _ = dim;
    Ok(SharpnessReport {
        beta,
        scal,
        lambda_numeric: report.lambda,
        lower_bound,
        volume_ratio: ratios.ratio,
        c_fit: fit.amplitude,
        fit_exponent: fit.exponent,
    })
}
