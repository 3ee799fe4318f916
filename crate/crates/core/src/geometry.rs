//! Multiply warped products `g = dr^2 + sum_i p_i(r)^2 h_i`: scalar
//! curvature, radial drift, volume of radial annuli, locally hyperbolic
//! reference ends, the exponential torus family, and a sup-norm decay
//! checker for asymptotically locally hyperbolic metrics.

use crate::num::{c, cu, linear_fit, Dimension, Scalar};
use crate::profile::{Interval, RadialProfile};
use crate::quad;
use crate::{Error, Result};

/// One compact fibre `(N_i, h_i)`: its dimension, the constant scalar
/// curvature of `h_i`, and its total volume.
#[derive(Clone, Copy, Debug)]
pub struct FibreSpec<T> {
    pub dim: usize,
    pub scal: T,
    pub volume: T,
}

impl<T: Scalar> FibreSpec<T> {
    pub fn new(dim: usize, scal: T, volume: T) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter(
                "fibre dimension must be positive".into(),
            ));
        }
        if !(volume > T::zero()) {
            return Err(Error::InvalidParameter(format!(
                "fibre volume must be positive, got {volume}"
            )));
        }
        // A one-dimensional fibre is a circle; its scalar curvature vanishes.
        if dim == 1 && scal != T::zero() {
            return Err(Error::InvalidParameter(format!(
                "one-dimensional fibres are flat, got scal = {scal}"
            )));
        }
        Ok(FibreSpec { dim, scal, volume })
    }

    /// Unit-volume circle fibre.
    pub fn circle() -> Self {
        FibreSpec {
            dim: 1,
            scal: T::zero(),
            volume: T::one(),
        }
    }
}

/// `f_k` from the reference-metric case table: `sinh` for `k = 1`,
/// `exp` for `k = 0`, `cosh` for `k = -1`.
pub fn f_k<T: Scalar>(k: i32, r: T) -> Result<T> {
    match k {
        1 => Ok(r.sinh()),
        0 => Ok(r.exp()),
        -1 => Ok(r.cosh()),
        _ => Err(Error::InvalidParameter(format!(
            "curvature class k must be -1, 0 or 1, got {k}"
        ))),
    }
}

/// A multiply warped-product end: matching lists of fibres and warping
/// profiles. Total dimension is `1 + sum_i dim_i >= 3`.
#[derive(Clone, Debug)]
pub struct WarpedProductSpec<T> {
    dim: Dimension,
    fibres: Vec<FibreSpec<T>>,
    warpings: Vec<RadialProfile<T>>,
}

/// Window used to sample warping positivity when a domain is unbounded.
const POSITIVITY_WINDOW: f64 = 32.0;
const POSITIVITY_SAMPLES: usize = 128;

impl<T: Scalar> WarpedProductSpec<T> {
    /// Validates list lengths, total dimension and warping positivity.
    ///
    /// Positivity is sampled (128 nodes per warping over its domain,
    /// clipped to `[-32, 32]` when unbounded); evaluation still guards
    /// the domain at every later call.
    pub fn new(fibres: Vec<FibreSpec<T>>, warpings: Vec<RadialProfile<T>>) -> Result<Self> {
        if fibres.is_empty() || fibres.len() != warpings.len() {
            return Err(Error::InvalidParameter(format!(
                "need matching non-empty fibre/warping lists, got {} and {}",
                fibres.len(),
                warpings.len()
            )));
        }
        let n = 1 + fibres.iter().map(|f| f.dim).sum::<usize>();
        let dim = Dimension::new(n)?;
        for (i, w) in warpings.iter().enumerate() {
            let dom = w.domain();
            let lo = dom.lo.unwrap_or_else(|| c(-POSITIVITY_WINDOW));
            let hi = dom.hi.unwrap_or_else(|| c(POSITIVITY_WINDOW));
            let hi = if hi > lo { hi } else { lo + T::one() };
            for j in 0..=POSITIVITY_SAMPLES {
                let t = cu::<T>(j) / cu::<T>(POSITIVITY_SAMPLES);
                let r = lo + (hi - lo) * t;
                if !(w.eval(r)? > T::zero()) {
                    return Err(Error::InvalidParameter(format!(
                        "warping {i} is not positive at r = {r}"
                    )));
                }
            }
        }
        Ok(WarpedProductSpec { dim, fibres, warpings })
    }

    pub fn n(&self) -> Dimension {
        self.dim
    }

    pub fn fibres(&self) -> &[FibreSpec<T>] {
        &self.fibres
    }

    pub fn warpings(&self) -> &[RadialProfile<T>] {
        &self.warpings
    }

    /// Intersection of all warping domains.
    pub fn domain(&self) -> Interval<T> {
        let mut dom = Interval::all();
        for w in &self.warpings {
            dom = dom.intersect(&w.domain());
        }
        dom
    }

    /// Scalar curvature
    /// `S = -2 sum n_i p_i''/p_i - sum n_i(n_i-1)(p_i'/p_i)^2
    ///  - 2 sum_{i<j} n_i n_j (p_i'/p_i)(p_j'/p_j) + sum S_i / p_i^2`.
    ///
    /// The cross sum is folded into `(sum n_i l_i)^2 - sum n_i^2 l_i^2`.
    pub fn scalar_curvature(&self, r: T) -> Result<T> {
        let two = c::<T>(2.0);
        let mut sum_dd = T::zero();
        let mut sum_sq = T::zero();
        let mut drift = T::zero();
        let mut sum_n2l2 = T::zero();
        let mut fibre_term = T::zero();
        for (f, p) in self.fibres.iter().zip(&self.warpings) {
            let v = p.eval(r)?;
            let l = p.d1(r)? / v;
            let ni = cu::<T>(f.dim);
            sum_dd = sum_dd + ni * p.d2(r)? / v;
            sum_sq = sum_sq + ni * (ni - T::one()) * l * l;
            drift = drift + ni * l;
            sum_n2l2 = sum_n2l2 + ni * ni * l * l;
            fibre_term = fibre_term + f.scal / (v * v);
        }
        let cross = drift * drift - sum_n2l2;
        Ok(-two * sum_dd - sum_sq - cross + fibre_term)
    }

    /// First-order coefficient `sum n_i p_i'/p_i` of the radial Laplacian.
    pub fn radial_drift(&self, r: T) -> Result<T> {
        let mut drift = T::zero();
        for (f, p) in self.fibres.iter().zip(&self.warpings) {
            drift = drift + cu::<T>(f.dim) * p.d1(r)? / p.eval(r)?;
        }
        Ok(drift)
    }

    /// Radial volume density `prod p_i^{n_i}` (fibre volumes excluded).
    pub fn weight(&self, r: T) -> Result<T> {
        let mut w = T::one();
        for (f, p) in self.fibres.iter().zip(&self.warpings) {
            w = w * p.eval(r)?.powi(f.dim as i32);
        }
        Ok(w)
    }

    /// Product of the fibre volumes.
    pub fn fibre_volume(&self) -> T {
        self.fibres
            .iter()
            .fold(T::one(), |acc, f| acc * f.volume)
    }

    /// Volume of `{r_lo <= r <= r_hi} x prod N_i` by adaptive quadrature
    /// of the radial density, relative tolerance 1e-10.
    pub fn annulus_volume(&self, r_lo: T, r_hi: T) -> Result<T> {
        if r_lo == r_hi {
            return Ok(T::zero());
        }
        if r_lo > r_hi {
            return Err(Error::InvalidParameter(format!(
                "inverted radial bounds [{r_lo}, {r_hi}]"
            )));
        }
        let dom = self.domain();
        if !dom.contains(r_lo) || !dom.contains(r_hi) {
            return Err(Error::Domain(format!(
                "annulus [{r_lo}, {r_hi}] leaves the warping domain"
            )));
        }
        let radial = quad::integrate_default(
            |s| self.weight(s).unwrap_or_else(|_| T::nan()),
            r_lo,
            r_hi,
        )?;
        let v = self.fibre_volume() * radial;
        if !v.is_finite() {
            return Err(Error::Numeric(format!(
                "volume integral over [{r_lo}, {r_hi}] did not stay finite"
            )));
        }
        Ok(v)
    }

    /// Volume ratio `Vol(O2 \ O1)/Vol(O1)` for the concentric annuli
    /// `O1 = {|r - center| <= w}` and `O2 = {|r - center| <= w + sep}`,
    /// compared against `sinh^2(sqrt(n(n-2)) sep / 2)`.
    pub fn volume_ratio_annuli(&self, center: T, w: T, sep: T) -> Result<VolumeRatio<T>> {
        if !(w > T::zero()) || !(sep > T::zero()) {
            return Err(Error::InvalidParameter(format!(
                "half-width and separation must be positive, got {w} and {sep}"
            )));
        }
        let inner_volume = self.annulus_volume(center - w, center + w)?;
        let shell_volume = self.annulus_volume(center - w - sep, center - w)?
            + self.annulus_volume(center + w, center + w + sep)?;
        let ratio = shell_volume / inner_volume;
        let half = c::<T>(0.5);
        let sinh2_bound = (self.dim.kappa::<T>() * sep * half).sinh().powi(2);
        Ok(VolumeRatio {
            inner_volume,
            shell_volume,
            ratio,
            sinh2_bound,
            satisfies: ratio <= sinh2_bound,
        })
    }

    /// Fits `log ratio(R) = log C + b R` over the concentric doubling
    /// family `O1 = {|r - center| <= R}`, `O2 = {|r - center| <= 2R}`.
    pub fn concentric_ratio_fit(&self, center: T, radii: &[T]) -> Result<RatioFit<T>> {
        let mut ratios = Vec::with_capacity(radii.len());
        let mut logs = Vec::with_capacity(radii.len());
        for &radius in radii {
            let vr = self.volume_ratio_annuli(center, radius, radius)?;
            if !(vr.ratio > T::zero()) {
                return Err(Error::Numeric(format!(
                    "non-positive volume ratio at R = {radius}"
                )));
            }
            ratios.push(vr.ratio);
            logs.push(vr.ratio.ln());
        }
        let (a, b) = linear_fit(radii, &logs)?;
        Ok(RatioFit {
            amplitude: a.exp(),
            exponent: b,
            ratios,
        })
    }
}

/// Result of [`WarpedProductSpec::volume_ratio_annuli`].
#[derive(Clone, Copy, Debug)]
pub struct VolumeRatio<T> {
    pub inner_volume: T,
    pub shell_volume: T,
    pub ratio: T,
    pub sinh2_bound: T,
    pub satisfies: bool,
}

/// Result of [`WarpedProductSpec::concentric_ratio_fit`]:
/// `ratio(R) ~ amplitude * exp(exponent * R)`.
#[derive(Clone, Debug)]
pub struct RatioFit<T> {
    pub amplitude: T,
    pub exponent: T,
    pub ratios: Vec<T>,
}

/// Locally hyperbolic reference end `dr^2 + f_k^2(r + r0) h` on `r >= 0`
/// over a single fibre of constant scalar curvature `(n-1)(n-2)k`.
///
/// Its scalar curvature is identically `-n(n-1)`.
#[derive(Clone, Copy, Debug)]
pub struct ReferenceHyperbolic<T> {
    k: i32,
    r0: T,
    dim: Dimension,
    fibre_volume: T,
}

impl<T: Scalar> ReferenceHyperbolic<T> {
    pub fn new(k: i32, n: usize, r0: T, fibre_volume: T) -> Result<Self> {
        if !matches!(k, -1 | 0 | 1) {
            return Err(Error::InvalidParameter(format!(
                "curvature class k must be -1, 0 or 1, got {k}"
            )));
        }
        if !(r0 > T::zero()) {
            return Err(Error::InvalidParameter(format!(
                "shift r0 must be positive, got {r0}"
            )));
        }
        if !(fibre_volume > T::zero()) {
            return Err(Error::InvalidParameter(format!(
                "fibre volume must be positive, got {fibre_volume}"
            )));
        }
        let dim = Dimension::new(n)?;
        Ok(ReferenceHyperbolic {
            k,
            r0,
            dim,
            fibre_volume,
        })
    }

    pub fn k(&self) -> i32 {
        self.k
    }

    pub fn r0(&self) -> T {
        self.r0
    }

    pub fn n(&self) -> Dimension {
        self.dim
    }

    /// The warping `f_k(r + r0)` on `r >= 0`.
    pub fn warping(&self) -> RadialProfile<T> {
        match self.k {
            1 => RadialProfile::sinh_shifted(self.r0),
            -1 => RadialProfile::cosh_shifted(self.r0),
            _ => RadialProfile::exp_warp(T::one(), self.r0, T::one())
                .restricted(Interval::from_zero()),
        }
    }

    /// Single fibre of dimension `n-1` and scalar curvature `(n-1)(n-2)k`.
    pub fn fibre(&self) -> FibreSpec<T> {
        let n = cu::<T>(self.dim.n());
        let one = T::one();
        let two = c::<T>(2.0);
        FibreSpec {
            dim: self.dim.n() - 1,
            scal: c::<T>(self.k as f64) * (n - one) * (n - two),
            volume: self.fibre_volume,
        }
    }

    /// The end as a single-fibre warped product.
    pub fn spec(&self) -> Result<WarpedProductSpec<T>> {
        WarpedProductSpec::new(vec![self.fibre()], vec![self.warping()])
    }

    /// Radial drift `(n-1) f_k'(r + r0)/f_k(r + r0)` as a closed form.
    pub fn drift_profile(&self) -> RadialProfile<T> {
        use crate::expr::{Expr, Func};
        let nm1 = cu::<T>(self.dim.n() - 1);
        let expr = match self.k {
            1 => Expr::Mul(
                Box::new(Expr::num(nm1)),
                Box::new(Expr::Div(
                    Box::new(Expr::shifted(Func::Cosh, self.r0)),
                    Box::new(Expr::shifted(Func::Sinh, self.r0)),
                )),
            ),
            -1 => Expr::Mul(
                Box::new(Expr::num(nm1)),
                Box::new(Expr::shifted(Func::Tanh, self.r0)),
            ),
            _ => Expr::num(nm1),
        };
        RadialProfile::closed_form(expr, Interval::from_zero())
    }
}

/// Exponential torus `R x (S^1)^{n-1}` with `p_i = e^{alpha_i r}` and
/// unit-volume circle fibres. Returns the spec and its constant scalar
/// curvature `-(sum alpha_i)^2 - sum alpha_i^2`.
pub fn exp_torus_spec<T: Scalar>(alphas: &[T]) -> Result<(WarpedProductSpec<T>, T)> {
    if alphas.len() < 2 {
        return Err(Error::InvalidParameter(format!(
            "need at least two circle factors, got {}",
            alphas.len()
        )));
    }
    let fibres = vec![FibreSpec::circle(); alphas.len()];
    let warpings = alphas
        .iter()
        .map(|&a| RadialProfile::exp_warp(a, T::zero(), T::one()))
        .collect();
    let beta = alphas.iter().fold(T::zero(), |s, &a| s + a);
    let sum_sq = alphas.iter().fold(T::zero(), |s, &a| s + a * a);
    let s_const = -(beta * beta) - sum_sq;
    Ok((WarpedProductSpec::new(fibres, warpings)?, s_const))
}

/// Exponents `alpha` with `sum alpha_i = beta` and exponential-torus
/// scalar curvature exactly `-n(n-1)`; requires `|beta| <= n-1`.
///
/// All entries equal `beta/(n-1)` except the first two, perturbed by
/// `+-t` with `t = sqrt((n(n-1) - beta^2 - beta^2/(n-1))/2)`.
pub fn choose_alphas<T: Scalar>(beta: T, n: usize) -> Result<Vec<T>> {
    let dim = Dimension::new(n)?;
    let nf = cu::<T>(n);
    let nm1 = nf - T::one();
    if beta.abs() > nm1 {
        return Err(Error::Infeasible(format!(
            "|beta| = {} exceeds n-1 = {nm1}; no exponent choice reaches -n(n-1)",
            beta.abs()
        )));
    }
    let t_sq = (dim.n_n1::<T>() - beta * beta - beta * beta / nm1) / c::<T>(2.0);
    // |beta| <= n-1 guarantees t_sq >= 0 up to rounding.
    let t = t_sq.max(T::zero()).sqrt();
    let base = beta / nm1;
    let mut alphas = vec![base; n - 1];
    alphas[0] = base + t;
    alphas[1] = base - t;
    Ok(alphas)
}

/// The four displayed curvature quantities of the three-dimensional
/// two-torus example `g = dr^2 + e^{2r}(p (dx1)^2 + p^{-1} (dx2)^2)`.
#[derive(Clone, Copy, Debug)]
pub struct Ricci3d<T> {
    pub r_rr: T,
    pub r_11: T,
    pub r_22: T,
    pub scal: T,
}

pub fn ricci_3d_example<T: Scalar>(p: &RadialProfile<T>, r: T) -> Result<Ricci3d<T>> {
    let v = p.eval(r)?;
    if !(v > T::zero()) {
        return Err(Error::InvalidParameter(format!(
            "profile must be positive, got {v} at r = {r}"
        )));
    }
    let two = c::<T>(2.0);
    let half = c::<T>(0.5);
    let l = p.d1(r)? / v;
    let q = p.d2(r)? / v;
    let e2r = (two * r).exp();
    let l2h = half * l * l;
    Ok(Ricci3d {
        r_rr: -two - l2h,
        r_11: e2r * v * (-two + l2h - l - half * q),
        r_22: e2r / v * (-two - l2h + l + half * q),
        scal: -c::<T>(6.0) - l2h,
    })
}

/// Component class of a metric deviation sample: fibre (angular) blocks
/// decay like `e^{-(alpha-2) r}`, mixed radial-angular blocks like
/// `e^{-(alpha-1) r}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ComponentClass {
    Angular,
    Mixed,
}

impl ComponentClass {
    fn rate<T: Scalar>(self, alpha: T) -> T {
        match self {
            ComponentClass::Angular => alpha - c(2.0),
            ComponentClass::Mixed => alpha - T::one(),
        }
    }
}

/// Sampled deviations of one metric component from the reference.
///
/// `samples[d]` holds `(r, value)` pairs for the `d`-th radial
/// derivative of the deviation; all orders share the class decay rate.
#[derive(Clone, Debug)]
pub struct ComponentDeviation<T> {
    pub label: String,
    pub class: ComponentClass,
    pub samples: Vec<Vec<(T, T)>>,
}

/// Sup-fit of one component at one derivative order.
#[derive(Clone, Debug)]
pub struct ComponentFit<T> {
    pub label: String,
    pub order: usize,
    pub rate: T,
    /// Smallest `C` with `|dev| <= C e^{-rate r}` over all samples.
    pub envelope: T,
    /// Envelope over the inner/outer halves of the radius range.
    pub early: T,
    pub late: T,
    pub pass: bool,
}

#[derive(Clone, Debug)]
pub struct DecayReport<T> {
    pub alpha: T,
    pub order: usize,
    pub fits: Vec<ComponentFit<T>>,
    pub pass: bool,
}

/// Checks sampled metric deviations against the decay rates of an
/// asymptotically locally hyperbolic end of order `order`.
///
/// The constant is a sup-fit, `C = max |dev| e^{rate r}`; a component
/// passes when `C` is finite and the outer-half envelope does not
/// exceed 1.5 times the inner-half one (an increasing envelope means
/// the claimed rate is not actually attained).
pub fn verify_alh_decay<T: Scalar>(
    components: &[ComponentDeviation<T>],
    alpha: T,
    order: usize,
) -> Result<DecayReport<T>> {
    if !(alpha > T::zero()) {
        return Err(Error::InvalidParameter(format!(
            "decay exponent must be positive, got {alpha}"
        )));
    }
    let mut fits = Vec::new();
    let mut pass = true;
    for comp in components {
        if comp.samples.len() <= order {
            return Err(Error::InvalidParameter(format!(
                "component {} provides derivative orders 0..{}, need 0..{order}",
                comp.label,
                comp.samples.len().saturating_sub(1)
            )));
        }
        let mut radii: Vec<T> = comp.samples[0].iter().map(|s| s.0).collect();
        radii.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        radii.dedup_by(|a, b| a == b);
        if radii.len() < 3 {
            return Err(Error::InsufficientData(format!(
                "component {} covers {} distinct radii, need at least 3",
                comp.label,
                radii.len()
            )));
        }
        let r_mid = (radii[0] + radii[radii.len() - 1]) * c::<T>(0.5);
        let rate = comp.class.rate(alpha);
        for (d, samples) in comp.samples.iter().enumerate().take(order + 1) {
            let mut envelope = T::zero();
            let mut early = T::zero();
            let mut late = T::zero();
            let mut finite = true;
            for &(r, dev) in samples {
                let scaled = dev.abs() * (rate * r).exp();
                // Float max ignores NaN, so track finiteness explicitly.
                finite = finite && scaled.is_finite();
                envelope = envelope.max(scaled);
                if r <= r_mid {
                    early = early.max(scaled);
                } else {
                    late = late.max(scaled);
                }
            }
            let slack = c::<T>(1.5) * early + c::<T>(1e-12) * (T::one() + early);
            let ok = finite && late <= slack;
            pass = pass && ok;
            fits.push(ComponentFit {
                label: comp.label.clone(),
                order: d,
                rate,
                envelope,
                early,
                late,
                pass: ok,
            });
        }
    }
    Ok(DecayReport {
        alpha,
        order,
        fits,
        pass,
    })
}

/// Builds angular deviation samples `p_i^2 - f_k^2(r + r0)` (and radial
/// derivatives up to `order <= 2`) of a warped product against a
/// reference end, ready for [`verify_alh_decay`]. Purely radial metrics
/// have no mixed components, so none are emitted.
pub fn deviation_from_reference<T: Scalar>(
    spec: &WarpedProductSpec<T>,
    reference: &ReferenceHyperbolic<T>,
    radii: &[T],
    order: usize,
) -> Result<Vec<ComponentDeviation<T>>> {
    if order > 2 {
        return Err(Error::InvalidParameter(format!(
            "profiles carry two derivatives, cannot sample order {order}"
        )));
    }
    let f = reference.warping();
    let mut out = Vec::new();
    for (i, p) in spec.warpings().iter().enumerate() {
        let mut samples = vec![Vec::with_capacity(radii.len()); order + 1];
        for &r in radii {
            let (pv, fv) = (p.eval(r)?, f.eval(r)?);
            samples[0].push((r, pv * pv - fv * fv));
            if order >= 1 {
                let (p1, f1) = (p.d1(r)?, f.d1(r)?);
                let two = c::<T>(2.0);
                samples[1].push((r, two * (pv * p1 - fv * f1)));
                if order >= 2 {
                    let (p2, f2) = (p.d2(r)?, f.d2(r)?);
                    samples[2].push((r, two * (p1 * p1 + pv * p2 - f1 * f1 - fv * f2)));
                }
            }
        }
        out.push(ComponentDeviation {
            label: format!("angular[{i}]"),
            class: ComponentClass::Angular,
            samples,
        });
    }
    Ok(out)
}
