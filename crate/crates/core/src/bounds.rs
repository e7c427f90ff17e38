//! Regret lower bound and upper-bound orders.
//!
//! The lower bound is `C * g(k, alpha, sigma) * alpha * sigma`, where `g` is
//! the stationary probability that the two best of `k` arms are within
//! `alpha * sigma` of each other:
//!
//! ```text
//! g = k (k - 1) * int_0^{alpha sigma} int_{-R}^{R} F(x)^(k-2) f(x) f(x + z) dx dz
//! ```
//!
//! with `f`, `F` the stationary density and CDF (`f = 0` outside `[-R, R]`).
//! The upper bounds are orders with the hidden constants folded into one
//! user-supplied `C`.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::env::{ArParams, Stationary};
use crate::error::{Error, Result};
use crate::policies::{ar2_c0, default_epoch_len};
use crate::quadrature::GaussLegendre;

/// Node counts of the tensor-product Gauss–Legendre rule for `g`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub outer_nodes: usize,
    pub inner_nodes: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            outer_nodes: 256,
            inner_nodes: 256,
        }
    }
}

impl QuadratureSpec {
    pub fn square(n: usize) -> Self {
        Self {
            outer_nodes: n,
            inner_nodes: n,
        }
    }
}

/// Probability that the top two of `k` stationary arms are within
/// `alpha * sigma`.
///
/// The inner integral runs over the support of `f(x) f(x + z)`, cut to the
/// region where the density exceeds `exp(-81)` of its peak so that narrow
/// laws stay resolved.
pub fn lower_bound_g(k: usize, params: &ArParams, quad: QuadratureSpec) -> Result<f64> {
    if k < 2 {
        return Err(Error::Domain("the lower bound needs k >= 2"));
    }
    let outer = GaussLegendre::new(quad.outer_nodes)?;
    let inner = GaussLegendre::new(quad.inner_nodes)?;
    let st = Stationary::new(*params);
    let r = params.boundary();
    let z_max = (params.alpha() * params.sigma()).min(2.0 * r);
    let power = (k - 2) as i32;

    let reach = (9.0 / params.lambda()).min(r);
    let z_max = z_max.min(2.0 * reach);
    let total = outer.integrate(0.0, z_max, |z| {
        inner.integrate(-reach, reach - z, |x| {
            let fx = st.pdf(x);
            let head = if power == 0 {
                1.0
            } else {
                libm::pow(st.cdf(x), power as f64)
            };
            head * fx * st.pdf(x + z)
        })
    });
    let kf = k as f64;
    Ok((kf * (kf - 1.0) * total).clamp(0.0, 1.0))
}

/// `C * g * alpha * sigma`.
pub fn lower_bound(k: usize, params: &ArParams, c: f64, quad: QuadratureSpec) -> Result<f64> {
    Ok(c * lower_bound_g(k, params, quad)? * params.alpha() * params.sigma())
}

/// Naive-policy order `C * sqrt(ln(1/(alpha sigma)) + ln k) * alpha sigma / sqrt(1 - alpha^2)`.
pub fn naive_upper_order(k: usize, params: &ArParams, c: f64) -> f64 {
    let (a, s) = (params.alpha(), params.sigma());
    let a_s = a * s;
    c * libm::sqrt(libm::log(1.0 / a_s) + libm::log(k as f64)) * a_s / libm::sqrt(1.0 - a * a)
}

/// AR2 order `C * c0^2 alpha^2 sigma^2 k^3 |ln(c0 alpha sigma sqrt(k))|`.
///
/// `epoch_len = None` uses `ceil(k / (alpha sigma)^3)`.
pub fn ar2_upper_order(
    k: usize,
    params: &ArParams,
    epoch_len: Option<usize>,
    c: f64,
) -> Result<f64> {
    let (a, s) = (params.alpha(), params.sigma());
    let epoch = epoch_len.unwrap_or_else(|| default_epoch_len(k, a, s));
    let c0 = ar2_c0(a, s, epoch, k)?;
    let a_s = a * s;
    let kf = k as f64;
    Ok(c * c0 * c0 * a_s * a_s * kf * kf * kf * libm::log(c0 * a_s * libm::sqrt(kf)).abs())
}

/// Largest arm count `floor((ln(1/8) / ln(alpha) + 1) / 2)` covered by the
/// AR2 guarantee.
pub fn k_threshold(alpha: f64) -> Result<usize> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::param("alpha", alpha, "must lie in (0, 1)"));
    }
    // log2 keeps log_alpha(1/8) exact at alpha = 1/2.
    let ratio = -3.0 / libm::log2(alpha);
    Ok(libm::floor(0.5 * (ratio + 1.0)) as usize)
}

/// One row of a bound curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundCurvePoint {
    pub alpha: f64,
    pub sigma: f64,
    pub k: usize,
    pub lower: f64,
    pub naive_upper: f64,
    pub ar2_upper: f64,
    pub c: f64,
}

pub fn bound_point(
    k: usize,
    params: &ArParams,
    c: f64,
    quad: QuadratureSpec,
) -> Result<BoundCurvePoint> {
    Ok(BoundCurvePoint {
        alpha: params.alpha(),
        sigma: params.sigma(),
        k,
        lower: lower_bound(k, params, c, quad)?,
        naive_upper: naive_upper_order(k, params, c),
        ar2_upper: ar2_upper_order(k, params, None, c)?,
        c,
    })
}

/// Evaluates [`bound_point`] over a list of parameter sets.
pub fn bound_curve(
    k: usize,
    grid: &[ArParams],
    c: f64,
    quad: QuadratureSpec,
) -> Result<Vec<BoundCurvePoint>> {
    grid.iter().map(|p| bound_point(k, p, c, quad)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(alpha: f64, sigma: f64) -> ArParams {
        ArParams::new(alpha, sigma, 1.0).unwrap()
    }

    #[test]
    fn k_threshold_values() {
        assert_eq!(k_threshold(0.95).unwrap(), 20);
        assert_eq!(k_threshold(0.5).unwrap(), 2);
        let mut prev = 0;
        for i in 1..100 {
            let k = k_threshold(i as f64 / 100.0).unwrap();
            assert!(k >= prev);
            prev = k;
        }
        assert!(k_threshold(1.0).is_err());
    }

    #[test]
    fn g_is_a_probability() {
        let q = QuadratureSpec::square(64);
        for k in [2, 3, 5, 8] {
            for s in [0.05, 0.1, 0.2, 0.4, 0.6, 0.8, 0.95] {
                let g = lower_bound_g(k, &p(0.7, s), q).unwrap();
                assert!((0.0..=1.0).contains(&g), "k={k} sigma={s}");
            }
        }
        assert!(lower_bound_g(1, &p(0.5, 0.5), q).is_err());
    }

    #[test]
    fn g_k2_untruncated_limit() {
        // When the band never binds, X - Y ~ N(0, (alpha sigma)^2 / (1 - alpha)),
        // so g = P(|X - Y| <= alpha sigma) = erf(sqrt((1 - alpha) / 2)).
        for a in [0.3, 0.7, 0.9] {
            let g = lower_bound_g(2, &p(a, 0.02), QuadratureSpec::default()).unwrap();
            let want = libm::erf(libm::sqrt((1.0 - a) / 2.0));
            assert!((g - want).abs() < 1e-9, "alpha={a}: {g} vs {want}");
        }
    }

    #[test]
    fn g_k2_matches_direct_double_integral() {
        // For k = 2, g = 2 P(X - Y in [0, alpha sigma]) = P(|X - Y| <= alpha sigma).
        // Independent route: adaptive Simpson on the CDF difference,
        // int f(x) [F(x + a s) - F(x - a s)] dx.
        use crate::quadrature::adaptive_simpson;
        let q = p(0.9, 0.8);
        let st = Stationary::new(q);
        let d = 0.72;
        let direct = adaptive_simpson(
            &|x| st.pdf(x) * (st.cdf(x + d) - st.cdf(x - d)),
            -1.0,
            1.0,
            1e-13,
        );
        let g = lower_bound_g(2, &q, QuadratureSpec::default()).unwrap();
        assert!((g - direct).abs() < 1e-9, "{g} vs {direct}");
    }

    #[test]
    fn lower_bound_scales_with_c() {
        let q = p(0.8, 0.3);
        let spec = QuadratureSpec::square(48);
        assert_eq!(lower_bound(4, &q, 0.0, spec).unwrap(), 0.0);
        let a = lower_bound(4, &q, 0.4, spec).unwrap();
        let b = lower_bound(4, &q, 0.8, spec).unwrap();
        assert!((b - 2.0 * a).abs() < 1e-15);
    }

    #[test]
    fn naive_order_shape() {
        assert!(
            naive_upper_order(5, &p(0.999, 0.2), 1.0) > naive_upper_order(5, &p(0.99, 0.2), 1.0)
        );
        assert!(naive_upper_order(5, &p(1e-6, 0.2), 1.0) < 1e-5);
        let q = p(0.6, 0.3);
        assert_eq!(
            naive_upper_order(3, &q, 0.8),
            2.0 * naive_upper_order(3, &q, 0.4)
        );
    }

    #[test]
    fn ar2_order_shape() {
        for a in [0.5, 0.7, 0.9, 0.99] {
            let v = ar2_upper_order(5, &p(a, 0.2), None, 1.0).unwrap();
            assert!(v.is_finite() && v > 0.0);
        }
        let lo = ar2_upper_order(3, &p(0.9, 0.2), None, 1.0).unwrap();
        let hi = ar2_upper_order(4, &p(0.9, 0.2), None, 1.0).unwrap();
        assert!(hi > lo);
    }
}
