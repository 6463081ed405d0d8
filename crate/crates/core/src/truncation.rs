//! Truncation of the identity and the energy primitives built on it.
//!
//! The regularized model replaces the raw density u by a(u), a C² clamp of
//! the identity onto [-1, m+1]: a(u) = -1 for u <= -1, a(u) = u on [0, m],
//! a(u) = m+1 for u >= m+2, with C² polynomial bridges on (-1, 0) and
//! (m, m+2). The bridges are chosen so that a is nondecreasing and the
//! derivative bounds 0 <= a' <= 23/16 and |a''| <= 115/32 hold independently
//! of m.
//!
//! On top of a(u) sit the primitives used by the energy diagnostics:
//! g'(r) = ln(a(r)+1) for s = 1 and a(r)^(s-1)/(s-1) for s > 1, its
//! antiderivative g with g(0) = 0, and the shifted variant
//! g_j'(r) = (a(r) + 1/j)^(s-1)/(s-1) for s in (1,2).

use crate::error::{Error, Result};
use crate::scalar::{cst, Real};

/// Truncation level for the clamp of the identity.
///
/// `Level(m)` clamps onto [-1, m+1] with bridges on (-1,0) and (m, m+2).
/// `Untruncated` keeps a(u) = u for all u >= 0 (same lower bridge), so the
/// solver can run the original, unregularized model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Truncation {
    Level(u32),
    Untruncated,
}

impl Truncation {
    /// Truncation at level m; rejects m = 0.
    pub fn level(m: u32) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidParam("truncation level m must be >= 1".into()));
        }
        Ok(Truncation::Level(m))
    }

    /// Supremum of a over all inputs: m + 1, or None when untruncated.
    pub fn saturation<R: Real>(self) -> Option<R> {
        match self {
            Truncation::Level(m) => Some(cst::<R>(m as f64) + R::one()),
            Truncation::Untruncated => None,
        }
    }

    /// Upper end of the identity region [0, m]; None when untruncated.
    pub fn identity_end<R: Real>(self) -> Option<R> {
        match self {
            Truncation::Level(m) => Some(cst::<R>(m as f64)),
            Truncation::Untruncated => None,
        }
    }

    /// The clamp a(u). Total on reals, C², nondecreasing, |a(u)| <= m+1.
    pub fn eval_a<R: Real>(self, u: R) -> R {
        if u <= -R::one() {
            return -R::one();
        }
        if u < R::zero() {
            return lower_bridge_value(u);
        }
        match self {
            Truncation::Untruncated => u,
            Truncation::Level(m) => {
                let m = cst::<R>(m as f64);
                if u <= m {
                    u
                } else if u >= m + cst(2.0) {
                    m + R::one()
                } else {
                    // t in (0,1); a = m + 2t - 2t^3 + t^4
                    let t = (u - m) * cst(0.5);
                    m + t * (cst::<R>(2.0) + t * t * (-cst::<R>(2.0) + t))
                }
            }
        }
    }

    /// First derivative of the clamp: 1 on [0, m], 0 outside (-1, m+2),
    /// in [0, 23/16] everywhere.
    pub fn eval_a_prime<R: Real>(self, u: R) -> R {
        if u <= -R::one() {
            return R::zero();
        }
        if u < R::zero() {
            return lower_bridge_prime(u);
        }
        match self {
            Truncation::Untruncated => R::one(),
            Truncation::Level(m) => {
                let m = cst::<R>(m as f64);
                if u <= m {
                    R::one()
                } else if u >= m + cst(2.0) {
                    R::zero()
                } else {
                    // psi(t) = 1 - 3t^2 + 2t^3 = (1+2t)(1-t)^2
                    let t = (u - m) * cst(0.5);
                    R::one() + t * t * (-cst::<R>(3.0) + cst::<R>(2.0) * t)
                }
            }
        }
    }

    /// Second derivative of the clamp: zero outside the bridges, bounded by
    /// 115/32 < 3.75 independently of m.
    pub fn eval_a_second<R: Real>(self, u: R) -> R {
        if u <= -R::one() {
            return R::zero();
        }
        if u < R::zero() {
            return lower_bridge_second(u);
        }
        match self {
            Truncation::Untruncated => R::zero(),
            Truncation::Level(m) => {
                let m = cst::<R>(m as f64);
                if u <= m || u >= m + cst(2.0) {
                    R::zero()
                } else {
                    // psi'(t)/2 = 3t^2 - 3t
                    let t = (u - m) * cst(0.5);
                    cst::<R>(3.0) * t * (t - R::one())
                }
            }
        }
    }
}

// Lower bridge on (-1, 0). The derivative profile climbs from 0 to the peak
// 23/16 at u = -1/2 and descends to 1 at u = 0. Split at the peak:
//
// rise, u in (-1, -1/2], sigma = 2u + 2 in (0, 1]:
//   a'  = (115/64) sigma - (23/128) ((2 sigma - 1)^5 + 1)
//   a'' = (115/32) (1 - (2 sigma - 1)^4)
//   a   = -1 + (115/256) sigma^2 - (23/256) sigma - (23/3072) ((2 sigma - 1)^6 - 1)
//
// descent, u in (-1/2, 0), tau = 2u + 1 in (0, 1):
//   a'  = 23/16 - (5/8) tau^3 - (15/16) tau^4 + (9/8) tau^5
//   a'' = -tau^2 (15/4 + (15/2) tau - (45/4) tau^2)
//   a   = -41/64 + (23/32) tau - (5/64) tau^4 - (3/32) tau^5 + (3/32) tau^6
//
// Both pieces meet with matching value, first and second derivative at
// u = -1/2, and match the constant piece at u = -1 and the identity at u = 0
// up to second order. a' integrates to exactly 1 across the bridge, so
// a(0) = 0.

fn lower_bridge_value<R: Real>(u: R) -> R {
    let half = cst::<R>(0.5);
    if u <= -half {
        let s = cst::<R>(2.0) * u + cst(2.0);
        let w = cst::<R>(2.0) * s - R::one();
        let w6 = w * w * w * w * w * w;
        -R::one() + cst::<R>(115.0 / 256.0) * s * s
            - cst::<R>(23.0 / 256.0) * s
            - cst::<R>(23.0 / 3072.0) * (w6 - R::one())
    } else {
        let t = cst::<R>(2.0) * u + R::one();
        let t3 = t * t * t;
        cst::<R>(-41.0 / 64.0) + cst::<R>(23.0 / 32.0) * t
            + t3 * t * (-cst::<R>(5.0 / 64.0) + t * (-cst::<R>(3.0 / 32.0) + t * cst(3.0 / 32.0)))
    }
}

fn lower_bridge_prime<R: Real>(u: R) -> R {
    let half = cst::<R>(0.5);
    if u <= -half {
        let s = cst::<R>(2.0) * u + cst(2.0);
        let w = cst::<R>(2.0) * s - R::one();
        let w5 = w * w * w * w * w;
        cst::<R>(115.0 / 64.0) * s - cst::<R>(23.0 / 128.0) * (w5 + R::one())
    } else {
        let t = cst::<R>(2.0) * u + R::one();
        let t3 = t * t * t;
        cst::<R>(23.0 / 16.0)
            - t3 * (cst::<R>(5.0 / 8.0) + t * (cst::<R>(15.0 / 16.0) - t * cst(9.0 / 8.0)))
    }
}

fn lower_bridge_second<R: Real>(u: R) -> R {
    let half = cst::<R>(0.5);
    if u <= -half {
        let s = cst::<R>(2.0) * u + cst(2.0);
        let w = cst::<R>(2.0) * s - R::one();
        let w4 = w * w * w * w;
        cst::<R>(115.0 / 32.0) * (R::one() - w4)
    } else {
        let t = cst::<R>(2.0) * u + R::one();
        -t * t * (cst::<R>(15.0 / 4.0) + t * (cst::<R>(15.0 / 2.0) - t * cst(45.0 / 4.0)))
    }
}

/// g'(r): ln(a(r)+1) for s = 1, a(r)^(s-1)/(s-1) for s > 1.
///
/// Rejects r < 0 and s < 1.
pub fn eval_g_prime<R: Real>(r: R, s: R, trunc: Truncation) -> Result<R> {
    check_g_domain(r, s)?;
    let a = trunc.eval_a(r);
    if s == R::one() {
        Ok((a + R::one()).ln())
    } else {
        Ok(a.powf(s - R::one()) / (s - R::one()))
    }
}

/// Shifted derivative (a(r) + 1/j)^(s-1)/(s-1); requires s in (1,2), j >= 1.
///
/// Converges pointwise to eval_g_prime as j grows.
pub fn eval_g_j_prime<R: Real>(r: R, s: R, j: u64, trunc: Truncation) -> Result<R> {
    if !(r >= R::zero()) {
        return Err(Error::InvalidParam("g_j' requires r >= 0".into()));
    }
    if !(s > R::one() && s < cst(2.0)) {
        return Err(Error::InvalidParam("g_j' requires s in (1, 2)".into()));
    }
    if j == 0 {
        return Err(Error::InvalidParam("g_j' requires j >= 1".into()));
    }
    let a = trunc.eval_a(r);
    let shift = R::one() / cst::<R>(j as f64);
    Ok((a + shift).powf(s - R::one()) / (s - R::one()))
}

/// g(r) = integral of g' from 0 to r, with g(0) = 0.
///
/// Closed form on the identity region ((r+1)ln(r+1) - r for s = 1,
/// r^s / (s(s-1)) for s > 1); adaptive Gauss quadrature across the bridge,
/// analytic continuation on the saturated tail.
pub fn eval_g<R: Real>(r: R, s: R, trunc: Truncation) -> Result<R> {
    check_g_domain(r, s)?;
    let closed = |x: R| -> R {
        if s == R::one() {
            (x + R::one()) * (x + R::one()).ln() - x
        } else {
            x.powf(s) / (s * (s - R::one()))
        }
    };
    let m = match trunc {
        Truncation::Untruncated => return Ok(closed(r)),
        Truncation::Level(m) => cst::<R>(m as f64),
    };
    if r <= m {
        return Ok(closed(r));
    }
    let bridge_end = m + cst(2.0);
    let upper = r.min(bridge_end);
    let integrand = |x: R| -> R {
        let a = trunc.eval_a(x);
        if s == R::one() {
            (a + R::one()).ln()
        } else {
            a.powf(s - R::one()) / (s - R::one())
        }
    };
    let mut g = closed(m) + quadrature::adaptive_gauss(&integrand, m, upper, cst(1e-10));
    if r > bridge_end {
        let g_sat = if s == R::one() {
            (m + cst::<R>(2.0)).ln()
        } else {
            (m + R::one()).powf(s - R::one()) / (s - R::one())
        };
        g += (r - bridge_end) * g_sat;
    }
    Ok(g)
}

fn check_g_domain<R: Real>(r: R, s: R) -> Result<()> {
    if !(r >= R::zero()) {
        return Err(Error::InvalidParam("g requires r >= 0".into()));
    }
    if !(s >= R::one()) {
        return Err(Error::InvalidParam("g requires s >= 1".into()));
    }
    Ok(())
}

/// Both sides of the elementary power-gap inequality
/// |w2^s - w1^s| <= s (w2 + w1)^(s-1) |w2 - w1| for w1, w2 >= 0, s >= 1.
///
/// Returns (lhs, rhs).
pub fn power_gap<R: Real>(w1: R, w2: R, s: R) -> (R, R) {
    debug_assert!(w1 >= R::zero() && w2 >= R::zero() && s >= R::one());
    let lhs = (w2.powf(s) - w1.powf(s)).abs();
    let rhs = s * (w2 + w1).powf(s - R::one()) * (w2 - w1).abs();
    (lhs, rhs)
}

mod quadrature {
    //! Adaptive 7-point Gauss-Legendre quadrature on [a, b].

    use crate::scalar::{cst, Real};

    const NODES: [f64; 7] = [
        -0.949_107_912_342_758_5,
        -0.741_531_185_599_394_4,
        -0.405_845_151_377_397_2,
        0.0,
        0.405_845_151_377_397_2,
        0.741_531_185_599_394_4,
        0.949_107_912_342_758_5,
    ];
    const WEIGHTS: [f64; 7] = [
        0.129_484_966_168_869_7,
        0.279_705_391_489_276_7,
        0.381_830_050_505_118_9,
        0.417_959_183_673_469_4,
        0.381_830_050_505_118_9,
        0.279_705_391_489_276_7,
        0.129_484_966_168_869_7,
    ];

    fn gauss7<R: Real>(f: &impl Fn(R) -> R, a: R, b: R) -> R {
        let half = cst::<R>(0.5);
        let mid = (a + b) * half;
        let scale = (b - a) * half;
        let mut acc = R::zero();
        for (x, w) in NODES.iter().zip(WEIGHTS.iter()) {
            acc += cst::<R>(*w) * f(mid + scale * cst(*x));
        }
        acc * scale
    }

    /// Bisect until one panel and its two halves agree to tol.
    pub fn adaptive_gauss<R: Real>(f: &impl Fn(R) -> R, a: R, b: R, tol: R) -> R {
        fn recurse<R: Real>(f: &impl Fn(R) -> R, a: R, b: R, whole: R, tol: R, depth: u32) -> R {
            let mid = (a + b) * cst(0.5);
            let left = gauss7(f, a, mid);
            let right = gauss7(f, mid, b);
            let err = (left + right - whole).abs();
            if err <= tol || depth >= 48 {
                return left + right;
            }
            let half_tol = tol * cst(0.5);
            recurse(f, a, mid, left, half_tol, depth + 1)
                + recurse(f, mid, b, right, half_tol, depth + 1)
        }
        if a == b {
            return R::zero();
        }
        recurse(f, a, b, gauss7(f, a, b), tol, 0)
    }
}
