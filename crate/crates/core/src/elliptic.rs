//! Complete elliptic integrals via the arithmetic–geometric mean, the
//! singular modulus `λ*(r)`, the elliptic alpha function and a
//! Gauss–Legendre reference value of π.
//!
//! Everything here works on MPFR floats at the context's working precision
//! and wraps results in [`PrecReal`] at the boundary.

use std::fmt;
use std::str::FromStr;

use rug::ops::Pow;
use rug::Float;

use crate::error::{Error, Result};
use crate::precision::{pow10, BigRational, PrecReal, PrecisionContext};

const MAX_AGM_STEPS: usize = 4096;

/// Elliptic modulus `k` with `0 <= k < 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct Modulus(PrecReal);

impl Modulus {
    pub fn new(k: PrecReal) -> Result<Self> {
        if k.is_negative() || *k.value() >= 1 {
            return Err(Error::Domain(format!(
                "modulus must satisfy 0 <= k < 1, got {}",
                k.to_sci_string(8)
            )));
        }
        Ok(Self(k))
    }

    pub fn k(&self) -> &PrecReal {
        &self.0
    }

    pub fn into_inner(self) -> PrecReal {
        self.0
    }

    /// `k' = sqrt(1 - k^2)`.
    pub fn complementary(&self, ctx: &PrecisionContext) -> PrecReal {
        PrecReal::from_float(complement(self.0.value(), ctx.bits()), ctx)
    }
}

/// The `r` of `λ*(r)`: a positive rational, usually an integer.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SingularValueIndex(BigRational);

impl SingularValueIndex {
    pub fn new(r: BigRational) -> Result<Self> {
        if r <= 0 {
            return Err(Error::Domain(format!(
                "singular value index must be positive, got {r}"
            )));
        }
        Ok(Self(r))
    }

    pub fn integer(r: u64) -> Self {
        Self::new(BigRational::from(r)).expect("positive integer index")
    }

    pub fn value(&self) -> &BigRational {
        &self.0
    }

    pub fn sqrt(&self, bits: u32) -> Float {
        Float::with_val(bits, &self.0).sqrt()
    }

    pub(crate) fn require_at_least_one(&self) -> Result<()> {
        if self.0 < 1 {
            return Err(Error::Domain(format!(
                "r = {} < 1 is unsupported; use λ*(1/r) = sqrt(1 - λ*(r)^2)",
                self.0
            )));
        }
        Ok(())
    }
}

impl fmt::Display for SingularValueIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl FromStr for SingularValueIndex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let q = BigRational::from_str(s.trim())
            .map_err(|e| Error::Parse(format!("singular value index {s:?}: {e}")))?;
        Self::new(q)
    }
}

/// Route used to solve `K'/K(k) = sqrt(r)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum LambdaMethod {
    /// `k = (θ2(q)/θ3(q))^2` at the nome `q = exp(-π sqrt(r))`.
    #[default]
    Theta,
    /// Bisection of the AGM ratio in log-scaled `k`.
    AgmBisect,
}

impl FromStr for LambdaMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "theta" => Ok(Self::Theta),
            "bisect" | "agm-bisect" => Ok(Self::AgmBisect),
            _ => Err(Error::Parse(format!("unknown lambda method {s:?}"))),
        }
    }
}

fn complement(k: &Float, bits: u32) -> Float {
    let k2 = Float::with_val(bits, k.square_ref());
    Float::with_val(bits, 1 - k2).sqrt()
}

fn converged(a: &Float, b: &Float, bits: u32) -> bool {
    let diff = Float::with_val(bits, a - b).abs();
    let scale = Float::with_val(bits, a.abs_ref()) >> (bits as i32 - 4);
    diff <= scale
}

pub(crate) fn agm_float(a: &Float, b: &Float, bits: u32) -> Float {
    let mut a = Float::with_val(bits, a);
    let mut b = Float::with_val(bits, b);
    for _ in 0..MAX_AGM_STEPS {
        if converged(&a, &b, bits) {
            break;
        }
        let next = Float::with_val(bits, &a + &b) / 2u32;
        b = Float::with_val(bits, &a * &b).sqrt();
        a = next;
    }
    Float::with_val(bits, &a + &b) / 2u32
}

/// Arithmetic–geometric mean of two positive reals.
pub fn agm(a: &PrecReal, b: &PrecReal, ctx: &PrecisionContext) -> Result<PrecReal> {
    if a.is_negative() || a.is_zero() || b.is_negative() || b.is_zero() {
        return Err(Error::Domain("agm requires positive arguments".into()));
    }
    Ok(PrecReal::from_float(
        agm_float(a.value(), b.value(), ctx.bits()),
        ctx,
    ))
}

pub(crate) fn pi_float(bits: u32) -> Float {
    let wp = bits + 32;
    let mut a = Float::with_val(wp, 1);
    let mut b = Float::with_val(wp, 2).sqrt().recip();
    let mut t = Float::with_val(wp, 0.25);
    let mut weight = Float::with_val(wp, 1);
    let eps = Float::with_val(wp, 1) >> wp as i32;
    for _ in 0..64 {
        if Float::with_val(wp, &a - &b).abs() <= eps {
            break;
        }
        let next = Float::with_val(wp, &a + &b) / 2u32;
        b = Float::with_val(wp, &a * &b).sqrt();
        let d = Float::with_val(wp, &a - &next);
        t -= Float::with_val(wp, d.square_ref()) * &weight;
        weight *= 2u32;
        a = next;
    }
    let s = Float::with_val(wp, &a + &b);
    let pi = Float::with_val(wp, s.square_ref()) / (t * 4u32);
    Float::with_val(bits, &pi)
}

/// π by the Gauss–Legendre (Brent–Salamin) iteration, independent of every
/// series evaluated elsewhere in the crate.
pub fn pi_reference(ctx: &PrecisionContext) -> PrecReal {
    PrecReal::from_float(pi_float(ctx.bits()), ctx)
}

pub(crate) fn k_e_float(k: &Float, bits: u32) -> (Float, Float) {
    let wp = bits + 16;
    let mut a = Float::with_val(wp, 1);
    let mut b = complement(k, wp);
    let mut weight = Float::with_val(wp, 0.5);
    let mut sum = Float::with_val(wp, k.square_ref()) / 2u32;
    let eps = Float::with_val(wp, 1) >> (wp as i32 + 4);
    for _ in 0..MAX_AGM_STEPS {
        let c = Float::with_val(wp, &a - &b) / 2u32;
        if c.is_zero() {
            break;
        }
        let next = Float::with_val(wp, &a + &b) / 2u32;
        b = Float::with_val(wp, &a * &b).sqrt();
        a = next;
        weight *= 2u32;
        let term = Float::with_val(wp, c.square_ref()) * &weight;
        let small = term <= eps;
        sum += term;
        if small && converged(&a, &b, wp) {
            break;
        }
    }
    let mean = Float::with_val(wp, &a + &b) / 2u32;
    let big_k = pi_float(wp) / (mean * 2u32);
    let big_e = Float::with_val(wp, &big_k * Float::with_val(wp, 1 - &sum));
    (Float::with_val(bits, &big_k), Float::with_val(bits, &big_e))
}

/// Complete elliptic integrals `(K(k), E(k))`.
pub fn ellip_k_e(k: &Modulus, ctx: &PrecisionContext) -> Result<(PrecReal, PrecReal)> {
    let (big_k, big_e) = k_e_float(k.k().value(), ctx.bits());
    Ok((
        PrecReal::from_float(big_k, ctx),
        PrecReal::from_float(big_e, ctx),
    ))
}

pub(crate) fn ratio_float(k: &Float, bits: u32) -> Float {
    let one = Float::with_val(bits, 1);
    let kp = complement(k, bits);
    agm_float(&one, &kp, bits) / agm_float(&one, k, bits)
}

/// `K(k')/K(k)`, computed as `agm(1, k')/agm(1, k)`.
pub fn ratio_kprime_over_k(k: &Modulus, ctx: &PrecisionContext) -> Result<PrecReal> {
    if k.k().is_zero() {
        return Err(Error::Domain("K'/K is unbounded at k = 0".into()));
    }
    Ok(PrecReal::from_float(
        ratio_float(k.k().value(), ctx.bits()),
        ctx,
    ))
}

fn lambda_theta(r: &SingularValueIndex, ctx: &PrecisionContext) -> Float {
    let bits = ctx.bits() + 32;
    let tol = pow10(-(ctx.digits() as i64 + 20), bits);
    let quarter_log = pi_float(bits) * r.sqrt(bits) / 4u32;
    let q4 = Float::with_val(bits, -quarter_log).exp();
    let q = Float::with_val(bits, q4.clone().pow(4u32));
    let q2 = Float::with_val(bits, q.square_ref());

    // θ3(q) = 1 + 2 Σ_{n>=1} q^(n²)
    let mut sum3 = Float::with_val(bits, 0);
    let mut v = q.clone();
    let mut step = Float::with_val(bits, &q2 * &q);
    loop {
        sum3 += &v;
        if v < tol {
            break;
        }
        v *= &step;
        step *= &q2;
    }

    // θ2(q) = 2 q^(1/4) Σ_{n>=0} q^(n(n+1))
    let mut sum2 = Float::with_val(bits, 0);
    let mut u = Float::with_val(bits, 1);
    let mut step = q2.clone();
    loop {
        sum2 += &u;
        if u < tol {
            break;
        }
        u *= &step;
        step *= &q2;
    }

    let theta2 = q4 * sum2 * 2u32;
    let theta3 = sum3 * 2u32 + 1u32;
    let ratio = theta2 / theta3;
    Float::with_val(ctx.bits(), ratio.square_ref())
}

fn lambda_bisect(r: &SingularValueIndex, ctx: &PrecisionContext) -> Result<Float> {
    let full = ctx.bits();
    let target = r.sqrt(full);
    let mut hi = Float::with_val(full, 2).sqrt().recip();
    let mut lo = Float::with_val(full, 1) >> 4;
    while ratio_float(&lo, full) <= target {
        lo.square_mut();
        if lo.is_zero() || !lo.is_normal() {
            return Err(Error::Range(format!("no lower bracket for λ*({r})")));
        }
    }
    let stop = pow10(-(ctx.digits() as i64 + 10), full);
    let slack = target.get_exp().unwrap_or(0).max(0) as u32 + 64;
    loop {
        let mid = Float::with_val(full, &lo * &hi).sqrt();
        let width = Float::with_val(full, &hi - &lo);
        let rel = Float::with_val(full, &width / &mid);
        if rel < stop {
            return Ok(mid);
        }
        // only enough bits to resolve the current bracket
        let needed = (-rel.get_exp().unwrap_or(0)).max(0) as u32 + slack;
        let bits = needed.min(full);
        let value = ratio_float(&Float::with_val(bits, &mid), bits);
        if value > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

/// The singular modulus `λ*(r)`: the `k` in (0, 1) with `K'/K(k) = sqrt(r)`.
pub fn lambda_star(
    r: &SingularValueIndex,
    method: LambdaMethod,
    ctx: &PrecisionContext,
) -> Result<Modulus> {
    r.require_at_least_one()?;
    let k = match method {
        LambdaMethod::Theta => lambda_theta(r, ctx),
        LambdaMethod::AgmBisect => lambda_bisect(r, ctx)?,
    };
    Modulus::new(PrecReal::from_float(k, ctx))
}

/// `α(r) = π/(4K²) - sqrt(r) (E/K - 1)` evaluated at a given modulus, which
/// must be `λ*(r)` for the result to be meaningful.
pub fn elliptic_alpha_at(r: &SingularValueIndex, k: &Modulus, ctx: &PrecisionContext) -> PrecReal {
    let bits = ctx.bits() + 16;
    let (big_k, big_e) = k_e_float(k.k().value(), bits);
    let pi = pi_float(bits);
    let first = pi / (Float::with_val(bits, big_k.square_ref()) * 4u32);
    let ratio = Float::with_val(bits, &big_e / &big_k) - 1u32;
    let alpha = first - r.sqrt(bits) * ratio;
    PrecReal::from_float(alpha, ctx)
}

/// The elliptic alpha function `α(r)`, with `λ*(r)` from the theta route.
pub fn elliptic_alpha(r: &SingularValueIndex, ctx: &PrecisionContext) -> Result<PrecReal> {
    let k = lambda_star(r, LambdaMethod::Theta, ctx)?;
    Ok(elliptic_alpha_at(r, &k, ctx))
}

/// `|E K' + E' K - K K' - π/2|` for a modulus in (0, 1).
pub fn legendre_residual(k: &Modulus, ctx: &PrecisionContext) -> Result<PrecReal> {
    let bits = ctx.bits();
    let kp = Modulus::new(k.complementary(ctx))?;
    let (big_k, big_e) = k_e_float(k.k().value(), bits);
    let (big_kp, big_ep) = k_e_float(kp.k().value(), bits);
    let lhs = Float::with_val(bits, &big_e * &big_kp) + Float::with_val(bits, &big_ep * &big_k)
        - Float::with_val(bits, &big_k * &big_kp);
    let residual = (lhs - pi_float(bits) / 2u32).abs();
    Ok(PrecReal::from_float(residual, ctx))
}
