//! Parameters `(z, a, b)` of level-1 series
//! `1/π = Σ (1/6)_n (1/2)_n (5/6)_n / n!³ · z^n (a + b n)`
//! built from a singular value `r` through `x = 4(k² - k⁴)`, `k = λ*(r)`, and
//! the elliptic alpha function.

use std::fmt;
use std::str::FromStr;

use rug::ops::Pow;
use rug::Float;

use crate::elliptic::{elliptic_alpha_at, lambda_star, LambdaMethod, Modulus, SingularValueIndex};
use crate::error::{Error, Result};
use crate::precision::{pow10, PrecReal, PrecisionContext};

/// Which branch of the level-1 family a parameter set belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    /// `z = 27x²/(4-x)³ > 0`.
    Positive,
    /// `z = -27x/(1-4x)³ < 0`, the analytic continuation.
    Negative,
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Positive => "positive",
            Family::Negative => "negative",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pos" | "positive" => Ok(Family::Positive),
            "neg" | "negative" => Ok(Family::Negative),
            _ => Err(Error::Parse(format!("unknown family {s:?}"))),
        }
    }
}

/// `x = 4k²(1 - k²)`, in `(0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct XParameter(PrecReal);

impl XParameter {
    pub fn new(x: PrecReal) -> Result<Self> {
        if x.is_zero() || x.is_negative() || *x.value() > 1 {
            return Err(Error::Domain(format!(
                "x must lie in (0, 1], got {}",
                x.to_sci_string(8)
            )));
        }
        Ok(Self(x))
    }

    pub fn value(&self) -> &PrecReal {
        &self.0
    }
}

/// A parameter triple for the level-1 series.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesParams {
    pub r: SingularValueIndex,
    pub family: Family,
    pub z: PrecReal,
    pub a: PrecReal,
    pub b: PrecReal,
}

impl SeriesParams {
    /// Wraps explicitly known parameters, e.g. from closed forms or
    /// polynomial roots. Only `|z| < 1` is enforced.
    pub fn new(
        r: SingularValueIndex,
        family: Family,
        z: PrecReal,
        a: PrecReal,
        b: PrecReal,
    ) -> Result<Self> {
        if z.value().clone().abs() >= 1 {
            return Err(Error::Divergent(z.to_sci_string(8)));
        }
        Ok(Self { r, family, z, a, b })
    }
}

/// The `(J, T)` normalization of the positive family: `J = z` and
/// `a = sqrt(1-J) sqrt(r) (1-T)/3`, `b = 2 sqrt(1-J) sqrt(r)`.
#[derive(Clone, Debug, PartialEq)]
pub struct BgNormalization {
    pub j: PrecReal,
    pub t: PrecReal,
}

pub fn x_from_k(k: &Modulus, ctx: &PrecisionContext) -> Result<XParameter> {
    if k.k().is_zero() {
        return Err(Error::Domain("x is undefined at k = 0".into()));
    }
    let bits = ctx.bits();
    let k2 = Float::with_val(bits, k.k().value().square_ref());
    let x = Float::with_val(bits, 1 - &k2) * k2 * 4u32;
    // the analytic maximum is exactly 1, at k² = 1/2
    let x = if x > 1 { Float::with_val(bits, 1) } else { x };
    XParameter::new(PrecReal::from_float(x, ctx))
}

fn inapplicable(family: Family, r: &SingularValueIndex, reason: String) -> Error {
    Error::FamilyInapplicable {
        family: family.name(),
        r: r.to_string(),
        reason,
    }
}

fn check_convergence(
    family: Family,
    r: &SingularValueIndex,
    z: &Float,
    ctx: &PrecisionContext,
) -> Result<()> {
    // |z| indistinguishable from 1 at working precision means no convergence
    let gap = Float::with_val(ctx.bits(), 1 - z.clone().abs());
    if gap <= pow10(-(ctx.digits() as i64), ctx.bits()) {
        return Err(inapplicable(
            family,
            r,
            format!(
                "|z| = {} is not below 1",
                crate::precision::format_scientific(z, 8)
            ),
        ));
    }
    Ok(())
}

/// Positive-family parameters from a given `x` and `α(r)`.
pub fn positive_from_parts(
    r: &SingularValueIndex,
    x: &XParameter,
    alpha: &PrecReal,
    ctx: &PrecisionContext,
) -> Result<SeriesParams> {
    let bits = ctx.bits() + 16;
    let x = Float::with_val(bits, x.value().value());
    let sr = r.sqrt(bits);
    let four_minus = Float::with_val(bits, 4 - &x);
    let cube = Float::with_val(bits, four_minus.clone().square() * &four_minus);
    let z = Float::with_val(bits, x.square_ref()) * 27u32 / &cube;
    check_convergence(Family::Positive, r, &z, ctx)?;

    let root_cube = cube.sqrt();
    let s = Float::with_val(bits, 1 - &x).sqrt();
    let a_num = Float::with_val(bits, &four_minus * alpha.value()) * 2u32
        + (Float::with_val(bits, &x - 4u32) + Float::with_val(bits, &s * 4u32)) * &sr;
    let a = a_num / &root_cube;
    let b = Float::with_val(bits, &x + 8u32) * &s * &sr * 2u32 / &root_cube;
    SeriesParams::new(
        r.clone(),
        Family::Positive,
        PrecReal::from_float(z, ctx),
        PrecReal::from_float(a, ctx),
        PrecReal::from_float(b, ctx),
    )
}

/// Negative-family parameters from a given `x` and `α(r)`.
pub fn negative_from_parts(
    r: &SingularValueIndex,
    x: &XParameter,
    alpha: &PrecReal,
    ctx: &PrecisionContext,
) -> Result<SeriesParams> {
    if *r.value() <= 1 {
        return Err(inapplicable(Family::Negative, r, "requires r > 1".into()));
    }
    let bits = ctx.bits() + 16;
    let x = Float::with_val(bits, x.value().value());
    let one_minus: Float = 1 - Float::with_val(bits, &x * 4u32);
    if one_minus <= 0 {
        return Err(inapplicable(
            Family::Negative,
            r,
            format!(
                "x = {} is not below 1/4",
                crate::precision::format_scientific(&x, 8)
            ),
        ));
    }
    let sr = r.sqrt(bits);
    let cube = Float::with_val(bits, one_minus.clone().square() * &one_minus);
    let z = -(Float::with_val(bits, &x * 27u32) / &cube);
    check_convergence(Family::Negative, r, &z, ctx)?;

    let root_cube = cube.sqrt();
    let s = Float::with_val(bits, 1 - &x).sqrt();
    let a_num = Float::with_val(bits, &one_minus * alpha.value()) * 2u32
        + (Float::with_val(bits, &x * 4u32) - 1u32 + &s) * &sr;
    let a = a_num / Float::with_val(bits, &root_cube * 2u32);
    let b = (Float::with_val(bits, &x * 8u32) + 1u32) * &s * &sr / &root_cube;
    SeriesParams::new(
        r.clone(),
        Family::Negative,
        PrecReal::from_float(z, ctx),
        PrecReal::from_float(a, ctx),
        PrecReal::from_float(b, ctx),
    )
}

/// `λ*(r)` (theta route), `x`, and `α(r)` in one pass.
pub fn singular_data(
    r: &SingularValueIndex,
    ctx: &PrecisionContext,
) -> Result<(Modulus, XParameter, PrecReal)> {
    let k = lambda_star(r, LambdaMethod::Theta, ctx)?;
    let x = x_from_k(&k, ctx)?;
    let alpha = elliptic_alpha_at(r, &k, ctx);
    Ok((k, x, alpha))
}

pub fn params_positive(r: &SingularValueIndex, ctx: &PrecisionContext) -> Result<SeriesParams> {
    let (_, x, alpha) = singular_data(r, ctx)?;
    positive_from_parts(r, &x, &alpha, ctx)
}

pub fn params_negative(r: &SingularValueIndex, ctx: &PrecisionContext) -> Result<SeriesParams> {
    let (_, x, alpha) = singular_data(r, ctx)?;
    negative_from_parts(r, &x, &alpha, ctx)
}

/// `J = z`, `T = 1 - 3a/(sqrt(r) sqrt(1-z))` for a positive-family triple.
pub fn bg_j_t(p: &SeriesParams, ctx: &PrecisionContext) -> Result<BgNormalization> {
    if p.family != Family::Positive {
        return Err(Error::InvalidArgument(
            "the J/T normalization applies to the positive family only".into(),
        ));
    }
    let bits = ctx.bits() + 16;
    let root = Float::with_val(bits, 1 - p.z.value()).sqrt() * p.r.sqrt(bits);
    let t = 1 - Float::with_val(bits, p.a.value() * 3u32) / root;
    Ok(BgNormalization {
        j: PrecReal::from_float(Float::with_val(bits, p.z.value()), ctx),
        t: PrecReal::from_float(t, ctx),
    })
}

/// Inverse of [`bg_j_t`]: the `(a, b)` implied by `(J, T)` at index `r`.
pub fn bg_coefficients(
    n: &BgNormalization,
    r: &SingularValueIndex,
    ctx: &PrecisionContext,
) -> (PrecReal, PrecReal) {
    let bits = ctx.bits() + 16;
    let root = Float::with_val(bits, 1 - n.j.value()).sqrt() * r.sqrt(bits);
    let a = Float::with_val(bits, 1 - n.t.value()) * &root / 3u32;
    let b = root * 2u32;
    (PrecReal::from_float(a, ctx), PrecReal::from_float(b, ctx))
}

/// Constant and linear parts of the level-1 coefficient `f_n(N)` written in
/// terms of the class invariant, with `G_N^-24` taken as `x`.
#[derive(Clone, Debug, PartialEq)]
pub struct BorweinCoeffs {
    pub constant: PrecReal,
    pub slope: PrecReal,
}

impl BorweinCoeffs {
    pub fn at(&self, n: u64) -> PrecReal {
        let bits = self.constant.value().prec();
        let v = Float::with_val(bits, self.slope.value() * n) + self.constant.value();
        PrecReal::from_float(v, &self.constant.context())
    }
}

pub fn borwein_parts(big_n: &SingularValueIndex, ctx: &PrecisionContext) -> Result<BorweinCoeffs> {
    let (k, x, alpha) = singular_data(big_n, ctx)?;
    let bits = ctx.bits() + 16;
    let x = Float::with_val(bits, x.value().value());
    let g24 = Float::with_val(bits, x.recip_ref());
    let sn = big_n.sqrt(bits);
    let s = Float::with_val(bits, 1 - &x).sqrt();
    let inv = Float::with_val(bits, 3u32).sqrt() * 3u32;
    let k2 = Float::with_val(bits, k.k().value().square_ref());

    let alpha_part = Float::with_val(bits, alpha.value() - Float::with_val(bits, &sn * &k2));
    let constant = (Float::with_val(bits, &sn * &s)
        + alpha_part * (Float::with_val(bits, &g24 * 4u32) - 1u32) * 2u32)
        / &inv;
    let slope = Float::with_val(bits, &g24 * 8u32) + 1u32;
    let slope = slope * &s * &sn * 2u32 / &inv;
    Ok(BorweinCoeffs {
        constant: PrecReal::from_float(constant, ctx),
        slope: PrecReal::from_float(slope, ctx),
    })
}

/// `f_n(N)`.
pub fn borwein_coeffs(
    big_n: &SingularValueIndex,
    n: u64,
    ctx: &PrecisionContext,
) -> Result<PrecReal> {
    Ok(borwein_parts(big_n, ctx)?.at(n))
}

/// `-log10 |z|`, the asymptotic number of digits gained per term.
pub fn digits_per_term(z: &PrecReal, ctx: &PrecisionContext) -> Result<PrecReal> {
    let mag = Float::with_val(ctx.bits(), z.value().abs_ref());
    if mag.is_zero() || mag >= 1 {
        return Err(Error::Domain(format!(
            "digits per term needs 0 < |z| < 1, got {}",
            z.to_sci_string(8)
        )));
    }
    Ok(PrecReal::from_float(-mag.log10(), ctx))
}

/// `|-27x/(1-4x)³ + 53360⁻³|`, zero exactly when `x` is the Chudnovsky point.
pub fn chudnovsky_fixed_point_residual(x: &PrecReal, ctx: &PrecisionContext) -> PrecReal {
    let bits = ctx.bits() + 16;
    let x = Float::with_val(bits, x.value());
    let one_minus: Float = 1 - Float::with_val(bits, &x * 4u32);
    let cube = Float::with_val(bits, one_minus.clone().square() * &one_minus);
    let z = -(x * 27u32) / cube;
    let target = Float::with_val(bits, 53360u32).pow(3u32);
    let residual = (z + target.recip()).abs();
    PrecReal::from_float(residual, ctx)
}
