//! Arbitrary-precision scalars with a decimal precision contract.
//!
//! A [`PrecisionContext`] asks for `P` decimal digits and carries a small
//! number of guard digits. Every primitive evaluated under a context works
//! with `ceil((P + guard) * log2(10)) + 64` bits of significand, so callers
//! can compare results at tolerance `10^-(P-20)` without further analysis.
//!
//! Exact integers and rationals are GMP-backed ([`BigInt`], [`BigRational`]);
//! reals are MPFR-backed and always rounded to nearest, ties to even.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use rug::float::Round;
use rug::ops::Pow;
use rug::{Assign, Float, Integer, Rational};

use crate::error::{Error, Result};

pub type BigInt = Integer;
pub type BigRational = Rational;

pub const DEFAULT_GUARD: u32 = 10;
pub const MAX_GUARD: u32 = 20;
const EXTRA_BITS: u32 = 64;
const LOG2_10: f64 = std::f64::consts::LOG2_10;
// keeps the significand comfortably below MPFR's precision ceiling
const MAX_DIGITS: u32 = 100_000_000;

/// Requested decimal precision plus fixed guard digits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrecisionContext {
    digits: u32,
    guard: u32,
}

impl PrecisionContext {
    /// Context for `digits` decimal digits with the default guard.
    ///
    /// Panics if `digits` is zero or absurdly large; use [`Self::try_new`]
    /// for untrusted input.
    pub fn new(digits: u32) -> Self {
        Self::try_new(digits, DEFAULT_GUARD).expect("invalid precision")
    }

    pub fn try_new(digits: u32, guard: u32) -> Result<Self> {
        if digits == 0 || digits > MAX_DIGITS {
            return Err(Error::InvalidArgument(format!(
                "precision must be between 1 and {MAX_DIGITS} digits, got {digits}"
            )));
        }
        if guard > MAX_GUARD {
            return Err(Error::InvalidArgument(format!(
                "guard digits must not exceed {MAX_GUARD}, got {guard}"
            )));
        }
        Ok(Self { digits, guard })
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    pub fn guard(&self) -> u32 {
        self.guard
    }

    /// Significand bits used for every value computed under this context.
    pub fn bits(&self) -> u32 {
        ((self.digits + self.guard) as f64 * LOG2_10).ceil() as u32 + EXTRA_BITS
    }

    /// Same guard, different digit count.
    pub fn with_digits(&self, digits: u32) -> Self {
        Self {
            digits: digits.clamp(1, MAX_DIGITS),
            guard: self.guard,
        }
    }

    /// Context with `extra` more digits, used where an algorithm is known to cancel.
    pub fn widened(&self, extra: u32) -> Self {
        self.with_digits(self.digits.saturating_add(extra))
    }

    /// Decimal exponent of the comparison tolerance, i.e. `P - 20`.
    pub fn tolerance_exponent(&self) -> i64 {
        self.digits as i64 - 20
    }

    /// `10^-(P-20)`, the tolerance callers use for equality checks.
    pub fn tolerance(&self) -> Float {
        pow10(-self.tolerance_exponent(), self.bits())
    }

    /// A float at this context's working precision.
    pub fn float<T>(&self, value: T) -> Float
    where
        Float: Assign<T>,
    {
        Float::with_val(self.bits(), value)
    }

    pub fn real<T>(&self, value: T) -> PrecReal
    where
        Float: Assign<T>,
    {
        PrecReal::from_float(self.float(value), self)
    }
}

/// `10^e` at `bits` of precision.
pub fn pow10(e: i64, bits: u32) -> Float {
    let ten = Float::with_val(bits, 10);
    let e = i32::try_from(e).expect("decimal exponent out of range");
    ten.pow(e)
}

/// A real number together with the decimal precision it was computed under.
#[derive(Clone, Debug, PartialEq, PartialOrd)]
pub struct PrecReal {
    value: Float,
    digits: u32,
}

impl PrecReal {
    /// Wraps `value`, rounding it to the context's working precision.
    pub fn from_float(value: Float, ctx: &PrecisionContext) -> Self {
        let mut value = value;
        if value.prec() != ctx.bits() {
            value.set_prec_round(ctx.bits(), Round::Nearest);
        }
        Self {
            value,
            digits: ctx.digits(),
        }
    }

    pub fn from_int(i: i64, ctx: &PrecisionContext) -> Self {
        Self::from_float(ctx.float(i), ctx)
    }

    pub fn from_integer(i: &BigInt, ctx: &PrecisionContext) -> Self {
        Self::from_float(ctx.float(i), ctx)
    }

    pub fn from_rational(q: &BigRational, ctx: &PrecisionContext) -> Self {
        Self::from_float(ctx.float(q), ctx)
    }

    /// Parses `[+-]digits[.digits][e[+-]digits]`.
    pub fn parse(s: &str, ctx: &PrecisionContext) -> Result<Self> {
        let s = s.trim();
        validate_decimal(s)?;
        let parsed = Float::parse(s).map_err(|e| Error::Parse(format!("{s:?}: {e}")))?;
        Ok(Self::from_float(ctx.float(parsed), ctx))
    }

    pub fn value(&self) -> &Float {
        &self.value
    }

    pub fn into_float(self) -> Float {
        self.value
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    /// The context this value was computed under (default guard).
    pub fn context(&self) -> PrecisionContext {
        PrecisionContext::new(self.digits)
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.value.is_sign_negative() && !self.value.is_zero()
    }

    pub fn abs(&self) -> Self {
        Self {
            value: self.value.clone().abs(),
            digits: self.digits,
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.value.to_f64()
    }

    /// Decimal rendering with `min(P, sig)` significant digits.
    pub fn to_decimal_string(&self, sig: usize) -> String {
        format_decimal(&self.value, sig.min(self.digits as usize).max(1))
    }

    /// Scientific rendering with `sig` significant digits, e.g. `1.25e-300`.
    pub fn to_sci_string(&self, sig: usize) -> String {
        format_scientific(&self.value, sig.max(1))
    }

    /// Relative agreement `|a - b| <= 10^-tol_digits * max(|a|, |b|)`;
    /// falls back to an absolute test when both values are zero.
    pub fn agrees_with(&self, other: &PrecReal, tol_digits: i64) -> bool {
        let bits = self.value.prec().max(other.value.prec());
        let diff = relative_difference(&self.value, &other.value, bits);
        diff <= pow10(-tol_digits, bits)
    }
}

impl fmt::Display for PrecReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal_string(self.digits as usize))
    }
}

macro_rules! binary_op {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait<&PrecReal> for &PrecReal {
            type Output = PrecReal;
            fn $method(self, rhs: &PrecReal) -> PrecReal {
                let bits = self.value.prec().max(rhs.value.prec());
                PrecReal {
                    value: Float::with_val(bits, &self.value $op &rhs.value),
                    digits: self.digits.min(rhs.digits),
                }
            }
        }

        impl $trait<PrecReal> for PrecReal {
            type Output = PrecReal;
            fn $method(self, rhs: PrecReal) -> PrecReal {
                (&self).$method(&rhs)
            }
        }
    };
}

binary_op!(Add, add, +);
binary_op!(Sub, sub, -);
binary_op!(Mul, mul, *);
binary_op!(Div, div, /);

impl Neg for &PrecReal {
    type Output = PrecReal;
    fn neg(self) -> PrecReal {
        PrecReal {
            value: -self.value.clone(),
            digits: self.digits,
        }
    }
}

impl Neg for PrecReal {
    type Output = PrecReal;
    fn neg(self) -> PrecReal {
        PrecReal {
            value: -self.value,
            digits: self.digits,
        }
    }
}

/// A complex number with componentwise [`PrecReal`] semantics.
#[derive(Clone, Debug, PartialEq)]
pub struct PrecComplex {
    pub re: PrecReal,
    pub im: PrecReal,
}

impl PrecComplex {
    pub fn new(re: PrecReal, im: PrecReal) -> Self {
        Self { re, im }
    }

    pub fn from_real(re: PrecReal) -> Self {
        let ctx = re.context();
        Self {
            im: PrecReal::from_float(Float::with_val(re.value.prec(), 0), &ctx),
            re,
        }
    }

    /// Modulus `|z|`.
    pub fn norm(&self) -> PrecReal {
        PrecReal {
            value: self.re.value.clone().hypot(&self.im.value),
            digits: self.re.digits.min(self.im.digits),
        }
    }
}

impl fmt::Display for PrecComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_negative() {
            write!(f, "{} - {}i", self.re, self.im.abs())
        } else {
            write!(f, "{} + {}i", self.re, self.im)
        }
    }
}

/// Real `n`-th root; odd roots of negative numbers are the real negative root.
pub fn nth_root_real(x: &PrecReal, n: u32, ctx: &PrecisionContext) -> Result<PrecReal> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "root order must be at least 1".into(),
        ));
    }
    if n.is_multiple_of(2) && x.is_negative() {
        return Err(Error::Domain(format!(
            "even root (n = {n}) of negative value {}",
            x.to_sci_string(6)
        )));
    }
    Ok(PrecReal::from_float(ctx.float(&x.value).root(n), ctx))
}

/// `e^x` for `|x| <= 10^6`.
pub fn exp_real(x: &PrecReal, ctx: &PrecisionContext) -> Result<PrecReal> {
    if x.value.clone().abs() > 1_000_000 {
        return Err(Error::Range(format!(
            "exp argument {} exceeds 1e6 in magnitude",
            x.to_sci_string(6)
        )));
    }
    let y = ctx.float(&x.value).exp();
    if !y.is_normal() {
        return Err(Error::Range("exp result outside exponent range".into()));
    }
    Ok(PrecReal::from_float(y, ctx))
}

/// Natural logarithm of a positive real.
pub fn ln_real(x: &PrecReal, ctx: &PrecisionContext) -> Result<PrecReal> {
    if x.is_zero() || x.is_negative() {
        return Err(Error::Domain(format!(
            "logarithm of non-positive value {}",
            x.to_sci_string(6)
        )));
    }
    Ok(PrecReal::from_float(ctx.float(&x.value).ln(), ctx))
}

/// `|a - b| / max(|a|, |b|)`, or `|a - b|` when both are zero.
pub fn relative_difference(a: &Float, b: &Float, bits: u32) -> Float {
    let diff = Float::with_val(bits, a - b).abs();
    let scale = match a.cmp_abs(b) {
        Some(Ordering::Less) => Float::with_val(bits, b.abs_ref()),
        _ => Float::with_val(bits, a.abs_ref()),
    };
    if scale.is_zero() {
        diff
    } else {
        diff / scale
    }
}

/// Runs `f` at `P`, `2P`, `4P`, … until consecutive results agree to
/// `10^-(P-20)` relative, then returns the last one rounded to `ctx`.
pub fn stabilize<F>(ctx: &PrecisionContext, mut f: F) -> Result<PrecReal>
where
    F: FnMut(&PrecisionContext) -> Result<PrecReal>,
{
    const ROUNDS: usize = 3;
    let mut level = *ctx;
    let mut prev = f(&level)?;
    for _ in 0..ROUNDS {
        level = level.with_digits(level.digits().saturating_mul(2));
        let next = f(&level)?;
        if prev.agrees_with(&next, ctx.tolerance_exponent()) {
            return Ok(PrecReal::from_float(next.into_float(), ctx));
        }
        prev = next;
    }
    Err(Error::NotConverged(format!(
        "no agreement after escalating to {} digits",
        level.digits()
    )))
}

fn validate_decimal(s: &str) -> Result<()> {
    let bad = || Error::Parse(format!("not a decimal number: {s:?}"));
    let body = s.strip_prefix(['+', '-']).unwrap_or(s);
    let (mantissa, exponent) = match body.find(['e', 'E']) {
        Some(i) => (&body[..i], Some(&body[i + 1..])),
        None => (body, None),
    };
    let mut parts = mantissa.splitn(2, '.');
    let int = parts.next().unwrap_or("");
    let frac = parts.next().unwrap_or("");
    let all_digits = |t: &str| t.bytes().all(|c| c.is_ascii_digit());
    if int.len() + frac.len() == 0 || !all_digits(int) || !all_digits(frac) {
        return Err(bad());
    }
    if let Some(e) = exponent {
        let e = e.strip_prefix(['+', '-']).unwrap_or(e);
        if e.is_empty() || !all_digits(e) {
            return Err(bad());
        }
    }
    Ok(())
}

fn special(f: &Float) -> Option<String> {
    if f.is_nan() {
        Some("NaN".into())
    } else if f.is_infinite() {
        Some(if f.is_sign_negative() { "-inf" } else { "inf" }.into())
    } else if f.is_zero() {
        Some("0".into())
    } else {
        None
    }
}

/// Positional notation for moderate exponents, scientific otherwise;
/// exactly `sig` significant digits, rounded to nearest.
pub fn format_decimal(f: &Float, sig: usize) -> String {
    if let Some(s) = special(f) {
        return s;
    }
    let (neg, digits, exp) = f.to_sign_string_exp_round(10, Some(sig), Round::Nearest);
    let lead = exp.unwrap_or(0) as i64 - 1;
    let mut out = String::with_capacity(digits.len() + 8);
    if neg {
        out.push('-');
    }
    if (-5..sig as i64).contains(&lead) {
        if lead >= 0 {
            let split = lead as usize + 1;
            out.push_str(&digits[..split]);
            if split < digits.len() {
                out.push('.');
                out.push_str(&digits[split..]);
            }
        } else {
            out.push_str("0.");
            out.extend(std::iter::repeat_n('0', (-lead - 1) as usize));
            out.push_str(&digits);
        }
        out
    } else {
        push_scientific(&mut out, &digits, lead);
        out
    }
}

/// Always `d.ddd…e±N`.
pub fn format_scientific(f: &Float, sig: usize) -> String {
    if let Some(s) = special(f) {
        return s;
    }
    let (neg, digits, exp) = f.to_sign_string_exp_round(10, Some(sig), Round::Nearest);
    let mut out = String::new();
    if neg {
        out.push('-');
    }
    push_scientific(&mut out, &digits, exp.unwrap_or(0) as i64 - 1);
    out
}

fn push_scientific(out: &mut String, digits: &str, lead: i64) {
    out.push_str(&digits[..1]);
    if digits.len() > 1 {
        out.push('.');
        out.push_str(&digits[1..]);
    }
    out.push('e');
    out.push_str(&lead.to_string());
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(d: u32) -> PrecisionContext {
        PrecisionContext::new(d)
    }

    #[test]
    fn working_bits_cover_requested_digits() {
        let c = ctx(100);
        assert!(c.bits() as f64 >= 110.0 * LOG2_10 + 64.0);
        assert!(PrecisionContext::try_new(0, 10).is_err());
        assert!(PrecisionContext::try_new(10, 21).is_err());
    }

    #[test]
    fn perfect_roots_are_exact() {
        let c = ctx(50);
        let r = nth_root_real(&c.real(4), 2, &c).unwrap();
        assert_eq!(*r.value(), 2);
        let r = nth_root_real(&c.real(-8), 3, &c).unwrap();
        assert_eq!(*r.value(), -2);
    }

    #[test]
    fn sqrt2_to_twenty_digits() {
        let c = ctx(20);
        let r = nth_root_real(&c.real(2), 2, &c).unwrap();
        assert_eq!(r.to_string(), "1.4142135623730950488");
    }

    #[test]
    fn even_root_of_negative_is_domain_error() {
        let c = ctx(20);
        assert!(matches!(
            nth_root_real(&c.real(-4), 2, &c),
            Err(Error::Domain(_))
        ));
        assert!(nth_root_real(&c.real(4), 0, &c).is_err());
    }

    #[test]
    fn exp_and_ln_examples() {
        let c = ctx(50);
        assert_eq!(*exp_real(&c.real(0), &c).unwrap().value(), 1);
        let c20 = ctx(20);
        assert_eq!(
            exp_real(&c20.real(1), &c20).unwrap().to_string(),
            "2.7182818284590452354"
        );
        assert!(ln_real(&c.real(1), &c).unwrap().is_zero());
        let e = exp_real(&c.real(1), &c).unwrap();
        let one = ln_real(&e, &c).unwrap();
        assert!(one.agrees_with(&c.real(1), c.tolerance_exponent()));
        assert!(matches!(ln_real(&c.real(0), &c), Err(Error::Domain(_))));
        assert!(matches!(ln_real(&c.real(-2), &c), Err(Error::Domain(_))));
        assert!(matches!(
            exp_real(&c.real(2_000_000), &c),
            Err(Error::Range(_))
        ));
    }

    #[test]
    fn ln_53360_gives_chudnovsky_rate() {
        let c = ctx(30);
        let l = ln_real(&c.real(53360), &c).unwrap();
        assert!(l.to_string().starts_with("10.8848166805895053"));
        let rate = Float::with_val(c.bits(), l.value() * 3u32) / Float::with_val(c.bits(), 10).ln();
        assert!(format_decimal(&rate, 6).starts_with("14.1816"));
    }

    #[test]
    fn exp_of_heegner_nome_exponent() {
        let c = ctx(50);
        let pi = c.float(rug::float::Constant::Pi);
        let arg = -(pi * c.float(163).sqrt());
        let q = exp_real(&PrecReal::from_float(arg, &c), &c).unwrap();
        let mag = -q.value().clone().log10().to_f64();
        assert!((mag - 17.419).abs() < 0.01, "{mag}");
        assert!(q.to_sci_string(4).starts_with("3.809e-18"));
    }

    #[test]
    fn decimal_formatting() {
        let c = ctx(30);
        assert_eq!(format_decimal(&c.float(0.125), 3), "0.125");
        assert_eq!(format_decimal(&c.float(-2.5), 2), "-2.5");
        assert_eq!(format_decimal(&c.float(1234.5), 6), "1234.50");
        assert_eq!(format_decimal(&c.float(1e-9), 3), "1.00e-9");
        assert_eq!(format_decimal(&c.float(0), 3), "0");
        assert_eq!(format_scientific(&c.float(12345), 2), "1.2e4");
        // ties go to even
        assert_eq!(format_decimal(&c.float(0.125), 2), "0.12");
        assert_eq!(format_decimal(&c.float(0.375), 2), "0.38");
    }

    #[test]
    fn printing_caps_at_context_digits() {
        let c = ctx(5);
        let x = PrecReal::parse("3.14159265358979", &c).unwrap();
        assert_eq!(x.to_decimal_string(50), "3.1416");
    }

    #[test]
    fn parse_accepts_documented_grammar_only() {
        let c = ctx(30);
        for ok in ["1", "-2.5", "+.5", "3.", "1e5", "-1.25E-3", "0.000"] {
            assert!(PrecReal::parse(ok, &c).is_ok(), "{ok}");
        }
        for bad in [
            "", ".", "e5", "1e", "inf", "nan", "1.2.3", "0x10", "1 2", "--1",
        ] {
            assert!(PrecReal::parse(bad, &c).is_err(), "{bad}");
        }
        assert_eq!(PrecReal::parse("-1.25e-3", &c).unwrap().to_f64(), -0.00125);
    }

    #[test]
    fn stabilize_returns_value_at_requested_context() {
        let c = ctx(40);
        let v = stabilize(&c, |k| nth_root_real(&k.real(2), 2, k)).unwrap();
        assert_eq!(v.digits(), 40);
        assert!(v.to_string().starts_with("1.41421356237309504880"));
        let bad = stabilize(&c, |k| Ok(k.real(k.digits() as i64)));
        assert!(matches!(bad, Err(Error::NotConverged(_))));
    }

    #[test]
    fn operators_keep_min_digits() {
        let a = ctx(30).real(1);
        let b = ctx(60).real(3);
        let q = &a / &b;
        assert_eq!(q.digits(), 30);
        assert!(q.to_string().starts_with("0.33333"));
        assert_eq!((-&a).to_f64(), -1.0);
    }

    #[test]
    fn complex_norm() {
        let c = ctx(20);
        let z = PrecComplex::new(c.real(3), c.real(-4));
        assert_eq!(*z.norm().value(), 5);
        assert!(z.to_string().contains(" - 4.0"), "{z}");
    }

    #[test]
    fn bigint_exact_small_word_agreement() {
        let mut state = 0x9E37_79B9_7F4A_7C15u64;
        let mut next = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state as u32
        };
        for _ in 0..2000 {
            let (a, b) = (next() as i64, (next() | 1) as i64);
            let (x, y) = (BigInt::from(a), BigInt::from(b));
            assert_eq!(BigInt::from(&x * &y), a as i128 * b as i128);
            assert_eq!(BigInt::from(&x - &y), a - b);
            assert_eq!(BigInt::from(&x / &y), a / b);
            let q = BigRational::from((a, b));
            assert_eq!(
                q.numer().to_i128().unwrap() * b as i128,
                a as i128 * q.denom().to_i128().unwrap()
            );
            assert!(*q.denom() > 0);
        }
    }
}
