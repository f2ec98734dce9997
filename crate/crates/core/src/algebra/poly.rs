//! Integer polynomials and their real roots.
//!
//! Roots are isolated exactly with a Sturm sequence over the rationals,
//! narrowed by dyadic bisection, and then polished by Newton iteration at
//! the working precision.

use std::fmt;
use std::str::FromStr;

use rug::{Float, Integer, Rational};

use crate::error::{Error, Result};
use crate::precision::{BigInt, BigRational, PrecReal, PrecisionContext};

/// Integer polynomial, coefficients in ascending degree.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| *c == 0) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Integer::from(c)).collect())
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with the zero polynomial reported as `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    /// gcd of the coefficients (0 for the zero polynomial).
    pub fn content(&self) -> BigInt {
        self.coeffs.iter().fold(Integer::new(), |g, c| g.gcd(c))
    }

    /// Divides out the content and makes the leading coefficient positive.
    pub fn primitive(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut g = self.content();
        if self.leading().is_some_and(|l| *l < 0) {
            g = -g;
        }
        Self::new(self.coeffs.iter().map(|c| Integer::from(c / &g)).collect())
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| Integer::from(c * i as u64))
                .collect(),
        )
    }

    /// Horner evaluation in floating point at `bits` of precision.
    pub fn eval_float(&self, x: &Float, bits: u32) -> Float {
        let mut acc = Float::with_val(bits, 0);
        for c in self.coeffs.iter().rev() {
            acc *= x;
            acc += c;
        }
        acc
    }

    pub fn eval_rational(&self, x: &Rational) -> Rational {
        let mut acc = Rational::new();
        for c in self.coeffs.iter().rev() {
            acc *= x;
            acc += c;
        }
        acc
    }

    /// One line of space-separated ascending coefficients.
    pub fn to_text(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        self.coeffs
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    }

    fn to_rational(&self) -> RatPoly {
        RatPoly::new(self.coeffs.iter().map(Rational::from).collect())
    }
}

impl FromStr for IntPolynomial {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let coeffs = s
            .split_whitespace()
            .map(|tok| {
                Integer::from_str(tok).map_err(|_| Error::Parse(format!("bad coefficient {tok:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        if coeffs.is_empty() {
            return Err(Error::Parse("empty polynomial line".into()));
        }
        Ok(Self::new(coeffs))
    }
}

/// Parses one polynomial per non-empty line. Lines starting with `#` are
/// comments.
pub fn parse_polynomials(text: &str) -> Result<Vec<IntPolynomial>> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(IntPolynomial::from_str)
        .collect()
}

impl fmt::Display for IntPolynomial {
    /// Human-readable form, e.g. `2*x^2 - 1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if *c == 0 {
                continue;
            }
            let mag = Integer::from(c.abs_ref());
            let sign = if *c < 0 { "-" } else { "+" };
            if first {
                if *c < 0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            match (i, mag == 1) {
                (0, _) => write!(f, "{mag}")?,
                (1, true) => write!(f, "x")?,
                (1, false) => write!(f, "{mag}*x")?,
                (_, true) => write!(f, "x^{i}")?,
                (_, false) => write!(f, "{mag}*x^{i}")?,
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
struct RatPoly(Vec<Rational>);

impl RatPoly {
    fn new(mut c: Vec<Rational>) -> Self {
        while c.last().is_some_and(|v| *v == 0) {
            c.pop();
        }
        Self(c)
    }

    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    fn derivative(&self) -> Self {
        Self::new(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| Rational::from(c * i as u64))
                .collect(),
        )
    }

    fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::new();
        for c in self.0.iter().rev() {
            acc *= x;
            acc += c;
        }
        acc
    }

    fn div_rem(&self, d: &RatPoly) -> (RatPoly, RatPoly) {
        let mut rem = self.0.clone();
        if rem.len() < d.0.len() {
            return (RatPoly(Vec::new()), self.clone());
        }
        let dl = d.0.last().expect("nonzero divisor");
        let mut quot = vec![Rational::new(); rem.len() - d.0.len() + 1];
        for shift in (0..quot.len()).rev() {
            let coef = Rational::from(&rem[shift + d.0.len() - 1] / dl);
            for (j, dc) in d.0.iter().enumerate() {
                rem[shift + j] -= Rational::from(&coef * dc);
            }
            quot[shift] = coef;
        }
        (RatPoly::new(quot), RatPoly::new(rem))
    }

    fn monic(&self) -> Self {
        let lead = self.0.last().expect("nonzero").clone();
        Self(self.0.iter().map(|c| Rational::from(c / &lead)).collect())
    }

    fn gcd(&self, other: &RatPoly) -> RatPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        if a.is_zero() {
            a
        } else {
            a.monic()
        }
    }

    fn sign_at_infinity(&self, positive: bool) -> i32 {
        let lead = self.0.last().map_or(0, |c| c.cmp0() as i32);
        if positive || self.degree().is_multiple_of(2) {
            lead
        } else {
            -lead
        }
    }
}

/// Sturm chain of a square-free polynomial.
struct Sturm {
    chain: Vec<RatPoly>,
}

impl Sturm {
    fn new(p: &RatPoly) -> Self {
        let mut chain = vec![p.clone(), p.derivative()];
        loop {
            let n = chain.len();
            if chain[n - 1].is_zero() {
                chain.pop();
                break;
            }
            let (_, r) = chain[n - 2].div_rem(&chain[n - 1]);
            if r.is_zero() {
                break;
            }
            chain.push(RatPoly::new(r.0.into_iter().map(|c| -c).collect()));
        }
        Self { chain }
    }

    fn changes(signs: impl Iterator<Item = i32>) -> usize {
        let mut last = 0;
        let mut count = 0;
        for s in signs.filter(|&s| s != 0) {
            if last != 0 && s != last {
                count += 1;
            }
            last = s;
        }
        count
    }

    fn variations_at(&self, x: &Rational) -> usize {
        Self::changes(self.chain.iter().map(|p| p.eval(x).cmp0() as i32))
    }

    fn variations_at_infinity(&self, positive: bool) -> usize {
        Self::changes(self.chain.iter().map(|p| p.sign_at_infinity(positive)))
    }

    /// Distinct roots in `(lo, hi]`.
    fn count(&self, lo: &Rational, hi: &Rational) -> usize {
        self.variations_at(lo)
            .saturating_sub(self.variations_at(hi))
    }
}

fn squarefree(p: &IntPolynomial) -> RatPoly {
    let rp = p.to_rational();
    let g = rp.gcd(&rp.derivative());
    if g.degree() == 0 {
        rp
    } else {
        rp.div_rem(&g).0
    }
}

/// Number of distinct real roots.
pub fn count_real_roots(p: &IntPolynomial) -> Result<usize> {
    if p.is_zero() {
        return Err(Error::Domain(
            "the zero polynomial has no isolated roots".into(),
        ));
    }
    let s = Sturm::new(&squarefree(p));
    Ok(s.variations_at_infinity(false) - s.variations_at_infinity(true))
}

/// A refined real root with its exact isolating interval `(lo, hi]`.
#[derive(Clone, Debug, PartialEq)]
pub struct RealRoot {
    pub lo: BigRational,
    pub hi: BigRational,
    pub value: PrecReal,
}

/// Power of two strictly above every root modulus (Cauchy bound).
fn root_bound(p: &RatPoly) -> Rational {
    let lead = Rational::from(p.0.last().expect("nonzero").abs_ref());
    let mut m = Rational::new();
    for c in &p.0[..p.0.len() - 1] {
        let r = Rational::from(c.abs_ref()) / &lead;
        if r > m {
            m = r;
        }
    }
    let bound = m + 1u32;
    let mut pow = Rational::from(1);
    while pow <= bound {
        pow *= 2u32;
    }
    pow
}

fn isolate(s: &Sturm, lo: Rational, hi: Rational, n: usize, out: &mut Vec<(Rational, Rational)>) {
    if n == 0 {
        return;
    }
    if n == 1 {
        out.push((lo, hi));
        return;
    }
    let mid = Rational::from(&lo + &hi) / 2u32;
    let left = s.count(&lo, &mid);
    isolate(s, lo, mid.clone(), left, out);
    isolate(s, mid, hi, n - left, out);
}

/// Shrinks `(lo, hi]` around the single root of `p` until its width is
/// below `2^-64` times the smallest modulus in it, and the interval avoids 0
/// unless the root is 0.
fn narrow(p: &RatPoly, lo: &mut Rational, hi: &mut Rational) {
    if p.eval(hi).cmp0() == std::cmp::Ordering::Equal {
        *lo = hi.clone();
        return;
    }
    let sign_hi = p.eval(hi).cmp0();
    let tiny = Rational::from((1, Integer::from(1) << 64u32));
    for _ in 0..100_000 {
        let width = Rational::from(&*hi - &*lo);
        let straddles = *lo < 0 && *hi > 0;
        let scale = Rational::from(lo.abs_ref()).min(Rational::from(hi.abs_ref()));
        if !straddles && width < Rational::from(&scale * &tiny) {
            return;
        }
        let mid = Rational::from(&*lo + &*hi) / 2u32;
        let v = p.eval(&mid).cmp0();
        if v == std::cmp::Ordering::Equal {
            *lo = mid.clone();
            *hi = mid;
            return;
        }
        if v == sign_hi {
            *hi = mid;
        } else {
            *lo = mid;
        }
    }
}

fn newton(p: &IntPolynomial, lo: &Rational, hi: &Rational, bits: u32) -> Float {
    if lo == hi {
        return Float::with_val(bits, lo);
    }
    let dp = p.derivative();
    let wp = bits + 32;
    let flo = Float::with_val(wp, lo);
    let fhi = Float::with_val(wp, hi);
    let mut x = Float::with_val(wp, &flo + &fhi) / 2u32;
    for _ in 0..(2 * wp.ilog2() + 20) {
        let fx = p.eval_float(&x, wp);
        let dfx = dp.eval_float(&x, wp);
        if fx.is_zero() || dfx.is_zero() {
            break;
        }
        let step = fx / dfx;
        let next = Float::with_val(wp, &x - &step);
        let done = step.is_zero()
            || step.get_exp().unwrap_or(i32::MIN) < next.get_exp().unwrap_or(0) - wp as i32;
        x = next;
        if done {
            break;
        }
    }
    if x < flo || x > fhi {
        // Newton left the bracket; fall back to bisection in floating point.
        let (mut a, mut b) = (flo, fhi);
        let sign_b = p.eval_float(&b, wp).cmp0();
        for _ in 0..(wp + 64) {
            let m = Float::with_val(wp, &a + &b) / 2u32;
            if p.eval_float(&m, wp).cmp0() == sign_b {
                b = m;
            } else {
                a = m;
            }
        }
        x = b;
    }
    Float::with_val(bits, x)
}

/// All distinct real roots in ascending order.
pub fn real_roots(p: &IntPolynomial, ctx: &PrecisionContext) -> Result<Vec<RealRoot>> {
    if p.is_zero() {
        return Err(Error::Domain(
            "the zero polynomial has no isolated roots".into(),
        ));
    }
    let sf = squarefree(p);
    if sf.degree() == 0 {
        return Ok(Vec::new());
    }
    let sturm = Sturm::new(&sf);
    let bound = root_bound(&sf);
    let lo = Rational::from(-&bound);
    let total = sturm.count(&lo, &bound);
    let mut intervals = Vec::with_capacity(total);
    isolate(&sturm, lo, bound, total, &mut intervals);
    let sf_int = rational_to_integer_poly(&sf);
    Ok(intervals
        .into_iter()
        .map(|(mut lo, mut hi)| {
            narrow(&sf, &mut lo, &mut hi);
            let v = newton(&sf_int, &lo, &hi, ctx.bits());
            RealRoot {
                lo,
                hi,
                value: PrecReal::from_float(v, ctx),
            }
        })
        .collect())
}

fn rational_to_integer_poly(p: &RatPoly) -> IntPolynomial {
    let lcm = p.0.iter().fold(Integer::from(1), |l, c| l.lcm(c.denom()));
    IntPolynomial::new(
        p.0.iter()
            .map(|c| c.numer() * Integer::from(&lcm / c.denom()))
            .collect(),
    )
}

/// The `index`-th real root (1-based, ascending) of `poly`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootSpec {
    pub poly: IntPolynomial,
    pub index: usize,
}

impl RootSpec {
    pub fn new(poly: IntPolynomial, index: usize) -> Self {
        Self { poly, index }
    }
}

pub fn root_by_spec(spec: &RootSpec, ctx: &PrecisionContext) -> Result<PrecReal> {
    let roots = real_roots(&spec.poly, ctx)?;
    if spec.index == 0 || spec.index > roots.len() {
        return Err(Error::RootIndex {
            index: spec.index,
            count: roots.len(),
        });
    }
    Ok(roots
        .into_iter()
        .nth(spec.index - 1)
        .expect("checked")
        .value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::precision::pow10;

    fn ctx(d: u32) -> PrecisionContext {
        PrecisionContext::new(d)
    }

    fn certified(p: &IntPolynomial, root: &PrecReal, c: &PrecisionContext) -> bool {
        let bits = c.bits();
        let v = p.eval_float(root.value(), bits).abs();
        let d = p.derivative().eval_float(root.value(), bits).abs();
        v < d * pow10(-c.tolerance_exponent(), bits)
    }

    #[test]
    fn sqrt_two_pair() {
        let c = ctx(60);
        let p = IntPolynomial::from_i64(&[-2, 0, 1]);
        let roots = real_roots(&p, &c).unwrap();
        assert_eq!(roots.len(), 2);
        let s2 = c.float(2).sqrt();
        assert!(roots[0]
            .value
            .agrees_with(&PrecReal::from_float(-s2.clone(), &c), 40));
        assert!(roots[1]
            .value
            .agrees_with(&PrecReal::from_float(s2, &c), 40));
        let neg = root_by_spec(&RootSpec::new(p.clone(), 1), &c).unwrap();
        assert!(neg.is_negative());
        assert!(matches!(
            root_by_spec(&RootSpec::new(p, 3), &c),
            Err(Error::RootIndex { index: 3, count: 2 })
        ));
    }

    #[test]
    fn class_invariant_cubic_has_one_real_root() {
        let c = ctx(100);
        let p = IntPolynomial::from_i64(&[-2, 4, -6, 1]);
        assert_eq!(count_real_roots(&p).unwrap(), 1);
        let roots = real_roots(&p, &c).unwrap();
        assert_eq!(roots.len(), 1);
        assert!((roots[0].value.to_f64() - 5.3186).abs() < 1e-4);
        assert!(certified(&p, &roots[0].value, &c));
    }

    #[test]
    fn tiny_root_of_level_one_cubic() {
        let c = ctx(200);
        let p: IntPolynomial =
            "6561 7046099782711303104000 -8241190499340288000000 4245232549888000000000"
                .parse()
                .unwrap();
        let roots = real_roots(&p, &c).unwrap();
        assert_eq!(roots.len(), 1);
        let z = roots[0].value.to_f64();
        assert!((z + 9.312e-19).abs() < 1e-21, "{z}");
        let digits = -z.abs().log10();
        assert!((17.5..=18.5).contains(&digits));
        assert!(certified(&p, &roots[0].value, &c));
        let rel = p.eval_float(roots[0].value.value(), c.bits()).abs() / 6561u32;
        assert!(rel < pow10(-190, c.bits()));
    }

    #[test]
    fn repeated_and_rational_roots() {
        let c = ctx(40);
        // (x - 1)² (x + 3) (2x - 1)
        let q = IntPolynomial::from_i64(&[-3, 11, -11, 1, 2]);
        let roots = real_roots(&q, &c).unwrap();
        let vals: Vec<f64> = roots.iter().map(|r| r.value.to_f64()).collect();
        assert_eq!(vals, vec![-3.0, 0.5, 1.0]);
        assert_eq!(count_real_roots(&q).unwrap(), 3);
    }

    #[test]
    fn zero_polynomial_is_rejected() {
        assert!(real_roots(&IntPolynomial::zero(), &ctx(20)).is_err());
        assert!(count_real_roots(&IntPolynomial::zero()).is_err());
    }

    #[test]
    fn text_round_trip_and_display() {
        let p = IntPolynomial::from_i64(&[-1, 0, 2]);
        assert_eq!(p.to_text(), "-1 0 2");
        assert_eq!(p.to_text().parse::<IntPolynomial>().unwrap(), p);
        assert_eq!(p.to_string(), "2*x^2 - 1");
        let list = parse_polynomials("# comment\n-1 1 1\n\n1 0 0 -1\n").unwrap();
        assert_eq!(list.len(), 2);
        assert_eq!(list[1].degree(), Some(3));
        assert!("1 x".parse::<IntPolynomial>().is_err());
    }

    #[test]
    fn primitive_form() {
        let p = IntPolynomial::from_i64(&[4, 0, -6]);
        assert_eq!(p.primitive(), IntPolynomial::from_i64(&[-2, 0, 3]));
    }
}
