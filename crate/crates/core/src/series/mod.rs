//! Summation of level-1 series by forward term recurrence, with a
//! certified geometric tail bound.

mod binsplit;
mod identities;

pub use binsplit::{
    binsplit_parallel, binsplit_range, chudnovsky_params, chudnovsky_partial_sum,
    chudnovsky_terms_for, eval_chudnovsky_binsplit, BinSplitNode,
};
pub use identities::{central_binomial_cube_sum, check_bailey, check_k_generating_function};

use rug::Float;

use crate::error::{Error, Result};
use crate::params::{digits_per_term, SeriesParams};
use crate::precision::{pow10, PrecReal, PrecisionContext};

/// `t_n = (1/6)_n (1/2)_n (5/6)_n / n!³ · z^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct Level1Term {
    pub n: u64,
    pub t: PrecReal,
}

/// Upper bound on `|Σ_{n>=N} t_n (a + b n)|`.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncationEstimate {
    pub terms: usize,
    pub bound: PrecReal,
}

/// A truncated series value and the certificate for its tail.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesSum {
    pub value: PrecReal,
    pub estimate: TruncationEstimate,
}

/// Iterator over `t_n` for a fixed `z`, using the exact ratio
/// `t_{n+1}/t_n = z (6n+1)(6n+3)(6n+5) / (216 (n+1)³)`.
pub(crate) struct TermRecurrence {
    z: Float,
    t: Float,
    n: u64,
}

impl TermRecurrence {
    pub(crate) fn new(z: &Float, bits: u32) -> Self {
        Self {
            z: Float::with_val(bits, z),
            t: Float::with_val(bits, 1),
            n: 0,
        }
    }
}

impl Iterator for TermRecurrence {
    type Item = (u64, Float);

    fn next(&mut self) -> Option<Self::Item> {
        let out = (self.n, self.t.clone());
        let n = self.n as u128;
        let num = (6 * n + 1) * (6 * n + 3) * (6 * n + 5);
        let den = 216 * (n + 1) * (n + 1) * (n + 1);
        self.t *= &self.z;
        self.t *= Float::with_val(self.t.prec(), num);
        self.t /= Float::with_val(self.t.prec(), den);
        self.n += 1;
        Some(out)
    }
}

pub fn level1_terms(z: &PrecReal, ctx: &PrecisionContext) -> impl Iterator<Item = Level1Term> {
    let ctx = *ctx;
    TermRecurrence::new(z.value(), ctx.bits()).map(move |(n, t)| Level1Term {
        n,
        t: PrecReal::from_float(t, &ctx),
    })
}

fn require_convergent(z: &Float) -> Result<()> {
    if z.clone().abs() >= 1 {
        return Err(Error::Divergent(crate::precision::format_scientific(z, 8)));
    }
    Ok(())
}

fn tail_bound(t_n: &Float, n: usize, a: &Float, b: &Float, z: &Float, bits: u32) -> Float {
    let gap = Float::with_val(bits, 1 - z.clone().abs());
    let b_abs = Float::with_val(bits, b.abs_ref());
    let linear = Float::with_val(bits, a.abs_ref())
        + Float::with_val(bits, &b_abs * n as u64)
        + Float::with_val(bits, &b_abs / &gap);
    Float::with_val(bits, t_n.abs_ref()) * linear / gap
}

/// `|t_N| (|a| + |b| N + |b|/(1-|z|)) / (1-|z|)`, valid because the
/// Pochhammer ratio is below 1 for every `n`.
pub fn truncation_bound(
    p: &SeriesParams,
    terms: usize,
    ctx: &PrecisionContext,
) -> Result<TruncationEstimate> {
    require_convergent(p.z.value())?;
    let bits = ctx.bits();
    let (_, t_n) = TermRecurrence::new(p.z.value(), bits)
        .nth(terms)
        .expect("recurrence is infinite");
    let bound = tail_bound(&t_n, terms, p.a.value(), p.b.value(), p.z.value(), bits);
    Ok(TruncationEstimate {
        terms,
        bound: PrecReal::from_float(bound, ctx),
    })
}

/// `Σ_{n<N} t_n (a + b n)`.
pub fn partial_sum(p: &SeriesParams, terms: usize, ctx: &PrecisionContext) -> Result<PrecReal> {
    require_convergent(p.z.value())?;
    let bits = ctx.bits();
    let mut sum = Float::with_val(bits, 0);
    for (n, t) in TermRecurrence::new(p.z.value(), bits).take(terms) {
        let lin = Float::with_val(bits, p.b.value() * n) + p.a.value();
        sum += t * lin;
    }
    Ok(PrecReal::from_float(sum, ctx))
}

/// Every partial sum `S_1, …, S_N` in one pass.
pub fn partial_sums(
    p: &SeriesParams,
    terms: usize,
    ctx: &PrecisionContext,
) -> Result<Vec<PrecReal>> {
    require_convergent(p.z.value())?;
    let bits = ctx.bits();
    let mut sum = Float::with_val(bits, 0);
    let mut out = Vec::with_capacity(terms);
    for (n, t) in TermRecurrence::new(p.z.value(), bits).take(terms) {
        let lin = Float::with_val(bits, p.b.value() * n) + p.a.value();
        sum += t * lin;
        out.push(PrecReal::from_float(sum.clone(), ctx));
    }
    Ok(out)
}

/// Sums the series until the certified tail is below `10^-target_digits`.
/// The term count starts at `ceil(target / digits_per_term) + 2` and grows
/// only if the bound demands it.
pub fn eval_level1_series(
    p: &SeriesParams,
    target_digits: u32,
    ctx: &PrecisionContext,
) -> Result<SeriesSum> {
    require_convergent(p.z.value())?;
    let bits = ctx.bits();
    if p.z.is_zero() {
        return Ok(SeriesSum {
            value: p.a.clone(),
            estimate: TruncationEstimate {
                terms: 1,
                bound: ctx.real(0),
            },
        });
    }
    let rate = digits_per_term(&p.z, ctx)?.to_f64();
    let first_check = (target_digits as f64 / rate).ceil() as usize + 2;
    let limit = pow10(-(target_digits as i64), bits);

    let mut sum = Float::with_val(bits, 0);
    for (n, t) in TermRecurrence::new(p.z.value(), bits) {
        let n_us = n as usize;
        if n_us >= first_check {
            let bound = tail_bound(&t, n_us, p.a.value(), p.b.value(), p.z.value(), bits);
            if bound < limit {
                return Ok(SeriesSum {
                    value: PrecReal::from_float(sum, ctx),
                    estimate: TruncationEstimate {
                        terms: n_us,
                        bound: PrecReal::from_float(bound, ctx),
                    },
                });
            }
        }
        let lin = Float::with_val(bits, p.b.value() * n) + p.a.value();
        sum += t * lin;
    }
    unreachable!("term recurrence never ends")
}

/// `1/Σ` for a series summing to `1/π`, certified to the context precision.
pub fn pi_from_series(p: &SeriesParams, ctx: &PrecisionContext) -> Result<PrecReal> {
    let sum = eval_level1_series(p, ctx.digits() + ctx.guard(), ctx)?;
    Ok(PrecReal::from_float(sum.value.into_float().recip(), ctx))
}

/// Correct digits `-log10 |S_N π - 1|` after each of the first `terms`
/// partial sums, using `pi` as the reference value.
pub fn correct_digits(
    p: &SeriesParams,
    terms: usize,
    pi: &PrecReal,
    ctx: &PrecisionContext,
) -> Result<Vec<f64>> {
    let bits = ctx.bits();
    let floor = ctx.digits() as f64 + ctx.guard() as f64;
    Ok(partial_sums(p, terms, ctx)?
        .into_iter()
        .map(|s| {
            let err = (Float::with_val(bits, s.value() * pi.value()) - 1u32).abs();
            if err.is_zero() {
                floor
            } else {
                (-err.log10()).to_f64().min(floor)
            }
        })
        .collect())
}

/// Average digits gained per term between the first partial sum and the
/// last one that is still clear of the precision floor.
pub fn realized_digits_per_term(
    p: &SeriesParams,
    pi: &PrecReal,
    ctx: &PrecisionContext,
) -> Result<f64> {
    let rate = digits_per_term(&p.z, ctx)?.to_f64();
    let usable = ctx.digits() as f64 - 30.0;
    let last = (usable / rate).floor() as usize;
    if last < 2 {
        return Err(Error::InvalidArgument(format!(
            "precision {} is too low to measure a rate of {rate:.2} digits per term",
            ctx.digits()
        )));
    }
    let digits = correct_digits(p, last, pi, ctx)?;
    Ok((digits[last - 1] - digits[0]) / (last - 1) as f64)
}
