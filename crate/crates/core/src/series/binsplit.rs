//! Exact binary splitting for the Chudnovsky series.
//!
//! With `p(k) = -(6k-5)(2k-1)(6k-1)`, `q(k) = k³·640320³/24` and
//! `a(k) = 13591409 + 545140134 k`, a range `[lo, hi)` reduces to integers
//! `(P, Q, T)` such that `T(0,N)/Q(0,N) = Σ_{k<N} a(k) Π_{j<=k} p(j)/q(j)`,
//! and `π = 426880 sqrt(10005) Q/T`.

use rug::ops::Pow;
use rug::{Float, Integer};

use crate::elliptic::SingularValueIndex;
use crate::params::{Family, SeriesParams};
use crate::precision::{format_decimal, BigInt, PrecReal, PrecisionContext};

const A: u64 = 13_591_409;
const B: u64 = 545_140_134;
// 640320³ / 24
const C3_OVER_24: u64 = 10_939_058_860_032_000;
const SEQUENTIAL_CUTOFF: u64 = 64;

/// Exact partial products and sums for a term range.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinSplitNode {
    pub p: BigInt,
    pub q: BigInt,
    pub t: BigInt,
}

impl BinSplitNode {
    fn leaf(k: u64) -> Self {
        if k == 0 {
            return Self {
                p: Integer::from(1),
                q: Integer::from(1),
                t: Integer::from(A),
            };
        }
        let mut p = Integer::from(6 * k - 5);
        p *= 2 * k - 1;
        p *= 6 * k - 1;
        p = -p;
        let mut q = Integer::from(k);
        q *= k;
        q *= k;
        q *= C3_OVER_24;
        let mut lin = Integer::from(B);
        lin *= k;
        lin += A;
        let t = Integer::from(&p * &lin);
        Self { p, q, t }
    }

    /// Combines adjacent ranges `[lo, mid)` and `[mid, hi)`.
    pub fn merge(self, right: BinSplitNode) -> Self {
        let t = Integer::from(&self.t * &right.q) + Integer::from(&self.p * &right.t);
        Self {
            p: self.p * right.p,
            q: self.q * right.q,
            t,
        }
    }
}

/// Sequential binary splitting over `[lo, hi)`.
pub fn binsplit_range(lo: u64, hi: u64) -> BinSplitNode {
    assert!(lo < hi, "empty binary-splitting range");
    if hi - lo == 1 {
        return BinSplitNode::leaf(lo);
    }
    let mid = lo + (hi - lo) / 2;
    binsplit_range(lo, mid).merge(binsplit_range(mid, hi))
}

fn split_joined(lo: u64, hi: u64, depth: u32) -> BinSplitNode {
    if depth == 0 || hi - lo <= SEQUENTIAL_CUTOFF {
        return binsplit_range(lo, hi);
    }
    let mid = lo + (hi - lo) / 2;
    let (left, right) = rayon::join(
        || split_joined(lo, mid, depth - 1),
        || split_joined(mid, hi, depth - 1),
    );
    left.merge(right)
}

/// Binary splitting with the top of the tree fanned out over `workers`
/// threads. The split points are the same as [`binsplit_range`], so the
/// result is identical for any worker count.
pub fn binsplit_parallel(lo: u64, hi: u64, workers: usize) -> BinSplitNode {
    let workers = workers.max(1);
    if workers == 1 {
        return binsplit_range(lo, hi);
    }
    let depth = usize::BITS - (workers - 1).leading_zeros() + 1;
    match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
        Ok(pool) => pool.install(|| split_joined(lo, hi, depth)),
        Err(_) => binsplit_range(lo, hi),
    }
}

/// `ceil(digits / 14.18) + 2`.
pub fn chudnovsky_terms_for(digits: u32) -> u64 {
    (digits as f64 / 14.18).ceil() as u64 + 2
}

/// π to `digits` significant digits by binary splitting.
pub fn eval_chudnovsky_binsplit(digits: u32, workers: usize) -> String {
    let digits = digits.max(1);
    let terms = chudnovsky_terms_for(digits);
    let node = binsplit_parallel(0, terms, workers);
    let ctx = PrecisionContext::new(digits);
    let bits = ctx.bits();
    let mut pi = Float::with_val(bits, 10005u32).sqrt();
    pi *= 426_880u32;
    pi *= &node.q;
    pi /= &node.t;
    format_decimal(&pi, digits as usize)
}

/// The normalized Chudnovsky parameters: `z = -1/53360³`,
/// `a = 13591409/(426880 sqrt(10005))`, `b = 545140134/(426880 sqrt(10005))`.
pub fn chudnovsky_params(ctx: &PrecisionContext) -> SeriesParams {
    let bits = ctx.bits();
    let scale = Float::with_val(bits, 10005u32).sqrt() * 426_880u32;
    let z = -Float::with_val(bits, 53360u32).pow(3u32).recip();
    let a = Float::with_val(bits, A) / &scale;
    let b = Float::with_val(bits, B) / &scale;
    SeriesParams {
        r: SingularValueIndex::integer(163),
        family: Family::Negative,
        z: PrecReal::from_float(z, ctx),
        a: PrecReal::from_float(a, ctx),
        b: PrecReal::from_float(b, ctx),
    }
}

/// `Σ_{n<N} t_n (a + b n)` for the normalized Chudnovsky parameters, from
/// the exact binary-splitting integers.
pub fn chudnovsky_partial_sum(terms: u64, workers: usize, ctx: &PrecisionContext) -> PrecReal {
    let node = binsplit_parallel(0, terms.max(1), workers);
    let bits = ctx.bits();
    let scale = Float::with_val(bits, 10005u32).sqrt() * 426_880u32;
    let ratio = Float::with_val(bits, &node.t) / &node.q;
    PrecReal::from_float(ratio / scale, ctx)
}
