//! Minimal-polynomial recognition of a real number by lattice reduction.

use rug::float::Round;
use rug::ops::Pow;
use rug::{Float, Integer, Rational};

use super::lll::{lll_reduce, IntLattice};
use super::poly::IntPolynomial;
use crate::precision::{pow10, PrecReal, PrecisionContext};

/// Digits below the working precision at which lattice entries are scaled.
const SCALE_MARGIN: i64 = 10;

/// Searches for an integer polynomial of degree at most `max_degree`
/// vanishing at `v`, trying degrees in increasing order.
///
/// A candidate `q` with height `H` is accepted when both `|q(v)|` and
/// `H^deg · |q(v)|` are below `10^-(P/2)`; the second test rejects the
/// short vectors that LLL produces for unrelated values. Reliable recovery
/// needs roughly `P ≥ 20·max_degree + 100`.
pub fn recognize_min_poly(
    v: &PrecReal,
    max_degree: usize,
    ctx: &PrecisionContext,
) -> Option<IntPolynomial> {
    let p = ctx.digits().min(v.digits()) as i64;
    let m = (p - SCALE_MARGIN).max(1);
    let bits = ctx.bits();
    let scale = pow10(m, bits + 64);
    let threshold = pow10(-(p / 2), bits);
    let delta = Rational::from((99, 100));
    let x = Float::with_val(bits, v.value());

    for d in 1..=max_degree {
        let mut powers = Vec::with_capacity(d + 1);
        let mut acc = Float::with_val(bits, 1);
        for _ in 0..=d {
            powers.push(acc.clone());
            acc *= &x;
        }
        let rows: Vec<Vec<Integer>> = powers
            .iter()
            .enumerate()
            .map(|(i, pw)| {
                let scaled = Float::with_val(bits + 64, pw * &scale);
                let (lead, _) = scaled
                    .to_integer_round(Round::Nearest)
                    .expect("finite lattice entry");
                let mut row = vec![lead];
                row.extend((0..=d).map(|j| Integer::from((i == j) as u8)));
                row
            })
            .collect();
        let lattice = IntLattice::new(rows).expect("rectangular");
        let Ok(reduced) = lll_reduce(&lattice, &delta) else {
            continue;
        };
        for row in reduced.rows.iter().take(1) {
            let q = IntPolynomial::new(row[1..].to_vec());
            if q.degree() != Some(d) {
                continue;
            }
            let q = q.primitive();
            let residual = q.eval_float(&x, bits).abs();
            if residual >= threshold {
                continue;
            }
            let height = q
                .coeffs()
                .iter()
                .map(|c| Integer::from(c.abs_ref()))
                .max()
                .unwrap_or_default();
            let weighted = Float::with_val(bits, &height).pow(d as u32) * &residual;
            if weighted < threshold {
                return Some(q);
            }
        }
    }
    None
}
