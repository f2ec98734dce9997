//! Numerical checks of the hypergeometric identities linking the central
//! binomial cube series to the level-1 series and to `K²`.

use rug::Float;

use super::TermRecurrence;
use crate::elliptic::{k_e_float, pi_float};
use crate::error::{Error, Result};
use crate::precision::{format_scientific, PrecReal, PrecisionContext};

/// Sums `Σ t_n` given terms whose successive ratios are bounded by `rho < 1`,
/// stopping once `|t_N| / (1 - rho)` drops below `2^-bits`.
fn sum_with_geometric_tail<I>(terms: I, rho: &Float, bits: u32) -> Float
where
    I: Iterator<Item = Float>,
{
    let gap = Float::with_val(bits, 1 - rho.clone());
    let eps = Float::with_val(bits, 1) >> (bits as i32 + 8);
    let mut sum = Float::with_val(bits, 0);
    for t in terms {
        let tail = Float::with_val(bits, t.abs_ref()) / &gap;
        if tail < eps {
            break;
        }
        sum += t;
    }
    sum
}

fn cube_sum_float(x: &Float, bits: u32) -> Float {
    let x = Float::with_val(bits, x);
    let mut t = Float::with_val(bits, 1);
    let mut n = 0u64;
    let terms = std::iter::from_fn(|| {
        let out = t.clone();
        let num = (2 * n as u128 + 1).pow(3);
        let den = 8 * (n as u128 + 1).pow(3);
        t *= &x;
        t *= Float::with_val(bits, num);
        t /= Float::with_val(bits, den);
        n += 1;
        Some(out)
    });
    let rho = Float::with_val(bits, x.abs_ref());
    sum_with_geometric_tail(terms, &rho, bits)
}

/// `Σ (1/2)_n³ / n!³ · xⁿ` for `|x| < 1`.
pub fn central_binomial_cube_sum(x: &PrecReal, ctx: &PrecisionContext) -> Result<PrecReal> {
    if x.value().clone().abs() >= 1 {
        return Err(Error::Domain(format!(
            "cube series diverges at x = {}",
            format_scientific(x.value(), 8)
        )));
    }
    let wp = ctx.bits() + 32;
    Ok(PrecReal::from_float(cube_sum_float(x.value(), wp), ctx))
}

/// Residual of
/// `Σ (1/2)_n³/n!³ xⁿ = (1-4x)^{-1/2} Σ (1/6)_n(1/2)_n(5/6)_n/n!³ wⁿ`
/// with `w = -27x/(1-4x)³`.
pub fn check_bailey(x: &PrecReal, ctx: &PrecisionContext) -> Result<PrecReal> {
    let wp = ctx.bits() + 32;
    let xv = Float::with_val(wp, x.value());
    if Float::with_val(wp, xv.abs_ref()) >= 1 {
        return Err(Error::Domain("Bailey check needs |x| < 1".into()));
    }
    let s = Float::with_val(wp, 1 - Float::with_val(wp, &xv * 4u32));
    if s <= 0 {
        return Err(Error::Domain("Bailey check needs 1 - 4x > 0".into()));
    }
    let w = -Float::with_val(wp, &xv * 27u32) / Float::with_val(wp, s.clone().square() * &s);
    let rho = Float::with_val(wp, w.abs_ref());
    if rho >= 1 {
        return Err(Error::Domain(format!(
            "transformed argument {} is outside the unit disc",
            format_scientific(&w, 8)
        )));
    }
    let lhs = cube_sum_float(&xv, wp);
    let level1 = sum_with_geometric_tail(TermRecurrence::new(&w, wp).map(|(_, t)| t), &rho, wp);
    let rhs = level1 / s.sqrt();
    Ok(PrecReal::from_float((lhs - rhs).abs(), ctx))
}

/// Residual of `Σ (1/2)_n³/n!³ xⁿ = 4 K(k)² / π²` with `k² = (1 - sqrt(1-x))/2`.
pub fn check_k_generating_function(x: &PrecReal, ctx: &PrecisionContext) -> Result<PrecReal> {
    let wp = ctx.bits() + 32;
    let xv = Float::with_val(wp, x.value());
    if !(0..1).contains(&xv) {
        return Err(Error::Domain(
            "K² generating function needs 0 <= x < 1".into(),
        ));
    }
    // (1 - sqrt(1-x))/2 without the cancellation at small x.
    let root = Float::with_val(wp, 1 - xv.clone()).sqrt();
    let k2 = Float::with_val(wp, &xv / (root + 1u32)) / 2u32;
    let k = k2.sqrt();
    let (big_k, _) = k_e_float(&k, wp);
    let pi = pi_float(wp);
    let rhs = big_k.square() * 4u32 / pi.square();
    let lhs = cube_sum_float(&xv, wp);
    Ok(PrecReal::from_float((lhs - rhs).abs(), ctx))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::precision::pow10;

    fn below(r: &PrecReal, e: i64, ctx: &PrecisionContext) -> bool {
        *r.value() < pow10(e, ctx.bits())
    }

    #[test]
    fn bailey_at_origin_is_exact() {
        let c = PrecisionContext::new(50);
        assert!(check_bailey(&c.real(0), &c).unwrap().is_zero());
    }

    #[test]
    fn bailey_sample_points() {
        let c = PrecisionContext::new(200);
        for (n, d) in [(1i32, 100u32), (-1, 50), (-1, 20), (1, 50)] {
            let x = PrecReal::from_float(Float::with_val(c.bits(), n) / d, &c);
            let r = check_bailey(&x, &c).unwrap();
            assert!(below(&r, -180, &c), "x = {n}/{d}");
        }
    }

    #[test]
    fn bailey_domain() {
        let c = PrecisionContext::new(30);
        assert!(check_bailey(&c.real(0.3), &c).is_err());
        assert!(check_bailey(&c.real(-2), &c).is_err());
        // 1 - 4x > 0 but |w| = 27·0.1/0.216 > 1
        assert!(check_bailey(&c.real(0.1), &c).is_err());
    }

    #[test]
    fn k_generating_function_at_origin() {
        let c = PrecisionContext::new(60);
        let r = check_k_generating_function(&c.real(0), &c).unwrap();
        assert!(below(&r, -55, &c));
    }

    #[test]
    fn k_generating_function_sample_points() {
        let c = PrecisionContext::new(200);
        let quarter = PrecReal::from_float(Float::with_val(c.bits(), 1) / 4u32, &c);
        assert!(below(
            &check_k_generating_function(&quarter, &c).unwrap(),
            -180,
            &c
        ));
        let k = Float::with_val(c.bits(), 3) / 10u32;
        let k2 = Float::with_val(c.bits(), k.square_ref());
        let x = Float::with_val(c.bits(), &k2 - k2.clone().square()) * 4u32;
        let x = PrecReal::from_float(x, &c);
        assert!(below(
            &check_k_generating_function(&x, &c).unwrap(),
            -180,
            &c
        ));
    }

    #[test]
    fn k_generating_function_domain() {
        let c = PrecisionContext::new(30);
        assert!(check_k_generating_function(&c.real(1), &c).is_err());
        assert!(check_k_generating_function(&c.real(-0.1), &c).is_err());
    }

    #[test]
    fn cube_sum_small_values() {
        let c = PrecisionContext::new(30);
        let s = central_binomial_cube_sum(&c.real(0.5), &c)
            .unwrap()
            .to_f64();
        let (mut t, mut direct) = (1.0f64, 0.0f64);
        for n in 0..200 {
            direct += t;
            let m = n as f64;
            t *= 0.5 * (m + 0.5).powi(3) / (m + 1.0).powi(3);
        }
        assert!((s - direct).abs() < 1e-14);
        assert!(central_binomial_cube_sum(&c.real(1), &c).is_err());
    }
}
