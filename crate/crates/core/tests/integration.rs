use proptest::prelude::*;
use rug::Float;

use rpe_core::algebra::{real_roots, recognize_min_poly, IntPolynomial};
use rpe_core::elliptic::pi_reference;
use rpe_core::series::{chudnovsky_params, eval_chudnovsky_binsplit, partial_sums, pi_from_series};
use rpe_core::verify::{verify_all, Suite};
use rpe_core::{PrecReal, PrecisionContext};

#[test]
fn every_injected_fault_is_caught() {
    let ctx = PrecisionContext::new(200);
    for suite in Suite::ALL {
        let clean = suite.run(&ctx).unwrap();
        assert!(clean.overall, "{}", clean.to_text());
        let faulty = suite.run_with(&ctx, Some(suite.fault())).unwrap();
        assert!(!faulty.overall, "{} fault went unnoticed", suite.name());
    }
}

#[test]
fn reports_are_reproducible() {
    let ctx = PrecisionContext::new(120);
    let a = verify_all(&ctx).unwrap().to_json();
    let b = verify_all(&ctx).unwrap().to_json();
    assert_eq!(a, b);
    let v: serde_json::Value = serde_json::from_str(&a).unwrap();
    let names: Vec<&str> = v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    let mut sorted = names.clone();
    sorted.sort();
    assert_eq!(names, sorted);
}

#[test]
fn series_and_binsplit_agree_with_reference() {
    for digits in [30u32, 250, 1200] {
        let ctx = PrecisionContext::new(digits);
        let reference = pi_reference(&ctx).to_decimal_string(digits as usize);
        assert_eq!(eval_chudnovsky_binsplit(digits, 2), reference);
        let via_series = pi_from_series(&chudnovsky_params(&ctx), &ctx).unwrap();
        assert_eq!(via_series.to_decimal_string(digits as usize), reference);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn partial_sums_error_shrinks(n in 2usize..40) {
        let ctx = PrecisionContext::new(700);
        let pi = pi_reference(&ctx);
        let sums = partial_sums(&chudnovsky_params(&ctx), n, &ctx).unwrap();
        let err = |s: &PrecReal| (Float::with_val(ctx.bits(), s.value() * pi.value()) - 1u32).abs();
        prop_assert!(err(&sums[n - 1]) < err(&sums[n - 2]));
    }

    #[test]
    fn quadratic_roots_are_recognized(a in 1i64..200, b in -200i64..200, c in -200i64..-1) {
        // c < 0 < a gives two real roots
        let q = IntPolynomial::from_i64(&[c, b, a]);
        let ctx = PrecisionContext::new(120);
        let roots = real_roots(&q, &ctx).unwrap();
        prop_assert_eq!(roots.len(), 2);
        for r in roots {
            let found = recognize_min_poly(&r.value, 2, &ctx).unwrap();
            // q may be reducible or non-primitive; the found polynomial must divide it
            let residual = found.eval_float(r.value.value(), ctx.bits()).abs();
            prop_assert!(residual < rpe_core::precision::pow10(-60, ctx.bits()));
            prop_assert!(found.degree().unwrap() <= 2);
            let g = q.primitive();
            if found.degree() == Some(2) {
                prop_assert!(found == g || found == IntPolynomial::new(g.coeffs().iter().map(|x| -x.clone()).collect()));
            }
        }
    }
}
