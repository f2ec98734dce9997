//! Kronecker symbol and class numbers of imaginary quadratic fields.

use std::fmt;

use rug::{Integer, Rational};

use crate::error::{Error, Result};
use crate::precision::BigInt;

/// `d > 0` such that `-d` is a discriminant, i.e. `-d ≡ 0, 1 (mod 4)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Discriminant(u64);

impl Discriminant {
    pub fn new(d: u64) -> Result<Self> {
        if d == 0 || !(d.is_multiple_of(4) || d % 4 == 3) {
            return Err(Error::InvalidArgument(format!(
                "-{d} is not a discriminant (need -d ≡ 0 or 1 mod 4)"
            )));
        }
        Ok(Self(d))
    }

    pub fn get(self) -> u64 {
        self.0
    }

    /// Whether `-d` is a fundamental discriminant.
    pub fn is_fundamental(self) -> bool {
        let d = self.0;
        if d % 4 == 3 {
            return is_squarefree(d);
        }
        let m = d / 4;
        matches!(m % 4, 1 | 2) && is_squarefree(m)
    }
}

impl fmt::Display for Discriminant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "-{}", self.0)
    }
}

fn is_squarefree(n: u64) -> bool {
    let mut p = 2u64;
    let mut n = n;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return false;
            }
        }
        p += 1;
    }
    true
}

/// Fundamental discriminants `-d` with `lo <= d <= hi`.
pub fn fundamental_discriminants(lo: u64, hi: u64) -> Vec<Discriminant> {
    (lo.max(3)..=hi)
        .filter_map(|d| Discriminant::new(d).ok())
        .filter(|d| d.is_fundamental())
        .collect()
}

/// Kronecker symbol `(a/n)`.
pub fn kronecker(a: &BigInt, n: &BigInt) -> i32 {
    if *n == 0 {
        return i32::from(Integer::from(a.abs_ref()) == 1);
    }
    let mut sign = 1;
    let mut n = n.clone();
    if n < 0 {
        n = -n;
        if *a < 0 {
            sign = -sign;
        }
    }
    let twos = n.find_one(0).unwrap_or(0);
    if twos > 0 {
        if a.is_even() {
            return 0;
        }
        n >>= twos;
        let r = a.mod_u(8);
        if twos % 2 == 1 && (r == 3 || r == 5) {
            sign = -sign;
        }
    }
    // Jacobi symbol for odd positive n
    let mut a = a.clone().div_rem_euc(n.clone()).1;
    while a != 0 {
        let t = a.find_one(0).unwrap_or(0);
        a >>= t;
        let r = n.mod_u(8);
        if t % 2 == 1 && (r == 3 || r == 5) {
            sign = -sign;
        }
        if a.mod_u(4) == 3 && n.mod_u(4) == 3 {
            sign = -sign;
        }
        std::mem::swap(&mut a, &mut n);
        a = a.clone().div_rem_euc(n.clone()).1;
    }
    if n == 1 {
        sign
    } else {
        0
    }
}

pub fn kronecker_i64(a: i64, n: i64) -> i32 {
    kronecker(&Integer::from(a), &Integer::from(n))
}

fn units(d: u64) -> u64 {
    match d {
        3 => 6,
        4 => 4,
        _ => 2,
    }
}

/// `h(-d) = -(w/2d) Σ_{n=1}^{d-1} (-d/n) n`.
pub fn class_number_sum(d: Discriminant) -> Result<u64> {
    let dv = d.get();
    if dv < 3 {
        return Err(Error::InvalidArgument("class number needs d >= 3".into()));
    }
    let minus_d = -Integer::from(dv);
    let mut sum = Integer::new();
    for n in 1..dv {
        match kronecker(&minus_d, &Integer::from(n)) {
            1 => sum += n,
            -1 => sum -= n,
            _ => {}
        }
    }
    let h = -Rational::from((sum * units(dv), Integer::from(2 * dv)));
    if *h.denom() != 1 || *h.numer() <= 0 {
        return Err(Error::Consistency(format!(
            "class-number sum for {d} gives {h}, not a positive integer"
        )));
    }
    h.numer()
        .to_u64()
        .ok_or_else(|| Error::Consistency(format!("class number for {d} overflows")))
}

/// Reduced primitive forms `(A, B, C)` with `B² - 4AC = -d`.
pub fn reduced_forms(d: Discriminant) -> Vec<(u64, i64, u64)> {
    let dv = d.get();
    let mut out = Vec::new();
    let mut a = 1u64;
    // reduced forms have 3A² <= d
    while 3 * a * a <= dv {
        for b in -(a as i64)..=(a as i64) {
            let b2 = (b * b) as u64;
            if !(b2 + dv).is_multiple_of(4 * a) {
                continue;
            }
            let c = (b2 + dv) / (4 * a);
            if c < a {
                continue;
            }
            if b < 0 && (b.unsigned_abs() == a || a == c) {
                continue;
            }
            let g = Integer::from(a)
                .gcd(&Integer::from(b))
                .gcd(&Integer::from(c));
            if g == 1 {
                out.push((a, b, c));
            }
        }
        a += 1;
    }
    out
}

pub fn class_number_forms(d: Discriminant) -> u64 {
    reduced_forms(d).len() as u64
}
