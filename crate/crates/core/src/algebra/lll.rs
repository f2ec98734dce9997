//! Integral LLL reduction.
//!
//! All Gram–Schmidt data is kept as exact integers (`d_i` and `λ_{k,j}`
//! scaled by the Gram determinants), so the reduced basis does not depend on
//! floating-point behavior.

use rug::{Integer, Rational};

use crate::error::{Error, Result};
use crate::precision::{BigInt, BigRational};

/// A lattice basis, one row per vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntLattice {
    pub rows: Vec<Vec<BigInt>>,
}

impl IntLattice {
    pub fn new(rows: Vec<Vec<BigInt>>) -> Result<Self> {
        if let Some(first) = rows.first() {
            if rows.iter().any(|r| r.len() != first.len()) {
                return Err(Error::InvalidArgument(
                    "lattice rows differ in length".into(),
                ));
            }
        }
        Ok(Self { rows })
    }

    pub fn from_i64(rows: &[&[i64]]) -> Result<Self> {
        Self::new(
            rows.iter()
                .map(|r| r.iter().map(|&v| Integer::from(v)).collect())
                .collect(),
        )
    }

    pub fn identity(n: usize) -> Self {
        Self {
            rows: (0..n)
                .map(|i| (0..n).map(|j| Integer::from((i == j) as u8)).collect())
                .collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }
}

fn dot(a: &[Integer], b: &[Integer]) -> Integer {
    let mut acc = Integer::new();
    for (x, y) in a.iter().zip(b) {
        acc += x * y;
    }
    acc
}

/// Nearest integer to `num/den` for `den > 0`, ties toward +∞.
fn round_div(num: &Integer, den: &Integer) -> Integer {
    let twice = Integer::from(num * 2u32) + den;
    twice.div_rem_floor(Integer::from(den * 2u32)).0
}

struct State {
    b: Vec<Vec<Integer>>,
    // 1-based: d[0] = 1, d[i] for row i
    d: Vec<Integer>,
    // lambda[k][j] for j < k, 1-based
    lambda: Vec<Vec<Integer>>,
}

impl State {
    fn red(&mut self, k: usize, l: usize) {
        let two_lambda = Integer::from(&self.lambda[k][l] * 2u32);
        if Integer::from(two_lambda.abs_ref()) <= self.d[l] {
            return;
        }
        let q = round_div(&self.lambda[k][l], &self.d[l]);
        let (bk, bl) = pair_mut(&mut self.b, k - 1, l - 1);
        for (x, y) in bk.iter_mut().zip(bl.iter()) {
            *x -= Integer::from(&q * y);
        }
        self.lambda[k][l] -= Integer::from(&q * &self.d[l]);
        for i in 1..l {
            let t = Integer::from(&q * &self.lambda[l][i]);
            self.lambda[k][i] -= t;
        }
    }

    fn swap(&mut self, k: usize, kmax: usize) {
        self.b.swap(k - 1, k - 2);
        for j in 1..k - 1 {
            let t = std::mem::take(&mut self.lambda[k][j]);
            self.lambda[k][j] = std::mem::replace(&mut self.lambda[k - 1][j], t);
        }
        let lam = self.lambda[k][k - 1].clone();
        let big_b = (Integer::from(&self.d[k - 2] * &self.d[k]) + Integer::from(lam.square_ref()))
            / &self.d[k - 1];
        for i in k + 1..=kmax {
            let t = self.lambda[i][k].clone();
            let new_ik = (Integer::from(&self.d[k] * &self.lambda[i][k - 1])
                - Integer::from(&lam * &t))
                / &self.d[k - 1];
            let new_ik1 = (Integer::from(&big_b * &t) + Integer::from(&lam * &new_ik)) / &self.d[k];
            self.lambda[i][k] = new_ik;
            self.lambda[i][k - 1] = new_ik1;
        }
        self.d[k - 1] = big_b;
    }
}

fn pair_mut<T>(v: &mut [T], a: usize, b: usize) -> (&mut T, &T) {
    assert_ne!(a, b);
    if a < b {
        let (lo, hi) = v.split_at_mut(b);
        (&mut lo[a], &hi[0])
    } else {
        let (lo, hi) = v.split_at_mut(a);
        (&mut hi[0], &lo[b])
    }
}

/// LLL-reduces `lattice` with Lovász parameter `delta ∈ (1/4, 1]`.
pub fn lll_reduce(lattice: &IntLattice, delta: &BigRational) -> Result<IntLattice> {
    if *delta <= Rational::from((1, 4)) || *delta > 1 {
        return Err(Error::InvalidArgument(format!(
            "LLL parameter must lie in (1/4, 1], got {delta}"
        )));
    }
    let n = lattice.dim();
    if n == 0 {
        return Ok(lattice.clone());
    }
    let (p, q) = (delta.numer().clone(), delta.denom().clone());
    let mut s = State {
        b: lattice.rows.clone(),
        d: vec![Integer::new(); n + 1],
        lambda: vec![vec![Integer::new(); n + 1]; n + 1],
    };
    s.d[0] = Integer::from(1);
    s.d[1] = dot(&s.b[0], &s.b[0]);
    if s.d[1] == 0 {
        return Err(Error::DependentRows);
    }
    let mut k = 2;
    let mut kmax = 1;
    while k <= n {
        if k > kmax {
            kmax = k;
            for j in 1..=k {
                let mut u = dot(&s.b[k - 1], &s.b[j - 1]);
                for i in 1..j {
                    u = (Integer::from(&s.d[i] * &u)
                        - Integer::from(&s.lambda[k][i] * &s.lambda[j][i]))
                        / &s.d[i - 1];
                }
                if j < k {
                    s.lambda[k][j] = u;
                } else {
                    if u == 0 {
                        return Err(Error::DependentRows);
                    }
                    s.d[k] = u;
                }
            }
        }
        loop {
            s.red(k, k - 1);
            // swap when q (d_k d_{k-2} + λ²) < p d_{k-1}²
            let lhs = Integer::from(&s.d[k] * &s.d[k - 2])
                + Integer::from(s.lambda[k][k - 1].square_ref());
            let lhs = lhs * &q;
            let rhs = Integer::from(s.d[k - 1].square_ref()) * &p;
            if lhs < rhs {
                s.swap(k, kmax);
                k = (k - 1).max(2);
                continue;
            }
            for l in (1..k - 1).rev() {
                s.red(k, l);
            }
            k += 1;
            break;
        }
    }
    Ok(IntLattice { rows: s.b })
}

/// Squared Gram–Schmidt norms and coefficients over the rationals.
pub fn gram_schmidt(lattice: &IntLattice) -> (Vec<BigRational>, Vec<Vec<BigRational>>) {
    let n = lattice.dim();
    let m = lattice.rows.first().map_or(0, Vec::len);
    let mut star: Vec<Vec<Rational>> = Vec::with_capacity(n);
    let mut norms = Vec::with_capacity(n);
    let mut mu = vec![vec![Rational::new(); n]; n];
    for i in 0..n {
        let mut v: Vec<Rational> = lattice.rows[i].iter().map(Rational::from).collect();
        for j in 0..i {
            let num = (0..m).fold(Rational::new(), |acc, t| {
                acc + Rational::from(&star[j][t] * &lattice.rows[i][t])
            });
            let coef = if norms[j] == 0 {
                Rational::new()
            } else {
                num / &norms[j]
            };
            for t in 0..m {
                v[t] -= Rational::from(&coef * &star[j][t]);
            }
            mu[i][j] = coef;
        }
        let norm = v.iter().fold(Rational::new(), |acc, x| {
            acc + Rational::from(x.square_ref())
        });
        norms.push(norm);
        star.push(v);
    }
    (norms, mu)
}

/// Checks size reduction and the Lovász condition exactly.
pub fn is_lll_reduced(lattice: &IntLattice, delta: &BigRational) -> bool {
    let (norms, mu) = gram_schmidt(lattice);
    let half = Rational::from((1, 2));
    for i in 0..lattice.dim() {
        for j in 0..i {
            if Rational::from(mu[i][j].abs_ref()) > half {
                return false;
            }
        }
        if i > 0 {
            let lhs = (delta - Rational::from(mu[i][i - 1].square_ref())) * &norms[i - 1];
            if norms[i] < lhs {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn delta() -> Rational {
        Rational::from((99, 100))
    }

    fn norm2(v: &[Integer]) -> Integer {
        dot(v, v)
    }

    fn det(rows: &[Vec<Integer>]) -> Rational {
        let (norms, _) = gram_schmidt(&IntLattice {
            rows: rows.to_vec(),
        });
        norms.into_iter().fold(Rational::from(1), |acc, x| acc * x)
    }

    #[test]
    fn identity_is_fixed() {
        let id = IntLattice::identity(4);
        assert_eq!(lll_reduce(&id, &delta()).unwrap(), id);
    }

    #[test]
    fn two_by_two_shortest() {
        let l = IntLattice::from_i64(&[&[1, 0], &[4, 1]]).unwrap();
        let r = lll_reduce(&l, &delta()).unwrap();
        assert_eq!(norm2(&r.rows[0]), 1);
        // exhaustive search confirms 1 is the minimum nonzero squared norm
        let mut best = i64::MAX;
        for a in -10i64..=10 {
            for b in -10i64..=10 {
                if (a, b) != (0, 0) {
                    let v = [a + 4 * b, b];
                    best = best.min(v[0] * v[0] + v[1] * v[1]);
                }
            }
        }
        assert_eq!(best, 1);
        assert!(is_lll_reduced(&r, &delta()));
    }

    #[test]
    fn dependent_rows_are_rejected() {
        let l = IntLattice::from_i64(&[&[1, 2, 3], &[2, 4, 6]]).unwrap();
        assert_eq!(lll_reduce(&l, &delta()), Err(Error::DependentRows));
        let l = IntLattice::from_i64(&[&[0, 0]]).unwrap();
        assert_eq!(lll_reduce(&l, &delta()), Err(Error::DependentRows));
    }

    #[test]
    fn bad_delta() {
        let l = IntLattice::identity(2);
        assert!(lll_reduce(&l, &Rational::from((1, 4))).is_err());
        assert!(lll_reduce(&l, &Rational::from((3, 2))).is_err());
    }

    #[test]
    fn classic_example() {
        let l = IntLattice::from_i64(&[&[1, 1, 1], &[-1, 0, 2], &[3, 5, 6]]).unwrap();
        let r = lll_reduce(&l, &Rational::from((3, 4))).unwrap();
        assert!(is_lll_reduced(&r, &Rational::from((3, 4))));
        assert_eq!(det(&l.rows), det(&r.rows));
        assert_eq!(norm2(&r.rows[0]), 1);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn reduction_preserves_volume_and_is_reduced(
            entries in proptest::collection::vec(-50i64..50, 16)
        ) {
            let rows: Vec<Vec<Integer>> =
                entries.chunks(4).map(|c| c.iter().map(|&v| Integer::from(v)).collect()).collect();
            let l = IntLattice::new(rows).unwrap();
            let vol = det(&l.rows);
            prop_assume!(vol != 0);
            let r = lll_reduce(&l, &delta()).unwrap();
            prop_assert!(is_lll_reduced(&r, &delta()));
            prop_assert_eq!(det(&r.rows), vol);
            prop_assert!(norm2(&r.rows[0]) <= norm2(&l.rows[0]));
        }
    }
}
