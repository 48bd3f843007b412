//! Binomials with symbolic upper entry, exact Lagrange interpolation, and
//! closed forms for iterated power sums.

use super::multipoly::{MultiPoly, Var};
use super::rational::{q, Rational};
use super::CoeffError;
use num::traits::{One, Zero};
use num::BigInt;

/// Falling factorial `x(x-1)...(x-k+1)` for integer `x` (possibly negative).
pub fn falling_factorial(x: i64, k: u32) -> BigInt {
    let mut acc = BigInt::one();
    for t in 0..k as i64 {
        acc *= BigInt::from(x - t);
    }
    acc
}

/// Generalized integer binomial `x(x-1)...(x-k+1)/k!`, nonzero for negative `x`.
pub fn binom_general(x: i64, k: u32) -> BigInt {
    let mut fact = BigInt::one();
    for t in 1..=k as i64 {
        fact *= BigInt::from(t);
    }
    falling_factorial(x, k) / fact
}

/// Standard binomial: zero when `x < 0` or `x < k`.
pub fn binom_nonneg(x: i64, k: u32) -> BigInt {
    if x < 0 || x < k as i64 {
        BigInt::zero()
    } else {
        binom_general(x, k)
    }
}

/// Binomial coefficient with a polynomial upper entry:
/// `e (e-1) ... (e-j+1) / j!`.
pub fn symbolic_binomial(e: &MultiPoly, j: u32) -> MultiPoly {
    let mut acc = MultiPoly::one();
    for t in 0..j {
        acc = &acc * &(e - &MultiPoly::from_int(t as i64));
    }
    let mut fact = q(1);
    for t in 1..=j as i64 {
        fact *= q(t);
    }
    acc.scale(&(q(1) / fact))
}

/// Unique polynomial of degree `< samples.len()` in `var` through the given
/// points. Sample values may involve the remaining variables.
pub fn lagrange_interpolate(
    var: Var,
    samples: &[(Rational, MultiPoly)],
) -> Result<MultiPoly, CoeffError> {
    if samples.is_empty() {
        return Err(CoeffError::EmptySamples);
    }
    for (idx, (x, _)) in samples.iter().enumerate() {
        if samples[..idx].iter().any(|(y, _)| y == x) {
            return Err(CoeffError::DuplicatePoint(x.clone()));
        }
    }
    let x = MultiPoly::var(var);
    let mut result = MultiPoly::zero();
    for (i, (xi, yi)) in samples.iter().enumerate() {
        let mut basis = MultiPoly::one();
        let mut denom = q(1);
        for (j, (xj, _)) in samples.iter().enumerate() {
            if i == j {
                continue;
            }
            basis = &basis * &(&x - &MultiPoly::constant(xj.clone()));
            denom *= xi - xj;
        }
        result.add_assign(&(&basis.scale(&(q(1) / denom)) * yi));
    }
    Ok(result)
}

/// Closed form of `sum_{i=1}^{n} i^k` as a polynomial in `Var::N`.
///
/// Built from the telescoping identity
/// `n^(m+1) = sum_t binom(m+1, t) (-1)^(m-t) S_t(n)`.
pub fn power_sum(k: u32) -> MultiPoly {
    let n = MultiPoly::var(Var::N);
    let mut sums: Vec<MultiPoly> = Vec::with_capacity(k as usize + 1);
    for m in 0..=k {
        let mut acc = n.pow(m + 1);
        for (t, prev) in sums.iter().enumerate() {
            let sign = if (m as usize - t).is_multiple_of(2) { 1 } else { -1 };
            let c = Rational::from(binom_general(m as i64 + 1, t as u32)) * q(sign);
            acc.sub_assign(&prev.scale(&c));
        }
        sums.push(acc.scale(&(q(1) / q(m as i64 + 1))));
    }
    sums.pop().unwrap()
}

/// Symbolic summation `sum_{i=1}^{n} p(i)` where `p` is a polynomial in `Var::N`;
/// the result is again a polynomial in `Var::N`. Other variables pass through.
pub fn sum_first_n(p: &MultiPoly) -> MultiPoly {
    let mut out = MultiPoly::zero();
    for (d, coeff) in p.slices_in_var(Var::N).into_iter().enumerate() {
        if coeff.is_zero() {
            continue;
        }
        out.add_assign(&(&coeff * &power_sum(d as u32)));
    }
    out
}

/// Closed form of the nested sum
/// `sum_{1 <= i_1 < ... < i_k <= n} i_1^(a_1) ... i_k^(a_k)`
/// as a polynomial in `Var::N`. Vanishes at `n = 0, 1, ..., k-1`.
pub fn iterated_power_sum(a: &[u32]) -> MultiPoly {
    assert!(!a.is_empty(), "at least one exponent");
    let n = MultiPoly::var(Var::N);
    let mut inner = MultiPoly::one();
    for &exp in a {
        // sum_{i=1}^{n} i^exp * inner(i-1); the shifted inner vanishes on the
        // out-of-range prefix, so the lower limit can start at 1.
        let shifted = inner.subst_var(Var::N, &(&n - &MultiPoly::one()));
        let summand = &n.pow(exp) * &shifted;
        inner = sum_first_n(&summand);
    }
    inner
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::qr;

    #[test]
    fn symbolic_binomial_examples() {
        let mu = MultiPoly::var(Var::Mu);
        assert_eq!(symbolic_binomial(&mu, 0), MultiPoly::one());

        let lam = MultiPoly::var(Var::Lambda);
        let expect = (&lam.pow(2) - &lam).scale(&qr(1, 2));
        assert_eq!(symbolic_binomial(&lam, 2), expect);

        let n = MultiPoly::var(Var::N);
        let at5 = symbolic_binomial(&n, 3).eval_var(Var::N, &q(5));
        assert_eq!(at5, MultiPoly::from_int(10));
    }

    #[test]
    fn symbolic_binomial_vanishes_below_order() {
        let n = MultiPoly::var(Var::N);
        for j in 1..6u32 {
            let b = symbolic_binomial(&n, j);
            for m in 0..j {
                assert!(b.eval_var(Var::N, &q(m as i64)).is_zero());
            }
        }
    }

    #[test]
    fn interpolation_examples() {
        let n = Var::N;
        let samples = vec![
            (q(1), MultiPoly::one()),
            (q(2), MultiPoly::from_int(4)),
            (q(3), MultiPoly::from_int(9)),
        ];
        assert_eq!(
            lagrange_interpolate(n, &samples).unwrap(),
            MultiPoly::var(Var::N).pow(2)
        );

        let h = MultiPoly::var(Var::Hbar);
        assert_eq!(
            lagrange_interpolate(n, &[(q(0), h.clone())]).unwrap(),
            h.clone()
        );

        // Central-term samples k*hbar at k = 3, 4, 5 give n*hbar.
        let samples = vec![
            (q(3), h.scale(&q(3))),
            (q(4), h.scale(&q(4))),
            (q(5), h.scale(&q(5))),
        ];
        let got = lagrange_interpolate(n, &samples).unwrap();
        assert_eq!(got, &MultiPoly::var(Var::N) * &h);
    }

    #[test]
    fn interpolation_rejects_duplicates() {
        let samples = vec![(q(1), MultiPoly::one()), (q(1), MultiPoly::one())];
        match lagrange_interpolate(Var::N, &samples) {
            Err(CoeffError::DuplicatePoint(p)) => assert_eq!(p, q(1)),
            other => panic!("expected duplicate-point error, got {:?}", other),
        }
    }

    #[test]
    fn interpolation_reproduces_samples_exactly() {
        let samples: Vec<(Rational, MultiPoly)> = (0..5)
            .map(|k| (q(k), MultiPoly::from_int(k * k * k - 2 * k + 1)))
            .collect();
        let p = lagrange_interpolate(Var::N, &samples).unwrap();
        for (x, y) in &samples {
            assert_eq!(&p.eval_var(Var::N, x), y);
        }
    }

    #[test]
    fn power_sum_examples() {
        let n = MultiPoly::var(Var::N);
        assert_eq!(power_sum(0), n.clone());
        assert_eq!(
            power_sum(1),
            (&n.pow(2) + &n).scale(&qr(1, 2)) // n(n+1)/2
        );
    }

    fn brute_iterated(a: &[u32], n: u32) -> Rational {
        fn rec(a: &[u32], lo: u32, n: u32) -> Rational {
            if a.is_empty() {
                return q(1);
            }
            let mut acc = q(0);
            for i in lo..=n {
                let mut term = q(1);
                for _ in 0..a[0] {
                    term *= q(i as i64);
                }
                acc += term * rec(&a[1..], i + 1, n);
            }
            acc
        }
        rec(a, 1, n)
    }

    #[test]
    fn iterated_power_sum_examples() {
        let n = MultiPoly::var(Var::N);
        assert_eq!(iterated_power_sum(&[0]), n.clone());
        assert_eq!(iterated_power_sum(&[1]), (&n.pow(2) + &n).scale(&qr(1, 2)));
        assert_eq!(
            iterated_power_sum(&[0, 0]),
            (&n.pow(2) - &n).scale(&qr(1, 2))
        );
    }

    #[test]
    fn iterated_power_sum_matches_brute_force_and_roots() {
        let tuples: Vec<Vec<u32>> = vec![
            vec![2],
            vec![0, 1],
            vec![1, 2],
            vec![0, 0, 1],
            vec![2, 1, 0],
            vec![1, 1, 2, 0],
        ];
        for a in &tuples {
            let p = iterated_power_sum(a);
            let k = a.len() as u32;
            let deg: u32 = a.iter().sum::<u32>() + k;
            for n in 1..=(k + deg + 2) {
                assert_eq!(
                    p.eval_var(Var::N, &q(n as i64)).expect_constant().unwrap(),
                    brute_iterated(a, n),
                    "tuple {:?} at n={}",
                    a,
                    n
                );
            }
            for root in 0..k {
                assert!(p.eval_var(Var::N, &q(root as i64)).is_zero());
            }
        }
    }
}
