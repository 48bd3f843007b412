//! Randomized algebraic property tests: ring axioms for the coefficient
//! layers, derivation and weight laws for differential polynomials, and
//! round trips between symmetric-function bases.

use proptest::prelude::*;
use vertexalg::coeff::{q, MultiPoly, RatFunc, Var};
use vertexalg::diffpoly::symfun::{expand_e, m_poly, sym_to_elementary, sym_to_monomial, Partition};
use vertexalg::diffpoly::{DiffGen, DiffPoly, FAM_U};

fn arb_poly() -> impl Strategy<Value = MultiPoly> {
    // sparse polynomials in nu, hbar with small integer coefficients
    proptest::collection::vec(((0u16..4, 0u16..4), -6i64..=6), 0..6).prop_map(|terms| {
        let mut p = MultiPoly::zero();
        for ((e1, e2), c) in terms {
            let mono = {
                let mut m = vertexalg::coeff::Mono::unit();
                m.0[Var::Nu as usize] = e1;
                m.0[Var::Hbar as usize] = e2;
                m
            };
            p.add_assign(&MultiPoly::monomial(mono, q(c)));
        }
        p
    })
}

// Small operands for the laws that reduce fractions: the pseudo-remainder
// gcd is meant for the structured denominators the algebra produces, not for
// dense random bivariate inputs.
fn arb_small_poly() -> impl Strategy<Value = MultiPoly> {
    proptest::collection::vec(((0u16..3, 0u16..3), -4i64..=4), 0..3).prop_map(|terms| {
        let mut p = MultiPoly::zero();
        for ((e1, e2), c) in terms {
            let mono = {
                let mut m = vertexalg::coeff::Mono::unit();
                m.0[Var::Nu as usize] = e1;
                m.0[Var::Hbar as usize] = e2;
                m
            };
            p.add_assign(&MultiPoly::monomial(mono, q(c)));
        }
        p
    })
}

fn arb_diffpoly() -> impl Strategy<Value = DiffPoly> {
    proptest::collection::vec(((1u16..4, 0u16..3), -4i64..=4), 0..4).prop_map(|gens| {
        let mut p = DiffPoly::zero();
        for ((j, d), c) in gens {
            let term = DiffPoly::gen(DiffGen::new(FAM_U, j, d)).scale(&RatFunc::from_int(c));
            p.add_assign(&term);
        }
        p
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn multipoly_ring_axioms(a in arb_poly(), b in arb_poly(), c in arb_poly()) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&(&a + &b) - &b, a.clone());
        prop_assert_eq!(&a * &b, &b * &a);
    }

    #[test]
    fn ratfunc_exact_cancellation(a in arb_poly(), b in arb_poly()) {
        prop_assume!(!b.is_zero());
        let r = RatFunc::new(&a * &b, b.clone());
        prop_assert_eq!(r, RatFunc::from_poly(a));
    }

    #[test]
    fn ratfunc_field_laws(a in arb_small_poly(), b in arb_small_poly(), d in arb_small_poly()) {
        prop_assume!(!d.is_zero());
        let x = RatFunc::new(a.clone(), d.clone());
        let y = RatFunc::new(b.clone(), d.clone());
        // (a/d + b/d) * d = a + b
        let sum = &(&x + &y) * &RatFunc::from_poly(d.clone());
        prop_assert_eq!(sum, RatFunc::from_poly(&a + &b));
    }

    #[test]
    fn d_total_is_a_derivation(p in arb_diffpoly(), q_ in arb_diffpoly()) {
        let lhs = p.mul(&q_).d_total();
        let rhs = p.d_total().mul(&q_).add(&p.mul(&q_.d_total()));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn weight_additive_and_raised_by_derivation(
        (j1, d1) in (1u16..4, 0u16..3),
        (j2, d2) in (1u16..4, 0u16..3),
    ) {
        let a = DiffPoly::gen(DiffGen::new(FAM_U, j1, d1));
        let b = DiffPoly::gen(DiffGen::new(FAM_U, j2, d2));
        let prod = a.mul(&b);
        prop_assert_eq!(prod.weight(), Some((j1 + d1 + j2 + d2) as u32));
        prop_assert_eq!(prod.d_total().weight(), Some((j1 + d1 + j2 + d2) as u32 + 1));
    }
}

#[test]
fn symmetric_round_trips_to_size_eight() {
    // m-basis -> e-basis -> expansion is the identity for all partitions of
    // size <= 8 in <= 8 variables.
    fn partitions_of(size: u16) -> Vec<Partition> {
        fn rec(rest: u16, max: u16, cur: &mut Vec<u16>, out: &mut Vec<Partition>) {
            if rest == 0 {
                out.push(Partition::new(cur.clone()));
                return;
            }
            for p in (1..=rest.min(max)).rev() {
                cur.push(p);
                rec(rest - p, p, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(size, size, &mut Vec::new(), &mut out);
        out
    }
    for size in 1..=8u16 {
        for pi in partitions_of(size) {
            let n = 8usize;
            if pi.length() > n {
                continue;
            }
            let f = m_poly(&pi, n);
            let ep = sym_to_elementary(&f);
            assert_eq!(expand_e(&ep, n), f, "partition {pi}");
            let back = sym_to_monomial(&f);
            assert_eq!(back.len(), 1);
            assert_eq!(back.get(&pi), Some(&q(1)));
        }
    }
}
