use std::collections::BTreeMap;

use proptest::prelude::*;

use supnorm::arith::{
    centered, divisors, ext_gcd, is_square, isqrt, mod_inverse, p_adic_valuation, DirichletCharacter, SquarefreeModulus,
};
use supnorm::counting::{
    enumerate_a, enumerate_a_naive, enumerate_a_square, is_square_quad, valuation_inequality_holds, CountingInstance,
};
use supnorm::exponents::{monomial_mul, rat, ExponentBound, ExponentMonomial, Symbol};
use supnorm::kloosterman::{kloosterman_sum, kloosterman_weil_check, KloostermanQuery};
use supnorm::oscillatory::{dirichlet_approximate_exact, Shape, SmoothWindow};
use supnorm::transforms::{dot_transform_closed, dot_transform_closed_reversed, TestFunction};

fn squarefree() -> impl Strategy<Value = SquarefreeModulus> {
    (1u64..400).prop_filter_map("square-free", |n| SquarefreeModulus::new(n).ok())
}

fn character() -> impl Strategy<Value = DirichletCharacter> {
    squarefree().prop_flat_map(|m| {
        let k = m.primes().len();
        (Just(m), proptest::collection::vec(0u64..1000, k)).prop_map(|(m, e)| {
            let exps: Vec<u64> = e.iter().zip(m.primes()).map(|(x, p)| x % (p - 1).max(1)).collect();
            DirichletCharacter::from_exponents(m, &exps).unwrap()
        })
    })
}

fn symbol() -> impl Strategy<Value = Symbol> {
    prop_oneof![
        Just(Symbol::N),
        Just(Symbol::TStar),
        Just(Symbol::Z),
        Just(Symbol::L),
        Just(Symbol::H),
        Just(Symbol::Q)
    ]
}

fn monomial() -> impl Strategy<Value = ExponentMonomial> {
    proptest::collection::vec((symbol(), -40i64..40, 1i64..12), 0..4).prop_map(|parts| {
        parts.into_iter().fold(ExponentMonomial::one(), |m, (s, n, d)| {
            let e = m.exponent(s) + rat(n, d);
            m.with(s, e)
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn centered_residue_is_congruent_and_small(a in -1_000_000i128..1_000_000, m in 1i128..10_000) {
        let r = centered(a, m);
        prop_assert_eq!((a - r).rem_euclid(m), 0);
        prop_assert!(2 * r > -m && 2 * r <= m);
    }

    #[test]
    fn bezout(a in -1_000_000i128..1_000_000, b in -1_000_000i128..1_000_000) {
        let (g, x, y) = ext_gcd(a, b);
        prop_assert_eq!(a * x + b * y, g);
    }

    #[test]
    fn inverse_multiplies_to_one(a in -100_000i64..100_000, c in 2u64..50_000) {
        match mod_inverse(a, c) {
            Ok(x) => prop_assert_eq!((a as i128 * x as i128).rem_euclid(c as i128), 1),
            Err(_) => prop_assert!(num_integer::gcd(a.unsigned_abs(), c) != 1),
        }
    }

    #[test]
    fn square_detection(n in 0u64..3_000_000) {
        let r = isqrt(n as u128);
        prop_assert!(r * r <= n as u128 && (r + 1) * (r + 1) > n as u128);
        prop_assert_eq!(is_square((n as i128) * (n as i128)), true);
        prop_assert_eq!(is_square(n as i128), r * r == n as u128);
        prop_assert!(!is_square(-(n as i128) - 1));
    }

    #[test]
    fn valuation_counts_divisions(n in 1i128..10_000_000, p in prop_oneof![Just(2u64), Just(3), Just(5), Just(7)]) {
        let v = p_adic_valuation(n, p).unwrap();
        let pv = (p as i128).pow(v);
        prop_assert_eq!(n % pv, 0);
        prop_assert!((n / pv) % p as i128 != 0);
    }

    #[test]
    fn character_is_periodic_and_multiplicative(chi in character(), a in -5_000i128..5_000, b in -5_000i128..5_000) {
        let q = chi.modulus().value() as i128;
        prop_assert_eq!(chi.angle(a), chi.angle(a + 7 * q));
        prop_assert_eq!(chi.angle(a * b), chi.angle(a).zip(chi.angle(b)).map(|(x, y)| x.add(y)));
        prop_assert_eq!(chi.angle(a).map(|x| x.neg()), chi.conj().angle(a));
    }

    #[test]
    fn kloosterman_is_periodic_and_weil_bounded(
        chi in character(), k in 1u64..6, m in -300i64..300, n in -300i64..300
    ) {
        let c = chi.modulus().value() * k;
        prop_assume!(c <= 600);
        let q = KloostermanQuery::new(m, n, c, &chi).unwrap();
        let shifted = KloostermanQuery::new(m + c as i64, n - 2 * c as i64, c, &chi).unwrap();
        prop_assert_eq!(q.exact_terms(), shifted.exact_terms());
        if chi.is_trivial() {
            prop_assert!(kloosterman_weil_check(&q).ratio <= 1.0 + 1e-9);
        }
        let s = kloosterman_sum(&q);
        prop_assert!(s.norm() <= c as f64 + 1e-9);
    }

    #[test]
    fn dirichlet_approximation(num in 0i64..1_000_000, den in 1i64..1_000_000, h in 1i64..100_000) {
        let x = rat(num, den);
        let hh = rat(h, 1);
        let a = dirichlet_approximate_exact(&x, &hh).unwrap();
        prop_assert!(a.satisfies_invariants(&x, &hh));
        prop_assert!(a.q >= 1 && (a.q as i64) <= h);
    }

    #[test]
    fn quadruple_enumerators_agree(
        n in prop_oneof![Just(7u64), Just(11), Just(15), Just(21), Just(97)],
        u in 1i64..97, d1 in 1i64..4, d2 in 1i64..4,
        c in 1.0f64..8.0, s in 0.0f64..12.0, r in 0.0f64..6.0, rt in 0.0f64..6.0
    ) {
        let inst = CountingInstance::new(c, s, r, rt, d1, d2, u, SquarefreeModulus::new(n).unwrap()).unwrap();
        let a = enumerate_a(&inst).unwrap();
        prop_assert_eq!(&a, &enumerate_a_naive(&inst).unwrap());
        prop_assert!(a.iter().all(|q| inst.satisfies(q)));
        if d1 == 1 && d2 == 1 {
            let sq = enumerate_a_square(&inst).unwrap();
            prop_assert_eq!(sq, a.into_iter().filter(is_square_quad).collect::<Vec<_>>());
        }
    }

    #[test]
    fn valuation_rule_holds_for_multiples(l1 in 1i64..40, l2 in 1i64..40, c in 1i64..40, k in -50i128..50) {
        // any multiple of lcm(l1, l2, c)'s relevant part satisfies the rule
        let s = k * (l1 as i128) * (l2 as i128) * (c as i128);
        prop_assert!(valuation_inequality_holds(s, l1, l2, c).unwrap());
    }

    #[test]
    fn monomials_form_a_group(a in monomial(), b in monomial(), c in monomial()) {
        prop_assert_eq!(monomial_mul(&monomial_mul(&a, &b), &c), monomial_mul(&a, &monomial_mul(&b, &c)));
        prop_assert_eq!(monomial_mul(&a, &b), monomial_mul(&b, &a));
        prop_assert!(monomial_mul(&a, &a.inv()).is_one());
        prop_assert_eq!(a.pow(&rat(2, 1)), monomial_mul(&a, &a));
        let tau = rat(1, 200);
        let sizes = |m: &ExponentMonomial| {
            ExponentMonomial::one().with(Symbol::N, m.exponent(Symbol::N)).with(Symbol::TStar, m.exponent(Symbol::TStar))
        };
        let (a, b) = (sizes(&a), sizes(&b));
        prop_assert_eq!(
            monomial_mul(&a, &b).log_size(&tau).unwrap(),
            a.log_size(&tau).unwrap() + b.log_size(&tau).unwrap()
        );
    }

    #[test]
    fn square_root_of_a_bound_squares_back(ms in proptest::collection::vec(monomial(), 1..5)) {
        let b = ExponentBound::new(ms, true).unwrap();
        let back: Vec<ExponentMonomial> = b.sqrt().monomials.iter().map(|m| m.pow(&rat(2, 1))).collect();
        prop_assert!(ExponentBound::new(back, true).unwrap().same_terms(&b));
    }

    #[test]
    fn substitution_is_multiplicative(a in monomial(), b in monomial(), h in monomial()) {
        let subs: BTreeMap<Symbol, ExponentMonomial> = [(Symbol::H, h.with(Symbol::H, rat(0, 1)))].into_iter().collect();
        prop_assert_eq!(
            monomial_mul(&a, &b).substitute(&subs),
            monomial_mul(&a.substitute(&subs), &b.substitute(&subs))
        );
    }

    #[test]
    fn window_vanishes_off_support(z in 1.0f64..1e6, frac in 0.0f64..1.0, x in -2.0f64..3.0, part in any::<bool>()) {
        let t = 1.0 + frac * (z - 1.0);
        let shape = if part { Shape::Partition } else { Shape::LogBump };
        let w = SmoothWindow::new(z, t, shape).unwrap();
        let (lo, hi) = w.support();
        let p = z + x * t;
        let v = w.value(p);
        prop_assert!((0.0..=1.0).contains(&v));
        if p <= lo || p >= hi {
            prop_assert_eq!(v, 0.0);
        }
    }

    #[test]
    fn closed_transform_is_order_independent(a in 6u32..16, b in 1u32..6, k in 1u32..12) {
        let tf = TestFunction::new(a, b);
        prop_assume!(tf.is_ok());
        let tf = tf.unwrap();
        let k = 2 * k;
        prop_assert_eq!(dot_transform_closed(&tf, k).unwrap().over_pi, dot_transform_closed_reversed(&tf, k).unwrap());
    }
}

#[test]
fn divisor_counts() {
    assert_eq!(divisors(1), vec![1]);
    assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
}
