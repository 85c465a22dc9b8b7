use num_bigint::BigInt;
use num_integer::Integer;
use proptest::prelude::*;

use supercong_core::exact_arith::{
    congruent, int, rat, rational_to_residue, vp, Rational, Residue, Valuation, ValuedNumber,
};
use supercong_core::harness::{read_jsonl, record_to_json, run_sweep, ResultRecord, SweepSpec};
use supercong_core::padic_gamma::{a0, gamma_int_direct, GammaContext};
use supercong_core::pochhammer::{f_p_extract, p_factor_decompose, rising};
use supercong_core::supercongruence::{sum_s_general, sum_s_modular, ClaimKind};
use supercong_core::wz::{eval_f, eval_g};

const PRIMES: [u64; 4] = [3, 5, 7, 11];

fn prime() -> impl Strategy<Value = u64> {
    prop::sample::select(PRIMES.to_vec())
}

fn nonzero_rational() -> impl Strategy<Value = Rational> {
    (-10_000i64..10_000, 1i64..10_000)
        .prop_filter("nonzero", |(a, _)| *a != 0)
        .prop_map(|(a, b)| rat(a, b))
}

fn p_integral(p: u64) -> impl Strategy<Value = Rational> {
    (-5_000i64..5_000, 1i64..5_000)
        .prop_filter("p-integral", move |(_, b)| *b as u64 % p != 0)
        .prop_map(|(a, b)| rat(a, b))
}

fn prime_and_p_integral() -> impl Strategy<Value = (u64, Rational)> {
    prime().prop_flat_map(|p| (Just(p), p_integral(p)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn valuation_is_additive_and_ultrametric(a in nonzero_rational(), b in nonzero_rational(), p in prime()) {
        prop_assert_eq!(vp(&(&a * &b), p), vp(&a, p) + vp(&b, p));
        let (va, vb) = (vp(&a, p), vp(&b, p));
        let vs = vp(&(&a + &b), p);
        prop_assert!(vs >= va.min(vb));
        if va != vb {
            prop_assert_eq!(vs, va.min(vb));
        }
    }

    #[test]
    fn residue_reduction_is_multiplicative(
        (p, a) in prime_and_p_integral(), b in -5_000i64..5_000, c in 1i64..5_000, m in 1u32..5
    ) {
        prop_assume!(c as u64 % p != 0);
        let b = rat(b, c);
        let ra = rational_to_residue(&a, p, m).unwrap();
        let rb = rational_to_residue(&b, p, m).unwrap();
        prop_assert_eq!(ra.checked_mul(&rb).unwrap(), rational_to_residue(&(&a * &b), p, m).unwrap());
        prop_assert_eq!(ra.checked_add(&rb).unwrap(), rational_to_residue(&(&a + &b), p, m).unwrap());
    }

    #[test]
    fn congruent_matches_cleared_denominators(
        (p, a) in prime_and_p_integral(), b in -5_000i64..5_000, c in 1i64..5_000, r in 1i64..6
    ) {
        prop_assume!(c as u64 % p != 0);
        let b = rat(b, c);
        // a - b = N / D with p ∤ D, so the congruence is p^r | N
        let diff = &a - &b;
        let n = diff.numer().clone();
        let brute = n.mod_floor(&BigInt::from(p).pow(r as u32)) == BigInt::from(0);
        prop_assert_eq!(congruent(&a, &b, p, r).holds, brute);
    }

    #[test]
    fn valued_round_trip(q in nonzero_rational(), p in prime(), m in 1u32..6) {
        let v = ValuedNumber::from_rational(&q, p, m).unwrap();
        let e = v.valuation().finite().unwrap();
        prop_assert_eq!(vp(&q, p), Valuation::Finite(e));
        prop_assert!(v.unit().is_unit());
        if e >= 0 {
            // q ≡ p^v u (mod p^{M+v})
            prop_assert!(congruent(&q, &v.lift(), p, m as i64 + e).holds);
        }
    }

    #[test]
    fn inverse_is_two_sided((p, a) in prime_and_p_integral(), m in 1u32..6) {
        let r = rational_to_residue(&a, p, m).unwrap();
        if r.is_unit() {
            prop_assert_eq!(r.checked_mul(&r.inverse().unwrap()).unwrap(), Residue::one(p, m).unwrap());
        } else {
            prop_assert!(r.inverse().is_err());
        }
    }
}

fn gamma_contexts() -> Vec<GammaContext> {
    PRIMES.iter().flat_map(|&p| (1..=4).map(move |m| GammaContext::new(p, m).unwrap())).collect()
}

#[test]
fn gamma_periodicity_exhaustive_p3() {
    for m in 1..=4 {
        let ctx = GammaContext::new(3, m).unwrap();
        let q = ctx.modulus();
        for n in 1..=q {
            assert_eq!(ctx.gamma_int(n).unwrap(), gamma_int_direct(3, m, n + q).unwrap(), "n={n} M={m}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn gamma_periodicity_sampled(p in prop::sample::select(vec![5u64, 7, 11]), m in 1u32..=4, seed in any::<u64>()) {
        let ctx = GammaContext::new(p, m).unwrap();
        let q = ctx.modulus();
        let n = 1 + seed % q;
        prop_assert_eq!(ctx.gamma_int(n).unwrap(), gamma_int_direct(p, m, n + q).unwrap());
    }

    #[test]
    fn gamma_reflection_and_functional_equation((p, x) in prime_and_p_integral(), m in 1u32..=4) {
        let ctx = GammaContext::new(p, m).unwrap();
        let one = int(1);
        let gx = ctx.gamma_rational(&x).unwrap();
        let refl = gx.checked_mul(&ctx.gamma_rational(&(&one - &x)).unwrap()).unwrap();
        prop_assert_eq!(refl, gx.sign(a0(&x, p).unwrap().a0 as i64));

        let next = ctx.gamma_rational(&(&x + &one)).unwrap();
        let factor = if vp(&x, p) == Valuation::Finite(0) {
            rational_to_residue(&x, p, m).unwrap().neg()
        } else {
            gx.sign(1)
        };
        prop_assert_eq!(next, gx.checked_mul(&factor).unwrap());
    }

    #[test]
    fn gamma_entry_points_agree(p in prime(), m in 1u32..=4, seed in any::<u64>()) {
        let ctx = GammaContext::new(p, m).unwrap();
        let n = 1 + seed % ctx.modulus();
        prop_assert_eq!(ctx.gamma_rational(&int(n as i64)).unwrap(), ctx.gamma_int(n).unwrap());
    }

    #[test]
    fn rising_is_multiplicative(a in -40i64..40, b in 1i64..12, m in 0u64..50, n in 0u64..50) {
        let a = rat(a, b);
        prop_assert_eq!(rising(&a, m + n), rising(&a, m) * rising(&(&a + int(m as i64)), n));
    }

    #[test]
    fn p_part_matches_valuation((p, a) in prime_and_p_integral(), n in 0u64..80) {
        prop_assume!(!(0..n).any(|i| &a + int(i as i64) == int(0)));
        let part = f_p_extract(&a, n, p).unwrap();
        let full = rising(&a, n);
        prop_assert_eq!(Valuation::Finite(part.p_power), vp(&full, p));
        prop_assert_eq!(vp(&part.deflated, p), Valuation::Finite(0));
    }

    #[test]
    fn p_factor_certificate((p, a) in prime_and_p_integral(), seed in any::<u64>()) {
        let n = seed % (p * p + 1);
        prop_assume!(!(0..n).any(|i| &a + int(i as i64) == int(0)));
        let ctx = GammaContext::new(p, 6).unwrap();
        let dec = p_factor_decompose(&a, n, &ctx).unwrap();
        prop_assert!(dec.cofactor_check);
        for i in 0..n {
            let listed = dec.indices.contains(&i);
            prop_assert_eq!(listed, vp(&(&a + int(i as i64)), p).at_least(1));
        }
    }

    #[test]
    fn modular_sum_matches_exact(d in 2u64..8, m in 0u64..=200, p in prime(), prec in 2u32..6) {
        let exact = sum_s_general(d, m).unwrap();
        match sum_s_modular(d, m, p, prec) {
            Ok(v) => prop_assert_eq!(v, ValuedNumber::from_rational(&exact, p, prec).unwrap()),
            Err(supercong_core::Error::PrecisionLoss { .. }) => {}
            Err(e) => prop_assert!(false, "{e}"),
        }
    }

    #[test]
    fn wz_support(n in 0u64..30, k in 0u64..30) {
        if k > n {
            prop_assert_eq!(eval_f(n, k), int(0));
            prop_assert_eq!(eval_g(n, k), int(0));
        }
        if n == 0 {
            prop_assert_eq!(eval_g(n, k), int(0));
        }
    }
}

#[test]
fn gamma_memo_is_consistent_under_threads() {
    use rayon::prelude::*;
    let ctx = GammaContext::new(3, 15).unwrap();
    let ns: Vec<u64> = (0..64).map(|i| 1 + (i * 224_737) % ctx.modulus()).collect();
    let seq: Vec<Residue> = ns.iter().map(|&n| gamma_int_direct(3, 15, n).unwrap()).collect();
    let par: Vec<Residue> = ns.par_iter().map(|&n| ctx.gamma_int(n).unwrap()).collect();
    assert_eq!(seq, par);
    for c in gamma_contexts() {
        assert_eq!(c.gamma_int(1).unwrap().value(), c.modulus() - 1);
    }
}

#[test]
fn sweep_is_independent_of_parallelism() {
    let mut spec = SweepSpec::new(ClaimKind::GuoF2, 3, 13);
    spec.exponents = vec![1, 2];
    spec.divisors = vec![3, 4, 5];
    spec.reproducible = true;
    let one = run_sweep(&spec).unwrap();
    spec.jobs = 8;
    let eight = run_sweep(&spec).unwrap();
    assert_eq!(one, eight);
    assert!(!one.is_empty());
}

#[test]
fn records_round_trip_through_json() {
    let mut spec = SweepSpec::new(ClaimKind::F1, 5, 17);
    spec.jobs = 2;
    for rec in run_sweep(&spec).unwrap() {
        let text = record_to_json(&rec);
        let back: ResultRecord = serde_json::from_str(&text).unwrap();
        assert_eq!(back, rec);
        assert_eq!(read_jsonl(&text).unwrap(), vec![rec]);
    }
}
