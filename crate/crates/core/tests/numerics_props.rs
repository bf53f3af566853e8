use locperiod::numerics::exact::ratio;
use locperiod::numerics::{
    sum_with_error, to_approx, ApproxScalar, Ctx, EventualSeq, ExactCtx, ExactScalar, Scalar,
};
use num_rational::BigRational;
use num_traits::{FromPrimitive, Signed, Zero};
use proptest::prelude::*;

fn small_ratio() -> impl Strategy<Value = BigRational> {
    (-400i64..400, 1i64..60).prop_map(|(n, d)| ratio(n, d))
}

fn exact(q: u64) -> impl Strategy<Value = ExactScalar> {
    (small_ratio(), small_ratio()).prop_map(move |(a, b)| ExactScalar::new(a, b, q))
}

fn prime() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![2u64, 3, 5, 7])
}

/// `|re - (a + b sqrt q)| <= err`, decided in exact rational arithmetic.
fn encloses(x: &ExactScalar, y: &ApproxScalar) -> bool {
    let q = BigRational::from_integer(x.q().into());
    let err = BigRational::from_f64(y.err()).unwrap();
    let d = y.re() - x.rational_part();
    let target = x.surd_part() * x.surd_part() * q;
    let hi = (d.abs() + &err).pow(2);
    let lo = d.abs() - &err;
    let lo_ok = !lo.is_positive() || lo.pow(2) <= target;
    let sign_ok = x.surd_part().is_zero() || d.abs() <= err || d.signum() == x.surd_part().signum();
    y.im().is_zero() && target <= hi && lo_ok && sign_ok
}

proptest! {
    #[test]
    fn add_then_sub_round_trips((x, y) in prime().prop_flat_map(|q| (exact(q), exact(q)))) {
        prop_assert_eq!(x.checked_add(&y).unwrap().checked_sub(&y).unwrap(), x);
    }

    #[test]
    fn field_operations_are_consistent(x in exact(3), y in exact(3), z in exact(3)) {
        let lhs = x.checked_mul(&y.checked_add(&z).unwrap()).unwrap();
        let rhs = x.checked_mul(&y).unwrap().checked_add(&x.checked_mul(&z).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
        if !y.is_zero() {
            prop_assert_eq!(x.checked_mul(&y).unwrap().checked_div(&y).unwrap(), x);
        }
    }

    #[test]
    fn approximation_encloses_the_exact_value(q in prime(), x in exact(5), prec in 60u32..200) {
        let x = ExactScalar::new(x.rational_part().clone(), x.surd_part().clone(), q);
        let y = to_approx(&x, prec);
        prop_assert!(encloses(&x, &y), "{} vs {:?}", x, y);
        prop_assert!(y.err() <= 2f64.powi(-(prec as i32) + 12) * (1.0 + x.to_f64().abs()));
    }

    #[test]
    fn error_tracked_sums_enclose_exact_sums(xs in prop::collection::vec(exact(2), 0..12)) {
        let ctx = ExactCtx::new(2);
        let exact_sum = ctx.sum(&xs);
        let approx: Vec<_> = xs.iter().map(|x| to_approx(x, 80)).collect();
        prop_assert!(encloses(&exact_sum, &sum_with_error(&approx)));
    }

    #[test]
    fn recurrent_sums_match_partial_fractions(
        r1 in (-9i64..10).prop_map(|n| ratio(n, 10)),
        r2 in (-9i64..10).prop_map(|n| ratio(n, 11)),
        a in small_ratio(),
        b in small_ratio(),
        from in 0i64..6,
    ) {
        // s_n = a r1^n + b r2^n, summed from `from`
        let ctx = ExactCtx::new(2);
        let e = |x: &BigRational| ctx.rat(x);
        let term = |n: i64| &a * r1.pow(n as i32) + &b * r2.pow(n as i32);
        let rec = vec![e(&(&r1 + &r2)), e(&-(&r1 * &r2))];
        let s = EventualSeq::new(0, vec![e(&term(0)), e(&term(1))], rec);
        let one = BigRational::from_integer(1.into());
        let want = &a * r1.pow(from as i32) / (&one - &r1) + &b * r2.pow(from as i32) / (&one - &r2);
        prop_assert_eq!(s.sum_from(&ctx, from).unwrap(), e(&want));
        for n in 0..8 {
            prop_assert_eq!(s.value(&ctx, n), e(&term(n)));
        }
    }
}

#[test]
fn conjugation_is_trivial_on_real_values() {
    let x = ExactScalar::new(ratio(3, 7), ratio(-2, 5), 5);
    assert!(x.conj().same(&x));
}
