use locperiod::moment::{
    assemble_moment, load_spectral_data, reciprocity_report, Biquad, Dataset, LevelData, LocalType,
    MomentError, RowKind, Side, SpectralDatum, Units,
};
use locperiod::numerics::exact::ratio;
use locperiod::numerics::ExactScalar;
use locperiod::periods::TruncationPlan;
use num_rational::BigRational;
use proptest::prelude::*;

const GOLDEN: &str = include_str!("data/golden_dataset.json");

fn positive() -> impl Strategy<Value = BigRational> {
    (1i64..200, 1i64..50).prop_map(|(n, d)| ratio(n, d))
}

fn row(i: usize) -> impl Strategy<Value = SpectralDatum> {
    (
        any::<bool>(),
        (-32i64..=32).prop_map(|n| ratio(n, 16)),
        (-32i64..=32).prop_map(|n| ratio(n, 16)),
        prop::sample::select(vec![1i64, -1]),
        (positive(), positive(), positive(), positive()),
        any::<bool>(),
    )
        .prop_map(move |(cusp, lp, lq, eta, (l, adj, f, w), st)| SpectralDatum {
            id: format!("row-{i}"),
            kind: if cusp { RowKind::Cuspidal } else { RowKind::EisensteinSample },
            lambda_p: lp,
            lambda_q: lq,
            eta,
            l_central: l,
            units: Units::Finite,
            adjoint_lstar: adj,
            f_inf: f,
            quadrature_weight: if cusp { ratio(1, 1) } else { w },
            local_type: Some(if st && cusp { LocalType::Steinberg } else { LocalType::Unramified }),
        })
}

fn rows() -> impl Strategy<Value = Vec<SpectralDatum>> {
    (0usize..6).prop_flat_map(|n| (0..n).map(row).collect::<Vec<_>>())
}

fn level() -> LevelData {
    LevelData {
        lambda1: ratio(1, 2),
        lambda2: ratio(-1, 3),
    }
}

fn dataset(rows: Vec<SpectralDatum>) -> Dataset {
    Dataset {
        field_label: "synthetic".into(),
        rows,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn assembly_is_linear_in_rows(
        rs in rows(),
        mask in prop::collection::vec(any::<bool>(), 6),
        c in positive(),
        (p, q) in prop::sample::select(vec![(3u64, 2u64), (2, 5), (5, 3)]),
        side in prop::sample::select(vec![Side::LevelQ, Side::LevelP]),
    ) {
        let plan = TruncationPlan::default();
        let (a, b): (Vec<_>, Vec<_>) = rs.iter().cloned().enumerate().partition(|(i, _)| mask[*i]);
        let strip = |v: Vec<(usize, SpectralDatum)>| dataset(v.into_iter().map(|x| x.1).collect());
        let whole = assemble_moment(&dataset(rs.clone()), p, q, &c, side, &level(), &plan).unwrap();
        let left = assemble_moment(&strip(a), p, q, &c, side, &level(), &plan).unwrap();
        let right = assemble_moment(&strip(b), p, q, &c, side, &level(), &plan).unwrap();
        let t = |r: &locperiod::moment::MomentReport| r.values.total.clone().unwrap();
        prop_assert_eq!(&t(&left) + &t(&right), t(&whole));
        let cu = |r: &locperiod::moment::MomentReport| r.values.cuspidal.clone().unwrap();
        prop_assert_eq!(&cu(&left) + &cu(&right), cu(&whole));
    }

    #[test]
    fn prefactor_is_extracted_exactly(
        rs in rows(),
        (p, q) in prop::sample::select(vec![(3u64, 2u64), (2, 5), (7, 3)]),
        side in prop::sample::select(vec![Side::LevelQ, Side::LevelP]),
    ) {
        let r = assemble_moment(&dataset(rs), p, q, &ratio(2, 1), side, &level(), &TruncationPlan::default()).unwrap();
        let v = &r.values;
        let sum = v.cuspidal.as_ref().unwrap() + v.continuous.as_ref().unwrap();
        let h = if side == Side::LevelQ { p } else { q };
        // sqrt(h) / (h + 1)
        let want = Biquad::embed(p, q, &ExactScalar::new(ratio(0, 1), ratio(1, h as i64 + 1), h));
        prop_assert_eq!(v.prefactor.clone().unwrap(), want.clone());
        match sum.inv() {
            Some(inv) => prop_assert_eq!(v.total.as_ref().unwrap() * &inv, want),
            None => prop_assert!(v.total.as_ref().unwrap().is_zero()),
        }
    }
}

#[test]
fn golden_dataset_has_three_rows() {
    let ds = load_spectral_data(GOLDEN).unwrap();
    assert_eq!(ds.rows.len(), 3);
    assert_eq!(ds.rows[2].kind, RowKind::EisensteinSample);
    assert_eq!(ds.rows[2].units, Units::Completed);
    assert_eq!(ds.rows[1].lambda_q, ratio(3, 4));
}

#[test]
fn empty_dataset_gives_zero() {
    let ds = load_spectral_data(r#"{"field_label": "Q", "rows": []}"#).unwrap();
    let r = assemble_moment(&ds, 3, 2, &ratio(1, 1), Side::LevelQ, &level(), &TruncationPlan::default()).unwrap();
    assert!(r.values.total.unwrap().is_zero());
    let c = reciprocity_report(&ds, &ds, 3, 2, &ratio(1, 1), &level(), &level(), &TruncationPlan::default()).unwrap();
    assert!(c.difference_value.unwrap().is_zero());
}

#[test]
fn single_steinberg_row_with_unit_factors() {
    let src = r#"{"field_label": "Q", "rows": [{"id": "s", "kind": "cuspidal", "lambda_p": "1",
        "lambda_q": "0", "eta": 1, "L_central": "1", "adjoint_Lstar": "1", "f_inf": "1",
        "quadrature_weight": "1", "local_type": "steinberg-at-q"}]}"#;
    let ds = load_spectral_data(src).unwrap();
    for p in [3u64, 5, 7] {
        let c = ratio(7, 2);
        let r = assemble_moment(&ds, p, 2, &c, Side::LevelQ, &LevelData::default(), &TruncationPlan::default()).unwrap();
        // sqrt(p) / (p + 1) * 1/3 * C
        let want = Biquad::embed(p, 2, &ExactScalar::new(ratio(0, 1), ratio(7, 6 * (p as i64 + 1)), p));
        assert_eq!(r.values.total.unwrap(), want, "p = {p}");
    }
}

#[test]
fn swapping_sides_exchanges_the_primes() {
    let ds = load_spectral_data(GOLDEN).unwrap();
    let mut swapped = ds.clone();
    for r in &mut swapped.rows {
        std::mem::swap(&mut r.lambda_p, &mut r.lambda_q);
    }
    let plan = TruncationPlan::default();
    let a = assemble_moment(&ds, 3, 2, &ratio(1, 1), Side::LevelQ, &level(), &plan).unwrap();
    let b = assemble_moment(&swapped, 2, 3, &ratio(1, 1), Side::LevelP, &level(), &plan).unwrap();
    assert_eq!((a.level_prime, a.hecke_prime), (b.level_prime, b.hecke_prime));
    assert_eq!(a.total.decimal, b.total.decimal);
    let c = reciprocity_report(&ds, &ds, 3, 2, &ratio(1, 1), &level(), &level(), &plan).unwrap();
    let d = c.level_q.values.total.as_ref().unwrap() - c.level_p.values.total.as_ref().unwrap();
    assert_eq!(c.difference_value.unwrap(), d);
}

#[test]
fn invalid_rows_are_rejected() {
    let base = |eta: &str, extra: &str| {
        format!(
            r#"{{"field_label": "Q", "rows": [{{"id": "x", "kind": "cuspidal", "lambda_p": "1",
            "lambda_q": "0", "eta": {eta}, "L_central": "1", "adjoint_Lstar": "1", "f_inf": "1",
            "quadrature_weight": "1"{extra}}}]}}"#
        )
    };
    assert!(matches!(
        load_spectral_data(&base("0", "")),
        Err(MomentError::InvariantViolation { .. })
    ));
    match load_spectral_data(&base("1", r#", "colour": "red""#)) {
        Err(MomentError::SchemaViolation { path, .. }) => assert!(path.starts_with("rows[0]"), "{path}"),
        other => panic!("{other:?}"),
    }
    let nan = base("1", "").replace(r#""f_inf": "1""#, r#""f_inf": "NaN""#);
    assert!(matches!(load_spectral_data(&nan), Err(MomentError::SchemaViolation { .. })));
    let neg = base("1", "").replace(r#""f_inf": "1""#, r#""f_inf": "-0.5""#);
    assert!(matches!(load_spectral_data(&neg), Err(MomentError::InvariantViolation { .. })));
    let ds = load_spectral_data(&base("1", "")).unwrap();
    let r = assemble_moment(&ds, 3, 2, &ratio(1, 1), Side::LevelQ, &level(), &TruncationPlan::default());
    assert!(matches!(r, Err(MomentError::MissingLocalType(_))));
}
