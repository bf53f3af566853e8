//! Term-by-term assembly of the reciprocity moment from user-supplied
//! spectral data, with the local factor at the level prime recomputed.
//!
//! Input is UTF-8 JSON `{"field_label": ..., "rows": [...]}` with every real
//! written as a decimal string, so that the whole assembly is exact.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::numerics::{decimal_string, to_approx, ExactScalar, DEFAULT_PRECISION};
use crate::padic::is_prime;
use crate::periods::{kappa_constant, local_ell_v, LocalCase, PeriodError, TruncationPlan};
use crate::repn::ReprDescriptor;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MomentError {
    #[error("schema violation at {path}: {message}")]
    SchemaViolation { path: String, message: String },
    #[error("invariant violated by row {row}: {message}")]
    InvariantViolation { row: String, message: String },
    #[error("row {0} declares no local type at the level prime")]
    MissingLocalType(String),
    #[error("p = {0} and q = {1} must be distinct primes")]
    BadPrimes(u64, u64),
    #[error(transparent)]
    Period(#[from] PeriodError),
}

/// A real number read from a decimal string, kept exact.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decimal(pub BigRational);

impl FromStr for Decimal {
    type Err = String;

    /// `[+-]digits[.digits][e[+-]digits]`.
    fn from_str(s: &str) -> Result<Self, String> {
        let bad = || format!("not a decimal: {s:?}");
        let (mant, exp) = match s.find(['e', 'E']) {
            Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
            None => (s, 0),
        };
        let (neg, mant) = match mant.as_bytes().first() {
            Some(b'-') => (true, &mant[1..]),
            Some(b'+') => (false, &mant[1..]),
            _ => (false, mant),
        };
        let (int, frac) = mant.split_once('.').unwrap_or((mant, ""));
        if int.is_empty() && frac.is_empty()
            || !int.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit())
        {
            return Err(bad());
        }
        let digits: BigInt = format!("0{int}{frac}").parse().map_err(|_| bad())?;
        let shift = exp - frac.len() as i32;
        let ten = BigRational::from_integer(BigInt::from(10));
        let scale = num_traits::pow(ten, shift.unsigned_abs() as usize);
        let x = BigRational::from_integer(digits) * if shift >= 0 { scale } else { scale.recip() };
        Ok(Decimal(if neg { -x } else { x }))
    }
}

impl<'de> Deserialize<'de> for Decimal {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RowKind {
    Cuspidal,
    EisensteinSample,
}

/// The type of `pi` at the level prime.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Deserialize, Serialize)]
pub enum LocalType {
    #[serde(rename = "unramified-at-q")]
    Unramified,
    #[serde(rename = "steinberg-at-q")]
    Steinberg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Deserialize, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Units {
    #[default]
    Finite,
    Completed,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRow {
    id: String,
    kind: RowKind,
    lambda_p: Decimal,
    lambda_q: Decimal,
    eta: i64,
    #[serde(rename = "L_central")]
    l_central: Decimal,
    #[serde(default)]
    units: Units,
    #[serde(rename = "adjoint_Lstar")]
    adjoint_lstar: Decimal,
    f_inf: Decimal,
    quadrature_weight: Decimal,
    #[serde(default)]
    local_type: Option<LocalType>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDataset {
    field_label: String,
    rows: Vec<RawRow>,
}

/// One global representation (or one quadrature sample of the continuous
/// spectrum) with its data.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralDatum {
    pub id: String,
    pub kind: RowKind,
    pub lambda_p: BigRational,
    pub lambda_q: BigRational,
    pub eta: i64,
    pub l_central: BigRational,
    pub units: Units,
    pub adjoint_lstar: BigRational,
    pub f_inf: BigRational,
    pub quadrature_weight: BigRational,
    pub local_type: Option<LocalType>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    pub field_label: String,
    pub rows: Vec<SpectralDatum>,
}

impl Dataset {
    pub fn empty(field_label: &str) -> Self {
        Dataset {
            field_label: field_label.into(),
            rows: Vec::new(),
        }
    }
}

fn validate(r: RawRow) -> Result<SpectralDatum, MomentError> {
    let fail = |m: &str| MomentError::InvariantViolation {
        row: r.id.clone(),
        message: m.into(),
    };
    if r.eta != 1 && r.eta != -1 {
        return Err(fail("eta must be +1 or -1"));
    }
    if r.l_central.0.is_negative() {
        return Err(fail("L_central must be non-negative"));
    }
    if !r.adjoint_lstar.0.is_positive() {
        return Err(fail("adjoint_Lstar must be positive"));
    }
    if r.f_inf.0.is_negative() {
        return Err(fail("f_inf must be non-negative"));
    }
    Ok(SpectralDatum {
        id: r.id,
        kind: r.kind,
        lambda_p: r.lambda_p.0,
        lambda_q: r.lambda_q.0,
        eta: r.eta,
        l_central: r.l_central.0,
        units: r.units,
        adjoint_lstar: r.adjoint_lstar.0,
        f_inf: r.f_inf.0,
        quadrature_weight: r.quadrature_weight.0,
        local_type: r.local_type,
    })
}

/// Parses and validates a dataset.
pub fn load_spectral_data(source: &str) -> Result<Dataset, MomentError> {
    let de = &mut serde_json::Deserializer::from_str(source);
    let raw: RawDataset = serde_path_to_error::deserialize(de).map_err(|e| {
        MomentError::SchemaViolation {
            path: e.path().to_string(),
            message: e.inner().to_string(),
        }
    })?;
    Ok(Dataset {
        field_label: raw.field_label,
        rows: raw.rows.into_iter().map(validate).collect::<Result<_, _>>()?,
    })
}

/// An element `c0 + c1 sqrt(p) + c2 sqrt(q) + c3 sqrt(pq)` of `Q(sqrt p, sqrt q)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Biquad {
    p: u64,
    q: u64,
    c: [BigRational; 4],
}

impl Biquad {
    pub fn new(p: u64, q: u64, c: [BigRational; 4]) -> Self {
        Biquad { p, q, c }
    }

    pub fn zero(p: u64, q: u64) -> Self {
        Biquad::rational(p, q, BigRational::zero())
    }

    pub fn rational(p: u64, q: u64, x: BigRational) -> Self {
        Biquad::new(p, q, [x, BigRational::zero(), BigRational::zero(), BigRational::zero()])
    }

    /// Embeds `a + b sqrt(r)` for `r` either of the two primes.
    pub fn embed(p: u64, q: u64, x: &ExactScalar) -> Self {
        let z = BigRational::zero();
        let (a, b) = (x.rational_part().clone(), x.surd_part().clone());
        if x.q() == p {
            Biquad::new(p, q, [a, b, z.clone(), z])
        } else {
            assert_eq!(x.q(), q, "scalar from an unrelated field");
            Biquad::new(p, q, [a, z.clone(), b, z])
        }
    }

    pub fn coeffs(&self) -> &[BigRational; 4] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(Zero::is_zero)
    }

    /// Swaps `sqrt(q)` to `-sqrt(q)`.
    fn conj_q(&self) -> Self {
        let [a, b, c, d] = self.c.clone();
        Biquad::new(self.p, self.q, [a, b, -c, -d])
    }

    fn conj_p(&self) -> Self {
        let [a, b, c, d] = self.c.clone();
        Biquad::new(self.p, self.q, [a, -b, c, -d])
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        // x conj_q(x) lies in Q(sqrt p); times its conjugate it is rational
        let n1 = self * &self.conj_q();
        let n2 = &n1 * &n1.conj_p();
        let r = n2.c[0].clone();
        let num = &self.conj_q() * &n1.conj_p();
        Some(&num * &Biquad::rational(self.p, self.q, r.recip()))
    }

    pub fn decimal(&self, digits: usize) -> String {
        let prec = DEFAULT_PRECISION;
        let sp = to_approx(&ExactScalar::sqrt_q(self.p), prec);
        let sq = to_approx(&ExactScalar::sqrt_q(self.q), prec);
        let basis = [
            to_approx(&ExactScalar::one(self.p), prec),
            sp.clone(),
            sq.clone(),
            sp.mul(&sq),
        ];
        let mut acc = to_approx(&ExactScalar::zero(self.p), prec);
        for (c, b) in self.c.iter().zip(&basis) {
            acc = acc.add(&b.mul(&crate::numerics::ApproxScalar::from_rational(c, prec)));
        }
        decimal_string(acc.re(), digits)
    }
}

impl fmt::Display for Biquad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = [
            String::new(),
            format!("sqrt({})", self.p),
            format!("sqrt({})", self.q),
            format!("sqrt({})", self.p * self.q),
        ];
        let mut out = String::new();
        for (c, n) in self.c.iter().zip(&names) {
            if c.is_zero() {
                continue;
            }
            let mag = if n.is_empty() { c.abs().to_string() } else { format!("{}*{n}", c.abs()) };
            let sign = c.is_negative();
            if out.is_empty() {
                out = if sign { format!("-{mag}") } else { mag };
            } else {
                out.push_str(if sign { " - " } else { " + " });
                out.push_str(&mag);
            }
        }
        if out.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{out}")
        }
    }
}

impl<'a> Add<&'a Biquad> for &'a Biquad {
    type Output = Biquad;
    fn add(self, o: &Biquad) -> Biquad {
        assert_eq!((self.p, self.q), (o.p, o.q));
        let c = std::array::from_fn(|i| &self.c[i] + &o.c[i]);
        Biquad::new(self.p, self.q, c)
    }
}

impl<'a> Sub<&'a Biquad> for &'a Biquad {
    type Output = Biquad;
    fn sub(self, o: &Biquad) -> Biquad {
        self + &(-o)
    }
}

impl Neg for &Biquad {
    type Output = Biquad;
    fn neg(self) -> Biquad {
        Biquad::new(self.p, self.q, self.c.clone().map(|x| -x))
    }
}

impl<'a> Mul<&'a Biquad> for &'a Biquad {
    type Output = Biquad;
    fn mul(self, o: &Biquad) -> Biquad {
        assert_eq!((self.p, self.q), (o.p, o.q));
        let p = BigRational::from_integer(self.p.into());
        let q = BigRational::from_integer(self.q.into());
        let pq = &p * &q;
        let [a0, a1, a2, a3] = &self.c;
        let [b0, b1, b2, b3] = &o.c;
        let c0 = a0 * b0 + &p * (a1 * b1) + &q * (a2 * b2) + &pq * (a3 * b3);
        let c1 = a0 * b1 + a1 * b0 + &q * (a2 * b3 + a3 * b2);
        let c2 = a0 * b2 + a2 * b0 + &p * (a1 * b3 + a3 * b1);
        let c3 = a0 * b3 + a3 * b0 + a1 * b2 + a2 * b1;
        Biquad::new(self.p, self.q, [c0, c1, c2, c3])
    }
}

/// Hecke eigenvalues of `pi_1`, `pi_2` at the level prime.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelData {
    pub lambda1: BigRational,
    pub lambda2: BigRational,
}

impl Default for LevelData {
    fn default() -> Self {
        LevelData {
            lambda1: BigRational::zero(),
            lambda2: BigRational::zero(),
        }
    }
}

/// Which prime is the level: `LevelQ` takes `q` as level and `p` as the
/// Hecke prime, `LevelP` exchanges them.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Side {
    LevelQ,
    LevelP,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExactValue {
    pub exact: String,
    pub decimal: String,
}

impl ExactValue {
    fn of(x: &Biquad) -> Self {
        ExactValue {
            exact: x.to_string(),
            decimal: x.decimal(24),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TermRow {
    pub id: String,
    pub kind: RowKind,
    pub local_type: LocalType,
    pub units: Units,
    pub local_factor: ExactValue,
    pub term: ExactValue,
}

#[derive(Clone, Debug, Serialize)]
pub struct MomentReport {
    pub schema: &'static str,
    pub field_label: String,
    pub side: Side,
    pub level_prime: u64,
    pub hecke_prime: u64,
    pub case_constant: String,
    pub prefactor: ExactValue,
    pub terms: Vec<TermRow>,
    pub cuspidal: ExactValue,
    pub continuous: ExactValue,
    pub total: ExactValue,
    #[serde(skip)]
    pub values: MomentValues,
}

/// The exact totals behind a report.
#[derive(Clone, Debug, Default)]
pub struct MomentValues {
    pub prefactor: Option<Biquad>,
    pub cuspidal: Option<Biquad>,
    pub continuous: Option<Biquad>,
    pub total: Option<Biquad>,
}

/// Computes `l(pi, level prime)` per local type, once per type.
struct LocalFactors {
    level: u64,
    data: LevelData,
    plan: TruncationPlan,
    steinberg: Option<ExactScalar>,
    kappa: HashMap<BigRational, ExactScalar>,
}

impl LocalFactors {
    fn get(&mut self, row: &SpectralDatum, lambda_pi: &BigRational) -> Result<ExactScalar, MomentError> {
        let q = self.level;
        let lt = row
            .local_type
            .ok_or_else(|| MomentError::MissingLocalType(row.id.clone()))?;
        match lt {
            LocalType::Steinberg => {
                if self.steinberg.is_none() {
                    let lam = |x: &BigRational| {
                        ReprDescriptor::unramified_lambda(q, ExactScalar::from_rational(x.clone(), q))
                            .map_err(PeriodError::from)
                    };
                    let case = LocalCase::SteinbergAtQ {
                        pi: ReprDescriptor::steinberg(q, -row.eta).map_err(PeriodError::from)?,
                        pi1: lam(&self.data.lambda1)?,
                        pi2: lam(&self.data.lambda2)?,
                    };
                    let rep = local_ell_v(&case, &self.plan, 1e-8)?;
                    let v = rep.value.as_exact().cloned().ok_or_else(|| {
                        PeriodError::Unsupported("local factor is not exact".into())
                    })?;
                    self.steinberg = Some(v);
                }
                Ok(self.steinberg.clone().expect("set above"))
            }
            LocalType::Unramified => {
                if let Some(v) = self.kappa.get(lambda_pi) {
                    return Ok(v.clone());
                }
                let e = |x: &BigRational| ExactScalar::from_rational(x.clone(), q);
                let v = kappa_constant(q, &e(lambda_pi), &e(&self.data.lambda1), &e(&self.data.lambda2))?;
                self.kappa.insert(lambda_pi.clone(), v.clone());
                Ok(v)
            }
        }
    }
}

fn check_primes(p: u64, q: u64) -> Result<(), MomentError> {
    if p == q || !is_prime(p) || !is_prime(q) {
        return Err(MomentError::BadPrimes(p, q));
    }
    Ok(())
}

/// Assembles `sqrt(h) / (h + 1) * sum of terms` where `h` is the Hecke prime
/// and each term is
/// `C * lambda_pi(h) * eta * L_central * f_inf * l(pi, level) / adjoint_Lstar * weight`.
pub fn assemble_moment(
    ds: &Dataset,
    p: u64,
    q: u64,
    case_constant: &BigRational,
    side: Side,
    level_data: &LevelData,
    plan: &TruncationPlan,
) -> Result<MomentReport, MomentError> {
    check_primes(p, q)?;
    let (level, hecke) = match side {
        Side::LevelQ => (q, p),
        Side::LevelP => (p, q),
    };
    let mut locals = LocalFactors {
        level,
        data: level_data.clone(),
        plan: *plan,
        steinberg: None,
        kappa: HashMap::new(),
    };
    let rat = |x: &BigRational| Biquad::rational(p, q, x.clone());
    let mut terms = Vec::with_capacity(ds.rows.len());
    let mut cusp = Biquad::zero(p, q);
    let mut cont = Biquad::zero(p, q);
    for row in &ds.rows {
        let (lambda_hecke, lambda_level) = match side {
            Side::LevelQ => (&row.lambda_p, &row.lambda_q),
            Side::LevelP => (&row.lambda_q, &row.lambda_p),
        };
        let local = Biquad::embed(p, q, &locals.get(row, lambda_level)?);
        let scalar = case_constant
            * lambda_hecke
            * BigRational::from_integer(row.eta.into())
            * &row.l_central
            * &row.f_inf
            * &row.quadrature_weight
            / &row.adjoint_lstar;
        let term = &rat(&scalar) * &local;
        match row.kind {
            RowKind::Cuspidal => cusp = &cusp + &term,
            RowKind::EisensteinSample => cont = &cont + &term,
        }
        terms.push(TermRow {
            id: row.id.clone(),
            kind: row.kind,
            local_type: row.local_type.expect("checked by the local factor"),
            units: row.units,
            local_factor: ExactValue::of(&local),
            term: ExactValue::of(&term),
        });
    }
    let prefactor = Biquad::embed(p, q, &prefactor(hecke));
    let total = &prefactor * &(&cusp + &cont);
    Ok(MomentReport {
        schema: "1",
        field_label: ds.field_label.clone(),
        side,
        level_prime: level,
        hecke_prime: hecke,
        case_constant: case_constant.to_string(),
        prefactor: ExactValue::of(&prefactor),
        terms,
        cuspidal: ExactValue::of(&cusp),
        continuous: ExactValue::of(&cont),
        total: ExactValue::of(&total),
        values: MomentValues {
            prefactor: Some(prefactor),
            cuspidal: Some(cusp),
            continuous: Some(cont),
            total: Some(total),
        },
    })
}

/// `sqrt(h) / (h + 1)` in `Q(sqrt h)`.
pub fn prefactor(h: u64) -> ExactScalar {
    ExactScalar::new(
        BigRational::zero(),
        BigRational::new(BigInt::one(), BigInt::from(h + 1)),
        h,
    )
}

#[derive(Clone, Debug, Serialize)]
pub struct ReciprocityReport {
    pub schema: &'static str,
    pub p: u64,
    pub q: u64,
    pub level_q: MomentReport,
    pub level_p: MomentReport,
    /// Level-`q` total minus level-`p` total.
    pub difference: ExactValue,
    #[serde(skip)]
    pub difference_value: Option<Biquad>,
}

/// Both sides of the reciprocity relation and their difference. Nothing is
/// asserted: agreement depends on the completeness of the supplied data.
#[allow(clippy::too_many_arguments)]
pub fn reciprocity_report(
    ds_level_q: &Dataset,
    ds_level_p: &Dataset,
    p: u64,
    q: u64,
    case_constant: &BigRational,
    data_at_q: &LevelData,
    data_at_p: &LevelData,
    plan: &TruncationPlan,
) -> Result<ReciprocityReport, MomentError> {
    let a = assemble_moment(ds_level_q, p, q, case_constant, Side::LevelQ, data_at_q, plan)?;
    let b = assemble_moment(ds_level_p, p, q, case_constant, Side::LevelP, data_at_p, plan)?;
    let d = a.values.total.as_ref().expect("set") - b.values.total.as_ref().expect("set");
    Ok(ReciprocityReport {
        schema: "1",
        p,
        q,
        difference: ExactValue::of(&d),
        difference_value: Some(d),
        level_q: a,
        level_p: b,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::exact::ratio;

    fn row(id: &str, lt: &str) -> String {
        format!(
            r#"{{"id": "{id}", "kind": "cuspidal", "lambda_p": "1", "lambda_q": "0.5",
               "eta": 1, "L_central": "1", "adjoint_Lstar": "1", "f_inf": "1",
               "quadrature_weight": "1", "local_type": "{lt}"}}"#
        )
    }

    #[test]
    fn decimals_parse_exactly() {
        let d = |s: &str| s.parse::<Decimal>().unwrap().0;
        assert_eq!(d("0.25"), ratio(1, 4));
        assert_eq!(d("-1.5e-2"), ratio(-3, 200));
        assert_eq!(d("12"), ratio(12, 1));
        assert_eq!(d("2E3"), ratio(2000, 1));
        assert_eq!(d(".5"), ratio(1, 2));
        for bad in ["", "-", "1.2.3", "nan", "1e", "0x10"] {
            assert!(bad.parse::<Decimal>().is_err(), "{bad:?}");
        }
    }

    #[test]
    fn schema_errors_name_the_field() {
        let e = load_spectral_data(r#"{"field_label": "Q", "rows": [], "extra": 1}"#).unwrap_err();
        assert!(matches!(e, MomentError::SchemaViolation { .. }));
        let src = format!(r#"{{"field_label": "Q", "rows": [{}]}}"#, row("a", "x"));
        match load_spectral_data(&src).unwrap_err() {
            MomentError::SchemaViolation { path, .. } => assert_eq!(path, "rows[0].local_type"),
            e => panic!("{e:?}"),
        }
        let src = r#"{"field_label": "Q", "rows": [{"id": "a", "kind": "cuspidal", "lambda_p": 1}]}"#;
        match load_spectral_data(src).unwrap_err() {
            MomentError::SchemaViolation { path, .. } => assert_eq!(path, "rows[0].lambda_p"),
            e => panic!("{e:?}"),
        }
    }

    #[test]
    fn eta_zero_is_rejected() {
        let src = format!(r#"{{"field_label": "Q", "rows": [{}]}}"#, row("a", "steinberg-at-q"))
            .replace("\"eta\": 1", "\"eta\": 0");
        assert!(matches!(
            load_spectral_data(&src),
            Err(MomentError::InvariantViolation { .. })
        ));
    }

    #[test]
    fn empty_dataset_has_zero_total() {
        let ds = load_spectral_data(r#"{"field_label": "Q", "rows": []}"#).unwrap();
        let plan = TruncationPlan::default();
        let r = assemble_moment(&ds, 3, 2, &ratio(1, 1), Side::LevelQ, &LevelData::default(), &plan)
            .unwrap();
        assert!(r.values.total.unwrap().is_zero());
    }

    #[test]
    fn steinberg_row_at_two() {
        let src = format!(r#"{{"field_label": "Q", "rows": [{}]}}"#, row("a", "steinberg-at-q"));
        let ds = load_spectral_data(&src).unwrap();
        let c = ratio(7, 5);
        let plan = TruncationPlan::new(4, crate::periods::TailMode::ClosedForm);
        let r = assemble_moment(&ds, 3, 2, &c, Side::LevelQ, &LevelData::default(), &plan).unwrap();
        // sqrt(3)/4 * 1/3 * 7/5
        let want = Biquad::new(3, 2, [ratio(0, 1), ratio(7, 60), ratio(0, 1), ratio(0, 1)]);
        assert_eq!(r.values.total.unwrap(), want);
    }

    #[test]
    fn missing_local_type_is_reported() {
        let src = format!(r#"{{"field_label": "Q", "rows": [{}]}}"#, row("a", "steinberg-at-q"))
            .replace(", \"local_type\": \"steinberg-at-q\"", "");
        let ds = load_spectral_data(&src).unwrap();
        let plan = TruncationPlan::default();
        let e = assemble_moment(&ds, 3, 2, &ratio(1, 1), Side::LevelQ, &LevelData::default(), &plan);
        assert_eq!(e.unwrap_err(), MomentError::MissingLocalType("a".into()));
    }

    #[test]
    fn biquad_inverse() {
        let x = Biquad::new(2, 3, [ratio(1, 2), ratio(-3, 1), ratio(2, 7), ratio(1, 1)]);
        let one = Biquad::rational(2, 3, ratio(1, 1));
        assert_eq!(&x * &x.inv().unwrap(), one);
        assert!(Biquad::zero(2, 3).inv().is_none());
    }
}
