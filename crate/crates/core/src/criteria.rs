//! Criteria for the asymptotic Fermat conjecture over a number field.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive};
use serde::Serialize;

use crate::arith::{factor_bigint, is_prime, powmod};
use crate::error::{Error, Result};
use crate::field::{FieldElement, NumberField, PrimeIdeal};
use crate::solver::SolutionSet;

pub const REPORT_SCHEMA: &str = "criterion-report/v1";

#[derive(Clone, Debug)]
pub struct StuSets {
    pub s: Vec<PrimeIdeal>,
    pub t: Vec<PrimeIdeal>,
    pub u: Vec<PrimeIdeal>,
}

impl StuSets {
    pub fn labels(v: &[PrimeIdeal]) -> Vec<String> {
        v.iter().map(|p| p.label.clone()).collect()
    }
}

/// S = primes above 2; T = those of residue degree 1; U = those with
/// 3 not dividing ord_P(2).
pub fn stu_sets(field: &Arc<NumberField>) -> Result<StuSets> {
    let s = field.primes_above(2)?;
    let t = s.iter().filter(|p| p.f == 1).cloned().collect();
    let u = s.iter().filter(|p| p.e % 3 != 0).cloned().collect();
    Ok(StuSets { s, t, u })
}

fn max_ord(field: &NumberField, p: &PrimeIdeal, l: &FieldElement, m: &FieldElement) -> Result<(i64, i64)> {
    let a = p.ord(field, l)?;
    let b = p.ord(field, m)?;
    Ok((a.abs().max(b.abs()), a + b))
}

/// First P in T with max(|ord_P lambda|, |ord_P mu|) <= 4 ord_P(2).
pub fn check_condition_a(field: &NumberField, lambda: &FieldElement, mu: &FieldElement, t: &[PrimeIdeal]) -> Result<Option<PrimeIdeal>> {
    for p in t {
        let (m, _) = max_ord(field, p, lambda, mu)?;
        if m <= 4 * p.e as i64 {
            return Ok(Some(p.clone()));
        }
    }
    Ok(None)
}

/// First P in U with the inequality of (A) and ord_P(lambda mu) = ord_P(2) mod 3.
pub fn check_condition_b(field: &NumberField, lambda: &FieldElement, mu: &FieldElement, u: &[PrimeIdeal]) -> Result<Option<PrimeIdeal>> {
    for p in u {
        let (m, s) = max_ord(field, p, lambda, mu)?;
        let v2 = p.e as i64;
        if m <= 4 * v2 && (s - v2).rem_euclid(3) == 0 {
            return Ok(Some(p.clone()));
        }
    }
    Ok(None)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Fs,
    Ko,
    Ds,
    LayerRule,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EsStatus {
    DegreeOdd,
    TNonempty,
    ConjectureAssumed,
    NotApplicable,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", content = "assumed", rename_all = "kebab-case")]
pub enum Verdict {
    #[serde(rename = "AFC-holds")]
    Holds,
    #[serde(rename = "AFC-holds-conditionally")]
    HoldsConditionally(Vec<String>),
    #[serde(rename = "inconclusive")]
    Inconclusive,
}

impl Verdict {
    /// CLI exit code: 0 holds, 2 conditional, 3 inconclusive.
    pub fn exit_code(&self) -> i32 {
        match self {
            Verdict::Holds => 0,
            Verdict::HoldsConditionally(_) => 2,
            Verdict::Inconclusive => 3,
        }
    }

    pub fn class_name(&self) -> &'static str {
        match self {
            Verdict::Holds => "AFC-holds",
            Verdict::HoldsConditionally(_) => "AFC-holds-conditionally",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SolutionRecord {
    pub solution: usize,
    /// "A", "B" or "none".
    pub condition: String,
    pub witness: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CriterionReport {
    pub schema: &'static str,
    pub field: String,
    pub mode: Mode,
    pub s: Vec<String>,
    pub t: Vec<String>,
    pub u: Vec<String>,
    pub records: Vec<SolutionRecord>,
    pub es_status: EsStatus,
    pub caveats: Vec<String>,
    #[serde(flatten)]
    pub verdict: Verdict,
}

impl CriterionReport {
    fn empty(field: &str, mode: Mode) -> Self {
        CriterionReport {
            schema: REPORT_SCHEMA,
            field: field.to_string(),
            mode,
            s: vec![],
            t: vec![],
            u: vec![],
            records: vec![],
            es_status: EsStatus::NotApplicable,
            caveats: vec![],
            verdict: Verdict::Inconclusive,
        }
    }
}

fn has_cube_root_of_unity(field: &NumberField) -> bool {
    field.torsion_generator().1.is_multiple_of(3)
}

/// Evaluate the criterion over `field` given the solutions of the S-unit
/// equation for S = primes above 2. Totally real fields use conditions (A)
/// and (B); other fields use the generalized criterion with A = B = C = 1,
/// which is conditional on two conjectures.
pub fn afc_verdict(field: &Arc<NumberField>, solutions: &SolutionSet) -> Result<CriterionReport> {
    let stu = stu_sets(field)?;
    let totally_real = field.is_totally_real();
    let mode = if totally_real { Mode::Fs } else { Mode::Ko };
    let mut rep = CriterionReport::empty(field.label(), mode);
    rep.s = StuSets::labels(&stu.s);
    rep.t = StuSets::labels(&stu.t);
    if totally_real {
        rep.u = StuSets::labels(&stu.u);
    }
    if has_cube_root_of_unity(field) {
        rep.caveats.push("field contains a primitive cube root of unity; the criterion does not apply".into());
        return Ok(rep);
    }
    let mut assumed = Vec::new();
    rep.es_status = if totally_real {
        if field.degree() % 2 == 1 {
            EsStatus::DegreeOdd
        } else if !stu.t.is_empty() {
            EsStatus::TNonempty
        } else {
            assumed.push("Eichler-Shimura".to_string());
            EsStatus::ConjectureAssumed
        }
    } else {
        assumed.push("Conjecture I (modularity of mod p representations)".to_string());
        assumed.push("Conjecture II (no fake elliptic curves)".to_string());
        EsStatus::NotApplicable
    };
    let mut all_ok = true;
    for (i, sol) in solutions.solutions.iter().enumerate() {
        let (cond, w) = if let Some(p) = check_condition_a(field, &sol.lambda, &sol.mu, &stu.t)? {
            ("A", Some(p.label))
        } else if totally_real {
            match check_condition_b(field, &sol.lambda, &sol.mu, &stu.u)? {
                Some(p) => ("B", Some(p.label)),
                None => ("none", None),
            }
        } else {
            ("none", None)
        };
        all_ok &= cond != "none";
        rep.records.push(SolutionRecord { solution: i, condition: cond.into(), witness: w });
    }
    if !solutions.complete {
        rep.caveats.push(format!("completeness flag unset at bound {}", solutions.bound));
        return Ok(rep);
    }
    if !all_ok {
        return Ok(rep);
    }
    rep.caveats.push(format!(
        "search-complete heuristic: exhaustive to exponent bound {}, confirmed at {}",
        solutions.bound,
        solutions.check_bound.unwrap_or(solutions.bound)
    ));
    rep.verdict = if assumed.is_empty() { Verdict::Holds } else { Verdict::HoldsConditionally(assumed) };
    Ok(rep)
}

/// Coefficients of A x^p + B y^p + C z^p = 0.
#[derive(Clone, Debug)]
pub struct GeneralizedCoefficients {
    pub a: FieldElement,
    pub b: FieldElement,
    pub c: FieldElement,
}

impl GeneralizedCoefficients {
    pub fn integers(field: &NumberField, a: i64, b: i64, c: i64) -> Result<Self> {
        if a == 0 || b == 0 || c == 0 {
            return Err(Error::Domain("coefficients must be nonzero".into()));
        }
        Ok(GeneralizedCoefficients { a: field.integer(a), b: field.integer(b), c: field.integer(c) })
    }

    fn product(&self, field: &NumberField) -> FieldElement {
        field.mul(&self.a, &field.mul(&self.b, &self.c))
    }
}

/// S = primes dividing 2 rad(ABC), T = residue-degree-one primes above 2.
pub fn ko_sets(field: &Arc<NumberField>, coeffs: &GeneralizedCoefficients) -> Result<StuSets> {
    let abc = coeffs.product(field);
    if abc.is_zero() || !abc.is_integral() {
        return Err(Error::Domain("coefficients must be nonzero integral elements".into()));
    }
    let above2 = field.primes_above(2)?;
    for p in &above2 {
        if p.ord(field, &abc)? > 0 {
            return Err(Error::Hypothesis(format!("ABC is divisible by {} above 2", p.label)));
        }
    }
    let nm = field.norm(&abc).numer().abs();
    let (fac, rest) = factor_bigint(&nm, 1_000_000);
    if !rest.is_one() {
        return Err(Error::ResourceLimit(format!("cannot factor norm {nm} of ABC")));
    }
    let mut s = above2.clone();
    for (q, _) in fac {
        for p in field.primes_above(q)? {
            if p.ord(field, &abc)? > 0 {
                s.push(p);
            }
        }
    }
    let t = above2.iter().filter(|p| p.f == 1).cloned().collect();
    Ok(StuSets { s, t, u: vec![] })
}

/// Rational coefficients: no choice of signs gives +-A +- B +- C = 0.
pub fn omega_condition_over_q(a: i64, b: i64, c: i64) -> bool {
    for sb in [-1i64, 1] {
        for sc in [-1i64, 1] {
            if a + sb * b + sc * c == 0 {
                return false;
            }
        }
    }
    true
}

/// Criterion over `field` for A x^p + B y^p + C z^p = 0, given solutions of
/// the S-unit equation for S = ko_sets(...).s.
pub fn ko_verdict(field: &Arc<NumberField>, coeffs: &GeneralizedCoefficients, solutions: &SolutionSet) -> Result<CriterionReport> {
    let sets = ko_sets(field, coeffs)?;
    let mut rep = CriterionReport::empty(field.label(), Mode::Ko);
    rep.s = StuSets::labels(&sets.s);
    rep.t = StuSets::labels(&sets.t);
    if field.is_rational_field() {
        let ints: Option<Vec<i64>> = [&coeffs.a, &coeffs.b, &coeffs.c]
            .iter()
            .map(|x| x.as_rational().and_then(|q| q.to_integer().to_i64()))
            .collect();
        if let Some(v) = ints {
            if !omega_condition_over_q(v[0], v[1], v[2]) {
                rep.caveats.push("A w1 + B w2 + C w3 = 0 for some signs; trivial solutions exist".into());
                return Ok(rep);
            }
        }
    } else {
        rep.caveats.push("root-of-unity condition on A, B, C checked over Q only; not verified here".into());
    }
    let mut all_ok = true;
    for (i, sol) in solutions.solutions.iter().enumerate() {
        let w = check_condition_a(field, &sol.lambda, &sol.mu, &sets.t)?;
        all_ok &= w.is_some();
        rep.records.push(SolutionRecord {
            solution: i,
            condition: if w.is_some() { "A".into() } else { "none".into() },
            witness: w.map(|p| p.label),
        });
    }
    if !solutions.complete {
        rep.caveats.push(format!("completeness flag unset at bound {}", solutions.bound));
        return Ok(rep);
    }
    if all_ok {
        rep.caveats.push(format!("search-complete heuristic: exhaustive to exponent bound {}", solutions.bound));
        rep.verdict = Verdict::HoldsConditionally(vec![
            "Conjecture I (modularity of mod p representations)".into(),
            "Conjecture II (no fake elliptic curves)".into(),
        ]);
    }
    Ok(rep)
}

/// Every prime divisor q of ABC satisfies q = +-1 (mod 4 l).
pub fn ds_congruence_check(a: i64, b: i64, c: i64, ell: u64) -> Result<bool> {
    if ell < 3 || !is_prime(ell) {
        return Err(Error::Domain(format!("{ell} is not an odd prime")));
    }
    let abc = BigInt::from(a) * BigInt::from(b) * BigInt::from(c);
    if abc == BigInt::from(0) {
        return Err(Error::Domain("coefficients must be nonzero".into()));
    }
    let (fac, rest) = factor_bigint(&abc, 1_000_000);
    if !rest.is_one() {
        return Err(Error::ResourceLimit("cannot factor ABC".into()));
    }
    let m = 4 * ell;
    Ok(fac.iter().all(|&(q, _)| q % m == 1 || q % m == m - 1))
}

/// 2^(l-1) = 1 (mod l^2).
pub fn is_wieferich(ell: u64) -> bool {
    let m = ell * ell;
    powmod(2, ell - 1, m) == 1 % m
}

/// Rule-based verdict for the n-th layer of the cyclotomic Z_l-extension.
pub fn layer_verdict(ell: u64, n: u32) -> Result<CriterionReport> {
    if !is_prime(ell) || n == 0 {
        return Err(Error::Domain("need a prime l and n >= 1".into()));
    }
    let mut rep = CriterionReport::empty(&format!("Q_{{{n},{ell}}}"), Mode::LayerRule);
    if ell == 2 {
        rep.verdict = Verdict::Holds;
        rep.caveats.push("2 totally ramified; every solution satisfies (A)".into());
    } else if ell >= 5 && !is_wieferich(ell) {
        rep.verdict = Verdict::Holds;
        rep.caveats.push(format!("{ell} >= 5 is non-Wieferich"));
    } else if ell == 3 {
        rep.caveats.push("l = 3 is not covered".into());
    } else {
        rep.caveats.push(format!("{ell} is a Wieferich prime; not covered"));
    }
    Ok(rep)
}
