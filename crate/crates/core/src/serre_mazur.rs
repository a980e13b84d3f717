//! Exponent bounds for x^p + y^p + L^r z^p = 0 over Q from weight 2
//! newforms of level 2L, and the classification of conductor 2L curves
//! with full 2-torsion.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{factor_bigint, factor_u64, is_prime, primes_up_to, val_p};
use crate::error::{Error, Result};
use crate::field::rational_field;
use crate::orbits::j_invariant;
use crate::poly::{resultant, QPoly};
use crate::solver::solve;
use crate::sunit::SUnitGroup;

/// Trial-division limit used when factoring bound contributions.
pub const FACTOR_LIMIT: u64 = 1_000_000;
pub const DEFAULT_PROBE_COUNT: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FreyArrangement {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub flipped: bool,
}

impl FreyArrangement {
    /// a1..a6 of Y^2 = X(X - A)(X + B).
    pub fn a_invariants(&self) -> [i128; 5] {
        let (a, b) = (self.a as i128, self.b as i128);
        [0, b - a, 0, -a * b, 0]
    }
}

/// Order three coprime terms summing to zero as (A, B, C) with
/// A = -1 mod 4 and B even, flipping all signs if necessary.
pub fn frey_arrangement(x: i64, y: i64, z: i64) -> Result<FreyArrangement> {
    let t = [x, y, z];
    if t.contains(&0) || (x as i128) + (y as i128) + (z as i128) != 0 {
        return Err(Error::Precondition("terms must be nonzero and sum to zero".into()));
    }
    if x.gcd(&y) != 1 || y.gcd(&z) != 1 || x.gcd(&z) != 1 {
        return Err(Error::Precondition("terms must be pairwise coprime".into()));
    }
    let evens: Vec<usize> = (0..3).filter(|&i| t[i] % 2 == 0).collect();
    let [e] = evens[..] else {
        return Err(Error::Precondition("exactly one term must be even".into()));
    };
    let odd: Vec<i64> = (0..3).filter(|&i| i != e).map(|i| t[i]).collect();
    let b = t[e];
    let arr = if let Some(k) = odd.iter().position(|v| v.rem_euclid(4) == 3) {
        FreyArrangement { a: odd[k], b, c: odd[1 - k], flipped: false }
    } else {
        FreyArrangement { a: -odd[0], b: -b, c: -odd[1], flipped: true }
    };
    debug_assert!(arr.a.rem_euclid(4) == 3 && arr.b % 2 == 0 && arr.a + arr.b + arr.c == 0);
    Ok(arr)
}

fn hasse_max(ell: u64) -> i64 {
    (4 * ell).sqrt() as i64
}

/// All integers a with a^2 <= 4 ell.
pub fn hasse_interval(ell: u64) -> Result<Vec<i64>> {
    if !is_prime(ell) {
        return Err(Error::Domain(format!("{ell} is not prime")));
    }
    let m = hasse_max(ell);
    Ok((-m..=m).collect())
}

/// Hasse interval values congruent to ell + 1 mod 4.
pub fn t_set(ell: u64) -> Result<Vec<i64>> {
    let target = ((ell + 1) % 4) as i64;
    Ok(hasse_interval(ell)?.into_iter().filter(|a| a.rem_euclid(4) == target).collect())
}

/// Weight 2 newform with trivial character; coefficients c_ell are
/// stored in the power basis of the root y of `min_poly`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewformRecord {
    pub label: String,
    pub level: u64,
    pub weight: u32,
    /// Monic, lowest degree first.
    pub min_poly: Vec<BigInt>,
    pub coefficients: BTreeMap<u64, Vec<BigRational>>,
}

/// One newform as returned by the LMFDB `mf_hecke_nf` collection.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LmfdbNewform {
    pub label: String,
    pub level: u64,
    pub weight: u32,
    #[serde(default)]
    pub char_orbit_index: Option<u32>,
    pub field_poly: Vec<i64>,
    #[serde(default)]
    pub hecke_ring_rank: Option<usize>,
    #[serde(default)]
    pub hecke_ring_power_basis: Option<bool>,
    #[serde(default)]
    pub hecke_ring_numerators: Option<Vec<Vec<i64>>>,
    #[serde(default)]
    pub hecke_ring_denominators: Option<Vec<i64>>,
    #[serde(default)]
    pub maxp: Option<u64>,
    pub ap: Vec<Vec<i64>>,
}

fn qi(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Squarefree and, in degree > 1, without rational roots: a monic integer
/// polynomial's rational roots are integer divisors of its constant term.
fn min_poly_plausible(c: &[i64]) -> bool {
    let p = QPoly::from_ints(c);
    if p.squarefree_part().degree() != p.degree() {
        return false;
    }
    if c.len() <= 2 {
        return true;
    }
    let c0 = c[0].unsigned_abs();
    if c0 == 0 {
        return false;
    }
    let root = |r: i64| p.eval(&BigRational::from_integer(r.into())).is_zero();
    !factor_u64(c0)
        .iter()
        .fold(vec![1u64], |ds, &(q, e)| {
            ds.iter().flat_map(|&d| (0..=e).map(move |k| d * q.pow(k))).collect()
        })
        .into_iter()
        .any(|d| root(d as i64) || root(-(d as i64)))
}

impl NewformRecord {
    pub fn from_lmfdb(f: &LmfdbNewform) -> Result<Self> {
        let bad = |m: String| Error::Domain(format!("{}: {m}", f.label));
        if f.weight != 2 || f.char_orbit_index.is_some_and(|c| c != 1) {
            return Err(bad("only weight 2 trivial character forms are supported".into()));
        }
        let n = f.field_poly.len().checked_sub(1).filter(|&n| n >= 1).ok_or_else(|| bad("empty field polynomial".into()))?;
        if f.field_poly[n] != 1 {
            return Err(bad("field polynomial is not monic".into()));
        }
        if !min_poly_plausible(&f.field_poly) {
            return Err(bad("field polynomial is reducible".into()));
        }
        if f.hecke_ring_rank.is_some_and(|r| r != n) {
            return Err(bad("hecke ring rank differs from field degree".into()));
        }
        let basis: Vec<Vec<BigRational>> = match (&f.hecke_ring_numerators, &f.hecke_ring_denominators) {
            (Some(nums), Some(dens)) => {
                if nums.len() != n || dens.len() != n {
                    return Err(bad("hecke ring basis has the wrong size".into()));
                }
                nums.iter()
                    .zip(dens)
                    .map(|(row, &d)| {
                        if d == 0 || row.len() > n {
                            return Err(bad("bad hecke ring basis entry".into()));
                        }
                        let mut v: Vec<BigRational> = row.iter().map(|&x| BigRational::new(x.into(), d.into())).collect();
                        v.resize(n, BigRational::zero());
                        Ok(v)
                    })
                    .collect::<Result<_>>()?
            }
            _ => (0..n).map(|i| (0..n).map(|j| qi((i == j) as i64)).collect()).collect(),
        };
        let primes = primes_up_to(f.maxp.unwrap_or(100_000).clamp(2, 100_000));
        let mut coefficients = BTreeMap::new();
        for (k, a) in f.ap.iter().enumerate() {
            let ell = *primes.get(k).ok_or_else(|| bad("more eigenvalues than primes up to maxp".into()))?;
            if a.len() != n {
                return Err(bad(format!("eigenvalue at {ell} has the wrong length")));
            }
            let mut c = vec![BigRational::zero(); n];
            for (ai, b) in a.iter().zip(&basis) {
                for (cj, bj) in c.iter_mut().zip(b) {
                    *cj += bj * qi(*ai);
                }
            }
            coefficients.insert(ell, c);
        }
        let rec = NewformRecord {
            label: f.label.clone(),
            level: f.level,
            weight: f.weight,
            min_poly: f.field_poly.iter().map(|&x| BigInt::from(x)).collect(),
            coefficients,
        };
        rec.check_deligne()?;
        Ok(rec)
    }

    pub fn degree(&self) -> usize {
        self.min_poly.len() - 1
    }

    pub fn is_rational(&self) -> bool {
        self.degree() == 1
    }

    fn min_qpoly(&self) -> QPoly {
        QPoly::from_bigints(&self.min_poly)
    }

    /// c_ell as a polynomial in the generator.
    pub fn c_poly(&self, ell: u64) -> Result<QPoly> {
        let c = self
            .coefficients
            .get(&ell)
            .ok_or_else(|| Error::MissingFixture(format!("{}: no eigenvalue at {ell}", self.label)))?;
        Ok(QPoly::new(c.clone()))
    }

    /// c_ell for a rational form.
    pub fn rational_c(&self, ell: u64) -> Result<i64> {
        let v = self.c_poly(ell)?.coeff(0);
        if !self.is_rational() || !v.is_integer() {
            return Err(Error::Domain(format!("{} is not a rational form", self.label)));
        }
        v.to_integer().to_i64().ok_or_else(|| Error::Domain("eigenvalue out of range".into()))
    }

    /// Characteristic polynomial of c_ell acting on the eigenvalue field.
    pub fn char_poly(&self, ell: u64) -> Result<QPoly> {
        let c = self.c_poly(ell)?;
        let p = self.min_qpoly();
        let n = self.degree();
        let mut m = vec![vec![BigRational::zero(); n]; n];
        let mut yj = QPoly::constant(BigRational::one());
        for j in 0..n {
            let col = c.mul(&yj).rem(&p);
            for (i, row) in m.iter_mut().enumerate() {
                row[j] = col.coeff(i);
            }
            yj = yj.mul(&QPoly::x());
        }
        Ok(QPoly::new(crate::linalg::charpoly(&m)))
    }

    /// Every c_ell is totally real with all conjugates in [-2 sqrt ell, 2 sqrt ell].
    pub fn check_deligne(&self) -> Result<()> {
        let half = BigRational::new((-1).into(), 2.into());
        for &ell in self.coefficients.keys() {
            let chi = self.char_poly(ell)?;
            if chi.count_real_roots() != chi.distinct_roots() {
                return Err(Error::Domain(format!("{}: c_{ell} is not totally real", self.label)));
            }
            let sq = chi.graeffe();
            let top = qi(4 * ell as i64);
            if sq.count_roots_in(&half, &top) != sq.distinct_roots() {
                return Err(Error::Domain(format!("{}: c_{ell} violates the Deligne bound", self.label)));
            }
        }
        Ok(())
    }

    /// |Norm(g(c_ell))| for an integer polynomial g, via a resultant with the
    /// minimal polynomial.
    fn norm_of(&self, g: &QPoly, ell: u64) -> Result<BigInt> {
        let h = g.compose(&self.c_poly(ell)?).rem(&self.min_qpoly());
        let d = h.denominator();
        let hi = h.scale(&BigRational::from_integer(d.clone())).to_integer().expect("denominators cleared");
        let r = resultant(&self.min_poly, &hi);
        let dn = num_traits::pow(d, self.degree());
        let (q, rem) = r.div_rem(&dn);
        if !rem.is_zero() {
            return Err(Error::Domain(format!("{}: norm at {ell} is not integral", self.label)));
        }
        Ok(q.abs())
    }
}

fn beta_factors(ell: u64) -> Vec<QPoly> {
    let l = ell as i64;
    let mut v = vec![QPoly::from_ints(&[l + 1, -1]), QPoly::from_ints(&[l + 1, 1])];
    let m = hasse_max(ell);
    v.extend((-m..=m).map(|a| QPoly::from_ints(&[a, -1])));
    v
}

/// B_ell = |Norm(beta_ell)| where
/// beta_ell = ell (ell+1-c)(ell+1+c) prod_{a in Hasse}(a - c).
pub fn beta_bound(ell: u64, form: &NewformRecord) -> Result<BigInt> {
    if !is_prime(ell) {
        return Err(Error::Domain(format!("{ell} is not prime")));
    }
    let l = QPoly::constant(qi(ell as i64));
    let beta = beta_factors(ell).iter().fold(l, |acc, f| acc.mul(f));
    form.norm_of(&beta, ell)
}

/// |gamma_ell| = |ell (ell+1-a)(ell+1+a) prod_{t in T_ell}(t - a)|.
pub fn gamma_bound(ell: u64, a: i64) -> Result<BigInt> {
    if !is_prime(ell) {
        return Err(Error::Domain(format!("{ell} is not prime")));
    }
    if (a as i128) * (a as i128) > 4 * ell as i128 {
        return Err(Error::Precondition(format!("a = {a} lies outside the Hasse interval at {ell}")));
    }
    let l = ell as i64;
    let mut g = BigInt::from(l) * BigInt::from(l + 1 - a) * BigInt::from(l + 1 + a);
    for t in t_set(ell)? {
        g *= BigInt::from(t - a);
    }
    Ok(g.abs())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConductorClass {
    CurveExists,
    NoCurve,
}

#[derive(Clone, Debug, Serialize)]
pub struct Classification {
    pub l: u64,
    #[serde(rename = "status")]
    pub class: ConductorClass,
    /// e.g. "1+31=32"
    pub witness: Option<String>,
    pub search_bound: i64,
    pub complete: bool,
}

fn ord_q(x: &BigRational, p: u64) -> i64 {
    val_p(x.numer(), p) as i64 - val_p(x.denom(), p) as i64
}

/// Decide whether an elliptic curve over Q with full 2-torsion and
/// conductor 2L exists, by solving the {2, L} S-unit equation.
/// A solution lambda gives a curve of conductor 2L (after a quadratic
/// twist) exactly when j(lambda) is non-integral at both 2 and L.
pub fn classify_conductor_2l(l: u64) -> Result<Classification> {
    if l < 3 || !is_prime(l) {
        return Err(Error::Domain(format!("{l} is not an odd prime")));
    }
    let bound = 8.max(64 - l.leading_zeros() as i64 + 2);
    classify_conductor_2l_with_bound(l, bound)
}

pub fn classify_conductor_2l_with_bound(l: u64, bound: i64) -> Result<Classification> {
    if l < 3 || !is_prime(l) {
        return Err(Error::Domain(format!("{l} is not an odd prime")));
    }
    let q = rational_field();
    let group = SUnitGroup::above(&q, &[2, l])?;
    let sols = solve(&group, bound)?;
    let mut witness: Option<(BigInt, BigInt, BigInt)> = None;
    for s in &sols.solutions {
        let lam = s.lambda.as_rational().expect("rational field");
        let j = j_invariant(&q, &s.lambda)?.as_rational().expect("rational field");
        if ord_q(&j, 2) >= 0 || ord_q(&j, l) >= 0 {
            continue;
        }
        // lambda + mu = 1 as coprime integers n1 + n2 = d.
        let d = lam.denom().clone();
        let n1 = lam.numer().clone();
        let n2 = &d - &n1;
        let mut t = [n1.abs(), n2.abs(), d.abs()];
        t.sort();
        let cand = (t[0].clone(), t[1].clone(), t[2].clone());
        if witness.as_ref().is_none_or(|w| (&cand.2, &cand.1) < (&w.2, &w.1)) {
            witness = Some(cand);
        }
    }
    Ok(Classification {
        l,
        class: if witness.is_some() { ConductorClass::CurveExists } else { ConductorClass::NoCurve },
        witness: witness.map(|(a, b, c)| format!("{a}+{b}={c}")),
        search_bound: bound,
        complete: sols.complete,
    })
}

/// L is a Mersenne or Fermat prime and L >= 31.
pub fn mersenne_or_fermat_at_least_31(l: u64) -> bool {
    if l < 31 || !is_prime(l) {
        return false;
    }
    (l + 1).is_power_of_two() || (l - 1).is_power_of_two()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundStatus {
    Bounded,
    EmptyLevel,
    UnboundedRationalObstruction,
}

#[derive(Clone, Debug, Serialize)]
pub struct Contribution {
    pub form: String,
    pub ell: u64,
    /// "beta" or "gamma".
    pub kind: &'static str,
    pub value: String,
    pub factors: Vec<(u64, u32)>,
    /// Unfactored part above the trial-division limit, if any.
    pub cofactor: Option<String>,
    pub used: bool,
}

impl Contribution {
    pub fn is_zero(&self) -> bool {
        self.value == "0"
    }

    fn largest_prime(&self) -> Result<u64> {
        if self.cofactor.is_some() {
            return Err(Error::ResourceLimit(format!("{} at {}: contribution not fully factored", self.form, self.ell)));
        }
        Ok(self.factors.iter().map(|f| f.0).max().unwrap_or(1))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ExponentBound {
    pub l: u64,
    pub level: u64,
    pub status: BoundStatus,
    pub probes: Vec<u64>,
    pub contributions: Vec<Contribution>,
    /// Any nontrivial solution has exponent p <= bound (p >= 5, p != L).
    pub bound: Option<u64>,
    pub classification: Option<Classification>,
}

/// The first `count` primes not dividing 2L.
pub fn default_probes(l: u64, count: usize) -> Vec<u64> {
    primes_up_to(10_000).into_iter().filter(|&p| p != 2 && p != l).take(count).collect()
}

fn merge(into: &mut BTreeMap<u64, u32>, f: Vec<(u64, u32)>) {
    for (p, e) in f {
        *into.entry(p).or_insert(0) += e;
    }
}

fn beta_contribution(form: &NewformRecord, ell: u64) -> Result<Contribution> {
    let value = beta_bound(ell, form)?;
    let mut factors = BTreeMap::new();
    let mut cofactor = BigInt::one();
    if !value.is_zero() {
        // Factor the norm of each linear factor separately; they are small.
        let l = ell as i64;
        merge(&mut factors, factor_u64(ell).into_iter().map(|(p, e)| (p, e * form.degree() as u32)).collect());
        let mut check = num_traits::pow(BigInt::from(l), form.degree());
        for f in beta_factors(ell) {
            let nf = form.norm_of(&f, ell)?;
            check *= &nf;
            let (fs, rest) = factor_bigint(&nf, FACTOR_LIMIT);
            merge(&mut factors, fs);
            cofactor *= rest;
        }
        debug_assert_eq!(check, value);
    }
    Ok(Contribution {
        form: form.label.clone(),
        ell,
        kind: "beta",
        value: value.to_string(),
        factors: factors.into_iter().collect(),
        cofactor: (!cofactor.is_one()).then(|| cofactor.to_string()),
        used: false,
    })
}

fn gamma_contribution(form: &NewformRecord, ell: u64) -> Result<Contribution> {
    let a = form.rational_c(ell)?;
    let value = gamma_bound(ell, a)?;
    let factors = if value.is_zero() {
        vec![]
    } else {
        let (f, rest) = factor_bigint(&value, FACTOR_LIMIT);
        debug_assert!(rest.is_one());
        f
    };
    Ok(Contribution { form: form.label.clone(), ell, kind: "gamma", value: value.to_string(), factors, cofactor: None, used: false })
}

struct FormOutcome {
    contributions: Vec<Contribution>,
    bound: Option<u64>,
    obstructed: bool,
}

fn form_outcome(l: u64, form: &NewformRecord, probes: &[u64], classification: &Option<Classification>) -> Result<FormOutcome> {
    let mut contributions = probes
        .iter()
        .map(|&ell| if form.is_rational() { gamma_contribution(form, ell) } else { beta_contribution(form, ell) })
        .collect::<Result<Vec<_>>>()?;
    if let Some(c) = contributions.iter_mut().find(|c| !c.is_zero()) {
        c.used = true;
        let b = c.largest_prime()?;
        return Ok(FormOutcome { contributions, bound: Some(b), obstructed: false });
    }
    if !form.is_rational() {
        return Err(Error::Domain(format!("{}: every probe gave a zero norm for an irrational form", form.label)));
    }
    if classification.as_ref().is_some_and(|c| c.class == ConductorClass::CurveExists) {
        return Ok(FormOutcome { contributions, bound: None, obstructed: true });
    }
    for &ell in form.coefficients.keys() {
        if ell == 2 || ell == l || probes.contains(&ell) {
            continue;
        }
        let mut c = gamma_contribution(form, ell)?;
        if !c.is_zero() {
            c.used = true;
            let b = c.largest_prime()?;
            contributions.push(c);
            return Ok(FormOutcome { contributions, bound: Some(b), obstructed: false });
        }
    }
    Err(Error::Domain(format!(
        "{}: a_ell lies in T_ell at every available prime, but no conductor {} curve with full 2-torsion was found",
        form.label,
        2 * l
    )))
}

/// Bound the exponent p of nontrivial solutions of x^p + y^p + L^r z^p = 0
/// from the newforms of level 2L.
pub fn exponent_bound_for_l(l: u64, forms: &[NewformRecord], probes: &[u64]) -> Result<ExponentBound> {
    if l < 3 || !is_prime(l) {
        return Err(Error::Domain(format!("{l} is not an odd prime")));
    }
    let level = 2 * l;
    if let Some(f) = forms.iter().find(|f| f.level != level) {
        return Err(Error::Precondition(format!("{} has level {}, expected {level}", f.label, f.level)));
    }
    if let Some(&p) = probes.iter().find(|&&p| !is_prime(p) || p == 2 || p == l) {
        return Err(Error::Precondition(format!("probe {p} must be a prime not dividing {level}")));
    }
    let mut out = ExponentBound {
        l,
        level,
        status: BoundStatus::EmptyLevel,
        probes: probes.to_vec(),
        contributions: vec![],
        bound: None,
        classification: None,
    };
    if forms.is_empty() {
        return Ok(out);
    }
    if forms.iter().any(|f| f.is_rational()) {
        out.classification = Some(classify_conductor_2l(l)?);
    }
    let outcomes: Vec<FormOutcome> =
        forms.par_iter().map(|f| form_outcome(l, f, probes, &out.classification)).collect::<Result<_>>()?;
    let obstructed = outcomes.iter().any(|o| o.obstructed);
    let bound = outcomes.iter().filter_map(|o| o.bound).max();
    out.contributions = outcomes.into_iter().flat_map(|o| o.contributions).collect();
    if obstructed {
        out.status = BoundStatus::UnboundedRationalObstruction;
    } else {
        out.status = BoundStatus::Bounded;
        out.bound = bound;
    }
    Ok(out)
}
