//! The S-unit group O_S^* with exponent-vector coordinates.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::arith::strip_primes;
use crate::error::{Error, Result};
use crate::field::residue::{pick_residue_maps, ResidueMap};
use crate::field::ideal::QuadIdeal;
use crate::field::{FieldElement, FieldKind, NumberField, PrimeIdeal};
use crate::linalg;

/// Default window for the unit part of `fold`.
pub const DEFAULT_FOLD_WINDOW: i64 = 64;

/// Work cap for the principal-ideal box search when the class number is > 1.
const RELATION_BOX_CAP: u64 = 50_000;

/// Coordinates on O_S^*: a torsion exponent and the free exponents, units
/// first, then the S-generators.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ExponentVector {
    pub torsion: u32,
    pub free: Vec<i64>,
}

impl ExponentVector {
    pub fn new(torsion: u32, free: Vec<i64>) -> Self {
        ExponentVector { torsion, free }
    }

    pub fn max_abs(&self) -> i64 {
        self.free.iter().map(|e| e.abs()).max().unwrap_or(0)
    }

    /// `[t, e_1, ..., e_r]`.
    pub fn to_vec(&self) -> Vec<i64> {
        let mut v = vec![self.torsion as i64];
        v.extend(&self.free);
        v
    }
}

#[derive(Debug)]
pub struct SUnitGroup {
    field: Arc<NumberField>,
    primes: Vec<PrimeIdeal>,
    rational_primes: Vec<u64>,
    torsion: FieldElement,
    w: u32,
    units: Vec<FieldElement>,
    s_gens: Vec<FieldElement>,
    /// Row j: valuations of the j-th S-generator at the primes of S.
    s_vals: Vec<Vec<i64>>,
    s_vals_inv: Vec<Vec<BigRational>>,
    /// Inverses of every free generator, same order as `generators`.
    inverses: Vec<FieldElement>,
}

/// All primes above each rational prime in `ps`, in order.
pub fn primes_above_all(field: &Arc<NumberField>, ps: &[u64]) -> Result<Vec<PrimeIdeal>> {
    let mut out = Vec::new();
    for &p in ps {
        out.extend(field.primes_above(p)?);
    }
    Ok(out)
}

impl SUnitGroup {
    pub fn new(field: Arc<NumberField>, primes: Vec<PrimeIdeal>) -> Result<SUnitGroup> {
        for (i, p) in primes.iter().enumerate() {
            if primes[..i].contains(p) {
                return Err(Error::Domain(format!("prime {} listed twice in S", p.label)));
            }
        }
        let mut rational_primes: Vec<u64> = primes.iter().map(|p| p.p).collect();
        rational_primes.sort();
        rational_primes.dedup();
        let (s_gens, s_vals) = s_generators(&field, &primes)?;
        let s = primes.len();
        let vq: Vec<Vec<BigRational>> = s_vals
            .iter()
            .map(|r| r.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect())
            .collect();
        let s_vals_inv = if s == 0 {
            vec![]
        } else {
            linalg::inverse_rational(&vq).ok_or_else(|| Error::Domain("singular valuation matrix".into()))?
        };
        let (torsion, w) = field.torsion_generator();
        let (torsion, w) = (torsion.clone(), w);
        let units = field.fundamental_units().to_vec();
        let mut inverses = Vec::new();
        for g in units.iter().chain(&s_gens) {
            inverses.push(field.inv(g)?);
        }
        let group = SUnitGroup {
            field,
            primes,
            rational_primes,
            torsion,
            w,
            units,
            s_gens,
            s_vals,
            s_vals_inv,
            inverses,
        };
        let (r1, r2) = group.field.signature();
        assert_eq!(group.rank(), r1 + r2 + s - 1, "S-unit rank formula");
        for g in group.free_generators() {
            if !group.is_sunit(g)? {
                return Err(Error::InvalidDescriptor(format!("generator {g} is not an S-unit")));
            }
        }
        Ok(group)
    }

    /// S given as all primes above the listed rational primes.
    pub fn above(field: &Arc<NumberField>, ps: &[u64]) -> Result<SUnitGroup> {
        let primes = primes_above_all(field, ps)?;
        SUnitGroup::new(field.clone(), primes)
    }

    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    pub fn primes(&self) -> &[PrimeIdeal] {
        &self.primes
    }

    /// Rational primes below S.
    pub fn rational_primes(&self) -> &[u64] {
        &self.rational_primes
    }

    pub fn rank(&self) -> usize {
        self.units.len() + self.s_gens.len()
    }

    pub fn unit_rank(&self) -> usize {
        self.units.len()
    }

    pub fn torsion(&self) -> (&FieldElement, u32) {
        (&self.torsion, self.w)
    }

    pub fn free_generators(&self) -> impl Iterator<Item = &FieldElement> {
        self.units.iter().chain(&self.s_gens)
    }

    pub fn s_generators(&self) -> &[FieldElement] {
        &self.s_gens
    }

    /// Valuations of the S-generators (rows) at the primes of S (columns).
    pub fn valuation_matrix(&self) -> &[Vec<i64>] {
        &self.s_vals
    }

    pub fn free_generator(&self, i: usize) -> &FieldElement {
        if i < self.units.len() {
            &self.units[i]
        } else {
            &self.s_gens[i - self.units.len()]
        }
    }

    pub(crate) fn free_generator_inv(&self, i: usize) -> &FieldElement {
        &self.inverses[i]
    }

    pub fn unfold(&self, v: &ExponentVector) -> Result<FieldElement> {
        if v.free.len() != self.rank() {
            return Err(Error::Domain(format!("exponent vector has {} free entries, rank is {}", v.free.len(), self.rank())));
        }
        let f = &self.field;
        let mut acc = f.pow(&self.torsion, (v.torsion % self.w) as i64)?;
        for (i, &e) in v.free.iter().enumerate() {
            if e == 0 {
                continue;
            }
            let base = if e > 0 { self.free_generator(i) } else { &self.inverses[i] };
            acc = f.mul(&acc, &f.pow(base, e.abs())?);
        }
        Ok(acc)
    }

    /// Valuations of `a` at the primes of S.
    pub fn s_valuations(&self, a: &FieldElement) -> Result<Vec<i64>> {
        self.primes.iter().map(|p| p.ord(&self.field, a)).collect()
    }

    /// The S-generator exponents producing valuation vector `v`, if integral.
    pub fn s_exponents_for(&self, v: &[i64]) -> Option<Vec<i64>> {
        let s = self.primes.len();
        let mut out = Vec::with_capacity(s);
        for j in 0..s {
            let mut acc = BigRational::zero();
            for i in 0..s {
                if v[i] != 0 {
                    acc += &self.s_vals_inv[i][j] * BigRational::from_integer(BigInt::from(v[i]));
                }
            }
            if !acc.is_integer() {
                return None;
            }
            out.push(acc.to_integer().to_i64()?);
        }
        Some(out)
    }

    /// True iff ord_P(a) = 0 for every prime P outside S.
    pub fn is_sunit(&self, a: &FieldElement) -> Result<bool> {
        if a.is_zero() {
            return Ok(false);
        }
        let sp = &self.rational_primes;
        if !strip_primes(a.denominator(), sp).is_one() {
            return Ok(false);
        }
        let nm = self.field.norm(a);
        if !strip_primes(nm.numer(), sp).is_one() || !strip_primes(nm.denom(), sp).is_one() {
            return Ok(false);
        }
        for &p in sp {
            for q in self.field.primes_above(p)? {
                if !self.primes.contains(&q) && q.ord(&self.field, a)? != 0 {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Exponent vector of an S-unit in the generated group. The S-part comes
    /// from the valuation system; the unit part is matched by a bounded
    /// search over unit exponents in `[-window, window]`.
    pub fn fold_with_window(&self, a: &FieldElement, window: i64) -> Result<ExponentVector> {
        if !self.is_sunit(a)? {
            return Err(Error::NotInGroup(format!("{a} is not an S-unit")));
        }
        let v = self.s_valuations(a)?;
        let es = self
            .s_exponents_for(&v)
            .ok_or_else(|| Error::NotInGroup("valuations outside the generated lattice".into()))?;
        let f = &self.field;
        let mut u = a.clone();
        let nu = self.units.len();
        for (j, &e) in es.iter().enumerate() {
            if e != 0 {
                let g = if e > 0 { &self.inverses[nu + j] } else { &self.s_gens[j] };
                u = f.mul(&u, &f.pow(g, e.abs())?);
            }
        }
        let (t, eu) = self.match_unit(&u, window)?;
        let mut free = eu;
        free.extend(es);
        Ok(ExponentVector { torsion: t, free })
    }

    pub fn fold(&self, a: &FieldElement) -> Result<ExponentVector> {
        self.fold_with_window(a, DEFAULT_FOLD_WINDOW)
    }

    /// Find (t, e) with u = zeta^t prod eps_i^{e_i}, |e_i| <= window, by a
    /// meet-in-the-middle over residue signatures, verified exactly.
    fn match_unit(&self, u: &FieldElement, window: i64) -> Result<(u32, Vec<i64>)> {
        let nu = self.units.len();
        let f = &self.field;
        let maps = pick_residue_maps(f, &[], 3);
        let sig = |x: &FieldElement| -> Vec<u64> { maps.iter().map(|m| m.apply(x).unwrap_or(0)).collect() };
        let pow_res = |m: &ResidueMap, g: &FieldElement, gi: &FieldElement, e: i64| -> u64 {
            let base = if e >= 0 { m.apply(g).unwrap() } else { m.apply(gi).unwrap() };
            crate::arith::powmod(base, e.unsigned_abs(), m.q)
        };
        let left = nu / 2;
        let width = (2 * window + 1) as usize;
        let decode = |mut idx: usize, k: usize| -> Vec<i64> {
            let mut out = Vec::with_capacity(k);
            for _ in 0..k {
                out.push((idx % width) as i64 - window);
                idx /= width;
            }
            out
        };
        let count_right = width.pow((nu - left) as u32);
        // table: sig(zeta^t * prod_{i >= left} eps_i^{e_i}) -> (t, idx)
        let mut table: FxHashMap<Vec<u64>, Vec<(u32, usize)>> = FxHashMap::default();
        for t in 0..self.w {
            for idx in 0..count_right {
                let e = decode(idx, nu - left);
                let s: Vec<u64> = maps
                    .iter()
                    .map(|m| {
                        let mut r = crate::arith::powmod(m.apply(&self.torsion).unwrap(), t as u64, m.q);
                        for (k, &ek) in e.iter().enumerate() {
                            let g = left + k;
                            r = m.mul(r, pow_res(m, &self.units[g], &self.inverses[g], ek));
                        }
                        r
                    })
                    .collect();
                table.entry(s).or_default().push((t, idx));
            }
        }
        let target = sig(u);
        let count_left = width.pow(left as u32);
        for idx in 0..count_left {
            let e = decode(idx, left);
            // need sig(u) * prod_{i < left} eps_i^{-e_i}
            let s: Vec<u64> = maps
                .iter()
                .zip(&target)
                .map(|(m, &tv)| {
                    let mut r = tv;
                    for (k, &ek) in e.iter().enumerate() {
                        r = m.mul(r, pow_res(m, &self.units[k], &self.inverses[k], -ek));
                    }
                    r
                })
                .collect();
            if let Some(hits) = table.get(&s) {
                for &(t, ridx) in hits {
                    let mut full = e.clone();
                    full.extend(decode(ridx, nu - left));
                    let mut cand = f.pow(&self.torsion, t as i64)?;
                    for (i, &ei) in full.iter().enumerate() {
                        cand = f.mul(&cand, &f.pow(&self.units[i], ei)?);
                    }
                    if &cand == u {
                        return Ok((t, full));
                    }
                }
            }
        }
        Err(Error::NotInGroup(format!("unit part not found within exponent window {window}")))
    }
}

/// Generators for the S-part: elements whose valuation vectors on S form a
/// basis of the lattice of principal products of S-primes.
fn s_generators(field: &Arc<NumberField>, primes: &[PrimeIdeal]) -> Result<(Vec<FieldElement>, Vec<Vec<i64>>)> {
    let s = primes.len();
    if s == 0 {
        return Ok((vec![], vec![]));
    }
    match field.kind() {
        FieldKind::Rational => {
            let gens = primes.iter().map(|p| field.integer(p.p as i64)).collect();
            Ok((gens, identity(s)))
        }
        FieldKind::Table => {
            let mut gens = Vec::new();
            for p in primes {
                let nm = field.norm(&p.uniformizer);
                if nm.abs() != BigRational::from_integer(p.norm()) {
                    return Err(Error::MissingFixture(format!(
                        "uniformizer of {} does not generate the prime (norm {nm})",
                        p.label
                    )));
                }
                gens.push(p.uniformizer.clone());
            }
            Ok((gens, identity(s)))
        }
        FieldKind::Quadratic { .. } => quadratic_s_generators(field, primes),
    }
}

fn identity(s: usize) -> Vec<Vec<i64>> {
    (0..s).map(|i| (0..s).map(|j| (i == j) as i64).collect()).collect()
}

/// A generator of the integral ideal prod P_i^{a_i} (a_i >= 0), if principal.
fn principal_generator(field: &Arc<NumberField>, primes: &[PrimeIdeal], a: &[i64]) -> Result<Option<FieldElement>> {
    let mut ideal = QuadIdeal::unit();
    for (p, &k) in primes.iter().zip(a) {
        if k > 0 {
            ideal = ideal.mul(field, &QuadIdeal::from_prime(field, p)?.pow(field, k as u32)?)?;
        }
    }
    let Some(x) = ideal.generator(field)? else { return Ok(None) };
    for (p, &k) in primes.iter().zip(a) {
        if p.ord(field, &x)? != k {
            return Err(Error::Domain(format!("generator {x} has the wrong valuation at {}", p.label)));
        }
    }
    Ok(Some(x))
}

fn quadratic_s_generators(field: &Arc<NumberField>, primes: &[PrimeIdeal]) -> Result<(Vec<FieldElement>, Vec<Vec<i64>>)> {
    let s = primes.len();
    let h = field.class_number()? as i64;
    let mut relations: Vec<Vec<i64>> = (0..s).map(|i| (0..s).map(|j| if i == j { h } else { 0 }).collect()).collect();
    if h > 1 {
        let cells = (h as u64).checked_pow(s as u32).unwrap_or(u64::MAX);
        if cells > RELATION_BOX_CAP {
            return Err(Error::ResourceLimit(format!("relation search over {cells} ideal classes")));
        }
        for idx in 1..cells {
            let mut a = Vec::with_capacity(s);
            let mut r = idx;
            for _ in 0..s {
                a.push((r % h as u64) as i64);
                r /= h as u64;
            }
            if principal_generator(field, primes, &a)?.is_some() {
                relations.push(a);
            }
        }
    }
    let basis = linalg::hnf_rows(&relations);
    assert_eq!(basis.len(), s, "relation lattice has full rank");
    let mut gens = Vec::with_capacity(s);
    for row in &basis {
        let g = principal_generator(field, primes, row)?
            .ok_or_else(|| Error::Domain(format!("no generator found for relation {row:?}")))?;
        gens.push(g);
    }
    Ok((gens, basis))
}

/// Evertse's bound 3 * 7^(3 r1 + 4 r2 + 2 #S) on the number of solutions.
pub fn evertse_bound(field: &NumberField, s_count: usize) -> BigInt {
    let (r1, r2) = field.signature();
    BigInt::from(3) * num_traits::pow(BigInt::from(7), 3 * r1 + 4 * r2 + 2 * s_count)
}
