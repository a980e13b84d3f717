//! The S3 action on lambda-invariants and Legendre curves
//! Y^2 = X(X - 1)(X - lambda).

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{FieldElement, NumberField};
use crate::solver::Solution;
use crate::sunit::SUnitGroup;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LambdaOrbit {
    pub representative: FieldElement,
    /// Distinct members in coordinate order.
    pub members: Vec<FieldElement>,
}

impl LambdaOrbit {
    pub fn size(&self) -> usize {
        self.members.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LegendreCurve {
    pub lambda: FieldElement,
    /// a1, a2, a3, a4, a6 of Y^2 = X^3 - (1 + lambda) X^2 + lambda X.
    pub a_invariants: [FieldElement; 5],
    pub discriminant: FieldElement,
}

fn check_lambda(field: &NumberField, l: &FieldElement) -> Result<()> {
    if l.is_zero() || *l == field.one() {
        return Err(Error::Domain("lambda must differ from 0 and 1".into()));
    }
    Ok(())
}

/// The six images lambda, 1/lambda, 1-lambda, 1/(1-lambda), lambda/(lambda-1),
/// (lambda-1)/lambda.
pub fn s3_images(field: &NumberField, l: &FieldElement) -> Result<[FieldElement; 6]> {
    check_lambda(field, l)?;
    let one = field.one();
    let inv = field.inv(l)?;
    let om = one.sub(l);
    let om_inv = field.inv(&om)?;
    let lm1 = l.sub(&one);
    let a = field.mul(l, &field.inv(&lm1)?);
    let b = field.mul(&lm1, &inv);
    Ok([l.clone(), inv, om, om_inv, a, b])
}

pub fn s3_orbit(field: &NumberField, l: &FieldElement) -> Result<LambdaOrbit> {
    let mut members: Vec<FieldElement> = s3_images(field, l)?.to_vec();
    members.sort_by(|a, b| a.cmp_coords(b));
    members.dedup();
    Ok(LambdaOrbit { representative: members[0].clone(), members })
}

pub fn lambda_from_roots(field: &NumberField, a1: &FieldElement, a2: &FieldElement, a3: &FieldElement) -> Result<FieldElement> {
    if a1 == a2 || a1 == a3 || a2 == a3 {
        return Err(Error::Domain("roots must be distinct".into()));
    }
    field.div(&a3.sub(a1), &a2.sub(a1))
}

pub fn legendre_curve(field: &NumberField, l: &FieldElement) -> Result<LegendreCurve> {
    check_lambda(field, l)?;
    let zero = field.zero();
    let a2 = field.one().add(l).neg();
    let lm1 = l.sub(&field.one());
    let disc = field.mul(&field.integer(16), &field.mul(&field.mul(l, l), &field.mul(&lm1, &lm1)));
    Ok(LegendreCurve {
        lambda: l.clone(),
        a_invariants: [zero.clone(), a2, zero.clone(), l.clone(), zero],
        discriminant: disc,
    })
}

/// j = 2^8 (lambda^2 - lambda + 1)^3 / (lambda^2 (1 - lambda)^2).
pub fn j_invariant(field: &NumberField, l: &FieldElement) -> Result<FieldElement> {
    check_lambda(field, l)?;
    let l2 = field.mul(l, l);
    let t = l2.sub(l).add(&field.one());
    let num = field.mul(&field.integer(256), &field.mul(&t, &field.mul(&t, &t)));
    let om = field.one_minus(l);
    let den = field.mul(&l2, &field.mul(&om, &om));
    field.div(&num, &den)
}

/// Potentially good reduction outside S: lambda and 1 - lambda are S-units.
pub fn pot_good_outside(group: &SUnitGroup, l: &FieldElement) -> Result<bool> {
    crate::solver::verify_solution(group, l)
}

/// Partition the lambda values of a solution list into S3-orbits, ordered by
/// representative.
pub fn orbit_classes(field: &NumberField, solutions: &[Solution]) -> Result<Vec<LambdaOrbit>> {
    let mut by_rep: BTreeMap<Vec<String>, LambdaOrbit> = BTreeMap::new();
    let mut seen: Vec<LambdaOrbit> = Vec::new();
    for s in solutions {
        if seen.iter().any(|o| o.members.contains(&s.lambda)) {
            continue;
        }
        let o = s3_orbit(field, &s.lambda)?;
        seen.push(o.clone());
        by_rep.insert(o.representative.to_strings(), o);
    }
    let mut out: Vec<LambdaOrbit> = by_rep.into_values().collect();
    out.sort_by(|a, b| a.representative.cmp_coords(&b.representative));
    Ok(out)
}

/// Index of the orbit containing each solution's lambda.
pub fn orbit_ids(orbits: &[LambdaOrbit], solutions: &[Solution]) -> Vec<Option<usize>> {
    solutions
        .iter()
        .map(|s| orbits.iter().position(|o| o.members.contains(&s.lambda)))
        .collect()
}

/// Group S3-orbits further under the known field automorphisms. Returns, for
/// each orbit, the index of its class.
pub fn galois_classes(field: &NumberField, orbits: &[LambdaOrbit]) -> Vec<usize> {
    let mut class = vec![usize::MAX; orbits.len()];
    let mut next = 0;
    for i in 0..orbits.len() {
        if class[i] != usize::MAX {
            continue;
        }
        class[i] = next;
        let rep = &orbits[i].representative;
        for a in 0..field.automorphism_count() {
            let img = field.apply_automorphism(a, rep);
            if let Some(j) = orbits.iter().position(|o| o.members.contains(&img)) {
                if class[j] == usize::MAX {
                    class[j] = next;
                }
            }
        }
        next += 1;
    }
    class
}

#[derive(Clone, Debug, Serialize)]
pub struct OrbitReport {
    pub representative: FieldElement,
    pub members: Vec<FieldElement>,
    pub j: FieldElement,
    pub legendre: (i64, i64, String),
}

pub fn orbit_report(field: &NumberField, o: &LambdaOrbit) -> Result<OrbitReport> {
    Ok(OrbitReport {
        representative: o.representative.clone(),
        members: o.members.clone(),
        j: j_invariant(field, &o.representative)?,
        legendre: (0, 1, "lambda".into()),
    })
}
