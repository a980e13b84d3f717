//! Cheap certificates that the unit or S-unit equation has no solutions.

use std::sync::Arc;

use serde::Serialize;

use crate::arith::{factor_u64, is_prime};
use crate::field::{NumberField, PrimeIdeal};

#[derive(Clone, Debug, Serialize)]
pub struct Obstruction {
    pub name: String,
    pub applicable: bool,
    pub certificate: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ObstructionReport {
    pub field: String,
    pub entries: Vec<Obstruction>,
}

impl ObstructionReport {
    pub fn any(&self) -> bool {
        self.entries.iter().any(|o| o.applicable)
    }
}

pub fn obstructions(field: &Arc<NumberField>, s: &[PrimeIdeal]) -> ObstructionReport {
    ObstructionReport {
        field: field.label().to_string(),
        entries: vec![degree_one_above_two(field, s), three_splits(field, s), totally_ramified_ell(field, s)],
    }
}

/// Every S-unit reduces to 1 modulo a prime of residue field F_2 outside S,
/// so lambda + mu = 1 would give 0 = 1 there.
fn degree_one_above_two(field: &Arc<NumberField>, s: &[PrimeIdeal]) -> Obstruction {
    let name = "degree-one-prime-above-2".to_string();
    if let Some(p) = s.iter().find(|p| p.p == 2) {
        return Obstruction { name, applicable: false, certificate: format!("S contains {} above 2", p.label) };
    }
    match field.primes_above(2) {
        Ok(ps) => match ps.iter().find(|p| p.f == 1) {
            Some(p) => Obstruction {
                name,
                applicable: true,
                certificate: format!("{} has residue field F_2 and S has odd norm", p.label),
            },
            None => Obstruction { name, applicable: false, certificate: "no prime of residue degree 1 above 2".into() },
        },
        Err(e) => Obstruction { name, applicable: false, certificate: format!("primes above 2 unavailable: {e}") },
    }
}

/// Unit equation only: 3 splits completely and 3 does not divide the degree.
fn three_splits(field: &Arc<NumberField>, s: &[PrimeIdeal]) -> Obstruction {
    let name = "three-splits-completely".to_string();
    let n = field.degree();
    let no = |c: String| Obstruction { name: name.clone(), applicable: false, certificate: c };
    if !s.is_empty() {
        return no("S is nonempty".into());
    }
    if n.is_multiple_of(3) {
        return no(format!("3 divides the degree {n}"));
    }
    match field.primes_above(3) {
        Ok(ps) if ps.len() == n => Obstruction {
            name,
            applicable: true,
            certificate: format!("3 splits into {n} primes of residue degree 1; 3 does not divide {n}"),
        },
        Ok(ps) => no(format!("3 has {} primes above it, degree {n}", ps.len())),
        Err(e) => no(format!("primes above 3 unavailable: {e}")),
    }
}

/// Unit equation only: K Galois of degree l^k, l >= 5, with l totally ramified.
fn totally_ramified_ell(field: &Arc<NumberField>, s: &[PrimeIdeal]) -> Obstruction {
    let name = "ell-extension-totally-ramified".to_string();
    let n = field.degree();
    let no = |c: String| Obstruction { name: name.clone(), applicable: false, certificate: c };
    if !s.is_empty() {
        return no("S is nonempty".into());
    }
    let f = factor_u64(n as u64);
    if f.len() != 1 || f[0].0 < 5 || !is_prime(f[0].0) {
        return no(format!("degree {n} is not a power of a prime >= 5"));
    }
    let ell = f[0].0;
    if field.automorphism_count() + 1 != n {
        return no("field is not known to be Galois".into());
    }
    match field.primes_above(ell) {
        Ok(ps) if ps.len() == 1 && ps[0].e as usize == n => Obstruction {
            name,
            applicable: true,
            certificate: format!("{ell} is totally ramified in a Galois extension of degree {n}"),
        },
        Ok(_) => no(format!("{ell} is not totally ramified")),
        Err(e) => no(format!("primes above {ell} unavailable: {e}")),
    }
}
