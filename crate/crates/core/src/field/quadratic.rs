//! Quadratic fields Q(sqrt d): construction, fundamental units, class numbers,
//! and elements of prescribed norm.

use std::collections::HashSet;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{FieldElement, FieldKind, FieldParts, NumberField};
use crate::arith::{exact_sqrt, is_squarefree};
use crate::error::{Error, Result};

/// Brute-force search limit for the fundamental unit before falling back to
/// continued fractions.
const UNIT_BRUTE_FORCE_Y: i64 = 1000;

/// Work limit for the norm-equation enumeration.
const NORM_SEARCH_LIMIT: u64 = 200_000_000;

pub fn field_discriminant(d: i64) -> i64 {
    if d.rem_euclid(4) == 1 {
        d
    } else {
        4 * d
    }
}

/// Q(sqrt d) with integral basis {1, w}, w = sqrt d or (1 + sqrt d)/2.
pub fn quadratic_field(d: i64) -> Result<Arc<NumberField>> {
    if d == 1 || d == 0 || !is_squarefree(d) {
        return Err(Error::InvalidDescriptor(format!("d = {d} is not a squarefree integer other than 0, 1")));
    }
    let one_mod_4 = d.rem_euclid(4) == 1;
    let w2 = if one_mod_4 { vec![(d - 1) / 4, 1] } else { vec![d, 0] };
    let table = vec![vec![vec![1, 0], vec![0, 1]], vec![vec![0, 1], w2]];
    let signature = if d > 0 { (2, 0) } else { (0, 1) };
    let units = if d > 0 { vec![fundamental_unit(d)] } else { vec![] };
    let torsion = match d {
        -1 => Some((FieldElement::from_ints(&[0, 1]), 4)),
        -3 => Some((FieldElement::from_ints(&[0, 1]), 6)),
        _ => Some((FieldElement::from_ints(&[-1, 0]), 2)),
    };
    let conj = if one_mod_4 {
        vec![FieldElement::from_ints(&[1, 0]), FieldElement::from_ints(&[1, -1])]
    } else {
        vec![FieldElement::from_ints(&[1, 0]), FieldElement::from_ints(&[0, -1])]
    };
    NumberField::from_parts(FieldParts {
        label: format!("Q(sqrt({d}))"),
        kind: FieldKind::Quadratic { d },
        table,
        signature,
        basis_names: vec!["1".into(), "w".into()],
        units,
        torsion,
        class_number: None,
        prime_fixtures: vec![],
        automorphisms: vec![conj],
    })
}

fn from_half_sqrt_d(x: &BigInt, y: &BigInt) -> FieldElement {
    // (x + y sqrt d)/2 for d = 1 mod 4, x = y mod 2
    FieldElement::new(vec![(x - y) / 2, y.clone()], BigInt::one())
}

/// Norm of a + b w.
pub fn norm_ab(d: i64, a: &BigInt, b: &BigInt) -> BigInt {
    if d.rem_euclid(4) == 1 {
        a * a + a * b - b * b * BigInt::from((d - 1) / 4)
    } else {
        a * a - b * b * BigInt::from(d)
    }
}

/// Fundamental unit eps > 1 of a real quadratic field.
pub fn fundamental_unit(d: i64) -> FieldElement {
    fundamental_unit_brute(d, UNIT_BRUTE_FORCE_Y).unwrap_or_else(|| fundamental_unit_cf(d))
}

/// Smallest solution of the unit norm equation with 1 <= y <= ymax.
pub fn fundamental_unit_brute(d: i64, ymax: i64) -> Option<FieldElement> {
    let bd = BigInt::from(d);
    let one_mod_4 = d.rem_euclid(4) == 1;
    for y in 1..=ymax {
        let by = BigInt::from(y);
        let dy2 = &bd * &by * &by;
        let shifts: [i64; 2] = if one_mod_4 { [-4, 4] } else { [-1, 1] };
        for s in shifts {
            let t = &dy2 + s;
            if let Some(x) = exact_sqrt(&t) {
                if x.is_zero() {
                    continue;
                }
                return Some(if one_mod_4 {
                    from_half_sqrt_d(&x, &by)
                } else {
                    FieldElement::new(vec![x, by], BigInt::one())
                });
            }
        }
    }
    None
}

/// Fundamental unit from the continued fraction of w: the first convergent
/// p/q with N(p - q w) = +-1 gives eps = (p - q Tr w) + q w.
pub fn fundamental_unit_cf(d: i64) -> FieldElement {
    let one_mod_4 = d.rem_euclid(4) == 1;
    let bd = BigInt::from(d);
    let s = bd.sqrt();
    // w = (P + sqrt d) / Q with Q | d - P^2
    let (mut pp, mut qq) = if one_mod_4 {
        (BigInt::one(), BigInt::from(2))
    } else {
        (BigInt::zero(), BigInt::one())
    };
    let (mut p_prev, mut p_cur) = (BigInt::zero(), BigInt::one());
    let (mut q_prev, mut q_cur) = (BigInt::one(), BigInt::zero());
    let tr = if one_mod_4 { BigInt::one() } else { BigInt::zero() };
    loop {
        let a = (&pp + &s).div_floor(&qq);
        let p_next = &a * &p_cur + &p_prev;
        let q_next = &a * &q_cur + &q_prev;
        p_prev = std::mem::replace(&mut p_cur, p_next);
        q_prev = std::mem::replace(&mut q_cur, q_next);
        let nm = norm_ab(d, &p_cur, &(-&q_cur));
        if nm.abs().is_one() {
            let a0 = &p_cur - &q_cur * &tr;
            return FieldElement::new(vec![a0, q_cur.clone()], BigInt::one());
        }
        pp = &a * &qq - &pp;
        qq = (&bd - &pp * &pp) / &qq;
    }
}

/// Class number from a quadratic discriminant. For real fields, counts
/// cycles of reduced indefinite forms and halves when N(eps) = +1.
pub fn class_number(disc: i64, neg_unit: bool) -> u64 {
    if disc < 0 {
        class_number_imaginary(disc)
    } else {
        let hp = narrow_class_number_real(disc);
        if neg_unit {
            hp
        } else {
            hp / 2
        }
    }
}

fn class_number_imaginary(disc: i64) -> u64 {
    let dd = -disc;
    let mut h = 0u64;
    let mut a = 1i64;
    while 3 * a * a <= dd {
        let mut b = -a + 1;
        while b <= a {
            let num = b * b - disc;
            if num % (4 * a) == 0 {
                let c = num / (4 * a);
                if c >= a && !(b < 0 && (a == c || -b == a)) {
                    h += 1;
                }
            }
            b += 1;
        }
        a += 1;
    }
    h
}

fn narrow_class_number_real(disc: i64) -> u64 {
    let s = (disc as f64).sqrt() as i64;
    let s = (s - 2..=s + 2).filter(|&t| t >= 0 && t * t <= disc).max().unwrap();
    let reduced = |a: i64, b: i64| b > 0 && b <= s && 2 * a.abs() + b > s && 2 * a.abs() - b <= s;
    let mut forms = Vec::new();
    let mut b = if disc % 2 == 0 { 2 } else { 1 };
    while b <= s {
        let ac = (b * b - disc) / 4; // a c < 0
        let m = -ac;
        let mut a = 1;
        while a * a <= m {
            if m % a == 0 {
                for (x, y) in [(a, m / a), (m / a, a)] {
                    for (aa, cc) in [(x, -y), (-x, y)] {
                        if reduced(aa, b) {
                            forms.push((aa, b, cc));
                        }
                    }
                }
            }
            a += 1;
        }
        b += 2;
    }
    forms.sort();
    forms.dedup();
    let rho = |(_, b, c): (i64, i64, i64)| {
        let m = 2 * c.abs();
        // b' = -b mod 2|c| with s - 2|c| < b' <= s
        let lo = s - m + 1;
        let bp = lo + (-b - lo).rem_euclid(m);
        let ap = (bp * bp - disc) / (4 * c);
        (c, bp, ap)
    };
    let mut seen = HashSet::new();
    let mut cycles = 0u64;
    for &f in &forms {
        if seen.contains(&f) {
            continue;
        }
        cycles += 1;
        let mut g = f;
        while seen.insert(g) {
            g = rho(g);
        }
    }
    cycles
}

/// All integral elements of Q(sqrt d) with |N(x)| = n, up to multiplication
/// by units. For real fields, representatives x > 0 with x/|x'| in [1, eps^2).
pub fn elements_of_norm(field: &NumberField, n: &BigInt) -> Result<Vec<FieldElement>> {
    let d = field
        .quadratic_d()
        .ok_or_else(|| Error::Unsupported("norm equations need a quadratic field".into()))?;
    let disc = BigInt::from(field_discriminant(d));
    let four_n = n.abs() * 4;
    let mut out = Vec::new();
    let mut push = |u: &BigInt, v: &BigInt| {
        // x = (u + v sqrt D)/2
        if !(u - v * &disc).is_even() {
            return;
        }
        let x = if d.rem_euclid(4) == 1 {
            FieldElement::new(vec![(u - v) / 2, v.clone()], BigInt::one())
        } else {
            FieldElement::new(vec![u / 2, v.clone()], BigInt::one())
        };
        out.push(x);
    };
    if d < 0 {
        let ad = -&disc;
        let mut v = BigInt::zero();
        let mut work = 0u64;
        while &ad * &v * &v <= four_n {
            work += 1;
            if work > NORM_SEARCH_LIMIT {
                return Err(Error::ResourceLimit("norm equation search".into()));
            }
            let t = &four_n - &ad * &v * &v;
            if let Some(u) = exact_sqrt(&t) {
                for sv in [v.clone(), -&v] {
                    push(&u, &sv);
                    if !u.is_zero() {
                        push(&(-&u), &sv);
                    }
                    if v.is_zero() {
                        break;
                    }
                }
            }
            v += 1;
        }
    } else {
        let eps = &field.fundamental_units()[0];
        let eps_f = super::bigint_to_f64(&eps.num[0]).abs()
            + super::bigint_to_f64(&eps.num[1]).abs() * (d as f64).sqrt();
        let bound = ((eps_f + 1.0) * super::bigint_to_f64(n).abs().sqrt()
            / super::bigint_to_f64(&disc).sqrt())
        .ceil()
            + 1.0;
        if !bound.is_finite() || bound > NORM_SEARCH_LIMIT as f64 {
            return Err(Error::ResourceLimit(format!(
                "norm equation search range {bound:e} too large"
            )));
        }
        let bound = bound as u64;
        for vv in 0..=bound {
            let v = BigInt::from(vv);
            let dv2 = &disc * &v * &v;
            for t in [&dv2 + &four_n, &dv2 - &four_n] {
                if let Some(u) = exact_sqrt(&t) {
                    for sv in [v.clone(), -&v] {
                        push(&u, &sv);
                        if !u.is_zero() {
                            push(&(-&u), &sv);
                        }
                        if v.is_zero() {
                            break;
                        }
                    }
                }
            }
        }
    }
    // Sort by size so callers pick small generators first.
    out.sort_by_key(|x| {
        let h: BigInt = x.num.iter().map(|c| c.abs()).sum();
        (h, std::cmp::Reverse(x.num.clone()))
    });
    out.dedup();
    Ok(out)
}

/// Rough size of a quadratic element, used for tie-breaking only.
pub fn height(x: &FieldElement) -> u64 {
    x.num.iter().map(|c| c.abs().to_u64().unwrap_or(u64::MAX)).fold(0, u64::saturating_add)
}
