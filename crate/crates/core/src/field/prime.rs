//! Prime ideals and their valuations.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use super::{FieldElement, FieldKind, NumberField};
use crate::arith::{is_prime, kronecker, sqrt_mod, val_p};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SplittingType {
    Split,
    Inert,
    Ramified,
    Other,
}

#[derive(Clone, Debug)]
enum Method {
    /// The only prime above p: ord = v_p(N(b)) / f.
    Unique,
    /// ord_P(tau) = e - 1 and ord_Q(tau) >= e_Q for the other Q above p.
    AntiUniformizer(FieldElement),
}

#[derive(Clone, Debug)]
pub struct PrimeIdeal {
    pub p: u64,
    pub e: u32,
    pub f: u32,
    pub label: String,
    /// An element of valuation exactly 1 at this prime.
    pub uniformizer: FieldElement,
    method: Method,
}

impl PartialEq for PrimeIdeal {
    fn eq(&self, o: &Self) -> bool {
        self.label == o.label && self.p == o.p
    }
}
impl Eq for PrimeIdeal {}

impl PrimeIdeal {
    pub fn residue_degree(&self) -> u32 {
        self.f
    }

    /// Absolute norm p^f.
    pub fn norm(&self) -> BigInt {
        num_traits::pow(BigInt::from(self.p), self.f as usize)
    }

    /// ord_P(a) for a nonzero element.
    pub fn ord(&self, field: &NumberField, a: &FieldElement) -> Result<i64> {
        if a.is_zero() {
            return Err(Error::Domain(format!("valuation of zero at {}", self.label)));
        }
        let den_v = val_p(&a.den, self.p) as i64 * self.e as i64;
        let b = FieldElement { num: a.num.clone(), den: BigInt::one() };
        Ok(self.ord_integral(field, &b) - den_v)
    }

    fn ord_integral(&self, field: &NumberField, b: &FieldElement) -> i64 {
        match &self.method {
            Method::Unique => {
                let nm = field.norm(b);
                (val_p(nm.numer(), self.p) / self.f) as i64
            }
            Method::AntiUniformizer(tau) => {
                let bp = BigInt::from(self.p);
                let mut cur = b.clone();
                let mut k = 0;
                loop {
                    let t = field.mul(&cur, tau);
                    if t.num.iter().all(|x| (x % &bp).is_zero()) {
                        cur = FieldElement { num: t.num.iter().map(|x| x / &bp).collect(), den: BigInt::one() };
                        k += 1;
                    } else {
                        return k;
                    }
                }
            }
        }
    }
}

pub(crate) fn primes_above(field: &Arc<NumberField>, p: u64) -> Result<Vec<PrimeIdeal>> {
    if !is_prime(p) {
        return Err(Error::Domain(format!("{p} is not prime")));
    }
    let n = field.degree();
    match field.kind() {
        FieldKind::Rational => Ok(vec![PrimeIdeal {
            p,
            e: 1,
            f: 1,
            label: format!("({p})"),
            uniformizer: field.integer(p as i64),
            method: Method::Unique,
        }]),
        FieldKind::Quadratic { d } => Ok(quadratic_primes(field, *d, p)),
        FieldKind::Table => {
            let fx: Vec<_> = field.prime_fixtures().iter().filter(|f| f.p == p).collect();
            if fx.is_empty() {
                return Err(Error::MissingFixture(format!("primes above {p} in {}", field.label())));
            }
            let total: u32 = fx.iter().map(|f| f.e * f.f).sum();
            if total as usize != n {
                return Err(Error::MissingFixture(format!(
                    "prime fixtures above {p} cover degree {total} of {n}"
                )));
            }
            let mut out = Vec::new();
            for (i, f) in fx.iter().enumerate() {
                let method = if fx.len() == 1 {
                    Method::Unique
                } else {
                    Method::AntiUniformizer(f.anti_uniformizer.clone().ok_or_else(|| {
                        Error::MissingFixture(format!("anti-uniformizer for prime {i} above {p}"))
                    })?)
                };
                let label = if fx.len() == 1 { format!("P{p}") } else { format!("P{p}_{i}") };
                out.push(PrimeIdeal { p, e: f.e, f: f.f, label, uniformizer: f.uniformizer.clone(), method });
            }
            for q in &out {
                if q.ord(field, &q.uniformizer)? != 1 {
                    return Err(Error::InvalidDescriptor(format!("uniformizer of {} has valuation != 1", q.label)));
                }
            }
            Ok(out)
        }
    }
}

fn quadratic_primes(field: &NumberField, d: i64, p: u64) -> Vec<PrimeIdeal> {
    let disc = super::quadratic::field_discriminant(d);
    let k = kronecker(disc, p);
    let w = |r: i64| FieldElement::from_ints(&[-r, 1]);
    match k {
        -1 => vec![PrimeIdeal {
            p,
            e: 1,
            f: 2,
            label: format!("({p})"),
            uniformizer: field.integer(p as i64),
            method: Method::Unique,
        }],
        0 => {
            let r = roots_of_w_minpoly(d, p)[0];
            let mut u = w(r);
            if val_p(field.norm(&u).numer(), p) != 1 {
                u = w(r - p as i64);
            }
            vec![PrimeIdeal { p, e: 2, f: 1, label: format!("P{p}"), uniformizer: u, method: Method::Unique }]
        }
        _ => {
            let roots = roots_of_w_minpoly(d, p);
            let (r0, r1) = (roots[0], roots[1]);
            let mk = |r: i64, other: i64| {
                let mut u = w(r);
                if val_p(field.norm(&u).numer(), p) != 1 {
                    u = w(r - p as i64);
                }
                PrimeIdeal {
                    p,
                    e: 1,
                    f: 1,
                    label: format!("P{p}_{r}"),
                    uniformizer: u,
                    method: Method::AntiUniformizer(w(other)),
                }
            };
            vec![mk(r0, r1), mk(r1, r0)]
        }
    }
}

/// Roots in [0, p) of the minimal polynomial of w modulo p, ascending.
fn roots_of_w_minpoly(d: i64, p: u64) -> Vec<i64> {
    let one_mod_4 = d.rem_euclid(4) == 1;
    let (b, c) = if one_mod_4 { (-1i128, -((d as i128 - 1) / 4)) } else { (0i128, -(d as i128)) };
    let pp = p as i128;
    let mut roots = Vec::new();
    if p == 2 {
        for x in 0..2i128 {
            if (x * x + b * x + c).rem_euclid(2) == 0 {
                roots.push(x as i64);
            }
        }
    } else {
        // x = (-b +- sqrt(b^2 - 4c)) / 2
        let disc = (b * b - 4 * c).rem_euclid(pp) as u64;
        if let Some(s) = sqrt_mod(disc, p) {
            let inv2 = (pp + 1) / 2;
            for sg in [s as i128, (pp - s as i128) % pp] {
                let x = ((-b + sg).rem_euclid(pp) * inv2).rem_euclid(pp);
                roots.push(x as i64);
            }
        }
    }
    roots.sort();
    roots.dedup();
    roots
}

impl NumberField {
    /// Splitting type of p: split, inert or ramified (quadratic fields and Q);
    /// `Other` for other patterns.
    pub fn splitting_type(self: &Arc<Self>, p: u64) -> Result<SplittingType> {
        if let Some(d) = self.quadratic_d() {
            return Ok(match kronecker(super::quadratic::field_discriminant(d), p) {
                1 => SplittingType::Split,
                -1 => SplittingType::Inert,
                _ => SplittingType::Ramified,
            });
        }
        let ps = self.primes_above(p)?;
        let n = self.degree() as u32;
        Ok(if ps.len() == n as usize {
            SplittingType::Split
        } else if ps.len() == 1 && ps[0].f == n {
            SplittingType::Inert
        } else if ps.len() == 1 && ps[0].e == n {
            SplittingType::Ramified
        } else {
            SplittingType::Other
        })
    }
}

/// Valuation vector (ord_P a)_P over a list of primes.
pub fn valuation_vector(field: &NumberField, primes: &[PrimeIdeal], a: &FieldElement) -> Result<Vec<i64>> {
    primes.iter().map(|p| p.ord(field, a)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::quadratic::quadratic_field;

    #[test]
    fn splitting_examples() {
        let k = quadratic_field(-5).unwrap();
        let p2 = k.primes_above(2).unwrap();
        assert_eq!(p2.len(), 1);
        assert_eq!((p2[0].e, p2[0].f), (2, 1));
        assert_eq!(k.primes_above(3).unwrap().len(), 2);
        assert_eq!(k.primes_above(7).unwrap().len(), 2);
        let p11 = k.primes_above(11).unwrap();
        assert_eq!((p11.len(), p11[0].f), (1, 2));
        let k5 = quadratic_field(5).unwrap();
        assert_eq!(k5.splitting_type(2).unwrap(), SplittingType::Inert);
        let k17 = quadratic_field(17).unwrap();
        assert_eq!(k17.splitting_type(2).unwrap(), SplittingType::Split);
    }

    #[test]
    fn valuations_split_prime() {
        let k = quadratic_field(-5).unwrap();
        let ps = k.primes_above(3).unwrap();
        // 1 + w has norm 6; lies in exactly one prime above 3
        let a = FieldElement::from_ints(&[1, 1]);
        let v: Vec<i64> = ps.iter().map(|p| p.ord(&k, &a).unwrap()).collect();
        assert_eq!(v.iter().sum::<i64>(), 1);
        let nine = k.integer(9);
        for p in &ps {
            assert_eq!(p.ord(&k, &nine).unwrap(), 2);
            assert_eq!(p.ord(&k, &k.inv(&nine).unwrap()).unwrap(), -2);
        }
        let p2 = &k.primes_above(2).unwrap()[0];
        assert_eq!(p2.ord(&k, &k.integer(2)).unwrap(), 2);
        assert_eq!(p2.ord(&k, &a).unwrap(), 1);
    }
}
