//! Integral ideals of quadratic fields as Z-lattices in Hermite normal form,
//! with a principality test by lattice reduction.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::prime::PrimeIdeal;
use super::quadratic::elements_of_norm;
use super::{FieldElement, NumberField};
use crate::error::{Error, Result};

type Vec2 = (BigInt, BigInt);

/// The ideal with Z-basis `a` and `b + c w`, where c | a, c | b, 0 <= b < a.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadIdeal {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
}

/// w^2 = T w - N, read off the multiplication table.
struct Shape {
    t: BigInt,
    n: BigInt,
    real: bool,
}

fn shape(field: &NumberField) -> Result<Shape> {
    let d = field
        .quadratic_d()
        .ok_or_else(|| Error::Unsupported("ideal arithmetic needs a quadratic field".into()))?;
    let w2 = &field.table()[1][1];
    Ok(Shape { t: BigInt::from(w2[1]), n: BigInt::from(-w2[0]), real: d > 0 })
}

impl Shape {
    fn mul(&self, x: &Vec2, y: &Vec2) -> Vec2 {
        let yy = &x.1 * &y.1;
        (&x.0 * &y.0 - &self.n * &yy, &x.0 * &y.1 + &x.1 * &y.0 + &self.t * &yy)
    }

    fn conj(&self, x: &Vec2) -> Vec2 {
        (&x.0 + &self.t * &x.1, -&x.1)
    }

    fn norm(&self, x: &Vec2) -> BigInt {
        &x.0 * &x.0 + &self.t * &x.0 * &x.1 + &self.n * &x.1 * &x.1
    }

    /// A positive definite form: Tr(x^2) for real fields, N(x) otherwise.
    fn size(&self, x: &Vec2) -> BigInt {
        if self.real {
            BigInt::from(2) * &x.0 * &x.0
                + BigInt::from(2) * &self.t * &x.0 * &x.1
                + (&self.t * &self.t - BigInt::from(2) * &self.n) * &x.1 * &x.1
        } else {
            self.norm(x)
        }
    }
}

fn hnf(gens: Vec<Vec2>) -> QuadIdeal {
    let mut row: Option<Vec2> = None;
    let mut a = BigInt::zero();
    for x in gens {
        let Some(mut r) = row.take() else {
            if x.1.is_zero() {
                a = a.gcd(&x.0);
            } else {
                row = Some(x);
            }
            continue;
        };
        let mut y = x;
        while !y.1.is_zero() {
            let q = r.1.div_floor(&y.1);
            let z = (&r.0 - &q * &y.0, &r.1 - &q * &y.1);
            r = y;
            y = z;
        }
        a = a.gcd(&y.0);
        row = Some(r);
    }
    let mut r = row.expect("ideal lattice has rank 2");
    if r.1.is_negative() {
        r = (-r.0, -r.1);
    }
    QuadIdeal { b: r.0.mod_floor(&a), a, c: r.1 }
}

fn coords(x: &FieldElement) -> Vec2 {
    debug_assert!(x.denominator().is_one());
    (x.numerators()[0].clone(), x.numerators()[1].clone())
}

impl QuadIdeal {
    pub fn unit() -> QuadIdeal {
        QuadIdeal { a: BigInt::one(), b: BigInt::zero(), c: BigInt::one() }
    }

    fn basis(&self) -> [Vec2; 2] {
        [(self.a.clone(), BigInt::zero()), (self.b.clone(), self.c.clone())]
    }

    pub fn norm(&self) -> BigInt {
        &self.a * &self.c
    }

    pub fn contains(&self, x: &Vec2) -> bool {
        if !x.1.is_multiple_of(&self.c) {
            return false;
        }
        (&x.0 - (&x.1 / &self.c) * &self.b).is_multiple_of(&self.a)
    }

    /// The ideal P as (p, w - r), or (p) when P is inert.
    pub fn from_prime(field: &NumberField, p: &PrimeIdeal) -> Result<QuadIdeal> {
        let sh = shape(field)?;
        let pz = BigInt::from(p.p);
        if p.f == 2 {
            return Ok(hnf(vec![(pz.clone(), BigInt::zero()), (BigInt::zero(), pz)]));
        }
        for r in 0..p.p {
            let rz = BigInt::from(r);
            if !(&rz * &rz - &sh.t * &rz + &sh.n).is_multiple_of(&pz) {
                continue;
            }
            let g = FieldElement::new(vec![-&rz, BigInt::one()], BigInt::one());
            if p.ord(field, &g)? >= 1 {
                return Ok(hnf(vec![(pz.clone(), BigInt::zero()), (-rz, BigInt::one())]));
            }
        }
        Err(Error::Domain(format!("no local root for {}", p.label)))
    }

    pub fn mul(&self, field: &NumberField, o: &QuadIdeal) -> Result<QuadIdeal> {
        let sh = shape(field)?;
        let mut g = Vec::with_capacity(4);
        for x in self.basis() {
            for y in o.basis() {
                g.push(sh.mul(&x, &y));
            }
        }
        Ok(hnf(g))
    }

    pub fn pow(&self, field: &NumberField, k: u32) -> Result<QuadIdeal> {
        let mut acc = QuadIdeal::unit();
        for _ in 0..k {
            acc = acc.mul(field, self)?;
        }
        Ok(acc)
    }

    /// A short nonzero element for the form Tr(x^2) (real) or N(x) (imaginary).
    fn short_element(&self, sh: &Shape) -> Vec2 {
        let [mut u, mut v] = self.basis();
        loop {
            if sh.size(&v) < sh.size(&u) {
                std::mem::swap(&mut u, &mut v);
            }
            let s = (&u.0 + &v.0, &u.1 + &v.1);
            let two_b = sh.size(&s) - sh.size(&u) - sh.size(&v);
            let qu = sh.size(&u);
            // mu = round(B(u, v) / Q(u)) = round(two_b / (2 qu))
            let mu = (two_b + &qu).div_floor(&(BigInt::from(2) * &qu));
            if mu.is_zero() {
                return u;
            }
            v = (&v.0 - &mu * &u.0, &v.1 - &mu * &u.1);
        }
    }

    /// A generator when the ideal is principal.
    pub fn generator(&self, field: &NumberField) -> Result<Option<FieldElement>> {
        let sh = shape(field)?;
        let n_i = self.norm();
        let alpha = self.short_element(&sh);
        let n_alpha = sh.norm(&alpha).abs();
        let to_elem = |x: &Vec2| FieldElement::new(vec![x.0.clone(), x.1.clone()], BigInt::one());
        if n_alpha == n_i {
            return Ok(Some(to_elem(&alpha)));
        }
        if !sh.real {
            // alpha has minimal norm in the ideal.
            return Ok(None);
        }
        // J = alpha * conj(I) / N(I) is integral, equivalent to I^-1, and small.
        let gens: Vec<Vec2> = self
            .basis()
            .iter()
            .map(|g| {
                let y = sh.mul(&alpha, &sh.conj(g));
                (y.0 / &n_i, y.1 / &n_i)
            })
            .chain(std::iter::once((n_alpha.clone() / &n_i, BigInt::zero())))
            .collect();
        let j = hnf(gens);
        debug_assert_eq!(j.norm(), &n_alpha / &n_i);
        for beta in elements_of_norm(field, &j.norm())? {
            if j.contains(&coords(&beta)) {
                return Ok(Some(field.div(&to_elem(&alpha), &beta)?));
            }
        }
        Ok(None)
    }
}
