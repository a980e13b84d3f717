use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::arith::{parse_rational, rational_to_string};

/// Element of a number field in integral-basis coordinates, stored as an
/// integer numerator vector over one positive denominator in lowest terms.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FieldElement {
    pub(crate) num: Vec<BigInt>,
    pub(crate) den: BigInt,
}

impl FieldElement {
    pub fn new(num: Vec<BigInt>, den: BigInt) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        let mut g = den.clone();
        for x in &num {
            if g.is_one() {
                break;
            }
            g = g.gcd(x);
        }
        let sign = if den.is_negative() { -BigInt::one() } else { BigInt::one() };
        let g = g * sign;
        if g.is_one() {
            return FieldElement { num, den };
        }
        FieldElement {
            num: num.into_iter().map(|x| x / &g).collect(),
            den: den / &g,
        }
    }

    pub fn from_ints(v: &[i64]) -> Self {
        FieldElement {
            num: v.iter().map(|&x| BigInt::from(x)).collect(),
            den: BigInt::one(),
        }
    }

    pub fn from_rationals(v: &[BigRational]) -> Self {
        let mut l = BigInt::one();
        for q in v {
            l = l.lcm(q.denom());
        }
        let num = v.iter().map(|q| q.numer() * (&l / q.denom())).collect();
        FieldElement::new(num, l)
    }

    pub fn zero(n: usize) -> Self {
        FieldElement { num: vec![BigInt::zero(); n], den: BigInt::one() }
    }

    pub fn one(n: usize) -> Self {
        Self::rational(n, &BigRational::one())
    }

    pub fn rational(n: usize, q: &BigRational) -> Self {
        let mut num = vec![BigInt::zero(); n];
        num[0] = q.numer().clone();
        FieldElement::new(num, q.denom().clone())
    }

    pub fn integer(n: usize, k: i64) -> Self {
        Self::rational(n, &BigRational::from_integer(BigInt::from(k)))
    }

    pub fn dim(&self) -> usize {
        self.num.len()
    }

    pub fn numerators(&self) -> &[BigInt] {
        &self.num
    }

    pub fn denominator(&self) -> &BigInt {
        &self.den
    }

    pub fn coord(&self, i: usize) -> BigRational {
        BigRational::new(self.num[i].clone(), self.den.clone())
    }

    pub fn coords(&self) -> Vec<BigRational> {
        (0..self.dim()).map(|i| self.coord(i)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(|x| x.is_zero())
    }

    pub fn is_integral(&self) -> bool {
        self.den.is_one()
    }

    /// The element as a rational number, if it lies in Q.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.num[1..].iter().all(|x| x.is_zero()) {
            Some(self.coord(0))
        } else {
            None
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let num = self
            .num
            .iter()
            .zip(&o.num)
            .map(|(a, b)| a * &o.den + b * &self.den)
            .collect();
        FieldElement::new(num, &self.den * &o.den)
    }

    pub fn neg(&self) -> Self {
        FieldElement { num: self.num.iter().map(|x| -x).collect(), den: self.den.clone() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        FieldElement::new(
            self.num.iter().map(|x| x * q.numer()).collect(),
            &self.den * q.denom(),
        )
    }

    /// Lexicographic order on coordinate vectors, comparing rationals numerically.
    pub fn cmp_coords(&self, o: &Self) -> Ordering {
        for i in 0..self.dim() {
            let a = &self.num[i] * &o.den;
            let b = &o.num[i] * &self.den;
            match a.cmp(&b) {
                Ordering::Equal => {}
                c => return c,
            }
        }
        Ordering::Equal
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.coords().iter().map(rational_to_string).collect()
    }

    pub fn parse(v: &[String]) -> Option<Self> {
        let q: Option<Vec<BigRational>> = v.iter().map(|s| parse_rational(s)).collect();
        q.map(|q| Self::from_rationals(&q))
    }
}

impl std::fmt::Display for FieldElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{}]", self.to_strings().join(", "))
    }
}

impl serde::Serialize for FieldElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_strings().serialize(s)
    }
}

impl<'de> serde::Deserialize<'de> for FieldElement {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v: Vec<crate::field::descriptor::RatValue> = serde::Deserialize::deserialize(d)?;
        let q: Result<Vec<BigRational>, String> = v.iter().map(|x| x.to_rational()).collect();
        q.map(|q| FieldElement::from_rationals(&q)).map_err(serde::de::Error::custom)
    }
}
