//! Number fields given by an integral basis and integer structure constants.

pub mod descriptor;
mod element;
pub mod ideal;
pub mod prime;
pub mod quadratic;
pub mod residue;

use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub use element::FieldElement;
pub use prime::{PrimeIdeal, SplittingType};

use crate::error::{Error, Result};
use crate::linalg;

/// Class numbers are computed for quadratic discriminants up to this size.
pub const DEFAULT_CLASS_NUMBER_CAP: u64 = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FieldKind {
    Rational,
    Quadratic { d: i64 },
    Table,
}

#[derive(Clone, Debug)]
pub struct PrimeFixture {
    pub p: u64,
    pub e: u32,
    pub f: u32,
    pub uniformizer: FieldElement,
    pub anti_uniformizer: Option<FieldElement>,
}

#[derive(Debug)]
pub struct NumberField {
    label: String,
    kind: FieldKind,
    n: usize,
    table: Vec<Vec<Vec<i64>>>,
    pair_terms: Vec<Vec<(usize, i64)>>,
    traces: Vec<BigInt>,
    signature: (usize, usize),
    basis_names: Vec<String>,
    units: Vec<FieldElement>,
    torsion: FieldElement,
    torsion_order: u32,
    class_number_fixture: Option<u64>,
    class_number_cache: OnceLock<u64>,
    prime_fixtures: Vec<PrimeFixture>,
    automorphisms: Vec<Vec<FieldElement>>,
}

pub(crate) struct FieldParts {
    pub label: String,
    pub kind: FieldKind,
    pub table: Vec<Vec<Vec<i64>>>,
    pub signature: (usize, usize),
    pub basis_names: Vec<String>,
    pub units: Vec<FieldElement>,
    pub torsion: Option<(FieldElement, u32)>,
    pub class_number: Option<u64>,
    pub prime_fixtures: Vec<PrimeFixture>,
    pub automorphisms: Vec<Vec<FieldElement>>,
}

impl NumberField {
    /// Validates the structure constants and generator fixtures.
    pub(crate) fn from_parts(parts: FieldParts) -> Result<Arc<NumberField>> {
        let n = parts.table.len();
        let bad = |m: String| Err(Error::InvalidDescriptor(m));
        if n == 0 {
            return bad("degree must be positive".into());
        }
        for row in &parts.table {
            if row.len() != n || row.iter().any(|c| c.len() != n) {
                return bad(format!("multiplication table is not {n}x{n}x{n}"));
            }
        }
        if parts.basis_names.len() != n {
            return bad("basis_names length differs from degree".into());
        }
        let (r1, r2) = parts.signature;
        if r1 + 2 * r2 != n {
            return bad(format!("signature ({r1},{r2}) incompatible with degree {n}"));
        }
        let t = &parts.table;
        for j in 0..n {
            for k in 0..n {
                let e = if j == k { 1 } else { 0 };
                if t[0][j][k] != e || t[j][0][k] != e {
                    return bad("first basis element is not 1".into());
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                if t[i][j] != t[j][i] {
                    return bad(format!("table not commutative at ({i},{j})"));
                }
            }
        }
        // (b_i b_j) b_k == b_i (b_j b_k)
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let mut lhs = vec![0i128; n];
                    let mut rhs = vec![0i128; n];
                    for m in 0..n {
                        let c1 = t[i][j][m] as i128;
                        let c2 = t[j][k][m] as i128;
                        for q in 0..n {
                            lhs[q] += c1 * t[m][k][q] as i128;
                            rhs[q] += c2 * t[i][m][q] as i128;
                        }
                    }
                    if lhs != rhs {
                        return bad(format!("table not associative at ({i},{j},{k})"));
                    }
                }
            }
        }
        let mut pair_terms = vec![Vec::new(); n * n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if t[i][j][k] != 0 {
                        pair_terms[i * n + j].push((k, t[i][j][k]));
                    }
                }
            }
        }
        let traces = (0..n)
            .map(|j| BigInt::from((0..n).map(|i| t[j][i][i]).sum::<i64>()))
            .collect();
        let mut field = NumberField {
            label: parts.label,
            kind: parts.kind,
            n,
            table: parts.table,
            pair_terms,
            traces,
            signature: parts.signature,
            basis_names: parts.basis_names,
            units: parts.units,
            torsion: FieldElement::integer(n, -1),
            torsion_order: 2,
            class_number_fixture: parts.class_number,
            class_number_cache: OnceLock::new(),
            prime_fixtures: parts.prime_fixtures,
            automorphisms: Vec::new(),
        };
        if let Some((z, w)) = parts.torsion {
            if z.dim() != n || w == 0 {
                return bad("torsion generator has wrong length".into());
            }
            if !field.pow(&z, w as i64)?.eq(&field.one()) {
                return bad(format!("torsion generator does not have order dividing {w}"));
            }
            for q in crate::arith::factor_u64(w as u64) {
                if field.pow(&z, (w as u64 / q.0) as i64)? == field.one() {
                    return bad(format!("torsion generator has order smaller than {w}"));
                }
            }
            field.torsion = z;
            field.torsion_order = w;
        } else if r1 == 0 {
            log::warn!("field {} is totally complex but has no torsion fixture; assuming {{+1,-1}}", field.label);
        }
        if field.torsion_order % 2 == 1 {
            return bad("torsion order must be even".into());
        }
        if field.units.len() != r1 + r2 - 1 {
            return bad(format!("expected {} fundamental units, got {}", r1 + r2 - 1, field.units.len()));
        }
        for u in &field.units {
            if u.dim() != n || !field.is_unit(u) {
                return bad(format!("unit generator {u} is not a unit of the order"));
            }
        }
        for pf in &field.prime_fixtures {
            if pf.uniformizer.dim() != n || !pf.uniformizer.is_integral() {
                return bad(format!("uniformizer above {} is not integral", pf.p));
            }
            if pf.e == 0 || pf.f == 0 || (pf.e * pf.f) as usize > n {
                return bad(format!("bad ramification data above {}", pf.p));
            }
        }
        for img in &parts.automorphisms {
            if img.len() != n || img.iter().any(|x| x.dim() != n) {
                return bad("automorphism images have wrong shape".into());
            }
            for i in 0..n {
                for j in 0..n {
                    let lhs = field.mul(&img[i], &img[j]);
                    let bij = FieldElement::from_ints(&field.table[i][j]);
                    let rhs = field.apply_images(img, &bij);
                    if lhs != rhs {
                        return bad("automorphism is not multiplicative".into());
                    }
                }
            }
        }
        field.automorphisms = parts.automorphisms;
        Ok(Arc::new(field))
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn kind(&self) -> &FieldKind {
        &self.kind
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn signature(&self) -> (usize, usize) {
        self.signature
    }

    pub fn is_totally_real(&self) -> bool {
        self.signature.1 == 0
    }

    pub fn basis_names(&self) -> &[String] {
        &self.basis_names
    }

    pub fn table(&self) -> &[Vec<Vec<i64>>] {
        &self.table
    }

    pub fn quadratic_d(&self) -> Option<i64> {
        match self.kind {
            FieldKind::Quadratic { d } => Some(d),
            _ => None,
        }
    }

    pub fn fundamental_units(&self) -> &[FieldElement] {
        &self.units
    }

    pub fn torsion_generator(&self) -> (&FieldElement, u32) {
        (&self.torsion, self.torsion_order)
    }

    pub fn prime_fixtures(&self) -> &[PrimeFixture] {
        &self.prime_fixtures
    }

    pub fn unit_rank(&self) -> usize {
        self.signature.0 + self.signature.1 - 1
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement::zero(self.n)
    }

    pub fn one(&self) -> FieldElement {
        FieldElement::one(self.n)
    }

    pub fn integer(&self, k: i64) -> FieldElement {
        FieldElement::integer(self.n, k)
    }

    pub fn rational(&self, q: &BigRational) -> FieldElement {
        FieldElement::rational(self.n, q)
    }

    pub fn element(&self, coords: &[i64]) -> Result<FieldElement> {
        if coords.len() != self.n {
            return Err(Error::Domain(format!("expected {} coordinates", self.n)));
        }
        Ok(FieldElement::from_ints(coords))
    }

    pub fn mul(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let n = self.n;
        let mut out = vec![BigInt::zero(); n];
        for i in 0..n {
            if a.num[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if b.num[j].is_zero() {
                    continue;
                }
                let terms = &self.pair_terms[i * n + j];
                if terms.is_empty() {
                    continue;
                }
                let p = &a.num[i] * &b.num[j];
                for &(k, t) in terms {
                    if t == 1 {
                        out[k] += &p;
                    } else {
                        out[k] += &p * t;
                    }
                }
            }
        }
        FieldElement::new(out, &a.den * &b.den)
    }

    pub fn add(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        a.add(b)
    }

    pub fn sub(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        a.sub(b)
    }

    /// Integer matrix of multiplication by the numerator vector of `a`;
    /// column j holds the coordinates of `num(a) * b_j`.
    pub fn mult_matrix_int(&self, a: &FieldElement) -> Vec<Vec<BigInt>> {
        let n = self.n;
        let mut m = vec![vec![BigInt::zero(); n]; n];
        for i in 0..n {
            if a.num[i].is_zero() {
                continue;
            }
            for j in 0..n {
                for &(k, t) in &self.pair_terms[i * n + j] {
                    m[k][j] += &a.num[i] * t;
                }
            }
        }
        m
    }

    pub fn mult_matrix(&self, a: &FieldElement) -> Vec<Vec<BigRational>> {
        self.mult_matrix_int(a)
            .into_iter()
            .map(|r| r.into_iter().map(|x| BigRational::new(x, a.den.clone())).collect())
            .collect()
    }

    pub fn norm(&self, a: &FieldElement) -> BigRational {
        let d = linalg::det_int(&self.mult_matrix_int(a));
        BigRational::new(d, num_traits::pow(a.den.clone(), self.n))
    }

    pub fn trace(&self, a: &FieldElement) -> BigRational {
        let mut s = BigInt::zero();
        for (x, t) in a.num.iter().zip(&self.traces) {
            s += x * t;
        }
        BigRational::new(s, a.den.clone())
    }

    pub fn inv(&self, a: &FieldElement) -> Result<FieldElement> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if let Some(q) = a.as_rational() {
            return Ok(self.rational(&q.recip()));
        }
        let m: Vec<Vec<BigRational>> = self
            .mult_matrix_int(a)
            .into_iter()
            .map(|r| r.into_iter().map(BigRational::from_integer).collect())
            .collect();
        let mut e = vec![BigRational::zero(); self.n];
        e[0] = BigRational::from_integer(a.den.clone());
        let x = linalg::solve_rational(&m, &e).ok_or(Error::DivisionByZero)?;
        Ok(FieldElement::from_rationals(&x))
    }

    pub fn div(&self, a: &FieldElement, b: &FieldElement) -> Result<FieldElement> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    pub fn pow(&self, a: &FieldElement, e: i64) -> Result<FieldElement> {
        let mut base = if e < 0 { self.inv(a)? } else { a.clone() };
        let mut k = e.unsigned_abs();
        let mut r = self.one();
        while k > 0 {
            if k & 1 == 1 {
                r = self.mul(&r, &base);
            }
            k >>= 1;
            if k > 0 {
                base = self.mul(&base, &base);
            }
        }
        Ok(r)
    }

    /// Integral with norm +-1.
    pub fn is_unit(&self, a: &FieldElement) -> bool {
        a.is_integral() && !a.is_zero() && self.norm(a).abs().is_one()
    }

    /// Discriminant of the basis, det(Tr(b_i b_j)).
    pub fn discriminant(&self) -> BigInt {
        let n = self.n;
        let m: Vec<Vec<BigInt>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        self.table[i][j]
                            .iter()
                            .zip(&self.traces)
                            .map(|(&c, t)| t * c)
                            .sum()
                    })
                    .collect()
            })
            .collect();
        linalg::det_int(&m)
    }

    /// Characteristic polynomial of `a` over Q, lowest degree first.
    pub fn charpoly(&self, a: &FieldElement) -> Vec<BigRational> {
        linalg::charpoly(&self.mult_matrix(a))
    }

    fn apply_images(&self, img: &[FieldElement], a: &FieldElement) -> FieldElement {
        let mut acc = self.zero();
        for (j, x) in a.num.iter().enumerate() {
            if !x.is_zero() {
                acc = acc.add(&img[j].scale(&BigRational::new(x.clone(), a.den.clone())));
            }
        }
        acc
    }

    /// Known non-identity automorphisms (empty when unknown).
    pub fn automorphism_count(&self) -> usize {
        self.automorphisms.len()
    }

    pub fn apply_automorphism(&self, idx: usize, a: &FieldElement) -> FieldElement {
        self.apply_images(&self.automorphisms[idx], a)
    }

    pub fn class_number(&self) -> Result<u64> {
        self.class_number_with_cap(DEFAULT_CLASS_NUMBER_CAP)
    }

    pub fn class_number_with_cap(&self, cap: u64) -> Result<u64> {
        if let Some(h) = self.class_number_cache.get() {
            return Ok(*h);
        }
        let h = match &self.kind {
            FieldKind::Rational => 1,
            FieldKind::Quadratic { d } => {
                let disc = quadratic::field_discriminant(*d);
                if disc.unsigned_abs() > cap {
                    return Err(Error::ResourceLimit(format!(
                        "|discriminant| {} exceeds class number cap {cap}",
                        disc.abs()
                    )));
                }
                let neg_unit = self
                    .units
                    .first()
                    .map(|e| self.norm(e).is_negative())
                    .unwrap_or(false);
                quadratic::class_number(disc, neg_unit)
            }
            FieldKind::Table => self.class_number_fixture.ok_or_else(|| {
                Error::MissingFixture(format!("class number of {}", self.label))
            })?,
        };
        let _ = self.class_number_cache.set(h);
        Ok(h)
    }

    /// Prime ideals above the rational prime `p`.
    pub fn primes_above(self: &Arc<Self>, p: u64) -> Result<Vec<PrimeIdeal>> {
        prime::primes_above(self, p)
    }

    pub fn is_rational_field(&self) -> bool {
        self.kind == FieldKind::Rational
    }

    /// A rational element 1 - x and similar shortcuts used by the solver.
    pub fn one_minus(&self, a: &FieldElement) -> FieldElement {
        self.one().sub(a)
    }
}

/// The rational field Q.
pub fn rational_field() -> Arc<NumberField> {
    NumberField::from_parts(FieldParts {
        label: "Q".into(),
        kind: FieldKind::Rational,
        table: vec![vec![vec![1]]],
        signature: (1, 0),
        basis_names: vec!["1".into()],
        units: vec![],
        torsion: None,
        class_number: Some(1),
        prime_fixtures: vec![],
        automorphisms: vec![],
    })
    .expect("Q is a valid field")
}

pub fn bigint_to_f64(x: &BigInt) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap_or(f64::INFINITY)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt_minus5_arithmetic() {
        let k = quadratic::quadratic_field(-5).unwrap();
        let w = k.element(&[0, 1]).unwrap();
        assert_eq!(k.mul(&w, &w), k.integer(-5));
        let a = k.element(&[1, 1]).unwrap();
        assert_eq!(k.norm(&a), BigRational::from_integer(6.into()));
        let ai = k.inv(&a).unwrap();
        assert_eq!(k.mul(&a, &ai), k.one());
        assert_eq!(ai.to_strings(), vec!["1/6", "-1/6"]);
    }

    #[test]
    fn golden_ratio_square() {
        let k = quadratic::quadratic_field(5).unwrap();
        let w = k.element(&[0, 1]).unwrap();
        assert_eq!(k.mul(&w, &w), k.element(&[1, 1]).unwrap());
        assert_eq!(k.class_number().unwrap(), 1);
    }

    #[test]
    fn rejects_zero_inverse() {
        let k = quadratic::quadratic_field(2).unwrap();
        assert!(matches!(k.inv(&k.zero()), Err(Error::DivisionByZero)));
    }
}
