//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use sunit_fermat::field::{FieldElement, NumberField};
use sunit_fermat::serre_mazur::NewformRecord;

pub fn q(a: i64, b: i64) -> BigRational {
    BigRational::new(a.into(), b.into())
}

/// 3 * 7^(3 r1 + 4 r2 + 2 s)
pub fn evertse(r1: usize, r2: usize, s: usize) -> BigInt {
    BigInt::from(3) * num_traits::pow(BigInt::from(7), 3 * r1 + 4 * r2 + 2 * s)
}

fn exponents_of(mut n: BigInt, primes: &[u64]) -> Option<Vec<i64>> {
    let mut e = vec![0i64; primes.len()];
    for (i, &p) in primes.iter().enumerate() {
        let pb = BigInt::from(p);
        while (&n % &pb).is_zero() {
            n /= &pb;
            e[i] += 1;
        }
    }
    n.is_one().then_some(e)
}

/// Exponents of a rational S-unit, or None.
pub fn rational_sunit_exponents(x: &BigRational, primes: &[u64]) -> Option<Vec<i64>> {
    if x.is_zero() {
        return None;
    }
    let a = exponents_of(x.numer().abs(), primes)?;
    let b = exponents_of(x.denom().abs(), primes)?;
    Some(a.iter().zip(&b).map(|(u, v)| u - v).collect())
}

/// All lambda in Q with lambda and 1 - lambda S-units whose exponents are
/// bounded by `bound`, by direct enumeration of +-prod p^e.
pub fn rational_sunit_oracle(primes: &[u64], bound: i64) -> BTreeSet<BigRational> {
    let mut out = BTreeSet::new();
    let mut e = vec![-bound; primes.len()];
    loop {
        let mut x = BigRational::one();
        for (&p, &k) in primes.iter().zip(&e) {
            let pk = num_traits::pow(BigInt::from(p), k.unsigned_abs() as usize);
            x = if k >= 0 { x * BigRational::from_integer(pk) } else { x / BigRational::from_integer(pk) };
        }
        for lam in [x.clone(), -x] {
            let mu = BigRational::one() - &lam;
            if let Some(f) = rational_sunit_exponents(&mu, primes) {
                if f.iter().all(|v| v.abs() <= bound) {
                    out.insert(lam);
                }
            }
        }
        let mut i = 0;
        loop {
            if i == e.len() {
                return out;
            }
            e[i] += 1;
            if e[i] <= bound {
                break;
            }
            e[i] = -bound;
            i += 1;
        }
    }
}

/// Determinant over Q by Gaussian elimination.
pub fn det_q(mut m: Vec<Vec<BigRational>>) -> BigRational {
    let n = m.len();
    let mut det = BigRational::one();
    for c in 0..n {
        let Some(r) = (c..n).find(|&r| !m[r][c].is_zero()) else { return BigRational::zero() };
        if r != c {
            m.swap(r, c);
            det = -det;
        }
        let piv = m[c][c].clone();
        det *= &piv;
        for r in c + 1..n {
            let f = &m[r][c] / &piv;
            if f.is_zero() {
                continue;
            }
            for k in c..n {
                let t = &f * &m[c][k];
                m[r][k] -= t;
            }
        }
    }
    det
}

/// Matrix of multiplication by c_ell on the power basis of the form's
/// eigenvalue field, built by reducing y^(i+j) with the minimal polynomial.
pub fn eigen_matrix(form: &NewformRecord, ell: u64) -> Vec<Vec<BigRational>> {
    let n = form.degree();
    let mp: Vec<BigRational> = form.min_poly.iter().cloned().map(BigRational::from_integer).collect();
    // powers y^k for k < 2n as vectors in the power basis
    let mut pow: Vec<Vec<BigRational>> = Vec::new();
    for k in 0..2 * n {
        let mut v = vec![BigRational::zero(); n];
        if k < n {
            v[k] = BigRational::one();
        } else {
            // y^k = y * y^(k-1)
            let prev = &pow[k - 1];
            let top = prev[n - 1].clone();
            for i in (1..n).rev() {
                v[i] = prev[i - 1].clone() - &top * &mp[i];
            }
            v[0] = -&top * &mp[0];
        }
        pow.push(v);
    }
    let c = &form.coefficients[&ell];
    let mut m = vec![vec![BigRational::zero(); n]; n];
    for j in 0..n {
        for (i, ci) in c.iter().enumerate() {
            for (r, x) in pow[i + j].iter().enumerate() {
                m[r][j] += ci * x;
            }
        }
    }
    m
}

/// Norm of (a - c_ell) as det(a I - M).
pub fn norm_a_minus_c(form: &NewformRecord, ell: u64, a: &BigRational) -> BigRational {
    let mut m = eigen_matrix(form, ell);
    for (i, row) in m.iter_mut().enumerate() {
        for (j, x) in row.iter_mut().enumerate() {
            *x = if i == j { a - &*x } else { -&*x };
        }
    }
    det_q(m)
}

/// B_ell as a product of factor norms.
pub fn beta_oracle(form: &NewformRecord, ell: u64) -> BigInt {
    let n = form.degree();
    let l = ell as i64;
    let mut acc = BigRational::from_integer(num_traits::pow(BigInt::from(l), n));
    // ell + 1 + c = -((-ell - 1) - c)
    acc *= norm_a_minus_c(form, ell, &q(l + 1, 1));
    acc *= norm_a_minus_c(form, ell, &q(-l - 1, 1));
    let mut a = 0i64;
    while (a + 1) * (a + 1) <= 4 * l {
        a += 1;
    }
    for t in -a..=a {
        acc *= norm_a_minus_c(form, ell, &q(t, 1));
    }
    assert!(acc.is_integer());
    acc.to_integer().abs()
}

/// Embedding of the degree 4 real cyclotomic fixture into the degree 8
/// fixture, a -> z - z^7.
pub fn embed_plus(big: &NumberField, x: &FieldElement) -> FieldElement {
    let a = FieldElement::from_ints(&[0, 1, 0, 0, 0, 0, 0, -1]);
    let mut acc = big.zero();
    let mut pw = big.one();
    for c in x.coords() {
        acc = big.add(&acc, &pw.scale(&c));
        pw = big.mul(&pw, &a);
    }
    acc
}

/// The six images of lambda under the S3 action, computed by hand.
pub fn s3_by_hand(l: &BigRational) -> Vec<BigRational> {
    let one = BigRational::one();
    let mut v = vec![l.clone(), &one - l];
    if !l.is_zero() {
        v.push(&one / l);
        v.push((l - &one) / l);
    }
    if l != &one {
        v.push(&one / (&one - l));
        v.push(l / (l - &one));
    }
    v
}
