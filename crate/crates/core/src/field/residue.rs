//! Ring homomorphisms O_K -> F_q for primes q with a residue-degree-one
//! prime above them. Used as cheap exact fingerprints of field elements.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use super::{FieldElement, NumberField};
use crate::arith::{invmod, is_prime, mulmod};

#[derive(Clone, Debug)]
pub struct ResidueMap {
    pub q: u64,
    /// Images of the basis elements.
    pub images: Vec<u64>,
}

impl ResidueMap {
    fn reduce_int(&self, x: &BigInt) -> u64 {
        let r = x % BigInt::from(self.q);
        let r = r.to_i64().unwrap();
        r.rem_euclid(self.q as i64) as u64
    }

    /// Image of `a`; `None` when q divides the denominator.
    pub fn apply(&self, a: &FieldElement) -> Option<u64> {
        let den = self.reduce_int(&a.den);
        let dinv = invmod(den, self.q)?;
        let mut s = 0u64;
        for (x, &t) in a.num.iter().zip(&self.images) {
            if x.is_zero() || t == 0 {
                continue;
            }
            s = (s + mulmod(self.reduce_int(x), t, self.q)) % self.q;
        }
        Some(mulmod(s, dinv, self.q))
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        mulmod(a, b, self.q)
    }

    pub fn inv(&self, a: u64) -> Option<u64> {
        invmod(a, self.q)
    }
}

fn is_hom(field: &NumberField, q: u64, t: &[u64]) -> bool {
    let n = field.degree();
    if t[0] != 1 {
        return false;
    }
    let tab = field.table();
    for i in 0..n {
        for j in i..n {
            let lhs = mulmod(t[i], t[j], q);
            let mut rhs = 0u64;
            for k in 0..n {
                let c = tab[i][j][k].rem_euclid(q as i64) as u64;
                rhs = (rhs + mulmod(c, t[k], q)) % q;
            }
            if lhs != rhs {
                return false;
            }
        }
    }
    true
}

/// Candidate images of the basis under homomorphisms to F_q. Every
/// homomorphism phi is a common left eigenvector of the multiplication
/// matrices; we take kernels of M_theta^T - r I for a fixed theta.
fn homs_mod_q(field: &NumberField, q: u64, charpoly_mod: &[u64], mtheta: &[Vec<u64>]) -> Vec<Vec<u64>> {
    let n = field.degree();
    if n == 1 {
        return vec![vec![1]];
    }
    let mut out = Vec::new();
    for r in 0..q {
        // Horner
        let mut v = 0u64;
        for c in charpoly_mod.iter().rev() {
            v = (mulmod(v, r, q) + c) % q;
        }
        if v != 0 {
            continue;
        }
        // Solve phi (M - r I) = 0 with phi_0 = 1: rows of A = (M - rI)^T
        let mut a: Vec<Vec<u64>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let x = mtheta[j][i];
                        if i == j {
                            (x + q - r) % q
                        } else {
                            x
                        }
                    })
                    .collect()
            })
            .collect();
        if let Some(phi) = kernel_vector(&mut a, q) {
            if is_hom(field, q, &phi) {
                out.push(phi);
            }
        }
    }
    out
}

/// One-dimensional kernel of A (rows act on the column vector phi), normalized
/// so that phi_0 = 1. Returns `None` unless the kernel is one-dimensional.
fn kernel_vector(a: &mut [Vec<u64>], q: u64) -> Option<Vec<u64>> {
    let n = a.len();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..n {
        let Some(p) = (row..n).find(|&r| a[r][col] != 0) else { continue };
        a.swap(row, p);
        let inv = invmod(a[row][col], q)?;
        for j in 0..n {
            a[row][j] = mulmod(a[row][j], inv, q);
        }
        for r in 0..n {
            if r != row && a[r][col] != 0 {
                let f = a[r][col];
                for j in 0..n {
                    a[r][j] = (a[r][j] + q - mulmod(f, a[row][j], q)) % q;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    if pivots.len() != n - 1 {
        return None;
    }
    let free = (0..n).find(|c| !pivots.contains(c))?;
    let mut phi = vec![0u64; n];
    phi[free] = 1;
    for (r, &c) in pivots.iter().enumerate() {
        phi[c] = (q - a[r][free]) % q;
    }
    let inv0 = invmod(phi[0], q)?;
    Some(phi.iter().map(|&x| mulmod(x, inv0, q)).collect())
}

/// `count` residue maps to distinct primes q < 2^16, avoiding `avoid`,
/// scanning downward from 65521.
pub fn pick_residue_maps(field: &NumberField, avoid: &[u64], count: usize) -> Vec<ResidueMap> {
    let n = field.degree();
    let theta = {
        let mut c = vec![0i64; n];
        for (i, x) in c.iter_mut().enumerate().skip(1) {
            *x = [1, 3, 7, 13, 29, 41, 53, 71][(i - 1) % 8] * (1 + (i as i64 - 1) / 8);
        }
        FieldElement::from_ints(&c)
    };
    let cp = field.charpoly(&theta);
    let mt = field.mult_matrix_int(&theta);
    let disc = field.discriminant();
    let mut out = Vec::new();
    let mut q = 65521u64;
    while out.len() < count && q > 3 {
        if is_prime(q) && !avoid.contains(&q) && !(&disc % BigInt::from(q)).is_zero() {
            let cpm: Vec<u64> = cp
                .iter()
                .map(|c| {
                    let num = c.numer() % BigInt::from(q);
                    let num = num.to_i64().unwrap().rem_euclid(q as i64) as u64;
                    let den = (c.denom() % BigInt::from(q)).to_u64().unwrap();
                    mulmod(num, invmod(den, q).unwrap_or(0), q)
                })
                .collect();
            let mtm: Vec<Vec<u64>> = mt
                .iter()
                .map(|r| r.iter().map(|x| (x % BigInt::from(q)).to_i64().unwrap().rem_euclid(q as i64) as u64).collect())
                .collect();
            if let Some(images) = homs_mod_q(field, q, &cpm, &mtm).into_iter().next() {
                out.push(ResidueMap { q, images });
            }
        }
        q -= 2;
    }
    out
}
