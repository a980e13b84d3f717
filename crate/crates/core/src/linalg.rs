//! Exact linear algebra over Z and Q for small dense matrices.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Determinant of a square integer matrix (fraction-free Bareiss elimination).
pub fn det_int(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a: Vec<Vec<BigInt>> = m.to_vec();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            let Some(r) = (k + 1..n).find(|&r| !a[r][k].is_zero()) else {
                return BigInt::zero();
            };
            a.swap(k, r);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

/// Solve `m x = b` over Q; `None` if `m` is singular.
pub fn solve_rational(m: &[Vec<BigRational>], b: &[BigRational]) -> Option<Vec<BigRational>> {
    let n = m.len();
    let mut a: Vec<Vec<BigRational>> = m
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        let inv = a[col][col].recip();
        for j in col..=n {
            a[col][j] = &a[col][j] * &inv;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for j in col..=n {
                    let v = &a[col][j] * &f;
                    a[r][j] -= v;
                }
            }
        }
    }
    Some(a.into_iter().map(|mut r| r.pop().unwrap()).collect())
}

/// Characteristic polynomial det(xI - m), coefficients lowest degree first.
pub fn charpoly(m: &[Vec<BigRational>]) -> Vec<BigRational> {
    // Faddeev-LeVerrier.
    let n = m.len();
    let mut coeffs = vec![BigRational::zero(); n + 1];
    coeffs[n] = BigRational::one();
    let mut mk: Vec<Vec<BigRational>> = vec![vec![BigRational::zero(); n]; n];
    for k in 1..=n {
        // mk = m * mk_prev + c_{n-k+1} I
        let mut next = vec![vec![BigRational::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut s = BigRational::zero();
                for t in 0..n {
                    if !mk[t][j].is_zero() {
                        s += &m[i][t] * &mk[t][j];
                    }
                }
                next[i][j] = s;
            }
            next[i][i] += &coeffs[n - k + 1];
        }
        mk = next;
        let mut tr = BigRational::zero();
        for i in 0..n {
            for t in 0..n {
                tr += &m[i][t] * &mk[t][i];
            }
        }
        coeffs[n - k] = -tr / BigRational::from_integer(BigInt::from(k));
    }
    coeffs
}

/// Row Hermite normal form of an integer matrix; zero rows are dropped.
/// Pivots are positive and entries above each pivot lie in `[0, pivot)`.
pub fn hnf_rows(rows: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let mut a: Vec<Vec<i128>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let ncols = a.first().map_or(0, |r| r.len());
    let mut out_rows = 0usize;
    for col in 0..ncols {
        // Euclid down the column among rows out_rows..
        loop {
            let nz: Vec<usize> = (out_rows..a.len()).filter(|&r| a[r][col] != 0).collect();
            if nz.is_empty() {
                break;
            }
            let piv = *nz.iter().min_by_key(|&&r| a[r][col].abs()).unwrap();
            a.swap(out_rows, piv);
            let mut done = true;
            for r in out_rows + 1..a.len() {
                if a[r][col] != 0 {
                    let q = a[r][col].div_euclid(a[out_rows][col]);
                    for j in 0..ncols {
                        a[r][j] -= q * a[out_rows][j];
                    }
                    if a[r][col] != 0 {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if out_rows < a.len() && a[out_rows][col] != 0 {
            if a[out_rows][col] < 0 {
                for j in 0..ncols {
                    a[out_rows][j] = -a[out_rows][j];
                }
            }
            let p = a[out_rows][col];
            for r in 0..out_rows {
                let q = a[r][col].div_euclid(p);
                for j in 0..ncols {
                    a[r][j] -= q * a[out_rows][j];
                }
            }
            out_rows += 1;
        }
    }
    a.truncate(out_rows);
    a.into_iter()
        .map(|r| r.into_iter().map(|x| x as i64).collect())
        .collect()
}

/// Inverse of a unimodular-or-not integer matrix over Q.
pub fn inverse_rational(m: &[Vec<BigRational>]) -> Option<Vec<Vec<BigRational>>> {
    let n = m.len();
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        let e: Vec<BigRational> = (0..n)
            .map(|i| if i == j { BigRational::one() } else { BigRational::zero() })
            .collect();
        cols.push(solve_rational(m, &e)?);
    }
    Some((0..n).map(|i| (0..n).map(|j| cols[j][i].clone()).collect()).collect())
}

pub fn is_unit_det(d: &BigInt) -> bool {
    d.abs().is_one()
}
