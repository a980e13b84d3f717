//! Exhaustive search over an exponent box.
//!
//! For every candidate lambda in the box we only look at mu whose S-part is
//! compatible with the ultrametric inequality at each prime of S, and find
//! the unit part of mu by a hash lookup of residue signatures. Every hit is
//! verified with exact arithmetic.

use std::time::Instant;

use num_bigint::BigInt;
use rayon::prelude::*;
use rustc_hash::FxHashMap;
use serde::Serialize;

use crate::arith::{mulmod, powmod};
use crate::error::{Error, Result};
use crate::field::residue::{pick_residue_maps, ResidueMap};
use crate::field::FieldElement;
use crate::sunit::{evertse_bound, ExponentVector, SUnitGroup};

const MAPS: usize = 4;

#[derive(Clone, Debug)]
pub struct SolveOptions {
    /// Re-run at ceil(1.5 * bound) to decide the completeness flag.
    pub check_completeness: bool,
    /// Cap on (2B+1)^rank * w for the searched box.
    pub cap: u64,
    pub threads: Option<usize>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { check_completeness: true, cap: 2_000_000_000, threads: None }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Solution {
    pub lambda: FieldElement,
    pub mu: FieldElement,
    pub lambda_exps: ExponentVector,
    pub mu_exps: ExponentVector,
}

impl Solution {
    pub fn max_exponent(&self) -> i64 {
        self.lambda_exps.max_abs().max(self.mu_exps.max_abs())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SolutionSet {
    pub solutions: Vec<Solution>,
    pub bound: i64,
    /// Bound of the confirming run, when one was made.
    pub check_bound: Option<i64>,
    /// Heuristic: the confirming run found nothing outside the bound.
    pub complete: bool,
    pub evertse_bound: String,
    pub elapsed_ms: u128,
    pub lookups: u64,
}

impl SolutionSet {
    pub fn len(&self) -> usize {
        self.solutions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.solutions.is_empty()
    }
}

/// True iff lambda and 1 - lambda are both S-units.
pub fn verify_solution(group: &SUnitGroup, lambda: &FieldElement) -> Result<bool> {
    let f = group.field();
    if lambda.is_zero() || *lambda == f.one() {
        return Err(Error::Domain("lambda must differ from 0 and 1".into()));
    }
    Ok(group.is_sunit(lambda)? && group.is_sunit(&f.one_minus(lambda))?)
}

pub fn solve(group: &SUnitGroup, bound: i64) -> Result<SolutionSet> {
    solve_with(group, bound, &SolveOptions::default())
}

pub fn solve_with(group: &SUnitGroup, bound: i64, opts: &SolveOptions) -> Result<SolutionSet> {
    if bound < 1 {
        return Err(Error::Domain("bound must be at least 1".into()));
    }
    let start = Instant::now();
    let field = group.field();
    let ev = evertse_bound(field, group.primes().len());
    if field.is_rational_field() && group.primes().is_empty() {
        return Ok(SolutionSet {
            solutions: vec![],
            bound,
            check_bound: None,
            complete: true,
            evertse_bound: ev.to_string(),
            elapsed_ms: 0,
            lookups: 0,
        });
    }
    let check = if opts.check_completeness { Some((3 * bound + 1) / 2) } else { None };
    let run_bound = check.unwrap_or(bound);
    let run = || search_box(group, run_bound, opts.cap);
    let (all, lookups) = match opts.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Domain(e.to_string()))?
            .install(run)?,
        None => run()?,
    };
    let total = all.len();
    let solutions: Vec<Solution> = all.into_iter().filter(|s| s.max_exponent() <= bound).collect();
    let complete = check.is_some() && solutions.len() == total;
    if BigInt::from(solutions.len()) > ev {
        return Err(Error::Domain(format!("{} solutions exceed the Evertse bound {ev}", solutions.len())));
    }
    Ok(SolutionSet {
        solutions,
        bound,
        check_bound: check,
        complete,
        evertse_bound: ev.to_string(),
        elapsed_ms: start.elapsed().as_millis(),
        lookups,
    })
}

struct Residues {
    maps: Vec<ResidueMap>,
}

impl Residues {
    fn pack(v: &[u64; MAPS]) -> u64 {
        v[0] | v[1] << 16 | v[2] << 32 | v[3] << 48
    }

    fn unpack(k: u64) -> [u64; MAPS] {
        [k & 0xffff, (k >> 16) & 0xffff, (k >> 32) & 0xffff, k >> 48]
    }

    fn q(&self, m: usize) -> u64 {
        self.maps[m].q
    }
}

/// Mixed-radix decoding of an index into exponents in [-b, b].
fn decode(mut idx: usize, k: usize, b: i64) -> Vec<i64> {
    let width = (2 * b + 1) as usize;
    let mut out = Vec::with_capacity(k);
    for _ in 0..k {
        out.push((idx % width) as i64 - b);
        idx /= width;
    }
    out
}

fn encode(e: &[i64], b: i64) -> usize {
    let width = (2 * b + 1) as usize;
    let mut idx = 0usize;
    for &x in e.iter().rev() {
        idx = idx * width + (x + b) as usize;
    }
    idx
}

/// All solutions with lambda and mu exponents in [-b, b]; returns them in
/// lexicographic order of (lambda exponents, mu exponents).
fn search_box(group: &SUnitGroup, b: i64, cap: u64) -> Result<(Vec<Solution>, u64)> {
    let field = group.field();
    let nu = group.unit_rank();
    let s = group.primes().len();
    let (_, w) = group.torsion();
    let width = (2 * b + 1) as u64;
    let cells = (width as f64).powi((nu + s) as i32) * w as f64;
    if cells > cap as f64 {
        return Err(Error::ResourceLimit(format!(
            "search box (2*{b}+1)^{} * {w} = {cells:e} exceeds cap {cap}",
            nu + s
        )));
    }
    let maps = pick_residue_maps(field, group.rational_primes(), MAPS);
    if maps.len() < MAPS {
        return Err(Error::Unsupported("not enough residue primes for signatures".into()));
    }
    let res = Residues { maps };
    // Residues of generator powers g_i^k, k in [-b, b]: pow[m][i][k + b].
    let rank = nu + s;
    let mut gen_pow = vec![vec![vec![0u64; width as usize]; rank]; MAPS];
    let mut tors_pow = vec![vec![0u64; w as usize]; MAPS];
    for m in 0..MAPS {
        let map = &res.maps[m];
        let q = map.q;
        let z = map.apply(group.torsion().0).expect("torsion is integral");
        for t in 0..w as usize {
            tors_pow[m][t] = powmod(z, t as u64, q);
        }
        for i in 0..rank {
            let g = map.apply(group.free_generator(i)).expect("q avoids S");
            let gi = map.apply(group.free_generator_inv(i)).expect("q avoids S");
            for k in -b..=b {
                let base = if k >= 0 { g } else { gi };
                gen_pow[m][i][(k + b) as usize] = powmod(base, k.unsigned_abs(), q);
            }
        }
    }
    // Unit table over (t, e_U).
    let unit_count = w as usize * (width as usize).pow(nu as u32);
    let unit_keys: Vec<u64> = (0..unit_count)
        .into_par_iter()
        .map(|idx| {
            let t = idx % w as usize;
            let e = decode(idx / w as usize, nu, b);
            let mut r = [0u64; MAPS];
            for m in 0..MAPS {
                let q = res.q(m);
                let mut x = tors_pow[m][t];
                for (i, &ei) in e.iter().enumerate() {
                    x = mulmod(x, gen_pow[m][i][(ei + b) as usize], q);
                }
                r[m] = x;
            }
            Residues::pack(&r)
        })
        .collect();
    let mut table: FxHashMap<u64, u32> = FxHashMap::default();
    table.reserve(unit_count);
    let mut overflow: FxHashMap<u64, Vec<u32>> = FxHashMap::default();
    for (idx, &k) in unit_keys.iter().enumerate() {
        if let Some(&prev) = table.get(&k) {
            overflow.entry(k).or_insert_with(|| vec![prev]).push(idx as u32);
        } else {
            table.insert(k, idx as u32);
        }
    }
    // S-part residues for every e_S in the box.
    let s_count = (width as usize).pow(s as u32);
    let s_keys: Vec<[u64; MAPS]> = (0..s_count)
        .map(|idx| {
            let e = decode(idx, s, b);
            let mut r = [0u64; MAPS];
            for m in 0..MAPS {
                let mut x = 1u64;
                for (j, &ej) in e.iter().enumerate() {
                    x = mulmod(x, gen_pow[m][nu + j][(ej + b) as usize], res.q(m));
                }
                r[m] = x;
            }
            r
        })
        .collect();
    // For every lambda S-part, the mu S-parts allowed by the ultrametric rule.
    let vmat = group.valuation_matrix();
    let identity = (0..s).all(|i| (0..s).all(|j| vmat[i][j] == (i == j) as i64));
    let col_span: Vec<i64> = (0..s).map(|i| (0..s).map(|j| vmat[j][i].abs()).sum::<i64>() * b).collect();
    let compat: Vec<Vec<u32>> = (0..s_count)
        .into_par_iter()
        .map(|idx| {
            let e = decode(idx, s, b);
            let v: Vec<i64> = (0..s).map(|i| (0..s).map(|j| e[j] * vmat[j][i]).sum()).collect();
            let options: Vec<Vec<i64>> = (0..s)
                .map(|i| {
                    if v[i] < 0 {
                        vec![v[i]]
                    } else if v[i] > 0 {
                        vec![0]
                    } else {
                        (0..=col_span[i]).collect()
                    }
                })
                .collect();
            let mut out = Vec::new();
            let mut cur = vec![0usize; s];
            loop {
                let vm: Vec<i64> = (0..s).map(|i| options[i][cur[i]]).collect();
                let em = if identity { Some(vm.clone()) } else { group.s_exponents_for(&vm) };
                if let Some(em) = em {
                    if em.iter().all(|x| x.abs() <= b) {
                        // store the index of -e'_S: we need gamma^{-e'_S}
                        let neg: Vec<i64> = em.iter().map(|x| -x).collect();
                        out.push(encode(&neg, b) as u32);
                    }
                }
                let mut k = 0;
                while k < s {
                    cur[k] += 1;
                    if cur[k] < options[k].len() {
                        break;
                    }
                    cur[k] = 0;
                    k += 1;
                }
                if k == s {
                    break;
                }
            }
            out
        })
        .collect();
    let lookups = std::sync::atomic::AtomicU64::new(0);
    let hits: Vec<(usize, usize, u32, u32)> = (0..unit_count)
        .into_par_iter()
        .flat_map_iter(|ui| {
            let lam_u = Residues::unpack(unit_keys[ui]);
            let mut found = Vec::new();
            let mut n = 0u64;
            for si in 0..s_count {
                let sk = &s_keys[si];
                let mut one_minus = [0u64; MAPS];
                let mut zero = false;
                for m in 0..MAPS {
                    let q = res.q(m);
                    let lam = mulmod(lam_u[m], sk[m], q);
                    one_minus[m] = (1 + q - lam) % q;
                    zero |= one_minus[m] == 0;
                }
                if zero {
                    continue;
                }
                for &neg_idx in &compat[si] {
                    n += 1;
                    let nk = &s_keys[neg_idx as usize];
                    let mut r = [0u64; MAPS];
                    for m in 0..MAPS {
                        r[m] = mulmod(one_minus[m], nk[m], res.q(m));
                    }
                    let key = Residues::pack(&r);
                    if let Some(list) = overflow.get(&key) {
                        for &mi in list {
                            found.push((ui, si, mi, neg_idx));
                        }
                    } else if let Some(&mi) = table.get(&key) {
                        found.push((ui, si, mi, neg_idx));
                    }
                }
            }
            lookups.fetch_add(n, std::sync::atomic::Ordering::Relaxed);
            found.into_iter()
        })
        .collect();
    let exps = |ui: usize, si: usize, sneg: bool| -> ExponentVector {
        let t = (ui % w as usize) as u32;
        let mut free = decode(ui / w as usize, nu, b);
        let mut es = decode(si, s, b);
        if sneg {
            es.iter_mut().for_each(|x| *x = -*x);
        }
        free.extend(es);
        ExponentVector::new(t, free)
    };
    let verified: Vec<Solution> = hits
        .par_iter()
        .map(|&(ui, si, mi, neg_idx)| -> Result<Option<Solution>> {
            let le = exps(ui, si, false);
            let me = exps(mi as usize, neg_idx as usize, true);
            let lambda = group.unfold(&le)?;
            let mu = group.unfold(&me)?;
            if lambda.add(&mu) == field.one() {
                Ok(Some(Solution { lambda, mu, lambda_exps: le, mu_exps: me }))
            } else {
                Ok(None)
            }
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    let mut sols = verified;
    sols.sort_by(|a, b| (&a.lambda_exps, &a.mu_exps).cmp(&(&b.lambda_exps, &b.mu_exps)));
    sols.dedup();
    Ok((sols, lookups.into_inner()))
}
