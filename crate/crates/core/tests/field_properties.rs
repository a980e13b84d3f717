mod common;

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use proptest::prelude::*;

use sunit_fermat::field::descriptor::{zeta16, zeta16_plus};
use sunit_fermat::field::quadratic::{field_discriminant, fundamental_unit, quadratic_field};
use sunit_fermat::field::{FieldElement, NumberField};
use sunit_fermat::sunit::{ExponentVector, SUnitGroup};

fn squarefree(n: i64) -> bool {
    let n = n.abs();
    let mut k = 2;
    while k * k <= n {
        if n % (k * k) == 0 {
            return false;
        }
        k += 1;
    }
    n > 0
}

fn radicands(lo: i64, hi: i64) -> Vec<i64> {
    (lo..=hi).filter(|&d| d != 0 && d != 1 && squarefree(d)).collect()
}

fn small_primes(n: u64) -> Vec<u64> {
    (2..n).filter(|&p| (2..p).take_while(|k| k * k <= p).all(|k| p % k != 0)).collect()
}

#[test]
fn local_degrees_sum_to_field_degree() {
    for d in radicands(-200, 200) {
        let k = quadratic_field(d).unwrap();
        for p in small_primes(100) {
            let ps = k.primes_above(p).unwrap();
            let s: u32 = ps.iter().map(|q| q.e * q.f).sum();
            assert_eq!(s, 2, "d = {d}, p = {p}");
        }
    }
    for k in [zeta16_plus(), zeta16()] {
        let mut factored = 0;
        for p in small_primes(100) {
            if let Ok(ps) = k.primes_above(p) {
                factored += 1;
                assert_eq!(ps.iter().map(|q| (q.e * q.f) as usize).sum::<usize>(), k.degree(), "{} p = {p}", k.label());
            }
        }
        assert!(factored >= 1);
    }
}

fn element(n: usize, coords: &[(i64, i64)]) -> FieldElement {
    FieldElement::from_rationals(&coords.iter().take(n).map(|&(a, b)| common::q(a, b)).collect::<Vec<_>>())
}

fn arb_coords() -> impl Strategy<Value = Vec<(i64, i64)>> {
    prop::collection::vec((-30i64..=30, 1i64..=6), 8)
}

fn arb_field() -> impl Strategy<Value = std::sync::Arc<NumberField>> {
    let ds = radicands(-60, 60);
    prop_oneof![
        4 => prop::sample::select(ds).prop_map(|d| quadratic_field(d).unwrap()),
        1 => Just(zeta16_plus()),
        1 => Just(zeta16()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn norm_multiplicative_trace_additive(k in arb_field(), x in arb_coords(), y in arb_coords()) {
        let n = k.degree();
        let (a, b) = (element(n, &x), element(n, &y));
        prop_assert_eq!(k.norm(&k.mul(&a, &b)), k.norm(&a) * k.norm(&b));
        prop_assert_eq!(k.trace(&k.add(&a, &b)), k.trace(&a) + k.trace(&b));
        let r = common::q(x[0].0, x[0].1);
        prop_assert_eq!(k.norm(&k.rational(&r)), num_traits::pow(r.clone(), n));
        prop_assert_eq!(k.trace(&k.rational(&r)), r * BigRational::from_integer(BigInt::from(n)));
    }

    #[test]
    fn multiplication_and_inverse(k in arb_field(), x in arb_coords(), y in arb_coords(), z in arb_coords()) {
        let n = k.degree();
        let (a, b, c) = (element(n, &x), element(n, &y), element(n, &z));
        prop_assert_eq!(k.mul(&k.mul(&a, &b), &c), k.mul(&a, &k.mul(&b, &c)));
        prop_assert_eq!(k.mul(&a, &k.add(&b, &c)), k.add(&k.mul(&a, &b), &k.mul(&a, &c)));
        if !a.is_zero() {
            prop_assert_eq!(k.mul(&a, &k.inv(&a).unwrap()), k.one());
        }
    }

    #[test]
    fn valuation_axioms(k in arb_field(), p in prop::sample::select(vec![2u64, 3, 5]), x in arb_coords(), y in arb_coords()) {
        let Ok(ps) = k.primes_above(p) else { return Ok(()) };
        let n = k.degree();
        let (a, b) = (element(n, &x), element(n, &y));
        prop_assume!(!a.is_zero() && !b.is_zero());
        for q in &ps {
            let (va, vb) = (q.ord(&k, &a).unwrap(), q.ord(&k, &b).unwrap());
            prop_assert_eq!(q.ord(&k, &k.mul(&a, &b)).unwrap(), va + vb);
            prop_assert_eq!(q.ord(&k, &q.uniformizer).unwrap(), 1);
            prop_assert_eq!(q.ord(&k, &k.integer(p as i64)).unwrap(), q.e as i64);
            let s = k.add(&a, &b);
            if !s.is_zero() {
                let vs = q.ord(&k, &s).unwrap();
                prop_assert!(vs >= va.min(vb));
                if va != vb {
                    prop_assert_eq!(vs, va.min(vb));
                }
            }
        }
    }
}

#[test]
fn fundamental_units_have_unit_norm() {
    for d in radicands(2, 1000) {
        let u = fundamental_unit(d);
        let k = quadratic_field(d).unwrap();
        assert!(u.is_integral(), "d = {d}");
        assert!(k.norm(&u).abs().is_one(), "d = {d}");
        assert!(u.coord(1) > BigRational::zero(), "d = {d}");
        assert_ne!(u, k.one());
    }
}

#[test]
fn fundamental_unit_is_minimal() {
    // Every unit x + y*w with 0 < y < y(eps) would contradict minimality.
    for d in radicands(2, 60) {
        let u = fundamental_unit(d);
        let ymax = u.coord(1).to_integer().to_i64().unwrap();
        let (t, nw) = if d % 4 == 1 { (1, (1 - d) / 4) } else { (0, -d) };
        for y in 1..ymax.min(5000) {
            for s in [1i64, -1] {
                // x^2 + t x y + nw y^2 = s
                let disc = t * t * y * y - 4 * (nw * y * y - s);
                if disc < 0 {
                    continue;
                }
                let r = (disc as f64).sqrt().round() as i64;
                assert!(r * r != disc || (r - t * y) % 2 != 0, "d = {d}: unit with y = {y} below fundamental unit");
            }
        }
    }
}

/// Ideals of O_K for K = Q(sqrt d), stored in Hermite form over the basis {1, w}:
/// the lattice spanned by (a, 0) and (b, c).
#[derive(Clone, Copy, Debug)]
struct Ideal {
    a: i128,
    b: i128,
    c: i128,
}

struct Quad {
    t: i128,
    nw: i128,
    d: i64,
    eps: f64,
}

impl Quad {
    fn new(d: i64) -> Quad {
        let (t, nw) = if d.rem_euclid(4) == 1 { (1, (1 - d as i128) / 4) } else { (0, -(d as i128)) };
        let eps = if d > 0 {
            let u = fundamental_unit(d);
            let w = if t == 1 { (1.0 + (d as f64).sqrt()) / 2.0 } else { (d as f64).sqrt() };
            let (x, y) = (u.coord(0).to_integer().to_f64().unwrap(), u.coord(1).to_integer().to_f64().unwrap());
            (x + y * w).abs()
        } else {
            1.0
        };
        Quad { t, nw, d, eps }
    }

    fn mul(&self, x: (i128, i128), y: (i128, i128)) -> (i128, i128) {
        (x.0 * y.0 - self.nw * x.1 * y.1, x.0 * y.1 + x.1 * y.0 + self.t * x.1 * y.1)
    }

    fn conj(&self, x: (i128, i128)) -> (i128, i128) {
        (x.0 + self.t * x.1, -x.1)
    }

    fn hnf(mut v: Vec<(i128, i128)>) -> Ideal {
        // column 1 gcd
        let mut row: Option<(i128, i128)> = None;
        let mut rest = vec![];
        for x in v.drain(..) {
            match row {
                None if x.1 != 0 => row = Some(x),
                None => rest.push(x),
                Some(mut r) => {
                    let mut y = x;
                    while y.1 != 0 {
                        let q = r.1.div_euclid(y.1);
                        let z = (r.0 - q * y.0, r.1 - q * y.1);
                        r = y;
                        y = z;
                    }
                    row = Some(r);
                    rest.push(y);
                }
            }
        }
        let mut r = row.unwrap();
        if r.1 < 0 {
            r = (-r.0, -r.1);
        }
        let a = rest.iter().fold(0i128, |g, x| gcd(g, x.0));
        Ideal { a, b: r.0.rem_euclid(a), c: r.1 }
    }

    fn gens(i: Ideal) -> [(i128, i128); 2] {
        [(i.a, 0), (i.b, i.c)]
    }

    fn product(&self, i: Ideal, j: Ideal) -> Ideal {
        let mut v = vec![];
        for x in Self::gens(i) {
            for y in Self::gens(j) {
                v.push(self.mul(x, y));
            }
        }
        Self::hnf(v)
    }

    fn conj_ideal(&self, i: Ideal) -> Ideal {
        Self::hnf(Self::gens(i).iter().map(|&g| self.conj(g)).collect())
    }

    fn contains(i: Ideal, x: (i128, i128)) -> bool {
        x.1 % i.c == 0 && (x.0 - (x.1 / i.c) * i.b) % i.a == 0
    }

    fn is_principal(&self, i: Ideal) -> bool {
        let n = i.a * i.c;
        let sqrt_abs_d = (self.d.abs() as f64).sqrt();
        let vmax = if self.d < 0 {
            (2.0 * (n as f64).sqrt() / sqrt_abs_d).ceil() as i128 + 1
        } else {
            (2.0 * (n as f64 * self.eps).sqrt() / sqrt_abs_d).ceil() as i128 + 1
        };
        for v in -vmax..=vmax {
            for s in [1i128, -1] {
                let disc = self.t * self.t * v * v - 4 * (self.nw * v * v - s * n);
                if disc < 0 {
                    continue;
                }
                let r = isqrt(disc);
                if r * r != disc {
                    continue;
                }
                for rr in [r, -r] {
                    let num = -self.t * v + rr;
                    if num % 2 == 0 && Self::contains(i, (num / 2, v)) {
                        return true;
                    }
                }
            }
        }
        false
    }

    fn equivalent(&self, i: Ideal, j: Ideal) -> bool {
        self.is_principal(self.product(i, self.conj_ideal(j)))
    }

    fn class_number(&self) -> usize {
        let disc = field_discriminant(self.d).abs() as f64;
        let mink = if self.d < 0 { 2.0 / std::f64::consts::PI * disc.sqrt() } else { disc.sqrt() / 2.0 };
        let mut gens = vec![];
        for p in small_primes(mink.floor() as u64 + 1) {
            let p = p as i128;
            for r in 0..p {
                if (r * r - self.t * r + self.nw).rem_euclid(p) == 0 {
                    gens.push(Self::hnf(vec![(p, 0), (-r, 1)]));
                }
            }
        }
        let mut reps = vec![Ideal { a: 1, b: 0, c: 1 }];
        let mut k = 0;
        while k < reps.len() {
            for &g in &gens {
                let n = self.product(reps[k], g);
                if !reps.iter().any(|&r| self.equivalent(n, r)) {
                    reps.push(n);
                }
            }
            k += 1;
        }
        reps.len()
    }
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

fn isqrt(n: i128) -> i128 {
    let mut r = (n as f64).sqrt() as i128;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

#[test]
fn class_numbers_match_ideal_enumeration() {
    for d in radicands(-50, 50) {
        let want = Quad::new(d).class_number() as u64;
        let got = quadratic_field(d).unwrap().class_number().unwrap();
        assert_eq!(got, want, "d = {d}");
    }
}

#[test]
fn class_number_oracle_known_values() {
    for (d, h) in [(-5, 2), (-23, 3), (-14, 4), (-1, 1), (10, 2), (15, 2), (79, 3), (2, 1)] {
        assert_eq!(Quad::new(d).class_number(), h, "d = {d}");
    }
}

fn subsets<T: Clone>(v: &[T]) -> Vec<Vec<T>> {
    (0..1usize << v.len()).map(|m| v.iter().enumerate().filter(|(i, _)| m >> i & 1 == 1).map(|(_, x)| x.clone()).collect()).collect()
}

#[test]
fn sunit_rank_formula() {
    for d in radicands(-50, 50) {
        let k = quadratic_field(d).unwrap();
        let (r1, r2) = k.signature();
        let mut all = vec![];
        for p in [2u64, 3, 5] {
            all.extend(k.primes_above(p).unwrap());
        }
        for s in subsets(&all) {
            let g = SUnitGroup::new(k.clone(), s.clone()).unwrap();
            assert_eq!(g.rank(), r1 + r2 - 1 + s.len(), "d = {d}, |S| = {}", s.len());
            for x in g.free_generators() {
                assert!(g.is_sunit(x).unwrap());
            }
            // generators are independent: the valuation matrix is nonsingular
            let m: Vec<Vec<BigRational>> = g
                .valuation_matrix()
                .iter()
                .map(|r| r.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect())
                .collect();
            if !m.is_empty() {
                assert!(!common::det_q(m).is_zero(), "d = {d}");
            }
        }
    }
}

fn group_for(key: Option<i64>) -> SUnitGroup {
    match key {
        Some(d) => SUnitGroup::above(&quadratic_field(d).unwrap(), &[2, 3]).unwrap(),
        None => SUnitGroup::above(&zeta16_plus(), &[2]).unwrap(),
    }
}

fn arb_group_key() -> impl Strategy<Value = Option<i64>> {
    prop_oneof![prop::sample::select(radicands(-30, 30)).prop_map(Some), Just(None)]
}

fn arb_exps(rank: usize) -> impl Strategy<Value = ExponentVector> {
    (0u32..12, prop::collection::vec(-3i64..=3, rank)).prop_map(|(t, f)| ExponentVector::new(t, f))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 96, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn unfold_is_a_homomorphism((key, v, w) in arb_group_key().prop_flat_map(|key| {
        let r = group_for(key).rank();
        (Just(key), arb_exps(r), arb_exps(r))
    })) {
        let g = group_for(key);
        let k = g.field().clone();
        let (_, order) = g.torsion();
        let sum = ExponentVector::new((v.torsion + w.torsion) % order, v.free.iter().zip(&w.free).map(|(a, b)| a + b).collect());
        let (x, y) = (g.unfold(&v).unwrap(), g.unfold(&w).unwrap());
        prop_assert_eq!(g.unfold(&sum).unwrap(), k.mul(&x, &y));
        prop_assert!(g.is_sunit(&x).unwrap());
        let back = g.fold(&x).unwrap();
        prop_assert_eq!(back.free, v.free.clone());
        prop_assert_eq!(back.torsion % order, v.torsion % order);
    }

    #[test]
    fn non_sunits_are_rejected(d in prop::sample::select(radicands(-30, 30)), p in prop::sample::select(vec![7u64, 11, 13])) {
        let k = quadratic_field(d).unwrap();
        let g = SUnitGroup::above(&k, &[2, 3]).unwrap();
        prop_assert!(!g.is_sunit(&k.integer(p as i64)).unwrap());
        prop_assert!(!g.is_sunit(&k.inv(&k.integer(p as i64 * 6)).unwrap()).unwrap());
        prop_assert!(g.is_sunit(&k.integer(-12)).unwrap());
    }
}

#[test]
fn torsion_orders() {
    let mut seen = BTreeSet::new();
    for d in radicands(-30, 30) {
        let k = quadratic_field(d).unwrap();
        let (z, w) = k.torsion_generator();
        assert_eq!(k.pow(z, w as i64).unwrap(), k.one(), "d = {d}");
        seen.insert(w);
    }
    assert_eq!(seen, BTreeSet::from([2, 4, 6]));
}
