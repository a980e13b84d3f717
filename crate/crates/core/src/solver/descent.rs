//! The descent (lambda, mu) -> (lambda', mu') built from mu = delta^2:
//! lambda' = (1 + delta)^2 / (1 - delta)^2, mu' = -4 delta / (1 - delta)^2.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{FieldElement, PrimeIdeal};
use crate::sunit::SUnitGroup;

#[derive(Clone, Debug, Serialize)]
pub struct DescentOutput {
    pub lambda: FieldElement,
    pub mu: FieldElement,
    /// The sign-adjusted delta actually used.
    pub delta: FieldElement,
    /// max(|ord_P lambda|, |ord_P mu|) before and after.
    pub m_in: i64,
    pub m_out: i64,
    /// ord_P(lambda) = m > 2 ord_P(2) and ord_P(mu) = 0.
    pub hypotheses_hold: bool,
}

/// One descent step at the prime `p`. When the growth hypotheses hold,
/// delta is replaced by -delta if needed so that ord_P(1 - delta) = ord_P(2).
pub fn descent_step(
    group: &SUnitGroup,
    lambda: &FieldElement,
    mu: &FieldElement,
    p: &PrimeIdeal,
    delta: &FieldElement,
) -> Result<DescentOutput> {
    let f = group.field();
    if lambda.add(mu) != f.one() {
        return Err(Error::Precondition("lambda + mu != 1".into()));
    }
    if &f.mul(delta, delta) != mu {
        return Err(Error::Precondition("mu is not delta^2".into()));
    }
    if !f.is_unit(delta) {
        return Err(Error::Precondition("delta is not a unit".into()));
    }
    for q in f.primes_above(2)? {
        if !group.primes().contains(&q) {
            return Err(Error::Precondition(format!("{} above 2 is not in S", q.label)));
        }
    }
    if !group.primes().contains(p) {
        return Err(Error::Precondition(format!("{} is not in S", p.label)));
    }
    let v2 = p.ord(f, &f.integer(2))?;
    let ol = p.ord(f, lambda)?;
    let om = p.ord(f, mu)?;
    let m_in = ol.abs().max(om.abs());
    let hypotheses_hold = om == 0 && ol == m_in && m_in > 2 * v2;
    let mut d = delta.clone();
    if hypotheses_hold {
        let l2 = f.one_minus(&d);
        if l2.is_zero() || p.ord(f, &l2)? != v2 {
            d = d.neg();
        }
    }
    let l1 = f.one().add(&d);
    let l2 = f.one_minus(&d);
    if l2.is_zero() {
        return Err(Error::Precondition("1 - delta = 0".into()));
    }
    let l2sq_inv = f.inv(&f.mul(&l2, &l2))?;
    let lp = f.mul(&f.mul(&l1, &l1), &l2sq_inv);
    let mp = f.mul(&f.mul(&f.integer(-4), &d), &l2sq_inv);
    let m_out = p.ord(f, &lp)?.abs().max(p.ord(f, &mp)?.abs());
    Ok(DescentOutput { lambda: lp, mu: mp, delta: d, m_in, m_out, hypotheses_hold })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::quadratic::quadratic_field;

    #[test]
    fn golden_ratio_example() {
        let k = quadratic_field(5).unwrap();
        let g = SUnitGroup::above(&k, &[2]).unwrap();
        let phi = k.element(&[0, 1]).unwrap();
        let mu = k.mul(&phi, &phi);
        let lambda = k.one_minus(&mu);
        let p = &g.primes()[0].clone();
        let out = descent_step(&g, &lambda, &mu, p, &phi).unwrap();
        assert_eq!(out.lambda, k.pow(&phi, 6).unwrap());
        assert_eq!(out.mu, k.mul(&k.integer(-4), &k.pow(&phi, 3).unwrap()));
        assert_eq!(out.lambda.add(&out.mu), k.one());
    }

    #[test]
    fn rejects_non_square() {
        let k = quadratic_field(5).unwrap();
        let g = SUnitGroup::above(&k, &[2]).unwrap();
        let phi = k.element(&[0, 1]).unwrap();
        let p = g.primes()[0].clone();
        let r = descent_step(&g, &k.one_minus(&phi), &phi, &p, &phi);
        assert!(matches!(r, Err(Error::Precondition(_))));
    }

    #[test]
    fn growth_is_two_m_minus_four_v() {
        // Q(sqrt 2): delta = (1 + sqrt 2)^2, m = 5, ord_P(2) = 2.
        let k = quadratic_field(2).unwrap();
        let g = SUnitGroup::above(&k, &[2]).unwrap();
        let delta = k.element(&[3, 2]).unwrap();
        let mu = k.mul(&delta, &delta);
        let lambda = k.one_minus(&mu);
        let p = g.primes()[0].clone();
        let out = descent_step(&g, &lambda, &mu, &p, &delta).unwrap();
        assert!(out.hypotheses_hold);
        assert_eq!((out.m_in, out.m_out), (5, 2));
        assert_eq!(out.lambda, k.integer(2));
    }
}
