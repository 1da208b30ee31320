//! Laurent polynomials in T^{-1} whose coefficients live in a valued ring:
//! either exact truncated pi-adic digits or exact symbolic Puiseux
//! polynomials.

use crate::algebra::gf::GfEl;
use crate::error::{Error, Result};
use crate::padic::puiseux::Puiseux;
use crate::padic::ring::PadicElem;
use crate::rat::Rat;
use std::collections::BTreeMap;
use std::fmt;

/// Coefficient backend: anything with sound ring operations and certified
/// valuation/residue reads.
pub trait ValCoeff: Clone {
    fn add(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    /// True when the coefficient is certified to be zero.
    fn is_certified_zero(&self) -> bool;
    /// Certified valuation of a nonzero coefficient; loud precision error
    /// when indistinguishable from zero without being certified zero.
    fn val(&self) -> Result<Option<Rat>>;
    /// (valuation, residue) of the leading digit; residue None when the
    /// backend does not expose it.
    fn leading_residue(&self) -> Result<Option<(Rat, Option<GfEl>)>>;
}

impl ValCoeff for PadicElem {
    fn add(&self, o: &Self) -> Self {
        PadicElem::add(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        PadicElem::mul(self, o)
    }
    fn neg(&self) -> Self {
        PadicElem::neg(self)
    }
    fn is_certified_zero(&self) -> bool {
        PadicElem::is_certified_zero(self)
    }
    fn val(&self) -> Result<Option<Rat>> {
        PadicElem::val(self)
    }
    fn leading_residue(&self) -> Result<Option<(Rat, Option<GfEl>)>> {
        match PadicElem::val(self)? {
            None => Ok(None),
            Some(v) => Ok(Some((v, Some(self.residue()?)))),
        }
    }
}

impl ValCoeff for Puiseux {
    fn add(&self, o: &Self) -> Self {
        Puiseux::add(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        Puiseux::mul(self, o)
    }
    fn neg(&self) -> Self {
        Puiseux::neg(self)
    }
    fn is_certified_zero(&self) -> bool {
        self.is_zero()
    }
    fn val(&self) -> Result<Option<Rat>> {
        Ok(Puiseux::val(self))
    }
    fn leading_residue(&self) -> Result<Option<(Rat, Option<GfEl>)>> {
        Ok(self.leading().map(|(v, c)| (v, Some(c))))
    }
}

/// sum_j a_j T^{-j}; the exponent key j may be negative (positive powers
/// of T). Chain normal forms use only j >= 0.
#[derive(Clone)]
pub struct VLaurent<C: ValCoeff> {
    terms: BTreeMap<i64, C>,
}

impl<C: ValCoeff + fmt::Debug> fmt::Debug for VLaurent<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(j, c)| format!("({c:?})*T^(-{j})"))
            .collect();
        write!(f, "{}", if parts.is_empty() { "0".into() } else { parts.join(" + ") })
    }
}

impl<C: ValCoeff> Default for VLaurent<C> {
    fn default() -> Self {
        VLaurent {
            terms: BTreeMap::new(),
        }
    }
}

impl<C: ValCoeff> VLaurent<C> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_terms(list: Vec<(i64, C)>) -> Self {
        let mut out = Self::new();
        for (j, c) in list {
            out.add_term(j, c);
        }
        out
    }

    pub fn add_term(&mut self, j: i64, c: C) {
        if c.is_certified_zero() {
            return;
        }
        match self.terms.remove(&j) {
            None => {
                self.terms.insert(j, c);
            }
            Some(old) => {
                let sum = old.add(&c);
                if !sum.is_certified_zero() {
                    self.terms.insert(j, sum);
                }
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&i64, &C)> {
        self.terms.iter()
    }

    pub fn coeff(&self, j: i64) -> Option<&C> {
        self.terms.get(&j)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Degree in T^{-1} (largest key).
    pub fn deg_tinv(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    pub fn min_key(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (j, c) in &other.terms {
            out.add_term(*j, c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        VLaurent {
            terms: self.terms.iter().map(|(j, c)| (*j, c.neg())).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::new();
        for (j1, c1) in &self.terms {
            for (j2, c2) in &other.terms {
                out.add_term(j1 + j2, c1.mul(c2));
            }
        }
        out
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut out = Self::new();
        for (j, a) in &self.terms {
            out.add_term(*j, a.mul(c));
        }
        out
    }

    pub fn pow(&self, e: u32, one: C) -> Self {
        let mut acc = VLaurent::from_terms(vec![(0, one)]);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Hull points (exponent of T^{-1}, coefficient valuation); requires all
    /// exponents >= 0 (a genuine polynomial in T^{-1}).
    pub fn np_points(&self) -> Result<Vec<(i64, Rat)>> {
        if self.is_zero() {
            return Err(Error::domain("Newton polygon of the zero polynomial"));
        }
        if self.min_key().unwrap() < 0 {
            return Err(Error::domain(
                "Newton polygon in T^{-1} requires nonnegative exponents",
            ));
        }
        let mut out = vec![];
        for (j, c) in &self.terms {
            match c.val()? {
                Some(v) => out.push((*j, v)),
                None => {} // certified-zero coefficient: skip
            }
        }
        if out.is_empty() {
            return Err(Error::domain("Newton polygon of the zero polynomial"));
        }
        Ok(out)
    }

    /// Normalized chain factor: unit constant term, all higher coefficients
    /// of positive valuation.
    pub fn check_normalized(&self) -> Result<()> {
        let zero = Rat::from_integer(0);
        let c0 = self
            .coeff(0)
            .ok_or_else(|| Error::domain("not normalized: no constant term"))?;
        if c0.val()? != Some(zero) {
            return Err(Error::domain("not normalized: constant term is not a unit"));
        }
        for (j, c) in &self.terms {
            if *j < 0 {
                return Err(Error::domain(
                    "not normalized: positive powers of T present",
                ));
            }
            if *j > 0 {
                match c.val()? {
                    Some(v) if v > zero => {}
                    Some(_) => {
                        return Err(Error::domain(format!(
                            "not normalized: coefficient of T^(-{j}) has valuation <= 0"
                        )))
                    }
                    None => {}
                }
            }
        }
        Ok(())
    }

    /// Gauss valuation on the circle v(T) = r: min over terms of
    /// val(a_j) - j r.
    pub fn val_at_radius(&self, r: Rat) -> Result<Option<Rat>> {
        let mut best: Option<Rat> = None;
        for (j, c) in &self.terms {
            if let Some(v) = c.val()? {
                let w = v - Rat::from_integer(*j) * r;
                if best.map(|b| w < b).unwrap_or(true) {
                    best = Some(w);
                }
            }
        }
        Ok(best)
    }
}

impl VLaurent<Puiseux> {
    /// Terms achieving the minimum Gauss valuation at radius r.
    pub fn min_terms_at_radius(&self, r: Rat) -> Vec<(i64, Rat, GfEl)> {
        let mut best: Option<Rat> = None;
        let mut out: Vec<(i64, Rat, GfEl)> = vec![];
        for (j, c) in &self.terms {
            if let Some((v, res)) = c.leading() {
                let w = v - Rat::from_integer(*j) * r;
                match best {
                    None => {
                        best = Some(w);
                        out = vec![(*j, v, res)];
                    }
                    Some(b) if w < b => {
                        best = Some(w);
                        out = vec![(*j, v, res)];
                    }
                    Some(b) if w == b => out.push((*j, v, res)),
                    _ => {}
                }
            }
        }
        out
    }

    /// Drop every monomial whose Gauss valuation at radius r is >= cutoff.
    pub fn truncate_at_radius(&self, r: Rat, cutoff: Rat) -> VLaurent<Puiseux> {
        let mut out = VLaurent::new();
        for (j, c) in &self.terms {
            let mut kept = Puiseux::zero(c.field());
            for (v, res) in c.terms() {
                if *v - Rat::from_integer(*j) * r < cutoff {
                    kept.add_term(*v, res);
                }
            }
            out.add_term(*j, kept);
        }
        out
    }
}

/// Truncated exponential sum_{i=0}^{p-1} x^i / i! for x a valued Laurent
/// polynomial over an Eisenstein ring.
pub fn exp_truncated(
    x: &VLaurent<PadicElem>,
    ring: &std::sync::Arc<crate::padic::ring::EisRing>,
) -> Result<VLaurent<PadicElem>> {
    let p = ring.p();
    let one = PadicElem::from_i128(ring, 1);
    let mut acc = VLaurent::from_terms(vec![(0, one.clone())]);
    let mut pow = VLaurent::from_terms(vec![(0, one)]);
    let mut fact = PadicElem::from_i128(ring, 1);
    for i in 1..p {
        pow = pow.mul(x);
        fact = fact.mul_i128(i as i128);
        acc = acc.add(&pow.scale(&fact.inv()?));
    }
    Ok(acc)
}

/// Truncated exponential of a single ring element.
pub fn exp_truncated_elem(x: &PadicElem) -> Result<PadicElem> {
    let ring = x.ring().clone();
    let p = ring.p();
    let mut acc = PadicElem::from_i128(&ring, 1);
    let mut pow = PadicElem::from_i128(&ring, 1);
    let mut fact = PadicElem::from_i128(&ring, 1);
    for i in 1..p {
        pow = pow.mul(x);
        fact = fact.mul_i128(i as i128);
        acc = acc.add(&pow.mul(&fact.inv()?));
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::ring::{make_cyclotomic_ring, PadicElem};
    use crate::rat::{rat, rint};

    #[test]
    fn exp_truncated_of_zero_is_one() {
        let c = make_cyclotomic_ring(3, 1, 18).unwrap();
        let x = VLaurent::<PadicElem>::new();
        let e = exp_truncated(&x, &c.ring).unwrap();
        assert_eq!(e.num_terms(), 1);
        assert_eq!(e.coeff(0).unwrap().val().unwrap(), Some(rint(0)));
    }

    #[test]
    fn exp_truncated_coefficient_valuations() {
        // exp_p(mu^p T^{-1}) for p = 3: terms at T^0, T^{-1}, T^{-2} with
        // valuations 0, 1/2, 1
        let c = make_cyclotomic_ring(3, 2, 60).unwrap();
        let mu = c.mu.clone().unwrap();
        let arg = VLaurent::from_terms(vec![(1, mu.pow(3))]);
        let e = exp_truncated(&arg, &c.ring).unwrap();
        assert_eq!(e.num_terms(), 3);
        assert_eq!(e.coeff(0).unwrap().val().unwrap(), Some(rint(0)));
        assert_eq!(e.coeff(1).unwrap().val().unwrap(), Some(rat(1, 2)));
        assert_eq!(e.coeff(2).unwrap().val().unwrap(), Some(rint(1)));
    }

    #[test]
    fn gauss_valuation() {
        let c = make_cyclotomic_ring(3, 1, 18).unwrap();
        let one = PadicElem::from_i128(&c.ring, 1);
        // f = 1 + lambda^3 T^{-2}: at r = 0 the min is 0, at r = 1 it is 3/2 - 2
        let f = VLaurent::from_terms(vec![(0, one), (2, c.lambda.pow(3))]);
        assert_eq!(f.val_at_radius(rint(0)).unwrap(), Some(rint(0)));
        assert_eq!(f.val_at_radius(rint(1)).unwrap(), Some(rat(-1, 2)));
        f.check_normalized().unwrap();
    }
}
