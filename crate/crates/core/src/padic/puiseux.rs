//! Exact symbolic coefficients: finite sums of monomials res * Pi^val with
//! rational valuations and residues in a finite field.
//!
//! This is the "(valuation, residue)" backend: arithmetic is exact in the
//! subring of Puiseux polynomials, so cancellations are decided honestly
//! instead of being guessed from truncated data.

use crate::algebra::gf::{Gf, GfEl};
use crate::error::{Error, Result};
use crate::rat::Rat;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

#[derive(Clone, PartialEq, Eq)]
pub struct Puiseux {
    field: Arc<Gf>,
    terms: BTreeMap<Rat, GfEl>,
}

impl fmt::Debug for Puiseux {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(v, c)| format!("{c}*Pi^({v})"))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl Puiseux {
    pub fn zero(field: &Arc<Gf>) -> Puiseux {
        Puiseux {
            field: field.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn monomial(val: Rat, res: GfEl) -> Puiseux {
        let field = res.field().clone();
        let mut terms = BTreeMap::new();
        if !res.is_zero() {
            terms.insert(val, res);
        }
        Puiseux { field, terms }
    }

    pub fn one(field: &Arc<Gf>) -> Puiseux {
        Puiseux::monomial(Rat::from_integer(0), GfEl::one(field))
    }

    pub fn field(&self) -> &Arc<Gf> {
        &self.field
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, val: Rat, res: &GfEl) {
        if res.is_zero() {
            return;
        }
        let entry = self
            .terms
            .entry(val)
            .or_insert_with(|| GfEl::zero(&self.field));
        *entry = entry.add(res);
        if entry.is_zero() {
            self.terms.remove(&val);
        }
    }

    pub fn add(&self, other: &Puiseux) -> Puiseux {
        let mut out = self.clone();
        for (v, c) in &other.terms {
            out.add_term(*v, c);
        }
        out
    }

    pub fn neg(&self) -> Puiseux {
        Puiseux {
            field: self.field.clone(),
            terms: self.terms.iter().map(|(v, c)| (*v, c.neg())).collect(),
        }
    }

    pub fn sub(&self, other: &Puiseux) -> Puiseux {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Puiseux) -> Puiseux {
        let mut out = Puiseux::zero(&self.field);
        for (v1, c1) in &self.terms {
            for (v2, c2) in &other.terms {
                out.add_term(v1 + v2, &c1.mul(c2));
            }
        }
        out
    }

    /// Drop all terms with valuation >= cutoff.
    pub fn truncate(&self, cutoff: Rat) -> Puiseux {
        Puiseux {
            field: self.field.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(v, _)| **v < cutoff)
                .map(|(v, c)| (*v, c.clone()))
                .collect(),
        }
    }

    /// Leading (lowest-valuation) term.
    pub fn leading(&self) -> Option<(Rat, GfEl)> {
        self.terms.iter().next().map(|(v, c)| (*v, c.clone()))
    }

    pub fn val(&self) -> Option<Rat> {
        self.terms.keys().next().copied()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Rat, &GfEl)> {
        self.terms.iter()
    }

    /// Exact p-th root of a single monomial.
    pub fn monomial_pth_root(&self) -> Result<Puiseux> {
        if self.terms.len() != 1 {
            return Err(Error::domain("p-th root only of a monomial"));
        }
        let (v, c) = self.leading().unwrap();
        let p = self.field.p() as i64;
        Ok(Puiseux::monomial(v / Rat::from_integer(p), c.pth_root()))
    }

    pub fn pow(&self, e: u32) -> Puiseux {
        let mut acc = Puiseux::one(&self.field);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Inverse of a unit-with-leading-term, truncated at `cutoff` above the
    /// leading valuation: 1/(c Pi^v (1 + h)) = c^{-1} Pi^{-v} sum (-h)^k.
    pub fn inv_truncated(&self, cutoff: Rat) -> Result<Puiseux> {
        let (v, c) = self
            .leading()
            .ok_or_else(|| Error::domain("inverse of zero"))?;
        let lead_inv = Puiseux::monomial(-v, c.inv()?);
        // h = lead_inv * self - 1, all terms of positive valuation
        let h = lead_inv.mul(self).sub(&Puiseux::one(&self.field));
        debug_assert!(h.val().map(|x| x > Rat::from_integer(0)).unwrap_or(true));
        let mut acc = Puiseux::one(&self.field);
        let mut pow = Puiseux::one(&self.field);
        loop {
            pow = pow.mul(&h).neg().truncate(cutoff);
            if pow.is_zero() {
                break;
            }
            acc = acc.add(&pow);
        }
        Ok(acc.mul(&lead_inv))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat, rint};

    #[test]
    fn exact_cancellation() {
        let f = Gf::new(3, 1).unwrap();
        let a = Puiseux::monomial(rat(1, 2), GfEl::from_u64(&f, 1));
        let b = Puiseux::monomial(rat(1, 2), GfEl::from_u64(&f, 2));
        assert!(a.add(&b).is_zero());
    }

    #[test]
    fn truncated_inverse() {
        let f = Gf::new(5, 1).unwrap();
        let one = Puiseux::one(&f);
        let x = one.add(&Puiseux::monomial(rat(1, 4), GfEl::from_u64(&f, 2)));
        let inv = x.inv_truncated(rint(3)).unwrap();
        let check = x.mul(&inv).sub(&one).truncate(rint(3));
        assert!(check.is_zero());
    }
}
