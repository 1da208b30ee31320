//! Laurent polynomials over a finite field: finitely many terms c t^e with
//! integer exponents of either sign.

use super::gf::{Gf, GfEl};
use crate::error::{Error, Result};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

#[derive(Clone, PartialEq, Eq)]
pub struct Laurent {
    field: Arc<Gf>,
    /// exponent of t -> nonzero coefficient
    terms: BTreeMap<i64, GfEl>,
}

impl fmt::Debug for Laurent {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(out, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(e, c)| format!("{c}*t^{e}"))
            .collect();
        write!(out, "{}", parts.join(" + "))
    }
}

impl Laurent {
    pub fn zero(field: &Arc<Gf>) -> Laurent {
        Laurent {
            field: field.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn term(c: GfEl, e: i64) -> Laurent {
        let field = c.field().clone();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(e, c);
        }
        Laurent { field, terms }
    }

    pub fn from_terms(field: &Arc<Gf>, list: Vec<(i64, GfEl)>) -> Laurent {
        let mut l = Laurent::zero(field);
        for (e, c) in list {
            l.add_term(e, &c);
        }
        l
    }

    pub fn field(&self) -> &Arc<Gf> {
        &self.field
    }

    pub fn terms(&self) -> impl Iterator<Item = (&i64, &GfEl)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, e: i64) -> GfEl {
        self.terms
            .get(&e)
            .cloned()
            .unwrap_or_else(|| GfEl::zero(&self.field))
    }

    pub fn add_term(&mut self, e: i64, c: &GfEl) {
        if c.is_zero() {
            return;
        }
        let entry = self
            .terms
            .entry(e)
            .or_insert_with(|| GfEl::zero(&self.field));
        *entry = entry.add(c);
        if entry.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn add(&self, other: &Laurent) -> Laurent {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(*e, c);
        }
        out
    }

    pub fn neg(&self) -> Laurent {
        Laurent {
            field: self.field.clone(),
            terms: self.terms.iter().map(|(e, c)| (*e, c.neg())).collect(),
        }
    }

    pub fn sub(&self, other: &Laurent) -> Laurent {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Laurent) -> Laurent {
        let mut out = Laurent::zero(&self.field);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                out.add_term(e1 + e2, &c1.mul(c2));
            }
        }
        out
    }

    /// Termwise p-th power (Frobenius on coefficients, exponents times p).
    pub fn frobenius(&self) -> Laurent {
        let p = self.field.p();
        Laurent {
            field: self.field.clone(),
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e * p as i64, c.pow(p as u128)))
                .collect(),
        }
    }

    /// y^p - y.
    pub fn artin_schreier_image(&self) -> Laurent {
        self.pow(self.field.p() as u32).sub(self)
    }

    pub fn pow(&self, e: u32) -> Laurent {
        let mut result = Laurent::term(GfEl::one(&self.field), 0);
        for _ in 0..e {
            result = result.mul(self);
        }
        result
    }

    /// Lowest exponent (None for zero).
    pub fn min_exp(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    /// Highest exponent (None for zero).
    pub fn max_exp(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    /// Degree in t^{-1}: -min_exp when the lowest exponent is negative.
    pub fn deg_tinv(&self) -> Option<i64> {
        self.min_exp().map(|e| -e)
    }

    /// The part with exponents >= 0 / < 0.
    pub fn split_nonneg(&self) -> (Laurent, Laurent) {
        let mut pos = Laurent::zero(&self.field);
        let mut neg = Laurent::zero(&self.field);
        for (e, c) in &self.terms {
            if *e >= 0 {
                pos.add_term(*e, c);
            } else {
                neg.add_term(*e, c);
            }
        }
        (pos, neg)
    }

    /// Map coefficients into a larger field.
    pub fn embed(&self, target: &Arc<Gf>) -> Result<Laurent> {
        let mut terms = BTreeMap::new();
        for (e, c) in &self.terms {
            terms.insert(*e, super::gf::embed(c, target)?);
        }
        Ok(Laurent {
            field: target.clone(),
            terms,
        })
    }

    /// Substitute t^k for t (k >= 1).
    pub fn inflate(&self, k: i64) -> Result<Laurent> {
        if k < 1 {
            return Err(Error::usage("inflate requires k >= 1"));
        }
        Ok(Laurent {
            field: self.field.clone(),
            terms: self.terms.iter().map(|(e, c)| (e * k, c.clone())).collect(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_and_cancellation() {
        let f = Gf::new(3, 1).unwrap();
        let a = Laurent::from_terms(
            &f,
            vec![(-2, GfEl::from_u64(&f, 1)), (1, GfEl::from_u64(&f, 2))],
        );
        let b = a.neg();
        assert!(a.add(&b).is_zero());
        let sq = a.mul(&a);
        assert_eq!(sq.coeff(-4), GfEl::from_u64(&f, 1));
        assert_eq!(sq.coeff(-1), GfEl::from_u64(&f, 1)); // 2*1*2 = 4 = 1
        assert_eq!(sq.coeff(2), GfEl::from_u64(&f, 1));
        assert_eq!(a.deg_tinv(), Some(2));
    }

    #[test]
    fn artin_schreier_image_shape() {
        let f = Gf::new(5, 1).unwrap();
        let y = Laurent::term(GfEl::from_u64(&f, 2), -1);
        let im = y.artin_schreier_image();
        // (2 t^{-1})^5 - 2 t^{-1} = 2 t^{-5} - 2 t^{-1}
        assert_eq!(im.coeff(-5), GfEl::from_u64(&f, 2));
        assert_eq!(im.coeff(-1), GfEl::from_u64(&f, 3));
    }
}
