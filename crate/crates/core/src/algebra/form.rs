//! Meromorphic differential forms w = f dz on P^1 over a finite field, the
//! Cartier operator, and the logarithmic/exact classification.
//!
//! On rational forms the Cartier operator has the closed formula
//! C(f dz) = (-f^{(p-1)})^{1/p} dz, which makes the classification a pure
//! normal-form equality test: logarithmic iff C(w) = w, exact iff C(w) = 0.

use super::gf::{Gf, GfEl};
use super::poly::Poly;
use super::ratfn::{P1Point, RatFn};
use crate::error::{Error, Result};
use std::fmt;
use std::sync::Arc;

/// w = f dz.
#[derive(Clone, PartialEq, Eq)]
pub struct Form {
    f: RatFn,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum FormClass {
    Logarithmic,
    Exact,
    Neither,
}

impl fmt::Debug for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?}) dz", self.f)
    }
}

impl Form {
    pub fn new(f: RatFn) -> Form {
        Form { f }
    }

    /// df for a rational function f.
    pub fn d(f: &RatFn) -> Form {
        Form { f: f.derivative() }
    }

    /// df/f (logarithmic differential of f); f must be nonzero.
    pub fn dlog(f: &RatFn) -> Result<Form> {
        if f.is_zero() {
            return Err(Error::domain("dlog of the zero function"));
        }
        Ok(Form {
            f: f.derivative().div(f)?,
        })
    }

    pub fn coefficient(&self) -> &RatFn {
        &self.f
    }

    pub fn field(&self) -> &Arc<Gf> {
        self.f.field()
    }

    pub fn is_zero(&self) -> bool {
        self.f.is_zero()
    }

    pub fn add(&self, other: &Form) -> Form {
        Form {
            f: self.f.add(&other.f),
        }
    }

    pub fn mul_fn(&self, g: &RatFn) -> Form {
        Form { f: self.f.mul(g) }
    }

    pub fn mul_scalar(&self, s: &GfEl) -> Form {
        Form {
            f: self.f.mul_scalar(s),
        }
    }

    /// The Cartier operator.
    pub fn cartier(&self) -> Result<Form> {
        if self.f.is_zero() {
            return Ok(self.clone());
        }
        let p = self.field().p();
        let mut g = self.f.clone();
        for _ in 0..(p - 1) {
            g = g.derivative();
        }
        if g.is_zero() {
            return Ok(Form {
                f: RatFn::zero(self.field()),
            });
        }
        let root = g.neg().pth_root().map_err(|_| {
            Error::domain("(p-1)-st derivative is not a p-th power; malformed form")
        })?;
        Ok(Form { f: root })
    }

    /// Logarithmic iff C(w) = w, exact iff C(w) = 0.
    pub fn classify(&self) -> Result<FormClass> {
        let c = self.cartier()?;
        if c.f.is_zero() {
            Ok(FormClass::Exact)
        } else if c.f == self.f {
            Ok(FormClass::Logarithmic)
        } else {
            Ok(FormClass::Neither)
        }
    }

    /// Order of vanishing at a point of P^1 (dz has a double pole at
    /// infinity). The zero form has no divisor.
    pub fn order_at(&self, point: &P1Point) -> Result<i64> {
        if self.f.is_zero() {
            return Err(Error::domain("zero form has no divisor"));
        }
        let base = self.f.order_at(point)?;
        Ok(match point {
            P1Point::Finite(_) => base,
            P1Point::Infinity => base - 2,
        })
    }

    /// Pull back along z -> (a z + b)/(c z + d): f(M(z)) M'(z) dz.
    pub fn pullback_mobius(&self, m: &[GfEl; 4]) -> Result<Form> {
        let field = self.field().clone();
        let comp = self.f.compose_mobius(m)?;
        let det = m[0].mul(&m[3]).sub(&m[1].mul(&m[2]));
        // M'(z) = det/(cz + d)^2
        let bot = Poly::from_coeffs(&field, vec![m[3].clone(), m[2].clone()]);
        let dm = RatFn::new(Poly::constant(det), bot.mul(&bot))?;
        Ok(Form { f: comp.mul(&dm) })
    }

    /// Sum of order_at over every point of P^1 realized in a splitting
    /// field of numerator and denominator, plus infinity. Always -2 for a
    /// nonzero form; exposed for tests and validators.
    pub fn divisor_degree(&self) -> Result<i64> {
        if self.f.is_zero() {
            return Err(Error::domain("zero form has no divisor"));
        }
        let field = self.field();
        let mut split: u64 = 1;
        if !self.f.num().is_zero() && self.f.num().degree().unwrap() > 0 {
            split = num::integer::lcm(split, self.f.num().splitting_degree()?);
        }
        if self.f.den().degree().unwrap() > 0 {
            split = num::integer::lcm(split, self.f.den().splitting_degree()?);
        }
        let big = Gf::new(field.p(), field.r() * split as usize)?;
        let num = self.f.num().embed(&big)?;
        let den = self.f.den().embed(&big)?;
        let big_form = Form::new(RatFn::new(num, den)?);
        let mut total = big_form.order_at(&P1Point::Infinity)?;
        for (root, _) in big_form.f.num().roots_in_field() {
            total += big_form.order_at(&P1Point::Finite(root))?;
        }
        for (root, _) in big_form.f.den().roots_in_field() {
            // poles not already counted as zeros (num and den are coprime)
            total += big_form.order_at(&P1Point::Finite(root))?;
        }
        Ok(total)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fp(p: u64) -> Arc<Gf> {
        Gf::new(p, 1).unwrap()
    }

    fn poly_from(field: &Arc<Gf>, v: &[i64]) -> Poly {
        Poly::from_coeffs(
            field,
            v.iter().map(|&x| GfEl::from_i64(field, x)).collect(),
        )
    }

    #[test]
    fn cartier_standard_identities() {
        for p in [3u64, 5, 7] {
            let f = fp(p);
            // dz/z is a logarithmic fixed point
            let w = Form::new(RatFn::new(Poly::one(&f), poly_from(&f, &[0, 1])).unwrap());
            assert_eq!(w.cartier().unwrap(), w);
            assert_eq!(w.classify().unwrap(), FormClass::Logarithmic);
            // dz is exact
            let dz = Form::new(RatFn::one(&f));
            assert!(dz.cartier().unwrap().is_zero());
            assert_eq!(dz.classify().unwrap(), FormClass::Exact);
            // z^{p-1} dz -> dz
            let mut mono = vec![0i64; p as usize];
            mono[p as usize - 1] = 1;
            let w2 = Form::new(RatFn::from_poly(poly_from(&f, &mono)));
            assert_eq!(w2.cartier().unwrap(), Form::new(RatFn::one(&f)));
        }
    }

    #[test]
    fn dlog_is_logarithmic_and_d_is_exact() {
        let f = fp(5);
        let g = RatFn::from_poly(poly_from(&f, &[-1, 0, 1])); // z^2 - 1
        assert_eq!(Form::dlog(&g).unwrap().classify().unwrap(), FormClass::Logarithmic);
        let h = RatFn::from_poly(poly_from(&f, &[0, 0, 0, 1])); // z^3
        assert_eq!(Form::d(&h).classify().unwrap(), FormClass::Exact);
    }

    #[test]
    fn paper_constructor_form_is_logarithmic() {
        // dz/((z^2-1)(z^2-4)) over F_5
        let f = fp(5);
        let den = poly_from(&f, &[-1, 0, 1]).mul(&poly_from(&f, &[-4, 0, 1]));
        let w = Form::new(RatFn::new(Poly::one(&f), den).unwrap());
        assert_eq!(w.classify().unwrap(), FormClass::Logarithmic);
        // zero of order h - 1 = 2 at infinity
        assert_eq!(w.order_at(&P1Point::Infinity).unwrap(), 2);
        assert_eq!(w.divisor_degree().unwrap(), -2);
    }

    #[test]
    fn semilinearity() {
        let f = fp(3);
        let w = Form::new(
            RatFn::new(poly_from(&f, &[1, 2, 0, 1]), poly_from(&f, &[0, 1, 1])).unwrap(),
        );
        let c = w.cartier().unwrap();
        for a in crate::algebra::gf::all_elements(&f).into_iter().skip(1) {
            let ap = a.pow(f.p() as u128);
            let lhs = w.mul_scalar(&ap).cartier().unwrap();
            let rhs = c.mul_scalar(&a);
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn order_at_examples() {
        let f = fp(5);
        let w = Form::new(RatFn::new(Poly::one(&f), poly_from(&f, &[0, 1])).unwrap());
        assert_eq!(w.order_at(&P1Point::Finite(GfEl::zero(&f))).unwrap(), -1);
        let dz = Form::new(RatFn::one(&f));
        assert_eq!(dz.order_at(&P1Point::Infinity).unwrap(), -2);
        assert!(Form::new(RatFn::zero(&f)).order_at(&P1Point::Infinity).is_err());
    }
}
