//! Rational functions on the projective line over a finite field, kept in
//! coprime normal form with monic denominator so equality is coefficient
//! equality.

use super::gf::{Gf, GfEl};
use super::poly::Poly;
use crate::error::{Error, Result};
use std::fmt;
use std::sync::Arc;

/// A point of P^1 over the coefficient field.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum P1Point {
    Finite(GfEl),
    Infinity,
}

#[derive(Clone, PartialEq, Eq)]
pub struct RatFn {
    num: Poly,
    den: Poly, // monic, coprime to num; zero function has num = 0, den = 1
}

impl fmt::Debug for RatFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?})/({:?})", self.num, self.den)
    }
}

impl RatFn {
    pub fn new(num: Poly, den: Poly) -> Result<RatFn> {
        if den.is_zero() {
            return Err(Error::domain("rational function with zero denominator"));
        }
        let field = num.field().clone();
        if num.is_zero() {
            return Ok(RatFn {
                num,
                den: Poly::one(&field),
            });
        }
        let g = num.gcd(&den);
        let (mut num, _) = num.divrem(&g)?;
        let (mut den, _) = den.divrem(&g)?;
        let lead_inv = den.leading().unwrap().inv()?;
        num = num.mul_scalar(&lead_inv);
        den = den.mul_scalar(&lead_inv);
        Ok(RatFn { num, den })
    }

    pub fn from_poly(p: Poly) -> RatFn {
        let field = p.field().clone();
        RatFn {
            num: p,
            den: Poly::one(&field),
        }
    }

    pub fn zero(field: &Arc<Gf>) -> RatFn {
        RatFn::from_poly(Poly::zero(field))
    }

    pub fn one(field: &Arc<Gf>) -> RatFn {
        RatFn::from_poly(Poly::one(field))
    }

    pub fn field(&self) -> &Arc<Gf> {
        self.num.field()
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn add(&self, other: &RatFn) -> RatFn {
        RatFn::new(
            self.num.mul(&other.den).add(&other.num.mul(&self.den)),
            self.den.mul(&other.den),
        )
        .expect("nonzero denominator")
    }

    pub fn neg(&self) -> RatFn {
        RatFn {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, other: &RatFn) -> RatFn {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &RatFn) -> RatFn {
        RatFn::new(self.num.mul(&other.num), self.den.mul(&other.den))
            .expect("nonzero denominator")
    }

    pub fn mul_scalar(&self, s: &GfEl) -> RatFn {
        RatFn::new(self.num.mul_scalar(s), self.den.clone()).expect("nonzero denominator")
    }

    pub fn div(&self, other: &RatFn) -> Result<RatFn> {
        if other.is_zero() {
            return Err(Error::domain("division by zero rational function"));
        }
        RatFn::new(self.num.mul(&other.den), self.den.mul(&other.num))
    }

    /// Formal derivative d/dz via the quotient rule.
    pub fn derivative(&self) -> RatFn {
        let n = self
            .num
            .derivative()
            .mul(&self.den)
            .sub(&self.num.mul(&self.den.derivative()));
        RatFn::new(n, self.den.mul(&self.den)).expect("nonzero denominator")
    }

    /// Order of vanishing at a point (negative for a pole). The zero
    /// function is rejected.
    pub fn order_at(&self, point: &P1Point) -> Result<i64> {
        if self.is_zero() {
            return Err(Error::domain("zero function has no divisor"));
        }
        match point {
            P1Point::Finite(a) => {
                let zn = self.num.root_multiplicity(a) as i64;
                let zd = self.den.root_multiplicity(a) as i64;
                Ok(zn - zd)
            }
            P1Point::Infinity => {
                Ok(self.den.degree().unwrap() as i64 - self.num.degree().unwrap() as i64)
            }
        }
    }

    pub fn eval(&self, a: &GfEl) -> Result<GfEl> {
        let d = self.den.eval(a);
        if d.is_zero() {
            return Err(Error::domain("evaluation at a pole"));
        }
        Ok(self.num.eval(a).mul(&d.inv()?))
    }

    /// p-th root of a rational function that is a p-th power.
    pub fn pth_root(&self) -> Result<RatFn> {
        if self.is_zero() {
            return Ok(self.clone());
        }
        let p = self.field().p() as u32;
        // num/den = num * den^{p-1} / den^p, and num * den^{p-1} is a
        // polynomial p-th power whenever num/den is one.
        let shifted = self.num.mul(&self.den.pow(p - 1));
        let root = shifted.pth_root()?;
        RatFn::new(root, self.den.clone())
    }

    /// Substitute a Moebius map z -> (a z + b)/(c z + d); det must be nonzero.
    pub fn compose_mobius(&self, m: &[GfEl; 4]) -> Result<RatFn> {
        let field = self.field().clone();
        let det = m[0].mul(&m[3]).sub(&m[1].mul(&m[2]));
        if det.is_zero() {
            return Err(Error::domain("singular Moebius map"));
        }
        let top = Poly::from_coeffs(&field, vec![m[1].clone(), m[0].clone()]); // a z + b
        let bot = Poly::from_coeffs(&field, vec![m[3].clone(), m[2].clone()]); // c z + d
        let dn = self.num.degree().unwrap_or(0);
        let dd = self.den.degree().unwrap_or(0);
        let dmax = dn.max(dd);
        let hom = |p: &Poly| -> Poly {
            // p(top/bot) * bot^dmax
            let mut acc = Poly::zero(&field);
            for (i, coef) in p.coeffs().iter().enumerate() {
                let term = top
                    .pow(i as u32)
                    .mul(&bot.pow((dmax - i) as u32))
                    .mul_scalar(coef);
                acc = acc.add(&term);
            }
            acc
        };
        RatFn::new(hom(&self.num), hom(&self.den))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::gf::Gf;

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
    fn normal_form_is_canonical() {
        let f = fp(5);
        // (2x^2 - 2) / (2x - 2) == x + 1
        let a = RatFn::new(poly_from(&f, &[-2, 0, 2]), poly_from(&f, &[-2, 2])).unwrap();
        let b = RatFn::from_poly(poly_from(&f, &[1, 1]));
        assert_eq!(a, b);
    }

    #[test]
    fn orders_sum_to_zero_for_functions() {
        let f = fp(5);
        // f = z(z-1)/(z-2)^3: orders 1,1 at 0,1; -3 at 2; +1 at infinity
        let num = poly_from(&f, &[0, 1]).mul(&poly_from(&f, &[-1, 1]));
        let den = poly_from(&f, &[-2, 1]).pow(3);
        let g = RatFn::new(num, den).unwrap();
        assert_eq!(g.order_at(&P1Point::Finite(GfEl::from_u64(&f, 0))).unwrap(), 1);
        assert_eq!(g.order_at(&P1Point::Finite(GfEl::from_u64(&f, 2))).unwrap(), -3);
        assert_eq!(g.order_at(&P1Point::Infinity).unwrap(), 1);
    }

    #[test]
    fn mobius_composition() {
        let f = fp(7);
        let g = RatFn::from_poly(poly_from(&f, &[0, 0, 1])); // z^2
        // z -> 1/z sends z^2 to 1/z^2
        let m = [
            GfEl::from_u64(&f, 0),
            GfEl::from_u64(&f, 1),
            GfEl::from_u64(&f, 1),
            GfEl::from_u64(&f, 0),
        ];
        let h = g.compose_mobius(&m).unwrap();
        let expected = RatFn::new(Poly::one(&f), poly_from(&f, &[0, 0, 1])).unwrap();
        assert_eq!(h, expected);
    }
}
