//! Dense univariate polynomials over a finite field.

use super::gf::{all_elements, embed, Gf, GfEl};
use crate::error::{Error, Result};
use std::fmt;
use std::sync::Arc;

#[derive(Clone, PartialEq, Eq)]
pub struct Poly {
    field: Arc<Gf>,
    c: Vec<GfEl>, // low first, no trailing zeros; empty = zero polynomial
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly{:?}", self.c)
    }
}

impl Poly {
    pub fn zero(field: &Arc<Gf>) -> Poly {
        Poly {
            field: field.clone(),
            c: vec![],
        }
    }

    pub fn one(field: &Arc<Gf>) -> Poly {
        Poly::constant(GfEl::one(field))
    }

    pub fn constant(c: GfEl) -> Poly {
        let field = c.field().clone();
        let mut p = Poly { field, c: vec![c] };
        p.trim();
        p
    }

    pub fn from_coeffs(field: &Arc<Gf>, coeffs: Vec<GfEl>) -> Poly {
        let mut p = Poly {
            field: field.clone(),
            c: coeffs,
        };
        p.trim();
        p
    }

    /// x
    pub fn x(field: &Arc<Gf>) -> Poly {
        Poly::from_coeffs(
            field,
            vec![GfEl::zero(field), GfEl::one(field)],
        )
    }

    /// x - a
    pub fn x_minus(a: &GfEl) -> Poly {
        Poly::from_coeffs(a.field(), vec![a.neg(), GfEl::one(a.field())])
    }

    fn trim(&mut self) {
        while self.c.last().map(|x| x.is_zero()).unwrap_or(false) {
            self.c.pop();
        }
    }

    pub fn field(&self) -> &Arc<Gf> {
        &self.field
    }

    pub fn coeffs(&self) -> &[GfEl] {
        &self.c
    }

    pub fn coeff(&self, i: usize) -> GfEl {
        self.c
            .get(i)
            .cloned()
            .unwrap_or_else(|| GfEl::zero(&self.field))
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        if self.c.is_empty() {
            None
        } else {
            Some(self.c.len() - 1)
        }
    }

    pub fn leading(&self) -> Option<&GfEl> {
        self.c.last()
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.c.len().max(other.c.len());
        let mut c = Vec::with_capacity(n);
        for i in 0..n {
            c.push(self.coeff(i).add(&other.coeff(i)));
        }
        Poly::from_coeffs(&self.field, c)
    }

    pub fn neg(&self) -> Poly {
        Poly::from_coeffs(&self.field, self.c.iter().map(|x| x.neg()).collect())
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero(&self.field);
        }
        let mut c = vec![GfEl::zero(&self.field); self.c.len() + other.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.c.iter().enumerate() {
                c[i + j] = c[i + j].add(&a.mul(b));
            }
        }
        Poly::from_coeffs(&self.field, c)
    }

    pub fn mul_scalar(&self, s: &GfEl) -> Poly {
        Poly::from_coeffs(&self.field, self.c.iter().map(|x| x.mul(s)).collect())
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut result = Poly::one(&self.field);
        for _ in 0..e {
            result = result.mul(self);
        }
        result
    }

    /// Quotient and remainder; divisor must be nonzero.
    pub fn divrem(&self, den: &Poly) -> Result<(Poly, Poly)> {
        if den.is_zero() {
            return Err(Error::domain("polynomial division by zero"));
        }
        let dd = den.degree().unwrap();
        let lead_inv = den.leading().unwrap().inv()?;
        let mut rem = self.clone();
        let mut quo = vec![GfEl::zero(&self.field); self.c.len().saturating_sub(dd)];
        while let Some(dr) = rem.degree() {
            if dr < dd {
                break;
            }
            let q = rem.leading().unwrap().mul(&lead_inv);
            let shift = dr - dd;
            quo[shift] = q.clone();
            let mut sub = vec![GfEl::zero(&self.field); shift];
            sub.extend(den.c.iter().map(|c| c.mul(&q)));
            rem = rem.sub(&Poly::from_coeffs(&self.field, sub));
        }
        Ok((Poly::from_coeffs(&self.field, quo), rem))
    }

    pub fn gcd(&self, other: &Poly) -> Poly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.divrem(&b).expect("nonzero divisor");
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Scale to leading coefficient 1 (zero stays zero).
    pub fn monic(&self) -> Poly {
        match self.leading() {
            None => self.clone(),
            Some(l) => self.mul_scalar(&l.inv().expect("nonzero leading coefficient")),
        }
    }

    pub fn derivative(&self) -> Poly {
        if self.c.len() <= 1 {
            return Poly::zero(&self.field);
        }
        let c = self.c[1..]
            .iter()
            .enumerate()
            .map(|(i, a)| a.mul(&GfEl::from_u64(&self.field, (i + 1) as u64)))
            .collect();
        Poly::from_coeffs(&self.field, c)
    }

    pub fn eval(&self, x: &GfEl) -> GfEl {
        let mut acc = GfEl::zero(&self.field);
        for c in self.c.iter().rev() {
            acc = acc.mul(x).add(c);
        }
        acc
    }

    /// Multiplicity of the root a (0 if not a root).
    pub fn root_multiplicity(&self, a: &GfEl) -> usize {
        let mut m = 0;
        let mut f = self.clone();
        let lin = Poly::x_minus(a);
        loop {
            if f.is_zero() {
                return m; // zero polynomial: caller beware
            }
            let (q, r) = f.divrem(&lin).unwrap();
            if !r.is_zero() {
                return m;
            }
            m += 1;
            f = q;
        }
    }

    /// All roots in the coefficient field, with multiplicity, by exhaustive scan.
    pub fn roots_in_field(&self) -> Vec<(GfEl, usize)> {
        let mut out = vec![];
        if self.is_zero() {
            return out;
        }
        for a in all_elements(&self.field) {
            if self.eval(&a).is_zero() {
                let m = self.root_multiplicity(&a);
                out.push((a, m));
            }
        }
        out
    }

    /// p-th root of a polynomial that is a p-th power, i.e. all exponents
    /// divisible by p; coefficientwise p-th roots.
    pub fn pth_root(&self) -> Result<Poly> {
        let p = self.field.p() as usize;
        if self.is_zero() {
            return Ok(self.clone());
        }
        let mut c = vec![];
        for (i, a) in self.c.iter().enumerate() {
            if i % p == 0 {
                c.push(a.pth_root());
            } else if !a.is_zero() {
                return Err(Error::domain(
                    "polynomial is not a p-th power (exponent not divisible by p)",
                ));
            }
        }
        Ok(Poly::from_coeffs(&self.field, c))
    }

    /// x^e mod self (self monic of positive degree).
    fn x_powmod(&self, e: u128) -> Poly {
        let x = Poly::x(&self.field);
        let mut result = Poly::one(&self.field);
        let mut b = x;
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&b).divrem(self).unwrap().1;
            }
            b = b.mul(&b).divrem(self).unwrap().1;
            e >>= 1;
        }
        result
    }

    /// The lcm of the degrees of the irreducible factors: the degree of the
    /// extension of the coefficient field over which this polynomial splits.
    pub fn splitting_degree(&self) -> Result<u64> {
        if self.is_zero() {
            return Err(Error::domain("zero polynomial has no splitting field"));
        }
        let mut f = self.monic();
        // strip repeated factors first: sqf = f / gcd(f, f')
        let d = f.derivative();
        if !d.is_zero() {
            let g = f.gcd(&d);
            f = f.divrem(&g).unwrap().0;
        } else if f.degree() == Some(0) {
            return Ok(1);
        } else {
            // f is a p-th power of a polynomial
            return f.pth_root()?.splitting_degree();
        }
        let q = self.field.order() as u128;
        let mut lcm = 1u64;
        let mut d = 1u64;
        let mut remaining = f;
        while remaining.degree().map(|x| x > 0).unwrap_or(false) {
            let mut xq = remaining.x_powmod(q.pow(d as u32));
            // xq - x
            xq = xq.sub(&Poly::x(&self.field));
            let g = remaining.gcd(&xq);
            if g.degree().map(|x| x > 0).unwrap_or(false) {
                lcm = num::integer::lcm(lcm, d);
                remaining = remaining.divrem(&g).unwrap().0;
            }
            d += 1;
            if d as usize > self.c.len() {
                break;
            }
        }
        Ok(lcm)
    }

    /// Map coefficients into a larger field.
    pub fn embed(&self, target: &Arc<Gf>) -> Result<Poly> {
        let c = self
            .c
            .iter()
            .map(|a| embed(a, target))
            .collect::<Result<Vec<_>>>()?;
        Ok(Poly::from_coeffs(target, c))
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
    fn divrem_and_gcd() {
        let f = fp(5);
        // (x^2 - 1) = (x-1)(x+1)
        let a = poly_from(&f, &[-1, 0, 1]);
        let b = poly_from(&f, &[1, 1]);
        let (q, r) = a.divrem(&b).unwrap();
        assert!(r.is_zero());
        assert_eq!(q, poly_from(&f, &[-1, 1]));
        let g = a.gcd(&poly_from(&f, &[-1, 1]));
        assert_eq!(g, poly_from(&f, &[-1, 1]).monic());
    }

    #[test]
    fn pth_root_of_pth_power() {
        let f = fp(3);
        let a = poly_from(&f, &[1, 2, 1]); // (x+1)^2... not a cube
        let cube = a.pow(3);
        let mut is_cube_of = cube.pth_root().unwrap();
        is_cube_of = is_cube_of.monic();
        assert_eq!(is_cube_of, a.monic());
        assert!(poly_from(&f, &[0, 1, 1]).pth_root().is_err());
    }

    #[test]
    fn splitting_degree_detects_extensions() {
        let f = fp(5);
        // x^2 - 2 is irreducible over F_5 (2 is not a QR mod 5)
        let irr = poly_from(&f, &[-2, 0, 1]);
        assert_eq!(irr.splitting_degree().unwrap(), 2);
        let split = poly_from(&f, &[-1, 0, 1]);
        assert_eq!(split.splitting_degree().unwrap(), 1);
        // product of linear and quadratic: lcm = 2
        assert_eq!(irr.mul(&split).splitting_degree().unwrap(), 2);
    }

    #[test]
    fn roots_with_multiplicity() {
        let f = fp(7);
        let g = poly_from(&f, &[1, 1]).pow(2).mul(&poly_from(&f, &[-3, 1]));
        let roots = g.roots_in_field();
        assert_eq!(roots.len(), 2);
        for (r, m) in roots {
            if r == GfEl::from_i64(&f, -1) {
                assert_eq!(m, 2);
            } else {
                assert_eq!(r, GfEl::from_u64(&f, 3));
                assert_eq!(m, 1);
            }
        }
    }
}
