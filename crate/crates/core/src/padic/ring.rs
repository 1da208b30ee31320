//! Truncated exact arithmetic in totally ramified (Eisenstein) extensions of
//! the p-adic integers.
//!
//! An element of Z_p[pi]/(E(pi)) is stored as a coefficient vector
//! c_0 + c_1 pi + ... + c_{e-1} pi^{e-1} with each c_i an integer residue
//! modulo p^m. Because E is Eisenstein, v(c pi^i) = v_p(c) + i/e and the
//! fractional parts i/e are pairwise distinct, so the valuation of a sum of
//! monomials is the minimum of the monomial valuations and the pi-digit
//! expansion of an element never mixes coefficients. Valuations are
//! normalized so that v(p) = 1, hence v(pi) = 1/e.
//!
//! Every element carries an absolute precision `prec` (it is known modulo
//! pi^prec) and an exactness flag. Operations degrade `prec` the way
//! interval arithmetic would; any read of a digit at or beyond `prec` is an
//! error rather than a guess.

use crate::algebra::gf::{Gf, GfEl};
use crate::error::{Error, Result};
use crate::padic::puiseux::Puiseux;
use crate::rat::{rat, Rat};
use std::fmt;
use std::sync::Arc;

#[derive(Debug)]
pub struct EisRing {
    p: u64,
    e: usize,
    r: usize,
    /// Low coefficients c_0..c_{e-1} of the monic Eisenstein polynomial
    /// x^e + c_{e-1} x^{e-1} + ... + c_0, as exact integers.
    epoly: Vec<i128>,
    /// Coefficients are tracked modulo p^m_exp.
    m_exp: u32,
    pm: i128,
    /// Residue field F_{p^r}; exact digit arithmetic requires r = 1.
    residue_field: Arc<Gf>,
}

fn checked_pow(p: u64, m: u32) -> Option<i128> {
    let mut acc: i128 = 1;
    for _ in 0..m {
        acc = acc.checked_mul(p as i128)?;
        if acc > 3_000_000_000_000_000_00i128 * 3 {
            return None;
        }
    }
    Some(acc)
}

impl EisRing {
    /// Ring with the given monic Eisenstein polynomial (low coefficients
    /// first, degree = len) and working precision of `prec_digits` pi-digits.
    pub fn new(p: u64, epoly_low: Vec<i128>, prec_digits: i64) -> Result<Arc<EisRing>> {
        let e = epoly_low.len();
        if e == 0 {
            return Err(Error::usage("Eisenstein polynomial must have positive degree"));
        }
        if epoly_low.iter().any(|c| c % p as i128 != 0) {
            return Err(Error::domain(
                "not Eisenstein: a lower coefficient is a unit",
            ));
        }
        if (epoly_low[0] / p as i128) % p as i128 == 0 {
            return Err(Error::domain(
                "not Eisenstein: constant term has valuation > 1",
            ));
        }
        if prec_digits < e as i64 {
            return Err(Error::domain("precision below one p-division"));
        }
        let mut m_exp = (prec_digits as u32).div_ceil(e as u32) + 2;
        // keep p^m small enough that convolution sums fit i128
        while checked_pow(p, m_exp).is_none() {
            m_exp -= 1;
        }
        let pm = checked_pow(p, m_exp).unwrap();
        if (m_exp as i64 - 1) * (e as i64) < prec_digits {
            return Err(Error::domain(format!(
                "requested precision {prec_digits} pi-digits exceeds representable range"
            )));
        }
        let residue_field = Gf::new(p, 1)?;
        Ok(Arc::new(EisRing {
            p,
            e,
            r: 1,
            epoly: epoly_low,
            m_exp,
            pm,
            residue_field,
        }))
    }

    pub fn p(&self) -> u64 {
        self.p
    }
    pub fn e(&self) -> usize {
        self.e
    }
    pub fn r(&self) -> usize {
        self.r
    }
    pub fn residue_field(&self) -> &Arc<Gf> {
        &self.residue_field
    }

    /// Largest absolute precision any element may claim.
    pub fn max_prec(&self) -> i64 {
        self.e as i64 * (self.m_exp as i64)
    }

    fn modp(&self, x: i128) -> i128 {
        x.rem_euclid(self.pm)
    }

    fn vp(&self, x: i128) -> u32 {
        if x == 0 {
            return self.m_exp;
        }
        let p = self.p as i128;
        let mut v = 0;
        let mut x = x;
        while x % p == 0 {
            x /= p;
            v += 1;
            if v >= self.m_exp {
                break;
            }
        }
        v
    }
}

#[derive(Clone)]
pub struct PadicElem {
    ring: Arc<EisRing>,
    c: Vec<i128>, // length e, entries in [0, p^m)
    /// Known modulo pi^prec.
    prec: i64,
    exact: bool,
}

impl fmt::Debug for PadicElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Padic{:?} (mod pi^{}{})",
            self.c,
            self.prec,
            if self.exact { ", exact" } else { "" }
        )
    }
}

impl PadicElem {
    pub fn zero(ring: &Arc<EisRing>) -> PadicElem {
        PadicElem {
            ring: ring.clone(),
            c: vec![0; ring.e],
            prec: ring.max_prec(),
            exact: true,
        }
    }

    pub fn from_i128(ring: &Arc<EisRing>, n: i128) -> PadicElem {
        let mut c = vec![0; ring.e];
        c[0] = ring.modp(n);
        PadicElem {
            ring: ring.clone(),
            c,
            prec: ring.max_prec(),
            exact: n.unsigned_abs() < ring.pm as u128,
        }
    }

    /// The uniformizer pi.
    pub fn pi(ring: &Arc<EisRing>) -> PadicElem {
        let mut c = vec![0; ring.e];
        if ring.e == 1 {
            c[0] = ring.modp(-ring.epoly[0]);
        } else {
            c[1] = 1;
        }
        PadicElem {
            ring: ring.clone(),
            c,
            prec: ring.max_prec(),
            exact: true,
        }
    }

    pub fn ring(&self) -> &Arc<EisRing> {
        &self.ring
    }

    pub fn prec(&self) -> i64 {
        self.prec
    }

    pub fn is_exact(&self) -> bool {
        self.exact
    }

    /// True when the element is exactly the zero of the ring.
    pub fn is_certified_zero(&self) -> bool {
        self.exact && self.c.iter().all(|&x| x == 0)
    }

    /// Valuation in pi-digit units if a nonzero digit is visible below the
    /// precision horizon.
    pub fn val_digits(&self) -> Option<i64> {
        let e = self.ring.e as i64;
        let mut best: Option<i64> = None;
        for (i, &ci) in self.c.iter().enumerate() {
            if ci == 0 {
                continue;
            }
            let v = e * self.ring.vp(ci) as i64 + i as i64;
            if v < self.prec && best.map(|b| v < b).unwrap_or(true) {
                best = Some(v);
            }
        }
        best
    }

    /// Valuation with v(p) = 1. Ok(None) means certified zero; an
    /// uncertified zero-to-precision is a loud precision error.
    pub fn val(&self) -> Result<Option<Rat>> {
        match self.val_digits() {
            Some(v) => Ok(Some(rat(v, self.ring.e as i64))),
            None => {
                if self.is_certified_zero() {
                    Ok(None)
                } else {
                    Err(Error::precision(format!(
                        "element is zero modulo pi^{} but not certified zero",
                        self.prec
                    )))
                }
            }
        }
    }

    fn same_ring(&self, other: &PadicElem) {
        assert!(
            Arc::ptr_eq(&self.ring, &other.ring)
                || (self.ring.p == other.ring.p && self.ring.epoly == other.ring.epoly),
            "mixed Eisenstein rings"
        );
    }

    pub fn add(&self, other: &PadicElem) -> PadicElem {
        self.same_ring(other);
        let c = self
            .c
            .iter()
            .zip(&other.c)
            .map(|(a, b)| self.ring.modp(a + b))
            .collect();
        PadicElem {
            ring: self.ring.clone(),
            c,
            prec: self.prec.min(other.prec),
            exact: self.exact && other.exact,
        }
    }

    pub fn neg(&self) -> PadicElem {
        PadicElem {
            ring: self.ring.clone(),
            c: self.c.iter().map(|&a| self.ring.modp(-a)).collect(),
            prec: self.prec,
            exact: self.exact,
        }
    }

    pub fn sub(&self, other: &PadicElem) -> PadicElem {
        self.add(&other.neg())
    }

    fn val_lower_bound_digits(&self) -> i64 {
        self.val_digits().unwrap_or(self.prec)
    }

    pub fn mul(&self, other: &PadicElem) -> PadicElem {
        self.same_ring(other);
        let ring = &self.ring;
        let e = ring.e;
        if self.is_certified_zero() || other.is_certified_zero() {
            return PadicElem::zero(ring);
        }
        let mut conv = vec![0i128; 2 * e - 1];
        for (i, &a) in self.c.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.c.iter().enumerate() {
                conv[i + j] = ring.modp(conv[i + j] + ring.modp(a * b));
            }
        }
        // reduce by x^e = -(c_0 + ... + c_{e-1} x^{e-1})
        for k in (e..2 * e - 1).rev() {
            let d = conv[k];
            if d == 0 {
                continue;
            }
            conv[k] = 0;
            for (i, &ci) in ring.epoly.iter().enumerate() {
                if ci != 0 {
                    let idx = k - e + i;
                    conv[idx] = ring.modp(conv[idx] - d * ring.modp(ci.rem_euclid(ring.pm)));
                }
            }
        }
        conv.truncate(e);
        let va = self.val_lower_bound_digits();
        let vb = other.val_lower_bound_digits();
        let prec = (self.prec + vb).min(other.prec + va).min(ring.max_prec());
        PadicElem {
            ring: ring.clone(),
            c: conv,
            prec,
            exact: self.exact && other.exact,
        }
    }

    pub fn mul_i128(&self, n: i128) -> PadicElem {
        self.mul(&PadicElem::from_i128(&self.ring, n))
    }

    pub fn pow(&self, e: u32) -> PadicElem {
        let mut acc = PadicElem::from_i128(&self.ring, 1);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Inverse of a unit (valuation 0).
    pub fn inv(&self) -> Result<PadicElem> {
        let v = self.val_digits();
        if v != Some(0) {
            return Err(Error::domain(
                "inverse requires a unit (valuation exactly 0)",
            ));
        }
        let ring = &self.ring;
        let p = ring.p as i128;
        let c0 = self.c[0].rem_euclid(p);
        // inverse of the residue digit mod p
        let mut x0 = 1i128;
        let mut b = c0;
        let mut exp = p - 2;
        while exp > 0 {
            if exp & 1 == 1 {
                x0 = x0 * b % p;
            }
            b = b * b % p;
            exp >>= 1;
        }
        let mut x = PadicElem::from_i128(ring, x0);
        x.prec = self.prec;
        x.exact = self.exact;
        let two = PadicElem::from_i128(ring, 2);
        // Newton doubles the number of correct digits each round
        let rounds = 64 - (ring.max_prec() as u64).leading_zeros() + 2;
        for _ in 0..rounds {
            x = x.mul(&two.sub(&self.mul(&x)));
        }
        x.prec = self.prec;
        x.exact = self.exact;
        Ok(x)
    }

    /// Multiply by pi^k (exact shift up).
    pub fn mul_pi_pow(&self, k: u32) -> PadicElem {
        let mut out = self.clone();
        for _ in 0..k {
            out = out.mul(&PadicElem::pi(&self.ring));
        }
        out
    }

    /// Divide by pi^{e} in one step: x / pi^e = -x * U^{-1} / p where the
    /// Eisenstein relation gives pi^e = -p U with U an exact unit. Costs e
    /// digits of absolute precision.
    fn div_pi_e(&self) -> Result<PadicElem> {
        let ring = &self.ring;
        let p = ring.p as i128;
        // U = (c_0 + c_1 pi + ...)/p as an exact ring element
        let mut ucoef = vec![0i128; ring.e];
        for (i, &ci) in ring.epoly.iter().enumerate() {
            ucoef[i] = ring.modp(ci / p);
        }
        let u = PadicElem {
            ring: ring.clone(),
            c: ucoef,
            prec: ring.max_prec(),
            exact: true,
        };
        let y = self.neg().mul(&u.inv()?);
        let mut c = Vec::with_capacity(ring.e);
        for &yi in &y.c {
            if yi % p != 0 {
                return Err(Error::domain(
                    "division by pi^e of an element with too small valuation",
                ));
            }
            c.push(yi / p);
        }
        Ok(PadicElem {
            ring: ring.clone(),
            c,
            prec: (self.prec - ring.e as i64).max(0),
            exact: false,
        })
    }

    /// Divide by pi^k, requiring val >= k digits. Costs at most
    /// (k rounded up to a multiple of e) digits of precision.
    pub fn shift_down(&self, k: i64) -> Result<PadicElem> {
        if k == 0 {
            return Ok(self.clone());
        }
        if k < 0 {
            return Ok(self.mul_pi_pow((-k) as u32));
        }
        match self.val_digits() {
            Some(v) if v >= k => {}
            Some(_) => return Err(Error::domain("shift below valuation")),
            None => {
                if self.is_certified_zero() {
                    return Ok(PadicElem::zero(&self.ring));
                }
                return Err(Error::precision("shifting an uncertified zero"));
            }
        }
        let e = self.ring.e as i64;
        let up = (e - k % e) % e;
        let full = (k + up) / e;
        let mut out = self.mul_pi_pow(up as u32);
        for _ in 0..full {
            out = out.div_pi_e()?;
        }
        Ok(out)
    }

    /// x / y for val(x) >= val(y); strips pi^{v(y)} from both and divides by
    /// the remaining unit.
    pub fn div(&self, other: &PadicElem) -> Result<PadicElem> {
        let vy = other
            .val_digits()
            .ok_or_else(|| Error::domain("division by (certified or uncertified) zero"))?;
        let unit = other.shift_down(vy)?;
        let num = self.shift_down(vy)?;
        Ok(num.mul(&unit.inv()?))
    }

    /// pi-adic digit at position j (< prec), as an integer in [0, p).
    pub fn digit(&self, j: i64) -> Result<u64> {
        if j < 0 {
            return Err(Error::usage("negative digit index"));
        }
        if j >= self.prec {
            return Err(Error::precision(format!(
                "digit pi^{j} requested but element only known modulo pi^{}",
                self.prec
            )));
        }
        let e = self.ring.e as i64;
        let i = (j % e) as usize;
        let k = (j / e) as u32;
        if k >= self.ring.m_exp {
            return Err(Error::precision("digit beyond coefficient storage"));
        }
        let p = self.ring.p as i128;
        let mut x = self.c[i];
        for _ in 0..k {
            x /= p;
        }
        Ok((x % p) as u64)
    }

    /// Residue of x / pi^{v(x)} in the residue field. The raw coefficient
    /// digit at a composite position e k + i is corrected by the unit in
    /// pi^e = -p U: p^k pi^i = (-1)^k U^{-k} pi^{e k + i}.
    pub fn residue(&self) -> Result<GfEl> {
        match self.val_digits() {
            Some(v) => {
                let d = self.digit(v)?;
                let field = self.ring.residue_field();
                let e = self.ring.e as i64;
                let k = (v / e) as u32;
                let p = self.ring.p as i128;
                let u_res = ((self.ring.epoly[0] / p).rem_euclid(p)) as i64;
                let corr = GfEl::from_i64(field, -u_res)
                    .inv()?
                    .pow(k as u128);
                Ok(GfEl::from_u64(field, d).mul(&corr))
            }
            None => Err(Error::domain("residue of zero")),
        }
    }

    /// Leading monomial (valuation, residue) as a symbolic coefficient;
    /// the lossy-but-sound direction of the exact/symbolic conversion.
    pub fn leading_monomial(&self) -> Result<Puiseux> {
        if self.is_certified_zero() {
            return Ok(Puiseux::zero(self.ring.residue_field()));
        }
        match self.val_digits() {
            Some(v) => Ok(Puiseux::monomial(
                rat(v, self.ring.e as i64),
                self.residue()?,
            )),
            None => Err(Error::precision(
                "leading monomial of an uncertified zero",
            )),
        }
    }

    /// Equality as a certification: difference is certified zero.
    pub fn certified_eq(&self, other: &PadicElem) -> bool {
        self.sub(other).is_certified_zero()
    }

    /// Zero to working precision (weaker than certified zero).
    pub fn is_zero_to_prec(&self) -> bool {
        self.val_digits().is_none()
    }
}

/// Cyclotomic Eisenstein rings Z_p[zeta_{p^n}] for n = 1, 2, with the
/// distinguished elements lambda = zeta_p - 1 and (for n = 2)
/// pi = zeta_{p^2} - 1 and mu = pi - pi^2/2 + ... +- pi^{p-1}/(p-1).
pub struct CyclotomicRing {
    pub ring: Arc<EisRing>,
    pub p: u64,
    pub level: u8,
    pub lambda: PadicElem,
    pub mu: Option<PadicElem>,
}

fn binom(n: u64, k: u64) -> i128 {
    let mut acc: i128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as i128 / (i + 1) as i128;
    }
    acc
}

/// A sensible default working precision (pi-digits) for level n over p.
pub fn default_precision(p: u64, level: u8) -> i64 {
    let e = match level {
        1 => p - 1,
        _ => p * (p - 1),
    } as i64;
    e * (p as i64 + 6)
}

/// Build Z_p[zeta_{p^n}] (n = 1 or 2) at the given pi-digit precision,
/// verifying the expected valuations of lambda and mu digit by digit.
pub fn make_cyclotomic_ring(p: u64, level: u8, prec_digits: i64) -> Result<CyclotomicRing> {
    if !(level == 1 || level == 2) {
        return Err(Error::usage("cyclotomic level must be 1 or 2"));
    }
    let e = if level == 1 { p - 1 } else { p * (p - 1) } as usize;
    if prec_digits < 3 * e as i64 {
        return Err(Error::domain(format!(
            "precision {prec_digits} below the required 3e = {}",
            3 * e
        )));
    }
    let ring = if level == 1 {
        // Phi_p(1+x) = ((1+x)^p - 1)/x: coefficient of x^j is C(p, j+1)
        let epoly: Vec<i128> = (0..e).map(|j| binom(p, j as u64 + 1)).collect();
        EisRing::new(p, epoly, prec_digits)?
    } else {
        // Phi_{p^2}(1+x) = sum_{j<p} (1+x)^{pj}
        let mut coeffs = vec![0i128; e + 1];
        for j in 0..p {
            for k in 0..=(p * j) {
                coeffs[k as usize] += binom(p * j, k);
            }
        }
        debug_assert_eq!(coeffs[e], 1);
        coeffs.truncate(e);
        EisRing::new(p, coeffs, prec_digits)?
    };

    let pi = PadicElem::pi(&ring);
    let one = PadicElem::from_i128(&ring, 1);
    let lambda = if level == 1 {
        pi.clone()
    } else {
        // lambda = (1+pi)^p - 1
        one.add(&pi).pow(p as u32).sub(&one)
    };
    // v(lambda) = 1/(p-1), i.e. e/(p-1) digits
    let expect = (e as i64) / (p as i64 - 1);
    if lambda.val_digits() != Some(expect) {
        return Err(Error::precision(
            "could not certify v(lambda) = 1/(p-1) at this precision",
        ));
    }
    // v(lambda^{p-1} + p) > 1
    let test = lambda.pow(p as u32 - 1).add(&PadicElem::from_i128(&ring, p as i128));
    match test.val_digits() {
        Some(v) if v > e as i64 => {}
        None => {}
        _ => {
            return Err(Error::precision(
                "could not certify v(lambda^{p-1} + p) > 1",
            ))
        }
    }
    let mu = if level == 2 {
        let mut acc = PadicElem::zero(&ring);
        let mut sign = 1i128;
        for i in 1..p {
            let term = pi
                .pow(i as u32)
                .mul_i128(sign)
                .mul(&PadicElem::from_i128(&ring, i as i128).inv()?);
            acc = acc.add(&term);
            sign = -sign;
        }
        if acc.val_digits() != Some(1) {
            return Err(Error::precision("could not certify v(mu) = 1/(p(p-1))"));
        }
        Some(acc)
    } else {
        None
    };
    Ok(CyclotomicRing {
        ring,
        p,
        level,
        lambda,
        mu,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rint;

    #[test]
    fn cyclotomic_level_one_valuations() {
        // p = 3: Phi_3(1+x) = x^2 + 3x + 3, e = 2, v(lambda) = 1/2
        let c = make_cyclotomic_ring(3, 1, 12).unwrap();
        assert_eq!(c.ring.e(), 2);
        assert_eq!(c.lambda.val().unwrap(), Some(rat(1, 2)));
        // p = 5: v(lambda) = 1/4
        let c5 = make_cyclotomic_ring(5, 1, 20).unwrap();
        assert_eq!(c5.lambda.val().unwrap(), Some(rat(1, 4)));
    }

    #[test]
    fn cyclotomic_level_two_valuations() {
        let c = make_cyclotomic_ring(3, 2, 30).unwrap();
        assert_eq!(c.ring.e(), 6);
        let mu = c.mu.as_ref().unwrap();
        assert_eq!(mu.val().unwrap(), Some(rat(1, 6)));
        assert_eq!(c.lambda.val().unwrap(), Some(rat(1, 2)));
    }

    #[test]
    fn precision_preconditions() {
        assert!(make_cyclotomic_ring(3, 1, 3).is_err());
        assert!(make_cyclotomic_ring(4, 1, 12).is_err());
    }

    #[test]
    fn valuation_arithmetic() {
        let c = make_cyclotomic_ring(5, 1, 40).unwrap();
        let ring = &c.ring;
        let l = &c.lambda;
        // v multiplicative
        let l3 = l.pow(3);
        assert_eq!(l3.val().unwrap(), Some(rat(3, 4)));
        // v(x + y) >= min for a genuinely cancelling sum
        let a = l.add(&PadicElem::from_i128(ring, 7));
        let b = a.sub(l);
        assert_eq!(b.val().unwrap(), Some(rint(0)));
        // ultrametric equality case
        let s = l.add(l);
        assert_eq!(s.val().unwrap(), Some(rat(1, 4)));
    }

    #[test]
    fn division_and_digits() {
        let c = make_cyclotomic_ring(3, 1, 24).unwrap();
        let ring = &c.ring;
        let l = &c.lambda;
        // p / lambda^{p-1} should have residue -1 = 2 (since v(l^2 + 3) > 1)
        let q = PadicElem::from_i128(ring, 3).div(&l.pow(2)).unwrap();
        assert_eq!(q.val_digits(), Some(0));
        assert_eq!(q.residue().unwrap().coords()[0], 2);
        // unit inverse round-trips
        let u = l.add(&PadicElem::from_i128(ring, 2));
        let ui = u.inv().unwrap();
        assert!(u.mul(&ui).sub(&PadicElem::from_i128(ring, 1)).is_zero_to_prec());
    }

    #[test]
    fn shift_precision_accounting() {
        let c = make_cyclotomic_ring(3, 1, 24).unwrap();
        let l = &c.lambda;
        let x = l.pow(5);
        let y = x.shift_down(5).unwrap();
        assert_eq!(y.val_digits(), Some(0));
        assert!(!y.is_exact());
        assert!(y.prec() >= 12);
        // shifting below valuation is an error
        assert!(l.shift_down(2).is_err());
    }

    #[test]
    fn custom_eisenstein_sqrt5() {
        // Z_5[a]/(a^2 - 5): e = 2, v(a) = 1/2
        let ring = EisRing::new(5, vec![-5, 0], 20).unwrap();
        let a = PadicElem::pi(&ring);
        assert_eq!(a.val().unwrap(), Some(rat(1, 2)));
        let sq = a.mul(&a);
        assert_eq!(sq.sub(&PadicElem::from_i128(&ring, 5)).is_certified_zero(), true);
    }
}
