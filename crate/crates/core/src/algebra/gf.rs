//! Small finite fields F_{p^r} in a fixed polynomial basis over the prime
//! field.
//!
//! Fields are deliberately tiny (desk scale): p and r are small enough that
//! exhaustive scans over the field are routine, and the element type just
//! holds coordinates in the basis 1, x, ..., x^{r-1} modulo a deterministic
//! irreducible.

use crate::error::{Error, Result};
use std::fmt;
use std::sync::Arc;

/// Context of a finite field F_{p^r} = F_p[x]/(modulus).
#[derive(Debug, PartialEq, Eq, Hash)]
pub struct Gf {
    p: u64,
    r: usize,
    /// Monic irreducible of degree r over F_p, low coefficients first
    /// (length r+1, top coefficient 1). The first such polynomial in
    /// lexicographic coefficient order, so the context is reproducible.
    modulus: Vec<u64>,
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

// --- dense F_p[x] helpers on raw coefficient vectors (low first) ---

fn fp_trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn fp_mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + ai * bj) % p;
        }
    }
    fp_trim(&mut out);
    out
}

/// Remainder of a modulo the monic polynomial m.
fn fp_rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    debug_assert_eq!(*m.last().unwrap(), 1);
    let mut a = a.to_vec();
    fp_trim(&mut a);
    let dm = m.len() - 1;
    while a.len() > dm {
        let lead = *a.last().unwrap();
        let shift = a.len() - 1 - dm;
        if lead != 0 {
            for (i, &mi) in m.iter().enumerate() {
                let idx = shift + i;
                a[idx] = (a[idx] + (p - 1) * lead % p * mi) % p;
            }
        }
        a.pop();
        fp_trim(&mut a);
    }
    a
}

fn fp_powmod(base: &[u64], mut e: u128, m: &[u64], p: u64) -> Vec<u64> {
    let mut result = vec![1u64];
    let mut b = fp_rem(base, m, p);
    while e > 0 {
        if e & 1 == 1 {
            result = fp_rem(&fp_mul(&result, &b, p), m, p);
        }
        b = fp_rem(&fp_mul(&b, &b, p), m, p);
        e >>= 1;
    }
    result
}

fn fp_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    fp_trim(&mut a);
    fp_trim(&mut b);
    while !b.is_empty() {
        // make b monic for fp_rem
        let lead = *b.last().unwrap();
        let inv = mod_inv(lead, p);
        let monic: Vec<u64> = b.iter().map(|&c| c * inv % p).collect();
        let r = fp_rem(&a, &monic, p);
        a = b;
        b = r;
    }
    a
}

fn mod_inv(a: u64, p: u64) -> u64 {
    // p prime, a != 0 mod p
    let mut result = 1u64;
    let mut base = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = result * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    result
}

fn prime_factors(mut n: usize) -> Vec<usize> {
    let mut out = vec![];
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Irreducibility over F_p: x^{p^r} = x mod f, and x^{p^{r/q}} - x coprime
/// to f for every prime q | r.
fn fp_is_irreducible(f: &[u64], p: u64) -> bool {
    let r = f.len() - 1;
    if r == 0 {
        return false;
    }
    let x = vec![0u64, 1];
    let q_r = (p as u128).pow(r as u32);
    let mut xqr = fp_powmod(&x, q_r, f, p);
    // x^{p^r} - x must be 0 mod f
    if xqr.len() < 2 {
        xqr.resize(2, 0);
    }
    xqr[1] = (xqr[1] + p - 1) % p;
    let diff = fp_rem(&xqr, f, p);
    if !diff.is_empty() {
        return false;
    }
    for q in prime_factors(r) {
        let e = (p as u128).pow((r / q) as u32);
        let mut g = fp_powmod(&x, e, f, p);
        if g.len() < 2 {
            g.resize(2, 0);
        }
        g[1] = (g[1] + p - 1) % p;
        fp_trim(&mut g);
        let d = fp_gcd(f, &g, p);
        if d.len() != 1 {
            return false;
        }
    }
    true
}

impl Gf {
    /// The field F_{p^r} with a deterministic defining polynomial.
    pub fn new(p: u64, r: usize) -> Result<Arc<Gf>> {
        if !is_prime(p) {
            return Err(Error::domain(format!("{p} is not prime")));
        }
        if r == 0 {
            return Err(Error::domain("extension degree must be >= 1"));
        }
        if (p as f64).powi(r as i32) > 2.0e9 {
            return Err(Error::domain(format!(
                "field F_{{{p}^{r}}} too large for exhaustive-scan arithmetic"
            )));
        }
        // lexicographically first monic irreducible of degree r
        let mut low = vec![0u64; r];
        loop {
            let mut f = low.clone();
            f.push(1);
            if fp_is_irreducible(&f, p) {
                return Ok(Arc::new(Gf { p, r, modulus: f }));
            }
            // increment base-p counter
            let mut i = 0;
            loop {
                if i == r {
                    return Err(Error::domain(format!(
                        "no irreducible of degree {r} over F_{p} (unreachable)"
                    )));
                }
                low[i] += 1;
                if low[i] < p {
                    break;
                }
                low[i] = 0;
                i += 1;
            }
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }
    pub fn r(&self) -> usize {
        self.r
    }
    pub fn order(&self) -> u64 {
        self.p.pow(self.r as u32)
    }
    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }
}

/// Element of a [`Gf`] context: coordinates in the polynomial basis.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GfEl {
    field: Arc<Gf>,
    c: Vec<u64>, // length r, entries in [0, p)
}

impl fmt::Debug for GfEl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GfEl{:?}", self.c)
    }
}

impl fmt::Display for GfEl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.field.r == 1 {
            write!(f, "{}", self.c[0])
        } else {
            write!(f, "{:?}", self.c)
        }
    }
}

impl GfEl {
    pub fn zero(field: &Arc<Gf>) -> GfEl {
        GfEl {
            field: field.clone(),
            c: vec![0; field.r],
        }
    }

    pub fn one(field: &Arc<Gf>) -> GfEl {
        GfEl::from_u64(field, 1)
    }

    pub fn from_u64(field: &Arc<Gf>, n: u64) -> GfEl {
        let mut c = vec![0; field.r];
        c[0] = n % field.p;
        GfEl {
            field: field.clone(),
            c,
        }
    }

    pub fn from_i64(field: &Arc<Gf>, n: i64) -> GfEl {
        let p = field.p as i64;
        GfEl::from_u64(field, (n.rem_euclid(p)) as u64)
    }

    /// Element with the given coordinates (low basis index first; short
    /// vectors are zero-padded).
    pub fn from_coords(field: &Arc<Gf>, coords: &[u64]) -> Result<GfEl> {
        if coords.len() > field.r {
            return Err(Error::usage(format!(
                "{} coordinates for extension degree {}",
                coords.len(),
                field.r
            )));
        }
        let mut c = vec![0; field.r];
        for (i, &x) in coords.iter().enumerate() {
            c[i] = x % field.p;
        }
        Ok(GfEl {
            field: field.clone(),
            c,
        })
    }

    /// The residue class of x, the generator of the polynomial basis.
    pub fn generator(field: &Arc<Gf>) -> GfEl {
        if field.r == 1 {
            return GfEl::one(field);
        }
        let mut c = vec![0; field.r];
        c[1] = 1;
        GfEl {
            field: field.clone(),
            c,
        }
    }

    pub fn field(&self) -> &Arc<Gf> {
        &self.field
    }

    pub fn coords(&self) -> &[u64] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|&x| x == 0)
    }

    pub fn is_one(&self) -> bool {
        self.c[0] == 1 && self.c[1..].iter().all(|&x| x == 0)
    }

    fn same_field(&self, other: &GfEl) {
        assert!(
            self.field.p == other.field.p && self.field.modulus == other.field.modulus,
            "mixed finite-field contexts"
        );
    }

    pub fn add(&self, other: &GfEl) -> GfEl {
        self.same_field(other);
        let p = self.field.p;
        let c = self
            .c
            .iter()
            .zip(&other.c)
            .map(|(a, b)| (a + b) % p)
            .collect();
        GfEl {
            field: self.field.clone(),
            c,
        }
    }

    pub fn neg(&self) -> GfEl {
        let p = self.field.p;
        let c = self.c.iter().map(|&a| (p - a) % p).collect();
        GfEl {
            field: self.field.clone(),
            c,
        }
    }

    pub fn sub(&self, other: &GfEl) -> GfEl {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &GfEl) -> GfEl {
        self.same_field(other);
        let p = self.field.p;
        let prod = fp_mul(&self.c, &other.c, p);
        let mut c = fp_rem(&prod, &self.field.modulus, p);
        c.resize(self.field.r, 0);
        GfEl {
            field: self.field.clone(),
            c,
        }
    }

    pub fn pow(&self, mut e: u128) -> GfEl {
        let mut result = GfEl::one(&self.field);
        let mut b = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&b);
            }
            b = b.mul(&b);
            e >>= 1;
        }
        result
    }

    pub fn inv(&self) -> Result<GfEl> {
        if self.is_zero() {
            return Err(Error::domain("division by zero in finite field"));
        }
        Ok(self.pow(self.field.order() as u128 - 2))
    }

    pub fn frobenius(&self) -> GfEl {
        self.pow(self.field.p as u128)
    }

    /// The unique p-th root (Frobenius is a bijection).
    pub fn pth_root(&self) -> GfEl {
        self.pow((self.field.p as u128).pow((self.field.r - 1) as u32))
    }

    /// Multiplicative order (0 is rejected).
    pub fn mult_order(&self) -> Result<u64> {
        if self.is_zero() {
            return Err(Error::domain("0 has no multiplicative order"));
        }
        let mut k = 1;
        let mut x = self.clone();
        while !x.is_one() {
            x = x.mul(self);
            k += 1;
        }
        Ok(k)
    }
}

/// All elements of the field in a fixed deterministic order
/// (base-p counter over coordinates).
pub fn all_elements(field: &Arc<Gf>) -> Vec<GfEl> {
    let mut out = Vec::with_capacity(field.order() as usize);
    let mut c = vec![0u64; field.r];
    loop {
        out.push(GfEl {
            field: field.clone(),
            c: c.clone(),
        });
        let mut i = 0;
        loop {
            if i == field.r {
                return out;
            }
            c[i] += 1;
            if c[i] < field.p {
                break;
            }
            c[i] = 0;
            i += 1;
        }
    }
}

/// Embedding F_{p^r} -> F_{p^{r'}} with r | r', determined by sending the
/// source generator to the first root of the source modulus in the target
/// (first in the deterministic element order).
pub fn embed(el: &GfEl, target: &Arc<Gf>) -> Result<GfEl> {
    let src = &el.field;
    if src.p != target.p {
        return Err(Error::domain("embedding between different characteristics"));
    }
    if target.r % src.r != 0 {
        return Err(Error::domain(format!(
            "no embedding F_{{p^{}}} -> F_{{p^{}}}",
            src.r, target.r
        )));
    }
    if src.modulus == target.modulus {
        return Ok(GfEl {
            field: target.clone(),
            c: el.c.clone(),
        });
    }
    let phi = embedding_image(src, target)?;
    // evaluate el's coordinate polynomial at phi
    let mut acc = GfEl::zero(target);
    for &coef in el.c.iter().rev() {
        acc = acc.mul(&phi).add(&GfEl::from_u64(target, coef));
    }
    Ok(acc)
}

fn embedding_image(src: &Arc<Gf>, target: &Arc<Gf>) -> Result<GfEl> {
    for cand in all_elements(target) {
        // evaluate src modulus at cand
        let mut acc = GfEl::zero(target);
        for &coef in src.modulus.iter().rev() {
            acc = acc.mul(&cand).add(&GfEl::from_u64(target, coef));
        }
        if acc.is_zero() {
            return Ok(cand);
        }
    }
    Err(Error::domain(
        "no root of source modulus in target field (degree mismatch?)",
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_arithmetic() {
        let f5 = Gf::new(5, 1).unwrap();
        let a = GfEl::from_u64(&f5, 3);
        let b = GfEl::from_u64(&f5, 4);
        assert_eq!(a.mul(&b), GfEl::from_u64(&f5, 2));
        assert_eq!(a.add(&b), GfEl::from_u64(&f5, 2));
        assert_eq!(a.inv().unwrap().mul(&a), GfEl::one(&f5));
        assert!(Gf::new(6, 1).is_err());
    }

    #[test]
    fn extension_field_axioms() {
        for (p, r) in [(3u64, 2usize), (5, 2), (3, 3), (7, 2)] {
            let f = Gf::new(p, r).unwrap();
            assert_eq!(f.order(), p.pow(r as u32));
            let els = all_elements(&f);
            assert_eq!(els.len(), f.order() as usize);
            // every nonzero element invertible; Frobenius bijective with p-th roots
            for e in els.iter().skip(1).step_by(7) {
                assert!(e.inv().unwrap().mul(e).is_one());
                assert_eq!(e.pth_root().pow(p as u128), *e);
            }
            // associativity spot checks
            let a = &els[1];
            let b = &els[els.len() / 2];
            let c = &els[els.len() - 1];
            assert_eq!(a.mul(b).mul(c), a.mul(&b.mul(c)));
            assert_eq!(a.add(b).add(c), a.add(&b.add(c)));
        }
    }

    #[test]
    fn embeddings_are_homomorphisms() {
        let f9 = Gf::new(3, 2).unwrap();
        let f81 = Gf::new(3, 4).unwrap();
        let els = all_elements(&f9);
        for a in els.iter().step_by(2) {
            for b in els.iter().step_by(3) {
                let ab = embed(&a.mul(b), &f81).unwrap();
                assert_eq!(ab, embed(a, &f81).unwrap().mul(&embed(b, &f81).unwrap()));
                let apb = embed(&a.add(b), &f81).unwrap();
                assert_eq!(apb, embed(a, &f81).unwrap().add(&embed(b, &f81).unwrap()));
            }
        }
    }
}
