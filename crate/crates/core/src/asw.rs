//! Artin-Schreier-Witt extensions of k((t)): normal forms, reduction modulo
//! the Artin-Schreier operator y -> y^p - y, and upper-jump computation.

use crate::algebra::gf::{embed, Gf, GfEl};
use crate::algebra::laurent::Laurent;
use crate::error::{Error, Result};
use crate::ramification::cyclic_different;
use std::sync::Arc;

/// Normal form of a Z/p^n-extension: x_1 = c t^{-j} with p not dividing j,
/// and each later coordinate a polynomial in t^{-1} with no exponent
/// divisible by p (in particular no constant term).
#[derive(Clone, Debug)]
pub struct WittNormalForm {
    field: Arc<Gf>,
    coords: Vec<Laurent>,
}

impl WittNormalForm {
    pub fn new(field: &Arc<Gf>, coords: Vec<Laurent>) -> Result<WittNormalForm> {
        let w = WittNormalForm {
            field: field.clone(),
            coords,
        };
        w.validate()?;
        Ok(w)
    }

    pub fn field(&self) -> &Arc<Gf> {
        &self.field
    }

    pub fn coords(&self) -> &[Laurent] {
        &self.coords
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        let p = self.field.p() as i64;
        if self.coords.is_empty() {
            return Err(Error::domain("empty Witt normal form"));
        }
        let x1 = &self.coords[0];
        if x1.num_terms() != 1 {
            return Err(Error::domain(
                "x_1 must be a single term c t^{-j}",
            ));
        }
        let (&e, _) = x1.terms().next().unwrap();
        if e >= 0 {
            return Err(Error::domain("x_1 must have negative exponent"));
        }
        let j = -e;
        if j % p == 0 {
            return Err(Error::domain(format!(
                "x_1 exponent j = {j} is divisible by p = {p}"
            )));
        }
        for (i, x) in self.coords.iter().enumerate().skip(1) {
            for (&e, _) in x.terms() {
                if e >= 0 {
                    return Err(Error::domain(format!(
                        "x_{} has a term of nonnegative exponent",
                        i + 1
                    )));
                }
                if (-e) % p == 0 {
                    return Err(Error::domain(format!(
                        "x_{} has an exponent divisible by p",
                        i + 1
                    )));
                }
            }
        }
        Ok(())
    }

    /// u_1 = deg x_1, u_i = max(deg x_i, p u_{i-1}).
    pub fn upper_jumps(&self) -> Result<Vec<i64>> {
        self.validate()?;
        let p = self.field.p() as i64;
        let mut jumps = vec![];
        let mut prev = 0i64;
        for (i, x) in self.coords.iter().enumerate() {
            let u = if i == 0 {
                x.deg_tinv().unwrap()
            } else {
                match x.deg_tinv() {
                    Some(d) => d.max(p * prev),
                    None => p * prev,
                }
            };
            jumps.push(u);
            prev = u;
        }
        Ok(jumps)
    }

    /// Degree of the different via the cyclic jump formula.
    pub fn different(&self) -> Result<u64> {
        let jumps = self.upper_jumps()?;
        cyclic_different(self.field.p(), &jumps)
    }
}

/// Result of reducing f against the image of y -> y^p - y.
#[derive(Clone, Debug)]
pub enum AswReduction {
    /// Standard form: only negative exponents, none divisible by p.
    Standard {
        standard: Laurent,
        witness: AswWitness,
    },
    /// f is in the image: the extension is trivial.
    Trivial { witness: AswWitness },
}

impl AswReduction {
    pub fn standard_part(&self) -> Option<&Laurent> {
        match self {
            AswReduction::Standard { standard, .. } => Some(standard),
            AswReduction::Trivial { .. } => None,
        }
    }

    pub fn witness(&self) -> &AswWitness {
        match self {
            AswReduction::Standard { witness, .. } => witness,
            AswReduction::Trivial { witness } => witness,
        }
    }
}

/// z with f - standard = z^p - z. The Laurent-polynomial part is exact; the
/// power-series part is carried modulo t^{series_cut} (beyond which the tail
/// is determined by the construction), and the constant part may need the
/// degree-p extension of the coefficient field.
#[derive(Clone, Debug)]
pub struct AswWitness {
    pub z: Laurent,
    pub series_cut: i64,
}

/// Verify f - g = z^p - z modulo t^{series_cut}.
pub fn check_witness(f: &Laurent, g: &Laurent, w: &AswWitness) -> Result<()> {
    let target_field = w.z.field().clone();
    let fe = f.embed(&target_field)?;
    let ge = g.embed(&target_field)?;
    let image = w.z.artin_schreier_image();
    let diff = fe.sub(&ge).sub(&image);
    for (&e, _) in diff.terms() {
        if e < w.series_cut {
            return Err(Error::domain(format!(
                "witness check failed at exponent {e}"
            )));
        }
    }
    Ok(())
}

/// Reduce f to the standard Artin-Schreier shape: delete the nonnegative
/// part (always absorbable over algebraically closed ground data, realized
/// here over a finite extension), then repeatedly replace c t^{-pa} by
/// c^{1/p} t^{-a}.
pub fn reduce_artin_schreier(f: &Laurent) -> Result<AswReduction> {
    let field = f.field().clone();
    let p = field.p() as i64;

    // constant term may need a degree-p extension for its AS-root
    let c0 = f.coeff(0);
    let (witness_field, c0_root) = artin_schreier_root_of_constant(&c0)?;

    let mut cur = f.embed(&witness_field)?;
    let mut z = Laurent::zero(&witness_field);

    // series part: delete exponents > 0 with witness -(s + s^p + s^{p^2} + ...)
    let (nonneg, _) = cur.split_nonneg();
    let mut spos = nonneg.clone();
    let c0e = embed(&c0, &witness_field)?;
    spos.add_term(0, &c0e.neg()); // strictly positive part
    let max_deg = spos.max_exp().unwrap_or(0).max(1);
    let series_cut = p * (max_deg + 1);
    if !spos.is_zero() {
        let mut frob = spos.clone();
        let mut acc = Laurent::zero(&witness_field);
        while frob.min_exp().map(|e| e < series_cut).unwrap_or(false) {
            acc = acc.add(&frob);
            frob = frob.frobenius();
        }
        z = z.add(&acc.neg());
    }
    z = z.add(&Laurent::term(c0_root, 0));
    cur = cur.sub(&nonneg);

    // peel exponents divisible by p
    loop {
        let mut found = None;
        for (&e, c) in cur.terms() {
            if e < 0 && (-e) % p == 0 {
                found = Some((e, c.clone()));
                break;
            }
        }
        match found {
            None => break,
            Some((e, c)) => {
                let root = c.pth_root();
                let piece = Laurent::term(root, e / p);
                // psi(piece) = c t^{e} - root t^{e/p}
                cur = cur.sub(&piece.artin_schreier_image());
                z = z.add(&piece);
            }
        }
    }

    let witness = AswWitness { z, series_cut };
    if cur.is_zero() {
        Ok(AswReduction::Trivial { witness })
    } else {
        // map back to the base field when no extension was actually needed
        let standard = if witness_field.r() == field.r() {
            Laurent::from_terms(
                &field,
                cur.terms()
                    .map(|(&e, c)| {
                        (
                            e,
                            GfEl::from_coords(&field, &c.coords()[..field.r()]).unwrap(),
                        )
                    })
                    .collect(),
            )
        } else {
            // negative-exponent coefficients never leave the base field:
            // reconstruct them there
            let mut terms = vec![];
            for (&e, c) in cur.terms() {
                terms.push((e, shrink_to_base(c, &field)?));
            }
            Laurent::from_terms(&field, terms)
        };
        Ok(AswReduction::Standard { standard, witness })
    }
}

/// Solve y^p - y = c by F_p-linear algebra (the map is additive and
/// F_p-linear on the field), extending the field by degree p when the
/// equation has no solution in the base.
fn artin_schreier_root_of_constant(c: &GfEl) -> Result<(Arc<Gf>, GfEl)> {
    let field = c.field().clone();
    if let Some(root) = solve_frobenius_minus_id(c) {
        return Ok((field, root));
    }
    let big = Gf::new(field.p(), field.r() * field.p() as usize)?;
    let ce = embed(c, &big)?;
    match solve_frobenius_minus_id(&ce) {
        Some(root) => Ok((big, root)),
        None => Err(Error::domain(
            "no Artin-Schreier root in the degree-p extension (unreachable)",
        )),
    }
}

/// Solve (F - id)(y) = c over F_{p^r} viewed as an F_p-vector space.
fn solve_frobenius_minus_id(c: &GfEl) -> Option<GfEl> {
    let field = c.field().clone();
    let p = field.p();
    let r = field.r();
    // columns: coordinates of basis_i^p - basis_i
    let mut mat = vec![vec![0u64; r + 1]; r];
    for i in 0..r {
        let mut coords = vec![0u64; r];
        coords[i] = 1;
        let e = GfEl::from_coords(&field, &coords).unwrap();
        let im = e.pow(p as u128).sub(&e);
        for (row, &x) in im.coords().iter().enumerate() {
            mat[row][i] = x;
        }
    }
    for (row, &x) in c.coords().iter().enumerate() {
        mat[row][r] = x;
    }
    // Gaussian elimination over F_p
    let inv = |a: u64| -> u64 {
        let mut acc = 1u64;
        let mut b = a % p;
        let mut e = p - 2;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * b % p;
            }
            b = b * b % p;
            e >>= 1;
        }
        acc
    };
    let mut pivots = vec![];
    let mut row = 0;
    for col in 0..r {
        let piv = (row..r).find(|&i| mat[i][col] % p != 0);
        let Some(piv) = piv else { continue };
        mat.swap(row, piv);
        let s = inv(mat[row][col]);
        for x in mat[row].iter_mut() {
            *x = *x * s % p;
        }
        for i in 0..r {
            if i != row && mat[i][col] % p != 0 {
                let f = mat[i][col] % p;
                for k in 0..=r {
                    mat[i][k] = (mat[i][k] + (p - f) * mat[row][k]) % p;
                }
            }
        }
        pivots.push((row, col));
        row += 1;
    }
    // consistency
    for i in row..r {
        if mat[i][r] % p != 0 {
            return None;
        }
    }
    let mut sol = vec![0u64; r];
    for &(rw, col) in &pivots {
        sol[col] = mat[rw][r] % p;
    }
    GfEl::from_coords(&field, &sol).ok()
}

/// Express an element of an extension that actually lies in the base field.
fn shrink_to_base(c: &GfEl, base: &Arc<Gf>) -> Result<GfEl> {
    for cand in crate::algebra::gf::all_elements(base) {
        if embed(&cand, c.field())? == *c {
            return Ok(cand);
        }
    }
    Err(Error::domain(
        "reduced coefficient left the base field (unreachable for valid input)",
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laurent(field: &Arc<Gf>, terms: &[(i64, i64)]) -> Laurent {
        Laurent::from_terms(
            field,
            terms
                .iter()
                .map(|&(e, c)| (e, GfEl::from_i64(field, c)))
                .collect(),
        )
    }

    #[test]
    fn already_standard() {
        let f5 = Gf::new(5, 1).unwrap();
        let f = laurent(&f5, &[(-3, 1)]);
        match reduce_artin_schreier(&f).unwrap() {
            AswReduction::Standard { standard, witness } => {
                assert_eq!(standard, f);
                check_witness(&f, &standard, &witness).unwrap();
            }
            _ => panic!("expected standard"),
        }
    }

    #[test]
    fn peeling_p_powers() {
        // t^{-9} over F_3 reduces to t^{-1} in two steps
        let f3 = Gf::new(3, 1).unwrap();
        let f = laurent(&f3, &[(-9, 1)]);
        match reduce_artin_schreier(&f).unwrap() {
            AswReduction::Standard { standard, witness } => {
                assert_eq!(standard, laurent(&f3, &[(-1, 1)]));
                check_witness(&f, &standard, &witness).unwrap();
            }
            _ => panic!("expected standard"),
        }
    }

    #[test]
    fn nonnegative_part_is_trivial() {
        let f3 = Gf::new(3, 1).unwrap();
        let f = laurent(&f3, &[(0, 1), (2, 1)]);
        match reduce_artin_schreier(&f).unwrap() {
            AswReduction::Trivial { witness } => {
                let zero = Laurent::zero(&f3);
                check_witness(&f, &zero, &witness).unwrap();
            }
            _ => panic!("expected trivial"),
        }
    }

    #[test]
    fn jumps_of_normal_forms() {
        let f3 = Gf::new(3, 1).unwrap();
        // (t^{-1}, 0): jumps (1, p)
        let w = WittNormalForm::new(
            &f3,
            vec![laurent(&f3, &[(-1, 1)]), Laurent::zero(&f3)],
        )
        .unwrap();
        assert_eq!(w.upper_jumps().unwrap(), vec![1, 3]);
        assert_eq!(w.different().unwrap(), 28);
        // x_1 = t^{-3} is invalid over F_3
        assert!(WittNormalForm::new(&f3, vec![laurent(&f3, &[(-3, 1)])]).is_err());
        // (t^{-1}, t^{-7}) over F_5: jumps (1, 7)
        let f5 = Gf::new(5, 1).unwrap();
        let w5 = WittNormalForm::new(
            &f5,
            vec![laurent(&f5, &[(-1, 1)]), laurent(&f5, &[(-7, 1)])],
        )
        .unwrap();
        assert_eq!(w5.upper_jumps().unwrap(), vec![1, 7]);
        // single coordinate: (t^{-2}) over F_3 has different 6
        let w1 = WittNormalForm::new(&f3, vec![laurent(&f3, &[(-2, 1)])]).unwrap();
        assert_eq!(w1.different().unwrap(), 6);
    }

    #[test]
    fn jump_constraints_hold() {
        let f3 = Gf::new(3, 1).unwrap();
        let w = WittNormalForm::new(
            &f3,
            vec![
                laurent(&f3, &[(-2, 1)]),
                laurent(&f3, &[(-7, 2)]),
                Laurent::zero(&f3),
            ],
        )
        .unwrap();
        let jumps = w.upper_jumps().unwrap();
        let p = 3i64;
        for i in 1..jumps.len() {
            assert!(jumps[i] >= p * jumps[i - 1]);
            if jumps[i] > p * jumps[i - 1] {
                assert_ne!(jumps[i] % p, 0);
            }
        }
    }
}
