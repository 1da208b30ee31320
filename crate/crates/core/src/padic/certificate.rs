//! Certificates that the roots of a family of polynomials in T^{-1} are
//! simple and pairwise distinct.
//!
//! This is a sufficient criterion, not a decision procedure: `Uncertified`
//! is a valid outcome and downgrades a lift verification to a bound.
//! Soundness comes from two classical facts. A hull segment whose residual
//! polynomial is separable has simple roots (each residual root lifts to
//! exactly one actual root), and a two-term polynomial over a field of
//! characteristic zero always has distinct roots. Across two polynomials,
//! roots can only collide on segments of equal slope, and then their
//! residual polynomials share a root, so coprime residuals certify
//! distinctness.

use crate::algebra::gf::GfEl;
use crate::algebra::poly::Poly;
use crate::error::{Error, Result};
use crate::padic::newton::NewtonPolygon;
use crate::padic::vlaurent::{ValCoeff, VLaurent};
use crate::rat::{rint, Rat};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Certificate {
    Certified,
    Uncertified { reason: String },
}

impl Certificate {
    pub fn is_certified(&self) -> bool {
        matches!(self, Certificate::Certified)
    }
}

struct PolyView {
    /// (exponent, valuation, residue) per nonzero coefficient.
    terms: Vec<(i64, Rat, Option<GfEl>)>,
    np: NewtonPolygon,
    /// Ramification index of the coefficient ring: its value group is
    /// (1/e) Z under v(p) = 1.
    e: i64,
}

fn view<C: ValCoeff>(f: &VLaurent<C>, e: i64) -> Result<PolyView> {
    f.check_normalized()
        .map_err(|err| Error::domain(format!("root certificate: {err}")))?;
    let mut terms = vec![];
    for (j, c) in f.terms() {
        if let Some((v, res)) = c.leading_residue()? {
            terms.push((*j, v, res));
        }
    }
    let np = NewtonPolygon::from_points(terms.iter().map(|(j, v, _)| (*j, *v)).collect())?;
    Ok(PolyView { terms, np, e })
}

/// Smallest positive integer d with d * slope in the value group (1/e) Z;
/// roots on the segment generate ramification of index divisible by d, and
/// the residual polynomial steps through exponents in multiples of d.
fn lattice_step(slope: Rat, e: i64) -> i64 {
    *(slope * rint(e)).denom()
}

/// Residual polynomial of the hull segment starting at vertex index k; None
/// when some contributing residue is unavailable.
fn residual(viewed: &PolyView, k: usize) -> Option<Poly> {
    let (x0, y0) = viewed.np.vertices[k];
    let (x1, _) = viewed.np.vertices[k + 1];
    let slope = viewed.np.segments[k].slope;
    let step = lattice_step(slope, viewed.e);
    let deg = ((x1 - x0) / step) as usize;
    let field = viewed
        .terms
        .iter()
        .find_map(|(_, _, r)| r.as_ref().map(|g| g.field().clone()))?;
    let mut coeffs = vec![GfEl::zero(&field); deg + 1];
    for (j, v, res) in &viewed.terms {
        if *j < x0 || *j > x1 {
            continue;
        }
        let on_line = y0 + slope * rint(*j - x0) == *v;
        if !on_line {
            continue;
        }
        if (*j - x0) % step != 0 {
            // a nonzero coefficient exactly on the hull line but off the
            // valuation lattice cannot happen: v - y0 = slope*(j - x0)
            // forces step | (j - x0)
            continue;
        }
        let idx = ((*j - x0) / step) as usize;
        match res {
            Some(r) => coeffs[idx] = r.clone(),
            None => return None,
        }
    }
    Some(Poly::from_coeffs(&field, coeffs))
}

fn segment_roots_simple(viewed: &PolyView, k: usize) -> Result<bool> {
    let seg = &viewed.np.segments[k];
    // totally ramified segment: lattice step equals the length, a single
    // Galois orbit of distinct conjugates
    if lattice_step(seg.slope, viewed.e) as u64 == seg.len {
        return Ok(true);
    }
    match residual(viewed, k) {
        Some(r) => {
            let d = r.derivative();
            if d.is_zero() {
                return Ok(false);
            }
            Ok(r.gcd(&d).degree() == Some(0))
        }
        None => Ok(false),
    }
}

/// Certify that every root (in the open unit disc) of every polynomial is
/// simple and that no two polynomials share a root. `e` is the ramification
/// index of the coefficient ring.
pub fn roots_simple_distinct_certificate<C: ValCoeff>(
    polys: &[&VLaurent<C>],
    e: i64,
) -> Result<Certificate> {
    let mut views = vec![];
    for f in polys {
        views.push(view(*f, e)?);
    }
    // within each polynomial
    for (i, v) in views.iter().enumerate() {
        // two-term polynomials have distinct roots over a characteristic-zero
        // field outright
        if v.terms.len() == 2 {
            continue;
        }
        for k in 0..v.np.segments.len() {
            if !segment_roots_simple(v, k)? {
                return Ok(Certificate::Uncertified {
                    reason: format!(
                        "polynomial {i}: cannot certify simple roots on segment of slope {}",
                        v.np.segments[k].slope
                    ),
                });
            }
        }
    }
    // across polynomials: equal slopes need coprime residuals
    for a in 0..views.len() {
        for b in (a + 1)..views.len() {
            for (ka, sa) in views[a].np.segments.iter().enumerate() {
                for (kb, sb) in views[b].np.segments.iter().enumerate() {
                    if sa.slope != sb.slope {
                        continue;
                    }
                    let ra = residual(&views[a], ka);
                    let rb = residual(&views[b], kb);
                    match (ra, rb) {
                        (Some(ra), Some(rb)) => {
                            if ra.gcd(&rb).degree() != Some(0) {
                                return Ok(Certificate::Uncertified {
                                    reason: format!(
                                        "shared roots possible between polynomials {a} and {b} at slope {}",
                                        sa.slope
                                    ),
                                });
                            }
                        }
                        _ => {
                            return Ok(Certificate::Uncertified {
                                reason: format!(
                                    "residues unavailable to separate polynomials {a} and {b} at slope {}",
                                    sa.slope
                                ),
                            })
                        }
                    }
                }
            }
        }
    }
    let _ = rint(0);
    Ok(Certificate::Certified)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::ring::{make_cyclotomic_ring, PadicElem};
    use crate::padic::vlaurent::exp_truncated;

    #[test]
    fn binomial_is_certified() {
        let c = make_cyclotomic_ring(3, 1, 18).unwrap();
        let f = VLaurent::from_terms(vec![
            (0, PadicElem::from_i128(&c.ring, 1)),
            (2, c.lambda.pow(3)),
        ]);
        assert!(roots_simple_distinct_certificate(&[&f], 2)
            .unwrap()
            .is_certified());
    }

    #[test]
    fn chain_pair_is_certified() {
        // H1 = 1 + lambda^p T^{-1}, H2 = exp_p(mu^p T^{-1}) for p = 3: root
        // valuations differ (3/2 vs 1/2), distinctness certified
        let c = make_cyclotomic_ring(3, 2, 72).unwrap();
        let one = PadicElem::from_i128(&c.ring, 1);
        let h1 = VLaurent::from_terms(vec![(0, one), (1, c.lambda.pow(3))]);
        let h2 = exp_truncated(
            &VLaurent::from_terms(vec![(1, c.mu.clone().unwrap().pow(3))]),
            &c.ring,
        )
        .unwrap();
        assert!(roots_simple_distinct_certificate(&[&h1, &h2], 6)
            .unwrap()
            .is_certified());
    }

    #[test]
    fn identical_polys_are_uncertified() {
        let c = make_cyclotomic_ring(3, 1, 18).unwrap();
        let f = VLaurent::from_terms(vec![
            (0, PadicElem::from_i128(&c.ring, 1)),
            (1, c.lambda.pow(3)),
        ]);
        let cert = roots_simple_distinct_certificate(&[&f, &f], 2).unwrap();
        assert!(!cert.is_certified());
    }
}
