//! Explicit cyclic lifts in Kummer-chain form, branch-point counting over
//! the open unit disc, the different criterion, the jump-window lifting
//! predicate, and depth of degree-p covers along disc radii.

use crate::error::{Error, Result};
use crate::padic::certificate::{roots_simple_distinct_certificate, Certificate};
use crate::padic::newton::NewtonPolygon;
use crate::padic::puiseux::Puiseux;
use crate::padic::ring::{make_cyclotomic_ring, CyclotomicRing, PadicElem};
use crate::padic::vlaurent::{exp_truncated, VLaurent};
use crate::rat::{rat, rint, Rat};
use crate::ramification::cyclic_different;

/// Equations Z_1^p = H_1(T^{-1}), Z_i^p = Z_{i-1} H_i(T^{-1}) over a
/// cyclotomic Eisenstein ring, each H_i normalized with unit constant term.
pub struct KummerChain {
    pub p: u64,
    pub n: u32,
    pub cyc: CyclotomicRing,
    pub hs: Vec<VLaurent<PadicElem>>,
}

impl KummerChain {
    pub fn validate(&self) -> Result<()> {
        if self.hs.len() != self.n as usize {
            return Err(Error::domain("chain length does not match n"));
        }
        for h in &self.hs {
            h.check_normalized()?;
        }
        Ok(())
    }
}

/// Z^p = 1 + lambda^p T^{-u1} over Z_p[zeta_p].
pub fn build_zp_lift(p: u64, u1: i64, prec: Option<i64>) -> Result<KummerChain> {
    if u1 < 1 {
        return Err(Error::domain("u1 must be >= 1"));
    }
    if u1 % p as i64 == 0 {
        return Err(Error::domain("u1 must be prime to p"));
    }
    let prec = prec.unwrap_or_else(|| crate::padic::ring::default_precision(p, 1));
    let cyc = make_cyclotomic_ring(p, 1, prec)?;
    let one = PadicElem::from_i128(&cyc.ring, 1);
    let h1 = VLaurent::from_terms(vec![(0, one), (u1, cyc.lambda.pow(p as u32))]);
    Ok(KummerChain {
        p,
        n: 1,
        cyc,
        hs: vec![h1],
    })
}

/// Z_1^p = 1 + lambda^p T^{-u1}, Z_2^p = Z_1 exp_p(mu^p T^{-u1}) over
/// Z_p[zeta_{p^2}]; the special fiber has jumps (u1, p u1).
pub fn build_zp2_lift(p: u64, u1: i64, prec: Option<i64>) -> Result<KummerChain> {
    if u1 < 1 {
        return Err(Error::domain("u1 must be >= 1"));
    }
    if u1 % p as i64 == 0 {
        return Err(Error::domain("u1 must be prime to p"));
    }
    let prec = prec.unwrap_or_else(|| crate::padic::ring::default_precision(p, 2));
    let cyc = make_cyclotomic_ring(p, 2, prec)?;
    let one = PadicElem::from_i128(&cyc.ring, 1);
    let h1 = VLaurent::from_terms(vec![(0, one), (u1, cyc.lambda.pow(p as u32))]);
    let mu = cyc.mu.clone().expect("level 2 ring has mu");
    let h2 = exp_truncated(
        &VLaurent::from_terms(vec![(u1, mu.pow(p as u32))]),
        &cyc.ring,
    )?;
    Ok(KummerChain {
        p,
        n: 2,
        cyc,
        hs: vec![h1, h2],
    })
}

/// One class of branch points of the generic fiber: `disc_points` points of
/// the open unit disc with the given T-valuation (None marks the pole
/// T = 0), all of ramification index `ram_index`; above each lie
/// `cover_mult` = |G| / ram_index points of the cover.
#[derive(Clone, Debug)]
pub struct BranchRow {
    pub valuation: Option<Rat>,
    pub disc_points: u64,
    pub ram_index: u64,
    pub cover_mult: u64,
}

impl BranchRow {
    pub fn different_contribution(&self) -> u64 {
        self.disc_points * self.cover_mult * (self.ram_index - 1)
    }
}

#[derive(Clone, Debug)]
pub struct GenericDifferent {
    pub delta_eta: u64,
    /// Exact when the simplicity/distinctness certificate held; otherwise
    /// `delta_eta` is only an upper bound.
    pub exact: bool,
    pub certificate: Certificate,
    pub table: Vec<BranchRow>,
}

/// Count the branch points of the generic fiber of a chain: the zeros of
/// each H_i in the open unit disc get branching index p^{n-i+1} (minimal
/// index wins when zeros could coincide), and the pole T = 0 gets p^n.
pub fn generic_different(chain: &KummerChain) -> Result<GenericDifferent> {
    chain.validate()?;
    let p = chain.p;
    let n = chain.n;
    let group_order = p.pow(n);
    let refs: Vec<&VLaurent<PadicElem>> = chain.hs.iter().collect();
    let certificate = roots_simple_distinct_certificate(&refs, chain.cyc.ring.e() as i64)?;
    let mut table = vec![BranchRow {
        valuation: None,
        disc_points: 1,
        ram_index: group_order,
        cover_mult: 1,
    }];
    for (idx, h) in chain.hs.iter().enumerate() {
        let i = idx as u32 + 1;
        let ram_index = p.pow(n - i + 1);
        let cover_mult = group_order / ram_index;
        if h.deg_tinv() == Some(0) {
            continue; // constant factor: no zeros
        }
        let np = NewtonPolygon::from_points(h.np_points()?)?;
        for seg in &np.segments {
            if seg.slope <= rint(0) {
                return Err(Error::domain(
                    "normalized chain factor with a zero outside the open disc",
                ));
            }
            table.push(BranchRow {
                valuation: Some(seg.slope),
                disc_points: seg.len,
                ram_index,
                cover_mult,
            });
        }
    }
    let delta_eta = table.iter().map(|r| r.different_contribution()).sum();
    Ok(GenericDifferent {
        delta_eta,
        exact: certificate.is_certified(),
        certificate,
        table,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LiftStatus {
    LiftCertified,
    BoundOnly,
    NotALift,
}

impl LiftStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            LiftStatus::LiftCertified => "lift-certified",
            LiftStatus::BoundOnly => "bound-only",
            LiftStatus::NotALift => "not-a-lift",
        }
    }
}

#[derive(Clone, Debug)]
pub struct DifferentCertificate {
    pub delta_eta: u64,
    pub delta_s: u64,
    pub status: LiftStatus,
    pub table: Vec<BranchRow>,
}

/// Validate the jump constraints u_i >= p u_{i-1} (with p not dividing u_i
/// when strict) and u_1 >= 1 prime to p.
pub fn validate_jumps(p: u64, jumps: &[i64]) -> Result<()> {
    if jumps.is_empty() {
        return Err(Error::domain("empty jump tuple"));
    }
    let pi = p as i64;
    let mut prev = 0i64;
    for (i, &u) in jumps.iter().enumerate() {
        if u <= prev {
            return Err(Error::domain("jumps must strictly increase"));
        }
        if i == 0 {
            if u < 1 || u % pi == 0 {
                return Err(Error::domain("u_1 must be >= 1 and prime to p"));
            }
        } else {
            if u < pi * prev {
                return Err(Error::domain("jumps must satisfy u_i >= p u_{i-1}"));
            }
            if u > pi * prev && u % pi == 0 {
                return Err(Error::domain(
                    "a strict jump u_i > p u_{i-1} must be prime to p",
                ));
            }
        }
        prev = u;
    }
    Ok(())
}

/// The different criterion: the chain is a lift of the extension with the
/// given special-fiber upper jumps iff delta_eta = delta_s, provided the
/// branch count was exact.
pub fn different_criterion(chain: &KummerChain, jumps: &[i64]) -> Result<DifferentCertificate> {
    validate_jumps(chain.p, jumps)?;
    if jumps.len() != chain.n as usize {
        return Err(Error::domain("jump tuple length differs from chain length"));
    }
    let delta_s = cyclic_different(chain.p, jumps)?;
    let gd = generic_different(chain)?;
    let status = if gd.delta_eta < delta_s {
        // even an upper bound below delta_s rules the lift out
        LiftStatus::NotALift
    } else if !gd.exact {
        LiftStatus::BoundOnly
    } else if gd.delta_eta == delta_s {
        LiftStatus::LiftCertified
    } else {
        LiftStatus::NotALift
    };
    Ok(DifferentCertificate {
        delta_eta: gd.delta_eta,
        delta_s,
        status,
        table: gd.table,
    })
}

/// Certify that substituting Z = 1 + lambda Y into Z^p = 1 + lambda^p
/// T^{-u} and dividing by lambda^p reduces to y^p - y = t^{-u} modulo the
/// maximal ideal: the Y-coefficient C(p,1) lambda^{1-p} has residue -1 and
/// the middle coefficients C(p,i) lambda^{i-p} have positive valuation.
pub fn verify_zp_reduction(cyc: &CyclotomicRing) -> Result<()> {
    let p = cyc.p;
    let ring = &cyc.ring;
    let lam_p = cyc.lambda.pow(p as u32);
    let mut binom: i128 = 1;
    for i in 1..p {
        binom = binom * (p - i + 1) as i128 / i as i128;
        let coeff = cyc.lambda.pow(i as u32).mul_i128(binom).div(&lam_p)?;
        if i == 1 {
            let shifted = coeff.add(&PadicElem::from_i128(ring, 1));
            match shifted.val_digits() {
                Some(v) if v > 0 => {}
                None => {}
                _ => return Err(Error::domain("linear coefficient does not reduce to -1")),
            }
        } else {
            match coeff.val_digits() {
                Some(v) if v > 0 => {}
                None => {}
                _ => {
                    return Err(Error::domain(format!(
                        "coefficient of Y^{i} is not in the maximal ideal"
                    )))
                }
            }
        }
    }
    Ok(())
}

/// The explicit dihedral lift check: the special fiber has different
/// 3p - 2, and the generic fiber is branched at T = (lambda^p/2)^2 (both
/// order-p points of the inner cover land there, index p) and at T = 0
/// (index 2).
pub fn dihedral_example_check(p: u64) -> Result<DifferentCertificate> {
    if p < 3 || !is_prime_u64(p) {
        return Err(Error::domain("dihedral example requires an odd prime p"));
    }
    let prec = crate::padic::ring::default_precision(p, 1);
    let cyc = make_cyclotomic_ring(p, 1, prec)?;
    let ring = &cyc.ring;
    let lam_p = cyc.lambda.pow(p as u32);
    let half = PadicElem::from_i128(ring, 2).inv()?;
    let c = lam_p.mul(&half); // lambda^p / 2

    // X-coordinates of the order-p branch points: X = 0 and X = -lambda^p
    let t_of = |x: &PadicElem| -> PadicElem {
        let s = x.add(&c);
        s.mul(&s)
    };
    let t0 = t_of(&PadicElem::zero(ring));
    let t1 = t_of(&lam_p.neg());
    if !t0.certified_eq(&t1) {
        return Err(Error::domain(
            "the two order-p branch points do not share a T-image",
        ));
    }
    let v_t0 = t0
        .val()?
        .ok_or_else(|| Error::domain("degenerate branch point at T = 0"))?;
    if v_t0 <= rint(0) {
        return Err(Error::domain("branch point outside the open unit disc"));
    }
    // at the double-cover branch X = -lambda^p/2 the Kummer value is
    // 1 + lambda^p X^{-1} = -1, i.e. 2 X = -lambda^p exactly; a unit value
    // means no order-p branching above T = 0
    if !c.mul_i128(2).sub(&lam_p).is_certified_zero() {
        return Err(Error::domain(
            "Kummer value at the tame branch point is not -1",
        ));
    }

    // special fiber: D_p filtration with lower jump 1
    let filt = crate::ramification::RamFiltration::new(
        crate::ramification::Numbering::Lower,
        2 * p,
        vec![(rint(0), p), (rint(1), 1)],
    )?;
    let delta_s = crate::ramification::different_from_lower(&filt)?;

    let table = vec![
        BranchRow {
            valuation: Some(v_t0),
            disc_points: 1,
            ram_index: p,
            cover_mult: 2,
        },
        BranchRow {
            valuation: None,
            disc_points: 1,
            ram_index: 2,
            cover_mult: p,
        },
    ];
    let delta_eta: u64 = table.iter().map(|r| r.different_contribution()).sum();
    let status = if delta_eta == delta_s {
        LiftStatus::LiftCertified
    } else {
        LiftStatus::NotALift
    };
    Ok(DifferentCertificate {
        delta_eta,
        delta_s,
        status,
        table,
    })
}

fn is_prime_u64(p: u64) -> bool {
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

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OortVerdict {
    pub holds: bool,
    /// (index i, witnessing multiple of p) when the condition fails.
    pub failure: Option<(usize, i64)>,
}

/// The jump-window condition of the cyclic lifting theorem: for each i with
/// 3 <= i <= n-1, no a in pZ may satisfy
/// u_i - p u_{i-1} < a <= (u_i - p u_{i-1}) u_i / (u_i - u_{i-1}).
pub fn oort_condition(p: u64, jumps: &[i64]) -> Result<OortVerdict> {
    validate_jumps(p, jumps)?;
    let n = jumps.len();
    let pi = p as i64;
    for i in 3..n {
        // math index i runs over 3..=n-1; jumps are 0-based
        let ui = jumps[i - 1];
        let uprev = jumps[i - 2];
        let low = ui - pi * uprev;
        if low < 0 {
            continue;
        }
        let upper = rat(low, 1) * rat(ui, ui - uprev);
        // smallest multiple of p strictly greater than low
        let a0 = (low / pi + 1) * pi;
        if rint(a0) <= upper {
            return Ok(OortVerdict {
                holds: false,
                failure: Some((i, a0)),
            });
        }
    }
    Ok(OortVerdict {
        holds: true,
        failure: None,
    })
}

// ---------------------------------------------------------------------------
// depth of y^p = f on discs of radius r
// ---------------------------------------------------------------------------

/// Leading-order state for the depth computation. Monomial collisions at
/// the same (exponent, valuation) slot make deeper digits unknowable from
/// leading-order data; they taint every conclusion at or above their Gauss
/// level.
struct DepthState {
    f: VLaurent<Puiseux>,
    taint_level: Option<Rat>,
    r: Rat,
    cap: Rat,
    /// Gauss level beyond which monomials are dropped; cap plus the
    /// positive part of the initial minimum level, so that pre-normalization
    /// terms that matter after the shift survive.
    drop: Rat,
}

type Mono = (i64, Rat, crate::algebra::gf::GfEl);

impl DepthState {
    fn level(&self, j: i64, v: Rat) -> Rat {
        v - rint(j) * self.r
    }

    fn monomials(src: &VLaurent<Puiseux>) -> Vec<Mono> {
        let mut out = vec![];
        for (j, c) in src.terms() {
            for (v, res) in c.terms() {
                out.push((*j, *v, res.clone()));
            }
        }
        out
    }

    fn add_monomial(
        &mut self,
        dst: &mut VLaurent<Puiseux>,
        j: i64,
        v: Rat,
        res: &crate::algebra::gf::GfEl,
    ) {
        if res.is_zero() {
            return;
        }
        let lvl = self.level(j, v);
        if lvl >= self.drop {
            return;
        }
        // leading residues of same-slot sums are exact; only annihilation
        // pushes the true value to an unknown higher level
        if let Some(c) = dst.coeff(j) {
            if let Some((_, old)) = c.terms().find(|(pv, _)| **pv == v) {
                if old.add(res).is_zero() {
                    let t = self.taint_level.map(|t| t.min(lvl)).unwrap_or(lvl);
                    self.taint_level = Some(t);
                }
            }
        }
        let mono = Puiseux::monomial(v, res.clone());
        dst.add_term(j, mono);
    }

    fn add_poly(&mut self, dst: &mut VLaurent<Puiseux>, src: &VLaurent<Puiseux>) {
        for (j, v, res) in Self::monomials(src) {
            self.add_monomial(dst, j, v, &res);
        }
    }

    fn mul_polys(&mut self, a: &VLaurent<Puiseux>, b: &VLaurent<Puiseux>) -> VLaurent<Puiseux> {
        let mut out = VLaurent::new();
        let av = Self::monomials(a);
        let bv = Self::monomials(b);
        for (j1, v1, r1) in &av {
            for (j2, v2, r2) in &bv {
                self.add_monomial(&mut out, j1 + j2, *v1 + *v2, &r1.mul(r2));
            }
        }
        out
    }
}

/// Depth of the Z/p-cover y^p = f restricted to the closed disc of radius
/// r (Gauss valuation v(T) = r): max(0, p/(p-1) - w*) where w* is the
/// capped supremum over Laurent adjustments g of the Gauss valuation of
/// f g^{-p} - 1. Depth 0 means separable (etale) reduction, p/(p-1) means
/// multiplicative reduction.
pub fn zp_depth(p: u64, f: &VLaurent<Puiseux>, r: Rat) -> Result<Rat> {
    if r < rint(0) {
        return Err(Error::domain("radius must be >= 0"));
    }
    let cap = rat(p as i64, p as i64 - 1);
    let field = f
        .terms()
        .next()
        .and_then(|(_, c)| c.leading().map(|(_, res)| res.field().clone()))
        .ok_or_else(|| Error::domain("depth of the zero function"))?;
    if field.p() != p {
        return Err(Error::usage("residue characteristic does not match p"));
    }
    let initial_min = {
        let mut best: Option<Rat> = None;
        for (j, c) in f.terms() {
            if let Some(v) = Puiseux::val(c) {
                let lvl = v - rint(*j) * r;
                if best.map(|b| lvl < b).unwrap_or(true) {
                    best = Some(lvl);
                }
            }
        }
        best.ok_or_else(|| Error::domain("depth of the zero function"))?
    };
    let drop = cap + if initial_min > rint(0) { initial_min } else { rint(0) };
    let mut st = DepthState {
        f: f.clone(),
        taint_level: None,
        r,
        cap,
        drop,
    };

    // normalize the dominant level to the constant 1: the level residue
    // polynomial must be a p-th power of a Laurent polynomial, which over a
    // perfect residue field means every exponent is divisible by p
    loop {
        let mins = st.f.min_terms_at_radius(r);
        if mins.is_empty() {
            return Err(Error::domain("f vanishes identically at this radius"));
        }
        if mins.iter().any(|(j, _, _)| j % p as i64 != 0) {
            // the dominant residue is not a p-th power in k((u)):
            // multiplicative reduction, w* = 0
            return Ok(cap);
        }
        if mins.len() == 1 {
            let (j0, v0, res0) = mins[0].clone();
            // scale f by res0^{-1} Pi^{-v0} T^{j0}: exact per-monomial shift
            let inv_mono = Puiseux::monomial(-v0, res0.inv()?);
            let mut scaled = VLaurent::new();
            let terms: Vec<(i64, Puiseux)> =
                st.f.terms().map(|(j, c)| (*j, c.clone())).collect();
            for (j, c) in terms {
                scaled.add_term(j - j0, c.mul(&inv_mono));
            }
            st.f = scaled.truncate_at_radius(r, drop);
            if j0 == 0 {
                break;
            }
            continue;
        }
        // multi-term dominant residue, all exponents divisible by p:
        // divide by (sum of p-th roots)^p; the leading cancellations are
        // real, and the taint tracker accounts for the unknown leftovers
        let roots: Vec<Mono> = mins
            .iter()
            .map(|(j, v, res)| (*j / p as i64, *v / rint(p as i64), res.pth_root()))
            .collect();
        let mut bp = VLaurent::new();
        expand_power(&mut st, &roots, p, &mut bp);
        // (b^p)^{-1} = lead^{-1} sum (1 - bp/lead)^k around its leading term
        let lead = {
            let ms = bp.min_terms_at_radius(r);
            if ms.len() != 1 {
                return Err(Error::precision(
                    "depth not determined by leading-order data (degenerate dominant block)",
                ));
            }
            ms[0].clone()
        };
        let inv_lead = Puiseux::monomial(-lead.1, lead.2.inv()?);
        let mut shifted = VLaurent::new();
        for (j, c) in bp.terms() {
            shifted.add_term(j - lead.0, c.mul(&inv_lead));
        }
        // shifted = 1 + h with h of positive level
        let mut h = VLaurent::new();
        let one_model = Puiseux::one(&field);
        for (j, c) in shifted.terms() {
            if *j == 0 {
                h.add_term(0, c.sub(&one_model));
            } else {
                h.add_term(*j, c.clone());
            }
        }
        let mut inv_shifted = VLaurent::from_terms(vec![(0, one_model.clone())]);
        let mut pw = VLaurent::from_terms(vec![(0, one_model.clone())]);
        let neg_h = h.neg();
        loop {
            pw = st.mul_polys(&pw, &neg_h).truncate_at_radius(r, st.drop);
            if pw.is_zero() {
                break;
            }
            let snap = pw.clone();
            st.add_poly(&mut inv_shifted, &snap);
        }
        // f <- f * inv_lead-shift * inv_shifted
        let mut fshift = VLaurent::new();
        let terms: Vec<(i64, Puiseux)> = st.f.terms().map(|(j, c)| (*j, c.clone())).collect();
        for (j, c) in terms {
            fshift.add_term(j - lead.0, c.mul(&inv_lead));
        }
        st.f = st
            .mul_polys(&fshift, &inv_shifted)
            .truncate_at_radius(r, st.drop);
        break;
    }

    // main peeling loop on m = f - 1
    let one = Puiseux::one(&field);
    let max_iters = 4096;
    for _ in 0..max_iters {
        let mut m = VLaurent::new();
        for (j, c) in st.f.terms() {
            if *j == 0 {
                m.add_term(0, c.sub(&one));
            } else {
                m.add_term(*j, c.clone());
            }
        }
        // minimum Gauss level among m's monomials
        let mut min_lvl: Option<Rat> = None;
        let mut at_min: Vec<Mono> = vec![];
        for (j, v, res) in DepthState::monomials(&m) {
            let lvl = st.level(j, v);
            match min_lvl {
                None => {
                    min_lvl = Some(lvl);
                    at_min = vec![(j, v, res)];
                }
                Some(b) if lvl < b => {
                    min_lvl = Some(lvl);
                    at_min = vec![(j, v, res)];
                }
                Some(b) if lvl == b => at_min.push((j, v, res)),
                _ => {}
            }
        }
        let decide_etale = match min_lvl {
            None => true,
            Some(w) => w >= st.cap,
        };
        if decide_etale {
            if let Some(t) = st.taint_level {
                if t < st.cap {
                    return Err(Error::precision(
                        "depth not determined by leading-order data (monomial collision below the cap)",
                    ));
                }
            }
            return Ok(rint(0));
        }
        let w = min_lvl.unwrap();
        if let Some(t) = st.taint_level {
            if t <= w {
                return Err(Error::precision(
                    "depth not determined by leading-order data (monomial collision at the decision level)",
                ));
            }
        }
        // immovable term at the minimum: exponent prime to p
        if at_min.iter().any(|(j, _, _)| j % p as i64 != 0) {
            return Ok(st.cap - w);
        }
        // all minimal monomials absorbable: peel them at once. G - 1 for
        // G = (1 + sum b_s)^p is expanded with explicit characteristic-zero
        // multinomial coefficients, each converted to its base-p digit
        // monomials (the model residues live in characteristic p, so
        // repeated model multiplication would drop the p b_s cross terms).
        // The pure b_s^p block reproduces the peeled monomials exactly, so
        // f - G is computed with both removed structurally instead of
        // through a spuriously tainting cancellation.
        let roots: Vec<Mono> = at_min
            .iter()
            .map(|(j, v, res)| (*j / p as i64, *v / rint(p as i64), res.pth_root()))
            .collect();
        let mut g_minus_1 = VLaurent::new();
        expand_multinomial(&mut st, &roots, p, &mut g_minus_1);
        let drop_mono = |src: &VLaurent<Puiseux>, rm: &[Mono]| -> VLaurent<Puiseux> {
            let mut out = VLaurent::new();
            for (j, c) in src.terms() {
                let mut kept = Puiseux::zero(&field);
                for (v, res) in c.terms() {
                    if rm.iter().any(|(jj, vv, rr)| jj == j && vv == v && rr == res) {
                        continue;
                    }
                    kept.add_term(*v, res);
                }
                out.add_term(*j, kept);
            }
            out
        };
        let m_stripped = drop_mono(&m, &at_min);
        let cross = drop_mono(&g_minus_1, &at_min);
        // f - G = (m - at_min) - (G - 1 - b^p block)
        let mut diff = m_stripped.clone();
        st.add_poly(&mut diff, &cross.neg());
        // G^{-1} = sum (-(G-1))^k truncated at the cap
        let mut ginv = VLaurent::from_terms(vec![(0, one.clone())]);
        let mut pow = VLaurent::from_terms(vec![(0, one.clone())]);
        let neg_g1 = g_minus_1.neg();
        loop {
            pow = st.mul_polys(&pow, &neg_g1).truncate_at_radius(r, st.drop);
            if pow.is_zero() {
                break;
            }
            let snapshot = pow.clone();
            st.add_poly(&mut ginv, &snapshot);
        }
        // f_new = 1 + (f - G) G^{-1}
        let prod = st.mul_polys(&diff, &ginv);
        let mut fnew = VLaurent::from_terms(vec![(0, one.clone())]);
        st.add_poly(&mut fnew, &prod);
        st.f = fnew.truncate_at_radius(r, st.drop);
    }
    Err(Error::domain(
        "depth peeling did not terminate within the iteration bound",
    ))
}

/// Append (sum_s b_s)^p to `out`: multi-indices with k_1 + ... + k_m = p.
fn expand_power(st: &mut DepthState, roots: &[Mono], p: u64, out: &mut VLaurent<Puiseux>) {
    fn rec(
        st: &mut DepthState,
        roots: &[Mono],
        p: u64,
        idx: usize,
        remaining: u64,
        coef: i128,
        j_acc: i64,
        v_acc: Rat,
        r_acc: &crate::algebra::gf::GfEl,
        out: &mut VLaurent<Puiseux>,
    ) {
        if idx == roots.len() {
            if remaining != 0 {
                return;
            }
            let mut n = coef;
            let mut k = 0i64;
            let pi = p as i128;
            while n != 0 {
                let d = (n % pi) as i64;
                if d != 0 {
                    let dig = crate::algebra::gf::GfEl::from_i64(r_acc.field(), d);
                    st.add_monomial(out, j_acc, v_acc + rint(k), &dig.mul(r_acc));
                }
                n /= pi;
                k += 1;
            }
            return;
        }
        let (j, v, res) = &roots[idx];
        let mut c = coef;
        let mut racc = r_acc.clone();
        for k in 0..=remaining {
            if k > 0 {
                c = c * (remaining - k + 1) as i128 / k as i128;
                racc = racc.mul(res);
            }
            rec(
                st,
                roots,
                p,
                idx + 1,
                remaining - k,
                c,
                j_acc + k as i64 * j,
                v_acc + rint(k as i64) * v,
                &racc,
                out,
            );
        }
    }
    let field = roots[0].2.field().clone();
    let one = crate::algebra::gf::GfEl::one(&field);
    rec(st, roots, p, 0, p, 1, 0, rint(0), &one, out);
}

/// Append (1 + sum_s b_s)^p - 1 to `out`: every multi-index
/// (k_1, ..., k_m) with 0 < k_1 + ... + k_m <= p contributes
/// multinomial(p; k) prod b_s^{k_s}, the integer coefficient expanded into
/// its exact base-p digit monomials.
fn expand_multinomial(st: &mut DepthState, roots: &[Mono], p: u64, out: &mut VLaurent<Puiseux>) {
    fn rec(
        st: &mut DepthState,
        roots: &[Mono],
        p: u64,
        idx: usize,
        remaining: u64,
        coef: i128,
        j_acc: i64,
        v_acc: Rat,
        r_acc: &crate::algebra::gf::GfEl,
        any: bool,
        out: &mut VLaurent<Puiseux>,
    ) {
        if idx == roots.len() {
            if !any {
                return; // the constant 1 is excluded
            }
            // expand the integer coefficient into base-p digits
            let mut n = coef;
            let mut k = 0i64;
            let pi = p as i128;
            while n != 0 {
                let d = (n % pi) as i64;
                if d != 0 {
                    let dig = crate::algebra::gf::GfEl::from_i64(r_acc.field(), d);
                    st.add_monomial(out, j_acc, v_acc + rint(k), &dig.mul(r_acc));
                }
                n /= pi;
                k += 1;
            }
            return;
        }
        let (j, v, res) = &roots[idx];
        // choose k copies of b_idx; update the multinomial coefficient
        // incrementally: C(remaining_before, k)
        let mut c = coef;
        let mut racc = r_acc.clone();
        for k in 0..=remaining {
            if k > 0 {
                // c *= (remaining - k + 1) / k
                c = c * (remaining - k + 1) as i128 / k as i128;
                racc = racc.mul(res);
            }
            rec(
                st,
                roots,
                p,
                idx + 1,
                remaining - k,
                c,
                j_acc + k as i64 * j,
                v_acc + rint(k as i64) * v,
                &racc,
                any || k > 0,
                out,
            );
            if k == remaining {
                break;
            }
        }
    }
    let field = roots[0].2.field().clone();
    let one = crate::algebra::gf::GfEl::one(&field);
    rec(st, roots, p, 0, p, 1, 0, rint(0), &one, false, out);
}

/// Number of branch points of y^p = f with T-valuation strictly greater
/// than r: the disc zeros of f plus the pole at T = 0 when present.
pub fn branch_points_below(f: &VLaurent<Puiseux>, r: Rat) -> Result<u64> {
    if f.is_zero() {
        return Err(Error::domain("zero function"));
    }
    let jmax = f.deg_tinv().unwrap();
    // shift to a polynomial in T: exponent k = jmax - j
    let mut pts = vec![];
    for (j, c) in f.terms() {
        if let Some(v) = Puiseux::val(c) {
            pts.push((jmax - j, v));
        }
    }
    let np = NewtonPolygon::from_points(pts)?;
    // roots in T have valuation -slope
    let mut count = 0u64;
    for seg in &np.segments {
        let v_t = -seg.slope;
        if v_t > r {
            count += seg.len;
        }
    }
    if jmax > 0 {
        count += 1; // the pole T = 0
    }
    Ok(count)
}

#[derive(Clone, Debug)]
pub struct DepthProfile {
    pub samples: Vec<(Rat, Rat)>,
    /// Right difference quotients between consecutive samples.
    pub slopes: Vec<Rat>,
    /// Branch-point counts nu(r) at each sample.
    pub nu: Vec<u64>,
    /// Every difference quotient satisfies slope <= max(nu(r) - 1, 0).
    pub slope_bound_ok: bool,
}

/// Sample the depth along radii and validate the piecewise-linear slope
/// bound (a validator, not a prover).
pub fn depth_profile_check(p: u64, f: &VLaurent<Puiseux>, radii: &[Rat]) -> Result<DepthProfile> {
    if radii.len() < 2 {
        return Err(Error::domain("need at least two radii"));
    }
    for w in radii.windows(2) {
        if w[0] >= w[1] {
            return Err(Error::domain("radii must strictly increase"));
        }
    }
    let mut samples = vec![];
    let mut nu = vec![];
    for &r in radii {
        samples.push((r, zp_depth(p, f, r)?));
        nu.push(branch_points_below(f, r)?);
    }
    let mut slopes = vec![];
    let mut ok = true;
    for i in 0..samples.len() - 1 {
        let (r0, d0) = samples[i];
        let (r1, d1) = samples[i + 1];
        let slope = (d1 - d0) / (r1 - r0);
        let bound = if nu[i] > 0 {
            rint(nu[i] as i64 - 1)
        } else {
            rint(0)
        };
        if slope > bound {
            ok = false;
        }
        slopes.push(slope);
    }
    Ok(DepthProfile {
        samples,
        slopes,
        nu,
        slope_bound_ok: ok,
    })
}

/// Convert an exact chain factor to the leading-order model for depth
/// sampling (the lossy-but-sound direction of the two-backend design).
pub fn to_depth_model(h: &VLaurent<PadicElem>) -> Result<VLaurent<Puiseux>> {
    let mut out = VLaurent::new();
    for (j, c) in h.terms() {
        out.add_term(*j, c.leading_monomial()?);
    }
    Ok(out)
}

/// Depth of the full chain under the tower hypotheses: the first n-1 steps
/// contribute their raw different valuations, the last its scaled depth.
/// Errors when an intermediate step is not in unit shape at the radius.
pub fn chain_depth(chain: &KummerChain, r: Rat) -> Result<Rat> {
    chain.validate()?;
    let p = chain.p as i64;
    let mut total = rint(0);
    for (i, h) in chain.hs.iter().enumerate() {
        let model = to_depth_model(h)?;
        let d = zp_depth(chain.p, &model, r).map_err(|e| {
            Error::domain(format!(
                "chain step {} is not in unit-times-p-th-power shape at this radius: {e}",
                i + 1
            ))
        })?;
        if i + 1 < chain.hs.len() {
            total = total + d * rat(p - 1, p);
        } else {
            total = total + d;
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zp_lift_certificate() {
        // p = 3, u = 2: 3 branch points, delta = 6 on both sides
        let chain = build_zp_lift(3, 2, None).unwrap();
        let cert = different_criterion(&chain, &[2]).unwrap();
        assert_eq!(cert.status, LiftStatus::LiftCertified);
        assert_eq!(cert.delta_eta, 6);
        assert_eq!(cert.delta_s, 6);
        let points: u64 = cert.table.iter().map(|r| r.disc_points).sum();
        assert_eq!(points, 3);
        // wrong target jumps are refused by the criterion
        let bad = different_criterion(&chain, &[5]).unwrap();
        assert_eq!(bad.status, LiftStatus::NotALift);
        assert_eq!(bad.delta_s, 12);
        // p | u rejected at construction
        assert!(build_zp_lift(3, 3, None).is_err());
    }

    #[test]
    fn zp2_lift_certificate() {
        // p = 3, u = 1: table (2 points of index 9, 2 of index 3), 28 = 28
        let chain = build_zp2_lift(3, 1, None).unwrap();
        let cert = different_criterion(&chain, &[1, 3]).unwrap();
        assert_eq!(cert.status, LiftStatus::LiftCertified);
        assert_eq!(cert.delta_eta, 28);
        assert_eq!(cert.delta_s, 28);
        let idx9: u64 = cert
            .table
            .iter()
            .filter(|r| r.ram_index == 9)
            .map(|r| r.disc_points)
            .sum();
        let idx3: u64 = cert
            .table
            .iter()
            .filter(|r| r.ram_index == 3)
            .map(|r| r.disc_points)
            .sum();
        assert_eq!(idx9, 2);
        assert_eq!(idx3, 2);
    }

    #[test]
    fn zp2_h2_degree() {
        for (p, u) in [(3u64, 1i64), (3, 2), (5, 1)] {
            let chain = build_zp2_lift(p, u, None).unwrap();
            assert_eq!(chain.hs[1].deg_tinv(), Some((p as i64 - 1) * u));
        }
    }

    #[test]
    fn reduction_check() {
        for p in [3u64, 5, 7] {
            let chain = build_zp_lift(p, 1, None).unwrap();
            verify_zp_reduction(&chain.cyc).unwrap();
        }
    }

    #[test]
    fn dihedral_example() {
        for p in [3u64, 5, 7] {
            let cert = dihedral_example_check(p).unwrap();
            assert_eq!(cert.status, LiftStatus::LiftCertified);
            assert_eq!(cert.delta_s, 3 * p - 2);
            assert_eq!(cert.delta_eta, 3 * p - 2);
        }
        assert!(dihedral_example_check(2).is_err());
    }

    #[test]
    fn oort_condition_examples() {
        // the failing four-jump example
        let v = oort_condition(5, &[1, 5, 34, 170]).unwrap();
        assert!(!v.holds);
        assert_eq!(v.failure, Some((3, 10)));
        // vacuous for n <= 3
        assert!(oort_condition(3, &[1, 3, 9]).unwrap().holds);
        // minimal jump families
        assert!(oort_condition(3, &[1, 3, 9, 27]).unwrap().holds);
        assert!(oort_condition(5, &[2, 10, 50, 250]).unwrap().holds);
    }

    #[test]
    fn generic_different_monotone_under_extra_factor() {
        let chain = build_zp_lift(3, 2, None).unwrap();
        let base = generic_different(&chain).unwrap().delta_eta;
        // multiply H_1 by (1 + lambda^3 T^{-1}): adds one more zero
        let extra = VLaurent::from_terms(vec![
            (0, PadicElem::from_i128(&chain.cyc.ring, 1)),
            (1, chain.cyc.lambda.pow(3)),
        ]);
        let bigger = KummerChain {
            p: 3,
            n: 1,
            hs: vec![chain.hs[0].mul(&extra)],
            cyc: chain.cyc,
        };
        let gd = generic_different(&bigger).unwrap();
        assert!(gd.delta_eta >= base);
    }

    #[test]
    fn depth_of_zp_lift_family() {
        // depth(1 + lambda^p T^{-u}, r) = u r on [0, 1/(u(p-1))]
        for (p, u) in [(3u64, 1i64), (3, 2), (5, 1)] {
            let chain = build_zp_lift(p, u, None).unwrap();
            let f = to_depth_model(&chain.hs[0]).unwrap();
            let right = rat(1, u * (p as i64 - 1));
            for k in 0..=4 {
                let r = right * rat(k, 4);
                let d = zp_depth(p, &f, r).unwrap();
                assert_eq!(d, rat(u, 1) * r);
            }
            assert_eq!(zp_depth(p, &f, right).unwrap(), rat(1, p as i64 - 1));
            assert_eq!(zp_depth(p, &f, rint(0)).unwrap(), rint(0));
        }
    }

    #[test]
    fn depth_multiplicative_case() {
        // f = 1 + T: residue 1 + t is not a p-th power, depth = p/(p-1)
        let field = crate::algebra::gf::Gf::new(3, 1).unwrap();
        let one = Puiseux::one(&field);
        let f = VLaurent::from_terms(vec![(0, one.clone()), (-1, one)]);
        assert_eq!(zp_depth(3, &f, rint(0)).unwrap(), rat(3, 2));
    }

    #[test]
    fn depth_profile_slopes() {
        let chain = build_zp_lift(3, 2, None).unwrap();
        let f = to_depth_model(&chain.hs[0]).unwrap();
        let radii = vec![rint(0), rat(1, 8), rat(1, 4)];
        let prof = depth_profile_check(3, &f, &radii).unwrap();
        assert!(prof.slope_bound_ok);
        assert_eq!(prof.slopes, vec![rint(2), rint(2)]);
        assert_eq!(prof.nu, vec![3, 3, 3]);
        // constant f: all-zero profile
        let field = crate::algebra::gf::Gf::new(3, 1).unwrap();
        let c = VLaurent::from_terms(vec![(0, Puiseux::one(&field))]);
        let prof_c = depth_profile_check(3, &c, &radii).unwrap();
        assert!(prof_c.samples.iter().all(|(_, d)| *d == rint(0)));
        // multiplicative f = 1 + T: depth p/(p-1) - r (the immovable T term
        // sits at level r), slope -1 within the nu = 0 bound
        let one = Puiseux::one(&field);
        let fm = VLaurent::from_terms(vec![(0, one.clone()), (-1, one)]);
        let prof_m = depth_profile_check(3, &fm, &radii).unwrap();
        assert!(prof_m.slope_bound_ok);
        for (r, d) in &prof_m.samples {
            assert_eq!(*d, rat(3, 2) - *r);
        }
    }

    #[test]
    fn depth_etale_threshold() {
        // every term of f - 1 with level >= p/(p-1) gives depth 0
        let field = crate::algebra::gf::Gf::new(3, 1).unwrap();
        let one = Puiseux::one(&field);
        let heavy = Puiseux::monomial(rint(2), crate::algebra::gf::GfEl::from_u64(&field, 2));
        let f = VLaurent::from_terms(vec![(0, one), (1, heavy)]);
        assert_eq!(zp_depth(3, &f, rint(0)).unwrap(), rint(0));
    }

    #[test]
    fn depth_peeling_through_p_power_exponents() {
        // f = 1 + c T^{-p} at r = 0 with v(c) = 1/2: absorbable once, then
        // the cross term p b T^{-1} decides at level 1 + 1/(2p)
        let field = crate::algebra::gf::Gf::new(3, 1).unwrap();
        let one = Puiseux::one(&field);
        let c = Puiseux::monomial(rat(1, 2), crate::algebra::gf::GfEl::from_u64(&field, 1));
        let f = VLaurent::from_terms(vec![(0, one), (3, c)]);
        let d = zp_depth(3, &f, rint(0)).unwrap();
        // w* = 1 + (1/2)/3 = 7/6, depth = 3/2 - 7/6 = 1/3
        assert_eq!(d, rat(1, 3));
    }
}
