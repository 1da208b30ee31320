//! Hurwitz trees of type (C, chi): a rooted tree of projective lines over a
//! finite field carrying per-vertex differential forms and depths, per-edge
//! annulus thicknesses, marked points, and a Z/m-action, together with a
//! validator for the ten structural axioms and the explicit small-conductor
//! constructor.

use crate::algebra::form::{Form, FormClass};
use crate::algebra::gf::{Gf, GfEl};
use crate::algebra::poly::Poly;
use crate::algebra::ratfn::{P1Point, RatFn};
use crate::error::{Error, Result};
use crate::rat::{rat, rint, Rat};
use std::fmt::Write as _;
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Axiom {
    I,
    II,
    III,
    IV,
    V,
    VI,
    VII,
    VIII,
    IX,
    X,
}

impl Axiom {
    pub fn tag(&self) -> &'static str {
        match self {
            Axiom::I => "i",
            Axiom::II => "ii",
            Axiom::III => "iii",
            Axiom::IV => "iv",
            Axiom::V => "v",
            Axiom::VI => "vi",
            Axiom::VII => "vii",
            Axiom::VIII => "viii",
            Axiom::IX => "ix",
            Axiom::X => "x",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Violation {
    pub axiom: Axiom,
    pub detail: String,
}

#[derive(Clone, Debug)]
pub struct HVertex {
    pub delta: Rat,
    /// None exactly for the root vertex.
    pub form: Option<Form>,
}

#[derive(Clone, Debug)]
pub struct HEdge {
    pub parent: usize,
    pub child: usize,
    pub thickness: Rat,
    /// Node coordinate on the parent component; None for the root edge.
    pub node_parent: Option<P1Point>,
    /// Node coordinate on the child component (the boundary marked point
    /// infinity-bar-prime for the root edge).
    pub node_child: P1Point,
}

/// Generator of the Z/m-action: a permutation of vertices together with a
/// fractional-linear identification of components.
#[derive(Clone, Debug)]
pub struct TreeAction {
    pub vertex_map: Vec<usize>,
    /// Moebius matrix [a, b, c, d] from the component of v to the component
    /// of vertex_map[v] (ignored for the root).
    pub moebius: Vec<[GfEl; 4]>,
}

#[derive(Clone, Debug)]
pub struct HurwitzTree {
    pub p: u64,
    pub m: u64,
    /// chi(c) in F_p^x for the generator c of C.
    pub chi: u64,
    pub field: Arc<Gf>,
    /// Vertex 0 is the root v_0 (no component, no form, delta = 0).
    pub vertices: Vec<HVertex>,
    pub edges: Vec<HEdge>,
    /// The marked points z-bar (excluding infinity-bar-prime).
    pub marked: Vec<(usize, P1Point)>,
    /// infinity-bar-prime: a smooth point of the component next to the root.
    pub infty: (usize, P1Point),
    /// Required when m > 1.
    pub action: Option<TreeAction>,
}

fn mobius_apply(field: &Arc<Gf>, m: &[GfEl; 4], x: &P1Point) -> P1Point {
    match x {
        P1Point::Finite(z) => {
            let num = m[0].mul(z).add(&m[1]);
            let den = m[2].mul(z).add(&m[3]);
            if den.is_zero() {
                P1Point::Infinity
            } else {
                P1Point::Finite(num.mul(&den.inv().expect("nonzero")))
            }
        }
        P1Point::Infinity => {
            if m[2].is_zero() {
                P1Point::Infinity
            } else {
                let _ = field;
                P1Point::Finite(m[0].mul(&m[2].inv().expect("nonzero")))
            }
        }
    }
}

fn mobius_compose(a: &[GfEl; 4], b: &[GfEl; 4]) -> [GfEl; 4] {
    // (a o b)(z) = a(b(z)): matrix product a * b
    [
        a[0].mul(&b[0]).add(&a[1].mul(&b[2])),
        a[0].mul(&b[1]).add(&a[1].mul(&b[3])),
        a[2].mul(&b[0]).add(&a[3].mul(&b[2])),
        a[2].mul(&b[1]).add(&a[3].mul(&b[3])),
    ]
}

/// Derivative of the Moebius map at a fixed point (tangent character).
fn mobius_tangent_at_fixed(m: &[GfEl; 4], x: &P1Point) -> Result<GfEl> {
    let det = m[0].mul(&m[3]).sub(&m[1].mul(&m[2]));
    match x {
        P1Point::Finite(z) => {
            let den = m[2].mul(z).add(&m[3]);
            Ok(det.mul(&den.mul(&den).inv()?))
        }
        P1Point::Infinity => Ok(det.mul(&m[0].mul(&m[0]).inv()?)),
    }
}

impl HurwitzTree {
    pub fn conductor(&self) -> Result<u64> {
        let violations = self.validate()?;
        if !violations.is_empty() {
            return Err(Error::domain(format!(
                "tree is not a valid Hurwitz tree ({} violations); conductor undefined",
                violations.len()
            )));
        }
        Ok(self.marked.len() as u64 - 1)
    }

    fn root_edge(&self) -> Option<&HEdge> {
        self.edges.iter().find(|e| e.parent == 0)
    }

    fn special_points_on(&self, v: usize) -> Vec<P1Point> {
        let mut out = vec![];
        for (w, pt) in &self.marked {
            if *w == v {
                out.push(pt.clone());
            }
        }
        if self.infty.0 == v {
            out.push(self.infty.1.clone());
        }
        for e in &self.edges {
            if e.child == v {
                if e.parent != 0 {
                    out.push(e.node_child.clone());
                } else {
                    // the root edge attaches at infinity-bar-prime, already
                    // listed as a marked boundary point
                }
            }
            if e.parent == v && e.parent != 0 {
                if let Some(np) = &e.node_parent {
                    out.push(np.clone());
                }
            }
        }
        out
    }

    fn structural_check(&self) -> Result<()> {
        let n = self.vertices.len();
        if n < 2 {
            return Err(Error::usage("a Hurwitz tree needs a root and a component"));
        }
        if self.vertices[0].form.is_some() {
            return Err(Error::usage("vertex 0 is the root and carries no form"));
        }
        for (i, v) in self.vertices.iter().enumerate().skip(1) {
            if v.form.is_none() {
                return Err(Error::usage(format!("vertex {i} is missing its form")));
            }
        }
        let mut root_edges = 0;
        let mut parent_count = vec![0usize; n];
        for e in &self.edges {
            if e.parent >= n || e.child >= n {
                return Err(Error::usage("dangling edge: vertex index out of range"));
            }
            if e.child == 0 {
                return Err(Error::usage("the root cannot be a child"));
            }
            parent_count[e.child] += 1;
            if e.parent == 0 {
                root_edges += 1;
                if e.node_parent.is_some() {
                    return Err(Error::usage("the root edge has no parent-side node"));
                }
                if e.child != self.infty.0 || e.node_child != self.infty.1 {
                    return Err(Error::usage(
                        "the root edge must attach at infinity-bar-prime",
                    ));
                }
            } else if e.node_parent.is_none() {
                return Err(Error::usage("internal edge missing its parent-side node"));
            }
        }
        if root_edges != 1 {
            return Err(Error::usage("exactly one root edge required"));
        }
        for (i, &c) in parent_count.iter().enumerate().skip(1) {
            if c != 1 {
                return Err(Error::usage(format!(
                    "vertex {i} must have exactly one parent edge (found {c})"
                )));
            }
        }
        if self.infty.0 == 0 {
            return Err(Error::usage("infinity-bar-prime must lie on a component"));
        }
        if self.m > 1 {
            let act = self
                .action
                .as_ref()
                .ok_or_else(|| Error::usage("m > 1 requires a Z/m-action"))?;
            if act.vertex_map.len() != n || act.moebius.len() != n {
                return Err(Error::usage("action tables must cover every vertex"));
            }
            if act.vertex_map[0] != 0 {
                return Err(Error::usage("the action must fix the root"));
            }
        }
        Ok(())
    }

    /// Check axioms (i)-(x); an empty list means the tree is valid.
    /// Structurally malformed trees give an error instead.
    pub fn validate(&self) -> Result<Vec<Violation>> {
        self.structural_check()?;
        let mut out: Vec<Violation> = vec![];
        let mut push = |axiom: Axiom, detail: String| out.push(Violation { axiom, detail });

        // (i) the dual graph is a tree (connected, |E| = |V| - 1) of
        // projective lines, stably marked by distinct smooth points
        if self.edges.len() != self.vertices.len() - 1 {
            push(
                Axiom::I,
                "dual graph has a cycle or is disconnected".into(),
            );
        } else {
            // connectivity via reachability from the root
            let mut seen = vec![false; self.vertices.len()];
            seen[0] = true;
            let mut stack = vec![0usize];
            while let Some(v) = stack.pop() {
                for e in &self.edges {
                    if e.parent == v && !seen[e.child] {
                        seen[e.child] = true;
                        stack.push(e.child);
                    }
                }
            }
            if seen.iter().any(|s| !s) {
                push(Axiom::I, "dual graph is disconnected".into());
            }
        }
        for v in 1..self.vertices.len() {
            let sp = self.special_points_on(v);
            let mut dedup = sp.clone();
            dedup.sort_by_key(|p| match p {
                P1Point::Infinity => (1, vec![]),
                P1Point::Finite(x) => (0, x.coords().to_vec()),
            });
            dedup.dedup();
            if dedup.len() != sp.len() {
                push(
                    Axiom::I,
                    format!("component {v}: marked/singular points not distinct"),
                );
            }
            if sp.len() < 3 {
                push(
                    Axiom::I,
                    format!("component {v} is not stably marked ({} special points)", sp.len()),
                );
            }
        }
        for (v, pt) in &self.marked {
            if *v == 0 {
                push(Axiom::I, "marked point on the root".into());
                continue;
            }
            // marked points are smooth: distinct from nodes
            for e in &self.edges {
                if e.child == *v && e.parent != 0 && e.node_child == *pt {
                    push(Axiom::I, format!("marked point on component {v} is a node"));
                }
                if e.parent == *v && e.node_parent.as_ref() == Some(pt) {
                    push(Axiom::I, format!("marked point on component {v} is a node"));
                }
            }
        }

        // (ii) 0 <= delta <= 1, zero exactly at the root
        if self.vertices[0].delta != rint(0) {
            push(Axiom::II, "root depth must be 0".into());
        }
        for (i, v) in self.vertices.iter().enumerate().skip(1) {
            if v.delta < rint(0) || v.delta > rint(1) {
                push(Axiom::II, format!("delta at vertex {i} outside [0, 1]"));
            } else if v.delta == rint(0) {
                push(Axiom::II, format!("delta = 0 at non-root vertex {i}"));
            }
        }

        // (iii) divisor support and simple poles at marked points
        for (i, v) in self.vertices.iter().enumerate().skip(1) {
            let form = v.form.as_ref().unwrap();
            if form.is_zero() {
                push(Axiom::III, format!("zero form at vertex {i}"));
                continue;
            }
            let special = self.special_points_on(i);
            // support must be rational and contained in the special points
            let mut support: Vec<P1Point> = vec![];
            let f = form.coefficient();
            for poly in [f.num(), f.den()] {
                if poly.degree().unwrap_or(0) > 0 {
                    match poly.splitting_degree() {
                        Ok(1) => {}
                        Ok(_) => {
                            push(
                                Axiom::III,
                                format!(
                                    "form at vertex {i} has divisor support outside the rational points"
                                ),
                            );
                        }
                        Err(_) => {}
                    }
                    for (root, _) in poly.roots_in_field() {
                        support.push(P1Point::Finite(root));
                    }
                }
            }
            match form.order_at(&P1Point::Infinity) {
                Ok(0) => {}
                Ok(_) => support.push(P1Point::Infinity),
                Err(_) => {}
            }
            for pt in &support {
                if !special.contains(pt) {
                    push(
                        Axiom::III,
                        format!("form at vertex {i} has divisor support at a non-special point"),
                    );
                }
            }
            for (w, pt) in &self.marked {
                if *w == i {
                    match form.order_at(pt) {
                        Ok(-1) => {}
                        Ok(o) => push(
                            Axiom::III,
                            format!(
                                "form at vertex {i} has order {o} (not a simple pole) at a marked point"
                            ),
                        ),
                        Err(_) => {}
                    }
                }
            }
        }

        // (iv) delta = 1 iff logarithmic, otherwise exact
        for (i, v) in self.vertices.iter().enumerate().skip(1) {
            let form = v.form.as_ref().unwrap();
            match form.classify() {
                Ok(FormClass::Logarithmic) => {
                    if v.delta != rint(1) {
                        push(
                            Axiom::IV,
                            format!("vertex {i}: logarithmic form but delta != 1"),
                        );
                    }
                }
                Ok(FormClass::Exact) => {
                    if v.delta == rint(1) {
                        push(Axiom::IV, format!("vertex {i}: exact form but delta = 1"));
                    }
                }
                Ok(FormClass::Neither) => {
                    push(
                        Axiom::IV,
                        format!("vertex {i}: form is neither logarithmic nor exact"),
                    );
                }
                Err(e) => push(Axiom::IV, format!("vertex {i}: {e}")),
            }
        }

        // (v) positive rational thicknesses
        for (k, e) in self.edges.iter().enumerate() {
            if e.thickness <= rint(0) {
                push(Axiom::V, format!("edge {k} has non-positive thickness"));
            }
        }

        // (vi) node orders sum to -2 on internal edges
        for e in self.edges.iter() {
            if e.parent == 0 {
                continue;
            }
            let fp = self.vertices[e.parent].form.as_ref().unwrap();
            let fc = self.vertices[e.child].form.as_ref().unwrap();
            let op = fp.order_at(e.node_parent.as_ref().unwrap());
            let oc = fc.order_at(&e.node_child);
            match (op, oc) {
                (Ok(a), Ok(b)) => {
                    if a + b != -2 {
                        push(
                            Axiom::VI,
                            format!(
                                "node orders {a} + {b} != -2 on edge {} -> {}",
                                e.parent, e.child
                            ),
                        );
                    }
                }
                _ => push(Axiom::VI, "node order undefined (zero form)".into()),
            }
        }

        // (vii) delta difference along each edge
        for e in self.edges.iter() {
            let fc = self.vertices[e.child].form.as_ref().unwrap();
            let node = if e.parent == 0 {
                &self.infty.1
            } else {
                &e.node_child
            };
            match fc.order_at(node) {
                Ok(o) => {
                    let lhs = self.vertices[e.child].delta - self.vertices[e.parent].delta;
                    let rhs = rint(self.p as i64 - 1) * e.thickness * rint(o + 1);
                    if lhs != rhs {
                        push(
                            Axiom::VII,
                            format!(
                                "edge {} -> {}: delta difference {} != (p-1) eps (ord+1) = {}",
                                e.parent,
                                e.child,
                                crate::rat::rat_to_string(&lhs),
                                crate::rat::rat_to_string(&rhs)
                            ),
                        );
                    }
                }
                Err(_) => push(Axiom::VII, "node order undefined (zero form)".into()),
            }
        }

        // (viii)-(x) concern the action
        if self.m > 1 {
            let act = self.action.as_ref().unwrap();
            // (viii) fixes infinity-bar-prime and permutes the marked points
            let (iv, ipt) = &self.infty;
            if act.vertex_map[*iv] != *iv
                || mobius_apply(&self.field, &act.moebius[*iv], ipt) != *ipt
            {
                push(Axiom::VIII, "action does not fix infinity-bar-prime".into());
            }
            let image: Vec<(usize, P1Point)> = self
                .marked
                .iter()
                .map(|(v, pt)| (act.vertex_map[*v], mobius_apply(&self.field, &act.moebius[*v], pt)))
                .collect();
            for im in &image {
                if !self.marked.contains(im) {
                    push(
                        Axiom::VIII,
                        "action does not permute the marked points".into(),
                    );
                    break;
                }
            }

            // node compatibility and (ix) inverse tangent characters
            let edge_image = |e: &HEdge| -> Option<(usize, usize, Option<P1Point>, P1Point)> {
                let np = e.node_parent.as_ref()?;
                Some((
                    act.vertex_map[e.parent],
                    act.vertex_map[e.child],
                    Some(mobius_apply(&self.field, &act.moebius[e.parent], np)),
                    mobius_apply(&self.field, &act.moebius[e.child], &e.node_child),
                ))
            };
            for e in self.edges.iter() {
                if e.parent == 0 {
                    continue;
                }
                if let Some((ip, ic, inp, inc)) = edge_image(e) {
                    let matched = self.edges.iter().any(|f| {
                        f.parent == ip
                            && f.child == ic
                            && f.node_parent == inp
                            && f.node_child == inc
                    });
                    if !matched {
                        push(
                            Axiom::IX,
                            format!(
                                "action does not map the node of edge {} -> {} to a node",
                                e.parent, e.child
                            ),
                        );
                    }
                }
            }
            // stabilizers: smallest k with c^k fixing the edge nodewise
            for e in self.edges.iter() {
                if e.parent == 0 {
                    continue;
                }
                let np = e.node_parent.clone().unwrap();
                let mut k = 1u64;
                let mut vp = act.vertex_map[e.parent];
                let mut vc = act.vertex_map[e.child];
                let mut mp = act.moebius[e.parent].clone();
                let mut mc = act.moebius[e.child].clone();
                while k < self.m {
                    if vp == e.parent
                        && vc == e.child
                        && mobius_apply(&self.field, &mp, &np) == np
                        && mobius_apply(&self.field, &mc, &e.node_child) == e.node_child
                    {
                        break;
                    }
                    mp = mobius_compose(&act.moebius[vp], &mp);
                    mc = mobius_compose(&act.moebius[vc], &mc);
                    vp = act.vertex_map[vp];
                    vc = act.vertex_map[vc];
                    k += 1;
                }
                if k < self.m {
                    // c^k stabilizes the node: tangent characters must be
                    // inverse to each other
                    let lp = mobius_tangent_at_fixed(&mp, &np);
                    let lc = mobius_tangent_at_fixed(&mc, &e.node_child);
                    match (lp, lc) {
                        (Ok(a), Ok(b)) => {
                            if !a.mul(&b).is_one() {
                                push(
                                    Axiom::IX,
                                    format!(
                                        "tangent characters at the node of edge {} -> {} are not inverse",
                                        e.parent, e.child
                                    ),
                                );
                            }
                        }
                        _ => push(Axiom::IX, "degenerate tangent character".into()),
                    }
                }
            }

            // (x) c^* omega_{c(v)} = chi(c) omega_v
            let chi_el = GfEl::from_u64(&self.field, self.chi);
            for v in 1..self.vertices.len() {
                let target = act.vertex_map[v];
                if target == 0 {
                    push(Axiom::X, format!("action maps component {v} to the root"));
                    continue;
                }
                let omega_target = self.vertices[target].form.as_ref().unwrap();
                match omega_target.pullback_mobius(&act.moebius[v]) {
                    Ok(pulled) => {
                        let expect = self.vertices[v]
                            .form
                            .as_ref()
                            .unwrap()
                            .mul_scalar(&chi_el);
                        if pulled != expect {
                            push(
                                Axiom::X,
                                format!("c^* omega_{{c({v})}} != chi(c) omega_{v}"),
                            );
                        }
                    }
                    Err(e) => push(Axiom::X, format!("pullback failed at vertex {v}: {e}")),
                }
            }
        }
        Ok(out)
    }

    /// DOT rendering of the underlying tree.
    pub fn to_dot(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "digraph hurwitz_tree {{");
        for (i, v) in self.vertices.iter().enumerate() {
            if i == 0 {
                let _ = writeln!(out, "  v0 [label=\"root\", shape=plaintext];");
            } else {
                let marked = self.marked.iter().filter(|(w, _)| *w == i).count();
                let _ = writeln!(
                    out,
                    "  v{} [label=\"delta {}\\n{} marked\", shape=box];",
                    i,
                    crate::rat::rat_to_string(&v.delta),
                    marked
                );
            }
        }
        for e in &self.edges {
            let _ = writeln!(
                out,
                "  v{} -> v{} [label=\"{}\"];",
                e.parent,
                e.child,
                crate::rat::rat_to_string(&e.thickness)
            );
        }
        let _ = writeln!(out, "}}");
        out
    }
}

/// The explicit small-conductor construction (1 < h < p, h != p-1,
/// h = -1 mod m): a single component with delta = 1 carrying the form
/// dz / prod_i (z^m - z_i^m), marked at the m-orbits of the chosen z_i,
/// with root-edge thickness 1/(h(p-1)) and the rotation action c. z = zeta_m z.
pub fn build_small_conductor(
    p: u64,
    m: u64,
    h: i64,
    chi: Option<u64>,
    zs: Option<Vec<u64>>,
) -> Result<HurwitzTree> {
    if m == 0 || (p - 1) % m != 0 {
        return Err(Error::domain("m must divide p - 1"));
    }
    if h <= 1 || h >= p as i64 {
        return Err(Error::domain("the explicit construction needs 1 < h < p"));
    }
    if h == p as i64 - 1 {
        return Err(Error::domain("h = p - 1 is excluded"));
    }
    if (h + 1) % m as i64 != 0 {
        return Err(Error::domain("h must be -1 modulo m"));
    }
    let r = ((h + 1) / m as i64) as usize;
    let field = Gf::new(p, 1)?;
    // zeta_m: element of multiplicative order m
    let zeta = match chi {
        Some(c) => {
            let el = GfEl::from_u64(&field, c);
            if el.is_zero() || el.mult_order()? != m {
                return Err(Error::domain("chi must have multiplicative order m"));
            }
            el
        }
        None => {
            let mut found = None;
            for cand in crate::algebra::gf::all_elements(&field).into_iter().skip(1) {
                if cand.mult_order()? == m {
                    found = Some(cand);
                    break;
                }
            }
            found.ok_or_else(|| Error::domain("no element of order m"))?
        }
    };
    // choose z_1, ..., z_r with pairwise distinct m-orbits
    let zs: Vec<GfEl> = match zs {
        Some(v) => {
            if v.len() != r {
                return Err(Error::domain(format!("need exactly r = {r} base points")));
            }
            v.into_iter()
                .map(|x| GfEl::from_u64(&field, x))
                .collect()
        }
        None => {
            let mut out: Vec<GfEl> = vec![];
            let mut used: Vec<GfEl> = vec![];
            for cand in crate::algebra::gf::all_elements(&field).into_iter().skip(1) {
                if used.contains(&cand) {
                    continue;
                }
                let mut orbit = vec![];
                let mut x = cand.clone();
                for _ in 0..m {
                    orbit.push(x.clone());
                    x = x.mul(&zeta);
                }
                used.extend(orbit);
                out.push(cand);
                if out.len() == r {
                    break;
                }
            }
            if out.len() < r {
                return Err(Error::domain("not enough orbits in F_p^x"));
            }
            out
        }
    };
    // marked points: the full orbits; all must be distinct and nonzero
    let mut marked_pts: Vec<GfEl> = vec![];
    for z in &zs {
        if z.is_zero() {
            return Err(Error::domain("base points must be nonzero"));
        }
        let mut x = z.clone();
        for _ in 0..m {
            marked_pts.push(x.clone());
            x = x.mul(&zeta);
        }
    }
    {
        let mut sorted = marked_pts.clone();
        sorted.sort_by_key(|x| x.coords().to_vec());
        sorted.dedup();
        if sorted.len() != marked_pts.len() {
            return Err(Error::domain(
                "chosen base points collide under the zeta_m-orbit",
            ));
        }
    }
    // omega = dz / prod_i (z^m - z_i^m)
    let mut den = Poly::one(&field);
    for z in &zs {
        let mut coeffs = vec![GfEl::zero(&field); m as usize + 1];
        coeffs[0] = z.pow(m as u128).neg();
        coeffs[m as usize] = GfEl::one(&field);
        den = den.mul(&Poly::from_coeffs(&field, coeffs));
    }
    let omega = Form::new(RatFn::new(Poly::one(&field), den)?);

    let vertices = vec![
        HVertex {
            delta: rint(0),
            form: None,
        },
        HVertex {
            delta: rint(1),
            form: Some(omega),
        },
    ];
    let edges = vec![HEdge {
        parent: 0,
        child: 1,
        thickness: rat(1, h * (p as i64 - 1)),
        node_parent: None,
        node_child: P1Point::Infinity,
    }];
    let marked = marked_pts
        .into_iter()
        .map(|x| (1usize, P1Point::Finite(x)))
        .collect();
    let action = if m > 1 {
        let id = [
            GfEl::one(&field),
            GfEl::zero(&field),
            GfEl::zero(&field),
            GfEl::one(&field),
        ];
        let rot = [
            zeta.clone(),
            GfEl::zero(&field),
            GfEl::zero(&field),
            GfEl::one(&field),
        ];
        Some(TreeAction {
            vertex_map: vec![0, 1],
            moebius: vec![id, rot],
        })
    } else {
        None
    };
    let chi_val = zeta.coords()[0];
    Ok(HurwitzTree {
        p,
        m,
        chi: chi_val,
        field,
        vertices,
        edges,
        marked,
        infty: (1, P1Point::Infinity),
        action,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly_from(field: &Arc<Gf>, v: &[i64]) -> Poly {
        Poly::from_coeffs(field, v.iter().map(|&x| GfEl::from_i64(field, x)).collect())
    }

    #[test]
    fn small_conductor_tree_is_valid() {
        let t = build_small_conductor(5, 2, 3, None, Some(vec![1, 2])).unwrap();
        let v = t.validate().unwrap();
        assert!(v.is_empty(), "violations: {v:?}");
        assert_eq!(t.conductor().unwrap(), 3);
        // omega = dz/((z^2-1)(z^2-4)) with a zero of order h-1 = 2 at infinity
        let form = t.vertices[1].form.as_ref().unwrap();
        assert_eq!(form.order_at(&P1Point::Infinity).unwrap(), 2);
        assert_eq!(form.classify().unwrap(), FormClass::Logarithmic);
    }

    #[test]
    fn small_conductor_admissible_family() {
        for p in [5u64, 7, 11, 13] {
            for m in 2..p {
                if (p - 1) % m != 0 {
                    continue;
                }
                for h in 2..(p as i64 - 1) {
                    if (h + 1) % m as i64 != 0 {
                        continue;
                    }
                    let t = build_small_conductor(p, m, h, None, None)
                        .unwrap_or_else(|e| panic!("build({p},{m},{h}): {e}"));
                    let v = t.validate().unwrap();
                    assert!(v.is_empty(), "(p,m,h)=({p},{m},{h}): {v:?}");
                    assert_eq!(t.conductor().unwrap(), h as u64);
                }
            }
        }
    }

    #[test]
    fn constructor_preconditions() {
        // h even fails h = -1 mod 2
        assert!(build_small_conductor(5, 2, 4, None, None).is_err());
        // h = p - 1 excluded
        assert!(build_small_conductor(7, 2, 6, None, None).is_err());
        // colliding orbit choice
        assert!(build_small_conductor(5, 2, 3, None, Some(vec![1, 4])).is_err());
    }

    /// A valid three-component tree over F_3: root - v1 - {v2, v3}, with
    /// omega_1 = 2 dz/(z^3 (z-1)^3) exact (delta 1/2) and logarithmic
    /// boundary components carrying three marked points each.
    fn three_vertex_tree(m: u64) -> HurwitzTree {
        let field = Gf::new(3, 1).unwrap();
        let omega1 = Form::new(
            RatFn::new(
                poly_from(&field, &[2]),
                poly_from(&field, &[0, 1]).pow(3).mul(&poly_from(&field, &[-1, 1]).pow(3)),
            )
            .unwrap(),
        );
        let omega2 = Form::new(
            RatFn::new(Poly::one(&field), poly_from(&field, &[0, -1, 0, 1])).unwrap(),
        );
        let omega3 = Form::new(
            RatFn::new(poly_from(&field, &[-1]), poly_from(&field, &[0, -1, 0, 1])).unwrap(),
        );
        let vertices = vec![
            HVertex { delta: rint(0), form: None },
            HVertex { delta: rat(1, 2), form: Some(omega1) },
            HVertex { delta: rint(1), form: Some(omega2) },
            HVertex { delta: rint(1), form: Some(omega3) },
        ];
        let edges = vec![
            HEdge {
                parent: 0,
                child: 1,
                thickness: rat(1, 20),
                node_parent: None,
                node_child: P1Point::Infinity,
            },
            HEdge {
                parent: 1,
                child: 2,
                thickness: rat(1, 8),
                node_parent: Some(P1Point::Finite(GfEl::zero(&field))),
                node_child: P1Point::Infinity,
            },
            HEdge {
                parent: 1,
                child: 3,
                thickness: rat(1, 8),
                node_parent: Some(P1Point::Finite(GfEl::one(&field))),
                node_child: P1Point::Infinity,
            },
        ];
        let mut marked = vec![];
        for v in [2usize, 3] {
            for x in [0i64, 1, -1] {
                marked.push((v, P1Point::Finite(GfEl::from_i64(&field, x))));
            }
        }
        let action = if m == 2 {
            // c swaps v2 and v3 (identity charts) and acts on v1 by
            // z -> 1 - z, fixing infinity and swapping the two nodes
            let id = [
                GfEl::one(&field),
                GfEl::zero(&field),
                GfEl::zero(&field),
                GfEl::one(&field),
            ];
            let invol = [
                GfEl::from_i64(&field, -1),
                GfEl::one(&field),
                GfEl::zero(&field),
                GfEl::one(&field),
            ];
            Some(TreeAction {
                vertex_map: vec![0, 1, 3, 2],
                moebius: vec![id.clone(), invol, id.clone(), id],
            })
        } else {
            None
        };
        HurwitzTree {
            p: 3,
            m,
            chi: if m == 2 { 2 } else { 1 },
            field,
            vertices,
            edges,
            marked,
            infty: (1, P1Point::Infinity),
            action,
        }
    }

    #[test]
    fn three_vertex_tree_valid_with_and_without_action() {
        for m in [1u64, 2] {
            let t = three_vertex_tree(m);
            let v = t.validate().unwrap();
            assert!(v.is_empty(), "m = {m}: {v:?}");
            assert_eq!(t.conductor().unwrap(), 5);
        }
    }

    fn has_axiom(violations: &[Violation], a: Axiom) -> bool {
        violations.iter().any(|v| v.axiom == a)
    }

    #[test]
    fn mutations_hit_expected_axioms() {
        // (ii): delta out of range
        let mut t = build_small_conductor(5, 2, 3, None, Some(vec![1, 2])).unwrap();
        t.vertices[1].delta = rat(3, 2);
        assert!(has_axiom(&t.validate().unwrap(), Axiom::II));

        // (ii): delta = 0 at a non-root vertex
        let mut t = three_vertex_tree(1);
        t.vertices[2].delta = rint(0);
        assert!(has_axiom(&t.validate().unwrap(), Axiom::II));

        // (iii): extra pole at an unmarked point (z = 0)
        let mut t = build_small_conductor(5, 2, 3, None, Some(vec![1, 2])).unwrap();
        let f = t.vertices[1].form.as_ref().unwrap().coefficient().clone();
        let extra = RatFn::new(
            f.num().clone(),
            f.den().mul(&poly_from(&t.field, &[0, 1])),
        )
        .unwrap();
        t.vertices[1].form = Some(Form::new(extra));
        assert!(has_axiom(&t.validate().unwrap(), Axiom::III));

        // (iv): logarithmic form with delta != 1 (also breaks (vii))
        let mut t = build_small_conductor(5, 2, 3, None, Some(vec![1, 2])).unwrap();
        t.vertices[1].delta = rat(1, 2);
        let v = t.validate().unwrap();
        assert!(has_axiom(&v, Axiom::IV));
        assert!(has_axiom(&v, Axiom::VII));

        // (v): non-positive thickness
        let mut t = build_small_conductor(5, 2, 3, None, Some(vec![1, 2])).unwrap();
        t.edges[0].thickness = rat(-1, 12);
        assert!(has_axiom(&t.validate().unwrap(), Axiom::V));

        // (vi): wrong node order on the child side
        let mut t = three_vertex_tree(1);
        t.vertices[2].form = Some(Form::new(
            RatFn::new(Poly::one(&t.field), poly_from(&t.field, &[-1, 0, 1])).unwrap(),
        ));
        assert!(has_axiom(&t.validate().unwrap(), Axiom::VI));

        // (vii): doubled root thickness
        let mut t = build_small_conductor(5, 2, 3, None, Some(vec![1, 2])).unwrap();
        t.edges[0].thickness = rat(2, 12);
        assert!(has_axiom(&t.validate().unwrap(), Axiom::VII));

        // (x): twist the form by z (also moves divisor support)
        let mut t = build_small_conductor(5, 2, 3, None, Some(vec![1, 2])).unwrap();
        let f = t.vertices[1].form.as_ref().unwrap().coefficient().clone();
        let twisted = f.mul(&RatFn::from_poly(poly_from(&t.field, &[0, 1])));
        t.vertices[1].form = Some(Form::new(twisted));
        assert!(has_axiom(&t.validate().unwrap(), Axiom::X));
    }

    #[test]
    fn inverse_tangent_characters_at_stabilized_nodes() {
        // p = 5, m = 4: a two-component chain with a c-fixed node; tangent
        // characters 2 and a^{-1} multiply to 1 iff a = 2
        let field = Gf::new(5, 1).unwrap();
        let dummy = Form::new(RatFn::new(Poly::one(&field), poly_from(&field, &[0, 1])).unwrap());
        let build = |a: i64| -> HurwitzTree {
            let id = [
                GfEl::one(&field),
                GfEl::zero(&field),
                GfEl::zero(&field),
                GfEl::one(&field),
            ];
            let m1 = [
                GfEl::from_i64(&field, 2),
                GfEl::zero(&field),
                GfEl::zero(&field),
                GfEl::one(&field),
            ];
            let m2 = [
                GfEl::from_i64(&field, a),
                GfEl::zero(&field),
                GfEl::zero(&field),
                GfEl::one(&field),
            ];
            HurwitzTree {
                p: 5,
                m: 4,
                chi: 2,
                field: field.clone(),
                vertices: vec![
                    HVertex { delta: rint(0), form: None },
                    HVertex { delta: rat(1, 2), form: Some(dummy.clone()) },
                    HVertex { delta: rint(1), form: Some(dummy.clone()) },
                ],
                edges: vec![
                    HEdge {
                        parent: 0,
                        child: 1,
                        thickness: rint(1),
                        node_parent: None,
                        node_child: P1Point::Infinity,
                    },
                    HEdge {
                        parent: 1,
                        child: 2,
                        thickness: rint(1),
                        node_parent: Some(P1Point::Finite(GfEl::zero(&field))),
                        node_child: P1Point::Infinity,
                    },
                ],
                marked: vec![],
                infty: (1, P1Point::Infinity),
                action: Some(TreeAction {
                    vertex_map: vec![0, 1, 2],
                    moebius: vec![id, m1, m2],
                }),
            }
        };
        // a = 2: tangent characters 2 (at z = 0 on v1) and 1/2 (at w =
        // infinity on v2): product 1, no (ix) violation
        let ok = build(2).validate().unwrap();
        assert!(!has_axiom(&ok, Axiom::IX), "{ok:?}");
        // a = 3: product 2 * 1/3 != 1
        let bad = build(3).validate().unwrap();
        assert!(has_axiom(&bad, Axiom::IX));
    }

    #[test]
    fn structural_errors_are_not_violations() {
        let mut t = build_small_conductor(5, 2, 3, None, Some(vec![1, 2])).unwrap();
        t.edges[0].child = 7; // dangling
        assert!(t.validate().is_err());
    }
}
