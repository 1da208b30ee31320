//! Stable models of marked open unit discs, encoded as cluster trees:
//! components are nested clusters of marked points cut out by valuation
//! inequalities, edges are annuli with rational thicknesses, and the
//! specialization map sends disc points to components, nodes, or the far
//! side of the root annulus.

use crate::error::{Error, Result};
use crate::padic::ring::PadicElem;
use crate::rat::{rint, Rat};
use std::collections::BTreeSet;
use std::fmt::Write as _;

/// Marked open unit disc: either explicit points of an Eisenstein ring or
/// just their pairwise-valuation matrix (exact rationals).
pub enum MarkedDisc {
    Points(Vec<PadicElem>),
    /// v[i][j] = v(x_i - x_j) for i != j; diagonal entries are ignored.
    Matrix(Vec<Vec<Rat>>),
}

impl MarkedDisc {
    /// Pairwise valuation matrix; validates positivity, distinctness, and
    /// the ultrametric triangle (the two smallest of any triple coincide).
    pub fn valuation_matrix(&self) -> Result<Vec<Vec<Rat>>> {
        let m = match self {
            MarkedDisc::Points(pts) => {
                if pts.len() < 2 {
                    return Err(Error::domain("a marked disc needs at least 2 points"));
                }
                for (i, x) in pts.iter().enumerate() {
                    match x.val()? {
                        None => {} // exactly zero: valuation +infinity > 0, fine
                        Some(v) if v > rint(0) => {}
                        _ => {
                            return Err(Error::domain(format!(
                                "marked point {i} is not in the open unit disc"
                            )))
                        }
                    }
                }
                let n = pts.len();
                let mut m = vec![vec![rint(0); n]; n];
                for i in 0..n {
                    for j in (i + 1)..n {
                        let d = pts[i].sub(&pts[j]);
                        let v = d.val().map_err(|_| {
                            Error::precision(format!(
                                "cannot separate marked points {i} and {j} at this precision"
                            ))
                        })?;
                        let v = v.ok_or_else(|| {
                            Error::domain(format!("marked points {i} and {j} coincide"))
                        })?;
                        m[i][j] = v;
                        m[j][i] = v;
                    }
                }
                m
            }
            MarkedDisc::Matrix(m) => {
                let n = m.len();
                if n < 2 {
                    return Err(Error::domain("a marked disc needs at least 2 points"));
                }
                for (i, row) in m.iter().enumerate() {
                    if row.len() != n {
                        return Err(Error::usage("valuation matrix is not square"));
                    }
                    for (j, v) in row.iter().enumerate() {
                        if i != j {
                            if *v != m[j][i] {
                                return Err(Error::domain("valuation matrix not symmetric"));
                            }
                            if *v <= rint(0) {
                                return Err(Error::domain(
                                    "pairwise valuations must be positive in the open disc",
                                ));
                            }
                        }
                    }
                }
                m.clone()
            }
        };
        // ultrametric triangle: the two smallest of any triple are equal
        let n = m.len();
        for i in 0..n {
            for j in (i + 1)..n {
                for k in (j + 1)..n {
                    let mut t = [m[i][j], m[j][k], m[i][k]];
                    t.sort();
                    if t[0] != t[1] {
                        return Err(Error::domain(format!(
                            "valuations of points {i},{j},{k} violate the ultrametric triangle"
                        )));
                    }
                }
            }
        }
        Ok(m)
    }
}

/// A vertex of the stable-model tree: a cluster of marked points with its
/// depth (minimal pairwise valuation inside).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cluster {
    pub id: usize,
    pub members: Vec<usize>,
    pub depth: Rat,
    pub parent: Option<usize>,
    /// Thickness of the edge to the parent (of the root annulus for the
    /// root cluster).
    pub thickness: Rat,
}

#[derive(Clone, Debug)]
pub struct ClusterTree {
    pub clusters: Vec<Cluster>,
    /// Index of the root (total) cluster.
    pub root: usize,
    pub valuations: Vec<Vec<Rat>>,
}

/// Where a point of the disc specializes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SpecializationTarget {
    /// Smooth locus of the component of this cluster.
    Component(usize),
    /// The node between this cluster and its parent (an open annulus).
    Node { child: usize },
    /// The far side of the root annulus.
    InfinitySide,
}

/// Build the stable-model tree of a marked disc: clusters are the
/// equivalence classes of v(x - y) >= d over the critical depths d; every
/// merge event produces a vertex with at least three special points.
pub fn cluster_tree(disc: &MarkedDisc) -> Result<ClusterTree> {
    let m = disc.valuation_matrix()?;
    let n = m.len();
    // critical depths, descending
    let mut depths: BTreeSet<Rat> = BTreeSet::new();
    for i in 0..n {
        for j in (i + 1)..n {
            depths.insert(m[i][j]);
        }
    }
    let depths: Vec<Rat> = depths.into_iter().rev().collect();

    // union-find over marked points
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        if parent[i] != i {
            let r = find(parent, parent[i]);
            parent[i] = r;
        }
        parent[i]
    }

    struct ProtoCluster {
        members: Vec<usize>,
        depth: Rat,
    }
    let mut protos: Vec<ProtoCluster> = vec![];
    for d in depths {
        let mut touched: Vec<usize> = vec![];
        for i in 0..n {
            for j in (i + 1)..n {
                if m[i][j] == d {
                    let ri = find(&mut parent, i);
                    let rj = find(&mut parent, j);
                    if ri != rj {
                        parent[ri] = rj;
                    }
                    touched.push(i);
                }
            }
        }
        let changed: BTreeSet<usize> = touched
            .into_iter()
            .map(|i| find(&mut parent, i))
            .collect();
        for root in changed {
            let members: Vec<usize> = (0..n).filter(|&i| find(&mut parent, i) == root).collect();
            protos.push(ProtoCluster { members, depth: d });
        }
    }
    let total = protos.last().ok_or_else(|| Error::domain("no clusters"))?;
    if total.members.len() != n {
        return Err(Error::domain("marked points do not form a single tree"));
    }

    // nesting: parent of a cluster is the smallest strictly larger cluster
    let mut clusters: Vec<Cluster> = vec![];
    for (id, pc) in protos.iter().enumerate() {
        let mut best: Option<(usize, usize)> = None; // (size, index)
        for (j, qc) in protos.iter().enumerate() {
            if j == id || qc.members.len() <= pc.members.len() {
                continue;
            }
            if pc.members.iter().all(|x| qc.members.contains(x)) {
                match best {
                    None => best = Some((qc.members.len(), j)),
                    Some((sz, _)) if qc.members.len() < sz => best = Some((qc.members.len(), j)),
                    _ => {}
                }
            }
        }
        let parent_idx = best.map(|(_, j)| j);
        let thickness = match parent_idx {
            Some(j) => pc.depth - protos[j].depth,
            None => pc.depth, // root edge: thickness = total-cluster depth
        };
        if thickness <= rint(0) {
            return Err(Error::domain("non-positive annulus thickness"));
        }
        clusters.push(Cluster {
            id,
            members: pc.members.clone(),
            depth: pc.depth,
            parent: parent_idx,
            thickness,
        });
    }
    let root = clusters
        .iter()
        .position(|c| c.parent.is_none())
        .ok_or_else(|| Error::domain("no root cluster"))?;
    // stability: every vertex carries >= 3 special points (child nodes plus
    // own marked points plus the node toward the parent or infinity)
    for c in &clusters {
        let child_clusters: Vec<&Cluster> =
            clusters.iter().filter(|k| k.parent == Some(c.id)).collect();
        let covered: BTreeSet<usize> = child_clusters
            .iter()
            .flat_map(|k| k.members.iter().copied())
            .collect();
        let own = c.members.iter().filter(|x| !covered.contains(x)).count();
        let special = child_clusters.len() + own + 1;
        if special < 3 {
            return Err(Error::domain(format!(
                "cluster {} is not stably marked",
                c.id
            )));
        }
    }
    Ok(ClusterTree {
        clusters,
        root,
        valuations: m,
    })
}

impl ClusterTree {
    /// Laminarity: any two clusters are nested or disjoint.
    pub fn is_laminar(&self) -> bool {
        for a in &self.clusters {
            for b in &self.clusters {
                let inter = a.members.iter().filter(|x| b.members.contains(x)).count();
                if inter > 0 && inter != a.members.len() && inter != b.members.len() {
                    return false;
                }
            }
        }
        true
    }

    /// Sum of thicknesses from the root annulus down to the cluster.
    pub fn path_thickness(&self, id: usize) -> Rat {
        let mut acc = rint(0);
        let mut cur = Some(id);
        while let Some(i) = cur {
            acc = acc + self.clusters[i].thickness;
            cur = self.clusters[i].parent;
        }
        acc
    }

    /// The deepest cluster containing a marked point.
    pub fn owner_of_marked(&self, point: usize) -> usize {
        let mut best: Option<&Cluster> = None;
        for c in &self.clusters {
            if c.members.contains(&point) {
                match best {
                    None => best = Some(c),
                    Some(b) if c.members.len() < b.members.len() => best = Some(c),
                    _ => {}
                }
            }
        }
        best.expect("total cluster contains every point").id
    }

    /// Specialize a disc point given its valuation distances to the marked
    /// points: dist[i] = v(x - x_i).
    pub fn specialize_by_distances(&self, dist: &[Rat]) -> Result<SpecializationTarget> {
        if dist.len() != self.valuations.len() {
            return Err(Error::usage("distance vector length mismatch"));
        }
        let root = &self.clusters[self.root];
        let m_root = root
            .members
            .iter()
            .map(|&i| dist[i])
            .min()
            .expect("nonempty cluster");
        if m_root < root.depth {
            return Ok(SpecializationTarget::InfinitySide);
        }
        let mut cur = self.root;
        loop {
            let c = &self.clusters[cur];
            let children: Vec<&Cluster> = self
                .clusters
                .iter()
                .filter(|k| k.parent == Some(c.id))
                .collect();
            let mut grabbed = None;
            for ch in children {
                let m_ch = ch.members.iter().map(|&i| dist[i]).min().unwrap();
                if m_ch > c.depth {
                    grabbed = Some((ch.id, m_ch, ch.depth));
                    break;
                }
            }
            match grabbed {
                None => {
                    // a fresh residue class on this component, or close to
                    // one of its own marked points
                    return Ok(SpecializationTarget::Component(c.id));
                }
                Some((child, m_ch, child_depth)) => {
                    if m_ch < child_depth {
                        return Ok(SpecializationTarget::Node { child });
                    }
                    cur = child;
                }
            }
        }
    }

    /// Specialize an explicit ring point against marked ring points.
    pub fn specialize_point(
        &self,
        x: &PadicElem,
        marked: &[PadicElem],
    ) -> Result<SpecializationTarget> {
        match x.val()? {
            None => {}
            Some(v) if v >= rint(0) => {}
            _ => return Err(Error::domain("point outside the closed unit disc")),
        }
        let mut dist = vec![];
        for (i, y) in marked.iter().enumerate() {
            let d = x.sub(y);
            match d.val()? {
                Some(v) => dist.push(v),
                None => {
                    return Err(Error::domain(format!(
                        "point coincides with marked point {i}"
                    )))
                }
            }
        }
        self.specialize_by_distances(&dist)
    }

    /// DOT rendering of the tree.
    pub fn to_dot(&self, labels: &[String]) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "digraph stable_model {{");
        let _ = writeln!(out, "  rankdir=TB;");
        let _ = writeln!(out, "  infty [label=\"infinity side\", shape=plaintext];");
        for c in &self.clusters {
            let pts: Vec<String> = c
                .members
                .iter()
                .map(|&i| labels.get(i).cloned().unwrap_or_else(|| format!("x{i}")))
                .collect();
            let _ = writeln!(
                out,
                "  c{} [label=\"depth {}\\n{{{}}}\", shape=box];",
                c.id,
                crate::rat::rat_to_string(&c.depth),
                pts.join(", ")
            );
        }
        for c in &self.clusters {
            match c.parent {
                Some(p) => {
                    let _ = writeln!(
                        out,
                        "  c{} -> c{} [label=\"{}\"];",
                        p,
                        c.id,
                        crate::rat::rat_to_string(&c.thickness)
                    );
                }
                None => {
                    let _ = writeln!(
                        out,
                        "  infty -> c{} [label=\"{}\"];",
                        c.id,
                        crate::rat::rat_to_string(&c.thickness)
                    );
                }
            }
        }
        let _ = writeln!(out, "}}");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::ring::EisRing;
    use crate::rat::rat;

    /// The worked example over Z_5[a]/(a^2 - 5): marked disc
    /// (0, 5, 10, 25, 5a, 5 + 5a).
    fn example_points() -> (std::sync::Arc<EisRing>, Vec<PadicElem>) {
        let ring = EisRing::new(5, vec![-5, 0], 24).unwrap();
        let a = PadicElem::pi(&ring);
        let five = PadicElem::from_i128(&ring, 5);
        let pts = vec![
            PadicElem::zero(&ring),
            five.clone(),
            PadicElem::from_i128(&ring, 10),
            PadicElem::from_i128(&ring, 25),
            five.mul(&a),
            five.add(&five.mul(&a)),
        ];
        (ring, pts)
    }

    #[test]
    fn worked_example_components_and_thicknesses() {
        let (_ring, pts) = example_points();
        let tree = cluster_tree(&MarkedDisc::Points(pts)).unwrap();
        assert_eq!(tree.clusters.len(), 4);
        assert!(tree.is_laminar());
        // depths: total 1, {0,25,5a} 3/2, {5,5+5a} 3/2, {0,25} 2
        let mut depths: Vec<Rat> = tree.clusters.iter().map(|c| c.depth).collect();
        depths.sort();
        assert_eq!(depths, vec![rint(1), rat(3, 2), rat(3, 2), rint(2)]);
        // thicknesses: root 1, internal 1/2 each
        let root = &tree.clusters[tree.root];
        assert_eq!(root.thickness, rint(1));
        let mut inner: Vec<Rat> = tree
            .clusters
            .iter()
            .filter(|c| c.parent.is_some())
            .map(|c| c.thickness)
            .collect();
        inner.sort();
        assert_eq!(inner, vec![rat(1, 2), rat(1, 2), rat(1, 2)]);
        // path thickness equals depth
        for c in &tree.clusters {
            assert_eq!(tree.path_thickness(c.id), c.depth);
        }
    }

    #[test]
    fn two_point_disc() {
        let ring = EisRing::new(5, vec![-5, 0], 24).unwrap();
        let a = PadicElem::pi(&ring);
        let tree = cluster_tree(&MarkedDisc::Points(vec![a.clone(), a.neg()])).unwrap();
        assert_eq!(tree.clusters.len(), 1);
        // depth = v(2a) = 1/2 = root thickness
        assert_eq!(tree.clusters[0].depth, rat(1, 2));
        assert_eq!(tree.clusters[0].thickness, rat(1, 2));
    }

    #[test]
    fn matrix_input_and_ultrametric_validation() {
        // triangle with valuations (1, 1, 2): fine
        let m = vec![
            vec![rint(0), rint(1), rint(2)],
            vec![rint(1), rint(0), rint(1)],
            vec![rint(2), rint(1), rint(0)],
        ];
        let tree = cluster_tree(&MarkedDisc::Matrix(m)).unwrap();
        assert_eq!(tree.clusters.len(), 2);
        // (1, 2, 3) violates the triangle
        let bad = vec![
            vec![rint(0), rint(1), rint(2)],
            vec![rint(1), rint(0), rint(3)],
            vec![rint(2), rint(3), rint(0)],
        ];
        assert!(cluster_tree(&MarkedDisc::Matrix(bad)).is_err());
    }

    #[test]
    fn coincident_points_error() {
        let ring = EisRing::new(5, vec![-5, 0], 24).unwrap();
        let five = PadicElem::from_i128(&ring, 5);
        assert!(cluster_tree(&MarkedDisc::Points(vec![five.clone(), five.clone()])).is_err());
    }

    #[test]
    fn specialization_rows_of_the_worked_example() {
        let (ring, pts) = example_points();
        let tree = cluster_tree(&MarkedDisc::Points(pts.clone())).unwrap();
        let cluster_by_members = |want: &[usize]| -> usize {
            tree.clusters
                .iter()
                .find(|c| c.members == want)
                .map(|c| c.id)
                .unwrap()
        };
        let c_total = cluster_by_members(&[0, 1, 2, 3, 4, 5]);
        let c_025a = cluster_by_members(&[0, 3, 4]);
        let c_5 = cluster_by_members(&[1, 5]);
        let c_025 = cluster_by_members(&[0, 3]);
        let a = PadicElem::pi(&ring);
        // v(x) < 1: infinity side
        assert_eq!(
            tree.specialize_point(&a, &pts).unwrap(),
            SpecializationTarget::InfinitySide
        );
        // v(x) >= 2: component of {0, 25} (x = 150 = 25 + 125)
        let x = PadicElem::from_i128(&ring, 150);
        assert_eq!(
            tree.specialize_point(&x, &pts).unwrap(),
            SpecializationTarget::Component(c_025)
        );
        // v(x) = 3/2 fresh residue: component of {0, 25, 5a} (x = 10a)
        let x = PadicElem::from_i128(&ring, 10).mul(&a);
        assert_eq!(
            tree.specialize_point(&x, &pts).unwrap(),
            SpecializationTarget::Component(c_025a)
        );
        // 1 < v(x) < 3/2: node between total and {0, 25, 5a}
        let dist = vec![rat(5, 4), rint(1), rint(1), rat(5, 4), rat(5, 4), rint(1)];
        assert_eq!(
            tree.specialize_by_distances(&dist).unwrap(),
            SpecializationTarget::Node { child: c_025a }
        );
        // 3/2 < v(x) < 2: node between {0, 25, 5a} and {0, 25}
        let dist = vec![rat(7, 4), rint(1), rint(1), rat(7, 4), rat(3, 2), rint(1)];
        assert_eq!(
            tree.specialize_by_distances(&dist).unwrap(),
            SpecializationTarget::Node { child: c_025 }
        );
        // v(x) = 1 and v(x - 5) = 1: interior of the total component
        let x = PadicElem::from_i128(&ring, 10).add(&PadicElem::from_i128(&ring, 5).mul(&a));
        assert_eq!(
            tree.specialize_point(&x, &pts).unwrap(),
            SpecializationTarget::Component(c_total)
        );
        // v(x - 5) >= 3/2: component of {5, 5 + 5a} (x = 5 + 25a)
        let x = PadicElem::from_i128(&ring, 5).add(&PadicElem::from_i128(&ring, 25).mul(&a));
        assert_eq!(
            tree.specialize_point(&x, &pts).unwrap(),
            SpecializationTarget::Component(c_5)
        );
        // 1 < v(x - 5) < 3/2: node between total and {5, 5 + 5a}
        let dist = vec![rint(1), rat(5, 4), rint(1), rint(1), rint(1), rat(5, 4)];
        assert_eq!(
            tree.specialize_by_distances(&dist).unwrap(),
            SpecializationTarget::Node { child: c_5 }
        );
        // marked-point ownership
        assert_eq!(tree.owner_of_marked(2), c_total);
        assert_eq!(tree.owner_of_marked(4), c_025a);
    }
}
