//! Finite metacyclic groups Z/p^n x| Z/m and (Z/p)^2, subgroup enumeration
//! by brute-force closure, branch cycle descriptions, and ramification-
//! divisor degrees on both sides of a Katz-Gabber comparison.
//!
//! Elements are pairs (a, b) with multiplication
//! (a, b)(a', b') = (a + chi^b a', b + b'); the Katz-Gabber geometry is
//! modeled by exactly two branch points: one totally (wildly) ramified and
//! one tame of index m.

use crate::error::{Error, Result};
use std::collections::BTreeSet;

pub type El = (u64, u64);

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupKind {
    /// Z/p^n x|_chi Z/m, chi the unit by which the generator of Z/m acts.
    Metacyclic { p: u64, n: u32, m: u64, chi: u64 },
    /// (Z/p)^2, written additively.
    Bicyclic { p: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    pub kind: GroupKind,
    mod_a: u64,
    mod_b: u64,
    /// chi^b mod p^n for each b (metacyclic); empty for bicyclic.
    chi_pow: Vec<u64>,
}

pub type Subgroup = Vec<El>; // sorted, deduplicated

impl FiniteGroup {
    pub fn metacyclic(p: u64, n: u32, m: u64, chi: u64) -> Result<FiniteGroup> {
        if n == 0 || m == 0 {
            return Err(Error::domain("metacyclic parameters must be positive"));
        }
        let pn = p.checked_pow(n).ok_or_else(|| Error::domain("p^n overflow"))?;
        if m % p == 0 {
            return Err(Error::domain("m must be prime to p"));
        }
        if pn.checked_mul(m).map(|o| o > 10_000).unwrap_or(true) {
            return Err(Error::domain("group order above the brute-force limit 10^4"));
        }
        let chi = chi % pn;
        if num::integer::gcd(chi, pn) != 1 {
            return Err(Error::domain("chi must be a unit modulo p^n"));
        }
        // chi must have order dividing m
        let mut chi_pow = Vec::with_capacity(m as usize);
        let mut acc = 1u64;
        for _ in 0..m {
            chi_pow.push(acc);
            acc = acc * chi % pn;
        }
        if acc != 1 {
            return Err(Error::domain("chi^m != 1: not an action of Z/m"));
        }
        Ok(FiniteGroup {
            kind: GroupKind::Metacyclic { p, n, m, chi },
            mod_a: pn,
            mod_b: m,
            chi_pow,
        })
    }

    pub fn bicyclic(p: u64) -> Result<FiniteGroup> {
        if p * p > 10_000 {
            return Err(Error::domain("group order above the brute-force limit 10^4"));
        }
        Ok(FiniteGroup {
            kind: GroupKind::Bicyclic { p },
            mod_a: p,
            mod_b: p,
            chi_pow: vec![],
        })
    }

    pub fn order(&self) -> u64 {
        self.mod_a * self.mod_b
    }

    pub fn p(&self) -> u64 {
        match self.kind {
            GroupKind::Metacyclic { p, .. } => p,
            GroupKind::Bicyclic { p } => p,
        }
    }

    pub fn id(&self) -> El {
        (0, 0)
    }

    pub fn op(&self, x: El, y: El) -> El {
        match self.kind {
            GroupKind::Metacyclic { .. } => {
                let twist = self.chi_pow[x.1 as usize];
                (
                    (x.0 + twist * y.0) % self.mod_a,
                    (x.1 + y.1) % self.mod_b,
                )
            }
            GroupKind::Bicyclic { .. } => {
                ((x.0 + y.0) % self.mod_a, (x.1 + y.1) % self.mod_b)
            }
        }
    }

    pub fn inv(&self, x: El) -> El {
        // brute order-based inverse is fine at this scale
        let mut y = x;
        let mut prev = self.id();
        while y != self.id() {
            prev = y;
            y = self.op(y, x);
        }
        if x == self.id() {
            self.id()
        } else {
            prev
        }
    }

    pub fn el_order(&self, x: El) -> u64 {
        let mut k = 1;
        let mut y = x;
        while y != self.id() {
            y = self.op(y, x);
            k += 1;
        }
        k
    }

    pub fn elements(&self) -> Vec<El> {
        let mut out = Vec::with_capacity(self.order() as usize);
        for a in 0..self.mod_a {
            for b in 0..self.mod_b {
                out.push((a, b));
            }
        }
        out
    }

    /// Closure of a seed set under the group operation and inverses.
    pub fn closure(&self, seed: &[El]) -> Subgroup {
        let mut set: BTreeSet<El> = BTreeSet::new();
        set.insert(self.id());
        let mut frontier: Vec<El> = seed.to_vec();
        while let Some(x) = frontier.pop() {
            if set.contains(&x) {
                continue;
            }
            set.insert(x);
            let snapshot: Vec<El> = set.iter().copied().collect();
            for y in snapshot {
                for z in [self.op(x, y), self.op(y, x)] {
                    if !set.contains(&z) {
                        frontier.push(z);
                    }
                }
            }
        }
        set.into_iter().collect()
    }

    pub fn cyclic_subgroup(&self, x: El) -> Subgroup {
        let mut set = BTreeSet::new();
        let mut y = self.id();
        loop {
            set.insert(y);
            y = self.op(y, x);
            if y == self.id() {
                break;
            }
        }
        set.into_iter().collect()
    }

    /// All subgroups, by join-closure from the cyclic subgroups. Subgroups
    /// of these (metacyclic or elementary bicyclic) groups are 2-generated,
    /// so pairwise joins reach everything; the fixpoint loop covers the rest
    /// regardless.
    pub fn subgroups(&self) -> Result<Vec<Subgroup>> {
        if self.order() > 10_000 {
            return Err(Error::domain("group order above the brute-force limit 10^4"));
        }
        let mut subs: BTreeSet<Subgroup> = BTreeSet::new();
        for x in self.elements() {
            subs.insert(self.cyclic_subgroup(x));
        }
        loop {
            let list: Vec<Subgroup> = subs.iter().cloned().collect();
            let mut grew = false;
            for i in 0..list.len() {
                for j in (i + 1)..list.len() {
                    let mut seed = list[i].clone();
                    seed.extend_from_slice(&list[j]);
                    let joined = self.closure(&seed);
                    if !subs.contains(&joined) {
                        subs.insert(joined);
                        grew = true;
                    }
                }
            }
            if !grew {
                break;
            }
        }
        Ok(subs.into_iter().collect())
    }

    pub fn is_subgroup(&self, h: &Subgroup) -> bool {
        let set: BTreeSet<El> = h.iter().copied().collect();
        if !set.contains(&self.id()) {
            return false;
        }
        for &x in h {
            for &y in h {
                if !set.contains(&self.op(x, y)) {
                    return false;
                }
            }
        }
        true
    }

    pub fn generates(&self, tuple: &[El]) -> bool {
        self.closure(tuple).len() as u64 == self.order()
    }

    /// The standard tame complement <(0, 1)> (trivial for bicyclic groups,
    /// which have m = 1 in the Katz-Gabber picture).
    pub fn tame_complement(&self) -> Subgroup {
        match self.kind {
            GroupKind::Metacyclic { .. } => self.cyclic_subgroup((0, 1)),
            GroupKind::Bicyclic { .. } => vec![self.id()],
        }
    }
}

/// Ordered tuple (g_1, ..., g_s) of non-identity elements with product one
/// that generates the group; encodes a characteristic-zero cover of the
/// line branched at s points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BranchCycleDescription {
    pub tuple: Vec<El>,
}

impl BranchCycleDescription {
    pub fn new(g: &FiniteGroup, tuple: Vec<El>) -> Result<BranchCycleDescription> {
        for &x in &tuple {
            if x == g.id() {
                return Err(Error::domain("branch cycle description contains the identity"));
            }
        }
        let mut prod = g.id();
        for &x in &tuple {
            prod = g.op(prod, x);
        }
        if prod != g.id() {
            return Err(Error::domain("branch cycle description product is not one"));
        }
        if !g.generates(&tuple) {
            return Err(Error::domain("branch cycle description does not generate"));
        }
        Ok(BranchCycleDescription { tuple })
    }
}

/// Subgroup-valued ramification filtration at the wild point: G_0 is the
/// whole group; `breaks` lists (integer threshold t, subgroup strictly
/// after t), ending with the trivial subgroup.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubgroupFiltration {
    pub breaks: Vec<(i64, Subgroup)>,
}

impl SubgroupFiltration {
    pub fn new(g: &FiniteGroup, breaks: Vec<(i64, Subgroup)>) -> Result<SubgroupFiltration> {
        let mut prev_t = -1i64;
        let mut prev_len = g.order() as usize;
        for (t, h) in &breaks {
            if *t < 0 || *t <= prev_t {
                return Err(Error::domain("filtration thresholds must strictly increase"));
            }
            if !g.is_subgroup(h) {
                return Err(Error::domain("filtration step is not a subgroup"));
            }
            if h.len() >= prev_len {
                return Err(Error::domain("filtration subgroups must strictly shrink"));
            }
            prev_t = *t;
            prev_len = h.len();
        }
        match breaks.last() {
            Some((_, h)) if h.len() == 1 => {}
            _ => return Err(Error::domain("filtration must end with the trivial subgroup")),
        }
        Ok(SubgroupFiltration { breaks })
    }

    /// |G_j cap .| step lookup: the subgroup at integer index j >= 0.
    pub fn group_at<'a>(&'a self, g: &'a FiniteGroup, j: i64, full: &'a [El]) -> &'a [El] {
        let _ = g;
        let mut cur: &[El] = full;
        for (t, h) in &self.breaks {
            if j > *t {
                cur = h;
            } else {
                break;
            }
        }
        cur
    }

    pub fn max_threshold(&self) -> i64 {
        self.breaks.last().map(|(t, _)| *t).unwrap_or(0)
    }
}

/// Wild filtration of a (Z/p)^2 Katz-Gabber cover with lower jumps
/// (m1, m2): G_j = G for j <= m1, then <(1,0)> up to m2, then trivial.
pub fn bicyclic_wild_filtration(
    g: &FiniteGroup,
    m1: i64,
    m2: i64,
) -> Result<SubgroupFiltration> {
    if !matches!(g.kind, GroupKind::Bicyclic { .. }) {
        return Err(Error::usage("bicyclic filtration on a non-bicyclic group"));
    }
    if m1 <= 0 || m2 < m1 {
        return Err(Error::domain("need 0 < m1 <= m2"));
    }
    let p = g.p() as i64;
    if m1 % p == 0 || m2 % p == 0 {
        return Err(Error::domain("lower jumps of a (Z/p)^2-extension are prime to p"));
    }
    if (m2 - m1) % p != 0 {
        return Err(Error::domain("lower jumps must satisfy m1 = m2 mod p"));
    }
    let trivial = vec![g.id()];
    if m1 == m2 {
        SubgroupFiltration::new(g, vec![(m1, trivial)])
    } else {
        let h = g.cyclic_subgroup((1, 0));
        SubgroupFiltration::new(g, vec![(m1, h), (m2, trivial)])
    }
}

/// Wild filtration of a Z/p^n x| Z/m Katz-Gabber cover with (rational)
/// upper jumps u_1 < ... < u_n: below the first lower jump the p-Sylow is
/// full, and the order drops by p at each lower jump
/// l_i = m * sum_{k <= i} p^{k-1}(u_k - u_{k-1}).
pub fn metacyclic_wild_filtration(
    g: &FiniteGroup,
    uppers: &[crate::rat::Rat],
) -> Result<SubgroupFiltration> {
    let (p, n, m) = match g.kind {
        GroupKind::Metacyclic { p, n, m, .. } => (p, n, m),
        _ => return Err(Error::usage("metacyclic filtration on a non-metacyclic group")),
    };
    if uppers.len() != n as usize {
        return Err(Error::domain(format!(
            "need exactly n = {n} upper jumps, got {}",
            uppers.len()
        )));
    }
    let pn = p.pow(n);
    let sylow: Subgroup = (0..pn).map(|a| (a, 0)).collect();
    let mut breaks: Vec<(i64, Subgroup)> = vec![(0, sylow)];
    let mut acc = crate::rat::rint(0);
    let mut prev = crate::rat::rint(0);
    for (i, &u) in uppers.iter().enumerate() {
        if u <= prev && !(i == 0 && u > crate::rat::rint(0)) {
            if u <= prev {
                return Err(Error::domain("upper jumps must strictly increase"));
            }
        }
        acc = acc
            + crate::rat::rint(p.pow(i as u32) as i64)
                * crate::rat::rint(m as i64)
                * (u - prev);
        if !crate::rat::is_integer(&acc) {
            return Err(Error::domain(format!(
                "lower jump {acc} is not an integer; inadmissible upper jumps"
            )));
        }
        let li = crate::rat::rat_floor(&acc);
        let order_after = p.pow(n - 1 - i as u32);
        let sub: Subgroup = (0..order_after)
            .map(|a| ((a * p.pow(i as u32 + 1)) % pn, 0))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        breaks.push((li, sub));
        prev = u;
    }
    SubgroupFiltration::new(g, breaks)
}

/// Tame ramification divisor degree of X -> X/H for the characteristic-zero
/// cover with branch cycle description `bcd`: for each branch point i and
/// each coset a<g_i>, the point contributes |H cap a <g_i> a^{-1}| - 1.
pub fn ram_divisor_char0(g: &FiniteGroup, bcd: &BranchCycleDescription, h: &Subgroup) -> u64 {
    let mut total = 0u64;
    for &gi in &bcd.tuple {
        total += char0_point_contribution(g, gi, h);
    }
    total
}

fn char0_point_contribution(g: &FiniteGroup, gi: El, h: &Subgroup) -> u64 {
    let cyc = g.cyclic_subgroup(gi);
    let cyc_set: BTreeSet<El> = cyc.iter().copied().collect();
    let mut seen_cosets: BTreeSet<Vec<El>> = BTreeSet::new();
    let mut total = 0u64;
    for a in g.elements() {
        let coset: Vec<El> = {
            let mut c: Vec<El> = cyc_set.iter().map(|&x| g.op(a, x)).collect();
            c.sort_unstable();
            c
        };
        if !seen_cosets.insert(coset) {
            continue;
        }
        let ainv = g.inv(a);
        let conj: BTreeSet<El> = cyc_set
            .iter()
            .map(|&x| g.op(g.op(a, x), ainv))
            .collect();
        let inter = h.iter().filter(|x| conj.contains(x)).count() as u64;
        total += inter - 1;
    }
    total
}

/// Ramification divisor degree of Y -> Y/H for the Katz-Gabber cover in
/// characteristic p: the wild point contributes sum_{j>=0} (|H cap G_j| - 1)
/// and the tame point contributes per-point coset terms exactly as in
/// characteristic zero.
pub fn ram_divisor_charp(
    g: &FiniteGroup,
    wild: &SubgroupFiltration,
    h: &Subgroup,
) -> Result<u64> {
    if !g.is_subgroup(h) {
        return Err(Error::domain("H is not a subgroup"));
    }
    let full = g.elements();
    let mut total = 0u64;
    for j in 0..=wild.max_threshold() {
        let gj = wild.group_at(g, j, &full);
        let set: BTreeSet<El> = gj.iter().copied().collect();
        let inter = h.iter().filter(|x| set.contains(x)).count() as u64;
        total += inter - 1;
    }
    // tame point: inertia runs over the conjugates of the standard
    // complement, one per coset
    match g.kind {
        GroupKind::Metacyclic { m, .. } if m > 1 => {
            total += char0_point_contribution(g, (0, 1), h);
        }
        _ => {}
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat, rint};

    #[test]
    fn subgroup_counts() {
        // (Z/3)^2: 6 subgroups
        let g = FiniteGroup::bicyclic(3).unwrap();
        assert_eq!(g.subgroups().unwrap().len(), 6);
        // D_5: 8 subgroups
        let d5 = FiniteGroup::metacyclic(5, 1, 2, 4).unwrap();
        assert_eq!(d5.subgroups().unwrap().len(), 8);
        // Z/9 x| Z/2 with chi = -1: 1, 2(x9), 3, 9, 6(x3), 18 -> count 16
        let g18 = FiniteGroup::metacyclic(3, 2, 2, 8).unwrap();
        let subs = g18.subgroups().unwrap();
        // independent oracle: closures of all <=2-element subsets
        let mut oracle: BTreeSet<Subgroup> = BTreeSet::new();
        for x in g18.elements() {
            for y in g18.elements() {
                oracle.insert(g18.closure(&[x, y]));
            }
        }
        assert_eq!(subs.len(), oracle.len());
        for s in &subs {
            assert!(g18.is_subgroup(s));
        }
    }

    #[test]
    fn dihedral_filtration_and_divisors() {
        // D_3, h = 1: upper jumps (1/2); R_Y(G) = 10
        let d3 = FiniteGroup::metacyclic(3, 1, 2, 2).unwrap();
        let wild = metacyclic_wild_filtration(&d3, &[rat(1, 2)]).unwrap();
        let full = d3.elements();
        assert_eq!(ram_divisor_charp(&d3, &wild, &full).unwrap(), 10);
        // trivial H contributes 0
        assert_eq!(
            ram_divisor_charp(&d3, &wild, &vec![d3.id()]).unwrap(),
            0
        );
        // char-0 side with the bcd (s, sr, r^2): also 10
        let bcd = BranchCycleDescription::new(&d3, vec![(0, 1), (1, 1), (1, 0)]).unwrap();
        assert_eq!(ram_divisor_char0(&d3, &bcd, &full), 10);
        assert_eq!(ram_divisor_char0(&d3, &bcd, &vec![d3.id()]), 0);
    }

    #[test]
    fn bicyclic_filtration_rows() {
        // (Z/3)^2, jumps (2, 5): H = <(1,0)> gets (m2+1)(p-1) = 12
        let g = FiniteGroup::bicyclic(3).unwrap();
        let wild = bicyclic_wild_filtration(&g, 2, 5).unwrap();
        let h = g.cyclic_subgroup((1, 0));
        assert_eq!(ram_divisor_charp(&g, &wild, &h).unwrap(), 12);
        // any other order-3 subgroup gets (m1+1)(p-1) = 6
        let h2 = g.cyclic_subgroup((0, 1));
        assert_eq!(ram_divisor_charp(&g, &wild, &h2).unwrap(), 6);
        // full group: (m1+1)(p^2-1) + (m2-m1)(p-1) = 24 + 6 = 30
        let full = g.elements();
        assert_eq!(ram_divisor_charp(&g, &wild, &full).unwrap(), 30);
    }

    #[test]
    fn tame_hurwitz_identity() {
        // ram_divisor_char0(bcd, G) = sum_i (|G|/ord(g_i)) (ord(g_i) - 1)
        let d5 = FiniteGroup::metacyclic(5, 1, 2, 4).unwrap();
        let full = d5.elements();
        let bcd = BranchCycleDescription::new(&d5, vec![(0, 1), (1, 1), (1, 0)]).unwrap();
        let expect: u64 = bcd
            .tuple
            .iter()
            .map(|&x| {
                let o = d5.el_order(x);
                (d5.order() / o) * (o - 1)
            })
            .sum();
        assert_eq!(ram_divisor_char0(&d5, &bcd, &full), expect);
    }

    #[test]
    fn charp_divisor_monotone_in_subgroup() {
        let g18 = FiniteGroup::metacyclic(3, 2, 2, 8).unwrap();
        let wild = metacyclic_wild_filtration(&g18, &[rat(1, 2), rat(3, 2)]).unwrap();
        let subs = g18.subgroups().unwrap();
        for a in &subs {
            for b in &subs {
                let a_in_b = a.iter().all(|x| b.contains(x));
                if a_in_b {
                    assert!(
                        ram_divisor_charp(&g18, &wild, a).unwrap()
                            <= ram_divisor_charp(&g18, &wild, b).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn metacyclic_lower_jumps_from_uppers() {
        // Z/9 x| Z/2, h = 1: uppers (1/2, 3/2), lower jumps at 1 and 7
        let g18 = FiniteGroup::metacyclic(3, 2, 2, 8).unwrap();
        let wild = metacyclic_wild_filtration(&g18, &[rat(1, 2), rat(3, 2)]).unwrap();
        assert_eq!(wild.breaks[0].0, 0);
        assert_eq!(wild.breaks[1].0, 1);
        assert_eq!(wild.breaks[2].0, 7);
        assert_eq!(wild.breaks[0].1.len(), 9);
        assert_eq!(wild.breaks[1].1.len(), 3);
        assert_eq!(wild.breaks[2].1.len(), 1);
        // full-group different: 17 + 8 + 6*2 = 37 at the wild point, plus 9
        // tame -> 46
        let full = g18.elements();
        assert_eq!(ram_divisor_charp(&g18, &wild, &full).unwrap(), 46);
        let _ = rint(0);
    }
}
