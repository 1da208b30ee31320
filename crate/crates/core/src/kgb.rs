//! KGB obstruction predicates and characteristic-zero witness search.
//!
//! The obstruction vanishes when some characteristic-zero cover of the line
//! matches the Katz-Gabber cover's ramification-divisor degree for every
//! subgroup. The search fixes the possible branch-point shapes from the
//! H = G degree budget (each tuple slot of element order d consumes
//! (|G|/d)(d-1)), then enumerates tuples with product-one and generation
//! pruning. A `None` result is a proof of non-vanishing within the searched
//! shape class.

use crate::error::{Error, Result};
use crate::groups::{
    bicyclic_wild_filtration, metacyclic_wild_filtration, ram_divisor_char0, ram_divisor_charp,
    BranchCycleDescription, El, FiniteGroup, Subgroup, SubgroupFiltration,
};
use crate::rat::{rat, Rat};

#[derive(Clone, Debug)]
pub struct TableRow {
    pub subgroup: Subgroup,
    pub r_char0: u64,
    pub r_charp: u64,
}

#[derive(Clone, Debug)]
pub struct KgbVerdict {
    pub vanishes: bool,
    pub witness: Option<BranchCycleDescription>,
    pub table: Vec<TableRow>,
}

/// Predicate for G = Z/p x Z/p with lower jumps (m1, m2): vanishes iff
/// m1 = -1 mod p, except for (p, m1, m2) = (3, 2, 2).
pub fn kgb_zpzp(p: u64, m1: i64, m2: i64) -> Result<KgbVerdict> {
    if p < 3 {
        return Err(Error::domain("bicyclic predicate requires p > 2"));
    }
    if m1 <= 0 || m1 > m2 {
        return Err(Error::domain("need 0 < m1 <= m2"));
    }
    let pi = p as i64;
    if m1 % pi == 0 || m2 % pi == 0 {
        return Err(Error::domain("lower jumps must be prime to p"));
    }
    if (m2 - m1) % pi != 0 {
        return Err(Error::domain("lower jumps must satisfy m1 = m2 (mod p)"));
    }
    let vanishes = (m1 + 1) % pi == 0 && !(p == 3 && m1 == 2 && m2 == 2);
    Ok(KgbVerdict {
        vanishes,
        witness: None,
        table: vec![],
    })
}

/// Predicate for non-cyclic G = Z/p^n x| Z/m with first positive lower jump
/// h: vanishes iff h = -1 mod m (and then the action is necessarily
/// faithful).
pub fn kgb_metacyclic(p: u64, n: u32, m: u64, chi: u64, h: i64) -> Result<KgbVerdict> {
    let _g = FiniteGroup::metacyclic(p, n, m, chi)?;
    let pn = p.pow(n);
    let chi = chi % pn;
    if chi == 1 {
        return Err(Error::domain(
            "group is cyclic: use the cyclic path (different criterion), not the KGB predicate",
        ));
    }
    if h <= 0 {
        return Err(Error::domain("lower jump must be positive"));
    }
    let vanishes = (h + 1) % m as i64 == 0;
    if vanishes {
        // the action must be faithful for such an extension to exist
        let mut ord = 1u64;
        let mut acc = chi;
        while acc != 1 {
            acc = acc * chi % pn;
            ord += 1;
        }
        if ord != m {
            return Err(Error::domain(
                "inconsistent input: h = -1 (mod m) forces a faithful conjugation action",
            ));
        }
    }
    Ok(KgbVerdict {
        vanishes,
        witness: None,
        table: vec![],
    })
}

/// Search bounds: a hard cap on the number of partial tuples explored.
#[derive(Clone, Copy, Debug)]
pub struct SearchBounds {
    pub max_nodes: u64,
}

impl Default for SearchBounds {
    fn default() -> Self {
        SearchBounds {
            max_nodes: 50_000_000,
        }
    }
}

/// Exhaustive witness search over branch-cycle tuples whose per-subgroup
/// characteristic-zero ramification divisors match the Katz-Gabber side.
pub fn kgb_witness_search(
    g: &FiniteGroup,
    wild: &SubgroupFiltration,
    bounds: SearchBounds,
) -> Result<Option<KgbVerdict>> {
    let subs = g.subgroups()?;
    let full = g.elements();
    let mut targets: Vec<(Subgroup, u64)> = vec![];
    for h in &subs {
        targets.push((h.clone(), ram_divisor_charp(g, wild, h)?));
    }
    let budget = ram_divisor_charp(g, wild, &full)?;

    // distinct element orders > 1
    let mut orders: Vec<u64> = g
        .elements()
        .into_iter()
        .filter(|&x| x != g.id())
        .map(|x| g.el_order(x))
        .collect();
    orders.sort_unstable();
    orders.dedup();
    // contribution of a tuple slot of element order d to the H = G row
    let contribution = |d: u64| -> u64 { (g.order() / d) * (d - 1) };

    // elements grouped by order, deterministic
    let by_order: Vec<(u64, Vec<El>)> = orders
        .iter()
        .map(|&d| {
            (
                d,
                g.elements()
                    .into_iter()
                    .filter(|&x| x != g.id() && g.el_order(x) == d)
                    .collect(),
            )
        })
        .collect();

    // enumerate compositions: how many slots of each order
    fn compose(
        orders: &[u64],
        contribution: &dyn Fn(u64) -> u64,
        remaining: u64,
        acc: &mut Vec<(u64, u64)>,
        out: &mut Vec<Vec<(u64, u64)>>,
    ) {
        if orders.is_empty() {
            if remaining == 0 && acc.iter().map(|&(_, k)| k).sum::<u64>() >= 2 {
                out.push(acc.clone());
            }
            return;
        }
        let d = orders[0];
        let c = contribution(d);
        let max_k = remaining / c;
        for k in (0..=max_k).rev() {
            acc.push((d, k));
            compose(&orders[1..], contribution, remaining - k * c, acc, out);
            acc.pop();
        }
    }
    let mut compositions: Vec<Vec<(u64, u64)>> = vec![];
    compose(
        &orders,
        &contribution,
        budget,
        &mut vec![],
        &mut compositions,
    );

    let mut nodes = 0u64;
    for comp in &compositions {
        // slot orders, largest first
        let mut slots: Vec<u64> = vec![];
        for &(d, k) in comp.iter().rev() {
            for _ in 0..k {
                slots.push(d);
            }
        }
        if slots.len() < 2 {
            continue;
        }
        if let Some(t) = dfs_tuples(g, &by_order, &slots, &targets, &mut nodes, bounds)? {
            let bcd = BranchCycleDescription::new(g, t)?;
            let mut table = vec![];
            for (h, rp) in &targets {
                table.push(TableRow {
                    subgroup: h.clone(),
                    r_char0: ram_divisor_char0(g, &bcd, h),
                    r_charp: *rp,
                });
            }
            return Ok(Some(KgbVerdict {
                vanishes: true,
                witness: Some(bcd),
                table,
            }));
        }
    }
    Ok(None)
}

fn dfs_tuples(
    g: &FiniteGroup,
    by_order: &[(u64, Vec<El>)],
    slots: &[u64],
    targets: &[(Subgroup, u64)],
    nodes: &mut u64,
    bounds: SearchBounds,
) -> Result<Option<Vec<El>>> {
    #[allow(clippy::too_many_arguments)]
    fn rec(
        g: &FiniteGroup,
        by_order: &[(u64, Vec<El>)],
        slots: &[u64],
        targets: &[(Subgroup, u64)],
        tuple: &mut Vec<El>,
        prefix: El,
        nodes: &mut u64,
        bounds: SearchBounds,
    ) -> Result<Option<Vec<El>>> {
        *nodes += 1;
        if *nodes > bounds.max_nodes {
            return Err(Error::domain(
                "witness search bound overflow; raise SearchBounds::max_nodes",
            ));
        }
        let depth = tuple.len();
        if depth == slots.len() - 1 {
            // the last slot is forced by product-one
            let last = g.inv(prefix);
            if last == g.id() || g.el_order(last) != slots[depth] {
                return Ok(None);
            }
            tuple.push(last);
            let ok = check_candidate(g, tuple, targets);
            let out = if ok { Some(tuple.clone()) } else { None };
            tuple.pop();
            return Ok(out);
        }
        let list = &by_order
            .iter()
            .find(|(d, _)| *d == slots[depth])
            .expect("order class exists")
            .1;
        for &x in list {
            tuple.push(x);
            let r = rec(
                g,
                by_order,
                slots,
                targets,
                tuple,
                g.op(prefix, x),
                nodes,
                bounds,
            )?;
            tuple.pop();
            if r.is_some() {
                return Ok(r);
            }
        }
        Ok(None)
    }
    if slots.len() < 2 {
        return Ok(None);
    }
    rec(g, by_order, slots, targets, &mut vec![], g.id(), nodes, bounds)
}

fn check_candidate(g: &FiniteGroup, tuple: &[El], targets: &[(Subgroup, u64)]) -> bool {
    if !g.generates(tuple) {
        return false;
    }
    let bcd = BranchCycleDescription {
        tuple: tuple.to_vec(),
    };
    for (h, rp) in targets {
        if ram_divisor_char0(g, &bcd, h) != *rp {
            return false;
        }
    }
    true
}

/// Witness search for (Z/p)^2 with lower jumps (m1, m2).
pub fn kgb_witness_zpzp(
    p: u64,
    m1: i64,
    m2: i64,
    bounds: SearchBounds,
) -> Result<Option<KgbVerdict>> {
    let g = FiniteGroup::bicyclic(p)?;
    let wild = bicyclic_wild_filtration(&g, m1, m2)?;
    kgb_witness_search(&g, &wild, bounds)
}

/// Witness search for Z/p^n x| Z/m with first lower jump h and minimal
/// later jumps (u_i = p u_{i-1}).
pub fn kgb_witness_metacyclic(
    p: u64,
    n: u32,
    m: u64,
    chi: u64,
    h: i64,
    bounds: SearchBounds,
) -> Result<Option<KgbVerdict>> {
    let g = FiniteGroup::metacyclic(p, n, m, chi)?;
    let uppers = minimal_uppers(p, m, h, n);
    let wild = metacyclic_wild_filtration(&g, &uppers)?;
    kgb_witness_search(&g, &wild, bounds)
}

/// Upper jumps (h/m, p h/m, ..., p^{n-1} h/m).
pub fn minimal_uppers(p: u64, m: u64, h: i64, n: u32) -> Vec<Rat> {
    (0..n)
        .map(|i| rat(h * (p.pow(i) as i64), m as i64))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zpzp_predicate_examples() {
        assert!(!kgb_zpzp(3, 2, 2).unwrap().vanishes);
        assert!(kgb_zpzp(3, 2, 5).unwrap().vanishes);
        assert!(!kgb_zpzp(5, 3, 3).unwrap().vanishes);
        assert!(kgb_zpzp(5, 4, 4).unwrap().vanishes);
        assert!(kgb_zpzp(3, 2, 3).is_err()); // m2 divisible by p
        assert!(kgb_zpzp(3, 1, 2).is_err()); // m1 != m2 mod p
    }

    #[test]
    fn metacyclic_predicate_examples() {
        // D_p with odd h
        assert!(kgb_metacyclic(5, 1, 2, 4, 1).unwrap().vanishes);
        // (p=5, m=4, h=2): 2 != -1 mod 4
        assert!(!kgb_metacyclic(5, 1, 4, 2, 2).unwrap().vanishes);
        // (p=3, n=2, m=2, chi=-1, h=1)
        assert!(kgb_metacyclic(3, 2, 2, 8, 1).unwrap().vanishes);
        // cyclic group rejected
        assert!(kgb_metacyclic(3, 1, 2, 1, 1).is_err());
    }

    #[test]
    fn witness_found_for_d3() {
        let v = kgb_witness_metacyclic(3, 1, 2, 2, 1, SearchBounds::default())
            .unwrap()
            .expect("witness exists");
        for row in &v.table {
            assert_eq!(row.r_char0, row.r_charp);
        }
        // full-group row is 10 = 10
        let full_row = v.table.iter().find(|r| r.subgroup.len() == 6).unwrap();
        assert_eq!(full_row.r_char0, 10);
    }

    #[test]
    fn witness_exception_for_3_2_2() {
        let r = kgb_witness_zpzp(3, 2, 2, SearchBounds::default()).unwrap();
        assert!(r.is_none());
    }

    #[test]
    fn witness_found_for_3_2_5() {
        let v = kgb_witness_zpzp(3, 2, 5, SearchBounds::default())
            .unwrap()
            .expect("witness exists");
        let bcd = v.witness.as_ref().unwrap();
        assert_eq!(bcd.tuple.len(), 5);
        for row in &v.table {
            assert_eq!(row.r_char0, row.r_charp);
        }
    }
}
