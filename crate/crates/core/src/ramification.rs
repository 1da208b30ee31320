//! Higher ramification filtrations in lower and upper numbering, Herbrand
//! conversion, and different-degree formulas.
//!
//! A filtration is stored as a right-continuous step function of group
//! orders: the recorded order at a threshold t is |G_t| itself, so a break
//! (t, o) means the order drops to o strictly after t. The degree of the
//! different in lower numbering is the literal integer sum
//! delta = sum_{i >= 0} (|G_i| - 1).

use crate::error::{Error, Result};
use crate::rat::{is_integer, rat_floor, rint, Rat};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Numbering {
    Lower,
    Upper,
}

/// Step function of subgroup orders indexed by a real parameter.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RamFiltration {
    pub numbering: Numbering,
    /// |G_0|.
    pub order0: u64,
    /// Breaks (threshold t, order strictly after t); thresholds strictly
    /// increasing, orders strictly decreasing, last order 1 when nonempty.
    pub breaks: Vec<(Rat, u64)>,
}

impl RamFiltration {
    pub fn new(numbering: Numbering, order0: u64, breaks: Vec<(Rat, u64)>) -> Result<Self> {
        let f = RamFiltration {
            numbering,
            order0,
            breaks,
        };
        f.validate()?;
        Ok(f)
    }

    pub fn trivial() -> Self {
        RamFiltration {
            numbering: Numbering::Lower,
            order0: 1,
            breaks: vec![],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.order0 == 0 {
            return Err(Error::domain("group order must be positive"));
        }
        let mut prev_t: Option<Rat> = None;
        let mut prev_o = self.order0;
        for (t, o) in &self.breaks {
            if *t < rint(0) {
                return Err(Error::domain("negative threshold"));
            }
            if let Some(pt) = prev_t {
                if *t <= pt {
                    return Err(Error::domain("thresholds must strictly increase"));
                }
            }
            if *o >= prev_o {
                return Err(Error::domain("orders must strictly decrease"));
            }
            if prev_o % o != 0 {
                return Err(Error::domain("each order must divide the previous"));
            }
            if self.numbering == Numbering::Lower && !is_integer(t) {
                return Err(Error::domain(
                    "lower-numbering thresholds must be integers",
                ));
            }
            prev_t = Some(*t);
            prev_o = *o;
        }
        if self.breaks.is_empty() {
            if self.order0 != 1 {
                return Err(Error::domain(
                    "a nontrivial filtration must eventually reach order 1",
                ));
            }
        } else if self.breaks.last().unwrap().1 != 1 {
            return Err(Error::domain("filtration must end at the trivial group"));
        }
        // quotients at positive thresholds are p-groups with a common p
        let mut p_seen: Option<u64> = None;
        let mut prev_o = self.order0;
        for (t, o) in &self.breaks {
            if *t > rint(0) {
                let mut ratio = prev_o / o;
                if ratio > 1 {
                    let p = smallest_prime_factor(ratio);
                    while ratio % p == 0 {
                        ratio /= p;
                    }
                    if ratio != 1 {
                        return Err(Error::domain(
                            "quotient at a positive break is not a p-group",
                        ));
                    }
                    match p_seen {
                        None => p_seen = Some(p),
                        Some(q) if q != p => {
                            return Err(Error::domain(
                                "wild quotients involve two different primes",
                            ))
                        }
                        _ => {}
                    }
                }
            }
            prev_o = *o;
        }
        Ok(())
    }

    /// Order of G_t.
    pub fn order_at(&self, t: Rat) -> u64 {
        let mut o = self.order0;
        for (thr, ord) in &self.breaks {
            if t > *thr {
                o = *ord;
            } else {
                break;
            }
        }
        o
    }

    /// Thresholds where the order actually drops.
    pub fn jumps(&self) -> Vec<Rat> {
        self.breaks.iter().map(|(t, _)| *t).collect()
    }
}

fn smallest_prime_factor(n: u64) -> u64 {
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return d;
        }
        d += 1;
    }
    n
}

/// phi(u) = int_0^u dt / [G_0 : G_t], applied to every break threshold.
pub fn herbrand_upper_from_lower(f: &RamFiltration) -> Result<RamFiltration> {
    if f.numbering != Numbering::Lower {
        return Err(Error::usage("herbrand_upper_from_lower expects lower numbering"));
    }
    f.validate()?;
    let mut out_breaks = vec![];
    let mut phi = rint(0);
    let mut prev_t = rint(0);
    let mut cur_order = f.order0;
    for (t, o) in &f.breaks {
        // on (prev_t, t] the order is cur_order
        phi = phi + (*t - prev_t) * Rat::new(cur_order as i64, f.order0 as i64);
        out_breaks.push((phi, *o));
        prev_t = *t;
        cur_order = *o;
    }
    RamFiltration::new(Numbering::Upper, f.order0, out_breaks)
}

/// psi = phi^{-1}; errors when the resulting lower jumps are not integers.
pub fn herbrand_lower_from_upper(f: &RamFiltration) -> Result<RamFiltration> {
    if f.numbering != Numbering::Upper {
        return Err(Error::usage("herbrand_lower_from_upper expects upper numbering"));
    }
    f.validate()?;
    let mut out_breaks = vec![];
    let mut lower = rint(0);
    let mut prev_u = rint(0);
    let mut cur_order = f.order0;
    for (u, o) in &f.breaks {
        lower = lower + (*u - prev_u) * Rat::new(f.order0 as i64, cur_order as i64);
        if *u > rint(0) && !is_integer(&lower) {
            return Err(Error::domain(format!(
                "inconsistent filtration: lower jump {lower} is not an integer"
            )));
        }
        out_breaks.push((lower, *o));
        prev_u = *u;
        cur_order = *o;
    }
    RamFiltration::new(Numbering::Lower, f.order0, out_breaks)
}

/// delta = sum_{i >= 0 integer} (|G_i| - 1).
pub fn different_from_lower(f: &RamFiltration) -> Result<u64> {
    if f.numbering != Numbering::Lower {
        return Err(Error::usage("different_from_lower expects lower numbering"));
    }
    f.validate()?;
    if f.breaks.is_empty() {
        return Ok(0);
    }
    let mut delta: i64 = 0;
    // integers in [0, t_1] have order order0
    let t1 = rat_floor(&f.breaks[0].0);
    delta += (f.order0 as i64 - 1) * (t1 + 1);
    let mut prev = t1;
    for k in 0..f.breaks.len() {
        let o = f.breaks[k].1 as i64;
        let upper = if k + 1 < f.breaks.len() {
            rat_floor(&f.breaks[k + 1].0)
        } else {
            prev // last order is 1, contributes nothing
        };
        delta += (o - 1) * (upper - prev);
        prev = upper;
    }
    Ok(delta as u64)
}

/// Degree of the different of a Z/p^n-extension with upper jumps
/// u_1 < ... < u_n (u_0 = 0):
/// p^n - 1 + sum_i p^{i-1} (p^{n-i+1} - 1)(u_i - u_{i-1}).
pub fn cyclic_different(p: u64, upper_jumps: &[i64]) -> Result<u64> {
    let n = upper_jumps.len() as u32;
    if n == 0 {
        return Ok(0);
    }
    let mut prev = 0i64;
    for &u in upper_jumps {
        if u <= prev {
            return Err(Error::domain("upper jumps must be strictly increasing and positive"));
        }
        prev = u;
    }
    let mut delta: i64 = p.pow(n) as i64 - 1;
    let mut u_prev = 0i64;
    for (i, &u) in upper_jumps.iter().enumerate() {
        let i = i as u32 + 1;
        delta += p.pow(i - 1) as i64 * (p.pow(n - i + 1) as i64 - 1) * (u - u_prev);
        u_prev = u;
    }
    Ok(delta as u64)
}

/// Upper-numbering filtration of a Z/p^n-extension with the given jumps.
pub fn cyclic_upper_filtration(p: u64, upper_jumps: &[i64]) -> Result<RamFiltration> {
    let n = upper_jumps.len() as u32;
    let mut breaks = vec![];
    for (i, &u) in upper_jumps.iter().enumerate() {
        breaks.push((rint(u), p.pow(n - 1 - i as u32)));
    }
    RamFiltration::new(Numbering::Upper, p.pow(n), breaks)
}

/// Compose a totally wild p-part filtration with a tame cyclic part of
/// order m (p coprime to m): the output has G_0 of order m p^n and
/// G_{m i} = (input G_i) for i >= 1; its different is m delta + (m - 1).
pub fn compose_tame(p_part: &RamFiltration, m: u64) -> Result<RamFiltration> {
    if p_part.numbering != Numbering::Lower {
        return Err(Error::usage("compose_tame expects a lower filtration"));
    }
    p_part.validate()?;
    if m == 0 {
        return Err(Error::domain("tame order must be positive"));
    }
    // the p-part must be a p-group filtration: order0 a prime power
    let p = smallest_prime_factor(p_part.order0);
    let mut q = p_part.order0;
    while q % p == 0 {
        q /= p;
    }
    if q != 1 && p_part.order0 > 1 {
        return Err(Error::domain("p-part order is not a prime power"));
    }
    if p_part.order0 > 1 && m % p == 0 {
        return Err(Error::domain("tame order m must be coprime to p"));
    }
    if m == 1 {
        return Ok(p_part.clone());
    }
    let mut breaks: Vec<(Rat, u64)> = vec![];
    // tame step: order drops from m p^n to p^n strictly after 0
    let mut saw_zero_break = false;
    for (t, o) in &p_part.breaks {
        if *t == rint(0) {
            // wild part already drops at 0; merge with the tame drop
            breaks.push((rint(0), *o));
            saw_zero_break = true;
        } else {
            breaks.push((*t * rint(m as i64), *o));
        }
    }
    if !saw_zero_break && p_part.order0 > 1 {
        breaks.insert(0, (rint(0), p_part.order0));
    }
    RamFiltration::new(Numbering::Lower, m * p_part.order0, breaks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;

    fn lower(order0: u64, breaks: Vec<(i64, u64)>) -> RamFiltration {
        RamFiltration::new(
            Numbering::Lower,
            order0,
            breaks.into_iter().map(|(t, o)| (rint(t), o)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn different_basic_examples() {
        // unramified
        assert_eq!(different_from_lower(&RamFiltration::trivial()).unwrap(), 0);
        // D_p at its wild point: orders 2p, p, 1 -> 3p - 2
        for p in [3u64, 5, 7] {
            let f = lower(2 * p, vec![(0, p), (1, 1)]);
            assert_eq!(different_from_lower(&f).unwrap(), 3 * p - 2);
        }
        // Z/p with single jump u1: (u1+1)(p-1)
        for p in [3u64, 5] {
            for u1 in [1i64, 2, 4] {
                let f = lower(p, vec![(u1, 1)]);
                assert_eq!(different_from_lower(&f).unwrap(), (u1 as u64 + 1) * (p - 1));
            }
        }
    }

    #[test]
    fn herbrand_data_points() {
        // single jump with G_0 = G_h: phi is the identity there
        let f = lower(3, vec![(4, 1)]);
        let u = herbrand_upper_from_lower(&f).unwrap();
        assert_eq!(u.breaks, vec![(rint(4), 1)]);
        // Z/p^2 with lower jumps (u1, u1 + p(u2-u1)) <-> upper (u1, u2)
        let (p, u1, u2) = (3i64, 1i64, 3i64);
        let f = lower(9, vec![(u1, 3), (u1 + p * (u2 - u1), 1)]);
        let u = herbrand_upper_from_lower(&f).unwrap();
        assert_eq!(u.breaks, vec![(rint(u1), 3), (rint(u2), 1)]);
        // D_p: lower (0: p after, 1: 1 after) -> upper jumps (0, 1/2)
        let f = lower(6, vec![(0, 3), (1, 1)]);
        let u = herbrand_upper_from_lower(&f).unwrap();
        assert_eq!(u.breaks, vec![(rint(0), 3), (rat(1, 2), 1)]);
    }

    #[test]
    fn herbrand_inverse_errors_on_non_integral() {
        // upper (1, 3/2) with orders (9, 3, 1): psi gives lower 1 + 3*(1/2)
        let f = RamFiltration::new(
            Numbering::Upper,
            9,
            vec![(rint(1), 3), (rat(3, 2), 1)],
        )
        .unwrap();
        assert!(herbrand_lower_from_upper(&f).is_err());
    }

    #[test]
    fn cyclic_different_examples() {
        assert_eq!(cyclic_different(3, &[2]).unwrap(), 6);
        assert_eq!(cyclic_different(3, &[1, 3]).unwrap(), 28);
        // cross-check (p=5, (1,5,25)) against the brute sum via Herbrand
        let p = 5u64;
        let jumps = [1i64, 5, 25];
        let upper = cyclic_upper_filtration(p, &jumps).unwrap();
        let low = herbrand_lower_from_upper(&upper).unwrap();
        assert_eq!(
            different_from_lower(&low).unwrap(),
            cyclic_different(p, &jumps).unwrap()
        );
        assert!(cyclic_different(3, &[3, 2]).is_err());
    }

    #[test]
    fn compose_tame_identity_and_different() {
        // (Z/3 with jump 1, m = 2): delta = 4, output different 9 = 2*4 + 1
        let f = lower(3, vec![(1, 1)]);
        let g = compose_tame(&f, 2).unwrap();
        assert_eq!(g.order0, 6);
        assert_eq!(different_from_lower(&g).unwrap(), 9);
        // m = 1 is the identity
        assert_eq!(compose_tame(&f, 1).unwrap(), f);
        // (Z/9 lower jumps (1,7), m=2): different = 2 delta + 1 via brute sum
        let f9 = lower(9, vec![(1, 3), (7, 1)]);
        let d = different_from_lower(&f9).unwrap();
        let g9 = compose_tame(&f9, 2).unwrap();
        assert_eq!(different_from_lower(&g9).unwrap(), 2 * d + 1);
        assert!(compose_tame(&f9, 3).is_err());
    }

    #[test]
    fn wild_different_exceeds_group_order_minus_one() {
        for p in [2u64, 3, 5] {
            for jump in [1i64, 2, 3] {
                if p == 2 && jump == 2 {
                    continue; // keep jumps valid-ish; oddness not enforced here
                }
                let f = lower(p, vec![(jump, 1)]);
                assert!(different_from_lower(&f).unwrap() > p - 1);
            }
        }
    }
}
