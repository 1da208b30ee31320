//! Exact rational numbers and their `"num/den"` wire format.
//!
//! Every rational that crosses a serialization boundary is printed as `"a"`
//! (integers) or `"a/b"` in lowest terms; no floating point appears anywhere.

use crate::error::{Error, Result};
use num::rational::Ratio;
use num::{One, Signed};

pub type Rat = Ratio<i64>;

pub fn rat(n: i64, d: i64) -> Rat {
    Ratio::new(n, d)
}

pub fn rint(n: i64) -> Rat {
    Ratio::from_integer(n)
}

/// Render a rational as `"a"` or `"a/b"` in lowest terms.
pub fn rat_to_string(r: &Rat) -> String {
    if r.denom().is_one() {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parse `"a"` or `"a/b"`.
pub fn rat_from_str(s: &str) -> Result<Rat> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: i64 = n
            .trim()
            .parse()
            .map_err(|_| Error::usage(format!("bad rational numerator in {s:?}")))?;
        let d: i64 = d
            .trim()
            .parse()
            .map_err(|_| Error::usage(format!("bad rational denominator in {s:?}")))?;
        if d == 0 {
            return Err(Error::usage(format!("zero denominator in {s:?}")));
        }
        Ok(Ratio::new(n, d))
    } else {
        let n: i64 = s
            .parse()
            .map_err(|_| Error::usage(format!("bad rational {s:?}")))?;
        Ok(Ratio::from_integer(n))
    }
}

/// Floor of a rational, as i64.
pub fn rat_floor(r: &Rat) -> i64 {
    r.floor().to_integer()
}

pub fn is_integer(r: &Rat) -> bool {
    r.denom().is_one()
}

pub fn rat_is_nonneg(r: &Rat) -> bool {
    !r.is_negative()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wire_format_round_trip() {
        for s in ["3", "-7", "3/2", "-5/4", "0"] {
            let r = rat_from_str(s).unwrap();
            assert_eq!(rat_to_string(&r), s);
        }
        assert_eq!(rat_to_string(&rat_from_str("6/4").unwrap()), "3/2");
        assert!(rat_from_str("1/0").is_err());
        assert!(rat_from_str("x").is_err());
    }

    #[test]
    fn floor_behaviour() {
        assert_eq!(rat_floor(&rat(7, 2)), 3);
        assert_eq!(rat_floor(&rat(-7, 2)), -4);
        assert_eq!(rat_floor(&rint(5)), 5);
    }
}
