//! Newton polygons of polynomials in T^{-1} over a valued coefficient ring,
//! and the translation from hull slopes to root valuations in T.

use crate::error::{Error, Result};
use crate::rat::{rint, Rat};

/// One segment of the lower convex hull: `len` roots whose T-valuation
/// equals `slope`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Segment {
    pub slope: Rat,
    pub len: u64,
}

/// Lower convex hull of the points (exponent in T^{-1}, coefficient
/// valuation). Slopes are strictly increasing; a one-term polynomial gives a
/// degenerate polygon with no segments.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewtonPolygon {
    pub segments: Vec<Segment>,
    pub degenerate: bool,
    /// Exponent where the hull starts (order of vanishing in T^{-1}).
    pub min_exp: i64,
    pub max_exp: i64,
    /// Hull vertices (exponent, valuation), left to right.
    pub vertices: Vec<(i64, Rat)>,
}

impl NewtonPolygon {
    /// Build from (exponent, valuation) pairs (one per nonzero coefficient).
    pub fn from_points(mut pts: Vec<(i64, Rat)>) -> Result<NewtonPolygon> {
        if pts.is_empty() {
            return Err(Error::domain("Newton polygon of zero polynomial"));
        }
        pts.sort();
        pts.dedup();
        let min_exp = pts[0].0;
        let max_exp = pts.last().unwrap().0;
        if pts.len() == 1 {
            return Ok(NewtonPolygon {
                segments: vec![],
                degenerate: true,
                min_exp,
                max_exp,
                vertices: pts,
            });
        }
        // Andrew-style lower hull over exponents
        let mut hull: Vec<(i64, Rat)> = vec![];
        for p in pts {
            while hull.len() >= 2 {
                let a = hull[hull.len() - 2];
                let b = hull[hull.len() - 1];
                // remove b if it lies on or above the segment a-p
                let lhs = (b.1 - a.1) * rint(p.0 - a.0);
                let rhs = (p.1 - a.1) * rint(b.0 - a.0);
                if lhs >= rhs {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(p);
        }
        let mut segments = vec![];
        for w in hull.windows(2) {
            let (x0, y0) = w[0];
            let (x1, y1) = w[1];
            let len = (x1 - x0) as u64;
            let slope = (y1 - y0) / rint(x1 - x0);
            segments.push(Segment { slope, len });
        }
        Ok(NewtonPolygon {
            segments,
            degenerate: false,
            min_exp,
            max_exp,
            vertices: hull,
        })
    }

    /// Total number of roots counted by the hull (the degree spread).
    pub fn total_len(&self) -> u64 {
        self.segments.iter().map(|s| s.len).sum()
    }

    /// Root valuations in the variable T, with multiplicities. A segment of
    /// slope s in the T^{-1} polygon corresponds to roots with
    /// v(T^{-1}) = -s, i.e. v(T) = s.
    pub fn root_t_valuations(&self) -> Vec<(Rat, u64)> {
        self.segments
            .iter()
            .map(|s| (s.slope, s.len))
            .collect()
    }

    /// Roots in the open unit disc: v(T) > 0.
    pub fn disc_root_count(&self) -> u64 {
        self.segments
            .iter()
            .filter(|s| s.slope > rint(0))
            .map(|s| s.len)
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;

    #[test]
    fn binomial_polygon() {
        // 1 + (val 3/2) T^{-2}: single segment of slope 3/4, length 2
        let np = NewtonPolygon::from_points(vec![(0, rint(0)), (2, rat(3, 2))]).unwrap();
        assert!(!np.degenerate);
        assert_eq!(np.segments, vec![Segment { slope: rat(3, 4), len: 2 }]);
        assert_eq!(np.root_t_valuations(), vec![(rat(3, 4), 2)]);
        assert_eq!(np.disc_root_count(), 2);
    }

    #[test]
    fn monomial_is_degenerate() {
        let np = NewtonPolygon::from_points(vec![(1, rint(0))]).unwrap();
        assert!(np.degenerate);
        assert!(np.segments.is_empty());
    }

    #[test]
    fn slopes_strictly_increase_and_lengths_sum() {
        // valuations 2, 0 (min), 1/2, 3: hull from (0,2)->(1,0)->(3,3)?? take
        // points: (0,2),(1,0),(2,1/2),(3,3)
        let np = NewtonPolygon::from_points(vec![
            (0, rint(2)),
            (1, rint(0)),
            (2, rat(1, 2)),
            (3, rint(3)),
        ])
        .unwrap();
        assert_eq!(np.total_len(), 3);
        for w in np.segments.windows(2) {
            assert!(w[0].slope < w[1].slope);
        }
        // interior point (2,1/2) lies on the segment (1,0)-(3,3)? slope 3/2:
        // at x=2 the hull is at 3/2 > 1/2, so (2,1/2) is a vertex
        assert!(np.vertices.contains(&(2, rat(1, 2))));
    }
}
