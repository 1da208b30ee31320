//! Truncated exact arithmetic in Eisenstein extensions of Z_p, valued
//! Laurent polynomials over them, Newton polygons, and root-distinctness
//! certificates.

pub mod certificate;
pub mod newton;
pub mod puiseux;
pub mod ring;
pub mod vlaurent;

pub use certificate::{roots_simple_distinct_certificate, Certificate};
pub use newton::{NewtonPolygon, Segment};
pub use puiseux::Puiseux;
pub use ring::{default_precision, make_cyclotomic_ring, CyclotomicRing, EisRing, PadicElem};
pub use vlaurent::{exp_truncated, exp_truncated_elem, ValCoeff, VLaurent};
