//! Exact arithmetic substrate: finite fields, polynomials, rational
//! functions, Laurent polynomials, and differential forms with the Cartier
//! operator.

pub mod form;
pub mod gf;
pub mod laurent;
pub mod poly;
pub mod ratfn;

pub use form::{Form, FormClass};
pub use gf::{all_elements, embed, Gf, GfEl};
pub use laurent::Laurent;
pub use poly::Poly;
pub use ratfn::{P1Point, RatFn};
