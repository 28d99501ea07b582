//! Exact algebra: finite fields, polynomials, rational functions, finite
//! extensions and truncated Laurent series.

pub mod ext;
pub mod gf;
pub mod poly;
pub mod ratfunc;
pub mod residue;
pub mod ring;
pub mod series;

pub use ext::{ExtCtx, ExtElem};
pub use gf::{FieldTower, Gf, GfCtx};
pub use poly::Poly;
pub use ratfunc::RatFunc;
pub use ring::Ring;
pub use series::Series;
