//! Exact special values `L(chi_D, -1)` of real quadratic characters and the
//! 2-primary structure of the tame kernel `K_2 O_F` of `F = Q(sqrt D)`.
//!
//! The crate is organised bottom-up:
//!
//! * [`arith`]: rationals, Kronecker symbols, factorisation, 2-adic valuation.
//! * [`characters`]: fundamental discriminants and quadratic characters.
//! * [`lvalues`]: Bernoulli numbers and primitive/imprimitive values at `s = -1`.
//! * [`induction`]: the subset-sum identity, `G`-sum congruences and family
//!   classification with the predicted 2-adic valuations.
//! * [`classgroups`]: Redei matrices, class-group ranks, norm tests and a
//!   binary-quadratic-form oracle for imaginary fields.
//! * [`k2`]: Birch–Tate assembly of `#K_2 O_F` and its 2-primary structure.
//! * [`scanner`]: family enumeration and table output.

pub mod arith;
pub mod characters;
pub mod classgroups;
mod error;
pub mod induction;
pub mod k2;
pub mod lvalues;
pub mod scanner;

pub use arith::{ExactRational, Factorization};
pub use characters::{Discriminant, FundamentalDiscriminant, QuadChar};
pub use error::{Error, Result};
