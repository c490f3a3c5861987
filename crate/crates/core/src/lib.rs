//! Generalized two-dimensional Laguerre polynomials `Z_{m,n}^{(β)}(z, z̄)`,
//! their quaternionic extension `Z_{m,n}^{(β)}(q, q̄)`, ladder operators,
//! and closed-form identities paired with independent numerical oracles.

pub mod analysis;
pub mod bipoly;
pub mod construct2d;
pub mod error;
pub mod hypergeom;
pub mod ladder;
pub mod quadrature;
pub mod quaternion;
pub mod report;

pub use bipoly::BiPoly;
pub use construct2d::{z_eval, z_poly, ZIndex};
pub use error::{Error, Result};
pub use quadrature::{MomentFn, QuadratureRule, Resolution};
pub use quaternion::{MatrixRep, Quaternion};
pub use report::{IdentityReport, Status, Tally};
