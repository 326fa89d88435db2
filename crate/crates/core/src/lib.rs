//! Discrete and continuous Painlevé machinery: exact step maps and invariants,
//! orthogonal-polynomial recurrences, the affine Weyl group action, numerical
//! ODE integration, and blow-up resolution of pencils.

pub mod dpmaps;
pub mod elliptic;
pub mod ivs;
pub mod ortho;
pub mod pode;
pub mod precision;
pub mod quadrature;
pub mod weyl;

pub use precision::{BivarPoly, EpsSeries, Field, PrecisionContext, Scalar, ScalarKind, UPoly};
