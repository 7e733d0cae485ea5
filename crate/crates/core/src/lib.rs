//! Exact construction and verification of the Heun operator of Hahn type on
//! the uniform grid `{0, 1, ..., N}`.
//!
//! - [`exactnum`]: rationals, Pochhammer symbols, terminating `3F2` sums
//! - [`polyops`]: polynomials, rational functions, differential operators
//! - [`shiftalg`]: difference operators, grid matrices, relation fitting
//! - [`heunhahn`]: the seven-parameter operator, degree raising, Pochhammer
//!   tridiagonality, quasi-exact truncation
//! - [`hahn`]: Hahn polynomials, the bispectral pair `X`, `Y`, the Hahn
//!   algebra and the bilinear Heun operator
//! - [`heunracah`]: the cubic Heun–Racah relations, the equitable Racah
//!   triple and the differential realization
//! - [`gevp`]: rational functions solving the pencil `L1 - lambda L2`
//! - [`verify`] and [`cli`]: the verification suites and command line

pub mod exactnum;
pub mod gevp;
pub mod hahn;
pub mod heunhahn;
pub mod heunracah;
pub mod linalg;
pub mod polyops;
pub mod shiftalg;
pub mod verify;
pub mod cli;
