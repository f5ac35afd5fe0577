//! Exact and asymptotic statistics of watermelon path ensembles.
//!
//! A *p-watermelon with a wall* is a family of p nonintersecting ±1-step
//! lattice paths, the i-th running from (0, 2i−2) to (2n, 2i−2), with the
//! lowest path staying nonnegative. The *height* is the maximal y-coordinate
//! reached by the top path. This crate computes
//!
//! * exact counts and exact average heights H(n,p) with arbitrary-precision
//!   integer determinants ([`exact`]),
//! * the divisor-weighted closed sum formulas for H(n,1) and H(n,2) ([`sums`]),
//! * the special functions backing the asymptotic analysis — theta series,
//!   Stirling expansions, quadrature ([`specfun`]),
//! * the lattice Dirichlet series Z(a,b;s), its residues and regularized
//!   constants c_{a,b} ([`dirichlet`]),
//! * asymptotic expansions of the auxiliary sums and the final averages,
//!   H(n,1) ≈ √(πn) − 3/2 and H(n,2) ≈ K√(πn) + C ([`asym`]),
//! * a command-line surface over all layers ([`cli`]).
//!
//! Every layer is validated against an independent oracle: brute-force
//! dynamic programming for the enumeration, exact rational identities for
//! the sum formulas, and cross-route numeric identities for the analytic
//! pieces.

pub mod asym;
pub mod cli;
pub mod dirichlet;
pub mod error;
pub mod exact;
pub mod hp;
pub mod specfun;
pub mod sums;

pub use error::{MelonError, Result};
pub use hp::HPReal;
