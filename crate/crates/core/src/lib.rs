//! Exact computational-algebra toolkit for restricted sumsets over prime
//! fields.
//!
//! The crate has four layers:
//!
//! - [`polyring`]: sparse multivariate polynomials with exact integer,
//!   rational, and prime-field coefficients, truncated products, and direct
//!   coefficient extraction under powers of `(x_1 + ... + x_n)`.
//! - [`morris`]: closed-form right-hand sides of the Morris-type coefficient
//!   identities, polynomial-expansion left-hand sides, exact equality
//!   checking over parameter grids, and the antisymmetrization relation
//!   linking even and odd Vandermonde powers.
//! - [`nullstellensatz`]: the Combinatorial Nullstellensatz witness finder,
//!   the coefficient-based sumset lower-bound certificate, and the
//!   restriction-polynomial builder with its key integer coefficient.
//! - [`sumsets`]: the restricted-sumset instance model, seeded instance
//!   generation, exhaustive enumeration, the theorem registry (bounds and
//!   prime thresholds), and end-to-end verification reports.
//!
//! The `sumset-cn` binary exposes all of it behind a CLI; see [`cli`].

pub mod cli;
pub mod morris;
pub mod nullstellensatz;
pub mod polyring;
pub mod sumsets;
