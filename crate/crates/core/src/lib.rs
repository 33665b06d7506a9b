//! Exact arithmetic for colored-partition congruences modulo small primes.
//!
//! The crate computes `r`-colored partition numbers exactly and mod `ell`,
//! manipulates their generating functions as dense q-expansions on the
//! `q^{N/24}` grid, and runs the witness search that rules theta-type
//! congruences `p_r(ell m n + t) = 0 (mod ell)` in or out over grids of
//! parameters.
//!
//! Modules:
//!
//! * [`arith`] — prime fields, Kronecker symbols, divisor-sum sieves;
//! * [`qseries`] — series arithmetic and the `U`/`V`/twist/theta operators;
//! * [`etaforms`] — eta powers, Eisenstein series, Miller bases, filtration,
//!   theta-shape detection;
//! * [`partitions`] — partition tables (exact and mod `ell`), generating
//!   functions, disk cache;
//! * [`congruence`] — the search, modulus reduction, brute-force checks, and
//!   the family/abnormal verifiers.

pub mod arith;
pub mod congruence;
pub mod error;
pub mod etaforms;
pub mod partitions;
pub mod qseries;

pub use error::{Error, Result};
