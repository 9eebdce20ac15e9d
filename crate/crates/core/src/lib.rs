//! Exact-arithmetic core of the squarefree-sieve laboratory.
//!
//! Everything here is pure computation over big integers and rationals:
//! the six registered representation families and their group actions
//! ([`forms`]), their discriminant invariants ([`invariants`]), mod-p² point
//! classification and local densities ([`localdensity`]), box experiments
//! ([`geosieve`]), the discriminant-reducing moves and the g₂ → f₄
//! embedding ([`moves`]), and the number-field density constants
//! ([`arithstat`]).
//!
//! The crate is `no_std` (with `alloc`). Threading, file formats, caching
//! and the command line live in the `sqfsieve` companion crate; scans here
//! expose disjoint partitions and associative merges so a driver can fan
//! them out.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod arith;
pub mod arithstat;
pub mod decimal;
mod error;
pub mod forms;
pub mod geosieve;
pub mod invariants;
pub mod localdensity;
pub mod moves;

pub use error::{Error, Result};
pub use forms::{Family, FamilyDescriptor, FormVector, GroupElement};

/// Default RNG seed used wherever a caller does not supply one.
pub const DEFAULT_SEED: u64 = 0xB1A46A;

/// Default cap on the number of residues or lattice points a single scan may visit.
pub const DEFAULT_BUDGET: u64 = 1_000_000_000;
