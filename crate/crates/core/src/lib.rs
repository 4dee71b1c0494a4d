//! Exact computational algebra for parahoric quotient groups.
//!
//! The crate is organized around four layers:
//!
//! * [`ring`] — truncated valuation rings `O/p^h` over finite residue fields
//!   (equal characteristic, unramified, and tamely ramified kinds), with
//!   exact canonical-form arithmetic, Hensel square roots, Teichmüller
//!   decompositions, quotients, and brute-force isomorphism search.
//! * [`rootsystem`] — reduced root systems of types `A_n`, `B_2`/`C_2` and
//!   `G_2`, coroots, Weyl reflections, root strings, and integer-valued
//!   concave functions obtained from rational points in the apartment.
//! * [`chevalley`] — structure-constant families `c_{α,β,i,j}` as exact
//!   rationals, an identity verifier covering the commutator relations in
//!   rank 2, and the rescaling solver for comparing two families.
//! * [`group`] — windowed matrix groups realizing the quotient `K/K^h`
//!   (`GL_n`, `SL_n`, `Sp_4`, and the heterogeneous two-ring block group),
//!   with root and torus generators, rank-1 decompositions, empirical
//!   constant extraction, the induced ring on a root subgroup, and axiom
//!   verification by exhaustive order counting.
//!
//! Everything is exact: no floats, no probabilistic identities. All results
//! that the library "verifies" are checked by finite enumeration at desk
//! scale, and reported through [`report::VerificationReport`].
//!
//! The crate is `no_std` (with `alloc`); IO, JSON and the CLI live in the
//! companion `parahoric-cli` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod chevalley;
pub mod group;
pub mod rational;
pub mod report;
pub mod ring;
pub mod rootsystem;

pub use rational::Rational;
pub use report::{ReportEntry, Status, VerificationReport};
