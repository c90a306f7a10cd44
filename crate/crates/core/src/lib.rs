//! Rational subsets of a group `G` as sections of finitely generated
//! submonoids of `G × H` with `H` virtually abelian.
//!
//! The crate provides exact arithmetic for the groups involved
//! ([`groups`]), group-labelled automata ([`rational`]), the constructions
//! themselves ([`reduction`]) and bounded breadth-first membership oracles
//! ([`oracle`]) used to check every construction on concrete inputs.
//! [`verify`] holds the exhaustive and randomized checks, [`cli`] the
//! command-line front end.

pub mod cli;
pub mod error;
pub mod groups;
pub mod oracle;
pub mod rational;
pub mod reduction;
pub mod verify;

pub use error::{Error, Result};
