//! Monodic monadic first-order temporal logic with XOR predicate sets.
//!
//! The crate covers the logic itself ([`logic`]), a clausal normal form
//! ([`normal_form`]), satisfiability of the monadic first-order fragment
//! ([`mono_sat`]), a behaviour-graph decision procedure with a bounded
//! cross-check ([`decision`]), a broadcast protocol model ([`protocol`]) and
//! the translation of protocols into the logic ([`translator`]).

pub mod error;
pub mod logic;

pub use error::{Error, Result};
pub mod decision;
pub mod mono_sat;
pub mod normal_form;
pub mod protocol;
pub mod translator;
