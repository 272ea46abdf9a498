//! Exact computations with partial group actions on finite generalized matrix
//! rings, Galois-type invariants and groupoid actions.
//!
//! All rings are finite with elements numbered `0..order`. Every structural
//! claim is checked exhaustively, and constructions that admit two independent
//! computations run both and compare.

pub mod bimodule;
pub mod budget;
pub mod datum;
pub mod error;
pub mod examples;
pub mod galois;
pub mod genmatrix;
pub mod group;
pub mod groupoid;
pub mod grouptype;
pub mod io;
pub mod morita;
pub mod partial_action;
pub mod report;
pub mod ring;
pub mod set;
pub mod skew;
pub mod suite;

pub use budget::Budget;
pub use error::{Error, Result};
pub use report::Report;
pub use ring::{FiniteRing, RingRef};
pub use set::{Elem, ElemSet, NONE};
