//! Workbench for finite weakening relation algebras.
//!
//! Finite bounded cyclic involutive unital dℓ-magmas ([`algebra`]) and
//! their relevance frames ([`frame`]), the quasiequational theories Φ₂/Φ₃
//! and their frame conditions ([`axioms`]), representation and pebble
//! games ([`game`]), concrete weakening relation algebras and the small
//! catalog ([`models`]), isomorph-free enumeration ([`finder`]) and the
//! command line front end ([`cli`]).

pub mod algebra;
pub mod axioms;
pub mod cli;
pub mod finder;
pub mod frame;
pub mod game;
pub mod io;
pub mod models;
pub mod report;

pub use algebra::{AlgebraError, Elem, FiniteAlgebra, JoinIrreducible, RawAlgebra};
pub use frame::{Point, RelevanceFrame};
pub use report::{AxiomReport, Outcome, Witness};
