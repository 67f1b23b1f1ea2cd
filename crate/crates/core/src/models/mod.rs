//! Concrete models: posets, weakening relations, Sugihara chains, the point
//! algebra, `Cm(Z₇)`, morphisms, representations and the built-in catalog.

pub mod catalog;
pub mod cmz7;
pub mod morphism;
pub mod point_algebra;
pub mod poset;
pub mod relation;
pub mod representation;
pub mod sugihara;
pub mod wk;

pub use poset::{Poset, RawPoset};
pub use relation::Relation;
pub use wk::{build_wk, weakening_closure, WkAlgebra, WkBound};
