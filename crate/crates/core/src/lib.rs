//! Exact evaluation of decision theories on discrete graphical models.
//!
//! A dilemma is a [`model::Model`]: a DAG of discrete variables with a
//! designated act node, an optional observation node, a utility node and
//! the intervention nodes functional decision theory acts through. The
//! [`theories`] module evaluates evidential, causal and functional decision
//! theory on a model with exact rational arithmetic.

pub mod corpus;
pub mod dsl;
pub mod infer;
pub mod model;
pub mod rational;
pub mod surgery;
#[cfg(feature = "testing")]
pub mod testing;
pub mod theories;

pub use model::{build_model, rename, Model, ModelBuilder, Renaming};
pub use rational::Rational;
pub use theories::{cdt, edt, evaluate, fdt, Prescription, Theory};
