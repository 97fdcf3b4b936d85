//! Decision trees grown with the twoing criterion, where the best two-way
//! partition of each categorical attribute is found either by exhaustive
//! search or by a simulated QAOA circuit.

pub mod compare;
pub mod criterion;
pub mod dataset;
pub mod error;
pub mod experiment;
pub mod qaoa;
pub mod qsim;
pub mod tree;
pub mod tree_file;

pub use error::{Error, Result};
