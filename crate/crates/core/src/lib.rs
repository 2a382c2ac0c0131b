//! Satisfiability for probabilistic logics with exact rational arithmetic.
//!
//! - [`plsolver`] decides the non-iterated logic by atom enumeration and LP.
//! - [`pplsolver`] decides the iterated logic with a tableau.
//! - [`modald`] decides modal logic D through the iterated solver.
//! - [`oracle`] holds slow reference deciders; [`fuzz`] compares the two.

pub mod base;
pub mod exactlp;
pub mod fuzz;
pub mod modald;
pub mod oracle;
pub mod parser;
pub mod plsolver;
pub mod pplsolver;
pub mod rat;
pub mod semantics;
pub mod syntax;
