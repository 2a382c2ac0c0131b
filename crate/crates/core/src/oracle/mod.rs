//! Slow, independent reference deciders used to cross-check the solvers.
//! None of them shares solving code with the modules under test.

pub mod families;
mod fm;
mod kripke;
mod naive;
mod random;

pub use fm::{fm_feasible, MAX_FM_ROWS, MAX_FM_VARIABLES};
pub use kripke::{d_sat_bruteforce, MAX_KRIPKE_PROPOSITIONS, MAX_WORLDS};
pub use naive::{pl_solve_naive, MAX_NAIVE_LITERALS, MAX_NAIVE_PROPOSITIONS};
pub use random::{random_feasible_system, random_formula, random_system, Generated, Nesting, Profile};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("input exceeds the oracle's size guard: {0}")]
    TooLarge(String),
    #[error("unsupported input: {0}")]
    Unsupported(String),
}
