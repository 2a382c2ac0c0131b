//! Differential fuzzing of the solvers against the reference oracles.
//!
//! Case `i` of a run with seed `s` uses formula seed `s + i`, so any reported
//! mismatch can be replayed on its own.

use crate::modald::d_sat;
use crate::oracle::{d_sat_bruteforce, pl_solve_naive, random_formula, Generated, OracleError, Profile, MAX_WORLDS};
use crate::plsolver::solve_pl;
use crate::pplsolver::tableau_solve;
use crate::semantics::{holds_kripke, holds_pl, holds_ppl, validate_kripke, validate_pl, validate_ppl};
use crate::syntax::{size, Formula, Fragment};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mismatch {
    pub seed: u64,
    pub formula: String,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FuzzReport {
    pub cases: usize,
    pub sat: usize,
    /// Cases that exceeded an oracle guard and were only self-checked.
    pub skipped: usize,
    pub mismatches: Vec<Mismatch>,
}

impl FuzzReport {
    pub fn is_clean(&self) -> bool {
        self.mismatches.is_empty()
    }
}

enum Outcome {
    Agree { sat: bool },
    Skipped,
    Mismatch(String),
}

fn check_prob(f: &Formula) -> Outcome {
    let tableau = tableau_solve(f);
    if let Some(w) = tableau.witness() {
        if !validate_ppl(&w.model).is_empty() {
            return Outcome::Mismatch("invalid tableau witness".into());
        }
        if holds_ppl(&w.model, &w.root, f) != Ok(true) {
            return Outcome::Mismatch("tableau witness does not satisfy the formula".into());
        }
        if w.model.worlds.len() as u128 > 1u128 << size(f).min(127) {
            return Outcome::Mismatch("tableau witness too large".into());
        }
    }
    if f.fragment() == Fragment::Ppl {
        return Outcome::Agree {
            sat: tableau.is_sat(),
        };
    }
    let pl = match solve_pl(f) {
        Ok(v) => v,
        Err(e) => return Outcome::Mismatch(format!("solve_pl failed: {e}")),
    };
    if let Some(w) = pl.witness() {
        if !validate_pl(&w.model).is_empty() || holds_pl(&w.model, f) != Ok(true) {
            return Outcome::Mismatch("invalid PL witness".into());
        }
    }
    if pl.is_sat() != tableau.is_sat() {
        return Outcome::Mismatch(format!(
            "solve_pl says {}, tableau says {}",
            pl.is_sat(),
            tableau.is_sat()
        ));
    }
    match pl_solve_naive(f) {
        Ok(naive) if naive == pl.is_sat() => Outcome::Agree { sat: naive },
        Ok(naive) => Outcome::Mismatch(format!("solvers say {}, naive oracle says {naive}", pl.is_sat())),
        Err(OracleError::TooLarge(_)) => Outcome::Skipped,
        Err(e) => Outcome::Mismatch(format!("naive oracle failed: {e}")),
    }
}

fn check_case(profile: &Profile, seed: u64) -> (String, Outcome) {
    match random_formula(profile, seed) {
        Generated::Prob(f) => (f.to_string(), check_prob(&f)),
        Generated::Modal(m) => {
            let verdict = d_sat(&m);
            if let Some(w) = verdict.witness() {
                if !validate_kripke(&w.model, true).is_empty() || holds_kripke(&w.model, &w.root, &m) != Ok(true) {
                    return (m.to_string(), Outcome::Mismatch("invalid Kripke witness".into()));
                }
            }
            let outcome = match d_sat_bruteforce(&m, MAX_WORLDS) {
                Ok(b) if b == verdict.is_sat() => Outcome::Agree { sat: b },
                Ok(b) => Outcome::Mismatch(format!("d_sat says {}, enumeration says {b}", verdict.is_sat())),
                Err(OracleError::TooLarge(_)) => Outcome::Skipped,
                Err(e) => Outcome::Mismatch(e.to_string()),
            };
            (m.to_string(), outcome)
        }
    }
}

fn aggregate(results: Vec<(u64, String, Outcome)>) -> FuzzReport {
    let mut report = FuzzReport {
        cases: results.len(),
        ..FuzzReport::default()
    };
    for (seed, formula, outcome) in results {
        match outcome {
            Outcome::Agree { sat } => report.sat += usize::from(sat),
            Outcome::Skipped => report.skipped += 1,
            Outcome::Mismatch(detail) => report.mismatches.push(Mismatch { seed, formula, detail }),
        }
    }
    report
}

pub fn run_sequential(profile: &Profile, seed: u64, count: usize) -> FuzzReport {
    aggregate(
        (0..count as u64)
            .map(|i| {
                let s = seed.wrapping_add(i);
                let (f, o) = check_case(profile, s);
                (s, f, o)
            })
            .collect(),
    )
}

/// Same report as [`run_sequential`]; cases run on the rayon pool when the
/// `parallel` feature is on.
#[cfg(feature = "parallel")]
pub fn run(profile: &Profile, seed: u64, count: usize) -> FuzzReport {
    use rayon::prelude::*;
    aggregate(
        (0..count as u64)
            .into_par_iter()
            .map(|i| {
                let s = seed.wrapping_add(i);
                let (f, o) = check_case(profile, s);
                (s, f, o)
            })
            .collect(),
    )
}

#[cfg(not(feature = "parallel"))]
pub fn run(profile: &Profile, seed: u64, count: usize) -> FuzzReport {
    run_sequential(profile, seed, count)
}
