//! Verdict-only PL satisfiability by full expansion: guess the truth value of
//! every probabilistic literal, then ask Fourier–Motzkin for a distribution
//! over all propositional assignments.

use super::fm::fm_feasible;
use super::OracleError;
use crate::exactlp::{LinConstraint, LinSystem, Relation};
use crate::rat::Rat;
use crate::syntax::Formula;
use num_traits::{One, Zero};

pub const MAX_NAIVE_PROPOSITIONS: usize = 3;
pub const MAX_NAIVE_LITERALS: usize = 3;

fn collect(f: &Formula, props: &mut Vec<String>, lits: &mut Vec<(Rat, Formula)>, inside: bool) -> Result<(), OracleError> {
    match f {
        Formula::Atom(p) => {
            if !props.contains(p) {
                props.push(p.clone());
            }
        }
        Formula::Not(a) => collect(a, props, lits, inside)?,
        Formula::And(a, b) => {
            collect(a, props, lits, inside)?;
            collect(b, props, lits, inside)?;
        }
        Formula::Prob(s, body) => {
            if inside {
                return Err(OracleError::Unsupported("nested probability".into()));
            }
            let lit = (s.clone(), (**body).clone());
            if !lits.contains(&lit) {
                lits.push(lit);
            }
            collect(body, props, lits, true)?;
        }
    }
    Ok(())
}

/// Propositional value of `f` under `bits` (bit `i` is `props[i]`).
fn eval_prop(f: &Formula, props: &[String], bits: usize) -> bool {
    match f {
        Formula::Atom(p) => {
            let i = props.iter().position(|q| q == p).expect("collected");
            bits >> i & 1 == 1
        }
        Formula::Not(a) => !eval_prop(a, props, bits),
        Formula::And(a, b) => eval_prop(a, props, bits) && eval_prop(b, props, bits),
        Formula::Prob(..) => unreachable!("only bodies and base formulas are evaluated"),
    }
}

/// Boolean value of the skeleton of `f` when literal `k` has value bit `k`
/// of `guess`.
fn eval_skeleton(f: &Formula, lits: &[(Rat, Formula)], guess: usize) -> Option<bool> {
    match f {
        Formula::Atom(_) => None,
        Formula::Not(a) => eval_skeleton(a, lits, guess).map(|v| !v),
        Formula::And(a, b) => Some(eval_skeleton(a, lits, guess)? && eval_skeleton(b, lits, guess)?),
        Formula::Prob(s, body) => {
            let k = lits
                .iter()
                .position(|(t, c)| t == s && c == &**body)
                .expect("collected");
            Some(guess >> k & 1 == 1)
        }
    }
}

/// Satisfiability of a formula with no nested probability. A formula with
/// no probability at all is decided by its truth table; otherwise every
/// atom must sit under a probability operator.
pub fn pl_solve_naive(a: &Formula) -> Result<bool, OracleError> {
    let (mut props, mut lits) = (Vec::new(), Vec::new());
    collect(a, &mut props, &mut lits, false)?;
    if props.len() > MAX_NAIVE_PROPOSITIONS || lits.len() > MAX_NAIVE_LITERALS {
        return Err(OracleError::TooLarge(format!(
            "{} propositions and {} literals, at most {MAX_NAIVE_PROPOSITIONS} and {MAX_NAIVE_LITERALS}",
            props.len(),
            lits.len()
        )));
    }
    let assignments = 1usize << props.len();
    if lits.is_empty() {
        return Ok((0..assignments).any(|bits| eval_prop(a, &props, bits)));
    }
    for guess in 0..1usize << lits.len() {
        match eval_skeleton(a, &lits, guess) {
            None => {
                return Err(OracleError::Unsupported(
                    "proposition outside every probability operator".into(),
                ))
            }
            Some(false) => continue,
            Some(true) => {}
        }
        let mut system = LinSystem::with_vars(assignments);
        system.push(LinConstraint::new(
            (0..assignments).map(|v| (v, Rat::one())),
            Relation::Eq,
            Rat::one(),
        ));
        for v in 0..assignments {
            system.push(LinConstraint::new([(v, Rat::one())], Relation::Ge, Rat::zero()));
        }
        for (k, (s, body)) in lits.iter().enumerate() {
            let terms = (0..assignments)
                .filter(|&bits| eval_prop(body, &props, bits))
                .map(|v| (v, Rat::one()));
            let rel = if guess >> k & 1 == 1 {
                Relation::Ge
            } else {
                Relation::Lt
            };
            system.push(LinConstraint::new(terms, rel, s.clone()));
        }
        if fm_feasible(&system)? {
            return Ok(true);
        }
    }
    Ok(false)
}
