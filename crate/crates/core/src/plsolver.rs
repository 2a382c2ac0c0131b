//! Decision procedure and small-model construction for the non-iterated
//! logic.
//!
//! A formula is expanded into a disjunction of conjunctions of probability
//! literals `P≥s α` / `P<s α`. For each disjunct, one variable per atom
//! (sign vector over the formula's propositions) carries that atom's mass,
//! and the literals become linear rows over those variables. The first
//! feasible disjunct yields a model: after support reduction, one world per
//! positively weighted atom.

use crate::base::{BaseOracle, ClassicalBase};
use crate::exactlp::{self, LinConstraint, LinSystem, LpError, LpSolution, Relation};
use crate::rat::Rat;
use crate::semantics::{Evaluation, PlModel, PlWorld};
use crate::syntax::{cpnb_generators, enumerate_atoms, eval_base, AtomConjunction, Formula, Fragment};
use num_traits::{One, Signed};

/// Largest number of distinct probability literals expanded by
/// [`to_prob_dnf`].
pub const MAX_LITERALS: usize = 20;

/// Largest number of propositions whose atoms [`solve_pl`] enumerates.
pub const MAX_PROPOSITIONS: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PlError {
    #[error("formula nests probability operators or mixes base and probabilistic parts; use the tableau solver")]
    Fragment,
    #[error("{0} distinct probability literals exceed the limit of {MAX_LITERALS}")]
    TooManyLiterals(usize),
    #[error("{0} propositions exceed the limit of {MAX_PROPOSITIONS}")]
    TooManyPropositions(usize),
    #[error("atom does not assign proposition `{0}`")]
    Uncovered(String),
    #[error(transparent)]
    Lp(#[from] LpError),
}

/// `P≥bound body` when positive, `P<bound body` otherwise.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ProbLiteral {
    pub positive: bool,
    pub bound: Rat,
    pub body: Formula,
}

impl ProbLiteral {
    pub fn relation(&self) -> Relation {
        if self.positive {
            Relation::Ge
        } else {
            Relation::Lt
        }
    }
}

/// The model together with the linear system and solution it came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlWitness {
    pub model: PlModel,
    pub disjunct: Vec<ProbLiteral>,
    pub system: LinSystem,
    pub solution: LpSolution,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PlVerdict {
    Sat(Box<PlWitness>),
    Unsat,
}

impl PlVerdict {
    pub fn is_sat(&self) -> bool {
        matches!(self, PlVerdict::Sat(_))
    }

    pub fn witness(&self) -> Option<&PlWitness> {
        match self {
            PlVerdict::Sat(w) => Some(w),
            PlVerdict::Unsat => None,
        }
    }
}

/// Distinct maximal probability-rooted subformulas, first occurrence first.
fn prob_literals(a: &Formula, out: &mut Vec<Formula>) {
    match a {
        Formula::Not(b) => prob_literals(b, out),
        Formula::And(b, c) => {
            prob_literals(b, out);
            prob_literals(c, out);
        }
        Formula::Prob(..) => {
            if !out.contains(a) {
                out.push(a.clone());
            }
        }
        Formula::Atom(_) => {}
    }
}

fn eval_skeleton(a: &Formula, literals: &[Formula], signs: &[bool]) -> bool {
    match a {
        Formula::Not(b) => !eval_skeleton(b, literals, signs),
        Formula::And(b, c) => eval_skeleton(b, literals, signs) && eval_skeleton(c, literals, signs),
        Formula::Prob(..) => {
            let i = literals.iter().position(|l| l == a).expect("literal collected");
            signs[i]
        }
        Formula::Atom(_) => unreachable!("non-iterated formulas have no base literal at top level"),
    }
}

/// Disjunctive normal form over probability literals by truth-table expansion:
/// one disjunct per sign assignment to the `k` distinct literals that makes
/// the Boolean skeleton true.
pub fn to_prob_dnf(a: &Formula) -> Result<Vec<Vec<ProbLiteral>>, PlError> {
    if a.fragment() != Fragment::PlPrime {
        return Err(PlError::Fragment);
    }
    let mut literals = Vec::new();
    prob_literals(a, &mut literals);
    let k = literals.len();
    if k > MAX_LITERALS {
        return Err(PlError::TooManyLiterals(k));
    }
    let mut out = Vec::new();
    for mask in 0..1usize << k {
        let signs: Vec<bool> = (0..k).map(|i| mask >> (k - 1 - i) & 1 == 0).collect();
        if !eval_skeleton(a, &literals, &signs) {
            continue;
        }
        let conj = literals
            .iter()
            .zip(signs.iter())
            .map(|(l, &positive)| match l {
                Formula::Prob(s, body) => ProbLiteral {
                    positive,
                    bound: s.clone(),
                    body: (**body).clone(),
                },
                _ => unreachable!(),
            })
            .collect();
        out.push(conj);
    }
    Ok(out)
}

/// Classical value of `alpha` under the assignment the atom induces.
pub fn atom_satisfies(atom: &AtomConjunction, alpha: &Formula) -> Result<bool, PlError> {
    if alpha.has_prob() {
        return Err(PlError::Fragment);
    }
    let sign = |name: &str| atom.sign_of(&Formula::atom(name));
    if let Some(name) = alpha.propositions().into_iter().find(|p| sign(p).is_none()) {
        return Err(PlError::Uncovered(name));
    }
    Ok(eval_base(alpha, &sign).expect("every proposition is covered"))
}

/// One variable per atom; `Σ x = 1` and, per literal, the mass of the atoms
/// satisfying its body compared against its bound. Non-negativity of the
/// variables is left implicit.
pub fn build_system(disjunct: &[ProbLiteral], atoms: &[AtomConjunction]) -> Result<LinSystem, PlError> {
    let names = (1..=atoms.len()).map(|k| format!("x{k}")).collect();
    let mut system = LinSystem::new(names);
    system.push(LinConstraint::new(
        (0..atoms.len()).map(|k| (k, Rat::one())),
        Relation::Eq,
        Rat::one(),
    ));
    for lit in disjunct {
        let mut terms = Vec::new();
        for (k, atom) in atoms.iter().enumerate() {
            if atom_satisfies(atom, &lit.body)? {
                terms.push((k, Rat::one()));
            }
        }
        system.push(LinConstraint::new(terms, lit.relation(), lit.bound.clone()));
    }
    Ok(system)
}

/// [`solve_pl_with`] over the classical base.
pub fn solve_pl(a: &Formula) -> Result<PlVerdict, PlError> {
    solve_pl_with(a, &ClassicalBase)
}

/// Decides a base or non-iterated formula. Disjuncts are tried in order and
/// the first feasible one produces the witness.
pub fn solve_pl_with(a: &Formula, oracle: &dyn BaseOracle) -> Result<PlVerdict, PlError> {
    // a base formula holds iff it has measure one
    let disjuncts = match a.fragment() {
        Fragment::Base => vec![vec![ProbLiteral {
            positive: true,
            bound: Rat::one(),
            body: a.clone(),
        }]],
        Fragment::PlPrime => to_prob_dnf(a)?,
        Fragment::Ppl => return Err(PlError::Fragment),
    };
    let generators = cpnb_generators(a);
    if generators.len() > MAX_PROPOSITIONS {
        return Err(PlError::TooManyPropositions(generators.len()));
    }
    let mut atoms = Vec::new();
    let mut valuations = Vec::new();
    for atom in enumerate_atoms(&generators) {
        let lits: Vec<(Formula, bool)> = atom.literals().map(|(g, s)| (g.clone(), s)).collect();
        if let Some(ev) = oracle.satisfy(&lits) {
            atoms.push(atom);
            valuations.push(complete(ev, &generators));
        }
    }

    let attempt = |disjunct: &Vec<ProbLiteral>| -> Result<Option<(LinSystem, LpSolution)>, PlError> {
        let system = build_system(disjunct, &atoms)?;
        Ok(exactlp::sparse_feasible(&system)?
            .solution()
            .map(|sol| (system, sol)))
    };

    let found = first_success(&disjuncts, attempt)?;
    let Some((index, (system, solution))) = found else {
        return Ok(PlVerdict::Unsat);
    };
    let worlds = solution
        .values()
        .iter()
        .enumerate()
        .filter(|(_, x)| x.is_positive())
        .enumerate()
        .map(|(w, (k, x))| PlWorld {
            id: format!("w{}", w + 1),
            measure: x.clone(),
            valuation: valuations[k].clone(),
        })
        .collect();
    Ok(PlVerdict::Sat(Box::new(PlWitness {
        model: PlModel { worlds },
        disjunct: disjuncts[index].clone(),
        system,
        solution,
    })))
}

type Attempt = Result<Option<(LinSystem, LpSolution)>, PlError>;
type Found = Result<Option<(usize, (LinSystem, LpSolution))>, PlError>;

/// Lowest-index disjunct whose attempt succeeds, or the first error.
#[cfg(feature = "parallel")]
fn first_success(
    disjuncts: &[Vec<ProbLiteral>],
    attempt: impl Fn(&Vec<ProbLiteral>) -> Attempt + Sync,
) -> Found {
    use rayon::prelude::*;
    disjuncts
        .par_iter()
        .enumerate()
        .find_map_first(|(i, d)| match attempt(d) {
            Ok(Some(found)) => Some(Ok((i, found))),
            Ok(None) => None,
            Err(e) => Some(Err(e)),
        })
        .transpose()
}

#[cfg(not(feature = "parallel"))]
fn first_success(
    disjuncts: &[Vec<ProbLiteral>],
    attempt: impl Fn(&Vec<ProbLiteral>) -> Attempt,
) -> Found {
    for (i, d) in disjuncts.iter().enumerate() {
        if let Some(found) = attempt(d)? {
            return Ok(Some((i, found)));
        }
    }
    Ok(None)
}

fn complete(mut ev: Evaluation, generators: &[Formula]) -> Evaluation {
    for g in generators {
        if let Formula::Atom(name) = g {
            ev.entry(name.clone()).or_insert(false);
        }
    }
    ev
}
