//! Formula trees for the base language, the probabilistic languages and the
//! modal language, together with size measures and atom enumeration.
//!
//! Derived connectives (`∨`, `→`, `↔`, `P<`, `P≤`, `P>`, `P=`, `◇`) only
//! exist in [`Surface`]; everything downstream of [`desugar`] works with the
//! four core constructors of [`Formula`].

use crate::rat::{in_unit_interval, rat_size, Rat};
use num_traits::One;
use std::collections::HashSet;
use std::sync::Arc;

/// A formula of the iterated probabilistic language. Non-iterated formulas
/// and pure base formulas are fragments of it, see [`Fragment`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Atom(String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    /// `P≥bound body`
    Prob(Rat, Box<Formula>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Fragment {
    /// No probability operator anywhere.
    Base,
    /// A Boolean combination of `P≥s α` with every `α` a base formula.
    PlPrime,
    /// Everything else: nested operators or base literals mixed with
    /// probabilistic ones.
    Ppl,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SyntaxError {
    #[error("probability bound {0} is outside [0,1]")]
    BoundOutOfRange(Rat),
    #[error("modal operator in a probabilistic formula")]
    UnexpectedModal,
    #[error("probability operator in a modal formula")]
    UnexpectedProb,
}

impl Formula {
    pub fn atom(name: impl Into<String>) -> Self {
        Formula::Atom(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(a: Formula) -> Self {
        Formula::Not(Box::new(a))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    /// `¬(¬a ∧ ¬b)`
    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::not(Formula::and(Formula::not(a), Formula::not(b)))
    }

    /// `¬a ∨ b`
    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::or(Formula::not(a), b)
    }

    /// `P≥bound body`. Panics when the bound is outside `[0,1]`; use
    /// [`Formula::try_prob`] for untrusted bounds.
    pub fn prob(bound: Rat, body: Formula) -> Self {
        Self::try_prob(bound, body).expect("probability bound outside [0,1]")
    }

    pub fn try_prob(bound: Rat, body: Formula) -> Result<Self, SyntaxError> {
        if !in_unit_interval(&bound) {
            return Err(SyntaxError::BoundOutOfRange(bound));
        }
        Ok(Formula::Prob(bound, Box::new(body)))
    }

    /// Conjunction of the given formulas, left-nested. `None` for an empty
    /// input.
    pub fn conjunction(items: impl IntoIterator<Item = Formula>) -> Option<Formula> {
        items.into_iter().reduce(Formula::and)
    }

    pub fn has_prob(&self) -> bool {
        match self {
            Formula::Atom(_) => false,
            Formula::Not(a) => a.has_prob(),
            Formula::And(a, b) => a.has_prob() || b.has_prob(),
            Formula::Prob(..) => true,
        }
    }

    pub fn fragment(&self) -> Fragment {
        fn pl_prime(f: &Formula) -> bool {
            match f {
                Formula::Atom(_) => false,
                Formula::Not(a) => pl_prime(a),
                Formula::And(a, b) => pl_prime(a) && pl_prime(b),
                Formula::Prob(_, body) => !body.has_prob(),
            }
        }
        if !self.has_prob() {
            Fragment::Base
        } else if pl_prime(self) {
            Fragment::PlPrime
        } else {
            Fragment::Ppl
        }
    }

    /// Maximum number of nested probability operators.
    pub fn prob_depth(&self) -> usize {
        match self {
            Formula::Atom(_) => 0,
            Formula::Not(a) => a.prob_depth(),
            Formula::And(a, b) => a.prob_depth().max(b.prob_depth()),
            Formula::Prob(_, body) => 1 + body.prob_depth(),
        }
    }

    /// Rejects any probability bound outside `[0,1]`.
    pub fn check_bounds(&self) -> Result<(), SyntaxError> {
        match self {
            Formula::Atom(_) => Ok(()),
            Formula::Not(a) => a.check_bounds(),
            Formula::And(a, b) => a.check_bounds().and_then(|_| b.check_bounds()),
            Formula::Prob(s, body) => {
                if in_unit_interval(s) {
                    body.check_bounds()
                } else {
                    Err(SyntaxError::BoundOutOfRange(s.clone()))
                }
            }
        }
    }

    /// Distinct proposition names in pre-order of first occurrence.
    pub fn propositions(&self) -> Vec<String> {
        cpnb_generators(self)
            .into_iter()
            .map(|g| match g {
                Formula::Atom(name) => name,
                _ => unreachable!("generators of the classical base are atoms"),
            })
            .collect()
    }
}

/// Number of symbols: every node counts one, parentheses count nothing.
pub fn size(a: &Formula) -> usize {
    match a {
        Formula::Atom(_) => 1,
        Formula::Not(b) | Formula::Prob(_, b) => 1 + size(b),
        Formula::And(b, c) => 1 + size(b) + size(c),
    }
}

/// Largest size of a probability bound occurring in `a`, or 0 when there is
/// none.
pub fn prob_norm(a: &Formula) -> u64 {
    match a {
        Formula::Atom(_) => 0,
        Formula::Not(b) => prob_norm(b),
        Formula::And(b, c) => prob_norm(b).max(prob_norm(c)),
        Formula::Prob(s, b) => rat_size(s).max(prob_norm(b)),
    }
}

/// Subformulas in pre-order of first occurrence, structural duplicates
/// merged.
pub fn subformulas(a: &Formula) -> Vec<Formula> {
    fn walk<'a>(f: &'a Formula, seen: &mut HashSet<&'a Formula>, out: &mut Vec<Formula>) {
        if !seen.insert(f) {
            return;
        }
        out.push(f.clone());
        match f {
            Formula::Atom(_) => {}
            Formula::Not(b) | Formula::Prob(_, b) => walk(b, seen, out),
            Formula::And(b, c) => {
                walk(b, seen, out);
                walk(c, seen, out);
            }
        }
    }
    let mut out = Vec::new();
    walk(a, &mut HashSet::new(), &mut out);
    out
}

/// Basic subformulas of `a`. For the classical base these are exactly the
/// atomic propositions, in pre-order of first occurrence.
pub fn cpnb_generators(a: &Formula) -> Vec<Formula> {
    fn walk(f: &Formula, seen: &mut HashSet<String>, out: &mut Vec<Formula>) {
        match f {
            Formula::Atom(name) => {
                if seen.insert(name.clone()) {
                    out.push(f.clone());
                }
            }
            Formula::Not(b) | Formula::Prob(_, b) => walk(b, seen, out),
            Formula::And(b, c) => {
                walk(b, seen, out);
                walk(c, seen, out);
            }
        }
    }
    let mut out = Vec::new();
    walk(a, &mut HashSet::new(), &mut out);
    out
}

/// One sign per generator: a conjunction `±g₁ ∧ … ∧ ±gₙ`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AtomConjunction {
    generators: Arc<[Formula]>,
    signs: Vec<bool>,
}

impl AtomConjunction {
    pub fn new(generators: Arc<[Formula]>, signs: Vec<bool>) -> Self {
        assert_eq!(
            generators.len(),
            signs.len(),
            "every generator needs exactly one sign"
        );
        Self { generators, signs }
    }

    pub fn generators(&self) -> &[Formula] {
        &self.generators
    }

    pub fn signs(&self) -> &[bool] {
        &self.signs
    }

    /// Sign assigned to `g`, if `g` is one of the generators.
    pub fn sign_of(&self, g: &Formula) -> Option<bool> {
        self.generators
            .iter()
            .position(|x| x == g)
            .map(|i| self.signs[i])
    }

    pub fn literals(&self) -> impl Iterator<Item = (&Formula, bool)> {
        self.generators.iter().zip(self.signs.iter().copied())
    }

    /// The conjunction as a formula; `None` for the empty conjunction.
    pub fn to_formula(&self) -> Option<Formula> {
        Formula::conjunction(self.literals().map(|(g, positive)| {
            if positive {
                g.clone()
            } else {
                Formula::not(g.clone())
            }
        }))
    }
}

/// All `2ⁿ` sign vectors over `generators`, lexicographic with the positive
/// sign first: `[p, q]` gives `+p+q, +p−q, −p+q, −p−q`. An empty generator
/// sequence yields the single empty conjunction.
pub fn enumerate_atoms(generators: &[Formula]) -> Vec<AtomConjunction> {
    let n = generators.len();
    assert!(n < usize::BITS as usize, "too many generators");
    let shared: Arc<[Formula]> = generators.into();
    (0..1usize << n)
        .map(|index| {
            let signs = (0..n).map(|k| index >> (n - 1 - k) & 1 == 0).collect();
            AtomConjunction::new(shared.clone(), signs)
        })
        .collect()
}

/// Classical evaluation of a base formula. `None` when `lookup` does not
/// know some proposition or `a` contains a probability operator.
pub fn eval_base(a: &Formula, lookup: &dyn Fn(&str) -> Option<bool>) -> Option<bool> {
    match a {
        Formula::Atom(name) => lookup(name),
        Formula::Not(b) => eval_base(b, lookup).map(|v| !v),
        Formula::And(b, c) => Some(eval_base(b, lookup)? & eval_base(c, lookup)?),
        Formula::Prob(..) => None,
    }
}

/// Formula of the modal language.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModalFormula {
    Atom(String),
    Not(Box<ModalFormula>),
    And(Box<ModalFormula>, Box<ModalFormula>),
    Box(Box<ModalFormula>),
}

impl ModalFormula {
    pub fn atom(name: impl Into<String>) -> Self {
        ModalFormula::Atom(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(a: ModalFormula) -> Self {
        ModalFormula::Not(Box::new(a))
    }

    pub fn and(a: ModalFormula, b: ModalFormula) -> Self {
        ModalFormula::And(Box::new(a), Box::new(b))
    }

    pub fn boxed(a: ModalFormula) -> Self {
        ModalFormula::Box(Box::new(a))
    }

    /// `¬□¬a`
    pub fn diamond(a: ModalFormula) -> Self {
        ModalFormula::not(ModalFormula::boxed(ModalFormula::not(a)))
    }

    pub fn or(a: ModalFormula, b: ModalFormula) -> Self {
        ModalFormula::not(ModalFormula::and(ModalFormula::not(a), ModalFormula::not(b)))
    }

    pub fn modal_depth(&self) -> usize {
        match self {
            ModalFormula::Atom(_) => 0,
            ModalFormula::Not(a) => a.modal_depth(),
            ModalFormula::And(a, b) => a.modal_depth().max(b.modal_depth()),
            ModalFormula::Box(a) => 1 + a.modal_depth(),
        }
    }

    /// Distinct proposition names in pre-order of first occurrence.
    pub fn propositions(&self) -> Vec<String> {
        fn walk(f: &ModalFormula, out: &mut Vec<String>) {
            match f {
                ModalFormula::Atom(name) => {
                    if !out.contains(name) {
                        out.push(name.clone());
                    }
                }
                ModalFormula::Not(a) | ModalFormula::Box(a) => walk(a, out),
                ModalFormula::And(a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProbRelation {
    Ge,
    Gt,
    Le,
    Lt,
    Eq,
}

/// Formula tree as written, with derived connectives still present.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Surface {
    Atom(String),
    Not(Box<Surface>),
    And(Box<Surface>, Box<Surface>),
    Or(Box<Surface>, Box<Surface>),
    Implies(Box<Surface>, Box<Surface>),
    Iff(Box<Surface>, Box<Surface>),
    Prob(ProbRelation, Rat, Box<Surface>),
    Box(Box<Surface>),
    Diamond(Box<Surface>),
}

impl From<&Formula> for Surface {
    fn from(f: &Formula) -> Self {
        match f {
            Formula::Atom(n) => Surface::Atom(n.clone()),
            Formula::Not(a) => Surface::Not(Box::new(a.as_ref().into())),
            Formula::And(a, b) => {
                Surface::And(Box::new(a.as_ref().into()), Box::new(b.as_ref().into()))
            }
            Formula::Prob(s, a) => {
                Surface::Prob(ProbRelation::Ge, s.clone(), Box::new(a.as_ref().into()))
            }
        }
    }
}

/// Eliminates derived connectives:
/// `P<s α ≡ ¬P≥s α`, `P≤s α ≡ P≥1−s ¬α`, `P>s α ≡ ¬P≤s α`,
/// `P=s α ≡ P≥s α ∧ P≤s α`, `α ∨ β ≡ ¬(¬α ∧ ¬β)`, `α → β ≡ ¬α ∨ β`,
/// `α ↔ β ≡ (α → β) ∧ (β → α)`.
pub fn desugar(surface: &Surface) -> Result<Formula, SyntaxError> {
    Ok(match surface {
        Surface::Atom(n) => Formula::Atom(n.clone()),
        Surface::Not(a) => Formula::not(desugar(a)?),
        Surface::And(a, b) => Formula::and(desugar(a)?, desugar(b)?),
        Surface::Or(a, b) => Formula::or(desugar(a)?, desugar(b)?),
        Surface::Implies(a, b) => Formula::implies(desugar(a)?, desugar(b)?),
        Surface::Iff(a, b) => {
            let (a, b) = (desugar(a)?, desugar(b)?);
            Formula::and(
                Formula::implies(a.clone(), b.clone()),
                Formula::implies(b, a),
            )
        }
        Surface::Prob(rel, s, a) => {
            let body = desugar(a)?;
            if !in_unit_interval(s) {
                return Err(SyntaxError::BoundOutOfRange(s.clone()));
            }
            let at_most = |s: &Rat, body: Formula| {
                Formula::Prob(Rat::one() - s, Box::new(Formula::not(body)))
            };
            match rel {
                ProbRelation::Ge => Formula::Prob(s.clone(), Box::new(body)),
                ProbRelation::Lt => Formula::not(Formula::Prob(s.clone(), Box::new(body))),
                ProbRelation::Le => at_most(s, body),
                ProbRelation::Gt => Formula::not(at_most(s, body)),
                ProbRelation::Eq => Formula::and(
                    Formula::Prob(s.clone(), Box::new(body.clone())),
                    at_most(s, body),
                ),
            }
        }
        Surface::Box(_) | Surface::Diamond(_) => return Err(SyntaxError::UnexpectedModal),
    })
}

/// Modal counterpart of [`desugar`]; `◇α ≡ ¬□¬α`.
pub fn desugar_modal(surface: &Surface) -> Result<ModalFormula, SyntaxError> {
    Ok(match surface {
        Surface::Atom(n) => ModalFormula::Atom(n.clone()),
        Surface::Not(a) => ModalFormula::not(desugar_modal(a)?),
        Surface::And(a, b) => ModalFormula::and(desugar_modal(a)?, desugar_modal(b)?),
        Surface::Or(a, b) => ModalFormula::or(desugar_modal(a)?, desugar_modal(b)?),
        Surface::Implies(a, b) => {
            ModalFormula::or(ModalFormula::not(desugar_modal(a)?), desugar_modal(b)?)
        }
        Surface::Iff(a, b) => {
            let (a, b) = (desugar_modal(a)?, desugar_modal(b)?);
            let imp = |x: ModalFormula, y: ModalFormula| ModalFormula::or(ModalFormula::not(x), y);
            ModalFormula::and(imp(a.clone(), b.clone()), imp(b, a))
        }
        Surface::Box(a) => ModalFormula::boxed(desugar_modal(a)?),
        Surface::Diamond(a) => ModalFormula::diamond(desugar_modal(a)?),
        Surface::Prob(..) => return Err(SyntaxError::UnexpectedProb),
    })
}
