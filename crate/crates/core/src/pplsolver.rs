//! Tableau decision procedure and model construction for iterated
//! probabilistic formulas.
//!
//! The tableau starts from `w T A`. Propositional rules saturate a world
//! path:
//!
//! ```text
//!  w T ¬A      w F ¬A      w T A∧B       w F A∧B
//!  ──────      ──────      ───────     ───────────
//!  w F A       w T A       w T A         w F A | w F B
//!                          w T B
//! ```
//!
//! and the probabilistic rule opens one child world `w.k` per sign vector
//! `a_k` over the bodies `B₁ … B_m` of the path's `P≥s B` formulas. A path is
//! realizable when the base oracle accepts its basic literals and, if it has
//! probabilistic formulas, some distribution over its realizable children
//! satisfies every `T P≥s B` (mass of children containing `B` positively
//! `≥ s`) and every `F P≥s B` (that mass `< s`). Children are decided
//! first; one exact LP over the realizable ones then finds the measures.

use crate::base::{BaseOracle, ClassicalBase};
use crate::exactlp::{self, LinConstraint, LinSystem, Relation};
use crate::rat::Rat;
use crate::semantics::{Evaluation, PplModel, PplWorld};
use crate::syntax::{enumerate_atoms, AtomConjunction, Formula};
use num_traits::{One, Signed, Zero};
use std::collections::{HashMap, VecDeque};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    T,
    F,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignedFormula {
    pub sign: Sign,
    pub formula: Formula,
}

impl SignedFormula {
    pub fn t(formula: Formula) -> Self {
        Self {
            sign: Sign::T,
            formula,
        }
    }

    pub fn f(formula: Formula) -> Self {
        Self {
            sign: Sign::F,
            formula,
        }
    }
}

impl fmt::Display for SignedFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self.sign {
            Sign::T => "T",
            Sign::F => "F",
        };
        write!(f, "{s} {}", self.formula)
    }
}

pub type PointId = usize;

/// The signed formulas of one world between two points of the tableau.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WorldPath {
    pub id: (PointId, PointId),
    pub label: String,
    pub entries: Vec<SignedFormula>,
}

impl WorldPath {
    pub fn new(id: (PointId, PointId), label: impl Into<String>, entries: Vec<SignedFormula>) -> Self {
        Self {
            id,
            label: label.into(),
            entries,
        }
    }

    /// `label:i-j`
    pub fn path_id(&self) -> String {
        format!("{}:{}-{}", self.label, self.id.0, self.id.1)
    }

    /// Conjunction of every entry, negated when signed `F`.
    pub fn f_conjunction(&self) -> Option<Formula> {
        Formula::conjunction(self.entries.iter().map(|e| match e.sign {
            Sign::T => e.formula.clone(),
            Sign::F => Formula::not(e.formula.clone()),
        }))
    }

    /// Signed basic formulas of the path (`true` for `T`). For the classical
    /// base these are the signed atoms.
    pub fn b_conjunction(&self) -> Vec<(Formula, bool)> {
        self.entries
            .iter()
            .filter(|e| matches!(e.formula, Formula::Atom(_)))
            .map(|e| (e.formula.clone(), e.sign == Sign::T))
            .collect()
    }

    pub fn is_p_open(&self) -> bool {
        self.entries
            .iter()
            .any(|e| matches!(e.formula, Formula::Prob(..)))
    }

    fn key(&self) -> Vec<SignedFormula> {
        let mut k = self.entries.clone();
        k.sort();
        k.dedup();
        k
    }
}

/// Bodies `B` of the `P≥s B` entries, both signs, first occurrence first.
pub fn prob_bodies(path: &WorldPath) -> Vec<Formula> {
    let mut out: Vec<Formula> = Vec::new();
    for e in &path.entries {
        if let Formula::Prob(_, body) = &e.formula {
            if !out.contains(body) {
                out.push((**body).clone());
            }
        }
    }
    out
}

/// Checks `measures` over child atoms against every probabilistic entry of
/// `path`: for `T P≥s B` the children with `B` positive need mass `≥ s`, for
/// `F P≥s B` mass `< s`.
pub fn prob_test(path: &WorldPath, measures: &[(AtomConjunction, Rat)]) -> bool {
    path.entries.iter().all(|e| {
        let Formula::Prob(s, body) = &e.formula else {
            return true;
        };
        let mass = measures
            .iter()
            .filter(|(atom, _)| atom.sign_of(body) == Some(true))
            .fold(Rat::zero(), |acc, (_, m)| acc + m);
        match e.sign {
            Sign::T => mass >= *s,
            Sign::F => mass < *s,
        }
    })
}

/// Point counter and trace sink shared by one tableau construction.
struct Builder {
    next_point: PointId,
    trace: Option<Vec<String>>,
}

impl Builder {
    fn fresh_point(&mut self) -> PointId {
        let p = self.next_point;
        self.next_point += 1;
        p
    }

    fn emit(&mut self, line: impl FnOnce() -> String) {
        if let Some(t) = self.trace.as_mut() {
            t.push(line());
        }
    }

    fn node(&mut self, label: &str, sf: &SignedFormula) {
        self.emit(|| format!("NODE {label} {sf}"));
    }

    /// All saturated alternatives of `initial`, each closed with a fresh end
    /// point. `∧F` branches are explored left first.
    fn saturate(&mut self, start: PointId, label: &str, initial: Vec<SignedFormula>) -> Vec<WorldPath> {
        let mut finished = Vec::new();
        self.expand(label, Vec::new(), initial.into(), &mut finished);
        finished
            .into_iter()
            .map(|entries| {
                let end = self.fresh_point();
                WorldPath::new((start, end), label, entries)
            })
            .collect()
    }

    fn expand(
        &mut self,
        label: &str,
        mut done: Vec<SignedFormula>,
        mut todo: VecDeque<SignedFormula>,
        finished: &mut Vec<Vec<SignedFormula>>,
    ) {
        while let Some(sf) = todo.pop_front() {
            let conclusions = match (sf.sign, sf.formula) {
                (Sign::T, Formula::Not(a)) => vec![SignedFormula::f(*a)],
                (Sign::F, Formula::Not(a)) => vec![SignedFormula::t(*a)],
                (Sign::T, Formula::And(a, b)) => vec![SignedFormula::t(*a), SignedFormula::t(*b)],
                (Sign::F, Formula::And(a, b)) => {
                    self.emit(|| "BRANCH andF".to_string());
                    for branch in [*a, *b] {
                        let concl = SignedFormula::f(branch);
                        self.node(label, &concl);
                        let mut rest = todo.clone();
                        rest.push_back(concl);
                        self.expand(label, done.clone(), rest, finished);
                    }
                    return;
                }
                (sign, formula) => {
                    let sf = SignedFormula { sign, formula };
                    if !done.contains(&sf) {
                        done.push(sf);
                    }
                    continue;
                }
            };
            for c in conclusions {
                self.node(label, &c);
                todo.push_back(c);
            }
        }
        finished.push(done);
    }
}

/// Applies the propositional rules for as long as possible. Every returned
/// path holds only signed atoms and signed `P≥s B` formulas.
pub fn saturate(path: &WorldPath) -> Vec<WorldPath> {
    let mut b = Builder {
        next_point: path.id.0.max(path.id.1) + 1,
        trace: None,
    };
    b.saturate(path.id.0, &path.label, path.entries.clone())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChildMeasure {
    pub path: WorldPath,
    pub atom: AtomConjunction,
    pub measure: Rat,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RealizabilityResult {
    /// `children` lists the positively weighted children; their measures sum
    /// to 1. It is empty for a path without probabilistic formulas.
    Realizable {
        valuation: Evaluation,
        children: Vec<ChildMeasure>,
    },
    NotRealizable,
}

impl RealizabilityResult {
    pub fn is_realizable(&self) -> bool {
        matches!(self, RealizabilityResult::Realizable { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TableauOptions {
    /// Reuse the verdict of a saturated path for every later path with the
    /// same signed formulas.
    pub memoize: bool,
    pub trace: bool,
}

impl Default for TableauOptions {
    fn default() -> Self {
        Self {
            memoize: true,
            trace: false,
        }
    }
}

struct Node {
    path: WorldPath,
    valuation: Evaluation,
    children: Vec<(usize, AtomConjunction, Rat)>,
}

struct Solver<'o> {
    oracle: &'o dyn BaseOracle,
    memoize: bool,
    build: Builder,
    memo: HashMap<Vec<SignedFormula>, Option<usize>>,
    nodes: Vec<Node>,
}

impl<'o> Solver<'o> {
    fn new(oracle: &'o dyn BaseOracle, options: &TableauOptions, first_point: PointId) -> Self {
        Self {
            oracle,
            memoize: options.memoize,
            build: Builder {
                next_point: first_point,
                trace: options.trace.then(Vec::new),
            },
            memo: HashMap::new(),
            nodes: Vec::new(),
        }
    }

    /// Node index of `path` when it is realizable. `budget` is the remaining
    /// probabilistic nesting depth.
    fn realize(&mut self, path: &WorldPath, budget: usize) -> Option<usize> {
        let key = self.memoize.then(|| path.key());
        if let Some(hit) = key.as_ref().and_then(|k| self.memo.get(k)) {
            let hit = *hit;
            let pid = path.path_id();
            self.build
                .emit(|| format!("REALIZABLE {pid} {}", if hit.is_some() { "yes" } else { "no" }));
            return hit;
        }
        let result = self.realize_uncached(path, budget);
        let pid = path.path_id();
        self.build
            .emit(|| format!("REALIZABLE {pid} {}", if result.is_some() { "yes" } else { "no" }));
        if let Some(k) = key {
            self.memo.insert(k, result);
        }
        result
    }

    fn realize_uncached(&mut self, path: &WorldPath, budget: usize) -> Option<usize> {
        let valuation = self.oracle.satisfy(&path.b_conjunction())?;
        let bodies = prob_bodies(path);
        if bodies.is_empty() {
            return Some(self.push_node(path, valuation, Vec::new()));
        }
        assert!(
            budget > 0,
            "probabilistic rule applied beyond the nesting depth of the root formula"
        );
        let atoms = enumerate_atoms(&bodies);
        let pid = path.path_id();
        let n = atoms.len();
        self.build.emit(|| "BRANCH Prob".to_string());
        self.build.emit(|| format!("PROB {pid} atoms={n}"));

        let mut realizable: Vec<(usize, usize)> = Vec::new();
        for (l, atom) in atoms.iter().enumerate() {
            let label = format!("{}.{}", path.label, l + 1);
            let root = SignedFormula::t(atom.to_formula().expect("at least one body"));
            self.build.node(&label, &root);
            let alternatives = self.build.saturate(path.id.1, &label, vec![root]);
            let found = alternatives
                .iter()
                .find_map(|alt| self.realize(alt, budget - 1));
            if let Some(child) = found {
                realizable.push((l, child));
            }
        }

        let mut system = LinSystem::new(
            realizable
                .iter()
                .map(|(l, _)| format!("y{}", l + 1))
                .collect(),
        );
        system.push(LinConstraint::new(
            (0..realizable.len()).map(|v| (v, Rat::one())),
            Relation::Eq,
            Rat::one(),
        ));
        for e in &path.entries {
            let Formula::Prob(s, body) = &e.formula else {
                continue;
            };
            let terms = realizable
                .iter()
                .enumerate()
                .filter(|(_, (l, _))| atoms[*l].sign_of(body) == Some(true))
                .map(|(v, _)| (v, Rat::one()));
            let rel = match e.sign {
                Sign::T => Relation::Ge,
                Sign::F => Relation::Lt,
            };
            system.push(LinConstraint::new(terms, rel, s.clone()));
        }
        let solution = exactlp::sparse_feasible(&system)
            .expect("tableau systems only use declared variables")
            .solution();
        let Some(solution) = solution else {
            self.build.emit(|| "LP infeasible".to_string());
            return None;
        };
        self.build.emit(|| "LP feasible".to_string());

        let measures: Vec<(AtomConjunction, Rat)> = realizable
            .iter()
            .zip(solution.values())
            .map(|((l, _), y)| (atoms[*l].clone(), y.clone()))
            .collect();
        debug_assert!(prob_test(path, &measures));
        let children = realizable
            .iter()
            .zip(solution.values())
            .filter(|(_, y)| y.is_positive())
            .map(|((l, child), y)| (*child, atoms[*l].clone(), y.clone()))
            .collect();
        Some(self.push_node(path, valuation, children))
    }

    fn push_node(&mut self, path: &WorldPath, valuation: Evaluation, children: Vec<(usize, AtomConjunction, Rat)>) -> usize {
        self.nodes.push(Node {
            path: path.clone(),
            valuation,
            children,
        });
        self.nodes.len() - 1
    }

    /// Model over the nodes reachable from `root` through positive measure.
    fn assemble(&self, root: usize, propositions: &[String]) -> PplModel {
        let mut order = vec![root];
        let mut position: HashMap<usize, usize> = HashMap::from([(root, 0)]);
        let mut i = 0;
        while i < order.len() {
            for (child, _, _) in &self.nodes[order[i]].children {
                if !position.contains_key(child) {
                    position.insert(*child, order.len());
                    order.push(*child);
                }
            }
            i += 1;
        }
        let n = order.len();
        let worlds = order
            .iter()
            .enumerate()
            .map(|(pos, &node)| {
                let mut measure = vec![Rat::zero(); n];
                for (child, _, m) in &self.nodes[node].children {
                    measure[position[child]] += m;
                }
                // A leaf constrains nothing about its measure; a point mass
                // on itself keeps the row a distribution.
                if self.nodes[node].children.is_empty() {
                    measure[pos] = Rat::one();
                }
                let mut valuation = self.nodes[node].valuation.clone();
                for p in propositions {
                    valuation.entry(p.clone()).or_insert(false);
                }
                PplWorld {
                    id: pos.to_string(),
                    valuation,
                    measure,
                }
            })
            .collect();
        PplModel { worlds }
    }
}

/// Decides whether a saturated `path` is realizable, spending at most
/// `depth_budget` nested applications of the probabilistic rule.
pub fn realize(path: &WorldPath, depth_budget: usize, oracle: &dyn BaseOracle) -> RealizabilityResult {
    let first = path.id.0.max(path.id.1) + 1;
    let mut solver = Solver::new(oracle, &TableauOptions::default(), first);
    match solver.realize(path, depth_budget) {
        None => RealizabilityResult::NotRealizable,
        Some(node) => {
            let node = &solver.nodes[node];
            RealizabilityResult::Realizable {
                valuation: node.valuation.clone(),
                children: node
                    .children
                    .iter()
                    .map(|(child, atom, m)| ChildMeasure {
                        path: solver.nodes[*child].path.clone(),
                        atom: atom.clone(),
                        measure: m.clone(),
                    })
                    .collect(),
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PplWitness {
    pub model: PplModel,
    /// World where the formula holds.
    pub root: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PplVerdict {
    Sat(PplWitness),
    Unsat,
}

impl PplVerdict {
    pub fn is_sat(&self) -> bool {
        matches!(self, PplVerdict::Sat(_))
    }

    pub fn witness(&self) -> Option<&PplWitness> {
        match self {
            PplVerdict::Sat(w) => Some(w),
            PplVerdict::Unsat => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableauRun {
    pub verdict: PplVerdict,
    /// Event lines; empty unless tracing was requested.
    pub trace: Vec<String>,
}

/// [`tableau_solve_with`] over the classical base with default options.
pub fn tableau_solve(a: &Formula) -> PplVerdict {
    tableau_solve_with(a, &ClassicalBase, &TableauOptions::default()).verdict
}

/// Builds the tableau for `w T a` depth first. Satisfiable iff some saturated
/// root path is realizable; the first such path (left branches first) gives
/// the witness, rooted at world `"0"`.
pub fn tableau_solve_with(a: &Formula, oracle: &dyn BaseOracle, options: &TableauOptions) -> TableauRun {
    let mut solver = Solver::new(oracle, options, 1);
    let root = SignedFormula::t(a.clone());
    solver.build.node("w", &root);
    let budget = a.prob_depth();
    let alternatives = solver.build.saturate(0, "w", vec![root]);
    let winner = alternatives
        .iter()
        .find_map(|path| solver.realize(path, budget));
    let verdict = match winner {
        None => PplVerdict::Unsat,
        Some(node) => PplVerdict::Sat(PplWitness {
            model: solver.assemble(node, &a.propositions()),
            root: "0".to_string(),
        }),
    };
    TableauRun {
        verdict,
        trace: solver.build.trace.unwrap_or_default(),
    }
}
