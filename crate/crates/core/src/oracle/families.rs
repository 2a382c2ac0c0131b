//! Fixed, exhaustively enumerated inputs for validation runs.

use crate::rat::{rat, Rat};
use crate::semantics::{Evaluation, KripkeModel};
use crate::syntax::{Formula, ModalFormula};
use num_traits::One;

/// Every rational in `[0, 1]` with denominator at most `max_den`, ascending.
pub fn unit_bounds(max_den: i64) -> Vec<Rat> {
    let mut out: Vec<Rat> = (1..=max_den)
        .flat_map(|d| (0..=d).map(move |n| rat(n, d)))
        .collect();
    out.sort();
    out.dedup();
    out
}

fn ge(s: &Rat, a: &Formula) -> Formula {
    Formula::prob(s.clone(), a.clone())
}

fn lt(s: &Rat, a: &Formula) -> Formula {
    Formula::not(ge(s, a))
}

fn le(s: &Rat, a: &Formula) -> Formula {
    Formula::prob(Rat::one() - s, Formula::not(a.clone()))
}

fn p() -> Formula {
    Formula::atom("p")
}

fn q() -> Formula {
    Formula::atom("q")
}

/// Bodies over `p, q` without probability operators.
pub fn flat_bodies() -> Vec<Formula> {
    vec![
        p(),
        q(),
        Formula::not(p()),
        Formula::and(p(), q()),
        Formula::or(p(), Formula::not(q())),
    ]
}

/// Bodies over `p, q` with exactly one level of probability.
pub fn nested_bodies() -> Vec<Formula> {
    vec![
        ge(&rat(1, 2), &p()),
        lt(&rat(1, 3), &q()),
        ge(&rat(2, 3), &Formula::and(p(), q())),
    ]
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomInstance {
    pub schema: &'static str,
    /// Negation of the instance; valid schemata make it unsatisfiable.
    pub formula: Formula,
    pub nested: bool,
}

/// Negated instances of the probabilistic axiom schemata
///
/// ```text
/// NN    P≥0 A
/// L1    P≤r A → P<s A                                where s > r
/// L2    P<s A → P≤s A
/// Add1  P≥r A ∧ P≥s B ∧ P≥1 ¬(A∧B) → P≥min(1,r+s) (A∨B)
/// Add2  P≤r A ∧ P<s B → P<r+s (A∨B)                  where r+s ≤ 1
/// ```
///
/// over every bound with denominator at most `max_den` and every (pair of)
/// bodies from [`flat_bodies`] and [`nested_bodies`]; pairs never mix the two
/// kinds.
pub fn axiom_negations(max_den: i64) -> Vec<AxiomInstance> {
    let bounds = unit_bounds(max_den);
    let mut out = Vec::new();
    for (nested, bodies) in [(false, flat_bodies()), (true, nested_bodies())] {
        let mut push = |schema, valid: Formula| {
            out.push(AxiomInstance {
                schema,
                formula: Formula::not(valid),
                nested,
            })
        };
        for a in &bodies {
            push("NN", ge(&Rat::from_integer(0.into()), a));
            for s in &bounds {
                push("L2", Formula::implies(lt(s, a), le(s, a)));
                for r in bounds.iter().filter(|r| *r < s) {
                    push("L1", Formula::implies(le(r, a), lt(s, a)));
                }
            }
        }
        for a in &bodies {
            for b in &bodies {
                let union = Formula::or(a.clone(), b.clone());
                for r in &bounds {
                    for s in &bounds {
                        let sum = r + s;
                        let premise = Formula::conjunction([
                            ge(r, a),
                            ge(s, b),
                            ge(&Rat::one(), &Formula::not(Formula::and(a.clone(), b.clone()))),
                        ])
                        .expect("three conjuncts");
                        push("Add1", Formula::implies(premise, ge(&sum.clone().min(Rat::one()), &union)));
                        if sum <= Rat::one() {
                            let premise = Formula::and(le(r, a), lt(s, b));
                            push("Add2", Formula::implies(premise, lt(&sum, &union)));
                        }
                    }
                }
            }
        }
    }
    out
}

/// Every formula with at most two probability literals over `p, q`, bodies
/// from a fixed list and bounds in `{0, 1/3, 1/2, 2/3, 1}`: single literals of
/// either sign, and conjunctions and disjunctions of two.
pub fn pl_family() -> Vec<Formula> {
    let bodies = [
        p(),
        q(),
        Formula::not(p()),
        Formula::and(p(), q()),
        Formula::or(p(), q()),
        Formula::and(p(), Formula::not(p())),
    ];
    let bounds = [rat(0, 1), rat(1, 3), rat(1, 2), rat(2, 3), rat(1, 1)];
    let mut literals = Vec::new();
    for b in &bodies {
        for s in &bounds {
            literals.push(ge(s, b));
            literals.push(lt(s, b));
        }
    }
    let mut out = literals.clone();
    for (i, x) in literals.iter().enumerate() {
        for y in &literals[i + 1..] {
            out.push(Formula::and(x.clone(), y.clone()));
            out.push(Formula::or(x.clone(), y.clone()));
        }
    }
    out
}

/// Modal formulas over `p, q` of depth at most 2 with at most three modal
/// operators: propositional seeds, one and two operators over them,
/// conjunctions of one-operator formulas, and negated implications between
/// them.
pub fn modal_family() -> Vec<ModalFormula> {
    let (mp, mq) = (ModalFormula::atom("p"), ModalFormula::atom("q"));
    let seeds = vec![
        mp.clone(),
        ModalFormula::not(mp.clone()),
        mq.clone(),
        ModalFormula::and(mp.clone(), mq.clone()),
        ModalFormula::or(mp.clone(), ModalFormula::not(mq.clone())),
        ModalFormula::and(mp.clone(), ModalFormula::not(mp)),
    ];
    let wrap = |xs: &[ModalFormula]| -> Vec<ModalFormula> {
        xs.iter()
            .flat_map(|x| [ModalFormula::boxed(x.clone()), ModalFormula::diamond(x.clone())])
            .collect()
    };
    let one = wrap(&seeds);
    let two = wrap(&one);
    let mut out: Vec<ModalFormula> = seeds.iter().chain(&one).chain(&two).cloned().collect();
    for (i, x) in one.iter().enumerate() {
        for y in &one[i + 1..] {
            out.push(ModalFormula::and(x.clone(), y.clone()));
        }
        for y in &one {
            out.push(ModalFormula::not(ModalFormula::or(ModalFormula::not(x.clone()), y.clone())));
        }
    }
    for x in &two {
        for y in &one {
            out.push(ModalFormula::and(x.clone(), y.clone()));
        }
    }
    out
}

/// Every serial Kripke model on `1..=max_worlds` worlds named `0, 1, …` with
/// every valuation of `props`.
pub fn serial_kripke_models(max_worlds: usize, props: &[&str]) -> Vec<KripkeModel> {
    let mut out = Vec::new();
    for n in 1..=max_worlds {
        let relations = ((1usize << n) - 1).pow(n as u32);
        let valuations = 1usize << (n * props.len());
        for r in 0..relations {
            for v in 0..valuations {
                let valuation: Vec<Evaluation> = (0..n)
                    .map(|w| {
                        props
                            .iter()
                            .enumerate()
                            .map(|(j, name)| (name.to_string(), v >> (w * props.len() + j) & 1 == 1))
                            .collect()
                    })
                    .collect();
                let mut m = KripkeModel::new((0..n).map(|w| w.to_string()).collect(), valuation);
                let mut code = r;
                for w in 0..n {
                    let succ = code % ((1 << n) - 1) + 1;
                    code /= (1 << n) - 1;
                    for u in (0..n).filter(|u| succ >> u & 1 == 1) {
                        m.add_edge(w, u);
                    }
                }
                out.push(m);
            }
        }
    }
    out
}
