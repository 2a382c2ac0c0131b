//! Modal logic D through the probabilistic solver.
//!
//! `□` is read as `P≥1`. A serial Kripke model becomes a probabilistic one by
//! spreading each world's mass uniformly over its successors; going back, a
//! world sees exactly the worlds it gives positive mass.

use crate::base::ClassicalBase;
use crate::pplsolver::{tableau_solve_with, PplVerdict, TableauOptions};
use crate::rat::Rat;
use crate::semantics::{holds_kripke, Evaluation, KripkeModel, PplModel, PplWorld};
use crate::syntax::{Formula, ModalFormula};
use num_traits::{One, Signed, Zero};
use std::collections::BTreeSet;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModalError {
    #[error("world {0} has no successor")]
    NotSerial(String),
}

pub fn translate(a: &ModalFormula) -> Formula {
    match a {
        ModalFormula::Atom(p) => Formula::atom(p.clone()),
        ModalFormula::Not(b) => Formula::not(translate(b)),
        ModalFormula::And(b, c) => Formula::and(translate(b), translate(c)),
        ModalFormula::Box(b) => Formula::prob(Rat::one(), translate(b)),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DWitness {
    pub model: KripkeModel,
    pub root: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DVerdict {
    Sat(DWitness),
    Unsat,
}

impl DVerdict {
    pub fn is_sat(&self) -> bool {
        matches!(self, DVerdict::Sat(_))
    }

    pub fn witness(&self) -> Option<&DWitness> {
        match self {
            DVerdict::Sat(w) => Some(w),
            DVerdict::Unsat => None,
        }
    }
}

pub fn d_sat(a: &ModalFormula) -> DVerdict {
    d_sat_with(a, &TableauOptions::default()).0
}

/// [`d_sat`] with explicit tableau options; also returns the tableau trace
/// of the translated formula.
pub fn d_sat_with(a: &ModalFormula, options: &TableauOptions) -> (DVerdict, Vec<String>) {
    let run = tableau_solve_with(&translate(a), &ClassicalBase, options);
    let verdict = match run.verdict {
        PplVerdict::Unsat => DVerdict::Unsat,
        PplVerdict::Sat(w) => {
            let model = ppl_to_kripke(&w.model);
            assert!(model.is_serial(), "converted witness is not serial");
            assert_eq!(
                holds_kripke(&model, &w.root, a),
                Ok(true),
                "converted witness fails {a}"
            );
            DVerdict::Sat(DWitness {
                model,
                root: w.root,
            })
        }
    };
    (verdict, run.trace)
}

pub fn kripke_to_ppl(m: &KripkeModel) -> Result<PplModel, ModalError> {
    let n = m.worlds.len();
    let worlds = (0..n)
        .map(|w| {
            let succ: BTreeSet<usize> = m.successors[w].iter().copied().collect();
            if succ.is_empty() {
                return Err(ModalError::NotSerial(m.worlds[w].clone()));
            }
            let share = Rat::one() / Rat::from_integer(succ.len().into());
            let mut measure = vec![Rat::zero(); n];
            for u in succ {
                measure[u] = share.clone();
            }
            Ok(PplWorld {
                id: m.worlds[w].clone(),
                valuation: m.valuation[w].clone(),
                measure,
            })
        })
        .collect::<Result<_, _>>()?;
    Ok(PplModel { worlds })
}

pub fn ppl_to_kripke(m: &PplModel) -> KripkeModel {
    let valuation: Vec<Evaluation> = m.worlds.iter().map(|w| w.valuation.clone()).collect();
    let mut k = KripkeModel::new(m.worlds.iter().map(|w| w.id.clone()).collect(), valuation);
    for (w, world) in m.worlds.iter().enumerate() {
        for (u, mu) in world.measure.iter().enumerate() {
            if mu.is_positive() {
                k.add_edge(w, u);
            }
        }
    }
    k
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_modal;
    use crate::rat::rat;
    use crate::semantics::holds_ppl;

    fn m(s: &str) -> ModalFormula {
        parse_modal(s).unwrap()
    }

    fn ev(pairs: &[(&str, bool)]) -> Evaluation {
        pairs.iter().map(|(p, b)| (p.to_string(), *b)).collect()
    }

    #[test]
    fn translation() {
        assert_eq!(translate(&m("[]p")).to_string(), "P>=1 p");
        assert_eq!(translate(&m("p")).to_string(), "p");
        assert_eq!(translate(&m("~[]~p")).to_string(), "~P>=1 ~p");
    }

    #[test]
    fn satisfiability() {
        assert!(d_sat(&m("[]p")).is_sat());
        assert_eq!(d_sat(&m("[]p & ~[]p")), DVerdict::Unsat);
        assert_eq!(d_sat(&m("[](p & ~p)")), DVerdict::Unsat);
        let both = m("~[]p & ~[]~p");
        let w = d_sat(&both);
        let w = w.witness().unwrap();
        assert!(w.model.worlds.len() >= 2);
    }

    #[test]
    fn uniform_measures() {
        let mut k = KripkeModel::new(
            vec!["w".into(), "u".into(), "v".into()],
            vec![ev(&[]), ev(&[("p", true)]), ev(&[("p", false)])],
        );
        k.add_edge(0, 1);
        k.add_edge(0, 2);
        k.add_edge(1, 1);
        k.add_edge(2, 2);
        let p = kripke_to_ppl(&k).unwrap();
        assert_eq!(p.worlds[0].measure, vec![rat(0, 1), rat(1, 2), rat(1, 2)]);
        assert_eq!(p.worlds[1].measure, vec![rat(0, 1), rat(1, 1), rat(0, 1)]);
        assert_eq!(ppl_to_kripke(&p).successors, k.successors);
        let a = m("<>p & <>~p");
        assert!(holds_kripke(&k, "w", &a).unwrap());
        assert!(holds_ppl(&p, "w", &translate(&a)).unwrap());
        k.successors[2].clear();
        assert_eq!(kripke_to_ppl(&k), Err(ModalError::NotSerial("v".into())));
    }

    #[test]
    fn positive_measure_edges() {
        let p = PplModel {
            worlds: vec![
                PplWorld {
                    id: "w".into(),
                    valuation: ev(&[]),
                    measure: vec![rat(0, 1), rat(1, 1), rat(0, 1)],
                },
                PplWorld {
                    id: "u".into(),
                    valuation: ev(&[]),
                    measure: vec![rat(0, 1), rat(1, 2), rat(1, 2)],
                },
                PplWorld {
                    id: "v".into(),
                    valuation: ev(&[]),
                    measure: vec![rat(1, 1), rat(0, 1), rat(0, 1)],
                },
            ],
        };
        let k = ppl_to_kripke(&p);
        assert_eq!(k.successors, vec![vec![1], vec![1, 2], vec![0]]);
        assert!(k.is_serial());
    }
}
