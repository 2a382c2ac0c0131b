//! Base logic decision interface.
//!
//! Both solvers only ever ask the base logic one question: is a conjunction
//! of positive and negative basic formulas satisfiable? Swapping the
//! implementation changes the base logic; everything else stays.

use crate::semantics::Evaluation;
use crate::syntax::Formula;

pub trait BaseOracle: Sync {
    /// Decides `⋀ ±Bᵢ` over basic formulas `Bᵢ` (`true` = positive). Returns a
    /// satisfying evaluation, or `None` when the conjunction is unsatisfiable.
    fn satisfy(&self, literals: &[(Formula, bool)]) -> Option<Evaluation>;
}

/// Classical propositional logic: basic formulas are atomic propositions and
/// a conjunction is satisfiable iff no proposition occurs with both signs.
#[derive(Debug, Clone, Copy, Default)]
pub struct ClassicalBase;

impl BaseOracle for ClassicalBase {
    fn satisfy(&self, literals: &[(Formula, bool)]) -> Option<Evaluation> {
        let mut ev = Evaluation::new();
        for (b, positive) in literals {
            let Formula::Atom(name) = b else {
                panic!("classical basic formulas are atoms, got {b}");
            };
            if *ev.entry(name.clone()).or_insert(*positive) != *positive {
                return None;
            }
        }
        Some(ev)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classical_consistency() {
        let p = Formula::atom("p");
        let q = Formula::atom("q");
        let ev = ClassicalBase
            .satisfy(&[(p.clone(), true), (q.clone(), false), (p.clone(), true)])
            .unwrap();
        assert_eq!(ev.get("p"), Some(&true));
        assert_eq!(ev.get("q"), Some(&false));
        assert!(ClassicalBase.satisfy(&[(p.clone(), true), (p, false)]).is_none());
        assert!(ClassicalBase.satisfy(&[]).unwrap().is_empty());
    }
}
