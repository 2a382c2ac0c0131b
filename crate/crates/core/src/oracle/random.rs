//! Seeded random formulas and linear systems for differential testing.

use crate::exactlp::{LinConstraint, LinSystem, Relation};
use crate::rat::{rat, Rat};
use crate::syntax::{Formula, ModalFormula};
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Nesting {
    /// Boolean combinations of probability literals over base bodies.
    Pl,
    /// Probability operators nest and mix freely with propositions.
    Ppl,
    Modal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Profile {
    /// Body depth for `Pl`; operator nesting depth for `Ppl` and `Modal`.
    pub max_depth: usize,
    pub max_props: usize,
    /// Probability (or box) operators per formula.
    pub max_literals: usize,
    pub nesting: Nesting,
}

impl Profile {
    pub const PL: Profile = Profile {
        max_depth: 2,
        max_props: 3,
        max_literals: 3,
        nesting: Nesting::Pl,
    };
    pub const PPL: Profile = Profile {
        max_depth: 2,
        max_props: 2,
        max_literals: 3,
        nesting: Nesting::Ppl,
    };
    pub const MODAL: Profile = Profile {
        max_depth: 2,
        max_props: 2,
        max_literals: 3,
        nesting: Nesting::Modal,
    };
}

impl FromStr for Profile {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "pl" => Ok(Profile::PL),
            "ppl" => Ok(Profile::PPL),
            "modal" => Ok(Profile::MODAL),
            other => Err(format!("unknown profile {other:?}; expected pl, ppl or modal")),
        }
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.nesting {
            Nesting::Pl => "pl",
            Nesting::Ppl => "ppl",
            Nesting::Modal => "modal",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Generated {
    Prob(Formula),
    Modal(ModalFormula),
}

const PROPS: [&str; 4] = ["p", "q", "r", "s"];

struct Gen {
    rng: ChaCha8Rng,
    profile: Profile,
}

impl Gen {
    fn prop(&mut self) -> String {
        PROPS[self.rng.gen_range(0..self.profile.max_props.clamp(1, PROPS.len()))].to_string()
    }

    fn bound(&mut self) -> Rat {
        let den = self.rng.gen_range(1..=8i64);
        rat(self.rng.gen_range(0..=den), den)
    }

    /// Splits `leaves` leaves into a binary tree with random connectives.
    fn combine(&mut self, leaves: usize, leaf: &mut dyn FnMut(&mut Self) -> Formula) -> Formula {
        let f = if leaves <= 1 {
            leaf(self)
        } else {
            let left = self.rng.gen_range(1..leaves);
            let a = self.combine(left, leaf);
            let b = self.combine(leaves - left, leaf);
            match self.rng.gen_range(0..3) {
                0 => Formula::and(a, b),
                1 => Formula::or(a, b),
                _ => Formula::implies(a, b),
            }
        };
        if self.rng.gen_bool(0.3) {
            Formula::not(f)
        } else {
            f
        }
    }

    fn base(&mut self, depth: usize) -> Formula {
        if depth == 0 || self.rng.gen_bool(0.35) {
            return Formula::atom(self.prop());
        }
        match self.rng.gen_range(0..3) {
            0 => Formula::not(self.base(depth - 1)),
            1 => Formula::and(self.base(depth - 1), self.base(depth - 1)),
            _ => Formula::or(self.base(depth - 1), self.base(depth - 1)),
        }
    }

    /// One of `P≥s B`, `P>s B`, `P≤s B`, `P<s B` in primitive form.
    fn literal(&mut self, body: Formula) -> Formula {
        let s = self.bound();
        match self.rng.gen_range(0..4) {
            0 => Formula::prob(s, body),
            1 => Formula::not(Formula::prob(s, body)),
            2 => Formula::prob(Rat::one() - s, Formula::not(body)),
            _ => Formula::not(Formula::prob(Rat::one() - s, Formula::not(body))),
        }
    }

    fn pl(&mut self) -> Formula {
        let leaves = self.rng.gen_range(1..=self.profile.max_literals.max(1));
        let depth = self.profile.max_depth;
        self.combine(leaves, &mut |g: &mut Gen| {
            let body = g.base(depth);
            g.literal(body)
        })
    }

    /// A formula with at most `budget` probability operators and nesting
    /// depth at most `depth`.
    fn ppl(&mut self, depth: usize, budget: usize) -> Formula {
        if budget == 0 || depth == 0 {
            return self.base(1);
        }
        match self.rng.gen_range(0..4) {
            0 if budget >= 2 => {
                let left = self.rng.gen_range(1..budget);
                let a = self.ppl(depth, left);
                let b = self.ppl(depth, budget - left);
                if self.rng.gen_bool(0.5) {
                    Formula::and(a, b)
                } else {
                    Formula::or(a, b)
                }
            }
            1 => {
                let a = self.base(1);
                let b = self.ppl(depth, budget);
                Formula::and(a, b)
            }
            _ => {
                let body = self.ppl(depth - 1, budget - 1);
                self.literal(body)
            }
        }
    }

    fn modal(&mut self, depth: usize, budget: usize) -> ModalFormula {
        let f = if budget == 0 || depth == 0 || self.rng.gen_bool(0.2) {
            ModalFormula::atom(self.prop())
        } else {
            match self.rng.gen_range(0..4) {
                0 if budget >= 2 => {
                    let left = self.rng.gen_range(1..budget);
                    let a = self.modal(depth, left);
                    let b = self.modal(depth, budget - left);
                    if self.rng.gen_bool(0.5) {
                        ModalFormula::and(a, b)
                    } else {
                        ModalFormula::or(a, b)
                    }
                }
                1 => ModalFormula::boxed(self.modal(depth - 1, budget - 1)),
                _ => ModalFormula::diamond(self.modal(depth - 1, budget - 1)),
            }
        };
        if self.rng.gen_bool(0.25) {
            ModalFormula::not(f)
        } else {
            f
        }
    }
}

/// Same `(profile, seed)`, same formula.
pub fn random_formula(profile: &Profile, seed: u64) -> Generated {
    let mut g = Gen {
        rng: ChaCha8Rng::seed_from_u64(seed),
        profile: *profile,
    };
    match profile.nesting {
        Nesting::Pl => Generated::Prob(g.pl()),
        Nesting::Ppl => Generated::Prob(g.ppl(profile.max_depth, profile.max_literals)),
        Nesting::Modal => Generated::Modal(g.modal(profile.max_depth, profile.max_literals)),
    }
}

fn small_rat(rng: &mut ChaCha8Rng, lo: i64, hi: i64) -> Rat {
    let den = rng.gen_range(1..=4i64);
    rat(rng.gen_range(lo * den..=hi * den), den)
}

const RELATIONS: [Relation; 5] = [Relation::Eq, Relation::Le, Relation::Lt, Relation::Ge, Relation::Gt];

fn random_rows(rng: &mut ChaCha8Rng, n: usize, max_rows: usize) -> Vec<(Vec<(usize, Rat)>, Relation)> {
    (0..rng.gen_range(1..=max_rows.max(1)))
        .map(|_| {
            let mut terms = Vec::new();
            for v in 0..n {
                if rng.gen_bool(0.7) {
                    terms.push((v, Rat::from_integer(rng.gen_range(-3i64..=3).into())));
                }
            }
            (terms, RELATIONS[rng.gen_range(0..RELATIONS.len())])
        })
        .collect()
}

/// Up to `max_vars` variables and `max_rows` rows of every relation, with
/// small integer coefficients and rational right-hand sides.
pub fn random_system(seed: u64, max_vars: usize, max_rows: usize) -> LinSystem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=max_vars.max(1));
    let mut s = LinSystem::with_vars(n);
    for (terms, rel) in random_rows(&mut rng, n, max_rows) {
        let rhs = small_rat(&mut rng, -4, 6);
        s.push(LinConstraint::new(terms, rel, rhs));
    }
    s
}

/// Like [`random_system`], but every row is satisfied by a hidden
/// non-negative point, so the system is feasible under non-negativity.
pub fn random_feasible_system(seed: u64, max_vars: usize, max_rows: usize) -> LinSystem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=max_vars.max(1));
    let point: Vec<Rat> = (0..n)
        .map(|_| if rng.gen_bool(0.3) { Rat::zero() } else { small_rat(&mut rng, 0, 3) })
        .collect();
    let mut s = LinSystem::with_vars(n);
    for (terms, rel) in random_rows(&mut rng, n, max_rows) {
        let row = LinConstraint::new(terms, Relation::Eq, Rat::zero());
        let at = row.lhs_value(&point);
        let slack = match rel {
            Relation::Eq => Rat::zero(),
            Relation::Le | Relation::Ge => small_rat(&mut rng, 0, 2),
            Relation::Lt | Relation::Gt => small_rat(&mut rng, 0, 2) + rat(1, 4),
        };
        let rhs = match rel {
            Relation::Eq => at,
            Relation::Le | Relation::Lt => at + slack,
            Relation::Ge | Relation::Gt => at - slack,
        };
        s.push(LinConstraint::new(row.coeffs().clone(), rel, rhs));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::Fragment;

    fn prob(profile: &Profile, seed: u64) -> Formula {
        match random_formula(profile, seed) {
            Generated::Prob(f) => f,
            Generated::Modal(_) => panic!("expected a probabilistic formula"),
        }
    }

    #[test]
    fn deterministic() {
        assert_eq!(random_formula(&Profile::PL, 0), random_formula(&Profile::PL, 0));
        let distinct: std::collections::HashSet<_> =
            (0..20).map(|s| prob(&Profile::PL, s)).collect();
        assert!(distinct.len() > 10);
    }

    #[test]
    fn bounds_respected() {
        for seed in 0..300 {
            let f = prob(&Profile::PL, seed);
            assert_ne!(f.fragment(), Fragment::Ppl, "{f}");
            assert!(f.propositions().len() <= 3);
            let f = prob(&Profile::PPL, seed);
            assert!(f.prob_depth() <= 2, "{f}");
            assert!(f.propositions().len() <= 2);
            assert!(f.check_bounds().is_ok());
            let Generated::Modal(m) = random_formula(&Profile::MODAL, seed) else {
                panic!("expected a modal formula");
            };
            assert!(m.modal_depth() <= 2);
            assert!(m.propositions().len() <= 2);
        }
    }

    #[test]
    fn systems() {
        use crate::exactlp::feasible;
        assert_eq!(random_system(3, 6, 6), random_system(3, 6, 6));
        for seed in 0..200 {
            let s = random_feasible_system(seed, 6, 6);
            assert!(s.num_vars() <= 6 && s.constraints().len() <= 6);
            assert!(feasible(&s, true).unwrap().is_feasible(), "{s}");
        }
    }

    #[test]
    fn profile_names() {
        assert_eq!("ppl".parse::<Profile>(), Ok(Profile::PPL));
        assert!("xyz".parse::<Profile>().is_err());
        assert_eq!(Profile::MODAL.to_string(), "modal");
    }
}
