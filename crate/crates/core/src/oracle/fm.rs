//! Fourier–Motzkin elimination with strictness carried through every
//! combination. Variables are free; add explicit rows for bounds.

use super::OracleError;
use crate::exactlp::{LinSystem, Relation};
use crate::rat::Rat;
use num_traits::{Signed, Zero};
use std::collections::{BTreeMap, BTreeSet};

pub const MAX_FM_VARIABLES: usize = 12;
pub const MAX_FM_ROWS: usize = 50_000;

/// `Σ coeffs·x ≤ rhs`, or `<` when `strict`.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Ineq {
    coeffs: BTreeMap<usize, Rat>,
    rhs: Rat,
    strict: bool,
}

impl Ineq {
    fn negated(coeffs: &BTreeMap<usize, Rat>, rhs: &Rat, strict: bool) -> Self {
        Ineq {
            coeffs: coeffs.iter().map(|(v, c)| (*v, -c)).collect(),
            rhs: -rhs,
            strict,
        }
    }

    /// Divides by `|coeff(v)|` so that `v` has coefficient ±1, which makes
    /// duplicate rows identical.
    fn normalized_on(mut self, v: usize) -> Self {
        let scale = self.coeffs[&v].abs();
        for c in self.coeffs.values_mut() {
            *c /= &scale;
        }
        self.rhs /= &scale;
        self
    }
}

fn substitute(coeffs: &mut BTreeMap<usize, Rat>, rhs: &mut Rat, v: usize, expr: &BTreeMap<usize, Rat>, constant: &Rat) {
    // x_v = constant + Σ expr·x
    let Some(a) = coeffs.remove(&v) else {
        return;
    };
    *rhs -= &a * constant;
    for (u, e) in expr {
        let entry = coeffs.entry(*u).or_insert_with(Rat::zero);
        *entry += &a * e;
        if entry.is_zero() {
            coeffs.remove(u);
        }
    }
}

pub fn fm_feasible(system: &LinSystem) -> Result<bool, OracleError> {
    if system.num_vars() > MAX_FM_VARIABLES {
        return Err(OracleError::TooLarge(format!(
            "{} variables, at most {MAX_FM_VARIABLES}",
            system.num_vars()
        )));
    }
    let mut eqs: Vec<(BTreeMap<usize, Rat>, Rat)> = Vec::new();
    let mut ineqs: Vec<Ineq> = Vec::new();
    for c in system.constraints() {
        let coeffs = c.coeffs().clone();
        let rhs = c.rhs.clone();
        match c.relation {
            Relation::Eq => eqs.push((coeffs, rhs)),
            Relation::Le => ineqs.push(Ineq { coeffs, rhs, strict: false }),
            Relation::Lt => ineqs.push(Ineq { coeffs, rhs, strict: true }),
            Relation::Ge => ineqs.push(Ineq::negated(&coeffs, &rhs, false)),
            Relation::Gt => ineqs.push(Ineq::negated(&coeffs, &rhs, true)),
        }
    }

    // Equalities first: each one removes a variable outright.
    while let Some((coeffs, rhs)) = eqs.pop() {
        let Some((&v, a)) = coeffs.iter().next() else {
            if !rhs.is_zero() {
                return Ok(false);
            }
            continue;
        };
        let constant = &rhs / a;
        let expr: BTreeMap<usize, Rat> = coeffs
            .iter()
            .filter(|(u, _)| **u != v)
            .map(|(u, c)| (*u, -(c / a)))
            .collect();
        for (c, r) in eqs.iter_mut() {
            substitute(c, r, v, &expr, &constant);
        }
        for q in ineqs.iter_mut() {
            substitute(&mut q.coeffs, &mut q.rhs, v, &expr, &constant);
        }
    }

    let mut rows = Rows::default();
    for q in ineqs {
        if !rows.insert(q) {
            return Ok(false);
        }
    }
    let mut remaining: BTreeSet<usize> = (0..system.num_vars()).collect();
    while !rows.0.is_empty() {
        // Eliminate the variable producing the fewest combinations.
        let cost = |v: usize| {
            let (mut up, mut low) = (0usize, 0usize);
            for coeffs in rows.0.keys() {
                match coeffs.get(&v) {
                    Some(c) if c.is_positive() => up += 1,
                    Some(_) => low += 1,
                    None => {}
                }
            }
            up * low
        };
        let Some(&v) = remaining.iter().min_by_key(|&&v| cost(v)) else {
            break;
        };
        remaining.remove(&v);
        let (mut upper, mut lower, mut rest) = (Vec::new(), Vec::new(), Rows::default());
        for (coeffs, (rhs, strict)) in std::mem::take(&mut rows.0) {
            let q = Ineq { coeffs, rhs, strict };
            match q.coeffs.get(&v) {
                Some(c) if c.is_positive() => upper.push(q.normalized_on(v)),
                Some(_) => lower.push(q.normalized_on(v)),
                None => {
                    rest.insert(q);
                }
            }
        }
        // x ≤ U and −x ≤ L combine into 0 ≤ U + L.
        for u in &upper {
            for l in &lower {
                let mut coeffs = u.coeffs.clone();
                for (w, c) in &l.coeffs {
                    let entry = coeffs.entry(*w).or_insert_with(Rat::zero);
                    *entry += c;
                    if entry.is_zero() {
                        coeffs.remove(w);
                    }
                }
                let combined = Ineq {
                    coeffs,
                    rhs: &u.rhs + &l.rhs,
                    strict: u.strict || l.strict,
                };
                if !rest.insert(combined) {
                    return Ok(false);
                }
                if rest.0.len() > MAX_FM_ROWS {
                    return Err(OracleError::TooLarge(format!(
                        "more than {MAX_FM_ROWS} rows while eliminating"
                    )));
                }
            }
        }
        rows = rest;
    }
    Ok(true)
}

/// Rows keyed by their coefficient vector scaled so the first coefficient
/// is ±1; only the tightest right-hand side per key is kept.
#[derive(Default)]
struct Rows(BTreeMap<BTreeMap<usize, Rat>, (Rat, bool)>);

impl Rows {
    /// `false` when the row is a constant contradiction.
    fn insert(&mut self, q: Ineq) -> bool {
        let Some((_, first)) = q.coeffs.iter().next() else {
            return if q.strict {
                q.rhs.is_positive()
            } else {
                !q.rhs.is_negative()
            };
        };
        let scale = first.abs();
        let coeffs: BTreeMap<usize, Rat> = q.coeffs.iter().map(|(v, c)| (*v, c / &scale)).collect();
        let rhs = q.rhs / &scale;
        match self.0.get_mut(&coeffs) {
            Some((r, strict)) => {
                if rhs < *r || (rhs == *r && q.strict) {
                    *r = rhs;
                    *strict = q.strict;
                }
            }
            None => {
                self.0.insert(coeffs, (rhs, q.strict));
            }
        }
        true
    }
}
