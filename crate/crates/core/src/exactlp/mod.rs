//! Exact linear arithmetic over rationals.
//!
//! [`feasible`] decides systems that mix `=`, `≤`, `<`, `≥`, `>`. Strict rows
//! are rewritten with a shared margin variable `δ` (`Σcx < b` becomes
//! `Σcx + δ ≤ b`, `Σcx > b` becomes `Σcx − δ ≥ b`, with `0 ≤ δ ≤ 1`) and the
//! solver maximizes `δ`; the system is feasible iff the optimum is positive.
//! Pivoting follows Bland's rule, so identical systems always produce
//! identical solutions.
//!
//! [`reduce_support`] turns any non-negative solution into one with at most
//! as many positive entries as the system has constraints, and
//! [`check_size_bound`] tests entries against `2·(r·l + r·⌈log₂ r⌉ + 1)`
//! bits.

mod simplex;

use crate::rat::{bit_length, ceil_log2, lcm_of_denominators, rat_size, to_compact_string, Rat};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use simplex::{Outcome, Row, RowRel, Tableau};
use std::collections::BTreeMap;
use std::fmt;

pub type VarId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    Eq,
    Le,
    Lt,
    Ge,
    Gt,
}

impl Relation {
    pub fn is_strict(self) -> bool {
        matches!(self, Relation::Lt | Relation::Gt)
    }

    pub fn holds(self, lhs: &Rat, rhs: &Rat) -> bool {
        match self {
            Relation::Eq => lhs == rhs,
            Relation::Le => lhs <= rhs,
            Relation::Lt => lhs < rhs,
            Relation::Ge => lhs >= rhs,
            Relation::Gt => lhs > rhs,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Eq => "=",
            Relation::Le => "<=",
            Relation::Lt => "<",
            Relation::Ge => ">=",
            Relation::Gt => ">",
        }
    }
}

/// `Σ coeffs[v]·v  relation  rhs`. Zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinConstraint {
    coeffs: BTreeMap<VarId, Rat>,
    pub relation: Relation,
    pub rhs: Rat,
}

impl LinConstraint {
    /// Repeated variables are summed.
    pub fn new(terms: impl IntoIterator<Item = (VarId, Rat)>, relation: Relation, rhs: Rat) -> Self {
        let mut coeffs: BTreeMap<VarId, Rat> = BTreeMap::new();
        for (v, c) in terms {
            *coeffs.entry(v).or_insert_with(Rat::zero) += c;
        }
        coeffs.retain(|_, c| !c.is_zero());
        Self {
            coeffs,
            relation,
            rhs,
        }
    }

    pub fn coeffs(&self) -> &BTreeMap<VarId, Rat> {
        &self.coeffs
    }

    pub fn coeff(&self, v: VarId) -> Rat {
        self.coeffs.get(&v).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn lhs_value(&self, values: &[Rat]) -> Rat {
        self.coeffs
            .iter()
            .map(|(&v, c)| c * &values[v])
            .fold(Rat::zero(), |acc, t| acc + t)
    }

    pub fn is_satisfied_by(&self, values: &[Rat]) -> bool {
        self.relation.holds(&self.lhs_value(values), &self.rhs)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LinSystem {
    names: Vec<String>,
    constraints: Vec<LinConstraint>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LpError {
    #[error("constraint {constraint} references undeclared variable {var}")]
    UndeclaredVariable { constraint: usize, var: VarId },
    #[error("solution has {got} entries, system declares {expected} variables")]
    WrongArity { expected: usize, got: usize },
    #[error("solution entry for `{0}` is negative")]
    Negative(String),
    #[error("solution violates constraint {0}")]
    Violated(usize),
}

impl LinSystem {
    pub fn new(names: Vec<String>) -> Self {
        Self {
            names,
            constraints: Vec::new(),
        }
    }

    /// Variables named `x0`, `x1`, ...
    pub fn with_vars(n: usize) -> Self {
        Self::new((0..n).map(|i| format!("x{i}")).collect())
    }

    pub fn push(&mut self, constraint: LinConstraint) {
        self.constraints.push(constraint);
    }

    pub fn num_vars(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn constraints(&self) -> &[LinConstraint] {
        &self.constraints
    }

    pub fn has_strict(&self) -> bool {
        self.constraints.iter().any(|c| c.relation.is_strict())
    }

    pub fn validate(&self) -> Result<(), LpError> {
        for (i, c) in self.constraints.iter().enumerate() {
            if let Some(&var) = c.coeffs.keys().find(|&&v| v >= self.names.len()) {
                return Err(LpError::UndeclaredVariable { constraint: i, var });
            }
        }
        Ok(())
    }

    pub fn is_satisfied_by(&self, values: &[Rat]) -> bool {
        values.len() == self.num_vars() && self.constraints.iter().all(|c| c.is_satisfied_by(values))
    }

    /// The same system with an explicit `v ≥ 0` row for every variable.
    pub fn with_nonneg_rows(&self) -> Self {
        let mut out = self.clone();
        for v in 0..self.num_vars() {
            out.push(LinConstraint::new([(v, Rat::one())], Relation::Ge, Rat::zero()));
        }
        out
    }
}

impl fmt::Display for LinSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.constraints {
            let terms: Vec<String> = c
                .coeffs
                .iter()
                .map(|(&v, k)| format!("{}*{}", to_compact_string(k), self.names[v]))
                .collect();
            let lhs = if terms.is_empty() {
                "0".to_string()
            } else {
                terms.join(" + ")
            };
            writeln!(f, "{lhs} {} {}", c.relation.symbol(), to_compact_string(&c.rhs))?;
        }
        Ok(())
    }
}

/// One value per declared variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpSolution {
    values: Vec<Rat>,
}

impl LpSolution {
    pub fn new(values: Vec<Rat>) -> Self {
        Self { values }
    }

    pub fn get(&self, v: VarId) -> &Rat {
        &self.values[v]
    }

    pub fn values(&self) -> &[Rat] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Rat> {
        self.values
    }

    pub fn positive_count(&self) -> usize {
        self.values.iter().filter(|v| v.is_positive()).count()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Feasibility {
    Feasible(LpSolution),
    Infeasible,
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible(_))
    }

    pub fn solution(self) -> Option<LpSolution> {
        match self {
            Feasibility::Feasible(s) => Some(s),
            Feasibility::Infeasible => None,
        }
    }
}

/// Decides `system`, with `x ≥ 0` for every variable when `nonneg` is set.
/// A returned assignment satisfies every constraint with its original
/// strictness.
pub fn feasible(system: &LinSystem, nonneg: bool) -> Result<Feasibility, LpError> {
    system.validate()?;
    let n = system.num_vars();
    // free variables are split into a positive and a negative part
    let width = if nonneg { n } else { 2 * n };
    let strict = system.has_strict();
    let delta = width;
    let structural = width + usize::from(strict);

    let mut rows: Vec<Row> = Vec::with_capacity(system.constraints.len() + 1);
    for c in &system.constraints {
        let mut coeffs = vec![Rat::zero(); structural];
        for (&v, k) in &c.coeffs {
            coeffs[v] = k.clone();
            if !nonneg {
                coeffs[n + v] = -k.clone();
            }
        }
        let rel = match c.relation {
            Relation::Eq => RowRel::Eq,
            Relation::Le => RowRel::Le,
            Relation::Ge => RowRel::Ge,
            Relation::Lt => {
                coeffs[delta] = Rat::one();
                RowRel::Le
            }
            Relation::Gt => {
                coeffs[delta] = -Rat::one();
                RowRel::Ge
            }
        };
        rows.push(Row {
            coeffs,
            rel,
            rhs: c.rhs.clone(),
        });
    }
    if strict {
        let mut cap = vec![Rat::zero(); structural];
        cap[delta] = Rat::one();
        rows.push(Row {
            coeffs: cap,
            rel: RowRel::Le,
            rhs: Rat::one(),
        });
    }

    let mut tableau = Tableau::new(structural, rows);
    if !tableau.phase_one() {
        return Ok(Feasibility::Infeasible);
    }
    if strict {
        let mut cost = vec![Rat::zero(); structural];
        cost[delta] = Rat::one();
        match tableau.phase_two(&cost) {
            Outcome::Optimal => {}
            Outcome::Unbounded => unreachable!("margin is capped at 1"),
        }
    }
    let raw = tableau.structural_values();
    if strict && !raw[delta].is_positive() {
        log::trace!("margin optimum is 0: strict rows cannot hold");
        return Ok(Feasibility::Infeasible);
    }
    let values: Vec<Rat> = if nonneg {
        raw[..n].to_vec()
    } else {
        (0..n).map(|v| &raw[v] - &raw[n + v]).collect()
    };
    debug_assert!(system.is_satisfied_by(&values));
    Ok(Feasibility::Feasible(LpSolution::new(values)))
}

/// Returns a non-negative solution of `system` with at most
/// `system.constraints().len()` positive entries.
///
/// Every constraint is frozen at the value its left-hand side takes under
/// `sol`, and `sol` is moved along null-space directions of the frozen
/// equalities restricted to its support until the support columns are
/// linearly independent. The left-hand sides never change, so strict rows
/// stay strict. A solution whose support is already independent comes back
/// unchanged.
pub fn reduce_support(system: &LinSystem, sol: &LpSolution) -> Result<LpSolution, LpError> {
    system.validate()?;
    let n = system.num_vars();
    if sol.values.len() != n {
        return Err(LpError::WrongArity {
            expected: n,
            got: sol.values.len(),
        });
    }
    if let Some(v) = sol.values.iter().position(|x| x.is_negative()) {
        return Err(LpError::Negative(system.names[v].clone()));
    }
    if let Some(i) = system
        .constraints
        .iter()
        .position(|c| !c.is_satisfied_by(&sol.values))
    {
        return Err(LpError::Violated(i));
    }

    let matrix: Vec<Vec<Rat>> = system
        .constraints
        .iter()
        .map(|c| (0..n).map(|v| c.coeff(v)).collect())
        .collect();
    let mut x = sol.values.clone();
    loop {
        let support: Vec<usize> = (0..n).filter(|&v| x[v].is_positive()).collect();
        let Some(mut dir) = null_vector(&matrix, &support) else {
            break;
        };
        if !dir.iter().any(|d| d.is_positive()) {
            for d in dir.iter_mut() {
                *d = -d.clone();
            }
        }
        let step = support
            .iter()
            .zip(dir.iter())
            .filter(|(_, d)| d.is_positive())
            .map(|(&v, d)| &x[v] / d)
            .min()
            .expect("direction has a positive entry");
        for (&v, d) in support.iter().zip(dir.iter()) {
            x[v] -= &step * d;
        }
    }
    debug_assert!(system.is_satisfied_by(&x));
    Ok(LpSolution::new(x))
}

/// Non-negative solution with an inclusion-minimal support: variables are
/// pinned to 0 one at a time, in index order, whenever the rest of the
/// system stays feasible. The result is then passed through
/// [`reduce_support`], so it also satisfies that bound.
pub fn sparse_feasible(system: &LinSystem) -> Result<Feasibility, LpError> {
    let Some(mut sol) = feasible(system, true)?.solution() else {
        return Ok(Feasibility::Infeasible);
    };
    let n = system.num_vars();
    for v in 0..n {
        if sol.values[v].is_zero() {
            continue;
        }
        let mut pinned = system.clone();
        for u in (0..n).filter(|&u| u == v || sol.values[u].is_zero()) {
            pinned.push(LinConstraint::new([(u, Rat::one())], Relation::Eq, Rat::zero()));
        }
        if let Some(better) = feasible(&pinned, true)?.solution() {
            sol = better;
        }
    }
    Ok(Feasibility::Feasible(reduce_support(system, &sol)?))
}

/// A non-zero vector `d` over `columns` with `matrix[.][columns]·d = 0`, or
/// `None` when those columns are linearly independent.
fn null_vector(matrix: &[Vec<Rat>], columns: &[usize]) -> Option<Vec<Rat>> {
    let k = columns.len();
    if k == 0 {
        return None;
    }
    let mut m: Vec<Vec<Rat>> = matrix
        .iter()
        .map(|row| columns.iter().map(|&c| row[c].clone()).collect())
        .collect();
    let mut pivots: Vec<usize> = Vec::new();
    let mut r = 0;
    for col in 0..k {
        let Some(p) = (r..m.len()).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = Rat::one() / &m[r][col];
        for v in m[r].iter_mut() {
            *v *= &inv;
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != r && !row[col].is_zero() {
                let f = row[col].clone();
                for (v, pv) in row.iter_mut().zip(pivot_row.iter()) {
                    *v -= &f * pv;
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    let free = (0..k).find(|c| !pivots.contains(c))?;
    let mut d = vec![Rat::zero(); k];
    d[free] = Rat::one();
    for (row, &pc) in pivots.iter().enumerate() {
        d[pc] = -m[row][free].clone();
    }
    Some(d)
}

/// `2·(r·l + r·⌈log₂ r⌉ + 1)`
pub fn size_bound(r: u64, l: u64) -> u64 {
    2 * (r * l + r * ceil_log2(r) + 1)
}

/// Whether every entry of `sol` has size at most [`size_bound`]`(r, l)`.
pub fn check_size_bound(sol: &LpSolution, r: u64, l: u64) -> bool {
    assert!(r >= 1 && l >= 1, "size bound needs r >= 1 and l >= 1");
    let bound = size_bound(r, l);
    sol.values.iter().all(|v| rat_size(v) <= bound)
}

/// Largest bit length of a coefficient or right-hand side once every
/// constraint is multiplied by the lcm of its denominators. At least 1.
pub fn scaled_coefficient_size(system: &LinSystem) -> u64 {
    system
        .constraints
        .iter()
        .flat_map(|c| {
            let scale = Rat::from_integer(lcm_of_denominators(
                c.coeffs.values().chain(std::iter::once(&c.rhs)),
            ));
            c.coeffs
                .values()
                .chain(std::iter::once(&c.rhs))
                .map(|k| {
                    let scaled: BigInt = (k * &scale).to_integer();
                    bit_length(&scaled)
                })
                .collect::<Vec<_>>()
        })
        .max()
        .unwrap_or(1)
        .max(1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{int, rat};

    fn c(terms: &[(VarId, Rat)], rel: Relation, rhs: Rat) -> LinConstraint {
        LinConstraint::new(terms.iter().cloned(), rel, rhs)
    }

    #[test]
    fn single_equality() {
        let mut s = LinSystem::with_vars(1);
        s.push(c(&[(0, int(1))], Relation::Eq, int(1)));
        s.push(c(&[(0, int(1))], Relation::Ge, int(0)));
        let sol = feasible(&s, false).unwrap().solution().unwrap();
        assert_eq!(sol.values(), &[int(1)]);
    }

    #[test]
    fn over_committed_mass_is_infeasible() {
        let mut s = LinSystem::with_vars(2);
        s.push(c(&[(0, int(1)), (1, int(1))], Relation::Eq, int(1)));
        s.push(c(&[(0, int(1))], Relation::Ge, rat(3, 5)));
        s.push(c(&[(1, int(1))], Relation::Ge, rat(3, 5)));
        assert_eq!(feasible(&s, true).unwrap(), Feasibility::Infeasible);
    }

    #[test]
    fn strict_interior_point() {
        let mut s = LinSystem::with_vars(2);
        s.push(c(&[(0, int(1)), (1, int(1))], Relation::Eq, int(1)));
        s.push(c(&[(0, int(1))], Relation::Lt, int(1)));
        s.push(c(&[(1, int(1))], Relation::Lt, int(1)));
        s.push(c(&[(0, int(1))], Relation::Ge, int(0)));
        s.push(c(&[(1, int(1))], Relation::Ge, int(0)));
        let sol = feasible(&s, false).unwrap().solution().unwrap();
        assert!(s.is_satisfied_by(sol.values()));
        assert!(sol.get(0) < &int(1) && sol.get(1) < &int(1));
    }

    #[test]
    fn strictness_matters() {
        // x >= 0, x <= 0 is fine; x > 0, x <= 0 is not
        let mut s = LinSystem::with_vars(1);
        s.push(c(&[(0, int(1))], Relation::Le, int(0)));
        assert!(feasible(&s, true).unwrap().is_feasible());
        s.push(c(&[(0, int(1))], Relation::Gt, int(0)));
        assert!(!feasible(&s, true).unwrap().is_feasible());
    }

    #[test]
    fn empty_rows() {
        let mut s = LinSystem::with_vars(1);
        s.push(c(&[], Relation::Ge, rat(1, 2)));
        assert!(!feasible(&s, true).unwrap().is_feasible());
        let mut s = LinSystem::with_vars(1);
        s.push(c(&[], Relation::Lt, rat(1, 2)));
        assert!(feasible(&s, true).unwrap().is_feasible());
        let mut s = LinSystem::with_vars(1);
        s.push(c(&[], Relation::Lt, int(0)));
        assert!(!feasible(&s, true).unwrap().is_feasible());
    }

    #[test]
    fn free_variables_can_go_negative() {
        let mut s = LinSystem::with_vars(1);
        s.push(c(&[(0, int(1))], Relation::Le, int(-2)));
        assert!(!feasible(&s, true).unwrap().is_feasible());
        let sol = feasible(&s, false).unwrap().solution().unwrap();
        assert!(sol.get(0) <= &int(-2));
    }

    #[test]
    fn undeclared_variable() {
        let mut s = LinSystem::with_vars(1);
        s.push(c(&[(3, int(1))], Relation::Eq, int(1)));
        assert_eq!(
            feasible(&s, true),
            Err(LpError::UndeclaredVariable { constraint: 0, var: 3 })
        );
    }

    #[test]
    fn deterministic() {
        let mut s = LinSystem::with_vars(3);
        s.push(c(&[(0, int(1)), (1, int(1)), (2, int(1))], Relation::Eq, int(1)));
        s.push(c(&[(0, int(2)), (2, int(1))], Relation::Gt, rat(1, 3)));
        let a = feasible(&s, true).unwrap();
        let b = feasible(&s, true).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn reduce_uniform_to_vertex() {
        let mut s = LinSystem::with_vars(3);
        s.push(c(&[(0, int(1)), (1, int(1)), (2, int(1))], Relation::Eq, int(1)));
        let third = rat(1, 3);
        let sol = LpSolution::new(vec![third.clone(), third.clone(), third]);
        let reduced = reduce_support(&s, &sol).unwrap();
        assert!(reduced.positive_count() <= 1);
        assert!(s.is_satisfied_by(reduced.values()));
    }

    #[test]
    fn reduce_keeps_small_support() {
        let mut s = LinSystem::with_vars(2);
        s.push(c(&[(0, int(1)), (1, int(1))], Relation::Eq, int(1)));
        s.push(c(&[(0, int(1))], Relation::Ge, rat(1, 2)));
        let sol = LpSolution::new(vec![rat(3, 4), rat(1, 4)]);
        let reduced = reduce_support(&s, &sol).unwrap();
        assert_eq!(reduced, sol);
    }

    #[test]
    fn reduce_rejects_non_solutions() {
        let mut s = LinSystem::with_vars(2);
        s.push(c(&[(0, int(1)), (1, int(1))], Relation::Eq, int(1)));
        let bad = LpSolution::new(vec![int(1), int(1)]);
        assert_eq!(reduce_support(&s, &bad), Err(LpError::Violated(0)));
        let neg = LpSolution::new(vec![int(2), int(-1)]);
        assert!(matches!(reduce_support(&s, &neg), Err(LpError::Negative(_))));
        let short = LpSolution::new(vec![int(1)]);
        assert!(matches!(reduce_support(&s, &short), Err(LpError::WrongArity { .. })));
    }

    #[test]
    fn reduce_preserves_strict_rows() {
        let mut s = LinSystem::with_vars(3);
        s.push(c(&[(0, int(1)), (1, int(1)), (2, int(1))], Relation::Eq, int(1)));
        s.push(c(&[(0, int(1)), (1, int(1))], Relation::Lt, rat(1, 2)));
        let sol = LpSolution::new(vec![rat(1, 8), rat(1, 8), rat(3, 4)]);
        let reduced = reduce_support(&s, &sol).unwrap();
        assert!(reduced.positive_count() <= 2);
        assert!(s.is_satisfied_by(reduced.values()));
    }

    #[test]
    fn size_bound_examples() {
        assert!(check_size_bound(&LpSolution::new(vec![rat(1, 2)]), 1, 1));
        assert_eq!(size_bound(1, 1), 4);
        assert!(check_size_bound(&LpSolution::new(vec![int(0)]), 1, 1));
        assert!(!check_size_bound(&LpSolution::new(vec![rat(5, 7)]), 1, 1));
    }

    #[test]
    fn scaled_sizes() {
        let mut s = LinSystem::with_vars(2);
        s.push(c(&[(0, int(1)), (1, int(1))], Relation::Eq, int(1)));
        assert_eq!(scaled_coefficient_size(&s), 1);
        // x0 >= 3/5 scales to 5·x0 >= 3
        s.push(c(&[(0, int(1))], Relation::Ge, rat(3, 5)));
        assert_eq!(scaled_coefficient_size(&s), 3);
        assert_eq!(scaled_coefficient_size(&LinSystem::with_vars(1)), 1);
    }
}
