//! Dense two-phase simplex over exact rationals with Bland's rule.

use crate::rat::Rat;
use num_traits::{One, Signed, Zero};

pub(super) enum RowRel {
    Eq,
    Le,
    Ge,
}

pub(super) struct Row {
    pub coeffs: Vec<Rat>,
    pub rel: RowRel,
    pub rhs: Rat,
}

pub(super) enum Outcome {
    Optimal,
    Unbounded,
}

pub(super) struct Tableau {
    a: Vec<Vec<Rat>>,
    b: Vec<Rat>,
    basis: Vec<usize>,
    /// Structural columns come first, then slacks, then artificials.
    structural: usize,
    first_artificial: usize,
    ncols: usize,
}

impl Tableau {
    /// Builds the phase-1 tableau for `rows` over `structural` non-negative
    /// columns.
    pub fn new(structural: usize, rows: Vec<Row>) -> Self {
        let mut rows = rows;
        for row in rows.iter_mut() {
            debug_assert_eq!(row.coeffs.len(), structural);
            if row.rhs.is_negative() {
                for c in row.coeffs.iter_mut() {
                    *c = -c.clone();
                }
                row.rhs = -row.rhs.clone();
                row.rel = match row.rel {
                    RowRel::Le => RowRel::Ge,
                    RowRel::Ge => RowRel::Le,
                    RowRel::Eq => RowRel::Eq,
                };
            }
        }
        let slacks = rows
            .iter()
            .filter(|r| !matches!(r.rel, RowRel::Eq))
            .count();
        let artificials = rows
            .iter()
            .filter(|r| !matches!(r.rel, RowRel::Le))
            .count();
        let first_artificial = structural + slacks;
        let ncols = first_artificial + artificials;
        let mut a = Vec::with_capacity(rows.len());
        let mut b = Vec::with_capacity(rows.len());
        let mut basis = Vec::with_capacity(rows.len());
        let (mut next_slack, mut next_art) = (structural, first_artificial);
        for row in rows {
            let mut line = row.coeffs;
            line.resize(ncols, Rat::zero());
            match row.rel {
                RowRel::Le => {
                    line[next_slack] = Rat::one();
                    basis.push(next_slack);
                    next_slack += 1;
                }
                RowRel::Ge => {
                    line[next_slack] = -Rat::one();
                    next_slack += 1;
                    line[next_art] = Rat::one();
                    basis.push(next_art);
                    next_art += 1;
                }
                RowRel::Eq => {
                    line[next_art] = Rat::one();
                    basis.push(next_art);
                    next_art += 1;
                }
            }
            a.push(line);
            b.push(row.rhs);
        }
        Self {
            a,
            b,
            basis,
            structural,
            first_artificial,
            ncols,
        }
    }

    fn is_artificial(&self, col: usize) -> bool {
        col >= self.first_artificial
    }

    fn pivot(&mut self, row: usize, col: usize) {
        log::trace!(
            "pivot: column {col} enters, column {} leaves (row {row})",
            self.basis[row]
        );
        let inv = Rat::one() / &self.a[row][col];
        for v in self.a[row].iter_mut() {
            *v *= &inv;
        }
        self.b[row] *= &inv;
        let pivot_row = self.a[row].clone();
        let pivot_rhs = self.b[row].clone();
        for i in 0..self.a.len() {
            if i == row || self.a[i][col].is_zero() {
                continue;
            }
            let factor = self.a[i][col].clone();
            for (v, p) in self.a[i].iter_mut().zip(pivot_row.iter()) {
                if !p.is_zero() {
                    *v -= &factor * p;
                }
            }
            self.b[i] -= &factor * &pivot_rhs;
        }
        self.basis[row] = col;
    }

    /// Maximizes `cost · x` over columns for which `allowed` holds.
    fn maximize(&mut self, cost: &[Rat], allowed: &dyn Fn(usize) -> bool) -> Outcome {
        loop {
            // Bland: lowest-index improving column enters.
            let entering = (0..self.ncols).find(|&j| {
                allowed(j) && !self.basis.contains(&j) && self.reduced_cost(cost, j).is_positive()
            });
            let Some(col) = entering else {
                return Outcome::Optimal;
            };
            let mut leave: Option<(usize, Rat)> = None;
            for i in 0..self.a.len() {
                if !self.a[i][col].is_positive() {
                    continue;
                }
                let ratio = &self.b[i] / &self.a[i][col];
                let better = match &leave {
                    None => true,
                    Some((r, best)) => {
                        ratio < *best || (ratio == *best && self.basis[i] < self.basis[*r])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            match leave {
                Some((row, _)) => self.pivot(row, col),
                None => return Outcome::Unbounded,
            }
        }
    }

    fn reduced_cost(&self, cost: &[Rat], col: usize) -> Rat {
        let mut d = cost[col].clone();
        for (i, &bv) in self.basis.iter().enumerate() {
            if !cost[bv].is_zero() && !self.a[i][col].is_zero() {
                d -= &cost[bv] * &self.a[i][col];
            }
        }
        d
    }

    /// Phase 1. Returns false when the rows have no non-negative solution.
    /// On success every artificial column has left the basis; redundant rows
    /// are dropped.
    pub fn phase_one(&mut self) -> bool {
        let cost: Vec<Rat> = (0..self.ncols)
            .map(|j| {
                if self.is_artificial(j) {
                    -Rat::one()
                } else {
                    Rat::zero()
                }
            })
            .collect();
        match self.maximize(&cost, &|_| true) {
            Outcome::Optimal => {}
            Outcome::Unbounded => unreachable!("phase-1 objective is bounded by zero"),
        }
        let infeasible = self
            .basis
            .iter()
            .zip(self.b.iter())
            .any(|(&bv, v)| self.is_artificial(bv) && !v.is_zero());
        if infeasible {
            log::trace!("phase 1: infeasible");
            return false;
        }
        let mut row = 0;
        while row < self.a.len() {
            if !self.is_artificial(self.basis[row]) {
                row += 1;
                continue;
            }
            let replacement =
                (0..self.first_artificial).find(|&j| !self.a[row][j].is_zero());
            match replacement {
                Some(col) => {
                    self.pivot(row, col);
                    row += 1;
                }
                None => {
                    log::trace!("phase 1: dropping redundant row {row}");
                    self.a.remove(row);
                    self.b.remove(row);
                    self.basis.remove(row);
                }
            }
        }
        true
    }

    /// Phase 2 over non-artificial columns. Must follow a successful
    /// [`Tableau::phase_one`].
    pub fn phase_two(&mut self, cost: &[Rat]) -> Outcome {
        let mut full = cost.to_vec();
        full.resize(self.ncols, Rat::zero());
        let first_artificial = self.first_artificial;
        self.maximize(&full, &|j| j < first_artificial)
    }

    /// Current values of the structural columns.
    pub fn structural_values(&self) -> Vec<Rat> {
        let mut x = vec![Rat::zero(); self.structural];
        for (&bv, v) in self.basis.iter().zip(self.b.iter()) {
            if bv < self.structural {
                x[bv] = v.clone();
            }
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{int, rat};

    #[test]
    fn phase_one_detects_infeasible() {
        // x + y = 1, x >= 2
        let rows = vec![
            Row { coeffs: vec![int(1), int(1)], rel: RowRel::Eq, rhs: int(1) },
            Row { coeffs: vec![int(1), int(0)], rel: RowRel::Ge, rhs: int(2) },
        ];
        let mut t = Tableau::new(2, rows);
        assert!(!t.phase_one());
    }

    #[test]
    fn maximizes_bounded_objective() {
        // x + y <= 1, x <= 1/3; maximize x + 2y
        let rows = vec![
            Row { coeffs: vec![int(1), int(1)], rel: RowRel::Le, rhs: int(1) },
            Row { coeffs: vec![int(1), int(0)], rel: RowRel::Le, rhs: rat(1, 3) },
        ];
        let mut t = Tableau::new(2, rows);
        assert!(t.phase_one());
        assert!(matches!(t.phase_two(&[int(1), int(2)]), Outcome::Optimal));
        assert_eq!(t.structural_values(), vec![int(0), int(1)]);
    }

    #[test]
    fn redundant_rows_are_dropped() {
        let rows = vec![
            Row { coeffs: vec![int(1), int(1)], rel: RowRel::Eq, rhs: int(1) },
            Row { coeffs: vec![int(2), int(2)], rel: RowRel::Eq, rhs: int(2) },
        ];
        let mut t = Tableau::new(2, rows);
        assert!(t.phase_one());
        let x = t.structural_values();
        assert_eq!(&x[0] + &x[1], int(1));
    }
}
