//! Dense two-phase rational simplex with Bland's rule.

use num_traits::{One, Signed, Zero};

use crate::arith::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<Rational>, value: Rational },
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn is_feasible(&self) -> bool {
        !matches!(self, LpOutcome::Infeasible)
    }
}

/// `maximize c·x` subject to linear rows; variables are nonnegative unless
/// declared free.
#[derive(Clone, Debug)]
pub struct LinearProgram {
    free: Vec<bool>,
    objective: Vec<Rational>,
    rows: Vec<(Vec<Rational>, Relation, Rational)>,
}

impl LinearProgram {
    pub fn new(num_vars: usize) -> Self {
        Self { free: vec![false; num_vars], objective: vec![Rational::zero(); num_vars], rows: Vec::new() }
    }

    pub fn num_vars(&self) -> usize {
        self.free.len()
    }

    pub fn set_free(&mut self, var: usize) {
        self.free[var] = true;
    }

    pub fn set_objective(&mut self, c: Vec<Rational>) {
        assert_eq!(c.len(), self.num_vars());
        self.objective = c;
    }

    pub fn add_row(&mut self, coeffs: Vec<Rational>, rel: Relation, rhs: Rational) {
        assert_eq!(coeffs.len(), self.num_vars());
        self.rows.push((coeffs, rel, rhs));
    }

    pub fn solve(&self) -> LpOutcome {
        Tableau::build(self).run(self)
    }
}

struct Tableau {
    t: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    // column index of the positive and (for free variables) negative part
    pos: Vec<usize>,
    neg: Vec<Option<usize>>,
    first_artificial: usize,
    width: usize,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Tableau {
        let mut pos = Vec::with_capacity(lp.num_vars());
        let mut neg = Vec::with_capacity(lp.num_vars());
        let mut col = 0;
        for &f in &lp.free {
            pos.push(col);
            col += 1;
            if f {
                neg.push(Some(col));
                col += 1;
            } else {
                neg.push(None);
            }
        }
        let structural = col;
        let slacks = lp.rows.iter().filter(|r| r.1 != Relation::Eq).count();
        let m = lp.rows.len();
        let first_artificial = structural + slacks;
        let width = first_artificial + m;
        let mut t = vec![vec![Rational::zero(); width + 1]; m];
        let mut basis = vec![usize::MAX; m];
        let mut slack_col = structural;
        for (i, (coeffs, rel, rhs)) in lp.rows.iter().enumerate() {
            let row = &mut t[i];
            for (j, a) in coeffs.iter().enumerate() {
                row[pos[j]] = a.clone();
                if let Some(nj) = neg[j] {
                    row[nj] = -a;
                }
            }
            let mut slack = None;
            match rel {
                Relation::Le => {
                    row[slack_col] = Rational::one();
                    slack = Some(slack_col);
                    slack_col += 1;
                }
                Relation::Ge => {
                    row[slack_col] = -Rational::one();
                    slack = Some(slack_col);
                    slack_col += 1;
                }
                Relation::Eq => {}
            }
            row[width] = rhs.clone();
            if rhs.is_negative() {
                for x in row.iter_mut() {
                    *x = -&*x;
                }
            }
            match slack {
                Some(s) if row[s].is_one() => basis[i] = s,
                _ => {
                    row[first_artificial + i] = Rational::one();
                    basis[i] = first_artificial + i;
                }
            }
        }
        Tableau { t, basis, pos, neg, first_artificial, width }
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.t[r][c].clone();
        for x in self.t[r].iter_mut() {
            *x = &*x / &p;
        }
        let pivot_row = self.t[r].clone();
        for (i, row) in self.t.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        self.basis[r] = c;
    }

    /// Maximizes `cost` over columns `< limit`; `false` when unbounded.
    fn optimize(&mut self, cost: &[Rational], limit: usize) -> bool {
        loop {
            let mut entering = None;
            for j in 0..limit {
                if self.basis.contains(&j) {
                    continue;
                }
                let mut r = cost[j].clone();
                for (i, &b) in self.basis.iter().enumerate() {
                    if !cost[b].is_zero() && !self.t[i][j].is_zero() {
                        r -= &cost[b] * &self.t[i][j];
                    }
                }
                if r.is_positive() {
                    entering = Some(j);
                    break;
                }
            }
            let Some(c) = entering else { return true };
            let mut leave: Option<(usize, Rational)> = None;
            for i in 0..self.t.len() {
                let a = &self.t[i][c];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.t[i][self.width] / a;
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            match leave {
                None => return false,
                Some((r, _)) => self.pivot(r, c),
            }
        }
    }

    fn run(mut self, lp: &LinearProgram) -> LpOutcome {
        let has_artificial = self.basis.iter().any(|&b| b >= self.first_artificial);
        if has_artificial {
            let mut cost = vec![Rational::zero(); self.width];
            for c in cost.iter_mut().skip(self.first_artificial) {
                *c = -Rational::one();
            }
            self.optimize(&cost, self.width);
            let infeasible = self
                .basis
                .iter()
                .enumerate()
                .any(|(i, &b)| b >= self.first_artificial && !self.t[i][self.width].is_zero());
            if infeasible {
                return LpOutcome::Infeasible;
            }
            // drive degenerate artificials out, dropping redundant rows
            let mut i = 0;
            while i < self.t.len() {
                if self.basis[i] >= self.first_artificial {
                    match (0..self.first_artificial).find(|&j| !self.t[i][j].is_zero()) {
                        Some(j) => {
                            self.pivot(i, j);
                            i += 1;
                        }
                        None => {
                            self.t.remove(i);
                            self.basis.remove(i);
                        }
                    }
                } else {
                    i += 1;
                }
            }
        }
        let mut cost = vec![Rational::zero(); self.width];
        for (j, c) in lp.objective.iter().enumerate() {
            cost[self.pos[j]] = c.clone();
            if let Some(nj) = self.neg[j] {
                cost[nj] = -c;
            }
        }
        if !self.optimize(&cost, self.first_artificial) {
            return LpOutcome::Unbounded;
        }
        let mut values = vec![Rational::zero(); self.width];
        for (i, &b) in self.basis.iter().enumerate() {
            values[b] = self.t[i][self.width].clone();
        }
        let x: Vec<Rational> = (0..lp.num_vars())
            .map(|j| match self.neg[j] {
                Some(nj) => &values[self.pos[j]] - &values[nj],
                None => values[self.pos[j]].clone(),
            })
            .collect();
        let value = x.iter().zip(&lp.objective).map(|(a, b)| a * b).sum();
        LpOutcome::Optimal { x, value }
    }
}
