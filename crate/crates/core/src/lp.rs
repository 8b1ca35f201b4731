//! Exact rational linear programming.
//!
//! A dense-tableau two-phase simplex over [`Money`] with Bland's rule, so it
//! terminates on degenerate problems and every verdict is exact. Sized for the
//! problems this crate produces: a handful of rows and up to a few tens of
//! thousands of columns.

use crate::money::Money;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug)]
pub struct Constraint {
    pub coefficients: Vec<Money>,
    pub relation: Relation,
    pub rhs: Money,
}

/// `maximize c·x subject to the constraints, x >= 0`.
#[derive(Clone, Debug)]
pub struct LinearProgram {
    objective: Vec<Money>,
    constraints: Vec<Constraint>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LpSolution {
    pub x: Vec<Money>,
    pub objective: Money,
    /// One multiplier per constraint, in input order. For a maximization,
    /// `Le` rows have non-negative duals and `Ge` rows non-positive ones.
    pub duals: Vec<Money>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal(LpSolution),
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn optimal(self) -> Option<LpSolution> {
        match self {
            LpOutcome::Optimal(s) => Some(s),
            _ => None,
        }
    }
}

impl LinearProgram {
    pub fn maximize(objective: Vec<Money>) -> Self {
        LinearProgram {
            objective,
            constraints: Vec::new(),
        }
    }

    pub fn n_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add(&mut self, coefficients: Vec<Money>, relation: Relation, rhs: Money) -> &mut Self {
        assert_eq!(
            coefficients.len(),
            self.objective.len(),
            "constraint width must match the number of variables"
        );
        self.constraints.push(Constraint {
            coefficients,
            relation,
            rhs,
        });
        self
    }

    pub fn solve(&self) -> LpOutcome {
        Tableau::build(self).run(&self.objective)
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum ColumnKind {
    Structural,
    Slack,
    Artificial,
}

struct Tableau {
    n_structural: usize,
    kinds: Vec<ColumnKind>,
    // m rows of width ncols + 1; the last entry is the right-hand side.
    rows: Vec<Vec<Money>>,
    basis: Vec<usize>,
    // Column holding the initial identity entry of each row, and whether the
    // row was negated to make its right-hand side non-negative.
    identity: Vec<usize>,
    flipped: Vec<bool>,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Self {
        let n = lp.n_vars();
        let m = lp.constraints.len();
        let mut normalized = Vec::with_capacity(m);
        for con in &lp.constraints {
            if con.rhs.is_negative() {
                let relation = match con.relation {
                    Relation::Le => Relation::Ge,
                    Relation::Ge => Relation::Le,
                    Relation::Eq => Relation::Eq,
                };
                let coefficients = con.coefficients.iter().map(|a| -a).collect();
                normalized.push((coefficients, relation, -&con.rhs, true));
            } else {
                normalized.push((
                    con.coefficients.clone(),
                    con.relation,
                    con.rhs.clone(),
                    false,
                ));
            }
        }

        let mut kinds = vec![ColumnKind::Structural; n];
        let mut slack_col = vec![None; m];
        for (i, (_, rel, _, _)) in normalized.iter().enumerate() {
            if *rel != Relation::Eq {
                slack_col[i] = Some(kinds.len());
                kinds.push(ColumnKind::Slack);
            }
        }
        let mut art_col = vec![None; m];
        for (i, (_, rel, _, _)) in normalized.iter().enumerate() {
            if *rel != Relation::Le {
                art_col[i] = Some(kinds.len());
                kinds.push(ColumnKind::Artificial);
            }
        }

        let width = kinds.len() + 1;
        let mut rows = Vec::with_capacity(m);
        let mut basis = Vec::with_capacity(m);
        let mut identity = Vec::with_capacity(m);
        let mut flipped = Vec::with_capacity(m);
        for (i, (coefficients, rel, rhs, flip)) in normalized.into_iter().enumerate() {
            let mut row = vec![Money::zero(); width];
            row[..n].clone_from_slice(&coefficients);
            if let Some(j) = slack_col[i] {
                row[j] = Money::from_integer(if rel == Relation::Ge { -1 } else { 1 });
            }
            if let Some(j) = art_col[i] {
                row[j] = Money::from_integer(1);
            }
            row[width - 1] = rhs;
            let id = art_col[i]
                .or(slack_col[i])
                .expect("every row has an identity column");
            rows.push(row);
            basis.push(id);
            identity.push(id);
            flipped.push(flip);
        }

        Tableau {
            n_structural: n,
            kinds,
            rows,
            basis,
            identity,
            flipped,
        }
    }

    fn ncols(&self) -> usize {
        self.kinds.len()
    }

    /// Reduced-cost row `c_B B^-1 A - c` (plus the objective value in the last
    /// slot) for the given column costs.
    fn objective_row(&self, costs: &[Money]) -> Vec<Money> {
        let mut z: Vec<Money> = costs.iter().map(|c| -c).collect();
        z.push(Money::zero());
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            let cb = &costs[b];
            if cb.is_zero() {
                continue;
            }
            for (zj, aj) in z.iter_mut().zip(row) {
                if !aj.is_zero() {
                    *zj += cb * aj;
                }
            }
        }
        z
    }

    fn pivot(&mut self, z: &mut [Money], pr: usize, pc: usize) {
        let piv = self.rows[pr][pc].clone();
        let nonzero: Vec<usize> = (0..=self.ncols())
            .filter(|&j| !self.rows[pr][j].is_zero())
            .collect();
        for &j in &nonzero {
            let v = &self.rows[pr][j] / &piv;
            self.rows[pr][j] = v;
        }
        let pivot_row = self.rows[pr].clone();
        let eliminate = |row: &mut [Money]| {
            let f = row[pc].clone();
            if f.is_zero() {
                return;
            }
            for &j in &nonzero {
                row[j] -= &f * &pivot_row[j];
            }
        };
        for (r, row) in self.rows.iter_mut().enumerate() {
            if r != pr {
                eliminate(row);
            }
        }
        eliminate(z);
        self.basis[pr] = pc;
    }

    /// Primal simplex with Bland's rule. Returns false if unbounded.
    fn optimize(&mut self, z: &mut [Money], allow: impl Fn(ColumnKind) -> bool) -> bool {
        let rhs = self.ncols();
        loop {
            let Some(pc) = (0..self.ncols()).find(|&j| allow(self.kinds[j]) && z[j].is_negative())
            else {
                return true;
            };
            let mut best: Option<(usize, Money)> = None;
            for (r, row) in self.rows.iter().enumerate() {
                if !row[pc].is_positive() {
                    continue;
                }
                let ratio = &row[rhs] / &row[pc];
                let better = match &best {
                    None => true,
                    Some((br, bv)) => {
                        ratio < *bv || (ratio == *bv && self.basis[r] < self.basis[*br])
                    }
                };
                if better {
                    best = Some((r, ratio));
                }
            }
            let Some((pr, _)) = best else {
                return false;
            };
            self.pivot(z, pr, pc);
        }
    }

    fn run(mut self, objective: &[Money]) -> LpOutcome {
        let ncols = self.ncols();
        let rhs = ncols;

        if self.kinds.contains(&ColumnKind::Artificial) {
            let costs: Vec<Money> = self
                .kinds
                .iter()
                .map(|&k| Money::from_integer(if k == ColumnKind::Artificial { -1 } else { 0 }))
                .collect();
            let mut z = self.objective_row(&costs);
            self.optimize(&mut z, |_| true);
            if z[rhs].is_negative() {
                return LpOutcome::Infeasible;
            }
            // Drive zero-level artificials out of the basis where possible.
            for r in 0..self.rows.len() {
                if self.kinds[self.basis[r]] != ColumnKind::Artificial {
                    continue;
                }
                if let Some(pc) = (0..ncols).find(|&j| {
                    self.kinds[j] != ColumnKind::Artificial && !self.rows[r][j].is_zero()
                }) {
                    self.pivot(&mut z, r, pc);
                }
            }
        }

        let mut costs = vec![Money::zero(); ncols];
        costs[..self.n_structural].clone_from_slice(objective);
        let mut z = self.objective_row(&costs);
        if !self.optimize(&mut z, |k| k != ColumnKind::Artificial) {
            return LpOutcome::Unbounded;
        }

        let mut x = vec![Money::zero(); self.n_structural];
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            if b < self.n_structural {
                x[b] = row[rhs].clone();
            }
        }
        let duals = self
            .identity
            .iter()
            .zip(&self.flipped)
            .map(|(&j, &flip)| if flip { -&z[j] } else { z[j].clone() })
            .collect();
        LpOutcome::Optimal(LpSolution {
            x,
            objective: z[rhs].clone(),
            duals,
        })
    }
}
