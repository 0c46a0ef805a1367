//! Small dense two-phase simplex solver.
//!
//! Sized for the Chebyshev-center, facet-witness and recession-cone problems
//! that polytope metrics need: a few dozen constraints, a handful of
//! variables. All variables are free; they are split into positive and
//! negative parts internally. Pivoting follows Bland's rule, so the solver
//! cannot cycle on degenerate vertices.

const PIVOT_EPS: f64 = 1e-11;
const FEAS_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

/// `maximize objective · x` subject to the constraints, `x` free.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    num_vars: usize,
    objective: Vec<f64>,
    constraints: Vec<Constraint>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<f64>, value: f64 },
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn optimal(&self) -> Option<(&[f64], f64)> {
        match self {
            LpOutcome::Optimal { x, value } => Some((x, *value)),
            _ => None,
        }
    }
}

impl LinearProgram {
    pub fn maximize(objective: Vec<f64>) -> Self {
        Self {
            num_vars: objective.len(),
            objective,
            constraints: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn add(&mut self, coeffs: Vec<f64>, relation: Relation, rhs: f64) -> &mut Self {
        assert_eq!(coeffs.len(), self.num_vars, "constraint width");
        self.constraints.push(Constraint {
            coeffs,
            relation,
            rhs,
        });
        self
    }

    pub fn le(&mut self, coeffs: Vec<f64>, rhs: f64) -> &mut Self {
        self.add(coeffs, Relation::Le, rhs)
    }

    pub fn eq(&mut self, coeffs: Vec<f64>, rhs: f64) -> &mut Self {
        self.add(coeffs, Relation::Eq, rhs)
    }

    pub fn solve(&self) -> LpOutcome {
        Tableau::build(self).run(&self.objective)
    }
}

struct Tableau {
    /// rows × (cols + 1); last column is the right-hand side.
    rows: Vec<Vec<f64>>,
    basis: Vec<usize>,
    cols: usize,
    num_structural: usize,
    artificial_start: usize,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Self {
        let n = lp.num_vars;
        let structural = 2 * n;
        let m = lp.constraints.len();

        // Normalize every row to a non-negative right-hand side first.
        let normalized: Vec<(Vec<f64>, Relation, f64)> = lp
            .constraints
            .iter()
            .map(|c| {
                if c.rhs < 0.0 {
                    let flipped = match c.relation {
                        Relation::Le => Relation::Ge,
                        Relation::Ge => Relation::Le,
                        Relation::Eq => Relation::Eq,
                    };
                    (c.coeffs.iter().map(|a| -a).collect(), flipped, -c.rhs)
                } else {
                    (c.coeffs.clone(), c.relation, c.rhs)
                }
            })
            .collect();

        let num_slack = normalized
            .iter()
            .filter(|(_, r, _)| *r != Relation::Eq)
            .count();
        let num_artificial = normalized
            .iter()
            .filter(|(_, r, _)| *r != Relation::Le)
            .count();
        let artificial_start = structural + num_slack;
        let cols = artificial_start + num_artificial;

        let mut rows = Vec::with_capacity(m);
        let mut basis = Vec::with_capacity(m);
        let mut slack = structural;
        let mut artificial = artificial_start;
        for (coeffs, relation, rhs) in normalized {
            let mut row = vec![0.0; cols + 1];
            for (j, a) in coeffs.iter().enumerate() {
                row[j] = *a;
                row[n + j] = -*a;
            }
            row[cols] = rhs;
            match relation {
                Relation::Le => {
                    row[slack] = 1.0;
                    basis.push(slack);
                    slack += 1;
                }
                Relation::Ge => {
                    row[slack] = -1.0;
                    slack += 1;
                    row[artificial] = 1.0;
                    basis.push(artificial);
                    artificial += 1;
                }
                Relation::Eq => {
                    row[artificial] = 1.0;
                    basis.push(artificial);
                    artificial += 1;
                }
            }
            rows.push(row);
        }

        Self {
            rows,
            basis,
            cols,
            num_structural: n,
            artificial_start,
        }
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let width = self.cols + 1;
        let p = self.rows[r][c];
        for j in 0..width {
            self.rows[r][j] /= p;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c];
            if f != 0.0 {
                for j in 0..width {
                    row[j] -= f * pivot_row[j];
                }
            }
        }
        self.basis[r] = c;
    }

    /// Maximizes `cost · z` over the current basis using Bland's rule.
    /// Columns at or beyond `allowed` never enter. Returns `false` when
    /// the objective is unbounded.
    fn optimize(&mut self, cost: &[f64], allowed: usize) -> bool {
        loop {
            // reduced cost d_j = c_j - c_B · column_j
            let mut entering = None;
            for j in 0..allowed {
                if self.basis.contains(&j) {
                    continue;
                }
                let mut d = cost[j];
                for (i, row) in self.rows.iter().enumerate() {
                    d -= cost[self.basis[i]] * row[j];
                }
                if d > PIVOT_EPS {
                    entering = Some(j);
                    break;
                }
            }
            let Some(c) = entering else {
                return true;
            };

            let mut leaving: Option<(usize, f64)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                let a = row[c];
                if a > PIVOT_EPS {
                    let ratio = row[self.cols] / a;
                    leaving = match leaving {
                        None => Some((i, ratio)),
                        Some((li, lr)) => {
                            if ratio < lr - 1e-14
                                || ((ratio - lr).abs() <= 1e-14 && self.basis[i] < self.basis[li])
                            {
                                Some((i, ratio))
                            } else {
                                Some((li, lr))
                            }
                        }
                    };
                }
            }
            match leaving {
                None => return false,
                Some((r, _)) => self.pivot(r, c),
            }
        }
    }

    fn objective_value(&self, cost: &[f64]) -> f64 {
        self.rows
            .iter()
            .enumerate()
            .map(|(i, row)| cost[self.basis[i]] * row[self.cols])
            .sum()
    }

    fn run(mut self, objective: &[f64]) -> LpOutcome {
        let n = self.num_structural;

        if self.artificial_start < self.cols {
            let mut phase1 = vec![0.0; self.cols];
            for c in phase1.iter_mut().skip(self.artificial_start) {
                *c = -1.0;
            }
            self.optimize(&phase1, self.cols);
            if self.objective_value(&phase1) < -FEAS_EPS {
                return LpOutcome::Infeasible;
            }
            // Drive zero-level artificials out of the basis.
            let mut i = 0;
            while i < self.rows.len() {
                if self.basis[i] >= self.artificial_start {
                    let replacement = (0..self.artificial_start)
                        .find(|&j| self.rows[i][j].abs() > 1e-9 && !self.basis.contains(&j));
                    match replacement {
                        Some(j) => {
                            self.pivot(i, j);
                            i += 1;
                        }
                        None => {
                            // redundant equality row
                            self.rows.remove(i);
                            self.basis.remove(i);
                        }
                    }
                } else {
                    i += 1;
                }
            }
        }

        let mut cost = vec![0.0; self.cols];
        for j in 0..n {
            cost[j] = objective[j];
            cost[n + j] = -objective[j];
        }
        if !self.optimize(&cost, self.artificial_start) {
            return LpOutcome::Unbounded;
        }

        let mut z = vec![0.0; self.cols];
        for (i, &b) in self.basis.iter().enumerate() {
            z[b] = self.rows[i][self.cols];
        }
        let x: Vec<f64> = (0..n).map(|j| z[j] - z[n + j]).collect();
        let value = objective.iter().zip(&x).map(|(c, v)| c * v).sum();
        LpOutcome::Optimal { x, value }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn textbook_maximum() {
        // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 -> (2, 6), 36
        let mut lp = LinearProgram::maximize(vec![3.0, 5.0]);
        lp.le(vec![1.0, 0.0], 4.0)
            .le(vec![0.0, 2.0], 12.0)
            .le(vec![3.0, 2.0], 18.0);
        let (x, v) = lp.solve().optimal().map(|(x, v)| (x.to_vec(), v)).unwrap();
        assert!((v - 36.0).abs() < 1e-9);
        assert!((x[0] - 2.0).abs() < 1e-9 && (x[1] - 6.0).abs() < 1e-9);
    }

    #[test]
    fn free_variables_go_negative() {
        // max -x, x >= -3
        let mut lp = LinearProgram::maximize(vec![-1.0]);
        lp.add(vec![1.0], Relation::Ge, -3.0);
        let (x, v) = lp.solve().optimal().map(|(x, v)| (x.to_vec(), v)).unwrap();
        assert!((x[0] + 3.0).abs() < 1e-9);
        assert!((v - 3.0).abs() < 1e-9);
    }

    #[test]
    fn detects_infeasible_and_unbounded() {
        let mut lp = LinearProgram::maximize(vec![1.0]);
        lp.le(vec![1.0], 1.0).add(vec![1.0], Relation::Ge, 2.0);
        assert_eq!(lp.solve(), LpOutcome::Infeasible);

        let mut lp = LinearProgram::maximize(vec![1.0, 0.0]);
        lp.le(vec![0.0, 1.0], 1.0);
        assert_eq!(lp.solve(), LpOutcome::Unbounded);
    }

    #[test]
    fn equality_constraints() {
        // max x + y on x + y = 1, x - y = 0.5 (unique point)
        let mut lp = LinearProgram::maximize(vec![1.0, 1.0]);
        lp.eq(vec![1.0, 1.0], 1.0).eq(vec![1.0, -1.0], 0.5);
        let (x, _) = lp.solve().optimal().map(|(x, v)| (x.to_vec(), v)).unwrap();
        assert!((x[0] - 0.75).abs() < 1e-9 && (x[1] - 0.25).abs() < 1e-9);
    }

    #[test]
    fn redundant_equalities_are_tolerated() {
        let mut lp = LinearProgram::maximize(vec![1.0, 0.0]);
        lp.eq(vec![1.0, 1.0], 1.0)
            .eq(vec![2.0, 2.0], 2.0)
            .le(vec![1.0, 0.0], 0.25);
        let (x, _) = lp.solve().optimal().map(|(x, v)| (x.to_vec(), v)).unwrap();
        assert!((x[0] - 0.25).abs() < 1e-9 && (x[1] - 0.75).abs() < 1e-9);
    }

    #[test]
    fn degenerate_vertex_terminates() {
        // Many constraints through the optimum (0,0): Bland's rule must not cycle.
        let mut lp = LinearProgram::maximize(vec![1.0, 1.0]);
        for k in 0..12 {
            let a = 0.1 + k as f64 * 0.13;
            lp.le(vec![a, 1.0], 0.0).le(vec![1.0, a], 0.0);
        }
        let (_, v) = lp.solve().optimal().map(|(x, v)| (x.to_vec(), v)).unwrap();
        assert!(v.abs() < 1e-9);
    }
}
