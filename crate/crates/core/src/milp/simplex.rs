//! Dense-tableau bounded-variable simplex.
//!
//! Internal columns all have a finite lower bound and an optional upper
//! bound; structural variables with an infinite lower bound are negated or
//! split. Every row is an equality carrying either a slack or an artificial
//! column. Pivoting follows Bland's rule in both the primal and the dual
//! method, so degenerate cycling cannot occur.

use crate::error::Result;
use crate::scalar::Scalar;

use super::{MilpProblem, MilpSolution, Sense, Status};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ColState {
    Basic(usize),
    AtLower,
    AtUpper,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Outcome {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone)]
pub(crate) struct Tableau<T> {
    rows: Vec<Vec<T>>,
    beta: Vec<T>,
    basis: Vec<usize>,
    state: Vec<ColState>,
    lower: Vec<T>,
    upper: Vec<Option<T>>,
    cost: Vec<T>,
    dj: Vec<T>,
    first_artificial: usize,
    /// structural variable -> internal columns with a sign flag (true = negated)
    map: Vec<Vec<(usize, bool)>>,
}

impl<T: Scalar> Tableau<T> {
    pub(crate) fn build(problem: &MilpProblem<T>) -> Self {
        let mut map = Vec::with_capacity(problem.vars().len());
        let mut lower = Vec::new();
        let mut upper = Vec::new();
        let mut cost = Vec::new();
        let mut obj = vec![T::zero(); problem.vars().len()];
        for (j, c) in problem.objective() {
            obj[*j] = obj[*j].clone() + c.clone();
        }
        for (k, v) in problem.vars().iter().enumerate() {
            let mut cols = Vec::new();
            match (&v.lower, &v.upper) {
                (Some(l), u) => {
                    cols.push((lower.len(), false));
                    lower.push(l.clone());
                    upper.push(u.clone());
                    cost.push(obj[k].clone());
                }
                (None, Some(u)) => {
                    cols.push((lower.len(), true));
                    lower.push(-u.clone());
                    upper.push(None);
                    cost.push(-obj[k].clone());
                }
                (None, None) => {
                    cols.push((lower.len(), false));
                    cols.push((lower.len() + 1, true));
                    for sign in [false, true] {
                        lower.push(T::zero());
                        upper.push(None);
                        cost.push(if sign { -obj[k].clone() } else { obj[k].clone() });
                    }
                }
            }
            map.push(cols);
        }
        let n_struct = lower.len();
        let m = problem.constraints().len();

        // dense structural rows
        let mut dense: Vec<Vec<T>> = Vec::with_capacity(m);
        let mut rhs: Vec<T> = Vec::with_capacity(m);
        for c in problem.constraints() {
            let mut row = vec![T::zero(); n_struct];
            for (j, a) in &c.terms {
                for &(col, neg) in &map[*j] {
                    let v = if neg { -a.clone() } else { a.clone() };
                    row[col] = row[col].clone() + v;
                }
            }
            rhs.push(c.rhs.clone());
            dense.push(row);
        }

        // slack columns
        let mut slack_of = vec![None; m];
        for (i, c) in problem.constraints().iter().enumerate() {
            if c.sense != Sense::Eq {
                slack_of[i] = Some(lower.len());
                lower.push(T::zero());
                upper.push(None);
                cost.push(T::zero());
            }
        }
        let first_artificial = lower.len();

        // residual at the all-lower starting point decides the basis
        let mut art_rows = Vec::new();
        let mut flip = vec![false; m];
        let mut beta = Vec::with_capacity(m);
        for i in 0..m {
            let mut r = rhs[i].clone();
            for (col, a) in dense[i].iter().enumerate() {
                if !a.is_zero() && !lower[col].is_zero() {
                    r.sub_product(a, &lower[col]);
                }
            }
            if r.is_negative() {
                flip[i] = true;
                r = -r;
            }
            let slack_sign_positive = match problem.constraints()[i].sense {
                Sense::Le => !flip[i],
                Sense::Ge => flip[i],
                Sense::Eq => false,
            };
            if !slack_sign_positive {
                art_rows.push(i);
            }
            beta.push(r);
        }

        let n = first_artificial + art_rows.len();
        for _ in &art_rows {
            lower.push(T::zero());
            upper.push(None);
            cost.push(T::zero());
        }
        let mut rows = Vec::with_capacity(m);
        let mut basis = vec![0; m];
        let mut state = vec![ColState::AtLower; n];
        let mut art_iter = 0;
        for i in 0..m {
            let mut row = std::mem::take(&mut dense[i]);
            row.resize(n, T::zero());
            if let Some(s) = slack_of[i] {
                row[s] = match problem.constraints()[i].sense {
                    Sense::Le => T::one(),
                    _ => -T::one(),
                };
            }
            if flip[i] {
                for v in row.iter_mut() {
                    if !v.is_zero() {
                        *v = -v.clone();
                    }
                }
            }
            if art_rows.get(art_iter) == Some(&i) {
                let col = first_artificial + art_iter;
                row[col] = T::one();
                basis[i] = col;
                art_iter += 1;
            } else {
                basis[i] = slack_of[i].expect("row without artificial has a slack");
            }
            state[basis[i]] = ColState::Basic(i);
            rows.push(row);
        }

        Self {
            rows,
            beta,
            basis,
            state,
            lower,
            upper,
            cost,
            dj: Vec::new(),
            first_artificial,
            map,
        }
    }

    fn n(&self) -> usize {
        self.lower.len()
    }

    fn is_fixed(&self, col: usize) -> bool {
        self.upper[col].as_ref() == Some(&self.lower[col])
    }

    fn nonbasic_value(&self, col: usize) -> T {
        match self.state[col] {
            ColState::AtUpper => self.upper[col].clone().expect("at upper implies finite"),
            _ => self.lower[col].clone(),
        }
    }

    fn column_value(&self, col: usize) -> T {
        match self.state[col] {
            ColState::Basic(i) => self.beta[i].clone(),
            _ => self.nonbasic_value(col),
        }
    }

    fn price(&mut self, costs: &[T]) {
        let mut dj = costs.to_vec();
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = &costs[b];
            if cb.is_zero() {
                continue;
            }
            for (j, a) in self.rows[i].iter().enumerate() {
                if !a.is_zero() {
                    dj[j].sub_product(cb, a);
                }
            }
        }
        self.dj = dj;
    }

    fn pivot(&mut self, r: usize, col: usize) {
        let piv = self.rows[r][col].clone();
        let nz: Vec<usize> = (0..self.n()).filter(|&k| !self.rows[r][k].is_zero()).collect();
        if !piv.is_one() {
            for &k in &nz {
                self.rows[r][k] = self.rows[r][k].div_ref(&piv);
            }
        }
        let (before, rest) = self.rows.split_at_mut(r);
        let (prow, after) = rest.split_first_mut().expect("pivot row exists");
        for row in before.iter_mut().chain(after.iter_mut()) {
            let f = row[col].clone();
            if f.is_zero() {
                continue;
            }
            for &k in &nz {
                row[k].sub_product(&f, &prow[k]);
            }
        }
        let f = self.dj[col].clone();
        if !f.is_zero() {
            for &k in &nz {
                self.dj[k].sub_product(&f, &prow[k]);
            }
        }
        let leaving = self.basis[r];
        self.basis[r] = col;
        self.state[col] = ColState::Basic(r);
        // caller sets the leaving state
        self.state[leaving] = ColState::AtLower;
    }

    /// Shift every basic value by `-rows[i][col] * delta`.
    fn shift_basics(&mut self, col: usize, delta: &T) {
        for (row, b) in self.rows.iter().zip(self.beta.iter_mut()) {
            if !row[col].is_zero() {
                b.sub_product(&row[col], delta);
            }
        }
    }

    fn primal(&mut self) -> Outcome {
        loop {
            let mut entering = None;
            for j in 0..self.n() {
                match self.state[j] {
                    ColState::Basic(_) => {}
                    ColState::AtLower => {
                        if self.dj[j].is_neg_tol() && !self.is_fixed(j) {
                            entering = Some((j, true));
                            break;
                        }
                    }
                    ColState::AtUpper => {
                        if self.dj[j].is_pos_tol() && !self.is_fixed(j) {
                            entering = Some((j, false));
                            break;
                        }
                    }
                }
            }
            let Some((col, increase)) = entering else {
                return Outcome::Optimal;
            };

            // (step, variable index for Bland ties, row or None for a bound flip, leaves at upper)
            let mut best: Option<(T, usize, Option<usize>, bool)> = None;
            let mut consider = |step: T, var: usize, row: Option<usize>, to_upper: bool| {
                // float drift can leave a basic value just outside its bound
                let step = if step.is_negative() { T::zero() } else { step };
                let better = match &best {
                    None => true,
                    Some((s, v, _, _)) => step < *s || (step == *s && var < *v),
                };
                if better {
                    best = Some((step, var, row, to_upper));
                }
            };
            if let Some(u) = &self.upper[col] {
                consider(u.clone() - self.lower[col].clone(), col, None, false);
            }
            for i in 0..self.rows.len() {
                let a = &self.rows[i][col];
                if a.is_zero_tol() {
                    continue;
                }
                // basic value moves by -a per unit increase of the entering column
                let decreasing = a.is_positive() == increase;
                let b = self.basis[i];
                if decreasing {
                    let step = (self.beta[i].clone() - self.lower[b].clone()).div_ref(&a.abs());
                    consider(step, b, Some(i), false);
                } else if let Some(u) = &self.upper[b] {
                    let step = (u.clone() - self.beta[i].clone()).div_ref(&a.abs());
                    consider(step, b, Some(i), true);
                }
            }
            let Some((step, _, row, to_upper)) = best else {
                return Outcome::Unbounded;
            };
            let delta = if increase { step } else { -step };
            let entering_value = self.nonbasic_value(col) + delta.clone();
            self.shift_basics(col, &delta);
            match row {
                None => {
                    self.state[col] = if increase {
                        ColState::AtUpper
                    } else {
                        ColState::AtLower
                    };
                }
                Some(r) => {
                    let leaving = self.basis[r];
                    self.pivot(r, col);
                    self.beta[r] = entering_value;
                    self.state[leaving] = if to_upper {
                        ColState::AtUpper
                    } else {
                        ColState::AtLower
                    };
                }
            }
        }
    }

    /// Dual simplex from a dual-feasible basis.
    pub(crate) fn dual(&mut self) -> Outcome {
        loop {
            let mut leave: Option<(usize, usize, bool)> = None;
            for (i, &b) in self.basis.iter().enumerate() {
                let below = self.beta[i] < self.lower[b] && (self.beta[i].clone() - self.lower[b].clone()).is_neg_tol();
                let above = self.upper[b]
                    .as_ref()
                    .is_some_and(|u| self.beta[i] > *u && (self.beta[i].clone() - u.clone()).is_pos_tol());
                if (below || above) && leave.is_none_or(|(_, v, _)| b < v) {
                    leave = Some((i, b, below));
                }
            }
            let Some((r, leaving, below)) = leave else {
                return Outcome::Optimal;
            };
            let target = if below {
                self.lower[leaving].clone()
            } else {
                self.upper[leaving].clone().expect("above implies finite")
            };
            let mut best: Option<(T, usize)> = None;
            for j in 0..self.n() {
                let at_lower = match self.state[j] {
                    ColState::Basic(_) => continue,
                    ColState::AtLower => true,
                    ColState::AtUpper => false,
                };
                if self.is_fixed(j) {
                    continue;
                }
                let a = &self.rows[r][j];
                if a.is_zero_tol() {
                    continue;
                }
                let eligible = if below {
                    a.is_negative() == at_lower
                } else {
                    a.is_positive() == at_lower
                };
                if !eligible {
                    continue;
                }
                let ratio = self.dj[j].div_ref(a).abs();
                if best.as_ref().is_none_or(|(q, _)| ratio < *q) {
                    best = Some((ratio, j));
                }
            }
            let Some((_, col)) = best else {
                return Outcome::Infeasible;
            };
            let delta = (self.beta[r].clone() - target).div_ref(&self.rows[r][col]);
            let entering_value = self.nonbasic_value(col) + delta.clone();
            self.shift_basics(col, &delta);
            self.pivot(r, col);
            self.beta[r] = entering_value;
            self.state[leaving] = if below {
                ColState::AtLower
            } else {
                ColState::AtUpper
            };
        }
    }

    /// Two-phase solve from the slack/artificial basis.
    pub(crate) fn solve(&mut self) -> Outcome {
        let n = self.n();
        if self.first_artificial < n {
            let phase1: Vec<T> = (0..n)
                .map(|j| if j >= self.first_artificial { T::one() } else { T::zero() })
                .collect();
            self.price(&phase1);
            if self.primal() == Outcome::Unbounded {
                unreachable!("phase one is bounded below by zero");
            }
            let infeasibility = (self.first_artificial..n)
                .fold(T::zero(), |acc, j| acc + self.column_value(j));
            if infeasibility.is_pos_tol() {
                return Outcome::Infeasible;
            }
            self.drive_out_artificials();
            for j in self.first_artificial..n {
                self.upper[j] = Some(T::zero());
            }
        }
        let cost = self.cost.clone();
        self.price(&cost);
        self.primal()
    }

    fn drive_out_artificials(&mut self) {
        for r in 0..self.rows.len() {
            if self.basis[r] < self.first_artificial {
                continue;
            }
            let col = (0..self.first_artificial)
                .find(|&j| !matches!(self.state[j], ColState::Basic(_)) && !self.rows[r][j].is_zero_tol());
            if let Some(col) = col {
                // degenerate: the artificial is at zero, so no value changes
                let value = self.nonbasic_value(col);
                let leaving = self.basis[r];
                self.dj = vec![T::zero(); self.n()];
                self.pivot(r, col);
                self.beta[r] = value;
                self.state[leaving] = ColState::AtLower;
            }
        }
    }

    /// Moves to the lexicographically smallest optimal vertex: the optimal
    /// face is pinned by fixing every nonbasic column with a nonzero reduced
    /// cost, then each structural variable is minimized in index order.
    /// Stops early if a level is unbounded on the face.
    pub(crate) fn lex_refine(&mut self) {
        for var in 0..self.map.len() {
            for j in 0..self.n() {
                if !matches!(self.state[j], ColState::Basic(_)) && !self.dj[j].is_zero_tol() && !self.is_fixed(j) {
                    let v = self.nonbasic_value(j);
                    self.lower[j] = v.clone();
                    self.upper[j] = Some(v);
                    self.state[j] = ColState::AtLower;
                }
            }
            let mut cost = vec![T::zero(); self.n()];
            for &(col, neg) in &self.map[var] {
                cost[col] = if neg { -T::one() } else { T::one() };
            }
            self.price(&cost);
            if self.primal() != Outcome::Optimal {
                return;
            }
        }
    }

    /// Tightens the bounds of a structural variable (mapped 1:1 to a column)
    /// keeping the basis; the caller re-optimizes with [`Tableau::dual`].
    pub(crate) fn fix_variable(&mut self, var: usize, value: T) {
        let (col, neg) = self.map[var][0];
        debug_assert!(!neg && self.map[var].len() == 1);
        let old = self.column_value(col);
        self.lower[col] = value.clone();
        self.upper[col] = Some(value.clone());
        if !matches!(self.state[col], ColState::Basic(_)) {
            let delta = value - old;
            if !delta.is_zero() {
                self.shift_basics(col, &delta);
            }
            self.state[col] = ColState::AtLower;
        }
    }

    pub(crate) fn values(&self) -> Vec<T> {
        self.map
            .iter()
            .map(|cols| {
                cols.iter().fold(T::zero(), |acc, &(c, neg)| {
                    let v = self.column_value(c);
                    if neg {
                        acc - v
                    } else {
                        acc + v
                    }
                })
            })
            .collect()
    }
}

/// Solves the LP relaxation (binaries relaxed to `[0, 1]`). Among optimal
/// solutions the lexicographically smallest vertex is returned.
pub fn solve_lp<T: Scalar>(problem: &MilpProblem<T>) -> Result<MilpSolution<T>> {
    let mut t = Tableau::build(problem);
    let outcome = t.solve();
    if outcome == Outcome::Optimal {
        t.lex_refine();
    }
    Ok(finish(problem, &t, outcome))
}

pub(crate) fn finish<T: Scalar>(problem: &MilpProblem<T>, t: &Tableau<T>, outcome: Outcome) -> MilpSolution<T> {
    match outcome {
        Outcome::Infeasible => MilpSolution::without_point(Status::Infeasible),
        Outcome::Unbounded => MilpSolution::without_point(Status::Unbounded),
        Outcome::Optimal => {
            let values = t.values();
            MilpSolution {
                status: Status::Optimal,
                objective: problem.objective_value(&values),
                values,
                nodes: 1,
            }
        }
    }
}
