//! Exact LP / binary MILP solving.
//!
//! [`solve_lp`] runs a two-phase bounded-variable simplex with Bland's rule
//! on a dense tableau; [`solve_milp`] wraps it in a depth-first
//! branch-and-bound that warm-starts every child with the dual simplex.
//! Both are generic over [`Scalar`]; use [`Rational`](crate::Rational) for
//! certified results.

mod bnb;
mod format;
mod simplex;

use std::collections::HashMap;
use std::fmt;

pub use bnb::{solve_milp, solve_milp_with, MilpOptions};
pub use format::{read_problem, write_problem};
pub(crate) use format::read_problem_with;
pub use simplex::solve_lp;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VarKind {
    Continuous,
    Binary,
}

impl fmt::Display for VarKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VarKind::Continuous => "continuous",
            VarKind::Binary => "binary",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

impl fmt::Display for Sense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        })
    }
}

/// A variable with bounds; `None` is an infinite bound.
#[derive(Debug, Clone, PartialEq)]
pub struct Variable<T> {
    pub name: String,
    pub kind: VarKind,
    pub lower: Option<T>,
    pub upper: Option<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint<T> {
    pub name: String,
    pub terms: Vec<(usize, T)>,
    pub sense: Sense,
    pub rhs: T,
}

impl<T: Scalar> Constraint<T> {
    pub fn new(name: &str, terms: Vec<(usize, T)>, sense: Sense, rhs: T) -> Self {
        Self {
            name: name.to_string(),
            terms,
            sense,
            rhs,
        }
    }

    pub fn lhs(&self, values: &[T]) -> T {
        self.terms
            .iter()
            .fold(T::zero(), |acc, (j, c)| acc + c.clone() * values[*j].clone())
    }

    pub fn is_satisfied(&self, values: &[T]) -> bool {
        let lhs = self.lhs(values);
        match self.sense {
            Sense::Le => lhs <= self.rhs,
            Sense::Ge => lhs >= self.rhs,
            Sense::Eq => lhs == self.rhs,
        }
    }
}

/// Minimize a linear objective over continuous and binary variables.
#[derive(Debug, Clone, PartialEq)]
pub struct MilpProblem<T = Rational> {
    vars: Vec<Variable<T>>,
    constraints: Vec<Constraint<T>>,
    objective: Vec<(usize, T)>,
    var_index: HashMap<String, usize>,
    con_index: HashMap<String, usize>,
}

impl<T: Scalar> Default for MilpProblem<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Scalar> MilpProblem<T> {
    pub fn new() -> Self {
        Self {
            vars: Vec::new(),
            constraints: Vec::new(),
            objective: Vec::new(),
            var_index: HashMap::new(),
            con_index: HashMap::new(),
        }
    }

    pub fn add_var(&mut self, name: &str, kind: VarKind, lower: Option<T>, upper: Option<T>) -> Result<usize> {
        if !valid_name(name) {
            return Err(Error::InvalidInput(format!("bad variable name `{name}`")));
        }
        if self.var_index.contains_key(name) {
            return Err(Error::InvalidInput(format!("duplicate variable `{name}`")));
        }
        let (lower, upper) = match kind {
            VarKind::Binary => (Some(T::zero()), Some(T::one())),
            VarKind::Continuous => (lower, upper),
        };
        if let (Some(l), Some(u)) = (&lower, &upper) {
            if l > u {
                return Err(Error::InvalidInput(format!("empty bounds on `{name}`")));
            }
        }
        let idx = self.vars.len();
        self.vars.push(Variable {
            name: name.to_string(),
            kind,
            lower,
            upper,
        });
        self.var_index.insert(name.to_string(), idx);
        Ok(idx)
    }

    /// Non-negative continuous variable.
    pub fn add_continuous(&mut self, name: &str) -> Result<usize> {
        self.add_var(name, VarKind::Continuous, Some(T::zero()), None)
    }

    pub fn add_binary(&mut self, name: &str) -> Result<usize> {
        self.add_var(name, VarKind::Binary, None, None)
    }

    pub fn add_free_var(&mut self, name: &str, kind: VarKind) -> Result<usize> {
        self.add_var(name, kind, None, None)
    }

    pub fn add_constraint(&mut self, c: Constraint<T>) -> Result<usize> {
        if !valid_name(&c.name) {
            return Err(Error::InvalidInput(format!("bad constraint name `{}`", c.name)));
        }
        if self.con_index.contains_key(&c.name) {
            return Err(Error::InvalidInput(format!("duplicate constraint `{}`", c.name)));
        }
        if let Some((j, _)) = c.terms.iter().find(|(j, _)| *j >= self.vars.len()) {
            return Err(Error::InvalidInput(format!("unknown variable index {j}")));
        }
        let idx = self.constraints.len();
        self.con_index.insert(c.name.clone(), idx);
        self.constraints.push(c);
        Ok(idx)
    }

    pub fn set_objective(&mut self, terms: Vec<(usize, T)>) {
        self.objective = terms;
    }

    pub fn vars(&self) -> &[Variable<T>] {
        &self.vars
    }

    pub fn constraints(&self) -> &[Constraint<T>] {
        &self.constraints
    }

    pub fn objective(&self) -> &[(usize, T)] {
        &self.objective
    }

    pub fn var_by_name(&self, name: &str) -> Option<usize> {
        self.var_index.get(name).copied()
    }

    pub fn constraint_by_name(&self, name: &str) -> Option<&Constraint<T>> {
        self.con_index.get(name).map(|&i| &self.constraints[i])
    }

    pub fn binaries(&self) -> impl Iterator<Item = usize> + '_ {
        self.vars
            .iter()
            .enumerate()
            .filter(|(_, v)| v.kind == VarKind::Binary)
            .map(|(i, _)| i)
    }

    pub fn objective_value(&self, values: &[T]) -> T {
        self.objective
            .iter()
            .fold(T::zero(), |acc, (j, c)| acc + c.clone() * values[*j].clone())
    }

    /// Every bound, constraint and integrality requirement holds exactly.
    pub fn is_feasible(&self, values: &[T]) -> bool {
        values.len() == self.vars.len()
            && self.vars.iter().zip(values).all(|(v, x)| {
                v.lower.as_ref().is_none_or(|l| x >= l)
                    && v.upper.as_ref().is_none_or(|u| x <= u)
                    && (v.kind != VarKind::Binary || x.is_zero() || x.is_one())
            })
            && self.constraints.iter().all(|c| c.is_satisfied(values))
    }

    /// Same problem with the given variable's bounds replaced (binary fixing).
    pub fn with_bounds(&self, var: usize, lower: T, upper: T) -> Self {
        let mut p = self.clone();
        p.vars[var].lower = Some(lower);
        p.vars[var].upper = Some(upper);
        p
    }
}

fn valid_name(name: &str) -> bool {
    !name.is_empty() && !name.chars().any(|c| c.is_whitespace() || c == ':')
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Optimal,
    Infeasible,
    Unbounded,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Optimal => "optimal",
            Status::Infeasible => "infeasible",
            Status::Unbounded => "unbounded",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MilpSolution<T = Rational> {
    pub status: Status,
    /// One value per variable; empty unless optimal.
    pub values: Vec<T>,
    pub objective: T,
    /// Branch-and-bound nodes whose LP was solved (1 for a pure LP).
    pub nodes: usize,
}

impl<T: Scalar> MilpSolution<T> {
    pub(crate) fn without_point(status: Status) -> Self {
        Self {
            status,
            values: Vec::new(),
            objective: T::zero(),
            nodes: 1,
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == Status::Optimal
    }
}
