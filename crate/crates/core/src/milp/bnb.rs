//! Depth-first branch-and-bound over binary variables.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::simplex::{finish, Outcome, Tableau};
use super::{MilpProblem, MilpSolution, Status};

#[derive(Debug, Clone, Default)]
pub struct MilpOptions {
    /// Abort with a solver error after this many LP solves.
    pub max_nodes: Option<usize>,
}

pub fn solve_milp<T: Scalar>(problem: &MilpProblem<T>) -> Result<MilpSolution<T>> {
    solve_milp_with(problem, &MilpOptions::default())
}

pub fn solve_milp_with<T: Scalar>(problem: &MilpProblem<T>, options: &MilpOptions) -> Result<MilpSolution<T>> {
    let binaries: Vec<usize> = problem.binaries().collect();
    let eps = T::tolerance();
    let one_minus = T::one() - eps.clone();

    let mut root = Tableau::build(problem);
    let outcome = root.solve();
    if outcome != Outcome::Optimal {
        return Ok(finish(problem, &root, outcome));
    }

    let mut incumbent: Option<(T, Vec<T>)> = None;
    let mut nodes = 0usize;
    let mut stack: Vec<(Tableau<T>, bool)> = vec![(root, true)];
    while let Some((mut t, solved)) = stack.pop() {
        if !solved && t.dual() != Outcome::Optimal {
            nodes += 1;
            continue;
        }
        nodes += 1;
        if let Some(limit) = options.max_nodes {
            if nodes > limit {
                return Err(Error::Solver(format!("node limit {limit} exceeded")));
            }
        }
        let values = t.values();
        let bound = problem.objective_value(&values);
        if incumbent.as_ref().is_some_and(|(best, _)| bound >= *best) {
            continue;
        }
        let frac = binaries
            .iter()
            .copied()
            .find(|&j| values[j] > eps && values[j] < one_minus);
        match frac {
            None => {
                let mut leaf = t;
                for &j in &binaries {
                    let v = if values[j] >= one_minus { T::one() } else { T::zero() };
                    leaf.fix_variable(j, v);
                }
                leaf.lex_refine();
                let mut values = leaf.values();
                for &j in &binaries {
                    values[j] = if values[j] >= one_minus { T::one() } else { T::zero() };
                }
                incumbent = Some((bound, values));
            }
            Some(j) => {
                let mut zero = t.clone();
                zero.fix_variable(j, T::zero());
                t.fix_variable(j, T::one());
                // popped last-in first-out: the 1 branch runs first
                stack.push((zero, false));
                stack.push((t, false));
            }
        }
    }
    Ok(match incumbent {
        None => MilpSolution {
            nodes,
            ..MilpSolution::without_point(Status::Infeasible)
        },
        Some((objective, values)) => MilpSolution {
            status: Status::Optimal,
            values,
            objective,
            nodes,
        },
    })
}
