mod common;

use num_traits::ToPrimitive;
use proptest::prelude::*;
use rand::Rng;

use common::{int, milp_bruteforce, random_milp, rat, rng};
use plattice::milp::{
    read_problem, solve_lp, solve_milp, write_problem, Constraint, MilpProblem, Sense, Status, VarKind,
};
use plattice::{FloatProblem, Rational};

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

/// An LP whose optimum is known by construction: `x*` is feasible, some
/// rows are tight there, and the objective is a negative combination of
/// the tight rows, so `x*` satisfies the optimality conditions.
fn constructed_lp(g: &mut impl Rng, n: usize) -> (MilpProblem, Rational) {
    let mut p = MilpProblem::new();
    let x: Vec<usize> = (0..n)
        .map(|j| p.add_var(&format!("x{j}"), VarKind::Continuous, Some(int(-100)), Some(int(100))).unwrap())
        .collect();
    let star: Vec<Rational> = (0..n).map(|_| rat(g.gen_range(-40..=40), g.gen_range(1..=4))).collect();
    let mut objective = vec![int(0); n];
    for r in 0..g.gen_range(n..=n + 4) {
        let a: Vec<Rational> = (0..n).map(|_| int(g.gen_range(-4..=4))).collect();
        let at: Rational = a.iter().zip(&star).map(|(u, v)| u * v).sum();
        let tight = g.gen_bool(0.6);
        let slack = if tight { int(0) } else { int(g.gen_range(1..=5)) };
        let terms: Vec<(usize, Rational)> = x.iter().copied().zip(a.iter().cloned()).collect();
        if g.gen_bool(0.5) {
            p.add_constraint(Constraint::new(&format!("c{r}"), terms, Sense::Le, at + slack)).unwrap();
            if tight {
                let mu = int(g.gen_range(0..=3));
                for (o, ai) in objective.iter_mut().zip(&a) {
                    *o -= &mu * ai;
                }
            }
        } else {
            p.add_constraint(Constraint::new(&format!("c{r}"), terms, Sense::Ge, at - slack)).unwrap();
            if tight {
                let mu = int(g.gen_range(0..=3));
                for (o, ai) in objective.iter_mut().zip(&a) {
                    *o += &mu * ai;
                }
            }
        }
    }
    let value: Rational = objective.iter().zip(&star).map(|(u, v)| u * v).sum();
    p.set_objective(x.iter().copied().zip(objective).collect());
    (p, value)
}

fn to_float(p: &MilpProblem) -> FloatProblem {
    let f = |r: &Rational| r.to_f64().unwrap();
    let mut q = FloatProblem::new();
    for v in p.vars() {
        q.add_var(&v.name, v.kind, v.lower.as_ref().map(f), v.upper.as_ref().map(f)).unwrap();
    }
    for c in p.constraints() {
        let terms = c.terms.iter().map(|(j, a)| (*j, f(a))).collect();
        q.add_constraint(Constraint::new(&c.name, terms, c.sense, f(&c.rhs))).unwrap();
    }
    q.set_objective(p.objective().iter().map(|(j, a)| (*j, f(a))).collect());
    q
}

proptest! {
    #![proptest_config(config(200))]

    #[test]
    fn lp_finds_constructed_optimum(seed in any::<u64>(), n in 1usize..=5) {
        let mut g = rng(seed);
        let (p, value) = constructed_lp(&mut g, n);
        let s = solve_lp(&p).unwrap();
        prop_assert_eq!(s.status, Status::Optimal);
        prop_assert_eq!(&s.objective, &value);
        prop_assert!(p.is_feasible(&s.values));
        prop_assert_eq!(p.objective_value(&s.values), value);
    }
}

proptest! {
    #![proptest_config(config(60))]

    #[test]
    fn milp_matches_exhaustive_search(seed in any::<u64>(), nb in 1usize..=12, nc in 0usize..=2) {
        let mut g = rng(seed);
        let p = random_milp(&mut g, nb, nc);
        let s = solve_milp(&p).unwrap();
        match milp_bruteforce(&p, nb, nc) {
            None => prop_assert_eq!(s.status, Status::Infeasible),
            Some(best) => {
                prop_assert_eq!(s.status, Status::Optimal);
                prop_assert_eq!(&s.objective, &best);
                prop_assert!(p.is_feasible(&s.values));
            }
        }
    }

    #[test]
    fn solves_are_deterministic(seed in any::<u64>(), nb in 1usize..=8, nc in 0usize..=2) {
        let mut g = rng(seed);
        let p = random_milp(&mut g, nb, nc);
        let a = solve_milp(&p).unwrap();
        let b = solve_milp(&p.clone()).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn adding_a_row_never_lowers_the_optimum(seed in any::<u64>(), nb in 1usize..=8, nc in 0usize..=2) {
        let mut g = rng(seed);
        let p = random_milp(&mut g, nb, nc);
        let before = solve_milp(&p).unwrap();
        let mut q = p.clone();
        let terms = (0..nb + nc).map(|j| (j, int(g.gen_range(-2..=2)))).collect();
        q.add_constraint(Constraint::new("extra", terms, Sense::Le, int(g.gen_range(0..=4)))).unwrap();
        let after = solve_milp(&q).unwrap();
        if after.status == Status::Optimal {
            prop_assert_eq!(before.status, Status::Optimal);
            prop_assert!(after.objective >= before.objective);
        }
    }

    #[test]
    fn text_format_round_trips(seed in any::<u64>(), nb in 1usize..=6, nc in 0usize..=2) {
        let mut g = rng(seed);
        let p = random_milp(&mut g, nb, nc);
        let text = write_problem(&p);
        let back = read_problem(&text).unwrap();
        prop_assert_eq!(&back, &p);
        prop_assert_eq!(write_problem(&back), text);
    }

    #[test]
    fn float_solver_agrees_on_pure_binary_problems(seed in any::<u64>(), nb in 1usize..=8) {
        let mut g = rng(seed);
        let p = random_milp(&mut g, nb, 0);
        let exact = solve_milp(&p).unwrap();
        let approx = solve_milp(&to_float(&p)).unwrap();
        prop_assert_eq!(exact.status, approx.status);
        if exact.status == Status::Optimal {
            prop_assert!((exact.objective.to_f64().unwrap() - approx.objective).abs() < 1e-7);
        }
    }
}

#[test]
fn lp_status_cases() {
    let mut p = MilpProblem::<Rational>::new();
    let x = p.add_continuous("x").unwrap();
    p.set_objective(vec![(x, int(-1))]);
    assert_eq!(solve_lp(&p).unwrap().status, Status::Unbounded);
    p.add_constraint(Constraint::new("cap", vec![(x, int(3))], Sense::Le, int(2))).unwrap();
    let s = solve_lp(&p).unwrap();
    assert_eq!((s.status, s.values.clone()), (Status::Optimal, vec![rat(2, 3)]));
    p.add_constraint(Constraint::new("floor", vec![(x, int(1))], Sense::Ge, int(1))).unwrap();
    assert_eq!(solve_lp(&p).unwrap().status, Status::Infeasible);
}
