mod common;

use rand::Rng;

use common::{int, rat, rng, simplex_corpus};
use plattice::bounds::beta_upper;
use plattice::jump::jump_run_starts;
use plattice::lattice::deepest_point_bruteforce;
use plattice::milp::{solve_milp, Status};
use plattice::prover::{
    encode_cut, initial_problem, load_state, prove_beta, save_state, CutForm, Encoding, ProverState,
};
use plattice::{Problem, Rational};

/// The problem with `a` pinned to a point.
fn pinned(p: &Problem, a: &[Rational]) -> Problem {
    let mut q = p.clone();
    for (i, v) in a.iter().enumerate() {
        let j = q.var_by_name(&format!("a{i}")).unwrap();
        q = q.with_bounds(j, v.clone(), v.clone());
    }
    q
}

/// Disjunction semantics evaluated directly.
fn satisfies_cuts(state: &ProverState, a: &[Rational]) -> bool {
    let l = state.l;
    state.cut_log.iter().all(|c| {
        let lq1 = int((l * c.jump.q + 1) as i64);
        jump_run_starts(&c.jump)
            .into_iter()
            .any(|i| &lq1 * &a[i] - &a[0] <= int((l * c.jump.p[i]) as i64))
    })
}

fn random_point(g: &mut impl Rng, d: usize) -> Vec<Rational> {
    let den = g.gen_range(20..=400);
    let mut w: Vec<i64> = (0..=d).map(|_| g.gen_range(1..=den)).collect();
    w.sort();
    let total: i64 = w.iter().sum();
    w.iter().map(|&x| rat(x, total)).collect()
}

#[test]
fn encodings_describe_the_same_set() {
    for (d, l, iters) in [(2u32, 1u64, 14usize), (2, 2, 10), (3, 1, 10)] {
        let run = prove_beta(d, l, iters, Encoding::Log, None).unwrap();
        let mut plain = initial_problem(d);
        for c in &run.state.cut_log {
            let rec = encode_cut(&mut plain, &c.jump, l, Encoding::Plain).unwrap();
            assert!(rec.form == CutForm::Plain || rec.form == CutForm::Direct);
        }
        let log = &run.state.problem;
        assert_eq!(solve_milp(&plain).unwrap().objective, solve_milp(log).unwrap().objective);
        let mut g = rng(u64::from(d) * 10 + l);
        let mut hits = 0;
        for _ in 0..40 {
            let a = random_point(&mut g, d as usize);
            let direct = satisfies_cuts(&run.state, &a);
            hits += direct as usize;
            let in_log = solve_milp(&pinned(log, &a)).unwrap().status == Status::Optimal;
            let in_plain = solve_milp(&pinned(&plain, &a)).unwrap().status == Status::Optimal;
            assert_eq!((in_log, in_plain), (direct, direct), "a = {a:?}");
        }
        assert!(hits > 0);
    }
}

#[test]
fn runs_are_monotone_bounded_and_deterministic() {
    for (d, l) in [(2u32, 1u64), (2, 2), (3, 1)] {
        let a = prove_beta(d, l, 20, Encoding::Log, None).unwrap();
        let b = prove_beta(d, l, 20, Encoding::Log, None).unwrap();
        assert_eq!(save_state(&a.state), save_state(&b.state));
        let upper = beta_upper(d, l).unwrap();
        assert!(a.history.windows(2).all(|w| w[0] <= w[1]));
        assert!(a.history.iter().all(|f| *f <= upper));
        assert!(*a.history.last().unwrap() > int(0));
    }
}

#[test]
fn plain_encoding_run_certifies_the_same_bounds() {
    let log = prove_beta(2, 1, 12, Encoding::Log, None).unwrap();
    let plain = prove_beta(2, 1, 12, Encoding::Plain, None).unwrap();
    assert_eq!(log.history[..4], plain.history[..4]);
    assert!(plain.history.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn certified_bounds_sit_below_every_corpus_depth() {
    let mut finals = std::collections::HashMap::new();
    for (d, l) in [(1u32, 1u64), (1, 2), (2, 1), (2, 2), (3, 1), (3, 2)] {
        finals.insert((d, l), prove_beta(d, l, 12, Encoding::Log, None).unwrap().state.bound);
    }
    for (s, l) in simplex_corpus() {
        let (_, m) = deepest_point_bruteforce(&s, l).unwrap();
        let f = &finals[&(s.dim() as u32, l)];
        assert!(m >= *f, "depth {m} below certified {f}");
    }
}

#[test]
fn one_dimensional_value() {
    for l in 1..=4u64 {
        let run = prove_beta(1, l, 50, Encoding::Log, None).unwrap();
        assert_eq!(run.state.bound, rat(1, l as i64 + 2));
    }
}

#[test]
fn state_survives_a_round_trip_mid_run() {
    let first = prove_beta(3, 1, 5, Encoding::Log, None).unwrap();
    let text = save_state(&first.state);
    let loaded = load_state(&text).unwrap();
    assert_eq!(loaded, first.state);
    let resumed = prove_beta(3, 1, 9, Encoding::Log, Some(loaded)).unwrap();
    let straight = prove_beta(3, 1, 9, Encoding::Log, None).unwrap();
    assert_eq!(save_state(&resumed.state), save_state(&straight.state));
    assert!(load_state(&text.replace("milp v1", "milp v2")).is_err());
    assert!(prove_beta(2, 1, 9, Encoding::Log, Some(load_state(&text).unwrap())).is_err());
}
