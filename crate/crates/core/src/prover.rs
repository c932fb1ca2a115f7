//! Constraint generation for certified lower bounds on β(d,l).
//!
//! Each step solves the accumulated MILP over the sorted barycentric
//! coordinates `a_0 <= ... <= a_d`, asks [`next_jump`] for a jump that
//! improves every coordinate of the optimum, and adds the disjunction
//! "some run-start coordinate does not improve". The optimum is a lower
//! bound on β(d,l) at every step.

use std::fmt;
use std::str::FromStr;

use num_traits::Zero;

use crate::bounds::beta_upper;
use crate::error::{Error, Result};
use crate::jump::{jump_run_starts, next_jump, JumpVector, DEFAULT_QMAX};
use crate::milp::{read_problem_with, solve_milp, write_problem, Constraint, MilpProblem, Sense, Status};
use crate::scalar::{format_rational, int, parse_rational};
use crate::Rational;

pub const DEFAULT_MAX_ITER: usize = 600;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Encoding {
    Plain,
    #[default]
    Log,
}

impl fmt::Display for Encoding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Encoding::Plain => "plain",
            Encoding::Log => "log",
        })
    }
}

impl FromStr for Encoding {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plain" => Ok(Encoding::Plain),
            "log" => Ok(Encoding::Log),
            other => Err(Error::InvalidInput(format!("unknown encoding `{other}`"))),
        }
    }
}

/// How a cut entered the problem; `Direct` is a single disjunct without
/// binaries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CutForm {
    Direct,
    Plain,
    Log,
}

impl fmt::Display for CutForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CutForm::Direct => "direct",
            CutForm::Plain => "plain",
            CutForm::Log => "log",
        })
    }
}

impl FromStr for CutForm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "direct" => Ok(CutForm::Direct),
            "plain" => Ok(CutForm::Plain),
            "log" => Ok(CutForm::Log),
            other => Err(Error::InvalidInput(format!("unknown cut form `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CutRecord {
    pub jump: JumpVector,
    pub form: CutForm,
    pub rows: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProverStatus {
    Running,
    /// No jump with `q <= qmax` improves the optimum.
    Saturated,
    /// The iteration budget ran out.
    Budget,
}

impl fmt::Display for ProverStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProverStatus::Running => "running",
            ProverStatus::Saturated => "saturated",
            ProverStatus::Budget => "budget",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProverState {
    pub d: u32,
    pub l: u64,
    pub problem: MilpProblem,
    pub iteration: usize,
    /// Optimum at the last solved iteration.
    pub bound: Rational,
    pub cut_log: Vec<CutRecord>,
}

/// `a_0..a_d >= 0`, `a_(i-1) <= a_i`, `sum a = 1`, minimize `a_0`.
pub fn initial_problem(d: u32) -> MilpProblem {
    assert!(d >= 1, "dimension must be positive");
    let mut p = MilpProblem::new();
    let a: Vec<usize> = (0..=d)
        .map(|i| p.add_continuous(&format!("a{i}")).expect("fresh name"))
        .collect();
    for i in 1..a.len() {
        let c = Constraint::new(&format!("chain{i}"), vec![(a[i - 1], int(1)), (a[i], int(-1))], Sense::Le, int(0));
        p.add_constraint(c).expect("fresh name");
    }
    let sum = Constraint::new("sum", a.iter().map(|&j| (j, int(1))).collect(), Sense::Eq, int(1));
    p.add_constraint(sum).expect("fresh name");
    p.set_objective(vec![(a[0], int(1))]);
    p
}

fn binary_count(problem: &MilpProblem) -> usize {
    problem.binaries().count()
}

/// Adds the disjunction "for some run start `i`: `-a_0 + (lq+1) a_i <= l p_i`".
pub fn encode_cut(problem: &mut MilpProblem, p: &JumpVector, l: u64, encoding: Encoding) -> Result<CutRecord> {
    let starts = jump_run_starts(p);
    if starts.is_empty() {
        return Err(Error::NoRunStarts);
    }
    let a: Vec<usize> = (0..p.p.len())
        .map(|i| problem.var_by_name(&format!("a{i}")).expect("prover variables"))
        .collect();
    let a0 = a[0];
    let big = int((l * p.q + 1) as i64);
    let disjunct = |i: usize| -> (Vec<(usize, Rational)>, Rational) {
        (vec![(a0, int(-1)), (a[i], big.clone())], int((l * p.p[i]) as i64))
    };

    if starts.len() == 1 {
        let i = starts[0];
        let (terms, rhs) = disjunct(i);
        let name = p.row_name(i);
        problem.add_constraint(Constraint::new(&name, terms, Sense::Le, rhs))?;
        return Ok(CutRecord {
            jump: p.clone(),
            form: CutForm::Direct,
            rows: vec![name],
        });
    }

    let first = binary_count(problem);
    let mut rows = Vec::new();
    let form = match encoding {
        Encoding::Plain => {
            let z: Vec<usize> = (0..starts.len())
                .map(|k| problem.add_binary(&format!("z{}", first + k)))
                .collect::<Result<_>>()?;
            for (&i, &zj) in starts.iter().zip(&z) {
                let (mut terms, rhs) = disjunct(i);
                terms.push((zj, big.clone()));
                let name = p.row_name(i);
                problem.add_constraint(Constraint::new(&name, terms, Sense::Le, rhs + &big))?;
                rows.push(name);
            }
            let cover = p.row_name(0);
            let terms = z.iter().map(|&zj| (zj, int(1))).collect();
            problem.add_constraint(Constraint::new(&cover, terms, Sense::Ge, int(1)))?;
            rows.push(cover);
            CutForm::Plain
        }
        Encoding::Log => {
            let jn = starts.len();
            let bits = usize::BITS - (jn - 1).leading_zeros();
            let z: Vec<usize> = (0..bits as usize)
                .map(|b| problem.add_binary(&format!("z{}", first + b)))
                .collect::<Result<_>>()?;
            for (j, &i) in starts.iter().enumerate() {
                let (mut terms, rhs) = disjunct(i);
                for (b, &zb) in z.iter().enumerate() {
                    if j >> b & 1 == 1 {
                        terms.push((zb, big.clone()));
                    } else if j + (1 << b) < jn {
                        terms.push((zb, -big.clone()));
                    }
                }
                let ones = int(j.count_ones() as i64);
                let name = p.row_name(i);
                problem.add_constraint(Constraint::new(&name, terms, Sense::Le, rhs + &big * ones))?;
                rows.push(name);
            }
            CutForm::Log
        }
    };
    Ok(CutRecord {
        jump: p.clone(),
        form,
        rows,
    })
}

/// One solved iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct StepReport {
    pub iteration: usize,
    pub bound: Rational,
    /// The sorted coordinates at the optimum.
    pub a: Vec<Rational>,
    pub cut: Option<CutRecord>,
}

#[derive(Debug, Clone)]
pub struct Prover {
    state: ProverState,
    encoding: Encoding,
    qmax: u64,
    upper: Option<Rational>,
    status: ProverStatus,
}

impl Prover {
    pub fn new(d: u32, l: u64, encoding: Encoding, qmax: u64) -> Result<Self> {
        if d == 0 || l == 0 {
            return Err(Error::InvalidInput("d and l must be positive".into()));
        }
        let state = ProverState {
            d,
            l,
            problem: initial_problem(d),
            iteration: 0,
            bound: Rational::zero(),
            cut_log: Vec::new(),
        };
        Self::from_state(state, encoding, qmax)
    }

    pub fn from_state(state: ProverState, encoding: Encoding, qmax: u64) -> Result<Self> {
        let upper = if state.d >= 2 { Some(beta_upper(state.d, state.l)?) } else { None };
        Ok(Self {
            state,
            encoding,
            qmax,
            upper,
            status: ProverStatus::Running,
        })
    }

    pub fn state(&self) -> &ProverState {
        &self.state
    }

    pub fn into_state(self) -> ProverState {
        self.state
    }

    pub fn status(&self) -> ProverStatus {
        self.status
    }

    /// Solves the current problem, records its optimum and adds the next
    /// cut; marks the run saturated when no cut exists.
    pub fn step(&mut self) -> Result<StepReport> {
        if self.status == ProverStatus::Saturated {
            return Err(Error::InvalidInput("prover is saturated".into()));
        }
        let st = &mut self.state;
        let sol = solve_milp(&st.problem)?;
        if sol.status != Status::Optimal {
            return Err(Error::Solver(format!("prover problem is {}", sol.status)));
        }
        let f = sol.objective.clone();
        if st.iteration > 0 && f < st.bound {
            return Err(Error::InvariantViolation(format!(
                "bound decreased from {} to {f}",
                st.bound
            )));
        }
        if let Some(u) = &self.upper {
            if f > *u {
                return Err(Error::InvariantViolation(format!("bound {f} exceeds the upper bound {u}")));
            }
        }
        let a: Vec<Rational> = sol.values[..=st.d as usize].to_vec();
        st.iteration += 1;
        st.bound = f.clone();

        let cut = match next_jump(&a, st.l, &f, self.qmax)? {
            None => {
                self.status = ProverStatus::Saturated;
                None
            }
            Some(p) => {
                // every run-start disjunct must exclude the current optimum
                let lq1 = int((st.l * p.q + 1) as i64);
                for i in jump_run_starts(&p) {
                    if &lq1 * &a[i] - &a[0] <= int((st.l * p.p[i]) as i64) {
                        return Err(Error::InvariantViolation(format!(
                            "cut {} does not exclude the optimum",
                            p.row_name(i)
                        )));
                    }
                }
                let rec = encode_cut(&mut st.problem, &p, st.l, self.encoding)?;
                st.cut_log.push(rec.clone());
                Some(rec)
            }
        };
        Ok(StepReport {
            iteration: st.iteration,
            bound: f,
            a,
            cut,
        })
    }

    /// Steps until saturation or until `max_iter` iterations in total.
    pub fn run(&mut self, max_iter: usize, mut on_step: impl FnMut(&StepReport)) -> Result<ProverStatus> {
        while self.status == ProverStatus::Running {
            if self.state.iteration >= max_iter {
                self.status = ProverStatus::Budget;
                break;
            }
            let report = self.step()?;
            on_step(&report);
        }
        Ok(self.status)
    }
}

#[derive(Debug, Clone)]
pub struct ProverRun {
    pub state: ProverState,
    pub status: ProverStatus,
    /// Optimum per iteration of this call.
    pub history: Vec<Rational>,
}

pub fn prove_beta(
    d: u32,
    l: u64,
    max_iter: usize,
    encoding: Encoding,
    state_in: Option<ProverState>,
) -> Result<ProverRun> {
    prove_beta_with(d, l, max_iter, encoding, DEFAULT_QMAX, state_in)
}

pub fn prove_beta_with(
    d: u32,
    l: u64,
    max_iter: usize,
    encoding: Encoding,
    qmax: u64,
    state_in: Option<ProverState>,
) -> Result<ProverRun> {
    let mut prover = match state_in {
        Some(st) => {
            if st.d != d || st.l != l {
                return Err(Error::InvalidInput(format!(
                    "state is for d={} l={}, not d={d} l={l}",
                    st.d, st.l
                )));
            }
            Prover::from_state(st, encoding, qmax)?
        }
        None => Prover::new(d, l, encoding, qmax)?,
    };
    let mut history = Vec::new();
    let status = prover.run(max_iter, |r| history.push(r.bound.clone()))?;
    Ok(ProverRun {
        state: prover.into_state(),
        status,
        history,
    })
}

/// The problem text followed by `meta` and `cut` trailer lines.
pub fn save_state(state: &ProverState) -> String {
    let mut out = write_problem(&state.problem);
    out.push_str(&format!(
        "meta d {} l {} iter {} bound {}\n",
        state.d,
        state.l,
        state.iteration,
        format_rational(&state.bound)
    ));
    for c in &state.cut_log {
        let p: Vec<String> = c.jump.p.iter().map(|v| v.to_string()).collect();
        out.push_str(&format!("cut {} q {} form {} rows {}\n", p.join(" "), c.jump.q, c.form, c.rows.join(" ")));
    }
    out
}

fn parse_num<T: FromStr>(line: usize, s: &str) -> Result<T> {
    s.parse().map_err(|_| Error::parse(line, format!("bad integer `{s}`")))
}

pub fn load_state(text: &str) -> Result<ProverState> {
    let mut meta: Option<(u32, u64, usize, Rational)> = None;
    let mut cuts = Vec::new();
    let problem = read_problem_with(text, |n, toks| {
        match toks[0] {
            "meta" => {
                let ["meta", "d", d, "l", l, "iter", it, "bound", b] = toks[..] else {
                    return Err(Error::parse(n, "expected `meta d <d> l <l> iter <n> bound <r>`"));
                };
                let bound = parse_rational(b).map_err(|_| Error::parse(n, format!("bad number `{b}`")))?;
                meta = Some((parse_num(n, d)?, parse_num(n, l)?, parse_num(n, it)?, bound));
            }
            "cut" => {
                let qpos = toks.iter().position(|&t| t == "q");
                let fpos = toks.iter().position(|&t| t == "form");
                let rpos = toks.iter().position(|&t| t == "rows");
                let (Some(qp), Some(fp), Some(rp)) = (qpos, fpos, rpos) else {
                    return Err(Error::parse(n, "expected `cut <p..> q <q> form <f> rows <names..>`"));
                };
                if fp != qp + 2 || rp != fp + 2 {
                    return Err(Error::parse(n, "malformed cut line"));
                }
                let p: Vec<u64> = toks[1..qp].iter().map(|t| parse_num(n, t)).collect::<Result<_>>()?;
                let q: u64 = parse_num(n, toks[qp + 1])?;
                let form: CutForm = toks[fp + 1].parse().map_err(|_| Error::parse(n, "unknown cut form"))?;
                if p.iter().sum::<u64>() != q {
                    return Err(Error::parse(n, "jump entries do not sum to q"));
                }
                let rows = toks[rp + 1..].iter().map(|s| s.to_string()).collect();
                cuts.push((n, CutRecord { jump: JumpVector { p, q }, form, rows }));
            }
            _ => return Ok(false),
        }
        Ok(true)
    })?;
    let (d, l, iteration, bound) = meta.ok_or_else(|| Error::parse(text.lines().count().max(1), "missing meta line"))?;
    if d == 0 || l == 0 {
        return Err(Error::parse(1, "d and l must be positive"));
    }
    let expected = initial_problem(d);
    for (k, v) in expected.vars().iter().enumerate() {
        if problem.vars().get(k) != Some(v) {
            return Err(Error::InvalidInput(format!("state problem lacks variable {}", v.name)));
        }
    }
    for (n, c) in &cuts {
        if c.jump.p.len() != d as usize + 1 {
            return Err(Error::parse(*n, "jump vector length does not match d"));
        }
        if let Some(r) = c.rows.iter().find(|r| problem.constraint_by_name(r).is_none()) {
            return Err(Error::parse(*n, format!("cut row `{r}` is not in the problem")));
        }
    }
    Ok(ProverState {
        d,
        l,
        problem,
        iteration,
        bound,
        cut_log: cuts.into_iter().map(|(_, c)| c).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::milp::solve_lp;
    use crate::scalar::rat;

    #[test]
    fn initial_problems() {
        for d in 1..=3u32 {
            let p = initial_problem(d);
            assert_eq!(p.vars().len(), d as usize + 1);
            assert_eq!(p.constraints().len(), d as usize + 1);
            assert_eq!(solve_lp(&p).unwrap().objective, int(0));
        }
    }

    #[test]
    fn section_three_replay() {
        let run = prove_beta(2, 1, 4, Encoding::Log, None).unwrap();
        assert_eq!(run.history, vec![int(0), int(0), rat(1, 11), rat(2, 19)]);
        let jumps: Vec<Vec<u64>> = run.state.cut_log.iter().map(|c| c.jump.p.clone()).collect();
        assert_eq!(jumps, vec![vec![0, 0, 1], vec![0, 1, 1], vec![0, 1, 2], vec![0, 2, 3]]);
        let c = run.state.problem.constraint_by_name("r_0_0_1_2").unwrap();
        assert_eq!(c.rhs, int(1));
    }

    #[test]
    fn one_dimensional_saturation() {
        // [-(l+1), 1] has deepest depth 1/(l+2), so nothing larger is a valid bound
        for l in 1..=4u64 {
            let run = prove_beta(1, l, 50, Encoding::Log, None).unwrap();
            assert_eq!(run.status, ProverStatus::Saturated);
            assert_eq!(run.state.bound, rat(1, l as i64 + 2));
            let seg = crate::geometry::LatticeSimplex::from_i64(&[&[-(l as i64) - 1], &[1]]).unwrap();
            let (_, m) = crate::lattice::deepest_point_bruteforce(&seg, l).unwrap();
            assert_eq!(m, run.state.bound);
        }
    }

    #[test]
    fn state_round_trip_and_resume() {
        let full = prove_beta(2, 1, 8, Encoding::Log, None).unwrap();
        let half = prove_beta(2, 1, 4, Encoding::Log, None).unwrap();
        let text = save_state(&half.state);
        let loaded = load_state(&text).unwrap();
        assert_eq!(save_state(&loaded), text);
        let rest = prove_beta(2, 1, 8, Encoding::Log, Some(loaded)).unwrap();
        assert_eq!(rest.state.cut_log, full.state.cut_log);
        assert_eq!(rest.state.bound, full.state.bound);
        assert!(matches!(load_state(&text.replace("meta d 2", "meta d x")), Err(Error::Parse { .. })));
    }
}
