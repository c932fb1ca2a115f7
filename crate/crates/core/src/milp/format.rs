//! Line-oriented text format for [`MilpProblem`].
//!
//! ```text
//! milp v1
//! var <name> continuous|binary <lo> <hi>      lo may be -inf, hi may be inf
//! min <var> <coef> <var> <coef> ...
//! con <name> <=|>=|= <rhs> : <var> <coef> ...
//! ```
//!
//! Numbers are integers or `num/den`. Blank lines and lines starting with
//! `#` are skipped. Variables must be declared before use; the `min` line
//! is optional and at most one may appear.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::scalar::{format_rational, parse_rational};
use crate::Rational;

use super::{Constraint, MilpProblem, Sense, VarKind};

pub const HEADER: &str = "milp v1";

fn bound(b: &Option<Rational>, infinite: &str) -> String {
    b.as_ref().map_or_else(|| infinite.to_string(), format_rational)
}

fn terms_text(problem: &MilpProblem, terms: &[(usize, Rational)]) -> String {
    let mut out = String::new();
    for (j, c) in terms {
        let _ = write!(out, " {} {}", problem.vars()[*j].name, format_rational(c));
    }
    out
}

pub fn write_problem(problem: &MilpProblem) -> String {
    let mut out = String::new();
    out.push_str(HEADER);
    out.push('\n');
    for v in problem.vars() {
        let _ = writeln!(
            out,
            "var {} {} {} {}",
            v.name,
            v.kind,
            bound(&v.lower, "-inf"),
            bound(&v.upper, "inf")
        );
    }
    let _ = writeln!(out, "min{}", terms_text(problem, problem.objective()));
    for c in problem.constraints() {
        let _ = writeln!(
            out,
            "con {} {} {} :{}",
            c.name,
            c.sense,
            format_rational(&c.rhs),
            terms_text(problem, &c.terms)
        );
    }
    out
}

fn number(line: usize, s: &str) -> Result<Rational> {
    parse_rational(s).map_err(|_| Error::parse(line, format!("bad number `{s}`")))
}

fn parse_terms(problem: &MilpProblem, line: usize, toks: &[&str]) -> Result<Vec<(usize, Rational)>> {
    if !toks.len().is_multiple_of(2) {
        return Err(Error::parse(line, "terms must be <var> <coef> pairs"));
    }
    toks.chunks(2)
        .map(|pair| {
            let j = problem
                .var_by_name(pair[0])
                .ok_or_else(|| Error::parse(line, format!("unknown variable `{}`", pair[0])))?;
            Ok((j, number(line, pair[1])?))
        })
        .collect()
}

/// Parses the problem section of `text`. Lines the problem grammar does not
/// know are handed to `extra` (with their 1-based line number); without a
/// handler they are errors.
pub(crate) fn read_problem_with(
    text: &str,
    mut extra: impl FnMut(usize, &[&str]) -> Result<bool>,
) -> Result<MilpProblem> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    let header = lines.by_ref().find(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    match header {
        Some((_, HEADER)) => {}
        Some((_, l)) if l.starts_with("milp ") => return Err(Error::VersionMismatch(l.to_string())),
        Some((n, _)) => return Err(Error::parse(n, format!("expected `{HEADER}`"))),
        None => return Err(Error::parse(1, "empty input")),
    }
    let mut problem = MilpProblem::new();
    let mut seen_min = false;
    for (n, l) in lines {
        if l.is_empty() || l.starts_with('#') {
            continue;
        }
        let toks: Vec<&str> = l.split_whitespace().collect();
        match toks[0] {
            "var" => {
                let [_, name, kind, lo, hi] = toks[..] else {
                    return Err(Error::parse(n, "expected `var <name> <kind> <lo> <hi>`"));
                };
                let kind = match kind {
                    "continuous" => VarKind::Continuous,
                    "binary" => VarKind::Binary,
                    other => return Err(Error::parse(n, format!("unknown kind `{other}`"))),
                };
                let lo = if lo == "-inf" { None } else { Some(number(n, lo)?) };
                let hi = if hi == "inf" { None } else { Some(number(n, hi)?) };
                problem
                    .add_var(name, kind, lo, hi)
                    .map_err(|e| Error::parse(n, e.to_string()))?;
            }
            "min" => {
                if seen_min {
                    return Err(Error::parse(n, "duplicate objective"));
                }
                seen_min = true;
                let terms = parse_terms(&problem, n, &toks[1..])?;
                problem.set_objective(terms);
            }
            "con" => {
                if toks.len() < 5 || toks[4] != ":" {
                    return Err(Error::parse(n, "expected `con <name> <sense> <rhs> : ...`"));
                }
                let sense = match toks[2] {
                    "<=" => Sense::Le,
                    ">=" => Sense::Ge,
                    "=" => Sense::Eq,
                    other => return Err(Error::parse(n, format!("unknown sense `{other}`"))),
                };
                let rhs = number(n, toks[3])?;
                let terms = parse_terms(&problem, n, &toks[5..])?;
                problem
                    .add_constraint(Constraint::new(toks[1], terms, sense, rhs))
                    .map_err(|e| Error::parse(n, e.to_string()))?;
            }
            _ => {
                if !extra(n, &toks)? {
                    return Err(Error::parse(n, format!("unknown directive `{}`", toks[0])));
                }
            }
        }
    }
    Ok(problem)
}

pub fn read_problem(text: &str) -> Result<MilpProblem> {
    read_problem_with(text, |_, _| Ok(false))
}
