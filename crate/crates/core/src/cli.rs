//! Command-line front end. Each subcommand parses its inputs, calls one
//! library entry point and prints `key=value` lines.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{ArgGroup, CommandFactory, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;

use crate::bounds::{
    beta_upper, build_B, build_S, closed_form_bounds, hensley_bound, mahler_bound, s3k1_bound, s_volume_floor,
    BoundReport,
};
use crate::error::{Error, Result};
use crate::geometry::{
    ca_polytope, read_vertices, simplex_volume, to_scalar_point, write_vertices, LatticePoint, LatticePolytope,
    LatticeSimplex,
};
use crate::jump::{
    deep_point_polytope, deep_point_simplex_trace, gamma, greedy_ascent, polytope_target, Ascent, DEFAULT_QMAX,
};
use crate::lattice::{blichfeldt_check, deepest_point_bruteforce, interior_sublattice_points, lattice_points_closed};
use crate::milp::{read_problem, solve_lp, solve_milp};
use crate::prover::{load_state, save_state, Encoding, Prover, DEFAULT_MAX_ITER};
use crate::scalar::{format_rational, format_with_decimal};
use crate::Rational;

const GRAMMARS: &str = "\
Vertex files:
  dim <d>
  <x_1> ... <x_d>            one vertex per line, integers
  Blank lines and text after `#` are ignored. Trailing `key=value` lines
  (as printed by `family`) are ignored, so family output can be read back.

MILP files (solve, and the body of a state file):
  milp v1
  var <name> continuous|binary <lo> <hi>      lo may be -inf, hi may be inf
  min <var> <coef> <var> <coef> ...          optional, at most once
  con <name> <=|>=|= <rhs> : <var> <coef> ...
  Numbers are integers or num/den. Lines starting with `#` are ignored.

State files (prove-beta --state-out / --resume):
  a MILP file, then
  meta d <d> l <l> iter <n> bound <num/den>
  cut <p_0> ... <p_d> q <q> form direct|plain|log rows <row names>
  with one `cut` line per generated cut, in order.

Exit status: 0 success, 1 domain or input error, 2 usage error.";

#[derive(Debug, Parser)]
#[command(
    name = "plattice",
    version,
    about = "Exact lattice-polytope tools and a certified prover for lower bounds on beta(d,l)",
    after_long_help = GRAMMARS
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Family {
    #[value(name = "B")]
    B,
    #[value(name = "S")]
    S,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    /// `jump` for simplices, `polytope` otherwise.
    Auto,
    /// Exhaustive search over I_l(S).
    Brute,
    /// Lagarias–Ziegler ascent until depth gamma(d,l).
    Jump,
    /// Repeated exact next-jump search until no improving jump exists.
    Greedy,
    /// Ascent over a generator representation in a polytope.
    Polytope,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// List I_l(P), the interior points with all coordinates divisible by l.
    Enumerate {
        /// Vertex file.
        file: PathBuf,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
        l: u64,
        /// List all lattice points of the closed polytope instead.
        #[arg(long)]
        closed: bool,
    },
    /// Find a deep point of I_l(P).
    DeepPoint {
        /// Vertex file.
        file: PathBuf,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
        l: u64,
        /// Start point as comma-separated integers; defaults to the
        /// lexicographically first point of I_l(P).
        #[arg(long, allow_hyphen_values = true)]
        start: Option<String>,
        #[arg(long, value_enum, default_value_t = Method::Auto)]
        method: Method,
    },
    /// Run the constraint-generation prover for a lower bound on beta(d,l).
    ProveBeta {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        d: u32,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        l: u64,
        /// Total iteration budget, counting iterations of a resumed state.
        #[arg(long, default_value_t = DEFAULT_MAX_ITER)]
        max_iter: usize,
        #[arg(long, default_value_t = Encoding::Log)]
        encoding: Encoding,
        /// Write the state here when the run stops.
        #[arg(long)]
        state_out: Option<PathBuf>,
        /// Continue from a saved state.
        #[arg(long)]
        resume: Option<PathBuf>,
        /// Largest jump size q searched per iteration.
        #[arg(long, default_value_t = DEFAULT_QMAX, value_parser = clap::value_parser!(u64).range(1..))]
        qmax: u64,
    },
    /// Print a member of the extremal families B_{d,l} or S_{d,k,l}.
    Family {
        #[arg(value_enum)]
        which: Family,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        d: u32,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        l: u64,
        /// Number of interior points (S only).
        #[arg(long, required_if_eq("which", "S"), value_parser = clap::value_parser!(u64).range(1..))]
        k: Option<u64>,
    },
    /// Volume bounds: closed forms for (d, k, l), or the H83, Mahler and
    /// Blichfeldt checks for a polytope and one of its interior points.
    #[command(group(ArgGroup::new("input").required(true).args(["d", "file"])))]
    Bounds {
        #[arg(long, requires = "k", conflicts_with_all = ["file", "point"], value_parser = clap::value_parser!(u32).range(1..))]
        d: Option<u32>,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        k: Option<u64>,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
        l: u64,
        /// Vertex file.
        #[arg(long, requires = "point")]
        file: Option<PathBuf>,
        /// Point of I_l(P) as comma-separated integers.
        #[arg(long, allow_hyphen_values = true)]
        point: Option<String>,
    },
    /// The d = 3, l = 1 volume bound per interior point.
    S3k1,
    /// Solve a MILP file exactly.
    Solve {
        file: PathBuf,
        /// Solve the LP relaxation only.
        #[arg(long)]
        relax: bool,
    },
}

fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
}

fn read_polytope(path: &Path) -> Result<LatticePolytope> {
    let (dim, points) = read_vertices(&read_file(path)?)?;
    if points.len() <= dim {
        return Err(Error::NotFullDimensional);
    }
    LatticePolytope::hull(points)
}

fn parse_point(text: &str, dim: usize) -> Result<LatticePoint> {
    let p = text
        .split(',')
        .map(|t| t.trim().parse::<BigInt>().map_err(|_| Error::InvalidNumber(t.to_string())))
        .collect::<Result<LatticePoint>>()?;
    if p.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: p.len(),
        });
    }
    Ok(p)
}

fn point_text(p: &[BigInt]) -> String {
    p.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn bound_line(r: &BoundReport) -> String {
    let mut s = format!("{}={}", r.kind, format_with_decimal(&r.value));
    if let Some(ok) = r.ok {
        s.push_str(&format!("\n{}_ok={ok}", r.kind));
    }
    s
}

type Out<'a> = &'a mut dyn Write;

fn emit(out: Out, text: impl AsRef<str>) -> Result<()> {
    writeln!(out, "{}", text.as_ref()).map_err(|e| Error::InvalidInput(format!("write failed: {e}")))
}

fn enumerate(out: Out, file: &Path, l: u64, closed: bool) -> Result<()> {
    let p = read_polytope(file)?;
    let points = if closed {
        lattice_points_closed(&p)
    } else {
        interior_sublattice_points(&p, l).points
    };
    for q in &points {
        emit(out, q.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" "))?;
    }
    emit(out, format!("count={}", points.len()))
}

fn emit_path(out: Out, path: &[(LatticePoint, Rational)]) -> Result<()> {
    for (k, (p, m)) in path.iter().enumerate() {
        emit(out, format!("step={k} point={} m={}", point_text(p), format_rational(m)))?;
    }
    Ok(())
}

fn emit_ascent(out: Out, a: &Ascent) -> Result<()> {
    emit_path(out, &a.path)?;
    emit(out, format!("point={}", point_text(&a.point)))?;
    emit(out, format!("m={}", format_with_decimal(&a.m)))
}

fn deep_point(out: Out, file: &Path, l: u64, start: Option<&str>, method: Method) -> Result<()> {
    let p = read_polytope(file)?;
    let simplex = p.as_simplex();
    let method = match (method, &simplex) {
        (Method::Auto, Some(_)) => Method::Jump,
        (Method::Auto, None) => Method::Polytope,
        (Method::Brute | Method::Jump | Method::Greedy, None) => {
            return Err(Error::InvalidInput("this method needs a simplex".into()))
        }
        (m, _) => m,
    };
    let start = match start {
        Some(s) => parse_point(s, p.dim())?,
        None => interior_sublattice_points(&p, l)
            .points
            .into_iter()
            .next()
            .ok_or(Error::EmptyInterior)?,
    };
    let d = p.dim() as u32;
    match (method, simplex) {
        (Method::Brute, Some(s)) => {
            let (w, m) = deepest_point_bruteforce(&s, l)?;
            emit(out, format!("point={}", point_text(&w)))?;
            emit(out, format!("m={}", format_with_decimal(&m)))
        }
        (Method::Jump, Some(s)) => {
            emit(out, format!("gamma={}", format_with_decimal(&gamma(d, l))))?;
            emit_ascent(out, &deep_point_simplex_trace(&s, l, &start)?)
        }
        (Method::Greedy, Some(s)) => emit_ascent(out, &greedy_ascent(&s, l, &start, DEFAULT_QMAX)?),
        _ => {
            let r = deep_point_polytope(&p, l, &start)?;
            let n = r.representation.generators.len();
            emit(out, format!("generators={n}"))?;
            emit(out, format!("target={}", format_with_decimal(&polytope_target(n, l))))?;
            emit_path(out, &r.path)?;
            emit(out, format!("point={}", point_text(&r.point)))?;
            emit(out, format!("m={}", format_with_decimal(&r.m)))?;
            let ca = ca_polytope(&p, &to_scalar_point::<Rational>(&r.point))?;
            emit(out, format!("ca={}", format_with_decimal(&ca)))?;
            emit(out, format!("ca_bound={}", format_with_decimal(&r.ca_bound)))
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn prove_beta(
    out: Out,
    d: u32,
    l: u64,
    max_iter: usize,
    encoding: Encoding,
    state_out: Option<&Path>,
    resume: Option<&Path>,
    qmax: u64,
) -> Result<()> {
    let mut prover = match resume {
        Some(path) => {
            let st = load_state(&read_file(path)?)?;
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
    let mut io = Ok(());
    let status = prover.run(max_iter, |r| {
        let cut = r.cut.as_ref().map_or_else(|| "none".to_string(), |c| c.rows.join(","));
        if io.is_ok() {
            io = emit(
                out,
                format!("iter={} bound={} cut={cut}", r.iteration, format_with_decimal(&r.bound)),
            );
        }
    })?;
    io?;
    let st = prover.state();
    if let Some(path) = state_out {
        write_file(path, &save_state(st))?;
    }
    emit(out, format!("status={status}"))?;
    emit(out, format!("iterations={}", st.iteration))?;
    emit(out, format!("cuts={}", st.cut_log.len()))?;
    emit(out, format!("bound={}", format_with_decimal(&st.bound)))
}

fn family(out: Out, which: Family, d: u32, l: u64, k: Option<u64>) -> Result<()> {
    let s: LatticeSimplex = match (which, k) {
        (Family::B, None) => build_B(d, l)?,
        (Family::S, Some(k)) => build_S(d, k, l)?,
        _ => unreachable!("checked during argument parsing"),
    };
    write!(out, "{}", write_vertices(s.dim(), s.vertices())).map_err(|e| Error::InvalidInput(e.to_string()))?;
    let pts = interior_sublattice_points(&s.to_polytope(), l);
    emit(out, format!("interior_points={}", pts.len()))?;
    emit(out, format!("volume={}", format_with_decimal(&simplex_volume(&s))))?;
    let (w, m) = deepest_point_bruteforce(&s, l)?;
    emit(out, format!("deepest_point={}", point_text(&w)))?;
    emit(out, format!("deepest_m={}", format_with_decimal(&m)))
}

fn closed_bounds(out: Out, d: u32, k: u64, l: u64) -> Result<()> {
    let (p, s) = closed_form_bounds(d, k, l);
    emit(out, bound_line(&p))?;
    emit(out, bound_line(&s))?;
    emit(out, format!("s_volume_floor={}", format_with_decimal(&s_volume_floor(d, k, l))))?;
    if d >= 2 {
        emit(out, format!("beta_upper={}", format_with_decimal(&beta_upper(d, l)?)))?;
    }
    Ok(())
}

fn point_bounds(out: Out, file: &Path, point: &str, l: u64) -> Result<()> {
    let p = read_polytope(file)?;
    let w = parse_point(point, p.dim())?;
    if let Some(s) = p.as_simplex() {
        emit(out, bound_line(&hensley_bound(&s, &w, l)?))?;
    }
    emit(out, bound_line(&mahler_bound(&p, &w, l)?))?;
    let b = blichfeldt_check(&p);
    emit(out, format!("blichfeldt_count={}", b.count))?;
    emit(out, format!("blichfeldt={}", format_with_decimal(&b.bound)))?;
    emit(out, format!("blichfeldt_ok={}", b.ok))
}

fn s3k1(out: Out) -> Result<()> {
    let r = s3k1_bound()?;
    for (i, (v, prod)) in r.branch_minima.iter().enumerate() {
        let coords: Vec<String> = v.iter().map(format_rational).collect();
        emit(out, format!("branch{i}_vertex=({})", coords.join(",")))?;
        emit(out, format!("branch{i}_product={}", format_with_decimal(prod)))?;
    }
    emit(out, format!("min_alpha1={}", format_with_decimal(&r.min_alpha1)))?;
    emit(out, format!("min_product={}", format_with_decimal(&r.min_product)))?;
    emit(out, format!("bound_per_k={}", format_with_decimal(&r.bound_per_k)))
}

fn solve(out: Out, file: &Path, relax: bool) -> Result<()> {
    let problem = read_problem(&read_file(file)?)?;
    let sol = if relax { solve_lp(&problem)? } else { solve_milp(&problem)? };
    emit(out, format!("status={}", sol.status))?;
    emit(out, format!("nodes={}", sol.nodes))?;
    if sol.is_optimal() {
        emit(out, format!("objective={}", format_with_decimal(&sol.objective)))?;
        for (v, x) in problem.vars().iter().zip(&sol.values) {
            emit(out, format!("{}={}", v.name, format_rational(x)))?;
        }
    }
    Ok(())
}

fn validate(cli: Cli) -> std::result::Result<Cli, clap::Error> {
    if let Command::Family {
        which: Family::B,
        k: Some(_),
        ..
    } = cli.command
    {
        let mut cmd = Cli::command();
        cmd.build();
        let sub = cmd.find_subcommand_mut("family").expect("defined");
        return Err(sub.error(ErrorKind::ArgumentConflict, "--k applies to family S only"));
    }
    Ok(cli)
}

fn dispatch(command: Command, out: Out) -> Result<()> {
    match command {
        Command::Enumerate { file, l, closed } => enumerate(out, &file, l, closed),
        Command::DeepPoint {
            file,
            l,
            start,
            method,
        } => deep_point(out, &file, l, start.as_deref(), method),
        Command::ProveBeta {
            d,
            l,
            max_iter,
            encoding,
            state_out,
            resume,
            qmax,
        } => prove_beta(out, d, l, max_iter, encoding, state_out.as_deref(), resume.as_deref(), qmax),
        Command::Family { which, d, l, k } => family(out, which, d, l, k),
        Command::Bounds {
            d,
            k,
            l,
            file,
            point,
        } => match (d, k, file, point) {
            (Some(d), Some(k), None, None) => closed_bounds(out, d, k, l),
            (None, _, Some(file), Some(point)) => point_bounds(out, &file, &point, l),
            _ => unreachable!("argument groups admit no other combination"),
        },
        Command::S3k1 => s3k1(out),
        Command::Solve { file, relax } => solve(out, &file, relax),
    }
}

/// Runs one invocation; returns the process exit status.
pub fn run<I, A>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = A>,
    A: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args).and_then(validate) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    0
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    2
                }
            };
        }
    };
    match dispatch(cli.command, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn command_definition_is_consistent() {
        Cli::command().debug_assert();
    }
}
