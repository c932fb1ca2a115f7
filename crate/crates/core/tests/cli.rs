use std::fs;
use std::path::PathBuf;
use std::process::Command;

use plattice::bounds::build_B;
use plattice::geometry::{read_vertices, LatticePolytope, LatticeSimplex};
use plattice::lattice::{deepest_point_bruteforce, interior_sublattice_points};
use plattice::milp::{read_problem, solve_milp};
use plattice::scalar::{format_rational, format_with_decimal};

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut argv = vec!["plattice"];
    argv.extend_from_slice(args);
    let code = plattice::cli::run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn scratch(name: &str, body: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("plattice-cli-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path
}

fn value<'a>(out: &'a str, key: &str) -> &'a str {
    out.lines()
        .find_map(|l| l.strip_prefix(&format!("{key}=")))
        .unwrap_or_else(|| panic!("no `{key}=` in\n{out}"))
}

#[test]
fn prove_beta_replays_four_iterations() {
    let (code, out, _) = run(&["prove-beta", "--d", "2", "--l", "1", "--max-iter", "4"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().last(), Some("bound=2/19 (~0.105263)"));
    let progress: Vec<&str> = out.lines().filter(|l| l.starts_with("iter=")).collect();
    assert_eq!(progress.len(), 4);
    assert_eq!(progress[0], "iter=1 bound=0 (~0.000000) cut=r_0_0_1_2");
    assert_eq!(progress[2], "iter=3 bound=1/11 (~0.090909) cut=r_0_1_2_1,r_0_1_2_2");
}

#[test]
fn family_b_lists_vertices_and_points() {
    let (code, out, _) = run(&["family", "B", "--d", "2", "--l", "1"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("dim 2\n2 0\n0 3\n0 -1\n"));
    assert_eq!(value(&out, "interior_points"), "2");
    let (dim, pts) = read_vertices(&out).unwrap();
    assert_eq!(LatticeSimplex::new(pts).unwrap(), build_B(2, 1).unwrap());
    assert_eq!(dim, 2);
}

#[test]
fn s3k1_prints_the_exact_minimum() {
    let (code, out, _) = run(&["s3k1"]);
    assert_eq!(code, 0);
    assert_eq!(value(&out, "min_product"), "4/343 (~0.011662)");
    assert_eq!(value(&out, "bound_per_k"), "343/24 (~14.291667)");
    assert_eq!(value(&out, "branch1_product"), "352/29791 (~0.011816)");
    assert_eq!(value(&out, "min_alpha1"), "2/31 (~0.064516)");
}

#[test]
fn subcommands_agree_with_the_library() {
    let text = "dim 2\n# a skew triangle\n-1 -1\n7 0\n0 5\n";
    let path = scratch("tri.txt", text);
    let file = path.to_str().unwrap();
    let (_, pts) = read_vertices(text).unwrap();
    let s = LatticeSimplex::new(pts.clone()).unwrap();
    let p = LatticePolytope::hull(pts).unwrap();

    let (code, out, _) = run(&["enumerate", file, "--l", "2"]);
    assert_eq!(code, 0);
    let lib = interior_sublattice_points(&p, 2);
    assert_eq!(value(&out, "count"), lib.len().to_string());

    let (code, out, _) = run(&["deep-point", file, "--method", "brute"]);
    assert_eq!(code, 0);
    let (w, m) = deepest_point_bruteforce(&s, 1).unwrap();
    let w_text: Vec<String> = w.iter().map(|x| x.to_string()).collect();
    assert_eq!(value(&out, "point"), w_text.join(","));
    assert_eq!(value(&out, "m"), format_with_decimal(&m));

    let (code, out, _) = run(&["bounds", "--file", file, "--point", &w_text.join(",")]);
    assert_eq!(code, 0);
    assert_eq!(value(&out, "h83_ok"), "true");
    assert_eq!(value(&out, "mahler_ok"), "true");
    assert_eq!(value(&out, "blichfeldt_ok"), "true");

    let milp = "milp v1\nvar x binary 0 1\nvar y continuous 0 5/2\nmin x -3 y -1\ncon c <= 3 : x 2 y 1\n";
    let mpath = scratch("p.milp", milp);
    let (code, out, _) = run(&["solve", mpath.to_str().unwrap()]);
    assert_eq!(code, 0);
    let sol = solve_milp(&read_problem(milp).unwrap()).unwrap();
    assert_eq!(value(&out, "objective"), format_with_decimal(&sol.objective));
    assert_eq!(value(&out, "y"), format_rational(&sol.values[1]));
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    for args in [
        vec!["prove-beta", "--d", "3", "--l", "1", "--max-iter", "6", "--encoding", "plain"],
        vec!["family", "S", "--d", "3", "--l", "2", "--k", "2"],
        vec!["bounds", "--d", "3", "--k", "2", "--l", "1"],
    ] {
        assert_eq!(run(&args), run(&args));
    }
}

#[test]
fn state_out_and_resume_continue_the_run() {
    let dir = std::env::temp_dir().join(format!("plattice-state-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    let half = dir.join("half.lps");
    let whole = dir.join("whole.lps");
    let resumed = dir.join("resumed.lps");
    let s = |p: &PathBuf| p.to_str().unwrap().to_string();
    assert_eq!(run(&["prove-beta", "--d", "2", "--l", "1", "--max-iter", "5", "--state-out", &s(&half)]).0, 0);
    let (_, direct, _) = run(&["prove-beta", "--d", "2", "--l", "1", "--max-iter", "9", "--state-out", &s(&whole)]);
    let (code, cont, _) = run(&[
        "prove-beta", "--d", "2", "--l", "1", "--max-iter", "9", "--resume", &s(&half), "--state-out", &s(&resumed),
    ]);
    assert_eq!(code, 0);
    assert_eq!(cont.lines().filter(|l| l.starts_with("iter=")).count(), 4);
    assert_eq!(direct.lines().last(), cont.lines().last());
    assert_eq!(fs::read_to_string(&whole).unwrap(), fs::read_to_string(&resumed).unwrap());
    let (code, _, err) = run(&["prove-beta", "--d", "3", "--l", "1", "--resume", &s(&half)]);
    assert_eq!(code, 1);
    assert!(err.contains("state is for d=2"));
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["prove-beta", "--d", "2"]).0, 2);
    assert_eq!(run(&["prove-beta", "--d", "2", "--l", "1", "--bogus"]).0, 2);
    assert_eq!(run(&["prove-beta", "--d", "x", "--l", "1"]).0, 2);
    assert_eq!(run(&["prove-beta", "--d", "2", "--l", "0"]).0, 2);
    assert_eq!(run(&["family", "B", "--d", "2", "--l", "1", "--k", "3"]).0, 2);
    assert_eq!(run(&["family", "S", "--d", "2", "--l", "1"]).0, 2);
    assert_eq!(run(&["nonsense"]).0, 2);
    assert_eq!(run(&["family", "B", "--d", "1", "--l", "1"]).0, 1);
    let flat = scratch("flat.txt", "dim 2\n0 0\n1 1\n2 2\n");
    assert_eq!(run(&["enumerate", flat.to_str().unwrap()]).0, 1);
    let bad = scratch("bad.txt", "dim 2\n0 0\n1\n");
    let (code, _, err) = run(&["enumerate", bad.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(err.contains("line 3"));
    let unit = scratch("unit.txt", "dim 2\n0 0\n1 0\n0 1\n");
    assert_eq!(run(&["deep-point", unit.to_str().unwrap()]).0, 1);
}

#[test]
fn help_documents_the_file_grammars() {
    let (code, out, _) = run(&["--help"]);
    assert_eq!(code, 0);
    for needle in ["dim <d>", "milp v1", "var <name> continuous|binary", "meta d <d> l <l>", "cut <p_0>"] {
        assert!(out.contains(needle), "missing `{needle}`");
    }
}

#[test]
fn binary_exit_status() {
    let bin = env!("CARGO_BIN_EXE_plattice");
    let ok = Command::new(bin).args(["bounds", "--d", "2", "--k", "1", "--l", "1"]).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("beta_upper=1/8 (~0.125000)"));
    let usage = Command::new(bin).args(["bounds", "--k", "1"]).output().unwrap();
    assert_eq!(usage.status.code(), Some(2));
    assert!(!usage.stderr.is_empty());
    let domain = Command::new(bin).args(["family", "B", "--d", "1", "--l", "1"]).output().unwrap();
    assert_eq!(domain.status.code(), Some(1));
}
