#![allow(dead_code)]

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use plattice::bounds::{build_B, build_S};
use plattice::geometry::{lattice_point, LatticePoint, LatticePolytope, LatticeSimplex};
use plattice::Rational;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn random_point(rng: &mut impl Rng, d: usize, r: i64) -> LatticePoint {
    (0..d).map(|_| BigInt::from(rng.gen_range(-r..=r))).collect()
}

pub fn random_simplex(rng: &mut impl Rng, d: usize, r: i64) -> LatticeSimplex {
    loop {
        let v: Vec<LatticePoint> = (0..=d).map(|_| random_point(rng, d, r)).collect();
        if let Ok(s) = LatticeSimplex::new(v) {
            return s;
        }
    }
}

pub fn random_polytope(rng: &mut impl Rng, d: usize, n: usize, r: i64) -> LatticePolytope {
    loop {
        let pts: Vec<LatticePoint> = (0..n).map(|_| random_point(rng, d, r)).collect();
        if let Ok(p) = LatticePolytope::hull(pts) {
            return p;
        }
    }
}

fn simplex(v: &[&[i64]]) -> LatticeSimplex {
    LatticeSimplex::from_i64(v).unwrap()
}

/// Simplices with their sublattice scale: the B and S families, a few
/// hand-picked ones and seeded random ones. Each has a non-empty `I_l`.
pub fn simplex_corpus() -> Vec<(LatticeSimplex, u64)> {
    let mut out = Vec::new();
    for (d, l) in [(2, 1), (2, 2), (3, 1), (3, 2)] {
        out.push((build_B(d, l).unwrap(), l));
    }
    for d in 2..=3 {
        for k in 1..=3 {
            for l in 1..=2 {
                out.push((build_S(d, k, l).unwrap(), l));
            }
        }
    }
    for l in 1..=2i64 {
        out.push((simplex(&[&[0], &[l + 1]]), l as u64));
        out.push((simplex(&[&[-l - 1], &[1]]), l as u64));
    }
    out.push((simplex(&[&[0, 0], &[3, 0], &[0, 3]]), 1));
    out.push((simplex(&[&[-1, -1], &[5, 0], &[0, 4]]), 2));
    out.push((simplex(&[&[0, 0, 0], &[4, 0, 0], &[0, 4, 0], &[0, 0, 4]]), 1));
    out.push((simplex(&[&[-1, -1, -1], &[3, 0, 0], &[0, 3, 0], &[0, 0, 3]]), 1));
    let mut g = rng(7);
    let mut random = 0;
    while random < 14 {
        let d = g.gen_range(1..=3);
        let l = g.gen_range(1..=2);
        let s = random_simplex(&mut g, d, 5);
        if !plattice::lattice::interior_sublattice_points(&s.to_polytope(), l).is_empty() {
            out.push((s, l));
            random += 1;
        }
    }
    out
}

/// Full-dimensional polytopes, mostly non-simplices, with non-empty `I_1`.
pub fn polytope_corpus() -> Vec<LatticePolytope> {
    let mut out = vec![
        LatticePolytope::from_i64(&[&[0, 0], &[4, 0], &[4, 4], &[0, 4]]).unwrap(),
        LatticePolytope::from_i64(&[&[2, 0], &[4, 1], &[4, 3], &[2, 4], &[0, 3], &[0, 1]]).unwrap(),
        LatticePolytope::from_i64(&[&[0, 0], &[6, 0], &[0, 2]]).unwrap(),
        LatticePolytope::from_i64(&[&[0, 0], &[7, 1], &[3, 5], &[-2, 3]]).unwrap(),
        LatticePolytope::hull(
            (0..8)
                .map(|m| lattice_point(&[3 * (m & 1), 3 * ((m >> 1) & 1), 3 * ((m >> 2) & 1)]))
                .collect(),
        )
        .unwrap(),
        LatticePolytope::from_i64(&[
            &[2, 0, 0],
            &[-2, 0, 0],
            &[0, 2, 0],
            &[0, -2, 0],
            &[0, 0, 2],
            &[0, 0, -2],
        ])
        .unwrap(),
    ];
    let mut g = rng(11);
    while out.len() < 16 {
        let d = g.gen_range(2..=3);
        let n = g.gen_range(d + 2..=d + 5);
        let p = random_polytope(&mut g, d, n, 4);
        if !plattice::lattice::interior_sublattice_points(&p, 1).is_empty() {
            out.push(p);
        }
    }
    out
}

/// A row `coeffs . x (sense) rhs` of a tiny LP.
pub type Row = (Vec<Rational>, plattice::milp::Sense, Rational);

fn row_ok(r: &Row, x: &[Rational]) -> bool {
    use plattice::milp::Sense;
    let lhs: Rational = r.0.iter().zip(x).map(|(a, b)| a * b).sum();
    match r.1 {
        Sense::Le => lhs <= r.2,
        Sense::Ge => lhs >= r.2,
        Sense::Eq => lhs == r.2,
    }
}

/// Minimum of `c . x` over a bounded system in at most two variables, by
/// trying every point where `dim` rows are tight. `None` when infeasible.
pub fn tiny_lp_min(rows: &[Row], c: &[Rational], dim: usize) -> Option<Rational> {
    let mut candidates: Vec<Vec<Rational>> = Vec::new();
    match dim {
        0 => candidates.push(Vec::new()),
        1 => {
            for r in rows {
                if r.0[0] != int(0) {
                    candidates.push(vec![&r.2 / &r.0[0]]);
                }
            }
        }
        2 => {
            for (i, r) in rows.iter().enumerate() {
                for s in &rows[i + 1..] {
                    let det = &r.0[0] * &s.0[1] - &r.0[1] * &s.0[0];
                    if det == int(0) {
                        continue;
                    }
                    let x = (&r.2 * &s.0[1] - &r.0[1] * &s.2) / &det;
                    let y = (&r.0[0] * &s.2 - &r.2 * &s.0[0]) / &det;
                    candidates.push(vec![x, y]);
                }
            }
        }
        _ => panic!("tiny_lp_min handles at most two variables"),
    }
    candidates
        .into_iter()
        .filter(|x| rows.iter().all(|r| row_ok(r, x)))
        .map(|x| c.iter().zip(&x).map(|(a, b)| a * b).sum::<Rational>())
        .min()
}

/// A random MILP with `nb` binaries followed by `nc <= 2` continuous
/// variables boxed in `[0, 4]`.
pub fn random_milp(g: &mut impl Rng, nb: usize, nc: usize) -> plattice::Problem {
    use plattice::milp::{Constraint, MilpProblem, Sense, VarKind};
    let mut p = MilpProblem::new();
    for j in 0..nb {
        p.add_binary(&format!("z{j}")).unwrap();
    }
    for j in 0..nc {
        p.add_var(&format!("x{j}"), VarKind::Continuous, Some(int(0)), Some(int(4))).unwrap();
    }
    let n = nb + nc;
    for r in 0..g.gen_range(1..=5) {
        let terms: Vec<(usize, Rational)> = (0..n)
            .map(|j| (j, int(g.gen_range(-3..=3))))
            .filter(|(_, c)| *c != int(0))
            .collect();
        let sense = [Sense::Le, Sense::Le, Sense::Ge, Sense::Eq][g.gen_range(0..4)];
        let rhs = int(g.gen_range(-2..=6));
        p.add_constraint(Constraint::new(&format!("c{r}"), terms, sense, rhs)).unwrap();
    }
    p.set_objective((0..n).map(|j| (j, rat(g.gen_range(-9..=9), g.gen_range(1..=3)))).collect());
    p
}

/// Best objective over all binary assignments, each completed by
/// [`tiny_lp_min`] over the continuous variables.
pub fn milp_bruteforce(p: &plattice::Problem, nb: usize, nc: usize) -> Option<Rational> {
    use plattice::milp::Sense;
    let obj: Vec<Rational> = {
        let mut c = vec![int(0); nb + nc];
        for (j, v) in p.objective() {
            c[*j] += v;
        }
        c
    };
    let mut best: Option<Rational> = None;
    for mask in 0u32..(1 << nb) {
        let z: Vec<Rational> = (0..nb).map(|j| int(((mask >> j) & 1) as i64)).collect();
        let mut rows: Vec<Row> = Vec::new();
        for c in p.constraints() {
            let mut coeffs = vec![int(0); nc];
            let mut rhs = c.rhs.clone();
            for (j, a) in &c.terms {
                if *j < nb {
                    rhs -= a * &z[*j];
                } else {
                    coeffs[*j - nb] += a;
                }
            }
            rows.push((coeffs, c.sense, rhs));
        }
        for k in 0..nc {
            let mut e = vec![int(0); nc];
            e[k] = int(1);
            rows.push((e.clone(), Sense::Ge, int(0)));
            rows.push((e, Sense::Le, int(4)));
        }
        let fixed: Rational = z.iter().zip(&obj).map(|(a, b)| a * b).sum();
        if let Some(v) = tiny_lp_min(&rows, &obj[nb..], nc) {
            let total = fixed + v;
            if best.as_ref().is_none_or(|b| total < *b) {
                best = Some(total);
            }
        }
    }
    best
}
