//! Jumps `w -> (lq+1) w - sum l p_i v_i` between sublattice interior points.
//!
//! The Lagarias–Ziegler approximation drives the guaranteed ascent; the
//! exact `next_jump` search is the cut generator used by the prover and
//! also powers a greedy ascent.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::geometry::{
    barycentric, ca_polytope, combine, contains, max_volume_simplex, ray_exit, to_scalar_point,
    Containment, LatticePoint, LatticePolytope, LatticeSimplex,
};
use crate::lattice::in_sublattice;
use crate::milp::{solve_lp, Constraint, MilpProblem, Sense, Status};
use crate::scalar::{floor_strict, int, pow_rational};
use crate::Rational;

pub const DEFAULT_QMAX: u64 = 1000;

/// `(7(lambda+1))^(-2^(n+1))`.
pub fn delta(n: u32, lambda: &Rational) -> Rational {
    let base = int(7) * (lambda + int(1));
    pow_rational(&base, -(1i64 << (n + 1)))
}

/// `delta(d, 8l/7) / 8`.
pub fn gamma(d: u32, l: u64) -> Rational {
    delta(d, &lambda_for(l)) / int(8)
}

pub fn lambda_for(l: u64) -> Rational {
    Rational::new(BigInt::from(8 * l), BigInt::from(7))
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct JumpVector {
    pub p: Vec<u64>,
    pub q: u64,
}

impl JumpVector {
    pub fn new(p: Vec<u64>) -> Self {
        let q = p.iter().sum();
        Self { p, q }
    }

    /// `r_<p0>_..._<pd>_<i>` row name for the disjunct at index `i`.
    pub fn row_name(&self, i: usize) -> String {
        let mut s = String::from("r");
        for v in &self.p {
            s.push('_');
            s.push_str(&v.to_string());
        }
        format!("{s}_{i}")
    }
}

fn to_u64(n: &BigInt) -> u64 {
    n.to_u64().expect("cap fits in u64")
}

/// Lex-smallest `p` with `0 <= p_i <= caps_i` and `sum p = q`, if any.
fn lex_smallest(caps: &[u64], q: u64) -> Option<Vec<u64>> {
    if caps.iter().sum::<u64>() < q {
        return None;
    }
    let mut p = vec![0; caps.len()];
    let mut rest = q;
    for i in (0..caps.len()).rev() {
        p[i] = caps[i].min(rest);
        rest -= p[i];
    }
    Some(p)
}

fn cap(r: &Rational) -> u64 {
    let c = floor_strict(r);
    if c.is_negative() {
        0
    } else {
        to_u64(&c)
    }
}

/// Smallest `Q`, then lex-smallest `P`, with `sum P = Q`,
/// `alpha_i > lambda P_i / (lambda Q + 1)` and `lambda Q + 1 <= 1/delta`.
///
/// Fails with `NoApproximation` when the precondition
/// `1 - delta(n, lambda) < sum alpha <= 1` does not hold or the search
/// exhausts the ceiling.
pub fn lz_approximate(alphas: &[Rational], lambda: &Rational) -> Result<JumpVector> {
    let n = alphas.len();
    if n == 0 || alphas.iter().any(|a| !a.is_positive()) || *lambda < int(1) {
        return Err(Error::InvalidInput("lz_approximate needs positive alphas and lambda >= 1".into()));
    }
    let d = delta(n as u32, lambda);
    let sum: Rational = alphas.iter().sum();
    if sum > int(1) || sum <= int(1) - &d {
        return Err(Error::NoApproximation);
    }
    let ceiling = d.recip();
    let mut q = 1u64;
    loop {
        let lq1 = lambda * int(q as i64) + int(1);
        if lq1 > ceiling {
            return Err(Error::NoApproximation);
        }
        let caps: Vec<u64> = alphas.iter().map(|a| cap(&(a * &lq1 / lambda))).collect();
        if let Some(p) = lex_smallest(&caps, q) {
            return Ok(JumpVector { p, q });
        }
        q += 1;
    }
}

/// `(lq+1) w - sum l p_i g_i`.
pub fn jump_point(generators: &[LatticePoint], w: &[BigInt], p: &JumpVector, l: u64) -> LatticePoint {
    let scale = BigInt::from(l * p.q + 1);
    let mut out: Vec<BigInt> = w.iter().map(|x| x * &scale).collect();
    for (g, &pi) in generators.iter().zip(&p.p) {
        if pi == 0 {
            continue;
        }
        let f = BigInt::from(l * pi);
        for (o, x) in out.iter_mut().zip(g) {
            *o -= &f * x;
        }
    }
    out
}

/// Representation coefficients after a jump: `(lq+1) alpha_i - l p_i`.
pub fn jump_coefficients(alphas: &[Rational], p: &JumpVector, l: u64) -> Vec<Rational> {
    let scale = int((l * p.q + 1) as i64);
    alphas
        .iter()
        .zip(&p.p)
        .map(|(a, &pi)| a * &scale - int((l * pi) as i64))
        .collect()
}

/// Indices `i >= 1` with `p_i > p_(i-1)`.
pub fn jump_run_starts(p: &JumpVector) -> Vec<usize> {
    (1..p.p.len()).filter(|&i| p.p[i] > p.p[i - 1]).collect()
}

/// Exact cut search: smallest `q <= qmax`, then lex-smallest `p`, such
/// that `(lq+1) a_i - l p_i > a_0` for every `i` (entries with `a_i = 0`
/// and `p_i = 0` excepted) and `p_0 < q f`.
pub fn next_jump(a: &[Rational], l: u64, f: &Rational, qmax: u64) -> Result<Option<JumpVector>> {
    if a.is_empty() || l == 0 {
        return Err(Error::InvalidInput("next_jump needs a non-empty vector and l >= 1".into()));
    }
    if a.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InputNotSorted);
    }
    if a.iter().sum::<Rational>() != int(1) {
        return Err(Error::SumNotOne);
    }
    let lr = int(l as i64);
    let a0 = &a[0];
    for q in 1..=qmax {
        let qr = int(q as i64);
        let mut caps = Vec::with_capacity(a.len());
        caps.push(cap(&(&qr * f)));
        for ai in &a[1..] {
            caps.push(cap(&(&qr * ai + (ai - a0) / &lr)));
        }
        let Some(p) = lex_smallest(&caps, q) else {
            continue;
        };
        let lq1 = int((l * q + 1) as i64);
        let good = a.iter().zip(&p).all(|(ai, &pi)| {
            (ai.is_zero() && pi == 0) || &lq1 * ai - int((l * pi) as i64) > *a0
        });
        if good {
            return Ok(Some(JumpVector { p, q }));
        }
    }
    Ok(None)
}

/// A visited sequence of interior points with their depth values.
#[derive(Debug, Clone, PartialEq)]
pub struct Ascent {
    pub point: LatticePoint,
    pub m: Rational,
    /// Start first; each later entry is the result of one jump.
    pub path: Vec<(LatticePoint, Rational)>,
}

fn min_of(v: &[Rational]) -> Rational {
    v.iter().min().cloned().expect("non-empty")
}

fn ascending_order(coeffs: &[Rational]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..coeffs.len()).collect();
    idx.sort_by(|&x, &y| coeffs[x].cmp(&coeffs[y]).then(x.cmp(&y)));
    idx
}

/// One Lagarias–Ziegler step on a coefficient vector: the tail above the
/// split is approximated and jumped. Splits are tried starting with the
/// one where coefficients cross `8 target`; a jump must keep every
/// coefficient positive and raise the minimum.
fn lz_step(coeffs: &[Rational], l: u64, target: &Rational) -> Option<(JumpVector, Vec<Rational>)> {
    let order = ascending_order(coeffs);
    let eight = target * int(8);
    let canonical = order.iter().filter(|&&i| coeffs[i] < eight).count().max(1) - 1;
    let lambda = lambda_for(l);
    let old_min = min_of(coeffs);
    let splits = std::iter::once(canonical).chain((0..coeffs.len() - 1).filter(move |&j| j != canonical));
    for j in splits {
        let tail: Vec<Rational> = order[j + 1..].iter().map(|&i| coeffs[i].clone()).collect();
        let Ok(jv) = lz_approximate(&tail, &lambda) else {
            continue;
        };
        let mut p = vec![0u64; coeffs.len()];
        for (k, &i) in order[j + 1..].iter().enumerate() {
            p[i] = jv.p[k];
        }
        let full = JumpVector { p, q: jv.q };
        let next = jump_coefficients(coeffs, &full, l);
        if next.iter().all(|c| c.is_positive()) && min_of(&next) > old_min {
            return Some((full, next));
        }
    }
    None
}

fn check_start(p: &LatticePolytope, start: &[BigInt], l: u64) -> Result<()> {
    if start.len() != p.dim()
        || !in_sublattice(start, l)
        || !contains(p, &to_scalar_point::<Rational>(start), Containment::Strict)
    {
        return Err(Error::StartNotInterior);
    }
    Ok(())
}

/// Jumps over fixed generators while the smallest coefficient is below
/// `target`.
fn ascend(
    generators: &[LatticePoint],
    start: &[BigInt],
    mut coeffs: Vec<Rational>,
    l: u64,
    target: &Rational,
) -> Result<(Ascent, Vec<Rational>)> {
    let mut point = start.to_vec();
    let mut m = min_of(&coeffs);
    let mut path = vec![(point.clone(), m.clone())];
    while m < *target {
        let (jv, next) = lz_step(&coeffs, l, target)
            .ok_or_else(|| Error::InvariantViolation("no improving jump below the target depth".into()))?;
        point = jump_point(generators, &point, &jv, l);
        coeffs = next;
        m = min_of(&coeffs);
        path.push((point.clone(), m.clone()));
    }
    Ok((Ascent { point, m, path }, coeffs))
}

/// Ascent of the existence proof: returns a point of `I_l(S)` whose depth
/// is at least `gamma(d, l)`.
pub fn deep_point_simplex(s: &LatticeSimplex, l: u64, start: &[BigInt]) -> Result<(LatticePoint, Rational)> {
    let a = deep_point_simplex_trace(s, l, start)?;
    Ok((a.point, a.m))
}

pub fn deep_point_simplex_trace(s: &LatticeSimplex, l: u64, start: &[BigInt]) -> Result<Ascent> {
    check_start(&s.to_polytope(), start, l)?;
    let coeffs = barycentric(s, &to_scalar_point::<Rational>(start))?.alphas;
    let target = gamma(s.dim() as u32, l);
    Ok(ascend(s.vertices(), start, coeffs, l, &target)?.0)
}

/// Repeats the exact `next_jump` search on the sorted barycentric
/// coordinates until no jump with `q <= qmax` exists. Every step raises the
/// depth strictly.
pub fn greedy_ascent(s: &LatticeSimplex, l: u64, start: &[BigInt], qmax: u64) -> Result<Ascent> {
    check_start(&s.to_polytope(), start, l)?;
    let mut point = start.to_vec();
    let mut coeffs = barycentric(s, &to_scalar_point::<Rational>(start))?.alphas;
    let mut m = min_of(&coeffs);
    let mut path = vec![(point.clone(), m.clone())];
    loop {
        let order = ascending_order(&coeffs);
        let sorted: Vec<Rational> = order.iter().map(|&i| coeffs[i].clone()).collect();
        let Some(jv) = next_jump(&sorted, l, &sorted[0], qmax)? else {
            break;
        };
        let mut p = vec![0u64; coeffs.len()];
        for (k, &i) in order.iter().enumerate() {
            p[i] = jv.p[k];
        }
        let full = JumpVector { p, q: jv.q };
        point = jump_point(s.vertices(), &point, &full, l);
        coeffs = jump_coefficients(&coeffs, &full, l);
        let next_m = min_of(&coeffs);
        if next_m <= m {
            return Err(Error::InvariantViolation("greedy jump did not raise the depth".into()));
        }
        m = next_m;
        path.push((point.clone(), m.clone()));
    }
    Ok(Ascent { point, m, path })
}

/// A point written as a positive convex combination of polytope vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorRepresentation {
    pub generators: Vec<LatticePoint>,
    pub coeffs: Vec<Rational>,
    pub point: Vec<Rational>,
}

impl GeneratorRepresentation {
    pub fn min_coeff(&self) -> Rational {
        min_of(&self.coeffs)
    }

    fn check(&self) -> Result<()> {
        let ok = self.coeffs.iter().sum::<Rational>() == int(1)
            && self.coeffs.iter().all(|c| c.is_positive())
            && combine(&self.generators, &self.coeffs) == self.point;
        if ok {
            Ok(())
        } else {
            Err(Error::InvariantViolation("generator representation does not reproduce the point".into()))
        }
    }
}

/// Positive convex combination of at most `2d+1` vertices of `p`,
/// containing every vertex of a maximum-volume simplex `S`.
///
/// Points inside `int(S)` use their barycentric coordinates in `S`.
/// Otherwise the ray from the centroid of `S` through `u` is followed to
/// the boundary point `u_2`, which is written over affinely independent
/// vertices of its minimal face (a basic solution of the face LP), and the
/// two representations are mixed.
pub fn generator_representation(p: &LatticePolytope, u: &[Rational]) -> Result<GeneratorRepresentation> {
    if u.len() != p.dim() || !contains(p, u, Containment::Strict) {
        return Err(Error::NotInterior);
    }
    let (s, s_idx) = max_volume_simplex(p)?;
    let d = p.dim();
    let bary = barycentric(&s, u)?;
    if bary.alphas.iter().all(|a| a.is_positive()) {
        let rep = GeneratorRepresentation {
            generators: s.vertices().to_vec(),
            coeffs: bary.alphas,
            point: u.to_vec(),
        };
        rep.check()?;
        return Ok(rep);
    }

    let u1 = s.centroid();
    let dir: Vec<Rational> = u.iter().zip(&u1).map(|(a, b)| a - b).collect();
    let t = ray_exit(p, &u1, &dir).ok_or(Error::NotInterior)?;
    let u2: Vec<Rational> = u1.iter().zip(&dir).map(|(a, b)| a + b * &t).collect();
    let share = t.recip();

    let tight: Vec<_> = p.facets().iter().filter(|h| h.slack(&u2).is_zero()).collect();
    let face: Vec<usize> = (0..p.vertices().len())
        .filter(|&i| tight.iter().all(|h| h.is_tight_at(&p.vertices()[i])))
        .collect();

    let mut lp = MilpProblem::<Rational>::new();
    let vars: Vec<usize> = face
        .iter()
        .map(|i| lp.add_continuous(&format!("v{i}")).expect("fresh name"))
        .collect();
    lp.add_constraint(Constraint::new("sum", vars.iter().map(|&v| (v, int(1))).collect(), Sense::Eq, int(1)))?;
    for k in 0..d {
        let terms = face
            .iter()
            .zip(&vars)
            .map(|(&i, &v)| (v, Rational::from_integer(p.vertices()[i][k].clone())))
            .collect();
        lp.add_constraint(Constraint::new(&format!("x{k}"), terms, Sense::Eq, u2[k].clone()))?;
    }
    let sol = solve_lp(&lp)?;
    if sol.status != Status::Optimal {
        return Err(Error::InvariantViolation("boundary point is not in its face".into()));
    }

    let base = (int(1) - &share) / int((d + 1) as i64);
    let mut generators: Vec<LatticePoint> = s.vertices().to_vec();
    let mut coeffs = vec![base; d + 1];
    for (&i, &v) in face.iter().zip(&vars) {
        let lam = &sol.values[v];
        if lam.is_zero() {
            continue;
        }
        let c = lam * &share;
        match s_idx.iter().position(|&j| j == i) {
            Some(k) => coeffs[k] += c,
            None => {
                generators.push(p.vertices()[i].clone());
                coeffs.push(c);
            }
        }
    }
    let rep = GeneratorRepresentation {
        generators,
        coeffs,
        point: u.to_vec(),
    };
    rep.check()?;
    if rep.generators.len() > 2 * d + 1 {
        return Err(Error::InvariantViolation("more than 2d+1 generators".into()));
    }
    Ok(rep)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeepPolytopePoint {
    pub point: LatticePoint,
    /// Smallest coefficient of the final representation.
    pub m: Rational,
    /// `d/m - 1`, an upper bound on the coefficient of asymmetry.
    pub ca_bound: Rational,
    pub representation: GeneratorRepresentation,
    pub path: Vec<(LatticePoint, Rational)>,
}

/// Depth target for a representation with `generators` entries:
/// `delta(generators - 2, 8l/7) / 8`.
pub fn polytope_target(generators: usize, l: u64) -> Rational {
    delta(generators.saturating_sub(2) as u32, &lambda_for(l)) / int(8)
}

/// Ascent over a fixed generator set from `start`; the result carries the
/// bound `ca(w, P) <= d/m(w) - 1`, which is verified exactly.
pub fn deep_point_polytope(p: &LatticePolytope, l: u64, start: &[BigInt]) -> Result<DeepPolytopePoint> {
    check_start(p, start, l)?;
    let rep = generator_representation(p, &to_scalar_point::<Rational>(start))?;
    let target = polytope_target(rep.generators.len(), l);
    let (ascent, coeffs) = ascend(&rep.generators, start, rep.coeffs.clone(), l, &target)?;
    let point_r = to_scalar_point::<Rational>(&ascent.point);
    let representation = GeneratorRepresentation {
        generators: rep.generators,
        coeffs,
        point: point_r.clone(),
    };
    representation.check()?;
    let d = int(p.dim() as i64);
    let ca_bound = d / &ascent.m - int(1);
    let ca = ca_polytope(p, &point_r)?;
    if ca > ca_bound {
        return Err(Error::InvariantViolation(format!("ca {ca} exceeds d/m - 1 = {ca_bound}")));
    }
    Ok(DeepPolytopePoint {
        point: ascent.point,
        m: ascent.m,
        ca_bound,
        representation,
        path: ascent.path,
    })
}
