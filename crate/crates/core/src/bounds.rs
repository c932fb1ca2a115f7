//! The extremal families `B_{d,l}`, `S_{d,k,l}` and closed-form bound
//! evaluators, each paired with an exact check where one applies.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::geometry::{
    barycentric, ca_polytope, polytope_volume, simplex_volume, to_scalar_point, vertex_enumerate,
    LatticePoint, LatticePolytope, LatticeSimplex, LinearConstraint, Point,
};
use crate::lattice::interior_sublattice_points;
use crate::milp::Sense;
use crate::scalar::{factorial, int, pow_rational};
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TSequence {
    pub d: u32,
    pub l: u64,
    /// `t_1 .. t_d`.
    pub values: Vec<BigInt>,
}

impl TSequence {
    pub fn last(&self) -> &BigInt {
        self.values.last().expect("d >= 1")
    }
}

/// `t_1 = l+1`, `t_(i+1) = t_i^2 - t_i + 1`.
pub fn t_sequence(d: u32, l: u64) -> TSequence {
    assert!(d >= 1 && l >= 1, "t_sequence needs d, l >= 1");
    let mut values = vec![BigInt::from(l + 1)];
    while values.len() < d as usize {
        let t = values.last().expect("non-empty");
        values.push(t * t - t + 1);
    }
    if d >= 2 {
        let floor = BigInt::from(l + 1).pow(1u32 << (d - 2)) + 1;
        assert!(values[d as usize - 1] >= floor, "t-sequence growth bound");
    }
    TSequence { d, l, values }
}

fn axis(d: usize, i: usize, scale: BigInt) -> LatticePoint {
    let mut v = vec![BigInt::zero(); d];
    v[i] = scale;
    v
}

/// `conv{t_1 e_1, ..., t_d e_d, -e_d}`.
#[allow(non_snake_case)]
pub fn build_B(d: u32, l: u64) -> Result<LatticeSimplex> {
    if d < 2 {
        return Err(Error::DimensionTooSmall(d as usize));
    }
    let t = t_sequence(d, l);
    let n = d as usize;
    let mut vertices: Vec<LatticePoint> = (0..n).map(|i| axis(n, i, t.values[i].clone())).collect();
    vertices.push(axis(n, n - 1, BigInt::from(-1)));
    LatticeSimplex::new(vertices)
}

/// `conv{0, t_1 e_1, ..., t_(d-1) e_(d-1), (k+1)(t_d - 1) e_d}`.
#[allow(non_snake_case)]
pub fn build_S(d: u32, k: u64, l: u64) -> Result<LatticeSimplex> {
    if k == 0 {
        return Err(Error::InvalidInput("k must be positive".into()));
    }
    let t = t_sequence(d, l);
    let n = d as usize;
    let mut vertices = vec![vec![BigInt::zero(); n]];
    for i in 0..n - 1 {
        vertices.push(axis(n, i, t.values[i].clone()));
    }
    vertices.push(axis(n, n - 1, BigInt::from(k + 1) * (t.last() - 1)));
    LatticeSimplex::new(vertices)
}

/// `l / (t_(d,l)^2 - 1)`, checked against `l (l+1)^(-2^(d-1))`.
pub fn beta_upper(d: u32, l: u64) -> Result<Rational> {
    if d < 2 {
        return Err(Error::DimensionTooSmall(d as usize));
    }
    let t = t_sequence(d, l);
    let last = t.last();
    let value = Rational::new(BigInt::from(l), last * last - 1);
    let coarse = int(l as i64) * pow_rational(&int((l + 1) as i64), -(1i64 << (d - 1)));
    if value > coarse {
        return Err(Error::InvariantViolation("beta upper bound exceeds its closed form".into()));
    }
    Ok(value)
}

/// `(k+1)(l+1)^(2^(d-1)) / (d! l)`, the volume floor of the `S` family.
pub fn s_volume_floor(d: u32, k: u64, l: u64) -> Rational {
    let num = BigInt::from(k + 1) * BigInt::from(l + 1).pow(1u32 << (d - 1));
    Rational::new(num, factorial(d) * BigInt::from(l))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    H83,
    Mahler,
    PClosed,
    SClosed,
    BetaUpper,
    S3k1,
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundKind::H83 => "h83",
            BoundKind::Mahler => "mahler",
            BoundKind::PClosed => "p_closed",
            BoundKind::SClosed => "s_closed",
            BoundKind::BetaUpper => "beta_upper",
            BoundKind::S3k1 => "s3k1",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub kind: BoundKind,
    pub value: Rational,
    pub inputs: String,
    /// Result of the associated check, when there is one.
    pub ok: Option<bool>,
}

fn require_interior(p: &LatticePolytope, w: &[BigInt], l: u64) -> Result<usize> {
    let pts = interior_sublattice_points(p, l);
    if !pts.contains(w) {
        return Err(Error::NotInterior);
    }
    Ok(pts.len())
}

fn point_text(w: &[BigInt]) -> String {
    let parts: Vec<String> = w.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(","))
}

/// `l^d |I_l(S)| / (d! prod alpha_i)` over all coordinates but the
/// smallest; `ok` when it bounds `vol(S)`.
pub fn hensley_bound(s: &LatticeSimplex, w: &[BigInt], l: u64) -> Result<BoundReport> {
    let k = require_interior(&s.to_polytope(), w, l)?;
    let d = s.dim();
    let mut alphas = barycentric(s, &to_scalar_point::<Rational>(w))?.alphas;
    alphas.sort();
    let prod: Rational = alphas[1..].iter().fold(Rational::one(), |acc, a| acc * a);
    let num = BigInt::from(l).pow(d as u32) * BigInt::from(k);
    let value = Rational::from_integer(num) / (prod * Rational::from_integer(factorial(d as u32)));
    let ok = simplex_volume(s) <= value;
    Ok(BoundReport {
        kind: BoundKind::H83,
        value,
        inputs: format!("w={} l={l}", point_text(w)),
        ok: Some(ok),
    })
}

/// `(l (ca(w,P) + 1))^d |I_l(P)|`; `ok` when it bounds `vol(P)`.
pub fn mahler_bound(p: &LatticePolytope, w: &[BigInt], l: u64) -> Result<BoundReport> {
    let k = require_interior(p, w, l)?;
    let ca = ca_polytope(p, &to_scalar_point::<Rational>(w))?;
    let base = int(l as i64) * (ca + int(1));
    let value = pow_rational(&base, p.dim() as i64) * int(k as i64);
    let ok = polytope_volume(p) <= value;
    Ok(BoundReport {
        kind: BoundKind::Mahler,
        value,
        inputs: format!("w={} l={l}", point_text(w)),
        ok: Some(ok),
    })
}

/// `(p, s)` closed forms:
/// `p <= (8dl)^d (8l+7)^(d 2^(2d+1)) k` and
/// `s <= 2^(3d-2) l^d (8l+7)^((d-1) 2^(d+1)) k / d!`.
pub fn closed_form_bounds(d: u32, k: u64, l: u64) -> (BoundReport, BoundReport) {
    let inputs = format!("d={d} k={k} l={l}");
    let base = BigInt::from(8 * l + 7);
    let p = BigInt::from(8 * d as u64 * l).pow(d) * base.pow(d * (1u32 << (2 * d + 1))) * BigInt::from(k);
    let s_num = BigInt::from(2).pow(3 * d - 2)
        * BigInt::from(l).pow(d)
        * base.pow((d - 1) * (1u32 << (d + 1)))
        * BigInt::from(k);
    let s = Rational::new(s_num, factorial(d));
    (
        BoundReport {
            kind: BoundKind::PClosed,
            value: Rational::from_integer(p),
            inputs: inputs.clone(),
            ok: None,
        },
        BoundReport {
            kind: BoundKind::SClosed,
            value: s,
            inputs,
            ok: None,
        },
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct S3k1Report {
    /// Minimum of `alpha_1 alpha_2 alpha_3` over both branches.
    pub min_product: Rational,
    /// `1 / (3! min_product)`.
    pub bound_per_k: Rational,
    pub min_alpha1: Rational,
    /// Per branch: the minimizing vertex and its product.
    pub branch_minima: Vec<(Point<Rational>, Rational)>,
    pub vertices: Vec<Vec<Point<Rational>>>,
}

impl S3k1Report {
    pub fn report(&self) -> BoundReport {
        BoundReport {
            kind: BoundKind::S3k1,
            value: self.bound_per_k.clone(),
            inputs: String::new(),
            ok: None,
        }
    }
}

fn row(c: [i64; 4], sense: Sense, rhs: i64) -> LinearConstraint<Rational> {
    LinearConstraint::new(c.iter().map(|&x| int(x)).collect(), sense, int(rhs))
}

/// Minimizes `alpha_1 alpha_2 alpha_3` over the two branch polytopes in
/// `(alpha_0..alpha_3)` space by enumerating their vertices; the product
/// of non-negative linear forms is quasi-concave, so a vertex attains it.
pub fn s3k1_bound() -> Result<S3k1Report> {
    let base = vec![
        row([1, 1, 1, 1], Sense::Eq, 1),
        row([1, 0, 0, 0], Sense::Ge, 0),
        row([1, -1, 0, 0], Sense::Le, 0),
        row([0, 1, -1, 0], Sense::Le, 0),
        row([0, 0, 1, -1], Sense::Le, 0),
        row([-1, 0, 0, 2], Sense::Le, 1),
        row([-1, 0, 3, 0], Sense::Le, 1),
    ];
    let branches = [row([-1, 0, 4, 0], Sense::Le, 1), row([-1, 0, 0, 4], Sense::Le, 2)];
    let mut min_product: Option<Rational> = None;
    let mut min_alpha1: Option<Rational> = None;
    let mut all = Vec::new();
    let mut branch_minima = Vec::new();
    for extra in branches {
        let mut cons = base.clone();
        cons.push(extra);
        let verts = vertex_enumerate(&cons, 4)?;
        let mut branch: Option<(Point<Rational>, Rational)> = None;
        for v in &verts {
            let prod = &v[1] * &v[2] * &v[3];
            if branch.as_ref().is_none_or(|(_, m)| prod < *m) {
                branch = Some((v.clone(), prod.clone()));
            }
            if min_product.as_ref().is_none_or(|m| prod < *m) {
                min_product = Some(prod);
            }
            if min_alpha1.as_ref().is_none_or(|m| v[1] < *m) {
                min_alpha1 = Some(v[1].clone());
            }
        }
        branch_minima.push(branch.ok_or_else(|| Error::InvariantViolation("empty branch polytope".into()))?);
        all.push(verts);
    }
    let min_product = min_product.ok_or_else(|| Error::InvariantViolation("empty branch polytopes".into()))?;
    let bound_per_k = (&min_product * int(6)).recip();
    Ok(S3k1Report {
        min_product,
        bound_per_k,
        min_alpha1: min_alpha1.expect("non-empty"),
        branch_minima,
        vertices: all,
    })
}
