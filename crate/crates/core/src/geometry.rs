//! Exact convex geometry for full-dimensional lattice polytopes.
//!
//! Vertices are integer points ([`LatticePoint`]); query points are generic
//! over [`Scalar`]. Facets are found by brute force over `d`-subsets of the
//! vertex list, which is intended for desk-scale inputs (a dozen or so
//! vertices in dimension at most four): the cost is `C(n, d)` determinant
//! evaluations.

use std::collections::HashSet;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::{self, dot_integer};
use crate::milp::{solve_lp, Constraint, MilpProblem, Sense, Status, VarKind};
use crate::scalar::{factorial, Scalar};
use crate::Rational;

pub type LatticePoint = Vec<BigInt>;
pub type Point<T> = Vec<T>;

pub fn lattice_point(coords: &[i64]) -> LatticePoint {
    coords.iter().map(|&c| BigInt::from(c)).collect()
}

pub fn to_scalar_point<T: Scalar>(p: &[BigInt]) -> Point<T> {
    p.iter().map(T::from_integer).collect()
}

/// Closed or strict (interior) membership.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Containment {
    Closed,
    Strict,
}

/// `{x : normal . x <= offset}` with a primitive integer normal.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Halfspace {
    pub normal: Vec<BigInt>,
    pub offset: BigInt,
}

impl Halfspace {
    /// `offset - normal . x`; non-negative inside.
    pub fn slack<T: Scalar>(&self, x: &[T]) -> T {
        let lhs = self
            .normal
            .iter()
            .zip(x)
            .fold(T::zero(), |acc, (n, v)| acc + T::from_integer(n) * v.clone());
        T::from_integer(&self.offset) - lhs
    }

    pub fn normal_dot<T: Scalar>(&self, y: &[T]) -> T {
        self.normal
            .iter()
            .zip(y)
            .fold(T::zero(), |acc, (n, v)| acc + T::from_integer(n) * v.clone())
    }

    pub fn contains<T: Scalar>(&self, x: &[T], mode: Containment) -> bool {
        let s = self.slack(x);
        match mode {
            Containment::Closed => !s.is_negative(),
            Containment::Strict => s.is_positive(),
        }
    }

    pub fn is_tight_at(&self, p: &[BigInt]) -> bool {
        dot_integer(&self.normal, p) == self.offset
    }
}

impl fmt::Display for Halfspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self.normal.iter().map(|n| n.to_string()).collect();
        write!(f, "[{}] . x <= {}", terms.join(" "), self.offset)
    }
}

/// A full-dimensional lattice simplex in `R^d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeSimplex {
    vertices: Vec<LatticePoint>,
}

impl LatticeSimplex {
    pub fn new(vertices: Vec<LatticePoint>) -> Result<Self> {
        let d = vertices.len().checked_sub(1).ok_or(Error::NotFullDimensional)?;
        if d == 0 {
            return Err(Error::NotFullDimensional);
        }
        for v in &vertices {
            if v.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: v.len(),
                });
            }
        }
        let refs: Vec<&[BigInt]> = vertices.iter().map(Vec::as_slice).collect();
        if linalg::simplex_det_abs(&refs).is_zero() {
            return Err(Error::NotFullDimensional);
        }
        Ok(Self { vertices })
    }

    pub fn from_i64(vertices: &[&[i64]]) -> Result<Self> {
        Self::new(vertices.iter().map(|v| lattice_point(v)).collect())
    }

    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn vertices(&self) -> &[LatticePoint] {
        &self.vertices
    }

    pub fn to_polytope(&self) -> LatticePolytope {
        LatticePolytope::new(self.vertices.clone()).expect("a simplex is a valid polytope")
    }

    pub fn centroid(&self) -> Point<Rational> {
        centroid(&self.vertices)
    }
}

/// A full-dimensional lattice polytope given by its vertices (input order is
/// kept; it is the index order used for every tie-break).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticePolytope {
    dim: usize,
    vertices: Vec<LatticePoint>,
    facets: Vec<Halfspace>,
}

impl LatticePolytope {
    /// Builds the polytope; every point must be a vertex of the hull.
    pub fn new(vertices: Vec<LatticePoint>) -> Result<Self> {
        let hull = Self::hull(vertices.clone())?;
        if hull.vertices.len() != vertices.len() {
            return Err(Error::InvalidInput(
                "listed point is not a vertex of the convex hull".into(),
            ));
        }
        Ok(hull)
    }

    /// Convex hull of `points`: non-extreme points and duplicates are dropped,
    /// the remaining order is preserved.
    pub fn hull(points: Vec<LatticePoint>) -> Result<Self> {
        let dim = points.first().map(Vec::len).ok_or(Error::NotFullDimensional)?;
        if let Some(bad) = points.iter().find(|p| p.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: bad.len(),
            });
        }
        let mut seen = HashSet::new();
        let points: Vec<LatticePoint> = points.into_iter().filter(|p| seen.insert(p.clone())).collect();
        let facets = facet_halfspaces(&points)?;
        let vertices: Vec<LatticePoint> = points
            .into_iter()
            .filter(|p| {
                let normals: Vec<Vec<Rational>> = facets
                    .iter()
                    .filter(|h| h.is_tight_at(p))
                    .map(|h| to_scalar_point(&h.normal))
                    .collect();
                linalg::rank(&normals) == dim
            })
            .collect();
        Ok(Self {
            dim,
            vertices,
            facets,
        })
    }

    pub fn from_i64(vertices: &[&[i64]]) -> Result<Self> {
        Self::new(vertices.iter().map(|v| lattice_point(v)).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[LatticePoint] {
        &self.vertices
    }

    pub fn facets(&self) -> &[Halfspace] {
        &self.facets
    }

    pub fn is_simplex(&self) -> bool {
        self.vertices.len() == self.dim + 1
    }

    pub fn as_simplex(&self) -> Option<LatticeSimplex> {
        if self.is_simplex() {
            LatticeSimplex::new(self.vertices.clone()).ok()
        } else {
            None
        }
    }

    /// Integer bounding box `(lo, hi)` per coordinate.
    pub fn bounding_box(&self) -> (Vec<BigInt>, Vec<BigInt>) {
        let mut lo = self.vertices[0].clone();
        let mut hi = self.vertices[0].clone();
        for v in &self.vertices[1..] {
            for (k, c) in v.iter().enumerate() {
                if c < &lo[k] {
                    lo[k] = c.clone();
                }
                if c > &hi[k] {
                    hi[k] = c.clone();
                }
            }
        }
        (lo, hi)
    }
}

impl From<&LatticeSimplex> for LatticePolytope {
    fn from(s: &LatticeSimplex) -> Self {
        s.to_polytope()
    }
}

/// Barycentric coordinates `(alpha_0..alpha_d)` of a point in a simplex.
#[derive(Debug, Clone, PartialEq)]
pub struct BarycentricCoords<T> {
    pub alphas: Vec<T>,
}

impl<T: Scalar> BarycentricCoords<T> {
    pub fn min(&self) -> T {
        self.alphas
            .iter()
            .skip(1)
            .fold(self.alphas[0].clone(), |m, a| if *a < m { a.clone() } else { m })
    }

    /// Reconstructs `sum alpha_i v_i`.
    pub fn point(&self, s: &LatticeSimplex) -> Point<T> {
        combine(s.vertices(), &self.alphas)
    }
}

/// `sum coeffs_i * gens_i`.
pub fn combine<T: Scalar>(gens: &[LatticePoint], coeffs: &[T]) -> Point<T> {
    let d = gens[0].len();
    let mut out = vec![T::zero(); d];
    for (g, c) in gens.iter().zip(coeffs) {
        for (o, x) in out.iter_mut().zip(g) {
            *o = o.clone() + c.clone() * T::from_integer(x);
        }
    }
    out
}

pub fn centroid(points: &[LatticePoint]) -> Point<Rational> {
    let n = Rational::from_integer(BigInt::from(points.len()));
    let w = vec![Rational::one() / n; points.len()];
    combine(points, &w)
}

fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}

/// Solves the affine system `sum alpha_i v_i = x`, `sum alpha_i = 1`.
pub fn barycentric<T: Scalar>(s: &LatticeSimplex, x: &[T]) -> Result<BarycentricCoords<T>> {
    let d = s.dim();
    check_dim(d, x.len())?;
    let mut a = vec![vec![T::zero(); d + 1]; d + 1];
    for (i, v) in s.vertices().iter().enumerate() {
        for k in 0..d {
            a[k][i] = T::from_integer(&v[k]);
        }
        a[d][i] = T::one();
    }
    let mut b = x.to_vec();
    b.push(T::one());
    let alphas = linalg::solve(a, b).ok_or(Error::NotFullDimensional)?;
    Ok(BarycentricCoords { alphas })
}

/// Smallest barycentric coordinate; positive iff `x` is interior.
pub fn min_barycentric<T: Scalar>(s: &LatticeSimplex, x: &[T]) -> Result<T> {
    Ok(barycentric(s, x)?.min())
}

pub fn simplex_volume(s: &LatticeSimplex) -> Rational {
    let refs: Vec<&[BigInt]> = s.vertices().iter().map(Vec::as_slice).collect();
    Rational::new(linalg::simplex_det_abs(&refs), factorial(s.dim() as u32))
}

/// Facets of `conv(points)` by brute force over `d`-subsets; duplicates are
/// removed via the primitive normal. Order follows the first subset (in
/// lexicographic index order) that spans each facet.
pub fn facet_halfspaces(points: &[LatticePoint]) -> Result<Vec<Halfspace>> {
    let d = points.first().map(Vec::len).ok_or(Error::NotFullDimensional)?;
    let refs: Vec<&[BigInt]> = points.iter().map(Vec::as_slice).collect();
    if d == 0 || points.len() <= d || linalg::affine_dimension(&refs) != Some(d) {
        return Err(Error::NotFullDimensional);
    }
    let mut seen = HashSet::new();
    let mut facets = Vec::new();
    for subset in Combinations::new(points.len(), d) {
        let chosen: Vec<&[BigInt]> = subset.iter().map(|&i| refs[i]).collect();
        let Some(normal) = linalg::hyperplane_normal(&chosen) else {
            continue;
        };
        let offset = dot_integer(&normal, chosen[0]);
        let (mut below, mut above) = (false, false);
        for p in &refs {
            let v = dot_integer(&normal, p);
            below |= v < offset;
            above |= v > offset;
        }
        let h = match (below, above) {
            (true, false) => Halfspace { normal, offset },
            (false, true) => Halfspace {
                normal: normal.into_iter().map(|n| -n).collect(),
                offset: -offset,
            },
            _ => continue,
        };
        if seen.insert(h.clone()) {
            facets.push(h);
        }
    }
    if facets.is_empty() {
        return Err(Error::NotFullDimensional);
    }
    Ok(facets)
}

pub fn contains<T: Scalar>(p: &LatticePolytope, x: &[T], mode: Containment) -> bool {
    x.len() == p.dim() && p.facets().iter().all(|h| h.contains(x, mode))
}

/// Parameter `t > 0` at which `origin + t * direction` leaves the polytope.
/// `None` for a zero direction.
pub fn ray_exit<T: Scalar>(p: &LatticePolytope, origin: &[T], direction: &[T]) -> Option<T> {
    let mut best: Option<T> = None;
    for h in p.facets() {
        let rate = h.normal_dot(direction);
        if !rate.is_positive() {
            continue;
        }
        let t = h.slack(origin) / rate;
        if best.as_ref().is_none_or(|b| t < *b) {
            best = Some(t);
        }
    }
    best
}

/// Coefficient of asymmetry of an interior point, via vertex directions:
/// the max over vertices `v` of `1 / t*(v)` where `t*(v)` is where the ray
/// `w + t (w - v)` exits.
pub fn ca_polytope<T: Scalar>(p: &LatticePolytope, w: &[T]) -> Result<T> {
    check_dim(p.dim(), w.len())?;
    if !contains(p, w, Containment::Strict) {
        return Err(Error::NotInterior);
    }
    let mut best = T::zero();
    for v in p.vertices() {
        let dir: Vec<T> = w
            .iter()
            .zip(v)
            .map(|(a, b)| a.clone() - T::from_integer(b))
            .collect();
        let t = ray_exit(p, w, &dir).ok_or(Error::NotInterior)?;
        let ratio = T::one() / t;
        if ratio > best {
            best = ratio;
        }
    }
    Ok(best)
}

/// Whether every vertex of `p` lies in `(-d) S + (d+1) s`, `s` the centroid
/// of `S`; by convexity this certifies the covering of `p`.
pub fn negative_homothety_check(p: &LatticePolytope, s: &LatticeSimplex) -> bool {
    let d = s.dim();
    let c = s.centroid();
    let scale = Rational::from_integer(BigInt::from(d));
    let shift = Rational::from_integer(BigInt::from(d + 1));
    // image vertex: -d v_i + (d+1) c; barycentric in the image of x equals
    // barycentric in S of the preimage (x - (d+1) c) / (-d)
    p.vertices().iter().all(|v| {
        let pre: Vec<Rational> = v
            .iter()
            .zip(&c)
            .map(|(x, ci)| (Rational::from_integer(x.clone()) - &shift * ci) / -&scale)
            .collect();
        barycentric(s, &pre)
            .map(|b| b.alphas.iter().all(|a| !a.is_negative()))
            .unwrap_or(false)
    })
}

/// A maximum-volume simplex on the vertices of `p`, lex-first by index.
/// Exhaustive over `(d+1)`-subsets.
pub fn max_volume_simplex(p: &LatticePolytope) -> Result<(LatticeSimplex, Vec<usize>)> {
    let refs: Vec<&[BigInt]> = p.vertices().iter().map(Vec::as_slice).collect();
    let mut best: Option<(BigInt, Vec<usize>)> = None;
    for subset in Combinations::new(refs.len(), p.dim() + 1) {
        let chosen: Vec<&[BigInt]> = subset.iter().map(|&i| refs[i]).collect();
        let det = linalg::simplex_det_abs(&chosen);
        if det.is_zero() {
            continue;
        }
        if best.as_ref().is_none_or(|(b, _)| det > *b) {
            best = Some((det, subset));
        }
    }
    let (_, idx) = best.ok_or(Error::NotFullDimensional)?;
    let simplex = LatticeSimplex::new(idx.iter().map(|&i| p.vertices()[i].clone()).collect())?;
    Ok((simplex, idx))
}

/// Pulling triangulation: simplices as vertex-index lists.
pub fn triangulate(p: &LatticePolytope) -> Vec<Vec<usize>> {
    let facet_sets: Vec<Vec<usize>> = p
        .facets()
        .iter()
        .map(|h| {
            (0..p.vertices().len())
                .filter(|&i| h.is_tight_at(&p.vertices()[i]))
                .collect()
        })
        .collect();
    let all: Vec<usize> = (0..p.vertices().len()).collect();
    pull(p, &all, p.dim(), &facet_sets)
}

fn pull(p: &LatticePolytope, face: &[usize], dim: usize, facet_sets: &[Vec<usize>]) -> Vec<Vec<usize>> {
    if dim == 0 {
        return vec![vec![face[0]]];
    }
    let apex = *face
        .iter()
        .min_by(|&&a, &&b| p.vertices()[a].cmp(&p.vertices()[b]))
        .expect("non-empty face");
    let mut subfaces: Vec<Vec<usize>> = Vec::new();
    for g in facet_sets {
        let sub: Vec<usize> = face.iter().copied().filter(|i| g.contains(i)).collect();
        if sub.contains(&apex) || sub.len() < dim || subfaces.contains(&sub) {
            continue;
        }
        let refs: Vec<&[BigInt]> = sub.iter().map(|&i| p.vertices()[i].as_slice()).collect();
        if linalg::affine_dimension(&refs) == Some(dim - 1) {
            subfaces.push(sub);
        }
    }
    let mut out = Vec::new();
    for sub in subfaces {
        for mut simplex in pull(p, &sub, dim - 1, facet_sets) {
            simplex.insert(0, apex);
            out.push(simplex);
        }
    }
    out
}

/// Volume via the pulling triangulation from the lexicographically first
/// vertex.
pub fn polytope_volume(p: &LatticePolytope) -> Rational {
    let mut total = BigInt::zero();
    for simplex in triangulate(p) {
        let refs: Vec<&[BigInt]> = simplex.iter().map(|&i| p.vertices()[i].as_slice()).collect();
        total += linalg::simplex_det_abs(&refs);
    }
    Rational::new(total, factorial(p.dim() as u32))
}

/// A linear constraint `coeffs . x (sense) rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearConstraint<T> {
    pub coeffs: Vec<T>,
    pub sense: Sense,
    pub rhs: T,
}

impl<T: Scalar> LinearConstraint<T> {
    pub fn new(coeffs: Vec<T>, sense: Sense, rhs: T) -> Self {
        Self { coeffs, sense, rhs }
    }

    pub fn satisfied_by(&self, x: &[T]) -> bool {
        let lhs = linalg::dot(&self.coeffs, x);
        match self.sense {
            Sense::Le => lhs <= self.rhs,
            Sense::Ge => lhs >= self.rhs,
            Sense::Eq => lhs == self.rhs,
        }
    }
}

impl From<&Halfspace> for LinearConstraint<Rational> {
    fn from(h: &Halfspace) -> Self {
        LinearConstraint::new(to_scalar_point(&h.normal), Sense::Le, Rational::from_integer(h.offset.clone()))
    }
}

/// All vertices of `{x in R^dim : constraints}`: points where `dim`
/// linearly independent constraints (all equalities among them) are tight
/// and every constraint holds. Sorted lexicographically, duplicate-free.
/// Boundedness is checked with one LP per coordinate direction.
pub fn vertex_enumerate(constraints: &[LinearConstraint<Rational>], dim: usize) -> Result<Vec<Point<Rational>>> {
    for c in constraints {
        check_dim(dim, c.coeffs.len())?;
    }
    if dim == 0 {
        return Ok(Vec::new());
    }
    match bounded_check(constraints, dim)? {
        Boundedness::Empty => return Ok(Vec::new()),
        Boundedness::Unbounded => return Err(Error::Unbounded),
        Boundedness::Bounded => {}
    }
    let (eqs, ineqs): (Vec<&LinearConstraint<Rational>>, Vec<&LinearConstraint<Rational>>) =
        constraints.iter().partition(|c| c.sense == Sense::Eq);
    let eq_rank = linalg::rank(&eqs.iter().map(|c| c.coeffs.clone()).collect::<Vec<_>>());
    if eq_rank > dim || eq_rank < eqs.len() {
        // dependent equalities: keep an independent subset
        return vertex_enumerate(&reduce_equalities(constraints), dim);
    }
    let need = dim - eq_rank;
    let mut out: Vec<Point<Rational>> = Vec::new();
    for subset in Combinations::new(ineqs.len(), need) {
        let mut rows: Vec<Vec<Rational>> = eqs.iter().map(|c| c.coeffs.clone()).collect();
        let mut rhs: Vec<Rational> = eqs.iter().map(|c| c.rhs.clone()).collect();
        for &i in &subset {
            rows.push(ineqs[i].coeffs.clone());
            rhs.push(ineqs[i].rhs.clone());
        }
        let Some(x) = linalg::solve(rows, rhs) else {
            continue;
        };
        if constraints.iter().all(|c| c.satisfied_by(&x)) {
            out.push(x);
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

fn reduce_equalities(constraints: &[LinearConstraint<Rational>]) -> Vec<LinearConstraint<Rational>> {
    let mut kept: Vec<LinearConstraint<Rational>> = Vec::new();
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    for c in constraints {
        if c.sense == Sense::Eq {
            let mut trial = rows.clone();
            trial.push(c.coeffs.clone());
            if linalg::rank(&trial) == rows.len() {
                continue;
            }
            rows = trial;
        }
        kept.push(c.clone());
    }
    kept
}

enum Boundedness {
    Empty,
    Bounded,
    Unbounded,
}

fn bounded_check(constraints: &[LinearConstraint<Rational>], dim: usize) -> Result<Boundedness> {
    for k in 0..dim {
        for sign in [1i64, -1] {
            let mut problem = MilpProblem::new();
            let vars: Vec<usize> = (0..dim)
                .map(|i| problem.add_free_var(&format!("x{i}"), VarKind::Continuous))
                .collect::<Result<_>>()?;
            for (ci, c) in constraints.iter().enumerate() {
                let terms = vars.iter().copied().zip(c.coeffs.iter().cloned()).collect();
                problem.add_constraint(Constraint::new(&format!("c{ci}"), terms, c.sense, c.rhs.clone()))?;
            }
            problem.set_objective(vec![(vars[k], Rational::from_integer(BigInt::from(sign)))]);
            let sol = solve_lp(&problem)?;
            match sol.status {
                Status::Infeasible => return Ok(Boundedness::Empty),
                Status::Unbounded => return Ok(Boundedness::Unbounded),
                Status::Optimal => {}
            }
        }
    }
    Ok(Boundedness::Bounded)
}

/// Reads the vertex file format: a `dim d` line, then one point per line as
/// whitespace-separated integers. Blank lines and `#` comments are skipped;
/// `key=value` lines after the points are ignored.
pub fn read_vertices(text: &str) -> Result<(usize, Vec<LatticePoint>)> {
    let mut dim: Option<usize> = None;
    let mut points = Vec::new();
    let mut trailer = false;
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        if body.contains('=') {
            trailer = true;
            continue;
        }
        if trailer {
            return Err(Error::parse(line, "point after trailer lines"));
        }
        let toks: Vec<&str> = body.split_whitespace().collect();
        let Some(d) = dim else {
            let ["dim", d] = toks[..] else {
                return Err(Error::parse(line, "expected `dim <d>`"));
            };
            dim = Some(d.parse().map_err(|_| Error::parse(line, format!("bad dimension `{d}`")))?);
            continue;
        };
        if toks.len() != d {
            return Err(Error::parse(line, format!("expected {d} coordinates, got {}", toks.len())));
        }
        let p = toks
            .iter()
            .map(|t| t.parse::<BigInt>().map_err(|_| Error::parse(line, format!("bad integer `{t}`"))))
            .collect::<Result<LatticePoint>>()?;
        points.push(p);
    }
    let dim = dim.ok_or_else(|| Error::parse(1, "missing `dim` line"))?;
    Ok((dim, points))
}

pub fn write_vertices(dim: usize, points: &[LatticePoint]) -> String {
    let mut out = format!("dim {dim}\n");
    for p in points {
        let parts: Vec<String> = p.iter().map(|x| x.to_string()).collect();
        out.push_str(&parts.join(" "));
        out.push('\n');
    }
    out
}

/// Lexicographic `k`-subsets of `0..n`.
pub struct Combinations {
    n: usize,
    current: Option<Vec<usize>>,
}

impl Combinations {
    pub fn new(n: usize, k: usize) -> Self {
        let current = if k <= n { Some((0..k).collect()) } else { None };
        Self { n, current }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.clone()?;
        let k = out.len();
        let mut next = out.clone();
        let mut i = k;
        loop {
            if i == 0 {
                self.current = None;
                break;
            }
            i -= 1;
            if next[i] < self.n - k + i {
                next[i] += 1;
                for j in i + 1..k {
                    next[j] = next[j - 1] + 1;
                }
                self.current = Some(next);
                break;
            }
        }
        Some(out)
    }
}
