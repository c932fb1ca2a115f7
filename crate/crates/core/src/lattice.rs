//! Interior sublattice points `int(P) ∩ lZ^d` by bounding-box scan, plus
//! brute-force oracles built on the scan.
//!
//! Cost is the number of points of `lZ^d` in the bounding box times the
//! number of facets; meant for desk-scale inputs.

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::geometry::{
    barycentric, polytope_volume, to_scalar_point, Halfspace, LatticePoint,
    LatticePolytope, LatticeSimplex,
};
use crate::linalg::dot_integer;
use crate::scalar::factorial;
use crate::Rational;

/// Sorted, duplicate-free points of `I_l(P)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SublatticePointSet {
    pub l: u64,
    pub points: Vec<LatticePoint>,
}

impl SublatticePointSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, p: &[BigInt]) -> bool {
        self.points.binary_search_by(|q| q.as_slice().cmp(p)).is_ok()
    }
}

fn inside(facets: &[Halfspace], p: &[BigInt], strict: bool) -> bool {
    facets.iter().all(|h| {
        let v = dot_integer(&h.normal, p);
        if strict {
            v < h.offset
        } else {
            v <= h.offset
        }
    })
}

/// Points of `lZ^d` in the bounding box of `p`, in lexicographic order.
fn box_scan(p: &LatticePolytope, l: u64, mut visit: impl FnMut(&[BigInt])) {
    let (lo, hi) = p.bounding_box();
    let step = BigInt::from(l);
    let start: Vec<BigInt> = lo.iter().map(|x| x.div_ceil(&step) * &step).collect();
    if start.iter().zip(&hi).any(|(s, h)| s > h) {
        return;
    }
    let mut cur = start.clone();
    loop {
        visit(&cur);
        let mut k = cur.len();
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            cur[k] += &step;
            if cur[k] <= hi[k] {
                break;
            }
            cur[k] = start[k].clone();
        }
    }
}

pub fn interior_sublattice_points(p: &LatticePolytope, l: u64) -> SublatticePointSet {
    assert!(l >= 1, "sublattice scale must be positive");
    let mut points = Vec::new();
    box_scan(p, l, |x| {
        if inside(p.facets(), x, true) {
            points.push(x.to_vec());
        }
    });
    SublatticePointSet { l, points }
}

/// All lattice points of the closed polytope.
pub fn lattice_points_closed(p: &LatticePolytope) -> Vec<LatticePoint> {
    let mut points = Vec::new();
    box_scan(p, 1, |x| {
        if inside(p.facets(), x, false) {
            points.push(x.to_vec());
        }
    });
    points
}

/// The point of `I_l(S)` with the largest smallest barycentric coordinate.
/// Ties go to the lexicographically largest point.
pub fn deepest_point_bruteforce(s: &LatticeSimplex, l: u64) -> Result<(LatticePoint, Rational)> {
    let pts = interior_sublattice_points(&s.to_polytope(), l);
    let mut best: Option<(LatticePoint, Rational)> = None;
    for p in pts.points {
        let m = barycentric(s, &to_scalar_point::<Rational>(&p))?.min();
        if best.as_ref().is_none_or(|(_, b)| m >= *b) {
            best = Some((p, m));
        }
    }
    best.ok_or(Error::EmptyInterior)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlichfeldtReport {
    pub count: usize,
    pub bound: Rational,
    pub ok: bool,
}

/// `|P ∩ Z^d| <= d + d! vol(P)`.
pub fn blichfeldt_check(p: &LatticePolytope) -> BlichfeldtReport {
    let count = lattice_points_closed(p).len();
    let d = p.dim();
    let bound = Rational::from_integer(BigInt::from(d)) + Rational::from_integer(factorial(d as u32)) * polytope_volume(p);
    let ok = Rational::from_integer(BigInt::from(count)) <= bound;
    BlichfeldtReport { count, bound, ok }
}

/// Whether every coordinate of `p` is a multiple of `l`.
pub fn in_sublattice(p: &[BigInt], l: u64) -> bool {
    let l = BigInt::from(l);
    l.is_one() || p.iter().all(|x| (x % &l).is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::lattice_point;
    use crate::scalar::rat;

    fn pts(v: &[&[i64]]) -> Vec<LatticePoint> {
        v.iter().map(|p| lattice_point(p)).collect()
    }

    #[test]
    fn interior_points_of_small_simplices() {
        let b21 = LatticePolytope::from_i64(&[&[2, 0], &[0, 3], &[0, -1]]).unwrap();
        assert_eq!(interior_sublattice_points(&b21, 1).points, pts(&[&[1, 0], &[1, 1]]));
        let s211 = LatticePolytope::from_i64(&[&[0, 0], &[2, 0], &[0, 4]]).unwrap();
        assert_eq!(interior_sublattice_points(&s211, 1).points, pts(&[&[1, 1]]));
        let unit = LatticePolytope::from_i64(&[&[0, 0], &[1, 0], &[0, 1]]).unwrap();
        assert!(interior_sublattice_points(&unit, 1).is_empty());
        let big = LatticePolytope::from_i64(&[&[0, 0], &[9, 0], &[0, 9]]).unwrap();
        let even = interior_sublattice_points(&big, 2);
        assert!(even.points.iter().all(|p| in_sublattice(p, 2)));
        assert_eq!(even.len(), 6);
    }

    #[test]
    fn deepest_points() {
        let b21 = LatticeSimplex::from_i64(&[&[2, 0], &[0, 3], &[0, -1]]).unwrap();
        assert_eq!(deepest_point_bruteforce(&b21, 1).unwrap(), (lattice_point(&[1, 1]), rat(1, 8)));
        for l in 1..=4i64 {
            let seg = LatticeSimplex::from_i64(&[&[0], &[l + 1]]).unwrap();
            let (p, m) = deepest_point_bruteforce(&seg, l as u64).unwrap();
            assert_eq!(p, lattice_point(&[l]));
            assert_eq!(m, rat(1, l + 1));
        }
        let unit = LatticeSimplex::from_i64(&[&[0, 0], &[1, 0], &[0, 1]]).unwrap();
        assert_eq!(deepest_point_bruteforce(&unit, 1), Err(Error::EmptyInterior));
    }

    #[test]
    fn blichfeldt_examples() {
        let square = LatticePolytope::from_i64(&[&[0, 0], &[1, 0], &[1, 1], &[0, 1]]).unwrap();
        let r = blichfeldt_check(&square);
        assert_eq!((r.count, r.bound.clone(), r.ok), (4, rat(4, 1), true));
        let s211 = LatticePolytope::from_i64(&[&[0, 0], &[2, 0], &[0, 4]]).unwrap();
        let r = blichfeldt_check(&s211);
        assert_eq!((r.count, r.bound.clone(), r.ok), (9, rat(10, 1), true));
        let std = LatticePolytope::from_i64(&[&[0, 0], &[1, 0], &[0, 1]]).unwrap();
        let r = blichfeldt_check(&std);
        assert_eq!((r.count, r.bound.clone(), r.ok), (3, rat(3, 1), true));
    }
}
