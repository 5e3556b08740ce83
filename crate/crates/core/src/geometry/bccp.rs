//! Bichromatic closest pair between two disjoint point subsets.

use std::cmp::Ordering;
use std::collections::HashMap;

use super::{delaunay_subset, PointSet};
use crate::error::{invalid, Result};
use crate::Scalar;

/// How closely [`bccp`] must approach the true closest pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BccpMode<T> {
    Exact,
    /// Any pair within a factor `1 + alpha` of the optimum.
    Approx { alpha: T },
}

/// A reported pair `i ∈ A`, `j ∈ B`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosestPair<T> {
    pub i: usize,
    pub j: usize,
    pub dist: T,
}

impl<T: Scalar> ClosestPair<T> {
    fn better_than(&self, other: &Self) -> bool {
        match self.dist.partial_cmp(&other.dist).expect("finite") {
            Ordering::Less => true,
            Ordering::Greater => false,
            Ordering::Equal => (self.i, self.j) < (other.i, other.j),
        }
    }
}

// Below this many candidate pairs the quadratic scan beats triangulating.
const BRUTE_PAIRS: usize = 256;
const APPROX_ROUNDS: usize = 4;

/// Closest pair between index sets `a` and `b`.
///
/// Exact ties are broken by the smaller `(i, j)`.
pub fn bccp<T: Scalar>(ps: &PointSet<T>, a: &[usize], b: &[usize], mode: BccpMode<T>) -> Result<ClosestPair<T>> {
    bccp_counted(ps, a, b, mode, &mut |_, _| {})
}

/// Quadratic reference implementation.
pub fn bccp_brute_force<T: Scalar>(ps: &PointSet<T>, a: &[usize], b: &[usize]) -> Result<ClosestPair<T>> {
    check_sides(ps, a, b)?;
    Ok(brute(ps, a, b, &mut |_, _| {}))
}

/// [`bccp`] reporting every point distance it evaluates to `tally`.
pub(crate) fn bccp_counted<T: Scalar>(
    ps: &PointSet<T>,
    a: &[usize],
    b: &[usize],
    mode: BccpMode<T>,
    tally: &mut dyn FnMut(usize, usize),
) -> Result<ClosestPair<T>> {
    check_sides(ps, a, b)?;
    match mode {
        BccpMode::Exact => Ok(exact(ps, a, b, tally)),
        BccpMode::Approx { alpha } => {
            if !(alpha > T::zero()) || !alpha.is_finite() {
                return Err(invalid(format!("approximation factor must be positive, got {alpha}")));
            }
            Ok(approx(ps, a, b, alpha, tally))
        }
    }
}

fn check_sides<T: Scalar>(ps: &PointSet<T>, a: &[usize], b: &[usize]) -> Result<()> {
    if a.is_empty() || b.is_empty() {
        return Err(invalid("bichromatic closest pair needs two nonempty sides"));
    }
    let n = ps.len();
    if a.iter().chain(b).any(|&i| i >= n) {
        return Err(invalid(format!("point index out of range for {n} points")));
    }
    Ok(())
}

fn brute<T: Scalar>(ps: &PointSet<T>, a: &[usize], b: &[usize], tally: &mut dyn FnMut(usize, usize)) -> ClosestPair<T> {
    let mut best: Option<ClosestPair<T>> = None;
    for &i in a {
        for &j in b {
            tally(i, j);
            let c = ClosestPair { i, j, dist: ps.dist(i, j) };
            if best.as_ref().is_none_or(|b| c.better_than(b)) {
                best = Some(c);
            }
        }
    }
    best.expect("both sides nonempty")
}

fn exact<T: Scalar>(ps: &PointSet<T>, a: &[usize], b: &[usize], tally: &mut dyn FnMut(usize, usize)) -> ClosestPair<T> {
    if ps.dim() != 2 || a.len() * b.len() <= BRUTE_PAIRS {
        return brute(ps, a, b, tally);
    }
    delaunay_bccp(ps, a, b, tally)
}

/// Exact planar closest pair read off the triangulation of `a ∪ b`.
pub(crate) fn delaunay_bccp<T: Scalar>(ps: &PointSet<T>, a: &[usize], b: &[usize], tally: &mut dyn FnMut(usize, usize)) -> ClosestPair<T> {
    // Every closest bichromatic pair has an empty closed diametral disk, so
    // it is an edge of the triangulation of the union under any tie rule.
    let mut side_a: Vec<usize> = a.to_vec();
    side_a.sort_unstable();
    let mut union: Vec<usize> = a.iter().chain(b).copied().collect();
    union.sort_unstable();
    let tri = delaunay_subset(ps, &union).expect("dimension checked");
    let in_a = |i: usize| side_a.binary_search(&i).is_ok();
    let mut best: Option<ClosestPair<T>> = None;
    for &(u, v) in &tri.edges {
        let (i, j) = match (in_a(u), in_a(v)) {
            (true, false) => (u, v),
            (false, true) => (v, u),
            _ => continue,
        };
        tally(i, j);
        let c = ClosestPair { i, j, dist: ps.dist(i, j) };
        if best.as_ref().is_none_or(|b| c.better_than(b)) {
            best = Some(c);
        }
    }
    best.expect("a triangulation of two nonempty sides has a bichromatic edge")
}

/// Grid-quantized approximation.
///
/// With an upper bound `U` on the optimum, both sides are snapped to a grid
/// of side `g = α U / (4 (1 + α) √d)` keeping one representative per
/// occupied cell. The exact closest pair `R` among representatives is within
/// `2 g √d` of the optimum, so `R` is accepted once `R ≤ (1 + α)(R - 2g√d)`.
/// Otherwise `R` becomes the new bound; each rejected round at least halves
/// `U`. After a few rounds, or when snapping does not shrink the input, the
/// exact routine finishes the job.
fn approx<T: Scalar>(ps: &PointSet<T>, a: &[usize], b: &[usize], alpha: T, tally: &mut dyn FnMut(usize, usize)) -> ClosestPair<T> {
    let d = T::of_usize(ps.dim());
    let one = T::one();
    let two = one + one;
    // Keeps float rounding in the reported distance from eating the margin.
    let guard = one - T::epsilon().sqrt();
    tally(a[0], b[0]);
    let mut upper = ps.dist(a[0], b[0]);
    for _ in 0..APPROX_ROUNDS {
        if upper == T::zero() {
            break;
        }
        let g = alpha * upper / (T::of_usize(4) * (one + alpha) * d.sqrt());
        if !(g > T::zero()) || !g.is_finite() {
            break;
        }
        let reps_a = representatives(ps, a, g);
        let reps_b = representatives(ps, b, g);
        if reps_a.len() == a.len() && reps_b.len() == b.len() {
            break;
        }
        let r = exact(ps, &reps_a, &reps_b, tally);
        let lower = r.dist - two * g * d.sqrt();
        if lower > T::zero() && r.dist <= (one + alpha) * lower * guard {
            return r;
        }
        if r.dist < upper {
            upper = r.dist;
        } else {
            break;
        }
    }
    exact(ps, a, b, tally)
}

fn representatives<T: Scalar>(ps: &PointSet<T>, side: &[usize], g: T) -> Vec<usize> {
    let mut cells: HashMap<Vec<i64>, usize> = HashMap::new();
    for &i in side {
        let key: Vec<i64> = ps.point(i).iter().map(|&x| (x / g).floor().to_i64().unwrap_or(i64::MAX)).collect();
        cells.entry(key).and_modify(|r| *r = (*r).min(i)).or_insert(i);
    }
    let mut reps: Vec<usize> = cells.into_values().collect();
    reps.sort_unstable();
    reps
}
