//! Minimum number of points strictly inside a circle through two given points.
//!
//! The circles through `p` and `q` form a one-parameter pencil: centre `t`
//! on the bisector of `pq`, growing towards the left of `p → q`. A point `r`
//! left of the line is inside exactly for `t > t_r`, a point on the right
//! for `t < t_r`, where `t_r` is the circle through `p, q, r`. Points on the
//! segment `pq` are inside every circle and the rest of the line never is.
//! Sorting the off-line points by `t_r` and sweeping gives the minimum.
//!
//! The `t_r` are compared through the perturbed in-circle test, so ties are
//! resolved the same way as in the Delaunay triangulation and a count of zero
//! coincides exactly with being a Delaunay edge.

use std::cmp::Ordering;

use super::predicates::{inside_circle_sos, orient2d, strictly_between, P};
use super::PointSet;
use crate::error::{invalid, Result};
use crate::Scalar;

/// Minimum over all circles through points `p` and `q` of the number of
/// points strictly inside.
pub fn min_circle_interior_count<T: Scalar>(ps: &PointSet<T>, p: usize, q: usize) -> Result<usize> {
    let (a, b, others) = prepare(ps, p, q)?;
    Ok(sweep(a, b, others.iter().map(|&i| (ps.xy(i), 1))))
}

/// Same quantity evaluated by enumerating one candidate circle per other
/// point plus the two half-planes. Quadratic; meant as a test oracle.
pub fn min_circle_interior_count_brute_force<T: Scalar>(ps: &PointSet<T>, p: usize, q: usize) -> Result<usize> {
    let (a, b, others) = prepare(ps, p, q)?;
    if a == b {
        return Ok(0);
    }
    let pts: Vec<P> = others.iter().map(|&i| ps.xy(i)).filter(|&r| r != a && r != b).collect();
    let always = pts
        .iter()
        .filter(|&&r| orient2d(a, b, r) == Ordering::Equal && strictly_between(a, b, r))
        .count();
    let off_line: Vec<P> = pts.into_iter().filter(|&r| orient2d(a, b, r) != Ordering::Equal).collect();
    let left = off_line.iter().filter(|&&r| orient2d(a, b, r) == Ordering::Greater).count();
    let mut best = left.min(off_line.len() - left);
    for &r in &off_line {
        // Just off the circle through r, on the side that excludes r.
        let inside = off_line
            .iter()
            .filter(|&&s| s != r && inside_circle_sos(a, b, r, s) == Ordering::Greater)
            .count();
        best = best.min(inside);
    }
    Ok(best + always)
}

fn prepare<T: Scalar>(ps: &PointSet<T>, p: usize, q: usize) -> Result<(P, P, Vec<usize>)> {
    ps.require_dim(2)?;
    let n = ps.len();
    if p >= n || q >= n {
        return Err(invalid(format!("point index out of range for {n} points")));
    }
    if p == q {
        return Err(invalid("min_circle_interior_count needs two distinct points"));
    }
    let others = (0..n).filter(|&i| i != p && i != q).collect();
    Ok((ps.xy(p), ps.xy(q), others))
}

/// Sweep over weighted locations. Locations equal to `a` or `b` never count.
pub(crate) fn sweep(a: P, b: P, pts: impl Iterator<Item = (P, usize)>) -> usize {
    if a == b {
        return 0;
    }
    let mut always = 0;
    let mut right = 0;
    // (location, weight, is_left)
    let mut events: Vec<(P, usize, bool)> = Vec::new();
    for (r, w) in pts {
        if r == a || r == b {
            continue;
        }
        match orient2d(a, b, r) {
            Ordering::Equal => {
                if strictly_between(a, b, r) {
                    always += w;
                }
            }
            Ordering::Greater => events.push((r, w, true)),
            Ordering::Less => {
                right += w;
                events.push((r, w, false));
            }
        }
    }
    events.sort_by(|x, y| cmp_param(a, b, x, y));

    // Far right end of the pencil: the right half-plane.
    let mut count = right;
    let mut best = count;
    let mut k = 0;
    while k < events.len() {
        let mut j = k;
        while j < events.len() && events[j].0 == events[k].0 {
            j += 1;
        }
        for &(_, w, is_left) in &events[k..j] {
            if is_left {
                count += w;
            } else {
                count -= w;
            }
        }
        best = best.min(count);
        k = j;
    }
    best + always
}

/// Order of the pencil parameter of two off-line locations.
fn cmp_param(a: P, b: P, x: &(P, usize, bool), y: &(P, usize, bool)) -> Ordering {
    let (s, _, s_left) = *x;
    let (r, _, _) = *y;
    if s == r {
        return Ordering::Equal;
    }
    let inside = inside_circle_sos(a, b, r, s) == Ordering::Greater;
    // s precedes r iff s is already inside the circle through r when s is a
    // left point, or still outside it when s is a right point.
    if inside == s_left {
        Ordering::Less
    } else {
        Ordering::Greater
    }
}
