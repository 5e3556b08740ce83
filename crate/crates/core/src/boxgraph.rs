//! Decomposition of a point set into boxes of diameter at most ε, and the
//! graph joining boxes that come within ε of each other.
//!
//! Two constructions are provided. Strip mode (planar only) sweeps the points
//! left to right, opening a new vertical strip whenever a point lies more than
//! `ε/√2` right of the strip's first point, and cuts every strip bottom to
//! top the same way; boxes are tight around their points and each has at most
//! 22 neighbours. Grid mode hashes points to the cells of an axis grid of side
//! just under `ε/√d` in any dimension.
//!
//! Box distances are computed in the same float arithmetic as point
//! distances, so a box pair at computed distance above ε cannot hide a point
//! pair at computed distance at most ε.

use std::collections::HashMap;

use crate::error::{invalid, Error, Result};
use crate::geometry::{box_box_dist, dist, PointSet};
use crate::Scalar;

/// How the boxes are laid out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoxMode {
    Strip,
    Grid,
}

/// One box: its points and an axis-aligned bounding region.
///
/// In strip mode the bounds are tight around the points; in grid mode they
/// are the cell.
#[derive(Debug, Clone, PartialEq)]
pub struct PointBox<T> {
    pub id: usize,
    pub points: Vec<usize>,
    pub lo: Vec<T>,
    pub hi: Vec<T>,
}

impl<T: Scalar> PointBox<T> {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Length of the bounds' diagonal.
    pub fn diameter(&self) -> T {
        dist(&self.lo, &self.hi)
    }
}

/// Boxes partitioning a point set plus their ε-adjacency.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxGraph<T> {
    boxes: Vec<PointBox<T>>,
    adjacency: Vec<Vec<usize>>,
    box_of: Vec<usize>,
    eps: T,
    mode: BoxMode,
}

impl<T: Scalar> BoxGraph<T> {
    /// Builds the graph in the requested mode.
    pub fn new(ps: &PointSet<T>, eps: T, mode: BoxMode) -> Result<Self> {
        match mode {
            BoxMode::Strip => build_strips(ps, eps),
            BoxMode::Grid => build_grid(ps, eps),
        }
    }

    pub fn boxes(&self) -> &[PointBox<T>] {
        &self.boxes
    }

    /// Ids of the boxes adjacent to box `b`, ascending.
    pub fn neighbors(&self, b: usize) -> &[usize] {
        &self.adjacency[b]
    }

    /// The box holding point `p`.
    pub fn box_of(&self, p: usize) -> usize {
        self.box_of[p]
    }

    pub fn eps(&self) -> T {
        self.eps
    }

    pub fn mode(&self) -> BoxMode {
        self.mode
    }

    pub fn len(&self) -> usize {
        self.boxes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.boxes.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    fn assemble(n: usize, boxes: Vec<PointBox<T>>, mut adjacency: Vec<Vec<usize>>, eps: T, mode: BoxMode) -> Self {
        let mut box_of = vec![usize::MAX; n];
        for b in &boxes {
            for &p in &b.points {
                box_of[p] = b.id;
            }
        }
        for adj in adjacency.iter_mut() {
            adj.sort_unstable();
            adj.dedup();
        }
        BoxGraph { boxes, adjacency, box_of, eps, mode }
    }
}

fn check_eps<T: Scalar>(eps: T) -> Result<()> {
    if !(eps > T::zero()) || !eps.is_finite() {
        return Err(invalid(format!("eps must be positive and finite, got {eps}")));
    }
    Ok(())
}

/// Slightly inflated ε for cheap one-axis pre-filters, which must never
/// reject a pair the exact box distance would accept.
fn loose<T: Scalar>(eps: T) -> T {
    eps + eps * T::epsilon() * T::of_usize(8)
}

fn tight_box<T: Scalar>(ps: &PointSet<T>, id: usize, points: Vec<usize>) -> PointBox<T> {
    let dim = ps.dim();
    let mut lo = vec![T::infinity(); dim];
    let mut hi = vec![T::neg_infinity(); dim];
    for &p in &points {
        for (k, &x) in ps.point(p).iter().enumerate() {
            lo[k] = lo[k].min(x);
            hi[k] = hi[k].max(x);
        }
    }
    PointBox { id, points, lo, hi }
}

/// Largest side `s ≤ ε/√2` whose computed square diagonal stays within ε.
fn strip_side<T: Scalar>(eps: T) -> T {
    let mut s = eps / T::of_usize(2).sqrt();
    while (s * s + s * s).sqrt() > eps {
        s = s - s * T::epsilon();
    }
    s
}

/// Strip decomposition of a planar point set.
pub fn build_strips<T: Scalar>(ps: &PointSet<T>, eps: T) -> Result<BoxGraph<T>> {
    check_eps(eps)?;
    ps.require_dim(2)?;
    let n = ps.len();
    let s = strip_side(eps);
    let x = |i: usize| ps.point(i)[0];
    let y = |i: usize| ps.point(i)[1];

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        x(a).partial_cmp(&x(b))
            .expect("finite")
            .then(y(a).partial_cmp(&y(b)).expect("finite"))
            .then(a.cmp(&b))
    });

    // Strips, each a list of box ids ordered bottom to top.
    let mut strips: Vec<Vec<usize>> = Vec::new();
    let mut boxes: Vec<PointBox<T>> = Vec::new();
    let mut k = 0;
    while k < n {
        let x0 = x(order[k]);
        let mut end = k;
        while end < n && !(x(order[end]) - x0 > s) {
            end += 1;
        }
        let mut members: Vec<usize> = order[k..end].to_vec();
        members.sort_by(|&a, &b| {
            y(a).partial_cmp(&y(b))
                .expect("finite")
                .then(x(a).partial_cmp(&x(b)).expect("finite"))
                .then(a.cmp(&b))
        });
        let mut strip = Vec::new();
        let mut j = 0;
        while j < members.len() {
            let y0 = y(members[j]);
            let mut stop = j;
            while stop < members.len() && !(y(members[stop]) - y0 > s) {
                stop += 1;
            }
            let id = boxes.len();
            boxes.push(tight_box(ps, id, members[j..stop].to_vec()));
            strip.push(id);
            j = stop;
        }
        strips.push(strip);
        k = end;
    }

    let mut adjacency = vec![Vec::new(); boxes.len()];
    let reach = loose(eps);
    let link = |a: usize, b: usize, adjacency: &mut Vec<Vec<usize>>| {
        let (ba, bb) = (&boxes[a], &boxes[b]);
        if box_box_dist(&ba.lo, &ba.hi, &bb.lo, &bb.hi) <= eps {
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
    };
    for j in 0..strips.len() {
        // Within the strip: boxes further up until the vertical gap exceeds ε.
        let strip = &strips[j];
        for (ia, &a) in strip.iter().enumerate() {
            for &b in &strip[ia + 1..] {
                if boxes[b].lo[1] - boxes[a].hi[1] > reach {
                    break;
                }
                link(a, b, &mut adjacency);
            }
        }
        // The next two strips, scanned with a pointer that only moves up.
        for other in strips.iter().skip(j + 1).take(2) {
            let mut start = 0;
            for &a in strip {
                while start < other.len() && boxes[a].lo[1] - boxes[other[start]].hi[1] > reach {
                    start += 1;
                }
                for &b in &other[start..] {
                    if boxes[b].lo[1] - boxes[a].hi[1] > reach {
                        break;
                    }
                    link(a, b, &mut adjacency);
                }
            }
        }
    }
    Ok(BoxGraph::assemble(n, boxes, adjacency, eps, BoxMode::Strip))
}

/// Grid decomposition in any dimension.
pub fn build_grid<T: Scalar>(ps: &PointSet<T>, eps: T) -> Result<BoxGraph<T>> {
    check_eps(eps)?;
    let n = ps.len();
    let d = ps.dim();
    let max_abs = ps.coords().iter().fold(T::zero(), |m, &c| m.max(c.abs()));
    let nominal = eps / T::of_usize(d).sqrt();
    // Cell bounds k·s carry a rounding error proportional to |k·s|; shrink
    // the side by that much so every computed cell diagonal stays within ε.
    let u = T::epsilon();
    let mut s = nominal * (T::one() - u * T::of_usize(16)) - max_abs * u * T::of_usize(4);
    if !(s > T::zero()) {
        return Err(invalid(format!("eps {eps} is too small relative to coordinates of size {max_abs}")));
    }
    loop {
        let (boxes, keys) = grid_cells(ps, s)?;
        if boxes.iter().all(|b| b.diameter() <= eps) {
            let adjacency = grid_adjacency(&boxes, &keys, eps, d);
            return Ok(BoxGraph::assemble(n, boxes, adjacency, eps, BoxMode::Grid));
        }
        s = s * (T::one() - u * T::of_usize(64));
    }
}

/// Occupied cells and their integer keys, in first-visit order.
type Cells<T> = (Vec<PointBox<T>>, Vec<Vec<i64>>);

fn grid_cells<T: Scalar>(ps: &PointSet<T>, s: T) -> Result<Cells<T>> {
    let d = ps.dim();
    let mut index: HashMap<Vec<i64>, usize> = HashMap::new();
    let mut boxes: Vec<PointBox<T>> = Vec::new();
    let mut keys: Vec<Vec<i64>> = Vec::new();
    for i in 0..ps.len() {
        let mut key = Vec::with_capacity(d);
        for &x in ps.point(i) {
            let mut k = (x / s).floor().to_i64().ok_or_else(|| {
                Error::InvalidParameter(format!("coordinate {x} overflows the grid of side {s}"))
            })?;
            // Floor of a rounded quotient can be off by one at cell borders.
            while T::from(k).expect("i64 fits") * s > x {
                k -= 1;
            }
            while T::from(k + 1).expect("i64 fits") * s < x {
                k += 1;
            }
            key.push(k);
        }
        let id = *index.entry(key.clone()).or_insert_with(|| {
            let id = boxes.len();
            let lo: Vec<T> = key.iter().map(|&k| T::from(k).expect("i64 fits") * s).collect();
            let hi: Vec<T> = key.iter().map(|&k| T::from(k + 1).expect("i64 fits") * s).collect();
            boxes.push(PointBox { id, points: Vec::new(), lo, hi });
            keys.push(key);
            id
        });
        boxes[id].points.push(i);
    }
    Ok((boxes, keys))
}

/// Nonzero integer offsets `o` whose cells can come within ε of the origin
/// cell: the per-axis gap is `max(|o_i| - 1, 0)` cells and `√d` cells span ε.
fn cell_offsets(d: usize) -> Vec<Vec<i64>> {
    let reach = 1 + (d as f64).sqrt().floor() as i64;
    let mut out = Vec::new();
    let mut cur = vec![-reach; d];
    loop {
        let gap: i64 = cur.iter().map(|&o| (o.abs() - 1).max(0).pow(2)).sum();
        if gap <= d as i64 && cur.iter().any(|&o| o != 0) {
            out.push(cur.clone());
        }
        let mut axis = 0;
        loop {
            if axis == d {
                return out;
            }
            if cur[axis] < reach {
                cur[axis] += 1;
                break;
            }
            cur[axis] = -reach;
            axis += 1;
        }
    }
}

fn grid_adjacency<T: Scalar>(boxes: &[PointBox<T>], keys: &[Vec<i64>], eps: T, d: usize) -> Vec<Vec<usize>> {
    let mut adjacency = vec![Vec::new(); boxes.len()];
    let close = |a: &PointBox<T>, b: &PointBox<T>| box_box_dist(&a.lo, &a.hi, &b.lo, &b.hi) <= eps;
    let reach = 1 + (d as f64).sqrt().floor() as u32;
    let probes = (2 * reach as u64 + 1).checked_pow(d as u32).unwrap_or(u64::MAX);
    if probes >= boxes.len() as u64 {
        // Fewer cells than offsets to probe: compare cells directly.
        for a in 0..boxes.len() {
            for b in a + 1..boxes.len() {
                if close(&boxes[a], &boxes[b]) {
                    adjacency[a].push(b);
                    adjacency[b].push(a);
                }
            }
        }
        return adjacency;
    }
    let index: HashMap<&[i64], usize> = keys.iter().enumerate().map(|(i, k)| (k.as_slice(), i)).collect();
    let offsets = cell_offsets(d);
    let mut probe = vec![0i64; d];
    for (a, key) in keys.iter().enumerate() {
        for o in &offsets {
            for k in 0..d {
                probe[k] = key[k] + o[k];
            }
            if let Some(&b) = index.get(probe.as_slice()) {
                if b > a && close(&boxes[a], &boxes[b]) {
                    adjacency[a].push(b);
                    adjacency[b].push(a);
                }
            }
        }
    }
    adjacency
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn check_invariants(ps: &PointSet<f64>, bg: &BoxGraph<f64>) {
        let eps = bg.eps();
        let mut seen = vec![false; ps.len()];
        for b in bg.boxes() {
            assert!(!b.is_empty());
            for &p in &b.points {
                assert!(!seen[p]);
                seen[p] = true;
                assert_eq!(bg.box_of(p), b.id);
                for (k, &x) in ps.point(p).iter().enumerate() {
                    assert!(b.lo[k] <= x && x <= b.hi[k]);
                }
                for &q in &b.points {
                    assert!(ps.dist(p, q) <= eps);
                }
            }
        }
        assert!(seen.iter().all(|&s| s));
        for a in 0..bg.len() {
            for b in 0..bg.len() {
                let (ba, bb) = (&bg.boxes()[a], &bg.boxes()[b]);
                let expect = a != b && box_box_dist(&ba.lo, &ba.hi, &bb.lo, &bb.hi) <= eps;
                assert_eq!(bg.neighbors(a).contains(&b), expect, "boxes {a} {b}");
            }
        }
        if bg.mode() == BoxMode::Strip {
            assert!(bg.max_degree() <= 22);
        }
    }

    #[test]
    fn single_point() {
        let ps = PointSet::from_xy(&[(3.0, 4.0)]);
        for mode in [BoxMode::Strip, BoxMode::Grid] {
            let bg = BoxGraph::new(&ps, 1.0, mode).unwrap();
            assert_eq!(bg.len(), 1);
            assert_eq!(bg.edge_count(), 0);
        }
        let bg = build_strips(&ps, 1.0).unwrap();
        assert_eq!(bg.boxes()[0].diameter(), 0.0);
    }

    #[test]
    fn far_apart_points_get_separate_boxes() {
        let eps = 0.3;
        let ps = PointSet::from_xy(&[(0.0, 0.0), (10.0 * eps, 0.0), (20.0 * eps, 0.0)]);
        let bg = build_strips(&ps, eps).unwrap();
        assert_eq!(bg.len(), 3);
        assert_eq!(bg.edge_count(), 0);
    }

    #[test]
    fn strip_rule_hand_trace() {
        let ps = PointSet::from_xy(&[(0.0, 0.0), (0.5, 0.0), (1.2, 0.0)]);
        let bg = build_strips(&ps, 1.0).unwrap();
        assert_eq!(bg.len(), 2);
        assert_eq!(bg.boxes()[0].points, vec![0, 1]);
        assert_eq!(bg.boxes()[1].points, vec![2]);
        assert_eq!(bg.neighbors(0), &[1]);
    }

    #[test]
    fn threshold_point_stays_in_its_strip() {
        let eps = 1.0f64;
        let s = strip_side(eps);
        let ps = PointSet::from_xy(&[(0.0, 0.0), (s, 0.0), (0.0, s)]);
        let bg = build_strips(&ps, eps).unwrap();
        assert_eq!(bg.len(), 1);
    }

    #[test]
    fn identical_points_share_one_cell() {
        let ps = PointSet::from_xy(&[(1.5, -2.0); 10]);
        let bg = build_grid(&ps, 0.1).unwrap();
        assert_eq!(bg.len(), 1);
        assert_eq!(bg.edge_count(), 0);
    }

    #[test]
    fn grid_cells_two_apart_are_adjacent() {
        let ps = PointSet::from_xy(&[(0.5, 0.5), (2.5, 0.5)]);
        let bg = build_grid(&ps, 2f64.sqrt()).unwrap();
        assert_eq!(bg.len(), 2);
        assert_eq!(bg.edge_count(), 1);
    }

    #[test]
    fn rejects_bad_eps() {
        let ps = PointSet::from_xy(&[(0.0, 0.0)]);
        assert!(build_strips(&ps, 0.0).is_err());
        assert!(build_grid(&ps, -1.0).is_err());
        assert!(build_grid(&ps, f64::NAN).is_err());
    }

    #[test]
    fn random_three_dimensional_grid() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let rows: Vec<Vec<f64>> = (0..100).map(|_| (0..3).map(|_| rng.random::<f64>() * 10.0).collect()).collect();
        let ps = PointSet::from_rows(3, &rows).unwrap();
        for eps in [0.5, 1.0, 2.5] {
            check_invariants(&ps, &build_grid(&ps, eps).unwrap());
        }
    }

    #[test]
    fn offsets_cover_the_ball() {
        assert_eq!(cell_offsets(2).len(), 24);
        // Every offset kept is within reach and every one dropped is not.
        for o in cell_offsets(3) {
            let gap: i64 = o.iter().map(|&x| (x.abs() - 1).max(0).pow(2)).sum();
            assert!(gap <= 3);
        }
    }

    #[test]
    fn strip_degree_bound_under_stress() {
        // Dense lattices at spacings that straddle the strip side.
        for spacing in [0.05, 0.1, 0.2, 0.35, 0.36, 0.7, 0.71] {
            let mut pts = Vec::new();
            for i in 0..30 {
                for j in 0..30 {
                    pts.push((i as f64 * spacing, j as f64 * spacing * 0.97));
                }
            }
            let ps = PointSet::from_xy(&pts);
            check_invariants(&ps, &build_strips(&ps, 1.0).unwrap());
        }
    }

    proptest! {
        #[test]
        fn planar_invariants(
            pts in prop::collection::vec((-40i32..40, -40i32..40), 1..150),
            eps in 0.05f64..8.0,
            unit in prop::sample::select(vec![0.1f64, 0.25, 1.0 / 3.0]),
        ) {
            let xy: Vec<(f64, f64)> = pts.iter().map(|&(x, y)| (x as f64 * unit, y as f64 * unit)).collect();
            let ps = PointSet::from_xy(&xy);
            check_invariants(&ps, &build_strips(&ps, eps).unwrap());
            check_invariants(&ps, &build_grid(&ps, eps).unwrap());
        }

        #[test]
        fn four_dimensional_grid(
            pts in prop::collection::vec(prop::collection::vec(-10i32..10, 4), 1..80),
            eps in 0.5f64..6.0,
        ) {
            let rows: Vec<Vec<f64>> = pts.iter().map(|r| r.iter().map(|&c| c as f64 * 0.5).collect()).collect();
            let ps = PointSet::from_rows(4, &rows).unwrap();
            check_invariants(&ps, &build_grid(&ps, eps).unwrap());
        }
    }
}
