//! k-nearest neighbours with a static kd-tree.

use std::cmp::Ordering;

use super::{dist, PointSet};
use crate::error::{invalid, Result};
use crate::Scalar;

/// One neighbour in a k-nearest-neighbour answer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Neighbor<T> {
    pub index: usize,
    pub dist: T,
}

fn key_cmp<T: Scalar>(a: &Neighbor<T>, b: &Neighbor<T>) -> Ordering {
    a.dist
        .partial_cmp(&b.dist)
        .expect("distances are finite")
        .then(a.index.cmp(&b.index))
}

const LEAF: usize = 8;

enum Node<T> {
    Leaf { start: usize, end: usize },
    Split { axis: usize, value: T, left: usize, right: usize },
}

/// Balanced kd-tree over a borrowed point set, splitting the widest axis at
/// its median.
pub struct KdTree<'a, T> {
    ps: &'a PointSet<T>,
    perm: Vec<usize>,
    nodes: Vec<Node<T>>,
}

impl<'a, T: Scalar> KdTree<'a, T> {
    pub fn new(ps: &'a PointSet<T>) -> Self {
        let mut tree = KdTree { ps, perm: (0..ps.len()).collect(), nodes: Vec::new() };
        if !ps.is_empty() {
            tree.build(0, ps.len());
        }
        tree
    }

    fn build(&mut self, start: usize, end: usize) -> usize {
        if end - start <= LEAF {
            self.nodes.push(Node::Leaf { start, end });
            return self.nodes.len() - 1;
        }
        let dim = self.ps.dim();
        let axis = (0..dim)
            .map(|a| {
                let (lo, hi) = self.perm[start..end].iter().fold((T::infinity(), T::neg_infinity()), |(lo, hi), &i| {
                    let x = self.ps.point(i)[a];
                    (lo.min(x), hi.max(x))
                });
                (a, hi - lo)
            })
            .max_by(|x, y| x.1.partial_cmp(&y.1).expect("finite"))
            .map(|(a, _)| a)
            .unwrap_or(0);
        let mid = start + (end - start) / 2;
        let ps = self.ps;
        self.perm[start..end].select_nth_unstable_by(mid - start, |&i, &j| {
            ps.point(i)[axis].partial_cmp(&ps.point(j)[axis]).expect("finite")
        });
        let value = ps.point(self.perm[mid])[axis];
        let id = self.nodes.len();
        self.nodes.push(Node::Leaf { start: 0, end: 0 });
        let left = self.build(start, mid);
        let right = self.build(mid, end);
        self.nodes[id] = Node::Split { axis, value, left, right };
        id
    }

    /// The `l` nearest points to point `i` other than `i` itself, ascending by
    /// distance with ties broken by smaller index.
    pub fn knn(&self, i: usize, l: usize) -> Result<Vec<Neighbor<T>>> {
        let n = self.ps.len();
        if i >= n {
            return Err(invalid(format!("point index {i} out of range for {n} points")));
        }
        if l == 0 || l >= n {
            return Err(invalid(format!("neighbour count {l} must lie in 1..={}", n - 1)));
        }
        let q = self.ps.point(i);
        let mut best: Vec<Neighbor<T>> = Vec::with_capacity(l + 1);
        self.search(0, q, i, l, &mut best);
        Ok(best)
    }

    fn search(&self, node: usize, q: &[T], skip: usize, l: usize, best: &mut Vec<Neighbor<T>>) {
        match self.nodes[node] {
            Node::Leaf { start, end } => {
                for &j in &self.perm[start..end] {
                    if j == skip {
                        continue;
                    }
                    let cand = Neighbor { index: j, dist: dist(q, self.ps.point(j)) };
                    if best.len() == l && key_cmp(&cand, &best[l - 1]) != Ordering::Less {
                        continue;
                    }
                    let pos = best.partition_point(|b| key_cmp(b, &cand) == Ordering::Less);
                    best.insert(pos, cand);
                    best.truncate(l);
                }
            }
            Node::Split { axis, value, left, right } => {
                let diff = q[axis] - value;
                let (near, far) = if diff < T::zero() { (left, right) } else { (right, left) };
                self.search(near, q, skip, l, best);
                // The computed distance to anything across the plane is at
                // least |diff| up to a couple of roundings.
                let slack = T::one() - T::epsilon() * T::of_usize(4);
                if best.len() < l || diff.abs() * slack <= best[l - 1].dist {
                    self.search(far, q, skip, l, best);
                }
            }
        }
    }
}

/// The `l` nearest other points to point `i`.
///
/// Builds a throwaway tree; use [`KdTree`] for repeated queries.
pub fn knn<T: Scalar>(ps: &PointSet<T>, i: usize, l: usize) -> Result<Vec<Neighbor<T>>> {
    KdTree::new(ps).knn(i, l)
}

/// Reference implementation: sort all distances.
pub fn knn_brute_force<T: Scalar>(ps: &PointSet<T>, i: usize, l: usize) -> Result<Vec<Neighbor<T>>> {
    let n = ps.len();
    if i >= n {
        return Err(invalid(format!("point index {i} out of range for {n} points")));
    }
    if l == 0 || l >= n {
        return Err(invalid(format!("neighbour count {l} must lie in 1..={}", n.saturating_sub(1))));
    }
    let mut all: Vec<Neighbor<T>> = (0..n)
        .filter(|&j| j != i)
        .map(|j| Neighbor { index: j, dist: ps.dist(i, j) })
        .collect();
    all.sort_by(key_cmp);
    all.truncate(l);
    Ok(all)
}
