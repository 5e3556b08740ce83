use std::fmt::Write as _;

use petgraph::unionfind::UnionFind;

use crate::error::{invalid, Error, Result};
use crate::geometry::{Edge, WeightedEdgeList};
use crate::Scalar;

/// One internal node of a [`Dendrogram`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Merge<T> {
    pub left: usize,
    pub right: usize,
    pub eps: T,
}

/// Binary merge tree over `n` points.
///
/// Leaves are `0..n`; internal node `n + i` is `merges()[i]`, and merges are
/// stored in the order they happen, so their `eps` never decreases.
#[derive(Debug, Clone, PartialEq)]
pub struct Dendrogram<T> {
    n: usize,
    merges: Vec<Merge<T>>,
}

impl<T: Scalar> Dendrogram<T> {
    /// Merges the components joined by a spanning tree, lightest edge first
    /// (ties by index pair).
    pub fn from_mst(n: usize, tree: &WeightedEdgeList<T>) -> Result<Self> {
        let mut edges = tree.edges.clone();
        edges.sort_by(edge_order);
        let mut uf = UnionFind::<usize>::new(n.max(1));
        // Dendrogram node currently standing for each union-find root.
        let mut node: Vec<usize> = (0..n).collect();
        let mut merges = Vec::with_capacity(n.saturating_sub(1));
        for e in &edges {
            let (a, b) = (uf.find(e.i), uf.find(e.j));
            if a == b {
                continue;
            }
            let (left, right) = (node[a].min(node[b]), node[a].max(node[b]));
            uf.union(a, b);
            node[uf.find(a)] = n + merges.len();
            merges.push(Merge { left, right, eps: e.w });
        }
        if n > 0 && merges.len() != n - 1 {
            return Err(Error::Disconnected { components: n - merges.len() });
        }
        Ok(Dendrogram { n, merges })
    }

    /// Number of leaves.
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn merges(&self) -> &[Merge<T>] {
        &self.merges
    }

    pub fn merge_eps(&self) -> Vec<T> {
        self.merges.iter().map(|m| m.eps).collect()
    }

    /// Root of the component of every leaf after applying all merges at
    /// heights `<= eps`. Roots are leaf indices.
    pub fn components_at(&self, eps: T) -> Vec<usize> {
        let n = self.n;
        let mut uf = UnionFind::<usize>::new(2 * n.max(1));
        for (i, m) in self.merges.iter().enumerate() {
            if m.eps > eps {
                break;
            }
            uf.union(m.left, m.right);
            uf.union(n + i, m.left);
        }
        let mut rep = vec![usize::MAX; 2 * n.max(1)];
        (0..n)
            .map(|p| {
                let r = uf.find(p);
                if rep[r] == usize::MAX {
                    rep[r] = p;
                }
                rep[r]
            })
            .collect()
    }

    /// One `node left right eps` line per internal node; heights carry 17
    /// significant digits.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (i, m) in self.merges.iter().enumerate() {
            writeln!(s, "{} {} {} {:.16e}", self.n + i, m.left, m.right, m.eps.widen()).expect("string write");
        }
        s
    }

    /// Inverse of [`to_text`](Self::to_text). Empty text is the single-leaf
    /// tree.
    pub fn from_text(text: &str) -> Result<Self> {
        let lines: Vec<&str> = text.lines().filter(|l| !l.trim().is_empty()).collect();
        let n = lines.len() + 1;
        let mut merges = Vec::with_capacity(lines.len());
        for (i, line) in lines.iter().enumerate() {
            let f: Vec<&str> = line.split_whitespace().collect();
            let bad = || invalid(format!("malformed dendrogram line {}: {line:?}", i + 1));
            if f.len() != 4 {
                return Err(bad());
            }
            let id: usize = f[0].parse().map_err(|_| bad())?;
            let left: usize = f[1].parse().map_err(|_| bad())?;
            let right: usize = f[2].parse().map_err(|_| bad())?;
            let eps: f64 = f[3].parse().map_err(|_| bad())?;
            if id != n + i || left >= id || right >= id || left == right {
                return Err(bad());
            }
            merges.push(Merge { left, right, eps: T::of_f64(eps) });
        }
        if merges.windows(2).any(|w| w[1].eps < w[0].eps) {
            return Err(invalid("dendrogram heights decrease"));
        }
        Ok(Dendrogram { n, merges })
    }
}

pub(crate) fn edge_order<T: Scalar>(a: &Edge<T>, b: &Edge<T>) -> std::cmp::Ordering {
    a.w.partial_cmp(&b.w)
        .expect("finite weights")
        .then(a.i.cmp(&b.i))
        .then(a.j.cmp(&b.j))
}
