//! Exact planar HDBSCAN.
//!
//! The hierarchy is the minimum spanning tree of the mutual reachability
//! graph. Only order-(MinPts − 3) Delaunay edges can appear in some MST of
//! that graph, so the tree is built by Kruskal over those candidates instead
//! of the complete graph. Cutting the tree at height ε gives DBSCAN* at ε.

mod dendrogram;
mod kod;

pub use dendrogram::{Dendrogram, Merge};
pub use kod::kod_edges;

use petgraph::unionfind::UnionFind;

use crate::dbscan::{Label, Labeling};
use crate::error::{invalid, Error, Result};
use crate::geometry::{Edge, KdTree, PointSet, WeightedEdgeList};
use crate::Scalar;
use dendrogram::edge_order;

/// Default input size limit of [`hdbscan_oracle`].
pub const HDBSCAN_ORACLE_CAP: usize = 3000;

/// Per-point distance to the (MinPts − 1)-th nearest other point.
#[derive(Debug, Clone, PartialEq)]
pub struct CoreDistances<T> {
    pub min_pts: usize,
    values: Vec<T>,
}

impl<T: Scalar> CoreDistances<T> {
    pub fn get(&self, i: usize) -> T {
        self.values[i]
    }

    pub fn as_slice(&self) -> &[T] {
        &self.values
    }
}

pub fn core_distances<T: Scalar>(ps: &PointSet<T>, min_pts: usize) -> Result<CoreDistances<T>> {
    if min_pts == 0 {
        return Err(invalid("min_pts must be at least 1"));
    }
    if ps.len() < min_pts {
        return Err(invalid(format!("need at least min_pts = {min_pts} points, got {}", ps.len())));
    }
    let values = if min_pts == 1 {
        vec![T::zero(); ps.len()]
    } else {
        let tree = KdTree::new(ps);
        (0..ps.len())
            .map(|i| Ok(tree.knn(i, min_pts - 1)?.last().expect("l >= 1").dist))
            .collect::<Result<_>>()?
    };
    Ok(CoreDistances { min_pts, values })
}

/// `max(d_core(p), d_core(q), |pq|)`.
pub fn d_mreach<T: Scalar>(p: usize, q: usize, cd: &CoreDistances<T>, ps: &PointSet<T>) -> Result<T> {
    if p == q {
        return Err(invalid("mutual reachability needs two distinct points"));
    }
    Ok(mreach(p, q, cd, ps))
}

#[inline]
fn mreach<T: Scalar>(p: usize, q: usize, cd: &CoreDistances<T>, ps: &PointSet<T>) -> T {
    ps.dist(p, q).max(cd.get(p)).max(cd.get(q))
}

/// Kruskal over weighted edges on vertices `0..n`, lightest first with ties
/// by index pair.
pub fn mst<T: Scalar>(edges: &WeightedEdgeList<T>, n: usize) -> Result<WeightedEdgeList<T>> {
    if let Some(e) = edges.edges.iter().find(|e| e.j >= n) {
        return Err(invalid(format!("edge ({}, {}) out of range for {n} vertices", e.i, e.j)));
    }
    if edges.edges.iter().any(|e| e.w.is_nan()) {
        return Err(invalid("edge weight is NaN"));
    }
    let mut sorted = edges.edges.clone();
    sorted.sort_by(edge_order);
    let mut uf = UnionFind::<usize>::new(n.max(1));
    let mut tree = Vec::with_capacity(n.saturating_sub(1));
    for e in sorted {
        if uf.union(e.i, e.j) {
            tree.push(e);
        }
    }
    if n > 0 && tree.len() != n - 1 {
        return Err(Error::Disconnected { components: n - tree.len() });
    }
    Ok(WeightedEdgeList::new(tree))
}

/// The order-(MinPts − 3) Delaunay edges weighted by mutual reachability,
/// with each group of coincident points reduced to a star around its
/// smallest index (which keeps the minimum spanning tree weights).
pub fn candidate_edges<T: Scalar>(ps: &PointSet<T>, cd: &CoreDistances<T>) -> Result<WeightedEdgeList<T>> {
    let k = cd.min_pts.saturating_sub(3);
    Ok(kod::kod_spanning_pairs(ps, k)?
        .into_iter()
        .map(|(i, j)| Edge::new(i, j, mreach(i, j, cd, ps)))
        .collect())
}

/// HDBSCAN hierarchy of a planar point set.
pub fn hdbscan<T: Scalar>(ps: &PointSet<T>, min_pts: usize) -> Result<Dendrogram<T>> {
    ps.require_dim(2)?;
    let cd = core_distances(ps, min_pts)?;
    let tree = mst(&candidate_edges(ps, &cd)?, ps.len())?;
    Dendrogram::from_mst(ps.len(), &tree)
}

/// Minimum spanning tree of the complete mutual reachability graph (Prim).
pub fn mreach_mst_oracle<T: Scalar>(ps: &PointSet<T>, cd: &CoreDistances<T>) -> Result<WeightedEdgeList<T>> {
    let n = ps.len();
    if n > HDBSCAN_ORACLE_CAP {
        return Err(Error::OracleCapExceeded { n, cap: HDBSCAN_ORACLE_CAP });
    }
    let mut tree = Vec::with_capacity(n.saturating_sub(1));
    if n == 0 {
        return Ok(WeightedEdgeList::new(tree));
    }
    let mut in_tree = vec![false; n];
    let mut best: Vec<(T, usize)> = vec![(T::infinity(), 0); n];
    let mut cur = 0;
    in_tree[0] = true;
    for _ in 1..n {
        for v in 0..n {
            if !in_tree[v] {
                let w = mreach(cur, v, cd, ps);
                if w < best[v].0 {
                    best[v] = (w, cur);
                }
            }
        }
        let v = (0..n)
            .filter(|&v| !in_tree[v])
            .min_by(|&a, &b| best[a].0.partial_cmp(&best[b].0).expect("finite").then(a.cmp(&b)))
            .expect("a vertex is left");
        in_tree[v] = true;
        tree.push(Edge::new(v, best[v].1, best[v].0));
        cur = v;
    }
    Ok(WeightedEdgeList::new(tree))
}

/// HDBSCAN hierarchy from the complete mutual reachability graph; any
/// dimension, quadratic.
pub fn hdbscan_oracle<T: Scalar>(ps: &PointSet<T>, min_pts: usize) -> Result<Dendrogram<T>> {
    let cd = core_distances(ps, min_pts)?;
    let tree = mreach_mst_oracle(ps, &cd)?;
    Dendrogram::from_mst(ps.len(), &tree)
}

/// DBSCAN* clustering at `eps` read off the hierarchy.
pub fn extract_at<T: Scalar>(dg: &Dendrogram<T>, eps: T, ps: &PointSet<T>, min_pts: usize) -> Result<Labeling> {
    if dg.len() != ps.len() {
        return Err(invalid(format!("dendrogram has {} leaves but there are {} points", dg.len(), ps.len())));
    }
    let cd = core_distances(ps, min_pts)?;
    extract_with(dg, eps, &cd)
}

/// [`extract_at`] with precomputed core distances.
pub fn extract_with<T: Scalar>(dg: &Dendrogram<T>, eps: T, cd: &CoreDistances<T>) -> Result<Labeling> {
    if eps.is_nan() || eps < T::zero() {
        return Err(invalid(format!("eps must be non-negative, got {eps}")));
    }
    let comp = dg.components_at(eps);
    let labels = comp
        .iter()
        .enumerate()
        .map(|(p, &c)| if cd.get(p) <= eps { Label::Core(c) } else { Label::Noise })
        .collect();
    Ok(Labeling::new(labels))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dbscan::{dbscan_oracle, Params, Variant};
    use crate::geometry::knn_brute_force;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(n: usize, seed: u64) -> PointSet<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts: Vec<(f64, f64)> = (0..n).map(|_| (rng.random::<f64>() * 10.0, rng.random::<f64>() * 10.0)).collect();
        PointSet::from_xy(&pts)
    }

    #[test]
    fn core_distance_cases() {
        let ps = random(100, 1);
        let cd = core_distances(&ps, 4).unwrap();
        for i in 0..ps.len() {
            assert_eq!(cd.get(i), knn_brute_force(&ps, i, 3).unwrap()[2].dist);
        }
        let nn = core_distances(&ps, 2).unwrap();
        assert_eq!(nn.get(5), knn_brute_force(&ps, 5, 1).unwrap()[0].dist);
        let same = PointSet::from_xy(&[(1.0, 1.0); 4]);
        assert_eq!(core_distances(&same, 4).unwrap().as_slice(), &[0.0; 4]);
        assert!(core_distances(&same, 5).is_err());
    }

    #[test]
    fn mutual_reachability_is_the_max() {
        let ps = PointSet::from_xy(&[(0.0, 0.0), (3.0, 4.0), (3.0, 4.5)]);
        let cd = core_distances(&ps, 2).unwrap();
        assert_eq!(d_mreach(0, 1, &cd, &ps).unwrap(), 5.0);
        assert_eq!(d_mreach(1, 2, &cd, &ps).unwrap(), 0.5);
        assert!(d_mreach(1, 1, &cd, &ps).is_err());
        let flat = core_distances(&ps, 1).unwrap();
        assert_eq!(d_mreach(1, 2, &flat, &ps).unwrap(), 0.5);
    }

    #[test]
    fn mst_small_cases() {
        let one = WeightedEdgeList::new(vec![Edge::new(0, 1, 7.0)]);
        assert_eq!(mst(&one, 2).unwrap(), one);
        let tri = WeightedEdgeList::new(vec![Edge::new(0, 1, 3.0), Edge::new(1, 2, 1.0), Edge::new(0, 2, 2.0)]);
        assert_eq!(mst(&tri, 3).unwrap().pairs(), vec![(0, 2), (1, 2)]);
        assert_eq!(mst(&one, 3), Err(Error::Disconnected { components: 2 }));
    }

    #[test]
    fn kruskal_matches_prim() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for n in [2usize, 5, 40, 200] {
            let mut edges = Vec::new();
            for i in 0..n {
                for j in i + 1..n {
                    edges.push(Edge::new(i, j, rng.random_range(0..50) as f64));
                }
            }
            let total = mst(&WeightedEdgeList::new(edges.clone()), n).unwrap().total_weight();
            // Prim on the explicit matrix.
            let mut w = vec![vec![f64::INFINITY; n]; n];
            for e in &edges {
                w[e.i][e.j] = e.w;
                w[e.j][e.i] = e.w;
            }
            let mut seen = vec![false; n];
            let mut best = w[0].clone();
            seen[0] = true;
            let mut prim = 0.0;
            for _ in 1..n {
                let v = (0..n).filter(|&v| !seen[v]).min_by(|&a, &b| best[a].total_cmp(&best[b])).unwrap();
                seen[v] = true;
                prim += best[v];
                for u in 0..n {
                    best[u] = best[u].min(w[v][u]);
                }
            }
            assert_eq!(total, prim);
        }
    }

    #[test]
    fn coincident_points_merge_at_zero() {
        let ps = PointSet::from_xy(&[(2.0, 2.0); 5]);
        let d = hdbscan(&ps, 5).unwrap();
        assert_eq!(d.merge_eps(), vec![0.0; 4]);
    }

    #[test]
    fn three_points_two_merges() {
        let ps = PointSet::from_xy(&[(0.0, 0.0), (1.0, 0.0), (5.0, 0.0)]);
        let d = hdbscan_oracle(&ps, 2).unwrap();
        assert_eq!(d.merge_eps(), vec![1.0, 4.0]);
        assert_eq!(hdbscan(&ps, 2).unwrap(), d);
    }

    #[test]
    fn tree_weight_matches_complete_graph() {
        for (seed, min_pts) in [(2, 2), (3, 3), (4, 4), (5, 5), (6, 7)] {
            let ps = random(300, seed);
            let cd = core_distances(&ps, min_pts).unwrap();
            let fast = mst(&candidate_edges(&ps, &cd).unwrap(), ps.len()).unwrap();
            let slow = mreach_mst_oracle(&ps, &cd).unwrap();
            let mut a: Vec<f64> = fast.edges.iter().map(|e| e.w).collect();
            let mut b: Vec<f64> = slow.edges.iter().map(|e| e.w).collect();
            a.sort_by(f64::total_cmp);
            b.sort_by(f64::total_cmp);
            assert_eq!(a, b, "seed {seed}, min_pts {min_pts}");
        }
    }

    #[test]
    fn heavy_duplicates_keep_the_tree_small_and_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(30);
        let sites: Vec<(f64, f64)> = (0..12).map(|_| (rng.random_range(0..5) as f64, rng.random_range(0..5) as f64)).collect();
        let pts: Vec<(f64, f64)> = (0..400).map(|i| sites[i % sites.len()]).collect();
        let ps = PointSet::from_xy(&pts);
        for min_pts in [2, 5, 40] {
            let cd = core_distances(&ps, min_pts).unwrap();
            let cand = candidate_edges(&ps, &cd).unwrap();
            assert!(cand.len() < 2 * ps.len(), "{} candidates", cand.len());
            let mut a: Vec<f64> = mst(&cand, ps.len()).unwrap().edges.iter().map(|e| e.w).collect();
            let mut b: Vec<f64> = mreach_mst_oracle(&ps, &cd).unwrap().edges.iter().map(|e| e.w).collect();
            a.sort_by(f64::total_cmp);
            b.sort_by(f64::total_cmp);
            assert_eq!(a, b, "min_pts {min_pts}");
        }
    }

    #[test]
    fn cuts_match_dbscan_star() {
        let ps = random(300, 8);
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for min_pts in [1, 4] {
            let d = hdbscan(&ps, min_pts).unwrap();
            for _ in 0..30 {
                let eps: f64 = rng.random_range(0.05..2.0);
                let want = dbscan_oracle(&ps, &Params::new(eps, min_pts, Variant::DbscanStar).unwrap()).unwrap();
                assert_eq!(extract_at(&d, eps, &ps, min_pts).unwrap(), want);
            }
        }
    }

    #[test]
    fn extreme_cuts() {
        let ps = random(50, 4);
        let d = hdbscan(&ps, 3).unwrap();
        assert_eq!(extract_at(&d, 0.0, &ps, 3).unwrap().noise_count(), 50);
        assert_eq!(extract_at(&d, f64::INFINITY, &ps, 3).unwrap().cluster_sizes(), vec![50]);
    }
}
