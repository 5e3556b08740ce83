//! Planar Delaunay triangulation by randomized incremental insertion.
//!
//! The structure is the usual Bowyer-Watson cavity retriangulation over a
//! triangle mesh closed by "ghost" triangles that share a vertex at infinity.
//! A ghost `(a, b, ∞)` stands for the open half-plane left of `a → b`, so
//! points outside the hull are located and inserted exactly like interior
//! ones. All decisions go through the exact predicates, with cocircular ties
//! broken by the symbolic perturbation from [`predicates`](super::predicates).
//!
//! Duplicate locations are collapsed before triangulating; every copy of a
//! location inherits the edges of its representative and is joined to the
//! other copies.

use std::cmp::Ordering;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::predicates::{incircle_sos, lex_cmp, orient2d, strictly_between, P};
use super::{dist, Edge, PointSet, WeightedEdgeList};
use crate::error::{invalid, Result};
use crate::Scalar;

const GHOST: u32 = u32::MAX;
const NONE: u32 = u32::MAX;

/// Delaunay triangulation of a subset of a planar point set.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Triangulation {
    /// Counter-clockwise triangles over one representative index per
    /// distinct location.
    pub triangles: Vec<[usize; 3]>,
    /// Undirected edges `(i, j)` with `i < j`, sorted, over all input
    /// indices including duplicate copies.
    pub edges: Vec<(usize, usize)>,
}

/// Delaunay edges of the whole point set, weighted by Euclidean length.
pub fn delaunay<T: Scalar>(ps: &PointSet<T>) -> Result<WeightedEdgeList<T>> {
    ps.require_dim(2)?;
    if ps.len() < 2 {
        return Err(invalid(format!("delaunay needs at least 2 points, got {}", ps.len())));
    }
    let all: Vec<usize> = (0..ps.len()).collect();
    let tri = delaunay_subset(ps, &all)?;
    Ok(tri
        .edges
        .iter()
        .map(|&(i, j)| Edge::new(i, j, dist(ps.point(i), ps.point(j))))
        .collect())
}

/// Delaunay triangulation of the points named by `indices`.
pub fn delaunay_subset<T: Scalar>(ps: &PointSet<T>, indices: &[usize]) -> Result<Triangulation> {
    ps.require_dim(2)?;
    let sites = Sites::new(ps, indices);
    let mesh = triangulate(&sites.locs);
    let triangles = mesh
        .triangles
        .iter()
        .map(|t| t.map(|v| sites.groups[v as usize][0]))
        .collect();
    Ok(Triangulation { triangles, edges: sites.expand(&mesh.edges) })
}

/// Distinct locations of a point subset together with their copies.
pub(crate) struct Sites {
    pub locs: Vec<P>,
    /// Input indices per location, ascending.
    pub groups: Vec<Vec<usize>>,
}

impl Sites {
    pub fn new<T: Scalar>(ps: &PointSet<T>, indices: &[usize]) -> Self {
        let mut order: Vec<usize> = indices.to_vec();
        order.sort_by(|&a, &b| lex_cmp(ps.xy(a), ps.xy(b)).then(a.cmp(&b)));
        let mut locs: Vec<P> = Vec::new();
        let mut groups: Vec<Vec<usize>> = Vec::new();
        for i in order {
            let p = ps.xy(i);
            match locs.last() {
                Some(&last) if last == p => groups.last_mut().expect("parallel").push(i),
                _ => {
                    locs.push(p);
                    groups.push(vec![i]);
                }
            }
        }
        Sites { locs, groups }
    }

    /// Expands location-level edges to index-level edges, adding the pairs
    /// inside each group of copies.
    pub fn expand(&self, edges: &[(u32, u32)]) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for g in &self.groups {
            for (a, &i) in g.iter().enumerate() {
                for &j in &g[a + 1..] {
                    out.push((i.min(j), i.max(j)));
                }
            }
        }
        for &(u, v) in edges {
            for &i in &self.groups[u as usize] {
                for &j in &self.groups[v as usize] {
                    out.push((i.min(j), i.max(j)));
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// Triangulation over distinct locations.
pub(crate) struct Mesh {
    pub triangles: Vec<[u32; 3]>,
    /// Sorted location pairs `(u, v)` with `u < v`.
    pub edges: Vec<(u32, u32)>,
}

impl Mesh {
    /// Adjacency lists over the locations.
    pub fn adjacency(&self, n: usize) -> Vec<Vec<u32>> {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &self.edges {
            adj[u as usize].push(v);
            adj[v as usize].push(u);
        }
        adj
    }
}

#[derive(Clone, Copy, Debug)]
struct Tri {
    v: [u32; 3],
    /// `n[k]` is the triangle across the edge opposite `v[k]`.
    n: [u32; 3],
    alive: bool,
}

impl Tri {
    fn is_ghost(&self) -> bool {
        self.v[2] == GHOST
    }
}

/// Triangulates pairwise distinct locations.
pub(crate) fn triangulate(locs: &[P]) -> Mesh {
    let m = locs.len();
    if m < 2 {
        return Mesh { triangles: Vec::new(), edges: Vec::new() };
    }
    let mut order: Vec<u32> = (0..m as u32).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(m as u64);
    order.shuffle(&mut rng);

    let (a, b) = (order[0], order[1]);
    let third = (2..m).find(|&k| orient2d(locs[a as usize], locs[b as usize], locs[order[k] as usize]) != Ordering::Equal);
    let Some(third) = third else {
        return collinear_path(locs);
    };
    order.swap(2, third);

    let mut dt = Builder::new(locs, order[0], order[1], order[2]);
    for &p in &order[3..] {
        dt.insert(p);
    }
    dt.finish()
}

/// Path through collinear locations in lexicographic order.
fn collinear_path(locs: &[P]) -> Mesh {
    let mut order: Vec<u32> = (0..locs.len() as u32).collect();
    order.sort_by(|&a, &b| lex_cmp(locs[a as usize], locs[b as usize]));
    let mut edges: Vec<(u32, u32)> = order.windows(2).map(|w| (w[0].min(w[1]), w[0].max(w[1]))).collect();
    edges.sort_unstable();
    Mesh { triangles: Vec::new(), edges }
}

struct Builder<'a> {
    locs: &'a [P],
    tris: Vec<Tri>,
    free: Vec<u32>,
    last: u32,
    walk_state: u32,
    // Scratch buffers reused across insertions.
    cavity: Vec<u32>,
    stack: Vec<u32>,
    in_cavity: Vec<bool>,
    boundary: Vec<(u32, u32, u32)>,
}

impl<'a> Builder<'a> {
    fn new(locs: &'a [P], a: u32, b: u32, c: u32) -> Self {
        let (a, b, c) = if orient2d(locs[a as usize], locs[b as usize], locs[c as usize]) == Ordering::Greater {
            (a, b, c)
        } else {
            (a, c, b)
        };
        // 0: the real triangle; 1..=3: ghosts across its edges.
        let tris = vec![
            Tri { v: [a, b, c], n: [2, 3, 1], alive: true },
            Tri { v: [b, a, GHOST], n: [3, 2, 0], alive: true },
            Tri { v: [c, b, GHOST], n: [1, 3, 0], alive: true },
            Tri { v: [a, c, GHOST], n: [2, 1, 0], alive: true },
        ];
        Builder {
            locs,
            tris,
            free: Vec::new(),
            last: 0,
            walk_state: 0x9e37_79b9,
            cavity: Vec::new(),
            stack: Vec::new(),
            in_cavity: vec![false; 4],
            boundary: Vec::new(),
        }
    }

    fn loc(&self, v: u32) -> P {
        self.locs[v as usize]
    }

    fn conflicts(&self, t: u32, p: P) -> bool {
        let tri = &self.tris[t as usize];
        let [a, b, c] = tri.v;
        if tri.is_ghost() {
            let (a, b) = (self.loc(a), self.loc(b));
            match orient2d(a, b, p) {
                Ordering::Greater => true,
                Ordering::Equal => strictly_between(a, b, p),
                Ordering::Less => false,
            }
        } else {
            incircle_sos(self.loc(a), self.loc(b), self.loc(c), p) == Ordering::Greater
        }
    }

    fn next_random(&mut self) -> u32 {
        // xorshift; only used to break walk cycles.
        let mut x = self.walk_state;
        x ^= x << 13;
        x ^= x >> 17;
        x ^= x << 5;
        self.walk_state = x;
        x
    }

    /// Stochastic visibility walk towards `p`; returns a triangle in conflict
    /// with `p`.
    fn locate(&mut self, p: P) -> u32 {
        let mut t = self.last;
        if !self.tris[t as usize].alive {
            t = self.tris.iter().position(|t| t.alive).expect("mesh is never empty") as u32;
        }
        if self.tris[t as usize].is_ghost() {
            t = self.tris[t as usize].n[2];
        }
        'walk: loop {
            let tri = self.tris[t as usize];
            let start = self.next_random() % 3;
            for k in 0..3 {
                let e = ((start + k) % 3) as usize;
                let u = tri.v[(e + 1) % 3];
                let w = tri.v[(e + 2) % 3];
                if orient2d(self.loc(u), self.loc(w), p) == Ordering::Less {
                    let next = tri.n[e];
                    if self.tris[next as usize].is_ghost() {
                        return next;
                    }
                    t = next;
                    continue 'walk;
                }
            }
            return t;
        }
    }

    fn alloc(&mut self, tri: Tri) -> u32 {
        if let Some(id) = self.free.pop() {
            self.tris[id as usize] = tri;
            self.in_cavity[id as usize] = false;
            id
        } else {
            self.tris.push(tri);
            self.in_cavity.push(false);
            (self.tris.len() - 1) as u32
        }
    }

    fn insert(&mut self, pv: u32) {
        let p = self.loc(pv);
        let start = self.locate(p);
        debug_assert!(self.conflicts(start, p));

        // Grow the cavity of triangles whose circumdisk contains p.
        self.cavity.clear();
        self.boundary.clear();
        self.stack.clear();
        self.stack.push(start);
        self.in_cavity[start as usize] = true;
        while let Some(t) = self.stack.pop() {
            self.cavity.push(t);
            let tri = self.tris[t as usize];
            for k in 0..3 {
                let nb = tri.n[k];
                if self.in_cavity[nb as usize] {
                    continue;
                }
                if self.conflicts(nb, p) {
                    self.in_cavity[nb as usize] = true;
                    self.stack.push(nb);
                } else {
                    self.boundary.push((tri.v[(k + 1) % 3], tri.v[(k + 2) % 3], nb));
                }
            }
        }

        // Star the cavity boundary from p. Boundary edges form one cycle, so
        // each vertex starts exactly one of them.
        let mut boundary = std::mem::take(&mut self.boundary);
        boundary.sort_unstable_by_key(|&(u, _, _)| u);
        let mut created: Vec<u32> = Vec::with_capacity(boundary.len());
        for &(u, w, outside) in &boundary {
            let id = self.alloc(Tri { v: [u, w, pv], n: [NONE, NONE, outside], alive: true });
            created.push(id);
            let old = &mut self.tris[outside as usize];
            let slot = (0..3)
                .find(|&s| self.in_cavity[old.n[s] as usize] && {
                    let (a, b) = (old.v[(s + 1) % 3], old.v[(s + 2) % 3]);
                    a == w && b == u
                })
                .expect("outside triangle borders the cavity");
            old.n[slot] = id;
        }
        let by_start = |v: u32| -> u32 {
            let k = boundary
                .binary_search_by_key(&v, |&(u, _, _)| u)
                .expect("boundary is a closed cycle");
            created[k]
        };
        for (k, &(_, w, _)) in boundary.iter().enumerate() {
            // Across (w, p) sits the new triangle starting at w, which sees
            // this one across its (p, w) edge.
            let id = created[k];
            let next = by_start(w);
            self.tris[id as usize].n[0] = next;
            self.tris[next as usize].n[1] = id;
        }
        for &id in &created {
            let tri = &mut self.tris[id as usize];
            if let Some(g) = tri.v.iter().position(|&v| v == GHOST) {
                let r = (g + 1) % 3;
                tri.v.rotate_left(r);
                tri.n.rotate_left(r);
            }
        }

        for &t in &self.cavity {
            self.tris[t as usize].alive = false;
            self.in_cavity[t as usize] = false;
            self.free.push(t);
        }
        for &id in &created {
            self.in_cavity[id as usize] = false;
        }
        self.last = created[0];
        self.boundary = boundary;
    }

    fn finish(self) -> Mesh {
        let mut triangles = Vec::new();
        let mut edges = Vec::new();
        for t in self.tris.iter().filter(|t| t.alive && !t.is_ghost()) {
            triangles.push(t.v);
            for k in 0..3 {
                let (a, b) = (t.v[k], t.v[(k + 1) % 3]);
                edges.push((a.min(b), a.max(b)));
            }
        }
        edges.sort_unstable();
        edges.dedup();
        Mesh { triangles, edges }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::predicates::incircle_sos;
    use proptest::prelude::*;
    use rand::Rng;

    fn rand_points(n: usize, seed: u64) -> PointSet<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts: Vec<(f64, f64)> = (0..n).map(|_| (rng.random::<f64>(), rng.random::<f64>())).collect();
        PointSet::from_xy(&pts)
    }

    /// Empty-circle oracle: `(i, j)` is an edge iff some third location `k`
    /// spans a circle through `i, j, k` that is empty under the perturbation,
    /// or the pair is a hull edge with nothing beyond it.
    fn oracle_edges(locs: &[P]) -> Vec<(u32, u32)> {
        let m = locs.len();
        let mut out = Vec::new();
        let all_collinear = (2..m).all(|k| orient2d(locs[0], locs[1], locs[k]) == Ordering::Equal);
        if all_collinear {
            return collinear_path(locs).edges;
        }
        for i in 0..m {
            for j in i + 1..m {
                let (a, b) = (locs[i], locs[j]);
                if (0..m).any(|k| {
                    k != i && k != j && orient2d(a, b, locs[k]) == Ordering::Equal && strictly_between(a, b, locs[k])
                }) {
                    continue;
                }
                // A circle through a, b is empty iff on each side of ab the
                // extreme candidate admits it.
                let left: Vec<usize> = (0..m).filter(|&k| orient2d(a, b, locs[k]) == Ordering::Greater).collect();
                let right: Vec<usize> = (0..m).filter(|&k| orient2d(a, b, locs[k]) == Ordering::Less).collect();
                let empty_with = |c: usize| {
                    let c = locs[c];
                    let (x, y, z) = if orient2d(a, b, c) == Ordering::Greater { (a, b, c) } else { (b, a, c) };
                    (0..m).all(|s| {
                        let s = locs[s];
                        s == a || s == b || s == c || incircle_sos(x, y, z, s) != Ordering::Greater
                    })
                };
                let edge = if left.is_empty() || right.is_empty() {
                    // Hull side: the open half-plane itself is an empty circle.
                    true
                } else {
                    left.iter().chain(&right).any(|&c| empty_with(c))
                };
                if edge {
                    out.push((i as u32, j as u32));
                }
            }
        }
        out
    }

    #[test]
    fn triangle_has_three_edges() {
        let ps = PointSet::from_xy(&[(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)]);
        assert_eq!(delaunay(&ps).unwrap().pairs(), vec![(0, 1), (0, 2), (1, 2)]);
    }

    #[test]
    fn square_gets_one_diagonal() {
        let ps = PointSet::from_xy(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]);
        let e = delaunay(&ps).unwrap().pairs();
        assert_eq!(e.len(), 5);
        let diagonals = e.iter().filter(|&&p| p == (0, 2) || p == (1, 3)).count();
        assert_eq!(diagonals, 1);
    }

    #[test]
    fn collinear_input_yields_sorted_path() {
        let ps = PointSet::from_xy(&[(3.0, 3.0), (0.0, 0.0), (2.0, 2.0), (1.0, 1.0)]);
        assert_eq!(delaunay(&ps).unwrap().pairs(), vec![(0, 2), (1, 3), (2, 3)]);
    }

    #[test]
    fn duplicates_are_joined_and_share_edges() {
        let ps = PointSet::from_xy(&[(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (0.0, 0.0)]);
        let e = delaunay(&ps).unwrap().pairs();
        assert_eq!(e, vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
    }

    #[test]
    fn rejects_bad_input() {
        let ps = PointSet::from_xy(&[(0.0, 0.0)]);
        assert!(delaunay(&ps).is_err());
        let ps3 = PointSet::from_flat(3, vec![0.0, 0.0, 0.0, 1.0, 1.0, 1.0]).unwrap();
        assert!(delaunay(&ps3).is_err());
    }

    #[test]
    fn random_sets_match_empty_circle_oracle() {
        for seed in 0..40 {
            let ps = rand_points(30, seed);
            let sites = Sites::new(&ps, &(0..ps.len()).collect::<Vec<_>>());
            assert_eq!(triangulate(&sites.locs).edges, oracle_edges(&sites.locs), "seed {seed}");
        }
    }

    #[test]
    fn integer_grids_match_empty_circle_oracle() {
        for (w, h) in [(2, 2), (3, 3), (4, 5), (6, 6), (1, 7)] {
            let mut pts = Vec::new();
            for x in 0..w {
                for y in 0..h {
                    pts.push((x as f64, y as f64));
                }
            }
            let ps = PointSet::from_xy(&pts);
            let sites = Sites::new(&ps, &(0..ps.len()).collect::<Vec<_>>());
            let mesh = triangulate(&sites.locs);
            assert_eq!(mesh.edges, oracle_edges(&sites.locs), "{w}x{h}");
            if w > 1 && h > 1 {
                assert_eq!(mesh.triangles.len(), 2 * (w - 1) * (h - 1));
            }
        }
    }

    #[test]
    fn cocircular_ring_matches_oracle() {
        // Integer points on the circle x² + y² = 25 plus the centre.
        let ring = [(5, 0), (4, 3), (3, 4), (0, 5), (-3, 4), (-4, 3), (-5, 0), (-4, -3), (-3, -4), (0, -5), (3, -4), (4, -3)];
        let mut pts: Vec<(f64, f64)> = ring.iter().map(|&(x, y)| (x as f64, y as f64)).collect();
        let ps = PointSet::from_xy(&pts);
        let sites = Sites::new(&ps, &(0..ps.len()).collect::<Vec<_>>());
        assert_eq!(triangulate(&sites.locs).edges, oracle_edges(&sites.locs));
        pts.push((0.0, 0.0));
        let ps = PointSet::from_xy(&pts);
        let sites = Sites::new(&ps, &(0..ps.len()).collect::<Vec<_>>());
        assert_eq!(triangulate(&sites.locs).edges, oracle_edges(&sites.locs));
    }

    proptest! {
        #[test]
        fn snapped_points_match_oracle(raw in prop::collection::vec((0i32..6, 0i32..6), 2..25)) {
            let pts: Vec<(f64, f64)> = raw.iter().map(|&(x, y)| (x as f64 * 0.5, y as f64 * 0.5)).collect();
            let ps = PointSet::from_xy(&pts);
            let sites = Sites::new(&ps, &(0..ps.len()).collect::<Vec<_>>());
            let mesh = triangulate(&sites.locs);
            prop_assert_eq!(&mesh.edges, &oracle_edges(&sites.locs));
            let m = sites.locs.len();
            if m >= 3 {
                prop_assert!(mesh.edges.len() <= 3 * m - 6 || mesh.triangles.is_empty());
            }
        }

        #[test]
        fn edge_count_is_planar(seed in 0u64..1000, n in 3usize..80) {
            let ps = rand_points(n, seed);
            let e = delaunay(&ps).unwrap();
            prop_assert!(e.len() <= 3 * n - 6);
        }
    }
}
