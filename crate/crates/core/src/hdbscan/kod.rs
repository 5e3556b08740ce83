//! Order-k Delaunay edges by recursive point removal.
//!
//! A pair `(p, q)` admits a circle with at most `k` points inside exactly when
//! it is a Delaunay edge of `D \ X` for some `X` of at most `k` points. So for
//! every point `p` we enumerate the stars of `p` in `D \ X`, growing `X` one
//! current neighbour of `p` at a time: removing a non-neighbour never changes
//! the star of `p`, so nothing is missed.
//!
//! Each star is found by gift-wrapping around `p` with the exact predicates.
//! Only the points within `k + 1` Delaunay hops of `p` can take part. Points
//! inside a circle are connected in the Delaunay graph through points inside
//! the same circle, so every neighbour of `p` in `D \ X` lies in that ring,
//! and the wrap restricted to the ring picks the same successor at each step
//! as the wrap over all of `D \ X`.
//!
//! Duplicate locations are handled once, with their multiplicity as the cost
//! of removing them.

use std::cmp::Ordering;
use std::collections::{HashSet, VecDeque};

use crate::geometry::predicates::{cmp_dist, inside_circle_sos, orient2d, strictly_between, P};
use crate::geometry::{triangulate, Edge, PointSet, Sites, WeightedEdgeList};
use crate::error::Result;
use crate::Scalar;

/// Pairs `(p, q)` for which some circle through both has at most `k` points
/// strictly inside. Weights are left at zero.
pub fn kod_edges<T: Scalar>(ps: &PointSet<T>, k: usize) -> Result<WeightedEdgeList<T>> {
    ps.require_dim(2)?;
    let all: Vec<usize> = (0..ps.len()).collect();
    let sites = Sites::new(ps, &all);
    let pairs = kod_location_pairs(&sites, k);
    Ok(sites
        .expand(&pairs)
        .into_iter()
        .map(|(i, j)| Edge::new(i, j, T::zero()))
        .collect())
}

/// A sparser stand-in for [`kod_edges`] when only the spanning structure
/// matters: the smallest index of every location carries its location's
/// edges and its copies hang off it. Coincident points have equal core
/// distances, so any minimum spanning tree of the full set under mutual
/// reachability has the same weights as one of this set.
pub(crate) fn kod_spanning_pairs<T: Scalar>(ps: &PointSet<T>, k: usize) -> Result<Vec<(usize, usize)>> {
    ps.require_dim(2)?;
    let all: Vec<usize> = (0..ps.len()).collect();
    let sites = Sites::new(ps, &all);
    let rep = |l: u32| sites.groups[l as usize][0];
    let mut out: Vec<(usize, usize)> = kod_location_pairs(&sites, k)
        .into_iter()
        .map(|(u, v)| (rep(u).min(rep(v)), rep(u).max(rep(v))))
        .collect();
    for g in &sites.groups {
        out.extend(g[1..].iter().map(|&i| (g[0], i)));
    }
    out.sort_unstable();
    Ok(out)
}

fn kod_location_pairs(sites: &Sites, k: usize) -> Vec<(u32, u32)> {
    let locs = &sites.locs;
    let m = locs.len();
    let mesh = triangulate(locs);
    if k == 0 || m < 3 {
        return mesh.edges;
    }
    let weight: Vec<usize> = sites.groups.iter().map(Vec::len).collect();
    let adj = mesh.adjacency(m);
    let mut out: Vec<(u32, u32)> = Vec::new();
    let mut dist = vec![usize::MAX; m];
    for p in 0..m {
        let ring = ring(&adj, p, k + 1, &mut dist);
        let mut seen: HashSet<Vec<u32>> = HashSet::new();
        let mut found: HashSet<u32> = HashSet::new();
        explore(locs, &weight, p as u32, &ring, &mut Vec::new(), 0, k, &mut seen, &mut found);
        out.extend(found.into_iter().filter(|&q| q > p as u32).map(|q| (p as u32, q)));
    }
    out.sort_unstable();
    out
}

/// Locations within `radius` hops of `p`, `p` excluded. `dist` is scratch
/// space left all `usize::MAX` on return.
fn ring(adj: &[Vec<u32>], p: usize, radius: usize, dist: &mut [usize]) -> Vec<u32> {
    let mut order = vec![p as u32];
    let mut queue = VecDeque::from([p as u32]);
    dist[p] = 0;
    while let Some(u) = queue.pop_front() {
        let d = dist[u as usize];
        if d == radius {
            continue;
        }
        for &v in &adj[u as usize] {
            if dist[v as usize] == usize::MAX {
                dist[v as usize] = d + 1;
                order.push(v);
                queue.push_back(v);
            }
        }
    }
    for &u in &order {
        dist[u as usize] = usize::MAX;
    }
    order.remove(0);
    order
}

#[allow(clippy::too_many_arguments)]
fn explore(
    locs: &[P],
    weight: &[usize],
    p: u32,
    ring: &[u32],
    removed: &mut Vec<u32>,
    cost: usize,
    k: usize,
    seen: &mut HashSet<Vec<u32>>,
    found: &mut HashSet<u32>,
) {
    let mut key = removed.clone();
    key.sort_unstable();
    if !seen.insert(key) {
        return;
    }
    let cand: Vec<(u32, P)> = ring
        .iter()
        .copied()
        .filter(|v| !removed.contains(v))
        .map(|v| (v, locs[v as usize]))
        .collect();
    let nbrs = star(locs[p as usize], &cand);
    found.extend(nbrs.iter().copied());
    for &y in &nbrs {
        let c = cost + weight[y as usize];
        if c <= k {
            removed.push(y);
            explore(locs, weight, p, ring, removed, c, k, seen, found);
            removed.pop();
        }
    }
}

/// Delaunay neighbours of `p` among `cand` (which must not contain `p`).
fn star(p: P, cand: &[(u32, P)]) -> Vec<u32> {
    let Some(&start) = cand
        .iter()
        .min_by(|a, b| cmp_dist(p, a.1, b.1))
    else {
        return Vec::new();
    };
    let mut out = vec![start.0];
    let mut cur = start;
    let mut closed = false;
    for _ in 0..cand.len() {
        match next(p, cur.1, cand, Ordering::Greater) {
            Some(z) if z.0 == start.0 => {
                closed = true;
                break;
            }
            Some(z) => {
                out.push(z.0);
                cur = z;
            }
            None => break,
        }
    }
    if !closed {
        cur = start;
        for _ in 0..cand.len() {
            match next(p, cur.1, cand, Ordering::Less) {
                Some(z) if !out.contains(&z.0) => {
                    out.push(z.0);
                    cur = z;
                }
                _ => break,
            }
        }
    }
    out
}

/// Next neighbour of `p` after `y`, turning counter-clockwise when `side` is
/// `Greater` and clockwise when it is `Less`: the third vertex of the
/// Delaunay triangle on that side of `p y`, or else the nearest point on the
/// ray opposite to `y`.
fn next(p: P, y: P, cand: &[(u32, P)], side: Ordering) -> Option<(u32, P)> {
    let mut best: Option<(u32, P)> = None;
    for &z in cand {
        if orient2d(p, y, z.1) != side {
            continue;
        }
        best = match best {
            Some(b) if inside_circle_sos(p, y, b.1, z.1) != Ordering::Greater => Some(b),
            _ => Some(z),
        };
    }
    if best.is_some() {
        return best;
    }
    cand.iter()
        .copied()
        .filter(|z| orient2d(p, y, z.1) == Ordering::Equal && strictly_between(y, z.1, p))
        .min_by(|a, b| cmp_dist(p, a.1, b.1))
}
