//! Exact DBSCAN and DBSCAN* on a box graph.
//!
//! The pipeline has four steps: build the box graph; mark core points (a box
//! holding at least `min_pts` points is core wholesale, other points count
//! neighbours in adjacent boxes and stop early); join boxes whose core points
//! come within ε and take connected components; finally attach each non-core
//! point to its nearest core point if that one is within ε.
//!
//! Next to it live the quadratic reference ([`dbscan_oracle`]) and the
//! textbook expansion algorithm ([`original_dbscan`]) with its seed counter.

mod labeling;
mod meter;
mod oracle;
mod original;

pub use labeling::{is_refinement, Label, Labeling};
pub use meter::{AuditEvent, Meter};
pub use oracle::{dbscan_oracle, dbscan_oracle_capped, ORACLE_CAP};
pub use original::original_dbscan;

use petgraph::unionfind::UnionFind;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::boxgraph::{BoxGraph, BoxMode};
use crate::error::{invalid, Result};
use crate::geometry::{delaunay_bccp, point_box_dist, PointSet};
use crate::Scalar;

/// Which flat clustering to produce.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Variant {
    /// Non-core points within ε of a core point join its cluster.
    #[default]
    Dbscan,
    /// Only core points are clustered.
    DbscanStar,
}

/// How two boxes are tested for a core pair within ε.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum PairCheck {
    /// Closest pair from a triangulation of both boxes when both are full
    /// (planar only); quadratic scan otherwise.
    Delaunay,
    /// Scan the smaller box in random order against the other, skipping
    /// points too far from the other box, stopping at the first hit.
    #[default]
    RandomizedBrute,
}

/// Clustering parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params<T> {
    pub eps: T,
    /// Points needed in a closed ε-ball (the centre included) to be core.
    pub min_pts: usize,
    pub variant: Variant,
}

impl<T: Scalar> Params<T> {
    pub fn new(eps: T, min_pts: usize, variant: Variant) -> Result<Self> {
        let p = Params { eps, min_pts, variant };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps > T::zero()) || !self.eps.is_finite() {
            return Err(invalid(format!("eps must be positive and finite, got {}", self.eps)));
        }
        if self.min_pts == 0 {
            return Err(invalid("min_pts must be at least 1"));
        }
        Ok(())
    }

    pub fn with_eps(self, eps: T) -> Self {
        Params { eps, ..self }
    }

    pub fn with_variant(self, variant: Variant) -> Self {
        Params { variant, ..self }
    }
}

fn check_graph<T: Scalar>(bg: &BoxGraph<T>, ps: &PointSet<T>, params: &Params<T>) -> Result<()> {
    params.validate()?;
    if bg.eps() != params.eps {
        return Err(invalid(format!(
            "box graph was built for eps {} but parameters ask for {}",
            bg.eps(),
            params.eps
        )));
    }
    let covered: usize = bg.boxes().iter().map(|b| b.len()).sum();
    if covered != ps.len() {
        return Err(invalid("box graph was built for a different point set"));
    }
    Ok(())
}

/// Core-point mask.
pub fn find_core_points<T: Scalar>(
    bg: &BoxGraph<T>,
    ps: &PointSet<T>,
    params: &Params<T>,
    meter: &mut Meter,
) -> Result<Vec<bool>> {
    check_graph(bg, ps, params)?;
    let min_pts = params.min_pts;
    let eps = params.eps;
    let mut core = vec![false; ps.len()];
    for b in bg.boxes() {
        if b.len() >= min_pts {
            for &p in &b.points {
                core[p] = true;
            }
            continue;
        }
        for &p in &b.points {
            // The whole box is within ε of p.
            let mut count = b.len();
            'scan: for nb in reachable_boxes(bg, ps, p, b.id, eps) {
                for &q in &bg.boxes()[nb].points {
                    meter.distance(p, q);
                    if ps.dist(p, q) <= eps {
                        count += 1;
                        if count >= min_pts {
                            break 'scan;
                        }
                    }
                }
            }
            core[p] = count >= min_pts;
        }
    }
    Ok(core)
}

/// Neighbours of box `b` that can hold points within ε of `p`, nearest
/// first. Costs box distances only.
fn reachable_boxes<T: Scalar>(bg: &BoxGraph<T>, ps: &PointSet<T>, p: usize, b: usize, eps: T) -> Vec<usize> {
    let x = ps.point(p);
    let mut near: Vec<(T, usize)> = bg
        .neighbors(b)
        .iter()
        .map(|&nb| {
            let nbox = &bg.boxes()[nb];
            (point_box_dist(x, &nbox.lo, &nbox.hi), nb)
        })
        .filter(|&(d, _)| d <= eps)
        .collect();
    near.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite").then(a.1.cmp(&b.1)));
    near.into_iter().map(|(_, nb)| nb).collect()
}

/// Cluster ids of the core points (canonical, `None` elsewhere).
pub fn cluster_cores<T: Scalar>(
    bg: &BoxGraph<T>,
    ps: &PointSet<T>,
    core: &[bool],
    params: &Params<T>,
    meter: &mut Meter,
    pair_check: PairCheck,
) -> Result<Vec<Option<usize>>> {
    check_graph(bg, ps, params)?;
    if core.len() != ps.len() {
        return Err(invalid("core mask does not match the point set"));
    }
    let eps = params.eps;
    let boxes = bg.boxes();
    let core_pts: Vec<Vec<usize>> = boxes
        .iter()
        .map(|b| b.points.iter().copied().filter(|&p| core[p]).collect())
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(meter.seed);
    let mut uf = UnionFind::<usize>::new(boxes.len());
    for a in 0..boxes.len() {
        if core_pts[a].is_empty() {
            continue;
        }
        for &b in bg.neighbors(a) {
            if b < a || core_pts[b].is_empty() || uf.equiv(a, b) {
                continue;
            }
            let joined = match pair_check {
                PairCheck::Delaunay => {
                    let full = boxes[a].len() >= params.min_pts && boxes[b].len() >= params.min_pts;
                    if full && ps.dim() == 2 {
                        let pair = delaunay_bccp(ps, &core_pts[a], &core_pts[b], &mut |i, j| meter.distance(i, j));
                        pair.dist <= eps
                    } else {
                        scan_pairs(ps, &core_pts[a], &core_pts[b], eps, meter)
                    }
                }
                PairCheck::RandomizedBrute => {
                    let (small, large) = if core_pts[a].len() <= core_pts[b].len() { (a, b) } else { (b, a) };
                    let mut outer = core_pts[small].clone();
                    let mut inner = core_pts[large].clone();
                    outer.shuffle(&mut rng);
                    inner.shuffle(&mut rng);
                    let target = &boxes[large];
                    outer.retain(|&p| point_box_dist(ps.point(p), &target.lo, &target.hi) <= eps);
                    scan_pairs(ps, &outer, &inner, eps, meter)
                }
            };
            if joined {
                uf.union(a, b);
            }
        }
    }
    let mut ids: Vec<Option<usize>> = vec![None; ps.len()];
    let mut canon: Vec<Option<usize>> = vec![None; boxes.len()];
    let mut next = 0;
    for p in 0..ps.len() {
        if !core[p] {
            continue;
        }
        let root = uf.find(bg.box_of(p));
        let id = *canon[root].get_or_insert_with(|| {
            next += 1;
            next - 1
        });
        ids[p] = Some(id);
    }
    Ok(ids)
}

/// Whether some pair across the two lists is within ε; stops at the first.
fn scan_pairs<T: Scalar>(ps: &PointSet<T>, xs: &[usize], ys: &[usize], eps: T, meter: &mut Meter) -> bool {
    for &p in xs {
        for &q in ys {
            meter.distance(p, q);
            if ps.dist(p, q) <= eps {
                return true;
            }
        }
    }
    false
}

/// Final labels: core points keep their cluster; for DBSCAN every other
/// point joins the cluster of its nearest core point (ties to the smaller
/// index) when that point is within ε.
pub fn assign_borders<T: Scalar>(
    bg: &BoxGraph<T>,
    ps: &PointSet<T>,
    core: &[bool],
    ids: &[Option<usize>],
    params: &Params<T>,
    meter: &mut Meter,
) -> Result<Labeling> {
    check_graph(bg, ps, params)?;
    let mut labels: Vec<Label> = (0..ps.len())
        .map(|p| match ids[p] {
            Some(c) if core[p] => Label::Core(c),
            _ => Label::Noise,
        })
        .collect();
    if params.variant == Variant::DbscanStar {
        return Ok(Labeling::new(labels));
    }
    for b in bg.boxes() {
        if b.len() >= params.min_pts {
            continue;
        }
        for &p in &b.points {
            if core[p] {
                continue;
            }
            let mut best: Option<(T, usize)> = None;
            for nb in std::iter::once(b.id).chain(reachable_boxes(bg, ps, p, b.id, params.eps)) {
                for &q in &bg.boxes()[nb].points {
                    if !core[q] {
                        continue;
                    }
                    meter.distance(p, q);
                    let d = ps.dist(p, q);
                    if best.is_none_or(|(bd, bq)| d < bd || (d == bd && q < bq)) {
                        best = Some((d, q));
                    }
                }
            }
            if let Some((d, q)) = best {
                if d <= params.eps {
                    labels[p] = Label::Border(ids[q].expect("core points carry ids"));
                }
            }
        }
    }
    Ok(Labeling::new(labels))
}

/// DBSCAN or DBSCAN* through the box graph.
pub fn dbscan<T: Scalar>(
    ps: &PointSet<T>,
    params: &Params<T>,
    mode: BoxMode,
    pair_check: PairCheck,
    meter: &mut Meter,
) -> Result<Labeling> {
    params.validate()?;
    if ps.is_empty() {
        return Ok(Labeling::default());
    }
    let bg = BoxGraph::new(ps, params.eps, mode)?;
    let core = find_core_points(&bg, ps, params, meter)?;
    let ids = cluster_cores(&bg, ps, &core, params, meter, pair_check)?;
    assign_borders(&bg, ps, &core, &ids, params, meter)
}
