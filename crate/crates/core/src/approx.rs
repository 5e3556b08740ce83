//! δ-approximate DBSCAN* and HDBSCAN.
//!
//! A clustering `C` is δ-approximate at ε when every cluster of exact
//! DBSCAN* at `(1 − δ)ε` lies inside one cluster of `C` and every cluster of
//! `C` lies inside one cluster of exact DBSCAN* at ε.
//!
//! The flat version replaces the exact box-pair test by an approximate
//! bichromatic closest pair with factor `1 + α`, `α = δ / (1 − δ)`. The
//! hierarchy replaces the order-k Delaunay candidates by a cone graph: around
//! every point the plane is cut into sectors of angle at most `θ = √(2δ)` and
//! the point is joined to the `2·MinPts − 3` points of each sector that come
//! first along the sector's bisector.

use std::f64::consts::TAU;

use petgraph::unionfind::UnionFind;

use crate::boxgraph::{BoxGraph, BoxMode};
use crate::dbscan::{find_core_points, Label, Labeling, Meter, Params};
use crate::error::{invalid, Error, Result};
use crate::geometry::{bccp_counted, BccpMode, Edge, PointSet, WeightedEdgeList};
use crate::hdbscan::{core_distances, mst, CoreDistances, Dendrogram};
use crate::Scalar;

/// Approximation quality.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApproxParams {
    delta: f64,
}

impl ApproxParams {
    pub fn new(delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(invalid(format!("delta must lie in (0, 1), got {delta}")));
        }
        let p = ApproxParams { delta };
        // cos θ ≥ 1 − θ²/2 = 1 − δ; allow for the rounding of cos itself.
        if p.theta().cos() < (1.0 - delta) - 4.0 * f64::EPSILON {
            return Err(Error::Internal(format!("cos(theta) < 1 - delta for delta = {delta}")));
        }
        Ok(p)
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Closest-pair slack: `δ / (1 − δ)`, so that `(1 + α)(1 − δ) = 1`.
    pub fn alpha(&self) -> f64 {
        self.delta / (1.0 - self.delta)
    }

    /// Largest admissible cone angle, `√(2δ)`.
    pub fn theta(&self) -> f64 {
        (2.0 * self.delta).sqrt()
    }

    /// Number of sectors around each point.
    pub fn cones(&self) -> usize {
        (TAU / self.theta()).ceil() as usize
    }

    /// Actual sector angle `2π / cones() <= theta()`.
    pub fn sector_angle(&self) -> f64 {
        TAU / self.cones() as f64
    }

    /// Whether the sector angle satisfies `2 sin θ < cos² θ`, the condition
    /// under which the cone graph is known to give a δ-approximation.
    pub fn cone_condition_holds(&self) -> bool {
        let t = self.sector_angle();
        2.0 * t.sin() < t.cos().powi(2)
    }
}

/// Approximate DBSCAN* at `params.eps` (the variant field is ignored: only
/// core points are clustered).
pub fn approx_dbscan_star<T: Scalar>(ps: &PointSet<T>, params: &Params<T>, approx: ApproxParams) -> Result<Labeling> {
    let mode = BccpMode::Approx { alpha: T::of_f64(approx.alpha()) };
    approx_dbscan_star_with(ps, params, mode, &mut Meter::new())
}

/// [`approx_dbscan_star`] with an explicit box-pair test. `BccpMode::Exact`
/// gives exact DBSCAN*.
pub fn approx_dbscan_star_with<T: Scalar>(
    ps: &PointSet<T>,
    params: &Params<T>,
    mode: BccpMode<T>,
    meter: &mut Meter,
) -> Result<Labeling> {
    params.validate()?;
    if ps.is_empty() {
        return Ok(Labeling::default());
    }
    let eps = params.eps;
    let bg = BoxGraph::new(ps, eps, BoxMode::Grid)?;
    let core = find_core_points(&bg, ps, params, meter)?;
    let boxes = bg.boxes();
    let core_pts: Vec<Vec<usize>> = boxes
        .iter()
        .map(|b| b.points.iter().copied().filter(|&p| core[p]).collect())
        .collect();
    let mut uf = UnionFind::<usize>::new(boxes.len());
    for a in 0..boxes.len() {
        if core_pts[a].is_empty() {
            continue;
        }
        for &b in bg.neighbors(a) {
            if b < a || core_pts[b].is_empty() || uf.equiv(a, b) {
                continue;
            }
            let pair = bccp_counted(ps, &core_pts[a], &core_pts[b], mode, &mut |i, j| meter.distance(i, j))?;
            if pair.dist <= eps {
                uf.union(a, b);
            }
        }
    }
    let labels = (0..ps.len())
        .map(|p| if core[p] { Label::Core(uf.find(bg.box_of(p))) } else { Label::Noise })
        .collect();
    Ok(Labeling::new(labels))
}

/// Sector of the direction `(dx, dy)`: sectors are `[iφ, (i+1)φ)` measured
/// counter-clockwise from the positive x-axis. A zero vector goes to 0.
fn sector(dx: f64, dy: f64, cones: usize, angle: f64) -> usize {
    if dx == 0.0 && dy == 0.0 {
        return 0;
    }
    let mut a = dy.atan2(dx);
    if a < 0.0 {
        a += TAU;
    }
    ((a / angle) as usize).min(cones - 1)
}

/// Per point and sector, the `max(2·MinPts − 3, 1)` points with the smallest
/// projection onto the sector bisector (ties by index). Quadratic.
fn cone_selection<T: Scalar>(ps: &PointSet<T>, min_pts: usize, approx: ApproxParams) -> Vec<Vec<Vec<usize>>> {
    let k = (2 * min_pts).saturating_sub(3).max(1);
    let m = approx.cones();
    let phi = approx.sector_angle();
    let axes: Vec<(f64, f64)> = (0..m)
        .map(|c| {
            let a = (c as f64 + 0.5) * phi;
            (a.cos(), a.sin())
        })
        .collect();
    (0..ps.len())
        .map(|p| {
            let [px, py] = ps.xy(p);
            let mut cones: Vec<Vec<(f64, usize)>> = vec![Vec::new(); m];
            for q in (0..ps.len()).filter(|&q| q != p) {
                let [qx, qy] = ps.xy(q);
                let (dx, dy) = (qx - px, qy - py);
                let c = sector(dx, dy, m, phi);
                cones[c].push((dx * axes[c].0 + dy * axes[c].1, q));
            }
            cones
                .into_iter()
                .map(|mut v| {
                    v.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
                    v.truncate(k);
                    v.into_iter().map(|(_, q)| q).collect()
                })
                .collect()
        })
        .collect()
}

/// The cone graph weighted by mutual reachability distance.
pub fn theta_edge_set<T: Scalar>(ps: &PointSet<T>, min_pts: usize, approx: ApproxParams) -> Result<WeightedEdgeList<T>> {
    ps.require_dim(2)?;
    let cd = core_distances(ps, min_pts)?;
    Ok(theta_edges_with(ps, &cd, approx))
}

fn theta_edges_with<T: Scalar>(ps: &PointSet<T>, cd: &CoreDistances<T>, approx: ApproxParams) -> WeightedEdgeList<T> {
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for (p, cones) in cone_selection(ps, cd.min_pts, approx).into_iter().enumerate() {
        for q in cones.into_iter().flatten() {
            pairs.push((p.min(q), p.max(q)));
        }
    }
    pairs.sort_unstable();
    pairs.dedup();
    pairs
        .into_iter()
        .map(|(i, j)| Edge::new(i, j, ps.dist(i, j).max(cd.get(i)).max(cd.get(j))))
        .collect()
}

/// Hierarchy whose every cut is a δ-approximate DBSCAN* clustering.
pub fn approx_hdbscan<T: Scalar>(ps: &PointSet<T>, min_pts: usize, approx: ApproxParams) -> Result<Dendrogram<T>> {
    ps.require_dim(2)?;
    if !approx.cone_condition_holds() {
        log::warn!(
            "delta = {} gives cones of angle {:.3} rad, too wide for the approximation guarantee; results are unproven",
            approx.delta(),
            approx.sector_angle()
        );
    }
    let cd = core_distances(ps, min_pts)?;
    let edges = theta_edges_with(ps, &cd, approx);
    let tree = match mst(&edges, ps.len()) {
        Err(Error::Disconnected { components }) => {
            return Err(Error::Internal(format!("cone graph split into {components} components")))
        }
        r => r?,
    };
    Dendrogram::from_mst(ps.len(), &tree)
}
