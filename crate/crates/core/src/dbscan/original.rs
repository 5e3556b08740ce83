use super::{Label, Labeling, Meter, Params, Variant};
use crate::boxgraph::{BoxGraph, BoxMode};
use crate::error::Result;
use crate::geometry::PointSet;
use crate::Scalar;

/// The classic expansion algorithm, kept as a baseline for its work counts.
///
/// Every point has its ε-neighbourhood materialized exactly once (range
/// queries run over the grid box graph) and the reported size is added to
/// `meter.seeds`. Clusters grow seed by seed from each unvisited core point.
/// Non-core points are attached to their nearest core neighbour at the end,
/// so the result does not depend on discovery order.
pub fn original_dbscan<T: Scalar>(ps: &PointSet<T>, params: &Params<T>, meter: &mut Meter) -> Result<Labeling> {
    params.validate()?;
    let n = ps.len();
    if n == 0 {
        return Ok(Labeling::default());
    }
    let bg = BoxGraph::new(ps, params.eps, BoxMode::Grid)?;
    let query = |p: usize, meter: &mut Meter| -> Vec<usize> {
        let own = bg.box_of(p);
        let mut out = bg.boxes()[own].points.clone();
        for &nb in bg.neighbors(own) {
            for &q in &bg.boxes()[nb].points {
                meter.distance(p, q);
                if ps.dist(p, q) <= params.eps {
                    out.push(q);
                }
            }
        }
        meter.neighborhood(p, out.len());
        out
    };

    let mut visited = vec![false; n];
    let mut cluster: Vec<Option<usize>> = vec![None; n];
    let mut core = vec![false; n];
    let mut pending: Vec<(usize, Vec<usize>)> = Vec::new();
    let mut next = 0;
    for start in 0..n {
        if visited[start] {
            continue;
        }
        visited[start] = true;
        let hood = query(start, meter);
        if hood.len() < params.min_pts {
            pending.push((start, hood));
            continue;
        }
        let id = next;
        next += 1;
        core[start] = true;
        cluster[start] = Some(id);
        let mut queue = hood;
        while let Some(q) = queue.pop() {
            if visited[q] {
                continue;
            }
            visited[q] = true;
            let hq = query(q, meter);
            if hq.len() >= params.min_pts {
                core[q] = true;
                cluster[q] = Some(id);
                queue.extend(hq.into_iter().filter(|&r| !visited[r]));
            } else {
                pending.push((q, hq));
            }
        }
    }

    let mut labels: Vec<Label> = (0..n)
        .map(|p| match cluster[p] {
            Some(c) if core[p] => Label::Core(c),
            _ => Label::Noise,
        })
        .collect();
    if params.variant == Variant::Dbscan {
        for (p, hood) in pending {
            let nearest = hood
                .into_iter()
                .filter(|&q| core[q])
                .map(|q| (ps.dist(p, q), q))
                .min_by(|a, b| a.0.partial_cmp(&b.0).expect("finite").then(a.1.cmp(&b.1)));
            if let Some((_, q)) = nearest {
                labels[p] = Label::Border(cluster[q].expect("core points carry ids"));
            }
        }
    }
    Ok(Labeling::new(labels))
}
