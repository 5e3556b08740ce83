use petgraph::unionfind::UnionFind;

use super::{Label, Labeling, Params, Variant};
use crate::error::{Error, Result};
use crate::geometry::PointSet;
use crate::Scalar;

/// Default input size limit of the quadratic reference.
pub const ORACLE_CAP: usize = 2000;

/// Straight from the definitions: all pairwise distances, core points by
/// neighbourhood size, clusters as components of the core graph, non-core
/// points attached to their nearest core point within ε.
pub fn dbscan_oracle<T: Scalar>(ps: &PointSet<T>, params: &Params<T>) -> Result<Labeling> {
    dbscan_oracle_capped(ps, params, ORACLE_CAP)
}

pub fn dbscan_oracle_capped<T: Scalar>(ps: &PointSet<T>, params: &Params<T>, cap: usize) -> Result<Labeling> {
    params.validate()?;
    let n = ps.len();
    if n > cap {
        return Err(Error::OracleCapExceeded { n, cap });
    }
    let eps = params.eps;
    let close = |i: usize, j: usize| ps.dist(i, j) <= eps;
    let core: Vec<bool> = (0..n)
        .map(|i| (0..n).filter(|&j| close(i, j)).count() >= params.min_pts)
        .collect();
    let mut uf = UnionFind::<usize>::new(n);
    for i in 0..n {
        for j in i + 1..n {
            if core[i] && core[j] && close(i, j) {
                uf.union(i, j);
            }
        }
    }
    let labels = (0..n)
        .map(|i| {
            if core[i] {
                return Label::Core(uf.find(i));
            }
            if params.variant == Variant::DbscanStar {
                return Label::Noise;
            }
            let nearest = (0..n)
                .filter(|&j| core[j])
                .map(|j| (ps.dist(i, j), j))
                .min_by(|a, b| a.0.partial_cmp(&b.0).expect("finite").then(a.1.cmp(&b.1)));
            match nearest {
                Some((d, j)) if d <= eps => Label::Border(uf.find(j)),
                _ => Label::Noise,
            }
        })
        .collect();
    Ok(Labeling::new(labels))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boundary_distance_counts() {
        let ps = PointSet::from_xy(&[(0.0, 0.0), (1.5, 2.0)]);
        let l = dbscan_oracle(&ps, &Params::new(2.5, 2, Variant::Dbscan).unwrap()).unwrap();
        assert_eq!(l.labels(), &[Label::Core(0), Label::Core(0)]);
    }

    #[test]
    fn border_point_next_to_one_core() {
        // Points 0 and 1 see four points each. Point 3 sees only 0, 1 and
        // itself; point 4 sees nothing.
        let pts = [(0.0, 0.0), (0.5, 0.0), (-0.5, 0.0), (0.6, 0.5), (1.9, 0.9)];
        let ps = PointSet::from_xy(&pts);
        let l = dbscan_oracle(&ps, &Params::new(1.0, 4, Variant::Dbscan).unwrap()).unwrap();
        assert_eq!(l.label(0), Label::Core(0));
        assert_eq!(l.label(3), Label::Border(0));
        assert_eq!(l.label(4), Label::Noise);
        let star = dbscan_oracle(&ps, &Params::new(1.0, 4, Variant::DbscanStar).unwrap()).unwrap();
        assert_eq!(star.label(3), Label::Noise);
    }

    #[test]
    fn refuses_large_input() {
        let ps = PointSet::from_xy(&[(0.0, 0.0); 11]);
        let p = Params::new(1.0, 2, Variant::Dbscan).unwrap();
        assert_eq!(dbscan_oracle_capped(&ps, &p, 10), Err(Error::OracleCapExceeded { n: 11, cap: 10 }));
    }
}
