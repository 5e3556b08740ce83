//! Point primitives and the geometric kernels the clustering code is built on.

mod bccp;
mod circle;
mod delaunay;
mod knn;
pub mod predicates;

pub use bccp::{bccp, bccp_brute_force, BccpMode, ClosestPair};
pub(crate) use bccp::{bccp_counted, delaunay_bccp};
pub(crate) use delaunay::{triangulate, Sites};
pub use circle::{min_circle_interior_count, min_circle_interior_count_brute_force};
pub use delaunay::{delaunay, delaunay_subset, Triangulation};
pub use knn::{knn, knn_brute_force, KdTree, Neighbor};

use crate::error::{invalid, Error, Result};
use crate::Scalar;

/// An immutable multiset of points of a common dimension.
///
/// Point `i` keeps index `i` for the lifetime of the set; coordinates are
/// stored row-major in one flat buffer.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet<T> {
    dim: usize,
    coords: Vec<T>,
}

impl<T: Scalar> PointSet<T> {
    /// Builds a point set from a flat row-major buffer.
    pub fn from_flat(dim: usize, coords: Vec<T>) -> Result<Self> {
        if dim < 2 {
            return Err(invalid(format!("dimension must be at least 2, got {dim}")));
        }
        if !coords.len().is_multiple_of(dim) {
            return Err(invalid(format!(
                "buffer of length {} is not a multiple of dimension {dim}",
                coords.len()
            )));
        }
        if let Some(pos) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFinite { index: pos / dim });
        }
        Ok(PointSet { dim, coords })
    }

    pub fn from_rows<R: AsRef<[T]>>(dim: usize, rows: &[R]) -> Result<Self> {
        let mut coords = Vec::with_capacity(rows.len() * dim);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != dim {
                return Err(invalid(format!(
                    "point {i} has {} coordinates, expected {dim}",
                    row.len()
                )));
            }
            coords.extend_from_slice(row);
        }
        Self::from_flat(dim, coords)
    }

    /// Convenience constructor for planar input.
    pub fn from_xy(points: &[(T, T)]) -> Self {
        let coords = points.iter().flat_map(|&(x, y)| [x, y]).collect();
        Self::from_flat(2, coords).expect("planar points must be finite")
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[T] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[T]> {
        self.coords.chunks_exact(self.dim)
    }

    pub fn coords(&self) -> &[T] {
        &self.coords
    }

    /// Euclidean distance between points `i` and `j`.
    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> T {
        dist(self.point(i), self.point(j))
    }

    /// Planar coordinates of point `i`, widened for the exact predicates.
    #[inline]
    pub(crate) fn xy(&self, i: usize) -> [f64; 2] {
        let p = self.point(i);
        [p[0].widen(), p[1].widen()]
    }

    pub(crate) fn require_dim(&self, required: usize) -> Result<()> {
        if self.dim != required {
            return Err(Error::UnsupportedDimension { required, got: self.dim });
        }
        Ok(())
    }
}

/// Euclidean distance.
///
/// Every distance comparison in the crate goes through this one expression
/// so that the fast paths and the oracles agree to the last bit.
#[inline]
pub fn dist<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| {
            let d = x - y;
            d * d
        })
        .sum::<T>()
        .sqrt()
}

/// One undirected weighted edge, stored with `i < j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge<T> {
    pub i: usize,
    pub j: usize,
    pub w: T,
}

impl<T: Scalar> Edge<T> {
    pub fn new(a: usize, b: usize, w: T) -> Self {
        debug_assert_ne!(a, b);
        let (i, j) = if a < b { (a, b) } else { (b, a) };
        Edge { i, j, w }
    }
}

/// Candidate edges feeding MST construction.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct WeightedEdgeList<T> {
    pub edges: Vec<Edge<T>>,
}

impl<T: Scalar> WeightedEdgeList<T> {
    pub fn new(edges: Vec<Edge<T>>) -> Self {
        WeightedEdgeList { edges }
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// The `(i, j)` pairs, sorted.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<_> = self.edges.iter().map(|e| (e.i, e.j)).collect();
        out.sort_unstable();
        out
    }

    /// Sum of the weights taken in ascending order.
    pub fn total_weight(&self) -> T {
        let mut w: Vec<T> = self.edges.iter().map(|e| e.w).collect();
        w.sort_by(|a, b| a.partial_cmp(b).expect("weights are not NaN"));
        w.into_iter().fold(T::zero(), |acc, x| acc + x)
    }
}

impl<T: Scalar> FromIterator<Edge<T>> for WeightedEdgeList<T> {
    fn from_iter<I: IntoIterator<Item = Edge<T>>>(iter: I) -> Self {
        WeightedEdgeList { edges: iter.into_iter().collect() }
    }
}

/// Axis-aligned distance from a point to a box.
///
/// Evaluated with the same operation order as [`dist`], so for any point `q`
/// inside the box the result never exceeds `dist(p, q)`.
#[inline]
pub(crate) fn point_box_dist<T: Scalar>(p: &[T], lo: &[T], hi: &[T]) -> T {
    p.iter()
        .zip(lo.iter().zip(hi))
        .map(|(&x, (&l, &h))| {
            let g = if x < l {
                l - x
            } else if x > h {
                x - h
            } else {
                T::zero()
            };
            g * g
        })
        .sum::<T>()
        .sqrt()
}

/// Distance between two axis-aligned boxes.
#[inline]
pub(crate) fn box_box_dist<T: Scalar>(alo: &[T], ahi: &[T], blo: &[T], bhi: &[T]) -> T {
    (0..alo.len())
        .map(|k| {
            let g = if bhi[k] < alo[k] {
                alo[k] - bhi[k]
            } else if ahi[k] < blo[k] {
                blo[k] - ahi[k]
            } else {
                T::zero()
            };
            g * g
        })
        .sum::<T>()
        .sqrt()
}
