//! Exact planar predicates.
//!
//! Each predicate first evaluates the determinant in double precision and
//! accepts the sign when it clears a forward error bound (the classic static
//! filters for orientation and in-circle tests). Otherwise the determinant is
//! recomputed exactly: every `f64` is a dyadic rational, so after scaling all
//! inputs to a common power of two the computation runs in big integers.
//!
//! Cocircular configurations are resolved by a symbolic perturbation of the
//! lifting map `z = x² + y²`: every point is raised by a distinct infinitesimal
//! amount, with the lexicographically larger location (by `x`, then `y`)
//! receiving the dominant lift. The rule depends only on the coordinates, so
//! every subset of a point set and every duplicate copy of a location sees the
//! same decisions.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{Float, Signed, Zero};

pub type P = [f64; 2];

const EPS: f64 = f64::EPSILON * 0.5;
const CCW_ERRBOUND: f64 = (3.0 + 16.0 * EPS) * EPS;
const ICC_ERRBOUND: f64 = (10.0 + 96.0 * EPS) * EPS;

fn sign_of(x: f64) -> Ordering {
    x.partial_cmp(&0.0).expect("predicate input is finite")
}

fn big_sign(x: &BigInt) -> Ordering {
    if x.is_zero() {
        Ordering::Equal
    } else if x.is_positive() {
        Ordering::Greater
    } else {
        Ordering::Less
    }
}

/// Scales a batch of doubles to big integers sharing one binary exponent.
fn to_common_integers<const N: usize>(vals: [f64; N]) -> [BigInt; N] {
    let decoded = vals.map(|v| {
        let (mant, exp, sign) = v.integer_decode();
        (mant as i128 * sign as i128, exp as i32)
    });
    let min_exp = decoded
        .iter()
        .filter(|(m, _)| *m != 0)
        .map(|&(_, e)| e)
        .min()
        .unwrap_or(0);
    decoded.map(|(m, e)| {
        let v = BigInt::from(m);
        if m == 0 {
            v
        } else {
            v << ((e - min_exp) as usize)
        }
    })
}

/// Sign of the orientation determinant: `Greater` when `a, b, c` turn
/// counter-clockwise.
pub fn orient2d(a: P, b: P, c: P) -> Ordering {
    let acx = a[0] - c[0];
    let bcx = b[0] - c[0];
    let acy = a[1] - c[1];
    let bcy = b[1] - c[1];
    let left = acx * bcy;
    let right = acy * bcx;
    let det = left - right;
    let bound = CCW_ERRBOUND * (left.abs() + right.abs());
    if det > bound || -det > bound {
        return sign_of(det);
    }
    orient2d_exact(a, b, c)
}

fn orient2d_exact(a: P, b: P, c: P) -> Ordering {
    let [ax, ay, bx, by, cx, cy] = to_common_integers([a[0], a[1], b[0], b[1], c[0], c[1]]);
    let det = (&ax - &cx) * (&by - &cy) - (&ay - &cy) * (&bx - &cx);
    big_sign(&det)
}

/// Sign of the in-circle determinant: `Greater` when `d` lies strictly
/// inside the circle through `a, b, c` and those turn counter-clockwise.
pub fn incircle(a: P, b: P, c: P, d: P) -> Ordering {
    let adx = a[0] - d[0];
    let bdx = b[0] - d[0];
    let cdx = c[0] - d[0];
    let ady = a[1] - d[1];
    let bdy = b[1] - d[1];
    let cdy = c[1] - d[1];

    let bdxcdy = bdx * cdy;
    let cdxbdy = cdx * bdy;
    let alift = adx * adx + ady * ady;
    let cdxady = cdx * ady;
    let adxcdy = adx * cdy;
    let blift = bdx * bdx + bdy * bdy;
    let adxbdy = adx * bdy;
    let bdxady = bdx * ady;
    let clift = cdx * cdx + cdy * cdy;

    let det = alift * (bdxcdy - cdxbdy) + blift * (cdxady - adxcdy) + clift * (adxbdy - bdxady);
    let permanent = (bdxcdy.abs() + cdxbdy.abs()) * alift
        + (cdxady.abs() + adxcdy.abs()) * blift
        + (adxbdy.abs() + bdxady.abs()) * clift;
    let bound = ICC_ERRBOUND * permanent;
    if det > bound || -det > bound {
        return sign_of(det);
    }
    incircle_exact(a, b, c, d)
}

fn incircle_exact(a: P, b: P, c: P, d: P) -> Ordering {
    let [ax, ay, bx, by, cx, cy, dx, dy] =
        to_common_integers([a[0], a[1], b[0], b[1], c[0], c[1], d[0], d[1]]);
    let (adx, ady) = (&ax - &dx, &ay - &dy);
    let (bdx, bdy) = (&bx - &dx, &by - &dy);
    let (cdx, cdy) = (&cx - &dx, &cy - &dy);
    let alift = &adx * &adx + &ady * &ady;
    let blift = &bdx * &bdx + &bdy * &bdy;
    let clift = &cdx * &cdx + &cdy * &cdy;
    let det = alift * (&bdx * &cdy - &cdx * &bdy)
        + blift * (&cdx * &ady - &adx * &cdy)
        + clift * (&adx * &bdy - &bdx * &ady);
    big_sign(&det)
}

/// Lexicographic order of locations (x, then y).
#[inline]
pub fn lex_cmp(a: P, b: P) -> Ordering {
    a[0].partial_cmp(&b[0])
        .expect("finite")
        .then_with(|| a[1].partial_cmp(&b[1]).expect("finite"))
}

/// In-circle test under the symbolic lifting perturbation.
///
/// Returns `Equal` only when two of the four locations coincide (or all four
/// are collinear); otherwise the sign is never zero.
pub fn incircle_sos(a: P, b: P, c: P, d: P) -> Ordering {
    let s = incircle(a, b, c, d);
    if s != Ordering::Equal {
        return s;
    }
    let pts = [a, b, c, d];
    for i in 0..4 {
        for j in i + 1..4 {
            if pts[i] == pts[j] {
                return Ordering::Equal;
            }
        }
    }
    // Raising point k's lift by a positive infinitesimal changes the
    // determinant by these cofactor terms.
    let coefficient = |k: usize| match k {
        0 => orient2d(b, c, d),
        1 => orient2d(a, c, d).reverse(),
        2 => orient2d(a, b, d),
        _ => orient2d(a, b, c).reverse(),
    };
    let mut order = [0usize, 1, 2, 3];
    order.sort_by(|&i, &j| lex_cmp(pts[j], pts[i]));
    order
        .into_iter()
        .map(coefficient)
        .find(|s| *s != Ordering::Equal)
        .unwrap_or(Ordering::Equal)
}

/// Whether `s` lies inside the circle through `p, q, r` under the
/// perturbation, independent of the orientation of `p, q, r`.
///
/// `p, q, r` must not be collinear.
pub fn inside_circle_sos(p: P, q: P, r: P, s: P) -> Ordering {
    match orient2d(p, q, r) {
        Ordering::Greater => incircle_sos(p, q, r, s),
        Ordering::Less => incircle_sos(p, q, r, s).reverse(),
        Ordering::Equal => panic!("inside_circle_sos called with collinear p, q, r"),
    }
}

/// Compares `|pa|` with `|pb|` exactly.
pub fn cmp_dist(p: P, a: P, b: P) -> Ordering {
    let da = (a[0] - p[0]).powi(2) + (a[1] - p[1]).powi(2);
    let db = (b[0] - p[0]).powi(2) + (b[1] - p[1]).powi(2);
    // Each squared length carries at most a few ulps of relative error.
    let bound = 8.0 * EPS * (da + db);
    if (da - db).abs() > bound {
        return da.partial_cmp(&db).expect("finite");
    }
    let [px, py, ax, ay, bx, by] = to_common_integers([p[0], p[1], a[0], a[1], b[0], b[1]]);
    let sq = |x: &BigInt, y: &BigInt| {
        let dx = x - &px;
        let dy = y - &py;
        &dx * &dx + &dy * &dy
    };
    sq(&ax, &ay).cmp(&sq(&bx, &by))
}

/// Whether `r`, known to be collinear with `p` and `q`, lies strictly between
/// them.
pub fn strictly_between(p: P, q: P, r: P) -> bool {
    let (lo, hi) = if lex_cmp(p, q) == Ordering::Less { (p, q) } else { (q, p) };
    lex_cmp(lo, r) == Ordering::Less && lex_cmp(r, hi) == Ordering::Less
}
