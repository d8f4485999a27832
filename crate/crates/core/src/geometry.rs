//! Small fixed-size vector types and convex polygon helpers.

use std::ops::{Add, AddAssign, Div, Index, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::num::Real;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vector2<T> {
    pub x: T,
    pub y: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vector3<T> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Real> Vector2<T> {
    #[inline]
    pub const fn new(x: T, y: T) -> Self {
        Self { x, y }
    }

    #[inline]
    pub fn dot(self, o: Self) -> T {
        self.x * o.x + self.y * o.y
    }

    /// z component of the 3-D cross product.
    #[inline]
    pub fn perp_dot(self, o: Self) -> T {
        self.x * o.y - self.y * o.x
    }

    #[inline]
    pub fn norm(self) -> T {
        self.x.hypot(self.y)
    }

    #[inline]
    pub fn normalize(self) -> Self {
        self / self.norm()
    }

    #[inline]
    pub fn rotate(self, angle: T) -> Self {
        let (s, c) = angle.sin_cos();
        Self::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    #[inline]
    pub fn extend(self, z: T) -> Vector3<T> {
        Vector3::new(self.x, self.y, z)
    }
}

impl<T: Real> Vector3<T> {
    #[inline]
    pub const fn new(x: T, y: T, z: T) -> Self {
        Self { x, y, z }
    }

    #[inline]
    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero(), T::zero())
    }

    #[inline]
    pub fn unit_x() -> Self {
        Self::new(T::one(), T::zero(), T::zero())
    }

    #[inline]
    pub fn unit_z() -> Self {
        Self::new(T::zero(), T::zero(), T::one())
    }

    #[inline]
    pub fn dot(self, o: Self) -> T {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    #[inline]
    pub fn cross(self, o: Self) -> Self {
        Self::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    #[inline]
    pub fn norm_squared(self) -> T {
        self.dot(self)
    }

    #[inline]
    pub fn norm(self) -> T {
        self.norm_squared().sqrt()
    }

    #[inline]
    pub fn normalize(self) -> Self {
        self / self.norm()
    }

    #[inline]
    pub fn xy(self) -> Vector2<T> {
        Vector2::new(self.x, self.y)
    }

    #[inline]
    pub fn distance(self, o: Self) -> T {
        (self - o).norm()
    }

    /// Mirror image across the plane `n·x = d` (`n` unit length).
    #[inline]
    pub fn mirror(self, n: Self, d: T) -> Self {
        let two = T::one() + T::one();
        self - n * (two * (n.dot(self) - d))
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

macro_rules! impl_vec_ops {
    ($ty:ident { $($f:ident),+ }) => {
        impl<T: Real> Add for $ty<T> {
            type Output = Self;
            #[inline]
            fn add(self, o: Self) -> Self { Self { $($f: self.$f + o.$f),+ } }
        }
        impl<T: Real> Sub for $ty<T> {
            type Output = Self;
            #[inline]
            fn sub(self, o: Self) -> Self { Self { $($f: self.$f - o.$f),+ } }
        }
        impl<T: Real> Mul<T> for $ty<T> {
            type Output = Self;
            #[inline]
            fn mul(self, s: T) -> Self { Self { $($f: self.$f * s),+ } }
        }
        impl<T: Real> Div<T> for $ty<T> {
            type Output = Self;
            #[inline]
            fn div(self, s: T) -> Self { Self { $($f: self.$f / s),+ } }
        }
        impl<T: Real> Neg for $ty<T> {
            type Output = Self;
            #[inline]
            fn neg(self) -> Self { Self { $($f: -self.$f),+ } }
        }
        impl<T: Real> AddAssign for $ty<T> {
            #[inline]
            fn add_assign(&mut self, o: Self) { $(self.$f += o.$f;)+ }
        }
        impl<T: Real> SubAssign for $ty<T> {
            #[inline]
            fn sub_assign(&mut self, o: Self) { $(self.$f -= o.$f;)+ }
        }
    };
}

impl_vec_ops!(Vector2 { x, y });
impl_vec_ops!(Vector3 { x, y, z });

impl<T> Index<usize> for Vector3<T> {
    type Output = T;
    fn index(&self, i: usize) -> &T {
        match i {
            0 => &self.x,
            1 => &self.y,
            2 => &self.z,
            _ => panic!("Vector3 index {i} out of range"),
        }
    }
}

/// Signed area (positive when counterclockwise).
pub fn signed_area<T: Real>(poly: &[Vector2<T>]) -> T {
    let n = poly.len();
    let mut acc = T::zero();
    for i in 0..n {
        acc += poly[i].perp_dot(poly[(i + 1) % n]);
    }
    acc / T::lit(2.0)
}

pub fn centroid<T: Real>(poly: &[Vector2<T>]) -> Vector2<T> {
    let a = signed_area(poly);
    let n = poly.len();
    let (mut cx, mut cy) = (T::zero(), T::zero());
    for i in 0..n {
        let (p, q) = (poly[i], poly[(i + 1) % n]);
        let w = p.perp_dot(q);
        cx += (p.x + q.x) * w;
        cy += (p.y + q.y) * w;
    }
    let s = T::lit(6.0) * a;
    Vector2::new(cx / s, cy / s)
}

/// Strictly convex and counterclockwise (collinear runs are rejected).
pub fn is_convex_ccw<T: Real>(poly: &[Vector2<T>]) -> bool {
    let n = poly.len();
    if n < 3 {
        return false;
    }
    (0..n).all(|i| {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        let c = poly[(i + 2) % n];
        (b - a).perp_dot(c - b) > T::zero()
    })
}

/// Signed distance from `p` to the boundary of a convex CCW polygon: positive inside.
pub fn convex_inset<T: Real>(poly: &[Vector2<T>], p: Vector2<T>) -> T {
    let n = poly.len();
    let mut best = T::infinity();
    for i in 0..n {
        let a = poly[i];
        let e = poly[(i + 1) % n] - a;
        let d = e.perp_dot(p - a) / e.norm();
        best = best.min(d);
    }
    best
}

fn point_segment_distance<T: Real>(p: Vector2<T>, a: Vector2<T>, b: Vector2<T>) -> T {
    let ab = b - a;
    let len2 = ab.dot(ab);
    let t = if len2 > T::zero() {
        ((p - a).dot(ab) / len2).max(T::zero()).min(T::one())
    } else {
        T::zero()
    };
    (a + ab * t - p).norm()
}

fn segments_cross<T: Real>(a: Vector2<T>, b: Vector2<T>, c: Vector2<T>, d: Vector2<T>) -> bool {
    let o1 = (b - a).perp_dot(c - a);
    let o2 = (b - a).perp_dot(d - a);
    let o3 = (d - c).perp_dot(a - c);
    let o4 = (d - c).perp_dot(b - c);
    o1 * o2 < T::zero() && o3 * o4 < T::zero()
}

/// Minimum distance between two convex polygons; zero when they overlap.
pub fn polygon_distance<T: Real>(p: &[Vector2<T>], q: &[Vector2<T>]) -> T {
    if p.iter().any(|&v| convex_inset(q, v) >= T::zero())
        || q.iter().any(|&v| convex_inset(p, v) >= T::zero())
    {
        return T::zero();
    }
    let mut best = T::infinity();
    for i in 0..p.len() {
        let (a, b) = (p[i], p[(i + 1) % p.len()]);
        for j in 0..q.len() {
            let (c, d) = (q[j], q[(j + 1) % q.len()]);
            if segments_cross(a, b, c, d) {
                return T::zero();
            }
            best = best
                .min(point_segment_distance(a, c, d))
                .min(point_segment_distance(c, a, b));
        }
    }
    best
}

/// Distance from a point to a convex polygon; zero inside.
pub fn point_polygon_distance<T: Real>(poly: &[Vector2<T>], p: Vector2<T>) -> T {
    if convex_inset(poly, p) >= T::zero() {
        return T::zero();
    }
    let n = poly.len();
    (0..n)
        .map(|i| point_segment_distance(p, poly[i], poly[(i + 1) % n]))
        .fold(T::infinity(), T::min)
}

#[cfg(test)]
mod tests {
    use super::*;

    type V2 = Vector2<f64>;

    fn square(x0: f64, y0: f64, s: f64) -> Vec<V2> {
        vec![
            V2::new(x0, y0),
            V2::new(x0 + s, y0),
            V2::new(x0 + s, y0 + s),
            V2::new(x0, y0 + s),
        ]
    }

    #[test]
    fn area_and_centroid_of_square() {
        let sq = square(1.0, 2.0, 2.0);
        assert_eq!(signed_area(&sq), 4.0);
        let c = centroid(&sq);
        assert!((c.x - 2.0).abs() < 1e-12 && (c.y - 3.0).abs() < 1e-12);
        assert!(is_convex_ccw(&sq));
        let mut cw = sq.clone();
        cw.reverse();
        assert!(!is_convex_ccw(&cw));
    }

    #[test]
    fn distances_between_squares() {
        let a = square(0.0, 0.0, 1.0);
        let b = square(1.3, 0.0, 1.0);
        assert!((polygon_distance(&a, &b) - 0.3).abs() < 1e-12);
        let c = square(2.0, 2.0, 1.0);
        assert!((polygon_distance(&a, &c) - 2f64.sqrt()).abs() < 1e-12);
        let d = square(0.5, 0.5, 1.0);
        assert_eq!(polygon_distance(&a, &d), 0.0);
        assert_eq!(point_polygon_distance(&a, V2::new(0.5, 0.5)), 0.0);
        assert!((point_polygon_distance(&a, V2::new(1.5, 0.5)) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn mirror_across_plane() {
        let p = Vector3::new(1.0, 2.0, 3.0);
        let m = p.mirror(Vector3::unit_z(), 0.0);
        assert_eq!(m, Vector3::new(1.0, 2.0, -3.0));
        let m = p.mirror(Vector3::unit_x(), 5.0);
        assert_eq!(m, Vector3::new(9.0, 2.0, 3.0));
    }

    #[test]
    fn works_in_single_precision() {
        let a: Vector3<f32> = Vector3::new(1.0, 0.0, 0.0);
        let b = Vector3::new(0.0, 1.0, 0.0);
        assert_eq!(a.cross(b), Vector3::unit_z());
    }
}
