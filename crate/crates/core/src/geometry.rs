//! Three-dimensional vector algebra and orthonormal frame maintenance.

use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use thiserror::Error;

use crate::scalar::Scalar;

/// Frames whose tangent or projected normal falls below this length are
/// treated as corrupted.
pub const DEGENERACY_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("vector component is not finite")]
    NonFinite,
    #[error("zero-length tangent cannot define a frame")]
    ZeroTangent,
    #[error("degenerate frame: {0}")]
    DegenerateFrame(&'static str),
}

/// A 3-component real vector.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec3<T> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Scalar> Vec3<T> {
    #[inline]
    pub const fn new(x: T, y: T, z: T) -> Self {
        Self { x, y, z }
    }

    /// Builds a vector, rejecting NaN and infinite components.
    pub fn checked(x: T, y: T, z: T) -> Result<Self, GeometryError> {
        let v = Self::new(x, y, z);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(GeometryError::NonFinite)
        }
    }

    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero(), T::zero())
    }

    pub fn e1() -> Self {
        Self::new(T::one(), T::zero(), T::zero())
    }

    pub fn e2() -> Self {
        Self::new(T::zero(), T::one(), T::zero())
    }

    pub fn e3() -> Self {
        Self::new(T::zero(), T::zero(), T::one())
    }

    pub fn from_array(a: [T; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }

    pub fn to_array(self) -> [T; 3] {
        [self.x, self.y, self.z]
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    #[inline]
    pub fn dot(self, other: Self) -> T {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    #[inline]
    pub fn cross(self, other: Self) -> Self {
        cross(self, other)
    }

    #[inline]
    pub fn norm_squared(self) -> T {
        self.dot(self)
    }

    #[inline]
    pub fn norm(self) -> T {
        self.norm_squared().sqrt()
    }

    /// Unit vector in the same direction; `None` for the zero vector.
    pub fn try_normalize(self) -> Option<Self> {
        let n = self.norm();
        if n > T::zero() && n.is_finite() {
            Some(self / n)
        } else {
            None
        }
    }

    pub fn max_abs(self) -> T {
        self.x.abs().max(self.y.abs()).max(self.z.abs())
    }

    /// Angle in radians between two nonzero vectors, robust near 0 and π.
    pub fn angle_to(self, other: Self) -> T {
        let c = self.cross(other).norm();
        let d = self.dot(other);
        c.atan2(d)
    }
}

/// Cross product `a × b`.
#[inline]
pub fn cross<T: Scalar>(a: Vec3<T>, b: Vec3<T>) -> Vec3<T> {
    Vec3::new(
        a.y * b.z - a.z * b.y,
        a.z * b.x - a.x * b.z,
        a.x * b.y - a.y * b.x,
    )
}

/// Vector triple product `a × (b × c)`, evaluated as two cross products.
///
/// Equal to `b (a·c) − c (a·b)` up to roundoff.
#[inline]
pub fn bac_cab<T: Scalar>(a: Vec3<T>, b: Vec3<T>, c: Vec3<T>) -> Vec3<T> {
    cross(a, cross(b, c))
}

impl<T: Scalar> Add for Vec3<T> {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl<T: Scalar> AddAssign for Vec3<T> {
    #[inline]
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl<T: Scalar> Sub for Vec3<T> {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl<T: Scalar> SubAssign for Vec3<T> {
    #[inline]
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl<T: Scalar> Neg for Vec3<T> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y, -self.z)
    }
}

impl<T: Scalar> Mul<T> for Vec3<T> {
    type Output = Self;
    #[inline]
    fn mul(self, s: T) -> Self {
        Self::new(self.x * s, self.y * s, self.z * s)
    }
}

impl<T: Scalar> Div<T> for Vec3<T> {
    type Output = Self;
    #[inline]
    fn div(self, s: T) -> Self {
        Self::new(self.x / s, self.y / s, self.z / s)
    }
}

macro_rules! impl_scalar_lhs_mul {
    ($($t:ty),*) => {$(
        impl Mul<Vec3<$t>> for $t {
            type Output = Vec3<$t>;
            #[inline]
            fn mul(self, v: Vec3<$t>) -> Vec3<$t> {
                v * self
            }
        }
    )*};
}

impl_scalar_lhs_mul!(f32, f64);

/// Right-handed orthonormal triple: unit tangent `x` and the normal-plane
/// pair `y`, `z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrenetFrame<T> {
    pub x: Vec3<T>,
    pub y: Vec3<T>,
    pub z: Vec3<T>,
}

impl<T: Scalar> FrenetFrame<T> {
    pub const fn new(x: Vec3<T>, y: Vec3<T>, z: Vec3<T>) -> Self {
        Self { x, y, z }
    }

    pub fn identity() -> Self {
        Self::new(Vec3::e1(), Vec3::e2(), Vec3::e3())
    }

    /// Builds a frame with the given tangent.
    ///
    /// The normal `y` is obtained by projecting `x` out of the canonical axis
    /// least aligned with it (ties resolved in the order e1, e2, e3), and
    /// `z = x × y`.
    pub fn from_tangent(tangent: Vec3<T>) -> Result<Self, GeometryError> {
        if !tangent.is_finite() {
            return Err(GeometryError::NonFinite);
        }
        if tangent.norm() <= T::lit(1e-9) {
            return Err(GeometryError::ZeroTangent);
        }
        let x = tangent / tangent.norm();
        let a = [x.x.abs(), x.y.abs(), x.z.abs()];
        let mut k = 0;
        for i in 1..3 {
            if a[i] < a[k] {
                k = i;
            }
        }
        let axis = [Vec3::e1(), Vec3::e2(), Vec3::e3()][k];
        let y = axis - x * axis.dot(x);
        let y = y / y.norm();
        let z = x.cross(y);
        Ok(Self::new(x, y, z))
    }

    /// Gram–Schmidt repair in the order x, y, z.
    ///
    /// The tangent direction is kept exactly (only rescaled). `z` is rebuilt
    /// as `x × y`, after checking that the input `z` lies on the right-handed
    /// side.
    pub fn orthonormalize(&self) -> Result<Self, GeometryError> {
        if !(self.x.is_finite() && self.y.is_finite() && self.z.is_finite()) {
            return Err(GeometryError::NonFinite);
        }
        let tol = T::lit(DEGENERACY_TOLERANCE);
        let xn = self.x.norm();
        if xn < tol {
            return Err(GeometryError::DegenerateFrame("tangent has vanished"));
        }
        let x = self.x / xn;
        let y = self.y - x * self.y.dot(x);
        let yn = y.norm();
        if yn < tol {
            return Err(GeometryError::DegenerateFrame(
                "normal is parallel to tangent",
            ));
        }
        let y = y / yn;
        let z = x.cross(y);
        if self.z.dot(z) <= T::zero() {
            return Err(GeometryError::DegenerateFrame("frame is not right-handed"));
        }
        Ok(Self::new(x, y, z))
    }

    /// Largest violation of unit length, pairwise orthogonality and
    /// right-handedness.
    pub fn orthonormality_error(&self) -> T {
        let one = T::one();
        let errs = [
            (self.x.norm() - one).abs(),
            (self.y.norm() - one).abs(),
            (self.z.norm() - one).abs(),
            self.x.dot(self.y).abs(),
            self.x.dot(self.z).abs(),
            self.y.dot(self.z).abs(),
            (self.x.dot(self.y.cross(self.z)) - one).abs(),
        ];
        errs.into_iter().fold(T::zero(), T::max)
    }

    /// Coordinates of `v` in this frame.
    pub fn components(&self, v: Vec3<T>) -> Vec3<T> {
        Vec3::new(v.dot(self.x), v.dot(self.y), v.dot(self.z))
    }
}
