//! SU(2) group elements as unit quaternions.
//!
//! An element is stored as `(a0, a1, a2, a3)` with
//!
//! ```text
//! U = a0·1 + i (a1 σ1 + a2 σ2 + a3 σ3),   a0² + a1² + a2² + a3² = 1
//! ```
//!
//! so `Re Tr U = 2 a0` and the conjugate quaternion is the hermitian adjoint.
//! Products are renormalized on every call so link variables never drift off
//! the group manifold during long Monte Carlo runs.

use std::ops::Mul;

use rand::Rng;
use rand_distr::StandardNormal;

/// Element of SU(2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupElement {
    pub a0: f64,
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
}

/// Element of su(2), `X = c_a T^a` with `T^a = σ^a / 2`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AlgebraElement {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

impl AlgebraElement {
    pub const fn new(c1: f64, c2: f64, c3: f64) -> Self {
        Self { c1, c2, c3 }
    }

    pub fn norm(&self) -> f64 {
        (self.c1 * self.c1 + self.c2 * self.c2 + self.c3 * self.c3).sqrt()
    }
}

impl std::ops::Neg for AlgebraElement {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.c1, -self.c2, -self.c3)
    }
}

impl Default for GroupElement {
    fn default() -> Self {
        Self::IDENTITY
    }
}

impl GroupElement {
    pub const IDENTITY: GroupElement = GroupElement { a0: 1.0, a1: 0.0, a2: 0.0, a3: 0.0 };

    /// Builds an element from raw components and normalizes it.
    ///
    /// A zero quaternion has no direction; it maps to the identity.
    pub fn new(a0: f64, a1: f64, a2: f64, a3: f64) -> Self {
        Self::from_unnormalized([a0, a1, a2, a3])
    }

    /// Builds an element without normalizing. The caller guarantees unit norm.
    pub const fn from_components_unchecked(a: [f64; 4]) -> Self {
        Self { a0: a[0], a1: a[1], a2: a[2], a3: a[3] }
    }

    pub fn from_unnormalized(a: [f64; 4]) -> Self {
        let n = norm4(&a);
        if n == 0.0 || !n.is_finite() {
            return Self::IDENTITY;
        }
        Self { a0: a[0] / n, a1: a[1] / n, a2: a[2] / n, a3: a[3] / n }
    }

    pub fn components(&self) -> [f64; 4] {
        [self.a0, self.a1, self.a2, self.a3]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.a0 * self.a0 + self.a1 * self.a1 + self.a2 * self.a2 + self.a3 * self.a3
    }

    pub fn normalize(&self) -> Self {
        Self::from_unnormalized(self.components())
    }

    /// Group product `self · other`, renormalized.
    pub fn multiply(&self, other: &GroupElement) -> GroupElement {
        Self::from_unnormalized(quat_product(&self.components(), &other.components()))
    }

    /// Hermitian adjoint, which is also the group inverse.
    pub fn dagger(&self) -> GroupElement {
        GroupElement { a0: self.a0, a1: -self.a1, a2: -self.a2, a3: -self.a3 }
    }

    pub fn re_trace(&self) -> f64 {
        2.0 * self.a0
    }

    /// Haar-distributed element: a 4-D Gaussian vector projected onto S³.
    pub fn haar_random<R: Rng + ?Sized>(rng: &mut R) -> GroupElement {
        loop {
            let a: [f64; 4] = [
                rng.sample(StandardNormal),
                rng.sample(StandardNormal),
                rng.sample(StandardNormal),
                rng.sample(StandardNormal),
            ];
            let n = norm4(&a);
            if n > 1e-12 {
                return GroupElement { a0: a[0] / n, a1: a[1] / n, a2: a[2] / n, a3: a[3] / n };
            }
        }
    }

    /// `exp(i c_a σ_a / 2)`.
    pub fn exp_algebra(x: &AlgebraElement) -> GroupElement {
        let len = x.norm();
        if len == 0.0 {
            return Self::IDENTITY;
        }
        let half = 0.5 * len;
        let s = half.sin() / len;
        GroupElement { a0: half.cos(), a1: s * x.c1, a2: s * x.c2, a3: s * x.c3 }
    }

    /// Rotation angle `φ ∈ [0, π]` with `a0 = cos φ`.
    pub fn half_angle(&self) -> f64 {
        let v = (self.a1 * self.a1 + self.a2 * self.a2 + self.a3 * self.a3).sqrt();
        v.atan2(self.a0)
    }

    /// `U^ω` along the one-parameter subgroup through `U`.
    pub fn pow(&self, omega: f64) -> GroupElement {
        let v = (self.a1 * self.a1 + self.a2 * self.a2 + self.a3 * self.a3).sqrt();
        if v < 1e-300 {
            // U = ±1; only the identity has a well-defined power here.
            return if self.a0 > 0.0 { Self::IDENTITY } else { *self };
        }
        let phi = v.atan2(self.a0) * omega;
        let s = phi.sin() / v;
        GroupElement { a0: phi.cos(), a1: s * self.a1, a2: s * self.a2, a3: s * self.a3 }
    }

    /// Adjoint action on the Pauli vector: returns `w` with
    /// `U (n·σ) U† = w·σ`.
    pub fn rotate(&self, n: [f64; 3]) -> [f64; 3] {
        let p = quat_product(&self.components(), &[0.0, n[0], n[1], n[2]]);
        let r = quat_product(&p, &self.dagger().components());
        [r[1], r[2], r[3]]
    }
}

impl Mul for GroupElement {
    type Output = GroupElement;
    fn mul(self, rhs: GroupElement) -> GroupElement {
        self.multiply(&rhs)
    }
}

impl Mul for &GroupElement {
    type Output = GroupElement;
    fn mul(self, rhs: &GroupElement) -> GroupElement {
        self.multiply(rhs)
    }
}

/// Product of two matrices `a0 + i a·σ`, not normalized.
///
/// `(i a·σ)(i b·σ) = -(a·b) - i (a×b)·σ`, hence the minus sign on the cross
/// product relative to Hamilton's convention.
#[inline]
pub fn quat_product(a: &[f64; 4], b: &[f64; 4]) -> [f64; 4] {
    [
        a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3],
        a[0] * b[1] + a[1] * b[0] - (a[2] * b[3] - a[3] * b[2]),
        a[0] * b[2] + a[2] * b[0] - (a[3] * b[1] - a[1] * b[3]),
        a[0] * b[3] + a[3] * b[0] - (a[1] * b[2] - a[2] * b[1]),
    ]
}

#[inline]
pub fn norm4(a: &[f64; 4]) -> f64 {
    (a[0] * a[0] + a[1] * a[1] + a[2] * a[2] + a[3] * a[3]).sqrt()
}
