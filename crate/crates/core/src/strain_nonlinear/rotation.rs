//! Microrotation fields `Q: ω → SO(3)` with first derivatives.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::{fd_step_first, Map3};
use crate::tensor::{
    anti, axl_of_skew_part, check_rotation, exp_so3, right_jacobian, sym3, Mat3, Vec2, Vec3,
};

/// Largest admissible symmetric part of `Qᵀ∂Q`, relative to `1 + ‖Qᵀ∂Q‖`.
pub const WRYNESS_SYM_MAX: f64 = 1e-6;

/// A rotation and its partial derivatives at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotJet {
    pub q: Mat3,
    pub dq: [Mat3; 2],
}

impl RotJet {
    pub fn identity() -> Self {
        RotJet { q: Mat3::identity(), dq: [Mat3::zeros(); 2] }
    }

    /// Axial vector of `skew(Qᵀ∂_α Q)` and the relative size of the discarded symmetric part.
    pub fn wryness(&self, alpha: usize) -> (Vec3, f64) {
        let w = self.q.transpose() * self.dq[alpha];
        let defect = sym3(&w).norm() / (1.0 + w.norm());
        (axl_of_skew_part(&w), defect)
    }

    /// Both wryness columns, rejecting noisy derivatives.
    pub fn wryness_checked(&self) -> Result<[Vec3; 2]> {
        let mut out = [Vec3::zeros(); 2];
        for (a, slot) in out.iter_mut().enumerate() {
            let (k, defect) = self.wryness(a);
            if defect > WRYNESS_SYM_MAX {
                return Err(Error::NotSkew(defect));
            }
            *slot = k;
        }
        Ok(out)
    }

    pub fn left_mul(&self, r: &Mat3) -> Self {
        RotJet { q: r * self.q, dq: [r * self.dq[0], r * self.dq[1]] }
    }

    pub fn check(&self) -> Result<()> {
        check_rotation(&self.q)
    }
}

type RotFn = dyn Fn(Vec2) -> Result<RotJet> + Send + Sync;

#[derive(Clone)]
pub struct RotationField {
    eval: Arc<RotFn>,
}

impl fmt::Debug for RotationField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("RotationField")
    }
}

impl RotationField {
    pub fn from_fn(f: impl Fn(Vec2) -> Result<RotJet> + Send + Sync + 'static) -> Self {
        RotationField { eval: Arc::new(f) }
    }

    pub fn identity() -> Self {
        RotationField::from_fn(|_| Ok(RotJet::identity()))
    }

    pub fn constant(q: Mat3) -> Result<Self> {
        check_rotation(&q)?;
        Ok(RotationField::from_fn(move |_| Ok(RotJet { q, dq: [Mat3::zeros(); 2] })))
    }

    /// `Q = exp(anti(w(x)))` with exact derivatives through the right Jacobian.
    pub fn exp_of(w: Map3) -> Self {
        RotationField::from_fn(move |x| {
            let (val, d) = w.first(x);
            let q = exp_so3(&val);
            let jr = right_jacobian(&val);
            Ok(RotJet { q, dq: d.map(|dw| q * anti(&(jr * dw))) })
        })
    }

    /// Derivatives by central differences of a value-only rotation map.
    pub fn from_values(f: impl Fn(Vec2) -> Mat3 + Send + Sync + 'static) -> Self {
        RotationField::from_fn(move |x| {
            let h = fd_step_first(&x);
            let e = [Vec2::x() * h, Vec2::y() * h];
            Ok(RotJet { q: f(x), dq: e.map(|e| (f(x + e) - f(x - e)) / (2.0 * h)) })
        })
    }

    /// `Q̂·Q` for a constant rotation `Q̂`.
    pub fn left_mul(&self, r: Mat3) -> Result<Self> {
        check_rotation(&r)?;
        let me = self.clone();
        Ok(RotationField::from_fn(move |x| Ok(me.at_unchecked(x)?.left_mul(&r))))
    }

    fn at_unchecked(&self, x: Vec2) -> Result<RotJet> {
        (self.eval)(x)
    }

    /// Rotation jet at `x`; fails if `Q` is not a proper rotation.
    pub fn at(&self, x: Vec2) -> Result<RotJet> {
        let j = (self.eval)(x)?;
        j.check()?;
        Ok(j)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{polynomial, Monomial};

    #[test]
    fn exp_field_derivatives_match_differences() {
        let w = polynomial(vec![
            Monomial { pow: [1, 0], coef: [0.3, -0.2, 0.5] },
            Monomial { pow: [1, 1], coef: [0.1, 0.4, -0.3] },
            Monomial { pow: [0, 2], coef: [-0.6, 0.2, 0.1] },
        ]);
        let exact = RotationField::exp_of(w.clone());
        let fd = RotationField::from_values(move |x| exp_so3(&w.eval(x)));
        let x = Vec2::new(0.6, -0.8);
        let (a, b) = (exact.at(x).unwrap(), fd.at(x).unwrap());
        for k in 0..2 {
            assert!((a.dq[k] - b.dq[k]).norm() < 1e-9);
            assert!(a.wryness(k).1 < 1e-15);
        }
    }

    #[test]
    fn constant_rejects_non_rotation() {
        assert!(matches!(
            RotationField::constant(Mat3::identity() * 2.0),
            Err(Error::NotRotation(_))
        ));
    }

    #[test]
    fn wryness_rejects_symmetric_noise() {
        let j = RotJet { q: Mat3::identity(), dq: [Mat3::identity() * 1e-3, Mat3::zeros()] };
        assert!(matches!(j.wryness_checked(), Err(Error::NotSkew(_))));
    }
}
