//! Bending measures from the literature: Acharya's two tensors, Virga's plate tensor and
//! the Naghdi-type director strains.

use crate::error::{Error, Result};
use crate::field::{Jet3, Map3, SurfacePatch};
use crate::geometry::{frame_at, push_flat, SurfaceFrame};
use crate::tensor::{hat, spd_sqrt, spd_sqrt_with_null, sym2, sym3, Mat2, Mat3, Mat32, Row2, Vec2, Vec3};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AcharyaTensors {
    pub r_tilde: Mat3,
    pub r_sym: Mat3,
}

pub fn acharya_from_frames(f0: &SurfaceFrame, fm: &SurfaceFrame) -> Result<AcharyaTensors> {
    let root = spd_sqrt_with_null(&push_flat(f0, &fm.first_form), &f0.n0)?;
    let r_tilde = -(push_flat(f0, &fm.second_form) - root * push_flat(f0, &f0.second_form));
    Ok(AcharyaTensors { r_tilde, r_sym: sym3(&r_tilde) })
}

pub fn acharya_tensors(y0: &SurfacePatch, m: &SurfacePatch, x: Vec2) -> Result<AcharyaTensors> {
    acharya_from_frames(&frame_at(y0, x)?, &frame_at(m, x)?)
}

/// `R̃ + √([∇Θ]⁻ᵀ Î_m [∇Θ]⁻¹)·[∇Θ]⁻ᵀ R∞♭ [∇Θ]⁻¹`, zero when both tensors are consistent.
pub fn acharya_relation_residual(f0: &SurfaceFrame, fm: &SurfaceFrame, r_inf_flat: &Mat3) -> Result<Mat3> {
    let a = acharya_from_frames(f0, fm)?;
    let gti = f0.grad_theta_inv;
    let root = spd_sqrt(&(gti.transpose() * hat(&fm.first_form) * gti))?;
    Ok(a.r_tilde + root * gti.transpose() * r_inf_flat * gti)
}

/// Virga's plate bending measure `(∇n)ᵀ∇n`, the third fundamental form of `m`.
pub fn virga_from_frame(fm: &SurfaceFrame) -> Mat2 {
    fm.third_form
}

/// `(∇n)ᵀ∇n − I_m L_m²`.
pub fn virga_identity_residual(fm: &SurfaceFrame) -> Mat2 {
    fm.third_form - fm.first_form * fm.weingarten * fm.weingarten
}

pub fn virga_plate_tensor(m: &SurfacePatch, x: Vec2) -> Result<Mat2> {
    Ok(virga_from_frame(&frame_at(m, x)?))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NaghdiStrains {
    /// `−[sym((∇m)ᵀ∇d) − (∇y₀)ᵀ∇n₀]`.
    pub r: Mat2,
    /// `(⟨d, ∂₁m⟩, ⟨d, ∂₂m⟩)`.
    pub t: Row2,
    /// `(∇d)ᵀ∇d − III_y₀`.
    pub p: Mat2,
}

pub fn naghdi_from_parts(f0: &SurfaceFrame, m: &Jet3, d: &Vec3, grad_d: &Mat32) -> NaghdiStrains {
    let grad_m = m.grad();
    NaghdiStrains {
        r: -(sym2(&(grad_m.transpose() * grad_d)) - f0.grad_y.transpose() * f0.grad_n),
        t: d.transpose() * grad_m,
        p: grad_d.transpose() * grad_d - f0.third_form,
    }
}

pub fn naghdi_strains(y0: &SurfacePatch, m: &SurfacePatch, d: &Map3, x: Vec2) -> Result<NaghdiStrains> {
    let f0 = frame_at(y0, x)?;
    m.domain.check(&x, m.margin(&x))?;
    let (dv, dd) = d.first(x);
    if (dv.norm() - 1.0).abs() > 1e-6 {
        return Err(Error::InvalidInput(format!("director is not a unit vector (|d| = {})", dv.norm())));
    }
    Ok(naghdi_from_parts(&f0, &m.map.jet(x), &dv, &Mat32::from_columns(&dd)))
}

/// Naghdi strains with the director slaved to the deformed normal.
pub fn naghdi_constrained(f0: &SurfaceFrame, fm: &SurfaceFrame, m: &Jet3) -> NaghdiStrains {
    naghdi_from_parts(f0, m, &fm.n0, &fm.grad_n)
}
