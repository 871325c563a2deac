//! Koiter change-of-metric / change-of-curvature and the unconstrained Cosserat strains.

use crate::error::Result;
use crate::field::{Jet3, SurfacePatch};
use crate::geometry::{frame_at, SurfaceFrame};
use crate::tensor::{block_lift, Mat2, Mat3, Mat32, Row2, Vec2, Vec3};

use super::rotation::{RotJet, RotationField};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KoiterStrains {
    /// `½(I_m − I_y₀)`.
    pub g: Mat2,
    /// `II_m − II_y₀`.
    pub r: Mat2,
}

pub fn koiter_from_frames(f0: &SurfaceFrame, fm: &SurfaceFrame) -> KoiterStrains {
    KoiterStrains {
        g: (fm.first_form - f0.first_form) * 0.5,
        r: fm.second_form - f0.second_form,
    }
}

pub fn koiter_strains(y0: &SurfacePatch, m: &SurfacePatch, x: Vec2) -> Result<KoiterStrains> {
    Ok(koiter_from_frames(&frame_at(y0, x)?, &frame_at(m, x)?))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CosseratStrainSet {
    /// Elastic shell strain `Qᵀ(∇m | Qn₀)[∇Θ]⁻¹ − 𝟙`.
    pub e_ms: Mat3,
    /// Bending-curvature tensor `(k₁ | k₂ | 0)[∇Θ]⁻¹`.
    pub k_es: Mat3,
    pub g: Mat2,
    pub t: Row2,
    pub r: Mat2,
    /// `R − G·L`.
    pub c: Mat2,
    /// Drilling bendings `n₀ᵀ(k₁ | k₂)`.
    pub n: Row2,
    /// `C_y₀ K_es`.
    pub ck: Mat3,
    /// `E_ms B_y₀ + C_y₀ K_es`.
    pub eb_ck: Mat3,
}

/// Block form `[∇Θ]⁻ᵀ (M | 0 ; t | 0) [∇Θ]⁻¹`.
pub fn push_block(f0: &SurfaceFrame, m: &Mat2, t: &Row2) -> Mat3 {
    f0.grad_theta_inv.transpose() * block_lift(m, t) * f0.grad_theta_inv
}

/// `(c₁ | c₂ | 0)[∇Θ]⁻¹`.
pub fn columns_pulled(f0: &SurfaceFrame, c: &[Vec3; 2]) -> Mat3 {
    Mat3::from_columns(&[c[0], c[1], Vec3::zeros()]) * f0.grad_theta_inv
}

pub fn cosserat_from_parts(f0: &SurfaceFrame, m: &Jet3, rot: &RotJet) -> Result<CosseratStrainSet> {
    rot.check()?;
    let q = rot.q;
    let k = rot.wryness_checked()?;
    let grad_m = m.grad();
    let n0 = f0.n0;

    let e_ms = q.transpose() * Mat3::from_columns(&[m.d[0], m.d[1], q * n0]) * f0.grad_theta_inv
        - Mat3::identity();
    let k_es = columns_pulled(f0, &k);

    let qy = q * f0.grad_y;
    let g = qy.transpose() * grad_m - f0.first_form;
    let t = (q * n0).transpose() * grad_m;
    let grad_qn = Mat32::from_columns(&[0, 1].map(|a| rot.dq[a] * n0 + q * f0.grad_n.column(a)));
    let r = -(qy.transpose() * grad_qn) - f0.second_form;
    let c = r - g * f0.weingarten;
    let n = Row2::new(n0.dot(&k[0]), n0.dot(&k[1]));
    let ck = f0.c_tensor * k_es;
    let eb_ck = e_ms * f0.b_tensor + ck;
    Ok(CosseratStrainSet { e_ms, k_es, g, t, r, c, n, ck, eb_ck })
}

pub fn cosserat_strains(
    y0: &SurfacePatch,
    m: &SurfacePatch,
    q: &RotationField,
    x: Vec2,
) -> Result<CosseratStrainSet> {
    let f0 = frame_at(y0, x)?;
    m.domain.check(&x, m.margin(&x))?;
    cosserat_from_parts(&f0, &m.map.jet(x), &q.at(x)?)
}

/// Residuals of the block identities and the curvature decomposition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockResiduals {
    pub e_ms: f64,
    pub ck: f64,
    pub eb_ck: f64,
    /// Same as `eb_ck` but with the opposite sign on the `T·L` row.
    pub eb_ck_flipped_row: f64,
    pub curvature_split: f64,
}

pub fn block_residuals(f0: &SurfaceFrame, s: &CosseratStrainSet) -> BlockResiduals {
    let l = f0.weingarten;
    let e_ms = (s.e_ms - push_block(f0, &s.g, &s.t)).norm();
    let ck = (s.ck + push_block(f0, &s.r, &Row2::zeros())).norm();
    let gl_r = s.g * l - s.r;
    let eb_ck = (s.eb_ck - push_block(f0, &gl_r, &(s.t * l))).norm();
    let eb_ck_flipped_row = (s.eb_ck - push_block(f0, &gl_r, &(-(s.t * l)))).norm();
    let e3 = Mat3::from_columns(&[Vec3::zeros(), Vec3::zeros(), f0.n0]);
    let kn = Mat3::from_columns(&[Vec3::zeros(), Vec3::zeros(), s.k_es.transpose() * f0.n0]);
    let split = f0.c_tensor * (-s.ck) + e3 * kn.transpose();
    BlockResiduals { e_ms, ck, eb_ck, eb_ck_flipped_row, curvature_split: (s.k_es - split).norm() }
}
