//! Constrained Cosserat strains: the microrotation is the polar factor of
//! `(∇m | n)[∇Θ]⁻¹`.

use crate::error::{Error, Result};
use crate::field::{Map3, SurfacePatch};
use crate::geometry::{frame_at, frame_from_jet, push_flat, SurfaceFrame};
use crate::mutation::{self, Fault};
use crate::tensor::{
    anti, axl_of_skew_part, hat, polar_decompose, spd_sqrt, spd_sqrt_with_null, sym2, upper_block,
    Mat2, Mat3, Row2, Vec2, Vec3,
};

use super::cosserat::columns_pulled;
use super::rotation::{RotJet, RotationField};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstrainedStrainSet {
    pub q_inf: Mat3,
    /// Right stretch `U = √(FᵀF)` of `F = (∇m | n)[∇Θ]⁻¹`.
    pub stretch: Mat3,
    /// `Q∞ᵀ(∇m | Q∞n₀)[∇Θ]⁻¹ − 𝟙`.
    pub e_inf: Mat3,
    /// The same strain as a difference of square roots of the lifted metrics.
    pub e_inf_roots: Mat3,
    pub k_inf: Mat3,
    pub g_inf: Mat2,
    /// Transverse shear `(Q∞n₀)ᵀ∇m`; zero up to rounding.
    pub t_inf: Row2,
    /// `R∞` from its definition `−(Q∞∇y₀)ᵀ∇(Q∞n₀) − II_y₀`.
    pub r_inf: Mat2,
    /// `R∞♭` from the mixed fundamental-form expression.
    pub r_inf_flat: Mat3,
    pub n_inf: Row2,
    /// `E∞B_y₀ + C_y₀K∞`.
    pub eb_ck: Mat3,
    /// `−[∇Θ]⁻ᵀ sym(R∞ − G∞L)♭ [∇Θ]⁻¹`.
    pub sym_eb_ck: Mat3,
    /// Axial vectors of `Q∞ᵀ∂_α Q∞`.
    pub wryness: [Vec3; 2],
}

/// `F = (∇m | n)[∇Θ]⁻¹` and its partial derivatives.
fn reconstructed_gradient(f0: &SurfaceFrame, fm: &SurfaceFrame) -> (Mat3, [Mat3; 2]) {
    let gm = fm.grad_theta;
    let f = gm * f0.grad_theta_inv;
    let df = [0, 1].map(|b| fm.d_grad_theta[b] * f0.grad_theta_inv + gm * f0.d_grad_theta_inv[b]);
    (f, df)
}

/// `Q∞` and its derivatives through the polar-factor derivative.
///
/// With `F = RU` and `RᵀdR = anti(w)`: `skew(RᵀdF) = ½ anti((tr U·𝟙 − U)w)`.
pub fn constrained_rotation_jet(f0: &SurfaceFrame, fm: &SurfaceFrame) -> Result<(RotJet, Mat3, [Vec3; 2])> {
    let (f, df) = reconstructed_gradient(f0, fm);
    let p = polar_decompose(&f)?;
    let m = Mat3::identity() * p.u.trace() - p.u;
    let m_inv = m
        .try_inverse()
        .ok_or_else(|| Error::PolarFailure("singular stretch in rotation derivative".into()))?;
    let w = df.map(|d| m_inv * axl_of_skew_part(&(p.r.transpose() * d)) * 2.0);
    let jet = RotJet { q: p.r, dq: w.map(|wb| p.r * anti(&wb)) };
    Ok((jet, p.u, w))
}

pub fn constrained_from_frames(f0: &SurfaceFrame, fm: &SurfaceFrame) -> Result<ConstrainedStrainSet> {
    let (rot, stretch, wryness) = constrained_rotation_jet(f0, fm)?;
    let q = rot.q;
    let gti = f0.grad_theta_inv;
    let gt = f0.grad_theta;

    let e_inf = q.transpose() * Mat3::from_columns(&[fm.a_co[0], fm.a_co[1], q * f0.n0]) * gti
        - Mat3::identity();
    let e_inf_roots = spd_sqrt_with_null(&push_flat(f0, &fm.first_form), &f0.n0)?
        - spd_sqrt_with_null(&push_flat(f0, &f0.first_form), &f0.n0)?;

    let qy = q * f0.grad_y;
    let g_inf = qy.transpose() * fm.grad_y - f0.first_form;
    let t_inf = (q * f0.n0).transpose() * fm.grad_y;
    let r_inf = -(qy.transpose() * fm.grad_n) - f0.second_form;

    let root = |i: &Mat2| -> Result<Mat3> {
        let inv = hat(i).try_inverse().ok_or_else(|| Error::Degenerate("singular I".into()))?;
        spd_sqrt(&(gt * inv * gt.transpose()))
    };
    let root_m = root(&fm.first_form)? * mutation::sign(Fault::FlipStretchRoot);
    let root_0 = root(&f0.first_form)?;
    let r_inf_flat = gt.transpose()
        * (root_m * push_flat(f0, &fm.second_form) - root_0 * push_flat(f0, &f0.second_form))
        * gt;

    let k_inf = columns_pulled(f0, &wryness);
    let n_inf = Row2::new(f0.n0.dot(&wryness[0]), f0.n0.dot(&wryness[1]));
    let eb_ck = e_inf * f0.b_tensor + f0.c_tensor * k_inf;
    let r_mixed = upper_block(&r_inf_flat);
    let sym_eb_ck = -push_flat(f0, &sym2(&(r_mixed - g_inf * f0.weingarten)));

    Ok(ConstrainedStrainSet {
        q_inf: q,
        stretch,
        e_inf,
        e_inf_roots,
        k_inf,
        g_inf,
        t_inf,
        r_inf,
        r_inf_flat,
        n_inf,
        eb_ck,
        sym_eb_ck,
        wryness,
    })
}

pub fn constrained_strains(y0: &SurfacePatch, m: &SurfacePatch, x: Vec2) -> Result<ConstrainedStrainSet> {
    constrained_from_frames(&frame_at(y0, x)?, &frame_at(m, x)?)
}

impl RotationField {
    /// The constrained microrotation `Q∞` of the pair `(y₀, m)`.
    pub fn constrained(y0: Map3, m: Map3) -> Self {
        RotationField::from_fn(move |x| {
            let f0 = frame_from_jet(x, &y0.jet(x))?;
            let fm = frame_from_jet(x, &m.jet(x))?;
            Ok(constrained_rotation_jet(&f0, &fm)?.0)
        })
    }
}
