//! Pointwise differential geometry of a parametrized midsurface.
//!
//! Sign convention: `II = −(∇y)ᵀ∇n = ⟨n, ∂_α∂_β y⟩` with `n = ∂₁y×∂₂y / ‖·‖` following
//! the chart orientation.

use crate::error::{Error, Result};
use crate::field::{Jet3, SurfacePatch};
use crate::mutation::{self, Fault};
use crate::tensor::{flat, Mat2, Mat3, Mat32, Vec2, Vec3};

/// Smallest admissible `‖∂₁y × ∂₂y‖`.
pub const REG_MIN: f64 = 1e-6;
/// Smallest admissible `det I`.
pub const DET_I_MIN: f64 = 1e-12;

/// Christoffel symbols stored as `gamma[γ][α][β] = Γ^γ_{αβ}`.
pub type Christoffel = [[[f64; 2]; 2]; 2];

#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceFrame {
    pub x: Vec2,
    pub point: Vec3,
    /// `∇y = (∂₁y | ∂₂y)`.
    pub grad_y: Mat32,
    /// `hess[α][β] = ∂_α∂_β y`.
    pub hess: [[Vec3; 2]; 2],
    pub n0: Vec3,
    /// `∇n = (∂₁n | ∂₂n)`.
    pub grad_n: Mat32,
    /// `∇Θ = (∂₁y | ∂₂y | n)` evaluated on the midsurface.
    pub grad_theta: Mat3,
    pub grad_theta_inv: Mat3,
    pub det_grad_theta: f64,
    /// `∂_β ∇Θ`.
    pub d_grad_theta: [Mat3; 2],
    /// `∂_β [∇Θ]⁻¹ = −[∇Θ]⁻¹ (∂_β∇Θ) [∇Θ]⁻¹`.
    pub d_grad_theta_inv: [Mat3; 2],
    /// Covariant basis `(a₁, a₂, a₃ = n)`.
    pub a_co: [Vec3; 3],
    /// Contravariant basis, the rows of `[∇Θ]⁻¹`.
    pub a_contra: [Vec3; 3],
    pub first_form: Mat2,
    pub second_form: Mat2,
    pub third_form: Mat2,
    pub weingarten: Mat2,
    pub mean_curv: f64,
    pub gauss_curv: f64,
    pub gamma: Christoffel,
    pub a_tensor: Mat3,
    pub b_tensor: Mat3,
    pub c_tensor: Mat3,
}

impl SurfaceFrame {
    pub fn first_form_inv(&self) -> Mat2 {
        // Nonsingular by construction (det I ≥ DET_I_MIN).
        self.first_form.try_inverse().unwrap_or_else(Mat2::zeros)
    }

    pub fn sqrt_det_first_form(&self) -> f64 {
        self.first_form.determinant().sqrt()
    }
}

/// The 90° tangent-rotation seed used by the alternator tensor.
pub fn alternator_seed() -> Mat3 {
    Mat3::new(0.0, 1.0, 0.0, -1.0, 0.0, 0.0, 0.0, 0.0, 0.0)
}

/// All frame quantities from a second-order jet of the map. No domain check.
pub fn frame_from_jet(x: Vec2, jet: &Jet3) -> Result<SurfaceFrame> {
    let [a1, a2] = jet.d;
    let c = a1.cross(&a2);
    let cn = c.norm();
    if !cn.is_finite() || cn < REG_MIN {
        return Err(Error::Degenerate(format!("‖∂₁y×∂₂y‖ = {cn:.3e} at ({}, {})", x.x, x.y)));
    }
    let n = c / cn;
    let grad_y = jet.grad();
    let first_form = grad_y.transpose() * grad_y;
    let det_i = first_form.determinant();
    if det_i < DET_I_MIN {
        return Err(Error::Degenerate(format!("det I = {det_i:.3e}")));
    }
    let dn = [0, 1].map(|b| {
        let dc = jet.dd[0][b].cross(&a2) + a1.cross(&jet.dd[1][b]);
        (dc - n * n.dot(&dc)) / cn
    });
    let grad_n = Mat32::from_columns(&dn);

    let mut second_form = Mat2::zeros();
    for a in 0..2 {
        for b in 0..2 {
            second_form[(a, b)] = 0.5 * (n.dot(&jet.dd[a][b]) + n.dot(&jet.dd[b][a]));
        }
    }
    second_form *= mutation::sign(Fault::FlipSecondForm);
    let i_inv = first_form.try_inverse().ok_or_else(|| Error::Degenerate("singular I".into()))?;
    let weingarten = i_inv * second_form * mutation::sign(Fault::FlipWeingarten);
    let third_form = grad_n.transpose() * grad_n;

    let grad_theta = Mat3::from_columns(&[a1, a2, n]);
    let grad_theta_inv =
        grad_theta.try_inverse().ok_or_else(|| Error::Degenerate("singular ∇Θ".into()))?;
    let det_grad_theta = grad_theta.determinant();
    let d_grad_theta = [0, 1].map(|b| Mat3::from_columns(&[jet.dd[0][b], jet.dd[1][b], dn[b]]));
    let d_grad_theta_inv = d_grad_theta.map(|d| -(grad_theta_inv * d * grad_theta_inv));
    let a_contra = [0, 1, 2].map(|i| grad_theta_inv.row(i).transpose().into_owned());

    let mut gamma = [[[0.0; 2]; 2]; 2];
    for (g, plane) in gamma.iter_mut().enumerate() {
        for a in 0..2 {
            for b in 0..2 {
                plane[a][b] = 0.5 * (a_contra[g].dot(&jet.dd[a][b]) + a_contra[g].dot(&jet.dd[b][a]));
            }
        }
    }

    let mut gy0 = Mat3::zeros();
    gy0.fixed_view_mut::<3, 2>(0, 0).copy_from(&grad_y);
    let mut gn0 = Mat3::zeros();
    gn0.fixed_view_mut::<3, 2>(0, 0).copy_from(&grad_n);
    let a_tensor = gy0 * grad_theta_inv;
    let b_tensor = -(gn0 * grad_theta_inv);
    let c_tensor = grad_theta_inv.transpose() * alternator_seed() * grad_theta_inv * det_grad_theta;

    Ok(SurfaceFrame {
        x,
        point: jet.val,
        grad_y,
        hess: jet.dd,
        n0: n,
        grad_n,
        grad_theta,
        grad_theta_inv,
        det_grad_theta,
        d_grad_theta,
        d_grad_theta_inv,
        a_co: [a1, a2, n],
        a_contra,
        first_form,
        second_form,
        third_form,
        mean_curv: 0.5 * weingarten.trace(),
        gauss_curv: weingarten.determinant(),
        weingarten,
        gamma,
        a_tensor,
        b_tensor,
        c_tensor,
    })
}

pub fn frame_at(surface: &SurfacePatch, x: Vec2) -> Result<SurfaceFrame> {
    surface.domain.check(&x, surface.margin(&x))?;
    frame_from_jet(x, &surface.map.jet(x))
}

pub fn christoffels(surface: &SurfacePatch, x: Vec2) -> Result<Christoffel> {
    Ok(frame_at(surface, x)?.gamma)
}

pub fn normal_of_map(m: &SurfacePatch, x: Vec2) -> Result<Vec3> {
    m.domain.check(&x, m.margin(&x))?;
    let (_, [a1, a2]) = m.map.first(x);
    let c = a1.cross(&a2);
    let cn = c.norm();
    if !cn.is_finite() || cn < REG_MIN {
        return Err(Error::Degenerate(format!("‖∂₁m×∂₂m‖ = {cn:.3e}")));
    }
    Ok(c / cn)
}

/// `[∇Θ]⁻ᵀ M♭ [∇Θ]⁻¹`.
pub fn push_flat(frame: &SurfaceFrame, m: &Mat2) -> Mat3 {
    frame.grad_theta_inv.transpose() * flat(m) * frame.grad_theta_inv
}
