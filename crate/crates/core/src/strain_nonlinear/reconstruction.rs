//! Through-thickness reconstruction: the quadratic 3D strain expansion of the constrained
//! model and the stretch coefficients of the thickness ansatz.

use crate::error::{Error, Result};
use crate::field::Jet3;
use crate::geometry::SurfaceFrame;
use crate::tensor::{sym3, Mat3, Vec3};

use super::constrained::ConstrainedStrainSet;
use super::rotation::RotJet;

/// `λ/(λ+2μ)`.
pub fn lateral_ratio(lambda: f64, mu: f64) -> Result<f64> {
    let denom = lambda + 2.0 * mu;
    if !(denom > 0.0) || !lambda.is_finite() || !mu.is_finite() {
        return Err(Error::InvalidMaterial(format!("λ + 2μ = {denom} must be positive")));
    }
    Ok(lambda / denom)
}

/// Coefficients of `1`, `x₃` and `x₃²` in the reconstructed 3D strain.
pub fn strain_coefficients(
    cs: &ConstrainedStrainSet,
    f0: &SurfaceFrame,
    lambda: f64,
    mu: f64,
    symmetrized: bool,
) -> Result<[Mat3; 3]> {
    let kappa = lateral_ratio(lambda, mu)?;
    let p = f0.n0 * f0.n0.transpose();
    let e = cs.e_inf;
    let first = if symmetrized { cs.sym_eb_ck } else { cs.eb_ck };
    let second = if symmetrized { sym3(&(cs.eb_ck * f0.b_tensor)) } else { cs.eb_ck * f0.b_tensor };
    Ok([e - p * (kappa * e.trace()), first - p * (kappa * cs.eb_ck.trace()), second])
}

pub fn reconstruct_3d_strain(
    cs: &ConstrainedStrainSet,
    f0: &SurfaceFrame,
    lambda: f64,
    mu: f64,
    x3: f64,
    symmetrized: bool,
) -> Result<Mat3> {
    if !x3.is_finite() {
        return Err(Error::InvalidInput("x₃ must be finite".into()));
    }
    let [c0, c1, c2] = strain_coefficients(cs, f0, lambda, mu, symmetrized)?;
    Ok(c0 + c1 * x3 + c2 * (x3 * x3))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThicknessProfile {
    pub rho_m: f64,
    pub rho_b: f64,
}

pub fn thickness_from_parts(
    f0: &SurfaceFrame,
    m: &Jet3,
    rot: &RotJet,
    lambda: f64,
    mu: f64,
) -> Result<ThicknessProfile> {
    let kappa = lateral_ratio(lambda, mu)?;
    let q = rot.q;
    let gti = f0.grad_theta_inv;
    let pad = |a: Vec3, b: Vec3| Mat3::from_columns(&[a, b, Vec3::zeros()]);
    let gm = q.transpose() * pad(m.d[0], m.d[1]) * gti;
    let d_qn = [0, 1].map(|a| rot.dq[a] * f0.n0 + q * f0.grad_n.column(a));
    let gqn = q.transpose() * pad(d_qn[0], d_qn[1]) * gti;
    let gn0 = pad(f0.grad_n.column(0).into_owned(), f0.grad_n.column(1).into_owned()) * gti;
    Ok(ThicknessProfile {
        rho_m: 1.0 - kappa * (gm.trace() - 2.0),
        rho_b: -kappa * gqn.trace() + kappa * (gm * gn0).trace(),
    })
}

/// `m + (x₃ρ_m + x₃²ρ_b/2)·Q n₀`.
pub fn ansatz_point(m: &Vec3, profile: &ThicknessProfile, rot: &RotJet, n0: &Vec3, x3: f64) -> Vec3 {
    m + rot.q * n0 * (x3 * profile.rho_m + 0.5 * x3 * x3 * profile.rho_b)
}
