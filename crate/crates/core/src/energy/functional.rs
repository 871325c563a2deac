//! Koiter and thickness-expanded Cosserat energies integrated over the parameter domain.

use serde::{Deserialize, Serialize};

use super::density::{curv, mp, mp_inf, shell, shell_inf, MaterialParams};
use super::quadrature::Quadrature;
use crate::error::{Error, Result};
use crate::field::{Map3, SurfacePatch};
use crate::geometry::{frame_at, frame_from_jet, push_flat, SurfaceFrame};
use crate::strain_linear::{constrained_linear_from, cosserat_linear_from, koiter_linear_direct};
use crate::strain_nonlinear::{constrained_from_frames, cosserat_from_parts, koiter_from_frames, RotationField};
use crate::tensor::{Mat3, Mat32, Vec2};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Unconstrained,
    ModifiedConstrained,
    Linear,
    LinearConstrained,
}

impl Variant {
    /// The modified constrained models only see symmetric parts in the first five terms.
    pub fn symmetric_only(self) -> bool {
        matches!(self, Variant::ModifiedConstrained | Variant::LinearConstrained)
    }

    pub fn is_linear(self) -> bool {
        matches!(self, Variant::Linear | Variant::LinearConstrained)
    }
}

/// Unknown fields for each variant. Displacement-based variants take `v`, the others `m`.
#[derive(Clone, Copy)]
pub enum Kinematics<'a> {
    Unconstrained { m: &'a Map3, q: &'a RotationField },
    ModifiedConstrained { m: &'a Map3 },
    Linear { v: &'a Map3, theta: &'a Map3 },
    LinearConstrained { v: &'a Map3 },
}

impl Kinematics<'_> {
    pub fn variant(&self) -> Variant {
        match self {
            Kinematics::Unconstrained { .. } => Variant::Unconstrained,
            Kinematics::ModifiedConstrained { .. } => Variant::ModifiedConstrained,
            Kinematics::Linear { .. } => Variant::Linear,
            Kinematics::LinearConstrained { .. } => Variant::LinearConstrained,
        }
    }

    /// Membrane tensor `E` and curvature tensor `K` at `x`.
    pub fn strains(&self, f0: &SurfaceFrame, x: Vec2) -> Result<(Mat3, Mat3)> {
        Ok(match self {
            Kinematics::Unconstrained { m, q } => {
                let s = cosserat_from_parts(f0, &m.jet(x), &q.at(x)?)?;
                (s.e_ms, s.k_es)
            }
            Kinematics::ModifiedConstrained { m } => {
                let s = constrained_from_frames(f0, &frame_from_jet(x, &m.jet(x))?)?;
                (s.e_inf, s.k_inf)
            }
            Kinematics::Linear { v, theta } => {
                let (t, dt) = theta.first(x);
                let s = cosserat_linear_from(f0, &v.jet(x), &t, &Mat32::from_columns(&dt));
                (s.e, s.k)
            }
            Kinematics::LinearConstrained { v } => {
                let s = constrained_linear_from(f0, &v.jet(x));
                (s.e_inf, s.k_inf)
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnergyBreakdown {
    pub membrane: f64,
    pub membrane_bending: f64,
    #[serde(rename = "coupling_H")]
    pub coupling_h: f64,
    #[serde(rename = "coupling_B")]
    pub coupling_b: f64,
    pub mp_term: f64,
    pub curv_h1: f64,
    pub curv_h3: f64,
    pub curv_h5: f64,
    pub total: f64,
}

impl EnergyBreakdown {
    pub const NAMES: [&'static str; 8] =
        ["membrane", "membrane_bending", "coupling_H", "coupling_B", "mp_term", "curv_h1", "curv_h3", "curv_h5"];

    pub fn from_parts(p: [f64; 8]) -> Self {
        let total = p.iter().fold(0.0, |acc, v| acc + v);
        EnergyBreakdown {
            membrane: p[0],
            membrane_bending: p[1],
            coupling_h: p[2],
            coupling_b: p[3],
            mp_term: p[4],
            curv_h1: p[5],
            curv_h3: p[6],
            curv_h5: p[7],
            total,
        }
    }

    pub fn parts(&self) -> [f64; 8] {
        [
            self.membrane,
            self.membrane_bending,
            self.coupling_h,
            self.coupling_b,
            self.mp_term,
            self.curv_h1,
            self.curv_h3,
            self.curv_h5,
        ]
    }

    /// Largest componentwise gap relative to `1 + |reference|`.
    pub fn max_relative_gap(&self, reference: &EnergyBreakdown) -> f64 {
        self.parts()
            .iter()
            .chain(std::iter::once(&self.total))
            .zip(reference.parts().iter().chain(std::iter::once(&reference.total)))
            .map(|(a, b)| (a - b).abs() / (1.0 + b.abs()))
            .fold(0.0, f64::max)
    }
}

/// Thickness weights of the eight terms, with reference `K` and `H`.
pub fn thickness_coefficients(gauss: f64, mean: f64, h: f64) -> [f64; 8] {
    let (h3, h5) = (h.powi(3), h.powi(5));
    [
        h + gauss * h3 / 12.0,
        h3 / 12.0 - gauss * h5 / 80.0,
        -h3 / 3.0 * mean,
        h3 / 6.0,
        h5 / 80.0,
        h - gauss * h3 / 12.0,
        h3 / 12.0 - gauss * h5 / 80.0,
        h5 / 80.0,
    ]
}

/// Integrand of the eight terms at one point, without the area element.
pub fn point_terms(f0: &SurfaceFrame, e: &Mat3, k: &Mat3, p: &MaterialParams, symmetric_only: bool) -> [f64; 8] {
    let c = thickness_coefficients(f0.gauss_curv, f0.mean_curv, p.h);
    let b = f0.b_tensor;
    let x = e * b + f0.c_tensor * k;
    let xb = x * b;
    let kb = k * b;
    let (w, wmp): (fn(&MaterialParams, &Mat3, &Mat3) -> f64, fn(&MaterialParams, &Mat3) -> f64) =
        if symmetric_only { (shell_inf, mp_inf) } else { (shell, mp) };
    [
        c[0] * w(p, e, e),
        c[1] * w(p, &x, &x),
        c[2] * w(p, e, &x),
        c[3] * w(p, e, &xb),
        c[4] * wmp(p, &xb),
        c[5] * curv(p, k),
        c[6] * curv(p, &kb),
        c[7] * curv(p, &(kb * b)),
    ]
}

pub fn cosserat_energy(
    y0: &SurfacePatch,
    kin: Kinematics<'_>,
    p: &MaterialParams,
    quad: &Quadrature,
) -> Result<EnergyBreakdown> {
    p.validate()?;
    if quad.order < 2 {
        return Err(Error::QuadratureOrderInvalid(quad.order));
    }
    let sym = kin.variant().symmetric_only();
    let mut sums = [0.0; 8];
    for (x, w) in quad.points(&y0.domain)? {
        let f0 = frame_at(y0, x)?;
        let (e, k) = kin.strains(&f0, x)?;
        let t = point_terms(&f0, &e, &k, p, sym);
        let da = w * f0.det_grad_theta;
        for (s, v) in sums.iter_mut().zip(t) {
            *s += v * da;
        }
    }
    Ok(EnergyBreakdown::from_parts(sums))
}

/// Componentwise minimum of the thickness weights over the quadrature points.
pub fn coefficient_minima(y0: &SurfacePatch, h: f64, quad: &Quadrature) -> Result<[f64; 8]> {
    let mut out = [f64::INFINITY; 8];
    for (x, _) in quad.points(&y0.domain)? {
        let f0 = frame_at(y0, x)?;
        for (o, c) in out.iter_mut().zip(thickness_coefficients(f0.gauss_curv, f0.mean_curv, h)) {
            *o = o.min(c);
        }
    }
    Ok(out)
}

fn koiter_density(p: &MaterialParams, f0: &SurfaceFrame, g: &crate::tensor::Mat2, r: &crate::tensor::Mat2) -> f64 {
    let q = |t: &Mat3| p.mu * t.norm_squared() + p.shell_lambda() * t.trace().powi(2);
    p.h * q(&push_flat(f0, g)) + p.h.powi(3) / 12.0 * q(&push_flat(f0, r))
}

/// Koiter energy of a deformation `m`, or of a displacement `v` when `linear` is set.
pub fn koiter_energy(y0: &SurfacePatch, m_or_v: &Map3, p: &MaterialParams, quad: &Quadrature, linear: bool) -> Result<f64> {
    p.validate()?;
    let mut sum = 0.0;
    for (x, w) in quad.points(&y0.domain)? {
        let f0 = frame_at(y0, x)?;
        let (g, r) = if linear {
            let k = koiter_linear_direct(&f0, &m_or_v.jet(x));
            (k.g, k.r)
        } else {
            let k = koiter_from_frames(&f0, &frame_from_jet(x, &m_or_v.jet(x))?);
            (k.g, k.r)
        };
        sum += koiter_density(p, &f0, &g, &r) * w * f0.det_grad_theta;
    }
    Ok(sum)
}
