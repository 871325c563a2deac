//! Quadratic and bilinear energy densities on 3×3 tensors.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::{dev3, skew3, sym3, Mat3};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialParams {
    pub mu: f64,
    pub lambda: f64,
    pub mu_c: f64,
    #[serde(rename = "L_c")]
    pub l_c: f64,
    pub b1: f64,
    pub b2: f64,
    pub b3: f64,
    pub h: f64,
}

impl Default for MaterialParams {
    /// Unit shear modulus, `λ = 1`, `μ_c = μ/2`, `L_c = 0.2`, unit curvature weights, `h = 0.05`.
    fn default() -> Self {
        MaterialParams { mu: 1.0, lambda: 1.0, mu_c: 0.5, l_c: 0.2, b1: 1.0, b2: 1.0, b3: 1.0, h: 0.05 }
    }
}

impl MaterialParams {
    pub fn new(mu: f64, lambda: f64, mu_c: f64, l_c: f64, b: [f64; 3], h: f64) -> Result<Self> {
        let p = MaterialParams { mu, lambda, mu_c, l_c, b1: b[0], b2: b[1], b3: b[2], h };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.mu, self.lambda, self.mu_c, self.l_c, self.b1, self.b2, self.b3, self.h];
        let bad = |why: &str| Err(Error::InvalidMaterial(why.to_string()));
        if all.iter().any(|v| !v.is_finite()) {
            return bad("non-finite modulus");
        }
        if self.mu <= 0.0 {
            return bad("mu must be positive");
        }
        if self.lambda + 2.0 * self.mu <= 0.0 {
            return bad("lambda + 2 mu must be positive");
        }
        if self.mu_c < 0.0 {
            return bad("mu_c must be non-negative");
        }
        if self.l_c <= 0.0 {
            return bad("L_c must be positive");
        }
        if self.b1 < 0.0 || self.b2 < 0.0 || self.b3 < 0.0 {
            return bad("curvature weights must be non-negative");
        }
        if self.h <= 0.0 {
            return bad("thickness must be positive");
        }
        Ok(())
    }

    /// `λμ/(λ+2μ)`.
    pub fn shell_lambda(&self) -> f64 {
        self.lambda * self.mu / (self.lambda + 2.0 * self.mu)
    }

    /// Largest `c` with `W(X) ≥ c‖X‖²` (for the ∞ kinds, `≥ c‖sym X‖²`).
    pub fn coercivity(&self, kind: DensityKind) -> f64 {
        let (mu, ls) = (self.mu, self.shell_lambda());
        match kind {
            DensityKind::Wshell | DensityKind::WshellBilinear => mu.min(mu + 3.0 * ls).min(self.mu_c),
            DensityKind::Wmp => mu.min(mu + 1.5 * self.lambda).min(self.mu_c),
            DensityKind::Wcurv => mu * self.l_c * self.l_c * self.b1.min(self.b2).min(3.0 * self.b3),
            DensityKind::WshellInf | DensityKind::WshellInfBilinear => mu.min(mu + 3.0 * ls),
            DensityKind::WmpInf => mu.min(mu + 1.5 * self.lambda),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DensityKind {
    Wshell,
    WshellBilinear,
    Wmp,
    Wcurv,
    WshellInf,
    WshellInfBilinear,
    WmpInf,
}

impl DensityKind {
    pub const ALL: [DensityKind; 7] = [
        DensityKind::Wshell,
        DensityKind::WshellBilinear,
        DensityKind::Wmp,
        DensityKind::Wcurv,
        DensityKind::WshellInf,
        DensityKind::WshellInfBilinear,
        DensityKind::WmpInf,
    ];

    pub fn is_bilinear(self) -> bool {
        matches!(self, DensityKind::WshellBilinear | DensityKind::WshellInfBilinear)
    }
}

fn dot(a: &Mat3, b: &Mat3) -> f64 {
    a.component_mul(b).sum()
}

pub(crate) fn shell(p: &MaterialParams, x: &Mat3, y: &Mat3) -> f64 {
    p.mu * dot(&sym3(x), &sym3(y)) + p.mu_c * dot(&skew3(x), &skew3(y)) + p.shell_lambda() * x.trace() * y.trace()
}

pub(crate) fn shell_inf(p: &MaterialParams, x: &Mat3, y: &Mat3) -> f64 {
    // tr(sym X) = tr X
    p.mu * dot(&sym3(x), &sym3(y)) + p.shell_lambda() * x.trace() * y.trace()
}

pub(crate) fn mp(p: &MaterialParams, x: &Mat3) -> f64 {
    p.mu * sym3(x).norm_squared() + p.mu_c * skew3(x).norm_squared() + 0.5 * p.lambda * x.trace().powi(2)
}

pub(crate) fn mp_inf(p: &MaterialParams, x: &Mat3) -> f64 {
    p.mu * sym3(x).norm_squared() + 0.5 * p.lambda * x.trace().powi(2)
}

pub(crate) fn curv(p: &MaterialParams, x: &Mat3) -> f64 {
    let s = sym3(x);
    p.mu * p.l_c * p.l_c
        * (p.b1 * dev3(&s).norm_squared() + p.b2 * skew3(x).norm_squared() + p.b3 * x.trace().powi(2))
}

/// Evaluates a density; `y` must be given exactly for the bilinear kinds.
pub fn density_eval(kind: DensityKind, x: &Mat3, y: Option<&Mat3>, p: &MaterialParams) -> Result<f64> {
    p.validate()?;
    match (kind.is_bilinear(), y) {
        (true, None) => return Err(Error::InvalidInput(format!("{kind:?} needs a second argument"))),
        (false, Some(_)) => return Err(Error::InvalidInput(format!("{kind:?} takes one argument"))),
        _ => {}
    }
    Ok(match kind {
        DensityKind::Wshell => shell(p, x, x),
        DensityKind::WshellBilinear => shell(p, x, y.unwrap()),
        DensityKind::Wmp => mp(p, x),
        DensityKind::Wcurv => curv(p, x),
        DensityKind::WshellInf => shell_inf(p, x, x),
        DensityKind::WshellInfBilinear => shell_inf(p, x, y.unwrap()),
        DensityKind::WmpInf => mp_inf(p, x),
    })
}
