//! Canonical reference surfaces, deformations and microrotation fields.

use std::f64::consts::FRAC_PI_2;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{polynomial, Domain, Jet3, Map3, Monomial, SurfacePatch};
use crate::geometry::frame_from_jet;
use crate::strain_nonlinear::RotationField;
use crate::tensor::{exp_so3, Vec2, Vec3};

/// Scalar monomial `coef · x₁^p · x₂^q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalarTerm {
    pub pow: [u32; 2],
    pub coef: f64,
}

fn scalar_jet(terms: &[ScalarTerm], x: Vec2) -> (f64, [f64; 2], [[f64; 2]; 2]) {
    let lifted: Vec<Monomial> =
        terms.iter().map(|t| Monomial { pow: t.pow, coef: [t.coef, 0.0, 0.0] }).collect();
    let j = crate::field::polynomial_jet(&lifted, x);
    (j.val.x, [j.d[0].x, j.d[1].x], [[j.dd[0][0].x, j.dd[0][1].x], [j.dd[1][0].x, j.dd[1][1].x]])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case", deny_unknown_fields)]
pub enum SurfaceSpec {
    Plate,
    Cylinder { radius: f64 },
    Sphere { radius: f64 },
    PolarPlane,
    Torus { major: f64, minor: f64 },
    Graph { terms: Vec<ScalarTerm> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case", deny_unknown_fields)]
pub enum DeformationSpec {
    Identity,
    Rigid { rotation: [f64; 3], translation: [f64; 3] },
    Scale { alpha: f64 },
    RadialExpansion { epsilon: f64 },
    IsometricRoll { rho: f64 },
    Polynomial { terms: Vec<Monomial> },
    Random { seed: u64, amplitude: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case", deny_unknown_fields)]
pub enum RotationSpec {
    Identity,
    /// The rigid rotation for rigid deformations, otherwise the constrained rotation.
    Matched,
    Constant { rotation: [f64; 3] },
    /// Rotation about the reference normal by the angle field `θ(x)`.
    Drill { terms: Vec<ScalarTerm> },
    /// `exp(anti(w(x)))` for a polynomial rotation vector `w`.
    ExpField { terms: Vec<Monomial> },
    Constrained,
}

impl Default for RotationSpec {
    fn default() -> Self {
        RotationSpec::Matched
    }
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(Error::BadParameters(format!("{name} must be positive, got {v}")))
    }
}

fn finite3(name: &str, v: [f64; 3]) -> Result<Vec3> {
    if v.iter().all(|c| c.is_finite()) {
        Ok(Vec3::from(v))
    } else {
        Err(Error::BadParameters(format!("{name} must be finite")))
    }
}

impl SurfaceSpec {
    pub fn id(&self) -> &'static str {
        match self {
            SurfaceSpec::Plate => "plate",
            SurfaceSpec::Cylinder { .. } => "cylinder",
            SurfaceSpec::Sphere { .. } => "sphere",
            SurfaceSpec::PolarPlane => "polar_plane",
            SurfaceSpec::Torus { .. } => "torus",
            SurfaceSpec::Graph { .. } => "graph",
        }
    }

    pub fn is_flat(&self) -> bool {
        matches!(self, SurfaceSpec::Plate | SurfaceSpec::PolarPlane)
    }

    /// The catalog's default parameter rectangle.
    pub fn default_domain(&self) -> Domain {
        match self {
            SurfaceSpec::Plate | SurfaceSpec::Graph { .. } => Domain::unit(),
            SurfaceSpec::Cylinder { radius } => Domain([[0.0, FRAC_PI_2 * radius], [0.0, 1.0]]),
            SurfaceSpec::Sphere { .. } => Domain([[0.0, 1.0], [-0.7, 0.7]]),
            SurfaceSpec::PolarPlane => Domain([[0.5, 2.0], [0.0, 1.5]]),
            SurfaceSpec::Torus { .. } => Domain([[0.0, 1.5], [-1.5, 1.5]]),
        }
    }

    pub fn build(&self) -> Result<Map3> {
        Ok(match self.clone() {
            SurfaceSpec::Plate => Map3::analytic(|x: Vec2| Jet3 {
                val: Vec3::new(x.x, x.y, 0.0),
                d: [Vec3::x(), Vec3::y()],
                dd: [[Vec3::zeros(); 2]; 2],
            }),
            SurfaceSpec::Cylinder { radius } => {
                let r = positive("radius", radius)?;
                Map3::analytic(move |x: Vec2| {
                    let (s, c) = (x.x / r).sin_cos();
                    Jet3 {
                        val: Vec3::new(r * c, r * s, x.y),
                        d: [Vec3::new(-s, c, 0.0), Vec3::z()],
                        dd: [[Vec3::new(-c / r, -s / r, 0.0), Vec3::zeros()], [Vec3::zeros(); 2]],
                    }
                })
            }
            SurfaceSpec::Sphere { radius } => {
                let r = positive("radius", radius)?;
                Map3::analytic(move |x: Vec2| {
                    let (s1, c1) = x.x.sin_cos();
                    let (s2, c2) = x.y.sin_cos();
                    let d12 = Vec3::new(s2 * s1, -s2 * c1, 0.0) * r;
                    Jet3 {
                        val: Vec3::new(c2 * c1, c2 * s1, s2) * r,
                        d: [Vec3::new(-c2 * s1, c2 * c1, 0.0) * r, Vec3::new(-s2 * c1, -s2 * s1, c2) * r],
                        dd: [
                            [Vec3::new(-c2 * c1, -c2 * s1, 0.0) * r, d12],
                            [d12, Vec3::new(-c2 * c1, -c2 * s1, -s2) * r],
                        ],
                    }
                })
            }
            SurfaceSpec::PolarPlane => Map3::analytic(|x: Vec2| {
                let (s, c) = x.y.sin_cos();
                let d12 = Vec3::new(-s, c, 0.0);
                Jet3 {
                    val: Vec3::new(x.x * c, x.x * s, 0.0),
                    d: [Vec3::new(c, s, 0.0), Vec3::new(-x.x * s, x.x * c, 0.0)],
                    dd: [[Vec3::zeros(), d12], [d12, Vec3::new(-x.x * c, -x.x * s, 0.0)]],
                }
            }),
            SurfaceSpec::Torus { major, minor } => {
                let (big, r) = (positive("major", major)?, positive("minor", minor)?);
                if r >= big {
                    return Err(Error::BadParameters("torus needs minor < major".into()));
                }
                Map3::analytic(move |x: Vec2| {
                    let (s1, c1) = x.x.sin_cos();
                    let (s2, c2) = x.y.sin_cos();
                    let w = big + r * c2;
                    let d12 = Vec3::new(r * s2 * s1, -r * s2 * c1, 0.0);
                    Jet3 {
                        val: Vec3::new(w * c1, w * s1, r * s2),
                        d: [Vec3::new(-w * s1, w * c1, 0.0), Vec3::new(-r * s2 * c1, -r * s2 * s1, r * c2)],
                        dd: [
                            [Vec3::new(-w * c1, -w * s1, 0.0), d12],
                            [d12, Vec3::new(-r * c2 * c1, -r * c2 * s1, -r * s2)],
                        ],
                    }
                })
            }
            SurfaceSpec::Graph { terms } => {
                if terms.iter().any(|t| !t.coef.is_finite()) {
                    return Err(Error::BadParameters("graph coefficients must be finite".into()));
                }
                Map3::analytic(move |x: Vec2| {
                    let (f, df, ddf) = scalar_jet(&terms, x);
                    Jet3 {
                        val: Vec3::new(x.x, x.y, f),
                        d: [Vec3::new(1.0, 0.0, df[0]), Vec3::new(0.0, 1.0, df[1])],
                        dd: [
                            [Vec3::new(0.0, 0.0, ddf[0][0]), Vec3::new(0.0, 0.0, ddf[0][1])],
                            [Vec3::new(0.0, 0.0, ddf[1][0]), Vec3::new(0.0, 0.0, ddf[1][1])],
                        ],
                    }
                })
            }
        })
    }

    pub fn patch(&self, domain: Option<Domain>) -> Result<SurfacePatch> {
        Ok(SurfacePatch::new(self.build()?, domain.unwrap_or_else(|| self.default_domain())))
    }
}

/// `y₀ + ε n₀` with the gradient from the analytic normal derivative.
pub fn normal_offset(y0: &Map3, epsilon: f64) -> Map3 {
    let y0 = y0.clone();
    Map3::first_order(move |x| {
        let j = y0.jet(x);
        match frame_from_jet(x, &j) {
            Ok(f) => (
                j.val + f.n0 * epsilon,
                [0, 1].map(|a| j.d[a] + f.grad_n.column(a) * epsilon),
            ),
            Err(_) => (Vec3::repeat(f64::NAN), [Vec3::repeat(f64::NAN); 2]),
        }
    })
}

/// Cubic random displacement with coefficients uniform in `[−amplitude, amplitude]`.
pub fn random_displacement(seed: u64, amplitude: f64) -> Map3 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut terms = Vec::new();
    for p in 0..=3u32 {
        for q in 0..=(3 - p) {
            if p + q == 0 {
                continue;
            }
            let coef = [0; 3].map(|_| rng.gen_range(-amplitude..=amplitude));
            terms.push(Monomial { pow: [p, q], coef });
        }
    }
    polynomial(terms)
}

impl DeformationSpec {
    pub fn id(&self) -> &'static str {
        match self {
            DeformationSpec::Identity => "identity",
            DeformationSpec::Rigid { .. } => "rigid",
            DeformationSpec::Scale { .. } => "scale",
            DeformationSpec::RadialExpansion { .. } => "radial_expansion",
            DeformationSpec::IsometricRoll { .. } => "isometric_roll",
            DeformationSpec::Polynomial { .. } => "polynomial",
            DeformationSpec::Random { .. } => "random",
        }
    }

    /// The deformed midsurface `m` for reference `y0`.
    pub fn build(&self, surface: &SurfaceSpec, y0: &Map3) -> Result<Map3> {
        Ok(match self {
            DeformationSpec::Identity => y0.clone(),
            DeformationSpec::Rigid { rotation, translation } => {
                y0.affine(exp_so3(&finite3("rotation", *rotation)?), finite3("translation", *translation)?)
            }
            DeformationSpec::Scale { alpha } => y0.scaled(positive("alpha", *alpha)?),
            DeformationSpec::RadialExpansion { epsilon } => {
                if !epsilon.is_finite() {
                    return Err(Error::BadParameters("epsilon must be finite".into()));
                }
                let e = *epsilon;
                match *surface {
                    SurfaceSpec::Cylinder { radius } => {
                        if radius + e <= 0.0 {
                            return Err(Error::BadParameters("expansion collapses the cylinder".into()));
                        }
                        let s = 1.0 + e / radius;
                        y0.affine(crate::tensor::Mat3::from_diagonal(&Vec3::new(s, s, 1.0)), Vec3::zeros())
                    }
                    SurfaceSpec::Sphere { radius } => {
                        if radius + e <= 0.0 {
                            return Err(Error::BadParameters("expansion collapses the sphere".into()));
                        }
                        y0.scaled(1.0 + e / radius)
                    }
                    _ => normal_offset(y0, e),
                }
            }
            DeformationSpec::IsometricRoll { rho } => {
                if *surface != SurfaceSpec::Plate {
                    return Err(Error::IncompatibleScenario("isometric_roll needs a plate".into()));
                }
                let r = positive("rho", *rho)?;
                Map3::analytic(move |x: Vec2| {
                    let (s, c) = (x.x / r).sin_cos();
                    Jet3 {
                        val: Vec3::new(r * s, x.y, r * (1.0 - c)),
                        d: [Vec3::new(c, 0.0, s), Vec3::y()],
                        dd: [[Vec3::new(-s / r, 0.0, c / r), Vec3::zeros()], [Vec3::zeros(); 2]],
                    }
                })
            }
            DeformationSpec::Polynomial { terms } => {
                if terms.iter().any(|t| t.coef.iter().any(|c| !c.is_finite())) {
                    return Err(Error::BadParameters("polynomial coefficients must be finite".into()));
                }
                y0.plus(&polynomial(terms.clone()))
            }
            DeformationSpec::Random { seed, amplitude } => {
                if !(amplitude.is_finite() && *amplitude >= 0.0) {
                    return Err(Error::BadParameters("amplitude must be non-negative".into()));
                }
                y0.plus(&random_displacement(*seed, *amplitude))
            }
        })
    }
}

impl RotationSpec {
    pub fn build(&self, deformation: &DeformationSpec, y0: &Map3, m: &Map3) -> Result<RotationField> {
        match self {
            RotationSpec::Identity => Ok(RotationField::identity()),
            RotationSpec::Matched => match deformation {
                DeformationSpec::Identity | DeformationSpec::Scale { .. } => Ok(RotationField::identity()),
                DeformationSpec::Rigid { rotation, .. } => {
                    RotationField::constant(exp_so3(&finite3("rotation", *rotation)?))
                }
                _ => Ok(RotationField::constrained(y0.clone(), m.clone())),
            },
            RotationSpec::Constant { rotation } => {
                RotationField::constant(exp_so3(&finite3("rotation", *rotation)?))
            }
            RotationSpec::Drill { terms } => Ok(RotationField::exp_of(drill_vector(terms, y0))),
            RotationSpec::ExpField { terms } => Ok(RotationField::exp_of(polynomial(terms.clone()))),
            RotationSpec::Constrained => Ok(RotationField::constrained(y0.clone(), m.clone())),
        }
    }

    /// The rotation-vector field `w` with `Q = exp(anti(w))`, for specs that define one directly.
    pub fn rotation_vector(&self, y0: &Map3) -> Result<Option<Map3>> {
        Ok(match self {
            RotationSpec::Identity => Some(Map3::zero()),
            RotationSpec::Constant { rotation } => Some(Map3::constant(finite3("rotation", *rotation)?)),
            RotationSpec::Drill { terms } => Some(drill_vector(terms, y0)),
            RotationSpec::ExpField { terms } => Some(polynomial(terms.clone())),
            RotationSpec::Matched | RotationSpec::Constrained => None,
        })
    }
}

/// `θ(x)·n₀(x)` for the scalar angle field `θ`.
fn drill_vector(terms: &[ScalarTerm], y0: &Map3) -> Map3 {
    let terms = terms.to_vec();
    let y0 = y0.clone();
    Map3::first_order(move |x| {
        let (t, dt, _) = scalar_jet(&terms, x);
        match frame_from_jet(x, &y0.jet(x)) {
            Ok(f) => (f.n0 * t, [0, 1].map(|a| f.n0 * dt[a] + f.grad_n.column(a) * t)),
            Err(_) => (Vec3::repeat(f64::NAN), [Vec3::repeat(f64::NAN); 2]),
        }
    })
}

/// Catalog lookup by id with default parameters, as used by the CLI.
pub fn surface_by_id(id: &str) -> Result<SurfaceSpec> {
    Ok(match id {
        "plate" => SurfaceSpec::Plate,
        "cylinder" => SurfaceSpec::Cylinder { radius: 1.0 },
        "sphere" => SurfaceSpec::Sphere { radius: 1.0 },
        "polar_plane" => SurfaceSpec::PolarPlane,
        "torus" => SurfaceSpec::Torus { major: 2.0, minor: 0.6 },
        "graph" => SurfaceSpec::Graph {
            terms: vec![
                ScalarTerm { pow: [2, 0], coef: 0.3 },
                ScalarTerm { pow: [1, 1], coef: -0.2 },
                ScalarTerm { pow: [0, 2], coef: 0.15 },
            ],
        },
        other => return Err(Error::UnknownCatalogId(other.to_string())),
    })
}

/// The curved and flat surfaces exercised by the default suite.
pub fn standard_surfaces() -> Vec<SurfaceSpec> {
    ["plate", "cylinder", "sphere", "polar_plane", "torus", "graph"]
        .iter()
        .map(|id| surface_by_id(id).expect("catalog id"))
        .collect()
}

/// Deterministic interior sample points, kept `margin` (relative) away from the boundary.
pub fn sample_points(domain: &Domain, count: usize, seed: u64, margin: f64) -> Vec<Vec2> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| domain.at_unit(rng.gen_range(margin..1.0 - margin), rng.gen_range(margin..1.0 - margin)))
        .collect()
}
