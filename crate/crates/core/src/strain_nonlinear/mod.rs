//! Nonlinear strain measures of a deformed midsurface relative to its reference.

pub mod bending;
pub mod constrained;
pub mod cosserat;
pub mod reconstruction;
pub mod rotation;

pub use bending::{acharya_tensors, naghdi_strains, virga_plate_tensor, AcharyaTensors, NaghdiStrains};
pub use constrained::{constrained_from_frames, constrained_strains, ConstrainedStrainSet};
pub use cosserat::{cosserat_from_parts, cosserat_strains, koiter_from_frames, koiter_strains, CosseratStrainSet, KoiterStrains};
pub use reconstruction::{ansatz_point, reconstruct_3d_strain, ThicknessProfile};
pub use rotation::{RotJet, RotationField};

use crate::error::Result;
use crate::field::SurfacePatch;
use crate::geometry::frame_at;
use crate::tensor::Vec2;

pub fn thickness_ansatz(
    y0: &SurfacePatch,
    m: &SurfacePatch,
    q: &RotationField,
    lambda: f64,
    mu: f64,
    x: Vec2,
) -> Result<ThicknessProfile> {
    let f0 = frame_at(y0, x)?;
    m.domain.check(&x, m.margin(&x))?;
    reconstruction::thickness_from_parts(&f0, &m.map.jet(x), &q.at(x)?, lambda, mu)
}
