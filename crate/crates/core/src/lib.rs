//! Strain measures, energies and verification checks for thin Cosserat and Koiter shells
//! on parametrized midsurfaces.

pub mod catalog;
pub mod energy;
pub mod error;
pub mod field;
pub mod geometry;
#[doc(hidden)]
pub mod mutation;
pub mod strain_linear;
pub mod strain_nonlinear;
pub mod tensor;
pub mod verify;

pub use error::{Error, Result};
pub use field::{Domain, Jet3, Map3, Monomial, SurfacePatch};
pub use geometry::{frame_at, SurfaceFrame};
pub use tensor::{Mat2, Mat3, Mat32, Row2, Vec2, Vec3};
pub use verify::{run_check, CheckReport, ScenarioSpec, Tolerances};
