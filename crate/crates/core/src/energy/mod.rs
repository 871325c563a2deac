//! Energy densities, shell functionals and a small gradient minimizer.

pub mod density;
pub mod functional;
pub mod minimize;
pub mod quadrature;

pub use density::{density_eval, DensityKind, MaterialParams};
pub use functional::{
    coefficient_minima, cosserat_energy, koiter_energy, point_terms, thickness_coefficients, EnergyBreakdown,
    Kinematics, Variant,
};
pub use minimize::{minimize_displacement, MinimizeOptions, MinimizeReport, SplineField};
pub use quadrature::Quadrature;
