//! Shared fixtures for the benchmarks.

use shellstrain::catalog::{DeformationSpec, SurfaceSpec};
use shellstrain::energy::MaterialParams;
use shellstrain::verify::{build_scenario, Scenario, ScenarioSpec};

/// A randomly deformed unit cylinder with the default material and 20 sample points.
pub fn cylinder_scenario() -> Scenario {
    let spec = ScenarioSpec::new(
        SurfaceSpec::Cylinder { radius: 1.0 },
        DeformationSpec::Random { seed: 1, amplitude: 0.1 },
        MaterialParams::default(),
    );
    build_scenario(&spec).expect("catalog scenario builds")
}
