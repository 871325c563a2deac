//! Named property checks over catalog scenarios.

mod checks;
pub mod report;
pub mod scenario;

pub use report::{CheckReport, Relation, Residual, Tolerances, Verdict};
pub use scenario::{build_scenario, Scenario, ScenarioSpec};

use crate::catalog::{DeformationSpec, RotationSpec, ScalarTerm, SurfaceSpec};
use crate::energy::MaterialParams;
use crate::error::{Error, Result};
use report::Recorder;

pub const CHECK_IDS: [&str; 11] = [
    "rigid_vanishing",
    "scaling_suite",
    "pure_stretch_bending",
    "pure_flexure",
    "curvature_variation",
    "linearization_fd",
    "identities",
    "reconstruction_symmetry",
    "appendix_stretch",
    "energy_properties",
    "drill_report",
];

type CheckFn = fn(&Scenario, &Tolerances, &mut Recorder) -> Result<()>;

fn lookup(id: &str) -> Result<CheckFn> {
    Ok(match id {
        "rigid_vanishing" => checks::rigid_vanishing,
        "scaling_suite" => checks::scaling_suite,
        "pure_stretch_bending" => checks::pure_stretch_bending,
        "pure_flexure" => checks::pure_flexure,
        "curvature_variation" => checks::curvature_variation,
        "linearization_fd" => checks::linearization_fd,
        "identities" => checks::identities,
        "reconstruction_symmetry" => checks::reconstruction_symmetry,
        "appendix_stretch" => checks::appendix_stretch,
        "energy_properties" => checks::energy_properties,
        "drill_report" => checks::drill_report,
        other => return Err(Error::UnknownCatalogId(format!("check {other}"))),
    })
}

/// Whether `id` can run on the scenario described by `spec` at all.
pub fn compatible(id: &str, spec: &ScenarioSpec) -> bool {
    use DeformationSpec as D;
    use SurfaceSpec as S;
    let curved = matches!(spec.surface, S::Cylinder { .. } | S::Sphere { .. });
    match id {
        "rigid_vanishing" => matches!(spec.deformation, D::Rigid { .. }),
        "pure_stretch_bending" => curved && matches!(spec.deformation, D::RadialExpansion { .. }),
        "pure_flexure" => spec.surface == S::Plate && matches!(spec.deformation, D::IsometricRoll { .. }),
        "appendix_stretch" => match spec.deformation {
            D::Identity | D::Scale { .. } => true,
            D::RadialExpansion { .. } => curved,
            _ => false,
        },
        "drill_report" => spec.surface.is_flat() && matches!(spec.rotation, RotationSpec::Drill { .. }),
        _ => CHECK_IDS.contains(&id),
    }
}

pub fn run_check(id: &str, scenario: &Scenario, tol: &Tolerances) -> Result<CheckReport> {
    let check = lookup(id)?;
    let mut rec = Recorder::default();
    check(scenario, tol, &mut rec)?;
    Ok(rec.finish(id, &scenario.id))
}

/// The scenario each check runs on when no scenario is given.
pub fn default_suite() -> Vec<(&'static str, ScenarioSpec)> {
    let p = MaterialParams::default();
    let unit_cylinder = SurfaceSpec::Cylinder { radius: 1.0 };
    let rigid = DeformationSpec::Rigid { rotation: [0.3, -0.4, 0.5], translation: [1.0, -2.0, 0.5] };
    let random = DeformationSpec::Random { seed: 3, amplitude: 0.1 };
    let drill = RotationSpec::Drill { terms: vec![ScalarTerm { pow: [1, 0], coef: 0.4 }, ScalarTerm { pow: [0, 2], coef: 0.3 }] };
    vec![
        ("rigid_vanishing", ScenarioSpec::new(unit_cylinder.clone(), rigid, p)),
        ("scaling_suite", ScenarioSpec::new(unit_cylinder.clone(), random.clone(), p)),
        ("pure_stretch_bending", ScenarioSpec::new(unit_cylinder.clone(), DeformationSpec::RadialExpansion { epsilon: 0.1 }, p)),
        ("pure_flexure", ScenarioSpec::new(SurfaceSpec::Plate, DeformationSpec::IsometricRoll { rho: 2.0 }, p)),
        ("curvature_variation", ScenarioSpec::new(unit_cylinder.clone(), random.clone(), p)),
        ("linearization_fd", ScenarioSpec::new(SurfaceSpec::Sphere { radius: 1.0 }, random.clone(), p)),
        ("identities", ScenarioSpec::new(SurfaceSpec::Torus { major: 2.0, minor: 0.5 }, random.clone(), p)),
        ("reconstruction_symmetry", ScenarioSpec::new(unit_cylinder.clone(), random.clone(), p)),
        ("appendix_stretch", ScenarioSpec::new(SurfaceSpec::Sphere { radius: 1.0 }, DeformationSpec::RadialExpansion { epsilon: 0.2 }, p)),
        ("energy_properties", ScenarioSpec::new(unit_cylinder, random, p)),
        ("drill_report", ScenarioSpec::new(SurfaceSpec::Plate, DeformationSpec::Identity, p).with_rotation(drill)),
    ]
}

/// Runs `(check, scenario)` pairs, stopping at the first scenario or check error.
pub fn run_suite(entries: &[(&str, ScenarioSpec)], tol: &Tolerances) -> Result<Vec<CheckReport>> {
    entries
        .iter()
        .map(|(id, spec)| {
            if !compatible(id, spec) {
                return Err(Error::IncompatibleScenario(format!("{id} cannot run on {}", spec.id())));
            }
            run_check(id, &build_scenario(spec)?, tol)
        })
        .collect()
}
