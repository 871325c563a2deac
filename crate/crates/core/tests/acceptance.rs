//! End-to-end acceptance criteria. Prints one line per criterion and exits non-zero if any fails.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shellstrain::catalog::{standard_surfaces, DeformationSpec, SurfaceSpec};
use shellstrain::energy::{minimize_displacement, MaterialParams, MinimizeOptions, Variant};
use shellstrain::mutation::{inject, Fault};
use shellstrain::strain_linear::{constrained_linear_from, variations_fd};
use shellstrain::strain_nonlinear::koiter_from_frames;
use shellstrain::tensor::adj2;
use shellstrain::verify::{build_scenario, run_check, CheckReport, ScenarioSpec, Tolerances};
use shellstrain::{frame_at, geometry::frame_from_jet, Map3, Vec2, Vec3};

type Outcome = Result<String, String>;

fn run(id: &str, spec: &ScenarioSpec) -> Result<CheckReport, String> {
    let s = build_scenario(spec).map_err(|e| format!("{}: {e}", spec.id()))?;
    run_check(id, &s, &Tolerances::default()).map_err(|e| format!("{id} on {}: {e}", spec.id()))
}

/// Fails unless the report passed; returns the largest raw value under `prefix`.
fn require(r: &CheckReport, prefix: &str) -> Result<f64, String> {
    if !r.passed() {
        let w = r.residuals.iter().max_by(|a, b| a.normalized.total_cmp(&b.normalized)).unwrap();
        return Err(format!("{} on {}: {} = {:.3e} against {:.3e}", r.check_id, r.scenario, w.label, w.value, w.bound));
    }
    r.max_value(prefix).ok_or_else(|| format!("{}: no residual labelled {prefix}", r.check_id))
}

fn at_most(what: &str, value: f64, bound: f64) -> Result<(), String> {
    if value <= bound {
        Ok(())
    } else {
        Err(format!("{what} = {value:.3e} exceeds {bound:.1e}"))
    }
}

fn material() -> MaterialParams {
    MaterialParams::default()
}

fn rigid_vanishing() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for surface in ["plate", "cylinder", "sphere"] {
        for _ in 0..3 {
            let rotation = [0; 3].map(|_| rng.gen_range(-1.5..1.5));
            let translation = [0; 3].map(|_| rng.gen_range(-5.0..5.0));
            let spec = ScenarioSpec::new(
                shellstrain::catalog::surface_by_id(surface).unwrap(),
                DeformationSpec::Rigid { rotation, translation },
                material(),
            );
            let r = run("rigid_vanishing", &spec)?;
            count += r.residuals.len();
            worst = worst.max(require(&r, "")?);
        }
    }
    at_most("max residual", worst, 1e-8)?;
    Ok(format!("{count} residuals, max {worst:.2e}"))
}

fn scaling_suite() -> Outcome {
    let mut worst: f64 = 0.0;
    for surface in [SurfaceSpec::Cylinder { radius: 1.0 }, SurfaceSpec::Sphere { radius: 1.0 }] {
        for seed in [1, 2] {
            let spec = ScenarioSpec::new(surface.clone(), DeformationSpec::Random { seed, amplitude: 0.1 }, material());
            let r = run("scaling_suite", &spec)?;
            for label in ["R_inf_flat", "R_Acharya", "Virga"] {
                worst = worst.max(require(&r, label)?);
            }
        }
    }
    at_most("invariance residual", worst, 1e-7)?;
    // Unit sphere: ‖II‖ = √(cos⁴ψ + 1) at latitude ψ, so the Koiter strain moves by |α − 1| times that.
    let sphere = SurfaceSpec::Sphere { radius: 1.0 }.patch(None).unwrap();
    let mut ratio = f64::INFINITY;
    for psi in [0.0, 0.3, -0.5] {
        let x = Vec2::new(0.4, psi);
        let f0 = frame_at(&sphere, x).unwrap();
        let jet = sphere.map.jet(x);
        let base = koiter_from_frames(&f0, &f0).r;
        for alpha in [0.5, 2.0] {
            let fa = frame_from_jet(x, &jet.scale(alpha)).unwrap();
            let hand = (alpha - 1.0_f64).abs() * (psi.cos().powi(4) + 1.0).sqrt();
            ratio = ratio.min((koiter_from_frames(&f0, &fa).r - base).norm() / hand);
        }
    }
    if ratio < 0.5 {
        return Err(format!("Koiter witness only {ratio:.3} of the hand value"));
    }
    Ok(format!("invariance max {worst:.2e}, Koiter witness/hand ≥ {ratio:.3}"))
}

fn stretch_separation() -> Outcome {
    let spec = ScenarioSpec::new(
        SurfaceSpec::Cylinder { radius: 1.0 },
        DeformationSpec::RadialExpansion { epsilon: 0.3 },
        material(),
    );
    let r = run("pure_stretch_bending", &spec)?;
    let ksb = require(&r, "R_KSB_lin")?;
    let lin = require(&r, "R_inf_lin")?;
    let finite = require(&r, "R_inf_flat")?;
    at_most("‖R_KSB‖", ksb, 1e-8)?;
    at_most("‖R∞ lin‖", lin, 1e-8)?;
    at_most("‖R∞♭‖ at ε = 0.3", finite, 1e-7)?;
    let rk = r.min_value("R_Koiter_lin").unwrap();
    let ral = r.min_value("R_AL_lin").unwrap();
    if rk < 0.5 || ral < 0.5 {
        return Err(format!("witnesses too small: ‖R_K‖ = {rk:.3}, ‖R_AL‖ = {ral:.3}"));
    }
    Ok(format!("R_KSB {ksb:.1e}, R∞lin {lin:.1e}, R∞♭ {finite:.1e}; ‖R_K‖ ≥ {rk:.3}, ‖R_AL‖ ≥ {ral:.3}"))
}

fn pure_flexure() -> Outcome {
    let mut worst: f64 = 0.0;
    for rho in [1.0, 2.0] {
        let spec = ScenarioSpec::new(SurfaceSpec::Plate, DeformationSpec::IsometricRoll { rho }, material());
        worst = worst.max(require(&run("pure_flexure", &spec)?, "R_inf_flat-flat")?);
    }
    at_most("‖R∞♭ − flat(R_K)‖", worst, 1e-7)?;
    Ok(format!("max {worst:.2e} over ρ ∈ {{1, 2}}"))
}

fn variation_identities() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut oracle: f64 = 0.0;
    let mut pairs = 0;
    for (k, surface) in standard_surfaces().into_iter().enumerate() {
        for seed in 0..5u64 {
            let spec = ScenarioSpec::new(
                surface.clone(),
                DeformationSpec::Random { seed: 100 + 7 * k as u64 + seed, amplitude: 0.2 },
                material(),
            );
            let s = build_scenario(&spec).map_err(|e| e.to_string())?;
            let r = run_check("curvature_variation", &s, &Tolerances::default()).map_err(|e| e.to_string())?;
            worst = worst.max(require(&r, "d")?);
            // dH and dK from R_AL, recomputed here against the difference quotients.
            let v = s.displacement();
            for &x in &s.points {
                let f0 = frame_at(&s.y0, x).unwrap();
                let vj = v.jet(x);
                let fd = variations_fd(&s.y0.map.jet(x), &vj, x).unwrap();
                let r_al = constrained_linear_from(&f0, &vj).r_al;
                let i_inv = f0.first_form_inv();
                let dh = 0.5 * (i_inv * r_al).trace();
                let dk = (adj2(&f0.weingarten) * i_inv * r_al).trace();
                oracle = oracle.max((fd.d_mean - dh).abs() / (1.0 + dh.abs()));
                oracle = oracle.max((fd.d_gauss - dk).abs() / (1.0 + dk.abs()));
            }
            pairs += 1;
        }
    }
    at_most("relative FD gap", worst.max(oracle), 1e-6)?;
    // Unit cylinder, radial expansion per unit ε: the displacement is exactly the unit normal.
    let spec = ScenarioSpec::new(SurfaceSpec::Cylinder { radius: 1.0 }, DeformationSpec::RadialExpansion { epsilon: 1.0 }, material());
    let s = build_scenario(&spec).map_err(|e| e.to_string())?;
    let v = s.displacement();
    let mut dh_gap: f64 = 0.0;
    for &x in &s.points {
        let fd = variations_fd(&s.y0.map.jet(x), &v.jet(x), x).unwrap();
        dh_gap = dh_gap.max((fd.d_mean - 0.5).abs());
    }
    at_most("|dH − 1/2| on the cylinder", dh_gap, 1e-6)?;
    Ok(format!("{pairs} pairs, max relative gap {:.2e}; cylinder |dH − 1/2| ≤ {dh_gap:.1e}", worst.max(oracle)))
}

fn linearization() -> Outcome {
    let mut worst: f64 = 0.0;
    for surface in [SurfaceSpec::Plate, SurfaceSpec::Cylinder { radius: 1.0 }, SurfaceSpec::Sphere { radius: 1.0 }, SurfaceSpec::Torus { major: 2.0, minor: 0.6 }] {
        let spec = ScenarioSpec::new(surface, DeformationSpec::Random { seed: 5, amplitude: 0.2 }, material());
        worst = worst.max(require(&run("linearization_fd", &spec)?, "")?);
    }
    at_most("relative FD gap", worst, 1e-5)?;
    Ok(format!("max relative gap {worst:.2e}"))
}

fn identities() -> Outcome {
    let mut parts = [0.0f64; 5];
    for (k, surface) in standard_surfaces().into_iter().enumerate() {
        let spec = ScenarioSpec::new(surface, DeformationSpec::Random { seed: 40 + k as u64, amplitude: 0.15 }, material());
        let r = run("identities", &spec)?;
        let vals = [
            require(&r, "block")?.max(require(&r, "curvature_split")?),
            require(&r, "E_inf_two_formulas")?,
            require(&r, "Acharya_relation")?,
            require(&r, "Koiter_direct_vs_Christoffel")?,
            require(&r, "Virga")?,
        ];
        for (p, v) in parts.iter_mut().zip(vals) {
            *p = p.max(v);
        }
    }
    at_most("block reconstruction", parts[0], 1e-9)?;
    at_most("E∞ two formulas", parts[1], 1e-8)?;
    at_most("bending relation", parts[2], 1e-8)?;
    at_most("Koiter direct vs Christoffel", parts[3], 1e-7)?;
    at_most("Virga = I·L²", parts[4], 1e-8)?;
    Ok(format!(
        "block {:.1e}, E∞ {:.1e}, relation {:.1e}, Christoffel {:.1e}, Virga {:.1e}",
        parts[0], parts[1], parts[2], parts[3], parts[4]
    ))
}

fn reconstruction() -> Outcome {
    let mut worst: f64 = 0.0;
    for (k, surface) in standard_surfaces().into_iter().enumerate() {
        let spec = ScenarioSpec::new(surface, DeformationSpec::Random { seed: 70 + k as u64, amplitude: 0.2 }, material());
        worst = worst.max(require(&run("reconstruction_symmetry", &spec)?, "E3D_symmetry")?);
    }
    at_most("‖E − Eᵀ‖", worst, 1e-9)?;
    Ok(format!("max skew {worst:.2e}"))
}

fn energy() -> Outcome {
    let mut vals = [0.0f64; 5];
    let mut pd = f64::INFINITY;
    let mut order4: f64 = 0.0;
    for surface in [SurfaceSpec::Plate, SurfaceSpec::Cylinder { radius: 1.0 }, SurfaceSpec::Sphere { radius: 1.0 }] {
        let spec = ScenarioSpec::new(surface, DeformationSpec::Random { seed: 9, amplitude: 0.1 }, material());
        let r = run("energy_properties", &spec)?;
        let row = [
            require(&r, "zero_at_reference")?,
            require(&r, "frame_invariance")?,
            require(&r, "polarization")?,
            require(&r, "quadrature_self_convergence")?,
            require(&r, "quadratic_limit")?,
        ];
        for (v, x) in vals.iter_mut().zip(row) {
            *v = v.max(x);
        }
        pd = pd.min(r.min_value("positive_definite").unwrap());
        order4 = order4.max(r.max_value("quadrature_order4_gap").unwrap());
    }
    at_most("energy at reference", vals[0], 1e-12)?;
    at_most("frame invariance", vals[1], 1e-10)?;
    at_most("polarization", vals[2], 1e-10)?;
    at_most("quadrature orders 5-8 vs 12", vals[3], 1e-9)?;
    at_most("ε² coefficient", vals[4], 1e-4)?;
    if pd <= 0.0 {
        return Err(format!("density not positive: min W/‖X‖² = {pd:.3e}"));
    }
    Ok(format!(
        "zero {:.0e}, invariance {:.1e}, polarization {:.1e}, quadrature {:.1e} (order 4: {order4:.1e}), ε² {:.1e}, min W/‖X‖² {pd:.3}",
        vals[0], vals[1], vals[2], vals[3], vals[4]
    ))
}

fn minimizer() -> Outcome {
    let z = Map3::zero();
    let y0 = SurfaceSpec::Cylinder { radius: 1.0 }.patch(None).unwrap();
    let (f, r) = minimize_displacement(&y0, &z, &z, &material(), [6, 6], Variant::LinearConstrained, &MinimizeOptions::default())
        .map_err(|e| e.to_string())?;
    if r.iterations != 0 || f.displacement.iter().any(|c| *c != Vec3::zeros()) {
        return Err("zero data did not return the zero field".into());
    }
    let plate = SurfaceSpec::Plate.patch(None).unwrap();
    let load = Map3::constant(Vec3::new(0.0, 0.0, 1.0));
    let t = Instant::now();
    let (_, r) = minimize_displacement(&plate, &load, &z, &material(), [8, 8], Variant::LinearConstrained, &MinimizeOptions::default())
        .map_err(|e| e.to_string())?;
    let secs = t.elapsed().as_secs_f64();
    at_most("gradient norm", r.grad_norm, 1e-6)?;
    if r.iterations > 5000 || secs > 10.0 {
        return Err(format!("{} iterations in {secs:.2} s", r.iterations));
    }
    if r.energy_trace.windows(2).any(|w| w[1] > w[0]) {
        return Err("energy trace increased".into());
    }
    Ok(format!("8x8 plate: {} iterations, |g| = {:.1e}, {secs:.2} s", r.iterations, r.grad_norm))
}

fn appendix() -> Outcome {
    let (mut normal, mut root) = (0.0f64, 0.0f64);
    for surface in [SurfaceSpec::Cylinder { radius: 1.0 }, SurfaceSpec::Sphere { radius: 1.0 }] {
        for epsilon in [0.3, -0.2] {
            let spec = ScenarioSpec::new(surface.clone(), DeformationSpec::RadialExpansion { epsilon }, material());
            let r = run("appendix_stretch", &spec)?;
            normal = normal.max(require(&r, "U·n0-n0")?);
            root = root.max(require(&r, "U-sqrt")?);
        }
    }
    at_most("‖U n₀ − n₀‖", normal, 1e-9)?;
    at_most("‖U − √(…)‖", root, 1e-8)?;
    Ok(format!("‖U n₀ − n₀‖ {normal:.1e}, ‖U − √(…)‖ {root:.1e}"))
}

fn mutation_sensitivity() -> Outcome {
    let mut caught = Vec::new();
    for fault in [Fault::FlipSecondForm, Fault::FlipWeingarten, Fault::FlipStretchRoot] {
        let _guard = inject(fault);
        let failing: Vec<usize> = [scaling_suite, stretch_separation, pure_flexure, variation_identities]
            .iter()
            .enumerate()
            .filter(|(_, c)| c().is_err())
            .map(|(k, _)| k + 2)
            .collect();
        if failing.is_empty() {
            return Err(format!("{fault:?} passes criteria 2-5"));
        }
        caught.push(format!("{fault:?} → {failing:?}"));
    }
    Ok(caught.join(", "))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("rigid vanishing", rigid_vanishing),
        ("scaling suite", scaling_suite),
        ("stretch/bending separation", stretch_separation),
        ("pure flexure", pure_flexure),
        ("variation identities", variation_identities),
        ("linearization consistency", linearization),
        ("block and equivalence identities", identities),
        ("3D reconstruction symmetry", reconstruction),
        ("energy properties", energy),
        ("minimizer sanity", minimizer),
        ("normal-preserving stretch", appendix),
        ("mutation sensitivity", mutation_sensitivity),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let (tag, detail) = match check() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {:>2} {tag} {name} ({:.2} s): {detail}", k + 1, t.elapsed().as_secs_f64());
    }
    println!("acceptance: {} of 12 passed in {:.1} s", 12 - failed, start.elapsed().as_secs_f64());
    if failed > 0 {
        std::process::exit(1);
    }
}
