//! The named property checks.

use std::ops::{Add, Mul, Sub};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::report::{Recorder, Tolerances};
use super::scenario::Scenario;
use crate::catalog::{normal_offset, random_displacement, DeformationSpec, RotationSpec, SurfaceSpec};
use crate::energy::{
    cosserat_energy, density_eval, koiter_energy, DensityKind, Kinematics, Quadrature,
};
use crate::error::{Error, Result};
use crate::field::{polynomial, Jet3, Map3, Monomial};
use crate::geometry::{frame_at, frame_from_jet, SurfaceFrame};
use crate::strain_linear::{
    constrained_linear_from, cosserat_linear_from, infinitesimal_rigid, koiter_linear_christoffel,
    koiter_linear_direct, variations_closed, variations_fd,
};
use crate::strain_nonlinear::bending::{
    acharya_from_frames, acharya_relation_residual, naghdi_constrained, virga_from_frame, virga_identity_residual,
};
use crate::strain_nonlinear::cosserat::block_residuals;
use crate::strain_nonlinear::reconstruction::reconstruct_3d_strain;
use crate::strain_nonlinear::{constrained_from_frames, cosserat_from_parts, koiter_from_frames, RotationField};
use crate::tensor::{axl_of_skew_part, exp_so3, flat, hat, spd_sqrt, sym3, sym_eigen, Mat3, Mat32, Vec3};

fn incompatible(check: &str, why: &str) -> Error {
    Error::IncompatibleScenario(format!("{check}: {why}"))
}

fn rel(a: f64, b: f64) -> f64 {
    a / (1.0 + b)
}

/// Richardson-extrapolated central difference in `η` at zero.
fn eta_derivative<T>(f: impl Fn(f64) -> Result<T>) -> Result<T>
where
    T: Copy + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T>,
{
    let [h0, h1] = crate::strain_linear::ETA_STEPS;
    let coarse = (f(h0)? - f(-h0)?) * (0.5 / h0);
    let fine = (f(h1)? - f(-h1)?) * (0.5 / h1);
    Ok(fine * (4.0 / 3.0) + coarse * (-1.0 / 3.0))
}

/// A fixed rotation-vector field for the Cosserat linearization.
fn probe_rotation() -> Map3 {
    polynomial(vec![
        Monomial { pow: [0, 0], coef: [0.1, -0.2, 0.15] },
        Monomial { pow: [1, 0], coef: [0.3, 0.1, -0.2] },
        Monomial { pow: [0, 1], coef: [-0.1, 0.25, 0.2] },
        Monomial { pow: [1, 1], coef: [0.05, -0.1, 0.1] },
    ])
}

/// `m − y₀` unless the scenario does not deform, in which case a fixed random cubic field.
fn probe_displacement(s: &Scenario) -> Map3 {
    match s.spec.deformation {
        DeformationSpec::Identity => random_displacement(7, 0.3),
        _ => s.displacement(),
    }
}

pub(crate) fn rigid_vanishing(s: &Scenario, tol: &Tolerances, rec: &mut Recorder) -> Result<()> {
    let DeformationSpec::Rigid { rotation, .. } = s.spec.deformation else {
        return Err(incompatible("rigid_vanishing", "needs a rigid deformation"));
    };
    let q = RotationField::constant(exp_so3(&Vec3::from(rotation)))?;
    let b = tol.get("rigid");
    for &x in &s.points {
        let f0 = frame_at(&s.y0, x)?;
        let mj = s.m.map.jet(x);
        let fm = frame_from_jet(x, &mj)?;
        let k = koiter_from_frames(&f0, &fm);
        let c = cosserat_from_parts(&f0, &mj, &q.at(x)?)?;
        let cs = constrained_from_frames(&f0, &fm)?;
        let a = acharya_from_frames(&f0, &fm)?;
        let n = naghdi_constrained(&f0, &fm, &mj);
        let entries = [
            ("G_Koiter", k.g.norm()),
            ("R_Koiter", k.r.norm()),
            ("E_ms", c.e_ms.norm()),
            ("K_es", c.k_es.norm()),
            ("E_inf", cs.e_inf.norm()),
            ("K_inf", cs.k_inf.norm()),
            ("R_inf_flat", cs.r_inf_flat.norm()),
            ("R_Acharya", a.r_tilde.norm()),
            ("Virga", (virga_from_frame(&fm) - virga_from_frame(&f0)).norm()),
            ("Naghdi_R", n.r.norm()),
            ("Naghdi_P", n.p.norm()),
        ];
        for (label, v) in entries {
            rec.at_most(label, Some(x), v, b);
        }
    }
    Ok(())
}

pub(crate) fn scaling_suite(s: &Scenario, tol: &Tolerances, rec: &mut Recorder) -> Result<()> {
    let b = tol.get("scaling");
    let frac = tol.get("witness_fraction");
    let mut flat_m = true;
    for &x in &s.points {
        let f0 = frame_at(&s.y0, x)?;
        let mj = s.m.map.jet(x);
        let fm = frame_from_jet(x, &mj)?;
        let cs = constrained_from_frames(&f0, &fm)?;
        let a = acharya_from_frames(&f0, &fm)?;
        let k = koiter_from_frames(&f0, &fm);
        for alpha in [0.5, 2.0] {
            let fa = frame_from_jet(x, &mj.scale(alpha))?;
            let csa = constrained_from_frames(&f0, &fa)?;
            let aa = acharya_from_frames(&f0, &fa)?;
            rec.at_most("R_inf_flat", Some(x), (csa.r_inf_flat - cs.r_inf_flat).norm(), b);
            rec.at_most("R_Acharya", Some(x), (aa.r_tilde - a.r_tilde * alpha).norm(), b);
            rec.at_most("Virga", Some(x), (virga_from_frame(&fa) - virga_from_frame(&fm)).norm(), b);
            // II scales with α while n is unchanged: the Koiter bending strain moves by (α − 1)·II_m.
            let hand = (alpha - 1.0).abs() * fm.second_form.norm();
            if fm.second_form.norm() > 1e-3 {
                flat_m = false;
                let moved = (koiter_from_frames(&f0, &fa).r - k.r).norm();
                rec.at_least("Koiter_witness", Some(x), moved, frac * hand);
            }
        }
    }
    if flat_m {
        rec.note("deformed surface is flat: the Koiter non-invariance witness is not applicable");
    }
    Ok(())
}

/// Derivative of the exact catalog expansion with respect to `ε`.
fn expansion_direction(surface: &SurfaceSpec, y0: &Map3) -> Map3 {
    match *surface {
        SurfaceSpec::Cylinder { radius } => {
            y0.affine(Mat3::from_diagonal(&Vec3::new(1.0 / radius, 1.0 / radius, 0.0)), Vec3::zeros())
        }
        SurfaceSpec::Sphere { radius } => y0.scaled(1.0 / radius),
        _ => normal_offset(y0, 1.0).minus(y0),
    }
}

pub(crate) fn pure_stretch_bending(s: &Scenario, tol: &Tolerances, rec: &mut Recorder) -> Result<()> {
    let DeformationSpec::RadialExpansion { epsilon } = s.spec.deformation else {
        return Err(incompatible("pure_stretch_bending", "needs a radial expansion"));
    };
    let radius = match s.spec.surface {
        SurfaceSpec::Cylinder { radius } | SurfaceSpec::Sphere { radius } => radius,
        _ => return Err(incompatible("pure_stretch_bending", "needs a cylinder or a sphere")),
    };
    let frac = tol.get("witness_fraction");
    let v = expansion_direction(&s.spec.surface, &s.y0.map);
    for &x in &s.points {
        let f0 = frame_at(&s.y0, x)?;
        let fm = frame_at(&s.m, x)?;
        let cs = constrained_from_frames(&f0, &fm)?;
        let a = acharya_from_frames(&f0, &fm)?;
        rec.at_most("R_inf_flat", Some(x), cs.r_inf_flat.norm(), tol.get("stretch_finite"));
        rec.at_most("R_Acharya", Some(x), a.r_tilde.norm(), tol.get("stretch_finite"));
        // The exact expansion multiplies II by 1 + ε/r.
        let hand = (epsilon / radius).abs() * f0.second_form.norm();
        rec.at_least("R_Koiter", Some(x), koiter_from_frames(&f0, &fm).r.norm(), frac * hand);

        let lc = constrained_linear_from(&f0, &v.jet(x));
        let b = tol.get("stretch_linear");
        rec.at_most("R_KSB_lin", Some(x), lc.r_ksb.norm(), b);
        rec.at_most("R_inf_lin", Some(x), lc.r_inf.norm(), b);
        // With v = n₀: R_K = −III and R_AL = III.
        let hand = f0.third_form.norm();
        rec.at_least("R_Koiter_lin", Some(x), lc.r_k.norm(), frac * hand);
        rec.at_least("R_AL_lin", Some(x), lc.r_al.norm(), frac * hand);
    }
    Ok(())
}

pub(crate) fn pure_flexure(s: &Scenario, tol: &Tolerances, rec: &mut Recorder) -> Result<()> {
    let (SurfaceSpec::Plate, DeformationSpec::IsometricRoll { rho }) = (&s.spec.surface, &s.spec.deformation) else {
        return Err(incompatible("pure_flexure", "needs an isometric roll of the plate"));
    };
    for &x in &s.points {
        let f0 = frame_at(&s.y0, x)?;
        let fm = frame_at(&s.m, x)?;
        let cs = constrained_from_frames(&f0, &fm)?;
        let k = koiter_from_frames(&f0, &fm);
        rec.at_most("R_inf_flat-flat(R_Koiter)", Some(x), (cs.r_inf_flat - flat(&k.r)).norm(), tol.get("flexure"));
        rec.at_least("R_Koiter", Some(x), k.r.norm(), tol.get("witness_fraction") / rho);
    }
    Ok(())
}

pub(crate) fn curvature_variation(s: &Scenario, tol: &Tolerances, rec: &mut Recorder) -> Result<()> {
    let b = tol.get("variation");
    let fields = [("scenario", probe_displacement(s)), ("cubic", random_displacement(31, 0.3))];
    for &x in &s.points {
        let f0 = frame_at(&s.y0, x)?;
        let j0 = s.y0.map.jet(x);
        for (name, v) in &fields {
            let vj = v.jet(x);
            let fd = variations_fd(&j0, &vj, x)?;
            let cf = variations_closed(&f0, &vj);
            let gaps = [
                ("dI", rel((fd.d_first - cf.d_first).norm(), cf.d_first.norm())),
                ("dII", rel((fd.d_second - cf.d_second).norm(), cf.d_second.norm())),
                ("dIII", rel((fd.d_third - cf.d_third).norm(), cf.d_third.norm())),
                ("dL", rel((fd.d_weingarten - cf.d_weingarten).norm(), cf.d_weingarten.norm())),
                ("dH", rel((fd.d_mean - cf.d_mean).abs(), cf.d_mean.abs())),
                ("dK", rel((fd.d_gauss - cf.d_gauss).abs(), cf.d_gauss.abs())),
            ];
            for (label, g) in gaps {
                rec.at_most(&format!("{label}/{name}"), Some(x), g, b);
            }
        }
        // Fields in the kernel of R_AL leave H and K unchanged to first order.
        let mut kernel = vec![infinitesimal_rigid(&s.y0.map, Vec3::new(0.3, -0.2, 0.5), Vec3::new(1.0, 0.0, -1.0))];
        if s.spec.surface == SurfaceSpec::Plate {
            kernel.push(polynomial(vec![
                Monomial { pow: [2, 1], coef: [1.0, 0.0, 0.0] },
                Monomial { pow: [1, 2], coef: [0.0, -0.5, 0.0] },
            ]));
        }
        for v in &kernel {
            let vj = v.jet(x);
            let lc = constrained_linear_from(&f0, &vj);
            rec.at_most("R_AL/kernel", Some(x), lc.r_al.norm(), tol.get("kernel"));
            let fd = variations_fd(&j0, &vj, x)?;
            rec.at_most("dH/kernel", Some(x), fd.d_mean.abs(), b);
            rec.at_most("dK/kernel", Some(x), fd.d_gauss.abs(), b);
        }
        // Normal offset: dH = ½ tr(L²).
        let n = expansion_direction(&s.spec.surface, &s.y0.map);
        if !s.spec.surface.is_flat() {
            let fd = variations_fd(&j0, &n.jet(x), x)?;
            let l = f0.weingarten;
            let hand = 0.5 * (l * l).trace();
            rec.at_most("dH/normal_offset", Some(x), rel((fd.d_mean - hand).abs(), hand.abs()), b);
        }
    }
    Ok(())
}

pub(crate) fn linearization_fd(s: &Scenario, tol: &Tolerances, rec: &mut Recorder) -> Result<()> {
    let b = tol.get("linearization");
    let v = probe_displacement(s);
    let th = probe_rotation();
    for &x in &s.points {
        let f0 = frame_at(&s.y0, x)?;
        let j0 = s.y0.map.jet(x);
        let vj = v.jet(x);
        let at = |eta: f64| -> Result<(Jet3, SurfaceFrame)> {
            let j = j0.add(&vj.scale(eta));
            let f = frame_from_jet(x, &j)?;
            Ok((j, f))
        };
        let (t0, dt) = th.first(x);
        let lin = cosserat_linear_from(&f0, &vj, &t0, &Mat32::from_columns(&dt));
        let cos = |eta: f64| {
            let (j, _) = at(eta)?;
            cosserat_from_parts(&f0, &j, &RotationField::exp_of(th.scaled(eta)).at(x)?)
        };
        let mut rec_rel = |label: &str, fd: f64, lin: f64| rec.at_most(label, Some(x), rel(fd, lin), b);
        let d = eta_derivative(|e| Ok(cos(e)?.g))?;
        rec_rel("G", (d - lin.g).norm(), lin.g.norm());
        let d = eta_derivative(|e| Ok(cos(e)?.t))?;
        rec_rel("T", (d - lin.t).norm(), lin.t.norm());
        let d = eta_derivative(|e| Ok(cos(e)?.r))?;
        rec_rel("R", (d - lin.r).norm(), lin.r.norm());
        let d = eta_derivative(|e| Ok(cos(e)?.n))?;
        rec_rel("N", (d - lin.n).norm(), lin.n.norm());
        let d = eta_derivative(|e| Ok(cos(e)?.k_es))?;
        rec_rel("K", (d - lin.k).norm(), lin.k.norm());
        let d = eta_derivative(|e| Ok(cos(e)?.e_ms))?;
        rec_rel("E", (d - lin.e).norm(), lin.e.norm());

        let lk = koiter_linear_direct(&f0, &vj);
        let d = eta_derivative(|e| Ok(koiter_from_frames(&f0, &at(e)?.1).g))?;
        rec_rel("G_Koiter", (d - lk.g).norm(), lk.g.norm());
        let d = eta_derivative(|e| Ok(koiter_from_frames(&f0, &at(e)?.1).r))?;
        rec_rel("R_Koiter", (d - lk.r).norm(), lk.r.norm());

        let lc = constrained_linear_from(&f0, &vj);
        let con = |e: f64| constrained_from_frames(&f0, &at(e)?.1);
        let d = eta_derivative(|e| Ok(con(e)?.r_inf))?;
        rec_rel("R_inf", (d - lc.r_inf).norm(), lc.r_inf.norm());
        let d = eta_derivative(|e| Ok(con(e)?.q_inf))?;
        rec_rel("theta_inf", (axl_of_skew_part(&d) - lc.theta_inf).norm(), lc.theta_inf.norm());
        let d = eta_derivative(|e| Ok(con(e)?.e_inf))?;
        rec_rel("E_inf", (d - lc.e_inf).norm(), lc.e_inf.norm());
        let d = eta_derivative(|e| Ok(con(e)?.k_inf))?;
        rec_rel("K_inf", (d - lc.k_inf).norm(), lc.k_inf.norm());
    }
    Ok(())
}

pub(crate) fn identities(s: &Scenario, tol: &Tolerances, rec: &mut Recorder) -> Result<()> {
    let v = probe_displacement(s);
    for &x in &s.points {
        let f0 = frame_at(&s.y0, x)?;
        let mj = s.m.map.jet(x);
        let fm = frame_from_jet(x, &mj)?;
        let c = cosserat_from_parts(&f0, &mj, &s.rotation.at(x)?)?;
        let br = block_residuals(&f0, &c);
        let b = tol.get("block");
        rec.at_most("block_E", Some(x), br.e_ms, b);
        rec.at_most("block_CK", Some(x), br.ck, b);
        rec.at_most("block_EB+CK", Some(x), br.eb_ck, b);
        rec.at_most("curvature_split", Some(x), br.curvature_split, b);

        let cs = constrained_from_frames(&f0, &fm)?;
        let b = tol.get("two_formula");
        rec.at_most("E_inf_two_formulas", Some(x), (cs.e_inf - cs.e_inf_roots).norm(), b);
        rec.at_most("R_inf_mixed_form", Some(x), (flat(&cs.r_inf) - cs.r_inf_flat).norm(), b);
        rec.at_most("T_inf", Some(x), cs.t_inf.norm(), b);
        let r = acharya_relation_residual(&f0, &fm, &cs.r_inf_flat)?;
        rec.at_most("Acharya_relation", Some(x), r.norm(), tol.get("acharya_relation"));
        rec.at_most("Virga=I·L²", Some(x), virga_identity_residual(&fm).norm(), tol.get("virga_identity"));

        let vj = v.jet(x);
        let d = koiter_linear_direct(&f0, &vj);
        let ch = koiter_linear_christoffel(&s.y0.map, &vj, x)?;
        let gap = rel((d.g - ch.g).norm(), d.g.norm()).max(rel((d.r - ch.r).norm(), d.r.norm()));
        rec.at_most("Koiter_direct_vs_Christoffel", Some(x), gap, tol.get("christoffel"));
    }
    Ok(())
}

pub(crate) fn reconstruction_symmetry(s: &Scenario, tol: &Tolerances, rec: &mut Recorder) -> Result<()> {
    let p = &s.spec.material;
    let mut raw_skew: f64 = 0.0;
    for &x in &s.points {
        let f0 = frame_at(&s.y0, x)?;
        let cs = constrained_from_frames(&f0, &frame_at(&s.m, x)?)?;
        for x3 in [-0.5 * p.h, 0.0, 0.5 * p.h] {
            let e = reconstruct_3d_strain(&cs, &f0, p.lambda, p.mu, x3, true)?;
            rec.at_most("E3D_symmetry", Some(x), (e - e.transpose()).norm(), tol.get("symmetry"));
            let raw = reconstruct_3d_strain(&cs, &f0, p.lambda, p.mu, x3, false)?;
            raw_skew = raw_skew.max((raw - raw.transpose()).norm());
        }
    }
    rec.report("E3D_unsymmetrized_skew", None, raw_skew);
    Ok(())
}

pub(crate) fn appendix_stretch(s: &Scenario, tol: &Tolerances, rec: &mut Recorder) -> Result<()> {
    let min_stretch = match (&s.spec.surface, &s.spec.deformation) {
        (_, DeformationSpec::Identity) => 1.0,
        (_, DeformationSpec::Scale { alpha }) => alpha.min(1.0),
        (SurfaceSpec::Cylinder { radius } | SurfaceSpec::Sphere { radius }, DeformationSpec::RadialExpansion { epsilon }) => {
            (1.0 + epsilon / radius).min(1.0)
        }
        _ => return Err(incompatible("appendix_stretch", "needs a normal-preserving deformation")),
    };
    for &x in &s.points {
        let f0 = frame_at(&s.y0, x)?;
        let fm = frame_at(&s.m, x)?;
        let cs = constrained_from_frames(&f0, &fm)?;
        let u = cs.stretch;
        let gti = f0.grad_theta_inv;
        let target = gti.transpose() * hat(&fm.first_form) * gti;
        rec.at_most("U·n0-n0", Some(x), (u * f0.n0 - f0.n0).norm(), tol.get("appendix_normal"));
        rec.at_most("U-sqrt", Some(x), (u - spd_sqrt(&target)?).norm(), tol.get("appendix_root"));
        rec.at_most("U²-target", Some(x), (u * u - target).norm(), tol.get("appendix_root"));
        rec.at_most("Q_inf-1", Some(x), (cs.q_inf - Mat3::identity()).norm(), tol.get("appendix_normal"));
        let smallest = sym_eigen(&sym3(&u)).0.min();
        rec.at_least("U_min_eigenvalue", Some(x), smallest, tol.get("witness_fraction") * min_stretch);
    }
    Ok(())
}

fn random_tensor(rng: &mut ChaCha8Rng) -> Mat3 {
    Mat3::from_fn(|_, _| rng.gen_range(-1.0..1.0))
}

pub(crate) fn energy_properties(s: &Scenario, tol: &Tolerances, rec: &mut Recorder) -> Result<()> {
    let p = s.spec.material;
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let kinds = [DensityKind::Wshell, DensityKind::Wmp, DensityKind::Wcurv, DensityKind::WshellInf, DensityKind::WmpInf];
    let mut worst = [f64::INFINITY; 5];
    let mut polar: f64 = 0.0;
    for _ in 0..1000 {
        let (x, y) = (random_tensor(&mut rng), random_tensor(&mut rng));
        for (k, kind) in kinds.iter().enumerate() {
            let w = density_eval(*kind, &x, None, &p)?;
            let scale = if matches!(kind, DensityKind::WshellInf | DensityKind::WmpInf) {
                sym3(&x).norm_squared()
            } else {
                x.norm_squared()
            };
            worst[k] = worst[k].min(w / scale);
        }
        for (bi, q) in [(DensityKind::WshellBilinear, DensityKind::Wshell), (DensityKind::WshellInfBilinear, DensityKind::WshellInf)] {
            let lhs = density_eval(bi, &x, Some(&y), &p)?;
            let rhs = 0.25 * (density_eval(q, &(x + y), None, &p)? - density_eval(q, &(x - y), None, &p)?);
            polar = polar.max((lhs - rhs).abs() / (1.0 + rhs.abs()));
        }
    }
    for (kind, w) in kinds.iter().zip(worst) {
        let c = p.coercivity(*kind);
        if c > 0.0 {
            rec.at_least(&format!("positive_definite/{kind:?}"), None, w, c * (1.0 - 1e-12));
        } else {
            rec.note(format!("{kind:?}: coercivity constant is zero for these moduli; positivity not asserted"));
            rec.report(&format!("positive_definite/{kind:?}"), None, w);
        }
    }
    rec.at_most("polarization", None, polar, tol.get("polarization"));

    let coarse = Quadrature::new([8, 8], 4)?;
    let id = RotationField::identity();
    let y0 = &s.y0;
    let zero = Map3::zero();
    let refs = [
        cosserat_energy(y0, Kinematics::Unconstrained { m: &y0.map, q: &id }, &p, &coarse)?,
        cosserat_energy(y0, Kinematics::ModifiedConstrained { m: &y0.map }, &p, &coarse)?,
        cosserat_energy(y0, Kinematics::Linear { v: &zero, theta: &zero }, &p, &coarse)?,
        cosserat_energy(y0, Kinematics::LinearConstrained { v: &zero }, &p, &coarse)?,
    ];
    let zero_max = refs.iter().map(|e| e.total.abs()).fold(koiter_energy(y0, &y0.map, &p, &coarse, false)?.abs(), f64::max);
    rec.at_most("zero_at_reference", None, zero_max, tol.get("energy_zero"));

    let m = &s.m.map;
    let kin = || Kinematics::Unconstrained { m, q: &s.rotation };
    let base = cosserat_energy(y0, kin(), &p, &coarse)?;
    let rhat = exp_so3(&Vec3::new(0.3, -0.5, 0.8));
    let rm = m.affine(rhat, Vec3::new(0.5, 1.0, -2.0));
    let rq = s.rotation.left_mul(rhat)?;
    let turned = cosserat_energy(y0, Kinematics::Unconstrained { m: &rm, q: &rq }, &p, &coarse)?;
    let gap = (turned.total - base.total).abs() / base.total.abs().max(f64::MIN_POSITIVE);
    rec.at_most("frame_invariance", None, gap.min(turned.max_relative_gap(&base)), tol.get("frame_invariance"));

    // Orders above 4 against the highest supported order; order 4 itself is reported.
    let reference = cosserat_energy(y0, kin(), &p, &Quadrature::with_order(crate::energy::quadrature::MAX_ORDER)?)?.total;
    let gap = |order: usize| -> Result<f64> {
        let e = cosserat_energy(y0, kin(), &p, &Quadrature::with_order(order)?)?.total;
        Ok((e - reference).abs() / reference.abs().max(f64::MIN_POSITIVE))
    };
    rec.report("quadrature_order4_gap", None, gap(4)?);
    for order in [5, 6, 8] {
        rec.at_most(&format!("quadrature_self_convergence/{order}"), None, gap(order)?, tol.get("quadrature"));
    }

    let v = probe_displacement(s);
    let th = probe_rotation();
    let eps = 1e-3;
    let lin = cosserat_energy(y0, Kinematics::Linear { v: &v, theta: &th }, &p, &coarse)?.total;
    let linc = cosserat_energy(y0, Kinematics::LinearConstrained { v: &v }, &p, &coarse)?.total;
    let mut nonlinear = [0.0; 2];
    for sgn in [1.0, -1.0] {
        let m = y0.map.plus_scaled(sgn * eps, &v);
        let q = RotationField::exp_of(th.scaled(sgn * eps));
        nonlinear[0] += cosserat_energy(y0, Kinematics::Unconstrained { m: &m, q: &q }, &p, &coarse)?.total;
        nonlinear[1] += cosserat_energy(y0, Kinematics::ModifiedConstrained { m: &m }, &p, &coarse)?.total;
    }
    let b = tol.get("quadratic_limit");
    let c = 1.0 / (2.0 * eps * eps);
    rec.at_most("quadratic_limit/unconstrained", None, (nonlinear[0] * c - lin).abs() / lin.abs(), b);
    rec.at_most("quadratic_limit/constrained", None, (nonlinear[1] * c - linc).abs() / linc.abs(), b);

    let minima = crate::energy::coefficient_minima(y0, p.h, &coarse)?;
    for (name, c) in crate::energy::EnergyBreakdown::NAMES.iter().zip(minima) {
        if c < 0.0 && *name != "coupling_H" {
            rec.note(format!("thickness weight of {name} is negative somewhere ({c:.3e}); h is large for this curvature"));
        }
    }
    Ok(())
}

pub(crate) fn drill_report(s: &Scenario, _tol: &Tolerances, rec: &mut Recorder) -> Result<()> {
    if !s.spec.surface.is_flat() || !matches!(s.spec.rotation, RotationSpec::Drill { .. }) {
        return Err(incompatible("drill_report", "needs a flat reference and a drill rotation"));
    }
    for &x in &s.points {
        let f0 = frame_at(&s.y0, x)?;
        let mj = s.m.map.jet(x);
        let fm = frame_from_jet(x, &mj)?;
        let c = cosserat_from_parts(&f0, &mj, &s.rotation.at(x)?)?;
        rec.report("|G|", Some(x), c.g.norm());
        rec.report("|R|", Some(x), c.r.norm());
        rec.report("|N|", Some(x), c.n.norm());
        rec.report("|R_Acharya|", Some(x), acharya_from_frames(&f0, &fm)?.r_tilde.norm());
    }
    rec.note("drill magnitudes are descriptive; no pass/fail criterion applies");
    Ok(())
}
