//! Cells of the model-comparison tables: tensors with their norms, and equality residuals.

use serde_json::{json, Value};

use shellstrain::catalog::SurfaceSpec;
use shellstrain::geometry::{frame_from_jet, SurfaceFrame};
use shellstrain::strain_linear::{
    constrained_linear_from, cosserat_linear_from, koiter_linear_direct, variations_fd, ETA_STEPS,
};
use shellstrain::strain_nonlinear::bending::{acharya_from_frames, acharya_relation_residual, naghdi_constrained};
use shellstrain::strain_nonlinear::{constrained_from_frames, cosserat_from_parts, koiter_from_frames, ConstrainedStrainSet};
use shellstrain::tensor::{adj2, flat, hat, spd_inv_sqrt, spd_sqrt, sym2, upper_block};
use shellstrain::verify::Scenario;
use shellstrain::{frame_at, Jet3, Mat2, Mat32, Row2, Vec2};

use crate::commands::linear_rotation;
use crate::render::mat;
use crate::Failure;

struct Table {
    id: &'static str,
    title: &'static str,
    cells: Vec<Value>,
    note: Option<&'static str>,
}

impl Table {
    fn new(id: &'static str, title: &'static str) -> Self {
        Table { id, title, cells: Vec::new(), note: None }
    }

    fn tensor<R: nalgebra::Dim, C: nalgebra::Dim, S: nalgebra::RawStorage<f64, R, C>>(
        &mut self,
        x: Vec2,
        name: &str,
        m: &nalgebra::Matrix<f64, R, C, S>,
    ) {
        let norm = (0..m.nrows()).flat_map(|i| (0..m.ncols()).map(move |j| (i, j))).map(|ij| m[ij] * m[ij]).sum::<f64>();
        self.cells.push(json!({
            "point": [x.x, x.y], "name": name, "kind": "tensor", "value": norm.sqrt(), "matrix": mat(m),
        }));
    }

    fn residual(&mut self, x: Vec2, name: &str, value: f64) {
        self.cells.push(json!({ "point": [x.x, x.y], "name": name, "kind": "residual", "value": value }));
    }

    fn into_value(self) -> Value {
        let mut v = json!({ "id": self.id, "title": self.title, "cells": self.cells });
        if let Some(n) = self.note {
            v["note"] = json!(n);
        }
        v
    }
}

/// Richardson central difference of `f(y₀ + ηv)` at `η = 0`.
fn eta_derivative<T>(f: impl Fn(f64) -> Result<T, Failure>) -> Result<T, Failure>
where
    T: std::ops::Add<Output = T> + std::ops::Sub<Output = T> + std::ops::Mul<f64, Output = T>,
{
    let [h0, h1] = ETA_STEPS;
    let coarse = (f(h0)? - f(-h0)?) * (0.5 / h0);
    let fine = (f(h1)? - f(-h1)?) * (0.5 / h1);
    Ok(fine * (4.0 / 3.0) + coarse * (-1.0 / 3.0))
}

fn constrained_along(f0: &SurfaceFrame, y0: &Jet3, v: &Jet3, x: Vec2, eta: f64) -> Result<ConstrainedStrainSet, Failure> {
    let f = frame_from_jet(x, &y0.add(&v.scale(eta)))?;
    Ok(constrained_from_frames(f0, &f)?)
}

pub fn tables(s: &Scenario) -> Result<Value, Failure> {
    let mut shell = Table::new("shell_models", "change of metric, bending and change of curvature across shell models");
    let mut plate = Table::new("plate_models", "the same measures on a flat Cartesian plate");
    let mut bending = Table::new("bending", "bending measures");
    let mut metric = Table::new("metric", "change of metric measures");
    let mut curvature = Table::new("curvature", "change of curvature measures");
    let mut shear = Table::new("transverse_shear", "transverse shear measures");
    let mut drilling = Table::new("drilling", "drilling bending measures");
    let is_plate = s.spec.surface == SurfaceSpec::Plate;
    if !is_plate {
        plate.note = Some("reference surface is not the Cartesian plate; no cells");
    }
    let v = s.displacement();
    let w = s.spec.rotation.rotation_vector(&s.y0.map)?;
    for &x in &s.points {
        let f0 = frame_at(&s.y0, x)?;
        let y0j = s.y0.map.jet(x);
        let mj = s.m.map.jet(x);
        let vj = v.jet(x);
        let fm = frame_from_jet(x, &mj)?;
        let l0 = f0.weingarten;

        let kl = koiter_linear_direct(&f0, &vj);
        let lc = constrained_linear_from(&f0, &vj);
        let (th, dth) = linear_rotation(s, &w, x)?;
        let lcos = cosserat_linear_from(&f0, &vj, &th, &dth);
        let k = koiter_from_frames(&f0, &fm);
        let cs = constrained_from_frames(&f0, &fm)?;
        let c = cosserat_from_parts(&f0, &mj, &s.rotation.at(x)?)?;
        let nag = naghdi_constrained(&f0, &fm, &mj);
        let acharya = acharya_from_frames(&f0, &fm)?;
        let n_inf_lin: Row2 = f0.n0.transpose() * lc.grad_theta_inf;

        let d_r_inf = eta_derivative(|e| Ok(constrained_along(&f0, &y0j, &vj, x, e)?.r_inf))?;
        let d_g_inf = eta_derivative(|e| Ok(constrained_along(&f0, &y0j, &vj, x, e)?.g_inf))?;
        let d_n_inf = eta_derivative(|e| Ok(constrained_along(&f0, &y0j, &vj, x, e)?.n_inf))?;
        let d_g_koiter = eta_derivative(|e| {
            let f = frame_from_jet(x, &y0j.add(&vj.scale(e)))?;
            Ok(koiter_from_frames(&f0, &f).g)
        })?;

        for (name, m) in [
            ("G_Koiter_lin", &kl.g),
            ("R_Koiter_lin", &kl.r),
            ("R_KSB", &lc.r_ksb),
            ("R_AL", &lc.r_al),
            ("R_inf_lin", &lc.r_inf),
            ("G_lin", &lcos.g),
            ("R_lin", &lcos.r),
            ("G_Koiter", &k.g),
            ("R_Koiter", &k.r),
            ("G_inf", &cs.g_inf),
            ("R_Naghdi", &nag.r),
            ("G", &c.g),
            ("R", &c.r),
        ] {
            shell.tensor(x, name, m);
        }
        shell.tensor(x, "R_inf_flat", &cs.r_inf_flat);
        shell.tensor(x, "T_lin", &lcos.t);
        shell.tensor(x, "N_lin", &lcos.n);
        shell.tensor(x, "T_Naghdi", &nag.t);
        shell.tensor(x, "T", &c.t);
        shell.tensor(x, "N", &c.n);
        shell.residual(x, "sym(G_lin) - G_Koiter_lin", (sym2(&lcos.g) - kl.g).norm());
        shell.residual(x, "R_KSB - sym(R_inf_lin)", (lc.r_ksb - sym2(&lc.r_inf)).norm());
        shell.residual(x, "R_inf_lin - d/deta R_inf", (lc.r_inf - d_r_inf).norm());
        shell.residual(x, "G_Koiter_lin - d/deta G_Koiter", (kl.g - d_g_koiter).norm());

        if is_plate {
            let root = upper_block(&spd_sqrt(&hat(&fm.first_form))?);
            let inv_root = upper_block(&spd_inv_sqrt(&hat(&fm.first_form))?);
            let t_hand = Row2::new(vj.d[0].z + th.y, vj.d[1].z - th.x);
            // ½∇ curl(v₁, v₂) with curl = ∂₁v₂ − ∂₂v₁.
            let curl_grad = Row2::new(
                0.5 * (vj.dd[0][0].y - vj.dd[0][1].x),
                0.5 * (vj.dd[1][0].y - vj.dd[1][1].x),
            );
            plate.tensor(x, "G_lin", &lcos.g);
            plate.tensor(x, "R_lin", &lcos.r);
            plate.tensor(x, "T_lin", &lcos.t);
            plate.tensor(x, "N_lin", &lcos.n);
            plate.tensor(x, "G_inf", &cs.g_inf);
            plate.tensor(x, "R_inf", &cs.r_inf);
            plate.residual(x, "R_inf_lin - R_Koiter_lin", (lc.r_inf - kl.r).norm());
            plate.residual(x, "R_AL - R_Koiter_lin", (lc.r_al - kl.r).norm());
            plate.residual(x, "G_inf - (sqrt(I_m) - 1)", (cs.g_inf - (root - Mat2::identity())).norm());
            plate.residual(x, "R_inf - sqrt(I_m)^-1 II_m", (cs.r_inf - inv_root * fm.second_form).norm());
            plate.residual(x, "T_lin - (d1 v3 + theta2, d2 v3 - theta1)", (lcos.t - t_hand).norm());
            plate.residual(x, "N_inf_lin - grad(curl(v1, v2))/2", (n_inf_lin - curl_grad).norm());
        }

        let n_cross = Mat32::from_columns(&[f0.n0.cross(&dth.column(0)), f0.n0.cross(&dth.column(1))]);
        bending.tensor(x, "R", &c.r);
        bending.tensor(x, "R_lin", &lcos.r);
        bending.tensor(x, "R_inf_flat", &cs.r_inf_flat);
        bending.tensor(x, "R_Acharya", &acharya.r_tilde);
        bending.tensor(x, "R_KSB", &lc.r_ksb);
        bending.tensor(x, "R_Koiter_lin_flat", &flat(&kl.r));
        bending.residual(x, "R_lin - (grad y0)^T (n0 x grad theta)", (lcos.r - f0.grad_y.transpose() * n_cross).norm());
        bending.residual(
            x,
            "R_Acharya + sqrt(U^2) push(R_inf_flat)",
            acharya_relation_residual(&f0, &fm, &cs.r_inf_flat)?.norm(),
        );
        bending.residual(x, "R_KSB - sym(R_inf_lin)", (lc.r_ksb - sym2(&lc.r_inf)).norm());

        metric.tensor(x, "G", &c.g);
        metric.tensor(x, "G_lin", &lcos.g);
        metric.tensor(x, "G_inf", &cs.g_inf);
        metric.tensor(x, "E_inf", &cs.e_inf);
        metric.tensor(x, "G_Koiter", &k.g);
        metric.tensor(x, "G_Koiter_lin", &kl.g);
        metric.residual(x, "sym(G_lin) - G_Koiter_lin", (sym2(&lcos.g) - kl.g).norm());
        metric.residual(x, "d/deta G_inf - G_Koiter_lin", (d_g_inf - kl.g).norm());
        metric.residual(x, "E_inf - E_inf(square roots)", (cs.e_inf - cs.e_inf_roots).norm());

        let fd = variations_fd(&y0j, &vj, x)?;
        let i_inv = f0.first_form_inv();
        curvature.tensor(x, "R - G L", &c.c);
        curvature.tensor(x, "R_lin - G_lin L", &(lcos.r - lcos.g * l0));
        curvature.tensor(x, "-push(sym(R_inf - G_inf L))", &cs.sym_eb_ck);
        curvature.tensor(x, "R_AL", &lc.r_al);
        curvature.tensor(x, "R_Naghdi", &nag.r);
        curvature.residual(x, "dH - tr(I^-1 R_AL)/2", (fd.d_mean - 0.5 * (i_inv * lc.r_al).trace()).abs());
        curvature.residual(x, "dK - tr(adj(L) I^-1 R_AL)", (fd.d_gauss - (adj2(&l0) * i_inv * lc.r_al).trace()).abs());

        shear.tensor(x, "T", &c.t);
        shear.tensor(x, "T_lin", &lcos.t);
        shear.tensor(x, "T_inf", &cs.t_inf);
        shear.tensor(x, "T_Naghdi", &nag.t);
        shear.residual(x, "T_inf", cs.t_inf.norm());
        shear.residual(x, "T_Naghdi with d = n_m", nag.t.norm());

        drilling.tensor(x, "N", &c.n);
        drilling.tensor(x, "N_lin", &lcos.n);
        drilling.tensor(x, "N_inf", &cs.n_inf);
        drilling.tensor(x, "N_inf_lin", &n_inf_lin);
        drilling.residual(x, "N_inf_lin - d/deta N_inf", (n_inf_lin - d_n_inf).norm());
    }
    let tables = [shell, plate, bending, metric, curvature, shear, drilling].map(Table::into_value);
    Ok(json!({ "scenario": s.id, "tables": tables }))
}
