//! The evaluation commands. Each returns a JSON document.

use serde_json::{json, Map, Value};

use shellstrain::energy::{
    coefficient_minima, cosserat_energy, koiter_energy, minimize_displacement, EnergyBreakdown, Kinematics,
    MinimizeOptions, Quadrature, Variant,
};
use shellstrain::geometry::frame_from_jet;
use shellstrain::strain_linear::{constrained_linear_from, cosserat_linear_from, koiter_linear_direct};
use shellstrain::strain_nonlinear::bending::{acharya_from_frames, naghdi_constrained, virga_from_frame};
use shellstrain::strain_nonlinear::{constrained_from_frames, cosserat_from_parts, koiter_from_frames};
use shellstrain::verify::Scenario;
use shellstrain::{frame_at, Map3, Mat32, Vec2, Vec3};

use crate::render::{mat, Tensors};
use crate::Failure;

fn pt(x: Vec2) -> [f64; 2] {
    [x.x, x.y]
}

fn model<'a>(given: &'a Option<String>, default: &'a str, allowed: &[&str]) -> Result<&'a str, Failure> {
    let m = given.as_deref().unwrap_or(default);
    if allowed.contains(&m) {
        Ok(m)
    } else {
        Err(Failure::Usage(format!("unknown model {m:?} (expected one of {})", allowed.join(", "))))
    }
}

/// Infinitesimal rotation `ϑ` and `∇ϑ` at `x`: the scenario's own rotation vector, else the constrained one.
pub(crate) fn linear_rotation(s: &Scenario, w: &Option<Map3>, x: Vec2) -> Result<(Vec3, Mat32), Failure> {
    Ok(match w {
        Some(w) => {
            let (t, d) = w.first(x);
            (t, Mat32::from_columns(&d))
        }
        None => {
            let lc = constrained_linear_from(&frame_at(&s.y0, x)?, &s.displacement().jet(x));
            (lc.theta_inf, lc.grad_theta_inf)
        }
    })
}

fn theta_map(s: &Scenario) -> Result<Map3, Failure> {
    if let Some(w) = s.spec.rotation.rotation_vector(&s.y0.map)? {
        return Ok(w);
    }
    let (y0, v) = (s.y0.clone(), s.displacement());
    Ok(Map3::first_order(move |x| match frame_at(&y0, x) {
        Ok(f) => {
            let lc = constrained_linear_from(&f, &v.jet(x));
            (lc.theta_inf, [0, 1].map(|a| lc.grad_theta_inf.column(a).into_owned()))
        }
        Err(_) => (Vec3::repeat(f64::NAN), [Vec3::repeat(f64::NAN); 2]),
    }))
}

pub fn frame(s: &Scenario, model_flag: &Option<String>) -> Result<Value, Failure> {
    let which = model(model_flag, "reference", &["reference", "deformed"])?;
    let patch = if which == "reference" { &s.y0 } else { &s.m };
    let mut points = Vec::new();
    for &x in &s.points {
        let f = frame_at(patch, x)?;
        let gamma: Vec<Value> = f.gamma.iter().map(|g| json!(g)).collect();
        points.push(json!({
            "point": pt(x),
            "y": [f.point.x, f.point.y, f.point.z],
            "n": [f.n0.x, f.n0.y, f.n0.z],
            "I": mat(&f.first_form),
            "II": mat(&f.second_form),
            "III": mat(&f.third_form),
            "L": mat(&f.weingarten),
            "H": f.mean_curv,
            "K": f.gauss_curv,
            "grad_theta": mat(&f.grad_theta),
            "det_grad_theta": f.det_grad_theta,
            "christoffel": gamma,
        }));
    }
    Ok(json!({ "scenario": s.id, "surface": which, "points": points }))
}

pub const STRAIN_MODELS: [&str; 8] =
    ["koiter", "cosserat", "constrained", "naghdi", "linear-koiter", "linear-cosserat", "linear-constrained", "linear"];

pub fn strains(s: &Scenario, model_flag: &Option<String>) -> Result<Value, Failure> {
    let which = model(model_flag, "constrained", &STRAIN_MODELS)?;
    let v = s.displacement();
    let w = s.spec.rotation.rotation_vector(&s.y0.map)?;
    let mut points = Vec::new();
    for &x in &s.points {
        let f0 = frame_at(&s.y0, x)?;
        let mj = s.m.map.jet(x);
        let vj = v.jet(x);
        let mut t = Tensors::default();
        match which {
            "koiter" => {
                let k = koiter_from_frames(&f0, &frame_from_jet(x, &mj)?);
                t.put("G", &k.g);
                t.put("R", &k.r);
            }
            "cosserat" => {
                let c = cosserat_from_parts(&f0, &mj, &s.rotation.at(x)?)?;
                t.put("E_ms", &c.e_ms);
                t.put("K_es", &c.k_es);
                t.put("G", &c.g);
                t.put("T", &c.t);
                t.put("R", &c.r);
                t.put("R-GL", &c.c);
                t.put("N", &c.n);
                t.put("CK", &c.ck);
                t.put("EB+CK", &c.eb_ck);
            }
            "constrained" => {
                let fm = frame_from_jet(x, &mj)?;
                let cs = constrained_from_frames(&f0, &fm)?;
                t.put("Q_inf", &cs.q_inf);
                t.put("U", &cs.stretch);
                t.put("E_inf", &cs.e_inf);
                t.put("K_inf", &cs.k_inf);
                t.put("G_inf", &cs.g_inf);
                t.put("T_inf", &cs.t_inf);
                t.put("R_inf", &cs.r_inf);
                t.put("R_inf_flat", &cs.r_inf_flat);
                t.put("N_inf", &cs.n_inf);
                t.put("EB+CK", &cs.eb_ck);
                t.put("R_Acharya", &acharya_from_frames(&f0, &fm)?.r_tilde);
                t.put("Virga", &(virga_from_frame(&fm) - virga_from_frame(&f0)));
                // Linearized measures of the displacement m − y₀.
                let lc = constrained_linear_from(&f0, &vj);
                t.put("R_KSB", &lc.r_ksb);
                t.put("R_AL", &lc.r_al);
                t.put("R_inf_lin", &lc.r_inf);
            }
            "naghdi" => {
                let n = naghdi_constrained(&f0, &frame_from_jet(x, &mj)?, &mj);
                t.put("R", &n.r);
                t.put("T", &n.t);
                t.put("P", &n.p);
            }
            "linear-koiter" => {
                let k = koiter_linear_direct(&f0, &vj);
                t.put("G_lin", &k.g);
                t.put("R_lin", &k.r);
            }
            "linear-cosserat" => {
                let (th, dth) = linear_rotation(s, &w, x)?;
                let c = cosserat_linear_from(&f0, &vj, &th, &dth);
                t.put("theta", &th);
                t.put("G_lin", &c.g);
                t.put("T_lin", &c.t);
                t.put("R_lin", &c.r);
                t.put("N_lin", &c.n);
                t.put("E_lin", &c.e);
                t.put("K_lin", &c.k);
            }
            _ => {
                let lc = constrained_linear_from(&f0, &vj);
                t.put("G_Koiter_lin", &lc.g_k);
                t.put("R_Koiter_lin", &lc.r_k);
                t.put("theta_inf", &lc.theta_inf);
                t.put("grad_theta_inf", &lc.grad_theta_inf);
                t.put("E_inf_lin", &lc.e_inf);
                t.put("K_inf_lin", &lc.k_inf);
                t.put("R_inf_lin", &lc.r_inf);
                t.put("R_KSB", &lc.r_ksb);
                t.put("R_AL", &lc.r_al);
                t.put("N_inf_lin", &(f0.n0.transpose() * lc.grad_theta_inf));
            }
        }
        points.push(t.into_value(pt(x)));
    }
    let which = if which == "linear" { "linear-constrained" } else { which };
    Ok(json!({ "scenario": s.id, "model": which, "points": points }))
}

pub fn energy(
    s: &Scenario,
    model_flag: &Option<String>,
    grid: Option<[usize; 2]>,
    quad_order: Option<usize>,
) -> Result<Value, Failure> {
    let which = model(
        model_flag,
        "unconstrained",
        &["unconstrained", "modified-constrained", "linear", "linear-constrained", "koiter", "koiter-linear"],
    )?;
    let quad = Quadrature::new(grid.unwrap_or(Quadrature::default().cells), quad_order.unwrap_or(4))?;
    let p = &s.spec.material;
    let v = s.displacement();
    let mut out = Map::new();
    out.insert("scenario".into(), json!(s.id));
    out.insert("model".into(), json!(which));
    out.insert("material".into(), serde_json::to_value(p).expect("material serializes"));
    out.insert("quadrature".into(), json!({ "cells": quad.cells, "order": quad.order }));
    match which {
        "koiter" | "koiter-linear" => {
            let linear = which == "koiter-linear";
            let arg = if linear { &v } else { &s.m.map };
            out.insert("total".into(), json!(koiter_energy(&s.y0, arg, p, &quad, linear)?));
        }
        _ => {
            let theta = theta_map(s)?;
            let kin = match which {
                "unconstrained" => Kinematics::Unconstrained { m: &s.m.map, q: &s.rotation },
                "modified-constrained" => Kinematics::ModifiedConstrained { m: &s.m.map },
                "linear" => Kinematics::Linear { v: &v, theta: &theta },
                _ => Kinematics::LinearConstrained { v: &v },
            };
            let e = cosserat_energy(&s.y0, kin, p, &quad)?;
            out.insert("breakdown".into(), serde_json::to_value(e).expect("breakdown serializes"));
            let minima = coefficient_minima(&s.y0, p.h, &quad)?;
            let named: Map<String, Value> =
                EnergyBreakdown::NAMES.iter().zip(minima).map(|(k, c)| (k.to_string(), json!(c))).collect();
            out.insert("coefficient_minima".into(), Value::Object(named));
        }
    }
    Ok(Value::Object(out))
}

pub fn minimize(
    s: &Scenario,
    model_flag: &Option<String>,
    grid: Option<[usize; 2]>,
    quad_order: Option<usize>,
) -> Result<Value, Failure> {
    let which = model(model_flag, "linear-constrained", &["linear", "linear-constrained"])?;
    let variant = if which == "linear" { Variant::Linear } else { Variant::LinearConstrained };
    let grid = grid.unwrap_or([8, 8]);
    let options = MinimizeOptions { quad_order: quad_order.unwrap_or(4), ..Default::default() };
    let load = Map3::constant(s.spec.load.unwrap_or_else(Vec3::zeros));
    let (field, report) = minimize_displacement(&s.y0, &load, &s.displacement(), &s.spec.material, grid, variant, &options)?;
    let samples: Vec<Value> = s
        .points
        .iter()
        .map(|&x| {
            let u = field.displacement_jet(x).val;
            let mut o = json!({ "point": pt(x), "displacement": [u.x, u.y, u.z] });
            if let Some(r) = field.rotation_jet(x) {
                o["rotation"] = json!([r.val.x, r.val.y, r.val.z]);
            }
            o
        })
        .collect();
    Ok(json!({
        "scenario": s.id,
        "model": which,
        "grid": grid,
        "report": serde_json::to_value(&report).expect("report serializes"),
        "samples": samples,
    }))
}
