//! Linearized strain measures at the reference midsurface and the first variations of
//! the fundamental forms along `η ↦ y₀ + ηv`.

use crate::error::{Error, Result};
use crate::field::{fd_step_gradient, Jet3, Map3, SurfacePatch};
use crate::geometry::{frame_at, frame_from_jet, push_flat, SurfaceFrame};
use crate::strain_nonlinear::cosserat::columns_pulled;
use crate::tensor::{
    adj2, anti, axl_of_skew_part, skew2, skew3, sym2, vec_cross_mat, Mat2, Mat3, Mat32, Row2, Vec2, Vec3,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KoiterForm {
    /// `sym((∇y₀)ᵀ∇v)` and `⟨n₀, ∂_αβ v − Γ^γ_αβ ∂_γ v⟩`.
    Direct,
    /// Covariant components with Christoffel symbols and the mixed curvature tensor.
    Christoffel,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearKoiter {
    pub g: Mat2,
    pub r: Mat2,
}

pub fn koiter_linear_direct(f0: &SurfaceFrame, v: &Jet3) -> LinearKoiter {
    let g = sym2(&(f0.grad_y.transpose() * v.grad()));
    let mut r = Mat2::zeros();
    for a in 0..2 {
        for b in 0..2 {
            let mut w = v.dd[a][b];
            for c in 0..2 {
                w -= v.d[c] * f0.gamma[c][a][b];
            }
            r[(a, b)] = f0.n0.dot(&w);
        }
    }
    LinearKoiter { g, r: sym2(&r) }
}

/// Frames at `x ± h e_β` for differencing frame quantities.
fn neighbour_frames(y0: &Map3, x: Vec2) -> Result<(f64, [[SurfaceFrame; 2]; 2])> {
    let h = fd_step_gradient(&x);
    let at = |y: Vec2| frame_from_jet(y, &y0.jet(y));
    Ok((
        h,
        [
            [at(x + Vec2::x() * h)?, at(x - Vec2::x() * h)?],
            [at(x + Vec2::y() * h)?, at(x - Vec2::y() * h)?],
        ],
    ))
}

pub fn koiter_linear_christoffel(y0: &Map3, v: &Jet3, x: Vec2) -> Result<LinearKoiter> {
    let f0 = frame_from_jet(x, &y0.jet(x))?;
    let (h, nb) = neighbour_frames(y0, x)?;
    let gam = &f0.gamma;
    let b = f0.second_form;
    let mixed = f0.weingarten; // mixed[(σ, α)] = b^σ_α
    let d_mixed = [0, 1].map(|a| (nb[a][0].weingarten - nb[a][1].weingarten) / (2.0 * h));
    let d_n = [0, 1].map(|a| f0.grad_n.column(a).into_owned());
    // dd_n[a][b] = ∂_a∂_b n₀
    let dd_n = [0, 1].map(|a| {
        [0, 1].map(|bb| (nb[bb][0].grad_n.column(a) - nb[bb][1].grad_n.column(a)) / (2.0 * h))
    });

    let vc = [v.val.dot(&f0.a_co[0]), v.val.dot(&f0.a_co[1])];
    let v3 = v.val.dot(&f0.n0);
    // dv[β][α] = ∂_β v_α
    let dv = [0, 1].map(|beta| [0, 1].map(|alpha| v.d[beta].dot(&f0.a_co[alpha]) + v.val.dot(&f0.hess[alpha][beta])));
    let dv3 = [0, 1].map(|s| v.d[s].dot(&f0.n0) + v.val.dot(&d_n[s]));
    let ddv3 = |a: usize, bb: usize| {
        v.dd[a][bb].dot(&f0.n0) + v.d[a].dot(&d_n[bb]) + v.d[bb].dot(&d_n[a]) + v.val.dot(&dd_n[a][bb])
    };
    // Covariant derivative v_α|β.
    let cov = |alpha: usize, beta: usize| {
        dv[beta][alpha] - (0..2).map(|s| gam[s][alpha][beta] * vc[s]).sum::<f64>()
    };

    let mut g = Mat2::zeros();
    let mut r = Mat2::zeros();
    for a in 0..2 {
        for bb in 0..2 {
            g[(a, bb)] = 0.5 * (cov(a, bb) + cov(bb, a)) - b[(a, bb)] * v3;
            let mut rho = ddv3(a, bb);
            for s in 0..2 {
                rho -= gam[s][a][bb] * dv3[s];
                rho -= mixed[(s, a)] * b[(s, bb)] * v3;
                rho += mixed[(s, a)] * cov(s, bb);
                rho += mixed[(s, bb)] * cov(s, a);
                // b^s_β|α
                let mut cd = d_mixed[a][(s, bb)];
                for t in 0..2 {
                    cd += gam[s][a][t] * mixed[(t, bb)] - gam[t][a][bb] * mixed[(s, t)];
                }
                rho += cd * vc[s];
            }
            r[(a, bb)] = rho;
        }
    }
    Ok(LinearKoiter { g, r: sym2(&r) })
}

pub fn koiter_linear(y0: &SurfacePatch, v: &Map3, x: Vec2, form: KoiterForm) -> Result<LinearKoiter> {
    let f0 = frame_at(y0, x)?;
    let vj = v.jet(x);
    match form {
        KoiterForm::Direct => Ok(koiter_linear_direct(&f0, &vj)),
        KoiterForm::Christoffel => koiter_linear_christoffel(&y0.map, &vj, x),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearCosserat {
    pub g: Mat2,
    pub t: Row2,
    pub r: Mat2,
    pub n: Row2,
    /// `(∇v − ϑ×∇y₀ | 0)[∇Θ]⁻¹`.
    pub e: Mat3,
    /// `(∇ϑ | 0)[∇Θ]⁻¹`.
    pub k: Mat3,
}

pub fn cosserat_linear_from(f0: &SurfaceFrame, v: &Jet3, theta: &Vec3, grad_theta: &Mat32) -> LinearCosserat {
    let gy = f0.grad_y;
    let gv = v.grad();
    let tx = vec_cross_mat(theta, &gy);
    let g = gy.transpose() * gv + tx.transpose() * gy;
    let t = f0.n0.transpose() * gv + theta.cross(&f0.n0).transpose() * gy;
    let r = -(vec_cross_mat(&f0.n0, &gy).transpose() * grad_theta);
    let n = f0.n0.transpose() * grad_theta;
    let diff = gv - tx;
    let e = Mat3::from_columns(&[diff.column(0).into_owned(), diff.column(1).into_owned(), Vec3::zeros()])
        * f0.grad_theta_inv;
    let k = columns_pulled(f0, &[grad_theta.column(0).into_owned(), grad_theta.column(1).into_owned()]);
    LinearCosserat { g, t, r, n, e, k }
}

/// `(∇y₀)ᵀ∇v + ⟨ϑ, n₀⟩√(det I)·[[0,1],[−1,0]]`.
pub fn cosserat_linear_g_alternative(f0: &SurfaceFrame, v: &Jet3, theta: &Vec3) -> Mat2 {
    f0.grad_y.transpose() * v.grad()
        + Mat2::new(0.0, 1.0, -1.0, 0.0) * (theta.dot(&f0.n0) * f0.sqrt_det_first_form())
}

pub fn cosserat_linear(y0: &SurfacePatch, v: &Map3, theta: &Map3, x: Vec2) -> Result<LinearCosserat> {
    let f0 = frame_at(y0, x)?;
    let (t, dt) = theta.first(x);
    Ok(cosserat_linear_from(&f0, &v.jet(x), &t, &Mat32::from_columns(&dt)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearConstrained {
    pub g_k: Mat2,
    pub r_k: Mat2,
    pub theta_inf: Vec3,
    pub grad_theta_inf: Mat32,
    pub e_inf: Mat3,
    pub k_inf: Mat3,
    /// `R_K − G_K·L`.
    pub r_inf: Mat2,
    /// `R_K − sym(G_K·L)`.
    pub r_ksb: Mat2,
    /// `R_K − 2·sym(G_K·L)`.
    pub r_al: Mat2,
    /// `C_y₀ K∞`.
    pub ck: Mat3,
    /// `E∞B_y₀ + C_y₀K∞`.
    pub eb_ck: Mat3,
}

/// `(∇v | δn)[∇Θ]⁻¹` with `δn = −Σ⟨n₀, ∂_α v⟩a^α`, and its partial derivatives.
fn linearized_reconstruction(f0: &SurfaceFrame, v: &Jet3) -> (Mat3, [Mat3; 2]) {
    let gti = f0.grad_theta_inv;
    let slope = [0, 1].map(|a| f0.n0.dot(&v.d[a]));
    let dn = -(f0.a_contra[0] * slope[0] + f0.a_contra[1] * slope[1]);
    let base = Mat3::from_columns(&[v.d[0], v.d[1], dn]);
    let h = base * gti;
    let dh = [0, 1].map(|b| {
        let d_slope = [0, 1].map(|a| f0.grad_n.column(b).dot(&v.d[a]) + f0.n0.dot(&v.dd[a][b]));
        let d_contra = [0, 1].map(|a| f0.d_grad_theta_inv[b].row(a).transpose());
        let d_dn = -(f0.a_contra[0] * d_slope[0] + f0.a_contra[1] * d_slope[1] + d_contra[0] * slope[0]
            + d_contra[1] * slope[1]);
        Mat3::from_columns(&[v.dd[0][b], v.dd[1][b], d_dn]) * gti + base * f0.d_grad_theta_inv[b]
    });
    (h, dh)
}

pub fn constrained_linear_from(f0: &SurfaceFrame, v: &Jet3) -> LinearConstrained {
    let LinearKoiter { g: g_k, r: r_k } = koiter_linear_direct(f0, v);
    let (h, dh) = linearized_reconstruction(f0, v);
    let theta_inf = axl_of_skew_part(&h);
    let d = dh.map(|d| axl_of_skew_part(&d));
    let grad_theta_inf = Mat32::from_columns(&d);
    let gl = g_k * f0.weingarten;
    let e_inf = push_flat(f0, &g_k);
    let k_inf = columns_pulled(f0, &d);
    let ck = f0.c_tensor * k_inf;
    LinearConstrained {
        g_k,
        r_k,
        theta_inf,
        grad_theta_inf,
        e_inf,
        k_inf,
        r_inf: r_k - gl,
        r_ksb: r_k - sym2(&gl),
        r_al: r_k - sym2(&gl) * 2.0,
        ck,
        eb_ck: e_inf * f0.b_tensor + ck,
    }
}

/// `−½tr(skew((∇y₀)ᵀ∇v)·C⁻¹)·n₀ + Σ⟨n₀, ∂_α v⟩ a^α×n₀` with `C = √(det I)·[[0,1],[−1,0]]`.
pub fn theta_inf_closed_form(f0: &SurfaceFrame, v: &Jet3) -> Result<Vec3> {
    let s = f0.sqrt_det_first_form();
    if s < 1e-12 {
        return Err(Error::Degenerate(format!("√det I = {s:.3e}")));
    }
    let c_inv = Mat2::new(0.0, -1.0, 1.0, 0.0) / s;
    let w = skew2(&(f0.grad_y.transpose() * v.grad()));
    let mut out = f0.n0 * (-0.5 * (w * c_inv).trace());
    for a in 0..2 {
        out += f0.a_contra[a].cross(&f0.n0) * f0.n0.dot(&v.d[a]);
    }
    Ok(out)
}

pub fn constrained_linear(y0: &SurfacePatch, v: &Map3, x: Vec2) -> Result<LinearConstrained> {
    let f0 = frame_at(y0, x)?;
    Ok(constrained_linear_from(&f0, &v.jet(x)))
}

/// `skew((∇v | δn)[∇Θ]⁻¹)`, the linearized constrained rotation.
pub fn constrained_linear_rotation(f0: &SurfaceFrame, v: &Jet3) -> Mat3 {
    let (h, _) = linearized_reconstruction(f0, v);
    skew3(&h)
}

/// Infinitesimal rigid displacement `a + b × y₀`.
pub fn infinitesimal_rigid(y0: &Map3, b: Vec3, a: Vec3) -> Map3 {
    let y0 = y0.clone();
    let cross = anti(&b);
    Map3::analytic(move |x| {
        let mut j = y0.jet(x).left_mul(&cross);
        j.val += a;
        j
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Variations {
    pub d_first: Mat2,
    pub d_second: Mat2,
    pub d_third: Mat2,
    pub d_weingarten: Mat2,
    pub d_mean: f64,
    pub d_gauss: f64,
}

impl Variations {
    /// Largest relative discrepancy `‖a − b‖ / (1 + ‖b‖)` over all six fields.
    pub fn max_relative_gap(&self, reference: &Variations) -> f64 {
        let rel = |a: f64, b: f64| a / (1.0 + b);
        [
            rel((self.d_first - reference.d_first).norm(), reference.d_first.norm()),
            rel((self.d_second - reference.d_second).norm(), reference.d_second.norm()),
            rel((self.d_third - reference.d_third).norm(), reference.d_third.norm()),
            rel((self.d_weingarten - reference.d_weingarten).norm(), reference.d_weingarten.norm()),
            rel((self.d_mean - reference.d_mean).abs(), reference.d_mean.abs()),
            rel((self.d_gauss - reference.d_gauss).abs(), reference.d_gauss.abs()),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    fn combine(a: &Variations, b: &Variations, wa: f64, wb: f64) -> Variations {
        Variations {
            d_first: a.d_first * wa + b.d_first * wb,
            d_second: a.d_second * wa + b.d_second * wb,
            d_third: a.d_third * wa + b.d_third * wb,
            d_weingarten: a.d_weingarten * wa + b.d_weingarten * wb,
            d_mean: a.d_mean * wa + b.d_mean * wb,
            d_gauss: a.d_gauss * wa + b.d_gauss * wb,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VariationReport {
    pub finite_difference: Variations,
    pub closed_form: Variations,
}

/// Steps of the Richardson pair used for every `η`-derivative.
pub const ETA_STEPS: [f64; 2] = [1e-4, 5e-5];

fn central_variation(y0: &Jet3, v: &Jet3, x: Vec2, eta: f64) -> Result<Variations> {
    let p = frame_from_jet(x, &y0.add(&v.scale(eta)))?;
    let m = frame_from_jet(x, &y0.add(&v.scale(-eta)))?;
    let s = 0.5 / eta;
    Ok(Variations {
        d_first: (p.first_form - m.first_form) * s,
        d_second: (p.second_form - m.second_form) * s,
        d_third: (p.third_form - m.third_form) * s,
        d_weingarten: (p.weingarten - m.weingarten) * s,
        d_mean: (p.mean_curv - m.mean_curv) * s,
        d_gauss: (p.gauss_curv - m.gauss_curv) * s,
    })
}

pub fn variations_fd(y0: &Jet3, v: &Jet3, x: Vec2) -> Result<Variations> {
    let coarse = central_variation(y0, v, x, ETA_STEPS[0])?;
    let fine = central_variation(y0, v, x, ETA_STEPS[1])?;
    Ok(Variations::combine(&fine, &coarse, 4.0 / 3.0, -1.0 / 3.0))
}

pub fn variations_closed(f0: &SurfaceFrame, v: &Jet3) -> Variations {
    let LinearKoiter { g, r } = koiter_linear_direct(f0, v);
    let l = f0.weingarten;
    let i_inv = f0.first_form_inv();
    let r_al = r - sym2(&(g * l)) * 2.0;
    Variations {
        d_first: g * 2.0,
        d_second: r,
        d_third: sym2(&(l.transpose() * (r - g * l))) * 2.0,
        d_weingarten: i_inv * (r - g * l * 2.0),
        d_mean: 0.5 * (i_inv * r_al).trace(),
        d_gauss: (adj2(&l) * i_inv * r_al).trace(),
    }
}

pub fn variation_derivatives(y0: &SurfacePatch, v: &Map3, x: Vec2) -> Result<VariationReport> {
    let f0 = frame_at(y0, x)?;
    let vj = v.jet(x);
    Ok(VariationReport {
        finite_difference: variations_fd(&y0.map.jet(x), &vj, x)?,
        closed_form: variations_closed(&f0, &vj),
    })
}
