//! Conjugate-gradient minimization of the linear shell energies over clamped cubic B-spline fields.

use serde::Serialize;

use super::density::MaterialParams;
use super::functional::{point_terms, Variant};
use super::quadrature::Quadrature;
use crate::error::{Error, Result};
use crate::field::{Domain, Jet3, Map3, SurfacePatch};
use crate::geometry::{frame_at, SurfaceFrame};
use crate::strain_linear::{constrained_linear_from, cosserat_linear_from};
use crate::tensor::{Mat32, Vec2, Vec3};

const DEGREE: usize = 3;

/// Open-uniform cubic knot vector with `n` control points on `[a, b]`.
#[derive(Debug, Clone, PartialEq)]
struct Knots {
    t: Vec<f64>,
    n: usize,
}

impl Knots {
    fn new(n: usize, a: f64, b: f64) -> Self {
        let spans = n - DEGREE;
        let mut t = vec![a; DEGREE + 1];
        for k in 1..spans {
            t.push(a + (b - a) * k as f64 / spans as f64);
        }
        t.extend(std::iter::repeat(b).take(DEGREE + 1));
        Knots { t, n }
    }

    fn span(&self, x: f64) -> usize {
        if x >= self.t[self.n] {
            return self.n - 1;
        }
        let mut s = DEGREE;
        while s < self.n - 1 && x >= self.t[s + 1] {
            s += 1;
        }
        s
    }

    /// Values, first and second derivatives of the four basis functions `span−3..=span`.
    fn basis(&self, span: usize, x: f64) -> [[f64; 3]; 4] {
        let t = &self.t;
        let p = DEGREE;
        let mut ndu = [[0.0; 4]; 4];
        let mut left = [0.0; 4];
        let mut right = [0.0; 4];
        ndu[0][0] = 1.0;
        for j in 1..=p {
            left[j] = x - t[span + 1 - j];
            right[j] = t[span + j] - x;
            let mut saved = 0.0;
            for r in 0..j {
                ndu[j][r] = right[r + 1] + left[j - r];
                let tmp = ndu[r][j - 1] / ndu[j][r];
                ndu[r][j] = saved + right[r + 1] * tmp;
                saved = left[j - r] * tmp;
            }
            ndu[j][j] = saved;
        }
        let mut ders = [[0.0; 3]; 4];
        for (j, d) in ders.iter_mut().enumerate() {
            d[0] = ndu[j][p];
        }
        for r in 0..=p {
            let (mut s1, mut s2) = (0usize, 1usize);
            let mut a = [[0.0; 4]; 2];
            a[0][0] = 1.0;
            for k in 1..=2 {
                let mut d = 0.0;
                let rk = r as isize - k as isize;
                let pk = p - k;
                if r >= k {
                    a[s2][0] = a[s1][0] / ndu[pk + 1][rk as usize];
                    d = a[s2][0] * ndu[rk as usize][pk];
                }
                let j1 = if rk >= -1 { 1 } else { (-rk) as usize };
                let j2 = if r as isize - 1 <= pk as isize { k - 1 } else { p - r };
                for j in j1..=j2 {
                    let idx = (rk + j as isize) as usize;
                    a[s2][j] = (a[s1][j] - a[s1][j - 1]) / ndu[pk + 1][idx];
                    d += a[s2][j] * ndu[idx][pk];
                }
                if r <= pk {
                    a[s2][k] = -a[s1][k - 1] / ndu[pk + 1][r];
                    d += a[s2][k] * ndu[r][pk];
                }
                ders[r][k] = d;
                std::mem::swap(&mut s1, &mut s2);
            }
        }
        let mut fac = p as f64;
        for k in 1..=2 {
            for d in ders.iter_mut() {
                d[k] *= fac;
            }
            fac *= (p - k) as f64;
        }
        ders
    }

    fn greville(&self, i: usize) -> f64 {
        (self.t[i + 1] + self.t[i + 2] + self.t[i + 3]) / 3.0
    }
}

/// Tensor-product cubic B-spline vector field (displacement and, optionally, rotation vector).
#[derive(Debug, Clone, PartialEq)]
pub struct SplineField {
    knots: [Knots; 2],
    pub domain: Domain,
    pub n: [usize; 2],
    /// Row-major control points, index `i·n₂ + j`.
    pub displacement: Vec<Vec3>,
    pub rotation: Option<Vec<Vec3>>,
}

/// Basis data of one point: spans and the 4 × 4 supporting tensor products.
#[derive(Debug, Clone)]
struct Stencil {
    nodes: [usize; 16],
    // [value, ∂₁, ∂₂, ∂₁₁, ∂₁₂, ∂₂₂]
    weights: [[f64; 6]; 16],
}

impl SplineField {
    fn zeros(domain: Domain, n: [usize; 2], with_rotation: bool) -> Self {
        let (lo, hi) = (domain.lo(), domain.hi());
        SplineField {
            knots: [Knots::new(n[0], lo.x, hi.x), Knots::new(n[1], lo.y, hi.y)],
            domain,
            n,
            displacement: vec![Vec3::zeros(); n[0] * n[1]],
            rotation: with_rotation.then(|| vec![Vec3::zeros(); n[0] * n[1]]),
        }
    }

    fn stencil(&self, x: Vec2) -> Stencil {
        let (s1, s2) = (self.knots[0].span(x.x), self.knots[1].span(x.y));
        let (b1, b2) = (self.knots[0].basis(s1, x.x), self.knots[1].basis(s2, x.y));
        let mut nodes = [0; 16];
        let mut weights = [[0.0; 6]; 16];
        for a in 0..4 {
            for b in 0..4 {
                let k = 4 * a + b;
                nodes[k] = (s1 - DEGREE + a) * self.n[1] + (s2 - DEGREE + b);
                let (u, v) = (b1[a], b2[b]);
                weights[k] = [u[0] * v[0], u[1] * v[0], u[0] * v[1], u[2] * v[0], u[1] * v[1], u[0] * v[2]];
            }
        }
        Stencil { nodes, weights }
    }

    fn jet_of(coef: &[Vec3], st: &Stencil) -> Jet3 {
        let mut j = Jet3::zero();
        for (&node, w) in st.nodes.iter().zip(&st.weights) {
            let c = coef[node];
            j.val += c * w[0];
            j.d[0] += c * w[1];
            j.d[1] += c * w[2];
            j.dd[0][0] += c * w[3];
            j.dd[0][1] += c * w[4];
            j.dd[1][1] += c * w[5];
        }
        j.dd[1][0] = j.dd[0][1];
        j
    }

    pub fn displacement_jet(&self, x: Vec2) -> Jet3 {
        SplineField::jet_of(&self.displacement, &self.stencil(x))
    }

    pub fn rotation_jet(&self, x: Vec2) -> Option<Jet3> {
        self.rotation.as_ref().map(|r| SplineField::jet_of(r, &self.stencil(x)))
    }

    /// The displacement as an analytic map.
    pub fn displacement_map(&self) -> Map3 {
        let me = self.clone();
        Map3::analytic(move |x| me.displacement_jet(x))
    }

    pub fn rotation_map(&self) -> Option<Map3> {
        let me = self.clone();
        self.rotation.as_ref()?;
        Some(Map3::analytic(move |x| me.rotation_jet(x).unwrap()))
    }

    pub fn greville(&self, i: usize, j: usize) -> Vec2 {
        Vec2::new(self.knots[0].greville(i), self.knots[1].greville(j))
    }

    fn is_boundary(&self, node: usize) -> bool {
        let (i, j) = (node / self.n[1], node % self.n[1]);
        i == 0 || j == 0 || i + 1 == self.n[0] || j + 1 == self.n[1]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinimizeOptions {
    pub max_iter: usize,
    /// Absolute gradient tolerance; `None` means `1e-6·(1 + |E₀|)`.
    pub tol: Option<f64>,
    pub quad_order: usize,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        MinimizeOptions { max_iter: 5000, tol: None, quad_order: 4 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinimizeReport {
    pub iterations: usize,
    pub grad_norm: f64,
    pub tolerance: f64,
    pub energy_trace: Vec<f64>,
    pub dofs: usize,
}

struct QPoint {
    frame: SurfaceFrame,
    weight: f64,
    load: Vec3,
    stencil: Stencil,
}

/// Local jet coordinates: `v` value, `∂v`, `∂∂v` (symmetric), then `ϑ` value and `∂ϑ`.
const V_COORDS: usize = 18;
const ALL_COORDS: usize = 27;

fn perturb(v: &mut Jet3, th: &mut Jet3, coord: usize, h: f64) {
    let (c, slot) = (coord % 3, coord / 3);
    match slot {
        0 => v.val[c] += h,
        1 => v.d[0][c] += h,
        2 => v.d[1][c] += h,
        3 => v.dd[0][0][c] += h,
        4 => {
            v.dd[0][1][c] += h;
            v.dd[1][0][c] += h;
        }
        5 => v.dd[1][1][c] += h,
        6 => th.val[c] += h,
        7 => th.d[0][c] += h,
        _ => th.d[1][c] += h,
    }
}

/// Stencil weight index for each jet slot.
const SLOT_WEIGHT: [usize; 9] = [0, 1, 2, 3, 4, 5, 0, 1, 2];

struct Problem<'a> {
    points: Vec<QPoint>,
    free: Vec<bool>,
    variant: Variant,
    p: &'a MaterialParams,
}

impl Problem<'_> {
    fn coords(&self) -> usize {
        if self.variant == Variant::Linear {
            ALL_COORDS
        } else {
            V_COORDS
        }
    }

    fn density(&self, q: &QPoint, v: &Jet3, th: &Jet3) -> f64 {
        let (e, k) = match self.variant {
            Variant::Linear => {
                let s = cosserat_linear_from(&q.frame, v, &th.val, &Mat32::from_columns(&th.d));
                (s.e, s.k)
            }
            _ => {
                let s = constrained_linear_from(&q.frame, v);
                (s.e_inf, s.k_inf)
            }
        };
        let t = point_terms(&q.frame, &e, &k, self.p, self.variant.symmetric_only());
        t.iter().sum::<f64>() - q.load.dot(&v.val)
    }

    fn jets(&self, f: &SplineField, q: &QPoint) -> (Jet3, Jet3) {
        let v = SplineField::jet_of(&f.displacement, &q.stencil);
        let th = f.rotation.as_ref().map(|r| SplineField::jet_of(r, &q.stencil)).unwrap_or_else(Jet3::zero);
        (v, th)
    }

    fn energy(&self, f: &SplineField) -> f64 {
        self.points.iter().map(|q| {
            let (v, th) = self.jets(f, q);
            q.weight * self.density(q, &v, &th)
        }).sum()
    }

    fn step(&self, f: &SplineField) -> f64 {
        let m = f
            .displacement
            .iter()
            .chain(f.rotation.iter().flatten())
            .fold(0.0f64, |a, c| a.max(c.amax()));
        1e-6 * (1.0 + m)
    }

    /// Gradient with respect to every control coefficient, laid out as `[u…, ϑ…]`.
    fn gradient(&self, f: &SplineField) -> Vec<f64> {
        let nn = f.displacement.len();
        let mut g = vec![0.0; if f.rotation.is_some() { 6 * nn } else { 3 * nn }];
        let h = self.step(f);
        for q in &self.points {
            let (v, th) = self.jets(f, q);
            for coord in 0..self.coords() {
                let (mut vp, mut tp, mut vm, mut tm) = (v, th, v, th);
                perturb(&mut vp, &mut tp, coord, h);
                perturb(&mut vm, &mut tm, coord, -h);
                let d = q.weight * (self.density(q, &vp, &tp) - self.density(q, &vm, &tm)) / (2.0 * h);
                let (c, slot) = (coord % 3, coord / 3);
                let base = if slot >= 6 { 3 * nn } else { 0 };
                for (&node, w) in q.stencil.nodes.iter().zip(&q.stencil.weights) {
                    g[base + 3 * node + c] += d * w[SLOT_WEIGHT[slot]];
                }
            }
        }
        for (k, gk) in g.iter_mut().enumerate() {
            if !self.free[(k % (3 * nn)) / 3] {
                *gk = 0.0;
            }
        }
        g
    }

    /// Diagonal of the Hessian by second differences, with a unit floor for fixed entries.
    fn diagonal(&self, f: &SplineField) -> Vec<f64> {
        let nn = f.displacement.len();
        let mut diag = vec![0.0; if f.rotation.is_some() { 6 * nn } else { 3 * nn }];
        let h = 1e-3 * (1.0 + self.step(f) * 1e6);
        for q in &self.points {
            let (v, th) = self.jets(f, q);
            let e0 = self.density(q, &v, &th);
            for (k, &node) in q.stencil.nodes.iter().enumerate() {
                let w = &q.stencil.weights[k];
                for field in 0..(if f.rotation.is_some() { 2 } else { 1 }) {
                    for c in 0..3 {
                        let shift = |s: f64| {
                            let (mut v2, mut t2) = (v, th);
                            let slots: &[usize] = if field == 0 { &[0, 1, 2, 3, 4, 5] } else { &[6, 7, 8] };
                            for &slot in slots {
                                perturb(&mut v2, &mut t2, 3 * slot + c, s * w[SLOT_WEIGHT[slot]]);
                            }
                            self.density(q, &v2, &t2)
                        };
                        let d2 = (shift(h) - 2.0 * e0 + shift(-h)) / (h * h);
                        diag[field * 3 * nn + 3 * node + c] += q.weight * d2;
                    }
                }
            }
        }
        let floor = diag.iter().fold(0.0f64, |a, b| a.max(*b)) * 1e-12;
        diag.iter().map(|d| d.max(floor).max(f64::MIN_POSITIVE)).collect()
    }

    fn apply(&self, f: &SplineField, d: &[f64], t: f64) -> SplineField {
        let mut out = f.clone();
        let nn = f.displacement.len();
        for node in 0..nn {
            if !self.free[node] {
                continue;
            }
            for c in 0..3 {
                out.displacement[node][c] += t * d[3 * node + c];
                if let Some(r) = out.rotation.as_mut() {
                    r[node][c] += t * d[3 * nn + 3 * node + c];
                }
            }
        }
        out
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Minimizes the linear energy minus `∫⟨load, v⟩` with `v = bc` (and `ϑ = 0`) on the boundary.
///
/// `grid` counts control points per direction. Only the `Linear` variant carries a
/// rotation-vector unknown.
pub fn minimize_displacement(
    y0: &SurfacePatch,
    load: &Map3,
    bc: &Map3,
    p: &MaterialParams,
    grid: [usize; 2],
    variant: Variant,
    options: &MinimizeOptions,
) -> Result<(SplineField, MinimizeReport)> {
    p.validate()?;
    if grid[0] < 4 || grid[1] < 4 {
        return Err(Error::InvalidGrid(format!("{}x{} (at least 4x4 control points)", grid[0], grid[1])));
    }
    if !variant.is_linear() {
        return Err(Error::InvalidInput(format!("minimization supports linear variants only, got {variant:?}")));
    }
    let mut field = SplineField::zeros(y0.domain, grid, variant == Variant::Linear);
    let mut free = vec![false; grid[0] * grid[1]];
    for i in 0..grid[0] {
        for j in 0..grid[1] {
            let node = i * grid[1] + j;
            if field.is_boundary(node) {
                field.displacement[node] = bc.eval(field.greville(i, j));
            } else {
                free[node] = true;
            }
        }
    }
    let quad = Quadrature::new([grid[0] - DEGREE, grid[1] - DEGREE], options.quad_order)?;
    let mut points = Vec::new();
    for (x, w) in quad.points(&y0.domain)? {
        let frame = frame_at(y0, x)?;
        points.push(QPoint { weight: w * frame.det_grad_theta, load: load.eval(x), stencil: field.stencil(x), frame });
    }
    let prob = Problem { points, free, variant, p };
    let dofs = prob.free.iter().filter(|f| **f).count() * if variant == Variant::Linear { 6 } else { 3 };

    let mut energy = prob.energy(&field);
    let tol = options.tol.unwrap_or(1e-6 * (1.0 + energy.abs()));
    let mut trace = vec![energy];
    let mut g = prob.gradient(&field);
    let mut gnorm = dot(&g, &g).sqrt();
    let precond = if gnorm > tol { prob.diagonal(&field) } else { vec![1.0; g.len()] };
    let mut z: Vec<f64> = g.iter().zip(&precond).map(|(a, b)| a / b).collect();
    let mut d: Vec<f64> = z.iter().map(|v| -v).collect();
    let mut iterations = 0;

    while gnorm > tol {
        if iterations == options.max_iter {
            return Err(Error::NonConvergence { iterations, grad_norm: gnorm });
        }
        iterations += 1;
        let mut slope = dot(&g, &d);
        if slope >= 0.0 {
            d = z.iter().map(|v| -v).collect();
            slope = dot(&g, &d);
        }
        // Exact step of the quadratic along d, with the curvature from a second difference.
        let dmax = d.iter().fold(0.0f64, |a, b| a.max(b.abs()));
        let s = 1e-2 * (1.0 + prob.step(&field) * 1e6) / dmax;
        let curvature = (prob.energy(&prob.apply(&field, &d, s)) - 2.0 * energy
            + prob.energy(&prob.apply(&field, &d, -s)))
            / (s * s);
        let mut t = if curvature > 0.0 { -slope / curvature } else { s };
        let mut accepted = None;
        for _ in 0..60 {
            let trial = prob.apply(&field, &d, t);
            let e = prob.energy(&trial);
            if e <= energy + 1e-4 * t * slope {
                accepted = Some((trial, e));
                break;
            }
            t *= 0.5;
        }
        let Some((next, e)) = accepted else {
            return Err(Error::NonConvergence { iterations, grad_norm: gnorm });
        };
        field = next;
        energy = e;
        trace.push(energy);
        let g_new = prob.gradient(&field);
        let z_new: Vec<f64> = g_new.iter().zip(&precond).map(|(a, b)| a / b).collect();
        let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        let beta = (dot(&z_new, &y) / dot(&z, &g)).max(0.0);
        d = z_new.iter().zip(&d).map(|(zn, dk)| -zn + beta * dk).collect();
        g = g_new;
        z = z_new;
        gnorm = dot(&g, &g).sqrt();
    }
    Ok((field, MinimizeReport { iterations, grad_norm: gnorm, tolerance: tol, energy_trace: trace, dofs }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::SurfaceSpec;
    use std::time::Instant;

    fn material() -> MaterialParams {
        MaterialParams::new(1.0, 0.5, 0.5, 0.2, [1.0, 1.0, 1.0], 0.1).unwrap()
    }

    #[test]
    fn basis_partition_of_unity_and_derivatives() {
        let k = Knots::new(7, 0.0, 2.0);
        for &x in &[0.0, 0.13, 0.5, 0.8, 1.2, 1.999, 2.0] {
            let s = k.span(x);
            let b = k.basis(s, x);
            assert!((b.iter().map(|r| r[0]).sum::<f64>() - 1.0).abs() < 1e-14);
            assert!(b.iter().map(|r| r[1]).sum::<f64>().abs() < 1e-12);
            assert!(b.iter().map(|r| r[2]).sum::<f64>().abs() < 1e-10);
            // Greville abscissae reproduce linear functions.
            let lin: f64 = (0..4).map(|a| b[a][0] * k.greville(s - 3 + a)).sum();
            assert!((lin - x).abs() < 1e-14);
        }
        let (x, hh) = (0.77, 1e-6);
        let s = k.span(x);
        let (bp, bm, b0) = (k.basis(s, x + hh), k.basis(s, x - hh), k.basis(s, x));
        for a in 0..4 {
            assert!(((bp[a][0] - bm[a][0]) / (2.0 * hh) - b0[a][1]).abs() < 1e-8);
            assert!(((bp[a][1] - bm[a][1]) / (2.0 * hh) - b0[a][2]).abs() < 1e-6);
        }
    }

    #[test]
    fn zero_data_gives_zero_field() {
        let y0 = SurfaceSpec::Cylinder { radius: 1.0 }.patch(None).unwrap();
        let z = Map3::zero();
        for variant in [Variant::Linear, Variant::LinearConstrained] {
            let (f, r) = minimize_displacement(&y0, &z, &z, &material(), [5, 6], variant, &Default::default()).unwrap();
            assert_eq!(r.iterations, 0);
            assert!(f.displacement.iter().all(|c| *c == Vec3::zeros()));
        }
    }

    #[test]
    fn grid_and_variant_errors() {
        let y0 = SurfaceSpec::Plate.patch(None).unwrap();
        let z = Map3::zero();
        let o = MinimizeOptions::default();
        assert!(matches!(
            minimize_displacement(&y0, &z, &z, &material(), [3, 8], Variant::Linear, &o),
            Err(Error::InvalidGrid(_))
        ));
        assert!(minimize_displacement(&y0, &z, &z, &material(), [4, 4], Variant::Unconstrained, &o).is_err());
    }

    #[test]
    fn loaded_plate_is_symmetric_and_monotone() {
        let y0 = SurfaceSpec::Plate.patch(None).unwrap();
        let load = Map3::constant(Vec3::new(0.0, 0.0, 1.0));
        let z = Map3::zero();
        let start = Instant::now();
        let (f, r) =
            minimize_displacement(&y0, &load, &z, &material(), [8, 8], Variant::LinearConstrained, &Default::default())
                .unwrap();
        let elapsed = start.elapsed();
        assert!(r.grad_norm <= 1e-6 && r.iterations > 0, "{r:?}");
        assert!(r.energy_trace.windows(2).all(|w| w[1] <= w[0]));
        assert!(elapsed.as_secs_f64() < 10.0, "{elapsed:?}");
        let w = |i: usize, j: usize| f.displacement[i * 8 + j].z;
        let scale = (0..64).map(|k| f.displacement[k].z.abs()).fold(0.0, f64::max);
        assert!(scale > 0.0);
        for i in 0..8 {
            for j in 0..8 {
                assert!((w(i, j) - w(7 - i, j)).abs() < 1e-6 * scale);
                assert!((w(i, j) - w(j, i)).abs() < 1e-6 * scale);
            }
        }
    }

    #[test]
    fn cosserat_variant_converges_on_cylinder() {
        let y0 = SurfaceSpec::Cylinder { radius: 1.0 }.patch(None).unwrap();
        let load = Map3::constant(Vec3::new(0.3, 0.0, -0.2));
        let z = Map3::zero();
        let (_, r) = minimize_displacement(&y0, &load, &z, &material(), [5, 5], Variant::Linear, &Default::default())
            .unwrap();
        assert!(r.grad_norm <= r.tolerance);
        assert!(r.energy_trace.windows(2).all(|w| w[1] <= w[0]));
        assert!(*r.energy_trace.last().unwrap() < 0.0);
    }
}
