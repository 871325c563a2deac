//! Vector-valued fields over a planar parameter domain with first and second derivatives.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::tensor::{Mat3, Mat32, Vec2, Vec3};

/// Value, gradient columns `d[α] = ∂_α f` and Hessian `dd[α][β] = ∂_α∂_β f` at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet3 {
    pub val: Vec3,
    pub d: [Vec3; 2],
    pub dd: [[Vec3; 2]; 2],
}

impl Jet3 {
    pub fn zero() -> Self {
        Jet3 { val: Vec3::zeros(), d: [Vec3::zeros(); 2], dd: [[Vec3::zeros(); 2]; 2] }
    }

    pub fn constant(v: Vec3) -> Self {
        Jet3 { val: v, ..Jet3::zero() }
    }

    pub fn grad(&self) -> Mat32 {
        Mat32::from_columns(&self.d)
    }

    /// `∂_β ∇f` as a 3×2 matrix.
    pub fn grad_deriv(&self, beta: usize) -> Mat32 {
        Mat32::from_columns(&[self.dd[0][beta], self.dd[1][beta]])
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map_linear(|v| v * s)
    }

    pub fn left_mul(&self, m: &Mat3) -> Self {
        self.map_linear(|v| m * v)
    }

    fn map_linear(&self, f: impl Fn(&Vec3) -> Vec3) -> Self {
        Jet3 {
            val: f(&self.val),
            d: [f(&self.d[0]), f(&self.d[1])],
            dd: [[f(&self.dd[0][0]), f(&self.dd[0][1])], [f(&self.dd[1][0]), f(&self.dd[1][1])]],
        }
    }

    pub fn add(&self, o: &Jet3) -> Self {
        let mut out = *self;
        out.val += o.val;
        for a in 0..2 {
            out.d[a] += o.d[a];
            for b in 0..2 {
                out.dd[a][b] += o.dd[a][b];
            }
        }
        out
    }
}

type JetFn = dyn Fn(Vec2) -> Jet3 + Send + Sync;
type FirstFn = dyn Fn(Vec2) -> (Vec3, [Vec3; 2]) + Send + Sync;
type ValFn = dyn Fn(Vec2) -> Vec3 + Send + Sync;

#[derive(Clone)]
enum Provider {
    Analytic(Arc<JetFn>),
    /// Analytic value and gradient; Hessian by central differences of the gradient.
    FirstOrder(Arc<FirstFn>),
    Differences(Arc<ValFn>),
}

/// A smooth map `ω ⊂ ℝ² → ℝ³` (midsurface, displacement or rotation-vector field).
#[derive(Clone)]
pub struct Map3 {
    provider: Provider,
}

impl fmt::Debug for Map3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mode = match self.provider {
            Provider::Analytic(_) => "analytic",
            Provider::FirstOrder(_) => "first-order",
            Provider::Differences(_) => "finite-difference",
        };
        f.debug_struct("Map3").field("mode", &mode).finish()
    }
}

/// First-derivative step `6e-6·(1+|x|)`.
pub fn fd_step_first(x: &Vec2) -> f64 {
    6e-6 * (1.0 + x.norm())
}

/// Second-derivative step `2e-4·(1+|x|)`.
pub fn fd_step_second(x: &Vec2) -> f64 {
    2e-4 * (1.0 + x.norm())
}

/// Step for differencing analytic gradients.
pub fn fd_step_gradient(x: &Vec2) -> f64 {
    1e-5 * (1.0 + x.norm())
}

fn unit(a: usize) -> Vec2 {
    if a == 0 {
        Vec2::x()
    } else {
        Vec2::y()
    }
}

/// Central-difference Hessian from an exact gradient.
fn hessian_from_gradient(x: Vec2, grad: impl Fn(Vec2) -> [Vec3; 2]) -> [[Vec3; 2]; 2] {
    let h = fd_step_gradient(&x);
    let mut dd = [[Vec3::zeros(); 2]; 2];
    for b in 0..2 {
        let gp = grad(x + unit(b) * h);
        let gm = grad(x - unit(b) * h);
        for a in 0..2 {
            dd[a][b] = (gp[a] - gm[a]) / (2.0 * h);
        }
    }
    let mixed = (dd[0][1] + dd[1][0]) * 0.5;
    dd[0][1] = mixed;
    dd[1][0] = mixed;
    dd
}

/// Jet of a value-only map by central differences.
pub fn fd_jet(f: &dyn Fn(Vec2) -> Vec3, x: Vec2) -> Jet3 {
    let val = f(x);
    let h1 = fd_step_first(&x);
    let d = [0, 1].map(|a| (f(x + unit(a) * h1) - f(x - unit(a) * h1)) / (2.0 * h1));
    let h = fd_step_second(&x);
    let mut dd = [[Vec3::zeros(); 2]; 2];
    for a in 0..2 {
        let e = unit(a) * h;
        dd[a][a] = (f(x + e) - val * 2.0 + f(x - e)) / (h * h);
    }
    let (e1, e2) = (unit(0) * h, unit(1) * h);
    let mixed = (f(x + e1 + e2) - f(x + e1 - e2) - f(x - e1 + e2) + f(x - e1 - e2)) / (4.0 * h * h);
    dd[0][1] = mixed;
    dd[1][0] = mixed;
    Jet3 { val, d, dd }
}

impl Map3 {
    pub fn analytic(jet: impl Fn(Vec2) -> Jet3 + Send + Sync + 'static) -> Self {
        Map3 { provider: Provider::Analytic(Arc::new(jet)) }
    }

    pub fn first_order(f: impl Fn(Vec2) -> (Vec3, [Vec3; 2]) + Send + Sync + 'static) -> Self {
        Map3 { provider: Provider::FirstOrder(Arc::new(f)) }
    }

    pub fn from_values(f: impl Fn(Vec2) -> Vec3 + Send + Sync + 'static) -> Self {
        Map3 { provider: Provider::Differences(Arc::new(f)) }
    }

    pub fn constant(c: Vec3) -> Self {
        Map3::analytic(move |_| Jet3::constant(c))
    }

    pub fn zero() -> Self {
        Map3::constant(Vec3::zeros())
    }

    /// The same map with derivatives taken by central differences of its values.
    pub fn with_fd(&self) -> Self {
        let me = self.clone();
        Map3::from_values(move |x| me.eval(x))
    }

    pub fn is_analytic(&self) -> bool {
        !matches!(self.provider, Provider::Differences(_))
    }

    pub fn eval(&self, x: Vec2) -> Vec3 {
        match &self.provider {
            Provider::Analytic(j) => j(x).val,
            Provider::FirstOrder(f) => f(x).0,
            Provider::Differences(f) => f(x),
        }
    }

    /// Value and gradient only (cheaper than [`Map3::jet`] for first-order providers).
    pub fn first(&self, x: Vec2) -> (Vec3, [Vec3; 2]) {
        match &self.provider {
            Provider::FirstOrder(f) => f(x),
            _ => {
                let j = self.jet(x);
                (j.val, j.d)
            }
        }
    }

    pub fn jet(&self, x: Vec2) -> Jet3 {
        match &self.provider {
            Provider::Analytic(j) => j(x),
            Provider::FirstOrder(f) => {
                let (val, d) = f(x);
                let dd = hessian_from_gradient(x, |y| f(y).1);
                Jet3 { val, d, dd }
            }
            Provider::Differences(f) => fd_jet(f.as_ref(), x),
        }
    }

    /// `s·self`.
    pub fn scaled(&self, s: f64) -> Self {
        self.map_jet(move |j| j.scale(s))
    }

    /// `q·self + c` for a constant matrix `q`.
    pub fn affine(&self, q: Mat3, c: Vec3) -> Self {
        self.map_jet(move |j| {
            let mut out = j.left_mul(&q);
            out.val += c;
            out
        })
    }

    /// `self + t·other`.
    pub fn plus_scaled(&self, t: f64, other: &Map3) -> Self {
        let (a, b) = (self.clone(), other.clone());
        let analytic = a.is_analytic() && b.is_analytic();
        if analytic {
            Map3::analytic(move |x| a.jet(x).add(&b.jet(x).scale(t)))
        } else {
            Map3::from_values(move |x| a.eval(x) + b.eval(x) * t)
        }
    }

    pub fn plus(&self, other: &Map3) -> Self {
        self.plus_scaled(1.0, other)
    }

    pub fn minus(&self, other: &Map3) -> Self {
        self.plus_scaled(-1.0, other)
    }

    fn map_jet(&self, f: impl Fn(Jet3) -> Jet3 + Send + Sync + 'static) -> Self {
        let me = self.clone();
        if me.is_analytic() {
            Map3::analytic(move |x| f(me.jet(x)))
        } else {
            Map3::from_values(move |x| f(Jet3::constant(me.eval(x))).val)
        }
    }
}

/// A single monomial term `coef · x₁^p · x₂^q`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Monomial {
    pub pow: [u32; 2],
    pub coef: [f64; 3],
}

fn pow_jet(t: f64, p: u32) -> (f64, f64, f64) {
    let pf = p as f64;
    let v = t.powi(p as i32);
    let d = if p >= 1 { pf * t.powi(p as i32 - 1) } else { 0.0 };
    let dd = if p >= 2 { pf * (pf - 1.0) * t.powi(p as i32 - 2) } else { 0.0 };
    (v, d, dd)
}

/// Jet of `Σ coef·x₁^p x₂^q`.
pub fn polynomial_jet(terms: &[Monomial], x: Vec2) -> Jet3 {
    let mut j = Jet3::zero();
    for t in terms {
        let c = Vec3::from(t.coef);
        let (a, da, dda) = pow_jet(x.x, t.pow[0]);
        let (b, db, ddb) = pow_jet(x.y, t.pow[1]);
        j.val += c * (a * b);
        j.d[0] += c * (da * b);
        j.d[1] += c * (a * db);
        j.dd[0][0] += c * (dda * b);
        j.dd[1][1] += c * (a * ddb);
        j.dd[0][1] += c * (da * db);
        j.dd[1][0] += c * (da * db);
    }
    j
}

pub fn polynomial(terms: Vec<Monomial>) -> Map3 {
    Map3::analytic(move |x| polynomial_jet(&terms, x))
}

/// Rectangle `[a₁,b₁]×[a₂,b₂]` in parameter space.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Domain(pub [[f64; 2]; 2]);

impl Domain {
    pub fn new(a1: f64, b1: f64, a2: f64, b2: f64) -> Result<Self> {
        if !(a1 < b1 && a2 < b2) || ![a1, b1, a2, b2].iter().all(|v| v.is_finite()) {
            return Err(Error::BadParameters(format!("empty domain [{a1},{b1}]×[{a2},{b2}]")));
        }
        Ok(Domain([[a1, b1], [a2, b2]]))
    }

    pub fn unit() -> Self {
        Domain([[0.0, 1.0], [0.0, 1.0]])
    }

    pub fn lo(&self) -> Vec2 {
        Vec2::new(self.0[0][0], self.0[1][0])
    }

    pub fn hi(&self) -> Vec2 {
        Vec2::new(self.0[0][1], self.0[1][1])
    }

    pub fn contains_with_margin(&self, x: &Vec2, margin: f64) -> bool {
        (0..2).all(|a| x[a] - margin > self.0[a][0] && x[a] + margin < self.0[a][1])
    }

    pub fn check(&self, x: &Vec2, margin: f64) -> Result<()> {
        if x.iter().all(|v| v.is_finite()) && self.contains_with_margin(x, margin) {
            Ok(())
        } else {
            Err(Error::OutOfDomain(x.x, x.y))
        }
    }

    /// Affine image of `(s,t) ∈ [0,1]²`.
    pub fn at_unit(&self, s: f64, t: f64) -> Vec2 {
        let (lo, hi) = (self.lo(), self.hi());
        Vec2::new(lo.x + s * (hi.x - lo.x), lo.y + t * (hi.y - lo.y))
    }

    pub fn area(&self) -> f64 {
        let d = self.hi() - self.lo();
        d.x * d.y
    }
}

/// A parametrized midsurface (or deformed midsurface) over a rectangle.
#[derive(Debug, Clone)]
pub struct SurfacePatch {
    pub map: Map3,
    pub domain: Domain,
}

impl SurfacePatch {
    pub fn new(map: Map3, domain: Domain) -> Self {
        SurfacePatch { map, domain }
    }

    /// Required distance from the boundary at `x`.
    pub fn margin(&self, x: &Vec2) -> f64 {
        if self.map.is_analytic() {
            0.0
        } else {
            2.0 * fd_step_second(x)
        }
    }

    pub fn with_map(&self, map: Map3) -> Self {
        SurfacePatch { map, domain: self.domain }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wavy() -> Map3 {
        Map3::analytic(|x: Vec2| {
            let (s1, c1) = x.x.sin_cos();
            let e = x.y.exp();
            Jet3 {
                val: Vec3::new(s1 * e, x.x * x.y, c1),
                d: [Vec3::new(c1 * e, x.y, -s1), Vec3::new(s1 * e, x.x, 0.0)],
                dd: [
                    [Vec3::new(-s1 * e, 0.0, -c1), Vec3::new(c1 * e, 1.0, 0.0)],
                    [Vec3::new(c1 * e, 1.0, 0.0), Vec3::new(s1 * e, 0.0, 0.0)],
                ],
            }
        })
    }

    #[test]
    fn fd_jet_tracks_analytic_jet() {
        let m = wavy();
        let x = Vec2::new(0.4, -0.3);
        let a = m.jet(x);
        let f = m.with_fd().jet(x);
        for i in 0..2 {
            assert!((a.d[i] - f.d[i]).norm() < 1e-8);
            for j in 0..2 {
                assert!((a.dd[i][j] - f.dd[i][j]).norm() < 1e-6);
            }
        }
    }

    #[test]
    fn first_order_hessian_by_differences() {
        let m = wavy();
        let mm = m.clone();
        let fo = Map3::first_order(move |x| mm.first(x));
        let x = Vec2::new(0.2, 0.5);
        let (a, b) = (m.jet(x), fo.jet(x));
        for i in 0..2 {
            for j in 0..2 {
                assert!((a.dd[i][j] - b.dd[i][j]).norm() < 1e-8);
            }
        }
    }

    #[test]
    fn polynomial_derivatives() {
        let p = polynomial(vec![
            Monomial { pow: [2, 1], coef: [1.0, 0.0, -2.0] },
            Monomial { pow: [0, 3], coef: [0.0, 1.0, 0.0] },
        ]);
        let x = Vec2::new(0.7, -0.4);
        let j = p.jet(x);
        assert!((j.val - Vec3::new(0.49 * -0.4, -0.064, -2.0 * 0.49 * -0.4)).norm() < 1e-15);
        assert!((j.dd[0][1] - Vec3::new(1.4, 0.0, -2.8)).norm() < 1e-15);
        let f = p.with_fd().jet(x);
        assert!((j.dd[1][1] - f.dd[1][1]).norm() < 1e-6);
    }

    #[test]
    fn combinators_are_linear() {
        let a = wavy();
        let b = polynomial(vec![Monomial { pow: [1, 1], coef: [1.0, 2.0, 3.0] }]);
        let x = Vec2::new(0.3, 0.3);
        let q = crate::tensor::exp_so3(&Vec3::new(0.1, 0.2, 0.3));
        let c = a.plus_scaled(0.5, &b).affine(q, Vec3::x());
        let expect = q * (a.eval(x) + b.eval(x) * 0.5) + Vec3::x();
        assert!((c.eval(x) - expect).norm() < 1e-15);
        assert!((c.jet(x).d[1] - q * (a.jet(x).d[1] + b.jet(x).d[1] * 0.5)).norm() < 1e-15);
    }

    #[test]
    fn domain_checks() {
        let d = Domain::unit();
        assert!(d.check(&Vec2::new(0.5, 0.5), 0.0).is_ok());
        assert!(matches!(d.check(&Vec2::new(1.0, 0.5), 0.0), Err(Error::OutOfDomain(..))));
        assert!(d.check(&Vec2::new(0.9999, 0.5), 1e-3).is_err());
        assert!(Domain::new(1.0, 0.0, 0.0, 1.0).is_err());
    }
}
