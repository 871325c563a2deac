//! Small fixed-size tensor algebra: Cartan split, axial vectors, the SPD square root,
//! polar decomposition, flat/hat lifts and column-wise cross products.
//!
//! Matrices are `nalgebra` fixed-size types. Entries are indexed `(row, col)` from zero.

use nalgebra::{Matrix2, Matrix3, Matrix3x2, RowVector2, SMatrix, Vector2, Vector3};

use crate::error::{Error, Result};

pub type Vec2 = Vector2<f64>;
pub type Vec3 = Vector3<f64>;
pub type Mat2 = Matrix2<f64>;
pub type Mat3 = Matrix3<f64>;
/// A 3×2 matrix, e.g. the surface gradient (∂₁y | ∂₂y).
pub type Mat32 = Matrix3x2<f64>;
/// A 1×2 row, used for transverse shear and drilling vectors.
pub type Row2 = RowVector2<f64>;

/// Skew-symmetry tolerance, relative to `1 + ‖A‖`.
pub const TOL_SKEW: f64 = 1e-9;
/// Symmetry tolerance, relative to `1 + ‖S‖`.
pub const TOL_SYM: f64 = 1e-9;
/// Negative eigenvalues down to `-EIG_CLAMP·(1 + ‖S‖)` are rounded to zero.
pub const EIG_CLAMP: f64 = 1e-12;
/// Smallest determinant accepted by [`polar_decompose`].
pub const DET_MIN: f64 = 1e-10;
/// Orthogonality tolerance for rotations.
pub const TOL_ROT: f64 = 1e-9;

/// Orthogonal Cartan split of a 3×3 matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cartan {
    pub devsym: Mat3,
    pub skew: Mat3,
    pub spherical: Mat3,
}

/// Polar factors `F = R·U`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Polar {
    pub r: Mat3,
    pub u: Mat3,
}

/// Which lift [`lift`] applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Lift {
    /// Zero in the (3,3) slot.
    Flat,
    /// One in the (3,3) slot.
    Hat,
}

pub fn sym3(x: &Mat3) -> Mat3 {
    (x + x.transpose()) * 0.5
}

pub fn skew3(x: &Mat3) -> Mat3 {
    (x - x.transpose()) * 0.5
}

pub fn dev3(x: &Mat3) -> Mat3 {
    x - Mat3::identity() * (x.trace() / 3.0)
}

pub fn sym2(x: &Mat2) -> Mat2 {
    (x + x.transpose()) * 0.5
}

pub fn skew2(x: &Mat2) -> Mat2 {
    (x - x.transpose()) * 0.5
}

/// Adjugate of a 2×2 matrix, `adj(M)·M = det(M)·𝟙`.
pub fn adj2(m: &Mat2) -> Mat2 {
    Mat2::new(m[(1, 1)], -m[(0, 1)], -m[(1, 0)], m[(0, 0)])
}

fn all_finite<const R: usize, const C: usize>(m: &SMatrix<f64, R, C>) -> bool {
    m.iter().all(|v| v.is_finite())
}

pub fn decompose(x: &Mat3) -> Result<Cartan> {
    if !all_finite(x) {
        return Err(Error::InvalidInput("non-finite matrix entry".into()));
    }
    let s = sym3(x);
    let spherical = Mat3::identity() * (x.trace() / 3.0);
    Ok(Cartan { devsym: s - spherical, skew: skew3(x), spherical })
}

/// Axial vector `(−A₂₃, A₁₃, −A₁₂)` of a skew matrix.
pub fn axl(a: &Mat3) -> Result<Vec3> {
    let res = (a + a.transpose()).norm();
    if !res.is_finite() || res > TOL_SKEW * (1.0 + a.norm()) {
        return Err(Error::NotSkew(res));
    }
    Ok(axl_of_skew_part(a))
}

/// Axial vector of `skew(A)`, without the skew check.
pub fn axl_of_skew_part(a: &Mat3) -> Vec3 {
    Vec3::new(
        0.5 * (a[(2, 1)] - a[(1, 2)]),
        0.5 * (a[(0, 2)] - a[(2, 0)]),
        0.5 * (a[(1, 0)] - a[(0, 1)]),
    )
}

/// Inverse of [`axl`]: `anti(v)·w = v × w`.
pub fn anti(v: &Vec3) -> Mat3 {
    Mat3::new(0.0, -v.z, v.y, v.z, 0.0, -v.x, -v.y, v.x, 0.0)
}

/// Column-wise cross product `q × M`; equals `anti(q)·M`.
pub fn vec_cross_mat<const C: usize>(q: &Vec3, m: &SMatrix<f64, 3, C>) -> SMatrix<f64, 3, C> {
    let mut out = SMatrix::<f64, 3, C>::zeros();
    for j in 0..C {
        let col: Vec3 = m.column(j).into_owned();
        out.set_column(j, &q.cross(&col));
    }
    out
}

pub fn lift(m: &Mat2, mode: Lift) -> Mat3 {
    let corner = match mode {
        Lift::Flat => 0.0,
        Lift::Hat => 1.0,
    };
    Mat3::new(m[(0, 0)], m[(0, 1)], 0.0, m[(1, 0)], m[(1, 1)], 0.0, 0.0, 0.0, corner)
}

pub fn flat(m: &Mat2) -> Mat3 {
    lift(m, Lift::Flat)
}

pub fn hat(m: &Mat2) -> Mat3 {
    lift(m, Lift::Hat)
}

/// 3×3 matrix with upper-left block `g`, bottom-left row `t`, zero last column.
pub fn block_lift(g: &Mat2, t: &Row2) -> Mat3 {
    Mat3::new(g[(0, 0)], g[(0, 1)], 0.0, g[(1, 0)], g[(1, 1)], 0.0, t[0], t[1], 0.0)
}

pub fn upper_block(m: &Mat3) -> Mat2 {
    m.fixed_view::<2, 2>(0, 0).into_owned()
}

/// Symmetric eigendecomposition by cyclic Jacobi rotations.
///
/// Returns eigenvalues and the matrix whose columns are the matching unit eigenvectors.
/// Only the symmetric part of `s` is used.
pub fn sym_eigen(s: &Mat3) -> (Vec3, Mat3) {
    let mut a = sym3(s);
    let mut v = Mat3::identity();
    let scale = a.norm_squared();
    for _ in 0..64 {
        let off = a[(0, 1)].powi(2) + a[(0, 2)].powi(2) + a[(1, 2)].powi(2);
        if off == 0.0 || off <= 1e-34 * scale {
            break;
        }
        for (p, q) in [(0usize, 1usize), (0, 2), (1, 2)] {
            let apq = a[(p, q)];
            if apq == 0.0 {
                continue;
            }
            let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
            let t = if theta.abs() > 1e150 {
                0.5 / theta
            } else {
                theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
            };
            let c = 1.0 / (t * t + 1.0).sqrt();
            let sn = t * c;
            let mut j = Mat3::identity();
            j[(p, p)] = c;
            j[(q, q)] = c;
            j[(p, q)] = sn;
            j[(q, p)] = -sn;
            a = j.transpose() * a * j;
            a[(p, q)] = 0.0;
            a[(q, p)] = 0.0;
            v *= j;
        }
    }
    (Vec3::new(a[(0, 0)], a[(1, 1)], a[(2, 2)]), v)
}

fn checked_eigen(s: &Mat3) -> Result<(Vec3, Mat3)> {
    if !all_finite(s) {
        return Err(Error::InvalidInput("non-finite matrix entry".into()));
    }
    let asym = (s - s.transpose()).norm();
    if asym > TOL_SYM * (1.0 + s.norm()) {
        return Err(Error::NotSymmetric(asym));
    }
    let (mut lam, vecs) = sym_eigen(s);
    let floor = EIG_CLAMP * (1.0 + s.norm());
    for l in lam.iter_mut() {
        if *l < -floor {
            return Err(Error::NotPsd(*l));
        }
        if *l < 0.0 {
            *l = 0.0;
        }
    }
    Ok((lam, vecs))
}

/// Principal square root of a symmetric positive semidefinite matrix.
pub fn spd_sqrt(s: &Mat3) -> Result<Mat3> {
    let (lam, v) = checked_eigen(s)?;
    let d = Mat3::from_diagonal(&lam.map(f64::sqrt));
    Ok(sym3(&(v * d * v.transpose())))
}

/// Inverse principal square root of a symmetric positive definite matrix.
pub fn spd_inv_sqrt(s: &Mat3) -> Result<Mat3> {
    let (lam, v) = checked_eigen(s)?;
    if lam.min() <= 0.0 {
        return Err(Error::NotPsd(lam.min()));
    }
    let d = Mat3::from_diagonal(&lam.map(|l| 1.0 / l.sqrt()));
    Ok(sym3(&(v * d * v.transpose())))
}

/// Square root of a PSD matrix that annihilates the unit vector `n` by construction.
///
/// `√S = √(S + n⊗n) − n⊗n` whenever `S·n = 0`; the shifted matrix is definite, so the
/// zero eigenvalue never passes through the clamp.
pub fn spd_sqrt_with_null(s: &Mat3, n: &Vec3) -> Result<Mat3> {
    let nn = n * n.transpose();
    Ok(spd_sqrt(&(s + nn))? - nn)
}

/// `F = R·U` with `U = √(FᵀF)` and one Newton orthogonality polish of `R`.
pub fn polar_decompose(f: &Mat3) -> Result<Polar> {
    if !all_finite(f) {
        return Err(Error::InvalidInput("non-finite matrix entry".into()));
    }
    let det = f.determinant();
    if det < DET_MIN {
        return Err(Error::Degenerate(format!("det F = {det:.3e} below {DET_MIN:.0e}")));
    }
    let u = spd_sqrt(&(f.transpose() * f))?;
    let u_inv = u
        .try_inverse()
        .ok_or_else(|| Error::PolarFailure("stretch factor is singular".into()))?;
    let mut r = f * u_inv;
    let r_inv_t = r
        .try_inverse()
        .ok_or_else(|| Error::PolarFailure("rotation factor is singular".into()))?
        .transpose();
    r = (r + r_inv_t) * 0.5;
    let res = rotation_residual(&r);
    if res > 1e-10 {
        return Err(Error::PolarFailure(format!("orthogonality residual {res:.3e}")));
    }
    Ok(Polar { r, u })
}

/// `‖QᵀQ − 𝟙‖ + |det Q − 1|`.
pub fn rotation_residual(q: &Mat3) -> f64 {
    (q.transpose() * q - Mat3::identity()).norm() + (q.determinant() - 1.0).abs()
}

pub fn check_rotation(q: &Mat3) -> Result<()> {
    let res = rotation_residual(q);
    if res.is_finite() && res <= TOL_ROT {
        Ok(())
    } else {
        Err(Error::NotRotation(res))
    }
}

/// Coefficients `(sin θ/θ, (1 − cos θ)/θ², (θ − sin θ)/θ³)` with series near zero.
fn so3_coeffs(theta: f64) -> (f64, f64, f64) {
    let t2 = theta * theta;
    if theta < 1e-2 {
        (
            1.0 - t2 / 6.0 + t2 * t2 / 120.0 - t2 * t2 * t2 / 5040.0,
            0.5 - t2 / 24.0 + t2 * t2 / 720.0 - t2 * t2 * t2 / 40320.0,
            1.0 / 6.0 - t2 / 120.0 + t2 * t2 / 5040.0 - t2 * t2 * t2 / 362880.0,
        )
    } else {
        let half = (0.5 * theta).sin();
        (theta.sin() / theta, 2.0 * half * half / t2, (theta - theta.sin()) / (t2 * theta))
    }
}

/// Rotation `exp(anti(w))` (Rodrigues).
pub fn exp_so3(w: &Vec3) -> Mat3 {
    let (a, b, _) = so3_coeffs(w.norm());
    let k = anti(w);
    Mat3::identity() + k * a + k * k * b
}

/// Right Jacobian of the exponential map: `exp(w)ᵀ·∂exp(w) = anti(J_r(w)·∂w)`.
pub fn right_jacobian(w: &Vec3) -> Mat3 {
    let (_, b, c) = so3_coeffs(w.norm());
    let k = anti(w);
    Mat3::identity() - k * b + k * k * c
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx_eq::close;
    use proptest::prelude::*;

    mod approx_eq {
        pub fn close(a: f64, b: f64, tol: f64) -> bool {
            (a - b).abs() <= tol
        }
    }

    fn rot(axis: Vec3, angle: f64) -> Mat3 {
        exp_so3(&(axis.normalize() * angle))
    }

    #[test]
    fn decompose_identity_is_spherical() {
        let c = decompose(&Mat3::identity()).unwrap();
        assert_eq!(c.devsym, Mat3::zeros());
        assert_eq!(c.skew, Mat3::zeros());
        assert_eq!(c.spherical, Mat3::identity());
    }

    #[test]
    fn decompose_skew_input() {
        let a = anti(&Vec3::new(1.0, 2.0, 3.0));
        let c = decompose(&a).unwrap();
        assert_eq!(c.skew, a);
        assert!(c.devsym.norm() < 1e-15 && c.spherical.norm() < 1e-15);
    }

    #[test]
    fn decompose_hand_example() {
        let x = Mat3::new(1.0, 1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0);
        let c = decompose(&x).unwrap();
        let devsym = Mat3::new(0.0, 0.5, 0.0, 0.5, 0.0, 0.0, 0.0, 0.0, 0.0);
        let skew = Mat3::new(0.0, 0.5, 0.0, -0.5, 0.0, 0.0, 0.0, 0.0, 0.0);
        assert!((c.devsym - devsym).norm() < 1e-15);
        assert!((c.skew - skew).norm() < 1e-15);
        assert!((c.spherical - Mat3::identity()).norm() < 1e-15);
    }

    #[test]
    fn decompose_rejects_nan() {
        let mut x = Mat3::identity();
        x[(1, 2)] = f64::NAN;
        assert!(matches!(decompose(&x), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn anti_matches_hand_layout() {
        let a = anti(&Vec3::new(1.0, 2.0, 3.0));
        assert_eq!(a, Mat3::new(0.0, -3.0, 2.0, 3.0, 0.0, -1.0, -2.0, 1.0, 0.0));
    }

    #[test]
    fn axl_round_trip_and_zero() {
        assert_eq!(axl(&Mat3::zeros()).unwrap(), Vec3::zeros());
        let v = Vec3::new(-1.0, 4.0, 0.5);
        assert_eq!(axl(&anti(&v)).unwrap(), v);
    }

    #[test]
    fn axl_rejects_symmetric() {
        assert!(matches!(axl(&Mat3::identity()), Err(Error::NotSkew(_))));
    }

    #[test]
    fn sqrt_examples() {
        assert!((spd_sqrt(&Mat3::identity()).unwrap() - Mat3::identity()).norm() < 1e-15);
        let d = Mat3::from_diagonal(&Vec3::new(4.0, 9.0, 16.0));
        let r = spd_sqrt(&d).unwrap();
        assert!((r - Mat3::from_diagonal(&Vec3::new(2.0, 3.0, 4.0))).norm() < 1e-14);
        let q = rot(Vec3::new(1.0, -2.0, 0.3), 0.8);
        let s = q.transpose() * Mat3::from_diagonal(&Vec3::new(1.0, 2.0, 3.0)) * q;
        let r = spd_sqrt(&s).unwrap();
        let expect = q.transpose()
            * Mat3::from_diagonal(&Vec3::new(1.0, 2f64.sqrt(), 3f64.sqrt()))
            * q;
        assert!((r - expect).norm() < 1e-13);
        assert!((r * r - s).norm() <= 1e-12 * (1.0 + s.norm()));
    }

    #[test]
    fn sqrt_errors() {
        let mut s = Mat3::identity();
        s[(0, 1)] = 1e-3;
        assert!(matches!(spd_sqrt(&s), Err(Error::NotSymmetric(_))));
        let neg = Mat3::from_diagonal(&Vec3::new(1.0, -0.5, 1.0));
        assert!(matches!(spd_sqrt(&neg), Err(Error::NotPsd(_))));
        let tiny = Mat3::from_diagonal(&Vec3::new(1.0, -1e-13, 1.0));
        let r = spd_sqrt(&tiny).unwrap();
        assert_eq!(r[(1, 1)], 0.0);
    }

    #[test]
    fn sqrt_with_null_matches_plain_sqrt() {
        let n = Vec3::new(0.0, 0.0, 1.0);
        let s = Mat3::new(2.0, 0.3, 0.0, 0.3, 1.0, 0.0, 0.0, 0.0, 0.0);
        let a = spd_sqrt_with_null(&s, &n).unwrap();
        assert!((a * a - s).norm() < 1e-14);
        assert!((a * n).norm() < 1e-15);
    }

    #[test]
    fn polar_examples() {
        let f = Mat3::from_diagonal(&Vec3::new(2.0, 3.0, 4.0));
        let p = polar_decompose(&f).unwrap();
        assert!((p.r - Mat3::identity()).norm() < 1e-14);
        assert!((p.u - f).norm() < 1e-14);

        let r0 = rot(Vec3::z(), 0.7);
        let p = polar_decompose(&r0).unwrap();
        assert!((p.r - r0).norm() < 1e-14);
        assert!((p.u - Mat3::identity()).norm() < 1e-14);

        let r0 = rot(Vec3::new(0.3, 1.0, -0.4), 1.1);
        let u0 = Mat3::from_diagonal(&Vec3::new(1.5, 1.0, 1.0));
        let p = polar_decompose(&(r0 * u0)).unwrap();
        assert!((p.r * p.u - r0 * u0).norm() < 1e-13);
        assert!((p.r - r0).norm() < 1e-12 && (p.u - u0).norm() < 1e-12);
    }

    #[test]
    fn polar_rejects_reflection() {
        let f = Mat3::from_diagonal(&Vec3::new(1.0, 1.0, -1.0));
        assert!(matches!(polar_decompose(&f), Err(Error::Degenerate(_))));
    }

    #[test]
    fn lifts() {
        let m = Mat2::new(1.0, 2.0, 3.0, 4.0);
        assert_eq!(flat(&m), Mat3::new(1.0, 2.0, 0.0, 3.0, 4.0, 0.0, 0.0, 0.0, 0.0));
        assert_eq!(hat(&Mat2::identity()), Mat3::identity());
        assert_eq!(hat(&Mat2::zeros()), Mat3::from_diagonal(&Vec3::new(0.0, 0.0, 1.0)));
    }

    #[test]
    fn cross_examples() {
        assert_eq!(vec_cross_mat(&Vec3::z(), &Mat3::identity()), anti(&Vec3::z()));
        assert_eq!(vec_cross_mat(&Vec3::zeros(), &Mat3::identity()), Mat3::zeros());
        let m = Mat32::from_columns(&[Vec3::y(), Vec3::z()]);
        let out = vec_cross_mat(&Vec3::x(), &m);
        assert_eq!(out, Mat32::from_columns(&[Vec3::z(), -Vec3::y()]));
    }

    #[test]
    fn exp_and_right_jacobian_agree_with_differences() {
        let w = Vec3::new(0.4, -0.9, 1.3);
        let dw = Vec3::new(0.2, 0.5, -0.1);
        let q = exp_so3(&w);
        assert!(rotation_residual(&q) < 1e-14);
        let h = 1e-6;
        let dq = (exp_so3(&(w + dw * h)) - exp_so3(&(w - dw * h))) / (2.0 * h);
        let lhs = axl_of_skew_part(&(q.transpose() * dq));
        let rhs = right_jacobian(&w) * dw;
        assert!((lhs - rhs).norm() < 1e-9, "{lhs} vs {rhs}");
        let small = Vec3::new(1e-5, 2e-5, -1e-5);
        let q = exp_so3(&small);
        assert!((q - (Mat3::identity() + anti(&small))).norm() < 1e-9);
    }

    fn arb_mat3() -> impl Strategy<Value = Mat3> {
        proptest::collection::vec(-10.0f64..10.0, 9).prop_map(|v| Mat3::from_row_slice(&v))
    }

    fn arb_vec3() -> impl Strategy<Value = Vec3> {
        (-5.0f64..5.0, -5.0f64..5.0, -5.0f64..5.0).prop_map(|(a, b, c)| Vec3::new(a, b, c))
    }

    proptest! {
        #[test]
        fn cartan_parts_resum_and_are_orthogonal(x in arb_mat3()) {
            let c = decompose(&x).unwrap();
            prop_assert!((c.devsym + c.skew + c.spherical - x).norm() <= 1e-13 * (1.0 + x.norm()));
            prop_assert!(c.devsym.dot(&c.skew).abs() <= 1e-13 * (1.0 + x.norm_squared()));
            prop_assert!(c.devsym.dot(&c.spherical).abs() <= 1e-13 * (1.0 + x.norm_squared()));
            prop_assert!(c.skew.dot(&c.spherical).abs() <= 1e-13 * (1.0 + x.norm_squared()));
            prop_assert!(c.devsym.trace().abs() <= 1e-13 * (1.0 + x.norm()));
        }

        #[test]
        fn axl_anti_bijection(v in arb_vec3()) {
            prop_assert_eq!(axl(&anti(&v)).unwrap(), v);
            let a = anti(&v);
            prop_assert_eq!(anti(&axl(&a).unwrap()), a);
        }

        #[test]
        fn cross_equals_anti_product(q in arb_vec3(), m in arb_mat3()) {
            prop_assert!((vec_cross_mat(&q, &m) - anti(&q) * m).norm() <= 1e-12 * (1.0 + m.norm()));
        }

        #[test]
        fn sqrt_squares_back(m in arb_mat3()) {
            let s = m.transpose() * m;
            let r = spd_sqrt(&s).unwrap();
            prop_assert!((r * r - s).norm() <= 1e-11 * (1.0 + s.norm()));
            prop_assert!((r - r.transpose()).norm() == 0.0 || (r - r.transpose()).norm() < 1e-14);
            prop_assert!(sym_eigen(&r).0.min() >= -1e-12);
        }

        #[test]
        fn sqrt_monotone_on_commuting_diagonals(a in proptest::collection::vec(0.0f64..50.0, 3),
                                               b in proptest::collection::vec(0.0f64..50.0, 3)) {
            let lo = Vec3::new(a[0].min(b[0]), a[1].min(b[1]), a[2].min(b[2]));
            let hi = Vec3::new(a[0].max(b[0]), a[1].max(b[1]), a[2].max(b[2]));
            let rl = spd_sqrt(&Mat3::from_diagonal(&lo)).unwrap();
            let rh = spd_sqrt(&Mat3::from_diagonal(&hi)).unwrap();
            let (gap, _) = sym_eigen(&(rh - rl));
            prop_assert!(gap.min() >= -1e-11);
        }

        #[test]
        fn polar_recovers_factors(w in arb_vec3(), m in arb_mat3()) {
            let r0 = exp_so3(&w);
            let u0 = m.transpose() * m + Mat3::identity() * 0.5;
            let p = polar_decompose(&(r0 * u0)).unwrap();
            prop_assert!((p.r - r0).norm() <= 1e-9 * (1.0 + u0.norm()));
            prop_assert!((p.u - u0).norm() <= 1e-9 * (1.0 + u0.norm()));
            prop_assert!(close(p.r.determinant(), 1.0, 1e-12));
        }
    }
}
