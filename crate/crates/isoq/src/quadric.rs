//! # The quadric Q₃ and its charts
//!
//! Points of Q₃ are Lagrangian 2-planes [u₁∧u₂] ⊂ ℂ⁴. The Plücker map
//! 𝚕(u₁∧u₂) = u₁u₂ᵀ − u₂u₁ᵀ embeds Q₃ as the null quadric of ℙ𝔠⁵; all charts
//! and projections factor through the five Plücker components 𝚕¹…𝚕⁵ in the
//! L-basis:
//!
//! - affine conformal chart (off the hyperplane 𝓐 = {𝚕¹ = 0}):
//!   (w₁,w₂,w₃) = (−𝚕⁴, c₂𝚕³, 𝚕²)/𝚕¹;
//! - unimodular conformal chart (off ℬ = {𝚕³ = 0}): an SL(2,ℂ) matrix;
//! - unimodular contact chart on ℂP³ (off the quadric 𝒬₂ = {ξ¹ξ³−ξ²ξ⁴ = 0});
//! - flat projections ℂ³ → R³ / R^{1,2}, hyperbolic projections
//!   PSL(2,ℂ) → H³ / H^{1,2} (hyperboloids in the Hermitian model), and the
//!   twistor projection ℂP³ → S⁴ ⊂ 𝔯⁵.
//!
//! Calibration: the raw affine chart (c₂ = 1) pulls the quadric's conformal
//! class back to dw₁dw₃ − ½(dw₂)². The constant [`C2`] = 1/√2 rescales w₂ so
//! that isotropic germs annihilate dw₁dw₃ − (dw₂)² on the nose, and the flat
//! projections carry the remaining phase ([`SIGMA_R3`] = i, [`SIGMA_R12`] = 1)
//! so that tamed surfaces come out conformally immersed. The unit tests pin
//! all three constants against the standard cycle.

use crate::error::{Error, Result};
use crate::jets::{Jet, C};
use crate::symplin::{self, Mat2, Mat4, RVec5, Vec4, Vec5};
use crate::tol;

/// Calibrated scale of the affine chart's second coordinate.
pub const C2: C = C::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
/// Phase of the w₂ coordinate inside the Euclidean projection.
pub const SIGMA_R3: C = C::new(0.0, 1.0);
/// Phase of the w₂ coordinate inside the Minkowski projection.
pub const SIGMA_R12: C = C::new(1.0, 0.0);

/// A 4-vector of jets sharing a base point: the germ of a ℂ⁴-valued curve.
pub type JVec4 = [Jet; 4];

/// Componentwise derivative of a jet 4-vector.
pub fn jvec_derive(u: &JVec4) -> JVec4 {
    [u[0].d(), u[1].d(), u[2].d(), u[3].d()]
}

/// Constant terms of a jet 4-vector (the value at the base point).
pub fn jvec_value(u: &JVec4) -> Vec4 {
    Vec4::from([u[0].value(), u[1].value(), u[2].value(), u[3].value()])
}

/// Evaluates the truncated polynomials at z.
pub fn jvec_eval(u: &JVec4, z: C) -> Vec4 {
    Vec4::from([u[0].eval(z), u[1].eval(z), u[2].eval(z), u[3].eval(z)])
}

/// ω(x, y) on jet 4-vectors (panics on base mismatch, like jet operators;
/// use [`check_same_base`] first when inputs come from outside).
pub fn omega_jet(x: &JVec4, y: &JVec4) -> Jet {
    &(&(&x[0] * &y[2]) - &(&x[2] * &y[0])) + &(&(&x[1] * &y[3]) - &(&x[3] * &y[1]))
}

/// Verifies that all jets of the two germs share one base point.
pub fn check_same_base(u1: &JVec4, u2: &JVec4) -> Result<()> {
    let b = u1[0].base();
    for j in u1.iter().chain(u2.iter()) {
        if (j.base() - b).norm() > 1e-12 * (1.0 + b.norm()) {
            return Err(Error::BaseMismatch(b, j.base()));
        }
    }
    Ok(())
}

/// A point of Q₃: a Lagrangian plane spanned by two vectors.
#[derive(Clone, Debug)]
pub struct QPoint {
    pub u1: Vec4,
    pub u2: Vec4,
}

impl QPoint {
    /// Validates ω(u₁,u₂) = 0 and linear independence.
    pub fn new(u1: Vec4, u2: Vec4) -> Result<QPoint> {
        let scale = u1.norm() * u2.norm();
        if scale < 1e-300 {
            return Err(Error::NotLagrangian(f64::INFINITY));
        }
        let om = symplin::omega_pair(&u1, &u2).norm();
        if om > tol::GROUP_GATE * scale.max(1.0) {
            return Err(Error::NotLagrangian(om));
        }
        // Independence: the wedge has a nonzero Plücker vector.
        let l = plucker_matrix(&u1, &u2);
        if symplin::max_abs4(&l) < 1e-12 * scale.max(1e-12) {
            return Err(Error::NotLagrangian(0.0));
        }
        Ok(QPoint { u1, u2 })
    }
}

/// A point of ℂP³ (homogeneous, nonzero).
#[derive(Clone, Debug)]
pub struct CP3Point {
    pub xi: Vec4,
}

impl CP3Point {
    pub fn new(xi: Vec4) -> Result<CP3Point> {
        if xi.norm() < 1e-300 {
            return Err(Error::DegenerateSolve {
                expected: 1,
                found: 0,
            });
        }
        Ok(CP3Point { xi })
    }
}

fn plucker_matrix(x: &Vec4, y: &Vec4) -> Mat4 {
    x * y.transpose() - y * x.transpose()
}

/// Plücker components 𝚕¹…𝚕⁵ of a Lagrangian plane in the L-basis.
pub fn plucker(p: &QPoint) -> Result<Vec5> {
    let l = plucker_matrix(&p.u1, &p.u2);
    symplin::lbasis_decompose(&l).map_err(|e| match e {
        Error::NotInSpan(r) => Error::NotLagrangian(r),
        other => other,
    })
}

/// Plücker components of a curve germ, as jets. The Lagrangian condition is
/// checked along the whole germ (ω(u₁,u₂) jet ≈ 0 relative to scale).
pub fn plucker_jet(u1: &JVec4, u2: &JVec4) -> Result<[Jet; 5]> {
    check_same_base(u1, u2)?;
    let om = omega_jet(u1, u2);
    let scale = u1.iter().chain(u2.iter()).map(Jet::max_abs).fold(0.0, f64::max);
    if !om.is_zero_rel(scale * scale) {
        return Err(Error::NotLagrangian(om.max_abs()));
    }
    Ok(plucker_jet_unchecked(u1, u2))
}

/// Plücker jets without the Lagrangian gate (hot path; the entries are
/// 𝚕 = u₁u₂ᵀ − u₂u₁ᵀ read off in the L-basis).
pub fn plucker_jet_unchecked(u1: &JVec4, u2: &JVec4) -> [Jet; 5] {
    let l = |i: usize, j: usize| &(&u1[i] * &u2[j]) - &(&u2[i] * &u1[j]);
    let rt2 = C::from(2.0_f64.sqrt());
    [l(1, 0), l(3, 0), l(2, 0) * rt2, l(2, 1), l(3, 2)]
}

///// ṁ matrix of a germ: ṁᵢⱼ = ω(uᵢ, uⱼ′). The curve is isotropic exactly
/// when det ṁ vanishes identically.
pub fn mdot(u1: &JVec4, u2: &JVec4) -> Result<[[Jet; 2]; 2]> {
    check_same_base(u1, u2)?;
    let d1 = jvec_derive(u1);
    let d2 = jvec_derive(u2);
    Ok([
        [omega_jet(u1, &d1), omega_jet(u1, &d2)],
        [omega_jet(u2, &d1), omega_jet(u2, &d2)],
    ])
}

/// det ṁ as a jet; the isotropy residual of the germ.
pub fn isotropy_residual(u1: &JVec4, u2: &JVec4) -> Result<Jet> {
    let m = mdot(u1, u2)?;
    Ok(&(&m[0][0] * &m[1][1]) - &(&m[0][1] * &m[1][0]))
}

/// Affine conformal chart with an explicit w₂ scale (the calibrated module
/// constant is [`C2`]; pass 1 to reproduce the raw chart).
pub fn affine_chart_c2(p: &QPoint, c2: C) -> Result<(C, C, C)> {
    let l = plucker(p)?;
    affine_from_plucker(&l, c2)
}

/// Affine conformal chart with the calibrated w₂ scale.
pub fn affine_chart(p: &QPoint) -> Result<(C, C, C)> {
    affine_chart_c2(p, C2)
}

pub fn affine_from_plucker(l: &Vec5, c2: C) -> Result<(C, C, C)> {
    if l[0].norm() < tol::END_DETECT * l.norm() {
        return Err(Error::OnHyperplaneSection { section: 'A' });
    }
    Ok((-l[3] / l[0], c2 * l[2] / l[0], l[1] / l[0]))
}

/// Jet version of the affine chart along a germ.
pub fn affine_jet(u1: &JVec4, u2: &JVec4, c2: C) -> Result<[Jet; 3]> {
    let l = plucker_jet_unchecked(u1, u2);
    let scale = l.iter().map(Jet::max_abs).fold(0.0, f64::max);
    if l[0].value().norm() < tol::END_DETECT * scale.max(1e-300) {
        return Err(Error::OnHyperplaneSection { section: 'A' });
    }
    let w1 = (-&l[3]).binary(&l[0], crate::jets::JetOp::Div)?;
    let w2 = (&l[2] * c2).binary(&l[0], crate::jets::JetOp::Div)?;
    let w3 = l[1].binary(&l[0], crate::jets::JetOp::Div)?;
    Ok([w1, w2, w3])
}

/// Reconstructs the Plücker quintuple (up to the 𝚕¹ scale) from affine
/// coordinates, using the null-cone relation 2𝚕¹𝚕⁵ + 2𝚕²𝚕⁴ + (𝚕³)² = 0.
pub fn affine_chart_inverse(w: (C, C, C), c2: C) -> Vec5 {
    let (w1, w2, w3) = w;
    let l3 = w2 / c2;
    Vec5::from([C::ONE, w3, l3, -w1, w1 * w3 - l3 * l3 * C::from(0.5)])
}

/// Unimodular conformal chart: (√2/𝚕³)·[[𝚕¹, −𝚕²], [−𝚕⁴, −𝚕⁵]], det = 1.
pub fn unimodular_chart(p: &QPoint) -> Result<Mat2> {
    let l = plucker(p)?;
    unimodular_from_plucker(&l)
}

pub fn unimodular_from_plucker(l: &Vec5) -> Result<Mat2> {
    if l[2].norm() < tol::END_DETECT * l.norm() {
        return Err(Error::OnHyperplaneSection { section: 'B' });
    }
    let s = C::from(2.0_f64.sqrt()) / l[2];
    let mut m = Mat2::zeros();
    m[(0, 0)] = s * l[0];
    m[(0, 1)] = -s * l[1];
    m[(1, 0)] = -s * l[3];
    m[(1, 1)] = -s * l[4];
    Ok(m)
}

/// Unimodular contact chart of ℂP³: [[ξ², ξ¹], [ξ³, ξ⁴]] normalized to
/// det 1 (PSL class; the overall sign is not fixed).
pub fn contact_chart(xi: &CP3Point) -> Result<Mat2> {
    let x = &xi.xi;
    let q = x[0] * x[2] - x[1] * x[3];
    if q.norm() < tol::END_DETECT * x.norm_squared() {
        return Err(Error::OnQuadric);
    }
    let mut m = Mat2::zeros();
    m[(0, 0)] = x[1];
    m[(0, 1)] = x[0];
    m[(1, 0)] = x[2];
    m[(1, 1)] = x[3];
    // det m = ξ²ξ⁴ − ξ¹ξ³ = −q; divide by a square root of the determinant.
    let s = (-q).sqrt();
    Ok(m / s)
}

/// Legendre (contact) residual of a ℂP³ lift: −ω(ξ, ξ′) as a jet. Zero
/// exactly when the curve is tangent to the contact distribution; the value
/// is lift-dependent only by an overall factor, so "zero" is projective.
pub fn contact_residual(xi: &[Jet; 4]) -> Jet {
    let d = [xi[0].d(), xi[1].d(), xi[2].d(), xi[3].d()];
    // ξ³ξ¹′ − ξ¹ξ³′ + ξ⁴ξ²′ − ξ²ξ⁴′
    &(&(&xi[2] * &d[0]) - &(&xi[0] * &d[2])) + &(&(&xi[3] * &d[1]) - &(&xi[1] * &d[3]))
}

/// Target of a flat projection.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FlatTarget {
    R3,
    R12,
}

/// Flat projection with an explicit w₂ phase σ.
pub fn project_flat_with(w: (C, C, C), target: FlatTarget, sigma: C) -> [f64; 3] {
    let (w1, w2, w3) = w;
    let sw2 = sigma * w2;
    match target {
        FlatTarget::R3 => [(w1 + w3).re / 2.0, (w1 - w3).im / 2.0, sw2.re],
        FlatTarget::R12 => [sw2.re, (w1 + w3).im / 2.0, (w1 - w3).im / 2.0],
    }
}

/// Flat projection with the calibrated phases ([`SIGMA_R3`], [`SIGMA_R12`]).
/// For R^{1,2} the ambient metric convention is diag(+1, +1, −1): the last
/// coordinate is timelike.
pub fn project_flat(w: (C, C, C), target: FlatTarget) -> [f64; 3] {
    let sigma = match target {
        FlatTarget::R3 => SIGMA_R3,
        FlatTarget::R12 => SIGMA_R12,
    };
    project_flat_with(w, target, sigma)
}

/// Target of a hyperbolic projection.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HypTarget {
    /// Hyperbolic 3-space: α = BB̄ᵀ, det α = 1, tr α > 0.
    H3,
    /// Anti-de-Sitter-like Lorentzian space form: α = B·diag(1,−1)·B̄ᵀ,
    /// det α = −1.
    H12,
}

/// Hyperbolic / de Sitter projection of a PSL(2,ℂ) class. Returns the
/// coordinates (x⁰, x¹, x², x³) of the Hermitian matrix α = x⁰I + x¹σ₁ +
/// x²σ₂ + x³σ₃ (Pauli expansion); H³ points satisfy (x⁰)²−|x⃗|² = 1, x⁰ > 0,
/// H^{1,2} points satisfy (x⁰)²−|x⃗|² = −1.
pub fn project_hyperbolic(b: &Mat2, target: HypTarget) -> Result<[f64; 4]> {
    let det = b[(0, 0)] * b[(1, 1)] - b[(0, 1)] * b[(1, 0)];
    let dev = (det.norm() - 1.0).abs();
    if dev > tol::GROUP_GATE {
        return Err(Error::NotUnimodular(dev));
    }
    let alpha = match target {
        HypTarget::H3 => b * b.adjoint(),
        HypTarget::H12 => {
            let mut s3 = Mat2::identity();
            s3[(1, 1)] = -C::ONE;
            b * s3 * b.adjoint()
        }
    };
    let x0 = (alpha[(0, 0)] + alpha[(1, 1)]).re / 2.0;
    let x3 = (alpha[(0, 0)] - alpha[(1, 1)]).re / 2.0;
    let x1 = alpha[(0, 1)].re;
    let x2 = -alpha[(0, 1)].im;
    Ok([x0, x1, x2, x3])
}

/// Poincaré-ball coordinates of a hyperboloid point: x⃗/(1 + x⁰).
pub fn ball_model(x: [f64; 4]) -> [f64; 3] {
    let d = 1.0 + x[0];
    [x[1] / d, x[2] / d, x[3] / d]
}

/// Twistor projection ℂP³ → S⁴ ⊂ 𝔯⁵: solves for the real line
/// 𝔭_ξ ∩ 𝔯⁵, where 𝔭_ξ = {X ∈ 𝔠⁵ | XJ(ξξᵀ) = (ξξᵀ)JX}, and returns a unit
/// representative. The sign is chosen to maximize the inner product with
/// `sign_ref` when given, else so that the first substantial coordinate is
/// positive.
pub fn twistor_project(xi: &CP3Point, sign_ref: Option<&RVec5>) -> Result<RVec5> {
    let x = &xi.xi;
    let scale = x.norm();
    let xn = x / C::from(scale);
    let xxt = xn * xn.transpose();
    let j = symplin::jmat();
    let right = j * xxt;
    let left = xxt * j;
    let eb = symplin::e_basis();
    // Real linear system: for X = Σ xₐEₐ (xₐ real), the 4×4 complex
    // condition X·(Jξξᵀ) − (ξξᵀJ)·X = 0 gives 32 real equations in 5 real
    // unknowns with a 1-dimensional kernel.
    let mut m = nalgebra::DMatrix::<f64>::zeros(32, 5);
    for (a, ea) in eb.iter().enumerate() {
        let k = ea * right - left * ea;
        for (r, entry) in k.iter().enumerate() {
            m[(2 * r, a)] = entry.re;
            m[(2 * r + 1, a)] = entry.im;
        }
    }
    let svd = m.svd(false, true);
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let null_tol = 1e-10 * smax.max(1.0);
    let null_count = svd
        .singular_values
        .iter()
        .filter(|&&s| s < null_tol)
        .count();
    // The 5 columns always produce 5 singular values; exactly one must be
    // negligible.
    if null_count != 1 {
        return Err(Error::DegenerateSolve {
            expected: 1,
            found: null_count,
        });
    }
    let (imin, _) = svd
        .singular_values
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, &s)| {
            if s < acc.1 {
                (i, s)
            } else {
                acc
            }
        });
    let vt = svd.v_t.as_ref().expect("requested V^T");
    let mut v = RVec5::from_fn(|a, _| vt[(imin, a)]);
    v /= v.norm();
    let flip = match sign_ref {
        Some(r) => v.dot(r) < 0.0,
        None => {
            let big = v.iter().map(|x| x.abs()).fold(0.0, f64::max);
            let lead = v.iter().find(|x| x.abs() > 0.5 * big).copied().unwrap_or(0.0);
            lead < 0.0
        }
    };
    if flip {
        v = -v;
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symplin::{
        gfrak_coords, random_unitary_symplectic, spin_cover, Vec5,
    };
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn e(i: usize) -> Vec4 {
        let mut v = Vec4::zeros();
        v[i] = C::ONE;
        v
    }

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    /// Standard-cycle germ at z₀: u₁ = e₁ + (z³/3)e₃ − (z²/2)e₄,
    /// u₂ = e₂ − (z²/2)e₃ + ze₄.
    fn standard_cycle_jets(z0: C, order: usize) -> (JVec4, JVec4) {
        let z = Jet::variable(z0, order);
        let zero = Jet::zero(z0, order);
        let one = Jet::constant(z0, C::ONE, order);
        let z2 = (&z * &z) * c(-0.5, 0.0);
        let z3 = (&(&z * &z) * &z) * c(1.0 / 3.0, 0.0);
        let u1 = [one.clone(), zero.clone(), z3, z2.clone()];
        let u2 = [zero, one, z2, z];
        (u1, u2)
    }

    #[test]
    fn plucker_of_coordinate_planes() {
        let p12 = QPoint::new(e(0), e(1)).unwrap();
        let l = plucker(&p12).unwrap();
        assert!((l - Vec5::from([-C::ONE, C::ZERO, C::ZERO, C::ZERO, C::ZERO])).norm() < 1e-14);
        let p34 = QPoint::new(e(2), e(3)).unwrap();
        let l = plucker(&p34).unwrap();
        assert!((l - Vec5::from([C::ZERO, C::ZERO, C::ZERO, C::ZERO, -C::ONE])).norm() < 1e-14);
    }

    #[test]
    fn plucker_of_standard_cycle() {
        // 𝚕 = (−1, −z, z²/√2, z³/3, −z⁴/12).
        let z0 = c(0.7, -0.4);
        let (u1, u2) = standard_cycle_jets(z0, 6);
        let l = plucker_jet(&u1, &u2).unwrap();
        let z = Jet::variable(z0, 6);
        let expect = [
            Jet::constant(z0, -C::ONE, 6),
            -&z,
            (&z * &z) * c(1.0 / 2.0_f64.sqrt(), 0.0),
            z.powi(3).unwrap() * c(1.0 / 3.0, 0.0),
            z.powi(4).unwrap() * c(-1.0 / 12.0, 0.0),
        ];
        for (a, b) in l.iter().zip(expect.iter()) {
            assert!(crate::jets::max_coeff_diff(a, b) < 1e-12);
        }
    }

    #[test]
    fn plucker_vectors_are_null() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            // Random Lagrangian plane: symplectic image of [e₁∧e₂].
            let a = random_unitary_symplectic(&mut rng, 0.8);
            let p = QPoint::new(a * e(0), a * e(1)).unwrap();
            let l = plucker(&p).unwrap();
            assert!(gfrak_coords(&l, &l).norm() < 1e-10 * l.norm_squared());
        }
    }

    #[test]
    fn non_lagrangian_pair_rejected() {
        assert!(matches!(
            QPoint::new(e(0), e(2)),
            Err(Error::NotLagrangian(_))
        ));
    }

    #[test]
    fn standard_cycle_is_isotropic() {
        let (u1, u2) = standard_cycle_jets(c(0.3, 0.9), 8);
        let det = isotropy_residual(&u1, &u2).unwrap();
        assert!(det.max_abs() < 1e-12);
    }

    #[test]
    fn transversal_pair_is_not_isotropic() {
        // u₁ = e₁ + z·e₃, u₂ = e₂ + z·e₄: Lagrangian but det ṁ = 1.
        let z0 = c(0.2, 0.1);
        let z = Jet::variable(z0, 5);
        let zero = Jet::zero(z0, 5);
        let one = Jet::constant(z0, C::ONE, 5);
        let u1 = [one.clone(), zero.clone(), z.clone(), zero.clone()];
        let u2 = [zero.clone(), one, zero, z];
        let det = isotropy_residual(&u1, &u2).unwrap();
        assert!((det.value() - C::ONE).norm() < 1e-12);
    }

    #[test]
    fn affine_chart_of_base_plane() {
        let p = QPoint::new(e(0), e(1)).unwrap();
        let w = affine_chart_c2(&p, C::ONE).unwrap();
        assert!(w.0.norm() + w.1.norm() + w.2.norm() < 1e-14);
    }

    #[test]
    fn affine_chart_of_standard_cycle_raw_scale() {
        // (z³/3, −z²/√2, z) at c₂ = 1.
        let z0 = c(1.3, 0.5);
        let (u1, u2) = standard_cycle_jets(z0, 6);
        let p = QPoint::new(jvec_value(&u1), jvec_value(&u2)).unwrap();
        let w = affine_chart_c2(&p, C::ONE).unwrap();
        let z = z0;
        assert!((w.0 - z * z * z / 3.0).norm() < 1e-12);
        assert!((w.1 + z * z / c(2.0_f64.sqrt(), 0.0)).norm() < 1e-12);
        assert!((w.2 - z).norm() < 1e-12);
    }

    #[test]
    fn affine_chart_fails_on_hyperplane() {
        let p = QPoint::new(e(2), e(3)).unwrap();
        assert!(matches!(
            affine_chart(&p),
            Err(Error::OnHyperplaneSection { section: 'A' })
        ));
    }

    #[test]
    fn affine_roundtrip_through_null_cone() {
        let z0 = c(0.9, 0.2);
        let (u1, u2) = standard_cycle_jets(z0, 6);
        let p = QPoint::new(jvec_value(&u1), jvec_value(&u2)).unwrap();
        let l = plucker(&p).unwrap();
        let w = affine_chart(&p).unwrap();
        let rec = affine_chart_inverse(w, C2);
        let lnorm = l / l[0];
        assert!((rec - lnorm).norm() < 1e-10);
    }

    #[test]
    fn isotropic_germ_annihilates_chart_metric() {
        // With the calibrated c₂, isotropic germs pull dw₁dw₃ − (dw₂)²
        // back to zero.
        let (u1, u2) = standard_cycle_jets(c(0.8, -0.3), 8);
        let w = affine_jet(&u1, &u2, C2).unwrap();
        let (d1, d2, d3) = (w[0].d(), w[1].d(), w[2].d());
        let resid = &(&d1 * &d3) - &(&d2 * &d2);
        let scale = d1.max_abs().max(d2.max_abs()).max(d3.max_abs());
        assert!(resid.max_abs() < 1e-9 * scale.max(1.0) * scale.max(1.0));
    }

    #[test]
    fn unimodular_chart_determinant_is_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let mut tried = 0;
        for _ in 0..40 {
            let a = random_unitary_symplectic(&mut rng, 0.8);
            let p = QPoint::new(a * e(0), a * e(1)).unwrap();
            let l = plucker(&p).unwrap();
            if l[2].norm() < 0.05 * l.norm() {
                continue; // too close to ℬ for a clean test
            }
            tried += 1;
            let m = unimodular_from_plucker(&l).unwrap();
            let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
            assert!((det - C::ONE).norm() < 1e-10);
        }
        assert!(tried > 20);
    }

    #[test]
    fn unimodular_chart_fails_on_its_hyperplane() {
        let p = QPoint::new(e(0), e(1)).unwrap();
        assert!(matches!(
            unimodular_chart(&p),
            Err(Error::OnHyperplaneSection { section: 'B' })
        ));
    }

    #[test]
    fn contact_chart_psl_class() {
        // ξ = (1,0,1,0): det of [[0,1],[1,0]] is −1; normalized matrix has
        // det 1 and the class is scale invariant.
        let xi = CP3Point::new(Vec4::from([C::ONE, C::ZERO, C::ONE, C::ZERO])).unwrap();
        let m = contact_chart(&xi).unwrap();
        let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
        assert!((det - C::ONE).norm() < 1e-12);
        let xi2 = CP3Point::new(xi.xi * c(0.3, 1.7)).unwrap();
        let m2 = contact_chart(&xi2).unwrap();
        // Same PSL class: m2 = ±m.
        let diff_plus = (m2 - m).iter().map(|z| z.norm()).fold(0.0, f64::max);
        let diff_minus = (m2 + m).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(diff_plus.min(diff_minus) < 1e-12);
    }

    #[test]
    fn contact_chart_rejects_quadric_points() {
        let xi = CP3Point::new(Vec4::from([C::ONE, C::ONE, C::ONE, C::ONE])).unwrap();
        assert!(matches!(contact_chart(&xi), Err(Error::OnQuadric)));
    }

    #[test]
    fn twisted_cubic_is_legendre() {
        // ξ = e₁ + z·e₂ − (z³/6)e₃ + (z²/2)e₄.
        let z0 = c(0.4, 1.1);
        let z = Jet::variable(z0, 7);
        let xi = [
            Jet::constant(z0, C::ONE, 7),
            z.clone(),
            z.powi(3).unwrap() * c(-1.0 / 6.0, 0.0),
            (&z * &z) * c(0.5, 0.0),
        ];
        let r = contact_residual(&xi);
        assert!(r.max_abs() < 1e-12);
    }

    #[test]
    fn non_legendre_lift_detected() {
        // ξ = (1, 0, z, 0) has residual −1.
        let z0 = C::ZERO;
        let xi = [
            Jet::constant(z0, C::ONE, 5),
            Jet::zero(z0, 5),
            Jet::variable(z0, 5),
            Jet::zero(z0, 5),
        ];
        let r = contact_residual(&xi);
        assert!((r.value() + C::ONE).norm() < 1e-14);
    }

    #[test]
    fn flat_projection_examples() {
        let w = (C::ONE, C::ZERO, C::ONE);
        let x = project_flat_with(w, FlatTarget::R3, C::ONE);
        assert!((x[0] - 1.0).abs() < 1e-15 && x[1].abs() < 1e-15 && x[2].abs() < 1e-15);
        let wi = (C::i(), C::ZERO, C::i());
        let y = project_flat_with(wi, FlatTarget::R3, C::ONE);
        assert!(y.iter().all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn r3_projection_of_cycle_is_conformal() {
        // The calibrated (c₂, σ) pair makes the standard-cycle projection
        // conformal: |∂φ/∂z · ∂φ/∂z| ≈ 0 (computed from chart jets).
        let (u1, u2) = standard_cycle_jets(c(0.6, 0.35), 6);
        let w = affine_jet(&u1, &u2, C2).unwrap();
        // φ_z components: ((w₁′+w₃′)/4, (w₁′−w₃′)/(4i), σw₂′/2).
        let d = [w[0].d(), w[1].d(), w[2].d()];
        let p1 = (&d[0] + &d[2]) * c(0.25, 0.0);
        let p2 = (&d[0] - &d[2]) * (C::ONE / (c(0.0, 4.0)));
        let p3 = &d[1] * (SIGMA_R3 / c(2.0, 0.0));
        let dot = &(&(&p1 * &p1) + &(&p2 * &p2)) + &(&p3 * &p3);
        let scale = p1.max_abs().max(p2.max_abs()).max(p3.max_abs());
        assert!(dot.max_abs() < 1e-10 * scale * scale);
    }

    #[test]
    fn hyperbolic_projection_of_identity() {
        let x = project_hyperbolic(&Mat2::identity(), HypTarget::H3).unwrap();
        assert_eq!(x, [1.0, 0.0, 0.0, 0.0]);
        assert_eq!(ball_model(x), [0.0, 0.0, 0.0]);
    }

    #[test]
    fn hyperbolic_projection_of_boost() {
        let t = 0.8_f64;
        let mut b = Mat2::zeros();
        b[(0, 0)] = c((t / 2.0).exp(), 0.0);
        b[(1, 1)] = c((-t / 2.0).exp(), 0.0);
        let x = project_hyperbolic(&b, HypTarget::H3).unwrap();
        assert!((x[0] - t.cosh()).abs() < 1e-12);
        assert!((x[3] - t.sinh()).abs() < 1e-12);
        assert!((x[0] * x[0] - x[1] * x[1] - x[2] * x[2] - x[3] * x[3] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn de_sitter_projection_of_identity() {
        let x = project_hyperbolic(&Mat2::identity(), HypTarget::H12).unwrap();
        // α = diag(1, −1): x⁰ = 0, x³ = 1 — det −1.
        assert_eq!(x, [0.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn hyperbolic_projection_rejects_non_unimodular() {
        let b = Mat2::identity() * c(1.4, 0.0);
        assert!(matches!(
            project_hyperbolic(&b, HypTarget::H3),
            Err(Error::NotUnimodular(_))
        ));
    }

    #[test]
    fn twistor_images_are_unit_vectors() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..100 {
            let xi = CP3Point::new(Vec4::from_fn(|_, _| {
                c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            }))
            .unwrap();
            let v = twistor_project(&xi, None).unwrap();
            assert!((v.norm() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn twistor_is_equivariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for _ in 0..10 {
            let a = random_unitary_symplectic(&mut rng, 0.6);
            let xi = Vec4::from_fn(|_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            let v1 = twistor_project(&CP3Point::new(a * xi).unwrap(), None).unwrap();
            let v0 = twistor_project(&CP3Point::new(xi).unwrap(), None).unwrap();
            // Push v0 through 𝙻_A on 𝔯⁵ (E-coordinates).
            let l5 = spin_cover(&a).unwrap();
            let v0_l = symplin::l_coords_from_e(&Vec5::from_fn(|i, _| C::from(v0[i])));
            let img_l = l5 * v0_l;
            let img_e = symplin::e_coords_from_l(&img_l);
            let img = RVec5::from_fn(|i, _| img_e[i].re);
            let diff = (v1 - img).norm().min((v1 + img).norm());
            assert!(diff < 1e-8, "equivariance violated: {diff}");
        }
    }

    #[test]
    fn twistor_constant_on_fibers() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        for _ in 0..10 {
            let a = random_unitary_symplectic(&mut rng, 0.7);
            // The fiber over the image of E₃ under 𝙻_A is spanned by
            // A(αe₁ + βe₃) for [α : β] ∈ ℂP¹.
            let sample = |rng: &mut ChaCha8Rng| {
                let alpha = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                let beta = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                let mut v = Vec4::zeros();
                v[0] = alpha;
                v[2] = beta;
                a * v
            };
            let v1 = twistor_project(&CP3Point::new(sample(&mut rng)).unwrap(), None).unwrap();
            let v2 = twistor_project(&CP3Point::new(sample(&mut rng)).unwrap(), None).unwrap();
            let diff = (v1 - v2).norm().min((v1 + v2).norm());
            assert!(diff < 1e-8, "fiber constancy violated: {diff}");
        }
    }
}
