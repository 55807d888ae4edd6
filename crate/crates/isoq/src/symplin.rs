//! # Symplectic linear algebra
//!
//! ℂ⁴ carries the symplectic form ω = dz¹∧dz³ + dz²∧dz⁴ with Gram matrix
//! J = e₁³ + e₂⁴ − e₃¹ − e₄² (eᵢʲ the elementary matrix with 1 at row i,
//! column j). This module provides:
//!
//! - the form ω and symplectic-membership tests for Sp(2,ℂ);
//! - the 5-dimensional space 𝔠⁵ of skew matrices spanned by L₁…L₅, its
//!   bilinear form g(X,Y) = ½tr(JXJY) (antidiagonal Gram matrix in the
//!   L-basis), and the real form 𝔯⁵ spanned by E₁…E₅ on which g is positive
//!   definite;
//! - the spin covering 𝙻: Sp(2,ℂ) → O(𝔠⁵), A ↦ (X ↦ AXAᵀ);
//! - the symmetric-cube embedding 𝚂: SL(2,ℂ) → Sp(2,ℂ), conjugated by a
//!   weighted isomorphism F from the third symmetric power of ℂ².
//!
//! The F-weights are pinned to κ₂ = √(2/3) and κ₃ = −√6: these are the
//! unique values (up to the Z₈ ambiguity resolved elsewhere) for which d𝚂
//! lands in sp(2,ℂ) and upper-triangular matrices land in the stabilizer of
//! [e₁∧e₂]; the unit tests enforce both.

use crate::error::{Error, Result};
use crate::tol;
use num_complex::Complex64;
use rand::Rng;

pub type C = Complex64;
pub type Mat2 = nalgebra::SMatrix<C, 2, 2>;
pub type Mat4 = nalgebra::SMatrix<C, 4, 4>;
pub type Mat5 = nalgebra::SMatrix<C, 5, 5>;
pub type Vec4 = nalgebra::SVector<C, 4>;
pub type Vec5 = nalgebra::SVector<C, 5>;
/// Real 5-vector (coordinates in the E-basis of 𝔯⁵).
pub type RVec5 = nalgebra::SVector<f64, 5>;

/// Weight of a₁₁₂ under the isomorphism F (coefficient on e₂).
pub const KAPPA2: f64 = 0.816496580927726; // √(2/3)
/// Weight of a₂₂₂ under F (coefficient on e₃).
pub const KAPPA3: f64 = -2.449489742783178; // −√6

/// Gram matrix J of ω.
pub fn jmat() -> Mat4 {
    let mut j = Mat4::zeros();
    j[(0, 2)] = C::ONE;
    j[(1, 3)] = C::ONE;
    j[(2, 0)] = -C::ONE;
    j[(3, 1)] = -C::ONE;
    j
}

/// ω(x, y) = x₁y₃ − x₃y₁ + x₂y₄ − x₄y₂.
pub fn omega_pair(x: &Vec4, y: &Vec4) -> C {
    x[0] * y[2] - x[2] * y[0] + x[1] * y[3] - x[3] * y[1]
}

/// Largest entry magnitude (the max-norm used by all membership gates).
pub fn max_abs4(m: &Mat4) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_abs5(m: &Mat5) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// ‖AᵀJA − J‖_max; zero exactly when A ∈ Sp(2,ℂ).
pub fn symplectic_residual(a: &Mat4) -> f64 {
    let j = jmat();
    max_abs4(&(a.transpose() * j * a - j))
}

pub fn check_symplectic(a: &Mat4) -> Result<()> {
    let r = symplectic_residual(a);
    if r > tol::GROUP_GATE {
        return Err(Error::NotSymplectic(r));
    }
    Ok(())
}

/// ‖XᵀJ + JX‖_max; zero exactly when X ∈ sp(2,ℂ).
pub fn sp_residual(x: &Mat4) -> f64 {
    let j = jmat();
    max_abs4(&(x.transpose() * j + j * x))
}

/// The basis L₁…L₅ of 𝔠⁵ (skew 4×4 matrices).
pub fn l_basis() -> [Mat4; 5] {
    let e = |i: usize, j: usize| -> Mat4 {
        let mut m = Mat4::zeros();
        m[(i, j)] = C::ONE;
        m
    };
    let s = C::from(1.0 / 2.0_f64.sqrt());
    [
        e(1, 0) - e(0, 1),
        e(3, 0) - e(0, 3),
        (e(2, 0) - e(0, 2) - e(3, 1) + e(1, 3)) * s,
        e(2, 1) - e(1, 2),
        e(3, 2) - e(2, 3),
    ]
}

/// Σ cₐ Lₐ.
pub fn lbasis_compose(c: &Vec5) -> Mat4 {
    let l = l_basis();
    let mut m = Mat4::zeros();
    for a in 0..5 {
        m += l[a] * c[a];
    }
    m
}

/// Coordinates of X in the L-basis; errors when X is not in the span.
pub fn lbasis_decompose(x: &Mat4) -> Result<Vec5> {
    let c = lbasis_project(x);
    let resid = max_abs4(&(x - lbasis_compose(&c)));
    let scale = max_abs4(x).max(1e-300);
    if resid > tol::GROUP_GATE * scale.max(1.0) {
        return Err(Error::NotInSpan(resid));
    }
    Ok(c)
}

/// L-coordinates read off the defining entries (no membership check);
/// useful inside hot loops where the input is in 𝔠⁵ by construction.
pub fn lbasis_project(x: &Mat4) -> Vec5 {
    let rt2 = C::from(2.0_f64.sqrt());
    Vec5::from([x[(1, 0)], x[(3, 0)], rt2 * x[(2, 0)], x[(2, 1)], x[(3, 2)]])
}

/// g(X,Y) = ½ tr(JXJY).
pub fn gfrak(x: &Mat4, y: &Mat4) -> C {
    let j = jmat();
    (j * x * j * y).trace() * C::from(0.5)
}

/// Gram matrix of the L-basis: antidiagonal ones.
pub fn gram_l() -> Mat5 {
    let mut g = Mat5::zeros();
    for a in 0..5 {
        g[(a, 4 - a)] = C::ONE;
    }
    g
}

/// Max deviation between [`gram_l`] and the directly evaluated Gram matrix
/// of L₁…L₅ — a self-test of the hard-coded antidiagonal, run by `selftest`.
pub fn gram_cross_check() -> f64 {
    let l = l_basis();
    let g = gram_l();
    let mut worst = 0.0_f64;
    for a in 0..5 {
        for b in 0..5 {
            worst = worst.max((gfrak(&l[a], &l[b]) - g[(a, b)]).norm());
        }
    }
    worst
}

/// g evaluated on L-coordinate vectors: 2(c₁d₅ + c₂d₄) + c₃d₃ + ... — i.e.
/// cᵀ·Gram·d with the antidiagonal Gram matrix.
pub fn gfrak_coords(c: &Vec5, d: &Vec5) -> C {
    c[0] * d[4] + c[1] * d[3] + c[2] * d[2] + c[3] * d[1] + c[4] * d[0]
}

/// Matrix of 𝙻_A: X ↦ AXAᵀ in the L-basis. Requires A symplectic; the
/// result is orthogonal for the antidiagonal Gram matrix.
pub fn spin_cover(a: &Mat4) -> Result<Mat5> {
    check_symplectic(a)?;
    Ok(spin_pushforward(a))
}

/// Same matrix as [`spin_cover`] without the membership gate. See
/// [`spin_algebra`] for the infinitesimal version on sp(2,ℂ).
pub fn spin_pushforward(a: &Mat4) -> Mat5 {
    let l = l_basis();
    let mut m = Mat5::zeros();
    for (b, lb) in l.iter().enumerate() {
        let img = a * lb * a.transpose();
        let col = lbasis_project(&img);
        for r in 0..5 {
            m[(r, b)] = col[r];
        }
    }
    m
}

/// Infinitesimal spin action: matrix of X ↦ MX + XMᵀ on 𝔠⁵ in the L-basis,
/// for M ∈ sp(2,ℂ). This is d𝙻 and satisfies 𝙻_{exp M} = exp(d𝙻_M).
pub fn spin_algebra(m4: &Mat4) -> Mat5 {
    let l = l_basis();
    let mut m = Mat5::zeros();
    for (b, lb) in l.iter().enumerate() {
        let img = m4 * lb + lb * m4.transpose();
        let col = lbasis_project(&img);
        for r in 0..5 {
            m[(r, b)] = col[r];
        }
    }
    m
}

/// The real orthonormal basis E₁…E₅ of 𝔯⁵.
pub fn e_basis() -> [Mat4; 5] {
    let l = l_basis();
    let s = C::from(1.0 / 2.0_f64.sqrt());
    let i = C::i();
    [
        (l[0] + l[4]) * s,
        (l[0] - l[4]) * (i * s),
        l[2],
        (l[1] + l[3]) * s,
        (l[1] - l[3]) * (i * s),
    ]
}

/// Coordinates of X ∈ 𝔠⁵ in the E-basis together with the distance from the
/// real form (max imaginary part; 0 exactly when X ∈ 𝔯⁵).
pub fn real_coords(x: &Mat4) -> Result<(RVec5, f64)> {
    let c = lbasis_decompose(x)?;
    let x_e = e_coords_from_l(&c);
    let resid = x_e.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    Ok((RVec5::from_fn(|a, _| x_e[a].re), resid))
}

/// Change of coordinates 𝔠⁵: L-basis → E-basis (complex-linear).
pub fn e_coords_from_l(c: &Vec5) -> Vec5 {
    let s = C::from(1.0 / 2.0_f64.sqrt());
    let i = C::i();
    Vec5::from([
        (c[0] + c[4]) * s,
        -i * (c[0] - c[4]) * s,
        c[2],
        (c[1] + c[3]) * s,
        -i * (c[1] - c[3]) * s,
    ])
}

/// Change of coordinates 𝔠⁵: E-basis → L-basis.
pub fn l_coords_from_e(x: &Vec5) -> Vec5 {
    let s = C::from(1.0 / 2.0_f64.sqrt());
    let i = C::i();
    Vec5::from([
        (x[0] + i * x[1]) * s,
        (x[3] + i * x[4]) * s,
        x[2],
        (x[3] - i * x[4]) * s,
        (x[0] - i * x[1]) * s,
    ])
}

/// The weighted isomorphism F: S³(ℂ²) → ℂ⁴ as a matrix (cube-basis order
/// a₁₁₁, a₁₁₂, a₁₂₂, a₂₂₂).
pub(crate) fn f_iso() -> Mat4 {
    let mut f = Mat4::zeros();
    f[(0, 0)] = C::ONE; // a₁₁₁ ↦ e₁
    f[(1, 1)] = C::from(KAPPA2); // a₁₁₂ ↦ κ₂e₂
    f[(3, 2)] = C::ONE; // a₁₂₂ ↦ e₄
    f[(2, 3)] = C::from(KAPPA3); // a₂₂₂ ↦ κ₃e₃
    f
}

/// The symmetric-cube representation of x on S³(ℂ²) in the basis
/// (a₁₁₁, a₁₁₂, a₁₂₂, a₂₂₂).
fn sym_cube(x: &Mat2) -> Mat4 {
    // Images of the basis vectors: (x·a_i)(x·a_j)(x·a_k) expanded by the
    // multinomial rule for symmetric products.
    let (a, b) = (x[(0, 0)], x[(0, 1)]);
    let (c, d) = (x[(1, 0)], x[(1, 1)]);
    // (u₁a₁+v₁a₂)(u₂a₁+v₂a₂)(u₃a₁+v₃a₂) =
    //   u₁u₂u₃·a₁₁₁ + (u₁u₂v₃+u₁v₂u₃+v₁u₂u₃)·a₁₁₂
    // + (u₁v₂v₃+v₁u₂v₃+v₁v₂u₃)·a₁₂₂ + v₁v₂v₃·a₂₂₂.
    let col = |(u1, v1): (C, C), (u2, v2): (C, C), (u3, v3): (C, C)| {
        [
            u1 * u2 * u3,
            u1 * u2 * v3 + u1 * v2 * u3 + v1 * u2 * u3,
            u1 * v2 * v3 + v1 * u2 * v3 + v1 * v2 * u3,
            v1 * v2 * v3,
        ]
    };
    let xa1 = (a, c);
    let xa2 = (b, d);
    let cols = [
        col(xa1, xa1, xa1),
        col(xa1, xa1, xa2),
        col(xa1, xa2, xa2),
        col(xa2, xa2, xa2),
    ];
    Mat4::from_fn(|r, cidx| cols[cidx][r])
}

/// The embedding 𝚂 = F ∘ Ŝ ∘ F⁻¹: SL(2,ℂ) → Sp(2,ℂ).
pub fn embed_sl2(x: &Mat2) -> Result<Mat4> {
    let det = x[(0, 0)] * x[(1, 1)] - x[(0, 1)] * x[(1, 0)];
    let dev = (det - C::ONE).norm();
    if dev > tol::GROUP_GATE {
        return Err(Error::NotUnimodular(dev));
    }
    let f = f_iso();
    let finv = f.try_inverse().expect("F is invertible by construction");
    Ok(f * sym_cube(x) * finv)
}

/// Matrix exponential by scaling and squaring (Taylor core), for the small
/// constant matrices used in tests and synthesis cross-checks.
macro_rules! impl_expm {
    ($name:ident, $t:ty, $maxfn:ident) => {
        pub fn $name(x: &$t) -> $t {
            let norm = $maxfn(x);
            let k = if norm > 0.5 {
                (norm / 0.5).log2().ceil() as u32
            } else {
                0
            };
            let xs = x * C::from((0.5f64).powi(k as i32));
            let mut term = <$t>::identity();
            let mut sum = <$t>::identity();
            for j in 1..=24 {
                term = term * xs * C::from(1.0 / j as f64);
                sum += term;
            }
            let mut r = sum;
            for _ in 0..k {
                r = r * r;
            }
            r
        }
    };
}

impl_expm!(expm4, Mat4, max_abs4);
impl_expm!(expm5, Mat5, max_abs5);

fn rand_c(rng: &mut impl Rng, scale: f64) -> C {
    C::new(
        rng.gen_range(-scale..scale),
        rng.gen_range(-scale..scale),
    )
}

/// Random element of sp(2,ℂ): blocks [[a, b], [c, −aᵀ]] with b, c symmetric.
pub fn random_sp_algebra(rng: &mut impl Rng, scale: f64) -> Mat4 {
    let mut m = Mat4::zeros();
    let a: [[C; 2]; 2] = [
        [rand_c(rng, scale), rand_c(rng, scale)],
        [rand_c(rng, scale), rand_c(rng, scale)],
    ];
    let (b01, c01) = (rand_c(rng, scale), rand_c(rng, scale));
    let b = [[rand_c(rng, scale), b01], [b01, rand_c(rng, scale)]];
    let c = [[rand_c(rng, scale), c01], [c01, rand_c(rng, scale)]];
    for i in 0..2 {
        for j in 0..2 {
            m[(i, j)] = a[i][j];
            m[(i, j + 2)] = b[i][j];
            m[(i + 2, j)] = c[i][j];
            m[(i + 2, j + 2)] = -a[j][i];
        }
    }
    m
}

/// Random symplectic matrix (exponential of a random sp(2,ℂ) element).
pub fn random_symplectic(rng: &mut impl Rng, scale: f64) -> Mat4 {
    expm4(&random_sp_algebra(rng, scale))
}

/// Random unitary symplectic matrix, i.e. a point of the compact real form:
/// exponential of [[a, b], [−b̄, ā]] with a anti-Hermitian and b symmetric.
pub fn random_unitary_symplectic(rng: &mut impl Rng, scale: f64) -> Mat4 {
    let ar = rng.gen_range(-scale..scale);
    let ai = rng.gen_range(-scale..scale);
    let a = [
        [C::new(0.0, rng.gen_range(-scale..scale)), C::new(ar, ai)],
        [C::new(-ar, ai), C::new(0.0, rng.gen_range(-scale..scale))],
    ];
    let b01 = rand_c(rng, scale);
    let b = [[rand_c(rng, scale), b01], [b01, rand_c(rng, scale)]];
    let mut m = Mat4::zeros();
    for i in 0..2 {
        for j in 0..2 {
            m[(i, j)] = a[i][j];
            m[(i, j + 2)] = b[i][j];
            m[(i + 2, j)] = -b[i][j].conj();
            m[(i + 2, j + 2)] = a[i][j].conj();
        }
    }
    expm4(&m)
}

/// Random SL(2,ℂ) matrix (exponential of a traceless 2×2).
pub fn random_sl2(rng: &mut impl Rng, scale: f64) -> Mat2 {
    let a = rand_c(rng, scale);
    let x = Mat2::from([[a, rand_c(rng, scale)], [rand_c(rng, scale), -a]]);
    // Small dense exponential via Taylor (‖x‖ is O(scale), scale ≤ 1 here).
    let mut term = Mat2::identity();
    let mut sum = Mat2::identity();
    for j in 1..=20 {
        term = term * x * C::from(1.0 / j as f64);
        sum += term;
    }
    sum
}
