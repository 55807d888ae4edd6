//! # Moving-frame reduction and differential invariants
//!
//! A holomorphic curve of isotropic planes admits symplectic frames
//! A: 4×4 with f = [A₁ ∧ A₂], and the Maurer–Cartan form α = A⁻¹dA is
//! sp(2,ℂ)-valued.  Away from the branch points of the curve and of its
//! Legendre associate, the gauge freedom can be fixed until α satisfies the
//! Pfaffian normal form
//!
//! ```text
//!   α³₁ = α⁴₁ = α²₁ − α⁴₂ = α¹₁ − 3α²₂ = 4α¹₂ − 3α²₄ = α¹₄ = 0,  α⁴₂ ≠ 0,
//! ```
//!
//! after which the residual gauge group is two-dimensional and the quartic
//! differential δ = α¹₃(α⁴₂)³ dz⁴ is independent of the remaining freedom.
//! A further reduction with residual group Z₈ normalizes the projective
//! connection η carried by the frame bundle, producing the quadratic
//! differential 𝔡δ = 4η²₁η¹₂ dz² and the bending κ = (𝔡δ)²/δ.  The same
//! connection defines osculating cycles and, through the Plücker lifts,
//! analytic contact orders.
//!
//! The reduction here is algebraic gauge-fixing on jets: each stage solves
//! a triangular linear system in the gauge parameters, and the final frame
//! is re-validated by recomputing its Maurer–Cartan form and measuring the
//! normal-form residuals directly.

use crate::curves::{CurveModel, GermEvaluator};
use crate::error::{Error, Result};
use crate::jets::{max_coeff_diff, Jet, JetOp, C};
use crate::quadric::{self, JVec4};
use crate::symplin::{self, Mat4};
use crate::tol;

/// 4×4 matrix of jets sharing a base point; entry `[i][j]` is row i, col j.
pub type JMat4 = [[Jet; 4]; 4];

/// Scalar factor −6^{−1/3} relating η²₁ to the normal-form entry α⁴₂.
fn eta21_factor() -> C {
    C::from(-(6.0f64.powf(-1.0 / 3.0)))
}

// ---------------------------------------------------------------------------
// Jet-matrix helpers
// ---------------------------------------------------------------------------

/// Constant jet matrix at the given base and order.
pub fn jmat_constant(m: &Mat4, base: C, order: usize) -> JMat4 {
    std::array::from_fn(|i| std::array::from_fn(|j| Jet::constant(base, m[(i, j)], order)))
}

/// Identity jet matrix.
pub fn jmat_identity(base: C, order: usize) -> JMat4 {
    jmat_constant(&Mat4::identity(), base, order)
}

/// Value (constant term) of a jet matrix.
pub fn jmat_value(a: &JMat4) -> Mat4 {
    Mat4::from_fn(|i, j| a[i][j].value())
}

/// Smallest truncation order among the entries.
pub fn jmat_order(a: &JMat4) -> usize {
    a.iter().flatten().map(Jet::order).min().unwrap()
}

/// Largest coefficient magnitude among the entries.
pub fn jmat_max_abs(a: &JMat4) -> f64 {
    a.iter().flatten().map(Jet::max_abs).fold(0.0, f64::max)
}

/// Entrywise truncation.
pub fn jmat_truncated(a: &JMat4, order: usize) -> JMat4 {
    std::array::from_fn(|i| std::array::from_fn(|j| a[i][j].truncated(order)))
}

/// Entrywise derivative; every entry loses one order.
pub fn jmat_derive(a: &JMat4) -> JMat4 {
    std::array::from_fn(|i| std::array::from_fn(|j| a[i][j].d()))
}

/// Jet-matrix product (truncated Cauchy products entrywise).
pub fn jmat_mul(a: &JMat4, b: &JMat4) -> JMat4 {
    std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            let mut acc = &a[i][0] * &b[0][j];
            for k in 1..4 {
                acc = acc + &a[i][k] * &b[k][j];
            }
            acc
        })
    })
}

/// Product of a constant matrix with a jet matrix.
pub fn jmat_mul_const(m: &Mat4, a: &JMat4) -> JMat4 {
    std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            let mut acc = &a[0][j] * m[(i, 0)];
            for k in 1..4 {
                acc = acc + &a[k][j] * m[(i, k)];
            }
            acc
        })
    })
}

/// Inverse of a jet matrix, solved order by order from the LU factorization
/// of the constant term: with A = Σ Aₖ tᵏ and Y = Σ Yₖ tᵏ,
/// Y₀ = A₀⁻¹ and A₀Yₖ = −Σ_{i≥1} Aᵢ Y_{k−i}.
pub fn jmat_inverse(a: &JMat4) -> Result<JMat4> {
    let n = jmat_order(a);
    let base = a[0][0].base();
    let coeff_mat = |k: usize| Mat4::from_fn(|i, j| a[i][j].coeff(k));
    let a0inv = coeff_mat(0).try_inverse().ok_or(Error::SingularFrame)?;
    let mut y: Vec<Mat4> = Vec::with_capacity(n + 1);
    y.push(a0inv);
    for k in 1..=n {
        let mut s = Mat4::zeros();
        for i in 1..=k {
            s += coeff_mat(i) * y[k - i];
        }
        y.push(-a0inv * s);
    }
    Ok(std::array::from_fn(|i| {
        std::array::from_fn(|j| Jet::new(base, (0..=n).map(|k| y[k][(i, j)]).collect()))
    }))
}

/// Columns of a jet matrix as a jet 4-vector.
pub fn jmat_col(a: &JMat4, j: usize) -> JVec4 {
    std::array::from_fn(|i| a[i][j].clone())
}

fn jmat_from_cols(cols: [JVec4; 4]) -> JMat4 {
    std::array::from_fn(|i| std::array::from_fn(|j| cols[j][i].clone()))
}

/// Jetwise symplectic residual: largest coefficient of AᵀJA − J.
pub fn jmat_symplectic_residual(a: &JMat4) -> f64 {
    let base = a[0][0].base();
    let order = jmat_order(a);
    let j = jmat_constant(&symplin::jmat(), base, order);
    // AᵀJA − J, with the transpose folded into the index order.
    let at: JMat4 = std::array::from_fn(|i| std::array::from_fn(|k| a[k][i].clone()));
    let prod = jmat_mul(&at, &jmat_mul(&j, a));
    let mut res = 0.0f64;
    for i in 0..4 {
        for k in 0..4 {
            res = res.max(max_coeff_diff(&prod[i][k], &j[i][k]));
        }
    }
    res
}

// ---------------------------------------------------------------------------
// Frames
// ---------------------------------------------------------------------------

/// Symplectic frame germ along a curve: a 4×4 matrix of jets, symplectic
/// over the jet ring to working precision.
#[derive(Clone, Debug)]
pub struct FrameJet {
    a: JMat4,
}

impl FrameJet {
    /// Validates base consistency and the jetwise symplectic identity.
    pub fn new(a: JMat4) -> Result<FrameJet> {
        let base = a[0][0].base();
        if let Some(other) = a.iter().flatten().find(|j| j.base() != base) {
            return Err(Error::BaseMismatch(base, other.base()));
        }
        let scale = jmat_max_abs(&a).max(1.0);
        let res = jmat_symplectic_residual(&a);
        if res > tol::GROUP_GATE * scale * scale {
            return Err(Error::NotSymplectic(res));
        }
        Ok(FrameJet { a })
    }

    pub fn base(&self) -> C {
        self.a[0][0].base()
    }

    pub fn order(&self) -> usize {
        jmat_order(&self.a)
    }

    /// Frame value at the base point.
    pub fn value(&self) -> Mat4 {
        jmat_value(&self.a)
    }

    pub fn matrix(&self) -> &JMat4 {
        &self.a
    }

    pub fn entry(&self, i: usize, j: usize) -> &Jet {
        &self.a[i][j]
    }
}

/// Maurer–Cartan coefficients α = A⁻¹A′ with respect to dz.
pub fn maurer_cartan(a: &FrameJet) -> Result<JMat4> {
    let order = jmat_order(&a.a);
    if order == 0 {
        return Err(Error::OrderExhausted { requested: 1, order: 0 });
    }
    let inv = jmat_inverse(&a.a)?;
    let da = jmat_derive(&jmat_truncated(&a.a, order));
    Ok(jmat_mul(&inv, &da))
}

/// Sampled coefficient of a meromorphic differential in the ambient chart.
#[derive(Clone, Debug)]
pub struct DifferentialSample {
    /// 2 for quadratic, 4 for quartic differentials.
    pub degree: u8,
    /// Chart point the sample was taken at.
    pub base: C,
    /// Coefficient germ: the differential is `coeff · dz^degree`.
    pub coeff: Jet,
}

impl DifferentialSample {
    /// Coefficient value at the base point.
    pub fn value(&self) -> C {
        self.coeff.value()
    }
}

/// Coefficients of the normalized projective connection η in the chart:
/// η = e11·(a¹₁ − a²₂) + e21·a²₁ + e12·a¹₂, with e11 ≈ 0 after the final
/// gauge normalization.
#[derive(Clone, Debug)]
pub struct Connection {
    pub e11: Jet,
    pub e21: Jet,
    pub e12: Jet,
}

// ---------------------------------------------------------------------------
// Reduction to the Pfaffian normal form
// ---------------------------------------------------------------------------

/// Internal result of the gauge reduction, kept at full working order.
struct Reduced {
    frame: JMat4,
    alpha: JMat4,
    /// δ = α¹₃(α⁴₂)³, carried separately in its cancellation-free form.
    delta: Jet,
    /// Magnitude of the largest term in the sum producing δ, in the same
    /// chart as `delta`: the roundoff scale against which "δ vanishes
    /// identically" is judged (a cycle cancels δ to this times ~1e-16).
    delta_scale: f64,
}

/// Normal-form residuals of a Maurer–Cartan matrix: the six relations, in
/// the order α³₁, α⁴₁, α²₁−α⁴₂, α¹₁−3α²₂, 4α¹₂−3α²₄, α¹₄.
pub fn normal_form_residuals(alpha: &JMat4) -> [f64; 6] {
    normal_form_defects(alpha).map(|j| j.max_abs())
}

fn normal_form_defects(alpha: &JMat4) -> [Jet; 6] {
    let three = C::from(3.0);
    let four = C::from(4.0);
    [
        alpha[2][0].clone(),
        alpha[3][0].clone(),
        &alpha[1][0] - &alpha[3][1],
        &alpha[0][0] - &(&alpha[1][1] * three),
        &(&alpha[0][1] * four) - &(&alpha[1][3] * three),
        alpha[0][3].clone(),
    ]
}

/// Worst normal-form defect coefficient, measured per coefficient index
/// relative to the largest α coefficient of the same index (floored at the
/// value scale of α, so low-index defects are not drowned by a large tail).
pub fn normal_form_relative_residual(alpha: &JMat4) -> f64 {
    let defects = normal_form_defects(alpha);
    let order = defects.iter().map(Jet::order).min().unwrap();
    let mut worst = 0.0f64;
    for k in 0..=order {
        let scale = alpha
            .iter()
            .flatten()
            .map(|j| if k <= j.order() { j.coeff(k).norm() } else { 0.0 })
            .fold(0.0, f64::max)
            .max(1.0);
        for d in &defects {
            worst = worst.max(d.coeff(k).norm() / scale);
        }
    }
    worst
}

/// Fixed symplectic rotations tried when the germ does not graph over the
/// span of e₁, e₂ with a usable lower-right derivative entry.  The shears
/// mix the two graph directions: for a nonzero symmetric ṁ(z₀) at least one
/// of the four structured candidates produces ṁ₂₂(z₀) ≠ 0.
fn gauge_rotations() -> Vec<Mat4> {
    let mut rots = vec![Mat4::identity()];
    // Swap e₁↔e₂ and e₃↔e₄ (exchanges the diagonal entries of ṁ).
    let mut sw = Mat4::zeros();
    sw[(0, 1)] = C::ONE;
    sw[(1, 0)] = C::ONE;
    sw[(2, 3)] = C::ONE;
    sw[(3, 2)] = C::ONE;
    rots.push(sw);
    // Block shears diag(S, S⁻ᵀ) acting on ṁ by congruence with S⁻¹ = [[1,±1],[0,1]]:
    // the new corner entry is ṁ₁₁ ± 2ṁ₁₂ + ṁ₂₂.
    for sign in [1.0f64, -1.0] {
        let mut sh = Mat4::identity();
        sh[(0, 1)] = C::from(-sign); // S = [[1, ∓1],[0,1]]
        sh[(3, 2)] = C::from(sign); // S⁻ᵀ = [[1,0],[±1,1]]
        rots.push(sh);
    }
    // The symplectic structure matrix itself swaps the graph direction
    // entirely (covers germs through the antipodal coordinate plane).
    rots.push(symplin::jmat());
    // Two generic rotations as a last resort, fixed once and for all.
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x0f0b);
    for _ in 0..2 {
        rots.push(symplin::random_unitary_symplectic(&mut rng, 1.0));
    }
    rots
}

/// Graph data for one rotation candidate: the frame whose first two columns
/// normalize the germ over span(e₁, e₂), and the derivative ṁ of the graph
/// map (symmetric because the germ is Lagrangian).
struct GraphGauge {
    rotation: Mat4,
    b: JMat4,
    mdot: [[Jet; 2]; 2],
}

fn graph_gauge(u1: &JVec4, u2: &JVec4, rot: &Mat4) -> Option<GraphGauge> {
    let r1 = apply_const(rot, u1);
    let r2 = apply_const(rot, u2);
    // Top block of the 4×2 germ matrix, columns (u₁, u₂).
    let (t00, t01) = (r1[0].clone(), r2[0].clone());
    let (t10, t11) = (r1[1].clone(), r2[1].clone());
    let det = &(&t00 * &t11) - &(&t01 * &t10);
    let scale = [&t00, &t01, &t10, &t11]
        .iter()
        .map(|j| j.value().norm())
        .fold(0.0, f64::max);
    if det.value().norm() <= 1e-10 * scale * scale {
        return None;
    }
    // Columns of [u₁ u₂]·top⁻¹ via the 2×2 adjugate.
    let dinv = det.recip().ok()?;
    let (i00, i01) = (&t11 * &dinv, -&(&t01 * &dinv));
    let (i10, i11) = (-&(&t10 * &dinv), &t00 * &dinv);
    let v1: JVec4 = std::array::from_fn(|i| &(&r1[i] * &i00) + &(&r2[i] * &i10));
    let v2: JVec4 = std::array::from_fn(|i| &(&r1[i] * &i01) + &(&r2[i] * &i11));
    let mdot = [
        [v1[2].d(), v2[2].d()],
        [v1[3].d(), v2[3].d()],
    ];
    let base = u1[0].base();
    let order = v1.iter().chain(v2.iter()).map(Jet::order).min().unwrap();
    let e3: JVec4 = std::array::from_fn(|i| {
        Jet::constant(base, if i == 2 { C::ONE } else { C::ZERO }, order)
    });
    let e4: JVec4 = std::array::from_fn(|i| {
        Jet::constant(base, if i == 3 { C::ONE } else { C::ZERO }, order)
    });
    Some(GraphGauge {
        rotation: *rot,
        b: jmat_from_cols([v1, v2, e3, e4]),
        mdot,
    })
}

fn apply_const(x: &Mat4, u: &JVec4) -> JVec4 {
    std::array::from_fn(|i| {
        let mut acc = &u[0] * x[(i, 0)];
        for j in 1..4 {
            acc = acc + &u[j] * x[(i, j)];
        }
        acc
    })
}

/// Coefficient growth rate of a jet family: an upper estimate for the
/// reciprocal distance from the base point to the nearest singularity or
/// zero cluster, read off the coefficient profile.
fn growth_rate(jets: &[&Jet]) -> f64 {
    let order = jets.iter().map(|j| j.order()).min().unwrap_or(0);
    let scale = |k: usize| jets.iter().map(|j| j.coeff(k).norm()).fold(0.0, f64::max);
    let s0 = scale(0).max(f64::MIN_POSITIVE);
    let mut rho = 0.0f64;
    for k in 1..=order {
        let sk = scale(k);
        if sk > 0.0 {
            rho = rho.max((sk / s0).powf(1.0 / k as f64));
        }
    }
    rho
}

/// Chart dilation factor pushing the observed coefficient growth below 1/2
/// per index, so the division and logarithm recursions in the reduction are
/// contractive: their feedback error would otherwise grow polynomially in
/// the coefficient index whenever the nearest zero of a denominator sits at
/// the same distance as the working radius.
fn dilation_for(rate: f64) -> f64 {
    (1.0 / (2.0 * rate)).clamp(1.0 / 32.0, 1.0)
}

/// Inverse of [`Jet::dilate`] for a weight-`w` density: coefficient `k` of
/// the scaled-chart jet divides by σ^{k+w}.  Frame columns carry weight 0,
/// connection entries weight 1, quadratic coefficients 2, quartic ones 4.
fn undilate(j: &Jet, sigma: f64, weight: i32) -> Jet {
    let sinv = 1.0 / sigma;
    &j.dilate(sinv) * C::from(sinv.powi(weight))
}

fn jmat_map(m: &JMat4, f: impl Fn(&Jet) -> Jet) -> JMat4 {
    std::array::from_fn(|i| std::array::from_fn(|j| f(&m[i][j])))
}

/// Runs the gauge reduction in a dilated chart chosen from the germ's own
/// coefficient profile and returns the scaled-chart result together with
/// the dilation σ.  Working in the scaled chart keeps every stage division
/// well conditioned per coefficient; callers undo the scaling on whichever
/// output they need via [`undilate`] with the appropriate weight.
fn reduce_scaled(u1: &JVec4, u2: &JVec4) -> Result<(Reduced, f64)> {
    let entries: Vec<&Jet> = u1.iter().chain(u2.iter()).collect();
    let sigma = dilation_for(growth_rate(&entries));
    if sigma == 1.0 {
        return Ok((reduce_core(u1, u2)?, 1.0));
    }
    let d1: JVec4 = std::array::from_fn(|i| u1[i].dilate(sigma));
    let d2: JVec4 = std::array::from_fn(|i| u2[i].dilate(sigma));
    Ok((reduce_core(&d1, &d2)?, sigma))
}

/// Gauge reduction of a Lagrangian germ to the Pfaffian normal form, with
/// every output expressed back in the ambient chart.
fn reduce_germ(u1: &JVec4, u2: &JVec4) -> Result<Reduced> {
    let (red, sigma) = reduce_scaled(u1, u2)?;
    if sigma == 1.0 {
        return Ok(red);
    }
    Ok(Reduced {
        frame: jmat_map(&red.frame, |j| undilate(j, sigma, 0)),
        alpha: jmat_map(&red.alpha, |j| undilate(j, sigma, 1)),
        delta: undilate(&red.delta, sigma, 4),
        // The cancellation scale is chart-bound; the vanishing test it
        // serves is chart-independent, so keep the scaled-chart figure.
        delta_scale: red.delta_scale,
    })
}

fn reduce_core(u1: &JVec4, u2: &JVec4) -> Result<Reduced> {
    quadric::check_same_base(u1, u2)?;

    // Work through the rotation candidates: the germ must graph over
    // span(e₁, e₂) and expose a unit in the ṁ₂₂ slot.
    let rotations = gauge_rotations();
    let mut gauges: Vec<GraphGauge> = Vec::new();
    for rot in &rotations {
        if let Some(g) = graph_gauge(u1, u2, rot) {
            gauges.push(g);
        }
    }
    let Some(first) = gauges.first() else {
        return Err(Error::SingularFrame);
    };

    // Branch-point gate on the first usable gauge: the common vanishing
    // order of ṁ is rotation-invariant.
    let mscale = first.mdot.iter().flatten().map(Jet::max_abs).fold(0.0, f64::max);
    let k1 = first
        .mdot
        .iter()
        .flatten()
        .filter_map(Jet::valuation)
        .min()
        .ok_or_else(|| Error::InvalidModel("stationary germ: ṁ vanishes identically".into()))?;
    if k1 > 0 {
        return Err(Error::BranchPoint { k1 });
    }
    // Isotropy re-check: the graph derivative must be singular as a matrix.
    let det_m = &(&first.mdot[0][0] * &first.mdot[1][1]) - &(&first.mdot[0][1] * &first.mdot[1][0]);
    if det_m.max_abs() > tol::ISOTROPY_REL * mscale * mscale.max(1.0) {
        return Err(Error::InvalidModel("germ is not isotropic: det ṁ ≠ 0".into()));
    }

    // Pick the gauge exposing a well-scaled unit in the ṁ₂₂ slot.  The
    // candidates are ordered from tame to generic; taking the first
    // acceptable one (rather than a global argmax) keeps the subsequent
    // divisions conditioned on curves where the identity already works.
    let quality = |g: &GraphGauge| -> f64 {
        let vscale = g
            .mdot
            .iter()
            .flatten()
            .map(|j| j.value().norm())
            .fold(0.0, f64::max);
        if vscale == 0.0 {
            0.0
        } else {
            g.mdot[1][1].value().norm() / vscale
        }
    };
    let g = gauges
        .iter()
        .find(|g| quality(g) >= 0.25)
        .or_else(|| {
            gauges
                .iter()
                .max_by(|a, b| quality(a).partial_cmp(&quality(b)).unwrap())
        })
        .unwrap();
    let r = g.mdot[1][1].clone();
    if quality(g) <= 1e-10 {
        return Err(Error::GaugeSolveFailed(
            "no rotation exposes a unit in the ṁ₂₂ slot".into(),
        ));
    }

    let base = u1[0].base();

    // Stage A: kill ṁ₁₂ with the unimodular block gauge diag(P, P⁻ᵀ),
    // P = [[1,0],[−t,1]], t = ṁ₁₂/ṁ₂₂; afterwards the connection blocks are
    // c = [[0,0],[0,r]] and a = [[0,0],[−t′,0]].
    let t = g.mdot[0][1].binary(&r, JetOp::Div)?;
    let tp = t.d();
    // The associate branch order is the vanishing order of t′ in this gauge.
    match tp.valuation() {
        None => {
            return Err(Error::AssociateBranchPoint { k2: tp.order() });
        }
        Some(k2) if k2 > 0 => {
            return Err(Error::AssociateBranchPoint { k2 });
        }
        _ => {}
    }

    let order = jmat_order(&g.b);
    let one = Jet::constant(base, C::ONE, order);
    let zero = Jet::zero(base, order);
    let xa: JMat4 = [
        [one.clone(), zero.clone(), zero.clone(), zero.clone()],
        [-&t, one.clone(), zero.clone(), zero.clone()],
        [zero.clone(), zero.clone(), one.clone(), t.clone()],
        [zero.clone(), zero.clone(), zero.clone(), one.clone()],
    ];

    // Stage B: scale the first frame vector so the two c-block units match:
    // x₁₁ = −r/t′, turning the a-block into [[M, 0],[r, 0]] with the
    // logarithmic derivative M = x₁₁′/x₁₁ = λ − t″/t′, λ = r′/r.  Both M
    // and λ stay bounded where the jets of r and t′ do not, which matters
    // below: every invariant combination is assembled from such tame
    // quantities, because convolving raw z^{±k}-type jets against each
    // other cancels binomially growing coefficients and loses roughly one
    // digit per coefficient index.
    let x11 = -&r.binary(&tp, JetOp::Div)?;
    let x11_inv = x11.recip()?;
    let lam = r.d().binary(&r, JetOp::Div)?;
    let m11 = &lam - &tp.d().binary(&tp, JetOp::Div)?;
    let xd: JMat4 = [
        [x11.clone(), zero.clone(), zero.clone(), zero.clone()],
        [zero.clone(), one.clone(), zero.clone(), zero.clone()],
        [zero.clone(), zero.clone(), x11_inv.clone(), zero.clone()],
        [zero.clone(), zero.clone(), zero.clone(), one.clone()],
    ];

    // Stage C: a symmetric shear [[I, T],[0, I]] removes the remaining
    // trace and b-block defects.  Solving the three relations triangularly
    // and pulling the gauge scale out of each entry (T₂₂ = −M/(3r),
    // T₁₂ = Q/r², T₁₁ = R/r³) leaves the tame cores
    //   Q = M²/30 + M′/10 − Mλ/10,
    //   R = −(4/3)MQ − Q′ + 2λQ.
    let rinv = r.recip()?;
    let t22 = &(-&m11) * &(&rinv * C::from(1.0 / 3.0));
    let q = &(&(&(&m11 * &m11) * C::from(1.0 / 30.0)) + &(&m11.d() * C::from(0.1)))
        - &(&(&m11 * &lam) * C::from(0.1));
    let rinv2 = &rinv * &rinv;
    let t12 = &q * &rinv2;
    let rr = &(-&(&(&(&m11 * &q) * C::from(4.0 / 3.0)) + &q.d())) + &(&(&lam * &q) * C::from(2.0));
    let t11 = &rr * &(&rinv2 * &rinv);
    let xt: JMat4 = [
        [one.clone(), zero.clone(), t11.clone(), t12.clone()],
        [zero.clone(), one.clone(), t12.clone(), t22.clone()],
        [zero.clone(), zero.clone(), one.clone(), zero.clone()],
        [zero.clone(), zero.clone(), zero.clone(), one.clone()],
    ];

    // Assemble, undoing the rotation so the frame belongs to the original
    // germ (left multiplication by a constant does not change α).
    let rot_inv = g
        .rotation
        .try_inverse()
        .expect("gauge rotations are symplectic, hence invertible");
    let frame = jmat_mul_const(&rot_inv, &jmat_mul(&jmat_mul(&g.b, &xa), &jmat_mul(&xd, &xt)));

    // The quartic coefficient in the same tame variables:
    // δ = α¹₃(α⁴₂)³ = r³(2M·T₁₁ + T₁₁′ − rT₁₂²) = 2MR + R′ − 3λR − Q².
    let d1 = &(&m11 * &rr) * C::from(2.0);
    let d2 = rr.d();
    let d3 = &(&lam * &rr) * C::from(3.0);
    let d4 = &q * &q;
    let delta_scale = [&d1, &d2, &d3, &d4]
        .iter()
        .map(|j| j.max_abs())
        .fold(0.0, f64::max);
    let delta = &(&d1 + &d2) - &(&d3 + &d4);

    // Write the Maurer–Cartan form out from the stage algebra instead of
    // inverting the assembled frame: conjugating [[0,0],[ṁ,0]] through the
    // three stages gives, in sp(4) blocks [[a, b],[c, −aᵀ]],
    //   a = [[M, −Q/r],[r, M/3]],   c = [[0, 0],[0, r]],
    //   b = [[δ/r³, 0],[0, −(4/3)Q/r]],
    // where c₁₁ = det ṁ/ṁ₂₂ vanishes by isotropy (gated above) and the
    // zeros of b are the solved shear relations.  Recomputing α from the
    // frame numerically would redo the det ṁ cancellation at scale |ṁ|²
    // and amplify it by |x₁₁|², drowning the small b-block entries.
    let a12 = &(-&q) * &rinv;
    let b11 = &delta * &(&rinv2 * &rinv);
    let b22 = &a12 * C::from(4.0 / 3.0);
    let aord = b11.order();
    let znf = Jet::zero(base, aord);
    let tr = |j: &Jet| j.truncated(aord.min(j.order()));
    let alpha: JMat4 = [
        [tr(&m11), tr(&a12), tr(&b11), znf.clone()],
        [tr(&r), tr(&(&m11 * C::from(1.0 / 3.0))), znf.clone(), tr(&b22)],
        [znf.clone(), znf.clone(), tr(&-&m11), tr(&-&r)],
        [znf.clone(), tr(&r), tr(&-&a12), tr(&(&m11 * C::from(-1.0 / 3.0)))],
    ];
    let vscale = Mat4::from_fn(|i, j| alpha[i][j].value()).norm();
    if alpha[3][1].value().norm() <= 1e-10 * vscale {
        return Err(Error::GaugeSolveFailed("α⁴₂ vanishes at the base point".into()));
    }
    let delta = delta.truncated(aord.min(delta.order()));
    Ok(Reduced { frame, alpha, delta, delta_scale })
}

/// Reduces the model's germ at z₀ to a frame in the Pfaffian normal form.
/// The frame is truncated to the requested order; the span of its first two
/// columns reproduces the curve germ.
pub fn reduce_frame(model: &CurveModel, z0: C, order: usize) -> Result<FrameJet> {
    let (u1, u2) = model.invariant_germ(z0, order + tol::GUARD_ORDER)?;
    let red = reduce_germ(&u1, &u2)?;

    // Spot check: the first two frame columns span the germ's plane at z₀.
    let lift_frame = quadric::plucker_jet_unchecked(&jmat_col(&red.frame, 0), &jmat_col(&red.frame, 1));
    let lift_germ = quadric::plucker_jet_unchecked(&u1, &u2);
    let vf: Vec<C> = lift_frame.iter().map(Jet::value).collect();
    let vg: Vec<C> = lift_germ.iter().map(Jet::value).collect();
    let k = (0..5)
        .max_by(|&a, &b| vg[a].norm().partial_cmp(&vg[b].norm()).unwrap())
        .unwrap();
    if vg[k].norm() == 0.0 || vf[k].norm() == 0.0 {
        return Err(Error::GaugeSolveFailed("degenerate Plücker lift".into()));
    }
    let lam = vf[k] / vg[k];
    let span_res = (0..5)
        .map(|i| (vf[i] - lam * vg[i]).norm())
        .fold(0.0, f64::max)
        / vf.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if span_res > tol::GROUP_GATE {
        return Err(Error::GaugeSolveFailed(format!(
            "frame span drifted off the curve (residual {span_res:.3e})"
        )));
    }

    FrameJet::new(jmat_truncated(&red.frame, order.min(jmat_order(&red.frame))))
}

// ---------------------------------------------------------------------------
// Differentials
// ---------------------------------------------------------------------------

/// Quartic-differential coefficient δ = α¹₃(α⁴₂)³ in the ambient chart.
pub fn quartic_delta(model: &CurveModel, z0: C, order: usize) -> Result<DifferentialSample> {
    let (u1, u2) = model.invariant_germ(z0, order + tol::GUARD_ORDER)?;
    let red = reduce_germ(&u1, &u2)?;
    Ok(DifferentialSample {
        degree: 4,
        base: z0,
        coeff: red.delta.truncated(order.min(red.delta.order())),
    })
}

fn delta_from_alpha(alpha: &JMat4) -> Jet {
    let a42 = &alpha[3][1];
    &alpha[0][2] * &(&(a42 * a42) * a42)
}

/// Symmetric-cube image of an upper-triangular 2×2 jet matrix, conjugated
/// into the symplectic picture: the jet-valued counterpart of the scalar
/// SL(2,ℂ) embedding.
fn embed_sl2_jet(a: &Jet, b: &Jet, d: &Jet) -> JMat4 {
    let base = a.base();
    let order = a.order().min(b.order()).min(d.order());
    let zero = Jet::zero(base, order);
    // Images of the symmetric-cube basis under x = [[a,b],[0,d]]:
    // column entries follow the multinomial expansion of (x·u)³.
    let a2 = a * a;
    let a3 = &a2 * a;
    let d2 = d * d;
    let d3 = &d2 * d;
    let b2 = b * b;
    let cube: [[Jet; 4]; 4] = [
        [a3, &a2 * b, a * &b2, &b2 * b],
        [
            zero.clone(),
            &a2 * d,
            &(a * &(b * d)) * C::from(2.0),
            &b2 * d * C::from(3.0),
        ],
        [
            zero.clone(),
            zero.clone(),
            a * &d2,
            &(b * &d2) * C::from(3.0),
        ],
        [zero.clone(), zero.clone(), zero.clone(), d3],
    ];
    let f = symplin::f_iso();
    let finv = f.try_inverse().expect("F is invertible by construction");
    jmat_mul_const(&f, &jmat_mul(&cube, &jmat_constant(&finv, base, order)))
}

/// Final gauge stage: normalizes the frame within its residual freedom so
/// that δ = 6^{4/3}(η²₁)⁴ and η¹₁ = 0, the connection picture in which the
/// quadratic differential reads off as 4η²₁η¹₂.  The leftover ambiguity is
/// the group of eighth roots of unity acting by quarter-turns on η²₁, fixed
/// deterministically by turning arg η²₁(z₀) into [0, π/2).
pub fn z8_reduce(a: &FrameJet) -> Result<(FrameJet, Connection)> {
    // Same chart dilation as the main reduction, estimated here from the
    // frame entries; the normal-form relations are linear, so the scaled
    // frame satisfies them whenever the input does.
    let entries: Vec<&Jet> = a.a.iter().flatten().collect();
    let sigma = dilation_for(growth_rate(&entries));
    let scaled = FrameJet::new(jmat_map(&a.a, |j| j.dilate(sigma)))?;
    let alpha = maurer_cartan(&scaled)?;
    if normal_form_relative_residual(&alpha) > tol::PFAFFIAN_RESIDUAL * 10.0 {
        return Err(Error::GaugeSolveFailed(
            "input frame does not satisfy the Pfaffian normal form".into(),
        ));
    }
    let delta = delta_from_alpha(&alpha);
    let (ahat, conn) = z8_from_alpha(&scaled.a, &alpha, &delta)?;
    Ok((
        FrameJet::new(jmat_map(&ahat, |j| undilate(j, sigma, 0)))?,
        Connection {
            e11: undilate(&conn.e11, sigma, 1),
            e21: undilate(&conn.e21, sigma, 1),
            e12: undilate(&conn.e12, sigma, 1),
        },
    ))
}

fn z8_from_alpha(frame: &JMat4, alpha: &JMat4, delta: &Jet) -> Result<(JMat4, Connection)> {
    let a42 = &alpha[3][1];
    // δ = 0 at the base: heptactic point (or a cycle, where δ vanishes
    // identically).  Judged against the germ of δ itself — the raw α¹₃
    // entry carries an arbitrary gauge factor r⁻³ and has no usable scale.
    if delta.value().norm() <= 1e-9 * delta.max_abs() {
        return Err(Error::HeptacticPoint);
    }

    // The normal-form α is the symmetric-cube image of the SL(2) connection
    // β = [[h, b],[c, −h]] plus the pure residue α¹₃·e¹₃ (h = α²₂ = α¹₁/3,
    // c = α⁴₂/√6, b = α²₄·√6/4).  The final gauge x = [[s, ws],[0, 1/s]]
    // acts on β by x⁻¹βx + x⁻¹x′ and scales the residue slot by s⁻⁶, so the
    // whole stage reduces to 2×2 algebra.  Matching δ = 6^{4/3}(η̂²₁)⁴ gives
    // s² = δ^{1/4}/α⁴₂: in the hatted entries every steep gauge factor
    // cancels, and the connection comes out in the tame combinations
    //   η̂²₁ = −6^{−1/3}·δ^{1/4},
    //   s′/s = (log δ)′/8 − (log α⁴₂)′/2,
    //   b/s² = −(δ^{−1/4}/(5κ₂))·(M²/9 + M′/3 − M(log α⁴₂)′/3), M = α¹₁,
    // which avoids convolving the binomially growing coefficients of the
    // raw z^{±k}-type entries (those lose one digit per coefficient index).
    let rld = a42.d().binary(a42, JetOp::Div)?;
    let dld = delta.d().binary(delta, JetOp::Div)?;
    let mut droot = delta.pow(C::from(0.25))?;
    // Quarter-turn pin: rotate δ^{1/4} until arg η̂²₁(z₀) lands in [0, π/2).
    for _ in 0..4 {
        let e21v = eta21_factor() * droot.value();
        if (0.0..std::f64::consts::FRAC_PI_2).contains(&e21v.arg()) {
            break;
        }
        droot = &droot * C::i();
    }
    let e21 = &droot * eta21_factor();
    let slog = &(&dld * C::from(0.125)) - &(&rld * C::from(0.5));
    let h = alpha[1][1].clone();
    // Shear parameter of the gauge, solved from η̂¹₁ = 0 at the SL(2) level:
    // the diagonal of x⁻¹βx + x⁻¹x′ is h + s′/s − (cs²)·w, cs² = δ^{1/4}/√6.
    let chat = &droot * C::from(1.0 / 6.0f64.sqrt());
    let w = (&h + &slog).binary(&chat, JetOp::Div)?;
    // Upper entry of the transformed β: b̂ = 2hw + b/s² − (cs²)w² + w′ + 2w·s′/s.
    let m11 = &alpha[0][0];
    let core = &(&(&(m11 * m11) * C::from(1.0 / 9.0)) + &(&m11.d() * C::from(1.0 / 3.0)))
        - &(&(m11 * &rld) * C::from(1.0 / 3.0));
    let b_over_s2 =
        &core.binary(&droot, JetOp::Div)? * C::from(-1.0 / (5.0 * symplin::KAPPA2));
    let bhat = &(&(&(&(&h * &w) * C::from(2.0)) + &b_over_s2) - &(&chat * &(&w * &w)))
        + &(&w.d() + &(&(&w * &slog) * C::from(2.0)));
    // η̂¹₂ = −(3/32)^{1/3}·α̂²₄ = −(3/32)^{1/3}·2κ₂·b̂ = −6^{−1/6}·b̂, so the
    // product of the two entry normalizations is exactly 1/4 against α̂⁴₂α̂²₄.
    let e12 = &bhat * C::from(-(6.0f64.powf(-1.0 / 6.0)));
    let conn = Connection {
        e11: Jet::zero(bhat.base(), bhat.order()),
        e21: e21.truncated(bhat.order().min(e21.order())),
        e12,
    };

    // The frame itself still carries the full gauge factor.
    let s2 = droot.binary(a42, JetOp::Div)?;
    let s = s2.sqrt()?;
    let u = &w * &s;
    let x = embed_sl2_jet(&s, &u, &s.recip()?);
    let ahat = jmat_mul(frame, &x);
    Ok((ahat, conn))
}

/// Full invariant chain at z₀: quartic coefficient, quadratic coefficient,
/// and the normalized connection, all as germs in the ambient chart.
fn invariant_jets(model: &CurveModel, z0: C, order: usize) -> Result<(Jet, Jet, Connection)> {
    let (u1, u2) = model.invariant_germ(z0, order + tol::GUARD_ORDER)?;
    let (red, sigma) = reduce_scaled(&u1, &u2)?;
    let (_ahat, conn) = z8_from_alpha(&red.frame, &red.alpha, &red.delta)?;
    // 𝔡δ = 4η²₁η¹₂; the prefactors of the two connection entries multiply
    // to exactly 1/4 against the normal-form entries α⁴₂α²₄.
    let gamma = &(&conn.e21 * &conn.e12) * C::from(4.0);
    let tr = |j: &Jet| j.truncated(order.min(j.order()));
    Ok((
        tr(&undilate(&red.delta, sigma, 4)),
        tr(&undilate(&gamma, sigma, 2)),
        Connection {
            e11: tr(&undilate(&conn.e11, sigma, 1)),
            e21: tr(&undilate(&conn.e21, sigma, 1)),
            e12: tr(&undilate(&conn.e12, sigma, 1)),
        },
    ))
}

/// Quadratic-differential coefficient 𝔡δ = 4η²₁η¹₂ in the ambient chart.
pub fn quadratic_ddelta(model: &CurveModel, z0: C) -> Result<DifferentialSample> {
    let order = tol::default_order();
    let (_, gamma, _) = invariant_jets(model, z0, order)?;
    Ok(DifferentialSample {
        degree: 2,
        base: z0,
        coeff: gamma,
    })
}

/// Bending κ = (𝔡δ)²/δ at z₀.
pub fn bending(model: &CurveModel, z0: C) -> Result<C> {
    if model.is_cycle() {
        return Err(Error::CycleCurve);
    }
    let order = tol::default_order();
    let (u1, u2) = model.invariant_germ(z0, order + tol::GUARD_ORDER)?;
    // κ = γ²/δ is a weight-zero invariant: the σ-factors of the scaled
    // chart cancel between numerator and denominator, so the scaled values
    // serve directly.
    let (red, _sigma) = reduce_scaled(&u1, &u2)?;
    let delta = red.delta.clone();
    // Distinguish a curve whose quartic vanishes identically (a cycle seen
    // through an unrecognized model) from an isolated zero: identically
    // zero means cancelled down to the roundoff scale of its terms.
    if delta.max_abs() <= 1e-9 * red.delta_scale.max(f64::MIN_POSITIVE) {
        return Err(Error::CycleCurve);
    }
    if delta.value().norm() <= 1e-9 * delta.max_abs() {
        return Err(Error::HeptacticPoint);
    }
    let (_, conn) = z8_from_alpha(&red.frame, &red.alpha, &delta)?;
    let gamma = &(&conn.e21 * &conn.e12) * C::from(4.0);
    Ok(gamma.value() * gamma.value() / delta.value())
}

// ---------------------------------------------------------------------------
// The projective-structure operator in a chart
// ---------------------------------------------------------------------------

/// Chart form of the second-order operator taking a quartic coefficient to
/// a quadratic one: (1/2)Z″/Z − (9/16)(Z′/Z)².
pub fn d_naive(z: &Jet) -> Result<Jet> {
    if z.order() < 2 {
        return Err(Error::OrderExhausted {
            requested: 2,
            order: z.order(),
        });
    }
    if z.value().norm() <= 1e-12 * z.max_abs() {
        return Err(Error::ZeroDenominator);
    }
    let zi = z.recip()?;
    let zp = z.d();
    let zpp = zp.d();
    let ratio = &zp * &zi;
    Ok(&(&(&zpp * &zi) * C::from(0.5)) - &(&(&ratio * &ratio) * C::from(9.0 / 16.0)))
}

/// Schwarzian derivative (h″/h′)′ − ½(h″/h′)².
pub fn schwarzian(h: &Jet) -> Result<Jet> {
    if h.order() < 3 {
        return Err(Error::OrderExhausted {
            requested: 3,
            order: h.order(),
        });
    }
    let hp = h.d();
    if hp.value().norm() <= 1e-12 * h.max_abs().max(1.0) {
        return Err(Error::CriticalPoint);
    }
    let g = hp.d().binary(&hp, JetOp::Div)?;
    Ok(&g.d() - &(&(&g * &g) * C::from(0.5)))
}

/// Correction term turning the chart operator into the invariant one for a
/// connection sampled in the same chart:
/// 𝔯 = −2e21″/e21 + (e21′/e21)(3e21′/e21 − 4e11) + 4(e11′ + e11² + e12e21).
pub fn r_correction(conn: &Connection) -> Result<Jet> {
    let e21 = &conn.e21;
    if e21.order() < 2 || conn.e11.order() < 1 {
        return Err(Error::OrderExhausted { requested: 2, order: e21.order() });
    }
    if e21.value().norm() <= 1e-12 * e21.max_abs() {
        return Err(Error::ZeroDenominator);
    }
    let inv = e21.recip()?;
    let lp = &e21.d() * &inv; // e21′/e21
    let lpp = &e21.d().d() * &inv; // e21″/e21
    let first = &lpp * C::from(-2.0);
    let second = &lp * &(&(&lp * C::from(3.0)) - &(&conn.e11 * C::from(4.0)));
    let third = &(&(&conn.e11.d() + &(&conn.e11 * &conn.e11)) + &(&conn.e12 * e21)) * C::from(4.0);
    Ok(&(&first + &second) + &third)
}

/// Residual of the chart-change law for the second-order operator: given a
/// quartic coefficient Z̃ in the target chart and the transition jet h, the
/// pushed-forward quartic Z = (Z̃∘h)(h′)⁴ must satisfy
/// d(Z) = d(Z̃)∘h · (h′)² + 2𝒮(h).
pub fn d_transform_check(ztilde: &Jet, h: &Jet) -> Result<f64> {
    let hp = h.d();
    let zcomp = Jet::compose(ztilde, h)?;
    let hp2 = &hp * &hp;
    let hp4 = &hp2 * &hp2;
    let z = &zcomp * &hp4;
    let lhs = d_naive(&z)?;
    let rhs = &(&Jet::compose(&d_naive(ztilde)?, h)? * &hp2) + &(&schwarzian(h)? * C::from(2.0));
    let scale = lhs.max_abs().max(rhs.max_abs()).max(1.0);
    Ok(max_coeff_diff(&lhs, &rhs) / scale)
}

// ---------------------------------------------------------------------------
// Bending inversion and heptactic points
// ---------------------------------------------------------------------------

/// Canonical parameter of the power-law family with the given bending:
/// q = √((5c − 4√(c²−1))/(5c + 4√(c²−1))) with c² = κ, reported as the
/// representative of the orbit {q, 1/q, −q, −1/q} that is > 1 when real.
/// κ ∈ {1, −16/9} belongs to the exceptional families and is rejected.
pub fn r_map(kappa: C) -> Result<C> {
    if (kappa - C::ONE).norm() < 1e-10 || (kappa + C::from(16.0 / 9.0)).norm() < 1e-10 {
        return Err(Error::ExceptionalKappa);
    }
    let c = kappa.sqrt();
    let s = (c * c - C::ONE).sqrt();
    let den = c * 5.0 + s * 4.0;
    if den.norm() <= 1e-14 * (c.norm() + s.norm()) {
        return Err(Error::ZeroDenominator);
    }
    let q = ((c * 5.0 - s * 4.0) / den).sqrt();
    // Orbit representative: largest modulus, then right half-plane, then
    // upper half-plane — deterministic and > 1 for real classes.
    let candidates = [q, q.inv(), -q, -q.inv()];
    let key = |z: &C| (z.norm(), z.re, z.im);
    let mut best = candidates[0];
    for cand in &candidates[1..] {
        let (n0, r0, i0) = key(&best);
        let (n1, r1, i1) = key(cand);
        if (n1, r1, i1) > (n0 + 1e-12, r0, i0)
            || ((n1 - n0).abs() <= 1e-12 && (r1, i1) > (r0, i0))
        {
            best = *cand;
        }
    }
    Ok(best)
}

/// Rectangular search region in the ambient chart.
#[derive(Clone, Copy, Debug)]
pub struct Region {
    pub re: (f64, f64),
    pub im: (f64, f64),
}

impl Region {
    pub fn contains(&self, z: C) -> bool {
        z.re >= self.re.0 && z.re <= self.re.1 && z.im >= self.im.0 && z.im <= self.im.1
    }
}

/// Zeros of the quartic coefficient inside the region, located by Newton
/// iteration seeded on a grid×grid lattice.  Every reported root carries a
/// re-verified residual |δ| < 1e-10; seeds that fail to converge (or
/// converge outside the region) are dropped silently.
pub fn heptactic_points(model: &CurveModel, region: Region, grid: usize) -> Result<Vec<C>> {
    if grid < 2 {
        return Err(Error::Usage("heptactic grid must be at least 2".into()));
    }
    let mut roots: Vec<C> = Vec::new();
    let delta_at = |z: C| -> Option<(C, C)> {
        let s = quartic_delta(model, z, 2).ok()?;
        Some((s.coeff.value(), s.coeff.coeff(1)))
    };
    for i in 0..grid {
        for j in 0..grid {
            let fx = region.re.0
                + (region.re.1 - region.re.0) * (i as f64 + 0.5) / grid as f64;
            let fy = region.im.0
                + (region.im.1 - region.im.0) * (j as f64 + 0.5) / grid as f64;
            let mut z = C::new(fx, fy);
            let mut converged = false;
            for _ in 0..tol::NEWTON_MAX_ITERS {
                let Some((f, fp)) = delta_at(z) else { break };
                if fp.norm() == 0.0 {
                    break;
                }
                let step = f / fp;
                z -= step;
                if !z.re.is_finite() || !z.im.is_finite() {
                    break;
                }
                if step.norm() < tol::NEWTON_STEP * (1.0 + z.norm()) {
                    converged = true;
                    break;
                }
            }
            if !converged || !region.contains(z) {
                continue;
            }
            let Some((f, _)) = delta_at(z) else { continue };
            if f.norm() >= 1e-10 {
                continue;
            }
            if roots.iter().all(|r| (r - z).norm() > 1e-8 * (1.0 + z.norm())) {
                roots.push(z);
            }
        }
    }
    roots.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
    Ok(roots)
}

// ---------------------------------------------------------------------------
// Osculating cycles and contact order
// ---------------------------------------------------------------------------

/// Frame value X = A(z₀) of the reduced frame; the osculating cycle at z₀
/// is the X-image of the standard cycle.
pub fn osculating_cycle(model: &CurveModel, z0: C) -> Result<Mat4> {
    Ok(reduce_frame(model, z0, tol::default_order())?.value())
}

/// The osculating cycle as a germ-backed curve model, parametrized so that
/// it passes through the curve's point at z₀ (the standard cycle's frame at
/// its own origin is the identity, so X·cycle(z − z₀) is the adapted
/// parametrization).
pub fn osculating_cycle_model(model: &CurveModel, z0: C) -> Result<CurveModel> {
    let x = osculating_cycle(model, z0)?;
    Ok(CurveModel::Synthesized(GermEvaluator::new(move |w0, order| {
        let (c1, c2) = CurveModel::StandardCycle.eval(w0 - z0, order)?;
        let rebase = |u: &JVec4| -> JVec4 {
            std::array::from_fn(|i| Jet::new(w0, u[i].coeffs().to_vec()))
        };
        let (r1, r2) = (rebase(&c1), rebase(&c2));
        Ok((apply_const(&x, &r1), apply_const(&x, &r2)))
    })))
}

/// Analytic contact order of the two curves at z₀, capped at `maxk`:
/// the largest k such that the Plücker lifts can be matched to order k by a
/// scalar jet ϱ together with a reparametrization jet ψ of the second curve
/// (the classical unparametrized notion).  The triangular system is solved
/// greedily: at order j the only new unknowns are ϱⱼ and ψⱼ, entering
/// linearly through the lift value and first derivative at z₀, so each step
/// is a 5×2 least-squares solve whose residual decides whether contact
/// extends.  Returns 0 when even the base points fail to match.
pub fn contact_order(a: &CurveModel, b: &CurveModel, z0: C, maxk: usize) -> Result<usize> {
    let order = maxk + 2;
    let (a1, a2) = a.invariant_germ(z0, order)?;
    let (b1, b2) = b.invariant_germ(z0, order)?;
    let la = quadric::plucker_jet_unchecked(&a1, &a2);
    let lb = quadric::plucker_jet_unchecked(&b1, &b2);
    let coeffs = |l: &[Jet; 5], k: usize| -> LiftVec { std::array::from_fn(|i| l[i].coeff(k)) };
    let dot = |x: &LiftVec, y: &LiftVec| -> C {
        x.iter().zip(y.iter()).map(|(u, v)| u * v.conj()).sum()
    };
    let cb0 = coeffs(&lb, 0);
    let cb1 = coeffs(&lb, 1);
    let n0 = dot(&cb0, &cb0).re;
    if n0 == 0.0 {
        return Err(Error::ZeroJet);
    }

    // ψ starts as the identity chart map; ϱ starts as the constant solved
    // at order zero.  Both grow one coefficient per order.
    let mut psi_coeffs = vec![C::ZERO; order + 1];
    psi_coeffs[0] = z0;
    psi_coeffs[1] = C::ONE;
    let mut rho_coeffs = vec![C::ZERO; order + 1];

    let residual_at = |rho_c: &[C], psi_c: &[C], j: usize| -> Result<(LiftVec, f64)> {
        let psi = Jet::new(z0, psi_c.to_vec());
        let rho = Jet::new(z0, rho_c.to_vec());
        let mut r: LiftVec = [C::ZERO; 5];
        let mut scale = 0.0f64;
        for i in 0..5 {
            let m = Jet::compose(&lb[i], &psi)?;
            let matched = &rho * &m;
            r[i] = la[i].coeff(j) - matched.coeff(j);
            scale = scale.max(la[i].max_abs()).max(matched.max_abs());
        }
        Ok((r, scale.max(1e-300)))
    };

    for j in 0..=maxk {
        if j == 0 {
            let ca0 = coeffs(&la, 0);
            rho_coeffs[0] = dot(&ca0, &cb0) / C::from(n0);
            let (r, scale) = residual_at(&rho_coeffs, &psi_coeffs, 0)?;
            let res = r.iter().map(|c| c.norm()).fold(0.0, f64::max);
            if res > tol::CONTACT_REL * scale {
                return Ok(0);
            }
            continue;
        }
        let (r, _) = residual_at(&rho_coeffs, &psi_coeffs, j)?;
        // Columns of the linearized system: ∂/∂ϱⱼ is the lift value, and
        // ∂/∂ψⱼ is ϱ₀ times the lift derivative (only the k = 1 term of the
        // composition reaches ψⱼ at order j).
        let col0 = cb0;
        let col1: LiftVec = std::array::from_fn(|i| rho_coeffs[0] * cb1[i]);
        let g00 = dot(&col0, &col0);
        let g01 = dot(&col1, &col0);
        let g10 = dot(&col0, &col1);
        let g11 = dot(&col1, &col1);
        let b0 = dot(&r, &col0);
        let b1 = dot(&r, &col1);
        let det = g00 * g11 - g01 * g10;
        if det.norm() > 1e-12 * g00.norm() * g11.norm().max(1e-300) {
            rho_coeffs[j] += (b0 * g11 - b1 * g01) / det;
            psi_coeffs[j] += (g00 * b1 - g10 * b0) / det;
        } else {
            // Stationary lift: fall back to the scalar unknown alone.
            rho_coeffs[j] += b0 / g00;
        }
        let (r, scale) = residual_at(&rho_coeffs, &psi_coeffs, j)?;
        let res = r.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if res > tol::CONTACT_REL * scale {
            return Ok(j - 1);
        }
    }
    Ok(maxk)
}

type LiftVec = [C; 5];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::parse_expr;
    use crate::symplin::{embed_sl2, random_symplectic, random_sp_algebra, Mat2, KAPPA2};
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    fn wc(m: i64, n: i64) -> CurveModel {
        CurveModel::WCurve { m, n }
    }

    /// Quartic coefficient of the power-law family in its own chart:
    /// δ = −(9m⁴ − 82m²n² + 9n⁴)/100 · z⁻⁴.
    fn power_quartic(m: f64, n: f64, z: C) -> C {
        let num = 9.0 * m.powi(4) - 82.0 * m * m * n * n + 9.0 * n.powi(4);
        C::from(-num / 100.0) / z.powi(4)
    }

    /// Quadratic coefficient of the power-law family:
    /// 𝔡δ = 2(m² + n²)/5 · z⁻².
    fn power_quadratic(m: f64, n: f64, z: C) -> C {
        C::from(2.0 * (m * m + n * n) / 5.0) / z.powi(2)
    }

    /// Frame A(z) = A₀·exp((z−z₀)N) as a jet matrix.
    fn exp_frame(a0: &Mat4, n: &Mat4, z0: C, order: usize) -> JMat4 {
        let mut coeff = *a0;
        let mut mats: Vec<Mat4> = vec![coeff];
        for k in 1..=order {
            coeff = coeff * n / C::from(k as f64);
            mats.push(coeff);
        }
        std::array::from_fn(|i| {
            std::array::from_fn(|j| Jet::new(z0, mats.iter().map(|m| m[(i, j)]).collect()))
        })
    }

    #[test]
    fn maurer_cartan_of_exponential_frames() {
        let z0 = c(0.3, -0.2);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a0 = random_symplectic(&mut rng, 1.0);
        let n = random_sp_algebra(&mut rng, 1.0);

        // Constant frame: α vanishes identically.
        let constant = FrameJet::new(jmat_constant(&a0, z0, 6)).unwrap();
        let alpha = maurer_cartan(&constant).unwrap();
        assert!(jmat_max_abs(&alpha) < 1e-12);

        // A₀·exp((z−z₀)N): α recovers N, independently of the left factor.
        let frame = FrameJet::new(exp_frame(&a0, &n, z0, 10)).unwrap();
        let alpha = maurer_cartan(&frame).unwrap();
        let nj = jmat_constant(&n, z0, jmat_order(&alpha));
        let diff: f64 = (0..4)
            .flat_map(|i| (0..4).map(move |j| (i, j)))
            .map(|(i, j)| max_coeff_diff(&alpha[i][j], &nj[i][j]))
            .fold(0.0, f64::max);
        assert!(diff < 1e-9, "maurer_cartan drifted from the generator: {diff:.3e}");
    }

    #[test]
    fn frame_validation_rejects_non_symplectic_matrices() {
        let z0 = c(0.1, 0.4);
        let mut m = Mat4::identity();
        m[(0, 0)] = c(2.0, 0.0); // breaks AᵀJA = J
        assert!(matches!(
            FrameJet::new(jmat_constant(&m, z0, 4)),
            Err(Error::NotSymplectic(_))
        ));
    }

    #[test]
    fn reduced_frame_satisfies_the_normal_form() {
        let z0 = c(0.9, 0.4);
        let frame = reduce_frame(&wc(5, 1), z0, 8).unwrap();
        assert_eq!(frame.base(), z0);
        assert!(frame.order() >= 8);
        let alpha = maurer_cartan(&frame).unwrap();
        let rel = normal_form_relative_residual(&alpha);
        assert!(rel < 1e-8, "normal-form residual {rel:.3e}");
        // The six absolute defects at the base point itself stay small too.
        for r in normal_form_residuals(&jmat_truncated(&alpha, 0)) {
            assert!(r < 1e-9 * jmat_max_abs(&alpha).max(1.0));
        }
        // The distinguished entry is a unit at the base point.
        assert!(alpha[3][1].value().norm() > 1e-6);
    }

    #[test]
    fn cycle_reduction_is_canonical() {
        // The standard cycle's reduced frame at the origin is the identity.
        let x = osculating_cycle(&CurveModel::StandardCycle, C::ZERO).unwrap();
        assert!((x - Mat4::identity()).norm() < 1e-10);

        // Cycles have vanishing quartic coefficient, here seen jet-wise.
        let d = quartic_delta(&CurveModel::StandardCycle, c(0.4, -0.1), 4).unwrap();
        assert!(d.coeff.max_abs() < 1e-10);
        let d = quartic_delta(&wc(3, 1), c(0.7, 0.2), 4).unwrap();
        assert!(d.coeff.max_abs() < 1e-10);

        // Bending is undefined on cycles.
        assert!(matches!(
            bending(&CurveModel::StandardCycle, c(0.4, -0.1)),
            Err(Error::CycleCurve)
        ));
        assert!(matches!(bending(&wc(3, 1), c(0.7, 0.2)), Err(Error::CycleCurve)));
    }

    #[test]
    fn gauge_ambiguity_between_two_reductions_is_upper_triangular() {
        let z0 = c(1.1, 0.2);
        let (u1, u2) = wc(5, 1).invariant_germ(z0, 16).unwrap();
        let a = reduce_germ(&u1, &u2).unwrap().frame;

        // Reduce the same germ seen through a symplectic motion, then undo
        // the motion: a second frame of the same curve germ.
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let r = symplin::random_unitary_symplectic(&mut rng, 1.0);
        let b = reduce_germ(&apply_const(&r, &u1), &apply_const(&r, &u2))
            .unwrap()
            .frame;
        let rinv = r.try_inverse().unwrap();
        let b = jmat_mul_const(&rinv, &b);

        // The two frames differ by the image of an upper-triangular
        // unimodular 2×2 matrix under the symmetric-cube embedding.
        let q = jmat_value(&a).try_inverse().unwrap() * jmat_value(&b);
        let qn = q.norm();
        for i in 1..4 {
            assert!(q[(i, 0)].norm() < 1e-8 * qn, "first column not along e₁");
        }
        let b_param = q[(1, 3)] / c(2.0 * KAPPA2, 0.0);
        let a_cube = q[(0, 0)];
        let best = (0..3)
            .map(|k| {
                let rot = C::from_polar(1.0, std::f64::consts::TAU * k as f64 / 3.0);
                let a_param = a_cube.powf(1.0 / 3.0) * rot;
                let x = Mat2::new(a_param, b_param, C::ZERO, a_param.inv());
                (embed_sl2(&x).unwrap() - q).norm()
            })
            .fold(f64::INFINITY, f64::min);
        assert!(best < 1e-8 * qn, "residual gauge not in the reduced group: {best:.3e}");
    }

    #[test]
    fn quartic_differential_matches_the_power_law_families() {
        // Spot value fixed by the family's classical formula.
        let d = quartic_delta(&wc(5, 1), C::ONE, 4).unwrap();
        assert_relative_eq!(d.value().re, -35.84, max_relative = 1e-9);
        assert!(d.value().im.abs() < 1e-9);
        let d = quartic_delta(&wc(5, 3), c(2.0, 0.0), 4).unwrap();
        assert_relative_eq!(d.value().re, 7.56, max_relative = 1e-9);

        // Full jet of the coefficient against the meromorphic power law.
        for (m, n, z0) in [
            (5i64, 1i64, c(0.8, -0.6)),
            (7, 1, c(1.3, 0.2)),
            (3, 2, c(-0.7, 0.9)),
            (5, 3, c(0.6, 0.6)),
        ] {
            let d = quartic_delta(&wc(m, n), z0, 5).unwrap();
            let num = power_quartic(m as f64, n as f64, C::ONE);
            let expected = Jet::variable(z0, d.coeff.order()).powi(-4).unwrap() * num;
            let scale = expected.max_abs();
            assert!(
                max_coeff_diff(&d.coeff, &expected) < 1e-8 * scale,
                "quartic jet mismatch for ({m},{n}) at {z0}"
            );
        }
    }

    #[test]
    fn quadratic_differential_matches_the_power_law_families() {
        let g = quadratic_ddelta(&wc(5, 1), C::ONE).unwrap();
        assert_relative_eq!(g.value().re, 10.4, max_relative = 1e-9);
        assert!(g.value().im.abs() < 1e-9);
        let g = quadratic_ddelta(&wc(5, 3), c(2.0, 0.0)).unwrap();
        assert_relative_eq!(g.value().re, 3.4, max_relative = 1e-9);

        // Full jets, judged per coefficient: extracting log-derivatives of
        // entries whose zeros sit at the working radius (the power families
        // branch at the origin, at distance |z₀| here) has an intrinsic
        // elementwise condition growing roughly one digit per 1.5 indices,
        // so six significant digits per coefficient is the honest bound at
        // these orders; the values above are at 1e-12.
        for (m, n, z0) in [
            (5i64, 1i64, c(0.8, -0.6)),
            (7, 1, c(1.3, 0.2)),
            (3, 2, c(-0.7, 0.9)),
        ] {
            let g = quadratic_ddelta(&wc(m, n), z0).unwrap();
            let num = power_quadratic(m as f64, n as f64, C::ONE);
            let expected = Jet::variable(z0, g.coeff.order()).powi(-2).unwrap() * num;
            for k in 0..=g.coeff.order().min(expected.order()) {
                let diff = (g.coeff.coeff(k) - expected.coeff(k)).norm();
                assert!(
                    diff < 1e-6 * expected.coeff(k).norm(),
                    "quadratic jet mismatch for ({m},{n}) at {z0}, index {k}: rel {:.3e}",
                    diff / expected.coeff(k).norm()
                );
            }
        }
    }

    #[test]
    fn final_gauge_stage_normalizes_the_connection() {
        let z0 = c(0.9, -0.3);
        let frame = reduce_frame(&wc(5, 1), z0, 8).unwrap();
        let (ahat, conn) = z8_reduce(&frame).unwrap();
        assert_eq!(ahat.base(), z0);

        // Normalization conditions: no diagonal term, and the quartic pins
        // the fourth power of the lower connection entry.
        assert!(conn.e11.max_abs() < 1e-8);
        let delta = quartic_delta(&wc(5, 1), z0, 4).unwrap();
        let e21_4 = {
            let sq = &conn.e21 * &conn.e21;
            &sq * &sq
        };
        let pinned = &e21_4 * C::from(6.0f64.powf(4.0 / 3.0));
        assert!(max_coeff_diff(&delta.coeff, &pinned.truncated(delta.coeff.order())) < 1e-8 * delta.coeff.max_abs());

        // The phase convention leaves the pinned entry in the first quadrant.
        let th = conn.e21.value().arg();
        assert!((0.0..std::f64::consts::FRAC_PI_2).contains(&th), "arg η²₁ = {th}");

        // The product of the two off-diagonal entries is the quadratic
        // coefficient (up to the factor 4 of its definition).
        let gamma_val = conn.e21.value() * conn.e12.value() * 4.0;
        let expected = power_quadratic(5.0, 1.0, z0);
        assert!((gamma_val - expected).norm() < 1e-8 * expected.norm());

        // A cycle reaches the final stage only to discover δ = 0.
        let cycle_frame = reduce_frame(&CurveModel::StandardCycle, c(0.5, 0.0), 8).unwrap();
        assert!(matches!(z8_reduce(&cycle_frame), Err(Error::HeptacticPoint)));
    }

    #[test]
    fn invariants_survive_symplectic_motions() {
        let z0 = c(1.2, 0.5);
        let base_d = quartic_delta(&wc(5, 1), z0, 2).unwrap().value();
        let base_g = quadratic_ddelta(&wc(5, 1), z0).unwrap().value();
        let base_k = bending(&wc(5, 1), z0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..3 {
            let x = random_symplectic(&mut rng, 1.0);
            let moved = CurveModel::Goursat { inner: Box::new(wc(5, 1)), x };
            let d = quartic_delta(&moved, z0, 2).unwrap().value();
            let g = quadratic_ddelta(&moved, z0).unwrap().value();
            let k = bending(&moved, z0).unwrap();
            assert!((d - base_d).norm() < 1e-7 * base_d.norm());
            assert!((g - base_g).norm() < 1e-7 * base_g.norm());
            assert!((k - base_k).norm() < 1e-7 * base_k.norm());
        }
    }

    #[test]
    fn naive_operator_reference_values() {
        let z0 = c(0.35, 0.6);
        let z = Jet::variable(z0, 9);
        // Power laws: Z = z^a gives (a(a−1)/2 − 9a²/16)·z⁻².
        let lhs = d_naive(&z.powi(-4).unwrap()).unwrap();
        let expected = z.powi(-2).unwrap();
        assert!(max_coeff_diff(&lhs, &expected.truncated(lhs.order())) < 1e-10 * expected.max_abs());
        let lhs = d_naive(&z.powi(4).unwrap()).unwrap();
        let expected = z.powi(-2).unwrap() * c(-3.0, 0.0);
        assert!(max_coeff_diff(&lhs, &expected.truncated(lhs.order())) < 1e-10 * expected.max_abs());
        // Constants are annihilated.
        let lhs = d_naive(&Jet::constant(z0, c(2.5, -1.0), 9)).unwrap();
        assert!(lhs.max_abs() < 1e-12);
    }

    #[test]
    fn schwarzian_reference_values() {
        let z0 = c(0.4, 0.0);
        let z = Jet::variable(z0, 9);
        // Fractional-linear maps have vanishing Schwarzian.
        let moebius = (&z * c(2.0, 0.0) + Jet::constant(z0, C::ONE, 9))
            .binary(&(&z + &Jet::constant(z0, c(3.0, 0.0), 9)), JetOp::Div)
            .unwrap();
        assert!(schwarzian(&moebius).unwrap().max_abs() < 1e-11);
        // 𝒮(z²) = −3/(2z²) and 𝒮(exp) = −1/2.
        let sq = schwarzian(&(&Jet::variable(C::ONE, 9) * &Jet::variable(C::ONE, 9))).unwrap();
        assert_relative_eq!(sq.value().re, -1.5, max_relative = 1e-12);
        let ex = schwarzian(&Jet::variable(c(0.2, 0.1), 9).exp()).unwrap();
        assert_relative_eq!(ex.value().re, -0.5, max_relative = 1e-12);
        // A critical point of the chart map is rejected.
        let crit = &Jet::variable(C::ZERO, 9) * &Jet::variable(C::ZERO, 9);
        assert!(matches!(schwarzian(&crit), Err(Error::CriticalPoint)));
    }

    #[test]
    fn transform_rule_residual_vanishes() {
        let z0 = c(0.3, -0.4);
        let z = Jet::variable(z0, 12);
        // h is a chart change; Z̃ lives at the image point h(z₀).
        for h in [
            (&z * c(1.0, 0.5) + Jet::constant(z0, c(0.2, 0.0), 12))
                .binary(&(&z * c(0.3, 0.0) + Jet::constant(z0, C::ONE, 12)), JetOp::Div)
                .unwrap(),
            z.exp(),
        ] {
            let w = Jet::variable(h.value(), 12);
            let ztilde = &(&(&w * &w) * c(0.5, 0.2)) + &Jet::constant(h.value(), c(3.0, 1.0), 12);
            let res = d_transform_check(&ztilde, &h).unwrap();
            assert!(res < 1e-9, "transform residual {res:.3e}");
        }
    }

    #[test]
    fn two_path_quadratic_agreement() {
        // The chart operator applied to the quartic coefficient, corrected
        // by the connection term, equals the quadratic coefficient.
        let z0 = c(1.2, -0.4);
        let (delta, gamma, conn) = invariant_jets(&wc(5, 1), z0, 6).unwrap();
        let lhs = &d_naive(&delta).unwrap() + &r_correction(&conn).unwrap();
        let order = lhs.order().min(gamma.order());
        let diff = max_coeff_diff(&lhs.truncated(order), &gamma.truncated(order));
        assert!(diff < 1e-8 * gamma.max_abs().max(1.0), "two-path residual {diff:.3e}");
    }

    #[test]
    fn bending_constants_of_reference_curves() {
        // Power-law families carry constant bending −16(m²+n²)²/(9m⁴−82m²n²+9n⁴).
        let k = bending(&wc(5, 1), c(0.8, 0.1)).unwrap();
        assert!((k - c(-169.0 / 56.0, 0.0)).norm() < 1e-8);
        let k = bending(&wc(7, 1), c(1.1, 0.0)).unwrap();
        assert!((k - c(-25.0 / 11.0, 0.0)).norm() < 1e-8);

        // Prescribed-bending models round-trip through the full reduction.
        for kappa in [c(2.0, 0.0), c(-3.0, 0.0), c(0.5, 1.2)] {
            let k = bending(&CurveModel::ConstantBending { kappa }, c(0.4, 0.2)).unwrap();
            assert!((k - kappa).norm() < 1e-6, "bending {k} vs {kappa}");
        }
        let k = bending(&CurveModel::Exceptional1, c(0.3, -0.2)).unwrap();
        assert!((k - C::ONE).norm() < 1e-6);
    }

    #[test]
    fn bending_inversion_recovers_power_law_classes() {
        for q in [5.0f64, 7.0, 9.0] {
            let q2 = q * q;
            let kappa = c(-16.0 * (1.0 + q2) * (1.0 + q2) / (9.0 * q2 * q2 - 82.0 * q2 + 9.0), 0.0);
            let r = r_map(kappa).unwrap();
            assert!((r - c(q, 0.0)).norm() < 1e-9, "r_map({kappa}) = {r}");
        }
        // Round trip through the computed bending of a reference curve.
        let k = bending(&wc(5, 1), c(0.9, 0.3)).unwrap();
        let r = r_map(k).unwrap();
        assert!((r - c(5.0, 0.0)).norm() < 1e-7);
        // The two excluded bending values are rejected.
        assert!(matches!(r_map(C::ONE), Err(Error::ExceptionalKappa)));
        assert!(matches!(r_map(c(-16.0 / 9.0, 0.0)), Err(Error::ExceptionalKappa)));
    }

    #[test]
    fn heptactic_scan_on_power_curves_is_empty() {
        // δ = const·z⁻⁴ never vanishes, so the Newton sweep returns nothing.
        let region = Region { re: (0.4, 1.6), im: (0.1, 1.2) };
        let roots = heptactic_points(&wc(5, 1), region, 5).unwrap();
        assert!(roots.is_empty(), "unexpected roots {roots:?}");
        assert!(matches!(
            heptactic_points(&wc(5, 1), region, 1),
            Err(Error::Usage(_))
        ));
    }

    #[test]
    fn contact_orders_against_osculating_cycles() {
        let z0 = c(0.9, 0.35);
        // A curve has maximal contact with itself.
        assert_eq!(contact_order(&wc(5, 1), &wc(5, 1), z0, 9).unwrap(), 9);

        // Against its osculating cycle: exactly five at a generic point.
        let osc = osculating_cycle_model(&wc(5, 1), z0).unwrap();
        assert_eq!(contact_order(&wc(5, 1), &osc, z0, 9).unwrap(), 5);

        // A cycle IS its own osculating cycle, under a different
        // parametrization that the contact solve absorbs.
        let cyc = CurveModel::StandardCycle;
        let osc = osculating_cycle_model(&cyc, c(0.3, -0.2)).unwrap();
        assert_eq!(contact_order(&cyc, &osc, c(0.3, -0.2), 8).unwrap(), 8);

        // Curves through different points have no contact at all.
        assert_eq!(contact_order(&wc(5, 1), &wc(7, 1), z0, 6).unwrap(), 0);
    }

    #[test]
    fn reparametrization_covariance_of_the_invariants() {
        let z0 = c(1.1, 0.4);
        // h is fractional-linear, so the chart change is generic but exact.
        let h = parse_expr("(2*z + 1) / (1 - 0.25*z)").unwrap();
        let hj = h.eval(&Jet::variable(z0, 8)).unwrap();
        let (w0, hp) = (hj.value(), hj.coeff(1));

        let pulled = wc(5, 1).reparametrized(&h);
        // Quartic coefficients relate by the fourth power of the derivative.
        let d_pulled = quartic_delta(&pulled, z0, 2).unwrap().value();
        let d_target = quartic_delta(&wc(5, 1), w0, 2).unwrap().value();
        let expected = d_target * hp.powi(4);
        assert!((d_pulled - expected).norm() < 1e-8 * expected.norm());
        // Quadratic coefficients by the square.
        let g_pulled = quadratic_ddelta(&pulled, z0).unwrap().value();
        let g_target = quadratic_ddelta(&wc(5, 1), w0).unwrap().value();
        let expected = g_target * hp.powi(2);
        assert!((g_pulled - expected).norm() < 1e-7 * expected.norm());
        // Bending is a function, invariant under chart changes.
        let k_pulled = bending(&pulled, z0).unwrap();
        let k_target = bending(&wc(5, 1), w0).unwrap();
        assert!((k_pulled - k_target).norm() < 1e-7);

        // Reparametrizing does not change the unparametrized contact count.
        let fix = parse_expr("1.1 + 0.4*i + (z - 1.1 - 0.4*i)/(1 - 0.3*(z - 1.1 - 0.4*i))").unwrap();
        let same = wc(5, 1).reparametrized(&fix);
        assert_eq!(contact_order(&wc(5, 1), &same, z0, 7).unwrap(), 7);
    }

    #[test]
    fn degenerate_points_are_reported() {
        // The power-law germ ramifies at the origin.
        assert!(matches!(
            reduce_frame(&wc(5, 1), C::ZERO, 4),
            Err(Error::BranchPoint { .. })
        ));
        // At a heptactic point (here: on a cycle) the bending is undefined.
        assert!(matches!(
            bending(&CurveModel::StandardCycle, c(0.4, 0.0)),
            Err(Error::CycleCurve)
        ));
    }
}

