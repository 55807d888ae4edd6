//! # Numerical tolerance policy
//!
//! Every threshold used by the crate lives here, with its rationale. The
//! values fall into tiers reflecting how much arithmetic sits between the
//! input and the guarded quantity.

/// Relative threshold below which a jet coefficient counts as zero during
/// valuation stripping, measured against the largest coefficient magnitude
/// of the jet. Double precision leaves ~1e-16 per flop; a few dozen flops of
/// Cauchy products raise the noise floor to ~1e-13.
pub const ZERO_COEFF_REL: f64 = 1e-13;

/// Group-membership gates (symplectic, unimodular, Lagrangian, span tests)
/// on max-norm residuals. Inputs typically come out of jet evaluations or
/// integration steps carrying ~1e-12 noise.
pub const GROUP_GATE: f64 = 1e-9;

/// Residual allowed on exactly-representable linear algebra: basis
/// decompositions, Gram-matrix cross-checks, round trips without
/// cancellation-prone division chains.
pub const EXACT_LINEAR: f64 = 1e-10;

/// Coefficientwise residual for the six Pfaffian normal-form relations a
/// reduced frame must satisfy; the reduction divides by derivative leading
/// terms, so demands sit above the raw jet noise floor.
pub const PFAFFIAN_RESIDUAL: f64 = 1e-9;

/// Isotropy gate: relative size of det ṁ coefficients along a curve germ.
pub const ISOTROPY_REL: f64 = 1e-9;

/// Chart-denominator threshold classifying a point as an end (relative to
/// the norm of the ambient quintuple or lift).
pub const END_DETECT: f64 = 1e-8;

/// Local truncation error target for the adaptive Taylor integrator; steps
/// are halved until the last retained coefficient's contribution drops
/// below this.
pub const ODE_LOCAL_ERR: f64 = 1e-11;

/// Symplectic residual allowed to accumulate over a whole integration path.
pub const ODE_GROUP_DRIFT: f64 = 1e-9;

/// Newton refinement for root finding: convergence threshold on |step|.
pub const NEWTON_STEP: f64 = 1e-12;

/// Maximum Newton iterations for heptactic-point refinement.
pub const NEWTON_MAX_ITERS: usize = 30;

/// Agreement tolerance for invariant comparisons in equivalence tests
/// (relative, at sample points).
pub const EQUIV_REL: f64 = 1e-6;

/// Contact-order solves: residual below which the triangular jet system at
/// order k counts as satisfied (relative to the lift magnitudes).
pub const CONTACT_REL: f64 = 1e-7;

/// Guard orders added to internal jet evaluations so that the order
/// requested by the caller survives the derivative-consuming reduction
/// chain (two derivatives in the frame reduction, two more in the
/// projective-structure operator, plus stripping).
pub const GUARD_ORDER: usize = 10;

/// Default jet truncation order for user-facing operations. Raised via the
/// ISOQ_JET_ORDER environment variable or per-call parameters.
pub const DEFAULT_ORDER: usize = 10;

/// Returns the default jet order, honoring the ISOQ_JET_ORDER override.
pub fn default_order() -> usize {
    std::env::var("ISOQ_JET_ORDER")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&n| (1..=64).contains(&n))
        .unwrap_or(DEFAULT_ORDER)
}
