//! # Error taxonomy
//!
//! One crate-wide error enum. Variants name the geometric or numeric
//! condition that stopped a computation; call sites near the boundary (CLI,
//! FFI) map them onto exit codes / error codes.

use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    // ---- jets ----------------------------------------------------------
    #[error("jet base points differ: {0} vs {1}")]
    BaseMismatch(Complex64, Complex64),
    #[error("division by a jet that is zero to working order")]
    DivisionByIdenticallyZero,
    #[error("quotient would have a pole of order {0} (negative valuation)")]
    LaurentQuotient(usize),
    #[error("derivative order {requested} exceeds jet order {order}")]
    OrderExhausted { requested: usize, order: usize },
    #[error("jet is zero to working order")]
    ZeroJet,
    #[error("branch point at the base: constant term vanishes under a non-integer power")]
    BranchPointAtBase,

    // ---- symplin -------------------------------------------------------
    #[error("matrix is not in the required span (residual {0:.3e})")]
    NotInSpan(f64),
    #[error("matrix is not symplectic (residual {0:.3e})")]
    NotSymplectic(f64),
    #[error("matrix is not unimodular (|det| deviation {0:.3e})")]
    NotUnimodular(f64),

    // ---- quadric -------------------------------------------------------
    #[error("plane is not Lagrangian (|ω(u1,u2)| = {0:.3e})")]
    NotLagrangian(f64),
    #[error("point lies on the hyperplane section {section} (chart undefined there)")]
    OnHyperplaneSection { section: char },
    #[error("point lies on the contact-chart quadric ξ¹ξ³−ξ²ξ⁴ = 0")]
    OnQuadric,
    #[error("linear solve degenerate: expected nullity {expected}, found {found}")]
    DegenerateSolve { expected: usize, found: usize },

    // ---- curves --------------------------------------------------------
    #[error("curve has a pole at the requested point")]
    PoleAtPoint,
    #[error("curve has a branch point at the requested point")]
    BranchPointAtPoint,
    #[error("lift is not Legendre (contact residual {0:.3e})")]
    NotLegendre(f64),
    #[error("both diagonal entries of ṁ vanish at the point; associate undefined")]
    BothDiagonalEntriesVanish,
    #[error("syntax error at offset {offset}: {message}")]
    SyntaxError { offset: usize, message: String },
    #[error("invalid curve parameters: {0}")]
    InvalidModel(String),

    // ---- frames --------------------------------------------------------
    #[error("frame matrix is singular at the base point")]
    SingularFrame,
    #[error("curve branch point at the base (ramification k1 = {k1})")]
    BranchPoint { k1: usize },
    #[error("associate-curve branch point at the base (k2 = {k2})")]
    AssociateBranchPoint { k2: usize },
    #[error("gauge solve failed: {0}")]
    GaugeSolveFailed(String),
    #[error("heptactic point: the quartic differential vanishes at the base")]
    HeptacticPoint,
    #[error("curve is a conformal cycle: δ ≡ 0, invariant undefined")]
    CycleCurve,
    #[error("exceptional bending value κ ∈ {{1, -16/9}}")]
    ExceptionalKappa,
    #[error("denominator vanishes at the base point")]
    ZeroDenominator,
    #[error("critical point: h'(base) = 0")]
    CriticalPoint,

    // ---- synthesis -----------------------------------------------------
    #[error("coefficient singularity on the integration path near {0}")]
    SingularityOnPath(Complex64),
    #[error("step size underflow at {at} (local error {err:.3e})")]
    StepUnderflow { at: Complex64, err: f64 },
    #[error("prescribed quartic coefficient D vanishes on the working region")]
    DVanishes,

    // ---- deformation ---------------------------------------------------
    #[error("no reduced frame available at the requested point: {0}")]
    FrameUnavailable(String),

    // ---- surfaces ------------------------------------------------------
    #[error("point is an end of the {kind} surface (chart denominator below threshold)")]
    AtEnd { kind: &'static str },
    #[error("Jacobian numerically singular at the sample (front singular point)")]
    SingularJacobian,

    // ---- cli / io ------------------------------------------------------
    #[error("descriptor error at {pointer}: {message}")]
    SchemaError { pointer: String, message: String },
    #[error("I/O error: {0}")]
    IoError(String),
    #[error("invalid usage: {0}")]
    Usage(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::IoError(e.to_string())
    }
}
