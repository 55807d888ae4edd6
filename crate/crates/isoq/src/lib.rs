//! # isoq
//!
//! Conformal geometry of isotropic curves in the complex 3-quadric Q₃.
//!
//! An isotropic curve is a holomorphic map into Q₃ (the space of Lagrangian
//! 2-planes of symplectic ℂ⁴) whose derivative is null for the conformal
//! structure of the quadric. This crate computes their conformal invariants —
//! the quartic differential δ, the quadratic differential 𝔡δ, the bending
//! κ = (𝔡δ)²/δ, osculating cycles and contact orders — synthesizes curves
//! from prescribed invariants by Maurer–Cartan integration, applies Goursat
//! and fourth-order deformations, and exports meshes of the seven classes of
//! tamed surfaces (minimal in R³, maximal in R^{1,2}, CMC-1 in H³ and H^{1,2},
//! flat fronts in H³ and H^{1,2}, superminimal in S⁴).
//!
//! Module map:
//! - [`jets`]: truncated complex power series — the numeric substrate.
//! - [`symplin`]: Sp(2,ℂ), its 5-dimensional representation, the spin cover,
//!   and the symmetric-cube embedding of SL(2,ℂ).
//! - [`quadric`]: the quadric, Plücker coordinates, conformal/contact charts,
//!   and projections to the spaceforms (including the twistor map to S⁴).
//! - [`curves`]: curve descriptors, evaluators, the Legendre associate, and a
//!   small expression parser for meromorphic potentials.
//! - [`frames`]: moving-frame reduction, δ, 𝔡δ, bending, heptactic points,
//!   osculating cycles, contact order.
//! - [`synthesis`]: holomorphic Maurer–Cartan integration and construction of
//!   curves with prescribed (δ, 𝔡δ).
//! - [`deformation`]: Goursat transforms, Bonnet/Thomsen families, and the
//!   fourth-order deformation with numerical verification.
//! - [`surfaces`]: tamed-surface meshes, end detection, curvature reports,
//!   OBJ/PLY export.
//! - [`cli`]: command-line front end.
//! - [`selftest`]: the acceptance checks run by `isoq selftest`.

pub mod cli;
pub mod curves;
pub mod deformation;
pub mod error;
pub mod frames;
pub mod jets;
pub mod quadric;
pub mod selftest;
pub mod surfaces;
pub mod symplin;
pub mod synthesis;
pub mod tol;

pub use error::{Error, Result};
