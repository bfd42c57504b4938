//! Solutions of `−Δv = γ·1_{Ω∖A} − (1−γ)·1_A` with zero Dirichlet data, and the
//! question of where (and whether) they change sign.
//!
//! The library has two computational backbones and a layer of closed-form
//! evaluators on top of them:
//!
//! * [`radial`] — exact piecewise closed-form solutions of the radially
//!   symmetric problem in any dimension `m ≥ 2`, including the critical
//!   radius `r_c ≈ 0.432067` of the unit disk at `γ = 1/2`.
//! * [`fdpoisson`] — a second-order Shortley–Weller finite-difference solver
//!   for irregular planar domains (disks, annuli, triangles, sectors,
//!   polygons, unions of disks) with torsion functions, discrete Green
//!   columns, essential infima, and the bottom Dirichlet eigenvalue.
//! * [`greens`] — half-space and ball-center kernels, infinite-wedge torsion,
//!   and the sector torsion series.
//! * [`rearrange`] — Schwarz rearrangement of grid sets and the Talenti
//!   comparison against the exact radial solution.
//! * [`bounds`] — every explicit constant and threshold used by the estimates
//!   (Kohler-Jobin constant, ball bounds on the critical mass, torsion
//!   `L^∞` bounds, integral thresholds).
//! * [`shapeopt`] — bathtub fills, the alternating argmin/bathtub scheme that
//!   minimizes the essential infimum over source sets of prescribed mass,
//!   and the bisection estimate of the critical mass `ℭ₋(Ω,γ)`.
//!
//! The `poisson-sign` binary exposes the same functionality behind a
//! config-file driven CLI (see [`cli`]); the `examples/` directory holds one
//! runnable example per capability.

pub mod bounds;
pub mod cli;
pub mod config;
mod error;
pub mod fdpoisson;
pub mod geometry;
pub mod greens;
pub mod io;
pub mod radial;
pub mod rearrange;
pub mod shapeopt;
pub mod specfn;

pub use error::{Error, Result};
