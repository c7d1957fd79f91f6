//! Curvature-based rejection sampling (CURS) for densities that depend only on
//! the Riemannian distance to a base point.
//!
//! The proposal pretends the manifold has constant curvature `−κ²`, which
//! makes distance and direction independent; a rejection step driven by the
//! true volume density restores the geometry. Supported spaces:
//!
//! * SPD matrices, real (β = 1) and complex (β = 2), with the affine-invariant
//!   metric. β = 4 is available for density and normalizing-constant work.
//! * The unitary group `U(N)` with the trace metric, where sampling is
//!   restricted to the injectivity domain through the cut function.
//!
//! Module map:
//!
//! * [`numkern`]: eigensolver, matrix functions, Pfaffian, special functions.
//! * [`manifold`]: geometry specs, directions, exponential map, distance.
//! * [`radial`]: exact univariate samplers for the distance proposal.
//! * [`engine`]: the rejection samplers and acceptance estimation.
//! * [`theory`]: normalizing constants, acceptance probabilities, the Jacobi
//!   ODE check of the volume densities.
//! * [`stats`], [`validate`]: distribution tests and the validation suites.

pub mod engine;
pub mod manifold;
pub mod numkern;
pub mod radial;
pub mod rng;
pub mod stats;
pub mod theory;
pub mod validate;

pub use engine::{AcceptanceStats, Curs, CursConfig, CursError, SphericalSample, Variant};
pub use manifold::{Beta, Direction, GeometryError, GeometrySpec, Kind, Point};
pub use radial::{RadialError, RadialLaw, RadialProposal, RadialSampler, Shape};
