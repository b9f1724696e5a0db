//! Numerics for weak values and the geometric phases hiding in their arguments.
//!
//! The crate is organised bottom-up:
//!
//! * [`linalg`] — small dense complex kets and operators, Haar sampling.
//! * [`weak`] — weak values, their polar form and the expectation/decomposition identities.
//! * [`geometry`] — Bargmann invariants, ray-space geodesics and polyline (Pancharatnam) phases.
//! * [`sic`] — SIC-POVM sets for d = 2, 3 (or any user fiducial), triple phases and purity checks.
//! * [`pointer`] — exact von Neumann pointer model and a shot-based strong–weak–strong protocol.
//!
//! Inner products are conjugate-linear in the first slot throughout: `inner(a, b) = ⟨a|b⟩`.

pub mod angle;
pub mod error;
pub mod geometry;
pub mod io;
pub mod linalg;
pub mod pointer;
pub mod sic;
pub mod weak;

pub use num_complex::Complex64 as Complex;

pub use error::{Error, Result};
pub use geometry::{BargmannInvariant, GeodesicPath};
pub use linalg::{HermitianOperator, Ket, Projector};
pub use pointer::{Grid, PointerState, ProtocolConfig, ProtocolEstimate};
pub use sic::{ExpansionCoefficients, SicSet, SicSource, TriplePhaseTable};
pub use weak::{ActionDecomposition, WeakValueResult};

/// Tolerance for identities that are exact in exact arithmetic.
pub const EXACT_TOL: f64 = 1e-12;

/// Default floor on the post-selection probability `|⟨post|pre⟩|²`.
pub const DEFAULT_OVERLAP_FLOOR: f64 = 1e-12;

/// Clustering tolerance on `cos θ` used by the triple-phase census.
pub const CENSUS_TOL: f64 = 1e-8;
