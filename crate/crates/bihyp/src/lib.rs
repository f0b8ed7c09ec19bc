//! Bihyperbolic numbers and the functional analysis that lives over them.
//!
//! The crate is organized around one idea: in the idempotent basis the
//! four-dimensional ring splits into four independent real lines, so
//! arithmetic, order, norms, convexity and gauges all reduce to four real
//! problems glued together. Modules:
//!
//! * [`algebra`]: the ring, its zero divisors, partial order, sup and inf.
//! * [`linear`]: finite free modules over the ring and their ring-valued norms.
//! * [`sets`]: convex, balanced and absorbing subsets, with randomized
//!   checkers that return replayable witnesses on failure.
//! * [`gauge`]: Minkowski gauges of product sets, by linear programming and
//!   by an independent bisection oracle.
//! * [`seminorm`]: ring-valued seminorms, their axioms, kernels and
//!   separation.
//! * [`metric`]: the translation-invariant metric built from a countable
//!   seminorm family, plus neighborhoods and boundedness probes.
//! * [`verify`]: a registry of named properties with expected verdicts and a
//!   suite runner producing deterministic JSON reports.
//!
//! The algebraic core is generic over [`scalar::Scalar`] (`f32` or `f64`);
//! the concrete aliases below fix `f64`, which everything randomized or
//! serialized uses.

pub mod algebra;
pub mod check;
mod error;
pub mod gauge;
mod geometry;
pub mod linear;
mod lp;
pub mod metric;
pub mod scalar;
pub mod seminorm;
pub mod sets;
pub mod tol;
pub mod verify;

pub use algebra::{Bihyperbolic, CanonicalCoords, OrderRelation};
pub use check::{CheckReport, Verdict, Witness};
pub use error::{Error, Result};
pub use gauge::{GaugeMethod, GaugeResult};
pub use linear::{CanonicalNorm, ComponentNorm, HVector};
pub use metric::{BoundedReport, H2Metric, Neighborhood};
pub use seminorm::Seminorm;
pub use sets::{CheckConfig, H2Set, PredicateRule, RealConvexBody};
pub use verify::{
    registry, run_suite, run_suite_from_path, verify, Instance, PropertySpec, RegistryRow,
    SuiteConfig, SuiteReport, VerifyReport,
};

/// Bihyperbolic number over `f64`, the working precision of the toolkit.
pub type Bih = Bihyperbolic<f64>;
/// Bihyperbolic number over `f32`.
pub type Bih32 = Bihyperbolic<f32>;
/// Canonical coefficients over `f64`.
pub type Canonical = CanonicalCoords<f64>;
/// Module element over `f64`.
pub type HVec = HVector<f64>;
/// Module element over `f32`.
pub type HVec32 = HVector<f32>;
