//! Central tolerance constants.
//!
//! Every numeric guard in the crate routes through one of these values so
//! that a bound is loosened in exactly one place, with its justification
//! next to it.

/// Components with absolute value at or below this count as zero when
/// classifying null cone membership and invertibility. Products of inputs of
/// magnitude up to 1e6 keep rounding noise well under this bound.
pub const NULL_CONE: f64 = 1e-12;

/// Boundary slack for set membership. Closed sets accept up to `bound + MEMBERSHIP`,
/// strict sets require clearance below `bound - MEMBERSHIP`.
pub const MEMBERSHIP: f64 = 1e-9;

/// Relative error allowed for ring identities (associativity, distributivity)
/// on inputs of moderate magnitude. Each identity evaluates a handful of
/// rounded operations, so a few hundred ulps is already generous.
pub const RING_REL: f64 = 1e-12;

/// Relative error allowed for a canonical -> idempotent -> canonical round
/// trip, measured against the input's sup norm clamped at 1.
pub const ROUND_TRIP_REL: f64 = 1e-14;

/// Agreement required between the linear-programming gauge and the
/// bisection oracle. The oracle brackets to 1e-9, the LP is exact up to
/// pivot noise, so 1e-6 leaves two orders of headroom.
pub const GAUGE_ORACLE: f64 = 1e-6;

/// Agreement required between the ball gauge and an independently computed
/// norm ratio. Both are closed-form, so only summation-order noise remains.
pub const BALL_CLOSED_FORM: f64 = 1e-12;

/// Simplex pivot threshold. Entries at or below this are treated as zero
/// when selecting pivots.
pub const LP_PIVOT: f64 = 1e-11;

/// Additive slack for sampled inequality checks (subadditivity, triangle,
/// homogeneity). Absorbs membership tolerance plus arithmetic rounding.
pub const CHECK_SLACK: f64 = 1e-9;

/// Half-width of the band around unit level excluded when comparing a set
/// against its gauge sublevel sets. Points this close to the boundary are
/// decided by rounding, not by geometry.
pub const SANDWICH_MARGIN: f64 = 1e-7;

/// Norm threshold below which an element counts as zero in the
/// bounded-set-induces-a-norm check.
pub const NORM_KERNEL: f64 = 1e-7;
