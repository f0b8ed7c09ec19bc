//! Shared plumbing for randomized property checks.
//!
//! Every checker reports a [`CheckReport`]: a verdict, the number of trials
//! actually executed, the seed, and on failure a [`Witness`] holding enough
//! data to replay the violation without rerunning the search. Randomness is
//! drawn from per-trial ChaCha streams derived from `(seed, stream, trial)`,
//! so reports are reproducible and trials are order-independent.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::Bihyperbolic;
use crate::linear::HVector;
use crate::Bih;
use crate::HVec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// Established structurally, no sampling involved.
    CertifiedPass,
    /// Survived every sampled trial.
    SampledPass,
    Fail,
}

impl Verdict {
    pub fn passed(self) -> bool {
        self != Verdict::Fail
    }
}

/// Replayable evidence of a violated property.
///
/// Each variant carries the inputs of the violated condition; scalars and
/// points are stored outright so the violation can be reverified against the
/// instance without any randomness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// `x` and `y` lie in the set, `lambda` is between zero and one, yet the
    /// combination `point` escaped.
    Combination { lambda: Bih, x: HVec, y: HVec, point: HVec },
    /// `x` lies in the set, `lambda` has modulus at most one (or is an
    /// idempotent), yet `image = lambda x` escaped.
    Scaling { lambda: Bih, x: HVec, image: HVec },
    /// Membership of `x` disagrees with the conjunction of its
    /// component-slice memberships; `member` is the whole-set side.
    Decomposition { x: HVec, member: bool },
    /// At the deepest shrink level `epsilon`, the sampled `scalar` between
    /// zero and `epsilon` pushed `probe` out of the set.
    Absorbing { probe: HVec, epsilon: f64, scalar: Bih, image: HVec },
    /// A sum of member slices over the listed idempotent indices escaped
    /// the set that was supposed to absorb it.
    PairSum { point: HVec, indices: Vec<usize> },
    /// One point told apart two sets that were claimed equal.
    SetEquality { point: HVec, left_member: bool, right_member: bool },
    /// A named law failed on concrete inputs; `lhs`/`rhs` are the two sides
    /// as evaluated.
    Law {
        law: String,
        x: HVec,
        #[serde(skip_serializing_if = "Option::is_none")]
        y: Option<HVec>,
        #[serde(skip_serializing_if = "Option::is_none")]
        z: Option<HVec>,
        #[serde(skip_serializing_if = "Option::is_none")]
        lambda: Option<Bih>,
        lhs: Bih,
        rhs: Bih,
    },
    /// Every seminorm in the family vanished on this nonzero probe.
    Separation { probe: HVec },
    /// A member of the set stayed outside `lambda` times the neighborhood at
    /// the final scale of the search.
    Unbounded { point: HVec, lambda: f64 },
}

/// Outcome of one randomized check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub verdict: Verdict,
    /// Trials actually executed; zero for certified passes.
    pub trials: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    pub seed: u64,
}

impl CheckReport {
    pub fn certified(seed: u64) -> Self {
        CheckReport { verdict: Verdict::CertifiedPass, trials: 0, witness: None, seed }
    }

    pub fn sampled(trials: u64, seed: u64) -> Self {
        CheckReport { verdict: Verdict::SampledPass, trials, witness: None, seed }
    }

    pub fn fail(trials: u64, seed: u64, witness: Witness) -> Self {
        CheckReport { verdict: Verdict::Fail, trials, witness: Some(witness), seed }
    }
}

// Stream identifiers keep unrelated checkers off each other's random
// sequences even under a shared seed.
pub(crate) mod streams {
    pub const CONVEX: u64 = 1;
    pub const BALANCED: u64 = 2;
    pub const ABSORB: u64 = 3;
    pub const DECOMP: u64 = 4;
    pub const STABILITY: u64 = 5;
    pub const MINKOWSKI: u64 = 6;
    pub const SCALING_EQ: u64 = 7;
    pub const SEMINORM: u64 = 8;
    pub const KERNEL: u64 = 9;
    pub const SEPARATED: u64 = 10;
    pub const METRIC: u64 = 11;
    pub const BOUNDED: u64 = 12;
    pub const GAUGE: u64 = 13;
    pub const SANDWICH: u64 = 14;
}

/// Independent generator for one trial of one checker.
pub(crate) fn stream_rng(seed: u64, stream: u64, trial: u64) -> ChaCha8Rng {
    let mut s = seed
        ^ stream.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ trial.wrapping_add(1).wrapping_mul(0xD1B5_4A32_D192_ED03);
    s ^= s >> 30;
    s = s.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    s ^= s >> 27;
    s = s.wrapping_mul(0x94D0_49BB_1331_11EB);
    s ^= s >> 31;
    ChaCha8Rng::seed_from_u64(s)
}

/// All sixteen 0/1 coordinate patterns: zero, one, the idempotents and all
/// their partial sums. These are the interesting degenerate scalars for
/// convexity checks and go through before any random draw.
pub(crate) fn zero_one_patterns() -> Vec<Bih> {
    (0..16u8)
        .map(|mask| {
            Bihyperbolic::from_parts(std::array::from_fn(|i| {
                if mask & (1 << i) != 0 {
                    1.0
                } else {
                    0.0
                }
            }))
        })
        .collect()
}

/// All eighty-one scalars with coordinates in `{-1, 0, 1}`: the boundary and
/// null cone cases for modulus-at-most-one scaling.
pub(crate) fn sign_patterns() -> Vec<Bih> {
    (0..81u8)
        .map(|mut code| {
            Bihyperbolic::from_parts(std::array::from_fn(|_| {
                let digit = code % 3;
                code /= 3;
                f64::from(digit) - 1.0
            }))
        })
        .collect()
}

pub(crate) fn random_unit_interval(rng: &mut ChaCha8Rng) -> Bih {
    Bihyperbolic::from_parts(std::array::from_fn(|_| rng.gen_range(0.0..=1.0)))
}

pub(crate) fn random_unit_modulus(rng: &mut ChaCha8Rng) -> Bih {
    Bihyperbolic::from_parts(std::array::from_fn(|_| rng.gen_range(-1.0..=1.0)))
}

/// Uniform point in the coordinate box of half-width `h`.
pub(crate) fn random_box_vector(rng: &mut ChaCha8Rng, dim: usize, h: f64) -> HVec {
    let comps = std::array::from_fn(|_| (0..dim).map(|_| rng.gen_range(-h..=h)).collect());
    HVector::new(comps).expect("finite box sample")
}
