//! Interval certainty calculus.
//!
//! Every proposition carries a [`CertaintyInterval`] `[L(A), U(A)]`: the lower
//! bound of its confirmation and the degree to which it has failed to be
//! refuted. The refutation lower bound is recovered as `L(¬A) = 1 - U(A)`.
//!
//! Five triangular norms are available, ordered from the most conservative
//! (`T1`, Łukasiewicz) to the most liberal (`T3`, min). Each family drives four
//! combination operations:
//!
//! - [`antecedent_eval`] conjoins the clauses of a rule premise,
//! - [`detach`] applies a plausible rule's sufficiency and necessity,
//! - [`aggregate`] merges several proof paths for one conclusion,
//! - [`consensus`] fuses independent reports of the same evidence.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest inversion (lower above upper) attributed to floating-point rounding
/// rather than to conflicting evidence.
pub const ROUNDING_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CalculusError {
    #[error("value {value} is outside [0, 1]")]
    Domain { value: f64 },
    #[error("interval lower bound {lower} exceeds upper bound {upper}")]
    Inverted { lower: f64, upper: f64 },
    #[error("{operation} needs at least one operand")]
    Empty { operation: &'static str },
    #[error("conflicting proof paths: aggregated lower bound {lower} exceeds upper bound {upper}")]
    EvidenceConflict { lower: f64, upper: f64 },
    #[error("conflicting sources: consensus lower bound {lower} exceeds upper bound {upper}")]
    SourceConflict { lower: f64, upper: f64 },
}

fn check_unit(value: f64) -> Result<f64, CalculusError> {
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(CalculusError::Domain { value })
    }
}

/// A certainty interval `[lower, upper]` with `0 <= lower <= upper <= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 2]", into = "[f64; 2]")]
pub struct CertaintyInterval {
    lower: f64,
    upper: f64,
}

impl CertaintyInterval {
    /// Total ignorance, `[0, 1]`.
    pub const UNKNOWN: Self = Self { lower: 0.0, upper: 1.0 };
    /// Crisp truth, `[1, 1]`.
    pub const TRUE: Self = Self { lower: 1.0, upper: 1.0 };
    /// Crisp falsity, `[0, 0]`.
    pub const FALSE: Self = Self { lower: 0.0, upper: 0.0 };

    pub fn new(lower: f64, upper: f64) -> Result<Self, CalculusError> {
        check_unit(lower)?;
        check_unit(upper)?;
        if lower > upper {
            return Err(CalculusError::Inverted { lower, upper });
        }
        Ok(Self { lower, upper })
    }

    /// A point-valued belief `[value, value]`.
    pub fn point(value: f64) -> Result<Self, CalculusError> {
        Self::new(value, value)
    }

    /// Builds an interval from bounds that are valid up to rounding error:
    /// both are clamped into `[0, 1]` and an inversion no wider than
    /// [`ROUNDING_SLACK`] collapses onto the lower bound.
    fn settle(lower: f64, upper: f64) -> Option<Self> {
        let lower = lower.clamp(0.0, 1.0);
        let upper = upper.clamp(0.0, 1.0);
        if lower <= upper {
            Some(Self { lower, upper })
        } else if lower - upper <= ROUNDING_SLACK {
            Some(Self { lower, upper: lower })
        } else {
            None
        }
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    /// Interval of the negated proposition, `[1 - U(A), 1 - L(A)]`.
    pub fn complement(&self) -> Self {
        Self {
            lower: 1.0 - self.upper,
            upper: 1.0 - self.lower,
        }
    }

    /// Unallocated belief, `U(A) - L(A)`.
    pub fn ignorance(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn midpoint(&self) -> f64 {
        (self.lower + self.upper) / 2.0
    }

    pub fn is_crisp(&self) -> bool {
        *self == Self::TRUE || *self == Self::FALSE
    }
}

impl Default for CertaintyInterval {
    fn default() -> Self {
        Self::UNKNOWN
    }
}

impl fmt::Display for CertaintyInterval {
    /// Honors the formatter precision, so `{:.4}` yields `[0.8380, 1.0000]`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match f.precision() {
            Some(p) => write!(f, "[{:.*}, {:.*}]", p, self.lower, p, self.upper),
            None => write!(f, "[{}, {}]", self.lower, self.upper),
        }
    }
}

impl TryFrom<[f64; 2]> for CertaintyInterval {
    type Error = CalculusError;

    fn try_from(value: [f64; 2]) -> Result<Self, Self::Error> {
        Self::new(value[0], value[1])
    }
}

impl From<CertaintyInterval> for [f64; 2] {
    fn from(value: CertaintyInterval) -> Self {
        [value.lower, value.upper]
    }
}

/// The five triangular-norm families, from most conservative to most liberal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TNormFamily {
    /// Łukasiewicz: `max(0, a + b - 1)`.
    #[serde(rename = "T1")]
    T1,
    /// Schweizer–Sklar with exponent 0.5.
    #[serde(rename = "T1.5")]
    T1_5,
    /// Product: `ab`.
    #[serde(rename = "T2")]
    T2,
    /// Hamacher product: `(1/a + 1/b - 1)^-1`.
    #[serde(rename = "T2.5")]
    T2_5,
    /// Minimum.
    #[serde(rename = "T3")]
    T3,
}

impl TNormFamily {
    pub const ALL: [TNormFamily; 5] = [
        TNormFamily::T1,
        TNormFamily::T1_5,
        TNormFamily::T2,
        TNormFamily::T2_5,
        TNormFamily::T3,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            TNormFamily::T1 => "T1",
            TNormFamily::T1_5 => "T1.5",
            TNormFamily::T2 => "T2",
            TNormFamily::T2_5 => "T2.5",
            TNormFamily::T3 => "T3",
        }
    }

    /// The more conservative of two families.
    pub fn most_conservative(self, other: TNormFamily) -> TNormFamily {
        self.min(other)
    }

    /// n-ary norm over values already known to lie in `[0, 1]`.
    ///
    /// Ones are dropped first (1 is the identity), so `T(a, 1) = a` holds
    /// exactly. The Schweizer–Sklar members use their closed n-ary form
    /// `max(0, sum(a_i^p) - (n - 1))^(1/p)`, which agrees with the binary fold.
    fn eval(self, values: &[f64]) -> f64 {
        let rest: Vec<f64> = values.iter().copied().filter(|&v| v < 1.0).collect();
        match rest.as_slice() {
            [] => return 1.0,
            [single] => return *single,
            _ => {}
        }
        let it = rest.into_iter();
        match self {
            TNormFamily::T1 => it.reduce(|acc, v| (acc + v - 1.0).max(0.0)).unwrap_or(1.0),
            TNormFamily::T2 => it.product(),
            TNormFamily::T3 => it.fold(1.0, f64::min),
            TNormFamily::T1_5 => {
                let (sum, n) = it.fold((0.0, 0usize), |(s, n), v| (s + v.sqrt(), n + 1));
                let base = sum - (n as f64 - 1.0);
                if base <= 0.0 {
                    0.0
                } else {
                    base * base
                }
            }
            TNormFamily::T2_5 => {
                let mut sum = 0.0;
                let mut n = 0usize;
                for v in it {
                    // Continuous limit: the norm vanishes when any argument does.
                    if v == 0.0 {
                        return 0.0;
                    }
                    sum += 1.0 / v;
                    n += 1;
                }
                1.0 / (sum - (n as f64 - 1.0))
            }
        }
    }
}

impl fmt::Display for TNormFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TNormFamily {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TNormFamily::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| format!("unknown T-norm family `{s}` (expected T1, T1.5, T2, T2.5 or T3)"))
    }
}

/// What to do when a combination yields an inverted interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConflictPolicy {
    /// Report the conflict as an error.
    #[default]
    Strict,
    /// Substitute total ignorance and record a diagnostic.
    Lenient,
}

impl fmt::Display for ConflictPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ConflictPolicy::Strict => "strict",
            ConflictPolicy::Lenient => "lenient",
        })
    }
}

impl FromStr for ConflictPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "strict" => Ok(ConflictPolicy::Strict),
            "lenient" => Ok(ConflictPolicy::Lenient),
            other => Err(format!("unknown conflict policy `{other}` (expected strict or lenient)")),
        }
    }
}

/// Result of a fusing operation. Under the lenient policy an inverted result
/// is replaced by total ignorance and the offending bounds are kept here.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fused {
    pub interval: CertaintyInterval,
    pub conflict: Option<(f64, f64)>,
}

fn checked_values(values: &[f64], operation: &'static str) -> Result<(), CalculusError> {
    if values.is_empty() {
        return Err(CalculusError::Empty { operation });
    }
    values.iter().try_for_each(|&v| check_unit(v).map(|_| ()))
}

/// n-ary T-norm; a singleton returns its element.
pub fn tnorm(family: TNormFamily, values: &[f64]) -> Result<f64, CalculusError> {
    checked_values(values, "tnorm")?;
    Ok(family.eval(values))
}

/// n-ary DeMorgan dual conorm `S(a, ...) = 1 - T(1 - a, ...)`.
pub fn tconorm(family: TNormFamily, values: &[f64]) -> Result<f64, CalculusError> {
    checked_values(values, "tconorm")?;
    if let [single] = values {
        return Ok(*single);
    }
    let flipped: Vec<f64> = values.iter().map(|v| 1.0 - v).collect();
    Ok(1.0 - family.eval(&flipped))
}

pub fn complement(x: CertaintyInterval) -> CertaintyInterval {
    x.complement()
}

pub fn ignorance(x: CertaintyInterval) -> f64 {
    x.ignorance()
}

/// Conjoins premise clauses: `[T(b_1..b_n), T(B_1..B_n)]`.
pub fn antecedent_eval(
    family: TNormFamily,
    clauses: &[CertaintyInterval],
) -> Result<CertaintyInterval, CalculusError> {
    if clauses.is_empty() {
        return Err(CalculusError::Empty { operation: "antecedent evaluation" });
    }
    if let [single] = clauses {
        return Ok(*single);
    }
    let lowers: Vec<f64> = clauses.iter().map(|c| c.lower).collect();
    let uppers: Vec<f64> = clauses.iter().map(|c| c.upper).collect();
    let lower = family.eval(&lowers);
    let upper = family.eval(&uppers);
    Ok(CertaintyInterval::settle(lower, upper).expect("T-norms are monotone"))
}

/// Generalized modus ponens: `[T(s, b), 1 - T(n, 1 - B)]`.
pub fn detach(
    family: TNormFamily,
    sufficiency: f64,
    necessity: f64,
    premise: CertaintyInterval,
) -> Result<CertaintyInterval, CalculusError> {
    check_unit(sufficiency)?;
    check_unit(necessity)?;
    let lower = family.eval(&[sufficiency, premise.lower]);
    let upper = 1.0 - family.eval(&[necessity, 1.0 - premise.upper]);
    Ok(CertaintyInterval::settle(lower, upper).expect("detachment preserves validity"))
}

fn resolve(
    lower: f64,
    upper: f64,
    policy: ConflictPolicy,
    error: fn(f64, f64) -> CalculusError,
) -> Result<Fused, CalculusError> {
    match CertaintyInterval::settle(lower, upper) {
        Some(interval) => Ok(Fused { interval, conflict: None }),
        None => match policy {
            ConflictPolicy::Strict => Err(error(lower, upper)),
            ConflictPolicy::Lenient => Ok(Fused {
                interval: CertaintyInterval::UNKNOWN,
                conflict: Some((lower, upper)),
            }),
        },
    }
}

/// Merges `m` proof paths for one conclusion.
///
/// The lower bound is the conorm of the path lower bounds; the upper bound is
/// `1 - S(1 - C_1, ..., 1 - C_m)`, i.e. the refutation lower bounds are merged
/// by the same conorm. A single path passes through unchanged.
pub fn aggregate(
    family: TNormFamily,
    paths: &[CertaintyInterval],
    policy: ConflictPolicy,
) -> Result<Fused, CalculusError> {
    match paths {
        [] => Err(CalculusError::Empty { operation: "aggregation" }),
        [single] => Ok(Fused { interval: *single, conflict: None }),
        _ => {
            let lowers: Vec<f64> = paths.iter().map(|p| p.lower).collect();
            let refutations: Vec<f64> = paths.iter().map(|p| 1.0 - p.upper).collect();
            let lower = tconorm(family, &lowers)?;
            let upper = 1.0 - tconorm(family, &refutations)?;
            resolve(lower, upper, policy, |lower, upper| CalculusError::EvidenceConflict {
                lower,
                upper,
            })
        }
    }
}

/// Fuses independent reports of the same evidence: `[max L_i, min U_i]`.
pub fn consensus(sources: &[CertaintyInterval], policy: ConflictPolicy) -> Result<Fused, CalculusError> {
    if sources.is_empty() {
        return Err(CalculusError::Empty { operation: "source consensus" });
    }
    let lower = sources.iter().map(|s| s.lower).fold(0.0, f64::max);
    let upper = sources.iter().map(|s| s.upper).fold(1.0, f64::min);
    resolve(lower, upper, policy, |lower, upper| CalculusError::SourceConflict { lower, upper })
}

/// Similarity as the complement of a normalized distance.
pub fn similarity_from_distance(distance: f64) -> Result<f64, CalculusError> {
    Ok(1.0 - check_unit(distance)?)
}

/// Lower bound on `S(A, B)` implied by `S(A, C)` and `S(B, C)` under a
/// T-transitive similarity. `T1` gives the triangle inequality and `T3` the
/// ultrametric one.
pub fn transitivity_bound(family: TNormFamily, s_ac: f64, s_bc: f64) -> Result<f64, CalculusError> {
    tnorm(family, &[s_ac, s_bc])
}
