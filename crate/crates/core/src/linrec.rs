//! Linear recurrent sequences with nonnegative coefficients, their cyclic
//! rotations, and certified lower bounds on their growth.
//!
//! All sequences are indexed from 0. A recurrence of order `k` takes its
//! first `k` terms from the initial list and computes every later term as
//!
//! ```text
//! a(n) = b_1 a(n-1) + b_2 a(n-2) + ... + b_k a(n-k)
//! ```
//!
//! The `r`-th rotation keeps the same initial terms but attaches each `b_i`
//! to a different lag: lag `i - r` when `i > r`, lag `k + i - r` otherwise.

use num_bigint::BigUint;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bigjson;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InvalidRecurrence {
    #[error("order k must be at least 1")]
    ZeroOrder,
    #[error("coeffs has {got} entries but k = {k}")]
    CoeffCount { k: usize, got: usize },
    #[error("initial has {got} entries but k = {k}")]
    InitialCount { k: usize, got: usize },
    #[error("coefficients sum to {sum}, but the sum must be at least 2")]
    CoeffSumTooSmall { sum: u128 },
    #[error("initial term a_{index} is 0, but initial terms must be positive")]
    NonPositiveInitial { index: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("rotation index {r} is out of range for order {k}")]
pub struct RotationOutOfRange {
    pub r: usize,
    pub k: usize,
}

/// A positive integer sequence `a_0, a_1, ...` defined by a linear
/// recurrence with nonnegative coefficients summing to at least 2.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawLinearRecurrence", into = "RawLinearRecurrence")]
pub struct LinearRecurrence {
    coeffs: Vec<u64>,
    initial: Vec<BigUint>,
}

/// Wire form of [`LinearRecurrence`]: `{"k": .., "coeffs": [..], "initial": [..]}`.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLinearRecurrence {
    k: usize,
    coeffs: Vec<u64>,
    #[serde(with = "bigjson::uint_vec")]
    initial: Vec<BigUint>,
}

impl TryFrom<RawLinearRecurrence> for LinearRecurrence {
    type Error = InvalidRecurrence;

    fn try_from(raw: RawLinearRecurrence) -> Result<Self, Self::Error> {
        if raw.k != raw.coeffs.len() {
            return Err(InvalidRecurrence::CoeffCount {
                k: raw.k,
                got: raw.coeffs.len(),
            });
        }
        if raw.k != raw.initial.len() {
            return Err(InvalidRecurrence::InitialCount {
                k: raw.k,
                got: raw.initial.len(),
            });
        }
        LinearRecurrence::new(raw.coeffs, raw.initial)
    }
}

impl From<LinearRecurrence> for RawLinearRecurrence {
    fn from(rec: LinearRecurrence) -> Self {
        RawLinearRecurrence {
            k: rec.order(),
            coeffs: rec.coeffs,
            initial: rec.initial,
        }
    }
}

impl LinearRecurrence {
    /// Builds a recurrence of order `coeffs.len()`; `coeffs[i - 1]` is `b_i`.
    pub fn new(coeffs: Vec<u64>, initial: Vec<BigUint>) -> Result<Self, InvalidRecurrence> {
        let k = coeffs.len();
        if k == 0 {
            return Err(InvalidRecurrence::ZeroOrder);
        }
        if initial.len() != k {
            return Err(InvalidRecurrence::InitialCount {
                k,
                got: initial.len(),
            });
        }
        let sum = coeffs
            .iter()
            .fold(0u128, |acc, &b| acc.saturating_add(u128::from(b)));
        if sum < 2 {
            return Err(InvalidRecurrence::CoeffSumTooSmall { sum });
        }
        if let Some(index) = initial.iter().position(Zero::is_zero) {
            return Err(InvalidRecurrence::NonPositiveInitial { index });
        }
        Ok(LinearRecurrence { coeffs, initial })
    }

    /// Convenience constructor for small initial terms.
    pub fn from_u64(coeffs: &[u64], initial: &[u64]) -> Result<Self, InvalidRecurrence> {
        Self::new(
            coeffs.to_vec(),
            initial.iter().map(|&v| BigUint::from(v)).collect(),
        )
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn rotate(&self, r: usize) -> Result<RotatedRecurrence, RotationOutOfRange> {
        let k = self.order();
        if r >= k {
            return Err(RotationOutOfRange { r, k });
        }
        let lag_coeffs = (1..=k).map(|lag| rotated_coeff(&self.coeffs, r, lag)).collect();
        Ok(RotatedRecurrence {
            base: self.clone(),
            r,
            lag_coeffs,
        })
    }

    /// All `k` rotations, in order `r = 0, 1, ..., k - 1`.
    pub fn rotations(&self) -> Vec<RotatedRecurrence> {
        (0..self.order())
            .map(|r| self.rotate(r).expect("r < k"))
            .collect()
    }
}

// Coefficient at `lag` in rotation `r`: b_{lag+r} if lag + r <= k, else b_{lag+r-k}.
fn rotated_coeff(coeffs: &[u64], r: usize, lag: usize) -> u64 {
    let k = coeffs.len();
    let i = if lag + r <= k { lag + r } else { lag + r - k };
    coeffs[i - 1]
}

/// The `r`-th cyclic rotation of a [`LinearRecurrence`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RotatedRecurrence {
    base: LinearRecurrence,
    r: usize,
    lag_coeffs: Vec<u64>,
}

/// One coefficient of the base recurrence and the lag it acts at after rotation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EffectiveLag {
    /// 1-based index `i` of `b_i` in the base recurrence.
    pub index: usize,
    pub coeff: u64,
    pub lag: usize,
}

impl RotatedRecurrence {
    pub fn base(&self) -> &LinearRecurrence {
        &self.base
    }

    pub fn r(&self) -> usize {
        self.r
    }

    /// Lag that `b_index` acts at in this rotation.
    pub fn lag_of(&self, index: usize) -> usize {
        let k = self.base.order();
        assert!((1..=k).contains(&index), "coefficient index out of range");
        if index > self.r {
            index - self.r
        } else {
            k + index - self.r
        }
    }

    pub fn effective_lags(&self) -> Vec<EffectiveLag> {
        (1..=self.base.order())
            .map(|index| EffectiveLag {
                index,
                coeff: self.base.coeffs[index - 1],
                lag: self.lag_of(index),
            })
            .collect()
    }

    /// The next rotation, wrapping from `k - 1` back to 0.
    pub fn step(&self) -> RotatedRecurrence {
        self.base
            .rotate((self.r + 1) % self.base.order())
            .expect("wrapped index is in range")
    }
}

/// Shared evaluation interface for plain and rotated recurrences.
pub trait Recurrence {
    fn order(&self) -> usize;

    fn initial(&self) -> &[BigUint];

    /// Coefficient multiplying `a(n - lag)`, for `1 <= lag <= order()`.
    fn coeff_at_lag(&self, lag: usize) -> u64;

    fn terms(&self) -> Terms {
        Terms::new(self)
    }

    /// The first `n_terms` terms `a_0 .. a_{n_terms - 1}`.
    fn prefix(&self, n_terms: usize) -> Vec<BigUint> {
        let mut t = self.terms();
        t.extend_to(n_terms);
        let mut values = t.into_values();
        values.truncate(n_terms);
        values
    }
}

impl Recurrence for LinearRecurrence {
    fn order(&self) -> usize {
        self.coeffs.len()
    }

    fn initial(&self) -> &[BigUint] {
        &self.initial
    }

    fn coeff_at_lag(&self, lag: usize) -> u64 {
        self.coeffs[lag - 1]
    }
}

impl Recurrence for RotatedRecurrence {
    fn order(&self) -> usize {
        self.base.order()
    }

    fn initial(&self) -> &[BigUint] {
        &self.base.initial
    }

    fn coeff_at_lag(&self, lag: usize) -> u64 {
        self.lag_coeffs[lag - 1]
    }
}

/// Growable left-to-right table of sequence terms.
#[derive(Debug, Clone)]
pub struct Terms {
    active: Vec<(usize, u64)>,
    values: Vec<BigUint>,
    next: usize,
}

impl Terms {
    fn new<R: Recurrence + ?Sized>(rec: &R) -> Self {
        let active = (1..=rec.order())
            .map(|lag| (lag, rec.coeff_at_lag(lag)))
            .filter(|&(_, c)| c != 0)
            .collect();
        Terms {
            active,
            values: rec.initial().to_vec(),
            next: 0,
        }
    }

    /// Makes sure at least `len` terms are materialized.
    pub fn extend_to(&mut self, len: usize) {
        while self.values.len() < len {
            let n = self.values.len();
            let mut acc = BigUint::zero();
            for &(lag, c) in &self.active {
                acc += &self.values[n - lag] * c;
            }
            self.values.push(acc);
        }
    }

    /// Term `a_n`, computing it if needed.
    pub fn get(&mut self, n: usize) -> &BigUint {
        self.extend_to(n + 1);
        &self.values[n]
    }

    pub fn values(&self) -> &[BigUint] {
        &self.values
    }

    pub fn into_values(self) -> Vec<BigUint> {
        self.values
    }
}

impl Iterator for Terms {
    type Item = BigUint;

    fn next(&mut self) -> Option<BigUint> {
        let n = self.next;
        self.next += 1;
        Some(self.get(n).clone())
    }
}

/// The linear lower bound `2 (m + 1) k` that `a_{m-1}` must reach.
pub fn growth_bound(k: usize, m: usize) -> BigUint {
    BigUint::from(k) * BigUint::from(m + 1) * 2u32
}

/// Proof that `a_{m-1} >= 2 (m + 1) k` for every `m >= m0`.
///
/// Terms with `m - 1 <= checked_index` were compared directly. Beyond that,
/// the window minimum `L(n) = min(a_n, ..., a_{n-k+1})` never decreases and
/// at least doubles every `k` steps, so `window_min >= 2 (checked_index + k + 2) k`
/// carries the bound to every later index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GrowthCertificate {
    pub k: usize,
    pub m0: usize,
    pub checked_index: usize,
    #[serde(with = "bigjson::uint")]
    pub window_min: BigUint,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GrowthFailure {
    #[error("growth certificates start at m0 >= 1")]
    ZeroStart,
    #[error("a_{} = {value} is below the bound 2(m+1)k = {bound} at m = {m}", .m - 1)]
    Violated {
        m: usize,
        value: BigUint,
        bound: BigUint,
    },
}

/// Certifies `a_{m-1} >= 2 (m + 1) k` for all `m >= m0`, or reports the first
/// `m >= m0` where it fails.
pub fn growth_certificate<R: Recurrence + ?Sized>(
    rec: &R,
    m0: usize,
) -> Result<GrowthCertificate, GrowthFailure> {
    if m0 == 0 {
        return Err(GrowthFailure::ZeroStart);
    }
    let k = rec.order();
    let mut terms = rec.terms();

    // First index t >= k - 1 whose window minimum clears 2 (t + k + 2) k.
    let mut t = k - 1;
    let window_min = loop {
        terms.extend_to(t + 1);
        let min = terms.values()[t + 1 - k..=t]
            .iter()
            .min()
            .expect("k >= 1")
            .clone();
        if min >= growth_bound(k, t + k + 1) {
            break min;
        }
        t += 1;
    };

    for m in m0..=t + 1 {
        let value = terms.get(m - 1);
        let bound = growth_bound(k, m);
        if *value < bound {
            return Err(GrowthFailure::Violated {
                m,
                value: value.clone(),
                bound,
            });
        }
    }

    Ok(GrowthCertificate {
        k,
        m0,
        checked_index: t,
        window_min,
    })
}
