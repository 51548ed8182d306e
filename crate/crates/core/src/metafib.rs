//! Evaluation of nested recurrences
//!
//! ```text
//! M(n) = c_1 M(n - M(n-1)) + c_2 M(n - M(n-2)) + ... + c_K M(n - M(n-K))
//! ```
//!
//! seeded by an explicit initial condition starting at index `n0`. Any
//! reference to an index below `n0` reads as 0. A reference to an index at
//! or above the one being computed cannot be resolved and ends the sequence;
//! this is reported as a [`Death`].

use std::num::NonZeroUsize;

use num_bigint::{BigInt, BigUint};
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bigjson;

pub mod oracle;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InvalidMetaFib {
    #[error("coefficient list is empty; at least one inner offset is required")]
    NoOffsets,
    #[error("all coefficients are zero; at least one must be positive")]
    AllZero,
    #[error("initial condition is empty")]
    EmptyInitial,
}

/// Coefficients `c_1 .. c_K` of a nested recurrence plus its start index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetaFibRecurrence {
    coeffs: Vec<u64>,
    n0: i64,
}

impl MetaFibRecurrence {
    /// `coeffs[i - 1]` multiplies the term with inner offset `i`.
    pub fn new(coeffs: Vec<u64>, n0: i64) -> Result<Self, InvalidMetaFib> {
        if coeffs.is_empty() {
            return Err(InvalidMetaFib::NoOffsets);
        }
        if coeffs.iter().all(|&c| c == 0) {
            return Err(InvalidMetaFib::AllZero);
        }
        Ok(MetaFibRecurrence { coeffs, n0 })
    }

    /// Hofstadter's `Q(n) = Q(n - Q(n-1)) + Q(n - Q(n-2))`, starting at 1.
    pub fn hofstadter_q() -> Self {
        MetaFibRecurrence {
            coeffs: vec![1, 1],
            n0: 1,
        }
    }

    /// Largest inner offset `K`.
    pub fn max_offset(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn n0(&self) -> i64 {
        self.n0
    }

    /// `(offset, coefficient)` pairs with a positive coefficient.
    pub fn active_terms(&self) -> impl Iterator<Item = (usize, u64)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| (i + 1, c))
    }
}

/// Explicit values `M(start), M(start + 1), ...` seeding a recurrence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InitialCondition {
    start: i64,
    values: Vec<BigUint>,
}

impl InitialCondition {
    pub fn new(start: i64, values: Vec<BigUint>) -> Result<Self, InvalidMetaFib> {
        if values.is_empty() {
            return Err(InvalidMetaFib::EmptyInitial);
        }
        Ok(InitialCondition { start, values })
    }

    pub fn from_u64(start: i64, values: &[u64]) -> Result<Self, InvalidMetaFib> {
        Self::new(start, values.iter().map(|&v| BigUint::from(v)).collect())
    }

    pub fn start(&self) -> i64 {
        self.start
    }

    pub fn values(&self) -> &[BigUint] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Where and why evaluation stopped: computing `M(n)` needed `M(argument)`
/// with `argument >= n`, via the active term at inner offset `offset`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Death {
    pub n: i64,
    pub offset: usize,
    /// `n - offset`, the index whose value fed the outer argument.
    pub inner_index: i64,
    #[serde(with = "bigjson::uint")]
    pub inner_value: BigUint,
    #[serde(with = "bigjson::int")]
    pub argument: BigInt,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("initial condition starts at {initial} but the recurrence starts at {recurrence}")]
    StartMismatch { recurrence: i64, initial: i64 },
    #[error("initial condition has {len} values but the largest inner offset is {max_offset}")]
    InitialTooShort { len: usize, max_offset: usize },
    #[error("index range starting at {n0} with {n_terms} terms does not fit in 64 bits")]
    IndexOverflow { n0: i64, n_terms: usize },
    #[error(
        "sequence dies at n = {}: offset {} reads M({}) = {}, which requires M({})",
        .0.n, .0.offset, .0.inner_index, .0.inner_value, .0.argument
    )]
    Death(Death),
}

/// A computed prefix `M(start), M(start + 1), ...`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sequence {
    pub start: i64,
    #[serde(with = "bigjson::uint_vec")]
    pub values: Vec<BigUint>,
}

impl Sequence {
    /// Value at absolute index `n` under the zero convention, if computed.
    pub fn at(&self, n: i64) -> Option<BigUint> {
        if n < self.start {
            return Some(BigUint::zero());
        }
        let offset = usize::try_from(n - self.start).ok()?;
        self.values.get(offset).cloned()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `(index, value)` pairs.
    pub fn indexed(&self) -> impl Iterator<Item = (i64, &BigUint)> {
        let start = self.start;
        self.values
            .iter()
            .enumerate()
            .map(move |(i, v)| (start + i as i64, v))
    }
}

pub(crate) fn check_preconditions(
    rec: &MetaFibRecurrence,
    init: &InitialCondition,
    n_terms: usize,
) -> Result<(), EvalError> {
    if init.start != rec.n0 {
        return Err(EvalError::StartMismatch {
            recurrence: rec.n0,
            initial: init.start,
        });
    }
    if init.len() < rec.max_offset() {
        return Err(EvalError::InitialTooShort {
            len: init.len(),
            max_offset: rec.max_offset(),
        });
    }
    let fits = i64::try_from(n_terms)
        .ok()
        .and_then(|n| rec.n0.checked_add(n))
        .is_some();
    if !fits {
        return Err(EvalError::IndexOverflow {
            n0: rec.n0,
            n_terms,
        });
    }
    Ok(())
}

/// Position in the table that argument `n - v` resolves to, where `rel` is
/// `n - n0`. `None` means the argument lies below `n0` and reads as 0.
fn outer_slot(rel: usize, v: &BigUint) -> Option<usize> {
    let v = u64::try_from(v).ok()?;
    let v = usize::try_from(v).ok()?;
    rel.checked_sub(v)
}

/// Computes `M(n0), ..., M(n0 + n_terms - 1)` left to right.
///
/// Values inside the initial condition are returned verbatim. Later terms
/// follow the recurrence; the first term that would need its own value or a
/// later one yields [`EvalError::Death`].
pub fn eval_prefix(
    rec: &MetaFibRecurrence,
    init: &InitialCondition,
    n_terms: usize,
) -> Result<Sequence, EvalError> {
    check_preconditions(rec, init, n_terms)?;
    let active: Vec<(usize, u64)> = rec.active_terms().collect();
    let mut values: Vec<BigUint> = init.values.iter().take(n_terms).cloned().collect();
    values.reserve(n_terms.saturating_sub(values.len()).min(1 << 20));

    while values.len() < n_terms {
        let rel = values.len();
        let mut acc = BigUint::zero();
        for &(offset, c) in &active {
            let inner = &values[rel - offset];
            match outer_slot(rel, inner) {
                Some(slot) if slot >= rel => {
                    let n = rec.n0 + rel as i64;
                    return Err(EvalError::Death(Death {
                        n,
                        offset,
                        inner_index: n - offset as i64,
                        inner_value: inner.clone(),
                        argument: BigInt::from(n) - BigInt::from(inner.clone()),
                    }));
                }
                Some(slot) => acc += &values[slot] * c,
                None => {}
            }
        }
        values.push(acc);
    }

    Ok(Sequence {
        start: rec.n0,
        values,
    })
}

/// Every `stride`-th element of `seq`, starting at `offset`.
pub fn extract_subsequence<T: Clone>(seq: &[T], stride: NonZeroUsize, offset: usize) -> Vec<T> {
    seq.iter()
        .skip(offset)
        .step_by(stride.get())
        .cloned()
        .collect()
}

/// A recurrence together with its initial condition; the JSON form
/// `{"n0": .., "coeffs": [..], "initial": [..]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawSeeded", into = "RawSeeded")]
pub struct SeededRecurrence {
    pub recurrence: MetaFibRecurrence,
    pub initial: InitialCondition,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSeeded {
    n0: i64,
    coeffs: Vec<u64>,
    #[serde(with = "bigjson::uint_vec")]
    initial: Vec<BigUint>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InvalidSeeded {
    #[error(transparent)]
    Recurrence(#[from] InvalidMetaFib),
    #[error("initial condition has {len} values but the largest inner offset is {max_offset}")]
    InitialTooShort { len: usize, max_offset: usize },
}

impl SeededRecurrence {
    pub fn new(
        recurrence: MetaFibRecurrence,
        initial: InitialCondition,
    ) -> Result<Self, InvalidSeeded> {
        if initial.len() < recurrence.max_offset() {
            return Err(InvalidSeeded::InitialTooShort {
                len: initial.len(),
                max_offset: recurrence.max_offset(),
            });
        }
        let initial = InitialCondition {
            start: recurrence.n0,
            values: initial.values,
        };
        Ok(SeededRecurrence {
            recurrence,
            initial,
        })
    }

    pub fn eval(&self, n_terms: usize) -> Result<Sequence, EvalError> {
        eval_prefix(&self.recurrence, &self.initial, n_terms)
    }
}

impl TryFrom<RawSeeded> for SeededRecurrence {
    type Error = InvalidSeeded;

    fn try_from(raw: RawSeeded) -> Result<Self, Self::Error> {
        let recurrence = MetaFibRecurrence::new(raw.coeffs, raw.n0)?;
        let initial = InitialCondition::new(raw.n0, raw.initial)?;
        SeededRecurrence::new(recurrence, initial)
    }
}

impl From<SeededRecurrence> for RawSeeded {
    fn from(s: SeededRecurrence) -> Self {
        RawSeeded {
            n0: s.recurrence.n0,
            coeffs: s.recurrence.coeffs,
            initial: s.initial.values,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(init: &[u64]) -> (MetaFibRecurrence, InitialCondition) {
        (
            MetaFibRecurrence::hofstadter_q(),
            InitialCondition::from_u64(1, init).unwrap(),
        )
    }

    fn small(seq: &Sequence) -> Vec<u64> {
        seq.values.iter().map(|v| u64::try_from(v).unwrap()).collect()
    }

    #[test]
    fn hofstadter_q_prefix() {
        let (rec, init) = q(&[1, 1]);
        let seq = eval_prefix(&rec, &init, 10).unwrap();
        assert_eq!(seq.start, 1);
        assert_eq!(small(&seq), vec![1, 1, 2, 3, 3, 4, 5, 5, 6, 6]);
    }

    #[test]
    fn forward_reference_dies() {
        let (rec, init) = q(&[1, 0]);
        let err = eval_prefix(&rec, &init, 3).unwrap_err();
        assert_eq!(
            err,
            EvalError::Death(Death {
                n: 3,
                offset: 1,
                inner_index: 2,
                inner_value: BigUint::zero(),
                argument: BigInt::from(3),
            })
        );
        // the dying index itself is not needed for a shorter prefix
        assert_eq!(small(&eval_prefix(&rec, &init, 2).unwrap()), vec![1, 0]);
    }

    #[test]
    fn below_start_reads_zero() {
        let (rec, init) = q(&[1, 3]);
        assert_eq!(small(&eval_prefix(&rec, &init, 3).unwrap()), vec![1, 3, 3]);
    }

    #[test]
    fn golomb_initial_condition() {
        let (rec, init) = q(&[3, 2, 1]);
        assert_eq!(
            small(&eval_prefix(&rec, &init, 12).unwrap()),
            vec![3, 2, 1, 3, 5, 4, 3, 8, 7, 3, 11, 10]
        );
    }

    #[test]
    fn inactive_offsets_never_die() {
        // c_1 = 0, so the zero at M(n-1) is never used as an inner value.
        let rec = MetaFibRecurrence::new(vec![0, 1], 0).unwrap();
        let init = InitialCondition::from_u64(0, &[2, 0]).unwrap();
        assert!(eval_prefix(&rec, &init, 3).is_ok());
    }

    #[test]
    fn preconditions() {
        let rec = MetaFibRecurrence::hofstadter_q();
        let init = InitialCondition::from_u64(0, &[1, 1]).unwrap();
        assert_eq!(
            eval_prefix(&rec, &init, 5),
            Err(EvalError::StartMismatch {
                recurrence: 1,
                initial: 0
            })
        );
        let init = InitialCondition::from_u64(1, &[1]).unwrap();
        assert_eq!(
            eval_prefix(&rec, &init, 5),
            Err(EvalError::InitialTooShort {
                len: 1,
                max_offset: 2
            })
        );
        assert_eq!(MetaFibRecurrence::new(vec![], 0), Err(InvalidMetaFib::NoOffsets));
        assert_eq!(MetaFibRecurrence::new(vec![0, 0], 0), Err(InvalidMetaFib::AllZero));
        assert_eq!(InitialCondition::new(0, vec![]), Err(InvalidMetaFib::EmptyInitial));
    }

    #[test]
    fn short_prefix_inside_initial_condition() {
        let (rec, init) = q(&[3, 2, 1]);
        assert_eq!(small(&eval_prefix(&rec, &init, 2).unwrap()), vec![3, 2]);
        assert!(eval_prefix(&rec, &init, 0).unwrap().is_empty());
    }

    #[test]
    fn subsequence_extraction() {
        let one = NonZeroUsize::new(1).unwrap();
        let four = NonZeroUsize::new(4).unwrap();
        let seq = [5, 8, 5, 4, 8, 8, 8, 4, 13, 8, 13, 4, 21, 8, 21, 4];
        assert_eq!(extract_subsequence(&seq, one, 0), seq.to_vec());
        assert_eq!(extract_subsequence(&seq, four, 0), vec![5, 8, 13, 21]);
        assert_eq!(extract_subsequence(&seq, four, 3), vec![4, 4, 4, 4]);
        assert!(extract_subsequence(&seq, four, 99).is_empty());
    }

    #[test]
    fn sequence_lookup_uses_zero_convention() {
        let seq = Sequence {
            start: 1,
            values: vec![BigUint::from(7u32)],
        };
        assert_eq!(seq.at(-40), Some(BigUint::zero()));
        assert_eq!(seq.at(1), Some(BigUint::from(7u32)));
        assert_eq!(seq.at(2), None);
    }

    #[test]
    fn seeded_json() {
        let s = r#"{"n0":1,"coeffs":[1,1],"initial":[1,1]}"#;
        let seeded: SeededRecurrence = serde_json::from_str(s).unwrap();
        assert_eq!(seeded.recurrence, MetaFibRecurrence::hofstadter_q());
        assert_eq!(serde_json::to_string(&seeded).unwrap(), s);
        assert!(serde_json::from_str::<SeededRecurrence>(r#"{"n0":1,"coeffs":[1,1],"initial":[1]}"#).is_err());
        assert!(serde_json::from_str::<SeededRecurrence>(r#"{"n0":1,"coeffs":[0],"initial":[1]}"#).is_err());
        assert!(serde_json::from_str::<SeededRecurrence>(r#"{"n0":1,"coeffs":[1],"initial":[-1]}"#).is_err());
    }
}
