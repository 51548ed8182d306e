//! Numerical checks of a [`Construction`].
//!
//! [`check_theorem`] runs the meta-Fibonacci recurrence from the stored
//! initial condition and compares every term with the interleaving formula.
//! [`check_subsequence`] compares the evaluated sequence at stride `2k` with
//! the input recurrence directly. [`Tracer`] breaks single terms down into
//! their nested references and checks them against the expected case
//! pattern: for odd `n` only the offset-2 term survives and lands on an odd
//! slot with the same `j`; for even `n` the offset-2 term vanishes and each
//! weighted term lands on the even slot of the same rotation that the
//! rotated linear recurrence reads.

use num_bigint::{BigInt, BigUint};
use num_traits::{Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::bigjson;
use crate::construct::{Construction, Parity, Slot};
use crate::linrec::Recurrence;
use crate::metafib::{eval_prefix, Death, EvalError, Sequence};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Eval(EvalError),
    #[error("index {n} lies inside the initial condition (h = {h})")]
    NotAfterH { n: usize, h: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Mismatch {
    pub n: usize,
    #[serde(with = "bigjson::uint")]
    pub expected: BigUint,
    #[serde(with = "bigjson::uint")]
    pub got: BigUint,
    #[serde(flatten)]
    pub slot: Slot,
}

/// Outcome of a numerical check, serialized as
/// `{"pass", "checked", "first_mismatch", "death"}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub pass: bool,
    pub checked: usize,
    pub first_mismatch: Option<Mismatch>,
    pub death: Option<Death>,
}

/// Evaluates `len` terms; on death, the surviving prefix and the death.
fn evaluate(c: &Construction, len: usize) -> Result<(Sequence, Option<Death>), VerifyError> {
    match eval_prefix(c.target(), c.initial(), len) {
        Ok(seq) => Ok((seq, None)),
        Err(EvalError::Death(d)) => {
            let alive = usize::try_from(d.n).expect("death index is past n0 = 0");
            let seq = eval_prefix(c.target(), c.initial(), alive).map_err(VerifyError::Eval)?;
            Ok((seq, Some(d)))
        }
        Err(e) => Err(VerifyError::Eval(e)),
    }
}

/// Compares `R(n)` with `q(n)` for `0 <= n < n_terms`.
pub fn check_theorem(c: &Construction, n_terms: usize) -> Result<VerifyReport, VerifyError> {
    let (seq, death) = evaluate(c, n_terms)?;
    let expected = c.interleaved_prefix(seq.len());
    let k = c.k();
    let first_mismatch = seq
        .values
        .iter()
        .zip(&expected)
        .enumerate()
        .find(|(_, (got, want))| got != want)
        .map(|(n, (got, want))| Mismatch {
            n,
            expected: want.clone(),
            got: got.clone(),
            slot: Slot::of(k, n),
        });
    Ok(VerifyReport {
        pass: first_mismatch.is_none() && death.is_none(),
        checked: seq.len(),
        first_mismatch,
        death,
    })
}

/// Compares `R(2kn)` with `a_n` for `0 <= n < count`, using the evaluated
/// sequence rather than the interleaving formula.
pub fn check_subsequence(c: &Construction, count: usize) -> Result<VerifyReport, VerifyError> {
    let s = c.quasi_period();
    let len = if count == 0 { 0 } else { s * (count - 1) + 1 };
    let (seq, death) = evaluate(c, len)?;
    let expected = c.input().prefix(count);
    let mut checked = 0;
    let mut first_mismatch = None;
    for (i, want) in expected.iter().enumerate() {
        let Some(got) = seq.values.get(s * i) else { break };
        checked += 1;
        if got != want {
            first_mismatch = Some(Mismatch {
                n: s * i,
                expected: want.clone(),
                got: got.clone(),
                slot: Slot::of(c.k(), s * i),
            });
            break;
        }
    }
    Ok(VerifyReport {
        pass: first_mismatch.is_none() && death.is_none(),
        checked,
        first_mismatch,
        death,
    })
}

/// Where the outer argument of a nested term points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Landing {
    /// Negative argument; reads as 0.
    VanishesNegative,
    LandsOddSlot { m: usize, j: usize },
    LandsEvenSlot { m: usize, j: usize },
}

/// One term `c * R(n - R(n - offset))` of the recurrence at `n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceTerm {
    pub offset: usize,
    pub coefficient: u64,
    pub inner_index: usize,
    #[serde(with = "bigjson::uint")]
    pub inner_value: BigUint,
    #[serde(with = "bigjson::int")]
    pub argument: BigInt,
    pub landing: Landing,
    /// `R(argument)`.
    #[serde(with = "bigjson::uint")]
    pub value: BigUint,
    #[serde(with = "bigjson::uint")]
    pub contribution: BigUint,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CaseTrace {
    pub n: usize,
    #[serde(flatten)]
    pub slot: Slot,
    pub terms: Vec<TraceTerm>,
    /// Sum of the term contributions.
    #[serde(with = "bigjson::uint")]
    pub total: BigUint,
    /// `R(n)` as computed by the evaluator.
    #[serde(with = "bigjson::uint")]
    pub engine_value: BigUint,
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
#[error("n = {n}, offset {offset:?}: {clause}")]
pub struct PatternViolation {
    pub n: usize,
    pub offset: Option<usize>,
    pub clause: String,
}

impl CaseTrace {
    /// Checks this trace against the odd/even case pattern of `c`.
    pub fn check_pattern(&self, c: &Construction) -> Result<(), PatternViolation> {
        let fail = |offset: Option<usize>, clause: String| PatternViolation {
            n: self.n,
            offset,
            clause,
        };
        if self.total != self.engine_value {
            return Err(fail(
                None,
                format!(
                    "contributions sum to {} but R(n) = {}",
                    self.total, self.engine_value
                ),
            ));
        }
        let Slot { m, j, parity } = self.slot;
        for t in &self.terms {
            let at = Some(t.offset);
            match (parity, t.offset) {
                (Parity::Odd, 2) => match t.landing {
                    Landing::LandsOddSlot { j: jj, .. } if jj == j && !t.contribution.is_zero() => {}
                    other => {
                        return Err(fail(
                            at,
                            format!("odd case: offset-2 term should land on an odd slot with j = {j}, got {other:?}"),
                        ))
                    }
                },
                (Parity::Odd, _) => {
                    if t.landing != Landing::VanishesNegative {
                        return Err(fail(
                            at,
                            format!("odd case: weighted term should vanish, got {:?}", t.landing),
                        ));
                    }
                }
                (Parity::Even, 2) => {
                    if t.landing != Landing::VanishesNegative {
                        return Err(fail(
                            at,
                            format!("even case: offset-2 term should vanish, got {:?}", t.landing),
                        ));
                    }
                }
                (Parity::Even, offset) if offset % 2 == 1 && offset.div_ceil(2) <= c.k() => {
                    let i = offset.div_ceil(2);
                    let lag = c.rotations()[j].lag_of(i);
                    let want = m.checked_sub(lag).map(|mm| Landing::LandsEvenSlot { m: mm, j });
                    if want != Some(t.landing) {
                        return Err(fail(
                            at,
                            format!(
                                "even case: b_{i} term should land on a^({j}) at m - {lag}, got {:?}",
                                t.landing
                            ),
                        ));
                    }
                }
                (Parity::Even, offset) => {
                    return Err(fail(at, format!("unexpected active offset {offset}")));
                }
            }
        }
        Ok(())
    }
}

/// Evaluated prefix of a construction, for tracing many indices.
#[derive(Debug, Clone)]
pub struct Tracer<'a> {
    construction: &'a Construction,
    values: Sequence,
}

impl<'a> Tracer<'a> {
    /// Evaluates enough terms to trace every index up to `max_n`.
    pub fn new(construction: &'a Construction, max_n: usize) -> Result<Self, VerifyError> {
        let values = eval_prefix(construction.target(), construction.initial(), max_n + 1)
            .map_err(VerifyError::Eval)?;
        Ok(Tracer {
            construction,
            values,
        })
    }

    pub fn values(&self) -> &Sequence {
        &self.values
    }

    pub fn trace(&self, n: usize) -> Result<CaseTrace, VerifyError> {
        let c = self.construction;
        if n <= c.h() {
            return Err(VerifyError::NotAfterH { n, h: c.h() });
        }
        let vals = &self.values.values;
        assert!(n < vals.len(), "index {n} beyond the evaluated prefix");
        let k = c.k();
        let mut terms = Vec::new();
        let mut total = BigUint::zero();
        for (offset, coefficient) in c.target().active_terms() {
            let inner_index = n - offset;
            let inner_value = vals[inner_index].clone();
            let argument = BigInt::from(n) - BigInt::from(inner_value.clone());
            let (landing, value) = if argument.is_negative() {
                (Landing::VanishesNegative, BigUint::zero())
            } else {
                let arg = usize::try_from(&argument).expect("argument is at most n");
                let slot = Slot::of(k, arg);
                let landing = match slot.parity {
                    Parity::Even => Landing::LandsEvenSlot { m: slot.m, j: slot.j },
                    Parity::Odd => Landing::LandsOddSlot { m: slot.m, j: slot.j },
                };
                (landing, vals[arg].clone())
            };
            let contribution = &value * coefficient;
            total += &contribution;
            terms.push(TraceTerm {
                offset,
                coefficient,
                inner_index,
                inner_value,
                argument,
                landing,
                value,
                contribution,
            });
        }
        Ok(CaseTrace {
            n,
            slot: Slot::of(k, n),
            terms,
            total,
            engine_value: vals[n].clone(),
        })
    }
}

/// Breakdown of the recurrence at a single index `n > h`.
pub fn trace_case(c: &Construction, n: usize) -> Result<CaseTrace, VerifyError> {
    if n <= c.h() {
        return Err(VerifyError::NotAfterH { n, h: c.h() });
    }
    Tracer::new(c, n)?.trace(n)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SweepReport {
    pub checked: usize,
    pub violations: Vec<PatternViolation>,
}

/// Traces every `h < n <= max_n` and collects pattern violations.
pub fn pattern_sweep(c: &Construction, max_n: usize) -> Result<SweepReport, VerifyError> {
    let tracer = Tracer::new(c, max_n)?;
    let mut violations = Vec::new();
    let mut checked = 0;
    for n in c.h() + 1..=max_n {
        checked += 1;
        if let Err(v) = tracer.trace(n)?.check_pattern(c) {
            violations.push(v);
        }
    }
    Ok(SweepReport {
        checked,
        violations,
    })
}
