//! Top-down reference evaluator for nested recurrences.
//!
//! Shares no code with [`super::eval_prefix`] beyond the precondition check.
//! Every requested index is resolved by direct recursion with memoization,
//! highest index first, and a forward reference is detected as re-entry into
//! an index whose evaluation is still in progress.

use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_traits::Zero;
use thiserror::Error;

use super::{check_preconditions, Death, EvalError, InitialCondition, MetaFibRecurrence, Sequence};

pub const DEFAULT_MAX_DEPTH: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    /// The recursion got deeper than allowed; says nothing about the sequence.
    #[error("recursion depth exceeded the budget of {max_depth}")]
    BudgetExceeded { max_depth: usize },
}

enum Slot {
    InProgress,
    Known(BigUint),
    Dead(Death),
}

enum Fail {
    Reentered,
    Dead(Death),
    Budget,
}

struct Oracle<'a> {
    rec: &'a MetaFibRecurrence,
    init: &'a InitialCondition,
    slots: HashMap<i64, Slot>,
    depth: usize,
    max_depth: usize,
}

impl Oracle<'_> {
    fn value(&mut self, n: i64) -> Result<BigUint, Fail> {
        let n0 = self.rec.n0;
        if n < n0 {
            return Ok(BigUint::zero());
        }
        if let Some(v) = self.init.values.get((n - n0) as usize) {
            return Ok(v.clone());
        }
        match self.slots.get(&n) {
            Some(Slot::Known(v)) => return Ok(v.clone()),
            Some(Slot::Dead(d)) => return Err(Fail::Dead(d.clone())),
            Some(Slot::InProgress) => return Err(Fail::Reentered),
            None => {}
        }
        if self.depth >= self.max_depth {
            return Err(Fail::Budget);
        }

        self.depth += 1;
        self.slots.insert(n, Slot::InProgress);
        let result = self.compute(n);
        self.depth -= 1;
        match &result {
            Ok(v) => {
                self.slots.insert(n, Slot::Known(v.clone()));
            }
            Err(Fail::Dead(d)) => {
                self.slots.insert(n, Slot::Dead(d.clone()));
            }
            Err(_) => {
                self.slots.remove(&n);
            }
        }
        result
    }

    fn compute(&mut self, n: i64) -> Result<BigUint, Fail> {
        let mut acc = BigUint::zero();
        for (offset, c) in self.rec.active_terms() {
            let inner_index = n - offset as i64;
            let inner = self.value(inner_index)?;
            let argument = BigInt::from(n) - BigInt::from(inner.clone());
            let outer = match i64::try_from(&argument) {
                Ok(arg) => match self.value(arg) {
                    Err(Fail::Reentered) => {
                        return Err(Fail::Dead(Death {
                            n,
                            offset,
                            inner_index,
                            inner_value: inner,
                            argument,
                        }))
                    }
                    other => other?,
                },
                // far below any representable index, hence below n0
                Err(_) => BigUint::zero(),
            };
            acc += outer * c;
        }
        Ok(acc)
    }
}

/// Same contract as [`super::eval_prefix`], with the default depth budget.
pub fn eval_oracle(
    rec: &MetaFibRecurrence,
    init: &InitialCondition,
    n_terms: usize,
) -> Result<Sequence, OracleError> {
    eval_oracle_with_budget(rec, init, n_terms, DEFAULT_MAX_DEPTH)
}

/// Reference evaluation with an explicit recursion depth budget.
///
/// Deep recursion uses the native stack; callers evaluating many thousands
/// of terms should run this on a thread with a large stack.
pub fn eval_oracle_with_budget(
    rec: &MetaFibRecurrence,
    init: &InitialCondition,
    n_terms: usize,
    max_depth: usize,
) -> Result<Sequence, OracleError> {
    check_preconditions(rec, init, n_terms)?;
    let mut oracle = Oracle {
        rec,
        init,
        slots: HashMap::new(),
        depth: 0,
        max_depth,
    };

    let mut first_death: Option<Death> = None;
    for rel in (0..n_terms).rev() {
        let n = rec.n0 + rel as i64;
        match oracle.value(n) {
            Ok(_) => {}
            Err(Fail::Dead(d)) => {
                if first_death.as_ref().is_none_or(|f| d.n < f.n) {
                    first_death = Some(d);
                }
            }
            Err(Fail::Budget) => return Err(OracleError::BudgetExceeded { max_depth }),
            Err(Fail::Reentered) => unreachable!("top-level index cannot be in progress"),
        }
    }
    if let Some(d) = first_death {
        return Err(EvalError::Death(d).into());
    }

    let values = (0..n_terms)
        .map(|rel| {
            oracle
                .value(rec.n0 + rel as i64)
                .unwrap_or_else(|_| unreachable!("every index resolved above"))
        })
        .collect();
    Ok(Sequence {
        start: rec.n0,
        values,
    })
}
