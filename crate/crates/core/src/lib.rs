//! Meta-Fibonacci sequences and linear recurrent subsequences.
//!
//! * [`linrec`]: linear recurrences with nonnegative coefficients, their
//!   rotations and growth certificates.
//! * [`metafib`]: evaluation of nested recurrences
//!   `M(n) = sum c_i M(n - M(n - i))` under the zero convention, plus an
//!   independent reference evaluator.
//! * [`construct`]: builds a meta-Fibonacci sequence containing a given
//!   linear recurrent sequence at stride `2k`.
//! * [`verify`]: numerical checks and per-index traces of a construction.
//! * [`format`]: b-file, CSV and JSON sequence files.

mod bigjson;
pub mod construct;
pub mod format;
pub mod linrec;
pub mod metafib;
pub mod verify;

pub use construct::{Bundle, Construction};
pub use linrec::{LinearRecurrence, Recurrence, RotatedRecurrence};
pub use metafib::{
    eval_prefix, extract_subsequence, oracle::eval_oracle, Death, EvalError, InitialCondition,
    MetaFibRecurrence, SeededRecurrence, Sequence,
};
