//! Embedding a linear recurrent sequence into a meta-Fibonacci sequence.
//!
//! Given `a_n = b_1 a_{n-1} + ... + b_k a_{n-k}` with nonnegative
//! coefficients summing to at least 2, the interleaved sequence
//!
//! ```text
//! q(2mk + 2j)     = a^(j)_m        (0 <= j < k)
//! q(2mk + 2j + 1) = 2k (k - j)
//! ```
//!
//! built from the `k` rotations `a^(j)` satisfies, from some index `h` on,
//!
//! ```text
//! M(n) = M(n - M(n-2)) + sum_i b_i M(n - M(n - (2i - 1)))
//! ```
//!
//! so seeding that recurrence with `q(0..=h)` reproduces `q` forever and
//! `a_n = q(2kn)`.
//!
//! The admissible `h` must satisfy `h >= 2`, `h >= 2k^2 - 1`, and for every
//! rotation `a^(r)_{m-1} >= 2(m+1)k` whenever `m >= floor((h+1) / 2k)`,
//! i.e. for every block index `m` reachable from some `n > h`.

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linrec::{
    growth_certificate, GrowthCertificate, GrowthFailure, LinearRecurrence, Recurrence,
    RotatedRecurrence,
};
use crate::metafib::{InitialCondition, MetaFibRecurrence, SeededRecurrence};

/// Upper limit for [`find_h`]; hitting it means something is broken.
pub const DEFAULT_H_CEILING: usize = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

/// Position of index `n` in the interleaving: `n = 2mk + 2j (+1 if odd)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Slot {
    pub m: usize,
    pub j: usize,
    pub parity: Parity,
}

impl Slot {
    pub fn of(k: usize, n: usize) -> Slot {
        let block = 2 * k;
        let rem = n % block;
        Slot {
            m: n / block,
            j: rem / 2,
            parity: if rem.is_multiple_of(2) { Parity::Even } else { Parity::Odd },
        }
    }

    pub fn index(&self, k: usize) -> usize {
        2 * self.m * k + 2 * self.j + usize::from(self.parity == Parity::Odd)
    }
}

/// Value stored at every odd slot with index `j`.
pub fn odd_slot_value(k: usize, j: usize) -> BigUint {
    BigUint::from(2 * k) * BigUint::from(k - j)
}

/// `M(n) = M(n - M(n-2)) + sum_i b_i M(n - M(n - (2i-1)))` over offsets
/// `1..=max(2, 2k - 1)`, starting at index 0.
pub fn build_meta_recurrence(rec: &LinearRecurrence) -> MetaFibRecurrence {
    let k = rec.order();
    let mut coeffs = vec![0u64; (2 * k - 1).max(2)];
    coeffs[1] += 1;
    for (i, &b) in rec.coeffs().iter().enumerate() {
        coeffs[2 * i] += b;
    }
    MetaFibRecurrence::new(coeffs, 0).expect("offset 2 always carries coefficient 1")
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InvalidH {
    #[error("h = {h} is below 2")]
    BelowTwo { h: usize },
    #[error("h = {h} is below 2k^2 - 1 = {min}")]
    BelowBlockReach { h: usize, min: usize },
    #[error("rotation {r} fails the growth bound from m = {m0}: {failure}")]
    Growth {
        r: usize,
        m0: usize,
        failure: GrowthFailure,
    },
}

/// Smallest block index `m` of any `n > h`.
pub fn first_block_after(k: usize, h: usize) -> usize {
    (h + 1) / (2 * k)
}

/// Checks `h` against all three clauses, returning one growth certificate
/// per rotation on success and the first failed clause otherwise.
pub fn is_valid_h(
    rotations: &[RotatedRecurrence],
    h: usize,
) -> Result<Vec<GrowthCertificate>, InvalidH> {
    let k = rotations.len();
    if h < 2 {
        return Err(InvalidH::BelowTwo { h });
    }
    let min = 2 * k * k - 1;
    if h < min {
        return Err(InvalidH::BelowBlockReach { h, min });
    }
    let m0 = first_block_after(k, h);
    rotations
        .iter()
        .map(|rot| {
            growth_certificate(rot, m0).map_err(|failure| InvalidH::Growth {
                r: rot.r(),
                m0,
                failure,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("no valid h found up to {ceiling}")]
pub struct HSearchExhausted {
    pub ceiling: usize,
}

/// Minimal `h` accepted by [`is_valid_h`].
pub fn find_h(rotations: &[RotatedRecurrence]) -> Result<usize, HSearchExhausted> {
    find_h_with_ceiling(rotations, DEFAULT_H_CEILING)
}

pub fn find_h_with_ceiling(
    rotations: &[RotatedRecurrence],
    ceiling: usize,
) -> Result<usize, HSearchExhausted> {
    let k = rotations.len();
    let mut h = (2 * k * k - 1).max(2);
    while h <= ceiling {
        match is_valid_h(rotations, h) {
            Ok(_) => return Ok(h),
            // Every h whose first block is at or below the failing m fails too,
            // so jump to the first h whose first block lies past it.
            Err(InvalidH::Growth {
                failure: GrowthFailure::Violated { m, .. },
                ..
            }) => h = h.max(2 * k * (m + 1) - 1),
            Err(other) => unreachable!("search starts above the fixed clauses: {other}"),
        }
    }
    Err(HSearchExhausted { ceiling })
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructionError {
    #[error(transparent)]
    InvalidH(#[from] InvalidH),
    #[error(transparent)]
    Search(#[from] HSearchExhausted),
    #[error("initial condition of length h + 1 = {len} is shorter than the largest inner offset {max_offset}")]
    InitialTooShort { len: usize, max_offset: usize },
    #[error("quasi-period s = {s} does not equal 2k = {expected}")]
    QuasiPeriod { s: usize, expected: usize },
    #[error("meta recurrence must start at index 0, not {n0}")]
    NonZeroStart { n0: i64 },
    #[error("meta initial condition has {len} values but h + 1 = {expected}")]
    InitialLength { len: usize, expected: usize },
}

/// A linear recurrence together with the meta-Fibonacci sequence that
/// embeds it at stride `2k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Construction {
    input: LinearRecurrence,
    rotations: Vec<RotatedRecurrence>,
    h: usize,
    target: MetaFibRecurrence,
    initial: InitialCondition,
}

impl Construction {
    /// Full construction with the minimal valid `h`.
    pub fn build(rec: &LinearRecurrence) -> Result<Construction, ConstructionError> {
        let rotations = rec.rotations();
        let h = find_h(&rotations)?;
        Ok(Self::assemble(rec.clone(), rotations, h))
    }

    /// Construction with a caller-chosen `h`, which must pass [`is_valid_h`].
    pub fn build_with_h(rec: &LinearRecurrence, h: usize) -> Result<Construction, ConstructionError> {
        let rotations = rec.rotations();
        is_valid_h(&rotations, h)?;
        Ok(Self::assemble(rec.clone(), rotations, h))
    }

    /// Construction with any `h` long enough to seed the recurrence; the
    /// theorem is not guaranteed to hold. Useful as a negative control.
    pub fn with_h_unchecked(
        rec: &LinearRecurrence,
        h: usize,
    ) -> Result<Construction, ConstructionError> {
        let max_offset = build_meta_recurrence(rec).max_offset();
        if h + 1 < max_offset {
            return Err(ConstructionError::InitialTooShort {
                len: h + 1,
                max_offset,
            });
        }
        Ok(Self::assemble(rec.clone(), rec.rotations(), h))
    }

    fn assemble(input: LinearRecurrence, rotations: Vec<RotatedRecurrence>, h: usize) -> Self {
        let target = build_meta_recurrence(&input);
        let values = interleave(&rotations, h + 1);
        let initial = InitialCondition::new(0, values).expect("h + 1 >= 1 values");
        Construction {
            input,
            rotations,
            h,
            target,
            initial,
        }
    }

    /// Reassembles a construction from its interchange form. The target
    /// recurrence and initial condition are taken as given, not rebuilt.
    pub fn from_parts(
        input: LinearRecurrence,
        s: usize,
        h: usize,
        meta: SeededRecurrence,
    ) -> Result<Construction, ConstructionError> {
        let expected = 2 * input.order();
        if s != expected {
            return Err(ConstructionError::QuasiPeriod { s, expected });
        }
        if meta.recurrence.n0() != 0 {
            return Err(ConstructionError::NonZeroStart {
                n0: meta.recurrence.n0(),
            });
        }
        if meta.initial.len() != h + 1 {
            return Err(ConstructionError::InitialLength {
                len: meta.initial.len(),
                expected: h + 1,
            });
        }
        Ok(Construction {
            rotations: input.rotations(),
            input,
            h,
            target: meta.recurrence,
            initial: meta.initial,
        })
    }

    pub fn input(&self) -> &LinearRecurrence {
        &self.input
    }

    pub fn rotations(&self) -> &[RotatedRecurrence] {
        &self.rotations
    }

    pub fn k(&self) -> usize {
        self.input.order()
    }

    /// Stride `s = 2k` at which the input appears.
    pub fn quasi_period(&self) -> usize {
        2 * self.k()
    }

    pub fn h(&self) -> usize {
        self.h
    }

    pub fn target(&self) -> &MetaFibRecurrence {
        &self.target
    }

    pub fn initial(&self) -> &InitialCondition {
        &self.initial
    }

    pub fn seeded(&self) -> SeededRecurrence {
        SeededRecurrence::new(self.target.clone(), self.initial.clone())
            .expect("construction keeps at least K initial values")
    }

    /// `q(n)`, straight from the interleaving formula.
    pub fn interleaved_term(&self, n: usize) -> BigUint {
        let k = self.k();
        let slot = Slot::of(k, n);
        match slot.parity {
            Parity::Even => self.rotations[slot.j].terms().get(slot.m).clone(),
            Parity::Odd => odd_slot_value(k, slot.j),
        }
    }

    /// `q(0), ..., q(len - 1)`.
    pub fn interleaved_prefix(&self, len: usize) -> Vec<BigUint> {
        interleave(&self.rotations, len)
    }

    pub fn to_bundle(&self) -> Bundle {
        Bundle {
            input: self.input.clone(),
            s: self.quasi_period(),
            h: self.h,
            meta: self.seeded(),
        }
    }
}

fn interleave(rotations: &[RotatedRecurrence], len: usize) -> Vec<BigUint> {
    let k = rotations.len();
    let blocks = len.div_ceil(2 * k);
    let columns: Vec<Vec<BigUint>> = rotations.iter().map(|r| r.prefix(blocks)).collect();
    (0..len)
        .map(|n| {
            let slot = Slot::of(k, n);
            match slot.parity {
                Parity::Even => columns[slot.j][slot.m].clone(),
                Parity::Odd => odd_slot_value(k, slot.j),
            }
        })
        .collect()
}

/// Interchange form: `{"input": .., "s": .., "h": .., "meta": {"n0", "coeffs", "initial"}}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bundle {
    pub input: LinearRecurrence,
    pub s: usize,
    pub h: usize,
    pub meta: SeededRecurrence,
}

impl TryFrom<Bundle> for Construction {
    type Error = ConstructionError;

    fn try_from(b: Bundle) -> Result<Self, Self::Error> {
        Construction::from_parts(b.input, b.s, b.h, b.meta)
    }
}
