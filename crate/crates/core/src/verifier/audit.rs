//! Finite-prefix audit of the linear-recurrence facts the coloring uses:
//! no `(K+1)`-th powers, the return-length band `|u|/K < |w| <= K|u|`, and
//! at most `K(K+1)²` returns per prefix.

use serde::Serialize;

use super::VerifyError;
use crate::coloring::RecurrenceConstant;
use crate::par::{map_range, Parallelism};
use crate::returns::prefix_return_system;
use crate::word::Symbol;

const MAX_WITNESSES: usize = 32;

/// `x[position..position + (K+1)·root_len]` is a `(K+1)`-th power.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PowerWitness {
    pub position: usize,
    pub root_len: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BandViolation {
    pub base_len: usize,
    pub return_len: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CountViolation {
    pub base_len: usize,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AuditRecord {
    pub k: usize,
    pub max_len: usize,
    pub buffer_len: usize,
    /// Number of `(position, root length)` pairs carrying a `(K+1)`-th power.
    pub power_count: usize,
    /// The first few power witnesses, by root length then position.
    pub power_witnesses: Vec<PowerWitness>,
    pub band_violations: Vec<BandViolation>,
    pub count_violations: Vec<CountViolation>,
    pub max_return_count: usize,
    /// Prefix lengths whose return system could not be built or was unstable.
    pub unavailable_bases: Vec<usize>,
}

impl AuditRecord {
    pub fn power_free(&self) -> bool {
        self.power_count == 0
    }

    pub fn length_band_ok(&self) -> bool {
        self.band_violations.is_empty() && self.unavailable_bases.is_empty()
    }

    pub fn count_bound_ok(&self) -> bool {
        self.count_violations.is_empty() && self.unavailable_bases.is_empty()
    }

    pub fn passed(&self) -> bool {
        self.power_free() && self.length_band_ok() && self.count_bound_ok()
    }
}

/// Positions where a `(K+1)`-th power of root length `root_len` starts:
/// the window of length `(K+1)·root_len` there has period `root_len`.
fn power_positions(text: &[Symbol], root_len: usize, k: usize) -> (usize, Vec<usize>) {
    let need = k * root_len;
    let mut run = 0;
    let mut count = 0;
    let mut first = Vec::new();
    for i in 0..text.len().saturating_sub(root_len) {
        if text[i] == text[i + root_len] {
            run += 1;
            if run >= need {
                count += 1;
                if first.len() < MAX_WITNESSES {
                    first.push(i + 1 - need);
                }
            }
        } else {
            run = 0;
        }
    }
    (count, first)
}

/// Audits the buffer with constant `K` for factors and prefixes of length at
/// most `max_len`. Return systems use the whole buffer as window.
pub fn audit_recurrence(
    buffer: &[Symbol],
    k: RecurrenceConstant,
    max_len: usize,
    mode: Parallelism,
) -> Result<AuditRecord, VerifyError> {
    let kk = k.get();
    let needed = max_len * (kk + 1);
    if buffer.len() < needed {
        return Err(VerifyError::BufferTooShort { needed, available: buffer.len() });
    }

    let powers = map_range(1..max_len + 1, mode, |root_len| power_positions(buffer, root_len, kk));
    let power_count = powers.iter().map(|(c, _)| c).sum();
    let power_witnesses = powers
        .iter()
        .enumerate()
        .flat_map(|(i, (_, first))| first.iter().map(move |&position| PowerWitness { position, root_len: i + 1 }))
        .take(MAX_WITNESSES)
        .collect();

    let bound = k.index_set_size();
    let mut band_violations = Vec::new();
    let mut count_violations = Vec::new();
    let mut unavailable_bases = Vec::new();
    let mut max_return_count = 0;
    let systems = map_range(1..max_len + 1, mode, |len| prefix_return_system(buffer, len, buffer.len()));
    for (base_len, system) in (1..).zip(systems) {
        let system = match system {
            Ok(s) if s.is_stable() => s,
            _ => {
                unavailable_bases.push(base_len);
                continue;
            }
        };
        for ret in system.returns() {
            if kk * ret.len() <= base_len || ret.len() > kk * base_len {
                band_violations.push(BandViolation { base_len, return_len: ret.len() });
            }
        }
        let count = system.returns().len();
        max_return_count = max_return_count.max(count);
        if count > bound {
            count_violations.push(CountViolation { base_len, count });
        }
    }

    Ok(AuditRecord {
        k: kk,
        max_len,
        buffer_len: buffer.len(),
        power_count,
        power_witnesses,
        band_violations,
        count_violations,
        max_return_count,
        unavailable_bases,
    })
}
