use std::collections::HashSet;
use std::time::{Duration, Instant};

use serde::Serialize;

use super::audit::AuditRecord;
use super::factorization::{enumerate_monotone, Factorization};
use super::VerifyError;
use crate::coloring::FactorColoring;
use crate::par::{map_range, Parallelism};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum SearchStrategy {
    /// Depth-first over parts; a color mismatch prunes every composition
    /// sharing the blocks placed so far.
    #[default]
    Pruned,
    /// Streams every composition and classifies its parts left to right.
    Streaming,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct CheckOptions {
    pub parallelism: Parallelism,
    pub strategy: SearchStrategy,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub factorization: Factorization,
    pub color: String,
}

#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub word_id: String,
    pub k: Option<usize>,
    pub horizon: usize,
    pub h: usize,
    pub counterexample: Option<Counterexample>,
    pub prefixes_checked: usize,
    /// Number of block colorings looked up by the search.
    pub classifications: u64,
    pub colors_observed: usize,
    /// `h = 1`: every nonempty prefix is its own monochromatic factorization.
    pub degenerate: bool,
    pub audit: Option<AuditRecord>,
    pub elapsed: Duration,
}

struct PrefixSearch<'a, C: FactorColoring> {
    coloring: &'a C,
    h: usize,
    total: usize,
    parts: Vec<usize>,
    classifications: u64,
}

impl<C: FactorColoring> PrefixSearch<'_, C> {
    fn descend(&mut self, pos: usize, min_len: usize, target: Option<&C::Color>) -> bool {
        let remaining = self.h - self.parts.len();
        if remaining == 1 {
            let len = self.total - pos;
            if len < min_len {
                return false;
            }
            self.classifications += 1;
            let color = self.coloring.color_at(pos, len);
            if target.is_none_or(|t| *t == color) {
                self.parts.push(len);
                return true;
            }
            return false;
        }
        let mut len = min_len;
        while pos + len * remaining <= self.total {
            self.classifications += 1;
            let color = self.coloring.color_at(pos, len);
            if target.is_none_or(|t| *t == color) {
                self.parts.push(len);
                if self.descend(pos + len, len, Some(target.unwrap_or(&color))) {
                    return true;
                }
                self.parts.pop();
            }
            len += 1;
        }
        false
    }
}

/// Lexicographically first monochromatic monotone `h`-part factorization of
/// the prefix of length `total`, with the number of classifications spent.
fn search_prefix<C: FactorColoring>(
    coloring: &C,
    h: usize,
    total: usize,
    strategy: SearchStrategy,
) -> (Option<Vec<usize>>, u64) {
    match strategy {
        SearchStrategy::Pruned => {
            let mut search = PrefixSearch { coloring, h, total, parts: Vec::with_capacity(h), classifications: 0 };
            let found = search.descend(0, 1, None);
            (found.then_some(search.parts), search.classifications)
        }
        SearchStrategy::Streaming => {
            let mut classifications = 0;
            for parts in enumerate_monotone(total, h) {
                let mut pos = 0;
                let mut first = None;
                let mut mono = true;
                for &len in &parts {
                    classifications += 1;
                    let color = coloring.color_at(pos, len);
                    pos += len;
                    match &first {
                        None => first = Some(color),
                        Some(f) if *f != color => {
                            mono = false;
                            break;
                        }
                        Some(_) => {}
                    }
                }
                if mono {
                    return (Some(parts), classifications);
                }
            }
            (None, classifications)
        }
    }
}

/// Re-checks a counterexample through the content path of the coloring.
fn recheck<C: FactorColoring>(coloring: &C, h: usize, parts: &[usize]) -> Result<C::Color, VerifyError> {
    let fail = |what: &str| Err(VerifyError::InvalidResult(format!("counterexample {parts:?}: {what}")));
    if parts.len() != h || parts.contains(&0) {
        return fail("wrong shape");
    }
    if !parts.windows(2).all(|w| w[0] <= w[1]) {
        return fail("not monotone");
    }
    let word = coloring.word();
    let mut pos = 0;
    let mut first: Option<C::Color> = None;
    for &len in parts {
        let color = coloring.color(&word[pos..pos + len]);
        pos += len;
        match &first {
            None => first = Some(color),
            Some(f) if *f != color => return fail("blocks differ in color"),
            Some(_) => {}
        }
    }
    Ok(first.expect("at least one part"))
}

/// Searches every prefix of length `h..=horizon` for a monotone
/// factorization into exactly `h` blocks of one color.
///
/// Checking exactly `h` blocks covers longer factorizations too: the first
/// `h` blocks of a longer monochromatic monotone factorization form one of
/// length `h` on a shorter prefix.
pub fn check_theorem<C: FactorColoring>(
    coloring: &C,
    horizon: usize,
    h: usize,
    options: CheckOptions,
) -> Result<VerificationReport, VerifyError> {
    let started = Instant::now();
    if h == 0 {
        return Err(VerifyError::InvalidArgument("factorization length h must be at least 1"));
    }
    let available = coloring.horizon().min(coloring.word().len());
    if horizon > available {
        return Err(VerifyError::OutOfRange { requested: horizon, available });
    }

    let totals = h..horizon.max(h - 1) + 1;
    let mut first_hit = None;
    let mut classifications = 0;
    let mut prefixes_checked = 0;
    if options.parallelism.is_parallel() {
        // Every prefix is searched; only work up to the first hit is counted
        // so both modes report the same numbers.
        let results =
            map_range(totals, options.parallelism, |total| search_prefix(coloring, h, total, options.strategy));
        for (hit, spent) in results {
            classifications += spent;
            prefixes_checked += 1;
            if let Some(parts) = hit {
                first_hit = Some(parts);
                break;
            }
        }
    } else {
        for total in totals {
            let (hit, spent) = search_prefix(coloring, h, total, options.strategy);
            classifications += spent;
            prefixes_checked += 1;
            if let Some(parts) = hit {
                first_hit = Some(parts);
                break;
            }
        }
    }

    let counterexample = match first_hit {
        Some(parts) => {
            let color = recheck(coloring, h, &parts)?;
            Some(Counterexample { factorization: Factorization { start: 0, parts }, color: coloring.label(&color) })
        }
        None => None,
    };

    Ok(VerificationReport {
        word_id: String::new(),
        k: None,
        horizon,
        h,
        counterexample,
        prefixes_checked,
        classifications,
        colors_observed: colors_observed(coloring, horizon, options.parallelism),
        degenerate: h == 1,
        audit: None,
        elapsed: started.elapsed(),
    })
}

/// Distinct colors over all factors inside `[0, horizon)`.
fn colors_observed<C: FactorColoring>(coloring: &C, horizon: usize, mode: Parallelism) -> usize {
    let per_start = map_range(0..horizon, mode, |start| {
        (1..=horizon - start).map(|len| coloring.color_at(start, len)).collect::<HashSet<_>>()
    });
    per_start.into_iter().flatten().collect::<HashSet<_>>().len()
}
