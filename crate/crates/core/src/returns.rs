//! Return words to prefixes, derived sequences and the morphisms between
//! return systems of nested prefixes.

use std::collections::{HashMap, HashSet};

use serde::Serialize;
use thiserror::Error;

use crate::par::{map_range, Parallelism};
use crate::word::Symbol;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReturnError {
    #[error("pattern is empty")]
    EmptyPattern,
    #[error("base word is not a prefix of the buffer")]
    NotAPrefix,
    #[error("base occurs {occurrences} time(s) in the window; at least 2 are needed")]
    WindowTooSmall { occurrences: usize },
    #[error("return index {index} out of range (system has {count} returns)")]
    IndexOutOfRange { index: usize, count: usize },
    #[error("boundary {boundary} of the longer base is not a boundary of the shorter one")]
    AlignmentFailure { boundary: usize },
    #[error("bases are not nested prefixes of one word")]
    BaseMismatch,
    #[error("return system for a base of length {base_len} is not stable")]
    Unstable { base_len: usize },
    #[error("re-expressed return {index} does not concatenate back to the original return")]
    LambdaMismatch { index: usize },
    #[error("maximum base length must be at least 1")]
    InvalidBaseLength,
}

/// All positions `p` with `text[p..p + u.len()] == u`, overlaps included.
pub fn occurrences(text: &[Symbol], u: &[Symbol]) -> Result<Vec<usize>, ReturnError> {
    if u.is_empty() {
        return Err(ReturnError::EmptyPattern);
    }
    if u.len() > text.len() {
        return Ok(Vec::new());
    }
    Ok((0..=text.len() - u.len()).filter(|&p| text[p..p + u.len()] == *u).collect())
}

/// The tiling of a window of `x` by returns to a prefix `u`.
///
/// `boundaries[j]` is the `j`-th occurrence of `u`; tile `j` spans
/// `boundaries[j]..boundaries[j + 1]` and is `returns[derived[j]]`. Returns
/// are numbered in order of first occurrence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReturnSystem {
    base: Vec<Symbol>,
    returns: Vec<Vec<Symbol>>,
    derived: Vec<usize>,
    boundaries: Vec<usize>,
    window: usize,
    stable: bool,
}

impl ReturnSystem {
    pub fn base(&self) -> &[Symbol] {
        &self.base
    }

    pub fn returns(&self) -> &[Vec<Symbol>] {
        &self.returns
    }

    /// Derived sequence: return index of every complete tile in the window.
    pub fn derived(&self) -> &[usize] {
        &self.derived
    }

    pub fn boundaries(&self) -> &[usize] {
        &self.boundaries
    }

    pub fn window(&self) -> usize {
        self.window
    }

    /// The return set seen in the first half of the window equals the full one.
    pub fn is_stable(&self) -> bool {
        self.stable
    }

    /// Number of complete tiles before position `len`, if `len` is a boundary.
    pub fn tile_count_at(&self, len: usize) -> Option<usize> {
        self.boundaries.binary_search(&len).ok()
    }

    /// Θ: concatenation of the returns named by `indices`.
    pub fn theta(&self, indices: &[usize]) -> Result<Vec<Symbol>, ReturnError> {
        let mut out = Vec::new();
        for &i in indices {
            let ret =
                self.returns.get(i).ok_or(ReturnError::IndexOutOfRange { index: i, count: self.returns.len() })?;
            out.extend_from_slice(ret);
        }
        Ok(out)
    }

    /// The unique index word `r` with `theta(r) == v`, when `v` is the
    /// prefix of the tiled window ending at a tile boundary.
    pub fn parse_by_returns(&self, v: &[Symbol]) -> Option<Vec<usize>> {
        if v.is_empty() {
            return None;
        }
        let tiles = self.tile_count_at(v.len())?;
        let indices = &self.derived[..tiles];
        let mut rest = v;
        for &i in indices {
            let ret = &self.returns[i];
            if !rest.starts_with(ret) {
                return None;
            }
            rest = &rest[ret.len()..];
        }
        Some(indices.to_vec())
    }
}

/// Return system of the prefix `u` over `buffer[..window]`. The window is
/// clamped to the buffer length.
pub fn return_system(buffer: &[Symbol], u: &[Symbol], window: usize) -> Result<ReturnSystem, ReturnError> {
    if u.is_empty() {
        return Err(ReturnError::EmptyPattern);
    }
    if !buffer.starts_with(u) {
        return Err(ReturnError::NotAPrefix);
    }
    let window = window.min(buffer.len());
    let boundaries = occurrences(&buffer[..window], u)?;
    if boundaries.len() < 2 {
        return Err(ReturnError::WindowTooSmall { occurrences: boundaries.len() });
    }
    let mut index: HashMap<&[Symbol], usize> = HashMap::new();
    let mut returns = Vec::new();
    let mut derived = Vec::with_capacity(boundaries.len() - 1);
    // A return first seen in tile j is visible in the half window iff the
    // occurrence closing it fits there.
    let mut settled = true;
    for pair in boundaries.windows(2) {
        let ret = &buffer[pair[0]..pair[1]];
        let next = index.len();
        let id = *index.entry(ret).or_insert_with(|| {
            returns.push(ret.to_vec());
            if pair[1] + u.len() > window / 2 {
                settled = false;
            }
            next
        });
        derived.push(id);
    }
    Ok(ReturnSystem { base: u.to_vec(), returns, derived, boundaries, window, stable: settled })
}

/// Return system of the length-`base_len` prefix.
pub fn prefix_return_system(buffer: &[Symbol], base_len: usize, window: usize) -> Result<ReturnSystem, ReturnError> {
    if base_len == 0 {
        return Err(ReturnError::EmptyPattern);
    }
    if base_len > buffer.len() {
        return Err(ReturnError::WindowTooSmall { occurrences: 0 });
    }
    return_system(buffer, &buffer[..base_len], window)
}

/// λ: re-expresses every return of the longer base `u` as an index word over
/// the returns of the shorter base `v`, by aligning the two tilings.
pub fn lambda_morphism(sys_u: &ReturnSystem, sys_v: &ReturnSystem) -> Result<Vec<Vec<usize>>, ReturnError> {
    if sys_v.base.len() > sys_u.base.len() || !sys_u.base.starts_with(&sys_v.base) {
        return Err(ReturnError::BaseMismatch);
    }
    for sys in [sys_u, sys_v] {
        if !sys.stable {
            return Err(ReturnError::Unstable { base_len: sys.base.len() });
        }
    }
    let mut mapping = Vec::with_capacity(sys_u.returns.len());
    for (i, ret) in sys_u.returns.iter().enumerate() {
        let tile = sys_u.derived.iter().position(|&d| d == i).expect("every return occurs in the derived sequence");
        let (start, end) = (sys_u.boundaries[tile], sys_u.boundaries[tile + 1]);
        let from = sys_v.tile_count_at(start).ok_or(ReturnError::AlignmentFailure { boundary: start })?;
        let to = sys_v.tile_count_at(end).ok_or(ReturnError::AlignmentFailure { boundary: end })?;
        let image = sys_v.derived[from..to].to_vec();
        if sys_v.theta(&image)? != *ret {
            return Err(ReturnError::LambdaMismatch { index: i });
        }
        mapping.push(image);
    }
    Ok(mapping)
}

/// Return statistics of one factor.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KSample {
    pub factor: Vec<Symbol>,
    pub min_return_len: usize,
    pub max_return_len: usize,
    pub return_count: usize,
}

impl KSample {
    pub fn factor_len(&self) -> usize {
        self.factor.len()
    }
}

/// Empirical linear-recurrence constant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KEstimate {
    pub k_hat: usize,
    pub samples: Vec<KSample>,
    /// Every sample satisfies `|u|/K < |w| <= K|u|` and `|Ret(u)| <= K(K+1)²`.
    pub margin_ok: bool,
    pub window: usize,
    /// Sample attaining the largest `max_return_len / |u|`.
    pub witness: Option<KSample>,
}

struct LengthScan {
    samples: Vec<KSample>,
    /// Largest end position at which some (factor, return) pair was first
    /// completed.
    settle: usize,
}

fn scan_length(text: &[Symbol], len: usize) -> LengthScan {
    struct Stats<'a> {
        last: usize,
        returns: HashSet<&'a [Symbol]>,
        min: usize,
        max: usize,
    }
    let mut stats: HashMap<&[Symbol], Stats> = HashMap::new();
    let mut settle = 0;
    if len <= text.len() {
        for p in 0..=text.len() - len {
            let u = &text[p..p + len];
            match stats.get_mut(u) {
                Some(s) => {
                    let ret = &text[s.last..p];
                    if s.returns.insert(ret) {
                        settle = settle.max(p + len);
                        s.min = s.min.min(ret.len());
                        s.max = s.max.max(ret.len());
                    }
                    s.last = p;
                }
                None => {
                    stats.insert(u, Stats { last: p, returns: HashSet::new(), min: usize::MAX, max: 0 });
                }
            }
        }
    }
    let mut samples: Vec<KSample> = stats
        .into_iter()
        .filter(|(_, s)| !s.returns.is_empty())
        .map(|(u, s)| KSample {
            factor: u.to_vec(),
            min_return_len: s.min,
            max_return_len: s.max,
            return_count: s.returns.len(),
        })
        .collect();
    samples.sort_by(|a, b| a.factor.cmp(&b.factor));
    LengthScan { samples, settle }
}

fn ceil_ratio(sample: &KSample) -> usize {
    sample.max_return_len.div_ceil(sample.factor_len())
}

fn margin_holds(k: usize, sample: &KSample) -> bool {
    let len = sample.factor_len();
    sample.return_count <= k * (k + 1) * (k + 1) && k * sample.min_return_len > len && sample.max_return_len <= k * len
}

/// Estimates the linear-recurrence constant from the returns of every factor
/// of length at most `max_base_len`.
///
/// The window starts at `4 * max_base_len` and grows (to `(k_hat + 2) *
/// max_base_len`, doubling while unstable) until the set of (factor, return)
/// pairs seen in its first half equals the full set, capped at the buffer.
pub fn estimate_k(buffer: &[Symbol], max_base_len: usize, mode: Parallelism) -> Result<KEstimate, ReturnError> {
    if max_base_len == 0 {
        return Err(ReturnError::InvalidBaseLength);
    }
    let mut window = (4 * max_base_len).min(buffer.len());
    loop {
        let text = &buffer[..window];
        let scans = map_range(1..max_base_len + 1, mode, |len| scan_length(text, len));
        let stable = scans.iter().all(|s| s.settle <= window / 2);
        let samples: Vec<KSample> = scans.into_iter().flat_map(|s| s.samples).collect();
        let k_hat = samples.iter().map(ceil_ratio).max().unwrap_or(0).max(2);
        let wanted = ((k_hat + 2) * max_base_len).min(buffer.len());
        if stable && !samples.is_empty() && window >= wanted {
            let witness = samples
                .iter()
                .max_by(|a, b| (a.max_return_len * b.factor_len()).cmp(&(b.max_return_len * a.factor_len())))
                .cloned();
            let margin_ok = samples.iter().all(|s| margin_holds(k_hat, s));
            return Ok(KEstimate { k_hat, samples, margin_ok, window, witness });
        }
        if window == buffer.len() {
            return Err(ReturnError::Unstable { base_len: max_base_len });
        }
        window = wanted.max(2 * window).min(buffer.len());
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::{prefix, Alphabet, WordSource};

    fn ab(text: &str) -> Vec<Symbol> {
        Alphabet::ab().parse_word(text).unwrap()
    }

    fn fib(n: usize) -> Vec<Symbol> {
        prefix(&WordSource::fibonacci(), n).unwrap().as_slice().to_vec()
    }

    #[test]
    fn occurrence_examples() {
        assert_eq!(occurrences(&ab("abaababaabaab"), &ab("ab")).unwrap(), vec![0, 3, 5, 8, 11]);
        assert_eq!(occurrences(&ab("aaaa"), &ab("aa")).unwrap(), vec![0, 1, 2]);
        let abc = Alphabet::new(["a", "b", "c", "d"]).unwrap();
        let text = abc.parse_word("abc").unwrap();
        assert!(occurrences(&text, &abc.parse_word("d").unwrap()).unwrap().is_empty());
        assert_eq!(occurrences(&text, &[]), Err(ReturnError::EmptyPattern));
    }

    #[test]
    fn fibonacci_return_systems() {
        let x = fib(200);
        let a = return_system(&x, &ab("a"), 200).unwrap();
        assert_eq!(a.returns(), &[ab("ab"), ab("a")]);
        assert_eq!(&a.derived()[..5], &[0, 1, 0, 0, 1]);
        assert!(a.is_stable());

        let sys = return_system(&x, &ab("ab"), 200).unwrap();
        assert_eq!(sys.returns(), &[ab("aba"), ab("ab")]);
        assert_eq!(&sys.boundaries()[..5], &[0, 3, 5, 8, 11]);
    }

    #[test]
    fn single_occurrence_is_too_small() {
        let abc = Alphabet::new(["a", "b", "c"]).unwrap();
        let text = abc.parse_word("cabab").unwrap();
        assert_eq!(return_system(&text, &text[..1], 5), Err(ReturnError::WindowTooSmall { occurrences: 1 }));
        assert_eq!(return_system(&text, &abc.parse_word("a").unwrap(), 5), Err(ReturnError::NotAPrefix));
    }

    #[test]
    fn theta_examples() {
        let x = fib(200);
        let a = return_system(&x, &ab("a"), 200).unwrap();
        assert_eq!(a.theta(&[0, 1]).unwrap(), ab("aba"));
        assert_eq!(a.theta(&[]).unwrap(), Vec::<Symbol>::new());
        assert_eq!(a.theta(&[2]), Err(ReturnError::IndexOutOfRange { index: 2, count: 2 }));
        let sys = return_system(&x, &ab("ab"), 200).unwrap();
        assert_eq!(sys.theta(&[1, 0]).unwrap(), ab("ababa"));
    }

    #[test]
    fn parse_examples() {
        let x = fib(200);
        let sys = return_system(&x, &ab("ab"), 200).unwrap();
        assert_eq!(sys.parse_by_returns(&ab("abaab")), Some(vec![0, 1]));
        let abx = Alphabet::new(["a", "b", "x"]).unwrap();
        let v = abx.parse_word("abax").unwrap();
        assert_eq!(sys.parse_by_returns(&v), None);
        // boundary length, wrong content
        assert_eq!(sys.parse_by_returns(&ab("abb")), None);
        let a = return_system(&x, &ab("a"), 200).unwrap();
        assert_eq!(a.parse_by_returns(&ab("ab")), Some(vec![0]));
        assert_eq!(a.parse_by_returns(&[]), None);
    }

    #[test]
    fn lambda_examples() {
        let x = fib(400);
        let u = return_system(&x, &ab("ab"), 400).unwrap();
        let v = return_system(&x, &ab("a"), 400).unwrap();
        assert_eq!(lambda_morphism(&u, &v).unwrap(), vec![vec![0, 1], vec![0]]);
        assert_eq!(lambda_morphism(&u, &u).unwrap(), vec![vec![0], vec![1]]);
        assert_eq!(lambda_morphism(&v, &u), Err(ReturnError::BaseMismatch));
    }

    #[test]
    fn lambda_detects_misaligned_boundaries() {
        let x = fib(400);
        let u = return_system(&x, &ab("ab"), 400).unwrap();
        let mut v = return_system(&x, &ab("a"), 400).unwrap();
        // drop boundary 3 from the shorter tiling
        let pos = v.boundaries.iter().position(|&b| b == 3).unwrap();
        v.boundaries.remove(pos);
        assert_eq!(lambda_morphism(&u, &v), Err(ReturnError::AlignmentFailure { boundary: 3 }));
    }

    #[test]
    fn lambda_requires_stability() {
        let x = fib(400);
        let u = return_system(&x, &ab("ab"), 400).unwrap();
        let v = return_system(&x, &ab("a"), 4).unwrap();
        assert!(!v.is_stable());
        assert_eq!(lambda_morphism(&u, &v), Err(ReturnError::Unstable { base_len: 1 }));
    }

    #[test]
    fn periodic_word_has_one_return() {
        let x = prefix(
            &WordSource::EventuallyPeriodic { alphabet: Alphabet::ab(), preperiod: vec![], period: ab("ab") },
            40,
        )
        .unwrap();
        let sys = prefix_return_system(x.as_slice(), 2, 40).unwrap();
        assert_eq!(sys.returns(), &[ab("ab")]);
        assert!(sys.derived().iter().all(|&d| d == 0));
    }

    #[test]
    fn estimate_on_fibonacci() {
        let x = fib(4096);
        let est = estimate_k(&x, 34, Parallelism::Sequential).unwrap();
        assert_eq!(est.k_hat, 3);
        assert!(est.margin_ok);
        let witness = est.witness.unwrap();
        assert_eq!(witness.factor, ab("b"));
        assert_eq!(witness.max_return_len, 3);
    }

    #[test]
    fn estimate_rejects_zero_length() {
        assert_eq!(estimate_k(&fib(10), 0, Parallelism::Sequential), Err(ReturnError::InvalidBaseLength));
    }

    #[test]
    fn estimate_reports_unstable_short_buffer() {
        let x = fib(40);
        assert!(matches!(estimate_k(&x, 20, Parallelism::Sequential), Err(ReturnError::Unstable { .. })));
    }
}
