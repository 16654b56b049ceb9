//! Edge-colored complete graphs on cut positions: `{i, j}` gets the color of
//! the factor `x[i..j]`. A monochromatic clique `i₀ < … < i_t` is exactly a
//! strongly monochromatic factorization of `x[i₀..i_t]`.

use std::collections::HashMap;

use serde::Serialize;

use super::factorization::Factorization;
use super::VerifyError;
use crate::coloring::FactorColoring;
use crate::word::{PrefixBuffer, Symbol};

/// `u^h` followed by the tail buffer.
pub fn prepend_power(u: &[Symbol], h: usize, tail: &PrefixBuffer) -> PrefixBuffer {
    let mut word = Vec::with_capacity(u.len() * h + tail.len());
    for _ in 0..h {
        word.extend_from_slice(u);
    }
    word.extend_from_slice(tail.as_slice());
    PrefixBuffer::from_literal(tail.alphabet().clone(), word)
}

fn starts_with_power(word: &[Symbol], u: &[Symbol], h: usize) -> bool {
    word.len() >= u.len() * h && word.chunks(u.len()).take(h).all(|c| c == u)
}

/// The factorization `(u, u, …, u)` of the prefix `u^h`, checked to be
/// monotone and monochromatic under `coloring`.
pub fn check_example_prepend<C: FactorColoring>(
    u: &[Symbol],
    h: usize,
    coloring: &C,
) -> Result<Factorization, VerifyError> {
    if u.is_empty() || h == 0 {
        return Err(VerifyError::InvalidArgument("u must be nonempty and h at least 1"));
    }
    let word = coloring.word();
    if !starts_with_power(word, u, h) {
        return Err(VerifyError::NotAPrependedWord);
    }
    if u.len() > coloring.horizon() {
        return Err(VerifyError::OutOfRange { requested: u.len(), available: coloring.horizon() });
    }
    let factorization = Factorization { start: 0, parts: vec![u.len(); h] };
    let colors: Vec<C::Color> = word.chunks(u.len()).take(h).map(|block| coloring.color(block)).collect();
    if !factorization.is_monotone() || colors.windows(2).any(|w| w[0] != w[1]) {
        return Err(VerifyError::InvalidResult("equal blocks received different colors".into()));
    }
    Ok(factorization)
}

/// True iff every factor between two cut positions has one common color,
/// i.e. every coarser factorization is monochromatic as well.
pub fn verify_strongly_monochromatic<C: FactorColoring>(
    coloring: &C,
    start: usize,
    parts: &[usize],
) -> Result<bool, VerifyError> {
    let end = start + parts.iter().sum::<usize>();
    let available = coloring.horizon().min(coloring.word().len());
    if end > available {
        return Err(VerifyError::OutOfRange { requested: end, available });
    }
    if parts.contains(&0) {
        return Err(VerifyError::InvalidArgument("parts must be positive"));
    }
    let mut cuts = vec![start];
    for &p in parts {
        cuts.push(cuts[cuts.len() - 1] + p);
    }
    let mut common: Option<C::Color> = None;
    for (a, &i) in cuts.iter().enumerate() {
        for &j in &cuts[a + 1..] {
            let color = coloring.color_at(i, j - i);
            match &common {
                None => common = Some(color),
                Some(c) if *c != color => return Ok(false),
                Some(_) => {}
            }
        }
    }
    Ok(true)
}

/// Exhaustive search for a monochromatic `size`-clique in a complete graph
/// with edge colors `edge[i][j]`, `i < j`. Vertices are tried in increasing
/// order, so the result is the lexicographically first clique.
fn find_clique<T: Eq>(edge: &[Vec<Option<T>>], size: usize) -> Option<Vec<usize>> {
    fn extend<T: Eq>(edge: &[Vec<Option<T>>], size: usize, clique: &mut Vec<usize>) -> bool {
        if clique.len() == size {
            return true;
        }
        let from = clique.last().map_or(0, |&v| v + 1);
        for w in from..edge.len() {
            // the first edge of the clique fixes its color
            let fits = match clique.as_slice() {
                [] | [_] => true,
                [v0, v1, ..] => clique.iter().all(|&v| edge[v][w] == edge[*v0][*v1]),
            };
            if fits {
                clique.push(w);
                if extend(edge, size, clique) {
                    return true;
                }
                clique.pop();
            }
        }
        false
    }
    let mut clique = Vec::with_capacity(size);
    extend(edge, size, &mut clique).then_some(clique)
}

/// Strongly monochromatic factorization of a prefix of `y = u^H · tail` into
/// `h` blocks, found as a monochromatic `(h+1)`-clique on the vertices
/// `{0, |u|, …, H|u|}` and shifted to start at 0.
///
/// `None` when no such clique exists, in particular when `H < h`.
pub fn find_strongly_mono_prefix<C: FactorColoring>(
    u: &[Symbol],
    h: usize,
    big_h: usize,
    coloring: &C,
) -> Result<Option<Factorization>, VerifyError> {
    if u.is_empty() || h == 0 {
        return Err(VerifyError::InvalidArgument("u must be nonempty and h at least 1"));
    }
    if big_h < h {
        return Ok(None);
    }
    if !starts_with_power(coloring.word(), u, big_h) {
        return Err(VerifyError::NotAPrependedWord);
    }
    let span = u.len() * big_h;
    let available = coloring.horizon().min(coloring.word().len());
    if span > available {
        return Err(VerifyError::OutOfRange { requested: span, available });
    }
    let step = u.len();
    let edge: Vec<Vec<Option<C::Color>>> = (0..=big_h)
        .map(|i| (0..=big_h).map(|j| (j > i).then(|| coloring.color_at(i * step, (j - i) * step))).collect())
        .collect();
    let Some(clique) = find_clique(&edge, h + 1) else {
        return Ok(None);
    };
    // Inside u^H the factor between two vertices depends only on their
    // distance, so the clique can be translated to start at 0.
    let parts: Vec<usize> = clique.windows(2).map(|w| (w[1] - w[0]) * step).collect();
    if !verify_strongly_monochromatic(coloring, 0, &parts)? {
        return Err(VerifyError::InvalidResult("shifted clique is not monochromatic".into()));
    }
    Ok(Some(Factorization { start: 0, parts }))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RamseyTail {
    /// Index of the tail `x[start..]`.
    pub start: usize,
    pub factorization: Factorization,
}

const BACKTRACK_BUDGET: u64 = 2_000_000;

/// Greedy pivot sequence: take the smallest candidate, keep the candidates
/// joined to it in its majority color. Edges from a pivot to every later
/// pivot share that pivot's color, so pivots of one color form a clique,
/// which also extends to the pivot following the last of them.
fn pivot_clique<C: FactorColoring>(coloring: &C, horizon: usize, size: usize) -> Option<Vec<usize>> {
    let mut candidates: Vec<usize> = (0..=horizon).collect();
    let mut pivots: Vec<(usize, Option<C::Color>)> = Vec::new();
    while let Some((&pivot, rest)) = candidates.split_first() {
        if rest.is_empty() {
            pivots.push((pivot, None));
            break;
        }
        let colors: Vec<C::Color> = rest.iter().map(|&w| coloring.color_at(pivot, w - pivot)).collect();
        let mut tally: HashMap<&C::Color, (usize, usize)> = HashMap::new();
        for (order, color) in colors.iter().enumerate() {
            tally.entry(color).or_insert((0, order)).0 += 1;
        }
        let (&majority, _) =
            tally.iter().max_by(|a, b| a.1 .0.cmp(&b.1 .0).then(b.1 .1.cmp(&a.1 .1))).expect("rest is nonempty");
        let majority = majority.clone();
        candidates = rest.iter().zip(&colors).filter(|(_, c)| **c == majority).map(|(&w, _)| w).collect();
        pivots.push((pivot, Some(majority)));
    }

    let mut best: Option<Vec<usize>> = None;
    for (idx, (_, color)) in pivots.iter().enumerate() {
        let Some(color) = color else { continue };
        if pivots[..idx].iter().any(|(_, c)| c.as_ref() == Some(color)) {
            continue;
        }
        let members: Vec<usize> =
            pivots.iter().enumerate().filter(|(_, (_, c))| c.as_ref() == Some(color)).map(|(i, _)| i).collect();
        let mut clique: Vec<usize> = members.iter().map(|&i| pivots[i].0).collect();
        if let Some(&(follower, _)) = pivots.get(members[members.len() - 1] + 1) {
            clique.push(follower);
        }
        if best.as_ref().is_none_or(|b| clique.len() > b.len()) {
            best = Some(clique);
        }
    }
    best.filter(|c| c.len() >= size).map(|mut c| {
        c.truncate(size);
        c
    })
}

struct ColorDfs<'a, C: FactorColoring> {
    coloring: &'a C,
    color: C::Color,
    size: usize,
    budget: u64,
}

impl<C: FactorColoring> ColorDfs<'_, C> {
    fn extend(&mut self, clique: &mut Vec<usize>, candidates: &[usize]) -> bool {
        if clique.len() == self.size {
            return true;
        }
        for (k, &pivot) in candidates.iter().enumerate() {
            if clique.len() + candidates.len() - k < self.size || self.budget == 0 {
                return false;
            }
            self.budget -= 1;
            let next: Vec<usize> = candidates[k + 1..]
                .iter()
                .copied()
                .filter(|&w| self.coloring.color_at(pivot, w - pivot) == self.color)
                .collect();
            clique.push(pivot);
            if self.extend(clique, &next) {
                return true;
            }
            clique.pop();
        }
        false
    }
}

/// Searches `0..=horizon` for cut positions `i₀ < … < i_t` whose pairwise
/// factors all share one color, giving a strongly monochromatic
/// factorization of `x[i₀..i_t]` into `t` blocks.
///
/// Runs the greedy pivot sequence first, then a budgeted depth-first search
/// per color. `None` means the horizon (or budget) was insufficient, not
/// that no such tail exists.
pub fn find_ramsey_tail<C: FactorColoring>(
    coloring: &C,
    horizon: usize,
    t: usize,
) -> Result<Option<RamseyTail>, VerifyError> {
    if t == 0 {
        return Err(VerifyError::InvalidArgument("block count t must be at least 1"));
    }
    let available = coloring.horizon().min(coloring.word().len());
    if horizon > available {
        return Err(VerifyError::OutOfRange { requested: horizon, available });
    }
    if t > horizon {
        return Ok(None);
    }
    let size = t + 1;
    let clique = pivot_clique(coloring, horizon, size).or_else(|| {
        let mut colors: Vec<C::Color> = Vec::new();
        for j in 1..=horizon {
            let c = coloring.color_at(0, j);
            if !colors.contains(&c) {
                colors.push(c);
            }
        }
        for i in 1..horizon {
            let c = coloring.color_at(i, 1);
            if !colors.contains(&c) {
                colors.push(c);
            }
        }
        let all: Vec<usize> = (0..=horizon).collect();
        colors.into_iter().find_map(|color| {
            let mut dfs = ColorDfs { coloring, color, size, budget: BACKTRACK_BUDGET };
            let mut clique = Vec::with_capacity(size);
            dfs.extend(&mut clique, &all).then_some(clique)
        })
    });
    let Some(clique) = clique else {
        return Ok(None);
    };
    let parts: Vec<usize> = clique.windows(2).map(|w| w[1] - w[0]).collect();
    if !verify_strongly_monochromatic(coloring, clique[0], &parts)? {
        return Err(VerifyError::InvalidResult("tail clique is not monochromatic".into()));
    }
    Ok(Some(RamseyTail { start: clique[0], factorization: Factorization { start: clique[0], parts } }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coloring::{ConstantColoring, FirstLetterColoring, FnColoring};
    use crate::word::{prefix, Alphabet, WordSource};

    #[test]
    fn prepend_examples() {
        let tail = prefix(&WordSource::fibonacci(), 20).unwrap();
        let u = Alphabet::ab().parse_word("ab").unwrap();
        let y = prepend_power(&u, 3, &tail);
        let coloring = FnColoring::new(y.as_slice(), |f: &[u8]| f.to_vec());
        let f = check_example_prepend(&u, 3, &coloring).unwrap();
        assert_eq!(f.parts, vec![2, 2, 2]);

        let a = vec![0];
        let y = prepend_power(&a, 1, &tail);
        let f = check_example_prepend(&a, 1, &FirstLetterColoring::new(&y)).unwrap();
        assert_eq!(f.parts, vec![1]);

        assert_eq!(
            check_example_prepend(&u, 3, &FirstLetterColoring::new(&tail)).unwrap_err(),
            VerifyError::NotAPrependedWord
        );
    }

    #[test]
    fn strongly_mono_checks() {
        let buf = prefix(&WordSource::fibonacci(), 20).unwrap();
        let constant = ConstantColoring::new(buf.as_slice());
        assert!(verify_strongly_monochromatic(&constant, 3, &[4]).unwrap());
        // blocks "a" and "b" are both odd length, their merge "ab" is not
        let parity = FnColoring::new(buf.as_slice(), |f: &[u8]| f.len() % 2);
        assert!(!verify_strongly_monochromatic(&parity, 0, &[1, 1]).unwrap());
        assert_eq!(
            verify_strongly_monochromatic(&constant, 15, &[3, 3]).unwrap_err(),
            VerifyError::OutOfRange { requested: 21, available: 20 }
        );
    }

    #[test]
    fn constant_coloring_gives_unit_blocks() {
        let buf = prefix(&WordSource::fibonacci(), 50).unwrap();
        let tail = find_ramsey_tail(&ConstantColoring::new(buf.as_slice()), 50, 5).unwrap().unwrap();
        assert_eq!(tail.start, 0);
        assert_eq!(tail.factorization.parts, vec![1; 5]);
    }

    #[test]
    fn too_many_blocks_for_the_horizon() {
        let buf = prefix(&WordSource::fibonacci(), 50).unwrap();
        let coloring = ConstantColoring::new(buf.as_slice());
        assert_eq!(find_ramsey_tail(&coloring, 10, 12).unwrap(), None);
        assert!(find_ramsey_tail(&coloring, 10, 10).unwrap().is_some());
    }

    #[test]
    fn per_color_search_finds_parity_clique() {
        let buf = prefix(&WordSource::fibonacci(), 60).unwrap();
        let coloring = FnColoring::new(buf.as_slice(), |f: &[u8]| f.len() % 2);
        let mut dfs = ColorDfs { coloring: &coloring, color: 0, size: 9, budget: BACKTRACK_BUDGET };
        let mut clique = Vec::new();
        let all: Vec<usize> = (0..=60).collect();
        assert!(dfs.extend(&mut clique, &all));
        assert_eq!(clique, vec![0, 2, 4, 6, 8, 10, 12, 14, 16]);
        let mut dfs = ColorDfs { coloring: &coloring, color: 1, size: 3, budget: BACKTRACK_BUDGET };
        let mut clique = Vec::new();
        assert!(!dfs.extend(&mut clique, &all));
    }

    #[test]
    fn tail_for_parity_coloring_is_verified() {
        let buf = prefix(&WordSource::fibonacci(), 60).unwrap();
        let coloring = FnColoring::new(buf.as_slice(), |f: &[u8]| f.len() % 2);
        let tail = find_ramsey_tail(&coloring, 60, 8).unwrap().unwrap();
        assert!(tail.factorization.parts.iter().all(|p| p % 2 == 0));
        assert!(verify_strongly_monochromatic(&coloring, tail.start, &tail.factorization.parts).unwrap());
    }

    #[test]
    fn strongly_mono_prefix_cases() {
        let a = vec![0];
        let tail = prefix(&WordSource::fibonacci(), 20).unwrap();
        let y = prepend_power(&a, 5, &tail);
        let constant = ConstantColoring::new(y.as_slice());
        let f = find_strongly_mono_prefix(&a, 3, 3, &constant).unwrap().unwrap();
        assert_eq!(f.parts, vec![1, 1, 1]);
        assert_eq!(find_strongly_mono_prefix(&a, 3, 2, &constant).unwrap(), None);
    }
}
