//! The level-based factor coloring of a linearly recurrent word.
//!
//! For `p_n` the prefix of length `K^n` and `n(u)` the exponent with
//! `K^n <= |u| < K^{n+1}`, a factor `u` is colored
//!
//! * `(n(u) mod 2, r(u))` when `u` is a prefix tiled by at most `K²` returns
//!   to `p_{n(u)}`, where `r(u)` spells `u` over the returns to `p_{n(u)-1}`;
//! * `$` when `u` is any other prefix;
//! * `#` when `u` is not a prefix.
//!
//! Level membership is decided by boundary lookup in the precomputed tiling
//! of each `p_n`. At `n = 0` the parse uses the returns to `p_0`.

use std::collections::HashMap;
use std::fmt;
use std::hash::Hash;

use num_bigint::BigUint;
use num_traits::One;
use serde::Serialize;
use thiserror::Error;

use crate::returns::{prefix_return_system, ReturnError, ReturnSystem};
use crate::word::{Alphabet, PrefixBuffer, Symbol};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ColoringError {
    #[error("recurrence constant must be at least 2, got {0}")]
    InvalidConstant(usize),
    #[error("buffer has {available} symbols, {needed} needed")]
    BufferTooShort { needed: usize, available: usize },
    #[error("target length must be at least 1")]
    EmptyTarget,
    #[error("return system of level {level} (prefix length {base_len}) is not stable")]
    Unstable { level: usize, base_len: usize },
    #[error(transparent)]
    Return(#[from] ReturnError),
    #[error("factor length {len} exceeds the colorable length {max}")]
    OutOfRange { len: usize, max: usize },
    #[error("cannot color the empty word")]
    EmptyFactor,
    #[error("invariant violated for the prefix of length {len}: {what}")]
    InvariantViolation { len: usize, what: String },
}

/// Linear-recurrence constant `K >= 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct RecurrenceConstant(usize);

impl RecurrenceConstant {
    pub fn new(k: usize) -> Result<Self, ColoringError> {
        if k < 2 {
            return Err(ColoringError::InvalidConstant(k));
        }
        Ok(Self(k))
    }

    pub fn get(self) -> usize {
        self.0
    }

    /// Size of the common return index set `B`, `K(K+1)²`.
    pub fn index_set_size(self) -> usize {
        self.0 * (self.0 + 1) * (self.0 + 1)
    }
}

impl fmt::Display for RecurrenceConstant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Color {
    Hash,
    Dollar,
    Code { parity: u8, word: Vec<usize> },
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Color::Hash => f.write_str("#"),
            Color::Dollar => f.write_str("$"),
            Color::Code { parity, word } => {
                let indices: Vec<String> = word.iter().map(usize::to_string).collect();
                write!(f, "({};{})", parity, indices.join("."))
            }
        }
    }
}

/// Interned color of a [`ColoringContext`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ColorId(u32);

impl ColorId {
    pub const HASH: ColorId = ColorId(0);
    pub const DOLLAR: ColorId = ColorId(1);
}

/// The unique `n` with `K^n <= len < K^{n+1}`.
pub fn n_of(len: usize, k: RecurrenceConstant) -> usize {
    assert!(len >= 1, "n_of is undefined for the empty word");
    let mut n = 0;
    let mut power = 1usize;
    while let Some(next) = power.checked_mul(k.get()) {
        if next > len {
            break;
        }
        power = next;
        n += 1;
    }
    n
}

/// A coloring of the factors of one fixed word.
pub trait FactorColoring: Sync {
    type Color: Clone + Eq + Hash + fmt::Debug + Send + Sync;

    /// The word whose factors are colored.
    fn word(&self) -> &[Symbol];

    /// Factors ending at or before this position can be colored.
    fn horizon(&self) -> usize {
        self.word().len()
    }

    /// Color of a factor, computed from its content alone.
    fn color(&self, factor: &[Symbol]) -> Self::Color;

    /// Color of `word()[start..start + len]`.
    fn color_at(&self, start: usize, len: usize) -> Self::Color {
        self.color(&self.word()[start..start + len])
    }

    fn label(&self, color: &Self::Color) -> String;
}

/// Precomputed state of the level coloring up to `max_colorable_len`.
#[derive(Debug, Clone)]
pub struct ColoringContext {
    word: Vec<Symbol>,
    alphabet: Alphabet,
    k: RecurrenceConstant,
    levels: Vec<ReturnSystem>,
    max_colorable_len: usize,
    palette: Vec<Color>,
    prefix_colors: Vec<ColorId>,
    /// `prefix_match[s]`: longest common prefix of `word[s..horizon]` and `word`.
    prefix_match: Vec<usize>,
    level0_codes: usize,
}

/// Z-function: `z[i]` is the length of the longest common prefix of
/// `text` and `text[i..]`, with `z[0] = text.len()`.
pub(crate) fn z_function(text: &[Symbol]) -> Vec<usize> {
    let n = text.len();
    let mut z = vec![0; n];
    if n == 0 {
        return z;
    }
    z[0] = n;
    let (mut left, mut right) = (0, 0);
    for i in 1..n {
        if i < right {
            z[i] = (right - i).min(z[i - left]);
        }
        while i + z[i] < n && text[z[i]] == text[i + z[i]] {
            z[i] += 1;
        }
        if i + z[i] > right {
            left = i;
            right = i + z[i];
        }
    }
    z
}

/// Builds the levels `p_0, p_1, …` with `K^n <= target_len` over the whole
/// buffer and colors every prefix up to `target_len`.
///
/// Needs a buffer of at least `(K + 2) * target_len` symbols.
pub fn build_context(
    buffer: &PrefixBuffer,
    k: RecurrenceConstant,
    target_len: usize,
) -> Result<ColoringContext, ColoringError> {
    if target_len == 0 {
        return Err(ColoringError::EmptyTarget);
    }
    let needed = (k.get() + 2).saturating_mul(target_len);
    if buffer.len() < needed {
        return Err(ColoringError::BufferTooShort { needed, available: buffer.len() });
    }
    let word = buffer.as_slice();

    let mut levels = Vec::new();
    let mut base_len = 1usize;
    while base_len <= target_len {
        let system = prefix_return_system(word, base_len, word.len())?;
        if !system.is_stable() {
            return Err(ColoringError::Unstable { level: levels.len(), base_len });
        }
        levels.push(system);
        match base_len.checked_mul(k.get()) {
            Some(next) => base_len = next,
            None => break,
        }
    }

    let kk = k.get();
    let max_tiles = kk * kk;
    let code_len_cap = kk.checked_pow(5).unwrap_or(usize::MAX);
    let mut palette = vec![Color::Hash, Color::Dollar];
    let mut interned: HashMap<Color, ColorId> = HashMap::new();
    interned.insert(Color::Hash, ColorId::HASH);
    interned.insert(Color::Dollar, ColorId::DOLLAR);
    let mut prefix_colors = Vec::with_capacity(target_len);
    let mut level0_codes = 0;

    for len in 1..=target_len {
        let u = &word[..len];
        let n = n_of(len, k);
        let tiles = levels[n].tile_count_at(len).filter(|&m| (1..=max_tiles).contains(&m));
        let color = match tiles {
            None => Color::Dollar,
            Some(m) => {
                let violation = |what: String| ColoringError::InvariantViolation { len, what };
                let parse_level = n.saturating_sub(1);
                let r = levels[parse_level]
                    .parse_by_returns(u)
                    .ok_or_else(|| violation(format!("not tiled by returns to p_{parse_level}")))?;
                if levels[parse_level].theta(&r)? != u {
                    return Err(violation("parse does not concatenate back".into()));
                }
                if r.len() >= code_len_cap {
                    return Err(violation(format!("code length {} not below K^5", r.len())));
                }
                if r.len() >= m.saturating_mul(kk.pow(3)) {
                    return Err(violation(format!("code length {} not below {m}·K³", r.len())));
                }
                if let Some(&big) = r.iter().find(|&&i| i >= k.index_set_size()) {
                    return Err(violation(format!("return index {big} outside B")));
                }
                if n == 0 {
                    level0_codes += 1;
                }
                Color::Code { parity: (n % 2) as u8, word: r }
            }
        };
        let next = ColorId(palette.len() as u32);
        let id = *interned.entry(color.clone()).or_insert_with(|| {
            palette.push(color);
            next
        });
        prefix_colors.push(id);
    }

    Ok(ColoringContext {
        prefix_match: z_function(&word[..target_len]),
        word: word.to_vec(),
        alphabet: buffer.alphabet().clone(),
        k,
        levels,
        max_colorable_len: target_len,
        palette,
        prefix_colors,
        level0_codes,
    })
}

impl ColoringContext {
    pub fn k(&self) -> RecurrenceConstant {
        self.k
    }

    pub fn levels(&self) -> &[ReturnSystem] {
        &self.levels
    }

    pub fn max_colorable_len(&self) -> usize {
        self.max_colorable_len
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    /// Number of prefixes whose code was parsed at the clamped level 0.
    pub fn level0_codes(&self) -> usize {
        self.level0_codes
    }

    /// Distinct colors assigned to prefixes, plus `#`.
    pub fn palette(&self) -> &[Color] {
        &self.palette
    }

    pub fn resolve(&self, id: ColorId) -> &Color {
        &self.palette[id.0 as usize]
    }

    /// Color of the prefix of length `len`.
    pub fn prefix_color(&self, len: usize) -> &Color {
        self.resolve(self.prefix_colors[len - 1])
    }

    fn id_of(&self, u: &[Symbol]) -> Result<ColorId, ColoringError> {
        if u.is_empty() {
            return Err(ColoringError::EmptyFactor);
        }
        if u.len() > self.max_colorable_len {
            return Err(ColoringError::OutOfRange { len: u.len(), max: self.max_colorable_len });
        }
        Ok(if self.word.starts_with(u) { self.prefix_colors[u.len() - 1] } else { ColorId::HASH })
    }

    /// Color of a factor of the word. The caller guarantees `u` is a factor.
    pub fn classify(&self, u: &[Symbol]) -> Result<Color, ColoringError> {
        self.id_of(u).map(|id| self.resolve(id).clone())
    }
}

impl FactorColoring for ColoringContext {
    type Color = ColorId;

    fn word(&self) -> &[Symbol] {
        &self.word
    }

    fn horizon(&self) -> usize {
        self.max_colorable_len
    }

    fn color(&self, factor: &[Symbol]) -> ColorId {
        self.id_of(factor).unwrap_or_else(|e| panic!("cannot color factor: {e}"))
    }

    fn color_at(&self, start: usize, len: usize) -> ColorId {
        if start + len > self.max_colorable_len {
            return self.color(&self.word[start..start + len]);
        }
        assert!(len >= 1, "cannot color the empty word");
        if self.prefix_match[start] >= len {
            self.prefix_colors[len - 1]
        } else {
            ColorId::HASH
        }
    }

    fn label(&self, color: &ColorId) -> String {
        self.resolve(*color).to_string()
    }
}

/// Colors a factor by its first letter.
#[derive(Debug, Clone, Copy)]
pub struct FirstLetterColoring<'a> {
    word: &'a [Symbol],
    alphabet: &'a Alphabet,
}

impl<'a> FirstLetterColoring<'a> {
    pub fn new(buffer: &'a PrefixBuffer) -> Self {
        Self { word: buffer.as_slice(), alphabet: buffer.alphabet() }
    }
}

impl FactorColoring for FirstLetterColoring<'_> {
    type Color = Symbol;

    fn word(&self) -> &[Symbol] {
        self.word
    }

    fn color(&self, factor: &[Symbol]) -> Symbol {
        factor[0]
    }

    fn color_at(&self, start: usize, _len: usize) -> Symbol {
        self.word[start]
    }

    fn label(&self, color: &Symbol) -> String {
        self.alphabet.name(*color).to_string()
    }
}

/// Gives every factor the same color.
#[derive(Debug, Clone, Copy)]
pub struct ConstantColoring<'a> {
    word: &'a [Symbol],
}

impl<'a> ConstantColoring<'a> {
    pub fn new(word: &'a [Symbol]) -> Self {
        Self { word }
    }
}

impl FactorColoring for ConstantColoring<'_> {
    type Color = ();

    fn word(&self) -> &[Symbol] {
        self.word
    }

    fn color(&self, _factor: &[Symbol]) {}

    fn color_at(&self, _start: usize, _len: usize) {}

    fn label(&self, _color: &()) -> String {
        "*".to_string()
    }
}

/// A coloring given by an arbitrary function of the factor.
pub struct FnColoring<'a, F> {
    word: &'a [Symbol],
    f: F,
}

impl<'a, F> FnColoring<'a, F> {
    pub fn new(word: &'a [Symbol], f: F) -> Self {
        Self { word, f }
    }
}

impl<C, F> FactorColoring for FnColoring<'_, F>
where
    C: Clone + Eq + Hash + fmt::Debug + Send + Sync,
    F: Fn(&[Symbol]) -> C + Sync,
{
    type Color = C;

    fn word(&self) -> &[Symbol] {
        self.word
    }

    fn color(&self, factor: &[Symbol]) -> C {
        (self.f)(factor)
    }

    fn label(&self, color: &C) -> String {
        format!("{color:?}")
    }
}

/// `k = 2 + Σ_{i=0}^{K^5-1} 2 K^i (K+1)^{2i}`, summed term by term.
pub fn color_count_bound(k: RecurrenceConstant) -> BigUint {
    let ratio = BigUint::from(k.index_set_size());
    let terms = k.get().pow(5);
    let mut term = BigUint::from(2u32);
    let mut sum = BigUint::from(2u32);
    for _ in 0..terms {
        sum += &term;
        term *= &ratio;
    }
    sum
}

/// The same count as a geometric series: `2 + 2 (q^{K^5} - 1) / (q - 1)`
/// with `q = K(K+1)²`.
pub fn color_count_closed_form(k: RecurrenceConstant) -> BigUint {
    let q = BigUint::from(k.index_set_size());
    let exponent = k.get().pow(5) as u32;
    let numerator = q.pow(exponent) - BigUint::one();
    BigUint::from(2u32) + BigUint::from(2u32) * numerator / (q - BigUint::one())
}
