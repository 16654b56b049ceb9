//! Infinite-word sources and materialized prefixes.
//!
//! Symbols are dense small integers; names are only kept on the
//! [`Alphabet`] for input and output.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

/// Dense symbol id, `0..alphabet.len()`.
pub type Symbol = u8;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("alphabet is empty")]
    EmptyAlphabet,
    #[error("alphabet has more than 256 symbols")]
    AlphabetTooLarge,
    #[error("duplicate symbol name `{0}` in alphabet")]
    DuplicateSymbol(String),
    #[error("symbol name must be nonempty and printable, got {0:?}")]
    InvalidSymbolName(String),
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("symbol `{0}` has no image")]
    MissingImage(String),
    #[error("image of symbol `{0}` is empty")]
    EmptyImage(String),
    #[error("substitution is not prolongable on `{0}`: its image must start with it and have length at least 2")]
    NotProlongable(String),
    #[error("continued fraction coefficients must be a nonempty list of integers >= 1")]
    InvalidCoefficients,
    #[error("sturmian words need a two-letter alphabet, got {0} letters")]
    NotBinary(usize),
    #[error("period must be nonempty")]
    EmptyPeriod,
    #[error("literal word has only {available} symbols, {requested} requested")]
    LiteralExhausted { requested: usize, available: usize },
}

/// Ordered list of distinct symbol names.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    names: Vec<String>,
    ids: HashMap<String, Symbol>,
}

impl Alphabet {
    pub fn new<I, S>(names: I) -> Result<Self, WordError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(WordError::EmptyAlphabet);
        }
        if names.len() > usize::from(Symbol::MAX) + 1 {
            return Err(WordError::AlphabetTooLarge);
        }
        let mut ids = HashMap::with_capacity(names.len());
        for (i, name) in names.iter().enumerate() {
            if name.is_empty() || name.chars().any(|c| c.is_whitespace() || c.is_control()) {
                return Err(WordError::InvalidSymbolName(name.clone()));
            }
            if ids.insert(name.clone(), i as Symbol).is_some() {
                return Err(WordError::DuplicateSymbol(name.clone()));
            }
        }
        Ok(Self { names, ids })
    }

    /// The alphabet `{a, b}` used by most examples.
    pub fn ab() -> Self {
        Self::new(["a", "b"]).expect("static alphabet")
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, symbol: Symbol) -> &str {
        &self.names[usize::from(symbol)]
    }

    pub fn id(&self, name: &str) -> Option<Symbol> {
        self.ids.get(name).copied()
    }

    /// True when every name is a single character, so words can be written
    /// without separators.
    pub fn is_compact(&self) -> bool {
        self.names.iter().all(|n| n.chars().count() == 1)
    }

    /// Parses a word. Compact alphabets read one symbol per character
    /// (whitespace ignored); otherwise symbols are whitespace separated.
    pub fn parse_word(&self, text: &str) -> Result<Vec<Symbol>, WordError> {
        let lookup = |tok: &str| self.id(tok).ok_or_else(|| WordError::UnknownSymbol(tok.to_string()));
        if self.is_compact() {
            text.chars().filter(|c| !c.is_whitespace()).map(|c| lookup(c.encode_utf8(&mut [0; 4]))).collect()
        } else {
            text.split_whitespace().map(lookup).collect()
        }
    }

    pub fn render(&self, word: &[Symbol]) -> String {
        let sep = if self.is_compact() { "" } else { " " };
        word.iter().map(|&s| self.name(s)).collect::<Vec<_>>().join(sep)
    }
}

/// A letter-to-word map over an alphabet. Every image is nonempty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Substitution {
    alphabet: Alphabet,
    images: Vec<Vec<Symbol>>,
}

impl Substitution {
    /// `images[i]` is the image of symbol `i`.
    pub fn new(alphabet: Alphabet, images: Vec<Vec<Symbol>>) -> Result<Self, WordError> {
        if images.len() < alphabet.len() {
            let missing = alphabet.name(images.len() as Symbol).to_string();
            return Err(WordError::MissingImage(missing));
        }
        for (i, img) in images.iter().enumerate() {
            let name = alphabet.names().get(i).cloned().unwrap_or_else(|| i.to_string());
            if i >= alphabet.len() {
                return Err(WordError::UnknownSymbol(name));
            }
            if img.is_empty() {
                return Err(WordError::EmptyImage(name));
            }
            if let Some(&bad) = img.iter().find(|&&s| usize::from(s) >= alphabet.len()) {
                return Err(WordError::UnknownSymbol(bad.to_string()));
            }
        }
        Ok(Self { alphabet, images })
    }

    /// Builds a substitution from `(letter, image)` pairs written with the
    /// alphabet's names.
    pub fn from_rules(alphabet: Alphabet, rules: &[(&str, &str)]) -> Result<Self, WordError> {
        let mut images: Vec<Option<Vec<Symbol>>> = vec![None; alphabet.len()];
        for &(letter, image) in rules {
            let id = alphabet.id(letter).ok_or_else(|| WordError::UnknownSymbol(letter.to_string()))?;
            images[usize::from(id)] = Some(alphabet.parse_word(image)?);
        }
        let images = images
            .into_iter()
            .enumerate()
            .map(|(i, img)| img.ok_or_else(|| WordError::MissingImage(alphabet.name(i as Symbol).to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(alphabet, images)
    }

    /// a -> ab, b -> a
    pub fn fibonacci() -> Self {
        Self::from_rules(Alphabet::ab(), &[("a", "ab"), ("b", "a")]).expect("static substitution")
    }

    /// a -> ab, b -> ba
    pub fn thue_morse() -> Self {
        Self::from_rules(Alphabet::ab(), &[("a", "ab"), ("b", "ba")]).expect("static substitution")
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn image(&self, symbol: Symbol) -> &[Symbol] {
        &self.images[usize::from(symbol)]
    }

    pub fn apply(&self, word: &[Symbol]) -> Vec<Symbol> {
        word.iter().flat_map(|&s| self.image(s).iter().copied()).collect()
    }

    fn check_prolongable(&self, seed: Symbol) -> Result<(), WordError> {
        let img = self.image(seed);
        if img.len() < 2 || img[0] != seed {
            return Err(WordError::NotProlongable(self.alphabet.name(seed).to_string()));
        }
        Ok(())
    }
}

/// Recipe for an infinite word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WordSource {
    SubstitutionFixedPoint {
        substitution: Substitution,
        seed: Symbol,
    },
    /// Characteristic Sturmian word; the coefficient list is cycled.
    SturmianCf {
        alphabet: Alphabet,
        coefficients: Vec<u64>,
    },
    EventuallyPeriodic {
        alphabet: Alphabet,
        preperiod: Vec<Symbol>,
        period: Vec<Symbol>,
    },
    /// Finite word, usable only up to its length.
    Literal {
        alphabet: Alphabet,
        word: Vec<Symbol>,
    },
}

impl WordSource {
    pub fn fibonacci() -> Self {
        WordSource::SubstitutionFixedPoint { substitution: Substitution::fibonacci(), seed: 0 }
    }

    pub fn thue_morse() -> Self {
        WordSource::SubstitutionFixedPoint { substitution: Substitution::thue_morse(), seed: 0 }
    }

    pub fn alphabet(&self) -> &Alphabet {
        match self {
            WordSource::SubstitutionFixedPoint { substitution, .. } => substitution.alphabet(),
            WordSource::SturmianCf { alphabet, .. }
            | WordSource::EventuallyPeriodic { alphabet, .. }
            | WordSource::Literal { alphabet, .. } => alphabet,
        }
    }

    /// Longest prefix this source can produce, `None` when unbounded.
    pub fn max_len(&self) -> Option<usize> {
        match self {
            WordSource::Literal { word, .. } => Some(word.len()),
            _ => None,
        }
    }
}

/// A materialized prefix of the word described by `source`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrefixBuffer {
    source: WordSource,
    data: Vec<Symbol>,
}

impl PrefixBuffer {
    /// Wraps a finite word as a buffer over a [`WordSource::Literal`].
    pub fn from_literal(alphabet: Alphabet, word: Vec<Symbol>) -> Self {
        Self { data: word.clone(), source: WordSource::Literal { alphabet, word } }
    }

    pub fn source(&self) -> &WordSource {
        &self.source
    }

    pub fn alphabet(&self) -> &Alphabet {
        self.source.alphabet()
    }

    pub fn as_slice(&self) -> &[Symbol] {
        &self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Grows the buffer to `n` symbols. Existing positions never change.
    pub fn extend_to(&mut self, n: usize) -> Result<(), WordError> {
        if n > self.data.len() {
            let longer = prefix(&self.source, n)?;
            debug_assert!(longer.data.starts_with(&self.data));
            self.data = longer.data;
        }
        Ok(())
    }

    pub fn render(&self) -> String {
        self.alphabet().render(&self.data)
    }
}

impl AsRef<[Symbol]> for PrefixBuffer {
    fn as_ref(&self) -> &[Symbol] {
        &self.data
    }
}

impl fmt::Display for PrefixBuffer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Prefix of length `target_len` of the fixed point `σ^∞(seed)`.
pub fn expand_substitution(
    substitution: &Substitution,
    seed: Symbol,
    target_len: usize,
) -> Result<PrefixBuffer, WordError> {
    if usize::from(seed) >= substitution.alphabet().len() {
        return Err(WordError::UnknownSymbol(seed.to_string()));
    }
    substitution.check_prolongable(seed)?;
    let mut word = vec![seed];
    // σ(w[..n]) is a prefix of σ(w), so truncating every iterate is exact.
    while word.len() < target_len {
        let mut next = Vec::with_capacity(target_len.min(word.len() * 4));
        for &s in &word {
            next.extend_from_slice(substitution.image(s));
            if next.len() >= target_len {
                break;
            }
        }
        word = next;
    }
    word.truncate(target_len);
    Ok(PrefixBuffer {
        source: WordSource::SubstitutionFixedPoint { substitution: substitution.clone(), seed },
        data: word,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Primitivity {
    pub primitive: bool,
    /// Least `n` such that every `σ^n(b)` contains every letter.
    pub witness_power: Option<usize>,
}

/// Boolean incidence-matrix powers `M^1 ..= M^{|A|²}`.
pub fn check_primitive(substitution: &Substitution) -> Primitivity {
    let size = substitution.alphabet().len();
    let mut incidence = vec![vec![false; size]; size];
    for (a, row) in incidence.iter_mut().enumerate() {
        for &b in substitution.image(a as Symbol) {
            row[usize::from(b)] = true;
        }
    }
    let mut power = incidence.clone();
    for n in 1..=size * size {
        if power.iter().all(|row| row.iter().all(|&e| e)) {
            return Primitivity { primitive: true, witness_power: Some(n) };
        }
        power = bool_product(&power, &incidence);
    }
    Primitivity { primitive: false, witness_power: None }
}

fn bool_product(lhs: &[Vec<bool>], rhs: &[Vec<bool>]) -> Vec<Vec<bool>> {
    let size = rhs.len();
    lhs.iter().map(|row| (0..size).map(|j| row.iter().zip(rhs).any(|(&l, r)| l && r[j])).collect()).collect()
}

/// Characteristic Sturmian prefix from the standard-word recursion
/// `s₋₁ = b, s₀ = a, s_n = s_{n−1}^{a_n} s_{n−2}`, with the coefficients
/// repeated cyclically.
pub fn sturmian_prefix(
    alphabet: &Alphabet,
    coefficients: &[u64],
    target_len: usize,
) -> Result<PrefixBuffer, WordError> {
    if coefficients.is_empty() || coefficients.contains(&0) {
        return Err(WordError::InvalidCoefficients);
    }
    if alphabet.len() != 2 {
        return Err(WordError::NotBinary(alphabet.len()));
    }
    let mut older: Vec<Symbol> = vec![1];
    let mut newer: Vec<Symbol> = vec![0];
    let mut coeffs = coefficients.iter().cycle();
    while newer.len() < target_len {
        let reps = *coeffs.next().expect("cycle of nonempty list");
        let mut next = Vec::with_capacity(newer.len() * reps as usize + older.len());
        for _ in 0..reps {
            next.extend_from_slice(&newer);
            if next.len() >= target_len {
                break;
            }
        }
        next.extend_from_slice(&older);
        older = newer;
        newer = next;
    }
    newer.truncate(target_len);
    Ok(PrefixBuffer {
        source: WordSource::SturmianCf { alphabet: alphabet.clone(), coefficients: coefficients.to_vec() },
        data: newer,
    })
}

/// Length-`n` prefix of the word described by `source`.
pub fn prefix(source: &WordSource, n: usize) -> Result<PrefixBuffer, WordError> {
    match source {
        WordSource::SubstitutionFixedPoint { substitution, seed } => expand_substitution(substitution, *seed, n),
        WordSource::SturmianCf { alphabet, coefficients } => sturmian_prefix(alphabet, coefficients, n),
        WordSource::EventuallyPeriodic { preperiod, period, .. } => {
            if period.is_empty() {
                return Err(WordError::EmptyPeriod);
            }
            let data = preperiod.iter().chain(period.iter().cycle()).copied().take(n).collect();
            Ok(PrefixBuffer { source: source.clone(), data })
        }
        WordSource::Literal { word, .. } => {
            if n > word.len() {
                return Err(WordError::LiteralExhausted { requested: n, available: word.len() });
            }
            Ok(PrefixBuffer { source: source.clone(), data: word[..n].to_vec() })
        }
    }
}

/// KMP failure function: `border[i]` is the length of the longest proper
/// border of `word[..=i]`.
pub(crate) fn border_lengths(word: &[Symbol]) -> Vec<usize> {
    let mut border = vec![0; word.len()];
    let mut k = 0;
    for i in 1..word.len() {
        while k > 0 && word[i] != word[k] {
            k = border[k - 1];
        }
        if word[i] == word[k] {
            k += 1;
        }
        border[i] = k;
    }
    border
}

/// Smallest period of the prefix, reported only when it is at most half the
/// length. A screening heuristic; `None` is not a proof of aperiodicity.
pub fn detect_period(word: &[Symbol]) -> Option<usize> {
    if word.len() < 2 {
        return None;
    }
    let period = word.len() - border_lengths(word)[word.len() - 1];
    (2 * period <= word.len()).then_some(period)
}
