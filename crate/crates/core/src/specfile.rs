//! Word specification files.
//!
//! TOML with a `kind` and an ordered `alphabet`, plus the fields of that kind:
//!
//! ```toml
//! id = "fibonacci"            # optional, defaults to the file stem
//! kind = "substitution"       # substitution | sturmian | eventually_periodic | literal
//! alphabet = ["a", "b"]
//! seed = "a"                  # substitution
//!
//! [images]                    # substitution: one `letter = "word"` line per letter
//! a = "ab"
//! b = "a"
//! ```
//!
//! `sturmian` takes `coefficients = [1, 2]` (cycled), `eventually_periodic`
//! takes `preperiod = "c"` and `period = "ab"`, `literal` takes `text`.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

use crate::word::{Alphabet, Substitution, Symbol, WordError, WordSource};

#[derive(Debug, Error)]
pub enum SpecError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{0}")]
    Syntax(String),
    #[error("field `{field}` is required for kind `{kind}`")]
    MissingField { field: &'static str, kind: &'static str },
    #[error("field `{field}` is not used by kind `{kind}`")]
    UnexpectedField { field: &'static str, kind: &'static str },
    #[error("field `{field}`: {source}")]
    Invalid { field: &'static str, source: WordError },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
enum Kind {
    Substitution,
    Sturmian,
    EventuallyPeriodic,
    Literal,
}

impl Kind {
    fn name(self) -> &'static str {
        match self {
            Kind::Substitution => "substitution",
            Kind::Sturmian => "sturmian",
            Kind::EventuallyPeriodic => "eventually_periodic",
            Kind::Literal => "literal",
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    id: Option<String>,
    kind: Kind,
    alphabet: Vec<String>,
    seed: Option<String>,
    images: Option<BTreeMap<String, String>>,
    coefficients: Option<Vec<u64>>,
    preperiod: Option<String>,
    period: Option<String>,
    text: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordSpec {
    pub id: Option<String>,
    pub source: WordSource,
}

fn required<T>(value: Option<T>, field: &'static str, kind: Kind) -> Result<T, SpecError> {
    value.ok_or(SpecError::MissingField { field, kind: kind.name() })
}

fn invalid(field: &'static str) -> impl Fn(WordError) -> SpecError {
    move |source| SpecError::Invalid { field, source }
}

pub fn parse_spec(text: &str) -> Result<WordSpec, SpecError> {
    let raw: RawSpec = toml::from_str(text).map_err(|e| SpecError::Syntax(e.to_string()))?;
    let kind = raw.kind;
    let alphabet = Alphabet::new(raw.alphabet).map_err(invalid("alphabet"))?;

    let used: &[&'static str] = match kind {
        Kind::Substitution => &["seed", "images"],
        Kind::Sturmian => &["coefficients"],
        Kind::EventuallyPeriodic => &["preperiod", "period"],
        Kind::Literal => &["text"],
    };
    let present = [
        ("seed", raw.seed.is_some()),
        ("images", raw.images.is_some()),
        ("coefficients", raw.coefficients.is_some()),
        ("preperiod", raw.preperiod.is_some()),
        ("period", raw.period.is_some()),
        ("text", raw.text.is_some()),
    ];
    if let Some((field, _)) = present.iter().find(|(f, p)| *p && !used.contains(f)) {
        return Err(SpecError::UnexpectedField { field, kind: kind.name() });
    }

    let source = match kind {
        Kind::Substitution => {
            let seed_name = required(raw.seed, "seed", kind)?;
            let images = required(raw.images, "images", kind)?;
            let seed =
                alphabet.id(&seed_name).ok_or_else(|| invalid("seed")(WordError::UnknownSymbol(seed_name.clone())))?;
            let rules: Vec<(&str, &str)> = images.iter().map(|(k, v)| (k.as_str(), v.as_str())).collect();
            let substitution = Substitution::from_rules(alphabet, &rules).map_err(invalid("images"))?;
            WordSource::SubstitutionFixedPoint { substitution, seed }
        }
        Kind::Sturmian => {
            let coefficients = required(raw.coefficients, "coefficients", kind)?;
            if coefficients.is_empty() || coefficients.contains(&0) {
                return Err(invalid("coefficients")(WordError::InvalidCoefficients));
            }
            if alphabet.len() != 2 {
                return Err(invalid("alphabet")(WordError::NotBinary(alphabet.len())));
            }
            WordSource::SturmianCf { alphabet, coefficients }
        }
        Kind::EventuallyPeriodic => {
            let preperiod =
                alphabet.parse_word(raw.preperiod.as_deref().unwrap_or("")).map_err(invalid("preperiod"))?;
            let period = alphabet.parse_word(&required(raw.period, "period", kind)?).map_err(invalid("period"))?;
            if period.is_empty() {
                return Err(invalid("period")(WordError::EmptyPeriod));
            }
            WordSource::EventuallyPeriodic { alphabet, preperiod, period }
        }
        Kind::Literal => {
            let word = alphabet.parse_word(&required(raw.text, "text", kind)?).map_err(invalid("text"))?;
            WordSource::Literal { alphabet, word }
        }
    };
    Ok(WordSpec { id: raw.id, source })
}

pub fn read_spec(path: &Path) -> Result<WordSpec, SpecError> {
    let text =
        std::fs::read_to_string(path).map_err(|source| SpecError::Io { path: path.display().to_string(), source })?;
    let mut spec = parse_spec(&text)?;
    if spec.id.is_none() {
        spec.id = path.file_stem().map(|s| s.to_string_lossy().into_owned());
    }
    Ok(spec)
}

/// A `literal` spec holding `word`.
pub fn literal_spec(id: &str, alphabet: &Alphabet, word: &[Symbol]) -> String {
    let names: Vec<String> = alphabet.names().iter().map(|n| format!("{n:?}")).collect();
    format!("id = {id:?}\nkind = \"literal\"\nalphabet = [{}]\ntext = {:?}\n", names.join(", "), alphabet.render(word))
}
