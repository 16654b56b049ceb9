//! Machine and text reports for the command-line front end.
//!
//! Machine reports are pretty-printed JSON objects whose first field is
//! `timing`. Everything else is a function of the inputs, so two runs with
//! one configuration differ only there (see [`strip_timing`]).

use std::fmt::Write as _;

use serde::Serialize;

use crate::returns::{KEstimate, KSample, ReturnSystem};
use crate::verifier::{AuditRecord, BandViolation, CountViolation, PowerWitness};
use crate::word::Alphabet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Timing {
    pub elapsed_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CounterexampleReport {
    pub start: usize,
    pub parts: Vec<usize>,
    pub color: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AuditReport {
    pub max_len: usize,
    pub buffer_len: usize,
    pub power_free: bool,
    pub length_band: bool,
    pub count_bound: bool,
    pub power_count: usize,
    pub power_witnesses: Vec<PowerWitness>,
    pub band_violations: Vec<BandViolation>,
    pub count_violations: Vec<CountViolation>,
    pub max_return_count: usize,
    pub unavailable_bases: Vec<usize>,
}

impl From<&AuditRecord> for AuditReport {
    fn from(a: &AuditRecord) -> Self {
        AuditReport {
            max_len: a.max_len,
            buffer_len: a.buffer_len,
            power_free: a.power_free(),
            length_band: a.length_band_ok(),
            count_bound: a.count_bound_ok(),
            power_count: a.power_count,
            power_witnesses: a.power_witnesses.clone(),
            band_violations: a.band_violations.clone(),
            count_violations: a.count_violations.clone(),
            max_return_count: a.max_return_count,
            unavailable_bases: a.unavailable_bases.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SampleReport {
    pub factor: String,
    pub min_return_len: usize,
    pub max_return_len: usize,
    pub return_count: usize,
}

impl SampleReport {
    fn new(sample: &KSample, alphabet: &Alphabet) -> Self {
        SampleReport {
            factor: alphabet.render(&sample.factor),
            min_return_len: sample.min_return_len,
            max_return_len: sample.max_return_len,
            return_count: sample.return_count,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EstimateReport {
    pub k_hat: usize,
    pub window: usize,
    pub margin_ok: bool,
    pub samples: usize,
    pub witness: Option<SampleReport>,
}

impl EstimateReport {
    pub fn new(estimate: &KEstimate, alphabet: &Alphabet) -> Self {
        EstimateReport {
            k_hat: estimate.k_hat,
            window: estimate.window,
            margin_ok: estimate.margin_ok,
            samples: estimate.samples.len(),
            witness: estimate.witness.as_ref().map(|w| SampleReport::new(w, alphabet)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KSource {
    Estimated,
    Override,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Confirmed,
    Counterexample,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub timing: Timing,
    pub command: &'static str,
    pub word_id: String,
    #[serde(rename = "K")]
    pub k: usize,
    pub k_source: KSource,
    #[serde(rename = "N")]
    pub n: usize,
    pub h: usize,
    pub coloring: String,
    pub status: Status,
    pub degenerate: bool,
    pub counterexample: Option<CounterexampleReport>,
    pub prefixes_checked: usize,
    pub classifications: u64,
    pub colors_observed: usize,
    /// Number of distinct level-0 code colors, where `r` is parsed at level 0
    /// instead of level `-1`. Only reported for the theorem coloring.
    pub level0_codes: Option<usize>,
    pub lemma_audit: AuditReport,
    pub k_estimate: Option<EstimateReport>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GenReport {
    pub timing: Timing,
    pub command: &'static str,
    pub word_id: String,
    pub alphabet: Vec<String>,
    pub n: usize,
    pub word: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReturnsReport {
    pub timing: Timing,
    pub command: &'static str,
    pub word_id: String,
    pub base: String,
    pub window: usize,
    pub stable: bool,
    pub returns: Vec<String>,
    pub derived: Vec<usize>,
    pub boundaries: Vec<usize>,
}

impl ReturnsReport {
    pub fn new(word_id: String, system: &ReturnSystem, alphabet: &Alphabet, timing: Timing) -> Self {
        ReturnsReport {
            timing,
            command: "returns",
            word_id,
            base: alphabet.render(system.base()),
            window: system.window(),
            stable: system.is_stable(),
            returns: system.returns().iter().map(|r| alphabet.render(r)).collect(),
            derived: system.derived().to_vec(),
            boundaries: system.boundaries().to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EstimateKReport {
    pub timing: Timing,
    pub command: &'static str,
    pub word_id: String,
    pub max_base_len: usize,
    pub buffer_len: usize,
    pub estimate: EstimateReport,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PrefixColor {
    pub len: usize,
    pub color: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ColorReport {
    pub timing: Timing,
    pub command: &'static str,
    pub word_id: String,
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub levels: Vec<usize>,
    pub level0_codes: usize,
    pub distinct_prefix_colors: usize,
    pub prefixes: Vec<PrefixColor>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RamseyReport {
    pub timing: Timing,
    pub command: &'static str,
    pub word_id: String,
    pub coloring: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub t: usize,
    pub found: bool,
    pub start: Option<usize>,
    pub blocks: Option<Vec<usize>>,
    pub verified: bool,
}

pub fn to_machine<T: Serialize>(report: &T) -> String {
    let mut text = serde_json::to_string_pretty(report).expect("report types serialize");
    text.push('\n');
    text
}

/// The machine report without its `timing` header, `None` if `machine` is
/// not a JSON object.
pub fn strip_timing(machine: &str) -> Option<serde_json::Value> {
    let mut value: serde_json::Value = serde_json::from_str(machine).ok()?;
    value.as_object_mut()?.remove("timing");
    Some(value)
}

fn join<T: ToString>(items: &[T]) -> String {
    items.iter().map(T::to_string).collect::<Vec<_>>().join(" ")
}

const DERIVED_HEAD: usize = 20;

pub fn returns_text(r: &ReturnsReport) -> String {
    let listed: Vec<String> = r.returns.iter().enumerate().map(|(i, w)| format!("{i}: {w}")).collect();
    let head = &r.derived[..r.derived.len().min(DERIVED_HEAD)];
    let more = if r.derived.len() > head.len() { " …" } else { "" };
    format!(
        "{}; derived: {}{more}\nbase: {}\nwindow: {}\nstable: {}\ntiles: {}\n",
        listed.join(", "),
        join(head),
        r.base,
        r.window,
        r.stable,
        r.derived.len()
    )
}

pub fn estimate_text(r: &EstimateKReport) -> String {
    let e = &r.estimate;
    let mut out =
        format!("k_hat: {}\nwindow: {}\nmargin_ok: {}\nsamples: {}\n", e.k_hat, e.window, e.margin_ok, e.samples);
    if let Some(w) = &e.witness {
        let _ = writeln!(
            out,
            "witness: {} (|u| = {}, longest return {}, {} returns)",
            w.factor,
            w.factor.chars().count(),
            w.max_return_len,
            w.return_count
        );
    }
    out
}

pub fn color_text(r: &ColorReport) -> String {
    let mut out = format!("K: {}\nlevels: {}\n", r.k, join(&r.levels));
    for p in &r.prefixes {
        let _ = writeln!(out, "{}\t{}", p.len, p.color);
    }
    let _ = writeln!(out, "distinct prefix colors: {}", r.distinct_prefix_colors);
    if r.level0_codes > 0 {
        let _ = writeln!(out, "note: {} level-0 code colors (r parsed at level 0)", r.level0_codes);
    }
    out
}

pub fn verify_text(r: &VerifyReport) -> String {
    let mut out = String::new();
    let source = match r.k_source {
        KSource::Estimated => "estimated",
        KSource::Override => "given",
    };
    let _ = writeln!(out, "word: {}", r.word_id);
    let _ = writeln!(out, "K = {} ({source}), h = {}, horizon N = {}, coloring: {}", r.k, r.h, r.n, r.coloring);
    match &r.counterexample {
        None => {
            let _ = writeln!(
                out,
                "status: confirmed, no monochromatic monotone factorization of length {} in any prefix up to {}",
                r.h, r.n
            );
        }
        Some(cx) => {
            let _ = writeln!(
                out,
                "status: counterexample at prefix {}: parts {} all colored {}",
                cx.parts.iter().sum::<usize>(),
                join(&cx.parts),
                cx.color
            );
        }
    }
    if r.degenerate {
        let _ = writeln!(out, "note: h = 1 is degenerate");
    }
    let _ = writeln!(
        out,
        "prefixes checked: {}, classifications: {}, colors observed: {}",
        r.prefixes_checked, r.classifications, r.colors_observed
    );
    if let Some(codes) = r.level0_codes.filter(|&c| c > 0) {
        let _ = writeln!(out, "note: {codes} level-0 code colors (r parsed at level 0)");
    }
    let a = &r.lemma_audit;
    let _ = writeln!(
        out,
        "audit (|u| <= {}): power_free {}, length_band {}, count_bound {} (max {} returns)",
        a.max_len, a.power_free, a.length_band, a.count_bound, a.max_return_count
    );
    if let Some(w) = a.power_witnesses.first() {
        let _ = writeln!(out, "  first power: root length {} at {}", w.root_len, w.position);
    }
    let _ = writeln!(out, "elapsed: {} ms", r.timing.elapsed_ms);
    out
}

pub fn ramsey_text(r: &RamseyReport) -> String {
    match (r.start, &r.blocks) {
        (Some(start), Some(blocks)) => {
            format!("tail start: {start}\nblocks: {}\nverified: {}\n", join(blocks), r.verified)
        }
        _ => format!("horizon insufficient: no tail with {} blocks found within {} symbols\n", r.t, r.n),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn timing_comes_first_and_strips() {
        let report = |ms| GenReport {
            timing: Timing { elapsed_ms: ms },
            command: "gen",
            word_id: "w".into(),
            alphabet: vec!["a".into()],
            n: 1,
            word: "a".into(),
        };
        let (a, b) = (to_machine(&report(7)), to_machine(&report(9)));
        assert!(a.lines().nth(1).unwrap().trim_start().starts_with("\"timing\""));
        assert_ne!(a, b);
        assert_eq!(strip_timing(&a), strip_timing(&b));
        assert!(strip_timing(&a).unwrap().get("timing").is_none());
        assert!(strip_timing("[1]").is_none());
    }
}
