//! Acceptance criteria, one line each on stderr:
//!
//! ```text
//! [PASS] 1 fibonacci: ...
//! ```

use std::collections::{HashMap, HashSet};
use std::io::Write as _;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use itertools::Itertools;
use lrwords::coloring::{
    build_context, color_count_bound, color_count_closed_form, ConstantColoring, FirstLetterColoring, FnColoring,
    RecurrenceConstant,
};
use lrwords::report::strip_timing;
use lrwords::returns::{estimate_k, lambda_morphism, prefix_return_system};
use lrwords::verifier::oracle::count_partitions_oracle;
use lrwords::verifier::{
    audit_recurrence, check_example_prepend, check_theorem, enumerate_monotone, find_ramsey_tail,
    find_strongly_mono_prefix, prepend_power, verify_strongly_monochromatic, CheckOptions,
};
use lrwords::{prefix, Parallelism, Symbol, WordSource};
use num_bigint::BigUint;
use num_traits::{One, Pow, Zero};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Independent estimate: largest gap between consecutive occurrences of a
/// factor of length <= `max_len`, over its length, by direct scanning.
fn gap_oracle(x: &[Symbol], max_len: usize) -> usize {
    let mut worst = (0usize, 1usize);
    for len in 1..=max_len {
        let mut last: HashMap<&[Symbol], usize> = HashMap::new();
        let mut gap: HashMap<&[Symbol], usize> = HashMap::new();
        for i in 0..=x.len() - len {
            let w = &x[i..i + len];
            if let Some(prev) = last.insert(w, i) {
                let g = gap.entry(w).or_default();
                *g = (*g).max(i - prev);
            }
        }
        for g in gap.values() {
            if g * worst.1 > worst.0 * len {
                worst = (*g, len);
            }
        }
    }
    2.max(worst.0.div_ceil(worst.1))
}

fn theorem_run(name: &str, source: &WordSource, expected_k: usize) -> Check {
    let est_buf = prefix(source, 8192).unwrap();
    let est = estimate_k(est_buf.as_slice(), 20, Parallelism::Sequential).map_err(|e| e.to_string())?;
    let oracle = gap_oracle(&est_buf.as_slice()[..4096], 20);
    ensure(est.k_hat == expected_k, || format!("{name}: estimated K = {}, expected {expected_k}", est.k_hat))?;
    ensure(oracle == est.k_hat, || format!("{name}: gap oracle gives {oracle}, estimate {}", est.k_hat))?;
    let k = RecurrenceConstant::new(est.k_hat).unwrap();
    let n = 200;
    let buffer = prefix(source, (k.get() + 2) * n).unwrap();
    let started = Instant::now();
    let ctx = build_context(&buffer, k, n).map_err(|e| e.to_string())?;
    let report = check_theorem(&ctx, n, k.get() + 1, CheckOptions::default()).map_err(|e| e.to_string())?;
    let secs = started.elapsed().as_secs_f64();
    ensure(report.counterexample.is_none(), || format!("{name}: counterexample {:?}", report.counterexample))?;
    ensure(report.prefixes_checked == n - k.get(), || format!("checked {} prefixes", report.prefixes_checked))?;
    ensure(secs < 60.0, || format!("{name}: took {secs:.1} s"))?;
    Ok(format!(
        "K = {} (gap oracle {oracle}), h = {}, N = {n}, buffer {}, no counterexample, {} classifications, {secs:.2} s",
        k,
        k.get() + 1,
        buffer.len(),
        report.classifications
    ))
}

fn criterion_1() -> Check {
    theorem_run("fibonacci", &WordSource::fibonacci(), 3)
}

fn criterion_2() -> Check {
    theorem_run("thue-morse", &WordSource::thue_morse(), 8)
}

fn criterion_3() -> Check {
    let fib = prefix(&WordSource::fibonacci(), 10).unwrap();
    let report = check_theorem(&ConstantColoring::new(fib.as_slice()), 10, 2, CheckOptions::default())
        .map_err(|e| e.to_string())?;
    let cx = report.counterexample.ok_or("constant coloring: no counterexample")?;
    ensure(cx.factorization.parts == [1, 1] && report.prefixes_checked == 1, || format!("got {cx:?}"))?;

    let u = [0, 1];
    let k = RecurrenceConstant::new(3).unwrap();
    let composite = prepend_power(&u, 4, &prefix(&WordSource::fibonacci(), 400).unwrap());
    let ctx = build_context(&composite, k, 8).map_err(|e| e.to_string())?;
    let f = check_example_prepend(&u, 4, &ctx).map_err(|e| e.to_string())?;
    let colors: HashSet<_> = (0..4).map(|i| ctx.classify(&composite.as_slice()[2 * i..2 * i + 2]).unwrap()).collect();
    ensure(f.parts == [2, 2, 2, 2] && f.is_monotone() && colors.len() == 1, || format!("got {f:?}, {colors:?}"))?;
    Ok(format!(
        "constant coloring fails at prefix 2 with (1,1); (ab)^4 fibonacci gives (2,2,2,2) colored {}",
        colors.iter().next().unwrap()
    ))
}

fn criterion_4() -> Check {
    let mut out = Vec::new();
    for (name, source, k) in [("fibonacci", WordSource::fibonacci(), 3), ("thue-morse", WordSource::thue_morse(), 8)] {
        let buf = prefix(&source, 4096).unwrap();
        let audit = audit_recurrence(buf.as_slice(), RecurrenceConstant::new(k).unwrap(), 20, Parallelism::Sequential)
            .map_err(|e| e.to_string())?;
        ensure(audit.passed(), || format!("{name}: {audit:?}"))?;
        out.push(format!("{name} K={k} max {} returns", audit.max_return_count));
    }
    Ok(format!("no powers, band and count hold: {}", out.join(", ")))
}

fn criterion_5() -> Check {
    let buf = prefix(&WordSource::fibonacci(), 4096).unwrap();
    let systems: Vec<_> =
        [1, 3, 9, 27].iter().map(|&len| prefix_return_system(buf.as_slice(), len, buf.len()).unwrap()).collect();
    let mut pairs = 0;
    let mut identities = 0;
    for (i, sys_u) in systems.iter().enumerate() {
        for sys_v in &systems[..=i] {
            let lambda = lambda_morphism(sys_u, sys_v).map_err(|e| e.to_string())?;
            for (r, image) in lambda.iter().enumerate() {
                ensure(sys_v.theta(image).unwrap() == sys_u.returns()[r], || format!("mismatch at return {r}"))?;
                identities += 1;
            }
            pairs += 1;
        }
    }
    let mut segments = 0;
    for sys in &systems {
        for m in 0..25 {
            let tiles = 1 + m * (sys.derived().len() - 1) / 24;
            let indices = &sys.derived()[..tiles];
            let word = sys.theta(indices).unwrap();
            ensure(sys.parse_by_returns(&word).as_deref() == Some(indices), || {
                format!("parse failed for |u| = {}, {tiles} tiles", sys.base().len())
            })?;
            segments += 1;
        }
    }
    Ok(format!("{identities} lambda identities over {pairs} pairs, {segments} parse/theta round trips"))
}

fn criterion_6() -> Check {
    let mut cases = 0;
    for total in 0..=60 {
        for h in 1..=8 {
            let count = enumerate_monotone(total, h).count() as u128;
            let oracle = count_partitions_oracle(total, h);
            ensure(count == oracle, || format!("total {total}, h {h}: {count} vs {oracle}"))?;
            cases += 1;
        }
    }
    Ok(format!("{cases} (total, h) cases agree, p(60, 8) = {}", count_partitions_oracle(60, 8)))
}

fn criterion_7() -> Check {
    let buf = prefix(&WordSource::fibonacci(), 2000).unwrap();
    let coloring = FirstLetterColoring::new(&buf);
    let tail = find_ramsey_tail(&coloring, 2000, 10).map_err(|e| e.to_string())?.ok_or("horizon insufficient")?;
    let parts = &tail.factorization.parts;
    ensure(parts.len() >= 10, || format!("{} blocks", parts.len()))?;
    ensure(verify_strongly_monochromatic(&coloring, tail.start, parts).unwrap(), || "not strongly mono".into())?;
    // pairwise merged blocks, by direct comparison of first letters
    let cuts: Vec<usize> = std::iter::once(tail.start)
        .chain(parts.iter().scan(tail.start, |p, &l| {
            *p += l;
            Some(*p)
        }))
        .collect();
    let firsts: HashSet<Symbol> = cuts[..cuts.len() - 1].iter().map(|&c| buf.as_slice()[c]).collect();
    ensure(firsts.len() == 1, || "merged blocks start with different letters".into())?;
    Ok(format!("tail at {} with {} blocks {:?}, verified", tail.start, parts.len(), parts))
}

fn mix(seed: u64, word: &[Symbol]) -> u64 {
    let mut h = seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ word.len() as u64;
    for &s in word {
        h = (h ^ u64::from(s)).wrapping_mul(0x1000_0000_01b3);
        h ^= h >> 29;
    }
    h
}

/// Brute force: some 3 of the 6 vertices `0..=5` span one color.
fn has_mono_triangle(color: impl Fn(usize, usize) -> u64) -> bool {
    (0..=5usize)
        .combinations(3)
        .any(|t| color(t[0], t[1]) == color(t[0], t[2]) && color(t[0], t[1]) == color(t[1], t[2]))
}

fn ramsey_case<F: Fn(&[Symbol]) -> u64 + Sync>(y: &[Symbol], f: F) -> Result<(), String> {
    let coloring = FnColoring::new(y, &f);
    let edge = |i: usize, j: usize| f(&y[i..j]);
    ensure(has_mono_triangle(edge), || "oracle found no triangle".into())?;
    let found =
        find_strongly_mono_prefix(&[0], 2, 5, &coloring).map_err(|e| e.to_string())?.ok_or("no factorization")?;
    let cuts = [0, found.parts[0], found.parts[0] + found.parts[1]];
    ensure(found.start == 0 && found.parts.len() == 2 && cuts[2] <= 5, || format!("bad shape {found:?}"))?;
    let c = edge(cuts[0], cuts[1]);
    ensure(edge(cuts[1], cuts[2]) == c && edge(cuts[0], cuts[2]) == c, || format!("{found:?} not strongly mono"))
}

fn criterion_8() -> Check {
    let tail = prefix(&WordSource::fibonacci(), 64).unwrap();
    let y = prepend_power(&[0], 5, &tail);
    let y = y.as_slice();
    // every 2-coloring of {a, aa, ..., a^5}
    for mask in 0u64..32 {
        ramsey_case(y, move |w: &[Symbol]| {
            if w.iter().all(|&s| s == 0) && w.len() <= 5 {
                (mask >> (w.len() - 1)) & 1
            } else {
                u64::from(w[0])
            }
        })
        .map_err(|e| format!("mask {mask:05b}: {e}"))?;
    }
    // 50 distinct seeded colorings of all factors of y[..24]
    let factors: Vec<&[Symbol]> = (0..24).flat_map(|i| (i + 1..=24).map(move |j| &y[i..j])).unique().collect();
    let mut seen = HashSet::new();
    let mut seed = 0;
    while seen.len() < 50 {
        let signature: Vec<u64> = factors.iter().map(|w| mix(seed, w) & 1).collect();
        if seen.insert(signature) {
            ramsey_case(y, move |w: &[Symbol]| mix(seed, w) & 1).map_err(|e| format!("seed {seed}: {e}"))?;
        }
        seed += 1;
    }
    Ok(format!("all 32 colorings of a..a^5 and 50 distinct seeded colorings of {} factors succeed", factors.len()))
}

fn criterion_9() -> Check {
    let mut out = Vec::new();
    for k in 2..=4u32 {
        let kk = BigUint::from(k);
        let q = &kk * (&kk + 1u32) * (&kk + 1u32);
        let terms = k.pow(5);
        let mut sum = BigUint::from(2u32);
        for i in 0..terms {
            sum += BigUint::from(2u32) * Pow::pow(&kk, i) * Pow::pow(&(&kk + 1u32), 2 * i);
        }
        let rc = RecurrenceConstant::new(k as usize).unwrap();
        let bound = color_count_bound(rc);
        let closed = color_count_closed_form(rc);
        // geometric: (sum - 2)(q - 1) = 2(q^{K^5} - 1)
        let geometric = (&sum - 2u32) * (&q - 1u32) == BigUint::from(2u32) * (Pow::pow(&q, terms) - BigUint::one());
        ensure(bound == sum && closed == sum && geometric && !sum.is_zero(), || format!("K = {k} disagrees"))?;
        out.push(format!("K={k}: {} digits", sum.to_string().len()));
    }
    Ok(format!("bound, term sum and closed form agree ({})", out.join(", ")))
}

fn criterion_10() -> Check {
    let spec = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../specs/fibonacci.toml");
    let run = || {
        let out = Command::new(env!("CARGO_BIN_EXE_lrwords"))
            .args(["verify", "--spec", spec.to_str().unwrap(), "--n", "200", "--format", "machine"])
            .output()
            .expect("binary runs");
        (out.status.code(), String::from_utf8(out.stdout).unwrap())
    };
    let (a, b) = (run(), run());
    ensure(a.0 == Some(0) && b.0 == Some(0), || format!("exit codes {:?} {:?}", a.0, b.0))?;
    let body = |s: &str| s.lines().filter(|l| !l.contains("elapsed_ms")).map(String::from).collect::<Vec<_>>();
    ensure(body(&a.1) == body(&b.1), || "reports differ outside timing".into())?;
    ensure(strip_timing(&a.1).is_some() && strip_timing(&a.1) == strip_timing(&b.1), || {
        "stripped reports differ".into()
    })?;
    Ok(format!("two verify runs give identical {}-byte machine reports modulo timing", a.1.len()))
}

#[test]
fn acceptance_criteria() {
    let criteria: [Criterion; 10] = [
        ("fibonacci theorem check", criterion_1),
        ("thue-morse theorem check", criterion_2),
        ("negative controls", criterion_3),
        ("recurrence audit", criterion_4),
        ("lambda and theta identities", criterion_5),
        ("enumeration oracle", criterion_6),
        ("ramsey tail", criterion_7),
        ("finite ramsey", criterion_8),
        ("color count", criterion_9),
        ("determinism", criterion_10),
    ];
    let mut failed = Vec::new();
    let mut stderr = std::io::stderr();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        let line = match &result {
            Ok(detail) => format!("[PASS] {} {name}: {detail}", i + 1),
            Err(why) => {
                failed.push(i + 1);
                format!("[FAIL] {} {name}: {why}", i + 1)
            }
        };
        let _ = writeln!(stderr, "{line}");
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
