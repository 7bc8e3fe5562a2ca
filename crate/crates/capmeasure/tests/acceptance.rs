//! Acceptance suite: one test per criterion, each printing a PASS/FAIL
//! line (visible with `cargo test --test acceptance -- --nocapture`).
//!
//! All comparisons are exact; the arithmetic is rational, so every
//! tolerance here is zero.

use std::time::{Duration, Instant};

use capmeasure::compactness::measure_at_set;
use capmeasure::harness::{
    catalog, mutate_and_expect_failure, mutations, search_counterexample, verify, InstanceSpec,
    Mode, TheoremReport,
};
use capmeasure::space::adherence;
use capmeasure::{ExtReal, FilterClass};

fn criterion(number: u32, name: &str, pass: bool) {
    println!(
        "ACCEPTANCE {number:>2} {name}: {}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "acceptance criterion {number} ({name}) failed");
}

fn run_default(id: &str) -> (TheoremReport, Duration) {
    let start = Instant::now();
    let report = verify(id, None, 1).expect("catalog entry runs");
    (report, start.elapsed())
}

#[test]
fn criterion_01_adh_two_forms() {
    let (report, elapsed) = run_default("ADH-TWO-FORMS");
    // 729 three-point structures plus the smaller sizes, every proper filter
    let pass = report.passed() && report.instances >= 729 * 7 && elapsed < Duration::from_secs(5);
    criterion(1, "ADH-TWO-FORMS exact agreement", pass);
}

#[test]
fn criterion_02_thm1_adh_measure() {
    let (report, elapsed) = run_default("THM1-ADH-MEASURE");
    let pass = report.passed() && elapsed < Duration::from_secs(10);
    criterion(2, "THM1 reflection equals singleton measure", pass);
}

#[test]
fn criterion_03_lem2_pointwise() {
    let (report, elapsed) = run_default("LEM2-POINTWISE");
    // at least the 81 two-point space pairs with all 16 relations
    let pass =
        report.passed() && report.instances >= 81 * 16 && elapsed < Duration::from_secs(60);
    criterion(3, "LEM2 definitional = pointwise", pass);
}

#[test]
fn criterion_04_thm4_and_char() {
    let (thm4, _) = run_default("THM4-APPROACH-CODOMAIN");
    let (chr, _) = run_default("COR-CHAR");
    criterion(
        4,
        "THM4/COR-CHAR over approach codomains",
        thm4.passed() && chr.passed(),
    );
}

#[test]
fn criterion_05_closed_and_thm6() {
    let start = Instant::now();
    let (closed, _) = run_default("PROP-CLOSED-F0");
    let (thm6, _) = run_default("THM6-PERFECT");
    let pass = closed.passed() && thm6.passed() && start.elapsed() < Duration::from_secs(60);
    criterion(5, "closed = principal-perfect; THM6", pass);
}

#[test]
fn criterion_06_quotient_theorems() {
    let (thm8, _) = run_default("THM8-QUOTIENT");
    let (ppq, _) = run_default("PROP-PERFECT-QUOTIENT");
    criterion(
        6,
        "THM8; perfect surjective implies quotient",
        thm8.passed() && ppq.passed(),
    );
}

#[test]
fn criterion_07_main_product() {
    let start = Instant::now();
    let (p12, _) = run_default("MAIN-PRODUCT-12");
    let (p23, _) = run_default("MAIN-PRODUCT-23");
    let (p31, _) = run_default("MAIN-PRODUCT-31");
    let pass = p12.passed()
        && p23.passed()
        && p31.passed()
        && start.elapsed() < Duration::from_secs(120);
    criterion(7, "main product inequality and atomic witnesses", pass);
}

#[test]
fn criterion_08_tychonoff() {
    let (report, _) = run_default("TYCHONOFF-FINITE");
    criterion(8, "finite Tychonoff identity (2 and 3 factors)", report.passed());
}

#[test]
fn criterion_09_meta_collapse() {
    let (report, _) = run_default("META-COLLAPSE");
    criterion(
        9,
        "PSAP/PRAP everywhere, every space compact, classes coincide",
        report.passed(),
    );
}

#[test]
fn criterion_10_mutation_self_tests() {
    let all = mutations();
    let mut pass = all.len() >= 6;
    for m in all {
        let caught = mutate_and_expect_failure(m.id).expect("mutation runs");
        println!("  mutation {}: {}", m.id, if caught { "caught" } else { "MISSED" });
        pass &= caught;
    }
    criterion(10, "every registered mutation is caught", pass);
}

#[test]
fn criterion_11_determinism_and_replay() {
    // byte-identical reports for repeated identical runs (exhaustive)
    let (a, _) = run_default("ADH-TWO-FORMS");
    let (b, _) = run_default("ADH-TWO-FORMS");
    let mut pass = a.canonical_text() == b.canonical_text()
        && a.summary_json() == b.summary_json();

    // and for a seeded random run
    let spec = InstanceSpec::new(
        vec![2, 2],
        InstanceSpec::default_grid(),
        Mode::Random { seed: 11, count: 64 },
    )
    .unwrap();
    let ra = verify("LEM2-POINTWISE", Some(spec.clone()), 1).unwrap();
    let rb = verify("LEM2-POINTWISE", Some(spec), 1).unwrap();
    pass &= ra.canonical_text() == rb.canonical_text();

    // recorded witnesses replay standalone to the same exact values
    let strict = search_counterexample("WEAK-MAIN-PRODUCT-STRICT", None, 1).unwrap();
    pass &= !strict.violations.is_empty();
    let entry = capmeasure::harness::weakenings::find_weakening("WEAK-MAIN-PRODUCT-STRICT")
        .unwrap();
    for v in &strict.violations {
        let (lhs, rhs) = entry
            .reevaluate(v)
            .expect("re-evaluator registered")
            .expect("witness re-evaluates");
        pass &= lhs == v.lhs && rhs == v.rhs;
    }

    // a measure witness reproduces the reported value on re-evaluation
    let grid = InstanceSpec::default_grid();
    let carrier = capmeasure::harness::generate::default_carrier(0, 2);
    for s in capmeasure::harness::enum_spaces(&carrier, &grid).unwrap() {
        for f in capmeasure::enumerate_filters(&carrier, false) {
            for a in carrier.subsets().filter(|a| !a.is_empty()) {
                let report = measure_at_set(&s, &FilterClass::all(), &a, &f).unwrap();
                if let Some(w) = &report.witness_filter {
                    let replayed = ExtReal::meet_all(
                        adherence(&s, w)
                            .unwrap()
                            .into_iter()
                            .zip(carrier.labels())
                            .filter(|(_, l)| a.contains(l))
                            .map(|(v, _)| v),
                    );
                    pass &= replayed == report.value;
                }
            }
        }
    }

    criterion(11, "byte-identical reruns and exact witness replay", pass);
}

/// The catalog as a whole stays green on its default sweeps.
#[test]
fn full_catalog_green() {
    for entry in catalog() {
        let report = entry.run(&entry.default_spec(), 1).expect("entry runs");
        println!(
            "  {:<26} instances={:<8} violations={}",
            entry.id,
            report.instances,
            report.violations.len()
        );
        assert!(
            report.passed(),
            "catalog entry {} reported violations:\n{}",
            entry.id,
            report.canonical_text()
        );
    }
}
