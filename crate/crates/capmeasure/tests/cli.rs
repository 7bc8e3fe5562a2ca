//! End-to-end tests of the command-line surface, run in-process.

use std::fs;
use std::path::Path;

use capmeasure::cli::run;

fn invoke(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(args.iter().map(|s| s.to_string()), &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn write(dir: &Path, name: &str, contents: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, contents).unwrap();
    path.to_string_lossy().into_owned()
}

const S2: &str = "carrier a b\nmatrix\n0 2\n3 0\n";

#[test]
fn check_valid_space() {
    let dir = tempfile::tempdir().unwrap();
    let s2 = write(dir.path(), "s2.space", S2);
    let (code, out, _) = invoke(&["check", &s2]);
    assert_eq!(code, 0);
    for needle in ["CAL1 ok", "CAL3 ok", "PSAP yes", "PRAP yes", "AP yes"] {
        assert!(out.contains(needle), "missing `{needle}` in:\n{out}");
    }
}

#[test]
fn check_rejects_bad_input() {
    let dir = tempfile::tempdir().unwrap();
    let nonzero = write(dir.path(), "bad.space", "carrier a b\nmatrix\n1 2\n3 0\n");
    let (code, _, err) = invoke(&["check", &nonzero]);
    assert_eq!(code, 2);
    assert!(err.contains("CAL1"));

    let division = write(dir.path(), "div.space", "carrier a b\nmatrix\n0 1/0\n3 0\n");
    let (code, _, err) = invoke(&["check", &division]);
    assert_eq!(code, 2);
    assert!(err.contains("line 3"));
}

#[test]
fn check_reports_non_approach_witness() {
    let dir = tempfile::tempdir().unwrap();
    let s3 = write(
        dir.path(),
        "s3.space",
        "carrier a b c\nmatrix\n0 1 inf\ninf 0 1\n1 inf 0\n",
    );
    let (code, out, _) = invoke(&["check", &s3]);
    assert_eq!(code, 0);
    assert!(out.contains("PSAP yes"));
    assert!(out.contains("PRAP yes"));
    assert!(out.contains("AP no"));
}

#[test]
fn measure_examples() {
    let dir = tempfile::tempdir().unwrap();
    let s2 = write(dir.path(), "s2.space", S2);

    let (code, out, _) = invoke(&["measure", &s2, "--class", "all", "--at", "b", "--filter", "a"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("2\n"));
    assert!(out.contains("witness: class filter {a}^"));

    let (_, out, _) = invoke(&["measure", &s2, "--at", "a,b", "--filter", "a,b"]);
    assert!(out.starts_with("0\n"));

    let (_, out, _) = invoke(&["measure", &s2, "--class", "points", "--at", "b", "--filter", "a"]);
    assert!(out.starts_with("2\n"));

    let (code, _, err) = invoke(&["measure", &s2, "--at", "z", "--filter", "a"]);
    assert_eq!(code, 2);
    assert!(err.contains("invalid element"));
}

#[test]
fn classify_identity_and_collapse() {
    let dir = tempfile::tempdir().unwrap();
    let s2 = write(dir.path(), "s2.space", S2);
    let idmap = write(dir.path(), "id.map", "map\na -> a\nb -> b\n");
    let (code, out, _) = invoke(&["classify", &s2, &s2, &idmap]);
    assert_eq!(code, 0);
    assert!(out.contains("contraction: yes"));
    assert!(out.contains("hereditarily quotient [principal]: yes"));
    assert!(out.contains("closed == principal-perfect: true"));

    // collapse onto a one-point space
    let one = write(dir.path(), "one.space", "carrier p\nmatrix\n0\n");
    let collapse = write(dir.path(), "collapse.map", "map\na -> p\nb -> p\n");
    let (code, out, _) = invoke(&["classify", &s2, &one, &collapse]);
    assert_eq!(code, 0);
    assert!(out.contains("perfect [all]: yes"));
    assert!(out.contains("biquotient [all]: yes"));

    // contraction failure carries a witness
    let ind = write(dir.path(), "ind.space", "carrier a b\nmatrix\n0 0\n0 0\n");
    let (_, out, _) = invoke(&["classify", &ind, &s2, &idmap]);
    assert!(out.contains("contraction: no ("));
}

#[test]
fn json_formats_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let sj = write(
        dir.path(),
        "s2.json",
        r#"{"carrier": ["a","b"], "matrix": [["0","2"],["3","0"]]}"#,
    );
    let (code, out, _) = invoke(&["measure", &sj, "--at", "b", "--filter", "a"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("2\n"));

    let mj = write(dir.path(), "id.json", r#"{"map": [["a","a"],["b","b"]]}"#);
    let (code, out, _) = invoke(&["classify", &sj, &sj, &mj]);
    assert_eq!(code, 0);
    assert!(out.contains("contraction: yes"));
}

#[test]
fn verify_exit_codes_and_formats() {
    let (code, out, _) = invoke(&["verify", "ADH-TWO-FORMS", "--max-size", "2"]);
    assert_eq!(code, 0);
    assert!(out.contains("violations: 0"));
    assert!(out.contains("runtime:"));

    let (code, out, _) = invoke(&[
        "verify",
        "MAIN-PRODUCT-12",
        "--max-size",
        "2,2",
        "--format",
        "summary",
    ]);
    assert_eq!(code, 0);
    let parsed: serde_json::Value = serde_json::from_str(out.trim()).unwrap();
    assert_eq!(parsed["theorem"], "MAIN-PRODUCT-12");
    assert_eq!(parsed["violations"].as_array().unwrap().len(), 0);
    assert!(out.trim().lines().count() == 1);

    let (code, _, err) = invoke(&["verify", "NO-SUCH-THEOREM"]);
    assert_eq!(code, 2);
    assert!(err.contains("unknown theorem id"));

    // a mutated run must catch its own sabotage to exit 0
    let (code, _, _) = invoke(&["verify", "--mutated", "MUT-TYCH-SUM"]);
    assert_eq!(code, 0);
}

#[test]
fn verify_budget_refusal() {
    let (code, _, err) = invoke(&["verify", "ADH-TWO-FORMS", "--max-size", "6"]);
    assert_eq!(code, 2);
    assert!(err.contains("budget exceeded"));
    assert!(err.contains("CAPMEASURE_BUDGET"));
}

#[test]
fn search_reports_findings_with_exit_one() {
    let (code, out, _) = invoke(&["search", "WEAK-MAIN-PRODUCT-STRICT"]);
    assert_eq!(code, 1);
    assert!(out.contains("violation:"));

    let (code, out, _) = invoke(&["search", "WEAK-LEM2-POINTCLASS"]);
    assert_eq!(code, 0, "no divergence expected in the searched range:\n{out}");
    assert!(out.contains("violations: 0"));
}

#[test]
fn enumerate_spaces_and_filters() {
    let (code, out, _) = invoke(&["enumerate", "spaces", "--size", "2", "--grid", "0,inf", "--count-only"]);
    assert_eq!(code, 0);
    assert!(out.contains("count: 4"));

    let (code, out, _) = invoke(&["enumerate", "spaces", "--size", "3", "--grid", "0,1,inf", "--count-only"]);
    assert_eq!(code, 0);
    assert!(out.contains("count: 729"));

    let (code, out, _) = invoke(&["enumerate", "filters", "--carrier", "a,b,c"]);
    assert_eq!(code, 0);
    assert!(out.contains("count: 7"));
    assert!(out.contains("{a,b,c}^"));

    let (code, out, _) = invoke(&[
        "enumerate", "filters", "--carrier", "a,b", "--include-degenerate",
    ]);
    assert_eq!(code, 0);
    assert!(out.contains("count: 4"));
    assert!(out.contains("degenerate"));

    // enumeration over an impossible grid is refused before computing
    let (code, _, err) = invoke(&["enumerate", "spaces", "--size", "9", "--grid", "0,1,inf"]);
    assert_eq!(code, 2);
    assert!(err.contains("budget exceeded"));
}

#[test]
fn cli_output_is_deterministic() {
    let args = ["verify", "TYCHONOFF-FINITE", "--format", "summary"];
    let (c1, o1, _) = invoke(&args);
    let (c2, o2, _) = invoke(&args);
    assert_eq!(c1, 0);
    assert_eq!(c1, c2);
    assert_eq!(o1, o2);
}
