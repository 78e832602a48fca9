//! End-to-end tests of the command-line interface: JSON shapes, exit
//! codes, spec-file ingestion, catalog runs, and determinism.

use std::io::Write;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_epsilon-cycles"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_lines(out: &Output) -> Vec<serde_json::Value> {
    String::from_utf8_lossy(&out.stdout)
        .lines()
        .map(|l| serde_json::from_str(l).expect("stdout is JSON lines"))
        .collect()
}

fn write_file(dir: &Path, name: &str, contents: &str) -> std::path::PathBuf {
    let path = dir.join(name);
    let mut f = std::fs::File::create(&path).expect("create file");
    f.write_all(contents.as_bytes()).expect("write file");
    path
}

const SPEC: &str = r#"
[field]
p = 5
f = 1

[sheaf]
expr = "kummer(chi[1], x^2 + 4*x) * twist(zeta[3])"

[form]
g = "1"
"#;

#[test]
fn gauss_sum_reports_value_and_valuation() {
    let out = run(&["gauss-sum", "--p", "5", "--char-exponent", "1"]);
    assert!(out.status.success());
    let lines = stdout_lines(&out);
    assert_eq!(lines.len(), 1);
    let v = &lines[0];
    assert_eq!(v["schema"], "1");
    assert_eq!(v["q"], 5);
    assert_eq!(v["valuation"], "3/4");
    assert_eq!(v["cyclotomic_order"], 20);
    // exact value, frozen
    assert_eq!(v["value"], "z20^3 - z20^4 - z20^6 - z20^7");
}

#[test]
fn gauss_sum_rejects_trivial_additive_character() {
    let out = run(&["gauss-sum", "--p", "5", "--char-exponent", "1", "--add-shift", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn jacobi_sum_validates_the_datum_condition() {
    let ok = run(&["jacobi-sum", "--p", "5", "--exponents", "1,3"]);
    assert!(ok.status.success());
    assert_eq!(stdout_lines(&ok)[0]["value"], "-5");
    // psi-independence visible through the flag
    let other = run(&["jacobi-sum", "--p", "5", "--exponents", "1,3", "--psi", "3"]);
    assert_eq!(stdout_lines(&other)[0]["value"], "-5");
    // exponents that do not multiply to the trivial character are invalid
    let bad = run(&["jacobi-sum", "--p", "5", "--exponents", "1,1"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn stickelberger_lists_all_characters_and_the_oracle() {
    let out = run(&["stickelberger", "--p", "7"]);
    assert!(out.status.success());
    let lines = stdout_lines(&out);
    assert_eq!(lines.len(), 5);
    for line in &lines {
        assert_eq!(line["agrees"], true);
        assert_eq!(line["valuation"], line["oracle_valuation"]);
    }
    let single = run(&["stickelberger", "--p", "7", "--char-exponent", "2"]);
    assert_eq!(stdout_lines(&single).len(), 1);
}

#[test]
fn l_function_from_a_spec_file() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_file(dir.path(), "spec.toml", SPEC);
    let out = run(&["l-function", "--spec", spec.to_str().unwrap(), "--n-max", "3"]);
    assert!(out.status.success());
    let v = &stdout_lines(&out)[0];
    assert_eq!(v["degree"], 1);
    assert_eq!(v["L"]["kind"], "polynomial");
    assert_eq!(v["L"]["coeffs"].as_array().unwrap().len(), 2);
    assert_eq!(v["S"].as_array().unwrap().len(), 3);
    assert_eq!(v["epsilon"]["valuation"], "0");
}

#[test]
fn local_epsilon_accepts_rational_quadratic_and_infinite_points() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_file(dir.path(), "spec.toml", SPEC);
    let s = spec.to_str().unwrap();
    for (point, ord) in [("0", 0), ("4", 0), ("inf", -2)] {
        let out = run(&["local-epsilon", "--spec", s, "--point", point]);
        assert!(out.status.success(), "point {point}");
        let v = &stdout_lines(&out)[0];
        assert_eq!(v["ord_omega"], ord);
        assert_eq!(v["derived_from_global"], false);
        assert_eq!(v["swan"], 0);
    }
    // a quadratic place through an irreducible polynomial
    let out = run(&["local-epsilon", "--spec", s, "--point", "x^2 + 2"]);
    assert!(out.status.success());
    // reducible input names no place
    let out = run(&["local-epsilon", "--spec", s, "--point", "x^2 + 4"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn local_epsilon_flags_wild_points_as_derived() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_file(
        dir.path(),
        "wild.toml",
        "[field]\np = 3\n\n[sheaf]\nexpr = \"as(1, x)\"\n",
    );
    let out = run(&["local-epsilon", "--spec", spec.to_str().unwrap(), "--point", "inf"]);
    assert!(out.status.success());
    let v = &stdout_lines(&out)[0];
    assert_eq!(v["derived_from_global"], true);
    assert_eq!(v["swan"], 1);
    assert_eq!(v["bare"], "q^(-1)");
}

#[test]
fn cycle_dumps_have_one_component_per_line() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_file(dir.path(), "spec.toml", SPEC);
    let s = spec.to_str().unwrap();
    let eps = run(&["epsilon-cycle", "--spec", s]);
    let lines = stdout_lines(&eps);
    assert_eq!(lines.len(), 4); // zero section + three bad fibers
    assert!(lines.iter().all(|l| l["multiplicity"] == -1));
    assert_eq!(lines[0]["component"], "[Zero]");
    let cc = run(&["char-cycle", "--spec", s]);
    let lines = stdout_lines(&cc);
    assert_eq!(lines.len(), 4);
    assert!(lines.iter().all(|l| l["coefficient"] == -1));
}

#[test]
fn check_subcommands_report_and_exit_zero() {
    let out = run(&["milnor-check", "--p", "7", "--n", "3"]);
    assert!(out.status.success());
    assert_eq!(stdout_lines(&out)[0]["verdict"], "pass");
    let out = run(&["snc-check", "--p", "5", "--exponents", "1,2", "--twist", "zeta[8]"]);
    assert!(out.status.success());
    assert_eq!(stdout_lines(&out)[0]["verdict"], "pass");
    let out = run(&["external-product-check", "--p", "5", "--exponents", "1,3"]);
    assert!(out.status.success());
    assert_eq!(stdout_lines(&out)[0]["verdict"], "pass");
}

#[test]
fn product_formula_check_skips_wild_sheaves_with_reason() {
    let out = run(&["product-formula-check", "--p", "3", "--sheaf", "as(1, x)"]);
    assert!(out.status.success(), "a documented skip is not a failure");
    let v = &stdout_lines(&out)[0];
    assert_eq!(v["verdict"], "skip");
    assert!(v["reason"].as_str().unwrap().contains("wild-point policy"));
}

#[test]
fn run_catalog_keeps_order_and_honours_jobs() {
    let dir = tempfile::tempdir().unwrap();
    let catalog = write_file(
        dir.path(),
        "catalog.toml",
        r#"
[[entry]]
check = "milnor"
n = 3
field = { p = 7, f = 1 }

[[entry]]
check = "product-formula"
field = { p = 3, f = 1 }
sheaf = { expr = "as(1, x)" }

[[entry]]
check = "gauss-norm"
field = { p = 7, f = 1 }
"#,
    );
    let c = catalog.to_str().unwrap();
    let serial = bin()
        .args(["run-catalog", c])
        .env("EPSILON_JOBS", "1")
        .output()
        .unwrap();
    assert!(serial.status.success());
    let parallel = run(&["run-catalog", c, "--jobs", "4"]);
    assert!(parallel.status.success());
    let a = stdout_lines(&serial);
    let b = stdout_lines(&parallel);
    assert_eq!(a.len(), 3);
    // catalog order regardless of completion order
    assert_eq!(a[0]["check"], "milnor");
    assert_eq!(a[1]["check"], "product-formula");
    assert_eq!(a[1]["verdict"], "skip");
    assert_eq!(a[2]["check"], "gauss-norm");
    // byte-determinism apart from timings
    for (x, y) in a.iter().zip(b.iter()) {
        let mut x = x.clone();
        let mut y = y.clone();
        x["millis"] = 0.into();
        y["millis"] = 0.into();
        assert_eq!(x, y);
    }
}

#[test]
fn run_catalog_empty_file_reports_nothing_and_passes() {
    let dir = tempfile::tempdir().unwrap();
    let catalog = write_file(dir.path(), "empty.toml", "");
    let out = run(&["run-catalog", catalog.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
}

#[test]
fn run_catalog_configuration_errors_exit_two() {
    // neither a file nor a builtin
    let out = run(&["run-catalog", "no-such-catalog"]);
    assert_eq!(out.status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    // unknown key, reported with line and column
    let bad = write_file(dir.path(), "bad.toml", "[[entry]]\ncheck = \"gauss-norm\"\nfeild = { p = 7 }\n");
    let out = run(&["run-catalog", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
    // unknown check name
    let bad = write_file(dir.path(), "badcheck.toml", "[[entry]]\ncheck = \"made-up\"\n");
    let out = run(&["run-catalog", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("made-up"));
}

#[test]
fn builtin_catalog_passes_end_to_end() {
    let out = run(&["run-catalog", "tame-p5"]);
    assert!(out.status.success());
    let lines = stdout_lines(&out);
    assert!(lines.len() >= 20);
    assert!(lines.iter().all(|l| l["verdict"] == "pass"));
}

#[test]
fn explain_prints_a_readable_trace() {
    let out = run(&["explain", "--check", "product-formula", "--p", "5", "--sheaf", "kummer(chi[1], x)"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("[local factor at"));
    assert!(text.contains("verdict: equal"));
    let out = run(&["explain", "--check", "theta-laws"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("[valuations]"));
    let out = run(&["explain", "--check", "made-up"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn spec_file_flags_override_blocks() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_file(
        dir.path(),
        "check.toml",
        "[field]\np = 5\n\n[check]\nname = \"milnor\"\nn = 2\n",
    );
    // file as given
    let out = run(&["milnor-check", "--spec", spec.to_str().unwrap()]);
    assert!(out.status.success());
    let v = &stdout_lines(&out)[0];
    assert!(v["inputs"].as_str().unwrap().contains("x^2"));
    // flag overrides the n in the file
    let out = run(&["milnor-check", "--spec", spec.to_str().unwrap(), "--n", "4"]);
    let v = &stdout_lines(&out)[0];
    assert!(v["inputs"].as_str().unwrap().contains("x^4"));
}
