use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn dequant(args: &[&str]) -> Output {
    dequant_env(args, &[])
}

fn dequant_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_dequant"));
    cmd.args(args).env_remove("DEQUANT_THREADS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{}: {}", e, stdout(out)))
}

fn golden(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {}", path.display(), e))
}

fn c(v: &Value) -> (f64, f64) {
    (v[0].as_f64().unwrap(), v[1].as_f64().unwrap())
}

fn rows(v: &Value) -> &Vec<Value> {
    v["rows"].as_array().unwrap()
}

fn row<'a>(v: &'a Value, method: &str) -> &'a Value {
    rows(v)
        .iter()
        .find(|r| r["method"] == method)
        .unwrap_or_else(|| panic!("no row {}", method))
}

const GOLDEN: &[(&str, &[&str])] = &[
    (
        "dequantize_number.json",
        &["dequantize", "--system", "boson", "--expr", "N"],
    ),
    (
        "dequantize_boson_spin.json",
        &[
            "dequantize",
            "--expr",
            "kron(N, Sz{s=1}) + 1/2*kron(I{boson}, Sz{s=1}^2)",
        ],
    ),
    (
        "quantize_sphere.json",
        &[
            "quantize",
            "--spin",
            "3/2",
            "--expr",
            "(-z*zb + 2)/(1 + z*zb)",
        ],
    ),
    (
        "partition_number_squared.json",
        &[
            "partition",
            "--expr",
            "N^2",
            "--beta",
            "1",
            "--method",
            "all",
        ],
    ),
    (
        "slicing_compare_spin.json",
        &[
            "slicing-compare",
            "--expr",
            "Sz{s=1}",
            "--time",
            "0.7",
            "--slices",
            "8,16",
        ],
    ),
    ("gvh.json", &["gvh"]),
];

#[test]
fn golden_files_are_byte_identical() {
    for (file, args) in GOLDEN {
        let out = dequant(args);
        assert!(out.status.success(), "{:?}: {}", args, stderr(&out));
        assert_eq!(stdout(&out), golden(file), "{:?}", args);
    }
}

#[test]
fn output_does_not_depend_on_worker_count() {
    let args = [
        "slicing-compare",
        "--expr",
        "N + 1/2",
        "--beta",
        "0.5",
        "--time",
        "0.3",
        "--slices",
        "16,32",
    ];
    let one = dequant_env(&args, &[("DEQUANT_THREADS", "1")]);
    let four = dequant_env(&args, &[("DEQUANT_THREADS", "4")]);
    assert!(one.status.success(), "{}", stderr(&one));
    assert_eq!(one.stdout, four.stdout);
}

#[test]
fn number_operator_symbol() {
    let v = json(&dequant(&[
        "dequantize",
        "--system",
        "boson",
        "--expr",
        "N",
    ]));
    assert_eq!(v["symbol"], "z*zb - 1/2");
    assert_eq!(v["route"], "first_order");
}

#[test]
fn number_squared_partition_agrees() {
    let out = dequant(&[
        "partition",
        "--expr",
        "N^2",
        "--beta",
        "1",
        "--method",
        "all",
    ]);
    assert!(out.status.success());
    let v = json(&out);
    let oracle: f64 = (0..40).map(|m: i32| (-(m * m) as f64).exp()).sum();
    let exact = c(&row(&v, "exact")["value"]);
    let reduced = c(&row(&v, "reduced_sum")["value"]);
    assert!((exact.0 - oracle).abs() < 1e-13 && exact.1 == 0.0);
    assert!((reduced.0 - exact.0).abs() <= 1e-8 && reduced.1.abs() <= 1e-8);
    assert!(row(&v, "reduced_sum")["abs_err_vs_exact"].as_f64().unwrap() <= 1e-8);
    for r in rows(&v) {
        let keys: Vec<&String> = r.as_object().unwrap().keys().collect();
        assert_eq!(
            keys,
            ["method", "value", "abs_err_vs_exact", "phase_offset"]
        );
    }
}

#[test]
fn gvh_residual_is_a_nonzero_scalar() {
    let v = json(&dequant(&["gvh"]));
    assert_eq!(v["quadratic_homomorphism_ok"], true);
    assert_eq!(v["residual_is_scalar"], true);
    let (re, im) = c(&v["residual_value"]);
    assert!(re.hypot(im) > 0.5);
    assert!(v["matrix_max_deviation"].as_f64().unwrap() < 1e-9);
}

#[test]
fn spin_phase_offsets() {
    let v = json(&dequant(&[
        "slicing-compare",
        "--expr",
        "Sz",
        "--spin",
        "1",
        "--time",
        "0.7",
        "--slices",
        "8,16",
    ]));
    let closed = 1.05f64.sin() / 0.35f64.sin();
    let z = c(&row(&v, "reduced_sum:corrected")["value"]);
    assert!((z.0 - closed).abs() < 1e-12 && z.1.abs() < 1e-12);
    let offset = row(&v, "reduced_sum:naive")["phase_offset"]
        .as_f64()
        .unwrap();
    assert!((offset - 0.35).abs() < 1e-12);
}

#[test]
fn transfer_modes_and_richardson() {
    let v = json(&dequant(&[
        "partition",
        "--expr",
        "N + 1/2",
        "--beta",
        "1",
        "--time",
        "0.5",
        "--method",
        "transfer",
        "--mode",
        "diagonal-kernel",
        "--slices",
        "64,128,256,512",
        "--truncation",
        "80",
    ]));
    // the corrected symbol read anti-normally is N + 1
    let offset = row(&v, "transfer:diagonal_kernel:richardson")["phase_offset"]
        .as_f64()
        .unwrap();
    assert!((offset + 0.25).abs() < 1e-6, "{}", offset);
    assert_eq!(rows(&v).len(), 6);
}

#[test]
fn metaplectic_off_warns() {
    let out = dequant(&[
        "dequantize",
        "--system",
        "boson",
        "--expr",
        "N",
        "--metaplectic",
        "off",
    ]);
    assert!(out.status.success());
    assert!(stderr(&out).starts_with("warning:"));
    assert_eq!(json(&out)["symbol"], "z*zb");
    let out = dequant(&[
        "partition",
        "--expr",
        "N",
        "--beta",
        "1",
        "--metaplectic",
        "off",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn parse_errors_exit_one_with_position() {
    let out = dequant(&["dequantize", "--expr", "N + * a"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("error[SyntaxError]: line 1, column 5"));
    assert_eq!(json(&out)["error"], "SyntaxError");
    for (expr, name) in [
        ("N + Sx", "UnknownAtom"),
        ("Sz^2", "MissingSpinLabel"),
        ("N + Sz{s=1}", "AmbiguousSystem"),
    ] {
        let out = dequant(&["dequantize", "--expr", expr]);
        assert_eq!(out.status.code(), Some(1), "{}", expr);
        assert_eq!(json(&out)["error"], name, "{}", expr);
    }
}

#[test]
fn domain_errors_exit_two_with_subexpression() {
    let out = dequant(&["dequantize", "--expr", "N + a^2"]);
    assert_eq!(out.status.code(), Some(2));
    let v = json(&out);
    assert_eq!(v["error"], "PolarizationViolated");
    assert_eq!(v["subexpression"], "a^2");
    assert!(stderr(&out).starts_with("error[PolarizationViolated]"));

    let out = dequant(&[
        "dequantize",
        "--expr",
        "kron(N, Sz{s=1}) + kron(a^2, Sz{s=1})",
        "--format",
        "text",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stdout(&out).is_empty());
    assert!(stderr(&out).contains("in: ad*a + a^2"), "{}", stderr(&out));

    let out = dequant(&["partition", "--expr", "N", "--method", "reduced"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["error"], "DivergentSum");

    let out = dequant(&["quantize", "--expr", "z/zb"]);
    assert_eq!(out.status.code(), Some(1));

    let out = dequant(&[
        "partition",
        "--expr",
        "N",
        "--beta",
        "1",
        "--truncation",
        "1",
        "--method",
        "exact",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["error"], "TruncationTooSmall");
}

#[test]
fn usage_errors_exit_one() {
    for args in [
        &["bogus"][..],
        &["partition", "--expr", "N", "--beta", "-1"],
        &["partition", "--expr", "N", "--method", "sideways"],
        &["dequantize", "--expr", "Sz", "--system", "spin"],
        &["dequantize", "--expr", "N", "--systems", "fermion"],
        &["partition"],
    ] {
        let out = dequant(args);
        assert_eq!(out.status.code(), Some(1), "{:?}: {}", args, stderr(&out));
    }
    let out = dequant_env(&["gvh"], &[("DEQUANT_THREADS", "zero")]);
    assert_eq!(out.status.code(), Some(1));
    assert!(dequant(&["--help"]).status.success());
}

#[test]
fn csv_and_text_formats() {
    let out = dequant(&[
        "partition",
        "--expr",
        "N^2",
        "--beta",
        "1",
        "--method",
        "exact",
        "--format",
        "csv",
    ]);
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("method,value_re,value_im,abs_err_vs_exact,phase_offset")
    );
    assert!(lines.next().unwrap().starts_with("exact,1.38631860241332"));
    assert_eq!(lines.next(), None);

    let out = dequant(&["dequantize", "--expr", "Sz{s=1/2}", "--format", "text"]);
    assert!(stdout(&out)
        .lines()
        .any(|l| l.split_whitespace().collect::<Vec<_>>() == ["symbol", "1/(1", "+", "z*zb)"]));
}

#[test]
fn writes_to_out_file() {
    let dir = std::env::temp_dir().join(format!("dequant-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("gvh.json");
    let out = dequant(&["gvh", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), golden("gvh.json"));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn declared_systems_fill_labels() {
    let v = json(&dequant(&[
        "partition",
        "--expr",
        "kron(N, Sz + 2) + kron(I, Sz^2)",
        "--systems",
        "boson,spin:3/2",
        "--beta",
        "0.7",
        "--time",
        "0.2",
        "--method",
        "reduced",
        "--truncation",
        "120",
    ]));
    assert_eq!(v["systems"], serde_json::json!(["boson", "spin:3/2"]));
    assert!(row(&v, "reduced_sum")["abs_err_vs_exact"].as_f64().unwrap() < 1e-10);
}
