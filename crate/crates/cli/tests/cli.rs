use std::fs;
use std::process::{Command, Output};

fn hecke(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hecke"))
        .args(args)
        .env_remove("HECKE_CACHE_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = hecke(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn code(args: &[&str]) -> i32 {
    hecke(args).status.code().expect("exit code")
}

#[test]
fn coefficients() {
    assert_eq!(
        stdout(&["ccoeff", "--p", "2", "--n", "2", "--M", "[1]", "--N", "[1]", "--L", "[1,1]"]),
        "3\n"
    );
    assert_eq!(
        stdout(&[
            "ccoeff",
            "--p",
            "2",
            "--n",
            "2",
            "--M",
            "[1]",
            "--N",
            "[1]",
            "--L",
            "[1,1]",
            "--verified"
        ]),
        "3\n"
    );
    assert_eq!(
        stdout(&["acoeff", "--p", "2", "--n", "1", "--M", "[1]", "--N", "[]"]),
        "2\n"
    );
    assert_eq!(
        stdout(&["bcoeff", "--p", "2", "--n", "1", "--B", "[1]", "--A", "[1]"]),
        "1\n"
    );
    assert_eq!(
        stdout(&["bcoeff", "--p", "3", "--n", "1", "--B", "[2]", "--A", "[]"]),
        "-3\n"
    );
}

#[test]
fn products_and_omega() {
    assert_eq!(
        stdout(&["mul", "--p", "2", "--n", "2", "1*[1]", "1*[1]"]),
        "1*[2] + 3*[1,1]\n"
    );
    assert_eq!(
        stdout(&["mul", "--p", "2", "--n", "1", "1*[]", "5*[2]"]),
        "5*[2]\n"
    );
    assert_eq!(
        stdout(&["omega", "--p", "2", "--n", "1", "1*[1]"]),
        "1*[1] + 2*[]\n"
    );
    assert_eq!(stdout(&["omega", "--p", "2", "--n", "1", "1*[]"]), "1*[]\n");
    assert_eq!(
        stdout(&["omega", "--p", "2", "--n", "1", "1*[1,1]"]),
        "1*[1]\n"
    );
    assert_eq!(
        stdout(&["decompose", "--p", "2", "--n", "2", "1*[2]"]),
        "T1^2 - 3*T2\n"
    );
}

#[test]
fn printed_elements_reparse() {
    let printed = stdout(&["mul", "--p", "3", "--n", "2", "2*[1] - [2]", "[1,1] + 4*[]"]);
    let again = stdout(&["mul", "--p", "3", "--n", "2", printed.trim()]);
    assert_eq!(printed, again);
    let json = stdout(&[
        "mul",
        "--p",
        "3",
        "--n",
        "2",
        "--output",
        "json",
        printed.trim(),
    ]);
    assert_eq!(
        stdout(&["mul", "--p", "3", "--n", "2", json.trim()]),
        printed
    );
}

#[test]
fn exit_codes() {
    let other_p = r#"{"p":3,"n":1,"terms":[{"lambda":[1],"coeff":"1"}]}"#;
    assert_eq!(code(&["mul", "--p", "2", "--n", "1", other_p]), 2);
    assert_eq!(code(&["mul", "--p", "2", "--n", "1", "1*[3,4]"]), 2);
    assert_eq!(
        code(&["ccoeff", "--p", "6", "--M", "[]", "--N", "[]", "--L", "[]"]),
        2
    );
    assert_eq!(code(&["verify", "nonsense"]), 2);
    assert_eq!(
        code(&["verify", "--budget", "5", "--max-order-exp", "3", "hom"]),
        3
    );
    assert_eq!(
        code(&["acoeff", "--budget", "1", "--M", "[3]", "--N", "[1]"]),
        3
    );
}

#[test]
fn verify_suites() {
    let out = stdout(&[
        "verify",
        "--p",
        "2",
        "--n",
        "1",
        "--max-order-exp",
        "3",
        "hom",
    ]);
    assert!(
        out.starts_with("hom p=2 n=1 max-order-exp=3: pass"),
        "{out}"
    );
    assert_eq!(
        code(&[
            "verify",
            "--p",
            "2",
            "--n",
            "2",
            "--max-order-exp",
            "2",
            "tp"
        ]),
        0
    );
    assert_eq!(
        code(&[
            "verify",
            "--p",
            "3",
            "--n",
            "1",
            "--max-order-exp",
            "4",
            "inverse"
        ]),
        0
    );
    let json = stdout(&[
        "verify",
        "--max-order-exp",
        "2",
        "all",
        "--output",
        "json",
        "--jobs",
        "2",
    ]);
    let doc: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(doc["pass"], true);
    assert_eq!(doc["suites"].as_array().unwrap().len(), 5);
}

#[test]
fn tables() {
    let csv = stdout(&[
        "table",
        "a",
        "--p",
        "2",
        "--n",
        "1",
        "--max-order-exp",
        "2",
        "--output",
        "csv",
    ]);
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("M,N,a"));
    assert!(csv.contains("[1],[],2\n"));
    assert!(csv.contains("\"[1,1]\",[1],1\n"));
    assert_eq!(
        stdout(&["table", "a", "--max-order-exp", "0", "--output", "csv"]),
        "M,N,a\n"
    );
    assert_eq!(
        stdout(&["table", "omega", "--output", "json"]),
        "{\"p\":2,\"n\":1,\"entries\":[{\"M\":[1],\"image\":[{\"lambda\":[1],\"coeff\":\"1\"},{\"lambda\":[],\"coeff\":\"2\"}]}]}\n"
    );
    let b = stdout(&["table", "b", "--max-order-exp", "1"]);
    assert_eq!(b, "b([1],[]) = -2\nb([1],[1]) = 1\n");
    assert!(stdout(&[
        "table",
        "c",
        "--n",
        "2",
        "--max-order-exp",
        "2",
        "--output",
        "csv"
    ])
    .contains("[1],[1],\"[1,1]\",3\n"));
}

#[test]
fn subgroup_counts() {
    let out = stdout(&["count-subgroups", "--p", "2", "--lambda", "[1,1]"]);
    assert!(out.ends_with("total: 5\n"), "{out}");
    assert_eq!(
        stdout(&[
            "count-subgroups",
            "--p",
            "3",
            "--lambda",
            "[2,1]",
            "--mu",
            "[1]"
        ]),
        "[1]: 4\ntotal: 4\n"
    );
    assert_eq!(
        stdout(&[
            "count-subgroups",
            "--p",
            "3",
            "--lambda",
            "[2,1]",
            "--mu",
            "[1]",
            "--closed-form"
        ]),
        "[1]: 4\ntotal: 4\n"
    );
}

#[test]
fn selftest_passes() {
    let out = stdout(&["selftest"]);
    assert!(!out.contains("FAIL"), "{out}");
}

#[test]
fn warm_cache_matches_cold_run() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().to_str().unwrap();
    let args = [
        "table",
        "omega",
        "--p",
        "3",
        "--n",
        "1",
        "--max-order-exp",
        "3",
        "--cache",
        cache,
    ];
    let cold = stdout(&args);
    let file = dir.path().join("constants.jsonl");
    let written = fs::read_to_string(&file).unwrap();
    assert!(!written.is_empty());
    let warm = stdout(&args);
    assert_eq!(cold, warm);
    assert_eq!(
        fs::read_to_string(&file).unwrap(),
        written,
        "warm run adds nothing"
    );
    assert_eq!(
        stdout(&[
            "table",
            "omega",
            "--p",
            "3",
            "--n",
            "1",
            "--max-order-exp",
            "3"
        ]),
        cold
    );
}

#[test]
fn corrupt_cache_lines_are_skipped() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("constants.jsonl");
    fs::write(
        &file,
        "garbage\n{\"key\":\"c:p=2\",\"value\":\"1\",\"version\":\"old\"}\n",
    )
    .unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_hecke"))
        .args([
            "ccoeff", "--n", "2", "--M", "[1]", "--N", "[1]", "--L", "[1,1]",
        ])
        .env("HECKE_CACHE_DIR", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "3\n");
    assert!(String::from_utf8(out.stderr)
        .unwrap()
        .contains("skipping corrupt cache line"));
    assert!(fs::read_to_string(&file)
        .unwrap()
        .contains("\"key\":\"c:p=2:n=2:M=[1]:N=[1]:L=[1,1]\""));
}
