use std::io::Write;
use std::process::{Command, Output};

fn hasse(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hasse"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn certificates(q_bound: &str, d_bound: &str) -> Vec<serde_json::Value> {
    let o = hasse(&["--json", "counterexamples", "--q-bound", q_bound, "--d-bound", d_bound]);
    assert_eq!(o.status.code(), Some(0));
    stdout(&o)
        .lines()
        .map(|l| serde_json::from_str::<serde_json::Value>(l).unwrap())
        .filter(|v| v.get("manifest").is_none())
        .collect()
}

fn verify(certs: &[serde_json::Value]) -> Output {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    for c in certs {
        writeln!(f, "{c}").unwrap();
    }
    hasse(&["verify", f.path().to_str().unwrap()])
}

#[test]
fn local_examples() {
    let o = hasse(&["local", "1", "0", "-17", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().last() == Some("locally solvable"));

    let o = hasse(&["local", "1", "0", "3", "7"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("p = 2: not solvable"), "{s}");
    assert_eq!(s.lines().last(), Some("not locally solvable"));

    assert_eq!(hasse(&["local", "1", "0", "3", "0"]).status.code(), Some(2));
    assert_eq!(hasse(&["local", "1", "0", "x", "1"]).status.code(), Some(2));
}

#[test]
fn local_general_b_reports_bad_primes() {
    let o = hasse(&["--json", "local", "1", "1", "1", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(stdout(&o).lines().next().unwrap()).unwrap();
    assert_eq!(v["bad_primes"], serde_json::json!([2, 3]));
    assert!(v["locally_solvable"].is_null());
}

#[test]
fn counterexample_listing() {
    let has = |certs: &[serde_json::Value], q: i64, d: i64| {
        certs.iter().any(|c| c["q"] == q && c["d"] == d)
    };
    assert!(has(&certificates("20", "2"), 17, 2));
    assert!(has(&certificates("20", "19"), 17, 19));
    assert!(certificates("16", "20").is_empty());
}

#[test]
fn verify_accepts_everything_emitted() {
    let certs = certificates("100", "20");
    assert!(!certs.is_empty());
    let o = verify(&certs);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn verify_rejects_tampering() {
    let certs = certificates("20", "2");
    let mut c = certs.into_iter().find(|c| c["d"] == 2).unwrap();
    assert_eq!(verify(std::slice::from_ref(&c)).status.code(), Some(0));

    let good = c.clone();
    c["local"]["primes"][1]["witness"] = serde_json::json!([5, 0, 0, 1]);
    let o = verify(&[c]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("local.p=17"), "{}", stdout(&o));

    let mut c = good;
    c["q"] = serde_json::json!(33);
    let o = verify(&[c]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("c1"));
}

#[test]
fn json_is_byte_stable() {
    let args = ["--json", "counterexamples", "--q-bound", "120", "--d-bound", "30"];
    assert_eq!(hasse(&args).stdout, hasse(&args).stdout);
    let args = ["--json", "local", "3", "0", "-7", "50"];
    assert_eq!(hasse(&args).stdout, hasse(&args).stdout);
}

#[test]
fn manifest_is_attached() {
    let o = hasse(&["--json", "legendre", "2", "17"]);
    let lines: Vec<serde_json::Value> = stdout(&o)
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines[0]["legendre"], 1);
    let m = &lines[1]["manifest"];
    assert_eq!(m["command"], "legendre");
    assert_eq!(m["arguments"], serde_json::json!(["--json", "legendre", "2", "17"]));
}

#[test]
fn other_commands() {
    let o = hasse(&["lift", "2", "2", "7", "2"]);
    assert_eq!(stdout(&o).trim(), "10^2 = 2 (mod 49)");
    let o = hasse(&["lift", "17", "4", "2", "5"]);
    assert_eq!(stdout(&o).trim(), "3^4 = 17 (mod 32)");
    let o = hasse(&["solve-fp", "1", "0", "-17", "2", "3"]);
    assert_eq!(stdout(&o).trim(), "(1, 1, 1, 1) mod 3");
    let o = hasse(&["global-search", "1", "0", "-1", "2", "--height", "2"]);
    assert_eq!(stdout(&o).trim(), "solution (1, 1, 1, 0)");
    let o = hasse(&["conic", "2", "3", "7"]);
    assert!(stdout(&o).starts_with("point: (2, 0)"));
    let o = hasse(&["padic-solve", "1", "0", "-17", "2", "3", "--precision", "4"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(hasse(&["padic-solve", "1", "0", "-17", "2", "17"]).status.code(), Some(2));
    assert_eq!(hasse(&["legendre", "3", "15"]).status.code(), Some(2));
}

#[test]
fn budget_exceeded_exit_code() {
    let o = hasse(&["global-search", "1", "0", "-17", "2", "--height", "100000"]);
    assert_eq!(o.status.code(), Some(3));
    let o = hasse(&["counterexamples", "--q-bound", "1000000000"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn help_lists_subcommands() {
    let o = hasse(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    for cmd in [
        "legendre", "conic", "solve-fp", "lift", "local", "global-search", "counterexamples",
        "verify", "padic-solve",
    ] {
        assert!(s.contains(cmd), "{cmd}");
    }
}
