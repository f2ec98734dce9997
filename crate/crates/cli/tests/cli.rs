use std::io::Write;
use std::process::{Command, Output};

fn rpe(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rpe"))
        .args(args)
        .env_remove("RPE_DIGITS")
        .output()
        .expect("spawn rpe")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn pi_fifty_digits() {
    let o = rpe(&["pi", "--method", "chudnovsky", "--digits", "50"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        stdout(&o).trim(),
        "3.1415926535897932384626433832795028841971693993751"
    );
}

#[test]
fn every_pi_method_agrees() {
    let expected = stdout(&rpe(&["pi", "--method", "agm", "--digits", "120"]));
    for m in ["chudnovsky", "bg163", "r243"] {
        let o = rpe(&["pi", "--method", m, "--digits", "120"]);
        assert_eq!(o.status.code(), Some(0), "{m}");
        assert_eq!(stdout(&o), expected, "{m}");
    }
}

#[test]
fn digits_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_rpe"))
        .args(["pi", "--method", "agm"])
        .env("RPE_DIGITS", "10")
        .output()
        .unwrap();
    assert_eq!(stdout(&o).trim(), "3.141592654");
}

#[test]
fn pi_json_output() {
    let o = rpe(&["pi", "--digits", "20", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["method"], "chudnovsky");
    assert_eq!(v["digits"], 20);
    assert_eq!(v["value"], "3.1415926535897932385");
}

#[test]
fn classnum_163() {
    let o = rpe(&["classnum", "163"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "1\n");
    let o = rpe(&["classnum", "3299", "--oracle"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "sum 27\nforms 27\n");
}

#[test]
fn verify_bg163_passes() {
    let o = rpe(&["verify", "bg163", "--digits", "300"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("overall: pass"));
}

#[test]
fn verify_all_json() {
    let o = rpe(&["verify", "all", "--digits", "200", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["overall"], true);
    assert_eq!(v["precision"], 200);
    let checks = v["checks"].as_array().unwrap();
    assert!(checks.len() >= 10);
    assert!(checks.iter().all(|c| c["pass"] == true));
}

#[test]
fn scalar_subcommands() {
    let o = rpe(&["lambda-star", "4", "--digits", "30", "--method", "bisect"]);
    assert_eq!(o.status.code(), Some(0));
    // λ*(4) = 3 - 2√2
    assert_eq!(stdout(&o).trim(), "0.171572875253809902396622551581");
    let o = rpe(&["alpha", "4", "--digits", "30"]);
    // α(4) = 2(√2 - 1)²
    assert_eq!(stdout(&o).trim(), "0.343145750507619804793245103161");
    let o = rpe(&["params", "58", "--family", "pos", "--digits", "20"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 3);
}

#[test]
fn recognize_from_file() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    // golden ratio
    writeln!(
        f,
        "\n1.6180339887498948482045868343656381177203091798057628621354486227"
    )
    .unwrap();
    let path = f.path().to_str().unwrap();
    let o = rpe(&[
        "recognize",
        "--degree",
        "3",
        "--digits",
        "64",
        "--file",
        path,
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "-1 -1 1");
    let o = rpe(&[
        "recognize",
        "--degree",
        "2",
        "--digits",
        "60",
        "--value",
        "3.14159265358979323846264338327950288419716939937510582097494",
    ]);
    assert_eq!(stdout(&o).trim(), "none");
}

#[test]
fn usage_errors() {
    for args in [
        &["pi", "--unknown-flag"][..],
        &["pi", "--method", "leibniz"],
        &["verify"],
        &["classnum", "6"],
        &["recognize", "--degree", "2", "--value", "1", "--file", "x"],
        &["recognize", "--degree", "2", "--value", "abc"],
    ] {
        let o = rpe(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(o.stdout.is_empty(), "{args:?}");
        assert!(!o.stderr.is_empty(), "{args:?}");
    }
}

#[test]
fn computation_error_exits_three() {
    let o = rpe(&["lambda-star", "1/2", "--digits", "30"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn help_and_version_exit_zero() {
    let o = rpe(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("verify"));
    assert_eq!(rpe(&["--version"]).status.code(), Some(0));
}
