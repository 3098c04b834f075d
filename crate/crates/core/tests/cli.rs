use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn globular(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_globular")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("globular-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn every_fixture_is_stable() {
    let mut seen = 0;
    for entry in std::fs::read_dir(fixture("")).unwrap() {
        let path = entry.unwrap().path();
        if path.is_file() {
            let o = globular(&["roundtrip", path.to_str().unwrap()]);
            assert_eq!(o.status.code(), Some(0), "{}: {}", path.display(), String::from_utf8_lossy(&o.stderr));
            assert_eq!(stdout(&o).trim(), "stable");
            seen += 1;
        }
    }
    assert!(seen >= 10);
}

#[test]
fn successful_commands_exit_zero() {
    let o = globular(&["pd", "enum", "--dim", "2", "--max-nodes", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().count() > 3);
    let o = globular(&["--format", "json", "chain", "homology", "--complex", fixture("z2-point.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let h: Vec<usize> = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(h, vec![1]);
    let o = globular(&["owc", "check", fixture("terminal-2-3.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let o = globular(&["leinster", "eq", "id1", "id1"]);
    assert_eq!(o.status.code(), Some(0));
    for name in ["filler-bijection", "bar-resolution-z2"] {
        let o = globular(&["scenario", "run", name]);
        assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
        assert!(stdout(&o).contains("pass"));
    }
}

#[test]
fn failed_checks_exit_one() {
    let o = globular(&["leinster", "eq", "id1", "k(1:[* *]; u0, u0)"]);
    assert_eq!(o.status.code(), Some(1));
    let z3 = scratch("z3.json", r#"{"p": 3, "ranks": [1], "d": []}"#);
    let o = globular(&["chain", "resolve", "--complex", z3.to_str().unwrap(), "--degrees", "3"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("resource limit"));
    // a scenario whose recorded ranks are wrong
    let shown = stdout(&globular(&["scenario", "show", "bar-resolution-z2"]));
    let mut v: serde_json::Value = serde_json::from_str(&shown).unwrap();
    v["expected"]["ranks"] = serde_json::json!([2, 2, 2, 3]);
    let bad = scratch("bad-scenario.json", &v.to_string());
    let o = globular(&["scenario", "run", "--file", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("ranks: expected"), "{}", stdout(&o));
}

#[test]
fn bad_input_exits_two() {
    for args in [
        vec!["nonsense"],
        vec!["pd", "boundary", "garbage"],
        vec!["chain", "homology", "--complex", "/nonexistent/file.json"],
        vec!["owc", "check", fixture("edge.json").to_str().unwrap()],
    ] {
        let o = globular(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}
