use std::path::Path;
use std::process::{Command, Output};

fn gibbsflow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gibbsflow"))
        .args(args)
        .env("GIBBSFLOW_THREADS", "2")
        .output()
        .unwrap()
}

fn ok(args: &[&str]) -> Output {
    let out = gibbsflow(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn stderr_line(out: &Output) -> String {
    let s = String::from_utf8(out.stderr.clone()).unwrap();
    let lines: Vec<&str> = s.lines().collect();
    assert_eq!(lines.len(), 1, "{s}");
    lines[0].to_string()
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

#[test]
fn every_command_writes_a_versioned_artifact() {
    let dir = tempfile::tempdir().unwrap();
    let ens = path(dir.path(), "e.bin");
    let runs: Vec<(Vec<&str>, &str)> = vec![
        (vec!["simulate", "--model", "halfwave", "--cutoff", "4", "--time", "0.1", "--monitor", "10"], "csv"),
        (vec!["sample", "--model", "torus", "--cutoff", "4", "--samples", "10", "--format", "csv"], "csv"),
        (vec!["invariance", "--model", "halfwave", "--cutoff", "4", "--time", "0.1", "--dt", "0.01", "--samples", "40", "--permutations", "20"], "json"),
        (vec!["cauchy-rate", "--functional", "hw-quartic", "--cutoff", "16", "--m-list", "2,4", "--samples", "50"], "csv"),
        (vec!["weyl", "--nmax", "50"], "csv"),
        (vec!["normalize", "--model", "halfwave", "--cutoff", "4", "--samples", "200"], "json"),
    ];
    for (i, (args, kind)) in runs.iter().enumerate() {
        let out = path(dir.path(), &format!("out{i}"));
        let mut a = args.clone();
        a.extend(["--output", &out]);
        ok(&a);
        let text = std::fs::read_to_string(&out).unwrap();
        let version = env!("CARGO_PKG_VERSION");
        if *kind == "csv" {
            assert!(text.starts_with(&format!("# gibbsflow {version}\n")), "{text}");
            assert!(text.contains(&format!("# command = {}", args[0])));
        } else {
            let v: serde_json::Value = serde_json::from_str(&text).unwrap();
            assert_eq!(v["version"], version);
            assert_eq!(v["config"]["command"], args[0]);
        }
    }
    ok(&["sample", "--model", "halfwave", "--cutoff", "4", "--samples", "10", "--output", &ens]);
    let out = ok(&["replay", "--model", "halfwave", "--cutoff", "4", "--input", &ens]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["report"]["count"], 10);
    assert_eq!(v["report"]["N"], 4);
}

#[test]
fn same_config_gives_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [&[&str]; 3] = [
        &["sample", "--model", "bo", "--cutoff", "6", "--samples", "30", "--seed", "9"],
        &["invariance", "--model", "torus", "--cutoff", "4", "--time", "0.1", "--dt", "0.01", "--samples", "30", "--permutations", "20"],
        &["cauchy-rate", "--functional", "dnls-current", "--cutoff", "16", "--m-list", "2,4", "--samples", "40"],
    ];
    for (i, args) in cases.iter().enumerate() {
        let bytes: Vec<Vec<u8>> = ["a", "b"]
            .iter()
            .map(|s| {
                let out = path(dir.path(), &format!("{i}{s}"));
                let mut a = args.to_vec();
                a.extend(["--output", &out]);
                ok(&a);
                std::fs::read(&out).unwrap()
            })
            .collect();
        assert_eq!(bytes[0], bytes[1], "{args:?}");
    }
    let one = Command::new(env!("CARGO_BIN_EXE_gibbsflow"))
        .args(cases[0])
        .env("GIBBSFLOW_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(one.stdout, ok(cases[0]).stdout, "thread count changed the output");
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = path(dir.path(), "run.cfg");
    std::fs::write(&cfg, "# weyl table\nnmax = 20\nformat = json\n").unwrap();
    let out = ok(&["weyl", "--config", &cfg]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["config"]["nmax"], "20");
    assert_eq!(v["report"]["table"].as_array().unwrap().len(), 21);
    let out = ok(&["weyl", "--config", &cfg, "--nmax", "7"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["config"]["nmax"], "7");
    assert_eq!(v["config"]["format"], "json");
}

#[test]
fn errors_are_one_line_with_exit_codes() {
    let out = gibbsflow(&["simulate", "--model", "nonsense"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_line(&out).starts_with("error kind=config message="));

    let dir = tempfile::tempdir().unwrap();
    let cfg = path(dir.path(), "bad.cfg");
    std::fs::write(&cfg, "cutof = 3\n").unwrap();
    let out = gibbsflow(&["weyl", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_line(&out).contains("unknown key"));

    let out = gibbsflow(&["replay", "--model", "halfwave", "--cutoff", "4", "--input", &path(dir.path(), "none.bin")]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_line(&out).contains("does not exist"));

    let out = gibbsflow(&["weyl", "--output", &path(dir.path(), "missing/w.csv")]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_line(&out).starts_with("error kind=io"));
}

#[test]
fn replay_rejects_damaged_or_foreign_ensembles() {
    let dir = tempfile::tempdir().unwrap();
    let ens = path(dir.path(), "e.bin");
    ok(&["sample", "--model", "halfwave", "--cutoff", "4", "--samples", "10", "--output", &ens]);

    let out = gibbsflow(&["replay", "--model", "halfwave", "--cutoff", "5", "--input", &ens]);
    assert_eq!(out.status.code(), Some(1));
    let line = stderr_line(&out);
    assert!(line.starts_with("error kind=fingerprint"), "{line}");
    let hexes = line.split_whitespace().map(|w| w.trim_end_matches([',', '"']))
        .filter(|w| w.len() == 16 && w.chars().all(|c| c.is_ascii_hexdigit())).count();
    assert_eq!(hexes, 2, "{line}");

    let bytes = std::fs::read(&ens).unwrap();
    let cut = path(dir.path(), "cut.bin");
    std::fs::write(&cut, &bytes[..bytes.len() - 5]).unwrap();
    let out = gibbsflow(&["replay", "--model", "halfwave", "--cutoff", "4", "--input", &cut]);
    assert_eq!(out.status.code(), Some(1));
    let line = stderr_line(&out);
    assert!(line.starts_with("error kind=format") && line.contains("offset"), "{line}");
    assert!(out.stdout.is_empty());
}
