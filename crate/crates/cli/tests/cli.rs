use std::fs;
use std::process::{Command, Output};

fn seedtree(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_seedtree"))
        .args(args)
        .env_remove("SEED_ARCHEOLOGY_SEED")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    assert!(
        o.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&o.stderr)
    );
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn generate_writes_tree_format() {
    let text = stdout(&seedtree(&[
        "generate",
        "--seed",
        "path",
        "--l",
        "4",
        "--n",
        "10",
        "--master-seed",
        "3",
    ]));
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n=10 l=4"));
    let edges: Vec<(usize, usize)> = lines
        .map(|l| {
            let (c, p) = l.split_once(' ').unwrap();
            (c.parse().unwrap(), p.parse().unwrap())
        })
        .collect();
    assert_eq!(edges.len(), 9);
    assert_eq!(&edges[..3], &[(2, 1), (3, 2), (4, 3)]);
    assert!(edges.iter().all(|&(c, p)| p < c));
    let again = stdout(&seedtree(&[
        "generate",
        "--seed",
        "path",
        "--l",
        "4",
        "--n",
        "10",
        "--master-seed",
        "3",
    ]));
    assert_eq!(text, again);
}

#[test]
fn env_seed_overrides_default() {
    let args = ["generate", "--seed", "urrt", "--l", "5", "--n", "60"];
    let base = stdout(&seedtree(&args));
    let with_env = Command::new(env!("CARGO_BIN_EXE_seedtree"))
        .args(args)
        .env("SEED_ARCHEOLOGY_SEED", "99")
        .output()
        .unwrap();
    let explicit = stdout(&seedtree(&[&args[..], &["--master-seed", "99"]].concat()));
    assert_eq!(stdout(&with_env), explicit);
    assert_ne!(base, explicit);
}

#[test]
fn centrality_and_find_on_a_scrambled_tree() {
    let dir = tempfile::tempdir().unwrap();
    let view = dir.path().join("view.txt");
    let key = dir.path().join("key.txt");
    stdout(&seedtree(&[
        "generate",
        "--seed",
        "star",
        "--l",
        "6",
        "--n",
        "80",
        "--master-seed",
        "1",
        "--key-out",
        key.to_str().unwrap(),
        "-o",
        view.to_str().unwrap(),
    ]));
    assert!(fs::read_to_string(&view).unwrap().starts_with("n=80\n"));
    let csv = stdout(&seedtree(&["centrality", view.to_str().unwrap()]));
    let mut rows = csv.lines();
    assert_eq!(rows.next(), Some("vertex,psi,is_centroid"));
    assert_eq!(rows.clone().count(), 80);
    assert!(rows.any(|r| r.ends_with(",true")));

    let out = stdout(&seedtree(&[
        "find",
        "--kind",
        "path",
        "--l",
        "6",
        "--gamma",
        "0.5",
        view.to_str().unwrap(),
    ]));
    let lines: Vec<&str> = out.lines().collect();
    let summary: serde_json::Value = serde_json::from_str(lines.last().unwrap()).unwrap();
    assert_eq!(summary["kind"], "path");
    assert_eq!(summary["target_size"], 3);
    assert_eq!(summary["deficit"], false);
    assert_eq!(lines.len(), 4);
    assert!(lines[..3].iter().all(|l| l.parse::<usize>().is_ok()));
}

#[test]
fn stats_report_and_check() {
    let dir = tempfile::tempdir().unwrap();
    let tree = dir.path().join("t.txt");
    fs::write(&tree, "n=6 l=3\n2 1\n3 1\n4 2\n5 3\n6 1\n").unwrap();
    let desc = stdout(&seedtree(&[
        "stats",
        "--report",
        "descendants",
        tree.to_str().unwrap(),
    ]));
    let rows: Vec<&str> = desc.lines().collect();
    assert_eq!(rows[0], "tree,k,exactly,at_least");
    assert!(rows[1].ends_with(",0,3,6"));
    let camo = stdout(&seedtree(&[
        "stats",
        "--report",
        "camouflage",
        tree.to_str().unwrap(),
    ]));
    assert!(camo.lines().nth(1).unwrap().ends_with(",3,0,0"));

    let check = stdout(&seedtree(&[
        "stats", "--check", "polya", "--trials", "500", "--draws", "200",
    ]));
    let v: serde_json::Value = serde_json::from_str(&check).unwrap();
    for key in ["empirical", "theoretical", "passed"] {
        assert!(v.get(key).is_some(), "{key}");
    }
    let deep = stdout(&seedtree(&[
        "stats", "--check", "deeptail", "--trials", "200",
    ]));
    let v: serde_json::Value = serde_json::from_str(&deep).unwrap();
    assert_eq!(v["passed"], true);
}

#[test]
fn experiment_run_writes_csv_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("c.json");
    fs::write(
        &config,
        r#"{"schema_version":1,"seed":{"kind":"path","size":10},"n":300,"finder":"path","trials":12,"master_seed":5}"#,
    )
    .unwrap();
    let csv = dir.path().join("t.csv");
    let summary_path = dir.path().join("s.json");
    let out = stdout(&seedtree(&[
        "experiment",
        "run",
        config.to_str().unwrap(),
        "--csv",
        csv.to_str().unwrap(),
        "--summary",
        summary_path.to_str().unwrap(),
    ]));
    let summary: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(summary["trials"], 12);
    assert_eq!(summary["config"]["master_seed"], 5);
    let saved: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&summary_path).unwrap()).unwrap();
    assert_eq!(saved["success_first"], summary["success_first"]);
    let text = fs::read_to_string(&csv).unwrap();
    assert_eq!(
        text.lines().next(),
        Some("trial,success_first,success_second,overlap,output_size,deficit,elapsed_ns")
    );
    assert_eq!(text.lines().count(), 13);

    let parallel = dir.path().join("p.csv");
    stdout(&seedtree(&[
        "experiment",
        "run",
        config.to_str().unwrap(),
        "--csv",
        parallel.to_str().unwrap(),
        "--parallelism",
        "8",
    ]));
    assert_eq!(fs::read(&csv).unwrap(), fs::read(&parallel).unwrap());

    let env_run = Command::new(env!("CARGO_BIN_EXE_seedtree"))
        .args(["experiment", "run", config.to_str().unwrap()])
        .env("SEED_ARCHEOLOGY_SEED", "777")
        .output()
        .unwrap();
    let v: serde_json::Value = serde_json::from_slice(&env_run.stdout).unwrap();
    assert_eq!(v["config"]["master_seed"], 777);
}

#[test]
fn bad_config_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("c.json");
    fs::write(
        &config,
        r#"{"schema_version":1,"seed":{"kind":"path","size":10},"finder":"path","trials":2,"master_seed":5,"extra":1}"#,
    )
    .unwrap();
    let o = seedtree(&["experiment", "run", config.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("extra"));
}

#[test]
fn validate_exit_code_tracks_assertions() {
    let ok = seedtree(&[
        "experiment",
        "validate",
        "singletons",
        "--trials",
        "2000",
        "--master-seed",
        "1",
    ]);
    assert_eq!(
        ok.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&ok.stderr)
    );
    let report: serde_json::Value = serde_json::from_slice(&ok.stdout).unwrap();
    assert_eq!(report[0]["passed"], true);
    assert_eq!(report[0]["checks"].as_array().unwrap().len(), 4);

    // The stated descendant closed forms are off by one vertex.
    let bad = seedtree(&[
        "experiment",
        "validate",
        "descendants",
        "--trials",
        "10000",
        "--master-seed",
        "1",
    ]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("FAIL"));

    let unknown = seedtree(&["experiment", "validate", "nope"]);
    assert_eq!(unknown.status.code(), Some(2));
}
