use std::fs;

use seedtree::experiment::{
    n_sweep, read_records_csv, run_experiment, ExperimentConfig, TRIAL_CSV_HEADER,
};
use seedtree::format::{parse_key, parse_tree};
use seedtree::{FinderKind, SeedSpec};

fn config(seed: SeedSpec, finder: FinderKind, trials: u64) -> ExperimentConfig {
    let mut c = ExperimentConfig::new(seed, finder, trials, 2024);
    c.n = Some(400);
    c
}

#[test]
fn csv_bytes_do_not_depend_on_parallelism() {
    let dir = tempfile::tempdir().unwrap();
    for (seed, finder) in [
        (SeedSpec::Path { size: 12 }, FinderKind::Path),
        (SeedSpec::Star { size: 12 }, FinderKind::Star),
        (SeedSpec::Urrt { size: 12 }, FinderKind::Urrt),
    ] {
        let mut outputs = Vec::new();
        for threads in [1, 8] {
            let mut c = config(seed.clone(), finder, 64);
            c.parallelism = threads;
            let path = dir.path().join(format!("{}_{threads}.csv", seed.name()));
            c.output_path = Some(path.clone());
            let summary = run_experiment(&c).unwrap();
            assert_eq!(summary.trials, 64);
            outputs.push((fs::read(&path).unwrap(), summary.success_first));
        }
        assert_eq!(outputs[0].0, outputs[1].0);
        assert_eq!(outputs[0].1, outputs[1].1);
        let text = String::from_utf8(outputs[0].0.clone()).unwrap();
        assert_eq!(text.lines().next().unwrap(), TRIAL_CSV_HEADER);
        let records = read_records_csv(text.as_bytes()).unwrap();
        assert!(records
            .iter()
            .enumerate()
            .all(|(i, r)| r.trial_index == i as u64));
    }
}

#[test]
fn debug_dump_reproduces_scores() {
    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("dump");
    let csv = dir.path().join("trials.csv");
    let l = 10;
    let mut c = config(SeedSpec::Star { size: l }, FinderKind::Star, 20);
    c.gamma = 0.3;
    c.output_path = Some(csv.clone());
    c.debug_dump = Some(dump.clone());
    c.parallelism = 4;
    run_experiment(&c).unwrap();
    let records = read_records_csv(fs::File::open(&csv).unwrap()).unwrap();
    assert_eq!(records.len(), 20);
    for r in records {
        let t = r.trial_index;
        let tree =
            parse_tree(&fs::read_to_string(dump.join(format!("trial_{t}.tree"))).unwrap()).unwrap();
        let key =
            parse_key(&fs::read_to_string(dump.join(format!("trial_{t}.key"))).unwrap()).unwrap();
        let found: Vec<usize> = fs::read_to_string(dump.join(format!("trial_{t}.found")))
            .unwrap()
            .lines()
            .map(|s| s.parse().unwrap())
            .collect();
        assert_eq!(tree.n(), 400);
        assert_eq!(tree.seed_size(), l);
        let overlap = found.iter().filter(|&&s| key.arrival_of(s) <= l).count();
        assert_eq!(overlap, r.overlap);
        assert_eq!(found.len(), r.output_size);
        assert_eq!(r.success_first_kind, overlap == found.len());
        assert_eq!(r.success_second_kind, overlap == l);
    }
}

#[test]
fn unwritable_output_stops_before_any_trial() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = config(SeedSpec::Path { size: 5 }, FinderKind::Path, 5);
    c.output_path = Some(dir.path().join("missing").join("out.csv"));
    c.debug_dump = Some(dir.path().join("dump"));
    assert!(run_experiment(&c).is_err());
    assert!(!dir.path().join("dump").exists());
}

#[test]
fn timing_is_opt_in() {
    let mut c = config(SeedSpec::Path { size: 5 }, FinderKind::Path, 3);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.csv");
    c.output_path = Some(path.clone());
    run_experiment(&c).unwrap();
    let quiet = read_records_csv(fs::File::open(&path).unwrap()).unwrap();
    assert!(quiet.iter().all(|r| r.elapsed_ns == 0));
    c.record_timing = true;
    run_experiment(&c).unwrap();
    let timed = read_records_csv(fs::File::open(&path).unwrap()).unwrap();
    assert!(timed.iter().any(|r| r.elapsed_ns > 0));
}

#[test]
fn path_success_grows_with_seed_size() {
    let rates: Vec<(f64, f64)> = [20, 50, 100]
        .into_iter()
        .map(|l| {
            let mut c =
                ExperimentConfig::new(SeedSpec::Path { size: l }, FinderKind::Path, 200, 77);
            c.n = Some(5000);
            c.parallelism = 4;
            let s = run_experiment(&c).unwrap();
            (s.success_first.mean, s.success_first.std_error)
        })
        .collect();
    for w in rates.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let se = (lo.1 * lo.1 + hi.1 * hi.1).sqrt();
        assert!(hi.0 + 3.0 * se >= lo.0, "{rates:?}");
    }
}

#[test]
fn sweep_reports_each_size() {
    let c = config(SeedSpec::Urrt { size: 20 }, FinderKind::Urrt, 10);
    let summaries = n_sweep(&c, &[100, 400, 1600]).unwrap();
    let sizes: Vec<usize> = summaries.iter().map(|s| s.n).collect();
    assert_eq!(sizes, vec![100, 400, 1600]);
}

#[test]
fn config_file_round_trips() {
    let mut c = config(
        SeedSpec::Custom {
            parents: vec![1, 1, 2],
        },
        FinderKind::Star,
        4,
    );
    c.gamma = 0.25;
    let back = ExperimentConfig::from_json(&c.to_json()).unwrap();
    assert_eq!(back, c);
    let mut value: serde_json::Value = serde_json::from_str(&c.to_json()).unwrap();
    value["schema_version"] = 99.into();
    assert!(ExperimentConfig::from_json(&value.to_string()).is_err());
    value["schema_version"] = 1.into();
    value["colour"] = "blue".into();
    assert!(ExperimentConfig::from_json(&value.to_string()).is_err());
}
