// Copyright 2026 The symchar Developers
// SPDX-License-Identifier: Apache-2.0

use std::path::Path;
use std::process::{Command, Output};

use symchar::io::{read_trials, Report};
use symchar::twirl::Outcome;

fn symchar(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_symchar"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("spawn symchar")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn write_config(dir: &Path, name: &str, channel: &str, trials: usize, extra: &str) {
    let text = format!(
        "format_version = 1\nn = {n}\nvariant = \"standard\"\ntrials = {trials}\nmaster_seed = 11\noutput = \"{name}.jsonl\"\n{extra}\n[channel]\n{channel}\n",
        n = if channel.contains("chcl3_") { 2 } else { 3 },
    );
    std::fs::write(dir.join(format!("{name}.toml")), text).unwrap();
}

#[test]
fn identity_channel_gives_all_zero_outcomes() {
    let dir = tempfile::tempdir().unwrap();
    write_config(dir.path(), "id", "kind = \"depolarizing\"\nper_qubit = [0.0, 0.0, 0.0]", 100, "");
    let out = symchar(dir.path(), &["simulate", "--config", "id.toml"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("K=100"));
    let (header, records) = read_trials(&dir.path().join("id.jsonl")).unwrap();
    assert_eq!(header.records, 100);
    assert_eq!(records.len(), 100);
    assert!(records
        .iter()
        .all(|r| matches!(&r.outcome, Outcome::Bits(b) if b.hamming_weight() == 0)));
}

#[test]
fn zz_fixture_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    write_config(dir.path(), "zz", "kind = \"fixture\"\nfixture_id = \"chcl3_zz\"", 20_000, "");
    assert_eq!(code(&symchar(dir.path(), &["simulate", "--config", "zz.toml"])), 0);
    let first = std::fs::read(dir.path().join("zz.jsonl")).unwrap();
    assert_eq!(code(&symchar(dir.path(), &["--threads", "1", "simulate", "--config", "zz.toml"])), 0);
    assert_eq!(first, std::fs::read(dir.path().join("zz.jsonl")).unwrap());

    let out = symchar(
        dir.path(),
        &["estimate", "--trials", "zz.jsonl", "--method", "mle", "--report", "zz.json"],
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report = Report::load(&dir.path().join("zz.json")).unwrap();
    let p = report.p_mle.as_ref().unwrap();
    for (got, want) in p.iter().zip([0.0, 0.0, 1.0]) {
        assert!((got - want).abs() < 0.01, "{p:?}");
    }

    let csv = symchar(dir.path(), &["plotdata", "--report", "zz.json", "--kind", "contours"]);
    assert_eq!(code(&csv), 0);
    let text = String::from_utf8(csv.stdout).unwrap();
    assert!(text.starts_with("level,pair_i,pair_j,point,p0,p1,p2\n"));
    let levels: std::collections::BTreeSet<&str> =
        text.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(levels.len(), 3);

    let weights = symchar(dir.path(), &["plotdata", "--report", "zz.json", "--kind", "weights"]);
    assert_eq!(String::from_utf8(weights.stdout).unwrap().lines().count(), 4);
}

#[test]
fn scaling_and_markov_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let dep = "kind = \"depolarizing\"\nper_qubit = [0.05, 0.05, 0.05]";
    write_config(dir.path(), "tau", dep, 20_000, "");
    write_config(dir.path(), "tau2", &format!("{dep}\nrepeat = 2"), 20_000, "");
    write_config(dir.path(), "corr", "kind = \"pauli\"\nterms = { III = 0.8, ZZI = 0.2 }", 20_000, "");
    for name in ["tau", "tau2", "corr"] {
        let cfg = format!("{name}.toml");
        assert_eq!(code(&symchar(dir.path(), &["simulate", "--config", &cfg])), 0);
        let trials = format!("{name}.jsonl");
        let report = format!("{name}.json");
        let out = symchar(
            dir.path(),
            &["estimate", "--trials", &trials, "--method", "linear", "--report", &report],
        );
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    }
    assert_eq!(code(&symchar(dir.path(), &["diagnose", "--report", "tau.json", "--test", "scaling"])), 0);
    assert_eq!(code(&symchar(dir.path(), &["diagnose", "--report", "corr.json", "--test", "scaling"])), 3);
    let markov = symchar(
        dir.path(),
        &["diagnose", "--report", "tau.json", "--test", "markov", "--against", "tau2.json", "--m", "2", "--out", "v.json"],
    );
    assert_eq!(code(&markov), 0);
    let verdict: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("v.json")).unwrap()).unwrap();
    assert_eq!(verdict["pass"], true);
    let wrong_m = symchar(
        dir.path(),
        &["diagnose", "--report", "tau.json", "--test", "markov", "--against", "tau2.json", "--m", "3"],
    );
    assert_eq!(code(&wrong_m), 3);
}

#[test]
fn reference_normalisation_through_the_cli() {
    let dir = tempfile::tempdir().unwrap();
    write_config(
        dir.path(),
        "spam",
        "kind = \"fixture\"\nfixture_id = \"chcl3_unitary\"",
        20_000,
        "reference_output = \"spam_ref.jsonl\"\n[spam]\nprep = 0.05\nmeas = 0.05\n",
    );
    assert_eq!(code(&symchar(dir.path(), &["simulate", "--config", "spam.toml"])), 0);
    let out = symchar(
        dir.path(),
        &[
            "estimate", "--trials", "spam.jsonl", "--reference", "spam_ref.jsonl", "--method", "linear", "--report",
            "spam.json",
        ],
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report = Report::load(&dir.path().join("spam.json")).unwrap();
    assert!(report.estimate.normalized);
    assert!(report.c_ref.is_some());
    for (got, want) in report.p_linear.iter().zip([0.25, 0.5, 0.25]) {
        assert!((got - want).abs() < 0.03, "{:?}", report.p_linear);
    }
    // A reference run is not accepted as the main input.
    let swapped = symchar(
        dir.path(),
        &["estimate", "--trials", "spam_ref.jsonl", "--report", "x.json"],
    );
    assert_eq!(code(&swapped), 2);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(code(&symchar(d, &["--help"])), 0);
    assert_eq!(code(&symchar(d, &["--version"])), 0);
    assert_eq!(code(&symchar(d, &["frobnicate"])), 1);
    assert_eq!(code(&symchar(d, &["samplesize", "--delta", "2", "--epsilon", "0.1"])), 1);
    assert_eq!(code(&symchar(d, &["plotdata", "--report", "r.json", "--kind", "pie"])), 1);
    assert_eq!(code(&symchar(d, &["estimate", "--trials", "missing.jsonl", "--report", "r.json"])), 2);

    std::fs::write(d.join("bad.json"), "{\"format_version\": 7, \"kind\": \"report\"}").unwrap();
    let out = symchar(d, &["diagnose", "--report", "bad.json", "--test", "scaling"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("schema"));
}

#[test]
fn omega_and_samplesize_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = symchar(dir.path(), &["omega", "--n", "2"]);
    assert_eq!(code(&out), 0);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "1 1 1\n1 1/3 -1/3\n1 -1/3 1/9\n");
    let inv = symchar(dir.path(), &["omega", "--n", "1", "--inverse", "--format", "csv"]);
    assert_eq!(String::from_utf8(inv.stdout).unwrap(), "0.25,0.75\n0.75,-0.75\n");
    let k = symchar(dir.path(), &["samplesize", "--delta", "0.05", "--epsilon", "0.05", "--n", "3"]);
    assert_eq!(String::from_utf8(k.stdout).unwrap().trim(), "2031");
}
