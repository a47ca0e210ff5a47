use std::process::{Command, Output};

use serde_json::Value;
use sha2::{Digest, Sha256};
use weil_cli::cache::census_key;

fn weil(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_weil"))
        .args(args)
        .env_remove("WEIL_CACHE_DIR")
        .output()
        .unwrap()
}

fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    serde_json::from_str(&stdout(&weil(args))).unwrap()
}

fn without_timing(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("timing");
    v
}

fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|x| x.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

const CENSUS: [&str; 9] = ["census", "--g", "1", "--p", "5", "--r", "1", "--ell", "3"];

#[test]
fn census_record() {
    let v = json(&CENSUS);
    assert_eq!(v["schema"], "weil-census/1");
    assert_eq!(v["results"]["total"], 9);
    assert_eq!(v["results"]["ordinary"], 8);
    assert_eq!(v["results"]["congruence_total"], 3);
    assert_eq!(v["enumeration_order_version"], 1);
    assert_eq!(v["timing"]["cached"], false);
}

#[test]
fn invalid_flags_exit_2() {
    let cases: [&[&str]; 9] = [
        &["census", "--g", "1", "--p", "5", "--r", "1", "--ell", "5"],
        &["census", "--g", "1", "--p", "4", "--r", "1", "--ell", "3"],
        &[
            "census",
            "--g",
            "1",
            "--p",
            "5",
            "--r",
            "1",
            "--ell",
            "3",
            "--residues",
            "a",
        ],
        &[
            "census",
            "--g",
            "2",
            "--p",
            "5",
            "--r",
            "1",
            "--ell",
            "3",
            "--residues",
            "1",
        ],
        &[
            "census",
            "--g",
            "1",
            "--p",
            "5",
            "--r",
            "1",
            "--ell",
            "3",
            "--residues",
            "3",
        ],
        &["census", "--g", "0", "--p", "5", "--r", "1", "--ell", "3"],
        &[
            "sweep", "--g", "1", "--p", "2", "--ell", "3", "--rmin", "3", "--rmax", "2",
        ],
        &["volume", "--g", "1", "--samples", "0", "--seed", "1"],
        &["volume", "--g", "1", "--samples", "10"],
    ];
    for args in cases {
        assert_eq!(weil(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn io_failure_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("missing").join("rows.csv");
    let out = weil(&[
        "enumerate",
        "--g",
        "1",
        "--p",
        "5",
        "--r",
        "1",
        "--out",
        bad.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn cache_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let args = [&CENSUS[..], &["--residues", "0", "--cache-dir", d]].concat();
    let first = json(&args);
    let second = json(&args);
    assert_eq!(first["timing"]["cached"], false);
    assert_eq!(second["timing"]["cached"], true);
    assert_eq!(without_timing(first), without_timing(second));

    let key = census_key(1, 5, 1, 3, Some(&[0]));
    assert!(key.contains("enum=1") && key.contains("residues=0"));
    let path = dir.path().join(format!(
        "{}.json",
        hex::encode(Sha256::digest(key.as_bytes()))
    ));
    assert!(path.exists());

    // a damaged entry is a miss and gets rewritten
    std::fs::write(&path, "{ not json").unwrap();
    let third = json(&args);
    assert_eq!(third["timing"]["cached"], false);
    assert_eq!(third["results"]["residue_count"], 3);
    assert_eq!(json(&args)["timing"]["cached"], true);

    // different residues are a different key
    let other = [&CENSUS[..], &["--residues", "1", "--cache-dir", d]].concat();
    assert_eq!(json(&other)["timing"]["cached"], false);
}

#[test]
fn cache_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let run = || {
        let out = Command::new(env!("CARGO_BIN_EXE_weil"))
            .args(CENSUS)
            .env("WEIL_CACHE_DIR", dir.path())
            .output()
            .unwrap();
        serde_json::from_str::<Value>(&stdout(&out)).unwrap()
    };
    assert_eq!(run()["timing"]["cached"], false);
    assert_eq!(run()["timing"]["cached"], true);
}

#[test]
fn sweep_reuses_census_cache() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let sweep = [
        "sweep",
        "--g",
        "1",
        "--p",
        "2",
        "--ell",
        "3",
        "--rmin",
        "1",
        "--rmax",
        "4",
        "--residues",
        "0",
        "--cache-dir",
        d,
    ];
    let fresh = json(&sweep);
    assert_eq!(fresh["timing"]["cached"], false);
    let census = [
        "census",
        "--g",
        "1",
        "--p",
        "2",
        "--r",
        "3",
        "--ell",
        "3",
        "--residues",
        "0",
        "--cache-dir",
        d,
    ];
    assert_eq!(json(&census)["timing"]["cached"], true);
    let cached = json(&sweep);
    assert_eq!(cached["timing"]["cached"], true);
    // floats survive the round trip through the cache bit for bit
    assert_eq!(without_timing(fresh), without_timing(cached));
}

fn assert_same_number(csv_field: &str, json_field: &Value, what: &str) {
    let parsed: f64 = csv_field
        .parse()
        .unwrap_or_else(|_| panic!("{what}: {csv_field}"));
    assert_eq!(parsed, json_field.as_f64().unwrap(), "{what}");
}

#[test]
fn census_csv_matches_json() {
    let base = [
        "census",
        "--g",
        "2",
        "--p",
        "2",
        "--r",
        "3",
        "--ell",
        "3",
        "--residues",
        "1,2",
    ];
    let v = json(&base);
    let (header, rows) = csv_rows(&stdout(&weil(&[&base[..], &["--format", "csv"]].concat())));
    assert_eq!(
        header.join(","),
        "g,p,r,q,ell,residues,total,ordinary,prime_sub,lambda2,congruence_total,congruence_ordinary,congruence_classes,residue_count"
    );
    assert_eq!(rows.len(), 1);
    for (name, field) in header.iter().zip(&rows[0]) {
        match name.as_str() {
            "residues" => assert_eq!(field, "1;2"),
            "g" | "p" | "r" | "q" | "ell" => {
                assert_same_number(field, &v["parameters"][name], name)
            }
            _ => assert_same_number(field, &v["results"][name], name),
        }
    }
}

#[test]
fn sweep_csv_matches_json() {
    let base = [
        "sweep",
        "--g",
        "1",
        "--p",
        "2",
        "--ell",
        "3",
        "--rmin",
        "1",
        "--rmax",
        "10",
        "--residues",
        "0",
    ];
    let v = json(&base);
    let text = stdout(&weil(&[&base[..], &["--format", "csv"]].concat()));
    assert!(text.starts_with(
        "r,q,total,congruence_total,d_frac,e_frac,dev_d,dev_e,sqrt_q_dev_d,sqrt_q_dev_e\n"
    ));
    let (header, rows) = csv_rows(&text);
    let json_rows = v["results"]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 10);
    for (row, jrow) in rows.iter().zip(json_rows) {
        for (name, field) in header.iter().zip(row) {
            assert_same_number(field, &jrow[name], name);
        }
    }
    let dev = |i: usize| json_rows[i]["dev_e"].as_f64().unwrap();
    assert!(dev(9) < dev(0));
}

#[test]
fn volume_records() {
    let args = ["volume", "--g", "1", "--samples", "1000", "--seed", "7"];
    let v = json(&args);
    assert_eq!(v["results"]["mean"], 4.0);
    assert_eq!(v["results"]["std_err"], 0.0);
    assert_eq!(v["results"]["generator"], "chacha8-wordpos/1");
    assert_eq!(without_timing(v), without_timing(json(&args)));

    let g2 = ["volume", "--g", "2", "--samples", "100000", "--seed", "1"];
    let v = json(&g2);
    assert!(v["results"]["mean"].as_f64().unwrap() > 0.0);
    let (header, rows) = csv_rows(&stdout(&weil(&[&g2[..], &["--format", "csv"]].concat())));
    assert_eq!(
        header.join(","),
        "g,samples,seed,generator,box_scale,box_volume,hits,mean,std_err"
    );
    for (name, field) in header.iter().zip(&rows[0]) {
        match name.as_str() {
            "generator" => assert_eq!(field, "chacha8-wordpos/1"),
            "g" | "samples" | "seed" | "box_scale" => {
                assert_same_number(field, &v["parameters"][name], name)
            }
            _ => assert_same_number(field, &v["results"][name], name),
        }
    }
}

#[test]
fn enumerate_rows() {
    let text = stdout(&weil(&["enumerate", "--g", "1", "--p", "5", "--r", "1"]));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 9);
    assert_eq!(lines[0], "-4,1,0");
    assert_eq!(lines[4], "0,0,1");

    let text = stdout(&weil(&[
        "enumerate",
        "--g",
        "1",
        "--p",
        "5",
        "--r",
        "1",
        "--ell",
        "3",
    ]));
    assert!(text.lines().any(|l| l == "-3,1,0,0"));

    assert_eq!(
        stdout(&weil(&["enumerate", "--g", "1", "--p", "2", "--r", "1"]))
            .lines()
            .count(),
        5
    );
}

#[test]
fn enumerate_to_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rows.csv");
    let args = [
        "enumerate",
        "--g",
        "2",
        "--p",
        "3",
        "--r",
        "1",
        "--ell",
        "5",
    ];
    let direct = stdout(&weil(&args));
    stdout(&weil(
        &[&args[..], &["--out", path.to_str().unwrap()]].concat(),
    ));
    assert_eq!(std::fs::read_to_string(&path).unwrap(), direct);
    let census = json(&["census", "--g", "2", "--p", "3", "--r", "1", "--ell", "5"]);
    assert_eq!(
        direct.lines().count() as u64,
        census["results"]["total"].as_u64().unwrap()
    );
}

#[test]
fn jobs_and_pruning_do_not_change_records() {
    let base = ["census", "--g", "2", "--p", "3", "--r", "2", "--ell", "5"];
    let reference = without_timing(json(&base));
    for extra in [&["--jobs", "1"][..], &["--jobs", "8"], &["--no-prune"]] {
        assert_eq!(
            without_timing(json(&[&base[..], extra].concat())),
            reference,
            "{extra:?}"
        );
    }
}
