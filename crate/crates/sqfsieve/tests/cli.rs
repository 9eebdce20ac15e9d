//! End-to-end runs of the `sqfsieve` binary.

use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sqfsieve"))
        .args(args)
        .env_remove("SQFSIEVE_CACHE")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn disc_prints_the_value() {
    let o = run(&["disc", "f3", "0,1,1,0"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "1\n");
    let o = run(&["disc", "F3:0,1,1,0", "--format", "json"]);
    let j: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(j["schema"], 1);
    assert_eq!(j["disc"], "1");
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["disc", "f3", "0,1,1,0", "--bogus"]).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    // 8 is not prime: contract error
    assert_eq!(run(&["cp", "f3", "--p", "8"]).status.code(), Some(1));
    // wrong number of coefficients
    assert_eq!(run(&["disc", "f3", "1,2,3"]).status.code(), Some(1));
    let o = run(&["density", "g4", "--N", "3", "--budget", "1000"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("budget"));
}

#[test]
fn cor12_prints_value_and_tail_bound() {
    let o = run(&["constants", "cor12", "--n", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.starts_with("0.7307629694"), "{s}");
    assert!(s.contains('±'), "{s}");
}

#[test]
fn density_json_has_declared_fields() {
    let o = run(&["density", "f3", "--N", "6", "--cutoff", "50", "--no-cache"]);
    assert_eq!(o.status.code(), Some(0));
    let j: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    for key in [
        "schema", "kind", "family", "N", "mode", "prime_cutoff", "trial_bound", "total", "disc_zero", "squarefree",
        "not_squarefree", "unresolved", "squarefree_fraction", "radius", "seed", "per_prime", "euler_product",
    ] {
        assert!(j.get(key).is_some(), "missing {key}");
    }
    assert_eq!(j["total"], 13u64.pow(4));
    assert_eq!(j["euler_product"]["cutoff"], 50);
    assert_eq!(j["per_prime"].as_array().unwrap().len(), 15);
}

#[test]
fn density_csv_rows_sorted_by_prime() {
    let o = run(&["density", "f3", "--N", "5", "--cutoff", "30", "--format", "csv", "--no-cache"]);
    let s = stdout(&o);
    let mut lines = s.lines();
    assert_eq!(lines.next().unwrap(), "P,strong,weak,first_square,sandwich,euler_partial");
    let ps: Vec<u64> = lines.map(|l| l.split(',').next().unwrap().parse().unwrap()).collect();
    assert_eq!(ps, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
}

#[test]
fn thread_count_does_not_change_reports() {
    let base = ["density", "g2", "--N", "7", "--cutoff", "20", "--no-cache"];
    let one = run(&[&base[..], &["--threads", "1"]].concat());
    let three = run(&[&base[..], &["--threads", "3"]].concat());
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(stdout(&one), stdout(&three));

    let mc = ["density", "f3", "--N", "40", "--samples", "20000", "--no-cache", "--format", "csv"];
    assert_eq!(stdout(&run(&[&mc[..], &["--threads", "1"]].concat())), stdout(&run(&[&mc[..], &["--threads", "4"]].concat())));

    let cp = ["cp", "g2", "--p", "5", "--no-cache"];
    assert_eq!(stdout(&run(&[&cp[..], &["--threads", "1"]].concat())), stdout(&run(&[&cp[..], &["--threads", "2"]].concat())));
}

#[test]
fn seeds_change_monte_carlo_samples() {
    let a = run(&["density", "f3", "--N", "40", "--samples", "20000", "--no-cache"]);
    let b = run(&["density", "f3", "--N", "40", "--samples", "20000", "--no-cache", "--seed", "7"]);
    let ja: serde_json::Value = serde_json::from_str(&stdout(&a)).unwrap();
    let jb: serde_json::Value = serde_json::from_str(&stdout(&b)).unwrap();
    assert_eq!(ja["seed"], 0xB1A46Au64);
    assert_eq!(jb["seed"], 7);
    assert_ne!(ja["squarefree"], jb["squarefree"]);
}

#[test]
fn move_and_embed_commands() {
    let o = run(&["move", "f3-reduce", "--p", "5", "--samples", "200"]);
    assert_eq!(o.status.code(), Some(0));
    let j: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(j["disc_relation_holds"], 200);
    assert_eq!(j["integral_outputs"], 200);

    // 5s³ + st² lattice form with a double root at [0:1] mod 5
    let o = run(&["move", "f3-reduce", "F3:5,1,0,0", "--p", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let j: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(j["disc_ratio"], "1/25");
    assert_eq!(j["gamma"]["twist"], -1);

    let o = run(&["embed", "--samples", "500"]);
    let j: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(j["failures"], 0);
    let o = run(&["embed", "1,0,-3,2,5"]);
    let j: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(j["identity_holds"], true);
}

#[test]
fn table_output_is_aligned_text() {
    let o = run(&["tail", "f3", "--r", "6", "--M", "5,10", "--format", "table"]);
    let s = stdout(&o);
    assert!(s.contains("family  F3"), "{s}");
    assert!(s.lines().any(|l| l.trim_start().starts_with("M  count")), "{s}");
}
