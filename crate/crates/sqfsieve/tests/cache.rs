//! Local-density cache behavior, through the library and the binary.

use std::fs;
use std::process::Command;
use std::sync::Arc;

use sqfsieve::cache::{Cache, CacheKey, CACHE_FILE};
use sqfsieve::driver::Runner;
use sqfsieve_core::localdensity::Method;
use sqfsieve_core::{Family, DEFAULT_BUDGET};

fn cli(args: &[&str], env_cache: Option<&std::path::Path>) -> std::process::Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_sqfsieve"));
    c.args(args).env_remove("SQFSIEVE_CACHE");
    if let Some(dir) = env_cache {
        c.env("SQFSIEVE_CACHE", dir);
    }
    c.output().expect("binary runs")
}

fn lines(path: &std::path::Path) -> Vec<String> {
    fs::read_to_string(path).map(|s| s.lines().map(str::to_string).collect()).unwrap_or_default()
}

#[test]
fn second_lookup_is_identical_and_not_appended() {
    let dir = tempfile::tempdir().unwrap();
    let runner = Runner::new(2, DEFAULT_BUDGET, Some(Cache::open(dir.path()).unwrap())).unwrap();
    let (first, hit1) = runner.cp(Family::G2, 5, Method::Hensel, 0, 0).unwrap();
    let (second, hit2) = runner.cp(Family::G2, 5, Method::Hensel, 0, 0).unwrap();
    assert!(!hit1 && hit2);
    assert_eq!(first, second);
    let file = dir.path().join(CACHE_FILE);
    assert_eq!(lines(&file).len(), 1);
    let j: serde_json::Value = serde_json::from_str(&lines(&file)[0]).unwrap();
    for key in ["schema", "family", "p", "cp", "strong", "weak", "method", "ci"] {
        assert!(j.get(key).is_some(), "missing {key}");
    }
    assert_eq!(j["schema"], 1);
}

#[test]
fn cli_output_is_byte_identical_on_cache_hit() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let args = ["cp", "f3", "--p", "7", "--cache-dir", d, "--format", "csv"];
    let a = cli(&args, None);
    let b = cli(&args, None);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(lines(&dir.path().join(CACHE_FILE)).len(), 1);
}

#[test]
fn monte_carlo_keys_include_samples_and_seed() {
    let dir = tempfile::tempdir().unwrap();
    let runner = Runner::new(1, DEFAULT_BUDGET, Some(Cache::open(dir.path()).unwrap())).unwrap();
    runner.cp(Family::F3, 3, Method::MonteCarlo, 20_000, 1).unwrap();
    runner.cp(Family::F3, 3, Method::MonteCarlo, 20_000, 2).unwrap();
    let (_, hit) = runner.cp(Family::F3, 3, Method::MonteCarlo, 20_000, 1).unwrap();
    assert!(hit);
    runner.cp(Family::F3, 3, Method::Hensel, 0, 0).unwrap();
    assert_eq!(lines(&dir.path().join(CACHE_FILE)).len(), 3);
}

#[test]
fn disabled_cache_always_recomputes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let o = cli(&["cp", "f3", "--p", "3", "--cache-dir", d, "--no-cache"], None);
    assert_eq!(o.status.code(), Some(0));
    assert!(!dir.path().join(CACHE_FILE).exists());
    let j: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(j["records"][0]["cached"], false);
}

#[test]
fn flag_beats_environment() {
    let env_dir = tempfile::tempdir().unwrap();
    let flag_dir = tempfile::tempdir().unwrap();
    cli(&["cp", "w1", "--p", "5"], Some(env_dir.path()));
    assert_eq!(lines(&env_dir.path().join(CACHE_FILE)).len(), 1);
    cli(&["cp", "w1", "--p", "7", "--cache-dir", flag_dir.path().to_str().unwrap()], Some(env_dir.path()));
    assert_eq!(lines(&env_dir.path().join(CACHE_FILE)).len(), 1);
    assert_eq!(lines(&flag_dir.path().join(CACHE_FILE)).len(), 1);
}

#[test]
fn corrupt_lines_are_skipped() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join(CACHE_FILE);
    fs::write(&file, "not json\n{\"schema\":1,\"family\":\"F3\"}\n").unwrap();
    let cache = Cache::open(dir.path()).unwrap();
    let key = CacheKey::exact(Family::F3, 3, Method::Hensel);
    assert!(cache.lookup(&key).unwrap().is_none());
    let runner = Runner::new(1, DEFAULT_BUDGET, Some(cache.clone())).unwrap();
    let (rec, hit) = runner.cp(Family::F3, 3, Method::Hensel, 0, 0).unwrap();
    assert!(!hit);
    assert_eq!(cache.lookup(&key).unwrap(), Some(rec));
    assert_eq!(lines(&file).len(), 3);
}

#[test]
fn concurrent_writers_leave_valid_lines() {
    let dir = tempfile::tempdir().unwrap();
    let cache = Arc::new(Cache::open(dir.path()).unwrap());
    let handles: Vec<_> = (0..8)
        .map(|i| {
            let cache = Arc::clone(&cache);
            std::thread::spawn(move || {
                let runner = Runner::new(1, DEFAULT_BUDGET, Some((*cache).clone())).unwrap();
                for p in [2u64, 3, 5, 7, 11, 13] {
                    let family = if i % 2 == 0 { Family::W1 } else { Family::F3 };
                    runner.cp(family, p, Method::Hensel, 0, 0).unwrap();
                }
            })
        })
        .collect();
    for h in handles {
        h.join().unwrap();
    }
    let ls = lines(&dir.path().join(CACHE_FILE));
    assert_eq!(ls.len(), 12);
    for l in &ls {
        serde_json::from_str::<serde_json::Value>(l).unwrap();
    }
}
