use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_bieberbach"));
    c.env_remove("BIEBERBACH_CACHE");
    c
}

fn run(out: &Path, args: &[&str]) -> Output {
    bin()
        .arg("--out")
        .arg(out)
        .args(args)
        .output()
        .expect("binary runs")
}

fn find(dir: &Path, prefix: &str, ext: &str) -> PathBuf {
    let mut hits: Vec<PathBuf> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| {
            let n = p.file_name().unwrap().to_string_lossy();
            n.starts_with(prefix) && n.ends_with(ext)
        })
        .collect();
    assert_eq!(
        hits.len(),
        1,
        "expected one {prefix}*{ext} in {}",
        dir.display()
    );
    hits.pop().unwrap()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn gram_of_disk_has_pi_corner() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["gram", "--domain", "disk", "--degree", "8"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(find(dir.path(), "gram-", ".csv")).unwrap();
    let row = csv.lines().find(|l| l.starts_with("0,0,")).unwrap();
    let re: f64 = row.split(',').nth(2).unwrap().parse().unwrap();
    assert!((re - std::f64::consts::PI).abs() < 1e-13);
    let name = find(dir.path(), "gram-", ".json");
    assert!(name
        .file_name()
        .unwrap()
        .to_string_lossy()
        .ends_with("-8.json"));
    let v = json(&name);
    assert!(v["config_digest"].as_str().unwrap().len() == 64);
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
}

#[test]
fn bieberbach_on_disk_is_identity() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("disk.cfg");
    fs::write(&cfg, "gallery = \"disk\"\n").unwrap();
    let o = run(
        dir.path(),
        &[
            "bieberbach",
            "--domain",
            cfg.to_str().unwrap(),
            "--z0",
            "0",
            "--n",
            "5",
            "--eval",
            "0.3",
        ],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&find(dir.path(), "bieberbach-", "-5.json"));
    let val = &v["result"]["evaluations"][0]["value"];
    assert!((val[0].as_f64().unwrap() - 0.3).abs() < 1e-14);
    assert!(val[1].as_f64().unwrap().abs() < 1e-14);
}

#[test]
fn diverge_on_lens_has_nondecreasing_table() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        dir.path(),
        &[
            "diverge", "--domain", "lens", "--x0", "0.8", "--N", "20,40,80",
        ],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&find(dir.path(), "diverge-", "-80.json"));
    let table: Vec<f64> = v["result"]["sup_table"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r[1].as_f64().unwrap())
        .collect();
    assert_eq!(table.len(), 3);
    assert!(table.windows(2).all(|w| w[1] >= w[0]));
    assert!(table[2] / table[0] >= 10.0);
    assert_eq!(v["config"]["precision_bits"], 212);
}

#[test]
fn exit_codes_separate_input_from_numerics() {
    let dir = tempfile::tempdir().unwrap();
    let code = |args: &[&str]| run(dir.path(), args).status.code().unwrap();
    assert_eq!(
        code(&["gram", "--domain", "disk", "--degree", "3", "--bogus"]),
        1
    );
    assert_eq!(
        code(&["gram", "--domain", "missing.cfg", "--degree", "3"]),
        1
    );
    assert_eq!(
        code(&[
            "gram",
            "--domain",
            "disk",
            "--degree",
            "3",
            "--precision",
            "64"
        ]),
        1
    );
    assert_eq!(code(&["frobnicate"]), 1);
    let bad = dir.path().join("bad.cfg");
    fs::write(&bad, "gallery = \"disk\"\nradius = \"wide\"\n").unwrap();
    assert_eq!(
        code(&["gram", "--domain", bad.to_str().unwrap(), "--degree", "3"]),
        1
    );
    // Double precision cannot carry the lens moments this far.
    let o = run(
        dir.path(),
        &[
            "--no-cache",
            "gram",
            "--domain",
            "lens",
            "--degree",
            "60",
            "--precision",
            "53",
        ],
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not positive definite"));
    assert_eq!(code(&["--help"]), 0);
}

#[test]
fn reruns_are_byte_identical_with_and_without_cache() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let cache = tempfile::tempdir().unwrap();
    let args = ["basis", "--domain", "ellipse", "--degree", "12"];
    let with_cache = |out: &Path| {
        let o = bin()
            .env("BIEBERBACH_CACHE", cache.path())
            .arg("--out")
            .arg(out)
            .args(args)
            .output()
            .unwrap();
        assert!(o.status.success());
    };
    with_cache(a.path());
    assert!(
        fs::read_dir(cache.path()).unwrap().count() == 1,
        "cache entry written"
    );
    with_cache(b.path());
    let c = tempfile::tempdir().unwrap();
    assert!(run(
        c.path(),
        &[
            "--no-cache",
            "basis",
            "--domain",
            "ellipse",
            "--degree",
            "12"
        ]
    )
    .status
    .success());
    for ext in [".csv", ".json"] {
        let x = fs::read(find(a.path(), "basis-", ext)).unwrap();
        assert_eq!(x, fs::read(find(b.path(), "basis-", ext)).unwrap());
        assert_eq!(x, fs::read(find(c.path(), "basis-", ext)).unwrap());
    }
}

#[test]
fn corrupt_cache_entry_is_recomputed() {
    let out = tempfile::tempdir().unwrap();
    let cache = tempfile::tempdir().unwrap();
    let go = || {
        bin()
            .arg("--out")
            .arg(out.path())
            .arg("--cache")
            .arg(cache.path())
            .args(["gram", "--domain", "square", "--degree", "6"])
            .output()
            .unwrap()
    };
    assert!(go().status.success());
    let first = fs::read(find(out.path(), "gram-", ".csv")).unwrap();
    let entry = find(cache.path(), "gram-", ".bin");
    let bytes = fs::read(&entry).unwrap();
    fs::write(&entry, &bytes[..bytes.len() - 10]).unwrap();
    let o = go();
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("recomputing"));
    assert_eq!(first, fs::read(find(out.path(), "gram-", ".csv")).unwrap());
    assert_eq!(fs::read(&entry).unwrap(), bytes, "entry rewritten");
}

#[test]
fn cusp_fit_prefers_quadratic_contact_on_lune() {
    let dir = tempfile::tempdir().unwrap();
    assert!(run(dir.path(), &["cusp-fit", "--domain", "lune"])
        .status
        .success());
    let v = json(&find(dir.path(), "cusp-fit-", ".json"));
    assert_eq!(v["result"]["best_p"].as_f64(), Some(2.0));
}

#[test]
fn report_lists_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    assert!(run(dir.path(), &["domains"]).status.success());
    assert!(run(
        dir.path(),
        &["domains", "--domain", "lens", "--samples", "64"]
    )
    .status
    .success());
    assert!(run(dir.path(), &["report"]).status.success());
    let v = json(&find(dir.path(), "report-", ".json"));
    assert_eq!(v["result"].as_array().unwrap().len(), 2);
}
