use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_cartan");

fn cartan(args: &[&str], dir: &Path) -> Output {
    Command::new(BIN).args(args).current_dir(dir).env_remove("CARTAN_WORKERS").output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

const SIMULATE: &str = r#"
kind = "simulate"
[profile]
kind = "constant"
kappa = -1.0
r_max = 20.0
[start]
points = [[1.0, 0.0], [2.0, 0.5]]
[stop]
r_inf = 6.0
[mc]
n_paths = 200
seed = 4
"#;

fn read_all(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    v.sort();
    v
}

#[test]
fn validate_succeeds_and_writes_csv() {
    let tmp = tempfile::tempdir().unwrap();
    let out = cartan(&["validate", "--out", "v"], tmp.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(tmp.path().join("v/validate.csv")).unwrap();
    assert!(csv.starts_with("check,status,detail\n"));
    assert!(!csv.contains('\r'));
    assert!(!csv.contains("FAIL"));
    let report = fs::read_to_string(tmp.path().join("v/report.toml")).unwrap();
    assert!(report.contains("config_hash"));
}

#[test]
fn invalid_eta_exits_2_and_names_the_key() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "bad.toml",
        "[profile]\nkind = \"perturbed\"\nbase = \"constant\"\nkappa = -1.0\neta = 1.2\nr_max = 20.0\n",
    );
    let out = cartan(&["simulate", "--config", &cfg], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("profile.eta"));
}

#[test]
fn unknown_key_exits_2_and_names_it() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "bad.toml", &SIMULATE.replace("seed = 4", "seed = 4\nfrobnicate = 1"));
    let out = cartan(&["simulate", "--config", &cfg], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("frobnicate"));
}

#[test]
fn numerical_failure_exits_3_and_leaves_partials() {
    let tmp = tempfile::tempdir().unwrap();
    // a recurrent surface cannot carry the exit-angle representation
    let cfg = write(
        tmp.path(),
        "flat.toml",
        "[profile]\nkind = \"constant\"\nkappa = 0.0\nr_max = 1e4\n[start]\npoints = [[1.0, 0.0]]\n[stop]\nr_inf = 100.0\n[mc]\nn_paths = 10\n",
    );
    let out = cartan(&["dirichlet", "--config", &cfg, "--out", "d"], tmp.path());
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(!tmp.path().join("d/report.toml").exists());
}

#[test]
fn success_leaves_no_partials() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "s.toml", SIMULATE);
    let out = cartan(&["simulate", "--config", &cfg, "--out", "s"], tmp.path());
    assert_eq!(out.status.code(), Some(0));
    for (name, _) in read_all(&tmp.path().join("s")) {
        assert!(!name.ends_with(".partial"), "{name}");
    }
}

#[test]
fn mid_run_failure_keeps_partial_suffix() {
    // the second start point lies beyond r_inf, which is only detected after
    // the first point's histogram has been written
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "d.toml",
        "[profile]\nkind = \"constant\"\nkappa = -1.0\nr_max = 20.0\n[start]\npoints = [[1.0, 0.0], [9.0, 0.0]]\n[stop]\nr_inf = 6.0\n[mc]\nn_paths = 50\n",
    );
    let out = cartan(&["dirichlet", "--config", &cfg, "--out", "d"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("stop.r_inf"));
    let d = tmp.path().join("d");
    assert!(d.join("histogram_0.csv.partial").exists());
    assert!(!d.join("histogram_0.csv").exists());
}

#[test]
fn worker_count_does_not_change_any_byte() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "s.toml", SIMULATE);
    let a = cartan(&["simulate", "--config", &cfg, "--out", "a", "--workers", "1", "--plot", "--paths"], tmp.path());
    let b = Command::new(BIN)
        .args(["simulate", "--config", &cfg, "--out", "b", "--plot", "--paths"])
        .env("CARTAN_WORKERS", "3")
        .current_dir(tmp.path())
        .output()
        .unwrap();
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(b.status.code(), Some(0));
    let (fa, fb) = (read_all(&tmp.path().join("a")), read_all(&tmp.path().join("b")));
    assert_eq!(fa.len(), fb.len());
    assert!(fa.iter().any(|(n, _)| n == "paths_1.csv"));
    assert!(fa.iter().any(|(n, _)| n.ends_with(".svg")));
    assert_eq!(fa, fb);
}

#[test]
fn seed_flag_changes_results() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "s.toml", SIMULATE);
    cartan(&["simulate", "--config", &cfg, "--out", "a"], tmp.path());
    cartan(&["simulate", "--config", &cfg, "--out", "b", "--seed", "5"], tmp.path());
    let read = |d: &str| fs::read_to_string(tmp.path().join(d).join("simulate.csv")).unwrap();
    assert_ne!(read("a"), read("b"));
}

#[test]
fn bad_worker_env_is_a_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    let out = Command::new(BIN).args(["validate"]).env("CARTAN_WORKERS", "many").current_dir(tmp.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn shipped_configs_validate() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut n = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "toml") {
            let cfg = cartan::config::ExperimentConfig::load(&path).unwrap();
            cfg.validate().unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            n += 1;
        }
    }
    assert!(n >= 4);
}
