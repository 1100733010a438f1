use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;
use turbofan_core::config::RunConfig;

fn turbofan(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_turbofan"))
        .args(args)
        .env_remove("TURBOFAN_CONFIG_DIR")
        .output()
        .expect("binary runs")
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn config(name: &str) -> String {
    configs().join(name).to_string_lossy().into_owned()
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

fn out_path(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_string_lossy().into_owned()
}

fn json(path: &str) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn analyze_takeoff_json() {
    let dir = TempDir::new().unwrap();
    let out = out_path(&dir, "to.json");
    let r = turbofan(&[
        "analyze",
        "--config",
        &config("takeoff.toml"),
        "--output",
        &out,
        "--format",
        "json",
    ]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let v = json(&out);
    let thrust = v["cycle"]["performance"]["thrust"].as_f64().unwrap();
    assert!((thrust / 310.0 - 1.0).abs() < 0.05, "{thrust}");
    assert_eq!(v["exergy"]["perComponent"].as_array().unwrap().len(), 6);
    assert!(String::from_utf8_lossy(&r.stdout).contains("thrust"));
}

#[test]
fn analyze_csv_writes_station_and_exergy_tables() {
    let dir = TempDir::new().unwrap();
    let out = out_path(&dir, "cruise.csv");
    let r = turbofan(&[
        "analyze",
        "--config",
        &config("cruise.toml"),
        "--output",
        &out,
        "--format",
        "csv",
    ]);
    assert!(r.status.success());
    let stations = fs::read_to_string(&out).unwrap();
    assert!(stations.starts_with("station,T_K,P_kPa,mdot_kgps\n"));
    assert_eq!(stations.lines().count(), 12);
    let exergy = fs::read_to_string(dir.path().join("cruise-exergy.csv")).unwrap();
    assert!(exergy.starts_with("component,etaEx,E_D_kW\n"));
}

#[test]
fn malformed_config_names_the_field() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "bad.toml", "[engine]\nTIT = 1500.0\npiFann = 1.4\n");
    let r = turbofan(&["analyze", "--config", &cfg]);
    assert_eq!(r.status.code(), Some(2));
    let err = String::from_utf8_lossy(&r.stderr);
    assert!(err.contains("piFann"), "{err}");
    assert!(err.contains("line 3"), "{err}");
}

#[test]
fn missing_config_file_is_not_a_parse_error() {
    let r = turbofan(&["analyze", "--config", "/nonexistent/run.toml"]);
    assert_eq!(r.status.code(), Some(1));
}

#[test]
fn unknown_fuel_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "f.toml", "fuel = \"kerosene\"\n");
    let r = turbofan(&["analyze", "--config", &cfg]);
    assert_eq!(r.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&r.stderr).contains("kerosene"));
}

#[test]
fn infeasible_cycle_exit_status() {
    let dir = TempDir::new().unwrap();
    // Turbine inlet colder than the compressor delivery.
    let cfg = write(&dir, "cold.toml", "[engine]\nTIT = 700.0\n");
    let r = turbofan(&["analyze", "--config", &cfg]);
    assert_eq!(r.status.code(), Some(3), "{}", String::from_utf8_lossy(&r.stderr));
    assert!(String::from_utf8_lossy(&r.stderr).contains("station"));
}

#[test]
fn sweep_grid_and_determinism() {
    let dir = TempDir::new().unwrap();
    let a = out_path(&dir, "a.csv");
    let b = out_path(&dir, "b.csv");
    for out in [&a, &b] {
        let r = turbofan(&["sweep", "--config", &config("sweep.toml"), "--output", out]);
        assert!(r.status.success());
    }
    let text = fs::read(&a).unwrap();
    assert_eq!(text, fs::read(&b).unwrap());
    let mut reader = csv::Reader::from_reader(text.as_slice());
    let header = reader.headers().unwrap().clone();
    assert_eq!(&header[0], "deltaT_K");
    let rows: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 21);

    // SNOx rises with inlet temperature for each fuel.
    let snox = header.iter().position(|h| h == "snox").unwrap();
    for chunk in rows.chunks(7) {
        let s: Vec<f64> = chunk.iter().map(|r| r[snox].parse().unwrap()).collect();
        assert!(s.windows(2).all(|w| w[1] > w[0]), "{s:?}");
    }
}

#[test]
fn sweep_to_stdout_and_parallelism_setting() {
    let r = turbofan(&["sweep", "--config", &config("sweep.toml"), "--jobs", "1"]);
    assert!(r.status.success());
    let serial = r.stdout;
    let r = turbofan(&["sweep", "--config", &config("sweep.toml"), "--jobs", "4"]);
    assert_eq!(serial, r.stdout);
    assert_eq!(String::from_utf8_lossy(&serial).lines().count(), 22);
}

#[test]
fn sweep_without_section_fails() {
    let r = turbofan(&["sweep", "--config", &config("takeoff.toml")]);
    assert_eq!(r.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&r.stderr).contains("[sweep]"));
}

const SMALL_GA: &str = "[optimize]\ncase = \"thermal-eff-max\"\noraclePoints = 3\n\
                        [optimize.ga]\npopulationSize = 20\ngenerations = 10\n";

#[test]
fn optimize_is_reproducible_for_a_seed() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        &dir,
        "opt.toml",
        &format!("{SMALL_GA}[optimize.constraints]\nbands = []\n"),
    );
    let a = out_path(&dir, "a.json");
    let b = out_path(&dir, "b.json");
    for out in [&a, &b] {
        let r = turbofan(&[
            "optimize", "--config", &cfg, "--output", out, "--format", "json", "--seed", "7",
        ]);
        assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let v = json(&a);
    assert_eq!(v["ga"]["feasible"], true);
    assert_eq!(v["ga"]["history"].as_array().unwrap().len(), 11);
    assert!(v["oracle"]["objective"].is_number());
    let trace = fs::read_to_string(dir.path().join("a-trace.csv")).unwrap();
    assert!(trace.starts_with("generation,ga_bestFitness,oracle_bestFitness\n"));

    let c = out_path(&dir, "c.json");
    turbofan(&[
        "optimize", "--config", &cfg, "--output", &c, "--format", "json", "--seed", "8",
    ]);
    assert_ne!(fs::read(&a).unwrap(), fs::read(&c).unwrap());
}

#[test]
fn optimize_reports_no_feasible_design() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        &dir,
        "opt.toml",
        &format!("{SMALL_GA}[[optimize.constraints.bands]]\nmetric = \"tsfc\"\nmin = 0.1\nmax = 0.2\n"),
    );
    let out = out_path(&dir, "r.csv");
    let r = turbofan(&["optimize", "--config", &cfg, "--output", &out]);
    assert_eq!(r.status.code(), Some(5));
    let table = fs::read_to_string(&out).unwrap();
    assert!(table.lines().nth(1).unwrap().starts_with("ga,thermal-eff-max,false,"));
}

#[test]
fn rank_presets() {
    let dir = TempDir::new().unwrap();
    let out = out_path(&dir, "rank.json");
    let r = turbofan(&[
        "rank",
        "--config",
        &config("rank-economic.toml"),
        "--output",
        &out,
        "--format",
        "json",
    ]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    assert_eq!(json(&out)["ranking"], serde_json::json!(["case1", "case2", "case3"]));

    let r = turbofan(&["rank", "--config", &config("rank-environmental.toml")]);
    let text = String::from_utf8_lossy(&r.stdout);
    let first = text.lines().nth(1).unwrap();
    assert!(first.starts_with("1") && first.contains("case3"), "{text}");
}

#[test]
fn rank_single_alternative() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        &dir,
        "one.toml",
        "[rank]\nweights = [1.0, -1.0]\n[rank.matrix]\nalternatives = [\"only\"]\n\
         criteria = [\"a\", \"b\"]\nvalues = [[2.0, 3.0]]\n",
    );
    let out = out_path(&dir, "one.json");
    let r = turbofan(&["rank", "--config", &cfg, "--output", &out, "--format", "json"]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    assert_eq!(json(&out)["closeness"], serde_json::json!([0.5]));
}

#[test]
fn rank_degenerate_column() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        &dir,
        "zero.toml",
        "[rank]\nweights = [1.0, -1.0]\n[rank.matrix]\nalternatives = [\"x\", \"y\"]\n\
         criteria = [\"a\", \"b\"]\nvalues = [[2.0, 0.0], [1.0, 0.0]]\n",
    );
    let r = turbofan(&["rank", "--config", &cfg]);
    assert_eq!(r.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&r.stderr).contains("'b'"));
}

#[test]
fn dump_defaults_round_trips() {
    let dir = TempDir::new().unwrap();
    let out = out_path(&dir, "defaults.toml");
    let r = turbofan(&["dump-defaults", "--output", &out]);
    assert!(r.status.success());
    let cfg = RunConfig::load(Path::new(&out)).unwrap();
    assert_eq!(RunConfig { base_dir: None, ..cfg }, RunConfig::example());

    let stdout = turbofan(&["dump-defaults"]).stdout;
    assert_eq!(stdout, fs::read(&out).unwrap());
}

#[test]
fn config_dir_from_environment() {
    let dir = TempDir::new().unwrap();
    write(&dir, "turbofan.toml", "fuel = \"H2\"\n");
    write(
        &dir,
        "takeoff-ng.toml",
        "fuel = \"NG\"\n[flight]\nmach = 0.0\naltitude = 0.0\n",
    );
    let run = |args: &[&str]| {
        Command::new(env!("CARGO_BIN_EXE_turbofan"))
            .args(args)
            .env("TURBOFAN_CONFIG_DIR", dir.path())
            .output()
            .unwrap()
    };
    let r = run(&["analyze"]);
    assert!(String::from_utf8_lossy(&r.stdout).starts_with("hydrogen at Mach 0.85"));
    let r = run(&["analyze", "--config", "takeoff-ng.toml"]);
    assert!(String::from_utf8_lossy(&r.stdout).starts_with("natural-gas at Mach 0"));
}

#[test]
fn fuel_file_adds_fuels() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        &dir,
        "blend.toml",
        &format!("fuel = \"methanol-blend\"\nfuelFile = {:?}\n", config("fuels.toml")),
    );
    let r = turbofan(&["analyze", "--config", &cfg]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    assert!(String::from_utf8_lossy(&r.stdout).starts_with("methanol-blend"));
}

#[test]
fn validate_prints_every_criterion() {
    let r = turbofan(&["validate"]);
    let text = String::from_utf8_lossy(&r.stdout);
    let verdicts = text
        .lines()
        .filter(|l| l.starts_with("[PASS] criterion") || l.starts_with("[FAIL] criterion"))
        .count();
    assert_eq!(verdicts, 10);
    let all_pass = !text.contains("[FAIL] criterion");
    assert_eq!(r.status.code(), Some(if all_pass { 0 } else { 4 }));
}
