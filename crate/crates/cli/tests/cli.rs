use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const COMMANDS: [&str; 6] = [
    "source-report",
    "visibility-scan",
    "bell",
    "tomography",
    "interference",
    "simulate-counts",
];

fn run(out: &Path, config: Option<&Path>, seed: u64, command: &str) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_twocrystal"));
    cmd.arg("--out")
        .arg(out)
        .arg("--seed")
        .arg(seed.to_string());
    if let Some(c) = config {
        cmd.arg("--config").arg(c);
    }
    cmd.arg(command).output().expect("binary runs")
}

fn run_dir(output: &Output) -> PathBuf {
    assert!(
        output.status.success(),
        "{}",
        String::from_utf8_lossy(&output.stderr)
    );
    PathBuf::from(String::from_utf8(output.stdout.clone()).unwrap().trim())
}

fn files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().into_string().unwrap(),
                fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    v.sort();
    v
}

fn write_config(dir: &TempDir, text: &str) -> PathBuf {
    let path = dir.path().join("run.toml");
    fs::write(&path, text).unwrap();
    path
}

#[test]
fn reruns_are_byte_identical() {
    let tmp = TempDir::new().unwrap();
    let config = write_config(&tmp, "[simulation]\nmean_events = 2000.0\n");
    for command in COMMANDS {
        let a = run_dir(&run(&tmp.path().join("a"), Some(&config), 11, command));
        let b = run_dir(&run(&tmp.path().join("b"), Some(&config), 11, command));
        assert_eq!(a.file_name(), b.file_name());
        let (fa, fb) = (files(&a), files(&b));
        assert!(!fa.is_empty(), "{command} wrote nothing");
        assert_eq!(fa, fb, "{command} output differs between reruns");
    }
}

#[test]
fn seed_changes_simulated_counts() {
    let tmp = TempDir::new().unwrap();
    let a = run_dir(&run(tmp.path(), None, 1, "simulate-counts"));
    let b = run_dir(&run(tmp.path(), None, 2, "simulate-counts"));
    assert_ne!(a, b);
    assert_ne!(
        fs::read(a.join("counts.csv")).unwrap(),
        fs::read(b.join("counts.csv")).unwrap()
    );
}

#[test]
fn outputs_carry_hash_and_seed() {
    let tmp = TempDir::new().unwrap();
    let config = write_config(&tmp, "[crystal]\nlength_mm = 0.5\n");
    for command in COMMANDS {
        let dir = run_dir(&run(tmp.path(), Some(&config), 5, command));
        for (name, bytes) in files(&dir) {
            let text = String::from_utf8(bytes).unwrap();
            if name.ends_with(".csv") {
                assert!(text.starts_with("# config_sha256="), "{name}");
                assert!(text.lines().next().unwrap().ends_with("seed=5"), "{name}");
            } else {
                let v: serde_json::Value = serde_json::from_str(&text).unwrap();
                assert_eq!(v["seed"], 5, "{name}");
                assert_eq!(v["config_sha256"].as_str().unwrap().len(), 64, "{name}");
            }
        }
    }
}

#[test]
fn zero_length_row_is_fully_coherent() {
    let tmp = TempDir::new().unwrap();
    let config = write_config(&tmp, "[crystal]\nscan_lengths_mm = [0.0, 1.0]\n");
    let dir = run_dir(&run(tmp.path(), Some(&config), 0, "source-report"));
    let text = fs::read_to_string(dir.join("fig4_source_report.csv")).unwrap();
    let row: Vec<f64> = text
        .lines()
        .nth(2)
        .unwrap()
        .split(',')
        .map(|x| x.parse().unwrap())
        .collect();
    assert_eq!(row[0], 0.0);
    assert_eq!(row[5], 1.0);
    assert_eq!(row[6], 1.0);
}

#[test]
fn compensation_rows_bracket_uncompensated() {
    let tmp = TempDir::new().unwrap();
    let config = write_config(&tmp, "[crystal]\nscan_lengths_mm = [1.0]\n");
    let dir = run_dir(&run(tmp.path(), Some(&config), 0, "source-report"));
    let text = fs::read_to_string(dir.join("fig5_compensation.csv")).unwrap();
    let row: Vec<f64> = text
        .lines()
        .nth(2)
        .unwrap()
        .split(',')
        .map(|x| x.parse().unwrap())
        .collect();
    let (none, zero, ninety) = (row[2], row[3], row[4]);
    assert!(zero > none && none > ninety, "{row:?}");
}

#[test]
fn tomography_of_counts_file() {
    let tmp = TempDir::new().unwrap();
    // Noiseless Bell-state counts at 10⁴ per unit probability.
    let bell = twocrystal_core::DensityMatrix4::bell_phi_plus();
    let mut csv = String::from("label,count\n");
    for p in twocrystal_core::standard_set() {
        let n = (1e4 * p.probability(bell.matrix())).round();
        csv.push_str(&format!("{},{n}\n", p.label()));
    }
    fs::write(tmp.path().join("counts.csv"), csv).unwrap();
    let config = write_config(&tmp, "[tomography]\ncounts = \"counts.csv\"\n");
    let dir = run_dir(&run(
        &tmp.path().join("out"),
        Some(&config),
        3,
        "tomography",
    ));
    let doc: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.join("fig4_tomography.json")).unwrap())
            .unwrap();
    assert_eq!(doc["converged"], true);
    assert_eq!(doc["counts_sha256"].as_str().unwrap().len(), 64);
    assert!((doc["visibility"].as_f64().unwrap() - 1.0).abs() < 1e-2);
    assert!((doc["purity"].as_f64().unwrap() - 1.0).abs() < 2e-2);
    let corner = doc["rho"]["rows"][0][3][0].as_f64().unwrap();
    assert!((corner - 0.5).abs() < 1e-2, "{corner}");
}

#[test]
fn bad_config_exits_two() {
    let tmp = TempDir::new().unwrap();
    for text in [
        "[crystal]\nlength_mm = -1.0\n",
        "[nonsense]\nx = 1\n",
        "not toml [",
    ] {
        let config = write_config(&tmp, text);
        let out = run(tmp.path(), Some(&config), 0, "source-report");
        assert_eq!(out.status.code(), Some(2), "{text}");
    }
    let out = run(
        tmp.path(),
        Some(&tmp.path().join("missing.toml")),
        0,
        "bell",
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn malformed_counts_exit_two() {
    let tmp = TempDir::new().unwrap();
    fs::write(tmp.path().join("counts.csv"), "label,count\nHH,12\nXX,3\n").unwrap();
    let config = write_config(&tmp, "[tomography]\ncounts = \"counts.csv\"\n");
    assert_eq!(
        run(tmp.path(), Some(&config), 0, "tomography")
            .status
            .code(),
        Some(2)
    );

    fs::write(tmp.path().join("counts.csv"), "label,count\nHH,12\n").unwrap();
    assert_eq!(
        run(tmp.path(), Some(&config), 0, "tomography")
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn non_convergence_exits_three() {
    let tmp = TempDir::new().unwrap();
    let config = write_config(&tmp, "[tomography]\nmax_restarts = 0\n");
    let out = run(tmp.path(), Some(&config), 0, "tomography");
    assert_eq!(out.status.code(), Some(3));
    // The best estimate is still written, flagged as unconverged.
    let dir = fs::read_dir(tmp.path())
        .unwrap()
        .map(|e| e.unwrap().path())
        .find(|p| {
            p.is_dir()
                && p.file_name()
                    .unwrap()
                    .to_str()
                    .unwrap()
                    .starts_with("tomography")
        })
        .unwrap();
    let doc: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.join("fig4_tomography.json")).unwrap())
            .unwrap();
    assert_eq!(doc["converged"], false);
}

#[test]
fn undersampled_interference_exits_two() {
    let tmp = TempDir::new().unwrap();
    let config = write_config(&tmp, "[interference]\ntau_points = 64\n");
    assert_eq!(
        run(tmp.path(), Some(&config), 0, "interference")
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn interference_widths_ordered() {
    let tmp = TempDir::new().unwrap();
    let dir = run_dir(&run(tmp.path(), None, 0, "interference"));
    let doc: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.join("fig7_widths.json")).unwrap()).unwrap();
    for w in doc["scan"].as_array().unwrap() {
        assert!(w["coincidence_fs"].as_f64().unwrap() >= w["single_fs"].as_f64().unwrap());
    }
    let text = fs::read_to_string(dir.join("fig7_interference.csv")).unwrap();
    let rows: Vec<Vec<f64>> = text
        .lines()
        .skip(2)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    let n = rows.len();
    for i in 0..n / 2 {
        assert!((rows[i][1] - rows[n - 1 - i][1]).abs() < 1e-9);
        assert!((rows[i][2] - rows[n - 1 - i][2]).abs() < 1e-9);
    }
}

#[test]
fn bell_curves_respect_tsirelson() {
    let tmp = TempDir::new().unwrap();
    let dir = run_dir(&run(tmp.path(), None, 0, "bell"));
    let text = fs::read_to_string(dir.join("fig8_chsh.csv")).unwrap();
    assert_eq!(text.lines().nth(1).unwrap(), "theta_deg,s_p1,s_p0.7,s_p0.5");
    let bound = 2.0 * std::f64::consts::SQRT_2 + 1e-9;
    for line in text.lines().skip(2) {
        let row: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        assert!(row[1..].iter().all(|s| s.abs() <= bound));
        if row[0] == 22.5 {
            assert!((row[1] - 2.0 * std::f64::consts::SQRT_2).abs() < 1e-9);
        }
    }
}
