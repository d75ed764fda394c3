use std::path::Path;
use std::process::{Command, Output};

use planck_noise::analysis::{welch_psd, WelchParams};
use planck_noise::cli::RunConfig;
use planck_noise::io::read_series_binary;

fn cli(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_planck-noise"))
        .args(args)
        .current_dir(dir)
        .env_remove("PLANCK_NOISE_OUT_DIR")
        .output()
        .unwrap()
}

fn preamble(text: &str, key: &str) -> String {
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("# {key}: ")))
        .unwrap_or_else(|| panic!("missing {key}"))
        .to_string()
}

#[test]
fn spectrum_table_lists_zeros() {
    let dir = tempfile::tempdir().unwrap();
    let out = cli(&["spectrum", "--arm-length", "40", "--f-max", "10e6"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let zeros: Vec<f64> = preamble(&text, "zeros_hz").split(' ').map(|z| z.parse().unwrap()).collect();
    assert_eq!(zeros.len(), 2);
    assert!((zeros[0] - 3.7474e6).abs() < 1e2);
    let f_c: f64 = preamble(&text, "f_c_hz").parse().unwrap();
    assert!((f_c - 5.964e5).abs() < 50.0);
    let rows = text.lines().filter(|l| !l.starts_with('#')).count();
    assert_eq!(rows, 1 + 1001);
}

#[test]
fn spectrum_geo600_plateau() {
    let dir = tempfile::tempdir().unwrap();
    let out = cli(&["spectrum", "--arm-length", "600", "--f-max", "1e5", "--format", "json"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let asd = v["plateau_asd_one_sided"].as_f64().unwrap();
    assert!((asd - 3.144e-19).abs() < 0.01e-19, "{asd}");
    assert!(v["envelope_two_sided"][0].is_null());
}

#[test]
fn bad_grids_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["spectrum", "--f-max", "0"],
        vec!["spectrum", "--f-max", "-3"],
        vec!["spectrum", "--f-max", "1e6", "--n-points", "1"],
        vec!["spectrum"],
        vec!["frobnicate"],
    ] {
        assert_eq!(cli(&args, dir.path()).status.code(), Some(2), "{args:?}");
    }
    assert_eq!(cli(&["--help"], dir.path()).status.code(), Some(0));
}

#[test]
fn synth_methods_agree_and_embed_provenance() {
    let dir = tempfile::tempdir().unwrap();
    let mut psd = Vec::new();
    for method in ["spectral", "boxcar"] {
        let file = format!("{method}.bin");
        let out = cli(
            &["synth", "--method", method, "--sample-rate", "128e6", "--n-samples", "1048576", "--seed", "8", "--output", &file],
            dir.path(),
        );
        assert_eq!(out.status.code(), Some(0));
        let (ts, prov) = read_series_binary(std::fs::File::open(dir.path().join(&file)).unwrap()).unwrap();
        assert_eq!(prov.seed, Some(8));
        assert_eq!(prov.config["method"], method);
        assert_eq!(ts.len(), 1 << 20);
        let p = welch_psd(&ts, &WelchParams::new(1024, 0.5, Default::default())).unwrap();
        // Band below the first zero.
        let r = p.band_indices(6e4, 3.7e6);
        psd.push(p.values[r].iter().sum::<f64>());
    }
    assert!((psd[0] / psd[1] - 1.0).abs() < 0.05, "{psd:?}");
}

#[test]
fn synth_honours_output_dir_env() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_planck-noise"))
        .args(["synth", "--n-samples", "4096", "--seed", "2", "--format", "csv"])
        .env("PLANCK_NOISE_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let path = dir.path().join("synth_spectral_2.csv");
    let text = std::fs::read_to_string(path).unwrap();
    assert_eq!(preamble(&text, "seed"), "2");
    assert!(preamble(&text, "config").contains("\"n_samples\":4096"));
}

#[test]
fn synth_invalid_sample_rate_is_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = cli(&["synth", "--sample-rate", "1e6", "--output", "x.bin"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("sample_rate"));
}

#[test]
fn run_rejects_bad_config_listing_fields() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = RunConfig::reference(1, 1.5);
    cfg.duration = -1.0;
    let path = dir.path().join("bad.json");
    std::fs::write(&path, serde_json::to_string(&cfg).unwrap()).unwrap();
    let out = cli(&["run", "--config", "bad.json"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("rho_geom") && err.contains("duration"), "{err}");

    std::fs::write(&path, "{\"seed\": 1}").unwrap();
    assert_eq!(cli(&["run", "--config", "bad.json"], dir.path()).status.code(), Some(2));
    assert_eq!(cli(&["run"], dir.path()).status.code(), Some(2));
}

#[test]
fn run_writes_bundle() {
    let dir = tempfile::tempdir().unwrap();
    let out = cli(&["default-config", "--rho", "1", "--output", "cfg.json"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let out = cli(&["run", "--config", "cfg.json", "--duration", "0.016", "--output-dir", "res"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let res = dir.path().join("res");
    for f in ["psd_a.csv", "psd_b.csv", "csd.csv", "coherence.csv", "xcorr.csv"] {
        let text = std::fs::read_to_string(res.join(f)).unwrap();
        assert_eq!(preamble(&text, "seed"), "0");
        assert_eq!(preamble(&text, "command"), "run");
    }
    let s: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(res.join("summary.json")).unwrap()).unwrap();
    assert_eq!(s["provenance"]["config"]["duration"], 0.016);
    let a = s["amplitude_fit"].as_f64().unwrap();
    let e = s["amplitude_error"].as_f64().unwrap();
    assert!((a - 1.0).abs() < 4.0 * e, "{a} +/- {e}");
}

#[test]
fn verify_reports_every_claim() {
    let dir = tempfile::tempdir().unwrap();
    let out = cli(&["verify"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("critical frequency"));
    assert!(text.contains("crossover"));
    assert!(text.contains("covariance"));
    assert!(!text.contains("FAIL"));
    let out = cli(&["verify", "--json"], dir.path());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["passed"], true);
}
