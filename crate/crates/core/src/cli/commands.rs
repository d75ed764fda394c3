use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::json;

use super::config::RunConfig;
use super::verify::run_checks;
use super::{
    Command, DefaultConfigArgs, RunArgs, SeriesFormatArg, SpectrumArgs, SynthArgs, TableFormat,
    VerifyArgs, EXIT_OK, EXIT_VERIFY_FAILED, OUT_DIR_ENV,
};
use crate::analysis::{
    coherence_from, cross_correlation, detection_significance, welch_cross, CorrelationResult,
    Detection,
};
use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};
use crate::interferometer::simulate_dual_with;
use crate::io::{write_series_binary, write_series_csv, write_table, Provenance};
use crate::noise_model::HolographicSpectrum;
use crate::synthesis::{synthesize, SynthesisConfig, SynthesisMethod};

pub fn dispatch(cmd: Command) -> Result<i32> {
    match cmd {
        Command::Spectrum(a) => spectrum(&a),
        Command::Synth(a) => synth(&a),
        Command::Run(a) => run(&a),
        Command::DefaultConfig(a) => default_config(&a),
        Command::Verify(a) => verify(&a),
    }
}

fn default_out_dir() -> PathBuf {
    std::env::var_os(OUT_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("."))
}

fn sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// Frequency grid `f_min..=f_max` in `n` equal steps.
pub fn frequency_grid(f_min: f64, f_max: f64, n: usize) -> Result<Vec<f64>> {
    if !(f_max > 0.0) || !f_max.is_finite() {
        return Err(Error::Argument(format!("--f-max must be positive, got {f_max}")));
    }
    if !(f_min >= 0.0) || f_min >= f_max {
        return Err(Error::Argument(format!("--f-min must lie in [0, f_max), got {f_min}")));
    }
    if n < 2 {
        return Err(Error::Argument(format!("--n-points must be at least 2, got {n}")));
    }
    let step = (f_max - f_min) / (n - 1) as f64;
    Ok((0..n).map(|i| f_min + i as f64 * step).collect())
}

#[derive(Serialize)]
struct SpectrumTable {
    provenance: Provenance,
    arm_length_m: f64,
    f_c_hz: f64,
    coherence_time_s: f64,
    plateau_two_sided: f64,
    plateau_asd_one_sided: f64,
    zeros_hz: Vec<f64>,
    f_hz: Vec<f64>,
    psd_two_sided: Vec<f64>,
    psd_one_sided: Vec<f64>,
    asd_one_sided: Vec<f64>,
    envelope_two_sided: Vec<Option<f64>>,
}

fn spectrum(a: &SpectrumArgs) -> Result<i32> {
    let model = HolographicSpectrum::new(a.arm_length, PhysicalConstants::default())?;
    let grid = frequency_grid(a.f_min, a.f_max, a.n_points)?;
    let prov = Provenance::new(
        "spectrum",
        None,
        json!({"arm_length": a.arm_length, "f_min": a.f_min, "f_max": a.f_max, "n_points": a.n_points}),
    );
    let two: Vec<f64> = grid.iter().map(|&f| model.analytic_psd(f)).collect::<Result<_>>()?;
    // One-sided density doubles every bin except DC.
    let one: Vec<f64> = grid
        .iter()
        .zip(&two)
        .map(|(&f, &p)| if f > 0.0 { 2.0 * p } else { p })
        .collect();
    let envelope: Vec<Option<f64>> = grid.iter().map(|&f| model.envelope_high_f(f).ok()).collect();
    let zeros = model.zeros_up_to(a.f_max);
    let plateau_asd = (2.0 * model.plateau()).sqrt();

    let mut w = sink(a.output.as_deref())?;
    match a.format {
        TableFormat::Json => {
            let table = SpectrumTable {
                provenance: prov,
                arm_length_m: a.arm_length,
                f_c_hz: model.f_c,
                coherence_time_s: model.coherence_time(),
                plateau_two_sided: model.plateau(),
                plateau_asd_one_sided: plateau_asd,
                zeros_hz: zeros,
                asd_one_sided: one.iter().map(|p| p.sqrt()).collect(),
                f_hz: grid,
                psd_two_sided: two,
                psd_one_sided: one,
                envelope_two_sided: envelope,
            };
            serde_json::to_writer_pretty(&mut w, &table)?;
            writeln!(w)?;
            w.flush()?;
        }
        TableFormat::Csv => {
            let zero_list: Vec<String> = zeros.iter().map(|z| format!("{z:e}")).collect();
            let extra = vec![
                ("arm_length_m".to_string(), format!("{:e}", a.arm_length)),
                ("f_c_hz".to_string(), format!("{:e}", model.f_c)),
                ("coherence_time_s".to_string(), format!("{:e}", model.coherence_time())),
                ("plateau_two_sided_m2_per_hz".to_string(), format!("{:e}", model.plateau())),
                ("plateau_asd_one_sided_m_per_rthz".to_string(), format!("{plateau_asd:e}")),
                ("zeros_hz".to_string(), zero_list.join(" ")),
                ("envelope".to_string(), "NaN at or below f_c".to_string()),
            ];
            let rows: Vec<Vec<f64>> = (0..grid.len())
                .map(|i| vec![grid[i], two[i], one[i], one[i].sqrt(), envelope[i].unwrap_or(f64::NAN)])
                .collect();
            write_table(
                &mut w,
                &prov,
                &extra,
                &["f_hz", "psd_two_sided", "psd_one_sided", "asd_one_sided", "envelope_two_sided"],
                &rows,
            )?;
        }
    }
    Ok(EXIT_OK)
}

fn synth_config(a: &SynthArgs) -> Result<SynthesisConfig> {
    let mut cfg = match &a.config {
        Some(p) => {
            let text = fs::read_to_string(p)?;
            serde_json::from_str(&text).map_err(|e| Error::Config(vec![format!("{}: {e}", p.display())]))?
        }
        None => SynthesisConfig::holometer(0, SynthesisMethod::Spectral),
    };
    if let Some(v) = a.arm_length {
        cfg.arm_length = v;
    }
    if let Some(v) = a.sample_rate {
        cfg.sample_rate = v;
    }
    if let Some(v) = a.n_samples {
        cfg.n_samples = v;
    }
    if let Some(v) = a.seed {
        cfg.seed = v;
    }
    if let Some(m) = a.method {
        cfg.method = m.into();
    }
    cfg.validate(&PhysicalConstants::default())?;
    Ok(cfg)
}

fn synth(a: &SynthArgs) -> Result<i32> {
    let cfg = synth_config(a)?;
    let ts = synthesize(&cfg)?;
    let prov = Provenance::new("synth", Some(cfg.seed), serde_json::to_value(cfg)?);
    let ext = match a.format {
        SeriesFormatArg::Bin => "bin",
        SeriesFormatArg::Csv => "csv",
    };
    let path = a
        .output
        .clone()
        .unwrap_or_else(|| default_out_dir().join(format!("synth_{}_{}.{ext}", cfg.method, cfg.seed)));
    let w = BufWriter::new(File::create(&path)?);
    match a.format {
        SeriesFormatArg::Bin => write_series_binary(w, &ts, &prov)?,
        SeriesFormatArg::Csv => write_series_csv(w, &ts, &prov)?,
    }
    println!("{}", path.display());
    Ok(EXIT_OK)
}

#[derive(Debug, Clone, Serialize)]
pub struct LagSummary {
    pub max_lag_s: f64,
    pub coherence_time_s: f64,
    pub zero_lag_normalized: f64,
    pub zero_lag_sigma_normalized: f64,
    pub n_samples_effective: f64,
    /// Lags with `|lag| > 2L/c`.
    pub n_lags_beyond: usize,
    /// Fraction of those within three sigma of zero.
    pub fraction_beyond_within_3sigma: f64,
    pub max_abs_z_beyond: f64,
}

pub fn lag_summary(xc: &CorrelationResult, coherence_time: f64, max_lag: f64) -> LagSummary {
    let z0 = xc.zero_lag_index();
    // Half a sample of slack keeps the lag nearest 2L/c on the correlated side.
    let dt = xc.lags.get(z0 + 1).map(|l| l - xc.lags[z0]).unwrap_or(0.0);
    let beyond: Vec<f64> = xc
        .lags
        .iter()
        .enumerate()
        .filter(|(_, l)| l.abs() > coherence_time + 0.5 * dt)
        .map(|(i, _)| xc.covariance[i] / xc.sigma[i])
        .collect();
    let within = beyond.iter().filter(|z| z.abs() <= 3.0).count();
    LagSummary {
        max_lag_s: max_lag,
        coherence_time_s: coherence_time,
        zero_lag_normalized: xc.normalized[z0],
        zero_lag_sigma_normalized: xc.sigma_normalized[z0],
        n_samples_effective: xc.n_samples_effective,
        n_lags_beyond: beyond.len(),
        fraction_beyond_within_3sigma: if beyond.is_empty() {
            1.0
        } else {
            within as f64 / beyond.len() as f64
        },
        max_abs_z_beyond: beyond.iter().fold(0.0_f64, |m, z| m.max(z.abs())),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub provenance: Provenance,
    pub n_samples: usize,
    pub n_segments: usize,
    pub amplitude_fit: f64,
    pub amplitude_error: f64,
    pub snr: f64,
    pub detection: Detection,
    pub mean_coherence_in_band: f64,
    pub lag: LagSummary,
}

/// Everything `run` writes, computed in memory.
pub struct RunOutput {
    pub summary: RunSummary,
    pub tables: Vec<(String, Vec<&'static str>, Vec<Vec<f64>>)>,
}

/// Simulates both detectors and runs the full analysis chain.
pub fn execute_run(cfg: &RunConfig) -> Result<RunOutput> {
    cfg.validate()?;
    let model = cfg.model()?;
    let (a, b) = simulate_dual_with(&cfg.detectors, cfg.duration, cfg.sample_rate, cfg.seed, cfg.method)?;
    let cross = welch_cross(&a, &b, &cfg.welch)?;
    let coh = coherence_from(&cross);
    let band = cfg.fit_band()?;
    let detection = detection_significance(&cross, &model, band)?;
    let max_lag = cfg.lag_limit()?;
    let xc = cross_correlation(&a, &b, max_lag)?;

    let in_band = coh.band_indices(band.0, band.1);
    let mean_coherence_in_band = if in_band.is_empty() {
        f64::NAN
    } else {
        coh.values[in_band.clone()].iter().sum::<f64>() / in_band.len() as f64
    };

    let f = &cross.csd.frequencies;
    let psd = |v: &[f64]| -> Vec<Vec<f64>> {
        f.iter()
            .zip(v)
            .map(|(&f, &p)| vec![f, p, 2.0 * model.psd_unchecked(f)])
            .collect()
    };
    let tables = vec![
        ("psd_a".to_string(), vec!["f_hz", "psd_one_sided", "model_geometric_one_sided"], psd(&cross.psd_a.values)),
        ("psd_b".to_string(), vec!["f_hz", "psd_one_sided", "model_geometric_one_sided"], psd(&cross.psd_b.values)),
        (
            "csd".to_string(),
            vec!["f_hz", "re", "im", "abs", "model_one_sided"],
            f.iter()
                .zip(&cross.csd.values)
                .map(|(&f, c)| vec![f, c.re, c.im, c.norm(), 2.0 * cfg.detectors.rho_geom * model.psd_unchecked(f)])
                .collect(),
        ),
        (
            "coherence".to_string(),
            vec!["f_hz", "coherence"],
            f.iter().zip(&coh.values).map(|(&f, &c)| vec![f, c]).collect(),
        ),
        (
            "xcorr".to_string(),
            vec!["lag_s", "covariance", "normalized", "sigma", "sigma_normalized", "model_covariance"],
            (0..xc.lags.len())
                .map(|i| {
                    let l = xc.lags[i];
                    vec![
                        l,
                        xc.covariance[i],
                        xc.normalized[i],
                        xc.sigma[i],
                        xc.sigma_normalized[i],
                        cfg.detectors.rho_geom * model.analytic_autocorrelation(l),
                    ]
                })
                .collect(),
        ),
    ];

    let summary = RunSummary {
        provenance: Provenance::new("run", Some(cfg.seed), serde_json::to_value(cfg)?),
        n_samples: a.len(),
        n_segments: cross.csd.n_segments,
        amplitude_fit: detection.amplitude_fit,
        amplitude_error: detection.amplitude_error,
        snr: detection.snr,
        detection,
        mean_coherence_in_band,
        lag: lag_summary(&xc, model.coherence_time(), max_lag),
    };
    Ok(RunOutput { summary, tables })
}

fn run(a: &RunArgs) -> Result<i32> {
    if !a.config.is_file() {
        return Err(Error::Argument(format!("config file {} not found", a.config.display())));
    }
    let mut cfg = RunConfig::load(&a.config)?;
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    if let Some(r) = a.rho {
        cfg.detectors.rho_geom = r;
    }
    if let Some(d) = a.duration {
        cfg.duration = d;
    }
    if let Some(m) = a.method {
        cfg.method = m.into();
    }
    let out = execute_run(&cfg)?;
    let dir = a.output_dir.clone().unwrap_or_else(default_out_dir);
    fs::create_dir_all(&dir)?;
    let prov = &out.summary.provenance;
    for (name, columns, rows) in &out.tables {
        let w = BufWriter::new(File::create(dir.join(format!("{name}.csv")))?);
        write_table(w, prov, &[("table".to_string(), name.clone())], columns, rows)?;
    }
    let text = serde_json::to_string_pretty(&out.summary)?;
    fs::write(dir.join("summary.json"), format!("{text}\n"))?;
    println!(
        "amplitude_fit = {:.4} +/- {:.4}  snr = {:.2}  ({} segments)",
        out.summary.amplitude_fit, out.summary.amplitude_error, out.summary.snr, out.summary.n_segments
    );
    println!("wrote {}", dir.display());
    Ok(EXIT_OK)
}

fn default_config(a: &DefaultConfigArgs) -> Result<i32> {
    let cfg = RunConfig::reference(a.seed, a.rho);
    cfg.validate()?;
    let mut w = sink(a.output.as_deref())?;
    serde_json::to_writer_pretty(&mut w, &cfg)?;
    writeln!(w)?;
    w.flush()?;
    Ok(EXIT_OK)
}

fn verify(a: &VerifyArgs) -> Result<i32> {
    let checks = run_checks();
    let all = checks.iter().all(|c| c.passed);
    if a.json {
        println!("{}", serde_json::to_string_pretty(&json!({"passed": all, "checks": checks}))?);
    } else {
        for c in &checks {
            println!(
                "{}  {}: computed {:e}, expected {:e} ({})",
                if c.passed { "PASS" } else { "FAIL" },
                c.claim,
                c.computed,
                c.expected,
                c.tolerance
            );
        }
        let n_pass = checks.iter().filter(|c| c.passed).count();
        println!("{n_pass}/{} checks passed", checks.len());
    }
    Ok(if all { EXIT_OK } else { EXIT_VERIFY_FAILED })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_errors() {
        assert!(frequency_grid(0.0, 0.0, 10).is_err());
        assert!(frequency_grid(0.0, -1.0, 10).is_err());
        assert!(frequency_grid(5.0, 1.0, 10).is_err());
        assert!(frequency_grid(0.0, 1.0, 1).is_err());
        let g = frequency_grid(0.0, 10.0, 11).unwrap();
        assert_eq!(g[10], 10.0);
        assert_eq!(g[3], 3.0);
    }
}
