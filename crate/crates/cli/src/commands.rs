use std::fs;

use serde::Serialize;
use sha2::{Digest, Sha256};
use twocrystal_core::experiment::events_for_sigma;
use twocrystal_core::interference::tau_grid;
use twocrystal_core::source::DEFAULT_POSITION_GRID;
use twocrystal_core::units::{FS, MM};
use twocrystal_core::{
    bell_acquisition, chsh_scan, coincidence_probability, decoherence_parameter, delay_report,
    effective_spectrum, envelope_width, fit_visibility, fringe_pattern, io, mle_reconstruct,
    model_state, position_averaged_p, purity, standard_set, violation_significance, visibility,
    AcquisitionPlan, Compensation, CountRecord, DelayReport, DensityMatrix4, Error, Orientation,
    Reconstruction, SourceConfig, SpectrumMode, TomographyData, VisibilityFit,
};

use crate::run::{CliError, RunContext};

/// Retarder length used for the compensation table when none is configured.
const DEFAULT_RETARDER_MM: f64 = 3.0;
const SCAN_STEP_DEG: f64 = 5.0;
const POSITION_SWEEP_MM: f64 = 3.0;
const POSITION_SWEEP_POINTS: usize = 61;

fn mm(length: f64) -> f64 {
    length / MM
}

fn fs(t: f64) -> f64 {
    t / FS
}

/// Seed for the `k`-th independent draw within one command.
fn sub_seed(seed: u64, k: usize) -> u64 {
    seed.wrapping_add(k as u64)
}

/// State used for simulated counts: the configured p, or the source model's.
fn simulated_state(ctx: &RunContext) -> Result<(f64, DensityMatrix4), CliError> {
    let sim = &ctx.config.simulation;
    let p = sim
        .p
        .unwrap_or_else(|| decoherence_parameter(&ctx.config.source));
    Ok((p, model_state(p, sim.phase_rad)?))
}

#[derive(Serialize)]
struct SourceRow {
    length_mm: f64,
    #[serde(flatten)]
    report: DelayReport,
}

#[derive(Serialize)]
struct SourceReportDoc<'a> {
    coherence_time_fs: f64,
    compensation: Option<Compensation>,
    rows: &'a [SourceRow],
}

pub fn source_report(ctx: &RunContext) -> Result<(), CliError> {
    let src = &ctx.config.source;
    let rows = ctx
        .config
        .scan_lengths
        .iter()
        .map(|&l| {
            let report = delay_report(&src.clone().with_crystal_length(l))?;
            Ok(SourceRow {
                length_mm: mm(l),
                report,
            })
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let table: Vec<Vec<f64>> = rows
        .iter()
        .map(|r| {
            let d = &r.report;
            vec![
                r.length_mm,
                fs(d.tau_h),
                fs(d.tau_v),
                fs(d.delta_tau),
                fs(d.delta_tau_effective),
                d.p_mid,
                d.p_z,
            ]
        })
        .collect();
    ctx.write_table(
        "fig4_source_report.csv",
        &[
            "length_mm",
            "tau_h_fs",
            "tau_v_fs",
            "delta_tau_fs",
            "delta_tau_eff_fs",
            "p_mid",
            "p_z",
        ],
        &table,
    )?;
    ctx.write_json(
        "fig4_source_report.json",
        &SourceReportDoc {
            coherence_time_fs: fs(src.coherence_time),
            compensation: src.compensation,
            rows: &rows,
        },
    )?;

    let retarder = src
        .compensation
        .map(|c| c.length)
        .unwrap_or(DEFAULT_RETARDER_MM * MM);
    let with = |l: f64, orientation: Option<Orientation>| {
        let comp = orientation.map(|orientation| Compensation {
            length: retarder,
            orientation,
        });
        decoherence_parameter(&src.clone().with_crystal_length(l).with_compensation(comp))
    };
    let comp_rows: Vec<Vec<f64>> = ctx
        .config
        .scan_lengths
        .iter()
        .map(|&l| {
            vec![
                mm(l),
                mm(retarder),
                with(l, None),
                with(l, Some(Orientation::Compensating)),
                with(l, Some(Orientation::Enhancing)),
            ]
        })
        .collect();
    ctx.write_table(
        "fig5_compensation.csv",
        &[
            "length_mm",
            "retarder_mm",
            "p_uncompensated",
            "p_0deg",
            "p_90deg",
        ],
        &comp_rows,
    )?;

    let sweep = (0..POSITION_SWEEP_POINTS)
        .map(|i| {
            let l = POSITION_SWEEP_MM * MM * i as f64 / (POSITION_SWEEP_POINTS - 1) as f64;
            let c = src.clone().with_crystal_length(l);
            Ok(vec![
                mm(l),
                decoherence_parameter(&c),
                position_averaged_p(&c, DEFAULT_POSITION_GRID)?,
            ])
        })
        .collect::<Result<Vec<_>, Error>>()?;
    ctx.write_table(
        "fig10_position_average.csv",
        &["length_mm", "p_mid", "p_z"],
        &sweep,
    )?;
    Ok(())
}

#[derive(Serialize)]
struct ScanFit {
    length_mm: f64,
    p_model: f64,
    fit: VisibilityFit,
}

pub fn visibility_scan(ctx: &RunContext) -> Result<(), CliError> {
    let cfg = &ctx.config;
    let n0 = cfg.simulation.mean_events;
    let n_points = (180.0 / SCAN_STEP_DEG) as usize + 1;
    let xi: Vec<f64> = (0..n_points).map(|i| SCAN_STEP_DEG * i as f64).collect();

    let mut headers = vec!["xi_s_deg".to_string()];
    let mut columns = Vec::new();
    let mut fits = Vec::new();
    for (k, &l) in cfg.scan_lengths.iter().enumerate() {
        let p = decoherence_parameter(&cfg.source.clone().with_crystal_length(l));
        let rho = model_state(p, cfg.simulation.phase_rad)?;
        let model: Vec<f64> = xi
            .iter()
            .map(|&x| n0 * coincidence_probability(&rho, x, 45.0))
            .collect();
        let plan = AcquisitionPlan::visibility_scan(&xi, 45.0, n0, sub_seed(ctx.seed, k))
            .with_background(cfg.simulation.background);
        let counts: Vec<f64> = twocrystal_core::simulate_counts(&rho, &plan)?
            .iter()
            .map(|r| r.count as f64)
            .collect();
        fits.push(ScanFit {
            length_mm: mm(l),
            p_model: p,
            fit: fit_visibility(&xi, &counts)?,
        });
        headers.push(format!("model_{}mm", mm(l)));
        headers.push(format!("counts_{}mm", mm(l)));
        columns.push(model);
        columns.push(counts);
    }
    let rows: Vec<Vec<f64>> = xi
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            std::iter::once(x)
                .chain(columns.iter().map(|c| c[i]))
                .collect()
        })
        .collect();
    let headers: Vec<&str> = headers.iter().map(String::as_str).collect();
    ctx.write_table("fig3_visibility.csv", &headers, &rows)?;

    #[derive(Serialize)]
    struct Doc<'a> {
        mean_events: f64,
        idler_deg: f64,
        fits: &'a [ScanFit],
    }
    ctx.write_json(
        "fig3_visibility_fit.json",
        &Doc {
            mean_events: n0,
            idler_deg: 45.0,
            fits: &fits,
        },
    )
}

#[derive(Serialize)]
struct BellPoint {
    theta_deg: f64,
    s_model: f64,
    s: f64,
    sigma: f64,
    significance: f64,
    mean_events: f64,
    correlations: [f64; 4],
    correlation_errors: [f64; 4],
}

pub fn bell(ctx: &RunContext) -> Result<(), CliError> {
    let b = &ctx.config.bell;
    let n = (90.0 / b.theta_step_deg).floor() as usize + 1;
    let thetas: Vec<f64> = (0..n).map(|i| b.theta_step_deg * i as f64).collect();
    let curves = b
        .curve_p
        .iter()
        .map(|&p| chsh_scan(p, &thetas))
        .collect::<Result<Vec<_>, _>>()?;
    let headers: Vec<String> = std::iter::once("theta_deg".to_string())
        .chain(b.curve_p.iter().map(|p| format!("s_p{p}")))
        .collect();
    let rows: Vec<Vec<f64>> = thetas
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            std::iter::once(t)
                .chain(curves.iter().map(|c| c[i].1))
                .collect()
        })
        .collect();
    let headers: Vec<&str> = headers.iter().map(String::as_str).collect();
    ctx.write_table("fig8_chsh.csv", &headers, &rows)?;

    let rho = model_state(b.measured_p, 0.0)?;
    let model = chsh_scan(b.measured_p, &b.measured_theta_deg)?;
    let mut points = Vec::new();
    for (k, (&theta, &(_, s_model))) in b.measured_theta_deg.iter().zip(&model).enumerate() {
        let n0 = events_for_sigma(&rho, theta, b.target_sigma)?;
        let m = bell_acquisition(&rho, theta, n0, sub_seed(ctx.seed, k))?;
        points.push(BellPoint {
            theta_deg: theta,
            s_model,
            s: m.s,
            sigma: m.sigma,
            significance: violation_significance(m.s, m.sigma)?,
            mean_events: n0,
            correlations: m.correlations,
            correlation_errors: m.correlation_errors,
        });
    }
    let table: Vec<Vec<f64>> = points
        .iter()
        .map(|p| {
            vec![
                p.theta_deg,
                p.s_model,
                p.s,
                p.sigma,
                p.significance,
                p.mean_events,
            ]
        })
        .collect();
    ctx.write_table(
        "fig9_bell.csv",
        &[
            "theta_deg",
            "s_model",
            "s",
            "sigma",
            "significance",
            "mean_events",
        ],
        &table,
    )?;

    #[derive(Serialize)]
    struct Doc<'a> {
        p: f64,
        target_sigma: f64,
        points: &'a [BellPoint],
    }
    ctx.write_json(
        "fig9_bell_summary.json",
        &Doc {
            p: b.measured_p,
            target_sigma: b.target_sigma,
            points: &points,
        },
    )
}

#[derive(Serialize)]
struct TomographyDoc<'a> {
    counts_source: String,
    counts_sha256: Option<String>,
    true_p: Option<f64>,
    converged: bool,
    rho: twocrystal_core::state::DensityDocument,
    visibility: Option<f64>,
    purity: f64,
    eigenvalues: [f64; 4],
    distance_to_true: Option<f64>,
    linear_physical: bool,
    linear_min_eigenvalue: f64,
    diagnostics: &'a twocrystal_core::Diagnostics,
}

pub fn tomography(ctx: &RunContext) -> Result<(), CliError> {
    let cfg = &ctx.config;
    let set = standard_set();
    let (records, source, hash, truth) = match &cfg.tomography.counts {
        Some(path) => {
            let path = ctx.base.join(path);
            let bytes =
                fs::read(&path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
            let records = io::read_counts(bytes.as_slice())?;
            let hash = hex::encode(Sha256::digest(&bytes));
            (records, path.display().to_string(), Some(hash), None)
        }
        None => {
            let (p, rho) = simulated_state(ctx)?;
            let plan = AcquisitionPlan::tomography(&set, cfg.simulation.mean_events, ctx.seed)
                .with_background(cfg.simulation.background);
            let records = twocrystal_core::simulate_counts(&rho, &plan)?;
            ctx.write_counts("fig4_counts.csv", &records)?;
            (records, "simulated".to_string(), None, Some((p, rho)))
        }
    };
    let data = TomographyData::new(&records, &set)?;
    let (rec, failure) = match mle_reconstruct(&data, &cfg.mle_options(ctx.seed)) {
        Ok(r) => (r, None),
        Err(Error::NonConvergence { restarts, best }) => {
            let msg =
                format!("maximum-likelihood search did not converge after {restarts} restarts");
            (*best, Some(CliError::Numerical(msg)))
        }
        Err(e) => return Err(e.into()),
    };
    let Reconstruction {
        rho,
        linear,
        diagnostics,
        ..
    } = &rec;
    let doc = TomographyDoc {
        counts_source: source,
        counts_sha256: hash,
        true_p: truth.as_ref().map(|t| t.0),
        converged: failure.is_none(),
        rho: rho.to_document(),
        visibility: visibility(rho).ok(),
        purity: purity(rho),
        eigenvalues: rho.eigenvalues(),
        distance_to_true: truth.as_ref().map(|t| rho.distance(&t.1)),
        linear_physical: linear.physical,
        linear_min_eigenvalue: linear.min_eigenvalue,
        diagnostics,
    };
    ctx.write_json("fig4_tomography.json", &doc)?;
    match failure {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

#[derive(Serialize)]
struct Widths {
    length_mm: f64,
    single_fs: f64,
    coincidence_fs: f64,
}

fn widths(src: &SourceConfig, taus: &[f64]) -> Result<Widths, Error> {
    let single = fringe_pattern(&effective_spectrum(src, SpectrumMode::Single)?, taus);
    let coinc = fringe_pattern(&effective_spectrum(src, SpectrumMode::Coincidence)?, taus);
    Ok(Widths {
        length_mm: mm(src.crystal_length),
        single_fs: fs(envelope_width(&single)?),
        coincidence_fs: fs(envelope_width(&coinc)?),
    })
}

pub fn interference(ctx: &RunContext) -> Result<(), CliError> {
    let cfg = &ctx.config;
    let it = &cfg.interference;
    let taus = tau_grid(it.tau_points, it.tau_half_span_fs * FS);
    let src = cfg.source.clone().with_crystal_length(it.length_mm * MM);
    let single = fringe_pattern(&effective_spectrum(&src, SpectrumMode::Single)?, &taus);
    let coinc = fringe_pattern(&effective_spectrum(&src, SpectrumMode::Coincidence)?, &taus);
    let main = Widths {
        length_mm: it.length_mm,
        single_fs: fs(envelope_width(&single)?),
        coincidence_fs: fs(envelope_width(&coinc)?),
    };
    let (s, c) = (single.normalized(), coinc.normalized());
    let rows: Vec<Vec<f64>> = taus
        .iter()
        .enumerate()
        .map(|(i, &t)| vec![fs(t), s[i], c[i]])
        .collect();
    ctx.write_table(
        "fig7_interference.csv",
        &["tau_fs", "single", "coincidence"],
        &rows,
    )?;

    let scans = cfg
        .scan_lengths
        .iter()
        .filter(|&&l| l > 0.0)
        .map(|&l| widths(&cfg.source.clone().with_crystal_length(l), &taus))
        .collect::<Result<Vec<_>, _>>()?;
    #[derive(Serialize)]
    struct Doc<'a> {
        widths: &'a Widths,
        scan: &'a [Widths],
    }
    ctx.write_json(
        "fig7_widths.json",
        &Doc {
            widths: &main,
            scan: &scans,
        },
    )
}

pub fn simulate_counts(ctx: &RunContext) -> Result<(), CliError> {
    let sim = &ctx.config.simulation;
    let (p, rho) = simulated_state(ctx)?;
    let plan = AcquisitionPlan::tomography(&standard_set(), sim.mean_events, ctx.seed)
        .with_background(sim.background);
    let records: Vec<CountRecord> = twocrystal_core::simulate_counts(&rho, &plan)?;
    ctx.write_counts("counts.csv", &records)?;

    #[derive(Serialize)]
    struct Doc {
        p: f64,
        phase_rad: f64,
        mean_events: f64,
        background: f64,
        rho: twocrystal_core::state::DensityDocument,
    }
    ctx.write_json(
        "simulation.json",
        &Doc {
            p,
            phase_rad: sim.phase_rad,
            mean_events: sim.mean_events,
            background: sim.background,
            rho: rho.to_document(),
        },
    )
}
