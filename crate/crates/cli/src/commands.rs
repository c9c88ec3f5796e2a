use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use fracdiff_core::forward::{
    observe, solve_single_modal, solve_spacetime_modal, solve_with_boundary, ObservationSeries,
    SolutionField,
};
use fracdiff_core::order_recovery::{
    recover_alpha_long_time, recover_alpha_short_time, recover_multiterm, recover_spacetime,
    MultiTermOptions, RecoveryReport, RecoveryStatus,
};
use fracdiff_core::spectral::uniform_points;
use fracdiff_core::weight_recovery::{recover_weight, WeightRecoveryOptions, WeightStatus};
use sha2::{Digest, Sha256};

use crate::battery::{self, Battery};
use crate::config::{hex, Method, ModelConfig, RunConfig};
use crate::io::{self, Header};
use crate::noise::add_noise;
use crate::CliError;

/// Command-line values that take precedence over the config file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub method: Option<Method>,
    pub ell: Option<usize>,
    pub epsilon: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Success,
    /// Output was written but the run did not meet its own criterion
    /// (non-converged inversion, failing battery check).
    Unmet(String),
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        match self {
            Outcome::Success => 0,
            Outcome::Unmet(_) => 4,
        }
    }
}

fn solver(e: fracdiff_core::Error) -> CliError {
    CliError::Solver(e.to_string())
}

/// Loads the config and folds the overrides in, then re-validates.
pub fn load_config(path: &Path, ov: &Overrides) -> Result<RunConfig, CliError> {
    let mut cfg = RunConfig::load(path)?;
    if let Some(s) = ov.seed {
        cfg.noise.seed = s;
    }
    if let Some(m) = ov.method {
        cfg.inversion.method = Some(m);
    }
    if let Some(l) = ov.ell {
        cfg.inversion.ell = l;
    }
    if let Some(e) = ov.epsilon {
        cfg.inversion.epsilon = e;
    }
    if let Some(o) = &ov.out {
        cfg.output.dir = o.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

/// The output directory is not part of the experiment, so it is left out of
/// the hash: the same run written to two places produces identical files.
fn header(cfg: &RunConfig) -> Header {
    let mut c = cfg.clone();
    c.output.dir = PathBuf::new();
    Header {
        config_hash: c.hash(),
        seed: cfg.noise.seed,
    }
}

pub fn solve_forward(cfg: &RunConfig) -> Result<SolutionField, CliError> {
    let sc = cfg.scenario()?;
    let xs = if cfg.output.solution {
        uniform_points(cfg.domain.length, cfg.space.points)
    } else {
        Vec::new()
    };
    let homogeneous = sc.boundary.is_homogeneous();
    match cfg.model {
        ModelConfig::Single { alpha } if homogeneous => {
            solve_single_modal(alpha, &sc.a, &sc.eig, &sc.grid, &xs)
        }
        ModelConfig::Spacetime { alpha, gamma } => {
            solve_spacetime_modal(alpha, gamma, &sc.a, &sc.eig, &sc.grid, &xs)
        }
        _ => solve_with_boundary(
            &cfg.operator()?,
            &sc.a,
            &sc.boundary,
            &sc.eig,
            &sc.grid,
            &xs,
        ),
    }
    .map_err(solver)
}

/// Sensor series of the configured model, with the configured noise applied.
pub fn forward_series(cfg: &RunConfig) -> Result<(SolutionField, ObservationSeries), CliError> {
    let field = solve_forward(cfg)?;
    let clean = observe(&field, cfg.sensor.x0).map_err(solver)?;
    let h = add_noise(&clean, cfg.noise.level, cfg.noise.seed)?;
    Ok((field, h))
}

pub fn cmd_forward(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let (field, h) = forward_series(cfg)?;
    let hd = header(cfg);
    let out = &cfg.output.dir;
    let extra = [
        ("x0", format!("{:?}", cfg.sensor.x0)),
        ("noise-level", format!("{:?}", cfg.noise.level)),
        ("solver", field.provenance().to_string()),
    ];
    io::write_with_header(
        &out.join("observation.csv"),
        &hd,
        &extra,
        &io::observation_csv(&h),
    )?;
    if cfg.output.solution {
        io::write_with_header(
            &out.join("solution.csv"),
            &hd,
            &extra[2..],
            &io::solution_csv(&field),
        )?;
    }
    Ok(Outcome::Success)
}

fn status_outcome(status: RecoveryStatus) -> Outcome {
    if status.is_converged() {
        Outcome::Success
    } else {
        Outcome::Unmet(format!("recovery status {status}"))
    }
}

fn write_report<E: fracdiff_core::order_recovery::Estimate>(
    out: &Path,
    hd: &Header,
    r: &RecoveryReport<E>,
    ratios: bool,
) -> Result<Outcome, CliError> {
    io::write_with_header(&out.join("report.txt"), hd, &[], &r.to_text())?;
    if ratios {
        io::write_with_header(&out.join("ratios.csv"), hd, &[], &r.ratios_csv())?;
    }
    Ok(status_outcome(r.status))
}

pub fn cmd_invert(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let method = cfg.inversion.method.ok_or_else(|| {
        CliError::Config("inversion.method: no method given (set it or pass --method)".into())
    })?;
    let out = &cfg.output.dir;
    let series = io::read_observation(&cfg.data_path(out), cfg.sensor.x0)?;
    let hd = header(cfg);
    let multiterm_opts = MultiTermOptions {
        starts: cfg.inversion.starts,
        seed: cfg.noise.seed,
        epsilon: cfg.inversion.epsilon,
        ..Default::default()
    };
    match method {
        Method::ShortTime => {
            // the series starts at t = 0 exactly when it came from a forward run
            let a_x0 = if series.times()[0] == 0.0 {
                series.values()[0]
            } else {
                let sc = cfg.inversion_scenario()?;
                sc.eig.synthesize_at(sc.a.as_slice(), cfg.sensor.x0)
            };
            let r = recover_alpha_short_time(&series, a_x0).map_err(solver)?;
            write_report(out, &hd, &r, true)
        }
        Method::LongTime => {
            let r = recover_alpha_long_time(&series).map_err(solver)?;
            write_report(out, &hd, &r, true)
        }
        Method::Spacetime => {
            let sc = cfg.inversion_scenario()?;
            let r = recover_spacetime(&series, &sc.eig, &sc.a).map_err(solver)?;
            write_report(out, &hd, &r, true)
        }
        Method::Multiterm => {
            let sc = cfg.inversion_scenario()?;
            let r = recover_multiterm(&series, cfg.inversion.ell, &sc, &multiterm_opts)
                .map_err(solver)?;
            write_report(out, &hd, &r, false)
        }
        Method::Weight => {
            let sc = cfg.inversion_scenario()?;
            let e = recover_weight(
                &series,
                &sc,
                cfg.inversion.nodes,
                cfg.inversion.epsilon,
                &WeightRecoveryOptions::default(),
            )
            .map_err(solver)?;
            io::write_with_header(&out.join("report.txt"), &hd, &[], &e.to_text())?;
            io::write_with_header(&out.join("weight.csv"), &hd, &[], &e.to_csv())?;
            Ok(match e.status {
                WeightStatus::Converged => Outcome::Success,
                s => Outcome::Unmet(format!("recovery status {s}")),
            })
        }
        Method::Sweep => {
            let sc = cfg.inversion_scenario()?;
            let mut table = String::from("ell,misfit,relative_misfit,status\n");
            let mut text = String::new();
            for ell in 1..=3 {
                let r = recover_multiterm(&series, ell, &sc, &multiterm_opts).map_err(solver)?;
                let get = |k: &str| {
                    r.diagnostics
                        .residuals
                        .iter()
                        .find(|(n, _)| n == k)
                        .map_or(f64::NAN, |x| x.1)
                };
                let _ = writeln!(
                    table,
                    "{ell},{:?},{:?},{}",
                    get("misfit"),
                    get("relative_misfit"),
                    r.status
                );
                let _ = writeln!(text, "[ell = {ell}]\n{}", r.to_text());
            }
            io::write_with_header(&out.join("report.txt"), &hd, &[], &text)?;
            io::write_with_header(&out.join("sweep.csv"), &hd, &[], &table)?;
            // misfit against ℓ is reported, not judged
            Ok(Outcome::Success)
        }
    }
}

pub fn cmd_battery(
    which: Battery,
    cfg: Option<&RunConfig>,
    out: &Path,
) -> Result<Outcome, CliError> {
    let report = battery::run(which, cfg)?;
    let hd = match cfg {
        Some(c) => header(c),
        None => Header {
            config_hash: hex(&Sha256::digest(
                format!("battery {}", which.name()).as_bytes(),
            )),
            seed: 42,
        },
    };
    io::write_with_header(
        &out.join(format!("battery_{}.txt", which.name())),
        &hd,
        &[],
        &report.summary(),
    )?;
    for (name, body) in &report.tables {
        io::write_with_header(&out.join(name), &hd, &[], body)?;
    }
    Ok(if report.all_pass() {
        Outcome::Success
    } else {
        let failed: Vec<&str> = report
            .checks
            .iter()
            .filter(|c| !c.pass)
            .map(|c| c.name.as_str())
            .collect();
        Outcome::Unmet(format!("failed checks: {}", failed.join(", ")))
    })
}

/// Re-noises an existing observation file into `observation_noisy.csv`.
pub fn cmd_noise(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let out = &cfg.output.dir;
    let series = io::read_observation(&cfg.data_path(out), cfg.sensor.x0)?;
    let noisy = add_noise(&series, cfg.noise.level, cfg.noise.seed)?;
    let extra = [
        ("x0", format!("{:?}", cfg.sensor.x0)),
        ("noise-level", format!("{:?}", cfg.noise.level)),
    ];
    io::write_with_header(
        &out.join("observation_noisy.csv"),
        &header(cfg),
        &extra,
        &io::observation_csv(&noisy),
    )?;
    Ok(Outcome::Success)
}
