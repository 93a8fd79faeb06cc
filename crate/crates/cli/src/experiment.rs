//! Runs configured experiments and writes their artifacts.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use qw3::analysis::{sigma_of, SigmaSeries};
use qw3::coin::{amplitude_damping_kraus, grover_coin, phase_damping_kraus};
use qw3::density::{
    density_distribution, density_gcp, density_interference, from_pure, step_channel,
};
use qw3::stochastic::{monte_carlo, McConfig, NoiseModel};
use qw3::walk::{
    gcp, initial_state, interference_terms, position_distribution, step_pure, GcpVector,
    InterferenceTerms, PositionDistribution,
};
use serde_json::json;
use thiserror::Error;

use crate::config::{ConfigError, ExperimentConfig, Model};

/// Largest step count accepted for the density-matrix models.
pub const MAX_DENSITY_STEPS: usize = 5000;

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    #[error(transparent)]
    Simulation(#[from] qw3::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl RunError {
    /// Process exit code: 1 for configuration problems, 2 for capacity.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Capacity(_) => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Metadata {
    pub config: ExperimentConfig,
    pub wall_time_seconds: f64,
}

/// Everything one experiment produces; series are indexed by `t = 0..=steps`.
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub distribution: PositionDistribution,
    pub gcp_series: Vec<GcpVector>,
    pub sigma_series: SigmaSeries,
    pub q_series: Vec<InterferenceTerms>,
    pub metadata: Metadata,
}

/// Rejects configurations that cannot be run before any work is done.
pub fn check_capacity(cfg: &ExperimentConfig) -> Result<(), RunError> {
    if cfg.model.is_density() && cfg.steps > MAX_DENSITY_STEPS {
        let dim = 3 * (2 * (cfg.steps + 1) + 1);
        let gib = (dim * dim * 16) as f64 / (1u64 << 30) as f64;
        return Err(RunError::Capacity(format!(
            "{} with {} steps needs a {dim}x{dim} density matrix (~{gib:.1} GiB); limit is {MAX_DENSITY_STEPS} steps",
            cfg.model, cfg.steps
        )));
    }
    Ok(())
}

/// Runs the experiment in memory without touching the filesystem.
pub fn simulate(cfg: &ExperimentConfig) -> Result<RunReport, RunError> {
    check_capacity(cfg)?;
    let start = Instant::now();
    let t_max = cfg.steps + 1;
    let ic = cfg.initial_coin.amplitudes();
    let coin = grover_coin();

    let mut sigma = Vec::with_capacity(cfg.steps + 1);
    let mut gcp_series = Vec::with_capacity(cfg.steps + 1);
    let mut q_series = Vec::with_capacity(cfg.steps + 1);

    let distribution = match cfg.model {
        Model::Coherent => {
            let mut state = initial_state(ic, t_max)?;
            loop {
                sigma.push(sigma_of(&position_distribution(&state)));
                gcp_series.push(gcp(&state));
                q_series.push(interference_terms(&state));
                if state.t() == cfg.steps {
                    break position_distribution(&state);
                }
                state = step_pure(&state, &coin)?;
            }
        }
        Model::PhaseDamping { gamma } | Model::AmplitudeDamping { gamma } => {
            let ks = if matches!(cfg.model, Model::PhaseDamping { .. }) {
                phase_damping_kraus(gamma)?
            } else {
                amplitude_damping_kraus(gamma)?
            };
            let mut rho = from_pure(&initial_state(ic, t_max)?);
            loop {
                sigma.push(sigma_of(&density_distribution(&rho)));
                gcp_series.push(density_gcp(&rho));
                q_series.push(density_interference(&rho));
                if rho.t() == cfg.steps {
                    break density_distribution(&rho);
                }
                rho = step_channel(&rho, &coin, &ks)?;
            }
        }
        Model::UnitaryNoise { sigma_a } | Model::BrokenLinks { p: sigma_a } => {
            let model = match cfg.model {
                Model::UnitaryNoise { .. } => NoiseModel::UnitaryNoise { sigma_a },
                _ => NoiseModel::BrokenLinks { p: sigma_a },
            };
            let ensemble = monte_carlo(&McConfig {
                runs: cfg.runs.unwrap_or(1),
                steps: cfg.steps,
                model,
                initial_coin: ic,
                master_seed: cfg.master_seed,
            })?;
            sigma = ensemble.sigma.sigma;
            gcp_series = ensemble.gcp;
            q_series = ensemble.interference;
            ensemble.distribution
        }
    };

    Ok(RunReport {
        distribution,
        gcp_series,
        sigma_series: SigmaSeries::new(sigma),
        q_series,
        metadata: Metadata {
            config: cfg.clone(),
            wall_time_seconds: start.elapsed().as_secs_f64(),
        },
    })
}

/// Runs the experiment and writes `distribution.csv`, `sigma.csv`,
/// `gcp.csv` and `report.json` into the configured output directory.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunReport, RunError> {
    let report = simulate(cfg)?;
    write_outputs(&report, &cfg.output_dir)?;
    Ok(report)
}

/// Runs every configuration independently; a failing entry does not stop
/// the others.
pub fn sweep(cfgs: &[ExperimentConfig]) -> Vec<Result<RunReport, RunError>> {
    cfgs.iter().map(run_experiment).collect()
}

/// Fixed-width scientific notation with 12 significant digits.
pub fn fmt_value(x: f64) -> String {
    format!("{x:.11e}")
}

pub fn distribution_csv(dist: &PositionDistribution) -> String {
    let mut out = String::from("n,probability\n");
    for (n, p) in dist.iter() {
        writeln!(out, "{n},{}", fmt_value(p)).unwrap();
    }
    out
}

pub fn sigma_csv(series: &SigmaSeries) -> String {
    let mut out = String::from("t,sigma\n");
    for (t, s) in series.sigma.iter().enumerate() {
        writeln!(out, "{t},{}", fmt_value(*s)).unwrap();
    }
    out
}

pub fn gcp_csv(gcp: &[GcpVector], q: &[InterferenceTerms]) -> String {
    let mut out = String::from("t,P_L,P_S,P_R,Re_Q1,Re_Q2,Re_Q3\n");
    for (t, (g, q)) in gcp.iter().zip(q).enumerate() {
        writeln!(
            out,
            "{t},{},{},{},{},{},{}",
            fmt_value(g.p_l),
            fmt_value(g.p_s),
            fmt_value(g.p_r),
            fmt_value(q.q1.re),
            fmt_value(q.q2.re),
            fmt_value(q.q3.re)
        )
        .unwrap();
    }
    out
}

pub fn report_json(report: &RunReport) -> serde_json::Value {
    let cfg = &report.metadata.config;
    let (gamma, sigma_a, p) = match cfg.model {
        Model::PhaseDamping { gamma } | Model::AmplitudeDamping { gamma } => {
            (Some(gamma), None, None)
        }
        Model::UnitaryNoise { sigma_a } => (None, Some(sigma_a), None),
        Model::BrokenLinks { p } => (None, None, Some(p)),
        Model::Coherent => (None, None, None),
    };
    let dist = &report.distribution;
    let final_gcp = report.gcp_series.last().copied().unwrap_or_default();
    json!({
        "config": {
            "model": cfg.model.name(),
            "steps": cfg.steps,
            "gamma": gamma,
            "sigma_a": sigma_a,
            "p": p,
            "runs": cfg.runs,
            "initial_coin": cfg.initial_coin.to_string(),
            "master_seed": cfg.master_seed,
            "output_dir": cfg.output_dir.display().to_string(),
        },
        "seed": cfg.master_seed,
        "wall_time_seconds": report.metadata.wall_time_seconds,
        "summary": {
            "total_probability": dist.total(),
            "mean_position": dist.mean(),
            "sigma": sigma_of(dist),
            "origin_probability": dist.at(0),
            "gcp": [final_gcp.p_l, final_gcp.p_s, final_gcp.p_r],
        },
        "files": ["distribution.csv", "sigma.csv", "gcp.csv"],
    })
}

pub fn write_outputs(report: &RunReport, dir: &Path) -> Result<(), RunError> {
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| RunError::Io { path, source }
    };
    fs::create_dir_all(dir).map_err(io(dir))?;
    let files = [
        ("distribution.csv", distribution_csv(&report.distribution)),
        ("sigma.csv", sigma_csv(&report.sigma_series)),
        ("gcp.csv", gcp_csv(&report.gcp_series, &report.q_series)),
        (
            "report.json",
            serde_json::to_string_pretty(&report_json(report)).expect("json value serializes")
                + "\n",
        ),
    ];
    for (name, body) in files {
        let path = dir.join(name);
        fs::write(&path, body).map_err(io(&path))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;

    #[test]
    fn value_format_has_twelve_digits() {
        assert_eq!(fmt_value(5.0 / 18.0), "2.77777777778e-1");
        assert_eq!(fmt_value(0.0), "0.00000000000e0");
        assert_eq!(fmt_value(1.0), "1.00000000000e0");
    }

    #[test]
    fn density_capacity_limit() {
        let cfg = parse_config("model=phase_damping\ngamma=0.1\nsteps=5001").unwrap();
        let err = simulate(&cfg).unwrap_err();
        assert!(matches!(err, RunError::Capacity(_)));
        assert_eq!(err.exit_code(), 2);
        let ok = parse_config("model=phase_damping\ngamma=0.1\nsteps=5000").unwrap();
        assert!(check_capacity(&ok).is_ok());
        let pure = parse_config("model=coherent\nsteps=6000").unwrap();
        assert!(check_capacity(&pure).is_ok());
    }

    #[test]
    fn coherent_series_lengths() {
        let cfg = parse_config("model=coherent\nsteps=12").unwrap();
        let r = simulate(&cfg).unwrap();
        assert_eq!(r.sigma_series.len(), 13);
        assert_eq!(r.gcp_series.len(), 13);
        assert_eq!(r.q_series.len(), 13);
        assert_eq!(r.distribution.t(), 12);
        assert_eq!(r.sigma_series.at(0), 0.0);
        assert!((r.distribution.total() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn csv_layout() {
        let cfg = parse_config("model=coherent\nsteps=1").unwrap();
        let r = simulate(&cfg).unwrap();
        let csv = distribution_csv(&r.distribution);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "n,probability");
        assert_eq!(lines.len(), 1 + 5);
        assert_eq!(lines[1], "-2,0.00000000000e0");
        assert_eq!(lines[2], "-1,2.77777777778e-1");
        assert_eq!(lines[3], "0,4.44444444444e-1");
        assert!(csv.ends_with('\n'));
        let g = gcp_csv(&r.gcp_series, &r.q_series);
        assert!(g.starts_with(
            "t,P_L,P_S,P_R,Re_Q1,Re_Q2,Re_Q3\n0,5.00000000000e-1,0.00000000000e0,5.00000000000e-1,"
        ));
        assert_eq!(sigma_csv(&r.sigma_series).lines().count(), 3);
    }

    #[test]
    fn report_echoes_every_config_field() {
        let cfg = parse_config("model=broken_links\np=0.25\nsteps=5\nruns=3\nmaster_seed=9\ninitial_coin=nonlocalized\noutput_dir=x/y")
            .unwrap();
        let r = simulate(&cfg).unwrap();
        let j = report_json(&r);
        let c = &j["config"];
        assert_eq!(c["model"], "broken_links");
        assert_eq!(c["steps"], 5);
        assert_eq!(c["p"], 0.25);
        assert_eq!(c["runs"], 3);
        assert_eq!(c["master_seed"], 9);
        assert_eq!(c["initial_coin"], "nonlocalized");
        assert_eq!(c["output_dir"], "x/y");
        assert!(c["gamma"].is_null() && c["sigma_a"].is_null());
        assert_eq!(j["seed"], 9);
    }
}
