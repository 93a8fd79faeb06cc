//! Trajectory-level decoherence: random coin rotations and randomly broken
//! links, resampled every step, averaged over seeded Monte Carlo runs.

use std::ops::{Range, RangeInclusive};

use num_complex::Complex64;
#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::analysis::{sigma_of, SigmaSeries};
use crate::coin::{grover_coin, sample_noise_rotation, CoinMatrix, NoiseGenerator, Spinor};
pub use crate::rng::RngStream;
use crate::walk::{
    gcp, initial_state, interference_terms, position_distribution, GcpVector, InterferenceTerms,
    PositionDistribution, SpinorState,
};
use crate::{Error, Result};

/// Default ensemble sizes.
pub const DEFAULT_UNITARY_NOISE_RUNS: usize = 400;
pub const DEFAULT_BROKEN_LINK_RUNS: usize = 1000;

/// Broken edges for one step. Edge `e_n` joins sites `n` and `n + 1`, with
/// `n ∈ [-t_max, t_max - 1]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinkConfig {
    t_max: usize,
    broken: Vec<bool>,
}

impl LinkConfig {
    /// All links intact.
    pub fn intact(t_max: usize) -> Self {
        Self {
            t_max,
            broken: vec![false; 2 * t_max],
        }
    }

    pub fn t_max(&self) -> usize {
        self.t_max
    }

    fn slot(&self, edge: i64) -> Option<usize> {
        let idx = edge + self.t_max as i64;
        (idx >= 0 && (idx as usize) < self.broken.len()).then_some(idx as usize)
    }

    pub fn is_broken(&self, edge: i64) -> bool {
        self.slot(edge).is_some_and(|i| self.broken[i])
    }

    /// Marks `edge` broken. Panics if the edge is outside the lattice.
    pub fn set_broken(&mut self, edge: i64) {
        let i = self.slot(edge).expect("edge outside lattice");
        self.broken[i] = true;
    }

    pub fn broken_edges(&self) -> Vec<i64> {
        let off = self.t_max as i64;
        self.broken
            .iter()
            .enumerate()
            .filter(|(_, b)| **b)
            .map(|(i, _)| i as i64 - off)
            .collect()
    }
}

/// Breaks each edge touching `sites` independently with probability `p`.
/// Draws exactly one uniform per candidate edge, in ascending edge order.
pub fn sample_links(
    p: f64,
    sites: RangeInclusive<i64>,
    t_max: usize,
    rng: &mut RngStream,
) -> Result<LinkConfig> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::ProbabilityOutOfRange(p));
    }
    let mut links = LinkConfig::intact(t_max);
    let lo = (sites.start() - 1).max(-(t_max as i64));
    let hi = (*sites.end()).min(t_max as i64 - 1);
    for e in lo..=hi {
        if rng.bernoulli(p) {
            links.set_broken(e);
        }
    }
    Ok(links)
}

/// Grover step on a lattice with broken links. An intact link behaves as in
/// the regular walk; a broken one reflects the outgoing flux into the
/// opposite chirality at the same site, which keeps the step unitary.
pub fn step_broken(state: &SpinorState, links: &LinkConfig) -> Result<SpinorState> {
    state.coin_and_shift(&grover_coin(), |e| !links.is_broken(e))
}

/// Step with the coin `C · exp(i a(t))` for a freshly sampled `a(t)`.
pub fn step_noisy(
    state: &SpinorState,
    coin: &CoinMatrix,
    gen: &NoiseGenerator,
    rng: &mut RngStream,
) -> Result<SpinorState> {
    let rotation = sample_noise_rotation(gen, rng);
    state.coin_and_shift(&(*coin * rotation), |_| true)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseModel {
    UnitaryNoise { sigma_a: f64 },
    BrokenLinks { p: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct McConfig {
    pub runs: usize,
    pub steps: usize,
    pub model: NoiseModel,
    pub initial_coin: Spinor,
    pub master_seed: u64,
}

impl McConfig {
    pub fn validate(&self) -> Result<()> {
        if self.runs == 0 {
            return Err(Error::ZeroCount("runs"));
        }
        if self.steps == 0 {
            return Err(Error::ZeroCount("steps"));
        }
        match self.model {
            NoiseModel::UnitaryNoise { sigma_a } => {
                NoiseGenerator::new(sigma_a)?;
            }
            NoiseModel::BrokenLinks { p } => {
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::ProbabilityOutOfRange(p));
                }
            }
        }
        initial_state(self.initial_coin, 1).map(|_| ())
    }
}

/// Observables recorded along one trajectory; series are indexed by
/// `t = 0..=steps`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub distribution: PositionDistribution,
    pub sigma: SigmaSeries,
    pub gcp: Vec<GcpVector>,
    pub interference: Vec<InterferenceTerms>,
    pub max_norm_drift: f64,
}

/// Pointwise means over an ensemble of trajectories.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    pub runs: usize,
    pub distribution: PositionDistribution,
    pub sigma: SigmaSeries,
    pub gcp: Vec<GcpVector>,
    pub interference: Vec<InterferenceTerms>,
    pub max_norm_drift: f64,
}

struct Recorder {
    sigma: Vec<f64>,
    gcp: Vec<GcpVector>,
    interference: Vec<InterferenceTerms>,
    max_norm_drift: f64,
}

impl Recorder {
    fn new(steps: usize) -> Self {
        Self {
            sigma: Vec::with_capacity(steps + 1),
            gcp: Vec::with_capacity(steps + 1),
            interference: Vec::with_capacity(steps + 1),
            max_norm_drift: 0.0,
        }
    }

    fn record(&mut self, state: &SpinorState) {
        let dist = position_distribution(state);
        self.max_norm_drift = self.max_norm_drift.max((dist.total() - 1.0).abs());
        self.sigma.push(sigma_of(&dist));
        self.gcp.push(gcp(state));
        self.interference.push(interference_terms(state));
    }
}

/// Evolves trajectory `run_index` of the ensemble; its random stream is
/// `(master_seed, run_index)`.
pub fn run_trajectory(cfg: &McConfig, run_index: u64) -> Result<Trajectory> {
    cfg.validate()?;
    let t_max = cfg.steps + 1;
    let mut rng = RngStream::new(cfg.master_seed, run_index);
    let mut state = initial_state(cfg.initial_coin, t_max)?;
    let mut rec = Recorder::new(cfg.steps);
    rec.record(&state);

    let coin = grover_coin();
    for _ in 0..cfg.steps {
        state = match cfg.model {
            NoiseModel::BrokenLinks { p } => {
                let links = sample_links(p, state.support(), t_max, &mut rng)?;
                step_broken(&state, &links)?
            }
            NoiseModel::UnitaryNoise { sigma_a } => {
                step_noisy(&state, &coin, &NoiseGenerator::new(sigma_a)?, &mut rng)?
            }
        };
        rec.record(&state);
    }

    Ok(Trajectory {
        distribution: position_distribution(&state),
        sigma: SigmaSeries::new(rec.sigma),
        gcp: rec.gcp,
        interference: rec.interference,
        max_norm_drift: rec.max_norm_drift,
    })
}

/// Ensemble average over runs `0..cfg.runs`.
pub fn monte_carlo(cfg: &McConfig) -> Result<Ensemble> {
    monte_carlo_runs(cfg, 0..cfg.runs as u64, true)
}

/// Ensemble average over the given run indices. Trajectories may be computed
/// in parallel; the reduction always sums in run-index order, so the result
/// does not depend on scheduling.
pub fn monte_carlo_runs(cfg: &McConfig, runs: Range<u64>, parallel: bool) -> Result<Ensemble> {
    cfg.validate()?;
    if runs.is_empty() {
        return Err(Error::ZeroCount("runs"));
    }
    let trajectories: Vec<Trajectory> = if parallel {
        collect_parallel(cfg, runs)?
    } else {
        runs.map(|k| run_trajectory(cfg, k))
            .collect::<Result<_>>()?
    };
    Ok(average(&trajectories))
}

#[cfg(feature = "parallel")]
fn collect_parallel(cfg: &McConfig, runs: Range<u64>) -> Result<Vec<Trajectory>> {
    runs.into_par_iter()
        .map(|k| run_trajectory(cfg, k))
        .collect()
}

#[cfg(not(feature = "parallel"))]
fn collect_parallel(cfg: &McConfig, runs: Range<u64>) -> Result<Vec<Trajectory>> {
    runs.map(|k| run_trajectory(cfg, k)).collect()
}

fn average(trajectories: &[Trajectory]) -> Ensemble {
    let first = &trajectories[0];
    let n = trajectories.len() as f64;
    let len = first.sigma.len();

    let mut probs = vec![0.0; first.distribution.probs().len()];
    let mut sigma = vec![0.0; len];
    let mut gcp_acc = vec![[0.0; 3]; len];
    let mut q_acc = vec![InterferenceTerms::default(); len];
    let mut drift = 0.0f64;

    for tr in trajectories {
        for (acc, p) in probs.iter_mut().zip(tr.distribution.probs()) {
            *acc += p;
        }
        for t in 0..len {
            sigma[t] += tr.sigma.sigma[t];
            let g = tr.gcp[t].as_array();
            for x in 0..3 {
                gcp_acc[t][x] += g[x];
            }
            q_acc[t].q1 += tr.interference[t].q1;
            q_acc[t].q2 += tr.interference[t].q2;
            q_acc[t].q3 += tr.interference[t].q3;
        }
        drift = drift.max(tr.max_norm_drift);
    }

    let scale = Complex64::new(1.0 / n, 0.0);
    Ensemble {
        runs: trajectories.len(),
        distribution: PositionDistribution::from_probs(
            probs.into_iter().map(|p| p / n).collect(),
            first.distribution.t(),
        ),
        sigma: SigmaSeries::new(sigma.into_iter().map(|s| s / n).collect()),
        gcp: gcp_acc
            .into_iter()
            .map(|g| GcpVector::from_array(g.map(|x| x / n)))
            .collect(),
        interference: q_acc
            .into_iter()
            .map(|q| InterferenceTerms {
                q1: q.q1 * scale,
                q2: q.q2 * scale,
                q3: q.q3 * scale,
            })
            .collect(),
        max_norm_drift: drift,
    }
}
