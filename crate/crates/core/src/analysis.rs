//! Spreading statistics and classical reference models.

use crate::walk::{GcpVector, PositionDistribution};
use crate::{Error, Result};

/// Standard deviation of position, indexed by step.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SigmaSeries {
    pub sigma: Vec<f64>,
}

impl SigmaSeries {
    pub fn new(sigma: Vec<f64>) -> Self {
        Self { sigma }
    }

    pub fn len(&self) -> usize {
        self.sigma.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sigma.is_empty()
    }

    pub fn at(&self, t: usize) -> f64 {
        self.sigma[t]
    }

    /// Least-squares line through `(t, σ(t))` for `t` in `range`.
    pub fn fit(&self, range: std::ops::RangeInclusive<usize>) -> LinearFit {
        let xs: Vec<f64> = range.clone().map(|t| t as f64).collect();
        let ys: Vec<f64> = range.map(|t| self.sigma[t]).collect();
        linear_fit(&xs, &ys)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub fn linear_fit(xs: &[f64], ys: &[f64]) -> LinearFit {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let r_squared = if syy > 0.0 {
        sxy * sxy / (sxx * syy)
    } else {
        1.0
    };
    LinearFit {
        slope,
        intercept: my - slope * mx,
        r_squared,
    }
}

/// The chirality-total map of the Grover walk once interference vanishes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarkovGcp {
    pub matrix: [[f64; 3]; 3],
}

impl MarkovGcp {
    pub fn grover() -> Self {
        let (d, o) = (1.0 / 9.0, 4.0 / 9.0);
        Self {
            matrix: [[d, o, o], [o, d, o], [o, o, d]],
        }
    }

    pub fn apply(&self, g: &GcpVector) -> GcpVector {
        let p = g.as_array();
        let m = &self.matrix;
        GcpVector::from_array(std::array::from_fn(|i| {
            m[i][0] * p[0] + m[i][1] * p[1] + m[i][2] * p[2]
        }))
    }
}

pub fn markov_gcp_step(g: &GcpVector) -> GcpVector {
    MarkovGcp::grover().apply(g)
}

pub fn sigma_of(dist: &PositionDistribution) -> f64 {
    let mut m1 = 0.0;
    let mut m2 = 0.0;
    for (n, p) in dist.iter() {
        let x = n as f64;
        m1 += x * p;
        m2 += x * x * p;
    }
    (m2 - m1 * m1).max(0.0).sqrt()
}

/// Discrete Gaussian on the same sites with the input's mean and variance.
pub fn gaussian_comparator(dist: &PositionDistribution) -> Result<PositionDistribution> {
    let sigma = sigma_of(dist);
    if !(sigma > 0.0) {
        return Err(Error::ZeroSpread);
    }
    let mean = dist.mean();
    let mut probs: Vec<f64> = dist
        .iter()
        .map(|(n, _)| (-(n as f64 - mean).powi(2) / (2.0 * sigma * sigma)).exp())
        .collect();
    let total: f64 = probs.iter().sum();
    probs.iter_mut().for_each(|p| *p /= total);
    Ok(PositionDistribution::from_probs(probs, dist.t()))
}

/// `½ Σ |p_n − q_n|`.
pub fn tv_distance(p: &PositionDistribution, q: &PositionDistribution) -> Result<f64> {
    if p.half_width() != q.half_width() {
        return Err(Error::RangeMismatch {
            left: p.half_width(),
            right: q.half_width(),
        });
    }
    Ok(0.5
        * p.probs()
            .iter()
            .zip(q.probs())
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>())
}

/// Early spreading rate and the broken-link crossover time `1 / (p α)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransitionEstimate {
    pub t_c: f64,
    pub alpha_hat: f64,
}

const EARLY_START: usize = 5;
const EARLY_END: usize = 20;

/// Fits the ballistic rate on `t ∈ [5, min(20, len − 1)]` and converts it to
/// a crossover time for link-breaking probability `p`.
pub fn estimate_transition(series: &SigmaSeries, p: f64) -> Result<TransitionEstimate> {
    if series.len() < 20 {
        return Err(Error::SeriesTooShort {
            needed: 20,
            got: series.len(),
        });
    }
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::ProbabilityOutOfRange(p));
    }
    let end = EARLY_END.min(series.len() - 1);
    let alpha_hat = series.fit(EARLY_START..=end).slope;
    if !(alpha_hat > 0.0) {
        return Err(Error::DegenerateSlope);
    }
    Ok(TransitionEstimate {
        t_c: 1.0 / (p * alpha_hat),
        alpha_hat,
    })
}
