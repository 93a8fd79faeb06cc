//! Pure-state walk on the line.
//!
//! Sites `n ∈ [-t_max, t_max]` live at array offset `n + t_max`. Each site
//! carries a spinor `(a_n, b_n, c_n)` over the chirality states `(L, S, R)`.
//! A step applies the coin at every site and then moves `L` one site left,
//! keeps `S` in place and moves `R` one site right.

use num_complex::Complex64;

use crate::analysis::MarkovGcp;
use crate::coin::{grover_coin, CoinMatrix, Spinor};
use crate::{Error, Result};

const ZERO: Spinor = [Complex64::new(0.0, 0.0); 3];

#[derive(Debug, Clone, PartialEq)]
pub struct SpinorState {
    amplitudes: Vec<Spinor>,
    t: usize,
    t_max: usize,
}

/// Total probability of each chirality, summed over sites.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct GcpVector {
    pub p_l: f64,
    pub p_s: f64,
    pub p_r: f64,
}

impl GcpVector {
    pub fn new(p_l: f64, p_s: f64, p_r: f64) -> Self {
        Self { p_l, p_s, p_r }
    }

    pub fn uniform() -> Self {
        let third = 1.0 / 3.0;
        Self::new(third, third, third)
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.p_l, self.p_s, self.p_r]
    }

    pub fn from_array(p: [f64; 3]) -> Self {
        Self::new(p[0], p[1], p[2])
    }

    pub fn sum(&self) -> f64 {
        self.p_l + self.p_s + self.p_r
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.as_array()
            .iter()
            .zip(other.as_array())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Site-summed chirality cross products
/// `Q1 = Σ a_n b_n*`, `Q2 = Σ a_n c_n*`, `Q3 = Σ b_n c_n*`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct InterferenceTerms {
    pub q1: Complex64,
    pub q2: Complex64,
    pub q3: Complex64,
}

/// Probability of finding the walker at each site.
#[derive(Debug, Clone, PartialEq)]
pub struct PositionDistribution {
    probs: Vec<f64>,
    t: usize,
    t_max: usize,
}

impl PositionDistribution {
    /// Builds a distribution from per-site probabilities over `[-t_max, t_max]`.
    pub fn from_probs(probs: Vec<f64>, t: usize) -> Self {
        assert!(probs.len() % 2 == 1, "site range must be symmetric about 0");
        let t_max = probs.len() / 2;
        Self { probs, t, t_max }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn half_width(&self) -> usize {
        self.t_max
    }

    /// Probability at site `n`; zero outside the lattice.
    pub fn at(&self, n: i64) -> f64 {
        let idx = n + self.t_max as i64;
        if idx < 0 {
            return 0.0;
        }
        self.probs.get(idx as usize).copied().unwrap_or(0.0)
    }

    /// `(n, p_n)` pairs from `-t_max` to `t_max`.
    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        let off = self.t_max as i64;
        self.probs
            .iter()
            .enumerate()
            .map(move |(i, &p)| (i as i64 - off, p))
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn mean(&self) -> f64 {
        self.iter().map(|(n, p)| n as f64 * p).sum()
    }
}

impl SpinorState {
    pub fn t(&self) -> usize {
        self.t
    }

    pub fn t_max(&self) -> usize {
        self.t_max
    }

    pub fn amplitudes(&self) -> &[Spinor] {
        &self.amplitudes
    }

    /// Spinor at site `n`; zero outside the lattice.
    pub fn at(&self, n: i64) -> Spinor {
        let idx = n + self.t_max as i64;
        if idx < 0 {
            return ZERO;
        }
        self.amplitudes.get(idx as usize).copied().unwrap_or(ZERO)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes
            .iter()
            .flat_map(|s| s.iter())
            .map(|z| z.norm_sqr())
            .sum()
    }

    /// Sites that may carry amplitude at the current step.
    pub(crate) fn support(&self) -> std::ops::RangeInclusive<i64> {
        -(self.t as i64)..=self.t as i64
    }

    pub(crate) fn check_room(&self) -> Result<()> {
        if self.t + 1 > self.t_max {
            Err(Error::LightConeOverflow {
                next: self.t + 1,
                t_max: self.t_max,
            })
        } else {
            Ok(())
        }
    }

    /// Coin every occupied site, then shift. Edge `e_n` joins sites `n` and
    /// `n + 1`; when `intact(e_n)` is false the flux that would cross it is
    /// reflected into the opposite chirality of the same site.
    pub(crate) fn coin_and_shift(
        &self,
        coin: &CoinMatrix,
        intact: impl Fn(i64) -> bool,
    ) -> Result<Self> {
        self.check_room()?;
        let t = self.t as i64;
        let off = self.t_max as i64;

        // Coined spinors on the support window, zero-padded by two sites per side.
        let mut coined = vec![ZERO; (2 * t + 5) as usize];
        for n in -t..=t {
            coined[(n + t + 2) as usize] = coin.apply(&self.amplitudes[(n + off) as usize]);
        }
        let w = |n: i64| coined[(n + t + 2) as usize];

        let mut amplitudes = vec![ZERO; self.amplitudes.len()];
        for n in -(t + 1)..=(t + 1) {
            let here = w(n);
            let a = if intact(n) { w(n + 1)[0] } else { here[2] };
            let b = here[1];
            let c = if intact(n - 1) { w(n - 1)[2] } else { here[0] };
            amplitudes[(n + off) as usize] = [a, b, c];
        }

        Ok(Self {
            amplitudes,
            t: self.t + 1,
            t_max: self.t_max,
        })
    }
}

/// Walker localized at site 0 with the given chirality amplitudes.
pub fn initial_state(coin_amplitudes: Spinor, t_max: usize) -> Result<SpinorState> {
    if t_max < 1 {
        return Err(Error::LatticeTooSmall(t_max));
    }
    let norm: f64 = coin_amplitudes.iter().map(|z| z.norm_sqr()).sum();
    let defect = (norm.sqrt() - 1.0).abs();
    if !(defect <= 1e-9) {
        return Err(Error::NotNormalized { defect });
    }
    let mut amplitudes = vec![ZERO; 2 * t_max + 1];
    amplitudes[t_max] = coin_amplitudes;
    Ok(SpinorState {
        amplitudes,
        t: 0,
        t_max,
    })
}

/// `(i, 0, 1)/√2`, the chirality state whose walk keeps a peak at the origin.
pub fn localized_coin() -> Spinor {
    let s = 1.0 / 2f64.sqrt();
    [
        Complex64::new(0.0, s),
        Complex64::new(0.0, 0.0),
        Complex64::new(s, 0.0),
    ]
}

/// `(1, -2, 1)/√6`, a chirality state whose walk does not localize.
pub fn nonlocalized_coin() -> Spinor {
    let s = 1.0 / 6f64.sqrt();
    [
        Complex64::new(s, 0.0),
        Complex64::new(-2.0 * s, 0.0),
        Complex64::new(s, 0.0),
    ]
}

pub fn step_pure(state: &SpinorState, coin: &CoinMatrix) -> Result<SpinorState> {
    state.coin_and_shift(coin, |_| true)
}

pub fn evolve_pure(state: &SpinorState, steps: usize, coin: &CoinMatrix) -> Result<SpinorState> {
    if state.t + steps > state.t_max {
        return Err(Error::LightConeOverflow {
            next: state.t + steps,
            t_max: state.t_max,
        });
    }
    let mut s = state.clone();
    for _ in 0..steps {
        s = step_pure(&s, coin)?;
    }
    Ok(s)
}

pub fn position_distribution(state: &SpinorState) -> PositionDistribution {
    let probs = state
        .amplitudes
        .iter()
        .map(|s| s[0].norm_sqr() + s[1].norm_sqr() + s[2].norm_sqr())
        .collect();
    PositionDistribution {
        probs,
        t: state.t,
        t_max: state.t_max,
    }
}

pub fn gcp(state: &SpinorState) -> GcpVector {
    let mut g = GcpVector::default();
    for s in &state.amplitudes {
        g.p_l += s[0].norm_sqr();
        g.p_s += s[1].norm_sqr();
        g.p_r += s[2].norm_sqr();
    }
    g
}

pub fn interference_terms(state: &SpinorState) -> InterferenceTerms {
    let mut q = InterferenceTerms::default();
    for [a, b, c] in &state.amplitudes {
        q.q1 += a * b.conj();
        q.q2 += a * c.conj();
        q.q3 += b * c.conj();
    }
    q
}

/// Chirality totals one step ahead predicted from the current totals and the
/// real parts of the interference sums (Grover coin only).
pub fn gcp_prediction(g: &GcpVector, q: &InterferenceTerms) -> GcpVector {
    let base = MarkovGcp::grover().apply(g);
    let (r1, r2, r3) = (q.q1.re / 9.0, q.q2.re / 9.0, q.q3.re / 9.0);
    GcpVector::new(
        base.p_l - 4.0 * r1 - 4.0 * r2 + 8.0 * r3,
        base.p_s - 4.0 * r1 + 8.0 * r2 - 4.0 * r3,
        base.p_r + 8.0 * r1 - 4.0 * r2 - 4.0 * r3,
    )
}

/// Largest discrepancy between the chirality totals of the evolved state and
/// the closed-form prediction from [`gcp_prediction`].
pub fn gcp_step_identity_check(state: &SpinorState, coin: &CoinMatrix) -> Result<f64> {
    if coin.max_abs_diff(&grover_coin()) > 1e-15 {
        return Err(Error::NotGroverCoin);
    }
    let predicted = gcp_prediction(&gcp(state), &interference_terms(state));
    let evolved = gcp(&step_pure(state, coin)?);
    Ok(predicted.max_abs_diff(&evolved))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-15
    }

    #[test]
    fn initial_state_validation() {
        assert!(matches!(
            initial_state([c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)], 5),
            Err(Error::NotNormalized { .. })
        ));
        assert_eq!(
            initial_state(localized_coin(), 0),
            Err(Error::LatticeTooSmall(0))
        );
        let s = initial_state([c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)], 3).unwrap();
        assert_eq!(s.t(), 0);
        assert!((s.norm_sqr() - 1.0).abs() < 1e-15);
        assert_eq!(s.at(0), [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
    }

    #[test]
    fn named_initial_coins() {
        let s = 1.0 / 2f64.sqrt();
        assert_eq!(localized_coin(), [c(0.0, s), c(0.0, 0.0), c(s, 0.0)]);
        let u = 1.0 / 6f64.sqrt();
        assert_eq!(
            nonlocalized_coin(),
            [c(u, 0.0), c(-2.0 * u, 0.0), c(u, 0.0)]
        );
    }

    #[test]
    fn one_step_from_localized_coin() {
        let s0 = initial_state(localized_coin(), 4).unwrap();
        let s1 = step_pure(&s0, &grover_coin()).unwrap();
        let k = 1.0 / (3.0 * 2f64.sqrt());
        assert!(close(s1.at(-1)[0], c(2.0 * k, -k)));
        assert!(close(s1.at(0)[1], c(2.0 * k, 2.0 * k)));
        assert!(close(s1.at(1)[2], c(-k, 2.0 * k)));

        let d = position_distribution(&s1);
        assert!((d.at(-1) - 5.0 / 18.0).abs() < 1e-15);
        assert!((d.at(0) - 8.0 / 18.0).abs() < 1e-15);
        assert!((d.at(1) - 5.0 / 18.0).abs() < 1e-15);
        assert_eq!(d.at(2), 0.0);
    }

    #[test]
    fn identity_coin_keeps_stay_component() {
        let mut s = initial_state([c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)], 10).unwrap();
        for _ in 0..10 {
            s = step_pure(&s, &CoinMatrix::identity()).unwrap();
            assert_eq!(s.at(0), [c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        }
    }

    #[test]
    fn overflow_is_reported() {
        let s = initial_state(localized_coin(), 2).unwrap();
        let s = evolve_pure(&s, 2, &grover_coin()).unwrap();
        assert_eq!(
            step_pure(&s, &grover_coin()),
            Err(Error::LightConeOverflow { next: 3, t_max: 2 })
        );
        let s0 = initial_state(localized_coin(), 2).unwrap();
        assert!(evolve_pure(&s0, 3, &grover_coin()).is_err());
    }

    #[test]
    fn evolve_composes_steps() {
        let s0 = initial_state(nonlocalized_coin(), 5).unwrap();
        assert_eq!(evolve_pure(&s0, 0, &grover_coin()).unwrap(), s0);
        let twice = step_pure(&step_pure(&s0, &grover_coin()).unwrap(), &grover_coin()).unwrap();
        assert_eq!(evolve_pure(&s0, 2, &grover_coin()).unwrap(), twice);
    }

    #[test]
    fn chirality_totals_of_named_coins() {
        let g = gcp(&initial_state(localized_coin(), 1).unwrap());
        assert!(g.max_abs_diff(&GcpVector::new(0.5, 0.0, 0.5)) < 1e-15);
        let g = gcp(&initial_state(nonlocalized_coin(), 1).unwrap());
        assert!(g.max_abs_diff(&GcpVector::new(1.0 / 6.0, 4.0 / 6.0, 1.0 / 6.0)) < 1e-15);
        assert!((g.sum() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn interference_of_named_coins() {
        let q = interference_terms(&initial_state(nonlocalized_coin(), 1).unwrap());
        assert!(close(q.q1, c(-1.0 / 3.0, 0.0)));
        assert!(close(q.q2, c(1.0 / 6.0, 0.0)));
        assert!(close(q.q3, c(-1.0 / 3.0, 0.0)));

        let q =
            interference_terms(&initial_state([c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)], 1).unwrap());
        assert_eq!(q, InterferenceTerms::default());

        let q = interference_terms(&initial_state(localized_coin(), 1).unwrap());
        assert!(close(q.q1, c(0.0, 0.0)));
        assert!(close(q.q2, c(0.0, 0.5)));
        assert!(close(q.q3, c(0.0, 0.0)));
    }

    #[test]
    fn identity_check_rejects_other_coins() {
        let s = initial_state(localized_coin(), 3).unwrap();
        assert_eq!(
            gcp_step_identity_check(&s, &CoinMatrix::identity()),
            Err(Error::NotGroverCoin)
        );
    }

    #[test]
    fn identity_check_along_trajectories() {
        let coin = grover_coin();
        for ic in [localized_coin(), nonlocalized_coin()] {
            let mut s = initial_state(ic, 101).unwrap();
            for _ in 0..100 {
                assert!(gcp_step_identity_check(&s, &coin).unwrap() < 1e-10);
                s = step_pure(&s, &coin).unwrap();
            }
        }
    }

    #[test]
    fn no_interference_means_markov_step() {
        let s = initial_state([c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)], 2).unwrap();
        let next = gcp(&step_pure(&s, &grover_coin()).unwrap());
        assert!(next.max_abs_diff(&GcpVector::new(1.0 / 9.0, 4.0 / 9.0, 4.0 / 9.0)) < 1e-15);
        assert!(next.max_abs_diff(&MarkovGcp::grover().apply(&gcp(&s))) < 1e-15);
    }
}
