//! Mixed-state evolution on the joint position ⊗ chirality space.
//!
//! The basis is position-major: index `3 (n + t_max) + x` for site `n` and
//! chirality `x ∈ {L, S, R}`. One channel step is the coin+shift unitary
//! followed by a chirality-only Kraus map `Σ (I⊗Ej) ρ (I⊗Ej)†`. Neither
//! operator is materialized; both act on 3×3 blocks.

use num_complex::Complex64;
#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::coin::{CoinMatrix, KrausSet};
use crate::walk::{GcpVector, InterferenceTerms, PositionDistribution, SpinorState};
use crate::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Shift of each chirality under one step: L moves left, R moves right.
const DISPLACEMENT: [i64; 3] = [-1, 0, 1];

#[derive(Debug, Clone, PartialEq)]
pub struct JointDensity {
    entries: Vec<Complex64>,
    dim: usize,
    t: usize,
    t_max: usize,
}

impl JointDensity {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn t_max(&self) -> usize {
        self.t_max
    }

    #[inline]
    pub fn index(&self, n: i64, chirality: usize) -> usize {
        3 * (n + self.t_max as i64) as usize + chirality
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    /// 3×3 chirality block between sites `m` (rows) and `n` (columns).
    pub fn block(&self, m: i64, n: i64) -> CoinMatrix {
        let (r0, c0) = (self.index(m, 0), self.index(n, 0));
        CoinMatrix(std::array::from_fn(|x| {
            std::array::from_fn(|y| self.get(r0 + x, c0 + y))
        }))
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// `Tr ρ²`, computed as `Σ |ρij|²` (valid for Hermitian ρ).
    pub fn purity(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn hermitian_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    pub fn min_diagonal(&self) -> f64 {
        (0..self.dim)
            .map(|i| self.get(i, i).re)
            .fold(f64::INFINITY, f64::min)
    }

    fn check_room(&self) -> Result<()> {
        if self.t + 1 > self.t_max {
            Err(Error::LightConeOverflow {
                next: self.t + 1,
                t_max: self.t_max,
            })
        } else {
            Ok(())
        }
    }

    /// Applies `f` to every block in the current support window, in place.
    fn map_blocks(&mut self, f: impl Fn(&CoinMatrix) -> CoinMatrix + Sync) {
        let dim = self.dim;
        let t = self.t as i64;
        let off = self.t_max as i64;
        let lo = 3 * (off - t) as usize;
        let hi = 3 * (off + t + 1) as usize;
        let block_rows = &mut self.entries[lo * dim..hi * dim];

        let work = |rows: &mut [Complex64]| {
            for c0 in (lo..hi).step_by(3) {
                let b = CoinMatrix(std::array::from_fn(|x| {
                    std::array::from_fn(|y| rows[x * dim + c0 + y])
                }));
                let out = f(&b);
                for x in 0..3 {
                    for y in 0..3 {
                        rows[x * dim + c0 + y] = out.0[x][y];
                    }
                }
            }
        };

        #[cfg(feature = "parallel")]
        block_rows.par_chunks_mut(3 * dim).for_each(work);
        #[cfg(not(feature = "parallel"))]
        block_rows.chunks_mut(3 * dim).for_each(work);
    }
}

/// `|ψ⟩⟨ψ|`.
pub fn from_pure(state: &SpinorState) -> JointDensity {
    let psi: Vec<Complex64> = state
        .amplitudes()
        .iter()
        .flat_map(|s| s.iter().copied())
        .collect();
    let dim = psi.len();
    let mut entries = vec![ZERO; dim * dim];
    for (i, a) in psi.iter().enumerate() {
        if *a == ZERO {
            continue;
        }
        for (j, b) in psi.iter().enumerate() {
            entries[i * dim + j] = a * b.conj();
        }
    }
    JointDensity {
        entries,
        dim,
        t: state.t(),
        t_max: state.t_max(),
    }
}

/// `ρ ↦ U ρ U†` for the coin+shift step `U = Sh (C ⊗ I)`.
pub fn apply_unitary_step(rho: &JointDensity, coin: &CoinMatrix) -> Result<JointDensity> {
    rho.check_room()?;
    let mut coined = rho.clone();
    let coin_adj = coin.adjoint();
    coined.map_blocks(|b| *coin * *b * coin_adj);

    // Gather: output (m', x) reads from source site m' - shift(x).
    let dim = rho.dim;
    let off = rho.t_max as i64;
    let t_next = rho.t as i64 + 1;
    let mut entries = vec![ZERO; dim * dim];
    let src = &coined.entries;

    let fill_row = |i_out: usize, row: &mut [Complex64]| {
        let m_out = (i_out / 3) as i64 - off;
        let x = i_out % 3;
        let m_src = m_out - DISPLACEMENT[x];
        if m_out.abs() > t_next || m_src.abs() > t_next - 1 {
            return;
        }
        let i_src = 3 * (m_src + off) as usize + x;
        let src_row = &src[i_src * dim..(i_src + 1) * dim];
        for n_out in -t_next..=t_next {
            for (y, d) in DISPLACEMENT.iter().enumerate() {
                let n_src = n_out - d;
                if n_src.abs() > t_next - 1 {
                    continue;
                }
                row[3 * (n_out + off) as usize + y] = src_row[3 * (n_src + off) as usize + y];
            }
        }
    };

    #[cfg(feature = "parallel")]
    entries
        .par_chunks_mut(dim)
        .enumerate()
        .for_each(|(i, row)| fill_row(i, row));
    #[cfg(not(feature = "parallel"))]
    entries
        .chunks_mut(dim)
        .enumerate()
        .for_each(|(i, row)| fill_row(i, row));

    Ok(JointDensity {
        entries,
        dim,
        t: rho.t + 1,
        t_max: rho.t_max,
    })
}

/// `ρ ↦ Σj (I⊗Ej) ρ (I⊗Ej)†`.
pub fn apply_kraus(rho: &JointDensity, ks: &KrausSet) -> JointDensity {
    let mut out = rho.clone();
    out.map_blocks(|b| ks.apply(b));
    out
}

/// One unitary step followed by the Kraus map.
pub fn step_channel(rho: &JointDensity, coin: &CoinMatrix, ks: &KrausSet) -> Result<JointDensity> {
    let mut next = apply_unitary_step(rho, coin)?;
    next.map_blocks(|b| ks.apply(b));
    Ok(next)
}

pub fn evolve_channel(
    rho: &JointDensity,
    steps: usize,
    coin: &CoinMatrix,
    ks: &KrausSet,
) -> Result<JointDensity> {
    if rho.t + steps > rho.t_max {
        return Err(Error::LightConeOverflow {
            next: rho.t + steps,
            t_max: rho.t_max,
        });
    }
    let mut r = rho.clone();
    for _ in 0..steps {
        r = step_channel(&r, coin, ks)?;
    }
    Ok(r)
}

pub fn density_distribution(rho: &JointDensity) -> PositionDistribution {
    let sites = rho.dim / 3;
    let probs = (0..sites)
        .map(|s| (0..3).map(|x| rho.get(3 * s + x, 3 * s + x).re).sum())
        .collect();
    PositionDistribution::from_probs(probs, rho.t)
}

pub fn density_gcp(rho: &JointDensity) -> GcpVector {
    let mut p = [0.0; 3];
    for s in 0..rho.dim / 3 {
        for (x, acc) in p.iter_mut().enumerate() {
            *acc += rho.get(3 * s + x, 3 * s + x).re;
        }
    }
    GcpVector::from_array(p)
}

/// Interference sums read off the within-site coherences of ρ.
pub fn density_interference(rho: &JointDensity) -> InterferenceTerms {
    let mut q = InterferenceTerms::default();
    for s in 0..rho.dim / 3 {
        let i = 3 * s;
        q.q1 += rho.get(i, i + 1);
        q.q2 += rho.get(i, i + 2);
        q.q3 += rho.get(i + 1, i + 2);
    }
    q
}
