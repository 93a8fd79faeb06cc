//! Chirality-space algebra: 3×3 complex matrices acting on the (L, S, R) coin.

use std::f64::consts::PI;
use std::ops::{Add, Mul};

use num_complex::Complex64;

use crate::rng::RngStream;
use crate::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Complex 3-vector of chirality amplitudes `(L, S, R)`.
pub type Spinor = [Complex64; 3];

/// A 3×3 complex matrix on the chirality space, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoinMatrix(pub [[Complex64; 3]; 3]);

impl CoinMatrix {
    pub const fn zero() -> Self {
        Self([[ZERO; 3]; 3])
    }

    pub const fn identity() -> Self {
        Self([[ONE, ZERO, ZERO], [ZERO, ONE, ZERO], [ZERO, ZERO, ONE]])
    }

    pub fn from_real(rows: [[f64; 3]; 3]) -> Self {
        Self(rows.map(|r| r.map(|x| Complex64::new(x, 0.0))))
    }

    pub fn diag(d: [Complex64; 3]) -> Self {
        let mut m = Self::zero();
        for (i, x) in d.into_iter().enumerate() {
            m.0[i][i] = x;
        }
        m
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.0[row][col]
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zero();
        for i in 0..3 {
            for j in 0..3 {
                out.0[i][j] = self.0[j][i].conj();
            }
        }
        out
    }

    pub fn scale(&self, k: Complex64) -> Self {
        Self(self.0.map(|r| r.map(|x| x * k)))
    }

    pub fn trace(&self) -> Complex64 {
        self.0[0][0] + self.0[1][1] + self.0[2][2]
    }

    /// Matrix-vector product `M v`.
    #[inline]
    pub fn apply(&self, v: &Spinor) -> Spinor {
        let m = &self.0;
        [
            m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
            m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
            m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
        ]
    }

    /// Largest elementwise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..3 {
            for j in 0..3 {
                worst = worst.max((self.0[i][j] - other.0[i][j]).norm());
            }
        }
        worst
    }

    /// Elementwise defect of `M = M†`.
    pub fn hermitian_defect(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    /// Elementwise defect of `M†M = I`.
    pub fn unitary_defect(&self) -> f64 {
        (self.adjoint() * *self).max_abs_diff(&Self::identity())
    }

    pub fn is_finite(&self) -> bool {
        self.0
            .iter()
            .flatten()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl Mul for CoinMatrix {
    type Output = CoinMatrix;

    fn mul(self, rhs: CoinMatrix) -> CoinMatrix {
        let mut out = CoinMatrix::zero();
        for i in 0..3 {
            for j in 0..3 {
                out.0[i][j] = self.0[i][0] * rhs.0[0][j]
                    + self.0[i][1] * rhs.0[1][j]
                    + self.0[i][2] * rhs.0[2][j];
            }
        }
        out
    }
}

impl Add for CoinMatrix {
    type Output = CoinMatrix;

    fn add(self, rhs: CoinMatrix) -> CoinMatrix {
        let mut out = self;
        for i in 0..3 {
            for j in 0..3 {
                out.0[i][j] += rhs.0[i][j];
            }
        }
        out
    }
}

/// The Grover coin `(1/3)[[-1,2,2],[2,-1,2],[2,2,-1]]`.
pub fn grover_coin() -> CoinMatrix {
    let third = 1.0 / 3.0;
    let d = -third;
    let o = 2.0 * third;
    CoinMatrix::from_real([[d, o, o], [o, d, o], [o, o, d]])
}

/// The eight Gell-Mann matrices `λ1..λ8` in the usual particle-physics
/// convention, normalized so that `Tr(λi λj) = 2 δij`.
pub fn gellmann_basis() -> [CoinMatrix; 8] {
    let i = Complex64::i();
    let r = |x: f64| Complex64::new(x, 0.0);
    let mut l = [CoinMatrix::zero(); 8];

    l[0].0[0][1] = ONE;
    l[0].0[1][0] = ONE;

    l[1].0[0][1] = -i;
    l[1].0[1][0] = i;

    l[2].0[0][0] = ONE;
    l[2].0[1][1] = -ONE;

    l[3].0[0][2] = ONE;
    l[3].0[2][0] = ONE;

    l[4].0[0][2] = -i;
    l[4].0[2][0] = i;

    l[5].0[1][2] = ONE;
    l[5].0[2][1] = ONE;

    l[6].0[1][2] = -i;
    l[6].0[2][1] = i;

    let s = 1.0 / 3f64.sqrt();
    l[7].0[0][0] = r(s);
    l[7].0[1][1] = r(s);
    l[7].0[2][2] = r(-2.0 * s);

    l
}

/// Eigendecomposition of a Hermitian 3×3 matrix by cyclic complex Jacobi
/// rotations. Returns real eigenvalues and the unitary whose columns are the
/// matching eigenvectors.
pub fn herm3_eigh(a: &CoinMatrix) -> Result<([f64; 3], CoinMatrix)> {
    let defect = a.hermitian_defect();
    if !a.is_finite() || defect > 1e-9 {
        return Err(Error::NotHermitian { defect });
    }

    let mut m = *a;
    let mut v = CoinMatrix::identity();
    let scale = frobenius(a).max(1.0);

    for _sweep in 0..64 {
        if off_diagonal_norm(&m) < 1e-14 * scale {
            break;
        }
        for (p, q) in [(0, 1), (0, 2), (1, 2)] {
            let apq = m.0[p][q];
            let r = apq.norm();
            if r == 0.0 {
                continue;
            }
            // Phase q so the (p, q) entry becomes real positive, then a real
            // Jacobi rotation zeroes it.
            let phase = (apq / r).conj();
            let theta = (m.0[q][q].re - m.0[p][p].re) / (2.0 * r);
            let t = if theta == 0.0 {
                1.0
            } else {
                theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
            };
            let c = 1.0 / (1.0 + t * t).sqrt();
            let s = t * c;

            let mut g = CoinMatrix::identity();
            g.0[p][p] = Complex64::new(c, 0.0);
            g.0[p][q] = Complex64::new(s, 0.0);
            g.0[q][p] = phase * -s;
            g.0[q][q] = phase * c;

            m = g.adjoint() * m * g;
            // Restore exact Hermitian symmetry lost to rounding.
            m.0[p][q] = ZERO;
            m.0[q][p] = ZERO;
            for k in 0..3 {
                m.0[k][k].im = 0.0;
            }
            v = v * g;
        }
    }

    Ok(([m.0[0][0].re, m.0[1][1].re, m.0[2][2].re], v))
}

/// `exp(i a)` for Hermitian `a`. The result is unitary.
pub fn herm3_exp(a: &CoinMatrix) -> Result<CoinMatrix> {
    let (eigvals, v) = herm3_eigh(a)?;
    let phases = CoinMatrix::diag(eigvals.map(|x| Complex64::from_polar(1.0, x)));
    Ok(v * phases * v.adjoint())
}

fn frobenius(m: &CoinMatrix) -> f64 {
    m.0.iter()
        .flatten()
        .map(|z| z.norm_sqr())
        .sum::<f64>()
        .sqrt()
}

fn off_diagonal_norm(m: &CoinMatrix) -> f64 {
    let mut acc = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            if i != j {
                acc += m.0[i][j].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KrausKind {
    PhaseDamping,
    AmplitudeDamping,
}

/// A chirality-space channel `ρ ↦ Σ Ej ρ Ej†`.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausSet {
    kind: KrausKind,
    gamma: f64,
    elements: Vec<CoinMatrix>,
}

impl KrausSet {
    pub fn kind(&self) -> KrausKind {
        self.kind
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn elements(&self) -> &[CoinMatrix] {
        &self.elements
    }

    /// Applies the channel to a 3×3 block: `Σ Ej B Ej†`.
    pub fn apply(&self, block: &CoinMatrix) -> CoinMatrix {
        self.elements
            .iter()
            .fold(CoinMatrix::zero(), |acc, e| acc + *e * *block * e.adjoint())
    }

    /// Elementwise defect of `Σ Ej†Ej = I`.
    pub fn completeness_defect(&self) -> f64 {
        self.elements
            .iter()
            .fold(CoinMatrix::zero(), |acc, e| acc + e.adjoint() * *e)
            .max_abs_diff(&CoinMatrix::identity())
    }
}

fn check_gamma(gamma: f64) -> Result<()> {
    if (0.0..=1.0).contains(&gamma) {
        Ok(())
    } else {
        Err(Error::GammaOutOfRange(gamma))
    }
}

/// Phase damping: `E0 = √(1-γ) I`, `E1 = √γ diag(1, ω, ω²)` with `ω = e^{2πi/3}`.
pub fn phase_damping_kraus(gamma: f64) -> Result<KrausSet> {
    check_gamma(gamma)?;
    let omega = Complex64::from_polar(1.0, 2.0 * PI / 3.0);
    let e0 = CoinMatrix::identity().scale(Complex64::new((1.0 - gamma).sqrt(), 0.0));
    let e1 = CoinMatrix::diag([ONE, omega, omega * omega]).scale(Complex64::new(gamma.sqrt(), 0.0));
    Ok(KrausSet {
        kind: KrausKind::PhaseDamping,
        gamma,
        elements: vec![e0, e1],
    })
}

/// Amplitude damping towards `L`: population in `S` and `R` decays into `L`.
pub fn amplitude_damping_kraus(gamma: f64) -> Result<KrausSet> {
    check_gamma(gamma)?;
    let keep = (1.0 - gamma).sqrt();
    let decay = gamma.sqrt();
    let e0 = CoinMatrix::from_real([[1.0, 0.0, 0.0], [0.0, keep, 0.0], [0.0, 0.0, keep]]);
    let e1 = CoinMatrix::from_real([[0.0, decay, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0]]);
    let e2 = CoinMatrix::from_real([[0.0, 0.0, decay], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0]]);
    Ok(KrausSet {
        kind: KrausKind::AmplitudeDamping,
        gamma,
        elements: vec![e0, e1, e2],
    })
}

/// Source of random coin rotations `exp(i Σ αk λk)` with iid `αk ~ N(0, σa²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseGenerator {
    sigma_a: f64,
}

impl NoiseGenerator {
    pub fn new(sigma_a: f64) -> Result<Self> {
        if sigma_a.is_finite() && sigma_a >= 0.0 {
            Ok(Self { sigma_a })
        } else {
            Err(Error::InvalidNoiseWidth(sigma_a))
        }
    }

    pub fn sigma_a(&self) -> f64 {
        self.sigma_a
    }

    /// Draws the eight expansion coefficients for one time step.
    pub fn sample_alphas(&self, rng: &mut RngStream) -> [f64; 8] {
        std::array::from_fn(|_| self.sigma_a * rng.standard_normal())
    }

    /// `Σ αk λk`.
    pub fn generator(alphas: &[f64; 8]) -> CoinMatrix {
        gellmann_basis()
            .iter()
            .zip(alphas)
            .fold(CoinMatrix::zero(), |acc, (l, &a)| {
                acc + l.scale(Complex64::new(a, 0.0))
            })
    }
}

/// One random coin rotation; a pure function of the generator and stream state.
pub fn sample_noise_rotation(gen: &NoiseGenerator, rng: &mut RngStream) -> CoinMatrix {
    let alphas = gen.sample_alphas(rng);
    if gen.sigma_a == 0.0 {
        return CoinMatrix::identity();
    }
    herm3_exp(&NoiseGenerator::generator(&alphas))
        .expect("real combination of Gell-Mann matrices is Hermitian")
}
