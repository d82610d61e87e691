//! Assembly of the non-Hermitian chain Hamiltonians.
//!
//! Finite chains get the dense 2N×2N matrix of the single-excitation sector:
//! `±μBₙ − i/2` on the diagonal (detuning convention, γ₀ units) and the pair
//! couplings `J_same`/`J_cross` on every off-diagonal 2×2 polarization
//! block. The matrix is complex symmetric by construction.
//!
//! For rational flux `b = p/q` the modulated infinite chain is periodic
//! over a `q`-atom magnetic supercell, so a 2q×2q Bloch Hamiltonian is
//! assembled from residue-class lattice sums. Matrix elements carry the
//! canonical (position-gauge) Bloch phase `e^{i(ka)d}` on top of the
//! residue sums, which makes `H(−k) = H(k)ᵀ` hold entrywise.

use std::f64::consts::TAU;

use faer::{c64, Mat};
use num_complex::Complex64;

use crate::config::ChainConfig;
use crate::error::{Error, Result};
use crate::greens::{pair_coupling, residue_class_sum, BlochCoupling, SumMethod};

/// Dense 2N×2N finite-chain Hamiltonian, basis `(1,+),(1,−),(2,+),…`.
#[derive(Debug, Clone)]
pub struct FiniteHamiltonian {
    matrix: Mat<c64>,
    config: ChainConfig,
}

impl FiniteHamiltonian {
    pub fn matrix(&self) -> faer::MatRef<'_, c64> {
        self.matrix.as_ref()
    }

    pub fn config(&self) -> &ChainConfig {
        &self.config
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }
}

/// Zeeman profile `μB₀ cos(2πbn + φ)` for atoms `n = 1…N`, in γ₀ units.
pub fn zeeman_profile(config: &ChainConfig) -> Vec<f64> {
    (1..=config.n_atoms())
        .map(|n| config.zeeman_amp() * (TAU * config.flux() * n as f64 + config.phase()).cos())
        .collect()
}

/// Off-diagonal coupling part of the finite-chain Hamiltonian.
///
/// Depends only on (N, spacing); φ sweeps at fixed geometry reuse it and
/// swap the diagonal, which is where all the φ dependence lives.
#[derive(Debug, Clone)]
pub struct FiniteCouplings {
    n_atoms: usize,
    spacing: f64,
    matrix: Mat<c64>,
}

impl FiniteCouplings {
    pub fn new(n_atoms: usize, spacing: f64) -> Result<Self> {
        if n_atoms < 1 {
            return Err(Error::Config("n_atoms must be >= 1".into()));
        }
        let dim = 2 * n_atoms;
        // one kernel evaluation per distance class
        let mut kernels = Vec::with_capacity(n_atoms.saturating_sub(1));
        for sep in 1..n_atoms {
            kernels.push(pair_coupling(sep as f64 * spacing)?);
        }
        let mut matrix = Mat::<c64>::zeros(dim, dim);
        for n in 0..n_atoms {
            for m in 0..n_atoms {
                if n == m {
                    continue;
                }
                let j = kernels[n.abs_diff(m) - 1];
                matrix[(2 * n, 2 * m)] = j.j_same;
                matrix[(2 * n + 1, 2 * m + 1)] = j.j_same;
                matrix[(2 * n, 2 * m + 1)] = j.j_cross;
                matrix[(2 * n + 1, 2 * m)] = j.j_cross;
            }
        }
        Ok(Self {
            n_atoms,
            spacing,
            matrix,
        })
    }

    pub fn n_atoms(&self) -> usize {
        self.n_atoms
    }

    /// Full Hamiltonian for a config sharing this geometry.
    pub fn hamiltonian(&self, config: &ChainConfig) -> Result<FiniteHamiltonian> {
        if config.n_atoms() != self.n_atoms || config.spacing() != self.spacing {
            return Err(Error::Config(
                "config geometry does not match precomputed couplings".into(),
            ));
        }
        let mut matrix = self.matrix.clone();
        let zeeman = zeeman_profile(config);
        for (n, b_n) in zeeman.iter().enumerate() {
            matrix[(2 * n, 2 * n)] = c64::new(*b_n, -0.5);
            matrix[(2 * n + 1, 2 * n + 1)] = c64::new(-*b_n, -0.5);
        }
        Ok(FiniteHamiltonian {
            matrix,
            config: config.clone(),
        })
    }
}

/// Build the 2N×2N open-chain Hamiltonian for one configuration.
pub fn build_finite(config: &ChainConfig) -> Result<FiniteHamiltonian> {
    FiniteCouplings::new(config.n_atoms(), config.spacing())?.hamiltonian(config)
}

/// Hermitian decay matrix `Γ = i(M − M†)`.
pub fn decay_matrix(h: faer::MatRef<'_, c64>) -> Mat<c64> {
    let n = h.nrows();
    Mat::from_fn(n, n, |i, j| {
        let m = h[(i, j)];
        let mh = h[(j, i)].conj();
        Complex64::i() * (m - mh)
    })
}

/// Magnetic-supercell Bloch Hamiltonian at rational flux `p/q`.
#[derive(Debug, Clone)]
pub struct BlochHamiltonian {
    matrix: Mat<c64>,
    p: usize,
    q: usize,
    /// Supercell Bloch momentum premultiplied by the spacing (k·a).
    k_a: f64,
    phase: f64,
}

impl BlochHamiltonian {
    pub fn matrix(&self) -> faer::MatRef<'_, c64> {
        self.matrix.as_ref()
    }

    pub fn flux(&self) -> (usize, usize) {
        (self.p, self.q)
    }

    pub fn k_a(&self) -> f64 {
        self.k_a
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }
}

/// Residue-class couplings of one supercell at fixed `(q, k)`.
///
/// The expensive lattice sums carry no φ dependence, so sweeps over the
/// modulation phase reuse one of these and only rewrite the diagonal.
#[derive(Debug, Clone)]
pub struct BlochCouplings {
    q: usize,
    k_a: f64,
    blocks: Vec<BlochCoupling>,
}

impl BlochCouplings {
    pub fn new(q: usize, k_a: f64, spacing: f64, eps_light: f64, l_max: usize) -> Result<Self> {
        let blocks = (0..q)
            .map(|d| {
                residue_class_sum(d, q, k_a, spacing, SumMethod::ClosedForm, eps_light, l_max)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { q, k_a, blocks })
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn k_a(&self) -> f64 {
        self.k_a
    }

    /// Assemble the 2q×2q Hamiltonian for flux `p/q`, phase φ and Zeeman
    /// amplitude μB₀ (γ₀ units).
    pub fn hamiltonian(&self, p: usize, phase: f64, zeeman_amp: f64) -> Result<BlochHamiltonian> {
        let q = self.q;
        if q == 0 || (p != 0 && gcd(p, q) != 1) || p > q {
            return Err(Error::Config(format!(
                "flux must be a reduced fraction p/q with 0 <= p <= q, got {p}/{q}"
            )));
        }
        let dim = 2 * q;
        let mut matrix = Mat::<c64>::zeros(dim, dim);
        for n in 0..q {
            for m in 0..q {
                let d = (m + q - n) % q;
                let block = &self.blocks[d];
                // canonical gauge: phase by the intra-cell offset
                let gauge = Complex64::from_polar(1.0, self.k_a * d as f64);
                let same = gauge * block.f_same;
                let cross = gauge * block.f_cross;
                matrix[(2 * n, 2 * m)] = same;
                matrix[(2 * n + 1, 2 * m + 1)] = same;
                matrix[(2 * n, 2 * m + 1)] = cross;
                matrix[(2 * n + 1, 2 * m)] = cross;
            }
        }
        for n in 0..q {
            // atom index runs 1…q inside the supercell
            let b_n = zeeman_amp * (TAU * p as f64 * (n + 1) as f64 / q as f64 + phase).cos();
            matrix[(2 * n, 2 * n)] += c64::new(b_n, -0.5);
            matrix[(2 * n + 1, 2 * n + 1)] += c64::new(-b_n, -0.5);
        }
        Ok(BlochHamiltonian {
            matrix,
            p,
            q,
            k_a: self.k_a,
            phase,
        })
    }
}

/// Build the supercell Bloch Hamiltonian for reduced flux `p/q` at momentum
/// `k_a = k·a` (reduced zone `k·qa ∈ [−π, π]`).
#[allow(clippy::too_many_arguments)]
pub fn build_bloch(
    p: usize,
    q: usize,
    k_a: f64,
    phase: f64,
    spacing: f64,
    zeeman_amp: f64,
    eps_light: f64,
    l_max: usize,
) -> Result<BlochHamiltonian> {
    if q == 0 || (p != 0 && gcd(p, q) != 1) || p > q {
        return Err(Error::Config(format!(
            "flux must be a reduced fraction p/q with 0 <= p <= q, got {p}/{q}"
        )));
    }
    BlochCouplings::new(q, k_a, spacing, eps_light, l_max)?.hamiltonian(p, phase, zeeman_amp)
}

pub fn gcd(a: usize, b: usize) -> usize {
    let (mut a, mut b) = (a, b);
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Best continued-fraction convergent `p/q` of `b ∈ (0,1)` with `q ≤ q_max`.
///
/// Magnetic Bloch theory needs rational flux; finite chains keep the exact
/// irrational value, and this is only used when a supercell is required.
pub fn rational_flux_approx(b: f64, q_max: usize) -> Result<(usize, usize)> {
    if !(b.is_finite() && b > 0.0 && b < 1.0) {
        return Err(Error::Config(format!(
            "flux must lie in (0, 1) for rational approximation, got {b}"
        )));
    }
    if q_max < 1 {
        return Err(Error::Config("q_max must be >= 1".into()));
    }
    // convergents of the continued fraction of b
    let (mut p_prev, mut q_prev) = (0usize, 1usize);
    let (mut p_cur, mut q_cur) = (1usize, 0usize);
    let mut x = b;
    for _ in 0..64 {
        let a = x.floor();
        let a_int = a as usize;
        let p_next = a_int * p_cur + p_prev;
        let q_next = a_int * q_cur + q_prev;
        if q_next > q_max {
            break;
        }
        (p_prev, q_prev) = (p_cur, q_cur);
        (p_cur, q_cur) = (p_next, q_next);
        let frac = x - a;
        if frac < 1e-15 {
            break;
        }
        x = 1.0 / frac;
    }
    if q_cur == 0 || p_cur == 0 {
        // flux below 1/q_max: fall back to the smallest admissible fraction
        return Ok((1, q_max));
    }
    let g = gcd(p_cur, q_cur);
    Ok((p_cur / g, q_cur / g))
}
