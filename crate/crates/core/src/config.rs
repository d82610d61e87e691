//! Shared domain types and unit conventions.
//!
//! Conventions used by every other module:
//! - lengths are in units of the transition wavelength λ,
//! - rates are in units of the single-atom decay rate γ₀,
//! - energies are detunings `(ω − ω₀)/γ₀`, so the bare transition sits at 0
//!   and the single-atom eigenvalue is `−i/2`,
//! - complex eigenvalues follow `E = ω − iγ/2`.
//!
//! Atom sites are indexed `n = 1…N` in the field profile
//! `Bₙ = B₀ cos(2πbn + φ)`; amplitude vectors interleave the two
//! polarizations per atom as `(C₁₊, C₁₋, C₂₊, C₂₋, …)` so each atom owns a
//! contiguous 2×2 block.

use std::f64::consts::TAU;
use std::fmt::Write as _;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Reduce a phase to `[0, 2π)`. Errors on non-finite input.
pub fn reduce_phase(phi: f64) -> Result<f64> {
    if !phi.is_finite() {
        return Err(Error::NonFinite(format!("phase {phi}")));
    }
    let mut r = phi.rem_euclid(TAU);
    // rem_euclid can round up to the modulus itself for tiny negatives
    if r >= TAU {
        r -= TAU;
    }
    Ok(r)
}

/// Physical parameters of one chain simulation.
///
/// `flux` is stored exactly as given; rational approximations for magnetic
/// Bloch runs are always derived on demand, never substituted here.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainConfig {
    n_atoms: usize,
    spacing: f64,
    zeeman_amp: f64,
    flux: f64,
    phase: f64,
}

impl ChainConfig {
    /// `n_atoms` ≥ 1, `spacing` > 0 (units of λ), `zeeman_amp` = μB₀/γ₀ ≥ 0,
    /// `flux` = b ∈ (0, 1), `phase` = φ (reduced to `[0, 2π)`).
    pub fn new(
        n_atoms: usize,
        spacing: f64,
        zeeman_amp: f64,
        flux: f64,
        phase: f64,
    ) -> Result<Self> {
        if n_atoms < 1 {
            return Err(Error::Config("n_atoms must be >= 1".into()));
        }
        if !(spacing.is_finite() && spacing > 0.0) {
            return Err(Error::Config(format!("spacing must be > 0, got {spacing}")));
        }
        if !(zeeman_amp.is_finite() && zeeman_amp >= 0.0) {
            return Err(Error::Config(format!(
                "zeeman_amp must be >= 0, got {zeeman_amp}"
            )));
        }
        if !(flux.is_finite() && flux > 0.0 && flux < 1.0) {
            return Err(Error::Config(format!(
                "flux must lie strictly inside (0, 1), got {flux}"
            )));
        }
        Ok(Self {
            n_atoms,
            spacing,
            zeeman_amp,
            flux,
            phase: reduce_phase(phase)?,
        })
    }

    pub fn n_atoms(&self) -> usize {
        self.n_atoms
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn zeeman_amp(&self) -> f64 {
        self.zeeman_amp
    }

    pub fn flux(&self) -> f64 {
        self.flux
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    /// Same chain at a different modulation phase.
    pub fn with_phase(&self, phase: f64) -> Result<Self> {
        let mut c = self.clone();
        c.phase = reduce_phase(phase)?;
        Ok(c)
    }

    /// Same parameters at a different chain length.
    pub fn with_n_atoms(&self, n_atoms: usize) -> Result<Self> {
        Self::new(n_atoms, self.spacing, self.zeeman_amp, self.flux, self.phase)
    }
}

/// One collective eigenvalue in γ₀ units: `E = detuning − i·decay/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexEigenvalue {
    /// `(ω − ω₀)/γ₀`
    pub detuning: f64,
    /// `γ/γ₀`
    pub decay: f64,
}

impl ComplexEigenvalue {
    pub fn from_complex(e: Complex64) -> Self {
        Self {
            detuning: e.re,
            decay: -2.0 * e.im,
        }
    }

    pub fn as_complex(&self) -> Complex64 {
        Complex64::new(self.detuning, -0.5 * self.decay)
    }
}

/// One eigenmode: eigenvalue plus its 2N-component amplitude vector,
/// interleaved `(C₁₊, C₁₋, C₂₊, C₂₋, …)`.
///
/// Amplitudes are unit-normalized (`Σ|C|² = 1`) with the largest-magnitude
/// component rotated to the positive real axis; `residual` is the
/// `‖Hv − Ev‖₂ / ‖H‖_F` achieved by the solver.
#[derive(Debug, Clone)]
pub struct CollectiveMode {
    pub eigenvalue: ComplexEigenvalue,
    pub amplitudes: Vec<Complex64>,
    pub residual: f64,
}

impl CollectiveMode {
    pub fn n_atoms(&self) -> usize {
        self.amplitudes.len() / 2
    }

    /// `C_{n,+}` for 1-based atom index `n`.
    pub fn amp_plus(&self, n: usize) -> Complex64 {
        self.amplitudes[2 * (n - 1)]
    }

    /// `C_{n,−}` for 1-based atom index `n`.
    pub fn amp_minus(&self, n: usize) -> Complex64 {
        self.amplitudes[2 * (n - 1) + 1]
    }
}

/// Numerical knobs shared by the sweep and classification layers.
///
/// Every field is a config-file key of the same name.
#[derive(Debug, Clone, PartialEq)]
pub struct Numerics {
    /// Relative eigenpair residual bound.
    pub tol_eig: f64,
    /// Absolute slack on eigenvalues of the decay matrix Γ.
    pub tol_psd: f64,
    /// Light-line exclusion half-width, in units of the reduced angle.
    pub eps_light: f64,
    /// Truncation length (max |site offset|) for the truncated lattice sums.
    pub l_max: usize,
    /// Largest supercell admitted when approximating an irrational flux.
    pub q_max: usize,
    /// Bloch momentum samples per supercell zone.
    pub k_samples: usize,
    /// Modulation-phase samples for Bloch projections.
    pub phase_samples: usize,
    /// φ-grid size for open-chain sweeps.
    pub phi_samples: usize,
    /// Farey order of the butterfly flux grid.
    pub farey_order: usize,
    /// Minimum reported band-gap width.
    pub min_gap_width: f64,
    /// In-gap margin relative to sampled band edges.
    pub band_edge_tol: f64,
    /// Atoms per boundary window in classification.
    pub edge_window: usize,
    /// Boundary-weight threshold for calling a mode left/right localized.
    pub edge_threshold: f64,
    /// `Σ|C₊|²` threshold for calling a mode + polarized (− below 1 minus it).
    pub pol_threshold: f64,
    /// Branch points closer than this to a gap edge are treated as
    /// hybridized with the bulk and excluded from branch statistics.
    pub band_edge_exclusion: f64,
    /// Branch continuation tolerance, in units of the local grid-induced
    /// detuning spacing.
    pub branch_jump_factor: f64,
    /// Worker threads for sweeps; 0 means all available cores.
    pub threads: usize,
}

impl Default for Numerics {
    fn default() -> Self {
        Self {
            tol_eig: 1e-9,
            tol_psd: 1e-10,
            eps_light: 1e-6,
            l_max: 1_000_000,
            q_max: 100,
            k_samples: 64,
            phase_samples: 32,
            phi_samples: 201,
            farey_order: 20,
            min_gap_width: 0.5,
            band_edge_tol: 0.05,
            edge_window: 10,
            edge_threshold: 0.5,
            pol_threshold: 0.7,
            band_edge_exclusion: 0.2,
            branch_jump_factor: 5.0,
            threads: 0,
        }
    }
}

/// Format a float with 17 significant digits (lossless f64 round-trip).
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Serialize a config to the `key = value` file format. Floats keep 17
/// significant digits so a parse of the output is field-identical.
pub fn write_config(config: &ChainConfig, numerics: &Numerics) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "n_atoms = {}", config.n_atoms);
    let _ = writeln!(s, "spacing = {}", fmt_f64(config.spacing));
    let _ = writeln!(s, "zeeman_amp = {}", fmt_f64(config.zeeman_amp));
    let _ = writeln!(s, "flux = {}", fmt_f64(config.flux));
    let _ = writeln!(s, "phase = {}", fmt_f64(config.phase));
    let _ = writeln!(s, "tol_eig = {}", fmt_f64(numerics.tol_eig));
    let _ = writeln!(s, "tol_psd = {}", fmt_f64(numerics.tol_psd));
    let _ = writeln!(s, "eps_light = {}", fmt_f64(numerics.eps_light));
    let _ = writeln!(s, "l_max = {}", numerics.l_max);
    let _ = writeln!(s, "q_max = {}", numerics.q_max);
    let _ = writeln!(s, "k_samples = {}", numerics.k_samples);
    let _ = writeln!(s, "phase_samples = {}", numerics.phase_samples);
    let _ = writeln!(s, "phi_samples = {}", numerics.phi_samples);
    let _ = writeln!(s, "farey_order = {}", numerics.farey_order);
    let _ = writeln!(s, "min_gap_width = {}", fmt_f64(numerics.min_gap_width));
    let _ = writeln!(s, "band_edge_tol = {}", fmt_f64(numerics.band_edge_tol));
    let _ = writeln!(s, "edge_window = {}", numerics.edge_window);
    let _ = writeln!(s, "edge_threshold = {}", fmt_f64(numerics.edge_threshold));
    let _ = writeln!(s, "pol_threshold = {}", fmt_f64(numerics.pol_threshold));
    let _ = writeln!(
        s,
        "band_edge_exclusion = {}",
        fmt_f64(numerics.band_edge_exclusion)
    );
    let _ = writeln!(
        s,
        "branch_jump_factor = {}",
        fmt_f64(numerics.branch_jump_factor)
    );
    let _ = writeln!(s, "threads = {}", numerics.threads);
    s
}

/// Parse the `key = value` config format.
///
/// Blank lines and `#` comments are ignored. Unknown keys, repeated keys,
/// and malformed values are reported with their key and line number.
pub fn parse_config(text: &str) -> Result<(ChainConfig, Numerics)> {
    let mut n_atoms: Option<usize> = None;
    let mut spacing: Option<f64> = None;
    let mut zeeman_amp: Option<f64> = None;
    let mut flux: Option<f64> = None;
    let mut phase: Option<f64> = None;
    let mut numerics = Numerics::default();

    let mut seen: Vec<String> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('#') {
            Some(p) => &raw[..p],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::ConfigParse {
            line: line_no,
            key: line.to_string(),
            msg: "expected `key = value`".into(),
        })?;
        let key = key.trim();
        let value = value.trim();
        if seen.iter().any(|k| k == key) {
            return Err(Error::ConfigParse {
                line: line_no,
                key: key.to_string(),
                msg: "duplicate key".into(),
            });
        }
        seen.push(key.to_string());

        let parse_f64 = |v: &str| -> Result<f64> {
            v.parse::<f64>().map_err(|e| Error::ConfigParse {
                line: line_no,
                key: key.to_string(),
                msg: e.to_string(),
            })
        };
        let parse_usize = |v: &str| -> Result<usize> {
            v.parse::<usize>().map_err(|e| Error::ConfigParse {
                line: line_no,
                key: key.to_string(),
                msg: e.to_string(),
            })
        };

        match key {
            "n_atoms" => n_atoms = Some(parse_usize(value)?),
            "spacing" => spacing = Some(parse_f64(value)?),
            "zeeman_amp" => zeeman_amp = Some(parse_f64(value)?),
            "flux" => flux = Some(parse_f64(value)?),
            "phase" => phase = Some(parse_f64(value)?),
            "tol_eig" => numerics.tol_eig = parse_f64(value)?,
            "tol_psd" => numerics.tol_psd = parse_f64(value)?,
            "eps_light" => numerics.eps_light = parse_f64(value)?,
            "l_max" => numerics.l_max = parse_usize(value)?,
            "q_max" => numerics.q_max = parse_usize(value)?,
            "k_samples" => numerics.k_samples = parse_usize(value)?,
            "phase_samples" => numerics.phase_samples = parse_usize(value)?,
            "phi_samples" => numerics.phi_samples = parse_usize(value)?,
            "farey_order" => numerics.farey_order = parse_usize(value)?,
            "min_gap_width" => numerics.min_gap_width = parse_f64(value)?,
            "band_edge_tol" => numerics.band_edge_tol = parse_f64(value)?,
            "edge_window" => numerics.edge_window = parse_usize(value)?,
            "edge_threshold" => numerics.edge_threshold = parse_f64(value)?,
            "pol_threshold" => numerics.pol_threshold = parse_f64(value)?,
            "band_edge_exclusion" => numerics.band_edge_exclusion = parse_f64(value)?,
            "branch_jump_factor" => numerics.branch_jump_factor = parse_f64(value)?,
            "threads" => numerics.threads = parse_usize(value)?,
            other => {
                return Err(Error::ConfigParse {
                    line: line_no,
                    key: other.to_string(),
                    msg: "unknown key".into(),
                })
            }
        }
    }

    let require = |name: &str, v: Option<f64>| {
        v.ok_or_else(|| Error::Config(format!("missing required key `{name}`")))
    };
    let config = ChainConfig::new(
        n_atoms.ok_or_else(|| Error::Config("missing required key `n_atoms`".into()))?,
        require("spacing", spacing)?,
        require("zeeman_amp", zeeman_amp)?,
        require("flux", flux)?,
        require("phase", phase)?,
    )?;
    Ok((config, numerics))
}
