//! Classification of collective modes: boundary vs bulk, polarization,
//! super/subradiance, per-site intensity profiles, and in-gap branch
//! tracking along the synthetic momentum φ.

use crate::config::CollectiveMode;
use crate::error::{Error, Result};
use crate::spectra::{GapSet, OpenChainSweep};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
    Bulk,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Polarization {
    Plus,
    Minus,
    Mixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Radiance {
    Superradiant,
    Subradiant,
}

impl Side {
    pub fn as_str(&self) -> &'static str {
        match self {
            Side::Left => "left",
            Side::Right => "right",
            Side::Bulk => "bulk",
        }
    }
}

impl Polarization {
    pub fn as_str(&self) -> &'static str {
        match self {
            Polarization::Plus => "plus",
            Polarization::Minus => "minus",
            Polarization::Mixed => "mixed",
        }
    }
}

impl Radiance {
    pub fn as_str(&self) -> &'static str {
        match self {
            Radiance::Superradiant => "superradiant",
            Radiance::Subradiant => "subradiant",
        }
    }
}

/// Classification thresholds; all config-exposed with these defaults.
#[derive(Debug, Clone, Copy)]
pub struct ClassifyThresholds {
    /// Atoms per boundary window.
    pub window: usize,
    /// Boundary weight needed to assign a side.
    pub edge_threshold: f64,
    /// `Σ|C₊|²` above this is Plus, below `1 −` it is Minus.
    pub pol_threshold: f64,
    /// In-gap margin from the sampled band edges.
    pub band_edge_tol: f64,
}

impl Default for ClassifyThresholds {
    fn default() -> Self {
        Self {
            window: 10,
            edge_threshold: 0.5,
            pol_threshold: 0.7,
            band_edge_tol: 0.05,
        }
    }
}

/// Classification record of one collective mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeLabel {
    pub side: Side,
    pub polarization: Polarization,
    pub radiance: Radiance,
    /// Boundary weight of the dominant window, `Σ_{n∈window} |Cₙ|²`.
    pub edge_weight: f64,
    /// Total `Σₙ |C_{n,+}|²`.
    pub pol_fraction: f64,
    pub in_gap: bool,
    /// Both windows exceeded the threshold (pathological double-peak); the
    /// mode was demoted to Bulk.
    pub side_ambiguous: bool,
}

fn window_weight(mode: &CollectiveMode, sites: impl Iterator<Item = usize>) -> f64 {
    sites
        .map(|n| mode.amp_plus(n).norm_sqr() + mode.amp_minus(n).norm_sqr())
        .sum()
}

/// Boundary weights `(left, right)` over `window` atoms at each end.
/// A zero window (forced by N = 1) yields zero weights.
pub fn edge_weights(mode: &CollectiveMode, window: usize) -> (f64, f64) {
    let n = mode.n_atoms();
    let w = window.min(n);
    if w == 0 {
        return (0.0, 0.0);
    }
    let left = window_weight(mode, 1..=w);
    let right = window_weight(mode, (n - w + 1)..=n);
    (left, right)
}

/// Classify one mode against a gap map.
pub fn classify_mode(
    mode: &CollectiveMode,
    gaps: &GapSet,
    thresholds: &ClassifyThresholds,
) -> Result<ModeLabel> {
    let n = mode.n_atoms();
    if 2 * thresholds.window > n {
        return Err(Error::Config(format!(
            "boundary window must satisfy window <= N/2 (window {}, N {n})",
            thresholds.window
        )));
    }
    let (left, right) = edge_weights(mode, thresholds.window);
    let side_ambiguous = left > thresholds.edge_threshold && right > thresholds.edge_threshold;
    let side = if side_ambiguous {
        Side::Bulk
    } else if left > thresholds.edge_threshold {
        Side::Left
    } else if right > thresholds.edge_threshold {
        Side::Right
    } else {
        Side::Bulk
    };

    let pol_fraction: f64 = (1..=n).map(|i| mode.amp_plus(i).norm_sqr()).sum();
    let polarization = if pol_fraction > thresholds.pol_threshold {
        Polarization::Plus
    } else if pol_fraction < 1.0 - thresholds.pol_threshold {
        Polarization::Minus
    } else {
        Polarization::Mixed
    };

    let radiance = if mode.eigenvalue.decay > 1.0 {
        Radiance::Superradiant
    } else {
        Radiance::Subradiant
    };

    Ok(ModeLabel {
        side,
        polarization,
        radiance,
        edge_weight: left.max(right),
        pol_fraction,
        in_gap: gaps
            .gap_of(mode.eigenvalue.detuning, thresholds.band_edge_tol)
            .is_some(),
        side_ambiguous,
    })
}

/// Per-site intensity split by polarization.
#[derive(Debug, Clone, PartialEq)]
pub struct IntensityProfile {
    pub plus: Vec<f64>,
    pub minus: Vec<f64>,
}

pub fn intensity_profile(mode: &CollectiveMode) -> IntensityProfile {
    let n = mode.n_atoms();
    IntensityProfile {
        plus: (1..=n).map(|i| mode.amp_plus(i).norm_sqr()).collect(),
        minus: (1..=n).map(|i| mode.amp_minus(i).norm_sqr()).collect(),
    }
}

/// One tracked point of an in-gap branch.
#[derive(Debug, Clone, Copy)]
pub struct BranchPoint {
    /// Index into the sweep's phase grid.
    pub phase_idx: usize,
    pub phase: f64,
    pub detuning: f64,
    pub decay: f64,
    pub pol_fraction: f64,
}

/// A topological boundary branch inside one gap, on one boundary.
#[derive(Debug, Clone)]
pub struct Branch {
    pub gap: usize,
    pub side: Side,
    pub points: Vec<BranchPoint>,
}

impl Branch {
    /// Majority polarization over the branch points.
    pub fn polarization(&self, pol_threshold: f64) -> Polarization {
        let mean: f64 =
            self.points.iter().map(|p| p.pol_fraction).sum::<f64>() / self.points.len() as f64;
        if mean > pol_threshold {
            Polarization::Plus
        } else if mean < 1.0 - pol_threshold {
            Polarization::Minus
        } else {
            Polarization::Mixed
        }
    }
}

/// Branch-tracking parameters.
#[derive(Debug, Clone, Copy)]
pub struct TrackingParams {
    pub thresholds: ClassifyThresholds,
    /// Localized modes within this detuning distance outside a gap still
    /// belong to its branches (gap-edge hybridization region).
    pub band_edge_exclusion: f64,
    /// Continuation tolerance in units of `gap_width × Δφ`.
    pub branch_jump_factor: f64,
}

impl Default for TrackingParams {
    fn default() -> Self {
        Self {
            thresholds: ClassifyThresholds::default(),
            band_edge_exclusion: 0.2,
            branch_jump_factor: 5.0,
        }
    }
}

/// Track boundary branches across the φ grid of an open-chain sweep.
///
/// Candidate points of a (gap, side) family are the side-localized modes
/// that are in-gap, or within `band_edge_exclusion` of the gap while still
/// boundary-localized (branches hybridize gradually at band edges).
/// Consecutive φ samples are joined by mutual nearest-detuning continuation,
/// which is symmetric under sweep reversal; the jump tolerance is
/// `branch_jump_factor × gap_width × Δφ`, the grid-induced detuning spacing
/// of a branch crossing the gap over ~1 radian of φ.
pub fn track_branches(
    sweep: &OpenChainSweep,
    gaps: &GapSet,
    params: &TrackingParams,
) -> Result<Vec<Branch>> {
    let n_phases = sweep.snapshots.len();
    let mut branches: Vec<Branch> = Vec::new();
    if n_phases == 0 {
        return Ok(branches);
    }

    for (gap_idx, gap) in gaps.intervals.iter().enumerate() {
        for side in [Side::Left, Side::Right] {
            // collect candidates per phase index, sorted by detuning
            let mut candidates: Vec<Vec<BranchPoint>> = Vec::with_capacity(n_phases);
            for (phase_idx, snap) in sweep.snapshots.iter().enumerate() {
                let mut pts = Vec::new();
                for mode in &snap.modes {
                    let d = mode.eigenvalue.detuning;
                    let in_core = gap.contains(d, params.thresholds.band_edge_tol);
                    let near_gap = d > gap.lower - params.band_edge_exclusion
                        && d < gap.upper + params.band_edge_exclusion;
                    if !in_core && !near_gap {
                        continue;
                    }
                    let label = classify_mode(mode, gaps, &params.thresholds)?;
                    if label.side != side {
                        continue;
                    }
                    if in_core || label.edge_weight > params.thresholds.edge_threshold {
                        pts.push(BranchPoint {
                            phase_idx,
                            phase: snap.phase,
                            detuning: d,
                            decay: mode.eigenvalue.decay,
                            pol_fraction: label.pol_fraction,
                        });
                    }
                }
                pts.sort_by(|a, b| a.detuning.total_cmp(&b.detuning));
                candidates.push(pts);
            }

            // mutual nearest-detuning continuation between adjacent phases
            let mut open: Vec<Branch> = Vec::new();
            for idx in 0..n_phases {
                let here = &candidates[idx];
                let mut claimed = vec![false; here.len()];
                if idx > 0 {
                    let prev = &candidates[idx - 1];
                    let d_phi = (sweep.snapshots[idx].phase - sweep.snapshots[idx - 1].phase).abs();
                    let tol = params.branch_jump_factor * gap.width() * d_phi;
                    for branch in open.iter_mut() {
                        let last = *branch.points.last().expect("open branch has points");
                        if last.phase_idx + 1 != idx {
                            continue;
                        }
                        // nearest successor of the branch tip
                        let Some((succ_i, succ)) = here
                            .iter()
                            .enumerate()
                            .min_by(|a, b| {
                                (a.1.detuning - last.detuning)
                                    .abs()
                                    .total_cmp(&(b.1.detuning - last.detuning).abs())
                            })
                        else {
                            continue;
                        };
                        // its nearest predecessor must be the branch tip
                        let back = prev.iter().min_by(|a, b| {
                            (a.detuning - succ.detuning)
                                .abs()
                                .total_cmp(&(b.detuning - succ.detuning).abs())
                        });
                        let mutual = back
                            .map(|b| (b.detuning - last.detuning).abs() < 1e-300)
                            .unwrap_or(false);
                        if mutual && (succ.detuning - last.detuning).abs() <= tol && !claimed[succ_i]
                        {
                            claimed[succ_i] = true;
                            branch.points.push(*succ);
                        }
                    }
                }
                for (i, pt) in here.iter().enumerate() {
                    if !claimed[i] {
                        open.push(Branch {
                            gap: gap_idx,
                            side,
                            points: vec![*pt],
                        });
                    }
                }
            }
            // fragments that never enter the core gap are edge-hugging
            // hybrids, not in-gap branches
            open.retain(|b| {
                b.points
                    .iter()
                    .any(|p| gap.contains(p.detuning, params.thresholds.band_edge_tol))
            });
            branches.extend(open);
        }
    }

    // deterministic order: by gap, side, first phase, first detuning
    branches.sort_by(|a, b| {
        let ka = (a.gap, a.side as usize, a.points[0].phase_idx);
        let kb = (b.gap, b.side as usize, b.points[0].phase_idx);
        ka.cmp(&kb)
            .then(a.points[0].detuning.total_cmp(&b.points[0].detuning))
    });
    Ok(branches)
}

fn validate_branch(branch: &Branch, jump_tol: f64) -> Result<()> {
    for (i, w) in branch.points.windows(2).enumerate() {
        let jump = (w[1].detuning - w[0].detuning).abs();
        if jump > jump_tol {
            return Err(Error::BranchDiscontinuity {
                index: w[0].phase_idx,
                jump,
                tol: jump_tol,
            });
        }
        let _ = i;
    }
    Ok(())
}

/// Median central-difference slope `dω/dφ` along a tracked branch.
///
/// Needs at least 3 consecutive points; a detuning jump above `jump_tol`
/// means the branch was mis-tracked and is rejected.
pub fn branch_slope(branch: &Branch, jump_tol: f64) -> Result<f64> {
    if branch.points.len() < 3 {
        return Err(Error::Config(format!(
            "branch slope needs >= 3 points, got {}",
            branch.points.len()
        )));
    }
    validate_branch(branch, jump_tol)?;
    let pts = &branch.points;
    let mut slopes: Vec<f64> = pts
        .windows(3)
        .map(|w| (w[2].detuning - w[0].detuning) / (w[2].phase - w[0].phase))
        .collect();
    slopes.sort_by(|a, b| a.total_cmp(b));
    Ok(slopes[slopes.len() / 2])
}

/// Extremal decay rates over a tracked branch.
pub fn decay_range_along_branch(branch: &Branch, jump_tol: f64) -> Result<(f64, f64)> {
    if branch.points.is_empty() {
        return Err(Error::Config("empty branch".into()));
    }
    validate_branch(branch, jump_tol)?;
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for p in &branch.points {
        min = min.min(p.decay);
        max = max.max(p.decay);
    }
    Ok((min, max))
}
