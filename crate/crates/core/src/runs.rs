//! File-emitting run drivers. One [`RunManifest`] fully determines every
//! output byte: fixed grids, no randomness, floats printed with 17
//! significant digits, rows in grid order.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use crate::analysis::{
    branch_slope, classify_mode, decay_range_along_branch, intensity_profile, track_branches,
    ClassifyThresholds, TrackingParams,
};
use crate::config::{fmt_f64, ChainConfig, Numerics};
use crate::eigen::eigendecompose;
use crate::error::{Error, Result};
use crate::greens::{bloch_sum, pair_coupling, SumMethod};
use crate::hamiltonian::{build_finite, rational_flux_approx};
use crate::spectra::{
    bloch_spectrum_set, butterfly_sweep, detect_gaps, farey_sequence, half_zone_k_grid,
    nudge_off_light_line, open_chain_sweep, phase_grid, GapSet, SpectrumSet,
};

/// Which experiment a manifest drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunCommand {
    Butterfly,
    SweepPhi,
    Modes,
    GreensCheck,
}

/// Everything that determines a run's outputs.
#[derive(Debug, Clone)]
pub struct RunManifest {
    pub command: RunCommand,
    pub config: ChainConfig,
    pub numerics: Numerics,
    pub output_dir: PathBuf,
    /// Always true: there is no randomness anywhere in the pipeline.
    pub seedless: bool,
}

impl RunManifest {
    pub fn new(
        command: RunCommand,
        config: ChainConfig,
        numerics: Numerics,
        output_dir: impl Into<PathBuf>,
    ) -> Self {
        Self {
            command,
            config,
            numerics,
            output_dir: output_dir.into(),
            seedless: true,
        }
    }

    fn thresholds(&self) -> ClassifyThresholds {
        ClassifyThresholds {
            window: self.numerics.edge_window,
            edge_threshold: self.numerics.edge_threshold,
            pol_threshold: self.numerics.pol_threshold,
            band_edge_tol: self.numerics.band_edge_tol,
        }
    }

    fn tracking(&self) -> TrackingParams {
        TrackingParams {
            thresholds: self.thresholds(),
            band_edge_exclusion: self.numerics.band_edge_exclusion,
            branch_jump_factor: self.numerics.branch_jump_factor,
        }
    }
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| Error::io("creating output directory", parent, e))?;
    }
    let mut f = fs::File::create(path).map_err(|e| Error::io("creating output file", path, e))?;
    f.write_all(contents.as_bytes())
        .map_err(|e| Error::io("writing output file", path, e))?;
    Ok(())
}

fn run_pool<T: Send>(threads: usize, job: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if threads > 0 {
        builder = builder.num_threads(threads);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    pool.install(job)
}

fn butterfly_csv(set: &SpectrumSet) -> String {
    let mut out = String::from("b,detuning,decay,k,phase\n");
    for p in &set.points {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            fmt_f64(p.sweep_coord),
            fmt_f64(p.detuning),
            fmt_f64(p.decay),
            p.k_a.map(fmt_f64).unwrap_or_default(),
            p.phase.map(fmt_f64).unwrap_or_default()
        ));
    }
    out
}

fn phase_spectrum_csv(set: &SpectrumSet) -> String {
    let mut out = String::from("phase,detuning,decay\n");
    for p in &set.points {
        out.push_str(&format!(
            "{},{},{}\n",
            fmt_f64(p.sweep_coord),
            fmt_f64(p.detuning),
            fmt_f64(p.decay)
        ));
    }
    out
}

/// Line-delimited structured records mirroring the full spectrum schema.
fn spectrum_records(set: &SpectrumSet) -> String {
    let mut out = String::new();
    for p in &set.points {
        let origin = match p.origin {
            crate::spectra::SpectrumOrigin::Bloch => "bloch",
            crate::spectra::SpectrumOrigin::OpenChain => "open_chain",
        };
        let k = p.k_a.map(fmt_f64).unwrap_or_else(|| "null".to_string());
        let phase = p.phase.map(fmt_f64).unwrap_or_else(|| "null".to_string());
        out.push_str(&format!(
            "{{\"sweep_coord\":{},\"detuning\":{},\"decay\":{},\"origin\":\"{}\",\"k\":{},\"phase\":{}}}\n",
            fmt_f64(p.sweep_coord),
            fmt_f64(p.detuning),
            fmt_f64(p.decay),
            origin,
            k,
            phase
        ));
    }
    out
}

/// Bloch reference spectrum for the configured flux: the nearest rational
/// `p/q` with `q ≤ q_max`, projected over the half zone and reduced phases.
pub fn bloch_reference(config: &ChainConfig, numerics: &Numerics) -> Result<(usize, usize, SpectrumSet)> {
    let (p, q) = rational_flux_approx(config.flux(), numerics.q_max)?;
    let set = bloch_spectrum_set(
        p,
        q,
        numerics.k_samples,
        numerics.phase_samples,
        config.spacing(),
        config.zeeman_amp(),
        numerics,
    )?;
    Ok((p, q, set))
}

/// Butterfly run: `butterfly.csv` with every sampled eigenvalue and
/// `butterfly_summary.csv` with per-flux point counts, decay ranges, and
/// gap counts.
pub fn run_butterfly(manifest: &RunManifest) -> Result<Vec<PathBuf>> {
    let numerics = &manifest.numerics;
    let fracs = farey_sequence(numerics.farey_order);
    let spectrum = run_pool(numerics.threads, || {
        butterfly_sweep(
            &fracs,
            numerics.k_samples,
            numerics.phase_samples,
            manifest.config.spacing(),
            manifest.config.zeeman_amp(),
            numerics,
        )
    })?;

    let butterfly_path = manifest.output_dir.join("butterfly.csv");
    write_file(&butterfly_path, &butterfly_csv(&spectrum))?;
    let records_path = manifest.output_dir.join("butterfly.jsonl");
    write_file(&records_path, &spectrum_records(&spectrum))?;

    let mut summary = String::from("b,point_count,decay_min,decay_max,gap_count\n");
    let mut cursor = 0usize;
    for &(p, q) in &fracs {
        let b = p as f64 / q as f64;
        let start = cursor;
        while cursor < spectrum.points.len() && spectrum.points[cursor].sweep_coord == b {
            cursor += 1;
        }
        let slice = &spectrum.points[start..cursor];
        let sub = SpectrumSet {
            points: slice.to_vec(),
            sweep_kind: spectrum.sweep_kind,
        };
        let gaps = detect_gaps(&sub, numerics.min_gap_width)?;
        let (mut dmin, mut dmax) = (f64::INFINITY, f64::NEG_INFINITY);
        for pt in slice {
            dmin = dmin.min(pt.decay);
            dmax = dmax.max(pt.decay);
        }
        summary.push_str(&format!(
            "{},{},{},{},{}\n",
            fmt_f64(b),
            slice.len(),
            fmt_f64(dmin),
            fmt_f64(dmax),
            gaps.intervals.len()
        ));
    }
    let summary_path = manifest.output_dir.join("butterfly_summary.csv");
    write_file(&summary_path, &summary)?;
    Ok(vec![butterfly_path, records_path, summary_path])
}

fn labels_csv(
    sweep: &crate::spectra::OpenChainSweep,
    gaps: &GapSet,
    thresholds: &ClassifyThresholds,
) -> Result<String> {
    let mut out = String::from(
        "phase,detuning,decay,side,polarization,radiance,edge_weight,pol_fraction,in_gap\n",
    );
    for snap in &sweep.snapshots {
        for mode in &snap.modes {
            let label = classify_mode(mode, gaps, thresholds)?;
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                fmt_f64(snap.phase),
                fmt_f64(mode.eigenvalue.detuning),
                fmt_f64(mode.eigenvalue.decay),
                label.side.as_str(),
                label.polarization.as_str(),
                label.radiance.as_str(),
                fmt_f64(label.edge_weight),
                fmt_f64(label.pol_fraction),
                label.in_gap
            ));
        }
    }
    Ok(out)
}

/// φ-sweep run: `spectrum_phi.csv`, `labels.csv`, `branches.csv`, plus
/// `gaps.csv` with the Bloch reference gap map used for classification.
pub fn run_sweep_phi(manifest: &RunManifest) -> Result<Vec<PathBuf>> {
    let numerics = &manifest.numerics;
    let (sweep, gaps) = run_pool(numerics.threads, || {
        let (_, _, bloch) = bloch_reference(&manifest.config, numerics)?;
        let gaps = detect_gaps(&bloch, numerics.min_gap_width)?;
        let grid = phase_grid(numerics.phi_samples);
        let sweep = open_chain_sweep(&manifest.config, &grid, numerics)?;
        Ok((sweep, gaps))
    })?;

    let spectrum_path = manifest.output_dir.join("spectrum_phi.csv");
    write_file(&spectrum_path, &phase_spectrum_csv(&sweep.spectrum))?;
    let records_path = manifest.output_dir.join("spectrum_phi.jsonl");
    write_file(&records_path, &spectrum_records(&sweep.spectrum))?;

    let mut gaps_csv = String::from("lower,upper,width\n");
    for g in &gaps.intervals {
        gaps_csv.push_str(&format!(
            "{},{},{}\n",
            fmt_f64(g.lower),
            fmt_f64(g.upper),
            fmt_f64(g.width())
        ));
    }
    let gaps_path = manifest.output_dir.join("gaps.csv");
    write_file(&gaps_path, &gaps_csv)?;

    let labels_path = manifest.output_dir.join("labels.csv");
    write_file(&labels_path, &labels_csv(&sweep, &gaps, &manifest.thresholds())?)?;

    let branches = track_branches(&sweep, &gaps, &manifest.tracking())?;
    let mut branches_csv =
        String::from("branch,gap_lower,gap_upper,side,polarization,n_points,slope,decay_min,decay_max\n");
    for (idx, branch) in branches.iter().enumerate() {
        if branch.points.len() < 3 {
            continue;
        }
        let gap = gaps.intervals[branch.gap];
        let d_phi = sweep.snapshots[1].phase - sweep.snapshots[0].phase;
        let jump_tol = manifest.numerics.branch_jump_factor * gap.width() * d_phi;
        let slope = branch_slope(branch, jump_tol)?;
        let (dmin, dmax) = decay_range_along_branch(branch, jump_tol)?;
        branches_csv.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            idx,
            fmt_f64(gap.lower),
            fmt_f64(gap.upper),
            branch.side.as_str(),
            branch.polarization(manifest.numerics.pol_threshold).as_str(),
            branch.points.len(),
            fmt_f64(slope),
            fmt_f64(dmin),
            fmt_f64(dmax)
        ));
    }
    let branches_path = manifest.output_dir.join("branches.csv");
    write_file(&branches_path, &branches_csv)?;

    Ok(vec![
        spectrum_path,
        records_path,
        gaps_path,
        labels_path,
        branches_path,
    ])
}

/// Debug dump of the finite-chain Hamiltonian at one phase, for
/// cross-language oracle comparison: dense entries as (row, col, re, im).
pub fn dump_hamiltonian(manifest: &RunManifest, phase: f64) -> Result<PathBuf> {
    let config = manifest.config.with_phase(phase)?;
    let h = build_finite(&config)?;
    let m = h.matrix();
    let mut out = String::from("row,col,re,im\n");
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            out.push_str(&format!(
                "{},{},{},{}\n",
                i,
                j,
                fmt_f64(m[(i, j)].re),
                fmt_f64(m[(i, j)].im)
            ));
        }
    }
    let path = manifest.output_dir.join("hamiltonian.csv");
    write_file(&path, &out)?;
    Ok(path)
}

/// Mode-profile run at one phase: per-mode intensity CSVs plus a label
/// table for every mode whose detuning falls in `window`.
pub fn run_modes(
    manifest: &RunManifest,
    phase: f64,
    window: (f64, f64),
) -> Result<Vec<PathBuf>> {
    let (lo, hi) = window;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::Config(format!(
            "detuning window must be finite with lo < hi, got [{lo}, {hi}]"
        )));
    }
    let numerics = &manifest.numerics;
    let config = manifest.config.with_phase(phase)?;
    let (result, gaps) = run_pool(numerics.threads, || {
        let (_, _, bloch) = bloch_reference(&config, numerics)?;
        let gaps = detect_gaps(&bloch, numerics.min_gap_width)?;
        let h = build_finite(&config)?;
        let result = eigendecompose(h.matrix(), numerics.tol_eig)?;
        Ok((result, gaps))
    })?;

    let selected: Vec<(usize, &crate::config::CollectiveMode)> = result
        .modes
        .iter()
        .enumerate()
        .filter(|(_, m)| m.eigenvalue.detuning >= lo && m.eigenvalue.detuning <= hi)
        .collect();
    if selected.is_empty() {
        let mut nearest: Vec<f64> = result
            .modes
            .iter()
            .map(|m| m.eigenvalue.detuning)
            .collect();
        let mid = 0.5 * (lo + hi);
        nearest.sort_by(|a, b| (a - mid).abs().total_cmp(&(b - mid).abs()));
        nearest.truncate(5);
        return Err(Error::EmptySelection { lo, hi, nearest });
    }

    let thresholds = manifest.thresholds();
    let mut paths = Vec::new();
    let mut table = String::from(
        "mode,detuning,decay,side,polarization,radiance,edge_weight,pol_fraction,in_gap,profile_file\n",
    );
    for (idx, mode) in &selected {
        let label = classify_mode(mode, &gaps, &thresholds)?;
        let profile = intensity_profile(mode);
        let file_name = format!("profile_{idx:04}.csv");
        let mut csv = String::from("n,plus,minus\n");
        for (site, (p, m)) in profile.plus.iter().zip(&profile.minus).enumerate() {
            csv.push_str(&format!("{},{},{}\n", site + 1, fmt_f64(*p), fmt_f64(*m)));
        }
        let path = manifest.output_dir.join(&file_name);
        write_file(&path, &csv)?;
        paths.push(path);
        table.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            idx,
            fmt_f64(mode.eigenvalue.detuning),
            fmt_f64(mode.eigenvalue.decay),
            label.side.as_str(),
            label.polarization.as_str(),
            label.radiance.as_str(),
            fmt_f64(label.edge_weight),
            fmt_f64(label.pol_fraction),
            label.in_gap,
            file_name
        ));
    }
    let table_path = manifest.output_dir.join("modes.csv");
    write_file(&table_path, &table)?;
    paths.insert(0, table_path);
    Ok(paths)
}

/// Validation dump: pair couplings over a separation grid and closed-form
/// versus truncated Bloch sums over a momentum grid.
pub fn run_greens_check(manifest: &RunManifest) -> Result<Vec<PathBuf>> {
    let numerics = &manifest.numerics;
    let spacing = manifest.config.spacing();

    let mut d_grid = vec![1e-4, 1e-3, 1e-2, 0.05];
    for m in 1..=30 {
        d_grid.push(m as f64 * spacing);
    }
    let mut greens = String::from("d,j_same_re,j_same_im,j_cross_re,j_cross_im\n");
    for &d in &d_grid {
        let j = pair_coupling(d)?;
        greens.push_str(&format!(
            "{},{},{},{},{}\n",
            fmt_f64(d),
            fmt_f64(j.j_same.re),
            fmt_f64(j.j_same.im),
            fmt_f64(j.j_cross.re),
            fmt_f64(j.j_cross.im)
        ));
    }
    let greens_path = manifest.output_dir.join("greens.csv");
    write_file(&greens_path, &greens)?;

    let mut bloch = String::from(
        "kappa_a,method,f_same_re,f_same_im,f_cross_re,f_cross_im,est_error,delta_same,delta_cross\n",
    );
    for &k_raw in &half_zone_k_grid(200, 1) {
        let k_a = nudge_off_light_line(k_raw, 1, spacing, numerics.eps_light)?;
        let closed = bloch_sum(k_a, spacing, SumMethod::ClosedForm, numerics.eps_light, numerics.l_max)?;
        let trunc = bloch_sum(k_a, spacing, SumMethod::Truncated, numerics.eps_light, numerics.l_max)?;
        let delta_same = (closed.f_same - trunc.f_same).norm();
        let delta_cross = (closed.f_cross - trunc.f_cross).norm();
        for (tag, c) in [("closed", &closed), ("truncated", &trunc)] {
            bloch.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                fmt_f64(k_a),
                tag,
                fmt_f64(c.f_same.re),
                fmt_f64(c.f_same.im),
                fmt_f64(c.f_cross.re),
                fmt_f64(c.f_cross.im),
                fmt_f64(c.est_error),
                fmt_f64(delta_same),
                fmt_f64(delta_cross)
            ));
        }
    }
    let bloch_path = manifest.output_dir.join("blochsums.csv");
    write_file(&bloch_path, &bloch)?;
    Ok(vec![greens_path, bloch_path])
}
