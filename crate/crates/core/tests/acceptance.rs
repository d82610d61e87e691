//! Acceptance suite: one test per headline criterion, each printing a
//! PASS line with its measured numbers (run with `--nocapture` to see
//! them). Heavy sweep data shared by several criteria is computed once.

use std::f64::consts::{PI, TAU};
use std::sync::OnceLock;
use std::time::Instant;

use num_complex::Complex64;
use radiant_core::analysis::{
    branch_slope, classify_mode, edge_weights, intensity_profile, track_branches, Branch,
    ClassifyThresholds, Polarization, Radiance, Side, TrackingParams,
};
use radiant_core::config::{ChainConfig, Numerics};
use radiant_core::eigen::{decay_matrix_min_eigenvalue, eigendecompose, eigenvalues};
use radiant_core::hamiltonian::{build_finite, rational_flux_approx};
use radiant_core::spectra::{
    bloch_spectrum_set, butterfly_sweep, detect_gaps, farey_sequence, open_chain_sweep,
    phase_grid, GapSet, OpenChainSweep,
};

const SPACING: f64 = 0.1;
const ZEEMAN: f64 = 10.0;

fn numerics() -> Numerics {
    Numerics {
        l_max: 100_000,
        ..Numerics::default()
    }
}

/// Everything derived from the headline boundary-state experiment:
/// N = 101, a = 0.1λ, μB₀ = 10γ₀, b = √5/10.
struct HeadlineData {
    gaps: GapSet,
    sweep: OpenChainSweep,
    branches: Vec<Branch>,
    /// The two largest gaps, by index into `gaps`, lower then upper.
    large_gaps: (usize, usize),
    build_seconds: f64,
}

fn flux_headline() -> f64 {
    5f64.sqrt() / 10.0
}

fn headline_config() -> ChainConfig {
    ChainConfig::new(101, SPACING, ZEEMAN, flux_headline(), 0.0).unwrap()
}

fn headline_data() -> &'static HeadlineData {
    static DATA: OnceLock<HeadlineData> = OnceLock::new();
    DATA.get_or_init(|| {
        let start = Instant::now();
        let numerics = numerics();
        let config = headline_config();

        let (p, q) = rational_flux_approx(config.flux(), numerics.q_max).unwrap();
        assert_eq!((p, q), (17, 76));
        let bloch = bloch_spectrum_set(p, q, 32, 16, SPACING, ZEEMAN, &numerics).unwrap();
        let gaps = detect_gaps(&bloch, 2.0).unwrap();

        let sweep = open_chain_sweep(&config, &phase_grid(201), &numerics).unwrap();
        let branches = track_branches(&sweep, &gaps, &TrackingParams::default()).unwrap();

        let mut order: Vec<usize> = (0..gaps.intervals.len()).collect();
        order.sort_by(|&a, &b| {
            gaps.intervals[b]
                .width()
                .total_cmp(&gaps.intervals[a].width())
        });
        assert!(order.len() >= 2, "expected at least two gaps");
        let (g1, g2) = (order[0], order[1]);
        let large_gaps = if gaps.intervals[g1].lower < gaps.intervals[g2].lower {
            (g1, g2)
        } else {
            (g2, g1)
        };

        HeadlineData {
            gaps,
            sweep,
            branches,
            large_gaps,
            build_seconds: start.elapsed().as_secs_f64(),
        }
    })
}

/// Modes of the headline chain at φ/2π = 0.15 (the labelled-state phase).
fn modes_at_probe_phase() -> &'static Vec<radiant_core::config::CollectiveMode> {
    static MODES: OnceLock<Vec<radiant_core::config::CollectiveMode>> = OnceLock::new();
    MODES.get_or_init(|| {
        let config = headline_config().with_phase(0.15 * TAU).unwrap();
        let h = build_finite(&config).unwrap();
        eigendecompose(h.matrix(), 1e-9).unwrap().modes
    })
}

#[test]
fn criterion_01_single_atom_limit() {
    let start = Instant::now();
    let config = ChainConfig::new(1, SPACING, 0.0, 0.5, 0.0).unwrap();
    let h = build_finite(&config).unwrap();
    let result = eigendecompose(h.matrix(), 1e-12).unwrap();
    assert_eq!(result.modes.len(), 2);
    for m in &result.modes {
        assert!(m.eigenvalue.detuning.abs() <= 1e-12);
        assert!((m.eigenvalue.decay - 1.0).abs() <= 1e-12);
    }
    println!(
        "acceptance 1: PASS — single atom at B₀=0 gives two modes at detuning 0, decay 1γ₀ ({:.3}s)",
        start.elapsed().as_secs_f64()
    );
}

#[test]
fn criterion_02_two_atom_oracle() {
    let start = Instant::now();
    // independent oracle: verbatim transcription of the Green's function
    // components with the 3πγ₀/k₀ prefactor, block-diagonalized by hand
    let k0 = TAU;
    let r = SPACING;
    let i = Complex64::i();
    let e = (i * k0 * r).exp();
    let g_same = -e / (8.0 * PI * k0 * k0 * r.powi(3)) * (k0 * k0 * r * r - i * k0 * r + 1.0);
    let g_cross = e / (8.0 * PI * k0 * k0 * r.powi(3)) * (k0 * k0 * r * r + 3.0 * i * k0 * r - 3.0);
    let js = 3.0 * PI / k0 * g_same;
    let jc = 3.0 * PI / k0 * g_cross;
    let base = Complex64::new(0.0, -0.5);
    let mut oracle = [
        base + (js + jc),
        base - (js + jc),
        base + (js - jc),
        base - (js - jc),
    ];
    oracle.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));

    let config = ChainConfig::new(2, SPACING, 0.0, 0.5, 0.0).unwrap();
    let h = build_finite(&config).unwrap();
    let result = eigendecompose(h.matrix(), 1e-9).unwrap();
    for (mode, want) in result.modes.iter().zip(&oracle) {
        assert!((mode.eigenvalue.detuning - want.re).abs() <= 1e-10);
        assert!((mode.eigenvalue.decay - (-2.0 * want.im)).abs() <= 1e-10);
    }
    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < 1.0, "two-atom oracle took {elapsed:.3}s (budget 1s)");
    println!("acceptance 2: PASS — two-atom spectrum matches the brute-force oracle to 1e-10 ({elapsed:.3}s)");
}

#[test]
fn criterion_03_decay_matrix_psd() {
    let start = Instant::now();
    // deterministic xorshift64 stream drives the 50 random configs
    let mut state = 0x9e3779b97f4a7c15u64;
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    let mut worst_gamma = f64::INFINITY;
    let mut worst_decay = f64::INFINITY;
    for _ in 0..50 {
        let n = 1 + (next() * 50.0) as usize;
        let spacing = 0.05 + next() * 0.25;
        let zeeman = next() * 20.0;
        let flux = (next() * 0.98 + 0.01).clamp(0.01, 0.99);
        let phase = next() * TAU;
        let config = ChainConfig::new(n, spacing, zeeman, flux, phase).unwrap();
        let h = build_finite(&config).unwrap();
        let gamma_min = decay_matrix_min_eigenvalue(h.matrix()).unwrap();
        worst_gamma = worst_gamma.min(gamma_min);
        for v in eigenvalues(h.matrix()).unwrap() {
            worst_decay = worst_decay.min(v.decay);
        }
    }
    assert!(worst_gamma >= -1e-10, "min Γ eigenvalue {worst_gamma:.3e}");
    assert!(worst_decay >= -1e-10, "min mode decay {worst_decay:.3e}");
    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < 10.0, "PSD suite took {elapsed:.1}s (budget 10s)");
    println!(
        "acceptance 3: PASS — 50 random chains: min Γ eigenvalue {worst_gamma:.2e}, min decay {worst_decay:.2e} ({elapsed:.1}s)"
    );
}

#[test]
fn criterion_04_symmetry_suite() {
    let start = Instant::now();
    let numerics = numerics();

    // (a) open-chain spectrum at φ and φ + π agree as multisets
    let config = ChainConfig::new(40, SPACING, ZEEMAN, flux_headline(), 0.0).unwrap();
    let phi = 0.73;
    let a = open_chain_sweep(&config, &[phi], &numerics).unwrap();
    let b = open_chain_sweep(&config, &[phi + PI], &numerics).unwrap();
    let mut worst = 0.0f64;
    for (x, y) in a.snapshots[0].modes.iter().zip(&b.snapshots[0].modes) {
        worst = worst.max((x.eigenvalue.detuning - y.eigenvalue.detuning).abs());
        worst = worst.max((x.eigenvalue.decay - y.eigenvalue.decay).abs());
    }
    assert!(worst <= 1e-9, "spectral symmetry violated by {worst:.2e}");

    // (b) label multisets related by the Plus↔Minus swap
    let thresholds = ClassifyThresholds::default();
    let empty_gaps = GapSet::default();
    let swap = |p: Polarization| match p {
        Polarization::Plus => Polarization::Minus,
        Polarization::Minus => Polarization::Plus,
        Polarization::Mixed => Polarization::Mixed,
    };
    let mut labels_a: Vec<(Side, Polarization, Radiance)> = a.snapshots[0]
        .modes
        .iter()
        .map(|m| {
            let l = classify_mode(m, &empty_gaps, &thresholds).unwrap();
            (l.side, swap(l.polarization), l.radiance)
        })
        .collect();
    let mut labels_b: Vec<(Side, Polarization, Radiance)> = b.snapshots[0]
        .modes
        .iter()
        .map(|m| {
            let l = classify_mode(m, &empty_gaps, &thresholds).unwrap();
            (l.side, l.polarization, l.radiance)
        })
        .collect();
    let key = |t: &(Side, Polarization, Radiance)| (t.0 as u8, t.1 as u8, t.2 as u8);
    labels_a.sort_by_key(key);
    labels_b.sort_by_key(key);
    assert_eq!(labels_a, labels_b, "label multisets must swap Plus↔Minus");

    // (c) Bloch spectrum invariant under φ → φ + 2πp/q
    let (p, q) = (2usize, 5usize);
    let h1 = radiant_core::hamiltonian::build_bloch(
        p, q, 0.09, 1.1, SPACING, ZEEMAN, numerics.eps_light, numerics.l_max,
    )
    .unwrap();
    let h2 = radiant_core::hamiltonian::build_bloch(
        p,
        q,
        0.09,
        1.1 + TAU * p as f64 / q as f64,
        SPACING,
        ZEEMAN,
        numerics.eps_light,
        numerics.l_max,
    )
    .unwrap();
    let e1 = eigenvalues(h1.matrix()).unwrap();
    let e2 = eigenvalues(h2.matrix()).unwrap();
    let mut worst_bloch = 0.0f64;
    for (x, y) in e1.iter().zip(&e2) {
        worst_bloch = worst_bloch.max((x.detuning - y.detuning).abs());
        worst_bloch = worst_bloch.max((x.decay - y.decay).abs());
    }
    assert!(worst_bloch <= 1e-9, "translation symmetry violated by {worst_bloch:.2e}");

    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < 10.0, "symmetry suite took {elapsed:.1}s (budget 10s)");
    println!(
        "acceptance 4: PASS — φ→φ+π multiset deviation {worst:.1e}, label swap exact, supercell translation deviation {worst_bloch:.1e} ({elapsed:.1}s)"
    );
}

#[test]
fn criterion_05_lattice_sum_cross_validation() {
    use radiant_core::greens::{bloch_sum, SumMethod};
    use radiant_core::spectra::{half_zone_k_grid, nudge_off_light_line};
    let start = Instant::now();
    // 100 momenta over the zone; the midpoint grid clears the light lines
    // by far more than eps_light
    let mut worst = 0.0f64;
    let mut checked = 0;
    for &k_raw in &half_zone_k_grid(200, 1) {
        let k_a = nudge_off_light_line(k_raw, 1, SPACING, 1e-6).unwrap();
        let closed = bloch_sum(k_a, SPACING, SumMethod::ClosedForm, 1e-6, 1_000_000).unwrap();
        let trunc = bloch_sum(k_a, SPACING, SumMethod::Truncated, 1e-6, 1_000_000).unwrap();
        worst = worst.max((closed.f_same - trunc.f_same).norm());
        worst = worst.max((closed.f_cross - trunc.f_cross).norm());
        checked += 1;
    }
    assert_eq!(checked, 100);
    assert!(worst <= 1e-8, "closed vs truncated deviation {worst:.2e}");
    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < 30.0, "lattice sums took {elapsed:.1}s (budget 30s)");
    println!(
        "acceptance 5: PASS — closed-form vs truncated Bloch sums agree to {worst:.1e} on 100 momenta ({elapsed:.1}s)"
    );
}

#[test]
fn criterion_06_phi_sweep_reproduction() {
    let data = headline_data();
    let start = Instant::now();
    let gaps = &data.gaps;
    let (lower_idx, upper_idx) = data.large_gaps;
    let lower_gap = gaps.intervals[lower_idx];
    let upper_gap = gaps.intervals[upper_idx];

    // (i) at least two gaps wider than 2γ₀
    let wide = gaps.intervals.iter().filter(|g| g.width() > 2.0).count();
    assert!(wide >= 2, "only {wide} gaps wider than 2γ₀: {:?}", gaps.intervals);

    // (ii) in-gap branches in both large gaps
    let branch_count = |gap_idx: usize| {
        data.branches
            .iter()
            .filter(|b| b.gap == gap_idx && b.points.len() >= 3)
            .count()
    };
    assert!(branch_count(lower_idx) >= 1, "no branch in the lower gap");
    assert!(branch_count(upper_idx) >= 1, "no branch in the upper gap");

    // (iii) upper-gap branches superradiant; lower-gap branch decays within
    // [0.05, 0.7] with range endpoints near the reported ~0.1 and ~0.6.
    // Ranges are taken over the branch points strictly inside the gap —
    // the portion of the branch between the band edges.
    let mut upper_min = f64::INFINITY;
    let mut lower_min = f64::INFINITY;
    let mut lower_max = f64::NEG_INFINITY;
    for branch in &data.branches {
        if branch.points.len() < 3 {
            continue;
        }
        let gap = gaps.intervals[branch.gap];
        let core = branch
            .points
            .iter()
            .filter(|p| gap.contains(p.detuning, 0.0));
        if branch.gap == upper_idx {
            for p in core {
                upper_min = upper_min.min(p.decay);
            }
        } else if branch.gap == lower_idx {
            for p in core {
                lower_min = lower_min.min(p.decay);
                lower_max = lower_max.max(p.decay);
            }
        }
    }
    assert!(upper_min > 1.0, "upper-gap branch decay {upper_min:.3} not superradiant");
    assert!(
        lower_min >= 0.05 && lower_max <= 0.7,
        "lower-gap branch decays [{lower_min:.3}, {lower_max:.3}] outside [0.05, 0.7]"
    );
    assert!(
        (0.0..=0.2).contains(&lower_min),
        "lower-gap min decay {lower_min:.3} vs ~0.1 ± 0.1"
    );
    assert!(
        (0.5..=0.7).contains(&lower_max),
        "lower-gap max decay {lower_max:.3} vs ~0.6 ± 0.1"
    );

    // (iv) in-gap modes at φ/2π = 0.15 near detunings +8.15 and −7.21
    let modes = modes_at_probe_phase();
    let near = |target: f64| {
        modes
            .iter()
            .filter(|m| gaps.gap_of(m.eigenvalue.detuning, 0.05).is_some())
            .map(|m| (m.eigenvalue.detuning - target).abs())
            .fold(f64::INFINITY, f64::min)
    };
    let miss_upper = near(8.15);
    let miss_lower = near(-7.21);
    assert!(miss_upper <= 0.5, "no in-gap mode within 0.5γ₀ of +8.15 (closest {miss_upper:.3})");
    assert!(miss_lower <= 0.5, "no in-gap mode within 0.5γ₀ of −7.21 (closest {miss_lower:.3})");

    let elapsed = data.build_seconds + start.elapsed().as_secs_f64();
    assert!(elapsed < 120.0, "φ-sweep reproduction took {elapsed:.0}s (budget 120s)");
    println!(
        "acceptance 6: PASS — gaps [{:.2},{:.2}] and [{:.2},{:.2}]γ₀ host branches; lower-branch decay range [{:.2},{:.2}]γ₀; modes at {:+.3} and {:+.3}γ₀ near the reported (+8.15, −7.21) ({elapsed:.0}s)",
        lower_gap.lower, lower_gap.upper, upper_gap.lower, upper_gap.upper,
        lower_min, lower_max,
        near_signed(modes, gaps, 8.15),
        near_signed(modes, gaps, -7.21),
    );
}

/// Detuning of the in-gap mode closest to `target`.
fn near_signed(
    modes: &[radiant_core::config::CollectiveMode],
    gaps: &GapSet,
    target: f64,
) -> f64 {
    modes
        .iter()
        .filter(|m| gaps.gap_of(m.eigenvalue.detuning, 0.05).is_some())
        .map(|m| m.eigenvalue.detuning)
        .min_by(|a, b| (a - target).abs().total_cmp(&(b - target).abs()))
        .unwrap_or(f64::NAN)
}

#[test]
fn criterion_07_boundary_state_classification() {
    let data = headline_data();
    let modes = modes_at_probe_phase();
    let start = Instant::now();
    let thresholds = ClassifyThresholds::default();

    let superradiant = modes
        .iter()
        .filter(|m| data.gaps.gap_of(m.eigenvalue.detuning, 0.05).is_some())
        .min_by(|a, b| {
            (a.eigenvalue.detuning - 8.15)
                .abs()
                .total_cmp(&(b.eigenvalue.detuning - 8.15).abs())
        })
        .expect("in-gap mode near +8.15");
    let subradiant = modes
        .iter()
        .filter(|m| data.gaps.gap_of(m.eigenvalue.detuning, 0.05).is_some())
        .min_by(|a, b| {
            (a.eigenvalue.detuning + 7.21)
                .abs()
                .total_cmp(&(b.eigenvalue.detuning + 7.21).abs())
        })
        .expect("in-gap mode near −7.21");

    let label_super = classify_mode(superradiant, &data.gaps, &thresholds).unwrap();
    assert_eq!(label_super.side, Side::Left);
    assert_eq!(label_super.polarization, Polarization::Minus);
    assert_eq!(label_super.radiance, Radiance::Superradiant);
    assert!(label_super.edge_weight > 0.8, "edge weight {}", label_super.edge_weight);

    let label_sub = classify_mode(subradiant, &data.gaps, &thresholds).unwrap();
    assert_eq!(label_sub.side, Side::Left);
    assert_eq!(label_sub.polarization, Polarization::Plus);
    assert_eq!(label_sub.radiance, Radiance::Subradiant);
    assert!(label_sub.edge_weight > 0.8, "edge weight {}", label_sub.edge_weight);

    // dominant single-site weight of the superradiant state: minus
    // component of the leftmost atom
    let profile = intensity_profile(superradiant);
    let mut best = (0usize, false, -1.0f64);
    for n in 0..profile.plus.len() {
        if profile.plus[n] > best.2 {
            best = (n + 1, false, profile.plus[n]);
        }
        if profile.minus[n] > best.2 {
            best = (n + 1, true, profile.minus[n]);
        }
    }
    assert_eq!(best.0, 1, "dominant site {} is not the leftmost atom", best.0);
    assert!(best.1, "dominant component is not the minus polarization");

    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < 5.0, "classification took {elapsed:.1}s (budget 5s)");
    println!(
        "acceptance 7: PASS — mode at {:+.3}γ₀ is left/minus/superradiant (edge weight {:.3}, peak |C(1,−)|² = {:.3}); mode at {:+.3}γ₀ is left/plus/subradiant (edge weight {:.3}) ({elapsed:.1}s)",
        superradiant.eigenvalue.detuning,
        label_super.edge_weight,
        best.2,
        subradiant.eigenvalue.detuning,
        label_sub.edge_weight
    );
}

#[test]
fn criterion_08_butterfly_sanity() {
    let start = Instant::now();
    let numerics = numerics();
    let fracs = farey_sequence(20);
    let spectrum = butterfly_sweep(&fracs, 32, 16, SPACING, ZEEMAN, &numerics).unwrap();

    let mut decay_min = f64::INFINITY;
    let mut decay_max = f64::NEG_INFINITY;
    let mut subradiant = 0usize;
    for p in &spectrum.points {
        decay_min = decay_min.min(p.decay);
        decay_max = decay_max.max(p.decay);
        if p.decay < 1.0 {
            subradiant += 1;
        }
    }
    assert!(decay_min >= -1e-10, "negative decay {decay_min:.2e}");
    assert!(decay_max <= 8.0, "decay max {decay_max:.3} above 8γ₀");
    assert!(
        (6.5..=8.0).contains(&decay_max),
        "decay max {decay_max:.3} outside [6.5, 8.0] (reported scale ~7.5γ₀)"
    );
    assert!(subradiant > 0, "no subradiant bulk states");

    // gap structure at b = 2/5
    let b25: Vec<_> = spectrum
        .points
        .iter()
        .filter(|p| (p.sweep_coord - 0.4).abs() < 1e-12)
        .cloned()
        .collect();
    let sub = radiant_core::spectra::SpectrumSet {
        points: b25,
        sweep_kind: spectrum.sweep_kind,
    };
    let gaps = detect_gaps(&sub, 0.5).unwrap();
    assert!(gaps.intervals.len() >= 2, "only {} gaps at b = 2/5", gaps.intervals.len());

    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < 600.0, "butterfly took {elapsed:.0}s (budget 600s)");
    println!(
        "acceptance 8: PASS — butterfly decay range [{:.2e}, {:.3}]γ₀ (reported scale 0 to ~7.5γ₀), {:.1}% subradiant points, {} gaps at b=2/5 ({elapsed:.0}s)",
        decay_min,
        decay_max,
        100.0 * subradiant as f64 / spectrum.points.len() as f64,
        gaps.intervals.len()
    );
}

#[test]
fn criterion_09_bulk_boundary_consistency() {
    let start = Instant::now();
    let numerics = numerics();
    let config = ChainConfig::new(400, SPACING, ZEEMAN, 0.4, 0.0).unwrap();
    let h = build_finite(&config).unwrap();
    let result = eigendecompose(h.matrix(), 1e-9).unwrap();

    let reference = bloch_spectrum_set(2, 5, 512, 16, SPACING, ZEEMAN, &numerics).unwrap();
    let mut bloch: Vec<f64> = reference.points.iter().map(|p| p.detuning).collect();
    bloch.sort_by(|a, b| a.total_cmp(b));

    let mut worst = 0.0f64;
    let mut excluded = 0usize;
    for mode in &result.modes {
        let (left, right) = edge_weights(mode, 10);
        if left.max(right) > 0.5 {
            excluded += 1;
            continue;
        }
        let d = mode.eigenvalue.detuning;
        let idx = bloch.partition_point(|x| *x < d);
        let mut dist = f64::INFINITY;
        if idx < bloch.len() {
            dist = dist.min(bloch[idx] - d);
        }
        if idx > 0 {
            dist = dist.min(d - bloch[idx - 1]);
        }
        worst = worst.max(dist);
    }
    assert!(
        worst <= 0.1,
        "bulk mode {worst:.4}γ₀ from the projected Bloch bands (tolerance 0.1γ₀)"
    );
    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < 120.0, "bulk-boundary check took {elapsed:.0}s (budget 120s)");
    println!(
        "acceptance 9: PASS — {} bulk modes of the N=400 chain within {:.3}γ₀ of the Bloch bands ({excluded} edge modes excluded) ({elapsed:.0}s)",
        result.modes.len() - excluded,
        worst
    );
}

#[test]
fn criterion_10_branch_slope_signs() {
    let data = headline_data();
    let start = Instant::now();
    let (lower_idx, upper_idx) = data.large_gaps;

    let mut by_family: Vec<(usize, Side, Polarization, f64)> = Vec::new();
    for branch in &data.branches {
        if branch.points.len() < 5 || (branch.gap != lower_idx && branch.gap != upper_idx) {
            continue;
        }
        let slope = branch_slope(branch, f64::INFINITY).unwrap();
        by_family.push((branch.gap, branch.side, branch.polarization(0.7), slope));
    }
    assert!(!by_family.is_empty(), "no tracked branches to test");

    for gap in [lower_idx, upper_idx] {
        let lefts: Vec<f64> = by_family
            .iter()
            .filter(|e| e.0 == gap && e.1 == Side::Left)
            .map(|e| e.3)
            .collect();
        let rights: Vec<f64> = by_family
            .iter()
            .filter(|e| e.0 == gap && e.1 == Side::Right)
            .map(|e| e.3)
            .collect();
        assert!(!lefts.is_empty() && !rights.is_empty(), "gap {gap} missing a boundary family");
        // same boundary: same sign, including the opposite-polarization pair
        assert!(
            lefts.iter().all(|s| s.signum() == lefts[0].signum()),
            "left-boundary slopes disagree in gap {gap}: {lefts:?}"
        );
        assert!(
            rights.iter().all(|s| s.signum() == rights[0].signum()),
            "right-boundary slopes disagree in gap {gap}: {rights:?}"
        );
        // opposite boundaries: opposite signs
        assert!(
            lefts[0].signum() == -rights[0].signum(),
            "left and right slopes share a sign in gap {gap}: {lefts:?} vs {rights:?}"
        );
        // the labelled-state fixture: all four side/polarization families
        let mut combos: Vec<(Side, Polarization)> = by_family
            .iter()
            .filter(|e| e.0 == gap && e.2 != Polarization::Mixed)
            .map(|e| (e.1, e.2))
            .collect();
        combos.sort_by_key(|c| (c.0 as u8, c.1 as u8));
        combos.dedup();
        assert_eq!(
            combos.len(),
            4,
            "gap {gap} branch families {combos:?} do not cover L±/R±"
        );
    }

    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < 10.0, "slope analysis took {elapsed:.1}s (budget 10s)");
    let mut summary: Vec<String> = by_family
        .iter()
        .map(|(g, s, p, sl)| {
            format!(
                "{}{}{} {:+.1}",
                if *g == lower_idx { "B" } else { "A" },
                match s {
                    Side::Left => "L",
                    Side::Right => "R",
                    Side::Bulk => "?",
                },
                match p {
                    Polarization::Plus => "+",
                    Polarization::Minus => "−",
                    Polarization::Mixed => "±",
                },
                sl
            )
        })
        .collect();
    summary.sort();
    println!(
        "acceptance 10: PASS — branch slopes dω/dφ by family: {} ({elapsed:.1}s)",
        summary.join(", ")
    );
}

#[test]
fn in_gap_modes_are_boundary_localized() {
    // supporting invariant: every mode deeper than the 0.2γ₀ hybridization
    // zone inside a large gap classifies as a boundary state
    let data = headline_data();
    let thresholds = ClassifyThresholds::default();
    let mut checked = 0usize;
    for snap in &data.sweep.snapshots {
        for mode in &snap.modes {
            let in_deep_gap = [data.large_gaps.0, data.large_gaps.1].iter().any(|&g| {
                data.gaps.intervals[g].contains(mode.eigenvalue.detuning, 0.2)
            });
            if !in_deep_gap {
                continue;
            }
            let label = classify_mode(mode, &data.gaps, &thresholds).unwrap();
            assert_ne!(
                label.side,
                Side::Bulk,
                "bulk-labelled in-gap mode at phi {:.4}, detuning {:+.4}",
                snap.phase,
                mode.eigenvalue.detuning
            );
            checked += 1;
        }
    }
    assert!(checked > 100, "only {checked} in-gap modes checked");
    println!("supporting: PASS — all {checked} deep in-gap modes are boundary states");
}

#[test]
fn branch_tracking_direction_independent() {
    // supporting invariant: reversing the φ sweep yields identical branch
    // membership (mutual nearest matching is symmetric)
    let data = headline_data();
    let reversed = OpenChainSweep {
        spectrum: data.sweep.spectrum.clone(),
        snapshots: data.sweep.snapshots.iter().rev().cloned().collect(),
    };
    let backward = track_branches(&reversed, &data.gaps, &TrackingParams::default()).unwrap();

    let canonical = |branches: &[Branch]| {
        let mut sets: Vec<Vec<(usize, u64)>> = branches
            .iter()
            .map(|b| {
                let mut pts: Vec<(usize, u64)> = b
                    .points
                    .iter()
                    .map(|p| (p.phase_idx, p.detuning.to_bits()))
                    .collect();
                pts.sort();
                pts
            })
            .collect();
        sets.sort();
        sets
    };
    // map reversed indices back before comparing
    let n = data.sweep.snapshots.len();
    let remapped: Vec<Branch> = backward
        .iter()
        .map(|b| Branch {
            gap: b.gap,
            side: b.side,
            points: b
                .points
                .iter()
                .map(|p| {
                    let mut q = *p;
                    q.phase_idx = n - 1 - p.phase_idx;
                    q
                })
                .collect(),
        })
        .collect();
    assert_eq!(canonical(&data.branches), canonical(&remapped));
    println!("supporting: PASS — branch membership independent of sweep direction");
}
