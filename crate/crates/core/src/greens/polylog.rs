//! Polylogarithms `Li_s(e^{iθ})` on the unit circle for `s ∈ {1, 2, 3}`.
//!
//! The lattice sums in this crate reduce to these three functions, so they
//! carry a tight contract: absolute error ≤ 1e−12 everywhere away from the
//! `s = 1` logarithmic divergence at `θ ≡ 0 (mod 2π)`.
//!
//! On the circle the real/imaginary parts split into elementary polynomials
//! (Bernoulli-type Fourier sums) and the two genuinely transcendental
//! pieces, the Clausen-type sums `Σ sin(nθ)/n²` and `Σ cos(nθ)/n³`. Those
//! are evaluated from two power series: around θ = 0 the log-singular
//! expansion in ζ(2k), and around θ = π a plain Taylor series obtained by
//! integrating `ln(2cos(t/2))`. Each series is used only on the quarter
//! period where it converges geometrically (ratio ≤ 1/16 and 1/4).

use std::f64::consts::{PI, TAU};
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// ζ(3)
pub const ZETA_3: f64 = 1.2020569031595942;

const MAX_ZETA: usize = 40;

/// ζ(2k) for k = 1..=MAX_ZETA.
fn zeta_even(k: usize) -> f64 {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    let table = TABLE.get_or_init(|| {
        let mut t = vec![0.0; MAX_ZETA + 1];
        t[1] = PI * PI / 6.0;
        t[2] = PI.powi(4) / 90.0;
        t[3] = PI.powi(6) / 945.0;
        for (kk, slot) in t.iter_mut().enumerate().skip(4) {
            let s = 2 * kk as i32;
            // direct series; the tail past n is below n^-s
            let n_max = (10f64.powf(20.0 / f64::from(s)).ceil() as usize).clamp(2, 400);
            let mut sum = 0.0;
            for n in (1..=n_max).rev() {
                sum += (n as f64).powi(-s);
            }
            *slot = sum;
        }
        t
    });
    table[k]
}

/// Distance from θ to the nearest multiple of 2π.
pub fn circle_distance(theta: f64) -> f64 {
    let r = theta.rem_euclid(TAU);
    r.min(TAU - r)
}

/// `Σ_{n≥1} sin(nθ)/n²` (the Clausen function of order 2).
pub fn clausen_2(theta: f64) -> f64 {
    let t = theta.rem_euclid(TAU);
    if t > PI {
        return -clausen_2_principal(TAU - t);
    }
    clausen_2_principal(t)
}

fn clausen_2_principal(t: f64) -> f64 {
    debug_assert!((0.0..=PI).contains(&t));
    if t == 0.0 {
        return 0.0;
    }
    if t <= 0.5 * PI {
        // ∫₀^t −ln(2 sin(x/2)) dx expanded about 0
        let r2 = (t / TAU) * (t / TAU);
        let mut power = r2;
        let mut sum = 0.0;
        for k in 1..=MAX_ZETA {
            let term = zeta_even(k) / (k * (2 * k + 1)) as f64 * power;
            sum += term;
            if term < 1e-18 {
                break;
            }
            power *= r2;
        }
        t - t * t.ln() + t * sum
    } else {
        // Taylor about π from ∫₀^y ln(2 cos(x/2)) dx, y = π − t
        let y = PI - t;
        let h2 = (y / 2.0) * (y / 2.0);
        let mut power = h2 * (y / 2.0);
        let mut sum = 0.0;
        for k in 1..=MAX_ZETA {
            // log-cosine series coefficient: ζ(2k)(2^{2k} − 1)/(k π^{2k})
            let c_k = zeta_even(k) * ((2.0 / PI).powi(2 * k as i32) - PI.powi(-2 * k as i32))
                / k as f64;
            let term = c_k / (2 * k + 1) as f64 * power;
            sum += term;
            if term.abs() < 1e-18 {
                break;
            }
            power *= h2;
        }
        y * std::f64::consts::LN_2 - 2.0 * sum
    }
}

/// `Σ_{n≥1} cos(nθ)/n³` (the Clausen-type cosine sum of order 3).
pub fn clausen_3(theta: f64) -> f64 {
    let t = theta.rem_euclid(TAU);
    let t = if t > PI { TAU - t } else { t };
    if t == 0.0 {
        return ZETA_3;
    }
    if t <= 0.5 * PI {
        let r2 = (t / TAU) * (t / TAU);
        let t2 = t * t;
        let mut power = r2 * t2;
        let mut sum = 0.0;
        for k in 1..=MAX_ZETA {
            let term = zeta_even(k) / ((k * (2 * k + 1) * (2 * k + 2)) as f64) * power;
            sum += term;
            if term < 1e-18 {
                break;
            }
            power *= r2;
        }
        ZETA_3 - 0.75 * t2 + 0.5 * t2 * t.ln() - sum
    } else {
        let y = PI - t;
        let h2 = (y / 2.0) * (y / 2.0);
        let mut power = h2 * h2;
        let mut sum = 0.0;
        for k in 1..=MAX_ZETA {
            let c_k = zeta_even(k) * ((2.0 / PI).powi(2 * k as i32) - PI.powi(-2 * k as i32))
                / k as f64;
            let term = c_k / ((2 * k + 1) * (2 * k + 2)) as f64 * power;
            sum += term;
            if term.abs() < 1e-18 {
                break;
            }
            power *= h2;
        }
        -(0.75 * ZETA_3 - 0.5 * y * y * std::f64::consts::LN_2 + 4.0 * sum)
    }
}

/// `Σ cos(nθ)/n²` — polynomial on `[0, 2π]`.
fn glaisher_2(t: f64) -> f64 {
    PI * PI / 6.0 - PI * t / 2.0 + t * t / 4.0
}

/// `Σ sin(nθ)/n³` — polynomial on `[0, 2π]`.
fn glaisher_3(t: f64) -> f64 {
    t * (PI * PI / 6.0 - PI * t / 4.0 + t * t / 12.0)
}

/// `Li_s(e^{iθ})` for `s ∈ {1, 2, 3}` to ≤ 1e−12 absolute error.
///
/// `s = 1` diverges logarithmically at θ ≡ 0 (mod 2π) and is rejected there.
pub fn eval_polylog(s: u32, theta: f64) -> Result<Complex64> {
    if !theta.is_finite() {
        return Err(Error::NonFinite(format!("polylog angle {theta}")));
    }
    let t = theta.rem_euclid(TAU);
    match s {
        1 => {
            if t == 0.0 {
                return Err(Error::Config(
                    "Li_1(e^{i0}) diverges (light line)".to_string(),
                ));
            }
            Ok(Complex64::new(
                -(2.0 * (0.5 * t).sin()).ln(),
                0.5 * (PI - t),
            ))
        }
        2 => Ok(Complex64::new(glaisher_2(t), clausen_2(t))),
        3 => Ok(Complex64::new(clausen_3(t), glaisher_3(t))),
        other => Err(Error::Config(format!(
            "polylog order must be 1, 2, or 3, got {other}"
        ))),
    }
}
