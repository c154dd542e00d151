//! Local stability of the equilibrium manifold and limit-cycle detection.
//!
//! Every quantity here is evaluated on the equilibrium manifold, where the
//! throttle parameter has been eliminated through `g / sqrt(psi) = phi / psi_c(phi)`,
//! so each function depends on the flow `phi` alone.
//!
//! Note on the eigenvalue real part: for the 2x2 Jacobian with complex
//! eigenvalues the real part is `trace / 2`. [`eig_real_part`] returns that
//! value; the divergence [`bendixson_indicator`] is the full trace. Both share
//! the same zero crossing.

use crate::compressor::CompressorModel;
use crate::error::{Error, Result};
use crate::ode::Trajectory;

/// Row-major 2x2 matrix.
pub type Mat2 = [[f64; 2]; 2];

/// Classification threshold for the eigenvalue real part.
pub const CLASSIFY_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FocusClass {
    StableFocus,
    UnstableFocus,
    Boundary,
}

impl FocusClass {
    pub fn from_real_part(real_part: f64) -> Self {
        if real_part < -CLASSIFY_TOL {
            FocusClass::StableFocus
        } else if real_part > CLASSIFY_TOL {
            FocusClass::UnstableFocus
        } else {
            FocusClass::Boundary
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            FocusClass::StableFocus => "stable-focus",
            FocusClass::UnstableFocus => "unstable-focus",
            FocusClass::Boundary => "boundary",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StabilityRow {
    pub phi: f64,
    pub discriminant: f64,
    pub real_part: f64,
    pub bendixson_r: f64,
    pub classification: FocusClass,
}

#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct LimitCycleReport {
    pub detected: bool,
    /// Mean peak-to-peak flow amplitude over the analysed cycles.
    pub amplitude_phi: f64,
    /// Peak-to-peak pressure amplitude over the analysed cycles.
    pub amplitude_psi: f64,
    pub period: f64,
    pub cycles_analyzed: usize,
}

fn check_phi(model: &CompressorModel, phi: f64) -> Result<()> {
    if phi.is_finite() && model.map.contains(phi) {
        Ok(())
    } else {
        Err(Error::Domain {
            what: "flow phi must lie strictly inside the map domain",
            value: phi,
        })
    }
}

/// Jacobian of the surge model at the equilibrium with flow `phi`.
pub fn jacobian_at_equilibrium(model: &CompressorModel, phi: f64) -> Result<Mat2> {
    check_phi(model, phi)?;
    let psi_c = model.map.pressure_rise(phi)?;
    if psi_c <= 0.0 {
        return Err(Error::ModelBreakdown { psi: psi_c });
    }
    let slope = model.map.slope_at(phi)?;
    Ok([
        [model.a * slope, -model.a],
        [model.b, -0.5 * model.b * phi / psi_c],
    ])
}

/// Coefficients `(b, c)` of the characteristic polynomial `s^2 + b s + c`.
pub fn char_poly(model: &CompressorModel, phi: f64) -> Result<(f64, f64)> {
    check_phi(model, phi)?;
    let psi_c = model.map.pressure_rise(phi)?;
    if psi_c <= 0.0 {
        return Err(Error::ModelBreakdown { psi: psi_c });
    }
    let damping = 0.5 * model.b * phi / psi_c;
    let growth = model.a * model.map.slope_at(phi)?;
    Ok((damping - growth, -damping * growth + model.a * model.b))
}

pub fn discriminant(model: &CompressorModel, phi: f64) -> Result<f64> {
    let (b, c) = char_poly(model, phi)?;
    Ok(b * b - 4.0 * c)
}

/// Real part of the complex eigenvalue pair, `trace(J) / 2`.
pub fn eig_real_part(model: &CompressorModel, phi: f64) -> Result<f64> {
    let j = jacobian_at_equilibrium(model, phi)?;
    Ok(0.5 * (j[0][0] + j[1][1]))
}

/// Divergence of the vector field on the equilibrium manifold.
pub fn bendixson_indicator(model: &CompressorModel, phi: f64) -> Result<f64> {
    check_phi(model, phi)?;
    let psi_c = model.map.pressure_rise(phi)?;
    if psi_c <= 0.0 {
        return Err(Error::ModelBreakdown { psi: psi_c });
    }
    Ok(model.a * model.map.slope_at(phi)? - 0.5 * model.b * phi / psi_c)
}

/// Eigenvalues of the equilibrium Jacobian as `(re, im)` pairs, from the
/// characteristic polynomial.
pub fn eigenvalues(model: &CompressorModel, phi: f64) -> Result<[(f64, f64); 2]> {
    let (b, c) = char_poly(model, phi)?;
    let disc = b * b - 4.0 * c;
    Ok(if disc < 0.0 {
        let im = 0.5 * (-disc).sqrt();
        [(-0.5 * b, im), (-0.5 * b, -im)]
    } else {
        let sq = disc.sqrt();
        [(0.5 * (-b + sq), 0.0), (0.5 * (-b - sq), 0.0)]
    })
}

const BOUNDARY_LO: f64 = 0.1;
const BOUNDARY_HI: f64 = 0.79;
const SIGN_SCAN_POINTS: usize = 1000;

/// Surge line: the largest zero of the eigenvalue real part on `(0.1, 0.79)`.
///
/// A 1000-point sign scan locates the last sign change, then bisection
/// refines it until the real part is below `1e-10` in magnitude.
pub fn surge_boundary(model: &CompressorModel) -> Result<f64> {
    let f = |phi: f64| eig_real_part(model, phi);
    let grid: Vec<f64> = (0..SIGN_SCAN_POINTS)
        .map(|i| BOUNDARY_LO + (BOUNDARY_HI - BOUNDARY_LO) * i as f64 / (SIGN_SCAN_POINTS - 1) as f64)
        .collect();
    let mut bracket = None;
    let mut prev = f(grid[0])?;
    for w in grid.windows(2) {
        let next = f(w[1])?;
        if prev == 0.0 {
            bracket = Some((w[0], w[0]));
        } else if prev.signum() != next.signum() {
            bracket = Some((w[0], w[1]));
        }
        prev = next;
    }
    let (mut lo, mut hi) = bracket.ok_or_else(|| {
        Error::Analysis("eigenvalue real part does not change sign on (0.1, 0.79)".into())
    })?;
    if lo == hi {
        return Ok(lo);
    }
    let mut f_lo = f(lo)?;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid)?;
        if f_mid.abs() <= 1e-10 && hi - lo < 1e-12 {
            return Ok(mid);
        }
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * hi {
            break;
        }
    }
    let root = 0.5 * (lo + hi);
    if f(root)?.abs() > 1e-10 {
        return Err(Error::Analysis(format!(
            "bisection failed to converge near phi = {root}"
        )));
    }
    Ok(root)
}

/// Tabulates the stability indicators on `n` uniformly spaced flows.
pub fn stability_scan(
    model: &CompressorModel,
    phi_lo: f64,
    phi_hi: f64,
    n: usize,
) -> Result<Vec<StabilityRow>> {
    if !(phi_lo < phi_hi) || !model.map.contains(phi_lo) || !model.map.contains(phi_hi) {
        return Err(Error::Domain {
            what: "scan range must satisfy domain_lo < lo < hi < domain_hi",
            value: phi_lo,
        });
    }
    if n < 2 {
        return Err(Error::Domain {
            what: "scan needs at least two points",
            value: n as f64,
        });
    }
    (0..n)
        .map(|i| {
            let phi = phi_lo + (phi_hi - phi_lo) * i as f64 / (n - 1) as f64;
            let real_part = eig_real_part(model, phi)?;
            Ok(StabilityRow {
                phi,
                discriminant: discriminant(model, phi)?,
                real_part,
                bendixson_r: bendixson_indicator(model, phi)?,
                classification: FocusClass::from_real_part(real_part),
            })
        })
        .collect()
}

/// Settings for [`detect_limit_cycle`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LimitCycleSettings {
    pub settle_fraction: f64,
    pub tol: f64,
}

impl Default for LimitCycleSettings {
    fn default() -> Self {
        Self {
            settle_fraction: 0.5,
            tol: 0.01,
        }
    }
}

/// Smallest amplitude treated as an oscillation rather than round-off.
const MIN_AMPLITUDE: f64 = 1e-9;

fn local_maxima(x: &[f64]) -> Vec<usize> {
    (1..x.len().saturating_sub(1))
        .filter(|&i| x[i] > x[i - 1] && x[i] >= x[i + 1])
        .collect()
}

/// Detects a sustained oscillation of `phi` by peak-amplitude convergence.
///
/// The first `settle_fraction` of the run is discarded. The cycle between two
/// successive maxima has amplitude `peak - min`; detection requires at least
/// four maxima and the last three cycle amplitudes agreeing within relative
/// `tol`. A short or flat trajectory yields `detected = false`.
pub fn detect_limit_cycle(
    traj: &Trajectory,
    settle_fraction: f64,
    tol: f64,
) -> Result<LimitCycleReport> {
    if !(settle_fraction > 0.0 && settle_fraction < 1.0) {
        return Err(Error::Domain {
            what: "settle fraction must lie in (0, 1)",
            value: settle_fraction,
        });
    }
    let phi = traj
        .column("phi")
        .ok_or_else(|| Error::Analysis("trajectory has no `phi` column".into()))?;
    let psi = traj.column("psi");
    let start = ((phi.len() as f64) * settle_fraction).floor() as usize;
    let phi = &phi[start.min(phi.len())..];
    let peaks = local_maxima(phi);
    if peaks.len() < 4 {
        return Ok(LimitCycleReport {
            cycles_analyzed: peaks.len().saturating_sub(1),
            ..Default::default()
        });
    }

    let amplitudes: Vec<f64> = peaks
        .windows(2)
        .map(|w| {
            let trough = phi[w[0]..=w[1]].iter().cloned().fold(f64::INFINITY, f64::min);
            phi[w[1]] - trough
        })
        .collect();
    let last = &amplitudes[amplitudes.len() - 3..];
    let a_max = last.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let a_min = last.iter().cloned().fold(f64::INFINITY, f64::min);
    let amplitude_phi = last.iter().sum::<f64>() / 3.0;

    let first_peak = peaks[peaks.len() - 4];
    let last_peak = peaks[peaks.len() - 1];
    let period = (last_peak - first_peak) as f64 * traj.dt / 3.0;

    let amplitude_psi = psi
        .map(|p| {
            let p = &p[start + first_peak..=start + last_peak];
            let hi = p.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let lo = p.iter().cloned().fold(f64::INFINITY, f64::min);
            hi - lo
        })
        .unwrap_or(0.0);

    let detected = a_min > MIN_AMPLITUDE && (a_max - a_min) / a_max <= tol && period > 0.0;
    Ok(LimitCycleReport {
        detected,
        amplitude_phi,
        amplitude_psi,
        period,
        cycles_analyzed: amplitudes.len(),
    })
}
