//! Compressor map, Greitzer surge dynamics and equilibrium/throttle algebra.
//!
//! The steady-state characteristic is a cubic in the affine flow coordinate
//! `z = slope * phi + offset`:
//!
//! ```text
//! psi_c(phi) = psi0 + h * (c0 + c1 z + c2 z^2 + c3 z^3)
//! ```
//!
//! and the two-state surge model is
//!
//! ```text
//! dphi/dt = a * (psi_c(phi) - psi)
//! dpsi/dt = b * (phi - g * sqrt(psi))
//! ```

use crate::error::{ensure_finite, Error, Result};

/// Steady-state pressure-rise characteristic.
#[derive(Clone, Debug, PartialEq)]
pub struct CompressorMap {
    pub psi0: f64,
    pub h: f64,
    /// Affine flow transform `z = slope * phi + offset`.
    pub slope: f64,
    pub offset: f64,
    /// Cubic coefficients `c0..c3` of the bracketed polynomial in `z`.
    pub coeffs: [f64; 4],
    pub domain_lo: f64,
    pub domain_hi: f64,
}

impl Default for CompressorMap {
    fn default() -> Self {
        Self {
            psi0: 0.352,
            h: 0.18,
            slope: 4.0,
            offset: -1.0,
            coeffs: [1.0, 1.5, 0.0, -0.5],
            domain_lo: 0.0,
            domain_hi: 0.8,
        }
    }
}

impl CompressorMap {
    pub fn validate(&self) -> Result<()> {
        for (what, v) in [
            ("map psi0", self.psi0),
            ("map h", self.h),
            ("map slope", self.slope),
            ("map offset", self.offset),
        ] {
            ensure_finite(what, v)?;
        }
        if !(self.domain_lo < self.domain_hi) {
            return Err(Error::Domain {
                what: "map domain_lo must be below domain_hi",
                value: self.domain_lo,
            });
        }
        Ok(())
    }

    #[inline]
    fn z(&self, phi: f64) -> f64 {
        self.slope * phi + self.offset
    }

    /// Pressure rise `psi_c(phi)`. No domain clamping is applied.
    pub fn pressure_rise(&self, phi: f64) -> Result<f64> {
        ensure_finite("flow phi", phi)?;
        let z = self.z(phi);
        let [c0, c1, c2, c3] = self.coeffs;
        Ok(self.psi0 + self.h * (c0 + z * (c1 + z * (c2 + z * c3))))
    }

    /// Analytic derivative `d psi_c / d phi`.
    pub fn slope_at(&self, phi: f64) -> Result<f64> {
        ensure_finite("flow phi", phi)?;
        let z = self.z(phi);
        let [_, c1, c2, c3] = self.coeffs;
        Ok(self.h * self.slope * (c1 + z * (2.0 * c2 + z * 3.0 * c3)))
    }

    /// `true` when `phi` lies strictly inside the map's flow domain.
    pub fn contains(&self, phi: f64) -> bool {
        phi > self.domain_lo && phi < self.domain_hi
    }
}

/// Compressor state: nondimensional mass flow and plenum pressure rise.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct PlantState {
    pub phi: f64,
    pub psi: f64,
}

impl PlantState {
    pub fn new(phi: f64, psi: f64) -> Self {
        Self { phi, psi }
    }

    pub fn norm(&self) -> f64 {
        self.phi.hypot(self.psi)
    }
}

/// Gains of the surge model and the throttle parameter.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GreitzerParams {
    pub a: f64,
    pub b: f64,
    pub g: f64,
}

impl GreitzerParams {
    /// Default gains (`a = 0.8`, `b = 1.25`) with the given throttle.
    pub fn with_throttle(g: f64) -> Self {
        Self { a: 0.8, b: 1.25, g }
    }

    pub fn validate(&self) -> Result<()> {
        for (what, v) in [
            ("greitzer gain a must be positive", self.a),
            ("greitzer gain b must be positive", self.b),
            ("throttle parameter g must be positive", self.g),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Domain { what, value: v });
            }
        }
        Ok(())
    }
}

/// A compressor map together with the surge-model gains, i.e. everything the
/// equilibrium-manifold analysis needs once `g` has been eliminated.
#[derive(Clone, Debug, PartialEq)]
pub struct CompressorModel {
    pub map: CompressorMap,
    pub a: f64,
    pub b: f64,
}

impl Default for CompressorModel {
    fn default() -> Self {
        Self {
            map: CompressorMap::default(),
            a: 0.8,
            b: 1.25,
        }
    }
}

impl CompressorModel {
    pub fn params(&self, g: f64) -> GreitzerParams {
        GreitzerParams {
            a: self.a,
            b: self.b,
            g,
        }
    }
}

pub fn map_pressure_rise(map: &CompressorMap, phi: f64) -> Result<f64> {
    map.pressure_rise(phi)
}

pub fn map_slope(map: &CompressorMap, phi: f64) -> Result<f64> {
    map.slope_at(phi)
}

/// Right-hand side of the surge model. Fails on `psi <= 0`, where the
/// throttle term `sqrt(psi)` is undefined.
pub fn greitzer_rhs(
    state: PlantState,
    params: &GreitzerParams,
    map: &CompressorMap,
) -> Result<PlantState> {
    ensure_finite("flow phi", state.phi)?;
    if !(state.psi > 0.0) {
        return Err(Error::ModelBreakdown { psi: state.psi });
    }
    let psi_c = map.pressure_rise(state.phi)?;
    Ok(PlantState {
        phi: params.a * (psi_c - state.psi),
        psi: params.b * (state.phi - params.g * state.psi.sqrt()),
    })
}

/// Throttle parameter placing the equilibrium at `phi`: `g = phi / sqrt(psi_c(phi))`.
pub fn throttle_from_flow(map: &CompressorMap, phi: f64) -> Result<f64> {
    ensure_finite("flow phi", phi)?;
    if phi <= 0.0 {
        return Err(Error::Domain {
            what: "flow phi must be positive",
            value: phi,
        });
    }
    let psi_c = map.pressure_rise(phi)?;
    if psi_c <= 0.0 {
        return Err(Error::Domain {
            what: "map pressure rise must be positive at phi",
            value: phi,
        });
    }
    Ok(phi / psi_c.sqrt())
}

const EQ_EDGE: f64 = 1e-6;
const NEWTON_POLISH_STEPS: usize = 5;

/// Unique equilibrium `(phi*, psi_c(phi*))` for throttle `g`.
///
/// Bisection on `psi_c(phi) - (phi/g)^2` over the open map domain, followed by
/// a few Newton steps that are only accepted while they stay in the bracket.
pub fn equilibrium_from_throttle(map: &CompressorMap, g: f64) -> Result<PlantState> {
    ensure_finite("throttle parameter g", g)?;
    if g <= 0.0 {
        return Err(Error::Domain {
            what: "throttle parameter g must be positive",
            value: g,
        });
    }
    let f = |phi: f64| -> Result<f64> { Ok(map.pressure_rise(phi)? - (phi / g).powi(2)) };
    let mut lo = map.domain_lo + EQ_EDGE;
    let mut hi = map.domain_hi - EQ_EDGE;
    let mut f_lo = f(lo)?;
    let f_hi = f(hi)?;
    if f_lo == 0.0 {
        return Ok(PlantState::new(lo, map.pressure_rise(lo)?));
    }
    if f_hi == 0.0 {
        return Ok(PlantState::new(hi, map.pressure_rise(hi)?));
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::NoEquilibrium { g });
    }

    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid)?;
        if f_mid == 0.0 {
            lo = mid;
            hi = mid;
            break;
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }

    let mut phi = 0.5 * (lo + hi);
    for _ in 0..NEWTON_POLISH_STEPS {
        let r = f(phi)?;
        let dr = map.slope_at(phi)? - 2.0 * phi / (g * g);
        if dr == 0.0 || r == 0.0 {
            break;
        }
        let next = phi - r / dr;
        if !(next >= lo - 1e-9 && next <= hi + 1e-9) {
            break;
        }
        phi = next;
    }
    Ok(PlantState::new(phi, map.pressure_rise(phi)?))
}
