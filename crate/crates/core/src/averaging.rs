//! Averaged adaptation dynamics at zero frequency and their Jacobian.
//!
//! With a constant reference, replacing `s` by zero in the MIT-rule updates
//! gives, with `q = k1 / (1 + k2)`,
//!
//! ```text
//! k1' = -gamma r^2 (q - 1)
//! k2' =  gamma r^2 (q - 1) q
//! k3' =  0
//! ```
//!
//! The Jacobian has a zero third row and column, and its upper-left block is
//! singular, so two eigenvalues vanish and the third equals the block trace
//! `-gamma r^2 (1 - q + 2 q^2) / (1 + k2)`, which is negative for every `q`.
//!
//! The closed form printed alongside the original derivation,
//! `-((k2 - 1/(5 k1) + 1)^2 + k1^2 / 75) / (1 + k2)^3 * gamma r^2`, is not
//! what differentiation of the averaged updates gives. [`printed_eigenvalue`]
//! exposes it so reports can show the mismatch; the verdict never uses it.

use crate::control::ActuatorMode;
use crate::error::{Error, Result};

/// Operating point of the averaged parameter dynamics.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AveragedPoint {
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub r: f64,
    pub gamma: f64,
}

impl AveragedPoint {
    pub fn new(k1: f64, k2: f64, k3: f64, r: f64, gamma: f64) -> Self {
        Self { k1, k2, k3, r, gamma }
    }

    pub fn validate(&self) -> Result<()> {
        for (what, v) in [
            ("k1 must be non-negative", self.k1),
            ("k2 must be non-negative", self.k2),
            ("k3 must be non-negative", self.k3),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::Domain { what, value: v });
            }
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(Error::Domain {
                what: "adaptation gain must be positive",
                value: self.gamma,
            });
        }
        if !self.r.is_finite() {
            return Err(Error::Domain {
                what: "reference must be finite",
                value: self.r,
            });
        }
        Ok(())
    }

    fn denom(&self) -> Result<f64> {
        let den = 1.0 + self.k2;
        if den == 0.0 || !den.is_finite() {
            return Err(Error::Domain {
                what: "averaged dynamics are singular at k2 = -1",
                value: self.k2,
            });
        }
        Ok(den)
    }

    fn scale(&self) -> f64 {
        self.gamma * self.r * self.r
    }
}

pub type Mat3 = [[f64; 3]; 3];

/// Averaged parameter derivatives `(k1', k2', k3')`.
pub fn averaged_rhs(p: &AveragedPoint, mode: ActuatorMode) -> Result<[f64; 3]> {
    let den = p.denom()?;
    if !mode.is_linear() {
        return Ok([0.0; 3]);
    }
    let q = p.k1 / den;
    let c = p.scale();
    Ok([-c * (q - 1.0), c * (q - 1.0) * q, 0.0])
}

/// Analytic Jacobian of [`averaged_rhs`] with respect to `(k1, k2, k3)`.
pub fn averaged_jacobian(p: &AveragedPoint, mode: ActuatorMode) -> Result<Mat3> {
    let den = p.denom()?;
    if !mode.is_linear() {
        return Ok([[0.0; 3]; 3]);
    }
    let q = p.k1 / den;
    let c = p.scale();
    let j11 = -c / den;
    let j12 = c * q / den;
    let j21 = c * (2.0 * q - 1.0) / den;
    let j22 = -c * (2.0 * q - 1.0) * q / den;
    Ok([[j11, j12, 0.0], [j21, j22, 0.0], [0.0, 0.0, 0.0]])
}

/// Eigenvalues of the averaged Jacobian, sorted descending.
///
/// The zero third row splits off one eigenvalue `0`; the rest come from the
/// upper-left 2x2 block through its trace and determinant.
pub fn averaged_eigenvalues(p: &AveragedPoint, mode: ActuatorMode) -> Result<[f64; 3]> {
    let j = averaged_jacobian(p, mode)?;
    let tr = j[0][0] + j[1][1];
    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    let disc = tr * tr - 4.0 * det;
    if disc < -1e-12 * tr * tr {
        return Err(Error::Analysis(format!(
            "averaged Jacobian block has complex eigenvalues (discriminant {disc})"
        )));
    }
    let sq = disc.max(0.0).sqrt();
    // Numerically stable pair: the large root from the sum, the small from det / large.
    let big = if tr <= 0.0 { 0.5 * (tr - sq) } else { 0.5 * (tr + sq) };
    let small = if big != 0.0 { det / big } else { 0.0 };
    let mut eig = [0.0, big, small];
    eig.sort_by(|a, b| b.total_cmp(a));
    Ok(eig)
}

/// The eigenvalue expression as printed next to the original Jacobian; kept
/// only to report how far it is from the computed one.
pub fn printed_eigenvalue(p: &AveragedPoint) -> Result<f64> {
    let den = p.denom()?;
    if p.k1 == 0.0 {
        return Err(Error::Domain {
            what: "printed expression is undefined at k1 = 0",
            value: 0.0,
        });
    }
    let inner = (p.k2 - 1.0 / (5.0 * p.k1) + 1.0).powi(2) + p.k1 * p.k1 / 75.0;
    Ok(-inner / den.powi(3) * p.scale())
}

pub const VERDICT_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VerdictRow {
    pub point: AveragedPoint,
    pub eigenvalues: [f64; 3],
    pub stable: bool,
}

/// Eigenvalues and stability verdict for each point (stable iff the largest
/// eigenvalue is at most `1e-9`).
pub fn stability_verdict(points: &[AveragedPoint], mode: ActuatorMode) -> Result<Vec<VerdictRow>> {
    points
        .iter()
        .map(|p| {
            p.validate()?;
            let eigenvalues = averaged_eigenvalues(p, mode)?;
            Ok(VerdictRow {
                point: *p,
                eigenvalues,
                stable: eigenvalues[0] <= VERDICT_TOL,
            })
        })
        .collect()
}

/// Uniform `n x n` grid over `k1, k2 in [lo, hi]`.
pub fn parameter_grid(lo: f64, hi: f64, n: usize, k3: f64, r: f64, gamma: f64) -> Vec<AveragedPoint> {
    let at = |i: usize| {
        if n <= 1 {
            lo
        } else {
            lo + (hi - lo) * i as f64 / (n - 1) as f64
        }
    };
    (0..n)
        .flat_map(|i| (0..n).map(move |j| AveragedPoint::new(at(i), at(j), k3, r, gamma)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    const LIN: ActuatorMode = ActuatorMode::Linear;

    fn nominal() -> AveragedPoint {
        AveragedPoint::new(10.0, 10.0, 0.7, 0.55, 1.0)
    }

    #[test]
    fn rhs_vanishes_on_fixed_manifold() {
        for k2 in [0.0, 0.5, 3.0, 40.0] {
            let p = AveragedPoint::new(1.0 + k2, k2, 0.7, 0.55, 2.0);
            let f = averaged_rhs(&p, LIN).unwrap();
            assert!(f.iter().all(|v| v.abs() < 1e-15));
        }
    }

    #[test]
    fn rhs_hand_values() {
        let f = averaged_rhs(&nominal(), LIN).unwrap();
        assert_abs_diff_eq!(f[0], 0.3025 / 11.0, epsilon = 1e-15);
        assert_abs_diff_eq!(f[1], -0.3025 * 10.0 / 121.0, epsilon = 1e-15);
        assert_eq!(f[2], 0.0);
    }

    #[test]
    fn saturated_mode_is_frozen() {
        assert_eq!(averaged_rhs(&nominal(), ActuatorMode::Saturated).unwrap(), [0.0; 3]);
        assert_eq!(
            averaged_eigenvalues(&nominal(), ActuatorMode::Saturated).unwrap(),
            [0.0; 3]
        );
    }

    #[test]
    fn singular_point_is_an_error() {
        let p = AveragedPoint::new(1.0, -1.0, 0.0, 0.55, 1.0);
        assert!(averaged_rhs(&p, LIN).is_err());
        assert!(averaged_jacobian(&p, LIN).is_err());
    }

    #[test]
    fn jacobian_corner_and_zero_row() {
        let j = averaged_jacobian(&nominal(), LIN).unwrap();
        assert_abs_diff_eq!(j[0][0], -0.3025 / 11.0, epsilon = 1e-15);
        assert_eq!(j[2], [0.0; 3]);
        assert_eq!([j[0][2], j[1][2]], [0.0, 0.0]);
    }

    #[test]
    fn jacobian_matches_central_differences() {
        let p = nominal();
        let j = averaged_jacobian(&p, LIN).unwrap();
        let h = 1e-6;
        for col in 0..3 {
            let mut plus = p;
            let mut minus = p;
            match col {
                0 => {
                    plus.k1 += h;
                    minus.k1 -= h;
                }
                1 => {
                    plus.k2 += h;
                    minus.k2 -= h;
                }
                _ => {
                    plus.k3 += h;
                    minus.k3 -= h;
                }
            }
            let fp = averaged_rhs(&plus, LIN).unwrap();
            let fm = averaged_rhs(&minus, LIN).unwrap();
            for row in 0..3 {
                let fd = (fp[row] - fm[row]) / (2.0 * h);
                assert!((fd - j[row][col]).abs() <= 1e-6);
            }
        }
    }

    #[test]
    fn nominal_eigenvalues() {
        let eig = averaged_eigenvalues(&nominal(), LIN).unwrap();
        assert!(eig[0].abs() <= 1e-12 && eig[1].abs() <= 1e-12);
        assert_abs_diff_eq!(eig[2], -0.3025 * 211.0 / 1331.0, epsilon = 1e-12);
        assert_abs_diff_eq!(eig[2], -0.04795, epsilon = 1e-5);
    }

    #[test]
    fn gamma_scales_the_nonzero_eigenvalue() {
        let a = averaged_eigenvalues(&nominal(), LIN).unwrap()[2];
        let mut p = nominal();
        p.gamma *= 2.0;
        let b = averaged_eigenvalues(&p, LIN).unwrap();
        assert!(((b[2] / a) - 2.0).abs() <= 1e-12);
        assert!(b[0].abs() <= 1e-12 && b[1].abs() <= 1e-12);
    }

    #[test]
    fn zero_k1_eigenvalue() {
        let p = AveragedPoint::new(0.0, 4.0, 0.0, 0.55, 1.0);
        let eig = averaged_eigenvalues(&p, LIN).unwrap();
        assert_abs_diff_eq!(eig[2], -0.3025 / 5.0, epsilon = 1e-15);
    }

    #[test]
    fn printed_expression_differs() {
        let printed = printed_eigenvalue(&nominal()).unwrap();
        let computed = averaged_eigenvalues(&nominal(), LIN).unwrap()[2];
        assert!(printed < 0.0);
        assert!((printed - computed).abs() > 1e-3);
    }

    #[test]
    fn grid_is_stable() {
        let grid = parameter_grid(0.1, 50.0, 10, 0.7, 0.55, 1.0);
        assert_eq!(grid.len(), 100);
        let rows = stability_verdict(&grid, LIN).unwrap();
        assert!(rows.iter().all(|r| r.stable));
    }

    #[test]
    fn verdict_rejects_negative_gains() {
        let p = AveragedPoint::new(-1.0, 1.0, 0.0, 0.55, 1.0);
        assert!(stability_verdict(&[p], LIN).is_err());
    }
}
