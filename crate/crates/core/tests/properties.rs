use approx::assert_relative_eq;
use nalgebra::{Matrix2, Matrix3};
use proptest::prelude::*;
use surgekit::averaging::{averaged_eigenvalues, averaged_jacobian, averaged_rhs, AveragedPoint};
use surgekit::compressor::{throttle_from_flow, CompressorModel};
use surgekit::control::ActuatorMode;
use surgekit::ode::{integrate, GreitzerSystem, OdeSystem};
use surgekit::stability::{eigenvalues, jacobian_at_equilibrium};

struct Decay;

impl OdeSystem for Decay {
    fn dimension(&self) -> usize {
        1
    }
    fn rhs(&self, _t: f64, s: &[f64], out: &mut [f64]) -> surgekit::Result<()> {
        out[0] = -s[0];
        Ok(())
    }
    fn output_names(&self) -> Vec<String> {
        vec!["x".into()]
    }
}

fn decay_error(dt: f64, t_end: f64) -> f64 {
    let traj = integrate(&Decay, &[1.0], dt, t_end).unwrap();
    let last = traj.last_row().unwrap();
    (last[1] - (-last[0]).exp()).abs()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn rk4_error_ratio_under_halving(k in 3u32..9, t_end in 1.0f64..4.0) {
        let dt = t_end / 2f64.powi(k as i32);
        let ratio = decay_error(dt, t_end) / decay_error(dt / 2.0, t_end);
        prop_assert!((ratio - 16.0).abs() <= 0.2 * 16.0, "ratio {ratio} at dt {dt}");
    }

    #[test]
    fn surge_model_eigenvalues_match_dense_solver(phi in 0.02f64..0.78) {
        let model = CompressorModel::default();
        let j = jacobian_at_equilibrium(&model, phi).unwrap();
        let m = Matrix2::new(j[0][0], j[0][1], j[1][0], j[1][1]);
        let mut ours: Vec<(f64, f64)> = eigenvalues(&model, phi).unwrap().to_vec();
        let mut theirs: Vec<(f64, f64)> = m.complex_eigenvalues().iter().map(|c| (c.re, c.im)).collect();
        ours.sort_by(|a, b| a.1.total_cmp(&b.1));
        theirs.sort_by(|a, b| a.1.total_cmp(&b.1));
        for (a, b) in ours.iter().zip(&theirs) {
            prop_assert!((a.0 - b.0).abs() <= 1e-10 && (a.1 - b.1).abs() <= 1e-10, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn averaged_jacobian_matches_finite_differences(
        k1 in 0.1f64..50.0, k2 in 0.1f64..50.0, k3 in 0.0f64..5.0,
        r in 0.1f64..1.0, gamma in 0.1f64..5.0,
    ) {
        let p = AveragedPoint::new(k1, k2, k3, r, gamma);
        let j = averaged_jacobian(&p, ActuatorMode::Linear).unwrap();
        let fd = fd_jacobian(&p);
        for i in 0..3 {
            for c in 0..3 {
                let scale = 1.0 + j[i][c].abs();
                prop_assert!((j[i][c] - fd[i][c]).abs() <= 1e-6 * scale, "J[{i}][{c}] {} vs {}", j[i][c], fd[i][c]);
            }
        }
    }

    #[test]
    fn averaged_eigenvalues_match_dense_solver(
        k1 in 0.1f64..50.0, k2 in 0.1f64..50.0, gamma in 0.1f64..5.0,
    ) {
        let p = AveragedPoint::new(k1, k2, 0.7, 0.55, gamma);
        let j = averaged_jacobian(&p, ActuatorMode::Linear).unwrap();
        let m = Matrix3::from_fn(|i, c| j[i][c]);
        let mut theirs: Vec<f64> = m.complex_eigenvalues().iter().map(|c| c.re).collect();
        theirs.sort_by(|a, b| b.total_cmp(a));
        let ours = averaged_eigenvalues(&p, ActuatorMode::Linear).unwrap();
        for (a, b) in ours.iter().zip(&theirs) {
            prop_assert!((a - b).abs() <= 1e-10 * (1.0 + b.abs()), "{ours:?} vs {theirs:?}");
        }
    }
}

fn fd_jacobian(p: &AveragedPoint) -> [[f64; 3]; 3] {
    let mut j = [[0.0; 3]; 3];
    for c in 0..3 {
        let h = 1e-6 * (1.0 + [p.k1, p.k2, p.k3][c].abs());
        let shift = |s: f64| {
            let mut q = *p;
            match c {
                0 => q.k1 += s,
                1 => q.k2 += s,
                _ => q.k3 += s,
            }
            averaged_rhs(&q, ActuatorMode::Linear).unwrap()
        };
        let (plus, minus) = (shift(h), shift(-h));
        for i in 0..3 {
            j[i][c] = (plus[i] - minus[i]) / (2.0 * h);
        }
    }
    j
}

#[test]
fn integration_is_deterministic() {
    let model = CompressorModel::default();
    let g = throttle_from_flow(&model.map, 0.4).unwrap();
    let sys = GreitzerSystem::new(model.map.clone(), model.params(g));
    let a = integrate(&sys, &[0.41, 0.68], 0.01, 30.0).unwrap();
    let b = integrate(&sys, &[0.41, 0.68], 0.01, 30.0).unwrap();
    assert_eq!(a, b);
}

struct Averaged(f64, f64);

impl OdeSystem for Averaged {
    fn dimension(&self) -> usize {
        3
    }
    fn rhs(&self, _t: f64, s: &[f64], out: &mut [f64]) -> surgekit::Result<()> {
        let p = AveragedPoint::new(s[0], s[1], s[2], self.0, self.1);
        out.copy_from_slice(&averaged_rhs(&p, ActuatorMode::Linear)?);
        Ok(())
    }
    fn output_names(&self) -> Vec<String> {
        vec!["k1".into(), "k2".into(), "k3".into()]
    }
}

#[test]
fn averaged_flow_converges_to_matching_manifold() {
    for start in [[10.0, 10.0, 0.7], [2.0, 5.0, 0.7], [30.0, 3.0, 1.0], [0.5, 0.1, 0.0]] {
        let traj = integrate(&Averaged(0.55, 5.0), &start, 0.01, 400.0).unwrap();
        let last = traj.last_row().unwrap();
        assert_relative_eq!(last[1], 1.0 + last[2], epsilon = 1e-4);
        assert_eq!(last[3], start[2]);
    }
}
