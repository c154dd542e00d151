//! Fixed-step RK4 integration and dense trajectory recording.

use crate::compressor::{greitzer_rhs, CompressorMap, GreitzerParams, PlantState};
use crate::error::{Error, Result};

/// A first-order ODE system `dx/dt = f(t, x)` plus the signals recorded per step.
pub trait OdeSystem {
    fn dimension(&self) -> usize;

    /// Writes `f(t, state)` into `out`, which has length `dimension()`.
    fn rhs(&self, t: f64, state: &[f64], out: &mut [f64]) -> Result<()>;

    /// Names of the recorded signals, not including the time column.
    fn output_names(&self) -> Vec<String>;

    /// Recorded signals at `(t, state)`. Defaults to the raw state.
    fn outputs(&self, _t: f64, state: &[f64], out: &mut Vec<f64>) -> Result<()> {
        out.extend_from_slice(state);
        Ok(())
    }
}

/// Time-indexed record of a run. Column 0 is always `t`.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub dt: f64,
    columns: Vec<String>,
    data: Vec<f64>,
}

impl Trajectory {
    pub fn new(dt: f64, signal_names: Vec<String>) -> Self {
        let mut columns = Vec::with_capacity(signal_names.len() + 1);
        columns.push("t".to_string());
        columns.extend(signal_names);
        Self {
            dt,
            columns,
            data: Vec::new(),
        }
    }

    /// Builds a trajectory from sampled signals on a uniform grid starting at `t = 0`.
    pub fn from_columns(dt: f64, named: Vec<(String, Vec<f64>)>) -> Result<Self> {
        let len = named.first().map(|(_, v)| v.len()).unwrap_or(0);
        if named.iter().any(|(_, v)| v.len() != len) {
            return Err(Error::Analysis("signal columns differ in length".into()));
        }
        let mut traj = Trajectory::new(dt, named.iter().map(|(n, _)| n.clone()).collect());
        for i in 0..len {
            let row: Vec<f64> = named.iter().map(|(_, v)| v[i]).collect();
            traj.push_row(i as f64 * dt, &row)?;
        }
        Ok(traj)
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn width(&self) -> usize {
        self.columns.len()
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.width()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let w = self.width();
        &self.data[i * w..(i + 1) * w]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.width())
    }

    pub fn last_row(&self) -> Option<&[f64]> {
        if self.is_empty() {
            None
        } else {
            Some(self.row(self.len() - 1))
        }
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Copy of a named column.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.column_index(name)?;
        Some(self.rows().map(|r| r[j]).collect())
    }

    pub fn times(&self) -> Vec<f64> {
        self.rows().map(|r| r[0]).collect()
    }

    /// Appends a row. Rejects wrong widths and non-finite samples.
    pub fn push_row(&mut self, t: f64, signals: &[f64]) -> Result<()> {
        if signals.len() + 1 != self.width() {
            return Err(Error::Analysis(format!(
                "row has {} signals, trajectory has {}",
                signals.len(),
                self.width() - 1
            )));
        }
        if let Some(bad) = signals.iter().position(|v| !v.is_finite()) {
            return Err(Error::Diverged {
                t,
                steps: self.len(),
                state: signals.to_vec(),
                reason: format!("non-finite signal `{}`", self.columns[bad + 1]),
            });
        }
        self.data.push(t);
        self.data.extend_from_slice(signals);
        Ok(())
    }

    /// Keeps every `factor`-th row (always including the first).
    pub fn decimated(&self, factor: usize) -> Trajectory {
        let factor = factor.max(1);
        let mut out = Trajectory {
            dt: self.dt * factor as f64,
            columns: self.columns.clone(),
            data: Vec::with_capacity(self.data.len() / factor + self.width()),
        };
        for r in self.rows().step_by(factor) {
            out.data.extend_from_slice(r);
        }
        out
    }

    /// Rows whose time is at least `t0`.
    pub fn tail_from(&self, t0: f64) -> Trajectory {
        let mut out = Trajectory {
            dt: self.dt,
            columns: self.columns.clone(),
            data: Vec::new(),
        };
        for r in self.rows().filter(|r| r[0] >= t0) {
            out.data.extend_from_slice(r);
        }
        out
    }
}

fn diverged(t: f64, steps: usize, state: &[f64], reason: impl Into<String>) -> Error {
    Error::Diverged {
        t,
        steps,
        state: state.to_vec(),
        reason: reason.into(),
    }
}

/// One classical fourth-order Runge–Kutta step.
pub fn step_rk4<S: OdeSystem + ?Sized>(sys: &S, t: f64, state: &[f64], dt: f64) -> Result<Vec<f64>> {
    let n = sys.dimension();
    if state.len() != n {
        return Err(Error::Analysis(format!(
            "state has length {}, system dimension is {n}",
            state.len()
        )));
    }
    if !(dt > 0.0) {
        return Err(Error::Domain {
            what: "time step must be positive",
            value: dt,
        });
    }

    let mut k1 = vec![0.0; n];
    let mut k2 = vec![0.0; n];
    let mut k3 = vec![0.0; n];
    let mut k4 = vec![0.0; n];
    let mut tmp = vec![0.0; n];

    let stage = |t_s: f64, x: &[f64], k: &mut [f64]| -> Result<()> {
        sys.rhs(t_s, x, k).map_err(|e| match e {
            d @ Error::Diverged { .. } => d,
            other => diverged(t_s, 0, x, other.to_string()),
        })?;
        if k.iter().any(|v| !v.is_finite()) {
            return Err(diverged(t_s, 0, x, "non-finite stage derivative"));
        }
        Ok(())
    };

    stage(t, state, &mut k1)?;
    for i in 0..n {
        tmp[i] = state[i] + 0.5 * dt * k1[i];
    }
    stage(t + 0.5 * dt, &tmp, &mut k2)?;
    for i in 0..n {
        tmp[i] = state[i] + 0.5 * dt * k2[i];
    }
    stage(t + 0.5 * dt, &tmp, &mut k3)?;
    for i in 0..n {
        tmp[i] = state[i] + dt * k3[i];
    }
    stage(t + dt, &tmp, &mut k4)?;

    let next: Vec<f64> = (0..n)
        .map(|i| state[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect();
    if next.iter().any(|v| !v.is_finite()) {
        return Err(diverged(t + dt, 0, state, "non-finite state after step"));
    }
    Ok(next)
}

/// Number of steps taken for a run of length `t_end` at step `dt`.
pub fn step_count(dt: f64, t_end: f64) -> usize {
    (t_end / dt + 1e-9).floor() as usize
}

/// Integrates from `t = 0`, recording the initial row and one row per step.
///
/// On failure the error carries the time, the number of completed steps and
/// the last good state; no non-finite row is ever recorded.
pub fn integrate<S: OdeSystem + ?Sized>(
    sys: &S,
    initial: &[f64],
    dt: f64,
    t_end: f64,
) -> Result<Trajectory> {
    integrate_with(sys, initial, dt, t_end, |_, _| {})
}

/// As [`integrate`], but calls `post_step(t, state)` after every accepted step,
/// letting callers apply projections (e.g. clamping) to the state.
pub fn integrate_with<S, F>(
    sys: &S,
    initial: &[f64],
    dt: f64,
    t_end: f64,
    mut post_step: F,
) -> Result<Trajectory>
where
    S: OdeSystem + ?Sized,
    F: FnMut(f64, &mut [f64]),
{
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::Domain {
            what: "time step must be positive",
            value: dt,
        });
    }
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::Domain {
            what: "end time must be positive",
            value: t_end,
        });
    }
    let steps = step_count(dt, t_end);
    let mut traj = Trajectory::new(dt, sys.output_names());
    let mut state = initial.to_vec();
    let mut outputs = Vec::with_capacity(traj.width());

    let record = |traj: &mut Trajectory, t: f64, state: &[f64], outputs: &mut Vec<f64>, i: usize| {
        outputs.clear();
        sys.outputs(t, state, outputs)
            .map_err(|e| diverged(t, i, state, e.to_string()))?;
        traj.push_row(t, outputs)
    };

    // Validate the initial state through the model before recording it.
    let mut probe = vec![0.0; sys.dimension()];
    if state.len() != sys.dimension() {
        return Err(Error::Analysis(format!(
            "initial state has length {}, system dimension is {}",
            state.len(),
            sys.dimension()
        )));
    }
    sys.rhs(0.0, &state, &mut probe)
        .map_err(|e| diverged(0.0, 0, &state, e.to_string()))?;
    record(&mut traj, 0.0, &state, &mut outputs, 0)?;

    for i in 0..steps {
        let t = i as f64 * dt;
        state = step_rk4(sys, t, &state, dt).map_err(|e| match e {
            Error::Diverged { t, state, reason, .. } => Error::Diverged {
                t,
                steps: i,
                state,
                reason,
            },
            other => other,
        })?;
        let t_next = (i + 1) as f64 * dt;
        post_step(t_next, &mut state);
        record(&mut traj, t_next, &state, &mut outputs, i + 1)?;
    }
    Ok(traj)
}

/// Mean of the final `window` rows if every signal's peak-to-peak variation
/// there is within `tol`. The time column is excluded from the result.
pub fn steady_state_of(traj: &Trajectory, window: usize, tol: f64) -> Option<Vec<f64>> {
    let n = traj.len();
    if window == 0 || window > n {
        return None;
    }
    let w = traj.width();
    let mut lo = vec![f64::INFINITY; w - 1];
    let mut hi = vec![f64::NEG_INFINITY; w - 1];
    let mut sum = vec![0.0; w - 1];
    for i in n - window..n {
        for (j, v) in traj.row(i)[1..].iter().enumerate() {
            lo[j] = lo[j].min(*v);
            hi[j] = hi[j].max(*v);
            sum[j] += v;
        }
    }
    if lo.iter().zip(&hi).any(|(l, h)| h - l > tol) {
        return None;
    }
    Some(sum.into_iter().map(|s| s / window as f64).collect())
}

/// The open-loop surge model as an ODE system over `(phi, psi)`.
#[derive(Clone, Debug)]
pub struct GreitzerSystem {
    pub map: CompressorMap,
    pub params: GreitzerParams,
}

impl GreitzerSystem {
    pub fn new(map: CompressorMap, params: GreitzerParams) -> Self {
        Self { map, params }
    }
}

impl OdeSystem for GreitzerSystem {
    fn dimension(&self) -> usize {
        2
    }

    fn rhs(&self, _t: f64, state: &[f64], out: &mut [f64]) -> Result<()> {
        let d = greitzer_rhs(PlantState::new(state[0], state[1]), &self.params, &self.map)?;
        out[0] = d.phi;
        out[1] = d.psi;
        Ok(())
    }

    fn output_names(&self) -> Vec<String> {
        vec!["phi".into(), "psi".into()]
    }
}

/// One node of a phase-plane vector field.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FieldSample {
    pub state: PlantState,
    pub derivative: PlantState,
}

/// `n x n` grid of surge-model evaluations, row-major with `psi` as the slow index.
/// With `n = 1` the single node sits at the lower corner of both ranges.
pub fn vector_field_grid(
    map: &CompressorMap,
    g: f64,
    phi_range: (f64, f64),
    psi_range: (f64, f64),
    n: usize,
) -> Result<Vec<FieldSample>> {
    if n == 0 {
        return Err(Error::Domain {
            what: "grid size must be at least 1",
            value: 0.0,
        });
    }
    if !(psi_range.0 > 0.0) || psi_range.1 < psi_range.0 || phi_range.1 < phi_range.0 {
        return Err(Error::Domain {
            what: "vector field ranges must be ordered with positive pressure",
            value: psi_range.0,
        });
    }
    let params = GreitzerParams::with_throttle(g);
    params.validate()?;
    let lerp = |(lo, hi): (f64, f64), i: usize| {
        if n == 1 {
            lo
        } else {
            lo + (hi - lo) * i as f64 / (n - 1) as f64
        }
    };
    let mut out = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            let state = PlantState::new(lerp(phi_range, i), lerp(psi_range, j));
            let derivative = greitzer_rhs(state, &params, map)?;
            out.push(FieldSample { state, derivative });
        }
    }
    Ok(out)
}
