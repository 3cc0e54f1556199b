//! Generalized Hamiltonian flows `ḟ = {H_1, …, H_{2p-1}, f}`: exact right-hand
//! sides, fixed-step RK4 integration and conservation checks.

use itertools::Itertools;
use serde::Serialize;
use thiserror::Error;

use crate::gps::{GeneralizedPoissonStructure, GpsError};
use crate::multivec::{CompiledPoly, MultivecError, PolyMultivector};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error("expected {expected} Hamiltonians, got {found}")]
    HamiltonianCount { expected: usize, found: usize },
    #[error("step size must be positive and finite, got {0}")]
    BadStep(f64),
    #[error("step count must be at least 1")]
    NoSteps,
    #[error("initial state has {found} coordinates, expected {expected}")]
    StateDimension { expected: usize, found: usize },
    #[error("state became non-finite; last valid step {last_valid_step}")]
    NonFinite { last_valid_step: usize },
    #[error("poisson theorem check needs at least {expected} functions, got {found}")]
    TooFewFunctions { expected: usize, found: usize },
    #[error(transparent)]
    Gps(#[from] GpsError),
    #[error(transparent)]
    Multivec(#[from] MultivecError),
}

#[derive(Debug, Clone)]
pub struct DynamicalSystem<'a> {
    pub structure: &'a GeneralizedPoissonStructure,
    pub hamiltonians: Vec<PolyMultivector>,
    /// `ẋ_j = {H_1, …, H_{2p-1}, x_j}`.
    pub vector_field: Vec<PolyMultivector>,
    /// The order-1 field `X_H = i_{dH_{2p-1}} ⋯ i_{dH_1} Λ`.
    pub field: PolyMultivector,
    compiled: Vec<CompiledPoly>,
}

/// Builds the exact vector field of the flow generated by `hamiltonians`.
pub fn build_system<'a>(
    s: &'a GeneralizedPoissonStructure,
    hamiltonians: &[PolyMultivector],
) -> Result<DynamicalSystem<'a>, DynamicsError> {
    let expected = 2 * s.p - 1;
    if hamiltonians.len() != expected {
        return Err(DynamicsError::HamiltonianCount { expected, found: hamiltonians.len() });
    }
    let mut field = s.lambda.clone();
    for h in hamiltonians {
        field = field.interior_df(h)?;
    }
    let vector_field: Vec<PolyMultivector> = (0..s.dim()).map(|j| field.component(&[j])).collect();
    let compiled = vector_field.iter().map(|v| v.compile()).collect::<Result<_, _>>()?;
    Ok(DynamicalSystem { structure: s, hamiltonians: hamiltonians.to_vec(), vector_field, field, compiled })
}

impl DynamicalSystem<'_> {
    pub fn dim(&self) -> usize {
        self.vector_field.len()
    }

    /// True when every right-hand side is the zero polynomial.
    pub fn is_trivial(&self) -> bool {
        self.field.is_zero()
    }

    /// Highest monomial degree on the right-hand sides.
    pub fn field_degree(&self) -> u32 {
        self.field.max_degree()
    }

    pub fn rhs(&self, x: &[f64], out: &mut [f64]) {
        for (o, c) in out.iter_mut().zip(&self.compiled) {
            *o = c.eval(x);
        }
    }

    /// `{H_1, …, H_{2p-1}, f}` as an exact polynomial.
    pub fn time_derivative(&self, f: &PolyMultivector) -> Result<PolyMultivector, DynamicsError> {
        Ok(self.field.apply_vector_field(f)?)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MonitorTrace {
    pub label: String,
    pub initial: f64,
    pub values: Vec<f64>,
}

impl MonitorTrace {
    pub fn max_abs_drift(&self) -> f64 {
        self.values.iter().map(|v| (v - self.initial).abs()).fold(0.0, f64::max)
    }

    /// Drift relative to `|initial|`, or absolute when the initial value is 0.
    pub fn max_rel_drift(&self) -> f64 {
        let scale = if self.initial == 0.0 { 1.0 } else { self.initial.abs() };
        self.max_abs_drift() / scale
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    /// Hamiltonians first (`H1`, `H2`, …), then the requested monitors.
    pub monitors: Vec<MonitorTrace>,
}

impl Trajectory {
    pub fn final_state(&self) -> &[f64] {
        self.states.last().expect("trajectory holds the initial state")
    }

    pub fn max_rel_drift(&self) -> f64 {
        self.monitors.iter().map(MonitorTrace::max_rel_drift).fold(0.0, f64::max)
    }

    /// CSV with columns `t, x1..xr, <label>_drift…`.
    pub fn to_csv(&self) -> String {
        let dim = self.states.first().map_or(0, Vec::len);
        let mut out = String::from("t");
        for i in 1..=dim {
            out.push_str(&format!(",x{i}"));
        }
        for m in &self.monitors {
            out.push_str(&format!(",{}_drift", m.label));
        }
        out.push('\n');
        for (n, (t, x)) in self.times.iter().zip(&self.states).enumerate() {
            out.push_str(&format!("{t:e}"));
            for v in x {
                out.push_str(&format!(",{v:e}"));
            }
            for m in &self.monitors {
                out.push_str(&format!(",{:e}", m.values[n] - m.initial));
            }
            out.push('\n');
        }
        out
    }
}

/// Classical RK4 with fixed step `dt`; Hamiltonians are always monitored.
pub fn evolve(
    sys: &DynamicalSystem<'_>,
    x0: &[f64],
    dt: f64,
    steps: usize,
    monitors: &[(String, PolyMultivector)],
) -> Result<Trajectory, DynamicsError> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(DynamicsError::BadStep(dt));
    }
    if steps == 0 {
        return Err(DynamicsError::NoSteps);
    }
    let r = sys.dim();
    if x0.len() != r {
        return Err(DynamicsError::StateDimension { expected: r, found: x0.len() });
    }
    if x0.iter().any(|v| !v.is_finite()) {
        return Err(DynamicsError::NonFinite { last_valid_step: 0 });
    }
    let mut tracked: Vec<(String, CompiledPoly)> = Vec::new();
    for (i, h) in sys.hamiltonians.iter().enumerate() {
        tracked.push((format!("H{}", i + 1), h.compile()?));
    }
    for (label, m) in monitors {
        tracked.push((label.clone(), m.compile()?));
    }
    let mut traces: Vec<MonitorTrace> = tracked
        .iter()
        .map(|(label, c)| {
            let v = c.eval(x0);
            MonitorTrace { label: label.clone(), initial: v, values: vec![v] }
        })
        .collect();

    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    times.push(0.0);
    states.push(x0.to_vec());
    let mut x = x0.to_vec();
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) = (vec![0.0; r], vec![0.0; r], vec![0.0; r], vec![0.0; r], vec![0.0; r]);
    for step in 1..=steps {
        sys.rhs(&x, &mut k1);
        for i in 0..r {
            tmp[i] = x[i] + 0.5 * dt * k1[i];
        }
        sys.rhs(&tmp, &mut k2);
        for i in 0..r {
            tmp[i] = x[i] + 0.5 * dt * k2[i];
        }
        sys.rhs(&tmp, &mut k3);
        for i in 0..r {
            tmp[i] = x[i] + dt * k3[i];
        }
        sys.rhs(&tmp, &mut k4);
        for i in 0..r {
            x[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(DynamicsError::NonFinite { last_valid_step: step - 1 });
        }
        times.push(step as f64 * dt);
        states.push(x.clone());
        for (trace, (_, c)) in traces.iter_mut().zip(&tracked) {
            trace.values.push(c.eval(&x));
        }
    }
    Ok(Trajectory { times, states, monitors: traces })
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceReport {
    pub dt: f64,
    /// Largest relative monitor drift at `dt` and `dt/2`.
    pub max_drift: [f64; 2],
    /// `max_drift[0] / max_drift[1]`.
    pub drift_ratio: f64,
    /// Richardson estimate `|x_dt − x_{dt/2}| / |x_{dt/2} − x_{dt/4}|` at the final time.
    pub error_ratio: f64,
}

/// Runs at `dt`, `dt/2`, `dt/4` over the same horizon.
pub fn convergence_study(
    sys: &DynamicalSystem<'_>,
    x0: &[f64],
    dt: f64,
    steps: usize,
    monitors: &[(String, PolyMultivector)],
) -> Result<ConvergenceReport, DynamicsError> {
    let t1 = evolve(sys, x0, dt, steps, monitors)?;
    let t2 = evolve(sys, x0, dt / 2.0, 2 * steps, monitors)?;
    let t4 = evolve(sys, x0, dt / 4.0, 4 * steps, monitors)?;
    let dist = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(u, v)| (u - v).powi(2)).sum::<f64>().sqrt();
    let e1 = dist(t1.final_state(), t2.final_state());
    let e2 = dist(t2.final_state(), t4.final_state());
    let d = [t1.max_rel_drift(), t2.max_rel_drift()];
    Ok(ConvergenceReport { dt, max_drift: d, drift_ratio: d[0] / d[1], error_ratio: e1 / e2 })
}

/// Exact test that `{H_1, …, H_{2p-1}, f} ≡ 0`.
pub fn constant_of_motion_check(
    sys: &DynamicalSystem<'_>,
    f: &PolyMultivector,
) -> Result<(bool, Option<PolyMultivector>), DynamicsError> {
    let d = sys.time_derivative(f)?;
    Ok(if d.is_zero() { (true, None) } else { (false, Some(d)) })
}

#[derive(Debug, Clone)]
pub struct SubsetBracket {
    pub indices: Vec<usize>,
    pub bracket: PolyMultivector,
    pub is_constant: bool,
}

#[derive(Debug, Clone)]
pub struct PoissonTheoremReport {
    pub hypothesis_holds: bool,
    /// Positions in `fs` of a selection whose union with the Hamiltonians is not in involution.
    pub hypothesis_witness: Option<Vec<usize>>,
    /// Filled only when the hypothesis holds.
    pub subsets: Vec<SubsetBracket>,
}

impl PoissonTheoremReport {
    pub fn all_pass(&self) -> bool {
        self.hypothesis_holds && self.subsets.iter().all(|s| s.is_constant)
    }
}

/// Checks the generalized Poisson theorem on `fs`: if each selection of
/// `2p-1` functions together with the Hamiltonians is in involution, every
/// bracket of `2p` functions from `fs` is a constant of motion.
pub fn poisson_theorem_check(
    sys: &DynamicalSystem<'_>,
    fs: &[PolyMultivector],
) -> Result<PoissonTheoremReport, DynamicsError> {
    let s = sys.structure;
    let n = 2 * s.p;
    if fs.len() < n {
        return Err(DynamicsError::TooFewFunctions { expected: n, found: fs.len() });
    }
    for sel in (0..fs.len()).combinations(n - 1) {
        let mut family = sys.hamiltonians.clone();
        family.extend(sel.iter().map(|&i| fs[i].clone()));
        if !s.involution_check(&family)?.involutive {
            return Ok(PoissonTheoremReport { hypothesis_holds: false, hypothesis_witness: Some(sel), subsets: vec![] });
        }
    }
    let mut subsets = Vec::new();
    for sub in (0..fs.len()).combinations(n) {
        let args: Vec<PolyMultivector> = sub.iter().map(|&i| fs[i].clone()).collect();
        let bracket = s.gpb_eval(&args)?;
        let (is_constant, _) = constant_of_motion_check(sys, &bracket)?;
        subsets.push(SubsetBracket { indices: sub, bracket, is_constant });
    }
    Ok(PoissonTheoremReport { hypothesis_holds: true, hypothesis_witness: None, subsets })
}
