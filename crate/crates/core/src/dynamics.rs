//! Fixed-step RK4 flows `ẋ = F(x)`, one-dimensional Lyapunov integrals, and
//! setwise stability reports.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{distance, norm, Point, ScalarField, VectorField};
use crate::sampling::SampleSet;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub dt: f64,
    pub t_max: f64,
    /// Stop once `‖F(x)‖` falls below this.
    pub convergence_eps: f64,
    /// Stop once `‖x‖` falls below this (the origin is not Lipschitz for every field).
    pub floor_eps: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            dt: 1e-3,
            t_max: 200.0,
            convergence_eps: 1e-6,
            floor_eps: 1e-12,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        let all_positive = [self.dt, self.t_max, self.convergence_eps, self.floor_eps]
            .iter()
            .all(|v| v.is_finite() && *v > 0.0);
        if !all_positive || self.dt >= self.t_max {
            return Err(Error::InvalidArgument(format!(
                "integrator settings must be positive with dt < t_max: {self:?}"
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Termination {
    MaxTime,
    Converged,
    LeftDomain,
    StepUnderflow,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Trajectory {
    pub samples: Vec<(f64, Point)>,
    pub config: IntegratorConfig,
    pub terminated_reason: Termination,
}

impl Trajectory {
    pub fn final_state(&self) -> &Point {
        &self.samples.last().expect("trajectories hold at least x0").1
    }

    /// CSV with header `t,x1,..,xm`; floats carry 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let m = self.samples[0].1.dim();
        let header: Vec<String> = std::iter::once("t".to_string())
            .chain((1..=m).map(|i| format!("x{i}")))
            .collect();
        writeln!(w, "{}", header.join(","))?;
        for (t, x) in &self.samples {
            write!(w, "{}", fmt17(*t))?;
            for v in x.coords() {
                write!(w, ",{}", fmt17(*v))?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

/// A float with 17 significant digits in scientific notation.
pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

fn rk4_step(f: &VectorField, x: &[f64], dt: f64, k: &mut [Vec<f64>; 4], tmp: &mut [f64]) -> Vec<f64> {
    f.eval_into(x, &mut k[0]);
    for (i, t) in tmp.iter_mut().enumerate() {
        *t = x[i] + 0.5 * dt * k[0][i];
    }
    f.eval_into(tmp, &mut k[1]);
    for (i, t) in tmp.iter_mut().enumerate() {
        *t = x[i] + 0.5 * dt * k[1][i];
    }
    f.eval_into(tmp, &mut k[2]);
    for (i, t) in tmp.iter_mut().enumerate() {
        *t = x[i] + dt * k[2][i];
    }
    f.eval_into(tmp, &mut k[3]);
    (0..x.len())
        .map(|i| x[i] + dt / 6.0 * (k[0][i] + 2.0 * k[1][i] + 2.0 * k[2][i] + k[3][i]))
        .collect()
}

/// Drives the integrator, handing every accepted state `(t, x)` to `visit`.
fn run(
    f: &VectorField,
    x0: &Point,
    cfg: &IntegratorConfig,
    mut visit: impl FnMut(f64, &[f64]),
) -> Result<(Vec<f64>, Termination)> {
    cfg.validate()?;
    f.domain().ensure_contains(x0)?;
    let m = x0.dim();
    let mut k = [vec![0.0; m], vec![0.0; m], vec![0.0; m], vec![0.0; m]];
    let mut tmp = vec![0.0; m];
    let mut fx = vec![0.0; m];
    let mut x = x0.coords().to_vec();
    let mut step = 0u64;
    visit(0.0, &x);
    loop {
        let t = step as f64 * cfg.dt;
        f.eval_into(&x, &mut fx);
        if norm(&fx) < cfg.convergence_eps {
            return Ok((x, Termination::Converged));
        }
        if norm(&x) < cfg.floor_eps {
            return Ok((x, Termination::StepUnderflow));
        }
        if t >= cfg.t_max {
            return Ok((x, Termination::MaxTime));
        }
        let next = rk4_step(f, &x, cfg.dt, &mut k, &mut tmp);
        if !f.domain().contains(&next) {
            return Ok((x, Termination::LeftDomain));
        }
        x = next;
        step += 1;
        visit(step as f64 * cfg.dt, &x);
    }
}

/// Integrates `ẋ = F(x)` from `x0`, recording every step.
pub fn integrate(f: &VectorField, x0: &Point, cfg: &IntegratorConfig) -> Result<Trajectory> {
    let mut samples = Vec::new();
    let (_, reason) = run(f, x0, cfg, |t, x| samples.push((t, Point::from_vec(x.to_vec()))))?;
    Ok(Trajectory {
        samples,
        config: *cfg,
        terminated_reason: reason,
    })
}

/// Absolute tolerance of [`lyapunov_integral`].
pub const QUADRATURE_TOL: f64 = 1e-10;
const MAX_DEPTH: u32 = 48;

fn simpson(a: f64, fa: f64, b: f64, fb: f64, fm: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adaptive(
    g: &dyn Fn(f64) -> f64,
    a: f64,
    fa: f64,
    b: f64,
    fb: f64,
    m: f64,
    fm: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let (flm, frm) = (g(lm), g(rm));
    let left = simpson(a, fa, m, fm, flm);
    let right = simpson(m, fm, b, fb, frm);
    let diff = left + right - whole;
    if depth == 0 || diff.abs() <= 15.0 * tol {
        return left + right + diff / 15.0;
    }
    adaptive(g, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1)
        + adaptive(g, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1)
}

fn integrate_1d(g: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let (fa, fb) = (g(a), g(b));
    let m = 0.5 * (a + b);
    let fm = g(m);
    let whole = simpson(a, fa, b, fb, fm);
    adaptive(g, a, fa, b, fb, m, fm, whole, QUADRATURE_TOL, MAX_DEPTH)
}

/// `∫_{x_ref}^{x} f(y) dy` by adaptive Simpson quadrature.
pub fn lyapunov_integral(f: &ScalarField, x_ref: f64, x: f64) -> Result<f64> {
    if f.dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: f.dim(),
        });
    }
    for v in [x_ref, x] {
        if !f.domain().contains(&[v]) {
            return Err(Error::OutsideDomain { point: vec![v] });
        }
    }
    Ok(integrate_1d(&|y| f.value(&[y]), x_ref, x))
}

/// Allowed increase of the Lyapunov function between consecutive samples.
pub const LYAPUNOV_SLACK: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trial {
    pub x0: Point,
    pub final_state: Point,
    pub final_distance: f64,
    /// Nearest candidate point, when the trial converged.
    pub limit_point: Option<Point>,
    pub converged: bool,
    pub terminated_reason: Termination,
    pub final_time: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SetStabilityReport {
    pub candidate_set: Vec<Point>,
    pub trials: Vec<Trial>,
    /// Whether `L(x) = −∫F` was tracked (one-dimensional flows only).
    pub lyapunov_checked: bool,
    pub lyapunov_monotone: bool,
    pub max_lyapunov_increase: f64,
    pub config: IntegratorConfig,
}

impl SetStabilityReport {
    pub fn all_converged(&self) -> bool {
        self.trials.iter().all(|t| t.converged)
    }
}

/// Integrates from every initial condition and measures the distance of each
/// final state to the candidate set. A trial converges when that distance is
/// at most `convergence_eps`. In one dimension the increments of
/// `L(x) = ∫ −F` between consecutive states are checked against
/// [`LYAPUNOV_SLACK`].
pub fn check_setwise_stability(
    f: &VectorField,
    candidate: &[Point],
    initial: &SampleSet,
    cfg: &IntegratorConfig,
) -> Result<SetStabilityReport> {
    if candidate.is_empty() {
        return Err(Error::Empty("candidate set"));
    }
    if initial.is_empty() {
        return Err(Error::Empty("initial conditions"));
    }
    cfg.validate()?;
    let one_dim = f.dim() == 1;
    let results: Vec<Result<(Trial, f64)>> = initial
        .points()
        .par_iter()
        .map(|x0| {
            let mut prev: Option<f64> = None;
            let mut worst = f64::NEG_INFINITY;
            let mut last_t = 0.0;
            let (x, reason) = run(f, x0, cfg, |t, x| {
                last_t = t;
                if one_dim {
                    if let Some(p) = prev {
                        let inc = integrate_1d(&|y| -f.value(&[y])[0], p, x[0]);
                        worst = worst.max(inc);
                    }
                    prev = Some(x[0]);
                }
            })?;
            let (nearest, dist) = candidate
                .iter()
                .map(|c| (c, distance(c.coords(), &x)))
                .fold((&candidate[0], f64::INFINITY), |best, cur| {
                    if cur.1 < best.1 {
                        cur
                    } else {
                        best
                    }
                });
            let converged = dist <= cfg.convergence_eps;
            Ok((
                Trial {
                    x0: x0.clone(),
                    final_state: Point::from_vec(x),
                    final_distance: dist,
                    limit_point: converged.then(|| nearest.clone()),
                    converged,
                    terminated_reason: reason,
                    final_time: last_t,
                },
                worst,
            ))
        })
        .collect();
    let mut trials = Vec::with_capacity(results.len());
    let mut max_inc = f64::NEG_INFINITY;
    for r in results {
        let (trial, worst) = r?;
        max_inc = max_inc.max(worst);
        trials.push(trial);
    }
    if !max_inc.is_finite() {
        max_inc = 0.0;
    }
    Ok(SetStabilityReport {
        candidate_set: candidate.to_vec(),
        trials,
        lyapunov_checked: one_dim,
        lyapunov_monotone: !one_dim || max_inc <= LYAPUNOV_SLACK,
        max_lyapunov_increase: max_inc,
        config: *cfg,
    })
}
