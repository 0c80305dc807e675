//! Segment-wise dominance relations `⪯_f` (scalar fields) and `⪯_c` (vector fields).
//!
//! Both relations compare two points `x`, `y` along the segment
//! `y_ε = εx + (1−ε)y`:
//!
//! * vector: `x ⪯_c y` iff `δ(ε) = (x−y)·c(y_ε) ≤ 0` for every ε;
//! * scalar: `x ⪯_f y` iff `g(ε) = f(y_ε)` is nonincreasing in ε.
//!
//! The quantifier over ε is certified on a finite grid: a uniform grid of
//! `n_eps` points, geometric grading toward both endpoints, caller-supplied
//! hint points, and bisection refinement around sign changes (vector) or
//! monotonicity flips (scalar). Values within `tau` of zero count as equality.
//! Both directions of a comparison come out of the same sweep, so the strict
//! part is antisymmetric by construction.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{segment_into, Point, ScalarField, VectorField};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ToleranceConfig {
    pub tau: f64,
    pub n_eps: usize,
    pub max_refine_depth: usize,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        ToleranceConfig {
            tau: 1e-9,
            n_eps: 1025,
            max_refine_depth: 20,
        }
    }
}

impl ToleranceConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tau.is_finite() && self.tau > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "tau must be positive, got {}",
                self.tau
            )));
        }
        if self.n_eps < 3 {
            return Err(Error::InvalidArgument(format!(
                "n_eps must be at least 3, got {}",
                self.n_eps
            )));
        }
        Ok(())
    }

    pub fn with_tau(mut self, tau: f64) -> Self {
        self.tau = tau;
        self
    }

    pub fn with_n_eps(mut self, n_eps: usize) -> Self {
        self.n_eps = n_eps;
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Relation {
    /// `x ≺ y`.
    StrictlyDominates,
    /// `x ⪯ y` holds, neither `y ⪯ x` nor a strict gap between the endpoints does.
    WeaklyDominatesNotStrict,
    Incomparable,
    /// `y ≺ x`.
    ReverseStrict,
    ReverseWeak,
    /// `x ⪯ y` and `y ⪯ x`.
    Equivalent,
}

impl Relation {
    /// Whether `x ⪯ y` holds.
    pub fn forward_weak(self) -> bool {
        matches!(
            self,
            Relation::StrictlyDominates | Relation::WeaklyDominatesNotStrict | Relation::Equivalent
        )
    }

    /// Whether `y ⪯ x` holds.
    pub fn reverse_weak(self) -> bool {
        matches!(
            self,
            Relation::ReverseStrict | Relation::ReverseWeak | Relation::Equivalent
        )
    }
}

/// Outcome of one pairwise comparison.
///
/// For vector fields `max_delta`/`min_delta` are the extremes of
/// `δ(ε) = (x−y)·c(y_ε)`. For scalar fields they are the largest ascent and
/// (negated) largest descent of `g` as ε increases, i.e. the extremes of
/// `g(ε_j) − g(ε_i)` over grid pairs `ε_i < ε_j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DominanceVerdict {
    pub relation: Relation,
    /// ε at which `x` beats `y` by more than `tau`.
    pub witness_eps_strict: Option<f64>,
    /// ε at which `y` beats `x` by more than `tau`.
    pub witness_eps_violation: Option<f64>,
    pub max_delta: f64,
    pub min_delta: f64,
    pub config: ToleranceConfig,
}

fn check_pair(domain_ok: impl Fn(&Point) -> Result<()>, x: &Point, y: &Point) -> Result<()> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch {
            expected: x.dim(),
            got: y.dim(),
        });
    }
    domain_ok(x)?;
    domain_ok(y)
}

/// Uniform grid, endpoint grading and hints in (0, 1), sorted and deduplicated.
pub(crate) fn base_grid(cfg: &ToleranceConfig, hints: &[f64]) -> Vec<f64> {
    let n = cfg.n_eps;
    let step = 1.0 / (n - 1) as f64;
    let mut eps: Vec<f64> = (0..n)
        .map(|k| if k == n - 1 { 1.0 } else { k as f64 * step })
        .collect();
    let mut h = step;
    for _ in 0..cfg.max_refine_depth {
        h *= 0.5;
        eps.push(h);
        eps.push(1.0 - h);
    }
    eps.extend(hints.iter().copied().filter(|e| *e > 0.0 && *e < 1.0));
    eps.sort_by(f64::total_cmp);
    eps.dedup();
    eps
}

struct VectorSweep<'a> {
    c: &'a VectorField,
    x: &'a [f64],
    y: &'a [f64],
    diff: Vec<f64>,
    z: Vec<f64>,
    out: Vec<f64>,
}

impl<'a> VectorSweep<'a> {
    fn new(c: &'a VectorField, x: &'a [f64], y: &'a [f64]) -> Self {
        let m = x.len();
        VectorSweep {
            c,
            x,
            y,
            diff: x.iter().zip(y).map(|(a, b)| a - b).collect(),
            z: vec![0.0; m],
            out: vec![0.0; m],
        }
    }

    #[inline]
    fn delta(&mut self, eps: f64) -> f64 {
        segment_into(self.x, self.y, eps, &mut self.z);
        self.c.eval_into(&self.z, &mut self.out);
        crate::field::dot(&self.diff, &self.out)
    }
}

/// Evaluates the refined δ-profile. Returns `None` as soon as a sample
/// exceeds `stop_above` (used by minimality sweeps that only need to know
/// whether `x ⪯_c y` can still hold).
fn vector_profile(
    c: &VectorField,
    x: &Point,
    y: &Point,
    cfg: &ToleranceConfig,
    hints: &[f64],
    stop_above: Option<f64>,
) -> Option<Vec<(f64, f64)>> {
    let mut sweep = VectorSweep::new(c, x.coords(), y.coords());
    let grid = base_grid(cfg, hints);
    let mut prof = Vec::with_capacity(grid.len());
    for e in grid {
        let d = sweep.delta(e);
        if stop_above.is_some_and(|s| d > s) {
            return None;
        }
        prof.push((e, d));
    }
    let mut extra = Vec::new();
    for w in prof.windows(2) {
        let ((mut a, mut da), (mut b, db)) = (w[0], w[1]);
        if !((da < 0.0 && db > 0.0) || (da > 0.0 && db < 0.0)) {
            continue;
        }
        for _ in 0..cfg.max_refine_depth {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            let dm = sweep.delta(m);
            if stop_above.is_some_and(|s| dm > s) {
                return None;
            }
            extra.push((m, dm));
            if (dm < 0.0) == (da < 0.0) && dm != 0.0 {
                a = m;
                da = dm;
            } else {
                b = m;
            }
        }
    }
    merge(&mut prof, extra);
    Some(prof)
}

fn merge(prof: &mut Vec<(f64, f64)>, extra: Vec<(f64, f64)>) {
    if extra.is_empty() {
        return;
    }
    prof.extend(extra);
    prof.sort_by(|a, b| a.0.total_cmp(&b.0));
    prof.dedup_by(|a, b| a.0 == b.0);
}

/// Refined samples of `δ(ε) = (x−y)·c(εx+(1−ε)y)`, sorted by ε.
pub fn segment_profile(
    c: &VectorField,
    x: &Point,
    y: &Point,
    cfg: &ToleranceConfig,
) -> Result<Vec<(f64, f64)>> {
    cfg.validate()?;
    check_pair(|p| c.domain().ensure_contains(p), x, y)?;
    Ok(vector_profile(c, x, y, cfg, &[], None).expect("no early exit requested"))
}

fn extremes(prof: &[(f64, f64)]) -> (f64, f64, f64, f64) {
    let mut max = (f64::NEG_INFINITY, 0.0);
    let mut min = (f64::INFINITY, 0.0);
    for &(e, d) in prof {
        if d > max.0 {
            max = (d, e);
        }
        if d < min.0 {
            min = (d, e);
        }
    }
    (max.0, max.1, min.0, min.1)
}

fn vector_verdict(prof: &[(f64, f64)], cfg: &ToleranceConfig) -> DominanceVerdict {
    let tau = cfg.tau;
    let (max, arg_max, min, arg_min) = extremes(prof);
    let fwd = max <= tau;
    let rev = min >= -tau;
    let relation = match (fwd, rev) {
        (true, true) => Relation::Equivalent,
        (true, false) => Relation::StrictlyDominates,
        (false, true) => Relation::ReverseStrict,
        (false, false) => Relation::Incomparable,
    };
    DominanceVerdict {
        relation,
        witness_eps_strict: (min < -tau).then_some(arg_min),
        witness_eps_violation: (max > tau).then_some(arg_max),
        max_delta: max,
        min_delta: min,
        config: *cfg,
    }
}

/// Decides `⪯_c` between `x` and `y` in both directions.
pub fn compare_vector(
    c: &VectorField,
    x: &Point,
    y: &Point,
    cfg: &ToleranceConfig,
) -> Result<DominanceVerdict> {
    compare_vector_with_hints(c, x, y, cfg, &[])
}

/// [`compare_vector`] with extra ε values forced into the sweep, for fields
/// whose behaviour on the segment is known analytically.
pub fn compare_vector_with_hints(
    c: &VectorField,
    x: &Point,
    y: &Point,
    cfg: &ToleranceConfig,
    hints: &[f64],
) -> Result<DominanceVerdict> {
    cfg.validate()?;
    check_pair(|p| c.domain().ensure_contains(p), x, y)?;
    let prof = vector_profile(c, x, y, cfg, hints, None).expect("no early exit requested");
    Ok(vector_verdict(&prof, cfg))
}

/// Returns the strict witness ε and `min_delta` iff
/// `compare_vector_with_hints(..).relation` would be `StrictlyDominates`;
/// stops early once `x ⪯_c y` is refuted. Inputs are assumed validated.
pub(crate) fn strictly_dominates_vector(
    c: &VectorField,
    x: &Point,
    y: &Point,
    cfg: &ToleranceConfig,
    hints: &[f64],
) -> Option<(f64, f64)> {
    let prof = vector_profile(c, x, y, cfg, hints, Some(cfg.tau))?;
    let v = vector_verdict(&prof, cfg);
    (v.relation == Relation::StrictlyDominates).then(|| (v.witness_eps_strict.unwrap(), v.min_delta))
}

/// Largest `δ(ε)` over the refined sweep and where it occurs; `x ⪯_c y` holds
/// iff the value is at most `tau`. Inputs are assumed validated.
pub(crate) fn weak_violation_vector(
    c: &VectorField,
    x: &Point,
    y: &Point,
    cfg: &ToleranceConfig,
) -> (f64, f64) {
    let prof = vector_profile(c, x, y, cfg, &[], None).expect("no early exit requested");
    let (max, arg, _, _) = extremes(&prof);
    (max, arg)
}

fn scalar_profile_inner(
    f: &ScalarField,
    x: &Point,
    y: &Point,
    cfg: &ToleranceConfig,
    hints: &[f64],
    stop_ascent_above: Option<f64>,
) -> Option<Vec<(f64, f64)>> {
    let (xs, ys) = (x.coords(), y.coords());
    let mut z = vec![0.0; xs.len()];
    let mut g = |e: f64| {
        segment_into(xs, ys, e, &mut z);
        f.value(&z)
    };
    let grid = base_grid(cfg, hints);
    let mut prof = Vec::with_capacity(grid.len());
    let mut run_min = f64::INFINITY;
    for e in grid {
        let v = g(e);
        if stop_ascent_above.is_some_and(|s| v - run_min > s) {
            return None;
        }
        run_min = run_min.min(v);
        prof.push((e, v));
    }
    // Bracket local extrema (sign flips of consecutive differences) and shrink toward them.
    let mut extra = Vec::new();
    for k in 1..prof.len() - 1 {
        let d0 = prof[k].1 - prof[k - 1].1;
        let d1 = prof[k + 1].1 - prof[k].1;
        let peak = d0 > 0.0 && d1 < 0.0;
        let valley = d0 < 0.0 && d1 > 0.0;
        if !(peak || valley) {
            continue;
        }
        let better = |a: f64, b: f64| if peak { a > b } else { a < b };
        let (mut a, mut m, mut b) = (prof[k - 1].0, prof[k], prof[k + 1].0);
        for _ in 0..cfg.max_refine_depth {
            let l = 0.5 * (a + m.0);
            let r = 0.5 * (m.0 + b);
            if l <= a || r >= b || l >= m.0 || r <= m.0 {
                break;
            }
            let (gl, gr) = (g(l), g(r));
            extra.push((l, gl));
            extra.push((r, gr));
            if better(gl, m.1) && !better(gr, gl) {
                b = m.0;
                m = (l, gl);
            } else if better(gr, m.1) {
                a = m.0;
                m = (r, gr);
            } else {
                a = l;
                b = r;
            }
        }
    }
    merge(&mut prof, extra);
    if let Some(s) = stop_ascent_above {
        let mut run_min = f64::INFINITY;
        for &(_, v) in &prof {
            if v - run_min > s {
                return None;
            }
            run_min = run_min.min(v);
        }
    }
    Some(prof)
}

/// Refined samples of `g(ε) = f(εx+(1−ε)y)`, sorted by ε.
pub fn scalar_profile(
    f: &ScalarField,
    x: &Point,
    y: &Point,
    cfg: &ToleranceConfig,
) -> Result<Vec<(f64, f64)>> {
    cfg.validate()?;
    check_pair(|p| f.domain().ensure_contains(p), x, y)?;
    Ok(scalar_profile_inner(f, x, y, cfg, &[], None).expect("no early exit requested"))
}

/// Largest ascent and largest descent (as a negative number) over ordered pairs.
fn ascent_descent(prof: &[(f64, f64)]) -> (f64, f64, f64, f64) {
    let mut run_min = prof[0].1;
    let mut run_max = prof[0].1;
    let mut asc = (f64::NEG_INFINITY, 0.0);
    let mut desc = (f64::INFINITY, 0.0);
    for &(e, v) in &prof[1..] {
        if v - run_min > asc.0 {
            asc = (v - run_min, e);
        }
        if v - run_max < desc.0 {
            desc = (v - run_max, e);
        }
        run_min = run_min.min(v);
        run_max = run_max.max(v);
    }
    (asc.0, asc.1, desc.0, desc.1)
}

fn scalar_verdict(prof: &[(f64, f64)], cfg: &ToleranceConfig) -> DominanceVerdict {
    let tau = cfg.tau;
    let (max, arg_max, min, arg_min) = ascent_descent(prof);
    let fwd = max <= tau;
    let rev = min >= -tau;
    // g(0) = f(y), g(1) = f(x)
    let drop = prof[0].1 - prof[prof.len() - 1].1;
    let relation = if fwd && drop > tau {
        Relation::StrictlyDominates
    } else if rev && -drop > tau {
        Relation::ReverseStrict
    } else if fwd && rev {
        Relation::Equivalent
    } else if fwd {
        Relation::WeaklyDominatesNotStrict
    } else if rev {
        Relation::ReverseWeak
    } else {
        Relation::Incomparable
    };
    DominanceVerdict {
        relation,
        witness_eps_strict: (min < -tau).then_some(arg_min),
        witness_eps_violation: (max > tau).then_some(arg_max),
        max_delta: max,
        min_delta: min,
        config: *cfg,
    }
}

/// Decides `⪯_f` between `x` and `y` in both directions.
pub fn compare_scalar(
    f: &ScalarField,
    x: &Point,
    y: &Point,
    cfg: &ToleranceConfig,
) -> Result<DominanceVerdict> {
    cfg.validate()?;
    check_pair(|p| f.domain().ensure_contains(p), x, y)?;
    let prof = scalar_profile_inner(f, x, y, cfg, &[], None).expect("no early exit requested");
    Ok(scalar_verdict(&prof, cfg))
}

pub(crate) fn strictly_dominates_scalar(
    f: &ScalarField,
    x: &Point,
    y: &Point,
    cfg: &ToleranceConfig,
) -> Option<(f64, f64)> {
    let prof = scalar_profile_inner(f, x, y, cfg, &[], Some(cfg.tau))?;
    let v = scalar_verdict(&prof, cfg);
    (v.relation == Relation::StrictlyDominates)
        .then(|| (v.witness_eps_strict.unwrap(), v.min_delta))
}

/// Largest ascent of `g` along the sweep and where it ends; `x ⪯_f y` holds
/// iff the value is at most `tau`.
pub(crate) fn weak_violation_scalar(
    f: &ScalarField,
    x: &Point,
    y: &Point,
    cfg: &ToleranceConfig,
) -> (f64, f64) {
    let prof = scalar_profile_inner(f, x, y, cfg, &[], None).expect("no early exit requested");
    let (max, arg, _, _) = ascent_descent(&prof);
    (max, arg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Domain;

    fn unit() -> Domain {
        Domain::interval(-1.0, 1.0).unwrap()
    }

    fn square_field() -> VectorField {
        VectorField::from_fn_1d("x^2", unit(), |x| x * x)
    }

    #[test]
    fn linear_profile_closed_form() {
        let c = VectorField::from_fn_1d("x", unit(), |x| x);
        let prof = segment_profile(&c, &Point::scalar(0.0), &Point::scalar(1.0), &Default::default())
            .unwrap();
        assert_eq!(prof.first().unwrap(), &(0.0, -1.0));
        assert_eq!(prof.last().unwrap().0, 1.0);
        assert!(prof.last().unwrap().1.abs() < 1e-15);
        for (e, d) in &prof {
            assert!((d - (e - 1.0)).abs() < 1e-14);
        }
    }

    #[test]
    fn square_profile_closed_form() {
        let prof = segment_profile(
            &square_field(),
            &Point::scalar(-0.5),
            &Point::scalar(0.0),
            &Default::default(),
        )
        .unwrap();
        for (e, d) in &prof {
            assert!((d + 0.125 * e * e).abs() < 1e-15);
        }
    }

    #[test]
    fn square_field_axis_domination() {
        let cfg = ToleranceConfig::default();
        let c = square_field();
        let v = compare_vector(&c, &Point::scalar(-0.5), &Point::scalar(0.0), &cfg).unwrap();
        assert_eq!(v.relation, Relation::StrictlyDominates);
        assert!(v.witness_eps_strict.is_some());
        assert!(v.min_delta < -cfg.tau && v.max_delta <= cfg.tau);
        let v = compare_vector(&c, &Point::scalar(0.0), &Point::scalar(0.5), &cfg).unwrap();
        assert_eq!(v.relation, Relation::StrictlyDominates);
        let v = compare_vector(&c, &Point::scalar(0.5), &Point::scalar(0.0), &cfg).unwrap();
        assert_eq!(v.relation, Relation::ReverseStrict);
    }

    #[test]
    fn equal_points_are_equivalent() {
        let cfg = ToleranceConfig::default();
        let p = Point::scalar(0.3);
        let v = compare_vector(&square_field(), &p, &p, &cfg).unwrap();
        assert_eq!(v.relation, Relation::Equivalent);
        let f = ScalarField::new("sq", unit(), |x| x[0] * x[0]);
        let v = compare_scalar(&f, &p, &p, &cfg).unwrap();
        assert_eq!(v.relation, Relation::Equivalent);
        let prof = scalar_profile(&f, &p, &p, &cfg).unwrap();
        assert!(prof.iter().all(|(_, g)| *g == prof[0].1));
    }

    #[test]
    fn scalar_examples() {
        let cfg = ToleranceConfig::default();
        let sq = ScalarField::new("sq", unit(), |x| x[0] * x[0]);
        let prof = scalar_profile(&sq, &Point::scalar(0.0), &Point::scalar(1.0), &cfg).unwrap();
        for (e, g) in &prof {
            assert!((g - (1.0 - e) * (1.0 - e)).abs() < 1e-15);
        }
        let v = compare_scalar(&sq, &Point::scalar(0.0), &Point::scalar(1.0), &cfg).unwrap();
        assert_eq!(v.relation, Relation::StrictlyDominates);

        let cube = ScalarField::new("cube", unit(), |x| x[0].powi(3));
        let prof = scalar_profile(&cube, &Point::scalar(-1.0), &Point::scalar(0.0), &cfg).unwrap();
        for (e, g) in &prof {
            assert!((g + e * e * e).abs() < 1e-15);
        }
        let v = compare_scalar(&cube, &Point::scalar(-1.0), &Point::scalar(0.0), &cfg).unwrap();
        assert_eq!(v.relation, Relation::StrictlyDominates);
    }

    #[test]
    fn scalar_bump_is_incomparable() {
        let cfg = ToleranceConfig::default();
        let bump = ScalarField::new("bump", unit(), |x| 1.0 - x[0] * x[0]);
        let v = compare_scalar(&bump, &Point::scalar(-1.0), &Point::scalar(1.0), &cfg).unwrap();
        assert_eq!(v.relation, Relation::Incomparable);
        assert!((v.max_delta - 1.0).abs() < 1e-12);
        assert!((v.min_delta + 1.0).abs() < 1e-12);
    }

    #[test]
    fn narrow_spike_is_found_by_refinement() {
        // A bump narrower than the uniform spacing, centred between two grid points.
        let cfg = ToleranceConfig::default().with_n_eps(17);
        let centre = 0.5 + 1.0 / 32.0;
        let f = ScalarField::new("spike", Domain::interval(0.0, 1.0).unwrap(), move |x| {
            let t = (x[0] - centre) / 0.02;
            -x[0] + 2.0 * (-t * t).exp()
        });
        let v = compare_scalar(&f, &Point::scalar(1.0), &Point::scalar(0.0), &cfg).unwrap();
        assert!(!v.relation.forward_weak());
    }

    #[test]
    fn domain_and_config_errors() {
        let c = square_field();
        let cfg = ToleranceConfig::default();
        assert!(matches!(
            compare_vector(&c, &Point::scalar(2.0), &Point::scalar(0.0), &cfg),
            Err(Error::OutsideDomain { .. })
        ));
        let bad = ToleranceConfig { n_eps: 2, ..cfg };
        assert!(compare_vector(&c, &Point::scalar(0.0), &Point::scalar(0.1), &bad).is_err());
        let bad = ToleranceConfig { tau: 0.0, ..cfg };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn fast_paths_agree_with_full_verdicts() {
        let cfg = ToleranceConfig::default().with_n_eps(129);
        let c = VectorField::from_fn_1d("wiggle", unit(), |x| (5.0 * x).sin() * x);
        let f = ScalarField::new("wiggle", unit(), |x| (5.0 * x[0]).sin() * x[0]);
        for i in 0..21 {
            for j in 0..21 {
                let x = Point::scalar(-1.0 + 0.1 * i as f64);
                let y = Point::scalar(-1.0 + 0.1 * j as f64);
                let full = compare_vector(&c, &x, &y, &cfg).unwrap();
                let fast = strictly_dominates_vector(&c, &x, &y, &cfg, &[]);
                assert_eq!(full.relation == Relation::StrictlyDominates, fast.is_some());
                assert_eq!(fast.map(|w| w.0), fast.and(full.witness_eps_strict));
                let full = compare_scalar(&f, &x, &y, &cfg).unwrap();
                let fast = strictly_dominates_scalar(&f, &x, &y, &cfg);
                assert_eq!(full.relation == Relation::StrictlyDominates, fast.is_some());
            }
        }
    }

    #[test]
    fn verdict_json_shape() {
        let v = compare_vector(
            &square_field(),
            &Point::scalar(-0.5),
            &Point::scalar(0.0),
            &Default::default(),
        )
        .unwrap();
        let j: serde_json::Value = serde_json::to_value(&v).unwrap();
        assert_eq!(j["relation"], "StrictlyDominates");
        for key in ["witness_eps_strict", "witness_eps_violation", "max_delta", "min_delta"] {
            assert!(j.get(key).is_some(), "missing {key}");
        }
        assert_eq!(j["config"]["n_eps"], 1025);
    }
}
