//! Solution concepts checked against finite challenger and neighbourhood sets.
//!
//! Global quantifiers ("for all x ∈ X") range over a [`Challengers`] set;
//! local ones ("for all x in some neighbourhood O") over a [`Neighborhood`].
//! Per-point work runs in parallel; every reduction keeps the witness with
//! the smallest sample index so results do not depend on scheduling.
//!
//! Strict inequalities (ESS, strict local minimum, strictness off a set)
//! demand a margin proportional to the distance from the reference point or
//! set: `(x−p)·c(x) > tau·‖x−p‖`. Samples within `tau` of the reference count
//! as the reference itself.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{dot, gradient_field, Domain, Point, ScalarField, VectorField};
use crate::polyorder::{
    strictly_dominates_scalar, strictly_dominates_vector, weak_violation_scalar,
    weak_violation_vector, ToleranceConfig,
};
use crate::sampling::{
    sample_ball, sample_domain, Neighborhood, SampleDescriptor, SampleSet, Sampling,
};

/// Extra ε values to force into the sweep of `compare(x, p)`; arguments are `(x, p)`.
pub type HintFn = Arc<dyn Fn(&[f64], &[f64]) -> Vec<f64> + Send + Sync>;

/// Challenger points standing in for the whole domain, plus optional analytic ε hints.
#[derive(Clone)]
pub struct Challengers {
    pub samples: SampleSet,
    hints: Option<HintFn>,
}

impl fmt::Debug for Challengers {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Challengers")
            .field("samples", &self.samples.descriptor())
            .field("hints", &self.hints.is_some())
            .finish()
    }
}

impl Challengers {
    pub fn new(samples: SampleSet) -> Self {
        Challengers {
            samples,
            hints: None,
        }
    }

    pub fn with_hints(mut self, hints: HintFn) -> Self {
        self.hints = Some(hints);
        self
    }

    pub fn has_hints(&self) -> bool {
        self.hints.is_some()
    }

    /// `Grid(2048)` in one dimension, otherwise `SeededRandom(4096)` plus all vertices.
    pub fn default_for(domain: &Domain, seed: u64) -> Result<Self> {
        let samples = if domain.dim() == 1 {
            sample_domain(domain, Sampling::Grid(2048), seed)?
        } else {
            let random = sample_domain(domain, Sampling::Random(4096), seed)?;
            match domain {
                Domain::Box { .. } => random.union(SampleSet::explicit(domain, domain.vertices())?),
                // simplex sampling already leads with the vertices
                _ => random,
            }
        };
        Ok(Challengers::new(samples))
    }

    pub fn augmented(mut self, extra: &SampleSet) -> Self {
        self.samples = self.samples.union(extra.clone());
        self
    }

    fn hints_for(&self, x: &Point, p: &Point) -> Vec<f64> {
        self.hints
            .as_ref()
            .map(|h| h(x.coords(), p.coords()))
            .unwrap_or_default()
    }
}

/// A sample that refutes (or, for minimality, dominates) the tested point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub point: Point,
    /// Segment parameter where the decisive inequality was observed.
    pub eps: Option<f64>,
    /// The offending value (sign convention documented per check).
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub holds: bool,
    pub witness: Option<Witness>,
    /// Extreme statistic over all samples; `None` when nothing was measured.
    pub stat: Option<f64>,
}

fn ensure_point(domain: &Domain, p: &Point, cfg: &ToleranceConfig) -> Result<()> {
    cfg.validate()?;
    domain.ensure_contains(p)
}

fn ensure_nonempty(s: &SampleSet, what: &'static str) -> Result<()> {
    if s.is_empty() {
        Err(Error::Empty(what))
    } else {
        Ok(())
    }
}

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// `(x−p)·c(p) ≥ −tau` for every challenger. `stat` is the minimum of `(x−p)·c(p)`.
pub fn is_critical_element(
    c: &VectorField,
    p: &Point,
    challengers: &SampleSet,
    cfg: &ToleranceConfig,
) -> Result<Check> {
    ensure_point(c.domain(), p, cfg)?;
    ensure_nonempty(challengers, "challenger set")?;
    let cp = c.value(p.coords());
    let vals: Vec<f64> = challengers
        .points()
        .par_iter()
        .map(|x| dot(&sub(x.coords(), p.coords()), &cp))
        .collect();
    let stat = vals.iter().copied().fold(f64::INFINITY, f64::min);
    let witness = vals
        .iter()
        .position(|v| *v < -cfg.tau)
        .map(|i| Witness {
            point: challengers.points()[i].clone(),
            eps: None,
            value: vals[i],
        });
    Ok(Check {
        holds: witness.is_none(),
        witness,
        stat: Some(stat),
    })
}

/// No challenger strictly `⪯_c`-dominates `p`.
///
/// A challenger `x` that invades `p` (`(x−p)·c(p) < −tau`) is also tried at
/// the shrunken points `p + 2^-k (x−p)` while the invasion stays above `tau`,
/// so a point that fails criticality on the same set is never reported minimal.
/// The witness value is `min_delta` of the dominating comparison.
pub fn is_minimal(
    c: &VectorField,
    p: &Point,
    challengers: &Challengers,
    cfg: &ToleranceConfig,
) -> Result<Check> {
    ensure_point(c.domain(), p, cfg)?;
    ensure_nonempty(&challengers.samples, "challenger set")?;
    let cp = c.value(p.coords());
    let witness = challengers
        .samples
        .points()
        .par_iter()
        .find_map_first(|x| {
            let hit = |z: &Point| {
                strictly_dominates_vector(c, z, p, cfg, &challengers.hints_for(z, p)).map(
                    |(eps, min)| Witness {
                        point: z.clone(),
                        eps: Some(eps),
                        value: min,
                    },
                )
            };
            if let Some(w) = hit(x) {
                return Some(w);
            }
            let dir = sub(x.coords(), p.coords());
            let invasion = dot(&dir, &cp);
            if invasion >= -cfg.tau {
                return None;
            }
            let mut s = 0.5;
            while s * invasion.abs() > cfg.tau {
                let z: Vec<f64> = p.coords().iter().zip(&dir).map(|(a, d)| a + s * d).collect();
                if let Some(w) = hit(&Point::from_vec(z)) {
                    return Some(w);
                }
                s *= 0.5;
            }
            None
        });
    Ok(Check {
        holds: witness.is_none(),
        witness,
        stat: None,
    })
}

/// `p` strictly dominates no challenger; evaluated as [`is_minimal`] on `−c`.
pub fn is_maximal(
    c: &VectorField,
    p: &Point,
    challengers: &Challengers,
    cfg: &ToleranceConfig,
) -> Result<Check> {
    is_minimal(&c.negated(), p, challengers, cfg)
}

/// No challenger strictly `⪯_f`-dominates `p`.
pub fn is_minimal_scalar(
    f: &ScalarField,
    p: &Point,
    challengers: &SampleSet,
    cfg: &ToleranceConfig,
) -> Result<Check> {
    ensure_point(f.domain(), p, cfg)?;
    ensure_nonempty(challengers, "challenger set")?;
    let witness = challengers.points().par_iter().find_map_first(|x| {
        strictly_dominates_scalar(f, x, p, cfg).map(|(eps, min)| Witness {
            point: x.clone(),
            eps: Some(eps),
            value: min,
        })
    });
    Ok(Check {
        holds: witness.is_none(),
        witness,
        stat: None,
    })
}

pub fn is_maximal_scalar(
    f: &ScalarField,
    p: &Point,
    challengers: &SampleSet,
    cfg: &ToleranceConfig,
) -> Result<Check> {
    is_minimal_scalar(&f.negated(), p, challengers, cfg)
}

fn ensure_neighborhood(domain: &Domain, nb: &Neighborhood, cfg: &ToleranceConfig) -> Result<()> {
    ensure_point(domain, &nb.center, cfg)?;
    ensure_nonempty(&nb.samples, "neighbourhood samples")
}

/// Weak check: holds iff every per-sample value is at most `tau`; `stat` is the maximum.
fn weak_check(nb: &Neighborhood, cfg: &ToleranceConfig, vals: Vec<(f64, Option<f64>)>) -> Check {
    let stat = vals.iter().map(|v| v.0).fold(f64::NEG_INFINITY, f64::max);
    let witness = vals.iter().position(|v| v.0 > cfg.tau).map(|i| Witness {
        point: nb.samples.points()[i].clone(),
        eps: vals[i].1,
        value: vals[i].0,
    });
    Check {
        holds: witness.is_none(),
        witness,
        stat: Some(stat),
    }
}

/// Strict check over samples farther than `tau` from the centre: holds iff every
/// ratio exceeds `tau`; `stat` is the minimum ratio.
fn strict_check(nb: &Neighborhood, cfg: &ToleranceConfig, ratios: Vec<Option<f64>>) -> Check {
    let stat = ratios.iter().flatten().copied().reduce(f64::min);
    let witness = ratios
        .iter()
        .position(|r| r.is_some_and(|r| r <= cfg.tau))
        .map(|i| Witness {
            point: nb.samples.points()[i].clone(),
            eps: None,
            value: ratios[i].unwrap(),
        });
    Check {
        holds: witness.is_none(),
        witness,
        stat,
    }
}

/// Neutral stability: `p·c(x) ≤ x·c(x) + tau` on the neighbourhood.
/// Values are `(p−x)·c(x)`.
pub fn is_nss(c: &VectorField, nb: &Neighborhood, cfg: &ToleranceConfig) -> Result<Check> {
    ensure_neighborhood(c.domain(), nb, cfg)?;
    let p = nb.center.coords();
    let vals = nb
        .samples
        .points()
        .par_iter()
        .map(|x| (dot(&sub(p, x.coords()), &c.value(x.coords())), None))
        .collect();
    Ok(weak_check(nb, cfg, vals))
}

/// `p ⪯_c x` for every neighbourhood sample. Values are the largest `δ` on each segment.
pub fn is_local_min_polyorder_vector(
    c: &VectorField,
    nb: &Neighborhood,
    cfg: &ToleranceConfig,
) -> Result<Check> {
    ensure_neighborhood(c.domain(), nb, cfg)?;
    let vals = nb
        .samples
        .points()
        .par_iter()
        .map(|x| {
            let (max, eps) = weak_violation_vector(c, &nb.center, x, cfg);
            (max, Some(eps))
        })
        .collect();
    Ok(weak_check(nb, cfg, vals))
}

/// `p ⪯_f x` for every neighbourhood sample. Values are the largest ascent on each segment.
pub fn is_local_min_polyorder_scalar(
    f: &ScalarField,
    nb: &Neighborhood,
    cfg: &ToleranceConfig,
) -> Result<Check> {
    ensure_neighborhood(f.domain(), nb, cfg)?;
    let vals = nb
        .samples
        .points()
        .par_iter()
        .map(|x| {
            let (max, eps) = weak_violation_scalar(f, &nb.center, x, cfg);
            (max, Some(eps))
        })
        .collect();
    Ok(weak_check(nb, cfg, vals))
}

/// Evolutionary stability: `(x−p)·c(x) > tau·‖x−p‖` for samples with `‖x−p‖ > tau`.
/// Values are `(x−p)·c(x)/‖x−p‖`.
pub fn is_ess(c: &VectorField, nb: &Neighborhood, cfg: &ToleranceConfig) -> Result<Check> {
    ensure_neighborhood(c.domain(), nb, cfg)?;
    let p = nb.center.coords();
    let ratios = nb
        .samples
        .points()
        .par_iter()
        .map(|x| {
            let d = sub(x.coords(), p);
            let r = crate::field::norm(&d);
            (r > cfg.tau).then(|| dot(&d, &c.value(x.coords())) / r)
        })
        .collect();
    Ok(strict_check(nb, cfg, ratios))
}

/// `f(x) − f(p) > tau·‖x−p‖` for samples with `‖x−p‖ > tau`.
/// Values are `(f(x) − f(p))/‖x−p‖`.
pub fn is_strict_local_min_scalar(
    f: &ScalarField,
    nb: &Neighborhood,
    cfg: &ToleranceConfig,
) -> Result<Check> {
    ensure_neighborhood(f.domain(), nb, cfg)?;
    let p = nb.center.coords();
    let fp = f.value(p);
    let ratios = nb
        .samples
        .points()
        .par_iter()
        .map(|x| {
            let r = crate::field::distance(x.coords(), p);
            (r > cfg.tau).then(|| (f.value(x.coords()) - fp) / r)
        })
        .collect();
    Ok(strict_check(nb, cfg, ratios))
}

pub type DistanceFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// A finite list of anchor points approximating a closed set, with the
/// distance-to-set used to decide which samples lie "on" the set.
#[derive(Clone)]
pub struct CandidateSet {
    anchors: Vec<Point>,
    distance: Option<DistanceFn>,
}

impl fmt::Debug for CandidateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CandidateSet")
            .field("anchors", &self.anchors.len())
            .field("exact_distance", &self.distance.is_some())
            .finish()
    }
}

impl CandidateSet {
    pub fn new(anchors: Vec<Point>) -> Result<Self> {
        if anchors.is_empty() {
            return Err(Error::Empty("candidate set"));
        }
        Ok(CandidateSet {
            anchors,
            distance: None,
        })
    }

    /// Replaces the default (minimum over anchors) with an exact distance to the represented set.
    pub fn with_distance(mut self, d: DistanceFn) -> Self {
        self.distance = Some(d);
        self
    }

    pub fn anchors(&self) -> &[Point] {
        &self.anchors
    }

    pub fn distance_to(&self, x: &[f64]) -> f64 {
        match &self.distance {
            Some(d) => d(x),
            None => self
                .anchors
                .iter()
                .map(|a| crate::field::distance(a.coords(), x))
                .fold(f64::INFINITY, f64::min),
        }
    }
}

/// Neighbourhood sampling used around each member of a candidate set.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SetCheckOptions {
    pub radius: f64,
    pub samples_per_member: usize,
    /// Member `i` is sampled with `seed + i`.
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SetWitness {
    pub member: Point,
    pub point: Point,
    pub value: f64,
    pub distance_to_set: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SetCheck {
    pub holds: bool,
    pub witness: Option<SetWitness>,
    pub members_checked: usize,
    pub samples_checked: usize,
}

/// Shared sweep: `gap(member, x)` must be `≥ −tau` near the set and `> tau·dist` off it.
fn set_sweep(
    domain: &Domain,
    cand: &CandidateSet,
    opts: &SetCheckOptions,
    cfg: &ToleranceConfig,
    gap: impl Fn(&[f64], &[f64]) -> f64 + Sync,
) -> Result<SetCheck> {
    cfg.validate()?;
    let mut samples_checked = 0;
    for (i, m) in cand.anchors.iter().enumerate() {
        domain.ensure_contains(m)?;
        let nb = sample_ball(
            domain,
            m,
            opts.radius,
            opts.samples_per_member,
            opts.seed.wrapping_add(i as u64),
        )?;
        samples_checked += nb.samples.len();
        let bad = nb.samples.points().par_iter().find_map_first(|x| {
            let v = gap(m.coords(), x.coords());
            let dist = cand.distance_to(x.coords());
            let ok = if dist <= cfg.tau {
                v >= -cfg.tau
            } else {
                v > cfg.tau * dist
            };
            (!ok).then(|| SetWitness {
                member: m.clone(),
                point: x.clone(),
                value: v,
                distance_to_set: dist,
            })
        });
        if let Some(w) = bad {
            return Ok(SetCheck {
                holds: false,
                witness: Some(w),
                members_checked: i + 1,
                samples_checked,
            });
        }
    }
    Ok(SetCheck {
        holds: true,
        witness: None,
        members_checked: cand.anchors.len(),
        samples_checked,
    })
}

/// Evolutionarily stable set: `(x−x*)·c(x) ≥ −tau` around each member, and
/// `> tau·dist(x, set)` off the set.
pub fn is_ess_set(
    c: &VectorField,
    cand: &CandidateSet,
    opts: &SetCheckOptions,
    cfg: &ToleranceConfig,
) -> Result<SetCheck> {
    set_sweep(c.domain(), cand, opts, cfg, |m, x| dot(&sub(x, m), &c.value(x)))
}

/// Scalar analogue of [`is_ess_set`] with `f(x) − f(x*)` in place of `(x−x*)·c(x)`.
pub fn is_almost_strictly_minimal_set(
    f: &ScalarField,
    cand: &CandidateSet,
    opts: &SetCheckOptions,
    cfg: &ToleranceConfig,
) -> Result<SetCheck> {
    set_sweep(f.domain(), cand, opts, cfg, |m, x| f.value(x) - f.value(m))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldKind {
    Scalar,
    Vector,
}

/// The field a point is classified against.
#[derive(Clone, Copy, Debug)]
pub enum FieldRef<'a> {
    Scalar(&'a ScalarField),
    Vector(&'a VectorField),
}

impl FieldRef<'_> {
    fn domain(&self) -> &Domain {
        match self {
            FieldRef::Scalar(f) => f.domain(),
            FieldRef::Vector(c) => c.domain(),
        }
    }
}

/// Step used for the finite-difference gradient when a scalar point is tested for criticality.
pub const SCALAR_GRADIENT_STEP: f64 = 1e-6;

#[derive(Clone, Debug)]
pub struct ClassifyOptions {
    /// Defaults to `0.05 · diameter`.
    pub radius: Option<f64>,
    pub neighborhood_count: usize,
    pub seed: u64,
    /// Defaults to [`Challengers::default_for`]; neighbourhood samples are always added.
    pub challengers: Option<Challengers>,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions {
            radius: None,
            neighborhood_count: 512,
            seed: 42,
            challengers: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub kind: FieldKind,
    pub point: Point,
    pub critical: bool,
    pub minimal: bool,
    pub maximal: bool,
    pub nss: Option<bool>,
    pub local_min_polyorder: bool,
    pub ess: Option<bool>,
    pub strict_local_min: Option<bool>,
    /// A challenger strictly dominating `point`; present iff `minimal` is false.
    pub dominating_witness: Option<Witness>,
    /// Whether analytic ε hints were injected into the dominance sweeps.
    pub analytic_hints: bool,
    pub challengers_used: SampleDescriptor,
    pub neighborhood: SampleDescriptor,
    pub neighborhood_radius: f64,
    pub seed: u64,
    pub config: ToleranceConfig,
}

fn breach(p: &Point, what: &str) -> Error {
    Error::InvariantBreach(format!("{what} at {p}"))
}

/// Runs every applicable check at `p` on shared challenger and neighbourhood
/// sets, then asserts the inclusion chain (`ess ⇒ minimal ⇒ critical`,
/// `local-min ⇒ critical` for vector fields; `strict local min ⇒ minimal`
/// for scalar fields).
pub fn classify_point(
    field: FieldRef<'_>,
    p: &Point,
    opts: &ClassifyOptions,
    cfg: &ToleranceConfig,
) -> Result<ClassificationReport> {
    let domain = field.domain();
    ensure_point(domain, p, cfg)?;
    let radius = opts.radius.unwrap_or(0.05 * domain.diameter());
    let nb = sample_ball(domain, p, radius, opts.neighborhood_count, opts.seed)?;
    let challengers = match &opts.challengers {
        Some(ch) => ch.clone(),
        None => Challengers::default_for(domain, opts.seed)?,
    }
    .augmented(&nb.samples);

    let report = |kind, critical: Check, minimal: Check, maximal: Check| ClassificationReport {
        kind,
        point: p.clone(),
        critical: critical.holds,
        minimal: minimal.holds,
        maximal: maximal.holds,
        nss: None,
        local_min_polyorder: false,
        ess: None,
        strict_local_min: None,
        dominating_witness: minimal.witness,
        analytic_hints: challengers.has_hints(),
        challengers_used: challengers.samples.descriptor(),
        neighborhood: nb.samples.descriptor(),
        neighborhood_radius: radius,
        seed: opts.seed,
        config: *cfg,
    };

    match field {
        FieldRef::Vector(c) => {
            let critical = is_critical_element(c, p, &challengers.samples, cfg)?;
            let minimal = is_minimal(c, p, &challengers, cfg)?;
            let maximal = is_maximal(c, p, &challengers, cfg)?;
            let nss = is_nss(c, &nb, cfg)?.holds;
            let local_min = is_local_min_polyorder_vector(c, &nb, cfg)?.holds;
            let ess = is_ess(c, &nb, cfg)?.holds;
            let mut r = report(FieldKind::Vector, critical, minimal, maximal);
            r.nss = Some(nss);
            r.local_min_polyorder = local_min;
            r.ess = Some(ess);
            if ess && !r.minimal {
                return Err(breach(p, "ESS point is not minimal"));
            }
            if r.minimal && !r.critical {
                return Err(breach(p, "minimal point is not critical"));
            }
            if local_min && !r.critical {
                return Err(breach(p, "polyorder local minimum is not critical"));
            }
            Ok(r)
        }
        FieldRef::Scalar(f) => {
            let grad = gradient_field(f, SCALAR_GRADIENT_STEP)?;
            let critical = is_critical_element(&grad, p, &challengers.samples, cfg)?;
            let minimal = is_minimal_scalar(f, p, &challengers.samples, cfg)?;
            let maximal = is_maximal_scalar(f, p, &challengers.samples, cfg)?;
            let local_min = is_local_min_polyorder_scalar(f, &nb, cfg)?.holds;
            let strict = is_strict_local_min_scalar(f, &nb, cfg)?.holds;
            let mut r = report(FieldKind::Scalar, critical, minimal, maximal);
            r.local_min_polyorder = local_min;
            r.strict_local_min = Some(strict);
            if strict && !r.minimal {
                return Err(breach(p, "strict local minimum is not minimal"));
            }
            Ok(r)
        }
    }
}
