//! Analytic oracles for `f(x) = x·sin(1/x)` and the rotated-bowl counterexample.
//!
//! The critical points of `f` away from the origin are `1/(nπ)`, where
//! `f'(1/(nπ)) = nπ(−1)^{n+1}`; a positive derivative makes the point minimal,
//! a negative one maximal. The origin is both. Its dominance comparisons are
//! certified with analytic segment witnesses because the oscillation of `f`
//! near zero is far below any ε-grid resolution.

use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classify::{
    is_ess, is_local_min_polyorder_scalar, is_almost_strictly_minimal_set, is_maximal, is_minimal,
    is_nss, is_strict_local_min_scalar, CandidateSet, Challengers, HintFn, SetCheck,
    SetCheckOptions,
};
use crate::dynamics::fmt17;
use crate::error::{Error, Result};
use crate::field::{Domain, Point};
use crate::polyorder::{compare_scalar, compare_vector, Relation, ToleranceConfig};
use crate::registry::{casestudy_domain, lookup, mexican_hat, xsininv};
use crate::sampling::{sample_ball, sample_domain, SampleDescriptor, SampleSet, Sampling};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CriticalKind {
    Minimal,
    Maximal,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub n: i64,
    pub x: f64,
    pub fprime: f64,
    pub kind: CriticalKind,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalCatalog {
    pub n_max: u32,
    /// Ordered by `n`: `−n_max, …, −1, 1, …, n_max`.
    pub entries: Vec<CatalogEntry>,
    /// The origin is critical and both minimal and maximal.
    pub includes_origin: bool,
}

/// `f'(1/(nπ)) = nπ(−1)^{n+1}`.
pub fn fprime_at(n: i64) -> f64 {
    let sign = if n.rem_euclid(2) == 1 { 1.0 } else { -1.0 };
    n as f64 * PI * sign
}

pub fn build_catalog(n_max: u32) -> Result<CriticalCatalog> {
    if n_max == 0 {
        return Err(Error::InvalidArgument("n_max must be at least 1".into()));
    }
    let m = i64::from(n_max);
    let entries = (-m..=m)
        .filter(|n| *n != 0)
        .map(|n| {
            let fprime = fprime_at(n);
            CatalogEntry {
                n,
                x: 1.0 / (n as f64 * PI),
                fprime,
                kind: if fprime > 0.0 {
                    CriticalKind::Minimal
                } else {
                    CriticalKind::Maximal
                },
            }
        })
        .collect();
    Ok(CriticalCatalog {
        n_max,
        entries,
        includes_origin: true,
    })
}

impl CriticalCatalog {
    pub fn points(&self) -> Vec<Point> {
        self.entries.iter().map(|e| Point::scalar(e.x)).collect()
    }

    pub fn minimal_points(&self) -> Vec<f64> {
        self.entries
            .iter()
            .filter(|e| e.kind == CriticalKind::Minimal)
            .map(|e| e.x)
            .collect()
    }

    /// Truncated set of minimal elements, origin included.
    pub fn minimal_set(&self) -> Vec<Point> {
        let mut v: Vec<Point> = self.minimal_points().into_iter().map(Point::scalar).collect();
        v.push(Point::scalar(0.0));
        v
    }
}

/// A point `p` strictly between `0` and `x` with `sign(x·f(p)) = want_sign`.
///
/// `p = ±1/(kπ + π/2)`, so `|sin(1/p)| = 1`. `k` is the first index of the
/// required parity past the first one with `|p| < |x|`.
pub fn origin_witness(x: f64, want_sign: i8) -> Result<f64> {
    if !(x.is_finite() && x != 0.0) {
        return Err(Error::InvalidArgument(format!(
            "origin witness needs a finite nonzero x, got {x}"
        )));
    }
    if want_sign != 1 && want_sign != -1 {
        return Err(Error::InvalidArgument(format!(
            "want_sign must be +1 or -1, got {want_sign}"
        )));
    }
    let s = x.signum();
    let quarter = |k: f64| 1.0 / (k * PI + 0.5 * PI);
    let mut k = ((1.0 / x.abs() - 0.5 * PI) / PI).floor().max(0.0);
    while quarter(k) >= x.abs() {
        k += 1.0;
    }
    k += 1.0;
    // x·f(p) = x·(−1)^k/(kπ + π/2), so the sign is s·(−1)^k.
    let parity = if k % 2.0 == 0.0 { 1.0 } else { -1.0 };
    if s * parity != f64::from(want_sign) {
        k += 1.0;
    }
    Ok(s * quarter(k))
}

/// ε hints for segments touching the origin: `compare(x, 0)` gets `w/x` and
/// `compare(0, p)` gets `1 − w/p`, for witnesses `w` of both signs.
pub fn origin_hints() -> HintFn {
    Arc::new(|x: &[f64], p: &[f64]| {
        let (x, p) = (x[0], p[0]);
        let ws = |v: f64| [origin_witness(v, 1), origin_witness(v, -1)];
        if p == 0.0 && x != 0.0 {
            ws(x).into_iter().flatten().map(|w| w / x).collect()
        } else if x == 0.0 && p != 0.0 {
            ws(p).into_iter().flatten().map(|w| 1.0 - w / p).collect()
        } else {
            Vec::new()
        }
    })
}

/// `Grid(grid_n)` over the case-study domain, the catalog points and the
/// origin, with analytic origin hints attached.
pub fn catalog_challengers(cat: &CriticalCatalog, grid_n: usize) -> Result<Challengers> {
    let d = casestudy_domain();
    let mut pts = cat.points();
    pts.push(Point::scalar(0.0));
    let samples = sample_domain(&d, Sampling::Grid(grid_n), 0)?.union(SampleSet::explicit(&d, pts)?);
    Ok(Challengers::new(samples).with_hints(origin_hints()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CatalogRow {
    pub n: i64,
    pub x: f64,
    pub kind: CriticalKind,
    pub minimal: bool,
    pub maximal: bool,
    pub agrees: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CatalogAgreement {
    pub n_max: u32,
    pub rows: Vec<CatalogRow>,
    pub origin_minimal: bool,
    pub origin_maximal: bool,
    pub all_agree: bool,
    pub challengers: SampleDescriptor,
    pub analytic_hints: bool,
}

/// Classifies every catalog point numerically and compares with its analytic kind.
pub fn verify_catalog(n_max: u32, grid_n: usize, cfg: &ToleranceConfig) -> Result<CatalogAgreement> {
    let cat = build_catalog(n_max)?;
    let c = lookup("xsininv")?.vector;
    let ch = catalog_challengers(&cat, grid_n)?;
    let mut rows = Vec::with_capacity(cat.entries.len());
    for e in &cat.entries {
        let p = Point::scalar(e.x);
        let minimal = is_minimal(&c, &p, &ch, cfg)?.holds;
        let maximal = is_maximal(&c, &p, &ch, cfg)?.holds;
        let agrees = match e.kind {
            CriticalKind::Minimal => minimal && !maximal,
            CriticalKind::Maximal => maximal && !minimal,
        };
        rows.push(CatalogRow {
            n: e.n,
            x: e.x,
            kind: e.kind,
            minimal,
            maximal,
            agrees,
        });
    }
    let origin = Point::scalar(0.0);
    let origin_minimal = is_minimal(&c, &origin, &ch, cfg)?.holds;
    let origin_maximal = is_maximal(&c, &origin, &ch, cfg)?.holds;
    Ok(CatalogAgreement {
        n_max,
        all_agree: rows.iter().all(|r| r.agrees) && origin_minimal && origin_maximal,
        rows,
        origin_minimal,
        origin_maximal,
        challengers: ch.samples.descriptor(),
        analytic_hints: true,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OriginRadiusCheck {
    pub radius: f64,
    pub nss: bool,
    pub ess: bool,
    pub local_min_polyorder: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OriginReport {
    pub minimal: bool,
    pub maximal: bool,
    pub radii: Vec<OriginRadiusCheck>,
    pub analytic_hints: bool,
}

/// Minimality of the origin (with analytic hints) and its local checks at each radius.
pub fn origin_atypicality(
    radii: &[f64],
    n_max: u32,
    grid_n: usize,
    samples: usize,
    seed: u64,
    cfg: &ToleranceConfig,
) -> Result<OriginReport> {
    let c = lookup("xsininv")?.vector;
    let ch = catalog_challengers(&build_catalog(n_max)?, grid_n)?;
    let o = Point::scalar(0.0);
    let mut checks = Vec::new();
    for &r in radii {
        let nb = sample_ball(c.domain(), &o, r, samples, seed)?;
        checks.push(OriginRadiusCheck {
            radius: r,
            nss: is_nss(&c, &nb, cfg)?.holds,
            ess: is_ess(&c, &nb, cfg)?.holds,
            local_min_polyorder: crate::classify::is_local_min_polyorder_vector(&c, &nb, cfg)?
                .holds,
        });
    }
    Ok(OriginReport {
        minimal: is_minimal(&c, &o, &ch, cfg)?.holds,
        maximal: is_maximal(&c, &o, &ch, cfg)?.holds,
        radii: checks,
        analytic_hints: true,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DominanceOptions {
    pub window_lo: f64,
    pub window_hi: f64,
    pub grid_n: usize,
    /// Catalog size used to find dominating minimal elements.
    pub n_max: u32,
}

impl Default for DominanceOptions {
    fn default() -> Self {
        DominanceOptions {
            window_lo: -1.0 / PI + 0.01,
            window_hi: 2.0,
            grid_n: 2000,
            n_max: 1000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub x: f64,
    pub dominator: f64,
    pub witness_eps: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DominanceCoverage {
    pub options: DominanceOptions,
    /// Grid points within `tau` of a minimal element (not challenged).
    pub skipped_minimal: Vec<f64>,
    /// Grid points within `tau` of a maximal critical point.
    pub excluded_near_critical: Vec<f64>,
    pub non_minimal: usize,
    pub certified: usize,
    pub coverage: f64,
    /// Non-minimal points without a certificate.
    pub residue: Vec<f64>,
    pub certificates: Vec<Certificate>,
    pub config: ToleranceConfig,
}

enum Outcome {
    Minimal,
    NearCritical,
    Certified(Certificate),
    Residue,
}

/// Candidates tried per grid point after the sign filter.
const DOMINATOR_ATTEMPTS: usize = 8;

/// For each non-minimal grid point `x` of the window, searches minimal catalog
/// elements `x*` (nearest first) with `(x*−x)·f(x) < −tau` and confirms
/// `x* ≺_c x` with a full comparison.
pub fn check_setwise_dominance(
    opts: &DominanceOptions,
    cfg: &ToleranceConfig,
) -> Result<DominanceCoverage> {
    cfg.validate()?;
    let d = casestudy_domain();
    if !(opts.window_lo < opts.window_hi && opts.window_hi > 1.0 / PI)
        || !d.contains(&[opts.window_lo])
        || !d.contains(&[opts.window_hi])
    {
        return Err(Error::InvalidArgument(format!(
            "window [{}, {}] must lie in the domain and extend past 1/pi",
            opts.window_lo, opts.window_hi
        )));
    }
    let window = Domain::interval(opts.window_lo, opts.window_hi)?;
    let grid = sample_domain(&window, Sampling::Grid(opts.grid_n), 0)?;
    let cat = build_catalog(opts.n_max)?;
    let c = lookup("xsininv")?.vector;
    let mut minimal = cat.minimal_points();
    minimal.push(0.0);
    let maximal: Vec<f64> = cat
        .entries
        .iter()
        .filter(|e| e.kind == CriticalKind::Maximal)
        .map(|e| e.x)
        .collect();

    let outcomes: Vec<Outcome> = grid
        .points()
        .par_iter()
        .map(|p| {
            let x = p.coords()[0];
            if minimal.iter().any(|m| (m - x).abs() <= cfg.tau) {
                return Outcome::Minimal;
            }
            if maximal.iter().any(|m| (m - x).abs() <= cfg.tau) {
                return Outcome::NearCritical;
            }
            let fx = xsininv(x);
            let mut cands: Vec<f64> = minimal
                .iter()
                .copied()
                .filter(|m| (m - x) * fx < -cfg.tau)
                .collect();
            cands.sort_by(|a, b| (a - x).abs().total_cmp(&(b - x).abs()));
            for m in cands.into_iter().take(DOMINATOR_ATTEMPTS) {
                let v = compare_vector(&c, &Point::scalar(m), p, cfg).expect("validated inputs");
                if v.relation == Relation::StrictlyDominates {
                    return Outcome::Certified(Certificate {
                        x,
                        dominator: m,
                        witness_eps: v.witness_eps_strict.expect("strict verdicts carry a witness"),
                    });
                }
            }
            Outcome::Residue
        })
        .collect();

    let mut report = DominanceCoverage {
        options: *opts,
        skipped_minimal: Vec::new(),
        excluded_near_critical: Vec::new(),
        non_minimal: 0,
        certified: 0,
        coverage: 0.0,
        residue: Vec::new(),
        certificates: Vec::new(),
        config: *cfg,
    };
    for (p, o) in grid.points().iter().zip(outcomes) {
        let x = p.coords()[0];
        match o {
            Outcome::Minimal => report.skipped_minimal.push(x),
            Outcome::NearCritical => report.excluded_near_critical.push(x),
            Outcome::Certified(cert) => {
                report.non_minimal += 1;
                report.certified += 1;
                report.certificates.push(cert);
            }
            Outcome::Residue => {
                report.non_minimal += 1;
                report.residue.push(x);
            }
        }
    }
    report.coverage = if report.non_minimal == 0 {
        1.0
    } else {
        report.certified as f64 / report.non_minimal as f64
    };
    Ok(report)
}

/// `x,f` rows over `[lo, hi]` with 17 significant digits.
pub fn window_csv(lo: f64, hi: f64, n: usize) -> Result<String> {
    let grid = sample_domain(&Domain::interval(lo, hi)?, Sampling::Grid(n), 0)?;
    let mut out = String::from("x,f\n");
    for p in grid.points() {
        let x = p.coords()[0];
        out.push_str(&format!("{},{}\n", fmt17(x), fmt17(xsininv(x))));
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MexicanHatOptions {
    pub n_circle: usize,
    /// Neighbourhood radius for the polyorder check and the set check; defaults to `0.05 · diameter`.
    pub radius: Option<f64>,
    /// Radii at which strict local minimality must fail.
    pub strict_radii: Vec<f64>,
    pub samples: usize,
    pub seed: u64,
}

impl Default for MexicanHatOptions {
    fn default() -> Self {
        MexicanHatOptions {
            n_circle: 16,
            radius: None,
            strict_radii: vec![0.1, 0.01],
            samples: 512,
            seed: 42,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChordWitness {
    pub other: Point,
    /// Segment parameter of the largest ascent.
    pub eps: f64,
    pub ascent: f64,
    pub relation: Relation,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CirclePoint {
    pub point: Point,
    pub value: f64,
    pub global_min: bool,
    pub strict_local_min_fails: bool,
    pub local_min_fails: bool,
    pub witness: Option<ChordWitness>,
    pub confirmed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MexicanHatReport {
    pub n_circle: usize,
    pub radius: f64,
    pub strict_radii: Vec<f64>,
    pub points: Vec<CirclePoint>,
    pub confirmations: usize,
    pub almost_strictly_minimal_set: SetCheck,
    pub config: ToleranceConfig,
}

/// Value below which a circle point counts as a global minimum.
pub const GLOBAL_MIN_TOL: f64 = 1e-12;

fn circle_point(theta: f64) -> Point {
    Point::new(vec![theta.cos(), theta.sin()]).expect("finite coordinates")
}

/// Circle points at arc offsets `±r·j/4`, `j = 1..3`, all within distance `r`.
fn circle_neighbors(theta: f64, r: f64) -> Vec<Point> {
    (1..=3)
        .flat_map(|j| {
            let d = r * j as f64 / 4.0;
            [circle_point(theta + d), circle_point(theta - d)]
        })
        .collect()
}

/// For `n_circle` equally spaced points on the unit circle: the value is a
/// global minimum, strict local minimality fails at every tested radius, and
/// the polyorder local minimum fails with a chord to a neighbouring circle
/// point. Also checks the circle as an almost strictly minimal set, using the
/// exact distance `|‖x‖ − 1|`.
pub fn mexican_hat_counterexample(
    opts: &MexicanHatOptions,
    cfg: &ToleranceConfig,
) -> Result<MexicanHatReport> {
    if opts.n_circle < 2 {
        return Err(Error::InvalidArgument("n_circle must be at least 2".into()));
    }
    cfg.validate()?;
    let f = mexican_hat().scalar;
    let d = f.domain().clone();
    let radius = opts.radius.unwrap_or(0.05 * d.diameter());
    let mut strict_radii = vec![radius];
    strict_radii.extend(opts.strict_radii.iter().copied());

    let mut points = Vec::with_capacity(opts.n_circle);
    for i in 0..opts.n_circle {
        let theta = 2.0 * PI * i as f64 / opts.n_circle as f64;
        let p = circle_point(theta);
        let value = f.value(p.coords());
        let seed = opts.seed.wrapping_add(i as u64);

        let mut strict_fails = true;
        for &r in &strict_radii {
            let nb = sample_ball(&d, &p, r, opts.samples, seed)?
                .with_extra(&d, &circle_neighbors(theta, r))?;
            strict_fails &= !is_strict_local_min_scalar(&f, &nb, cfg)?.holds;
        }

        let neighbors = circle_neighbors(theta, radius);
        let nb = sample_ball(&d, &p, radius, opts.samples, seed)?.with_extra(&d, &neighbors)?;
        let local_min_fails = !is_local_min_polyorder_scalar(&f, &nb, cfg)?.holds;
        let mut witness = None;
        for q in &neighbors {
            let v = compare_scalar(&f, &p, q, cfg)?;
            if v.relation == Relation::Incomparable {
                witness = Some(ChordWitness {
                    other: q.clone(),
                    eps: v.witness_eps_violation.expect("incomparable verdicts carry both witnesses"),
                    ascent: v.max_delta,
                    relation: v.relation,
                });
                break;
            }
        }
        let global_min = value < GLOBAL_MIN_TOL;
        points.push(CirclePoint {
            confirmed: global_min && strict_fails && local_min_fails && witness.is_some(),
            point: p,
            value,
            global_min,
            strict_local_min_fails: strict_fails,
            local_min_fails,
            witness,
        });
    }

    let anchors: Vec<Point> = points.iter().map(|c| c.point.clone()).collect();
    let cand = CandidateSet::new(anchors)?
        .with_distance(Arc::new(|x: &[f64]| (x[0].hypot(x[1]) - 1.0).abs()));
    let set = is_almost_strictly_minimal_set(
        &f,
        &cand,
        &SetCheckOptions {
            radius,
            samples_per_member: opts.samples,
            seed: opts.seed,
        },
        cfg,
    )?;
    Ok(MexicanHatReport {
        n_circle: opts.n_circle,
        radius,
        strict_radii,
        confirmations: points.iter().filter(|p| p.confirmed).count(),
        points,
        almost_strictly_minimal_set: set,
        config: *cfg,
    })
}
