use std::f64::consts::PI;

use polyorder::casestudy::{
    build_catalog, catalog_challengers, check_setwise_dominance, mexican_hat_counterexample,
    origin_atypicality, origin_hints, verify_catalog, CatalogAgreement, CriticalCatalog,
    DominanceCoverage, DominanceOptions, MexicanHatOptions, OriginReport,
};
use polyorder::classify::{
    classify_point, Challengers, ClassificationReport, ClassifyOptions, FieldRef,
};
use polyorder::dynamics::{
    check_setwise_stability, integrate, IntegratorConfig, SetStabilityReport, Termination,
};
use polyorder::field::{Domain, Point, VectorField};
use polyorder::polyorder::{compare_scalar, compare_vector_with_hints};
use polyorder::popgame::{
    hawk_dove, is_nash, matching_pennies, prisoners_dilemma, GameFile, Population,
    PopulationGame,
};
use polyorder::sampling::{sample_domain, SampleSet, Sampling};
use serde::Serialize;

use crate::fields::{parse_point, parse_points, parse_window, resolve, CliError, CliResult, Resolved};
use crate::{CasestudyArgs, ClassifyArgs, CompareArgs, Context, FieldSel, FlowArgs, GameArgs, Report};

/// Grid size for the x·sin(1/x) challenger set when `--challengers` is absent.
const CATALOG_GRID: usize = 4096;
const CATALOG_NMAX: u32 = 25;

#[derive(Serialize)]
struct Seeded<T: Serialize> {
    seed: u64,
    field: String,
    #[serde(flatten)]
    result: T,
}

fn seeded<T: Serialize>(ctx: &Context, field: &str, result: T) -> CliResult<serde_json::Value> {
    Ok(serde_json::to_value(Seeded {
        seed: ctx.seed,
        field: field.to_string(),
        result,
    })?)
}

fn report(name: &'static str, payload: serde_json::Value, summary: String) -> Report {
    Report {
        name,
        payload,
        summary,
        files: Vec::new(),
        integrator: None,
    }
}

/// `(reference, is_vector)`.
fn selection(sel: &FieldSel) -> (&str, bool) {
    match (&sel.vector, &sel.scalar) {
        (Some(v), _) => (v, true),
        (None, Some(s)) => (s, false),
        (None, None) => unreachable!("clap enforces one field selector"),
    }
}

pub fn compare(ctx: &Context, a: &CompareArgs) -> CliResult<Report> {
    let (name, vector) = selection(&a.field);
    let r = resolve(name)?;
    let x = parse_point(&a.x)?;
    let y = parse_point(&a.y)?;
    let verdict = if vector {
        let hints = match r.xsininv_sign {
            Some(_) => origin_hints()(x.coords(), y.coords()),
            None => Vec::new(),
        };
        compare_vector_with_hints(&r.field.vector, &x, &y, &ctx.cfg, &hints)?
    } else {
        compare_scalar(&r.field.scalar, &x, &y, &ctx.cfg)?
    };
    let summary = format!(
        "{name}: {x} vs {y}: {:?} (max_delta {:.3e}, min_delta {:.3e})",
        verdict.relation, verdict.max_delta, verdict.min_delta
    );
    Ok(report("compare", seeded(ctx, name, verdict)?, summary))
}

/// `n` seeded random points plus every vertex (simplex sampling already leads with them).
fn spread(domain: &Domain, n: usize, seed: u64) -> CliResult<SampleSet> {
    let random = sample_domain(domain, Sampling::Random(n), seed)?;
    Ok(match domain {
        Domain::Box { .. } => random.union(SampleSet::explicit(domain, domain.vertices())?),
        _ => random,
    })
}

fn challengers_for(r: &Resolved, count: Option<usize>, seed: u64) -> CliResult<Challengers> {
    let domain = r.field.vector.domain();
    if r.xsininv_sign.is_some() {
        let cat = build_catalog(CATALOG_NMAX)?;
        return Ok(catalog_challengers(&cat, count.unwrap_or(CATALOG_GRID))?);
    }
    Ok(match count {
        None => Challengers::default_for(domain, seed)?,
        Some(n) if domain.dim() == 1 => Challengers::new(sample_domain(domain, Sampling::Grid(n), seed)?),
        Some(n) => Challengers::new(spread(domain, n, seed)?),
    })
}

pub fn classify(ctx: &Context, a: &ClassifyArgs) -> CliResult<Report> {
    let (name, vector) = selection(&a.field);
    let r = resolve(name)?;
    let p = parse_point(&a.point)?;
    let opts = ClassifyOptions {
        radius: a.radius,
        neighborhood_count: a.neighborhood,
        seed: ctx.seed,
        challengers: Some(challengers_for(&r, a.challengers, ctx.seed)?),
    };
    let field = if vector {
        FieldRef::Vector(&r.field.vector)
    } else {
        FieldRef::Scalar(&r.field.scalar)
    };
    let rep = classify_point(field, &p, &opts, &ctx.cfg)?;
    let summary = classification_summary(name, &rep);
    Ok(report("classify", seeded(ctx, name, rep)?, summary))
}

fn classification_summary(name: &str, r: &ClassificationReport) -> String {
    let opt = |v: Option<bool>| v.map_or("n/a".to_string(), |b| b.to_string());
    format!(
        "{name} at {}: critical={} minimal={} maximal={} local_min_polyorder={} nss={} ess={} strict_local_min={}",
        r.point,
        r.critical,
        r.minimal,
        r.maximal,
        r.local_min_polyorder,
        opt(r.nss),
        opt(r.ess),
        opt(r.strict_local_min)
    )
}

fn load_game(source: &str) -> CliResult<PopulationGame> {
    match source {
        "hawk_dove" => Ok(hawk_dove()),
        "matching_pennies" => Ok(matching_pennies()),
        "prisoners_dilemma" => Ok(prisoners_dilemma()),
        path => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::usage(format!("cannot read game file {path}: {e}")))?;
            let label = std::path::Path::new(path)
                .file_stem()
                .map_or("game".into(), |s| s.to_string_lossy().into_owned());
            Ok(GameFile::from_json(&text)?.build()?.with_label(label))
        }
    }
}

#[derive(Serialize)]
struct GameReport {
    label: String,
    populations: Vec<Population>,
    point: Point,
    costs: Point,
    nash: bool,
    classification: ClassificationReport,
}

pub fn game(ctx: &Context, a: &GameArgs) -> CliResult<Report> {
    let g = load_game(&a.game)?;
    let p = parse_point(&a.point)?;
    if p.dim() != g.dim() {
        return Err(CliError::usage(format!(
            "game has {} coordinates, point has {}",
            g.dim(),
            p.dim()
        )));
    }
    let samples = spread(g.domain(), a.challengers, ctx.seed)?;
    let nash = is_nash(&g, &p, &samples, &ctx.cfg)?.holds;
    let opts = ClassifyOptions {
        seed: ctx.seed,
        challengers: Some(Challengers::new(samples)),
        ..ClassifyOptions::default()
    };
    let classification = classify_point(FieldRef::Vector(g.field()), &p, &opts, &ctx.cfg)?;
    let summary = format!(
        "{}: nash={nash}; {}",
        g.label,
        classification_summary(&g.label, &classification)
    );
    let rep = GameReport {
        label: g.label.clone(),
        populations: g.populations.clone(),
        costs: g.cost(&p)?,
        point: p,
        nash,
        classification,
    };
    Ok(report("game", seeded(ctx, &g.label, rep)?, summary))
}

/// Stable equilibria of a 1-D flow: downward zero crossings of `F` on a grid, bisected.
fn stable_zeros(f: &VectorField, n: usize) -> CliResult<Vec<Point>> {
    let grid = sample_domain(f.domain(), Sampling::Grid(n), 0)?;
    let val = |x: f64| f.value(&[x])[0];
    let mut out = Vec::new();
    for w in grid.points().windows(2) {
        let (mut lo, mut hi) = (w[0].coords()[0], w[1].coords()[0]);
        if !(val(lo) > 0.0 && val(hi) <= 0.0) {
            continue;
        }
        if val(hi) == 0.0 {
            out.push(Point::scalar(hi));
            continue;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if val(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        out.push(Point::scalar(0.5 * (lo + hi)));
    }
    Ok(out)
}

fn auto_candidates(r: &Resolved, nmax: u32) -> CliResult<Vec<Point>> {
    if let Some(sign) = r.xsininv_sign {
        let cat: CriticalCatalog = build_catalog(nmax)?;
        // ẋ = s·f is attracted to critical points where s·f' < 0
        return Ok(cat
            .entries
            .iter()
            .filter(|e| sign * e.fprime < 0.0)
            .map(|e| Point::scalar(e.x))
            .collect());
    }
    if r.field.dim() != 1 {
        return Err(CliError::usage(
            "--candidate auto needs a one-dimensional field; pass explicit points",
        ));
    }
    let pts = stable_zeros(&r.field.vector, 8192)?;
    if pts.is_empty() {
        return Err(CliError::usage("no stable equilibrium found for --candidate auto"));
    }
    Ok(pts)
}

#[derive(Serialize)]
struct FlowReport {
    x0: Point,
    final_state: Point,
    final_time: f64,
    steps: usize,
    terminated_reason: Termination,
    config: IntegratorConfig,
    stability: Option<SetStabilityReport>,
}

pub fn flow(ctx: &Context, a: &FlowArgs) -> CliResult<Report> {
    let r = resolve(&a.field)?;
    let f = &r.field.vector;
    let x0 = parse_point(&a.x0)?;
    let cfg = IntegratorConfig {
        dt: a.dt,
        t_max: a.tmax,
        convergence_eps: a.convergence_eps,
        ..IntegratorConfig::default()
    };
    let traj = integrate(f, &x0, &cfg)?;
    let stability = match a.candidate.as_deref() {
        None => None,
        Some(c) => {
            let cand = if c == "auto" {
                auto_candidates(&r, a.nmax)?
            } else {
                parse_points(c)?
            };
            let init = SampleSet::explicit(f.domain(), vec![x0.clone()])?;
            Some(check_setwise_stability(f, &cand, &init, &cfg)?)
        }
    };
    let (t_end, x_end) = traj.samples.last().expect("trajectory holds x0");
    let mut summary = format!(
        "{}: x0={x0} -> {x_end} at t={t_end} ({:?})",
        a.field, traj.terminated_reason
    );
    if let Some(s) = &stability {
        let t = &s.trials[0];
        summary.push_str(&format!(
            "; distance to candidate set {:.3e}, converged={}, lyapunov_monotone={}",
            t.final_distance, t.converged, s.lyapunov_monotone
        ));
        if let Some(lp) = &t.limit_point {
            summary.push_str(&format!(", limit {lp}"));
        }
    }
    let mut csv = Vec::new();
    traj.write_csv(&mut csv)?;
    let rep = FlowReport {
        x0,
        final_state: x_end.clone(),
        final_time: *t_end,
        steps: traj.samples.len() - 1,
        terminated_reason: traj.terminated_reason,
        config: cfg,
        stability,
    };
    let mut out = report("flow", seeded(ctx, &a.field, rep)?, summary);
    out.files.push(("trajectory.csv".into(), csv));
    out.integrator = Some(cfg);
    Ok(out)
}

#[derive(Serialize)]
struct CasestudyReport {
    catalog: CriticalCatalog,
    agreement: CatalogAgreement,
    origin: OriginReport,
    dominance: DominanceCoverage,
}

/// Radii at which the origin's local notions are tested.
const ORIGIN_RADII: [f64; 3] = [0.1, 0.01, 0.001];
const ORIGIN_SAMPLES: usize = 512;

pub fn casestudy(ctx: &Context, a: &CasestudyArgs) -> CliResult<Report> {
    if a.mexican_hat {
        let opts = MexicanHatOptions {
            n_circle: a.circle_points,
            seed: ctx.seed,
            ..MexicanHatOptions::default()
        };
        let r = mexican_hat_counterexample(&opts, &ctx.cfg)?;
        let summary = format!(
            "mexican_hat: {}/{} circle points confirmed; almost strictly minimal set: {}",
            r.confirmations,
            r.n_circle,
            r.almost_strictly_minimal_set.holds
        );
        return Ok(report("mexican_hat", seeded(ctx, "mexican_hat", r)?, summary));
    }
    let (lo, hi) = match &a.window {
        Some(w) => parse_window(w)?,
        None => (-1.0 / PI + 0.01, 2.0),
    };
    let catalog = build_catalog(a.nmax)?;
    let agreement = verify_catalog(a.nmax, a.challenger_grid, &ctx.cfg)?;
    let origin = origin_atypicality(
        &ORIGIN_RADII,
        a.nmax,
        a.challenger_grid,
        ORIGIN_SAMPLES,
        ctx.seed,
        &ctx.cfg,
    )?;
    let dominance = check_setwise_dominance(
        &DominanceOptions {
            window_lo: lo,
            window_hi: hi,
            grid_n: a.grid,
            n_max: a.dominance_nmax,
        },
        &ctx.cfg,
    )?;
    let agree = agreement.rows.iter().filter(|r| r.agrees).count();
    let summary = format!(
        "xsininv: {} catalog entries, {agree}/{} agree (origin minimal={} maximal={}); \
         origin fails nss/ess/local-min at every radius: {}; dominance coverage {:.4} ({}/{})",
        catalog.entries.len(),
        agreement.rows.len(),
        agreement.origin_minimal,
        agreement.origin_maximal,
        origin
            .radii
            .iter()
            .all(|c| !c.nss && !c.ess && !c.local_min_polyorder),
        dominance.coverage,
        dominance.certified,
        dominance.non_minimal
    );
    let csv = polyorder::casestudy::window_csv(lo, hi, a.grid)?;
    let rep = CasestudyReport {
        catalog,
        agreement,
        origin,
        dominance,
    };
    let mut out = report("casestudy", seeded(ctx, "xsininv", rep)?, summary);
    out.files.push(("window.csv".into(), csv.into_bytes()));
    Ok(out)
}
