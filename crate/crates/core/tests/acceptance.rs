//! Acceptance criteria 1–9. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

mod common;

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use polyorder::casestudy::{
    build_catalog, check_setwise_dominance, mexican_hat_counterexample, origin_atypicality,
    verify_catalog, CriticalKind, DominanceOptions, MexicanHatOptions,
};
use polyorder::classify::{
    classify_point, is_critical_element, is_ess, is_local_min_polyorder_vector, is_maximal,
    is_minimal, is_minimal_scalar, is_nss, is_strict_local_min_scalar, Challengers,
    ClassifyOptions, FieldRef,
};
use polyorder::dynamics::{check_setwise_stability, integrate, IntegratorConfig};
use polyorder::field::{segment_point, Domain, Point, ScalarField, VectorField};
use polyorder::polyorder::{compare_scalar, compare_vector, segment_profile, Relation};
use polyorder::popgame::{hawk_dove, is_nash, matching_pennies};
use polyorder::registry::lookup;
use polyorder::sampling::{sample_ball, sample_domain, SampleSet, Sampling};
use polyorder::ToleranceConfig;
use rand::Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn within(elapsed: Duration, secs: u64) -> bool {
    elapsed < Duration::from_secs(secs)
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 9] = [
        ("case-study classification", criterion_1),
        ("origin atypicality", criterion_2),
        ("setwise local dominance", criterion_3),
        ("flow convergence", criterion_4),
        ("theorem property suite", criterion_5),
        ("polyorder algebra", criterion_6),
        ("gradient consistency", criterion_7),
        ("mexican hat counterexample", criterion_8),
        ("hawk-dove end to end", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        let status = if o.pass { "PASS" } else { "FAIL" };
        if !o.pass {
            failed += 1;
        }
        println!(
            "criterion {} [{status}] {name} ({:.2}s): {}",
            i + 1,
            start.elapsed().as_secs_f64(),
            o.detail
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let cfg = ToleranceConfig::default();
    let report = verify_catalog(25, 4096, &cfg).expect("catalog run");
    let elapsed = start.elapsed();
    // independent expectation from the parity rule
    let parity_ok = report.rows.iter().all(|r| {
        let expect = if (r.n > 0 && r.n % 2 == 1) || (r.n < 0 && r.n % 2 == 0) {
            CriticalKind::Minimal
        } else {
            CriticalKind::Maximal
        };
        r.kind == expect && r.minimal == (expect == CriticalKind::Minimal)
    });
    let pass = report.rows.len() == 50
        && report.all_agree
        && parity_ok
        && report.origin_minimal
        && report.origin_maximal
        && within(elapsed, 30);
    let agree = report.rows.iter().filter(|r| r.agrees).count();
    outcome(
        pass,
        format!(
            "{agree}/{} rows agree, origin minimal={} maximal={}",
            report.rows.len(),
            report.origin_minimal,
            report.origin_maximal
        ),
    )
}

fn criterion_2() -> Outcome {
    let cfg = ToleranceConfig::default();
    let radii = [0.1, 0.01, 0.001];
    let r = origin_atypicality(&radii, 25, 4096, 512, 42, &cfg).expect("origin run");
    let fails_everywhere = r
        .radii
        .iter()
        .all(|c| !c.nss && !c.ess && !c.local_min_polyorder);
    let pass = r.radii.len() == 3 && fails_everywhere && r.minimal && r.maximal;
    let per: Vec<String> = r
        .radii
        .iter()
        .map(|c| {
            format!(
                "r={}: nss={} ess={} local_min={}",
                c.radius, c.nss, c.ess, c.local_min_polyorder
            )
        })
        .collect();
    outcome(
        pass,
        format!("minimal={} maximal={}; {}", r.minimal, r.maximal, per.join("; ")),
    )
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let cfg = ToleranceConfig::default();
    let r = check_setwise_dominance(&DominanceOptions::default(), &cfg).expect("dominance run");
    let elapsed = start.elapsed();
    let pass = r.coverage >= 0.995 && within(elapsed, 60);
    outcome(
        pass,
        format!(
            "coverage {:.4} ({}/{} certified, residue {}, excluded near critical {}, minimal skipped {})",
            r.coverage,
            r.certified,
            r.non_minimal,
            r.residue.len(),
            r.excluded_near_critical.len(),
            r.skipped_minimal.len()
        ),
    )
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let flow = lookup("neg:xsininv").unwrap().vector;
    let cfg = IntegratorConfig::default();
    let mut worst: f64 = 0.0;
    let mut starts_and_targets = vec![];
    for x0 in [0.5, 1.0, 2.0] {
        starts_and_targets.push((x0, 1.0 / PI));
    }
    for k in 1..=3 {
        let kf = k as f64;
        let (lo, hi) = (1.0 / (2.0 * (kf + 1.0) * PI), 1.0 / (2.0 * kf * PI));
        for j in 1..=5 {
            let x0 = lo + (hi - lo) * j as f64 / 6.0;
            starts_and_targets.push((x0, 1.0 / ((2.0 * kf + 1.0) * PI)));
        }
    }
    let mut targets_ok = true;
    let mut dt_shift: f64 = 0.0;
    let half = IntegratorConfig {
        dt: cfg.dt / 2.0,
        ..cfg
    };
    for &(x0, target) in &starts_and_targets {
        let p = Point::scalar(x0);
        let end = integrate(&flow, &p, &cfg).unwrap().final_state().coords()[0];
        let end_half = integrate(&flow, &p, &half).unwrap().final_state().coords()[0];
        let err = (end - target).abs();
        worst = worst.max(err);
        targets_ok &= err < 1e-4;
        dt_shift = dt_shift.max((end - end_half).abs());
    }
    let catalog = build_catalog(25).unwrap();
    let inits = SampleSet::explicit(
        flow.domain(),
        starts_and_targets.iter().map(|s| Point::scalar(s.0)).collect(),
    )
    .unwrap();
    let stab = check_setwise_stability(&flow, &catalog.minimal_set(), &inits, &cfg).unwrap();
    let elapsed = start.elapsed();
    let pass = targets_ok
        && stab.lyapunov_monotone
        && stab.max_lyapunov_increase <= 1e-8
        && dt_shift < 1e-6
        && within(elapsed, 60);
    outcome(
        pass,
        format!(
            "{} trajectories, worst error {worst:.2e}, max Lyapunov increase {:.2e}, dt-halving shift {dt_shift:.2e}",
            starts_and_targets.len(),
            stab.max_lyapunov_increase
        ),
    )
}

struct Case {
    vector: VectorField,
    scalar: Option<ScalarField>,
    critical: Vec<Point>,
}

fn one_dim_case(name: &str) -> Case {
    let f = lookup(name).unwrap();
    let mut critical = vec![Point::scalar(0.0)];
    if name.ends_with("xsininv") {
        critical.extend((1..=6).flat_map(|n| {
            let x = 1.0 / (n as f64 * PI);
            [Point::scalar(x), Point::scalar(-x)]
        }));
    }
    Case {
        vector: f.vector,
        scalar: Some(f.scalar),
        critical,
    }
}

fn base_challengers(d: &Domain, seed: u64) -> SampleSet {
    if d.dim() == 1 {
        return sample_domain(d, Sampling::Grid(257), seed).unwrap();
    }
    SampleSet::explicit(d, d.vertices())
        .unwrap()
        .union(sample_domain(d, Sampling::Random(256), seed).unwrap())
}

#[derive(Default)]
struct Tally {
    trials: usize,
    violations: Vec<String>,
    band_excluded: usize,
}

fn in_band(v: Option<f64>, tau: f64) -> bool {
    v.is_some_and(|v| v > tau && v <= 10.0 * tau)
}

fn run_trial(case: &Case, p: &Point, seed: u64, cfg: &ToleranceConfig, tally: &mut Tally) {
    let c = &case.vector;
    let d = c.domain();
    let nb = sample_ball(d, p, 0.05 * d.diameter(), 128, seed).unwrap();
    let ch = Challengers::new(base_challengers(d, seed)).augmented(&nb.samples);
    let critical = is_critical_element(c, p, &ch.samples, cfg).unwrap();
    let minimal = is_minimal(c, p, &ch, cfg).unwrap();
    let dual = is_maximal(&c.negated(), p, &ch, cfg).unwrap();
    let ess = is_ess(c, &nb, cfg).unwrap();
    let nss = is_nss(c, &nb, cfg).unwrap();
    let lm = is_local_min_polyorder_vector(c, &nb, cfg).unwrap();
    tally.trials += 1;
    let mut bad = |what: &str| tally.violations.push(format!("{what} at {p} ({})", c.label()));
    if minimal.holds && !critical.holds {
        bad("minimal but not critical");
    }
    if ess.holds && !minimal.holds {
        bad("ESS but not minimal");
    }
    if lm.holds && !critical.holds {
        bad("local min but not critical");
    }
    if minimal != dual {
        bad("is_minimal(c) differs from is_maximal(-c)");
    }
    if let Some(f) = &case.scalar {
        let strict = is_strict_local_min_scalar(f, &nb, cfg).unwrap();
        let smin = is_minimal_scalar(f, p, &ch.samples, cfg).unwrap();
        if strict.holds && !smin.holds {
            bad("strict local min but not scalar-minimal");
        }
    }
    if in_band(nss.stat, cfg.tau) || in_band(lm.stat, cfg.tau) {
        tally.band_excluded += 1;
        return;
    }
    if nss.holds && !lm.holds {
        // The violating segment point z = εp + (1−ε)x lies in the neighbourhood too,
        // and its NSS value is (1−ε)·δ(ε). Only a value within 10τ is margin noise.
        let w = lm.witness.as_ref().unwrap();
        let eps = w.eps.unwrap();
        let z = segment_point(p, &w.point, eps).unwrap();
        let pz: Vec<f64> = p.coords().iter().zip(z.coords()).map(|(a, b)| a - b).collect();
        let at_z = Point::new(pz).unwrap().dot(&c.value(z.coords()));
        let scaled = (1.0 - eps) * w.value;
        if (at_z - scaled).abs() > 1e-9 * w.value.abs() + 1e-15 {
            bad("NSS value at the local-min witness is not (1-eps)*delta");
        } else if at_z <= 10.0 * cfg.tau {
            tally.band_excluded += 1;
        } else {
            let nb2 = nb.clone().with_extra(d, &[z]).unwrap();
            if is_nss(c, &nb2, cfg).unwrap().holds {
                bad("NSS and polyorder local min disagree");
            }
        }
    } else if nss.holds != lm.holds {
        bad("NSS and polyorder local min disagree");
    }
}

fn criterion_5() -> Outcome {
    let cfg = ToleranceConfig::default().with_n_eps(257);
    let mut rng = common::rng(5);
    let mut cases: Vec<Case> = ["quadratic", "cubic", "linear", "xsininv"]
        .iter()
        .flat_map(|n| [one_dim_case(n), one_dim_case(&format!("neg:{n}"))])
        .collect();
    let mh = lookup("mexican_hat").unwrap();
    let mut mh_crit = vec![Point::new(vec![0.0, 0.0]).unwrap()];
    mh_crit.extend((0..8).map(|i| {
        let t = PI * i as f64 / 4.0;
        Point::new(vec![t.cos(), t.sin()]).unwrap()
    }));
    cases.push(Case {
        vector: mh.vector,
        scalar: Some(mh.scalar),
        critical: mh_crit,
    });
    let hd = hawk_dove();
    cases.push(Case {
        vector: hd.field().clone(),
        scalar: None,
        critical: [[0.5, 0.5], [1.0, 0.0], [0.0, 1.0]]
            .iter()
            .map(|v| Point::new(v.to_vec()).unwrap())
            .collect(),
    });
    let mp = matching_pennies();
    cases.push(Case {
        vector: mp.field().clone(),
        scalar: None,
        critical: vec![Point::new(vec![0.5; 4]).unwrap()],
    });

    let mut tally = Tally::default();
    let n_trials = 1200;
    for t in 0..n_trials {
        // every fourth trial uses a fresh random quadratic
        let fresh;
        let case = if t % 4 == 3 {
            let (spec, f) = common::random_quadratic(&mut rng, 2);
            fresh = Case {
                critical: common::stationary_2d(&spec).into_iter().collect(),
                vector: f.vector,
                scalar: Some(f.scalar),
            };
            &fresh
        } else {
            &cases[rng.random_range(0..cases.len())]
        };
        let p = if !case.critical.is_empty() && rng.random_bool(0.3) {
            case.critical[rng.random_range(0..case.critical.len())].clone()
        } else {
            common::random_point(case.vector.domain(), &mut rng)
        };
        run_trial(case, &p, t as u64, &cfg, &mut tally);
    }
    let pass = tally.trials >= 1000 && tally.violations.is_empty();
    let mut detail = format!(
        "{} trials, {} violations, {} margin-filtered",
        tally.trials,
        tally.violations.len(),
        tally.band_excluded
    );
    if let Some(v) = tally.violations.first() {
        detail.push_str(&format!("; first: {v}"));
    }
    outcome(pass, detail)
}

fn algebra_fields(rng: &mut rand_chacha::ChaCha8Rng) -> Vec<(ScalarField, VectorField)> {
    let mut out: Vec<(ScalarField, VectorField)> = ["quadratic", "cubic", "linear", "xsininv", "mexican_hat"]
        .iter()
        .map(|n| {
            let f = lookup(n).unwrap();
            (f.scalar, f.vector)
        })
        .collect();
    for m in [2, 3] {
        for _ in 0..3 {
            let (_, f) = common::random_quadratic(rng, m);
            out.push((f.scalar, f.vector));
        }
    }
    out
}

/// Kahn's algorithm on the strict-dominance graph.
fn acyclic(adj: &[Vec<bool>]) -> bool {
    let n = adj.len();
    let mut indeg: Vec<usize> = (0..n).map(|j| (0..n).filter(|&i| adj[i][j]).count()).collect();
    let mut stack: Vec<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
    let mut seen = 0;
    while let Some(i) = stack.pop() {
        seen += 1;
        for j in 0..n {
            if adj[i][j] {
                indeg[j] -= 1;
                if indeg[j] == 0 {
                    stack.push(j);
                }
            }
        }
    }
    seen == n
}

fn criterion_6() -> Outcome {
    let cfg = ToleranceConfig::default();
    let mut rng = common::rng(6);
    let fields = algebra_fields(&mut rng);
    let mut pairs = 0usize;
    let mut chains = 0usize;
    let mut violations: Vec<String> = vec![];
    for round in 0..10_000 {
        let (f, c) = &fields[round % fields.len()];
        let d = f.domain();
        let x = common::random_point(d, &mut rng);
        let y = common::random_point(d, &mut rng);
        if round % 10 == 0 {
            let s = compare_scalar(f, &x, &x, &cfg).unwrap().relation;
            let v = compare_vector(c, &x, &x, &cfg).unwrap().relation;
            if s != Relation::Equivalent || v != Relation::Equivalent {
                violations.push(format!("reflexivity at {x}"));
            }
        }
        let sxy = compare_scalar(f, &x, &y, &cfg).unwrap().relation;
        let syx = compare_scalar(f, &y, &x, &cfg).unwrap().relation;
        let vxy = compare_vector(c, &x, &y, &cfg).unwrap().relation;
        let vyx = compare_vector(c, &y, &x, &cfg).unwrap().relation;
        let strict = Relation::StrictlyDominates;
        if (sxy == strict && syx == strict) || (vxy == strict && vyx == strict) {
            violations.push(format!("mutual strict dominance {x} {y}"));
        }
        for (a, b, r) in [(&x, &y, sxy), (&y, &x, syx)] {
            if r == strict && f.value(a.coords()) >= f.value(b.coords()) {
                violations.push(format!("strict without decrease {a} {b}"));
            }
        }
        pairs += 1;
    }
    for round in 0..300 {
        let (f, _) = &fields[round % fields.len()];
        let pts: Vec<Point> = (0..6).map(|_| common::random_point(f.domain(), &mut rng)).collect();
        let adj: Vec<Vec<bool>> = pts
            .iter()
            .map(|a| {
                pts.iter()
                    .map(|b| {
                        !std::ptr::eq(a, b)
                            && compare_scalar(f, a, b, &cfg).unwrap().relation
                                == Relation::StrictlyDominates
                    })
                    .collect()
            })
            .collect();
        if !acyclic(&adj) {
            violations.push(format!("strict cycle among {} points of {}", pts.len(), f.label()));
        }
        chains += 1;
    }
    let pass = pairs + chains >= 10_000 && violations.is_empty();
    outcome(
        pass,
        format!(
            "{pairs} pairs, {chains} chain groups, {} violations",
            violations.len()
        ),
    )
}

/// Largest rise of the trapezoid integral of a sampled `δ(ε)` profile.
fn integrated_ascent(prof: &[(f64, f64)]) -> f64 {
    let mut g = 0.0;
    let mut low: f64 = 0.0;
    let mut best: f64 = 0.0;
    for w in prof.windows(2) {
        g += 0.5 * (w[1].0 - w[0].0) * (w[0].1 + w[1].1);
        best = best.max(g - low);
        low = low.min(g);
    }
    best
}

fn criterion_7() -> Outcome {
    let cfg = ToleranceConfig::default();
    let tau = cfg.tau;
    let mut rng = common::rng(7);
    let (mut total, mut excluded, mut agree) = (0usize, 0usize, 0usize);
    let mut first_mismatch = None;
    for q in 0..200 {
        let m = 2 + q % 3;
        let (_, f) = common::random_quadratic(&mut rng, m);
        for _ in 0..50 {
            let x = common::random_point(f.scalar.domain(), &mut rng);
            let y = common::random_point(f.scalar.domain(), &mut rng);
            total += 1;
            let s = compare_scalar(&f.scalar, &x, &y, &cfg).unwrap();
            let v = compare_vector(&f.vector, &x, &y, &cfg).unwrap();
            let band = |t: f64| t > tau && t <= 10.0 * tau;
            let thin_rise = v.max_delta > tau
                && integrated_ascent(&segment_profile(&f.vector, &x, &y, &cfg).unwrap())
                    <= 10.0 * tau;
            if band(s.max_delta) || band(v.max_delta) || thin_rise {
                excluded += 1;
                continue;
            }
            if s.relation.forward_weak() == v.relation.forward_weak() {
                agree += 1;
            } else if first_mismatch.is_none() {
                first_mismatch = Some(format!("{x} vs {y}"));
            }
        }
    }
    let kept = total - excluded;
    let frac = excluded as f64 / total as f64;
    let pass = agree == kept && frac < 0.05;
    let mut detail = format!(
        "{agree}/{kept} filtered pairs agree, excluded band {excluded}/{total} = {:.3}%",
        100.0 * frac
    );
    if let Some(m) = first_mismatch {
        detail.push_str(&format!("; first mismatch {m}"));
    }
    outcome(pass, detail)
}

fn criterion_8() -> Outcome {
    let cfg = ToleranceConfig::default();
    let r = mexican_hat_counterexample(&MexicanHatOptions::default(), &cfg).expect("mexican hat");
    let every_point = r.points.iter().all(|c| {
        c.value < 1e-12
            && c.global_min
            && c.local_min_fails
            && c.witness
                .as_ref()
                .is_some_and(|w| (w.other.norm() - 1.0).abs() < 1e-12)
    });
    let pass = r.points.len() == 16
        && r.confirmations == 16
        && every_point
        && r.almost_strictly_minimal_set.holds;
    outcome(
        pass,
        format!(
            "{}/{} circle points confirmed, almost strictly minimal set holds={} ({} samples)",
            r.confirmations,
            r.points.len(),
            r.almost_strictly_minimal_set.holds,
            r.almost_strictly_minimal_set.samples_checked
        ),
    )
}

fn criterion_9() -> Outcome {
    let start = Instant::now();
    let cfg = ToleranceConfig::default();
    let g = hawk_dove();
    let p = Point::new(vec![0.5, 0.5]).unwrap();
    let challengers = sample_domain(g.domain(), Sampling::Random(2000), 42).unwrap();
    let nash = is_nash(&g, &p, &challengers, &cfg).unwrap().holds;
    let report = classify_point(FieldRef::Vector(g.field()), &p, &ClassifyOptions::default(), &cfg)
        .expect("classification");

    // sweep x = (a, 1−a): x*·c(x) ≤ x·c(x), strictly away from x*, with the
    // closed form (x − x*)·c(x) = 2(a − ½)² as a cross-check
    let n = 10_000;
    let mut oracle_nss = true;
    let mut oracle_ess = true;
    let mut closed_form_err: f64 = 0.0;
    for i in 0..=n {
        let a = i as f64 / n as f64;
        let x = Point::new(vec![a, 1.0 - a]).unwrap();
        let cx = g.cost(&x).unwrap();
        let gap = x.dot(cx.coords()) - p.dot(cx.coords());
        closed_form_err = closed_form_err.max((gap - 2.0 * (a - 0.5).powi(2)).abs());
        oracle_nss &= gap >= -cfg.tau;
        if (a - 0.5).abs() > 1e-12 {
            oracle_ess &= gap > 0.0;
        }
    }
    let elapsed = start.elapsed();
    let certified = nash
        && report.nss == Some(true)
        && report.ess == Some(true)
        && report.minimal
        && report.critical;
    let agrees = report.nss == Some(oracle_nss) && report.ess == Some(oracle_ess);
    let pass = certified && agrees && closed_form_err < 1e-12 && within(elapsed, 10);
    outcome(
        pass,
        format!(
            "nash={nash} nss={:?} ess={:?} minimal={}; oracle nss={oracle_nss} ess={oracle_ess}, closed-form error {closed_form_err:.1e}",
            report.nss, report.ess, report.minimal
        ),
    )
}
