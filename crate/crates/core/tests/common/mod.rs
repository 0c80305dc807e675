//! Random fields and points shared by the integration suites.
#![allow(dead_code)]

use polyorder::field::{Domain, Point};
use polyorder::registry::{NamedField, QuadraticSpec};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

/// `½xᵀQx + bᵀx` on `[−1, 1]^m` with symmetric `Q` and entries uniform in `[−1, 1]`.
#[allow(clippy::needless_range_loop)]
pub fn random_quadratic(rng: &mut ChaCha8Rng, m: usize) -> (QuadraticSpec, NamedField) {
    let mut q = vec![vec![0.0; m]; m];
    for i in 0..m {
        for j in i..m {
            let v = rng.random_range(-1.0..1.0);
            q[i][j] = v;
            q[j][i] = v;
        }
    }
    let b = (0..m).map(|_| rng.random_range(-1.0..1.0)).collect();
    let spec = QuadraticSpec {
        q,
        b,
        lower: None,
        upper: None,
    };
    let field = spec.build("random_quadratic").expect("well-formed quadratic");
    (spec, field)
}

/// Stationary point `−Q⁻¹b` of a 2-D quadratic, when it exists and lies in `[−1, 1]²`.
pub fn stationary_2d(spec: &QuadraticSpec) -> Option<Point> {
    let q = &spec.q;
    let det = q[0][0] * q[1][1] - q[0][1] * q[1][0];
    if det.abs() < 1e-3 {
        return None;
    }
    let x = -(q[1][1] * spec.b[0] - q[0][1] * spec.b[1]) / det;
    let y = -(-q[1][0] * spec.b[0] + q[0][0] * spec.b[1]) / det;
    (x.abs() <= 1.0 && y.abs() <= 1.0).then(|| Point::new(vec![x, y]).unwrap())
}

/// Uniform point of a box, or a uniform point of each simplex block.
pub fn random_point(d: &Domain, rng: &mut ChaCha8Rng) -> Point {
    match d {
        Domain::Box { lower, upper } => Point::new(
            lower
                .iter()
                .zip(upper)
                .map(|(lo, hi)| lo + (hi - lo) * rng.random::<f64>())
                .collect(),
        )
        .unwrap(),
        Domain::Simplex(s) => Point::new(simplex_point(rng, s.mass, s.dim)).unwrap(),
        Domain::Product { factors } => Point::new(
            factors
                .iter()
                .flat_map(|s| simplex_point(rng, s.mass, s.dim))
                .collect(),
        )
        .unwrap(),
    }
}

fn simplex_point(rng: &mut ChaCha8Rng, mass: f64, dim: usize) -> Vec<f64> {
    let e: Vec<f64> = (0..dim).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let s: f64 = e.iter().sum();
    let mut v: Vec<f64> = e.iter().map(|x| mass * x / s).collect();
    // pin the sum exactly so the point passes the containment check
    let rest: f64 = v[..dim - 1].iter().sum();
    v[dim - 1] = (mass - rest).max(0.0);
    v
}
