//! Deterministic finite stand-ins for the "for all x ∈ X" quantifiers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{cartesian, Domain, Point};

/// How a [`SampleSet`] was produced; echoed in reports.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SampleStrategy {
    Grid { n_per_axis: usize },
    SeededRandom { seed: u64, count: usize },
    Explicit { count: usize },
    Ball { radius: f64, seed: u64, count: usize },
    Union { parts: Vec<SampleStrategy> },
}

/// Request accepted by [`sample_domain`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sampling {
    /// Lattice with `n` points per axis (boxes) or per edge (simplexes).
    Grid(usize),
    /// Seeded uniform points; simplex sampling always leads with vertices and the barycenter.
    Random(usize),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampleSet {
    points: Vec<Point>,
    strategy: SampleStrategy,
    seed: u64,
}

/// Serializable summary of a sample set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleDescriptor {
    pub strategy: SampleStrategy,
    pub seed: u64,
    pub count: usize,
}

impl SampleSet {
    /// Wraps caller-supplied points after checking each lies in `domain`.
    pub fn explicit(domain: &Domain, points: Vec<Point>) -> Result<Self> {
        for p in &points {
            domain.ensure_contains(p)?;
        }
        Ok(SampleSet {
            strategy: SampleStrategy::Explicit { count: points.len() },
            points,
            seed: 0,
        })
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn strategy(&self) -> &SampleStrategy {
        &self.strategy
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn descriptor(&self) -> SampleDescriptor {
        SampleDescriptor {
            strategy: self.strategy.clone(),
            seed: self.seed,
            count: self.points.len(),
        }
    }

    /// Concatenation, keeping order (self first).
    pub fn union(mut self, other: SampleSet) -> SampleSet {
        let mut parts = match self.strategy {
            SampleStrategy::Union { parts } => parts,
            s => vec![s],
        };
        parts.push(other.strategy);
        self.points.extend(other.points);
        SampleSet {
            points: self.points,
            strategy: SampleStrategy::Union { parts },
            seed: self.seed,
        }
    }
}

fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Samples `d` deterministically. Grids on boxes include every corner.
pub fn sample_domain(d: &Domain, sampling: Sampling, seed: u64) -> Result<SampleSet> {
    let points = match sampling {
        Sampling::Grid(0) | Sampling::Random(0) => {
            return Err(Error::InvalidArgument("sample count must be positive".into()))
        }
        Sampling::Grid(n) => grid(d, n),
        Sampling::Random(n) => random(d, n, seed),
    };
    let strategy = match sampling {
        Sampling::Grid(n) => SampleStrategy::Grid { n_per_axis: n },
        Sampling::Random(n) => SampleStrategy::SeededRandom { seed, count: n },
    };
    Ok(SampleSet {
        points,
        strategy,
        seed,
    })
}

fn lattice(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![0.5 * (lo + hi)];
    }
    (0..n)
        .map(|k| {
            if k == n - 1 {
                hi
            } else {
                lo + (hi - lo) * (k as f64 / (n - 1) as f64)
            }
        })
        .collect()
}

/// All `(k_1..k_dim)` with `Σk = total`, first coordinate descending.
fn compositions(total: usize, dim: usize) -> Vec<Vec<usize>> {
    if dim == 1 {
        return vec![vec![total]];
    }
    let mut out = Vec::new();
    for first in (0..=total).rev() {
        for mut rest in compositions(total - first, dim - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn grid(d: &Domain, n: usize) -> Vec<Point> {
    match d {
        Domain::Box { lower, upper } => {
            let axes: Vec<Vec<Vec<f64>>> = lower
                .iter()
                .zip(upper)
                .map(|(lo, hi)| lattice(*lo, *hi, n).into_iter().map(|v| vec![v]).collect())
                .collect();
            cartesian(&axes).into_iter().map(Point::from_vec).collect()
        }
        _ => {
            let per_block: Vec<Vec<Vec<f64>>> = d
                .blocks()
                .iter()
                .map(|(_, s)| {
                    if n == 1 {
                        return vec![vec![s.mass / s.dim as f64; s.dim]];
                    }
                    compositions(n - 1, s.dim)
                        .into_iter()
                        .map(|ks| {
                            ks.into_iter()
                                .map(|k| s.mass * (k as f64 / (n - 1) as f64))
                                .collect()
                        })
                        .collect()
                })
                .collect();
            cartesian(&per_block).into_iter().map(Point::from_vec).collect()
        }
    }
}

fn uniform_simplex(rng: &mut ChaCha8Rng, mass: f64, dim: usize) -> Vec<f64> {
    let mut e: Vec<f64> = (0..dim)
        .map(|_| -(1.0 - rng.random::<f64>()).ln())
        .collect();
    let s: f64 = e.iter().sum();
    for v in &mut e {
        *v = mass * *v / s;
    }
    e
}

fn random(d: &Domain, count: usize, seed: u64) -> Vec<Point> {
    let mut rng = rng_for(seed);
    match d {
        Domain::Box { lower, upper } => (0..count)
            .map(|_| {
                Point::from_vec(
                    lower
                        .iter()
                        .zip(upper)
                        .map(|(lo, hi)| lo + (hi - lo) * rng.random::<f64>())
                        .collect(),
                )
            })
            .collect(),
        _ => {
            let mut pts = d.vertices();
            pts.push(d.barycenter());
            pts.truncate(count);
            let blocks = d.blocks();
            while pts.len() < count {
                let mut v = Vec::with_capacity(d.dim());
                for (_, s) in &blocks {
                    v.extend(uniform_simplex(&mut rng, s.mass, s.dim));
                }
                pts.push(Point::from_vec(v));
            }
            pts
        }
    }
}

/// A sampled neighbourhood `Domain ∩ ball(center, radius)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Neighborhood {
    pub center: Point,
    pub radius: f64,
    pub samples: SampleSet,
}

/// Number of radii `radius·2^-k` at which axis points are placed.
pub const AXIS_LADDER: usize = 8;

/// Points of `d ∩ ball(center, radius)`: deterministic "axis" points first (box
/// axes, or simplex edge directions, at radii `radius·2^-k`), then `count`
/// seeded uniform points drawn in the tangent space of `d`.
pub fn sample_ball(
    d: &Domain,
    center: &Point,
    radius: f64,
    count: usize,
    seed: u64,
) -> Result<Neighborhood> {
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "neighbourhood radius must be positive, got {radius}"
        )));
    }
    d.ensure_contains(center)?;
    let dim = d.dim();
    let blocks = d.blocks();
    let c = center.coords();

    let mut directions: Vec<Vec<f64>> = Vec::new();
    if blocks.is_empty() {
        for j in 0..dim {
            let mut e = vec![0.0; dim];
            e[j] = 1.0;
            directions.push(e);
        }
    } else {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        for (off, b) in &blocks {
            for i in 0..b.dim {
                for j in i + 1..b.dim {
                    let mut e = vec![0.0; dim];
                    e[off + i] = s;
                    e[off + j] = -s;
                    directions.push(e);
                }
            }
        }
    }
    let tangent_dim: usize = if blocks.is_empty() {
        dim
    } else {
        blocks.iter().map(|(_, b)| b.dim - 1).sum()
    };

    let mut points = Vec::new();
    for k in 0..AXIS_LADDER {
        let r = radius * 0.5f64.powi(k as i32);
        for e in &directions {
            for sign in [1.0, -1.0] {
                let v: Vec<f64> = c.iter().zip(e).map(|(ci, ei)| ci + sign * r * ei).collect();
                if d.contains(&v) {
                    points.push(Point::from_vec(v));
                }
            }
        }
    }

    if tangent_dim == 0 {
        points.push(center.clone());
    } else {
        let mut rng = rng_for(seed);
        let mut accepted = 0;
        let mut attempts = 0;
        let max_attempts = 64 * count.max(1);
        while accepted < count && attempts < max_attempts {
            attempts += 1;
            let mut z: Vec<f64> = (0..dim).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
            for (off, b) in &blocks {
                let mean = z[*off..off + b.dim].iter().sum::<f64>() / b.dim as f64;
                for v in &mut z[*off..off + b.dim] {
                    *v -= mean;
                }
            }
            let n = crate::field::norm(&z);
            if n < 1e-12 {
                continue;
            }
            let r = radius * rng.random::<f64>().powf(1.0 / tangent_dim as f64);
            let v: Vec<f64> = c.iter().zip(&z).map(|(ci, zi)| ci + r * zi / n).collect();
            if d.contains(&v) {
                points.push(Point::from_vec(v));
                accepted += 1;
            }
        }
    }

    if points.is_empty() {
        return Err(Error::Empty("neighbourhood samples"));
    }
    Ok(Neighborhood {
        center: center.clone(),
        radius,
        samples: SampleSet {
            strategy: SampleStrategy::Ball {
                radius,
                seed,
                count: points.len(),
            },
            points,
            seed,
        },
    })
}

impl Neighborhood {
    /// Adds caller-supplied points that lie within the ball; others are dropped.
    pub fn with_extra(mut self, domain: &Domain, extra: &[Point]) -> Result<Self> {
        let mut kept = Vec::new();
        for p in extra {
            if p.distance(&self.center) <= self.radius * (1.0 + 1e-12) {
                domain.ensure_contains(p)?;
                kept.push(p.clone());
            }
        }
        if !kept.is_empty() {
            let extra = SampleSet::explicit(domain, kept)?;
            self.samples = self.samples.union(extra);
        }
        Ok(self)
    }
}
