//! Population games as cost fields over products of simplexes.
//!
//! Matrices are read with rows indexing the player's own pure strategies and
//! entries as costs (lower is better). A state's cost vector is the expected
//! cost of each pure strategy against the current state.

use serde::{Deserialize, Serialize};

use crate::classify::{is_critical_element, Check};
use crate::error::{Error, Result};
use crate::field::{Domain, Point, Simplex, VectorField};
use crate::polyorder::ToleranceConfig;
use crate::sampling::SampleSet;

/// One population: total mass and number of pure strategies.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Population {
    pub mass: f64,
    pub strategies: usize,
}

#[derive(Clone, Debug)]
pub struct PopulationGame {
    pub populations: Vec<Population>,
    pub label: String,
    field: VectorField,
}

fn check_matrix(name: &str, m: &[Vec<f64>]) -> Result<(usize, usize)> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    if rows == 0 || cols == 0 {
        return Err(Error::InvalidArgument(format!("matrix {name} is empty")));
    }
    if m.iter().any(|r| r.len() != cols) {
        return Err(Error::InvalidArgument(format!("matrix {name} is ragged")));
    }
    if m.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument(format!("matrix {name} has non-finite entries")));
    }
    Ok((rows, cols))
}

impl PopulationGame {
    /// Single population with cost `c(x) = C·x`.
    pub fn from_symmetric_matrix(c: Vec<Vec<f64>>, mass: f64) -> Result<Self> {
        let (rows, cols) = check_matrix("C", &c)?;
        if rows != cols {
            return Err(Error::InvalidArgument(format!(
                "cost matrix must be square, got {rows}x{cols}"
            )));
        }
        let simplex = Simplex::new(mass, rows)?;
        let field = VectorField::new("symmetric", Domain::Simplex(simplex), move |x, out| {
            for (o, row) in out.iter_mut().zip(&c) {
                *o = row.iter().zip(x).map(|(a, v)| a * v).sum();
            }
        });
        Ok(PopulationGame {
            populations: vec![Population {
                mass,
                strategies: rows,
            }],
            label: "symmetric".into(),
            field,
        })
    }

    /// Two unit-mass populations: population 1 pays `A·y`, population 2 pays `Bᵀ·x`,
    /// where `x` and `y` are their states and both matrices are `m₁ × m₂`.
    pub fn from_bimatrix(a: Vec<Vec<f64>>, b: Vec<Vec<f64>>) -> Result<Self> {
        let (m1, m2) = check_matrix("A", &a)?;
        let shape_b = check_matrix("B", &b)?;
        if shape_b != (m1, m2) {
            return Err(Error::InvalidArgument(format!(
                "A is {m1}x{m2} but B is {}x{}",
                shape_b.0, shape_b.1
            )));
        }
        let domain = Domain::product(vec![Simplex::new(1.0, m1)?, Simplex::new(1.0, m2)?])?;
        let field = VectorField::new("bimatrix", domain, move |z, out| {
            let (x, y) = z.split_at(m1);
            let (o1, o2) = out.split_at_mut(m1);
            for (o, row) in o1.iter_mut().zip(&a) {
                *o = row.iter().zip(y).map(|(v, w)| v * w).sum();
            }
            for (j, o) in o2.iter_mut().enumerate() {
                *o = b.iter().zip(x).map(|(row, w)| row[j] * w).sum();
            }
        });
        Ok(PopulationGame {
            populations: vec![
                Population {
                    mass: 1.0,
                    strategies: m1,
                },
                Population {
                    mass: 1.0,
                    strategies: m2,
                },
            ],
            label: "bimatrix".into(),
            field,
        })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn field(&self) -> &VectorField {
        &self.field
    }

    pub fn domain(&self) -> &Domain {
        self.field.domain()
    }

    pub fn dim(&self) -> usize {
        self.field.dim()
    }

    /// Costs at `x`, after checking the mass constraints.
    pub fn cost(&self, x: &Point) -> Result<Point> {
        self.field.eval(x)
    }
}

/// Nash equilibrium test: the variational inequality `(x − p)·c(p) ≥ −tau` over the challengers.
pub fn is_nash(
    g: &PopulationGame,
    p: &Point,
    challengers: &SampleSet,
    cfg: &ToleranceConfig,
) -> Result<Check> {
    is_critical_element(g.field(), p, challengers, cfg)
}

/// Hawk–Dove with value 2 and fight cost 4, as costs: `[[1, −2], [0, −1]]`.
pub fn hawk_dove() -> PopulationGame {
    PopulationGame::from_symmetric_matrix(vec![vec![1.0, -2.0], vec![0.0, -1.0]], 1.0)
        .expect("static matrix")
        .with_label("hawk_dove")
}

pub fn matching_pennies() -> PopulationGame {
    let a = vec![vec![-1.0, 1.0], vec![1.0, -1.0]];
    let b = a.iter().map(|r| r.iter().map(|v| -v).collect()).collect();
    PopulationGame::from_bimatrix(a, b)
        .expect("static matrices")
        .with_label("matching_pennies")
}

/// Strategies ordered (cooperate, defect); defecting is dominant for both players.
pub fn prisoners_dilemma() -> PopulationGame {
    PopulationGame::from_bimatrix(
        vec![vec![1.0, 3.0], vec![0.0, 2.0]],
        vec![vec![1.0, 0.0], vec![3.0, 2.0]],
    )
    .expect("static matrices")
    .with_label("prisoners_dilemma")
}

fn default_mass() -> f64 {
    1.0
}

/// On-disk game description, tagged by `mode`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum GameFile {
    Symmetric {
        #[serde(rename = "C")]
        c: Vec<Vec<f64>>,
        #[serde(default = "default_mass")]
        mass: f64,
    },
    Bimatrix {
        #[serde(rename = "A")]
        a: Vec<Vec<f64>>,
        #[serde(rename = "B")]
        b: Vec<Vec<f64>>,
    },
}

impl GameFile {
    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn build(&self) -> Result<PopulationGame> {
        match self.clone() {
            GameFile::Symmetric { c, mass } => PopulationGame::from_symmetric_matrix(c, mass),
            GameFile::Bimatrix { a, b } => PopulationGame::from_bimatrix(a, b),
        }
    }
}
