//! Built-in named fields and the JSON descriptor for custom quadratics.
//!
//! One-dimensional entries are read as vector fields directly (`c = f`);
//! multi-dimensional entries use their gradient as the vector field.

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::field::{Domain, ScalarField, VectorField};

pub const NAMES: [&str; 5] = ["quadratic", "cubic", "xsininv", "mexican_hat", "linear"];

/// `x·sin(1/x)`, extended by continuity with `f(0) = 0`.
#[inline]
pub fn xsininv(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * (1.0 / x).sin()
    }
}

/// Scalar and vector readings of one registry entry.
#[derive(Clone, Debug)]
pub struct NamedField {
    pub name: String,
    pub scalar: ScalarField,
    pub vector: VectorField,
}

impl NamedField {
    fn one_dim(name: &str, domain: Domain, f: fn(f64) -> f64) -> Self {
        NamedField {
            name: name.to_string(),
            scalar: ScalarField::new(name, domain.clone(), move |x| f(x[0])),
            vector: VectorField::from_fn_1d(name, domain, f),
        }
    }

    pub fn negated(&self) -> Self {
        NamedField {
            name: format!("neg:{}", self.name),
            scalar: self.scalar.negated(),
            vector: self.vector.negated(),
        }
    }

    pub fn dim(&self) -> usize {
        self.scalar.dim()
    }
}

/// Default domain used for the case study and the 1-D registry entries around it.
pub fn casestudy_domain() -> Domain {
    Domain::interval(-1.0, 2.0).expect("static bounds")
}

/// Looks up a registry name; a leading `neg:` negates the field.
pub fn lookup(name: &str) -> Result<NamedField> {
    if let Some(rest) = name.strip_prefix("neg:") {
        return Ok(lookup(rest)?.negated());
    }
    let unit = || Domain::interval(-1.0, 1.0).expect("static bounds");
    Ok(match name {
        "quadratic" => NamedField::one_dim(name, unit(), |x| x * x),
        "cubic" => NamedField::one_dim(name, unit(), |x| x * x * x),
        "linear" => NamedField::one_dim(name, unit(), |x| x),
        "xsininv" => NamedField::one_dim(name, casestudy_domain(), xsininv),
        "mexican_hat" => mexican_hat(),
        _ => return Err(Error::UnknownField(name.to_string())),
    })
}

/// `(‖p‖ − 1)²` on `[−2, 2]²`, with analytic gradient `2(‖p‖−1)p/‖p‖` (zero at the origin).
pub fn mexican_hat() -> NamedField {
    let domain = Domain::boxed(vec![-2.0, -2.0], vec![2.0, 2.0]).expect("static bounds");
    NamedField {
        name: "mexican_hat".into(),
        scalar: ScalarField::new("mexican_hat", domain.clone(), |p| {
            let r = p[0].hypot(p[1]);
            (r - 1.0) * (r - 1.0)
        }),
        vector: VectorField::new("grad:mexican_hat", domain, |p, out| {
            let r = p[0].hypot(p[1]);
            if r == 0.0 {
                out[0] = 0.0;
                out[1] = 0.0;
            } else {
                let k = 2.0 * (r - 1.0) / r;
                out[0] = k * p[0];
                out[1] = k * p[1];
            }
        }),
    }
}

/// `{"Q": [[..]], "b": [..]}` meaning `f(x) = ½xᵀQx + bᵀx`. Optional `lower`/`upper`
/// give the box; the default is `[−1, 1]^m`.
#[derive(Clone, Debug, Deserialize)]
pub struct QuadraticSpec {
    #[serde(rename = "Q")]
    pub q: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    #[serde(default)]
    pub lower: Option<Vec<f64>>,
    #[serde(default)]
    pub upper: Option<Vec<f64>>,
}

impl QuadraticSpec {
    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn build(&self, label: &str) -> Result<NamedField> {
        let m = self.b.len();
        if m == 0 {
            return Err(Error::Empty("quadratic b"));
        }
        if self.q.len() != m || self.q.iter().any(|row| row.len() != m) {
            return Err(Error::InvalidArgument(format!(
                "Q must be {m}x{m} to match b"
            )));
        }
        if self.q.iter().flatten().chain(&self.b).any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("quadratic coefficients must be finite".into()));
        }
        let domain = Domain::boxed(
            self.lower.clone().unwrap_or_else(|| vec![-1.0; m]),
            self.upper.clone().unwrap_or_else(|| vec![1.0; m]),
        )?;
        if domain.dim() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                got: domain.dim(),
            });
        }
        let q = self.q.clone();
        let b = self.b.clone();
        let scalar = ScalarField::new(label, domain.clone(), move |x| {
            let mut acc = 0.0;
            for i in 0..x.len() {
                let qx: f64 = q[i].iter().zip(x).map(|(a, v)| a * v).sum();
                acc += 0.5 * x[i] * qx + b[i] * x[i];
            }
            acc
        });
        let sym: Vec<Vec<f64>> = (0..m)
            .map(|i| (0..m).map(|j| 0.5 * (self.q[i][j] + self.q[j][i])).collect())
            .collect();
        let b = self.b.clone();
        let vector = VectorField::new(format!("grad:{label}"), domain, move |x, out| {
            for i in 0..x.len() {
                out[i] = sym[i].iter().zip(x).map(|(a, v)| a * v).sum::<f64>() + b[i];
            }
        });
        Ok(NamedField {
            name: label.to_string(),
            scalar,
            vector,
        })
    }
}
