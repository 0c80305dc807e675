//! Field references, point lists and the CLI error type.

use std::fmt;
use std::path::Path;

use polyorder::field::Point;
use polyorder::registry::{lookup, NamedField, QuadraticSpec};

/// Exit codes: 2 usage or parse error, 3 domain violation, 4 invariant breach.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: 2,
            message: message.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<polyorder::Error> for CliError {
    fn from(e: polyorder::Error) -> Self {
        use polyorder::Error as E;
        let code = match &e {
            E::OutsideDomain { .. } => 3,
            E::InvariantBreach(_) => 4,
            _ => 2,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::usage(format!("i/o error: {e}"))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::usage(format!("json error: {e}"))
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// A resolved field reference.
pub struct Resolved {
    pub field: NamedField,
    /// `±1` when the reference is `xsininv` up to negation.
    pub xsininv_sign: Option<f64>,
}

/// A registry name or a quadratic JSON file, each optionally prefixed by `neg:`.
pub fn resolve(reference: &str) -> CliResult<Resolved> {
    let mut rest = reference;
    let mut negations = 0;
    while let Some(r) = rest.strip_prefix("neg:") {
        rest = r;
        negations += 1;
    }
    let path = Path::new(rest);
    let base = if rest.ends_with(".json") || path.is_file() {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("cannot read field file {rest}: {e}")))?;
        QuadraticSpec::from_json(&text)?.build(rest)?
    } else {
        lookup(rest)?
    };
    let sign = if negations % 2 == 0 { 1.0 } else { -1.0 };
    let field = if sign < 0.0 { base.negated() } else { base };
    Ok(Resolved {
        xsininv_sign: (rest == "xsininv").then_some(sign),
        field,
    })
}

pub fn parse_point(s: &str) -> CliResult<Point> {
    let coords = s
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| CliError::usage(format!("cannot parse `{t}` in point `{s}`")))
        })
        .collect::<CliResult<Vec<f64>>>()?;
    Ok(Point::new(coords)?)
}

/// Points separated by `;`, coordinates by `,`.
pub fn parse_points(s: &str) -> CliResult<Vec<Point>> {
    s.split(';')
        .filter(|t| !t.trim().is_empty())
        .map(parse_point)
        .collect()
}

pub fn parse_window(s: &str) -> CliResult<(f64, f64)> {
    let p = parse_point(s)?;
    match p.coords() {
        [lo, hi] if lo < hi => Ok((*lo, *hi)),
        _ => Err(CliError::usage(format!("window must be `lo,hi` with lo < hi, got `{s}`"))),
    }
}
