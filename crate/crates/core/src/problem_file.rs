//! Flat key-value problem files.
//!
//! ```text
//! # (laplacian + 1) u = x on an ellipse
//! dimension = 2
//! ellipse   = 0 0 2 1        # cx cy a b
//! forcing   = x
//! dirichlet = sin_x_plus_x
//! exact     = sin_x_plus_x   # optional, adds error columns
//! remainder = zero           # optional: zero | u_minus_u_squared
//! knots     = 7
//! c         = 3
//! frm       = 7              # optional neighbour count
//! eval      = 1.5 0          # repeatable
//! ```
//!
//! Functions are picked from a fixed list of builtins; see [`builtin`].

use std::collections::HashSet;
use std::fmt::Write as _;
use std::sync::Arc;

use crate::bench::{format_sig, CSV_HEADER};
use crate::bkm::{solve, Diagnostics, SolveOptions};
use crate::error::{BkmError, Result};
use crate::geometry::{ellipse_knots, Ellipse, Point};
use crate::kernels::mq_pair;
use crate::problem::{field, Field, ProblemSpec, Remainder};

/// Largest knot count a problem file may request.
pub const MAX_KNOTS: usize = 2000;

pub const BUILTINS: &[&str] = &[
    "zero",
    "x",
    "sin_x_plus_x",
    "y_exp_x",
    "y_exp_x_plus_y2_exp_2x",
];

/// Named scalar field.
pub fn builtin(name: &str) -> Option<Field> {
    let f = match name {
        "zero" => field(|_| 0.0),
        "x" => field(|p| p.x()),
        "sin_x_plus_x" => field(|p| p.x().sin() + p.x()),
        "y_exp_x" => field(|p| p.y() * p.x().exp()),
        "y_exp_x_plus_y2_exp_2x" => field(|p| {
            let e = p.x().exp();
            p.y() * e + p.y() * p.y() * e * e
        }),
        _ => return None,
    };
    Some(f)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RemainderName {
    Zero,
    UMinusUSquared,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemFile {
    pub dimension: usize,
    pub ellipse: Ellipse,
    pub forcing: String,
    pub dirichlet: String,
    pub exact: Option<String>,
    pub remainder: RemainderName,
    pub knots: usize,
    pub shape: f64,
    pub frm: Option<usize>,
    pub eval: Vec<Point>,
}

fn parse_error(line: usize, message: impl Into<String>) -> BkmError {
    BkmError::Parse {
        line,
        message: message.into(),
    }
}

fn parse_real(line: usize, token: &str) -> Result<f64> {
    let v: f64 = token
        .parse()
        .map_err(|_| parse_error(line, format!("`{token}` is not a number")))?;
    if !v.is_finite() {
        return Err(parse_error(line, format!("`{token}` is not finite")));
    }
    Ok(v)
}

fn parse_reals<const N: usize>(line: usize, value: &str) -> Result<[f64; N]> {
    let tokens: Vec<&str> = value.split_whitespace().collect();
    if tokens.len() != N {
        return Err(parse_error(
            line,
            format!("expected {N} numbers, found {}", tokens.len()),
        ));
    }
    let mut out = [0.0; N];
    for (slot, token) in out.iter_mut().zip(tokens) {
        *slot = parse_real(line, token)?;
    }
    Ok(out)
}

fn parse_count(line: usize, value: &str, what: &str) -> Result<usize> {
    let n: usize = value.parse().map_err(|_| {
        parse_error(
            line,
            format!("{what} must be a positive integer, got `{value}`"),
        )
    })?;
    if n == 0 || n > MAX_KNOTS {
        return Err(parse_error(
            line,
            format!("{what} must be in 1..={MAX_KNOTS}, got {n}"),
        ));
    }
    Ok(n)
}

fn parse_builtin(line: usize, value: &str) -> Result<String> {
    if builtin(value).is_none() {
        return Err(parse_error(
            line,
            format!(
                "unknown function `{value}` (builtins: {})",
                BUILTINS.join(", ")
            ),
        ));
    }
    Ok(value.to_string())
}

/// Parse a problem file. Every key except `eval` may appear once.
pub fn parse_problem_file(text: &str) -> Result<ProblemFile> {
    let mut seen = HashSet::new();
    let mut dimension = None;
    let mut ellipse = None;
    let mut forcing = None;
    let mut dirichlet = None;
    let mut exact = None;
    let mut remainder = RemainderName::Zero;
    let mut knots = None;
    let mut shape = None;
    let mut frm = None;
    let mut eval = Vec::new();

    for (index, raw) in text.lines().enumerate() {
        let line = index + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| parse_error(line, "expected `key = value`"))?;
        let (key, value) = (key.trim(), value.trim());
        if key != "eval" && !seen.insert(key.to_string()) {
            return Err(parse_error(line, format!("duplicate key `{key}`")));
        }
        match key {
            "dimension" => {
                if value != "2" {
                    return Err(parse_error(
                        line,
                        format!("only dimension 2 is supported, got `{value}`"),
                    ));
                }
                dimension = Some(2);
            }
            "ellipse" => {
                let [cx, cy, a, b] = parse_reals::<4>(line, value)?;
                let e = Ellipse::new(Point::new2(cx, cy), a, b)
                    .map_err(|e| parse_error(line, e.to_string()))?;
                ellipse = Some(e);
            }
            "forcing" => forcing = Some(parse_builtin(line, value)?),
            "dirichlet" => dirichlet = Some(parse_builtin(line, value)?),
            "exact" => exact = Some(parse_builtin(line, value)?),
            "remainder" => {
                remainder = match value {
                    "zero" => RemainderName::Zero,
                    "u_minus_u_squared" => RemainderName::UMinusUSquared,
                    other => {
                        return Err(parse_error(
                            line,
                            format!(
                                "unknown remainder `{other}` (expected zero or u_minus_u_squared)"
                            ),
                        ))
                    }
                }
            }
            "knots" => knots = Some(parse_count(line, value, "knots")?),
            "c" => {
                let c = parse_real(line, value)?;
                if c <= 0.0 {
                    return Err(parse_error(line, format!("c must be positive, got {c}")));
                }
                shape = Some(c);
            }
            "frm" => frm = Some(parse_count(line, value, "frm")?),
            "eval" => {
                let [x, y] = parse_reals::<2>(line, value)?;
                eval.push(Point::new2(x, y));
            }
            other => return Err(parse_error(line, format!("unknown key `{other}`"))),
        }
    }

    let end = text.lines().count().max(1);
    let missing = |key: &str| parse_error(end, format!("missing required key `{key}`"));
    Ok(ProblemFile {
        dimension: dimension.ok_or_else(|| missing("dimension"))?,
        ellipse: ellipse.ok_or_else(|| missing("ellipse"))?,
        forcing: forcing.ok_or_else(|| missing("forcing"))?,
        dirichlet: dirichlet.ok_or_else(|| missing("dirichlet"))?,
        exact,
        remainder,
        knots: knots.ok_or_else(|| missing("knots"))?,
        shape: shape.ok_or_else(|| missing("c"))?,
        frm,
        eval,
    })
}

/// Parse a comma-separated list of knot counts such as `5,7,9`.
pub fn parse_knot_list(text: &str) -> Result<Vec<usize>> {
    let counts = text
        .split(',')
        .enumerate()
        .map(|(i, item)| {
            let item = item.trim();
            match item.parse::<usize>() {
                Ok(n) if (1..=MAX_KNOTS).contains(&n) => Ok(n),
                _ => Err(parse_error(
                    i + 1,
                    format!("knot count must be an integer in 1..={MAX_KNOTS}, got `{item}`"),
                )),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    if counts.windows(2).any(|w| w[0] > w[1]) {
        return Err(parse_error(1, "knot counts must be ascending"));
    }
    Ok(counts)
}

/// Computed values at the `eval` points.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub knots: usize,
    pub shape: f64,
    /// Point, computed value and exact value when known.
    pub rows: Vec<(Point, f64, Option<f64>)>,
    pub diagnostics: Diagnostics,
}

impl ProblemFile {
    pub fn to_problem(&self) -> ProblemSpec {
        let get = |name: &str| builtin(name).expect("names are checked while parsing");
        let mut problem = ProblemSpec::new(get(&self.forcing))
            .with_dirichlet(get(&self.dirichlet))
            .with_geometry(self.ellipse);
        if let Some(exact) = &self.exact {
            problem = problem.with_exact(get(exact));
        }
        if self.remainder == RemainderName::UMinusUSquared {
            problem =
                problem.with_remainder(Remainder::BoundaryNonlinear(Arc::new(|u, _| u - u * u)));
        }
        problem
    }

    pub fn run(&self) -> Result<Evaluation> {
        let problem = self.to_problem();
        let knots = ellipse_knots(&self.ellipse, self.knots)?;
        let kernel = mq_pair(self.shape)?;
        let frm_neighbors = self.frm.map(|k| k.min(self.knots));
        let solution = solve(&problem, &knots, &kernel, SolveOptions { frm_neighbors })?;
        let rows = self
            .eval
            .iter()
            .map(|p| {
                (
                    *p,
                    solution.evaluate(p),
                    problem.exact.as_ref().map(|u| u(p)),
                )
            })
            .collect();
        Ok(Evaluation {
            knots: self.knots,
            shape: self.shape,
            rows,
            diagnostics: solution.diagnostics().clone(),
        })
    }
}

impl Evaluation {
    /// Same columns as a benchmark report; error fields stay empty without
    /// an exact solution.
    pub fn to_csv(&self) -> String {
        let mut out = format!("{CSV_HEADER}\n");
        for (p, computed, exact) in &self.rows {
            let (exact_s, abs_s, rel_s) = match exact {
                Some(u) => {
                    let abs = (computed - u).abs();
                    let rel = if *u != 0.0 {
                        format_sig(abs / u.abs())
                    } else {
                        String::new()
                    };
                    (format_sig(*u), format_sig(abs), rel)
                }
                None => Default::default(),
            };
            let _ = writeln!(
                out,
                "{},{},{exact_s},{},{abs_s},{rel_s}",
                format_sig(p.x()),
                format_sig(p.y()),
                format_sig(*computed)
            );
        }
        out
    }

    pub fn to_table(&self) -> String {
        let bkm = format!("BKM({})", self.knots);
        let mut out = format!("{:>8} {:>8} {:>12} {:>12}\n", "x", "y", "Exact", bkm);
        for (p, computed, exact) in &self.rows {
            let exact = exact.map_or_else(|| "-".to_string(), |u| format!("{u:.4}"));
            let _ = writeln!(
                out,
                "{:>8.2} {:>8.2} {:>12} {:>12.4}",
                p.x(),
                p.y(),
                exact,
                computed
            );
        }
        out
    }
}
