//! Reference problems, error reports and their CSV/table rendering.
//!
//! Two cases ship with the crate:
//!
//! - `table1`: `(laplacian + 1) u = x` on the ellipse `x^2/4 + y^2 = 1` with
//!   Dirichlet data from `u = sin x + x`, shape `c = 3`;
//! - `table2`: `laplacian u + u^2 = y e^x + y^2 e^(2x)` with `u = y e^x` on the
//!   boundary, shape `c = 18`. The ellipse is centered at `(3, 0)` with
//!   semi-axes `1.5` and `0.5`, which puts `(4.5, 0)` and `(3, +-0.5)` on the
//!   boundary.

use std::fmt::Write as _;
use std::io;
use std::sync::Arc;

use crate::bkm::{solve, Diagnostics, SolveOptions};
use crate::error::{invalid, Result};
use crate::geometry::{ellipse_knots, Ellipse, Point};
use crate::kernels::mq_pair;
use crate::problem::{field, Field, ProblemSpec, Remainder};

/// A problem with known solution and the points where it is checked.
#[derive(Clone, Debug)]
pub struct BenchmarkCase {
    pub label: String,
    pub problem: ProblemSpec,
    pub ellipse: Ellipse,
    /// Test points with the exact solution there.
    pub test_points: Vec<(Point, f64)>,
    pub default_knots: Vec<usize>,
    pub default_shape: f64,
}

/// Exact-solution check: `laplacian(u) + u - f - rho(u)` from closed forms.
fn verify_exact(case: &BenchmarkCase, laplacian: &dyn Fn(&Point) -> f64) {
    let exact = case
        .problem
        .exact
        .as_ref()
        .expect("benchmark cases carry an exact solution");
    for (p, value) in &case.test_points {
        let u = exact(p);
        assert_eq!(u, *value, "tabulated exact value drifted at {p:?}");
        let rho = match &case.problem.remainder {
            Remainder::Zero => 0.0,
            Remainder::BoundaryNonlinear(g) => g(u, p),
            Remainder::Linear(_) => unreachable!("benchmark cases have no linear remainder"),
        };
        let residual = laplacian(p) + u - (case.problem.forcing)(p) - rho;
        assert!(
            residual.abs() <= 1e-10 * (1.0 + u.abs()),
            "exact solution misses the governing equation by {residual} at {p:?}"
        );
    }
}

fn tabulate(exact: &Field, coords: &[(f64, f64)]) -> Vec<(Point, f64)> {
    coords
        .iter()
        .map(|&(x, y)| {
            let p = Point::new2(x, y);
            (p, exact(&p))
        })
        .collect()
}

/// `(laplacian + 1) u = x`, `u = sin x + x`.
pub fn table1_case() -> BenchmarkCase {
    let exact = field(|p| p.x().sin() + p.x());
    let problem = ProblemSpec::new(field(|p| p.x()))
        .with_dirichlet(exact.clone())
        .with_exact(exact.clone());
    let ellipse = Ellipse::new(Point::new2(0.0, 0.0), 2.0, 1.0).expect("valid ellipse");
    let coords = [
        (1.5, 0.0),
        (1.2, -0.35),
        (0.6, -0.45),
        (0.0, 0.0),
        (0.9, 0.0),
        (0.3, 0.0),
    ];
    let case = BenchmarkCase {
        label: "table1".into(),
        problem: problem.with_geometry(ellipse),
        ellipse,
        test_points: tabulate(&exact, &coords),
        default_knots: vec![5, 7],
        default_shape: 3.0,
    };
    verify_exact(&case, &|p| -p.x().sin());
    case
}

/// `laplacian u + u^2 = y e^x + y^2 e^(2x)`, `u = y e^x`, written as
/// `(laplacian + 1) u = f + (u - u^2)`.
pub fn table2_case() -> BenchmarkCase {
    let exact = field(|p| p.y() * p.x().exp());
    let forcing = field(|p| {
        let e = p.x().exp();
        p.y() * e + p.y() * p.y() * e * e
    });
    let remainder = Remainder::BoundaryNonlinear(Arc::new(|u, _| u - u * u));
    let ellipse = Ellipse::new(Point::new2(3.0, 0.0), 1.5, 0.5).expect("valid ellipse");
    let problem = ProblemSpec::new(forcing)
        .with_remainder(remainder)
        .with_dirichlet(exact.clone())
        .with_exact(exact.clone())
        .with_geometry(ellipse);
    let coords = [
        (4.5, 0.0),
        (4.2, -0.35),
        (3.6, -0.45),
        (3.0, -0.45),
        (2.4, -0.45),
        (1.8, -0.35),
        (3.0, 0.5),
        (3.0, -0.5),
    ];
    let case = BenchmarkCase {
        label: "table2".into(),
        problem,
        ellipse,
        test_points: tabulate(&exact, &coords),
        default_knots: vec![7, 9],
        default_shape: 18.0,
    };
    verify_exact(&case, &|p| p.y() * p.x().exp());
    case
}

/// Look a case up by label.
pub fn case_by_name(name: &str) -> Result<BenchmarkCase> {
    match name {
        "table1" => Ok(table1_case()),
        "table2" => Ok(table2_case()),
        other => Err(invalid(format!(
            "unknown benchmark case `{other}` (expected table1 or table2)"
        ))),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub point: Point,
    pub exact: f64,
    pub computed: f64,
    pub abs_err: f64,
    /// Undefined where the exact value is zero.
    pub rel_err: Option<f64>,
}

impl ReportRow {
    pub fn new(point: Point, exact: f64, computed: f64) -> Self {
        let abs_err = (computed - exact).abs();
        let rel_err = (exact != 0.0).then(|| abs_err / exact.abs());
        ReportRow {
            point,
            exact,
            computed,
            abs_err,
            rel_err,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ErrorReport {
    pub label: String,
    pub knots: usize,
    pub shape: f64,
    pub frm_neighbors: Option<usize>,
    pub rows: Vec<ReportRow>,
    pub diagnostics: Diagnostics,
}

impl ErrorReport {
    /// Zero for an empty report.
    pub fn max_abs_error(&self) -> f64 {
        self.rows.iter().map(|r| r.abs_err).fold(0.0, f64::max)
    }

    pub fn max_rel_error(&self) -> Option<f64> {
        self.rows.iter().filter_map(|r| r.rel_err).reduce(f64::max)
    }

    /// Root mean square of the absolute errors; zero for an empty report.
    pub fn rms(&self) -> f64 {
        if self.rows.is_empty() {
            return 0.0;
        }
        let sum: f64 = self.rows.iter().map(|r| r.abs_err * r.abs_err).sum();
        (sum / self.rows.len() as f64).sqrt()
    }

    /// Header plus one line per row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for row in &self.rows {
            let rel = row.rel_err.map(format_sig).unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                format_sig(row.point.x()),
                format_sig(row.point.y()),
                format_sig(row.exact),
                format_sig(row.computed),
                format_sig(row.abs_err),
                rel
            );
        }
        out
    }

    /// Fixed-width table with columns `x, y, Exact, BKM(N)`.
    pub fn to_table(&self) -> String {
        let bkm = format!("BKM({})", self.knots);
        let mut out = format!("{:>8} {:>8} {:>12} {:>12}\n", "x", "y", "Exact", bkm);
        for row in &self.rows {
            let _ = writeln!(
                out,
                "{:>8.2} {:>8.2} {:>12.4} {:>12.4}",
                row.point.x(),
                row.point.y(),
                row.exact,
                row.computed
            );
        }
        let _ = writeln!(
            out,
            "max abs error {:.3e}, rms {:.3e}, c = {}",
            self.max_abs_error(),
            self.rms(),
            self.shape
        );
        out
    }
}

pub const CSV_HEADER: &str = "x,y,exact,computed,abs_err,rel_err";

/// Ten significant digits, fixed notation for moderate exponents and
/// scientific otherwise, trailing zeros removed.
pub fn format_sig(value: f64) -> String {
    if value == 0.0 {
        return "0".into();
    }
    if !value.is_finite() {
        return format!("{value}");
    }
    let sci = format!("{value:.9e}");
    let (mantissa, exponent) = sci
        .split_once('e')
        .expect("scientific format has an exponent");
    let exponent: i32 = exponent.parse().expect("integer exponent");
    if (-5..10).contains(&exponent) {
        let decimals = (9 - exponent).max(0) as usize;
        trim_zeros(format!("{value:.decimals$}"))
    } else {
        format!("{}e{exponent}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

/// Place `n` uniform knots on the case boundary, solve with shape `c` and
/// evaluate at every test point.
pub fn run_case(
    case: &BenchmarkCase,
    n: usize,
    c: f64,
    frm_neighbors: Option<usize>,
) -> Result<ErrorReport> {
    let knots = ellipse_knots(&case.ellipse, n)?;
    let kernel = mq_pair(c)?;
    let solution = solve(
        &case.problem,
        &knots,
        &kernel,
        SolveOptions { frm_neighbors },
    )?;
    let rows = case
        .test_points
        .iter()
        .map(|(p, exact)| ReportRow::new(*p, *exact, solution.evaluate(p)))
        .collect();
    log::info!(
        "{}: N={n} c={c} condition(drm)={:?} condition(bkm)={:?}",
        case.label,
        solution.diagnostics().drm_condition,
        solution.diagnostics().homogeneous_condition
    );
    Ok(ErrorReport {
        label: case.label.clone(),
        knots: n,
        shape: c,
        frm_neighbors,
        rows,
        diagnostics: solution.diagnostics().clone(),
    })
}

/// One report per knot count; failures stay in their slot.
pub fn convergence_sweep(
    case: &BenchmarkCase,
    knot_counts: &[usize],
    c: f64,
) -> Vec<Result<ErrorReport>> {
    knot_counts
        .iter()
        .map(|&n| run_case(case, n, c, None))
        .collect()
}

/// Blocks of `# knots=N rms=R` followed by the report CSV, separated by a
/// blank line. A failed run becomes a single `# knots=N error=...` line.
pub fn sweep_csv(knot_counts: &[usize], reports: &[Result<ErrorReport>]) -> String {
    knot_counts
        .iter()
        .zip(reports)
        .map(|(n, r)| match r {
            Ok(r) => format!("# knots={n} rms={}\n{}", format_sig(r.rms()), r.to_csv()),
            Err(e) => format!("# knots={n} error={e}\n"),
        })
        .collect::<Vec<_>>()
        .join("\n")
}

pub fn write_csv<W: io::Write>(report: &ErrorReport, mut out: W) -> io::Result<()> {
    out.write_all(report.to_csv().as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn round2(v: f64) -> f64 {
        (v * 100.0).round() / 100.0
    }

    #[test]
    fn table1_exact_values_to_two_decimals() {
        let case = table1_case();
        let rounded = [2.50, 2.13, 1.16, 0.0, 1.68, 0.60];
        assert_eq!(case.test_points.len(), rounded.len());
        for ((_, exact), want) in case.test_points.iter().zip(rounded) {
            assert_eq!(round2(*exact), want);
        }
        assert_eq!(case.test_points[3].1, 0.0);
        assert_eq!(case.default_knots, [5, 7]);
        assert_eq!(case.default_shape, 3.0);
    }

    #[test]
    fn table2_exact_values_to_two_decimals() {
        let case = table2_case();
        let rounded = [0.0, -23.34, -16.47, -9.04, -4.96, -2.12, 10.04, -10.04];
        for ((_, exact), want) in case.test_points.iter().zip(rounded) {
            assert_eq!(round2(*exact), want);
        }
        assert_eq!(case.default_knots, [7, 9]);
        assert_eq!(case.default_shape, 18.0);
    }

    #[test]
    fn table2_boundary_points_lie_on_the_ellipse() {
        let case = table2_case();
        for (x, y) in [(4.5, 0.0), (3.0, 0.5), (3.0, -0.5)] {
            assert!((case.ellipse.level(&Point::new2(x, y)) - 1.0).abs() <= 1e-12);
        }
        // Two test points sit slightly outside this ellipse, so the
        // solution is extrapolated there.
        let outside: Vec<(f64, f64)> = case
            .test_points
            .iter()
            .filter(|(p, _)| case.ellipse.level(p) > 1.0 + 1e-12)
            .map(|(p, _)| (p.x(), p.y()))
            .collect();
        assert_eq!(outside, [(4.2, -0.35), (1.8, -0.35)]);
    }

    #[test]
    fn table1_seven_knots() {
        let report = run_case(&table1_case(), 7, 3.0, None).unwrap();
        assert!(report.max_abs_error() <= 0.1, "{}", report.max_abs_error());
        assert_eq!(report.rows.len(), 6);
    }

    #[test]
    fn table2_nine_knots() {
        let report = run_case(&table2_case(), 9, 18.0, None).unwrap();
        assert!(report.max_rel_error().unwrap() <= 0.08);
        assert!(report.rows[0].rel_err.is_none());
        assert!(report.rows[0].computed.abs() <= 0.05);
        assert_eq!(report.diagnostics.factorizations, 2);
    }

    #[test]
    fn sweep_table1_converges() {
        let reports = convergence_sweep(&table1_case(), &[5, 7], 3.0);
        let rms: Vec<f64> = reports.iter().map(|r| r.as_ref().unwrap().rms()).collect();
        assert!(rms[1] <= rms[0]);
        assert_eq!(convergence_sweep(&table1_case(), &[7], 3.0).len(), 1);
    }

    #[test]
    fn sweep_table2_both_within_tolerance() {
        for report in convergence_sweep(&table2_case(), &[7, 9], 18.0) {
            assert!(report.unwrap().max_rel_error().unwrap() <= 0.08);
        }
    }

    #[test]
    fn sweep_keeps_failures_in_place() {
        let reports = convergence_sweep(&table1_case(), &[0, 7], 3.0);
        assert!(reports[0].is_err());
        assert!(reports[1].is_ok());
    }

    #[test]
    fn empty_case_gives_empty_report() {
        let mut case = table1_case();
        case.test_points.clear();
        let report = run_case(&case, 7, 3.0, None).unwrap();
        assert!(report.rows.is_empty());
        assert_eq!(report.max_abs_error(), 0.0);
        assert_eq!(report.rms(), 0.0);
        assert_eq!(report.to_csv(), format!("{CSV_HEADER}\n"));
    }

    #[test]
    fn runs_are_deterministic() {
        let a = run_case(&table2_case(), 9, 18.0, None).unwrap();
        let b = run_case(&table2_case(), 9, 18.0, None).unwrap();
        assert_eq!(a.to_csv(), b.to_csv());
        assert_eq!(a.rows, b.rows);
    }

    #[test]
    fn frm_with_full_support_matches_dense() {
        let dense = run_case(&table1_case(), 7, 3.0, None).unwrap();
        let sparse = run_case(&table1_case(), 7, 3.0, Some(7)).unwrap();
        for (d, s) in dense.rows.iter().zip(&sparse.rows) {
            assert!((d.computed - s.computed).abs() <= 1e-10);
        }
    }

    #[test]
    fn significant_digit_formatting() {
        assert_eq!(format_sig(0.0), "0");
        assert_eq!(format_sig(2.5), "2.5");
        assert_eq!(format_sig(-0.35), "-0.35");
        assert_eq!(format_sig(1.0 / 3.0), "0.3333333333");
        assert_eq!(format_sig(123456.789012345), "123456.789");
        assert_eq!(format_sig(1.5e-7), "1.5e-7");
        assert_eq!(format_sig(-2.0e12), "-2e12");
        assert_eq!(format_sig(0.0001234567891234), "0.0001234567891");
        assert_eq!(format_sig(9.9999999999), "10");
    }

    #[test]
    fn csv_has_header_and_blank_rel_for_zero_exact() {
        let report = run_case(&table2_case(), 9, 18.0, None).unwrap();
        let csv = report.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        let first = lines.next().unwrap();
        assert!(first.starts_with("4.5,0,0,"));
        assert!(first.ends_with(','));
        assert_eq!(csv.lines().count(), 9);
    }

    #[test]
    fn table_layout() {
        let report = run_case(&table1_case(), 7, 3.0, None).unwrap();
        let table = report.to_table();
        let header: Vec<&str> = table.lines().next().unwrap().split_whitespace().collect();
        assert_eq!(header, ["x", "y", "Exact", "BKM(7)"]);
        assert_eq!(table.lines().count(), 8);
    }

    #[test]
    fn sweep_csv_blocks() {
        let reports = convergence_sweep(&table1_case(), &[5, 7], 3.0);
        let text = sweep_csv(&[5, 7], &reports);
        let comments: Vec<&str> = text.lines().filter(|l| l.starts_with('#')).collect();
        assert_eq!(comments.len(), 2);
        assert!(comments[0].starts_with("# knots=5 rms="));
        assert_eq!(text.lines().filter(|l| *l == CSV_HEADER).count(), 2);
    }

    #[test]
    fn sweep_csv_records_failures() {
        let reports = convergence_sweep(&table1_case(), &[0, 7], 3.0);
        let text = sweep_csv(&[0, 7], &reports);
        assert!(text.starts_with("# knots=0 error="));
        assert_eq!(text.lines().filter(|l| *l == CSV_HEADER).count(), 1);
    }

    #[test]
    fn unknown_case_name() {
        assert!(case_by_name("table3").is_err());
        assert_eq!(case_by_name("table2").unwrap().label, "table2");
    }
}
