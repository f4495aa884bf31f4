//! Boundary knot method.
//!
//! The solution is split as `u = v + u_p`. The particular part `u_p` comes
//! from a dual-reciprocity fit of the right-hand side over every knot; the
//! homogeneous part `v = sum_k lambda_k J0(|x - x_k|)` is collocated at the
//! boundary knots against the boundary data corrected by `u_p`. Because
//! `J0` (or `sin(r)/r` in 3D) is non-singular, sources and collocation
//! points are the same physical boundary knots.

use crate::drm::{apply_operator_coupling, build_interpolation_matrix, DrmFit};
use crate::error::{invalid, BkmError, Result};
use crate::frm::{solve_sparse, truncate_with, TruncationOptions};
use crate::geometry::{distance, normal_projection, BoundaryKind, KnotSet, Point};
use crate::kernels::{helmholtz_general_solution, GeneralSolution, KernelPair};
use crate::linalg::{DenseMatrix, DenseSystem, Lu};
use crate::problem::{LinearRemainder, ProblemSpec, Remainder};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolveOptions {
    /// Truncate both solves to this many nearest neighbours per row
    /// (clamped to the system size).
    pub frm_neighbors: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostics {
    /// `None` when the interpolation system went through the sparse path.
    pub drm_condition: Option<f64>,
    /// Condition estimate of the collocation system.
    pub homogeneous_condition: Option<f64>,
    /// Matrix factorizations performed by the solve.
    pub factorizations: usize,
    /// `max_i |(H x - b)_i| / max(1, |b_i|)` over the collocation system.
    pub collocation_residual: f64,
    pub boundary_knots: usize,
    pub interior_knots: usize,
    pub shape: f64,
}

#[derive(Debug, Clone)]
pub struct BkmSolution {
    lambda: Vec<f64>,
    drm_fit: DrmFit,
    general: GeneralSolution,
    sources: Vec<Point>,
    interior_u: Option<Vec<f64>>,
    diagnostics: Diagnostics,
}

impl BkmSolution {
    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    pub fn drm_fit(&self) -> &DrmFit {
        &self.drm_fit
    }

    pub fn general_solution(&self) -> GeneralSolution {
        self.general
    }

    /// Nodal values at the interior knots, if any were used.
    pub fn interior_u(&self) -> Option<&[f64]> {
        self.interior_u.as_deref()
    }

    pub fn diagnostics(&self) -> &Diagnostics {
        &self.diagnostics
    }

    /// `v(x) = sum_k lambda_k g(|x - x_k|)`.
    pub fn homogeneous(&self, x: &Point) -> f64 {
        self.sources
            .iter()
            .zip(&self.lambda)
            .map(|(s, l)| l * self.general.value(distance(x, s)))
            .sum()
    }

    pub fn particular(&self, x: &Point) -> f64 {
        self.drm_fit.value(x)
    }

    /// `u(x) = v(x) + u_p(x)`.
    pub fn evaluate(&self, x: &Point) -> f64 {
        self.homogeneous(x) + self.particular(x)
    }

    /// `du/dn` at `x`.
    pub fn normal_derivative(&self, x: &Point, n: &Point) -> f64 {
        let v: f64 = self
            .sources
            .iter()
            .zip(&self.lambda)
            .map(|(s, l)| {
                l * self
                    .general
                    .normal_derivative(distance(x, s), normal_projection(x, s, n))
            })
            .sum();
        v + self.drm_fit.normal_derivative(x, n)
    }
}

pub fn evaluate(solution: &BkmSolution, x: &Point) -> f64 {
    solution.evaluate(x)
}

/// Collocation rows for every knot against the boundary sources.
///
/// Dirichlet and interior rows hold `g(r_ik)`; Neumann rows hold
/// `dg/dr(r_ik) * dr/dn` with the normal of the response knot. The result
/// is `(N + L) x N`, rows in knot order.
pub fn assemble_homogeneous_rows(knots: &KnotSet, gs: &GeneralSolution) -> Result<DenseMatrix> {
    if knots.dim() != gs.dim() {
        return Err(invalid(format!(
            "{}D general solution used with {}D knots",
            gs.dim(),
            knots.dim()
        )));
    }
    let sources: Vec<Point> = knots.boundary_points().collect();
    let n = sources.len();
    let mut out = DenseMatrix::zeros(knots.len(), n);
    for (i, knot) in knots.boundary().iter().enumerate() {
        for (k, s) in sources.iter().enumerate() {
            let r = distance(&knot.position, s);
            out[(i, k)] = match knot.kind {
                BoundaryKind::Dirichlet => gs.value(r),
                BoundaryKind::Neumann => {
                    gs.normal_derivative(r, normal_projection(&knot.position, s, &knot.normal))
                }
            };
        }
    }
    for (l, p) in knots.interior().iter().enumerate() {
        for (k, s) in sources.iter().enumerate() {
            out[(n + l, k)] = gs.value(distance(p, s));
        }
    }
    Ok(out)
}

/// Solve with a zero or linear remainder.
pub fn solve_linear(
    problem: &ProblemSpec,
    knots: &KnotSet,
    kernel: &KernelPair,
) -> Result<BkmSolution> {
    solve_linear_with(problem, knots, kernel, SolveOptions::default())
}

pub fn solve_linear_with(
    problem: &ProblemSpec,
    knots: &KnotSet,
    kernel: &KernelPair,
    options: SolveOptions,
) -> Result<BkmSolution> {
    check_inputs(problem, knots, kernel)?;
    match &problem.remainder {
        Remainder::Zero => {
            let rhs: Vec<f64> = knots.points().map(|p| (problem.forcing)(&p)).collect();
            solve_two_step(problem, knots, kernel, &rhs, options)
        }
        Remainder::Linear(op) => {
            if options.frm_neighbors.is_some() {
                return Err(BkmError::Unsupported(
                    "finite-support truncation of the coupled linear-remainder system".into(),
                ));
            }
            solve_coupled(problem, knots, kernel, op.as_ref())
        }
        Remainder::BoundaryNonlinear(_) => Err(BkmError::Unsupported(
            "nonlinear remainder in the linear solver; use solve_nonlinear_boundary_only".into(),
        )),
    }
}

/// Single linear solve for a nonlinear remainder `g(u, x)`: with boundary
/// knots only, every knot carries Dirichlet data, so `g` is evaluated on the
/// known boundary values and moves into the right-hand side.
pub fn solve_nonlinear_boundary_only(
    problem: &ProblemSpec,
    knots: &KnotSet,
    kernel: &KernelPair,
) -> Result<BkmSolution> {
    solve_nonlinear_boundary_only_with(problem, knots, kernel, SolveOptions::default())
}

pub fn solve_nonlinear_boundary_only_with(
    problem: &ProblemSpec,
    knots: &KnotSet,
    kernel: &KernelPair,
    options: SolveOptions,
) -> Result<BkmSolution> {
    check_inputs(problem, knots, kernel)?;
    if knots.interior_len() > 0 {
        return Err(BkmError::Unsupported(
            "nonlinear remainder with interior knots (u unknown there)".into(),
        ));
    }
    if knots
        .boundary()
        .iter()
        .any(|k| k.kind != BoundaryKind::Dirichlet)
    {
        return Err(BkmError::Unsupported(
            "nonlinear remainder needs Dirichlet data at every boundary knot".into(),
        ));
    }
    let dirichlet = problem
        .dirichlet
        .as_ref()
        .ok_or_else(|| invalid("nonlinear remainder needs Dirichlet data"))?;
    let rhs: Vec<f64> = match &problem.remainder {
        Remainder::BoundaryNonlinear(g) => knots
            .points()
            .map(|p| (problem.forcing)(&p) + g(dirichlet(&p), &p))
            .collect(),
        Remainder::Zero => knots.points().map(|p| (problem.forcing)(&p)).collect(),
        Remainder::Linear(_) => {
            return Err(BkmError::Unsupported(
                "linear remainder in the nonlinear solver; use solve_linear".into(),
            ))
        }
    };
    solve_two_step(problem, knots, kernel, &rhs, options)
}

/// Dispatch on the remainder kind.
pub fn solve(
    problem: &ProblemSpec,
    knots: &KnotSet,
    kernel: &KernelPair,
    options: SolveOptions,
) -> Result<BkmSolution> {
    match problem.remainder {
        Remainder::BoundaryNonlinear(_) => {
            solve_nonlinear_boundary_only_with(problem, knots, kernel, options)
        }
        _ => solve_linear_with(problem, knots, kernel, options),
    }
}

fn check_inputs(problem: &ProblemSpec, knots: &KnotSet, kernel: &KernelPair) -> Result<()> {
    problem.validate()?;
    if knots.dim() != problem.dim || kernel.dim() != problem.dim {
        return Err(invalid(format!(
            "dimension mismatch: problem {}D, knots {}D, kernel {}D",
            problem.dim,
            knots.dim(),
            kernel.dim()
        )));
    }
    for knot in knots.boundary() {
        let missing = match knot.kind {
            BoundaryKind::Dirichlet => problem.dirichlet.is_none(),
            BoundaryKind::Neumann => problem.neumann.is_none(),
        };
        if missing {
            return Err(invalid(format!(
                "{:?} knot at {:?} has no boundary data",
                knot.kind, knot.position
            )));
        }
    }
    Ok(())
}

fn boundary_value(problem: &ProblemSpec, kind: BoundaryKind, p: &Point) -> f64 {
    // check_inputs guarantees the data exists.
    match kind {
        BoundaryKind::Dirichlet => problem.dirichlet.as_ref().map_or(f64::NAN, |d| d(p)),
        BoundaryKind::Neumann => problem.neumann.as_ref().map_or(f64::NAN, |n| n(p)),
    }
}

fn relative_residual(matrix: &DenseMatrix, x: &[f64], rhs: &[f64]) -> f64 {
    matrix
        .mul_vec(x)
        .iter()
        .zip(rhs)
        .map(|(a, b)| (a - b).abs() / b.abs().max(1.0))
        .fold(0.0, f64::max)
}

/// Solve a square system densely (with a condition estimate) or through the
/// truncated sparse path.
fn solve_square(
    matrix: DenseMatrix,
    rhs: Vec<f64>,
    points: &[Point],
    neighbors: Option<usize>,
    context: &'static str,
) -> Result<(Vec<f64>, Option<f64>, f64)> {
    match neighbors {
        None => {
            let lu = Lu::factor_checked(&matrix, context)?;
            let x = lu.solve(&rhs);
            let res = relative_residual(&matrix, &x, &rhs);
            Ok((x, Some(lu.condition_estimate()), res))
        }
        Some(k) => {
            let n = rhs.len();
            let system = DenseSystem::new(matrix, rhs)?;
            let sparse =
                truncate_with(&system, points, k.clamp(1, n), TruncationOptions::default())?;
            let x = solve_sparse(&sparse)?;
            let res = sparse
                .matrix
                .mul_vec(&x)
                .iter()
                .zip(&sparse.rhs)
                .map(|(a, b)| (a - b).abs() / b.abs().max(1.0))
                .fold(0.0, f64::max);
            Ok((x, None, res))
        }
    }
}

/// DRM fit of known right-hand-side values, then boundary collocation.
fn solve_two_step(
    problem: &ProblemSpec,
    knots: &KnotSet,
    kernel: &KernelPair,
    rhs_values: &[f64],
    options: SolveOptions,
) -> Result<BkmSolution> {
    let gs = helmholtz_general_solution(knots.dim())?;
    let points: Vec<Point> = knots.points().collect();
    let interp = build_interpolation_matrix(knots, kernel)?;

    let (alpha, drm_condition, _) = solve_square(
        interp.matrix().clone(),
        rhs_values.to_vec(),
        &points,
        options.frm_neighbors,
        "interpolation",
    )?;
    let fit = DrmFit::with_diagnostics(
        knots,
        kernel,
        alpha,
        drm_condition,
        interp.matrix(),
        rhs_values,
    )?;

    let n = knots.boundary_len();
    let rows = assemble_homogeneous_rows(knots, &gs)?;
    let homogeneous = DenseMatrix::from_fn(n, n, |i, k| rows[(i, k)]);
    let rhs: Vec<f64> = knots
        .boundary()
        .iter()
        .map(|knot| {
            let data = boundary_value(problem, knot.kind, &knot.position);
            match knot.kind {
                BoundaryKind::Dirichlet => data - fit.value(&knot.position),
                BoundaryKind::Neumann => data - fit.normal_derivative(&knot.position, &knot.normal),
            }
        })
        .collect();
    let (lambda, homogeneous_condition, residual) = solve_square(
        homogeneous,
        rhs,
        &points[..n],
        options.frm_neighbors,
        "collocation",
    )?;

    let mut solution = BkmSolution {
        lambda,
        drm_fit: fit,
        general: gs,
        sources: points[..n].to_vec(),
        interior_u: None,
        diagnostics: Diagnostics {
            drm_condition,
            homogeneous_condition,
            factorizations: 2,
            collocation_residual: residual,
            boundary_knots: n,
            interior_knots: knots.interior_len(),
            shape: kernel.shape(),
        },
    };
    if knots.interior_len() > 0 {
        let values = knots
            .interior()
            .iter()
            .map(|p| solution.evaluate(p))
            .collect();
        solution.interior_u = Some(values);
    }
    log::debug!(
        "two-step solve: N = {n}, L = {}, conditions {:?} / {:?}",
        knots.interior_len(),
        drm_condition,
        homogeneous_condition
    );
    Ok(solution)
}

/// Linear remainder: nodal `u` feeds back into the interpolated right-hand
/// side through `alpha = A^-1 f + A^-1 C u`, `C = rho{A} A^-1`. Unknowns are
/// the `N` coefficients plus `u` at every knot without Dirichlet data.
fn solve_coupled(
    problem: &ProblemSpec,
    knots: &KnotSet,
    kernel: &KernelPair,
    op: &dyn LinearRemainder,
) -> Result<BkmSolution> {
    let gs = helmholtz_general_solution(knots.dim())?;
    let points: Vec<Point> = knots.points().collect();
    let total = points.len();
    let n = knots.boundary_len();

    let interp = build_interpolation_matrix(knots, kernel)?;
    let lu = interp.lu()?;
    let rho_basis = DenseMatrix::from_fn(total, total, |i, j| {
        op.apply_to_basis(kernel, &points[i], &points[j])
    });
    let coupling = apply_operator_coupling(&interp, &rho_basis)?;
    let feedback = lu.solve_matrix(&coupling);

    let mut known_u = vec![0.0; total];
    let mut unknown: Vec<usize> = Vec::new();
    for (i, knot) in knots.boundary().iter().enumerate() {
        match knot.kind {
            BoundaryKind::Dirichlet => {
                known_u[i] = boundary_value(problem, knot.kind, &knot.position)
            }
            BoundaryKind::Neumann => unknown.push(i),
        }
    }
    unknown.extend(n..total);

    let forcing: Vec<f64> = points.iter().map(|p| (problem.forcing)(p)).collect();
    let mut alpha0 = lu.solve(&forcing);
    for (a, fu) in alpha0.iter_mut().zip(feedback.mul_vec(&known_u)) {
        *a += fu;
    }

    // phi_hat rows (or their normal derivatives) at a response point.
    let psi_row = |x: &Point| -> Vec<f64> {
        points
            .iter()
            .map(|c| kernel.phi_hat(distance(x, c)))
            .collect()
    };
    let psi_normal_row = |x: &Point, nrm: &Point| -> Vec<f64> {
        points
            .iter()
            .map(|c| kernel.phi_hat_normal(distance(x, c), normal_projection(x, c, nrm)))
            .collect()
    };
    let dot = |a: &[f64], b: &[f64]| -> f64 { a.iter().zip(b).map(|(x, y)| x * y).sum() };
    // feedback columns for the unknown nodal values
    let feedback_u = DenseMatrix::from_fn(total, unknown.len(), |i, q| feedback[(i, unknown[q])]);
    let coupled = |psi: &[f64]| -> Vec<f64> {
        (0..unknown.len())
            .map(|q| (0..total).map(|i| psi[i] * feedback_u[(i, q)]).sum())
            .collect()
    };

    let size = n + unknown.len();
    let rows = assemble_homogeneous_rows(knots, &gs)?;
    let mut matrix = DenseMatrix::zeros(size, size);
    let mut rhs = vec![0.0; size];
    for (i, knot) in knots.boundary().iter().enumerate() {
        let psi = match knot.kind {
            BoundaryKind::Dirichlet => psi_row(&knot.position),
            BoundaryKind::Neumann => psi_normal_row(&knot.position, &knot.normal),
        };
        matrix.row_mut(i)[..n].copy_from_slice(rows.row(i));
        matrix.row_mut(i)[n..].copy_from_slice(&coupled(&psi));
        rhs[i] = boundary_value(problem, knot.kind, &knot.position) - dot(&psi, &alpha0);
    }
    // u_m = v(x_m) + u_p(x_m) at every knot whose value is unknown
    for (q, &m) in unknown.iter().enumerate() {
        let row = n + q;
        let x = points[m];
        for (k, s) in points[..n].iter().enumerate() {
            matrix[(row, k)] = gs.value(distance(&x, s));
        }
        let psi = psi_row(&x);
        matrix.row_mut(row)[n..].copy_from_slice(&coupled(&psi));
        matrix[(row, n + q)] -= 1.0;
        rhs[row] = -dot(&psi, &alpha0);
    }

    let system_lu = Lu::factor_checked(&matrix, "coupled collocation")?;
    let x = system_lu.solve(&rhs);
    let residual = relative_residual(&matrix, &x, &rhs);
    let lambda = x[..n].to_vec();
    let w = &x[n..];

    let mut alpha = alpha0;
    for (a, extra) in alpha.iter_mut().zip(feedback_u.mul_vec(w)) {
        *a += extra;
    }
    let mut nodal_u = known_u;
    for (q, &m) in unknown.iter().enumerate() {
        nodal_u[m] = w[q];
    }
    let mut drm_rhs = forcing;
    for (b, extra) in drm_rhs.iter_mut().zip(coupling.mul_vec(&nodal_u)) {
        *b += extra;
    }
    let drm_condition = lu.condition_estimate();
    let fit = DrmFit::with_diagnostics(
        knots,
        kernel,
        alpha,
        Some(drm_condition),
        interp.matrix(),
        &drm_rhs,
    )?;

    let interior_u = (knots.interior_len() > 0).then(|| nodal_u[n..].to_vec());
    Ok(BkmSolution {
        lambda,
        drm_fit: fit,
        general: gs,
        sources: points[..n].to_vec(),
        interior_u,
        diagnostics: Diagnostics {
            drm_condition: Some(drm_condition),
            homogeneous_condition: Some(system_lu.condition_estimate()),
            factorizations: 2,
            collocation_residual: residual,
            boundary_knots: n,
            interior_knots: knots.interior_len(),
            shape: kernel.shape(),
        },
    })
}
