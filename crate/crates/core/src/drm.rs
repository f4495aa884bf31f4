//! Dual reciprocity: interpolate the inhomogeneous term with the `phi` basis
//! over every knot, then sum the matching `phi_hat` particular solutions.

use std::sync::OnceLock;

use crate::error::{invalid, Result};
use crate::geometry::{distance, normal_projection, KnotSet, Point};
use crate::kernels::KernelPair;
use crate::linalg::{max_abs, DenseMatrix, Lu};

/// `A[i][j] = phi(|x_i - x_j|)` over boundary-then-interior knots.
#[derive(Debug)]
pub struct InterpolationMatrix {
    matrix: DenseMatrix,
    knots: KnotSet,
    kernel: KernelPair,
    lu: OnceLock<Lu>,
}

/// Assemble the interpolation matrix. The knot set already guarantees
/// distinct knots.
pub fn build_interpolation_matrix(
    knots: &KnotSet,
    kernel: &KernelPair,
) -> Result<InterpolationMatrix> {
    if knots.dim() != kernel.dim() {
        return Err(invalid(format!(
            "{}D kernel pair used with {}D knots",
            kernel.dim(),
            knots.dim()
        )));
    }
    let pts: Vec<Point> = knots.points().collect();
    let n = pts.len();
    let mut matrix = DenseMatrix::zeros(n, n);
    for i in 0..n {
        matrix[(i, i)] = kernel.phi(0.0);
        for j in 0..i {
            let v = kernel.phi(distance(&pts[i], &pts[j]));
            matrix[(i, j)] = v;
            matrix[(j, i)] = v;
        }
    }
    Ok(InterpolationMatrix {
        matrix,
        knots: knots.clone(),
        kernel: *kernel,
        lu: OnceLock::new(),
    })
}

impl InterpolationMatrix {
    pub fn matrix(&self) -> &DenseMatrix {
        &self.matrix
    }

    pub fn knots(&self) -> &KnotSet {
        &self.knots
    }

    pub fn kernel(&self) -> &KernelPair {
        &self.kernel
    }

    pub fn len(&self) -> usize {
        self.matrix.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_factored(&self) -> bool {
        self.lu.get().is_some()
    }

    /// LU factors, computed on first use. Fails past the condition limit.
    pub fn lu(&self) -> Result<&Lu> {
        if let Some(lu) = self.lu.get() {
            return Ok(lu);
        }
        let lu = Lu::factor_checked(&self.matrix, "interpolation")?;
        Ok(self.lu.get_or_init(|| lu))
    }

    pub fn condition_estimate(&self) -> Result<f64> {
        Ok(self.lu()?.condition_estimate())
    }

    /// Solve `A alpha = rhs` and wrap the result as a fit.
    pub fn fit(&self, rhs_values: &[f64]) -> Result<DrmFit> {
        if rhs_values.len() != self.len() {
            return Err(invalid(format!(
                "expected {} right-hand-side values, got {}",
                self.len(),
                rhs_values.len()
            )));
        }
        let lu = self.lu()?;
        let alpha = lu.solve(rhs_values);
        let applied = self.matrix.mul_vec(&alpha);
        let residual = rhs_values
            .iter()
            .zip(&applied)
            .fold(0.0f64, |m, (b, a)| m.max((b - a).abs()));
        Ok(DrmFit {
            alpha,
            kernel: self.kernel,
            knots: self.knots.clone(),
            condition: lu.condition_estimate(),
            residual,
        })
    }
}

/// Fitted expansion `sum_j alpha_j phi(r_j)` of the inhomogeneous term.
#[derive(Debug, Clone)]
pub struct DrmFit {
    alpha: Vec<f64>,
    kernel: KernelPair,
    knots: KnotSet,
    condition: f64,
    residual: f64,
}

/// Interpolate pre-evaluated right-hand-side values at the knots.
pub fn fit_particular(knots: &KnotSet, kernel: &KernelPair, rhs_values: &[f64]) -> Result<DrmFit> {
    build_interpolation_matrix(knots, kernel)?.fit(rhs_values)
}

impl DrmFit {
    /// Build a fit from known coefficients.
    pub fn from_coefficients(
        knots: &KnotSet,
        kernel: &KernelPair,
        alpha: Vec<f64>,
    ) -> Result<Self> {
        if alpha.len() != knots.len() {
            return Err(invalid(format!(
                "expected {} coefficients, got {}",
                knots.len(),
                alpha.len()
            )));
        }
        Ok(DrmFit {
            alpha,
            kernel: *kernel,
            knots: knots.clone(),
            condition: f64::NAN,
            residual: f64::NAN,
        })
    }

    /// Wrap coefficients solved elsewhere, recording the interpolation
    /// residual against `matrix` and `rhs_values`.
    pub(crate) fn with_diagnostics(
        knots: &KnotSet,
        kernel: &KernelPair,
        alpha: Vec<f64>,
        condition: Option<f64>,
        matrix: &DenseMatrix,
        rhs_values: &[f64],
    ) -> Result<Self> {
        let mut fit = DrmFit::from_coefficients(knots, kernel, alpha)?;
        fit.condition = condition.unwrap_or(f64::NAN);
        fit.residual = matrix
            .mul_vec(&fit.alpha)
            .iter()
            .zip(rhs_values)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        Ok(fit)
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn kernel(&self) -> &KernelPair {
        &self.kernel
    }

    pub fn knots(&self) -> &KnotSet {
        &self.knots
    }

    /// Condition estimate of the interpolation solve (NaN if not solved here).
    pub fn condition(&self) -> f64 {
        self.condition
    }

    /// `max_i |(A alpha - rhs)_i|` at solve time.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    /// The interpolant `sum_j alpha_j phi(|x - x_j|)` of the forcing.
    pub fn interpolant(&self, x: &Point) -> f64 {
        self.knots
            .points()
            .zip(&self.alpha)
            .map(|(c, a)| a * self.kernel.phi(distance(x, &c)))
            .sum()
    }

    /// `u_p(x) = sum_j alpha_j phi_hat(|x - x_j|)`.
    pub fn value(&self, x: &Point) -> f64 {
        self.knots
            .points()
            .zip(&self.alpha)
            .map(|(c, a)| a * self.kernel.phi_hat(distance(x, &c)))
            .sum()
    }

    /// `du_p/dn` at `x` for unit normal `n`.
    pub fn normal_derivative(&self, x: &Point, n: &Point) -> f64 {
        self.knots
            .points()
            .zip(&self.alpha)
            .map(|(c, a)| {
                let r = distance(x, &c);
                a * self.kernel.phi_hat_normal(r, normal_projection(x, &c, n))
            })
            .sum()
    }
}

pub fn evaluate_particular(fit: &DrmFit, x: &Point) -> f64 {
    fit.value(x)
}

pub fn evaluate_particular_normal(fit: &DrmFit, x: &Point, n: &Point) -> f64 {
    fit.normal_derivative(x, n)
}

/// `rho{A} A^-1`: maps nodal values of `u` to nodal values of the linear
/// remainder `rho{u}`, given `rho` applied to each interpolation basis
/// function at each knot.
pub fn apply_operator_coupling(
    fit_matrix: &InterpolationMatrix,
    rho_applied_basis: &DenseMatrix,
) -> Result<DenseMatrix> {
    let n = fit_matrix.len();
    if rho_applied_basis.rows() != n || rho_applied_basis.cols() != n {
        return Err(invalid(format!(
            "remainder basis images must be {n}x{n}, got {}x{}",
            rho_applied_basis.rows(),
            rho_applied_basis.cols()
        )));
    }
    let lu = fit_matrix.lu()?;
    // Row i of M A^-1 solves A^T y = M_i^T.
    let mut out = DenseMatrix::zeros(n, n);
    for i in 0..n {
        if max_abs(rho_applied_basis.row(i)) == 0.0 {
            continue;
        }
        let y = lu.solve_transpose(rho_applied_basis.row(i));
        out.row_mut(i).copy_from_slice(&y);
    }
    Ok(out)
}
