//! Problem descriptions for `(laplacian + 1) u = f(x) + rho{u}`.

use std::fmt;
use std::sync::Arc;

use crate::error::{invalid, Result};
use crate::geometry::{distance, Ellipse, Point};
use crate::kernels::KernelPair;

/// A scalar field over points.
pub type Field = Arc<dyn Fn(&Point) -> f64 + Send + Sync>;

/// `g(u, x)`, a remainder that can be evaluated pointwise from `u` alone.
pub type PointwiseRemainder = Arc<dyn Fn(f64, &Point) -> f64 + Send + Sync>;

pub fn field<F>(f: F) -> Field
where
    F: Fn(&Point) -> f64 + Send + Sync + 'static,
{
    Arc::new(f)
}

/// A linear remainder operator, described by its action on the
/// interpolation basis `phi(|x - source|)`.
pub trait LinearRemainder: Send + Sync + fmt::Debug {
    /// `rho{phi(|. - source|)}` evaluated at `response`.
    fn apply_to_basis(&self, kernel: &KernelPair, response: &Point, source: &Point) -> f64;
}

/// `rho{u} = factor * u`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledIdentity(pub f64);

impl LinearRemainder for ScaledIdentity {
    fn apply_to_basis(&self, kernel: &KernelPair, response: &Point, source: &Point) -> f64 {
        self.0 * kernel.phi(distance(response, source))
    }
}

/// `rho{u} = coefficient * du/dx_axis`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Convection {
    pub axis: usize,
    pub coefficient: f64,
}

impl LinearRemainder for Convection {
    fn apply_to_basis(&self, kernel: &KernelPair, response: &Point, source: &Point) -> f64 {
        let r = distance(response, source);
        if r == 0.0 {
            return 0.0;
        }
        let along = response.coords()[self.axis] - source.coords()[self.axis];
        self.coefficient * kernel.phi_radial_derivative(r) * along / r
    }
}

/// The part of the operator moved to the right-hand side.
#[derive(Clone, Default)]
pub enum Remainder {
    #[default]
    Zero,
    Linear(Arc<dyn LinearRemainder>),
    /// Evaluated from known boundary data; only usable with boundary-only
    /// Dirichlet knots.
    BoundaryNonlinear(PointwiseRemainder),
}

impl fmt::Debug for Remainder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Remainder::Zero => f.write_str("Zero"),
            Remainder::Linear(op) => f.debug_tuple("Linear").field(op).finish(),
            Remainder::BoundaryNonlinear(_) => f.write_str("BoundaryNonlinear(..)"),
        }
    }
}

/// Forcing, remainder and boundary data.
#[derive(Clone)]
pub struct ProblemSpec {
    pub dim: usize,
    pub geometry: Option<Ellipse>,
    pub forcing: Field,
    pub remainder: Remainder,
    pub dirichlet: Option<Field>,
    pub neumann: Option<Field>,
    pub exact: Option<Field>,
}

impl fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("dim", &self.dim)
            .field("geometry", &self.geometry)
            .field("remainder", &self.remainder)
            .field("dirichlet", &self.dirichlet.is_some())
            .field("neumann", &self.neumann.is_some())
            .field("exact", &self.exact.is_some())
            .finish()
    }
}

impl ProblemSpec {
    /// A 2D problem with forcing `f` and no boundary data yet.
    pub fn new(forcing: Field) -> Self {
        ProblemSpec {
            dim: 2,
            geometry: None,
            forcing,
            remainder: Remainder::Zero,
            dirichlet: None,
            neumann: None,
            exact: None,
        }
    }

    pub fn with_dim(mut self, dim: usize) -> Self {
        self.dim = dim;
        self
    }

    pub fn with_geometry(mut self, ellipse: Ellipse) -> Self {
        self.geometry = Some(ellipse);
        self
    }

    pub fn with_remainder(mut self, remainder: Remainder) -> Self {
        self.remainder = remainder;
        self
    }

    pub fn with_dirichlet(mut self, data: Field) -> Self {
        self.dirichlet = Some(data);
        self
    }

    pub fn with_neumann(mut self, data: Field) -> Self {
        self.neumann = Some(data);
        self
    }

    pub fn with_exact(mut self, exact: Field) -> Self {
        self.exact = Some(exact);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dim == 2 || self.dim == 3) {
            return Err(invalid(format!(
                "dimension must be 2 or 3, got {}",
                self.dim
            )));
        }
        if self.dirichlet.is_none() && self.neumann.is_none() {
            return Err(invalid("problem has no boundary data"));
        }
        Ok(())
    }
}
