//! General-solution RBFs.
//!
//! These kernels are built from a general solution `g(r)` of the governing
//! operator, weighted by the problem data at the source point and by
//! `r^(2m)` for smoothness at `r = 0`:
//!
//! | kind                | kernel                                         |
//! |---------------------|------------------------------------------------|
//! | interior            | `[f(x_s) + rho(g)(r)] r^(2m) g(r)`             |
//! | dirichlet           | `D(x_s) r^(2m) g'(r)`                          |
//! | neumann             | `N(x_s) r^(2m) g(r)`                           |
//! | simple              | `r^(2m) g(r)`                                  |
//! | wave                | `r^(2m) g(r) f(x_s, t_s)`, space-time `r`      |
//! | extended helmholtz  | `h(r) [f(x_s, t_s) + h(r) + (1 + 1/c^2) h_tt(r)]` |
//! | transient           | `tau^(2m) g(r, tau) f(x_s, t_s)`               |
//!
//! A positive dilation `c` turns any of them into a pre-wavelet kernel by
//! evaluating the general solution at `sqrt(r^2 + c^2)` instead of `r`; the
//! `r^(2m)` weight keeps the plain distance. The thin plate spline is the
//! simple kernel with `g = ln` and `m = 1`.

use std::fmt;
use std::sync::Arc;

use crate::error::{invalid, Result};
use crate::linalg::{DenseMatrix, Lu};

pub type Radial = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type SourceData = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
pub type SpaceTimeData = Arc<dyn Fn(&[f64], f64) -> f64 + Send + Sync>;
/// `g(r, tau)` for a transient operator.
pub type TransientSolution = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
pub type NodeField = Arc<dyn Fn(&Node) -> f64 + Send + Sync>;

/// A space (or space-time) node. Space-only kernels ignore `time`.
#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub space: Vec<f64>,
    pub time: f64,
}

impl Node {
    pub fn space(coords: &[f64]) -> Self {
        Node {
            space: coords.to_vec(),
            time: 0.0,
        }
    }

    pub fn space_time(coords: &[f64], time: f64) -> Self {
        Node {
            space: coords.to_vec(),
            time,
        }
    }
}

fn space_distance(p: &Node, q: &Node) -> f64 {
    p.space
        .iter()
        .zip(&q.space)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}

/// Distance with time treated as one more coordinate.
pub fn timespace_distance(p: &Node, q: &Node) -> Result<f64> {
    if p.space.len() != q.space.len() {
        return Err(invalid(format!(
            "space-time nodes differ in dimension: {} vs {}",
            p.space.len(),
            q.space.len()
        )));
    }
    let dt = p.time - q.time;
    let sum: f64 = p
        .space
        .iter()
        .zip(&q.space)
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    Ok((sum + dt * dt).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GsrKind {
    Interior,
    Dirichlet,
    Neumann,
    Simple,
    Wave,
    ExtendedHelmholtz,
    Transient,
}

/// Kernel recipe with the functions each kind needs.
#[derive(Clone)]
pub enum GsrForm {
    Interior {
        general: Radial,
        forcing: SourceData,
        /// `rho` applied to the general solution; `None` drops the term.
        rho_of_general: Option<Radial>,
    },
    Dirichlet {
        /// `dg/dr`, standing in for the normal derivative.
        general_derivative: Radial,
        data: SourceData,
    },
    Neumann {
        general: Radial,
        data: SourceData,
    },
    Simple {
        general: Radial,
    },
    Wave {
        general: Radial,
        forcing: SpaceTimeData,
    },
    ExtendedHelmholtz {
        h: Radial,
        h_tt: Radial,
        forcing: SpaceTimeData,
        wave_speed: f64,
    },
    Transient {
        general: TransientSolution,
        forcing: SpaceTimeData,
    },
}

impl GsrForm {
    pub fn kind(&self) -> GsrKind {
        match self {
            GsrForm::Interior { .. } => GsrKind::Interior,
            GsrForm::Dirichlet { .. } => GsrKind::Dirichlet,
            GsrForm::Neumann { .. } => GsrKind::Neumann,
            GsrForm::Simple { .. } => GsrKind::Simple,
            GsrForm::Wave { .. } => GsrKind::Wave,
            GsrForm::ExtendedHelmholtz { .. } => GsrKind::ExtendedHelmholtz,
            GsrForm::Transient { .. } => GsrKind::Transient,
        }
    }
}

#[derive(Clone)]
pub struct GsrKernel {
    form: GsrForm,
    power: u32,
    dilation: f64,
    keep_power: bool,
}

impl fmt::Debug for GsrKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GsrKernel")
            .field("kind", &self.form.kind())
            .field("m", &self.power)
            .field("dilation", &self.dilation)
            .field("keep_power", &self.keep_power)
            .finish()
    }
}

/// Default smoothness exponent.
pub const DEFAULT_POWER: i64 = 1;

/// Largest accepted smoothness exponent.
pub const MAX_POWER: i64 = 1000;

/// Build a kernel with smoothness exponent `m` and dilation `c` (0 for the
/// plain kernel).
pub fn make_gsr(form: GsrForm, m: i64, dilation: f64) -> Result<GsrKernel> {
    if m < 0 {
        return Err(invalid(format!(
            "smoothness exponent must be non-negative, got {m}"
        )));
    }
    if m > MAX_POWER {
        return Err(invalid(format!(
            "smoothness exponent {m} exceeds {MAX_POWER}"
        )));
    }
    let power = m as u32;
    if !(dilation >= 0.0 && dilation.is_finite()) {
        return Err(invalid(format!(
            "dilation must be finite and non-negative, got {dilation}"
        )));
    }
    if let GsrForm::ExtendedHelmholtz { wave_speed, .. } = &form {
        if !(*wave_speed > 0.0 && wave_speed.is_finite()) {
            return Err(invalid(format!(
                "wave speed must be positive, got {wave_speed}"
            )));
        }
    }
    Ok(GsrKernel {
        form,
        power,
        dilation,
        keep_power: true,
    })
}

/// `r^2 ln r`.
pub fn thin_plate_spline() -> GsrKernel {
    GsrKernel {
        form: GsrForm::Simple {
            general: Arc::new(f64::ln),
        },
        power: 1,
        dilation: 0.0,
        keep_power: true,
    }
}

impl GsrKernel {
    pub fn kind(&self) -> GsrKind {
        self.form.kind()
    }

    pub fn power(&self) -> u32 {
        self.power
    }

    pub fn dilation(&self) -> f64 {
        self.dilation
    }

    /// Drop the `r^(2m)` weight, for source and response sets that never
    /// share a point.
    pub fn without_power(mut self) -> Self {
        self.keep_power = false;
        self
    }

    /// Remove `rho(g)` from an interior kernel. Other kinds are unchanged.
    pub fn without_rho(mut self) -> Self {
        if let GsrForm::Interior { rho_of_general, .. } = &mut self.form {
            *rho_of_general = None;
        }
        self
    }

    fn weight(&self, base: f64) -> f64 {
        if self.keep_power {
            base.powi(2 * self.power as i32)
        } else {
            1.0
        }
    }

    fn dilated(&self, r: f64) -> f64 {
        if self.dilation > 0.0 {
            (r * r + self.dilation * self.dilation).sqrt()
        } else {
            r
        }
    }

    /// Kernel value for a response node and a source node.
    pub fn evaluate(&self, response: &Node, source: &Node) -> f64 {
        let (r, weight_base) = match self.form {
            GsrForm::Wave { .. } | GsrForm::ExtendedHelmholtz { .. } => {
                let r = timespace_distance_unchecked(response, source);
                (r, r)
            }
            GsrForm::Transient { .. } => (
                space_distance(response, source),
                response.time - source.time,
            ),
            _ => {
                let r = space_distance(response, source);
                (r, r)
            }
        };
        let arg = self.dilated(r);
        let weight = match self.form {
            GsrForm::ExtendedHelmholtz { .. } => 1.0,
            _ => self.weight(weight_base),
        };
        // The weight vanishes exactly at the source and absorbs any
        // singularity of g there.
        if weight == 0.0 {
            return 0.0;
        }
        let xs = &source.space[..];
        match &self.form {
            GsrForm::Interior {
                general,
                forcing,
                rho_of_general,
            } => {
                let rho = rho_of_general.as_ref().map_or(0.0, |rho| rho(arg));
                (forcing(xs) + rho) * weight * general(arg)
            }
            GsrForm::Dirichlet {
                general_derivative,
                data,
            } => data(xs) * weight * general_derivative(arg),
            GsrForm::Neumann { general, data } => data(xs) * weight * general(arg),
            GsrForm::Simple { general } => weight * general(arg),
            GsrForm::Wave { general, forcing } => weight * general(arg) * forcing(xs, source.time),
            GsrForm::ExtendedHelmholtz {
                h,
                h_tt,
                forcing,
                wave_speed,
            } => {
                let hv = h(arg);
                let inv_c2 = 1.0 / (wave_speed * wave_speed);
                hv * (forcing(xs, source.time) + hv + (1.0 + inv_c2) * h_tt(arg))
            }
            GsrForm::Transient { general, forcing } => {
                weight * general(arg, response.time - source.time) * forcing(xs, source.time)
            }
        }
    }
}

fn timespace_distance_unchecked(p: &Node, q: &Node) -> f64 {
    let s = space_distance(p, q);
    let dt = p.time - q.time;
    (s * s + dt * dt).sqrt()
}

/// `u(x) = sum_k beta_k phi(x, x_k) + beta_{N+1} psi(x)` with
/// `sum_k beta_k psi(x_k) = 0`.
#[derive(Clone)]
pub struct ConstrainedFit {
    beta: Vec<f64>,
    nodes: Vec<Node>,
    psi: NodeField,
    kernel: GsrKernel,
    condition: f64,
}

impl fmt::Debug for ConstrainedFit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ConstrainedFit")
            .field("beta", &self.beta)
            .field("nodes", &self.nodes.len())
            .field("kernel", &self.kernel)
            .field("condition", &self.condition)
            .finish()
    }
}

/// Interpolate `values` at `nodes` with the bordered system
/// `[A psi; psi^T 0] [beta; beta_psi] = [values; 0]`.
pub fn constrained_interpolate(
    nodes: &[Node],
    kernel: &GsrKernel,
    psi: NodeField,
    values: &[f64],
) -> Result<ConstrainedFit> {
    let n = nodes.len();
    if n == 0 {
        return Err(invalid("constrained interpolation needs at least one node"));
    }
    if values.len() != n {
        return Err(invalid(format!("{n} nodes but {} values", values.len())));
    }
    if let Some(bad) = nodes.iter().find(|p| p.space.len() != nodes[0].space.len()) {
        return Err(invalid(format!(
            "node dimensions differ: {} vs {}",
            bad.space.len(),
            nodes[0].space.len()
        )));
    }
    let psi_at: Vec<f64> = nodes.iter().map(|p| psi(p)).collect();
    let matrix = DenseMatrix::from_fn(n + 1, n + 1, |i, k| match (i < n, k < n) {
        (true, true) => kernel.evaluate(&nodes[i], &nodes[k]),
        (true, false) => psi_at[i],
        (false, true) => psi_at[k],
        (false, false) => 0.0,
    });
    let mut rhs = values.to_vec();
    rhs.push(0.0);
    let lu = Lu::factor_checked(&matrix, "bordered interpolation")?;
    let beta = lu.solve(&rhs);
    Ok(ConstrainedFit {
        beta,
        nodes: nodes.to_vec(),
        psi,
        kernel: kernel.clone(),
        condition: lu.condition_estimate(),
    })
}

impl ConstrainedFit {
    /// `N + 1` coefficients; the last multiplies `psi`.
    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    pub fn condition(&self) -> f64 {
        self.condition
    }

    /// `sum_k beta_k psi(x_k)`.
    pub fn side_condition(&self) -> f64 {
        self.nodes
            .iter()
            .zip(&self.beta)
            .map(|(p, b)| b * (self.psi)(p))
            .sum()
    }

    pub fn evaluate(&self, x: &Node) -> f64 {
        let n = self.nodes.len();
        let sum: f64 = self
            .nodes
            .iter()
            .zip(&self.beta)
            .map(|(p, b)| b * self.kernel.evaluate(x, p))
            .sum();
        sum + self.beta[n] * (self.psi)(x)
    }
}
