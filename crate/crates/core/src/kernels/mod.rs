//! Radial kernels: the non-singular Helmholtz general solutions used as
//! boundary basis functions, and the multiquadric particular-solution pair
//! used for dual reciprocity.
//!
//! Throughout, the governing operator is `L = laplacian + 1`.

mod bessel;

pub use bessel::{bessel_j0, bessel_j1, SERIES_LIMIT};

pub(crate) use bessel::{j0, j1};

use crate::error::{invalid, Result};

/// Below this radius `sin(r)/r` and its derivative use Taylor polynomials.
const SINC_TAYLOR_RADIUS: f64 = 1e-4;

/// A radial solution of `laplacian v + v = 0` that stays finite at `r = 0`.
///
/// In 2D this is `J0(r)`; in 3D it is `sin(r)/r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GeneralSolution {
    dim: usize,
}

pub fn helmholtz_general_solution(dim: usize) -> Result<GeneralSolution> {
    match dim {
        2 | 3 => Ok(GeneralSolution { dim }),
        _ => Err(invalid(format!(
            "general solutions exist for dimension 2 or 3, got {dim}"
        ))),
    }
}

impl GeneralSolution {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn value(&self, r: f64) -> f64 {
        match self.dim {
            2 => j0(r),
            _ => sinc(r),
        }
    }

    /// `dv/dr`.
    pub fn radial_derivative(&self, r: f64) -> f64 {
        match self.dim {
            2 => -j1(r),
            _ => sinc_derivative(r),
        }
    }

    /// `dv/dn = dv/dr * dr/dn`, with `projection = dr/dn`.
    pub fn normal_derivative(&self, r: f64, projection: f64) -> f64 {
        self.radial_derivative(r) * projection
    }
}

fn sinc(r: f64) -> f64 {
    if r.abs() < SINC_TAYLOR_RADIUS {
        let r2 = r * r;
        1.0 - r2 / 6.0 + r2 * r2 / 120.0
    } else {
        r.sin() / r
    }
}

fn sinc_derivative(r: f64) -> f64 {
    if r.abs() < SINC_TAYLOR_RADIUS {
        -r / 3.0 + r * r * r / 30.0
    } else {
        (r * r.cos() - r.sin()) / (r * r)
    }
}

/// Multiquadric particular-solution pair.
///
/// `phi_hat(r) = (r^2 + c^2)^(3/2)` is the approximate particular solution and
/// `phi = (laplacian + 1) phi_hat` the basis that interpolates the forcing.
/// In `d` dimensions, with `s = sqrt(r^2 + c^2)`:
///
/// ```text
/// phi(r) = 3 d s + 3 r^2 / s + s^3
/// ```
///
/// which in 2D is `6 s + 3 r^2 / s + s^3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelPair {
    shape: f64,
    dim: usize,
}

/// Two-dimensional multiquadric pair with shape parameter `c`.
pub fn mq_pair(c: f64) -> Result<KernelPair> {
    mq_pair_in(c, 2)
}

pub fn mq_pair_in(c: f64, dim: usize) -> Result<KernelPair> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(invalid(format!(
            "shape parameter must be positive and finite, got {c}"
        )));
    }
    if !(dim == 2 || dim == 3) {
        return Err(invalid(format!("dimension must be 2 or 3, got {dim}")));
    }
    Ok(KernelPair { shape: c, dim })
}

impl KernelPair {
    pub fn shape(&self) -> f64 {
        self.shape
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    fn s(&self, r: f64) -> f64 {
        (r * r + self.shape * self.shape).sqrt()
    }

    pub fn phi_hat(&self, r: f64) -> f64 {
        let s = self.s(r);
        s * s * s
    }

    /// `d phi_hat / dr = 3 r s`.
    pub fn phi_hat_radial_derivative(&self, r: f64) -> f64 {
        3.0 * r * self.s(r)
    }

    pub fn phi_hat_normal(&self, r: f64, projection: f64) -> f64 {
        self.phi_hat_radial_derivative(r) * projection
    }

    pub fn phi(&self, r: f64) -> f64 {
        let s = self.s(r);
        3.0 * self.dim as f64 * s + 3.0 * r * r / s + s * s * s
    }

    /// `d phi / dr`.
    pub fn phi_radial_derivative(&self, r: f64) -> f64 {
        let s = self.s(r);
        let d = self.dim as f64;
        3.0 * d * r / s + 6.0 * r / s - 3.0 * r * r * r / (s * s * s) + 3.0 * r * s
    }
}
