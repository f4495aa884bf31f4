//! Boundary knot method (BKM) for Helmholtz-type problems.
//!
//! The solver splits `u = v + u_p`: a dual-reciprocity fit with the
//! multiquadric pair gives the particular part, and the homogeneous part is
//! collocated at boundary knots using the non-singular general solution
//! `J0(r)` (`sin(r)/r` in 3D). No mesh, no integration and no fictitious
//! boundary are involved.
//!
//! Alongside the solver the crate provides:
//!
//! - [`gsr`]: general-solution RBF constructors, time-space distances and
//!   interpolation with an orthogonality side condition;
//! - [`frm`]: finite-support truncation of RBF systems to k nearest
//!   neighbours with a sparse solver;
//! - [`bench`]: the two reference problems, error reports and CSV output;
//! - [`problem_file`]: the key-value problem format read by the CLI.
//!
//! ```
//! use bkm_core::{bench, geometry::Point};
//!
//! let case = bench::table1_case();
//! let report = bench::run_case(&case, 7, 3.0, None).unwrap();
//! assert!(report.max_abs_error() < 0.1);
//! # let _ = Point::new2(0.0, 0.0);
//! ```

pub mod bench;
pub mod bkm;
pub mod drm;
pub mod error;
pub mod frm;
pub mod geometry;
pub mod gsr;
pub mod kernels;
pub mod linalg;
pub mod problem;
pub mod problem_file;

pub use bkm::{
    assemble_homogeneous_rows, solve, solve_linear, solve_nonlinear_boundary_only, BkmSolution,
    Diagnostics, SolveOptions,
};
pub use error::{BkmError, Result};
pub use geometry::{ellipse_knots, BoundaryKind, BoundaryKnot, Ellipse, KnotSet, Point};
pub use kernels::{helmholtz_general_solution, mq_pair, GeneralSolution, KernelPair};
pub use problem::{field, ProblemSpec, Remainder};
