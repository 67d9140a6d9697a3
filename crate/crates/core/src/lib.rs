//! Matrix-free ADI-type time integrators for semidiscretized diffusion
//! problems on `(0,1)^m` with Dirichlet boundary conditions.
//!
//! * [`grid`]: tensor grids and the directional operators `D_j`, with
//!   stencil application and batched tridiagonal line solves.
//! * [`problem`]: source and boundary data, the directional forcing split
//!   `g = g_1 + … + g_m`, and the manufactured test problems.
//! * [`steppers`]: one-stage AMF-W, modified AMF-W and Douglas schemes.
//! * [`stability`]: stability functions, sector sampling, resolvent and power
//!   bounds.
//! * [`harness`]: convergence studies, stability suites and CSV output.
//!
//! Every numeric routine is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix `f64`, which is what the harness uses.

pub mod dense;
pub mod error;
pub mod grid;
pub mod harness;
pub mod problem;
pub mod report;
pub mod scalar;
pub mod stability;
pub mod steppers;
pub mod tridiag;

pub use error::{Error, Result};
pub use grid::{apply_full, Coefficient, DirectionalOperator, StateVector, TensorGrid};
pub use problem::{manufactured_problem, CoefficientModel, ManufacturedSolution, SplitProblem};
pub use scalar::Scalar;
pub use steppers::{integrate, step, step_amfw1, step_amfw1_modified, step_douglas, IntegrationResult, Method, SchemeConfig};

pub type Grid = TensorGrid<f64>;
pub type Operator = DirectionalOperator<f64>;
pub type State = StateVector<f64>;
pub type Problem = SplitProblem<f64>;
pub type Scheme = SchemeConfig<f64>;

pub type Grid32 = TensorGrid<f32>;
pub type Operator32 = DirectionalOperator<f32>;
pub type State32 = StateVector<f32>;
pub type Problem32 = SplitProblem<f32>;
pub type Scheme32 = SchemeConfig<f32>;
