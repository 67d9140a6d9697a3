//! Continuous diffusion problems `u_t = Σ β_j ∂_{x_j x_j} u + c` on `(0,1)^m`
//! with Dirichlet data `h`, their method-of-lines forcing, and the directional
//! split `g = g_1 + … + g_m`.
//!
//! The split places the whole discretized source in `g_1`; `g_j` carries only
//! the boundary values folded in along axis `j`. A node next to a face of
//! axis `j` receives `β_j(x_node)·h(t, x_face)/Δx_j²` in `g_j`, so corner
//! nodes get one term per incident face and nothing is counted twice.

use std::sync::Arc;

use crate::error::{invalid, Error, Result};
use crate::grid::{check_operator_set, DirectionalOperator, StateVector, TensorGrid};
use crate::Scalar;

/// Scalar field of time and position.
pub type SpaceTimeFn<T> = Arc<dyn Fn(T, &[T]) -> T + Send + Sync>;

/// Semidiscretized problem ready for the steppers.
#[derive(Clone)]
pub struct SplitProblem<T> {
    grid: TensorGrid<T>,
    operators: Vec<DirectionalOperator<T>>,
    source: SpaceTimeFn<T>,
    boundary: SpaceTimeFn<T>,
    source_dt: Option<SpaceTimeFn<T>>,
    boundary_dt: Option<SpaceTimeFn<T>>,
    exact: Option<SpaceTimeFn<T>>,
}

impl<T> std::fmt::Debug for SplitProblem<T>
where
    T: std::fmt::Debug,
{
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SplitProblem")
            .field("grid", &self.grid)
            .field("has_source_dt", &self.source_dt.is_some())
            .field("has_boundary_dt", &self.boundary_dt.is_some())
            .field("has_exact", &self.exact.is_some())
            .finish_non_exhaustive()
    }
}

impl<T: Scalar> SplitProblem<T> {
    pub fn new(operators: Vec<DirectionalOperator<T>>, source: SpaceTimeFn<T>, boundary: SpaceTimeFn<T>) -> Result<Self> {
        check_operator_set(&operators)?;
        Ok(Self {
            grid: operators[0].grid().clone(),
            operators,
            source,
            boundary,
            source_dt: None,
            boundary_dt: None,
            exact: None,
        })
    }

    /// Supplies analytic `∂_t c` and `∂_t h`, required by the AMF-W schemes.
    pub fn with_time_derivatives(mut self, source_dt: SpaceTimeFn<T>, boundary_dt: SpaceTimeFn<T>) -> Self {
        self.source_dt = Some(source_dt);
        self.boundary_dt = Some(boundary_dt);
        self
    }

    pub fn with_exact(mut self, exact: SpaceTimeFn<T>) -> Self {
        self.exact = Some(exact);
        self
    }

    pub fn grid(&self) -> &TensorGrid<T> {
        &self.grid
    }

    pub fn operators(&self) -> &[DirectionalOperator<T>] {
        &self.operators
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    pub fn has_exact(&self) -> bool {
        self.exact.is_some()
    }

    pub fn source_at(&self, t: T, x: &[T]) -> T {
        (self.source)(t, x)
    }

    pub fn boundary_at(&self, t: T, x: &[T]) -> T {
        (self.boundary)(t, x)
    }

    pub fn exact_at(&self, t: T, x: &[T]) -> Option<T> {
        self.exact.as_ref().map(|u| u(t, x))
    }

    /// `[g_1(t), …, g_m(t)]`.
    pub fn assemble_forcing(&self, t: T) -> Vec<Vec<T>> {
        self.split(t, &*self.source, &*self.boundary)
    }

    /// `[ġ_1(t), …, ġ_m(t)]` from the analytic time derivatives.
    pub fn forcing_derivative(&self, t: T) -> Result<Vec<Vec<T>>> {
        match (&self.source_dt, &self.boundary_dt) {
            (Some(c_t), Some(h_t)) => Ok(self.split(t, &**c_t, &**h_t)),
            _ => Err(Error::Unsupported(
                "problem has no analytic time derivative of its source and boundary data".into(),
            )),
        }
    }

    /// Grid restriction `u_e(t, x_G)` of the exact solution.
    pub fn sample_exact(&self, t: T) -> Result<StateVector<T>> {
        let u = self
            .exact
            .as_ref()
            .ok_or_else(|| Error::Unsupported("problem has no exact solution".into()))?;
        Ok(StateVector::new(self.grid.sample(|x| u(t, x)), t))
    }

    fn split(&self, t: T, volume: &(dyn Fn(T, &[T]) -> T + Send + Sync), face: &(dyn Fn(T, &[T]) -> T + Send + Sync)) -> Vec<Vec<T>> {
        let grid = &self.grid;
        let mut parts: Vec<Vec<T>> = Vec::with_capacity(grid.dim());
        parts.push(grid.sample(|x| volume(t, x)));
        for _ in 1..grid.dim() {
            parts.push(vec![T::zero(); grid.len()]);
        }

        let mut x = vec![T::zero(); grid.dim()];
        for (axis, op) in self.operators.iter().enumerate() {
            let n = grid.sizes()[axis];
            let w = op.inv_spacing_sq();
            let part = &mut parts[axis];
            for (lin, g) in part.iter_mut().enumerate() {
                let i = grid.axis_index(lin, axis);
                if i != 0 && i + 1 != n {
                    continue;
                }
                grid.node_into(lin, &mut x);
                let interior = x[axis];
                let beta = op.coefficient().at(lin);
                if i == 0 {
                    x[axis] = T::zero();
                    *g += beta * w * face(t, &x);
                }
                if i + 1 == n {
                    x[axis] = T::one();
                    *g += beta * w * face(t, &x);
                }
                x[axis] = interior;
            }
        }
        parts
    }
}

/// Diffusion coefficients of a manufactured problem.
#[derive(Debug, Clone, PartialEq)]
pub enum CoefficientModel<T> {
    /// One constant `β_j` per axis.
    Constant(Vec<T>),
    /// Three-dimensional variable coefficients
    /// `β_1 = (1+xyz)²`, `β_2 = e^{x−2y+3z}`, `β_3 = (1+x²)e^{−y²z}`.
    Variable3d,
}

/// Manufactured solution
/// `u(t,x) = e^t (4^m ∏ x_j(1−x_j) + κ Σ_j (x_j + 1/(j+2))²)`, `j` one-based.
///
/// The solution is quadratic in every coordinate, so second central
/// differences reproduce `∂_{x_j x_j} u` exactly and all error in a run comes
/// from the time integrator. With `u = e^t S(x)` and time-independent
/// coefficients, the source is
/// `c = u − Σ_j β_j(x) e^t (−2·4^m ∏_{k≠j} x_k(1−x_k) + 2κ)` and `∂_t c = c`;
/// likewise `h = u` on the boundary and `∂_t h = h`.
#[derive(Debug, Clone, PartialEq)]
pub struct ManufacturedSolution<T> {
    dim: usize,
    kappa: T,
    coefficients: CoefficientModel<T>,
}

impl<T: Scalar> ManufacturedSolution<T> {
    pub fn new(dim: usize, kappa: u8, coefficients: CoefficientModel<T>) -> Result<Self> {
        if !(2..=4).contains(&dim) {
            return Err(invalid(format!("manufactured problems exist for m in 2..=4, got {dim}")));
        }
        if kappa > 1 {
            return Err(invalid(format!("kappa must be 0 or 1, got {kappa}")));
        }
        match &coefficients {
            CoefficientModel::Constant(b) => {
                if b.len() != dim {
                    return Err(invalid(format!("expected {dim} coefficients, got {}", b.len())));
                }
                if b.iter().any(|v| !(v.is_finite() && *v > T::zero())) {
                    return Err(invalid("diffusion coefficients must be positive"));
                }
            }
            CoefficientModel::Variable3d => {
                if dim != 3 {
                    return Err(invalid("the variable coefficient set is three-dimensional"));
                }
            }
        }
        Ok(Self {
            dim,
            kappa: T::from_u8(kappa).expect("small integer"),
            coefficients,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coefficients(&self) -> &CoefficientModel<T> {
        &self.coefficients
    }

    fn bubble_scale(&self) -> T {
        T::lit(4.0).powi(self.dim as i32)
    }

    fn shift(j: usize) -> T {
        T::one() / T::from_usize_lossy(j + 3)
    }

    /// Spatial factor `S(x)` of `u = e^t S(x)`.
    pub fn spatial(&self, x: &[T]) -> T {
        let bubble = x.iter().fold(T::one(), |acc, &xj| acc * xj * (T::one() - xj));
        let shifted = x
            .iter()
            .enumerate()
            .fold(T::zero(), |acc, (j, &xj)| {
                let s = xj + Self::shift(j);
                acc + s * s
            });
        self.bubble_scale() * bubble + self.kappa * shifted
    }

    pub fn exact(&self, t: T, x: &[T]) -> T {
        t.exp() * self.spatial(x)
    }

    /// `∂_t u`, equal to `u`.
    pub fn exact_dt(&self, t: T, x: &[T]) -> T {
        self.exact(t, x)
    }

    /// `∂_{x_j x_j} u` for zero-based axis `j`.
    pub fn exact_dxx(&self, axis: usize, t: T, x: &[T]) -> T {
        let others = x
            .iter()
            .enumerate()
            .filter(|(k, _)| *k != axis)
            .fold(T::one(), |acc, (_, &xk)| acc * xk * (T::one() - xk));
        let two = T::lit(2.0);
        t.exp() * (-two * self.bubble_scale() * others + two * self.kappa)
    }

    /// `β_j(x)` for zero-based axis `j`.
    pub fn beta(&self, axis: usize, x: &[T]) -> T {
        match &self.coefficients {
            CoefficientModel::Constant(b) => b[axis],
            CoefficientModel::Variable3d => {
                let (px, py, pz) = (x[0], x[1], x[2]);
                match axis {
                    0 => {
                        let s = T::one() + px * py * pz;
                        s * s
                    }
                    1 => (px - T::lit(2.0) * py + T::lit(3.0) * pz).exp(),
                    2 => (T::one() + px * px) * (-(py * py) * pz).exp(),
                    _ => unreachable!("variable coefficients are three-dimensional"),
                }
            }
        }
    }

    /// Source `c = ∂_t u − Σ_j β_j ∂_{x_j x_j} u`.
    pub fn source(&self, t: T, x: &[T]) -> T {
        let diffusion = (0..self.dim).fold(T::zero(), |acc, j| acc + self.beta(j, x) * self.exact_dxx(j, t, x));
        self.exact_dt(t, x) - diffusion
    }

    /// `∂_t c`, equal to `c` because every term carries the factor `e^t`.
    pub fn source_dt(&self, t: T, x: &[T]) -> T {
        self.source(t, x)
    }

    pub fn directional_operators(&self, grid: &TensorGrid<T>) -> Result<Vec<DirectionalOperator<T>>> {
        if grid.dim() != self.dim {
            return Err(invalid(format!("grid is {}-d, problem is {}-d", grid.dim(), self.dim)));
        }
        match &self.coefficients {
            CoefficientModel::Constant(b) => DirectionalOperator::constant_set(grid, b),
            CoefficientModel::Variable3d => (0..self.dim)
                .map(|axis| DirectionalOperator::variable(grid, axis, |x| self.beta(axis, x)))
                .collect(),
        }
    }

    /// Builds the semidiscrete problem on a grid with the given axis sizes.
    pub fn into_problem(self, sizes: &[usize]) -> Result<SplitProblem<T>> {
        let grid = TensorGrid::new(self.dim, sizes)?;
        let operators = self.directional_operators(&grid)?;
        let me = Arc::new(self);
        let (a, b, c, d, e) = (me.clone(), me.clone(), me.clone(), me.clone(), me);
        Ok(SplitProblem::new(
            operators,
            Arc::new(move |t, x| a.source(t, x)),
            Arc::new(move |t, x| b.exact(t, x)),
        )?
        .with_time_derivatives(
            Arc::new(move |t, x| c.source_dt(t, x)),
            Arc::new(move |t, x| d.exact_dt(t, x)),
        )
        .with_exact(Arc::new(move |t, x| e.exact(t, x))))
    }
}

/// Manufactured problem with `u = e^t(4^m ∏ x_j(1−x_j) + κ Σ (x_j + 1/(j+2))²)`.
///
/// `kappa = 0` gives homogeneous Dirichlet data; `kappa = 1` gives
/// time-dependent data.
pub fn manufactured_problem<T: Scalar>(
    dim: usize,
    sizes: &[usize],
    kappa: u8,
    coefficients: CoefficientModel<T>,
) -> Result<SplitProblem<T>> {
    ManufacturedSolution::new(dim, kappa, coefficients)?.into_problem(sizes)
}
