//! Tensor-product grids on the unit cube and the matrix-free directional
//! second-difference operators living on them.
//!
//! Unknowns are stored lexicographically with axis 0 varying fastest, so the
//! operator along axis `j` is `β_j (I ⊗ … ⊗ L_j ⊗ … ⊗ I)` with the factor for
//! axis 0 rightmost. Dirichlet data never enters the operators; it is folded
//! into the forcing vectors by [`crate::problem`].

use std::sync::Arc;

use crate::error::{invalid, Result};
use crate::tridiag::thomas_in_place;
use crate::Scalar;

/// Equidistant interior grid of `(0,1)^m` with `N_j` nodes per axis.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorGrid<T> {
    sizes: Vec<usize>,
    spacings: Vec<T>,
    strides: Vec<usize>,
    len: usize,
}

impl<T: Scalar> TensorGrid<T> {
    pub fn new(dim: usize, sizes: &[usize]) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("grid dimension must be at least 1"));
        }
        if sizes.len() != dim {
            return Err(invalid(format!("expected {dim} axis sizes, got {}", sizes.len())));
        }
        if let Some(axis) = sizes.iter().position(|&n| n == 0) {
            return Err(invalid(format!("axis {axis} has zero nodes")));
        }
        let mut strides = Vec::with_capacity(dim);
        let mut len = 1usize;
        for &n in sizes {
            strides.push(len);
            len = len
                .checked_mul(n)
                .ok_or_else(|| invalid("grid size overflows usize"))?;
        }
        let spacings = sizes
            .iter()
            .map(|&n| T::one() / T::from_usize_lossy(n + 1))
            .collect();
        Ok(Self {
            sizes: sizes.to_vec(),
            spacings,
            strides,
            len,
        })
    }

    /// Isotropic grid with `n` nodes along each of `dim` axes.
    pub fn uniform(dim: usize, n: usize) -> Result<Self> {
        Self::new(dim, &vec![n; dim])
    }

    pub fn dim(&self) -> usize {
        self.sizes.len()
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn spacings(&self) -> &[T] {
        &self.spacings
    }

    pub fn spacing(&self, axis: usize) -> T {
        self.spacings[axis]
    }

    pub fn stride(&self, axis: usize) -> usize {
        self.strides[axis]
    }

    /// Total number of unknowns `∏ N_j`.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Lexicographic position of a zero-based multi-index.
    pub fn linear_index(&self, multi: &[usize]) -> usize {
        debug_assert_eq!(multi.len(), self.dim());
        multi
            .iter()
            .zip(&self.strides)
            .map(|(i, s)| i * s)
            .sum()
    }

    /// Zero-based multi-index of a lexicographic position.
    pub fn multi_index(&self, mut lin: usize) -> Vec<usize> {
        self.sizes
            .iter()
            .map(|&n| {
                let i = lin % n;
                lin /= n;
                i
            })
            .collect()
    }

    /// Zero-based position along `axis` of the node at `lin`.
    #[inline]
    pub fn axis_index(&self, lin: usize, axis: usize) -> usize {
        (lin / self.strides[axis]) % self.sizes[axis]
    }

    /// Coordinate of the one-based node `i` along `axis`, `i·Δx`.
    pub fn coordinate(&self, axis: usize, i: usize) -> T {
        T::from_usize_lossy(i) * self.spacings[axis]
    }

    /// Physical coordinates of the node at `lin`, written into `out`.
    pub fn node_into(&self, lin: usize, out: &mut [T]) {
        for (axis, x) in out.iter_mut().enumerate().take(self.dim()) {
            *x = self.coordinate(axis, self.axis_index(lin, axis) + 1);
        }
    }

    pub fn node(&self, lin: usize) -> Vec<T> {
        let mut x = vec![T::zero(); self.dim()];
        self.node_into(lin, &mut x);
        x
    }

    /// Evaluates `f` at every node in lexicographic order.
    pub fn sample(&self, mut f: impl FnMut(&[T]) -> T) -> Vec<T> {
        let mut x = vec![T::zero(); self.dim()];
        (0..self.len)
            .map(|lin| {
                self.node_into(lin, &mut x);
                f(&x)
            })
            .collect()
    }

    fn check_len(&self, got: usize) -> Result<()> {
        if got != self.len {
            return Err(invalid(format!(
                "vector length {got} does not match grid with {} unknowns",
                self.len
            )));
        }
        Ok(())
    }
}

/// Diffusion coefficient of one directional operator.
#[derive(Debug, Clone, PartialEq)]
pub enum Coefficient<T> {
    Constant(T),
    /// `β_j(x_G)` sampled at every grid node, lexicographic order.
    Nodal(Arc<[T]>),
}

impl<T: Scalar> Coefficient<T> {
    #[inline]
    pub fn at(&self, lin: usize) -> T {
        match self {
            Coefficient::Constant(b) => *b,
            Coefficient::Nodal(values) => values[lin],
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, Coefficient::Constant(_))
    }
}

/// Matrix-free `D_j = diag(β_j) (I ⊗ … ⊗ L_j ⊗ … ⊗ I)`,
/// `L_j = tridiag(1, −2, 1)/Δx_j²`.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionalOperator<T> {
    axis: usize,
    coefficient: Coefficient<T>,
    grid: TensorGrid<T>,
}

impl<T: Scalar> DirectionalOperator<T> {
    pub fn constant(grid: &TensorGrid<T>, axis: usize, beta: T) -> Result<Self> {
        if axis >= grid.dim() {
            return Err(invalid(format!("axis {axis} out of range for a {}-d grid", grid.dim())));
        }
        if !(beta.is_finite() && beta > T::zero()) {
            return Err(invalid(format!("diffusion coefficient must be positive, got {beta}")));
        }
        Ok(Self {
            axis,
            coefficient: Coefficient::Constant(beta),
            grid: grid.clone(),
        })
    }

    /// Operator with a spatially varying coefficient sampled at the nodes.
    pub fn variable(grid: &TensorGrid<T>, axis: usize, beta: impl Fn(&[T]) -> T) -> Result<Self> {
        if axis >= grid.dim() {
            return Err(invalid(format!("axis {axis} out of range for a {}-d grid", grid.dim())));
        }
        let values = grid.sample(beta);
        if let Some(bad) = values.iter().find(|b| !(b.is_finite() && **b > T::zero())) {
            return Err(invalid(format!("diffusion coefficient must be positive, got {bad}")));
        }
        Ok(Self {
            axis,
            coefficient: Coefficient::Nodal(values.into()),
            grid: grid.clone(),
        })
    }

    /// One constant-coefficient operator per axis.
    pub fn constant_set(grid: &TensorGrid<T>, betas: &[T]) -> Result<Vec<Self>> {
        if betas.len() != grid.dim() {
            return Err(invalid(format!(
                "expected {} coefficients, got {}",
                grid.dim(),
                betas.len()
            )));
        }
        betas
            .iter()
            .enumerate()
            .map(|(axis, &b)| Self::constant(grid, axis, b))
            .collect()
    }

    pub fn axis(&self) -> usize {
        self.axis
    }

    pub fn coefficient(&self) -> &Coefficient<T> {
        &self.coefficient
    }

    pub fn grid(&self) -> &TensorGrid<T> {
        &self.grid
    }

    /// `1/Δx_j²` for this operator's axis.
    pub fn inv_spacing_sq(&self) -> T {
        let h = self.grid.spacing(self.axis);
        T::one() / (h * h)
    }

    /// `D_j v` by a stencil sweep along the operator's axis.
    pub fn apply(&self, v: &[T]) -> Result<Vec<T>> {
        self.grid.check_len(v.len())?;
        let mut out = vec![T::zero(); v.len()];
        self.apply_add(v, T::one(), &mut out);
        Ok(out)
    }

    /// `out += scale · D_j v` without length checks.
    pub(crate) fn apply_add(&self, v: &[T], scale: T, out: &mut [T]) {
        let s = self.grid.stride(self.axis);
        let n = self.grid.sizes()[self.axis];
        let w = scale * self.inv_spacing_sq();
        let two = T::lit(2.0);
        for (lin, o) in out.iter_mut().enumerate() {
            let i = (lin / s) % n;
            let mut acc = -two * v[lin];
            if i > 0 {
                acc += v[lin - s];
            }
            if i + 1 < n {
                acc += v[lin + s];
            }
            *o += w * self.coefficient.at(lin) * acc;
        }
    }

    /// Solves `(I − σ D_j) x = rhs` by independent Thomas sweeps along every
    /// grid line of the operator's axis.
    ///
    /// `σ ≥ 0` keeps each line system strictly diagonally dominant, so no
    /// pivoting is needed.
    pub fn solve_shifted(&self, sigma: T, rhs: &[T]) -> Result<Vec<T>> {
        self.grid.check_len(rhs.len())?;
        if !(sigma >= T::zero()) || !sigma.is_finite() {
            return Err(invalid(format!("shift must be finite and non-negative, got {sigma}")));
        }
        let mut x = rhs.to_vec();
        if sigma == T::zero() {
            return Ok(x);
        }
        self.solve_shifted_in_place(sigma, &mut x);
        Ok(x)
    }

    pub(crate) fn solve_shifted_in_place(&self, sigma: T, x: &mut [T]) {
        let s = self.grid.stride(self.axis);
        let n = self.grid.sizes()[self.axis];
        let block = s * n;
        let w = sigma * self.inv_spacing_sq();
        let two = T::lit(2.0);

        let mut sub = vec![T::zero(); n];
        let mut diag = vec![T::zero(); n];
        let mut sup = vec![T::zero(); n];
        let mut line = vec![T::zero(); n];
        let mut work = vec![T::zero(); n];

        if let Coefficient::Constant(beta) = self.coefficient {
            let off = -w * beta;
            sub.fill(off);
            sup.fill(off);
            diag.fill(T::one() + two * w * beta);
        }

        for outer in (0..x.len()).step_by(block) {
            for inner in 0..s {
                let base = outer + inner;
                if let Coefficient::Nodal(values) = &self.coefficient {
                    for k in 0..n {
                        let b = values[base + k * s];
                        sub[k] = -w * b;
                        sup[k] = -w * b;
                        diag[k] = T::one() + two * w * b;
                    }
                }
                for (k, l) in line.iter_mut().enumerate() {
                    *l = x[base + k * s];
                }
                thomas_in_place(&sub, &diag, &sup, &mut line, &mut work);
                for (k, l) in line.iter().enumerate() {
                    x[base + k * s] = *l;
                }
            }
        }
    }
}

/// `D v = Σ_j D_j v`.
pub fn apply_full<T: Scalar>(ops: &[DirectionalOperator<T>], v: &[T]) -> Result<Vec<T>> {
    let first = ops
        .first()
        .ok_or_else(|| invalid("at least one directional operator is required"))?;
    first.grid.check_len(v.len())?;
    check_operator_set(ops)?;
    let mut out = vec![T::zero(); v.len()];
    for op in ops {
        op.apply_add(v, T::one(), &mut out);
    }
    Ok(out)
}

/// Verifies that `ops` holds exactly one operator per axis, in axis order, on
/// a common grid.
pub fn check_operator_set<T: Scalar>(ops: &[DirectionalOperator<T>]) -> Result<()> {
    let Some(first) = ops.first() else {
        return Err(invalid("at least one directional operator is required"));
    };
    if ops.len() != first.grid.dim() {
        return Err(invalid(format!(
            "expected {} directional operators, got {}",
            first.grid.dim(),
            ops.len()
        )));
    }
    for (axis, op) in ops.iter().enumerate() {
        if op.axis != axis {
            return Err(invalid(format!("operator {axis} acts on axis {}", op.axis)));
        }
        if op.grid != first.grid {
            return Err(invalid("directional operators live on different grids"));
        }
    }
    Ok(())
}

/// Grid values at a given time.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector<T> {
    pub values: Vec<T>,
    pub time: T,
}

impl<T: Scalar> StateVector<T> {
    pub fn new(values: Vec<T>, time: T) -> Self {
        Self { values, time }
    }

    pub fn zeros(grid: &TensorGrid<T>, time: T) -> Self {
        Self::new(vec![T::zero(); grid.len()], time)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn max_norm(&self) -> T {
        crate::scalar::max_abs(&self.values)
    }
}
