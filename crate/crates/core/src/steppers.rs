//! One-stage AMF-W, modified AMF-W and Douglas time steppers, and the
//! fixed-step integration loop.
//!
//! All three share the stability matrix `R = I + Π(θ)⁻¹ τD`,
//! `Π(θ) = (I − θτD_1)⋯(I − θτD_m)`, and sweep the axes in order `1, …, m`.

use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Result};
use crate::grid::{apply_full, StateVector};
use crate::problem::SplitProblem;
use crate::scalar::max_abs_diff;
use crate::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    /// One-stage AMF-W method, `ġ_j` at `t_n`.
    AmfW1,
    /// One-stage AMF-W method with `ġ_j` at `t_n + τ/2`.
    AmfW1Modified,
    Douglas,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::AmfW1, Method::AmfW1Modified, Method::Douglas];

    pub fn name(self) -> &'static str {
        match self {
            Method::AmfW1 => "amfw1",
            Method::AmfW1Modified => "amfw1-mod",
            Method::Douglas => "douglas",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "amfw1" | "amf-w1" => Ok(Method::AmfW1),
            "amfw1-mod" | "amfw1-modified" | "amf-w1-mod" | "modified" => Ok(Method::AmfW1Modified),
            "douglas" | "dou" => Ok(Method::Douglas),
            other => Err(invalid(format!("unknown method `{other}`"))),
        }
    }
}

/// Method, implicitness `θ`, step size `τ` and final time `t*`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeConfig<T> {
    pub method: Method,
    pub theta: T,
    pub tau: T,
    pub t_final: T,
}

impl<T: Scalar> SchemeConfig<T> {
    /// Configuration with the default `θ = 1/2`.
    pub fn new(method: Method, tau: T, t_final: T) -> Self {
        Self {
            method,
            theta: T::lit(0.5),
            tau,
            t_final,
        }
    }

    pub fn with_theta(mut self, theta: T) -> Self {
        self.theta = theta;
        self
    }

    pub fn with_method(mut self, method: Method) -> Self {
        self.method = method;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.theta > T::zero() && self.theta <= T::one()) {
            return Err(invalid(format!("theta must lie in (0, 1], got {}", self.theta)));
        }
        if !(self.tau > T::zero() && self.tau.is_finite()) {
            return Err(invalid(format!("step size must be positive, got {}", self.tau)));
        }
        if !(self.t_final >= T::zero() && self.t_final.is_finite()) {
            return Err(invalid(format!("final time must be non-negative, got {}", self.t_final)));
        }
        Ok(())
    }

    /// `n* = t*/τ`, rejected unless it is an integer up to rounding.
    pub fn step_count(&self) -> Result<usize> {
        self.validate()?;
        let ratio = self.t_final / self.tau;
        let n = ratio.round();
        let tol = T::lit(1e-9) * n.max(T::one());
        if (ratio - n).abs() > tol {
            return Err(invalid(format!(
                "t_final / tau = {ratio} is not an integer step count"
            )));
        }
        n.to_usize()
            .ok_or_else(|| invalid(format!("step count {n} out of range")))
    }
}

/// Final state plus, optionally, `E_n = ‖U_n − U(t_n)‖∞` for `n = 0..=n*`.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegrationResult<T> {
    pub final_state: StateVector<T>,
    pub per_step_errors: Option<Vec<T>>,
}

impl<T: Scalar> IntegrationResult<T> {
    pub fn final_error(&self) -> Option<T> {
        self.per_step_errors.as_ref().and_then(|e| e.last().copied())
    }
}

fn check_state<T: Scalar>(problem: &SplitProblem<T>, state: &StateVector<T>) -> Result<()> {
    if state.len() != problem.grid().len() {
        return Err(invalid(format!(
            "state has {} entries, grid has {}",
            state.len(),
            problem.grid().len()
        )));
    }
    Ok(())
}

fn sum_parts<T: Scalar>(parts: &[Vec<T>]) -> Vec<T> {
    let mut out = parts[0].clone();
    for p in &parts[1..] {
        for (o, v) in out.iter_mut().zip(p) {
            *o += *v;
        }
    }
    out
}

/// AMF-W stage: `K⁰ = τ(DU_n + g(t_n))`,
/// `(I − θτD_j)Kʲ = Kʲ⁻¹ + θτ²ġ_j(t_dot)`, `U_{n+1} = U_n + Kᵐ`.
fn amfw_step<T: Scalar>(state: &StateVector<T>, problem: &SplitProblem<T>, cfg: &SchemeConfig<T>, t_dot: T) -> Result<StateVector<T>> {
    check_state(problem, state)?;
    let (tau, theta) = (cfg.tau, cfg.theta);
    let ops = problem.operators();
    let u = &state.values;

    let g = sum_parts(&problem.assemble_forcing(state.time));
    let g_dot = problem.forcing_derivative(t_dot)?;

    let mut k = apply_full(ops, u)?;
    for (ki, gi) in k.iter_mut().zip(&g) {
        *ki = tau * (*ki + *gi);
    }
    let shift = theta * tau;
    let w = theta * tau * tau;
    for (op, gd) in ops.iter().zip(&g_dot) {
        for (ki, gi) in k.iter_mut().zip(gd) {
            *ki += w * *gi;
        }
        op.solve_shifted_in_place(shift, &mut k);
    }
    let values = u.iter().zip(&k).map(|(a, b)| *a + *b).collect();
    Ok(StateVector::new(values, state.time + tau))
}

/// One step of the one-stage AMF-W method.
pub fn step_amfw1<T: Scalar>(state: &StateVector<T>, problem: &SplitProblem<T>, cfg: &SchemeConfig<T>) -> Result<StateVector<T>> {
    amfw_step(state, problem, cfg, state.time)
}

/// One step of the modified AMF-W method (`ġ_j` at the midpoint).
pub fn step_amfw1_modified<T: Scalar>(state: &StateVector<T>, problem: &SplitProblem<T>, cfg: &SchemeConfig<T>) -> Result<StateVector<T>> {
    amfw_step(state, problem, cfg, state.time + cfg.tau * T::lit(0.5))
}

/// One Douglas step:
/// `v_0 = U_n + τ(DU_n + g(t_n))`,
/// `(I − θτD_i)v_i = v_{i−1} − θτ(D_iU_n + g_i(t_n)) + θτ g_i(t_{n+1})`.
pub fn step_douglas<T: Scalar>(state: &StateVector<T>, problem: &SplitProblem<T>, cfg: &SchemeConfig<T>) -> Result<StateVector<T>> {
    check_state(problem, state)?;
    let (tau, theta) = (cfg.tau, cfg.theta);
    let ops = problem.operators();
    let u = &state.values;

    let g_now = problem.assemble_forcing(state.time);
    let g_next = problem.assemble_forcing(state.time + tau);

    // φ_i = D_i U_n + g_i(t_n)
    let phi: Vec<Vec<T>> = ops
        .iter()
        .zip(&g_now)
        .map(|(op, g)| {
            let mut p = g.clone();
            op.apply_add(u, T::one(), &mut p);
            p
        })
        .collect();

    let mut v = u.clone();
    for p in &phi {
        for (vi, pi) in v.iter_mut().zip(p) {
            *vi += tau * *pi;
        }
    }
    let shift = theta * tau;
    for ((op, p), gn) in ops.iter().zip(&phi).zip(&g_next) {
        for ((vi, pi), gi) in v.iter_mut().zip(p).zip(gn) {
            *vi += shift * (*gi - *pi);
        }
        op.solve_shifted_in_place(shift, &mut v);
    }
    Ok(StateVector::new(v, state.time + tau))
}

/// Dispatches one step of the configured method.
pub fn step<T: Scalar>(state: &StateVector<T>, problem: &SplitProblem<T>, cfg: &SchemeConfig<T>) -> Result<StateVector<T>> {
    match cfg.method {
        Method::AmfW1 => step_amfw1(state, problem, cfg),
        Method::AmfW1Modified => step_amfw1_modified(state, problem, cfg),
        Method::Douglas => step_douglas(state, problem, cfg),
    }
}

/// Advances `u0` by `n* = t*/τ` steps.
///
/// With `record_errors` set and an exact solution available, the result
/// carries `E_n` for every `n` including `E_0`. Step times are `t_0 + nτ`,
/// not accumulated sums.
pub fn integrate<T: Scalar>(problem: &SplitProblem<T>, cfg: &SchemeConfig<T>, u0: StateVector<T>, record_errors: bool) -> Result<IntegrationResult<T>> {
    check_state(problem, &u0)?;
    let steps = cfg.step_count()?;
    let t0 = u0.time;
    let record = record_errors && problem.has_exact();

    let error_at = |state: &StateVector<T>| -> Result<T> {
        let exact = problem.sample_exact(state.time)?;
        Ok(max_abs_diff(&state.values, &exact.values))
    };

    let mut errors = if record { Some(vec![error_at(&u0)?]) } else { None };
    let mut state = u0;
    for n in 1..=steps {
        let mut next = step(&state, problem, cfg)?;
        next.time = t0 + T::from_usize_lossy(n) * cfg.tau;
        state = next;
        if let Some(errs) = errors.as_mut() {
            errs.push(error_at(&state)?);
        }
    }
    Ok(IntegrationResult {
        final_state: state,
        per_step_errors: errors,
    })
}
