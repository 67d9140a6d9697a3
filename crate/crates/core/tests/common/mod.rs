//! Dense transcriptions of the stepping formulas, used as oracles.
#![allow(dead_code)]

use std::sync::Arc;

use adi_core::dense::{materialize_dense, DenseMatrix};
use adi_core::{DirectionalOperator, Problem, SplitProblem, State};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_vec(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| 2.0 * rng.random::<f64>() - 1.0).collect()
}

pub fn norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |a, x| a.max(x.abs()))
}

pub fn rel_diff(a: &[f64], b: &[f64]) -> f64 {
    let d = a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    d / norm_inf(b).max(1e-300)
}

fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn axpy(alpha: f64, x: &[f64], y: &[f64]) -> Vec<f64> {
    x.iter().zip(y).map(|(a, b)| alpha * a + b).collect()
}

/// `I − σ A`, dense.
pub fn shifted(a: &DenseMatrix<f64>, sigma: f64) -> DenseMatrix<f64> {
    DenseMatrix::identity(a.rows()).sub(&a.scale(sigma))
}

fn sum(parts: &[Vec<f64>]) -> Vec<f64> {
    parts[1..].iter().fold(parts[0].clone(), |acc, p| add(&acc, p))
}

/// AMF-W step with `ġ_j` evaluated at `t_dot`, by dense LU solves.
pub fn dense_amfw(problem: &Problem, state: &State, theta: f64, tau: f64, t_dot: f64) -> Vec<f64> {
    let d = materialize_dense(problem.operators()).unwrap();
    let g = sum(&problem.assemble_forcing(state.time));
    let gd = problem.forcing_derivative(t_dot).unwrap();
    let du = d.total.matvec(&state.values);
    let mut k: Vec<f64> = add(&du, &g).iter().map(|v| tau * v).collect();
    for (dj, gdj) in d.directional.iter().zip(&gd) {
        let rhs = axpy(theta * tau * tau, gdj, &k);
        k = shifted(dj, theta * tau).lu().unwrap().solve(&rhs);
    }
    add(&state.values, &k)
}

/// Douglas step by dense LU solves.
pub fn dense_douglas(problem: &Problem, state: &State, theta: f64, tau: f64) -> Vec<f64> {
    let d = materialize_dense(problem.operators()).unwrap();
    let g_now = problem.assemble_forcing(state.time);
    let g_next = problem.assemble_forcing(state.time + tau);
    let u = &state.values;
    let mut v = axpy(tau, &add(&d.total.matvec(u), &sum(&g_now)), u);
    for ((dj, gn), gp) in d.directional.iter().zip(&g_now).zip(&g_next) {
        let phi = add(&dj.matvec(u), gn);
        let mut rhs = axpy(-theta * tau, &phi, &v);
        rhs = axpy(theta * tau, gp, &rhs);
        v = shifted(dj, theta * tau).lu().unwrap().solve(&rhs);
    }
    v
}

/// Zero source and zero boundary data, with zero time derivatives.
pub fn homogeneous(ops: Vec<DirectionalOperator<f64>>) -> Problem {
    let zero: adi_core::problem::SpaceTimeFn<f64> = Arc::new(|_, _| 0.0);
    SplitProblem::new(ops, zero.clone(), zero.clone()).unwrap().with_time_derivatives(zero.clone(), zero)
}

/// Time-independent, nonzero source and boundary data; `ġ ≡ 0`.
pub fn steady_forcing(ops: Vec<DirectionalOperator<f64>>) -> Problem {
    let zero: adi_core::problem::SpaceTimeFn<f64> = Arc::new(|_, _| 0.0);
    SplitProblem::new(
        ops,
        Arc::new(|_, x: &[f64]| x.iter().map(|v| (3.0 * v).sin()).sum::<f64>()),
        Arc::new(|_, x: &[f64]| 1.0 + x.iter().sum::<f64>()),
    )
    .unwrap()
    .with_time_derivatives(zero.clone(), zero)
}
