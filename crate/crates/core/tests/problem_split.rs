mod common;

use adi_core::dense::materialize_dense;
use adi_core::{manufactured_problem, CoefficientModel, ManufacturedSolution, Problem};
use common::{rel_diff, rng};
use proptest::prelude::*;
use rand::Rng;

fn unit(m: usize) -> CoefficientModel<f64> {
    CoefficientModel::Constant(vec![1.0; m])
}

/// Independent transcription of the manufactured solution.
fn u_ref(m: usize, kappa: u8, t: f64, x: &[f64]) -> f64 {
    let bubble: f64 = 4f64.powi(m as i32) * x.iter().map(|v| v * (1.0 - v)).product::<f64>();
    let shift: f64 = x.iter().enumerate().map(|(j, v)| (v + 1.0 / (j as f64 + 3.0)).powi(2)).sum();
    t.exp() * (bubble + kappa as f64 * shift)
}

fn sum(parts: &[Vec<f64>]) -> Vec<f64> {
    let mut out = vec![0.0; parts[0].len()];
    for p in parts {
        for (o, v) in out.iter_mut().zip(p) {
            *o += v;
        }
    }
    out
}

/// `‖DU(t) + g(t) − U̇(t)‖∞` relative to `‖U̇(t)‖∞`.
fn mol_defect(p: &Problem, t: f64) -> f64 {
    let d = materialize_dense(p.operators()).unwrap();
    let u = p.sample_exact(t).unwrap();
    let mut lhs = d.total.matvec(&u.values);
    for (l, g) in lhs.iter_mut().zip(sum(&p.assemble_forcing(t))) {
        *l += g;
    }
    // u_t = u for this family
    rel_diff(&lhs, &u.values)
}

#[test]
fn semidiscrete_consistency_constant_coefficients() {
    for (m, sizes) in [(2, vec![5, 7]), (3, vec![3, 4, 5]), (4, vec![3, 2, 3, 2])] {
        for kappa in [0, 1] {
            let p = manufactured_problem(m, &sizes, kappa, unit(m)).unwrap();
            for t in [0.0, 0.3, 1.0] {
                assert!(mol_defect(&p, t) <= 1e-10, "m={m} kappa={kappa} t={t}");
            }
        }
    }
}

#[test]
fn semidiscrete_consistency_variable_coefficients() {
    for kappa in [0, 1] {
        let p = manufactured_problem(3, &[4, 5, 3], kappa, CoefficientModel::Variable3d).unwrap();
        for t in [0.0, 0.7] {
            assert!(mol_defect(&p, t) <= 1e-10, "kappa={kappa} t={t}");
        }
    }
}

#[test]
fn exact_solution_matches_reference_formula() {
    let mut r = rng(1);
    for m in 2..=4 {
        for kappa in [0, 1] {
            let s = ManufacturedSolution::new(m, kappa, unit(m)).unwrap();
            for _ in 0..50 {
                let x: Vec<f64> = (0..m).map(|_| r.random::<f64>()).collect();
                let t = r.random::<f64>();
                let (a, b) = (s.exact(t, &x), u_ref(m, kappa, t, &x));
                assert!((a - b).abs() <= 1e-13 * b.abs().max(1.0));
            }
        }
    }
}

#[test]
fn source_satisfies_pde_at_random_points() {
    // c = u_t − Σ β_j ∂_jj u, with ∂_jj by central differences (exact for
    // quadratics up to rounding)
    let mut r = rng(2);
    let delta = 1e-2;
    for (m, coeffs) in [(2, unit(2)), (3, unit(3)), (4, unit(4)), (3, CoefficientModel::Variable3d)] {
        for kappa in [0, 1] {
            let s = ManufacturedSolution::new(m, kappa, coeffs.clone()).unwrap();
            for _ in 0..100 {
                let x: Vec<f64> = (0..m).map(|_| r.random::<f64>()).collect();
                let t = 2.0 * r.random::<f64>();
                let mut lap = 0.0;
                for j in 0..m {
                    let (mut xp, mut xm) = (x.clone(), x.clone());
                    xp[j] += delta;
                    xm[j] -= delta;
                    let uxx = (u_ref(m, kappa, t, &xp) - 2.0 * u_ref(m, kappa, t, &x) + u_ref(m, kappa, t, &xm))
                        / (delta * delta);
                    lap += s.beta(j, &x) * uxx;
                }
                let expect = u_ref(m, kappa, t, &x) - lap;
                let got = s.source(t, &x);
                assert!((got - expect).abs() <= 1e-7 * expect.abs().max(1.0), "m={m} got={got} expect={expect}");
            }
        }
    }
}

#[test]
fn variable_coefficients_match_closed_forms() {
    let s = ManufacturedSolution::new(3, 0, CoefficientModel::Variable3d).unwrap();
    let mut r = rng(3);
    for _ in 0..50 {
        let x: Vec<f64> = (0..3).map(|_| r.random::<f64>()).collect();
        let (a, b, c) = (x[0], x[1], x[2]);
        assert!((s.beta(0, &x) - (1.0 + a * b * c).powi(2)).abs() < 1e-14);
        assert!((s.beta(1, &x) - (a - 2.0 * b + 3.0 * c).exp()).abs() < 1e-13);
        assert!((s.beta(2, &x) - (1.0 + a * a) * (-b * b * c).exp()).abs() < 1e-14);
    }
}

#[test]
fn forcing_derivative_matches_finite_differences() {
    for (m, coeffs) in [(3, unit(3)), (3, CoefficientModel::Variable3d), (2, unit(2))] {
        let sizes = vec![4; m];
        let p = manufactured_problem(m, &sizes, 1, coeffs).unwrap();
        let t = 0.4;
        let exact = p.forcing_derivative(t).unwrap();
        let mut prev = f64::INFINITY;
        for delta in [1e-3, 1e-4] {
            let gp = p.assemble_forcing(t + delta);
            let gm = p.assemble_forcing(t - delta);
            let mut err = 0.0f64;
            for ((e, a), b) in exact.iter().zip(&gp).zip(&gm) {
                let fd: Vec<f64> = a.iter().zip(b).map(|(x, y)| (x - y) / (2.0 * delta)).collect();
                err = err.max(rel_diff(&fd, e));
            }
            assert!(err <= 1e-5, "delta={delta} err={err}");
            assert!(err <= prev);
            prev = err;
        }
    }
}

#[test]
fn homogeneous_case_has_no_boundary_folds() {
    let p = manufactured_problem(3, &[3, 3, 3], 0, unit(3)).unwrap();
    let g = p.assemble_forcing(0.5);
    for part in &g[1..] {
        assert!(part.iter().all(|v| *v == 0.0));
    }
}

#[test]
fn split_parts_are_supported_on_their_faces() {
    let p = manufactured_problem(3, &[5, 4, 6], 1, unit(3)).unwrap();
    let grid = p.grid().clone();
    let g = p.assemble_forcing(0.2);
    for (axis, part) in g.iter().enumerate().skip(1) {
        let n = grid.sizes()[axis];
        for (lin, v) in part.iter().enumerate() {
            let i = grid.axis_index(lin, axis);
            if i != 0 && i + 1 != n {
                assert_eq!(*v, 0.0);
            } else {
                assert!(*v > 0.0);
            }
        }
    }
}

#[test]
fn boundary_data_agrees_with_exact_solution_on_faces() {
    let p = manufactured_problem(2, &[3, 3], 1, unit(2)).unwrap();
    let mut r = rng(4);
    for _ in 0..20 {
        let t = r.random::<f64>();
        let s = r.random::<f64>();
        for face in [[0.0, s], [1.0, s], [s, 0.0], [s, 1.0]] {
            let h = p.boundary_at(t, &face);
            assert!((h - u_ref(2, 1, t, &face)).abs() <= 1e-13 * h.abs().max(1.0));
        }
    }
}

#[test]
fn forcing_is_linear_in_data_scaling() {
    // folds scale with β_j
    let a = manufactured_problem(2, &[6, 6], 1, CoefficientModel::Constant(vec![1.0, 1.0])).unwrap();
    let b = manufactured_problem(2, &[6, 6], 1, CoefficientModel::Constant(vec![2.0, 2.0])).unwrap();
    let (ga, gb) = (a.assemble_forcing(0.1), b.assemble_forcing(0.1));
    for (pa, pb) in ga[1..].iter().zip(&gb[1..]) {
        let doubled: Vec<f64> = pa.iter().map(|v| 2.0 * v).collect();
        assert!(rel_diff(pb, &doubled) <= 1e-14);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn stiffness_cancels_on_exact_state(n0 in 1usize..6, n1 in 1usize..6, n2 in 1usize..6, t in 0.0f64..1.5) {
        let p = manufactured_problem(3, &[n0, n1, n2], 1, unit(3)).unwrap();
        prop_assert!(mol_defect(&p, t) <= 1e-10);
    }
}
