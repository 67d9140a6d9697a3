use adi_core::harness::*;
use adi_core::report::sci;
use adi_core::Method;
use proptest::prelude::*;

fn small(kappa: u8) -> ExperimentConfig {
    ExperimentConfig {
        dim: 2,
        kappa,
        j_min: 2,
        j_max: Some(5),
        ..Default::default()
    }
}

#[test]
fn report_has_one_row_per_level_and_method() {
    let rep = run_convergence(&small(0)).unwrap();
    assert_eq!(rep.rows.len(), 12);
    for m in Method::ALL {
        let rows: Vec<_> = rep.rows.iter().filter(|r| r.method == m).collect();
        assert_eq!(rows.len(), 4);
        assert!(rows[0].order.is_none());
        assert!(rows[1..].iter().all(|r| r.order.is_some()));
        for (r, j) in rows.iter().zip(2..) {
            assert_eq!(r.j, j);
            assert_eq!(r.n, (1 << j) - 1);
            assert_eq!(r.tau, 0.5f64.powi(j as i32));
        }
    }
    assert_eq!(rep.methods(), Method::ALL.to_vec());
}

#[test]
fn errors_decrease_under_refinement() {
    for kappa in [0, 1] {
        let rep = run_convergence(&small(kappa)).unwrap();
        for m in Method::ALL {
            let e = rep.errors(m);
            assert!(e.windows(2).all(|w| w[1] < w[0]), "{m} kappa={kappa}: {e:?}");
        }
    }
}

#[test]
fn orders_follow_from_errors() {
    let rep = run_convergence(&small(0)).unwrap();
    for m in Method::ALL {
        let e = rep.errors(m);
        let p = (e[2] / e[3]).log2();
        assert!((rep.final_order(m).unwrap() - p).abs() < 1e-14);
    }
}

#[test]
fn csv_layout_and_determinism() {
    let cfg = small(1);
    let a = run_convergence(&cfg).unwrap().to_table().to_csv_string();
    let b = run_convergence(&cfg).unwrap().to_table().to_csv_string();
    assert_eq!(a, b);
    let mut lines = a.lines();
    assert_eq!(lines.next().unwrap(), "method,m,kappa,j,tau,N,error_linf,order");
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(first[..6], ["amfw1", "2", "1", "2", "2.5e-1", "3"]);
    assert_eq!(first[7], "");
    // full precision: the error field parses back to the stored value
    let rep = run_convergence(&cfg).unwrap();
    let v: f64 = first[6].parse().unwrap();
    assert_eq!(v, rep.rows[0].error_linf);
}

#[test]
fn emitted_file_matches_in_memory_table() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("orders.csv");
    let rep = run_convergence(&small(0)).unwrap();
    emit_csv(&rep, &path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text, rep.to_table().to_csv_string());
    let again = dir.path().join("again.csv");
    emit_csv(&run_convergence(&small(0)).unwrap(), &again).unwrap();
    assert_eq!(std::fs::read(&path).unwrap(), std::fs::read(&again).unwrap());
}

#[test]
fn empty_report_is_header_only() {
    let rep = ConvergenceReport::default();
    assert_eq!(rep.to_table().to_csv_string(), "method,m,kappa,j,tau,N,error_linf,order\n");
}

#[test]
fn unwritable_path_is_an_io_error() {
    let rep = ConvergenceReport::default();
    let err = emit_csv(&rep, std::path::Path::new("/nonexistent-dir/x.csv")).unwrap_err();
    assert!(matches!(err, adi_core::Error::Io { .. }));
}

#[test]
fn manifest_then_override() {
    let mut cfg = ExperimentConfig::from_manifest("dim = 2\nkappa = 1\njmax = 4\nmethod = douglas\n").unwrap();
    cfg.set("kappa", "0").unwrap();
    assert_eq!((cfg.dim, cfg.kappa, cfg.j_max()), (2, 0, 4));
    assert_eq!(cfg.methods, vec![Method::Douglas]);
    assert!(cfg.set("dim", "three").is_err());
}

#[test]
fn level_guards() {
    let too_deep = ExperimentConfig { dim: 3, j_max: Some(8), full_range: true, ..Default::default() };
    assert!(run_convergence(&too_deep).is_err());
    let off_default = ExperimentConfig { dim: 3, j_max: Some(6), ..Default::default() };
    assert!(run_convergence(&off_default).is_err());
}

#[test]
fn eigen_suite_table_shape() {
    let out = run_eigen_suite().unwrap();
    assert!(out.passed);
    assert_eq!(out.table.header(), SUITE_COLUMNS);
    assert_eq!(out.table.rows().len(), EIGEN_SIZES.len() * 2 * 3);
}

#[test]
fn suite_dispatch_rejects_convergence() {
    assert!(run_stability_suite(&ExperimentConfig::default()).is_err());
}

proptest! {
    #[test]
    fn order_of_geometric_sequence(e0 in 1e-8f64..1.0, p in 0.5f64..3.0, len in 2usize..6) {
        let errors: Vec<f64> = (0..len).map(|k| e0 * 2f64.powf(-p * k as f64)).collect();
        for q in estimate_order(&errors) {
            prop_assert!((q.unwrap() - p).abs() < 1e-9);
        }
    }

    #[test]
    fn sci_round_trips(v in any::<f64>().prop_filter("finite", |v| v.is_finite())) {
        prop_assert_eq!(sci(v).parse::<f64>().unwrap(), v);
    }
}
