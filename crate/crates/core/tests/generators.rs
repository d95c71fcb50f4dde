mod common;

use std::io::Write;

use snsqp::generators::{
    cca_initial_point, cca_metrics, gen_recovery_qcqp, gen_recovery_simplex, gen_scca_synthetic, gen_sps_synthetic,
    read_matrix_csv, scca_from_csv, scca_from_data, BoxKind, InstanceBundle,
};
use snsqp::{
    assemble_f, brute_force_solve, eval_objective, instance_to_string, make_initial_point, snsqp_solve, InitStrategy,
    Instance, Matrix, SolverConfig,
};

fn json(b: InstanceBundle) -> String {
    instance_to_string(&Instance::from(b)).unwrap()
}

#[test]
fn same_seed_gives_identical_files() {
    let pairs: Vec<(String, String)> = vec![
        (
            json(gen_recovery_simplex(40, 20, 3, 30.0, 5).unwrap()),
            json(gen_recovery_simplex(40, 20, 3, 30.0, 5).unwrap()),
        ),
        (
            json(gen_recovery_qcqp(30, 35, 2, 2, 3, BoxKind::Box22, 5).unwrap()),
            json(gen_recovery_qcqp(30, 35, 2, 2, 3, BoxKind::Box22, 5).unwrap()),
        ),
        (json(gen_scca_synthetic(16, 24, 20, 4, 5).unwrap()), json(gen_scca_synthetic(16, 24, 20, 4, 5).unwrap())),
        (json(gen_sps_synthetic(40, 5, 5).unwrap()), json(gen_sps_synthetic(40, 5, 5).unwrap())),
    ];
    for (a, b) in &pairs {
        assert_eq!(a, b);
    }
    assert_ne!(json(gen_sps_synthetic(40, 5, 5).unwrap()), json(gen_sps_synthetic(40, 5, 6).unwrap()));
}

#[test]
fn simplex_truth_is_on_the_simplex() {
    for seed in 0..5 {
        let b = gen_recovery_simplex(100, 50, 5, f64::INFINITY, seed).unwrap();
        let x = b.x_star.unwrap();
        assert!((x.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        assert!(x.iter().all(|&v| v >= 0.0));
        assert!(eval_objective(&b.problem, &x).unwrap().abs() <= 1e-12);
    }
}

#[test]
fn qcqp_truth_has_the_planted_activity_pattern() {
    for kind in [BoxKind::Free, BoxKind::Box22, BoxKind::Nonneg] {
        for seed in 0..4 {
            let (k, m) = (3, 5);
            let b = gen_recovery_qcqp(40, 45, k, m, 4, kind, seed).unwrap();
            let p = &b.problem;
            let x = b.x_star.as_deref().unwrap();
            assert!(p.max_violation(x) <= 1e-9);
            let fx: Vec<f64> = p.quad_constraints().iter().map(|f| f.value(x)).collect();
            let slack_quad = fx.iter().filter(|&&v| v < -1e-9).count();
            assert!(fx.iter().all(|&v| v.abs() <= 1e-9 || (-1.0..0.0).contains(&v)));
            assert_eq!(slack_quad, k.div_ceil(2));
            let ax_b: Vec<f64> =
                (0..m).map(|r| p.a().row(r).iter().zip(x).map(|(a, v)| a * v).sum::<f64>() - p.b()[r]).collect();
            assert!(ax_b.iter().all(|&v| v.abs() <= 1e-9 || (-1.0..0.0).contains(&v)));
            assert_eq!(ax_b.iter().filter(|&&v| v < -1e-9).count(), m.div_ceil(2));
            if kind == BoxKind::Box22 {
                assert!(p.bounds().lower().iter().all(|&l| l == -2.0));
                assert!(p.bounds().upper().iter().all(|&u| u == 2.0));
                assert!(x.iter().all(|v| v.abs() <= 1.99));
            }
            if kind == BoxKind::Nonneg {
                assert!(x.iter().all(|&v| v >= 0.0));
            }
        }
    }
}

#[test]
fn sps_rejects_fewer_than_four_assets() {
    assert!(gen_sps_synthetic(40, 3, 0).is_err());
    assert!(gen_sps_synthetic(40, 4, 0).is_ok());
}

#[test]
fn sps_solution_has_the_expected_magnitude() {
    let b = gen_sps_synthetic(1000, 5, 0).unwrap();
    let cfg = SolverConfig { tau: 1.0, ..SolverConfig::default() };
    let y0 = make_initial_point(&b.problem, &InitStrategy::SparseUniform { value: 0.1 }, &cfg).unwrap();
    let r = snsqp_solve(&b.problem, &y0, &cfg).unwrap();
    assert!(r.converged());
    let f = eval_objective(&b.problem, &r.final_point.x).unwrap();
    assert!((1e-3..=1.2e-2).contains(&f), "Fval {f}");
    assert!(b.problem.max_violation(&r.final_point.x) <= 1e-6);
}

#[test]
fn scca_solution_uses_both_blocks() {
    for seed in 0..3 {
        let b = gen_scca_synthetic(200, 300, 50, 10, seed).unwrap();
        let split = b.cca_split.unwrap();
        let cfg = SolverConfig { tau: 0.005, ..SolverConfig::default() };
        let y0 = cca_initial_point(&b.problem, split, &cfg).unwrap();
        let r = snsqp_solve(&b.problem, &y0, &cfg).unwrap();
        let m = cca_metrics(&b.problem, &r.final_point.x, split).unwrap();
        assert!(m.nnz_x > 0 && m.nnz_y > 0, "seed {seed}: {m:?}");
    }
}

#[test]
fn small_cca_optimum_uses_both_blocks() {
    let mut r = common::rng(31);
    for _ in 0..5 {
        let x = common::gaussian(&mut r, 4, 12);
        let y = common::gaussian(&mut r, 4, 12);
        let b = scca_from_data(x, y, 2).unwrap();
        let o = brute_force_solve(&b.problem).unwrap();
        let split = b.cca_split.unwrap();
        assert!(o.best_x[..split].iter().any(|&v| v != 0.0));
        assert!(o.best_x[split..].iter().any(|&v| v != 0.0));
    }
}

fn write_csv(dir: &tempfile::TempDir, name: &str, body: &str) -> std::path::PathBuf {
    let path = dir.path().join(name);
    std::fs::File::create(&path).unwrap().write_all(body.as_bytes()).unwrap();
    path
}

#[test]
fn zero_data_gives_a_trivial_problem() {
    let dir = tempfile::tempdir().unwrap();
    let zeros = "0,0,0,0,0\n0,0,0,0,0\n0,0,0,0,0\n";
    let px = write_csv(&dir, "x.csv", zeros);
    let py = write_csv(&dir, "y.csv", zeros);
    let b = scca_from_csv(&px, &py, 2).unwrap();
    assert_eq!(b.problem.objective().q_mat().max_abs(), 0.0);
    let cfg = SolverConfig { tau: 0.005, ..SolverConfig::default() };
    let y0 = make_initial_point(&b.problem, &InitStrategy::SparseUniform { value: 0.1 }, &cfg).unwrap();
    let r = snsqp_solve(&b.problem, &y0, &cfg).unwrap();
    assert!(r.converged());
    assert!(r.iterations <= 5);
    let f = assemble_f(&b.problem, &r.final_point, &r.final_support).unwrap();
    assert!(f.grad_t.iter().all(|&v| v == 0.0));
}

#[test]
fn csv_columns_are_normalized() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_csv(&dir, "x.csv", "a,b,c,d\n1,2,3,10\n4,4,4,4\n-1,0.5,2,7\n");
    let m = read_matrix_csv(&path).unwrap();
    assert_eq!((m.rows(), m.cols()), (3, 4));
    assert_eq!(m.row(1), &[4.0, 4.0, 4.0, 4.0]);
    let b = scca_from_data(m.clone(), m.clone(), 1).unwrap();
    let split = b.cca_split.unwrap();
    // The constraint stores 2Σˣˣ = 2XXᵀ for the normalized X.
    let x = normalized(&m);
    let reference = x.matmul(&x.transpose()).unwrap();
    let q1 = b.problem.quad_constraints()[0].q_mat();
    for r in 0..split {
        for c in 0..split {
            assert!((0.5 * q1[(r, c)] - reference[(r, c)]).abs() <= 1e-12);
        }
    }
    for c in 0..x.cols() {
        let col = x.column(c);
        let mean = col.iter().sum::<f64>() / col.len() as f64;
        let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / col.len() as f64;
        assert!(mean.abs() <= 1e-12);
        assert!((var - 1.0).abs() <= 1e-9);
    }
}

/// Independent column normalization used as the reference above.
fn normalized(m: &Matrix<f64>) -> Matrix<f64> {
    let mut out = m.clone();
    for c in 0..m.cols() {
        let col = m.column(c);
        let mean = col.iter().sum::<f64>() / col.len() as f64;
        let sd = (col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / col.len() as f64).sqrt();
        for r in 0..m.rows() {
            out[(r, c)] = if sd > 0.0 { (m[(r, c)] - mean) / sd } else { 0.0 };
        }
    }
    out
}

#[test]
fn identical_inputs_give_a_symmetric_psd_cross_covariance() {
    let dir = tempfile::tempdir().unwrap();
    let body = "1,2,0.5,3\n-1,0,2,1\n0.3,0.1,-2,4\n";
    let px = write_csv(&dir, "x.csv", body);
    let py = write_csv(&dir, "y.csv", body);
    let b = scca_from_csv(&px, &py, 2).unwrap();
    let split = b.cca_split.unwrap();
    let q = b.problem.objective().q_mat();
    // The objective stores −2Σˣʸ in the off-diagonal block.
    let sxy = Matrix::from_fn(split, split, |r, c| -0.5 * q[(r, split + c)]);
    assert!(sxy.max_asymmetry() <= 1e-12);
    let mut r = common::rng(4);
    for _ in 0..200 {
        let v: Vec<f64> = (0..split).map(|_| common::normal(&mut r)).collect();
        let quad: f64 = v.iter().zip(sxy.mul_vec(&v)).map(|(a, b)| a * b).sum();
        assert!(quad >= -1e-10);
    }
}
