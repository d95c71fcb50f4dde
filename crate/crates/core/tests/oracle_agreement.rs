mod common;

use common::*;
use snsqp::generators::{gen_recovery_qcqp, BoxKind};
use snsqp::{
    assemble_f, assemble_g, brute_force_solve, enumerate_supports, eval_objective, l0_norm, make_initial_point,
    smallest_singular_value, snsqp_solve, verify_p_stationarity, BoxSet, InitStrategy, Matrix, Problem, ProblemParts,
    QuadraticForm, Report, SolverConfig,
};

fn tiny_convex(case: u64) -> Problem {
    let mut r = rng(900 + case);
    let n = 3 + (case as usize % 4);
    let s = 1 + (case as usize % 3).min(n - 1);
    let sh = Shape {
        n,
        s,
        k: (case % 2) as usize,
        m: (case % 3 == 1) as usize,
        m_eq: 0,
        convex: true,
        bounds: BoxStyle::Finite,
    };
    random_problem(&mut r, &sh)
}

fn multistart(p: &Problem, tau: f64) -> Vec<Report> {
    let inits = [InitStrategy::DenseGaussian, InitStrategy::DenseUniform, InitStrategy::SparseUniform { value: 0.1 }];
    (0..10u64)
        .map(|seed| {
            let cfg = SolverConfig { tau, seed, ..SolverConfig::default() };
            let y0 = make_initial_point(p, &inits[seed as usize % 3], &cfg).unwrap();
            snsqp_solve(p, &y0, &cfg).unwrap()
        })
        .collect()
}

fn stationarity_tau(p: &Problem) -> f64 {
    0.5 / p.objective().q_mat().spectral_norm_estimate(100)
}

#[test]
fn oracle_points_are_sparse_and_feasible() {
    for case in 0..12 {
        let p = tiny_convex(case);
        let o = brute_force_solve(&p).unwrap();
        assert!(o.feasible());
        assert!(l0_norm(&o.best_x) <= p.s());
        assert!(p.max_violation(&o.best_x) <= 1e-6);
        assert!((eval_objective(&p, &o.best_x).unwrap() - o.best_value).abs() <= 1e-12 * o.best_value.abs().max(1.0));
    }
}

#[test]
fn oracle_keeps_the_largest_entry() {
    // min ½‖x − c‖² over ‖x‖₀ <= 1 and [-3, 3]³ keeps the largest |c_i|.
    let c = [0.7, -2.0, 1.1];
    let f0 = QuadraticForm::new(Matrix::identity(3), c.iter().map(|v| -v).collect(), 0.0).unwrap();
    let p: Problem = ProblemParts::new(f0, 1).with_bounds(BoxSet::uniform(3, -3.0, 3.0).unwrap()).build().unwrap();
    let o = brute_force_solve(&p).unwrap();
    assert_eq!(o.best_support.unwrap().indices(), &[1]);
    assert!((o.best_x[1] + 2.0).abs() <= 1e-6);
    assert_eq!((o.best_x[0], o.best_x[2]), (0.0, 0.0));
}

#[test]
fn multistart_matches_the_oracle() {
    let mut within = 0;
    for case in 0..20 {
        let p = tiny_convex(case);
        let tau = stationarity_tau(&p);
        let o = brute_force_solve(&p).unwrap();
        let best = multistart(&p, tau)
            .iter()
            .filter(|r| r.converged() && p.max_violation(&r.final_point.x) <= 1e-6)
            .map(|r| eval_objective(&p, &r.final_point.x).unwrap())
            .fold(f64::INFINITY, f64::min);
        if best <= o.best_value + 1e-3 {
            within += 1;
        }
    }
    // The sparsity constraint makes these problems nonconvex; a few local
    // solutions are expected.
    assert!(within >= 16, "{within}/20");
}

#[test]
fn certified_points_solve_every_stationary_system() {
    let mut checked = 0;
    for case in 0..20 {
        let p = tiny_convex(case);
        let tau = stationarity_tau(&p);
        let o = brute_force_solve(&p).unwrap();
        for r in multistart(&p, tau) {
            if !r.converged() || eval_objective(&p, &r.final_point.x).unwrap() > o.best_value + 1e-3 {
                continue;
            }
            let tol = 1e-6;
            if !verify_p_stationarity(&p, &r.final_point, tau, tol).pass {
                continue;
            }
            checked += 1;
            for t in &enumerate_supports(&p, &r.final_point, tau, 50).unwrap().sets {
                assert!(assemble_f(&p, &r.final_point, t).unwrap().norm_inf() <= 10.0 * tol);
            }
        }
    }
    assert!(checked > 0);
}

#[test]
fn converged_runs_are_stationary_with_nonsingular_g_and_fast_tails() {
    for seed in 0..5 {
        let b = gen_recovery_qcqp(60, 65, 1, 1, 4, BoxKind::Free, seed).unwrap();
        let p = &b.problem;
        let cfg = SolverConfig { tau: 3.0, seed, ..SolverConfig::default() };
        let y0 = make_initial_point(p, &InitStrategy::SparseUniform { value: 0.1 }, &cfg).unwrap();
        let r = snsqp_solve(p, &y0, &cfg).unwrap();
        assert!(r.converged(), "seed {seed}: {:?}", r.status);
        let rep = verify_p_stationarity(p, &r.final_point, cfg.tau, 10.0 * cfg.eps);
        assert!(rep.pass, "seed {seed}: {}", rep.which);
        for t in &enumerate_supports(p, &r.final_point, cfg.tau, 50).unwrap().sets {
            assert!(assemble_f(p, &r.final_point, t).unwrap().norm() <= 10.0 * cfg.eps);
        }
        let g = assemble_g(p, &r.final_point, &r.final_support).unwrap().g;
        let smin = smallest_singular_value(&g);
        eprintln!("seed {seed}: sigma_min(G) = {smin:e}");
        assert!(smin > 0.0);
        let h = &r.residual_history;
        for l in 1..h.len() - 1 {
            let (prev, next) = (h[l], h[l + 1]);
            if prev > 1e-14 && prev < 1e-2 && next > 1e-14 {
                assert!(next.ln() / prev.ln() >= 1.7, "seed {seed}, step {l}: {prev:e} -> {next:e}");
                assert_eq!(r.backtrack_counts[l], 0);
            }
        }
    }
}
