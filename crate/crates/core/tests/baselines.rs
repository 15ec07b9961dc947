use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use spbcd::baselines::{
    fista_run, ista_step, lasso_lipschitz, pdcp_iterate, preconditioned_pdcp_iterate, LassoView, Pdcp,
    PdcpConfig, PdcpState, PreconditionedConfig, ProxGradient,
};
use spbcd::matrix::DenseMatrix;
use spbcd::problems::{gen_lasso, gen_rpca, make_lasso, make_rpca, rpca_default_weights, SepCCSPInstance};
use spbcd::solver::{run_passes, IterativeSolver};
use spbcd::verify::reference_optimum;

fn max_dev(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn lasso(m: usize, n: usize, seed: u64) -> SepCCSPInstance {
    let d = gen_lasso(m, n, 3.min(n), seed).unwrap();
    make_lasso(d.a, d.b, d.lambda).unwrap()
}

#[test]
fn pdcp_fixed_point() {
    let inst = lasso(5, 8, 1);
    let sp = reference_optimum(&inst, 1e-14).unwrap();
    let cfg = PdcpConfig::balanced(&inst);
    let mut state = PdcpState::new(&inst, sp.x_star.clone(), sp.y_star.clone()).unwrap();
    pdcp_iterate(&inst, &cfg, &mut state).unwrap();
    assert!(max_dev(&state.x, &sp.x_star) <= 1e-12);
    assert!(max_dev(&state.y, &sp.y_star) <= 1e-12);
}

#[test]
fn pdcp_rpca_recommended_parameters_are_stable() {
    let s = gen_rpca(20, 30, 3, 2).unwrap();
    let (mu2, mu3) = rpca_default_weights(&s.observation);
    let inst = make_rpca(&s.observation, mu2, mu3).unwrap();
    let root3 = 3f64.sqrt();
    let cfg = PdcpConfig { h: root3, sigma: root3, theta: 1.0 };
    let mut solver = Pdcp::new(&inst, cfg).unwrap();
    let trace = run_passes(&mut solver, 300, |info| inst.residual(info.x, info.y))
        .into_result()
        .unwrap();
    assert!(trace.iter().all(|r| r.is_finite()));
    let b_norm = s.observation.frobenius_norm();
    assert!(*trace.last().unwrap() <= 1e-2 * b_norm);
}

#[test]
fn pdcp_agrees_with_fista_on_tiny_lasso() {
    let inst = lasso(6, 10, 3);
    let view = LassoView::from_instance(&inst).unwrap();
    let (_, objs) = fista_run(&view, 20_000).unwrap();
    let best = *objs.last().unwrap();
    for mut solver in [Pdcp::new(&inst, PdcpConfig::balanced(&inst)).unwrap(), Pdcp::preconditioned(&inst).unwrap()] {
        run_passes(&mut solver, 20_000, |_| Ok(())).into_result().unwrap();
        let obj = view.objective(solver.primal());
        assert!((obj - best).abs() <= 1e-6 * best, "{} {obj} vs {best}", solver.name());
    }
}

#[test]
fn pdcp_never_diverges_on_corpus() {
    for inst in [lasso(10, 25, 4), lasso(25, 10, 5)] {
        let mut solver = Pdcp::new(&inst, PdcpConfig::balanced(&inst)).unwrap();
        let start = inst.primal_objective(&vec![0.0; inst.cols()]).unwrap();
        let trace = run_passes(&mut solver, 10_000, |info| inst.primal_objective(info.x))
            .into_result()
            .unwrap();
        assert!(trace.iter().all(|o| o.is_finite() && *o <= 10.0 * start));
    }
}

#[test]
fn preconditioned_with_zero_coupling_takes_pure_prox_steps() {
    let a = DenseMatrix::zeros(2, 3);
    let inst = make_lasso(a, vec![1.0, -1.0], 0.2).unwrap();
    let cfg = PreconditionedConfig::new(&inst).unwrap();
    assert!(cfg.h.iter().chain(&cfg.sigma).all(|v| *v == 1e-10));
    let x0 = vec![0.5, -0.3, 1e-12];
    let mut state = PdcpState::new(&inst, x0.clone(), vec![0.3, 0.2]).unwrap();
    preconditioned_pdcp_iterate(&inst, &cfg, &mut state).unwrap();
    let t = 0.2 / 1e-10;
    let want: Vec<f64> = x0.iter().map(|v: &f64| v.signum() * (v.abs() - t).max(0.0)).collect();
    assert_eq!(state.x, want);
}

#[test]
fn preconditioned_hand_trace() {
    // A = [[1, 2], [0, 1]], b = (1, 1), lambda = 0.5: h = (1, 3), sigma = (3, 1).
    let a = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![0.0, 1.0]]).unwrap();
    let inst = make_lasso(a, vec![1.0, 1.0], 0.5).unwrap();
    let cfg = PreconditionedConfig::new(&inst).unwrap();
    let mut state = PdcpState::new(&inst, vec![0.0, 0.0], vec![0.0, 0.0]).unwrap();
    preconditioned_pdcp_iterate(&inst, &cfg, &mut state).unwrap();
    assert!(max_dev(&state.y, &[-0.25, -0.5]) < 1e-15);
    assert!(max_dev(&state.x, &[0.0, 1.0 / 6.0]) < 1e-15);
    assert!(max_dev(&state.x_bar, &[0.0, 1.0 / 3.0]) < 1e-15);
    preconditioned_pdcp_iterate(&inst, &cfg, &mut state).unwrap();
    assert!(max_dev(&state.y, &[-13.0 / 48.0, -7.0 / 12.0]) < 1e-15);
}

#[test]
fn ista_fixed_point_and_zero_solution() {
    let inst = lasso(6, 10, 6);
    let view = LassoView::from_instance(&inst).unwrap();
    let sp = reference_optimum(&inst, 1e-14).unwrap();
    let l = lasso_lipschitz(view.a);
    assert!(max_dev(&ista_step(&view, l, &sp.x_star), &sp.x_star) <= 1e-10);

    let atb = view.a.matvec_t(view.b);
    let big = atb.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let zero_view = LassoView { lambda: big, ..view };
    assert_eq!(ista_step(&zero_view, l, &vec![0.0; 10]), vec![0.0; 10]);
}

#[test]
fn ista_objective_is_monotone() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for seed in 0..5 {
        let inst = lasso(rng.random_range(5..20), rng.random_range(5..20), seed);
        let view = LassoView::from_instance(&inst).unwrap();
        let mut solver = ProxGradient::new(view, false);
        let mut prev = view.objective(solver.x());
        for _ in 0..500 {
            solver.step().unwrap();
            let obj = view.objective(solver.x());
            assert!(obj <= prev + 1e-14 * prev.abs());
            prev = obj;
        }
    }
}

#[test]
fn fista_reaches_tight_optimality_and_matches_ista() {
    let inst = lasso(6, 10, 7);
    let view = LassoView::from_instance(&inst).unwrap();
    let (x_f, objs) = fista_run(&view, 50_000).unwrap();
    let best = *objs.last().unwrap();
    let sp = reference_optimum(&inst, 1e-14).unwrap();
    let exact = view.objective(&sp.x_star);
    assert!((best - exact) / exact <= 1e-10);

    let mut ista = ProxGradient::new(view, false);
    for _ in 0..200_000 {
        ista.step().unwrap();
    }
    assert!(max_dev(ista.x(), &x_f) <= 1e-8);

    let (x0, none) = fista_run(&view, 0).unwrap();
    assert!(none.is_empty());
    assert_eq!(x0, vec![0.0; 10]);
}
