use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use spbcd::matrix::{BlockPartition, DenseMatrix};
use spbcd::problems::{gen_lasso, make_lasso, make_rpca, BlockFn, SepCCSPInstance};
use spbcd::solver::{iterate_with, SolverState, StepsizeConfig, StepsizeRule};
use spbcd::verify::{
    compute_m0, p_matrix_min_eig, perturbation_violation, reference_optimum, saddle_gap,
    symmetric_eigenvalues, SaddlePoint,
};

fn tiny_lasso(seed: u64) -> SepCCSPInstance {
    let d = gen_lasso(4, 6, 2, seed).unwrap();
    make_lasso(d.a, d.b, d.lambda).unwrap()
}

fn random_vec(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-scale..scale)).collect()
}

#[test]
fn gap_vanishes_at_saddle_point() {
    for seed in 0..3 {
        let inst = tiny_lasso(seed);
        let sp = reference_optimum(&inst, 1e-13).unwrap();
        let gap = saddle_gap(&inst, &sp.x_star, &sp.y_star, Some(10.0)).unwrap();
        assert!((-1e-12..=1e-9).contains(&gap), "gap {gap:e}");
    }
}

#[test]
fn gap_at_primal_optimum_is_one_sided() {
    let inst = tiny_lasso(1);
    let sp = reference_optimum(&inst, 1e-13).unwrap();
    let y_hat: Vec<f64> = inst
        .dual_fn()
        .maximizer(&inst.coupling().apply(&sp.x_star), &sp.y_star)
        .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..50 {
        let y = random_vec(&mut rng, 4, 1.0);
        let gap = saddle_gap(&inst, &sp.x_star, &y, Some(5.0)).unwrap();
        let slack = inst.lagrangian(&sp.x_star, &y_hat).unwrap() - inst.lagrangian(&sp.x_star, &y).unwrap();
        assert!(slack >= 0.0);
        assert!(gap >= slack - 1e-12);
    }
}

#[test]
fn gap_matches_grid_on_two_by_two() {
    let a = DenseMatrix::from_rows(&[vec![1.0, 0.4], vec![-0.3, 0.8]]).unwrap();
    let b = vec![0.7, -0.2];
    let lambda = 0.25;
    let inst = make_lasso(a.clone(), b.clone(), lambda).unwrap();
    let radius = 2.0;
    let lag = |x: &[f64], y: &[f64]| {
        let ax = a.matvec(x);
        lambda * (x[0].abs() + x[1].abs()) + y[0] * ax[0] + y[1] * ax[1]
            - (0.5 * y[0] * y[0] + b[0] * y[0] + 0.5 * y[1] * y[1] + b[1] * y[1])
    };
    let steps = 400;
    let grid = |lo: f64, hi: f64| -> Vec<f64> {
        (0..=steps).map(|i| lo + (hi - lo) * i as f64 / steps as f64).collect()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..5 {
        let x = random_vec(&mut rng, 2, 1.5);
        let y = random_vec(&mut rng, 2, 1.5);
        let ys = grid(-6.0, 6.0);
        let xs = grid(-radius, radius);
        let mut upper = f64::NEG_INFINITY;
        let mut lower = f64::INFINITY;
        for &p in &ys {
            for &q in &ys {
                upper = upper.max(lag(&x, &[p, q]));
            }
        }
        for &p in &xs {
            for &q in &xs {
                lower = lower.min(lag(&[p, q], &y));
            }
        }
        let gap = saddle_gap(&inst, &x, &y, Some(radius)).unwrap();
        // Dual grid spacing 0.03 on a unit-curvature quadratic.
        assert!((gap - (upper - lower)).abs() <= 1e-3, "{gap} vs {}", upper - lower);
    }
}

#[test]
fn gap_refuses_constrained_problems() {
    let b = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![0.5, -1.0]]).unwrap();
    let inst = make_rpca(&b, 0.3, 0.3).unwrap();
    let x = vec![0.0; inst.cols()];
    let y = vec![0.0; inst.rows()];
    assert!(saddle_gap(&inst, &x, &y, None).is_err());
}

/// Term-by-term evaluation written out coordinate by coordinate.
fn m0_by_terms(
    inst: &SepCCSPInstance,
    x0: &[f64],
    y0: &[f64],
    sp: &SaddlePoint,
    h: &[f64],
    sigma: &[f64],
    k: usize,
    j: usize,
) -> f64 {
    let a = inst.coupling().to_dense();
    let mut primal = 0.0;
    for d in 0..x0.len() {
        primal += h[d] * (x0[d] - sp.x_star[d]).powi(2);
    }
    let mut dual = 0.0;
    for r in 0..y0.len() {
        dual += sigma[r] * (y0[r] - sp.y_star[r]).powi(2);
    }
    let mut cross = 0.0;
    let mut lin0 = 0.0;
    let mut lin_star = 0.0;
    for r in 0..y0.len() {
        for d in 0..x0.len() {
            cross += (y0[r] - sp.y_star[r]) * a.get(r, d) * (x0[d] - sp.x_star[d]);
            lin0 += sp.y_star[r] * a.get(r, d) * x0[d];
            lin_star += sp.y_star[r] * a.get(r, d) * sp.x_star[d];
        }
    }
    let lambda = match inst.block_fns()[0] {
        BlockFn::L1 { weight } => weight,
        _ => unreachable!(),
    };
    let f = |x: &[f64]| lambda * x.iter().map(|v| v.abs()).sum::<f64>();
    let (jf, kf) = (j as f64, k as f64);
    jf / (2.0 * kf) * primal + 0.5 * dual - cross
        + (jf - kf) / kf * (f(x0) + lin0 - f(&sp.x_star) - lin_star)
}

#[test]
fn m0_term_by_term() {
    let inst = tiny_lasso(3);
    let sp = reference_optimum(&inst, 1e-13).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for k in [1, 2, 3, 6] {
        let cfg = StepsizeConfig::new(&inst, StepsizeRule::AdaptiveL1, k).unwrap();
        let selected: Vec<usize> = (0..k).collect();
        let sigma = cfg.sigma_for(&inst, &selected).unwrap();
        let x0 = random_vec(&mut rng, 6, 1.0);
        let y0 = random_vec(&mut rng, 4, 1.0);
        let got = compute_m0(&inst, &x0, &y0, &sp, &cfg.h, &sigma, k, 6).unwrap();
        let want = m0_by_terms(&inst, &x0, &y0, &sp, &cfg.h, &sigma, k, 6);
        assert!((got - want).abs() <= 1e-12 * (1.0 + want.abs()), "K={k}: {got} vs {want}");
    }
    let cfg = StepsizeConfig::new(&inst, StepsizeRule::AdaptiveL1, 6).unwrap();
    let sigma = cfg.sigma_for(&inst, &[0, 1, 2, 3, 4, 5]).unwrap();
    let zero = compute_m0(&inst, &sp.x_star, &sp.y_star, &sp, &cfg.h, &sigma, 2, 6).unwrap();
    assert_eq!(zero, 0.0);
}

#[test]
fn reference_optimum_closed_form_lasso() {
    let inst = make_lasso(DenseMatrix::identity(2), vec![1.0, 0.0], 0.5).unwrap();
    let sp = reference_optimum(&inst, 1e-12).unwrap();
    assert!((sp.x_star[0] - 0.5).abs() <= 1e-9 && sp.x_star[1].abs() <= 1e-9);
    assert!((sp.y_star[0] + 0.5).abs() <= 1e-9 && sp.y_star[1].abs() <= 1e-9);
}

#[test]
fn reference_optimum_zero_rpca() {
    let inst = make_rpca(&DenseMatrix::zeros(3, 4), 0.2, 0.5).unwrap();
    let sp = reference_optimum(&inst, 1e-10).unwrap();
    assert!(sp.x_star.iter().chain(&sp.y_star).all(|v| v.abs() <= 1e-12));
}

#[test]
fn reference_optimum_survives_many_perturbations() {
    for seed in 0..3 {
        let inst = tiny_lasso(seed + 10);
        let sp = reference_optimum(&inst, 1e-13).unwrap();
        let radius = 1e-3;
        let worst = perturbation_violation(&inst, &sp.x_star, &sp.y_star, 1000, radius, seed).unwrap();
        assert!(worst / radius <= 1e-6, "seed {seed}: {worst:e}");
    }
}

#[test]
fn eigenvalues_of_known_matrix() {
    let eig = symmetric_eigenvalues(vec![2.0, 1.0, 0.0, 1.0, 2.0, 0.0, 0.0, 0.0, -1.0], 3).unwrap();
    let want = [-1.0, 1.0, 3.0];
    for (a, b) in eig.iter().zip(want) {
        assert!((a - b).abs() < 1e-12);
    }
}

struct Draw {
    a: DenseMatrix,
    partition: BlockPartition,
    selected: Vec<usize>,
    k: usize,
}

fn draws(count: usize, seed: u64) -> Vec<Draw> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let data: Vec<f64> = (0..96).map(|_| rng.random_range(-1.0..1.0)).collect();
            let a = DenseMatrix::from_col_major(8, 12, data).unwrap();
            let mut sizes = Vec::new();
            let mut left = 12;
            while left > 0 {
                let s = rng.random_range(1..=left.min(4));
                sizes.push(s);
                left -= s;
            }
            let j = sizes.len();
            let k = rng.random_range(1..=j);
            let mut selected = rand::seq::index::sample(&mut rng, j, k).into_vec();
            selected.sort_unstable();
            Draw { a, partition: BlockPartition::from_sizes(&sizes).unwrap(), selected, k }
        })
        .collect()
}

fn adaptive_min_eig(d: &Draw, h_scale: f64) -> f64 {
    let j = d.partition.num_blocks();
    let h: Vec<f64> = spbcd::matrix::col_abs_sums(&d.a).iter().map(|v| v * h_scale).collect();
    let rows =
        spbcd::matrix::row_abs_sums_over_blocks(&d.a, &d.partition, &d.selected).unwrap();
    let sigma: Vec<f64> = rows.iter().map(|v| v * j as f64 / d.k as f64).collect();
    p_matrix_min_eig(&d.a, &d.partition, &d.selected, &h, &sigma, d.k, j).unwrap()
}

#[test]
fn p_matrix_is_psd_under_adaptive_rule() {
    for d in draws(100, 1) {
        assert!(adaptive_min_eig(&d, 1.0) >= -1e-8);
    }
}

#[test]
fn p_matrix_with_inflated_and_shrunk_primal_penalty() {
    let all = draws(100, 2);
    assert!(all.iter().all(|d| adaptive_min_eig(d, 2.0) > 0.0));
    assert!(all.iter().any(|d| adaptive_min_eig(d, 0.1) < 0.0));
}

#[test]
fn chain_inequality_along_full_sweep() {
    for seed in 0..3 {
        let inst = tiny_lasso(seed + 20);
        let sp = reference_optimum(&inst, 1e-13).unwrap();
        let cfg = StepsizeConfig::new(&inst, StepsizeRule::AdaptiveL1, 6).unwrap();
        let all: Vec<usize> = (0..6).collect();
        let sigma = cfg.sigma_for(&inst, &all).unwrap();
        let mut state = SolverState::zeros(&inst).unwrap();
        let m = |s: &SolverState| compute_m0(&inst, &s.x, &s.y, &sp, &cfg.h, &sigma, 6, 6).unwrap();
        let mut prev = m(&state);
        for t in 0..1000 {
            iterate_with(&inst, &cfg, &mut state, &all, None).unwrap();
            let next = m(&state);
            let gap = inst.lagrangian(&state.x, &sp.y_star).unwrap()
                - inst.lagrangian(&sp.x_star, &state.y).unwrap();
            assert!(prev - next - gap >= -1e-9, "seed {seed}, t={t}: {:e}", prev - next - gap);
            prev = next;
        }
    }
}
