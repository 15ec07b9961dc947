use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use spbcd::matrix::DenseMatrix;
use spbcd::prox;
use spbcd::svd::singular_values;
use spbcd::verify::{prox_oracle, resolvent_oracle, OracleTerm};

const INPUTS: usize = 100;
const DIRECTIONS: usize = 1000;
const RADIUS: f64 = 1e-3;

fn uniform(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(lo..hi)).collect()
}

fn max_dev(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn sphere(rng: &mut ChaCha8Rng, n: usize, radius: f64) -> Vec<f64> {
    let v: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.into_iter().map(|x| x * radius / norm).collect()
}

fn sq_dist(x: &[f64], v: &[f64], w: &[f64]) -> f64 {
    x.iter().zip(v).zip(w).map(|((a, b), w)| w * (a - b) * (a - b)).sum()
}

/// Worst decrease of `objective` over random perturbations of `x`,
/// relative to `1 + |objective(x)|`.
fn worst_descent(x: &[f64], objective: &dyn Fn(&[f64]) -> f64, rng: &mut ChaCha8Rng) -> f64 {
    let base = objective(x);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..DIRECTIONS {
        let d = sphere(rng, x.len(), RADIUS);
        let p: Vec<f64> = x.iter().zip(&d).map(|(a, b)| a + b).collect();
        worst = worst.max((base - objective(&p)) / (1.0 + base.abs()));
    }
    worst
}

#[test]
fn l1_matches_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..INPUTS {
        let n = rng.random_range(1..6);
        let v = uniform(&mut rng, n, -3.0, 3.0);
        let t = uniform(&mut rng, n, 0.05, 2.0);
        let metric: Vec<f64> = t.iter().map(|t| 1.0 / t).collect();
        let oracle = prox_oracle(&OracleTerm::L1 { weight: 1.0 }, &v, &metric).unwrap();
        assert!(max_dev(&prox::prox_l1(&v, &t), &oracle) <= 1e-8);
    }
}

#[test]
fn group_l2_matches_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..INPUTS {
        let n = rng.random_range(1..=4);
        let v = uniform(&mut rng, n, -3.0, 3.0);
        let tau = rng.random_range(0.01..4.0);
        let oracle = prox_oracle(&OracleTerm::GroupL2 { weight: tau }, &v, &vec![1.0; n]).unwrap();
        assert!(max_dev(&prox::prox_group_l2(&v, tau), &oracle) <= 1e-8);
    }
}

#[test]
fn group_l2_examples() {
    let out = prox::prox_group_l2(&[3.0, 4.0], 2.5);
    assert!(max_dev(&out, &[1.5, 2.0]) < 1e-15);
    let oracle = prox_oracle(&OracleTerm::GroupL2 { weight: 2.5 }, &[3.0, 4.0], &[1.0, 1.0]).unwrap();
    assert!(max_dev(&out, &oracle) < 1e-8);
    assert_eq!(prox::prox_group_l2(&[3.0, 4.0], 6.0), vec![0.0, 0.0]);
}

#[test]
fn quadratic_frobenius_matches_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for i in 0..INPUTS {
        let n = rng.random_range(1..8);
        let v = uniform(&mut rng, n, -3.0, 3.0);
        let h = if i == 0 { 0.3 } else { rng.random_range(0.05..5.0) };
        let oracle = prox_oracle(&OracleTerm::QuadFrob, &v, &vec![h; n]).unwrap();
        assert!(max_dev(&prox::prox_quadratic_frobenius(&v, h), &oracle) <= 1e-10);
    }
}

#[test]
fn resolvents_match_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..INPUTS {
        let m = rng.random_range(1..6);
        let y_prev = uniform(&mut rng, m, -2.0, 2.0);
        let u = uniform(&mut rng, m, -3.0, 3.0);
        let b = uniform(&mut rng, m, -2.0, 2.0);
        let sigma = uniform(&mut rng, m, 0.05, 5.0);
        let c = rng.random_range(-2.0..2.0);
        let box_prev = uniform(&mut rng, m, 0.0, 1.0);

        let lin = resolvent_oracle(&OracleTerm::DualLinear { b: b.clone() }, &y_prev, &u, &sigma).unwrap();
        assert!(max_dev(&prox::dual_resolvent_linear(&y_prev, &u, &b, &sigma), &lin) <= 1e-8);

        let quad =
            resolvent_oracle(&OracleTerm::DualQuadratic { b: b.clone() }, &y_prev, &u, &sigma).unwrap();
        assert!(max_dev(&prox::dual_resolvent_quadratic(&y_prev, &u, &b, &sigma), &quad) <= 1e-8);

        let bx = resolvent_oracle(&OracleTerm::DualBox { c }, &box_prev, &u, &sigma).unwrap();
        assert!(max_dev(&prox::dual_resolvent_box_linear(&box_prev, &u, c, &sigma), &bx) <= 1e-8);
    }
}

#[test]
fn resolvent_examples_against_oracle() {
    let one = [1.0];
    let cases = [
        (OracleTerm::DualLinear { b: one.to_vec() }, prox::dual_resolvent_linear(&[0.0], &[3.0], &one, &[2.0]), 1.0),
        (
            OracleTerm::DualQuadratic { b: one.to_vec() },
            prox::dual_resolvent_quadratic(&[0.0], &[3.0], &one, &[2.0]),
            2.0 / 3.0,
        ),
    ];
    for (term, got, want) in cases {
        let oracle = resolvent_oracle(&term, &[0.0], &[3.0], &[2.0]).unwrap();
        assert!((got[0] - want).abs() < 1e-15);
        assert!((oracle[0] - want).abs() < 1e-8);
    }
    let bx = prox::dual_resolvent_box_linear(&[0.5], &[0.0], 1.0, &[1.0]);
    assert_eq!(bx, vec![0.0]);
    let grid = (0..=1000)
        .map(|i| i as f64 / 1000.0)
        .min_by(|a, b| {
            let f = |y: f64| y + 0.5 * (y - 0.5) * (y - 0.5);
            f(*a).total_cmp(&f(*b))
        })
        .unwrap();
    assert_eq!(grid, 0.0);
    assert_eq!(prox::dual_resolvent_box_linear(&[0.2], &[10.0], 0.0, &[1.0]), vec![1.0]);
}

#[test]
fn resolvent_limits() {
    let y = prox::dual_resolvent_linear(&[0.7], &[3.0], &[1.0], &[1e8]);
    assert!((y[0] - 0.7).abs() < 1e-6);
    let y = prox::dual_resolvent_quadratic(&[5.0], &[3.0], &[1.0], &[0.0]);
    assert_eq!(y, vec![2.0]);
    assert_eq!(prox::dual_resolvent_quadratic(&[0.0], &[1.0], &[1.0], &[2.0]), vec![0.0]);
    assert_eq!(prox::dual_resolvent_linear(&[0.4], &[1.0], &[1.0], &[2.0]), vec![0.4]);
    assert_eq!(prox::dual_resolvent_box_linear(&[0.4], &[1.0], 1.0, &[2.0]), vec![0.4]);
}

#[test]
fn separable_operators_pass_perturbation_check() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..INPUTS {
        let n = rng.random_range(1..6);
        let v = uniform(&mut rng, n, -3.0, 3.0);
        let t = uniform(&mut rng, n, 0.05, 2.0);
        let u = uniform(&mut rng, n, -3.0, 3.0);
        let b = uniform(&mut rng, n, -2.0, 2.0);
        let sigma = uniform(&mut rng, n, 0.05, 5.0);
        let h = rng.random_range(0.05..5.0);
        let tau = rng.random_range(0.01..4.0);
        let c = rng.random_range(-2.0..2.0);
        let y_box = uniform(&mut rng, n, 0.0, 1.0);

        let x = prox::prox_l1(&v, &t);
        let w: Vec<f64> = t.iter().map(|t| 1.0 / t).collect();
        let f = |x: &[f64]| x.iter().map(|a| a.abs()).sum::<f64>() + 0.5 * sq_dist(x, &v, &w);
        assert!(worst_descent(&x, &f, &mut rng) <= 1e-12);

        let x = prox::prox_group_l2(&v, tau);
        let f = |x: &[f64]| {
            tau * x.iter().map(|a| a * a).sum::<f64>().sqrt() + 0.5 * sq_dist(x, &v, &vec![1.0; n])
        };
        assert!(worst_descent(&x, &f, &mut rng) <= 1e-12);

        let x = prox::prox_quadratic_frobenius(&v, h);
        let f = |x: &[f64]| 0.5 * x.iter().map(|a| a * a).sum::<f64>() + 0.5 * h * sq_dist(x, &v, &vec![1.0; n]);
        assert!(worst_descent(&x, &f, &mut rng) <= 1e-12);

        let lin_dot = |y: &[f64], w: &[f64]| y.iter().zip(w).map(|(a, b)| a * b).sum::<f64>();
        let y = prox::dual_resolvent_linear(&v, &u, &b, &sigma);
        let f = |y: &[f64]| lin_dot(y, &b) - lin_dot(y, &u) + 0.5 * sq_dist(y, &v, &sigma);
        assert!(worst_descent(&y, &f, &mut rng) <= 1e-12);

        let y = prox::dual_resolvent_quadratic(&v, &u, &b, &sigma);
        let f = |y: &[f64]| {
            0.5 * lin_dot(y, y) + lin_dot(y, &b) - lin_dot(y, &u) + 0.5 * sq_dist(y, &v, &sigma)
        };
        assert!(worst_descent(&y, &f, &mut rng) <= 1e-12);

        let y = prox::dual_resolvent_box_linear(&y_box, &u, c, &sigma);
        assert!(y.iter().all(|v| (0.0..=1.0).contains(v)));
        let f = |y: &[f64]| {
            if y.iter().all(|v| (0.0..=1.0).contains(v)) {
                c * y.iter().sum::<f64>() - lin_dot(y, &u) + 0.5 * sq_dist(y, &y_box, &sigma)
            } else {
                f64::INFINITY
            }
        };
        assert!(worst_descent(&y, &f, &mut rng) <= 1e-12);
    }
}

#[test]
fn nuclear_passes_perturbation_check() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let tau = 0.5;
    for _ in 0..INPUTS {
        let data: Vec<f64> = (0..24).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let v = DenseMatrix::from_col_major(6, 4, data).unwrap();
        let x = prox::prox_nuclear(&v, tau).unwrap();
        let f = |x: &[f64]| {
            let m = DenseMatrix::from_col_major(6, 4, x.to_vec()).unwrap();
            let dist: f64 = x.iter().zip(v.as_col_major()).map(|(a, b)| (a - b) * (a - b)).sum();
            tau * singular_values(&m).unwrap().iter().sum::<f64>() + 0.5 * dist
        };
        assert!(worst_descent(x.as_col_major(), &f, &mut rng) <= 1e-12);
    }
}

#[test]
fn nuclear_examples() {
    let v = DenseMatrix::diag(&[3.0, 1.0]);
    let x = prox::prox_nuclear(&v, 2.0).unwrap();
    assert!(max_dev(x.as_col_major(), DenseMatrix::diag(&[1.0, 0.0]).as_col_major()) < 1e-12);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let w = DenseMatrix::from_col_major(3, 5, uniform(&mut rng, 15, -1.0, 1.0)).unwrap();
    let same = prox::prox_nuclear(&w, 0.0).unwrap();
    assert!(max_dev(same.as_col_major(), w.as_col_major()) < 1e-12);
}
