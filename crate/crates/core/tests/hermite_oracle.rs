mod common;

use hermite_rolle::hermite::{build_hermite, delta_true};
use hermite_rolle::{DifferentiableFunction, NodeSet, Polynomial};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Dense Gaussian elimination with partial pivoting.
fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs())).unwrap();
        a.swap(k, p);
        b.swap(k, p);
        for i in k + 1..n {
            let m = a[i][k] / a[k][k];
            let pivot_row = a[k].clone();
            for (aij, akj) in a[i][k..].iter_mut().zip(&pivot_row[k..]) {
                *aij -= m * akj;
            }
            b[i] -= m * b[k];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|j| a[i][j] * x[j]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    x
}

#[test]
fn degree_five_matches_confluent_vandermonde_solve() {
    let f = DifferentiableFunction::exp_sin();
    let xs = [0.0, 1.0, 2.0];
    let h = build_hermite(&f, &NodeSet::new(xs.to_vec()).unwrap()).unwrap();

    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for &x in &xs {
        rows.push((0..6).map(|k| x.powi(k)).collect::<Vec<f64>>());
        rhs.push(f.deriv(0, x).unwrap());
        rows.push(
            (0..6)
                .map(|k| if k == 0 { 0.0 } else { k as f64 * x.powi(k - 1) })
                .collect(),
        );
        rhs.push(f.deriv(1, x).unwrap());
    }
    let oracle = solve_dense(rows, rhs);
    for (k, (got, want)) in h.poly.coeffs().iter().zip(&oracle).enumerate() {
        assert!((got - want).abs() <= 1e-8 * want.abs().max(1e-3), "c{k}: {got} vs {want}");
    }
    assert!(h.satisfies_interpolation());
}

#[test]
fn interpolation_conditions_hold_for_random_node_sets() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let f = DifferentiableFunction::exp_sin();
    for _ in 0..50 {
        let count = rng.gen_range(2..=5);
        let mut xs: Vec<f64> = (0..count).map(|_| rng.gen_range(-1.0..4.0)).collect();
        xs.sort_by(f64::total_cmp);
        xs.dedup_by(|a, b| (*a - *b).abs() < 0.05);
        let Ok(nodes) = NodeSet::new(xs) else { continue };
        let h = build_hermite(&f, &nodes).unwrap();
        assert!(h.satisfies_interpolation(), "{:?}", nodes);
    }
}

#[test]
fn low_degree_polynomials_are_reproduced() {
    let p = Polynomial::new(vec![0.3, -1.2, 0.5, 2.0, -0.7]);
    let f = DifferentiableFunction::polynomial("p4", &p, 8);
    let nodes = NodeSet::new(vec![-1.0, 0.5, 1.5]).unwrap();
    let h = build_hermite(&f, &nodes).unwrap();
    for i in 0..1000 {
        let x = -1.0 + 2.5 * i as f64 / 999.0;
        assert!(delta_true(&f, &h, x).abs() < 1e-10, "x = {x}");
    }
}

#[test]
fn worked_example_max_error_is_7_04() {
    let (prob, _) = common::worked_trajectory();
    let n = 200_000;
    let max = (0..=n)
        .map(|i| prob.delta_true(1.5 * std::f64::consts::PI * i as f64 / n as f64).abs())
        .fold(0.0, f64::max);
    assert!((max - 7.04).abs() < 0.01, "{max}");
}

#[test]
fn builtin_derivative_stacks_are_consistent() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let h = 1e-5;
    for name in ["exp-sin", "exp", "cos"] {
        let f = DifferentiableFunction::by_name(name).unwrap();
        for _ in 0..50 {
            let x: f64 = rng.gen_range(0.0..1.5 * std::f64::consts::PI);
            for k in 0..8 {
                let fd = (f.deriv(k, x + h).unwrap() - f.deriv(k, x - h).unwrap()) / (2.0 * h);
                let exact = f.deriv(k + 1, x).unwrap();
                let scale = exact.abs().max(f.deriv(k, x).unwrap().abs()).max(1.0);
                assert!((fd - exact).abs() <= 1e-4 * scale, "{name} k={k} x={x}: {fd} vs {exact}");
            }
        }
    }
}

#[test]
fn wrapped_callbacks_reproduce_builtin() {
    let base = DifferentiableFunction::exp_sin();
    let callbacks: Vec<Box<dyn Fn(f64) -> f64 + Send + Sync>> = (0..=8)
        .map(|k| {
            let f = base.clone();
            Box::new(move |x| f.deriv(k, x).unwrap()) as Box<dyn Fn(f64) -> f64 + Send + Sync>
        })
        .collect();
    let wrapped = DifferentiableFunction::from_callbacks("wrapped", callbacks).unwrap();
    assert_eq!(wrapped.max_order(), 8);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        let x: f64 = rng.gen_range(-3.0..6.0);
        let k = rng.gen_range(0..=8);
        assert_eq!(wrapped.deriv(k, x).unwrap(), base.deriv(k, x).unwrap());
    }
}
