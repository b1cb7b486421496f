use super::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn pts(v: &[&[f64]]) -> Vec<Vec<f64>> {
    v.iter().map(|p| p.to_vec()).collect()
}

/// Minimum over all permutations of the mean matched cost.
fn permutation_oracle(cost: &CostMatrix) -> f64 {
    fn rec(cost: &CostMatrix, row: usize, used: &mut Vec<bool>, acc: f64, best: &mut f64) {
        let n = cost.rows();
        if row == n {
            *best = best.min(acc);
            return;
        }
        for j in 0..n {
            if !used[j] {
                used[j] = true;
                rec(cost, row + 1, used, acc + cost.get(row, j), best);
                used[j] = false;
            }
        }
    }
    let mut best = f64::INFINITY;
    rec(cost, 0, &mut vec![false; cost.rows()], 0.0, &mut best);
    best / cost.rows() as f64
}

/// 1-D earth mover's distance: integral of |CDF_x − CDF_y|.
fn one_dim_oracle(x: &[f64], a: &[f64], y: &[f64], b: &[f64]) -> f64 {
    let mut events: Vec<(f64, f64)> = x.iter().zip(a).map(|(&p, &w)| (p, w)).collect();
    events.extend(y.iter().zip(b).map(|(&p, &w)| (p, -w)));
    events.sort_by(|l, r| l.0.partial_cmp(&r.0).unwrap());
    let mut total = 0.0;
    let mut cdf_diff = 0.0;
    for w in events.windows(2) {
        cdf_diff += w[0].1;
        total += cdf_diff.abs() * (w[1].0 - w[0].0);
    }
    total
}

fn random_points(rng: &mut ChaCha8Rng, n: usize, d: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect()
}

fn random_marginal(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..1.0)).collect();
    let s: f64 = raw.iter().sum();
    raw.iter().map(|x| x / s).collect()
}

#[test]
fn cost_matrix_examples() {
    let c = cost_matrix(&pts(&[&[0.0, 0.0]]), &pts(&[&[3.0, 4.0]])).unwrap();
    assert_eq!(c.to_rows(), vec![vec![5.0]]);
    let c = cost_matrix(&pts(&[&[1.0, 2.0]]), &pts(&[&[1.0, 2.0]])).unwrap();
    assert_eq!(c.to_rows(), vec![vec![0.0]]);
    let c = cost_matrix(
        &pts(&[&[0.0, 0.0], &[2.0, 0.0]]),
        &pts(&[&[1.0, 0.0], &[3.0, 0.0]]),
    )
    .unwrap();
    assert_eq!(c.to_rows(), vec![vec![1.0, 3.0], vec![1.0, 1.0]]);
}

#[test]
fn cost_matrix_errors() {
    let empty: Vec<Vec<f64>> = vec![];
    assert!(cost_matrix(&empty, &pts(&[&[1.0]])).is_err());
    assert!(cost_matrix(&pts(&[&[1.0]]), &pts(&[&[1.0, 2.0]])).is_err());
    assert!(cost_matrix(&pts(&[&[1.0], &[1.0, 2.0]]), &pts(&[&[1.0]])).is_err());
}

#[test]
fn wmd_identity_is_zero() {
    let x = pts(&[&[0.3, 1.0], &[2.0, -1.0], &[5.0, 5.0]]);
    let (d, plan) = wmd(&x, &x, None).unwrap();
    assert_eq!(d, 0.0);
    assert!(plan.marginal_error() <= 1e-9);
}

#[test]
fn wmd_two_by_two_example() {
    let x = pts(&[&[0.0, 0.0], &[2.0, 0.0]]);
    let y = pts(&[&[1.0, 0.0], &[3.0, 0.0]]);
    let (d, plan) = wmd(&x, &y, None).unwrap();
    assert!((d - 1.0).abs() <= 1e-12);
    assert!((plan.flow(0, 0) - 0.5).abs() <= 1e-12);
    assert!((plan.flow(1, 1) - 0.5).abs() <= 1e-12);
    let xs = TokenizedSentence::from_tokens(vec!["x0".into(), "x1".into()]);
    let ys = TokenizedSentence::from_tokens(vec!["y0".into(), "y1".into()]);
    let pairs = align_from_plan(&plan, &xs, &ys, 0.05).unwrap();
    assert_eq!(
        pairs,
        vec![("x0".into(), "y0".into()), ("x1".into(), "y1".into())]
    );
}

#[test]
fn wmd_matches_permutation_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let n = rng.gen_range(1..=6);
        let d = rng.gen_range(1..=16);
        let x = random_points(&mut rng, n, d);
        let y = random_points(&mut rng, n, d);
        let (dist, plan) = wmd(&x, &y, None).unwrap();
        let oracle = permutation_oracle(&cost_matrix(&x, &y).unwrap());
        assert!((dist - oracle).abs() <= 1e-9, "{dist} vs {oracle}");
        assert!(plan.marginal_error() <= 1e-9);
    }
}

#[test]
fn wmd_matches_one_dim_closed_form_with_unequal_masses() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..300 {
        let n = rng.gen_range(1..=12);
        let m = rng.gen_range(1..=12);
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let y: Vec<f64> = (0..m).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let a = random_marginal(&mut rng, n);
        let b = random_marginal(&mut rng, m);
        let xs: Vec<Vec<f64>> = x.iter().map(|&v| vec![v]).collect();
        let ys: Vec<Vec<f64>> = y.iter().map(|&v| vec![v]).collect();
        let mg = Marginals {
            source: a.clone(),
            target: b.clone(),
        };
        let (dist, plan) = wmd(&xs, &ys, Some(&mg)).unwrap();
        let oracle = one_dim_oracle(&x, &a, &y, &b);
        assert!((dist - oracle).abs() <= 1e-9, "{dist} vs {oracle}");
        assert!(plan.marginal_error() <= 1e-9);
    }
}

#[test]
fn zero_mass_marginal_is_rejected() {
    let x = pts(&[&[0.0], &[1.0]]);
    let mg = Marginals {
        source: vec![0.0, 0.0],
        target: vec![0.5, 0.5],
    };
    assert!(matches!(wmd(&x, &x, Some(&mg)), Err(Error::Argument(_))));
    assert!(matches!(wcd(&x, &x, Some(&mg)), Err(Error::Argument(_))));
}

#[test]
fn overlong_sentence_is_rejected() {
    let x: Vec<Vec<f64>> = (0..257).map(|i| vec![i as f64]).collect();
    assert!(wmd(&x, &x[..3], None).is_err());
}

#[test]
fn wcd_examples() {
    let x = pts(&[&[0.0, 0.0], &[2.0, 0.0]]);
    let y = pts(&[&[1.0, 0.0], &[3.0, 0.0]]);
    assert!((wcd(&x, &y, None).unwrap() - 1.0).abs() <= 1e-12);
    assert_eq!(wcd(&x, &x, None).unwrap(), 0.0);
}

#[test]
fn wcd_lower_bounds_wmd() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..1000 {
        let d = rng.gen_range(2..=64);
        let (n, m) = (rng.gen_range(1..=12), rng.gen_range(1..=12));
        let x = random_points(&mut rng, n, d);
        let y = random_points(&mut rng, m, d);
        let lb = wcd(&x, &y, None).unwrap();
        let (exact, plan) = wmd(&x, &y, None).unwrap();
        assert!(lb <= exact + 1e-9, "{lb} > {exact}");
        assert!(plan.marginal_error() <= 1e-9);
    }
}

#[test]
fn align_examples() {
    let n = 4;
    let flows: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 / n as f64 } else { 0.0 }).collect())
        .collect();
    let plan = TransportPlan::from_flows(flows, Marginals::uniform(n, n)).unwrap();
    let xs = TokenizedSentence::from_tokens((0..n).map(|i| format!("a{i}")).collect());
    let ys = TokenizedSentence::from_tokens((0..n).map(|i| format!("b{i}")).collect());
    let pairs = align_from_plan(&plan, &xs, &ys, 0.25).unwrap();
    assert_eq!(pairs.len(), n);
    assert!(pairs.iter().enumerate().all(|(i, (a, b))| *a == format!("a{i}") && *b == format!("b{i}")));

    let uniform = TransportPlan::from_flows(vec![vec![0.25; 2]; 2], Marginals::uniform(2, 2)).unwrap();
    let two = TokenizedSentence::from_tokens(vec!["p".into(), "q".into()]);
    assert!(align_from_plan(&uniform, &two, &two, 1.0).unwrap().is_empty());
    // tie goes to the lowest column
    assert_eq!(align_indices(&uniform, 0.0), vec![(0, 0), (1, 0)]);

    assert!(align_from_plan(&plan, &two, &two, 0.0).is_err());
}

#[test]
fn plan_tsv_lists_nonzero_flows() {
    let x = pts(&[&[0.0, 0.0], &[2.0, 0.0]]);
    let y = pts(&[&[1.0, 0.0], &[3.0, 0.0]]);
    let (_, plan) = wmd(&x, &y, None).unwrap();
    assert_eq!(plan.to_tsv(), "0\t0\t0.5\n1\t1\t0.5\n");
}

#[test]
fn entropic_solver_approaches_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let x = random_points(&mut rng, 5, 4);
    let y = random_points(&mut rng, 7, 4);
    let (exact, _) = wmd(&x, &y, None).unwrap();
    let (approx, plan) = wmd_with_solver(
        &x,
        &y,
        None,
        Solver::Entropic {
            regularization: 0.005,
            iterations: 2000,
        },
    )
    .unwrap();
    assert!(approx >= exact - 1e-9);
    assert!(approx - exact < 0.05, "{approx} vs {exact}");
    assert!(plan.marginal_error() < 1e-6);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn wmd_is_symmetric(seed in any::<u64>(), n in 1usize..8, m in 1usize..8, d in 1usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_points(&mut rng, n, d);
        let y = random_points(&mut rng, m, d);
        let mg = Marginals { source: random_marginal(&mut rng, n), target: random_marginal(&mut rng, m) };
        let (ab, _) = wmd(&x, &y, Some(&mg)).unwrap();
        let (ba, _) = wmd(&y, &x, Some(&mg.swapped())).unwrap();
        prop_assert!((ab - ba).abs() <= 1e-9);
    }

    #[test]
    fn wmd_and_wcd_are_scale_equivariant(seed in any::<u64>(), n in 1usize..8, m in 1usize..8, s in 0.01f64..100.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_points(&mut rng, n, 3);
        let y = random_points(&mut rng, m, 3);
        let scale = |v: &Vec<Vec<f64>>| -> Vec<Vec<f64>> { v.iter().map(|p| p.iter().map(|c| c * s).collect()).collect() };
        let (w, _) = wmd(&x, &y, None).unwrap();
        let (ws, _) = wmd(&scale(&x), &scale(&y), None).unwrap();
        prop_assert!((ws - s * w).abs() <= 1e-9 * (s * w).max(1e-300) + 1e-12);
        let c = wcd(&x, &y, None).unwrap();
        let cs = wcd(&scale(&x), &scale(&y), None).unwrap();
        prop_assert!((cs - s * c).abs() <= 1e-9 * (s * c).max(1e-300) + 1e-12);
    }

    #[test]
    fn plans_are_feasible(seed in any::<u64>(), n in 1usize..20, m in 1usize..20) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_points(&mut rng, n, 4);
        let y = random_points(&mut rng, m, 4);
        let mg = Marginals { source: random_marginal(&mut rng, n), target: random_marginal(&mut rng, m) };
        let (_, plan) = wmd(&x, &y, Some(&mg)).unwrap();
        prop_assert!(plan.marginal_error() <= 1e-9);
        for i in 0..n { for j in 0..m { prop_assert!(plan.flow(i, j) >= 0.0); } }
    }
}
