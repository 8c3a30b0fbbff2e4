//! Pick-matrix monotonicity, Gram factorization round trips, and the
//! Schur-product comparison between kernel quotients and multiplier
//! norms.

mod common;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use uikernels::kernel::{KernelFamily, KernelSpec};
use uikernels::linalg;
use uikernels::pick::{
    gram_factor, is_psd, kernel_quotient_gram, pick_matrix, sampled_multiplier_norm, PickProblem,
};
use uikernels::sampling::ball_grid;
use uikernels::{CMatrix, C64};

fn hardy() -> KernelSpec {
    KernelSpec::new(KernelFamily::Hardy, 1).unwrap()
}

fn bergman() -> KernelSpec {
    KernelSpec::new(KernelFamily::BergmanDisc, 1).unwrap()
}

/// Removing nodes never turns a feasible problem infeasible, so adding
/// nodes never repairs an infeasible one (principal submatrices).
#[test]
fn node_monotonicity_on_random_nestings() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for trial in 0..20 {
        let n = 3 + (trial % 3);
        let points = ball_grid(1, n, 0.8, 500 + trial as u64);
        let targets: Vec<CMatrix> = (0..n)
            .map(|_| {
                CMatrix::from_element(
                    1,
                    1,
                    C64::new(1.4 * (rng.random::<f64>() - 0.5), rng.random::<f64>() - 0.5),
                )
            })
            .collect();
        let full = PickProblem::new(1, points.clone(), 1, targets.clone()).unwrap();
        let full_matrix = pick_matrix(&full, &hardy(), 500).unwrap();
        let full_psd = is_psd(&full_matrix, 1e-10).unwrap().psd;
        // Every leading subset.
        for k in 1..n {
            let sub = PickProblem::new(1, points[..k].to_vec(), 1, targets[..k].to_vec()).unwrap();
            let sub_matrix = pick_matrix(&sub, &hardy(), 500).unwrap();
            let sub_psd = is_psd(&sub_matrix, 1e-10).unwrap().psd;
            if !sub_psd {
                assert!(
                    !full_psd,
                    "trial {}: adding nodes repaired infeasibility",
                    trial
                );
            }
        }
    }
}

#[test]
fn gram_factor_round_trip_up_to_200() {
    let mut rng = ChaCha8Rng::seed_from_u64(4242);
    for &n in &[5usize, 40, 200] {
        // Random psd matrix of rank ~ n/2.
        let rank = (n / 2).max(1);
        let b = CMatrix::from_fn(n, rank, |_, _| {
            C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        });
        let gram = &b * b.adjoint();
        let f = gram_factor(&gram, 1e-12).unwrap();
        let scale = linalg::spectral_norm(&gram);
        assert!(
            f.residual <= 1e-10 * scale.max(1.0),
            "n = {}: residual {} at scale {}",
            n,
            f.residual,
            scale
        );
        assert!(f.rank <= rank);
    }
}

/// Positive kernel quotient implies the multiplier-norm comparison on
/// samples (the Schur-product direction of the equivalence).
#[test]
fn quotient_psd_implies_norm_comparison() {
    let points = ball_grid(1, 12, 0.72, 31);
    let (_, verdict) = kernel_quotient_gram(&bergman(), &hardy(), &points, 700, 1e-10).unwrap();
    assert!(verdict.psd);
    // For each test polynomial, Mult(hardy) -> Mult(bergman) is
    // contractive on the sample.
    let polys: Vec<Box<dyn Fn(C64) -> C64>> = vec![
        Box::new(|z| z),
        Box::new(|z| z * z),
        Box::new(|z| C64::new(0.3, 0.0) + z * C64::new(0.5, 0.2)),
    ];
    for phi in &polys {
        let values: Vec<C64> = points.iter().map(|p| phi(p[0])).collect();
        let t_hardy = sampled_multiplier_norm(&values, &hardy(), &points, 700)
            .unwrap()
            .t;
        let t_bergman = sampled_multiplier_norm(&values, &bergman(), &points, 700)
            .unwrap()
            .t;
        assert!(
            t_bergman <= t_hardy + 1e-8,
            "bergman bound {} exceeds hardy bound {}",
            t_bergman,
            t_hardy
        );
    }
}

/// The scalar two-node threshold matches the pseudo-hyperbolic distance
/// oracle |(z1 - z2)/(1 - z1 conj(z2))| for the Hardy kernel.
#[test]
fn two_node_threshold_matches_pseudo_hyperbolic_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    for _ in 0..10 {
        let z1 = C64::new(
            0.8 * (rng.random::<f64>() - 0.5),
            0.8 * (rng.random::<f64>() - 0.5),
        );
        let z2 = C64::new(
            0.8 * (rng.random::<f64>() - 0.5),
            0.8 * (rng.random::<f64>() - 0.5),
        );
        if (z1 - z2).norm() < 1e-3 {
            continue;
        }
        let rho = ((z1 - z2) / (C64::new(1.0, 0.0) - z1 * z2.conj())).norm();
        let problem = PickProblem::new(
            1,
            vec![vec![z1], vec![z2]],
            1,
            vec![
                CMatrix::zeros(1, 1),
                CMatrix::from_element(1, 1, C64::new(1.0, 0.0)),
            ],
        )
        .unwrap();
        let threshold =
            uikernels::pick::feasibility_threshold(&problem, &hardy(), 900, 1.0, 1e-9, 1e-12)
                .unwrap();
        assert!(
            (threshold - rho).abs() < 1e-6,
            "threshold {} vs oracle {}",
            threshold,
            rho
        );
    }
}
