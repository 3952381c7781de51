use markov_iso::families::{
    blocks_h, blocks_merge_check, circulant_lambda2_analytic, gen_random_directed, gen_random_reversible,
    PartitionBlocks,
};
use markov_iso::isoperimetry::{phi_p_exact, phi_p_of_set, sweep_cut};
use markov_iso::spectral::{
    lambda2_directed, lambda2_reversible, normalized_laplacian, symmetric_eigensolve, truncated_eigenvector,
    truncated_rayleigh,
};
use markov_iso::{BoundReport, MarkovChain, HALF_MASS_SLACK};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_symmetric(n: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
    (&a + a.transpose()) * 0.5
}

fn reversible() -> impl Strategy<Value = MarkovChain> {
    (3usize..=9, 0.0f64..=1.0, any::<u64>()).prop_map(|(n, d, s)| gen_random_reversible(n, d, s).unwrap())
}

fn directed() -> impl Strategy<Value = MarkovChain> {
    (3usize..=8, 0.0f64..=1.0, any::<u64>()).prop_map(|(n, d, s)| gen_random_directed(n, d, s).unwrap())
}

/// Every set of `π`-mass at most 1/2, by brute force.
fn admissible_sets(c: &MarkovChain) -> Vec<Vec<usize>> {
    let n = c.n();
    (1u32..(1 << n))
        .map(|mask| (0..n).filter(|&v| mask >> v & 1 == 1).collect::<Vec<_>>())
        .filter(|s| s.iter().map(|&v| c.stationary()[v]).sum::<f64>() <= 0.5 + HALF_MASS_SLACK)
        .collect()
}

fn jacobi_matches_oracle(m: &DMatrix<f64>) {
    let n = m.nrows();
    let ours = symmetric_eigensolve(m).unwrap();
    let mut oracle: Vec<f64> = nalgebra::SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().collect();
    oracle.sort_by(f64::total_cmp);
    let scale = m.norm().max(1.0);
    for (a, b) in ours.values.iter().zip(&oracle) {
        assert!((a - b).abs() <= 1e-10 * scale, "eigenvalue {a} vs {b}");
    }
    let v = &ours.vectors;
    let lambda = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(ours.values.clone()));
    let recon = v * lambda * v.transpose();
    assert!((recon - m).amax() <= 1e-10 * scale);
    assert!((v.transpose() * v - DMatrix::identity(n, n)).amax() <= 1e-10);
}

#[test]
fn jacobi_large_matrices() {
    for (n, seed) in [(64, 1), (128, 2), (256, 3)] {
        jacobi_matches_oracle(&random_symmetric(n, seed));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn jacobi_small_matrices(n in 1usize..=24, seed in any::<u64>()) {
        jacobi_matches_oracle(&random_symmetric(n, seed));
    }

    #[test]
    fn stationary_is_fixed_point(c in directed()) {
        let pi = c.stationary();
        prop_assert!((pi.sum() - 1.0).abs() <= 1e-12);
        prop_assert!(pi.iter().all(|&x| x > 0.0));
        let moved = pi.transpose() * c.transition();
        prop_assert!((moved.transpose() - pi).amax() <= 1e-10);
    }

    #[test]
    fn exact_matches_brute_force(c in reversible(), p in prop::sample::select(vec![0.0, 0.5, 0.75, 1.0])) {
        let exact = phi_p_exact(&c, p).unwrap();
        let brute = admissible_sets(&c)
            .iter()
            .map(|s| phi_p_of_set(&c, s, p).unwrap().phi)
            .fold(f64::INFINITY, f64::min);
        prop_assert!((exact.phi - brute).abs() <= 1e-12);
        let again = phi_p_of_set(&c, &exact.subset, p).unwrap();
        prop_assert!((again.phi - exact.phi).abs() <= 1e-15);
    }

    #[test]
    fn phi_decreases_in_p(c in reversible()) {
        let ps = [0.0, 0.25, 0.5, 0.75, 1.0];
        for s in admissible_sets(&c) {
            let vals: Vec<f64> = ps.iter().map(|&p| phi_p_of_set(&c, &s, p).unwrap().phi).collect();
            for w in vals.windows(2) {
                prop_assert!(w[1] <= w[0] + 1e-12);
            }
            // Jensen: φ_p(S) ≤ φ₁(S)^p, in particular φ_{1/2}(S) ≤ √φ₁(S)
            for (&p, &v) in ps.iter().zip(&vals) {
                prop_assert!(v <= vals[4].powf(p) + 1e-12);
            }
        }
    }

    #[test]
    fn lazy_scaling(c in reversible(), delta in 0.05f64..=1.0) {
        let lazy = c.lazy_transform(delta).unwrap();
        for p in [0.5, 0.75, 1.0] {
            for s in admissible_sets(&c).iter().take(40) {
                let base = phi_p_of_set(&c, s, p).unwrap().phi;
                let scaled = phi_p_of_set(&lazy, s, p).unwrap().phi;
                prop_assert!((scaled - delta.powf(p) * base).abs() <= 1e-12);
            }
        }
        let l = lambda2_reversible(&c).unwrap().lambda2;
        let ll = lambda2_reversible(&lazy).unwrap().lambda2;
        prop_assert!((ll - delta * l).abs() <= 1e-9);
    }

    #[test]
    fn sweep_is_admissible_and_above_exact(c in reversible(), p in prop::sample::select(vec![0.6, 0.75, 1.0])) {
        let cert = lambda2_reversible(&c).unwrap();
        let cut = sweep_cut(&c, p, &cert).unwrap();
        prop_assert!(cut.pi_mass <= 0.5 + HALF_MASS_SLACK);
        prop_assert!(cut.phi >= phi_p_exact(&c, p).unwrap().phi - 1e-12);
        prop_assert!(cut.phi <= 2.0 * (cert.lambda2 / (2.0 * p - 1.0)).sqrt() + 1e-8);
    }

    #[test]
    fn truncated_vector_certificate(c in reversible()) {
        let cert = lambda2_reversible(&c).unwrap();
        let f = truncated_eigenvector(&cert, &c).unwrap();
        prop_assert!(f.iter().all(|&x| x >= 0.0));
        prop_assert!((f.iter().cloned().fold(0.0, f64::max) - 1.0).abs() <= 1e-15);
        let support: f64 = (0..c.n()).filter(|&v| f[v] > 0.0).map(|v| c.stationary()[v]).sum();
        prop_assert!(support <= 0.5 + HALF_MASS_SLACK);
        // the Rayleigh quotient of the truncated vector stays below λ₂
        prop_assert!(truncated_rayleigh(&c, &f).unwrap() <= cert.lambda2 + 1e-9);
    }

    #[test]
    fn eigenvalues_of_laplacian_in_range(c in reversible()) {
        let eig = symmetric_eigensolve(&normalized_laplacian(&c)).unwrap();
        prop_assert!(eig.values[0].abs() <= 1e-10);
        prop_assert!(eig.values.iter().all(|&x| x > -1e-10 && x < 2.0 + 1e-10));
    }

    #[test]
    fn directed_laplacian_agrees_on_reversible(c in reversible()) {
        let a = lambda2_reversible(&c).unwrap().lambda2;
        let b = lambda2_directed(&c).unwrap().lambda2;
        prop_assert!((a - b).abs() <= 1e-8);
    }

    #[test]
    fn circulant_analytic_matches_dense(weights in prop::collection::vec(0.0f64..1.0, 1..12)) {
        // symmetric circulant Laplacian built from half a row of weights
        let half = weights.len();
        let n = 2 * half + 1;
        let mut row = vec![0.0; n];
        for (d, &w) in weights.iter().enumerate() {
            row[d + 1] = -w;
            row[n - d - 1] = -w;
        }
        row[0] = -row[1..].iter().sum::<f64>();
        let m = DMatrix::from_fn(n, n, |i, j| row[(j + n - i) % n]);
        let dense = symmetric_eigensolve(&m).unwrap().values[1];
        prop_assert!((dense - circulant_lambda2_analytic(&row).unwrap()).abs() <= 1e-10);
    }

    #[test]
    fn block_function_rotation_invariant(sizes in prop::collection::vec(1usize..6, 1..5), shift in 0usize..10) {
        let mut sizes: Vec<usize> = sizes.iter().flat_map(|&a| [a, a % 3 + 1]).collect();
        let h = blocks_h(&PartitionBlocks::new(sizes.clone()).unwrap());
        let k = sizes.len() / 2;
        sizes.rotate_left(2 * (shift % k));
        let rotated = blocks_h(&PartitionBlocks::new(sizes).unwrap());
        prop_assert!((h - rotated).abs() <= 1e-12);
    }

    #[test]
    fn merge_identity(sizes in prop::collection::vec(1usize..8, 3..8), zero_at in 0usize..8) {
        let mut sizes = sizes;
        if sizes.len() % 2 == 1 {
            sizes.push(1);
        }
        let z = zero_at % sizes.len();
        sizes[z] = 0;
        let pb = PartitionBlocks::new(sizes).unwrap();
        prop_assert!(blocks_merge_check(&pb).unwrap() <= 1e-12);
    }

    #[test]
    fn report_floats_round_trip(x in prop::num::f64::NORMAL | prop::num::f64::SUBNORMAL, y in prop::num::f64::NORMAL) {
        let r = BoundReport::new("x", x / 4.0, y / 4.0, 1e-9);
        let text = serde_json::to_string(&r).unwrap();
        let back: BoundReport = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back.lhs.to_bits(), r.lhs.to_bits());
        prop_assert_eq!(back.rhs.to_bits(), r.rhs.to_bits());
        prop_assert_eq!(back.slack.to_bits(), r.slack.to_bits());
    }
}
