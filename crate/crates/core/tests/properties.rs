use num_rational::Ratio;
use proptest::prelude::*;

use seqfront_core::compression::{
    achieved_bits, local_objective, mutual_info_scalar, pca_transform, reverse_waterfill, solve_ec,
    solve_ec_equal_bits, solve_pca_ec, solve_vc, TestChannel,
};
use seqfront_core::estimation::{
    batch_ls_oracle, random_symbols, rls_sequential, rls_trace, sum_se_exact, sum_se_upper,
    synthesize_observations, uncompressed_models, ApModel, NoiseBlock,
};
use seqfront_core::linalg::{hermitian_eigen, identity_plus, rel_frobenius, CMatrix};
use seqfront_core::resources::{
    bits_per_vector, build_topology, fronthaul_rate_bound, stored_vectors, BitBudget, MemoryModel,
    MemoryScheme, ResourcePlan, TopologyKind,
};
use seqfront_core::rng::{complex_gaussian_matrix, rng_from_seed};

fn channel(seed: u64, n: usize, k: usize) -> CMatrix {
    complex_gaussian_matrix(&mut rng_from_seed(seed), n, k, 1.0)
}

fn correlated_models(seed: u64, l: usize, n: usize, k: usize) -> Vec<ApModel> {
    let mut rng = rng_from_seed(seed);
    (0..l)
        .map(|_| {
            let h = complex_gaussian_matrix(&mut rng, n, k, 1.0);
            let b = complex_gaussian_matrix(&mut rng, n, n, 0.4);
            let z = identity_plus(&(&b * b.adjoint()), 0.3);
            ApModel::new(h, NoiseBlock::Covariance(z)).unwrap()
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn waterfill_spends_the_budget(
        eigs in prop::collection::vec(1.0f64..1e4, 1..6),
        budget in 0.0f64..60.0,
    ) {
        let wf = reverse_waterfill(&eigs, 1.0, budget).unwrap();
        prop_assert!((wf.total_bits() - budget).abs() <= 1e-6);
        prop_assert!(wf.mode_bits.iter().all(|&b| b >= 0.0));
    }

    #[test]
    fn more_budget_never_shrinks_a_mode(
        eigs in prop::collection::vec(1.5f64..1e3, 1..6),
        budget in 0.0f64..30.0,
        extra in 0.01f64..10.0,
    ) {
        let a = reverse_waterfill(&eigs, 1.0, budget).unwrap();
        let b = reverse_waterfill(&eigs, 1.0, budget + extra).unwrap();
        prop_assert!(b.ln_mu < a.ln_mu);
        for (x, y) in a.noise_inverse.iter().zip(&b.noise_inverse) {
            prop_assert!(*y >= *x * (1.0 - 1e-9));
        }
    }

    #[test]
    fn solvers_hit_the_budget(seed: u64, n in 1usize..6, k in 1usize..6, budget in 0.0f64..40.0) {
        let h = channel(seed, n, k);
        for sol in [solve_vc(&h, 1.0, 0.5, budget).unwrap(), solve_ec(&h, 1.0, 0.5, budget).unwrap()] {
            prop_assert!((achieved_bits(&sol, &h, 1.0, 0.5) - budget).abs() <= 1e-6);
        }
    }

    #[test]
    fn pca_and_vc_allocate_identically(seed: u64, n in 1usize..6, k in 1usize..6, budget in 0.0f64..40.0) {
        let h = channel(seed, n, k);
        let vc = solve_vc(&h, 1.0, 0.5, budget).unwrap();
        let pca = solve_pca_ec(&pca_transform(&h, 1.0, 0.5), 0.5, budget).unwrap();
        let mut a: Vec<f64> = vc.noise_inverse.iter().copied().filter(|&x| x > 0.0).collect();
        let mut b: Vec<f64> = pca.noise_inverse.iter().copied().filter(|&x| x > 0.0).collect();
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        prop_assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() <= 1e-10 * x.abs().max(1.0));
        }
    }

    #[test]
    fn optimised_elements_beat_equal_bits(seed: u64, n in 1usize..6, k in 1usize..6, budget in 0.0f64..40.0) {
        let h = channel(seed, n, k);
        let opt = local_objective(&solve_ec(&h, 1.0, 0.5, budget).unwrap(), &h, 1.0).unwrap();
        let eq = local_objective(&solve_ec_equal_bits(&h, 1.0, 0.5, budget).unwrap(), &h, 1.0).unwrap();
        prop_assert!(opt >= eq - 1e-9);
    }

    #[test]
    fn additive_channel_dominates(q in 1e-6f64..1e6) {
        let a = mutual_info_scalar(q, TestChannel::Additive).unwrap();
        let o = mutual_info_scalar(q, TestChannel::Optimal).unwrap();
        prop_assert!(a > o);
    }

    #[test]
    fn rls_matches_batch(seed: u64, l in 1usize..=8, n in 1usize..=4, k in 1usize..=6, p in 0.1f64..10.0) {
        let models = correlated_models(seed, l, n, k);
        let s = random_symbols(&mut rng_from_seed(seed ^ 1), k, p);
        let ys = synthesize_observations(&models, &s, seed ^ 2).unwrap();
        let a = rls_sequential(&models, &ys, p).unwrap();
        let b = batch_ls_oracle(&models, &ys, p).unwrap();
        prop_assert!((&a.signal - &b.signal).norm() <= 1e-9 * b.signal.norm().max(1e-300));
        prop_assert!(rel_frobenius(&a.error_covariance, &b.error_covariance) <= 1e-9);
    }

    #[test]
    fn each_ap_shrinks_the_error(seed: u64, l in 1usize..=8, n in 1usize..=4, k in 1usize..=6) {
        let models = correlated_models(seed, l, n, k);
        let s = random_symbols(&mut rng_from_seed(seed ^ 1), k, 1.0);
        let ys = synthesize_observations(&models, &s, seed ^ 2).unwrap();
        let trace = rls_trace(&models, &ys, 1.0).unwrap();
        for w in trace.windows(2) {
            let (eigs, _) = hermitian_eigen(&(&w[0].gamma - &w[1].gamma));
            prop_assert!(eigs.iter().all(|&e| e >= -1e-10));
        }
    }

    #[test]
    fn per_ap_sum_bounds_network_se(seed: u64, l in 1usize..=6, n in 1usize..=4, k in 1usize..=6) {
        let models = correlated_models(seed, l, n, k);
        let exact = sum_se_exact(&models, 1.0, 1.0).unwrap();
        let upper = sum_se_upper(&models, 1.0, 1.0).unwrap();
        prop_assert!(upper - exact >= -1e-10 * exact.max(1.0));
    }

    #[test]
    fn compression_costs_se(seed: u64, l in 1usize..=6, n in 1usize..=4, k in 1usize..=6, budget in 0.0f64..30.0) {
        let mut rng = rng_from_seed(seed);
        let blocks: Vec<CMatrix> = (0..l).map(|_| complex_gaussian_matrix(&mut rng, n, k, 1.0)).collect();
        let full = sum_se_exact(&uncompressed_models(&blocks, &vec![0.5; l]), 1.0, 1.0).unwrap();
        let compressed: Vec<ApModel> = blocks
            .iter()
            .map(|h| ApModel::from_solution(h, &solve_vc(h, 1.0, 0.5, budget).unwrap()))
            .collect();
        prop_assert!(sum_se_exact(&compressed, 1.0, 1.0).unwrap() <= full + 1e-9);
    }

    #[test]
    fn linear_total_memory_is_conserved(l in 2usize..300, nsc in 1u64..5000, kb in 1u64..100_000) {
        let plan = ResourcePlan::new(
            TopologyKind::DaisyChain,
            l,
            MemoryModel::new(MemoryScheme::FixedTotalLinear, kb * 8192).unwrap(),
            nsc,
        )
        .unwrap();
        prop_assert_eq!(plan.allocated_bits(), Some(Ratio::from_integer(u128::from(kb * 8192))));
    }

    #[test]
    fn equal_total_memory_leaves_the_first_share_unused(
        l_chain in 1usize..300,
        l_exp in 0u32..9,
        tree: bool,
        nsc in 1u64..5000,
        kb in 1u64..100_000,
    ) {
        let (kind, l) = if tree {
            (TopologyKind::BinaryFanInTree, 1usize << l_exp)
        } else {
            (TopologyKind::DaisyChain, l_chain)
        };
        let plan = ResourcePlan::new(
            kind,
            l,
            MemoryModel::new(MemoryScheme::FixedTotalEqual, kb * 8192).unwrap(),
            nsc,
        )
        .unwrap();
        let levels_one = plan.topology.levels.iter().filter(|&&v| v == 1).count() as u128;
        let cap = u128::from(kb * 8192);
        let expected = Ratio::new(cap * (l as u128 - levels_one), l as u128);
        prop_assert_eq!(plan.allocated_bits(), Some(expected));
    }

    #[test]
    fn fixed_per_ap_budget_falls_along_the_chain(l in 3usize..300, nsc in 1u64..5000) {
        let topo = build_topology(TopologyKind::DaisyChain, l).unwrap();
        let bits = bits_per_vector(&MemoryModel::fap("64KB").unwrap(), &topo, nsc).unwrap();
        for w in bits[1..].windows(2) {
            match (w[0], w[1]) {
                (BitBudget::Finite(a), BitBudget::Finite(b)) => prop_assert!(b < a),
                other => prop_assert!(false, "unexpected budgets {:?}", other),
            }
        }
    }

    #[test]
    fn trees_store_less_than_chains(exp in 2u32..12, nsc in 1u64..64) {
        let l = 1usize << exp;
        let tree = build_topology(TopologyKind::BinaryFanInTree, l).unwrap();
        let chain = build_topology(TopologyKind::DaisyChain, l).unwrap();
        prop_assert_eq!(tree.depth(), exp + 1);
        let total = |t| stored_vectors(t, nsc).iter().sum::<u64>();
        prop_assert!(total(&tree) < total(&chain));
    }

    #[test]
    fn rate_stays_below_bound(
        rho in 0u64..64,
        gammas in prop::collection::vec(0u64..64, 1..8),
        k in 1u64..128,
        nsc in 1u64..8192,
        ts_num in 1u128..1000,
    ) {
        let sum: u64 = gammas.iter().sum();
        let max = *gammas.iter().max().unwrap();
        prop_assume!(sum > max);
        let r = fronthaul_rate_bound(k, nsc, rho, &gammas, Ratio::new(ts_num, 1_000_000)).unwrap();
        prop_assert!(r.rate <= r.upper_bound);
    }
}
