//! Numerical self-checks run by `seqfront check`.

use std::fmt;

use rand::Rng as _;
use seqfront_core::compression::{achieved_bits, pca_transform, solve_ec, solve_pca_ec, solve_vc};
use seqfront_core::estimation::{
    batch_ls_oracle, random_symbols, rls_sequential, sum_se_exact, sum_se_stacked, sum_se_upper,
    synthesize_observations, ApModel, NoiseBlock,
};
use seqfront_core::linalg::{identity_plus, log2_abs_det, rel_frobenius, CMatrix};
use seqfront_core::rng::{complex_gaussian_matrix, derive, rng_from_seed, SimRng};

#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "[{tag}] {:<22} {}", self.name, self.detail)
    }
}

fn dims(rng: &mut SimRng, max_l: usize, max_n: usize, max_k: usize) -> (usize, usize, usize) {
    (
        rng.random_range(1..=max_l),
        rng.random_range(1..=max_n),
        rng.random_range(1..=max_k),
    )
}

/// Random APs with full noise covariances `0.2 (I + B Bᴴ)`.
fn random_models(rng: &mut SimRng, l: usize, n: usize, k: usize) -> Vec<ApModel> {
    (0..l)
        .map(|_| {
            let h = complex_gaussian_matrix(rng, n, k, 1.0);
            let b = complex_gaussian_matrix(rng, n, n, 0.5);
            let z = identity_plus(&(&b * b.adjoint()), 1.0).map(|v| v * 0.2);
            ApModel::new(h, NoiseBlock::Covariance(z)).expect("shapes agree")
        })
        .collect()
}

pub fn rls_batch(instances: usize, seed: u64) -> CheckResult {
    let mut rng = rng_from_seed(seed);
    let mut worst = 0.0_f64;
    for i in 0..instances {
        let (l, n, k) = dims(&mut rng, 8, 4, 6);
        let models = random_models(&mut rng, l, n, k);
        let p = rng.random_range(0.1..10.0);
        let s = random_symbols(&mut rng, k, p);
        let ys =
            synthesize_observations(&models, &s, derive(seed, i as u64)).expect("valid blocks");
        let a = rls_sequential(&models, &ys, p).expect("valid blocks");
        let b = batch_ls_oracle(&models, &ys, p).expect("valid blocks");
        let es = (&a.signal - &b.signal).norm() / b.signal.norm().max(f64::MIN_POSITIVE);
        let eg = rel_frobenius(&a.error_covariance, &b.error_covariance);
        worst = worst.max(es).max(eg);
    }
    CheckResult {
        name: "rls_equals_batch",
        passed: worst <= 1e-9,
        detail: format!("{instances} instances, worst relative error {worst:.2e}"),
    }
}

pub fn waterfill(instances: usize, seed: u64) -> CheckResult {
    let mut rng = rng_from_seed(seed);
    let mut worst = 0.0_f64;
    for _ in 0..instances {
        let (n, k) = (rng.random_range(1..=6), rng.random_range(1..=6));
        let h = complex_gaussian_matrix(&mut rng, n, k, 1.0);
        let budget = rng.random_range(0.0..40.0);
        for sol in [
            solve_vc(&h, 1.0, 0.5, budget),
            solve_ec(&h, 1.0, 0.5, budget),
        ] {
            let sol = sol.expect("random channels carry signal");
            let direct = achieved_bits(&sol, &h, 1.0, 0.5);
            worst = worst
                .max((direct - budget).abs())
                .max((sol.achieved_bits - budget).abs());
        }
    }
    CheckResult {
        name: "waterfill_constraint",
        passed: worst <= 1e-6,
        detail: format!("{instances} channels, worst bit error {worst:.2e}"),
    }
}

pub fn sylvester(instances: usize, seed: u64) -> CheckResult {
    let mut rng = rng_from_seed(seed);
    let mut worst = 0.0_f64;
    for _ in 0..instances {
        let (a_rows, a_cols) = (rng.random_range(1..=8), rng.random_range(1..=8));
        let a = complex_gaussian_matrix(&mut rng, a_rows, a_cols, 1.0);
        let b = complex_gaussian_matrix(&mut rng, a_cols, a_rows, 1.0);
        let d1 = log2_abs_det(&identity_plus(&(&a * &b), 1.0));
        let d2 = log2_abs_det(&identity_plus(&(&b * &a), 1.0));
        worst = worst.max((d1 - d2).abs() / d1.abs().max(1.0));
        let (l, n, k) = dims(&mut rng, 4, 4, 6);
        let models = random_models(&mut rng, l, n, k);
        let small = sum_se_exact(&models, 1.0, 1.0).expect("positive definite");
        let stacked = sum_se_stacked(&models, 1.0, 1.0).expect("positive definite");
        worst = worst.max((small - stacked).abs() / small.abs().max(1.0));
    }
    CheckResult {
        name: "sylvester_identity",
        passed: worst <= 1e-10,
        detail: format!("{instances} pairs and SE forms, worst relative gap {worst:.2e}"),
    }
}

pub fn hadamard(instances: usize, seed: u64) -> CheckResult {
    let mut rng = rng_from_seed(seed);
    let mut worst = f64::INFINITY;
    for _ in 0..instances {
        let (l, n, k) = dims(&mut rng, 8, 4, 6);
        let models = random_models(&mut rng, l, n, k);
        let exact = sum_se_exact(&models, 1.0, 1.0).expect("positive definite");
        let upper = sum_se_upper(&models, 1.0, 1.0).expect("positive definite");
        worst = worst.min((upper - exact) / exact.abs().max(1.0));
    }
    CheckResult {
        name: "hadamard_bound",
        passed: worst >= -1e-10,
        detail: format!("{instances} instances, smallest relative slack {worst:.2e}"),
    }
}

pub fn pca_vc(instances: usize, seed: u64) -> CheckResult {
    let mut rng = rng_from_seed(seed);
    let mut worst = 0.0_f64;
    for _ in 0..instances {
        let (l, n, k) = dims(&mut rng, 6, 6, 6);
        let blocks: Vec<CMatrix> = (0..l)
            .map(|_| complex_gaussian_matrix(&mut rng, n, k, 1.0))
            .collect();
        let budgets: Vec<f64> = (0..l).map(|_| rng.random_range(0.0..30.0)).collect();
        let vc: Vec<ApModel> = blocks
            .iter()
            .zip(&budgets)
            .map(|(h, &c)| {
                ApModel::from_solution(h, &solve_vc(h, 1.0, 0.3, c).expect("signal present"))
            })
            .collect();
        let pca: Vec<ApModel> = blocks
            .iter()
            .zip(&budgets)
            .map(|(h, &c)| {
                let sol =
                    solve_pca_ec(&pca_transform(h, 1.0, 0.3), 0.3, c).expect("signal present");
                ApModel::from_solution(h, &sol)
            })
            .collect();
        let a = sum_se_exact(&vc, 1.0, 1.0).expect("valid");
        let b = sum_se_exact(&pca, 1.0, 1.0).expect("valid");
        if a > 0.0 {
            worst = worst.max((a - b).abs() / a);
        } else {
            worst = worst.max(b.abs());
        }
    }
    CheckResult {
        name: "pca_equals_vc",
        passed: worst <= 1e-9,
        detail: format!("{instances} networks, worst relative gap {worst:.2e}"),
    }
}

/// Runs every check with `instances` random cases each.
pub fn run_checks(instances: usize, seed: u64) -> Vec<CheckResult> {
    vec![
        rls_batch(instances, derive(seed, 1)),
        waterfill(instances, derive(seed, 2)),
        sylvester(instances, derive(seed, 3)),
        hadamard(instances, derive(seed, 4)),
        pca_vc(instances, derive(seed, 5)),
    ]
}
