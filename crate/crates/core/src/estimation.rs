//! Sequential (RLS) estimation of the users' signals along the fronthaul and
//! the log-det spectral-efficiency metrics.
//!
//! Each AP contributes an [`ApModel`]: the channel of its stored vector and
//! the covariance of everything that is not signal (receiver noise plus
//! compression noise). The RLS recursion absorbs APs in fronthaul order and,
//! once every AP has been absorbed, coincides with the regularised batch
//! least-squares estimate over the stacked network.
//!
//! All updates run on a whitened observation `W ŷ_l` with `Wᴴ W = Z_l⁻¹`.
//! This keeps APs whose compression discards some or all modes usable: the
//! whitener simply has fewer rows.

use alloc::vec::Vec;

use nalgebra::DVector;
use rand::Rng;

use crate::compression::{CompressionOption, CompressionSolution};
use crate::error::{Error, Result};
use crate::linalg::{
    block_diag, checked_cholesky, cholesky_lower, hermitian_eigen, hermitian_part, hpd_inverse,
    identity_plus, log2_abs_det, log2_det_hpd, real, vstack, CMatrix, CVector, Complex64,
};
use crate::rng::{complex_gaussian, rng_from_seed};

/// Eigenvalues below this fraction of the largest are treated as zero when a
/// precision matrix is factored.
const RANK_TOLERANCE: f64 = 1e-14;

/// Non-signal covariance of one AP's stored vector.
#[derive(Debug, Clone, PartialEq)]
pub enum NoiseBlock {
    /// Positive definite covariance `Z_l`.
    Covariance(CMatrix),
    /// Positive semi-definite precision `Z_l⁻¹`. Null directions carry no
    /// information.
    Precision(CMatrix),
    /// The AP stores nothing useful; `Z_l⁻¹ = 0`.
    Discarded { dim: usize },
}

impl NoiseBlock {
    pub fn dim(&self) -> usize {
        match self {
            NoiseBlock::Covariance(z) | NoiseBlock::Precision(z) => z.nrows(),
            NoiseBlock::Discarded { dim } => *dim,
        }
    }

    /// `Z_l⁻¹`.
    pub fn precision(&self, ap: usize) -> Result<CMatrix> {
        match self {
            NoiseBlock::Covariance(z) => hpd_inverse(z).ok_or(Error::SingularNoise { ap }),
            NoiseBlock::Precision(p) => Ok(p.clone()),
            NoiseBlock::Discarded { dim } => Ok(CMatrix::zeros(*dim, *dim)),
        }
    }

    /// Matrix `W` with `Wᴴ W = Z_l⁻¹`, or `None` when the block carries no
    /// information.
    pub fn whitener(&self, ap: usize) -> Result<Option<CMatrix>> {
        match self {
            NoiseBlock::Covariance(z) => {
                let l = cholesky_lower(z).ok_or(Error::SingularNoise { ap })?;
                let n = l.nrows();
                let w = l
                    .solve_lower_triangular(&CMatrix::identity(n, n))
                    .ok_or(Error::SingularNoise { ap })?;
                Ok(Some(w))
            }
            NoiseBlock::Precision(p) => {
                let (vals, vecs) = hermitian_eigen(p);
                let top = vals.first().copied().unwrap_or(0.0);
                if !(top > 0.0) {
                    return Ok(None);
                }
                let keep: Vec<usize> = (0..vals.len())
                    .filter(|&i| vals[i] > RANK_TOLERANCE * top)
                    .collect();
                let mut w = CMatrix::zeros(keep.len(), p.nrows());
                for (r, &i) in keep.iter().enumerate() {
                    let s = libm::sqrt(vals[i]);
                    for c in 0..p.ncols() {
                        w[(r, c)] = vecs[(c, i)].conj() * s;
                    }
                }
                Ok(Some(w))
            }
            NoiseBlock::Discarded { .. } => Ok(None),
        }
    }
}

/// Channel and noise model of the vector one AP stores.
#[derive(Debug, Clone, PartialEq)]
pub struct ApModel {
    /// `N_l × K` (or `x × K` after a PCA map).
    pub channel: CMatrix,
    pub noise: NoiseBlock,
}

impl ApModel {
    pub fn new(channel: CMatrix, noise: NoiseBlock) -> Result<Self> {
        if channel.nrows() != noise.dim() {
            return Err(Error::dim("noise block does not match the channel rows"));
        }
        Ok(Self { channel, noise })
    }

    /// Model of an AP whose vector was compressed by `solution`.
    pub fn from_solution(h: &CMatrix, solution: &CompressionSolution) -> Self {
        let channel = solution.effective_channel(h);
        let dim = channel.nrows();
        let noise = if solution.option != CompressionOption::None
            && solution.noise_inverse.iter().all(|&v| v == 0.0)
        {
            NoiseBlock::Discarded { dim }
        } else {
            NoiseBlock::Precision(solution.noise_precision())
        };
        Self { channel, noise }
    }

    /// `Hᴴ Z⁻¹ H`.
    fn information(&self, ap: usize) -> Result<CMatrix> {
        let pr = self.noise.precision(ap)?;
        Ok(self.channel.adjoint() * pr * &self.channel)
    }
}

fn check_users(models: &[ApModel]) -> Result<usize> {
    let k = models
        .first()
        .map(|m| m.channel.ncols())
        .ok_or_else(|| Error::input("at least one AP is required"))?;
    if models.iter().any(|m| m.channel.ncols() != k) {
        return Err(Error::dim("channel blocks disagree on the number of users"));
    }
    Ok(k)
}

/// State of the recursion after `ap_cursor` APs.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimationState {
    /// Error covariance `Γ_l`, `K × K`.
    pub gamma: CMatrix,
    /// Current estimate `ŝ_l`.
    pub estimate: CVector,
    pub ap_cursor: usize,
}

impl EstimationState {
    /// Prior `Γ_0 = p I`, `ŝ_0 = 0`.
    pub fn new(num_users: usize, p: f64) -> Self {
        Self {
            gamma: CMatrix::identity(num_users, num_users).map(|z| z * p),
            estimate: CVector::zeros(num_users),
            ap_cursor: 0,
        }
    }

    /// Absorbs the next AP's stored vector.
    pub fn absorb(&mut self, model: &ApModel, observation: &CVector) -> Result<()> {
        let ap = self.ap_cursor;
        if model.channel.ncols() != self.estimate.len() {
            return Err(Error::dim("channel block has the wrong number of users"));
        }
        if observation.len() != model.channel.nrows() {
            return Err(Error::dim("observation length does not match the channel"));
        }
        self.ap_cursor += 1;
        let Some(w) = model.noise.whitener(ap)? else {
            return Ok(());
        };
        let g = &w * &model.channel;
        let gamma_gh = &self.gamma * g.adjoint();
        let innovation_cov = identity_plus(&(&g * &gamma_gh), 1.0);
        let chol = checked_cholesky(&innovation_cov).ok_or(Error::SingularNoise { ap })?;
        // Gain Γ Gᴴ S⁻¹, formed as (S⁻¹ G Γ)ᴴ since S and Γ are Hermitian.
        let gain = chol.solve(&gamma_gh.adjoint()).adjoint();
        let residual = &w * observation - &g * &self.estimate;
        self.estimate += &gain * residual;
        let gamma = &self.gamma - &gain * gamma_gh.adjoint();
        self.gamma = hermitian_part(&gamma);
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Estimate {
    pub signal: CVector,
    pub error_covariance: CMatrix,
}

/// Runs the recursion over all APs in order and returns the final state.
pub fn rls_sequential(models: &[ApModel], observations: &[CVector], p: f64) -> Result<Estimate> {
    rls_trace(models, observations, p).map(|states| {
        let last = states.into_iter().last().expect("trace holds the prior");
        Estimate {
            signal: last.estimate,
            error_covariance: last.gamma,
        }
    })
}

/// Every intermediate state, starting with the prior.
pub fn rls_trace(
    models: &[ApModel],
    observations: &[CVector],
    p: f64,
) -> Result<Vec<EstimationState>> {
    let k = check_users(models)?;
    if observations.len() != models.len() {
        return Err(Error::dim("one observation per AP is required"));
    }
    let mut state = EstimationState::new(k, p);
    let mut out = Vec::with_capacity(models.len() + 1);
    out.push(state.clone());
    for (m, y) in models.iter().zip(observations) {
        state.absorb(m, y)?;
        out.push(state.clone());
    }
    Ok(out)
}

/// Regularised least squares over the stacked network:
/// `Γ = (Hᴴ Z⁻¹ H + I/p)⁻¹`, `ŝ = Γ Hᴴ Z⁻¹ ŷ`, with `Z` block diagonal.
pub fn batch_ls_oracle(models: &[ApModel], observations: &[CVector], p: f64) -> Result<Estimate> {
    let k = check_users(models)?;
    if observations.len() != models.len() {
        return Err(Error::dim("one observation per AP is required"));
    }
    let h = vstack(&models.iter().map(|m| m.channel.clone()).collect::<Vec<_>>())?;
    let precisions = models
        .iter()
        .enumerate()
        .map(|(l, m)| m.noise.precision(l))
        .collect::<Result<Vec<_>>>()?;
    let z_inv = block_diag(&precisions);
    let mut y = CVector::zeros(h.nrows());
    let mut off = 0;
    for o in observations {
        y.rows_mut(off, o.len()).copy_from(o);
        off += o.len();
    }
    if off != h.nrows() {
        return Err(Error::dim("observation lengths do not match the channel"));
    }
    let hz = h.adjoint() * z_inv;
    let mut normal = &hz * &h;
    for i in 0..k {
        normal[(i, i)] += real(1.0 / p);
    }
    let gamma = hpd_inverse(&normal).ok_or_else(|| Error::input("normal matrix is singular"))?;
    let signal = &gamma * (hz * y);
    Ok(Estimate {
        signal,
        error_covariance: hermitian_part(&gamma),
    })
}

/// Draws `ŷ_l = H_l s + z_l` with `z_l ~ CN(0, Z_l)`. Directions of a
/// precision block with zero precision get no noise: they are invisible to
/// every estimator.
pub fn synthesize_observations(
    models: &[ApModel],
    signal: &CVector,
    seed: u64,
) -> Result<Vec<CVector>> {
    let mut rng = rng_from_seed(seed);
    models
        .iter()
        .enumerate()
        .map(|(l, m)| {
            let n = m.channel.nrows();
            let clean = &m.channel * signal;
            let white = CVector::from_fn(n, |_, _| complex_gaussian(&mut rng, 1.0));
            let noise = match &m.noise {
                NoiseBlock::Covariance(z) => {
                    cholesky_lower(z).ok_or(Error::SingularNoise { ap: l })? * white
                }
                NoiseBlock::Precision(pr) => {
                    let (vals, vecs) = hermitian_eigen(pr);
                    let top = vals.first().copied().unwrap_or(0.0);
                    let scale = DVector::from_iterator(
                        n,
                        vals.iter().map(|&v| {
                            if top > 0.0 && v > RANK_TOLERANCE * top {
                                real(1.0 / libm::sqrt(v))
                            } else {
                                real(0.0)
                            }
                        }),
                    );
                    vecs * white.component_mul(&scale)
                }
                NoiseBlock::Discarded { .. } => CVector::zeros(n),
            };
            Ok(clean + noise)
        })
        .collect()
}

/// `K` i.i.d. CN(0, p) symbols.
pub fn random_symbols<R: Rng + ?Sized>(rng: &mut R, num_users: usize, p: f64) -> CVector {
    CVector::from_fn(num_users, |_, _| complex_gaussian(rng, p))
}

/// `prelog · log2 det(I_K + p Hᴴ Z⁻¹ H)`.
pub fn sum_se_exact(models: &[ApModel], p: f64, prelog: f64) -> Result<f64> {
    let k = check_users(models)?;
    let mut info = CMatrix::zeros(k, k);
    for (l, m) in models.iter().enumerate() {
        info += m.information(l)?;
    }
    Ok(prelog * log2_det_hpd(&identity_plus(&info, p))?)
}

/// The same quantity evaluated on the `NL × NL` form
/// `prelog · log2 det(p H Hᴴ Z⁻¹ + I)`.
pub fn sum_se_stacked(models: &[ApModel], p: f64, prelog: f64) -> Result<f64> {
    check_users(models)?;
    let h = vstack(&models.iter().map(|m| m.channel.clone()).collect::<Vec<_>>())?;
    let precisions = models
        .iter()
        .enumerate()
        .map(|(l, m)| m.noise.precision(l))
        .collect::<Result<Vec<_>>>()?;
    let m = &h * h.adjoint() * block_diag(&precisions);
    Ok(prelog * log2_abs_det(&identity_plus(&m, p)))
}

/// Per-AP decomposition `prelog · Σ_l log2 det(I + p H_lᴴ Z_l⁻¹ H_l)`; never
/// below [`sum_se_exact`].
pub fn sum_se_upper(models: &[ApModel], p: f64, prelog: f64) -> Result<f64> {
    check_users(models)?;
    let mut acc = 0.0;
    for (l, m) in models.iter().enumerate() {
        acc += log2_det_hpd(&identity_plus(&m.information(l)?, p))?;
    }
    Ok(prelog * acc)
}

/// Inverse of the diagonal of `Z_l`, as a vector.
fn diagonal_precision(noise: &NoiseBlock, ap: usize) -> Result<Vec<f64>> {
    match noise {
        NoiseBlock::Covariance(z) => Ok(z.diagonal().iter().map(|v| 1.0 / v.re).collect()),
        NoiseBlock::Precision(pr) => {
            let n = pr.nrows();
            let diagonal = (0..n).all(|i| (0..n).all(|j| i == j || pr[(i, j)].norm() == 0.0));
            if diagonal {
                Ok(pr.diagonal().iter().map(|v| v.re).collect())
            } else {
                let z = hpd_inverse(pr).ok_or(Error::SingularNoise { ap })?;
                Ok(z.diagonal().iter().map(|v| 1.0 / v.re).collect())
            }
        }
        NoiseBlock::Discarded { dim } => Ok(alloc::vec![0.0; *dim]),
    }
}

fn diagonalised(models: &[ApModel]) -> Result<Vec<ApModel>> {
    models
        .iter()
        .enumerate()
        .map(|(l, m)| {
            let d = diagonal_precision(&m.noise, l)?;
            let pr =
                CMatrix::from_diagonal(&DVector::from_iterator(d.len(), d.into_iter().map(real)));
            Ok(ApModel {
                channel: m.channel.clone(),
                noise: NoiseBlock::Precision(pr),
            })
        })
        .collect()
}

/// Sum-SE when each AP's noise covariance is replaced by its diagonal.
pub fn sum_se_ec(models: &[ApModel], p: f64, prelog: f64) -> Result<f64> {
    sum_se_exact(&diagonalised(models)?, p, prelog)
}

/// Fully diagonalised per-element bound
/// `prelog · Σ_l Σ_i log2(1 + p ‖H_l[i,:]‖² / Z_l,ii)`.
pub fn sum_se_ec_element_bound(models: &[ApModel], p: f64, prelog: f64) -> Result<f64> {
    let mut acc = 0.0;
    for (l, m) in models.iter().enumerate() {
        let d = diagonal_precision(&m.noise, l)?;
        for (row, di) in m.channel.row_iter().zip(d) {
            let g: f64 = row.iter().map(Complex64::norm_sqr).sum();
            acc += libm::log2(1.0 + p * g * di);
        }
    }
    Ok(prelog * acc)
}

/// Models of all APs under receiver noise only (infinite memory).
pub fn uncompressed_models(blocks: &[CMatrix], noise: &[f64]) -> Vec<ApModel> {
    blocks
        .iter()
        .zip(noise)
        .map(|(h, &s2)| {
            let n = h.nrows();
            ApModel {
                channel: h.clone(),
                noise: NoiseBlock::Covariance(CMatrix::identity(n, n).map(|z| z * s2)),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compression::{solve_ec, solve_vc};
    use crate::linalg::{c, rel_frobenius};
    use crate::rng::complex_gaussian_matrix;
    use approx::assert_relative_eq;

    fn random_models(seed: u64, l: usize, n: usize, k: usize) -> Vec<ApModel> {
        let mut rng = rng_from_seed(seed);
        (0..l)
            .map(|_| {
                let h = complex_gaussian_matrix(&mut rng, n, k, 1.0);
                let a = complex_gaussian_matrix(&mut rng, n, n, 1.0);
                let z = identity_plus(&(&a * a.adjoint()), 0.3);
                ApModel::new(h, NoiseBlock::Covariance(z)).unwrap()
            })
            .collect()
    }

    #[test]
    fn single_ap_white_noise_closed_form() {
        let h =
            CMatrix::from_row_slice(2, 2, &[c(1.0, 0.2), c(0.0, -0.5), c(0.3, 0.3), c(1.1, 0.0)]);
        let (p, s2) = (2.0, 0.4);
        let models = uncompressed_models(core::slice::from_ref(&h), &[s2]);
        let y = CVector::from_vec(alloc::vec![c(0.5, -1.0), c(0.25, 0.75)]);
        let est = rls_sequential(&models, core::slice::from_ref(&y), p).unwrap();
        let mut a = h.adjoint() * &h / real(s2);
        for i in 0..2 {
            a[(i, i)] += real(1.0 / p);
        }
        let expect = hpd_inverse(&a).unwrap() * h.adjoint() * &y / real(s2);
        assert!((est.signal - expect).norm() < 1e-12);
    }

    #[test]
    fn zero_channel_leaves_prior() {
        let models =
            uncompressed_models(&[CMatrix::zeros(3, 2), CMatrix::zeros(3, 2)], &[1.0, 1.0]);
        let ys = alloc::vec![CVector::from_element(3, c(1.0, 1.0)); 2];
        let est = rls_sequential(&models, &ys, 0.5).unwrap();
        assert_eq!(est.signal.norm(), 0.0);
        assert!(
            rel_frobenius(
                &est.error_covariance,
                &CMatrix::identity(2, 2).map(|z| z * 0.5)
            ) < 1e-15
        );
    }

    #[test]
    fn rls_matches_batch_on_random_instance() {
        let models = random_models(3, 4, 2, 3);
        let mut rng = rng_from_seed(8);
        let s = random_symbols(&mut rng, 3, 1.5);
        let ys = synthesize_observations(&models, &s, 9).unwrap();
        let a = rls_sequential(&models, &ys, 1.5).unwrap();
        let b = batch_ls_oracle(&models, &ys, 1.5).unwrap();
        assert!((&a.signal - &b.signal).norm() / b.signal.norm() < 1e-9);
        assert!(rel_frobenius(&a.error_covariance, &b.error_covariance) < 1e-9);
    }

    #[test]
    fn information_never_decreases() {
        let models = random_models(5, 5, 2, 3);
        let ys = alloc::vec![CVector::zeros(2); 5];
        let trace = rls_trace(&models, &ys, 1.0).unwrap();
        for w in trace.windows(2) {
            let (vals, _) = hermitian_eigen(&(&w[0].gamma - &w[1].gamma));
            assert!(vals.last().unwrap() >= &-1e-10);
        }
        assert_eq!(trace.last().unwrap().ap_cursor, 5);
    }

    #[test]
    fn scalar_wiener_estimate() {
        let (h, z, p) = (c(0.6, -0.8), 0.3, 2.0);
        let y = c(1.0, 0.5);
        let models = alloc::vec![ApModel::new(
            CMatrix::from_element(1, 1, h),
            NoiseBlock::Covariance(CMatrix::from_element(1, 1, real(z))),
        )
        .unwrap()];
        let est = batch_ls_oracle(&models, &[CVector::from_element(1, y)], p).unwrap();
        let expect = h.conj() * y * p / (p * h.norm_sqr() + z);
        assert!((est.signal[0] - expect).norm() < 1e-12);
        assert_relative_eq!(
            est.error_covariance[(0, 0)].re,
            p * z / (p * h.norm_sqr() + z),
            epsilon = 1e-12
        );
    }

    #[test]
    fn posterior_below_prior() {
        let models = random_models(11, 3, 3, 4);
        let ys = alloc::vec![CVector::zeros(3); 3];
        let est = batch_ls_oracle(&models, &ys, 0.7).unwrap();
        let (vals, _) = hermitian_eigen(&est.error_covariance);
        assert!(vals.iter().all(|&v| v <= 0.7 + 1e-12 && v > 0.0));
    }

    #[test]
    fn empirical_error_covariance_matches_gamma() {
        let models = random_models(21, 1, 2, 2);
        let p = 1.0;
        let gamma = batch_ls_oracle(&models, &[CVector::zeros(2)], p)
            .unwrap()
            .error_covariance;
        let mut rng = rng_from_seed(99);
        let draws = 100_000;
        let mut acc = CMatrix::zeros(2, 2);
        for t in 0..draws {
            let s = random_symbols(&mut rng, 2, p);
            let ys = synthesize_observations(&models, &s, 1000 + t).unwrap();
            let e = batch_ls_oracle(&models, &ys, p).unwrap().signal - s;
            acc += &e * e.adjoint();
        }
        let emp = acc / real(draws as f64);
        assert!(rel_frobenius(&emp, &gamma) < 0.03, "{emp} vs {gamma}");
    }

    #[test]
    fn discarded_ap_is_skipped() {
        let mut models = random_models(4, 3, 2, 2);
        let s = CVector::from_element(2, c(1.0, 0.0));
        let ys = synthesize_observations(&models, &s, 1).unwrap();
        let base = rls_sequential(&models[..2], &ys[..2], 1.0).unwrap();
        models[2].noise = NoiseBlock::Discarded { dim: 2 };
        let with = rls_sequential(&models, &ys, 1.0).unwrap();
        assert_eq!(base, with);
        assert!(
            (sum_se_upper(&models, 1.0, 1.0).unwrap()
                - sum_se_upper(&models[..2], 1.0, 1.0).unwrap())
            .abs()
                < 1e-12
        );
    }

    #[test]
    fn singular_covariance_is_reported() {
        let m = ApModel::new(
            CMatrix::identity(2, 1),
            NoiseBlock::Covariance(CMatrix::zeros(2, 2)),
        )
        .unwrap();
        assert_eq!(
            rls_sequential(&[m], &[CVector::zeros(2)], 1.0),
            Err(Error::SingularNoise { ap: 0 })
        );
    }

    #[test]
    fn se_forms_agree_and_bound() {
        let models = random_models(31, 3, 2, 3);
        let exact = sum_se_exact(&models, 1.3, 1.0).unwrap();
        let stacked = sum_se_stacked(&models, 1.3, 1.0).unwrap();
        let upper = sum_se_upper(&models, 1.3, 1.0).unwrap();
        assert!((exact - stacked).abs() <= 1e-10 * exact.abs());
        assert!(upper >= exact - 1e-10);
        assert_relative_eq!(
            sum_se_upper(&models[..1], 1.3, 1.0).unwrap(),
            sum_se_exact(&models[..1], 1.3, 1.0).unwrap(),
            epsilon = 1e-12
        );
        let ec = sum_se_ec(&models, 1.3, 1.0).unwrap();
        assert!(ec <= sum_se_ec_element_bound(&models, 1.3, 1.0).unwrap() + 1e-10);
    }

    #[test]
    fn scalar_shannon() {
        let h = c(0.3, 0.4);
        let models = uncompressed_models(&[CMatrix::from_element(1, 1, h)], &[0.1]);
        assert_relative_eq!(
            sum_se_exact(&models, 2.0, 0.5).unwrap(),
            0.5 * libm::log2(1.0 + 2.0 * 0.25 / 0.1),
            epsilon = 1e-12
        );
        let zero = uncompressed_models(&[CMatrix::zeros(2, 2)], &[0.1]);
        assert_eq!(sum_se_exact(&zero, 2.0, 1.0).unwrap(), 0.0);
        assert_eq!(sum_se_ec(&zero, 2.0, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn compressed_models_lose_information() {
        let mut rng = rng_from_seed(12);
        let blocks: Vec<CMatrix> = (0..3)
            .map(|_| complex_gaussian_matrix(&mut rng, 3, 2, 1.0))
            .collect();
        let (p, s2) = (1.0, 0.2);
        let inf = sum_se_exact(&uncompressed_models(&blocks, &[s2; 3]), p, 1.0).unwrap();
        for bits in [0.0, 1.0, 6.0, 40.0] {
            let vc: Vec<ApModel> = blocks
                .iter()
                .map(|h| ApModel::from_solution(h, &solve_vc(h, p, s2, bits).unwrap()))
                .collect();
            let ec: Vec<ApModel> = blocks
                .iter()
                .map(|h| ApModel::from_solution(h, &solve_ec(h, p, s2, bits).unwrap()))
                .collect();
            let se_vc = sum_se_exact(&vc, p, 1.0).unwrap();
            assert!(se_vc <= inf + 1e-10);
            assert!(sum_se_exact(&ec, p, 1.0).unwrap() <= inf + 1e-10);
            // element-wise noise is diagonal already
            assert_relative_eq!(
                sum_se_ec(&ec, p, 1.0).unwrap(),
                sum_se_exact(&ec, p, 1.0).unwrap(),
                epsilon = 1e-10
            );
        }
        let zero: Vec<ApModel> = blocks
            .iter()
            .map(|h| ApModel::from_solution(h, &solve_vc(h, p, s2, 0.0).unwrap()))
            .collect();
        assert!(zero
            .iter()
            .all(|m| matches!(m.noise, NoiseBlock::Discarded { .. })));
        assert_eq!(sum_se_exact(&zero, p, 1.0).unwrap(), 0.0);
    }
}
