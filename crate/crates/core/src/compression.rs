//! Rate-distortion compression of the received signal vectors stored at an AP.
//!
//! Compression is modelled by the additive test channel `ŷ = y + q` with
//! `q ~ CN(0, Q)` independent of `y`. For a bit budget `C_sc` per stored
//! vector, each option picks the `Q` that maximises the AP's local
//! contribution to the sum-SE bound. All three options reduce to reverse
//! water-filling on a spectrum of signal powers `s_i ≥ σ²`:
//!
//! ```text
//! λ_q,i = max(0, (1/μ)(1/σ² − 1/s_i) − 1/σ²),   Σ_i log2(λ_q,i s_i + 1) = C_sc
//! ```
//!
//! where `λ_q,i` are the eigenvalues of `Q⁻¹` and `μ` is found by bisection.
//! The search runs on `ln μ` and evaluates each mode's bit count in the log
//! domain, so budgets of thousands of bits per mode stay finite even though
//! `λ_q,i` itself overflows.

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_part, identity_plus, log2_det_hpd, real, svd_full_left, CMatrix};

const LN_2: f64 = core::f64::consts::LN_2;

/// Bit tolerance of the water level search.
pub const BIT_TOLERANCE: f64 = 1e-6;
/// Hard cap on bisection steps.
pub const MAX_BISECTION_STEPS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CompressionOption {
    /// Joint compression of the whole received vector.
    #[serde(alias = "vc")]
    VectorWise,
    /// Per-element compression with optimised bit split.
    #[serde(alias = "ec")]
    ElementWise,
    /// Per-element compression with the same number of bits per element.
    #[serde(alias = "ec_equal")]
    ElementWiseEqualBits,
    /// PCA projection onto `min(N, K)` dimensions, then per-element compression.
    #[serde(alias = "pca_ec", alias = "pca")]
    PcaElementWise,
    /// Unlimited memory, no compression noise.
    None,
}

impl CompressionOption {
    pub const ALL: [CompressionOption; 5] = [
        CompressionOption::VectorWise,
        CompressionOption::ElementWise,
        CompressionOption::ElementWiseEqualBits,
        CompressionOption::PcaElementWise,
        CompressionOption::None,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CompressionOption::VectorWise => "vc",
            CompressionOption::ElementWise => "ec",
            CompressionOption::ElementWiseEqualBits => "ec_equal",
            CompressionOption::PcaElementWise => "pca_ec",
            CompressionOption::None => "none",
        }
    }

    pub fn is_elementwise(self) -> bool {
        matches!(
            self,
            CompressionOption::ElementWise | CompressionOption::ElementWiseEqualBits
        )
    }
}

impl fmt::Display for CompressionOption {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CompressionOption {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        match lower.as_str() {
            "vc" | "vector_wise" | "vectorwise" => Ok(CompressionOption::VectorWise),
            "ec" | "element_wise" | "elementwise" => Ok(CompressionOption::ElementWise),
            "ec_equal" | "element_wise_equal_bits" => Ok(CompressionOption::ElementWiseEqualBits),
            "pca_ec" | "pca" | "pca_element_wise" => Ok(CompressionOption::PcaElementWise),
            "none" | "inf" => Ok(CompressionOption::None),
            _ => Err(Error::input(alloc::format!(
                "unknown compression option '{s}'"
            ))),
        }
    }
}

/// Result of reverse water-filling over a spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct WaterFill {
    /// Eigenvalues `λ_q,i` of `Q⁻¹`, 1/watts. `+∞` when the mode's bit count
    /// exceeds the `f64` range of `2^b`.
    pub noise_inverse: Vec<f64>,
    /// Bits spent on each mode.
    pub mode_bits: Vec<f64>,
    /// Natural log of the Lagrange multiplier.
    pub ln_mu: f64,
}

impl WaterFill {
    /// Lagrange multiplier `μ`; underflows to zero for budgets beyond
    /// roughly a thousand bits per mode, see [`WaterFill::ln_mu`].
    pub fn mu(&self) -> f64 {
        libm::exp(self.ln_mu)
    }

    pub fn total_bits(&self) -> f64 {
        self.mode_bits.iter().sum()
    }
}

#[inline]
fn softplus(y: f64) -> f64 {
    if y > 30.0 {
        y + libm::log1p(libm::exp(-y))
    } else {
        libm::log1p(libm::exp(y))
    }
}

/// Per-mode data in σ²-normalised units.
struct Mode {
    /// `ln(1 − σ²/s)`; `-∞` for a pure-noise mode.
    ln_gap: f64,
    /// `ln(s/σ²)`.
    ln_ratio: f64,
}

impl Mode {
    /// `ln(σ² λ_q)` at water level `ln μ`, or `None` when the mode is off.
    fn ln_scaled_inverse(&self, ln_mu: f64) -> Option<f64> {
        let v = self.ln_gap - ln_mu;
        if !(v > 0.0) {
            return None;
        }
        Some(if v > 30.0 {
            v + libm::log1p(-libm::exp(-v))
        } else {
            libm::log(libm::expm1(v))
        })
    }

    fn bits(&self, ln_mu: f64) -> f64 {
        match self.ln_scaled_inverse(ln_mu) {
            Some(lx) => softplus(lx + self.ln_ratio) / LN_2,
            None => 0.0,
        }
    }
}

fn prepare_modes(signal_eigs: &[f64], noise_floor: f64) -> Result<Vec<Mode>> {
    if !(noise_floor > 0.0) || !noise_floor.is_finite() {
        return Err(Error::input("noise floor must be positive and finite"));
    }
    signal_eigs
        .iter()
        .map(|&s| {
            if !s.is_finite() || s < noise_floor * (1.0 - 1e-12) {
                return Err(Error::input(alloc::format!(
                    "signal eigenvalue {s} is below the noise floor {noise_floor}"
                )));
            }
            let ratio = (s / noise_floor).max(1.0);
            Ok(Mode {
                ln_gap: libm::log1p(-1.0 / ratio),
                ln_ratio: libm::log(ratio),
            })
        })
        .collect()
}

/// Reverse water-filling of a bit budget over signal eigenvalues `s_i ≥ σ²`.
///
/// Returns the compression-noise inverse eigenvalues and the water level.
/// A zero budget switches every mode off; a positive budget on a spectrum
/// with no mode above the noise floor is rejected.
pub fn reverse_waterfill(signal_eigs: &[f64], noise_floor: f64, budget: f64) -> Result<WaterFill> {
    if !(budget >= 0.0) || !budget.is_finite() {
        return Err(Error::input(alloc::format!(
            "bit budget must be finite and non-negative, got {budget}"
        )));
    }
    let modes = prepare_modes(signal_eigs, noise_floor)?;
    let off = || WaterFill {
        noise_inverse: alloc::vec![0.0; modes.len()],
        mode_bits: alloc::vec![0.0; modes.len()],
        ln_mu: 0.0,
    };
    if budget == 0.0 {
        return Ok(off());
    }
    if modes.iter().all(|m| m.ln_gap == f64::NEG_INFINITY) {
        return Err(Error::InfeasibleSpectrum { bits: budget });
    }

    let total = |ln_mu: f64| modes.iter().map(|m| m.bits(ln_mu)).sum::<f64>();

    // μ = 1 spends nothing; walk the lower end down until the budget is
    // bracketed.
    let mut hi = 0.0_f64;
    let mut lo = libm::log(1e-12);
    let mut expansions = 0;
    while total(lo) < budget {
        hi = lo;
        lo -= 20.0;
        expansions += 1;
        if expansions > 100_000 {
            return Err(Error::NoConvergence { bits: budget });
        }
    }

    let mut ln_mu = 0.5 * (lo + hi);
    let mut converged = false;
    for _ in 0..MAX_BISECTION_STEPS {
        ln_mu = 0.5 * (lo + hi);
        let bits = total(ln_mu);
        if (bits - budget).abs() <= 1e-3 * BIT_TOLERANCE {
            converged = true;
            break;
        }
        if bits > budget {
            lo = ln_mu;
        } else {
            hi = ln_mu;
        }
        if hi - lo <= f64::EPSILON * ln_mu.abs().max(1.0) {
            converged = (total(ln_mu) - budget).abs() <= BIT_TOLERANCE;
            break;
        }
    }
    if !converged && (total(ln_mu) - budget).abs() > BIT_TOLERANCE {
        return Err(Error::NoConvergence { bits: budget });
    }

    let mut noise_inverse = Vec::with_capacity(modes.len());
    let mut mode_bits = Vec::with_capacity(modes.len());
    for m in &modes {
        match m.ln_scaled_inverse(ln_mu) {
            Some(lx) => {
                noise_inverse.push(libm::exp(lx) / noise_floor);
                mode_bits.push(softplus(lx + m.ln_ratio) / LN_2);
            }
            None => {
                noise_inverse.push(0.0);
                mode_bits.push(0.0);
            }
        }
    }
    Ok(WaterFill {
        noise_inverse,
        mode_bits,
        ln_mu,
    })
}

/// Eigenvalue of the total-noise precision `(Q + σ²I)⁻¹` for a mode with
/// signal power `s` compressed with `bits` bits.
///
/// Written in terms of the bit count so that an overflowing `λ_q` still maps
/// to the noise-only limit `1/σ²`.
pub fn noise_precision_from_bits(bits: f64, signal: f64, noise_floor: f64) -> f64 {
    if bits == f64::INFINITY {
        return 1.0 / noise_floor;
    }
    if !(bits > 0.0) {
        return 0.0;
    }
    let r = signal / noise_floor;
    let t = libm::exp2(-bits);
    (-libm::expm1(-bits * LN_2)) / (1.0 + (r - 1.0) * t) / noise_floor
}

/// Per-AP compression noise model for one bit budget.
#[derive(Debug, Clone, PartialEq)]
pub struct CompressionSolution {
    pub ap_index: usize,
    pub option: CompressionOption,
    /// Basis in which `Q⁻¹` is diagonal: left singular vectors of `H_l`
    /// (`N × N`) for vector-wise, identity for element-wise, the `N × x` PCA
    /// projector for PCA + element-wise.
    pub eigenbasis: CMatrix,
    /// Eigenvalues `λ_q,i` of `Q⁻¹`, 1/watts.
    pub noise_inverse: Vec<f64>,
    /// Bits per mode; sums to `achieved_bits`.
    pub mode_bits: Vec<f64>,
    /// Signal power per mode `s_i`, watts.
    pub signal_spectrum: Vec<f64>,
    /// Receiver noise power `σ²` at this AP, watts.
    pub noise_floor: f64,
    /// Natural log of the water level; `None` for the equal-bit heuristic and
    /// for uncompressed storage.
    pub ln_lagrange_multiplier: Option<f64>,
    pub target_bits: f64,
    pub achieved_bits: f64,
    /// Diagonal of `P_l = p·diag(‖H_l[i,:]‖²) + σ²I` for element-wise options.
    pub element_power_profile: Option<Vec<f64>>,
}

impl CompressionSolution {
    pub fn lagrange_multiplier(&self) -> Option<f64> {
        self.ln_lagrange_multiplier.map(libm::exp)
    }

    /// Dimension of the stored vector.
    pub fn stored_dim(&self) -> usize {
        self.noise_inverse.len()
    }

    /// Eigenvalues of `Z⁻¹ = (Q + σ²I)⁻¹` in the solution basis.
    pub fn noise_precision_diag(&self) -> Vec<f64> {
        if self.option == CompressionOption::None {
            return alloc::vec![1.0 / self.noise_floor; self.stored_dim()];
        }
        self.mode_bits
            .iter()
            .zip(&self.signal_spectrum)
            .map(|(&b, &s)| noise_precision_from_bits(b, s, self.noise_floor))
            .collect()
    }

    /// `Z⁻¹` in the coordinates of the stored vector: `N × N` for VC / EC /
    /// none, `x × x` for PCA.
    pub fn noise_precision(&self) -> CMatrix {
        let d = self.noise_precision_diag();
        let diag =
            CMatrix::from_diagonal(&DVector::from_iterator(d.len(), d.iter().map(|&v| real(v))));
        match self.option {
            CompressionOption::VectorWise => &self.eigenbasis * diag * self.eigenbasis.adjoint(),
            _ => diag,
        }
    }

    /// Channel seen by the estimator: `A_lᴴ H_l` for PCA, `H_l` otherwise.
    pub fn effective_channel(&self, h: &CMatrix) -> CMatrix {
        match self.option {
            CompressionOption::PcaElementWise => self.eigenbasis.adjoint() * h,
            _ => h.clone(),
        }
    }

    /// Compression noise covariance `Q` restricted to the modes that are
    /// kept, as `(basis, variances)`; discarded modes carry infinite noise and
    /// are omitted.
    pub fn active_noise_modes(&self) -> (CMatrix, Vec<f64>) {
        let n = self.eigenbasis.nrows();
        let idx: Vec<usize> = (0..self.stored_dim())
            .filter(|&i| self.noise_inverse[i] > 0.0)
            .collect();
        let mut basis = CMatrix::zeros(
            if self.option == CompressionOption::PcaElementWise {
                self.stored_dim()
            } else {
                n
            },
            idx.len(),
        );
        let mut vars = Vec::with_capacity(idx.len());
        for (j, &i) in idx.iter().enumerate() {
            match self.option {
                CompressionOption::VectorWise => basis.set_column(j, &self.eigenbasis.column(i)),
                _ => basis[(i, j)] = real(1.0),
            }
            vars.push(1.0 / self.noise_inverse[i]);
        }
        (basis, vars)
    }
}

fn uncompressed(ap_index: usize, n: usize, noise_floor: f64) -> CompressionSolution {
    CompressionSolution {
        ap_index,
        option: CompressionOption::None,
        eigenbasis: CMatrix::identity(n, n),
        noise_inverse: alloc::vec![f64::INFINITY; n],
        mode_bits: alloc::vec![f64::INFINITY; n],
        signal_spectrum: alloc::vec![f64::NAN; n],
        noise_floor,
        ln_lagrange_multiplier: None,
        target_bits: f64::INFINITY,
        achieved_bits: f64::INFINITY,
        element_power_profile: None,
    }
}

/// Storage without compression noise (infinite memory).
pub fn solve_uncompressed(h: &CMatrix, noise_floor: f64) -> CompressionSolution {
    uncompressed(0, h.nrows(), noise_floor)
}

fn check_budget(budget: f64) -> Result<()> {
    if budget.is_nan() || budget < 0.0 {
        return Err(Error::input(alloc::format!("invalid bit budget {budget}")));
    }
    Ok(())
}

fn check_power(p: f64, noise_floor: f64) -> Result<()> {
    if !(p > 0.0) || !(noise_floor > 0.0) {
        return Err(Error::input("power and noise must be positive"));
    }
    Ok(())
}

/// Vector-wise compression: water-filling on the eigenvalues
/// `p·λ_i² + σ²` of the received-signal covariance.
pub fn solve_vc(h: &CMatrix, p: f64, noise_floor: f64, budget: f64) -> Result<CompressionSolution> {
    check_power(p, noise_floor)?;
    check_budget(budget)?;
    if budget == f64::INFINITY {
        return Ok(solve_uncompressed(h, noise_floor));
    }
    let n = h.nrows();
    let svd = svd_full_left(h);
    let mut spectrum = alloc::vec![noise_floor; n];
    for (s, &sv) in spectrum.iter_mut().zip(&svd.values) {
        *s = p * sv * sv + noise_floor;
    }
    let wf = reverse_waterfill(&spectrum, noise_floor, budget)?;
    Ok(CompressionSolution {
        ap_index: 0,
        option: CompressionOption::VectorWise,
        eigenbasis: svd.left,
        achieved_bits: wf.total_bits(),
        noise_inverse: wf.noise_inverse,
        mode_bits: wf.mode_bits,
        signal_spectrum: spectrum,
        noise_floor,
        ln_lagrange_multiplier: Some(wf.ln_mu),
        target_bits: budget,
        element_power_profile: None,
    })
}

/// Diagonal of `P_l`: per-element received power `p‖H_l[i,:]‖² + σ²`.
pub fn element_powers(h: &CMatrix, p: f64, noise_floor: f64) -> Vec<f64> {
    h.row_iter()
        .map(|row| p * row.iter().map(|z| z.norm_sqr()).sum::<f64>() + noise_floor)
        .collect()
}

/// Element-wise compression with the optimal bit split.
pub fn solve_ec(h: &CMatrix, p: f64, noise_floor: f64, budget: f64) -> Result<CompressionSolution> {
    check_power(p, noise_floor)?;
    check_budget(budget)?;
    if budget == f64::INFINITY {
        return Ok(solve_uncompressed(h, noise_floor));
    }
    let n = h.nrows();
    let powers = element_powers(h, p, noise_floor);
    let wf = reverse_waterfill(&powers, noise_floor, budget)?;
    Ok(CompressionSolution {
        ap_index: 0,
        option: CompressionOption::ElementWise,
        eigenbasis: CMatrix::identity(n, n),
        achieved_bits: wf.total_bits(),
        noise_inverse: wf.noise_inverse,
        mode_bits: wf.mode_bits,
        signal_spectrum: powers.clone(),
        noise_floor,
        ln_lagrange_multiplier: Some(wf.ln_mu),
        target_bits: budget,
        element_power_profile: Some(powers),
    })
}

/// Element-wise compression with `C_sc / N` bits on every element.
pub fn solve_ec_equal_bits(
    h: &CMatrix,
    p: f64,
    noise_floor: f64,
    budget: f64,
) -> Result<CompressionSolution> {
    check_power(p, noise_floor)?;
    check_budget(budget)?;
    if budget == f64::INFINITY {
        return Ok(solve_uncompressed(h, noise_floor));
    }
    let n = h.nrows();
    let powers = element_powers(h, p, noise_floor);
    let bits = budget / n as f64;
    // σ²_el,i = P_ii / (2^b − 1), so λ_q,i = (2^b − 1) / P_ii.
    let noise_inverse = powers
        .iter()
        .map(|&pw| libm::expm1(bits * LN_2) / pw)
        .collect();
    Ok(CompressionSolution {
        ap_index: 0,
        option: CompressionOption::ElementWiseEqualBits,
        eigenbasis: CMatrix::identity(n, n),
        noise_inverse,
        mode_bits: alloc::vec![bits; n],
        signal_spectrum: powers.clone(),
        noise_floor,
        ln_lagrange_multiplier: None,
        target_bits: budget,
        achieved_bits: bits * n as f64,
        element_power_profile: Some(powers),
    })
}

/// PCA projection of an AP's received vector onto its `x = min(N, K)`
/// principal directions.
#[derive(Debug, Clone, PartialEq)]
pub struct PcaMap {
    /// `A_l`, `N × x` with orthonormal columns.
    pub projector: CMatrix,
    /// `H̃_l = A_lᴴ H_l`, `x × K`.
    pub effective_channel: CMatrix,
    /// Signal powers `p·λ_i² + σ²` of the mapped vector, descending.
    pub effective_spectrum: Vec<f64>,
}

pub fn pca_transform(h: &CMatrix, p: f64, noise_floor: f64) -> PcaMap {
    let (n, k) = h.shape();
    let x = n.min(k);
    let svd = svd_full_left(h);
    let projector = svd.left.columns(0, x).into_owned();
    let effective_channel = projector.adjoint() * h;
    let effective_spectrum = svd
        .values
        .iter()
        .map(|&s| p * s * s + noise_floor)
        .collect();
    PcaMap {
        projector,
        effective_channel,
        effective_spectrum,
    }
}

/// Element-wise compression of the PCA-mapped vector. The mapped elements are
/// independent, so the per-element water-filling runs on the mapped spectrum.
pub fn solve_pca_ec(map: &PcaMap, noise_floor: f64, budget: f64) -> Result<CompressionSolution> {
    check_budget(budget)?;
    let x = map.effective_spectrum.len();
    if budget == f64::INFINITY {
        let mut sol = uncompressed(0, x, noise_floor);
        sol.option = CompressionOption::PcaElementWise;
        sol.eigenbasis = map.projector.clone();
        sol.signal_spectrum = map.effective_spectrum.clone();
        return Ok(sol);
    }
    let wf = reverse_waterfill(&map.effective_spectrum, noise_floor, budget)?;
    Ok(CompressionSolution {
        ap_index: 0,
        option: CompressionOption::PcaElementWise,
        eigenbasis: map.projector.clone(),
        achieved_bits: wf.total_bits(),
        noise_inverse: wf.noise_inverse,
        mode_bits: wf.mode_bits,
        signal_spectrum: map.effective_spectrum.clone(),
        noise_floor,
        ln_lagrange_multiplier: Some(wf.ln_mu),
        target_bits: budget,
        element_power_profile: None,
    })
}

/// Dispatches to the solver of `option`.
pub fn solve(
    option: CompressionOption,
    h: &CMatrix,
    p: f64,
    noise_floor: f64,
    budget: f64,
) -> Result<CompressionSolution> {
    match option {
        CompressionOption::VectorWise => solve_vc(h, p, noise_floor, budget),
        CompressionOption::ElementWise => solve_ec(h, p, noise_floor, budget),
        CompressionOption::ElementWiseEqualBits => solve_ec_equal_bits(h, p, noise_floor, budget),
        CompressionOption::PcaElementWise => {
            solve_pca_ec(&pca_transform(h, p, noise_floor), noise_floor, budget)
        }
        CompressionOption::None => Ok(solve_uncompressed(h, noise_floor)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestChannel {
    /// `x̂ = x + q`, the model used throughout the crate.
    Additive,
    /// `x = x̂ + q`, the rate-distortion optimal one.
    Optimal,
}

/// Mutual information of a unit-power complex Gaussian scalar and its
/// compressed version at compression noise variance `q`, in bits.
pub fn mutual_info_scalar(q: f64, variant: TestChannel) -> Result<f64> {
    if !(q > 0.0) {
        return Err(Error::input("compression noise variance must be positive"));
    }
    Ok(match variant {
        TestChannel::Additive => libm::log2(1.0 / q + 1.0),
        TestChannel::Optimal => libm::log2(1.0 / q).max(0.0),
    })
}

/// Bits per stored vector implied by `solution` for channel `h`, evaluated
/// from the matrix expressions (log-det for vector-wise and PCA, product
/// over elements for element-wise).
///
/// Independent of the solver's own bookkeeping. Returns `+∞` for uncompressed
/// storage and whenever a mode's `λ_q` has overflowed.
pub fn achieved_bits(solution: &CompressionSolution, h: &CMatrix, p: f64, noise_floor: f64) -> f64 {
    if solution.option == CompressionOption::None
        || solution.noise_inverse.iter().any(|v| !v.is_finite())
    {
        return f64::INFINITY;
    }
    match solution.option {
        CompressionOption::VectorWise | CompressionOption::PcaElementWise => {
            let g = solution.effective_channel(h);
            // W with WᴴW = Q⁻¹, so det(I + Q⁻¹C) = det(I + W C Wᴴ); the
            // Hermitian form stays accurate when λ_q spans many decades.
            let root = DVector::from_iterator(
                solution.stored_dim(),
                solution.noise_inverse.iter().map(|&v| real(libm::sqrt(v))),
            );
            let w = if solution.option == CompressionOption::VectorWise {
                CMatrix::from_diagonal(&root) * solution.eigenbasis.adjoint()
            } else {
                CMatrix::from_diagonal(&root)
            };
            // p G Gᴴ + σ² I
            let cov = identity_plus(&(&g * g.adjoint()), p / noise_floor).map(|z| z * noise_floor);
            let inner = hermitian_part(&(&w * cov * w.adjoint()));
            log2_det_hpd(&identity_plus(&inner, 1.0)).unwrap_or(f64::NAN)
        }
        _ => {
            let powers = element_powers(h, p, noise_floor);
            powers
                .iter()
                .zip(&solution.noise_inverse)
                .map(|(&pw, &l)| libm::log2(1.0 + l * pw))
                .sum()
        }
    }
}

/// Local objective maximised by the solver at one AP:
/// `log2 det(p·H_l H_lᴴ Z_l⁻¹ + I)` for vector-wise and PCA storage, and its
/// diagonalised form `Σ_i log2(1 + p‖H_l[i,:]‖² / Z_ii)` for element-wise.
pub fn local_objective(solution: &CompressionSolution, h: &CMatrix, p: f64) -> Result<f64> {
    match solution.option {
        CompressionOption::ElementWise | CompressionOption::ElementWiseEqualBits => {
            let d = solution.noise_precision_diag();
            Ok(h.row_iter()
                .zip(&d)
                .map(|(row, &di)| {
                    libm::log2(1.0 + p * row.iter().map(|z| z.norm_sqr()).sum::<f64>() * di)
                })
                .sum())
        }
        _ => {
            let g = solution.effective_channel(h);
            let gram = g.adjoint() * solution.noise_precision() * &g;
            log2_det_hpd(&identity_plus(&gram, p))
        }
    }
}
