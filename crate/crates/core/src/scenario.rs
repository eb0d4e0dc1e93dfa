//! Network geometry, large-scale fading and Rayleigh channel realisations.

use alloc::format;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{vstack, CMatrix, Complex64};
use crate::rng::{complex_gaussian, derive, rng_from_seed, stream};

/// Distances below this are clamped before the path-loss model is applied.
pub const MIN_DISTANCE_M: f64 = 1.0;

pub fn dbm_to_watt(dbm: f64) -> f64 {
    libm::pow(10.0, dbm / 10.0) * 1e-3
}

pub fn db_to_linear(db: f64) -> f64 {
    libm::pow(10.0, db / 10.0)
}

/// Physical and protocol parameters of one network instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioConfig {
    pub num_aps: usize,
    pub antennas_per_ap: usize,
    pub num_users: usize,
    /// Uplink transmit power per user, watts.
    pub tx_power: f64,
    /// Receiver noise power, watts.
    pub noise_power: f64,
    /// Side length of the square service area, metres.
    pub area_side: f64,
    pub num_subcarriers: usize,
    /// Hz.
    pub bandwidth: f64,
    /// Fraction of coherence-block samples used for uplink data.
    pub prelog: f64,
    /// Pilot length for imperfect CSI; `None` means perfect CSI.
    pub pilot_length: Option<usize>,
    /// Pilot transmit power, watts; defaults to `tx_power`.
    pub pilot_power: Option<f64>,
    pub rng_seed: u64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            num_aps: 32,
            antennas_per_ap: 4,
            num_users: 4,
            tx_power: 0.01,
            noise_power: dbm_to_watt(-85.0),
            area_side: 190.0,
            num_subcarriers: 4096,
            bandwidth: 100e6,
            prelog: 1.0,
            pilot_length: None,
            pilot_power: None,
            rng_seed: 0,
        }
    }
}

impl ScenarioConfig {
    /// Spreads `total_antennas` evenly over `num_aps` APs.
    pub fn with_split(mut self, total_antennas: usize, num_aps: usize) -> Result<Self> {
        if num_aps == 0 || !total_antennas.is_multiple_of(num_aps) {
            return Err(Error::config(format!(
                "{num_aps} APs do not divide {total_antennas} antennas"
            )));
        }
        self.num_aps = num_aps;
        self.antennas_per_ap = total_antennas / num_aps;
        Ok(self)
    }

    pub fn total_antennas(&self) -> usize {
        self.num_aps * self.antennas_per_ap
    }

    /// OFDM symbol duration `N_sc / B`, seconds.
    pub fn symbol_duration(&self) -> f64 {
        self.num_subcarriers as f64 / self.bandwidth
    }

    pub fn effective_pilot_power(&self) -> f64 {
        self.pilot_power.unwrap_or(self.tx_power)
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_aps == 0 || self.antennas_per_ap == 0 || self.num_users == 0 {
            return Err(Error::config("L, N and K must be positive"));
        }
        if !(self.tx_power > 0.0) || !(self.noise_power > 0.0) {
            return Err(Error::config("transmit and noise power must be positive"));
        }
        if !(self.area_side > 0.0) {
            return Err(Error::config("area side must be positive"));
        }
        if self.num_subcarriers == 0 || !(self.bandwidth > 0.0) {
            return Err(Error::config(
                "need at least one subcarrier and positive bandwidth",
            ));
        }
        if !(self.prelog > 0.0 && self.prelog <= 1.0) {
            return Err(Error::config("prelog must lie in (0, 1]"));
        }
        if let Some(tp) = self.pilot_length {
            if tp == 0 || tp > self.num_users {
                return Err(Error::config(format!(
                    "pilot length {tp} must lie in [1, K = {}]",
                    self.num_users
                )));
            }
        }
        if let Some(pp) = self.pilot_power {
            if !(pp > 0.0) {
                return Err(Error::config("pilot power must be positive"));
            }
        }
        Ok(())
    }
}

pub type Point = [f64; 2];

#[derive(Debug, Clone, PartialEq)]
pub struct Geometry {
    pub ap_positions: Vec<Point>,
    pub user_positions: Vec<Point>,
    /// `K × L` user-to-AP distances in metres, clamped to at least 1 m.
    pub distances: DMatrix<f64>,
}

impl Geometry {
    /// Builds a geometry from explicit positions.
    pub fn from_positions(ap_positions: Vec<Point>, user_positions: Vec<Point>) -> Self {
        let distances = DMatrix::from_fn(user_positions.len(), ap_positions.len(), |k, l| {
            let dx = user_positions[k][0] - ap_positions[l][0];
            let dy = user_positions[k][1] - ap_positions[l][1];
            libm::hypot(dx, dy).max(MIN_DISTANCE_M)
        });
        Self {
            ap_positions,
            user_positions,
            distances,
        }
    }

    /// Linear large-scale gains `β_kl`, `K × L`.
    pub fn large_scale_gains(&self) -> Result<DMatrix<f64>> {
        let mut beta = DMatrix::zeros(self.distances.nrows(), self.distances.ncols());
        for (b, &d) in beta.iter_mut().zip(self.distances.iter()) {
            *b = db_to_linear(path_loss_db(d)?);
        }
        Ok(beta)
    }
}

/// Point at arc length `s` along the boundary of `[0, side]²`, walking
/// counter-clockwise from the origin.
fn perimeter_point(side: f64, s: f64) -> Point {
    let s = s % (4.0 * side);
    let edge = (s / side) as usize;
    let t = s - edge as f64 * side;
    match edge {
        0 => [t, 0.0],
        1 => [side, t],
        2 => [side - t, side],
        _ => [0.0, side - t],
    }
}

/// APs equally spaced along the square's perimeter in fronthaul order, users
/// uniform inside the square.
pub fn build_geometry(config: &ScenarioConfig, seed: u64) -> Geometry {
    let side = config.area_side;
    let l = config.num_aps;
    let step = 4.0 * side / l as f64;
    let aps = (0..l)
        .map(|i| perimeter_point(side, i as f64 * step))
        .collect();
    let mut rng = rng_from_seed(derive(seed, stream::GEOMETRY));
    let users = (0..config.num_users)
        .map(|_| [rng.random::<f64>() * side, rng.random::<f64>() * side])
        .collect();
    Geometry::from_positions(aps, users)
}

/// Urban-microcell path loss at 2 GHz, in dB.
pub fn path_loss_db(distance_m: f64) -> Result<f64> {
    if !(distance_m >= MIN_DISTANCE_M) {
        return Err(Error::DistanceBelowClamp(distance_m));
    }
    Ok(-30.5 - 36.7 * libm::log10(distance_m / MIN_DISTANCE_M))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    /// Per-AP channel blocks `H_l`, each `N × K`.
    pub blocks: Vec<CMatrix>,
    /// `K × L` linear large-scale gains.
    pub large_scale: DMatrix<f64>,
    /// Per-AP noise power seen by the estimator, watts. Equals the receiver
    /// noise under perfect CSI.
    pub effective_noise: Vec<f64>,
}

impl ChannelRealization {
    pub fn num_aps(&self) -> usize {
        self.blocks.len()
    }

    pub fn num_users(&self) -> usize {
        self.large_scale.nrows()
    }

    /// Network-wide `NL × K` channel.
    pub fn stacked(&self) -> CMatrix {
        vstack(&self.blocks).expect("blocks share the user dimension")
    }
}

/// Uncorrelated Rayleigh fading: every entry of column `k` of `H_l` is
/// CN(0, β_kl).
pub fn sample_fading(
    large_scale: &DMatrix<f64>,
    antennas_per_ap: usize,
    noise_power: f64,
    seed: u64,
) -> ChannelRealization {
    let (k_users, l_aps) = large_scale.shape();
    let mut rng = rng_from_seed(derive(seed, stream::FADING));
    let blocks = (0..l_aps)
        .map(|l| {
            let mut h = CMatrix::zeros(antennas_per_ap, k_users);
            for k in 0..k_users {
                let beta = large_scale[(k, l)];
                for i in 0..antennas_per_ap {
                    h[(i, k)] = complex_gaussian(&mut rng, beta);
                }
            }
            h
        })
        .collect();
    ChannelRealization {
        blocks,
        large_scale: large_scale.clone(),
        effective_noise: alloc::vec![noise_power; l_aps],
    }
}

pub fn sample_channel(
    geometry: &Geometry,
    config: &ScenarioConfig,
    seed: u64,
) -> Result<ChannelRealization> {
    let beta = geometry.large_scale_gains()?;
    Ok(sample_fading(
        &beta,
        config.antennas_per_ap,
        config.noise_power,
        seed,
    ))
}

/// Pilot index of each user under round-robin assignment.
pub fn pilot_assignment(num_users: usize, pilot_length: usize) -> Vec<usize> {
    (0..num_users).map(|k| k % pilot_length).collect()
}

/// Per-user MMSE estimation error variance `c_kl` at one AP.
///
/// `gains[k]` is `β_kl`; users sharing a pilot contaminate each other.
pub fn estimation_error_variance(
    gains: &[f64],
    pilot_length: usize,
    pilot_power: f64,
    noise_power: f64,
) -> Vec<f64> {
    let pilots = pilot_assignment(gains.len(), pilot_length);
    let energy = pilot_power * pilot_length as f64;
    gains
        .iter()
        .enumerate()
        .map(|(k, &beta)| {
            let shared: f64 = gains
                .iter()
                .zip(&pilots)
                .filter(|(_, &t)| t == pilots[k])
                .map(|(&b, _)| b)
                .sum();
            let c = beta - energy * beta * beta / (energy * shared + noise_power);
            c.clamp(0.0, beta)
        })
        .collect()
}

/// Replaces the channel by its pilot-based MMSE estimate and folds the
/// estimation error into the per-AP effective noise
/// `σ² + p · Σ_k c_kl`.
pub fn estimate_channel(
    channel: &ChannelRealization,
    config: &ScenarioConfig,
    pilot_power: f64,
    seed: u64,
) -> Result<ChannelRealization> {
    let k_users = channel.num_users();
    let tau_p = config
        .pilot_length
        .ok_or_else(|| Error::config("channel estimation needs a pilot length"))?;
    if tau_p == 0 || tau_p > k_users {
        return Err(Error::config(format!(
            "pilot length {tau_p} must lie in [1, K = {k_users}]"
        )));
    }
    if !(pilot_power > 0.0) {
        return Err(Error::config("pilot power must be positive"));
    }
    let sigma2 = config.noise_power;
    let pilots = pilot_assignment(k_users, tau_p);
    let energy = pilot_power * tau_p as f64;
    let amp = libm::sqrt(energy);
    let mut rng = rng_from_seed(derive(seed, stream::PILOTS));

    let mut blocks = Vec::with_capacity(channel.num_aps());
    let mut effective_noise = Vec::with_capacity(channel.num_aps());
    for (l, h) in channel.blocks.iter().enumerate() {
        let n = h.nrows();
        let gains: Vec<f64> = (0..k_users).map(|k| channel.large_scale[(k, l)]).collect();
        let mut shared = alloc::vec![0.0; tau_p];
        for (k, &t) in pilots.iter().enumerate() {
            shared[t] += gains[k];
        }
        let mut h_hat = CMatrix::zeros(n, k_users);
        for i in 0..n {
            // Despread pilot observation per pilot sequence.
            let mut obs = alloc::vec![Complex64::new(0.0, 0.0); tau_p];
            for (k, &t) in pilots.iter().enumerate() {
                obs[t] += h[(i, k)] * amp;
            }
            for o in obs.iter_mut() {
                *o += complex_gaussian(&mut rng, sigma2);
            }
            for (k, &t) in pilots.iter().enumerate() {
                let w = amp * gains[k] / (energy * shared[t] + sigma2);
                h_hat[(i, k)] = obs[t] * w;
            }
        }
        let errors = estimation_error_variance(&gains, tau_p, pilot_power, sigma2);
        effective_noise.push(sigma2 + config.tx_power * errors.iter().sum::<f64>());
        blocks.push(h_hat);
    }
    Ok(ChannelRealization {
        blocks,
        large_scale: channel.large_scale.clone(),
        effective_noise,
    })
}
