//! Fronthaul topologies, memory allocation and link-rate arithmetic.
//!
//! Counts and budgets are kept as exact rationals so that allocations can be
//! checked for conservation without rounding.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Rational = Ratio<u128>;

pub const BITS_PER_KB: u64 = 8 * 1024;
pub const BITS_PER_MB: u64 = BITS_PER_KB * 1024;
/// Default width of a combining weight, bits.
pub const DEFAULT_WEIGHT_WIDTH: u32 = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TopologyKind {
    #[serde(alias = "chain")]
    DaisyChain,
    #[serde(alias = "tree")]
    BinaryFanInTree,
}

impl TopologyKind {
    pub fn name(self) -> &'static str {
        match self {
            TopologyKind::DaisyChain => "chain",
            TopologyKind::BinaryFanInTree => "tree",
        }
    }
}

impl fmt::Display for TopologyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TopologyKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "chain" | "daisy_chain" | "daisychain" => Ok(TopologyKind::DaisyChain),
            "tree" | "binary_fan_in_tree" | "binaryfanintree" => Ok(TopologyKind::BinaryFanInTree),
            _ => Err(Error::input(format!("unknown topology '{s}'"))),
        }
    }
}

/// Processing level of every AP, in fronthaul order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Topology {
    pub kind: TopologyKind,
    pub levels: Vec<u32>,
}

impl Topology {
    pub fn num_aps(&self) -> usize {
        self.levels.len()
    }

    pub fn depth(&self) -> u32 {
        self.levels.iter().copied().max().unwrap_or(0)
    }
}

/// Builds the level map of a topology with `num_aps` APs.
///
/// In the fan-in tree, AP 1 sits at level 1 and every other AP `i` at level
/// `2 + tz(i − 1)`, where `tz` counts trailing zero bits. Each stage therefore
/// merges pairs of branches and the level populations halve per stage; for
/// eight APs the levels are `[1, 2, 3, 2, 4, 2, 3, 2]`.
pub fn build_topology(kind: TopologyKind, num_aps: usize) -> Result<Topology> {
    if num_aps == 0 {
        return Err(Error::config("a topology needs at least one AP"));
    }
    let levels = match kind {
        TopologyKind::DaisyChain => (1..=num_aps as u32).collect(),
        TopologyKind::BinaryFanInTree => {
            if !num_aps.is_power_of_two() {
                return Err(Error::config(format!(
                    "a binary fan-in tree needs a power-of-two AP count, got {num_aps}"
                )));
            }
            (1..=num_aps as u64)
                .map(|i| {
                    if i == 1 {
                        1
                    } else {
                        2 + (i - 1).trailing_zeros()
                    }
                })
                .collect()
        }
    };
    Ok(Topology { kind, levels })
}

/// Received signal vectors each AP buffers: `(level − 1) · N_sc`.
pub fn stored_vectors(topology: &Topology, num_subcarriers: u64) -> Vec<u64> {
    topology
        .levels
        .iter()
        .map(|&lv| u64::from(lv - 1) * num_subcarriers)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MemoryScheme {
    /// Every AP has `C_AP` bits.
    #[serde(alias = "fap")]
    FixedPerAp,
    /// `C_T` split equally: `C_AP = C_T / L`.
    #[serde(alias = "ft_ea")]
    FixedTotalEqual,
    /// `C_T` spread uniformly over every stored vector in the network.
    #[serde(alias = "ft_la")]
    FixedTotalLinear,
    #[serde(alias = "inf")]
    Infinite,
}

impl MemoryScheme {
    pub fn name(self) -> &'static str {
        match self {
            MemoryScheme::FixedPerAp => "fap",
            MemoryScheme::FixedTotalEqual => "ft_ea",
            MemoryScheme::FixedTotalLinear => "ft_la",
            MemoryScheme::Infinite => "inf",
        }
    }
}

impl fmt::Display for MemoryScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MemoryScheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "fap" | "fixed_per_ap" => Ok(MemoryScheme::FixedPerAp),
            "ft_ea" | "fixed_total_equal" => Ok(MemoryScheme::FixedTotalEqual),
            "ft_la" | "fixed_total_linear" => Ok(MemoryScheme::FixedTotalLinear),
            "inf" | "infinite" => Ok(MemoryScheme::Infinite),
            _ => Err(Error::input(format!("unknown memory scheme '{s}'"))),
        }
    }
}

/// Parses `64KB`, `8MB`, `512kb` or a raw bit count.
pub fn parse_capacity(s: &str) -> Result<u64> {
    let t = s.trim();
    let upper = t.to_ascii_uppercase();
    let (digits, unit) = if let Some(d) = upper.strip_suffix("MB") {
        (d, BITS_PER_MB)
    } else if let Some(d) = upper.strip_suffix("KB") {
        (d, BITS_PER_KB)
    } else if let Some(d) = upper.strip_suffix('B') {
        (d, 8)
    } else {
        (upper.as_str(), 1)
    };
    let n: u64 = digits
        .trim()
        .parse()
        .map_err(|_| Error::input(format!("cannot parse capacity '{s}'")))?;
    n.checked_mul(unit)
        .ok_or_else(|| Error::input(format!("capacity '{s}' overflows")))
}

/// Shortest of `NMB`, `NKB` or plain bits that represents `bits` exactly.
pub fn format_capacity(bits: u64) -> String {
    if bits != 0 && bits.is_multiple_of(BITS_PER_MB) {
        format!("{}MB", bits / BITS_PER_MB)
    } else if bits != 0 && bits.is_multiple_of(BITS_PER_KB) {
        format!("{}KB", bits / BITS_PER_KB)
    } else {
        bits.to_string()
    }
}

/// Memory allocation model. `capacity_bits` is `C_AP` for the per-AP scheme
/// and `C_T` for the total-memory schemes; it is ignored when infinite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct MemoryModel {
    pub scheme: MemoryScheme,
    pub capacity_bits: u64,
}

impl MemoryModel {
    pub const INFINITE: MemoryModel = MemoryModel {
        scheme: MemoryScheme::Infinite,
        capacity_bits: 0,
    };

    pub fn new(scheme: MemoryScheme, capacity_bits: u64) -> Result<Self> {
        let m = Self {
            scheme,
            capacity_bits: if scheme == MemoryScheme::Infinite {
                0
            } else {
                capacity_bits
            },
        };
        m.validate()?;
        Ok(m)
    }

    pub fn fap(capacity: &str) -> Result<Self> {
        Self::new(MemoryScheme::FixedPerAp, parse_capacity(capacity)?)
    }

    pub fn ft_ea(capacity: &str) -> Result<Self> {
        Self::new(MemoryScheme::FixedTotalEqual, parse_capacity(capacity)?)
    }

    pub fn ft_la(capacity: &str) -> Result<Self> {
        Self::new(MemoryScheme::FixedTotalLinear, parse_capacity(capacity)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.scheme != MemoryScheme::Infinite && self.capacity_bits == 0 {
            return Err(Error::config(format!(
                "{} memory needs a positive capacity",
                self.scheme
            )));
        }
        Ok(())
    }

    pub fn is_infinite(&self) -> bool {
        self.scheme == MemoryScheme::Infinite
    }

    /// Same scheme with the capacity multiplied by `num / den`, rounded to
    /// the nearest bit (at least one bit).
    pub fn scaled(&self, num: u64, den: u64) -> Self {
        if self.is_infinite() {
            return *self;
        }
        let c = (u128::from(self.capacity_bits) * u128::from(num) + u128::from(den) / 2)
            / u128::from(den);
        Self {
            scheme: self.scheme,
            capacity_bits: (c as u64).max(1),
        }
    }
}

impl fmt::Display for MemoryModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            f.write_str("inf")
        } else {
            write!(f, "{}:{}", self.scheme, format_capacity(self.capacity_bits))
        }
    }
}

impl FromStr for MemoryModel {
    type Err = Error;
    /// `inf`, `fap:64KB`, `ft_ea:8MB`, `ft_la:1048576`.
    fn from_str(s: &str) -> Result<Self> {
        let (scheme, cap) = match s.split_once(':') {
            Some((a, b)) => (a.parse::<MemoryScheme>()?, Some(b)),
            None => (s.parse::<MemoryScheme>()?, None),
        };
        match (scheme, cap) {
            (MemoryScheme::Infinite, _) => Ok(Self::INFINITE),
            (_, Some(c)) => Self::new(scheme, parse_capacity(c)?),
            (_, None) => Err(Error::input(format!("memory model '{s}' needs a capacity"))),
        }
    }
}

impl TryFrom<String> for MemoryModel {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<MemoryModel> for String {
    fn from(m: MemoryModel) -> String {
        m.to_string()
    }
}

/// Bits available for one stored vector at one AP.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BitBudget {
    Unlimited,
    Finite(Rational),
}

impl BitBudget {
    pub fn as_f64(&self) -> f64 {
        match self {
            BitBudget::Unlimited => f64::INFINITY,
            BitBudget::Finite(r) => *r.numer() as f64 / *r.denom() as f64,
        }
    }
}

/// Per-AP bits per stored vector `C_sc`.
///
/// APs at level 1 store nothing and get an unlimited budget, as does every AP
/// under infinite memory.
pub fn bits_per_vector(
    memory: &MemoryModel,
    topology: &Topology,
    num_subcarriers: u64,
) -> Result<Vec<BitBudget>> {
    memory.validate()?;
    if num_subcarriers == 0 {
        return Err(Error::config("need at least one subcarrier"));
    }
    let l = topology.num_aps() as u128;
    let cap = u128::from(memory.capacity_bits);
    let nsc = u128::from(num_subcarriers);
    if memory.scheme == MemoryScheme::FixedTotalLinear && topology.kind != TopologyKind::DaisyChain
    {
        return Err(Error::Unsupported(
            "linear total-memory allocation is only defined on a daisy chain".into(),
        ));
    }
    Ok(topology
        .levels
        .iter()
        .map(|&lv| {
            let stored = u128::from(lv - 1) * nsc;
            if stored == 0 {
                return BitBudget::Unlimited;
            }
            match memory.scheme {
                MemoryScheme::Infinite => BitBudget::Unlimited,
                MemoryScheme::FixedPerAp => BitBudget::Finite(Ratio::new(cap, stored)),
                MemoryScheme::FixedTotalEqual => BitBudget::Finite(Ratio::new(cap, l * stored)),
                MemoryScheme::FixedTotalLinear => {
                    BitBudget::Finite(Ratio::new(2 * cap, l * (l - 1) * nsc))
                }
            }
        })
        .collect())
}

/// Fronthaul word sizes and timing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FronthaulRate {
    /// Bits of one combined element, `max_i(ρ + γ_i) + 1`.
    pub alpha: u64,
    /// Bits per second.
    pub rate: Rational,
    /// `K N_sc (ρ + Σ γ_i) / T_s`, bits per second.
    pub upper_bound: Rational,
}

/// Link rate needed to forward the partially combined signals of `K` users on
/// `N_sc` subcarriers once per symbol of duration `T_s` seconds.
pub fn fronthaul_rate_bound(
    num_users: u64,
    num_subcarriers: u64,
    weight_width: u64,
    element_widths: &[u64],
    symbol_duration: Rational,
) -> Result<FronthaulRate> {
    if symbol_duration == Ratio::from_integer(0) {
        return Err(Error::input("symbol duration must be positive"));
    }
    let alpha = element_widths
        .iter()
        .map(|&g| weight_width + g)
        .max()
        .unwrap_or(weight_width)
        + 1;
    let per_symbol = u128::from(num_users) * u128::from(num_subcarriers);
    let sum =
        u128::from(weight_width) + element_widths.iter().map(|&g| u128::from(g)).sum::<u128>();
    Ok(FronthaulRate {
        alpha,
        rate: Ratio::from_integer(per_symbol * u128::from(alpha)) / symbol_duration,
        upper_bound: Ratio::from_integer(per_symbol * sum) / symbol_duration,
    })
}

/// Resolved per-AP memory plan for one network.
#[derive(Debug, Clone, PartialEq)]
pub struct ResourcePlan {
    pub topology: Topology,
    pub memory: MemoryModel,
    pub stored_vectors: Vec<u64>,
    pub bits_per_vector: Vec<BitBudget>,
    pub weight_width: u32,
}

impl ResourcePlan {
    pub fn new(
        kind: TopologyKind,
        num_aps: usize,
        memory: MemoryModel,
        num_subcarriers: u64,
    ) -> Result<Self> {
        let topology = build_topology(kind, num_aps)?;
        let bits = bits_per_vector(&memory, &topology, num_subcarriers)?;
        Ok(Self {
            stored_vectors: stored_vectors(&topology, num_subcarriers),
            bits_per_vector: bits,
            topology,
            memory,
            weight_width: DEFAULT_WEIGHT_WIDTH,
        })
    }

    /// `C_sc` per AP as floating point.
    pub fn budgets(&self) -> Vec<f64> {
        self.bits_per_vector.iter().map(BitBudget::as_f64).collect()
    }

    /// Bits actually used, `Σ_l C_sc(l) · stored(l)` over APs that store
    /// something; `None` under infinite memory.
    pub fn allocated_bits(&self) -> Option<Rational> {
        let mut acc = Ratio::from_integer(0u128);
        for (b, &s) in self.bits_per_vector.iter().zip(&self.stored_vectors) {
            match b {
                BitBudget::Finite(r) => acc += *r * Ratio::from_integer(u128::from(s)),
                BitBudget::Unlimited if s > 0 => return None,
                BitBudget::Unlimited => {}
            }
        }
        Some(acc)
    }
}
