//! Monte-Carlo sweeps of the average per-user spectral efficiency.
//!
//! An [`ExperimentSpec`] names a scenario template, a cartesian product of
//! sweep axes and the list of (topology, memory model, compression option)
//! combinations to evaluate at each sweep point. Every trial draws a fresh
//! channel from a seed derived from `(base_seed, point, trial)`; all
//! combinations at a point share that draw. User positions come from a seed
//! derived from `(base_seed, trial)` alone, so the points of a sweep are
//! compared on the same user drops.
//!
//! The work is split into [`prepare_points`], [`PreparedPoint::run_trial`] and
//! [`assemble_report`] so that callers can schedule trials however they like
//! and still get identical numbers.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::compression::{solve, CompressionOption};
use crate::error::{Error, Result};
use crate::estimation::{sum_se_exact, ApModel};
use crate::resources::{MemoryModel, ResourcePlan, TopologyKind};
use crate::rng::{drop_seed, trial_seed};
use crate::scenario::{
    build_geometry, estimate_channel, sample_channel, ChannelRealization, ScenarioConfig,
};

pub const FULL_SCALE_TRIALS: usize = 500;
pub const DESK_TRIALS: usize = 100;
pub const DESK_ANTENNAS: usize = 16;
pub const DESK_SUBCARRIERS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SweepParam {
    /// Number of APs; the antennas per AP follow as `M / L`.
    L,
    /// Number of users.
    K,
    /// Total number of antennas.
    M,
    /// Pilot length (switches on imperfect CSI).
    #[serde(rename = "tau_p")]
    TauP,
    /// Side of the square area, metres.
    D,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::L => "L",
            SweepParam::K => "K",
            SweepParam::M => "M",
            SweepParam::TauP => "tau_p",
            SweepParam::D => "D",
        }
    }

    fn is_integer(self) -> bool {
        self != SweepParam::D
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepParam {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "L" | "l" | "num_aps" => Ok(SweepParam::L),
            "K" | "k" | "num_users" => Ok(SweepParam::K),
            "M" | "m" | "total_antennas" => Ok(SweepParam::M),
            "tau_p" | "pilot_length" => Ok(SweepParam::TauP),
            "D" | "d" | "area_side" => Ok(SweepParam::D),
            _ => Err(Error::input(format!("unknown sweep parameter '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxis {
    pub param: SweepParam,
    pub values: Vec<f64>,
}

impl SweepAxis {
    pub fn new(param: SweepParam, values: &[f64]) -> Self {
        Self {
            param,
            values: values.to_vec(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum FigurePreset {
    Fig3,
    Fig5,
    Fig6,
    Fig7,
    Fig8,
    Fig9,
    Fig10,
    #[default]
    Custom,
}

impl FigurePreset {
    pub const ALL: [FigurePreset; 8] = [
        FigurePreset::Fig3,
        FigurePreset::Fig5,
        FigurePreset::Fig6,
        FigurePreset::Fig7,
        FigurePreset::Fig8,
        FigurePreset::Fig9,
        FigurePreset::Fig10,
        FigurePreset::Custom,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FigurePreset::Fig3 => "Fig3",
            FigurePreset::Fig5 => "Fig5",
            FigurePreset::Fig6 => "Fig6",
            FigurePreset::Fig7 => "Fig7",
            FigurePreset::Fig8 => "Fig8",
            FigurePreset::Fig9 => "Fig9",
            FigurePreset::Fig10 => "Fig10",
            FigurePreset::Custom => "Custom",
        }
    }
}

impl fmt::Display for FigurePreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FigurePreset {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        let t = t.strip_prefix("fig").unwrap_or(&t);
        Ok(match t {
            "3" => FigurePreset::Fig3,
            "5" => FigurePreset::Fig5,
            "6" => FigurePreset::Fig6,
            "7" => FigurePreset::Fig7,
            "8" => FigurePreset::Fig8,
            "9" => FigurePreset::Fig9,
            "10" => FigurePreset::Fig10,
            "custom" => FigurePreset::Custom,
            _ => return Err(Error::input(format!("unknown figure preset '{s}'"))),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentSpec {
    /// Template; swept fields are overwritten per point. `num_aps` and
    /// `antennas_per_ap` are derived from `total_antennas` and the L value.
    pub scenario: ScenarioConfig,
    pub total_antennas: usize,
    pub sweep: Vec<SweepAxis>,
    pub memory: Vec<MemoryModel>,
    pub options: Vec<CompressionOption>,
    pub topologies: Vec<TopologyKind>,
    pub num_trials: usize,
    pub base_seed: u64,
    pub preset: FigurePreset,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        let scenario = ScenarioConfig::default();
        Self {
            total_antennas: 128,
            sweep: vec![SweepAxis::new(SweepParam::L, &l_values(128))],
            memory: vec![MemoryModel::INFINITE],
            options: vec![CompressionOption::VectorWise],
            topologies: vec![TopologyKind::DaisyChain],
            num_trials: FULL_SCALE_TRIALS,
            base_seed: 1,
            preset: FigurePreset::Custom,
            scenario,
        }
    }
}

/// Powers of two from 2 up to `max`.
fn l_values(max: usize) -> Vec<f64> {
    let mut v = Vec::new();
    let mut l = 2;
    while l <= max {
        v.push(l as f64);
        l *= 2;
    }
    v
}

fn mem(s: &str) -> MemoryModel {
    s.parse().expect("preset memory strings are valid")
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        if self.num_trials == 0 {
            return Err(Error::config("num_trials must be at least 1"));
        }
        if self.total_antennas == 0 {
            return Err(Error::config("total_antennas must be positive"));
        }
        if self.memory.is_empty() || self.options.is_empty() || self.topologies.is_empty() {
            return Err(Error::config(
                "memory, options and topologies each need at least one entry",
            ));
        }
        for m in &self.memory {
            m.validate()?;
        }
        for axis in &self.sweep {
            if axis.values.is_empty() {
                return Err(Error::config(format!(
                    "sweep axis {} has no values",
                    axis.param
                )));
            }
            for &v in &axis.values {
                let ok = v.is_finite()
                    && v > 0.0
                    && (!axis.param.is_integer() || (v == libm::trunc(v) && v < 1e15));
                if !ok {
                    return Err(Error::config(format!(
                        "sweep value {v} is not valid for {}",
                        axis.param
                    )));
                }
            }
        }
        let mut seen = Vec::new();
        for axis in &self.sweep {
            if seen.contains(&axis.param) {
                return Err(Error::config(format!(
                    "sweep axis {} appears twice",
                    axis.param
                )));
            }
            seen.push(axis.param);
        }
        let mut base = self.scenario.clone();
        base.num_aps = 1;
        base.antennas_per_ap = 1;
        base.validate()
            .or_else(|e| match (&e, self.swept(SweepParam::TauP)) {
                // a pilot length sweep overrides the template value
                (Error::InvalidConfig(_), true) => Ok(()),
                _ => Err(e),
            })
    }

    fn swept(&self, p: SweepParam) -> bool {
        self.sweep.iter().any(|a| a.param == p)
    }

    /// Sweep points in row-major order of the axes (the last axis varies
    /// fastest).
    pub fn points(&self) -> Vec<SweepPoint> {
        let mut combos: Vec<Vec<(SweepParam, f64)>> = vec![Vec::new()];
        for axis in &self.sweep {
            let mut next = Vec::with_capacity(combos.len() * axis.values.len());
            for c in &combos {
                for &v in &axis.values {
                    let mut c = c.clone();
                    c.push((axis.param, v));
                    next.push(c);
                }
            }
            combos = next;
        }
        combos
            .into_iter()
            .enumerate()
            .map(|(index, assignments)| SweepPoint { index, assignments })
            .collect()
    }

    /// Distinct `(topology, memory, option)` combinations evaluated at each
    /// point. Infinite memory makes the compression option irrelevant, so it
    /// yields a single uncompressed combination per topology.
    pub fn combinations(&self) -> Vec<Combination> {
        let mut out: Vec<Combination> = Vec::new();
        for &topology in &self.topologies {
            for &memory in &self.memory {
                for &option in &self.options {
                    let c = if memory.is_infinite() || option == CompressionOption::None {
                        Combination {
                            topology,
                            memory: MemoryModel::INFINITE,
                            option: CompressionOption::None,
                        }
                    } else {
                        Combination {
                            topology,
                            memory,
                            option,
                        }
                    };
                    if !out.contains(&c) {
                        out.push(c);
                    }
                }
            }
        }
        out
    }

    /// Smaller version of a full-scale spec: `M = 16`, `N_sc = 64`, 100
    /// trials, memory scaled by the subcarrier ratio, `L ≤ 16`.
    pub fn desk(mut self) -> Self {
        let ratio_num = DESK_SUBCARRIERS as u64;
        let ratio_den = self.scenario.num_subcarriers as u64;
        let antenna_scale = self.total_antennas as f64 / DESK_ANTENNAS as f64;
        self.memory = self
            .memory
            .iter()
            .map(|m| m.scaled(ratio_num, ratio_den))
            .collect();
        self.scenario.num_subcarriers = DESK_SUBCARRIERS;
        self.scenario.num_aps = ((self.scenario.num_aps as f64 / antenna_scale) as usize).max(1);
        self.total_antennas = DESK_ANTENNAS;
        self.num_trials = DESK_TRIALS;
        for axis in &mut self.sweep {
            match axis.param {
                SweepParam::L => {
                    let kept: Vec<f64> = axis
                        .values
                        .iter()
                        .copied()
                        .filter(|&v| v <= DESK_ANTENNAS as f64)
                        .collect();
                    axis.values = if kept.is_empty() {
                        // a fixed L beyond the desk antenna count keeps N = M/L
                        axis.values
                            .iter()
                            .map(|&v| libm::round(v / antenna_scale).max(1.0))
                            .collect()
                    } else {
                        kept
                    };
                }
                SweepParam::M => {
                    for v in &mut axis.values {
                        *v = libm::round(*v / antenna_scale).max(1.0);
                    }
                }
                _ => {}
            }
        }
        self
    }
}

/// Full-scale parameterisation of a figure.
pub fn figure_preset(preset: FigurePreset) -> ExperimentSpec {
    let base = ExperimentSpec {
        preset,
        ..ExperimentSpec::default()
    };
    let l_axis = SweepAxis::new(SweepParam::L, &l_values(128));
    let k_axis = SweepAxis::new(SweepParam::K, &[4.0, 64.0]);
    use CompressionOption::*;
    match preset {
        FigurePreset::Fig3 => ExperimentSpec {
            sweep: vec![k_axis, l_axis],
            memory: vec![
                MemoryModel::INFINITE,
                mem("fap:256KB"),
                mem("fap:64KB"),
                mem("ft_ea:32MB"),
                mem("ft_ea:8MB"),
            ],
            ..base
        },
        FigurePreset::Fig5 => {
            let mut memory = vec![MemoryModel::INFINITE];
            memory.extend(["64KB", "128KB", "192KB", "256KB"].map(|c| mem(&format!("fap:{c}"))));
            memory.extend(["8MB", "16MB", "24MB", "32MB"].map(|c| mem(&format!("ft_ea:{c}"))));
            let mut scenario = base.scenario.clone();
            scenario.num_aps = 32;
            ExperimentSpec {
                scenario,
                sweep: vec![k_axis, SweepAxis::new(SweepParam::L, &[32.0])],
                memory,
                ..base
            }
        }
        FigurePreset::Fig6 => ExperimentSpec {
            sweep: vec![
                k_axis,
                SweepAxis::new(SweepParam::M, &[128.0, 256.0]),
                SweepAxis::new(SweepParam::L, &l_values(256)),
            ],
            memory: vec![MemoryModel::INFINITE, mem("ft_ea:32MB")],
            ..base
        },
        FigurePreset::Fig7 => ExperimentSpec {
            sweep: vec![k_axis, l_axis],
            memory: vec![mem("fap:256KB"), mem("fap:64KB")],
            options: vec![PcaElementWise, VectorWise, ElementWise],
            ..base
        },
        FigurePreset::Fig8 => ExperimentSpec {
            sweep: vec![SweepAxis::new(SweepParam::TauP, &[1.0, 2.0]), l_axis],
            memory: vec![mem("fap:64KB"), MemoryModel::INFINITE],
            options: vec![PcaElementWise, VectorWise, ElementWise],
            ..base
        },
        FigurePreset::Fig9 => ExperimentSpec {
            sweep: vec![k_axis, l_axis],
            memory: vec![
                mem("ft_la:8MB"),
                mem("ft_ea:8MB"),
                mem("ft_la:32MB"),
                mem("ft_ea:32MB"),
            ],
            ..base
        },
        FigurePreset::Fig10 => ExperimentSpec {
            sweep: vec![k_axis, l_axis],
            memory: vec![mem("ft_ea:512KB"), mem("ft_ea:8MB")],
            topologies: vec![TopologyKind::DaisyChain, TopologyKind::BinaryFanInTree],
            ..base
        },
        FigurePreset::Custom => base,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Combination {
    pub topology: TopologyKind,
    pub memory: MemoryModel,
    pub option: CompressionOption,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub index: usize,
    pub assignments: Vec<(SweepParam, f64)>,
}

impl SweepPoint {
    pub fn get(&self, p: SweepParam) -> Option<f64> {
        self.assignments
            .iter()
            .find(|(q, _)| *q == p)
            .map(|&(_, v)| v)
    }

    /// Axis names joined with `;`.
    pub fn param_label(&self) -> String {
        join(self.assignments.iter().map(|(p, _)| p.name().to_string()))
    }

    /// Axis values joined with `;`.
    pub fn value_label(&self) -> String {
        join(self.assignments.iter().map(|&(_, v)| format_value(v)))
    }
}

fn join(it: impl Iterator<Item = String>) -> String {
    let parts: Vec<String> = it.collect();
    parts.join(";")
}

/// Integers print without a fractional part; other values use the shortest
/// round-tripping representation.
pub fn format_value(v: f64) -> String {
    if v == libm::trunc(v) && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v}")
    }
}

/// A sweep point with its scenario and resource plans resolved.
#[derive(Debug, Clone)]
pub struct PreparedPoint {
    pub point: SweepPoint,
    pub scenario: ScenarioConfig,
    pub total_antennas: usize,
    pub combinations: Vec<Combination>,
    /// Plan per combination, or the reason it cannot be evaluated.
    pub plans: Vec<core::result::Result<ResourcePlan, Error>>,
}

fn point_scenario(spec: &ExperimentSpec, point: &SweepPoint) -> Result<(ScenarioConfig, usize)> {
    let mut cfg = spec.scenario.clone();
    let mut m = spec.total_antennas;
    let mut l = cfg.num_aps;
    for &(p, v) in &point.assignments {
        match p {
            SweepParam::L => l = v as usize,
            SweepParam::K => cfg.num_users = v as usize,
            SweepParam::M => m = v as usize,
            SweepParam::TauP => cfg.pilot_length = Some(v as usize),
            SweepParam::D => cfg.area_side = v,
        }
    }
    let cfg = cfg.with_split(m, l)?;
    cfg.validate()?;
    Ok((cfg, m))
}

/// Resolves every sweep point of `spec`. Points whose parameters are
/// infeasible (for example `L` not dividing `M`) carry the error in every
/// plan slot.
pub fn prepare_points(spec: &ExperimentSpec) -> Result<Vec<PreparedPoint>> {
    spec.validate()?;
    let combinations = spec.combinations();
    Ok(spec
        .points()
        .into_iter()
        .map(|point| match point_scenario(spec, &point) {
            Ok((scenario, total_antennas)) => {
                let plans = combinations
                    .iter()
                    .map(|c| {
                        ResourcePlan::new(
                            c.topology,
                            scenario.num_aps,
                            c.memory,
                            scenario.num_subcarriers as u64,
                        )
                    })
                    .collect();
                PreparedPoint {
                    point,
                    scenario,
                    total_antennas,
                    combinations: combinations.clone(),
                    plans,
                }
            }
            Err(e) => {
                let mut scenario = spec.scenario.clone();
                if let Some(k) = point.get(SweepParam::K) {
                    scenario.num_users = k as usize;
                }
                let total_antennas = point
                    .get(SweepParam::M)
                    .map_or(spec.total_antennas, |m| m as usize);
                PreparedPoint {
                    point,
                    scenario,
                    total_antennas,
                    plans: vec![Err(e); combinations.len()],
                    combinations: combinations.clone(),
                }
            }
        })
        .collect())
}

/// Per-user SE of one combination on one channel draw.
pub fn evaluate(
    channel: &ChannelRealization,
    plan: &ResourcePlan,
    option: CompressionOption,
    scenario: &ScenarioConfig,
) -> Result<f64> {
    let p = scenario.tx_power;
    let budgets = plan.budgets();
    let mut models = Vec::with_capacity(channel.num_aps());
    for ((h, &noise), &budget) in channel
        .blocks
        .iter()
        .zip(&channel.effective_noise)
        .zip(&budgets)
    {
        let sol = solve(option, h, p, noise, budget)?;
        models.push(ApModel::from_solution(h, &sol));
    }
    let sum = sum_se_exact(&models, p, scenario.prelog)?;
    Ok(sum / channel.num_users() as f64)
}

impl PreparedPoint {
    /// Channel draw of trial `trial`, after channel estimation when the
    /// scenario has a pilot length.
    pub fn draw_channel(&self, base_seed: u64, trial: usize) -> Result<ChannelRealization> {
        let seed = trial_seed(base_seed, self.point.index as u64, trial as u64);
        let geometry = build_geometry(&self.scenario, drop_seed(base_seed, trial as u64));
        let channel = sample_channel(&geometry, &self.scenario, seed)?;
        match self.scenario.pilot_length {
            Some(_) => estimate_channel(
                &channel,
                &self.scenario,
                self.scenario.effective_pilot_power(),
                seed,
            ),
            None => Ok(channel),
        }
    }

    /// Per-user SE of every combination for one trial; `None` where the
    /// combination is infeasible.
    pub fn run_trial(&self, base_seed: u64, trial: usize) -> Result<Vec<Option<f64>>> {
        if self.plans.iter().all(|p| p.is_err()) {
            return Ok(vec![None; self.plans.len()]);
        }
        let channel = self.draw_channel(base_seed, trial)?;
        self.combinations
            .iter()
            .zip(&self.plans)
            .map(|(c, plan)| match plan {
                Err(_) => Ok(None),
                Ok(plan) => match evaluate(&channel, plan, c.option, &self.scenario) {
                    Ok(v) => Ok(Some(v)),
                    Err(e) if e.is_infeasible() => Ok(None),
                    Err(e) => Err(e),
                },
            })
            .collect()
    }
}

/// One line of the report.
#[derive(Debug, Clone, PartialEq)]
pub struct SeRow {
    pub sweep_param: String,
    pub sweep_value: String,
    pub option: CompressionOption,
    pub memory: MemoryModel,
    pub topology: TopologyKind,
    pub num_users: usize,
    pub total_antennas: usize,
    /// Average per-user SE, bits/s/Hz; NaN for an infeasible row.
    pub mean_se: f64,
    /// Sample standard deviation over trials of the per-user SE.
    pub std_se: f64,
    /// Number of trials that contributed; 0 for an infeasible row.
    pub trials: usize,
    pub seed: u64,
    /// Per-trial per-user SE, in trial order. Not serialised.
    pub samples: Vec<f64>,
}

impl SeRow {
    pub fn is_feasible(&self) -> bool {
        self.trials > 0
    }

    /// Label of the curve this row belongs to (everything except the
    /// L value).
    pub fn curve_label(&self) -> String {
        let mut fixed = Vec::new();
        for (p, v) in self.sweep_param.split(';').zip(self.sweep_value.split(';')) {
            if p != "L" && !p.is_empty() {
                fixed.push(format!("{p}={v}"));
            }
        }
        fixed.push(format!("option={}", self.option));
        fixed.push(format!("memory={}", self.memory));
        fixed.push(format!("topology={}", self.topology));
        fixed.join(",")
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ReportMetadata {
    pub version: String,
    pub preset: String,
    /// Effective configuration that produced the report, as text.
    pub config: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SeReport {
    pub rows: Vec<SeRow>,
    pub metadata: ReportMetadata,
}

impl SeReport {
    /// Rows whose labels and fields match the given filter.
    pub fn find(&self, filter: impl Fn(&SeRow) -> bool) -> Vec<&SeRow> {
        self.rows.iter().filter(|r| filter(r)).collect()
    }
}

fn mean_std(samples: &[f64]) -> (f64, f64) {
    let n = samples.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = samples.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
    (mean, libm::sqrt(var))
}

/// Builds the report from per-point, per-trial outcomes as returned by
/// [`PreparedPoint::run_trial`], indexed `[point][trial][combination]`.
pub fn assemble_report(
    spec: &ExperimentSpec,
    points: &[PreparedPoint],
    outcomes: &[Vec<Vec<Option<f64>>>],
) -> SeReport {
    let mut rows = Vec::new();
    for (pp, trials) in points.iter().zip(outcomes) {
        for (ci, c) in pp.combinations.iter().enumerate() {
            let samples: Vec<f64> = trials.iter().filter_map(|t| t[ci]).collect();
            let (mean_se, std_se) = mean_std(&samples);
            rows.push(SeRow {
                sweep_param: pp.point.param_label(),
                sweep_value: pp.point.value_label(),
                option: c.option,
                memory: c.memory,
                topology: c.topology,
                num_users: pp.scenario.num_users,
                total_antennas: pp.total_antennas,
                mean_se,
                std_se,
                trials: samples.len(),
                seed: spec.base_seed,
                samples,
            });
        }
    }
    SeReport {
        rows,
        metadata: ReportMetadata {
            version: String::from(env!("CARGO_PKG_VERSION")),
            preset: spec.preset.to_string(),
            config: String::new(),
        },
    }
}

/// Runs every point and trial in order on the current thread.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<SeReport> {
    let points = prepare_points(spec)?;
    let mut outcomes = Vec::with_capacity(points.len());
    for pp in &points {
        let mut per_trial = Vec::with_capacity(spec.num_trials);
        for t in 0..spec.num_trials {
            per_trial.push(pp.run_trial(spec.base_seed, t)?);
        }
        outcomes.push(per_trial);
    }
    Ok(assemble_report(spec, &points, &outcomes))
}
