use seqfront_core::compression::CompressionOption;
use seqfront_core::experiments::{
    figure_preset, run_experiment, ExperimentSpec, FigurePreset, SeReport, SweepAxis, SweepParam,
};
use seqfront_core::resources::{MemoryModel, TopologyKind};

const L_SWEEP: [f64; 7] = [2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0];

fn mean_of(report: &SeReport, option: CompressionOption, value: &str) -> f64 {
    let rows = report.find(|r| r.option == option && r.sweep_value == value);
    assert_eq!(rows.len(), 1, "{option} at {value}");
    rows[0].mean_se
}

#[test]
fn identical_specs_give_identical_reports() {
    let spec = ExperimentSpec {
        sweep: vec![SweepAxis::new(SweepParam::L, &[4.0, 16.0])],
        memory: vec![MemoryModel::fap("64KB").unwrap()],
        num_trials: 5,
        base_seed: 42,
        ..ExperimentSpec::default()
    };
    let a = run_experiment(&spec).unwrap();
    let b = run_experiment(&spec).unwrap();
    assert_eq!(a.rows, b.rows);
    let other = run_experiment(&ExperimentSpec {
        base_seed: 43,
        ..spec
    })
    .unwrap();
    assert_ne!(a.rows[0].mean_se, other.rows[0].mean_se);
}

#[test]
fn compression_options_keep_their_order_on_average() {
    use CompressionOption::*;
    let spec = ExperimentSpec {
        sweep: vec![SweepAxis::new(SweepParam::L, &L_SWEEP)],
        memory: vec![MemoryModel::fap("64KB").unwrap()],
        options: vec![
            VectorWise,
            ElementWise,
            ElementWiseEqualBits,
            PcaElementWise,
        ],
        num_trials: 200,
        base_seed: 9,
        ..ExperimentSpec::default()
    };
    let report = run_experiment(&spec).unwrap();
    for l in L_SWEEP {
        let v = l.to_string();
        let vc = mean_of(&report, VectorWise, &v);
        let ec = mean_of(&report, ElementWise, &v);
        let eq = mean_of(&report, ElementWiseEqualBits, &v);
        let pca = mean_of(&report, PcaElementWise, &v);
        assert!(vc >= ec - 1e-12, "L={l}: vc {vc} < ec {ec}");
        assert!(ec >= eq - 1e-12, "L={l}: ec {ec} < equal bits {eq}");
        assert!((pca - vc).abs() <= 1e-9 * vc, "L={l}: pca {pca} vs vc {vc}");
    }
}

#[test]
fn fixed_per_ap_memory_peaks_inside_the_sweep() {
    let spec = ExperimentSpec {
        sweep: vec![SweepAxis::new(SweepParam::L, &L_SWEEP)],
        memory: vec![MemoryModel::fap("64KB").unwrap()],
        num_trials: 200,
        ..ExperimentSpec::default()
    };
    let report = run_experiment(&spec).unwrap();
    let means: Vec<f64> = report.rows.iter().map(|r| r.mean_se).collect();
    let best = means
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap();
    assert!(best > 0 && best < means.len() - 1, "{means:?}");
}

#[test]
fn doubling_trials_moves_means_by_less_than_three_standard_errors() {
    let spec = ExperimentSpec {
        sweep: vec![SweepAxis::new(SweepParam::L, &[2.0, 8.0, 32.0, 128.0])],
        memory: vec![MemoryModel::INFINITE, MemoryModel::ft_ea("8MB").unwrap()],
        num_trials: 100,
        base_seed: 5,
        ..ExperimentSpec::default()
    };
    let small = run_experiment(&spec).unwrap();
    let large = run_experiment(&ExperimentSpec {
        num_trials: 200,
        ..spec
    })
    .unwrap();
    for (a, b) in small.rows.iter().zip(&large.rows) {
        let se = b.std_se / (b.samples.len() as f64).sqrt();
        assert!((a.mean_se - b.mean_se).abs() < 3.0 * se, "{a:?} vs {b:?}");
    }
}

#[test]
fn unsupported_combinations_become_empty_rows() {
    let spec = ExperimentSpec {
        sweep: vec![SweepAxis::new(SweepParam::L, &[8.0])],
        memory: vec![MemoryModel::ft_la("8MB").unwrap()],
        topologies: vec![TopologyKind::DaisyChain, TopologyKind::BinaryFanInTree],
        num_trials: 3,
        ..ExperimentSpec::default()
    };
    let report = run_experiment(&spec).unwrap();
    let tree = report.find(|r| r.topology == TopologyKind::BinaryFanInTree);
    assert_eq!(tree.len(), 1);
    assert!(!tree[0].is_feasible());
    assert_eq!(tree[0].trials, 0);
    assert!(tree[0].mean_se.is_nan());
    let chain = report.find(|r| r.topology == TopologyKind::DaisyChain);
    assert!(chain[0].is_feasible());
}

#[test]
fn desk_figure_three_has_every_curve_point() {
    let mut spec = figure_preset(FigurePreset::Fig3).desk();
    spec.num_trials = 2;
    let report = run_experiment(&spec).unwrap();
    // K in {4, 64}, L in {2, 4, 8, 16}, five memory models
    assert_eq!(report.rows.len(), 2 * 4 * 5);
    assert!(report
        .rows
        .iter()
        .all(|r| r.total_antennas == 16 && r.trials == 2));
}

#[test]
fn imperfect_csi_costs_se() {
    let base = ExperimentSpec {
        sweep: vec![SweepAxis::new(SweepParam::L, &[8.0, 32.0])],
        num_trials: 50,
        ..ExperimentSpec::default()
    };
    let perfect = run_experiment(&base).unwrap();
    let mut spec = base.clone();
    spec.scenario.pilot_length = Some(1);
    let contaminated = run_experiment(&spec).unwrap();
    for (a, b) in perfect.rows.iter().zip(&contaminated.rows) {
        assert!(b.mean_se < a.mean_se, "{} vs {}", b.mean_se, a.mean_se);
    }
}
