//! Experiment registry: typed parameters per experiment, per-replicate seed
//! derivation, order-independent parallel execution, and canonical CSV
//! rendering.
//!
//! Schemas the core modules pin down (`calibration-curve`, policy tables,
//! mastery trace and map, the apps comparison tables, anchor dumps) are
//! emitted with exactly those columns. Seeded sampling experiments prepend
//! `replicate,seed` so multi-replicate output stays self-describing.

use crate::{num, numerical, validation, write_file, HarnessError};
use jagged_core::applications::{
    classify_adoption, classify_delegation, convex_blind_value, verification_decision,
    ConvexStakes, ProviderProfile,
};
use jagged_core::coverage::{
    couple_and_scale, mrs_scale_regularity, reliability_wedge, split_gap_gain,
    voronoi_size_bias_check, RegularityIndex,
};
use jagged_core::landscape::{sample_knowledge_points, KnowledgeSet, LandscapeConfig};
use jagged_core::mastery::{
    abstention_trap_experiment, bridge_fringe, uncertainty_sampling_run, ErrorMap,
    FringeDescription, GpModel, Kernel, MasteryConfig, MasteryError,
};
use jagged_core::mc::estimate_from_samples;
use jagged_core::quad::QuadSpec;
use jagged_core::reasoning::{
    cutoff_policy, inspection_amplification_mc, option_value_mc, PolicyRegime,
};
use jagged_core::reliability::{
    blind_value, calibrated_value, cost_of_blindness, marginal_return, use_share,
    BlindnessMethod, MarginalMode, ReliabilityIndex,
};
use jagged_core::rng::{derive_seed, derived_rng};
use rand::Rng as _;
use rayon::prelude::*;
use std::path::PathBuf;

/// A typed, validated experiment with all module parameters bound.
#[derive(Debug, Clone)]
pub enum Experiment {
    CalibrationCurve { r_min: f64, r_max: f64, points: usize },
    MarginalReturns { r_min: f64, r_max: f64, points: usize },
    Landscape { intensity: f64, domain: f64, tasks: usize },
    LandscapeAnchors { intensity: f64, domain: f64 },
    ScalingCoupling { intensity: f64, scaled_intensity: f64, domain: f64, probes: usize },
    ScalingWedge { intensity: f64, stakes: f64, points: usize },
    ScalingSplitGap { gaps: Vec<f64>, alphas: Vec<f64>, domain: f64 },
    ReasoningPolicy { stakes: Vec<f64>, costs: Vec<f64>, noise_floors: Vec<f64> },
    ReasoningOption { intensity: f64, stakes: f64, cost: f64, noise_floor: f64, samples: u64 },
    ReasoningAmplification { intensity: f64, noise_floor: f64, samples: u64 },
    MasteryTrace {
        span: f64,
        grid_points: usize,
        length_scale: f64,
        noise_variance: f64,
        beta: f64,
        stakes: f64,
        horizon: usize,
    },
    MasteryMap { span: f64, grid_points: usize },
    MasteryFringe { gaps: Vec<f64>, stakes: f64 },
    MasteryTrap { horizon: usize, forced: Option<(usize, usize)> },
    AppsSorting {
        high: (f64, f64),
        low: (f64, f64),
        convexity: f64,
        q_min: f64,
        q_max: f64,
        points: usize,
    },
    AppsAdoption { cv: f64, r_min: f64, r_max: f64, points: usize },
    AppsDelegation { cv: f64, effort_cost: f64, r_min: f64, r_max: f64, points: usize },
    AppsVerification { intensity: f64, verification_cost: f64, stakes: Vec<f64> },
    Voronoi { points: usize, probes: usize, box_side: f64 },
}

/// An experiment plus run bookkeeping: replicate count, base seed, worker
/// budget, and an optional CSV destination.
#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub experiment: Experiment,
    pub replicates: u64,
    pub base_seed: u64,
    pub workers: usize,
    pub out: Option<PathBuf>,
}

/// One replicate's results: bookkeeping, the parameter echo, and the CSV
/// rows it produced.
#[derive(Debug, Clone)]
pub struct RunRecord {
    pub experiment: &'static str,
    pub replicate: u64,
    pub seed: u64,
    pub params: Vec<(&'static str, String)>,
    pub rows: Vec<Vec<String>>,
}

/// Evenly spaced grid, inclusive of both ends; a single point sits at `lo`.
fn linspace(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>, HarnessError> {
    if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
        return Err(HarnessError::Validation(format!(
            "grid bounds must be finite with min <= max, got [{lo}, {hi}]"
        )));
    }
    if n == 0 {
        return Err(HarnessError::Validation("grid needs at least one point".into()));
    }
    if n == 1 {
        return Ok(vec![lo]);
    }
    let step = (hi - lo) / (n - 1) as f64;
    Ok((0..n).map(|i| lo + step * i as f64).collect())
}

fn mastery_err(e: MasteryError) -> HarnessError {
    match e {
        MasteryError::FactorizationFailed { .. } => numerical(e),
        other => validation(other),
    }
}

/// The single-gap error landscape the mastery experiments learn: bridge
/// variance between anchors at 0 and `span`.
fn bridge_error_map(span: f64, grid_points: usize) -> Result<(Vec<f64>, ErrorMap), HarnessError> {
    if grid_points < 2 {
        return Err(HarnessError::Validation(format!(
            "grid needs at least two points, got {grid_points}"
        )));
    }
    let ks = KnowledgeSet::from_parts(vec![0.0, span], vec![0.0, 0.0]).map_err(validation)?;
    let grid = linspace(0.0, span, grid_points)?;
    let map = ErrorMap::from_fn(&grid, |x| {
        ks.posterior_at(x).expect("grid point inside the anchored span").variance
    })
    .map_err(validation)?;
    Ok((grid, map))
}

/// Canned trap geometry: a near cluster the prior data anchors and a far
/// cluster a compact kernel cannot reach, where the two maps disagree.
fn trap_setting(horizon: usize) -> Result<(ErrorMap, ErrorMap, MasteryConfig), HarnessError> {
    let mut grid: Vec<f64> = (0..17).map(|i| i as f64 * 0.125).collect();
    grid.extend((0..17).map(|i| 10.0 + i as f64 * 0.125));
    let map = ErrorMap::from_fn(&grid, |x| if x < 5.0 { 0.2 } else { 0.9 }).map_err(validation)?;
    let hidden =
        ErrorMap::from_fn(&grid, |x| if x < 5.0 { 0.2 } else { 0.1 }).map_err(validation)?;
    // sqrt(beta) = 1.1: unreached points stay unsafe at unit stakes while
    // the safe set can creep along the explored cluster.
    let config = MasteryConfig::new(1.21, 1.0, grid, horizon).map_err(validation)?;
    Ok((map, hidden, config))
}

const TRAP_PRIOR: [(f64, f64); 2] = [(0.5, 0.2), (1.5, 0.25)];
const TRAP_KERNEL: Kernel = Kernel::CompactSupport { radius: 1.0 };
const TRAP_NOISE: f64 = 0.05;

fn option_cell(v: Option<String>) -> String {
    v.unwrap_or_default()
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::CalibrationCurve { .. } => "calibration-curve",
            Experiment::MarginalReturns { .. } => "marginal-returns",
            Experiment::Landscape { .. } => "landscape",
            Experiment::LandscapeAnchors { .. } => "landscape-anchors",
            Experiment::ScalingCoupling { .. } => "scaling-coupling",
            Experiment::ScalingWedge { .. } => "scaling-wedge",
            Experiment::ScalingSplitGap { .. } => "scaling-splitgap",
            Experiment::ReasoningPolicy { .. } => "reasoning-policy",
            Experiment::ReasoningOption { .. } => "reasoning-option",
            Experiment::ReasoningAmplification { .. } => "reasoning-amplification",
            Experiment::MasteryTrace { .. } => "mastery-trace",
            Experiment::MasteryMap { .. } => "mastery-map",
            Experiment::MasteryFringe { .. } => "mastery-fringe",
            Experiment::MasteryTrap { .. } => "mastery-trap",
            Experiment::AppsSorting { .. } => "apps-sorting",
            Experiment::AppsAdoption { .. } => "apps-adoption",
            Experiment::AppsDelegation { .. } => "apps-delegation",
            Experiment::AppsVerification { .. } => "apps-verification",
            Experiment::Voronoi { .. } => "voronoi",
        }
    }

    pub fn columns(&self) -> &'static [&'static str] {
        match self {
            Experiment::CalibrationCurve { .. } => &["R", "U_C", "delta_B", "s_C", "blind"],
            Experiment::MarginalReturns { .. } => {
                &["R", "blind_marginal", "calibrated_marginal"]
            }
            Experiment::Landscape { .. } => &[
                "replicate",
                "seed",
                "gap_mean",
                "gap_mean_se",
                "sigma2_mean",
                "sigma2_mean_se",
                "interior_anchors",
            ],
            Experiment::LandscapeAnchors { .. } => &["index", "location", "value"],
            Experiment::ScalingCoupling { .. } => &[
                "replicate",
                "seed",
                "probes",
                "violations",
                "reduction_mean",
                "reduction_se",
                "max_excess",
            ],
            Experiment::ScalingWedge { .. } => {
                &["regularity", "cv", "r_bench", "r_exp", "ratio", "mrs"]
            }
            Experiment::ScalingSplitGap { .. } => &["gap", "alpha", "domain", "gain"],
            Experiment::ReasoningPolicy { .. } => {
                &["q", "kappa", "sigma_eps2", "regime", "v_L", "v_H"]
            }
            Experiment::ReasoningOption { .. } => &[
                "replicate",
                "seed",
                "calibrated_modes",
                "calibrated_modes_se",
                "blind_fast",
                "blind_reason",
                "blind_reason_se",
                "blind_modes",
                "blanket_mode",
                "gap",
                "gap_se",
            ],
            Experiment::ReasoningAmplification { .. } => &[
                "replicate",
                "seed",
                "benchmark_gain",
                "benchmark_gain_se",
                "experienced_gain",
                "experienced_gain_se",
                "amplification",
                "amplification_se",
            ],
            Experiment::MasteryTrace { .. } => {
                &["step", "x", "y", "m_t", "I_t", "safe_set_size"]
            }
            Experiment::MasteryMap { .. } => &["x", "V"],
            Experiment::MasteryFringe { .. } => {
                &["gap", "stakes", "whole_gap_safe", "fringe_length", "unsafe_middle"]
            }
            Experiment::MasteryTrap { .. } => &[
                "replicate",
                "seed",
                "step",
                "baseline_index",
                "baseline_x",
                "baseline_y",
                "baseline_safe",
                "hidden_index",
                "hidden_x",
                "hidden_y",
                "hidden_safe",
                "diverged",
            ],
            Experiment::AppsSorting { .. } => &["q", "u_high", "u_low", "preferred"],
            Experiment::AppsAdoption { .. } | Experiment::AppsDelegation { .. } => {
                &["r_bench", "classification"]
            }
            Experiment::AppsVerification { .. } => &["q", "r", "gain", "cost", "verify"],
            Experiment::Voronoi { .. } => &[
                "replicate",
                "seed",
                "points",
                "probes",
                "typical_mean",
                "size_biased_empirical",
                "size_biased_identity",
                "combined_se",
                "discrepancy",
            ],
        }
    }

    /// Parameter echo carried on every record of this experiment.
    pub fn params(&self) -> Vec<(&'static str, String)> {
        fn list(v: &[f64]) -> String {
            v.iter().map(|x| num(*x)).collect::<Vec<_>>().join(";")
        }
        match self {
            Experiment::CalibrationCurve { r_min, r_max, points }
            | Experiment::MarginalReturns { r_min, r_max, points } => vec![
                ("r_min", num(*r_min)),
                ("r_max", num(*r_max)),
                ("points", points.to_string()),
            ],
            Experiment::Landscape { intensity, domain, tasks } => vec![
                ("intensity", num(*intensity)),
                ("domain", num(*domain)),
                ("tasks", tasks.to_string()),
            ],
            Experiment::LandscapeAnchors { intensity, domain } => {
                vec![("intensity", num(*intensity)), ("domain", num(*domain))]
            }
            Experiment::ScalingCoupling { intensity, scaled_intensity, domain, probes } => vec![
                ("intensity", num(*intensity)),
                ("scaled_intensity", num(*scaled_intensity)),
                ("domain", num(*domain)),
                ("probes", probes.to_string()),
            ],
            Experiment::ScalingWedge { intensity, stakes, points } => vec![
                ("intensity", num(*intensity)),
                ("stakes", num(*stakes)),
                ("points", points.to_string()),
            ],
            Experiment::ScalingSplitGap { gaps, alphas, domain } => vec![
                ("gaps", list(gaps)),
                ("alphas", list(alphas)),
                ("domain", num(*domain)),
            ],
            Experiment::ReasoningPolicy { stakes, costs, noise_floors } => vec![
                ("stakes", list(stakes)),
                ("costs", list(costs)),
                ("noise_floors", list(noise_floors)),
            ],
            Experiment::ReasoningOption { intensity, stakes, cost, noise_floor, samples } => {
                vec![
                    ("intensity", num(*intensity)),
                    ("stakes", num(*stakes)),
                    ("cost", num(*cost)),
                    ("noise_floor", num(*noise_floor)),
                    ("samples", samples.to_string()),
                ]
            }
            Experiment::ReasoningAmplification { intensity, noise_floor, samples } => vec![
                ("intensity", num(*intensity)),
                ("noise_floor", num(*noise_floor)),
                ("samples", samples.to_string()),
            ],
            Experiment::MasteryTrace {
                span,
                grid_points,
                length_scale,
                noise_variance,
                beta,
                stakes,
                horizon,
            } => vec![
                ("span", num(*span)),
                ("grid_points", grid_points.to_string()),
                ("length_scale", num(*length_scale)),
                ("noise_variance", num(*noise_variance)),
                ("beta", num(*beta)),
                ("stakes", num(*stakes)),
                ("horizon", horizon.to_string()),
            ],
            Experiment::MasteryMap { span, grid_points } => {
                vec![("span", num(*span)), ("grid_points", grid_points.to_string())]
            }
            Experiment::MasteryFringe { gaps, stakes } => {
                vec![("gaps", list(gaps)), ("stakes", num(*stakes))]
            }
            Experiment::MasteryTrap { horizon, forced } => vec![
                ("horizon", horizon.to_string()),
                (
                    "forced",
                    forced.map(|(s, i)| format!("{s}:{i}")).unwrap_or_default(),
                ),
            ],
            Experiment::AppsSorting { high, low, convexity, q_min, q_max, points } => vec![
                ("high_intensity", num(high.0)),
                ("high_cv", num(high.1)),
                ("low_intensity", num(low.0)),
                ("low_cv", num(low.1)),
                ("convexity", num(*convexity)),
                ("q_min", num(*q_min)),
                ("q_max", num(*q_max)),
                ("points", points.to_string()),
            ],
            Experiment::AppsAdoption { cv, r_min, r_max, points } => vec![
                ("cv", num(*cv)),
                ("r_min", num(*r_min)),
                ("r_max", num(*r_max)),
                ("points", points.to_string()),
            ],
            Experiment::AppsDelegation { cv, effort_cost, r_min, r_max, points } => vec![
                ("cv", num(*cv)),
                ("effort_cost", num(*effort_cost)),
                ("r_min", num(*r_min)),
                ("r_max", num(*r_max)),
                ("points", points.to_string()),
            ],
            Experiment::AppsVerification { intensity, verification_cost, stakes } => vec![
                ("intensity", num(*intensity)),
                ("verification_cost", num(*verification_cost)),
                ("stakes", list(stakes)),
            ],
            Experiment::Voronoi { points, probes, box_side } => vec![
                ("points", points.to_string()),
                ("probes", probes.to_string()),
                ("box_side", num(*box_side)),
            ],
        }
    }

    fn run_replicate(
        &self,
        replicate: u64,
        seed: u64,
        workers: usize,
    ) -> Result<Vec<Vec<String>>, HarnessError> {
        match self {
            Experiment::CalibrationCurve { r_min, r_max, points } => {
                let spec = QuadSpec::strict();
                linspace(*r_min, *r_max, *points)?
                    .into_iter()
                    .map(|r| {
                        let idx = ReliabilityIndex::new(r).map_err(validation)?;
                        let uc = calibrated_value(idx, &spec).map_err(numerical)?;
                        let delta = cost_of_blindness(idx, BlindnessMethod::ClosedForm)
                            .map_err(numerical)?
                            .mean;
                        let share = use_share(idx, &spec).map_err(numerical)?;
                        Ok(vec![
                            num(r),
                            num(uc),
                            num(delta),
                            num(share),
                            num(blind_value(idx).utility),
                        ])
                    })
                    .collect()
            }
            Experiment::MarginalReturns { r_min, r_max, points } => {
                let spec = QuadSpec::strict();
                linspace(*r_min, *r_max, *points)?
                    .into_iter()
                    .map(|r| {
                        let idx = ReliabilityIndex::new(r).map_err(validation)?;
                        // The blind curve has a kink at R = 1; the cell is
                        // left empty there rather than inventing a slope.
                        let blind = if r == 1.0 {
                            String::new()
                        } else {
                            num(marginal_return(idx, MarginalMode::Blind, &spec)
                                .map_err(numerical)?)
                        };
                        let cal = marginal_return(idx, MarginalMode::Calibrated, &spec)
                            .map_err(numerical)?;
                        Ok(vec![num(r), blind, num(cal)])
                    })
                    .collect()
            }
            Experiment::Landscape { intensity, domain, tasks } => {
                if *tasks == 0 {
                    return Err(HarnessError::Validation("need at least one task".into()));
                }
                let config = LandscapeConfig::new(*intensity, *domain, derive_seed(seed, 0))
                    .map_err(validation)?;
                let ks = sample_knowledge_points(&config);
                let mut task_rng = derived_rng(seed, 1);
                let xs = ks.sample_interior_tasks(*tasks, &mut task_rng);
                if xs.len() < *tasks {
                    return Err(numerical(format!(
                        "only {} of {tasks} interior tasks drawable; domain holds too few anchors",
                        xs.len()
                    )));
                }
                let mut gap_lengths = Vec::with_capacity(xs.len());
                let mut variances = Vec::with_capacity(xs.len());
                for x in xs {
                    let (gap, _) = ks.containing_gap(x).map_err(numerical)?;
                    gap_lengths.push(gap.length());
                    variances.push(ks.posterior_at(x).map_err(numerical)?.variance);
                }
                let g = estimate_from_samples(&gap_lengths);
                let v = estimate_from_samples(&variances);
                Ok(vec![vec![
                    replicate.to_string(),
                    seed.to_string(),
                    num(g.mean),
                    num(g.se),
                    num(v.mean),
                    num(v.se),
                    ks.interior_anchor_count().to_string(),
                ]])
            }
            Experiment::LandscapeAnchors { intensity, domain } => {
                // Shares the anchor sub-seed with the landscape statistics
                // experiment, so a dump at the same base seed shows exactly
                // the landscape the matching replicate measured.
                let config = LandscapeConfig::new(*intensity, *domain, derive_seed(seed, 0))
                    .map_err(validation)?;
                let ks = sample_knowledge_points(&config);
                Ok(ks
                    .anchors()
                    .iter()
                    .zip(ks.values())
                    .enumerate()
                    .map(|(i, (&x, &y))| vec![i.to_string(), num(x), num(y)])
                    .collect())
            }
            Experiment::ScalingCoupling { intensity, scaled_intensity, domain, probes } => {
                if *probes == 0 {
                    return Err(HarnessError::Validation("need at least one probe".into()));
                }
                let config = LandscapeConfig::new(*intensity, *domain, derive_seed(seed, 0))
                    .map_err(validation)?;
                let base = sample_knowledge_points(&config);
                let scaled =
                    couple_and_scale(&base, *intensity, *scaled_intensity, derive_seed(seed, 1))
                        .map_err(validation)?;
                let mut rng = derived_rng(seed, 2);
                let mut violations = 0u64;
                let mut max_excess = 0.0f64;
                let mut reductions = Vec::with_capacity(*probes);
                for _ in 0..*probes {
                    let x = rng.gen_range(0.0..base.domain_length());
                    let v0 = base.posterior_at(x).map_err(numerical)?.variance;
                    let vs = scaled.posterior_at(x).map_err(numerical)?.variance;
                    if vs > v0 {
                        violations += 1;
                        max_excess = max_excess.max(vs - v0);
                    }
                    reductions.push(v0 - vs);
                }
                let red = estimate_from_samples(&reductions);
                Ok(vec![vec![
                    replicate.to_string(),
                    seed.to_string(),
                    probes.to_string(),
                    violations.to_string(),
                    num(red.mean),
                    num(red.se),
                    num(max_excess),
                ]])
            }
            Experiment::ScalingWedge { intensity, stakes, points } => {
                linspace(0.0, 1.0, *points)?
                    .into_iter()
                    .map(|r| {
                        let reg = RegularityIndex::new(r).map_err(validation)?;
                        let cv = reg.cv();
                        let w = reliability_wedge(*intensity, *stakes, cv).map_err(validation)?;
                        let mrs = mrs_scale_regularity(*intensity, reg).map_err(validation)?;
                        Ok(vec![
                            num(r),
                            num(cv),
                            num(w.r_bench),
                            num(w.r_exp),
                            num(w.ratio),
                            num(mrs),
                        ])
                    })
                    .collect()
            }
            Experiment::ScalingSplitGap { gaps, alphas, domain } => {
                if gaps.is_empty() || alphas.is_empty() {
                    return Err(HarnessError::Validation(
                        "need at least one gap and one split fraction".into(),
                    ));
                }
                let mut rows = Vec::with_capacity(gaps.len() * alphas.len());
                for &gap in gaps {
                    for &alpha in alphas {
                        let gain = split_gap_gain(gap, alpha, *domain).map_err(validation)?;
                        rows.push(vec![num(gap), num(alpha), num(*domain), num(gain)]);
                    }
                }
                Ok(rows)
            }
            Experiment::ReasoningPolicy { stakes, costs, noise_floors } => {
                if stakes.is_empty() || costs.is_empty() || noise_floors.is_empty() {
                    return Err(HarnessError::Validation(
                        "policy table needs at least one value per parameter list".into(),
                    ));
                }
                let mut rows = Vec::new();
                for &q in stakes {
                    for &kappa in costs {
                        for &xi in noise_floors {
                            let policy = cutoff_policy(q, kappa, xi).map_err(validation)?;
                            let (regime, v_l, v_h) = match policy.regime() {
                                PolicyRegime::NeverReason => {
                                    ("never-reason", String::new(), String::new())
                                }
                                PolicyRegime::Thresholds { entry, break_even } => {
                                    ("thresholds", num(entry), num(break_even))
                                }
                            };
                            rows.push(vec![
                                num(q),
                                num(kappa),
                                num(xi),
                                regime.to_string(),
                                v_l,
                                v_h,
                            ]);
                        }
                    }
                }
                Ok(rows)
            }
            Experiment::ReasoningOption { intensity, stakes, cost, noise_floor, samples } => {
                let report =
                    option_value_mc(*intensity, *stakes, *cost, *noise_floor, *samples, seed, workers)
                        .map_err(validation)?;
                Ok(vec![vec![
                    replicate.to_string(),
                    seed.to_string(),
                    num(report.calibrated_modes.mean),
                    num(report.calibrated_modes.se),
                    num(report.blind_fast),
                    num(report.blind_reason.mean),
                    num(report.blind_reason.se),
                    num(report.blind_modes),
                    report.blanket_mode.label().to_string(),
                    num(report.gap.mean),
                    num(report.gap.se),
                ]])
            }
            Experiment::ReasoningAmplification { intensity, noise_floor, samples } => {
                let report =
                    inspection_amplification_mc(*intensity, *noise_floor, *samples, seed, workers)
                        .map_err(validation)?;
                Ok(vec![vec![
                    replicate.to_string(),
                    seed.to_string(),
                    num(report.benchmark_gain.mean),
                    num(report.benchmark_gain.se),
                    num(report.experienced_gain.mean),
                    num(report.experienced_gain.se),
                    num(report.amplification.mean),
                    num(report.amplification.se),
                ]])
            }
            Experiment::MasteryTrace {
                span,
                grid_points,
                length_scale,
                noise_variance,
                beta,
                stakes,
                horizon,
            } => {
                let (grid, map) = bridge_error_map(*span, *grid_points)?;
                let model = GpModel::new(Kernel::Rbf { length_scale: *length_scale }, *noise_variance)
                    .map_err(validation)?;
                let config =
                    MasteryConfig::new(*beta, *stakes, grid, *horizon).map_err(validation)?;
                let run = uncertainty_sampling_run(&map, model, &config, seed).map_err(mastery_err)?;
                Ok(run
                    .trace
                    .steps
                    .iter()
                    .map(|s| {
                        vec![
                            s.step.to_string(),
                            num(s.location),
                            num(s.observation),
                            num(s.worst_uncertainty),
                            num(s.realized_information),
                            s.safe_set_size.to_string(),
                        ]
                    })
                    .collect())
            }
            Experiment::MasteryMap { span, grid_points } => {
                let (grid, map) = bridge_error_map(*span, *grid_points)?;
                Ok(grid
                    .iter()
                    .zip(map.values())
                    .map(|(&x, &v)| vec![num(x), num(v)])
                    .collect())
            }
            Experiment::MasteryFringe { gaps, stakes } => {
                if gaps.is_empty() {
                    return Err(HarnessError::Validation("need at least one gap".into()));
                }
                gaps.iter()
                    .map(|&gap| {
                        let row = match bridge_fringe(gap, *stakes).map_err(validation)? {
                            FringeDescription::WholeGapSafe => vec![
                                num(gap),
                                num(*stakes),
                                "true".to_string(),
                                String::new(),
                                num(0.0),
                            ],
                            FringeDescription::Fringes { length, unsafe_middle } => vec![
                                num(gap),
                                num(*stakes),
                                "false".to_string(),
                                num(length),
                                num(unsafe_middle),
                            ],
                        };
                        Ok(row)
                    })
                    .collect()
            }
            Experiment::MasteryTrap { horizon, forced } => {
                let (map, hidden, config) = trap_setting(*horizon)?;
                let forced_probes: Vec<(usize, usize)> = forced.iter().copied().collect();
                let report = abstention_trap_experiment(
                    &map,
                    &hidden,
                    &TRAP_PRIOR,
                    &config,
                    TRAP_KERNEL,
                    TRAP_NOISE,
                    &forced_probes,
                    seed,
                )
                .map_err(mastery_err)?;
                Ok(report
                    .baseline
                    .iter()
                    .zip(&report.hidden)
                    .map(|(b, h)| {
                        let (bi, bx) = match b.choice {
                            Some((i, x)) => (Some(i.to_string()), Some(num(x))),
                            None => (None, None),
                        };
                        let (hi, hx) = match h.choice {
                            Some((i, x)) => (Some(i.to_string()), Some(num(x))),
                            None => (None, None),
                        };
                        let diverged =
                            report.divergence_step.is_some_and(|d| b.step >= d);
                        vec![
                            replicate.to_string(),
                            seed.to_string(),
                            b.step.to_string(),
                            option_cell(bi),
                            option_cell(bx),
                            option_cell(b.observation.map(num)),
                            b.safe_set_size.to_string(),
                            option_cell(hi),
                            option_cell(hx),
                            option_cell(h.observation.map(num)),
                            h.safe_set_size.to_string(),
                            diverged.to_string(),
                        ]
                    })
                    .collect())
            }
            Experiment::AppsSorting { high, low, convexity, q_min, q_max, points } => {
                let high = ProviderProfile::new(high.0, high.1).map_err(validation)?;
                let low = ProviderProfile::new(low.0, low.1).map_err(validation)?;
                linspace(*q_min, *q_max, *points)?
                    .into_iter()
                    .map(|q| {
                        let stakes = ConvexStakes::new(q, *convexity).map_err(validation)?;
                        let u_high = convex_blind_value(&high, &stakes);
                        let u_low = convex_blind_value(&low, &stakes);
                        let preferred = if u_high > u_low {
                            "high"
                        } else if u_low > u_high {
                            "low"
                        } else {
                            "tie"
                        };
                        Ok(vec![num(q), num(u_high), num(u_low), preferred.to_string()])
                    })
                    .collect()
            }
            Experiment::AppsAdoption { cv, r_min, r_max, points } => {
                linspace(*r_min, *r_max, *points)?
                    .into_iter()
                    .map(|r| {
                        let call = classify_adoption(*cv, r).map_err(validation)?;
                        Ok(vec![num(r), call.label().to_string()])
                    })
                    .collect()
            }
            Experiment::AppsDelegation { cv, effort_cost, r_min, r_max, points } => {
                linspace(*r_min, *r_max, *points)?
                    .into_iter()
                    .map(|r| {
                        let call =
                            classify_delegation(*cv, *effort_cost, r).map_err(validation)?;
                        Ok(vec![num(r), call.label().to_string()])
                    })
                    .collect()
            }
            Experiment::AppsVerification { intensity, verification_cost, stakes } => {
                if stakes.is_empty() {
                    return Err(HarnessError::Validation("need at least one stakes level".into()));
                }
                stakes
                    .iter()
                    .map(|&q| {
                        let decision = verification_decision(*intensity, q, *verification_cost)
                            .map_err(validation)?;
                        Ok(vec![
                            num(q),
                            num(3.0 * intensity * q),
                            num(decision.gain),
                            num(*verification_cost),
                            decision.verify.to_string(),
                        ])
                    })
                    .collect()
            }
            Experiment::Voronoi { points, probes, box_side } => {
                let report = voronoi_size_bias_check(*points, *box_side, *probes, seed)
                    .map_err(validation)?;
                Ok(vec![vec![
                    replicate.to_string(),
                    seed.to_string(),
                    points.to_string(),
                    probes.to_string(),
                    num(report.typical_mean),
                    num(report.size_biased_mean_empirical),
                    num(report.size_biased_mean_identity),
                    num(report.combined_se),
                    num(report.size_biased_mean_empirical - report.size_biased_mean_identity),
                ]])
            }
        }
    }
}

/// Run all replicates of `spec`, assemble records in replicate order, and
/// write the CSV when an output path is set. Scheduling never shows in the
/// output: replicate `i` always runs on `derive_seed(base_seed, i)` and rows
/// are emitted sorted by replicate index.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<Vec<RunRecord>, HarnessError> {
    if spec.replicates == 0 {
        return Err(HarnessError::Validation("replicate count must be at least one".into()));
    }
    let run_one = |i: u64| -> Result<RunRecord, HarnessError> {
        let seed = derive_seed(spec.base_seed, i);
        let rows = spec.experiment.run_replicate(i, seed, spec.workers)?;
        let width = spec.experiment.columns().len();
        for row in &rows {
            if row.len() != width {
                return Err(numerical(format!(
                    "{} produced a {}-cell row against a {width}-column schema",
                    spec.experiment.name(),
                    row.len()
                )));
            }
        }
        Ok(RunRecord {
            experiment: spec.experiment.name(),
            replicate: i,
            seed,
            params: spec.experiment.params(),
            rows,
        })
    };
    let mut records: Vec<RunRecord> = if spec.workers <= 1 || spec.replicates == 1 {
        (0..spec.replicates).map(run_one).collect::<Result<_, _>>()?
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(spec.workers)
            .build()
            .map_err(numerical)?;
        pool.install(|| {
            (0..spec.replicates).into_par_iter().map(run_one).collect::<Result<Vec<_>, _>>()
        })?
    };
    records.sort_by_key(|r| r.replicate);
    if let Some(path) = &spec.out {
        write_file(path, &render_csv(spec.experiment.columns(), &records))?;
    }
    Ok(records)
}

/// Canonical CSV text: header row, then every record's rows in order.
pub fn render_csv(columns: &[&str], records: &[RunRecord]) -> String {
    let mut out = columns.join(",");
    out.push('\n');
    for record in records {
        for row in &record.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(experiment: Experiment, replicates: u64, workers: usize) -> ExperimentSpec {
        ExperimentSpec { experiment, replicates, base_seed: 42, workers, out: None }
    }

    #[test]
    fn linspace_cases() {
        assert_eq!(linspace(1.0, 3.0, 3).unwrap(), vec![1.0, 2.0, 3.0]);
        assert_eq!(linspace(2.5, 9.0, 1).unwrap(), vec![2.5]);
        let grid = linspace(0.1, 20.0, 50).unwrap();
        assert_eq!(grid.len(), 50);
        assert_eq!(*grid.last().unwrap(), 20.0);
        assert!(linspace(3.0, 1.0, 2).is_err());
        assert!(linspace(0.0, 1.0, 0).is_err());
    }

    #[test]
    fn calibration_curve_schema_and_shape() {
        let s = spec(
            Experiment::CalibrationCurve { r_min: 0.1, r_max: 20.0, points: 31 },
            1,
            1,
        );
        let records = run_experiment(&s).unwrap();
        assert_eq!(records.len(), 1);
        let csv = render_csv(s.experiment.columns(), &records);
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "R,U_C,delta_B,s_C,blind");
        assert_eq!(lines.count(), 31);
        // Decomposition holds row by row in the emitted numbers.
        for row in &records[0].rows {
            let get = |k: usize| row[k].parse::<f64>().unwrap();
            assert!((get(1) - get(2) - get(4)).abs() < 1e-8);
        }
    }

    #[test]
    fn replicates_get_distinct_seeds_and_results() {
        let s = spec(
            Experiment::Landscape { intensity: 1.0, domain: 500.0, tasks: 200 },
            2,
            1,
        );
        let records = run_experiment(&s).unwrap();
        assert_eq!(records.len(), 2);
        assert_ne!(records[0].seed, records[1].seed);
        assert_ne!(records[0].rows, records[1].rows);
        // Rerunning reproduces both records exactly.
        let again = run_experiment(&s).unwrap();
        assert_eq!(records[0].rows, again[0].rows);
        assert_eq!(records[1].rows, again[1].rows);
    }

    #[test]
    fn parallel_and_serial_render_identical_csv() {
        let serial = spec(
            Experiment::Voronoi { points: 40, probes: 5_000, box_side: 1.0 },
            6,
            1,
        );
        let parallel = ExperimentSpec { workers: 8, ..serial.clone() };
        let a = render_csv(serial.experiment.columns(), &run_experiment(&serial).unwrap());
        let b = render_csv(parallel.experiment.columns(), &run_experiment(&parallel).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn marginal_returns_leave_the_kink_blank() {
        let s = spec(
            Experiment::MarginalReturns { r_min: 0.5, r_max: 1.5, points: 3 },
            1,
            1,
        );
        let records = run_experiment(&s).unwrap();
        let rows = &records[0].rows;
        assert_eq!(rows[0][1], "0"); // below the kink the slope is zero
        assert_eq!(rows[1][1], ""); // at the kink no slope exists
        assert!(rows[2][1].parse::<f64>().unwrap() > 0.0);
        for row in rows {
            assert!(row[2].parse::<f64>().unwrap() > 0.0);
        }
    }

    #[test]
    fn zero_replicates_rejected() {
        let s = spec(Experiment::MasteryMap { span: 10.0, grid_points: 5 }, 0, 1);
        assert!(matches!(run_experiment(&s), Err(HarnessError::Validation(_))));
    }

    #[test]
    fn policy_table_regimes_render() {
        let s = spec(
            Experiment::ReasoningPolicy {
                stakes: vec![1.0],
                costs: vec![0.05, 0.9],
                noise_floors: vec![0.25],
            },
            1,
            1,
        );
        let records = run_experiment(&s).unwrap();
        let rows = &records[0].rows;
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0][3], "thresholds");
        assert_eq!(rows[1][3], "never-reason");
        assert!(rows[0][4].parse::<f64>().unwrap() > 0.0);
        assert_eq!(rows[1][4], "");
        // kappa = 0.05 < (1 - kappa) q condition keeps reasoning viable at
        // large v, so the exit threshold is infinite.
        assert_eq!(rows[0][5], "inf");
    }

    #[test]
    fn trap_rows_cover_both_worlds() {
        let s = spec(Experiment::MasteryTrap { horizon: 6, forced: None }, 1, 1);
        let records = run_experiment(&s).unwrap();
        let rows = &records[0].rows;
        assert_eq!(rows.len(), 6);
        for row in rows {
            assert_eq!(row.len(), s.experiment.columns().len());
            assert_eq!(row[11], "false"); // no forced probe, no divergence
            assert_eq!(row[3], row[7]); // identical choices in both worlds
        }
    }
}
