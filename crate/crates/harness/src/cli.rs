//! Command-line front end. Every flag is optional on the command line; a
//! JSON config file (`--config`) can supply any of them by the same name,
//! and built-in defaults cover the rest. Flags override config, config
//! overrides defaults.

use crate::config::{parse_f64_list, Config};
use crate::experiments::{run_experiment, Experiment, ExperimentSpec};
use crate::{validation, HarnessError};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use jagged_core::applications::{sorting_cutoff, ProviderProfile};
use jagged_core::benchadjust::{
    deployment_weighted_score, ingest_scores, report, MixtureSpec, TableFormat,
};
use jagged_core::mastery::DEFAULT_BETA;
use std::ffi::OsString;
use std::path::{Path, PathBuf};

const LONG_ABOUT: &str = "\
Batch experiment runner for the jagged-knowledge simulation toolkit. Each \
subcommand runs one experiment family and writes CSV. Runs are a pure \
function of the parameters and the base seed: replicate i runs on a seed \
derived from (--seed, i), so reruns are byte-identical at any --workers \
setting.";

const TOP_AFTER_HELP: &str = "\
Output paths: --out names the primary CSV. When absent, the file is named
after the experiment and placed in $JAGGED_OUT_DIR (or the working
directory if the variable is unset). Secondary tables are written only when
their --*-out flag is given.

Config: --config FILE loads a flat JSON object whose keys mirror the flag
names (e.g. {\"seed\": 7, \"r-min\": 0.5}). Command-line flags override
config values.

Exit codes: 0 success, 1 usage error, 2 validation error, 3 numerical
failure.";

#[derive(Debug, Parser)]
#[command(name = "jagged", version, about = LONG_ABOUT, after_help = TOP_AFTER_HELP)]
pub struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    /// Base seed; replicate i derives its own seed from (seed, i) [default: 42]
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Independent replicates of the seeded experiments [default: 1]
    #[arg(long, global = true)]
    replicates: Option<u64>,
    /// Primary output CSV path [default: $JAGGED_OUT_DIR/<experiment>.csv]
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// JSON config file mirroring these flags; flags win on conflict
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads for replicates and Monte Carlo sampling [default: 1]
    #[arg(long, global = true)]
    workers: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Calibrated-use value, blindness cost, use share, and blind value
    /// over a reliability grid
    #[command(after_help = "\
primary CSV: R,U_C,delta_B,s_C,blind (one row per grid point; all exact
quadrature, no sampling). --marginals-out adds R,blind_marginal,
calibrated_marginal; the blind cell is left empty at the R = 1 kink where
no slope exists.")]
    Curves(CurvesArgs),
    /// Sample a knowledge landscape and measure interior gap and posterior
    /// variance statistics
    #[command(after_help = "\
primary CSV: replicate,seed,gap_mean,gap_mean_se,sigma2_mean,
sigma2_mean_se,interior_anchors (one row per replicate). --anchors-out
dumps index,location,value for the replicate-0 landscape.")]
    Landscape(LandscapeArgs),
    /// Couple a landscape to a denser scale-up and check variance falls
    /// pointwise; optional regularity-wedge and gap-splitting tables
    #[command(after_help = "\
primary CSV: replicate,seed,probes,violations,reduction_mean,reduction_se,
max_excess. --wedge-out writes regularity,cv,r_bench,r_exp,ratio,mrs over
a regularity grid. --split-out writes gap,alpha,domain,gain for each
gap/split-fraction pair.")]
    Scaling(ScalingArgs),
    /// Fast/reason/abstain policy tables; optional option-value and
    /// inspection-amplification estimates
    #[command(after_help = "\
primary CSV: q,kappa,sigma_eps2,regime,v_L,v_H (cartesian product of the
three lists; threshold cells are empty in the never-reason regime and v_H
prints inf when reasoning never exits). --option-out writes replicate,seed,
calibrated_modes,calibrated_modes_se,blind_fast,blind_reason,
blind_reason_se,blind_modes,blanket_mode,gap,gap_se. --amplification-out
writes replicate,seed,benchmark_gain,benchmark_gain_se,experienced_gain,
experienced_gain_se,amplification,amplification_se.")]
    Reasoning(ReasoningArgs),
    /// Uncertainty-sampling learning trace on a single-gap error
    /// landscape; optional map, fringe, and abstention-trap tables
    #[command(after_help = "\
primary CSV: step,x,y,m_t,I_t,safe_set_size (one seeded run; vary --seed
for another trace; --replicates does not apply). --map-out writes x,V.
--fringe-out writes gap,stakes,whole_gap_safe,fringe_length,unsafe_middle
(fringe_length empty when the whole gap is safe). --trap-out writes
replicate,seed,step,baseline_index,baseline_x,baseline_y,baseline_safe,
hidden_index,hidden_x,hidden_y,hidden_safe,diverged on the canned
two-cluster trap geometry; index/x/y cells are empty on abstention steps.")]
    Mastery(MasteryArgs),
    /// Provider sorting under convex stakes; optional adoption,
    /// delegation, and verification tables
    #[command(after_help = "\
primary CSV: q,u_high,u_low,preferred over a stakes grid (auto-bracketed
around the sorting cutoff when --q-min/--q-max are omitted).
--adoption-out and --delegation-out write r_bench,classification.
--verify-out writes q,r,gain,cost,verify.")]
    Apps(AppsArgs),
    /// Benchmark-adjustment report from a domain score table
    #[command(after_help = "\
input: CSV with header domain,score,bench_weight,dep_weight (the weight
columns may be omitted; missing weights default to uniform) or a JSON
array of the same fields. The report prints to stdout; --out additionally
writes a section,metric,value CSV.")]
    Adjust(AdjustArgs),
    /// Voronoi size-bias check: typical vs size-biased cell means against
    /// the moment identity
    #[command(after_help = "\
primary CSV: replicate,seed,points,probes,typical_mean,
size_biased_empirical,size_biased_identity,combined_se,discrepancy.")]
    Voronoi(VoronoiArgs),
}

#[derive(Debug, Args)]
struct CurvesArgs {
    /// Smallest reliability index on the grid [default: 0.1]
    #[arg(long)]
    r_min: Option<f64>,
    /// Largest reliability index on the grid [default: 20]
    #[arg(long)]
    r_max: Option<f64>,
    /// Number of grid points [default: 50]
    #[arg(long)]
    points: Option<usize>,
    /// Also write the marginal-return curve to this CSV path
    #[arg(long)]
    marginals_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct LandscapeArgs {
    /// Anchor rate per unit length [default: 1]
    #[arg(long)]
    intensity: Option<f64>,
    /// Domain length [default: 2000/intensity, keeping ~2000 anchors]
    #[arg(long)]
    domain: Option<f64>,
    /// Interior task draws per replicate [default: 2000]
    #[arg(long)]
    tasks: Option<usize>,
    /// Dump the replicate-0 landscape's anchors to this CSV path
    #[arg(long)]
    anchors_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ScalingArgs {
    /// Base anchor rate [default: 1]
    #[arg(long)]
    intensity: Option<f64>,
    /// Scaled-up anchor rate [default: 2*intensity]
    #[arg(long)]
    scaled_intensity: Option<f64>,
    /// Domain length [default: 2000/intensity]
    #[arg(long)]
    domain: Option<f64>,
    /// Probe locations per replicate for the variance comparison [default: 1000]
    #[arg(long)]
    probes: Option<usize>,
    /// Stakes level used by the wedge table [default: 1]
    #[arg(long)]
    stakes: Option<f64>,
    /// Write the regularity-wedge table to this CSV path
    #[arg(long)]
    wedge_out: Option<PathBuf>,
    /// Regularity grid points for the wedge table [default: 11]
    #[arg(long)]
    wedge_points: Option<usize>,
    /// Write the gap-splitting table to this CSV path
    #[arg(long)]
    split_out: Option<PathBuf>,
    /// Domain length for the gap-splitting table [default: 10]
    #[arg(long)]
    split_domain: Option<f64>,
    /// Gap lengths for the splitting table, comma-separated [default: 2,8]
    #[arg(long)]
    split_gaps: Option<String>,
    /// Split fractions, comma-separated [default: 0.5]
    #[arg(long)]
    split_alphas: Option<String>,
}

#[derive(Debug, Args)]
struct ReasoningArgs {
    /// Stakes levels for the policy table, comma-separated [default: 0.5,1,2]
    #[arg(long)]
    q: Option<String>,
    /// Reasoning costs, comma-separated [default: 0.05,0.2,0.5]
    #[arg(long)]
    kappa: Option<String>,
    /// Reasoning noise floors, comma-separated [default: 0.1,0.375,1]
    #[arg(long)]
    xi: Option<String>,
    /// Write the option-value comparison to this CSV path
    #[arg(long)]
    option_out: Option<PathBuf>,
    /// Stakes for the option-value run [default: 1.5]
    #[arg(long)]
    option_q: Option<f64>,
    /// Reasoning cost for the option-value run [default: 0.1]
    #[arg(long)]
    option_kappa: Option<f64>,
    /// Noise floor for the option-value run [default: 0.375]
    #[arg(long)]
    option_xi: Option<f64>,
    /// Anchor rate for the sampled runs [default: 1]
    #[arg(long)]
    intensity: Option<f64>,
    /// Monte Carlo sample count per replicate [default: 200000]
    #[arg(long)]
    samples: Option<u64>,
    /// Write the inspection-amplification estimate to this CSV path
    #[arg(long)]
    amplification_out: Option<PathBuf>,
    /// Noise floor for the amplification run [default: 0.25]
    #[arg(long)]
    amp_xi: Option<f64>,
}

#[derive(Debug, Args)]
struct MasteryArgs {
    /// Gap span of the learned error landscape [default: 10]
    #[arg(long)]
    span: Option<f64>,
    /// Grid points across the span [default: 41]
    #[arg(long)]
    grid_points: Option<usize>,
    /// Squared-exponential kernel length scale [default: 1]
    #[arg(long)]
    length_scale: Option<f64>,
    /// Observation noise variance [default: 0.01]
    #[arg(long)]
    noise: Option<f64>,
    /// Confidence width multiplier beta [default: 4]
    #[arg(long)]
    beta: Option<f64>,
    /// Stakes level defining the safe set [default: 1]
    #[arg(long)]
    stakes: Option<f64>,
    /// Probe budget [default: 60]
    #[arg(long)]
    horizon: Option<usize>,
    /// Write the error landscape to this CSV path
    #[arg(long)]
    map_out: Option<PathBuf>,
    /// Write the gap-fringe table to this CSV path
    #[arg(long)]
    fringe_out: Option<PathBuf>,
    /// Stakes for the fringe table [default: the --stakes value]
    #[arg(long)]
    fringe_stakes: Option<f64>,
    /// Gap lengths for the fringe table, comma-separated [default: 1,2,4,5,8,16]
    #[arg(long)]
    fringe_gaps: Option<String>,
    /// Write the abstention-trap comparison to this CSV path
    #[arg(long)]
    trap_out: Option<PathBuf>,
    /// Probe budget for the trap runs [default: 12]
    #[arg(long)]
    trap_horizon: Option<usize>,
    /// Step at which the trap's hidden world forces a probe; 0 leaves both
    /// runs unforced [default: 0]
    #[arg(long)]
    trap_forced_step: Option<usize>,
    /// Grid index the forced probe visits [default: 20]
    #[arg(long)]
    trap_forced_index: Option<usize>,
}

#[derive(Debug, Args)]
struct AppsArgs {
    /// Anchor rate of the jagged (heavier-tailed) provider [default: 1]
    #[arg(long)]
    high_intensity: Option<f64>,
    /// Gap coefficient of variation of the jagged provider [default: 2]
    #[arg(long)]
    high_cv: Option<f64>,
    /// Anchor rate of the smooth provider [default: 1/6]
    #[arg(long)]
    low_intensity: Option<f64>,
    /// Gap coefficient of variation of the smooth provider [default: 0]
    #[arg(long)]
    low_cv: Option<f64>,
    /// Stakes convexity weight [default: 1]
    #[arg(long)]
    convexity: Option<f64>,
    /// Smallest stakes on the sorting grid [default: half the sorting cutoff]
    #[arg(long)]
    q_min: Option<f64>,
    /// Largest stakes on the sorting grid [default: twice the sorting cutoff]
    #[arg(long)]
    q_max: Option<f64>,
    /// Stakes grid points [default: 9]
    #[arg(long)]
    q_points: Option<usize>,
    /// Write the adoption classification table to this CSV path
    #[arg(long)]
    adoption_out: Option<PathBuf>,
    /// Gap coefficient of variation for adoption/delegation [default: 1]
    #[arg(long)]
    cv: Option<f64>,
    /// Smallest benchmark reliability on the classification grids [default: 0.5]
    #[arg(long)]
    r_min: Option<f64>,
    /// Largest benchmark reliability on the classification grids [default: 3]
    #[arg(long)]
    r_max: Option<f64>,
    /// Benchmark reliability grid points [default: 11]
    #[arg(long)]
    r_points: Option<usize>,
    /// Write the delegation classification table to this CSV path
    #[arg(long)]
    delegation_out: Option<PathBuf>,
    /// Delegation effort cost [default: 0.25]
    #[arg(long)]
    effort_cost: Option<f64>,
    /// Write the verification decision table to this CSV path
    #[arg(long)]
    verify_out: Option<PathBuf>,
    /// Anchor rate for the verification table [default: 1]
    #[arg(long)]
    intensity: Option<f64>,
    /// Verification cost [default: 0.01]
    #[arg(long)]
    verify_cost: Option<f64>,
    /// Stakes levels for the verification table, comma-separated
    /// [default: 0.1,0.25,0.5,1]
    #[arg(long)]
    verify_stakes: Option<String>,
}

#[derive(Debug, Args)]
struct AdjustArgs {
    /// Domain score table, CSV or JSON (required)
    #[arg(long)]
    scores: Option<PathBuf>,
    /// Input format, csv or json [default: inferred from the extension]
    #[arg(long)]
    format: Option<String>,
    /// Score table for a dedicated tail-risk module
    #[arg(long)]
    tail_scores: Option<PathBuf>,
    /// Weight on the tail module in the mixture score, in [0, 1]
    #[arg(long)]
    tail_share: Option<f64>,
    /// How many worst domains to list [default: 3]
    #[arg(long)]
    worst_k: Option<usize>,
}

#[derive(Debug, Args)]
struct VoronoiArgs {
    /// Seed points in the box [default: 200]
    #[arg(long)]
    points: Option<usize>,
    /// Uniform probes for the size-biased estimate [default: 100000]
    #[arg(long)]
    probes: Option<usize>,
    /// Side length of the square box [default: 1]
    #[arg(long)]
    box_side: Option<f64>,
}

/// Parse, run, and map the outcome to a process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

struct RunContext {
    seed: u64,
    replicates: u64,
    workers: usize,
    out: Option<PathBuf>,
    cfg: Config,
}

impl RunContext {
    fn spec(
        &self,
        experiment: Experiment,
        replicates: u64,
        out: Option<PathBuf>,
    ) -> ExperimentSpec {
        ExperimentSpec { experiment, replicates, base_seed: self.seed, workers: self.workers, out }
    }

    fn primary_out(&self, name: &str) -> PathBuf {
        self.out.clone().unwrap_or_else(|| default_out(name))
    }
}

fn default_out(name: &str) -> PathBuf {
    let file = format!("{name}.csv");
    match std::env::var_os("JAGGED_OUT_DIR") {
        Some(dir) if !dir.is_empty() => Path::new(&dir).join(file),
        _ => PathBuf::from(file),
    }
}

fn run_and_report(spec: &ExperimentSpec) -> Result<(), HarnessError> {
    run_experiment(spec)?;
    if let Some(path) = &spec.out {
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn resolve_f64(
    cfg: &Config,
    flag: Option<f64>,
    key: &str,
    default: f64,
) -> Result<f64, HarnessError> {
    Ok(flag.or(cfg.f64(key)?).unwrap_or(default))
}

fn resolve_opt_f64(cfg: &Config, flag: Option<f64>, key: &str) -> Result<Option<f64>, HarnessError> {
    Ok(flag.or(cfg.f64(key)?))
}

fn resolve_usize(
    cfg: &Config,
    flag: Option<usize>,
    key: &str,
    default: usize,
) -> Result<usize, HarnessError> {
    Ok(flag.or(cfg.usize(key)?).unwrap_or(default))
}

fn resolve_u64(
    cfg: &Config,
    flag: Option<u64>,
    key: &str,
    default: u64,
) -> Result<u64, HarnessError> {
    Ok(flag.or(cfg.u64(key)?).unwrap_or(default))
}

fn resolve_path(
    cfg: &Config,
    flag: Option<PathBuf>,
    key: &str,
) -> Result<Option<PathBuf>, HarnessError> {
    Ok(flag.or(cfg.path(key)?))
}

fn resolve_list(
    cfg: &Config,
    flag: Option<String>,
    key: &str,
    default: &[f64],
) -> Result<Vec<f64>, HarnessError> {
    match flag {
        Some(text) => parse_f64_list(&text),
        None => Ok(cfg.f64_list(key)?.unwrap_or_else(|| default.to_vec())),
    }
}

fn execute(cli: Cli) -> Result<(), HarnessError> {
    let cfg = match &cli.global.config {
        Some(path) => Config::load(path)?,
        None => Config::empty(),
    };
    let ctx = RunContext {
        seed: cli.global.seed.or(cfg.u64("seed")?).unwrap_or(42),
        replicates: cli.global.replicates.or(cfg.u64("replicates")?).unwrap_or(1),
        workers: cli.global.workers.or(cfg.usize("workers")?).unwrap_or(1),
        out: cli.global.out.clone().or(cfg.path("out")?),
        cfg,
    };
    match cli.command {
        Command::Curves(args) => run_curves(&ctx, args),
        Command::Landscape(args) => run_landscape(&ctx, args),
        Command::Scaling(args) => run_scaling(&ctx, args),
        Command::Reasoning(args) => run_reasoning(&ctx, args),
        Command::Mastery(args) => run_mastery(&ctx, args),
        Command::Apps(args) => run_apps(&ctx, args),
        Command::Adjust(args) => run_adjust(&ctx, args),
        Command::Voronoi(args) => run_voronoi(&ctx, args),
    }
}

fn run_curves(ctx: &RunContext, args: CurvesArgs) -> Result<(), HarnessError> {
    let cfg = &ctx.cfg;
    let r_min = resolve_f64(cfg, args.r_min, "r-min", 0.1)?;
    let r_max = resolve_f64(cfg, args.r_max, "r-max", 20.0)?;
    let points = resolve_usize(cfg, args.points, "points", 50)?;
    run_and_report(&ctx.spec(
        Experiment::CalibrationCurve { r_min, r_max, points },
        1,
        Some(ctx.primary_out("calibration-curve")),
    ))?;
    if let Some(path) = resolve_path(cfg, args.marginals_out, "marginals-out")? {
        run_and_report(&ctx.spec(
            Experiment::MarginalReturns { r_min, r_max, points },
            1,
            Some(path),
        ))?;
    }
    Ok(())
}

fn run_landscape(ctx: &RunContext, args: LandscapeArgs) -> Result<(), HarnessError> {
    let cfg = &ctx.cfg;
    let intensity = resolve_f64(cfg, args.intensity, "intensity", 1.0)?;
    let domain =
        resolve_opt_f64(cfg, args.domain, "domain")?.unwrap_or(2000.0 / intensity);
    let tasks = resolve_usize(cfg, args.tasks, "tasks", 2000)?;
    run_and_report(&ctx.spec(
        Experiment::Landscape { intensity, domain, tasks },
        ctx.replicates,
        Some(ctx.primary_out("landscape")),
    ))?;
    if let Some(path) = resolve_path(cfg, args.anchors_out, "anchors-out")? {
        run_and_report(&ctx.spec(Experiment::LandscapeAnchors { intensity, domain }, 1, Some(path)))?;
    }
    Ok(())
}

fn run_scaling(ctx: &RunContext, args: ScalingArgs) -> Result<(), HarnessError> {
    let cfg = &ctx.cfg;
    let intensity = resolve_f64(cfg, args.intensity, "intensity", 1.0)?;
    let scaled_intensity = resolve_opt_f64(cfg, args.scaled_intensity, "scaled-intensity")?
        .unwrap_or(2.0 * intensity);
    let domain =
        resolve_opt_f64(cfg, args.domain, "domain")?.unwrap_or(2000.0 / intensity);
    let probes = resolve_usize(cfg, args.probes, "probes", 1000)?;
    run_and_report(&ctx.spec(
        Experiment::ScalingCoupling { intensity, scaled_intensity, domain, probes },
        ctx.replicates,
        Some(ctx.primary_out("scaling-coupling")),
    ))?;
    if let Some(path) = resolve_path(cfg, args.wedge_out, "wedge-out")? {
        let stakes = resolve_f64(cfg, args.stakes, "stakes", 1.0)?;
        let points = resolve_usize(cfg, args.wedge_points, "wedge-points", 11)?;
        run_and_report(&ctx.spec(
            Experiment::ScalingWedge { intensity, stakes, points },
            1,
            Some(path),
        ))?;
    }
    if let Some(path) = resolve_path(cfg, args.split_out, "split-out")? {
        let gaps = resolve_list(cfg, args.split_gaps, "split-gaps", &[2.0, 8.0])?;
        let alphas = resolve_list(cfg, args.split_alphas, "split-alphas", &[0.5])?;
        let domain = resolve_f64(cfg, args.split_domain, "split-domain", 10.0)?;
        run_and_report(&ctx.spec(
            Experiment::ScalingSplitGap { gaps, alphas, domain },
            1,
            Some(path),
        ))?;
    }
    Ok(())
}

fn run_reasoning(ctx: &RunContext, args: ReasoningArgs) -> Result<(), HarnessError> {
    let cfg = &ctx.cfg;
    let stakes = resolve_list(cfg, args.q, "q", &[0.5, 1.0, 2.0])?;
    let costs = resolve_list(cfg, args.kappa, "kappa", &[0.05, 0.2, 0.5])?;
    let noise_floors = resolve_list(cfg, args.xi, "xi", &[0.1, 0.375, 1.0])?;
    run_and_report(&ctx.spec(
        Experiment::ReasoningPolicy { stakes, costs, noise_floors },
        1,
        Some(ctx.primary_out("reasoning-policy")),
    ))?;
    let intensity = resolve_f64(cfg, args.intensity, "intensity", 1.0)?;
    let samples = resolve_u64(cfg, args.samples, "samples", 200_000)?;
    if let Some(path) = resolve_path(cfg, args.option_out, "option-out")? {
        let stakes = resolve_f64(cfg, args.option_q, "option-q", 1.5)?;
        let cost = resolve_f64(cfg, args.option_kappa, "option-kappa", 0.1)?;
        let noise_floor = resolve_f64(cfg, args.option_xi, "option-xi", 0.375)?;
        run_and_report(&ctx.spec(
            Experiment::ReasoningOption { intensity, stakes, cost, noise_floor, samples },
            ctx.replicates,
            Some(path),
        ))?;
    }
    if let Some(path) = resolve_path(cfg, args.amplification_out, "amplification-out")? {
        let noise_floor = resolve_f64(cfg, args.amp_xi, "amp-xi", 0.25)?;
        run_and_report(&ctx.spec(
            Experiment::ReasoningAmplification { intensity, noise_floor, samples },
            ctx.replicates,
            Some(path),
        ))?;
    }
    Ok(())
}

fn run_mastery(ctx: &RunContext, args: MasteryArgs) -> Result<(), HarnessError> {
    let cfg = &ctx.cfg;
    let span = resolve_f64(cfg, args.span, "span", 10.0)?;
    let grid_points = resolve_usize(cfg, args.grid_points, "grid-points", 41)?;
    let length_scale = resolve_f64(cfg, args.length_scale, "length-scale", 1.0)?;
    let noise_variance = resolve_f64(cfg, args.noise, "noise", 0.01)?;
    let beta = resolve_f64(cfg, args.beta, "beta", DEFAULT_BETA)?;
    let stakes = resolve_f64(cfg, args.stakes, "stakes", 1.0)?;
    let horizon = resolve_usize(cfg, args.horizon, "horizon", 60)?;
    run_and_report(&ctx.spec(
        Experiment::MasteryTrace {
            span,
            grid_points,
            length_scale,
            noise_variance,
            beta,
            stakes,
            horizon,
        },
        1,
        Some(ctx.primary_out("mastery-trace")),
    ))?;
    if let Some(path) = resolve_path(cfg, args.map_out, "map-out")? {
        run_and_report(&ctx.spec(Experiment::MasteryMap { span, grid_points }, 1, Some(path)))?;
    }
    if let Some(path) = resolve_path(cfg, args.fringe_out, "fringe-out")? {
        let gaps =
            resolve_list(cfg, args.fringe_gaps, "fringe-gaps", &[1.0, 2.0, 4.0, 5.0, 8.0, 16.0])?;
        let fringe_stakes =
            resolve_opt_f64(cfg, args.fringe_stakes, "fringe-stakes")?.unwrap_or(stakes);
        run_and_report(&ctx.spec(
            Experiment::MasteryFringe { gaps, stakes: fringe_stakes },
            1,
            Some(path),
        ))?;
    }
    if let Some(path) = resolve_path(cfg, args.trap_out, "trap-out")? {
        let horizon = resolve_usize(cfg, args.trap_horizon, "trap-horizon", 12)?;
        let step = resolve_usize(cfg, args.trap_forced_step, "trap-forced-step", 0)?;
        let index = resolve_usize(cfg, args.trap_forced_index, "trap-forced-index", 20)?;
        let forced = (step > 0).then_some((step, index));
        run_and_report(&ctx.spec(
            Experiment::MasteryTrap { horizon, forced },
            ctx.replicates,
            Some(path),
        ))?;
    }
    Ok(())
}

fn run_apps(ctx: &RunContext, args: AppsArgs) -> Result<(), HarnessError> {
    let cfg = &ctx.cfg;
    let high = (
        resolve_f64(cfg, args.high_intensity, "high-intensity", 1.0)?,
        resolve_f64(cfg, args.high_cv, "high-cv", 2.0)?,
    );
    let low = (
        resolve_f64(cfg, args.low_intensity, "low-intensity", 1.0 / 6.0)?,
        resolve_f64(cfg, args.low_cv, "low-cv", 0.0)?,
    );
    let convexity = resolve_f64(cfg, args.convexity, "convexity", 1.0)?;
    let q_min = resolve_opt_f64(cfg, args.q_min, "q-min")?;
    let q_max = resolve_opt_f64(cfg, args.q_max, "q-max")?;
    let (q_min, q_max) = match (q_min, q_max) {
        (Some(lo), Some(hi)) => (lo, hi),
        (lo, hi) => {
            let first = ProviderProfile::new(high.0, high.1).map_err(validation)?;
            let second = ProviderProfile::new(low.0, low.1).map_err(validation)?;
            let cutoff = sorting_cutoff(&first, &second, convexity).map_err(validation)?;
            (lo.unwrap_or(cutoff / 2.0), hi.unwrap_or(2.0 * cutoff))
        }
    };
    let points = resolve_usize(cfg, args.q_points, "q-points", 9)?;
    run_and_report(&ctx.spec(
        Experiment::AppsSorting { high, low, convexity, q_min, q_max, points },
        1,
        Some(ctx.primary_out("apps-sorting")),
    ))?;
    let cv = resolve_f64(cfg, args.cv, "cv", 1.0)?;
    let r_min = resolve_f64(cfg, args.r_min, "r-min", 0.5)?;
    let r_max = resolve_f64(cfg, args.r_max, "r-max", 3.0)?;
    let r_points = resolve_usize(cfg, args.r_points, "r-points", 11)?;
    if let Some(path) = resolve_path(cfg, args.adoption_out, "adoption-out")? {
        run_and_report(&ctx.spec(
            Experiment::AppsAdoption { cv, r_min, r_max, points: r_points },
            1,
            Some(path),
        ))?;
    }
    if let Some(path) = resolve_path(cfg, args.delegation_out, "delegation-out")? {
        let effort_cost = resolve_f64(cfg, args.effort_cost, "effort-cost", 0.25)?;
        run_and_report(&ctx.spec(
            Experiment::AppsDelegation { cv, effort_cost, r_min, r_max, points: r_points },
            1,
            Some(path),
        ))?;
    }
    if let Some(path) = resolve_path(cfg, args.verify_out, "verify-out")? {
        let intensity = resolve_f64(cfg, args.intensity, "intensity", 1.0)?;
        let verification_cost = resolve_f64(cfg, args.verify_cost, "verify-cost", 0.01)?;
        let stakes =
            resolve_list(cfg, args.verify_stakes, "verify-stakes", &[0.1, 0.25, 0.5, 1.0])?;
        run_and_report(&ctx.spec(
            Experiment::AppsVerification { intensity, verification_cost, stakes },
            1,
            Some(path),
        ))?;
    }
    Ok(())
}

fn parse_format(text: &str) -> Result<TableFormat, HarnessError> {
    match text.to_ascii_lowercase().as_str() {
        "csv" => Ok(TableFormat::Csv),
        "json" => Ok(TableFormat::Json),
        other => Err(HarnessError::Validation(format!(
            "format must be csv or json, got \"{other}\""
        ))),
    }
}

fn infer_format(path: &Path) -> TableFormat {
    match path.extension().and_then(|e| e.to_str()) {
        Some(ext) if ext.eq_ignore_ascii_case("json") => TableFormat::Json,
        _ => TableFormat::Csv,
    }
}

fn run_adjust(ctx: &RunContext, args: AdjustArgs) -> Result<(), HarnessError> {
    let cfg = &ctx.cfg;
    let scores = resolve_path(cfg, args.scores, "scores")?.ok_or_else(|| {
        HarnessError::Usage(
            "--scores is required: pass a domain score table (CSV or JSON). \
             See `jagged adjust --help` for the expected columns."
                .into(),
        )
    })?;
    let format = match args.format.or(cfg.string("format")?) {
        Some(text) => parse_format(&text)?,
        None => infer_format(&scores),
    };
    let table = ingest_scores(&scores, format).map_err(validation)?;
    let tail_table = match resolve_path(cfg, args.tail_scores, "tail-scores")? {
        Some(path) => {
            let format = infer_format(&path);
            Some(ingest_scores(&path, format).map_err(validation)?)
        }
        None => None,
    };
    let tail_share = resolve_opt_f64(cfg, args.tail_share, "tail-share")?;
    let mixture = match (tail_share, &tail_table) {
        (Some(share), Some(tail)) => Some(
            MixtureSpec::new(share, deployment_weighted_score(&table), deployment_weighted_score(tail))
                .map_err(validation)?,
        ),
        (Some(_), None) => {
            return Err(HarnessError::Validation(
                "--tail-share needs a tail table; pass --tail-scores as well".into(),
            ))
        }
        (None, _) => None,
    };
    let worst_k = resolve_usize(cfg, args.worst_k, "worst-k", 3)?;
    let doc = report(&table, tail_table.as_ref(), mixture.as_ref(), worst_k).map_err(validation)?;
    print!("{}", doc.render());
    if let Some(path) = &ctx.out {
        crate::write_file(path, &doc.to_csv())?;
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn run_voronoi(ctx: &RunContext, args: VoronoiArgs) -> Result<(), HarnessError> {
    let cfg = &ctx.cfg;
    let points = resolve_usize(cfg, args.points, "points", 200)?;
    let probes = resolve_usize(cfg, args.probes, "probes", 100_000)?;
    let box_side = resolve_f64(cfg, args.box_side, "box-side", 1.0)?;
    run_and_report(&ctx.spec(
        Experiment::Voronoi { points, probes, box_side },
        ctx.replicates,
        Some(ctx.primary_out("voronoi")),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn format_helpers() {
        assert!(matches!(parse_format("CSV").unwrap(), TableFormat::Csv));
        assert!(matches!(parse_format("json").unwrap(), TableFormat::Json));
        assert!(parse_format("yaml").is_err());
        assert!(matches!(infer_format(Path::new("x.json")), TableFormat::Json));
        assert!(matches!(infer_format(Path::new("x.JSON")), TableFormat::Json));
        assert!(matches!(infer_format(Path::new("x.csv")), TableFormat::Csv));
        assert!(matches!(infer_format(Path::new("scores")), TableFormat::Csv));
    }

    #[test]
    fn help_and_bad_flags_map_to_exit_codes() {
        assert_eq!(run(["jagged", "--help"]), 0);
        assert_eq!(run(["jagged", "curves", "--help"]), 0);
        assert_eq!(run(["jagged", "no-such-command"]), 1);
        assert_eq!(run(["jagged", "curves", "--points", "many"]), 1);
    }
}
