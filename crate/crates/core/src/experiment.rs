//! Campaign harness: runs a roster of algorithms over instances and prediction
//! batches, bins competitive ratios by normalized prediction error, and emits
//! the aggregate table as CSV.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rayon::prelude::*;

use crate::fixtures::{lower_bound_fixture, FixtureKind};
use crate::gen::GenError;
use crate::measures::compute_errors;
use crate::model::{Prediction, ProblemInstance, ProblemKind, Realization};
use crate::mst::{run_cycle_baseline, run_mst, Recovery};
use crate::minimum::{run_alg_hop, run_alg_mqd, run_witness_baseline};
use crate::run::{RunError, RunResult};
use crate::scalar::Scalar;
use crate::sorting::{run_sort_general, run_sort_single, MinimumAlgorithm};
use crate::state::Oracle;
use crate::verify::{brute_force_optimum, offline_optimum};

#[derive(Debug, thiserror::Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Gen(#[from] GenError),
    #[error(transparent)]
    Run(#[from] RunError),
    #[error("invalid campaign configuration: {0}")]
    Config(String),
}

// Offline optima are re-derived by exhaustive search whenever at most this
// many elements are open.
const CROSS_CHECK_CAP: usize = 12;

/// A runnable algorithm choice; `label` and `gamma_label` give the CSV cells.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum AlgorithmSpec {
    /// Hop-guided minimum search with query budget `gamma` per iteration.
    Hop { gamma: u32 },
    /// Mandatory-set-guided minimum search with budget `gamma`.
    Mqd { gamma: u32 },
    /// Mandatory-set-guided search with `gamma` equal to the element count.
    MqdAdaptive,
    /// Prediction-free witness-pair baseline for minimum instances.
    WitnessBaseline,
    /// Single-set sorting specialization; requires pairwise disjoint sets.
    SortSingle,
    /// Sorting via the reduction with the hop-guided core.
    SortHop { gamma: u32 },
    /// Sorting via the reduction with the mandatory-set-guided core.
    SortMqd { gamma: u32 },
    /// Spanning-tree algorithm with the chosen recovery strategy.
    Mst { gamma: u32, recovery: Recovery },
    /// Prediction-free cycle baseline for spanning-tree instances.
    MstBaseline,
}

impl AlgorithmSpec {
    pub fn label(&self) -> &'static str {
        match self {
            AlgorithmSpec::Hop { .. } => "hop",
            AlgorithmSpec::Mqd { .. } | AlgorithmSpec::MqdAdaptive => "mqd",
            AlgorithmSpec::WitnessBaseline => "witness-baseline",
            AlgorithmSpec::SortSingle => "sort-single",
            AlgorithmSpec::SortHop { .. } => "sort-hop",
            AlgorithmSpec::SortMqd { .. } => "sort-mqd",
            AlgorithmSpec::Mst { recovery: Recovery::A, .. } => "mst-a",
            AlgorithmSpec::Mst { recovery: Recovery::B, .. } => "mst-b",
            AlgorithmSpec::MstBaseline => "cycle-baseline",
        }
    }

    pub fn gamma_label(&self) -> String {
        match self {
            AlgorithmSpec::Hop { gamma }
            | AlgorithmSpec::Mqd { gamma }
            | AlgorithmSpec::SortHop { gamma }
            | AlgorithmSpec::SortMqd { gamma }
            | AlgorithmSpec::Mst { gamma, .. } => gamma.to_string(),
            AlgorithmSpec::MqdAdaptive => "n".to_string(),
            AlgorithmSpec::WitnessBaseline
            | AlgorithmSpec::SortSingle
            | AlgorithmSpec::MstBaseline => "-".to_string(),
        }
    }

    pub fn run(
        &self,
        instance: &ProblemInstance,
        pred: &Prediction,
        oracle: &Oracle<'_>,
    ) -> Result<RunResult, RunError> {
        match *self {
            AlgorithmSpec::Hop { gamma } => run_alg_hop(instance, pred, gamma, oracle),
            AlgorithmSpec::Mqd { gamma } => run_alg_mqd(instance, pred, gamma, None, oracle),
            AlgorithmSpec::MqdAdaptive => {
                let gamma = instance.n_elements().max(2) as u32;
                run_alg_mqd(instance, pred, gamma, None, oracle)
            }
            AlgorithmSpec::WitnessBaseline => run_witness_baseline(instance, oracle),
            AlgorithmSpec::SortSingle => run_sort_single(instance, pred, oracle),
            AlgorithmSpec::SortHop { gamma } => {
                run_sort_general(instance, pred, gamma, MinimumAlgorithm::Hop, oracle)
            }
            AlgorithmSpec::SortMqd { gamma } => {
                run_sort_general(instance, pred, gamma, MinimumAlgorithm::Mqd, oracle)
            }
            AlgorithmSpec::Mst { gamma, recovery } => {
                run_mst(instance, pred, gamma, recovery, oracle)
            }
            AlgorithmSpec::MstBaseline => run_cycle_baseline(instance, oracle),
        }
    }
}

/// One instance together with its true values and a batch of predictions.
#[derive(Clone)]
pub struct CampaignCase {
    pub instance: ProblemInstance,
    pub realization: Realization,
    pub predictions: Vec<Prediction>,
}

/// A full experiment: every algorithm runs on every (case, prediction) pair.
#[derive(Clone)]
pub struct Campaign {
    pub cases: Vec<CampaignCase>,
    pub algorithms: Vec<AlgorithmSpec>,
    pub bin_width: Scalar,
}

/// Conventional bin widths: 0.1 for spanning trees, 0.2 otherwise.
pub fn default_bin_width(kind: ProblemKind) -> Scalar {
    match kind {
        ProblemKind::Mst => Scalar::new(1, 10),
        _ => Scalar::new(1, 5),
    }
}

/// One output row: all runs of one algorithm whose normalized error fell into
/// the bin starting at `bin_lower`.
#[derive(Clone, Debug)]
pub struct BinRow {
    pub bin_lower: Scalar,
    pub algorithm: String,
    pub gamma: String,
    pub mean_cr: BigRational,
    pub max_cr: Scalar,
    pub runs: u64,
}

fn big(value: Scalar) -> BigRational {
    BigRational::new(BigInt::from(value.numer()), BigInt::from(value.denom()))
}

// Floor of (k_mqd / opt) / width, entirely in integers.
fn bin_index(k_mqd: usize, opt: usize, width: Scalar) -> u64 {
    let numer = k_mqd as i64 * width.denom();
    let denom = opt as i64 * width.numer();
    (numer / denom) as u64
}

fn open_count(instance: &ProblemInstance) -> usize {
    instance.intervals().iter().filter(|iv| iv.is_open()).count()
}

struct Accum {
    sum: BigRational,
    max: Scalar,
    count: u64,
}

/// Runs the campaign and aggregates per (bin, algorithm): mean and maximum
/// competitive ratio and the run count. Runs whose offline optimum is zero are
/// dropped because their ratio is not meaningful. Small cases are cross-checked
/// against exhaustive search; a disagreement aborts the whole campaign.
pub fn run_campaign(campaign: &Campaign) -> Result<Vec<BinRow>, ExperimentError> {
    if campaign.bin_width <= Scalar::zero() {
        return Err(ExperimentError::Config("bin width must be positive".into()));
    }
    let width = campaign.bin_width;
    let per_case: Vec<Vec<(u64, usize, Scalar)>> = campaign
        .cases
        .par_iter()
        .map(|case| -> Result<Vec<(u64, usize, Scalar)>, ExperimentError> {
            let oracle = Oracle::new(&case.realization);
            let opt = offline_optimum(&case.instance, &case.realization)
                .map_err(RunError::from)?
                .len();
            if open_count(&case.instance) <= CROSS_CHECK_CAP {
                let brute = brute_force_optimum(&case.instance, &case.realization, CROSS_CHECK_CAP)
                    .map_err(RunError::from)?
                    .len();
                if brute != opt {
                    return Err(RunError::InvariantViolation(format!(
                        "offline optimum {opt} disagrees with exhaustive search {brute}"
                    ))
                    .into());
                }
            }
            if opt == 0 {
                return Ok(Vec::new());
            }
            let mut samples = Vec::new();
            for pred in &case.predictions {
                let errors = compute_errors(&case.instance, &case.realization, pred);
                let bin = bin_index(errors.k_mqd, opt, width);
                for (ai, alg) in campaign.algorithms.iter().enumerate() {
                    let result = alg.run(&case.instance, pred, &oracle)?;
                    samples.push((bin, ai, result.ratio));
                }
            }
            Ok(samples)
        })
        .collect::<Result<_, _>>()?;

    let mut table: BTreeMap<(u64, usize), Accum> = BTreeMap::new();
    for (bin, ai, ratio) in per_case.into_iter().flatten() {
        let entry = table.entry((bin, ai)).or_insert_with(|| Accum {
            sum: BigRational::from_integer(BigInt::from(0)),
            max: ratio,
            count: 0,
        });
        entry.sum += big(ratio);
        entry.max = entry.max.max(ratio);
        entry.count += 1;
    }
    Ok(table
        .into_iter()
        .map(|((bin, ai), accum)| {
            let alg = &campaign.algorithms[ai];
            BinRow {
                bin_lower: Scalar::new(bin as i64 * width.numer(), width.denom()),
                algorithm: alg.label().to_string(),
                gamma: alg.gamma_label(),
                mean_cr: accum.sum / BigRational::from_integer(BigInt::from(accum.count)),
                max_cr: accum.max,
                runs: accum.count,
            }
        })
        .collect())
}

// Fixed-point rendering with six fractional digits, round half up.
fn decimal6(value: &BigRational) -> String {
    let million = BigInt::from(1_000_000u32);
    let scaled = (value * BigRational::from_integer(million.clone())
        + BigRational::new(BigInt::from(1), BigInt::from(2)))
    .floor()
    .to_integer();
    let int = &scaled / &million;
    let frac = (&scaled % &million).to_u64().unwrap_or(0);
    format!("{int}.{frac:06}")
}

/// Serializes rows in bin-then-roster order. The output is byte-stable for a
/// fixed campaign, which makes seeded reruns comparable with plain diff.
pub fn to_csv(rows: &[BinRow]) -> String {
    let mut out = String::from("error_bin,algorithm,gamma,mean_cr,max_cr,runs\n");
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            row.bin_lower.to_decimal_string(),
            row.algorithm,
            row.gamma,
            decimal6(&row.mean_cr),
            decimal6(&big(row.max_cr)),
            row.runs
        ));
    }
    out
}

/// One algorithm's showing on a pinned construction.
#[derive(Clone, Debug)]
pub struct FixtureLine {
    pub algorithm: String,
    pub gamma: String,
    pub queries: usize,
    pub opt: usize,
    pub ratio: Scalar,
    /// Set when the ratio undercuts the floor the construction forces, which
    /// would mean the run cheated somewhere.
    pub below_floor: bool,
}

fn fixture_roster(kind: FixtureKind, problem: ProblemKind) -> Vec<AlgorithmSpec> {
    match problem {
        ProblemKind::Minimum => vec![
            AlgorithmSpec::Hop { gamma: 2 },
            AlgorithmSpec::Hop { gamma: 3 },
            AlgorithmSpec::Mqd { gamma: 2 },
            AlgorithmSpec::Mqd { gamma: 3 },
            AlgorithmSpec::MqdAdaptive,
            AlgorithmSpec::WitnessBaseline,
        ],
        ProblemKind::Sorting => {
            let mut roster = vec![
                AlgorithmSpec::SortHop { gamma: 2 },
                AlgorithmSpec::SortMqd { gamma: 2 },
            ];
            // Only this construction keeps its sorting sets disjoint.
            if matches!(kind, FixtureKind::ErrorMeasure { .. }) {
                roster.push(AlgorithmSpec::SortSingle);
            }
            roster
        }
        ProblemKind::Mst => vec![
            AlgorithmSpec::Mst { gamma: 2, recovery: Recovery::A },
            AlgorithmSpec::Mst { gamma: 2, recovery: Recovery::B },
            AlgorithmSpec::Mst { gamma: 3, recovery: Recovery::B },
            AlgorithmSpec::MstBaseline,
        ],
    }
}

/// Runs the standard roster against a pinned construction and reports each
/// ratio. Prediction-free baselines on the off-by-one construction must score
/// at least 2; every run must score at least 1.
pub fn verify_fixture(
    kind: FixtureKind,
    problem: ProblemKind,
) -> Result<Vec<FixtureLine>, ExperimentError> {
    let fixture = lower_bound_fixture(kind, problem)?;
    let oracle = Oracle::new(&fixture.realization);
    let mut lines = Vec::new();
    for alg in fixture_roster(kind, problem) {
        let result = alg.run(&fixture.instance, &fixture.prediction, &oracle)?;
        let baseline =
            matches!(alg, AlgorithmSpec::WitnessBaseline | AlgorithmSpec::MstBaseline);
        let floor = if baseline && matches!(kind, FixtureKind::ErrorMeasure { .. }) {
            Scalar::int(2)
        } else {
            Scalar::one()
        };
        lines.push(FixtureLine {
            algorithm: alg.label().to_string(),
            gamma: alg.gamma_label(),
            queries: result.queries,
            opt: result.opt,
            ratio: result.ratio,
            below_floor: result.ratio < floor,
        });
    }
    Ok(lines)
}
