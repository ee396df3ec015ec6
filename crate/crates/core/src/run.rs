//! Shared result types for algorithm runs: transcripts, competitive ratios
//! against the offline optimum, error reports, and instrumentation counters.

use crate::measures::{compute_errors, ErrorReport};
use crate::model::{ElementId, Prediction, ProblemInstance};
use crate::scalar::Scalar;
use crate::state::{Oracle, QueryState};
use crate::verify::{offline_optimum, VerifyError};

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Query(#[from] crate::state::QueryError),
    #[error(transparent)]
    Verify(#[from] VerifyError),
    #[error(transparent)]
    Vc(#[from] crate::vc::VcError),
    #[error("gamma must be at least 2, got {0}")]
    BadGamma(u32),
    #[error("algorithm requires a {expected} instance")]
    KindMismatch { expected: &'static str },
    #[error("invariant violated: {0}")]
    InvariantViolation(String),
}

/// Per-iteration instrumentation of the hop-distance minimum algorithm.
#[derive(Clone, Copy, Default, PartialEq, Eq, Debug)]
pub struct IterationTrace {
    /// Queries of predicted-mandatory elements under the iteration budget.
    pub budget_queries: usize,
    /// Queries from the witness-pair and enforced-pair steps.
    pub structural_queries: usize,
    /// Known-mandatory queries drained during the iteration.
    pub drain_queries: usize,
}

impl IterationTrace {
    pub fn total(&self) -> usize {
        self.budget_queries + self.structural_queries + self.drain_queries
    }
}

/// Counters filled in by the individual algorithms; fields irrelevant to an
/// algorithm stay at their defaults.
#[derive(Clone, Default, PartialEq, Eq, Debug)]
pub struct RunStats {
    /// Iteration log of the hop-distance minimum algorithm.
    pub iterations: Vec<IterationTrace>,
    /// Initial predicted-mandatory set of the mandatory-distance algorithm.
    pub initial_pred_mandatory: Vec<ElementId>,
    /// Elements drained after the vertex cover was queried.
    pub post_vc_queries: Vec<ElementId>,
    /// Fallback partner queries in spanning-tree phase two.
    pub otherwise_queries: usize,
    /// Spanning-tree phase-two restarts after cover changes.
    pub restarts: usize,
}

/// Outcome of one algorithm run on one instance.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RunResult {
    /// Elements queried, in order.
    pub transcript: Vec<ElementId>,
    /// Number of queries, `transcript.len()`.
    pub queries: usize,
    /// Offline optimum for the same realization.
    pub opt: usize,
    /// Prediction error measures for the run's prediction.
    pub errors: ErrorReport,
    /// Exact competitive ratio `queries / opt`, defined as 1 when both are
    /// zero.
    pub ratio: Scalar,
    pub stats: RunStats,
}

pub(crate) fn assemble_result(
    instance: &ProblemInstance,
    oracle: &Oracle<'_>,
    pred: &Prediction,
    state: QueryState,
    stats: RunStats,
) -> Result<RunResult, RunError> {
    let opt = offline_optimum(instance, oracle.realization())?.len();
    let queries = state.n_queries();
    let ratio = match (queries, opt) {
        (0, 0) => Scalar::one(),
        (q, 0) => Scalar::int(q as i64),
        (q, o) => Scalar::new(q as i64, o as i64),
    };
    Ok(RunResult {
        transcript: state.transcript().to_vec(),
        queries,
        opt,
        errors: compute_errors(instance, oracle.realization(), pred),
        ratio,
        stats,
    })
}

/// Values every element would have if the prediction were true: revealed
/// values where known, predicted values elsewhere.
pub(crate) fn effective_predictions(
    instance: &ProblemInstance,
    state: &QueryState,
    pred: &Prediction,
) -> Vec<Scalar> {
    instance
        .element_ids()
        .map(|i| state.revealed_value(i).unwrap_or_else(|| pred.value(i)))
        .collect()
}
