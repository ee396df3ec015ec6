//! Query state: which elements have been revealed so far, in what order, and
//! the oracle that answers queries from a hidden realization.

use crate::interval::UncertaintyInterval;
use crate::model::{ElementId, ProblemInstance, Realization};
use crate::scalar::Scalar;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum QueryError {
    #[error("element {0} does not exist")]
    OutOfRange(ElementId),
    #[error("element {0} is trivial and must not be queried")]
    TrivialQuery(ElementId),
    #[error("element {0} was already queried")]
    RepeatedQuery(ElementId),
}

/// Answers queries from a fixed hidden realization. Algorithms receive the
/// oracle but must not read values except through [`QueryState::query`];
/// verification code that legitimately needs full knowledge works with the
/// [`Realization`] directly.
pub struct Oracle<'a> {
    real: &'a Realization,
}

impl<'a> Oracle<'a> {
    pub fn new(real: &'a Realization) -> Self {
        Oracle { real }
    }

    fn reveal(&self, id: ElementId) -> Scalar {
        self.real.value(id)
    }

    /// The full realization, for post-run verification and bookkeeping.
    pub fn realization(&self) -> &Realization {
        self.real
    }
}

/// Mutable record of a run: revealed values and the exact query order.
/// Enforces that only open intervals are queried and none twice.
#[derive(Clone, PartialEq, Eq)]
pub struct QueryState {
    revealed: Vec<Option<Scalar>>,
    transcript: Vec<ElementId>,
}

impl QueryState {
    pub fn new(instance: &ProblemInstance) -> Self {
        QueryState {
            revealed: vec![None; instance.n_elements()],
            transcript: Vec::new(),
        }
    }

    pub fn query(
        &mut self,
        instance: &ProblemInstance,
        oracle: &Oracle<'_>,
        id: ElementId,
    ) -> Result<Scalar, QueryError> {
        if id.idx() >= self.revealed.len() {
            return Err(QueryError::OutOfRange(id));
        }
        if instance.interval(id).is_trivial() {
            return Err(QueryError::TrivialQuery(id));
        }
        if self.revealed[id.idx()].is_some() {
            return Err(QueryError::RepeatedQuery(id));
        }
        let value = oracle.reveal(id);
        self.revealed[id.idx()] = Some(value);
        self.transcript.push(id);
        Ok(value)
    }

    pub fn is_queried(&self, id: ElementId) -> bool {
        self.revealed[id.idx()].is_some()
    }

    pub fn revealed_value(&self, id: ElementId) -> Option<Scalar> {
        self.revealed[id.idx()]
    }

    /// The current knowledge about element `id`: its revealed value as a
    /// trivial interval once queried, its original interval otherwise.
    pub fn effective(&self, instance: &ProblemInstance, id: ElementId) -> UncertaintyInterval {
        match self.revealed[id.idx()] {
            Some(v) => UncertaintyInterval::trivial(v),
            None => instance.interval(id),
        }
    }

    /// True when the element still carries uncertainty: originally open and
    /// not yet queried.
    pub fn is_active(&self, instance: &ProblemInstance, id: ElementId) -> bool {
        instance.interval(id).is_open() && !self.is_queried(id)
    }

    pub fn transcript(&self) -> &[ElementId] {
        &self.transcript
    }

    pub fn n_queries(&self) -> usize {
        self.transcript.len()
    }

    /// Marks every element of `ids` as revealed at the given value without
    /// touching the transcript. Used by verification code to evaluate
    /// hypothetical states (under true or predicted values); algorithms must
    /// not call this.
    pub fn reveal_hypothetically(&mut self, values: &[Scalar], ids: impl IntoIterator<Item = ElementId>) {
        for id in ids {
            if self.revealed[id.idx()].is_none() {
                self.revealed[id.idx()] = Some(values[id.idx()]);
            }
        }
    }
}

/// The element of `members` with the smallest effective lower limit, ties
/// broken by smallest id. This deterministic rule is used everywhere a
/// "leftmost" element of a set is needed.
pub fn leftmost(
    instance: &ProblemInstance,
    state: &QueryState,
    members: &[ElementId],
) -> ElementId {
    debug_assert!(!members.is_empty());
    let mut best = members[0];
    let mut best_lower = state.effective(instance, best).lower();
    for &id in &members[1..] {
        let lower = state.effective(instance, id).lower();
        if lower < best_lower || (lower == best_lower && id < best) {
            best = id;
            best_lower = lower;
        }
    }
    best
}
