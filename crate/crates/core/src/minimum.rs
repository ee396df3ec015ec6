//! Query algorithms for the minimum problem under untrusted predictions: a
//! hop-distance sensitive algorithm, a mandatory-distance sensitive
//! algorithm, and the classic witness-pair baseline.

use crate::model::{ElementId, Prediction, ProblemInstance, ProblemKind};
use crate::run::{
    assemble_result, effective_predictions, IterationTrace, RunError, RunResult, RunStats,
};
use crate::state::{leftmost, Oracle, QueryState};
use crate::vc::min_vertex_cover;
use crate::verify::{
    dependency_graph, drain_known_mandatory, is_mandatory_at, is_solved, known_mandatory,
    minimum_set_solved,
};
use std::collections::BTreeSet;

fn require_minimum(instance: &ProblemInstance) -> Result<(), RunError> {
    if instance.kind() == ProblemKind::Minimum {
        Ok(())
    } else {
        Err(RunError::KindMismatch { expected: "minimum" })
    }
}

fn require_gamma(gamma: u32) -> Result<(), RunError> {
    if gamma >= 2 {
        Ok(())
    } else {
        Err(RunError::BadGamma(gamma))
    }
}

/// Whether the predicted (or revealed) value of `j` pins `i` as predicted
/// mandatory through a shared unsolved set: the value lies strictly inside
/// the effective interval of `i`, and some unsolved set containing both has
/// `i` leftmost, or `j` leftmost with `i` leftmost among the rest.
pub fn enforces(
    instance: &ProblemInstance,
    state: &QueryState,
    values: &[crate::scalar::Scalar],
    j: ElementId,
    i: ElementId,
) -> bool {
    if i == j || !state.is_active(instance, i) || !state.is_active(instance, j) {
        return false;
    }
    if !state.effective(instance, i).strictly_contains(values[j.idx()]) {
        return false;
    }
    instance.sets_containing(j).iter().any(|&s| {
        let members = &instance.sets()[s];
        // A solved set imposes nothing on its members anymore.
        if !members.contains(&i) || minimum_set_solved(instance, state, members) {
            return false;
        }
        let l = leftmost(instance, state, members);
        if l == i {
            return true;
        }
        if l == j {
            let rest: Vec<ElementId> = members.iter().copied().filter(|&m| m != j).collect();
            return leftmost(instance, state, &rest) == i;
        }
        false
    })
}

/// Whether `{a, b}` is a witness pair: their effective intervals intersect
/// and some unsolved set containing both has one of them leftmost. At least
/// one of a witness pair appears in every feasible query set.
pub fn witness_pair(
    instance: &ProblemInstance,
    state: &QueryState,
    a: ElementId,
    b: ElementId,
) -> bool {
    if a == b || !state.is_active(instance, a) || !state.is_active(instance, b) {
        return false;
    }
    if !state
        .effective(instance, a)
        .intersects(&state.effective(instance, b))
    {
        return false;
    }
    instance.sets_containing(a).iter().any(|&s| {
        let members = &instance.sets()[s];
        // Only an unsolved set forces one of its witnesses to be queried.
        if !members.contains(&b) || minimum_set_solved(instance, state, members) {
            return false;
        }
        let l = leftmost(instance, state, members);
        l == a || l == b
    })
}

fn active_elements(instance: &ProblemInstance, state: &QueryState) -> Vec<ElementId> {
    instance
        .element_ids()
        .filter(|&i| state.is_active(instance, i))
        .collect()
}

fn predicted_mandatory(
    instance: &ProblemInstance,
    state: &QueryState,
    pred: &Prediction,
) -> Vec<ElementId> {
    let values = effective_predictions(instance, state, pred);
    instance
        .element_ids()
        .filter(|&i| is_mandatory_at(instance, state, &values, i))
        .collect()
}

// Queries the minimum vertex cover of the dependency graph, then drains the
// known mandatory elements this exposes. Returns the drained elements.
fn query_cover_and_drain(
    instance: &ProblemInstance,
    state: &mut QueryState,
    oracle: &Oracle<'_>,
) -> Result<Vec<ElementId>, RunError> {
    let dep = dependency_graph(instance, state)?;
    let cover = dep.cover_elements(&min_vertex_cover(&dep)?);
    for i in cover {
        state.query(instance, oracle, i)?;
    }
    Ok(drain_known_mandatory(instance, state, oracle)?)
}

/// Minimum algorithm with guarantees against the hop distance: queries up to
/// `gamma - 2` predicted-mandatory elements per round, then resolves one
/// enforced element through a witness pair (or directly), and finishes with
/// a vertex cover once predictions stop producing queries. Guarantees at
/// most `min((1 + 1/gamma) (opt + k_hop), gamma * opt)` queries.
pub fn run_alg_hop(
    instance: &ProblemInstance,
    pred: &Prediction,
    gamma: u32,
    oracle: &Oracle<'_>,
) -> Result<RunResult, RunError> {
    require_minimum(instance)?;
    require_gamma(gamma)?;
    let mut state = QueryState::new(instance);
    let mut stats = RunStats::default();
    loop {
        let mut trace = IterationTrace::default();
        trace.drain_queries += drain_known_mandatory(instance, &mut state, oracle)?.len();
        // Budget phase: up to gamma - 2 predicted-mandatory queries.
        let mut budget_used = 0usize;
        while budget_used + 2 < gamma as usize {
            let p = predicted_mandatory(instance, &state, pred);
            let Some(&next) = p.first() else { break };
            state.query(instance, oracle, next)?;
            budget_used += 1;
            trace.budget_queries += 1;
            trace.drain_queries += drain_known_mandatory(instance, &mut state, oracle)?.len();
        }
        // Structural phase: first enforced element, resolved through a
        // witness partner of its enforcer when one exists.
        let values = effective_predictions(instance, &state, pred);
        let actives = active_elements(instance, &state);
        let mut trio = None;
        let mut pair = None;
        'search: for &j in &actives {
            for &i in &actives {
                if !enforces(instance, &state, &values, j, i) {
                    continue;
                }
                if pair.is_none() {
                    pair = Some((j, i));
                }
                for &l in &actives {
                    if l != i && witness_pair(instance, &state, j, l) {
                        trio = Some((j, i, l));
                        break 'search;
                    }
                }
            }
        }
        if let Some((j, i, l)) = trio {
            let wj = state.query(instance, oracle, j)?;
            state.query(instance, oracle, l)?;
            trace.structural_queries += 2;
            if state.effective(instance, i).strictly_contains(wj) {
                state.query(instance, oracle, i)?;
                trace.structural_queries += 1;
            }
        } else if let Some((_, i)) = pair {
            state.query(instance, oracle, i)?;
            trace.structural_queries += 1;
        }
        let quiet = trace.total() == 0;
        stats.iterations.push(trace);
        if quiet {
            break;
        }
    }
    drain_known_mandatory(instance, &mut state, oracle)?;
    stats.post_vc_queries = query_cover_and_drain(instance, &mut state, oracle)?;
    assemble_result(instance, oracle, pred, state, stats)
}

/// Minimum algorithm with guarantees against the mandatory-query distance:
/// works through the initially predicted mandatory set in batches of
/// `gamma - 1` plus one witness partner each, then finishes with a vertex
/// cover. Guarantees at most
/// `min((1 + 1/(gamma-1)) (opt + k_mqd), gamma * opt)` queries.
///
/// `pred_mandatory_override` replaces the computed predicted-mandatory set,
/// which lets learned sets drive the algorithm directly.
pub fn run_alg_mqd(
    instance: &ProblemInstance,
    pred: &Prediction,
    gamma: u32,
    pred_mandatory_override: Option<&[ElementId]>,
    oracle: &Oracle<'_>,
) -> Result<RunResult, RunError> {
    require_minimum(instance)?;
    require_gamma(gamma)?;
    let mut state = QueryState::new(instance);
    let mut stats = RunStats::default();
    let mut pending: BTreeSet<ElementId> = match pred_mandatory_override {
        Some(ids) => ids
            .iter()
            .copied()
            .filter(|&i| state.is_active(instance, i))
            .collect(),
        None => predicted_mandatory(instance, &state, pred).into_iter().collect(),
    };
    stats.initial_pred_mandatory = pending.iter().copied().collect();
    loop {
        // Smallest pending element that still forms a witness pair, with its
        // smallest unqueried partner.
        let mut found = None;
        'outer: for &p in &pending {
            for b in instance.element_ids() {
                if b != p && witness_pair(instance, &state, p, b) {
                    found = Some((p, b));
                    break 'outer;
                }
            }
        }
        let Some((p, b)) = found else { break };
        if pending.len() >= gamma as usize - 1 {
            let mut batch: BTreeSet<ElementId> = BTreeSet::from([p, b]);
            for &q in pending.iter().filter(|&&q| q != p).take(gamma as usize - 2) {
                batch.insert(q);
            }
            for &q in &batch {
                state.query(instance, oracle, q)?;
                pending.remove(&q);
            }
            loop {
                let known = known_mandatory(instance, &state);
                let Some(&next) = known.first() else { break };
                state.query(instance, oracle, next)?;
                pending.remove(&next);
            }
        } else {
            let batch: Vec<ElementId> = pending.iter().copied().collect();
            for q in batch {
                state.query(instance, oracle, q)?;
            }
            pending.clear();
        }
    }
    drain_known_mandatory(instance, &mut state, oracle)?;
    stats.post_vc_queries = query_cover_and_drain(instance, &mut state, oracle)?;
    assemble_result(instance, oracle, pred, state, stats)
}

/// Prediction-free baseline: repeatedly drains known mandatory elements and
/// queries a witness pair of the first unsolved set. At most `2 * opt`
/// queries.
pub fn run_witness_baseline(
    instance: &ProblemInstance,
    oracle: &Oracle<'_>,
) -> Result<RunResult, RunError> {
    require_minimum(instance)?;
    let mut state = QueryState::new(instance);
    loop {
        drain_known_mandatory(instance, &mut state, oracle)?;
        let Some(members) = instance
            .sets()
            .iter()
            .find(|members| !crate::verify::minimum_set_solved(instance, &state, members))
        else {
            break;
        };
        let i = leftmost(instance, &state, members);
        if !state.is_active(instance, i) {
            return Err(RunError::InvariantViolation(
                "unsolved set with inactive leftmost element".into(),
            ));
        }
        let eff_i = state.effective(instance, i);
        let j = members
            .iter()
            .copied()
            .find(|&j| {
                j != i
                    && state.is_active(instance, j)
                    && eff_i.intersects(&state.effective(instance, j))
            })
            .ok_or_else(|| {
                RunError::InvariantViolation(
                    "unsolved set without an intersecting witness partner".into(),
                )
            })?;
        let (first, second) = (i.min(j), i.max(j));
        state.query(instance, oracle, first)?;
        state.query(instance, oracle, second)?;
    }
    debug_assert!(is_solved(instance, &state));
    // The baseline ignores predictions; its result carries the realization
    // as its own prediction, so its error report is all zeros.
    let pred = Prediction::new(instance, oracle.realization().values().to_vec())
        .expect("realization values are admissible predictions");
    assemble_result(instance, oracle, &pred, state, RunStats::default())
}
