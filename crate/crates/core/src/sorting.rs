//! Sorting under uncertainty: a reduction to the minimum problem for
//! arbitrary set systems, and a dedicated algorithm for instances whose sets
//! are disjoint, with guarantees against all three error measures at once.

use crate::interval::UncertaintyInterval;
use crate::model::{
    ElementId, MinimumInstance, Prediction, ProblemInstance, ProblemKind, Realization,
};
use crate::run::{assemble_result, RunError, RunResult, RunStats};
use crate::state::{Oracle, QueryState};
use crate::verify::{is_solved, offline_optimum};
use std::collections::{BTreeMap, BTreeSet};

/// Which minimum algorithm drives the general sorting solver.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum MinimumAlgorithm {
    Hop,
    Mqd,
}

fn require_sorting(instance: &ProblemInstance) -> Result<(), RunError> {
    if instance.kind() == ProblemKind::Sorting {
        Ok(())
    } else {
        Err(RunError::KindMismatch { expected: "sorting" })
    }
}

/// Reduces a sorting instance to a minimum instance over the same elements:
/// one two-element set per unordered pair of co-occurring elements whose
/// intervals intersect. Determining each pair's minimum is exactly deciding
/// its order, so feasible query sets, optima, and error measures coincide.
pub fn reduce_to_minimum(instance: &ProblemInstance) -> Result<ProblemInstance, RunError> {
    require_sorting(instance)?;
    let mut pairs: BTreeSet<(ElementId, ElementId)> = BTreeSet::new();
    for members in instance.sets() {
        for (a, &i) in members.iter().enumerate() {
            for &j in &members[a + 1..] {
                if instance.interval(i).intersects(&instance.interval(j)) {
                    pairs.insert((i.min(j), i.max(j)));
                }
            }
        }
    }
    let sets: Vec<Vec<ElementId>> = pairs.into_iter().map(|(a, b)| vec![a, b]).collect();
    let reduced = MinimumInstance::new(instance.intervals().to_vec(), sets)
        .expect("reduction preserves element validity");
    Ok(ProblemInstance::Minimum(reduced))
}

/// Solves a sorting instance by reduction to the minimum problem, driven by
/// the chosen minimum algorithm. The result is reported against the sorting
/// instance (its optimum and error measures agree with the reduction's).
pub fn run_sort_general(
    instance: &ProblemInstance,
    pred: &Prediction,
    gamma: u32,
    algorithm: MinimumAlgorithm,
    oracle: &Oracle<'_>,
) -> Result<RunResult, RunError> {
    let reduced = reduce_to_minimum(instance)?;
    let reduced_pred = Prediction::new(&reduced, pred.values().to_vec())
        .expect("prediction values transfer to the reduction");
    let reduced_real = Realization::new(&reduced, oracle.realization().values().to_vec())
        .expect("realization values transfer to the reduction");
    let reduced_oracle = Oracle::new(&reduced_real);
    let inner = match algorithm {
        MinimumAlgorithm::Hop => {
            crate::minimum::run_alg_hop(&reduced, &reduced_pred, gamma, &reduced_oracle)?
        }
        MinimumAlgorithm::Mqd => {
            crate::minimum::run_alg_mqd(&reduced, &reduced_pred, gamma, None, &reduced_oracle)?
        }
    };
    // Report against the sorting instance; the reduction preserves both the
    // optimum and the error measures, so this is a re-expression, not a
    // recomputation of substance.
    let mut state = QueryState::new(instance);
    for &i in &inner.transcript {
        state.query(instance, oracle, i)?;
    }
    if !is_solved(instance, &state) {
        return Err(RunError::InvariantViolation(
            "reduction transcript does not solve the sorting instance".into(),
        ));
    }
    assemble_result(instance, oracle, pred, state, inner.stats)
}

// State of the dedicated single-set algorithm for one scope (one set).
struct ScopeRun {
    // Smallest co-member whose predicted value lies inside each element.
    pi: BTreeMap<ElementId, ElementId>,
    // Arcs retained at the query phase: child -> parent (pi of the child).
    parent: BTreeMap<ElementId, ElementId>,
    // Clique partition of the queried predicted-mandatory set, by head.
    cliques: BTreeMap<ElementId, BTreeSet<ElementId>>,
    // The fixed predicted-mandatory set S of the query phase.
    s_set: Vec<ElementId>,
}

impl ScopeRun {
    fn depth(&self, mut i: ElementId) -> usize {
        let mut d = 0;
        while let Some(&p) = self.parent.get(&i) {
            d += 1;
            i = p;
        }
        d
    }

    fn creates_cycle(&self, from_parent: ElementId, child: ElementId) -> bool {
        let mut cur = from_parent;
        loop {
            if cur == child {
                return true;
            }
            match self.parent.get(&cur) {
                Some(&p) => cur = p,
                None => return false,
            }
        }
    }
}

// Queries the smallest active element whose effective interval encloses a
// co-member's effective interval, repeatedly.
fn drain_enclosures(
    instance: &ProblemInstance,
    state: &mut QueryState,
    oracle: &Oracle<'_>,
    scope: &[ElementId],
) -> Result<(), RunError> {
    loop {
        let next = scope.iter().copied().find(|&i| {
            state.is_active(instance, i) && {
                let eff = state.effective(instance, i);
                scope
                    .iter()
                    .any(|&j| j != i && eff.encloses(&state.effective(instance, j)))
            }
        });
        match next {
            Some(i) => {
                state.query(instance, oracle, i)?;
            }
            None => return Ok(()),
        }
    }
}

// Like `drain_enclosures` but only for revealed or trivial values landing
// inside an interval; open-in-open enclosures cannot arise after the initial
// drain since intervals only ever collapse to points.
fn drain_values(
    instance: &ProblemInstance,
    state: &mut QueryState,
    oracle: &Oracle<'_>,
    scope: &[ElementId],
) -> Result<(), RunError> {
    loop {
        let next = scope.iter().copied().find(|&i| {
            state.is_active(instance, i) && {
                let eff = state.effective(instance, i);
                scope.iter().any(|&j| {
                    j != i
                        && match state.effective(instance, j) {
                            UncertaintyInterval::Trivial(v) => eff.strictly_contains(v),
                            UncertaintyInterval::Open { .. } => false,
                        }
                })
            }
        });
        match next {
            Some(i) => {
                state.query(instance, oracle, i)?;
            }
            None => return Ok(()),
        }
    }
}

// Pairwise comparability of the scope under current knowledge.
fn scope_solved(instance: &ProblemInstance, state: &QueryState, scope: &[ElementId]) -> bool {
    let mut sorted: Vec<ElementId> = scope.to_vec();
    sorted.sort_by_key(|&i| {
        let eff = state.effective(instance, i);
        (eff.lower(), eff.upper(), i)
    });
    sorted
        .windows(2)
        .all(|w| state.effective(instance, w[0]).upper() <= state.effective(instance, w[1]).lower())
}

fn run_scope(
    instance: &ProblemInstance,
    state: &mut QueryState,
    pred: &Prediction,
    oracle: &Oracle<'_>,
    scope: &[ElementId],
) -> Result<(), RunError> {
    // Predicted-mandatory members and their smallest predicted enforcer,
    // both fixed against the original intervals.
    let mut pi = BTreeMap::new();
    let mut pred_mandatory = Vec::new();
    for &i in scope {
        if instance.interval(i).is_trivial() {
            continue;
        }
        let enforcer = scope
            .iter()
            .copied()
            .find(|&j| j != i && instance.interval(i).strictly_contains(pred.value(j)));
        if let Some(j) = enforcer {
            pred_mandatory.push(i);
            pi.insert(i, j);
        }
    }

    drain_enclosures(instance, state, oracle, scope)?;

    let mut run = ScopeRun {
        pi,
        parent: BTreeMap::new(),
        cliques: BTreeMap::new(),
        s_set: pred_mandatory
            .iter()
            .copied()
            .filter(|&i| state.is_active(instance, i))
            .collect(),
    };

    // Query the remaining predicted-mandatory elements, remembering which
    // enforcement arcs stay acyclic.
    for idx in 0..run.s_set.len() {
        let i = run.s_set[idx];
        state.query(instance, oracle, i)?;
        let p = run.pi[&i];
        if !run.creates_cycle(p, i) {
            run.parent.insert(i, p);
        }
    }

    drain_values(instance, state, oracle, scope)?;

    // Partition the queried set into cliques by their retained enforcer,
    // processing deepest-first so children are grouped before their heads.
    let mut s_work: BTreeSet<ElementId> = run.s_set.iter().copied().collect();
    while !s_work.is_empty() {
        let &i = s_work
            .iter()
            .max_by_key(|&&i| (run.depth(i), std::cmp::Reverse(i)))
            .unwrap();
        if let Some(&p) = run.parent.get(&i) {
            let mut members: BTreeSet<ElementId> = s_work
                .iter()
                .copied()
                .filter(|&x| run.parent.get(&x) == Some(&p))
                .collect();
            if s_work.contains(&p) {
                members.insert(p);
            }
            for &m in &members {
                s_work.remove(&m);
            }
            run.cliques.insert(p, members);
        } else {
            s_work.remove(&i);
            run.cliques.insert(i, BTreeSet::from([i]));
        }
    }

    // Path phase: the intersection graph of the remaining open elements must
    // consist of paths; query alternate vertices until the scope is sorted.
    loop {
        if scope_solved(instance, state, scope) {
            break;
        }
        let actives: Vec<ElementId> = scope
            .iter()
            .copied()
            .filter(|&i| state.is_active(instance, i))
            .collect();
        let neighbors = |i: ElementId| -> Vec<ElementId> {
            let eff = state.effective(instance, i);
            actives
                .iter()
                .copied()
                .filter(|&j| j != i && eff.intersects(&state.effective(instance, j)))
                .collect()
        };
        // Connected components over the actives.
        let mut component_of: BTreeMap<ElementId, usize> = BTreeMap::new();
        let mut components: Vec<Vec<ElementId>> = Vec::new();
        for &i in &actives {
            if component_of.contains_key(&i) {
                continue;
            }
            let id = components.len();
            let mut stack = vec![i];
            let mut comp = Vec::new();
            component_of.insert(i, id);
            while let Some(x) = stack.pop() {
                comp.push(x);
                for y in neighbors(x) {
                    if !component_of.contains_key(&y) {
                        component_of.insert(y, id);
                        stack.push(y);
                    }
                }
            }
            comp.sort();
            components.push(comp);
        }
        let Some(comp) = components.iter().find(|c| c.len() >= 2) else {
            return Err(RunError::InvariantViolation(
                "unsolved scope without an intersecting component".into(),
            ));
        };
        // The component must be a path: all degrees at most two, exactly two
        // endpoints.
        let mut endpoints = Vec::new();
        for &i in comp {
            let deg = neighbors(i).len();
            if deg > 2 {
                return Err(RunError::InvariantViolation(
                    "intersection component is not a path (degree above two)".into(),
                ));
            }
            if deg <= 1 {
                endpoints.push(i);
            }
        }
        if endpoints.len() != 2 {
            return Err(RunError::InvariantViolation(
                "intersection component is not a path (cycle found)".into(),
            ));
        }
        // Orient from the smaller-id endpoint and walk.
        let start = *endpoints.iter().min().unwrap();
        let mut path = vec![start];
        let mut prev = None;
        loop {
            let cur = *path.last().unwrap();
            let next = neighbors(cur).into_iter().find(|&n| Some(n) != prev);
            match next {
                Some(n) => {
                    prev = Some(cur);
                    path.push(n);
                }
                None => break,
            }
        }
        if path.len() != comp.len() {
            return Err(RunError::InvariantViolation(
                "intersection component is not a single path".into(),
            ));
        }
        // Interior path vertices never head a clique with members: their
        // predicted enforcements were consumed earlier.
        debug_assert!(path[1..path.len() - 1].iter().all(|x| {
            !run.s_set.iter().any(|&i| run.pi.get(&i) == Some(x))
        }));
        let p = path.len();
        let targets: Vec<ElementId> = if p % 2 == 1 {
            path.iter().copied().skip(1).step_by(2).collect()
        } else if run.cliques.get(&path[0]).map_or(0, BTreeSet::len) == 1 {
            path.iter().copied().step_by(2).collect()
        } else {
            path.iter().copied().skip(1).step_by(2).collect()
        };
        for t in targets {
            state.query(instance, oracle, t)?;
        }
        drain_values(instance, state, oracle, scope)?;
    }
    Ok(())
}

/// Dedicated sorting algorithm for disjoint sets. Queries the predicted
/// order-relevant elements up front, then resolves the leftover chains of
/// pairwise-intersecting intervals by querying alternate elements.
/// Guarantees at most `min(opt + k, 2 * opt)` queries for each of the three
/// error measures `k`.
pub fn run_sort_single(
    instance: &ProblemInstance,
    pred: &Prediction,
    oracle: &Oracle<'_>,
) -> Result<RunResult, RunError> {
    require_sorting(instance)?;
    let mut seen = vec![false; instance.n_elements()];
    for members in instance.sets() {
        for &i in members {
            if seen[i.idx()] {
                return Err(RunError::InvariantViolation(
                    "dedicated sorting algorithm requires pairwise disjoint sets".into(),
                ));
            }
            seen[i.idx()] = true;
        }
    }
    let mut state = QueryState::new(instance);
    for members in instance.sets() {
        run_scope(instance, &mut state, pred, oracle, members)?;
    }
    debug_assert!(is_solved(instance, &state));
    assemble_result(instance, oracle, pred, state, RunStats::default())
}

/// The sorting-side optimum; exposed for cross-checks against the reduction.
pub fn sorting_offline_optimum(
    instance: &ProblemInstance,
    real: &Realization,
) -> Result<Vec<ElementId>, RunError> {
    require_sorting(instance)?;
    Ok(offline_optimum(instance, real)?)
}
