//! Offline verification: solved checks, mandatory elements, dependency
//! graphs, and optimal query sets computed with full knowledge of the true
//! values.

use crate::interval::UncertaintyInterval;
use crate::model::{ElementId, MstInstance, ProblemInstance, ProblemKind, Realization};
use crate::scalar::Scalar;
use crate::state::{leftmost, Oracle, QueryState};
use crate::vc::{min_vertex_cover, VcError, VcInstance, VcKind};
use std::collections::BTreeSet;

#[derive(Debug, thiserror::Error)]
pub enum VerifyError {
    #[error(transparent)]
    Vc(#[from] VcError),
    #[error(transparent)]
    Query(#[from] crate::state::QueryError),
    #[error("{n} open elements exceed the brute-force cap of {cap}")]
    BruteForceTooLarge { n: usize, cap: usize },
    #[error("query plan failed to solve the instance")]
    NotSolved,
}

// ---------------------------------------------------------------------------
// Limit trees (shared with the spanning-tree solvers)

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub(crate) enum LimitSide {
    Lower,
    Upper,
}

/// Sort key realizing the fictitious perturbed weights that define limit
/// trees: the lower-limit tree uses `L + eps` for open intervals (so a
/// trivial value ties ahead of an open interval starting there), the
/// upper-limit tree uses `U - eps` (open ahead of trivial).
pub(crate) fn limit_key(interval: &UncertaintyInterval, side: LimitSide) -> (Scalar, u8) {
    match side {
        LimitSide::Lower => (interval.lower(), u8::from(interval.is_open())),
        LimitSide::Upper => (interval.upper(), u8::from(interval.is_trivial())),
    }
}

// Kruskal over a pre-sorted edge list; returns the selected edge ids in
// selection order. Self-loops are skipped, so this also serves contracted
// graphs.
pub(crate) fn kruskal_spanning(
    n_vertices: usize,
    sorted_edges: impl IntoIterator<Item = (usize, usize, usize)>,
) -> Vec<usize> {
    let mut parent: Vec<usize> = (0..n_vertices).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut chosen = Vec::new();
    for (eid, u, v) in sorted_edges {
        let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
        if ru != rv {
            parent[ru] = rv;
            chosen.push(eid);
        }
    }
    chosen
}

// Edge ids along the tree path between two vertices. Empty when the
// endpoints coincide.
pub(crate) fn path_edges(
    n_vertices: usize,
    tree: &[(usize, usize, usize)],
    from: usize,
    to: usize,
) -> Vec<usize> {
    if from == to {
        return Vec::new();
    }
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n_vertices];
    for &(eid, u, v) in tree {
        adj[u].push((v, eid));
        adj[v].push((u, eid));
    }
    // BFS with parent links.
    let mut prev: Vec<Option<(usize, usize)>> = vec![None; n_vertices];
    let mut visited = vec![false; n_vertices];
    visited[from] = true;
    let mut queue = std::collections::VecDeque::from([from]);
    while let Some(x) = queue.pop_front() {
        if x == to {
            break;
        }
        for &(y, eid) in &adj[x] {
            if !visited[y] {
                visited[y] = true;
                prev[y] = Some((x, eid));
                queue.push_back(y);
            }
        }
    }
    let mut path = Vec::new();
    let mut cur = to;
    while cur != from {
        let (p, eid) = prev[cur].expect("tree connects its vertices");
        path.push(eid);
        cur = p;
    }
    path
}

// The lower- or upper-limit tree of an MST instance under the current
// knowledge, as a per-edge membership mask.
fn limit_tree_membership(
    mst: &MstInstance,
    state: &QueryState,
    instance: &ProblemInstance,
    side: LimitSide,
) -> Vec<bool> {
    let mut order: Vec<usize> = (0..mst.edges().len()).collect();
    let keys: Vec<(Scalar, u8)> = (0..mst.edges().len())
        .map(|e| limit_key(&state.effective(instance, ElementId(e as u32)), side))
        .collect();
    order.sort_by(|&a, &b| keys[a].cmp(&keys[b]).then(a.cmp(&b)));
    let chosen = kruskal_spanning(
        mst.n_vertices(),
        order.iter().map(|&e| (e, mst.edges()[e].u, mst.edges()[e].v)),
    );
    let mut member = vec![false; mst.edges().len()];
    for e in chosen {
        member[e] = true;
    }
    member
}

pub(crate) fn lower_limit_tree(
    instance: &ProblemInstance,
    state: &QueryState,
) -> Vec<bool> {
    let mst = instance.as_mst().expect("limit trees require an MST instance");
    limit_tree_membership(mst, state, instance, LimitSide::Lower)
}

pub(crate) fn upper_limit_tree(
    instance: &ProblemInstance,
    state: &QueryState,
) -> Vec<bool> {
    let mst = instance.as_mst().expect("limit trees require an MST instance");
    limit_tree_membership(mst, state, instance, LimitSide::Upper)
}

// ---------------------------------------------------------------------------
// Solved checks

// A minimum set is solved when some member's effective upper limit is at most
// every other member's effective lower limit.
pub(crate) fn minimum_set_solved(
    instance: &ProblemInstance,
    state: &QueryState,
    members: &[ElementId],
) -> bool {
    if members.len() <= 1 {
        return true;
    }
    // Two smallest lower limits, with multiplicity, let us evaluate
    // min over the other members in one pass.
    let lowers: Vec<Scalar> = members
        .iter()
        .map(|&j| state.effective(instance, j).lower())
        .collect();
    let mut min1 = lowers[0].min(lowers[1]);
    let mut min2 = lowers[0].max(lowers[1]);
    for &l in &lowers[2..] {
        if l < min1 {
            min2 = min1;
            min1 = l;
        } else if l < min2 {
            min2 = l;
        }
    }
    members.iter().zip(&lowers).any(|(&i, &l)| {
        let min_other = if l == min1 && lowers.iter().filter(|&&x| x == min1).count() == 1 {
            min2
        } else {
            min1
        };
        state.effective(instance, i).upper() <= min_other
    })
}

// A sorting set is solved when every pair of members is comparable, i.e. in
// the order sorted by (lower, upper) each effective interval ends before the
// next begins.
fn sorting_set_solved(
    instance: &ProblemInstance,
    state: &QueryState,
    members: &[ElementId],
) -> bool {
    let mut sorted: Vec<ElementId> = members.to_vec();
    sorted.sort_by_key(|&i| {
        let eff = state.effective(instance, i);
        (eff.lower(), eff.upper(), i)
    });
    sorted.windows(2).all(|w| {
        state.effective(instance, w[0]).upper() <= state.effective(instance, w[1]).lower()
    })
}

fn mst_solved(instance: &ProblemInstance, state: &QueryState) -> bool {
    let mst = instance.as_mst().unwrap();
    let member = lower_limit_tree(instance, state);
    let tree: Vec<(usize, usize, usize)> = (0..mst.edges().len())
        .filter(|&e| member[e])
        .map(|e| (e, mst.edges()[e].u, mst.edges()[e].v))
        .collect();
    for f in 0..mst.edges().len() {
        if member[f] {
            continue;
        }
        let f_lower = state.effective(instance, ElementId(f as u32)).lower();
        let cycle = path_edges(mst.n_vertices(), &tree, mst.edges()[f].u, mst.edges()[f].v);
        for e in cycle {
            if !(state.effective(instance, ElementId(e as u32)).upper() <= f_lower) {
                return false;
            }
        }
    }
    true
}

/// Whether current knowledge already determines the answer: a provable
/// minimum in every set, a total order within every set, or a provable
/// minimum spanning tree.
pub fn is_solved(instance: &ProblemInstance, state: &QueryState) -> bool {
    match instance.kind() {
        ProblemKind::Minimum => instance
            .sets()
            .iter()
            .all(|members| minimum_set_solved(instance, state, members)),
        ProblemKind::Sorting => instance
            .sets()
            .iter()
            .all(|members| sorting_set_solved(instance, state, members)),
        ProblemKind::Mst => mst_solved(instance, state),
    }
}

// ---------------------------------------------------------------------------
// Mandatory elements

/// Generic mandatory test: an active element is mandatory when revealing
/// every other active element at its given value still leaves the instance
/// unsolved. This is the definitional reference; `is_mandatory_at` is the
/// structural fast path and must agree with it.
pub fn is_mandatory_generic_at(
    instance: &ProblemInstance,
    state: &QueryState,
    values: &[Scalar],
    i: ElementId,
) -> bool {
    if !state.is_active(instance, i) {
        return false;
    }
    let mut hyp = state.clone();
    let others: Vec<ElementId> = instance
        .element_ids()
        .filter(|&j| j != i && state.is_active(instance, j))
        .collect();
    hyp.reveal_hypothetically(values, others);
    !is_solved(instance, &hyp)
}

/// Structural mandatory test under the given values for all elements
/// (revealed elements must be listed at their revealed value).
///
/// For minimum sets, an active element is mandatory exactly when, in some of
/// its sets, it is a true minimum and its interval contains another member's
/// value, or it is not a true minimum and its interval contains the true
/// minimum value. For sorting, exactly when some co-member's value lies
/// strictly inside its interval. Spanning trees use the generic test.
pub fn is_mandatory_at(
    instance: &ProblemInstance,
    state: &QueryState,
    values: &[Scalar],
    i: ElementId,
) -> bool {
    if !state.is_active(instance, i) {
        return false;
    }
    let eff_i = state.effective(instance, i);
    match instance.kind() {
        ProblemKind::Minimum => instance.sets_containing(i).iter().any(|&s| {
            let members = &instance.sets()[s];
            let min_val = members
                .iter()
                .map(|&j| values[j.idx()])
                .min()
                .expect("sets are non-empty");
            if values[i.idx()] == min_val {
                members
                    .iter()
                    .any(|&j| j != i && eff_i.strictly_contains(values[j.idx()]))
            } else {
                eff_i.strictly_contains(min_val)
            }
        }),
        ProblemKind::Sorting => instance.sets_containing(i).iter().any(|&s| {
            instance.sets()[s]
                .iter()
                .any(|&j| j != i && eff_i.strictly_contains(values[j.idx()]))
        }),
        ProblemKind::Mst => is_mandatory_generic_at(instance, state, values, i),
    }
}

/// All mandatory elements of the fresh instance under the given realization:
/// the set that any feasible query sequence must contain.
pub fn mandatory_set(instance: &ProblemInstance, real: &Realization) -> Vec<ElementId> {
    let state = QueryState::new(instance);
    instance
        .element_ids()
        .filter(|&i| is_mandatory_at(instance, &state, real.values(), i))
        .collect()
}

// ---------------------------------------------------------------------------
// Known mandatory elements (no value knowledge needed)

/// Elements that every feasible continuation must query, detectable from the
/// current knowledge alone: in an unsolved minimum set, a leftmost element
/// whose interval encloses a co-member's effective interval or revealed
/// value; in sorting, any element enclosing a co-member; for spanning trees,
/// the open edges of the lower-limit tree missing from the upper-limit tree.
pub fn known_mandatory(instance: &ProblemInstance, state: &QueryState) -> Vec<ElementId> {
    let mut found = BTreeSet::new();
    match instance.kind() {
        ProblemKind::Minimum => {
            for members in instance.sets() {
                if minimum_set_solved(instance, state, members) {
                    continue;
                }
                let min_lower = members
                    .iter()
                    .map(|&j| state.effective(instance, j).lower())
                    .min()
                    .unwrap();
                for &i in members {
                    if !state.is_active(instance, i) {
                        continue;
                    }
                    let eff_i = state.effective(instance, i);
                    if eff_i.lower() != min_lower {
                        continue;
                    }
                    if members
                        .iter()
                        .any(|&j| j != i && eff_i.encloses(&state.effective(instance, j)))
                    {
                        found.insert(i);
                    }
                }
            }
        }
        ProblemKind::Sorting => {
            for members in instance.sets() {
                for &i in members {
                    if !state.is_active(instance, i) {
                        continue;
                    }
                    let eff_i = state.effective(instance, i);
                    if members
                        .iter()
                        .any(|&j| j != i && eff_i.encloses(&state.effective(instance, j)))
                    {
                        found.insert(i);
                    }
                }
            }
        }
        ProblemKind::Mst => {
            let lower = lower_limit_tree(instance, state);
            let upper = upper_limit_tree(instance, state);
            for i in instance.element_ids() {
                if lower[i.idx()] && !upper[i.idx()] && state.is_active(instance, i) {
                    found.insert(i);
                }
            }
        }
    }
    found.into_iter().collect()
}

/// Queries known mandatory elements one at a time (smallest id first,
/// recomputing after each reveal) until none remain. Returns the elements
/// queried.
pub fn drain_known_mandatory(
    instance: &ProblemInstance,
    state: &mut QueryState,
    oracle: &Oracle<'_>,
) -> Result<Vec<ElementId>, VerifyError> {
    let mut queried = Vec::new();
    loop {
        let next = known_mandatory(instance, state);
        let Some(&i) = next.first() else {
            return Ok(queried);
        };
        state.query(instance, oracle, i)?;
        queried.push(i);
    }
}

// ---------------------------------------------------------------------------
// Dependency graph

/// Builds the dependency graph of the current state: the graph whose minimum
/// vertex cover, after all known mandatory queries, is an optimal query set.
///
/// Minimum: per unsolved set, edges between the leftmost element and every
/// other active member intersecting it. Sorting: edges between intersecting
/// active co-members; with pairwise disjoint sets this is an interval graph
/// ordered by upper limits. Spanning tree: the bipartite graph between
/// active non-tree edges and the active edges of their lower-limit-tree
/// cycles that intersect them.
pub fn dependency_graph(
    instance: &ProblemInstance,
    state: &QueryState,
) -> Result<VcInstance, VerifyError> {
    let mut edge_set: BTreeSet<(ElementId, ElementId)> = BTreeSet::new();
    let mut ordered_pair = |a: ElementId, b: ElementId| {
        edge_set.insert((a.min(b), a.max(b)));
    };
    let mut mst_left: BTreeSet<ElementId> = BTreeSet::new();
    match instance.kind() {
        ProblemKind::Minimum => {
            for members in instance.sets() {
                if minimum_set_solved(instance, state, members) {
                    continue;
                }
                let l = leftmost(instance, state, members);
                if !state.is_active(instance, l) {
                    continue;
                }
                let eff_l = state.effective(instance, l);
                for &j in members {
                    if j != l
                        && state.is_active(instance, j)
                        && eff_l.intersects(&state.effective(instance, j))
                    {
                        ordered_pair(l, j);
                    }
                }
            }
        }
        ProblemKind::Sorting => {
            for members in instance.sets() {
                for (a, &i) in members.iter().enumerate() {
                    if !state.is_active(instance, i) {
                        continue;
                    }
                    let eff_i = state.effective(instance, i);
                    for &j in &members[a + 1..] {
                        if state.is_active(instance, j)
                            && eff_i.intersects(&state.effective(instance, j))
                        {
                            ordered_pair(i, j);
                        }
                    }
                }
            }
        }
        ProblemKind::Mst => {
            let mst = instance.as_mst().unwrap();
            let member = lower_limit_tree(instance, state);
            let tree: Vec<(usize, usize, usize)> = (0..mst.edges().len())
                .filter(|&e| member[e])
                .map(|e| (e, mst.edges()[e].u, mst.edges()[e].v))
                .collect();
            for f in 0..mst.edges().len() {
                let fid = ElementId(f as u32);
                if member[f] || !state.is_active(instance, fid) {
                    continue;
                }
                let eff_f = state.effective(instance, fid);
                let cycle =
                    path_edges(mst.n_vertices(), &tree, mst.edges()[f].u, mst.edges()[f].v);
                for e in cycle {
                    let eid = ElementId(e as u32);
                    if state.is_active(instance, eid)
                        && eff_f.intersects(&state.effective(instance, eid))
                    {
                        ordered_pair(fid, eid);
                        mst_left.insert(fid);
                    }
                }
            }
        }
    }

    let mut labels: Vec<ElementId> = edge_set
        .iter()
        .flat_map(|&(a, b)| [a, b])
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    labels.sort();
    let local = |id: ElementId| labels.binary_search(&id).unwrap();
    let edges: Vec<(usize, usize)> = edge_set
        .iter()
        .map(|&(a, b)| (local(a), local(b)))
        .collect();
    let kind = match instance.kind() {
        ProblemKind::Minimum => VcKind::General,
        ProblemKind::Sorting => {
            let mut seen = vec![false; instance.n_elements()];
            let disjoint = instance.sets().iter().all(|members| {
                members.iter().all(|&i| {
                    let fresh = !seen[i.idx()];
                    seen[i.idx()] = true;
                    fresh
                })
            });
            if disjoint {
                let mut order: Vec<usize> = (0..labels.len()).collect();
                order.sort_by_key(|&v| {
                    let eff = state.effective(instance, labels[v]);
                    (eff.upper(), labels[v])
                });
                VcKind::IntervalOrder { order }
            } else {
                VcKind::General
            }
        }
        ProblemKind::Mst => {
            let left = labels.iter().map(|id| mst_left.contains(id)).collect();
            VcKind::Bipartite { left }
        }
    };
    Ok(VcInstance::new(labels, &edges, kind)?)
}

// ---------------------------------------------------------------------------
// Offline optimum and brute force

/// Computes an optimal feasible query set for the known realization: queries
/// mandatory elements to exhaustion, then a minimum vertex cover of the
/// dependency graph, then any known mandatory elements the cover exposed.
/// Returns the query order.
pub fn offline_optimum(
    instance: &ProblemInstance,
    real: &Realization,
) -> Result<Vec<ElementId>, VerifyError> {
    let oracle = Oracle::new(real);
    let mut state = QueryState::new(instance);
    loop {
        let mandatory: Vec<ElementId> = instance
            .element_ids()
            .filter(|&i| is_mandatory_at(instance, &state, real.values(), i))
            .collect();
        if mandatory.is_empty() {
            break;
        }
        for i in mandatory {
            state.query(instance, &oracle, i)?;
        }
    }
    let dep = dependency_graph(instance, &state)?;
    let cover = dep.cover_elements(&min_vertex_cover(&dep)?);
    for i in cover {
        state.query(instance, &oracle, i)?;
    }
    drain_known_mandatory(instance, &mut state, &oracle)?;
    if !is_solved(instance, &state) {
        return Err(VerifyError::NotSolved);
    }
    Ok(state.transcript().to_vec())
}

/// Smallest feasible query set by exhaustive search over subsets of active
/// elements in increasing size. Errs when more than `cap` elements are open.
pub fn brute_force_optimum(
    instance: &ProblemInstance,
    real: &Realization,
    cap: usize,
) -> Result<Vec<ElementId>, VerifyError> {
    let state = QueryState::new(instance);
    let candidates: Vec<ElementId> = instance
        .element_ids()
        .filter(|&i| state.is_active(instance, i))
        .collect();
    let k = candidates.len();
    if k > cap {
        return Err(VerifyError::BruteForceTooLarge { n: k, cap });
    }
    for size in 0..=k {
        for mask in 0u32..1u32 << k {
            if mask.count_ones() as usize != size {
                continue;
            }
            let subset: Vec<ElementId> = (0..k)
                .filter(|&b| mask >> b & 1 == 1)
                .map(|b| candidates[b])
                .collect();
            let mut hyp = state.clone();
            hyp.reveal_hypothetically(real.values(), subset.iter().copied());
            if is_solved(instance, &hyp) {
                return Ok(subset);
            }
        }
    }
    Err(VerifyError::NotSolved)
}
