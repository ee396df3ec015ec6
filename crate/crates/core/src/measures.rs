//! Prediction error measures: the number of wrong predictions, the hop
//! distance (interval boundaries passed between predicted and true values),
//! and the mandatory-query distance (symmetric difference of mandatory sets).

use crate::model::{ElementId, Prediction, ProblemInstance, ProblemKind, Realization};
use crate::scalar::Scalar;
use crate::verify::mandatory_set;
use std::collections::BTreeSet;

/// All three error measures of a prediction against the truth, plus the
/// per-element hop counts.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ErrorReport {
    /// Number of elements whose predicted value differs from the true one.
    pub k_num: usize,
    /// Total hop distance.
    pub k_hop: usize,
    /// Mandatory-query distance.
    pub k_mqd: usize,
    /// Per-element hop contributions summing to `k_hop`.
    pub hops: Vec<usize>,
}

/// The interaction set of an element: co-members of its sets for minimum and
/// sorting instances, and for spanning trees the edges sharing a biconnected
/// component (the edges that can exchange roles with it in some tree).
pub fn interaction_set(instance: &ProblemInstance, i: ElementId) -> Vec<ElementId> {
    match instance.kind() {
        ProblemKind::Minimum | ProblemKind::Sorting => {
            let mut out = BTreeSet::new();
            for &s in instance.sets_containing(i) {
                for &j in &instance.sets()[s] {
                    if j != i {
                        out.insert(j);
                    }
                }
            }
            out.into_iter().collect()
        }
        ProblemKind::Mst => {
            let mst = instance.as_mst().unwrap();
            let edges: Vec<(usize, usize)> =
                mst.edges().iter().map(|e| (e.u, e.v)).collect();
            for component in biconnected_components(mst.n_vertices(), &edges) {
                if component.contains(&i.idx()) {
                    return component
                        .into_iter()
                        .filter(|&e| e != i.idx())
                        .map(|e| ElementId(e as u32))
                        .collect();
                }
            }
            Vec::new()
        }
    }
}

// Biconnected components of a multigraph as lists of edge ids, sorted within
// and across components. Parallel edges form their own two-edge cycles, so
// they land in a shared component.
fn biconnected_components(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (eid, &(u, v)) in edges.iter().enumerate() {
        adj[u].push((eid, v));
        adj[v].push((eid, u));
    }
    struct Dfs<'a> {
        adj: &'a [Vec<(usize, usize)>],
        disc: Vec<usize>,
        low: Vec<usize>,
        timer: usize,
        stack: Vec<usize>,
        components: Vec<Vec<usize>>,
    }
    impl Dfs<'_> {
        fn run(&mut self, u: usize, parent_edge: Option<usize>) {
            self.timer += 1;
            self.disc[u] = self.timer;
            self.low[u] = self.timer;
            for idx in 0..self.adj[u].len() {
                let (eid, v) = self.adj[u][idx];
                if Some(eid) == parent_edge {
                    continue;
                }
                if self.disc[v] == 0 {
                    self.stack.push(eid);
                    self.run(v, Some(eid));
                    self.low[u] = self.low[u].min(self.low[v]);
                    if self.low[v] >= self.disc[u] {
                        // u separates the subtree: everything stacked since
                        // eid is one biconnected component.
                        let mut component = Vec::new();
                        while let Some(top) = self.stack.pop() {
                            component.push(top);
                            if top == eid {
                                break;
                            }
                        }
                        component.sort_unstable();
                        self.components.push(component);
                    }
                } else if self.disc[v] < self.disc[u] {
                    self.stack.push(eid);
                    self.low[u] = self.low[u].min(self.disc[v]);
                }
            }
        }
    }
    let mut dfs = Dfs {
        adj: &adj,
        disc: vec![0; n],
        low: vec![0; n],
        timer: 0,
        stack: Vec::new(),
        components: Vec::new(),
    };
    for u in 0..n {
        if dfs.disc[u] == 0 {
            dfs.run(u, None);
        }
    }
    debug_assert!(dfs.stack.is_empty());
    let mut components = dfs.components;
    components.sort();
    components
}

/// Number of elements predicted incorrectly.
pub fn count_errors(real: &Realization, pred: &Prediction) -> usize {
    real.values()
        .iter()
        .zip(pred.values())
        .filter(|(w, p)| w != p)
        .count()
}

// Hops between two values of element `i` relative to its interaction set:
// lower limits passed (one value at or left of the limit, the other right of
// it), upper limits passed symmetrically, and trivial values strictly
// jumped.
fn hops_between(
    instance: &ProblemInstance,
    neighbors: &[ElementId],
    a: Scalar,
    b: Scalar,
) -> usize {
    if a == b {
        return 0;
    }
    let (lo, hi) = (a.min(b), a.max(b));
    neighbors
        .iter()
        .map(|&j| match instance.interval(j) {
            crate::interval::UncertaintyInterval::Open { lower, upper } => {
                usize::from(lo <= lower && hi > lower) + usize::from(lo < upper && hi >= upper)
            }
            crate::interval::UncertaintyInterval::Trivial(v) => usize::from(lo < v && hi > v),
        })
        .sum()
}

/// Per-element hop counts between predicted and true values.
pub fn hop_counts(
    instance: &ProblemInstance,
    real: &Realization,
    pred: &Prediction,
) -> Vec<usize> {
    instance
        .element_ids()
        .map(|i| {
            let neighbors = interaction_set(instance, i);
            hops_between(instance, &neighbors, real.value(i), pred.value(i))
        })
        .collect()
}

/// Total hop distance between prediction and truth.
pub fn hop_distance(
    instance: &ProblemInstance,
    real: &Realization,
    pred: &Prediction,
) -> usize {
    hop_counts(instance, real, pred).iter().sum()
}

/// Hop count for a single element between two hypothetical values, used by
/// the learners.
pub fn element_hops(instance: &ProblemInstance, i: ElementId, a: Scalar, b: Scalar) -> usize {
    let neighbors = interaction_set(instance, i);
    hops_between(instance, &neighbors, a, b)
}

/// Size of the symmetric difference between the mandatory sets under the
/// prediction and under the truth.
pub fn mandatory_query_distance(
    instance: &ProblemInstance,
    real: &Realization,
    pred: &Prediction,
) -> usize {
    let under_real: BTreeSet<ElementId> = mandatory_set(instance, real).into_iter().collect();
    let under_pred: BTreeSet<ElementId> = mandatory_set(instance, &pred.as_realization(instance))
        .into_iter()
        .collect();
    under_real.symmetric_difference(&under_pred).count()
}

/// All three measures at once.
pub fn compute_errors(
    instance: &ProblemInstance,
    real: &Realization,
    pred: &Prediction,
) -> ErrorReport {
    let hops = hop_counts(instance, real, pred);
    ErrorReport {
        k_num: count_errors(real, pred),
        k_hop: hops.iter().sum(),
        k_mqd: mandatory_query_distance(instance, real, pred),
        hops,
    }
}
