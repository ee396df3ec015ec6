//! Minimum spanning tree under uncertainty: limit trees, the uniqueness
//! preprocessing, the two-phase prediction-guided algorithm with recovery
//! strategies, and the classical cycle-resolving baseline.

use crate::interval::UncertaintyInterval;
use crate::model::{ElementId, MstInstance, Prediction, ProblemInstance, ProblemKind};
use crate::run::{assemble_result, effective_predictions, IterationTrace, RunError, RunResult, RunStats};
use crate::scalar::Scalar;
use crate::state::{Oracle, QueryState};
use crate::vc::{koenig_cover, max_bipartite_matching};
use crate::verify::{
    is_solved, kruskal_spanning, limit_key, lower_limit_tree, path_edges, upper_limit_tree,
    LimitSide, VerifyError,
};
use std::collections::{BTreeMap, BTreeSet};

/// Phase-two restart policy: A re-queries the charge set on every cover
/// change and is 2-robust; B keeps the surviving matching and trades a
/// higher robustness constant for hop-distance error sensitivity.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Recovery {
    A,
    B,
}

fn require_mst(instance: &ProblemInstance) -> Result<&MstInstance, RunError> {
    match instance.kind() {
        ProblemKind::Mst => Ok(instance.as_mst().unwrap()),
        _ => Err(RunError::KindMismatch { expected: "spanning tree" }),
    }
}

fn require_gamma(gamma: u32) -> Result<(), RunError> {
    if gamma >= 2 {
        Ok(())
    } else {
        Err(RunError::BadGamma(gamma))
    }
}

/// The lower and upper limit trees of the full graph under current
/// knowledge, as sorted edge-id lists.
pub fn limit_trees(
    instance: &ProblemInstance,
    state: &QueryState,
) -> Result<(Vec<ElementId>, Vec<ElementId>), RunError> {
    require_mst(instance)?;
    let collect = |member: Vec<bool>| {
        member
            .iter()
            .enumerate()
            .filter(|&(_, &m)| m)
            .map(|(e, _)| ElementId(e as u32))
            .collect()
    };
    Ok((
        collect(lower_limit_tree(instance, state)),
        collect(upper_limit_tree(instance, state)),
    ))
}

// ---------------------------------------------------------------------------
// Working graph: deletions and contractions

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum EdgeStatus {
    Alive,
    Deleted,
    Contracted,
}

// The algorithm's rewritten view of the graph. Deleted edges are certainly
// in no minimum spanning tree, contracted edges certainly in one; neither
// kind is ever queried afterwards.
struct MstWork {
    parent: Vec<usize>,
    status: Vec<EdgeStatus>,
}

impl MstWork {
    fn new(mst: &MstInstance) -> Self {
        MstWork {
            parent: (0..mst.n_vertices()).collect(),
            status: vec![EdgeStatus::Alive; mst.edges().len()],
        }
    }

    fn root(&self, mut v: usize) -> usize {
        while self.parent[v] != v {
            v = self.parent[v];
        }
        v
    }

    fn is_alive(&self, e: usize) -> bool {
        self.status[e] == EdgeStatus::Alive
    }

    fn alive(&self) -> Vec<usize> {
        (0..self.status.len()).filter(|&e| self.is_alive(e)).collect()
    }

    fn delete(&mut self, e: usize) {
        if self.status[e] == EdgeStatus::Alive {
            self.status[e] = EdgeStatus::Deleted;
        }
    }

    // Commits edge `e` to the spanning tree: merges its endpoints and drops
    // every edge that the merge turns into a self-loop.
    fn contract(&mut self, mst: &MstInstance, e: usize) {
        debug_assert!(self.is_alive(e));
        let (ru, rv) = (self.root(mst.edges()[e].u), self.root(mst.edges()[e].v));
        debug_assert_ne!(ru, rv, "contracting a self-loop");
        self.parent[ru] = rv;
        self.status[e] = EdgeStatus::Contracted;
        for f in 0..self.status.len() {
            if self.is_alive(f) {
                let edge = mst.edges()[f];
                if self.root(edge.u) == self.root(edge.v) {
                    self.delete(f);
                }
            }
        }
    }

    // Maps every vertex to a dense index of its contraction class.
    fn classes(&self, mst: &MstInstance) -> (Vec<usize>, usize) {
        let mut index: BTreeMap<usize, usize> = BTreeMap::new();
        let mut of = Vec::with_capacity(mst.n_vertices());
        for v in 0..mst.n_vertices() {
            let r = self.root(v);
            let next = index.len();
            of.push(*index.entry(r).or_insert(next));
        }
        let count = index.len();
        (of, count)
    }
}

// Effective intervals of all edges, indexed by edge id.
fn snapshot_effs(instance: &ProblemInstance, state: &QueryState) -> Vec<UncertaintyInterval> {
    (0..instance.n_elements())
        .map(|e| state.effective(instance, ElementId(e as u32)))
        .collect()
}

// The limit tree of the working graph under the given effective intervals,
// as a set of edge ids.
fn work_tree(
    mst: &MstInstance,
    work: &MstWork,
    effs: &[UncertaintyInterval],
    side: LimitSide,
) -> BTreeSet<usize> {
    let (of, count) = work.classes(mst);
    let mut order: Vec<usize> = work.alive();
    order.sort_by_key(|&e| (limit_key(&effs[e], side), e));
    kruskal_spanning(
        count,
        order.iter().map(|&e| (e, of[mst.edges()[e].u], of[mst.edges()[e].v])),
    )
    .into_iter()
    .collect()
}

// Tree edges with class endpoints, for path and cut computations.
fn tree_list(
    mst: &MstInstance,
    of: &[usize],
    tree: &BTreeSet<usize>,
) -> Vec<(usize, usize, usize)> {
    tree.iter().map(|&e| (e, of[mst.edges()[e].u], of[mst.edges()[e].v])).collect()
}

// Sorted tree-edge ids on the cycle closed by non-tree edge `f`.
fn cycle_edges(
    mst: &MstInstance,
    of: &[usize],
    count: usize,
    list: &[(usize, usize, usize)],
    f: usize,
) -> Vec<usize> {
    let mut cyc = path_edges(count, list, of[mst.edges()[f].u], of[mst.edges()[f].v]);
    cyc.sort_unstable();
    cyc
}

// Sorted alive edge ids crossing the cut that tree edge `l` closes,
// including `l` itself.
fn cut_edges(
    mst: &MstInstance,
    work: &MstWork,
    of: &[usize],
    count: usize,
    list: &[(usize, usize, usize)],
    l: usize,
) -> Vec<usize> {
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); count];
    for &(e, u, v) in list {
        if e != l {
            adj[u].push(v);
            adj[v].push(u);
        }
    }
    // Two-color the classes from one endpoint of l over the remaining tree.
    let mut side = vec![false; count];
    let mut stack = vec![of[mst.edges()[l].u]];
    let mut seen = vec![false; count];
    seen[stack[0]] = true;
    while let Some(x) = stack.pop() {
        side[x] = true;
        for &y in &adj[x] {
            if !seen[y] {
                seen[y] = true;
                stack.push(y);
            }
        }
    }
    work.alive()
        .into_iter()
        .filter(|&e| side[of[mst.edges()[e].u]] != side[of[mst.edges()[e].v]])
        .collect()
}

// Solvedness of the working graph: the lower limit tree must be certified,
// with every alive non-tree edge at least as heavy as its whole cycle.
fn work_solved(mst: &MstInstance, work: &MstWork, effs: &[UncertaintyInterval]) -> bool {
    let (of, count) = work.classes(mst);
    let tree = work_tree(mst, work, effs, LimitSide::Lower);
    let list = tree_list(mst, &of, &tree);
    work.alive().into_iter().filter(|e| !tree.contains(e)).all(|f| {
        cycle_edges(mst, &of, count, &list, f)
            .into_iter()
            .all(|e| effs[e].upper() <= effs[f].lower())
    })
}

// Generic prediction-mandatory test on the working graph: would revealing
// every other open edge at its effective prediction leave `i` unresolved?
fn work_pred_mandatory(
    mst: &MstInstance,
    work: &MstWork,
    effs: &[UncertaintyInterval],
    pe: &[Scalar],
    i: usize,
) -> bool {
    let mut hyp = effs.to_vec();
    for e in work.alive() {
        if e != i && hyp[e].is_open() {
            hyp[e] = UncertaintyInterval::trivial(pe[e]);
        }
    }
    !work_solved(mst, work, &hyp)
}

// Non-tree edges of the working graph ordered by (lower limit, id), with the
// cycle machinery they index.
struct CycleIndex {
    of: Vec<usize>,
    count: usize,
    tree: BTreeSet<usize>,
    list: Vec<(usize, usize, usize)>,
    fs: Vec<usize>,
}

fn cycle_index(mst: &MstInstance, work: &MstWork, effs: &[UncertaintyInterval]) -> CycleIndex {
    let (of, count) = work.classes(mst);
    let tree = work_tree(mst, work, effs, LimitSide::Lower);
    let list = tree_list(mst, &of, &tree);
    let mut fs: Vec<usize> = work.alive().into_iter().filter(|e| !tree.contains(e)).collect();
    fs.sort_by_key(|&f| (effs[f].lower(), f));
    CycleIndex { of, count, tree, list, fs }
}

impl CycleIndex {
    fn cycle(&self, mst: &MstInstance, f: usize) -> Vec<usize> {
        cycle_edges(mst, &self.of, self.count, &self.list, f)
    }
}

// A cycle is prediction mandatory free when its non-tree edge is predicted
// maximal: the prediction of f clears every cycle upper limit and every
// cycle prediction stays below the lower limit of f.
fn cycle_pred_free(effs: &[UncertaintyInterval], pe: &[Scalar], f: usize, cyc: &[usize]) -> bool {
    cyc.iter().all(|&e| pe[f] >= effs[e].upper() && pe[e] <= effs[f].lower())
}

// Instance-level prediction-mandatory-freeness per the cycle rule.
fn work_pred_free(
    mst: &MstInstance,
    work: &MstWork,
    effs: &[UncertaintyInterval],
    pe: &[Scalar],
) -> bool {
    let index = cycle_index(mst, work, effs);
    index.fs.iter().all(|&f| cycle_pred_free(effs, pe, f, &index.cycle(mst, f)))
}

// ---------------------------------------------------------------------------
// Uniqueness preprocessing

// Restores the state in which the lower and upper limit trees of the working
// graph are equal and unique: drains the mandatory tree-difference edges,
// deletes or contracts effectively trivial edges, and queries away limit
// ties between tree and non-tree edges.
fn preprocess_unique(
    instance: &ProblemInstance,
    mst: &MstInstance,
    work: &mut MstWork,
    state: &mut QueryState,
    oracle: &Oracle<'_>,
) -> Result<Vec<ElementId>, RunError> {
    let mut queried = Vec::new();
    loop {
        let effs = snapshot_effs(instance, state);
        let t_l = work_tree(mst, work, &effs, LimitSide::Lower);
        let t_u = work_tree(mst, work, &effs, LimitSide::Upper);
        // Mandatory drain: tree-difference edges, smallest id first. The
        // comparator tags keep trivial edges out of the difference.
        if let Some(&e) = t_l.difference(&t_u).next() {
            let id = ElementId(e as u32);
            state.query(instance, oracle, id)?;
            queried.push(id);
            continue;
        }
        // Trivial cleanup: a trivial tree edge is certainly in a minimum
        // spanning tree, a trivial non-tree edge certainly in none.
        let trivial: Vec<usize> =
            work.alive().into_iter().filter(|&e| effs[e].is_trivial()).collect();
        if !trivial.is_empty() {
            for e in trivial {
                if !work.is_alive(e) {
                    continue;
                }
                if t_l.contains(&e) {
                    work.contract(mst, e);
                } else {
                    work.delete(e);
                }
            }
            continue;
        }
        // Upper-limit ties between a non-tree edge and its cycle: swapping
        // the tied pair would change the upper tree, so the tree edge is
        // mandatory.
        let (of, count) = work.classes(mst);
        let list = tree_list(mst, &of, &t_u);
        let mut tie = None;
        'usweep: for f in work.alive() {
            if t_u.contains(&f) {
                continue;
            }
            for e in cycle_edges(mst, &of, count, &list, f) {
                if effs[f].upper() == effs[e].upper() {
                    tie = Some(e);
                    break 'usweep;
                }
            }
        }
        if let Some(e) = tie {
            let id = ElementId(e as u32);
            state.query(instance, oracle, id)?;
            queried.push(id);
            continue;
        }
        // Lower-limit ties between a tree edge and its cut, dually.
        let mut tie = None;
        'lsweep: for &l in &t_l {
            for f in cut_edges(mst, work, &of, count, &list, l) {
                if f != l && effs[f].lower() == effs[l].lower() {
                    tie = Some(f);
                    break 'lsweep;
                }
            }
        }
        if let Some(f) = tie {
            let id = ElementId(f as u32);
            state.query(instance, oracle, id)?;
            queried.push(id);
            continue;
        }
        return Ok(queried);
    }
}

/// Outcome of running the uniqueness preprocessing alone from a fresh state.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Preprocessed {
    /// Edges queried, in order; each is mandatory.
    pub transcript: Vec<ElementId>,
    /// Edges decided to be in no minimum spanning tree.
    pub deleted: Vec<ElementId>,
    /// Edges decided to be in one, merged into their endpoints.
    pub contracted: Vec<ElementId>,
}

/// Runs only the uniqueness preprocessing against the oracle.
pub fn preprocess(
    instance: &ProblemInstance,
    oracle: &Oracle<'_>,
) -> Result<Preprocessed, RunError> {
    let mst = require_mst(instance)?;
    let mut work = MstWork::new(mst);
    let mut state = QueryState::new(instance);
    let transcript = preprocess_unique(instance, mst, &mut work, &mut state, oracle)?;
    let by_status = |wanted: EdgeStatus| {
        work.status
            .iter()
            .enumerate()
            .filter(|&(_, &s)| s == wanted)
            .map(|(e, _)| ElementId(e as u32))
            .collect()
    };
    Ok(Preprocessed {
        transcript,
        deleted: by_status(EdgeStatus::Deleted),
        contracted: by_status(EdgeStatus::Contracted),
    })
}

// ---------------------------------------------------------------------------
// Phase 1: eliminating prediction-mandatory cycles

struct MstRun<'a> {
    instance: &'a ProblemInstance,
    mst: &'a MstInstance,
    oracle: &'a Oracle<'a>,
    pred: &'a Prediction,
    work: MstWork,
    state: QueryState,
    stats: RunStats,
}

impl MstRun<'_> {
    fn query(&mut self, e: usize) -> Result<Scalar, RunError> {
        debug_assert!(self.work.is_alive(e));
        Ok(self.state.query(self.instance, self.oracle, ElementId(e as u32))?)
    }

    fn drain(&mut self) -> Result<usize, RunError> {
        let queried =
            preprocess_unique(self.instance, self.mst, &mut self.work, &mut self.state, self.oracle)?;
        Ok(queried.len())
    }

    fn effs(&self) -> Vec<UncertaintyInterval> {
        snapshot_effs(self.instance, &self.state)
    }

    fn preds(&self) -> Vec<Scalar> {
        effective_predictions(self.instance, &self.state, self.pred)
    }

    fn active(&self, e: usize) -> bool {
        self.work.is_alive(e) && self.state.is_active(self.instance, ElementId(e as u32))
    }
}

// One application of the case rules to the first prediction-mandatory cycle.
// Returns the number of queries spent.
fn phase1_case(run: &mut MstRun<'_>, index: &CycleIndex, f_i: usize) -> Result<usize, RunError> {
    let effs = run.effs();
    let pe = run.preds();
    let cyc = index.cycle(run.mst, f_i);
    // The cycle edge with the highest upper limit, smallest id on ties.
    let l_i = *cyc
        .iter()
        .max_by_key(|&&e| (effs[e].upper(), std::cmp::Reverse(e)))
        .expect("a cycle has tree edges");
    let mut spent = 0;
    if effs[l_i].strictly_contains(pe[f_i]) {
        if effs[f_i].strictly_contains(pe[l_i]) {
            // Both predictions cross: the pair is a witness set.
            run.query(f_i)?;
            run.query(l_i)?;
            spent += 2;
        } else {
            // Only the non-tree prediction crosses. The backup is the
            // highest-upper cycle edge still intersecting f_i.
            let lp = cyc
                .iter()
                .copied()
                .filter(|&e| e != l_i && effs[e].intersects(&effs[f_i]))
                .max_by_key(|&e| (effs[e].upper(), std::cmp::Reverse(e)));
            match lp {
                None => {
                    let w_l = run.query(l_i)?;
                    spent += 1;
                    if effs[f_i].strictly_contains(w_l) {
                        run.query(f_i)?;
                        spent += 1;
                    } else {
                        // f_i is now certainly maximal on its cycle.
                        run.work.delete(f_i);
                    }
                }
                Some(lp) => {
                    // Snapshot the intervals of every non-tree edge whose
                    // cycle carries l_i before the queries collapse them.
                    let watchers: Vec<UncertaintyInterval> = index
                        .fs
                        .iter()
                        .copied()
                        .filter(|&fj| index.cycle(run.mst, fj).contains(&l_i))
                        .map(|fj| effs[fj])
                        .collect();
                    let w_f = run.query(f_i)?;
                    let w_l = run.query(l_i)?;
                    spent += 2;
                    if effs[l_i].strictly_contains(w_f)
                        && watchers.iter().all(|ifj| !ifj.strictly_contains(w_l))
                    {
                        run.query(lp)?;
                        spent += 1;
                    }
                }
            }
        }
    } else {
        // A tree prediction crosses into f_i instead; take the smallest
        // such edge.
        let Some(lp) = cyc.iter().copied().find(|&e| effs[f_i].strictly_contains(pe[e])) else {
            return Err(RunError::InvariantViolation(
                "prediction-mandatory cycle without a crossing prediction".into(),
            ));
        };
        // The backup is the lowest-lower cut edge still intersecting lp.
        let cut = cut_edges(run.mst, &run.work, &index.of, index.count, &index.list, lp);
        let fj = cut
            .iter()
            .copied()
            .filter(|&f| f != lp && f != f_i && effs[f].intersects(&effs[lp]))
            .min_by_key(|&f| (effs[f].lower(), f));
        match fj {
            None => {
                let w_f = run.query(f_i)?;
                spent += 1;
                if effs[lp].strictly_contains(w_f) {
                    run.query(lp)?;
                    spent += 1;
                } else {
                    // lp is now certainly minimal in its cut.
                    run.work.contract(run.mst, lp);
                }
            }
            Some(fj) => {
                let w_f = run.query(f_i)?;
                let w_lp = run.query(lp)?;
                spent += 2;
                if effs[f_i].strictly_contains(w_lp)
                    && cyc.iter().all(|&e| !effs[e].strictly_contains(w_f))
                {
                    run.query(fj)?;
                    spent += 1;
                }
            }
        }
    }
    Ok(spent)
}

fn phase1(run: &mut MstRun<'_>, gamma: u32) -> Result<(), RunError> {
    let budget = gamma as usize - 2;
    'outer: loop {
        let mut trace = IterationTrace::default();
        // Query up to the budget of prediction-mandatory edges, smallest id
        // first, re-testing after every reveal.
        while trace.budget_queries < budget {
            let effs = run.effs();
            let pe = run.preds();
            if work_pred_free(run.mst, &run.work, &effs, &pe) {
                break;
            }
            let next = run
                .work
                .alive()
                .into_iter()
                .find(|&e| run.active(e) && work_pred_mandatory(run.mst, &run.work, &effs, &pe, e));
            let Some(e) = next else { break };
            run.query(e)?;
            trace.budget_queries += 1;
            trace.drain_queries += run.drain()?;
        }
        // Scan the cycles in lower-limit order for a prediction-mandatory
        // one and apply the matching case rule.
        let effs = run.effs();
        let pe = run.preds();
        let index = cycle_index(run.mst, &run.work, &effs);
        for &f_i in &index.fs {
            if !cycle_pred_free(&effs, &pe, f_i, &index.cycle(run.mst, f_i)) {
                trace.structural_queries += phase1_case(run, &index, f_i)?;
                trace.drain_queries += run.drain()?;
                run.stats.iterations.push(trace);
                continue 'outer;
            }
        }
        run.stats.iterations.push(trace);
        return Ok(());
    }
}

// ---------------------------------------------------------------------------
// Phase 2: vertex cover with charging

// The intersection structure of cycles: one side the non-tree edges, the
// other the tree edges they overlap on their cycles.
struct CoverInstance {
    lefts: Vec<usize>,
    rights: Vec<usize>,
    adj: Vec<Vec<usize>>,
    edges: BTreeSet<(usize, usize)>,
}

fn build_cover_instance(
    mst: &MstInstance,
    work: &MstWork,
    effs: &[UncertaintyInterval],
) -> CoverInstance {
    let index = cycle_index(mst, work, effs);
    let lefts = index.fs.iter().copied().collect::<BTreeSet<_>>();
    let rights = index.tree.clone();
    let left_pos: BTreeMap<usize, usize> = lefts.iter().copied().zip(0..).collect();
    let right_pos: BTreeMap<usize, usize> = rights.iter().copied().zip(0..).collect();
    let mut adj = vec![Vec::new(); lefts.len()];
    let mut edges = BTreeSet::new();
    for &f in &lefts {
        for e in index.cycle(mst, f) {
            if effs[e].intersects(&effs[f]) {
                adj[left_pos[&f]].push(right_pos[&e]);
                edges.insert((f.min(e), f.max(e)));
            }
        }
    }
    CoverInstance {
        lefts: lefts.into_iter().collect(),
        rights: rights.into_iter().collect(),
        adj,
        edges,
    }
}

fn phase2(run: &mut MstRun<'_>, recovery: Recovery) -> Result<(), RunError> {
    let mut charge: BTreeSet<usize> = BTreeSet::new();
    let mut seed_pairs: Vec<(usize, usize)> = Vec::new();
    'outer: loop {
        run.drain()?;
        let effs = run.effs();
        debug_assert!(work_pred_free(run.mst, &run.work, &effs, &run.preds()));
        let cover = build_cover_instance(run.mst, &run.work, &effs);
        if cover.edges.is_empty() {
            return Ok(());
        }
        // Matching and König cover; under recovery B the surviving pairs of
        // the previous matching are kept and completed.
        let left_pos: BTreeMap<usize, usize> = cover.lefts.iter().copied().zip(0..).collect();
        let right_pos: BTreeMap<usize, usize> = cover.rights.iter().copied().zip(0..).collect();
        let seed: Vec<(usize, usize)> = seed_pairs
            .iter()
            .filter_map(|&(a, b)| {
                let (l, r) = (left_pos.get(&a), right_pos.get(&b));
                match (l, r) {
                    (Some(&l), Some(&r)) if cover.adj[l].contains(&r) => Some((l, r)),
                    _ => {
                        let (l, r) = (left_pos.get(&b), right_pos.get(&a));
                        match (l, r) {
                            (Some(&l), Some(&r)) if cover.adj[l].contains(&r) => Some((l, r)),
                            _ => None,
                        }
                    }
                }
            })
            .collect();
        let match_l = max_bipartite_matching(&cover.adj, cover.rights.len(), &seed);
        let (cov_l, cov_r) = koenig_cover(&cover.adj, cover.rights.len(), &match_l);
        let mut match_r: Vec<Option<usize>> = vec![None; cover.rights.len()];
        for (l, m) in match_l.iter().enumerate() {
            if let Some(r) = m {
                match_r[*r] = Some(l);
            }
        }
        // Partner map: each cover member charges a matched non-member.
        let mut partner: BTreeMap<usize, usize> = BTreeMap::new();
        for (l, &c) in cov_l.iter().enumerate() {
            if c {
                let r = match_l[l].expect("cover members are matched");
                debug_assert!(!cov_r[r]);
                partner.insert(cover.lefts[l], cover.rights[r]);
            }
        }
        for (r, &c) in cov_r.iter().enumerate() {
            if c {
                let l = match_r[r].expect("cover members are matched");
                debug_assert!(!cov_l[l]);
                partner.insert(cover.rights[r], cover.lefts[l]);
            }
        }
        // Query order: non-tree cover edges by rising lower limit, then
        // tree cover edges by falling upper limit.
        let mut order: Vec<usize> = Vec::new();
        let mut f_side: Vec<usize> =
            cover.lefts.iter().enumerate().filter(|&(l, _)| cov_l[l]).map(|(_, &e)| e).collect();
        f_side.sort_by_key(|&e| (effs[e].lower(), e));
        let mut l_side: Vec<usize> =
            cover.rights.iter().enumerate().filter(|&(r, _)| cov_r[r]).map(|(_, &e)| e).collect();
        l_side.sort_by_key(|&e| (std::cmp::Reverse(effs[e].upper()), e));
        order.extend(f_side);
        order.extend(l_side);
        for e in order {
            if !run.active(e) {
                return Err(RunError::InvariantViolation(
                    "cover member resolved before its turn without a cover change".into(),
                ));
            }
            run.query(e)?;
            run.drain()?;
            let he = partner[&e];
            if charge.contains(&e) || charge.contains(&he) {
                // The pair was already used for charging; pay for it now.
                if run.active(he) {
                    run.query(he)?;
                    run.stats.otherwise_queries += 1;
                    run.drain()?;
                }
            } else {
                charge.insert(he);
            }
            let now = build_cover_instance(run.mst, &run.work, &run.effs());
            if now.edges != cover.edges {
                run.stats.restarts += 1;
                match recovery {
                    Recovery::A => {
                        let pending: Vec<usize> = charge.iter().copied().collect();
                        for w in pending {
                            if run.active(w) {
                                run.query(w)?;
                                run.drain()?;
                            }
                        }
                        charge.clear();
                        seed_pairs.clear();
                    }
                    Recovery::B => {
                        seed_pairs = match_l
                            .iter()
                            .enumerate()
                            .filter_map(|(l, m)| m.map(|r| (cover.lefts[l], cover.rights[r])))
                            .collect();
                    }
                }
                continue 'outer;
            }
        }
        // The whole cover was queried without structural change; the next
        // rebuild comes up empty.
    }
}

/// Runs the two-phase spanning-tree algorithm: uniqueness preprocessing,
/// prediction-mandatory elimination under the `gamma` budget, then the
/// vertex-cover phase with the chosen recovery strategy.
pub fn run_mst(
    instance: &ProblemInstance,
    pred: &Prediction,
    gamma: u32,
    recovery: Recovery,
    oracle: &Oracle<'_>,
) -> Result<RunResult, RunError> {
    let mst = require_mst(instance)?;
    require_gamma(gamma)?;
    let mut run = MstRun {
        instance,
        mst,
        oracle,
        pred,
        work: MstWork::new(mst),
        state: QueryState::new(instance),
        stats: RunStats::default(),
    };
    let initial = run.drain()?;
    if initial > 0 {
        run.stats.iterations.push(IterationTrace {
            drain_queries: initial,
            ..IterationTrace::default()
        });
    }
    phase1(&mut run, gamma)?;
    phase2(&mut run, recovery)?;
    if !is_solved(instance, &run.state) {
        return Err(RunError::Verify(VerifyError::NotSolved));
    }
    let MstRun { state, stats, .. } = run;
    assemble_result(instance, oracle, pred, state, stats)
}

/// The classical prediction-free baseline: repeatedly resolve the first
/// cycle whose non-tree edge overlaps a cycle edge by querying that witness
/// pair. At most twice the optimum.
pub fn run_cycle_baseline(
    instance: &ProblemInstance,
    oracle: &Oracle<'_>,
) -> Result<RunResult, RunError> {
    let mst = require_mst(instance)?;
    let mut work = MstWork::new(mst);
    let mut state = QueryState::new(instance);
    preprocess_unique(instance, mst, &mut work, &mut state, oracle)?;
    loop {
        let effs = snapshot_effs(instance, &state);
        let index = cycle_index(mst, &work, &effs);
        let mut pick = None;
        'scan: for &f in &index.fs {
            for e in index.cycle(mst, f) {
                if effs[e].intersects(&effs[f]) {
                    pick = Some((f, e));
                    break 'scan;
                }
            }
        }
        let Some((f, _)) = pick else { break };
        let l = index
            .cycle(mst, f)
            .into_iter()
            .filter(|&e| effs[e].intersects(&effs[f]))
            .max_by_key(|&e| (effs[e].upper(), std::cmp::Reverse(e)))
            .unwrap();
        let (a, b) = (f.min(l), f.max(l));
        state.query(instance, oracle, ElementId(a as u32))?;
        state.query(instance, oracle, ElementId(b as u32))?;
        preprocess_unique(instance, mst, &mut work, &mut state, oracle)?;
    }
    if !is_solved(instance, &state) {
        return Err(RunError::Verify(VerifyError::NotSolved));
    }
    let real_as_pred = Prediction::new(instance, oracle.realization().values().to_vec())
        .expect("realization values are admissible predictions");
    assemble_result(instance, oracle, &real_as_pred, state, RunStats::default())
}
