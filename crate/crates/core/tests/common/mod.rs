//! Shared helpers for integration tests: reference solvers written from the
//! problem definitions (independent of the library's incremental machinery)
//! and seeded corpus builders over the bundled benchmark inputs.
#![allow(dead_code)]

use std::collections::BTreeSet;

use queryopt_core::gen::{
    clause_intervals, gen_minimum_instance, gen_mst_instance, gen_predictions, gen_true_values,
    parse_cnf, GenConfig, TspGraph,
};
use queryopt_core::interval::UncertaintyInterval;
use queryopt_core::model::{
    MinimumInstance, MstInstance, Prediction, ProblemInstance, Realization, SortingInstance,
};
use queryopt_core::run::RunResult;
use queryopt_core::{ElementId, Scalar};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const CNF_CORPUS: [&str; 3] = [
    include_str!("../data/chain16.cnf"),
    include_str!("../data/blocks12.cnf"),
    include_str!("../data/wide20.cnf"),
];

// Effective value range of an element: a point once revealed or trivial, the
// open interval otherwise. Points are encoded as lower == upper.
#[derive(Clone, Copy)]
struct Eff {
    lower: Scalar,
    upper: Scalar,
}

fn effective(instance: &ProblemInstance, revealed: &[Option<Scalar>]) -> Vec<Eff> {
    instance
        .element_ids()
        .map(|i| {
            if let Some(v) = revealed[i.idx()] {
                return Eff { lower: v, upper: v };
            }
            match instance.interval(i) {
                UncertaintyInterval::Trivial(v) => Eff { lower: v, upper: v },
                UncertaintyInterval::Open { lower, upper } => Eff { lower, upper },
            }
        })
        .collect()
}

// Certain that a's value is at most b's under every consistent completion.
// Open intervals are open, so sharing an endpoint is already conclusive, and
// equal revealed values count as ordered.
fn surely_before(a: &Eff, b: &Eff) -> bool {
    a.upper <= b.lower
}

/// Decides solvedness directly from the definitions: each minimum set needs a
/// certain minimum, each sorting set a certain total order, and a spanning
/// tree must be certainly minimum, checked by enumerating all spanning trees.
pub fn reference_is_solved(instance: &ProblemInstance, revealed: &[Option<Scalar>]) -> bool {
    let eff = effective(instance, revealed);
    match instance {
        ProblemInstance::Minimum(_) => instance.sets().iter().all(|set| {
            set.iter().any(|&m| {
                set.iter().all(|&j| j == m || surely_before(&eff[m.idx()], &eff[j.idx()]))
            })
        }),
        ProblemInstance::Sorting(_) => instance.sets().iter().all(|set| {
            set.iter().enumerate().all(|(k, &a)| {
                set[k + 1..].iter().all(|&b| {
                    surely_before(&eff[a.idx()], &eff[b.idx()])
                        || surely_before(&eff[b.idx()], &eff[a.idx()])
                })
            })
        }),
        ProblemInstance::Mst(mst) => mst_reference_solved(mst, &eff),
    }
}

fn mst_reference_solved(mst: &MstInstance, eff: &[Eff]) -> bool {
    let m = mst.edges().len();
    assert!(m <= 16, "reference spanning-tree check is exponential in edges");
    let n = mst.n_vertices();
    for mask in 0u32..1 << m {
        if mask.count_ones() as usize != n - 1 {
            continue;
        }
        let chosen: Vec<usize> = (0..m).filter(|e| mask >> e & 1 == 1).collect();
        if is_spanning_tree(n, mst, &chosen) && tree_certainly_minimum(mst, eff, mask) {
            return true;
        }
    }
    false
}

fn is_spanning_tree(n: usize, mst: &MstInstance, chosen: &[usize]) -> bool {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for &e in chosen {
        let (u, v) = (mst.edges()[e].u, mst.edges()[e].v);
        let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
        if ru == rv {
            return false;
        }
        parent[ru] = rv;
    }
    true
}

fn tree_certainly_minimum(mst: &MstInstance, eff: &[Eff], mask: u32) -> bool {
    let m = mst.edges().len();
    for e in 0..m {
        if mask >> e & 1 == 1 {
            continue;
        }
        let path = tree_path(mst, mask, mst.edges()[e].u, mst.edges()[e].v);
        if path.iter().any(|&f| !surely_before(&eff[f], &eff[e])) {
            return false;
        }
    }
    true
}

// Edge ids on the unique tree path between u and v.
fn tree_path(mst: &MstInstance, mask: u32, u: usize, v: usize) -> Vec<usize> {
    let n = mst.n_vertices();
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (eid, edge) in mst.edges().iter().enumerate() {
        if mask >> eid & 1 == 1 {
            adj[edge.u].push((eid, edge.v));
            adj[edge.v].push((eid, edge.u));
        }
    }
    let mut via: Vec<Option<(usize, usize)>> = vec![None; n];
    let mut queue = std::collections::VecDeque::from([u]);
    let mut seen = vec![false; n];
    seen[u] = true;
    while let Some(x) = queue.pop_front() {
        for &(eid, y) in &adj[x] {
            if !seen[y] {
                seen[y] = true;
                via[y] = Some((eid, x));
                queue.push_back(y);
            }
        }
    }
    let mut path = Vec::new();
    let mut cur = v;
    while cur != u {
        let (eid, prev) = via[cur].expect("tree connects all vertices");
        path.push(eid);
        cur = prev;
    }
    path
}

/// Mandatory elements straight from the definition: an open element is
/// mandatory exactly when revealing every other value does not solve the
/// instance.
pub fn reference_mandatory(instance: &ProblemInstance, real: &Realization) -> BTreeSet<ElementId> {
    let mut out = BTreeSet::new();
    for i in instance.element_ids() {
        if instance.interval(i).is_trivial() {
            continue;
        }
        let mut revealed: Vec<Option<Scalar>> =
            real.values().iter().copied().map(Some).collect();
        revealed[i.idx()] = None;
        if !reference_is_solved(instance, &revealed) {
            out.insert(i);
        }
    }
    out
}

/// Smallest feasible query set size by plain subset enumeration.
pub fn reference_offline_opt(instance: &ProblemInstance, real: &Realization) -> usize {
    let open: Vec<ElementId> = instance
        .element_ids()
        .filter(|&i| instance.interval(i).is_open())
        .collect();
    assert!(open.len() <= 16, "reference optimum is exponential in open elements");
    let mut best = open.len();
    for mask in 0u32..1 << open.len() {
        let k = mask.count_ones() as usize;
        if k >= best {
            continue;
        }
        let mut revealed: Vec<Option<Scalar>> = vec![None; instance.n_elements()];
        for (pos, &i) in open.iter().enumerate() {
            if mask >> pos & 1 == 1 {
                revealed[i.idx()] = Some(real.value(i));
            }
        }
        if reference_is_solved(instance, &revealed) {
            best = k;
        }
    }
    best
}

/// Interaction partners from the definitions: co-members of shared sets, or
/// for spanning trees the edges lying on a common simple cycle, found by
/// enumerating cycle edge subsets.
pub fn reference_interaction(instance: &ProblemInstance, i: ElementId) -> BTreeSet<ElementId> {
    match instance {
        ProblemInstance::Minimum(_) | ProblemInstance::Sorting(_) => instance
            .sets()
            .iter()
            .filter(|set| set.contains(&i))
            .flat_map(|set| set.iter().copied())
            .filter(|&j| j != i)
            .collect(),
        ProblemInstance::Mst(mst) => {
            let mut out = BTreeSet::new();
            for cycle in cycle_masks(mst) {
                if cycle >> i.idx() & 1 == 1 {
                    for f in 0..mst.edges().len() {
                        if f != i.idx() && cycle >> f & 1 == 1 {
                            out.insert(ElementId(f as u32));
                        }
                    }
                }
            }
            out
        }
    }
}

// All edge subsets forming one simple cycle: connected with every touched
// vertex of degree exactly two. Two parallel edges count as a cycle.
fn cycle_masks(mst: &MstInstance) -> Vec<u32> {
    let m = mst.edges().len();
    assert!(m <= 16, "cycle enumeration is exponential in edges");
    let n = mst.n_vertices();
    let mut cycles = Vec::new();
    'mask: for mask in 1u32..1 << m {
        if mask.count_ones() < 2 {
            continue;
        }
        let mut degree = vec![0usize; n];
        for e in 0..m {
            if mask >> e & 1 == 1 {
                degree[mst.edges()[e].u] += 1;
                degree[mst.edges()[e].v] += 1;
            }
        }
        if degree.iter().any(|&d| d != 0 && d != 2) {
            continue;
        }
        // Connectivity over the touched vertices.
        let touched: Vec<usize> = (0..n).filter(|&v| degree[v] > 0).collect();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for e in 0..m {
            if mask >> e & 1 == 1 {
                let (ru, rv) =
                    (find(&mut parent, mst.edges()[e].u), find(&mut parent, mst.edges()[e].v));
                if ru != rv {
                    parent[ru] = rv;
                }
            }
        }
        let root = find(&mut parent, touched[0]);
        for &v in &touched[1..] {
            if find(&mut parent, v) != root {
                continue 'mask;
            }
        }
        cycles.push(mask);
    }
    cycles
}

/// Hop counts recomputed from the definition over the reference interaction
/// sets.
pub fn reference_hops(
    instance: &ProblemInstance,
    real: &Realization,
    pred: &Prediction,
) -> Vec<usize> {
    instance
        .element_ids()
        .map(|i| {
            let (a, b) = (real.value(i), pred.value(i));
            if a == b {
                return 0;
            }
            let (lo, hi) = (a.min(b), a.max(b));
            reference_interaction(instance, i)
                .into_iter()
                .map(|j| match instance.interval(j) {
                    UncertaintyInterval::Open { lower, upper } => {
                        usize::from(lo <= lower && hi > lower)
                            + usize::from(lo < upper && hi >= upper)
                    }
                    UncertaintyInterval::Trivial(v) => usize::from(lo < v && hi > v),
                })
                .sum()
        })
        .collect()
}

pub fn reference_k_mqd(
    instance: &ProblemInstance,
    real: &Realization,
    pred: &Prediction,
) -> usize {
    let under_real = reference_mandatory(instance, real);
    let under_pred = reference_mandatory(instance, &pred.as_realization(instance));
    under_real.symmetric_difference(&under_pred).count()
}

/// Best prediction-mandatory set over the whole power set of open elements,
/// scored by total symmetric difference against the samples' mandatory sets.
/// Ties go to the largest set, which is the unique maximum of the minimizer
/// family.
pub fn power_set_minimizer(
    instance: &ProblemInstance,
    samples: &[Realization],
) -> Vec<ElementId> {
    let open: Vec<ElementId> = instance
        .element_ids()
        .filter(|&i| instance.interval(i).is_open())
        .collect();
    assert!(open.len() <= 12, "power-set search is exponential");
    let sample_sets: Vec<BTreeSet<ElementId>> =
        samples.iter().map(|s| reference_mandatory(instance, s)).collect();
    let mut best: Option<(usize, BTreeSet<ElementId>)> = None;
    for mask in 0u32..1 << open.len() {
        let p: BTreeSet<ElementId> = open
            .iter()
            .enumerate()
            .filter(|(pos, _)| mask >> pos & 1 == 1)
            .map(|(_, &i)| i)
            .collect();
        let cost: usize =
            sample_sets.iter().map(|iw| iw.symmetric_difference(&p).count()).sum();
        let better = match &best {
            None => true,
            Some((bc, bp)) => cost < *bc || (cost == *bc && p.len() > bp.len()),
        };
        if better {
            best = Some((cost, p));
        }
    }
    best.expect("power set is never empty").1.into_iter().collect()
}

/// A generated instance with its true values and a prediction batch.
pub struct Case {
    pub instance: ProblemInstance,
    pub real: Realization,
    pub preds: Vec<Prediction>,
}

pub fn correct_prediction(instance: &ProblemInstance, real: &Realization) -> Prediction {
    Prediction::new(instance, real.values().to_vec()).expect("true values are valid predictions")
}

// Prediction batch: the exactly-correct prediction first, then the generated
// error sweep cycled up to the requested volume.
fn prediction_batch(
    instance: &ProblemInstance,
    real: &Realization,
    cfg: &GenConfig,
    preds_each: usize,
) -> Vec<Prediction> {
    if preds_each == 0 {
        return Vec::new();
    }
    let generated: Vec<Prediction> = gen_predictions(instance, real, cfg)
        .expect("prediction generation is total on valid instances")
        .into_iter()
        .map(|(p, _)| p)
        .collect();
    let mut out = vec![correct_prediction(instance, real)];
    let mut k = 0;
    while out.len() < preds_each {
        out.push(generated[k % generated.len()].clone());
        k += 1;
    }
    out.truncate(preds_each);
    out
}

fn family_config(seed: u64) -> GenConfig {
    let roots = 1 + (seed / 3 % 3) as usize;
    let r_d = (seed / 9 % 2) as usize;
    GenConfig::new(seed, roots, 3, r_d, Scalar::new(1, 2))
        .and_then(|c| c.binning(5, 3))
        .expect("corpus configuration is valid")
}

/// Seeded minimum-problem corpus from the bundled CNF files, filtered to at
/// most `max_n` elements.
pub fn minimum_cases(count: usize, max_n: usize, base_seed: u64, preds_each: usize) -> Vec<Case> {
    family_cases(count, max_n, base_seed, preds_each, false)
}

/// Same interval families as [`minimum_cases`] read as sorting instances.
pub fn sorting_cases(count: usize, max_n: usize, base_seed: u64, preds_each: usize) -> Vec<Case> {
    family_cases(count, max_n, base_seed, preds_each, true)
}

fn family_cases(
    count: usize,
    max_n: usize,
    base_seed: u64,
    preds_each: usize,
    as_sorting: bool,
) -> Vec<Case> {
    let pools: Vec<Vec<UncertaintyInterval>> = CNF_CORPUS
        .iter()
        .map(|text| {
            clause_intervals(&parse_cnf(text).expect("bundled CNF parses"), Scalar::new(1, 2))
                .expect("bundled CNF yields intervals")
        })
        .collect();
    let mut cases = Vec::with_capacity(count);
    let mut seed = base_seed;
    let mut attempts = 0usize;
    while cases.len() < count {
        attempts += 1;
        assert!(attempts < count * 100 + 1000, "generation kept rejecting instances");
        seed = seed.wrapping_add(1);
        let cfg = family_config(seed);
        let Ok(generated) = gen_minimum_instance(&pools[(seed % 3) as usize], &cfg) else {
            continue;
        };
        if generated.n_elements() > max_n {
            continue;
        }
        let instance = if as_sorting {
            ProblemInstance::Sorting(
                SortingInstance::new(generated.intervals().to_vec(), generated.sets().to_vec())
                    .expect("generated families are valid sorting instances"),
            )
        } else {
            generated
        };
        let (real, _) = gen_true_values(&instance, seed).expect("value generation succeeds");
        let preds = prediction_batch(&instance, &real, &cfg, preds_each);
        cases.push(Case { instance, real, preds });
    }
    cases
}

/// Sorting instances whose sets are pairwise disjoint, the shape the
/// specialized single-set algorithm requires. Roughly one in six elements is
/// trivial to exercise point comparisons.
pub fn single_set_sorting_cases(count: usize, base_seed: u64, preds_each: usize) -> Vec<Case> {
    let mut cases = Vec::with_capacity(count);
    for idx in 0..count {
        let seed = base_seed.wrapping_add(idx as u64);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(7);
        let n_sets = rng.gen_range(1..=3);
        let mut intervals = Vec::new();
        let mut sets = Vec::new();
        for _ in 0..n_sets {
            let size = rng.gen_range(2..=4);
            let base = rng.gen_range(0..=5i64);
            let mut members = Vec::with_capacity(size);
            for _ in 0..size {
                let id = ElementId(intervals.len() as u32);
                if rng.gen_range(0..6) == 0 {
                    intervals.push(UncertaintyInterval::Trivial(Scalar::new(
                        2 * base + rng.gen_range(1..=5),
                        2,
                    )));
                } else {
                    let lower = Scalar::new(2 * base + rng.gen_range(0..=3), 2);
                    let upper = lower + Scalar::new(rng.gen_range(3..=6), 2);
                    intervals.push(
                        UncertaintyInterval::open(lower, upper).expect("positive width"),
                    );
                }
                members.push(id);
            }
            sets.push(members);
        }
        let instance = ProblemInstance::Sorting(
            SortingInstance::new(intervals, sets).expect("disjoint sets are valid"),
        );
        let (real, _) = gen_true_values(&instance, seed).expect("value generation succeeds");
        let cfg = family_config(seed);
        let preds = prediction_batch(&instance, &real, &cfg, preds_each);
        cases.push(Case { instance, real, preds });
    }
    cases
}

/// Spanning-tree corpus over seeded random point sets with `min_points` to
/// `max_points` distinct integer coordinates (complete graphs).
pub fn mst_cases(
    count: usize,
    min_points: usize,
    max_points: usize,
    base_seed: u64,
    preds_each: usize,
) -> Vec<Case> {
    let mut cases = Vec::with_capacity(count);
    for idx in 0..count {
        let seed = base_seed.wrapping_add(idx as u64);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(11);
        let n = rng.gen_range(min_points..=max_points);
        let mut coords: Vec<(i64, i64)> = Vec::with_capacity(n);
        while coords.len() < n {
            let p = (rng.gen_range(0..=40i64), rng.gen_range(0..=40i64));
            if !coords.contains(&p) {
                coords.push(p);
            }
        }
        let graph = TspGraph { coords: coords.iter().map(|&(x, y)| (x as f64, y as f64)).collect() };
        let cfg = GenConfig::new(seed, 1, 2, 0, Scalar::new(1, 2))
            .and_then(|c| c.binning(preds_each.max(1), 1))
            .expect("corpus configuration is valid");
        let (instance, real) =
            gen_mst_instance(&graph, &cfg).expect("distinct points give valid graphs");
        let preds = prediction_batch(&instance, &real, &cfg, preds_each);
        cases.push(Case { instance, real, preds });
    }
    cases
}

/// Checks that a transcript is well formed (open elements, no repeats) and
/// actually solves the instance per the reference decision procedure.
pub fn check_run(instance: &ProblemInstance, real: &Realization, result: &RunResult) {
    assert_eq!(result.queries, result.transcript.len());
    let mut seen = BTreeSet::new();
    let mut revealed: Vec<Option<Scalar>> = vec![None; instance.n_elements()];
    for &i in &result.transcript {
        assert!(i.idx() < instance.n_elements(), "transcript id out of range");
        assert!(instance.interval(i).is_open(), "queried a trivial element");
        assert!(seen.insert(i), "repeated query of {i:?}");
        revealed[i.idx()] = Some(real.value(i));
    }
    assert!(
        reference_is_solved(instance, &revealed),
        "transcript does not solve the instance"
    );
}

/// Tiny hand-rolled minimum instances for exhaustive cross-checks, with
/// values placed on the quarter grid to provoke boundary coincidences.
pub fn random_minimum_triple(seed: u64) -> (ProblemInstance, Realization, Prediction) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(3);
    let n = rng.gen_range(2..=6);
    let mut intervals = Vec::with_capacity(n);
    for _ in 0..n {
        if rng.gen_range(0..5) == 0 {
            intervals.push(UncertaintyInterval::Trivial(Scalar::new(rng.gen_range(0..=16), 2)));
        } else {
            let lower = Scalar::new(rng.gen_range(0..=10), 2);
            let upper = lower + Scalar::new(rng.gen_range(2..=8), 2);
            intervals.push(UncertaintyInterval::open(lower, upper).expect("positive width"));
        }
    }
    let n_sets = rng.gen_range(1..=3);
    let mut sets = Vec::new();
    for _ in 0..n_sets {
        let mut ids: Vec<ElementId> = (0..n as u32).map(ElementId).collect();
        ids.shuffle(&mut rng);
        ids.truncate(rng.gen_range(2..=n.max(2)).min(n));
        ids.sort_unstable();
        sets.push(ids);
    }
    sets.dedup();
    let instance = ProblemInstance::Minimum(
        MinimumInstance::new(intervals, sets).expect("constructed sets are valid"),
    );
    let real = quarter_grid_values(&instance, &mut rng);
    let pred = quarter_grid_values(&instance, &mut rng);
    let pred = Prediction::new(&instance, pred.values().to_vec()).unwrap();
    (instance, real, pred)
}

/// The same small families as [`random_minimum_triple`], read as sorting
/// instances.
pub fn random_sorting_triple(seed: u64) -> (ProblemInstance, Realization, Prediction) {
    let (minimum, real, pred) = random_minimum_triple(seed);
    let instance = ProblemInstance::Sorting(
        SortingInstance::new(minimum.intervals().to_vec(), minimum.sets().to_vec())
            .expect("same shape is valid for sorting"),
    );
    let real = Realization::new(&instance, real.values().to_vec()).unwrap();
    let pred = Prediction::new(&instance, pred.values().to_vec()).unwrap();
    (instance, real, pred)
}

/// Small random multigraphs built as a spanning tree plus a few extra edges,
/// with quarter-grid weights. Kept to at most seven edges so the reference
/// solvers stay fast.
pub fn random_mst_triple(seed: u64) -> (ProblemInstance, Realization, Prediction) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(5);
    let n = rng.gen_range(3..=5usize);
    let mut edges = Vec::new();
    for v in 1..n {
        edges.push(queryopt_core::model::MstEdge { u: rng.gen_range(0..v), v });
    }
    for _ in 0..rng.gen_range(0..=3) {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u != v {
            edges.push(queryopt_core::model::MstEdge { u: u.min(v), v: u.max(v) });
        }
    }
    let mut intervals = Vec::with_capacity(edges.len());
    for _ in 0..edges.len() {
        if rng.gen_range(0..5) == 0 {
            intervals.push(UncertaintyInterval::Trivial(Scalar::new(rng.gen_range(0..=16), 2)));
        } else {
            let lower = Scalar::new(rng.gen_range(0..=10), 2);
            let upper = lower + Scalar::new(rng.gen_range(2..=8), 2);
            intervals.push(UncertaintyInterval::open(lower, upper).expect("positive width"));
        }
    }
    let instance = ProblemInstance::Mst(
        MstInstance::new(n, intervals, edges).expect("tree plus extras is connected"),
    );
    let real = quarter_grid_values(&instance, &mut rng);
    let pred = quarter_grid_values(&instance, &mut rng);
    let pred = Prediction::new(&instance, pred.values().to_vec()).unwrap();
    (instance, real, pred)
}

fn quarter_grid_values(instance: &ProblemInstance, rng: &mut ChaCha8Rng) -> Realization {
    let values = instance
        .element_ids()
        .map(|i| match instance.interval(i) {
            UncertaintyInterval::Trivial(v) => v,
            UncertaintyInterval::Open { lower, upper } => {
                let t = Scalar::new(rng.gen_range(1..=3), 4);
                lower + (upper - lower) * t
            }
        })
        .collect();
    Realization::new(instance, values).expect("quarter-grid values lie inside")
}
