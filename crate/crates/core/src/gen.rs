//! Benchmark generators: interval families derived from CNF clause structure,
//! spanning-tree instances derived from Euclidean point sets, and true-value and
//! prediction generation covering a wide range of error values.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::interval::UncertaintyInterval;
use crate::measures::{compute_errors, interaction_set, ErrorReport};
use crate::model::{
    ElementId, MinimumInstance, MstEdge, MstInstance, Prediction, ProblemInstance, ProblemKind,
    Realization,
};
use crate::scalar::Scalar;
use crate::state::QueryState;
use crate::verify::is_mandatory_at;

// Independent stream ids so the same seed drives unrelated draws without overlap.
const STREAM_MIN_INSTANCE: u64 = 0;
const STREAM_TRUE_VALUES: u64 = 1;
const STREAM_PREDICTIONS: u64 = 2;
const STREAM_MST_INSTANCE: u64 = 3;
const STREAM_MST_PREDICTIONS: u64 = 4;

// Largest vertex count kept when cutting a point set down to an instance.
const MAX_VERTICES: usize = 90;

#[derive(Debug, thiserror::Error)]
pub enum GenError {
    #[error("malformed CNF input: {0}")]
    Cnf(String),
    #[error("malformed TSP input: {0}")]
    Tsplib(String),
    #[error("invalid generator configuration: {0}")]
    Config(String),
    #[error("unusable generator input: {0}")]
    Input(String),
    #[error("invalid fixture parameters: {0}")]
    Fixture(String),
}

/// Tuning knobs shared by the generators. Equal configurations produce
/// byte-identical output.
#[derive(Clone, Debug)]
pub struct GenConfig {
    /// Seed for all random draws.
    pub seed: u64,
    /// Number of root intervals drawn when building a set family.
    pub roots: usize,
    /// Maximum number of intersecting intervals collected around a root.
    pub r_w: usize,
    /// Maximum length of the comparison paths grown from set members.
    pub r_d: usize,
    /// Width ratio of spanning-tree intervals around the true edge weight.
    pub d: Scalar,
    /// Number of equal-width error bins used when thinning predictions.
    pub target_bins: usize,
    /// Predictions kept per error bin.
    pub preds_per_bin: usize,
}

impl GenConfig {
    /// Validated configuration with the default binning (25 bins of 5).
    pub fn new(
        seed: u64,
        roots: usize,
        r_w: usize,
        r_d: usize,
        d: Scalar,
    ) -> Result<Self, GenError> {
        GenConfig { seed, roots, r_w, r_d, d, target_bins: 25, preds_per_bin: 5 }.validated()
    }

    /// Overrides the prediction binning.
    pub fn binning(mut self, target_bins: usize, preds_per_bin: usize) -> Result<Self, GenError> {
        self.target_bins = target_bins;
        self.preds_per_bin = preds_per_bin;
        self.validated()
    }

    fn validated(self) -> Result<Self, GenError> {
        if self.roots < 1 {
            return Err(GenError::Config("at least one root is required".into()));
        }
        if self.r_w < 2 {
            return Err(GenError::Config("set width bound r_w must be at least 2".into()));
        }
        if self.d <= Scalar::zero() || self.d > Scalar::one() {
            return Err(GenError::Config("width ratio d must lie in (0, 1]".into()));
        }
        if self.target_bins < 1 || self.preds_per_bin < 1 {
            return Err(GenError::Config("binning parameters must be at least 1".into()));
        }
        Ok(self)
    }
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// A propositional formula in clausal form. Only the variable-index structure
/// matters downstream; polarities are kept but ignored.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CnfFormula {
    pub n_vars: usize,
    pub clauses: Vec<Vec<i64>>,
}

/// Parses the standard DIMACS clausal format: `c` comment lines, one
/// `p cnf <vars> <clauses>` header, then zero-terminated literal runs which
/// may span lines. A line consisting of `%` ends the clause section (a common
/// benchmark-file convention).
pub fn parse_cnf(text: &str) -> Result<CnfFormula, GenError> {
    let mut n_vars: Option<usize> = None;
    let mut n_clauses: Option<usize> = None;
    let mut clauses: Vec<Vec<i64>> = Vec::new();
    let mut current: Vec<i64> = Vec::new();
    'lines: for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line == "%" {
            break;
        }
        if line.starts_with('p') {
            if n_vars.is_some() {
                return Err(GenError::Cnf("duplicate problem header".into()));
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let parsed = match fields.as_slice() {
                ["p", "cnf", v, c] => v.parse().ok().zip(c.parse().ok()),
                _ => None,
            };
            let Some((v, c)) = parsed else {
                return Err(GenError::Cnf(format!("bad problem header: {line}")));
            };
            n_vars = Some(v);
            n_clauses = Some(c);
            continue;
        }
        let Some(vars) = n_vars else {
            return Err(GenError::Cnf("clause data before the problem header".into()));
        };
        for token in line.split_whitespace() {
            let lit: i64 = token
                .parse()
                .map_err(|_| GenError::Cnf(format!("bad literal token: {token}")))?;
            if lit == 0 {
                if current.is_empty() {
                    return Err(GenError::Cnf("empty clause".into()));
                }
                clauses.push(std::mem::take(&mut current));
                continue;
            }
            let var = lit.unsigned_abs();
            if var as usize > vars {
                return Err(GenError::Cnf(format!("literal {lit} exceeds variable count {vars}")));
            }
            current.push(lit);
        }
        if clauses.len() == n_clauses.unwrap_or(usize::MAX) && current.is_empty() {
            // All announced clauses read; ignore any trailing junk section.
            break 'lines;
        }
    }
    if !current.is_empty() {
        // Tolerate a final clause without its zero terminator.
        clauses.push(current);
    }
    let vars = n_vars.ok_or_else(|| GenError::Cnf("missing problem header".into()))?;
    let expected = n_clauses.expect("header parses vars and clauses together");
    if clauses.len() != expected {
        return Err(GenError::Cnf(format!(
            "header announces {expected} clauses but {} were read",
            clauses.len()
        )));
    }
    Ok(CnfFormula { n_vars: vars, clauses })
}

/// Re-interprets every clause as the open interval from its smallest variable
/// index minus `eps` to its largest plus `eps`. Shared variables between
/// clauses become interval intersections, which is what makes clause files
/// interesting source material.
pub fn clause_intervals(
    formula: &CnfFormula,
    eps: Scalar,
) -> Result<Vec<UncertaintyInterval>, GenError> {
    if eps <= Scalar::zero() {
        return Err(GenError::Config("interval margin must be positive".into()));
    }
    formula
        .clauses
        .iter()
        .map(|clause| {
            let lo = clause.iter().map(|l| l.unsigned_abs() as i64).min().expect("no empty clause");
            let hi = clause.iter().map(|l| l.unsigned_abs() as i64).max().expect("no empty clause");
            Ok(UncertaintyInterval::open(Scalar::int(lo) - eps, Scalar::int(hi) + eps)
                .expect("a positive margin orders the endpoints"))
        })
        .collect()
}

// Interval family builder used by gen_minimum_instance. Pool indices are
// interned into dense element ids the first time they enter an emitted set.
struct FamilyBuilder<'a> {
    pool: &'a [(Scalar, Scalar)],
    by_lower: Vec<usize>,
    rng: ChaCha8Rng,
    r_w: usize,
    ids: BTreeMap<usize, ElementId>,
    intervals: Vec<UncertaintyInterval>,
    sets: Vec<Vec<ElementId>>,
    seen: BTreeSet<Vec<usize>>,
}

fn encloses(outer: (Scalar, Scalar), inner: (Scalar, Scalar)) -> bool {
    outer.0 <= inner.0 && inner.1 <= outer.1
}

impl<'a> FamilyBuilder<'a> {
    // Pool indices whose interval intersects interval `g`, in pool order.
    fn candidates(&self, g: usize) -> Vec<usize> {
        let (gl, gu) = self.pool[g];
        let cut = self.by_lower.partition_point(|&i| self.pool[i].0 < gu);
        self.by_lower[..cut].iter().copied().filter(|&i| i != g && self.pool[i].1 > gl).collect()
    }

    fn leftmost(&self, members: &[usize]) -> usize {
        members
            .iter()
            .copied()
            .min_by_key(|&i| (self.pool[i].0, self.pool[i].1, i))
            .expect("sets under construction are never empty")
    }

    // Draws up to `want` intersecting intervals around `seed`, discarding draws
    // that would let the leftmost member fully contain another member. With
    // `fix_leftmost` the seed must stay the strictly leftmost member.
    fn grow(&mut self, seed: usize, want: usize, fix_leftmost: bool) -> Vec<usize> {
        let mut members = vec![seed];
        let mut cands = self.candidates(seed);
        cands.shuffle(&mut self.rng);
        for c in cands {
            if members.len() == want + 1 {
                break;
            }
            let ok = if fix_leftmost {
                let lm = self.pool[seed];
                self.pool[c].0 > lm.0 && self.pool[c].1 > lm.1
            } else {
                members.push(c);
                let lm = self.leftmost(&members);
                let fine = members
                    .iter()
                    .all(|&m| m == lm || !encloses(self.pool[lm], self.pool[m]));
                members.pop();
                fine
            };
            if ok {
                members.push(c);
            }
        }
        members
    }

    // Interns and records one set; duplicates by member identity are dropped.
    fn emit(&mut self, members: &[usize]) {
        let mut key = members.to_vec();
        key.sort_unstable();
        if !self.seen.insert(key) {
            return;
        }
        let mut ids: Vec<ElementId> = members
            .iter()
            .map(|&pi| {
                *self.ids.entry(pi).or_insert_with(|| {
                    let id = ElementId(self.intervals.len() as u32);
                    let (l, u) = self.pool[pi];
                    self.intervals
                        .push(UncertaintyInterval::open(l, u).expect("pool intervals are open"));
                    id
                })
            })
            .collect();
        ids.sort();
        self.sets.push(ids);
    }

    // Grows comparison paths of length up to `budget` from the non-leftmost
    // members, recursing with the drawn remaining length.
    fn paths_from(&mut self, members: &[usize], budget: usize) {
        if budget == 0 {
            return;
        }
        let lm = self.leftmost(members);
        for &m in members {
            if m == lm {
                continue;
            }
            let length = self.rng.gen_range(0..budget);
            if length > 0 {
                self.path_set(m, length);
            }
        }
    }

    fn path_set(&mut self, leftmost: usize, budget: usize) {
        let want = self.rng.gen_range(1..=self.r_w - 1);
        let members = self.grow(leftmost, want, true);
        if members.len() < 2 {
            return;
        }
        self.emit(&members);
        self.paths_from(&members, budget);
    }
}

/// Draws a family of sets over the given intervals: `cfg.roots` root sets of a
/// root interval plus up to `r_w` intersecting intervals, then comparison
/// paths of length up to `r_d` grown from the non-leftmost members. Only
/// preprocessed sets are emitted, i.e. the leftmost member of a set never
/// fully contains another member; draws violating this are discarded, so sets
/// can come out smaller than requested or be skipped entirely.
pub fn gen_minimum_instance(
    intervals: &[UncertaintyInterval],
    cfg: &GenConfig,
) -> Result<ProblemInstance, GenError> {
    let pool: Vec<(Scalar, Scalar)> = intervals
        .iter()
        .filter(|iv| iv.is_open())
        .map(|iv| (iv.lower(), iv.upper()))
        .collect();
    if pool.is_empty() {
        return Err(GenError::Input("no open intervals to draw from".into()));
    }
    let mut by_lower: Vec<usize> = (0..pool.len()).collect();
    by_lower.sort_by_key(|&i| (pool[i].0, pool[i].1, i));
    let mut builder = FamilyBuilder {
        pool: &pool,
        by_lower,
        rng: stream_rng(cfg.seed, STREAM_MIN_INSTANCE),
        r_w: cfg.r_w,
        ids: BTreeMap::new(),
        intervals: Vec::new(),
        sets: Vec::new(),
        seen: BTreeSet::new(),
    };
    for _ in 0..cfg.roots {
        let root = builder.rng.gen_range(0..pool.len());
        let want = builder.rng.gen_range(1..=cfg.r_w);
        let members = builder.grow(root, want, false);
        if members.len() < 2 {
            continue;
        }
        builder.emit(&members);
        builder.paths_from(&members, cfg.r_d);
    }
    if builder.sets.is_empty() {
        return Err(GenError::Input("the drawn roots produced no viable sets".into()));
    }
    MinimumInstance::new(builder.intervals, builder.sets)
        .map(ProblemInstance::Minimum)
        .map_err(|e| GenError::Input(e.to_string()))
}

/// Bookkeeping of a [`gen_true_values`] run.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct TrueValueStats {
    /// Mandatory elements left by the initial separated placement; zero
    /// whenever a mandatory-free placement was found.
    pub standard_mandatory: usize,
    /// Drawn target number of mandatory elements.
    pub target: usize,
    /// Mandatory count actually reached by the adjustment loop.
    pub achieved: usize,
}

// A value in (lower, upper) contained in as few co-member interiors as
// possible: candidate points are the co-member limits falling strictly inside
// plus the midpoints of the cells they cut out; ties pick the smallest value.
fn separated_value(
    lower: Scalar,
    upper: Scalar,
    neighbors: &[UncertaintyInterval],
) -> Scalar {
    let mut cuts: BTreeSet<Scalar> = BTreeSet::new();
    for nb in neighbors {
        if nb.is_open() {
            for b in [nb.lower(), nb.upper()] {
                if lower < b && b < upper {
                    cuts.insert(b);
                }
            }
        }
    }
    let mut points: Vec<Scalar> = Vec::with_capacity(2 * cuts.len() + 1);
    let mut prev = lower;
    for &b in &cuts {
        points.push(Scalar::midpoint(prev, b));
        points.push(b);
        prev = b;
    }
    points.push(Scalar::midpoint(prev, upper));
    points
        .into_iter()
        .min_by_key(|&v| (neighbors.iter().filter(|nb| nb.strictly_contains(v)).count(), v))
        .expect("the midpoint candidate always exists")
}

fn open_intersection_midpoints(
    own: UncertaintyInterval,
    neighbors: &[UncertaintyInterval],
) -> Vec<Scalar> {
    let mut out: Vec<Scalar> = Vec::new();
    for nb in neighbors {
        if !nb.is_open() || !own.intersects(nb) {
            continue;
        }
        let lo = own.lower().max(nb.lower());
        let hi = own.upper().min(nb.upper());
        let mid = Scalar::midpoint(lo, hi);
        if !out.contains(&mid) {
            out.push(mid);
        }
    }
    out
}

/// Places true values for a minimum or sorting instance. The initial
/// placement puts every value outside all co-member interiors where possible,
/// which leaves no element mandatory; when interiors cannot be avoided the
/// remaining mandatory count is reported. A target mandatory count is then
/// drawn uniformly and random single-value adjustments raise the count until
/// the target is reached or no adjustment helps.
pub fn gen_true_values(
    instance: &ProblemInstance,
    seed: u64,
) -> Result<(Realization, TrueValueStats), GenError> {
    if instance.kind() == ProblemKind::Mst {
        return Err(GenError::Input(
            "spanning-tree true values are produced by gen_mst_instance".into(),
        ));
    }
    let n = instance.n_elements();
    let mut rng = stream_rng(seed, STREAM_TRUE_VALUES);
    let neighbors: Vec<Vec<ElementId>> =
        instance.element_ids().map(|i| interaction_set(instance, i)).collect();
    let neighbor_ivs: Vec<Vec<UncertaintyInterval>> = neighbors
        .iter()
        .map(|ids| ids.iter().map(|&j| instance.interval(j)).collect())
        .collect();
    let state = QueryState::new(instance);

    let mut values: Vec<Scalar> = vec![Scalar::zero(); n];
    let mut open: Vec<usize> = Vec::new();
    for i in instance.element_ids() {
        match instance.interval(i) {
            UncertaintyInterval::Trivial(v) => values[i.idx()] = v,
            UncertaintyInterval::Open { lower, upper } => {
                values[i.idx()] = separated_value(lower, upper, &neighbor_ivs[i.idx()]);
                open.push(i.idx());
            }
        }
    }
    let mut flags: Vec<bool> = instance
        .element_ids()
        .map(|i| is_mandatory_at(instance, &state, &values, i))
        .collect();
    let standard_mandatory = flags.iter().filter(|&&f| f).count();
    let mut count = standard_mandatory;
    let target = rng.gen_range(count..=open.len());

    while count < target {
        let mut elems = open.clone();
        elems.shuffle(&mut rng);
        let mut overshoot: Option<(usize, Scalar)> = None;
        let mut committed = false;
        'scan: for &e in &elems {
            let own = instance.interval(ElementId(e as u32));
            let mut palette = open_intersection_midpoints(own, &neighbor_ivs[e]);
            palette.shuffle(&mut rng);
            for v in palette {
                if v == values[e] {
                    continue;
                }
                let delta = flag_delta(instance, &state, &mut values, &flags, e, v);
                if delta >= 1 {
                    if count + delta as usize <= target {
                        apply_move(instance, &state, &mut values, &mut flags, e, v);
                        count += delta as usize;
                        committed = true;
                        break 'scan;
                    }
                    if overshoot.is_none() {
                        overshoot = Some((e, v));
                    }
                }
            }
        }
        if committed {
            continue;
        }
        // No move hits the target exactly; take a single overshooting move if
        // one exists, otherwise the placement is stuck.
        if let Some((e, v)) = overshoot {
            let delta = flag_delta(instance, &state, &mut values, &flags, e, v);
            apply_move(instance, &state, &mut values, &mut flags, e, v);
            count = (count as i64 + delta) as usize;
        }
        break;
    }

    let real = Realization::new(instance, values).map_err(|e| GenError::Input(e.to_string()))?;
    Ok((real, TrueValueStats { standard_mandatory, target, achieved: count }))
}

// Change in the total mandatory count if element `e` moved to value `v`; the
// move only affects `e` and its interaction set, so only those are re-tested.
// `values` is restored before returning.
fn flag_delta(
    instance: &ProblemInstance,
    state: &QueryState,
    values: &mut [Scalar],
    flags: &[bool],
    e: usize,
    v: Scalar,
) -> i64 {
    let old = values[e];
    values[e] = v;
    let mut delta = 0i64;
    for x in affected(instance, e) {
        let now = is_mandatory_at(instance, state, values, x);
        delta += now as i64 - flags[x.idx()] as i64;
    }
    values[e] = old;
    delta
}

fn apply_move(
    instance: &ProblemInstance,
    state: &QueryState,
    values: &mut [Scalar],
    flags: &mut [bool],
    e: usize,
    v: Scalar,
) {
    values[e] = v;
    for x in affected(instance, e) {
        flags[x.idx()] = is_mandatory_at(instance, state, values, x);
    }
}

fn affected(instance: &ProblemInstance, e: usize) -> Vec<ElementId> {
    let mut out = interaction_set(instance, ElementId(e as u32));
    out.push(ElementId(e as u32));
    out
}

/// Generates predictions spanning the achievable range of mandatory-distance
/// errors. Starting from the true values, random single-value moves that raise
/// the error by at least one are applied until a target error `v` is reached;
/// `v` sweeps upward until unreachable. The collected predictions are split
/// into `target_bins` equal error bins over `[0, v_max]` and the
/// `preds_per_bin` highest-error predictions of each bin are kept.
pub fn gen_predictions(
    instance: &ProblemInstance,
    real: &Realization,
    cfg: &GenConfig,
) -> Result<Vec<(Prediction, ErrorReport)>, GenError> {
    if instance.kind() == ProblemKind::Mst {
        // Uniform draws already cover a wide error range on spanning trees.
        return gen_mst_predictions(instance, real, cfg);
    }
    let n = instance.n_elements();
    let mut rng = stream_rng(cfg.seed, STREAM_PREDICTIONS);
    let state = QueryState::new(instance);
    let neighbor_ivs: Vec<Vec<UncertaintyInterval>> = instance
        .element_ids()
        .map(|i| {
            interaction_set(instance, i).iter().map(|&j| instance.interval(j)).collect()
        })
        .collect();
    let real_flags: Vec<bool> = instance
        .element_ids()
        .map(|i| is_mandatory_at(instance, &state, real.values(), i))
        .collect();
    let open: Vec<usize> = instance
        .element_ids()
        .filter(|&i| instance.interval(i).is_open())
        .map(|i| i.idx())
        .collect();

    // Error escalation: repeatedly move one predicted value so that the
    // symmetric difference against the real mandatory set grows.
    let escalate = |target: usize, rng: &mut ChaCha8Rng| -> (Vec<Scalar>, usize) {
        let mut values = real.values().to_vec();
        let mut flags = real_flags.clone();
        let mut error = 0usize;
        while error < target {
            let mut moved = false;
            let mut elems = open.clone();
            elems.shuffle(rng);
            'scan: for &e in &elems {
                let own = instance.interval(ElementId(e as u32));
                let mut palette = open_intersection_midpoints(own, &neighbor_ivs[e]);
                let (lo, hi) = (own.lower(), own.upper());
                palette.push(separated_value(lo, hi, &neighbor_ivs[e]));
                palette.shuffle(rng);
                for v in palette {
                    if v == values[e] {
                        continue;
                    }
                    let mut gain = 0i64;
                    let old = values[e];
                    values[e] = v;
                    for x in affected(instance, e) {
                        let now = is_mandatory_at(instance, &state, &values, x);
                        let was = flags[x.idx()];
                        gain += (now != real_flags[x.idx()]) as i64
                            - (was != real_flags[x.idx()]) as i64;
                    }
                    if gain >= 1 {
                        for x in affected(instance, e) {
                            flags[x.idx()] = is_mandatory_at(instance, &state, &values, x);
                        }
                        error += gain as usize;
                        moved = true;
                        break 'scan;
                    }
                    values[e] = old;
                }
            }
            if !moved {
                break;
            }
        }
        (values, error)
    };

    let mut raw: Vec<(Vec<Scalar>, usize)> = vec![(real.values().to_vec(), 0)];
    let mut v_max = 0usize;
    let mut v = 1usize;
    while v <= n {
        let mut reached = false;
        for _ in 0..cfg.preds_per_bin {
            let (values, error) = escalate(v, &mut rng);
            if error >= v {
                reached = true;
            }
            v_max = v_max.max(error);
            raw.push((values, error));
        }
        if !reached {
            break;
        }
        v += 1;
    }

    // Bin by error over [0, v_max] and keep the highest-error predictions of
    // each bin, dropping duplicates.
    let mut bins: Vec<Vec<(Vec<Scalar>, usize)>> = vec![Vec::new(); cfg.target_bins];
    for (values, error) in raw {
        let idx = if v_max == 0 {
            0
        } else {
            (error * cfg.target_bins / v_max).min(cfg.target_bins - 1)
        };
        bins[idx].push((values, error));
    }
    let mut seen: BTreeSet<Vec<Scalar>> = BTreeSet::new();
    let mut out: Vec<(Prediction, ErrorReport)> = Vec::new();
    for bin in &mut bins {
        bin.sort_by(|a, b| b.1.cmp(&a.1));
        let mut kept = 0usize;
        for (values, _) in bin.iter() {
            if kept == cfg.preds_per_bin {
                break;
            }
            if !seen.insert(values.clone()) {
                continue;
            }
            let pred = Prediction::new(instance, values.clone())
                .map_err(|e| GenError::Input(e.to_string()))?;
            let report = compute_errors(instance, real, &pred);
            out.push((pred, report));
            kept += 1;
        }
    }
    Ok(out)
}

/// Euclidean point set parsed from a TSP-format file; node order follows the
/// file.
#[derive(Clone, PartialEq, Debug)]
pub struct TspGraph {
    pub coords: Vec<(f64, f64)>,
}

/// Parses the keyword header and `NODE_COORD_SECTION` of a TSP-format file.
/// Only two-dimensional Euclidean instances (`EDGE_WEIGHT_TYPE: EUC_2D`) are
/// supported; edge weights are the rounded point distances.
pub fn parse_tsplib(text: &str) -> Result<TspGraph, GenError> {
    let mut dimension: Option<usize> = None;
    let mut weight_type: Option<String> = None;
    let mut lines = text.lines();
    loop {
        let Some(line) = lines.next() else {
            return Err(GenError::Tsplib("missing NODE_COORD_SECTION".into()));
        };
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if line == "NODE_COORD_SECTION" {
            break;
        }
        let (key, value) = match line.split_once(':') {
            Some((k, v)) => (k.trim(), v.trim()),
            None => (line, ""),
        };
        match key {
            "DIMENSION" => {
                dimension = Some(value.parse().map_err(|_| {
                    GenError::Tsplib(format!("bad DIMENSION value: {value}"))
                })?);
            }
            "EDGE_WEIGHT_TYPE" => weight_type = Some(value.to_string()),
            _ => {}
        }
    }
    let dim = dimension.ok_or_else(|| GenError::Tsplib("missing DIMENSION".into()))?;
    match weight_type.as_deref() {
        Some("EUC_2D") => {}
        Some(other) => {
            return Err(GenError::Tsplib(format!("unsupported edge weight type {other}")));
        }
        None => return Err(GenError::Tsplib("missing EDGE_WEIGHT_TYPE".into())),
    }
    let mut coords: Vec<Option<(f64, f64)>> = vec![None; dim];
    let mut read = 0usize;
    while read < dim {
        let Some(line) = lines.next() else {
            return Err(GenError::Tsplib(format!("expected {dim} coordinate lines")));
        };
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if line == "EOF" {
            return Err(GenError::Tsplib(format!("expected {dim} coordinate lines")));
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let parsed = match fields.as_slice() {
            [idx, x, y] => {
                let idx: Option<usize> = idx.parse().ok();
                idx.zip(x.parse::<f64>().ok()).zip(y.parse::<f64>().ok())
            }
            _ => None,
        };
        let Some(((idx, x), y)) = parsed else {
            return Err(GenError::Tsplib(format!("bad coordinate line: {line}")));
        };
        if idx == 0 || idx > dim {
            return Err(GenError::Tsplib(format!("node index {idx} out of range 1..={dim}")));
        }
        if coords[idx - 1].replace((x, y)).is_some() {
            return Err(GenError::Tsplib(format!("duplicate node index {idx}")));
        }
        read += 1;
    }
    Ok(TspGraph { coords: coords.into_iter().map(|c| c.expect("all indices read")).collect() })
}

// Rounded Euclidean distance, the standard EUC_2D weight.
fn euc_2d(a: (f64, f64), b: (f64, f64)) -> i64 {
    let (dx, dy) = (a.0 - b.0, a.1 - b.1);
    ((dx * dx + dy * dy).sqrt() + 0.5).floor() as i64
}

/// Builds a spanning-tree instance over the complete graph of the point set,
/// cut down to its first 90 points when larger (any induced subgraph of a
/// complete graph stays connected). Each edge keeps its rounded Euclidean
/// distance as the true weight; with probability 1/2 one interval boundary is
/// pinned right next to the weight, and free boundaries are drawn uniformly
/// within ratio `d` around it, quantized to thousandths.
pub fn gen_mst_instance(
    graph: &TspGraph,
    cfg: &GenConfig,
) -> Result<(ProblemInstance, Realization), GenError> {
    let n = graph.coords.len().min(MAX_VERTICES);
    if n < 2 {
        return Err(GenError::Input("need at least two points".into()));
    }
    let mut rng = stream_rng(cfg.seed, STREAM_MST_INSTANCE);
    let mut intervals = Vec::new();
    let mut edges = Vec::new();
    let mut values = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            let w = euc_2d(graph.coords[u], graph.coords[v]);
            // Scale guard keeps zero-weight edges (coincident points) workable.
            let scale = w.max(1);
            let span = cfg.d.numer() * scale * 1000 / cfg.d.denom();
            if span < 1 {
                return Err(GenError::Config(
                    "width ratio d is below the thousandth quantization".into(),
                ));
            }
            let w1000 = w * 1000;
            let pinned = rng.gen_bool(0.5);
            let pin_lower = pinned && rng.gen_bool(0.5);
            let lk = if pin_lower {
                w1000 - scale
            } else {
                rng.gen_range(w1000 - span..=w1000 - 1)
            };
            let uk = if pinned && !pin_lower {
                w1000 + scale
            } else {
                rng.gen_range(w1000 + 1..=w1000 + span)
            };
            intervals.push(
                UncertaintyInterval::open(Scalar::new(lk, 1000), Scalar::new(uk, 1000))
                    .expect("both boundaries bracket the weight"),
            );
            edges.push(MstEdge { u, v });
            values.push(Scalar::int(w));
        }
    }
    let instance = MstInstance::new(n, intervals, edges)
        .map(ProblemInstance::Mst)
        .map_err(|e| GenError::Input(e.to_string()))?;
    let real =
        Realization::new(&instance, values).map_err(|e| GenError::Input(e.to_string()))?;
    Ok((instance, real))
}

/// Draws `target_bins * preds_per_bin` predictions with every open value
/// uniform over a thousand-step grid strictly inside its interval. Uniform
/// draws cover a wide error range here, so no escalation or thinning is
/// applied.
pub fn gen_mst_predictions(
    instance: &ProblemInstance,
    real: &Realization,
    cfg: &GenConfig,
) -> Result<Vec<(Prediction, ErrorReport)>, GenError> {
    let mut rng = stream_rng(cfg.seed, STREAM_MST_PREDICTIONS);
    let count = cfg.target_bins * cfg.preds_per_bin;
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let values: Vec<Scalar> = instance
            .element_ids()
            .map(|i| match instance.interval(i) {
                UncertaintyInterval::Trivial(v) => v,
                UncertaintyInterval::Open { lower, upper } => {
                    let step = rng.gen_range(1..=999i64);
                    lower + (upper - lower) * Scalar::new(step, 1000)
                }
            })
            .collect();
        let pred =
            Prediction::new(instance, values).map_err(|e| GenError::Input(e.to_string()))?;
        let report = compute_errors(instance, real, &pred);
        out.push((pred, report));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::{parse_instance, serialize_instance};
    use crate::verify::mandatory_set;

    fn chain_formula() -> CnfFormula {
        // Twelve variables with clauses marching along them in overlapping
        // windows, so the derived intervals intersect their neighbors.
        let mut clauses: Vec<Vec<i64>> = Vec::new();
        for s in 1..=9i64 {
            clauses.push(vec![s, -(s + 1), s + 3]);
        }
        for s in 1..=6i64 {
            clauses.push(vec![s, s + 5]);
        }
        CnfFormula { n_vars: 12, clauses }
    }

    #[test]
    fn cnf_parser_reads_dimacs() {
        let text = "c example\nc another comment\np cnf 7 3\n3 -7 1 0\n5 0\n2 -4\n6 0\n%\n0\n";
        let formula = parse_cnf(text).unwrap();
        assert_eq!(formula.n_vars, 7);
        assert_eq!(formula.clauses, vec![vec![3, -7, 1], vec![5], vec![2, -4, 6]]);
    }

    #[test]
    fn cnf_parser_rejects_malformed_input() {
        assert!(matches!(parse_cnf("p cnf 2 1\n0\n"), Err(GenError::Cnf(_))));
        assert!(matches!(parse_cnf("p cnf two 1\n1 0\n"), Err(GenError::Cnf(_))));
        assert!(matches!(parse_cnf("p cnf 2 2\n1 0\n"), Err(GenError::Cnf(_))));
        assert!(matches!(parse_cnf("p cnf 2 1\n3 0\n"), Err(GenError::Cnf(_))));
        assert!(matches!(parse_cnf("1 0\n"), Err(GenError::Cnf(_))));
    }

    #[test]
    fn clause_intervals_use_index_extremes() {
        let formula =
            CnfFormula { n_vars: 7, clauses: vec![vec![3, -7, 1], vec![5]] };
        let ivs = clause_intervals(&formula, Scalar::new(1, 2)).unwrap();
        assert_eq!(ivs[0].lower(), Scalar::new(1, 2));
        assert_eq!(ivs[0].upper(), Scalar::new(15, 2));
        // A unit clause still yields an open interval.
        assert!(ivs[1].is_open());
        assert_eq!(ivs[1].lower(), Scalar::new(9, 2));
        assert_eq!(ivs[1].upper(), Scalar::new(11, 2));
        assert!(clause_intervals(&formula, Scalar::zero()).is_err());
    }

    #[test]
    fn minimum_generation_is_deterministic_and_preprocessed() {
        let ivs = clause_intervals(&chain_formula(), Scalar::new(1, 2)).unwrap();
        let cfg = GenConfig::new(7, 6, 4, 2, Scalar::one()).unwrap();
        let a = gen_minimum_instance(&ivs, &cfg).unwrap();
        let b = gen_minimum_instance(&ivs, &cfg).unwrap();
        assert_eq!(
            serialize_instance(&a, None, None, None),
            serialize_instance(&b, None, None, None)
        );
        for set in a.sets() {
            let lm = set
                .iter()
                .copied()
                .min_by_key(|&i| (a.interval(i).lower(), a.interval(i).upper(), i))
                .unwrap();
            for &m in set {
                if m != lm {
                    assert!(!a.interval(lm).encloses(&a.interval(m)));
                }
            }
        }
        // Without path growth each root contributes at most one set.
        let flat = GenConfig::new(7, 6, 4, 0, Scalar::one()).unwrap();
        let c = gen_minimum_instance(&ivs, &flat).unwrap();
        assert!(c.sets().len() <= 6);
    }

    #[test]
    fn true_values_hit_their_bookkeeping() {
        let ivs = clause_intervals(&chain_formula(), Scalar::new(1, 2)).unwrap();
        let cfg = GenConfig::new(11, 6, 4, 2, Scalar::one()).unwrap();
        let instance = gen_minimum_instance(&ivs, &cfg).unwrap();
        let (real, stats) = gen_true_values(&instance, 11).unwrap();
        // The reported count must agree with an independent recount.
        assert_eq!(mandatory_set(&instance, &real).len(), stats.achieved);
        assert!(stats.achieved >= stats.standard_mandatory);
        let (again, _) = gen_true_values(&instance, 11).unwrap();
        assert_eq!(real, again);
        let (other, _) = gen_true_values(&instance, 12).unwrap();
        let _ = other;
    }

    #[test]
    fn predictions_cover_multiple_error_values() {
        let ivs = clause_intervals(&chain_formula(), Scalar::new(1, 2)).unwrap();
        let cfg = GenConfig::new(3, 8, 4, 2, Scalar::one()).unwrap();
        let instance = gen_minimum_instance(&ivs, &cfg).unwrap();
        let (real, _) = gen_true_values(&instance, 3).unwrap();
        let preds = gen_predictions(&instance, &real, &cfg).unwrap();
        let distinct: BTreeSet<usize> = preds.iter().map(|(_, r)| r.k_mqd).collect();
        assert!(distinct.len() >= 3, "only error values {distinct:?}");
        for (pred, report) in &preds {
            // Membership is checked by the constructor; the report must match
            // a from-scratch recomputation.
            assert_eq!(*report, compute_errors(&instance, &real, pred));
        }
        let again = gen_predictions(&instance, &real, &cfg).unwrap();
        assert_eq!(preds.len(), again.len());
        assert!(preds.iter().zip(&again).all(|(x, y)| x.0 == y.0));
    }

    #[test]
    fn tsplib_parser_reads_euclidean_files() {
        let text = "NAME : tiny\nTYPE : TSP\nDIMENSION : 3\nEDGE_WEIGHT_TYPE : EUC_2D\nNODE_COORD_SECTION\n1 0 0\n2 30 40\n3 0 40\nEOF\n";
        let graph = parse_tsplib(text).unwrap();
        assert_eq!(graph.coords.len(), 3);
        assert_eq!(euc_2d(graph.coords[0], graph.coords[1]), 50);
        let unsupported = text.replace("EUC_2D", "GEO");
        assert!(matches!(parse_tsplib(&unsupported), Err(GenError::Tsplib(_))));
        assert!(matches!(parse_tsplib("DIMENSION : 2\n"), Err(GenError::Tsplib(_))));
    }

    #[test]
    fn mst_generation_brackets_true_weights() {
        let graph = TspGraph {
            coords: vec![(0.0, 0.0), (10.0, 0.0), (0.0, 10.0), (10.0, 10.0), (5.0, 5.0)],
        };
        let cfg = GenConfig::new(5, 1, 2, 0, Scalar::new(1, 4)).unwrap();
        let (instance, real) = gen_mst_instance(&graph, &cfg).unwrap();
        let mst = instance.as_mst().unwrap();
        assert_eq!(mst.n_vertices(), 5);
        assert_eq!(mst.edges().len(), 10);
        for i in instance.element_ids() {
            let iv = instance.interval(i);
            assert!(iv.strictly_contains(real.value(i)));
        }
        let (again, real_again) = gen_mst_instance(&graph, &cfg).unwrap();
        assert_eq!(instance, again);
        assert_eq!(real, real_again);
        // A ratio below the quantization step is rejected.
        let narrow = GenConfig::new(5, 1, 2, 0, Scalar::new(1, 100_000)).unwrap();
        let close = TspGraph { coords: vec![(0.0, 0.0), (1.0, 0.0)] };
        assert!(matches!(gen_mst_instance(&close, &narrow), Err(GenError::Config(_))));
    }

    #[test]
    fn oversized_point_sets_are_cut_to_ninety() {
        let coords: Vec<(f64, f64)> =
            (0..95).map(|i| (f64::from(i % 10) * 7.0, f64::from(i / 10) * 9.0)).collect();
        let cfg = GenConfig::new(2, 1, 2, 0, Scalar::new(1, 10)).unwrap();
        let (instance, _) = gen_mst_instance(&TspGraph { coords }, &cfg).unwrap();
        let mst = instance.as_mst().unwrap();
        assert_eq!(mst.n_vertices(), 90);
        assert_eq!(mst.edges().len(), 90 * 89 / 2);
    }

    #[test]
    fn mst_predictions_stay_inside_their_intervals() {
        let graph =
            TspGraph { coords: vec![(0.0, 0.0), (12.0, 0.0), (0.0, 9.0), (12.0, 9.0)] };
        let cfg = GenConfig::new(9, 1, 2, 0, Scalar::new(1, 2)).unwrap().binning(4, 3).unwrap();
        let (instance, real) = gen_mst_instance(&graph, &cfg).unwrap();
        let preds = gen_mst_predictions(&instance, &real, &cfg).unwrap();
        assert_eq!(preds.len(), 12);
        for (pred, _) in &preds {
            for i in instance.element_ids() {
                assert!(instance.interval(i).strictly_contains(pred.value(i)));
            }
        }
        let again = gen_mst_predictions(&instance, &real, &cfg).unwrap();
        assert!(preds.iter().zip(&again).all(|(x, y)| x.0 == y.0));
    }

    #[test]
    fn generated_instances_round_trip_serialization() {
        let ivs = clause_intervals(&chain_formula(), Scalar::new(1, 2)).unwrap();
        let cfg = GenConfig::new(4, 5, 4, 1, Scalar::new(1, 2)).unwrap();
        let instance = gen_minimum_instance(&ivs, &cfg).unwrap();
        let (real, _) = gen_true_values(&instance, 4).unwrap();
        let text = serialize_instance(&instance, Some(&real), None, None);
        let parsed = parse_instance(&text).unwrap();
        assert_eq!(serialize_instance(&parsed.instance, parsed.realization.as_ref(), None, None), text);

        let graph = TspGraph { coords: vec![(0.0, 0.0), (8.0, 0.0), (4.0, 6.0)] };
        let (mi, mr) = gen_mst_instance(&graph, &cfg).unwrap();
        let mtext = serialize_instance(&mi, Some(&mr), None, None);
        let mparsed = parse_instance(&mtext).unwrap();
        assert_eq!(
            serialize_instance(&mparsed.instance, mparsed.realization.as_ref(), None, None),
            mtext
        );
    }
}
