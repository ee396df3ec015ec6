//! Hand-built adversarial constructions and worked examples with pinned
//! predictions and true values, for minimum, sorting, and spanning-tree runs.

use crate::gen::GenError;
use crate::interval::UncertaintyInterval;
use crate::learn::ValueDistribution;
use crate::model::{
    ElementId, MinimumInstance, MstEdge, MstInstance, Prediction, ProblemInstance, ProblemKind,
    Realization, SortingInstance,
};
use crate::scalar::Scalar;

/// One pinned construction: instance, prediction, and the adversary branch
/// realization the bound argument commits to.
#[derive(Clone)]
pub struct Fixture {
    pub instance: ProblemInstance,
    pub prediction: Prediction,
    pub realization: Realization,
}

/// Parameterized families of tight lower-bound constructions. All coordinates
/// sit on half-integers so every containment below is strict.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum FixtureKind {
    /// `beta` right intervals over one left interval: an algorithm trusting
    /// the predictions must clear the right side first, and the adversary then
    /// drops the last right value into the left interval. Trades a consistency
    /// of `1 + 1/beta` against a robustness of `beta + 1`.
    ConsistencyTradeoff { beta: u32 },
    /// `n` left and `n` right intervals with a single wrong prediction; every
    /// deterministic algorithm pays twice the optimum.
    WrongPredictions { n: u32 },
    /// `a` intervals split `b` left and `a - b` right. In the pinned branch
    /// all right-side predictions are correct and the mandatory sets coincide,
    /// so the mandatory-distance error is zero.
    MqdTradeoff { a: u32, b: u32 },
    /// Disjoint two-interval traps where one query is optimal but the
    /// prediction is off by one in every error measure, forcing a second.
    ErrorMeasure { copies: u32 },
}

fn halves(numer: i64) -> Scalar {
    Scalar::new(numer, 2)
}

fn open(lower: i64, upper: i64) -> UncertaintyInterval {
    UncertaintyInterval::open(Scalar::int(lower), Scalar::int(upper))
        .expect("fixture endpoints are ordered")
}

fn assemble(
    instance: ProblemInstance,
    pred: Vec<Scalar>,
    real: Vec<Scalar>,
) -> Result<Fixture, GenError> {
    let prediction =
        Prediction::new(&instance, pred).map_err(|e| GenError::Fixture(e.to_string()))?;
    let realization =
        Realization::new(&instance, real).map_err(|e| GenError::Fixture(e.to_string()))?;
    Ok(Fixture { instance, prediction, realization })
}

fn set_instance(
    problem: ProblemKind,
    intervals: Vec<UncertaintyInterval>,
    sets: Vec<Vec<ElementId>>,
) -> Result<ProblemInstance, GenError> {
    match problem {
        ProblemKind::Minimum => MinimumInstance::new(intervals, sets)
            .map(ProblemInstance::Minimum)
            .map_err(|e| GenError::Fixture(e.to_string())),
        ProblemKind::Sorting => SortingInstance::new(intervals, sets)
            .map(ProblemInstance::Sorting)
            .map_err(|e| GenError::Fixture(e.to_string())),
        ProblemKind::Mst => unreachable!("spanning-tree fixtures are built edge by edge"),
    }
}

// Path of `path` edges plus `parallel` extra edges between the path endpoints,
// the shape shared by all spanning-tree translations. Edge ids number the path
// first.
fn path_with_parallels(
    path: usize,
    parallel: usize,
    path_iv: UncertaintyInterval,
    parallel_iv: UncertaintyInterval,
) -> Result<MstInstance, GenError> {
    let mut intervals = vec![path_iv; path];
    intervals.extend(std::iter::repeat(parallel_iv).take(parallel));
    let mut edges: Vec<MstEdge> = (0..path).map(|j| MstEdge { u: j, v: j + 1 }).collect();
    edges.extend(std::iter::repeat(MstEdge { u: 0, v: path }).take(parallel));
    MstInstance::new(path + 1, intervals, edges).map_err(|e| GenError::Fixture(e.to_string()))
}

/// Builds the requested construction for the requested problem. The
/// spanning-tree versions mirror the interval coordinates (maxima take the
/// role of minima) and realize the set structure as a path with parallel
/// edges, or as a single cycle for the consistency trade-off.
pub fn lower_bound_fixture(kind: FixtureKind, problem: ProblemKind) -> Result<Fixture, GenError> {
    match kind {
        FixtureKind::ConsistencyTradeoff { beta } => consistency_tradeoff(beta, problem),
        FixtureKind::WrongPredictions { n } => wrong_predictions(n, problem),
        FixtureKind::MqdTradeoff { a, b } => mqd_tradeoff(a, b, problem),
        FixtureKind::ErrorMeasure { copies } => error_measure(copies, problem),
    }
}

fn consistency_tradeoff(beta: u32, problem: ProblemKind) -> Result<Fixture, GenError> {
    if beta < 2 {
        return Err(GenError::Fixture("beta must be at least 2".into()));
    }
    let beta = beta as usize;
    if let ProblemKind::Mst = problem {
        // A single cycle; the left interval becomes the unique heavy edge.
        let mut intervals = vec![open(1, 3)];
        intervals.extend(std::iter::repeat(open(0, 2)).take(beta));
        let edges: Vec<MstEdge> =
            (0..=beta).map(|i| MstEdge { u: i, v: (i + 1) % (beta + 1) }).collect();
        let instance = MstInstance::new(beta + 1, intervals, edges)
            .map(ProblemInstance::Mst)
            .map_err(|e| GenError::Fixture(e.to_string()))?;
        let mut pred = vec![halves(3)];
        pred.extend(std::iter::repeat(halves(1)).take(beta));
        let mut real = vec![halves(5)];
        real.extend(std::iter::repeat(halves(1)).take(beta - 1));
        real.push(halves(3));
        return assemble(instance, pred, real);
    }
    let mut intervals = vec![open(0, 2)];
    intervals.extend(std::iter::repeat(open(1, 3)).take(beta));
    let sets = match problem {
        ProblemKind::Minimum => vec![(0..=beta as u32).map(ElementId).collect()],
        ProblemKind::Sorting => {
            (1..=beta as u32).map(|i| vec![ElementId(0), ElementId(i)]).collect()
        }
        ProblemKind::Mst => unreachable!(),
    };
    let instance = set_instance(problem, intervals, sets)?;
    let mut pred = vec![halves(3)];
    pred.extend(std::iter::repeat(halves(5)).take(beta));
    let mut real = vec![halves(1)];
    real.extend(std::iter::repeat(halves(5)).take(beta - 1));
    real.push(halves(3));
    assemble(instance, pred, real)
}

fn wrong_predictions(n: u32, problem: ProblemKind) -> Result<Fixture, GenError> {
    if n < 1 {
        return Err(GenError::Fixture("n must be at least 1".into()));
    }
    let n = n as usize;
    if let ProblemKind::Mst = problem {
        let instance = ProblemInstance::Mst(path_with_parallels(n, n, open(0, 2), open(1, 3))?);
        let mut pred = vec![halves(1); n];
        pred.extend(std::iter::repeat(halves(5)).take(n));
        let mut real = pred.clone();
        real[2 * n - 1] = halves(3);
        return assemble(instance, pred, real);
    }
    let mut intervals = vec![open(0, 2); n];
    intervals.extend(std::iter::repeat(open(1, 3)).take(n));
    let rights: Vec<ElementId> = (n as u32..2 * n as u32).map(ElementId).collect();
    let sets = match problem {
        ProblemKind::Minimum => (0..n as u32)
            .map(|i| {
                let mut s = vec![ElementId(i)];
                s.extend(&rights);
                s
            })
            .collect(),
        ProblemKind::Sorting => (0..n as u32)
            .flat_map(|i| rights.iter().map(move |&j| vec![ElementId(i), j]))
            .collect(),
        ProblemKind::Mst => unreachable!(),
    };
    let instance = set_instance(problem, intervals, sets)?;
    let mut pred = vec![halves(1); n];
    pred.extend(std::iter::repeat(halves(5)).take(n));
    let mut real = pred.clone();
    real[n - 1] = halves(3);
    assemble(instance, pred, real)
}

fn mqd_tradeoff(a: u32, b: u32, problem: ProblemKind) -> Result<Fixture, GenError> {
    if b < 1 || a < 2 * b {
        return Err(GenError::Fixture("parameters must satisfy a >= 2b > 0".into()));
    }
    let (a, b) = (a as usize, b as usize);
    if let ProblemKind::Mst = problem {
        let mst = path_with_parallels(a - b, b, open(0, 2), open(1, 3))?;
        let instance = ProblemInstance::Mst(mst);
        let mut pred = vec![halves(1); a - b];
        pred.extend(std::iter::repeat(halves(3)).take(b));
        let mut real = vec![halves(1); a - b];
        real.extend(std::iter::repeat(halves(5)).take(b - 1));
        real.push(halves(3));
        return assemble(instance, pred, real);
    }
    let mut intervals = vec![open(0, 2); b];
    intervals.extend(std::iter::repeat(open(1, 3)).take(a - b));
    let rights: Vec<ElementId> = (b as u32..a as u32).map(ElementId).collect();
    let sets = match problem {
        ProblemKind::Minimum => (0..b as u32)
            .map(|i| {
                let mut s = vec![ElementId(i)];
                s.extend(&rights);
                s
            })
            .collect(),
        ProblemKind::Sorting => (0..b as u32)
            .flat_map(|i| rights.iter().map(move |&j| vec![ElementId(i), j]))
            .collect(),
        ProblemKind::Mst => unreachable!(),
    };
    let instance = set_instance(problem, intervals, sets)?;
    let mut pred = vec![halves(3); b];
    pred.extend(std::iter::repeat(halves(5)).take(a - b));
    let mut real = vec![halves(1); b - 1];
    real.push(halves(3));
    real.extend(std::iter::repeat(halves(5)).take(a - b));
    assemble(instance, pred, real)
}

fn error_measure(copies: u32, problem: ProblemKind) -> Result<Fixture, GenError> {
    if copies < 1 {
        return Err(GenError::Fixture("at least one copy is required".into()));
    }
    let copies = copies as usize;
    if let ProblemKind::Mst = problem {
        // Chained two-edge cycles; each copy is its own trap.
        let mut intervals = Vec::with_capacity(2 * copies);
        let mut edges = Vec::with_capacity(2 * copies);
        for t in 0..copies {
            intervals.push(open(1, 3));
            intervals.push(open(0, 2));
            edges.push(MstEdge { u: t, v: t + 1 });
            edges.push(MstEdge { u: t, v: t + 1 });
        }
        let instance = MstInstance::new(copies + 1, intervals, edges)
            .map(ProblemInstance::Mst)
            .map_err(|e| GenError::Fixture(e.to_string()))?;
        let pred = vec![halves(3); 2 * copies];
        let real: Vec<Scalar> =
            (0..2 * copies).map(|i| if i % 2 == 0 { halves(3) } else { halves(1) }).collect();
        return assemble(instance, pred, real);
    }
    let mut intervals = Vec::with_capacity(2 * copies);
    let mut sets = Vec::with_capacity(copies);
    for t in 0..copies as u32 {
        intervals.push(open(0, 2));
        intervals.push(open(1, 3));
        sets.push(vec![ElementId(2 * t), ElementId(2 * t + 1)]);
    }
    let instance = set_instance(problem, intervals, sets)?;
    let pred = vec![halves(3); 2 * copies];
    let real: Vec<Scalar> =
        (0..2 * copies).map(|i| if i % 2 == 0 { halves(3) } else { halves(5) }).collect();
    assemble(instance, pred, real)
}

/// Four intervals in one set where the predicted values are wrong on every
/// element: five hops in total, yet the mandatory set shifts by only one.
pub fn running_example() -> Fixture {
    let instance = ProblemInstance::Minimum(
        MinimumInstance::new(
            vec![
                UncertaintyInterval::open(Scalar::int(0), Scalar::int(4)).unwrap(),
                UncertaintyInterval::open(Scalar::new(3, 2), Scalar::int(6)).unwrap(),
                UncertaintyInterval::open(Scalar::new(5, 2), Scalar::int(6)).unwrap(),
                UncertaintyInterval::open(Scalar::int(3), Scalar::int(6)).unwrap(),
            ],
            vec![vec![ElementId(0), ElementId(1), ElementId(2), ElementId(3)]],
        )
        .expect("the example is well formed"),
    );
    let realization = Realization::new(
        &instance,
        vec![Scalar::new(11, 4), Scalar::int(2), Scalar::new(11, 2), Scalar::new(15, 4)],
    )
    .expect("true values lie inside");
    let prediction = Prediction::new(
        &instance,
        vec![Scalar::int(1), Scalar::new(9, 2), Scalar::new(9, 2), Scalar::new(13, 4)],
    )
    .expect("predicted values lie inside");
    Fixture { instance, prediction, realization }
}

/// Four intervals in one set where the predictions pin element 0 as the
/// minimum but the true values leave element 1 inside element 0's interval.
pub fn prediction_example() -> Fixture {
    let instance = ProblemInstance::Minimum(
        MinimumInstance::new(
            vec![
                UncertaintyInterval::open(Scalar::int(0), Scalar::int(4)).unwrap(),
                UncertaintyInterval::open(Scalar::new(3, 2), Scalar::int(6)).unwrap(),
                UncertaintyInterval::open(Scalar::new(5, 2), Scalar::int(6)).unwrap(),
                UncertaintyInterval::open(Scalar::int(3), Scalar::int(6)).unwrap(),
            ],
            vec![vec![ElementId(0), ElementId(1), ElementId(2), ElementId(3)]],
        )
        .expect("the example is well formed"),
    );
    let realization = Realization::new(
        &instance,
        vec![Scalar::int(1), Scalar::new(11, 2), Scalar::new(11, 2), Scalar::new(11, 2)],
    )
    .expect("true values lie inside");
    let prediction = Prediction::new(
        &instance,
        vec![Scalar::int(1), Scalar::new(13, 4), Scalar::new(13, 4), Scalar::new(13, 4)],
    )
    .expect("predicted values lie inside");
    Fixture { instance, prediction, realization }
}

/// Five-interval chain with an independent two-point value distribution per
/// element. The best prediction-mandatory set in expectation is {0, 2, 4}
/// even though no single value vector realizes it.
pub fn distribution_example() -> (ProblemInstance, Vec<ValueDistribution>) {
    let instance = ProblemInstance::Minimum(
        MinimumInstance::new(
            vec![open(0, 3), open(2, 5), open(4, 7), open(6, 9), open(8, 11)],
            (0..4).map(|i| vec![ElementId(i), ElementId(i + 1)]).collect(),
        )
        .expect("the chain is well formed"),
    );
    let p = |n: i64| Scalar::new(n, 100);
    let dists = vec![
        ValueDistribution::new(vec![(Scalar::int(1), Scalar::one())]),
        ValueDistribution::new(vec![(halves(5), p(51)), (halves(9), p(49))]),
        ValueDistribution::new(vec![(halves(11), Scalar::one())]),
        ValueDistribution::new(vec![(halves(13), p(49)), (halves(17), p(51))]),
        ValueDistribution::new(vec![(Scalar::int(10), Scalar::one())]),
    ]
    .into_iter()
    .map(|d| d.expect("probabilities sum to one"))
    .collect();
    (instance, dists)
}
