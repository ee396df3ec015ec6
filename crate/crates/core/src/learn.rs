//! Learning predictions from samples: hypothesis discretization, empirical
//! risk minimization for the hop distance and for mandatory-set membership,
//! and sample-complexity estimates.

use crate::measures::{element_hops, interaction_set};
use crate::model::{ElementId, Prediction, ProblemInstance, Realization};
use crate::scalar::Scalar;
use crate::verify::mandatory_set;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum LearnError {
    #[error("distribution for element {0} is empty")]
    EmptySupport(ElementId),
    #[error("element {0} is trivial and has no hypotheses")]
    TrivialElement(ElementId),
    #[error("distribution for element {id} has non-positive probability {prob}")]
    NonPositiveProbability { id: ElementId, prob: Scalar },
    #[error("distribution for element {id} sums to {total}, expected 1")]
    BadTotal { id: ElementId, total: Scalar },
    #[error("distribution for element {id} contains duplicate value {value}")]
    DuplicateValue { id: ElementId, value: Scalar },
    #[error("distribution value {value} is not admissible for element {id}")]
    InadmissibleValue { id: ElementId, value: Scalar },
    #[error("expected {expected} distributions, got {got}")]
    CountMismatch { expected: usize, got: usize },
    #[error("training set is empty")]
    NoSamples,
    #[error("invalid parameter: {0}")]
    BadParameter(&'static str),
}

/// Discrete distribution over the possible true values of one element.
/// Values are kept sorted; probabilities are exact rationals summing to one.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ValueDistribution {
    support: Vec<(Scalar, Scalar)>,
}

impl ValueDistribution {
    pub fn new(mut support: Vec<(Scalar, Scalar)>) -> Result<Self, LearnError> {
        // Element context is checked by `validate_for`; structural checks here.
        if support.is_empty() {
            return Err(LearnError::EmptySupport(ElementId(0)));
        }
        support.sort_by(|a, b| a.0.cmp(&b.0));
        Ok(ValueDistribution { support })
    }

    pub fn support(&self) -> &[(Scalar, Scalar)] {
        &self.support
    }

    /// Full validation against the element it describes.
    pub fn validate_for(&self, instance: &ProblemInstance, id: ElementId) -> Result<(), LearnError> {
        if self.support.is_empty() {
            return Err(LearnError::EmptySupport(id));
        }
        let mut total = Scalar::zero();
        for window in self.support.windows(2) {
            if window[0].0 == window[1].0 {
                return Err(LearnError::DuplicateValue { id, value: window[0].0 });
            }
        }
        for &(value, prob) in &self.support {
            if prob <= Scalar::zero() {
                return Err(LearnError::NonPositiveProbability { id, prob });
            }
            if instance.interval(id).admits(value).is_err() {
                return Err(LearnError::InadmissibleValue { id, value });
            }
            total += prob;
        }
        if total != Scalar::one() {
            return Err(LearnError::BadTotal { id, total });
        }
        Ok(())
    }
}

/// Validates a full family of per-element distributions for an instance.
pub fn validate_distributions(
    instance: &ProblemInstance,
    dists: &[ValueDistribution],
) -> Result<(), LearnError> {
    if dists.len() != instance.n_elements() {
        return Err(LearnError::CountMismatch {
            expected: instance.n_elements(),
            got: dists.len(),
        });
    }
    for (i, dist) in dists.iter().enumerate() {
        dist.validate_for(instance, ElementId(i as u32))?;
    }
    Ok(())
}

/// A bag of sampled realizations the learners train on.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TrainingSet {
    samples: Vec<Realization>,
}

impl TrainingSet {
    pub fn new(samples: Vec<Realization>) -> Result<Self, LearnError> {
        if samples.is_empty() {
            return Err(LearnError::NoSamples);
        }
        Ok(TrainingSet { samples })
    }

    pub fn samples(&self) -> &[Realization] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// Draws `m` independent realizations from the per-element distributions,
/// reproducibly for a given seed.
pub fn sample_realizations(
    instance: &ProblemInstance,
    dists: &[ValueDistribution],
    m: usize,
    seed: u64,
) -> Result<TrainingSet, LearnError> {
    validate_distributions(instance, dists)?;
    if m == 0 {
        return Err(LearnError::NoSamples);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples = Vec::with_capacity(m);
    for _ in 0..m {
        let mut values = Vec::with_capacity(dists.len());
        for dist in dists {
            let draw: f64 = rng.gen();
            let mut acc = 0.0;
            let mut picked = dist.support[dist.support.len() - 1].0;
            for &(value, prob) in &dist.support {
                acc += prob.to_f64();
                if draw < acc {
                    picked = value;
                    break;
                }
            }
            values.push(picked);
        }
        let real = Realization::new(instance, values)
            .expect("validated distributions only produce admissible values");
        samples.push(real);
    }
    TrainingSet::new(samples)
}

/// The finite hypothesis set for element `i`: every neighbouring interval
/// boundary strictly inside `I_i`, plus the midpoint of each gap between
/// consecutive boundaries (the interval's own limits included as gap ends).
pub fn discretize_hypotheses(
    instance: &ProblemInstance,
    i: ElementId,
) -> Result<Vec<Scalar>, LearnError> {
    let own = instance.interval(i);
    if own.is_trivial() {
        return Err(LearnError::TrivialElement(i));
    }
    let mut inner: BTreeSet<Scalar> = BTreeSet::new();
    for j in interaction_set(instance, i) {
        let other = instance.interval(j);
        for b in [other.lower(), other.upper()] {
            if own.strictly_contains(b) {
                inner.insert(b);
            }
        }
    }
    let mut cells = vec![own.lower()];
    cells.extend(inner.iter().copied());
    cells.push(own.upper());
    let mut out: Vec<Scalar> = inner.into_iter().collect();
    for pair in cells.windows(2) {
        out.push(Scalar::midpoint(pair[0], pair[1]));
    }
    out.sort();
    Ok(out)
}

/// Learns a prediction by minimizing the empirical per-element hop error on
/// the hypothesis set, element by element. Ties go to the smallest
/// candidate; trivial elements keep their value.
pub fn erm_hop(instance: &ProblemInstance, training: &TrainingSet) -> Result<Prediction, LearnError> {
    let mut values = Vec::with_capacity(instance.n_elements());
    for i in instance.element_ids() {
        let interval = instance.interval(i);
        if interval.is_trivial() {
            values.push(interval.lower());
            continue;
        }
        let mut best: Option<(usize, Scalar)> = None;
        for cand in discretize_hypotheses(instance, i)? {
            let err: usize = training
                .samples()
                .iter()
                .map(|sample| element_hops(instance, i, sample.value(i), cand))
                .sum();
            if best.map_or(true, |(b, _)| err < b) {
                best = Some((err, cand));
            }
        }
        let (_, value) = best.expect("open intervals always have a midpoint hypothesis");
        values.push(value);
    }
    Ok(Prediction::new(instance, values).expect("hypotheses are admissible"))
}

/// Learns a predicted mandatory set by per-element majority vote over the
/// samples' mandatory sets, which minimizes the empirical symmetric
/// difference over all subsets.
pub fn erm_mandatory(
    instance: &ProblemInstance,
    training: &TrainingSet,
) -> Result<Vec<ElementId>, LearnError> {
    let mut votes = vec![0usize; instance.n_elements()];
    for sample in training.samples() {
        for i in mandatory_set(instance, sample) {
            votes[i.idx()] += 1;
        }
    }
    let m = training.len();
    Ok(instance.element_ids().filter(|i| 2 * votes[i.idx()] >= m).collect())
}

/// Which error measure a sample-size estimate targets. The hop bound needs
/// the largest per-element hypothesis count.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ErrorMeasureKind {
    Hop { h_max: usize },
    Mqd,
}

/// Advisory training-set size for learning within additive error `eps` with
/// probability `1 - delta`, from the explicit Hoeffding-style ceilings.
pub fn sample_complexity(
    eps: f64,
    delta: f64,
    n: usize,
    measure: ErrorMeasureKind,
) -> Result<u64, LearnError> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(LearnError::BadParameter("eps must lie in (0, 1)"));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(LearnError::BadParameter("delta must lie in (0, 1)"));
    }
    if n == 0 {
        return Err(LearnError::BadParameter("n must be positive"));
    }
    let n = n as f64;
    let m = match measure {
        ErrorMeasureKind::Hop { h_max } => {
            if h_max == 0 {
                return Err(LearnError::BadParameter("h_max must be positive"));
            }
            let per_element = eps / n;
            2.0 * (2.0 * h_max as f64 * n / delta).ln() * (2.0 * n).powi(2) / per_element.powi(2)
        }
        ErrorMeasureKind::Mqd => {
            2.0 * ((n + 1.0) * std::f64::consts::LN_2 - delta.ln()) * n.powi(2) / eps.powi(2)
        }
    };
    Ok(m.ceil() as u64)
}
