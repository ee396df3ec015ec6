//! Problem instances: elements with uncertainty intervals arranged into
//! overlapping sets (minimum, sorting) or edges of a graph (spanning tree),
//! plus validated true-value and predicted-value assignments.

use crate::interval::{IntervalError, UncertaintyInterval};
use crate::scalar::Scalar;
use std::fmt;

/// Index of an element (an interval, or an edge for spanning-tree instances).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ElementId(pub u32);

impl ElementId {
    pub fn idx(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for ElementId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Debug for ElementId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("instance has no elements")]
    NoElements,
    #[error("set {set} is empty")]
    EmptySet { set: usize },
    #[error("set {set} references element {id} but the instance has {n} elements")]
    SetMemberOutOfRange { set: usize, id: u32, n: usize },
    #[error("edge {edge} references vertex {vertex} but the graph has {n} vertices")]
    EdgeEndpointOutOfRange { edge: usize, vertex: usize, n: usize },
    #[error("edge {edge} is a self-loop at vertex {vertex}")]
    SelfLoop { edge: usize, vertex: usize },
    #[error("graph is not connected")]
    Disconnected,
    #[error("expected {expected} values, got {got}")]
    ValueCountMismatch { expected: usize, got: usize },
    #[error("element {id}: {source}")]
    BadValue { id: u32, source: IntervalError },
    #[error(transparent)]
    BadInterval(#[from] IntervalError),
}

/// Shared layout of the set-based problems: intervals plus subsets of element
/// indices. Sets are stored sorted and deduplicated.
#[derive(Clone, PartialEq, Eq)]
struct SetSystem {
    intervals: Vec<UncertaintyInterval>,
    sets: Vec<Vec<ElementId>>,
    // sets_of[i] lists the indices of the sets containing element i.
    sets_of: Vec<Vec<usize>>,
}

impl SetSystem {
    fn new(
        intervals: Vec<UncertaintyInterval>,
        sets: Vec<Vec<ElementId>>,
    ) -> Result<Self, ModelError> {
        if intervals.is_empty() {
            return Err(ModelError::NoElements);
        }
        let n = intervals.len();
        let mut normalized = Vec::with_capacity(sets.len());
        for (s, members) in sets.into_iter().enumerate() {
            if members.is_empty() {
                return Err(ModelError::EmptySet { set: s });
            }
            let mut members = members;
            members.sort();
            members.dedup();
            for &id in &members {
                if id.idx() >= n {
                    return Err(ModelError::SetMemberOutOfRange { set: s, id: id.0, n });
                }
            }
            normalized.push(members);
        }
        let mut sets_of = vec![Vec::new(); n];
        for (s, members) in normalized.iter().enumerate() {
            for &id in members {
                sets_of[id.idx()].push(s);
            }
        }
        Ok(SetSystem { intervals, sets: normalized, sets_of })
    }
}

/// Minimum problem: for every set, determine an element whose true value is a
/// minimum of that set, querying as few open intervals as possible.
#[derive(Clone, PartialEq, Eq)]
pub struct MinimumInstance {
    system: SetSystem,
}

impl MinimumInstance {
    pub fn new(
        intervals: Vec<UncertaintyInterval>,
        sets: Vec<Vec<ElementId>>,
    ) -> Result<Self, ModelError> {
        Ok(MinimumInstance { system: SetSystem::new(intervals, sets)? })
    }
}

/// Sorting problem: for every set, determine the order of the true values of
/// its elements, i.e. make every pair of co-members comparable.
#[derive(Clone, PartialEq, Eq)]
pub struct SortingInstance {
    system: SetSystem,
}

impl SortingInstance {
    pub fn new(
        intervals: Vec<UncertaintyInterval>,
        sets: Vec<Vec<ElementId>>,
    ) -> Result<Self, ModelError> {
        Ok(SortingInstance { system: SetSystem::new(intervals, sets)? })
    }
}

/// Undirected edge of a spanning-tree instance. Parallel edges are allowed;
/// self-loops are not.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct MstEdge {
    pub u: usize,
    pub v: usize,
}

/// Spanning-tree problem: edge weights are uncertain, and the goal is to
/// determine the edge set of a minimum spanning tree (not necessarily the
/// exact weights). Element `i` is edge `i`.
#[derive(Clone, PartialEq, Eq)]
pub struct MstInstance {
    n_vertices: usize,
    intervals: Vec<UncertaintyInterval>,
    edges: Vec<MstEdge>,
}

impl MstInstance {
    pub fn new(
        n_vertices: usize,
        intervals: Vec<UncertaintyInterval>,
        edges: Vec<MstEdge>,
    ) -> Result<Self, ModelError> {
        if intervals.is_empty() {
            return Err(ModelError::NoElements);
        }
        if intervals.len() != edges.len() {
            return Err(ModelError::ValueCountMismatch {
                expected: edges.len(),
                got: intervals.len(),
            });
        }
        for (e, edge) in edges.iter().enumerate() {
            for vertex in [edge.u, edge.v] {
                if vertex >= n_vertices {
                    return Err(ModelError::EdgeEndpointOutOfRange { edge: e, vertex, n: n_vertices });
                }
            }
            if edge.u == edge.v {
                return Err(ModelError::SelfLoop { edge: e, vertex: edge.u });
            }
        }
        // Connectivity via union-find; a spanning tree must exist.
        let mut parent: Vec<usize> = (0..n_vertices).collect();
        fn find(parent: &mut Vec<usize>, mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        let mut components = n_vertices;
        for edge in &edges {
            let (ru, rv) = (find(&mut parent, edge.u), find(&mut parent, edge.v));
            if ru != rv {
                parent[ru] = rv;
                components -= 1;
            }
        }
        if components != 1 {
            return Err(ModelError::Disconnected);
        }
        Ok(MstInstance { n_vertices, intervals, edges })
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn edges(&self) -> &[MstEdge] {
        &self.edges
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ProblemKind {
    Minimum,
    Sorting,
    Mst,
}

/// Any of the three supported problems behind one interface: elements are
/// numbered `0..n_elements` and carry uncertainty intervals regardless of
/// whether they live in sets or on graph edges.
#[derive(Clone, PartialEq, Eq)]
pub enum ProblemInstance {
    Minimum(MinimumInstance),
    Sorting(SortingInstance),
    Mst(MstInstance),
}

impl ProblemInstance {
    pub fn kind(&self) -> ProblemKind {
        match self {
            ProblemInstance::Minimum(_) => ProblemKind::Minimum,
            ProblemInstance::Sorting(_) => ProblemKind::Sorting,
            ProblemInstance::Mst(_) => ProblemKind::Mst,
        }
    }

    pub fn n_elements(&self) -> usize {
        self.intervals().len()
    }

    pub fn intervals(&self) -> &[UncertaintyInterval] {
        match self {
            ProblemInstance::Minimum(m) => &m.system.intervals,
            ProblemInstance::Sorting(s) => &s.system.intervals,
            ProblemInstance::Mst(m) => &m.intervals,
        }
    }

    pub fn interval(&self, id: ElementId) -> UncertaintyInterval {
        self.intervals()[id.idx()]
    }

    pub fn element_ids(&self) -> impl Iterator<Item = ElementId> {
        (0..self.n_elements() as u32).map(ElementId)
    }

    /// The element sets of a minimum or sorting instance. Empty for MST.
    pub fn sets(&self) -> &[Vec<ElementId>] {
        match self {
            ProblemInstance::Minimum(m) => &m.system.sets,
            ProblemInstance::Sorting(s) => &s.system.sets,
            ProblemInstance::Mst(_) => &[],
        }
    }

    /// Indices into [`sets`](Self::sets) of the sets containing `id`.
    /// Empty for MST.
    pub fn sets_containing(&self, id: ElementId) -> &[usize] {
        match self {
            ProblemInstance::Minimum(m) => &m.system.sets_of[id.idx()],
            ProblemInstance::Sorting(s) => &s.system.sets_of[id.idx()],
            ProblemInstance::Mst(_) => &[],
        }
    }

    pub fn as_mst(&self) -> Option<&MstInstance> {
        match self {
            ProblemInstance::Mst(m) => Some(m),
            _ => None,
        }
    }
}

fn validate_values(
    instance: &ProblemInstance,
    values: &[Scalar],
) -> Result<(), ModelError> {
    if values.len() != instance.n_elements() {
        return Err(ModelError::ValueCountMismatch {
            expected: instance.n_elements(),
            got: values.len(),
        });
    }
    for (i, (&value, interval)) in values.iter().zip(instance.intervals()).enumerate() {
        interval
            .admits(value)
            .map_err(|source| ModelError::BadValue { id: i as u32, source })?;
    }
    Ok(())
}

/// The hidden true values, one per element, each strictly inside its open
/// interval (or equal to its trivial value).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Realization(Vec<Scalar>);

impl Realization {
    pub fn new(instance: &ProblemInstance, values: Vec<Scalar>) -> Result<Self, ModelError> {
        validate_values(instance, &values)?;
        Ok(Realization(values))
    }

    pub fn value(&self, id: ElementId) -> Scalar {
        self.0[id.idx()]
    }

    pub fn values(&self) -> &[Scalar] {
        &self.0
    }
}

/// Untrusted predicted values, subject to the same membership constraints as
/// true values.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Prediction(Vec<Scalar>);

impl Prediction {
    pub fn new(instance: &ProblemInstance, values: Vec<Scalar>) -> Result<Self, ModelError> {
        validate_values(instance, &values)?;
        Ok(Prediction(values))
    }

    pub fn value(&self, id: ElementId) -> Scalar {
        self.0[id.idx()]
    }

    pub fn values(&self) -> &[Scalar] {
        &self.0
    }

    /// Treats the predicted values as if they were true values, which is how
    /// algorithms simulate the predicted world.
    pub fn as_realization(&self, instance: &ProblemInstance) -> Realization {
        Realization::new(instance, self.0.clone())
            .expect("prediction values satisfy the same constraints as realizations")
    }
}

impl fmt::Debug for ProblemInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProblemInstance::Minimum(m) => {
                write!(f, "Minimum({} elements, {} sets)", m.system.intervals.len(), m.system.sets.len())
            }
            ProblemInstance::Sorting(s) => {
                write!(f, "Sorting({} elements, {} sets)", s.system.intervals.len(), s.system.sets.len())
            }
            ProblemInstance::Mst(m) => {
                write!(f, "Mst({} vertices, {} edges)", m.n_vertices, m.edges.len())
            }
        }
    }
}
