//! Minimum vertex cover solvers for the dependency graphs produced by the
//! offline verifiers and the online algorithms: exact branch-and-bound for
//! general graphs, maximum matching plus König's construction for bipartite
//! graphs, and a right-endpoint greedy for interval graphs.

use crate::model::ElementId;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum VcError {
    #[error("connected component with {size} vertices exceeds the exact-solver limit of 64")]
    ComponentTooLarge { size: usize },
    #[error("vertex {0} out of range")]
    VertexOutOfRange(usize),
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("interval-order data must list every vertex exactly once")]
    BadOrder,
    #[error("graph is not bipartite with the given sides")]
    NotBipartite,
}

/// Which specialized solver is valid for the graph.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum VcKind {
    /// No special structure; solved exactly by branch-and-bound.
    General,
    /// Two-colorable with the given side assignment; solved via König's
    /// theorem. `left[v]` marks the side of vertex `v`.
    Bipartite { left: Vec<bool> },
    /// Interval graph; `order` lists all vertices by increasing right
    /// endpoint of their intervals. Solved as complement of a greedy
    /// maximum independent set.
    IntervalOrder { order: Vec<usize> },
}

/// A vertex cover instance over local vertex indices `0..labels.len()`, where
/// `labels[v]` names the element the vertex stands for.
#[derive(Clone, Debug)]
pub struct VcInstance {
    pub labels: Vec<ElementId>,
    pub adj: Vec<Vec<usize>>,
    pub kind: VcKind,
}

impl VcInstance {
    /// Builds an instance from an undirected edge list. Duplicate edges are
    /// merged; adjacency lists come out sorted, which keeps every solver
    /// deterministic.
    pub fn new(
        labels: Vec<ElementId>,
        edges: &[(usize, usize)],
        kind: VcKind,
    ) -> Result<Self, VcError> {
        let n = labels.len();
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n {
                return Err(VcError::VertexOutOfRange(u));
            }
            if v >= n {
                return Err(VcError::VertexOutOfRange(v));
            }
            if u == v {
                return Err(VcError::SelfLoop(u));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        match &kind {
            VcKind::Bipartite { left } => {
                if left.len() != n {
                    return Err(VcError::NotBipartite);
                }
                for (u, list) in adj.iter().enumerate() {
                    for &v in list {
                        if left[u] == left[v] {
                            return Err(VcError::NotBipartite);
                        }
                    }
                }
            }
            VcKind::IntervalOrder { order } => {
                let mut seen = vec![false; n];
                if order.len() != n {
                    return Err(VcError::BadOrder);
                }
                for &v in order {
                    if v >= n || seen[v] {
                        return Err(VcError::BadOrder);
                    }
                    seen[v] = true;
                }
            }
            VcKind::General => {}
        }
        Ok(VcInstance { labels, adj, kind })
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn n_edges(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Maps local cover indices back to element ids, sorted ascending.
    pub fn cover_elements(&self, cover: &[usize]) -> Vec<ElementId> {
        let mut out: Vec<ElementId> = cover.iter().map(|&v| self.labels[v]).collect();
        out.sort();
        out
    }
}

/// Computes a minimum vertex cover with the solver matching the instance
/// kind. Output is sorted by local vertex index and deterministic for a
/// given instance.
pub fn min_vertex_cover(instance: &VcInstance) -> Result<Vec<usize>, VcError> {
    let mut cover = match &instance.kind {
        VcKind::General => general_min_cover(&instance.adj)?,
        VcKind::Bipartite { left } => {
            let (adj_l, left_ids, right_ids) = split_bipartite(&instance.adj, left);
            let matching = max_bipartite_matching(&adj_l, right_ids.len(), &[]);
            let (cover_l, cover_r) = koenig_cover(&adj_l, right_ids.len(), &matching);
            let mut cover = Vec::new();
            for (i, &inc) in cover_l.iter().enumerate() {
                if inc {
                    cover.push(left_ids[i]);
                }
            }
            for (j, &inc) in cover_r.iter().enumerate() {
                if inc {
                    cover.push(right_ids[j]);
                }
            }
            cover
        }
        VcKind::IntervalOrder { order } => {
            let independent = greedy_interval_mis(&instance.adj, order);
            (0..instance.n()).filter(|v| !independent[*v]).collect()
        }
    };
    cover.sort_unstable();
    Ok(cover)
}

// Splits a bipartite graph into left-to-right adjacency over side-local
// indices, returning (adjacency, left vertex ids, right vertex ids).
fn split_bipartite(adj: &[Vec<usize>], left: &[bool]) -> (Vec<Vec<usize>>, Vec<usize>, Vec<usize>) {
    let n = adj.len();
    let left_ids: Vec<usize> = (0..n).filter(|&v| left[v]).collect();
    let right_ids: Vec<usize> = (0..n).filter(|&v| !left[v]).collect();
    let mut right_local = vec![usize::MAX; n];
    for (j, &v) in right_ids.iter().enumerate() {
        right_local[v] = j;
    }
    let adj_l = left_ids
        .iter()
        .map(|&u| adj[u].iter().map(|&v| right_local[v]).collect())
        .collect();
    (adj_l, left_ids, right_ids)
}

/// Maximum matching in a bipartite graph via augmenting paths. `adj[u]`
/// lists right neighbors of left vertex `u`; `seed` is a partial matching
/// (left, right) to extend, which lets callers rebuild a maximum matching
/// around pairs they want to keep. Returns the right partner of each left
/// vertex.
pub fn max_bipartite_matching(
    adj: &[Vec<usize>],
    n_right: usize,
    seed: &[(usize, usize)],
) -> Vec<Option<usize>> {
    let n_left = adj.len();
    let mut match_l: Vec<Option<usize>> = vec![None; n_left];
    let mut match_r: Vec<Option<usize>> = vec![None; n_right];
    for &(u, v) in seed {
        debug_assert!(adj[u].contains(&v), "seed pair must be an edge");
        debug_assert!(match_l[u].is_none() && match_r[v].is_none(), "seed must be a matching");
        match_l[u] = Some(v);
        match_r[v] = Some(u);
    }

    fn try_augment(
        adj: &[Vec<usize>],
        u: usize,
        visited: &mut [bool],
        match_l: &mut [Option<usize>],
        match_r: &mut [Option<usize>],
    ) -> bool {
        for &v in &adj[u] {
            if visited[v] {
                continue;
            }
            visited[v] = true;
            let free = match match_r[v] {
                None => true,
                Some(w) => try_augment(adj, w, visited, match_l, match_r),
            };
            if free {
                match_l[u] = Some(v);
                match_r[v] = Some(u);
                return true;
            }
        }
        false
    }

    for u in 0..n_left {
        if match_l[u].is_none() {
            let mut visited = vec![false; n_right];
            try_augment(adj, u, &mut visited, &mut match_l, &mut match_r);
        }
    }
    match_l
}

/// König's construction: given a maximum matching, returns the minimum
/// vertex cover as side membership flags `(left, right)`. Every cover vertex
/// is matched, and its partner is outside the cover.
pub fn koenig_cover(
    adj: &[Vec<usize>],
    n_right: usize,
    match_l: &[Option<usize>],
) -> (Vec<bool>, Vec<bool>) {
    let n_left = adj.len();
    let mut match_r: Vec<Option<usize>> = vec![None; n_right];
    for (u, &m) in match_l.iter().enumerate() {
        if let Some(v) = m {
            match_r[v] = Some(u);
        }
    }
    // Alternating BFS from unmatched left vertices.
    let mut reach_l = vec![false; n_left];
    let mut reach_r = vec![false; n_right];
    let mut queue: Vec<usize> = (0..n_left).filter(|&u| match_l[u].is_none()).collect();
    for &u in &queue {
        reach_l[u] = true;
    }
    while let Some(u) = queue.pop() {
        for &v in &adj[u] {
            if reach_r[v] {
                continue;
            }
            reach_r[v] = true;
            if let Some(w) = match_r[v] {
                if !reach_l[w] {
                    reach_l[w] = true;
                    queue.push(w);
                }
            }
        }
    }
    let cover_l: Vec<bool> = (0..n_left).map(|u| !reach_l[u]).collect();
    let cover_r: Vec<bool> = (0..n_right).map(|v| reach_r[v]).collect();
    (cover_l, cover_r)
}

// Greedy maximum independent set on an interval graph, processing vertices
// by increasing right endpoint.
fn greedy_interval_mis(adj: &[Vec<usize>], order: &[usize]) -> Vec<bool> {
    let mut taken = vec![false; adj.len()];
    for &v in order {
        if !adj[v].iter().any(|&u| taken[u]) {
            taken[v] = true;
        }
    }
    taken
}

// Exact minimum vertex cover by branch-and-bound over 64-bit vertex masks,
// one connected component at a time.
fn general_min_cover(adj: &[Vec<usize>]) -> Result<Vec<usize>, VcError> {
    let n = adj.len();
    let mut seen = vec![false; n];
    let mut cover = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        // Collect the component in ascending index order.
        let mut component = vec![start];
        seen[start] = true;
        let mut head = 0;
        while head < component.len() {
            let u = component[head];
            head += 1;
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    component.push(v);
                }
            }
        }
        component.sort_unstable();
        if component.len() > 64 {
            return Err(VcError::ComponentTooLarge { size: component.len() });
        }
        if component.len() == 1 {
            continue;
        }
        let mut local = vec![usize::MAX; n];
        for (i, &v) in component.iter().enumerate() {
            local[v] = i;
        }
        let masks: Vec<u64> = component
            .iter()
            .map(|&v| adj[v].iter().fold(0u64, |m, &w| m | 1 << local[w]))
            .collect();
        let alive = if component.len() == 64 { u64::MAX } else { (1u64 << component.len()) - 1 };
        let mut best_size = component.len();
        let mut best_mask = alive;
        branch(&masks, alive, 0, 0, &mut best_size, &mut best_mask);
        for (i, &v) in component.iter().enumerate() {
            if best_mask >> i & 1 == 1 {
                cover.push(v);
            }
        }
    }
    Ok(cover)
}

// Lower bound: size of a greedy maximal matching on the alive subgraph.
fn matching_bound(masks: &[u64], alive: u64) -> usize {
    let mut remaining = alive;
    let mut count = 0;
    while remaining != 0 {
        let u = remaining.trailing_zeros() as usize;
        remaining &= !(1 << u);
        let nbrs = masks[u] & remaining;
        if nbrs != 0 {
            let v = nbrs.trailing_zeros();
            remaining &= !(1 << v);
            count += 1;
        }
    }
    count
}

fn branch(
    masks: &[u64],
    mut alive: u64,
    mut chosen: u64,
    mut size: usize,
    best_size: &mut usize,
    best_mask: &mut u64,
) {
    // Reductions: isolated vertices leave the graph, degree-one vertices pull
    // their neighbor into the cover.
    loop {
        let mut changed = false;
        let mut scan = alive;
        while scan != 0 {
            let u = scan.trailing_zeros() as usize;
            scan &= !(1 << u);
            let nbrs = masks[u] & alive;
            if nbrs == 0 {
                alive &= !(1 << u);
                changed = true;
            } else if nbrs.count_ones() == 1 {
                let v = nbrs.trailing_zeros() as usize;
                chosen |= 1 << v;
                size += 1;
                alive &= !(1 << u);
                alive &= !(1 << v);
                changed = true;
                break;
            }
        }
        if !changed {
            break;
        }
    }
    if size + matching_bound(masks, alive) >= *best_size {
        return;
    }
    // Find the highest-degree alive vertex; if none, the graph is covered.
    let mut pick = None;
    let mut pick_deg = 0;
    let mut scan = alive;
    while scan != 0 {
        let u = scan.trailing_zeros() as usize;
        scan &= !(1 << u);
        let deg = (masks[u] & alive).count_ones();
        if deg > pick_deg {
            pick_deg = deg;
            pick = Some(u);
        }
    }
    let Some(u) = pick else {
        // Strict improvement keeps the search deterministic.
        if size < *best_size {
            *best_size = size;
            *best_mask = chosen;
        }
        return;
    };
    // Branch 1: u joins the cover.
    branch(masks, alive & !(1 << u), chosen | 1 << u, size + 1, best_size, best_mask);
    // Branch 2: u stays out, so its whole neighborhood joins.
    let nbrs = masks[u] & alive;
    branch(
        masks,
        alive & !nbrs & !(1 << u),
        chosen | nbrs,
        size + nbrs.count_ones() as usize,
        best_size,
        best_mask,
    );
}

/// Reference solver: tries all vertex subsets in increasing size. Intended
/// for tests on small graphs; quadratic-exponential and proud of it.
pub fn exhaustive_min_cover(adj: &[Vec<usize>]) -> Vec<usize> {
    let n = adj.len();
    assert!(n <= 20, "exhaustive cover limited to 20 vertices");
    let edges: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| adj[u].iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
        .collect();
    let mut best: Option<u32> = None;
    for mask in 0u32..1 << n {
        if let Some(b) = best {
            if mask.count_ones() >= b.count_ones() {
                continue;
            }
        }
        if edges.iter().all(|&(u, v)| mask >> u & 1 == 1 || mask >> v & 1 == 1) {
            best = Some(mask);
        }
    }
    let best = best.unwrap_or(0);
    (0..n).filter(|&v| best >> v & 1 == 1).collect()
}
