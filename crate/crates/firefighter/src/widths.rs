//! Linear layouts, path decompositions, and the three width measures:
//! cutwidth, bandwidth, pathwidth. Exact computation is intended for small
//! graphs and always returns a certificate that re-validates to the value.

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use crate::graph::Graph;

#[derive(Error, Debug, PartialEq, Eq)]
pub enum LayoutError {
    #[error("layout has {len} entries but graph has {n} vertices")]
    LengthMismatch { len: usize, n: usize },
    #[error("layout is not a permutation: vertex {0} missing or repeated")]
    NotAPermutation(usize),
}

#[derive(Error, Debug, PartialEq, Eq)]
pub enum DecompositionError {
    #[error("condition 1 violated: vertex {0} is in no bag")]
    UncoveredVertex(usize),
    #[error("condition 2 violated: edge ({0}, {1}) is inside no bag")]
    UncoveredEdge(usize, usize),
    #[error(
        "condition 3 violated: vertex {vertex} appears in bags {first} and {later} but not {gap}"
    )]
    NonContiguous {
        vertex: usize,
        first: usize,
        gap: usize,
        later: usize,
    },
    #[error("bag {bag} contains out-of-range vertex {vertex}")]
    VertexOutOfRange { bag: usize, vertex: usize },
}

#[derive(Error, Debug, PartialEq, Eq)]
pub enum WidthError {
    #[error("graph has {n} vertices, above the cap {cap} for exact search")]
    TooLarge { n: usize, cap: usize },
    #[error(transparent)]
    Layout(#[from] LayoutError),
}

pub const DEFAULT_CUTWIDTH_CAP: usize = 12;
pub const DEFAULT_BANDWIDTH_CAP: usize = 12;
pub const DEFAULT_PATHWIDTH_CAP: usize = 16;

/// A linear layout: `order[i]` is the vertex at position `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearLayout {
    order: Vec<usize>,
}

impl LinearLayout {
    pub fn new(order: Vec<usize>) -> Self {
        LinearLayout { order }
    }

    pub fn identity(n: usize) -> Self {
        LinearLayout {
            order: (0..n).collect(),
        }
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Check the layout is a bijection onto `0..n` and return positions
    /// indexed by vertex id.
    pub fn positions(&self, graph: &Graph) -> Result<Vec<usize>, LayoutError> {
        let n = graph.vertex_count();
        if self.order.len() != n {
            return Err(LayoutError::LengthMismatch {
                len: self.order.len(),
                n,
            });
        }
        let mut pos = vec![usize::MAX; n];
        for (i, &v) in self.order.iter().enumerate() {
            if v >= n || pos[v] != usize::MAX {
                return Err(LayoutError::NotAPermutation(v));
            }
            pos[v] = i;
        }
        Ok(pos)
    }
}

/// A path decomposition as its bag sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathDecomposition {
    pub bags: Vec<BTreeSet<usize>>,
}

impl PathDecomposition {
    pub fn new(bags: Vec<BTreeSet<usize>>) -> Self {
        PathDecomposition { bags }
    }

    pub fn width(&self) -> usize {
        self.bags
            .iter()
            .map(BTreeSet::len)
            .max()
            .unwrap_or(0)
            .saturating_sub(1)
    }
}

/// Max number of edges crossing a gap of the layout; 0 when there is no gap
/// or no edge.
pub fn cutwidth_of_layout(graph: &Graph, layout: &LinearLayout) -> Result<usize, LayoutError> {
    let pos = layout.positions(graph)?;
    let n = graph.vertex_count();
    if n < 2 {
        return Ok(0);
    }
    // crossing[i] = edges between positions {0..=i} and the rest
    let mut crossing = vec![0usize; n - 1];
    for &(u, v) in graph.edges() {
        let (a, b) = (pos[u].min(pos[v]), pos[u].max(pos[v]));
        for count in &mut crossing[a..b] {
            *count += 1;
        }
    }
    Ok(crossing.into_iter().max().unwrap_or(0))
}

/// Max layout distance over edges; 0 when there is no edge.
pub fn bandwidth_of_layout(graph: &Graph, layout: &LinearLayout) -> Result<usize, LayoutError> {
    let pos = layout.positions(graph)?;
    Ok(graph
        .edges()
        .iter()
        .map(|&(u, v)| pos[u].abs_diff(pos[v]))
        .max()
        .unwrap_or(0))
}

/// Check the three path-decomposition conditions and return the width.
pub fn validate_path_decomposition(
    graph: &Graph,
    decomposition: &PathDecomposition,
) -> Result<usize, DecompositionError> {
    let n = graph.vertex_count();
    let bags = &decomposition.bags;
    for (i, bag) in bags.iter().enumerate() {
        if let Some(&v) = bag.iter().find(|&&v| v >= n) {
            return Err(DecompositionError::VertexOutOfRange { bag: i, vertex: v });
        }
    }
    // condition 3: occurrences of each vertex form a contiguous bag interval
    let mut first = vec![usize::MAX; n];
    let mut last = vec![usize::MAX; n];
    for (i, bag) in bags.iter().enumerate() {
        for &v in bag {
            if first[v] == usize::MAX {
                first[v] = i;
            }
            last[v] = i;
        }
    }
    for v in 0..n {
        if first[v] == usize::MAX {
            return Err(DecompositionError::UncoveredVertex(v)); // condition 1
        }
        if let Some(gap) = (first[v]..=last[v]).find(|&i| !bags[i].contains(&v)) {
            return Err(DecompositionError::NonContiguous {
                vertex: v,
                first: first[v],
                gap,
                later: last[v],
            });
        }
    }
    // with contiguity established, an edge is inside some bag exactly when
    // the occurrence intervals of its endpoints intersect
    for &(u, v) in graph.edges() {
        if first[u] > last[v] || first[v] > last[u] {
            return Err(DecompositionError::UncoveredEdge(u, v)); // condition 2
        }
    }
    Ok(decomposition.width())
}

/// Number of edges with exactly one endpoint inside `mask` (vertices as bits).
fn cut_of_mask(edge_masks: &[(u64, u64)], mask: u64) -> usize {
    edge_masks
        .iter()
        .filter(|&&(bu, bv)| (mask & bu != 0) != (mask & bv != 0))
        .count()
}

fn edge_bit_masks(graph: &Graph) -> Vec<(u64, u64)> {
    graph
        .edges()
        .iter()
        .map(|&(u, v)| (1u64 << u, 1u64 << v))
        .collect()
}

/// Minimum cutwidth plus a witnessing layout, by memoized search over
/// prefix vertex sets (the crossing number at a gap depends only on the set).
pub fn exact_cutwidth(graph: &Graph, cap: usize) -> Result<(usize, LinearLayout), WidthError> {
    let cap = cap.min(62); // bitmask states
    let n = graph.vertex_count();
    if n > cap {
        return Err(WidthError::TooLarge { n, cap });
    }
    if n == 0 {
        return Ok((0, LinearLayout::new(Vec::new())));
    }
    let edge_masks = edge_bit_masks(graph);
    let full: u64 = (1u64 << n) - 1;
    let mut memo: HashMap<u64, usize> = HashMap::new();

    // best(prefix) = min over completions of the max crossing at gaps strictly
    // after this prefix
    fn best(
        prefix: u64,
        full: u64,
        n: usize,
        edge_masks: &[(u64, u64)],
        memo: &mut HashMap<u64, usize>,
    ) -> usize {
        if prefix == full {
            return 0;
        }
        if let Some(&v) = memo.get(&prefix) {
            return v;
        }
        let mut result = usize::MAX;
        for v in 0..n {
            let bit = 1u64 << v;
            if prefix & bit != 0 {
                continue;
            }
            let next = prefix | bit;
            let here = if next == full {
                0
            } else {
                cut_of_mask(edge_masks, next)
            };
            let rest = best(next, full, n, edge_masks, memo);
            result = result.min(here.max(rest));
        }
        memo.insert(prefix, result);
        result
    }

    let value = best(0, full, n, &edge_masks, &mut memo);

    // reconstruct a layout achieving the value greedily
    let mut order = Vec::with_capacity(n);
    let mut prefix = 0u64;
    while prefix != full {
        let mut chosen = None;
        for v in 0..n {
            let bit = 1u64 << v;
            if prefix & bit != 0 {
                continue;
            }
            let next = prefix | bit;
            let here = if next == full {
                0
            } else {
                cut_of_mask(&edge_masks, next)
            };
            let rest = if next == full {
                0
            } else {
                *memo.get(&next).expect("memo filled by search")
            };
            if here.max(rest) <= value {
                chosen = Some(v);
                break;
            }
        }
        let v = chosen.expect("some extension achieves the optimum");
        order.push(v);
        prefix |= 1u64 << v;
    }
    Ok((value, LinearLayout::new(order)))
}

/// Boundary size of a prefix set: vertices inside with a neighbor outside.
/// Minimizing the max boundary over vertex orderings yields the pathwidth.
fn boundary_of_mask(adj_masks: &[u64], mask: u64) -> usize {
    (0..adj_masks.len())
        .filter(|&v| mask & (1 << v) != 0 && adj_masks[v] & !mask != 0)
        .count()
}

/// Minimum pathwidth plus a witnessing decomposition, via search over vertex
/// introduction orders (bags are read off the optimal order).
pub fn exact_pathwidth(
    graph: &Graph,
    cap: usize,
) -> Result<(usize, PathDecomposition), WidthError> {
    let cap = cap.min(62); // bitmask states
    let n = graph.vertex_count();
    if n > cap {
        return Err(WidthError::TooLarge { n, cap });
    }
    if n == 0 {
        return Ok((0, PathDecomposition::new(Vec::new())));
    }
    let adj_masks: Vec<u64> = (0..n)
        .map(|v| graph.neighbors(v).iter().fold(0u64, |m, &u| m | (1 << u)))
        .collect();
    let full: u64 = (1u64 << n) - 1;
    let mut memo: HashMap<u64, usize> = HashMap::new();

    fn best(
        prefix: u64,
        full: u64,
        n: usize,
        adj: &[u64],
        memo: &mut HashMap<u64, usize>,
    ) -> usize {
        if prefix == full {
            return 0;
        }
        if let Some(&v) = memo.get(&prefix) {
            return v;
        }
        let mut result = usize::MAX;
        for v in 0..n {
            let bit = 1u64 << v;
            if prefix & bit != 0 {
                continue;
            }
            let next = prefix | bit;
            let here = boundary_of_mask(adj, next);
            let rest = best(next, full, n, adj, memo);
            result = result.min(here.max(rest));
        }
        memo.insert(prefix, result);
        result
    }

    let value = best(0, full, n, &adj_masks, &mut memo);

    let mut order = Vec::with_capacity(n);
    let mut prefix = 0u64;
    while prefix != full {
        let mut chosen = None;
        for v in 0..n {
            let bit = 1u64 << v;
            if prefix & bit != 0 {
                continue;
            }
            let next = prefix | bit;
            let here = boundary_of_mask(&adj_masks, next);
            let rest = if next == full {
                0
            } else {
                *memo.get(&next).expect("memo filled by search")
            };
            if here.max(rest) <= value {
                chosen = Some(v);
                break;
            }
        }
        let v = chosen.expect("some extension achieves the optimum");
        order.push(v);
        prefix |= 1u64 << v;
    }

    // bag i holds the i-th vertex plus every earlier vertex that still has a
    // neighbor at position >= i
    let mut pos = vec![0usize; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let last_pos: Vec<usize> = (0..n)
        .map(|v| {
            graph
                .neighbors(v)
                .iter()
                .map(|&u| pos[u])
                .max()
                .unwrap_or(pos[v])
        })
        .collect();
    let bags: Vec<BTreeSet<usize>> = (0..n)
        .map(|i| {
            let mut bag: BTreeSet<usize> = order[..i]
                .iter()
                .copied()
                .filter(|&u| last_pos[u] >= i)
                .collect();
            bag.insert(order[i]);
            bag
        })
        .collect();
    Ok((value, PathDecomposition::new(bags)))
}

/// Minimum bandwidth plus a witnessing layout, by branch-and-bound over
/// left-to-right placements.
pub fn exact_bandwidth(graph: &Graph, cap: usize) -> Result<(usize, LinearLayout), WidthError> {
    let n = graph.vertex_count();
    if n > cap {
        return Err(WidthError::TooLarge { n, cap });
    }
    if n == 0 {
        return Ok((0, LinearLayout::new(Vec::new())));
    }
    if graph.edge_count() == 0 {
        return Ok((0, LinearLayout::identity(n)));
    }

    // lower bound: a vertex of degree d needs a neighbor at distance >= ceil(d/2);
    // more generally |N^r(v)| vertices must fit within 2*r*bw + 1 positions
    let mut lower = 1usize;
    for v in 0..n {
        let dist = graph.bfs_distances(v);
        let mut counts: Vec<usize> = Vec::new();
        for d in dist.iter().flatten() {
            if counts.len() <= *d {
                counts.resize(d + 1, 0);
            }
            counts[*d] += 1;
        }
        let mut cum = 0usize;
        for (r, c) in counts.iter().enumerate() {
            cum += c;
            if r >= 1 {
                lower = lower.max((cum - 1).div_ceil(2 * r));
            }
        }
    }

    // initial incumbent: identity layout
    let mut best = bandwidth_of_layout(graph, &LinearLayout::identity(n))?;
    let mut best_order: Vec<usize> = (0..n).collect();

    struct Search<'a> {
        graph: &'a Graph,
        n: usize,
        lower: usize,
        best: usize,
        best_order: Vec<usize>,
        placed_pos: Vec<usize>,
        order: Vec<usize>,
    }

    impl Search<'_> {
        fn run(&mut self, cur_max: usize) {
            if self.best == self.lower {
                return;
            }
            if cur_max >= self.best {
                return;
            }
            let next = self.order.len();
            if next == self.n {
                self.best = cur_max;
                self.best_order = self.order.clone();
                return;
            }
            // any placed vertex with an unplaced neighbor forces a stretch of
            // at least next - pos
            for &u in &self.order {
                let pending = self
                    .graph
                    .neighbors(u)
                    .iter()
                    .any(|&w| self.placed_pos[w] == usize::MAX);
                if pending && next - self.placed_pos[u] >= self.best {
                    return;
                }
            }
            for v in 0..self.n {
                if self.placed_pos[v] != usize::MAX {
                    continue;
                }
                let mut new_max = cur_max;
                for &w in self.graph.neighbors(v) {
                    if self.placed_pos[w] != usize::MAX {
                        new_max = new_max.max(next - self.placed_pos[w]);
                    }
                }
                if new_max >= self.best {
                    continue;
                }
                self.placed_pos[v] = next;
                self.order.push(v);
                self.run(new_max);
                self.order.pop();
                self.placed_pos[v] = usize::MAX;
            }
        }
    }

    if best > lower {
        let mut search = Search {
            graph,
            n,
            lower,
            best,
            best_order: best_order.clone(),
            placed_pos: vec![usize::MAX; n],
            order: Vec::with_capacity(n),
        };
        search.run(0);
        best = search.best;
        best_order = search.best_order;
    }
    Ok((best, LinearLayout::new(best_order)))
}
