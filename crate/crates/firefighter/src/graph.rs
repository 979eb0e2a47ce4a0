//! Undirected simple graphs with integer vertex ids.

use std::collections::{BTreeSet, VecDeque};

use thiserror::Error;

#[derive(Error, Debug, PartialEq, Eq)]
pub enum GraphError {
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("vertex id {id} out of range (vertex count {count})")]
    VertexOutOfRange { id: usize, count: usize },
}

/// An undirected simple graph: no self-loops, no parallel edges,
/// vertex ids `0..vertex_count`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    vertex_count: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
}

impl Graph {
    /// Build a validated graph from a vertex count and an edge list.
    pub fn new(vertex_count: usize, edge_list: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut adjacency = vec![Vec::new(); vertex_count];
        let mut seen = BTreeSet::new();
        let mut edges = Vec::with_capacity(edge_list.len());
        for &(u, v) in edge_list {
            if u >= vertex_count {
                return Err(GraphError::VertexOutOfRange {
                    id: u,
                    count: vertex_count,
                });
            }
            if v >= vertex_count {
                return Err(GraphError::VertexOutOfRange {
                    id: v,
                    count: vertex_count,
                });
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            let key = (u.min(v), u.max(v));
            if !seen.insert(key) {
                return Err(GraphError::DuplicateEdge(key.0, key.1));
            }
            edges.push(key);
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        edges.sort_unstable();
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok(Graph {
            vertex_count,
            edges,
            adjacency,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges as (u, v) pairs with u < v, sorted.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.vertex_count && self.adjacency[u].binary_search(&v).is_ok()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn check_vertex(&self, v: usize) -> Result<(), GraphError> {
        if v < self.vertex_count {
            Ok(())
        } else {
            Err(GraphError::VertexOutOfRange {
                id: v,
                count: self.vertex_count,
            })
        }
    }

    /// BFS distances from `v`; unreachable vertices map to `None`.
    pub fn bfs_distances(&self, v: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.vertex_count];
        if v >= self.vertex_count {
            return dist;
        }
        dist[v] = Some(0);
        let mut queue = VecDeque::from([v]);
        while let Some(u) = queue.pop_front() {
            let d = dist[u].unwrap();
            for &w in self.neighbors(u) {
                if dist[w].is_none() {
                    dist[w] = Some(d + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// All vertices at distance at most `k` from `v`, including `v` itself.
    pub fn k_neighborhood(&self, v: usize, k: usize) -> Result<BTreeSet<usize>, GraphError> {
        self.check_vertex(v)?;
        let dist = self.bfs_distances(v);
        Ok((0..self.vertex_count)
            .filter(|&u| matches!(dist[u], Some(d) if d <= k))
            .collect())
    }

    pub fn is_connected(&self) -> bool {
        if self.vertex_count == 0 {
            return true;
        }
        self.bfs_distances(0).iter().all(Option::is_some)
    }

    pub fn is_tree(&self) -> bool {
        self.vertex_count > 0 && self.edge_count() == self.vertex_count - 1 && self.is_connected()
    }

    /// Induced subgraph on `vertices`; second return value maps new ids back
    /// to the original ones (sorted ascending).
    pub fn induced_subgraph(&self, vertices: &BTreeSet<usize>) -> (Graph, Vec<usize>) {
        let back: Vec<usize> = vertices.iter().copied().collect();
        let mut fwd = vec![usize::MAX; self.vertex_count];
        for (new, &old) in back.iter().enumerate() {
            fwd[old] = new;
        }
        let edges: Vec<(usize, usize)> = self
            .edges
            .iter()
            .filter(|&&(u, v)| vertices.contains(&u) && vertices.contains(&v))
            .map(|&(u, v)| (fwd[u], fwd[v]))
            .collect();
        let graph = Graph::new(back.len(), &edges).expect("induced subgraph is valid");
        (graph, back)
    }
}
