//! Simple undirected graphs on vertices `0..n`.

use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("edge {0:?} is a loop")]
    Loop((usize, usize)),
    #[error("edge {edge:?} references a vertex outside 0..{n}")]
    VertexOutOfRange { edge: (usize, usize), n: usize },
}

/// Edges are stored as `(min, max)` pairs, sorted and deduplicated.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, GraphError> {
        let mut out = Vec::new();
        for (a, b) in edges {
            if a == b {
                return Err(GraphError::Loop((a, b)));
            }
            if a >= n || b >= n {
                return Err(GraphError::VertexOutOfRange { edge: (a, b), n });
            }
            out.push((a.min(b), a.max(b)));
        }
        out.sort_unstable();
        out.dedup();
        Ok(Graph { n, edges: out })
    }

    pub fn empty(n: usize) -> Self {
        Graph { n, edges: Vec::new() }
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|a| ((a + 1)..n).map(move |b| (a, b))).collect();
        Graph { n, edges }
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_index(&self, a: usize, b: usize) -> Option<usize> {
        self.edges.binary_search(&(a.min(b), a.max(b))).ok()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edge_index(a, b).is_some()
    }

    /// Neighbours in increasing order.
    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .edges
            .iter()
            .filter_map(|&(a, b)| if a == v { Some(b) } else if b == v { Some(a) } else { None })
            .collect();
        out.sort_unstable();
        out
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == v || b == v).count()
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        for l in &mut adj {
            l.sort_unstable();
        }
        adj
    }

    pub fn add_vertex(&mut self) -> usize {
        self.n += 1;
        self.n - 1
    }

    pub fn add_edge(&mut self, a: usize, b: usize) -> Result<bool, GraphError> {
        if a == b {
            return Err(GraphError::Loop((a, b)));
        }
        if a >= self.n || b >= self.n {
            return Err(GraphError::VertexOutOfRange { edge: (a, b), n: self.n });
        }
        let e = (a.min(b), a.max(b));
        match self.edges.binary_search(&e) {
            Ok(_) => Ok(false),
            Err(pos) => {
                self.edges.insert(pos, e);
                Ok(true)
            }
        }
    }

    pub fn remove_edge(&mut self, a: usize, b: usize) -> bool {
        match self.edge_index(a, b) {
            Some(i) => {
                self.edges.remove(i);
                true
            }
            None => false,
        }
    }

    pub fn without_edge(&self, index: usize) -> Graph {
        let mut g = self.clone();
        g.edges.remove(index);
        g
    }

    /// Deletes `v` and shifts higher ids down by one.
    pub fn remove_vertex(&mut self, v: usize) {
        let shift = |x: usize| if x > v { x - 1 } else { x };
        self.edges = self
            .edges
            .iter()
            .filter(|&&(a, b)| a != v && b != v)
            .map(|&(a, b)| (shift(a), shift(b)))
            .collect();
        self.n -= 1;
    }

    /// Induced subgraph on `vertices`, relabelled in the given order.
    pub fn induced(&self, vertices: &[usize]) -> Graph {
        let mut pos = vec![usize::MAX; self.n];
        for (i, &v) in vertices.iter().enumerate() {
            pos[v] = i;
        }
        let edges = self
            .edges
            .iter()
            .filter(|&&(a, b)| pos[a] != usize::MAX && pos[b] != usize::MAX)
            .map(|&(a, b)| (pos[a], pos[b]));
        Graph::new(vertices.len(), edges).expect("induced edges are valid")
    }

    /// Component label of every vertex, using only the listed edges.
    pub fn components_of(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Vec<usize> {
        let mut uf = UnionFind::<usize>::new(n);
        for (a, b) in edges {
            uf.union(a, b);
        }
        uf.into_labeling()
    }

    pub fn components(&self) -> Vec<usize> {
        Self::components_of(self.n, self.edges.iter().copied())
    }

    pub fn is_connected(&self) -> bool {
        let c = self.components();
        c.iter().all(|&x| x == c[0])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dedup_and_orientation() {
        let g = Graph::new(3, [(1, 0), (0, 1), (2, 1)]).unwrap();
        assert_eq!(g.edges(), &[(0, 1), (1, 2)]);
        assert!(Graph::new(2, [(1, 1)]).is_err());
        assert!(Graph::new(2, [(0, 2)]).is_err());
    }

    #[test]
    fn vertex_removal_relabels() {
        let mut g = Graph::complete(4);
        g.remove_vertex(1);
        assert_eq!(g.vertex_count(), 3);
        assert_eq!(g.edges(), &[(0, 1), (0, 2), (1, 2)]);
    }

    #[test]
    fn connectivity() {
        let g = Graph::new(4, [(0, 1), (2, 3)]).unwrap();
        assert!(!g.is_connected());
        let h = Graph::new(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        assert!(h.is_connected());
        assert_eq!(g.induced(&[3, 2]).edges(), &[(0, 1)]);
    }
}
