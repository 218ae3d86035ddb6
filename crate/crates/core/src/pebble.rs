//! The (d,d) pebble game and the Maxwell counts it decides.

use serde::Serialize;

use crate::graph::Graph;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict")]
pub enum MaxwellVerdict {
    /// `|E| = d|V| - d` and every subgraph obeys `|E(H)| <= d|V(H)| - d`.
    Tight,
    /// Sparse, but `deficit` edges short of the global count.
    SparseOnly { deficit: usize },
    /// A subgraph with `|E(H)| > d|V(H)| - d`.
    Violation { vertices: Vec<usize>, edges: Vec<(usize, usize)> },
}

/// Directed pebble-game state: every vertex starts with `k` pebbles; an
/// accepted edge consumes one pebble from its tail.
#[derive(Debug, Clone)]
pub struct PebbleGame {
    k: usize,
    l: usize,
    pebbles: Vec<usize>,
    out: Vec<Vec<usize>>,
    accepted: Vec<(usize, usize)>,
}

impl PebbleGame {
    pub fn new(n: usize, k: usize, l: usize) -> Self {
        PebbleGame { k, l, pebbles: vec![k; n], out: vec![Vec::new(); n], accepted: Vec::new() }
    }

    pub fn pebbles(&self, v: usize) -> usize {
        self.pebbles[v]
    }

    pub fn accepted(&self) -> &[(usize, usize)] {
        &self.accepted
    }

    /// Moves one pebble to `root` along a reversed directed path, avoiding
    /// the pebbles of `a` and `b`. DFS visits smaller ids first.
    fn fetch(&mut self, root: usize, a: usize, b: usize) -> bool {
        let n = self.pebbles.len();
        let mut parent = vec![usize::MAX; n];
        parent[root] = root;
        let mut stack = vec![root];
        let mut found = None;
        while let Some(x) = stack.pop() {
            if x != a && x != b && self.pebbles[x] > 0 {
                found = Some(x);
                break;
            }
            let mut next = self.out[x].clone();
            next.sort_unstable_by(|p, q| q.cmp(p));
            for y in next {
                if parent[y] == usize::MAX {
                    parent[y] = x;
                    stack.push(y);
                }
            }
        }
        let Some(mut x) = found else { return false };
        self.pebbles[x] -= 1;
        while x != root {
            let p = parent[x];
            let pos = self.out[p].iter().position(|&t| t == x).expect("tree edge");
            self.out[p].swap_remove(pos);
            self.out[x].push(p);
            x = p;
        }
        self.pebbles[root] += 1;
        true
    }

    fn reach(&self, from: &[usize]) -> Vec<usize> {
        let mut seen = vec![false; self.pebbles.len()];
        let mut stack: Vec<usize> = from.to_vec();
        for &v in from {
            seen[v] = true;
        }
        while let Some(x) = stack.pop() {
            for &y in &self.out[x] {
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        (0..seen.len()).filter(|&v| seen[v]).collect()
    }

    /// Tries to accept edge `ab`. On rejection returns the vertex set
    /// reachable from `a` and `b`, which spans a violating block.
    pub fn insert(&mut self, a: usize, b: usize) -> Result<(), Vec<usize>> {
        while self.pebbles[a] + self.pebbles[b] < self.l + 1 {
            let moved = (self.pebbles[a] < self.k && self.fetch(a, a, b))
                || (self.pebbles[b] < self.k && self.fetch(b, a, b));
            if !moved {
                return Err(self.reach(&[a, b]));
            }
        }
        let tail = if self.pebbles[a] > 0 { a } else { b };
        let head = if tail == a { b } else { a };
        self.pebbles[tail] -= 1;
        self.out[tail].push(head);
        self.accepted.push((a.min(b), a.max(b)));
        Ok(())
    }
}

/// Decides `(d,d)`-sparsity and tightness.
pub fn maxwell_count(g: &Graph, d: usize) -> MaxwellVerdict {
    let n = g.vertex_count();
    let mut game = PebbleGame::new(n, d, d);
    for &(a, b) in g.edges() {
        if let Err(vertices) = game.insert(a, b) {
            let mut edges: Vec<(usize, usize)> = game
                .accepted()
                .iter()
                .copied()
                .filter(|&(x, y)| vertices.binary_search(&x).is_ok() && vertices.binary_search(&y).is_ok())
                .collect();
            edges.push((a, b));
            edges.sort_unstable();
            return MaxwellVerdict::Violation { vertices, edges };
        }
    }
    let target = (d * n).saturating_sub(d);
    if g.edge_count() == target {
        MaxwellVerdict::Tight
    } else {
        MaxwellVerdict::SparseOnly { deficit: target - g.edge_count() }
    }
}

pub fn is_tight(g: &Graph, d: usize) -> bool {
    maxwell_count(g, d) == MaxwellVerdict::Tight
}
