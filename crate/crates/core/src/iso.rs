//! Isomorphism of small graphs.
//!
//! Colour refinement gives a labelling-independent fingerprint; equal
//! fingerprints are confirmed by backtracking over refined colour classes.

use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::hash::{Hash, Hasher};

use crate::graph::Graph;

/// Stable colouring after refinement, plus a hash of every round's
/// signature list.
#[derive(Debug, Clone)]
pub struct Refinement {
    pub colours: Vec<usize>,
    pub fingerprint: u64,
}

pub fn refine(g: &Graph) -> Refinement {
    let n = g.vertex_count();
    let adj = g.adjacency();
    let mut colours: Vec<usize> = (0..n).map(|v| adj[v].len()).collect();
    let mut hasher = DefaultHasher::new();
    n.hash(&mut hasher);
    g.edge_count().hash(&mut hasher);
    let mut classes = usize::MAX;
    loop {
        let sigs: Vec<(usize, Vec<usize>)> = (0..n)
            .map(|v| {
                let mut nb: Vec<usize> = adj[v].iter().map(|&w| colours[w]).collect();
                nb.sort_unstable();
                (colours[v], nb)
            })
            .collect();
        let mut distinct = sigs.clone();
        distinct.sort();
        distinct.dedup();
        distinct.hash(&mut hasher);
        let next: Vec<usize> = sigs.iter().map(|s| distinct.binary_search(s).unwrap()).collect();
        colours = next;
        if distinct.len() == classes {
            break;
        }
        classes = distinct.len();
    }
    let mut hist = colours.clone();
    hist.sort_unstable();
    hist.hash(&mut hasher);
    Refinement { colours, fingerprint: hasher.finish() }
}

/// A map `phi` with `ab in E(g) <=> phi(a)phi(b) in E(h)`, if one exists.
pub fn isomorphism(g: &Graph, h: &Graph) -> Option<Vec<usize>> {
    if g.vertex_count() != h.vertex_count() || g.edge_count() != h.edge_count() {
        return None;
    }
    let rg = refine(g);
    let rh = refine(h);
    if rg.fingerprint != rh.fingerprint {
        return None;
    }
    let n = g.vertex_count();
    let ag = g.adjacency();
    let ah = h.adjacency();
    let mut class_size = HashMap::new();
    for &c in &rg.colours {
        *class_size.entry(c).or_insert(0usize) += 1;
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| (class_size[&rg.colours[v]], rg.colours[v], v));
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    fn go(
        i: usize,
        order: &[usize],
        map: &mut [usize],
        used: &mut [bool],
        cg: &[usize],
        ch: &[usize],
        ag: &[Vec<usize>],
        h: &Graph,
        ah: &[Vec<usize>],
    ) -> bool {
        if i == order.len() {
            return true;
        }
        let v = order[i];
        for t in 0..map.len() {
            if used[t] || ch[t] != cg[v] || ah[t].len() != ag[v].len() {
                continue;
            }
            let ok = order[..i].iter().all(|&u| ag[v].binary_search(&u).is_ok() == h.has_edge(t, map[u]));
            if !ok {
                continue;
            }
            map[v] = t;
            used[t] = true;
            if go(i + 1, order, map, used, cg, ch, ag, h, ah) {
                return true;
            }
            used[t] = false;
            map[v] = usize::MAX;
        }
        false
    }
    if go(0, &order, &mut map, &mut used, &rg.colours, &rh.colours, &ag, h, &ah) {
        Some(map)
    } else {
        None
    }
}

pub fn are_isomorphic(g: &Graph, h: &Graph) -> bool {
    isomorphism(g, h).is_some()
}

/// A set of graphs up to isomorphism.
#[derive(Debug, Default, Clone)]
pub struct IsoSet {
    buckets: HashMap<u64, Vec<Graph>>,
    len: usize,
}

impl IsoSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn contains(&self, g: &Graph) -> bool {
        let f = refine(g).fingerprint;
        self.buckets.get(&f).is_some_and(|b| b.iter().any(|h| are_isomorphic(g, h)))
    }

    /// Returns `true` when `g` was not yet present.
    pub fn insert(&mut self, g: Graph) -> bool {
        let f = refine(&g).fingerprint;
        let bucket = self.buckets.entry(f).or_default();
        if bucket.iter().any(|h| are_isomorphic(&g, h)) {
            return false;
        }
        bucket.push(g);
        self.len += 1;
        true
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Members in a deterministic order (by size, then edge list).
    pub fn graphs(&self) -> Vec<Graph> {
        let mut all: Vec<Graph> = self.buckets.values().flatten().cloned().collect();
        all.sort_by(|a, b| (a.vertex_count(), a.edges()).cmp(&(b.vertex_count(), b.edges())));
        all
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relabelled_cycle_is_isomorphic() {
        let c = Graph::new(5, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]).unwrap();
        let d = Graph::new(5, [(0, 2), (2, 4), (4, 1), (1, 3), (3, 0)]).unwrap();
        let phi = isomorphism(&c, &d).unwrap();
        for &(a, b) in c.edges() {
            assert!(d.has_edge(phi[a], phi[b]));
        }
    }

    #[test]
    fn regular_graphs_with_same_refinement_are_distinguished() {
        // Two disjoint triangles vs a hexagon: both 2-regular.
        let two = Graph::new(6, [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]).unwrap();
        let hex = Graph::new(6, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)]).unwrap();
        assert!(!are_isomorphic(&two, &hex));
        let mut set = IsoSet::new();
        assert!(set.insert(two.clone()));
        assert!(set.insert(hex));
        assert!(!set.insert(two));
        assert_eq!(set.len(), 2);
    }
}
