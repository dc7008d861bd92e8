//! Exact maximum matchings: Edmonds' blossom algorithm for general graphs and
//! augmenting paths for the bipartite case.
//!
//! The reduction rules only ever ask "is there a matching of size at least
//! t", so both entry points take an optional threshold and may stop growing
//! the matching once it is reached. A greedy maximal matching would not do:
//! the rules need the exact threshold decision.

use crate::bitset::VertexSet;
use crate::graph::{Graph, Pair, Vertex};
use std::fmt;

/// A set of pairwise vertex-disjoint edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matching {
    edges: Vec<Pair>,
}

impl Matching {
    fn from_mate(mate: &[Option<Vertex>]) -> Matching {
        let mut edges = Vec::new();
        for (u, &m) in mate.iter().enumerate() {
            if let Some(v) = m {
                if u < v {
                    edges.push(Pair::new(u, v));
                }
            }
        }
        Matching { edges }
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn edges(&self) -> &[Pair] {
        &self.edges
    }

    /// Verifies disjointness (every matching invariant there is).
    pub fn is_valid(&self) -> bool {
        let mut seen = std::collections::BTreeSet::new();
        for p in &self.edges {
            if !seen.insert(p.lo()) || !seen.insert(p.hi()) {
                return false;
            }
        }
        true
    }

    pub fn covered(&self, capacity: usize) -> VertexSet {
        let mut s = VertexSet::new(capacity);
        for p in &self.edges {
            s.insert(p.lo());
            s.insert(p.hi());
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MatchingError {
    SidesOverlap { vertex: Vertex },
}

impl fmt::Display for MatchingError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MatchingError::SidesOverlap { vertex } => {
                write!(f, "vertex {} appears on both sides of the bipartition", vertex)
            }
        }
    }
}

impl std::error::Error for MatchingError {}

/// Maximum-cardinality matching of `g` (Edmonds' blossom algorithm).
///
/// With `stop_at = Some(t)` the search may return as soon as the matching
/// reaches `t` edges; without it the result is a maximum matching.
pub fn max_matching(g: &Graph, stop_at: Option<usize>) -> Matching {
    let n = g.n();
    let mut mate: Vec<Option<Vertex>> = vec![None; n];
    let mut size = 0;

    // Greedy warm start; augmenting rounds below preserve correctness.
    for u in 0..n {
        if mate[u].is_none() {
            for v in g.neighbors(u).iter() {
                if mate[v].is_none() {
                    mate[u] = Some(v);
                    mate[v] = Some(u);
                    size += 1;
                    break;
                }
            }
        }
        if stop_at.is_some_and(|t| size >= t) {
            return Matching::from_mate(&mate);
        }
    }

    let mut finder = BlossomFinder {
        g,
        mate: &mut mate,
        parent: vec![None; n],
        base: (0..n).collect(),
        in_queue: vec![false; n],
        in_blossom: vec![false; n],
    };
    for root in 0..n {
        if finder.mate[root].is_none() && finder.augment_from(root) {
            size += 1;
            if stop_at.is_some_and(|t| size >= t) {
                break;
            }
        }
    }
    Matching::from_mate(&mate)
}

struct BlossomFinder<'a> {
    g: &'a Graph,
    mate: &'a mut Vec<Option<Vertex>>,
    parent: Vec<Option<Vertex>>,
    base: Vec<Vertex>,
    in_queue: Vec<bool>,
    in_blossom: Vec<bool>,
}

impl BlossomFinder<'_> {
    /// BFS over the alternating forest rooted at `root`, contracting blossoms
    /// via the `base` array. Returns true if an augmenting path was applied.
    fn augment_from(&mut self, root: Vertex) -> bool {
        let n = self.g.n();
        for v in 0..n {
            self.parent[v] = None;
            self.base[v] = v;
            self.in_queue[v] = false;
        }
        let mut queue = std::collections::VecDeque::new();
        queue.push_back(root);
        self.in_queue[root] = true;

        while let Some(v) = queue.pop_front() {
            for u in self.g.neighbors(v).iter() {
                if self.base[v] == self.base[u] || self.mate[v] == Some(u) {
                    continue;
                }
                if u == root || self.mate[u].is_some_and(|mu| self.parent[mu].is_some()) {
                    // Odd cycle: contract the blossom around the common base.
                    let cur_base = self.lca(v, u);
                    for w in 0..n {
                        self.in_blossom[w] = false;
                    }
                    self.mark_path(v, cur_base, u);
                    self.mark_path(u, cur_base, v);
                    for w in 0..n {
                        if self.in_blossom[self.base[w]] {
                            self.base[w] = cur_base;
                            if !self.in_queue[w] {
                                self.in_queue[w] = true;
                                queue.push_back(w);
                            }
                        }
                    }
                } else if self.parent[u].is_none() {
                    self.parent[u] = Some(v);
                    match self.mate[u] {
                        None => {
                            self.apply_augmenting_path(u);
                            return true;
                        }
                        Some(mu) => {
                            if !self.in_queue[mu] {
                                self.in_queue[mu] = true;
                                queue.push_back(mu);
                            }
                        }
                    }
                }
            }
        }
        false
    }

    fn lca(&self, mut a: Vertex, mut b: Vertex) -> Vertex {
        let n = self.g.n();
        let mut used = vec![false; n];
        loop {
            a = self.base[a];
            used[a] = true;
            match self.mate[a] {
                Some(ma) => match self.parent[ma] {
                    Some(p) => a = p,
                    None => break,
                },
                None => break,
            }
        }
        loop {
            b = self.base[b];
            if used[b] {
                return b;
            }
            b = self.parent[self.mate[b].expect("even vertex on alternating path")]
                .expect("path leads to root");
        }
    }

    fn mark_path(&mut self, mut v: Vertex, cur_base: Vertex, mut child: Vertex) {
        while self.base[v] != cur_base {
            let mv = self.mate[v].expect("blossom vertex is matched");
            self.in_blossom[self.base[v]] = true;
            self.in_blossom[self.base[mv]] = true;
            self.parent[v] = Some(child);
            child = mv;
            v = self.parent[mv].expect("alternating path continues");
        }
    }

    fn apply_augmenting_path(&mut self, mut u: Vertex) {
        while let Some(pv) = self.parent[u] {
            let ppv = self.mate[pv];
            self.mate[u] = Some(pv);
            self.mate[pv] = Some(u);
            match ppv {
                Some(next) => u = next,
                None => break,
            }
        }
    }
}

/// Maximum matching using only edges with one endpoint in `a` and one in `b`
/// (Kuhn's augmenting paths). The sides must be disjoint.
pub fn max_bipartite_matching(
    g: &Graph,
    a: &VertexSet,
    b: &VertexSet,
    stop_at: Option<usize>,
) -> Result<Matching, MatchingError> {
    if let Some(v) = a.intersection(b).first() {
        return Err(MatchingError::SidesOverlap { vertex: v });
    }
    let n = g.n();
    let mut mate: Vec<Option<Vertex>> = vec![None; n];
    let mut size = 0;

    fn try_augment(
        g: &Graph,
        b: &VertexSet,
        u: Vertex,
        mate: &mut Vec<Option<Vertex>>,
        visited: &mut VertexSet,
    ) -> bool {
        let nbrs = g.neighbors(u).intersection(b);
        for w in nbrs.iter() {
            if visited.contains(w) {
                continue;
            }
            visited.insert(w);
            let free = match mate[w] {
                None => true,
                Some(prev) => try_augment(g, b, prev, mate, visited),
            };
            if free {
                mate[w] = Some(u);
                mate[u] = Some(w);
                return true;
            }
        }
        false
    }

    for u in a.iter() {
        let mut visited = VertexSet::new(n);
        if try_augment(g, b, u, &mut mate, &mut visited) {
            size += 1;
            if stop_at.is_some_and(|t| size >= t) {
                break;
            }
        }
    }
    Ok(Matching::from_mate(&mate))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;
    use crate::rng::Rng;

    fn random_graph(rng: &mut Rng, n: usize, p: f64) -> Graph {
        let mut g = Graph::new(n);
        for u in 0..n {
            for v in u + 1..n {
                if rng.chance(p) {
                    g.add_edge(u, v);
                }
            }
        }
        g
    }

    #[test]
    fn triangle_and_cycle() {
        let triangle = Graph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]);
        assert_eq!(max_matching(&triangle, None).len(), 1);
        let c4 = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
        assert_eq!(max_matching(&c4, None).len(), 2);
    }

    #[test]
    fn blossom_handles_odd_components() {
        // Two triangles joined by an edge needs blossom contraction to see
        // the size-3 matching.
        let g = Graph::from_edges(
            6,
            &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (2, 3)],
        );
        assert_eq!(max_matching(&g, None).len(), 3);
    }

    #[test]
    fn agrees_with_bruteforce() {
        let mut rng = Rng::new(0x51ee);
        for trial in 0..1000 {
            let n = rng.range(2, 10);
            let g = random_graph(&mut rng, n, 0.2 + 0.06 * (trial % 10) as f64);
            let got = max_matching(&g, None);
            assert!(got.is_valid());
            assert_eq!(got.len(), oracle::max_matching_size(&g), "graph: {:?}", g);
        }
    }

    #[test]
    fn threshold_early_exit_is_sound() {
        let mut rng = Rng::new(0x7001);
        for _ in 0..200 {
            let n = rng.range(2, 12);
            let g = random_graph(&mut rng, n, 0.5);
            let full = max_matching(&g, None).len();
            for t in 0..=n / 2 + 1 {
                let got = max_matching(&g, Some(t)).len();
                assert_eq!(got >= t, full >= t);
            }
        }
    }

    #[test]
    fn bipartite_complete_and_empty() {
        let mut g = Graph::new(6);
        for u in 0..3 {
            for v in 3..6 {
                g.add_edge(u, v);
            }
        }
        let a = VertexSet::from_iter(6, 0..3);
        let b = VertexSet::from_iter(6, 3..6);
        assert_eq!(max_bipartite_matching(&g, &a, &b, None).unwrap().len(), 3);

        let empty = Graph::new(6);
        assert_eq!(max_bipartite_matching(&empty, &a, &b, None).unwrap().len(), 0);
    }

    #[test]
    fn bipartite_rejects_overlap() {
        let g = Graph::new(4);
        let a = VertexSet::from_iter(4, [0, 1]);
        let b = VertexSet::from_iter(4, [1, 2]);
        assert_eq!(
            max_bipartite_matching(&g, &a, &b, None),
            Err(MatchingError::SidesOverlap { vertex: 1 })
        );
    }

    #[test]
    fn bipartite_agrees_with_bruteforce() {
        let mut rng = Rng::new(0xb1b1);
        for _ in 0..600 {
            let n = rng.range(2, 12);
            let g = random_graph(&mut rng, n, 0.4);
            let mut a = VertexSet::new(n);
            let mut b = VertexSet::new(n);
            for v in 0..n {
                match rng.below(3) {
                    0 => a.insert(v),
                    1 => b.insert(v),
                    _ => {}
                }
            }
            let got = max_bipartite_matching(&g, &a, &b, None).unwrap();
            assert!(got.is_valid());
            // Only a-b edges may be used.
            for p in got.edges() {
                let (u, v) = p.endpoints();
                assert!(
                    (a.contains(u) && b.contains(v)) || (a.contains(v) && b.contains(u))
                );
            }
            assert_eq!(got.len(), oracle::max_bipartite_matching_size(&g, &a, &b));
        }
    }
}
