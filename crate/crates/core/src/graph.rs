//! Simple undirected graphs with bitset adjacency, pair edits, and the
//! obstruction / twin / module primitives the kernelization is built on.

use crate::bitset::VertexSet;
use std::collections::BTreeSet;
use std::fmt;

pub type Vertex = usize;

/// An unordered pair of distinct vertices, stored as `(min, max)`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pair {
    u: Vertex,
    v: Vertex,
}

impl Pair {
    /// Panics if `u == v`; a loop is never a meaningful edit.
    pub fn new(u: Vertex, v: Vertex) -> Self {
        assert_ne!(u, v, "pair endpoints must differ");
        Pair {
            u: u.min(v),
            v: u.max(v),
        }
    }

    pub fn lo(&self) -> Vertex {
        self.u
    }

    pub fn hi(&self) -> Vertex {
        self.v
    }

    pub fn endpoints(&self) -> (Vertex, Vertex) {
        (self.u, self.v)
    }
}

impl fmt::Debug for Pair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{},{}}}", self.u, self.v)
    }
}

/// A set of unordered vertex pairs. Interpreted as symmetric-difference edits,
/// pure deletions, or pure additions depending on the solving mode.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct EditSet {
    pairs: BTreeSet<Pair>,
}

impl EditSet {
    pub fn new() -> Self {
        EditSet::default()
    }

    pub fn from_pairs<I: IntoIterator<Item = Pair>>(pairs: I) -> Self {
        EditSet {
            pairs: pairs.into_iter().collect(),
        }
    }

    /// Returns false if the pair was already present.
    pub fn insert(&mut self, p: Pair) -> bool {
        self.pairs.insert(p)
    }

    pub fn remove(&mut self, p: &Pair) -> bool {
        self.pairs.remove(p)
    }

    pub fn contains(&self, p: &Pair) -> bool {
        self.pairs.contains(p)
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Pair> {
        self.pairs.iter()
    }
}

impl fmt::Debug for EditSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.pairs.iter()).finish()
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub enum ObstructionKind {
    P4,
    C4,
}

/// A 4-vertex witness that a graph is not trivially perfect: an induced path
/// (vertices in path order) or an induced cycle (vertices in cycle order).
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Obstruction {
    pub kind: ObstructionKind,
    pub vertices: [Vertex; 4],
}

impl Obstruction {
    /// Classifies the subgraph induced by four distinct vertices, returning a
    /// canonically ordered obstruction if it is a P4 or C4.
    ///
    /// P4s are stored with the smaller endpoint first; C4s start at the
    /// smallest vertex and continue toward its smaller cycle neighbor.
    pub fn from_vertices(g: &Graph, w: [Vertex; 4]) -> Option<Obstruction> {
        let mut deg = [0usize; 4];
        let mut edges = 0;
        for i in 0..4 {
            for j in i + 1..4 {
                if g.has_edge(w[i], w[j]) {
                    deg[i] += 1;
                    deg[j] += 1;
                    edges += 1;
                }
            }
        }
        match edges {
            3 => {
                let mut sorted = deg;
                sorted.sort_unstable();
                if sorted != [1, 1, 2, 2] {
                    return None; // triangle plus isolated vertex, or a star
                }
                let mut ends: Vec<Vertex> =
                    (0..4).filter(|&i| deg[i] == 1).map(|i| w[i]).collect();
                ends.sort_unstable();
                let (a, d) = (ends[0], ends[1]);
                let b = w.iter().copied().find(|&x| g.has_edge(a, x))?;
                let c = w.iter().copied().find(|&x| g.has_edge(d, x))?;
                if !g.has_edge(b, c) {
                    return None; // disconnected: an edge plus an isolated pair has 2 edges, unreachable
                }
                Some(Obstruction {
                    kind: ObstructionKind::P4,
                    vertices: [a, b, c, d],
                })
            }
            4 => {
                if deg != [2, 2, 2, 2] {
                    return None; // paw
                }
                let mut vs = w;
                vs.sort_unstable();
                let a = vs[0];
                let mut nbrs: Vec<Vertex> =
                    vs[1..].iter().copied().filter(|&x| g.has_edge(a, x)).collect();
                nbrs.sort_unstable();
                let b = nbrs[0];
                let d = nbrs[1];
                let c = vs[1..]
                    .iter()
                    .copied()
                    .find(|&x| x != b && x != d)
                    .expect("fourth vertex");
                Some(Obstruction {
                    kind: ObstructionKind::C4,
                    vertices: [a, b, c, d],
                })
            }
            _ => None,
        }
    }

    pub fn vertex_set(&self, capacity: usize) -> VertexSet {
        VertexSet::from_iter(capacity, self.vertices.iter().copied())
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.vertices.contains(&v)
    }

    /// Checks the induced subgraph really matches the stored kind and order.
    pub fn verify(&self, g: &Graph) -> bool {
        let [a, b, c, d] = self.vertices;
        let path = g.has_edge(a, b) && g.has_edge(b, c) && g.has_edge(c, d);
        match self.kind {
            ObstructionKind::P4 => {
                path && !g.has_edge(a, c) && !g.has_edge(a, d) && !g.has_edge(b, d)
            }
            ObstructionKind::C4 => {
                path && g.has_edge(d, a) && !g.has_edge(a, c) && !g.has_edge(b, d)
            }
        }
    }

    /// Unordered pairs spanned by the four vertices: 3 edges and 3 non-edges
    /// for a P4, 4 edges and 2 non-edges for a C4.
    pub fn all_pairs(&self) -> Vec<Pair> {
        let w = self.vertices;
        let mut out = Vec::with_capacity(6);
        for i in 0..4 {
            for j in i + 1..4 {
                out.push(Pair::new(w[i], w[j]));
            }
        }
        out.sort_unstable();
        out
    }
}

/// How a witness obstruction violates the modulator conditions: it meets the
/// candidate set in at most one vertex, or in exactly two vertices arranged in
/// one of the two forbidden patterns (a C4 with the two set vertices adjacent,
/// or a P4 with both endpoints in the set).
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ModulatorViolation {
    SharesAtMostOne,
    ForbiddenPair,
}

/// Mapping produced by vertex deletions: survivors are renumbered densely,
/// preserving their relative order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Remap {
    pub old_to_new: Vec<Option<Vertex>>,
    pub new_to_old: Vec<Vertex>,
}

impl Remap {
    pub fn identity(n: usize) -> Self {
        Remap {
            old_to_new: (0..n).map(Some).collect(),
            new_to_old: (0..n).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GraphError {
    /// An edit pair references a vertex id outside `[0, n)`.
    PairOutOfRange { pair: (Vertex, Vertex), n: usize },
    /// A vertex argument is outside `[0, n)`.
    VertexOutOfRange { vertex: Vertex, n: usize },
}

impl fmt::Display for GraphError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphError::PairOutOfRange { pair, n } => {
                write!(f, "pair {{{},{}}} out of range for graph on {} vertices", pair.0, pair.1, n)
            }
            GraphError::VertexOutOfRange { vertex, n } => {
                write!(f, "vertex {} out of range for graph on {} vertices", vertex, n)
            }
        }
    }
}

impl std::error::Error for GraphError {}

/// A simple undirected graph on dense vertex ids `[0, n)`.
///
/// Value-semantic: every mutating operation either takes `&mut self` before
/// the graph is shared, or returns a fresh copy. Labels are opaque metadata
/// used by file IO and the hardness reduction; no algorithm reads them.
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<VertexSet>,
    m: usize,
    labels: Vec<Option<String>>,
}

impl Graph {
    pub fn new(n: usize) -> Self {
        Graph {
            adj: (0..n).map(|_| VertexSet::new(n)).collect(),
            m: 0,
            labels: vec![None; n],
        }
    }

    pub fn from_edges(n: usize, edges: &[(Vertex, Vertex)]) -> Self {
        let mut g = Graph::new(n);
        for &(u, v) in edges {
            g.add_edge(u, v);
        }
        g
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        u != v && self.adj[u].contains(v)
    }

    /// Returns false if the edge was already present.
    pub fn add_edge(&mut self, u: Vertex, v: Vertex) -> bool {
        assert_ne!(u, v, "no self-loops");
        if self.adj[u].contains(v) {
            return false;
        }
        self.adj[u].insert(v);
        self.adj[v].insert(u);
        self.m += 1;
        true
    }

    pub fn remove_edge(&mut self, u: Vertex, v: Vertex) -> bool {
        if u == v || !self.adj[u].contains(v) {
            return false;
        }
        self.adj[u].remove(v);
        self.adj[v].remove(u);
        self.m -= 1;
        true
    }

    pub fn toggle_edge(&mut self, u: Vertex, v: Vertex) {
        if self.has_edge(u, v) {
            self.remove_edge(u, v);
        } else {
            self.add_edge(u, v);
        }
    }

    pub fn neighbors(&self, v: Vertex) -> &VertexSet {
        &self.adj[v]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n()).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    pub fn vertices(&self) -> std::ops::Range<Vertex> {
        0..self.n()
    }

    pub fn vertex_set(&self) -> VertexSet {
        VertexSet::full(self.n())
    }

    /// Edges as canonical pairs, ascending.
    pub fn edges(&self) -> Vec<Pair> {
        let mut out = Vec::with_capacity(self.m);
        for u in self.vertices() {
            let mut v = self.adj[u].next_after(u);
            while let Some(w) = v {
                out.push(Pair::new(u, w));
                v = self.adj[u].next_after(w);
            }
        }
        out
    }

    pub fn label(&self, v: Vertex) -> Option<&str> {
        self.labels[v].as_deref()
    }

    pub fn set_label(&mut self, v: Vertex, label: impl Into<String>) {
        self.labels[v] = Some(label.into());
    }

    /// Symmetric difference with an edit set: the result has edge `uv` iff
    /// exactly one of "`uv` is an edge" and "`uv` is in `edits`" holds.
    pub fn apply_edits(&self, edits: &EditSet) -> Result<Graph, GraphError> {
        for p in edits.iter() {
            if p.hi() >= self.n() {
                return Err(GraphError::PairOutOfRange {
                    pair: p.endpoints(),
                    n: self.n(),
                });
            }
        }
        let mut g = self.clone();
        for p in edits.iter() {
            g.toggle_edge(p.lo(), p.hi());
        }
        Ok(g)
    }

    /// Deletes a set of vertices, renumbering survivors densely.
    pub fn remove_vertices(&self, drop: &VertexSet) -> (Graph, Remap) {
        let keep = self.vertex_set().difference(drop);
        self.induced_with_remap(&keep)
    }

    /// Subgraph induced by `keep`, with the old-to-new id mapping.
    pub fn induced_with_remap(&self, keep: &VertexSet) -> (Graph, Remap) {
        let new_to_old = keep.to_vec();
        let mut old_to_new = vec![None; self.n()];
        for (new, &old) in new_to_old.iter().enumerate() {
            old_to_new[old] = Some(new);
        }
        let mut g = Graph::new(new_to_old.len());
        for (new_u, &old_u) in new_to_old.iter().enumerate() {
            g.labels[new_u] = self.labels[old_u].clone();
            let masked = self.adj[old_u].intersection(keep);
            for old_v in masked.iter() {
                if old_v > old_u {
                    let new_v = old_to_new[old_v].expect("kept vertex");
                    g.add_edge(new_u, new_v);
                }
            }
        }
        (g, Remap { old_to_new, new_to_old })
    }

    /// Complement of the subgraph induced by `s`: a graph on `|s|` vertices
    /// whose edges are exactly the non-edges within `s`, plus the id remap.
    pub fn complement_induced(&self, s: &VertexSet) -> (Graph, Remap) {
        let (sub, remap) = self.induced_with_remap(s);
        let k = sub.n();
        let mut g = Graph::new(k);
        g.labels = sub.labels.clone();
        for u in 0..k {
            for v in u + 1..k {
                if !sub.has_edge(u, v) {
                    g.add_edge(u, v);
                }
            }
        }
        (g, remap)
    }

    /// True iff all vertices of `m` have the same neighborhood outside `m`.
    /// Singletons, the empty set and the whole vertex set are always modules.
    pub fn is_module(&self, m: &VertexSet) -> bool {
        let outside = self.vertex_set().difference(m);
        for w in outside.iter() {
            let hits = self.adj[w].intersection(m);
            if !hits.is_empty() && hits != *m {
                return false;
            }
        }
        true
    }

    pub fn is_clique(&self, s: &VertexSet) -> bool {
        for v in s.iter() {
            let mut need = s.clone();
            need.remove(v);
            if !need.is_subset_of(&self.adj[v]) {
                return false;
            }
        }
        true
    }

    /// Maximal classes of vertices with pairwise equal closed neighborhoods.
    /// Classes are sorted by smallest member; members ascending. Every class
    /// induces a clique.
    pub fn true_twin_classes(&self) -> Vec<Vec<Vertex>> {
        let mut classes: Vec<Vec<Vertex>> = Vec::new();
        let mut by_key: std::collections::HashMap<VertexSet, usize> =
            std::collections::HashMap::new();
        for v in self.vertices() {
            let mut closed = self.adj[v].clone();
            closed.insert(v);
            match by_key.entry(closed) {
                std::collections::hash_map::Entry::Occupied(e) => {
                    classes[*e.get()].push(v)
                }
                std::collections::hash_map::Entry::Vacant(e) => {
                    e.insert(classes.len());
                    classes.push(vec![v]);
                }
            }
        }
        // Vertices were scanned ascending, so each class is ascending and the
        // classes are already ordered by smallest member.
        classes
    }

    /// Connected components as vertex sets, sorted by smallest vertex.
    pub fn components(&self) -> Vec<VertexSet> {
        self.components_within(&self.vertex_set())
    }

    /// Connected components of the subgraph induced by `mask`.
    pub fn components_within(&self, mask: &VertexSet) -> Vec<VertexSet> {
        let mut unseen = mask.clone();
        let mut out = Vec::new();
        while let Some(start) = unseen.first() {
            let mut comp = VertexSet::new(self.n());
            comp.insert(start);
            unseen.remove(start);
            let mut frontier = vec![start];
            while let Some(v) = frontier.pop() {
                let fresh = self.adj[v].intersection(&unseen);
                for w in fresh.iter() {
                    comp.insert(w);
                    unseen.remove(w);
                    frontier.push(w);
                }
            }
            out.push(comp);
        }
        out
    }

    /// Vertices adjacent to every other vertex of `mask` (the universal clique
    /// of the induced subgraph).
    pub fn universal_within(&self, mask: &VertexSet) -> VertexSet {
        let mut out = VertexSet::new(self.n());
        for v in mask.iter() {
            let mut want = mask.clone();
            want.remove(v);
            if want.is_subset_of(&self.adj[v]) {
                out.insert(v);
            }
        }
        out
    }

    /// First induced P4 or C4 in the fixed deterministic scan order:
    /// 4-subsets `{a<b<c<d}` lexicographically, with shape-based pruning on
    /// the first three vertices. Returns None iff the graph is trivially
    /// perfect.
    pub fn find_obstruction(&self) -> Option<Obstruction> {
        let n = self.n();
        for a in 0..n {
            for b in a + 1..n {
                for c in b + 1..n {
                    let eab = self.has_edge(a, b);
                    let eac = self.has_edge(a, c);
                    let ebc = self.has_edge(b, c);
                    let count = eab as u8 + eac as u8 + ebc as u8;
                    let d = match count {
                        // A triangle or independent triple extends to neither
                        // shape: both targets are triangle-free with >= 3 edges.
                        0 | 3 => None,
                        2 => {
                            let (mid, p, q) = if !eab {
                                (c, a, b)
                            } else if !eac {
                                (b, a, c)
                            } else {
                                (a, b, c)
                            };
                            let mut cands = self.adj[p].union(&self.adj[q]);
                            cands.difference_with(&self.adj[mid]);
                            cands.next_after(c)
                        }
                        _ => {
                            let (x, y, z) = if eab {
                                (a, b, c)
                            } else if eac {
                                (a, c, b)
                            } else {
                                (b, c, a)
                            };
                            // d must see the isolated vertex and exactly one
                            // endpoint of the edge.
                            let one_end = {
                                let mut s = self.adj[x].union(&self.adj[y]);
                                let both = self.adj[x].intersection(&self.adj[y]);
                                s.difference_with(&both);
                                s
                            };
                            let cands = one_end.intersection(&self.adj[z]);
                            cands.next_after(c)
                        }
                    };
                    if let Some(d) = d {
                        return Obstruction::from_vertices(self, [a, b, c, d]);
                    }
                }
            }
        }
        None
    }

    /// Searches for an obstruction violating the modulator conditions with
    /// respect to `x`: one meeting `x` in at most one vertex, or meeting it in
    /// exactly two vertices in a forbidden pattern. Returns None iff `x` is a
    /// valid modulator (in particular, `G - x` is then trivially perfect).
    pub fn find_obstruction_avoiding(
        &self,
        x: &VertexSet,
    ) -> Option<(Obstruction, ModulatorViolation)> {
        let rest = self.vertex_set().difference(x);
        if let Some(w) = crate::tp::tp_witness_within(self, &rest) {
            return Some((w, ModulatorViolation::SharesAtMostOne));
        }
        // G - x is trivially perfect, so an obstruction in G - x + {xv} must
        // contain xv and meets x exactly once.
        for xv in x.iter() {
            let mut mask = rest.clone();
            mask.insert(xv);
            if let Some(w) = crate::tp::tp_witness_within(self, &mask) {
                return Some((w, ModulatorViolation::SharesAtMostOne));
            }
        }
        // Forbidden two-vertex patterns around an edge y1 y2 outside x:
        // a P4 x1-y1-y2-x2 or a C4 x1-y1-y2-x2-x1.
        for y1 in rest.iter() {
            let nbrs = self.adj[y1].intersection(&rest);
            let mut y2opt = nbrs.next_after(y1);
            while let Some(y2) = y2opt {
                let side1 = {
                    let mut s = self.adj[y1].intersection(x);
                    s.difference_with(&self.adj[y2]);
                    s
                };
                let side2 = {
                    let mut s = self.adj[y2].intersection(x);
                    s.difference_with(&self.adj[y1]);
                    s
                };
                if !side1.is_empty() && !side2.is_empty() {
                    for x1 in side1.iter() {
                        let missing = side2.difference(&self.adj[x1]);
                        if let Some(x2) = missing.first() {
                            let w = Obstruction::from_vertices(self, [x1, y1, y2, x2])
                                .expect("induced P4");
                            debug_assert_eq!(w.kind, ObstructionKind::P4);
                            return Some((w, ModulatorViolation::ForbiddenPair));
                        }
                        let linked = side2.intersection(&self.adj[x1]);
                        if let Some(x2) = linked.first() {
                            let w = Obstruction::from_vertices(self, [x1, y1, y2, x2])
                                .expect("induced C4");
                            debug_assert_eq!(w.kind, ObstructionKind::C4);
                            return Some((w, ModulatorViolation::ForbiddenPair));
                        }
                    }
                }
                y2opt = nbrs.next_after(y2);
            }
        }
        None
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph(n={}, m={}, edges=", self.n(), self.m())?;
        f.debug_list().entries(self.edges().iter()).finish()?;
        write!(f, ")")
    }
}
