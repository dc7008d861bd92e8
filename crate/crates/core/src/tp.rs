//! Trivially perfect graphs: recognition with certificates, the universal
//! clique decomposition (UCD), the vertex quasi-order it induces, independent
//! sets, and the set-system predicate used in the neighborhood-counting
//! arguments.
//!
//! A graph is trivially perfect iff it has no induced P4 or C4; equivalently
//! every connected induced subgraph has a universal vertex. Recognition works
//! by repeatedly stripping the universal clique of each component; when a
//! component without a universal vertex shows up, an explicit obstruction is
//! extracted from it.

use crate::bitset::VertexSet;
use crate::graph::{Graph, Obstruction, Vertex};
use std::fmt;

/// True iff `g` has no induced P4 or C4.
pub fn is_trivially_perfect(g: &Graph) -> bool {
    tp_witness(g).is_none()
}

/// An obstruction if one exists, found by universal-clique peeling.
///
/// Faster than [`Graph::find_obstruction`] on large graphs but may return a
/// different (still deterministic) witness.
pub fn tp_witness(g: &Graph) -> Option<Obstruction> {
    tp_witness_within(g, &g.vertex_set())
}

/// Same as [`tp_witness`] restricted to the subgraph induced by `mask`.
pub fn tp_witness_within(g: &Graph, mask: &VertexSet) -> Option<Obstruction> {
    let mut stack = g.components_within(mask);
    stack.reverse();
    while let Some(comp) = stack.pop() {
        if comp.len() <= 1 {
            continue;
        }
        let uni = g.universal_within(&comp);
        if uni.is_empty() {
            return Some(extract_obstruction(g, &comp));
        }
        let rest = comp.difference(&uni);
        if !rest.is_empty() {
            let mut subs = g.components_within(&rest);
            subs.reverse();
            stack.append(&mut subs);
        }
    }
    None
}

/// Pulls a P4 or C4 out of a connected induced subgraph that has no universal
/// vertex.
///
/// Take `v` of maximum degree in the component. It is not universal, so some
/// vertex `w` sits at distance exactly two, say via `a`. Because
/// `deg(v) >= deg(a)` while `a` sees both `v` and `w`, `v` has a neighbor `u`
/// that `a` misses; then `u-v-a-w` is an induced P4, or a C4 when `uw` is an
/// edge.
fn extract_obstruction(g: &Graph, comp: &VertexSet) -> Obstruction {
    let v = comp
        .iter()
        .max_by_key(|&v| (g.neighbors(v).intersection(comp).len(), std::cmp::Reverse(v)))
        .expect("nonempty component");
    let nv = g.neighbors(v).intersection(comp);
    let mut level2 = VertexSet::new(g.n());
    for x in nv.iter() {
        level2.union_with(&g.neighbors(x).intersection(comp));
    }
    level2.difference_with(&nv);
    level2.remove(v);
    let w = level2.first().expect("non-universal vertex in a connected component has a distance-2 vertex");
    let a = nv
        .intersection(&g.neighbors(w).intersection(comp))
        .first()
        .expect("common neighbor on a shortest path");
    let mut u_cands = nv.difference(&g.neighbors(a).intersection(comp));
    u_cands.remove(a);
    let u = u_cands.first().expect("max-degree vertex has a private neighbor");
    Obstruction::from_vertices(g, [u, v, a, w]).expect("constructed quadruple induces P4 or C4")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NotTriviallyPerfect {
    pub witness: Obstruction,
}

impl fmt::Display for NotTriviallyPerfect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "graph is not trivially perfect: induced {:?} on {:?}",
            self.witness.kind, self.witness.vertices
        )
    }
}

impl std::error::Error for NotTriviallyPerfect {}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UcdStructureError {
    EmptyBag { node: usize },
    NotAPartition,
    SingleChild { node: usize },
    BadParentLink { node: usize },
}

impl fmt::Display for UcdStructureError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UcdStructureError::EmptyBag { node } => write!(f, "node {} has an empty bag", node),
            UcdStructureError::NotAPartition => {
                write!(f, "bags do not partition a dense vertex range")
            }
            UcdStructureError::SingleChild { node } => {
                write!(f, "internal node {} has a single child", node)
            }
            UcdStructureError::BadParentLink { node } => {
                write!(f, "node {} has an inconsistent or cyclic parent link", node)
            }
        }
    }
}

impl std::error::Error for UcdStructureError {}

#[derive(Clone, Debug)]
pub struct UcdNode {
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    /// Vertices of the bag, ascending.
    pub bag: Vec<Vertex>,
    tin: usize,
    tout: usize,
    pub depth: usize,
}

/// Rooted forest of bags partitioning the vertex set of a trivially perfect
/// graph. Two vertices are adjacent iff their nodes coincide or are in
/// ancestor-descendant relation, and every bag is the universal clique of the
/// subgraph induced by its subtree.
#[derive(Clone, Debug)]
pub struct UcdForest {
    pub nodes: Vec<UcdNode>,
    pub roots: Vec<usize>,
    vertex_to_node: Vec<usize>,
    n_vertices: usize,
}

/// Relation of vertex `a` to vertex `b` in the quasi-order induced by a UCD.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Preceq {
    SameBag,
    /// `a`'s bag is a strict ancestor of `b`'s: `a` precedes `b`.
    Ancestor,
    /// `a`'s bag is a strict descendant of `b`'s.
    Descendant,
    Incomparable,
}

impl UcdForest {
    /// Assembles and validates a forest from parent links and bags.
    ///
    /// Checks that bags are nonempty and partition `[0, n)` for `n` the total
    /// bag size, that parent links are acyclic and consistent, and that every
    /// internal node has at least two children.
    pub fn from_parts(
        parents: Vec<Option<usize>>,
        bags: Vec<Vec<Vertex>>,
    ) -> Result<UcdForest, UcdStructureError> {
        assert_eq!(parents.len(), bags.len());
        let count = parents.len();
        let n_vertices: usize = bags.iter().map(|b| b.len()).sum();
        for (i, b) in bags.iter().enumerate() {
            if b.is_empty() {
                return Err(UcdStructureError::EmptyBag { node: i });
            }
        }
        let mut seen = vec![false; n_vertices];
        for b in &bags {
            for &v in b {
                if v >= n_vertices || seen[v] {
                    return Err(UcdStructureError::NotAPartition);
                }
                seen[v] = true;
            }
        }
        let mut children = vec![Vec::new(); count];
        let mut roots = Vec::new();
        for (i, p) in parents.iter().enumerate() {
            match p {
                Some(p) => {
                    if *p >= count || *p == i {
                        return Err(UcdStructureError::BadParentLink { node: i });
                    }
                    children[*p].push(i);
                }
                None => roots.push(i),
            }
        }
        for (i, ch) in children.iter().enumerate() {
            if ch.len() == 1 {
                return Err(UcdStructureError::SingleChild { node: i });
            }
        }
        let mut nodes: Vec<UcdNode> = parents
            .iter()
            .zip(bags)
            .map(|(p, mut bag)| {
                bag.sort_unstable();
                UcdNode {
                    parent: *p,
                    children: Vec::new(),
                    bag,
                    tin: 0,
                    tout: 0,
                    depth: 0,
                }
            })
            .collect();
        for (i, ch) in children.into_iter().enumerate() {
            nodes[i].children = ch;
        }
        let mut forest = UcdForest {
            nodes,
            roots,
            vertex_to_node: vec![0; n_vertices],
            n_vertices,
        };
        if !forest.index() {
            return Err(UcdStructureError::BadParentLink { node: 0 });
        }
        Ok(forest)
    }

    /// Recomputes DFS intervals, depths and the vertex-to-node map. Returns
    /// false if the parent links do not form a forest.
    fn index(&mut self) -> bool {
        let mut timer = 0;
        let mut visited = 0usize;
        let roots = self.roots.clone();
        for root in roots {
            let mut stack = vec![(root, false)];
            while let Some((t, done)) = stack.pop() {
                if done {
                    self.nodes[t].tout = timer;
                    timer += 1;
                    continue;
                }
                visited += 1;
                self.nodes[t].tin = timer;
                timer += 1;
                self.nodes[t].depth = match self.nodes[t].parent {
                    Some(p) => self.nodes[p].depth + 1,
                    None => 0,
                };
                for &v in &self.nodes[t].bag {
                    self.vertex_to_node[v] = t;
                }
                stack.push((t, true));
                for &c in self.nodes[t].children.iter().rev() {
                    stack.push((c, false));
                }
            }
        }
        visited == self.nodes.len()
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn node_of(&self, v: Vertex) -> usize {
        self.vertex_to_node[v]
    }

    /// True iff `a` is an ancestor of `b` (or equal).
    pub fn is_ancestor(&self, a: usize, b: usize) -> bool {
        self.nodes[a].tin <= self.nodes[b].tin && self.nodes[b].tout <= self.nodes[a].tout
    }

    /// DFS entry/exit times of a node; `u` lies in the subtree of `t` iff its
    /// interval nests inside `t`'s.
    pub fn dfs_range(&self, t: usize) -> (usize, usize) {
        (self.nodes[t].tin, self.nodes[t].tout)
    }

    pub fn lca(&self, a: usize, b: usize) -> Option<usize> {
        let (mut a, mut b) = (a, b);
        while self.nodes[a].depth > self.nodes[b].depth {
            a = self.nodes[a].parent?;
        }
        while self.nodes[b].depth > self.nodes[a].depth {
            b = self.nodes[b].parent?;
        }
        while a != b {
            a = self.nodes[a].parent?;
            b = self.nodes[b].parent?;
        }
        Some(a)
    }

    /// Node ids of the subtree rooted at `t`, preorder.
    pub fn subtree(&self, t: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![t];
        while let Some(s) = stack.pop() {
            out.push(s);
            for &c in self.nodes[s].children.iter().rev() {
                stack.push(c);
            }
        }
        out
    }

    /// All vertices contained in bags of the subtree rooted at `t`.
    pub fn subtree_vertices(&self, t: usize) -> VertexSet {
        let mut out = VertexSet::new(self.n_vertices);
        for s in self.subtree(t) {
            for &v in &self.nodes[s].bag {
                out.insert(v);
            }
        }
        out
    }

    pub fn root_of(&self, t: usize) -> usize {
        let mut t = t;
        while let Some(p) = self.nodes[t].parent {
            t = p;
        }
        t
    }

    pub fn leaf_nodes(&self) -> Vec<usize> {
        (0..self.nodes.len())
            .filter(|&t| self.nodes[t].children.is_empty())
            .collect()
    }

    /// Classifies the pair `(a, b)` in the quasi-order. `a` and `b` are
    /// comparable iff they are adjacent or equal in the decomposed graph.
    pub fn preceq(&self, a: Vertex, b: Vertex) -> Preceq {
        let (ta, tb) = (self.node_of(a), self.node_of(b));
        if ta == tb {
            Preceq::SameBag
        } else if self.is_ancestor(ta, tb) {
            Preceq::Ancestor
        } else if self.is_ancestor(tb, ta) {
            Preceq::Descendant
        } else {
            Preceq::Incomparable
        }
    }

    /// The graph this forest decomposes: edges exactly between same-bag pairs
    /// and ancestor-descendant bag pairs.
    pub fn to_graph(&self) -> Graph {
        let mut g = Graph::new(self.n_vertices);
        for root in &self.roots {
            // path = bags of ancestors on the current DFS path
            let mut path: Vec<Vertex> = Vec::new();
            let mut stack = vec![(*root, false)];
            while let Some((t, done)) = stack.pop() {
                let bag = &self.nodes[t].bag;
                if done {
                    path.truncate(path.len() - bag.len());
                    continue;
                }
                for (i, &u) in bag.iter().enumerate() {
                    for &w in &path {
                        g.add_edge(u, w);
                    }
                    for &w in &bag[i + 1..] {
                        g.add_edge(u, w);
                    }
                }
                path.extend_from_slice(bag);
                stack.push((t, true));
                for &c in self.nodes[t].children.iter().rev() {
                    stack.push((c, false));
                }
            }
        }
        g
    }
}

/// Builds the universal clique decomposition of a trivially perfect graph,
/// one tree per connected component. Node ids follow a deterministic DFS:
/// components ordered by smallest vertex, children likewise.
pub fn build_ucd(g: &Graph) -> Result<UcdForest, NotTriviallyPerfect> {
    let mut nodes: Vec<UcdNode> = Vec::new();
    let mut roots = Vec::new();
    let mut vertex_to_node = vec![0usize; g.n()];
    // Stack entries: (component mask, parent node id).
    let mut stack: Vec<(VertexSet, Option<usize>)> = Vec::new();
    let mut comps = g.components();
    comps.reverse();
    for c in comps {
        stack.push((c, None));
    }
    while let Some((comp, parent)) = stack.pop() {
        let uni = g.universal_within(&comp);
        if uni.is_empty() {
            return Err(NotTriviallyPerfect {
                witness: extract_obstruction(g, &comp),
            });
        }
        let id = nodes.len();
        nodes.push(UcdNode {
            parent,
            children: Vec::new(),
            bag: uni.to_vec(),
            tin: 0,
            tout: 0,
            depth: 0,
        });
        match parent {
            Some(p) => nodes[p].children.push(id),
            None => roots.push(id),
        }
        for &v in &nodes[id].bag {
            vertex_to_node[v] = id;
        }
        let rest = comp.difference(&uni);
        if !rest.is_empty() {
            let mut subs = g.components_within(&rest);
            subs.reverse();
            for c in subs {
                stack.push((c, Some(id)));
            }
        }
    }
    let mut forest = UcdForest {
        nodes,
        roots,
        vertex_to_node,
        n_vertices: g.n(),
    };
    let ok = forest.index();
    debug_assert!(ok);
    Ok(forest)
}

/// Maximum independent set size of a trivially perfect graph, with one
/// witness set: the number of leaf bags of its UCD, taking the smallest
/// vertex of each leaf bag. The witness is ascending.
pub fn alpha_tp(g: &Graph) -> Result<(usize, Vec<Vertex>), NotTriviallyPerfect> {
    let ucd = build_ucd(g)?;
    let mut witness: Vec<Vertex> = ucd
        .leaf_nodes()
        .iter()
        .map(|&t| ucd.nodes[t].bag[0])
        .collect();
    witness.sort_unstable();
    Ok((witness.len(), witness))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetFamilyError {
    pub member: usize,
}

impl fmt::Display for SetFamilyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "member {} not contained in the ground set", self.member)
    }
}

impl std::error::Error for SetFamilyError {}

/// A family of subsets of a ground set `{0, ..., ground - 1}` with
/// `ground <= 64`; members are bitmasks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetFamily {
    ground: usize,
    members: Vec<u64>,
}

impl SetFamily {
    pub fn new(ground: usize, members: Vec<u64>) -> Result<SetFamily, SetFamilyError> {
        assert!(ground <= 64);
        let mask = if ground == 64 {
            u64::MAX
        } else {
            (1u64 << ground) - 1
        };
        for (i, &m) in members.iter().enumerate() {
            if m & !mask != 0 {
                return Err(SetFamilyError { member: i });
            }
        }
        Ok(SetFamily { ground, members })
    }

    pub fn ground_size(&self) -> usize {
        self.ground
    }

    pub fn members(&self) -> &[u64] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// True iff for all members `X1`, `X2` and all `x1 in X1 \ X2`,
/// `x2 in X2 \ X1`, no member contains both `x1` and `x2`.
pub fn is_tp_set_system(f: &SetFamily) -> bool {
    let ms = f.members();
    for (i, &x1) in ms.iter().enumerate() {
        for &x2 in &ms[i + 1..] {
            let d1 = x1 & !x2;
            let d2 = x2 & !x1;
            if d1 == 0 || d2 == 0 {
                continue;
            }
            // Some member joining the two differences breaks the property.
            if ms.iter().any(|&y| y & d1 != 0 && y & d2 != 0) {
                return false;
            }
        }
    }
    true
}
