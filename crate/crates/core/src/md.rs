//! Modular decomposition by recursive partition refinement, plus the
//! candidate-module enumeration used by the module reduction rule.
//!
//! The construction is the quadratic-ish textbook recursion: split on
//! connectivity, then co-connectivity, and at prime nodes compute the maximal
//! proper modules via refinement against a pivot. No attempt at linear time.

use crate::bitset::VertexSet;
use crate::graph::{Graph, Vertex};
use crate::tp::is_trivially_perfect;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum MdKind {
    Leaf,
    /// Induced subgraph disconnected; children are its components.
    Union,
    /// Complement of the induced subgraph disconnected; children are the
    /// co-components.
    Join,
    /// Neither; children are the maximal proper (strong) modules.
    Prime,
}

#[derive(Clone, Debug)]
pub struct MdNode {
    pub kind: MdKind,
    /// Vertices of the module, ascending.
    pub module: Vec<Vertex>,
    pub children: Vec<usize>,
}

/// The (unique) modular decomposition tree. Node ids are preorder with
/// children ordered by smallest contained vertex.
#[derive(Clone, Debug)]
pub struct MdTree {
    pub nodes: Vec<MdNode>,
    pub root: usize,
}

impl MdTree {
    pub fn node(&self, id: usize) -> &MdNode {
        &self.nodes[id]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

pub fn build_md(g: &Graph) -> MdTree {
    assert!(g.n() >= 1, "modular decomposition needs at least one vertex");
    let mut tree = MdTree {
        nodes: Vec::new(),
        root: 0,
    };
    build_rec(g, &g.vertex_set(), &mut tree);
    tree
}

fn build_rec(g: &Graph, s: &VertexSet, tree: &mut MdTree) -> usize {
    let id = tree.nodes.len();
    tree.nodes.push(MdNode {
        kind: MdKind::Leaf,
        module: s.to_vec(),
        children: Vec::new(),
    });
    if s.len() == 1 {
        return id;
    }

    let comps = g.components_within(s);
    if comps.len() > 1 {
        tree.nodes[id].kind = MdKind::Union;
        for c in comps {
            let child = build_rec(g, &c, tree);
            tree.nodes[id].children.push(child);
        }
        return id;
    }

    let co_comps = co_components_within(g, s);
    if co_comps.len() > 1 {
        tree.nodes[id].kind = MdKind::Join;
        for c in co_comps {
            let child = build_rec(g, &c, tree);
            tree.nodes[id].children.push(child);
        }
        return id;
    }

    tree.nodes[id].kind = MdKind::Prime;
    let parts = prime_children(g, s);
    for c in parts {
        let child = build_rec(g, &c, tree);
        tree.nodes[id].children.push(child);
    }
    id
}

/// Components of the complement of the induced subgraph, computed without
/// materializing the complement: the co-neighborhood of `v` within the
/// remaining mask is `mask \ N[v]`.
fn co_components_within(g: &Graph, mask: &VertexSet) -> Vec<VertexSet> {
    let mut unseen = mask.clone();
    let mut out = Vec::new();
    while let Some(start) = unseen.first() {
        let mut comp = VertexSet::new(g.n());
        comp.insert(start);
        unseen.remove(start);
        let mut frontier = vec![start];
        while let Some(v) = frontier.pop() {
            let mut fresh = unseen.clone();
            fresh.difference_with(g.neighbors(v));
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

/// Children of a prime node: the maximal proper modules of `G[s]`, which for
/// a connected, co-connected graph are pairwise disjoint and partition `s`.
///
/// Refining `{N(v), S \ N[v]}` by external splitters yields exactly the
/// maximal modules avoiding the pivot `v`. Each such class is either a child
/// of the prime node or lies inside the child containing `v`; the two cases
/// are told apart by whether the minimal module spanning the class and `v`
/// is the whole of `s`.
fn prime_children(g: &Graph, s: &VertexSet) -> Vec<VertexSet> {
    let v = s.first().expect("nonempty module");
    let classes = refine_around(g, s, v);

    let mut pivot_side = VertexSet::new(g.n());
    pivot_side.insert(v);
    let mut children: Vec<VertexSet> = Vec::new();
    for class in classes {
        let mut seed = class.clone();
        seed.insert(v);
        let closure = module_closure(g, s, &seed);
        if closure.len() == s.len() {
            children.push(class);
        } else {
            pivot_side.union_with(&class);
        }
    }
    children.push(pivot_side);
    children.sort_by_key(|c| c.first().expect("nonempty class"));
    children
}

/// Maximal modules of `G[s]` not containing `v`.
fn refine_around(g: &Graph, s: &VertexSet, v: Vertex) -> Vec<VertexSet> {
    let mut rest = s.clone();
    rest.remove(v);
    let nbrs = g.neighbors(v).intersection(&rest);
    let others = rest.difference(&nbrs);
    let mut classes: Vec<VertexSet> = [nbrs, others]
        .into_iter()
        .filter(|c| !c.is_empty())
        .collect();

    let mut changed = true;
    while changed {
        changed = false;
        for w in s.iter() {
            let mut next = Vec::with_capacity(classes.len());
            for class in classes.drain(..) {
                if class.contains(w) {
                    next.push(class);
                    continue;
                }
                let inside = class.intersection(g.neighbors(w));
                if inside.is_empty() || inside.len() == class.len() {
                    next.push(class);
                } else {
                    let outside = class.difference(&inside);
                    next.push(inside);
                    next.push(outside);
                    changed = true;
                }
            }
            classes = next;
        }
    }
    classes
}

/// Smallest module of `G[s]` containing `seed`: repeatedly absorb any vertex
/// with both a neighbor and a non-neighbor inside the current set.
fn module_closure(g: &Graph, s: &VertexSet, seed: &VertexSet) -> VertexSet {
    let mut t = seed.clone();
    let mut changed = true;
    while changed {
        changed = false;
        let outside = s.difference(&t);
        for w in outside.iter() {
            let inside = t.intersection(g.neighbors(w));
            if !inside.is_empty() && inside.len() != t.len() {
                t.insert(w);
                changed = true;
            }
        }
    }
    t
}

/// The module reduction rule's candidate list: every node module, plus for
/// each union node the union of its children that induce trivially perfect
/// graphs. Nodes in id order; union-node candidates appended afterwards in
/// node order.
pub fn rule4_candidates(g: &Graph, tree: &MdTree) -> Vec<Vec<Vertex>> {
    let mut out: Vec<Vec<Vertex>> = tree.nodes.iter().map(|n| n.module.clone()).collect();
    for node in &tree.nodes {
        if node.kind != MdKind::Union {
            continue;
        }
        let mut merged = VertexSet::new(g.n());
        let mut any = false;
        for &c in &node.children {
            let child_set =
                VertexSet::from_iter(g.n(), tree.nodes[c].module.iter().copied());
            let (sub, _) = g.induced_with_remap(&child_set);
            if is_trivially_perfect(&sub) {
                merged.union_with(&child_set);
                any = true;
            }
        }
        if any {
            out.push(merged.to_vec());
        }
    }
    out
}

/// True iff `module` is a node label of the tree or a union of labels of some
/// children of one union/join node. This is the completeness property the
/// decomposition is checked against.
pub fn module_explained_by_tree(g: &Graph, tree: &MdTree, module: &[Vertex]) -> bool {
    if tree.nodes.iter().any(|n| n.module == module) {
        return true;
    }
    let mset = VertexSet::from_iter(g.n(), module.iter().copied());
    for node in &tree.nodes {
        if !matches!(node.kind, MdKind::Union | MdKind::Join) {
            continue;
        }
        let mut covered = VertexSet::new(g.n());
        let mut all_aligned = true;
        for &c in &node.children {
            let cs = VertexSet::from_iter(g.n(), tree.nodes[c].module.iter().copied());
            if cs.is_subset_of(&mset) {
                covered.union_with(&cs);
            } else if cs.intersects(&mset) {
                all_aligned = false;
                break;
            }
        }
        if all_aligned && covered == mset {
            return true;
        }
    }
    false
}
