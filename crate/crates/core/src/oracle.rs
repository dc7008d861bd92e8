//! Exhaustive reference implementations, independent of the optimized code
//! paths they are used to check. Everything here enumerates; nothing here is
//! meant to run on more than a couple dozen vertices.

use crate::bitset::VertexSet;
use crate::graph::{Graph, Obstruction, Pair, Vertex};

/// Every induced P4/C4, by lexicographic 4-subset enumeration.
pub fn all_obstructions(g: &Graph) -> Vec<Obstruction> {
    let n = g.n();
    let mut out = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                for d in c + 1..n {
                    if let Some(w) = Obstruction::from_vertices(g, [a, b, c, d]) {
                        out.push(w);
                    }
                }
            }
        }
    }
    out
}

/// True iff every obstruction satisfies the modulator conditions for `x`:
/// it meets `x` in at least two vertices, and a two-vertex intersection is
/// not a C4 with the two `x`-vertices adjacent nor a P4 with both endpoints
/// in `x`.
pub fn is_tp_modulator(g: &Graph, x: &VertexSet) -> bool {
    for w in all_obstructions(g) {
        let inside: Vec<Vertex> = w.vertices.iter().copied().filter(|&v| x.contains(v)).collect();
        if inside.len() < 2 {
            return false;
        }
        if inside.len() == 2 {
            let [a, b, c, d] = w.vertices;
            let forbidden = match w.kind {
                // Path order a-b-c-d: endpoints in x.
                crate::graph::ObstructionKind::P4 => x.contains(a) && x.contains(d),
                // Cycle order a-b-c-d: the x-pair occupies two adjacent
                // corners.
                crate::graph::ObstructionKind::C4 => {
                    (x.contains(a) && x.contains(b))
                        || (x.contains(b) && x.contains(c))
                        || (x.contains(c) && x.contains(d))
                        || (x.contains(d) && x.contains(a))
                }
            };
            if forbidden {
                return false;
            }
        }
    }
    true
}

/// Maximum matching size by branching over edges.
pub fn max_matching_size(g: &Graph) -> usize {
    fn go(edges: &[Pair], used: &mut VertexSet, i: usize) -> usize {
        if i == edges.len() {
            return 0;
        }
        // Skip edge i.
        let mut best = go(edges, used, i + 1);
        let (u, v) = edges[i].endpoints();
        if !used.contains(u) && !used.contains(v) {
            used.insert(u);
            used.insert(v);
            best = best.max(1 + go(edges, used, i + 1));
            used.remove(u);
            used.remove(v);
        }
        best
    }
    let edges = g.edges();
    go(&edges, &mut VertexSet::new(g.n()), 0)
}

/// Maximum matching size using only edges with one endpoint in `a` and the
/// other in `b`.
pub fn max_bipartite_matching_size(g: &Graph, a: &VertexSet, b: &VertexSet) -> usize {
    let cross: Vec<Pair> = g
        .edges()
        .into_iter()
        .filter(|p| {
            let (u, v) = p.endpoints();
            (a.contains(u) && b.contains(v)) || (a.contains(v) && b.contains(u))
        })
        .collect();
    fn go(edges: &[Pair], used: &mut VertexSet, i: usize) -> usize {
        if i == edges.len() {
            return 0;
        }
        let mut best = go(edges, used, i + 1);
        let (u, v) = edges[i].endpoints();
        if !used.contains(u) && !used.contains(v) {
            used.insert(u);
            used.insert(v);
            best = best.max(1 + go(edges, used, i + 1));
            used.remove(u);
            used.remove(v);
        }
        best
    }
    go(&cross, &mut VertexSet::new(g.n()), 0)
}

/// Maximum independent set size by exhaustive branching on a maximum-degree
/// vertex: either it is excluded, or it is taken and its closed neighborhood
/// goes away.
pub fn max_independent_set_size(g: &Graph) -> usize {
    fn go(g: &Graph, mask: &VertexSet) -> usize {
        let mut best_v = None;
        let mut best_deg = 0;
        for v in mask.iter() {
            let d = g.neighbors(v).intersection(mask).len();
            if best_v.is_none() || d > best_deg {
                best_v = Some(v);
                best_deg = d;
            }
        }
        let Some(v) = best_v else { return 0 };
        if best_deg == 0 {
            return mask.len();
        }
        let mut without = mask.clone();
        without.remove(v);
        let skip = go(g, &without);
        without.difference_with(g.neighbors(v));
        let take = 1 + go(g, &without);
        skip.max(take)
    }
    go(g, &g.vertex_set())
}

/// All modules of `g`, as sorted vertex lists (includes the empty set,
/// singletons and the full vertex set). Enumerates all subsets.
pub fn all_modules(g: &Graph) -> Vec<Vec<Vertex>> {
    let n = g.n();
    assert!(n <= 16, "oracle limited to tiny graphs");
    let mut out = Vec::new();
    for mask in 0u32..(1u32 << n) {
        let s = VertexSet::from_iter(n, (0..n).filter(|&v| mask >> v & 1 == 1));
        if g.is_module(&s) {
            out.push(s.to_vec());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matching_oracle_on_known_graphs() {
        let triangle = Graph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]);
        assert_eq!(max_matching_size(&triangle), 1);
        let c4 = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
        assert_eq!(max_matching_size(&c4), 2);
    }

    #[test]
    fn independent_set_oracle() {
        let star = Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3)]);
        assert_eq!(max_independent_set_size(&star), 3);
    }

    #[test]
    fn module_oracle_on_p4() {
        let p4 = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]);
        let mods = all_modules(&p4);
        // Empty set, four singletons, and the full set: P4 is prime.
        assert_eq!(mods.len(), 6);
    }
}
