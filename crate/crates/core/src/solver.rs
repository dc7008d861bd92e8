//! Exact solvers for trivially perfect editing, deletion and completion.
//!
//! `solve_branching` is the bounded search tree: find an obstruction, branch
//! over the permitted edits touching it. It is the verification oracle for
//! every safeness and equivalence test in this crate. `solve_bruteforce`
//! enumerates edit sets outright and exists to check the branching solver on
//! tiny instances.

use crate::graph::{EditSet, Graph, Obstruction, Pair};
use crate::kernel::Mode;
use crate::tp::{tp_witness, tp_witness_within};
use std::fmt;

/// Default branching-node budget; the test suites stay far below it.
pub const DEFAULT_NODE_LIMIT: u64 = 100_000_000;

/// Default cap on the number of edit sets `solve_bruteforce` and
/// `optimal_editsets` may enumerate.
pub const DEFAULT_ENUMERATION_LIMIT: u64 = 20_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveOutcome {
    /// A mode-legal edit set of size at most `k`.
    Feasible(EditSet),
    Infeasible,
    /// The node budget ran out before the instance was decided. Distinct from
    /// infeasible on purpose.
    ResourceExceeded,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveResult {
    pub outcome: SolveOutcome,
    pub nodes_explored: u64,
}

impl SolveResult {
    /// `Some(true)` / `Some(false)` when decided, `None` on resource limit.
    pub fn decided(&self) -> Option<bool> {
        match &self.outcome {
            SolveOutcome::Feasible(_) => Some(true),
            SolveOutcome::Infeasible => Some(false),
            SolveOutcome::ResourceExceeded => None,
        }
    }

    pub fn witness(&self) -> Option<&EditSet> {
        match &self.outcome {
            SolveOutcome::Feasible(f) => Some(f),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnumerationTooLarge {
    pub candidate_pairs: usize,
    pub budget: u64,
}

impl fmt::Display for EnumerationTooLarge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "enumerating edit sets over {} candidate pairs up to size {} exceeds the guard",
            self.candidate_pairs, self.budget
        )
    }
}

impl std::error::Error for EnumerationTooLarge {}

/// Pairs the current mode may still edit, given the obstruction to destroy.
///
/// Editing branches over all six pairs of the four vertices; deletion only
/// over its present edges (3 for a P4, 4 for a C4); completion only over its
/// absent pairs (3 for a P4, 2 for a C4). Canonical pair order throughout.
fn branch_pairs(g: &Graph, w: &Obstruction, mode: Mode) -> Vec<Pair> {
    w.all_pairs()
        .into_iter()
        .filter(|p| match mode {
            Mode::Editing => true,
            Mode::Deletion => g.has_edge(p.lo(), p.hi()),
            Mode::Completion => !g.has_edge(p.lo(), p.hi()),
        })
        .collect()
}

/// Greedy vertex-disjoint obstruction packing of size at most `cap`.
/// Any editing set must contain a pair inside each packed obstruction, so a
/// packing larger than the remaining budget closes the branch.
fn packing_lower_bound(g: &Graph, cap: u64) -> u64 {
    let mut mask = g.vertex_set();
    let mut count = 0;
    while count < cap {
        match tp_witness_within(g, &mask) {
            Some(w) => {
                count += 1;
                for v in w.vertices {
                    mask.remove(v);
                }
            }
            None => break,
        }
    }
    count
}

struct Searcher {
    g: Graph,
    path: Vec<Pair>,
    mode: Mode,
    nodes: u64,
    limit: u64,
}

enum Verdict {
    Yes(EditSet),
    No,
    Out,
}

impl Searcher {
    fn run(&mut self, k: u64) -> Verdict {
        self.nodes += 1;
        if self.nodes > self.limit {
            return Verdict::Out;
        }
        let witness = match tp_witness(&self.g) {
            None => return Verdict::Yes(EditSet::from_pairs(self.path.iter().copied())),
            Some(w) => w,
        };
        if k == 0 {
            return Verdict::No;
        }
        if packing_lower_bound(&self.g, k + 1) > k {
            return Verdict::No;
        }
        for pair in branch_pairs(&self.g, &witness, self.mode) {
            // Re-toggling a pair already edited on this path revisits a state
            // and never appears in a minimal solution.
            if self.path.contains(&pair) {
                continue;
            }
            self.g.toggle_edge(pair.lo(), pair.hi());
            self.path.push(pair);
            let verdict = self.run(k - 1);
            self.path.pop();
            self.g.toggle_edge(pair.lo(), pair.hi());
            match verdict {
                Verdict::No => {}
                done => return done,
            }
        }
        Verdict::No
    }
}

pub fn solve_branching(g: &Graph, k: u64, mode: Mode) -> SolveResult {
    solve_branching_limited(g, k, mode, DEFAULT_NODE_LIMIT)
}

pub fn solve_branching_limited(g: &Graph, k: u64, mode: Mode, node_limit: u64) -> SolveResult {
    let mut searcher = Searcher {
        g: g.clone(),
        path: Vec::new(),
        mode,
        nodes: 0,
        limit: node_limit,
    };
    let outcome = match searcher.run(k) {
        Verdict::Yes(f) => SolveOutcome::Feasible(f),
        Verdict::No => SolveOutcome::Infeasible,
        Verdict::Out => SolveOutcome::ResourceExceeded,
    };
    SolveResult {
        outcome,
        nodes_explored: searcher.nodes,
    }
}

fn candidate_pairs(g: &Graph, mode: Mode) -> Vec<Pair> {
    let mut out = Vec::new();
    for u in g.vertices() {
        for v in u + 1..g.n() {
            let is_edge = g.has_edge(u, v);
            let keep = match mode {
                Mode::Editing => true,
                Mode::Deletion => is_edge,
                Mode::Completion => !is_edge,
            };
            if keep {
                out.push(Pair::new(u, v));
            }
        }
    }
    out
}

fn subsets_up_to(p: usize, k: u64) -> u64 {
    let mut total: u64 = 0;
    let mut binom: u64 = 1;
    for s in 0..=k {
        total = total.saturating_add(binom);
        binom = binom
            .saturating_mul((p as u64).saturating_sub(s))
            .checked_div(s + 1)
            .unwrap_or(u64::MAX);
    }
    total
}

/// Enumerates subsets of `items` of exactly `size` in lexicographic order,
/// calling `f` until it returns true; returns the first accepted subset.
fn first_combination<F: FnMut(&[Pair]) -> bool>(
    items: &[Pair],
    size: usize,
    f: &mut F,
) -> Option<Vec<Pair>> {
    fn rec<F: FnMut(&[Pair]) -> bool>(
        items: &[Pair],
        size: usize,
        start: usize,
        cur: &mut Vec<Pair>,
        f: &mut F,
    ) -> bool {
        if cur.len() == size {
            return f(cur);
        }
        let need = size - cur.len();
        for i in start..=items.len().saturating_sub(need) {
            cur.push(items[i]);
            if rec(items, size, i + 1, cur, f) {
                return true;
            }
            cur.pop();
        }
        false
    }
    let mut cur = Vec::with_capacity(size);
    if rec(items, size, 0, &mut cur, f) {
        Some(cur)
    } else {
        None
    }
}

/// Decides the instance by enumerating all mode-legal edit sets of size at
/// most `k` in lexicographic order and returning the first feasible one.
pub fn solve_bruteforce(g: &Graph, k: u64, mode: Mode) -> Result<SolveResult, EnumerationTooLarge> {
    solve_bruteforce_limited(g, k, mode, DEFAULT_ENUMERATION_LIMIT)
}

pub fn solve_bruteforce_limited(
    g: &Graph,
    k: u64,
    mode: Mode,
    guard: u64,
) -> Result<SolveResult, EnumerationTooLarge> {
    let cands = candidate_pairs(g, mode);
    if subsets_up_to(cands.len(), k) > guard {
        return Err(EnumerationTooLarge {
            candidate_pairs: cands.len(),
            budget: k,
        });
    }
    let mut tried: u64 = 0;
    for size in 0..=k as usize {
        let mut scratch = g.clone();
        let found = first_combination(&cands, size, &mut |subset| {
            tried += 1;
            for p in subset {
                scratch.toggle_edge(p.lo(), p.hi());
            }
            let ok = tp_witness(&scratch).is_none();
            for p in subset {
                scratch.toggle_edge(p.lo(), p.hi());
            }
            ok
        });
        if let Some(subset) = found {
            return Ok(SolveResult {
                outcome: SolveOutcome::Feasible(EditSet::from_pairs(subset)),
                nodes_explored: tried,
            });
        }
    }
    Ok(SolveResult {
        outcome: SolveOutcome::Infeasible,
        nodes_explored: tried,
    })
}

/// All minimum-size mode-legal edit sets of size at most `k`; empty if the
/// instance is infeasible at `k`. Tiny instances only.
pub fn optimal_editsets(
    g: &Graph,
    k: u64,
    mode: Mode,
) -> Result<Vec<EditSet>, EnumerationTooLarge> {
    optimal_editsets_limited(g, k, mode, DEFAULT_ENUMERATION_LIMIT)
}

pub fn optimal_editsets_limited(
    g: &Graph,
    k: u64,
    mode: Mode,
    guard: u64,
) -> Result<Vec<EditSet>, EnumerationTooLarge> {
    let cands = candidate_pairs(g, mode);
    if subsets_up_to(cands.len(), k) > guard {
        return Err(EnumerationTooLarge {
            candidate_pairs: cands.len(),
            budget: k,
        });
    }
    for size in 0..=k as usize {
        let mut hits = Vec::new();
        let mut scratch = g.clone();
        first_combination(&cands, size, &mut |subset| {
            for p in subset {
                scratch.toggle_edge(p.lo(), p.hi());
            }
            if tp_witness(&scratch).is_none() {
                hits.push(EditSet::from_pairs(subset.iter().copied()));
            }
            for p in subset {
                scratch.toggle_edge(p.lo(), p.hi());
            }
            false // keep enumerating
        });
        if !hits.is_empty() {
            return Ok(hits);
        }
    }
    Ok(Vec::new())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;

    fn c4() -> Graph {
        Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)])
    }

    fn p4() -> Graph {
        Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3)])
    }

    fn cycle(n: usize) -> Graph {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Graph::from_edges(n, &edges)
    }

    fn check_witness(g: &Graph, k: u64, mode: Mode, f: &EditSet) {
        assert!(f.len() as u64 <= k);
        for p in f.iter() {
            match mode {
                Mode::Editing => {}
                Mode::Deletion => assert!(g.has_edge(p.lo(), p.hi())),
                Mode::Completion => assert!(!g.has_edge(p.lo(), p.hi())),
            }
        }
        let edited = g.apply_edits(f).unwrap();
        assert!(crate::tp::is_trivially_perfect(&edited));
    }

    #[test]
    fn c4_editing_one() {
        let r = solve_branching(&c4(), 1, Mode::Editing);
        let f = r.witness().expect("one chord suffices");
        check_witness(&c4(), 1, Mode::Editing, f);
    }

    #[test]
    fn c4_deletion_needs_two() {
        assert_eq!(solve_branching(&c4(), 1, Mode::Deletion).decided(), Some(false));
        let r = solve_branching(&c4(), 2, Mode::Deletion);
        check_witness(&c4(), 2, Mode::Deletion, r.witness().expect("two deletions"));
    }

    #[test]
    fn p4_deletion_one() {
        let r = solve_branching(&p4(), 1, Mode::Deletion);
        check_witness(&p4(), 1, Mode::Deletion, r.witness().expect("middle edge"));
    }

    #[test]
    fn c6_editing_thresholds() {
        let g = cycle(6);
        assert_eq!(solve_bruteforce(&g, 1, Mode::Editing).unwrap().decided(), Some(false));
        let r = solve_bruteforce(&g, 2, Mode::Editing).unwrap();
        check_witness(&g, 2, Mode::Editing, r.witness().expect("every third edge"));
    }

    #[test]
    fn tp_graph_feasible_with_empty_witness() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2)]);
        for mode in [Mode::Editing, Mode::Deletion, Mode::Completion] {
            let r = solve_bruteforce(&g, 0, mode).unwrap();
            assert_eq!(r.witness().map(|f| f.len()), Some(0));
        }
    }

    #[test]
    fn branching_agrees_with_bruteforce() {
        let mut rng = Rng::new(0xacce);
        for trial in 0..600 {
            let n = rng.range(4, 8);
            let mut g = Graph::new(n);
            for u in 0..n {
                for v in u + 1..n {
                    if rng.chance(0.3 + 0.05 * (trial % 7) as f64) {
                        g.add_edge(u, v);
                    }
                }
            }
            for mode in [Mode::Editing, Mode::Deletion, Mode::Completion] {
                for k in 0..=2 {
                    let a = solve_branching(&g, k, mode);
                    let b = solve_bruteforce(&g, k, mode).unwrap();
                    assert_eq!(a.decided(), b.decided(), "{:?} k={} {:?}", mode, k, g);
                    if let Some(f) = a.witness() {
                        check_witness(&g, k, mode, f);
                    }
                }
            }
        }
    }

    #[test]
    fn feasibility_is_monotone_in_k() {
        let mut rng = Rng::new(0x0135);
        for _ in 0..200 {
            let n = rng.range(4, 9);
            let mut g = Graph::new(n);
            for u in 0..n {
                for v in u + 1..n {
                    if rng.chance(0.45) {
                        g.add_edge(u, v);
                    }
                }
            }
            for mode in [Mode::Editing, Mode::Deletion, Mode::Completion] {
                let mut prev = false;
                for k in 0..=3 {
                    let now = solve_branching(&g, k, mode).decided().unwrap();
                    assert!(!prev || now, "feasible at k but not k+1");
                    prev = now;
                }
            }
        }
    }

    #[test]
    fn resource_guard_reports_distinctly() {
        let g = cycle(12);
        let r = solve_branching_limited(&g, 4, Mode::Editing, 2);
        assert_eq!(r.outcome, SolveOutcome::ResourceExceeded);
        assert_eq!(r.decided(), None);
    }

    #[test]
    fn optima_of_k3_is_empty_set() {
        let mut k3 = Graph::new(3);
        k3.add_edge(0, 1);
        k3.add_edge(1, 2);
        k3.add_edge(0, 2);
        let opt = optimal_editsets(&k3, 2, Mode::Editing).unwrap();
        assert_eq!(opt, vec![EditSet::new()]);
    }

    #[test]
    fn enumeration_guard_fires() {
        let g = Graph::new(40);
        assert!(solve_bruteforce_limited(&g, 5, Mode::Editing, 1000).is_err());
    }
}
