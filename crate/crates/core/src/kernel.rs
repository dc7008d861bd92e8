//! The kernelization engine: five reduction rules, modulator construction,
//! neighborhood classification over the decomposition of the modulator-free
//! part, important-bag marking, tassel/comb anatomy, and the driver that
//! shrinks an instance to a budget-bounded kernel.
//!
//! Every rule application is logged in a [`ReductionTrace`] step carrying the
//! witness, the budget before/after and the deleted vertices, so a run can be
//! replayed mechanically and audited.

use crate::bitset::VertexSet;
use crate::graph::{Graph, Pair, Remap, Vertex};
use crate::matching::{max_bipartite_matching, max_matching};
use crate::md::{build_md, rule4_candidates};
use crate::tp::{alpha_tp, build_ucd, NotTriviallyPerfect, UcdForest};
use std::collections::BTreeMap;
use std::fmt;

/// Which edits are permitted: editing toggles pairs freely, deletion may only
/// remove existing edges, completion may only add missing ones.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub enum Mode {
    Editing,
    Deletion,
    Completion,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Editing => "edit",
            Mode::Deletion => "delete",
            Mode::Completion => "complete",
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "edit" | "editing" => Ok(Mode::Editing),
            "delete" | "deletion" => Ok(Mode::Deletion),
            "complete" | "completion" => Ok(Mode::Completion),
            other => Err(format!("unknown mode '{other}' (expected edit|delete|complete)")),
        }
    }
}

/// A graph together with a nonnegative edit budget.
#[derive(Clone, Debug)]
pub struct Instance {
    pub g: Graph,
    pub k: u64,
}

impl Instance {
    pub fn new(g: Graph, k: u64) -> Self {
        Instance { g, k }
    }
}

/// The constant-size trivial no-instance `(C4, 0)` emitted in place of a
/// kernel when the input is recognized as unsolvable.
pub fn trivial_no_instance() -> Instance {
    Instance::new(Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]), 0)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum RuleId {
    /// Forced edge addition (many 4-cycles through one non-edge).
    EdgeAddition,
    /// Forced edge deletion (many induced paths through one edge).
    EdgeDeletion,
    /// Oversized true twin class loses one vertex.
    TwinReduction,
    /// Trivially perfect module keeps only a bounded independent set.
    ModuleReduction,
    /// Long comb loses one tooth.
    CombReduction,
}

impl RuleId {
    pub fn code(&self) -> u8 {
        match self {
            RuleId::EdgeAddition => 1,
            RuleId::EdgeDeletion => 2,
            RuleId::TwinReduction => 3,
            RuleId::ModuleReduction => 4,
            RuleId::CombReduction => 5,
        }
    }

    pub fn from_code(code: u8) -> Option<RuleId> {
        Some(match code {
            1 => RuleId::EdgeAddition,
            2 => RuleId::EdgeDeletion,
            3 => RuleId::TwinReduction,
            4 => RuleId::ModuleReduction,
            5 => RuleId::CombReduction,
            _ => return None,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    Pair(Pair),
    TwinVertex { vertex: Vertex, class_size: usize },
    Module { module: Vec<Vertex>, kept: Vec<Vertex> },
    CombTooth { tooth_index: usize },
}

/// One rule application. `removed` lists deleted vertices by their pre-step
/// ids, ascending; survivors are renumbered densely preserving order, which
/// determines the remap exactly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceStep {
    pub rule: RuleId,
    pub witness: Witness,
    pub k_before: u64,
    pub k_after: u64,
    pub removed: Vec<Vertex>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ReductionTrace {
    pub steps: Vec<TraceStep>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReplayError {
    pub step: usize,
    pub message: String,
}

impl fmt::Display for ReplayError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "replay failed at step {}: {}", self.step, self.message)
    }
}

impl std::error::Error for ReplayError {}

impl ReductionTrace {
    pub fn push(&mut self, step: TraceStep) {
        self.steps.push(step);
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn fire_count(&self, rule: RuleId) -> usize {
        self.steps.iter().filter(|s| s.rule == rule).count()
    }

    /// Re-applies the recorded steps mechanically, without re-deciding
    /// anything. The result must equal the original run's output.
    pub fn replay(&self, from: &Instance) -> Result<Instance, ReplayError> {
        let mut cur = from.clone();
        for (i, step) in self.steps.iter().enumerate() {
            let fail = |message: String| ReplayError { step: i, message };
            if step.k_before != cur.k {
                return Err(fail(format!(
                    "budget mismatch: expected {}, have {}",
                    step.k_before, cur.k
                )));
            }
            match step.rule {
                RuleId::EdgeAddition | RuleId::EdgeDeletion => {
                    let Witness::Pair(p) = step.witness else {
                        return Err(fail("edge step without pair witness".into()));
                    };
                    let adding = step.rule == RuleId::EdgeAddition;
                    if cur.g.has_edge(p.lo(), p.hi()) == adding {
                        return Err(fail(format!("pair {:?} in wrong state", p)));
                    }
                    cur.g.toggle_edge(p.lo(), p.hi());
                    if cur.k == 0 {
                        return Err(fail("budget underflow".into()));
                    }
                    cur.k -= 1;
                }
                RuleId::TwinReduction | RuleId::ModuleReduction | RuleId::CombReduction => {
                    let drop =
                        VertexSet::from_iter(cur.g.n(), step.removed.iter().copied());
                    if drop.len() != step.removed.len() || step.removed.iter().any(|&v| v >= cur.g.n()) {
                        return Err(fail("removed set out of range".into()));
                    }
                    let (g, _) = cur.g.remove_vertices(&drop);
                    cur.g = g;
                }
            }
            if step.k_after != cur.k {
                return Err(fail(format!(
                    "budget after step: expected {}, have {}",
                    step.k_after, cur.k
                )));
            }
        }
        Ok(cur)
    }
}

/// Why an input was recognized as a no-instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NoInstanceReason {
    /// An edge rule fired with no budget left.
    BudgetExhausted { rule: RuleId, pair: Pair },
    /// An edge rule forced an edit the mode forbids.
    ModeForbidden { rule: RuleId, pair: Pair },
    /// The greedy packing completed budget-plus-one rounds.
    ModulatorPacking { rounds: usize },
}

impl fmt::Display for NoInstanceReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NoInstanceReason::BudgetExhausted { rule, pair } => {
                write!(f, "rule {} forced an edit at {:?} with no budget left", rule.code(), pair)
            }
            NoInstanceReason::ModeForbidden { rule, pair } => {
                write!(f, "rule {} forced a mode-illegal edit at {:?}", rule.code(), pair)
            }
            NoInstanceReason::ModulatorPacking { rounds } => {
                write!(f, "obstruction packing succeeded for {} rounds", rounds)
            }
        }
    }
}

/// Result of kernelization: a reduced equivalent instance with `k' <= k`, or
/// a no-instance verdict. Both carry the full rule-application log.
#[derive(Clone, Debug)]
pub enum KernelOutcome {
    Kernel {
        inst: Instance,
        trace: ReductionTrace,
    },
    NoInstance {
        reason: NoInstanceReason,
        trace: ReductionTrace,
    },
}

impl KernelOutcome {
    pub fn trace(&self) -> &ReductionTrace {
        match self {
            KernelOutcome::Kernel { trace, .. } => trace,
            KernelOutcome::NoInstance { trace, .. } => trace,
        }
    }

    pub fn kernel(&self) -> Option<&Instance> {
        match self {
            KernelOutcome::Kernel { inst, .. } => Some(inst),
            KernelOutcome::NoInstance { .. } => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum KernelError {
    InvalidInput(String),
}

impl fmt::Display for KernelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KernelError::InvalidInput(s) => write!(f, "invalid input: {}", s),
        }
    }
}

impl std::error::Error for KernelError {}

// ---------------------------------------------------------------------------
// Threshold matching checks shared by the two edge rules
// ---------------------------------------------------------------------------

/// Does the complement of `G[a]` contain a matching of size at least `t`?
///
/// Greedy maximal matching first: reaching `t` proves yes, and a maximal
/// matching below `t/2` proves no. In between, the decision is delegated to
/// the exact blossom matching on a truncated complement subgraph: every
/// complement edge touches the greedy matching's vertices, so keeping those
/// plus enough complement-partners per covered vertex preserves whether a
/// size-`t` matching exists.
fn complement_matching_at_least(g: &Graph, a: &VertexSet, t: usize) -> bool {
    if t == 0 {
        return true;
    }
    if a.len() < 2 * t {
        return false;
    }
    let mut avail = a.clone();
    let mut matched: Vec<(Vertex, Vertex)> = Vec::new();
    while let Some(x) = avail.first() {
        avail.remove(x);
        let cands = avail.difference(g.neighbors(x));
        if let Some(y) = cands.first() {
            avail.remove(y);
            matched.push((x, y));
            if matched.len() >= t {
                return true;
            }
        }
    }
    if 2 * matched.len() < t {
        return false;
    }
    let mut cover = VertexSet::new(g.n());
    for &(x, y) in &matched {
        cover.insert(x);
        cover.insert(y);
    }
    let quota = 2 * t + 2 * matched.len() + 1;
    let mut keep = cover.clone();
    for c in cover.iter() {
        let mut partners = a.difference(g.neighbors(c));
        partners.difference_with(&cover);
        partners.remove(c);
        for (i, w) in partners.iter().enumerate() {
            if i >= quota {
                break;
            }
            keep.insert(w);
        }
    }
    let (csub, _) = g.complement_induced(&keep);
    max_matching(&csub, Some(t)).len() >= t
}

/// Does the complement graph contain a matching of size at least `t` between
/// the disjoint sets `n1` and `n2`? Same structure as
/// [`complement_matching_at_least`], with the bipartite matcher as the exact
/// fallback.
fn cross_complement_matching_at_least(
    g: &Graph,
    n1: &VertexSet,
    n2: &VertexSet,
    t: usize,
) -> bool {
    if t == 0 {
        return true;
    }
    if n1.len() < t || n2.len() < t {
        return false;
    }
    let mut avail1 = n1.clone();
    let mut avail2 = n2.clone();
    let mut matched: Vec<(Vertex, Vertex)> = Vec::new();
    while let Some(x) = avail1.first() {
        avail1.remove(x);
        let cands = avail2.difference(g.neighbors(x));
        if let Some(y) = cands.first() {
            avail2.remove(y);
            matched.push((x, y));
            if matched.len() >= t {
                return true;
            }
        }
    }
    if 2 * matched.len() < t {
        return false;
    }
    let mut cover = VertexSet::new(g.n());
    for &(x, y) in &matched {
        cover.insert(x);
        cover.insert(y);
    }
    let quota = 2 * t + 2 * matched.len() + 1;
    let mut keep = cover.clone();
    for c in cover.iter() {
        let opposite = if n1.contains(c) { n2 } else { n1 };
        let mut partners = opposite.difference(g.neighbors(c));
        partners.difference_with(&cover);
        for (i, w) in partners.iter().enumerate() {
            if i >= quota {
                break;
            }
            keep.insert(w);
        }
    }
    let (csub, remap) = g.complement_induced(&keep);
    let side1 = VertexSet::from_iter(
        csub.n(),
        keep.intersection(n1)
            .iter()
            .map(|v| remap.old_to_new[v].expect("kept")),
    );
    let side2 = VertexSet::from_iter(
        csub.n(),
        keep.intersection(n2)
            .iter()
            .map(|v| remap.old_to_new[v].expect("kept")),
    );
    max_bipartite_matching(&csub, &side1, &side2, Some(t))
        .expect("sides disjoint")
        .len()
        >= t
}

// ---------------------------------------------------------------------------
// Rules 1-4
// ---------------------------------------------------------------------------

/// Outcome of scanning one rule against an instance.
#[derive(Clone, Debug)]
pub enum RuleOutcome {
    Applied(Instance, TraceStep),
    NoInstance(NoInstanceReason),
    Inapplicable,
}

/// Edge-addition rule: a non-edge `uv` whose common neighborhood holds `k+1`
/// complement-disjoint pairs forces the edge `uv` into any solution. Adds it
/// and decrements the budget; in deletion mode the forced addition is
/// illegal, so the instance is a no-instance. Scans non-edges in canonical
/// pair order and fires on the first applicable one.
pub fn rule1_add(inst: &Instance, mode: Mode) -> RuleOutcome {
    let g = &inst.g;
    let t = inst.k as usize + 1;
    for u in g.vertices() {
        for v in u + 1..g.n() {
            if g.has_edge(u, v) {
                continue;
            }
            let common = g.neighbors(u).intersection(g.neighbors(v));
            if !complement_matching_at_least(g, &common, t) {
                continue;
            }
            let pair = Pair::new(u, v);
            if mode == Mode::Deletion {
                return RuleOutcome::NoInstance(NoInstanceReason::ModeForbidden {
                    rule: RuleId::EdgeAddition,
                    pair,
                });
            }
            if inst.k == 0 {
                return RuleOutcome::NoInstance(NoInstanceReason::BudgetExhausted {
                    rule: RuleId::EdgeAddition,
                    pair,
                });
            }
            let mut g2 = g.clone();
            g2.add_edge(u, v);
            let step = TraceStep {
                rule: RuleId::EdgeAddition,
                witness: Witness::Pair(pair),
                k_before: inst.k,
                k_after: inst.k - 1,
                removed: Vec::new(),
            };
            return RuleOutcome::Applied(Instance::new(g2, inst.k - 1), step);
        }
    }
    RuleOutcome::Inapplicable
}

/// Edge-deletion rule: an edge `uv` with a `k+1` complement matching between
/// the private neighborhoods of `u` and `v` must be deleted. In completion
/// mode the forced deletion is illegal.
pub fn rule2_delete(inst: &Instance, mode: Mode) -> RuleOutcome {
    let g = &inst.g;
    let t = inst.k as usize + 1;
    for u in g.vertices() {
        let nbrs = g.neighbors(u).clone();
        let mut vopt = nbrs.next_after(u);
        while let Some(v) = vopt {
            let mut n1 = g.neighbors(u).difference(g.neighbors(v));
            n1.remove(v);
            let mut n2 = g.neighbors(v).difference(g.neighbors(u));
            n2.remove(u);
            if cross_complement_matching_at_least(g, &n1, &n2, t) {
                let pair = Pair::new(u, v);
                if mode == Mode::Completion {
                    return RuleOutcome::NoInstance(NoInstanceReason::ModeForbidden {
                        rule: RuleId::EdgeDeletion,
                        pair,
                    });
                }
                if inst.k == 0 {
                    return RuleOutcome::NoInstance(NoInstanceReason::BudgetExhausted {
                        rule: RuleId::EdgeDeletion,
                        pair,
                    });
                }
                let mut g2 = g.clone();
                g2.remove_edge(u, v);
                let step = TraceStep {
                    rule: RuleId::EdgeDeletion,
                    witness: Witness::Pair(pair),
                    k_before: inst.k,
                    k_after: inst.k - 1,
                    removed: Vec::new(),
                };
                return RuleOutcome::Applied(Instance::new(g2, inst.k - 1), step);
            }
            vopt = nbrs.next_after(v);
        }
    }
    RuleOutcome::Inapplicable
}

/// Twin rule: a true twin class larger than `2k + 5` loses its smallest
/// vertex; the budget is unchanged.
pub fn rule3_twin(inst: &Instance) -> Option<(Instance, TraceStep)> {
    let bound = 2 * inst.k + 5;
    for class in inst.g.true_twin_classes() {
        if class.len() as u64 > bound {
            let victim = class[0];
            let drop = VertexSet::from_iter(inst.g.n(), [victim]);
            let (g2, _) = inst.g.remove_vertices(&drop);
            let step = TraceStep {
                rule: RuleId::TwinReduction,
                witness: Witness::TwinVertex {
                    vertex: victim,
                    class_size: class.len(),
                },
                k_before: inst.k,
                k_after: inst.k,
                removed: vec![victim],
            };
            return Some((Instance::new(g2, inst.k), step));
        }
    }
    None
}

/// Module rule: a module inducing a trivially perfect graph with independence
/// number at least `2k + 5` keeps only an independent set of size exactly
/// `2k + 4` (smallest witness vertices). Sound only on instances where the
/// two edge rules are inapplicable; the driver guarantees that.
pub fn rule4_module(inst: &Instance) -> Option<(Instance, TraceStep)> {
    let g = &inst.g;
    let need = 2 * inst.k + 5;
    let keep_size = (2 * inst.k + 4) as usize;
    let tree = build_md(g);
    for cand in rule4_candidates(g, &tree) {
        if (cand.len() as u64) < need {
            continue;
        }
        let cand_set = VertexSet::from_iter(g.n(), cand.iter().copied());
        let (sub, remap) = g.induced_with_remap(&cand_set);
        let Ok((alpha, witness)) = alpha_tp(&sub) else {
            continue;
        };
        if (alpha as u64) < need {
            continue;
        }
        let kept: Vec<Vertex> = witness[..keep_size]
            .iter()
            .map(|&v| remap.new_to_old[v])
            .collect();
        let kept_set = VertexSet::from_iter(g.n(), kept.iter().copied());
        let drop = cand_set.difference(&kept_set);
        let removed = drop.to_vec();
        let (g2, _) = g.remove_vertices(&drop);
        let step = TraceStep {
            rule: RuleId::ModuleReduction,
            witness: Witness::Module {
                module: cand,
                kept,
            },
            k_before: inst.k,
            k_after: inst.k,
            removed,
        };
        return Some((Instance::new(g2, inst.k), step));
    }
    None
}

// ---------------------------------------------------------------------------
// Modulator
// ---------------------------------------------------------------------------

/// A vertex set hit at least twice (and never in a forbidden pattern) by
/// every obstruction. On success `|vertices| <= 4k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Modulator {
    pub vertices: Vec<Vertex>,
    /// Number of obstructions packed while growing the set.
    pub rounds: usize,
}

/// Greedily packs violating obstructions into a modulator. `None` means the
/// packing ran for `k + 1` rounds, certifying a no-instance: each round's
/// obstruction forces an edit on pairs never counted before.
pub fn build_modulator(inst: &Instance) -> Option<Modulator> {
    let mut x = VertexSet::new(inst.g.n());
    let mut rounds = 0usize;
    loop {
        match inst.g.find_obstruction_avoiding(&x) {
            None => {
                return Some(Modulator {
                    vertices: x.to_vec(),
                    rounds,
                })
            }
            Some((w, _violation)) => {
                rounds += 1;
                if rounds as u64 > inst.k {
                    return None;
                }
                for v in w.vertices {
                    x.insert(v);
                }
            }
        }
    }
}

/// The neighborhood of `v` inside the modulator. Errors when `v` itself is a
/// modulator vertex.
pub fn x_neighborhood(g: &Graph, x: &VertexSet, v: Vertex) -> Result<VertexSet, KernelError> {
    if x.contains(v) {
        return Err(KernelError::InvalidInput(format!(
            "vertex {} is inside the modulator",
            v
        )));
    }
    if v >= g.n() {
        return Err(KernelError::InvalidInput(format!("vertex {} out of range", v)));
    }
    Ok(g.neighbors(v).intersection(x))
}

// ---------------------------------------------------------------------------
// Neighborhood types, important bags
// ---------------------------------------------------------------------------

/// Shape of one modulator vertex's neighborhood in the decomposed remainder.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VertexType {
    /// Union of whole connected components (possibly none) of the remainder.
    ComponentUnion { roots: Vec<usize> },
    /// All bags strictly above `lowest` plus part of `lowest`'s bag.
    RootPath { lowest: usize },
    /// All bags down to and including `lowest`, plus a selection of whole
    /// subtrees rooted at children of `lowest`.
    RootPathWithSubtrees { lowest: usize, subtrees: Vec<usize> },
}

impl VertexType {
    /// The node contributing to the important-bag seed set, when any.
    pub fn anchor(&self) -> Option<usize> {
        match self {
            VertexType::ComponentUnion { .. } => None,
            VertexType::RootPath { lowest } => Some(*lowest),
            VertexType::RootPathWithSubtrees { lowest, .. } => Some(*lowest),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StructureError {
    /// A modulator vertex's neighborhood matches none of the three shapes;
    /// possible only when the provided set is not a valid modulator.
    UnclassifiableNeighborhood { x_vertex: Vertex },
    /// A remainder component is adjacent to more than two important bags.
    TooManyImportantNeighbors { node: usize },
    /// Shaft or tooth vertices disagree on their modulator neighborhood.
    InconsistentCombNeighborhood { vertex: Vertex },
    MalformedComb { node: usize },
}

impl fmt::Display for StructureError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StructureError::UnclassifiableNeighborhood { x_vertex } => {
                write!(f, "neighborhood of modulator vertex {} matches no type", x_vertex)
            }
            StructureError::TooManyImportantNeighbors { node } => {
                write!(f, "component at node {} touches more than two important bags", node)
            }
            StructureError::InconsistentCombNeighborhood { vertex } => {
                write!(f, "comb vertex {} breaks the shared modulator neighborhood", vertex)
            }
            StructureError::MalformedComb { node } => {
                write!(f, "component at node {} is not shaped like a comb", node)
            }
        }
    }
}

impl std::error::Error for StructureError {}

/// Seed bags and their closure: `seeds` are the anchor nodes of path-shaped
/// neighborhoods, `nodes` adds lowest common ancestors and the root of every
/// tree containing a seed. `|nodes| <= 3 |modulator|`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ImportantBags {
    pub seeds: Vec<usize>,
    pub nodes: Vec<usize>,
}

/// Closes a node set of the forest under pairwise lowest common ancestors.
/// Grows the set by at most a factor of two per tree, and afterwards every
/// component of the forest minus the closure has at most two neighbors in it.
pub fn lca_closure(ucd: &UcdForest, nodes: &[usize]) -> Vec<usize> {
    let mut closed: Vec<usize> = nodes.to_vec();
    closed.sort_unstable();
    closed.dedup();
    let mut changed = true;
    while changed {
        changed = false;
        let snapshot = closed.clone();
        for (i, &a) in snapshot.iter().enumerate() {
            for &b in &snapshot[i + 1..] {
                if let Some(l) = ucd.lca(a, b) {
                    if !closed.contains(&l) {
                        closed.push(l);
                        changed = true;
                    }
                }
            }
        }
    }
    closed.sort_unstable();
    closed
}

/// Everything the kernelization pipeline needs about one modulator: the
/// remainder graph, its decomposition, and id translation back to the host
/// graph.
pub struct ModulatorContext<'g> {
    pub g: &'g Graph,
    pub x: VertexSet,
    pub remap: Remap,
    pub sub: Graph,
    pub ucd: UcdForest,
}

impl<'g> ModulatorContext<'g> {
    /// Decomposes `g - x`. Fails iff the remainder is not trivially perfect,
    /// i.e. iff `x` is not even a weak modulator.
    pub fn new(g: &'g Graph, x: VertexSet) -> Result<Self, NotTriviallyPerfect> {
        let rest = g.vertex_set().difference(&x);
        let (sub, remap) = g.induced_with_remap(&rest);
        let ucd = build_ucd(&sub)?;
        Ok(ModulatorContext {
            g,
            x,
            remap,
            sub,
            ucd,
        })
    }

    fn to_host(&self, sub_v: Vertex) -> Vertex {
        self.remap.new_to_old[sub_v]
    }

    fn to_host_sorted(&self, s: &VertexSet) -> Vec<Vertex> {
        s.iter().map(|v| self.to_host(v)).collect()
    }

    /// Classifies the remainder-neighborhood of one modulator vertex into one
    /// of the three shapes, validating the definitional form exactly.
    pub fn classify(&self, x_vertex: Vertex) -> Result<VertexType, StructureError> {
        let err = StructureError::UnclassifiableNeighborhood { x_vertex };
        // Neighborhood inside the remainder, in sub ids.
        let mut u_x = VertexSet::new(self.sub.n());
        for w in self.g.neighbors(x_vertex).iter() {
            if let Some(sub_w) = self.remap.old_to_new.get(w).copied().flatten() {
                u_x.insert(sub_w);
            }
        }
        if u_x.is_empty() {
            return Ok(VertexType::ComponentUnion { roots: Vec::new() });
        }

        let mut touched_nodes: Vec<usize> = u_x.iter().map(|v| self.ucd.node_of(v)).collect();
        touched_nodes.sort_unstable();
        touched_nodes.dedup();
        let mut roots: Vec<usize> = touched_nodes.iter().map(|&t| self.ucd.root_of(t)).collect();
        roots.sort_unstable();
        roots.dedup();

        if roots.len() >= 2 {
            // Must be whole components.
            let mut want = VertexSet::new(self.sub.n());
            for &r in &roots {
                want.union_with(&self.ucd.subtree_vertices(r));
            }
            if want == u_x {
                return Ok(VertexType::ComponentUnion { roots });
            }
            return Err(err);
        }

        // Single component. A chain of touched nodes means a root path.
        let deepest = *touched_nodes
            .iter()
            .max_by_key(|&&t| self.ucd.nodes[t].depth)
            .expect("nonempty");
        let chain = touched_nodes
            .iter()
            .all(|&t| self.ucd.is_ancestor(t, deepest));
        if chain {
            let lowest = deepest;
            // Everything strictly above must be fully present and nothing
            // outside the path may appear.
            let mut allowed = VertexSet::new(self.sub.n());
            let mut required = VertexSet::new(self.sub.n());
            let mut t = lowest;
            loop {
                for &v in &self.ucd.nodes[t].bag {
                    allowed.insert(v);
                    if t != lowest {
                        required.insert(v);
                    }
                }
                match self.ucd.nodes[t].parent {
                    Some(p) => t = p,
                    None => break,
                }
            }
            if required.is_subset_of(&u_x) && u_x.is_subset_of(&allowed) {
                return Ok(VertexType::RootPath { lowest });
            }
            return Err(err);
        }

        // Incomparable touched nodes: find the highest node whose children
        // split them, then check the path-plus-subtrees form.
        let mut tins: Vec<usize> = touched_nodes
            .iter()
            .map(|&t| self.ucd.dfs_range(t).0)
            .collect();
        tins.sort_unstable();
        let subtree_touched = |c: usize| -> bool {
            let (lo, hi) = self.ucd.dfs_range(c);
            match tins.binary_search(&lo) {
                Ok(_) => true,
                Err(pos) => pos < tins.len() && tins[pos] <= hi,
            }
        };
        let mut cur = touched_nodes
            .iter()
            .skip(1)
            .fold(touched_nodes[0], |acc, &t| {
                self.ucd.lca(acc, t).expect("single component")
            });
        let lowest = loop {
            let branching: Vec<usize> = self.ucd.nodes[cur]
                .children
                .iter()
                .copied()
                .filter(|&c| subtree_touched(c))
                .collect();
            match branching.len() {
                0 => return Err(err),
                1 => cur = branching[0],
                _ => break cur,
            }
        };
        let subtrees: Vec<usize> = self.ucd.nodes[lowest]
            .children
            .iter()
            .copied()
            .filter(|&c| subtree_touched(c))
            .collect();
        let mut want = VertexSet::new(self.sub.n());
        let mut t = lowest;
        loop {
            for &v in &self.ucd.nodes[t].bag {
                want.insert(v);
            }
            match self.ucd.nodes[t].parent {
                Some(p) => t = p,
                None => break,
            }
        }
        for &c in &subtrees {
            want.union_with(&self.ucd.subtree_vertices(c));
        }
        if want == u_x {
            Ok(VertexType::RootPathWithSubtrees { lowest, subtrees })
        } else {
            Err(err)
        }
    }

    pub fn classify_all(&self) -> Result<Vec<(Vertex, VertexType)>, StructureError> {
        self.x
            .iter()
            .map(|xv| self.classify(xv).map(|t| (xv, t)))
            .collect()
    }

    /// Seeds are the anchor bags of path-shaped neighborhoods; the final set
    /// adds their LCA closure and the root of every tree containing a seed.
    pub fn important_bags(&self, types: &[(Vertex, VertexType)]) -> ImportantBags {
        let mut seeds: Vec<usize> = types.iter().filter_map(|(_, t)| t.anchor()).collect();
        seeds.sort_unstable();
        seeds.dedup();
        let mut nodes = lca_closure(&self.ucd, &seeds);
        for &s in &seeds {
            let r = self.ucd.root_of(s);
            if !nodes.contains(&r) {
                nodes.push(r);
            }
        }
        nodes.sort_unstable();
        debug_assert!(nodes.len() <= 3 * seeds.len());
        ImportantBags { seeds, nodes }
    }

    fn host_x_neighborhood(&self, sub_v: Vertex) -> VertexSet {
        self.g.neighbors(self.to_host(sub_v)).intersection(&self.x)
    }

    /// Splits the remainder into important-bag vertices, untouched
    /// components, tassels hanging below one important bag, and combs
    /// stretched between two. Vertex lists are host-graph ids.
    pub fn partition_remainder(
        &self,
        important: &ImportantBags,
    ) -> Result<RemainderPartition, StructureError> {
        let node_count = self.ucd.nodes.len();
        let mut is_important = vec![false; node_count];
        for &t in &important.nodes {
            is_important[t] = true;
        }

        let mut important_vertices: Vec<Vertex> = Vec::new();
        for &t in &important.nodes {
            for &v in &self.ucd.nodes[t].bag {
                important_vertices.push(self.to_host(v));
            }
        }
        important_vertices.sort_unstable();

        let mut free_vertices: Vec<Vertex> = Vec::new();
        let mut tassels: BTreeMap<usize, Vec<Vertex>> = BTreeMap::new();
        let mut combs: Vec<Comb> = Vec::new();

        let mut seen = vec![false; node_count];
        for start in 0..node_count {
            if seen[start] || is_important[start] {
                continue;
            }
            // Component of the forest minus the important nodes.
            let mut comp = Vec::new();
            let mut stack = vec![start];
            seen[start] = true;
            let mut neighbors: Vec<usize> = Vec::new();
            while let Some(t) = stack.pop() {
                comp.push(t);
                let mut adj: Vec<usize> = self.ucd.nodes[t].children.clone();
                if let Some(p) = self.ucd.nodes[t].parent {
                    adj.push(p);
                }
                for s in adj {
                    if is_important[s] {
                        neighbors.push(s);
                    } else if !seen[s] {
                        seen[s] = true;
                        stack.push(s);
                    }
                }
            }
            neighbors.sort_unstable();
            neighbors.dedup();
            let top = *comp
                .iter()
                .min_by_key(|&&t| self.ucd.nodes[t].depth)
                .expect("nonempty component");
            match neighbors.len() {
                0 => {
                    for &t in &comp {
                        for &v in &self.ucd.nodes[t].bag {
                            free_vertices.push(self.to_host(v));
                        }
                    }
                }
                1 => {
                    let anchor = neighbors[0];
                    if self.ucd.nodes[top].parent != Some(anchor) {
                        return Err(StructureError::MalformedComb { node: top });
                    }
                    let bucket = tassels.entry(anchor).or_default();
                    for &t in &comp {
                        for &v in &self.ucd.nodes[t].bag {
                            bucket.push(self.to_host(v));
                        }
                    }
                }
                2 => {
                    combs.push(self.build_comb(&comp, &neighbors, top)?);
                }
                _ => {
                    return Err(StructureError::TooManyImportantNeighbors { node: top });
                }
            }
        }
        free_vertices.sort_unstable();
        let mut tassels: Vec<Tassel> = tassels
            .into_iter()
            .map(|(root, mut vertices)| {
                vertices.sort_unstable();
                Tassel { root, vertices }
            })
            .collect();
        tassels.sort_by_key(|t| t.root);
        combs.sort_by_key(|c| c.shaft_nodes[0]);
        Ok(RemainderPartition {
            important_vertices,
            free_vertices,
            tassels,
            combs,
        })
    }

    fn build_comb(
        &self,
        comp: &[usize],
        neighbors: &[usize],
        top: usize,
    ) -> Result<Comb, StructureError> {
        // One neighbor sits above the component, the other below.
        let up = neighbors
            .iter()
            .copied()
            .find(|&b| self.ucd.nodes[top].parent == Some(b))
            .ok_or(StructureError::MalformedComb { node: top })?;
        let down = neighbors
            .iter()
            .copied()
            .find(|&b| b != up)
            .expect("two neighbors");
        let down_parent = self.ucd.nodes[down]
            .parent
            .ok_or(StructureError::MalformedComb { node: top })?;
        let in_comp = |t: usize| comp.contains(&t);
        if !in_comp(down_parent) {
            return Err(StructureError::MalformedComb { node: top });
        }

        // Shaft bottom-up: from the parent of the lower important bag to the
        // child of the upper one.
        let mut shaft_nodes = Vec::new();
        let mut t = down_parent;
        loop {
            shaft_nodes.push(t);
            if t == top {
                break;
            }
            t = self.ucd.nodes[t].parent.ok_or(StructureError::MalformedComb { node: top })?;
            if !in_comp(t) {
                return Err(StructureError::MalformedComb { node: top });
            }
        }

        let mut shaft_vertices = Vec::new();
        for &a in &shaft_nodes {
            for &v in &self.ucd.nodes[a].bag {
                shaft_vertices.push(self.to_host(v));
            }
        }
        shaft_vertices.sort_unstable();

        let mut teeth = Vec::with_capacity(shaft_nodes.len());
        for (i, &a) in shaft_nodes.iter().enumerate() {
            let prev = if i == 0 { down } else { shaft_nodes[i - 1] };
            let mut tooth = VertexSet::new(self.sub.n());
            for &c in &self.ucd.nodes[a].children {
                if c != prev {
                    tooth.union_with(&self.ucd.subtree_vertices(c));
                }
            }
            if tooth.is_empty() {
                return Err(StructureError::MalformedComb { node: a });
            }
            let simple = tooth
                .iter()
                .all(|v| self.sub.neighbors(v).is_disjoint_from(&tooth));
            teeth.push(Tooth {
                vertices: self.to_host_sorted(&tooth),
                simple,
            });
        }

        // All shaft vertices share one modulator neighborhood; all tooth
        // vertices share another, nested inside it.
        let shaft_sub: Vec<Vertex> = shaft_nodes
            .iter()
            .flat_map(|&a| self.ucd.nodes[a].bag.iter().copied())
            .collect();
        let y = self.host_x_neighborhood(shaft_sub[0]);
        for &q in &shaft_sub {
            if self.host_x_neighborhood(q) != y {
                return Err(StructureError::InconsistentCombNeighborhood {
                    vertex: self.to_host(q),
                });
            }
        }
        let first_tooth_sub = {
            let host = teeth[0].vertices[0];
            self.remap.old_to_new[host].expect("tooth vertex in remainder")
        };
        let z = self.host_x_neighborhood(first_tooth_sub);
        for tooth in &teeth {
            for &host_v in &tooth.vertices {
                let sub_v = self.remap.old_to_new[host_v].expect("tooth vertex in remainder");
                if self.host_x_neighborhood(sub_v) != z {
                    return Err(StructureError::InconsistentCombNeighborhood { vertex: host_v });
                }
            }
        }
        if !z.is_subset_of(&y) {
            return Err(StructureError::InconsistentCombNeighborhood {
                vertex: teeth[0].vertices[0],
            });
        }

        Ok(Comb {
            top: up,
            bottom: down,
            shaft_nodes,
            shaft_vertices,
            teeth,
            shaft_x_neighborhood: y.to_vec(),
            tooth_x_neighborhood: z.to_vec(),
        })
    }
}

/// Bags of subtrees hanging below one important bag; their union is a module.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tassel {
    /// Important node the subtrees hang below.
    pub root: usize,
    /// Host-graph vertex ids, ascending.
    pub vertices: Vec<Vertex>,
}

/// Tooth of a comb: the bags of the subtrees hanging off one shaft node.
/// Always nonempty; simple means edgeless.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tooth {
    pub vertices: Vec<Vertex>,
    pub simple: bool,
}

/// A path of bags stretched between two important bags, together with the
/// subtrees (teeth) hanging off the path. Shaft nodes are listed bottom-up,
/// so `teeth[i]` hangs off the `i+1`-st shaft node counted from the lower
/// important bag.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Comb {
    /// Important node above the shaft.
    pub top: usize,
    /// Important node below the shaft.
    pub bottom: usize,
    pub shaft_nodes: Vec<usize>,
    /// Host ids of all shaft-bag vertices.
    pub shaft_vertices: Vec<Vertex>,
    pub teeth: Vec<Tooth>,
    /// Shared modulator neighborhood of shaft vertices.
    pub shaft_x_neighborhood: Vec<Vertex>,
    /// Shared modulator neighborhood of tooth vertices (subset of the above).
    pub tooth_x_neighborhood: Vec<Vertex>,
}

impl Comb {
    /// Number of teeth.
    pub fn len(&self) -> usize {
        self.teeth.len()
    }

    pub fn is_empty(&self) -> bool {
        self.teeth.is_empty()
    }
}

#[derive(Clone, Debug)]
pub struct RemainderPartition {
    /// Vertices inside important bags.
    pub important_vertices: Vec<Vertex>,
    /// Vertices of components touching no important bag.
    pub free_vertices: Vec<Vertex>,
    pub tassels: Vec<Tassel>,
    pub combs: Vec<Comb>,
}

impl RemainderPartition {
    /// Every remainder vertex appears exactly once across the four parts.
    pub fn covers_exactly(&self, remainder: &[Vertex]) -> bool {
        let mut all: Vec<Vertex> = Vec::new();
        all.extend(&self.important_vertices);
        all.extend(&self.free_vertices);
        for t in &self.tassels {
            all.extend(&t.vertices);
        }
        for c in &self.combs {
            all.extend(&c.shaft_vertices);
            for tooth in &c.teeth {
                all.extend(&tooth.vertices);
            }
        }
        all.sort_unstable();
        let mut want = remainder.to_vec();
        want.sort_unstable();
        all == want
    }
}

// ---------------------------------------------------------------------------
// Rule 5 and the driver
// ---------------------------------------------------------------------------

/// Comb length at which the tooth rule fires.
pub fn comb_length_threshold(k: u64) -> u64 {
    (4 * k + 3) * (4 * k + 3)
}

/// Tooth rule: in a comb with at least `(4k+3)^2` teeth, pick the index
/// `beta`: the last tooth when at least `4k+3` teeth are complicated,
/// otherwise the end of the earliest run of `4k+3` consecutive simple teeth,
/// and delete that tooth. Budget unchanged.
pub fn rule5_comb(inst: &Instance, comb: &Comb) -> Option<(Instance, TraceStep)> {
    let d = comb.len() as u64;
    if d < comb_length_threshold(inst.k) {
        return None;
    }
    let run = (4 * inst.k + 3) as usize;
    let complicated = comb.teeth.iter().filter(|t| !t.simple).count();
    let beta = if complicated >= run {
        comb.len()
    } else {
        let mut streak = 0;
        let mut found = None;
        for (i, tooth) in comb.teeth.iter().enumerate() {
            if tooth.simple {
                streak += 1;
                if streak == run {
                    found = Some(i + 1); // 1-based index of the run's last tooth
                    break;
                }
            } else {
                streak = 0;
            }
        }
        found.expect("a long comb with few complicated teeth has a simple run")
    };
    let removed = comb.teeth[beta - 1].vertices.clone();
    let drop = VertexSet::from_iter(inst.g.n(), removed.iter().copied());
    let (g2, _) = inst.g.remove_vertices(&drop);
    let step = TraceStep {
        rule: RuleId::CombReduction,
        witness: Witness::CombTooth { tooth_index: beta },
        k_before: inst.k,
        k_after: inst.k,
        removed,
    };
    Some((Instance::new(g2, inst.k), step))
}

/// Runs the full kernelization: exhausts the four local rules (restarting
/// after every change), builds a modulator, decomposes the remainder, marks
/// important bags, and trims long combs, restarting after each trim. The
/// output instance keeps the original answer under the given mode and never
/// increases the budget.
pub fn kernelize(inst: &Instance, mode: Mode) -> KernelOutcome {
    let mut cur = inst.clone();
    let mut trace = ReductionTrace::default();
    // Vertex deletions never enable the two edge rules: both matchings are
    // monotone under vertex removal and the budget is unchanged. Once a full
    // scan of rules 1-2 found nothing, deletions keep it that way.
    let mut edge_rules_clean = false;
    loop {
        // Rules 1-4, scan order fixed, restart on fire.
        loop {
            if !edge_rules_clean {
                match rule1_add(&cur, mode) {
                    RuleOutcome::Applied(next, step) => {
                        trace.push(step);
                        cur = next;
                        continue;
                    }
                    RuleOutcome::NoInstance(reason) => {
                        return KernelOutcome::NoInstance { reason, trace };
                    }
                    RuleOutcome::Inapplicable => {}
                }
                match rule2_delete(&cur, mode) {
                    RuleOutcome::Applied(next, step) => {
                        trace.push(step);
                        cur = next;
                        continue;
                    }
                    RuleOutcome::NoInstance(reason) => {
                        return KernelOutcome::NoInstance { reason, trace };
                    }
                    RuleOutcome::Inapplicable => {}
                }
                edge_rules_clean = true;
            }
            if let Some((next, step)) = rule3_twin(&cur) {
                trace.push(step);
                cur = next;
                continue;
            }
            if let Some((next, step)) = rule4_module(&cur) {
                trace.push(step);
                cur = next;
                continue;
            }
            break;
        }

        let Some(modulator) = build_modulator(&cur) else {
            return KernelOutcome::NoInstance {
                reason: NoInstanceReason::ModulatorPacking {
                    rounds: cur.k as usize + 1,
                },
                trace,
            };
        };
        let x = VertexSet::from_iter(cur.g.n(), modulator.vertices.iter().copied());
        let ctx = ModulatorContext::new(&cur.g, x).expect("modulator leaves remainder decomposable");
        let types = ctx
            .classify_all()
            .expect("valid modulator neighborhoods classify");
        let important = ctx.important_bags(&types);
        let partition = ctx
            .partition_remainder(&important)
            .expect("valid modulator partitions the remainder");

        let mut fired = None;
        for comb in &partition.combs {
            if let Some(hit) = rule5_comb(&cur, comb) {
                fired = Some(hit);
                break;
            }
        }
        match fired {
            Some((next, step)) => {
                trace.push(step);
                cur = next;
                // Vertex deletion again: rules 1-2 stay off, rules 3-4 rescan.
            }
            None => {
                return KernelOutcome::Kernel { inst: cur, trace };
            }
        }
    }
}
