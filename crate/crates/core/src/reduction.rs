//! The 3SAT hardness reduction: every variable becomes a cycle of length
//! three times its occurrence count with one pendant "paw" triangle vertex
//! per occurrence, every clause becomes a single vertex wired into the
//! occurrence slots of its literals, and the budget is five edits per clause.
//! A satisfying assignment translates into a pure-deletion edit set that
//! shatters the graph into paws and crickets.

use crate::graph::{EditSet, Graph, Pair, Vertex};
use std::fmt;

/// A literal: variable index (0-based) plus polarity.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Lit {
    pub var: usize,
    pub negated: bool,
}

impl Lit {
    pub fn positive(var: usize) -> Lit {
        Lit { var, negated: false }
    }

    pub fn negative(var: usize) -> Lit {
        Lit { var, negated: true }
    }

    pub fn satisfied_by(&self, value: bool) -> bool {
        value != self.negated
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CnfFormula {
    pub num_vars: usize,
    pub clauses: Vec<Vec<Lit>>,
}

impl CnfFormula {
    pub fn new(num_vars: usize, clauses: Vec<Vec<Lit>>) -> Self {
        for clause in &clauses {
            for lit in clause {
                assert!(lit.var < num_vars, "literal variable out of range");
            }
        }
        CnfFormula { num_vars, clauses }
    }

    pub fn eval(&self, assignment: &[bool]) -> bool {
        self.clauses.iter().all(|clause| {
            clause
                .iter()
                .any(|lit| lit.satisfied_by(assignment[lit.var]))
        })
    }

    /// Occurrence count per variable.
    pub fn occurrences(&self) -> Vec<usize> {
        let mut occ = vec![0usize; self.num_vars];
        for clause in &self.clauses {
            for lit in clause {
                occ[lit.var] += 1;
            }
        }
        occ
    }

    /// Exactly three literals on three distinct variables per clause, and
    /// every occurring variable occurs at least twice.
    pub fn is_normalized(&self) -> bool {
        for clause in &self.clauses {
            if clause.len() != 3 {
                return false;
            }
            let mut vars: Vec<usize> = clause.iter().map(|l| l.var).collect();
            vars.sort_unstable();
            vars.dedup();
            if vars.len() != 3 {
                return false;
            }
        }
        self.occurrences().iter().all(|&c| c == 0 || c >= 2)
    }

    /// Brute-force satisfiability for small variable counts.
    pub fn brute_force_satisfiable(&self) -> Option<Vec<bool>> {
        assert!(self.num_vars <= 20, "brute force limited to small formulas");
        for mask in 0u32..(1u32 << self.num_vars) {
            let assignment: Vec<bool> = (0..self.num_vars).map(|v| mask >> v & 1 == 1).collect();
            if self.eval(&assignment) {
                return Some(assignment);
            }
        }
        None
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ReductionError {
    /// A clause has fewer than three distinct variables after deduplication.
    /// Rejected rather than padded.
    ShortClause { clause: usize },
    /// `reduce` was handed a formula that is not normalized.
    NotNormalized,
    /// Assignment has the wrong length or does not satisfy the formula.
    NotSatisfying,
}

impl fmt::Display for ReductionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReductionError::ShortClause { clause } => {
                write!(f, "clause {} has fewer than 3 distinct variables", clause)
            }
            ReductionError::NotNormalized => write!(f, "formula is not normalized"),
            ReductionError::NotSatisfying => {
                write!(f, "assignment does not satisfy the formula")
            }
        }
    }
}

impl std::error::Error for ReductionError {}

/// Brings a formula to the reduction's input form: deduplicates literals
/// within clauses (rejecting clauses left with fewer than three distinct
/// variables), then, while some variable occurs exactly once, duplicates the
/// earliest clause containing the lowest such variable. Duplication preserves
/// satisfiability and lifts the occurrence count.
pub fn normalize(f: &CnfFormula) -> Result<CnfFormula, ReductionError> {
    let mut clauses: Vec<Vec<Lit>> = Vec::with_capacity(f.clauses.len());
    for (i, clause) in f.clauses.iter().enumerate() {
        let mut seen: Vec<Lit> = Vec::new();
        for &lit in clause {
            if !seen.contains(&lit) {
                seen.push(lit);
            }
        }
        let mut vars: Vec<usize> = seen.iter().map(|l| l.var).collect();
        vars.sort_unstable();
        vars.dedup();
        if vars.len() != 3 || seen.len() != 3 {
            return Err(ReductionError::ShortClause { clause: i });
        }
        clauses.push(seen);
    }
    let mut out = CnfFormula {
        num_vars: f.num_vars,
        clauses,
    };
    loop {
        let occ = out.occurrences();
        let Some(var) = (0..out.num_vars).find(|&v| occ[v] == 1) else {
            break;
        };
        let idx = out
            .clauses
            .iter()
            .position(|c| c.iter().any(|l| l.var == var))
            .expect("variable occurs once");
        let copy = out.clauses[idx].clone();
        out.clauses.push(copy);
    }
    debug_assert!(out.is_normalized());
    Ok(out)
}

/// The four vertices created for one occurrence of a variable: three
/// consecutive cycle vertices (the negative slot, the positive slot, and the
/// separator completing the triple) plus the pendant paw vertex attached to
/// the first two.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OccurrenceVertices {
    pub neg: Vertex,
    pub pos: Vertex,
    pub sep: Vertex,
    pub paw: Vertex,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VariableGadget {
    /// One entry per occurrence, in clause order.
    pub occ: Vec<OccurrenceVertices>,
}

/// Output of the reduction: the labeled graph, the edit budget, and the
/// vertex bookkeeping needed to build assignment edit sets.
#[derive(Clone, Debug)]
pub struct TpeInstance {
    pub graph: Graph,
    pub budget: u64,
    pub gadgets: Vec<VariableGadget>,
    pub clause_vertices: Vec<Vertex>,
}

/// Builds the editing instance for a normalized formula. With `m` clauses the
/// graph has `13 m` vertices, `18 m` edges, maximum degree 4, and the budget
/// is `5 m`.
pub fn reduce(f: &CnfFormula) -> Result<TpeInstance, ReductionError> {
    if !f.is_normalized() {
        return Err(ReductionError::NotNormalized);
    }
    let occ = f.occurrences();
    let total: usize = occ.iter().sum::<usize>() * 4 + f.clauses.len();
    let mut g = Graph::new(total);
    let mut gadgets: Vec<VariableGadget> = vec![VariableGadget::default(); f.num_vars];
    let mut next: Vertex = 0;

    for var in 0..f.num_vars {
        let p = occ[var];
        if p == 0 {
            continue;
        }
        for i in 0..p {
            let neg = next;
            let pos = next + 1;
            let sep = next + 2;
            let paw = next + 3;
            next += 4;
            g.set_label(neg, format!("neg_x{}_{}", var, i));
            g.set_label(pos, format!("pos_x{}_{}", var, i));
            g.set_label(sep, format!("sep_x{}_{}", var, i));
            g.set_label(paw, format!("paw_x{}_{}", var, i));
            g.add_edge(neg, pos);
            g.add_edge(pos, sep);
            g.add_edge(paw, neg);
            g.add_edge(paw, pos);
            gadgets[var].occ.push(OccurrenceVertices { neg, pos, sep, paw });
        }
        // Close the cycle: each separator continues to the next negative slot.
        for i in 0..p {
            let a = gadgets[var].occ[i].sep;
            let b = gadgets[var].occ[(i + 1) % p].neg;
            g.add_edge(a, b);
        }
    }

    let mut used: Vec<usize> = vec![0; f.num_vars];
    let mut clause_vertices = Vec::with_capacity(f.clauses.len());
    for (ci, clause) in f.clauses.iter().enumerate() {
        let vc = next;
        next += 1;
        g.set_label(vc, format!("clause_{}", ci));
        clause_vertices.push(vc);
        for lit in clause {
            let slot = gadgets[lit.var].occ[used[lit.var]];
            used[lit.var] += 1;
            let target = if lit.negated { slot.neg } else { slot.pos };
            g.add_edge(vc, target);
        }
    }
    debug_assert_eq!(next, total);

    Ok(TpeInstance {
        graph: g,
        budget: 5 * f.clauses.len() as u64,
        gadgets,
        clause_vertices,
    })
}

/// The deletion set certifying a satisfying assignment: per variable, every
/// third cycle edge on the side matching its truth value; per clause, the two
/// connection edges not belonging to the earliest satisfying literal. The
/// result has exactly `5 m` deletions and leaves only paws and crickets.
pub fn assignment_editset(
    f: &CnfFormula,
    inst: &TpeInstance,
    assignment: &[bool],
) -> Result<EditSet, ReductionError> {
    if assignment.len() != f.num_vars || !f.eval(assignment) {
        return Err(ReductionError::NotSatisfying);
    }
    let mut edits = EditSet::new();
    for (var, gadget) in inst.gadgets.iter().enumerate() {
        let p = gadget.occ.len();
        for i in 0..p {
            let slot = gadget.occ[i];
            if assignment[var] {
                let next_neg = gadget.occ[(i + 1) % p].neg;
                edits.insert(Pair::new(slot.sep, next_neg));
            } else {
                edits.insert(Pair::new(slot.pos, slot.sep));
            }
        }
    }
    let mut used: Vec<usize> = vec![0; f.num_vars];
    for (ci, clause) in f.clauses.iter().enumerate() {
        let vc = inst.clause_vertices[ci];
        let chosen = clause
            .iter()
            .position(|lit| lit.satisfied_by(assignment[lit.var]))
            .expect("satisfied clause has a satisfying literal");
        for (li, lit) in clause.iter().enumerate() {
            let slot = inst.gadgets[lit.var].occ[used[lit.var]];
            used[lit.var] += 1;
            let target = if lit.negated { slot.neg } else { slot.pos };
            if li != chosen {
                edits.insert(Pair::new(vc, target));
            }
        }
    }
    Ok(edits)
}

/// Classification of decomposition components after applying an assignment
/// edit set: a paw is a triangle with one pendant, a cricket a triangle with
/// two pendants at the same corner.
pub fn is_paw(g: &Graph, comp: &[Vertex]) -> bool {
    if comp.len() != 4 {
        return false;
    }
    let mut degs: Vec<usize> = comp
        .iter()
        .map(|&v| comp.iter().filter(|&&w| g.has_edge(v, w)).count())
        .collect();
    degs.sort_unstable();
    degs == [1, 2, 2, 3]
}

pub fn is_cricket(g: &Graph, comp: &[Vertex]) -> bool {
    if comp.len() != 5 {
        return false;
    }
    let mut degs: Vec<usize> = comp
        .iter()
        .map(|&v| comp.iter().filter(|&&w| g.has_edge(v, w)).count())
        .collect();
    degs.sort_unstable();
    degs == [1, 1, 2, 2, 4]
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyReport {
    pub ok: bool,
    pub violation: Option<String>,
}

/// Checks the structural identities of a reduction output: vertex, edge and
/// budget counts, maximum degree 4, per-variable cycle shape, paw degrees,
/// and clause-vertex degrees. Reports the first violation found.
pub fn verify_instance(f: &CnfFormula, inst: &TpeInstance) -> VerifyReport {
    let fail = |msg: String| VerifyReport {
        ok: false,
        violation: Some(msg),
    };
    let m = f.clauses.len();
    let g = &inst.graph;
    if g.n() != 13 * m {
        return fail(format!("vertex count {} != 13m = {}", g.n(), 13 * m));
    }
    if g.m() != 18 * m {
        return fail(format!("edge count {} != 18m = {}", g.m(), 18 * m));
    }
    if inst.budget != 5 * m as u64 {
        return fail(format!("budget {} != 5m = {}", inst.budget, 5 * m));
    }
    if g.max_degree() != 4 {
        return fail(format!("max degree {} != 4", g.max_degree()));
    }
    for (var, gadget) in inst.gadgets.iter().enumerate() {
        let p = gadget.occ.len();
        if p == 0 {
            continue;
        }
        if p < 2 {
            return fail(format!("variable {} occurs once", var));
        }
        // The cycle slots in order: neg, pos, sep per occurrence.
        let cycle: Vec<Vertex> = gadget
            .occ
            .iter()
            .flat_map(|o| [o.neg, o.pos, o.sep])
            .collect();
        for (i, &v) in cycle.iter().enumerate() {
            let next = cycle[(i + 1) % cycle.len()];
            if !g.has_edge(v, next) {
                return fail(format!("variable {} cycle edge {}-{} missing", var, v, next));
            }
        }
        for o in &gadget.occ {
            if g.degree(o.paw) != 2 || !g.has_edge(o.paw, o.neg) || !g.has_edge(o.paw, o.pos) {
                return fail(format!("paw vertex {} malformed", o.paw));
            }
        }
    }
    for &vc in &inst.clause_vertices {
        if g.degree(vc) != 3 {
            return fail(format!("clause vertex {} has degree {}", vc, g.degree(vc)));
        }
    }
    VerifyReport {
        ok: true,
        violation: None,
    }
}
