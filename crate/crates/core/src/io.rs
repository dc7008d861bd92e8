//! File formats and instance generation: the text graph format, DIMACS CNF
//! parsing, run reports, the replayable trace stream, and the planted
//! instance generator.
//!
//! Graph files:
//!
//! ```text
//! # comment lines anywhere
//! p tpg <n> <m>
//! e <u> <v>          (exactly m lines, 0-based ids, u != v, no duplicates)
//! l <u> <text>       (optional labels)
//! ```
//!
//! Trace streams are line records, one step per line:
//!
//! ```text
//! step <i> rule <1..5> k <before> <after> witness <...> removed <v,v,...>
//! ```
//!
//! `removed` lists pre-step vertex ids; survivors renumber densely in order,
//! which pins the remap exactly.

use crate::graph::{EditSet, Graph, Pair, Vertex};
use crate::kernel::{
    Instance, KernelOutcome, Mode, NoInstanceReason, ReductionTrace, RuleId, TraceStep, Witness,
};
use crate::reduction::{CnfFormula, Lit};
use crate::rng::Rng;
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl ParseError {
    fn new(line: usize, message: impl Into<String>) -> Self {
        ParseError {
            line,
            message: message.into(),
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

impl std::error::Error for ParseError {}

/// Parses the graph file format, validating strictly: ids in range, no
/// self-loops, no duplicate edges, exactly the declared number of edge lines.
pub fn parse_graph(text: &str) -> Result<Graph, ParseError> {
    let mut graph: Option<Graph> = None;
    let mut declared_edges = 0usize;
    let mut seen_edges = 0usize;
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tokens = line.split_whitespace();
        match tokens.next() {
            Some("p") => {
                if graph.is_some() {
                    return Err(ParseError::new(lineno, "duplicate header"));
                }
                if tokens.next() != Some("tpg") {
                    return Err(ParseError::new(lineno, "header must be 'p tpg <n> <m>'"));
                }
                let n: usize = tokens
                    .next()
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| ParseError::new(lineno, "bad vertex count"))?;
                declared_edges = tokens
                    .next()
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| ParseError::new(lineno, "bad edge count"))?;
                if tokens.next().is_some() {
                    return Err(ParseError::new(lineno, "trailing tokens in header"));
                }
                graph = Some(Graph::new(n));
            }
            Some("e") => {
                let g = graph
                    .as_mut()
                    .ok_or_else(|| ParseError::new(lineno, "edge before header"))?;
                let u: usize = tokens
                    .next()
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| ParseError::new(lineno, "bad edge endpoint"))?;
                let v: usize = tokens
                    .next()
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| ParseError::new(lineno, "bad edge endpoint"))?;
                if tokens.next().is_some() {
                    return Err(ParseError::new(lineno, "trailing tokens in edge line"));
                }
                if u == v {
                    return Err(ParseError::new(lineno, format!("self-loop at {}", u)));
                }
                if u >= g.n() || v >= g.n() {
                    return Err(ParseError::new(lineno, format!("vertex id out of range: {} {}", u, v)));
                }
                if !g.add_edge(u, v) {
                    return Err(ParseError::new(lineno, format!("duplicate edge {} {}", u, v)));
                }
                seen_edges += 1;
            }
            Some("l") => {
                let g = graph
                    .as_mut()
                    .ok_or_else(|| ParseError::new(lineno, "label before header"))?;
                let u: usize = tokens
                    .next()
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| ParseError::new(lineno, "bad label vertex"))?;
                if u >= g.n() {
                    return Err(ParseError::new(lineno, format!("label vertex {} out of range", u)));
                }
                let rest: Vec<&str> = tokens.collect();
                if rest.is_empty() {
                    return Err(ParseError::new(lineno, "empty label"));
                }
                g.set_label(u, rest.join(" "));
            }
            Some(other) => {
                return Err(ParseError::new(lineno, format!("unknown record '{}'", other)));
            }
            None => unreachable!("blank lines skipped"),
        }
    }
    let g = graph.ok_or_else(|| ParseError::new(text.lines().count().max(1), "missing header"))?;
    if seen_edges != declared_edges {
        return Err(ParseError::new(
            text.lines().count().max(1),
            format!("declared {} edges, found {}", declared_edges, seen_edges),
        ));
    }
    Ok(g)
}

/// Canonical text form: header, edges ascending, labels ascending.
pub fn write_graph(g: &Graph) -> String {
    let mut out = String::new();
    out.push_str(&format!("p tpg {} {}\n", g.n(), g.m()));
    for p in g.edges() {
        out.push_str(&format!("e {} {}\n", p.lo(), p.hi()));
    }
    for v in g.vertices() {
        if let Some(label) = g.label(v) {
            out.push_str(&format!("l {} {}\n", v, label));
        }
    }
    out
}

/// Standard DIMACS CNF: `p cnf <vars> <clauses>`, clauses as literal lists
/// terminated by 0, `c` comment lines.
pub fn parse_dimacs_cnf(text: &str) -> Result<CnfFormula, ParseError> {
    let mut num_vars: Option<usize> = None;
    let mut declared_clauses = 0usize;
    let mut clauses: Vec<Vec<Lit>> = Vec::new();
    let mut current: Vec<Lit> = Vec::new();
    let mut last_line = 1;
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        last_line = lineno;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line.starts_with('p') {
            if num_vars.is_some() {
                return Err(ParseError::new(lineno, "duplicate header"));
            }
            let mut tokens = line.split_whitespace();
            tokens.next();
            if tokens.next() != Some("cnf") {
                return Err(ParseError::new(lineno, "header must be 'p cnf <vars> <clauses>'"));
            }
            num_vars = Some(
                tokens
                    .next()
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| ParseError::new(lineno, "bad variable count"))?,
            );
            declared_clauses = tokens
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| ParseError::new(lineno, "bad clause count"))?;
            continue;
        }
        let vars = num_vars.ok_or_else(|| ParseError::new(lineno, "clause before header"))?;
        for token in line.split_whitespace() {
            let lit: i64 = token
                .parse()
                .map_err(|_| ParseError::new(lineno, format!("bad literal '{}'", token)))?;
            if lit == 0 {
                clauses.push(std::mem::take(&mut current));
                continue;
            }
            let var = lit.unsigned_abs() as usize;
            if var > vars {
                return Err(ParseError::new(
                    lineno,
                    format!("literal {} out of range ({} variables)", lit, vars),
                ));
            }
            current.push(Lit {
                var: var - 1,
                negated: lit < 0,
            });
        }
    }
    let vars = num_vars.ok_or_else(|| ParseError::new(last_line, "missing header"))?;
    if !current.is_empty() {
        return Err(ParseError::new(last_line, "unterminated clause"));
    }
    if clauses.len() != declared_clauses {
        return Err(ParseError::new(
            last_line,
            format!("declared {} clauses, found {}", declared_clauses, clauses.len()),
        ));
    }
    Ok(CnfFormula::new(vars, clauses))
}

// ---------------------------------------------------------------------------
// Planted instances
// ---------------------------------------------------------------------------

/// Samples a trivially perfect graph on `n` vertices by growing a random
/// decomposition forest: geometric bag sizes, at least two children per
/// internal node.
pub fn sample_tp_graph(n: usize, rng: &mut Rng) -> Graph {
    let mut g = Graph::new(n);
    if n == 0 {
        return g;
    }
    // Split [0, n) into root components.
    let mut pending: Vec<(Vec<Vertex>, Vec<Vertex>)> = Vec::new(); // (vertices, ancestors)
    let mut start = 0;
    while start < n {
        let take = rng.geometric_from_one(0.75, n - start).max(1);
        let comp: Vec<Vertex> = (start..start + take).collect();
        pending.push((comp, Vec::new()));
        start += take;
    }
    while let Some((verts, ancestors)) = pending.pop() {
        let mut bag = rng.geometric_from_one(0.45, verts.len());
        // A bag leaving exactly one vertex below it would make a one-child
        // node; absorb the leftover instead.
        if verts.len() - bag == 1 {
            bag = verts.len();
        }
        let (in_bag, below) = verts.split_at(bag);
        for (i, &u) in in_bag.iter().enumerate() {
            for &w in &ancestors {
                g.add_edge(u, w);
            }
            for &w in &in_bag[i + 1..] {
                g.add_edge(u, w);
            }
            for &w in below {
                g.add_edge(u, w);
            }
        }
        if below.is_empty() {
            continue;
        }
        let mut next_ancestors = ancestors;
        next_ancestors.extend_from_slice(in_bag);
        // Split the remainder into at least two child components.
        let parts = rng.range(2, below.len().clamp(2, 4));
        let mut cuts: Vec<usize> = if parts >= below.len() {
            (1..below.len()).collect()
        } else {
            rng.distinct_sorted(below.len() - 1, parts - 1)
                .into_iter()
                .map(|c| c + 1)
                .collect()
        };
        cuts.push(below.len());
        let mut lo = 0;
        for hi in cuts {
            if hi > lo {
                pending.push((below[lo..hi].to_vec(), next_ancestors.clone()));
                lo = hi;
            }
        }
    }
    g
}

/// A planted instance: a trivially perfect graph perturbed by up to `k`
/// mode-legal edits, so the result is guaranteed feasible at budget `k`.
/// Deterministic under `seed`. Fewer than `k` edits are planted only when
/// the graph runs out of legal pairs.
pub fn gen_planted(n: usize, k: u64, mode: Mode, seed: u64) -> (Instance, EditSet) {
    assert!(n >= 1);
    let mut rng = Rng::new(seed);
    let tp = sample_tp_graph(n, &mut rng);
    let mut planted = EditSet::new();
    let k = k as usize;
    match mode {
        Mode::Editing => {
            let mut attempts = 0;
            while planted.len() < k && attempts < 20 * k + 100 && n >= 2 {
                attempts += 1;
                let u = rng.below(n);
                let v = rng.below(n);
                if u != v {
                    planted.insert(Pair::new(u, v));
                }
            }
        }
        Mode::Deletion => {
            // Instance = TP graph plus k extra edges; deleting them restores it.
            let mut non_edges: Vec<Pair> = Vec::new();
            'outer: for u in 0..n {
                for v in u + 1..n {
                    if !tp.has_edge(u, v) {
                        non_edges.push(Pair::new(u, v));
                        if non_edges.len() >= 50 * (k + 1) {
                            break 'outer;
                        }
                    }
                }
            }
            rng.shuffle(&mut non_edges);
            for p in non_edges.into_iter().take(k) {
                planted.insert(p);
            }
        }
        Mode::Completion => {
            // Instance = TP graph minus k edges; adding them back restores it.
            let mut edges = tp.edges();
            rng.shuffle(&mut edges);
            for p in edges.into_iter().take(k) {
                planted.insert(p);
            }
        }
    }
    let g = tp.apply_edits(&planted).expect("pairs in range");
    (Instance::new(g, k as u64), planted)
}

// ---------------------------------------------------------------------------
// Run reports and trace serialization
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct RunReport {
    pub input_n: usize,
    pub input_m: usize,
    pub input_k: u64,
    pub mode: Mode,
    pub no_instance: Option<String>,
    pub kernel_n: usize,
    pub kernel_m: usize,
    pub kernel_k: u64,
    pub rule_fires: [usize; 5],
    pub trace_len: usize,
    pub wall_ms: u128,
}

impl RunReport {
    pub fn new(input: &Instance, mode: Mode, outcome: &KernelOutcome, wall_ms: u128) -> RunReport {
        let trace = outcome.trace();
        let mut rule_fires = [0usize; 5];
        for step in &trace.steps {
            rule_fires[step.rule.code() as usize - 1] += 1;
        }
        let (no_instance, kernel) = match outcome {
            KernelOutcome::Kernel { inst, .. } => (None, inst.clone()),
            KernelOutcome::NoInstance { reason, .. } => {
                (Some(reason.to_string()), crate::kernel::trivial_no_instance())
            }
        };
        RunReport {
            input_n: input.g.n(),
            input_m: input.g.m(),
            input_k: input.k,
            mode,
            no_instance,
            kernel_n: kernel.g.n(),
            kernel_m: kernel.g.m(),
            kernel_k: kernel.k,
            rule_fires,
            trace_len: trace.len(),
            wall_ms,
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "instance: n={} m={} k={} mode={}\n",
            self.input_n,
            self.input_m,
            self.input_k,
            self.mode.as_str()
        ));
        match &self.no_instance {
            Some(reason) => out.push_str(&format!("outcome: no-instance ({})\n", reason)),
            None => out.push_str("outcome: kernel\n"),
        }
        out.push_str(&format!(
            "kernel: n={} m={} k={}\n",
            self.kernel_n, self.kernel_m, self.kernel_k
        ));
        out.push_str(&format!(
            "rule-fires: add={} delete={} twin={} module={} comb={}\n",
            self.rule_fires[0],
            self.rule_fires[1],
            self.rule_fires[2],
            self.rule_fires[3],
            self.rule_fires[4]
        ));
        out.push_str(&format!("trace-steps: {}\n", self.trace_len));
        out.push_str(&format!("wall-ms: {}\n", self.wall_ms));
        out
    }
}

fn witness_to_text(w: &Witness) -> String {
    match w {
        Witness::Pair(p) => format!("pair {} {}", p.lo(), p.hi()),
        Witness::TwinVertex { vertex, class_size } => {
            format!("twin {} class {}", vertex, class_size)
        }
        Witness::Module { module, kept } => format!(
            "module {} kept {}",
            join_ids(module),
            join_ids(kept)
        ),
        Witness::CombTooth { tooth_index } => format!("tooth {}", tooth_index),
    }
}

fn join_ids(ids: &[Vertex]) -> String {
    if ids.is_empty() {
        return "-".to_string();
    }
    ids.iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn parse_ids(token: &str, lineno: usize) -> Result<Vec<Vertex>, ParseError> {
    if token == "-" {
        return Ok(Vec::new());
    }
    token
        .split(',')
        .map(|t| {
            t.parse()
                .map_err(|_| ParseError::new(lineno, format!("bad id '{}'", t)))
        })
        .collect()
}

/// One line per step; replayable. See the module docs for the layout.
pub fn write_trace(trace: &ReductionTrace) -> String {
    let mut out = String::new();
    for (i, step) in trace.steps.iter().enumerate() {
        out.push_str(&format!(
            "step {} rule {} k {} {} witness {} removed {}\n",
            i,
            step.rule.code(),
            step.k_before,
            step.k_after,
            witness_to_text(&step.witness),
            join_ids(&step.removed)
        ));
    }
    out
}

pub fn parse_trace(text: &str) -> Result<ReductionTrace, ParseError> {
    let mut steps = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        let expect = |idx: usize, what: &str| -> Result<&str, ParseError> {
            tokens
                .get(idx)
                .copied()
                .ok_or_else(|| ParseError::new(lineno, format!("missing {}", what)))
        };
        if expect(0, "step keyword")? != "step" {
            return Err(ParseError::new(lineno, "expected 'step'"));
        }
        if expect(2, "rule keyword")? != "rule" {
            return Err(ParseError::new(lineno, "expected 'rule'"));
        }
        let code: u8 = expect(3, "rule code")?
            .parse()
            .map_err(|_| ParseError::new(lineno, "bad rule code"))?;
        let rule = RuleId::from_code(code)
            .ok_or_else(|| ParseError::new(lineno, format!("unknown rule code {}", code)))?;
        if expect(4, "k keyword")? != "k" {
            return Err(ParseError::new(lineno, "expected 'k'"));
        }
        let k_before: u64 = expect(5, "k before")?
            .parse()
            .map_err(|_| ParseError::new(lineno, "bad budget"))?;
        let k_after: u64 = expect(6, "k after")?
            .parse()
            .map_err(|_| ParseError::new(lineno, "bad budget"))?;
        if expect(7, "witness keyword")? != "witness" {
            return Err(ParseError::new(lineno, "expected 'witness'"));
        }
        let (witness, removed_at) = match expect(8, "witness kind")? {
            "pair" => {
                let u: Vertex = expect(9, "pair endpoint")?
                    .parse()
                    .map_err(|_| ParseError::new(lineno, "bad endpoint"))?;
                let v: Vertex = expect(10, "pair endpoint")?
                    .parse()
                    .map_err(|_| ParseError::new(lineno, "bad endpoint"))?;
                (Witness::Pair(Pair::new(u, v)), 11)
            }
            "twin" => {
                let vertex: Vertex = expect(9, "twin vertex")?
                    .parse()
                    .map_err(|_| ParseError::new(lineno, "bad vertex"))?;
                if expect(10, "class keyword")? != "class" {
                    return Err(ParseError::new(lineno, "expected 'class'"));
                }
                let class_size: usize = expect(11, "class size")?
                    .parse()
                    .map_err(|_| ParseError::new(lineno, "bad class size"))?;
                (Witness::TwinVertex { vertex, class_size }, 12)
            }
            "module" => {
                let module = parse_ids(expect(9, "module ids")?, lineno)?;
                if expect(10, "kept keyword")? != "kept" {
                    return Err(ParseError::new(lineno, "expected 'kept'"));
                }
                let kept = parse_ids(expect(11, "kept ids")?, lineno)?;
                (Witness::Module { module, kept }, 12)
            }
            "tooth" => {
                let tooth_index: usize = expect(9, "tooth index")?
                    .parse()
                    .map_err(|_| ParseError::new(lineno, "bad tooth index"))?;
                (Witness::CombTooth { tooth_index }, 10)
            }
            other => {
                return Err(ParseError::new(lineno, format!("unknown witness '{}'", other)));
            }
        };
        if expect(removed_at, "removed keyword")? != "removed" {
            return Err(ParseError::new(lineno, "expected 'removed'"));
        }
        let removed = parse_ids(expect(removed_at + 1, "removed ids")?, lineno)?;
        steps.push(TraceStep {
            rule,
            witness,
            k_before,
            k_after,
            removed,
        });
    }
    Ok(ReductionTrace { steps })
}

/// Text form of a no-instance reason for reports.
pub fn reason_text(reason: &NoInstanceReason) -> String {
    reason.to_string()
}
