//! Command-line driver: recognition, kernelization, exact solving,
//! kernel-vs-solver verification, hardness-instance generation from CNF, and
//! planted instance generation.
//!
//! Exit codes: 0 success/agreement, 1 usage or input error, 2 verification
//! mismatch, 3 resource guard tripped.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use tpedit_core::graph::Graph;
use tpedit_core::io::{
    gen_planted, parse_dimacs_cnf, parse_graph, write_graph, write_trace, RunReport,
};
use tpedit_core::kernel::{kernelize, trivial_no_instance, Instance, KernelOutcome, Mode};
use tpedit_core::reduction::{assignment_editset, normalize, reduce, verify_instance};
use tpedit_core::solver::{solve_branching, SolveOutcome};
use tpedit_core::tp::tp_witness;

const USAGE: &str = "\
tpedit - trivially perfect graph editing toolkit

USAGE:
    tpedit recognize <graph>
    tpedit kernelize --mode <edit|delete|complete> --k <K> <graph> [--out-graph P] [--out-trace P]
    tpedit solve     --mode <edit|delete|complete> --k <K> <graph>
    tpedit verify    --mode <edit|delete|complete> --k <K> <graph>
    tpedit reduce-cnf <cnf> [--out-graph P] [--check-assignment <bits>]
    tpedit gen       --n <N> --k <K> --seed <S> [--mode M] [--out P]

Graph files: 'p tpg <n> <m>' header, 'e u v' edges, optional 'l u text'
labels, '#' comments. CNF files: standard DIMACS.
";

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    match run(&args) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            eprintln!();
            eprintln!("{USAGE}");
            ExitCode::from(1)
        }
    }
}

struct Flags {
    positional: Vec<String>,
    named: Vec<(String, String)>,
    bare: Vec<String>,
}

fn parse_flags(args: &[String], takes_value: &[&str], bare: &[&str]) -> Result<Flags, String> {
    let mut flags = Flags {
        positional: Vec::new(),
        named: Vec::new(),
        bare: Vec::new(),
    };
    let mut it = args.iter().peekable();
    while let Some(arg) = it.next() {
        if let Some(name) = arg.strip_prefix("--") {
            if bare.contains(&name) {
                flags.bare.push(name.to_string());
            } else if takes_value.contains(&name) {
                let value = it
                    .next()
                    .ok_or_else(|| format!("flag --{name} needs a value"))?;
                flags.named.push((name.to_string(), value.clone()));
            } else {
                return Err(format!("unknown flag --{name}"));
            }
        } else {
            flags.positional.push(arg.clone());
        }
    }
    Ok(flags)
}

impl Flags {
    fn get(&self, name: &str) -> Option<&str> {
        self.named
            .iter()
            .rev()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_str())
    }

    fn require(&self, name: &str) -> Result<&str, String> {
        self.get(name).ok_or_else(|| format!("missing --{name}"))
    }

    fn one_positional(&self, what: &str) -> Result<&str, String> {
        match self.positional.as_slice() {
            [p] => Ok(p),
            [] => Err(format!("missing {what}")),
            _ => Err(format!("too many arguments, expected one {what}")),
        }
    }
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    s.parse::<Mode>()
}

fn parse_k(s: &str) -> Result<u64, String> {
    s.parse().map_err(|_| format!("bad budget '{s}'"))
}

fn load_graph(path: &str) -> Result<Graph, String> {
    let text =
        std::fs::read_to_string(path).map_err(|e| format!("cannot read {path}: {e}"))?;
    parse_graph(&text).map_err(|e| format!("{path}: {e}"))
}

fn write_file(path: &Path, content: &str) -> Result<(), String> {
    std::fs::write(path, content).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

fn sibling_path(input: &str, suffix: &str) -> PathBuf {
    PathBuf::from(format!("{input}.{suffix}"))
}

fn run(args: &[String]) -> Result<ExitCode, String> {
    let Some((cmd, rest)) = args.split_first() else {
        return Err("missing subcommand".into());
    };
    match cmd.as_str() {
        "recognize" => cmd_recognize(rest),
        "kernelize" => cmd_kernelize(rest),
        "solve" => cmd_solve(rest),
        "verify" => cmd_verify(rest),
        "reduce-cnf" => cmd_reduce_cnf(rest),
        "gen" => cmd_gen(rest),
        "help" | "--help" | "-h" => {
            println!("{USAGE}");
            Ok(ExitCode::SUCCESS)
        }
        other => Err(format!("unknown subcommand '{other}'")),
    }
}

fn cmd_recognize(args: &[String]) -> Result<ExitCode, String> {
    let flags = parse_flags(args, &[], &[])?;
    let path = flags.one_positional("graph file")?;
    let g = load_graph(path)?;
    match tp_witness(&g) {
        None => println!("trivially-perfect: yes (n={} m={})", g.n(), g.m()),
        Some(w) => {
            println!("trivially-perfect: no");
            println!(
                "witness: induced {:?} on vertices {} {} {} {}",
                w.kind, w.vertices[0], w.vertices[1], w.vertices[2], w.vertices[3]
            );
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_kernelize(args: &[String]) -> Result<ExitCode, String> {
    let flags = parse_flags(args, &["mode", "k", "out-graph", "out-trace"], &[])?;
    let path = flags.one_positional("graph file")?;
    let mode = parse_mode(flags.require("mode")?)?;
    let k = parse_k(flags.require("k")?)?;
    let g = load_graph(path)?;
    let inst = Instance::new(g, k);

    let start = Instant::now();
    let outcome = kernelize(&inst, mode);
    let wall_ms = start.elapsed().as_millis();

    let report = RunReport::new(&inst, mode, &outcome, wall_ms);
    print!("{}", report.to_text());

    let kernel = match &outcome {
        KernelOutcome::Kernel { inst, .. } => inst.clone(),
        KernelOutcome::NoInstance { .. } => trivial_no_instance(),
    };
    let graph_path = flags
        .get("out-graph")
        .map(PathBuf::from)
        .unwrap_or_else(|| sibling_path(path, "kernel.tpg"));
    let trace_path = flags
        .get("out-trace")
        .map(PathBuf::from)
        .unwrap_or_else(|| sibling_path(path, "trace.txt"));
    write_file(&graph_path, &write_graph(&kernel.g))?;
    write_file(&trace_path, &write_trace(outcome.trace()))?;
    println!("kernel-file: {}", graph_path.display());
    println!("trace-file: {}", trace_path.display());
    Ok(ExitCode::SUCCESS)
}

fn cmd_solve(args: &[String]) -> Result<ExitCode, String> {
    let flags = parse_flags(args, &["mode", "k"], &[])?;
    let path = flags.one_positional("graph file")?;
    let mode = parse_mode(flags.require("mode")?)?;
    let k = parse_k(flags.require("k")?)?;
    let g = load_graph(path)?;
    let result = solve_branching(&g, k, mode);
    match result.outcome {
        SolveOutcome::Feasible(f) => {
            println!("feasible: yes (nodes={})", result.nodes_explored);
            let pairs: Vec<String> = f
                .iter()
                .map(|p| format!("{{{},{}}}", p.lo(), p.hi()))
                .collect();
            println!("witness: {}", if pairs.is_empty() { "-".into() } else { pairs.join(" ") });
            Ok(ExitCode::SUCCESS)
        }
        SolveOutcome::Infeasible => {
            println!("feasible: no (nodes={})", result.nodes_explored);
            Ok(ExitCode::SUCCESS)
        }
        SolveOutcome::ResourceExceeded => {
            println!("feasible: unknown (node limit reached)");
            Ok(ExitCode::from(3))
        }
    }
}

fn cmd_verify(args: &[String]) -> Result<ExitCode, String> {
    let flags = parse_flags(args, &["mode", "k"], &[])?;
    let path = flags.one_positional("graph file")?;
    let mode = parse_mode(flags.require("mode")?)?;
    let k = parse_k(flags.require("k")?)?;
    let g = load_graph(path)?;
    let inst = Instance::new(g, k);

    let outcome = kernelize(&inst, mode);
    let direct = solve_branching(&inst.g, inst.k, mode);
    let Some(direct_answer) = direct.decided() else {
        println!("verify: resource limit on direct solve");
        return Ok(ExitCode::from(3));
    };
    let kernel_answer = match &outcome {
        KernelOutcome::NoInstance { .. } => false,
        KernelOutcome::Kernel { inst: kernel, .. } => {
            let r = solve_branching(&kernel.g, kernel.k, mode);
            match r.decided() {
                Some(a) => a,
                None => {
                    println!("verify: resource limit on kernel solve");
                    return Ok(ExitCode::from(3));
                }
            }
        }
    };
    let k_ok = match &outcome {
        KernelOutcome::Kernel { inst: kernel, .. } => kernel.k <= inst.k,
        KernelOutcome::NoInstance { .. } => true,
    };
    if direct_answer == kernel_answer && k_ok {
        println!(
            "verify: agree ({} on both paths)",
            if direct_answer { "feasible" } else { "infeasible" }
        );
        Ok(ExitCode::SUCCESS)
    } else {
        println!(
            "verify: MISMATCH direct={} kernel={} budget-ok={}",
            direct_answer, kernel_answer, k_ok
        );
        Ok(ExitCode::from(2))
    }
}

fn cmd_reduce_cnf(args: &[String]) -> Result<ExitCode, String> {
    let flags = parse_flags(args, &["out-graph", "check-assignment"], &[])?;
    let path = flags.one_positional("cnf file")?;
    let text =
        std::fs::read_to_string(path).map_err(|e| format!("cannot read {path}: {e}"))?;
    let raw = parse_dimacs_cnf(&text).map_err(|e| format!("{path}: {e}"))?;
    let f = normalize(&raw).map_err(|e| e.to_string())?;
    let inst = reduce(&f).map_err(|e| e.to_string())?;
    let report = verify_instance(&f, &inst);
    if !report.ok {
        return Err(format!(
            "construction self-check failed: {}",
            report.violation.unwrap_or_default()
        ));
    }
    println!(
        "reduced: clauses={} n={} m={} k={} max-degree={}",
        f.clauses.len(),
        inst.graph.n(),
        inst.graph.m(),
        inst.budget,
        inst.graph.max_degree()
    );
    let graph_path = flags
        .get("out-graph")
        .map(PathBuf::from)
        .unwrap_or_else(|| sibling_path(path, "tpg"));
    write_file(&graph_path, &write_graph(&inst.graph))?;
    println!("graph-file: {}", graph_path.display());

    if let Some(bits) = flags.get("check-assignment") {
        if bits.len() != f.num_vars || bits.chars().any(|c| c != '0' && c != '1') {
            return Err(format!(
                "--check-assignment wants {} bits of 0/1",
                f.num_vars
            ));
        }
        let assignment: Vec<bool> = bits.chars().map(|c| c == '1').collect();
        let edits = assignment_editset(&f, &inst, &assignment).map_err(|e| e.to_string())?;
        let edited = inst
            .graph
            .apply_edits(&edits)
            .map_err(|e| e.to_string())?;
        let tp = tp_witness(&edited).is_none();
        println!(
            "assignment-editset: size={} deletions-only=true result-tp={}",
            edits.len(),
            tp
        );
        let pairs: Vec<String> = edits
            .iter()
            .map(|p| format!("{{{},{}}}", p.lo(), p.hi()))
            .collect();
        println!("deletions: {}", pairs.join(" "));
        if !tp {
            return Err("assignment edit set failed to produce a trivially perfect graph".into());
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_gen(args: &[String]) -> Result<ExitCode, String> {
    let flags = parse_flags(args, &["n", "k", "seed", "mode", "out"], &[])?;
    if !flags.positional.is_empty() {
        return Err("gen takes no positional arguments".into());
    }
    let n: usize = flags
        .require("n")?
        .parse()
        .map_err(|_| "bad --n".to_string())?;
    if n == 0 {
        return Err("--n must be at least 1".into());
    }
    let k = parse_k(flags.require("k")?)?;
    let seed: u64 = flags
        .require("seed")?
        .parse()
        .map_err(|_| "bad --seed".to_string())?;
    let mode = match flags.get("mode") {
        Some(m) => parse_mode(m)?,
        None => Mode::Editing,
    };
    let (inst, planted) = gen_planted(n, k, mode, seed);
    let out = flags
        .get("out")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(format!("planted_n{}_k{}_s{}.tpg", n, k, seed)));
    let mut text = format!(
        "# planted instance: n={} k={} seed={} mode={}\n",
        n,
        k,
        seed,
        mode.as_str()
    );
    text.push_str(&write_graph(&inst.g));
    write_file(&out, &text)?;
    let pairs: Vec<String> = planted
        .iter()
        .map(|p| format!("{{{},{}}}", p.lo(), p.hi()))
        .collect();
    println!("instance-file: {}", out.display());
    println!("k: {}", inst.k);
    println!(
        "planted-edits: {}",
        if pairs.is_empty() { "-".into() } else { pairs.join(" ") }
    );
    Ok(ExitCode::SUCCESS)
}
