//! Acceptance suite: one test per criterion, each printing a PASS line with
//! the numbers it verified. Everything is seeded and deterministic.

use tpedit_core::bitset::VertexSet;
use tpedit_core::graph::{EditSet, Graph, Pair, Vertex};
use tpedit_core::io::gen_planted;
use tpedit_core::kernel::{
    build_modulator, comb_length_threshold, kernelize, rule1_add, rule2_delete, rule3_twin,
    rule4_module, rule5_comb, Comb, Instance, KernelOutcome, Mode, ModulatorContext, RuleOutcome,
};
use tpedit_core::matching::{max_bipartite_matching, max_matching};
use tpedit_core::md::{build_md, module_explained_by_tree, rule4_candidates};
use tpedit_core::oracle;
use tpedit_core::reduction::{
    assignment_editset, is_cricket, is_paw, normalize, reduce, verify_instance, CnfFormula, Lit,
};
use tpedit_core::rng::Rng;
use tpedit_core::solver::{optimal_editsets, solve_branching, solve_bruteforce};
use tpedit_core::tp::{alpha_tp, build_ucd, is_trivially_perfect, is_tp_set_system, SetFamily};

const MODES: [Mode; 3] = [Mode::Editing, Mode::Deletion, Mode::Completion];

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

fn cycle(n: usize) -> Graph {
    Graph::from_edges(n, &(0..n).map(|i| (i, (i + 1) % n)).collect::<Vec<_>>())
}

/// Answers must agree; both sides must be decided.
fn assert_same_answer(before: &Instance, after: &Instance, mode: Mode, what: &str) {
    let a = solve_branching(&before.g, before.k, mode)
        .decided()
        .expect("solver decided");
    let b = solve_branching(&after.g, after.k, mode)
        .decided()
        .expect("solver decided");
    assert_eq!(a, b, "{what}: answers diverge under {mode:?}");
}

// ---------------------------------------------------------------------------
// Criterion 1: rule safeness under the exact solver, all modes
// ---------------------------------------------------------------------------

/// Exhausts the two edge rules under `mode`. `None` means the instance was
/// recognized as a no-instance on the way (the caller then skips it).
fn exhaust_edge_rules(mut inst: Instance, mode: Mode) -> Option<Instance> {
    loop {
        match rule1_add(&inst, mode) {
            RuleOutcome::Applied(next, _) => {
                inst = next;
                continue;
            }
            RuleOutcome::NoInstance(_) => return None,
            RuleOutcome::Inapplicable => {}
        }
        match rule2_delete(&inst, mode) {
            RuleOutcome::Applied(next, _) => {
                inst = next;
                continue;
            }
            RuleOutcome::NoInstance(_) => return None,
            RuleOutcome::Inapplicable => {}
        }
        return Some(inst);
    }
}

#[test]
fn criterion_1a_rule1_safeness() {
    let mut rng = Rng::new(0xc101);
    let mut fires = 0;
    let mut attempts = 0;
    while fires < 500 {
        attempts += 1;
        assert!(attempts < 60_000, "rule 1 generator starved");
        let mode = MODES[attempts % 3];
        let k = (attempts % 4) as u64;
        let inst = if attempts % 2 == 0 {
            // Shared-cycle configuration: k+1 disjoint pairs in the joint
            // neighborhood of a non-edge, plus noise.
            let pairs = k as usize + 1;
            let n = 2 + 2 * pairs + rng.below(3);
            let mut g = Graph::new(n);
            for i in 0..pairs {
                let (x, y) = (2 + 2 * i, 3 + 2 * i);
                g.add_edge(0, x);
                g.add_edge(0, y);
                g.add_edge(1, x);
                g.add_edge(1, y);
            }
            for _ in 0..rng.below(4) {
                let a = rng.below(n);
                let b = rng.below(n);
                if a != b && !(a.min(b) == 0 && a.max(b) == 1) {
                    g.add_edge(a.min(b), a.max(b));
                }
            }
            Instance::new(g, k)
        } else {
            let n = rng.range(8, 14);
            Instance::new(random_graph(&mut rng, n, 0.55 + 0.08 * k as f64), k)
        };
        match rule1_add(&inst, mode) {
            RuleOutcome::Applied(next, _) => {
                fires += 1;
                assert_same_answer(&inst, &next, mode, "rule 1");
            }
            RuleOutcome::NoInstance(_) => {
                fires += 1;
                let direct = solve_branching(&inst.g, inst.k, mode).decided().unwrap();
                assert!(!direct, "rule 1 no-instance verdict must match the solver");
            }
            RuleOutcome::Inapplicable => {}
        }
    }
    println!("criterion 1a: PASS - rule 1 safe on {fires} fires ({attempts} samples, all modes)");
}

#[test]
fn criterion_1b_rule2_safeness() {
    let mut rng = Rng::new(0xc102);
    let mut fires = 0;
    let mut attempts = 0;
    while fires < 500 {
        attempts += 1;
        assert!(attempts < 60_000, "rule 2 generator starved");
        let mode = MODES[attempts % 3];
        let k = (attempts % 4) as u64;
        let inst = if attempts % 2 == 0 {
            // Shared-path configuration: k+1 induced paths through one edge.
            let pairs = k as usize + 1;
            let n = 2 + 2 * pairs + rng.below(3);
            let mut g = Graph::new(n);
            g.add_edge(0, 1);
            for i in 0..pairs {
                let (x, y) = (2 + 2 * i, 3 + 2 * i);
                g.add_edge(0, x);
                g.add_edge(1, y);
            }
            for _ in 0..rng.below(3) {
                let a = rng.below(n);
                let b = rng.below(n);
                if a != b {
                    g.add_edge(a.min(b), a.max(b));
                }
            }
            Instance::new(g, k)
        } else {
            let n = rng.range(8, 14);
            Instance::new(random_graph(&mut rng, n, 0.30 + 0.05 * k as f64), k)
        };
        match rule2_delete(&inst, mode) {
            RuleOutcome::Applied(next, _) => {
                fires += 1;
                assert_same_answer(&inst, &next, mode, "rule 2");
            }
            RuleOutcome::NoInstance(_) => {
                fires += 1;
                let direct = solve_branching(&inst.g, inst.k, mode).decided().unwrap();
                assert!(!direct, "rule 2 no-instance verdict must match the solver");
            }
            RuleOutcome::Inapplicable => {}
        }
    }
    println!("criterion 1b: PASS - rule 2 safe on {fires} fires ({attempts} samples, all modes)");
}

#[test]
fn criterion_1c_rule3_safeness() {
    let mut rng = Rng::new(0xc103);
    let mut fires = 0;
    let mut attempts = 0;
    while fires < 500 {
        attempts += 1;
        assert!(attempts < 20_000, "rule 3 generator starved");
        let mode = MODES[attempts % 3];
        let k = (attempts % 4) as u64;
        // Random base graph with a planted oversized true twin class.
        let class = (2 * k + 6) as usize;
        let base = rng.range(1, (14 - class).max(2).min(4));
        let n = base + class;
        let mut g = random_graph(&mut rng, base, 0.5);
        let mut full = Graph::new(n);
        for p in g.edges() {
            full.add_edge(p.lo(), p.hi());
        }
        g = full;
        let template: Vec<Vertex> = (0..base).filter(|_| rng.chance(0.5)).collect();
        for i in base..n {
            for &t in &template {
                g.add_edge(i, t);
            }
            for j in base..i {
                g.add_edge(i, j);
            }
        }
        let inst = Instance::new(g, k);
        let Some((next, _)) = rule3_twin(&inst) else {
            continue;
        };
        fires += 1;
        assert_same_answer(&inst, &next, mode, "rule 3");
    }
    println!("criterion 1c: PASS - rule 3 safe on {fires} fires ({attempts} samples, all modes)");
}

#[test]
fn criterion_1d_rule4_safeness() {
    let mut rng = Rng::new(0xc104);
    let mut fires = 0;
    let mut attempts = 0;
    while fires < 500 {
        attempts += 1;
        assert!(attempts < 30_000, "rule 4 generator starved");
        let mode = MODES[attempts % 3];
        let k = (attempts % 3) as u64; // module needs 2k+5 vertices within n <= 14
        let module = (2 * k + 5) as usize + rng.below(2);
        let base = rng.range(2, (14 - module).max(3).min(5));
        let n = base + module;
        let mut g = random_graph(&mut rng, base, 0.4);
        let mut full = Graph::new(n);
        for p in g.edges() {
            full.add_edge(p.lo(), p.hi());
        }
        g = full;
        // The module members share one outside neighborhood; inside, either
        // edgeless or a star (both trivially perfect with high independence).
        let template: Vec<Vertex> = (0..base).filter(|_| rng.chance(0.6)).collect();
        for i in base..n {
            for &t in &template {
                g.add_edge(i, t);
            }
        }
        if rng.chance(0.3) && module >= 2 {
            for i in base + 1..n {
                g.add_edge(base, i);
            }
        }
        // The module rule is only safe on instances where the edge rules are
        // exhausted, so reduce first.
        let Some(reduced) = exhaust_edge_rules(Instance::new(g, k), mode) else {
            continue;
        };
        let Some((next, _)) = rule4_module(&reduced) else {
            continue;
        };
        fires += 1;
        assert_same_answer(&reduced, &next, mode, "rule 4");
    }
    println!("criterion 1d: PASS - rule 4 safe on {fires} fires ({attempts} samples, all modes)");
}

/// A comb-shaped trivially perfect core: a top bag `w`, a chain of `depth`
/// shaft bags each carrying one or two leaf teeth, a bottom leaf, and a spare
/// leaf under the top. Two modulator vertices anchor the top and bottom bags.
/// With `with_cycle`, two more modulator vertices and two fresh
/// single-vertex components form an induced 4-cycle in the legal
/// opposite-corners pattern, so the instance is not trivially perfect but the
/// planted set stays a valid modulator.
fn comb_family(depth: usize, rng: &mut Rng, with_cycle: bool) -> (Graph, Vec<Vertex>) {
    let mut complicated = Vec::with_capacity(depth);
    for _ in 0..depth {
        complicated.push(rng.chance(0.3));
    }
    let teeth_vertices: usize = complicated.iter().map(|&c| if c { 2 } else { 1 }).sum();
    let extra = if with_cycle { 4 } else { 0 };
    let n = 1 + depth + 1 + 1 + teeth_vertices + 2 + extra;
    let mut g = Graph::new(n);
    let w = 0;
    let chain: Vec<Vertex> = (1..=depth).collect();
    let bottom = depth + 1;
    let spare = depth + 2;
    let mut next = depth + 3;
    let mut ancestors = vec![w];
    g.add_edge(w, spare);
    for (i, &q) in chain.iter().enumerate() {
        for &a in &ancestors {
            g.add_edge(a, q);
        }
        ancestors.push(q);
        let t = next;
        next += 1;
        for &a in &ancestors {
            g.add_edge(a, t);
        }
        if complicated[i] {
            let t2 = next;
            next += 1;
            for &a in &ancestors {
                g.add_edge(a, t2);
            }
            g.add_edge(t, t2);
        }
    }
    for &a in &ancestors {
        g.add_edge(a, bottom);
    }
    let x1 = next;
    let x2 = next + 1;
    g.add_edge(x1, w);
    g.add_edge(x2, w);
    for &q in &chain {
        g.add_edge(x2, q);
    }
    g.add_edge(x2, bottom);
    let mut modulator = vec![x1, x2];
    if with_cycle {
        // x3 - z1 - x4 - z2 - x3: the modulator pair sits on opposite
        // corners and z1, z2 are their own remainder components.
        let x3 = next + 2;
        let x4 = next + 3;
        let z1 = next + 4;
        let z2 = next + 5;
        g.add_edge(x3, z1);
        g.add_edge(z1, x4);
        g.add_edge(x4, z2);
        g.add_edge(z2, x3);
        modulator.push(x3);
        modulator.push(x4);
    }
    (g, modulator)
}

fn extract_single_comb(g: &Graph, modulator: &[Vertex]) -> Comb {
    let x = VertexSet::from_iter(g.n(), modulator.iter().copied());
    assert!(
        g.find_obstruction_avoiding(&x).is_none(),
        "planted modulator must be valid"
    );
    let ctx = ModulatorContext::new(g, x).unwrap();
    let types = ctx.classify_all().unwrap();
    let important = ctx.important_bags(&types);
    let partition = ctx.partition_remainder(&important).unwrap();
    assert_eq!(partition.combs.len(), 1, "family builds exactly one comb");
    partition.combs[0].clone()
}

#[test]
fn criterion_1e_rule5_safeness() {
    let mut rng = Rng::new(0xc105);
    let mut fires = 0;
    let mut attempts = 0;
    while fires < 500 {
        attempts += 1;
        assert!(attempts < 5_000, "rule 5 generator starved");
        let mode = MODES[attempts % 3];
        // The comb rule needs combs of length (4k+3)^2, which forces larger
        // graphs than the other rules: ~25 vertices at k=0, ~120 at k=1.
        let k = if attempts % 3 == 0 { 1 } else { 0 };
        let depth = comb_length_threshold(k) as usize + rng.below(3);
        let (g, modulator) = comb_family(depth, &mut rng, attempts % 2 == 0);
        let comb = extract_single_comb(&g, &modulator);
        let inst = Instance::new(g, k);
        let Some((next, _)) = rule5_comb(&inst, &comb) else {
            panic!("comb of length {depth} must fire at k={k}");
        };
        fires += 1;
        assert_same_answer(&inst, &next, mode, "rule 5");
    }
    println!("criterion 1e: PASS - rule 5 safe on {fires} fires ({attempts} samples, all modes)");
}

// ---------------------------------------------------------------------------
// Criterion 2: end-to-end kernel equivalence
// ---------------------------------------------------------------------------

#[test]
fn criterion_2_end_to_end_equivalence() {
    let mut rng = Rng::new(0xc200);
    let mut checked = 0;
    for trial in 0..1000 {
        let k = (trial % 4) as u64;
        let mode = MODES[trial % 3];
        let inst = if trial % 2 == 0 {
            let n = rng.range(4, 14);
            Instance::new(random_graph(&mut rng, n, 0.2 + 0.05 * (trial % 11) as f64), k)
        } else {
            let n = rng.range(4, 14);
            let (planted, _) = gen_planted(n, k, mode, 0xc200_0000 + trial as u64);
            planted
        };
        let direct = solve_branching(&inst.g, inst.k, mode).decided().unwrap();
        match kernelize(&inst, mode) {
            KernelOutcome::Kernel { inst: kernel, .. } => {
                assert!(kernel.k <= inst.k, "proper kernel: budget must not grow");
                let reduced = solve_branching(&kernel.g, kernel.k, mode).decided().unwrap();
                assert_eq!(direct, reduced, "kernel changed the answer (mode {mode:?})");
            }
            KernelOutcome::NoInstance { .. } => {
                assert!(!direct, "no-instance verdict but the solver found an edit set");
            }
        }
        checked += 1;
    }
    println!("criterion 2: PASS - kernel-vs-direct agreement on {checked} instances, all modes");
}

// ---------------------------------------------------------------------------
// Criterion 3: constant-explicit bounds on every kernelize output
// ---------------------------------------------------------------------------

#[test]
fn criterion_3_output_bounds() {
    let mut rng = Rng::new(0xc300);
    let mut kernels = 0;
    for trial in 0..400 {
        let k = (trial % 4) as u64;
        let mode = MODES[trial % 3];
        let inst = if trial % 3 == 0 {
            let (planted, _) = gen_planted(rng.range(10, 60), k, mode, 0xc300_0000 + trial as u64);
            planted
        } else {
            let n = rng.range(4, 14);
            Instance::new(random_graph(&mut rng, n, 0.2 + 0.06 * (trial % 10) as f64), k)
        };
        let KernelOutcome::Kernel { inst: kernel, .. } = kernelize(&inst, mode) else {
            continue;
        };
        kernels += 1;
        // Rules report inapplicability on the output.
        assert!(matches!(rule1_add(&kernel, mode), RuleOutcome::Inapplicable));
        assert!(matches!(rule2_delete(&kernel, mode), RuleOutcome::Inapplicable));
        assert!(rule3_twin(&kernel).is_none());
        assert!(rule4_module(&kernel).is_none());
        // Twin classes within 2k+5.
        for class in kernel.g.true_twin_classes() {
            assert!(class.len() as u64 <= 2 * kernel.k + 5);
        }
        // Modulator bounds and partition structure on the output.
        let modulator = build_modulator(&kernel).expect("kernel output is not a no-instance");
        assert!(modulator.vertices.len() as u64 <= 4 * kernel.k, "|X| <= 4k");
        let x = VertexSet::from_iter(kernel.g.n(), modulator.vertices.iter().copied());
        if kernel.g.n() <= 14 {
            assert!(oracle::is_tp_modulator(&kernel.g, &x), "oracle confirms the modulator");
        }
        let ctx = ModulatorContext::new(&kernel.g, x).unwrap();
        let types = ctx.classify_all().unwrap();
        let important = ctx.important_bags(&types);
        assert!(
            important.nodes.len() as u64 <= 12 * kernel.k,
            "|I| <= 3|X| <= 12k"
        );
        let partition = ctx.partition_remainder(&important).unwrap();
        let remainder: Vec<Vertex> = kernel
            .g
            .vertices()
            .filter(|v| !modulator.vertices.contains(v))
            .collect();
        assert!(partition.covers_exactly(&remainder));
        for comb in &partition.combs {
            assert!(
                (comb.len() as u64) < comb_length_threshold(kernel.k),
                "comb at output must be below the trim threshold"
            );
        }
    }
    assert!(kernels >= 200, "need a healthy number of kernel outputs, got {kernels}");
    println!("criterion 3: PASS - bounds verified on {kernels} kernel outputs");
}

// ---------------------------------------------------------------------------
// Criterion 4: kernel-size plateau on planted instances
// ---------------------------------------------------------------------------

#[test]
fn criterion_4_kernel_size_plateau() {
    // Kernel size must be governed by k, not n: the mean kernel size over a
    // fixed seed set may at most double when n grows past the plateau level
    // set by the smaller scales, while n itself grows five- and twenty-five-
    // fold. n-proportional growth would blow straight through the band.
    // Seeds are fixed, so the check is deterministic.
    let seeds: Vec<u64> = (0..10).map(|s| 0xc400_0000 + s * 131).collect();
    let sizes = |k: u64, n: usize| -> Vec<usize> {
        seeds
            .iter()
            .map(|&s| {
                let (inst, _) = gen_planted(n, k, Mode::Editing, s + k + n as u64);
                match kernelize(&inst, Mode::Editing) {
                    KernelOutcome::Kernel { inst, .. } => {
                        assert!(inst.k <= k);
                        inst.g.n()
                    }
                    KernelOutcome::NoInstance { .. } => 4,
                }
            })
            .collect()
    };
    for k in 1..=3u64 {
        let mut means: Vec<f64> = Vec::new();
        for &n in &[200usize, 1000, 5000] {
            let s = sizes(k, n);
            let mean = s.iter().sum::<usize>() as f64 / s.len() as f64;
            println!("  k={k} n={n}: kernel sizes {:?} (mean {:.1})", s, mean);
            means.push(mean);
        }
        for step in 1..means.len() {
            let plateau = means[..step].iter().cloned().fold(1.0f64, f64::max);
            assert!(
                means[step] <= 2.0 * plateau,
                "k={k}: mean kernel size {:.1} exceeds the plateau band {:.1}",
                means[step],
                2.0 * plateau
            );
        }
    }
    println!("criterion 4: PASS - kernel sizes plateau for k in 1..=3, n in {{200, 1000, 5000}}");
}

// ---------------------------------------------------------------------------
// Criterion 5: solver oracle agreement
// ---------------------------------------------------------------------------

#[test]
fn criterion_5_solver_oracle_agreement() {
    let mut rng = Rng::new(0xc500);
    let mut checked = 0;
    for trial in 0..2000 {
        let n = rng.range(2, 8);
        let g = random_graph(&mut rng, n, 0.15 + 0.07 * (trial % 10) as f64);
        for mode in MODES {
            for k in 0..=2u64 {
                let branch = solve_branching(&g, k, mode);
                let brute = solve_bruteforce(&g, k, mode).unwrap();
                assert_eq!(
                    branch.decided(),
                    brute.decided(),
                    "disagreement at k={k} {mode:?} on {:?}",
                    g
                );
                if let Some(f) = branch.witness() {
                    let edited = g.apply_edits(f).unwrap();
                    assert!(is_trivially_perfect(&edited));
                    assert!(f.len() as u64 <= k);
                }
                checked += 1;
            }
        }
    }
    println!("criterion 5: PASS - branching == brute force on {checked} (graph, k, mode) cases");
}

// ---------------------------------------------------------------------------
// Criterion 6: set-system cardinality bound, exhaustive
// ---------------------------------------------------------------------------

#[test]
fn criterion_6_tp_set_system_bound() {
    let mut families = 0u64;
    let mut passing = 0u64;
    for ground in 0..=4usize {
        let subsets = 1u64 << ground; // possible members
        let family_count = 1u64 << subsets; // families = subsets of members
        for famil in 0..family_count {
            let members: Vec<u64> = (0..subsets).filter(|&m| famil >> m & 1 == 1).collect();
            let family = SetFamily::new(ground, members).unwrap();
            families += 1;
            if is_tp_set_system(&family) {
                passing += 1;
                assert!(
                    family.len() <= ground + 1,
                    "family over {} elements with {} members",
                    ground,
                    family.len()
                );
            }
        }
    }
    println!(
        "criterion 6: PASS - {passing} qualifying families among {families} checked (|U| <= 4), all within |U|+1"
    );
}

// ---------------------------------------------------------------------------
// Criterion 7: decomposition correctness
// ---------------------------------------------------------------------------

#[test]
fn criterion_7_ucd_correctness() {
    let mut rng = Rng::new(0xc700);
    for trial in 0..1000 {
        let n = rng.range(1, 200);
        let g = tpedit_core::io::sample_tp_graph(n, &mut rng);
        let ucd = build_ucd(&g).unwrap();
        // Round trip.
        assert_eq!(ucd.to_graph(), g, "trial {trial}: decomposition round trip");
        // Structural invariants: >= 2 children at internal nodes, and every
        // bag is the universal clique of its subtree.
        for (t, node) in ucd.nodes.iter().enumerate() {
            assert_ne!(node.children.len(), 1, "internal node with one child");
            let sub = ucd.subtree_vertices(t);
            let uni = g.universal_within(&sub);
            assert_eq!(uni.to_vec(), node.bag, "bag must be the subtree's universal clique");
        }
    }
    // Independence number against exhaustive search.
    let mut checked_alpha = 0;
    for _ in 0..300 {
        let n = rng.range(1, 16);
        let g = tpedit_core::io::sample_tp_graph(n, &mut rng);
        let (alpha, witness) = alpha_tp(&g).unwrap();
        assert_eq!(alpha, oracle::max_independent_set_size(&g));
        assert_eq!(witness.len(), alpha);
        for (i, &u) in witness.iter().enumerate() {
            for &v in &witness[i + 1..] {
                assert!(!g.has_edge(u, v), "witness must be independent");
            }
        }
        checked_alpha += 1;
    }
    println!(
        "criterion 7: PASS - 1000 round trips with bag/child invariants, alpha exact on {checked_alpha} graphs"
    );
}

// ---------------------------------------------------------------------------
// Criterion 8: modular decomposition completeness
// ---------------------------------------------------------------------------

fn check_md_explains_all_modules(g: &Graph) {
    let tree = build_md(g);
    for module in oracle::all_modules(g) {
        if module.is_empty() {
            continue;
        }
        assert!(
            module_explained_by_tree(g, &tree, &module),
            "module {:?} unexplained in {:?}",
            module,
            g
        );
    }
}

#[test]
fn criterion_8_modular_decomposition() {
    // All graphs on up to 6 vertices.
    let mut exhaustive = 0;
    for n in 1..=6usize {
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .collect();
        for mask in 0u32..(1u32 << pairs.len()) {
            let mut g = Graph::new(n);
            for (i, &(u, v)) in pairs.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    g.add_edge(u, v);
                }
            }
            check_md_explains_all_modules(&g);
            exhaustive += 1;
        }
    }
    // Plus random graphs on 8 vertices, with the candidate-completeness check
    // for the module rule: whenever some module is usable, some enumerated
    // candidate is usable too.
    let mut rng = Rng::new(0xc800);
    let mut candidate_hits = 0;
    for trial in 0..500 {
        let g = random_graph(&mut rng, 8, 0.2 + 0.06 * (trial % 10) as f64);
        check_md_explains_all_modules(&g);
        let k = 0u64;
        let need = 2 * k + 5;
        let usable = |m: &[Vertex]| -> bool {
            let set = VertexSet::from_iter(g.n(), m.iter().copied());
            let (sub, _) = g.induced_with_remap(&set);
            match alpha_tp(&sub) {
                Ok((alpha, _)) => alpha as u64 >= need,
                Err(_) => false,
            }
        };
        let any_module_usable = oracle::all_modules(&g)
            .iter()
            .filter(|m| !m.is_empty())
            .any(|m| usable(m));
        if any_module_usable {
            let tree = build_md(&g);
            assert!(
                rule4_candidates(&g, &tree).iter().any(|c| usable(c)),
                "candidate enumeration missed a usable module in {:?}",
                g
            );
            candidate_hits += 1;
        }
    }
    println!(
        "criterion 8: PASS - {exhaustive} exhaustive graphs (n <= 6) + 500 random n = 8; candidate completeness hit {candidate_hits} positives"
    );
}

// ---------------------------------------------------------------------------
// Criterion 9: hardness reduction
// ---------------------------------------------------------------------------

fn random_normalized_formula(rng: &mut Rng) -> CnfFormula {
    loop {
        let vars = rng.range(4, 7);
        let clause_count = rng.range(4, 13);
        let mut clauses = Vec::with_capacity(clause_count);
        for _ in 0..clause_count {
            let picked = rng.distinct_sorted(vars, 3);
            clauses.push(
                picked
                    .into_iter()
                    .map(|v| Lit {
                        var: v,
                        negated: rng.chance(0.5),
                    })
                    .collect::<Vec<_>>(),
            );
        }
        let f = normalize(&CnfFormula::new(vars, clauses)).unwrap();
        if f.clauses.len() <= 20 {
            return f;
        }
    }
}

#[test]
fn criterion_9a_reduction_count_identities() {
    let mut rng = Rng::new(0xc9a0);
    for _ in 0..200 {
        let f = random_normalized_formula(&mut rng);
        let inst = reduce(&f).unwrap();
        let m = f.clauses.len();
        assert_eq!(inst.graph.n(), 13 * m);
        assert_eq!(inst.graph.m(), 18 * m);
        assert_eq!(inst.budget, 5 * m as u64);
        assert_eq!(inst.graph.max_degree(), 4);
        let report = verify_instance(&f, &inst);
        assert!(report.ok, "structure check failed: {:?}", report.violation);
    }
    println!("criterion 9a: PASS - count identities (13m, 18m, 5m, degree 4) on 200 formulas");
}

#[test]
fn criterion_9b_forward_direction() {
    let mut rng = Rng::new(0xc9b0);
    let mut satisfiable = 0;
    for _ in 0..200 {
        let f = random_normalized_formula(&mut rng);
        assert!(f.num_vars <= 16);
        let Some(assignment) = f.brute_force_satisfiable() else {
            continue;
        };
        satisfiable += 1;
        let inst = reduce(&f).unwrap();
        let edits = assignment_editset(&f, &inst, &assignment).unwrap();
        assert_eq!(edits.len(), 5 * f.clauses.len(), "exactly 5m deletions");
        for p in edits.iter() {
            assert!(inst.graph.has_edge(p.lo(), p.hi()), "deletions only");
        }
        let edited = inst.graph.apply_edits(&edits).unwrap();
        assert!(is_trivially_perfect(&edited));
        for comp in edited.components() {
            let vs = comp.to_vec();
            assert!(
                is_paw(&edited, &vs) || is_cricket(&edited, &vs),
                "component census admits only paws and crickets"
            );
        }
    }
    assert!(satisfiable >= 100, "generator should produce mostly satisfiable formulas");

    // Smallest instances (two clauses over the same three variables, k = 10,
    // 26 vertices) decided end to end by the branching solver. Every
    // conforming two-clause formula is satisfiable: each clause excludes one
    // of the eight assignments. Exhaustive satisfiability check over all 64
    // polarity patterns; the solver runs on a polarity sweep of 16.
    let two_clause = |mask1: usize, mask2: usize| -> CnfFormula {
        let clause = |mask: usize| -> Vec<Lit> {
            (0..3)
                .map(|v| Lit {
                    var: v,
                    negated: mask >> v & 1 == 1,
                })
                .collect()
        };
        CnfFormula::new(3, vec![clause(mask1), clause(mask2)])
    };
    for m1 in 0..8 {
        for m2 in 0..8 {
            let f = two_clause(m1, m2);
            assert!(f.is_normalized());
            assert!(f.brute_force_satisfiable().is_some());
        }
    }
    let mut solved = 0;
    for m2 in 0..8 {
        for m1 in [0, 7] {
            let f = two_clause(m1, m2);
            let inst = reduce(&f).unwrap();
            assert_eq!(inst.graph.n(), 26);
            assert_eq!(inst.budget, 10);
            let result = solve_branching(&inst.graph, inst.budget, Mode::Editing);
            assert_eq!(result.decided(), Some(true), "m=2 instance must be feasible");
            let witness = result.witness().unwrap();
            assert!(witness.len() as u64 <= inst.budget);
            // Cross-check against the constructive certificate.
            let alpha = f.brute_force_satisfiable().unwrap();
            let reference = assignment_editset(&f, &inst, &alpha).unwrap();
            assert_eq!(reference.len() as u64, inst.budget);
            assert!(is_trivially_perfect(
                &inst.graph.apply_edits(&reference).unwrap()
            ));
            solved += 1;
        }
    }
    println!(
        "criterion 9b: PASS - forward direction on {satisfiable} satisfiable formulas; 64 two-clause formulas satisfiable, {solved} solved end to end"
    );
}

#[test]
fn criterion_9c_gadget_tightness() {
    // Variable gadget: a cycle of length 3p needs p edits, and every optimal
    // set deletes every third edge (3 rotations).
    for p in [2usize, 3] {
        let n = 3 * p;
        let g = cycle(n);
        assert!(optimal_editsets(&g, p as u64 - 1, Mode::Editing).unwrap().is_empty());
        let optima = optimal_editsets(&g, p as u64, Mode::Editing).unwrap();
        let expected: Vec<EditSet> = (0..3)
            .map(|r| {
                EditSet::from_pairs((0..p).map(|i| {
                    let e = (r + 3 * i) % n;
                    Pair::new(e, (e + 1) % n)
                }))
            })
            .collect();
        assert_eq!(optima.len(), 3, "every-third-edge rotations for C{}", n);
        for want in &expected {
            assert!(optima.contains(want), "missing rotation in C{} optima", n);
        }
    }

    // Clause gadget: the subdivided claw needs 2 edits and every optimal set
    // deletes two of the three center edges.
    let claw = Graph::from_edges(7, &[(0, 1), (1, 2), (0, 3), (3, 4), (0, 5), (5, 6)]);
    assert!(optimal_editsets(&claw, 1, Mode::Editing).unwrap().is_empty());
    let optima = optimal_editsets(&claw, 2, Mode::Editing).unwrap();
    let expected: Vec<EditSet> = [(1, 3), (1, 5), (3, 5)]
        .iter()
        .map(|&(a, b)| EditSet::from_pairs([Pair::new(0, a), Pair::new(0, b)]))
        .collect();
    assert_eq!(optima.len(), 3);
    for want in &expected {
        assert!(optima.contains(want), "missing center pair in claw optima");
    }
    println!(
        "criterion 9c: PASS - cycle gadgets (p=2,3) and subdivided claw have exactly the expected optima"
    );
}

// ---------------------------------------------------------------------------
// Criterion 10: matching exactness
// ---------------------------------------------------------------------------

#[test]
fn criterion_10_matching_exactness() {
    let mut rng = Rng::new(0xca00);
    let mut checked = 0;
    for trial in 0..1000 {
        let n = rng.range(2, 10);
        let g = random_graph(&mut rng, n, 0.15 + 0.08 * (trial % 10) as f64);
        let blossom = max_matching(&g, None);
        assert!(blossom.is_valid());
        assert_eq!(blossom.len(), oracle::max_matching_size(&g));

        let mut a = VertexSet::new(n);
        let mut b = VertexSet::new(n);
        for v in 0..n {
            match rng.below(3) {
                0 => a.insert(v),
                1 => b.insert(v),
                _ => {}
            }
        }
        let bipartite = max_bipartite_matching(&g, &a, &b, None).unwrap();
        assert!(bipartite.is_valid());
        assert_eq!(bipartite.len(), oracle::max_bipartite_matching_size(&g, &a, &b));
        checked += 1;
    }
    println!("criterion 10: PASS - blossom and bipartite match brute force on {checked} graphs");
}
