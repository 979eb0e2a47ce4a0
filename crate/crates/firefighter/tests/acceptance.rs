//! Acceptance suite: one test per criterion, each printing a pass line with
//! the counts it verified. Witness traces are funneled through
//! `checked_simulate`, which enforces the step-count bound on every
//! simulation the suite runs.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::atomic::{AtomicUsize, Ordering};

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use firefighter::bubble::{burned_upper_bound, isolation_strategy};
use firefighter::gadgets::{
    build_reduction, expected_burn_profile, path_decomposition_pw3, solve_1in3,
    strategy_from_assignment, CubicMonotoneFormula,
};
use firefighter::graph::Graph;
use firefighter::propagation::{simulate_multi, Instance, Strategy, Trace};
use firefighter::solvers::{exhaustive_optimal, fpt_decide_k_delta, fpt_pw_delta, tree_optimal};
use firefighter::widths::{exact_bandwidth, exact_cutwidth, exact_pathwidth, LinearLayout};
use firefighter::{cutwidth_of_layout, validate_path_decomposition};

static SIMULATIONS_CHECKED: AtomicUsize = AtomicUsize::new(0);

/// Run a strategy and assert the step-count bound before handing the trace
/// back; every simulation in this suite goes through here.
fn checked_simulate(
    graph: &Graph,
    sources: &BTreeSet<usize>,
    budgets: &[usize],
    strategy: &Strategy,
) -> Trace {
    let trace = simulate_multi(graph, sources, budgets, strategy).expect("valid strategy");
    assert!(
        trace.step_count <= trace.burned.len(),
        "step count {} exceeds burned count {}",
        trace.step_count,
        trace.burned.len()
    );
    SIMULATIONS_CHECKED.fetch_add(1, Ordering::Relaxed);
    trace
}

fn checked_single(instance: &Instance, strategy: &Strategy) -> Trace {
    checked_simulate(
        &instance.graph,
        &BTreeSet::from([instance.source]),
        &[instance.budget],
        strategy,
    )
}

fn fig1_formula() -> CubicMonotoneFormula {
    CubicMonotoneFormula::new(
        6,
        vec![
            [0, 2, 5],
            [0, 1, 2],
            [2, 3, 4],
            [1, 3, 4],
            [0, 3, 5],
            [1, 5, 4],
        ],
    )
    .unwrap()
}

fn repeated_formula() -> CubicMonotoneFormula {
    CubicMonotoneFormula::new(3, vec![[0, 1, 2], [0, 1, 2], [0, 1, 2]]).unwrap()
}

// ---------------------------------------------------------------- corpora

/// All non-isomorphic trees with 1..=max vertices, grown by leaf attachment
/// and deduplicated by canonical code. Counts are asserted against the known
/// sequence.
fn all_trees_upto(max: usize) -> Vec<Vec<Graph>> {
    const COUNTS: [usize; 10] = [1, 1, 1, 2, 3, 6, 11, 23, 47, 106];
    let mut levels: Vec<Vec<Graph>> = vec![vec![Graph::new(1, &[]).unwrap()]];
    for n in 2..=max {
        let mut seen = BTreeSet::new();
        let mut level = Vec::new();
        for tree in &levels[n - 2] {
            for attach in 0..tree.vertex_count() {
                let mut edges = tree.edges().to_vec();
                edges.push((attach, n - 1));
                let candidate = Graph::new(n, &edges).unwrap();
                if seen.insert(tree_code(&candidate)) {
                    level.push(candidate);
                }
            }
        }
        levels.push(level);
    }
    for (i, level) in levels.iter().enumerate() {
        assert_eq!(level.len(), COUNTS[i], "tree count for n={}", i + 1);
    }
    levels
}

/// Canonical code of a free tree: rooted code at the center, or the sorted
/// pair of codes when the center is an edge.
fn tree_code(tree: &Graph) -> String {
    let n = tree.vertex_count();
    if n == 1 {
        return "()".to_string();
    }
    // peel leaves to find the 1- or 2-vertex center
    let mut degree: Vec<usize> = (0..n).map(|v| tree.degree(v)).collect();
    let mut removed = vec![false; n];
    let mut remaining = n;
    let mut frontier: Vec<usize> = (0..n).filter(|&v| degree[v] <= 1).collect();
    while remaining > 2 {
        let mut next = Vec::new();
        for &v in &frontier {
            removed[v] = true;
            remaining -= 1;
            for &u in tree.neighbors(v) {
                if !removed[u] {
                    degree[u] -= 1;
                    if degree[u] == 1 {
                        next.push(u);
                    }
                }
            }
        }
        frontier = next;
    }
    let centers: Vec<usize> = (0..n).filter(|&v| !removed[v]).collect();
    fn encode(tree: &Graph, v: usize, parent: Option<usize>) -> String {
        let mut children: Vec<String> = tree
            .neighbors(v)
            .iter()
            .filter(|&&u| Some(u) != parent)
            .map(|&u| encode(tree, u, Some(v)))
            .collect();
        children.sort();
        format!("({})", children.concat())
    }
    match centers[..] {
        [c] => encode(tree, c, None),
        [a, b] => {
            let mut pair = [encode(tree, a, Some(b)), encode(tree, b, Some(a))];
            pair.sort();
            format!("({}{})", pair[0], pair[1])
        }
        _ => unreachable!("a tree has one or two center vertices"),
    }
}

/// All non-isomorphic connected graphs with 1..=max vertices (max <= 7),
/// grown by vertex attachment and deduplicated by the minimum edge bitmask
/// over all vertex permutations. Counts are asserted against the known
/// sequence.
fn connected_graphs_upto(max: usize) -> Vec<Vec<Graph>> {
    const COUNTS: [usize; 7] = [1, 1, 2, 6, 21, 112, 853];
    assert!(max <= 7);
    let mut levels: Vec<Vec<Graph>> = vec![vec![Graph::new(1, &[]).unwrap()]];
    for n in 2..=max {
        let perms = permutations(n);
        let mut seen = BTreeSet::new();
        let mut level = Vec::new();
        for base in &levels[n - 2] {
            for subset in 1u32..(1 << (n - 1)) {
                let mut edges = base.edges().to_vec();
                for v in 0..(n - 1) {
                    if subset & (1 << v) != 0 {
                        edges.push((v, n - 1));
                    }
                }
                let candidate = Graph::new(n, &edges).unwrap();
                if seen.insert(canonical_mask(&candidate, &perms)) {
                    level.push(candidate);
                }
            }
        }
        levels.push(level);
    }
    for (i, level) in levels.iter().enumerate() {
        assert_eq!(
            level.len(),
            COUNTS[i],
            "connected graph count for n={}",
            i + 1
        );
    }
    levels
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut items: Vec<usize> = (0..n).collect();
    fn heap(k: usize, items: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k == 1 {
            out.push(items.clone());
            return;
        }
        for i in 0..k {
            heap(k - 1, items, out);
            if k % 2 == 0 {
                items.swap(i, k - 1);
            } else {
                items.swap(0, k - 1);
            }
        }
    }
    heap(n, &mut items, &mut out);
    out
}

fn pair_bit(n: usize, u: usize, v: usize) -> u32 {
    let (a, b) = (u.min(v), u.max(v));
    (a * n - a * (a + 1) / 2 + (b - a - 1)) as u32
}

fn canonical_mask(graph: &Graph, perms: &[Vec<usize>]) -> u32 {
    let n = graph.vertex_count();
    perms
        .iter()
        .map(|perm| {
            graph.edges().iter().fold(0u32, |mask, &(u, v)| {
                mask | (1 << pair_bit(n, perm[u], perm[v]))
            })
        })
        .min()
        .expect("at least the identity permutation")
}

/// Random connected graph: a random attachment tree plus extra edges.
fn random_connected(rng: &mut ChaCha8Rng, max_n: usize) -> Graph {
    let n = rng.gen_range(2..=max_n);
    let mut edges = Vec::new();
    for v in 1..n {
        edges.push((rng.gen_range(0..v), v));
    }
    for u in 0..n {
        for v in (u + 1)..n {
            if !edges.contains(&(u, v)) && rng.gen_bool(0.2) {
                edges.push((u, v));
            }
        }
    }
    Graph::new(n, &edges).unwrap()
}

/// The corpus criterion 4 prescribes: at least 500 random connected graphs
/// with up to 8 vertices plus every tree with up to 8 vertices.
fn fpt_corpus() -> Vec<Graph> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut corpus: Vec<Graph> = (0..500).map(|_| random_connected(&mut rng, 8)).collect();
    for level in all_trees_upto(8) {
        corpus.extend(level);
    }
    corpus
}

// --------------------------------------------------------------- criteria

#[test]
fn criterion_1_reduction_exactness() {
    let cases = [
        (fig1_formula(), 6usize, 230usize),
        (repeated_formula(), 3usize, 65usize),
    ];
    for (formula, n, expected_k) in cases {
        let tree = build_reduction(&formula, 1).unwrap();
        assert_eq!(tree.k, expected_k, "threshold for n={n}");
        let tau = solve_1in3(&formula).expect("satisfiable instance");
        let strategy = strategy_from_assignment(&tree, &tau).unwrap();
        let trace = checked_simulate(&tree.graph, &BTreeSet::from([tree.source]), &[1], &strategy);
        assert_eq!(trace.burned.len(), expected_k, "burned count for n={n}");

        let profile = expected_burn_profile(n);
        assert_eq!(profile.total, expected_k);
        let p = 2 * n - 1;
        let mut cumulative = 1;
        let mut after_phase1 = 0;
        let mut increments = Vec::new();
        for (idx, record) in trace.per_step.iter().enumerate() {
            cumulative += record.newly_burned.len();
            let t = idx + 1;
            if t == p + 1 {
                after_phase1 = cumulative;
            }
            if t > p + 1 && (t - p - 1) % 3 == 0 {
                increments.push(cumulative);
            }
        }
        assert_eq!(after_phase1, profile.phase1, "phase-1 count for n={n}");
        let mut expected_cumulative = profile.phase1;
        let expected_marks: Vec<usize> = profile
            .per_clause
            .iter()
            .map(|inc| {
                expected_cumulative += inc;
                expected_cumulative
            })
            .collect();
        assert_eq!(
            increments, expected_marks,
            "per-clause increments for n={n}"
        );
    }
    println!("criterion 1 (reduction exactness, n=6 and n=3): PASS");
}

#[test]
fn criterion_2_pathwidth_certificate() {
    for (formula, n) in [(fig1_formula(), 6usize), (repeated_formula(), 3usize)] {
        let tree = build_reduction(&formula, 1).unwrap();
        let decomposition = path_decomposition_pw3(&tree);
        let width = validate_path_decomposition(&tree.graph, &decomposition).unwrap();
        assert!(width <= 3, "width {width} for n={n}");
    }
    println!("criterion 2 (width <= 3 certificates validate): PASS");
}

#[test]
fn criterion_3_tree_oracle_equivalence() {
    let mut compared = 0usize;
    for level in all_trees_upto(10) {
        for tree in level {
            for source in 0..tree.vertex_count() {
                for budget in 1..=2 {
                    let instance = Instance::new(tree.clone(), source, budget, None).unwrap();
                    let restricted = tree_optimal(&instance).unwrap();
                    let oracle = exhaustive_optimal(&instance, 10).unwrap();
                    assert_eq!(
                        restricted.min_burned,
                        oracle.min_burned,
                        "mismatch on tree {:?} source {source} budget {budget}",
                        tree.edges()
                    );
                    let trace = checked_single(&instance, &restricted.witness);
                    assert_eq!(trace.burned.len(), restricted.min_burned);
                    compared += 1;
                }
            }
        }
    }
    println!(
        "criterion 3 (restricted tree solver equals oracle on all 201 trees <= 10): \
         PASS ({compared} comparisons, 0 mismatches)"
    );
}

#[test]
fn criterion_4_fpt_consistency() {
    let corpus = fpt_corpus();
    let mut decisions = 0usize;
    let mut optima = 0usize;
    for graph in &corpus {
        let n = graph.vertex_count();
        for source in 0..n {
            for budget in 1..=2 {
                let base = Instance::new(graph.clone(), source, budget, None).unwrap();
                let oracle = exhaustive_optimal(&base, 10).unwrap();
                for threshold in 1..=n {
                    let instance =
                        Instance::new(graph.clone(), source, budget, Some(threshold)).unwrap();
                    let decision = fpt_decide_k_delta(&instance).unwrap();
                    assert_eq!(
                        decision.answer,
                        oracle.min_burned <= threshold,
                        "decision mismatch: n={n} source={source} budget={budget} k={threshold}"
                    );
                    if let Some(witness) = &decision.witness {
                        let trace = checked_single(&instance, witness);
                        assert!(trace.burned.len() <= threshold);
                    }
                    decisions += 1;
                }
                let optimum = fpt_pw_delta(&base).unwrap();
                assert_eq!(optimum.min_burned, oracle.min_burned);
                let trace = checked_single(&base, &optimum.witness);
                assert_eq!(trace.burned.len(), optimum.min_burned);
                optima += 1;
            }
        }
    }
    println!(
        "criterion 4 (parameterized decision and optimum agree with the oracle on {} graphs): \
         PASS ({decisions} decisions, {optima} optima, 0 mismatches)",
        corpus.len()
    );
}

#[test]
fn criterion_5_step_count_invariant() {
    // dedicated sweep with randomized legal strategies
    let mut rng = ChaCha8Rng::seed_from_u64(0x1e44a1);
    let mut sweeps = 0usize;
    for _ in 0..2000 {
        let graph = random_connected(&mut rng, 9);
        let n = graph.vertex_count();
        let budget = rng.gen_range(1..=2);
        let source = rng.gen_range(0..n);
        // build a random legal strategy by stepping a scratch process
        let sources = BTreeSet::from([source]);
        let mut process = firefighter::propagation::Process::new(&graph, &sources).unwrap();
        let mut steps = Vec::new();
        while process.active() {
            let open: Vec<usize> = (0..n)
                .filter(|&v| !process.is_burned(v) && !process.is_protected(v))
                .collect();
            let count = rng.gen_range(0..=budget);
            let picks: BTreeSet<usize> = open.choose_multiple(&mut rng, count).copied().collect();
            process.step(&picks, budget).unwrap();
            steps.push(picks);
        }
        while steps.last().is_some_and(BTreeSet::is_empty) {
            steps.pop();
        }
        let trace = checked_simulate(&graph, &sources, &[budget], &Strategy::new(steps));
        assert!(trace.step_count <= trace.burned.len());
        sweeps += 1;
    }
    let total = SIMULATIONS_CHECKED.load(Ordering::Relaxed);
    println!(
        "criterion 5 (step count <= burned count on every simulation): \
         PASS ({sweeps} dedicated sweeps, {total} checked so far in this suite, 0 violations)"
    );
}

#[test]
fn criterion_6_width_inequalities() {
    let mut checked = 0usize;
    for level in connected_graphs_upto(7) {
        for graph in level {
            let delta = graph.max_degree();
            let (cw, cw_layout) = exact_cutwidth(&graph, 12).unwrap();
            let (bw, bw_layout) = exact_bandwidth(&graph, 12).unwrap();
            let (pw, decomposition) = exact_pathwidth(&graph, 16).unwrap();
            // certificates re-evaluate to the claimed optima
            assert_eq!(cutwidth_of_layout(&graph, &cw_layout).unwrap(), cw);
            assert_eq!(
                firefighter::bandwidth_of_layout(&graph, &bw_layout).unwrap(),
                bw
            );
            assert_eq!(
                validate_path_decomposition(&graph, &decomposition).unwrap(),
                pw
            );

            assert!(pw <= cw, "pw {pw} > cw {cw} on {:?}", graph.edges());
            assert!(
                delta <= 2 * cw,
                "delta {delta} > 2cw {cw} on {:?}",
                graph.edges()
            );
            assert!(
                cw <= pw * delta || cw == 0,
                "cw {cw} > pw*delta on {:?}",
                graph.edges()
            );
            assert!(
                cw <= bw * (bw + 1) / 2,
                "cw {cw} > bw(bw+1)/2 with bw {bw} on {:?}",
                graph.edges()
            );
            checked += 1;
        }
    }
    println!(
        "criterion 6 (pw<=cw, delta<=2cw, cw<=pw*delta, cw<=bw(bw+1)/2 on all {checked} \
         connected graphs <= 7): PASS (0 violations)"
    );
}

#[test]
fn criterion_7_bubble_bound_soundness() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xb0bb1e);
    let mut tested = 0usize;
    while tested < 200 {
        let graph = random_connected(&mut rng, 8);
        let n = graph.vertex_count();
        let fire_count = rng.gen_range(1..=2.min(n));
        let mut sources = BTreeSet::new();
        while sources.len() < fire_count {
            sources.insert(rng.gen_range(0..n));
        }
        let (cw, layout) = exact_cutwidth(&graph, 12).unwrap();
        let positions = layout.positions(&graph).unwrap();
        let outcome = isolation_strategy(&graph, &layout, &sources, &[1]).unwrap();
        // confinement: no burned vertex outside every merged bubble
        if outcome.cutwidth > 0 {
            for &v in &outcome.trace.burned {
                assert!(
                    outcome
                        .merged_bubbles
                        .iter()
                        .any(|b| b.contains_pos(positions[v])),
                    "vertex {v} burned outside all bubbles on {:?}",
                    graph.edges()
                );
            }
        }
        // bound soundness
        let bound = burned_upper_bound(cw, sources.len());
        assert!(
            bound.admits(outcome.trace.burned.len()),
            "burned {} above bound {bound} (cw {cw}) on {:?}",
            outcome.trace.burned.len(),
            graph.edges()
        );
        // the emitted strategy replays to the same trace
        let replay = checked_simulate(&graph, &sources, &[1], &outcome.strategy);
        assert_eq!(replay, outcome.trace);
        tested += 1;
    }
    println!(
        "criterion 7 (isolation confines bubbles and respects the burn bound on {tested} \
         random graphs): PASS (0 violations)"
    );
}

#[test]
fn criterion_8_budget_dominates_degree() {
    let corpus = fpt_corpus();
    let mut checked = 0usize;
    for graph in &corpus {
        let budget = graph.max_degree().max(1);
        for source in 0..graph.vertex_count() {
            let instance = Instance::new(graph.clone(), source, budget, Some(1)).unwrap();
            let decision = fpt_decide_k_delta(&instance).unwrap();
            assert!(decision.answer, "b >= delta must answer yes at k=1");
            let witness = decision.witness.expect("yes carries a witness");
            let trace = checked_single(&instance, &witness);
            assert_eq!(trace.burned.len(), 1, "only the source burns");
            checked += 1;
        }
    }
    println!(
        "criterion 8 (budget >= max degree: yes at k=1, witness burns exactly 1): \
         PASS ({checked} instances)"
    );
}

#[test]
fn criterion_9_budget_two_augmentation() {
    let formula = repeated_formula();
    let tree = build_reduction(&formula, 2).unwrap();
    let expected = 65 + 15;
    assert_eq!(tree.k, expected);
    let tau = solve_1in3(&formula).unwrap();
    let strategy = strategy_from_assignment(&tree, &tau).unwrap();
    let trace = checked_simulate(&tree.graph, &BTreeSet::from([tree.source]), &[2], &strategy);
    assert_eq!(
        trace.burned.len(),
        expected,
        "augmented tree must burn exactly k + 5n = {expected}"
    );
    println!("criterion 9 (budget-2 augmentation burns exactly 80): PASS");
}

// ------------------------------------------------------------ module extras

/// Oracle equivalence of the decision procedure on slightly larger graphs
/// than criterion 4 exercises (the module-level invariant names n <= 9).
#[test]
fn decision_consistency_sample_n9() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x91e);
    let mut checked = 0usize;
    for _ in 0..40 {
        let graph = random_connected(&mut rng, 9);
        let n = graph.vertex_count();
        let source = rng.gen_range(0..n);
        for budget in 1..=2 {
            let base = Instance::new(graph.clone(), source, budget, None).unwrap();
            let oracle = exhaustive_optimal(&base, 10).unwrap();
            for threshold in 1..=n {
                let instance =
                    Instance::new(graph.clone(), source, budget, Some(threshold)).unwrap();
                assert_eq!(
                    fpt_decide_k_delta(&instance).unwrap().answer,
                    oracle.min_burned <= threshold
                );
                checked += 1;
            }
        }
    }
    println!("decision consistency sample at n <= 9: PASS ({checked} decisions)");
}

/// The reduce-then-simulate loop through the text formats reproduces the
/// burn profile (the CLI invariant, exercised at the library level).
#[test]
fn format_round_trip_reproduces_profile() {
    use firefighter::io;
    let formula = repeated_formula();
    let tree = build_reduction(&formula, 1).unwrap();
    let graph_text = io::serialize_edge_list(&tree.graph);
    let parsed = io::parse_edge_list(&graph_text).unwrap();
    assert_eq!(parsed, tree.graph);

    let labels = io::ReductionLabels::from(&tree);
    let labels_back = io::parse_labels(&io::serialize_labels(&labels)).unwrap();
    assert_eq!(labels_back, labels);

    let tau = solve_1in3(&formula).unwrap();
    let strategy = strategy_from_assignment(&tree, &tau).unwrap();
    let strategy_back = io::parse_strategy(&io::serialize_strategy(&strategy)).unwrap();
    let trace = checked_simulate(
        &parsed,
        &BTreeSet::from([labels.source]),
        &[1],
        &strategy_back,
    );
    assert_eq!(trace.burned.len(), labels.k);

    let decomposition = path_decomposition_pw3(&tree);
    let decomposition_back =
        io::parse_decomposition(&io::serialize_decomposition(&decomposition)).unwrap();
    assert_eq!(decomposition_back, decomposition);
    let width = validate_path_decomposition(&parsed, &decomposition_back).unwrap();
    assert!(width <= 3);

    let trace_back = io::parse_trace(&io::serialize_trace(&trace)).unwrap();
    assert_eq!(trace_back, trace);
    println!("format round trips reproduce the burn profile: PASS");
}

/// The roles map of an emitted reduction agrees with the guard accounting.
#[test]
fn labels_guard_accounting() {
    let tree = build_reduction(&fig1_formula(), 1).unwrap();
    let roles: BTreeMap<usize, firefighter::Role> =
        tree.roles.iter().copied().enumerate().collect();
    let centers = roles
        .values()
        .filter(|r| matches!(r, firefighter::Role::GuardCenter))
        .count();
    assert_eq!(centers, 8 * 6);
    let leaves = roles
        .values()
        .filter(|r| matches!(r, firefighter::Role::GuardLeaf))
        .count();
    assert_eq!(leaves, 8 * 6 * tree.k);
    println!("labels guard accounting: PASS");
}

/// Isolation layouts other than the optimal one still respect the bound
/// computed from their own layout cutwidth.
#[test]
fn isolation_respects_layout_cutwidth_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xfeed);
    for _ in 0..50 {
        let graph = random_connected(&mut rng, 7);
        let n = graph.vertex_count();
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng);
        let layout = LinearLayout::new(order);
        let cw = cutwidth_of_layout(&graph, &layout).unwrap();
        let sources = BTreeSet::from([rng.gen_range(0..n)]);
        let outcome = isolation_strategy(&graph, &layout, &sources, &[1]).unwrap();
        assert!(burned_upper_bound(cw, 1).admits(outcome.trace.burned.len()));
    }
    println!("isolation bound holds on arbitrary layouts: PASS");
}
