//! Exact optimization and decision procedures. The exhaustive search is the
//! ground-truth oracle; the tree solver restricts protections to vertices
//! adjacent to the fire (optimal on trees); the parameterized decision
//! procedure confines its search to the distance-k neighborhood of the
//! source and prunes once more than k vertices burn.

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use crate::bubble::bound_pw_delta;
use crate::graph::Graph;
use crate::propagation::{Instance, Strategy};
use crate::widths::{exact_pathwidth, DEFAULT_PATHWIDTH_CAP};

pub const DEFAULT_EXHAUSTIVE_CAP: usize = 10;
// bitmask engines address vertices by u64 bits
const MASK_LIMIT: usize = 62;

#[derive(Error, Debug, PartialEq, Eq)]
pub enum SolveError {
    #[error("graph has {n} vertices, above the cap {cap}")]
    TooLarge { n: usize, cap: usize },
    #[error("graph is not a tree")]
    NotATree,
    #[error("instance has no burn threshold")]
    MissingThreshold,
}

/// An optimal (or, for the greedy baseline, achieved) burn count with a
/// witnessing strategy.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveResult {
    pub min_burned: usize,
    pub witness: Strategy,
    pub nodes_explored: usize,
}

/// Outcome of the parameterized decision procedure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decision {
    pub answer: bool,
    pub witness: Option<Strategy>,
    pub nodes_explored: usize,
}

struct MaskContext {
    adj: Vec<u64>,
}

impl MaskContext {
    fn new(graph: &Graph) -> Self {
        let adj = (0..graph.vertex_count())
            .map(|v| graph.neighbors(v).iter().fold(0u64, |m, &u| m | (1 << u)))
            .collect();
        MaskContext { adj }
    }

    fn threatened(&self, burned: u64, protected: u64) -> u64 {
        let mut reach = 0u64;
        let mut rest = burned;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            reach |= self.adj[v];
        }
        reach & !burned & !protected
    }

    /// Unburned vertices the fire can still reach through unprotected ones.
    fn reachable(&self, burned: u64, protected: u64) -> u64 {
        let mut region = burned;
        loop {
            let grow = self.threatened(region, protected) & !region;
            if grow == 0 {
                break;
            }
            region |= grow;
        }
        region & !burned
    }
}

fn mask_to_set(mask: u64) -> BTreeSet<usize> {
    let mut set = BTreeSet::new();
    let mut rest = mask;
    while rest != 0 {
        set.insert(rest.trailing_zeros() as usize);
        rest &= rest - 1;
    }
    set
}

/// Visit subsets of `pool` as masks. When `exact` is true only subsets of
/// size min(max_size, |pool|) are visited, otherwise every size from 0 up.
/// Visit order is lexicographic in the sorted indices, so ties resolve
/// toward the lowest vertex ids.
fn for_each_subset(pool: u64, max_size: usize, exact: bool, f: &mut impl FnMut(u64)) {
    let bits: Vec<usize> = mask_to_set(pool).into_iter().collect();
    let target = max_size.min(bits.len());

    fn rec(bits: &[usize], start: usize, left: usize, acc: u64, f: &mut impl FnMut(u64)) {
        if left == 0 {
            f(acc);
            return;
        }
        for i in start..=(bits.len() - left) {
            rec(bits, i + 1, left - 1, acc | (1 << bits[i]), f);
        }
    }

    if exact {
        if target == 0 {
            f(0);
        } else {
            rec(&bits, 0, target, 0, f);
        }
    } else {
        for size in 0..=target {
            if size == 0 {
                f(0);
            } else {
                rec(&bits, 0, size, 0, f);
            }
        }
    }
}

struct SearchState {
    memo: HashMap<(u64, u64), (usize, u64)>,
    nodes: usize,
}

fn min_burned_search(
    ctx: &MaskContext,
    state: &mut SearchState,
    budget: usize,
    restrict_to_threatened: bool,
    burned: u64,
    protected: u64,
) -> usize {
    let threat = ctx.threatened(burned, protected);
    if threat == 0 {
        return burned.count_ones() as usize;
    }
    if let Some(&(value, _)) = state.memo.get(&(burned, protected)) {
        return value;
    }
    state.nodes += 1;
    let candidates = if restrict_to_threatened {
        threat
    } else {
        ctx.reachable(burned, protected)
    };
    let mut best = usize::MAX;
    let mut best_choice = 0u64;
    for_each_subset(candidates, budget, restrict_to_threatened, &mut |picks| {
        let new_protected = protected | picks;
        let newly = ctx.threatened(burned, new_protected);
        let value = if newly == 0 {
            burned.count_ones() as usize
        } else {
            min_burned_search(
                ctx,
                state,
                budget,
                restrict_to_threatened,
                burned | newly,
                new_protected,
            )
        };
        if value < best {
            best = value;
            best_choice = picks;
        }
    });
    state.memo.insert((burned, protected), (best, best_choice));
    best
}

fn rebuild_witness(
    ctx: &MaskContext,
    memo: &HashMap<(u64, u64), (usize, u64)>,
    mut burned: u64,
    mut protected: u64,
) -> Strategy {
    let mut steps = Vec::new();
    loop {
        if ctx.threatened(burned, protected) == 0 {
            break;
        }
        let &(_, picks) = memo
            .get(&(burned, protected))
            .expect("visited during search");
        protected |= picks;
        steps.push(mask_to_set(picks));
        let newly = ctx.threatened(burned, protected);
        if newly == 0 {
            break;
        }
        burned |= newly;
    }
    while steps.last().is_some_and(BTreeSet::is_empty) {
        steps.pop();
    }
    Strategy::new(steps)
}

/// Minimum burned over all valid strategies: every step branches over all
/// protection sets of at most `budget` unburned, unprotected vertices.
/// Protections outside the fire-reachable region never change the process,
/// so candidates are restricted to it without affecting the minimum.
pub fn exhaustive_optimal(instance: &Instance, cap: usize) -> Result<SolveResult, SolveError> {
    let n = instance.graph.vertex_count();
    let cap = cap.min(MASK_LIMIT);
    if n > cap {
        return Err(SolveError::TooLarge { n, cap });
    }
    let ctx = MaskContext::new(&instance.graph);
    let mut state = SearchState {
        memo: HashMap::new(),
        nodes: 0,
    };
    let start = 1u64 << instance.source;
    let min_burned = min_burned_search(&ctx, &mut state, instance.budget, false, start, 0);
    let witness = rebuild_witness(&ctx, &state.memo, start, 0);
    Ok(SolveResult {
        min_burned,
        witness,
        nodes_explored: state.nodes,
    })
}

/// Optimal burn count on a tree, searching only strategies that protect
/// vertices adjacent to the fire at every step.
pub fn tree_optimal(instance: &Instance) -> Result<SolveResult, SolveError> {
    if !instance.graph.is_tree() {
        return Err(SolveError::NotATree);
    }
    let n = instance.graph.vertex_count();
    if n > MASK_LIMIT {
        return Err(SolveError::TooLarge { n, cap: MASK_LIMIT });
    }
    let ctx = MaskContext::new(&instance.graph);
    let mut state = SearchState {
        memo: HashMap::new(),
        nodes: 0,
    };
    let start = 1u64 << instance.source;
    let min_burned = min_burned_search(&ctx, &mut state, instance.budget, true, start, 0);
    let witness = rebuild_witness(&ctx, &state.memo, start, 0);
    Ok(SolveResult {
        min_burned,
        witness,
        nodes_explored: state.nodes,
    })
}

/// Decide whether some strategy burns at most `threshold` vertices. With
/// budget >= max degree the answer is immediately yes (protect the source's
/// neighborhood at step one); otherwise a bounded search over protections
/// inside the distance-k neighborhood of the source decides the instance,
/// cutting off any branch that burns more than k vertices.
pub fn fpt_decide_k_delta(instance: &Instance) -> Result<Decision, SolveError> {
    let threshold = instance.threshold.ok_or(SolveError::MissingThreshold)?;
    let graph = &instance.graph;
    let n = graph.vertex_count();

    if instance.budget >= graph.max_degree() {
        let neighborhood: BTreeSet<usize> =
            graph.neighbors(instance.source).iter().copied().collect();
        let witness = if neighborhood.is_empty() {
            Strategy::empty()
        } else {
            Strategy::new(vec![neighborhood])
        };
        return Ok(Decision {
            answer: true,
            witness: Some(witness),
            nodes_explored: 0,
        });
    }

    if n > MASK_LIMIT {
        return Err(SolveError::TooLarge { n, cap: MASK_LIMIT });
    }
    let ctx = MaskContext::new(graph);
    let hood = graph
        .k_neighborhood(instance.source, threshold)
        .expect("source validated by Instance");
    let hood_mask = hood.iter().fold(0u64, |m, &v| m | (1 << v));
    let start = 1u64 << instance.source;

    struct DecideState {
        memo: HashMap<(u64, u64), Option<u64>>,
        nodes: usize,
    }

    fn explore(
        ctx: &MaskContext,
        state: &mut DecideState,
        budget: usize,
        threshold: usize,
        hood_mask: u64,
        burned: u64,
        protected: u64,
    ) -> bool {
        if burned.count_ones() as usize > threshold {
            return false;
        }
        let threat = ctx.threatened(burned, protected);
        if threat == 0 {
            return true;
        }
        if let Some(result) = state.memo.get(&(burned, protected)) {
            return result.is_some();
        }
        state.nodes += 1;
        let candidates = ctx.reachable(burned, protected) & hood_mask;
        let mut found: Option<u64> = None;
        for_each_subset(candidates, budget, true, &mut |picks| {
            if found.is_some() {
                return;
            }
            let new_protected = protected | picks;
            let newly = ctx.threatened(burned, new_protected);
            let ok = if newly == 0 {
                true
            } else {
                explore(
                    ctx,
                    state,
                    budget,
                    threshold,
                    hood_mask,
                    burned | newly,
                    new_protected,
                )
            };
            if ok {
                found = Some(picks);
            }
        });
        state.memo.insert((burned, protected), found);
        found.is_some()
    }

    let mut state = DecideState {
        memo: HashMap::new(),
        nodes: 0,
    };
    let answer = explore(
        &ctx,
        &mut state,
        instance.budget,
        threshold,
        hood_mask,
        start,
        0,
    );
    let witness = answer.then(|| {
        let mut steps = Vec::new();
        let mut burned = start;
        let mut protected = 0u64;
        loop {
            if ctx.threatened(burned, protected) == 0 {
                break;
            }
            let picks = state
                .memo
                .get(&(burned, protected))
                .copied()
                .flatten()
                .expect("successful state recorded");
            protected |= picks;
            steps.push(mask_to_set(picks));
            let newly = ctx.threatened(burned, protected);
            if newly == 0 {
                break;
            }
            burned |= newly;
        }
        while steps.last().is_some_and(BTreeSet::is_empty) {
            steps.pop();
        }
        Strategy::new(steps)
    });
    Ok(Decision {
        answer,
        witness,
        nodes_explored: state.nodes,
    })
}

/// Minimize the burn count by deciding thresholds 1, 2, ... until the first
/// yes. The iteration is capped by min(|V|, the pathwidth/degree burn bound),
/// within which a yes is guaranteed.
pub fn fpt_pw_delta(instance: &Instance) -> Result<SolveResult, SolveError> {
    let n = instance.graph.vertex_count();
    let mut cutoff = n;
    if n <= DEFAULT_PATHWIDTH_CAP {
        let (pw, _) = exact_pathwidth(&instance.graph, DEFAULT_PATHWIDTH_CAP).expect("within cap");
        cutoff = bound_pw_delta(pw, instance.graph.max_degree(), 1).clamp_to(n);
    }
    let mut nodes = 0usize;
    for threshold in 1..=cutoff {
        let probe = Instance {
            graph: instance.graph.clone(),
            source: instance.source,
            budget: instance.budget,
            threshold: Some(threshold),
        };
        let decision = fpt_decide_k_delta(&probe)?;
        nodes += decision.nodes_explored;
        if decision.answer {
            let witness = decision.witness.expect("yes answers carry a witness");
            return Ok(SolveResult {
                min_burned: threshold,
                witness,
                nodes_explored: nodes,
            });
        }
    }
    unreachable!("a strategy burning at most min(|V|, bound) vertices always exists")
}

/// Baseline: each step protect the threatened vertices that currently shield
/// the most vertices from the fire (ties toward lower ids). Not optimal.
pub fn greedy_baseline(instance: &Instance) -> Result<SolveResult, SolveError> {
    let graph = &instance.graph;
    let sources = BTreeSet::from([instance.source]);
    let mut process =
        crate::propagation::Process::new(graph, &sources).expect("source validated by Instance");
    while process.active() {
        let threatened: Vec<usize> = process.threatened().into_iter().collect();
        let alive: Vec<bool> = (0..graph.vertex_count())
            .map(|v| !process.is_burned(v) && !process.is_protected(v))
            .collect();
        let full_reach = reach_count(graph, &alive, &threatened, None);
        let mut scored: Vec<(usize, usize)> = threatened
            .iter()
            .map(|&v| {
                let without = reach_count(graph, &alive, &threatened, Some(v));
                (v, full_reach - without)
            })
            .collect();
        scored.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        let picks: BTreeSet<usize> = scored
            .iter()
            .take(instance.budget)
            .map(|&(v, _)| v)
            .collect();
        process
            .step(&picks, instance.budget)
            .expect("picks are legal by construction");
    }
    let trace = process.into_trace();
    let mut steps: Vec<BTreeSet<usize>> =
        trace.per_step.iter().map(|r| r.protected.clone()).collect();
    while steps.last().is_some_and(BTreeSet::is_empty) {
        steps.pop();
    }
    Ok(SolveResult {
        min_burned: trace.burned.len(),
        witness: Strategy::new(steps),
        nodes_explored: 0,
    })
}

/// Vertices the fire reaches through `alive` vertices, seeded by the
/// threatened set, optionally with one vertex removed.
fn reach_count(
    graph: &Graph,
    alive: &[bool],
    threatened: &[usize],
    removed: Option<usize>,
) -> usize {
    let mut seen = vec![false; graph.vertex_count()];
    let mut queue: Vec<usize> = threatened
        .iter()
        .copied()
        .filter(|&v| Some(v) != removed)
        .collect();
    for &v in &queue {
        seen[v] = true;
    }
    let mut count = queue.len();
    while let Some(v) = queue.pop() {
        for &u in graph.neighbors(v) {
            if !seen[u] && alive[u] && Some(u) != removed {
                seen[u] = true;
                count += 1;
                queue.push(u);
            }
        }
    }
    count
}
