//! Bubbles: contiguous layout intervals covering the effect zone of a fire
//! source, the boundary-isolation strategy that confines each merged bubble,
//! and the recursive upper bound on the number of burned vertices.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigUint;
use serde::Serialize;
use thiserror::Error;

use crate::graph::Graph;
use crate::propagation::{budget_at, Process, SimulationError, Strategy, Trace};
use crate::widths::{cutwidth_of_layout, LayoutError, LinearLayout};

#[derive(Error, Debug, PartialEq, Eq)]
pub enum BubbleError {
    #[error(transparent)]
    Layout(#[from] LayoutError),
    #[error("source vertex {0} out of range")]
    SourceOutOfRange(usize),
    #[error(transparent)]
    Simulation(#[from] SimulationError),
}

/// The layout interval spanned by the radius-i neighborhood of a source.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Bubble {
    pub source: usize,
    pub left_pos: usize,
    pub right_pos: usize,
    pub radius: usize,
}

impl Bubble {
    pub fn contains_pos(&self, pos: usize) -> bool {
        self.left_pos <= pos && pos <= self.right_pos
    }
}

/// Interval from the leftmost to the rightmost layout position attained by
/// the vertices at distance at most `radius` from `source`.
pub fn bubble(
    graph: &Graph,
    layout: &LinearLayout,
    source: usize,
    radius: usize,
) -> Result<Bubble, BubbleError> {
    let positions = layout.positions(graph)?;
    if source >= graph.vertex_count() {
        return Err(BubbleError::SourceOutOfRange(source));
    }
    let hood = graph
        .k_neighborhood(source, radius)
        .expect("source checked");
    let left_pos = hood
        .iter()
        .map(|&v| positions[v])
        .min()
        .expect("contains source");
    let right_pos = hood
        .iter()
        .map(|&v| positions[v])
        .max()
        .expect("contains source");
    Ok(Bubble {
        source,
        left_pos,
        right_pos,
        radius,
    })
}

fn intervals_overlap(a: &Bubble, b: &Bubble, graph: &Graph, positions: &[usize]) -> bool {
    if a.left_pos <= b.right_pos && b.left_pos <= a.right_pos {
        return true;
    }
    graph.edges().iter().any(|&(u, v)| {
        (a.contains_pos(positions[u]) && b.contains_pos(positions[v]))
            || (a.contains_pos(positions[v]) && b.contains_pos(positions[u]))
    })
}

/// Merge bubbles to a fixed point: two bubbles merge when their intervals
/// intersect or an edge joins them. A merged bubble is the spanning interval,
/// keeps the lowest source id, and the larger radius. Result is sorted by
/// left endpoint and pairwise non-overlapping.
pub fn merge_overlapping(
    bubbles: &[Bubble],
    graph: &Graph,
    layout: &LinearLayout,
) -> Result<Vec<Bubble>, BubbleError> {
    let positions = layout.positions(graph)?;
    let mut merged: Vec<Bubble> = bubbles.to_vec();
    loop {
        let mut changed = false;
        'outer: for i in 0..merged.len() {
            for j in (i + 1)..merged.len() {
                if intervals_overlap(&merged[i], &merged[j], graph, &positions) {
                    let b = merged.remove(j);
                    let a = &mut merged[i];
                    a.left_pos = a.left_pos.min(b.left_pos);
                    a.right_pos = a.right_pos.max(b.right_pos);
                    a.source = a.source.min(b.source);
                    a.radius = a.radius.max(b.radius);
                    changed = true;
                    break 'outer;
                }
            }
        }
        if !changed {
            break;
        }
    }
    merged.sort_by_key(|b| (b.left_pos, b.right_pos, b.source));
    Ok(merged)
}

/// Upper bound on the number of burned vertices. Values explode; `Saturated`
/// means "larger than the cutoff" and admits every finite count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BurnBound {
    Finite(BigUint),
    Saturated,
}

impl BurnBound {
    /// True when `count` does not exceed the bound.
    pub fn admits(&self, count: usize) -> bool {
        match self {
            BurnBound::Saturated => true,
            BurnBound::Finite(v) => BigUint::from(count) <= *v,
        }
    }

    /// min(cap, bound) as a usize.
    pub fn clamp_to(&self, cap: usize) -> usize {
        match self {
            BurnBound::Saturated => cap,
            BurnBound::Finite(v) => {
                if *v >= BigUint::from(cap) {
                    cap
                } else {
                    v.to_u64_digits().first().copied().unwrap_or(0) as usize
                }
            }
        }
    }
}

impl fmt::Display for BurnBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BurnBound::Finite(v) => write!(f, "{v}"),
            BurnBound::Saturated => write!(f, "saturated"),
        }
    }
}

// exponents past this produce numbers too large to be worth materializing
const EXPONENT_LIMIT: usize = 4096;

fn per_bubble_bound(cutwidth: usize, initial_fires: usize) -> BurnBound {
    if cutwidth == 0 {
        return BurnBound::Finite(BigUint::from(initial_fires));
    }
    match per_bubble_bound(cutwidth - 1, initial_fires) {
        BurnBound::Saturated => BurnBound::Saturated,
        BurnBound::Finite(inner) => {
            if inner > BigUint::from(EXPONENT_LIMIT) {
                return BurnBound::Saturated;
            }
            let inner_usize = inner.to_u64_digits().first().copied().unwrap_or(0) as usize;
            let exponent = 2 * cutwidth + inner_usize;
            if exponent > EXPONENT_LIMIT {
                return BurnBound::Saturated;
            }
            let base = BigUint::from(2 * cutwidth);
            BurnBound::Finite(BigUint::from(initial_fires) * base.pow(exponent as u32))
        }
    }
}

/// Burn bound for a graph of the given cutwidth with `initial_fires` sources:
/// per-bubble recursion B(0,f)=f, B(c,f)=f*(2c)^(2c+B(c-1,f)), multiplied
/// across the at most `initial_fires` bubbles. Cutwidth 0 burns only the
/// sources themselves.
pub fn burned_upper_bound(cutwidth: usize, initial_fires: usize) -> BurnBound {
    if cutwidth == 0 {
        return BurnBound::Finite(BigUint::from(initial_fires));
    }
    match per_bubble_bound(cutwidth, initial_fires) {
        BurnBound::Saturated => BurnBound::Saturated,
        BurnBound::Finite(per) => BurnBound::Finite(BigUint::from(initial_fires) * per),
    }
}

/// Burn bound in terms of pathwidth and maximum degree, via cw <= pw * delta.
pub fn bound_pw_delta(pathwidth: usize, max_degree: usize, initial_fires: usize) -> BurnBound {
    burned_upper_bound(pathwidth * max_degree, initial_fires)
}

/// Burn bound in terms of bandwidth, via cw <= bw(bw+1)/2.
pub fn bound_bandwidth(bandwidth: usize, initial_fires: usize) -> BurnBound {
    burned_upper_bound(bandwidth * (bandwidth + 1) / 2, initial_fires)
}

/// Result of running the isolation strategy.
#[derive(Debug, Clone)]
pub struct IsolationOutcome {
    pub strategy: Strategy,
    pub trace: Trace,
    pub merged_bubbles: Vec<Bubble>,
    pub cutwidth: usize,
}

/// Build and run the bubble-isolation strategy: around every source take the
/// radius-2cw bubble, merge overlaps, then bubble by bubble (left to right)
/// protect boundary vertices for up to 2cw steps and recurse into the sealed
/// interval on the cleaned subgraph, whose cutwidth strictly decreases.
/// `budgets` follows the per-step convention of `simulate_multi`; pass `&[1]`
/// for the single-firefighter setting.
pub fn isolation_strategy(
    graph: &Graph,
    layout: &LinearLayout,
    sources: &BTreeSet<usize>,
    budgets: &[usize],
) -> Result<IsolationOutcome, BubbleError> {
    let positions = layout.positions(graph)?;
    let cutwidth = cutwidth_of_layout(graph, layout)?;
    let mut process = Process::new(graph, sources)?;

    let mut merged_bubbles = Vec::new();
    if cutwidth > 0 {
        let raw: Vec<Bubble> = sources
            .iter()
            .map(|&s| bubble(graph, layout, s, 2 * cutwidth))
            .collect::<Result<_, _>>()?;
        merged_bubbles = merge_overlapping(&raw, graph, layout)?;
        for zone in &merged_bubbles {
            isolate_zone(
                graph,
                &positions,
                &mut process,
                (zone.left_pos, zone.right_pos),
                cutwidth,
                budgets,
            )?;
        }
    }
    // no further protections: let the remaining fire burn out
    while process.active() {
        let t = process.steps_taken();
        process.step(&BTreeSet::new(), budget_at(budgets, t))?;
    }
    let trace = process.into_trace();
    let mut steps: Vec<BTreeSet<usize>> =
        trace.per_step.iter().map(|r| r.protected.clone()).collect();
    while steps.last().is_some_and(BTreeSet::is_empty) {
        steps.pop();
    }
    Ok(IsolationOutcome {
        strategy: Strategy::new(steps),
        trace,
        merged_bubbles,
        cutwidth,
    })
}

fn isolate_zone(
    graph: &Graph,
    positions: &[usize],
    process: &mut Process<'_>,
    interval: (usize, usize),
    level: usize,
    budgets: &[usize],
) -> Result<(), BubbleError> {
    if level == 0 {
        return Ok(());
    }
    let (left, right) = interval;
    let inside = |v: usize| positions[v] >= left && positions[v] <= right;

    // seal phase: protect outside vertices adjacent to the interval, most
    // incident boundary edges first, for up to 2*level steps
    for _ in 0..(2 * level) {
        if !process.active() {
            break;
        }
        let mut incidence: Vec<(usize, usize)> = Vec::new();
        for v in 0..graph.vertex_count() {
            if inside(v) || process.is_burned(v) || process.is_protected(v) {
                continue;
            }
            let edges_in = graph.neighbors(v).iter().filter(|&&u| inside(u)).count();
            if edges_in > 0 {
                incidence.push((v, edges_in));
            }
        }
        if incidence.is_empty() {
            break;
        }
        incidence.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        let budget = budget_at(budgets, process.steps_taken()).max(1);
        let picks: BTreeSet<usize> = incidence.iter().take(budget).map(|&(v, _)| v).collect();
        process.step(&picks, budget)?;
    }

    // recurse into the sealed interval on the subgraph with burned-burned
    // edges removed; the proof argues its cutwidth strictly decreased
    let zone_vertices: Vec<usize> = {
        let mut vs: Vec<usize> = (0..graph.vertex_count()).filter(|&v| inside(v)).collect();
        vs.sort_by_key(|&v| positions[v]);
        vs
    };
    let burned_inside: Vec<usize> = zone_vertices
        .iter()
        .copied()
        .filter(|&v| process.is_burned(v))
        .collect();
    if burned_inside.is_empty() {
        return Ok(());
    }
    let mut fwd = vec![usize::MAX; graph.vertex_count()];
    for (sub_id, &v) in zone_vertices.iter().enumerate() {
        fwd[v] = sub_id;
    }
    let sub_edges: Vec<(usize, usize)> = graph
        .edges()
        .iter()
        .filter(|&&(u, v)| {
            inside(u) && inside(v) && !(process.is_burned(u) && process.is_burned(v))
        })
        .map(|&(u, v)| (fwd[u], fwd[v]))
        .collect();
    let sub = Graph::new(zone_vertices.len(), &sub_edges).expect("relabeled subgraph is valid");
    let sub_layout = LinearLayout::identity(sub.vertex_count());
    let sub_cutwidth = cutwidth_of_layout(&sub, &sub_layout).expect("identity layout fits");
    if sub_cutwidth >= level || sub_cutwidth == 0 {
        return Ok(());
    }
    let raw: Vec<Bubble> = burned_inside
        .iter()
        .map(|&s| bubble(&sub, &sub_layout, fwd[s], 2 * sub_cutwidth))
        .collect::<Result<_, _>>()?;
    let sub_zones = merge_overlapping(&raw, &sub, &sub_layout)?;
    for z in sub_zones {
        let global = (
            positions[zone_vertices[z.left_pos]],
            positions[zone_vertices[z.right_pos]],
        );
        isolate_zone(graph, positions, process, global, sub_cutwidth, budgets)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::widths::exact_cutwidth;

    fn path(n: usize) -> Graph {
        Graph::new(n, &(1..n).map(|i| (i - 1, i)).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn bubble_intervals_on_paths() {
        let p5 = path(5);
        let layout = LinearLayout::identity(5);
        let b0 = bubble(&p5, &layout, 2, 0).unwrap();
        assert_eq!((b0.left_pos, b0.right_pos), (2, 2));
        let b1 = bubble(&p5, &layout, 2, 1).unwrap();
        assert_eq!((b1.left_pos, b1.right_pos), (1, 3));
        let b10 = bubble(&p5, &layout, 2, 10).unwrap();
        assert_eq!((b10.left_pos, b10.right_pos), (0, 4));
    }

    #[test]
    fn bubbles_grow_monotonically() {
        let g = Graph::new(7, &[(0, 1), (1, 2), (2, 3), (3, 4), (2, 5), (5, 6)]).unwrap();
        let layout = LinearLayout::new(vec![3, 0, 5, 1, 6, 2, 4]);
        for s in 0..7 {
            let mut prev = bubble(&g, &layout, s, 0).unwrap();
            for i in 1..6 {
                let next = bubble(&g, &layout, s, i).unwrap();
                assert!(next.left_pos <= prev.left_pos && next.right_pos >= prev.right_pos);
                prev = next;
            }
        }
    }

    #[test]
    fn merging_by_intersection_and_edges() {
        let p5 = path(5);
        let layout = LinearLayout::identity(5);
        // [0,1] and [2,4] joined by the edge (1,2)
        let a = bubble(&p5, &layout, 0, 1).unwrap();
        let b = bubble(&p5, &layout, 3, 1).unwrap();
        let merged = merge_overlapping(&[a, b], &p5, &layout).unwrap();
        assert_eq!(merged.len(), 1);
        assert_eq!((merged[0].left_pos, merged[0].right_pos), (0, 4));

        // intersecting intervals merge outright
        let a = bubble(&p5, &layout, 1, 1).unwrap();
        let b = bubble(&p5, &layout, 2, 1).unwrap();
        assert!(a.right_pos >= b.left_pos);
        let merged = merge_overlapping(&[a, b], &p5, &layout).unwrap();
        assert_eq!(merged.len(), 1);
        assert_eq!((merged[0].left_pos, merged[0].right_pos), (0, 3));

        // two components with a gap stay separate
        let g = Graph::new(5, &[(0, 1), (3, 4)]).unwrap();
        let layout = LinearLayout::identity(5);
        let a = bubble(&g, &layout, 0, 1).unwrap();
        let b = bubble(&g, &layout, 4, 1).unwrap();
        let merged = merge_overlapping(&[a, b], &g, &layout).unwrap();
        assert_eq!(merged.len(), 2);
    }

    #[test]
    fn bound_values() {
        assert_eq!(
            burned_upper_bound(0, 3),
            BurnBound::Finite(BigUint::from(3u32))
        );
        // single bubble at cutwidth 1: 1 * 2^(2+1) = 8
        assert_eq!(
            burned_upper_bound(1, 1),
            BurnBound::Finite(BigUint::from(8u32))
        );
        let b21 = burned_upper_bound(2, 1);
        let b11 = burned_upper_bound(1, 1);
        match (&b21, &b11) {
            (BurnBound::Finite(a), BurnBound::Finite(b)) => assert!(a > b),
            _ => panic!("small bounds must be finite"),
        }
        assert_eq!(burned_upper_bound(3, 1), BurnBound::Saturated);
        assert!(BurnBound::Saturated.admits(usize::MAX));
        assert_eq!(BurnBound::Saturated.clamp_to(7), 7);
        assert_eq!(burned_upper_bound(1, 1).clamp_to(100), 8);

        assert_eq!(bound_pw_delta(1, 2, 1), burned_upper_bound(2, 1));
        assert_eq!(
            bound_bandwidth(1, 1),
            BurnBound::Finite(BigUint::from(8u32))
        );
        assert_eq!(
            bound_pw_delta(0, 0, 3),
            BurnBound::Finite(BigUint::from(3u32))
        );
    }

    #[test]
    fn boundary_edges_never_exceed_twice_cutwidth() {
        let g = Graph::new(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (1, 4), (0, 3)]).unwrap();
        let layout = LinearLayout::new(vec![2, 0, 4, 1, 5, 3]);
        let positions = layout.positions(&g).unwrap();
        let cw = cutwidth_of_layout(&g, &layout).unwrap();
        for s in 0..6 {
            for r in 0..4 {
                let b = bubble(&g, &layout, s, r).unwrap();
                let boundary = g
                    .edges()
                    .iter()
                    .filter(|&&(u, v)| b.contains_pos(positions[u]) != b.contains_pos(positions[v]))
                    .count();
                assert!(boundary <= 2 * cw);
            }
        }
    }

    #[test]
    fn isolation_on_paths_and_edgeless() {
        let p5 = path(5);
        let (cw, layout) = exact_cutwidth(&p5, 12).unwrap();
        let outcome = isolation_strategy(&p5, &layout, &BTreeSet::from([2]), &[1]).unwrap();
        assert!(burned_upper_bound(cw, 1).admits(outcome.trace.burned.len()));

        let edgeless = Graph::new(4, &[]).unwrap();
        let outcome = isolation_strategy(
            &edgeless,
            &LinearLayout::identity(4),
            &BTreeSet::from([1, 3]),
            &[1],
        )
        .unwrap();
        assert_eq!(outcome.trace.burned, BTreeSet::from([1, 3]));
        assert!(outcome.strategy.steps.is_empty());
        assert_eq!(outcome.cutwidth, 0);
    }

    #[test]
    fn isolation_seals_separate_bubbles_in_turn() {
        // distant end fires on long paths keep their bubbles separate; each
        // bubble has a single boundary vertex, so the second seal still
        // finishes before its fire arrives
        for n in [14usize, 20, 30] {
            let g = path(n);
            let layout = LinearLayout::identity(n);
            let positions = layout.positions(&g).unwrap();
            let sources = BTreeSet::from([0, n - 1]);
            let outcome = isolation_strategy(&g, &layout, &sources, &[1]).unwrap();
            assert_eq!(outcome.merged_bubbles.len(), 2, "n={n}");
            for &v in &outcome.trace.burned {
                assert!(
                    outcome.merged_bubbles.iter().any(|b| b.contains_pos(positions[v])),
                    "vertex {v} escaped on P{n}"
                );
            }
            assert!(burned_upper_bound(1, 2).admits(outcome.trace.burned.len()));
        }

        // mid-path sources give the second bubble two boundary vertices but
        // its seal only starts once the first is done; one side burns through
        // before it can be protected, so only the burn bound is promised here
        let g = path(24);
        let layout = LinearLayout::identity(24);
        let positions = layout.positions(&g).unwrap();
        let sources = BTreeSet::from([5, 18]);
        let outcome = isolation_strategy(&g, &layout, &sources, &[1]).unwrap();
        assert_eq!(outcome.merged_bubbles.len(), 2);
        assert!(burned_upper_bound(1, 2).admits(outcome.trace.burned.len()));
        let escaped = outcome
            .trace
            .burned
            .iter()
            .filter(|&&v| !outcome.merged_bubbles.iter().any(|b| b.contains_pos(positions[v])))
            .count();
        assert!(escaped > 0, "the late-seal window on P24 is expected to leak");
    }

    #[test]
    fn isolation_confines_merged_bubbles() {
        let g = Graph::new(
            8,
            &[
                (0, 1),
                (1, 2),
                (2, 3),
                (3, 4),
                (4, 5),
                (5, 6),
                (6, 7),
                (2, 5),
            ],
        )
        .unwrap();
        let (cw, layout) = exact_cutwidth(&g, 12).unwrap();
        let positions = layout.positions(&g).unwrap();
        let sources = BTreeSet::from([0, 6]);
        let outcome = isolation_strategy(&g, &layout, &sources, &[1]).unwrap();
        for &v in &outcome.trace.burned {
            assert!(
                outcome
                    .merged_bubbles
                    .iter()
                    .any(|b| b.contains_pos(positions[v])),
                "burned vertex {v} escaped every merged bubble"
            );
        }
        assert!(burned_upper_bound(cw, sources.len()).admits(outcome.trace.burned.len()));
    }
}
