//! Gadget trees compiled from cubic monotone 1-in-3-SAT formulas: the tree
//! construction, its burn-count profile, the strategy derived from a
//! satisfying assignment, and a width-3 path decomposition of the tree.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::Graph;
use crate::propagation::{Process, Strategy};
use crate::widths::PathDecomposition;

#[derive(Error, Debug, PartialEq, Eq)]
pub enum FormulaError {
    #[error("clause {clause} does not have exactly 3 distinct variables")]
    BadClause { clause: usize },
    #[error("clause {clause} mentions variable {variable}, out of range")]
    VariableOutOfRange { clause: usize, variable: usize },
    #[error("variable {variable} occurs in {count} clauses instead of 3")]
    OccurrenceCount { variable: usize, count: usize },
    #[error(
        "{clauses} clauses for {variables} variables; a cubic monotone formula has equally many"
    )]
    ClauseCountMismatch { clauses: usize, variables: usize },
}

#[derive(Error, Debug, PartialEq, Eq)]
pub enum GadgetError {
    #[error(transparent)]
    Formula(#[from] FormulaError),
    #[error("assignment has {given} values for {variables} variables")]
    AssignmentLength { given: usize, variables: usize },
    #[error("assignment does not satisfy the extended formula")]
    NotSatisfying,
    #[error("budget must be at least 1")]
    ZeroBudget,
}

/// CNF with all-positive 3-literal clauses where every variable occurs in
/// exactly three clauses (hence as many clauses as variables). Variables and
/// clauses are 0-indexed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CubicMonotoneFormula {
    variable_count: usize,
    clauses: Vec<[usize; 3]>,
}

impl CubicMonotoneFormula {
    /// Build and validate; clause variable triples are stored sorted.
    pub fn new(variable_count: usize, clauses: Vec<[usize; 3]>) -> Result<Self, FormulaError> {
        let mut sorted = clauses;
        for (c, triple) in sorted.iter_mut().enumerate() {
            triple.sort_unstable();
            if triple[0] == triple[1] || triple[1] == triple[2] {
                return Err(FormulaError::BadClause { clause: c });
            }
            if let Some(&v) = triple.iter().find(|&&v| v >= variable_count) {
                return Err(FormulaError::VariableOutOfRange {
                    clause: c,
                    variable: v,
                });
            }
        }
        let mut counts = vec![0usize; variable_count];
        for triple in &sorted {
            for &v in triple {
                counts[v] += 1;
            }
        }
        if let Some(v) = counts.iter().position(|&c| c != 3) {
            return Err(FormulaError::OccurrenceCount {
                variable: v,
                count: counts[v],
            });
        }
        if sorted.len() != variable_count {
            return Err(FormulaError::ClauseCountMismatch {
                clauses: sorted.len(),
                variables: variable_count,
            });
        }
        Ok(CubicMonotoneFormula {
            variable_count,
            clauses: sorted,
        })
    }

    pub fn variable_count(&self) -> usize {
        self.variable_count
    }

    pub fn clause_count(&self) -> usize {
        self.clauses.len()
    }

    pub fn clauses(&self) -> &[[usize; 3]] {
        &self.clauses
    }

    /// For each variable, the indices of the three clauses containing it,
    /// ascending.
    pub fn occurrences(&self) -> Vec<[usize; 3]> {
        let mut lists = vec![Vec::new(); self.variable_count];
        for (c, triple) in self.clauses.iter().enumerate() {
            for &v in triple {
                lists[v].push(c);
            }
        }
        lists
            .into_iter()
            .map(|l| {
                debug_assert_eq!(l.len(), 3);
                [l[0], l[1], l[2]]
            })
            .collect()
    }
}

/// The base formula plus, for each clause, its all-negated complement clause.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtendedFormula {
    pub base: CubicMonotoneFormula,
    /// `complement_clauses[j]` holds the variables of base clause j, negated.
    pub complement_clauses: Vec<[usize; 3]>,
}

/// Append the complement clause of each base clause, in order.
pub fn extend_formula(formula: &CubicMonotoneFormula) -> ExtendedFormula {
    ExtendedFormula {
        complement_clauses: formula.clauses.clone(),
        base: formula.clone(),
    }
}

/// True when every base clause has exactly one true literal and every
/// complement clause has exactly two true (negated) literals.
pub fn is_satisfying(extended: &ExtendedFormula, assignment: &[bool]) -> bool {
    if assignment.len() != extended.base.variable_count {
        return false;
    }
    let base_ok = extended
        .base
        .clauses
        .iter()
        .all(|t| t.iter().filter(|&&v| assignment[v]).count() == 1);
    let complement_ok = extended
        .complement_clauses
        .iter()
        .all(|t| t.iter().filter(|&&v| !assignment[v]).count() == 2);
    base_ok && complement_ok
}

/// Brute-force 1-in-3 satisfiability over all 2^n assignments; returns the
/// first satisfying assignment in mask order (false-heavy first).
pub fn solve_1in3(formula: &CubicMonotoneFormula) -> Option<Vec<bool>> {
    let n = formula.variable_count;
    assert!(n < 64, "brute-force search is limited to 63 variables");
    for mask in 0u64..(1u64 << n) {
        let assignment: Vec<bool> = (0..n).map(|v| mask & (1 << v) != 0).collect();
        let ok = formula
            .clauses
            .iter()
            .all(|t| t.iter().filter(|&&v| assignment[v]).count() == 1);
        if ok {
            return Some(assignment);
        }
    }
    None
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Role {
    Spine,
    VariablePos,
    VariableNeg,
    GuardCenter,
    GuardLeaf,
    PathInternal,
    Literal,
    ClausePathInternal,
    Dummy,
    WPath,
}

/// One literal branch hanging off a descent-path endpoint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiteralBranch {
    pub literal: usize,
    pub clause: usize,
    /// Q-path from the literal toward the clause gadget (may be empty).
    pub q_path: Vec<usize>,
    pub ending: BranchEnding,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BranchEnding {
    /// Positive occurrence: a guard center at the Q-path endpoint.
    Guard { center: usize },
    /// Negated occurrence: a dummy leaf plus the 3-edge path whose last
    /// vertex is a guard center.
    DummyAndPath { dummy: usize, d_path: [usize; 3] },
}

/// The gadget hanging off one spine vertex for one side of a variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SideGadget {
    pub variable_vertex: usize,
    pub guard_center: usize,
    /// Descent path below the variable vertex, excluding it; the last entry
    /// (or the variable vertex itself when empty) carries the literals.
    pub descent: Vec<usize>,
    pub branches: Vec<LiteralBranch>,
}

impl SideGadget {
    pub fn endpoint(&self) -> usize {
        self.descent.last().copied().unwrap_or(self.variable_vertex)
    }
}

/// The role-labeled tree compiled from a formula, with the burn threshold k.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionTree {
    pub graph: Graph,
    pub source: usize,
    pub k: usize,
    pub budget: usize,
    pub roles: Vec<Role>,
    /// literal vertex -> (variable, clause), 0-indexed
    pub clause_map: BTreeMap<usize, (usize, usize)>,
    pub formula: CubicMonotoneFormula,
    pub spine: Vec<usize>,
    pub pos_gadgets: Vec<SideGadget>,
    pub neg_gadgets: Vec<SideGadget>,
    /// w_1..w_{5n+1} (w_1 is the source) when budget >= 2, else empty.
    pub w_path: Vec<usize>,
    /// budget-1 guard centers per w-path vertex.
    pub w_guards: Vec<Vec<usize>>,
}

impl ReductionTree {
    /// Guard leaves of a guard center.
    pub fn guard_leaves(&self, center: usize) -> Vec<usize> {
        self.graph
            .neighbors(center)
            .iter()
            .copied()
            .filter(|&u| self.roles[u] == Role::GuardLeaf)
            .collect()
    }

    pub fn guard_centers(&self) -> Vec<usize> {
        (0..self.graph.vertex_count())
            .filter(|&v| self.roles[v] == Role::GuardCenter)
            .collect()
    }
}

/// Per-step burn accounting of the intended strategy: the count after the
/// variable phase, the count added per clause, and their total (which equals
/// the threshold k of the budget-1 tree).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BurnProfile {
    pub phase1: usize,
    pub per_clause: Vec<usize>,
    pub total: usize,
}

pub fn expected_burn_profile(n: usize) -> BurnProfile {
    let p = 2 * n - 1;
    let phase1 = p + 3 * n + n * n;
    let per_clause: Vec<usize> = (0..n).map(|j| 9 * (n - j) - 4).collect();
    let total = phase1 + per_clause.iter().sum::<usize>();
    BurnProfile {
        phase1,
        per_clause,
        total,
    }
}

/// Threshold of the budget-1 tree: p + n(11n+7)/2.
pub fn threshold_for(n: usize) -> usize {
    let product = n * (11 * n + 7);
    debug_assert_eq!(product % 2, 0);
    (2 * n - 1) + product / 2
}

struct TreeBuilder {
    edges: Vec<(usize, usize)>,
    roles: Vec<Role>,
}

impl TreeBuilder {
    fn new() -> Self {
        TreeBuilder {
            edges: Vec::new(),
            roles: Vec::new(),
        }
    }

    fn vertex(&mut self, role: Role) -> usize {
        self.roles.push(role);
        self.roles.len() - 1
    }

    fn edge(&mut self, u: usize, v: usize) {
        self.edges.push((u, v));
    }

    /// Path of `len` edges starting at `from`; returns the new vertices.
    fn path(&mut self, from: usize, len: usize, role: Role) -> Vec<usize> {
        let mut prev = from;
        let mut out = Vec::with_capacity(len);
        for _ in 0..len {
            let v = self.vertex(role);
            self.edge(prev, v);
            out.push(v);
            prev = v;
        }
        out
    }

    /// Guard star: center adjacent to `host`, with `leaf_count` leaves.
    fn guard(&mut self, host: usize, leaf_count: usize) -> usize {
        let center = self.vertex(Role::GuardCenter);
        self.edge(host, center);
        for _ in 0..leaf_count {
            let leaf = self.vertex(Role::GuardLeaf);
            self.edge(center, leaf);
        }
        center
    }
}

/// Compile a formula into its gadget tree. Vertex numbering is construction
/// order: spine, then per-variable vertices with descent paths and literals,
/// then clause paths, then guards, then the w-path with its guards.
pub fn build_reduction(
    formula: &CubicMonotoneFormula,
    budget: usize,
) -> Result<ReductionTree, GadgetError> {
    if budget == 0 {
        return Err(GadgetError::ZeroBudget);
    }
    let n = formula.variable_count;
    let p = 2 * n - 1;
    let base_k = threshold_for(n);
    let k = if budget >= 2 { base_k + 5 * n } else { base_k };
    let occurrences = formula.occurrences();

    let mut b = TreeBuilder::new();

    // spine u_1..u_p; u_1 is the source
    let spine: Vec<usize> = (0..p).map(|_| b.vertex(Role::Spine)).collect();
    for w in spine.windows(2) {
        b.edge(w[0], w[1]);
    }
    let source = spine[0];

    // variable vertices, descent paths, literal vertices
    let mut var_vertices = Vec::with_capacity(n); // (pos, neg)
    let mut descents = Vec::with_capacity(n); // (pos path, neg path)
    let mut literals = Vec::with_capacity(n); // (pos [3], neg [3])
    for i in 0..n {
        let host = spine[2 * i];
        let v_pos = b.vertex(Role::VariablePos);
        b.edge(host, v_pos);
        let v_neg = b.vertex(Role::VariableNeg);
        b.edge(host, v_neg);
        let len = 2 * (n - 1 - i);
        let d_pos = b.path(v_pos, len, Role::PathInternal);
        let end_pos = d_pos.last().copied().unwrap_or(v_pos);
        let lit_pos: [usize; 3] = std::array::from_fn(|_| {
            let l = b.vertex(Role::Literal);
            b.edge(end_pos, l);
            l
        });
        let d_neg = b.path(v_neg, len, Role::PathInternal);
        let end_neg = d_neg.last().copied().unwrap_or(v_neg);
        let lit_neg: [usize; 3] = std::array::from_fn(|_| {
            let l = b.vertex(Role::Literal);
            b.edge(end_neg, l);
            l
        });
        var_vertices.push((v_pos, v_neg));
        descents.push((d_pos, d_neg));
        literals.push((lit_pos, lit_neg));
    }

    // clause paths: Q-paths on both sides; dummies and D-path interiors on
    // the negated side (the D-path's last vertex is added with the guards)
    let mut q_pos: Vec<[Vec<usize>; 3]> = (0..n)
        .map(|_| [Vec::new(), Vec::new(), Vec::new()])
        .collect();
    let mut q_neg: Vec<[Vec<usize>; 3]> = (0..n)
        .map(|_| [Vec::new(), Vec::new(), Vec::new()])
        .collect();
    let mut dummies = vec![[usize::MAX; 3]; n];
    let mut d_interior = vec![[(usize::MAX, usize::MAX); 3]; n];
    for i in 0..n {
        for r in 0..3 {
            let j = occurrences[i][r];
            q_pos[i][r] = b.path(literals[i].0[r], 3 * j, Role::PathInternal);
        }
        for r in 0..3 {
            let j = occurrences[i][r];
            let q = b.path(literals[i].1[r], 3 * j, Role::PathInternal);
            let endpoint = q.last().copied().unwrap_or(literals[i].1[r]);
            let dummy = b.vertex(Role::Dummy);
            b.edge(endpoint, dummy);
            let da = b.vertex(Role::ClausePathInternal);
            b.edge(endpoint, da);
            let db = b.vertex(Role::ClausePathInternal);
            b.edge(da, db);
            q_neg[i][r] = q;
            dummies[i][r] = dummy;
            d_interior[i][r] = (da, db);
        }
    }

    // guards: variable guards, then clause guards (the negated-side clause
    // guard completes its D-path)
    let mut guard_var = Vec::with_capacity(n); // (g_i, gbar_i)
    for &(v_pos, v_neg) in &var_vertices {
        let g = b.guard(v_pos, k);
        let gbar = b.guard(v_neg, k);
        guard_var.push((g, gbar));
    }
    let mut guard_clause_pos = vec![[usize::MAX; 3]; n];
    let mut guard_clause_neg = vec![[usize::MAX; 3]; n];
    for i in 0..n {
        for r in 0..3 {
            let endpoint = q_pos[i][r].last().copied().unwrap_or(literals[i].0[r]);
            guard_clause_pos[i][r] = b.guard(endpoint, k);
        }
        for r in 0..3 {
            guard_clause_neg[i][r] = b.guard(d_interior[i][r].1, k);
        }
    }

    // w-path augmentation for budgets beyond one
    let mut w_path = Vec::new();
    let mut w_guards = Vec::new();
    if budget >= 2 {
        w_path.push(source);
        let rest = b.path(source, 5 * n, Role::WPath);
        w_path.extend(rest);
        for &w in &w_path {
            let guards: Vec<usize> = (0..budget - 1).map(|_| b.guard(w, k)).collect();
            w_guards.push(guards);
        }
    }

    let graph = Graph::new(b.roles.len(), &b.edges).expect("construction yields a simple graph");
    debug_assert!(graph.is_tree());

    let mut clause_map = BTreeMap::new();
    let mut pos_gadgets = Vec::with_capacity(n);
    let mut neg_gadgets = Vec::with_capacity(n);
    for i in 0..n {
        let mut pos_branches = Vec::with_capacity(3);
        let mut neg_branches = Vec::with_capacity(3);
        for r in 0..3 {
            let j = occurrences[i][r];
            clause_map.insert(literals[i].0[r], (i, j));
            clause_map.insert(literals[i].1[r], (i, j));
            pos_branches.push(LiteralBranch {
                literal: literals[i].0[r],
                clause: j,
                q_path: q_pos[i][r].clone(),
                ending: BranchEnding::Guard {
                    center: guard_clause_pos[i][r],
                },
            });
            let (da, db) = d_interior[i][r];
            neg_branches.push(LiteralBranch {
                literal: literals[i].1[r],
                clause: j,
                q_path: q_neg[i][r].clone(),
                ending: BranchEnding::DummyAndPath {
                    dummy: dummies[i][r],
                    d_path: [da, db, guard_clause_neg[i][r]],
                },
            });
        }
        pos_gadgets.push(SideGadget {
            variable_vertex: var_vertices[i].0,
            guard_center: guard_var[i].0,
            descent: descents[i].0.clone(),
            branches: pos_branches,
        });
        neg_gadgets.push(SideGadget {
            variable_vertex: var_vertices[i].1,
            guard_center: guard_var[i].1,
            descent: descents[i].1.clone(),
            branches: neg_branches,
        });
    }

    Ok(ReductionTree {
        graph,
        source,
        k,
        budget,
        roles: b.roles,
        clause_map,
        formula: formula.clone(),
        spine,
        pos_gadgets,
        neg_gadgets,
        w_path,
        w_guards,
    })
}

/// The strategy a satisfying assignment induces: during the variable phase
/// protect the false side's variable vertex and then the burning side's
/// guard; during each clause phase protect the true occurrence's guard and
/// one vertex on each false occurrence's D-path (the unique path vertex
/// adjacent to the fire). With budget >= 2 every step additionally protects
/// the threatened w-path guards.
pub fn strategy_from_assignment(
    tree: &ReductionTree,
    assignment: &[bool],
) -> Result<Strategy, GadgetError> {
    let n = tree.formula.variable_count;
    if assignment.len() != n {
        return Err(GadgetError::AssignmentLength {
            given: assignment.len(),
            variables: n,
        });
    }
    let extended = extend_formula(&tree.formula);
    if !is_satisfying(&extended, assignment) {
        return Err(GadgetError::NotSatisfying);
    }
    let p = 2 * n - 1;
    let occurrences = tree.formula.occurrences();
    let slot_of = |variable: usize, clause: usize| -> usize {
        occurrences[variable]
            .iter()
            .position(|&c| c == clause)
            .expect("occurrence exists")
    };

    let sources = BTreeSet::from([tree.source]);
    let mut process = Process::new(&tree.graph, &sources).expect("tree has vertices");
    let total_steps = if tree.budget >= 2 { 5 * n + 1 } else { 5 * n };
    let mut steps: Vec<BTreeSet<usize>> = Vec::with_capacity(total_steps);

    for t in 1..=total_steps {
        let mut picks = BTreeSet::new();
        if tree.budget >= 2 && t <= tree.w_path.len() {
            picks.extend(tree.w_guards[t - 1].iter().copied());
        }
        if t <= p + 1 {
            let i = t.div_ceil(2) - 1;
            if t % 2 == 1 {
                // protect the variable vertex of the false side
                picks.insert(if assignment[i] {
                    tree.neg_gadgets[i].variable_vertex
                } else {
                    tree.pos_gadgets[i].variable_vertex
                });
            } else {
                // protect the variable guard of the burning side
                picks.insert(if assignment[i] {
                    tree.pos_gadgets[i].guard_center
                } else {
                    tree.neg_gadgets[i].guard_center
                });
            }
        } else if t <= 5 * n {
            let offset = t - p - 2;
            let clause = offset / 3;
            let sub = offset % 3;
            let triple = tree.formula.clauses()[clause];
            if sub == 0 {
                let true_var = *triple
                    .iter()
                    .find(|&&v| assignment[v])
                    .expect("satisfying assignments have one true literal per clause");
                let slot = slot_of(true_var, clause);
                match tree.pos_gadgets[true_var].branches[slot].ending {
                    BranchEnding::Guard { center } => picks.insert(center),
                    BranchEnding::DummyAndPath { .. } => unreachable!("positive side has a guard"),
                };
            } else {
                let false_vars: Vec<usize> =
                    triple.iter().copied().filter(|&v| !assignment[v]).collect();
                let variable = false_vars[sub - 1];
                let slot = slot_of(variable, clause);
                let d_path = match tree.neg_gadgets[variable].branches[slot].ending {
                    BranchEnding::DummyAndPath { d_path, .. } => d_path,
                    BranchEnding::Guard { .. } => unreachable!("negated side has a D-path"),
                };
                let target = d_path
                    .iter()
                    .copied()
                    .filter(|&v| !process.is_burned(v) && !process.is_protected(v))
                    .find(|&v| {
                        tree.graph
                            .neighbors(v)
                            .iter()
                            .any(|&u| process.is_burned(u))
                    })
                    .expect("one D-path vertex borders the fire at its step");
                picks.insert(target);
            }
        }
        for &v in &picks {
            assert!(
                tree.graph
                    .neighbors(v)
                    .iter()
                    .any(|&u| process.is_burned(u)),
                "step {t}: protection of {v} is not adjacent to the fire"
            );
        }
        assert!(process.active(), "fire front died before step {t}");
        process
            .step(&picks, tree.budget)
            .expect("induced strategy only protects open vertices");
        steps.push(picks);
    }
    assert!(
        !process.active(),
        "fire must be extinguished after the final step"
    );
    Ok(Strategy::new(steps))
}

/// Width <= 3 path decomposition of a reduction tree: each variable-side
/// subtree gets a width-2 decomposition, every bag extended by the spine
/// vertex above it; spine triples {u_{2i-1}, u_{2i}, u_{2i+1}} link the
/// per-variable pieces; the w-path component (pathwidth 2) is prepended
/// reversed so its source-end bags meet the first variable's bags.
pub fn path_decomposition_pw3(tree: &ReductionTree) -> PathDecomposition {
    let mut bags: Vec<BTreeSet<usize>> = Vec::new();

    // w-path component first, far end toward the front
    let wn = tree.w_path.len();
    for idx in (0..wn).rev() {
        let w = tree.w_path[idx];
        if idx + 1 < wn {
            bags.push(BTreeSet::from([tree.w_path[idx + 1], w]));
        }
        for &center in &tree.w_guards[idx] {
            for leaf in tree.guard_leaves(center) {
                bags.push(BTreeSet::from([w, center, leaf]));
            }
        }
    }

    let n = tree.formula.variable_count;
    for i in 0..n {
        let host = tree.spine[2 * i];
        for side in [&tree.pos_gadgets[i], &tree.neg_gadgets[i]] {
            for mut bag in side_gadget_bags(tree, side) {
                bag.insert(host);
                bags.push(bag);
            }
        }
        if i + 1 < n {
            bags.push(BTreeSet::from([
                tree.spine[2 * i],
                tree.spine[2 * i + 1],
                tree.spine[2 * i + 2],
            ]));
        }
    }
    PathDecomposition::new(bags)
}

/// Width-2 bags for one variable-side subtree.
pub(crate) fn side_gadget_bags(tree: &ReductionTree, side: &SideGadget) -> Vec<BTreeSet<usize>> {
    let mut bags = Vec::new();
    let v = side.variable_vertex;
    for leaf in tree.guard_leaves(side.guard_center) {
        bags.push(BTreeSet::from([v, side.guard_center, leaf]));
    }
    let mut prev = v;
    for &d in &side.descent {
        bags.push(BTreeSet::from([prev, d]));
        prev = d;
    }
    let endpoint = side.endpoint();
    for branch in &side.branches {
        let mut chain = vec![branch.literal];
        chain.extend(branch.q_path.iter().copied());
        let q_end = *chain.last().expect("chain starts at the literal");
        let mut branch_bags: Vec<BTreeSet<usize>> = Vec::new();
        for pair in chain.windows(2) {
            branch_bags.push(BTreeSet::from([pair[0], pair[1]]));
        }
        match &branch.ending {
            BranchEnding::Guard { center } => {
                branch_bags.push(BTreeSet::from([q_end, *center]));
                for leaf in tree.guard_leaves(*center) {
                    branch_bags.push(BTreeSet::from([*center, leaf]));
                }
            }
            BranchEnding::DummyAndPath { dummy, d_path } => {
                branch_bags.push(BTreeSet::from([q_end, *dummy]));
                branch_bags.push(BTreeSet::from([q_end, d_path[0]]));
                branch_bags.push(BTreeSet::from([d_path[0], d_path[1]]));
                branch_bags.push(BTreeSet::from([d_path[1], d_path[2]]));
                for leaf in tree.guard_leaves(d_path[2]) {
                    branch_bags.push(BTreeSet::from([d_path[2], leaf]));
                }
            }
        }
        for mut bag in branch_bags {
            bag.insert(endpoint);
            bags.push(bag);
        }
    }
    bags
}
