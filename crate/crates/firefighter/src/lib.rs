//! Toolkit for the firefighter problem on undirected graphs: deterministic
//! fire-spread simulation, exact and parameterized solvers, linear-layout
//! width measures, hardness gadget trees compiled from cubic monotone
//! 1-in-3-SAT formulas, and bubble-isolation burn bounds.

pub mod bubble;
pub mod gadgets;
pub mod graph;
pub mod io;
pub mod propagation;
pub mod solvers;
pub mod widths;

pub use bubble::{
    bound_bandwidth, bound_pw_delta, bubble, burned_upper_bound, isolation_strategy,
    merge_overlapping, Bubble, BurnBound, IsolationOutcome,
};
pub use gadgets::{
    build_reduction, expected_burn_profile, extend_formula, is_satisfying, path_decomposition_pw3,
    solve_1in3, strategy_from_assignment, CubicMonotoneFormula, ExtendedFormula, ReductionTree,
    Role,
};
pub use graph::{Graph, GraphError};
pub use propagation::{simulate, simulate_multi, validate_strategy, Instance, Strategy, Trace};
pub use solvers::{
    exhaustive_optimal, fpt_decide_k_delta, fpt_pw_delta, greedy_baseline, tree_optimal, Decision,
    SolveResult, DEFAULT_EXHAUSTIVE_CAP,
};
pub use widths::{
    bandwidth_of_layout, cutwidth_of_layout, exact_bandwidth, exact_cutwidth, exact_pathwidth,
    validate_path_decomposition, LinearLayout, PathDecomposition,
};
