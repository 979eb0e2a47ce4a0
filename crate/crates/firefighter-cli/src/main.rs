//! Command-line surface: simulate, solve, decide, reduce, widths, bound,
//! bench. Exit codes: 0 success (or a yes decision), 1 no (or bench
//! mismatches), 2 usage/parse error, 3 size cap exceeded.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use firefighter::bubble::{burned_upper_bound, isolation_strategy, BubbleError};
use firefighter::gadgets::{
    build_reduction, path_decomposition_pw3, solve_1in3, strategy_from_assignment, GadgetError,
};
use firefighter::io;
use firefighter::propagation::{simulate, Instance, InstanceError, SimulationError};
use firefighter::solvers::{
    exhaustive_optimal, fpt_decide_k_delta, fpt_pw_delta, greedy_baseline, tree_optimal,
    SolveError, SolveResult, DEFAULT_EXHAUSTIVE_CAP,
};
use firefighter::widths::{
    exact_bandwidth, exact_cutwidth, exact_pathwidth, WidthError, DEFAULT_BANDWIDTH_CAP,
    DEFAULT_CUTWIDTH_CAP, DEFAULT_PATHWIDTH_CAP,
};

#[derive(Parser)]
#[command(name = "firefighter", version, about = "Firefighter problem toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Algo {
    Exhaustive,
    Tree,
    Fpt,
    Greedy,
}

#[derive(Clone, Copy, ValueEnum)]
enum Measure {
    Cw,
    Bw,
    Pw,
}

#[derive(Subcommand)]
enum Command {
    /// Run a strategy against an instance and print the trace JSON.
    Simulate {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        source: usize,
        #[arg(long)]
        budget: usize,
        #[arg(long)]
        strategy: PathBuf,
    },
    /// Minimize the number of burned vertices.
    Solve {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        source: usize,
        #[arg(long)]
        budget: usize,
        #[arg(long, value_enum)]
        algo: Algo,
        /// Size cap for the exhaustive search.
        #[arg(long, default_value_t = DEFAULT_EXHAUSTIVE_CAP)]
        cap: usize,
    },
    /// Decide whether at most k vertices need to burn (exit 0 yes, 1 no).
    Decide {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        source: usize,
        #[arg(long)]
        budget: usize,
        #[arg(long)]
        k: usize,
    },
    /// Compile a cubic monotone 1-in-3-SAT formula into its gadget tree.
    Reduce {
        #[arg(long)]
        cnf: PathBuf,
        #[arg(long, default_value_t = 1)]
        budget: usize,
        #[arg(long)]
        out_graph: PathBuf,
        #[arg(long)]
        out_labels: PathBuf,
        /// Write the assignment-derived strategy JSON here.
        #[arg(long)]
        emit_strategy: Option<PathBuf>,
        /// Assignment file (one line of 0/1); defaults to a brute-force solution.
        #[arg(long)]
        assignment: Option<PathBuf>,
        /// Write a width-3 path decomposition here.
        #[arg(long)]
        emit_decomposition: Option<PathBuf>,
    },
    /// Exact width measure with a certificate (exit 3 over the size cap).
    Widths {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, value_enum)]
        measure: Measure,
        #[arg(long)]
        cap: Option<usize>,
    },
    /// Isolation strategy and burn bound for a layout and source set.
    Bound {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        layout: PathBuf,
        /// Comma-separated source vertex ids.
        #[arg(long)]
        sources: String,
    },
    /// Oracle-equivalence and invariant sweep over a directory of graphs.
    Bench {
        #[arg(long)]
        corpus: PathBuf,
    },
}

enum Failure {
    Usage(String),
    SizeCap(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::SizeCap(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::SizeCap(m) => m,
        }
    }
}

impl From<io::IoError> for Failure {
    fn from(e: io::IoError) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<InstanceError> for Failure {
    fn from(e: InstanceError) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<SimulationError> for Failure {
    fn from(e: SimulationError) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<GadgetError> for Failure {
    fn from(e: GadgetError) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<BubbleError> for Failure {
    fn from(e: BubbleError) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<SolveError> for Failure {
    fn from(e: SolveError) -> Self {
        match e {
            SolveError::TooLarge { .. } => Failure::SizeCap(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<WidthError> for Failure {
    fn from(e: WidthError) -> Self {
        match e {
            WidthError::TooLarge { .. } => Failure::SizeCap(e.to_string()),
            WidthError::Layout(_) => Failure::Usage(e.to_string()),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents)
        .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))
}

fn solve_json(result: &SolveResult) -> serde_json::Value {
    json!({
        "minBurned": result.min_burned,
        "strategy": result.witness,
        "nodesExplored": result.nodes_explored,
    })
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Simulate {
            graph,
            source,
            budget,
            strategy,
        } => {
            let graph = io::parse_edge_list(&read(&graph)?)?;
            let strategy = io::parse_strategy(&read(&strategy)?)?;
            let instance = Instance::new(graph, source, budget, None)?;
            let trace = simulate(&instance, &strategy)?;
            println!("{}", io::serialize_trace(&trace));
            Ok(0)
        }
        Command::Solve {
            graph,
            source,
            budget,
            algo,
            cap,
        } => {
            let graph = io::parse_edge_list(&read(&graph)?)?;
            let instance = Instance::new(graph, source, budget, None)?;
            let result = match algo {
                Algo::Exhaustive => exhaustive_optimal(&instance, cap)?,
                Algo::Tree => tree_optimal(&instance)?,
                Algo::Fpt => fpt_pw_delta(&instance)?,
                Algo::Greedy => greedy_baseline(&instance)?,
            };
            println!("{}", solve_json(&result));
            Ok(0)
        }
        Command::Decide {
            graph,
            source,
            budget,
            k,
        } => {
            let graph = io::parse_edge_list(&read(&graph)?)?;
            let instance = Instance::new(graph, source, budget, Some(k))?;
            let decision = fpt_decide_k_delta(&instance)?;
            println!(
                "{}",
                json!({
                    "answer": if decision.answer { "yes" } else { "no" },
                    "witness": decision.witness,
                    "nodesExplored": decision.nodes_explored,
                })
            );
            Ok(if decision.answer { 0 } else { 1 })
        }
        Command::Reduce {
            cnf,
            budget,
            out_graph,
            out_labels,
            emit_strategy,
            assignment,
            emit_decomposition,
        } => {
            let formula = io::parse_dimacs_cnf(&read(&cnf)?)?;
            let tree = build_reduction(&formula, budget)?;
            write(&out_graph, &io::serialize_edge_list(&tree.graph))?;
            let labels = io::ReductionLabels::from(&tree);
            write(&out_labels, &io::serialize_labels(&labels))?;
            if let Some(out) = emit_strategy {
                let tau = match assignment {
                    Some(path) => io::parse_assignment(&read(&path)?)?,
                    None => solve_1in3(&formula).ok_or_else(|| {
                        Failure::Usage("formula has no 1-in-3 satisfying assignment".into())
                    })?,
                };
                let strategy = strategy_from_assignment(&tree, &tau)?;
                write(&out, &io::serialize_strategy(&strategy))?;
            }
            if let Some(out) = emit_decomposition {
                let decomposition = path_decomposition_pw3(&tree);
                write(&out, &io::serialize_decomposition(&decomposition))?;
            }
            println!(
                "{}",
                json!({
                    "vertices": tree.graph.vertex_count(),
                    "edges": tree.graph.edge_count(),
                    "source": tree.source,
                    "k": tree.k,
                    "budget": tree.budget,
                })
            );
            Ok(0)
        }
        Command::Widths {
            graph,
            measure,
            cap,
        } => {
            let graph = io::parse_edge_list(&read(&graph)?)?;
            match measure {
                Measure::Cw => {
                    let (value, layout) =
                        exact_cutwidth(&graph, cap.unwrap_or(DEFAULT_CUTWIDTH_CAP))?;
                    println!("{value}");
                    print!("{}", io::serialize_layout(&layout));
                }
                Measure::Bw => {
                    let (value, layout) =
                        exact_bandwidth(&graph, cap.unwrap_or(DEFAULT_BANDWIDTH_CAP))?;
                    println!("{value}");
                    print!("{}", io::serialize_layout(&layout));
                }
                Measure::Pw => {
                    let (value, decomposition) =
                        exact_pathwidth(&graph, cap.unwrap_or(DEFAULT_PATHWIDTH_CAP))?;
                    println!("{value}");
                    print!("{}", io::serialize_decomposition(&decomposition));
                }
            }
            Ok(0)
        }
        Command::Bound {
            graph,
            layout,
            sources,
        } => {
            let graph = io::parse_edge_list(&read(&graph)?)?;
            let layout = io::parse_layout(&read(&layout)?)?;
            let sources: BTreeSet<usize> = sources
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse()
                        .map_err(|_| Failure::Usage(format!("bad source id {s:?}")))
                })
                .collect::<Result<_, _>>()?;
            let outcome = isolation_strategy(&graph, &layout, &sources, &[1])?;
            let bound = burned_upper_bound(outcome.cutwidth, sources.len());
            println!(
                "{}",
                json!({
                    "cutwidth": outcome.cutwidth,
                    "mergedBubbles": outcome.merged_bubbles,
                    "strategy": outcome.strategy,
                    "burned": outcome.trace.burned.len(),
                    "bound": bound.to_string(),
                    "withinBound": bound.admits(outcome.trace.burned.len()),
                    "trace": outcome.trace,
                })
            );
            Ok(0)
        }
        Command::Bench { corpus } => bench(&corpus),
    }
}

/// Per-graph consistency sweep: the parameterized optimum, the tree solver
/// (on trees), and the greedy baseline against the exhaustive oracle, with
/// the step-count bound checked on every witness trace.
fn bench(corpus: &Path) -> Result<u8, Failure> {
    let mut entries: Vec<PathBuf> = fs::read_dir(corpus)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", corpus.display())))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|ext| ext == "graph"))
        .collect();
    entries.sort();
    if entries.is_empty() {
        return Err(Failure::Usage(format!(
            "no .graph files in {}",
            corpus.display()
        )));
    }
    println!(
        "{:<24} {:>4} {:>4} {:>5} {:>7} {:>10}",
        "graph", "n", "m", "tree", "checks", "mismatches"
    );
    let mut total_mismatches = 0usize;
    for path in entries {
        let name = path
            .file_name()
            .and_then(|s| s.to_str())
            .unwrap_or("?")
            .to_string();
        let graph = io::parse_edge_list(&read(&path)?)?;
        let n = graph.vertex_count();
        let m = graph.edge_count();
        let is_tree = graph.is_tree();
        if n > DEFAULT_EXHAUSTIVE_CAP {
            println!(
                "{name:<24} {n:>4} {m:>4} {is_tree:>5} {:>7} {:>10}",
                "skip", "-"
            );
            continue;
        }
        let mut checks = 0usize;
        let mut mismatches = 0usize;
        for source in 0..n {
            for budget in 1..=2 {
                let instance = Instance::new(graph.clone(), source, budget, None)?;
                let oracle = exhaustive_optimal(&instance, DEFAULT_EXHAUSTIVE_CAP)?;
                let mut verify = |result: &SolveResult, expect_optimal: bool| {
                    checks += 1;
                    let trace = match simulate(&instance, &result.witness) {
                        Ok(t) => t,
                        Err(_) => {
                            mismatches += 1;
                            return;
                        }
                    };
                    let consistent = trace.burned.len() == result.min_burned
                        && trace.step_count <= trace.burned.len()
                        && if expect_optimal {
                            result.min_burned == oracle.min_burned
                        } else {
                            result.min_burned >= oracle.min_burned
                        };
                    if !consistent {
                        mismatches += 1;
                    }
                };
                verify(&oracle, true);
                verify(&fpt_pw_delta(&instance)?, true);
                if is_tree {
                    verify(&tree_optimal(&instance)?, true);
                }
                verify(&greedy_baseline(&instance)?, false);
            }
        }
        total_mismatches += mismatches;
        println!("{name:<24} {n:>4} {m:>4} {is_tree:>5} {checks:>7} {mismatches:>10}");
    }
    Ok(if total_mismatches == 0 { 0 } else { 1 })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("error: {}", failure.message());
            ExitCode::from(failure.code())
        }
    }
}
