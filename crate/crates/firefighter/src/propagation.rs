//! The burn/protect process: at each step the firefighter protects at most
//! b unburned vertices, then fire spreads to every unprotected neighbor of a
//! burned vertex. The process stops once no unburned, unprotected vertex is
//! adjacent to the fire.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, GraphError};

#[derive(Error, Debug, PartialEq, Eq)]
pub enum InstanceError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("budget must be at least 1")]
    ZeroBudget,
    #[error("threshold must be at least 1")]
    ZeroThreshold,
}

#[derive(Error, Debug, PartialEq, Eq)]
pub enum SimulationError {
    #[error("no fire source given")]
    NoSource,
    #[error("source vertex {0} out of range")]
    SourceOutOfRange(usize),
    #[error("step {step}: protected vertex {vertex} is already burned")]
    ProtectBurned { step: usize, vertex: usize },
    #[error("step {step}: vertex {vertex} is already protected")]
    ProtectTwice { step: usize, vertex: usize },
    #[error("step {step}: {given} protections exceed the budget {budget}")]
    BudgetExceeded {
        step: usize,
        given: usize,
        budget: usize,
    },
    #[error("step {step}: vertex {vertex} out of range")]
    VertexOutOfRange { step: usize, vertex: usize },
    #[error("strategy has a non-empty protection set at step {step}, after the process stopped")]
    LeftoverProtections { step: usize },
}

/// A problem instance: graph, burning source, per-step budget, and an
/// optional burn threshold for the decision variant.
#[derive(Debug, Clone)]
pub struct Instance {
    pub graph: Graph,
    pub source: usize,
    pub budget: usize,
    pub threshold: Option<usize>,
}

impl Instance {
    pub fn new(
        graph: Graph,
        source: usize,
        budget: usize,
        threshold: Option<usize>,
    ) -> Result<Self, InstanceError> {
        graph.check_vertex(source)?;
        if budget == 0 {
            return Err(InstanceError::ZeroBudget);
        }
        if threshold == Some(0) {
            return Err(InstanceError::ZeroThreshold);
        }
        Ok(Instance {
            graph,
            source,
            budget,
            threshold,
        })
    }
}

/// Which vertices to protect at each step; `steps[t-1]` is step t.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Strategy {
    pub steps: Vec<BTreeSet<usize>>,
}

impl Strategy {
    pub fn new(steps: Vec<BTreeSet<usize>>) -> Self {
        Strategy { steps }
    }

    pub fn empty() -> Self {
        Strategy { steps: Vec::new() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct StepRecord {
    pub protected: BTreeSet<usize>,
    pub newly_burned: BTreeSet<usize>,
}

/// Full history of one propagation run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Trace {
    pub burned: BTreeSet<usize>,
    pub protected: BTreeSet<usize>,
    pub saved: BTreeSet<usize>,
    pub step_count: usize,
    pub per_step: Vec<StepRecord>,
}

/// An in-flight propagation run. Drives one protection/spreading step at a
/// time so that strategy builders can react to the evolving fire front.
#[derive(Debug, Clone)]
pub struct Process<'g> {
    graph: &'g Graph,
    burned: Vec<bool>,
    protected: Vec<bool>,
    per_step: Vec<StepRecord>,
}

impl<'g> Process<'g> {
    pub fn new(graph: &'g Graph, sources: &BTreeSet<usize>) -> Result<Self, SimulationError> {
        if sources.is_empty() {
            return Err(SimulationError::NoSource);
        }
        let mut burned = vec![false; graph.vertex_count()];
        for &s in sources {
            if s >= graph.vertex_count() {
                return Err(SimulationError::SourceOutOfRange(s));
            }
            burned[s] = true;
        }
        Ok(Process {
            graph,
            burned,
            protected: vec![false; graph.vertex_count()],
            per_step: Vec::new(),
        })
    }

    pub fn graph(&self) -> &Graph {
        self.graph
    }

    pub fn is_burned(&self, v: usize) -> bool {
        self.burned[v]
    }

    pub fn is_protected(&self, v: usize) -> bool {
        self.protected[v]
    }

    pub fn burned_set(&self) -> BTreeSet<usize> {
        (0..self.burned.len()).filter(|&v| self.burned[v]).collect()
    }

    pub fn steps_taken(&self) -> usize {
        self.per_step.len()
    }

    /// Unburned, unprotected vertices adjacent to the fire.
    pub fn threatened(&self) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        for v in 0..self.burned.len() {
            if self.burned[v] {
                for &u in self.graph.neighbors(v) {
                    if !self.burned[u] && !self.protected[u] {
                        out.insert(u);
                    }
                }
            }
        }
        out
    }

    /// True while some vertex can still catch fire.
    pub fn active(&self) -> bool {
        !self.threatened().is_empty()
    }

    /// Run one step: protect `protections` (at most `budget` of them), then
    /// spread. Returns the newly burned set.
    pub fn step(
        &mut self,
        protections: &BTreeSet<usize>,
        budget: usize,
    ) -> Result<BTreeSet<usize>, SimulationError> {
        let step = self.per_step.len() + 1;
        if protections.len() > budget {
            return Err(SimulationError::BudgetExceeded {
                step,
                given: protections.len(),
                budget,
            });
        }
        for &v in protections {
            if v >= self.burned.len() {
                return Err(SimulationError::VertexOutOfRange { step, vertex: v });
            }
            if self.burned[v] {
                return Err(SimulationError::ProtectBurned { step, vertex: v });
            }
            if self.protected[v] {
                return Err(SimulationError::ProtectTwice { step, vertex: v });
            }
        }
        for &v in protections {
            self.protected[v] = true;
        }
        let newly: BTreeSet<usize> = self.threatened();
        for &v in &newly {
            self.burned[v] = true;
        }
        self.per_step.push(StepRecord {
            protected: protections.clone(),
            newly_burned: newly.clone(),
        });
        Ok(newly)
    }

    pub fn into_trace(self) -> Trace {
        let n = self.graph.vertex_count();
        let burned: BTreeSet<usize> = (0..n).filter(|&v| self.burned[v]).collect();
        let protected: BTreeSet<usize> = (0..n).filter(|&v| self.protected[v]).collect();
        let saved: BTreeSet<usize> = (0..n).filter(|v| !burned.contains(v)).collect();
        Trace {
            burned,
            protected,
            saved,
            step_count: self.per_step.len(),
            per_step: self.per_step,
        }
    }
}

/// Run the process with one source, a constant per-step budget, and the
/// given strategy.
pub fn simulate(instance: &Instance, strategy: &Strategy) -> Result<Trace, SimulationError> {
    simulate_multi(
        &instance.graph,
        &BTreeSet::from([instance.source]),
        &[instance.budget],
        strategy,
    )
}

/// Run the process with a source set and per-step budgets (the last entry
/// repeats when the process outlives the sequence). Steps past the end of
/// the strategy protect nothing; non-empty strategy entries left over after
/// the process stops are an error.
pub fn simulate_multi(
    graph: &Graph,
    sources: &BTreeSet<usize>,
    budgets: &[usize],
    strategy: &Strategy,
) -> Result<Trace, SimulationError> {
    let mut process = Process::new(graph, sources)?;
    let empty = BTreeSet::new();
    let mut t = 0usize;
    while process.active() {
        let protections = strategy.steps.get(t).unwrap_or(&empty);
        let budget = budget_at(budgets, t);
        process.step(protections, budget)?;
        t += 1;
    }
    for (later, entry) in strategy.steps.iter().enumerate().skip(t) {
        if !entry.is_empty() {
            return Err(SimulationError::LeftoverProtections { step: later + 1 });
        }
    }
    Ok(process.into_trace())
}

pub(crate) fn budget_at(budgets: &[usize], t: usize) -> usize {
    if budgets.is_empty() {
        0
    } else {
        *budgets.get(t).unwrap_or(budgets.last().expect("nonempty"))
    }
}

/// Report the first violation a strategy would hit, without producing a trace.
pub fn validate_strategy(instance: &Instance, strategy: &Strategy) -> Result<(), SimulationError> {
    simulate(instance, strategy).map(|_| ())
}
