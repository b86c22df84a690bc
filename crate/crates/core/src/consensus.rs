//! Synchronous min-consensus (FloodMin) over an undirected communication
//! graph, used to elect the agent that reacts to an event.

use std::collections::VecDeque;
use std::io::{self, Write};

use crate::error::{Error, Result};
use crate::geometry::Point;

/// Undirected, connected communication graph with a known diameter bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommGraph {
    neighbors: Vec<Vec<usize>>,
    diameter_bound: usize,
    complete: bool,
}

impl CommGraph {
    /// Complete graph on `n` nodes.
    pub fn complete(n: usize) -> Self {
        assert!(n > 0, "graph needs at least one node");
        let neighbors = (0..n).map(|i| (0..n).filter(|&j| j != i).collect()).collect();
        CommGraph {
            neighbors,
            diameter_bound: usize::from(n > 1),
            complete: true,
        }
    }

    /// Graph from an undirected edge list. `diameter_bound` defaults to `n`,
    /// which is a valid bound for every connected graph on `n` nodes.
    pub fn new(n: usize, edges: &[(usize, usize)], diameter_bound: Option<usize>) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("graph", "need at least one node"));
        }
        let mut neighbors = vec![Vec::new(); n];
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::param("graph.edges", format!("edge ({a}, {b}) names a node outside 0..{n}")));
            }
            if a == b {
                continue;
            }
            neighbors[a].push(b);
            neighbors[b].push(a);
        }
        for list in &mut neighbors {
            list.sort_unstable();
            list.dedup();
        }
        let actual = true_diameter(&neighbors).ok_or(Error::Disconnected)?;
        let bound = diameter_bound.unwrap_or(n);
        if bound < actual {
            return Err(Error::DiameterTooSmall { bound, actual });
        }
        let complete = neighbors.iter().all(|l| l.len() == n - 1);
        Ok(CommGraph {
            neighbors,
            diameter_bound: bound,
            complete,
        })
    }

    /// Disk graph: agents closer than `radius` communicate. Uses the exact
    /// diameter as the round count.
    pub fn disk(positions: &[Point], radius: f64) -> Result<Self> {
        let n = positions.len();
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if positions[i].distance(&positions[j]) <= radius {
                    edges.push((i, j));
                }
            }
        }
        let g = CommGraph::new(n, &edges, None)?;
        let actual = true_diameter(&g.neighbors).unwrap();
        Ok(CommGraph {
            diameter_bound: actual,
            ..g
        })
    }

    pub fn len(&self) -> usize {
        self.neighbors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.neighbors.is_empty()
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.neighbors[i]
    }

    pub fn diameter_bound(&self) -> usize {
        self.diameter_bound
    }

    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn directed_edge_count(&self) -> usize {
        self.neighbors.iter().map(Vec::len).sum()
    }

    pub fn true_diameter(&self) -> usize {
        true_diameter(&self.neighbors).unwrap()
    }
}

/// Eccentricity maximum by BFS from every node; `None` if disconnected.
fn true_diameter(neighbors: &[Vec<usize>]) -> Option<usize> {
    let n = neighbors.len();
    let mut diam = 0;
    let mut dist = vec![usize::MAX; n];
    let mut queue = VecDeque::new();
    for s in 0..n {
        dist.iter_mut().for_each(|d| *d = usize::MAX);
        dist[s] = 0;
        queue.push_back(s);
        let mut seen = 1;
        while let Some(u) = queue.pop_front() {
            for &v in &neighbors[u] {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    diam = diam.max(dist[v]);
                    seen += 1;
                    queue.push_back(v);
                }
            }
        }
        if seen != n {
            return None;
        }
    }
    Some(diam)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FloodMinOutcome {
    /// Agent `i` is flagged iff its own input equals the agreed minimum.
    pub flags: Vec<bool>,
    /// Each agent's final estimate of the minimum.
    pub estimates: Vec<f64>,
    pub rounds: usize,
    pub messages: u64,
    /// Estimates after every round, starting with the inputs (round 0).
    pub trace: Option<Vec<Vec<f64>>>,
}

impl FloodMinOutcome {
    /// Lowest flagged index.
    pub fn winner(&self) -> usize {
        self.flags.iter().position(|&f| f).expect("at least one agent holds the minimum")
    }

    /// `round,agent,estimate` rows, one per agent per round.
    pub fn write_trace_csv<W: Write>(&self, out: &mut W) -> io::Result<()> {
        writeln!(out, "round,agent,estimate")?;
        if let Some(trace) = &self.trace {
            for (r, row) in trace.iter().enumerate() {
                for (i, v) in row.iter().enumerate() {
                    writeln!(out, "{r},{i},{v}")?;
                }
            }
        }
        Ok(())
    }
}

fn check_inputs(graph: &CommGraph, inputs: &[f64]) -> Result<()> {
    if inputs.len() != graph.len() {
        return Err(Error::param(
            "inputs",
            format!("expected {} values, got {}", graph.len(), inputs.len()),
        ));
    }
    if inputs.iter().any(|v| v.is_nan()) {
        return Err(Error::param("inputs", "NaN is not a valid consensus input"));
    }
    if inputs.iter().all(|v| *v == f64::INFINITY) {
        return Err(Error::NoObserver);
    }
    Ok(())
}

/// Run `diameter_bound` synchronous rounds in which every agent replaces its
/// estimate with the minimum over itself and its neighbors.
///
/// Unobserving agents pass `+inf`.
pub fn floodmin(graph: &CommGraph, inputs: &[f64], record_trace: bool) -> Result<FloodMinOutcome> {
    check_inputs(graph, inputs)?;
    let rounds = graph.diameter_bound();
    let mut current = inputs.to_vec();
    let mut next = current.clone();
    let mut trace = record_trace.then(|| vec![current.clone()]);
    for _ in 0..rounds {
        for (i, slot) in next.iter_mut().enumerate() {
            let mut m = current[i];
            for &j in graph.neighbors(i) {
                if current[j] < m {
                    m = current[j];
                }
            }
            *slot = m;
        }
        std::mem::swap(&mut current, &mut next);
        if let Some(t) = trace.as_mut() {
            t.push(current.clone());
        }
    }
    let flags = inputs.iter().zip(&current).map(|(d, e)| d == e).collect();
    Ok(FloodMinOutcome {
        flags,
        estimates: current,
        rounds,
        messages: (graph.directed_edge_count() * rounds) as u64,
        trace,
    })
}

/// Index of the elected agent: the lowest index attaining the minimum.
///
/// On a complete graph one round of FloodMin is a global argmin, so this
/// short-circuits to [`centralized_winner`] with identical results.
pub fn select_winner(graph: &CommGraph, inputs: &[f64]) -> Result<usize> {
    if graph.is_complete() {
        check_inputs(graph, inputs)?;
        centralized_winner(inputs)
    } else {
        Ok(floodmin(graph, inputs, false)?.winner())
    }
}

/// Lowest index attaining the minimum of `inputs`.
pub fn centralized_winner(inputs: &[f64]) -> Result<usize> {
    if inputs.iter().any(|v| v.is_nan()) {
        return Err(Error::param("inputs", "NaN is not a valid consensus input"));
    }
    let mut best = 0;
    for i in 1..inputs.len() {
        if inputs[i] < inputs[best] {
            best = i;
        }
    }
    if inputs.is_empty() || inputs[best] == f64::INFINITY {
        return Err(Error::NoObserver);
    }
    Ok(best)
}

/// How the agents are connected when an event has to be assigned.
#[derive(Debug, Clone, PartialEq)]
pub enum Topology {
    Complete,
    /// Disk graph rebuilt from the current positions at every event.
    Disk { radius: f64 },
    Fixed(CommGraph),
}

impl Topology {
    /// Communication graph among agents at `positions`.
    pub fn graph(&self, positions: &[Point]) -> Result<CommGraph> {
        match self {
            Topology::Complete => Ok(CommGraph::complete(positions.len())),
            Topology::Disk { radius } => CommGraph::disk(positions, *radius),
            Topology::Fixed(g) => Ok(g.clone()),
        }
    }

    /// Winner among `inputs` for agents at `positions`.
    pub fn select(&self, positions: &[Point], inputs: &[f64]) -> Result<usize> {
        match self {
            Topology::Complete => centralized_winner(inputs),
            Topology::Disk { radius } => select_winner(&CommGraph::disk(positions, *radius)?, inputs),
            Topology::Fixed(g) => select_winner(g, inputs),
        }
    }
}
