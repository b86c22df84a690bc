//! Load balancing by stochastic dual ascent on generalized Voronoi weights.
//!
//! Generators stay fixed; only the weights move. Each event raises every
//! weight by `γ a_j` and lowers the winner's by `γ`, which is a stochastic
//! supergradient step on the concave dual
//! `h(w) = E[min_i (c(Z, g_i) − w_i)] + Σ a_i w_i`.
//! At the maximizer every cell carries exactly its target share `a_i`.

use std::collections::VecDeque;

use rand::Rng;

use crate::consensus::Topology;
use crate::coverage::{Estimate, StepsizeSchedule};
use crate::error::{Error, Result};
use crate::events::PointSampler;
use crate::geometry::{estimate_cell_measures, CostFunction, CostSpec, GeneralizedDiagram, Point, Workspace};

/// Check that `rates` are positive and sum to one.
pub fn validate_rates(rates: &[f64], n: usize) -> Result<()> {
    if rates.len() != n {
        return Err(Error::param("rates", format!("expected {n} rates, got {}", rates.len())));
    }
    if rates.iter().any(|a| !(a.is_finite() && *a > 0.0)) {
        return Err(Error::param("rates", "every rate must be positive"));
    }
    let total: f64 = rates.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::param("rates", format!("rates must sum to 1, got {total}")));
    }
    Ok(())
}

/// Apply a dual-ascent increment in place and restore `Σw = 0` exactly.
///
/// The increments sum to zero in exact arithmetic. Rounding would let the
/// sum drift, so the last weight is re-derived from the others.
pub(crate) fn ascend(weights: &mut [f64], rates: &[f64], winner: usize, gamma: f64) {
    for (j, (w, a)) in weights.iter_mut().zip(rates).enumerate() {
        *w += if j == winner { gamma * (a - 1.0) } else { gamma * a };
    }
    rebalance(weights);
}

pub(crate) fn rebalance(weights: &mut [f64]) {
    if let Some((last, rest)) = weights.split_last_mut() {
        *last = -rest.iter().sum::<f64>();
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PartitionRecord {
    pub k: u64,
    pub event: Point,
    pub winner: usize,
    pub stepsize: f64,
}

#[derive(Debug, Clone)]
pub struct PartitionState<C = CostSpec> {
    workspace: Workspace,
    generators: Vec<Point>,
    weights: Vec<f64>,
    rates: Vec<f64>,
    cost: C,
    schedule: StepsizeSchedule,
    topology: Topology,
    k: u64,
}

impl<C: CostFunction + Clone> PartitionState<C> {
    pub fn new(
        workspace: Workspace,
        generators: Vec<Point>,
        rates: Vec<f64>,
        cost: C,
        schedule: StepsizeSchedule,
    ) -> Result<Self> {
        schedule.validate()?;
        for g in &generators {
            workspace.check_contains(g)?;
        }
        // validates distinctness and dimensions
        GeneralizedDiagram::voronoi(generators.clone(), &cost)?;
        validate_rates(&rates, generators.len())?;
        let n = generators.len();
        Ok(PartitionState {
            workspace,
            generators,
            weights: vec![0.0; n],
            rates,
            cost,
            schedule,
            topology: Topology::Complete,
            k: 0,
        })
    }

    pub fn with_topology(mut self, topology: Topology) -> Self {
        self.topology = topology;
        self
    }

    pub fn generators(&self) -> &[Point] {
        &self.generators
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn rates(&self) -> &[f64] {
        &self.rates
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn workspace(&self) -> &Workspace {
        &self.workspace
    }

    /// Current generalized Voronoi diagram.
    pub fn diagram(&self) -> GeneralizedDiagram<C> {
        GeneralizedDiagram::new(self.generators.clone(), self.weights.clone(), self.cost.clone())
            .expect("generators were validated at construction")
    }

    /// Scores `c(z, g_i) − w_i` fed to the winner selection.
    pub fn consensus_inputs(&self, z: &Point) -> Vec<f64> {
        self.generators
            .iter()
            .zip(&self.weights)
            .map(|(g, w)| self.cost.value(z.distance(g)) - w)
            .collect()
    }

    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    pub fn partition_update(&mut self, z: &Point) -> Result<PartitionRecord> {
        self.workspace.check_contains(z)?;
        let inputs = self.consensus_inputs(z);
        let winner = self.topology.select(&self.generators, &inputs)?;
        let gamma = self.schedule.at(self.k);
        ascend(&mut self.weights, &self.rates, winner, gamma);
        let rec = PartitionRecord {
            k: self.k,
            event: *z,
            winner,
            stepsize: gamma,
        };
        self.k += 1;
        Ok(rec)
    }
}

/// Monte Carlo estimate of the dual function at the diagram's weights.
pub fn dual_value<C, S, R>(
    diagram: &GeneralizedDiagram<C>,
    rates: &[f64],
    dist: &S,
    samples: usize,
    rng: &mut R,
) -> Result<Estimate>
where
    C: CostFunction,
    S: PointSampler + ?Sized,
    R: Rng + ?Sized,
{
    if rates.len() != diagram.len() {
        return Err(Error::param("rates", "need one rate per generator"));
    }
    if samples < 2 {
        return Err(Error::param("samples", "need at least 2 samples"));
    }
    let linear: f64 = rates.iter().zip(diagram.weights()).map(|(a, w)| a * w).sum();
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..samples {
        let z = dist.sample(rng)?;
        let s = diagram.score(&z, diagram.cell_owner(&z));
        sum += s;
        sum_sq += s * s;
    }
    let m = samples as f64;
    let mean = sum / m;
    let var = ((sum_sq - m * mean * mean) / (m - 1.0)).max(0.0);
    Ok(Estimate {
        mean: mean + linear,
        stderr: (var / m).sqrt(),
    })
}

/// Supergradient `a_i − P(V_i(w))` of the dual, with cell measures
/// estimated from `samples` draws.
pub fn deterministic_supergradient<C, S, R>(
    diagram: &GeneralizedDiagram<C>,
    rates: &[f64],
    dist: &S,
    samples: usize,
    rng: &mut R,
) -> Result<Vec<f64>>
where
    C: CostFunction,
    S: PointSampler + ?Sized,
    R: Rng + ?Sized,
{
    if rates.len() != diagram.len() {
        return Err(Error::param("rates", "need one rate per generator"));
    }
    let measures = estimate_cell_measures(diagram, dist, samples, rng)?;
    Ok(rates.iter().zip(&measures).map(|(a, p)| a - p).collect())
}

/// Cumulative and trailing-window win frequencies.
#[derive(Debug, Clone)]
pub struct UtilizationTracker {
    window: usize,
    cumulative: Vec<u64>,
    trailing: Vec<u64>,
    recent: VecDeque<usize>,
}

impl UtilizationTracker {
    pub fn new(n: usize, window: usize) -> Self {
        assert!(window > 0, "window must be positive");
        UtilizationTracker {
            window,
            cumulative: vec![0; n],
            trailing: vec![0; n],
            recent: VecDeque::with_capacity(window),
        }
    }

    pub fn record(&mut self, winner: usize) {
        self.cumulative[winner] += 1;
        self.trailing[winner] += 1;
        self.recent.push_back(winner);
        if self.recent.len() > self.window {
            let old = self.recent.pop_front().unwrap();
            self.trailing[old] -= 1;
        }
    }

    pub fn total(&self) -> u64 {
        self.cumulative.iter().sum()
    }

    pub fn cumulative(&self) -> Vec<f64> {
        frequencies(&self.cumulative)
    }

    /// Frequencies over the last `window` events (fewer at the start).
    pub fn trailing(&self) -> Vec<f64> {
        frequencies(&self.trailing)
    }
}

fn frequencies(counts: &[u64]) -> Vec<f64> {
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return vec![0.0; counts.len()];
    }
    counts.iter().map(|&c| c as f64 / total as f64).collect()
}

#[derive(Debug, Clone)]
pub struct PartitionRun {
    pub records: Vec<PartitionRecord>,
    pub utilization: UtilizationTracker,
}

/// Feed `events` samples of `dist` through the dual-ascent update.
pub fn run_partition<C, S, R>(
    state: &mut PartitionState<C>,
    dist: &S,
    events: u64,
    window: usize,
    rng: &mut R,
) -> Result<PartitionRun>
where
    C: CostFunction + Clone,
    S: PointSampler + ?Sized,
    R: Rng + ?Sized,
{
    let mut utilization = UtilizationTracker::new(state.generators().len(), window);
    let mut records = Vec::with_capacity(events as usize);
    for _ in 0..events {
        let z = dist.sample(rng)?;
        let rec = state.partition_update(&z)?;
        utilization.record(rec.winner);
        records.push(rec);
    }
    Ok(PartitionRun { records, utilization })
}
