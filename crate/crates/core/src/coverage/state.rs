use crate::consensus::Topology;
use crate::error::{Error, Result};
use crate::geometry::{find_coincident, saturate, CostFunction, CostSpec, Point, Workspace};

use super::StepsizeSchedule;

/// Offset applied to a mover that lands exactly on another agent.
const COINCIDENCE_NUDGE: f64 = 1.0 / (1u64 << 40) as f64;

#[derive(Debug, Clone, PartialEq)]
pub struct UpdateRecord {
    /// Event index whose stepsize was used (0 for the first event).
    pub k: u64,
    pub event: Point,
    /// `None` when no agent detected the event.
    pub winner: Option<usize>,
    pub stepsize: f64,
    /// Whether the velocity budget truncated a step.
    pub saturated: bool,
    pub transient: bool,
}

/// Reference positions of a single-type team under the stochastic
/// gradient law.
#[derive(Debug, Clone)]
pub struct CoverageState<C = CostSpec> {
    workspace: Workspace,
    positions: Vec<Point>,
    budgets: Vec<f64>,
    cost: C,
    schedule: StepsizeSchedule,
    k: u64,
    transient_events: u64,
    topology: Topology,
    detection_radius: Option<f64>,
    unobserved: u64,
}

impl<C: CostFunction> CoverageState<C> {
    /// Unbounded budgets, complete graph, no transient phase.
    pub fn new(workspace: Workspace, positions: Vec<Point>, cost: C, schedule: StepsizeSchedule) -> Result<Self> {
        if positions.is_empty() {
            return Err(Error::param("robots", "need at least one robot"));
        }
        schedule.validate()?;
        for p in &positions {
            workspace.check_contains(p)?;
        }
        if let Some((first, second)) = find_coincident(&positions) {
            return Err(Error::CoincidentPositions { first, second });
        }
        let n = positions.len();
        Ok(CoverageState {
            workspace,
            positions,
            budgets: vec![f64::INFINITY; n],
            cost,
            schedule,
            k: 0,
            transient_events: 0,
            topology: Topology::Complete,
            detection_radius: None,
            unobserved: 0,
        })
    }

    /// Same per-event travel budget for every agent.
    pub fn with_budget(self, budget: f64) -> Result<Self> {
        let n = self.positions.len();
        self.with_budgets(vec![budget; n])
    }

    pub fn with_budgets(mut self, budgets: Vec<f64>) -> Result<Self> {
        if budgets.len() != self.positions.len() {
            return Err(Error::param("budget", "need one budget per robot"));
        }
        if budgets.iter().any(|b| !(*b > 0.0)) {
            return Err(Error::param("budget", "budgets must be positive"));
        }
        self.budgets = budgets;
        Ok(self)
    }

    /// For the first `events` events every agent moves toward the event with
    /// stepsize `γ_k / (1 + k)`.
    pub fn with_transient(mut self, events: u64) -> Self {
        self.transient_events = events;
        self
    }

    pub fn with_topology(mut self, topology: Topology) -> Self {
        self.topology = topology;
        self
    }

    /// Agents farther than `radius` from an event do not detect it.
    pub fn with_detection_radius(mut self, radius: Option<f64>) -> Self {
        self.detection_radius = radius;
        self
    }

    pub fn positions(&self) -> &[Point] {
        &self.positions
    }

    pub fn workspace(&self) -> &Workspace {
        &self.workspace
    }

    pub fn cost(&self) -> &C {
        &self.cost
    }

    pub fn schedule(&self) -> &StepsizeSchedule {
        &self.schedule
    }

    pub fn budgets(&self) -> &[f64] {
        &self.budgets
    }

    /// Number of events processed so far.
    pub fn k(&self) -> u64 {
        self.k
    }

    /// Events that no agent detected and that were therefore skipped.
    pub fn unobserved(&self) -> u64 {
        self.unobserved
    }

    /// Distances each agent contributes to the winner selection for `z`
    /// (infinite for agents that cannot detect it).
    pub fn consensus_inputs(&self, z: &Point) -> Vec<f64> {
        self.positions
            .iter()
            .map(|p| {
                let d = p.distance(z);
                match self.detection_radius {
                    Some(r) if d > r => f64::INFINITY,
                    _ => d,
                }
            })
            .collect()
    }

    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    /// Agent that would service `z` right now, if any detects it.
    pub fn winner_for(&self, z: &Point) -> Result<Option<usize>> {
        let inputs = self.consensus_inputs(z);
        match self.topology.select(&self.positions, &inputs) {
            Ok(i) => Ok(Some(i)),
            Err(Error::NoObserver) => Ok(None),
            Err(e) => Err(e),
        }
    }

    /// Process one event at `z`.
    pub fn adaptive_update(&mut self, z: &Point) -> Result<UpdateRecord> {
        self.workspace.check_contains(z)?;
        let k = self.k;
        let gamma = self.schedule.at(k);
        let winner = self.winner_for(z)?;
        let transient = k < self.transient_events;
        let mut saturated = false;
        if transient {
            let step = gamma / (1.0 + k as f64);
            for i in 0..self.positions.len() {
                saturated |= self.move_agent(i, z, step);
            }
        } else if let Some(i) = winner {
            saturated = self.move_agent(i, z, gamma);
        } else {
            self.unobserved += 1;
        }
        self.k += 1;
        Ok(UpdateRecord {
            k,
            event: *z,
            winner,
            stepsize: gamma,
            saturated,
            transient,
        })
    }

    /// Move agent `i` one step toward `z`; returns whether saturation bound.
    fn move_agent(&mut self, i: usize, z: &Point, gamma: f64) -> bool {
        let p = self.positions[i];
        let d = p.distance(z);
        let raw = (*z - p).unit() * (gamma * self.cost.derivative(d));
        let budget = self.budgets[i];
        let saturated = raw.norm() > budget;
        let target = self.workspace.project(&(p + saturate(raw, budget)));
        self.positions[i] = self.avoid_coincidence(i, target);
        saturated
    }

    fn avoid_coincidence(&self, i: usize, candidate: Point) -> Point {
        let clashes = |q: &Point| self.positions.iter().enumerate().any(|(j, p)| j != i && p == q);
        if !clashes(&candidate) {
            return candidate;
        }
        let nudge = Point::splat(candidate.dim(), COINCIDENCE_NUDGE);
        for shifted in [candidate + nudge, candidate - nudge] {
            let q = self.workspace.project(&shifted);
            if !clashes(&q) {
                return q;
            }
        }
        candidate
    }
}
