use crate::error::{Error, Result};
use crate::events::EventType;
use crate::geometry::{find_coincident, nearest_index, saturate, CostFunction, CostSpec, Point, Workspace};

use super::StepsizeSchedule;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Team {
    A,
    B,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeteroOutcome {
    pub k: u64,
    pub kind: EventType,
    /// Team and index of the robot that moved.
    pub mover: (Team, usize),
    /// Servicing cost of the event: the responding robot's cost, or for
    /// `ab` events the larger of the two robots' costs.
    pub cost: f64,
    pub stepsize: f64,
}

/// Two robot teams. Type `a` events need an A robot, `b` a B robot, and
/// `ab` one robot of each; an `ab` event costs the maximum of the two.
#[derive(Debug, Clone)]
pub struct HeteroState<C = CostSpec> {
    workspace: Workspace,
    team_a: Vec<Point>,
    team_b: Vec<Point>,
    cost_a: C,
    cost_b: C,
    schedule: StepsizeSchedule,
    budget: f64,
    k: u64,
}

impl<C: CostFunction> HeteroState<C> {
    pub fn new(
        workspace: Workspace,
        team_a: Vec<Point>,
        team_b: Vec<Point>,
        cost_a: C,
        cost_b: C,
        schedule: StepsizeSchedule,
    ) -> Result<Self> {
        if team_a.is_empty() || team_b.is_empty() {
            return Err(Error::param("hetero", "each team needs at least one robot"));
        }
        schedule.validate()?;
        for p in team_a.iter().chain(&team_b) {
            workspace.check_contains(p)?;
        }
        for team in [&team_a, &team_b] {
            if let Some((first, second)) = find_coincident(team) {
                return Err(Error::CoincidentPositions { first, second });
            }
        }
        Ok(HeteroState {
            workspace,
            team_a,
            team_b,
            cost_a,
            cost_b,
            schedule,
            budget: f64::INFINITY,
            k: 0,
        })
    }

    pub fn with_budget(mut self, budget: f64) -> Result<Self> {
        if !(budget > 0.0) {
            return Err(Error::param("budget", "must be positive"));
        }
        self.budget = budget;
        Ok(self)
    }

    pub fn team(&self, team: Team) -> &[Point] {
        match team {
            Team::A => &self.team_a,
            Team::B => &self.team_b,
        }
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn workspace(&self) -> &Workspace {
        &self.workspace
    }

    pub fn hetero_update(&mut self, kind: EventType, z: &Point) -> Result<HeteroOutcome> {
        self.workspace.check_contains(z)?;
        let gamma = self.schedule.at(self.k);
        let i = nearest_index(z, &self.team_a);
        let j = nearest_index(z, &self.team_b);
        let fa = self.cost_a.value(self.team_a[i].distance(z));
        let fb = self.cost_b.value(self.team_b[j].distance(z));
        let (mover, cost) = match kind {
            EventType::A => ((Team::A, i), fa),
            EventType::B => ((Team::B, j), fb),
            // only the robot with the larger cost moves; exact ties move A
            EventType::AB if fa >= fb => ((Team::A, i), fa),
            EventType::AB => ((Team::B, j), fb),
        };
        self.step(mover, z, gamma);
        let out = HeteroOutcome {
            k: self.k,
            kind,
            mover,
            cost,
            stepsize: gamma,
        };
        self.k += 1;
        Ok(out)
    }

    fn step(&mut self, (team, idx): (Team, usize), z: &Point, gamma: f64) {
        let (positions, cost) = match team {
            Team::A => (&mut self.team_a, &self.cost_a),
            Team::B => (&mut self.team_b, &self.cost_b),
        };
        let p = positions[idx];
        let raw = (*z - p).unit() * (gamma * cost.derivative(p.distance(z)));
        let mut next = self.workspace.project(&(p + saturate(raw, self.budget)));
        if positions.iter().enumerate().any(|(m, q)| m != idx && *q == next) {
            next = p;
        }
        positions[idx] = next;
    }
}
