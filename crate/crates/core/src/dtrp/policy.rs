use crate::consensus::Topology;
use crate::coverage::{CoverageState, StepsizeSchedule};
use crate::error::{Error, Result};
use crate::geometry::{saturate, CostSpec, GeneralizedDiagram, Point, Workspace};
use crate::partition::ascend;

use super::robot::{DtrpRobot, PendingEvent};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dispatch {
    pub robot: usize,
    pub stepsize: f64,
    /// Whether the reference step was truncated by its budget.
    pub saturated: bool,
}

/// Decides which robot takes an arriving event and adapts its own state.
pub trait DispatchPolicy {
    fn robots(&self) -> &[DtrpRobot];
    fn robots_mut(&mut self) -> &mut [DtrpRobot];
    fn on_event(&mut self, event: PendingEvent) -> Result<Dispatch>;
}

/// Power-diagram dispatch with weights balanced toward equal shares and
/// references drifting toward the median of each robot's region.
#[derive(Debug, Clone)]
pub struct AdaptiveDtrp {
    workspace: Workspace,
    robots: Vec<DtrpRobot>,
    weights: Vec<f64>,
    shares: Vec<f64>,
    schedule: StepsizeSchedule,
    topology: Topology,
    reference_budget: f64,
    k: u64,
    saturations: u64,
}

impl AdaptiveDtrp {
    /// Robots start parked at their initial positions, which are also
    /// their first references.
    pub fn new(
        workspace: Workspace,
        generators: Vec<Point>,
        positions: Vec<Point>,
        speed: f64,
        schedule: StepsizeSchedule,
        reference_budget: f64,
        swap_factor: usize,
    ) -> Result<Self> {
        if generators.len() != positions.len() {
            return Err(Error::param("dtrp.generators", "need one generator per robot"));
        }
        if !(speed.is_finite() && speed > 0.0) {
            return Err(Error::param("dtrp.speed", "must be positive"));
        }
        if !(reference_budget > 0.0) {
            return Err(Error::param("budget", "must be positive"));
        }
        schedule.validate()?;
        GeneralizedDiagram::voronoi(generators.clone(), CostSpec::Quadratic)?;
        for p in generators.iter().chain(&positions) {
            workspace.check_contains(p)?;
        }
        let n = generators.len();
        let robots = generators
            .iter()
            .zip(&positions)
            .enumerate()
            .map(|(i, (g, p))| DtrpRobot::new(i, *g, *p, *p, speed, swap_factor))
            .collect();
        Ok(AdaptiveDtrp {
            workspace,
            robots,
            weights: vec![0.0; n],
            shares: vec![1.0 / n as f64; n],
            schedule,
            topology: Topology::Complete,
            reference_budget,
            k: 0,
            saturations: 0,
        })
    }

    pub fn with_topology(mut self, topology: Topology) -> Self {
        self.topology = topology;
        self
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn generators(&self) -> Vec<Point> {
        self.robots.iter().map(|r| r.generator).collect()
    }

    pub fn saturations(&self) -> u64 {
        self.saturations
    }

    pub fn diagram(&self) -> GeneralizedDiagram {
        GeneralizedDiagram::new(self.generators(), self.weights.clone(), CostSpec::Quadratic)
            .expect("generators were validated at construction")
    }
}

impl DispatchPolicy for AdaptiveDtrp {
    fn robots(&self) -> &[DtrpRobot] {
        &self.robots
    }

    fn robots_mut(&mut self) -> &mut [DtrpRobot] {
        &mut self.robots
    }

    fn on_event(&mut self, event: PendingEvent) -> Result<Dispatch> {
        let z = event.location;
        self.workspace.check_contains(&z)?;
        let inputs: Vec<f64> = self
            .robots
            .iter()
            .zip(&self.weights)
            .map(|(r, w)| z.distance(&r.generator).powi(2) - w)
            .collect();
        let generators = self.generators();
        let i = self.topology.select(&generators, &inputs)?;
        let gamma = self.schedule.at(self.k);
        ascend(&mut self.weights, &self.shares, i, gamma);
        let robot = &mut self.robots[i];
        let raw = (z - robot.reference).unit() * gamma;
        let saturated = raw.norm() > self.reference_budget;
        robot.reference = self.workspace.project(&(robot.reference + saturate(raw, self.reference_budget)));
        robot.assign(event);
        self.saturations += u64::from(saturated);
        self.k += 1;
        Ok(Dispatch {
            robot: i,
            stepsize: gamma,
            saturated,
        })
    }
}

/// Nearest-reference dispatch with references following the stochastic
/// gradient of `E[min_i ‖p_i − Z‖ / v]`.
#[derive(Debug, Clone)]
pub struct LightTrafficPolicy {
    coverage: CoverageState,
    robots: Vec<DtrpRobot>,
    saturations: u64,
}

impl LightTrafficPolicy {
    pub fn new(
        workspace: Workspace,
        positions: Vec<Point>,
        speed: f64,
        schedule: StepsizeSchedule,
        reference_budget: f64,
        swap_factor: usize,
    ) -> Result<Self> {
        let cost = CostSpec::Linear { speed };
        cost.validate().map_err(|_| Error::param("dtrp.speed", "must be positive"))?;
        let coverage = CoverageState::new(workspace, positions.clone(), cost, schedule)?.with_budget(reference_budget)?;
        let robots = positions
            .iter()
            .enumerate()
            .map(|(i, p)| DtrpRobot::new(i, *p, *p, *p, speed, swap_factor))
            .collect();
        Ok(LightTrafficPolicy {
            coverage,
            robots,
            saturations: 0,
        })
    }

    pub fn references(&self) -> &[Point] {
        self.coverage.positions()
    }

    pub fn saturations(&self) -> u64 {
        self.saturations
    }
}

impl DispatchPolicy for LightTrafficPolicy {
    fn robots(&self) -> &[DtrpRobot] {
        &self.robots
    }

    fn robots_mut(&mut self) -> &mut [DtrpRobot] {
        &mut self.robots
    }

    fn on_event(&mut self, event: PendingEvent) -> Result<Dispatch> {
        let rec = self.coverage.adaptive_update(&event.location)?;
        let i = rec.winner.expect("every robot observes every event");
        self.robots[i].reference = self.coverage.positions()[i];
        self.robots[i].assign(event);
        self.saturations += u64::from(rec.saturated);
        Ok(Dispatch {
            robot: i,
            stepsize: rec.stepsize,
            saturated: rec.saturated,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn event(x: f64, y: f64) -> PendingEvent {
        PendingEvent { id: 0, arrival: 0.0, location: Point::xy(x, y), service: 0.1 }
    }

    fn two_robots() -> AdaptiveDtrp {
        AdaptiveDtrp::new(
            Workspace::unit_square(),
            vec![Point::xy(0.25, 0.5), Point::xy(0.75, 0.5)],
            vec![Point::xy(0.5, 0.5), Point::xy(0.6, 0.5)],
            1.0,
            StepsizeSchedule::Constant { gamma: 0.1 },
            f64::INFINITY,
            50,
        )
        .unwrap()
    }

    #[test]
    fn winner_weight_drops_and_reference_steps() {
        let mut p = two_robots();
        let d = p.on_event(event(0.5, 0.9)).unwrap();
        assert_eq!(d.robot, 0);
        assert!((p.weights()[0] + 0.05).abs() < 1e-15 && (p.weights()[1] - 0.05).abs() < 1e-15);
        let r = &p.robots()[0];
        assert!(r.reference.distance(&Point::xy(0.5, 0.6)) < 1e-15);
        assert_eq!(r.backlog().len(), 1);
        assert_eq!(p.robots()[1].reference, Point::xy(0.6, 0.5));
        assert!(p.robots()[1].backlog().is_empty());
    }

    #[test]
    fn weights_stay_zero_sum() {
        let mut p = two_robots();
        for i in 0..100 {
            let x = (i as f64 * 0.37).fract();
            p.on_event(event(x, 0.3)).unwrap();
            assert_eq!(p.weights().iter().sum::<f64>(), 0.0);
        }
    }

    #[test]
    fn reference_budget_saturates() {
        let mut p = AdaptiveDtrp::new(
            Workspace::unit_square(),
            vec![Point::xy(0.5, 0.5)],
            vec![Point::xy(0.5, 0.5)],
            1.0,
            StepsizeSchedule::Constant { gamma: 0.1 },
            0.02,
            50,
        )
        .unwrap();
        let d = p.on_event(event(0.5, 0.9)).unwrap();
        assert!(d.saturated);
        assert!(p.robots()[0].reference.distance(&Point::xy(0.5, 0.52)) < 1e-15);
        assert_eq!(p.saturations(), 1);
    }

    #[test]
    fn light_traffic_reference_moves_by_gamma_over_speed() {
        let mut p = LightTrafficPolicy::new(
            Workspace::unit_square(),
            vec![Point::xy(0.5, 0.5)],
            2.0,
            StepsizeSchedule::Constant { gamma: 0.1 },
            f64::INFINITY,
            50,
        )
        .unwrap();
        p.on_event(event(0.5, 0.9)).unwrap();
        assert!(p.references()[0].distance(&Point::xy(0.5, 0.55)) < 1e-15);
        assert_eq!(p.robots()[0].reference, p.references()[0]);
    }
}
