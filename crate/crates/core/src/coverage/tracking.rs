use rand::Rng;

use crate::error::Result;
use crate::events::MarkovTarget;
use crate::geometry::{CostFunction, Point};

use super::CoverageState;

#[derive(Debug, Clone, PartialEq)]
pub struct TrackingRow {
    pub k: u64,
    pub event: Point,
    pub winner: Option<usize>,
    /// `min_i f(‖p_i − z‖)` just before the update.
    pub cost: f64,
}

/// Alternate target moves and coverage updates for `steps` events.
pub fn run_tracking<C, R>(
    state: &mut CoverageState<C>,
    target: &mut MarkovTarget,
    steps: u64,
    rng: &mut R,
) -> Result<Vec<TrackingRow>>
where
    C: CostFunction,
    R: Rng + ?Sized,
{
    let mut rows = Vec::with_capacity(steps as usize);
    for _ in 0..steps {
        let z = target.step(rng);
        let d = state.positions().iter().map(|p| p.distance(&z)).fold(f64::INFINITY, f64::min);
        let cost = state.cost().value(d);
        let rec = state.adaptive_update(&z)?;
        rows.push(TrackingRow {
            k: rec.k,
            event: z,
            winner: rec.winner,
            cost,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coverage::StepsizeSchedule;
    use crate::events::substream;
    use crate::geometry::{CostSpec, Workspace};

    #[test]
    fn noiseless_fixed_target_attracts_single_robot() {
        let q = Workspace::boxed(&[-1.5, -1.5], &[1.5, 1.5]).unwrap();
        let mut s = CoverageState::new(q, vec![Point::xy(-0.5, 0.7)], CostSpec::Quadratic, StepsizeSchedule::harmonic(0.2, 0.001)).unwrap();
        let mut t = MarkovTarget {
            noise: 0.0,
            ..MarkovTarget::new(1.0, 0.0)
        };
        let rows = run_tracking(&mut s, &mut t, 2000, &mut substream(0, "t")).unwrap();
        assert!(s.positions()[0].distance(&Point::xy(1.0, 0.0)) < 0.01);
        assert!(rows.last().unwrap().cost < rows[0].cost);
    }
}
