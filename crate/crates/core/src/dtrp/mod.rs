//! Dynamic traveling repairperson: events arrive as a space-time Poisson
//! process and robots travel to serve them.
//!
//! [`AdaptiveDtrp`] assigns events through a power diagram whose weights
//! are balanced online, so each robot ends up with an equal share of the
//! load; every robot serves its own events in batches ordered by a tour
//! heuristic. [`LightTrafficPolicy`] is the median-based policy that is
//! optimal as the arrival rate vanishes.

mod policy;
mod robot;
mod tsp;

pub use policy::{AdaptiveDtrp, Dispatch, DispatchPolicy, LightTrafficPolicy};
pub use robot::{CompletedService, DtrpRobot, Mode, PendingEvent};
pub use tsp::{closed_length, nearest_neighbor_order, tsp_tour, two_opt, Tour};

use crate::error::{Error, Result};
use crate::events::PoissonStream;
use crate::sim::stats::{batch_means, linear_fit};

/// Constant in the heavy-traffic system-time bounds.
pub const HEAVY_TRAFFIC_C: f64 = 0.253;

/// `C* = C·λ·(∫√φ)² / v²`; for a uniform density on a region of area `A`
/// the integral term equals `A`.
pub fn heavy_traffic_constant(rate: f64, area: f64, speed: f64) -> f64 {
    HEAVY_TRAFFIC_C * rate * area / (speed * speed)
}

/// `ρ = λ s̄ / n`.
pub fn load_factor(rate: f64, mean_service: f64, robots: usize) -> f64 {
    rate * mean_service / robots as f64
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrivalRecord {
    pub id: u64,
    pub time: f64,
    pub robot: usize,
    /// Events outstanding in the whole fleet just after this arrival.
    pub outstanding: usize,
    pub saturated: bool,
}

#[derive(Debug, Clone, Default)]
pub struct DtrpRun {
    pub arrivals: Vec<ArrivalRecord>,
    /// Completed services in completion order.
    pub completions: Vec<CompletedService>,
    pub end_time: f64,
}

/// Simulate until `max_events` arrivals (or the first arrival after
/// `max_time`), then let the robots finish all outstanding work.
///
/// Robots advance in increments of at most `dt_cap`; when the whole fleet
/// is parked the clock jumps straight to the next arrival.
pub fn run_dtrp<P: DispatchPolicy>(
    policy: &mut P,
    stream: &mut PoissonStream,
    max_events: u64,
    max_time: Option<f64>,
    dt_cap: f64,
) -> Result<DtrpRun> {
    run_dtrp_observed(policy, stream, max_events, max_time, dt_cap, |_, _| {})
}

/// [`run_dtrp`] with a callback invoked right after every dispatch.
pub fn run_dtrp_observed<P, F>(
    policy: &mut P,
    stream: &mut PoissonStream,
    max_events: u64,
    max_time: Option<f64>,
    dt_cap: f64,
    mut on_arrival: F,
) -> Result<DtrpRun>
where
    P: DispatchPolicy,
    F: FnMut(&P, &ArrivalRecord),
{
    if !(dt_cap.is_finite() && dt_cap > 0.0) {
        return Err(Error::param("dtrp.dt_cap", "must be positive"));
    }
    let mut run = DtrpRun::default();
    let mut now = 0.0f64;
    for id in 0..max_events {
        let a = stream.next_arrival()?;
        if max_time.is_some_and(|t| a.time > t) {
            break;
        }
        advance(policy, &mut now, a.time, dt_cap, &mut run.completions);
        let d = policy.on_event(PendingEvent {
            id,
            arrival: a.time,
            location: a.location,
            service: a.service,
        })?;
        run.arrivals.push(ArrivalRecord {
            id,
            time: a.time,
            robot: d.robot,
            outstanding: run.arrivals.len() + 1 - run.completions.len(),
            saturated: d.saturated,
        });
        on_arrival(policy, run.arrivals.last().unwrap());
    }
    while policy.robots().iter().any(|r| r.outstanding() > 0) {
        let next = now + dt_cap;
        step_all(policy, now, dt_cap, &mut run.completions);
        now = next;
    }
    run.end_time = now;
    Ok(run)
}

fn advance<P: DispatchPolicy>(policy: &mut P, now: &mut f64, until: f64, dt_cap: f64, done: &mut Vec<CompletedService>) {
    while *now < until {
        if policy.robots().iter().all(|r| r.is_idle()) {
            *now = until;
            return;
        }
        let (dt, next) = if until - *now <= dt_cap { (until - *now, until) } else { (dt_cap, *now + dt_cap) };
        step_all(policy, *now, dt, done);
        *now = next;
    }
}

fn step_all<P: DispatchPolicy>(policy: &mut P, now: f64, dt: f64, done: &mut Vec<CompletedService>) {
    let start = done.len();
    for r in policy.robots_mut() {
        r.step(now, dt, done);
    }
    // robots are stepped one after another; restore global time order
    done[start..].sort_by(|a, b| a.completion.total_cmp(&b.completion));
}

/// Steady-state statistics of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct DtrpSummary {
    pub rho: f64,
    pub arrivals: usize,
    pub completed: usize,
    /// Mean system time over the last half of events (by arrival index).
    pub mean_system_time: f64,
    /// Batch-means standard error of `mean_system_time`.
    pub stderr: f64,
    /// `(1 − ρ)² Σ̄`
    pub scaled_system_time: f64,
    /// Least-squares slope of the batch means (per batch) and its error.
    pub slope: f64,
    pub slope_stderr: f64,
    pub max_outstanding_first_half: usize,
    pub max_outstanding_second_half: usize,
}

pub const STEADY_BATCHES: usize = 20;

pub fn summarize(run: &DtrpRun, rho: f64) -> DtrpSummary {
    let mut by_id: Vec<&CompletedService> = run.completions.iter().collect();
    by_id.sort_by_key(|c| c.id);
    let tail: Vec<f64> = by_id[by_id.len() / 2..].iter().map(|c| c.system_time()).collect();
    let (mean, stderr, slope, slope_stderr) = if tail.len() >= STEADY_BATCHES * 2 {
        let b = batch_means(&tail, STEADY_BATCHES);
        let mean = b.iter().sum::<f64>() / b.len() as f64;
        let var = b.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (b.len() - 1) as f64;
        let (slope, se) = linear_fit(&b);
        (mean, (var / b.len() as f64).sqrt(), slope, se)
    } else if tail.is_empty() {
        (f64::NAN, f64::NAN, f64::NAN, f64::NAN)
    } else {
        let mean = tail.iter().sum::<f64>() / tail.len() as f64;
        (mean, f64::NAN, f64::NAN, f64::NAN)
    };
    let half = run.arrivals.len() / 2;
    let max_of = |s: &[ArrivalRecord]| s.iter().map(|a| a.outstanding).max().unwrap_or(0);
    DtrpSummary {
        rho,
        arrivals: run.arrivals.len(),
        completed: run.completions.len(),
        mean_system_time: mean,
        stderr,
        scaled_system_time: (1.0 - rho).powi(2) * mean,
        slope,
        slope_stderr,
        max_outstanding_first_half: max_of(&run.arrivals[..half]),
        max_outstanding_second_half: max_of(&run.arrivals[half..]),
    }
}
