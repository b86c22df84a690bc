//! Per-algorithm run loops.

use crate::consensus::floodmin;
use crate::coverage::{objective_estimate, run_tracking, CoverageState, HeteroState, Team};
use crate::dtrp::{
    heavy_traffic_constant, load_factor, run_dtrp_observed, summarize, AdaptiveDtrp, ArrivalRecord, CompletedService,
    DispatchPolicy, DtrpRun, LightTrafficPolicy,
};
use crate::error::{Error, Result};
use crate::events::{substream, EventType, MarkovTarget, PoissonStream};
use crate::geometry::{render_ownership_raster, CostFunction, CostSpec, GeneralizedDiagram, Point, Workspace};
use crate::partition::{PartitionState, UtilizationTracker};

use super::scenario::{Algorithm, Scenario};
use super::stats::trailing_window_stats;
use super::trace::{float_cells, fmt_f64, point_cells, point_columns, RunOutput, Snapshot, Table};

/// Extra outputs requested from the command line.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunOptions {
    /// Record the min-consensus rounds of every event (coverage and
    /// partition runs).
    pub floodmin_trace: bool,
    /// Capture a snapshot right after this many events.
    pub snapshot_at: Option<u64>,
}

/// Run a validated scenario.
pub fn run(scenario: &Scenario) -> Result<RunOutput> {
    run_with(scenario, RunOptions::default())
}

pub fn run_with(scenario: &Scenario, options: RunOptions) -> Result<RunOutput> {
    scenario.validate()?;
    if let Some(at) = options.snapshot_at {
        if scenario.horizon.events.is_some_and(|h| at > h) {
            return Err(Error::param("at", format!("snapshot index {at} lies beyond the event horizon")));
        }
    }
    let ctx = Context::new(scenario, options);
    match scenario.algorithm {
        Algorithm::Coverage => run_coverage(ctx),
        Algorithm::Partition => run_partition(ctx),
        Algorithm::Hetero => run_hetero(ctx),
        Algorithm::Track => run_track(ctx),
        Algorithm::Dtrp | Algorithm::DtrpLight => run_repair(ctx),
    }
}

struct Context<'a> {
    s: &'a Scenario,
    options: RunOptions,
    snapshots: Vec<Snapshot>,
    floodmin: Option<Table>,
}

impl<'a> Context<'a> {
    fn new(s: &'a Scenario, options: RunOptions) -> Self {
        let floodmin = options
            .floodmin_trace
            .then(|| Table::new(["event", "round", "agent", "estimate"]));
        Context {
            s,
            options,
            snapshots: Vec::new(),
            floodmin,
        }
    }

    fn wants_snapshot(&self, k: u64) -> bool {
        let every = self.s.output.snapshot_every;
        self.options.snapshot_at == Some(k) || (every > 0 && k.is_multiple_of(every))
    }

    fn wants_row(&self, k: u64, last: u64) -> bool {
        k.is_multiple_of(self.s.output.trace_every) || k == last
    }

    fn snapshot<C: CostFunction>(
        &mut self,
        k: u64,
        positions: Table,
        diagram: Option<GeneralizedDiagram<C>>,
        q: &Workspace,
    ) -> Result<()> {
        let raster = match diagram {
            Some(d) if q.dim() == 2 => {
                let r = self.s.output.raster_resolution;
                Some(render_ownership_raster(&d, q, r, r)?)
            }
            _ => None,
        };
        self.snapshots.push(Snapshot { k, positions, raster });
        Ok(())
    }

    /// Record the rounds of a min-consensus among `positions` on `inputs`.
    fn consensus_rounds(&mut self, k: u64, positions: &[Point], topology: &crate::consensus::Topology, inputs: &[f64]) -> Result<()> {
        let Some(table) = self.floodmin.as_mut() else {
            return Ok(());
        };
        if inputs.iter().all(|v| *v == f64::INFINITY) {
            return Ok(());
        }
        let graph = topology.graph(positions)?;
        let out = floodmin(&graph, inputs, true)?;
        for (round, estimates) in out.trace.expect("trace requested").iter().enumerate() {
            for (agent, e) in estimates.iter().enumerate() {
                table.push(vec![k.to_string(), round.to_string(), agent.to_string(), fmt_f64(*e)]);
            }
        }
        Ok(())
    }

    fn finish(self, trace: Table, arrivals: Option<Table>, summary: toml::Table) -> RunOutput {
        RunOutput {
            scenario: self.s.to_toml_string(),
            trace,
            arrivals,
            summary,
            snapshots: self.snapshots,
            floodmin: self.floodmin,
        }
    }
}

fn points_table(label: &str, points: &[Point], weights: Option<&[f64]>) -> Table {
    let dim = points.first().map_or(0, Point::dim);
    let mut columns = vec!["team".to_string(), "index".to_string()];
    columns.extend(["x", "y", "z"][..dim].iter().map(|s| s.to_string()));
    if weights.is_some() {
        columns.push("weight".into());
    }
    let mut t = Table::new(columns);
    append_points(&mut t, label, points, weights);
    t
}

fn append_points(t: &mut Table, label: &str, points: &[Point], weights: Option<&[f64]>) {
    for (i, p) in points.iter().enumerate() {
        let mut row = vec![label.to_string(), i.to_string()];
        row.extend(point_cells(std::slice::from_ref(p)));
        if let Some(w) = weights {
            row.push(fmt_f64(w[i]));
        }
        t.push(row);
    }
}

fn toml_points(points: &[Point]) -> toml::Value {
    toml::Value::Array(points.iter().map(|p| toml_floats(p.coords())).collect())
}

fn toml_floats(values: &[f64]) -> toml::Value {
    toml::Value::Array(values.iter().map(|&x| toml::Value::Float(x)).collect())
}

fn toml_count(x: u64) -> toml::Value {
    toml::Value::Integer(i64::try_from(x).unwrap_or(i64::MAX))
}

fn event_cells(z: Option<&Point>, dim: usize) -> Vec<String> {
    match z {
        Some(z) => point_cells(std::slice::from_ref(z)),
        None => vec![String::new(); dim],
    }
}

fn run_coverage(mut ctx: Context) -> Result<RunOutput> {
    let s = ctx.s;
    let q = s.workspace()?;
    let dist = s.distribution()?;
    let dim = q.dim();
    let mut state = CoverageState::new(q.clone(), s.initial_positions()?, s.cost, s.stepsize)?
        .with_topology(s.topology()?)
        .with_detection_radius(s.robots.detection_radius);
    if let Some(b) = s.robots.budget {
        state = state.with_budget(b)?;
    }
    if let Some(t) = &s.transient {
        state = state.with_transient(t.events);
    }
    let n = state.positions().len();
    let horizon = s.event_horizon();
    let mut columns: Vec<String> = vec!["k".into()];
    columns.extend(point_columns("z", 1, dim).into_iter().map(|c| c.replacen("z0_", "z_", 1)));
    columns.extend(["winner".into(), "stepsize".into()]);
    columns.extend(point_columns("p", n, dim));
    columns.extend(["objective".into(), "objective_se".into()]);
    let mut trace = Table::new(columns);
    let objective = |positions: &[Point], k: u64| -> Result<[String; 2]> {
        let every = s.output.objective_every;
        if every == 0 || !k.is_multiple_of(every) {
            return Ok([String::new(), String::new()]);
        }
        let mut rng = substream(s.seed, "objective");
        let e = objective_estimate(positions, &dist, &s.cost, s.output.objective_samples, &mut rng)?;
        Ok([fmt_f64(e.mean), fmt_f64(e.stderr)])
    };
    let row = |k: u64, z: Option<&Point>, winner: String, gamma: String, positions: &[Point]| -> Result<Vec<String>> {
        let mut r = vec![k.to_string()];
        r.extend(event_cells(z, dim));
        r.extend([winner, gamma]);
        r.extend(point_cells(positions));
        r.extend(objective(positions, k)?);
        Ok(r)
    };
    trace.push(row(0, None, String::new(), String::new(), state.positions())?);
    if ctx.wants_snapshot(0) {
        coverage_snapshot(&mut ctx, 0, &state)?;
    }
    let mut rng = substream(s.seed, "events");
    for k in 1..=horizon {
        let z = dist.sample_location(&mut rng)?;
        if ctx.floodmin.is_some() {
            let inputs = state.consensus_inputs(&z);
            let positions = state.positions().to_vec();
            ctx.consensus_rounds(k, &positions, state.topology(), &inputs)?;
        }
        let rec = state.adaptive_update(&z)?;
        if ctx.wants_row(k, horizon) {
            let winner = rec.winner.map_or_else(String::new, |w| w.to_string());
            trace.push(row(k, Some(&z), winner, fmt_f64(rec.stepsize), state.positions())?);
        }
        if ctx.wants_snapshot(k) {
            coverage_snapshot(&mut ctx, k, &state)?;
        }
    }
    let mut summary = toml::Table::new();
    summary.insert("events".into(), toml_count(state.k()));
    summary.insert("unobserved".into(), toml_count(state.unobserved()));
    summary.insert("final_positions".into(), toml_points(state.positions()));
    if dim == 1 {
        let mut xs: Vec<f64> = state.positions().iter().map(|p| p[0]).collect();
        xs.sort_by(f64::total_cmp);
        summary.insert("sorted_positions".into(), toml_floats(&xs));
    }
    Ok(ctx.finish(trace, None, summary))
}

fn coverage_snapshot(ctx: &mut Context, k: u64, state: &CoverageState) -> Result<()> {
    let diagram = GeneralizedDiagram::voronoi(state.positions().to_vec(), *state.cost())?;
    ctx.snapshot(k, points_table("robot", state.positions(), None), Some(diagram), state.workspace())
}

fn run_partition(mut ctx: Context) -> Result<RunOutput> {
    let s = ctx.s;
    let p = s.partition.as_ref().expect("validated");
    let q = s.workspace()?;
    let dist = s.distribution()?;
    let dim = q.dim();
    let generators = s.partition_generators()?;
    let n = generators.len();
    let mut state = PartitionState::new(q, generators, p.rates.clone(), s.cost, s.stepsize)?
        .with_topology(s.topology()?);
    let horizon = s.event_horizon();
    let mut columns: Vec<String> = vec!["k".into()];
    columns.extend(point_columns("z", 1, dim).into_iter().map(|c| c.replacen("z0_", "z_", 1)));
    columns.extend(["winner".into(), "stepsize".into()]);
    columns.extend((0..n).map(|i| format!("w{i}")));
    columns.extend((0..n).map(|i| format!("freq{i}")));
    let mut trace = Table::new(columns);
    let mut util = UtilizationTracker::new(n, s.output.window);
    let row = |k: u64, z: Option<&Point>, winner: String, gamma: String, w: &[f64], f: &[f64]| {
        let mut r = vec![k.to_string()];
        r.extend(event_cells(z, dim));
        r.extend([winner, gamma]);
        r.extend(float_cells(w));
        r.extend(float_cells(f));
        r
    };
    trace.push(row(0, None, String::new(), String::new(), state.weights(), &util.trailing()));
    if ctx.wants_snapshot(0) {
        partition_snapshot(&mut ctx, 0, &state)?;
    }
    let mut rng = substream(s.seed, "events");
    for k in 1..=horizon {
        let z = dist.sample_location(&mut rng)?;
        if ctx.floodmin.is_some() {
            let inputs = state.consensus_inputs(&z);
            let gens = state.generators().to_vec();
            ctx.consensus_rounds(k, &gens, state.topology(), &inputs)?;
        }
        let rec = state.partition_update(&z)?;
        util.record(rec.winner);
        if ctx.wants_row(k, horizon) {
            trace.push(row(k, Some(&z), rec.winner.to_string(), fmt_f64(rec.stepsize), state.weights(), &util.trailing()));
        }
        if ctx.wants_snapshot(k) {
            partition_snapshot(&mut ctx, k, &state)?;
        }
    }
    let mut summary = toml::Table::new();
    summary.insert("events".into(), toml_count(state.k()));
    summary.insert("rates".into(), toml_floats(state.rates()));
    summary.insert("final_weights".into(), toml_floats(state.weights()));
    summary.insert("trailing_frequencies".into(), toml_floats(&util.trailing()));
    summary.insert("cumulative_frequencies".into(), toml_floats(&util.cumulative()));
    summary.insert("generators".into(), toml_points(state.generators()));
    Ok(ctx.finish(trace, None, summary))
}

fn partition_snapshot(ctx: &mut Context, k: u64, state: &PartitionState) -> Result<()> {
    let table = points_table("generator", state.generators(), Some(state.weights()));
    ctx.snapshot(k, table, Some(state.diagram()), state.workspace())
}

/// Running mean of `ab` costs, reported at these event counts.
const AB_CHECKPOINTS: [u64; 2] = [100, 1000];

fn run_hetero(mut ctx: Context) -> Result<RunOutput> {
    let s = ctx.s;
    let h = s.hetero.as_ref().expect("validated");
    let q = s.workspace()?;
    let dim = q.dim();
    let law = s.typed_law()?;
    let (team_a, team_b) = s.team_positions()?;
    let (na, nb) = (team_a.len(), team_b.len());
    let mut state = HeteroState::new(
        q.clone(),
        team_a,
        team_b,
        h.cost_a.unwrap_or(s.cost),
        h.cost_b.unwrap_or(s.cost),
        s.stepsize,
    )?;
    if let Some(b) = s.robots.budget {
        state = state.with_budget(b)?;
    }
    let horizon = s.event_horizon();
    let mut columns: Vec<String> = vec!["k".into(), "type".into()];
    columns.extend(point_columns("z", 1, dim).into_iter().map(|c| c.replacen("z0_", "z_", 1)));
    columns.extend(["team".into(), "mover".into(), "cost".into(), "stepsize".into(), "ab_average".into()]);
    columns.extend(point_columns("a", na, dim));
    columns.extend(point_columns("b", nb, dim));
    let mut trace = Table::new(columns);
    let positions = |st: &HeteroState| {
        let mut cells = point_cells(st.team(Team::A));
        cells.extend(point_cells(st.team(Team::B)));
        cells
    };
    let mut first = vec!["0".to_string(), String::new()];
    first.extend(event_cells(None, dim));
    first.extend(vec![String::new(); 5]);
    first.extend(positions(&state));
    trace.push(first);
    if ctx.wants_snapshot(0) {
        hetero_snapshot(&mut ctx, 0, &state)?;
    }
    let mut rng = substream(s.seed, "typed-events");
    let (mut ab_sum, mut ab_count) = (0.0, 0u64);
    let mut checkpoints = toml::Table::new();
    for k in 1..=horizon {
        let (kind, z) = law.sample(&mut rng)?;
        let out = state.hetero_update(kind, &z)?;
        if kind == EventType::AB {
            ab_sum += out.cost;
            ab_count += 1;
        }
        let ab_average = if ab_count > 0 { ab_sum / ab_count as f64 } else { f64::NAN };
        if AB_CHECKPOINTS.contains(&k) {
            checkpoints.insert(format!("ab_average_at_{k}"), toml::Value::Float(ab_average));
        }
        if ctx.wants_row(k, horizon) {
            let mut r = vec![k.to_string(), kind.label().to_string()];
            r.extend(point_cells(&[z]));
            let team = match out.mover.0 {
                Team::A => "A",
                Team::B => "B",
            };
            r.extend([
                team.to_string(),
                out.mover.1.to_string(),
                fmt_f64(out.cost),
                fmt_f64(out.stepsize),
                fmt_f64(ab_average),
            ]);
            r.extend(positions(&state));
            trace.push(r);
        }
        if ctx.wants_snapshot(k) {
            hetero_snapshot(&mut ctx, k, &state)?;
        }
    }
    let mut summary = toml::Table::new();
    summary.insert("events".into(), toml_count(state.k()));
    summary.insert("ab_events".into(), toml_count(ab_count));
    let avg = if ab_count > 0 { ab_sum / ab_count as f64 } else { f64::NAN };
    summary.insert("ab_average".into(), toml::Value::Float(avg));
    summary.extend(checkpoints);
    summary.insert("final_team_a".into(), toml_points(state.team(Team::A)));
    summary.insert("final_team_b".into(), toml_points(state.team(Team::B)));
    Ok(ctx.finish(trace, None, summary))
}

fn hetero_snapshot(ctx: &mut Context, k: u64, state: &HeteroState) -> Result<()> {
    let mut table = points_table("A", state.team(Team::A), None);
    append_points(&mut table, "B", state.team(Team::B), None);
    ctx.snapshot::<CostSpec>(k, table, None, state.workspace())
}

/// Cost averages reported over this many opening events.
const OPENING_EVENTS: usize = 100;

fn run_track(mut ctx: Context) -> Result<RunOutput> {
    let s = ctx.s;
    let t = s.track.as_ref().expect("validated");
    let q = s.workspace()?;
    let mut state = CoverageState::new(q.clone(), s.initial_positions()?, s.cost, s.stepsize)?
        .with_topology(s.topology()?)
        .with_detection_radius(s.robots.detection_radius);
    if let Some(b) = s.robots.budget {
        state = state.with_budget(b)?;
    }
    if let Some(tr) = &s.transient {
        state = state.with_transient(tr.events);
    }
    let mut target = MarkovTarget {
        radius: t.radius,
        decay: t.decay,
        noise: t.noise,
        theta: t.theta0,
    };
    let n = state.positions().len();
    let horizon = s.event_horizon();
    let mut columns: Vec<String> = ["k", "z_x", "z_y", "winner", "cost", "trailing_cost"].map(String::from).to_vec();
    columns.extend(point_columns("p", n, 2));
    let mut trace = Table::new(columns);
    let mut first = vec!["0".to_string()];
    first.extend(vec![String::new(); 5]);
    first.extend(point_cells(state.positions()));
    trace.push(first);
    if ctx.wants_snapshot(0) {
        coverage_snapshot(&mut ctx, 0, &state)?;
    }
    let mut rng = substream(s.seed, "target");
    let mut costs = Vec::with_capacity(horizon.min(1 << 20) as usize);
    for k in 1..=horizon {
        let rows = run_tracking(&mut state, &mut target, 1, &mut rng)?;
        let row = &rows[0];
        costs.push(row.cost);
        if ctx.wants_row(k, horizon) {
            let (trailing, _) = trailing_window_stats(&costs, s.output.window);
            let mut r = vec![k.to_string()];
            r.extend(point_cells(&[row.event]));
            r.push(row.winner.map_or_else(String::new, |w| w.to_string()));
            r.extend([fmt_f64(row.cost), fmt_f64(trailing)]);
            r.extend(point_cells(state.positions()));
            trace.push(r);
        }
        if ctx.wants_snapshot(k) {
            coverage_snapshot(&mut ctx, k, &state)?;
        }
    }
    let mut summary = toml::Table::new();
    summary.insert("events".into(), toml_count(state.k()));
    if !costs.is_empty() {
        let opening = &costs[..costs.len().min(OPENING_EVENTS)];
        summary.insert(
            "opening_cost".into(),
            toml::Value::Float(opening.iter().sum::<f64>() / opening.len() as f64),
        );
        summary.insert("trailing_cost".into(), toml::Value::Float(trailing_window_stats(&costs, s.output.window).0));
    }
    summary.insert("mean_angle".into(), toml::Value::Float(circular_mean_angle(state.positions())));
    summary.insert("final_positions".into(), toml_points(state.positions()));
    Ok(ctx.finish(trace, None, summary))
}

/// Direction of the resultant of the unit vectors toward `points`.
pub fn circular_mean_angle(points: &[Point]) -> f64 {
    let (sin, cos) = points.iter().fold((0.0, 0.0), |(s, c), p| {
        let a = p[1].atan2(p[0]);
        (s + a.sin(), c + a.cos())
    });
    sin.atan2(cos)
}

fn run_repair(mut ctx: Context) -> Result<RunOutput> {
    let s = ctx.s;
    let d = s.dtrp.as_ref().expect("validated");
    let q = s.workspace()?;
    let dist = s.distribution()?;
    let rate = s.dtrp_rate()?;
    let n = s.robot_count()?;
    let mut stream = PoissonStream::new(rate, dist.clone(), d.service, s.seed)?;
    let budget = s.robots.budget.unwrap_or(d.speed / rate);
    let horizon = s.event_horizon();
    let rho = load_factor(rate, d.service.mean(), n);
    let mut summary = toml::Table::new();
    summary.insert("rate".into(), toml::Value::Float(rate));
    summary.insert("rho".into(), toml::Value::Float(rho));
    let (run, references) = if s.algorithm == Algorithm::Dtrp {
        let gens = s.dtrp_generators()?;
        let positions = match &s.robots.positions {
            Some(_) => s.initial_positions()?,
            None => gens.clone(),
        };
        let mut policy = AdaptiveDtrp::new(q.clone(), gens, positions, d.speed, s.stepsize, budget, d.two_opt_factor)?
            .with_topology(s.topology()?);
        if ctx.wants_snapshot(0) {
            dtrp_snapshot(&mut ctx, 0, &policy, &q)?;
        }
        let mut pending = Vec::new();
        let run = run_dtrp_observed(&mut policy, &mut stream, horizon, s.horizon.time, d.dt_cap, |p, a| {
            if ctx.wants_snapshot(a.id + 1) {
                pending.push((a.id + 1, p.diagram(), references_of(p)));
            }
        })?;
        for (k, diagram, refs) in pending {
            let table = points_table("reference", &refs, Some(diagram.weights()));
            ctx.snapshot(k, table, Some(diagram), &q)?;
        }
        summary.insert("final_weights".into(), toml_floats(policy.weights()));
        summary.insert("saturations".into(), toml_count(policy.saturations()));
        insert_robot_counters(&mut summary, &policy);
        (run, references_of(&policy))
    } else {
        let positions = s.initial_positions()?;
        let mut policy =
            LightTrafficPolicy::new(q.clone(), positions, d.speed, s.stepsize, budget, d.two_opt_factor)?;
        if ctx.wants_snapshot(0) {
            light_snapshot(&mut ctx, 0, policy.references(), &q)?;
        }
        let mut pending = Vec::new();
        let run = run_dtrp_observed(&mut policy, &mut stream, horizon, s.horizon.time, d.dt_cap, |p, a| {
            if ctx.wants_snapshot(a.id + 1) {
                pending.push((a.id + 1, p.references().to_vec()));
            }
        })?;
        for (k, refs) in pending {
            light_snapshot(&mut ctx, k, &refs, &q)?;
        }
        summary.insert("saturations".into(), toml_count(policy.saturations()));
        insert_robot_counters(&mut summary, &policy);
        let mut rng = substream(s.seed, "objective");
        let travel = objective_estimate(
            policy.references(),
            &dist,
            &CostSpec::Linear { speed: d.speed },
            s.output.objective_samples,
            &mut rng,
        )?;
        summary.insert("light_traffic_bound".into(), toml::Value::Float(travel.mean + d.service.mean()));
        summary.insert("light_traffic_bound_se".into(), toml::Value::Float(travel.stderr));
        (run, policy.references().to_vec())
    };
    insert_dtrp_summary(&mut summary, &run, rho, rate, &q, d.speed, n);
    summary.insert("final_references".into(), toml_points(&references));
    let (trace, arrivals) = dtrp_tables(&run);
    Ok(ctx.finish(trace, Some(arrivals), summary))
}

fn references_of<P: DispatchPolicy>(p: &P) -> Vec<Point> {
    p.robots().iter().map(|r| r.reference).collect()
}

fn insert_robot_counters<P: DispatchPolicy>(summary: &mut toml::Table, p: &P) {
    let tours: u64 = p.robots().iter().map(|r| r.tours_built()).sum();
    let caps: u64 = p.robots().iter().map(|r| r.cap_hits()).sum();
    summary.insert("tours_built".into(), toml_count(tours));
    summary.insert("two_opt_cap_hits".into(), toml_count(caps));
}

fn dtrp_snapshot(ctx: &mut Context, k: u64, p: &AdaptiveDtrp, q: &Workspace) -> Result<()> {
    let table = points_table("reference", &references_of(p), Some(p.weights()));
    ctx.snapshot(k, table, Some(p.diagram()), q)
}

fn light_snapshot(ctx: &mut Context, k: u64, refs: &[Point], q: &Workspace) -> Result<()> {
    let diagram = GeneralizedDiagram::voronoi(refs.to_vec(), CostSpec::distance())?;
    ctx.snapshot(k, points_table("reference", refs, None), Some(diagram), q)
}

/// Steady-state metrics; [`dtrp_run_from_tables`] recovers their input
/// from the written rows.
fn insert_dtrp_summary(summary: &mut toml::Table, run: &DtrpRun, rho: f64, rate: f64, q: &Workspace, speed: f64, n: usize) {
    let m = summarize(run, rho);
    let c_star = heavy_traffic_constant(rate, q.volume(), speed);
    let f = |x: f64| toml::Value::Float(x);
    summary.insert("arrivals".into(), toml_count(m.arrivals as u64));
    summary.insert("completed".into(), toml_count(m.completed as u64));
    summary.insert("end_time".into(), f(run.end_time));
    summary.insert("mean_system_time".into(), f(m.mean_system_time));
    summary.insert("stderr".into(), f(m.stderr));
    summary.insert("scaled_system_time".into(), f(m.scaled_system_time));
    summary.insert("slope".into(), f(m.slope));
    summary.insert("slope_stderr".into(), f(m.slope_stderr));
    summary.insert("max_outstanding_first_half".into(), toml_count(m.max_outstanding_first_half as u64));
    summary.insert("max_outstanding_second_half".into(), toml_count(m.max_outstanding_second_half as u64));
    summary.insert("heavy_traffic_constant".into(), f(c_star));
    summary.insert("heavy_traffic_lower".into(), f(c_star / (n * n) as f64));
}

fn dtrp_tables(run: &DtrpRun) -> (Table, Table) {
    let mut trace = Table::new(["id", "arrival", "robot", "wait", "service", "system", "completion", "backlog", "tour"]);
    for c in &run.completions {
        trace.push(vec![
            c.id.to_string(),
            fmt_f64(c.arrival),
            c.robot.to_string(),
            fmt_f64(c.wait),
            fmt_f64(c.service),
            fmt_f64(c.system_time()),
            fmt_f64(c.completion),
            c.backlog.to_string(),
            c.tour.to_string(),
        ]);
    }
    let mut arrivals = Table::new(["id", "time", "robot", "outstanding", "saturated"]);
    for a in &run.arrivals {
        arrivals.push(arrival_cells(a));
    }
    (trace, arrivals)
}

/// Rebuild a run from its trace and arrival tables.
pub fn dtrp_run_from_tables(trace: &Table, arrivals: &Table) -> Option<DtrpRun> {
    let col = |t: &Table, name: &str| t.column(name);
    let (id, arr, robot, wait, service, completion, backlog, tour) = (
        col(trace, "id")?,
        col(trace, "arrival")?,
        col(trace, "robot")?,
        col(trace, "wait")?,
        col(trace, "service")?,
        col(trace, "completion")?,
        col(trace, "backlog")?,
        col(trace, "tour")?,
    );
    let completions = trace
        .rows
        .iter()
        .map(|r| {
            Some(CompletedService {
                id: r[id].parse().ok()?,
                robot: r[robot].parse().ok()?,
                arrival: r[arr].parse().ok()?,
                wait: r[wait].parse().ok()?,
                service: r[service].parse().ok()?,
                completion: r[completion].parse().ok()?,
                backlog: r[backlog].parse().ok()?,
                tour: r[tour].parse().ok()?,
            })
        })
        .collect::<Option<Vec<_>>>()?;
    let arrivals = arrivals
        .rows
        .iter()
        .map(|r| {
            Some(ArrivalRecord {
                id: r[0].parse().ok()?,
                time: r[1].parse().ok()?,
                robot: r[2].parse().ok()?,
                outstanding: r[3].parse().ok()?,
                saturated: r[4] == "1",
            })
        })
        .collect::<Option<Vec<_>>>()?;
    let end_time = completions.iter().map(|c| c.completion).fold(0.0, f64::max);
    Some(DtrpRun { arrivals, completions, end_time })
}

fn arrival_cells(a: &ArrivalRecord) -> Vec<String> {
    vec![
        a.id.to_string(),
        fmt_f64(a.time),
        a.robot.to_string(),
        a.outstanding.to_string(),
        u8::from(a.saturated).to_string(),
    ]
}
