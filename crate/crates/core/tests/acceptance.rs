//! Acceptance suite. Every criterion prints one PASS/FAIL line; the binary
//! exits with status 1 if any criterion fails.

use std::panic::{self, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use adaptive_deploy::consensus::{centralized_winner, floodmin, CommGraph};
use adaptive_deploy::coverage::{
    deterministic_gradient, run_tracking, CoverageState, HeteroState, StepsizeSchedule, Team,
};
use adaptive_deploy::dtrp::{
    heavy_traffic_constant, run_dtrp, summarize, AdaptiveDtrp, LightTrafficPolicy,
};
use adaptive_deploy::events::{
    substream, EventType, MarkovTarget, MixtureComponent, PoissonStream, ServiceLaw, SimRng, SpatialDistribution,
    TypedEventLaw,
};
use adaptive_deploy::geometry::{corner_points, CostSpec, GeneralizedDiagram, Point, Workspace};
use adaptive_deploy::partition::{deterministic_supergradient, dual_value, PartitionState, UtilizationTracker};
use adaptive_deploy::sim::{circular_mean_angle, run, Scenario};
use rand::Rng;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn uniform_square() -> SpatialDistribution {
    SpatialDistribution::uniform(Workspace::unit_square())
}

/// Two robots on [0, 1] settle at 1/4 and 3/4.
fn c1_two_robot_equilibrium() -> Verdict {
    let start = Instant::now();
    let dist = SpatialDistribution::uniform(Workspace::unit_interval());
    let mut hits = 0;
    let mut worst = 0.0f64;
    for seed in 0..10u64 {
        let mut init = substream(seed, "initial-positions");
        let p0: Vec<Point> = (0..2).map(|_| Point::x(init.random::<f64>())).collect();
        let mut state = CoverageState::new(
            Workspace::unit_interval(),
            p0,
            CostSpec::Quadratic,
            StepsizeSchedule::harmonic(0.5, 0.01),
        )
        .unwrap();
        let mut rng = substream(seed, "events");
        for _ in 0..20_000 {
            let z = dist.sample_location(&mut rng).unwrap();
            state.adaptive_update(&z).unwrap();
        }
        let mut xs: Vec<f64> = state.positions().iter().map(|p| p[0]).collect();
        xs.sort_by(f64::total_cmp);
        let err = (xs[0] - 0.25).abs().max((xs[1] - 0.75).abs());
        worst = worst.max(err);
        hits += usize::from(err <= 0.03);
    }
    let secs = start.elapsed().as_secs_f64();
    verdict(
        hits >= 9 && secs < 5.0,
        format!("{hits}/10 seeds within 0.03 of (0.25, 0.75), worst error {worst:.4}, {secs:.2} s"),
    )
}

/// Mean stochastic increment equals minus the deterministic gradient.
fn c2_gradient_unbiasedness() -> Verdict {
    const GAMMA: f64 = 1e-4;
    const INCREMENTS: usize = 100_000;
    const ORACLE: usize = 1_000_000;
    let dist = uniform_square();
    let mut cfg = substream(2024, "c2-configurations");
    let mut checked = 0;
    let mut failures = Vec::new();
    let mut worst = 0.0f64;
    for c in 0..20 {
        let n = 1 + c % 3;
        let cost = if c % 2 == 0 { CostSpec::Linear { speed: 1.0 } } else { CostSpec::Quadratic };
        let positions: Vec<Point> = (0..n)
            .map(|_| Point::xy(cfg.random_range(0.2..0.8), cfg.random_range(0.2..0.8)))
            .collect();
        let state = CoverageState::new(
            Workspace::unit_square(),
            positions.clone(),
            cost,
            StepsizeSchedule::Constant { gamma: GAMMA },
        )
        .unwrap();
        let mut sum = vec![[0.0f64; 2]; n];
        let mut sum_sq = vec![[0.0f64; 2]; n];
        let mut rng = substream(c as u64, "c2-events");
        for _ in 0..INCREMENTS {
            let z = dist.sample_location(&mut rng).unwrap();
            let mut s = state.clone();
            let rec = s.adaptive_update(&z).unwrap();
            assert!(!rec.saturated);
            for i in 0..n {
                for a in 0..2 {
                    let inc = (s.positions()[i][a] - positions[i][a]) / GAMMA;
                    sum[i][a] += inc;
                    sum_sq[i][a] += inc * inc;
                }
            }
        }
        let oracle =
            deterministic_gradient(&positions, &dist, &cost, ORACLE, &mut substream(c as u64, "c2-oracle")).unwrap();
        let m = INCREMENTS as f64;
        for i in 0..n {
            for a in 0..2 {
                let mean = sum[i][a] / m;
                let var = (sum_sq[i][a] - m * mean * mean) / (m - 1.0);
                let se = (var.max(0.0) / m).sqrt();
                let combined = (se * se + oracle.stderr[i][a].powi(2)).sqrt();
                let z = (mean + oracle.mean[i][a]).abs() / combined;
                worst = worst.max(z);
                checked += 1;
                if z > 3.0 {
                    failures.push(format!("config {c} agent {i} axis {a}: {z:.2} SE"));
                }
            }
        }
    }
    verdict(
        failures.is_empty(),
        format!(
            "{checked} components compared, largest deviation {worst:.2} combined SE{}",
            if failures.is_empty() { String::new() } else { format!("; outside 3 SE: {}", failures.join(", ")) }
        ),
    )
}

/// Dual ascent meets the utilization constraints.
fn c3_partition_constraints() -> Verdict {
    let start = Instant::now();
    // two generators on the unit interval
    let dist = SpatialDistribution::uniform(Workspace::unit_interval());
    let mut state = PartitionState::new(
        Workspace::unit_interval(),
        vec![Point::x(0.25), Point::x(0.75)],
        vec![0.3, 0.7],
        CostSpec::Quadratic,
        StepsizeSchedule::harmonic(10.0, 0.05),
    )
    .unwrap();
    let mut util = UtilizationTracker::new(2, 1000);
    let mut rng = substream(2, "events");
    for _ in 0..20_000 {
        let z = dist.sample_location(&mut rng).unwrap();
        util.record(state.partition_update(&z).unwrap().winner);
    }
    let f = util.trailing();
    let dw = state.weights()[1] - state.weights()[0];
    let line_ok = (f[0] - 0.3).abs() <= 0.03 && (f[1] - 0.7).abs() <= 0.03 && (dw - 0.2).abs() <= 0.05;

    // ten generators in the corner of the unit square
    let rates = vec![0.05, 0.05, 0.08, 0.08, 0.1, 0.1, 0.12, 0.12, 0.15, 0.15];
    let q = Workspace::unit_square();
    let mut state = PartitionState::new(
        q.clone(),
        corner_points(&q, 10, 0.3),
        rates.clone(),
        CostSpec::Quadratic,
        StepsizeSchedule::harmonic(0.05, 0.002),
    )
    .unwrap();
    let dist = uniform_square();
    let mut util = UtilizationTracker::new(10, 1000);
    let mut rng = substream(4, "events");
    for _ in 0..10_000 {
        let z = dist.sample_location(&mut rng).unwrap();
        util.record(state.partition_update(&z).unwrap().winner);
    }
    let dev = util
        .trailing()
        .iter()
        .zip(&rates)
        .map(|(f, a)| (f - a).abs())
        .fold(0.0, f64::max);
    let secs = start.elapsed().as_secs_f64();
    verdict(
        line_ok && dev <= 0.04 && secs < 10.0,
        format!(
            "n=2 frequencies ({:.3}, {:.3}), w2-w1 = {dw:.4}; n=10 max deviation {dev:.4}; {secs:.2} s",
            f[0], f[1]
        ),
    )
}

/// Supergradient inequality, translation invariance and zero-sum weights.
fn c4_supergradient() -> Verdict {
    const SAMPLES: usize = 20_000;
    let rates = [0.1, 0.15, 0.2, 0.25, 0.3];
    let dist = uniform_square();
    let mut rng = substream(99, "c4");
    let mut violations = 0;
    let mut max_ratio = f64::NEG_INFINITY;
    let mut max_shift = 0.0f64;
    let random_w = |rng: &mut SimRng| -> Vec<f64> {
        (0..5).map(|_| rng.random_range(-0.2..0.2)).collect()
    };
    for t in 0..20 {
        let gens: Vec<Point> = (0..5).map(|_| Point::xy(rng.random(), rng.random())).collect();
        let w = random_w(&mut rng);
        let crn = || substream(t, "c4-samples");
        let d = GeneralizedDiagram::new(gens.clone(), w.clone(), CostSpec::Quadratic).unwrap();
        let h = dual_value(&d, &rates, &dist, SAMPLES, &mut crn()).unwrap();
        let g = deterministic_supergradient(&d, &rates, &dist, SAMPLES, &mut crn()).unwrap();
        let shifted: Vec<f64> = w.iter().map(|x| x + 0.37).collect();
        let hs = dual_value(
            &GeneralizedDiagram::new(gens.clone(), shifted, CostSpec::Quadratic).unwrap(),
            &rates,
            &dist,
            SAMPLES,
            &mut crn(),
        )
        .unwrap();
        max_shift = max_shift.max((hs.mean - h.mean).abs() / h.stderr);
        for _ in 0..50 {
            let w2 = random_w(&mut rng);
            let d2 = GeneralizedDiagram::new(gens.clone(), w2.clone(), CostSpec::Quadratic).unwrap();
            let h2 = dual_value(&d2, &rates, &dist, SAMPLES, &mut crn()).unwrap();
            let bound = h.mean + g.iter().zip(w2.iter().zip(&w)).map(|(gi, (a, b))| gi * (a - b)).sum::<f64>();
            let se = (h.stderr.powi(2) + h2.stderr.powi(2)).sqrt();
            let excess = (h2.mean - bound) / se;
            max_ratio = max_ratio.max(excess);
            violations += usize::from(excess > 3.0);
        }
    }
    // zero-sum weights under the online update
    let mut state = PartitionState::new(
        Workspace::unit_square(),
        corner_points(&Workspace::unit_square(), 5, 1.0),
        rates.to_vec(),
        CostSpec::Quadratic,
        StepsizeSchedule::harmonic(0.3, 0.01),
    )
    .unwrap();
    let mut ev = substream(7, "events");
    let mut nonzero = 0;
    for _ in 0..20_000 {
        let z = dist.sample_location(&mut ev).unwrap();
        state.partition_update(&z).unwrap();
        nonzero += usize::from(state.weights().iter().sum::<f64>() != 0.0);
    }
    verdict(
        violations == 0 && max_shift <= 1.0 && nonzero == 0,
        format!(
            "1000 pairs, largest excess {max_ratio:.3} SE ({violations} beyond 3 SE); translation gap {max_shift:.2e} SE; {nonzero} nonzero weight sums in 20000 updates"
        ),
    )
}

fn connected(n: usize, edges: &[(usize, usize)]) -> bool {
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(u) = stack.pop() {
        for &(a, b) in edges {
            for (x, y) in [(a, b), (b, a)] {
                if x == u && !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// FloodMin flags equal the centralized argmin set on every small graph.
fn c5_floodmin_exhaustive() -> Verdict {
    let start = Instant::now();
    let values = [0.0, 1.0, 2.0, 3.0, f64::INFINITY];
    let mut rng = substream(5, "c5");
    let mut graphs = 0;
    let mut mismatches = 0;
    let mut vectors = 0;
    for n in 1..=5usize {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        for mask in 0u32..(1 << pairs.len()) {
            let edges: Vec<(usize, usize)> =
                pairs.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, e)| *e).collect();
            if !connected(n, &edges) {
                continue;
            }
            graphs += 1;
            let g = CommGraph::new(n, &edges, None).unwrap();
            for _ in 0..100 {
                let v: Vec<f64> = (0..n).map(|_| values[rng.random_range(0..values.len())]).collect();
                vectors += 1;
                let min = v.iter().copied().fold(f64::INFINITY, f64::min);
                match floodmin(&g, &v, false) {
                    Ok(out) => {
                        let expected: Vec<bool> = v.iter().map(|x| *x == min).collect();
                        let ok = out.flags == expected && out.winner() == centralized_winner(&v).unwrap();
                        mismatches += usize::from(!ok);
                    }
                    Err(_) => mismatches += usize::from(min != f64::INFINITY),
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    verdict(
        mismatches == 0 && secs < 5.0,
        format!("{graphs} connected graphs, {vectors} value vectors, {mismatches} mismatches, {secs:.2} s"),
    )
}

fn dtrp_fleet(n: usize, rate: f64) -> AdaptiveDtrp {
    let q = Workspace::unit_square();
    let gens = corner_points(&q, n, 1.0);
    AdaptiveDtrp::new(q, gens.clone(), gens, 1.0, StepsizeSchedule::harmonic(0.2, 0.01), 1.0 / rate, 50).unwrap()
}

/// Two robots at load 0.7 reach a steady state.
fn c6_dtrp_stability() -> Verdict {
    let (rate, service) = (2.8, 0.5);
    let mut policy = dtrp_fleet(2, rate);
    let mut stream =
        PoissonStream::new(rate, uniform_square(), ServiceLaw::Deterministic { mean: service }, 5).unwrap();
    let run = run_dtrp(&mut policy, &mut stream, 50_000, None, 0.01).unwrap();
    let m = summarize(&run, 0.7);
    let flat = m.slope.abs() < 2.0 * m.slope_stderr;
    let bounded = m.max_outstanding_second_half as f64 <= 1.5 * m.max_outstanding_first_half as f64;
    verdict(
        flat && bounded,
        format!(
            "mean system time {:.3} ± {:.3}, batch slope {:.4} (SE {:.4}), max backlog {} then {}",
            m.mean_system_time,
            m.stderr,
            m.slope,
            m.slope_stderr,
            m.max_outstanding_first_half,
            m.max_outstanding_second_half
        ),
    )
}

/// One robot near saturation stays inside a loose band around the
/// heavy-traffic constant.
fn c7_heavy_traffic_band() -> Verdict {
    let (rate, service) = (0.9, 1.0);
    let mut policy = dtrp_fleet(1, rate);
    let mut stream =
        PoissonStream::new(rate, uniform_square(), ServiceLaw::Deterministic { mean: service }, 6).unwrap();
    let run = run_dtrp(&mut policy, &mut stream, 100_000, None, 0.01).unwrap();
    let m = summarize(&run, 0.9);
    let c = heavy_traffic_constant(rate, 1.0, 1.0);
    let ratio = m.scaled_system_time / c;
    verdict(
        (0.5..=4.0).contains(&ratio),
        format!(
            "(1-rho)^2 * mean system time = {:.4} = {ratio:.2} C* (C* = {c:.4}); band [0.5, 4] C*",
            m.scaled_system_time
        ),
    )
}

/// Rare events: the reference finds the median and the system time
/// matches the direct-service bound.
fn c8_light_traffic() -> Verdict {
    let (rate, service) = (0.02, 0.1);
    let mut policy = LightTrafficPolicy::new(
        Workspace::unit_square(),
        vec![Point::xy(0.2, 0.8)],
        1.0,
        StepsizeSchedule::harmonic(0.2, 0.2),
        1.0 / rate,
        50,
    )
    .unwrap();
    let mut stream =
        PoissonStream::new(rate, uniform_square(), ServiceLaw::Deterministic { mean: service }, 8).unwrap();
    let run = run_dtrp(&mut policy, &mut stream, 10_000, None, 0.01).unwrap();
    let m = summarize(&run, rate * service);
    let r = policy.references()[0];
    let center = Point::xy(0.5, 0.5);
    let mut rng = substream(8, "c8-bound");
    let dist = uniform_square();
    let samples = 1_000_000;
    let travel: f64 = (0..samples).map(|_| dist.sample_location(&mut rng).unwrap().distance(&center)).sum::<f64>()
        / samples as f64;
    let bound = travel + service;
    let rel = (m.mean_system_time - bound).abs() / bound;
    let placed = (r[0] - 0.5).abs() <= 0.03 && (r[1] - 0.5).abs() <= 0.03;
    verdict(
        placed && rel <= 0.05,
        format!(
            "reference ({:.4}, {:.4}); mean system time {:.4} vs bound {bound:.4} ({:.2}% off)",
            r[0],
            r[1],
            m.mean_system_time,
            100.0 * rel
        ),
    )
}

/// The running average cost of `ab` events decreases.
fn c9_heterogeneous() -> Verdict {
    let q = Workspace::boxed(&[0.0, 0.0], &[25.0, 25.0]).unwrap();
    let blob = |x: f64, y: f64| {
        SpatialDistribution::mixture(
            q.clone(),
            vec![MixtureComponent { mean: Point::xy(x, y), std: 2.0, weight: 1.0 }],
        )
        .unwrap()
    };
    let law = TypedEventLaw::new([0.3, 0.3, 0.4], [blob(20.0, 20.0), blob(8.0, 20.0), blob(20.0, 8.0)]).unwrap();
    let team = |y: f64| (0..5).map(|i| Point::xy(2.0 + i as f64, y)).collect::<Vec<_>>();
    let mut state = HeteroState::new(
        q.clone(),
        team(2.0),
        team(3.0),
        CostSpec::distance(),
        CostSpec::distance(),
        StepsizeSchedule::harmonic(2.0, 0.01),
    )
    .unwrap();
    let mut rng = substream(7, "typed-events");
    let (mut sum, mut count) = (0.0, 0u64);
    let mut at_100 = f64::NAN;
    for k in 1..=1000 {
        let (kind, z) = law.sample(&mut rng).unwrap();
        let out = state.hetero_update(kind, &z).unwrap();
        if kind == EventType::AB {
            sum += out.cost;
            count += 1;
        }
        if k == 100 {
            at_100 = sum / count as f64;
        }
    }
    let at_1000 = sum / count as f64;
    let near = |p: &Point| p.distance(&Point::xy(20.0, 8.0)) < 6.0;
    let paired = state.team(Team::A).iter().any(near) && state.team(Team::B).iter().any(near);
    verdict(
        at_1000 < at_100,
        format!(
            "average ab cost {at_100:.3} after 100 events, {at_1000:.3} after 1000; both teams near the ab cluster: {paired}"
        ),
    )
}

/// Robots follow a target that wanders around the point (1, 0).
fn c10_markov_tracking() -> Verdict {
    let q = Workspace::boxed(&[-1.5, -1.5], &[1.5, 1.5]).unwrap();
    let start = vec![Point::xy(-0.1, -0.1), Point::xy(0.1, -0.1), Point::xy(-0.1, 0.1), Point::xy(0.1, 0.1)];
    let mut state =
        CoverageState::new(q, start, CostSpec::Quadratic, StepsizeSchedule::harmonic(1.0, 0.005)).unwrap();
    let mut target = MarkovTarget::new(1.0, 0.0);
    let rows = run_tracking(&mut state, &mut target, 5000, &mut substream(3, "target")).unwrap();
    let costs: Vec<f64> = rows.iter().map(|r| r.cost).collect();
    let first = costs[..100].iter().sum::<f64>() / 100.0;
    let trailing = costs[costs.len() - 1000..].iter().sum::<f64>() / 1000.0;
    let angle = circular_mean_angle(state.positions());
    verdict(
        trailing < first && angle.abs() <= 0.5,
        format!("cost {first:.4} over the first 100 steps, {trailing:.4} over the last 1000; mean angle {angle:.3} rad"),
    )
}

/// Every bundled scenario produces byte-identical output twice.
fn c11_determinism() -> Verdict {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios");
    let mut paths: Vec<PathBuf> = std::fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "toml"))
        .collect();
    paths.sort();
    let mut differing = Vec::new();
    for p in &paths {
        let s = Scenario::from_toml_str(&std::fs::read_to_string(p).unwrap()).unwrap();
        let a = run(&s).unwrap();
        let b = run(&s).unwrap();
        if a.trace_text() != b.trace_text() || a.summary_text() != b.summary_text() || a != b {
            differing.push(p.file_name().unwrap().to_string_lossy().into_owned());
        }
    }
    verdict(
        !paths.is_empty() && differing.is_empty(),
        format!("{} scenarios run twice; differing: {:?}", paths.len(), differing),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Verdict); 11] = [
        ("C1 two-robot equilibrium", c1_two_robot_equilibrium),
        ("C2 gradient unbiasedness", c2_gradient_unbiasedness),
        ("C3 partition constraints", c3_partition_constraints),
        ("C4 supergradient", c4_supergradient),
        ("C5 floodmin equivalence", c5_floodmin_exhaustive),
        ("C6 dtrp stability", c6_dtrp_stability),
        ("C7 heavy-traffic band", c7_heavy_traffic_band),
        ("C8 light-traffic optimality", c8_light_traffic),
        ("C9 heterogeneous teams", c9_heterogeneous),
        ("C10 markov tracking", c10_markov_tracking),
        ("C11 determinism", c11_determinism),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let v = panic::catch_unwind(AssertUnwindSafe(check))
            .unwrap_or_else(|_| verdict(false, "panicked"));
        failed += usize::from(!v.pass);
        println!(
            "{} {name}: {} [{:.1} s]",
            if v.pass { "PASS" } else { "FAIL" },
            v.detail,
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} passed, {failed} failed", 11 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
