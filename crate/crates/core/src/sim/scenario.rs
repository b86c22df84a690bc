//! Scenario files: a TOML document with one section per concern.
//!
//! Unknown keys are rejected everywhere. Validation errors name the
//! offending field with its dotted path.

use serde::{Deserialize, Serialize};

use crate::consensus::{CommGraph, Topology};
use crate::coverage::StepsizeSchedule;
use crate::error::{Error, Result};
use crate::events::{substream, MixtureComponent, ServiceLaw, SpatialDistribution, TypedEventLaw};
use crate::geometry::{corner_points, find_coincident, CostSpec, Point, Workspace};
use crate::partition::validate_rates;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Coverage,
    Hetero,
    Track,
    Partition,
    Dtrp,
    DtrpLight,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum WorkspaceSpec {
    Interval { lo: f64, hi: f64 },
    Box { lo: Vec<f64>, hi: Vec<f64> },
    Polygon { vertices: Vec<[f64; 2]> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentSpec {
    pub mean: Vec<f64>,
    pub std: f64,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum DistributionSpec {
    #[default]
    Uniform,
    Mixture { components: Vec<ComponentSpec> },
    Ring { center: Vec<f64>, radius: f64 },
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RobotsSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    /// Explicit initial positions; seeded uniform samples otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub positions: Option<Vec<Vec<f64>>>,
    /// Per-event travel budget for reference updates.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detection_radius: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum GraphSpec {
    #[default]
    Complete,
    Disk { radius: f64 },
    Edges {
        edges: Vec<[usize; 2]>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        diameter: Option<usize>,
    },
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HorizonSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub events: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSpec {
    /// Write every n-th trace row (the last row is always written).
    pub trace_every: u64,
    /// Estimate the objective every n events; 0 disables it.
    pub objective_every: u64,
    pub objective_samples: usize,
    /// Trailing window for frequencies and running averages.
    pub window: usize,
    /// Snapshot every n events; 0 disables periodic snapshots.
    pub snapshot_every: u64,
    pub raster_resolution: usize,
}

impl Default for OutputSpec {
    fn default() -> Self {
        OutputSpec {
            trace_every: 1,
            objective_every: 0,
            objective_samples: 2000,
            window: 1000,
            snapshot_every: 0,
            raster_resolution: 64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransientSpec {
    pub events: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeteroSpec {
    pub team_a: usize,
    pub team_b: usize,
    /// Probabilities of event types a, b and ab.
    pub probabilities: [f64; 3],
    /// Spatial laws for types a, b and ab.
    pub distributions: Vec<DistributionSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cost_a: Option<CostSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cost_b: Option<CostSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub positions_a: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub positions_b: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrackSpec {
    pub radius: f64,
    #[serde(default)]
    pub theta0: f64,
    #[serde(default = "default_decay")]
    pub decay: f64,
    #[serde(default = "default_noise")]
    pub noise: f64,
}

fn default_decay() -> f64 {
    0.95
}

fn default_noise() -> f64 {
    0.5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartitionSpec {
    pub rates: Vec<f64>,
    /// Fixed generator points; low-discrepancy points in the lower corner
    /// of the workspace by default.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DtrpSpec {
    /// Arrival rate λ; give either this or `load`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rate: Option<f64>,
    /// Load factor ρ = λ s̄ / n.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub load: Option<f64>,
    #[serde(default = "default_speed")]
    pub speed: f64,
    pub service: ServiceLaw,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators: Option<Vec<Vec<f64>>>,
    #[serde(default = "default_dt_cap")]
    pub dt_cap: f64,
    #[serde(default = "default_two_opt")]
    pub two_opt_factor: usize,
}

fn default_speed() -> f64 {
    1.0
}

fn default_dt_cap() -> f64 {
    0.01
}

fn default_two_opt() -> usize {
    50
}

fn default_cost() -> CostSpec {
    CostSpec::Quadratic
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub algorithm: Algorithm,
    pub seed: u64,
    pub workspace: WorkspaceSpec,
    #[serde(default)]
    pub distribution: DistributionSpec,
    #[serde(default)]
    pub robots: RobotsSpec,
    #[serde(default = "default_cost")]
    pub cost: CostSpec,
    pub stepsize: StepsizeSchedule,
    #[serde(default)]
    pub graph: GraphSpec,
    pub horizon: HorizonSpec,
    #[serde(default)]
    pub output: OutputSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transient: Option<TransientSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hetero: Option<HeteroSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub track: Option<TrackSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partition: Option<PartitionSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dtrp: Option<DtrpSpec>,
}

/// Parse a TOML value into a scenario and validate it.
pub fn scenario_from_value(value: toml::Value) -> Result<Scenario> {
    let s: Scenario = value
        .try_into()
        .map_err(|e: toml::de::Error| Error::param("scenario", e.message().to_string()))?;
    s.validate()?;
    Ok(s)
}

impl Scenario {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let s: Scenario = toml::from_str(text).map_err(|e| Error::param("scenario", e.message().to_string()))?;
        s.validate()?;
        Ok(s)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("scenarios always serialize")
    }

    pub fn workspace(&self) -> Result<Workspace> {
        match &self.workspace {
            WorkspaceSpec::Interval { lo, hi } => Workspace::interval(*lo, *hi),
            WorkspaceSpec::Box { lo, hi } => Workspace::boxed(lo, hi),
            WorkspaceSpec::Polygon { vertices } => Workspace::polygon(vertices.clone()),
        }
        .map_err(|e| Error::param("workspace", e.to_string()))
    }

    pub fn distribution(&self) -> Result<SpatialDistribution> {
        build_distribution(&self.distribution, self.workspace()?, "distribution")
    }

    /// Number of robots (or generators) the algorithm runs with.
    pub fn robot_count(&self) -> Result<usize> {
        let declared = self.robots.count.or(self.robots.positions.as_ref().map(Vec::len));
        let implied = match self.algorithm {
            Algorithm::Partition => self.partition.as_ref().map(|p| p.rates.len()),
            Algorithm::Hetero => self.hetero.as_ref().map(|h| h.team_a + h.team_b),
            Algorithm::Dtrp => self.dtrp.as_ref().and_then(|d| d.generators.as_ref().map(Vec::len)),
            _ => None,
        };
        match (declared, implied) {
            (Some(a), Some(b)) if a != b => Err(Error::param(
                "robots.count",
                format!("{a} robots declared but the algorithm section implies {b}"),
            )),
            (Some(n), _) | (None, Some(n)) if n > 0 => Ok(n),
            (Some(_), _) | (None, Some(_)) => Err(Error::param("robots.count", "need at least one robot")),
            (None, None) => Err(Error::param("robots.count", "robot count is required")),
        }
    }

    /// Explicit positions, or seeded uniform samples in the workspace.
    pub fn initial_positions(&self) -> Result<Vec<Point>> {
        let q = self.workspace()?;
        let n = self.robot_count()?;
        match &self.robots.positions {
            Some(raw) => points_in(raw, &q, "robots.positions"),
            None => {
                let mut rng = substream(self.seed, "initial-positions");
                (0..n).map(|_| q.sample_uniform(&mut rng)).collect()
            }
        }
    }

    pub fn topology(&self) -> Result<Topology> {
        match &self.graph {
            GraphSpec::Complete => Ok(Topology::Complete),
            GraphSpec::Disk { radius } => {
                if !(radius.is_finite() && *radius > 0.0) {
                    return Err(Error::param("graph.radius", "must be positive"));
                }
                Ok(Topology::Disk { radius: *radius })
            }
            GraphSpec::Edges { edges, diameter } => {
                let n = self.robot_count()?;
                let pairs: Vec<(usize, usize)> = edges.iter().map(|e| (e[0], e[1])).collect();
                CommGraph::new(n, &pairs, *diameter)
                    .map(Topology::Fixed)
                    .map_err(|e| Error::param("graph.edges", e.to_string()))
            }
        }
    }

    pub fn event_horizon(&self) -> u64 {
        self.horizon.events.unwrap_or(u64::MAX)
    }

    pub fn typed_law(&self) -> Result<TypedEventLaw> {
        let h = self.hetero.as_ref().ok_or_else(|| Error::param("hetero", "section is required"))?;
        if h.distributions.len() != 3 {
            return Err(Error::param("hetero.distributions", "need exactly three laws (a, b, ab)"));
        }
        let q = self.workspace()?;
        let laws: Vec<SpatialDistribution> = h
            .distributions
            .iter()
            .map(|d| build_distribution(d, q.clone(), "hetero.distributions"))
            .collect::<Result<_>>()?;
        let [a, b, ab]: [SpatialDistribution; 3] = laws.try_into().expect("length checked");
        TypedEventLaw::new(h.probabilities, [a, b, ab]).map_err(|e| Error::param("hetero.probabilities", e.to_string()))
    }

    /// Team positions for the heterogeneous algorithm.
    pub fn team_positions(&self) -> Result<(Vec<Point>, Vec<Point>)> {
        let h = self.hetero.as_ref().ok_or_else(|| Error::param("hetero", "section is required"))?;
        let q = self.workspace()?;
        let mut rng = substream(self.seed, "initial-positions");
        let mut team = |raw: &Option<Vec<Vec<f64>>>, n: usize, field: &str| -> Result<Vec<Point>> {
            match raw {
                Some(r) if r.len() != n => Err(Error::param(field, format!("expected {n} positions, got {}", r.len()))),
                Some(r) => points_in(r, &q, field),
                None => (0..n).map(|_| q.sample_uniform(&mut rng)).collect(),
            }
        };
        let a = team(&h.positions_a, h.team_a, "hetero.positions_a")?;
        let b = team(&h.positions_b, h.team_b, "hetero.positions_b")?;
        Ok((a, b))
    }

    pub fn partition_generators(&self) -> Result<Vec<Point>> {
        let p = self.partition.as_ref().ok_or_else(|| Error::param("partition", "section is required"))?;
        let q = self.workspace()?;
        match &p.generators {
            Some(raw) => points_in(raw, &q, "partition.generators"),
            None => Ok(corner_points(&q, p.rates.len(), 0.3)),
        }
    }

    pub fn dtrp_generators(&self) -> Result<Vec<Point>> {
        let d = self.dtrp.as_ref().ok_or_else(|| Error::param("dtrp", "section is required"))?;
        let q = self.workspace()?;
        match &d.generators {
            Some(raw) => points_in(raw, &q, "dtrp.generators"),
            None => Ok(corner_points(&q, self.robot_count()?, 1.0)),
        }
    }

    /// Arrival rate, derived from the load factor when that is given.
    pub fn dtrp_rate(&self) -> Result<f64> {
        let d = self.dtrp.as_ref().ok_or_else(|| Error::param("dtrp", "section is required"))?;
        match (d.rate, d.load) {
            (Some(r), None) => Ok(r),
            (None, Some(rho)) => Ok(rho * self.robot_count()? as f64 / d.service.mean()),
            _ => Err(Error::param("dtrp.rate", "give exactly one of `rate` and `load`")),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let q = self.workspace()?;
        self.cost.validate()?;
        self.stepsize.validate()?;
        let n = self.robot_count()?;
        if let Some(c) = self.robots.count {
            if let Some(p) = &self.robots.positions {
                if p.len() != c {
                    return Err(Error::param(
                        "robots.positions",
                        format!("expected {c} positions, got {}", p.len()),
                    ));
                }
            }
        }
        if let Some(raw) = &self.robots.positions {
            let pts = points_in(raw, &q, "robots.positions")?;
            if let Some((first, second)) = find_coincident(&pts) {
                return Err(Error::param(
                    "robots.positions",
                    format!("positions {first} and {second} coincide"),
                ));
            }
        }
        if let Some(b) = self.robots.budget {
            if !(b > 0.0) {
                return Err(Error::param("robots.budget", "must be positive"));
            }
        }
        if let Some(r) = self.robots.detection_radius {
            if !(r > 0.0) {
                return Err(Error::param("robots.detection_radius", "must be positive"));
            }
        }
        self.topology()?;
        self.validate_horizon()?;
        self.validate_output(&q)?;
        match self.algorithm {
            Algorithm::Coverage => {
                self.distribution()?;
            }
            Algorithm::Hetero => {
                self.typed_law()?;
                self.team_positions()?;
                let h = self.hetero.as_ref().unwrap();
                if h.team_a == 0 || h.team_b == 0 {
                    return Err(Error::param("hetero.team_a", "each team needs at least one robot"));
                }
                for (c, field) in [(&h.cost_a, "hetero.cost_a"), (&h.cost_b, "hetero.cost_b")] {
                    if let Some(c) = c {
                        c.validate().map_err(|e| Error::param(field, e.to_string()))?;
                    }
                }
            }
            Algorithm::Track => self.validate_track(&q)?,
            Algorithm::Partition => {
                self.distribution()?;
                let p = self.partition.as_ref().ok_or_else(|| Error::param("partition", "section is required"))?;
                validate_rates(&p.rates, n).map_err(|e| Error::param("partition.rates", e.to_string()))?;
                let gens = self.partition_generators()?;
                if gens.len() != n {
                    return Err(Error::param("partition.generators", format!("expected {n} generators")));
                }
                if let Some((first, second)) = find_coincident(&gens) {
                    return Err(Error::param(
                        "partition.generators",
                        format!("generators {first} and {second} coincide"),
                    ));
                }
            }
            Algorithm::Dtrp | Algorithm::DtrpLight => self.validate_dtrp(n)?,
        }
        Ok(())
    }

    fn validate_horizon(&self) -> Result<()> {
        let h = &self.horizon;
        if let Some(t) = h.time {
            if !(t.is_finite() && t > 0.0) {
                return Err(Error::param("horizon.time", "must be positive"));
            }
            if !matches!(self.algorithm, Algorithm::Dtrp | Algorithm::DtrpLight) {
                return Err(Error::param("horizon.time", "only the repair-routing algorithms run on a clock"));
            }
        }
        if h.events.is_none() && h.time.is_none() {
            return Err(Error::param("horizon.events", "give an event count or a time horizon"));
        }
        Ok(())
    }

    fn validate_output(&self, q: &Workspace) -> Result<()> {
        let o = &self.output;
        if o.trace_every == 0 {
            return Err(Error::param("output.trace_every", "must be at least 1"));
        }
        if o.window == 0 {
            return Err(Error::param("output.window", "must be at least 1"));
        }
        if o.objective_every > 0 && o.objective_samples < 2 {
            return Err(Error::param("output.objective_samples", "need at least 2 samples"));
        }
        if o.raster_resolution < 2 {
            return Err(Error::param("output.raster_resolution", "need at least 2 pixels per axis"));
        }
        let _ = q;
        Ok(())
    }

    fn validate_track(&self, q: &Workspace) -> Result<()> {
        let t = self.track.as_ref().ok_or_else(|| Error::param("track", "section is required"))?;
        if q.dim() != 2 {
            return Err(Error::param("workspace", "target tracking needs a planar workspace"));
        }
        if !(t.radius.is_finite() && t.radius > 0.0) {
            return Err(Error::param("track.radius", "must be positive"));
        }
        if !(t.noise.is_finite() && t.noise >= 0.0) {
            return Err(Error::param("track.noise", "must be nonnegative"));
        }
        if !(t.decay.is_finite() && t.decay.abs() < 1.0) {
            return Err(Error::param("track.decay", "must lie in (-1, 1)"));
        }
        for i in 0..720 {
            let a = i as f64 * std::f64::consts::TAU / 720.0;
            if !q.contains(&Point::xy(t.radius * a.cos(), t.radius * a.sin())) {
                return Err(Error::param("track.radius", "target circle leaves the workspace"));
            }
        }
        Ok(())
    }

    fn validate_dtrp(&self, n: usize) -> Result<()> {
        let d = self.dtrp.as_ref().ok_or_else(|| Error::param("dtrp", "section is required"))?;
        d.service.validate().map_err(|e| Error::param("dtrp.service", e.to_string()))?;
        if !(d.speed.is_finite() && d.speed > 0.0) {
            return Err(Error::param("dtrp.speed", "must be positive"));
        }
        if !(d.dt_cap.is_finite() && d.dt_cap > 0.0) {
            return Err(Error::param("dtrp.dt_cap", "must be positive"));
        }
        if d.load.is_some() && d.service.mean() <= 0.0 {
            return Err(Error::param("dtrp.load", "a load factor needs a positive mean service time"));
        }
        if let Some(rho) = d.load {
            if !(rho.is_finite() && rho > 0.0) {
                return Err(Error::param("dtrp.load", "must be positive"));
            }
        }
        let rate = self.dtrp_rate()?;
        if !(rate.is_finite() && rate > 0.0) {
            return Err(Error::param("dtrp.rate", "must be positive"));
        }
        self.distribution()?;
        if self.algorithm == Algorithm::Dtrp {
            let gens = self.dtrp_generators()?;
            if gens.len() != n {
                return Err(Error::param("dtrp.generators", format!("expected {n} generators")));
            }
            if let Some((first, second)) = find_coincident(&gens) {
                return Err(Error::param(
                    "dtrp.generators",
                    format!("generators {first} and {second} coincide"),
                ));
            }
        }
        Ok(())
    }
}

fn points_in(raw: &[Vec<f64>], q: &Workspace, field: &str) -> Result<Vec<Point>> {
    raw.iter()
        .map(|c| {
            if c.len() != q.dim() {
                return Err(Error::param(
                    field,
                    format!("expected {}-D points, got {} coordinates", q.dim(), c.len()),
                ));
            }
            let p = Point::new(c);
            if !q.contains(&p) {
                return Err(Error::param(field, format!("point {p} lies outside the workspace")));
            }
            Ok(p)
        })
        .collect()
}

fn build_distribution(spec: &DistributionSpec, q: Workspace, field: &str) -> Result<SpatialDistribution> {
    let dim = q.dim();
    let to_point = |c: &[f64], what: &str| {
        if c.len() != dim {
            Err(Error::param(format!("{field}.{what}"), format!("expected {dim} coordinates")))
        } else {
            Ok(Point::new(c))
        }
    };
    match spec {
        DistributionSpec::Uniform => Ok(SpatialDistribution::uniform(q)),
        DistributionSpec::Mixture { components } => {
            let comps = components
                .iter()
                .map(|c| {
                    Ok(MixtureComponent {
                        mean: to_point(&c.mean, "components.mean")?,
                        std: c.std,
                        weight: c.weight,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            SpatialDistribution::mixture(q, comps).map_err(|e| Error::param(field, e.to_string()))
        }
        DistributionSpec::Ring { center, radius } => {
            let c = to_point(center, "center")?;
            SpatialDistribution::ring(q, c, *radius).map_err(|e| Error::param(field, e.to_string()))
        }
    }
}
