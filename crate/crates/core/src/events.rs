//! Seeded event generators: iid spatial laws, a Markov target on a circle,
//! space-time Poisson arrivals, and typed events for heterogeneous teams.
//!
//! Every generator draws from an explicitly passed RNG. Independent streams
//! come from [`substream`], which derives a ChaCha stream from a master seed
//! and a label, so adding a new consumer never perturbs existing ones.

use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp, StandardNormal};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::geometry::{Point, Workspace, MAX_REJECTION_ATTEMPTS};

pub type SimRng = ChaCha8Rng;

/// Independent generator for `(master, label)`.
pub fn substream(master: u64, label: &str) -> SimRng {
    let mut h = Sha256::new();
    h.update(master.to_le_bytes());
    h.update(label.as_bytes());
    let digest = h.finalize();
    let mut seed = [0u8; 32];
    seed.copy_from_slice(&digest);
    SimRng::from_seed(seed)
}

/// Anything that produces event locations.
pub trait PointSampler {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Point>;
}

#[derive(Debug, Clone, PartialEq)]
pub struct MixtureComponent {
    pub mean: Point,
    pub std: f64,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SpatialKind {
    Uniform,
    /// Isotropic Gaussian mixture truncated to the workspace.
    Mixture(Vec<MixtureComponent>),
    /// Uniform angle on a circle, truncated to the workspace.
    Ring { center: Point, radius: f64 },
}

/// Event location law supported on a workspace.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialDistribution {
    workspace: Workspace,
    kind: SpatialKind,
}

impl SpatialDistribution {
    pub fn uniform(workspace: Workspace) -> Self {
        SpatialDistribution {
            workspace,
            kind: SpatialKind::Uniform,
        }
    }

    pub fn mixture(workspace: Workspace, components: Vec<MixtureComponent>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::param("components", "mixture needs at least one component"));
        }
        let mut total = 0.0;
        for c in &components {
            if c.mean.dim() != workspace.dim() {
                return Err(Error::DimensionMismatch {
                    expected: workspace.dim(),
                    actual: c.mean.dim(),
                });
            }
            if !(c.std.is_finite() && c.std > 0.0) {
                return Err(Error::param("components.std", "must be positive"));
            }
            if !(c.weight.is_finite() && c.weight > 0.0) {
                return Err(Error::param("components.weight", "must be positive"));
            }
            total += c.weight;
        }
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::param(
                "components.weight",
                format!("mixture weights must sum to 1, got {total}"),
            ));
        }
        Ok(SpatialDistribution {
            workspace,
            kind: SpatialKind::Mixture(components),
        })
    }

    pub fn ring(workspace: Workspace, center: Point, radius: f64) -> Result<Self> {
        if workspace.dim() != 2 || center.dim() != 2 {
            return Err(Error::UnsupportedDimension {
                expected: 2,
                actual: workspace.dim(),
            });
        }
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::param("radius", "must be positive"));
        }
        Ok(SpatialDistribution {
            workspace,
            kind: SpatialKind::Ring { center, radius },
        })
    }

    pub fn workspace(&self) -> &Workspace {
        &self.workspace
    }

    pub fn kind(&self) -> &SpatialKind {
        &self.kind
    }

    pub fn sample_location<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Point> {
        match &self.kind {
            SpatialKind::Uniform => self.workspace.sample_uniform(rng),
            SpatialKind::Mixture(components) => {
                let dim = self.workspace.dim();
                for _ in 0..MAX_REJECTION_ATTEMPTS {
                    let c = pick_component(components, rng);
                    let mut coords = [0.0; 3];
                    for (a, slot) in coords.iter_mut().enumerate().take(dim) {
                        let n: f64 = StandardNormal.sample(rng);
                        *slot = c.mean[a] + c.std * n;
                    }
                    let p = Point::new(&coords[..dim]);
                    if self.workspace.contains(&p) {
                        return Ok(p);
                    }
                }
                Err(Error::DegenerateDistribution {
                    attempts: MAX_REJECTION_ATTEMPTS,
                })
            }
            SpatialKind::Ring { center, radius } => {
                for _ in 0..MAX_REJECTION_ATTEMPTS {
                    let t = rng.random_range(0.0..std::f64::consts::TAU);
                    let p = *center + Point::xy(t.cos(), t.sin()) * *radius;
                    if self.workspace.contains(&p) {
                        return Ok(p);
                    }
                }
                Err(Error::DegenerateDistribution {
                    attempts: MAX_REJECTION_ATTEMPTS,
                })
            }
        }
    }
}

impl PointSampler for SpatialDistribution {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Point> {
        self.sample_location(rng)
    }
}

fn pick_component<'a, R: Rng + ?Sized>(components: &'a [MixtureComponent], rng: &mut R) -> &'a MixtureComponent {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for c in components {
        acc += c.weight;
        if u < acc {
            return c;
        }
    }
    components.last().unwrap()
}

/// Target moving on a circle with angle `θ' = decay·θ + ξ`,
/// `ξ ~ U[-noise, noise]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarkovTarget {
    pub radius: f64,
    pub decay: f64,
    pub noise: f64,
    pub theta: f64,
}

impl MarkovTarget {
    pub fn new(radius: f64, theta: f64) -> Self {
        MarkovTarget {
            radius,
            decay: 0.95,
            noise: 0.5,
            theta,
        }
    }

    pub fn position(&self) -> Point {
        Point::xy(self.radius * self.theta.cos(), self.radius * self.theta.sin())
    }

    /// Apply the recursion with an explicit noise draw.
    pub fn advance(&mut self, xi: f64) -> Point {
        self.theta = self.decay * self.theta + xi;
        self.position()
    }

    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Point {
        let xi = if self.noise > 0.0 {
            rng.random_range(-self.noise..=self.noise)
        } else {
            0.0
        };
        self.advance(xi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ServiceLaw {
    Deterministic { mean: f64 },
    Exponential { mean: f64 },
}

impl ServiceLaw {
    pub fn validate(&self) -> Result<()> {
        let m = self.mean();
        if m.is_finite() && m >= 0.0 {
            Ok(())
        } else {
            Err(Error::param("service.mean", "must be finite and nonnegative"))
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            ServiceLaw::Deterministic { mean } | ServiceLaw::Exponential { mean } => mean,
        }
    }

    pub fn second_moment(&self) -> f64 {
        match *self {
            ServiceLaw::Deterministic { mean } => mean * mean,
            ServiceLaw::Exponential { mean } => 2.0 * mean * mean,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            ServiceLaw::Deterministic { mean } => mean,
            ServiceLaw::Exponential { mean } => {
                if mean == 0.0 {
                    0.0
                } else {
                    Exp::new(1.0 / mean).unwrap().sample(rng)
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arrival {
    pub time: f64,
    pub location: Point,
    pub service: f64,
}

/// Space-time Poisson process with iid marks.
///
/// Gaps, locations, and service times come from three separate substreams.
#[derive(Debug, Clone)]
pub struct PoissonStream {
    rate: f64,
    spatial: SpatialDistribution,
    service: ServiceLaw,
    time: f64,
    gap_rng: SimRng,
    location_rng: SimRng,
    service_rng: SimRng,
}

impl PoissonStream {
    pub fn new(rate: f64, spatial: SpatialDistribution, service: ServiceLaw, seed: u64) -> Result<Self> {
        if !(rate.is_finite() && rate > 0.0) {
            return Err(Error::param("rate", "arrival rate must be positive"));
        }
        service.validate()?;
        Ok(PoissonStream {
            rate,
            spatial,
            service,
            time: 0.0,
            gap_rng: substream(seed, "arrivals/gaps"),
            location_rng: substream(seed, "arrivals/locations"),
            service_rng: substream(seed, "arrivals/service"),
        })
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn next_arrival(&mut self) -> Result<Arrival> {
        let gap: f64 = Exp::new(self.rate).unwrap().sample(&mut self.gap_rng);
        // exponential draws can underflow to 0; keep arrival times strictly increasing
        let next = self.time + gap;
        self.time = if next > self.time { next } else { f64::from_bits(self.time.to_bits() + 1) };
        Ok(Arrival {
            time: self.time,
            location: self.spatial.sample_location(&mut self.location_rng)?,
            service: self.service.sample(&mut self.service_rng),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EventType {
    A,
    B,
    AB,
}

impl EventType {
    pub fn label(&self) -> &'static str {
        match self {
            EventType::A => "a",
            EventType::B => "b",
            EventType::AB => "ab",
        }
    }
}

/// Event type probabilities and per-type spatial laws, indexed a, b, ab.
#[derive(Debug, Clone, PartialEq)]
pub struct TypedEventLaw {
    probabilities: [f64; 3],
    spatial: [SpatialDistribution; 3],
}

impl TypedEventLaw {
    pub fn new(probabilities: [f64; 3], spatial: [SpatialDistribution; 3]) -> Result<Self> {
        if probabilities.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(Error::param("probabilities", "must be nonnegative"));
        }
        let total: f64 = probabilities.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::param(
                "probabilities",
                format!("type probabilities must sum to 1, got {total}"),
            ));
        }
        Ok(TypedEventLaw {
            probabilities,
            spatial,
        })
    }

    pub fn probabilities(&self) -> [f64; 3] {
        self.probabilities
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<(EventType, Point)> {
        let u: f64 = rng.random();
        let [pa, pb, _] = self.probabilities;
        let (kind, idx) = if u < pa {
            (EventType::A, 0)
        } else if u < pa + pb {
            (EventType::B, 1)
        } else {
            (EventType::AB, 2)
        };
        Ok((kind, self.spatial[idx].sample_location(rng)?))
    }
}
