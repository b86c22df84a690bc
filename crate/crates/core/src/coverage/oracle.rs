use rand::Rng;

use crate::error::{Error, Result};
use crate::events::PointSampler;
use crate::geometry::{find_coincident, nearest_index, CostFunction, Point};

/// Monte Carlo mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
}

/// Running mean and variance (Welford).
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Welford {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Welford {
    pub(crate) fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub(crate) fn estimate(&self) -> Estimate {
        let var = if self.n > 1 { self.m2 / (self.n - 1) as f64 } else { 0.0 };
        Estimate {
            mean: self.mean,
            stderr: (var / self.n.max(1) as f64).sqrt(),
        }
    }
}

/// Per-agent gradient estimates and componentwise standard errors.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientEstimate {
    pub mean: Vec<Point>,
    pub stderr: Vec<Point>,
}

/// Monte Carlo estimate of `∂E/∂p_i = ∫_{V_i} f'(‖p_i − z‖)(p_i − z)/‖p_i − z‖ dP`.
///
/// Every sample is routed to its nearest agent; the other agents record a
/// zero contribution, so the estimate is an average over all `samples`.
pub fn deterministic_gradient<C, S, R>(
    positions: &[Point],
    dist: &S,
    cost: &C,
    samples: usize,
    rng: &mut R,
) -> Result<GradientEstimate>
where
    C: CostFunction,
    S: PointSampler + ?Sized,
    R: Rng + ?Sized,
{
    if positions.is_empty() {
        return Err(Error::param("positions", "need at least one position"));
    }
    if samples < 2 {
        return Err(Error::param("samples", "need at least 2 samples"));
    }
    if let Some((first, second)) = find_coincident(positions) {
        return Err(Error::CoincidentPositions { first, second });
    }
    let n = positions.len();
    let dim = positions[0].dim();
    let mut sum = vec![[0.0f64; 3]; n];
    let mut sum_sq = vec![[0.0f64; 3]; n];
    for _ in 0..samples {
        let z = dist.sample(rng)?;
        let i = nearest_index(&z, positions);
        let d = positions[i].distance(&z);
        let g = (positions[i] - z).unit() * cost.derivative(d);
        for a in 0..dim {
            sum[i][a] += g[a];
            sum_sq[i][a] += g[a] * g[a];
        }
    }
    let m = samples as f64;
    let mut mean = Vec::with_capacity(n);
    let mut stderr = Vec::with_capacity(n);
    for i in 0..n {
        let mut mu = [0.0; 3];
        let mut se = [0.0; 3];
        for a in 0..dim {
            mu[a] = sum[i][a] / m;
            let var = ((sum_sq[i][a] - m * mu[a] * mu[a]) / (m - 1.0)).max(0.0);
            se[a] = (var / m).sqrt();
        }
        mean.push(Point::new(&mu[..dim]));
        stderr.push(Point::new(&se[..dim]));
    }
    Ok(GradientEstimate { mean, stderr })
}

/// Monte Carlo estimate of the coverage objective `E[min_i f(‖p_i − Z‖)]`.
pub fn objective_estimate<C, S, R>(
    positions: &[Point],
    dist: &S,
    cost: &C,
    samples: usize,
    rng: &mut R,
) -> Result<Estimate>
where
    C: CostFunction,
    S: PointSampler + ?Sized,
    R: Rng + ?Sized,
{
    if positions.is_empty() {
        return Err(Error::param("positions", "need at least one position"));
    }
    if samples == 0 {
        return Err(Error::param("samples", "must be at least 1"));
    }
    let mut acc = Welford::default();
    for _ in 0..samples {
        let z = dist.sample(rng)?;
        let d = positions.iter().map(|p| p.distance(&z)).fold(f64::INFINITY, f64::min);
        acc.push(cost.value(d));
    }
    Ok(acc.estimate())
}
