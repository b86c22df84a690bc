//! Geometric primitives: points, convex workspaces, costs of distance,
//! nearest-generator and generalized-Voronoi ownership, and Monte Carlo
//! cell measures.

mod cost;
mod diagram;
mod point;
mod raster;
mod workspace;

pub use cost::{CostFunction, CostSpec};
pub use diagram::{
    estimate_cell_measures, find_coincident, nearest_index, normalize_counts, saturate,
    GeneralizedDiagram,
};
pub use point::{Point, MAX_DIM};
pub use raster::{render_ownership_raster, OwnershipRaster};
pub use workspace::{Workspace, MAX_REJECTION_ATTEMPTS};

/// Halton sequence value for `index` in `base`.
pub(crate) fn halton(mut index: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while index > 0 {
        f /= base as f64;
        r += f * (index % base) as f64;
        index /= base;
    }
    r
}

/// `n` distinct low-discrepancy points in the lower corner of the workspace
/// (the first `fraction` of the bounding box along every axis).
pub fn corner_points(workspace: &Workspace, n: usize, fraction: f64) -> Vec<Point> {
    const BASES: [u64; 3] = [2, 3, 5];
    let (lo, hi) = workspace.bounding_box();
    let dim = workspace.dim();
    (1..=n as u64)
        .map(|k| {
            let mut c = [0.0; MAX_DIM];
            for a in 0..dim {
                c[a] = lo[a] + fraction * (hi[a] - lo[a]) * (0.05 + 0.9 * halton(k, BASES[a]));
            }
            workspace.project(&Point::new(&c[..dim]))
        })
        .collect()
}
