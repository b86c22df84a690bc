use crate::geometry::{nearest_index, Point};

/// Length of the closed tour visiting `points` in `order`.
pub fn closed_length(points: &[Point], order: &[usize]) -> f64 {
    let m = order.len();
    (0..m).map(|i| points[order[i]].distance(&points[order[(i + 1) % m]])).sum()
}

/// Nearest-neighbor ordering starting from the point closest to `start`.
pub fn nearest_neighbor_order(start: &Point, points: &[Point]) -> Vec<usize> {
    assert!(!points.is_empty(), "tour needs at least one point");
    let m = points.len();
    let mut visited = vec![false; m];
    let mut order = Vec::with_capacity(m);
    let mut here = *start;
    for _ in 0..m {
        let mut best = usize::MAX;
        let mut best_d = f64::INFINITY;
        for (i, p) in points.iter().enumerate() {
            if !visited[i] {
                let d = here.distance(p);
                if d < best_d {
                    best = i;
                    best_d = d;
                }
            }
        }
        visited[best] = true;
        order.push(best);
        here = points[best];
    }
    order
}

/// Improve a closed tour with 2-opt moves until none helps or `max_swaps`
/// moves have been applied. Returns the number of applied moves.
pub fn two_opt(points: &[Point], order: &mut [usize], max_swaps: usize) -> usize {
    let m = order.len();
    if m < 4 {
        return 0;
    }
    let d = |a: usize, b: usize| points[a].distance(&points[b]);
    let mut swaps = 0;
    let mut improved = true;
    while improved && swaps < max_swaps {
        improved = false;
        for i in 0..m - 2 {
            for j in i + 2..m {
                if i == 0 && j == m - 1 {
                    continue;
                }
                let (a, b) = (order[i], order[i + 1]);
                let (c, e) = (order[j], order[(j + 1) % m]);
                let delta = d(a, c) + d(b, e) - d(a, b) - d(c, e);
                if delta < -1e-12 {
                    order[i + 1..=j].reverse();
                    swaps += 1;
                    improved = true;
                    if swaps >= max_swaps {
                        return swaps;
                    }
                }
            }
        }
    }
    swaps
}

/// Result of [`tsp_tour`].
#[derive(Debug, Clone, PartialEq)]
pub struct Tour {
    /// Visiting order as indices into the input points.
    pub order: Vec<usize>,
    /// Whether 2-opt stopped at the swap cap rather than at a local optimum.
    pub cap_hit: bool,
}

/// Heuristic Euclidean tour: nearest neighbor from `start`, 2-opt with at
/// most `swap_factor · |points|` moves, rotated to begin at the point
/// nearest `start`.
pub fn tsp_tour(start: &Point, points: &[Point], swap_factor: usize) -> Tour {
    let mut order = nearest_neighbor_order(start, points);
    let cap = swap_factor.saturating_mul(points.len()).max(1);
    let swaps = two_opt(points, &mut order, cap);
    let ordered: Vec<Point> = order.iter().map(|&i| points[i]).collect();
    let first = nearest_index(start, &ordered);
    order.rotate_left(first);
    Tour {
        order,
        cap_hit: swaps >= cap,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::events::substream;
    use crate::geometry::Workspace;
    use proptest::prelude::*;

    #[test]
    fn single_point() {
        let t = tsp_tour(&Point::xy(0.0, 0.0), &[Point::xy(0.3, 0.4)], 50);
        assert_eq!(t.order, vec![0]);
    }

    #[test]
    fn crossing_square_is_uncrossed() {
        let pts = [Point::xy(0.0, 0.0), Point::xy(1.0, 1.0), Point::xy(1.0, 0.0), Point::xy(0.0, 1.0)];
        let mut order = vec![0, 1, 2, 3];
        assert!((closed_length(&pts, &order) - (2.0 + 2.0 * 2f64.sqrt())).abs() < 1e-12);
        assert_eq!(two_opt(&pts, &mut order, 100), 1);
        assert!((closed_length(&pts, &order) - 4.0).abs() < 1e-12);
        let t = tsp_tour(&Point::xy(0.1, 0.1), &pts, 50);
        assert!((closed_length(&pts, &t.order) - 4.0).abs() < 1e-12);
        assert_eq!(t.order[0], 0);
    }

    #[test]
    fn triangle_is_its_perimeter() {
        let pts = [Point::xy(0.0, 0.0), Point::xy(3.0, 0.0), Point::xy(0.0, 4.0)];
        let t = tsp_tour(&Point::xy(5.0, 5.0), &pts, 50);
        assert!((closed_length(&pts, &t.order) - 12.0).abs() < 1e-12);
    }

    #[test]
    fn cap_is_reported() {
        let mut rng = substream(1, "cap");
        let pts: Vec<Point> = (0..60).map(|_| Workspace::unit_square().sample_uniform(&mut rng).unwrap()).collect();
        // a zero factor still allows one move
        let t = tsp_tour(&Point::xy(0.5, 0.5), &pts, 0);
        assert!(t.cap_hit);
    }

    proptest! {
        #[test]
        fn tours_are_locally_optimal_permutations(seed in 0u64..500, m in 1usize..40) {
            let mut rng = substream(seed, "tsp");
            let q = Workspace::unit_square();
            let pts: Vec<Point> = (0..m).map(|_| q.sample_uniform(&mut rng).unwrap()).collect();
            let start = q.sample_uniform(&mut rng).unwrap();
            let nn = nearest_neighbor_order(&start, &pts);
            let t = tsp_tour(&start, &pts, 50);
            let mut sorted = t.order.clone();
            sorted.sort_unstable();
            prop_assert_eq!(sorted, (0..m).collect::<Vec<_>>());
            prop_assert!(closed_length(&pts, &t.order) <= closed_length(&pts, &nn) + 1e-12);
            prop_assert_eq!(pts[t.order[0]], pts[nearest_index(&start, &pts)]);
            if !t.cap_hit && m >= 4 {
                let o = &t.order;
                for i in 0..m - 2 {
                    for j in i + 2..m {
                        if i == 0 && j == m - 1 { continue; }
                        let d = |a: usize, b: usize| pts[o[a]].distance(&pts[o[b]]);
                        let delta = d(i, j) + d(i + 1, (j + 1) % m) - d(i, i + 1) - d(j, (j + 1) % m);
                        prop_assert!(delta >= -1e-9);
                    }
                }
            }
        }
    }
}
