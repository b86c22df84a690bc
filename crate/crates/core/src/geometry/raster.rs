use std::io::{self, Write};

use super::cost::CostFunction;
use super::diagram::GeneralizedDiagram;
use super::point::Point;
use super::workspace::Workspace;
use crate::error::{Error, Result};

/// Per-pixel cell ownership over the workspace bounding box.
///
/// Row 0 is the top row (largest y); pixels are sampled at their centers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OwnershipRaster {
    pub width: usize,
    pub height: usize,
    pub cells: usize,
    /// Row-major owners; `None` marks pixels outside the workspace.
    pub owners: Vec<Option<usize>>,
}

impl OwnershipRaster {
    pub fn get(&self, col: usize, row: usize) -> Option<usize> {
        self.owners[row * self.width + col]
    }

    /// Number of in-workspace pixels owned by each cell.
    pub fn pixel_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.cells];
        for owner in self.owners.iter().flatten() {
            counts[*owner] += 1;
        }
        counts
    }

    /// Text grid: a `width height n` header line, then one row per line
    /// with space-separated owner indices and `-1` outside the workspace.
    pub fn write_to<W: Write>(&self, out: &mut W) -> io::Result<()> {
        writeln!(out, "{} {} {}", self.width, self.height, self.cells)?;
        for row in self.owners.chunks(self.width) {
            let line: Vec<String> = row
                .iter()
                .map(|o| o.map_or_else(|| "-1".to_string(), |i| i.to_string()))
                .collect();
            writeln!(out, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

pub fn render_ownership_raster<C: CostFunction>(
    diagram: &GeneralizedDiagram<C>,
    workspace: &Workspace,
    width: usize,
    height: usize,
) -> Result<OwnershipRaster> {
    if workspace.dim() != 2 {
        return Err(Error::UnsupportedDimension {
            expected: 2,
            actual: workspace.dim(),
        });
    }
    if width < 2 || height < 2 {
        return Err(Error::param("raster_resolution", "need at least 2 pixels per axis"));
    }
    let (lo, hi) = workspace.bounding_box();
    let dx = (hi[0] - lo[0]) / width as f64;
    let dy = (hi[1] - lo[1]) / height as f64;
    let mut owners = Vec::with_capacity(width * height);
    for row in 0..height {
        let y = hi[1] - (row as f64 + 0.5) * dy;
        for col in 0..width {
            let z = Point::xy(lo[0] + (col as f64 + 0.5) * dx, y);
            owners.push(workspace.contains(&z).then(|| diagram.cell_owner(&z)));
        }
    }
    Ok(OwnershipRaster {
        width,
        height,
        cells: diagram.len(),
        owners,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::CostSpec;

    #[test]
    fn single_generator_owns_every_pixel() {
        let d = GeneralizedDiagram::voronoi(vec![Point::xy(0.3, 0.3)], CostSpec::Quadratic).unwrap();
        let r = render_ownership_raster(&d, &Workspace::unit_square(), 16, 16).unwrap();
        assert!(r.owners.iter().all(|o| *o == Some(0)));
    }

    #[test]
    fn pixels_outside_polygon_are_marked() {
        let tri = Workspace::polygon(vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]).unwrap();
        let d = GeneralizedDiagram::voronoi(vec![Point::xy(0.3, 0.3)], CostSpec::Quadratic).unwrap();
        let r = render_ownership_raster(&d, &tri, 10, 10).unwrap();
        assert_eq!(r.get(9, 0), None);
        assert_eq!(r.get(0, 9), Some(0));
        // centers with col + row <= 9 lie in the closed triangle
        assert_eq!(r.pixel_counts()[0], 55);
    }

    #[test]
    fn equal_weight_boundary_follows_bisector() {
        // generators mirror each other across the line y = x
        let g0 = Point::xy(0.2, 0.6);
        let g1 = Point::xy(0.6, 0.2);
        let d = GeneralizedDiagram::voronoi(vec![g0, g1], CostSpec::Quadratic).unwrap();
        let n = 50;
        let r = render_ownership_raster(&d, &Workspace::unit_square(), n, n).unwrap();
        for row in 0..n {
            for col in 0..n {
                let x = (col as f64 + 0.5) / n as f64;
                let y = 1.0 - (row as f64 + 0.5) / n as f64;
                let analytic = if y >= x { 0 } else { 1 };
                let owner = r.get(col, row).unwrap();
                if owner != analytic {
                    // mismatches only within one pixel of the bisector
                    assert!((y - x).abs() <= 1.5 / n as f64, "pixel ({col},{row})");
                }
            }
        }
    }

    #[test]
    fn heavy_weight_can_empty_a_power_cell() {
        let d = GeneralizedDiagram::new(
            vec![Point::xy(0.5, 0.5), Point::xy(0.52, 0.5)],
            vec![5.0, 0.0],
            CostSpec::Quadratic,
        )
        .unwrap();
        let r = render_ownership_raster(&d, &Workspace::unit_square(), 32, 32).unwrap();
        assert_eq!(r.pixel_counts(), vec![32 * 32, 0]);
    }

    #[test]
    fn one_dimensional_workspace_is_rejected() {
        let d = GeneralizedDiagram::voronoi(vec![Point::x(0.3)], CostSpec::Quadratic).unwrap();
        let err = render_ownership_raster(&d, &Workspace::unit_interval(), 8, 8).unwrap_err();
        assert!(matches!(err, Error::UnsupportedDimension { expected: 2, actual: 1 }));
    }

    #[test]
    fn text_format_has_header_line() {
        let d = GeneralizedDiagram::voronoi(vec![Point::xy(0.25, 0.5), Point::xy(0.75, 0.5)], CostSpec::Quadratic).unwrap();
        let r = render_ownership_raster(&d, &Workspace::unit_square(), 4, 2).unwrap();
        let mut buf = Vec::new();
        r.write_to(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "4 2 2\n0 0 1 1\n0 0 1 1\n");
    }
}
