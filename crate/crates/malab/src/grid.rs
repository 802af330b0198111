//! Periodic and Dirichlet rectangular grids, scalar fields, and the
//! second-order finite-difference operators shared by every solver.
//!
//! Conventions:
//! - Axis 0 is `x`; axis 1 (when present) is `y` (or the geodesic strip
//!   parameter `s`). Flat storage is row-major with axis 0 outermost.
//! - Periodic axes place `n` nodes at `k·h`, `h = L/n`; Dirichlet axes place
//!   `n` nodes at `k·h`, `h = L/(n-1)`, so the first and last node are the
//!   boundary layers and the span is exactly `L`.
//! - All (1,1)-forms are densities against the flat volume element, with
//!   `i∂∂̄f ↦ ½Δf` and the complex gradient square `|∂f|² = Σ_k (∂_k f)²/2`.

use std::fmt::Write as _;

use thiserror::Error;

/// Minimum node count per axis accepted by [`Grid::new`].
pub const MIN_POINTS_PER_AXIS: usize = 8;

#[derive(Debug, Error)]
pub enum GridError {
    #[error("grids must have 1 or 2 axes, got {0}")]
    BadDims(usize),
    #[error("axis {axis} has {got} points, need at least {min}")]
    TooFewPoints { axis: usize, got: usize, min: usize },
    #[error("axis {axis} has non-positive length {got}")]
    BadLength { axis: usize, got: f64 },
    #[error("points/lengths/boundary lists disagree in length")]
    MismatchedAxes,
}

#[derive(Debug, Error)]
pub enum FieldError {
    #[error("value count {got} does not match grid node count {want}")]
    CountMismatch { got: usize, want: usize },
    #[error("non-finite value at flat index {index}")]
    NonFinite { index: usize },
    #[error("fields live on different grids")]
    GridMismatch,
}

/// Boundary treatment of one grid axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryKind {
    Periodic,
    Dirichlet,
}

/// Rectangular grid in one or two dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    points: Vec<usize>,
    lengths: Vec<f64>,
    boundary: Vec<BoundaryKind>,
}

impl Grid {
    pub fn new(
        points: &[usize],
        lengths: &[f64],
        boundary: &[BoundaryKind],
    ) -> Result<Self, GridError> {
        let dims = points.len();
        if dims != 1 && dims != 2 {
            return Err(GridError::BadDims(dims));
        }
        if lengths.len() != dims || boundary.len() != dims {
            return Err(GridError::MismatchedAxes);
        }
        for axis in 0..dims {
            if points[axis] < MIN_POINTS_PER_AXIS {
                return Err(GridError::TooFewPoints {
                    axis,
                    got: points[axis],
                    min: MIN_POINTS_PER_AXIS,
                });
            }
            if !(lengths[axis] > 0.0) || !lengths[axis].is_finite() {
                return Err(GridError::BadLength {
                    axis,
                    got: lengths[axis],
                });
            }
        }
        Ok(Grid {
            points: points.to_vec(),
            lengths: lengths.to_vec(),
            boundary: boundary.to_vec(),
        })
    }

    /// Periodic 1-d grid (a circle of circumference `length`).
    pub fn circle(n: usize, length: f64) -> Result<Self, GridError> {
        Grid::new(&[n], &[length], &[BoundaryKind::Periodic])
    }

    /// Fully periodic 2-d grid (a flat torus).
    pub fn torus(nx: usize, ny: usize, lx: f64, ly: f64) -> Result<Self, GridError> {
        Grid::new(
            &[nx, ny],
            &[lx, ly],
            &[BoundaryKind::Periodic, BoundaryKind::Periodic],
        )
    }

    /// Strip grid: periodic in x, Dirichlet in s ∈ [0, s_len].
    pub fn strip(nx: usize, ns: usize, lx: f64, s_len: f64) -> Result<Self, GridError> {
        Grid::new(
            &[nx, ns],
            &[lx, s_len],
            &[BoundaryKind::Periodic, BoundaryKind::Dirichlet],
        )
    }

    pub fn dims(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self, axis: usize) -> usize {
        self.points[axis]
    }

    pub fn length(&self, axis: usize) -> f64 {
        self.lengths[axis]
    }

    pub fn boundary(&self, axis: usize) -> BoundaryKind {
        self.boundary[axis]
    }

    /// Node spacing. Dirichlet axes subdivide into `n-1` cells so both
    /// endpoints carry nodes; periodic axes into `n`.
    pub fn spacing(&self, axis: usize) -> f64 {
        match self.boundary[axis] {
            BoundaryKind::Periodic => self.lengths[axis] / self.points[axis] as f64,
            BoundaryKind::Dirichlet => self.lengths[axis] / (self.points[axis] - 1) as f64,
        }
    }

    /// Coordinate of node `k` on `axis`: exactly `k·h`.
    pub fn coord(&self, axis: usize, k: usize) -> f64 {
        k as f64 * self.spacing(axis)
    }

    pub fn node_count(&self) -> usize {
        self.points.iter().product()
    }

    /// Volume element `h^d` used by all discrete integrals.
    pub fn cell_volume(&self) -> f64 {
        (0..self.dims()).map(|a| self.spacing(a)).product()
    }

    pub fn fully_periodic(&self) -> bool {
        self.boundary.iter().all(|b| *b == BoundaryKind::Periodic)
    }

    /// Flat index of a 2-d node.
    #[inline]
    pub fn idx2(&self, i: usize, j: usize) -> usize {
        i * self.points[1] + j
    }

    /// Multi-index of a flat node.
    #[inline]
    pub fn unflatten(&self, flat: usize) -> [usize; 2] {
        if self.dims() == 1 {
            [flat, 0]
        } else {
            [flat / self.points[1], flat % self.points[1]]
        }
    }

    /// True away from Dirichlet boundary layers (every node of a fully
    /// periodic grid is interior).
    pub fn is_interior(&self, flat: usize) -> bool {
        let mi = self.unflatten(flat);
        for axis in 0..self.dims() {
            if self.boundary[axis] == BoundaryKind::Dirichlet {
                let k = mi[axis];
                if k == 0 || k + 1 == self.points[axis] {
                    return false;
                }
            }
        }
        true
    }

    /// Neighbor of `flat` one step along `axis` (`dir` = ±1); `None` when the
    /// step leaves a Dirichlet axis.
    #[inline]
    pub fn neighbor(&self, flat: usize, axis: usize, dir: isize) -> Option<usize> {
        let mut mi = self.unflatten(flat);
        let n = self.points[axis];
        let k = mi[axis] as isize + dir;
        let k = match self.boundary[axis] {
            BoundaryKind::Periodic => (k.rem_euclid(n as isize)) as usize,
            BoundaryKind::Dirichlet => {
                if k < 0 || k >= n as isize {
                    return None;
                }
                k as usize
            }
        };
        mi[axis] = k;
        Some(if self.dims() == 1 {
            mi[0]
        } else {
            self.idx2(mi[0], mi[1])
        })
    }
}

/// Sampled scalar function on a [`Grid`]. Immutable after construction; every
/// entry is finite.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: Grid,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self, FieldError> {
        if values.len() != grid.node_count() {
            return Err(FieldError::CountMismatch {
                got: values.len(),
                want: grid.node_count(),
            });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(FieldError::NonFinite { index });
        }
        Ok(ScalarField { grid, values })
    }

    pub fn constant(grid: Grid, c: f64) -> Result<Self, FieldError> {
        let n = grid.node_count();
        ScalarField::new(grid, vec![c; n])
    }

    /// Sample `f(coords)` at every node.
    pub fn from_fn(grid: Grid, f: impl Fn(&[f64]) -> f64) -> Result<Self, FieldError> {
        let n = grid.node_count();
        let mut values = Vec::with_capacity(n);
        for flat in 0..n {
            let mi = grid.unflatten(flat);
            let mut coords = [0.0f64; 2];
            for axis in 0..grid.dims() {
                coords[axis] = grid.coord(axis, mi[axis]);
            }
            values.push(f(&coords[..grid.dims()]));
        }
        ScalarField::new(grid, values)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self, FieldError> {
        ScalarField::new(self.grid.clone(), self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn zip_with(&self, other: &ScalarField, f: impl Fn(f64, f64) -> f64) -> Result<Self, FieldError> {
        if self.grid != other.grid {
            return Err(FieldError::GridMismatch);
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| f(a, b))
            .collect();
        ScalarField::new(self.grid.clone(), values)
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().fold(f64::INFINITY, |m, &v| m.min(v))
    }

    pub fn max(&self) -> f64 {
        self.values.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v))
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Discrete integral Σ v·h^d over all nodes.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.cell_volume()
    }

    pub fn sup_diff(&self, other: &ScalarField) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (&a, &b)| m.max((a - b).abs()))
    }

    /// Centered second-order Laplacian. Periodic axes wrap; on Dirichlet axes
    /// the result is defined at interior nodes only (boundary layers are 0).
    pub fn laplacian(&self) -> ScalarField {
        let g = &self.grid;
        let n = g.node_count();
        let mut out = vec![0.0; n];
        let inv_h2: Vec<f64> = (0..g.dims()).map(|a| 1.0 / (g.spacing(a) * g.spacing(a))).collect();
        for flat in 0..n {
            if !g.is_interior(flat) {
                continue;
            }
            let c = self.values[flat];
            let mut acc = 0.0;
            for axis in 0..g.dims() {
                let p = g.neighbor(flat, axis, 1).expect("interior node");
                let m = g.neighbor(flat, axis, -1).expect("interior node");
                acc += (self.values[p] + self.values[m] - 2.0 * c) * inv_h2[axis];
            }
            out[flat] = acc;
        }
        ScalarField { grid: g.clone(), values: out }
    }

    /// Complex gradient square |∂f|² = Σ_k (∂_k f)²/2 with centered first
    /// differences; Dirichlet boundary layers are 0.
    pub fn gradient_sq(&self) -> ScalarField {
        let g = &self.grid;
        let n = g.node_count();
        let mut out = vec![0.0; n];
        let inv_2h: Vec<f64> = (0..g.dims()).map(|a| 1.0 / (2.0 * g.spacing(a))).collect();
        for flat in 0..n {
            if !g.is_interior(flat) {
                continue;
            }
            let mut acc = 0.0;
            for axis in 0..g.dims() {
                let p = g.neighbor(flat, axis, 1).expect("interior node");
                let m = g.neighbor(flat, axis, -1).expect("interior node");
                let d = (self.values[p] - self.values[m]) * inv_2h[axis];
                acc += d * d;
            }
            out[flat] = 0.5 * acc;
        }
        ScalarField { grid: g.clone(), values: out }
    }

    /// Real Hessian by centered second differences; the mixed term uses the
    /// 4-point cross stencil, so symmetry is exact by construction. Defined at
    /// interior nodes (boundary layers are 0).
    pub fn hessian(&self) -> HessianField {
        let g = &self.grid;
        let n = g.node_count();
        let dims = g.dims();
        let stride = if dims == 1 { 1 } else { 3 };
        let mut comps = vec![0.0; n * stride];
        let h: Vec<f64> = (0..dims).map(|a| g.spacing(a)).collect();
        for flat in 0..n {
            if !g.is_interior(flat) {
                continue;
            }
            let c = self.values[flat];
            for axis in 0..dims {
                let p = g.neighbor(flat, axis, 1).expect("interior node");
                let m = g.neighbor(flat, axis, -1).expect("interior node");
                let d2 = (self.values[p] + self.values[m] - 2.0 * c) / (h[axis] * h[axis]);
                let slot = if axis == 0 { 0 } else { 2 };
                comps[flat * stride + slot] = d2;
            }
            if dims == 2 {
                let pp = g
                    .neighbor(flat, 0, 1)
                    .and_then(|k| g.neighbor(k, 1, 1))
                    .expect("interior node");
                let pm = g
                    .neighbor(flat, 0, 1)
                    .and_then(|k| g.neighbor(k, 1, -1))
                    .expect("interior node");
                let mp = g
                    .neighbor(flat, 0, -1)
                    .and_then(|k| g.neighbor(k, 1, 1))
                    .expect("interior node");
                let mm = g
                    .neighbor(flat, 0, -1)
                    .and_then(|k| g.neighbor(k, 1, -1))
                    .expect("interior node");
                comps[flat * stride + 1] = (self.values[pp] - self.values[pm] - self.values[mp]
                    + self.values[mm])
                    / (4.0 * h[0] * h[1]);
            }
        }
        HessianField { grid: g.clone(), stride, comps }
    }

    /// CSV layout: header `x[,y],value`, row-major nodes, 17 significant
    /// digits.
    pub fn to_csv(&self) -> String {
        let g = &self.grid;
        let mut s = String::new();
        if g.dims() == 1 {
            s.push_str("x,value\n");
            for (i, v) in self.values.iter().enumerate() {
                let _ = writeln!(s, "{:.16e},{:.16e}", g.coord(0, i), v);
            }
        } else {
            s.push_str("x,y,value\n");
            for i in 0..g.points(0) {
                for j in 0..g.points(1) {
                    let _ = writeln!(
                        s,
                        "{:.16e},{:.16e},{:.16e}",
                        g.coord(0, i),
                        g.coord(1, j),
                        self.values[g.idx2(i, j)]
                    );
                }
            }
        }
        s
    }
}

/// Symmetric second-derivative matrix per node: `[xx]` in 1-d, `[xx, xy, yy]`
/// in 2-d.
#[derive(Debug, Clone, PartialEq)]
pub struct HessianField {
    grid: Grid,
    stride: usize,
    comps: Vec<f64>,
}

impl HessianField {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn dims(&self) -> usize {
        self.grid.dims()
    }

    /// Entries at a node as (xx, xy, yy); (xx, 0, 0) in 1-d.
    pub fn entry(&self, flat: usize) -> (f64, f64, f64) {
        if self.stride == 1 {
            (self.comps[flat], 0.0, 0.0)
        } else {
            (
                self.comps[flat * 3],
                self.comps[flat * 3 + 1],
                self.comps[flat * 3 + 2],
            )
        }
    }
}

/// Periodic distance from `coords` to `center` (shortest image per axis).
pub fn periodic_distance(grid: &Grid, coords: &[f64], center: &[f64]) -> f64 {
    let mut acc = 0.0;
    for axis in 0..grid.dims() {
        let l = grid.length(axis);
        let mut d = (coords[axis] - center[axis]).abs();
        if grid.boundary(axis) == BoundaryKind::Periodic {
            d = d.min(l - d);
        }
        acc += d * d;
    }
    acc.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    const TAU: f64 = std::f64::consts::TAU;

    #[test]
    fn make_grid_examples() {
        let c = Grid::circle(16, 1.0).unwrap();
        assert_eq!(c.node_count(), 16);
        assert_eq!(c.spacing(0), 1.0 / 16.0);

        let t = Grid::torus(32, 32, 1.0, 1.0).unwrap();
        assert_eq!(t.node_count(), 1024);

        let s = Grid::strip(32, 16, 1.0, 2.0).unwrap();
        // Two boundary rows on the Dirichlet axis.
        let boundary_rows = (0..s.node_count()).filter(|&f| !s.is_interior(f)).count();
        assert_eq!(boundary_rows, 2 * 32);
        assert!((s.coord(1, 15) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn make_grid_rejects_bad_input() {
        assert!(Grid::circle(4, 1.0).is_err());
        assert!(Grid::circle(16, 0.0).is_err());
        assert!(Grid::circle(16, -1.0).is_err());
        assert!(Grid::new(&[16, 16, 16], &[1.0; 3], &[BoundaryKind::Periodic; 3]).is_err());
    }

    #[test]
    fn field_rejects_nan_and_shape() {
        let g = Grid::circle(16, 1.0).unwrap();
        assert!(ScalarField::new(g.clone(), vec![0.0; 15]).is_err());
        let mut v = vec![0.0; 16];
        v[3] = f64::NAN;
        assert!(ScalarField::new(g, v).is_err());
    }

    #[test]
    fn laplacian_of_constant_is_zero() {
        let g = Grid::torus(16, 16, 1.0, 1.0).unwrap();
        let f = ScalarField::constant(g, 5.0).unwrap();
        assert_eq!(f.laplacian().sup_norm(), 0.0);
        assert_eq!(f.gradient_sq().sup_norm(), 0.0);
    }

    #[test]
    fn laplacian_cosine_eigenfunction() {
        let g = Grid::circle(256, 1.0).unwrap();
        let f = ScalarField::from_fn(g, |x| (TAU * x[0]).cos()).unwrap();
        let lap = f.laplacian();
        let mut err = 0.0f64;
        for (flat, v) in lap.values().iter().enumerate() {
            let x = lap.grid().coord(0, flat);
            err = err.max((v - (-4.0 * std::f64::consts::PI.powi(2) * (TAU * x).cos())).abs());
        }
        assert!(err < 1e-2, "sup error {err}");
    }

    #[test]
    fn laplacian_matches_reference_stencil() {
        // Independent loop-free reference on a small torus.
        let g = Grid::torus(16, 16, 1.0, 2.0).unwrap();
        let f = ScalarField::from_fn(g.clone(), |x| {
            (TAU * x[0]).sin() * (0.5 * TAU * x[1]).cos() + 0.3 * (TAU * x[0] * 2.0).cos()
        })
        .unwrap();
        let lap = f.laplacian();
        let (nx, ny) = (16usize, 16usize);
        let (hx, hy) = (g.spacing(0), g.spacing(1));
        let v = f.values();
        let mut err = 0.0f64;
        for i in 0..nx {
            for j in 0..ny {
                let c = v[i * ny + j];
                let e = v[((i + 1) % nx) * ny + j];
                let w = v[((i + nx - 1) % nx) * ny + j];
                let n = v[i * ny + (j + 1) % ny];
                let s = v[i * ny + (j + ny - 1) % ny];
                let reference = (e + w - 2.0 * c) / (hx * hx) + (n + s - 2.0 * c) / (hy * hy);
                err = err.max((lap.values()[i * ny + j] - reference).abs());
            }
        }
        assert!(err < 1e-14, "duplicate-implementation gap {err}");
    }

    #[test]
    fn gradient_sq_analytic() {
        let g = Grid::circle(256, 1.0).unwrap();
        let f = ScalarField::from_fn(g, |x| (TAU * x[0]).sin()).unwrap();
        let gs = f.gradient_sq();
        let mut err = 0.0f64;
        for (flat, v) in gs.values().iter().enumerate() {
            let x = gs.grid().coord(0, flat);
            let exact = 2.0 * std::f64::consts::PI.powi(2) * (TAU * x).cos().powi(2);
            err = err.max((v - exact).abs());
        }
        assert!(err < 1e-2, "sup error {err}");
    }

    #[test]
    fn gradient_sq_matches_reference_stencil() {
        let g = Grid::circle(64, 1.0).unwrap();
        let f = ScalarField::from_fn(g.clone(), |x| (TAU * x[0]).sin() + 0.2 * (2.0 * TAU * x[0]).cos())
            .unwrap();
        let gs = f.gradient_sq();
        let h = g.spacing(0);
        let v = f.values();
        let mut err = 0.0f64;
        for i in 0..64 {
            let d = (v[(i + 1) % 64] - v[(i + 63) % 64]) / (2.0 * h);
            err = err.max((gs.values()[i] - 0.5 * d * d).abs());
        }
        assert!(err < 1e-14);
    }

    #[test]
    fn hessian_quadratic_exactness() {
        let g = Grid::new(
            &[32, 32],
            &[1.0, 1.0],
            &[BoundaryKind::Dirichlet, BoundaryKind::Dirichlet],
        )
        .unwrap();
        let fx2 = ScalarField::from_fn(g.clone(), |x| x[0] * x[0]).unwrap();
        let h = fx2.hessian();
        for flat in 0..g.node_count() {
            if !g.is_interior(flat) {
                continue;
            }
            let (xx, xy, yy) = h.entry(flat);
            assert!((xx - 2.0).abs() < 1e-12);
            assert!(xy.abs() < 1e-12);
            assert!(yy.abs() < 1e-12);
        }
        let fxy = ScalarField::from_fn(g.clone(), |x| x[0] * x[1]).unwrap();
        let h = fxy.hessian();
        for flat in 0..g.node_count() {
            if !g.is_interior(flat) {
                continue;
            }
            let (xx, xy, yy) = h.entry(flat);
            assert!(xx.abs() < 1e-12);
            assert!((xy - 1.0).abs() < 1e-12);
            assert!(yy.abs() < 1e-12);
        }
    }

    #[test]
    fn hessian_analytic_cosine_product() {
        // The 4-point cross stencil needs 256^2 to bring the mixed entry
        // under 1e-2 on cos(2πx)cos(2πy).
        let g = Grid::torus(256, 256, 1.0, 1.0).unwrap();
        let f = ScalarField::from_fn(g.clone(), |x| (TAU * x[0]).cos() * (TAU * x[1]).cos()).unwrap();
        let h = f.hessian();
        let p2 = std::f64::consts::PI.powi(2);
        let mut err = 0.0f64;
        for flat in 0..g.node_count() {
            let mi = g.unflatten(flat);
            let (x, y) = (g.coord(0, mi[0]), g.coord(1, mi[1]));
            let (cc, ss) = ((TAU * x).cos() * (TAU * y).cos(), (TAU * x).sin() * (TAU * y).sin());
            let (xx, xy, yy) = h.entry(flat);
            err = err.max((xx + 4.0 * p2 * cc).abs());
            err = err.max((yy + 4.0 * p2 * cc).abs());
            err = err.max((xy - 4.0 * p2 * ss).abs());
        }
        assert!(err < 1e-2, "sup error {err}");
    }

    #[test]
    fn quadratic_exactness_of_all_operators() {
        let g = Grid::new(
            &[24, 24],
            &[1.0, 1.5],
            &[BoundaryKind::Dirichlet, BoundaryKind::Dirichlet],
        )
        .unwrap();
        let f = ScalarField::from_fn(g.clone(), |x| {
            1.0 + 0.5 * x[0] - 0.25 * x[1] + 0.75 * x[0] * x[0] + 0.3 * x[0] * x[1]
                - 0.2 * x[1] * x[1]
        })
        .unwrap();
        let lap = f.laplacian();
        let gs = f.gradient_sq();
        let hs = f.hessian();
        for flat in 0..g.node_count() {
            if !g.is_interior(flat) {
                continue;
            }
            let mi = g.unflatten(flat);
            let (x, y) = (g.coord(0, mi[0]), g.coord(1, mi[1]));
            assert!((lap.values()[flat] - (2.0 * 0.75 + 2.0 * (-0.2))).abs() < 1e-12);
            let dx = 0.5 + 1.5 * x + 0.3 * y;
            let dy = -0.25 + 0.3 * x - 0.4 * y;
            assert!((gs.values()[flat] - 0.5 * (dx * dx + dy * dy)).abs() < 1e-12);
            let (xx, xy, yy) = hs.entry(flat);
            assert!((xx - 1.5).abs() < 1e-12);
            assert!((xy - 0.3).abs() < 1e-12);
            assert!((yy + 0.4).abs() < 1e-12);
        }
    }

    #[test]
    fn discrete_integration_by_parts_periodic() {
        let g = Grid::torus(24, 16, 1.0, 1.0).unwrap();
        let f = ScalarField::from_fn(g.clone(), |x| (TAU * x[0]).sin() + (2.0 * TAU * x[1]).cos()).unwrap();
        let w = ScalarField::from_fn(g.clone(), |x| (TAU * (x[0] + 2.0 * x[1])).cos()).unwrap();
        let lhs: f64 = f
            .values()
            .iter()
            .zip(w.laplacian().values())
            .map(|(a, b)| a * b)
            .sum::<f64>()
            * g.cell_volume();
        let rhs: f64 = w
            .values()
            .iter()
            .zip(f.laplacian().values())
            .map(|(a, b)| a * b)
            .sum::<f64>()
            * g.cell_volume();
        assert!((lhs - rhs).abs() < 1e-12, "ibp defect {}", (lhs - rhs).abs());
    }

    #[test]
    fn laplacian_refinement_order() {
        let sup_err = |n: usize| {
            let g = Grid::circle(n, 1.0).unwrap();
            let f = ScalarField::from_fn(g, |x| (TAU * x[0]).cos()).unwrap();
            let lap = f.laplacian();
            let mut err = 0.0f64;
            for (flat, v) in lap.values().iter().enumerate() {
                let x = lap.grid().coord(0, flat);
                err = err.max((v + 4.0 * std::f64::consts::PI.powi(2) * (TAU * x).cos()).abs());
            }
            err
        };
        let ratio = sup_err(64) / sup_err(128);
        assert!((3.2..=4.8).contains(&ratio), "refinement ratio {ratio}");
    }

    #[test]
    fn csv_layout() {
        let g = Grid::circle(8, 1.0).unwrap();
        // relax the >=8 rule is not needed: 8 nodes is allowed
        let f = ScalarField::from_fn(g, |x| x[0]).unwrap();
        let csv = f.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "x,value");
        let first = lines.next().unwrap();
        assert!(first.starts_with("0.0000000000000000e0,"));
        assert_eq!(csv.lines().count(), 9);
    }
}
