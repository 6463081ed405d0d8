//! Uniform tensor-product grids and cell-centered scalar fields.

use crate::error::{Error, Result};
use crate::scalar::{cst, cst_usize, Real};

/// Uniform cell-centered grid on a box in 1, 2 or 3 dimensions.
///
/// Cells are indexed per axis; the linear index runs with the x index
/// fastest: `idx = ix + nx*(iy + ny*iz)`. Unused axes have one cell and
/// unit extent so that cell volume is always the product of spacings over
/// the active axes.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid<R: Real> {
    dim: usize,
    n: [usize; 3],
    h: [R; 3],
    origin: [R; 3],
}

impl<R: Real> Grid<R> {
    /// Grid with `n[d]` cells and extent `extent[d]` per active axis.
    ///
    /// Requires 1 <= dim <= 3, n >= 2 and extent > 0 on every active axis.
    pub fn new(dim: usize, n: &[usize], extent: &[R], origin: &[R]) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::InvalidParam(format!("dim must be 1, 2 or 3, got {dim}")));
        }
        if n.len() != dim || extent.len() != dim || origin.len() != dim {
            return Err(Error::InvalidParam(
                "n, extent and origin must each have one entry per axis".into(),
            ));
        }
        let mut nn = [1usize; 3];
        let mut hh = [R::one(); 3];
        let mut oo = [R::zero(); 3];
        for d in 0..dim {
            if n[d] < 2 {
                return Err(Error::InvalidParam(format!("n must be >= 2 per axis, got {}", n[d])));
            }
            if !(extent[d] > R::zero()) {
                return Err(Error::InvalidParam("extent must be positive".into()));
            }
            nn[d] = n[d];
            hh[d] = extent[d] / cst_usize(n[d]);
            oo[d] = origin[d];
        }
        Ok(Grid { dim, n: nn, h: hh, origin: oo })
    }

    /// Unit box [0,1]^dim with n cells per axis.
    pub fn unit_box(dim: usize, n: usize) -> Result<Self> {
        let ns = vec![n; dim];
        let ex = vec![R::one(); dim];
        let or = vec![R::zero(); dim];
        Grid::new(dim, &ns, &ex, &or)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Cells along axis d (1 for inactive axes).
    pub fn n(&self, d: usize) -> usize {
        self.n[d]
    }

    /// Spacing along axis d.
    pub fn h(&self, d: usize) -> R {
        self.h[d]
    }

    /// Extent along axis d.
    pub fn extent(&self, d: usize) -> R {
        self.h[d] * cst_usize(self.n[d])
    }

    pub fn origin(&self, d: usize) -> R {
        self.origin[d]
    }

    /// Total number of cells.
    pub fn len(&self) -> usize {
        self.n[0] * self.n[1] * self.n[2]
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Cell volume h_x * h_y * h_z over the active axes.
    pub fn cell_volume(&self) -> R {
        let mut v = R::one();
        for d in 0..self.dim {
            v *= self.h[d];
        }
        v
    }

    /// Linear-index stride of axis d.
    pub fn stride(&self, d: usize) -> usize {
        match d {
            0 => 1,
            1 => self.n[0],
            _ => self.n[0] * self.n[1],
        }
    }

    /// Coordinate of the cell center along axis d for per-axis index i.
    pub fn center(&self, d: usize, i: usize) -> R {
        self.origin[d] + self.h[d] * (cst_usize::<R>(i) + cst(0.5))
    }

    /// Per-axis indices of a linear index.
    pub fn unravel(&self, idx: usize) -> [usize; 3] {
        let ix = idx % self.n[0];
        let iy = (idx / self.n[0]) % self.n[1];
        let iz = idx / (self.n[0] * self.n[1]);
        [ix, iy, iz]
    }

    /// Smallest spacing over the active axes.
    pub fn h_min(&self) -> R {
        let mut h = self.h[0];
        for d in 1..self.dim {
            h = h.min(self.h[d]);
        }
        h
    }
}

/// Scalar field with one value per cell center.
#[derive(Debug, Clone, PartialEq)]
pub struct Field<R: Real> {
    grid: Grid<R>,
    values: Vec<R>,
}

impl<R: Real> Field<R> {
    /// Field filled with a constant.
    pub fn constant(grid: &Grid<R>, value: R) -> Self {
        Field { grid: grid.clone(), values: vec![value; grid.len()] }
    }

    pub fn zeros(grid: &Grid<R>) -> Self {
        Field::constant(grid, R::zero())
    }

    /// Field from a function of the cell-center coordinates (x, y, z);
    /// inactive coordinates are passed as zero.
    pub fn from_fn(grid: &Grid<R>, f: impl Fn(R, R, R) -> R) -> Self {
        let mut values = Vec::with_capacity(grid.len());
        for idx in 0..grid.len() {
            let [ix, iy, iz] = grid.unravel(idx);
            let x = grid.center(0, ix);
            let y = if grid.dim() > 1 { grid.center(1, iy) } else { R::zero() };
            let z = if grid.dim() > 2 { grid.center(2, iz) } else { R::zero() };
            values.push(f(x, y, z));
        }
        Field { grid: grid.clone(), values }
    }

    /// Field from raw values; length must match the grid.
    pub fn from_values(grid: &Grid<R>, values: Vec<R>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidParam(format!(
                "field needs {} values, got {}",
                grid.len(),
                values.len()
            )));
        }
        Ok(Field { grid: grid.clone(), values })
    }

    pub fn grid(&self) -> &Grid<R> {
        &self.grid
    }

    pub fn values(&self) -> &[R] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [R] {
        &mut self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn min(&self) -> R {
        self.values.iter().copied().fold(R::infinity(), R::min)
    }

    pub fn max(&self) -> R {
        self.values.iter().copied().fold(R::neg_infinity(), R::max)
    }

    pub fn all_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// Largest absolute difference against another field on the same grid.
    pub fn max_abs_diff(&self, other: &Field<R>) -> Result<R> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .fold(R::zero(), |m, (a, b)| m.max((*a - *b).abs())))
    }

    /// self + c * other, elementwise.
    pub fn axpy(&mut self, c: R, other: &Field<R>) {
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += c * *b;
        }
    }

    pub fn scale(&mut self, c: R) {
        for a in self.values.iter_mut() {
            *a *= c;
        }
    }

    /// Elementwise map into a new field.
    pub fn map(&self, f: impl Fn(R) -> R) -> Field<R> {
        Field {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| f(*v)).collect(),
        }
    }
}
