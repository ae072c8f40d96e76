use indexmap::map::Entry;
use indexmap::IndexMap;
use rustc_hash::FxBuildHasher;

use crate::point::{Point, PointCloud};

/// Uniform grid keeping the first point that lands in each cell.
#[derive(Debug, Clone)]
pub(crate) struct Grid {
    resolution: f64,
    dim: usize,
    cells: IndexMap<Vec<i64>, Point, FxBuildHasher>,
    key: Vec<i64>,
}

impl Grid {
    pub(crate) fn new(dim: usize, resolution: f64) -> Self {
        Grid {
            resolution,
            dim,
            cells: IndexMap::default(),
            key: Vec::with_capacity(dim),
        }
    }

    fn fill_key(&mut self, coords: &[f64]) {
        // `as` saturates, which is fine for cells far outside any sane range.
        self.key.clear();
        self.key
            .extend(coords.iter().map(|c| (c / self.resolution).floor() as i64));
    }

    pub(crate) fn insert(&mut self, p: Point) {
        self.fill_key(p.coords());
        if !self.cells.contains_key(self.key.as_slice()) {
            self.cells.insert(self.key.clone(), p);
        }
    }

    /// Inserts raw coordinates, building the point only for a new cell.
    pub(crate) fn insert_raw(&mut self, coords: &[f64]) {
        self.fill_key(coords);
        if !self.cells.contains_key(self.key.as_slice()) {
            self.cells
                .insert(self.key.clone(), Point::from_raw(coords.to_vec()));
        }
    }

    /// Absorbs `later`, whose points count as encountered after ours.
    pub(crate) fn merge(&mut self, later: Grid) {
        for (k, p) in later.cells {
            if let Entry::Vacant(v) = self.cells.entry(k) {
                v.insert(p);
            }
        }
    }

    pub(crate) fn into_cloud(self) -> PointCloud {
        PointCloud::from_points_unchecked(self.dim, self.cells.into_values())
    }
}
