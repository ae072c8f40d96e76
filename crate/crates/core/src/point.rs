use std::hash::{Hash, Hasher};

use indexmap::IndexSet;

use crate::error::{GifsError, Result};

/// A point of R^d.
///
/// Negative zero is normalised to positive zero on construction so that
/// bit-level equality agrees with numeric equality.
#[derive(Debug, Clone, PartialOrd)]
pub struct Point(Vec<f64>);

impl Point {
    /// Builds a point, rejecting NaN and infinite coordinates.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(GifsError::NonFinite);
        }
        Ok(Self::from_raw(coords))
    }

    /// Builds a point without the finiteness check.
    pub(crate) fn from_raw(mut coords: Vec<f64>) -> Self {
        for c in coords.iter_mut() {
            *c += 0.0;
        }
        Point(coords)
    }

    pub fn zeros(dim: usize) -> Self {
        Point(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    pub fn dist_sq(&self, other: &Point) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b) * (a - b))
            .sum()
    }

    pub fn dist(&self, other: &Point) -> f64 {
        self.dist_sq(other).sqrt()
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|c| c * c).sum::<f64>().sqrt()
    }
}

impl From<&[f64]> for Point {
    fn from(c: &[f64]) -> Self {
        Point::from_raw(c.to_vec())
    }
}

impl<const D: usize> From<[f64; D]> for Point {
    fn from(c: [f64; D]) -> Self {
        Point::from_raw(c.to_vec())
    }
}

impl PartialEq for Point {
    fn eq(&self, other: &Self) -> bool {
        self.0.len() == other.0.len()
            && self
                .0
                .iter()
                .zip(&other.0)
                .all(|(a, b)| a.to_bits() == b.to_bits())
    }
}

impl Eq for Point {}

impl Hash for Point {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.len().hash(state);
        for c in &self.0 {
            c.to_bits().hash(state);
        }
    }
}

/// Finite, duplicate-free set of points of a common dimension.
///
/// Insertion order is kept (first occurrence wins), which keeps every
/// downstream computation reproducible.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    dim: usize,
    points: IndexSet<Point>,
}

impl PointCloud {
    pub fn new(dim: usize) -> Self {
        PointCloud {
            dim,
            points: IndexSet::new(),
        }
    }

    pub fn singleton(p: Point) -> Self {
        let mut c = PointCloud::new(p.dim());
        c.points.insert(p);
        c
    }

    /// Collects points, collapsing exact duplicates. Fails on mixed dimensions
    /// or an empty iterator.
    pub fn from_points<I: IntoIterator<Item = Point>>(points: I) -> Result<Self> {
        let mut iter = points.into_iter();
        let first = iter.next().ok_or(GifsError::EmptyCloud)?;
        let mut cloud = PointCloud::singleton(first);
        for p in iter {
            cloud.insert(p)?;
        }
        Ok(cloud)
    }

    pub(crate) fn from_points_unchecked(dim: usize, points: impl IntoIterator<Item = Point>) -> Self {
        PointCloud {
            dim,
            points: points.into_iter().collect(),
        }
    }

    /// Inserts a point; returns whether it was new.
    pub fn insert(&mut self, p: Point) -> Result<bool> {
        if p.dim() != self.dim {
            return Err(GifsError::Dimension {
                expected: self.dim,
                got: p.dim(),
            });
        }
        Ok(self.points.insert(p))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.points.contains(p)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Point> {
        self.points.iter()
    }

    pub fn as_slice(&self) -> &indexmap::set::Slice<Point> {
        self.points.as_slice()
    }

    pub fn get(&self, i: usize) -> Option<&Point> {
        self.points.get_index(i)
    }

    pub fn is_subset(&self, other: &PointCloud) -> bool {
        self.points.iter().all(|p| other.points.contains(p))
    }

    /// Set union, keeping `self`'s order followed by new points of `other`.
    pub fn union(&self, other: &PointCloud) -> Result<PointCloud> {
        let mut out = self.clone();
        for p in other.iter() {
            out.insert(p.clone())?;
        }
        Ok(out)
    }

    /// Per-axis (min, max) over all points; `None` when empty.
    pub fn bounding_box(&self) -> Option<Vec<(f64, f64)>> {
        let mut it = self.points.iter();
        let first = it.next()?;
        let mut bb: Vec<(f64, f64)> = first.coords().iter().map(|&c| (c, c)).collect();
        for p in it {
            for (b, &c) in bb.iter_mut().zip(p.coords()) {
                b.0 = b.0.min(c);
                b.1 = b.1.max(c);
            }
        }
        Some(bb)
    }

    pub(crate) fn require_nonempty(&self) -> Result<()> {
        if self.is_empty() {
            Err(GifsError::EmptyCloud)
        } else {
            Ok(())
        }
    }

    pub fn into_points(self) -> Vec<Point> {
        self.points.into_iter().collect()
    }
}

impl<'a> IntoIterator for &'a PointCloud {
    type Item = &'a Point;
    type IntoIter = indexmap::set::Iter<'a, Point>;

    fn into_iter(self) -> Self::IntoIter {
        self.points.iter()
    }
}
