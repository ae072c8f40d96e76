//! Hausdorff-Pompeiu distance between finite point clouds.
//!
//! Nearest-neighbour queries run against a copy of the target sorted along
//! the first axis: the scan moves outward from the query's insertion point
//! and stops once the axis gap alone exceeds the best distance found. A query
//! also stops as soon as it cannot raise the running maximum of its chunk.
//! Both cut-offs leave the result bit-identical to the all-pairs definition.

use crate::error::{GifsError, Result};
use crate::exec::Execution;
use crate::point::{Point, PointCloud};

const CHUNK: usize = 4096;

/// `max(h(A, B), h(B, A))` with `h(A, B) = max_a min_b |a - b|`.
pub fn hausdorff_distance(a: &PointCloud, b: &PointCloud) -> Result<f64> {
    hausdorff_distance_with(a, b, Execution::default())
}

pub fn hausdorff_distance_with(a: &PointCloud, b: &PointCloud, exec: Execution) -> Result<f64> {
    let ab = directed_hausdorff_with(a, b, exec)?;
    let ba = directed_hausdorff_with(b, a, exec)?;
    Ok(ab.max(ba))
}

/// `max_{a in A} min_{b in B} |a - b|`.
pub fn directed_hausdorff(a: &PointCloud, b: &PointCloud) -> Result<f64> {
    directed_hausdorff_with(a, b, Execution::default())
}

pub fn directed_hausdorff_with(a: &PointCloud, b: &PointCloud, exec: Execution) -> Result<f64> {
    a.require_nonempty()?;
    b.require_nonempty()?;
    if a.dim() != b.dim() {
        return Err(GifsError::Dimension {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    let index = SweepIndex::new(b);
    let queries: Vec<&Point> = a.iter().collect();
    let chunks: Vec<&[&Point]> = queries.chunks(CHUNK).collect();
    let max_sq = exec.max_over(&chunks, |chunk| {
        let mut cmax = 0.0f64;
        for q in chunk.iter() {
            let d = index.nearest_sq(q, cmax);
            if d > cmax {
                cmax = d;
            }
        }
        cmax
    });
    Ok(max_sq.sqrt())
}

/// Distance from `p` to the nearest point of `cloud`.
pub fn distance_to_cloud(p: &Point, cloud: &PointCloud) -> Result<f64> {
    cloud.require_nonempty()?;
    Ok(SweepIndex::new(cloud).nearest_sq(p, 0.0).sqrt())
}

/// Sorted-by-first-axis copy of a cloud for nearest-neighbour queries.
pub struct SweepIndex<'a> {
    keys: Vec<f64>,
    points: Vec<&'a Point>,
}

impl<'a> SweepIndex<'a> {
    pub fn new(cloud: &'a PointCloud) -> Self {
        let mut points: Vec<&Point> = cloud.iter().collect();
        points.sort_by(|x, y| x.coords()[0].total_cmp(&y.coords()[0]));
        let keys = points.iter().map(|p| p.coords()[0]).collect();
        SweepIndex { keys, points }
    }

    /// Squared nearest distance from `q`, except that the scan may stop early
    /// (returning something `<= floor`) once the answer is known to be
    /// `<= floor`.
    pub fn nearest_sq(&self, q: &Point, floor: f64) -> f64 {
        let x = q.coords()[0];
        let pos = self.keys.partition_point(|&k| k < x);
        let mut best = f64::INFINITY;
        let (mut lo, mut hi) = (pos, pos);
        let mut left_open = lo > 0;
        let mut right_open = hi < self.points.len();
        while left_open || right_open {
            if right_open {
                let gap = self.keys[hi] - x;
                if gap * gap >= best {
                    right_open = false;
                } else {
                    best = best.min(q.dist_sq(self.points[hi]));
                    hi += 1;
                    right_open = hi < self.points.len();
                }
            }
            if left_open {
                let gap = x - self.keys[lo - 1];
                if gap * gap >= best {
                    left_open = false;
                } else {
                    best = best.min(q.dist_sq(self.points[lo - 1]));
                    lo -= 1;
                    left_open = lo > 0;
                }
            }
            if best <= floor {
                break;
            }
        }
        best
    }
}
