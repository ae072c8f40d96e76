//! The set operator `F(K_1..K_m) = f_1(K_1 x .. x K_m) ∪ .. ∪ f_n(K_1 x .. x K_m)`.

use std::ops::Range;

use crate::budget::Budget;
use crate::error::{GifsError, Result};
use crate::exec::Execution;
use crate::grid::Grid;
use crate::point::{Point, PointCloud};
use crate::system::GifsSystem;

const CHUNK: usize = 1 << 15;

/// Applies the Hutchinson operator to `m` clouds.
pub fn hutchinson(g: &GifsSystem, clouds: &[&PointCloud]) -> Result<PointCloud> {
    hutchinson_with(g, clouds, Execution::default(), Budget::points())
}

/// `F(K, .., K)`: the operator restricted to equal arguments.
pub fn simplified_hutchinson(g: &GifsSystem, cloud: &PointCloud) -> Result<PointCloud> {
    simplified_hutchinson_with(g, cloud, Execution::default(), Budget::points())
}

pub fn simplified_hutchinson_with(
    g: &GifsSystem,
    cloud: &PointCloud,
    exec: Execution,
    budget: Budget,
) -> Result<PointCloud> {
    let clouds = vec![cloud; g.order()];
    hutchinson_with(g, &clouds, exec, budget)
}

pub fn hutchinson_with(
    g: &GifsSystem,
    clouds: &[&PointCloud],
    exec: Execution,
    budget: Budget,
) -> Result<PointCloud> {
    let product = Product::new(g, clouds)?;
    budget.check(product.total)?;
    let total = product.total.unwrap() as usize;
    let chunks = chunk_ranges(total);
    let parts = exec.map_slice(&chunks, |r| {
        r.clone().map(|t| product.image(g, t)).collect::<Vec<Point>>()
    });
    Ok(PointCloud::from_points_unchecked(
        g.dim(),
        parts.into_iter().flatten(),
    ))
}

/// Hutchinson operator followed by grid decimation, without materialising
/// the full image. Equal to `decimate(hutchinson(..), resolution)`.
pub fn hutchinson_decimated(
    g: &GifsSystem,
    clouds: &[&PointCloud],
    resolution: f64,
    exec: Execution,
    budget: Budget,
) -> Result<PointCloud> {
    if resolution <= 0.0 || !resolution.is_finite() {
        return Err(GifsError::config("decimation", "resolution must be positive"));
    }
    let product = Product::new(g, clouds)?;
    budget.check(product.total)?;
    let total = product.total.unwrap() as usize;
    let chunks = chunk_ranges(total);
    let grids = exec.map_slice(&chunks, |r| {
        let mut grid = Grid::new(g.dim(), resolution);
        let mut buf = vec![0.0; g.dim()];
        for t in r.clone() {
            product.image_into(g, t, &mut buf);
            grid.insert_raw(&buf);
        }
        grid
    });
    let mut iter = grids.into_iter();
    let mut acc = iter.next().unwrap_or_else(|| Grid::new(g.dim(), resolution));
    for grid in iter {
        acc.merge(grid);
    }
    Ok(acc.into_cloud())
}

fn chunk_ranges(total: usize) -> Vec<Range<usize>> {
    (0..total)
        .step_by(CHUNK)
        .map(|s| s..(s + CHUNK).min(total))
        .collect()
}

/// Mixed-radix view of `{1..n} x K_1 x .. x K_m`: map index slowest, then
/// `K_1`, ..., `K_m` fastest.
struct Product<'a> {
    clouds: Vec<&'a indexmap::set::Slice<Point>>,
    per_map: usize,
    total: Option<u128>,
}

impl<'a> Product<'a> {
    fn new(g: &GifsSystem, clouds: &[&'a PointCloud]) -> Result<Self> {
        if clouds.len() != g.order() {
            return Err(GifsError::Arity {
                expected: g.order(),
                got: clouds.len(),
            });
        }
        for c in clouds {
            c.require_nonempty()?;
            if c.dim() != g.dim() {
                return Err(GifsError::Dimension {
                    expected: g.dim(),
                    got: c.dim(),
                });
            }
        }
        let per_map = clouds
            .iter()
            .try_fold(1u128, |acc, c| acc.checked_mul(c.len() as u128));
        let total = per_map.and_then(|p| p.checked_mul(g.len() as u128));
        let total = total.filter(|&t| t <= usize::MAX as u128);
        Ok(Product {
            clouds: clouds.iter().map(|c| c.as_slice()).collect(),
            per_map: per_map.unwrap_or(0).min(usize::MAX as u128) as usize,
            total,
        })
    }

    fn args(&self, t: usize) -> (usize, Vec<&'a Point>) {
        let map = t / self.per_map;
        let mut rest = t % self.per_map;
        let mut args: Vec<&Point> = vec![&self.clouds[0][0]; self.clouds.len()];
        for (slot, cloud) in args.iter_mut().zip(&self.clouds).rev() {
            *slot = &cloud[rest % cloud.len()];
            rest /= cloud.len();
        }
        (map, args)
    }

    fn image(&self, g: &GifsSystem, t: usize) -> Point {
        let (map, args) = self.args(t);
        g.eval_unchecked(map, &args)
    }

    /// Coordinates of [`Self::image`] without allocating for affine maps.
    fn image_into(&self, g: &GifsSystem, t: usize, out: &mut [f64]) {
        match g.map(t / self.per_map).as_affine() {
            Some(f) => {
                let mut rest = t % self.per_map;
                let m = self.clouds.len();
                let mut idx = [0usize; 8];
                if m <= idx.len() {
                    for (slot, cloud) in idx[..m].iter_mut().zip(&self.clouds).rev() {
                        *slot = rest % cloud.len();
                        rest /= cloud.len();
                    }
                    let args = idx[..m].iter().zip(&self.clouds).map(|(&i, c)| c[i].coords());
                    f.apply_raw_into(args, out);
                    return;
                }
                let (_, args) = self.args(t);
                f.apply_raw_into(args.iter().map(|p| p.coords()), out);
            }
            None => out.copy_from_slice(self.image(g, t).coords()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::{AffineMap, Matrix};

    fn sys() -> GifsSystem {
        GifsSystem::affine(vec![
            AffineMap::new(
                vec![Matrix::diagonal(&[0.3, 0.2]), Matrix::diagonal(&[0.1, 0.4])],
                vec![0.0, 1.0],
            )
            .unwrap(),
            AffineMap::new(
                vec![Matrix::diagonal(&[0.2, 0.1]), Matrix::diagonal(&[0.25, 0.1])],
                vec![1.0, 0.0],
            )
            .unwrap(),
        ])
        .unwrap()
    }

    #[test]
    fn singletons_give_one_point_per_map() {
        let g = sys();
        let a = PointCloud::singleton(Point::from([1.0, 2.0]));
        let b = PointCloud::singleton(Point::from([-1.0, 0.5]));
        let out = hutchinson(&g, &[&a, &b]).unwrap();
        let expected = PointCloud::from_points(
            (0..2).map(|i| g.eval_map(i, &[Point::from([1.0, 2.0]), Point::from([-1.0, 0.5])]).unwrap()),
        )
        .unwrap();
        assert_eq!(out, expected);
    }

    #[test]
    fn matches_direct_double_loop() {
        let g = sys();
        let k1 = PointCloud::from_points([Point::from([0.0, 0.0]), Point::from([1.0, 1.0])]).unwrap();
        let k2 = PointCloud::from_points([Point::from([2.0, 0.0]), Point::from([0.0, 3.0])]).unwrap();
        let out = hutchinson(&g, &[&k1, &k2]).unwrap();
        let mut direct = Vec::new();
        for i in 0..2 {
            for x in &k1 {
                for y in &k2 {
                    direct.push(g.eval_map(i, &[x.clone(), y.clone()]).unwrap());
                }
            }
        }
        assert!(out.len() <= 8);
        assert_eq!(out, PointCloud::from_points(direct).unwrap());
    }

    #[test]
    fn empty_and_arity_errors() {
        let g = sys();
        let a = PointCloud::singleton(Point::from([0.0, 0.0]));
        let empty = PointCloud::new(2);
        assert!(matches!(hutchinson(&g, &[&a, &empty]), Err(GifsError::EmptyCloud)));
        assert!(matches!(hutchinson(&g, &[&a]), Err(GifsError::Arity { .. })));
        assert!(simplified_hutchinson(&g, &empty).is_err());
    }

    #[test]
    fn budget_is_enforced() {
        let g = sys();
        let a = PointCloud::from_points((0..10).map(|i| Point::from([i as f64, 0.0]))).unwrap();
        let r = hutchinson_with(&g, &[&a, &a], Execution::Sequential, Budget(199));
        assert!(matches!(r, Err(GifsError::BudgetExceeded { .. })));
        assert!(hutchinson_with(&g, &[&a, &a], Execution::Sequential, Budget(200)).is_ok());
    }
}
