//! Deterministic iteration of the set operator.
//!
//! The state is a shift register of the last `m` clouds. Each step applies
//! the operator to the whole window and pushes the result, so starting from
//! `(K_0, .., K_{m-1})` the `i`-th step produces `K_{m+i-1}`.

use crate::budget::Budget;
use crate::error::{GifsError, Result};
use crate::exec::Execution;
use crate::grid::Grid;
use crate::hutchinson::{hutchinson_decimated, hutchinson_with};
use crate::point::PointCloud;
use crate::system::GifsSystem;

/// Per-run knobs shared by the iteration entry points.
#[derive(Debug, Clone, Copy)]
#[derive(Default)]
pub struct DetOptions {
    /// Grid cell size for decimating every produced cloud; `None` keeps all points.
    pub decimation: Option<f64>,
    pub exec: Execution,
    /// Cap on product tuples per step. Defaults to the point budget without
    /// decimation and the work budget with it.
    pub budget: Option<Budget>,
}


impl DetOptions {
    pub fn decimated(resolution: f64) -> Self {
        DetOptions {
            decimation: Some(resolution),
            ..Self::default()
        }
    }

    fn budget(&self) -> Budget {
        self.budget.unwrap_or_else(|| match self.decimation {
            Some(_) => Budget::work(),
            None => Budget::points(),
        })
    }
}

/// The window `(D_0, .., D_{m-1})` and the number of steps taken.
#[derive(Debug, Clone, PartialEq)]
pub struct DeterministicState {
    window: Vec<PointCloud>,
    iteration: u64,
}

impl DeterministicState {
    pub fn new(g: &GifsSystem, seeds: Vec<PointCloud>) -> Result<Self> {
        if seeds.len() != g.order() {
            return Err(GifsError::Arity {
                expected: g.order(),
                got: seeds.len(),
            });
        }
        for s in &seeds {
            s.require_nonempty()?;
            if s.dim() != g.dim() {
                return Err(GifsError::Dimension {
                    expected: g.dim(),
                    got: s.dim(),
                });
            }
        }
        Ok(DeterministicState {
            window: seeds,
            iteration: 0,
        })
    }

    pub fn window(&self) -> &[PointCloud] {
        &self.window
    }

    pub fn iteration(&self) -> u64 {
        self.iteration
    }

    /// The most recently produced cloud (the last seed before any step).
    pub fn latest(&self) -> &PointCloud {
        self.window.last().expect("window is nonempty")
    }
}

/// `m` copies of `{fixed point of the first map}`, which lies on the attractor.
pub fn default_seeds(g: &GifsSystem) -> Result<Vec<PointCloud>> {
    let p = g.fixed_point(0)?;
    Ok(vec![PointCloud::singleton(p); g.order()])
}

/// One main-loop pass: `K = F(D_0, .., D_{m-1})`, then shift `K` in.
pub fn det_step(
    state: DeterministicState,
    g: &GifsSystem,
    opts: &DetOptions,
) -> Result<(DeterministicState, PointCloud)> {
    let refs: Vec<&PointCloud> = state.window.iter().collect();
    let k = match opts.decimation {
        Some(r) => hutchinson_decimated(g, &refs, r, opts.exec, opts.budget())?,
        None => hutchinson_with(g, &refs, opts.exec, opts.budget())?,
    };
    assert!(!k.is_empty(), "operator image of nonempty clouds is nonempty");
    let mut window = state.window;
    window.remove(0);
    window.push(k.clone());
    Ok((
        DeterministicState {
            window,
            iteration: state.iteration + 1,
        },
        k,
    ))
}

/// Runs `iterations >= 1` steps and returns the last produced cloud.
pub fn det_run(
    g: &GifsSystem,
    seeds: Vec<PointCloud>,
    iterations: usize,
    opts: &DetOptions,
) -> Result<PointCloud> {
    if iterations == 0 {
        return Err(GifsError::config("iterations", "must be at least 1"));
    }
    let mut state = DeterministicState::new(g, seeds)?;
    for _ in 0..iterations {
        state = det_step(state, g, opts)?.0;
    }
    Ok(state.latest().clone())
}

/// Iterates `K -> F(K, .., K)` `iterations >= 1` times.
pub fn det_run_simplified(
    g: &GifsSystem,
    seed: PointCloud,
    iterations: usize,
    opts: &DetOptions,
) -> Result<PointCloud> {
    if iterations == 0 {
        return Err(GifsError::config("iterations", "must be at least 1"));
    }
    seed.require_nonempty()?;
    let mut k = seed;
    for _ in 0..iterations {
        let refs = vec![&k; g.order()];
        k = match opts.decimation {
            Some(r) => hutchinson_decimated(g, &refs, r, opts.exec, opts.budget())?,
            None => hutchinson_with(g, &refs, opts.exec, opts.budget())?,
        };
    }
    Ok(k)
}

/// Keeps the first point met in each cell of a grid with the given cell size.
///
/// Every dropped point shares a cell with a kept one, so the result is within
/// `resolution * sqrt(d)` of the input in Hausdorff distance.
pub fn decimate(cloud: &PointCloud, resolution: f64) -> Result<PointCloud> {
    if !(resolution > 0.0 && resolution.is_finite()) {
        return Err(GifsError::config("decimation", "resolution must be positive"));
    }
    let mut grid = Grid::new(cloud.dim(), resolution);
    for p in cloud {
        grid.insert(p.clone());
    }
    Ok(grid.into_cloud())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hutchinson::hutchinson;
    use crate::metric::hausdorff_distance;
    use crate::point::Point;
    use crate::system::{AffineMap, Matrix};

    fn pair() -> GifsSystem {
        let m = |a, b, c, d| Matrix::from_rows(&[vec![a, b], vec![c, d]]).unwrap();
        GifsSystem::affine(vec![
            AffineMap::new(vec![m(0.1, 0.0, 0.0, 0.16), m(0.15, 0.04, -0.04, 0.15)], vec![0.0, 1.6]).unwrap(),
            AffineMap::new(vec![m(0.1, -0.15, 0.15, 0.15), m(-0.1, 0.15, 0.15, 0.0)], vec![1.6, 0.07]).unwrap(),
        ])
        .unwrap()
    }

    fn single(c: [f64; 2]) -> PointCloud {
        PointCloud::singleton(Point::from(c))
    }

    #[test]
    fn singleton_trace() {
        let g = pair();
        let (a, b) = (single([0.3, -0.2]), single([1.0, 0.5]));
        let state = DeterministicState::new(&g, vec![a.clone(), b.clone()]).unwrap();
        let (state, k) = det_step(state, &g, &DetOptions::default()).unwrap();
        assert_eq!(k, hutchinson(&g, &[&a, &b]).unwrap());
        assert_eq!(k.len(), 2);
        assert_eq!(state.window(), &[b, k][..]);
        assert_eq!(state.iteration(), 1);
    }

    #[test]
    fn shift_register_expansion() {
        let g = pair();
        let (k0, k1) = (single([0.0, 0.0]), single([1.0, 1.0]));
        let k2 = hutchinson(&g, &[&k0, &k1]).unwrap();
        let k3 = hutchinson(&g, &[&k1, &k2]).unwrap();
        let k4 = hutchinson(&g, &[&k2, &k3]).unwrap();
        let mut state = DeterministicState::new(&g, vec![k0, k1]).unwrap();
        for expected in [k2, k3, k4] {
            let (s, k) = det_step(state, &g, &DetOptions::default()).unwrap();
            assert_eq!(k, expected);
            state = s;
        }
    }

    #[test]
    fn simplified_first_iteration() {
        let g = pair();
        let a = Point::from([0.5, 0.5]);
        let k = det_run_simplified(&g, PointCloud::singleton(a.clone()), 1, &DetOptions::default()).unwrap();
        let expect = PointCloud::from_points(
            (0..2).map(|i| g.eval_map(i, &[a.clone(), a.clone()]).unwrap()),
        )
        .unwrap();
        assert_eq!(k, expect);
    }

    #[test]
    fn zero_iterations_rejected() {
        let g = pair();
        assert!(det_run(&g, default_seeds(&g).unwrap(), 0, &DetOptions::default()).is_err());
    }

    #[test]
    fn decimation_bounds() {
        let cloud = PointCloud::from_points((0..50).map(|i| {
            let t = i as f64 * 0.37;
            Point::from([5.0 + t.sin() * 3.0, 2.0 + (t * 1.7).cos()])
        }))
        .unwrap();
        let r = 0.25;
        let out = decimate(&cloud, r).unwrap();
        assert!(out.is_subset(&cloud));
        assert!(hausdorff_distance(&cloud, &out).unwrap() <= r * 2f64.sqrt());
        assert_eq!(decimate(&cloud, 100.0).unwrap().len(), 1);
        assert!(decimate(&cloud, 0.0).is_err());
    }

    #[test]
    fn decimated_step_matches_decimating_afterwards() {
        let g = pair();
        let seed = det_run_simplified(&g, single([0.0, 0.0]), 3, &DetOptions::default()).unwrap();
        let full = det_run_simplified(&g, seed.clone(), 1, &DetOptions::default()).unwrap();
        let dec = det_run_simplified(&g, seed, 1, &DetOptions::decimated(0.01)).unwrap();
        assert_eq!(dec, decimate(&full, 0.01).unwrap());
    }
}
