//! GIFS definitions: affine and opaque maps of order `m` on R^d.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{GifsError, Result};
use crate::point::Point;

/// Dense row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    dim: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(dim: usize) -> Self {
        Matrix {
            dim,
            data: vec![0.0; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Matrix::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = 1.0;
        }
        m
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let mut m = Matrix::zeros(values.len());
        for (i, v) in values.iter().enumerate() {
            m.data[i * values.len() + i] = *v;
        }
        m
    }

    /// Builds from a row-major slice of length `dim * dim`.
    pub fn from_row_major(dim: usize, data: &[f64]) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(GifsError::Dimension {
                expected: dim * dim,
                got: data.len(),
            });
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(GifsError::NonFinite);
        }
        Ok(Matrix {
            dim,
            data: data.to_vec(),
        })
    }

    /// Builds from nested rows.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != dim) {
            return Err(GifsError::Dimension {
                expected: dim,
                got: bad.len(),
            });
        }
        let flat: Vec<f64> = rows.iter().flatten().copied().collect();
        Matrix::from_row_major(dim, &flat)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.dim + c]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.dim).map(|r| r.to_vec()).collect()
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Matrix product `self * rhs`.
    pub fn mul(&self, rhs: &Matrix) -> Matrix {
        let d = self.dim;
        let mut out = Matrix::zeros(d);
        for r in 0..d {
            for c in 0..d {
                let mut acc = 0.0;
                for t in 0..d {
                    acc += self.data[r * d + t] * rhs.data[t * d + c];
                }
                out.data[r * d + c] = acc;
            }
        }
        out
    }

    pub fn add(&self, rhs: &Matrix) -> Matrix {
        Matrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }

    /// `out += self * x`, row by row.
    pub(crate) fn mul_vec_acc(&self, x: &[f64], out: &mut [f64]) {
        let d = self.dim;
        for (r, o) in out.iter_mut().enumerate() {
            let row = &self.data[r * d..(r + 1) * d];
            for (a, v) in row.iter().zip(x) {
                *o += a * v;
            }
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        self.mul_vec_acc(x, &mut out);
        out
    }
}

/// `f(x_1..x_m) = A_1 x_1 + ... + A_m x_m + b`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineMap {
    matrices: Vec<Matrix>,
    translation: Vec<f64>,
}

impl AffineMap {
    pub fn new(matrices: Vec<Matrix>, translation: Vec<f64>) -> Result<Self> {
        if matrices.is_empty() {
            return Err(GifsError::InvalidSystem("affine map needs at least one matrix".into()));
        }
        let d = translation.len();
        for m in &matrices {
            if m.dim() != d {
                return Err(GifsError::Dimension {
                    expected: d,
                    got: m.dim(),
                });
            }
        }
        if translation.iter().any(|v| !v.is_finite()) {
            return Err(GifsError::NonFinite);
        }
        Ok(AffineMap {
            matrices,
            translation,
        })
    }

    pub fn order(&self) -> usize {
        self.matrices.len()
    }

    pub fn dim(&self) -> usize {
        self.translation.len()
    }

    pub fn matrices(&self) -> &[Matrix] {
        &self.matrices
    }

    pub fn matrix(&self, j: usize) -> &Matrix {
        &self.matrices[j]
    }

    pub fn translation(&self) -> &[f64] {
        &self.translation
    }

    /// Sum of Frobenius norms: a Lipschitz bound for the max metric on X^m
    /// and the Euclidean metric on X.
    pub fn lipschitz_bound(&self) -> f64 {
        self.matrices.iter().map(Matrix::frobenius).sum()
    }

    /// `A_1 + ... + A_m`, the linear part on the diagonal.
    pub fn diagonal_sum(&self) -> Matrix {
        let mut it = self.matrices.iter();
        let first = it.next().expect("order >= 1").clone();
        it.fold(first, |acc, m| acc.add(m))
    }

    /// Evaluates on coordinate slices. Terms are added in ascending `j`
    /// and the translation last; every module evaluating an affine map goes
    /// through here so that equal inputs give bit-equal outputs.
    pub(crate) fn apply_raw<'a, I>(&self, args: I) -> Vec<f64>
    where
        I: IntoIterator<Item = &'a [f64]>,
    {
        let mut out = vec![0.0; self.dim()];
        self.apply_raw_into(args, &mut out);
        out
    }

    /// [`Self::apply_raw`] into a caller buffer of length `d`.
    pub(crate) fn apply_raw_into<'a, I>(&self, args: I, out: &mut [f64])
    where
        I: IntoIterator<Item = &'a [f64]>,
    {
        out.fill(0.0);
        for (a, x) in self.matrices.iter().zip(args) {
            a.mul_vec_acc(x, out);
        }
        for (o, b) in out.iter_mut().zip(&self.translation) {
            *o += b;
        }
    }
}

/// Opaque evaluator for non-affine maps.
pub type Evaluator = Arc<dyn Fn(&[Point]) -> Point + Send + Sync>;

#[derive(Clone)]
pub enum GifsMap {
    Affine(AffineMap),
    Generic(Evaluator),
}

impl GifsMap {
    pub fn as_affine(&self) -> Option<&AffineMap> {
        match self {
            GifsMap::Affine(a) => Some(a),
            GifsMap::Generic(_) => None,
        }
    }
}

impl fmt::Debug for GifsMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GifsMap::Affine(a) => f.debug_tuple("Affine").field(a).finish(),
            GifsMap::Generic(_) => f.write_str("Generic(..)"),
        }
    }
}

impl From<AffineMap> for GifsMap {
    fn from(a: AffineMap) -> Self {
        GifsMap::Affine(a)
    }
}

/// A generalized iterated function system: `n` maps `X^m -> X` on `X = R^d`.
#[derive(Debug, Clone)]
pub struct GifsSystem {
    dim: usize,
    order: usize,
    maps: Vec<GifsMap>,
    probabilities: Option<Vec<f64>>,
}

impl GifsSystem {
    pub fn new(
        dim: usize,
        order: usize,
        maps: Vec<GifsMap>,
        probabilities: Option<Vec<f64>>,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(GifsError::InvalidSystem("dimension must be >= 1".into()));
        }
        if order == 0 {
            return Err(GifsError::InvalidSystem("order must be >= 1".into()));
        }
        if maps.is_empty() {
            return Err(GifsError::InvalidSystem("at least one map is required".into()));
        }
        for map in &maps {
            if let GifsMap::Affine(a) = map {
                if a.order() != order {
                    return Err(GifsError::Arity {
                        expected: order,
                        got: a.order(),
                    });
                }
                if a.dim() != dim {
                    return Err(GifsError::Dimension {
                        expected: dim,
                        got: a.dim(),
                    });
                }
            }
        }
        if let Some(p) = &probabilities {
            if p.len() != maps.len() {
                return Err(GifsError::config(
                    "probabilities",
                    format!("expected {} entries, got {}", maps.len(), p.len()),
                ));
            }
            if p.iter().any(|&v| v <= 0.0 || !v.is_finite()) {
                return Err(GifsError::config("probabilities", "entries must be positive"));
            }
            let sum: f64 = p.iter().sum();
            if (sum - 1.0).abs() > 1e-12 {
                return Err(GifsError::config(
                    "probabilities",
                    format!("entries sum to {sum}, expected 1"),
                ));
            }
        }
        Ok(GifsSystem {
            dim,
            order,
            maps,
            probabilities,
        })
    }

    /// Convenience constructor for an all-affine system.
    pub fn affine(maps: Vec<AffineMap>) -> Result<Self> {
        let first = maps
            .first()
            .ok_or_else(|| GifsError::InvalidSystem("at least one map is required".into()))?;
        let (dim, order) = (first.dim(), first.order());
        GifsSystem::new(dim, order, maps.into_iter().map(GifsMap::Affine).collect(), None)
    }

    pub fn with_probabilities(self, p: Vec<f64>) -> Result<Self> {
        GifsSystem::new(self.dim, self.order, self.maps, Some(p))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    pub fn maps(&self) -> &[GifsMap] {
        &self.maps
    }

    pub fn map(&self, i: usize) -> &GifsMap {
        &self.maps[i]
    }

    pub fn probabilities(&self) -> Option<&[f64]> {
        self.probabilities.as_deref()
    }

    pub fn is_affine(&self) -> bool {
        self.maps.iter().all(|m| m.as_affine().is_some())
    }

    /// All maps as affine maps, or the index of the first that is not.
    pub fn affine_maps(&self) -> Result<Vec<&AffineMap>> {
        self.maps
            .iter()
            .enumerate()
            .map(|(i, m)| m.as_affine().ok_or(GifsError::NotAffine(i)))
            .collect()
    }

    /// Evaluates map `i` (0-based) at `m` points.
    pub fn eval_map(&self, i: usize, args: &[Point]) -> Result<Point> {
        let map = self.maps.get(i).ok_or(GifsError::IndexOutOfRange {
            index: i,
            bound: self.maps.len().saturating_sub(1),
        })?;
        eval_map(map, self.order, self.dim, args)
    }

    /// Unchecked evaluation for hot loops whose inputs were validated upstream.
    pub(crate) fn eval_unchecked(&self, i: usize, args: &[&Point]) -> Point {
        match &self.maps[i] {
            GifsMap::Affine(a) => Point::from_raw(a.apply_raw(args.iter().map(|p| p.coords()))),
            GifsMap::Generic(f) => {
                let owned: Vec<Point> = args.iter().map(|p| (*p).clone()).collect();
                f(&owned)
            }
        }
    }

    /// Contractivity report based on [`AffineMap::lipschitz_bound`].
    pub fn validate_contractive(&self) -> ContractivityReport {
        let bounds: Vec<Option<f64>> = self
            .maps
            .iter()
            .map(|m| m.as_affine().map(AffineMap::lipschitz_bound))
            .collect();
        let unverified: Vec<usize> = bounds
            .iter()
            .enumerate()
            .filter_map(|(i, b)| b.is_none().then_some(i))
            .collect();
        let c = bounds.iter().flatten().copied().fold(None, |acc: Option<f64>, b| {
            Some(acc.map_or(b, |a| a.max(b)))
        });
        ContractivityReport {
            pass: c.is_none_or(|c| c < 1.0),
            bounds,
            c,
            unverified,
        }
    }

    /// The unique `x` with `f_i(x, ..., x) = x` (0-based `i`).
    pub fn fixed_point(&self, i: usize) -> Result<Point> {
        let map = self.maps.get(i).ok_or(GifsError::IndexOutOfRange {
            index: i,
            bound: self.maps.len().saturating_sub(1),
        })?;
        match map {
            GifsMap::Affine(a) => affine_fixed_point(a, i),
            GifsMap::Generic(_) => self.iterate_fixed_point(i),
        }
    }

    fn iterate_fixed_point(&self, i: usize) -> Result<Point> {
        const MAX_ITER: usize = 100_000;
        let mut x = Point::zeros(self.dim);
        for _ in 0..MAX_ITER {
            let args = vec![x.clone(); self.order];
            let next = self.eval_map(i, &args)?;
            let step = next.dist(&x);
            x = next;
            if step < 1e-12 {
                return Ok(x);
            }
            if !x.is_finite() {
                break;
            }
        }
        Err(GifsError::NonConvergent {
            map: i,
            iterations: MAX_ITER,
        })
    }
}

fn affine_fixed_point(a: &AffineMap, index: usize) -> Result<Point> {
    let d = a.dim();
    let s = a.diagonal_sum();
    let lhs = DMatrix::from_fn(d, d, |r, c| {
        let id = if r == c { 1.0 } else { 0.0 };
        id - s.get(r, c)
    });
    let rhs = DVector::from_column_slice(a.translation());
    let x = lhs.lu().solve(&rhs).ok_or(GifsError::Singular(index))?;
    Point::new(x.iter().copied().collect()).map_err(|_| GifsError::Singular(index))
}

/// Evaluates a map of order `m` on `R^d` at `m` points.
pub fn eval_map(f: &GifsMap, m: usize, d: usize, args: &[Point]) -> Result<Point> {
    if args.len() != m {
        return Err(GifsError::Arity {
            expected: m,
            got: args.len(),
        });
    }
    if let Some(bad) = args.iter().find(|p| p.dim() != d) {
        return Err(GifsError::Dimension {
            expected: d,
            got: bad.dim(),
        });
    }
    match f {
        GifsMap::Affine(a) => Ok(Point::from_raw(a.apply_raw(args.iter().map(Point::coords)))),
        GifsMap::Generic(eval) => {
            let out = eval(args);
            if out.dim() != d {
                return Err(GifsError::Dimension {
                    expected: d,
                    got: out.dim(),
                });
            }
            Ok(out)
        }
    }
}

/// Result of [`GifsSystem::validate_contractive`].
#[derive(Debug, Clone, PartialEq)]
pub struct ContractivityReport {
    /// Lipschitz bound per map; `None` for generic maps.
    pub bounds: Vec<Option<f64>>,
    /// Maximum bound over affine maps.
    pub c: Option<f64>,
    /// Set iff every verifiable bound is below one.
    pub pass: bool,
    /// Generic maps accepted without verification.
    pub unverified: Vec<usize>,
}

impl fmt::Display for ContractivityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, b) in self.bounds.iter().enumerate() {
            match b {
                Some(b) => writeln!(f, "map {}: lipschitz bound {:.6}", i + 1, b)?,
                None => writeln!(f, "map {}: generic, not verified", i + 1)?,
            }
        }
        match self.c {
            Some(c) => write!(f, "c = {:.6} ({})", c, if self.pass { "contractive" } else { "NOT contractive" }),
            None => write!(f, "c = n/a (no affine maps)"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zero_map(b: [f64; 2], m: usize) -> AffineMap {
        AffineMap::new(vec![Matrix::zeros(2); m], b.to_vec()).unwrap()
    }

    fn f1() -> AffineMap {
        AffineMap::new(
            vec![
                Matrix::from_rows(&[vec![0.1, 0.0], vec![0.0, 0.16]]).unwrap(),
                Matrix::from_rows(&[vec![0.15, 0.04], vec![-0.04, 0.15]]).unwrap(),
            ],
            vec![0.0, 1.6],
        )
        .unwrap()
    }

    #[test]
    fn zero_matrices_return_translation() {
        let g = GifsSystem::affine(vec![zero_map([1.6, 0.07], 2)]).unwrap();
        let p = g
            .eval_map(0, &[Point::from([3.0, -1.0]), Point::from([7.0, 2.0])])
            .unwrap();
        assert_eq!(p, Point::from([1.6, 0.07]));
    }

    #[test]
    fn first_leaf_map_at_origin_and_unit_x() {
        let g = GifsSystem::affine(vec![f1()]).unwrap();
        let o = Point::from([0.0, 0.0]);
        assert_eq!(g.eval_map(0, &[o.clone(), o.clone()]).unwrap(), Point::from([0.0, 1.6]));
        let p = g.eval_map(0, &[Point::from([1.0, 0.0]), o]).unwrap();
        assert!((p.coords()[0] - 0.1).abs() < 1e-15);
        assert!((p.coords()[1] - 1.6).abs() < 1e-15);
    }

    #[test]
    fn eval_errors() {
        let g = GifsSystem::affine(vec![f1()]).unwrap();
        assert!(matches!(
            g.eval_map(0, &[Point::from([0.0, 0.0])]),
            Err(GifsError::Arity { expected: 2, got: 1 })
        ));
        assert!(matches!(
            g.eval_map(0, &[Point::from([0.0]), Point::from([0.0])]),
            Err(GifsError::Dimension { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn lipschitz_bounds() {
        assert_eq!(zero_map([0.0, 0.0], 2).lipschitz_bound(), 0.0);
        let a = AffineMap::new(
            vec![Matrix::diagonal(&[0.25, 0.25]), Matrix::diagonal(&[0.2, 0.2])],
            vec![0.0, 0.0],
        )
        .unwrap();
        let expected = 0.25 * 2f64.sqrt() + 0.2 * 2f64.sqrt();
        assert!((a.lipschitz_bound() - expected).abs() < 1e-15);
        assert!((expected - 0.6364).abs() < 1e-4);
        let id = AffineMap::new(vec![Matrix::identity(2)], vec![0.0, 0.0]).unwrap();
        assert!((id.lipschitz_bound() - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn contractivity_report() {
        let z = GifsSystem::affine(vec![zero_map([1.0, 0.0], 2), zero_map([0.0, 1.0], 2)]).unwrap();
        let r = z.validate_contractive();
        assert_eq!(r.c, Some(0.0));
        assert!(r.pass);

        let id = GifsSystem::affine(vec![AffineMap::new(vec![Matrix::identity(2)], vec![0.0, 0.0]).unwrap()])
            .unwrap();
        let r = id.validate_contractive();
        assert!(!r.pass);
        assert!((r.c.unwrap() - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn generic_maps_are_unverified_not_failed() {
        let f: Evaluator = Arc::new(|xs: &[Point]| {
            Point::from_raw(xs[0].coords().iter().map(|c| 0.5 * c.sin()).collect())
        });
        let g = GifsSystem::new(1, 1, vec![GifsMap::Generic(f)], None).unwrap();
        let r = g.validate_contractive();
        assert!(r.pass);
        assert_eq!(r.unverified, vec![0]);
        let x = g.fixed_point(0).unwrap();
        assert!(x.coords()[0].abs() < 1e-11);
    }

    #[test]
    fn non_convergent_generic_fixed_point() {
        let f: Evaluator = Arc::new(|xs: &[Point]| {
            Point::from_raw(xs[0].coords().iter().map(|c| 2.0 * c + 1.0).collect())
        });
        let g = GifsSystem::new(1, 1, vec![GifsMap::Generic(f)], None).unwrap();
        assert!(matches!(g.fixed_point(0), Err(GifsError::NonConvergent { .. })));
    }

    #[test]
    fn fixed_points() {
        let g = GifsSystem::affine(vec![zero_map([0.3, -2.0], 2)]).unwrap();
        assert_eq!(g.fixed_point(0).unwrap(), Point::from([0.3, -2.0]));

        let h1 = AffineMap::new(
            vec![
                Matrix::diagonal(&[0.25, 0.25]),
                Matrix::from_rows(&[vec![0.0, 0.2], vec![0.0, 0.2]]).unwrap(),
            ],
            vec![0.0, 0.0],
        )
        .unwrap();
        let g = GifsSystem::affine(vec![h1]).unwrap();
        let x = g.fixed_point(0).unwrap();
        assert!(x.norm() < 1e-15);
    }

    #[test]
    fn singular_fixed_point() {
        let a = AffineMap::new(vec![Matrix::identity(2)], vec![1.0, 0.0]).unwrap();
        let g = GifsSystem::affine(vec![a]).unwrap();
        assert!(matches!(g.fixed_point(0), Err(GifsError::Singular(0))));
    }

    #[test]
    fn probabilities_validated() {
        let maps = vec![zero_map([0.0, 0.0], 1), zero_map([1.0, 0.0], 1)];
        let g = GifsSystem::affine(maps).unwrap();
        assert!(g.clone().with_probabilities(vec![0.5, 0.5]).is_ok());
        let err = g.clone().with_probabilities(vec![0.5, 0.4]).unwrap_err();
        assert!(err.to_string().contains("probabilities"));
        assert!(g.with_probabilities(vec![1.0, 0.0]).is_err());
    }

    #[test]
    fn mixed_orders_rejected() {
        let r = GifsSystem::affine(vec![zero_map([0.0, 0.0], 1), zero_map([0.0, 0.0], 2)]);
        assert!(matches!(r, Err(GifsError::Arity { .. })));
    }
}
