//! Closed forms for affine systems.
//!
//! For affine maps every composite `f_α` is again affine:
//! `f_α(x) = Σ_ε A^α_ε x_(ε) + B^α` over all paths `ε` of length `k`. The
//! coefficient tables hold `A^α_ε` and `B^α` for whole levels, built from
//! the level below and level 1 only. The shortcut keeps only `B^α`, using
//! `B^α = Σ_j A^{α^1}_j B^{α(j)} + b_{α^1}`.
//!
//! Levels are stored densely over a contiguous index range `first..first+len`
//! of `N`, so a full level and the single-address chain used for spot
//! evaluation share one representation.

use std::collections::BTreeMap;
use std::ops::Range;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use crate::budget::Budget;
use crate::codespace::{
    address_count, address_len, base_digits, block_len, child_index, encode_n, Address, BigIndex,
};
use crate::deterministic::decimate;
use crate::error::{GifsError, Result};
use crate::exec::Execution;
use crate::hutchinson::hutchinson_decimated;
use crate::point::{Point, PointCloud};
use crate::system::{AffineMap, GifsSystem, Matrix};

const CHUNK: usize = 1 << 12;

/// Matrices stored per full-table level of depth `k` in the original
/// scheme: `n^L (1 + (m + 1) m^(k-1))` with `L = (m^k - 1)/(m - 1)`.
pub fn full_table_entries(n: usize, m: usize, k: usize) -> Option<u128> {
    let per = (m as u128 + 1).checked_mul(block_len(m, k)? as u128)? + 1;
    address_count(n, m, k)?.checked_mul(per)
}

/// Entries held by the shortcut at level `k`: `m + n^L`.
pub fn shortcut_entries(n: usize, m: usize, k: usize) -> Option<u128> {
    address_count(n, m, k)?.checked_add(m as u128)
}

fn mat_mul_into(a: &[f64], b: &[f64], d: usize, out: &mut Vec<f64>) {
    for r in 0..d {
        for c in 0..d {
            let mut s = 0.0;
            for t in 0..d {
                s += a[r * d + t] * b[t * d + c];
            }
            out.push(s);
        }
    }
}

fn mat_vec_acc(a: &[f64], x: &[f64], d: usize, out: &mut [f64]) {
    for (r, o) in out.iter_mut().enumerate() {
        for t in 0..d {
            *o += a[r * d + t] * x[t];
        }
    }
}

fn chunked(len: usize) -> Vec<Range<usize>> {
    (0..len).step_by(CHUNK).map(|s| s..(s + CHUNK).min(len)).collect()
}

/// One level of the full tables over `first..first+len`.
#[derive(Debug, Clone)]
pub struct TableLevel {
    k: usize,
    first: BigIndex,
    len: usize,
    /// `len * d` translation coordinates.
    b: Vec<f64>,
    /// `len * m^k * d * d`, row-major per matrix, `P` fastest.
    a: Option<Vec<f64>>,
}

impl TableLevel {
    pub fn level(&self) -> usize {
        self.k
    }

    pub fn first(&self) -> &BigIndex {
        &self.first
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn has_matrices(&self) -> bool {
        self.a.is_some()
    }

    fn local(&self, n: &BigIndex) -> Option<usize> {
        if n < &self.first {
            return None;
        }
        (n - &self.first).to_usize().filter(|&i| i < self.len)
    }
}

/// Coefficient tables `B[k, N]` and `A[k, N, P]`.
#[derive(Debug, Clone)]
pub struct CoefficientTables {
    n: usize,
    m: usize,
    d: usize,
    levels: BTreeMap<usize, TableLevel>,
}

impl CoefficientTables {
    pub fn symbols(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    /// Levels currently held, ascending.
    pub fn levels(&self) -> impl Iterator<Item = &TableLevel> {
        self.levels.values()
    }

    pub fn level(&self, k: usize) -> Option<&TableLevel> {
        self.levels.get(&k)
    }

    fn entry(&self, k: usize, n: &BigIndex) -> Result<(&TableLevel, usize)> {
        let not_built = || GifsError::LevelNotBuilt {
            level: k,
            index: n.to_string(),
        };
        let level = self.levels.get(&k).ok_or_else(not_built)?;
        let i = level.local(n).ok_or_else(not_built)?;
        Ok((level, i))
    }

    /// `B[k, N]`.
    pub fn b(&self, k: usize, n: &BigIndex) -> Result<&[f64]> {
        let (level, i) = self.entry(k, n)?;
        Ok(&level.b[i * self.d..(i + 1) * self.d])
    }

    /// `{B[k, N]}` over the level's range, in index order.
    pub fn b_cloud(&self, k: usize) -> Result<PointCloud> {
        let level = self.levels.get(&k).ok_or(GifsError::LevelNotBuilt {
            level: k,
            index: "*".into(),
        })?;
        Ok(PointCloud::from_points_unchecked(
            self.d,
            level.b.chunks(self.d).map(|c| Point::from_raw(c.to_vec())),
        ))
    }

    /// `A[k, N, P]`.
    pub fn a(&self, k: usize, n: &BigIndex, p: u64) -> Result<Matrix> {
        let (level, i) = self.entry(k, n)?;
        let paths = block_len(self.m, k + 1).unwrap();
        if p >= paths {
            return Err(GifsError::IndexOutOfRange {
                index: p as usize,
                bound: paths as usize,
            });
        }
        let a = level.a.as_ref().ok_or_else(|| GifsError::LevelNotBuilt {
            level: k,
            index: format!("{n} (matrices not kept)"),
        })?;
        let dd = self.d * self.d;
        let at = (i * paths as usize + p as usize) * dd;
        Matrix::from_row_major(self.d, &a[at..at + dd])
    }
}

/// Options for [`build_tables_full`] and [`build_tables_for`].
#[derive(Debug, Clone, Copy)]
pub struct TableOptions {
    pub budget: Budget,
    /// Keep every level rather than level 1 and the last one.
    pub keep_history: bool,
    /// Store the `A` matrices of the top level. Only `B` is needed there
    /// when the tables feed a translation-only comparison.
    pub top_level_matrices: bool,
    pub exec: Execution,
}

impl Default for TableOptions {
    fn default() -> Self {
        TableOptions {
            budget: Budget::tables(),
            keep_history: false,
            top_level_matrices: true,
            exec: Execution::default(),
        }
    }
}

struct Builder<'a> {
    maps: Vec<&'a AffineMap>,
    n: usize,
    m: usize,
    d: usize,
}

impl<'a> Builder<'a> {
    fn new(g: &'a GifsSystem) -> Result<Self> {
        Ok(Builder {
            maps: g.affine_maps()?,
            n: g.len(),
            m: g.order(),
            d: g.dim(),
        })
    }

    fn level_one(&self) -> TableLevel {
        let mut b = Vec::with_capacity(self.n * self.d);
        let mut a = Vec::with_capacity(self.n * self.m * self.d * self.d);
        for f in &self.maps {
            b.extend_from_slice(f.translation());
            for mat in f.matrices() {
                a.extend_from_slice(mat.as_slice());
            }
        }
        TableLevel {
            k: 1,
            first: BigUint::zero(),
            len: self.n,
            b,
            a: Some(a),
        }
    }

    /// Level `k` over `first..first+len` from level `k - 1`.
    fn next(
        &self,
        prev: &TableLevel,
        l1: &TableLevel,
        first: BigIndex,
        len: usize,
        with_a: bool,
        exec: Execution,
    ) -> Result<TableLevel> {
        let k = prev.k + 1;
        let (d, m) = (self.d, self.m);
        let dd = d * d;
        let blen = block_len(m, k).unwrap() as usize;
        let radix = BigUint::from(self.n).pow(blen as u32);
        let prev_a = prev.a.as_ref().expect("lower levels keep matrices");
        let l1_a = l1.a.as_ref().unwrap();
        let chunks = chunked(len);
        let parts = exec.map_slice(&chunks, |r| -> Result<(Vec<f64>, Vec<f64>)> {
            let mut b = Vec::with_capacity(r.len() * d);
            let mut a = Vec::with_capacity(if with_a { r.len() * blen * m * dd } else { 0 });
            for i in r.clone() {
                let idx = &first + BigUint::from(i);
                let parent = &idx / &radix;
                let block = base_digits(&(&idx % &radix), self.n, blen).unwrap();
                let pl = prev.local(&parent).ok_or_else(|| GifsError::LevelNotBuilt {
                    level: k - 1,
                    index: parent.to_string(),
                })?;
                let mut bv = prev.b[pl * d..(pl + 1) * d].to_vec();
                for (pp, &digit) in block.iter().enumerate() {
                    let ap = &prev_a[(pl * blen + pp) * dd..(pl * blen + pp + 1) * dd];
                    mat_vec_acc(ap, &l1.b[digit as usize * d..(digit as usize + 1) * d], d, &mut bv);
                    if with_a {
                        for e in 0..m {
                            let at = (digit as usize * m + e) * dd;
                            mat_mul_into(ap, &l1_a[at..at + dd], d, &mut a);
                        }
                    }
                }
                b.extend(bv);
            }
            Ok((b, a))
        });
        let mut b = Vec::with_capacity(len * d);
        let mut a = Vec::new();
        for part in parts {
            let (pb, pa) = part?;
            b.extend(pb);
            a.extend(pa);
        }
        Ok(TableLevel {
            k,
            first,
            len,
            b,
            a: with_a.then_some(a),
        })
    }
}

fn run_levels(
    g: &GifsSystem,
    k_max: usize,
    ranges: impl Fn(usize) -> (BigIndex, usize),
    opts: &TableOptions,
) -> Result<CoefficientTables> {
    if k_max == 0 {
        return Err(GifsError::config("depth", "must be at least 1"));
    }
    let b = Builder::new(g)?;
    let mut needed: u128 = 0;
    for k in 1..=k_max {
        let matrices = if k < k_max || opts.top_level_matrices {
            block_len(b.m, k + 1).map(|p| p as u128)
        } else {
            Some(0)
        };
        let per = matrices.map(|p| p + 1);
        let len = ranges(k).1 as u128;
        needed = per
            .and_then(|p| p.checked_mul(len))
            .and_then(|e| needed.checked_add(e))
            .unwrap_or(u128::MAX);
    }
    opts.budget.check((needed != u128::MAX).then_some(needed))?;

    let l1 = b.level_one();
    let mut levels = BTreeMap::new();
    let mut prev = l1.clone();
    for k in 2..=k_max {
        let (first, len) = ranges(k);
        let with_a = k < k_max || opts.top_level_matrices;
        let next = b.next(&prev, &l1, first, len, with_a, opts.exec)?;
        let done = std::mem::replace(&mut prev, next);
        if opts.keep_history || done.k == 1 {
            levels.insert(done.k, done);
        }
    }
    if k_max == 1 && !opts.top_level_matrices {
        prev.a = None;
    }
    levels.insert(prev.k, prev);
    if k_max > 1 {
        levels.entry(1).or_insert(l1);
    }
    Ok(CoefficientTables {
        n: b.n,
        m: b.m,
        d: b.d,
        levels,
    })
}

/// Full tables for every address up to depth `k_max`.
pub fn build_tables_full(g: &GifsSystem, k_max: usize, opts: &TableOptions) -> Result<CoefficientTables> {
    let (n, m) = (g.len(), g.order());
    for k in 1..=k_max {
        let count = address_count(n, m, k);
        if count.is_none_or(|c| c > usize::MAX as u128) {
            return Err(GifsError::BudgetExceeded {
                needed: count.map_or("overflow".into(), |c| c.to_string()),
                budget: opts.budget.0,
            });
        }
    }
    run_levels(
        g,
        k_max,
        |k| (BigUint::zero(), address_count(n, m, k).unwrap() as usize),
        opts,
    )
}

/// Tables holding only the prefixes of one address, enough to evaluate it.
pub fn build_tables_for(g: &GifsSystem, addr: &Address, opts: &TableOptions) -> Result<CoefficientTables> {
    if addr.symbols() != g.len() || addr.order() != g.order() {
        return Err(GifsError::InvalidSystem(
            "address alphabet does not match the system".into(),
        ));
    }
    let mut prefixes = vec![addr.clone()];
    while let Some(p) = prefixes.last().unwrap().prefix() {
        prefixes.push(p);
    }
    prefixes.reverse();
    let firsts: Vec<BigIndex> = prefixes.iter().map(encode_n).collect();
    run_levels(g, addr.depth(), |k| (firsts[k - 1].clone(), 1), opts)
}

/// `f_α(x) = Σ_P A[k, N, P] x_P + B[k, N]` with `x` in path order.
pub fn eval_f_alpha_closed(tables: &CoefficientTables, addr: &Address, x: &[Point]) -> Result<Point> {
    let k = addr.depth();
    let paths = block_len(tables.m, k + 1).unwrap() as usize;
    if x.len() != paths {
        return Err(GifsError::Arity {
            expected: paths,
            got: x.len(),
        });
    }
    if let Some(p) = x.iter().find(|p| p.dim() != tables.d) {
        return Err(GifsError::Dimension {
            expected: tables.d,
            got: p.dim(),
        });
    }
    let n = encode_n(addr);
    let mut out = vec![0.0; tables.d];
    for (p, xp) in x.iter().enumerate() {
        tables.a(k, &n, p as u64)?.mul_vec_acc(xp.coords(), &mut out);
    }
    for (o, b) in out.iter_mut().zip(tables.b(k, &n)?) {
        *o += b;
    }
    Point::new(out)
}

/// Per-level `B^α` (and optionally the diagonal sums `S^α = Σ_ε A^α_ε`)
/// from the shortcut recursion.
#[derive(Debug, Clone)]
pub struct ShortcutTables {
    n: usize,
    m: usize,
    d: usize,
    levels: BTreeMap<usize, ShortcutLevel>,
}

#[derive(Debug, Clone)]
struct ShortcutLevel {
    b: Vec<f64>,
    s: Option<Vec<f64>>,
}

impl ShortcutTables {
    pub fn symbols(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn top_level(&self) -> usize {
        *self.levels.keys().next_back().unwrap()
    }

    pub fn has_level(&self, k: usize) -> bool {
        self.levels.contains_key(&k)
    }

    /// Number of addresses at level `k`.
    pub fn len(&self, k: usize) -> Option<usize> {
        self.levels.get(&k).map(|l| l.b.len() / self.d)
    }

    fn level(&self, k: usize, n: u64) -> Result<(&ShortcutLevel, usize)> {
        let level = self.levels.get(&k).filter(|l| (n as usize) < l.b.len() / self.d);
        level.map(|l| (l, n as usize)).ok_or(GifsError::LevelNotBuilt {
            level: k,
            index: n.to_string(),
        })
    }

    /// `B[k, N]`.
    pub fn b(&self, k: usize, n: u64) -> Result<&[f64]> {
        let (l, i) = self.level(k, n)?;
        Ok(&l.b[i * self.d..(i + 1) * self.d])
    }

    /// `S[k, N]`, when built.
    pub fn s(&self, k: usize, n: u64) -> Result<Matrix> {
        let (l, i) = self.level(k, n)?;
        let s = l.s.as_ref().ok_or_else(|| GifsError::LevelNotBuilt {
            level: k,
            index: format!("{n} (diagonal sums not built)"),
        })?;
        let dd = self.d * self.d;
        Matrix::from_row_major(self.d, &s[i * dd..(i + 1) * dd])
    }

    /// `{B[k, N]}` in index order.
    pub fn cloud(&self, k: usize) -> Result<PointCloud> {
        let l = self.levels.get(&k).ok_or(GifsError::LevelNotBuilt {
            level: k,
            index: "*".into(),
        })?;
        Ok(PointCloud::from_points_unchecked(
            self.d,
            l.b.chunks(self.d).map(|c| Point::from_raw(c.to_vec())),
        ))
    }

    /// `{S[k, N] x0 + B[k, N]}` in index order.
    pub fn cloud_from(&self, k: usize, x0: &Point) -> Result<PointCloud> {
        let len = self.len(k).ok_or(GifsError::LevelNotBuilt {
            level: k,
            index: "*".into(),
        })?;
        if x0.dim() != self.d {
            return Err(GifsError::Dimension {
                expected: self.d,
                got: x0.dim(),
            });
        }
        let mut pts = Vec::with_capacity(len);
        for i in 0..len as u64 {
            let mut out = self.s(k, i)?.mul_vec(x0.coords());
            for (o, b) in out.iter_mut().zip(self.b(k, i)?) {
                *o += b;
            }
            pts.push(Point::from_raw(out));
        }
        Ok(PointCloud::from_points_unchecked(self.d, pts))
    }
}

/// Options for [`build_b_shortcut`].
#[derive(Debug, Clone, Copy)]
pub struct ShortcutOptions {
    pub budget: Budget,
    pub keep_history: bool,
    /// Also carry `S[k, N]` for [`attractor_from_seed`].
    pub diagonal_sums: bool,
    pub exec: Execution,
}

impl Default for ShortcutOptions {
    fn default() -> Self {
        ShortcutOptions {
            budget: Budget::tables(),
            keep_history: false,
            diagonal_sums: false,
            exec: Execution::default(),
        }
    }
}

/// `B[k, N] = Σ_j A^{α^1}_j B[k-1, N(α(j))] + b_{α^1}` for `k <= k_max`.
pub fn build_b_shortcut(g: &GifsSystem, k_max: usize, opts: &ShortcutOptions) -> Result<ShortcutTables> {
    if k_max == 0 {
        return Err(GifsError::config("depth", "must be at least 1"));
    }
    let maps = g.affine_maps()?;
    let (n, m, d) = (g.len(), g.order(), g.dim());
    let top = address_count(n, m, k_max).and_then(|c| c.checked_add(m as u128));
    opts.budget.check(top)?;
    let count = |k: usize| address_count(n, m, k).unwrap() as usize;

    let zeros = vec![0.0; d];
    let mut prev = ShortcutLevel {
        b: maps
            .iter()
            .flat_map(|f| f.apply_raw(std::iter::repeat_n(zeros.as_slice(), m)))
            .collect(),
        s: opts
            .diagonal_sums
            .then(|| maps.iter().flat_map(|f| f.diagonal_sum().as_slice().to_vec()).collect()),
    };
    let mut levels = BTreeMap::new();
    for k in 2..=k_max {
        let head_radix = (n as u64).pow(address_len(m, k).unwrap() as u32 - 1);
        let p = &prev;
        let chunks = chunked(count(k));
        let parts = opts.exec.map_slice(&chunks, |r| {
            let mut b = Vec::with_capacity(r.len() * d);
            let mut s = Vec::new();
            let mut children = vec![0usize; m];
            for idx in r.clone() {
                let idx = idx as u64;
                let f = maps[(idx / head_radix) as usize];
                for (j, c) in children.iter_mut().enumerate() {
                    *c = child_index(n, m, k, &idx, j + 1) as usize;
                }
                b.extend(f.apply_raw(children.iter().map(|&c| &p.b[c * d..(c + 1) * d])));
                if let Some(ps) = &p.s {
                    let dd = d * d;
                    let mut acc = vec![0.0; dd];
                    let mut tmp = Vec::with_capacity(dd);
                    for (j, &c) in children.iter().enumerate() {
                        tmp.clear();
                        mat_mul_into(f.matrix(j).as_slice(), &ps[c * dd..(c + 1) * dd], d, &mut tmp);
                        for (a, t) in acc.iter_mut().zip(&tmp) {
                            *a += t;
                        }
                    }
                    s.extend(acc);
                }
            }
            (b, s)
        });
        let mut b = Vec::with_capacity(count(k) * d);
        let mut s = Vec::new();
        for (pb, ps) in parts {
            b.extend(pb);
            s.extend(ps);
        }
        let next = ShortcutLevel {
            b,
            s: opts.diagonal_sums.then_some(s),
        };
        let done = std::mem::replace(&mut prev, next);
        if opts.keep_history {
            levels.insert(k - 1, done);
        }
    }
    levels.insert(k_max, prev);
    Ok(ShortcutTables { n, m, d, levels })
}

/// `{B^α : α of depth k}`.
pub fn attractor_shortcut(g: &GifsSystem, k: usize, budget: Budget) -> Result<PointCloud> {
    let opts = ShortcutOptions {
        budget,
        ..Default::default()
    };
    build_b_shortcut(g, k, &opts)?.cloud(k)
}

/// `{f_α(x0, .., x0) : α of depth k} = {S^α x0 + B^α}`.
pub fn attractor_from_seed(g: &GifsSystem, k: usize, x0: &Point, budget: Budget) -> Result<PointCloud> {
    let opts = ShortcutOptions {
        budget,
        diagonal_sums: true,
        ..Default::default()
    };
    build_b_shortcut(g, k, &opts)?.cloud_from(k, x0)
}

/// Level-`k` shortcut set when the exact level is too large to tabulate.
///
/// The set `{B^α}` at level `k` equals `F(S, .., S)` with `S` the level
/// `k - 1` set, so the deepest level within `budget` is tabulated exactly
/// and the rest are reached by decimated operator steps. Each step adds at
/// most `resolution * sqrt(d)` of Hausdorff error, which later steps
/// contract, so the total stays below `resolution * sqrt(d) / (1 - c)`.
pub fn attractor_shortcut_decimated(
    g: &GifsSystem,
    k: usize,
    resolution: f64,
    budget: Budget,
    exec: Execution,
) -> Result<PointCloud> {
    if k == 0 {
        return Err(GifsError::config("depth", "must be at least 1"));
    }
    let (n, m) = (g.len(), g.order());
    let exact = (1..=k)
        .take_while(|&l| shortcut_entries(n, m, l).is_some_and(|e| e <= budget.0 as u128))
        .last()
        .ok_or_else(|| GifsError::BudgetExceeded {
            needed: shortcut_entries(n, m, 1).unwrap_or(u128::MAX).to_string(),
            budget: budget.0,
        })?;
    let opts = ShortcutOptions {
        budget,
        exec,
        ..Default::default()
    };
    let mut cloud = decimate(&build_b_shortcut(g, exact, &opts)?.cloud(exact)?, resolution)?;
    for _ in exact..k {
        let refs = vec![&cloud; m];
        cloud = hutchinson_decimated(g, &refs, resolution, exec, Budget::work())?;
    }
    Ok(cloud)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codespace::{eval_f_alpha_recursive, EpsilonPath};
    use crate::hutchinson::simplified_hutchinson;

    fn system(n: usize, m: usize, d: usize, seed: u64) -> GifsSystem {
        // Small deterministic pseudo-random coefficients in [-0.3, 0.3].
        let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) * 0.6 - 0.3
        };
        let maps = (0..n)
            .map(|_| {
                let mats = (0..m)
                    .map(|_| Matrix::from_row_major(d, &(0..d * d).map(|_| next()).collect::<Vec<_>>()).unwrap())
                    .collect();
                AffineMap::new(mats, (0..d).map(|_| next() * 3.0).collect()).unwrap()
            })
            .collect();
        GifsSystem::affine(maps).unwrap()
    }

    #[test]
    fn entry_formulas() {
        assert_eq!(full_table_entries(2, 2, 1), Some(2 * 4));
        assert_eq!(full_table_entries(3, 2, 3), Some(2187 * (1 + 3 * 4)));
        assert_eq!(shortcut_entries(2, 2, 4), Some(2 + 32768));
    }

    #[test]
    fn level_one_is_the_raw_coefficients() {
        let g = system(3, 2, 2, 1);
        let t = build_tables_full(&g, 1, &TableOptions::default()).unwrap();
        let f = g.affine_maps().unwrap();
        for i in 0..3u32 {
            let idx = BigUint::from(i);
            assert_eq!(t.b(1, &idx).unwrap(), f[i as usize].translation());
            for p in 0..2 {
                assert_eq!(&t.a(1, &idx, p).unwrap(), f[i as usize].matrix(p as usize));
            }
        }
    }

    #[test]
    fn matrices_are_digit_products() {
        let g = system(2, 2, 2, 9);
        let opts = TableOptions {
            keep_history: true,
            ..Default::default()
        };
        let t = build_tables_full(&g, 3, &opts).unwrap();
        let f = g.affine_maps().unwrap();
        for addr in crate::codespace::enumerate_addresses(2, 2, 3, Budget::unlimited()).unwrap() {
            let n = encode_n(&addr);
            for p in 0..8u64 {
                let eps = EpsilonPath::from_index(2, 3, p).digits();
                let b1 = addr.level_block(1).digits()[0] - 1;
                let e1 = EpsilonPath::new(2, &eps[..1]).unwrap();
                let e2 = EpsilonPath::new(2, &eps[..2]).unwrap();
                let b2 = addr.level_block(2).at(&e1).unwrap() - 1;
                let b3 = addr.level_block(3).at(&e2).unwrap() - 1;
                let direct = f[b1]
                    .matrix(eps[0] - 1)
                    .mul(f[b2].matrix(eps[1] - 1))
                    .mul(f[b3].matrix(eps[2] - 1));
                assert!(t.a(3, &n, p).unwrap().max_abs_diff(&direct) <= 1e-12);
            }
        }
    }

    #[test]
    fn closed_form_matches_recursion() {
        let g = system(3, 2, 2, 4);
        let addr = Address::new(3, 2, &[2, 3, 1, 1, 2, 3, 3]).unwrap();
        let t = build_tables_for(&g, &addr, &TableOptions::default()).unwrap();
        let x: Vec<Point> = (0..8).map(|i| Point::from([i as f64 * 0.1, 1.0 - i as f64 * 0.2])).collect();
        let closed = eval_f_alpha_closed(&t, &addr, &x).unwrap();
        let rec = eval_f_alpha_recursive(&g, &addr, &x).unwrap();
        for (a, b) in closed.coords().iter().zip(rec.coords()) {
            assert!((a - b).abs() <= 1e-12);
        }
        let other = Address::new(3, 2, &[1, 3, 1, 1, 2, 3, 3]).unwrap();
        assert!(matches!(
            eval_f_alpha_closed(&t, &other, &x),
            Err(GifsError::LevelNotBuilt { .. })
        ));
    }

    #[test]
    fn zero_matrices_keep_the_head_translation() {
        let z = Matrix::zeros(2);
        let g = GifsSystem::affine(vec![
            AffineMap::new(vec![z.clone(), z.clone()], vec![1.0, 2.0]).unwrap(),
            AffineMap::new(vec![z.clone(), z], vec![-3.0, 0.5]).unwrap(),
        ])
        .unwrap();
        let sc = build_b_shortcut(&g, 3, &ShortcutOptions::default()).unwrap();
        let full = build_tables_full(&g, 3, &TableOptions::default()).unwrap();
        let head_radix = 2u64.pow(6);
        for idx in 0..128u64 {
            let expect = g.affine_maps().unwrap()[(idx / head_radix) as usize].translation();
            assert_eq!(sc.b(3, idx).unwrap(), expect);
            assert_eq!(full.b(3, &BigUint::from(idx)).unwrap(), expect);
        }
    }

    #[test]
    fn shortcut_is_iterated_operator_from_origin() {
        let g = system(2, 2, 2, 17);
        let mut s = PointCloud::singleton(Point::zeros(2));
        for k in 1..=3 {
            s = simplified_hutchinson(&g, &s).unwrap();
            let sc = attractor_shortcut(&g, k, Budget::unlimited()).unwrap();
            assert_eq!(PointCloud::from_points(sc.into_points()).unwrap().len(), s.len());
            assert!(s.iter().all(|p| sc_contains(&g, k, p)));
        }
    }

    fn sc_contains(g: &GifsSystem, k: usize, p: &Point) -> bool {
        attractor_shortcut(g, k, Budget::unlimited()).unwrap().contains(p)
    }

    #[test]
    fn seeded_cloud_at_origin_equals_shortcut() {
        let g = system(2, 3, 2, 5);
        let a = attractor_shortcut(&g, 2, Budget::unlimited()).unwrap();
        let b = attractor_from_seed(&g, 2, &Point::zeros(2), Budget::unlimited()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn budget_is_enforced() {
        let g = system(2, 2, 2, 3);
        assert!(matches!(
            build_b_shortcut(&g, 5, &ShortcutOptions { budget: Budget(1000), ..Default::default() }),
            Err(GifsError::BudgetExceeded { .. })
        ));
        assert!(matches!(
            build_tables_full(&g, 4, &TableOptions { budget: Budget(1000), ..Default::default() }),
            Err(GifsError::BudgetExceeded { .. })
        ));
    }
}
