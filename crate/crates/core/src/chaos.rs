//! Tree-indexed chaos game.
//!
//! Points are emitted in the order of the bijection `H` from
//! [`crate::codespace`]: `x[j, 1]` applies a random map to the current base
//! point on every argument, and `x[j, k]` for `k > 1` applies it to the `m`
//! points `x[mj-m+1, k-1], .., x[mj, k-1]`. The base point is `x0` until the
//! first point of level `> 1` appears and the latest such point afterwards.
//!
//! Only the most recent point per (level, branch) is ever needed, so state is
//! `m` lists indexed by level.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use rand_pcg::Pcg32;

use crate::codespace::{h_successor, IndexPair};
use crate::error::{GifsError, Result};
use crate::exec::Execution;
use crate::point::{Point, PointCloud};
use crate::system::GifsSystem;

/// Burn-in used when the start point is user supplied.
pub const DEFAULT_BURN_IN: usize = 200;

/// Seed and stream of a PCG-XSH-RR 64/32 generator.
///
/// Distinct streams with the same seed are independent sequences, which is
/// how parallel chains are split.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct RngSpec {
    pub seed: u64,
    pub stream: u64,
}

impl RngSpec {
    pub fn new(seed: u64) -> Self {
        RngSpec { seed, stream: 0 }
    }

    pub fn with_stream(self, stream: u64) -> Self {
        RngSpec { stream, ..self }
    }

    pub fn generator(&self) -> Pcg32 {
        Pcg32::new(self.seed, self.stream)
    }
}

/// A stream of 0-based map indices.
pub trait SymbolSource {
    fn next_symbol(&mut self) -> usize;
}

impl<I: Iterator<Item = usize>> SymbolSource for std::iter::Fuse<I> {
    fn next_symbol(&mut self) -> usize {
        self.next().expect("symbol stream exhausted")
    }
}

/// Random symbols, uniform or weighted by the system's probabilities.
#[derive(Debug, Clone)]
pub struct RandomSymbols {
    rng: Pcg32,
    choice: Choice,
}

#[derive(Debug, Clone)]
enum Choice {
    Uniform(usize),
    Weighted(WeightedIndex<f64>),
}

impl RandomSymbols {
    pub fn new(g: &GifsSystem, rng: RngSpec) -> Result<Self> {
        let choice = match g.probabilities() {
            Some(p) => Choice::Weighted(
                WeightedIndex::new(p)
                    .map_err(|e| GifsError::config("probabilities", e.to_string()))?,
            ),
            None => Choice::Uniform(g.len()),
        };
        Ok(RandomSymbols {
            rng: rng.generator(),
            choice,
        })
    }
}

impl SymbolSource for RandomSymbols {
    fn next_symbol(&mut self) -> usize {
        match &self.choice {
            Choice::Uniform(n) => self.rng.random_range(0..*n),
            Choice::Weighted(w) => w.sample(&mut self.rng),
        }
    }
}

/// The running game: current index pair, level lists and symbol stream.
#[derive(Debug, Clone)]
pub struct ChaosState<S = RandomSymbols> {
    pair: IndexPair,
    /// `z[i][level]`; slot 0 of every list holds the base point.
    z: Vec<Vec<Option<Point>>>,
    emitted: u64,
    symbols: S,
}

impl<S: SymbolSource> ChaosState<S> {
    pub fn pair(&self) -> IndexPair {
        self.pair
    }

    pub fn emitted(&self) -> u64 {
        self.emitted
    }

    /// Deepest level slot allocated so far.
    pub fn depth(&self) -> usize {
        self.z[0].len() - 1
    }

    pub fn base_point(&self) -> &Point {
        self.z[0][0].as_ref().expect("base point always set")
    }

    fn store(&mut self, branch: usize, level: usize, p: Point) {
        let list = &mut self.z[branch - 1];
        if list.len() <= level {
            for l in self.z.iter_mut() {
                l.resize(level + 1, None);
            }
        }
        self.z[branch - 1][level] = Some(p);
    }

    fn emit(&mut self, g: &GifsSystem, pair: IndexPair) -> Point {
        let level = pair.k - 1;
        let args: Vec<&Point> = self
            .z
            .iter()
            .map(|l| l[level].as_ref().expect("slot read before written"))
            .collect();
        let gamma = self.symbols.next_symbol();
        let p = g.eval_unchecked(gamma, &args);
        self.store(pair.branch(g.order()), pair.k, p.clone());
        self.emitted += 1;
        p
    }
}

/// Seeds the lists with `x0` and emits `x[1, 1]`.
pub fn chaos_init_with<S: SymbolSource>(
    g: &GifsSystem,
    x0: Point,
    symbols: S,
) -> Result<(ChaosState<S>, Point)> {
    if x0.dim() != g.dim() {
        return Err(GifsError::Dimension {
            expected: g.dim(),
            got: x0.dim(),
        });
    }
    let mut state = ChaosState {
        pair: IndexPair::FIRST,
        z: vec![vec![Some(x0)]; g.order()],
        emitted: 0,
        symbols,
    };
    let p = state.emit(g, IndexPair::FIRST);
    Ok((state, p))
}

pub fn chaos_init(g: &GifsSystem, x0: Point, rng: RngSpec) -> Result<(ChaosState, Point)> {
    chaos_init_with(g, x0, RandomSymbols::new(g, rng)?)
}

/// Advances to the successor pair and emits its point.
pub fn chaos_step<S: SymbolSource>(state: &mut ChaosState<S>, g: &GifsSystem) -> Point {
    let m = g.order();
    let next = h_successor(state.pair, m);
    let p = state.emit(g, next);
    state.pair = next;
    if next.k > 1 && !next.j.is_multiple_of(m as u64) {
        // Top of an ascending chain: the next leaf starts from here.
        for l in state.z.iter_mut() {
            l[0] = Some(p.clone());
        }
    }
    p
}

/// Options for [`chaos_run`].
#[derive(Debug, Clone, Default)]
pub struct ChaosOptions {
    /// Start point; the fixed point of the first map when `None`.
    pub x0: Option<Point>,
    /// Points discarded at the start; 0 for the default start, else
    /// [`DEFAULT_BURN_IN`].
    pub burn_in: Option<usize>,
    pub rng: RngSpec,
}

/// Emits `count` points and returns all but the first `burn_in` as a cloud.
pub fn chaos_run(g: &GifsSystem, count: usize, opts: &ChaosOptions) -> Result<PointCloud> {
    let (x0, default_burn) = match &opts.x0 {
        Some(p) => (p.clone(), DEFAULT_BURN_IN),
        None => (g.fixed_point(0)?, 0),
    };
    let burn_in = opts.burn_in.unwrap_or(default_burn);
    if count <= burn_in {
        return Err(GifsError::config(
            "points",
            format!("point count {count} must exceed burn-in {burn_in}"),
        ));
    }
    let (mut state, first) = chaos_init(g, x0, opts.rng)?;
    let mut cloud = PointCloud::new(g.dim());
    if burn_in == 0 {
        cloud.insert(first)?;
    }
    for i in 1..count {
        let p = chaos_step(&mut state, g);
        if i >= burn_in {
            cloud.insert(p)?;
        }
    }
    Ok(cloud)
}

/// Independent chains on streams `0..chains`, unioned in stream order.
pub fn chaos_run_chains(
    g: &GifsSystem,
    count_per_chain: usize,
    chains: usize,
    opts: &ChaosOptions,
    exec: Execution,
) -> Result<PointCloud> {
    if chains == 0 {
        return Err(GifsError::config("chains", "must be at least 1"));
    }
    let clouds = exec.map_range(chains, |c| {
        let o = ChaosOptions {
            rng: opts.rng.with_stream(opts.rng.stream.wrapping_add(c as u64)),
            ..opts.clone()
        };
        chaos_run(g, count_per_chain, &o)
    });
    let mut out = PointCloud::new(g.dim());
    for c in clouds {
        for p in c?.into_points() {
            out.insert(p)?;
        }
    }
    Ok(out)
}

/// Direct evaluation of the defining recursion, storing every point.
///
/// `symbols[i]` is the 0-based map used for the `(i+1)`-th point. Memory is
/// linear in the length; meant as a reference for the streaming game.
pub fn memoized_sequence(g: &GifsSystem, x0: &Point, symbols: &[usize]) -> Vec<Point> {
    use crate::codespace::{h_index, h_pairs};
    let m = g.order() as u64;
    let mut xs: Vec<Point> = Vec::with_capacity(symbols.len());
    let mut base = x0.clone();
    for (pair, &gamma) in h_pairs(g.order()).zip(symbols) {
        let p = if pair.k == 1 {
            let args = vec![&base; g.order()];
            g.eval_unchecked(gamma, &args)
        } else {
            let args: Vec<&Point> = (1..=m)
                .map(|i| {
                    let child = IndexPair::new(m * pair.j - m + i, pair.k - 1);
                    &xs[h_index(child, g.order()).expect("index fits") as usize - 1]
                })
                .collect();
            let p = g.eval_unchecked(gamma, &args);
            base = p.clone();
            p
        };
        xs.push(p);
    }
    xs
}
