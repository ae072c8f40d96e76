//! Code-space arithmetic.
//!
//! An address of depth `k` is a tuple `(α^1, .., α^k)` where `α^1` is a map
//! symbol and `α^{s+1}` is an `m`-tuple of level-`s` blocks. Addresses are
//! stored flattened: all brackets dropped, giving `1 + m + .. + m^{k-1}`
//! digits. Digits and branch numbers are 1-based at the API boundary, the
//! convention used when writing addresses down; internally they are 0-based.
//!
//! The index `N(α, k)` of an address is its flat digit string read in base
//! `n`; `M(β, k)` is the same for a single level block and `P(ε, k)` reads an
//! m-ary path `ε` in base `m`.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use std::ops::{Add, Div, Mul, Rem, Sub};

use crate::budget::Budget;
use crate::error::{GifsError, Result};
use crate::point::Point;
use crate::system::GifsSystem;

/// Arbitrary-precision index; code-space indices outgrow 64 bits quickly.
pub type BigIndex = BigUint;

/// Number of digits in a level-`k` block: `m^(k-1)`.
pub fn block_len(m: usize, k: usize) -> Option<u64> {
    (m as u64).checked_pow(u32::try_from(k.checked_sub(1)?).ok()?)
}

/// Number of digits in a depth-`k` address: `1 + m + .. + m^(k-1)`.
pub fn address_len(m: usize, k: usize) -> Option<u64> {
    (1..=k).try_fold(0u64, |acc, s| acc.checked_add(block_len(m, s)?))
}

/// `card(Ω_k) = n^(m^(k-1))`, `None` on overflow.
pub fn block_count(n: usize, m: usize, k: usize) -> Option<u128> {
    (n as u128).checked_pow(u32::try_from(block_len(m, k)?).ok()?)
}

/// `card(_kΩ) = n^((m^k - 1)/(m - 1))`, `None` on overflow.
pub fn address_count(n: usize, m: usize, k: usize) -> Option<u128> {
    (n as u128).checked_pow(u32::try_from(address_len(m, k)?).ok()?)
}

// ---------------------------------------------------------------------------
// The bijection N x N -> N ordering the chaos game
// ---------------------------------------------------------------------------

/// A node `(j, k)` of the emission tree: the `j`-th point at level `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IndexPair {
    pub j: u64,
    pub k: usize,
}

impl IndexPair {
    pub const FIRST: IndexPair = IndexPair { j: 1, k: 1 };

    pub fn new(j: u64, k: usize) -> Self {
        assert!(j >= 1 && k >= 1, "index pairs are positive");
        IndexPair { j, k }
    }

    /// Branch of this node under its parent, in `1..=m`.
    pub fn branch(self, m: usize) -> usize {
        match (self.j % m as u64) as usize {
            0 => m,
            r => r,
        }
    }
}

/// The pair emitted right after `p`.
///
/// A node whose index is not a multiple of `m` is followed by the first leaf
/// after its subtree, `(m^(k-1) j + 1, 1)`; otherwise by its parent
/// `(j / m, k + 1)`.
pub fn h_successor(p: IndexPair, m: usize) -> IndexPair {
    let m64 = m as u64;
    if !p.j.is_multiple_of(m64) {
        let scale = m64
            .checked_pow((p.k - 1) as u32)
            .and_then(|s| s.checked_mul(p.j))
            .and_then(|s| s.checked_add(1))
            .expect("index pair overflowed u64");
        IndexPair { j: scale, k: 1 }
    } else {
        IndexPair {
            j: p.j / m64,
            k: p.k + 1,
        }
    }
}

/// Position of `p` in emission order (1-based).
///
/// Node `(j, k)` closes leaf `E = j m^(k-1)`. Before it come every node of
/// level `<= k` whose leaf span ends at or before `E`, and every node of a
/// higher level whose span ends strictly before `E`. `None` when the pair is
/// unreachable (`m = 1`, `j > 1`) or the value overflows.
pub fn h_index(p: IndexPair, m: usize) -> Option<u64> {
    if m == 1 {
        return (p.j == 1).then_some(p.k as u64);
    }
    let m = m as u128;
    let e = (p.j as u128).checked_mul(m.checked_pow((p.k - 1) as u32)?)?;
    let mut total: u128 = 0;
    let mut width: u128 = 1;
    for _ in 0..p.k {
        total += e / width;
        width = width.checked_mul(m)?;
    }
    while width < e {
        total += (e - 1) / width;
        width = width.checked_mul(m)?;
    }
    u64::try_from(total).ok()
}

/// The pair at emission position `i >= 1`, by walking successors from `(1, 1)`.
pub fn h_inverse(i: u64, m: usize) -> IndexPair {
    assert!(i >= 1, "emission positions start at 1");
    h_pairs(m).nth((i - 1) as usize).expect("infinite iterator")
}

/// All pairs in emission order, starting at `(1, 1)`.
pub fn h_pairs(m: usize) -> impl Iterator<Item = IndexPair> {
    std::iter::successors(Some(IndexPair::FIRST), move |&p| Some(h_successor(p, m)))
}

// ---------------------------------------------------------------------------
// Digit strings
// ---------------------------------------------------------------------------

fn check_digits(values: &[usize], base: usize, what: &str) -> Result<Vec<u32>> {
    values
        .iter()
        .map(|&v| {
            if v >= 1 && v <= base {
                Ok((v - 1) as u32)
            } else {
                Err(GifsError::InvalidSystem(format!(
                    "{what} digit {v} outside 1..={base}"
                )))
            }
        })
        .collect()
}

fn base_value(digits: &[u32], base: usize) -> BigIndex {
    let b = BigUint::from(base);
    digits
        .iter()
        .fold(BigUint::zero(), |acc, &d| acc * &b + BigUint::from(d))
}

pub(crate) fn base_digits(value: &BigIndex, base: usize, len: usize) -> Option<Vec<u32>> {
    let b = BigUint::from(base);
    let mut v = value.clone();
    let mut out = vec![0u32; len];
    for slot in out.iter_mut().rev() {
        if base > 1 {
            *slot = (&v % &b).to_u32().expect("digit < base");
            v /= &b;
        }
    }
    v.is_zero().then_some(out)
}

/// A path `(ε_1, .., ε_k)` with `ε_i` in `1..=m`, selecting a leaf of X_k.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EpsilonPath {
    m: usize,
    digits: Vec<u32>,
}

impl EpsilonPath {
    /// From 1-based digits.
    pub fn new(m: usize, digits: &[usize]) -> Result<Self> {
        Ok(EpsilonPath {
            m,
            digits: check_digits(digits, m, "path")?,
        })
    }

    /// The `p`-th path of length `k` in lexicographic order (0-based).
    pub fn from_index(m: usize, k: usize, p: u64) -> Self {
        let mut digits = vec![0u32; k];
        let mut rest = p;
        for slot in digits.iter_mut().rev() {
            *slot = (rest % m as u64) as u32;
            rest /= m as u64;
        }
        EpsilonPath { m, digits }
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    /// 1-based digits.
    pub fn digits(&self) -> Vec<usize> {
        self.digits.iter().map(|&d| d as usize + 1).collect()
    }

    /// `P(ε, k)` as a machine word.
    pub fn position(&self) -> u64 {
        self.digits
            .iter()
            .fold(0u64, |acc, &d| acc * self.m as u64 + d as u64)
    }

    /// The path without its last step.
    pub fn parent(&self) -> EpsilonPath {
        EpsilonPath {
            m: self.m,
            digits: self.digits[..self.digits.len().saturating_sub(1)].to_vec(),
        }
    }

    /// Last step, 1-based.
    pub fn last(&self) -> Option<usize> {
        self.digits.last().map(|&d| d as usize + 1)
    }
}

/// `P(ε, k) = (ε_1 - 1) m^(k-1) + .. + (ε_k - 1)`.
pub fn encode_p(eps: &EpsilonPath) -> BigIndex {
    base_value(&eps.digits, eps.m)
}

/// An element of Ω_k: `m^(k-1)` symbols in `1..=n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LevelBlock {
    n: usize,
    m: usize,
    k: usize,
    digits: Vec<u32>,
}

impl LevelBlock {
    /// From 1-based flat digits.
    pub fn new(n: usize, m: usize, k: usize, digits: &[usize]) -> Result<Self> {
        let len = block_len(m, k).ok_or_else(|| GifsError::InvalidSystem("level too deep".into()))?;
        if digits.len() as u64 != len {
            return Err(GifsError::Dimension {
                expected: len as usize,
                got: digits.len(),
            });
        }
        Ok(LevelBlock {
            n,
            m,
            k,
            digits: check_digits(digits, n, "block")?,
        })
    }

    pub fn from_index(n: usize, m: usize, k: usize, index: &BigIndex) -> Option<Self> {
        let len = block_len(m, k)? as usize;
        Some(LevelBlock {
            n,
            m,
            k,
            digits: base_digits(index, n, len)?,
        })
    }

    pub fn level(&self) -> usize {
        self.k
    }

    /// 1-based flat digits.
    pub fn digits(&self) -> Vec<usize> {
        self.digits.iter().map(|&d| d as usize + 1).collect()
    }

    /// Direct lookup of `β_(ε_1..ε_{k-1})`, 1-based.
    pub fn at(&self, eps: &EpsilonPath) -> Result<usize> {
        self.check_path(eps)?;
        Ok(self.digits[eps.position() as usize] as usize + 1)
    }

    fn check_path(&self, eps: &EpsilonPath) -> Result<()> {
        if eps.len() + 1 != self.k || eps.m != self.m {
            return Err(GifsError::Dimension {
                expected: self.k - 1,
                got: eps.len(),
            });
        }
        Ok(())
    }
}

/// `M(β, k)`: the block's digits read in base `n`.
pub fn encode_m(block: &LevelBlock) -> BigIndex {
    base_value(&block.digits, block.n)
}

/// `β_(ε)` extracted arithmetically from `M(β, k)`:
/// `floor(M / n^(m^(k-1) - 1 - P(ε))) mod n + 1`.
pub fn digit_at(block: &LevelBlock, eps: &EpsilonPath) -> Result<usize> {
    block.check_path(eps)?;
    let len = block.digits.len() as u64;
    let shift = len - 1 - eps.position();
    let n = BigUint::from(block.n);
    let digit = (encode_m(block) / n.pow(shift as u32)) % &n;
    Ok(digit.to_usize().expect("digit < n") + 1)
}

/// An element of `_kΩ`, stored as its flat digit string.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Address {
    n: usize,
    m: usize,
    k: usize,
    digits: Vec<u32>,
}

impl Address {
    /// From 1-based flat digits; the depth is inferred from the length.
    pub fn new(n: usize, m: usize, digits: &[usize]) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(GifsError::InvalidSystem("n and m must be >= 1".into()));
        }
        let mut k = 0;
        while address_len(m, k).is_some_and(|l| l < digits.len() as u64) {
            k += 1;
        }
        if k == 0 || address_len(m, k) != Some(digits.len() as u64) {
            return Err(GifsError::InvalidSystem(format!(
                "{} digits is not a valid address length for m = {m}",
                digits.len()
            )));
        }
        Ok(Address {
            n,
            m,
            k,
            digits: check_digits(digits, n, "address")?,
        })
    }

    /// The address whose index is `N`.
    pub fn from_index(n: usize, m: usize, k: usize, index: &BigIndex) -> Option<Self> {
        let len = address_len(m, k)? as usize;
        Some(Address {
            n,
            m,
            k,
            digits: base_digits(index, n, len)?,
        })
    }

    pub fn depth(&self) -> usize {
        self.k
    }

    pub fn symbols(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.m
    }

    /// 1-based flat digits.
    pub fn digits(&self) -> Vec<usize> {
        self.digits.iter().map(|&d| d as usize + 1).collect()
    }

    /// `α^1` as a 0-based map index.
    pub fn head(&self) -> usize {
        self.digits[0] as usize
    }

    /// The level block `α^s`, `1 <= s <= k`.
    pub fn level_block(&self, s: usize) -> LevelBlock {
        assert!(s >= 1 && s <= self.k, "level {s} outside 1..={}", self.k);
        let start = address_len(self.m, s - 1).unwrap() as usize;
        let end = address_len(self.m, s).unwrap() as usize;
        LevelBlock {
            n: self.n,
            m: self.m,
            k: s,
            digits: self.digits[start..end].to_vec(),
        }
    }

    /// `α' = (α^1, .., α^{k-1})`.
    pub fn prefix(&self) -> Option<Address> {
        (self.k > 1).then(|| {
            let len = address_len(self.m, self.k - 1).unwrap() as usize;
            Address {
                n: self.n,
                m: self.m,
                k: self.k - 1,
                digits: self.digits[..len].to_vec(),
            }
        })
    }

    /// `α⌢γ`: append a level-`k+1` block.
    pub fn extend(&self, block: &LevelBlock) -> Result<Address> {
        if block.k != self.k + 1 || block.n != self.n || block.m != self.m {
            return Err(GifsError::InvalidSystem(format!(
                "cannot extend a depth-{} address by a level-{} block",
                self.k, block.k
            )));
        }
        let mut digits = self.digits.clone();
        digits.extend_from_slice(&block.digits);
        Ok(Address {
            n: self.n,
            m: self.m,
            k: self.k + 1,
            digits,
        })
    }
}

/// `N(α, k)`: the flat digit string read in base `n`.
pub fn encode_n(addr: &Address) -> BigIndex {
    base_value(&addr.digits, addr.n)
}

/// `α(i) = (α^2_i, α^3_i, .., α^k_i)` for a branch `i` in `1..=m`.
pub fn subaddress(addr: &Address, i: usize) -> Result<Address> {
    if i < 1 || i > addr.m {
        return Err(GifsError::IndexOutOfRange {
            index: i,
            bound: addr.m,
        });
    }
    if addr.k < 2 {
        return Err(GifsError::InvalidSystem("depth-1 addresses have no sub-addresses".into()));
    }
    let mut digits = Vec::with_capacity(address_len(addr.m, addr.k - 1).unwrap() as usize);
    for s in 2..=addr.k {
        let start = address_len(addr.m, s - 1).unwrap() as usize;
        let sub = block_len(addr.m, s - 1).unwrap() as usize;
        let from = start + (i - 1) * sub;
        digits.extend_from_slice(&addr.digits[from..from + sub]);
    }
    Ok(Address {
        n: addr.n,
        m: addr.m,
        k: addr.k - 1,
        digits,
    })
}

/// `N(α(j), k-1)` computed from `N(α, k)` alone.
///
/// Each `M(α^i_j, i-1) = floor(N / n^(L_k - L_{i-1} - j m^(i-2))) mod n^(m^(i-2))`
/// and the child index is `Σ_{i=2..k} M(α^i_j, i-1) n^(L_{k-1} - L_{i-1})`,
/// where `L_s` is the digit count of a depth-`s` address.
pub fn child_index<T>(n: usize, m: usize, k: usize, index: &T, j: usize) -> T
where
    T: Clone
        + Zero
        + One
        + From<u32>
        + Add<Output = T>
        + Sub<Output = T>
        + Mul<Output = T>
        + Div<Output = T>
        + Rem<Output = T>,
{
    assert!(k >= 2, "child indices need depth >= 2");
    assert!(j >= 1 && j <= m, "branch {j} outside 1..={m}");
    let base = T::from(n as u32);
    let pow = |e: u64| num_traits::pow::pow(base.clone(), e as usize);
    let lk = address_len(m, k).unwrap();
    let lk1 = address_len(m, k - 1).unwrap();
    let mut acc = T::zero();
    for i in 2..=k {
        let li1 = address_len(m, i - 1).unwrap();
        let sub = block_len(m, i - 1).unwrap();
        let shift = lk - li1 - j as u64 * sub;
        let block = (index.clone() / pow(shift)) % pow(sub);
        acc = acc + block * pow(lk1 - li1);
    }
    acc
}

/// `N(α(j), k-1)` for an address, via [`child_index`].
pub fn child_n(addr: &Address, j: usize) -> Result<BigIndex> {
    if j < 1 || j > addr.m {
        return Err(GifsError::IndexOutOfRange {
            index: j,
            bound: addr.m,
        });
    }
    if addr.k < 2 {
        return Err(GifsError::InvalidSystem("depth-1 addresses have no children".into()));
    }
    Ok(child_index(addr.n, addr.m, addr.k, &encode_n(addr), j))
}

/// All depth-`k` addresses in increasing `N` order.
pub fn enumerate_addresses(
    n: usize,
    m: usize,
    k: usize,
    budget: Budget,
) -> Result<impl Iterator<Item = Address>> {
    if n == 0 || m == 0 || k == 0 {
        return Err(GifsError::InvalidSystem("n, m and k must be >= 1".into()));
    }
    let count = address_count(n, m, k);
    budget.check(count)?;
    let len = address_len(m, k).unwrap() as usize;
    let mut digits = Some(vec![0u32; len]);
    Ok(std::iter::from_fn(move || {
        let current = digits.take()?;
        let mut next = current.clone();
        let mut carry = true;
        for d in next.iter_mut().rev() {
            if (*d as usize) + 1 < n {
                *d += 1;
                carry = false;
                break;
            }
            *d = 0;
        }
        if !carry {
            digits = Some(next);
        }
        Some(Address {
            n,
            m,
            k,
            digits: current,
        })
    }))
}

/// `f_α(x)` by its defining recursion
/// `f_α(x_1..x_m) = f_{α^1}(f_{α(1)}(x_1), .., f_{α(m)}(x_m))`.
///
/// `x` holds the `m^k` leaves in path order (`x_(ε)` at position `P(ε, k)`).
pub fn eval_f_alpha_recursive(g: &GifsSystem, addr: &Address, x: &[Point]) -> Result<Point> {
    let leaves = block_len(addr.m, addr.k + 1)
        .ok_or_else(|| GifsError::InvalidSystem("address too deep".into()))? as usize;
    if x.len() != leaves {
        return Err(GifsError::Arity {
            expected: leaves,
            got: x.len(),
        });
    }
    if addr.m != g.order() || addr.n != g.len() {
        return Err(GifsError::InvalidSystem(format!(
            "address over (n={}, m={}) used with a system of {} maps of order {}",
            addr.n,
            addr.m,
            g.len(),
            g.order()
        )));
    }
    recurse(g, addr, x)
}

fn recurse(g: &GifsSystem, addr: &Address, x: &[Point]) -> Result<Point> {
    if addr.k == 1 {
        return g.eval_map(addr.head(), x);
    }
    let width = x.len() / addr.m;
    let inner = (1..=addr.m)
        .map(|i| recurse(g, &subaddress(addr, i)?, &x[(i - 1) * width..i * width]))
        .collect::<Result<Vec<_>>>()?;
    g.eval_map(addr.head(), &inner)
}
