//! Boolean functions as complete truth tables.
//!
//! Bit order is fixed crate-wide: the table entry at index `a` is `f(x)`
//! where `x_i` is bit `i - 1` of `a`, so `x_1` is the least significant bit.
//! Variables are numbered from 1 in every public API.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest variable count a [`TruthTable`] may have (16 MiB of bits).
pub const MAX_VARS: usize = 24;

/// Largest `n` accepted by [`enumerate_monotone`].
pub const MAX_MONOTONE_ENUM: usize = 5;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TruthTable {
    n: usize,
    words: Vec<u64>,
}

fn word_count(n: usize) -> usize {
    if n < 6 {
        1
    } else {
        1 << (n - 6)
    }
}

fn tail_mask(n: usize) -> u64 {
    if n < 6 {
        (1u64 << (1u32 << n)) - 1
    } else {
        u64::MAX
    }
}

impl TruthTable {
    /// The constant function on `n` variables. `n = 0` is allowed and
    /// denotes the value left after every variable has been fixed.
    pub fn constant(n: usize, value: bool) -> Result<Self> {
        check_n(n)?;
        let fill = if value { u64::MAX } else { 0 };
        let mut words = vec![fill; word_count(n)];
        words[0] &= tail_mask(n);
        Ok(TruthTable { n, words })
    }

    pub fn from_fn(n: usize, f: impl Fn(usize) -> bool) -> Result<Self> {
        let mut t = TruthTable::constant(n, false)?;
        for a in 0..t.len() {
            if f(a) {
                t.words[a >> 6] |= 1 << (a & 63);
            }
        }
        Ok(t)
    }

    /// The projection `x_i`.
    pub fn var(n: usize, i: usize) -> Result<Self> {
        check_var(n, i)?;
        TruthTable::from_fn(n, |a| a >> (i - 1) & 1 == 1)
    }

    pub fn parity(n: usize) -> Result<Self> {
        TruthTable::from_fn(n, |a| a.count_ones() % 2 == 1)
    }

    pub fn and_all(n: usize) -> Result<Self> {
        let full = (1usize << n) - 1;
        TruthTable::from_fn(n, |a| a == full)
    }

    pub fn or_all(n: usize) -> Result<Self> {
        TruthTable::from_fn(n, |a| a != 0)
    }

    /// Builds a table from raw little-endian words; bits beyond `2^n` must be
    /// zero.
    pub fn from_words(n: usize, words: Vec<u64>) -> Result<Self> {
        check_n(n)?;
        if words.len() != word_count(n) {
            return Err(Error::SizeMismatch {
                expected: word_count(n),
                got: words.len(),
            });
        }
        if words[0] & !tail_mask(n) != 0 && n < 6 {
            return Err(Error::Format("bits set beyond 2^n".into()));
        }
        Ok(TruthTable { n, words })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of table entries, `2^n`.
    pub fn len(&self) -> usize {
        1 << self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, a: usize) -> bool {
        self.words[a >> 6] >> (a & 63) & 1 == 1
    }

    pub fn eval(&self, x: &[bool]) -> bool {
        debug_assert_eq!(x.len(), self.n);
        let a = x
            .iter()
            .enumerate()
            .fold(0usize, |acc, (i, &b)| acc | (b as usize) << i);
        self.get(a)
    }

    pub fn count_ones(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    /// `Some(v)` when the function is constantly `v`.
    pub fn constant_value(&self) -> Option<bool> {
        let ones = self.count_ones();
        if ones == 0 {
            Some(false)
        } else if ones == self.len() as u64 {
            Some(true)
        } else {
            None
        }
    }

    pub fn is_constant(&self) -> bool {
        self.constant_value().is_some()
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(move |&a| self.get(a))
    }

    pub fn not(&self) -> TruthTable {
        let mut words: Vec<u64> = self.words.iter().map(|w| !w).collect();
        words[0] &= tail_mask(self.n);
        TruthTable { n: self.n, words }
    }

    fn zip(&self, other: &TruthTable, op: impl Fn(u64, u64) -> u64) -> Result<TruthTable> {
        if self.n != other.n {
            return Err(Error::SizeMismatch {
                expected: self.n,
                got: other.n,
            });
        }
        let words = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(&a, &b)| op(a, b))
            .collect();
        Ok(TruthTable { n: self.n, words })
    }

    pub fn and(&self, other: &TruthTable) -> Result<TruthTable> {
        self.zip(other, |a, b| a & b)
    }

    pub fn or(&self, other: &TruthTable) -> Result<TruthTable> {
        self.zip(other, |a, b| a | b)
    }

    pub fn xor(&self, other: &TruthTable) -> Result<TruthTable> {
        self.zip(other, |a, b| a ^ b)
    }

    /// Pointwise `self ≤ other`.
    pub fn le(&self, other: &TruthTable) -> bool {
        self.n == other.n && self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    /// Fixes `x_i = value` and renumbers the remaining variables.
    pub fn restrict_var(&self, i: usize, value: bool) -> Result<TruthTable> {
        check_var(self.n, i)?;
        let pos = i - 1;
        let low = (1usize << pos) - 1;
        let bit = (value as usize) << pos;
        TruthTable::from_fn(self.n - 1, |b| {
            let a = (b & low) | ((b & !low) << 1) | bit;
            self.get(a)
        })
    }

    pub fn restrict(&self, assignment: &PartialAssignment) -> Result<TruthTable> {
        assignment.validate(self.n)?;
        let mut fixed_mask = 0usize;
        let mut base = 0usize;
        for &(i, b) in assignment.pairs() {
            fixed_mask |= 1 << (i - 1);
            base |= (b as usize) << (i - 1);
        }
        let free: Vec<usize> = (0..self.n).filter(|p| fixed_mask >> p & 1 == 0).collect();
        TruthTable::from_fn(free.len(), |b| {
            let a = free
                .iter()
                .enumerate()
                .fold(base, |acc, (k, &p)| acc | (b >> k & 1) << p);
            self.get(a)
        })
    }

    /// True iff `f(y) ≤ f(x)` whenever `y ≤ x` pointwise.
    pub fn is_monotone(&self) -> bool {
        (0..self.n).all(|i| {
            let bit = 1usize << i;
            (0..self.len())
                .filter(|a| a & bit == 0)
                .all(|a| !self.get(a) || self.get(a | bit))
        })
    }

    pub fn depends_on(&self, i: usize) -> bool {
        let bit = 1usize << (i - 1);
        (0..self.len())
            .filter(|a| a & bit == 0)
            .any(|a| self.get(a) != self.get(a | bit))
    }

    /// Variables (1-based) the function actually depends on.
    pub fn support(&self) -> Vec<usize> {
        (1..=self.n).filter(|&i| self.depends_on(i)).collect()
    }

    /// `g(x) = f(π·x)` where `(π·x)_{π(i)} = x_i`; `images[i-1] = π(i)`.
    pub fn permute(&self, images: &[usize]) -> Result<TruthTable> {
        let perm = Permutation::new(self.n, images.to_vec())?;
        TruthTable::from_fn(self.n, |a| self.get(perm.apply_to_index(a)))
    }

    /// Checks invariance under every generator and transitivity of the
    /// generated group. The group itself is never materialized.
    pub fn invariance(&self, group: &PermutationGroup) -> Result<Invariance> {
        if group.n != self.n {
            return Err(Error::SizeMismatch {
                expected: self.n,
                got: group.n,
            });
        }
        let invariant = group
            .generators
            .iter()
            .all(|g| (0..self.len()).all(|a| self.get(a) == self.get(g.apply_to_index(a))));
        Ok(Invariance {
            invariant,
            transitive: group.is_transitive(),
        })
    }

    /// Little-endian hex encoding: bit `a` of the byte stream is `f(a)`.
    pub fn to_hex(&self) -> String {
        let nbytes = (self.len() / 8).max(1);
        let mut s = String::with_capacity(nbytes * 2);
        for k in 0..nbytes {
            let byte = (self.words[k / 8] >> ((k % 8) * 8)) & 0xff;
            s.push_str(&format!("{byte:02x}"));
        }
        s
    }

    pub fn from_hex(n: usize, hex: &str) -> Result<TruthTable> {
        check_n(n)?;
        let len = 1usize << n;
        let nbytes = (len / 8).max(1);
        let hex = hex.trim();
        if hex.len() != nbytes * 2 {
            return Err(Error::Format(format!(
                "bits_hex has {} hex digits, expected {}",
                hex.len(),
                nbytes * 2
            )));
        }
        let mut words = vec![0u64; word_count(n)];
        for k in 0..nbytes {
            let byte = u8::from_str_radix(&hex[2 * k..2 * k + 2], 16).map_err(|_| {
                Error::Format(format!("invalid hex digit near offset {}", 2 * k))
            })?;
            words[k / 8] |= (byte as u64) << ((k % 8) * 8);
        }
        TruthTable::from_words(n, words)
    }

    pub fn to_file(&self) -> FunctionFile {
        FunctionFile {
            n: self.n,
            bits_hex: self.to_hex(),
        }
    }

    /// Bits as a `0`/`1` string in index order (index 0 first).
    pub fn bit_string(&self) -> String {
        (0..self.len())
            .map(|a| if self.get(a) { '1' } else { '0' })
            .collect()
    }
}

impl fmt::Debug for TruthTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TruthTable(n={}, {})", self.n, self.bit_string())
    }
}

/// On-disk function format: `{"n": int, "bits_hex": string}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctionFile {
    pub n: usize,
    pub bits_hex: String,
}

impl FunctionFile {
    pub fn to_table(&self) -> Result<TruthTable> {
        TruthTable::from_hex(self.n, &self.bits_hex)
    }
}

impl Serialize for TruthTable {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_file().serialize(s)
    }
}

impl<'de> Deserialize<'de> for TruthTable {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        FunctionFile::deserialize(d)?
            .to_table()
            .map_err(serde::de::Error::custom)
    }
}

fn check_n(n: usize) -> Result<()> {
    if n > MAX_VARS {
        Err(Error::VariableCount { n, max: MAX_VARS })
    } else {
        Ok(())
    }
}

fn check_var(n: usize, i: usize) -> Result<()> {
    if i == 0 || i > n {
        Err(Error::VariableIndex { index: i, n })
    } else {
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Invariance {
    pub invariant: bool,
    pub transitive: bool,
}

/// A set of `(variable, bit)` pairs with distinct variables.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartialAssignment {
    assigned: Vec<(usize, bool)>,
}

impl PartialAssignment {
    pub fn new(pairs: impl IntoIterator<Item = (usize, bool)>) -> Result<Self> {
        let assigned: Vec<(usize, bool)> = pairs.into_iter().collect();
        let mut seen = std::collections::BTreeSet::new();
        for &(i, _) in &assigned {
            if i == 0 {
                return Err(Error::VariableIndex { index: 0, n: 0 });
            }
            if !seen.insert(i) {
                return Err(Error::DuplicateVariable(i));
            }
        }
        Ok(PartialAssignment { assigned })
    }

    pub fn empty() -> Self {
        PartialAssignment::default()
    }

    pub fn pairs(&self) -> &[(usize, bool)] {
        &self.assigned
    }

    pub fn len(&self) -> usize {
        self.assigned.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assigned.is_empty()
    }

    pub fn get(&self, i: usize) -> Option<bool> {
        self.assigned.iter().find(|p| p.0 == i).map(|p| p.1)
    }

    fn validate(&self, n: usize) -> Result<()> {
        for &(i, _) in &self.assigned {
            check_var(n, i)?;
        }
        Ok(())
    }
}

/// A bijection of `{1..n}` stored as its image list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn new(n: usize, images: Vec<usize>) -> Result<Self> {
        if images.len() != n {
            return Err(Error::InvalidPermutation(format!(
                "{} images for {n} points",
                images.len()
            )));
        }
        let mut seen = vec![false; n + 1];
        for &p in &images {
            if p == 0 || p > n || seen[p] {
                return Err(Error::InvalidPermutation(format!("{images:?}")));
            }
            seen[p] = true;
        }
        Ok(Permutation { images })
    }

    /// Builds a permutation from disjoint cycles, e.g. `[[1, 2, 3]]`.
    pub fn from_cycles(n: usize, cycles: &[Vec<usize>]) -> Result<Self> {
        let mut images: Vec<usize> = (1..=n).collect();
        for c in cycles {
            for (k, &p) in c.iter().enumerate() {
                if p == 0 || p > n {
                    return Err(Error::InvalidPermutation(format!("{cycles:?}")));
                }
                images[p - 1] = c[(k + 1) % c.len()];
            }
        }
        Permutation::new(n, images)
    }

    pub fn image(&self, i: usize) -> usize {
        self.images[i - 1]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    /// Index of `π·x`, i.e. bit `π(i) - 1` of the result is bit `i - 1` of `a`.
    pub fn apply_to_index(&self, a: usize) -> usize {
        self.images
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &p)| acc | (a >> i & 1) << (p - 1))
    }
}

/// A permutation group given by generators.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PermutationGroup {
    pub n: usize,
    pub generators: Vec<Permutation>,
}

impl PermutationGroup {
    pub fn new(n: usize, generators: Vec<Vec<usize>>) -> Result<Self> {
        let generators = generators
            .into_iter()
            .map(|g| Permutation::new(n, g))
            .collect::<Result<_>>()?;
        Ok(PermutationGroup { n, generators })
    }

    /// The cyclic group generated by `i ↦ i + 1 mod n`.
    pub fn cyclic(n: usize) -> Result<Self> {
        PermutationGroup::new(n, vec![(1..=n).map(|i| i % n + 1).collect()])
    }

    /// Adjacent transpositions, generating the full symmetric group.
    pub fn symmetric(n: usize) -> Result<Self> {
        let gens = (1..n)
            .map(|i| {
                let mut g: Vec<usize> = (1..=n).collect();
                g.swap(i - 1, i);
                g
            })
            .collect();
        PermutationGroup::new(n, gens)
    }

    /// Orbit of point 1 by closure over the generators.
    pub fn is_transitive(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut seen = vec![false; self.n + 1];
        let mut stack = vec![1usize];
        seen[1] = true;
        let mut count = 1;
        while let Some(p) = stack.pop() {
            for g in &self.generators {
                let q = g.image(p);
                if !seen[q] {
                    seen[q] = true;
                    count += 1;
                    stack.push(q);
                }
            }
        }
        count == self.n
    }
}

/// Every monotone function on `n ≤ 5` variables, each exactly once, in a
/// deterministic order.
///
/// A monotone `f` splits as `f = (f|x_n=0, f|x_n=1)` with both halves
/// monotone and the first below the second, so the list for `n` is built
/// from ordered pairs of the list for `n - 1`.
pub fn enumerate_monotone(n: usize) -> Result<impl Iterator<Item = TruthTable>> {
    if n == 0 || n > MAX_MONOTONE_ENUM {
        return Err(Error::OutOfRange {
            name: "n",
            value: n as i64,
            range: "1..=5",
        });
    }
    let mut level: Vec<u64> = vec![0, 1];
    for k in 1..=n {
        let half = 1u32 << (k - 1);
        let mut next = Vec::new();
        for &hi in &level {
            for &lo in &level {
                if lo & !hi == 0 {
                    next.push(lo | hi << half);
                }
            }
        }
        level = next;
    }
    Ok(level
        .into_iter()
        .map(move |w| TruthTable::from_words(n, vec![w]).expect("n ≤ 5 fits one word")))
}

/// Per-subcube value flags, indexed in base 3 (digit `2` marks a free
/// variable, `0`/`1` a fixed one). Bit 0 of a flag means the subcube contains
/// a zero of `f`, bit 1 that it contains a one.
pub struct Subcubes {
    n: usize,
    pow3: Vec<usize>,
    flags: Vec<u8>,
}

pub const HAS_ZERO: u8 = 1;
pub const HAS_ONE: u8 = 2;

impl Subcubes {
    pub fn new(f: &TruthTable) -> Self {
        let n = f.n();
        let pow3: Vec<usize> = (0..=n).map(|k| 3usize.pow(k as u32)).collect();
        let total = pow3[n];
        let mut flags = vec![0u8; total];
        for (c, slot) in (0..total).enumerate() {
            // Lowest free digit splits the cube into two smaller indices.
            let mut rest = c;
            let mut free = None;
            let mut a = 0usize;
            for i in 0..n {
                let d = rest % 3;
                rest /= 3;
                if d == 2 {
                    free = Some(i);
                    break;
                }
                a |= d << i;
            }
            flags[slot] = match free {
                None => {
                    if f.get(a) {
                        HAS_ONE
                    } else {
                        HAS_ZERO
                    }
                }
                Some(i) => {
                    let c0 = c - 2 * pow3[i];
                    flags[c0] | flags[c0 + pow3[i]]
                }
            };
        }
        Subcubes { n, pow3, flags }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Index of the cube fixing the variables in `mask` (0-based bit
    /// positions) to the corresponding bits of `values`.
    #[inline]
    pub fn index(&self, mask: usize, values: usize) -> usize {
        let mut c = 0;
        for i in 0..self.n {
            let d = if mask >> i & 1 == 1 { values >> i & 1 } else { 2 };
            c += d * self.pow3[i];
        }
        c
    }

    #[inline]
    pub fn flags(&self, cube: usize) -> u8 {
        self.flags[cube]
    }

    pub fn pow3(&self, i: usize) -> usize {
        self.pow3[i]
    }

    pub fn count(&self) -> usize {
        self.flags.len()
    }
}
