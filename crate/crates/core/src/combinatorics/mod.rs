//! Ballot sequences, rectangular standard Young tableaux and the two degree
//! counts: the number `d(m, p)` of rectangular tableaux and the signed
//! inversion sum `I(m, p)`.
//!
//! Everything here is exact integer arithmetic.

mod tables;

pub use tables::{build_table, golden_d, golden_i, Table, TableOptions, TableRow, GOLDEN_D, GOLDEN_I};

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};
use std::collections::HashMap;
use std::fmt;
use thiserror::Error;

/// Default limit on `d(m, p)` for explicit enumeration.
pub const DEFAULT_ENUMERATION_CAP: u64 = 10_000_000;
/// Default limit on the number of count-vector states in the dynamic program.
pub const DEFAULT_STATE_CAP: u64 = 20_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CombinatoricsError {
    #[error("m and p must be positive (got m={m}, p={p})")]
    ZeroSize { m: usize, p: usize },
    #[error("d({m},{p}) = {d} exceeds the enumeration cap {cap}; use the dynamic program instead")]
    CapExceeded { m: usize, p: usize, d: BigUint, cap: u64 },
    #[error("the dynamic program for ({m},{p}) needs {states} states, above the cap {cap}")]
    StateCapExceeded { m: usize, p: usize, states: BigUint, cap: u64 },
    #[error("the shifted-tableau formula needs m+p odd (got m={m}, p={p})")]
    EvenSum { m: usize, p: usize },
    #[error("not a ballot sequence: {0}")]
    InvalidBallot(String),
    #[error("not a standard rectangular tableau: {0}")]
    InvalidTableau(String),
}

fn check_size(m: usize, p: usize) -> Result<(), CombinatoricsError> {
    if m == 0 || p == 0 {
        Err(CombinatoricsError::ZeroSize { m, p })
    } else {
        Ok(())
    }
}

fn factorial(n: usize) -> BigUint {
    (1..=n as u64).fold(BigUint::one(), |acc, k| acc * k)
}

/// Schubert's degree `d(m,p) = 1!2!...(p-1)! (mp)! / (m! (m+1)! ... (m+p-1)!)`.
pub fn schubert_degree(m: usize, p: usize) -> BigUint {
    let num = (1..p).fold(factorial(m * p), |acc, i| acc * factorial(i));
    let den = (0..p).fold(BigUint::one(), |acc, i| acc * factorial(m + i));
    num / den
}

pub fn catalan(n: usize) -> BigUint {
    factorial(2 * n) / (factorial(n) * factorial(n + 1))
}

fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// A sequence over `{1..p}` with every symbol `m` times, such that every
/// prefix contains at least as many `i` as `k` whenever `i < k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BallotSequence {
    entries: Vec<u8>,
    m: usize,
    p: usize,
}

impl BallotSequence {
    pub fn new(entries: Vec<u8>, m: usize, p: usize) -> Result<Self, CombinatoricsError> {
        check_size(m, p)?;
        if entries.len() != m * p {
            return Err(CombinatoricsError::InvalidBallot(format!(
                "length {} differs from m*p = {}",
                entries.len(),
                m * p
            )));
        }
        let mut counts = vec![0usize; p];
        for (pos, &s) in entries.iter().enumerate() {
            let s = s as usize;
            if s == 0 || s > p {
                return Err(CombinatoricsError::InvalidBallot(format!("symbol {s} outside 1..={p}")));
            }
            counts[s - 1] += 1;
            if s > 1 && counts[s - 1] > counts[s - 2] {
                return Err(CombinatoricsError::InvalidBallot(format!(
                    "prefix of length {} has more {s}'s than {}'s",
                    pos + 1,
                    s - 1
                )));
            }
        }
        if counts.iter().any(|&c| c != m) {
            return Err(CombinatoricsError::InvalidBallot(format!("each symbol must occur {m} times")));
        }
        Ok(BallotSequence { entries, m, p })
    }

    pub fn entries(&self) -> &[u8] {
        &self.entries
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn inversions(&self) -> u64 {
        inversions(self)
    }
}

impl fmt::Display for BallotSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.entries.iter().map(u8::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Number of pairs `j < k` with `s_j > s_k`.
pub fn inversions(s: &BallotSequence) -> u64 {
    let mut counts = vec![0u64; s.p + 1];
    let mut inv = 0;
    for &x in &s.entries {
        let x = x as usize;
        inv += counts[x + 1..].iter().sum::<u64>();
        counts[x] += 1;
    }
    inv
}

/// Lexicographic stream over all ballot sequences of shape `(m, p)`.
#[derive(Debug, Clone)]
pub struct BallotIter {
    m: usize,
    p: usize,
    current: Vec<u8>,
    counts: Vec<usize>,
    state: IterState,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum IterState {
    Fresh,
    Running,
    Done,
}

impl BallotIter {
    fn legal(&self, s: usize) -> bool {
        let i = s - 1;
        self.counts[i] < self.m && (i == 0 || self.counts[i - 1] > self.counts[i])
    }

    fn push(&mut self, s: usize) {
        self.current.push(s as u8);
        self.counts[s - 1] += 1;
    }

    fn complete(&mut self) {
        while self.current.len() < self.m * self.p {
            let s = (1..=self.p).find(|&s| self.legal(s)).expect("valid prefixes always extend");
            self.push(s);
        }
    }
}

impl Iterator for BallotIter {
    type Item = BallotSequence;

    fn next(&mut self) -> Option<BallotSequence> {
        match self.state {
            IterState::Done => return None,
            IterState::Fresh => {
                self.complete();
                self.state = IterState::Running;
            }
            IterState::Running => loop {
                let Some(last) = self.current.pop() else {
                    self.state = IterState::Done;
                    return None;
                };
                let last = last as usize;
                self.counts[last - 1] -= 1;
                if let Some(s) = (last + 1..=self.p).find(|&s| self.legal(s)) {
                    self.push(s);
                    self.complete();
                    break;
                }
            },
        }
        Some(BallotSequence { entries: self.current.clone(), m: self.m, p: self.p })
    }
}

/// All ballot sequences for `(m, p)` in lexicographic order.
pub fn enumerate_ballot(m: usize, p: usize) -> BallotIter {
    let state = if m == 0 || p == 0 { IterState::Done } else { IterState::Fresh };
    BallotIter { m, p, current: Vec::with_capacity(m * p), counts: vec![0; p], state }
}

/// Standard Young tableau of rectangular shape: `p` rows of length `m`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RectTableau {
    rows: Vec<Vec<usize>>,
}

impl RectTableau {
    pub fn new(rows: Vec<Vec<usize>>) -> Result<Self, CombinatoricsError> {
        let p = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        check_size(m, p)?;
        if rows.iter().any(|r| r.len() != m) {
            return Err(CombinatoricsError::InvalidTableau("rows differ in length".into()));
        }
        let mut seen = vec![false; m * p + 1];
        for &v in rows.iter().flatten() {
            if v == 0 || v > m * p || std::mem::replace(&mut seen[v], true) {
                return Err(CombinatoricsError::InvalidTableau(format!("entries are not a permutation of 1..={}", m * p)));
            }
        }
        for (r, row) in rows.iter().enumerate() {
            for c in 0..m {
                if c + 1 < m && row[c] >= row[c + 1] {
                    return Err(CombinatoricsError::InvalidTableau(format!("row {} is not increasing", r + 1)));
                }
                if r + 1 < p && row[c] >= rows[r + 1][c] {
                    return Err(CombinatoricsError::InvalidTableau(format!("column {} is not increasing", c + 1)));
                }
            }
        }
        Ok(RectTableau { rows })
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.rows
    }

    pub fn transpose(&self) -> RectTableau {
        let m = self.rows[0].len();
        RectTableau { rows: (0..m).map(|c| self.rows.iter().map(|r| r[c]).collect()).collect() }
    }

    /// Pairs `a < b` where `b` sits in a higher row than `a`.
    pub fn inversions(&self) -> u64 {
        let n: usize = self.rows.iter().map(Vec::len).sum();
        let mut row_of = vec![0usize; n + 1];
        for (r, row) in self.rows.iter().enumerate() {
            for &v in row {
                row_of[v] = r;
            }
        }
        let mut inv = 0;
        for a in 1..=n {
            for b in a + 1..=n {
                if row_of[b] < row_of[a] {
                    inv += 1;
                }
            }
        }
        inv
    }
}

/// Puts `j` in the leftmost free cell of row `s_j`.
pub fn ballot_to_syt(s: &BallotSequence) -> RectTableau {
    let mut rows = vec![Vec::with_capacity(s.m); s.p];
    for (j, &x) in s.entries.iter().enumerate() {
        rows[x as usize - 1].push(j + 1);
    }
    RectTableau { rows }
}

pub fn syt_to_ballot(t: &RectTableau) -> BallotSequence {
    let p = t.rows.len();
    let m = t.rows[0].len();
    let mut entries = vec![0u8; m * p];
    for (r, row) in t.rows.iter().enumerate() {
        for &v in row {
            entries[v - 1] = (r + 1) as u8;
        }
    }
    BallotSequence { entries, m, p }
}

/// Signed inversion sum together with its absolute value `I(m, p)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignedCount {
    pub value: BigInt,
    pub magnitude: BigUint,
}

impl SignedCount {
    fn from_value(value: BigInt) -> Self {
        let magnitude = value.abs().to_biguint().expect("absolute value");
        SignedCount { value, magnitude }
    }
}

/// `sum over ballot sequences of (-1)^inv` by explicit enumeration.
pub fn signed_sum_enumerative(m: usize, p: usize, cap: u64) -> Result<SignedCount, CombinatoricsError> {
    check_size(m, p)?;
    let d = schubert_degree(m, p);
    if d > BigUint::from(cap) {
        return Err(CombinatoricsError::CapExceeded { m, p, d, cap });
    }
    let mut sum: i64 = 0;
    for s in enumerate_ballot(m, p) {
        sum += if inversions(&s) % 2 == 0 { 1 } else { -1 };
    }
    Ok(SignedCount::from_value(BigInt::from(sum)))
}

fn dp_over_counts<T: Clone>(
    m: usize,
    p: usize,
    cap: u64,
    start: T,
    step: impl Fn(&T, u64) -> T,
    add: impl Fn(&mut T, T),
) -> Result<T, CombinatoricsError> {
    check_size(m, p)?;
    // count vectors c_1 >= ... >= c_p in [0, m] number C(m+p, p)
    let states = binomial(m + p, p);
    if states > BigUint::from(cap) {
        return Err(CombinatoricsError::StateCapExceeded { m, p, states, cap });
    }
    let mut layer: HashMap<Vec<u16>, T> = HashMap::new();
    layer.insert(vec![0; p], start);
    for _ in 0..m * p {
        let mut next: HashMap<Vec<u16>, T> = HashMap::with_capacity(layer.len() * 2);
        for (counts, value) in &layer {
            for i in 0..p {
                let ci = counts[i] as usize;
                if ci >= m || (i > 0 && counts[i - 1] <= counts[i]) {
                    continue;
                }
                // every symbol already placed that is larger than i+1 forms an inversion
                let added: u64 = counts[i + 1..].iter().map(|&c| c as u64).sum();
                let mut key = counts.clone();
                key[i] += 1;
                let contribution = step(value, added);
                match next.get_mut(&key) {
                    Some(slot) => add(slot, contribution),
                    None => {
                        next.insert(key, contribution);
                    }
                }
            }
        }
        layer = next;
    }
    Ok(layer.remove(&vec![m as u16; p]).expect("the full count vector is reachable"))
}

/// Same signed sum via a dynamic program over prefix count vectors.
pub fn signed_sum_dp(m: usize, p: usize, state_cap: u64) -> Result<SignedCount, CombinatoricsError> {
    let v = dp_over_counts(
        m,
        p,
        state_cap,
        BigInt::one(),
        |v, added| if added % 2 == 0 { v.clone() } else { -v },
        |slot, c| *slot += c,
    )?;
    Ok(SignedCount::from_value(v))
}

/// Number of ballot sequences via the same dynamic program, unsigned.
pub fn count_ballot_dp(m: usize, p: usize, state_cap: u64) -> Result<BigUint, CombinatoricsError> {
    dp_over_counts(m, p, state_cap, BigUint::one(), |v, _| v.clone(), |slot, c| *slot += c)
}

/// Product formula for shifted standard tableaux of staircase-like shape
/// `((m+p-1)/2, (m+p-3)/2, ..., (m-p+1)/2)`, valid for odd `m + p`.
/// Symmetric arguments are handled by swapping to `m >= p`.
pub fn ssyt_closed_form(m: usize, p: usize) -> Result<BigUint, CombinatoricsError> {
    check_size(m, p)?;
    if (m + p) % 2 == 0 {
        return Err(CombinatoricsError::EvenSum { m, p });
    }
    let (m, p) = if m >= p { (m, p) } else { (p, m) };
    let mut num = factorial(m * p / 2);
    for i in 1..p {
        num *= factorial(i) * factorial(m - i);
    }
    let mut den = BigUint::one();
    for j in 1..p {
        den *= factorial(m - p + 2 * j);
    }
    for j in 0..p {
        den *= factorial((m - p + 1) / 2 + j);
    }
    Ok(num / den)
}

/// `inv(s) + inv(s')` for a sequence and its transpose image: the number of
/// cell pairs lying in two different rows and two different columns without
/// being weakly south-east of each other, i.e. `C(m,2) * C(p,2)`.
pub fn transpose_inversion_total(m: usize, p: usize) -> u64 {
    let c2 = |n: usize| (n * n.saturating_sub(1) / 2) as u64;
    c2(m) * c2(p)
}
