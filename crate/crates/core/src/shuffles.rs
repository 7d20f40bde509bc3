//! Equidistant even shuffles encoded by permutations of `{1, ..., N}`.
//!
//! All permutations are 1-indexed: `pi[i - 1]` holds `pi(i)`. A shuffle with
//! permutation `pi` moves the stripe `((i-1)/N, i/N)` onto
//! `((pi(i)-1)/N, pi(i)/N)` with slope one. Symmetric shuffles are exactly
//! those whose permutation is an involution.

use alloc::vec;
use alloc::vec::Vec;

use crate::exactnum::Rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PermutationError {
    #[error("expected {expected} entries, got {got}")]
    WrongLength { expected: usize, got: usize },
    #[error("entry {value} at position {position} is outside 1..={n}")]
    OutOfRange { position: usize, value: i64, n: usize },
    #[error("value {value} appears twice (second time at position {position})")]
    Duplicate { position: usize, value: i64 },
    #[error("permutation is not an involution: pi(pi({position})) != {position}")]
    NotInvolution { position: usize },
    #[error("n must be a positive even integer, got {n}")]
    OddOrEmpty { n: usize },
    #[error("n must be positive")]
    Empty,
}

/// A bijection of `{1, ..., n}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    pi: Vec<usize>,
}

impl Permutation {
    /// Validates `values` as a permutation of `{1, ..., n}`. The first
    /// violated condition (length, then range, then duplicates in reading
    /// order) is reported.
    pub fn validate(n: usize, values: &[i64]) -> Result<Self, PermutationError> {
        if n == 0 {
            return Err(PermutationError::Empty);
        }
        if values.len() != n {
            return Err(PermutationError::WrongLength { expected: n, got: values.len() });
        }
        let mut seen = vec![false; n + 1];
        let mut pi = Vec::with_capacity(n);
        for (idx, &v) in values.iter().enumerate() {
            let position = idx + 1;
            if v < 1 || v as u64 > n as u64 {
                return Err(PermutationError::OutOfRange { position, value: v, n });
            }
            let v = v as usize;
            if seen[v] {
                return Err(PermutationError::Duplicate { position, value: v as i64 });
            }
            seen[v] = true;
            pi.push(v);
        }
        Ok(Permutation { pi })
    }

    /// Convenience constructor for literal permutations. Panics if `values`
    /// is not a permutation.
    pub fn from_slice(values: &[usize]) -> Self {
        let v: Vec<i64> = values.iter().map(|&x| x as i64).collect();
        Permutation::validate(values.len(), &v).expect("invalid permutation literal")
    }

    pub fn identity(n: usize) -> Self {
        Permutation { pi: (1..=n).collect() }
    }

    pub fn n(&self) -> usize {
        self.pi.len()
    }

    /// `pi(i)` for `i` in `1..=n`.
    pub fn at(&self, i: usize) -> usize {
        self.pi[i - 1]
    }

    pub fn values(&self) -> &[usize] {
        &self.pi
    }

    pub fn is_involution(&self) -> bool {
        (1..=self.n()).all(|i| self.at(self.at(i)) == i)
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.n()];
        for (i, &p) in self.pi.iter().enumerate() {
            inv[p - 1] = i + 1;
        }
        Permutation { pi: inv }
    }

    /// `sum_i (i - pi(i))`, zero for every permutation.
    pub fn displacement_sum(&self) -> i64 {
        self.pi.iter().enumerate().map(|(i, &p)| (i + 1) as i64 - p as i64).sum()
    }
}

/// A self-inverse permutation, i.e. the permutation of a symmetric shuffle.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Involution(Permutation);

impl Involution {
    pub fn new(p: Permutation) -> Result<Self, PermutationError> {
        match (1..=p.n()).find(|&i| p.at(p.at(i)) != i) {
            Some(position) => Err(PermutationError::NotInvolution { position }),
            None => Ok(Involution(p)),
        }
    }

    /// Panics if `values` is not an involution.
    pub fn from_slice(values: &[usize]) -> Self {
        Involution::new(Permutation::from_slice(values)).expect("not an involution")
    }

    pub fn identity(n: usize) -> Self {
        Involution(Permutation::identity(n))
    }

    /// The involution built from disjoint transpositions on `{1, ..., n}`.
    /// Panics if the pairs overlap or leave the range.
    pub fn from_swaps(n: usize, swaps: &[(usize, usize)]) -> Self {
        let mut pi: Vec<usize> = (1..=n).collect();
        for &(a, b) in swaps {
            assert!(pi[a - 1] == a && pi[b - 1] == b, "overlapping swaps");
            pi[a - 1] = b;
            pi[b - 1] = a;
        }
        Involution(Permutation { pi })
    }

    pub fn permutation(&self) -> &Permutation {
        &self.0
    }

    pub fn n(&self) -> usize {
        self.0.n()
    }

    pub fn at(&self, i: usize) -> usize {
        self.0.at(i)
    }

    pub fn values(&self) -> &[usize] {
        self.0.values()
    }
}

impl TryFrom<Permutation> for Involution {
    type Error = PermutationError;
    fn try_from(p: Permutation) -> Result<Self, Self::Error> {
        Involution::new(p)
    }
}

impl AsRef<Permutation> for Involution {
    fn as_ref(&self) -> &Permutation {
        &self.0
    }
}

/// The index sets `I^-`, `I^0`, `I^+` of a permutation.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct IndexClasses {
    pub minus: Vec<usize>,
    pub zero: Vec<usize>,
    pub plus: Vec<usize>,
}

pub fn classify(p: &Permutation) -> IndexClasses {
    let mut c = IndexClasses::default();
    for i in 1..=p.n() {
        let v = p.at(i);
        if v < i {
            c.minus.push(i);
        } else if v == i {
            c.zero.push(i);
        } else {
            c.plus.push(i);
        }
    }
    c
}

/// Spearman's footrule of the shuffle copula,
/// `1 - (6/N) * sum_{i in I^-} (i - pi(i))/N`.
pub fn shuffle_phi(p: &Permutation) -> Rational {
    let n = p.n() as i64;
    let s: i64 = (1..=p.n()).filter(|&i| p.at(i) < i).map(|i| (i - p.at(i)) as i64).sum();
    Rational::one() - Rational::new(6 * s, n * n)
}

/// Spearman's rho of the shuffle copula for an arbitrary permutation,
/// `1 - (12/N) * sum_i i (i - pi(i)) / N^2`.
pub fn shuffle_rho(p: &Permutation) -> Rational {
    let n = p.n() as i64;
    let s: i64 = (1..=p.n()).map(|i| i as i64 * (i as i64 - p.at(i) as i64)).sum();
    Rational::one() - Rational::new(12 * s, n * n * n)
}

/// Spearman's rho of a symmetric shuffle through the squared displacements
/// on `I^-`; agrees with [`shuffle_rho`].
pub fn shuffle_rho_symmetric(p: &Involution) -> Rational {
    let n = p.n() as i64;
    let s: i64 = (1..=p.n())
        .filter(|&i| p.at(i) < i)
        .map(|i| {
            let d = (i - p.at(i)) as i64;
            d * d
        })
        .sum();
    Rational::one() - Rational::new(12 * s, n * n * n)
}

/// True iff `i - pi(i)` is constant on `I^-` and `#I^- = N/2`, the exact
/// condition under which the shuffle attains the upper bound.
pub fn equality_condition(p: &Involution) -> bool {
    let minus = classify(p.permutation()).minus;
    if minus.is_empty() || 2 * minus.len() != p.n() {
        return false;
    }
    let d0 = minus[0] - p.at(minus[0]);
    minus.iter().all(|&i| i - p.at(i) == d0)
}

/// The involution swapping `(2j-1, 2j)` for every `j`.
pub fn star_shuffle(n: usize) -> Result<Involution, PermutationError> {
    if n == 0 || n % 2 == 1 {
        return Err(PermutationError::OddOrEmpty { n });
    }
    let pi = (1..=n).map(|i| if i % 2 == 1 { i + 1 } else { i - 1 }).collect();
    Ok(Involution(Permutation { pi }))
}

/// Number of involutions of an `n`-set, `a(n) = a(n-1) + (n-1) a(n-2)`.
pub fn involution_count(n: usize) -> u64 {
    let (mut a, mut b) = (1u64, 1u64); // a(0), a(1)
    if n == 0 {
        return 1;
    }
    for k in 2..=n as u64 {
        let c = b + (k - 1) * a;
        a = b;
        b = c;
    }
    b
}

/// Iterator over all involutions of `{1, ..., n}` in lexicographic order of
/// the value sequence.
///
/// Backtracks over the first unassigned index `i`, trying `pi(i) = i` first
/// and then each free `j > i` in increasing order.
pub struct Involutions {
    n: usize,
    pi: Vec<usize>,
    stack: Vec<(usize, usize)>,
    state: IterState,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum IterState {
    Fresh,
    Running,
    Done,
}

pub fn enumerate_involutions(n: usize) -> Involutions {
    Involutions { n, pi: vec![0; n + 1], stack: Vec::new(), state: IterState::Fresh }
}

impl Involutions {
    fn assign(&mut self, i: usize, j: usize) {
        self.pi[i] = j;
        self.pi[j] = i;
        self.stack.push((i, j));
    }

    fn descend(&mut self) {
        while let Some(i) = (1..=self.n).find(|&i| self.pi[i] == 0) {
            self.assign(i, i);
        }
    }

    fn snapshot(&self) -> Involution {
        Involution(Permutation { pi: self.pi[1..].to_vec() })
    }
}

impl Iterator for Involutions {
    type Item = Involution;

    fn next(&mut self) -> Option<Involution> {
        match self.state {
            IterState::Done => return None,
            IterState::Fresh => {
                if self.n == 0 {
                    self.state = IterState::Done;
                    return None;
                }
                self.state = IterState::Running;
                self.descend();
                return Some(self.snapshot());
            }
            IterState::Running => {}
        }
        while let Some((i, j)) = self.stack.pop() {
            self.pi[i] = 0;
            self.pi[j] = 0;
            if let Some(next) = (j + 1..=self.n).find(|&k| self.pi[k] == 0) {
                self.assign(i, next);
                self.descend();
                return Some(self.snapshot());
            }
        }
        self.state = IterState::Done;
        None
    }
}
