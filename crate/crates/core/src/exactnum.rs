//! Exact rational arithmetic, sign decisions for expressions containing
//! square roots, and step functions on uniform partitions of `[0, 1]`.
//!
//! Nothing here ever rounds. Quantities such as `c * x^(3/2)` are compared
//! through their squares, so every inequality the crate checks is decided
//! exactly.

use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::iter::Sum;
use core::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use core::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// An exact rational number, always stored in lowest terms with a positive
/// denominator. Equality is structural.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rational(BigRational);

impl Rational {
    pub fn new(numer: i64, denom: i64) -> Self {
        assert!(denom != 0, "zero denominator");
        Rational(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    pub fn from_bigints(numer: BigInt, denom: BigInt) -> Self {
        assert!(!denom.is_zero(), "zero denominator");
        Rational(BigRational::new(numer, denom))
    }

    pub fn integer(value: i64) -> Self {
        Rational(BigRational::from_integer(BigInt::from(value)))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    /// Sign as an ordering against zero.
    pub fn signum_ord(&self) -> Ordering {
        self.0.cmp(&BigRational::zero())
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn recip(&self) -> Self {
        Rational(self.0.recip())
    }

    pub fn square(&self) -> Self {
        Rational(&self.0 * &self.0)
    }

    pub fn cube(&self) -> Self {
        Rational(&self.0 * &self.0 * &self.0)
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut acc = Rational::one();
        for _ in 0..exp {
            acc = &acc * self;
        }
        acc
    }

    pub fn floor(&self) -> BigInt {
        self.0.floor().to_integer()
    }

    pub fn ceil(&self) -> BigInt {
        self.0.ceil().to_integer()
    }

    pub fn min_of(a: &Self, b: &Self) -> Self {
        if a <= b {
            a.clone()
        } else {
            b.clone()
        }
    }

    pub fn max_of(a: &Self, b: &Self) -> Self {
        if a >= b {
            a.clone()
        } else {
            b.clone()
        }
    }

    /// Nearest double; exact rationals of moderate size convert correctly
    /// rounded.
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// The exact square root when `self` is the square of a rational.
    pub fn sqrt_exact(&self) -> Option<Self> {
        if self.is_negative() {
            return None;
        }
        let n = self.numer().sqrt();
        let d = self.denom().sqrt();
        if &(&n * &n) == self.numer() && &(&d * &d) == self.denom() {
            Some(Rational::from_bigints(n, d))
        } else {
            None
        }
    }

    pub fn as_inner(&self) -> &BigRational {
        &self.0
    }
}

impl From<i64> for Rational {
    fn from(v: i64) -> Self {
        Rational::integer(v)
    }
}

impl From<usize> for Rational {
    fn from(v: usize) -> Self {
        Rational(BigRational::from_integer(BigInt::from(v)))
    }
}

impl From<BigInt> for Rational {
    fn from(v: BigInt) -> Self {
        Rational(BigRational::from_integer(v))
    }
}

impl From<BigRational> for Rational {
    fn from(v: BigRational) -> Self {
        Rational(v)
    }
}

/// Shorthand for `Rational::new`.
pub fn q(numer: i64, denom: i64) -> Rational {
    Rational::new(numer, denom)
}

impl fmt::Display for Rational {
    /// Always `num/den`, also for integers.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer(), self.denom())
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse {input:?} as a rational")]
pub struct ParseRationalError {
    pub input: String,
}

impl FromStr for Rational {
    type Err = ParseRationalError;

    /// Accepts `num/den` and plain integers.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseRationalError { input: s.into() };
        let t = s.trim();
        let (n, d) = match t.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (t, "1"),
        };
        let n: BigInt = n.parse().map_err(|_| err())?;
        let d: BigInt = d.parse().map_err(|_| err())?;
        if d.is_zero() {
            return Err(err());
        }
        Ok(Rational::from_bigints(n, d))
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<&Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
        impl $trait<Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(self.0.$method(rhs.0))
            }
        }
        impl $trait<&Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational(self.0.$method(&rhs.0))
            }
        }
        impl $trait<Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational((&self.0).$method(rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

impl AddAssign<&Rational> for Rational {
    fn add_assign(&mut self, rhs: &Rational) {
        self.0 += &rhs.0;
    }
}

impl AddAssign for Rational {
    fn add_assign(&mut self, rhs: Rational) {
        self.0 += rhs.0;
    }
}

impl SubAssign<&Rational> for Rational {
    fn sub_assign(&mut self, rhs: &Rational) {
        self.0 -= &rhs.0;
    }
}

impl MulAssign<&Rational> for Rational {
    fn mul_assign(&mut self, rhs: &Rational) {
        self.0 *= &rhs.0;
    }
}

impl Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Self {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Rational> for Rational {
    fn sum<I: Iterator<Item = &'a Rational>>(iter: I) -> Self {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

// ---------------------------------------------------------------------------
// Square-root sign decisions
// ---------------------------------------------------------------------------

/// Orders `c * x^(3/2)` against `y`, where `c >= 0` is given by its square
/// `c_sq` (so irrational constants such as `2*sqrt(3)/9` never materialise).
///
/// Panics if `c_sq < 0` or `x < 0`.
pub fn cmp_pow32(c_sq: &Rational, x: &Rational, y: &Rational) -> Ordering {
    assert!(!c_sq.is_negative(), "cmp_pow32: negative c^2");
    assert!(!x.is_negative(), "cmp_pow32: negative base");
    if y.is_negative() {
        return Ordering::Greater;
    }
    // both sides non-negative, squaring is monotone
    (c_sq * x.cube()).cmp(&y.square())
}

/// A signed square root `±sqrt(radicand)` with `radicand >= 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignedRoot {
    pub negative: bool,
    pub radicand: Rational,
}

impl SignedRoot {
    pub fn new(negative: bool, radicand: Rational) -> Self {
        assert!(!radicand.is_negative(), "negative radicand");
        SignedRoot { negative, radicand }
    }

    fn sign(&self) -> Ordering {
        if self.radicand.is_zero() {
            Ordering::Equal
        } else if self.negative {
            Ordering::Less
        } else {
            Ordering::Greater
        }
    }

    pub fn approx(&self) -> f64 {
        let v = libm::sqrt(self.radicand.to_f64());
        if self.negative {
            -v
        } else {
            v
        }
    }
}

/// Exact sign of `r + s1 + s2 + ...` for at most two signed square roots.
///
/// Roots with equal radicands are merged first, so any number of terms that
/// collapse to at most two distinct radicands is accepted.
///
/// Panics if more than two distinct radicands remain.
pub fn surd_sign(rational: &Rational, roots: &[SignedRoot]) -> Ordering {
    let mut merged: Vec<(Rational, Rational)> = Vec::new(); // (coefficient, radicand)
    for root in roots {
        if root.radicand.is_zero() {
            continue;
        }
        let unit = if root.negative { Rational::integer(-1) } else { Rational::one() };
        match merged.iter_mut().find(|(_, m)| *m == root.radicand) {
            Some((c, _)) => *c += unit,
            None => merged.push((unit, root.radicand.clone())),
        }
    }
    let mut terms: Vec<SignedRoot> = Vec::new();
    let mut r = rational.clone();
    for (c, m) in merged {
        if c.is_zero() {
            continue;
        }
        // c * sqrt(m) = ±sqrt(c^2 m)
        let rad = c.square() * &m;
        match rad.sqrt_exact() {
            Some(root) => {
                if c.is_negative() {
                    r -= &root
                } else {
                    r += &root
                }
            }
            None => terms.push(SignedRoot::new(c.is_negative(), rad)),
        }
    }
    match terms.as_slice() {
        [] => r.signum_ord(),
        [a] => sign_one(&r, a),
        [a, b] => sign_two(&r, a, b),
        _ => panic!("surd_sign supports at most two distinct radicals"),
    }
}

fn sign_one(r: &Rational, a: &SignedRoot) -> Ordering {
    let sr = r.signum_ord();
    let sa = a.sign();
    if sa == Ordering::Equal {
        return sr;
    }
    if sr == Ordering::Equal || sr == sa {
        return sa;
    }
    match r.square().cmp(&a.radicand) {
        Ordering::Greater => sr,
        Ordering::Less => sa,
        Ordering::Equal => Ordering::Equal,
    }
}

fn sign_two(r: &Rational, a: &SignedRoot, b: &SignedRoot) -> Ordering {
    // X = r + a, Y = b
    let sx = sign_one(r, a);
    let sy = b.sign();
    if sy == Ordering::Equal {
        return sx;
    }
    if sx == Ordering::Equal || sx == sy {
        return sy;
    }
    // |X| vs |Y| through X^2 - Y^2 = (r^2 + m_a - m_b) ± sqrt(4 r^2 m_a)
    let base = r.square() + &a.radicand - &b.radicand;
    let cross_negative = r.is_negative() != a.negative;
    let cross = SignedRoot::new(cross_negative, Rational::integer(4) * r.square() * &a.radicand);
    match sign_one(&base, &cross) {
        Ordering::Greater => sx,
        Ordering::Less => sy,
        Ordering::Equal => Ordering::Equal,
    }
}

// ---------------------------------------------------------------------------
// Step functions
// ---------------------------------------------------------------------------

/// A step function on the uniform partition of `[0, 1]` into `values.len()`
/// cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepFunction {
    values: Vec<Rational>,
}

impl StepFunction {
    /// Panics on an empty value list.
    pub fn new(values: Vec<Rational>) -> Self {
        assert!(!values.is_empty(), "step function needs at least one cell");
        StepFunction { values }
    }

    /// `scale * values[i]` on cell `i`.
    pub fn scaled(scale: &Rational, values: &[Rational]) -> Self {
        StepFunction::new(values.iter().map(|v| scale * v).collect())
    }

    pub fn cells(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    fn width(&self) -> Rational {
        Rational::from(self.cells()).recip()
    }

    pub fn integral(&self) -> Rational {
        self.values.iter().sum::<Rational>() * self.width()
    }

    pub fn norm_sq(&self) -> Rational {
        self.values.iter().map(Rational::square).sum::<Rational>() * self.width()
    }

    /// Panics on mismatched cell counts.
    pub fn inner(&self, other: &Self) -> Rational {
        assert_eq!(self.cells(), other.cells());
        self.values.iter().zip(&other.values).map(|(a, b)| a * b).sum::<Rational>() * self.width()
    }

    /// Panics on mismatched cell counts.
    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.cells(), other.cells());
        StepFunction::new(self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect())
    }

    pub fn is_non_decreasing(&self) -> bool {
        self.values.windows(2).all(|w| w[0] <= w[1])
    }

    pub fn is_non_negative(&self) -> bool {
        self.values.iter().all(|v| !v.is_negative())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StepError {
    #[error("cell counts differ: f has {f}, g has {g}")]
    CellMismatch { f: usize, g: usize },
    #[error("f must be non-negative and non-decreasing (cell {cell})")]
    NotMonotone { cell: usize },
    #[error("g must integrate to zero, got {integral}")]
    NonZeroIntegral { integral: Rational },
}

/// Outcome of the rearrangement inequality check for a pair `(f, g)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RearrangeReport {
    pub diff_norm_sq: Rational,
    pub f_norm_sq: Rational,
    pub g_norm_sq: Rational,
    pub inner: Rational,
    /// Half-open cell ranges of the greedy blocks, `None` when the greedy
    /// decomposition does not produce zero-sum blocks.
    pub blocks: Option<Vec<(usize, usize)>>,
    /// `<f, g_i>` for each block, same order as `blocks`.
    pub block_inners: Vec<Rational>,
    /// `||f - g||^2 >= ||f||^2 + ||g||^2` and `<f, g> <= 0`.
    pub holds: bool,
}

impl RearrangeReport {
    pub fn block_decomposable(&self) -> bool {
        self.blocks.is_some()
    }
}

/// Splits `g` greedily into consecutive blocks, each a non-negative run
/// followed by a non-positive run; a block closes at the last cell before
/// the sign turns strictly positive again. Returns `None` if a block has a
/// non-zero sum.
pub fn greedy_blocks(g: &StepFunction) -> Option<Vec<(usize, usize)>> {
    let v = g.values();
    let mut blocks = Vec::new();
    let mut start = 0;
    while start < v.len() {
        let mut i = start;
        while i < v.len() && !v[i].is_negative() {
            i += 1;
        }
        while i < v.len() && !v[i].is_positive() {
            i += 1;
        }
        let sum: Rational = v[start..i].iter().sum();
        if !sum.is_zero() {
            return None;
        }
        blocks.push((start, i));
        start = i;
    }
    Some(blocks)
}

/// Checks `||f - g||^2 >= ||f||^2 + ||g||^2` for a non-negative
/// non-decreasing `f` and a rearrangement function `g` (zero integral).
pub fn step_rearrange_check(f: &StepFunction, g: &StepFunction) -> Result<RearrangeReport, StepError> {
    if f.cells() != g.cells() {
        return Err(StepError::CellMismatch { f: f.cells(), g: g.cells() });
    }
    if let Some(cell) = f.values().iter().position(|v| v.is_negative()) {
        return Err(StepError::NotMonotone { cell });
    }
    if let Some(w) = f.values().windows(2).position(|w| w[0] > w[1]) {
        return Err(StepError::NotMonotone { cell: w + 1 });
    }
    let integral = g.integral();
    if !integral.is_zero() {
        return Err(StepError::NonZeroIntegral { integral });
    }

    let diff_norm_sq = f.sub(g).norm_sq();
    let f_norm_sq = f.norm_sq();
    let g_norm_sq = g.norm_sq();
    let inner = f.inner(g);
    let blocks = greedy_blocks(g);
    let width = Rational::from(f.cells()).recip();
    let block_inners = blocks
        .iter()
        .flatten()
        .map(|&(a, b)| f.values()[a..b].iter().zip(&g.values()[a..b]).map(|(x, y)| x * y).sum::<Rational>() * &width)
        .collect();
    let holds = diff_norm_sq >= &f_norm_sq + &g_norm_sq && !inner.is_positive();
    Ok(RearrangeReport { diff_norm_sq, f_norm_sq, g_norm_sq, inner, blocks, block_inners, holds })
}
