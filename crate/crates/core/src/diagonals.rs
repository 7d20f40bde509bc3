//! Piecewise-linear diagonals and diagonal copulas.
//!
//! A diagonal is the function `t -> C(t, t)` of some copula. The diagonal
//! copula `E_δ(u, v) = min(u, v, (δ(u) + δ(v)) / 2)` is the largest symmetric
//! copula with diagonal `δ`. Its Markov kernel puts mass `w(t)/2` on `L(t)`
//! and `1 - w(t)/2` on `U(t)`, where `w` is the slope of `δ`,
//! `g(t) = 2t - δ(t)`, `L = g⁻ ∘ δ` and `U = δ⁻ ∘ g` (generalized inverses
//! taking the smallest preimage).
//!
//! Diagonals whose slopes are all 0 or 2 on a uniform grid (the
//! [`Diagonal02`] class) give symmetric shuffles, and conversely.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::exactnum::Rational;
use crate::segmeasures::{check_unit, OutsideUnitInterval, Segment, SegmentMap};
use crate::shuffles::{classify, Involution, Permutation};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DiagonalError {
    #[error("need matching breakpoint/value lists with at least two entries")]
    Shape,
    #[error("breakpoints must run strictly increasing from 0 to 1 (index {index})")]
    Breakpoints { index: usize },
    #[error("diagonal must satisfy δ(0) = 0 and δ(1) = 1")]
    Endpoint,
    #[error("diagonal decreases on piece {piece}")]
    Monotonicity { piece: usize },
    #[error("slope on piece {piece} exceeds 2")]
    Lipschitz { piece: usize },
    #[error("δ(t) > t at breakpoint {index}")]
    AboveIdentity { index: usize },
}

/// A continuous piecewise-linear function on `[0, 1]` given by its values at
/// strictly increasing breakpoints.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Pwl {
    xs: Vec<Rational>,
    ys: Vec<Rational>,
}

impl Pwl {
    fn eval(&self, t: &Rational) -> Rational {
        let j = match self.xs.iter().position(|x| x >= t) {
            Some(0) => return self.ys[0].clone(),
            Some(j) => j,
            None => return self.ys[self.ys.len() - 1].clone(),
        };
        let (x0, x1, y0, y1) = (&self.xs[j - 1], &self.xs[j], &self.ys[j - 1], &self.ys[j]);
        y0 + (y1 - y0) * (t - x0) / (x1 - x0)
    }

    fn slope(&self, piece: usize) -> Rational {
        (&self.ys[piece + 1] - &self.ys[piece]) / (&self.xs[piece + 1] - &self.xs[piece])
    }

    /// `min { z : f(z) >= y }` for a non-decreasing continuous `f`.
    fn inverse_min(&self, y: &Rational) -> Rational {
        if *y <= self.ys[0] {
            return self.xs[0].clone();
        }
        for j in 0..self.xs.len() - 1 {
            if self.ys[j + 1] >= *y {
                return &self.xs[j] + (y - &self.ys[j]) / self.slope(j);
            }
        }
        self.xs[self.xs.len() - 1].clone()
    }

    /// Pieces of `t -> f⁻(a*t + b)` on `(t0, t1)`, for an increasing inner
    /// line, as `(t_lo, t_hi, slope, intercept)`.
    fn inverse_after_line(&self, t0: &Rational, t1: &Rational, a: &Rational, b: &Rational) -> Vec<[Rational; 4]> {
        let y0 = a * t0 + b;
        let y1 = a * t1 + b;
        let mut cuts = vec![y0.clone()];
        cuts.extend(self.ys.iter().filter(|y| **y > y0 && **y < y1).cloned());
        cuts.push(y1);
        cuts.dedup();
        let mut out = Vec::new();
        for w in cuts.windows(2) {
            let (ya, yb) = (&w[0], &w[1]);
            let j = (0..self.xs.len() - 1)
                .find(|&j| self.ys[j] <= *ya && self.ys[j + 1] >= *yb && self.ys[j] < self.ys[j + 1])
                .expect("inner range covered by outer values");
            let s = self.slope(j);
            let slope = a / &s;
            let ta = (ya - b) / a;
            let tb = (yb - b) / a;
            let za = &self.xs[j] + (ya - &self.ys[j]) / &s;
            let intercept = za - &slope * &ta;
            out.push([ta, tb, slope, intercept]);
        }
        out
    }
}

/// A diagonal with rational breakpoints: `δ(0) = 0`, `δ(1) = 1`,
/// non-decreasing, 2-Lipschitz and `δ(t) <= t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagonal {
    f: Pwl,
}

impl Diagonal {
    pub fn validate(breakpoints: Vec<Rational>, values: Vec<Rational>) -> Result<Self, DiagonalError> {
        if breakpoints.len() < 2 || breakpoints.len() != values.len() {
            return Err(DiagonalError::Shape);
        }
        let last = breakpoints.len() - 1;
        if !breakpoints[0].is_zero() {
            return Err(DiagonalError::Breakpoints { index: 0 });
        }
        if breakpoints[last] != Rational::one() {
            return Err(DiagonalError::Breakpoints { index: last });
        }
        if let Some(i) = breakpoints.windows(2).position(|w| w[0] >= w[1]) {
            return Err(DiagonalError::Breakpoints { index: i + 1 });
        }
        if !values[0].is_zero() || values[last] != Rational::one() {
            return Err(DiagonalError::Endpoint);
        }
        let f = Pwl { xs: breakpoints, ys: values };
        for piece in 0..last {
            let s = f.slope(piece);
            if s.is_negative() {
                return Err(DiagonalError::Monotonicity { piece });
            }
            if s > Rational::integer(2) {
                return Err(DiagonalError::Lipschitz { piece });
            }
        }
        if let Some(index) = f.xs.iter().zip(&f.ys).position(|(t, d)| d > t) {
            return Err(DiagonalError::AboveIdentity { index });
        }
        Ok(Diagonal { f })
    }

    /// Builds a diagonal from `(breakpoint, value)` pairs, silently dropping
    /// repeated breakpoints (zero-width pieces).
    pub fn from_points(points: Vec<(Rational, Rational)>) -> Result<Self, DiagonalError> {
        let mut bs: Vec<Rational> = Vec::with_capacity(points.len());
        let mut vs: Vec<Rational> = Vec::with_capacity(points.len());
        for (t, v) in points {
            if bs.last() == Some(&t) {
                continue;
            }
            bs.push(t);
            vs.push(v);
        }
        Diagonal::validate(bs, vs)
    }

    pub fn identity() -> Self {
        Diagonal::validate(vec![Rational::zero(), Rational::one()], vec![Rational::zero(), Rational::one()]).unwrap()
    }

    /// `max(0, 2t - 1)`.
    pub fn lower_frechet() -> Self {
        let h = Rational::new(1, 2);
        Diagonal::validate(
            vec![Rational::zero(), h, Rational::one()],
            vec![Rational::zero(), Rational::zero(), Rational::one()],
        )
        .unwrap()
    }

    pub fn breakpoints(&self) -> &[Rational] {
        &self.f.xs
    }

    pub fn values(&self) -> &[Rational] {
        &self.f.ys
    }

    pub fn eval(&self, t: &Rational) -> Rational {
        self.f.eval(t)
    }

    /// Slope on piece `j` (between breakpoints `j` and `j + 1`).
    pub fn slope(&self, piece: usize) -> Rational {
        self.f.slope(piece)
    }

    pub fn piece_count(&self) -> usize {
        self.f.xs.len() - 1
    }

    /// `∫ δ`.
    pub fn integral(&self) -> Rational {
        self.f
            .xs
            .windows(2)
            .zip(self.f.ys.windows(2))
            .map(|(x, y)| (&x[1] - &x[0]) * (&y[0] + &y[1]) / Rational::integer(2))
            .sum()
    }

    /// Spearman's footrule of any copula with this diagonal, `6 ∫ δ - 2`.
    pub fn phi(&self) -> Rational {
        Rational::integer(6) * self.integral() - Rational::integer(2)
    }

    fn g(&self) -> Pwl {
        let ys = self.f.xs.iter().zip(&self.f.ys).map(|(t, d)| Rational::integer(2) * t - d).collect();
        Pwl { xs: self.f.xs.clone(), ys }
    }
}

/// Something that can be evaluated as a diagonal at rational points.
pub trait DiagonalSection {
    fn at(&self, t: &Rational) -> Rational;
}

impl DiagonalSection for Diagonal {
    fn at(&self, t: &Rational) -> Rational {
        self.eval(t)
    }
}

impl<F: Fn(&Rational) -> Rational> DiagonalSection for F {
    fn at(&self, t: &Rational) -> Rational {
        self(t)
    }
}

// ---------------------------------------------------------------------------
// Slope-0/2 diagonals
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Diagonal02Error {
    #[error("n must be a positive even integer, got {n}")]
    OddOrEmpty { n: usize },
    #[error("expected {expected} slopes, got {got}")]
    WrongLength { expected: usize, got: usize },
    #[error("slope pattern may only contain '0' and '2' (position {position})")]
    BadSlope { position: usize },
    #[error("pattern needs exactly n/2 twos")]
    Count,
    #[error("more twos than zeros among the first {prefix} intervals (δ would exceed the identity)")]
    Prefix { prefix: usize },
}

/// A diagonal with slope 0 or 2 on each interval `((i-1)/n, i/n)`, stored as
/// its slope pattern.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Diagonal02 {
    twos: Vec<bool>,
}

impl Diagonal02 {
    pub fn new(n: usize, slopes: &[u8]) -> Result<Self, Diagonal02Error> {
        if n == 0 || n % 2 == 1 {
            return Err(Diagonal02Error::OddOrEmpty { n });
        }
        if slopes.len() != n {
            return Err(Diagonal02Error::WrongLength { expected: n, got: slopes.len() });
        }
        let mut twos = Vec::with_capacity(n);
        for (position, &s) in slopes.iter().enumerate() {
            match s {
                0 => twos.push(false),
                2 => twos.push(true),
                _ => return Err(Diagonal02Error::BadSlope { position }),
            }
        }
        let mut count = 0;
        for (i, &two) in twos.iter().enumerate() {
            count += two as usize;
            if 2 * count > i + 1 {
                return Err(Diagonal02Error::Prefix { prefix: i + 1 });
            }
        }
        if 2 * count != n {
            return Err(Diagonal02Error::Count);
        }
        Ok(Diagonal02 { twos })
    }

    /// Parses a pattern such as `"002022"`.
    pub fn from_pattern(n: usize, pattern: &str) -> Result<Self, Diagonal02Error> {
        let mut slopes = Vec::with_capacity(pattern.len());
        for (position, c) in pattern.chars().enumerate() {
            match c {
                '0' => slopes.push(0),
                '2' => slopes.push(2),
                _ => return Err(Diagonal02Error::BadSlope { position }),
            }
        }
        Diagonal02::new(n, &slopes)
    }

    pub fn n(&self) -> usize {
        self.twos.len()
    }

    pub fn slopes(&self) -> Vec<u8> {
        self.twos.iter().map(|&t| if t { 2 } else { 0 }).collect()
    }

    pub fn pattern(&self) -> String {
        self.twos.iter().map(|&t| if t { '2' } else { '0' }).collect()
    }

    /// Intervals (1-indexed) with slope 0.
    pub fn j0(&self) -> Vec<usize> {
        (1..=self.n()).filter(|&i| !self.twos[i - 1]).collect()
    }

    /// Intervals (1-indexed) with slope 2.
    pub fn j2(&self) -> Vec<usize> {
        (1..=self.n()).filter(|&i| self.twos[i - 1]).collect()
    }

    pub fn to_diagonal(&self) -> Diagonal {
        let n = self.n() as i64;
        let mut breakpoints = vec![Rational::zero()];
        let mut values = vec![Rational::zero()];
        let mut count = 0;
        for (i, &two) in self.twos.iter().enumerate() {
            count += 2 * two as i64;
            breakpoints.push(Rational::new(i as i64 + 1, n));
            values.push(Rational::new(count, n));
        }
        Diagonal::validate(breakpoints, values).expect("slope pattern invariants give a diagonal")
    }
}

/// All valid slope patterns on `n` intervals, in lexicographic order of the
/// pattern (`0 < 2`).
pub fn enumerate_02(n: usize) -> Vec<Diagonal02> {
    fn go(n: usize, acc: &mut Vec<bool>, twos: usize, out: &mut Vec<Diagonal02>) {
        if acc.len() == n {
            if 2 * twos == n {
                out.push(Diagonal02 { twos: acc.clone() });
            }
            return;
        }
        let zeros = acc.len() - twos;
        if zeros < n / 2 {
            acc.push(false);
            go(n, acc, twos, out);
            acc.pop();
        }
        if twos < zeros {
            acc.push(true);
            go(n, acc, twos + 1, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    if n > 0 && n.is_multiple_of(2) {
        go(n, &mut Vec::new(), 0, &mut out);
    }
    out
}

/// Approximates a diagonal from below by a slope-0/2 diagonal on `2N`
/// intervals: with `y_i = δ(i/2N)` and `i_k` the first `i` with
/// `y_i >= k/N`, the slope is 2 exactly on the intervals `i_1, ..., i_N`.
/// The result satisfies `δ̃ <= δ` and `‖δ - δ̃‖∞ <= 1/N`.
///
/// Panics if `N == 0` or `delta` is not a diagonal (no index reaches a
/// threshold).
pub fn approximate_02<D: DiagonalSection + ?Sized>(delta: &D, big_n: usize) -> Diagonal02 {
    assert!(big_n > 0, "N must be positive");
    let m = 2 * big_n;
    let ys: Vec<Rational> = (1..=m).map(|i| delta.at(&Rational::new(i as i64, m as i64))).collect();
    let mut slopes = vec![0u8; m];
    let mut start = 0;
    for k in 1..=big_n {
        let level = Rational::new(k as i64, big_n as i64);
        let i = (start..m).find(|&i| ys[i] >= level).expect("input is not a diagonal");
        slopes[i] = 2;
        start = i + 1;
    }
    Diagonal02::new(m, &slopes).expect("construction respects the slope-pattern invariants")
}

/// `sup |a - b|`, attained at one of the merged breakpoints.
pub fn sup_distance(a: &Diagonal, b: &Diagonal) -> Rational {
    merged_breakpoints(a, b).iter().map(|t| (a.eval(t) - b.eval(t)).abs()).max().unwrap_or_default()
}

/// `a <= b` everywhere, checked at the merged breakpoints.
pub fn lies_below(a: &Diagonal, b: &Diagonal) -> bool {
    merged_breakpoints(a, b).iter().all(|t| a.eval(t) <= b.eval(t))
}

fn merged_breakpoints(a: &Diagonal, b: &Diagonal) -> Vec<Rational> {
    let mut ts: Vec<Rational> = a.breakpoints().iter().chain(b.breakpoints()).cloned().collect();
    ts.sort();
    ts.dedup();
    ts
}

// ---------------------------------------------------------------------------
// Diagonal copulas
// ---------------------------------------------------------------------------

/// `E_δ(u, v) = min(u, v, (δ(u) + δ(v)) / 2)`.
pub fn ed_cdf(d: &Diagonal, u: &Rational, v: &Rational) -> Result<Rational, OutsideUnitInterval> {
    check_unit(&[u, v])?;
    let mid = (d.eval(u) + d.eval(v)) / Rational::integer(2);
    Ok(Rational::min_of(&Rational::min_of(u, v), &mid))
}

/// The kernel of `E_δ` at `t`: mass `weight_lower` at `lower`, the rest at
/// `upper`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KernelAtom {
    pub t: Rational,
    pub lower: Rational,
    pub upper: Rational,
    pub weight_lower: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum KernelError {
    #[error("t = {t} is a breakpoint; the kernel is only defined almost everywhere")]
    AtBreakpoint { t: Rational },
    #[error("t = {t} is not inside (0, 1)")]
    OutsideInterior { t: Rational },
}

pub fn kernel_at(d: &Diagonal, t: &Rational) -> Result<KernelAtom, KernelError> {
    if !t.is_positive() || *t >= Rational::one() {
        return Err(KernelError::OutsideInterior { t: t.clone() });
    }
    if d.breakpoints().contains(t) {
        return Err(KernelError::AtBreakpoint { t: t.clone() });
    }
    let piece = d.breakpoints().iter().position(|b| b > t).expect("t < 1") - 1;
    let g = d.g();
    let lower = g.inverse_min(&d.eval(t));
    let upper = d.f.inverse_min(&g.eval(t));
    Ok(KernelAtom { t: t.clone(), lower, upper, weight_lower: d.slope(piece) / Rational::integer(2) })
}

/// The mass of `E_δ` as weighted segments: on each piece of `δ` with slope
/// `w`, the graph of `L` with weight `w/2` and the graph of `U` with weight
/// `1 - w/2`.
pub fn support_map(d: &Diagonal) -> SegmentMap {
    let two = Rational::integer(2);
    let g = d.g();
    let mut pieces = Vec::new();
    for j in 0..d.piece_count() {
        let (t0, t1) = (&d.breakpoints()[j], &d.breakpoints()[j + 1]);
        let w = d.slope(j);
        let weight_lower = &w / &two;
        let weight_upper = Rational::one() - &weight_lower;
        if weight_lower.is_positive() {
            // L(t) = g⁻(δ(t)), δ(t) = w t + c on this piece
            let c = &d.values()[j] - &w * t0;
            for [a, b, s, k] in g.inverse_after_line(t0, t1, &w, &c) {
                pieces.push(Segment::new(a, b, s, k).weighted(weight_lower.clone()));
            }
        }
        if weight_upper.is_positive() {
            // U(t) = δ⁻(g(t)), g(t) = (2 - w) t - c
            let gs = &two - &w;
            let c = &g.ys[j] - &gs * t0;
            for [a, b, s, k] in d.f.inverse_after_line(t0, t1, &gs, &c) {
                pieces.push(Segment::new(a, b, s, k).weighted(weight_upper.clone()));
            }
        }
    }
    SegmentMap::new(pieces).expect("kernel of a diagonal copula is doubly stochastic")
}

// ---------------------------------------------------------------------------
// Diagonal copulas versus symmetric shuffles
// ---------------------------------------------------------------------------

/// The symmetric shuffle equal to `E_δ` for a slope-0/2 diagonal: the k-th
/// slope-2 interval is paired with the k-th slope-0 interval, so `I^-` is the
/// set of slope-2 intervals and the permutation increases on both classes.
pub fn diagonal_to_shuffle(d: &Diagonal02) -> Involution {
    let swaps: Vec<(usize, usize)> = d.j2().into_iter().zip(d.j0()).collect();
    Involution::from_swaps(d.n(), &swaps)
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ShuffleDiagonalError {
    #[error("permutation has a fixed point at {index}")]
    FixedPoint { index: usize },
    #[error("permutation is not increasing on I^- (at {index})")]
    NotBiMonotone { index: usize },
}

/// The diagonal section of a shuffle copula, exact at the grid `i/N` and
/// linear in between.
pub fn shuffle_diagonal(p: &Permutation) -> Diagonal {
    let map = SegmentMap::from_permutation(p);
    let n = p.n() as i64;
    let ts: Vec<Rational> = (0..=n).map(|i| Rational::new(i, n)).collect();
    let vs = ts.iter().map(|t| map.cdf_unchecked(t, t)).collect();
    Diagonal::validate(ts, vs).expect("shuffle diagonal is a diagonal")
}

/// The diagonal of a fixed-point-free, bi-monotone symmetric shuffle, which
/// is then a diagonal copula.
pub fn shuffle_to_diagonal(p: &Involution) -> Result<Diagonal02, ShuffleDiagonalError> {
    let classes = classify(p.permutation());
    if let Some(&index) = classes.zero.first() {
        return Err(ShuffleDiagonalError::FixedPoint { index });
    }
    if let Some(w) = classes.minus.windows(2).find(|w| p.at(w[0]) >= p.at(w[1])) {
        return Err(ShuffleDiagonalError::NotBiMonotone { index: w[1] });
    }
    let d = shuffle_diagonal(p.permutation());
    let n = Rational::from(p.n());
    let slopes: Vec<u8> = d
        .values()
        .windows(2)
        .map(|w| {
            let s = (&w[1] - &w[0]) * &n;
            if s.is_zero() {
                0
            } else {
                2
            }
        })
        .collect();
    let d02 = Diagonal02::new(p.n(), &slopes).expect("fixed-point-free symmetric shuffles have slope 0/2 diagonals");
    debug_assert_eq!(d02.to_diagonal(), d);
    Ok(d02)
}
