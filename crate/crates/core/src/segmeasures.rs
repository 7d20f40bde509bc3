//! Copulas whose mass sits on finitely many line segments.
//!
//! A [`SegmentMap`] is a list of weighted linear pieces `x -> slope*x + c`
//! on subintervals of `[0, 1]`. Weight `w` means the piece carries mass
//! density `w` per unit of `x`. For completely dependent copulas (shuffles,
//! `C_alpha`) every weight is one and every slope is `±1`; diagonal copulas
//! split their mass between two graphs and produce weights `w/2` and other
//! slopes. The map describes a copula iff the weights over every `x` sum to
//! one and the pushed-forward density over every `y` is one.
//!
//! Besides the exact CDF and the exact values of Spearman's footrule and
//! rho, this module carries a midpoint-rule quadrature oracle that works on
//! any copula CDF given as a float closure.

use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::exactnum::Rational;
use crate::shuffles::Permutation;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SegmentMapError {
    #[error("piece {index} has an empty or reversed domain")]
    EmptyPiece { index: usize },
    #[error("piece {index} leaves the unit square")]
    OutsideUnit { index: usize },
    #[error("piece {index} has slope zero")]
    ZeroSlope { index: usize },
    #[error("piece {index} has weight outside (0, 1]")]
    BadWeight { index: usize },
    #[error("kernel weights do not sum to one on ({lo}, {hi})")]
    DomainCoverage { lo: Rational, hi: Rational },
    #[error("image density is not one on ({lo}, {hi})")]
    NotMeasurePreserving { lo: Rational, hi: Rational },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("argument {value} outside [0, 1]")]
pub struct OutsideUnitInterval {
    pub value: Rational,
}

pub(crate) fn check_unit(values: &[&Rational]) -> Result<(), OutsideUnitInterval> {
    for v in values {
        if v.is_negative() || **v > Rational::one() {
            return Err(OutsideUnitInterval { value: (*v).clone() });
        }
    }
    Ok(())
}

/// `h(x) = slope * x + intercept` on `(x_lo, x_hi)` carrying weight `weight`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment {
    pub x_lo: Rational,
    pub x_hi: Rational,
    pub slope: Rational,
    pub intercept: Rational,
    pub weight: Rational,
}

impl Segment {
    pub fn new(x_lo: Rational, x_hi: Rational, slope: Rational, intercept: Rational) -> Self {
        Segment { x_lo, x_hi, slope, intercept, weight: Rational::one() }
    }

    pub fn weighted(mut self, weight: Rational) -> Self {
        self.weight = weight;
        self
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        &self.slope * x + &self.intercept
    }

    /// Image interval `(lo, hi)` of the piece.
    pub fn image(&self) -> (Rational, Rational) {
        let a = self.eval(&self.x_lo);
        let b = self.eval(&self.x_hi);
        if a <= b {
            (a, b)
        } else {
            (b, a)
        }
    }

    /// Sub-interval of the domain where `x <= u` and `h(x) <= v`; empty
    /// intervals come back with `lo >= hi`.
    fn lower_set(&self, u: &Rational, v: &Rational) -> (Rational, Rational) {
        let mut lo = self.x_lo.clone();
        let mut hi = Rational::min_of(&self.x_hi, u);
        let t = (v - &self.intercept) / &self.slope;
        if self.slope.is_positive() {
            hi = Rational::min_of(&hi, &t);
        } else {
            lo = Rational::max_of(&lo, &t);
        }
        (lo, hi)
    }
}

/// Integral of `a*x + b` over `[lo, hi]`.
fn integrate_linear(a: &Rational, b: &Rational, lo: &Rational, hi: &Rational) -> Rational {
    a * (hi.square() - lo.square()) / Rational::integer(2) + b * (hi - lo)
}

/// A copula given by its mass on finitely many weighted segments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentMap {
    pieces: Vec<Segment>,
}

fn elementary(mut cuts: Vec<Rational>) -> Vec<(Rational, Rational)> {
    cuts.sort();
    cuts.dedup();
    cuts.windows(2).map(|w| (w[0].clone(), w[1].clone())).collect()
}

impl SegmentMap {
    /// Validates the pieces: non-empty domains inside `[0, 1]`, images
    /// inside `[0, 1]`, non-zero slopes, kernel weights summing to one over
    /// `[0, 1]`, and unit pushed-forward density (the map preserves
    /// Lebesgue measure).
    pub fn new(pieces: Vec<Segment>) -> Result<Self, SegmentMapError> {
        let zero = Rational::zero();
        let one = Rational::one();
        for (index, p) in pieces.iter().enumerate() {
            if p.x_lo >= p.x_hi {
                return Err(SegmentMapError::EmptyPiece { index });
            }
            if p.slope.is_zero() {
                return Err(SegmentMapError::ZeroSlope { index });
            }
            if !p.weight.is_positive() || p.weight > one {
                return Err(SegmentMapError::BadWeight { index });
            }
            let (lo, hi) = p.image();
            if p.x_lo < zero || p.x_hi > one || lo < zero || hi > one {
                return Err(SegmentMapError::OutsideUnit { index });
            }
        }

        let mut cuts: Vec<Rational> = pieces.iter().flat_map(|p| [p.x_lo.clone(), p.x_hi.clone()]).collect();
        cuts.push(zero.clone());
        cuts.push(one.clone());
        for (lo, hi) in elementary(cuts) {
            let w: Rational = pieces.iter().filter(|p| p.x_lo <= lo && p.x_hi >= hi).map(|p| &p.weight).sum();
            if w != one {
                return Err(SegmentMapError::DomainCoverage { lo, hi });
            }
        }

        let images: Vec<(Rational, Rational, Rational)> = pieces
            .iter()
            .map(|p| {
                let (lo, hi) = p.image();
                (lo, hi, &p.weight / p.slope.abs())
            })
            .collect();
        let mut cuts: Vec<Rational> = images.iter().flat_map(|(a, b, _)| [a.clone(), b.clone()]).collect();
        cuts.push(zero);
        cuts.push(one.clone());
        for (lo, hi) in elementary(cuts) {
            let d: Rational = images.iter().filter(|(a, b, _)| *a <= lo && *b >= hi).map(|(_, _, d)| d).sum();
            if d != one {
                return Err(SegmentMapError::NotMeasurePreserving { lo, hi });
            }
        }
        Ok(SegmentMap { pieces })
    }

    pub fn identity() -> Self {
        SegmentMap {
            pieces: alloc::vec![Segment::new(Rational::zero(), Rational::one(), Rational::one(), Rational::zero())],
        }
    }

    /// The shuffle map: on `((i-1)/N, i/N)` the line `x + (pi(i) - i)/N`.
    pub fn from_permutation(p: &Permutation) -> Self {
        let n = p.n() as i64;
        let pieces = (1..=p.n())
            .map(|i| {
                let ii = i as i64;
                Segment::new(
                    Rational::new(ii - 1, n),
                    Rational::new(ii, n),
                    Rational::one(),
                    Rational::new(p.at(i) as i64 - ii, n),
                )
            })
            .collect();
        SegmentMap { pieces }
    }

    pub fn pieces(&self) -> &[Segment] {
        &self.pieces
    }

    /// `C(u, v)`: the mass of `[0, u] x [0, v]`.
    pub fn cdf(&self, u: &Rational, v: &Rational) -> Result<Rational, OutsideUnitInterval> {
        check_unit(&[u, v])?;
        Ok(self.cdf_unchecked(u, v))
    }

    pub(crate) fn cdf_unchecked(&self, u: &Rational, v: &Rational) -> Rational {
        let mut total = Rational::zero();
        for p in &self.pieces {
            let (lo, hi) = p.lower_set(u, v);
            if lo < hi {
                total += &p.weight * (hi - lo);
            }
        }
        total
    }

    /// Spearman's footrule, `6 * sum_w ∫ min(x, h(x)) dx - 2`.
    pub fn phi_exact(&self) -> Rational {
        let mut acc = Rational::zero();
        let one = Rational::one();
        for p in &self.pieces {
            // the integrand's only kink on a piece is where h crosses the diagonal
            let mut cuts = alloc::vec![p.x_lo.clone(), p.x_hi.clone()];
            if p.slope != one {
                let x = &p.intercept / (&one - &p.slope);
                if x > p.x_lo && x < p.x_hi {
                    cuts.insert(1, x);
                }
            }
            for w in cuts.windows(2) {
                let mid = (&w[0] + &w[1]) / Rational::integer(2);
                let part = if p.eval(&mid) < mid {
                    integrate_linear(&p.slope, &p.intercept, &w[0], &w[1])
                } else {
                    integrate_linear(&one, &Rational::zero(), &w[0], &w[1])
                };
                acc += &p.weight * part;
            }
        }
        Rational::integer(6) * acc - Rational::integer(2)
    }

    /// Spearman's rho, `12 * sum_w ∫ x h(x) dx - 3`.
    pub fn rho_exact(&self) -> Rational {
        let mut acc = Rational::zero();
        for p in &self.pieces {
            let (a, b) = (&p.x_lo, &p.x_hi);
            let cubic = &p.slope * (b.cube() - a.cube()) / Rational::integer(3);
            let quad = &p.intercept * (b.square() - a.square()) / Rational::integer(2);
            acc += &p.weight * (cubic + quad);
        }
        Rational::integer(12) * acc - Rational::integer(3)
    }

    /// Float view for fast CDF evaluation in quadrature loops.
    pub fn to_float(&self) -> FloatSegmentMap {
        FloatSegmentMap {
            pieces: self
                .pieces
                .iter()
                .map(|p| [p.x_lo.to_f64(), p.x_hi.to_f64(), p.slope.to_f64(), p.intercept.to_f64(), p.weight.to_f64()])
                .collect(),
        }
    }
}

/// Double-precision copy of a [`SegmentMap`].
#[derive(Debug, Clone)]
pub struct FloatSegmentMap {
    pieces: Vec<[f64; 5]>,
}

impl FloatSegmentMap {
    pub fn cdf(&self, u: f64, v: f64) -> f64 {
        let mut total = 0.0;
        for &[x_lo, x_hi, slope, c, w] in &self.pieces {
            let mut lo = x_lo;
            let mut hi = x_hi.min(u);
            let t = (v - c) / slope;
            if slope > 0.0 {
                hi = hi.min(t);
            } else {
                lo = lo.max(t);
            }
            if lo < hi {
                total += w * (hi - lo);
            }
        }
        total
    }
}

// ---------------------------------------------------------------------------
// Quadrature oracle
// ---------------------------------------------------------------------------

/// Midpoint-rule oracle settings. The error bounds follow from the
/// Lipschitz constants of copulas: the diagonal section is 2-Lipschitz,
/// giving `3/n` for the footrule, and the CDF is 1-Lipschitz in each
/// argument, for which `24/n` is a conservative bound on rho.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridOracleConfig {
    pub resolution: u32,
}

impl GridOracleConfig {
    pub fn new(resolution: u32) -> Self {
        assert!(resolution > 0, "resolution must be positive");
        GridOracleConfig { resolution }
    }

    pub fn phi_bound(&self) -> Rational {
        Rational::new(3, self.resolution as i64)
    }

    pub fn rho_bound(&self) -> Rational {
        Rational::new(24, self.resolution as i64)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleEstimate {
    pub value: f64,
    pub bound: Rational,
}

impl OracleEstimate {
    /// `|value - exact| <= bound`.
    pub fn brackets(&self, exact: &Rational) -> bool {
        libm::fabs(self.value - exact.to_f64()) <= self.bound.to_f64()
    }
}

/// `6 ∫ C(t, t) dt - 2` by the midpoint rule on `n` cells.
pub fn phi_numeric<F: Fn(f64, f64) -> f64>(cdf: F, config: GridOracleConfig) -> OracleEstimate {
    let n = config.resolution;
    let h = 1.0 / n as f64;
    let s: f64 = (0..n)
        .map(|i| {
            let t = (i as f64 + 0.5) * h;
            cdf(t, t)
        })
        .sum();
    OracleEstimate { value: 6.0 * s * h - 2.0, bound: config.phi_bound() }
}

/// `12 ∫∫ C(u, v) du dv - 3` by the midpoint rule on an `n x n` grid.
pub fn rho_numeric<F: Fn(f64, f64) -> f64>(cdf: F, config: GridOracleConfig) -> OracleEstimate {
    let n = config.resolution;
    let h = 1.0 / n as f64;
    let mut total = 0.0;
    for i in 0..n {
        let u = (i as f64 + 0.5) * h;
        let row: f64 = (0..n).map(|j| cdf(u, (j as f64 + 0.5) * h)).sum();
        total += row;
    }
    OracleEstimate { value: 12.0 * total * h * h - 3.0, bound: config.rho_bound() }
}

/// Orders two segments by domain start, then slope; useful for stable
/// output.
pub fn segment_order(a: &Segment, b: &Segment) -> Ordering {
    a.x_lo.cmp(&b.x_lo).then_with(|| a.slope.cmp(&b.slope)).then_with(|| a.intercept.cmp(&b.intercept))
}
