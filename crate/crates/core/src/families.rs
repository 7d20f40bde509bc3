//! Named copula families with closed-form statistics.
//!
//! * `C_α`: mass on `1 - x` over `[0, α] ∪ [1-α, 1]` and on the diagonal in
//!   between. Attains the lower bound.
//! * `E_{δ_a↑}`, `a ∈ [1/4, 1/2]` and `E_{δ_b↓}`, `b ∈ [0, 1/4]`: diagonal
//!   copulas interpolating from `S*_2` through `E_{δ_0↓}` to `S*_4`.
//! * Ordinal sums of copulas on disjoint blocks, with `M` outside.
//! * `O_N`: `N` equal blocks each carrying `E_{δ_{a_N}↑}`, `a_N = N/(2N+2)`,
//!   which lie strictly above the curve `r`.

use alloc::vec::Vec;

use crate::bounds::r_of;
use crate::diagonals::{support_map, Diagonal};
use crate::exactnum::{q, Rational};
use crate::segmeasures::{Segment, SegmentMap};

/// Spearman's footrule and rho of one copula.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Stats {
    pub phi: Rational,
    pub rho: Rational,
}

impl Stats {
    pub fn new(phi: Rational, rho: Rational) -> Self {
        Stats { phi, rho }
    }

    /// `M`.
    pub fn upper_frechet() -> Self {
        Stats::new(Rational::one(), Rational::one())
    }

    /// `W`.
    pub fn lower_frechet() -> Self {
        Stats::new(q(-1, 2), q(-1, 1))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FamilyError {
    #[error("parameter {name} = {value} outside [{lo}, {hi}]")]
    Parameter { name: &'static str, value: Rational, lo: Rational, hi: Rational },
    #[error("block {index} is degenerate or leaves [0, 1]")]
    Degenerate { index: usize },
    #[error("blocks {first} and {second} overlap")]
    Overlap { first: usize, second: usize },
    #[error("need N >= 2, got {n}")]
    TooFewBlocks { n: usize },
}

fn check_param(name: &'static str, value: &Rational, lo: Rational, hi: Rational) -> Result<(), FamilyError> {
    if *value < lo || *value > hi {
        return Err(FamilyError::Parameter { name, value: value.clone(), lo, hi });
    }
    Ok(())
}

fn poly(x: &Rational, coeffs: &[Rational]) -> Rational {
    coeffs.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
}

fn push_nonempty(pieces: &mut Vec<Segment>, seg: Segment) {
    if seg.x_lo < seg.x_hi {
        pieces.push(seg);
    }
}

// ---------------------------------------------------------------------------
// C_α
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CAlpha {
    pub alpha: Rational,
    pub map: SegmentMap,
    pub stats: Stats,
}

/// `(6α² - 6α + 1, -16α³ + 24α² - 12α + 1)`.
pub fn c_alpha_stats(alpha: &Rational) -> Stats {
    Stats::new(poly(alpha, &[q(1, 1), q(-6, 1), q(6, 1)]), poly(alpha, &[q(1, 1), q(-12, 1), q(24, 1), q(-16, 1)]))
}

pub fn c_alpha(alpha: &Rational) -> Result<CAlpha, FamilyError> {
    check_param("alpha", alpha, Rational::zero(), q(1, 2))?;
    let one = Rational::one();
    let minus_one = -Rational::one();
    let mut pieces = Vec::new();
    push_nonempty(&mut pieces, Segment::new(Rational::zero(), alpha.clone(), minus_one.clone(), one.clone()));
    push_nonempty(&mut pieces, Segment::new(alpha.clone(), &one - alpha, one.clone(), Rational::zero()));
    push_nonempty(&mut pieces, Segment::new(&one - alpha, one.clone(), minus_one, one));
    let map = SegmentMap::new(pieces).expect("C_alpha is a shuffle");
    Ok(CAlpha { alpha: alpha.clone(), map, stats: c_alpha_stats(alpha) })
}

// ---------------------------------------------------------------------------
// δ_a↑ and δ_b↓
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeltaUp {
    pub a: Rational,
    pub diagonal: Diagonal,
    pub stats: Stats,
}

/// `(6a² - 6a + 1, 8a³ - 6a + 3/2)`.
pub fn delta_up_stats(a: &Rational) -> Stats {
    Stats::new(poly(a, &[q(1, 1), q(-6, 1), q(6, 1)]), poly(a, &[q(3, 2), q(-6, 1), q(0, 1), q(8, 1)]))
}

/// `0` on `[0, a]`, `x - a` on `[a, 1-a]`, `2x - 1` on `[1-a, 1]`.
pub fn delta_up(a: &Rational) -> Result<DeltaUp, FamilyError> {
    check_param("a", a, q(1, 4), q(1, 2))?;
    let one = Rational::one();
    let diagonal = Diagonal::from_points(alloc::vec![
        (Rational::zero(), Rational::zero()),
        (a.clone(), Rational::zero()),
        (&one - a, &one - a - a),
        (one.clone(), one),
    ])
    .expect("δ_a↑ is a diagonal");
    Ok(DeltaUp { a: a.clone(), diagonal, stats: delta_up_stats(a) })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeltaDown {
    pub b: Rational,
    pub diagonal: Diagonal,
    /// The mass of `E_{δ_b↓}`, assembled branch by branch.
    pub support: SegmentMap,
    pub stats: Stats,
}

/// `(-6b² + 3b - 1/8, 8b³ - 12b² + 9b/2 + 1/8)`.
pub fn delta_down_stats(b: &Rational) -> Stats {
    Stats::new(poly(b, &[q(-1, 8), q(3, 1), q(-6, 1)]), poly(b, &[q(1, 8), q(9, 2), q(-12, 1), q(8, 1)]))
}

/// `0` on `[0, 1/4]`, `2(x - 1/4)` on `[1/4, 1/4+b]`, `x + b - 1/4` on
/// `[1/4+b, 3/4-b]`, `1/2` on `[3/4-b, 3/4]`, `2x - 1` on `[3/4, 1]`.
pub fn delta_down(b: &Rational) -> Result<DeltaDown, FamilyError> {
    check_param("b", b, Rational::zero(), q(1, 4))?;
    let one = Rational::one();
    let quarter = q(1, 4);
    let three_q = q(3, 4);
    let diagonal = Diagonal::from_points(alloc::vec![
        (Rational::zero(), Rational::zero()),
        (quarter.clone(), Rational::zero()),
        (&quarter + b, b + b),
        (&three_q - b, q(1, 2)),
        (three_q.clone(), q(1, 2)),
        (one.clone(), one.clone()),
    ])
    .expect("δ_b↓ is a diagonal");

    let (s1, s2, half) = (Rational::one(), Rational::integer(2), q(1, 2));
    let z = Rational::zero();
    let mut pieces = Vec::new();
    let mut add = |lo: Rational, hi: Rational, slope: &Rational, c: Rational, w: &Rational| {
        push_nonempty(&mut pieces, Segment::new(lo, hi, slope.clone(), c).weighted(w.clone()));
    };
    add(z.clone(), b.clone(), &s1, quarter.clone(), &one);
    add(b.clone(), quarter.clone(), &s2, &quarter - b, &one);
    add(quarter.clone(), &quarter + b, &s1, -&quarter, &one);
    add(&quarter + b, &three_q - b, &half, q(5, 8) - &half * b, &half);
    add(&quarter + b, &three_q - b, &half, q(-1, 8) + &half * b, &half);
    add(&three_q - b, three_q.clone(), &s1, quarter.clone(), &one);
    add(three_q.clone(), &one - b, &s2, q(-5, 4) + b, &one);
    add(&one - b, one.clone(), &s1, -&quarter, &one);
    let support = SegmentMap::new(pieces).expect("h_b is doubly stochastic");
    Ok(DeltaDown { b: b.clone(), diagonal, support, stats: delta_down_stats(b) })
}

// ---------------------------------------------------------------------------
// Ordinal sums
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrdinalComponent {
    pub a: Rational,
    pub b: Rational,
    pub stats: Stats,
    /// The component's mass, needed only to assemble the sum's map.
    pub map: Option<SegmentMap>,
}

impl OrdinalComponent {
    pub fn new(a: Rational, b: Rational, stats: Stats) -> Self {
        OrdinalComponent { a, b, stats, map: None }
    }

    pub fn with_map(mut self, map: SegmentMap) -> Self {
        self.map = Some(map);
        self
    }
}

/// Blocks `(a_k, b_k)` carrying copulas `C_k`; `M` elsewhere. Blocks are
/// kept sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrdinalSumSpec {
    components: Vec<OrdinalComponent>,
}

impl OrdinalSumSpec {
    pub fn new(mut components: Vec<OrdinalComponent>) -> Result<Self, FamilyError> {
        for (index, c) in components.iter().enumerate() {
            if c.a.is_negative() || c.a >= c.b || c.b > Rational::one() {
                return Err(FamilyError::Degenerate { index });
            }
        }
        let mut order: Vec<usize> = (0..components.len()).collect();
        order.sort_by(|&i, &j| components[i].a.cmp(&components[j].a));
        for w in order.windows(2) {
            if components[w[0]].b > components[w[1]].a {
                return Err(FamilyError::Overlap { first: w[0].min(w[1]), second: w[0].max(w[1]) });
            }
        }
        components.sort_by(|x, y| x.a.cmp(&y.a));
        Ok(OrdinalSumSpec { components })
    }

    pub fn components(&self) -> &[OrdinalComponent] {
        &self.components
    }

    /// The mass of the ordinal sum, if every component carries a map.
    pub fn to_map(&self) -> Option<SegmentMap> {
        let mut pieces = Vec::new();
        let mut cursor = Rational::zero();
        for c in &self.components {
            let map = c.map.as_ref()?;
            push_nonempty(&mut pieces, Segment::new(cursor.clone(), c.a.clone(), Rational::one(), Rational::zero()));
            let width = &c.b - &c.a;
            for s in map.pieces() {
                let lo = &c.a + &width * &s.x_lo;
                let hi = &c.a + &width * &s.x_lo + &width * (&s.x_hi - &s.x_lo);
                // y = a + w h((x - a)/w)
                let intercept = &c.a - &s.slope * &c.a + &width * &s.intercept;
                pieces.push(Segment::new(lo, hi, s.slope.clone(), intercept).weighted(s.weight.clone()));
            }
            cursor = c.b.clone();
        }
        push_nonempty(&mut pieces, Segment::new(cursor, Rational::one(), Rational::one(), Rational::zero()));
        Some(SegmentMap::new(pieces).expect("ordinal sum of copulas is a copula"))
    }
}

/// `ρ = 1 - Σ w_k³ (1 - ρ_k)` and
/// `φ = Σ (6 a_k w_k + w_k² (φ_k + 2)) - 2 + 3 (1 - Σ (b_k² - a_k²))`
/// with `w_k = b_k - a_k`. The last term is the diagonal of `M` outside the
/// blocks and vanishes when the blocks tile `[0, 1]`.
pub fn ordinal_stats(spec: &OrdinalSumSpec) -> Stats {
    let mut rho = Rational::one();
    let mut phi = Rational::one();
    for c in &spec.components {
        let w = &c.b - &c.a;
        rho -= &(w.cube() * (Rational::one() - &c.stats.rho));
        phi += Rational::integer(6) * &c.a * &w + w.square() * (&c.stats.phi + Rational::integer(2));
        phi -= &(Rational::integer(3) * (c.b.square() - c.a.square()));
    }
    Stats::new(phi, rho)
}

/// `a_N = N / (2N + 2)`.
pub fn a_n(n: usize) -> Rational {
    Rational::new(n as i64, 2 * n as i64 + 2)
}

/// `φ(O_N) = (2N² + N - 4) / (2(N+1)²)`,
/// `ρ(O_N) = (2N⁵ + 6N⁴ + 3N³ - 7N² - 3N + 1) / (2N²(N+1)³)`.
pub fn o_star_closed_form(n: usize) -> Stats {
    let x = Rational::from(n);
    let x1 = &x + Rational::one();
    let phi = poly(&x, &[q(-4, 1), q(1, 1), q(2, 1)]) / (Rational::integer(2) * x1.square());
    let rho = poly(&x, &[q(1, 1), q(-3, 1), q(-7, 1), q(3, 1), q(6, 1), q(2, 1)])
        / (Rational::integer(2) * x.square() * x1.cube());
    Stats::new(phi, rho)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OStar {
    pub n: usize,
    pub a_n: Rational,
    pub spec: OrdinalSumSpec,
    pub stats: Stats,
    /// `ρ(O_N) - r(φ(O_N))`.
    pub gap: Rational,
}

pub fn o_star(n: usize) -> Result<OStar, FamilyError> {
    if n < 2 {
        return Err(FamilyError::TooFewBlocks { n });
    }
    let a = a_n(n);
    let up = delta_up(&a)?;
    let map = support_map(&up.diagonal);
    let ni = n as i64;
    let components = (0..ni)
        .map(|k| OrdinalComponent::new(q(k, ni), q(k + 1, ni), up.stats.clone()).with_map(map.clone()))
        .collect();
    let spec = OrdinalSumSpec::new(components)?;
    let stats = ordinal_stats(&spec);
    let r = r_of(&stats.phi).expect("φ(O_N) lies in [-1/2, 1]");
    let gap = &stats.rho - r.exact().expect("r is linear above 1/4");
    Ok(OStar { n, a_n: a, spec, stats, gap })
}
