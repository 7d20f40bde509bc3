//! Bounds on the `(φ, ρ)` region.
//!
//! Every copula satisfies
//! `(2/9)√3 (1 + 2φ)^{3/2} - 1 <= ρ <= 1 - (2/3)(1 - φ)²`.
//! The lower bound is sharp. Below the upper bound lie two attainable curves:
//! `r`, and the larger `s` built from the `E_{δ_b↓}` family and the ordinal
//! sums `O_N`. All curves are affine plus at most one term
//! `±c (base)^{3/2}`, so comparisons are exact via squared forms.

use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::str::FromStr;

use crate::exactnum::{cmp_pow32, q, surd_sign, Rational, SignedRoot};
use crate::families::o_star_closed_form;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RegionError {
    #[error("φ = {phi} outside [-1/2, 1]")]
    Phi { phi: Rational },
    #[error("ρ = {rho} outside [-1, 1]")]
    Rho { rho: Rational },
}

/// A labelled `(φ, ρ)` pair inside the box `[-1/2, 1] × [-1, 1]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegionPoint {
    phi: Rational,
    rho: Rational,
    pub label: String,
}

impl RegionPoint {
    pub fn new(phi: Rational, rho: Rational, label: impl Into<String>) -> Result<Self, RegionError> {
        if phi < q(-1, 2) || phi > Rational::one() {
            return Err(RegionError::Phi { phi });
        }
        if rho < q(-1, 1) || rho > Rational::one() {
            return Err(RegionError::Rho { rho });
        }
        Ok(RegionPoint { phi, rho, label: label.into() })
    }

    pub fn phi(&self) -> &Rational {
        &self.phi
    }

    pub fn rho(&self) -> &Rational {
        &self.rho
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Strict,
    Equality,
    Violated,
}

impl Verdict {
    /// `Less` is strict, `Equal` is equality, `Greater` is violated.
    fn from_slack(o: Ordering) -> Self {
        match o {
            Ordering::Less => Verdict::Strict,
            Ordering::Equal => Verdict::Equality,
            Ordering::Greater => Verdict::Violated,
        }
    }

    pub fn holds(self) -> bool {
        self != Verdict::Violated
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Strict => "strict",
            Verdict::Equality => "equality",
            Verdict::Violated => "violated",
        })
    }
}

/// `1 - (2/3)(1 - φ)²`.
pub fn upper_bound(phi: &Rational) -> Rational {
    Rational::one() - q(2, 3) * (Rational::one() - phi).square()
}

pub fn check_upper(pt: &RegionPoint) -> Verdict {
    Verdict::from_slack(pt.rho.cmp(&upper_bound(&pt.phi)))
}

/// `ρ >= (2/9)√3 (1+2φ)^{3/2} - 1`, i.e. `√(4/27) (1+2φ)^{3/2}` against
/// `1 + ρ`.
pub fn check_lower(pt: &RegionPoint) -> Verdict {
    let base = Rational::one() + Rational::integer(2) * &pt.phi;
    Verdict::from_slack(cmp_pow32(&q(4, 27), &base, &(Rational::one() + &pt.rho)))
}

// ---------------------------------------------------------------------------
// Curve values
// ---------------------------------------------------------------------------

/// `± c · base^{3/2}` with `c = sqrt(coeff_sq)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pow32Term {
    pub coeff_sq: Rational,
    pub negative: bool,
    pub base: Rational,
}

impl Pow32Term {
    fn root(&self) -> SignedRoot {
        SignedRoot::new(self.negative, &self.coeff_sq * self.base.cube())
    }
}

/// `affine + term`, exact in squared form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveValue {
    pub affine: Rational,
    pub term: Option<Pow32Term>,
}

impl CurveValue {
    pub fn rational(value: Rational) -> Self {
        CurveValue { affine: value, term: None }
    }

    fn with_term(affine: Rational, coeff_sq: Rational, negative: bool, base: Rational) -> Self {
        CurveValue { affine, term: Some(Pow32Term { coeff_sq, negative, base }) }
    }

    /// The value as a rational, when the 3/2-power term is rational.
    pub fn exact(&self) -> Option<Rational> {
        match &self.term {
            None => Some(self.affine.clone()),
            Some(t) => {
                let r = (&t.coeff_sq * t.base.cube()).sqrt_exact()?;
                Some(if t.negative { &self.affine - r } else { &self.affine + r })
            }
        }
    }

    pub fn approx(&self) -> f64 {
        self.affine.to_f64() + self.term.as_ref().map_or(0.0, |t| t.root().approx())
    }

    fn roots(&self) -> Vec<SignedRoot> {
        self.term.iter().map(Pow32Term::root).collect()
    }

    /// Exact order of two curve values.
    pub fn cmp_value(&self, other: &CurveValue) -> Ordering {
        let mut roots = self.roots();
        roots.extend(other.roots().into_iter().map(|r| SignedRoot::new(!r.negative, r.radicand)));
        surd_sign(&(&self.affine - &other.affine), &roots)
    }

    /// Exact order against a rational.
    pub fn cmp_rational(&self, y: &Rational) -> Ordering {
        self.cmp_value(&CurveValue::rational(y.clone()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("x = {x} outside [-1/2, 1]")]
pub struct DomainError {
    pub x: Rational,
}

fn check_domain(x: &Rational) -> Result<(), DomainError> {
    if *x < q(-1, 2) || *x > Rational::one() {
        return Err(DomainError { x: x.clone() });
    }
    Ok(())
}

/// `(2/9)√3 (1+2x)^{3/2} - 1`.
pub fn lower_curve(x: &Rational) -> Result<CurveValue, DomainError> {
    check_domain(x)?;
    Ok(CurveValue::with_term(q(-1, 1), q(4, 27), false, Rational::one() + Rational::integer(2) * x))
}

pub fn upper_curve(x: &Rational) -> Result<CurveValue, DomainError> {
    check_domain(x)?;
    Ok(CurveValue::rational(upper_bound(x)))
}

/// `2x + 1/2 - (√3/9)(1+2x)^{3/2}`, shared by `r` and `s` on `[-1/2, -1/8]`.
fn first_branch(x: &Rational) -> CurveValue {
    CurveValue::with_term(
        Rational::integer(2) * x + q(1, 2),
        q(1, 27),
        true,
        Rational::one() + Rational::integer(2) * x,
    )
}

/// The `n` with `x ∈ (1 - 3/(2n), 1 - 3/(2(n+1))]`, for `x ∈ (1/4, 1)`.
fn knot_index(x: &Rational) -> usize {
    let t = (q(3, 2) / (Rational::one() - x)).ceil();
    let n = usize::try_from(&t).expect("x < 1 gives a finite index") - 1;
    n.max(2)
}

fn knot_x(n: usize) -> Rational {
    Rational::one() - q(3, 2) / Rational::from(n)
}

/// `r` at `x`: a 3/2-power branch on `[-1/2, -1/8]`, piecewise linear
/// above. Knots go to the left branch.
pub fn r_of(x: &Rational) -> Result<CurveValue, DomainError> {
    check_domain(x)?;
    if *x <= q(-1, 8) {
        return Ok(first_branch(x));
    }
    if *x <= q(1, 4) {
        return Ok(CurveValue::rational(q(4, 3) * x + q(7, 24)));
    }
    if *x == Rational::one() {
        return Ok(CurveValue::rational(Rational::one()));
    }
    let n = Rational::from(knot_index(x));
    let denom = n.square() + &n;
    let slope = (Rational::integer(2) * &n + Rational::one()) / &denom;
    let intercept = (Rational::integer(2) * n.square() - Rational::integer(2) * &n + Rational::one())
        / (Rational::integer(2) * &denom);
    Ok(CurveValue::rational(slope * x + intercept))
}

/// `s` at `x`: as `r` up to `-1/8`, then `x + 3/8 - (√6/36)(1-4x)^{3/2}`
/// up to `1/4`, then linear through `(φ(S*_{2N}), ρ(S*_{2N}))`,
/// `(φ(O_N), ρ(O_N))`, `(φ(S*_{2N+2}), ρ(S*_{2N+2}))`.
pub fn s_of(x: &Rational) -> Result<CurveValue, DomainError> {
    check_domain(x)?;
    if *x <= q(-1, 8) {
        return Ok(first_branch(x));
    }
    if *x <= q(1, 4) {
        return Ok(CurveValue::with_term(x + q(3, 8), q(1, 216), true, Rational::one() - Rational::integer(4) * x));
    }
    if *x == Rational::one() {
        return Ok(CurveValue::rational(Rational::one()));
    }
    let n = knot_index(x);
    let star = |m: usize| (knot_x(m), Rational::one() - q(3, 2) / Rational::from(m).square());
    let (x0, y0) = star(n);
    let (x1, y1) = star(n + 1);
    let o = o_star_closed_form(n);
    let ((xa, ya), (xb, yb)) = if *x <= o.phi { ((x0, y0), (o.phi, o.rho)) } else { ((o.phi, o.rho), (x1, y1)) };
    Ok(CurveValue::rational(&ya + (&yb - &ya) * (x - &xa) / (&xb - &xa)))
}

/// Full verdict for a point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegionReport {
    pub point: RegionPoint,
    pub upper: Verdict,
    pub lower: Verdict,
    /// `ρ - r(φ)` when `r(φ)` is rational.
    pub r_gap: Option<Rational>,
    /// `s(φ) - ρ` when `s(φ)` is rational.
    pub s_gap: Option<Rational>,
}

impl RegionReport {
    pub fn inside(&self) -> bool {
        self.upper.holds() && self.lower.holds()
    }
}

pub fn region_verdict(pt: &RegionPoint) -> RegionReport {
    let r = r_of(&pt.phi).expect("valid point").exact();
    let s = s_of(&pt.phi).expect("valid point").exact();
    RegionReport {
        point: pt.clone(),
        upper: check_upper(pt),
        lower: check_lower(pt),
        r_gap: r.map(|r| &pt.rho - r),
        s_gap: s.map(|s| s - &pt.rho),
    }
}

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Curve {
    Lower,
    Upper,
    R,
    S,
}

impl Curve {
    pub const ALL: [Curve; 4] = [Curve::Lower, Curve::Upper, Curve::R, Curve::S];

    pub fn name(self) -> &'static str {
        match self {
            Curve::Lower => "lower",
            Curve::Upper => "upper",
            Curve::R => "r",
            Curve::S => "s",
        }
    }

    pub fn value(self, x: &Rational) -> Result<CurveValue, DomainError> {
        match self {
            Curve::Lower => lower_curve(x),
            Curve::Upper => upper_curve(x),
            Curve::R => r_of(x),
            Curve::S => s_of(x),
        }
    }
}

impl fmt::Display for Curve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown curve {0:?}; expected lower, upper, r or s")]
pub struct UnknownCurve(pub String);

impl FromStr for Curve {
    type Err = UnknownCurve;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Curve::ALL.into_iter().find(|c| c.name() == s).ok_or_else(|| UnknownCurve(s.into()))
    }
}

/// Double-precision rendering of curve points.
pub const PRECISION_NOTE: &str =
    "x exact on a rational grid then rounded; y from exact or squared-form value, absolute error < 1e-15";

#[derive(Debug, Clone, PartialEq)]
pub struct CurveSample {
    pub curve: Curve,
    pub x: f64,
    pub y: f64,
    pub precision: &'static str,
}

/// `samples` points `x = -1/2 + (3/2) i / (samples - 1)`, endpoints
/// included (at least two).
pub fn sample_curve(curve: Curve, samples: usize) -> Vec<CurveSample> {
    let m = samples.max(2) as i64 - 1;
    (0..=m)
        .map(|i| {
            let x = q(-1, 2) + q(3 * i, 2 * m);
            let y = curve.value(&x).expect("grid lies in the domain").approx();
            CurveSample { curve, x: x.to_f64(), y, precision: PRECISION_NOTE }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::o_star;
    use crate::shuffles::{shuffle_phi, shuffle_rho, star_shuffle};

    fn pt(phi: Rational, rho: Rational) -> RegionPoint {
        RegionPoint::new(phi, rho, "t").unwrap()
    }

    #[test]
    fn point_validation() {
        assert!(RegionPoint::new(q(-3, 4), q(0, 1), "").is_err());
        assert!(RegionPoint::new(q(0, 1), q(-5, 4), "").is_err());
        assert!(RegionPoint::new(q(1, 1), q(1, 1), "").is_ok());
    }

    #[test]
    fn upper_examples() {
        assert_eq!(check_upper(&pt(q(1, 2), q(5, 6))), Verdict::Equality);
        assert_eq!(check_upper(&pt(q(1, 1), q(1, 1))), Verdict::Equality);
        assert_eq!(check_upper(&pt(q(1, 2), q(9, 10))), Verdict::Violated);
        assert_eq!(check_upper(&pt(q(0, 1), q(0, 1))), Verdict::Strict);
    }

    #[test]
    fn lower_examples() {
        assert_eq!(check_lower(&pt(q(-1, 2), q(-1, 1))), Verdict::Equality);
        assert_eq!(check_lower(&pt(q(-1, 8), q(-3, 4))), Verdict::Equality);
        assert_eq!(check_lower(&pt(q(0, 1), q(-9, 10))), Verdict::Violated);
        assert_eq!(check_lower(&pt(q(0, 1), q(0, 1))), Verdict::Strict);
        // bound at φ = 0 is 2√3/9 - 1
        let b = 2.0 * 3f64.sqrt() / 9.0 - 1.0;
        assert!((lower_curve(&q(0, 1)).unwrap().approx() - b).abs() < 1e-15);
        assert!((b + 0.6151).abs() < 1e-4);
    }

    #[test]
    fn star_shuffles_on_upper_bound() {
        for n in 1..=50usize {
            let s = star_shuffle(2 * n).unwrap();
            let phi = shuffle_phi(s.permutation());
            let rho = shuffle_rho(s.permutation());
            let x = Rational::from(n);
            assert_eq!(phi, Rational::one() - q(3, 2) / &x);
            assert_eq!(rho, Rational::one() - q(3, 2) / x.square());
            assert_eq!(check_upper(&pt(phi, rho)), Verdict::Equality);
        }
    }

    #[test]
    fn r_examples() {
        assert_eq!(r_of(&q(-1, 2)).unwrap().exact(), Some(q(-1, 2)));
        assert_eq!(r_of(&q(1, 4)).unwrap().exact(), Some(q(5, 8)));
        assert_eq!(r_of(&q(1, 3)).unwrap().exact(), Some(q(25, 36)));
        assert_eq!(r_of(&q(1, 1)).unwrap().exact(), Some(q(1, 1)));
        assert_eq!(r_of(&q(-1, 8)).unwrap().exact(), Some(q(1, 8)));
        assert!(r_of(&q(-1, 4)).unwrap().exact().is_none());
        assert!(r_of(&q(3, 2)).is_err());
    }

    #[test]
    fn s_examples() {
        assert_eq!(s_of(&q(-1, 8)).unwrap().exact(), Some(q(1, 8)));
        assert_eq!(s_of(&q(1, 4)).unwrap().exact(), Some(q(5, 8)));
        assert_eq!(s_of(&q(1, 3)).unwrap().exact(), Some(q(151, 216)));
        assert_eq!(s_of(&q(1, 1)).unwrap().exact(), Some(q(1, 1)));
        assert!(s_of(&q(-2, 3)).is_err());
    }

    #[test]
    fn region_examples() {
        let rep = region_verdict(&pt(q(1, 3), q(151, 216)));
        assert!(rep.inside());
        assert_eq!(rep.r_gap, Some(q(1, 216)));
        assert_eq!(rep.s_gap, Some(q(0, 1)));
        let rep = region_verdict(&pt(q(1, 1), q(1, 1)));
        assert_eq!((rep.upper, rep.lower), (Verdict::Equality, Verdict::Equality));
        let rep = region_verdict(&pt(q(0, 1), q(0, 1)));
        assert_eq!((rep.upper, rep.lower), (Verdict::Strict, Verdict::Strict));
    }

    #[test]
    fn knots_are_continuous() {
        for n in 2..=30usize {
            let x = knot_x(n);
            let left = r_of(&x).unwrap();
            let eps = q(1, 1_000_000_000);
            // right branch evaluated at the knot via its own formula
            let right_n = Rational::from(n);
            let denom = right_n.square() + &right_n;
            let right = (Rational::integer(2) * &right_n + Rational::one()) / &denom * &x
                + (Rational::integer(2) * right_n.square() - Rational::integer(2) * &right_n + Rational::one())
                    / (Rational::integer(2) * &denom);
            assert_eq!(left.exact(), Some(right));
            assert_eq!(r_of(&x).unwrap().cmp_value(&s_of(&x).unwrap()), Ordering::Equal);
            assert_eq!(knot_index(&(&x + &eps)), n);
        }
        let k = q(-1, 8);
        assert_eq!(first_branch(&k).exact(), Some(q(1, 8)));
    }

    #[test]
    fn curve_order_on_grid() {
        let m = 10_000i64;
        for i in 0..=m {
            let x = q(-1, 2) + q(3 * i, 2 * m);
            let lo = lower_curve(&x).unwrap();
            let r = r_of(&x).unwrap();
            let s = s_of(&x).unwrap();
            let up = upper_curve(&x).unwrap();
            let touch = if i == m { Ordering::Equal } else { Ordering::Less };
            assert_eq!(lo.cmp_value(&r), touch, "{x}");
            let knot = x == Rational::one() || (q(3, 2) / (Rational::one() - &x)).is_integer();
            let r_s = if knot || x <= q(-1, 8) { Ordering::Equal } else { Ordering::Less };
            assert_eq!(r.cmp_value(&s), r_s, "{x}");
            let s_up = if knot { Ordering::Equal } else { Ordering::Less };
            assert_eq!(s.cmp_value(&up), s_up, "{x}");
        }
    }

    #[test]
    fn o_star_points_sit_on_s() {
        for n in 2..=10 {
            let o = o_star(n).unwrap();
            assert_eq!(s_of(&o.stats.phi).unwrap().exact(), Some(o.stats.rho.clone()));
        }
    }

    #[test]
    fn curve_names_round_trip() {
        for c in Curve::ALL {
            assert_eq!(c.name().parse::<Curve>().unwrap(), c);
        }
        assert!("v".parse::<Curve>().is_err());
        let ys: Vec<f64> = sample_curve(Curve::Upper, 3).iter().map(|c| c.y).collect();
        assert_eq!(ys, alloc::vec![-0.5, 0.625, 1.0]);
    }
}
