//! Mass rearrangement of symmetric shuffles.
//!
//! For a symmetric shuffle with `k` swaps, the sorted displacements
//! `p = (p_1 <= ... <= p_k)` (scaled by `1/N`) determine both statistics:
//! `φ = 1 - (6/N) Σ p_i` and `ρ = 1 - (12/N) Σ p_i^2`. The objective
//! `m = 1 - (6/N) Σ p_i^2 - (1 - (4/N) Σ p_i)^{3/2}` equals
//! `(1 + ρ)/2 - ((1 + 2φ)/3)^{3/2}`, so the lower bound on `ρ` is `m >= 0`.
//!
//! [`rearrange_hat`] pushes the total displacement `Δ = N Σ p_i` into as few
//! outermost swaps as possible. `Δ` (and hence `φ`) is kept, while `Σ p_i^2`
//! can only grow, so `ρ` and `m` can only drop.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::exactnum::{cmp_pow32, Rational, StepFunction};
use crate::shuffles::{classify, shuffle_phi, shuffle_rho_symmetric, Involution};

/// Sorted displacement data of a symmetric shuffle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PVector {
    pub n: usize,
    pub k: usize,
    /// `(i - π(i)) / N` over `i` with `π(i) < i`, non-decreasing.
    pub p: Vec<Rational>,
    /// `N Σ p_i`.
    pub delta: usize,
    /// `i - π(i)` over the same indices, non-decreasing.
    pub displacements: Vec<usize>,
}

pub fn p_vector(pi: &Involution) -> PVector {
    let n = pi.n();
    let mut displacements: Vec<usize> = classify(pi.permutation()).minus.iter().map(|&i| i - pi.at(i)).collect();
    displacements.sort_unstable();
    let p = displacements.iter().map(|&d| Rational::new(d as i64, n as i64)).collect();
    PVector { n, k: displacements.len(), p, delta: displacements.iter().sum(), displacements }
}

/// `m` with its sign decided exactly and a float for reporting.
#[derive(Debug, Clone, PartialEq)]
pub struct MValue {
    pub sign: Ordering,
    pub approx: f64,
    /// `1 - (6/N) Σ p_i^2`.
    pub square_part: Rational,
    /// `1 - (4/N) Σ p_i`, the base of the 3/2 power.
    pub base: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MValueError {
    #[error("(4/N) Σ p_i = {load} exceeds 1")]
    Precondition { load: Rational },
    #[error("N must be positive")]
    ZeroN,
}

pub fn m_value(n: usize, pv: &PVector) -> Result<MValue, MValueError> {
    if n == 0 {
        return Err(MValueError::ZeroN);
    }
    let n_q = Rational::from(n);
    let sum: Rational = pv.p.iter().sum();
    let sum_sq: Rational = pv.p.iter().map(Rational::square).sum();
    let load = Rational::integer(4) * &sum / &n_q;
    if load > Rational::one() {
        return Err(MValueError::Precondition { load });
    }
    let base = Rational::one() - load;
    let square_part = Rational::one() - Rational::integer(6) * sum_sq / &n_q;
    let sign = cmp_pow32(&Rational::one(), &base, &square_part).reverse();
    let b = base.to_f64();
    let approx = square_part.to_f64() - b * libm::sqrt(b);
    Ok(MValue { sign, approx, square_part, base })
}

/// Sign of `(1 + ρ)/2 - ((1 + 2φ)/3)^{3/2}` from the statistics directly.
/// Requires `φ >= -1/2`, which holds for every copula.
pub fn m_sign_from_stats(phi: &Rational, rho: &Rational) -> Ordering {
    let two = Rational::integer(2);
    let x = (Rational::one() + &two * phi) / Rational::integer(3);
    let y = (Rational::one() + rho) / two;
    cmp_pow32(&Rational::one(), &x, &y).reverse()
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RearrangeError {
    /// Internal invariant breach; cannot happen for involutions.
    #[error("partner displacement {displacement} outside 1..={limit}")]
    PartnerOutOfRange { displacement: usize, limit: usize },
}

/// `Σ_{i <= j} (N - (2i - 1)) = jN - j^2`, the displacement of the `j`
/// outermost nested swaps.
fn nested_sum(n: usize, j: usize) -> usize {
    j * n - j * j
}

/// The canonical rearrangement `π̂` with the same `Δ`.
pub fn rearrange_hat(pi: &Involution) -> Result<Involution, RearrangeError> {
    let n = pi.n();
    let pv = p_vector(pi);
    let delta = pv.delta;
    if delta == 0 {
        return Ok(Involution::identity(n));
    }
    if delta < n - 1 {
        return Ok(Involution::from_swaps(n, &[(n, n - delta)]));
    }
    let ell = (1..=pv.k).take_while(|&j| nested_sum(n, j) <= delta).last().unwrap_or(0);
    let rest = delta - nested_sum(n, ell);
    let mut swaps: Vec<(usize, usize)> = (1..=ell).map(|i| (n - i + 1, i)).collect();
    if rest > 0 {
        let k_hat = ell + 1;
        let limit = n + 1 - 2 * k_hat;
        if rest > limit {
            return Err(RearrangeError::PartnerOutOfRange { displacement: rest, limit });
        }
        let top = n - k_hat + 1;
        swaps.push((top, top - rest));
    }
    Ok(Involution::from_swaps(n, &swaps))
}

/// Membership in the two canonical classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HatClass {
    /// A single swap involving `N`.
    Hat1,
    /// Nested outermost swaps `(N - i + 1, i)` for `i < k̂`, plus one swap at
    /// `N - k̂ + 1` with displacement in `1..=N - (2k̂ - 1)`.
    Hat2,
    None,
}

impl fmt::Display for HatClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            HatClass::Hat1 => "hat-1",
            HatClass::Hat2 => "hat-2",
            HatClass::None => "none",
        })
    }
}

pub fn hat_class_check(pi: &Involution) -> HatClass {
    let n = pi.n();
    let minus = classify(pi.permutation()).minus;
    let k = minus.len();
    if k == 1 && minus[0] == n {
        return HatClass::Hat1;
    }
    if k < 2 || 2 * k > n {
        return HatClass::None;
    }
    let top = n - k + 1;
    if minus.iter().copied().ne(top..=n) {
        return HatClass::None;
    }
    let d = top - pi.at(top);
    if d < 1 || d > n + 1 - 2 * k {
        return HatClass::None;
    }
    if (1..k).all(|i| pi.at(n - i + 1) == i) {
        HatClass::Hat2
    } else {
        HatClass::None
    }
}

/// The step functions comparing `π` with `π̂`: `f` takes the value
/// `(k/N) p_i` on cell `i` of `k`, `f̂` the same for `p̂` padded on the left
/// with zeros, and `g = f - f̂`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RearrangementSteps {
    pub f: StepFunction,
    pub f_hat: StepFunction,
    pub g: StepFunction,
}

/// `None` when `π` is the identity (nothing to rearrange).
pub fn rearrangement_steps(pi: &Involution) -> Result<Option<RearrangementSteps>, RearrangeError> {
    let pv = p_vector(pi);
    if pv.k == 0 {
        return Ok(None);
    }
    let hat = p_vector(&rearrange_hat(pi)?);
    let scale = Rational::new(pv.k as i64, pv.n as i64);
    let mut padded = vec![Rational::zero(); pv.k.saturating_sub(hat.k)];
    padded.extend(hat.p.iter().cloned());
    let f = StepFunction::scaled(&scale, &pv.p);
    let f_hat = StepFunction::scaled(&scale, &padded);
    let g = f.sub(&f_hat);
    Ok(Some(RearrangementSteps { f, f_hat, g }))
}

/// Before/after summary of one rearrangement.
#[derive(Debug, Clone, PartialEq)]
pub struct RearrangeOutcome {
    pub input: Involution,
    pub output: Involution,
    pub phi: Rational,
    pub rho_before: Rational,
    pub rho_after: Rational,
    pub m_sign: Ordering,
    pub class: HatClass,
}

pub fn rearrange_outcome(pi: &Involution) -> Result<RearrangeOutcome, RearrangeError> {
    let output = rearrange_hat(pi)?;
    let phi = shuffle_phi(pi.permutation());
    let rho_before = shuffle_rho_symmetric(pi);
    let rho_after = shuffle_rho_symmetric(&output);
    let m_sign = m_sign_from_stats(&phi, &rho_before);
    let class = hat_class_check(&output);
    Ok(RearrangeOutcome { input: pi.clone(), output, phi, rho_before, rho_after, m_sign, class })
}
