//! Invariant suites. Each check fans out over its cases with rayon and
//! reports the first counterexample in enumeration order.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use phirho_core::bounds::{
    check_lower, check_upper, lower_curve, r_of, s_of, sample_curve, upper_curve, Curve, RegionPoint, Verdict,
};
use phirho_core::diagonals::{
    approximate_02, diagonal_to_shuffle, ed_cdf, enumerate_02, lies_below, shuffle_to_diagonal, sup_distance, Diagonal,
};
use phirho_core::exactnum::step_rearrange_check;
use phirho_core::families::{c_alpha, c_alpha_stats, delta_down, delta_up, o_star, o_star_closed_form, Stats};
use phirho_core::rearrange::{
    hat_class_check, m_sign_from_stats, m_value, p_vector, rearrange_hat, rearrange_outcome, rearrangement_steps,
    HatClass,
};
use phirho_core::segmeasures::{phi_numeric, rho_numeric, GridOracleConfig, SegmentMap};
use phirho_core::shuffles::{
    enumerate_involutions, equality_condition, involution_count, shuffle_phi, shuffle_rho, star_shuffle, Involution,
    Permutation,
};
use phirho_core::{q, Rational};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::formats::permutation_label;
use crate::table::{read_curves, read_points, write_curves, write_points, CurveRow, PointRow};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Bounds,
    Rearrange,
    Roundtrip,
    Families,
    Boundary,
}

impl Suite {
    pub const ALL: [Suite; 5] = [Suite::Bounds, Suite::Rearrange, Suite::Roundtrip, Suite::Families, Suite::Boundary];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Bounds => "bounds",
            Suite::Rearrange => "rearrange",
            Suite::Roundtrip => "roundtrip",
            Suite::Families => "families",
            Suite::Boundary => "boundary",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown suite {0:?}; expected bounds, rearrange, roundtrip, families or boundary")]
pub struct UnknownSuite(pub String);

impl FromStr for Suite {
    type Err = UnknownSuite;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL.into_iter().find(|x| x.name() == s).ok_or_else(|| UnknownSuite(s.into()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyConfig {
    pub n_max: usize,
    /// Curve samples for `boundary`, random shuffles per size for the grid
    /// oracle in `families`.
    pub samples: usize,
    pub seed: u64,
    pub grid: u32,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { n_max: 8, samples: 1000, seed: 0x5eed, grid: 2000 }
    }
}

/// One line of the machine-readable report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckOutcome {
    pub suite: &'static str,
    pub check: &'static str,
    pub passed: bool,
    pub cases: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<String>,
}

impl CheckOutcome {
    pub fn json_line(&self) -> String {
        serde_json::to_string(self).expect("plain record")
    }
}

/// Runs `f` on every case; the first `Err` in case order is the
/// counterexample.
pub fn check<T, F>(suite: Suite, check: &'static str, cases: &[T], f: F) -> CheckOutcome
where
    T: Sync,
    F: Fn(&T) -> Result<(), String> + Sync,
{
    let counterexample = cases.par_iter().find_map_first(|c| f(c).err());
    CheckOutcome { suite: suite.name(), check, passed: counterexample.is_none(), cases: cases.len(), counterexample }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Every involution of size `2..=n_max`.
pub fn involutions_up_to(n_max: usize) -> Vec<Involution> {
    (2..=n_max).flat_map(enumerate_involutions).collect()
}

fn label(p: &Involution) -> String {
    permutation_label(p.permutation())
}

fn point_of(p: &Permutation) -> RegionPoint {
    RegionPoint::new(shuffle_phi(p), shuffle_rho(p), permutation_label(p)).expect("shuffle statistics lie in range")
}

pub fn run_suite(suite: Suite, config: &VerifyConfig) -> Vec<CheckOutcome> {
    match suite {
        Suite::Bounds => bounds_suite(config),
        Suite::Rearrange => rearrange_suite(config),
        Suite::Roundtrip => roundtrip_suite(config),
        Suite::Families => families_suite(config),
        Suite::Boundary => boundary_suite(config),
    }
}

fn bounds_suite(config: &VerifyConfig) -> Vec<CheckOutcome> {
    let s = Suite::Bounds;
    let invs = involutions_up_to(config.n_max);
    let sizes: Vec<usize> = (2..=config.n_max).collect();
    vec![
        check(s, "involution count", &sizes, |&n| {
            let got = enumerate_involutions(n).count() as u64;
            ensure(got == involution_count(n), || {
                format!("n = {n}: {got} involutions, expected {}", involution_count(n))
            })
        }),
        check(s, "upper bound", &invs, |p| {
            let pt = point_of(p.permutation());
            ensure(check_upper(&pt).holds(), || format!("{}: rho = {} above the upper bound", label(p), pt.rho()))
        }),
        check(s, "lower bound", &invs, |p| {
            let pt = point_of(p.permutation());
            ensure(check_lower(&pt).holds(), || format!("{}: rho = {} below the lower bound", label(p), pt.rho()))
        }),
        check(s, "upper equality characterization", &invs, |p| {
            let eq = check_upper(&point_of(p.permutation())) == Verdict::Equality;
            let identity = p.values().iter().enumerate().all(|(i, &v)| v == i + 1);
            let expected = identity || equality_condition(p);
            ensure(eq == expected, || format!("{}: equality {eq}, characterization {expected}", label(p)))
        }),
        check(s, "closed forms match integration", &invs, |p| {
            let map = SegmentMap::from_permutation(p.permutation());
            let (phi, rho) = (shuffle_phi(p.permutation()), shuffle_rho(p.permutation()));
            ensure(map.phi_exact() == phi && map.rho_exact() == rho, || {
                format!("{}: closed form ({phi}, {rho})", label(p))
            })
        }),
    ]
}

fn rearrange_suite(config: &VerifyConfig) -> Vec<CheckOutcome> {
    let s = Suite::Rearrange;
    let invs = involutions_up_to(config.n_max);
    vec![
        check(s, "phi preserved, rho not increased", &invs, |p| {
            let o = rearrange_outcome(p).map_err(|e| format!("{}: {e}", label(p)))?;
            ensure(shuffle_phi(o.output.permutation()) == o.phi, || format!("{}: phi changed", label(p)))?;
            ensure(o.rho_after <= o.rho_before, || format!("{}: rho {} -> {}", label(p), o.rho_before, o.rho_after))
        }),
        check(s, "lands in a canonical class", &invs, |p| {
            let hat = rearrange_hat(p).map_err(|e| format!("{}: {e}", label(p)))?;
            let trivial = p_vector(p).delta == 0;
            ensure(trivial || hat_class_check(&hat) != HatClass::None, || {
                format!("{} -> {}: no class", label(p), label(&hat))
            })?;
            ensure(rearrange_hat(&hat).as_ref() == Ok(&hat), || format!("{}: not idempotent", label(p)))
        }),
        check(s, "m non-negative", &invs, |p| {
            let m = m_value(p.n(), &p_vector(p)).map_err(|e| format!("{}: {e}", label(p)))?;
            let phi = shuffle_phi(p.permutation());
            let rho = shuffle_rho(p.permutation());
            ensure(m.sign != Ordering::Less, || format!("{}: m = {}", label(p), m.approx))?;
            ensure(m.sign == m_sign_from_stats(&phi, &rho), || {
                format!("{}: m sign disagrees with (phi, rho)", label(p))
            })
        }),
        check(s, "rearrangement inequality on the step functions", &invs, |p| {
            let Some(steps) = rearrangement_steps(p).map_err(|e| format!("{}: {e}", label(p)))? else {
                return Ok(());
            };
            let report = step_rearrange_check(&steps.f, &steps.g).map_err(|e| format!("{}: {e}", label(p)))?;
            ensure(report.holds, || format!("{}: ||f - g||^2 < ||f||^2 + ||g||^2", label(p)))
        }),
    ]
}

/// Cases for the diagonal approximation check.
pub fn approximation_targets() -> Vec<(&'static str, usize)> {
    let sizes = [2, 4, 8, 16, 32, 64];
    ["upper", "lower", "square"].into_iter().flat_map(|d| sizes.into_iter().map(move |n| (d, n))).collect()
}

pub fn check_approximation(name: &str, big_n: usize) -> Result<(), String> {
    let square = |t: &Rational| t.square();
    let approx = match name {
        "upper" => approximate_02(&Diagonal::identity(), big_n),
        "lower" => approximate_02(&Diagonal::lower_frechet(), big_n),
        _ => approximate_02(&square, big_n),
    };
    ensure(approx.n() == 2 * big_n, || format!("{name}, N = {big_n}: {} pieces", approx.n()))?;
    let d = approx.to_diagonal();
    let bound = q(1, big_n as i64);
    if name != "square" {
        let target = if name == "upper" { Diagonal::identity() } else { Diagonal::lower_frechet() };
        ensure(lies_below(&d, &target), || format!("{name}, N = {big_n}: approximation above the diagonal"))?;
        let dist = sup_distance(&d, &target);
        return ensure(dist <= bound, || format!("{name}, N = {big_n}: distance {dist}"));
    }
    // t² - ℓ(t) is convex on each piece: its minimum sits at the clamped
    // vertex b/2, its maximum at an endpoint.
    let (ts, vs) = (d.breakpoints(), d.values());
    for i in 0..d.piece_count() {
        let b = d.slope(i);
        let gap = |t: &Rational| t.square() - (&vs[i] + &b * (t - &ts[i]));
        let vertex = Rational::max_of(&ts[i], &Rational::min_of(&(&b / Rational::integer(2)), &ts[i + 1]));
        ensure(!gap(&vertex).is_negative(), || format!("square, N = {big_n}: above t² at {vertex}"))?;
        for t in [&ts[i], &ts[i + 1]] {
            ensure(gap(t) <= bound, || format!("square, N = {big_n}: distance {} at {t}", gap(t)))?;
        }
    }
    Ok(())
}

fn roundtrip_suite(config: &VerifyConfig) -> Vec<CheckOutcome> {
    let s = Suite::Roundtrip;
    let diagonals: Vec<_> = (1..=config.n_max / 2).flat_map(|h| enumerate_02(2 * h)).collect();
    let invs = involutions_up_to(config.n_max);
    vec![
        check(s, "diagonal -> shuffle -> diagonal", &diagonals, |d| {
            let p = diagonal_to_shuffle(d);
            ensure(shuffle_to_diagonal(&p).as_ref() == Ok(d), || {
                format!("{}: round trip via {}", d.pattern(), label(&p))
            })
        }),
        check(s, "shuffle cdf equals diagonal copula cdf", &diagonals, |d| {
            let p = diagonal_to_shuffle(d);
            let map = SegmentMap::from_permutation(p.permutation());
            let delta = d.to_diagonal();
            let n = d.n() as i64;
            for i in 0..=n {
                for j in 0..=n {
                    let (u, v) = (q(i, n), q(j, n));
                    let a = map.cdf(&u, &v).expect("grid in the unit square");
                    let b = ed_cdf(&delta, &u, &v).expect("grid in the unit square");
                    ensure(a == b, || format!("{} at ({u}, {v}): {a} vs {b}", d.pattern()))?;
                }
            }
            Ok(())
        }),
        check(s, "shuffle -> diagonal -> shuffle", &invs, |p| match shuffle_to_diagonal(p) {
            Ok(d) => ensure(diagonal_to_shuffle(&d) == *p, || format!("{}: round trip via {}", label(p), d.pattern())),
            Err(_) => Ok(()),
        }),
        check(s, "diagonal approximation", &approximation_targets(), |&(name, big_n)| check_approximation(name, big_n)),
        check(s, "points csv", &(2..=config.n_max).collect::<Vec<_>>(), |&n| {
            let rows: Vec<PointRow> =
                enumerate_involutions(n).map(|p| PointRow::from_point(&point_of(p.permutation()))).collect();
            let mut buf = Vec::new();
            write_points(&mut buf, &rows).map_err(|e| e.to_string())?;
            let back = read_points(&buf[..], "points").map_err(|e| e.to_string())?;
            ensure(back == rows, || format!("n = {n}: rows changed on re-reading"))?;
            for row in &back {
                let again = row.reverify("points").map_err(|e| e.to_string())?;
                ensure(&again == row, || format!("n = {n}: {} re-verified differently", row.label))?;
            }
            Ok(())
        }),
    ]
}

fn families_suite(config: &VerifyConfig) -> Vec<CheckOutcome> {
    let s = Suite::Families;
    let alphas: Vec<Rational> = (0..=32).map(|i| q(i, 64)).collect();
    let ups: Vec<Rational> = (0..=16).map(|i| q(16 + i, 64)).collect();
    let downs: Vec<Rational> = (0..=16).map(|i| q(i, 64)).collect();
    let stars: Vec<usize> = (2..=20).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let shuffles: Vec<Permutation> = (4..=config.n_max.max(4) + 4)
        .flat_map(|n| {
            (0..config.samples.min(50))
                .map(|_| {
                    let mut v: Vec<usize> = (1..=n).collect();
                    v.shuffle(&mut rng);
                    Permutation::from_slice(&v)
                })
                .collect::<Vec<_>>()
        })
        .collect();
    let grid = config.grid;
    vec![
        check(s, "c_alpha closed form and lower-bound equality", &alphas, |a| {
            let c = c_alpha(a).map_err(|e| e.to_string())?;
            let got = Stats::new(c.map.phi_exact(), c.map.rho_exact());
            ensure(got == c_alpha_stats(a), || format!("alpha = {a}: integration {got:?}"))?;
            let pt = RegionPoint::new(got.phi, got.rho, "").map_err(|e| e.to_string())?;
            ensure(check_lower(&pt) == Verdict::Equality, || format!("alpha = {a}: not on the lower bound"))
        }),
        check(s, "delta_up closed form", &ups, |a| {
            let d = delta_up(a).map_err(|e| e.to_string())?;
            let map = phirho_core::diagonals::support_map(&d.diagonal);
            let got = Stats::new(map.phi_exact(), map.rho_exact());
            ensure(got == d.stats, || format!("a = {a}: integration {got:?}, closed form {:?}", d.stats))
        }),
        check(s, "delta_down closed form", &downs, |b| {
            let d = delta_down(b).map_err(|e| e.to_string())?;
            let got = Stats::new(d.support.phi_exact(), d.support.rho_exact());
            ensure(got == d.stats, || format!("b = {b}: integration {got:?}, closed form {:?}", d.stats))
        }),
        check(s, "interpolation chain endpoints", &[()], |_| {
            let star = |n| {
                let p = star_shuffle(n).expect("even size");
                Stats::new(shuffle_phi(p.permutation()), shuffle_rho(p.permutation()))
            };
            let start = delta_up(&q(1, 2)).map_err(|e| e.to_string())?.stats;
            let middle_up = delta_up(&q(1, 4)).map_err(|e| e.to_string())?.stats;
            let middle_down = delta_down(&q(0, 1)).map_err(|e| e.to_string())?.stats;
            let end = delta_down(&q(1, 4)).map_err(|e| e.to_string())?.stats;
            ensure(start == star(2), || format!("start {start:?}"))?;
            ensure(middle_up == middle_down, || format!("middle {middle_up:?} vs {middle_down:?}"))?;
            ensure(end == star(4), || format!("end {end:?}"))
        }),
        check(s, "ordinal sum gap", &stars, |&n| {
            let o = o_star(n).map_err(|e| e.to_string())?;
            let ni = n as i64;
            let expected = q(1, 2 * ni * ni * (ni + 1).pow(3));
            ensure(o.stats == o_star_closed_form(n), || format!("N = {n}: closed form {:?}", o_star_closed_form(n)))?;
            ensure(o.gap == expected, || format!("N = {n}: gap {}, expected {expected}", o.gap))
        }),
        check(s, "grid oracle brackets exact values", &shuffles, |p| {
            let f = SegmentMap::from_permutation(p).to_float();
            let cfg = GridOracleConfig::new(grid);
            let (phi, rho) = (phi_numeric(|u, v| f.cdf(u, v), cfg), rho_numeric(|u, v| f.cdf(u, v), cfg));
            ensure(phi.brackets(&shuffle_phi(p)) && rho.brackets(&shuffle_rho(p)), || {
                format!("{}: grid ({}, {})", permutation_label(p), phi.value, rho.value)
            })
        }),
    ]
}

/// `x = 1 - 3/(2N)` or `x = 1`.
fn is_knot(x: &Rational) -> bool {
    let one = Rational::one();
    *x == one || (x < &one && (q(3, 2) / (&one - x)).is_integer())
}

fn boundary_suite(config: &VerifyConfig) -> Vec<CheckOutcome> {
    let s = Suite::Boundary;
    let m = config.samples.max(2) as i64;
    // x in (-1/8, 1) on a grid of m + 1 cells
    let xs: Vec<Rational> = (1..=m).map(|i| q(-1, 8) + q(9 * i, 8 * (m + 1))).collect();
    let (knots, generic): (Vec<_>, Vec<_>) = xs.into_iter().partition(is_knot);
    let all: Vec<Rational> = (0..=2 * m).map(|i| q(-1, 2) + q(3 * i, 4 * m)).collect();
    let knot_list: Vec<Rational> = (1..=40).map(|n| Rational::one() - q(3, 2 * n)).collect();
    vec![
        check(s, "s above r off the knots", &generic, |x| {
            let (r, sv) = (r_of(x).map_err(|e| e.to_string())?, s_of(x).map_err(|e| e.to_string())?);
            ensure(sv.cmp_value(&r) == Ordering::Greater, || {
                format!("x = {x}: s = {}, r = {}", sv.approx(), r.approx())
            })
        }),
        check(s, "s meets r at the knots", &knot_list.iter().chain(&knots).cloned().collect::<Vec<_>>(), |x| {
            let (r, sv) = (r_of(x).map_err(|e| e.to_string())?, s_of(x).map_err(|e| e.to_string())?);
            ensure(sv.cmp_value(&r) == Ordering::Equal, || format!("x = {x}: s = {}, r = {}", sv.approx(), r.approx()))
        }),
        check(s, "lower <= r <= s <= upper", &all, |x| {
            let vals = [lower_curve(x), r_of(x), s_of(x), upper_curve(x)];
            let vals: Vec<_> = vals.into_iter().collect::<Result<_, _>>().map_err(|e| e.to_string())?;
            ensure(vals.windows(2).all(|w| w[0].cmp_value(&w[1]) != Ordering::Greater), || {
                format!("x = {x}: {:?}", vals.iter().map(|v| v.approx()).collect::<Vec<_>>())
            })
        }),
        check(s, "curves csv", &Curve::ALL, |&c| {
            let rows: Vec<CurveRow> = sample_curve(c, config.samples).iter().map(CurveRow::from).collect();
            let mut buf = Vec::new();
            write_curves(&mut buf, &rows).map_err(|e| e.to_string())?;
            let back = read_curves(&buf[..], "curves").map_err(|e| e.to_string())?;
            ensure(back == rows, || format!("{c}: rows changed on re-reading"))
        }),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("everything".parse::<Suite>().is_err());
    }

    #[test]
    fn first_counterexample_in_order() {
        let cases: Vec<u32> = (0..1000).collect();
        let out = check(Suite::Bounds, "t", &cases, |&x| ensure(x % 7 != 3 || x < 100, || x.to_string()));
        assert!(!out.passed);
        assert_eq!(out.counterexample.as_deref(), Some("101"));
        let line = out.json_line();
        assert!(line.contains("\"passed\":false") && line.contains("\"counterexample\":\"101\""), "{line}");
    }

    #[test]
    fn knots() {
        assert!(is_knot(&q(1, 4)));
        assert!(is_knot(&q(1, 2)));
        assert!(is_knot(&q(1, 1)));
        assert!(!is_knot(&q(1, 3)));
    }

    #[test]
    fn small_suites_pass() {
        let config = VerifyConfig { n_max: 5, samples: 40, seed: 1, grid: 200 };
        for s in Suite::ALL {
            for out in run_suite(s, &config) {
                assert!(out.passed, "{}", out.json_line());
                assert!(out.cases > 0, "{}", out.json_line());
            }
        }
    }
}
