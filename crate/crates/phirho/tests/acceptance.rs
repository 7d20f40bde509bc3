//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::time::Instant;

use phirho::verify::{approximation_targets, check_approximation};
use phirho_core::bounds::{check_lower, check_upper, r_of, s_of, upper_curve, RegionPoint, Verdict};
use phirho_core::diagonals::{diagonal_to_shuffle, ed_cdf, enumerate_02, shuffle_to_diagonal, Diagonal02};
use phirho_core::exactnum::{greedy_blocks, step_rearrange_check, StepFunction};
use phirho_core::families::{c_alpha, c_alpha_stats, delta_down, delta_up, o_star, Stats};
use phirho_core::rearrange::{hat_class_check, m_value, p_vector, rearrange_outcome, rearrangement_steps, HatClass};
use phirho_core::segmeasures::{phi_numeric, rho_numeric, GridOracleConfig, SegmentMap};
use phirho_core::shuffles::{
    enumerate_involutions, equality_condition, shuffle_phi, shuffle_rho, star_shuffle, Involution, Permutation,
};
use phirho_core::{q, Rational};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn point(p: &Permutation) -> RegionPoint {
    RegionPoint::new(shuffle_phi(p), shuffle_rho(p), "").expect("shuffle statistics lie in range")
}

fn is_identity(p: &Involution) -> bool {
    p.values().iter().enumerate().all(|(i, &v)| v == i + 1)
}

fn all_involutions() -> Vec<Involution> {
    (2..=8).flat_map(enumerate_involutions).collect()
}

fn exhaustive_bounds() -> Outcome {
    let expected = [2usize, 4, 10, 26, 76, 232, 764];
    let mut total = 0;
    for (n, &count) in (2..=8).zip(&expected) {
        let invs: Vec<Involution> = enumerate_involutions(n).collect();
        ensure(invs.len() == count, || format!("N = {n}: {} involutions, expected {count}", invs.len()))?;
        if let Some(p) = invs.par_iter().find_first(|p| {
            let pt = point(p.permutation());
            !(check_upper(&pt).holds() && check_lower(&pt).holds())
        }) {
            return Err(format!("N = {n}: {:?} violates a bound", p.values()));
        }
        total += invs.len();
    }
    Ok(format!("{total} involutions, both bounds exact"))
}

fn equality_characterization() -> Outcome {
    let invs = all_involutions();
    let mut attains = BTreeSet::new();
    let mut condition = BTreeSet::new();
    for p in invs.iter().filter(|p| !is_identity(p)) {
        if check_upper(&point(p.permutation())) == Verdict::Equality {
            attains.insert(p.values().to_vec());
        }
        if equality_condition(p) {
            condition.insert(p.values().to_vec());
        }
    }
    if let Some(x) = attains.symmetric_difference(&condition).next() {
        return Err(format!("sets differ at {x:?}"));
    }
    // the identity attains equality trivially (no swaps)
    for n in 2..=8 {
        ensure(check_upper(&point(&Permutation::identity(n))) == Verdict::Equality, || format!("identity N = {n}"))?;
    }
    Ok(format!("{} non-identity equality cases on both sides", attains.len()))
}

fn rearrangement() -> Outcome {
    let invs = all_involutions();
    let bad = invs.par_iter().find_map_first(|p| {
        let check = || -> Result<(), String> {
            let o = rearrange_outcome(p).map_err(|e| e.to_string())?;
            ensure(shuffle_phi(o.output.permutation()) == o.phi, || "phi changed".into())?;
            ensure(o.rho_after <= o.rho_before, || "rho increased".into())?;
            let moved = p_vector(p).delta > 0;
            ensure(!moved || hat_class_check(&o.output) != HatClass::None, || "not in a canonical class".into())?;
            let m = m_value(p.n(), &p_vector(p)).map_err(|e| e.to_string())?;
            ensure(m.sign != Ordering::Less, || format!("m = {}", m.approx))
        };
        check().err().map(|e| format!("{:?}: {e}", p.values()))
    });
    if let Some(e) = bad {
        return Err(e);
    }
    let ex = rearrange_outcome(&Involution::from_slice(&[4, 7, 8, 1, 6, 5, 2, 3])).map_err(|e| e.to_string())?;
    ensure(ex.output.values() == [8, 7, 3, 6, 5, 4, 2, 1], || format!("N = 8 anchor gives {:?}", ex.output.values()))?;
    ensure(ex.phi == q(-5, 16), || format!("N = 8 anchor phi {}", ex.phi))?;
    ensure(ex.rho_before == q(-13, 32) && ex.rho_after == q(-53, 64), || {
        format!("N = 8 anchor rho {} -> {}", ex.rho_before, ex.rho_after)
    })?;
    let big = Involution::from_slice(&[15, 16, 3, 14, 11, 12, 7, 8, 9, 10, 5, 6, 13, 4, 1, 2]);
    let out = rearrange_outcome(&big).map_err(|e| e.to_string())?;
    let expected = [16, 15, 14, 13, 5, 6, 7, 8, 9, 12, 11, 10, 4, 3, 2, 1];
    ensure(out.output.values() == expected, || format!("N = 16 anchor gives {:?}", out.output.values()))?;
    Ok(format!("{} transforms, both anchors reproduced", invs.len()))
}

fn oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4_2000);
    let shuffles: Vec<Permutation> = (4..=12)
        .flat_map(|n| {
            (0..50)
                .map(|_| {
                    let mut v: Vec<usize> = (1..=n).collect();
                    v.shuffle(&mut rng);
                    Permutation::from_slice(&v)
                })
                .collect::<Vec<_>>()
        })
        .collect();
    let cfg = GridOracleConfig::new(2000);
    let worst = shuffles
        .par_iter()
        .map(|p| {
            let f = SegmentMap::from_permutation(p).to_float();
            let phi = phi_numeric(|u, v| f.cdf(u, v), cfg);
            let rho = rho_numeric(|u, v| f.cdf(u, v), cfg);
            let ok = phi.brackets(&shuffle_phi(p)) && rho.brackets(&shuffle_rho(p));
            let err = (phi.value - shuffle_phi(p).to_f64()).abs().max((rho.value - shuffle_rho(p).to_f64()).abs());
            (ok, err, p.values().to_vec())
        })
        .collect::<Vec<_>>();
    if let Some((_, _, p)) = worst.iter().find(|w| !w.0) {
        return Err(format!("{p:?} outside 3/n or 24/n"));
    }
    let max_err = worst.iter().map(|w| w.1).fold(0.0, f64::max);
    Ok(format!("{} shuffles at n = 2000, max error {max_err:.2e}", shuffles.len()))
}

fn diagonal_approximation() -> Outcome {
    let targets = approximation_targets();
    for &(name, big_n) in &targets {
        check_approximation(name, big_n)?;
    }
    Ok(format!("{} (diagonal, N) pairs", targets.len()))
}

fn diagonal_round_trip() -> Outcome {
    let mut count = 0;
    for n in [2, 4, 6, 8] {
        for d in enumerate_02(n) {
            let p = diagonal_to_shuffle(&d);
            let back = shuffle_to_diagonal(&p).map_err(|e| format!("{}: {e}", d.pattern()))?;
            ensure(back == d, || format!("{}: diagonal round trip", d.pattern()))?;
            ensure(diagonal_to_shuffle(&back) == p, || format!("{}: shuffle round trip", d.pattern()))?;
            let map = SegmentMap::from_permutation(p.permutation());
            let delta = d.to_diagonal();
            let ni = n as i64;
            for i in 0..=ni {
                for j in 0..=ni {
                    let (u, v) = (q(i, ni), q(j, ni));
                    ensure(map.cdf(&u, &v).unwrap() == ed_cdf(&delta, &u, &v).unwrap(), || {
                        format!("{}: cdf differs at ({u}, {v})", d.pattern())
                    })?;
                }
            }
            count += 1;
        }
    }
    let fig = Diagonal02::from_pattern(12, "002022020022").map_err(|e| e.to_string())?;
    let p = diagonal_to_shuffle(&fig);
    ensure(p.values() == [3, 5, 1, 6, 2, 4, 8, 7, 11, 12, 9, 10], || {
        format!("twelve-cell instance gives {:?}", p.values())
    })?;
    Ok(format!("{count} slope patterns, twelve-cell instance reproduced"))
}

fn families() -> Outcome {
    let integrate = |m: &SegmentMap| Stats::new(m.phi_exact(), m.rho_exact());
    for i in 0..=24 {
        let a = q(i, 48);
        let c = c_alpha(&a).map_err(|e| e.to_string())?;
        ensure(integrate(&c.map) == c_alpha_stats(&a), || format!("c_alpha({a})"))?;
        let pt = RegionPoint::new(c.stats.phi.clone(), c.stats.rho.clone(), "").map_err(|e| e.to_string())?;
        ensure(check_lower(&pt) == Verdict::Equality, || format!("c_alpha({a}) off the lower bound"))?;
    }
    for i in 0..=16 {
        let a = q(16 + i, 64);
        let d = delta_up(&a).map_err(|e| e.to_string())?;
        let map = phirho_core::diagonals::support_map(&d.diagonal);
        ensure(integrate(&map) == d.stats, || format!("delta_up({a})"))?;
    }
    for i in 0..=16 {
        let b = q(i, 64);
        let d = delta_down(&b).map_err(|e| e.to_string())?;
        // piecewise integration over the hand-assembled support
        let expected = Stats::new(
            q(-6, 1) * b.square() + q(3, 1) * &b - q(1, 8),
            q(8, 1) * b.cube() - q(12, 1) * b.square() + q(9, 2) * &b + q(1, 8),
        );
        ensure(integrate(&d.support) == expected, || format!("delta_down({b}): {:?}", integrate(&d.support)))?;
        ensure(d.stats == expected, || format!("delta_down({b}) closed form"))?;
    }
    let star = |n| {
        let p = star_shuffle(n).unwrap();
        Stats::new(shuffle_phi(p.permutation()), shuffle_rho(p.permutation()))
    };
    let start = delta_up(&q(1, 2)).unwrap().stats;
    let middle = delta_down(&q(0, 1)).unwrap().stats;
    let end = delta_down(&q(1, 4)).unwrap().stats;
    ensure(start == star(2), || format!("chain start {start:?}"))?;
    ensure(middle == delta_up(&q(1, 4)).unwrap().stats, || format!("chain middle {middle:?}"))?;
    ensure(end == star(4), || format!("chain end {end:?}"))?;
    Ok("25 + 17 + 17 parameters, chain endpoints exact".into())
}

fn ordinal_gap() -> Outcome {
    for n in 2..=20usize {
        let o = o_star(n).map_err(|e| e.to_string())?;
        let ni = n as i64;
        let expected = q(1, 2 * ni * ni * (ni + 1).pow(3));
        ensure(o.gap == expected, || format!("N = {n}: gap {}, expected {expected}", o.gap))?;
    }
    let o = o_star(2).unwrap();
    ensure(o.stats.phi == q(1, 3) && o.stats.rho == q(151, 216) && o.gap == q(1, 216), || {
        format!("N = 2: ({}, {}, {})", o.stats.phi, o.stats.rho, o.gap)
    })?;
    Ok("N = 2..20".into())
}

fn is_knot(x: &Rational) -> bool {
    let one = Rational::one();
    *x == one || (x < &one && (q(3, 2) / (&one - x)).is_integer())
}

fn s_dominates_r() -> Outcome {
    // 1000 interior points of (-1/8, 1), plus the knots
    let xs: Vec<Rational> = (1..=1000).map(|i| q(-1, 8) + q(9 * i, 8 * 1001)).collect();
    let mut sampled = 0;
    for x in xs.iter().filter(|x| !is_knot(x)) {
        let (r, s) = (r_of(x).unwrap(), s_of(x).unwrap());
        ensure(s.cmp_value(&r) == Ordering::Greater, || format!("x = {x}: s {} vs r {}", s.approx(), r.approx()))?;
        ensure(s.cmp_value(&upper_curve(x).unwrap()) != Ordering::Greater, || format!("x = {x}: s above upper"))?;
        sampled += 1;
    }
    for x in (0..=3000).map(|i| q(-1, 2) + q(i, 2000)) {
        ensure(s_of(&x).unwrap().cmp_value(&upper_curve(&x).unwrap()) != Ordering::Greater, || {
            format!("x = {x}: s above upper")
        })?;
    }
    Ok(format!("{sampled} off-knot samples, s <= upper on 3001 grid points"))
}

fn random_step_pair(rng: &mut ChaCha8Rng) -> (StepFunction, StepFunction) {
    let mut g = Vec::new();
    for _ in 0..rng.gen_range(1..=4) {
        let pos: Vec<i64> = (0..rng.gen_range(1..=3)).map(|_| rng.gen_range(0..6)).collect();
        let total: i64 = pos.iter().sum();
        let neg_len = rng.gen_range(1..=3i64);
        g.extend(pos.iter().map(|&x| q(x, 1)));
        for i in 0..neg_len {
            g.push(q(-(total / neg_len + i64::from(i < total % neg_len)), 1));
        }
    }
    let mut f: Vec<i64> = (0..g.len()).map(|_| rng.gen_range(0..10)).collect();
    f.sort_unstable();
    let den = rng.gen_range(1..=8);
    (StepFunction::new(f.into_iter().map(|x| q(x, den)).collect()), StepFunction::new(g))
}

fn rearrangement_inequality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10_000);
    for i in 0..10_000 {
        let (f, g) = random_step_pair(&mut rng);
        ensure(greedy_blocks(&g).is_some() && g.integral().is_zero(), || format!("pair {i}: bad generator"))?;
        let report = step_rearrange_check(&f, &g).map_err(|e| format!("pair {i}: {e}"))?;
        ensure(report.holds && report.diff_norm_sq >= &report.f_norm_sq + &report.g_norm_sq, || {
            format!("pair {i}: {:?} {:?}", f.values(), g.values())
        })?;
    }
    let eighth = |v: &[i64]| -> Vec<Rational> { v.iter().map(|&x| q(x, 16)).collect() };
    let s8 = rearrangement_steps(&Involution::from_slice(&[4, 7, 8, 1, 6, 5, 2, 3])).unwrap().unwrap();
    ensure(s8.f.values() == eighth(&[1, 3, 5, 5]) && s8.g.values() == eighth(&[1, 1, 0, -2]), || {
        format!("N = 8 instance: f {:?}, g {:?}", s8.f.values(), s8.g.values())
    })?;
    ensure(step_rearrange_check(&s8.f, &s8.g).unwrap().holds, || "N = 8 instance fails".into())?;
    let big = Involution::from_slice(&[15, 16, 3, 14, 11, 12, 7, 8, 9, 10, 5, 6, 13, 4, 1, 2]);
    let s16 = rearrangement_steps(&big).unwrap().unwrap();
    let g16: Vec<Rational> = [4, -3, -1, 1, -1].iter().map(|&x| q(5 * x, 256)).collect();
    ensure(s16.g.values() == g16, || format!("N = 16 instance: g {:?}", s16.g.values()))?;
    let r16 = step_rearrange_check(&s16.f, &s16.g).unwrap();
    ensure(r16.holds && r16.blocks == Some(vec![(0, 3), (3, 5)]), || format!("N = 16 blocks {:?}", r16.blocks))?;
    Ok("10000 random pairs, both worked instances reproduced".into())
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("exhaustive bounds, N = 2..8", exhaustive_bounds),
        ("upper-bound equality characterization", equality_characterization),
        ("rearrangement onto canonical classes", rearrangement),
        ("grid oracle equivalence", oracle_equivalence),
        ("slope 0/2 diagonal approximation", diagonal_approximation),
        ("diagonal / shuffle round trip", diagonal_round_trip),
        ("family closed forms", families),
        ("ordinal sum gap", ordinal_gap),
        ("s dominates r", s_dominates_r),
        ("rearrangement inequality", rearrangement_inequality),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} {name}: PASS ({detail}; {secs:.1}s)", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} {name}: FAIL ({detail}; {secs:.1}s)", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
