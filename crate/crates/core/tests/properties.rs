use std::cmp::Ordering;

use phirho_core::bounds::{check_lower, check_upper, lower_curve, r_of, s_of, upper_curve, RegionPoint, Verdict};
use phirho_core::diagonals::{
    approximate_02, diagonal_to_shuffle, ed_cdf, enumerate_02, kernel_at, lies_below, shuffle_to_diagonal,
    sup_distance, support_map, Diagonal, Diagonal02,
};
use phirho_core::exactnum::{cmp_pow32, greedy_blocks, step_rearrange_check, surd_sign, SignedRoot, StepFunction};
use phirho_core::rearrange::{hat_class_check, m_sign_from_stats, m_value, p_vector, rearrange_hat, HatClass};
use phirho_core::segmeasures::SegmentMap;
use phirho_core::shuffles::{
    equality_condition, shuffle_phi, shuffle_rho, shuffle_rho_symmetric, Involution, Permutation,
};
use phirho_core::{q, Rational};
use proptest::prelude::*;

fn permutation(max_n: usize) -> impl Strategy<Value = Permutation> {
    (1..=max_n)
        .prop_flat_map(|n| Just((1..=n).collect::<Vec<usize>>()).prop_shuffle())
        .prop_map(|v| Permutation::from_slice(&v))
}

/// Pairs the first `2k` entries of a shuffled index list.
fn involution(max_n: usize) -> impl Strategy<Value = Involution> {
    (1..=max_n).prop_flat_map(|n| (Just((1..=n).collect::<Vec<usize>>()).prop_shuffle(), 0..=n / 2)).prop_map(
        |(v, k)| {
            let swaps: Vec<(usize, usize)> = (0..k).map(|i| (v[2 * i], v[2 * i + 1])).collect();
            Involution::from_swaps(v.len(), &swaps)
        },
    )
}

fn rational(lo: i64, hi: i64, den: i64) -> impl Strategy<Value = Rational> {
    (lo * den..=hi * den).prop_map(move |n| q(n, den))
}

fn diagonal02(max_half: usize) -> impl Strategy<Value = Diagonal02> {
    (1..=max_half).prop_flat_map(|h| {
        let all = enumerate_02(2 * h);
        (0..all.len()).prop_map(move |i| all[i].clone())
    })
}

/// Convex combinations of slope-0/2 diagonals are diagonals with irregular
/// breakpoints.
fn diagonal() -> impl Strategy<Value = Diagonal> {
    (diagonal02(4), diagonal02(3), 0i64..=6).prop_map(|(a, b, w)| {
        let (a, b) = (a.to_diagonal(), b.to_diagonal());
        let w = q(w, 6);
        let mut ts: Vec<Rational> = a.breakpoints().iter().chain(b.breakpoints()).cloned().collect();
        ts.sort();
        ts.dedup();
        let vs = ts.iter().map(|t| &w * a.eval(t) + (Rational::one() - &w) * b.eval(t)).collect();
        Diagonal::validate(ts, vs).unwrap()
    })
}

/// Non-negative non-decreasing `f` and a `g` made of consecutive blocks,
/// each a non-negative run then a non-positive run with zero sum.
fn step_pair() -> impl Strategy<Value = (StepFunction, StepFunction)> {
    prop::collection::vec((prop::collection::vec(0i64..6, 1..4), 1usize..4), 1..4)
        .prop_flat_map(|blocks| {
            let mut g = Vec::new();
            for (pos, neg_len) in blocks {
                let total: i64 = pos.iter().sum();
                g.extend(pos.iter().map(|&x| q(x, 1)));
                // spread -total over neg_len cells
                for i in 0..neg_len {
                    let share = total / neg_len as i64 + if (i as i64) < total % neg_len as i64 { 1 } else { 0 };
                    g.push(q(-share, 1));
                }
            }
            let cells = g.len();
            (Just(g), prop::collection::vec(0i64..10, cells))
        })
        .prop_map(|(g, mut f)| {
            f.sort_unstable();
            (StepFunction::new(f.into_iter().map(|x| q(x, 3)).collect()), StepFunction::new(g))
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn shuffle_formulas_match_segment_integration(p in permutation(9)) {
        let map = SegmentMap::from_permutation(&p);
        prop_assert_eq!(map.phi_exact(), shuffle_phi(&p));
        prop_assert_eq!(map.rho_exact(), shuffle_rho(&p));
    }

    #[test]
    fn symmetric_rho_agrees_with_general(p in involution(12)) {
        prop_assert_eq!(shuffle_rho_symmetric(&p), shuffle_rho(p.permutation()));
    }

    #[test]
    fn shuffles_satisfy_both_bounds(p in involution(14)) {
        let pt = RegionPoint::new(shuffle_phi(p.permutation()), shuffle_rho(p.permutation()), "").unwrap();
        prop_assert!(check_lower(&pt).holds());
        let up = check_upper(&pt);
        prop_assert!(up.holds());
        // the identity (no swaps) attains equality outside the characterization
        let trivial = p.values().iter().enumerate().all(|(i, &v)| v == i + 1);
        prop_assert_eq!(up == Verdict::Equality, trivial || equality_condition(&p));
    }

    #[test]
    fn rearrangement_keeps_phi_and_lowers_rho(p in involution(16)) {
        let hat = rearrange_hat(&p).unwrap();
        prop_assert_eq!(shuffle_phi(hat.permutation()), shuffle_phi(p.permutation()));
        prop_assert!(shuffle_rho(hat.permutation()) <= shuffle_rho(p.permutation()));
        if p_vector(&p).delta > 0 {
            prop_assert_ne!(hat_class_check(&hat), HatClass::None);
        }
        prop_assert_eq!(rearrange_hat(&hat).unwrap(), hat);
    }

    #[test]
    fn m_is_non_negative_and_consistent(p in involution(16)) {
        let n = p.n();
        let m = m_value(n, &p_vector(&p)).unwrap();
        prop_assert_ne!(m.sign, Ordering::Less);
        let phi = shuffle_phi(p.permutation());
        let rho = shuffle_rho(p.permutation());
        prop_assert_eq!(m.sign, m_sign_from_stats(&phi, &rho));
        // (1+ρ)/2 - ((1+2φ)/3)^{3/2}
        let alt = (1.0 + rho.to_f64()) / 2.0 - ((1.0 + 2.0 * phi.to_f64()) / 3.0).powf(1.5);
        prop_assert!((m.approx - alt).abs() < 1e-12);
    }

    #[test]
    fn shuffle_diagonal_round_trip(d in diagonal02(6)) {
        let p = diagonal_to_shuffle(&d);
        prop_assert_eq!(shuffle_to_diagonal(&p).unwrap(), d.clone());
        let map = SegmentMap::from_permutation(p.permutation());
        let dd = d.to_diagonal();
        let n = d.n() as i64;
        for i in 0..=n {
            let u = q(i, n);
            prop_assert_eq!(map.cdf(&u, &u).unwrap(), dd.eval(&u));
        }
    }

    #[test]
    fn support_map_disintegrates_diagonal_copula(d in diagonal()) {
        let map = support_map(&d);
        for i in 0..=8 {
            for j in 0..=8 {
                let (u, v) = (q(i, 8), q(j, 8));
                prop_assert_eq!(map.cdf(&u, &v).unwrap(), ed_cdf(&d, &u, &v).unwrap());
            }
        }
        prop_assert_eq!(map.phi_exact(), d.phi());
    }

    #[test]
    fn kernel_is_monotone(d in diagonal(), a in 1i64..97, b in 1i64..97) {
        let (s, t) = (q(a.min(b), 97), q(a.max(b), 97));
        if let (Ok(ks), Ok(kt)) = (kernel_at(&d, &s), kernel_at(&d, &t)) {
            prop_assert!(ks.lower <= kt.lower);
            prop_assert!(ks.upper <= kt.upper);
            prop_assert!(ks.lower <= s && s <= ks.upper);
        }
    }

    #[test]
    fn approximation_is_below_and_close(d in diagonal(), big_n in 1usize..24) {
        let a = approximate_02(&d, big_n).to_diagonal();
        prop_assert!(lies_below(&a, &d));
        prop_assert!(sup_distance(&a, &d) <= q(1, big_n as i64));
    }

    #[test]
    fn rearrangement_inequality((f, g) in step_pair()) {
        prop_assert!(greedy_blocks(&g).is_some());
        let report = step_rearrange_check(&f, &g).unwrap();
        prop_assert!(report.holds);
        prop_assert!(report.block_inners.iter().all(|x| !x.is_positive()));
    }

    #[test]
    fn cmp_pow32_agrees_with_floats(c in 0i64..50, x in 0i64..50, y in -20i64..50) {
        let (c_sq, x, y) = (q(c, 7), q(x, 5), q(y, 3));
        let lhs = c_sq.to_f64().sqrt() * x.to_f64().powf(1.5);
        let o = cmp_pow32(&c_sq, &x, &y);
        if (lhs - y.to_f64()).abs() > 1e-9 {
            prop_assert_eq!(o, lhs.partial_cmp(&y.to_f64()).unwrap());
        }
    }

    #[test]
    fn surd_sign_agrees_with_floats(r in -40i64..40, a in 0i64..30, b in 0i64..30, sa: bool, sb: bool) {
        let roots = [SignedRoot::new(sa, q(a, 3)), SignedRoot::new(sb, q(b, 2))];
        let v = q(r, 4).to_f64() + roots.iter().map(SignedRoot::approx).sum::<f64>();
        let o = surd_sign(&q(r, 4), &roots);
        if v.abs() > 1e-9 {
            prop_assert_eq!(o, v.partial_cmp(&0.0).unwrap());
        }
    }

    #[test]
    fn curves_are_ordered(x in rational(-1, 1, 720)) {
        prop_assume!(x >= q(-1, 2));
        let lo = lower_curve(&x).unwrap();
        let r = r_of(&x).unwrap();
        let s = s_of(&x).unwrap();
        let up = upper_curve(&x).unwrap();
        prop_assert_ne!(lo.cmp_value(&r), Ordering::Greater);
        prop_assert_ne!(r.cmp_value(&s), Ordering::Greater);
        prop_assert_ne!(s.cmp_value(&up), Ordering::Greater);
        let approx = [lo.approx(), r.approx(), s.approx(), up.approx()];
        prop_assert!(approx.windows(2).all(|w| w[0] <= w[1] + 1e-12));
    }

    #[test]
    fn rational_text_round_trip(n in -10_000i64..10_000, d in 1i64..10_000) {
        let x = q(n, d);
        prop_assert_eq!(x.to_string().parse::<Rational>().unwrap(), x);
    }
}
