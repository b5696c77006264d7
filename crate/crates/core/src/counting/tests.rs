use proptest::prelude::*;

use super::*;
use crate::sympoly::{eval_elem_sym, SymPolyQuery};

fn e(ell: usize, coords: &[u128]) -> u128 {
    eval_elem_sym(&SymPolyQuery::new(ell, coords.to_vec()).unwrap()).unwrap()
}

/// Every point of `[1, side]^r`, in lexicographic order.
fn box_points(r: usize, side: u128) -> Vec<Vec<u128>> {
    let mut out = vec![vec![]];
    for _ in 0..r {
        out = out
            .into_iter()
            .flat_map(|p| {
                (1..=side).map(move |v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }
    out
}

/// Brute force over the box `[1, n]^r`, which contains the region.
fn brute(ell: u32, r: u32, n: u64, keep: impl Fn(&[u128]) -> bool) -> u128 {
    let side = n as u128;
    box_points(r as usize, side)
        .iter()
        .filter(|p| e(ell as usize, p) <= side && keep(p))
        .count() as u128
}

fn region(ell: u32, r: u32, n: u64) -> RegionSpec {
    RegionSpec::new(ell, r, n).unwrap()
}

fn serial() -> Counter {
    Counter::new(CountOptions {
        parallel: false,
        ..CountOptions::default()
    })
}

#[test]
fn region_validation() {
    assert!(RegionSpec::new(0, 2, 5).is_err());
    assert!(RegionSpec::new(3, 2, 5).is_err());
    assert!(RegionSpec::new(1, 0, 5).is_err());
    let h = region(2, 3, 2);
    assert_eq!(h.min_n(), 3);
    assert!(!h.is_nonempty());
    assert!(h.require_nonempty().is_err());
    assert!(region(2, 3, 3).is_nonempty());
    assert_eq!(h.to_string(), "H_{2,3}(2)");
}

#[test]
fn matches_brute_force() {
    let cases: &[(u32, u32, &[u64])] = &[
        (1, 1, &[0, 1, 7]),
        (1, 2, &[1, 2, 30]),
        (2, 2, &[1, 4, 50, 120]),
        (1, 3, &[3, 20]),
        (2, 3, &[2, 3, 4, 17, 60]),
        (3, 3, &[1, 30, 60]),
        (2, 4, &[6, 7, 25]),
        (3, 4, &[4, 30]),
        (4, 4, &[1, 24]),
    ];
    for &(ell, r, ns) in cases {
        for &n in ns {
            let h = region(ell, r, n);
            let want = brute(ell, r, n, |_| true);
            assert_eq!(count(&h).unwrap().value(), want, "{h}");
            assert_eq!(serial().count(&h).unwrap().value(), want, "{h} serial");
        }
    }
}

#[test]
fn empty_below_minimum() {
    for (ell, r) in [(1u32, 3u32), (2, 3), (2, 4), (3, 4), (3, 5)] {
        let min = min_value(ell, r).unwrap() as u64;
        assert_eq!(count(&region(ell, r, min - 1)).unwrap().value(), 0);
        assert_eq!(count(&region(ell, r, min)).unwrap().value(), 1);
    }
}

#[test]
fn order_one_is_binomial() {
    for r in 1..=6u32 {
        for n in [r as u64, 10, 40] {
            let want = binomial(n as u128, r as u128).unwrap();
            assert_eq!(count(&region(1, r, n)).unwrap().value(), want);
            let via_dfs =
                Problem::new(unit_start(1), 0, vec![1; r as usize], n as u128, None, None).unwrap();
            assert_eq!(
                engine::count(&via_dfs, &CountOptions::default()).unwrap(),
                want
            );
        }
    }
}

#[test]
fn top_order_is_divisor_summatory() {
    // sum_{m <= n} d(m), with d computed by trial division
    let mut acc = 0u128;
    for m in 1..=10_000u128 {
        acc += (1..=m)
            .filter(|i| i * i <= m && m % i == 0)
            .map(|i| if i * i == m { 1 } else { 2 })
            .sum::<u128>();
        if m % 997 == 0 || m == 10_000 {
            assert_eq!(
                count(&region(2, 2, m as u64)).unwrap().value(),
                acc,
                "n={m}"
            );
        }
    }
}

#[test]
fn top_order_agrees_with_enumeration() {
    for (r, n) in [(2usize, 500u128), (3, 300), (4, 100)] {
        let p = Problem::new(unit_start(r), 0, vec![1; r], n, None, None).unwrap();
        let dfs = engine::count(&p, &CountOptions::default()).unwrap();
        assert_eq!(count_product(r, n).unwrap(), dfs);
    }
}

#[test]
fn frozen_counts() {
    assert_eq!(count(&region(2, 2, 1_000_000)).unwrap().value(), 13_970_034);
    assert_eq!(count(&region(2, 3, 10_000)).unwrap().value(), 1_939_098);
    assert_eq!(count(&region(2, 3, 100_000)).unwrap().value(), 64_331_354);
}

#[test]
fn orbit_mode_matches_plain() {
    let orbit = Counter::new(CountOptions {
        orbit: true,
        ..CountOptions::default()
    });
    for (ell, r, n) in [
        (2u32, 3u32, 2000u64),
        (2, 4, 300),
        (3, 4, 500),
        (2, 5, 60),
        (3, 5, 200),
    ] {
        let h = region(ell, r, n);
        assert_eq!(orbit.count(&h).unwrap(), count(&h).unwrap(), "{h}");
    }
}

#[test]
fn budget_is_enforced() {
    let tiny = Counter::with_budget(10);
    let err = tiny.count(&region(2, 3, 1_000_000)).unwrap_err();
    assert!(matches!(err, Error::BudgetExceeded { budget: 10 }));
    assert!(err.is_computational());
    // stops early instead of finishing the enumeration
    let start = std::time::Instant::now();
    let err = Counter::with_budget(1_000_000)
        .count(&region(2, 3, 1_000_000_000_000))
        .unwrap_err();
    assert!(matches!(err, Error::BudgetExceeded { .. }));
    assert!(start.elapsed().as_secs() < 30);
    let walk = Counter::with_budget(1_000).fold_slab_groups(
        &region(2, 3, 1_000_000),
        None,
        || (),
        |_, _, _| {},
    );
    assert!(matches!(walk, Err(Error::BudgetExceeded { .. })));
}

#[test]
fn scaled_matches_brute_force() {
    let h = region(2, 3, 40);
    let t = ScaleVector::new(vec![
        "1/2".parse().unwrap(),
        Rational::integer(1),
        "3/2".parse().unwrap(),
    ])
    .unwrap();
    let want = box_points(3, 200)
        .iter()
        .filter(|p| {
            // 4 e_2(p1/2, p2, 3 p3/2) = e_2(p1, 2 p2, 3 p3)
            e(2, &[p[0], 2 * p[1], 3 * p[2]]) <= 4 * 40
        })
        .count() as u128;
    assert_eq!(count_scaled(&h, &t).unwrap().value(), want);
}

#[test]
fn scaled_top_order_fast_path() {
    let h = region(2, 2, 1000);
    let t = ScaleVector::new(vec!["2/3".parse().unwrap(), "5/2".parse().unwrap()]).unwrap();
    // (2/3) i (5/2) j <= 1000  <=>  5 i j <= 3000
    let want = count_product(2, 600).unwrap();
    assert_eq!(count_scaled(&h, &t).unwrap().value(), want);
}

#[test]
fn divisibility_matches_brute_force() {
    for (ell, r, n, mu) in [
        (2u32, 3u32, 60u64, vec![1u64, 2, 3]),
        (2, 2, 100, vec![2, 5]),
        (1, 3, 30, vec![2, 2, 3]),
        (3, 4, 80, vec![1, 2, 1, 2]),
        (2, 4, 30, vec![3, 1, 1, 2]),
    ] {
        let h = region(ell, r, n);
        let want = brute(ell, r, n, |p| {
            p.iter().zip(&mu).all(|(x, &m)| x % m as u128 == 0)
        });
        assert_eq!(
            count_with_divisibility(&h, &mu).unwrap().value(),
            want,
            "{h} mu={mu:?}"
        );
    }
}

#[test]
fn constrained_matches_brute_force() {
    for (ell, r, n, b) in [
        (2u32, 3u32, 60u64, 40u128),
        (1, 3, 20, 30),
        (2, 2, 80, 30),
        (3, 4, 60, 10),
    ] {
        let h = region(ell, r, n);
        let want = brute(ell, r, n, |p| p.iter().product::<u128>() <= b);
        let cap = ProductCap::integer(b);
        assert_eq!(
            count_constrained(&h, &cap).unwrap().value(),
            want,
            "{h} B={b}"
        );
    }
    // fractional caps act through their floor
    let h = region(2, 3, 60);
    let a = count_constrained(&h, &ProductCap::new("81/2".parse().unwrap())).unwrap();
    let b = count_constrained(&h, &ProductCap::integer(40)).unwrap();
    assert_eq!(a, b);
}

#[test]
fn box_matches_brute_force() {
    let h = region(2, 3, 50);
    let upper = [4u128, 9, 30];
    let want = brute(2, 3, 50, |p| p.iter().zip(&upper).all(|(x, u)| x <= u));
    assert_eq!(serial().count_in_box(&h, &upper).unwrap().value(), want);
    assert_eq!(serial().count_in_box(&h, &[0, 5, 5]).unwrap().value(), 0);
}

#[test]
fn completions_sum_to_count() {
    for (ell, r, n) in [
        (2u32, 3u32, 500u64),
        (1, 3, 40),
        (3, 3, 400),
        (2, 4, 60),
        (3, 4, 100),
    ] {
        let h = region(ell, r, n);
        let total = count(&h).unwrap().value();
        let pc = PrefixCoefficients::empty(ell as usize);
        assert_eq!(
            count_completions(&pc, r as usize, n as u128, None)
                .unwrap()
                .value(),
            total
        );
        let mut acc = 0;
        for v in 1..=n as u128 {
            let c = count_completions(&pc.with(v).unwrap(), r as usize - 1, n as u128, None)
                .unwrap()
                .value();
            acc += c;
        }
        assert_eq!(acc, total, "{h}");
    }
}

#[test]
fn completions_with_cap_remainder() {
    let (n, b) = (200u128, 50u128);
    let pc = PrefixCoefficients::from_prefix(2, &[3]).unwrap();
    let want = box_points(2, n)
        .iter()
        .filter(|p| e(2, &[3, p[0], p[1]]) <= n && p[0] * p[1] * 3 <= b)
        .count() as u128;
    let got = count_completions(&pc, 2, n, Some(b / 3)).unwrap().value();
    assert_eq!(got, want);
}

#[test]
fn enumeration_visits_every_point() {
    let h = region(2, 3, 40);
    let mut pts = Vec::new();
    serial()
        .for_each_point(&h, |p| pts.push(p.to_vec()))
        .unwrap();
    let want: Vec<Vec<u128>> = box_points(3, 40)
        .into_iter()
        .filter(|p| e(2, p) <= 40)
        .collect();
    assert_eq!(pts, want);

    let per_group = count_by_groups(&Counter::default(), &h);
    assert_eq!(per_group, want.len() as u128);
}

fn count_by_groups(c: &Counter, h: &RegionSpec) -> u128 {
    c.fold_slab_groups(h, None, || 0u128, |acc, _, last| *acc += last)
        .unwrap()
        .into_iter()
        .sum()
}

#[test]
fn slab_groups_are_deterministic() {
    let h = region(2, 4, 200);
    let par = Counter::default()
        .fold_slab_groups(&h, None, Vec::new, |acc, pre, last| {
            acc.push((pre.to_vec(), last))
        })
        .unwrap();
    let ser = serial()
        .fold_slab_groups(&h, None, Vec::new, |acc, pre, last| {
            acc.push((pre.to_vec(), last))
        })
        .unwrap();
    assert_eq!(par, ser);
    assert_eq!(count_by_groups(&serial(), &h), count(&h).unwrap().value());
}

#[test]
fn rational_parsing() {
    let r: Rational = "6/4".parse().unwrap();
    assert_eq!((r.num(), r.den()), (3, 2));
    assert_eq!(r.to_string(), "3/2");
    let d: Rational = "0.125".parse().unwrap();
    assert_eq!((d.num(), d.den()), (1, 8));
    assert_eq!("7".parse::<Rational>().unwrap(), Rational::integer(7));
    for bad in ["", "1/0", "-1", "a/b", "1.", "1.x"] {
        assert!(bad.parse::<Rational>().is_err(), "{bad}");
    }
}

#[test]
fn cache_variants() {
    let t = ScaleVector::new(vec!["1/2".parse().unwrap(), Rational::integer(3)]).unwrap();
    assert_eq!(scaled_variant(&t), "scaled=1/2,3/1");
    assert_eq!(divisibility_variant(&[2, 3]), "div=2,3");
    assert_eq!(
        cap_variant(&ProductCap::new("9/2".parse().unwrap())),
        "cap=4"
    );
}

#[test]
fn asymptotics() {
    let h = region(1, 2, 1000);
    assert!((asymptotic_count(&h, None).unwrap() - 500_000.0).abs() < 1e-6);
    assert!(asymptotic_count(&region(2, 3, 10), None).is_err());
    let v = asymptotic_count(&region(2, 3, 100), Some(2.0)).unwrap();
    assert!((v - 2000.0).abs() < 1e-9);
}

/// `V_{r-1,r}` in closed form from the Dirichlet integral.
fn codim_one_volume(r: u32) -> f64 {
    use statrs::function::gamma::gamma;
    let a = 1.0 / (r as f64 - 1.0);
    gamma(a).powi(r as i32) / ((r as f64 - 1.0) * gamma(r as f64 * a + 1.0))
}

#[test]
fn codim_one_volume_values() {
    assert!((codim_one_volume(2) - 0.5).abs() < 1e-12);
    assert!((codim_one_volume(3) - 2.0 * std::f64::consts::PI / 3.0).abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn monotone_in_n(ell in 1u32..=3, extra in 0u32..=2, n in 0u64..400) {
        let r = ell + extra;
        let a = count(&region(ell, r, n)).unwrap();
        let b = count(&region(ell, r, n + 1)).unwrap();
        prop_assert!(a <= b);
    }

    #[test]
    fn lattice_count_below_volume(n in 10u64..4000) {
        // points i >= 1 map to disjoint unit cubes [i-1, i] inside {e_2 <= n}
        let c = count(&region(2, 3, n)).unwrap().as_f64();
        prop_assert!(c <= codim_one_volume(3) * (n as f64).powf(1.5));
        let c2 = count(&region(1, 2, n)).unwrap().as_f64();
        prop_assert!(c2 <= codim_one_volume(2) * (n as f64).powi(2));
    }

    #[test]
    fn points_have_bounded_product(n in 3u64..150) {
        // AM-GM: e_2(a, b, c) >= 3 (abc)^{2/3}, so (abc)^2 <= n^3 / 27
        let h = region(2, 3, n);
        let mut ok = true;
        serial().for_each_point(&h, |p| {
            let prod: u128 = p.iter().product();
            ok &= prod * prod <= (n as u128).pow(3) / 27 + 1 && p.iter().all(|&x| x <= n as u128);
        }).unwrap();
        prop_assert!(ok);
    }

    #[test]
    fn subregion_inclusion(n in 3u64..300) {
        // e_2 <= n implies e_1 <= n
        let a = count(&region(2, 3, n)).unwrap();
        let b = count(&region(1, 3, n)).unwrap();
        prop_assert!(a <= b);
    }

    #[test]
    fn divisibility_is_substitution(n in 2u64..2000, m1 in 1u64..5, m2 in 1u64..5) {
        let h = region(2, 2, n);
        let got = count_with_divisibility(&h, &[m1, m2]).unwrap().value();
        prop_assert_eq!(got, count_product(2, n as u128 / (m1 * m2) as u128).unwrap());
    }
}
