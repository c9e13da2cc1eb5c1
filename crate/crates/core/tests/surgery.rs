mod common;

use common::{random_handlebody, rng};
use nf_core::handlebody::{boundary_sum, gompf_nucleus, homology, intersection_form, CorkSign, Handlebody};
use nf_core::intlat::Parity;
use nf_core::surgery::{cork_twist, log_transform, slide, strip_corks, transformed_parity, transformed_square, w_modify};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 { a.abs() } else { gcd(b, a % b) }
}

#[test]
fn log_transform_parity_grid() {
    for s in -5i64..=5 {
        for d in 1i64..=4 {
            for p in 1i64..=7 {
                if gcd(p, d) != 1 {
                    continue;
                }
                let sp = transformed_square(s, d, p);
                assert_eq!(sp, p * p * s + d * d * (p - 1));
                let even = s % 2 == 0 && (p % 2 == 1 || d % 2 == 0);
                assert_eq!(sp % 2 == 0, even, "s={s} d={d} p={p}");
                assert_eq!(transformed_parity(s, d, p) == Parity::Even, even);
            }
        }
    }
}

/// The diagram-level transform reproduces the closed form, also when
/// applied twice so the divisor is no longer 1.
#[test]
fn log_transform_diagrams_match_closed_form() {
    for n in 1..=6 {
        let g = gompf_nucleus(n).unwrap();
        for p in 1..=7 {
            let r = log_transform(&g, "N", p).unwrap();
            assert_eq!(r.s, -n);
            assert_eq!(r.s_prime, transformed_square(-n, 1, p));
            assert_eq!(r.nucleus_marker.divisor, p);
            assert_eq!(homology(&r.manifold).unwrap().form.parity, transformed_parity(-n, 1, p));
            for q in 2..=5 {
                if gcd(p, q) != 1 {
                    continue;
                }
                let rr = log_transform(&r.manifold, "N", q).unwrap();
                assert_eq!(rr.s_prime, transformed_square(r.s_prime, p, q), "n={n} p={p} q={q}");
                assert_eq!(rr.nucleus_marker.divisor, p * q);
            }
        }
    }
}

#[test]
fn log_transform_one_keeps_ledger() {
    for n in 1..=8 {
        let g = gompf_nucleus(n).unwrap();
        let r = log_transform(&g, "N", 1).unwrap();
        assert_eq!(homology(&r.manifold).unwrap(), homology(&g).unwrap());
        assert_eq!(intersection_form(&r.manifold).1, intersection_form(&g).1);
        assert_eq!(r.s_prime, r.s);
    }
}

/// Applies a random W-modification, cork twist or slide; `None` when the
/// drawn slide is not allowed.
fn random_step(x: &Handlebody, rng: &mut impl Rng) -> Option<Handlebody> {
    let names: Vec<String> = x.two_handles.keys().cloned().collect();
    match rng.gen_range(0..3) {
        0 => {
            let h = names.choose(rng).unwrap();
            let sign = if rng.gen_bool(0.5) { CorkSign::Plus } else { CorkSign::Minus };
            Some(w_modify(x, h, sign, rng.gen_range(1..=4)).unwrap())
        }
        1 if !x.cork_registry.is_empty() => {
            let id = x.cork_registry.choose(rng).unwrap().id.clone();
            Some(cork_twist(x, &id).unwrap())
        }
        _ => {
            let from = names.choose(rng).unwrap();
            let over = names.choose(rng).unwrap();
            slide(x, from, over, if rng.gen_bool(0.5) { 1 } else { -1 }).ok()
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn rewrites_preserve_homology(seed in any::<u64>()) {
        let mut r = rng(seed);
        let x = random_handlebody(&mut r);
        let base = homology(&x).unwrap();
        let mut cur = x;
        for _ in 0..6 {
            if let Some(next) = random_step(&cur, &mut r) {
                next.validate().unwrap();
                prop_assert_eq!(&homology(&next).unwrap(), &base);
                cur = next;
            }
        }
    }

    #[test]
    fn twist_is_involution_and_strip_undoes_modify(seed in any::<u64>(), p in 1i64..6, plus in any::<bool>()) {
        let mut r = rng(seed);
        let x = random_handlebody(&mut r);
        let names: Vec<String> = x.two_handles.keys().cloned().collect();
        let h = names.choose(&mut r).unwrap();
        let sign = if plus { CorkSign::Plus } else { CorkSign::Minus };
        let y = w_modify(&x, h, sign, p).unwrap();
        let id = y.cork_registry[0].id.clone();
        let twisted = cork_twist(&y, &id).unwrap();
        prop_assert_ne!(&twisted, &y);
        prop_assert_eq!(&cork_twist(&twisted, &id).unwrap(), &y);
        prop_assert_eq!(&strip_corks(&y, &[id]).unwrap(), &x);
    }

    #[test]
    fn nucleus_summand_survives_rewrites(seed in any::<u64>(), n in 1i64..6) {
        let mut r = rng(seed);
        let x = boundary_sum(&gompf_nucleus(n).unwrap(), &random_handlebody(&mut r));
        let y = w_modify(&x, "fiber", CorkSign::Minus, 2).unwrap();
        let id = y.cork_registry[0].id.clone();
        let z = strip_corks(&cork_twist(&cork_twist(&y, &id).unwrap(), &id).unwrap(), &[id]).unwrap();
        prop_assert_eq!(&z, &x);
        prop_assert_eq!(&homology(&y).unwrap(), &homology(&x).unwrap());
    }
}
