mod common;

use common::{failing_log_conditions, scan_next_p};
use nf_core::exotica::{
    build_data_set, certify_family, check_certificate, effective_genus, gen_knot_sequence, gen_p_sequence, log_key,
    nonstein_obstruction, stein_nonstein_pipeline, DataSet, ExoticaError, FamilyParameters, FamilySequence,
    GenusBoundProvider, GenusLedger, LedgerPolicy, ObstructedOp, Provenance,
};
use nf_core::handlebody::{boundary_sum, gompf_nucleus, homology, knot_handle, Handlebody, StandardKnot};
use nf_core::surgery::log_transform;
use nf_core::swadj::KnotSpec;
use proptest::prelude::*;

/// `g(S_p) ≤ max(1, slope·p + offset)`, raised to the adjunction floor
/// `⌈(S·S + d·(p − 1) + 2) / 2⌉` so declared values stay consistent.
struct Linear {
    slope: i64,
    offset: i64,
    s_square: i64,
    divisor: i64,
}

impl Linear {
    fn at(&self, p: i64) -> i64 {
        let floor = (self.s_square + self.divisor * (p - 1) + 3).div_euclid(2);
        (self.slope * p + self.offset).max(1).max(floor)
    }
}

impl GenusBoundProvider for Linear {
    fn bound(&self, key: &str) -> Option<i64> {
        key.strip_prefix("S_")?.parse().ok().map(|p| self.at(p))
    }
}

/// A nucleus `G(n)`, optionally log-transformed once with multiplicity
/// `divisor`, optionally boundary-summed with a framed knot handle.
struct Setup {
    x: Handlebody,
    ds: DataSet,
    /// `(label, square, genus)` for each complement class.
    complement: Vec<(String, i64, i64)>,
}

fn setup(n: i64, divisor: i64, knot: Option<(StandardKnot, i64)>) -> Setup {
    let mut x = gompf_nucleus(n).unwrap();
    let mut declared = GenusLedger::new();
    if divisor > 1 {
        x = log_transform(&x, "N", divisor).unwrap().manifold;
        declared.insert("S", 1, Provenance::Declared).unwrap();
    }
    let mut complement = Vec::new();
    if let Some((k, f)) = knot {
        x = boundary_sum(&x, &knot_handle("u", k, f));
        let seifert = if k == StandardKnot::Trefoil { 1 } else { 0 };
        complement.push(("u1".to_string(), f, if f < 0 { seifert.max(1) } else { seifert }));
    }
    let ds = build_data_set(&x, "N", None, true, &declared).unwrap();
    Setup { x, ds, complement }
}

fn knot_choice() -> impl Strategy<Value = Option<(StandardKnot, i64)>> {
    prop_oneof![
        Just(None),
        (prop_oneof![Just(StandardKnot::Unknot), Just(StandardKnot::Trefoil)], -3i64..=3).prop_map(Some),
    ]
}

fn oracle_genus<'a>(s: &'a Setup, provider: &'a Linear) -> impl Fn(i64) -> i64 + Copy + 'a {
    let sg = s.ds.s_genus.bound;
    let sq = s.ds.s_square;
    move |p| if p == 1 { sg } else { effective_genus(provider.at(p), sq) }
}

fn full_ledger(ps: &[i64], provider: &Linear) -> GenusLedger {
    let mut l = GenusLedger::new();
    for p in ps.iter().filter(|p| **p > 1) {
        l.insert(&log_key(*p), provider.at(*p), Provenance::Declared).unwrap();
    }
    l
}

const CONDITIONS: [&str; 6] = ["p1", "i", "ii", "iii", "iv", "v"];

fn sequence_case() -> impl Strategy<Value = (i64, i64, Option<(StandardKnot, i64)>, i64, i64, usize)> {
    (1i64..=6, prop_oneof![Just(1i64), 2i64..=5], knot_choice(), 0i64..=3, -2i64..=3, 2usize..=6)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn generated_sequences_match_scan((n, d, knot, slope, offset, len) in sequence_case()) {
        let s = setup(n, d, knot);
        let provider = Linear { slope, offset, s_square: s.ds.s_square, divisor: s.ds.divisor };
        let seq = gen_p_sequence(&s.ds, len, false, &GenusLedger::new(), LedgerPolicy::Provider(&provider)).unwrap();
        let FamilyParameters::Log(ps) = seq.parameters.clone() else { unreachable!() };
        prop_assert_eq!(ps.len(), len);
        prop_assert_eq!(ps[0], 1);

        let even = s.ds.s_square % 2 == 0;
        let genus = oracle_genus(&s, &provider);
        for k in 1..len {
            prop_assert_eq!(ps[k], scan_next_p(&ps[..k], s.ds.divisor, s.ds.s_square, &s.complement, even, genus));
            prop_assert!(ps[k] > ps[k - 1]);
        }
        prop_assert!(failing_log_conditions(&ps, s.ds.divisor, s.ds.s_square, &s.complement, even, genus).is_empty());

        let cert = certify_family(&s.x, &s.ds, &seq).unwrap();
        let report = check_certificate(&cert);
        prop_assert!(report.accepted(), "{:?}", report.failures);

        // Obligations are closed: re-evaluation reproduces the stored values,
        // and each (iii) bound uses the ledger entry of the previous member.
        for o in &cert.obligations {
            prop_assert_eq!(o.recheck(), Ok(o.holds));
        }
        for k in 2..=len {
            let o = cert.obligations.iter().find(|o| o.id == format!("iii[n={k}]")).unwrap();
            prop_assert_eq!(o.rhs_value, 2 * genus(ps[k - 2]) - 2);
            prop_assert_eq!(o.lhs_value, s.ds.divisor * (ps[k - 1] - 1) + s.ds.s_square);
        }

        // Lowering the last parameter breaks minimality, and the checker
        // names exactly the conditions the oracle finds failing.
        let step = if s.ds.parity_constrained() { 2 } else { 1 };
        let mut mutated = ps.clone();
        *mutated.last_mut().unwrap() -= step;
        let bad = FamilySequence::with_parameters(&s.ds, FamilyParameters::Log(mutated.clone()), false, &full_ledger(&mutated, &provider)).unwrap();
        let mut want = failing_log_conditions(&mutated, s.ds.divisor, s.ds.s_square, &s.complement, even, genus);
        want.sort();
        prop_assert!(!want.is_empty());
        let mut stated: Vec<String> = bad.obligations.iter().filter(|o| !o.holds).map(|o| o.id.clone()).collect();
        stated.sort();
        prop_assert_eq!(&stated, &want);
        match certify_family(&s.x, &s.ds, &bad) {
            Ok(bad_cert) => {
                let report = check_certificate(&bad_cert);
                prop_assert!(!report.accepted());
                let mut got: Vec<String> = report
                    .failures
                    .iter()
                    .filter(|f| f.condition.as_deref().is_some_and(|c| CONDITIONS.contains(&c)))
                    .map(|f| f.id.clone())
                    .collect();
                got.sort();
                prop_assert_eq!(got, want);
            }
            // A multiplicity sharing a factor with the divisor has no manifold.
            Err(ExoticaError::Surgery(_)) => prop_assert!(want.iter().any(|id| id.starts_with("iv["))),
            Err(e) => prop_assert!(false, "{e}"),
        }
    }

    #[test]
    fn tampered_values_are_caught((n, d, knot, slope, offset, len) in sequence_case(), pick in any::<prop::sample::Index>(), delta in prop_oneof![-3i64..=-1, 1i64..=3]) {
        let s = setup(n, d, knot);
        let provider = Linear { slope, offset, s_square: s.ds.s_square, divisor: s.ds.divisor };
        let seq = gen_p_sequence(&s.ds, len, false, &GenusLedger::new(), LedgerPolicy::Provider(&provider)).unwrap();
        let mut cert = certify_family(&s.x, &s.ds, &seq).unwrap();
        let i = pick.index(cert.obligations.len());
        cert.obligations[i].lhs_value += delta;
        let id = cert.obligations[i].id.clone();
        let report = check_certificate(&cert);
        prop_assert!(!report.accepted());
        prop_assert!(report.failures.iter().any(|f| f.id == id));
    }

}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn knot_sequences_check(n in 1i64..=6, knot in knot_choice(), len in 2usize..=4, strengthened in any::<bool>()) {
        let s = setup(n, 1, knot);
        let mut ledger = GenusLedger::new();
        for k in 1..=40u32 {
            ledger.insert(&format!("S_K[{}]", KnotSpec::Torus(k).label()), k as i64 + 1, Provenance::Declared).unwrap();
        }
        let seq = gen_knot_sequence(&s.ds, len, strengthened, &ledger, LedgerPolicy::DeclaredOnly).unwrap();
        let FamilyParameters::Knot(ks) = &seq.parameters else { unreachable!() };
        let degrees: Vec<i64> = ks.iter().map(|k| k.alexander().unwrap().degree()).collect();
        prop_assert_eq!(degrees[0], 0);
        prop_assert!(degrees.windows(2).all(|w| w[1] > w[0]));
        let report = check_certificate(&certify_family(&s.x, &s.ds, &seq).unwrap());
        prop_assert!(report.accepted(), "{:?}", report.failures);
    }
}

proptest! {
    #[test]
    fn trivial_operations_are_never_obstructed(n in 1i64..=8, m in 1i64..=8, k in -5i64..=5) {
        let g = gompf_nucleus(n).unwrap();
        let log = nonstein_obstruction(&g, "N", &ObstructedOp::Log { p: 1 }, m);
        prop_assert!(matches!(log, Err(ExoticaError::HypothesisUnmet(_))));
        let unknot = if k == 0 { KnotSpec::Torus(0) } else { KnotSpec::Twist(0) };
        let knot = nonstein_obstruction(&g, "N", &ObstructedOp::Knot { knot: unknot }, m);
        prop_assert!(matches!(knot, Err(ExoticaError::HypothesisUnmet(_))));
    }
}

#[test]
fn pipeline_stages_share_homology() {
    for n in 2..=4 {
        for framing in [-1, 0] {
            let x = boundary_sum(&gompf_nucleus(n).unwrap(), &knot_handle("u", StandardKnot::Trefoil, framing));
            let provider = Linear { slope: 1, offset: 0, s_square: -n, divisor: 1 };
            let fam = stein_nonstein_pipeline(&x, "N", 2, 2, &GenusLedger::new(), LedgerPolicy::Provider(&provider)).unwrap();
            let base = homology(&x).unwrap();
            assert!(fam.ledgers_equal);
            for stage in fam.stein_members.iter().chain([&fam.x0, &fam.x_tilde_n, &fam.x_tilde]) {
                assert_eq!(stage.homology, base, "n={n} f={framing} {}", stage.label);
            }
            assert!(fam.stein_members.iter().all(|s| s.stein == Some(true)));
            assert_eq!(fam.tail.len(), 2);
            assert!(fam.tail.iter().all(|t| t.obstruction.accepted && t.obstruction.recheck()));
            assert!(check_certificate(&fam.certificate).accepted());
        }
    }
}
