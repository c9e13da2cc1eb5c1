use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::cert::{certify_with, Construction, ExoticaCertificate};
use super::data::{build_data_set, GenusLedger, LedgerPolicy};
use super::obstruction::{nonstein_obstruction, ObstructedOp, ObstructionRecord, DEFAULT_INTERSECTION_BOUND};
use super::sequence::{gen_p_sequence, FamilyParameters};
use super::{Assumption, AssumptionStatus, ExoticaError};
use crate::handlebody::{homology, intersection_form, CorkSign, Handlebody, HomologyReport};
use crate::legendrian::{stein_check, zigzag_plan, LegendrianError};
use crate::surgery::{apply, log_transform, replay, Op};

/// One handlebody produced by a pipeline, with the ops that rebuild it from
/// the input.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stage {
    pub label: String,
    pub manifold: Handlebody,
    pub ops: Vec<Op>,
    /// `Some(true)` when the Stein condition was checked and holds.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stein: Option<bool>,
    pub homology: HomologyReport,
}

impl Stage {
    fn build(x: &Handlebody, label: String, ops: Vec<Op>, check_stein: bool) -> Result<Stage, ExoticaError> {
        let manifold = replay(x, &ops)?;
        let stein = if check_stein { Some(stein_check(&manifold)?.is_ok()) } else { None };
        let homology = homology(&manifold)?;
        Ok(Stage { label, manifold, ops, stein, homology })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TailMember {
    pub p: i64,
    pub manifest_hash: String,
    pub homology: HomologyReport,
    pub obstruction: ObstructionRecord,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SteinNonsteinFamily {
    pub k0: String,
    pub p_values: Vec<i64>,
    pub q_values: BTreeMap<String, i64>,
    pub p_corks: Vec<String>,
    pub q_corks: BTreeMap<String, String>,
    pub x0: Stage,
    /// `X₁ … X_n`, each Stein.
    pub stein_members: Vec<Stage>,
    pub x_tilde_n: Stage,
    pub x_tilde: Stage,
    pub tail: Vec<TailMember>,
    pub certificate: ExoticaCertificate,
    pub axioms: Vec<Assumption>,
    pub ledgers_equal: bool,
}

/// Some 2-handles go over no 1-handle algebraically and their classes form
/// a basis of H₂.
pub fn is_good_handlebody(x: &Handlebody) -> bool {
    let free = x.two_handles.keys().filter(|h| x.run_over(h).values().all(|v| *v == 0)).count();
    free == intersection_form(x).0.len()
}

fn nucleus_is_stein(x: &Handlebody, marker: &str) -> Result<BTreeSet<String>, ExoticaError> {
    let m = x.marker(marker)?;
    let n = x.restrict(&m.handles, &m.one_handles)?;
    match stein_check(&n) {
        Ok(r) if r.is_ok() => Ok(m.handles.clone()),
        Ok(r) => Err(ExoticaError::SteinificationFailed(format!(
            "nucleus {marker} is not a Stein handlebody: {}",
            r.violations.iter().map(|v| format!("{} (framing {}, tb {})", v.handle, v.framing, v.tb)).collect::<Vec<_>>().join(", ")
        ))),
        Err(e) => Err(ExoticaError::SteinificationFailed(format!("nucleus {marker}: {e}"))),
    }
}

/// Least W coefficient that lets zig-zags reach the Stein framing.
fn stein_coefficient(x: &Handlebody, handle: &str) -> Result<i64, ExoticaError> {
    let h = x.handle(handle)?;
    let l = h.legendrian.ok_or_else(|| LegendrianError::NoLegendrianData(handle.to_string()))?;
    Ok((h.framing - l.tb + 1).max(1))
}

/// Applies `op` and returns the id of the cork it created.
fn push_cork(x: &mut Handlebody, ops: &mut Vec<Op>, op: Op) -> Result<String, ExoticaError> {
    *x = apply(x, &op)?;
    ops.push(op);
    Ok(x.cork_registry.last().expect("w_modify records a cork").id.clone())
}

fn axiom(id: &str, statement: &str) -> Assumption {
    Assumption { id: id.into(), statement: statement.into(), status: AssumptionStatus::Axiom }
}

/// Stein members `X₁ … X_n` by W-modifications and cork twists on a good
/// Legendrian handlebody containing a Stein nucleus, then the log-transform
/// tail on `X̃_n` of length `tail_len`, each member with a non-Stein record.
pub fn stein_nonstein_pipeline(
    x: &Handlebody,
    marker: &str,
    n: usize,
    tail_len: usize,
    ledger: &GenusLedger,
    policy: LedgerPolicy<'_>,
) -> Result<SteinNonsteinFamily, ExoticaError> {
    if n == 0 {
        return Err(ExoticaError::BadParameter("n ≥ 1 required".into()));
    }
    x.validate()?;
    if !is_good_handlebody(x) {
        return Err(ExoticaError::NotGoodHandlebody(
            "the 2-handles going over no 1-handle do not span H₂; normalise by slides first".into(),
        ));
    }
    if let Err(e) = stein_check(x) {
        return Err(ExoticaError::NotGoodHandlebody(e.to_string()));
    }
    let nucleus = nucleus_is_stein(x, marker)?;
    let k0 = nucleus
        .iter()
        .find(|h| x.run_over(h).values().all(|v| *v == 0))
        .cloned()
        .ok_or_else(|| ExoticaError::NotGoodHandlebody(format!("every handle of {marker} goes over a 1-handle")))?;

    // Step II.
    let mut ops = Vec::new();
    let mut cur = x.clone();
    let p1 = stein_coefficient(x, &k0)?;
    let p_values: Vec<i64> = (0..n as i64).map(|i| p1 + i).collect();
    let mut p_corks = Vec::new();
    for &p in &p_values {
        p_corks.push(push_cork(&mut cur, &mut ops, Op::WModify { handle: k0.clone(), sign: CorkSign::Minus, p })?);
    }
    let mut q_values = BTreeMap::new();
    let mut q_corks = BTreeMap::new();
    for h in x.two_handles.keys().filter(|h| **h != k0) {
        let q = stein_coefficient(x, h)?;
        q_values.insert(h.clone(), q);
        q_corks.insert(h.clone(), push_cork(&mut cur, &mut ops, Op::WModify { handle: h.clone(), sign: CorkSign::Minus, p: q })?);
    }
    let x0 = Stage::build(x, "X_0".into(), ops.clone(), false)?;

    // Step III.
    let mut stein_members = Vec::new();
    for (i, id) in p_corks.iter().enumerate() {
        let mut member_ops = ops.clone();
        member_ops.push(Op::CorkTwist { id: id.clone() });
        member_ops.extend(q_corks.values().map(|id| Op::CorkTwist { id: id.clone() }));
        member_ops.push(Op::Steinify);
        let stage = Stage::build(x, format!("X_{}", i + 1), member_ops, true)?;
        if stage.stein != Some(true) {
            return Err(ExoticaError::SteinificationFailed(format!("{} fails the Stein check", stage.label)));
        }
        stein_members.push(stage);
    }
    let x_n = stein_members.last().expect("n ≥ 1");

    let nucleus_q: Vec<String> = q_corks.iter().filter(|(h, _)| nucleus.contains(*h)).map(|(_, id)| id.clone()).collect();
    let mut tilde_n_ops = x_n.ops.clone();
    tilde_n_ops.push(Op::CorkTwist { id: p_corks.last().expect("n ≥ 1").clone() });
    tilde_n_ops.extend(nucleus_q.iter().map(|id| Op::CorkTwist { id: id.clone() }));
    let x_tilde_n = Stage::build(x, "X~_n".into(), tilde_n_ops, false)?;

    let mut tilde_ops = x_n.ops.clone();
    tilde_ops.push(Op::StripCorks { ids: p_corks.iter().chain(&nucleus_q).cloned().collect() });
    for h in &nucleus {
        let orig = x.handle(h)?;
        tilde_ops.push(Op::SetLegendrian { handle: h.clone(), legendrian: orig.legendrian, front: orig.front.clone() });
    }
    let x_tilde = Stage::build(x, "X~".into(), tilde_ops, true)?;
    if x_tilde.stein != Some(true) {
        return Err(ExoticaError::SteinificationFailed("X~ fails the Stein check".into()));
    }

    // The infinite tail: log transforms of X̃_n.
    let ds = build_data_set(&x_tilde_n.manifold, marker, None, true, ledger)?;
    let seq = gen_p_sequence(&ds, tail_len + 1, false, ledger, policy)?;
    let certificate = certify_with(&x_tilde_n.manifold, &ds, &seq, Construction::SteinNonstein)?;
    let FamilyParameters::Log(ps) = &seq.parameters else { unreachable!("log family") };
    let mut tail = Vec::new();
    for &p in &ps[1..] {
        let r = log_transform(&x_tilde_n.manifold, marker, p)?;
        let obstruction =
            nonstein_obstruction(&x_tilde_n.manifold, marker, &ObstructedOp::Log { p }, DEFAULT_INTERSECTION_BOUND)?;
        tail.push(TailMember { p, manifest_hash: r.manifold.content_hash(), homology: homology(&r.manifold)?, obstruction });
    }

    let base = homology(x)?;
    let ledgers_equal = std::iter::once(&x0)
        .chain(&stein_members)
        .chain([&x_tilde_n, &x_tilde])
        .map(|s| &s.homology)
        .chain(tail.iter().map(|t| &t.homology))
        .all(|h| *h == base);

    let axioms = vec![
        axiom("embedding.x-in-x0", "X embeds into X_0"),
        axiom("embedding.members-in-x", "each X_i embeds into X"),
        axiom("embedding.tilde", "X~_n embeds into X~, which differs from it by W-modifications"),
        axiom("homeomorphism.cork", "cork twists preserve the homeomorphism type"),
        Assumption {
            id: "zigzag-policy".into(),
            statement: "Stein verdicts rest on the framing check after alternating zig-zags starting down".into(),
            status: AssumptionStatus::Assumed,
        },
        Assumption {
            id: "nucleus-legendrian".into(),
            statement: "X~ restores the nucleus handles' Legendrian data in place of undoing the normalisation".into(),
            status: AssumptionStatus::Assumed,
        },
    ];

    Ok(SteinNonsteinFamily {
        k0,
        p_values,
        q_values,
        p_corks,
        q_corks,
        x0,
        stein_members,
        x_tilde_n,
        x_tilde,
        tail,
        certificate,
        axioms,
        ledgers_equal,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WPlusFamily {
    /// `(handle, p, cork id)` for each W⁺(p) applied.
    pub modifications: Vec<(String, i64, String)>,
    pub x1: Stage,
    pub x0: Stage,
    pub ledgers_equal: bool,
    pub certificate: ExoticaCertificate,
}

/// W⁺-modifies every handle whose framing is out of reach of zig-zags,
/// Stein-ifies to `X₁`, and twists the corks back to get `X₀`. The log
/// family of length `family_len` on `X₁` is certified.
pub fn w_plus_exotica_pipeline(
    x: &Handlebody,
    marker: &str,
    family_len: usize,
    ledger: &GenusLedger,
    policy: LedgerPolicy<'_>,
) -> Result<WPlusFamily, ExoticaError> {
    x.validate()?;
    nucleus_is_stein(x, marker)?;
    let deficits = match zigzag_plan(x) {
        Ok(_) => Vec::new(),
        Err(LegendrianError::FramingTooHigh(d)) => d,
        Err(e) => return Err(e.into()),
    };
    let mut cur = x.clone();
    let mut ops = Vec::new();
    let mut modifications = Vec::new();
    for d in &deficits {
        let id = push_cork(&mut cur, &mut ops, Op::WModify { handle: d.handle.clone(), sign: CorkSign::Plus, p: d.required_p })?;
        modifications.push((d.handle.clone(), d.required_p, id));
    }
    ops.push(Op::Steinify);
    let x1 = Stage::build(x, "X_1".into(), ops.clone(), true)?;
    if x1.stein != Some(true) {
        return Err(ExoticaError::SteinificationFailed("X_1 fails the Stein check".into()));
    }
    let mut ops0 = ops;
    ops0.extend(modifications.iter().map(|(_, _, id)| Op::CorkTwist { id: id.clone() }));
    let x0 = Stage::build(x, "X_0".into(), ops0, false)?;
    let ds = build_data_set(&x1.manifold, marker, None, true, ledger)?;
    let seq = gen_p_sequence(&ds, family_len, false, ledger, policy)?;
    let certificate = certify_with(&x1.manifold, &ds, &seq, Construction::LogFamily)?;
    let base = homology(x)?;
    let ledgers_equal = x1.homology == base && x0.homology == base;
    Ok(WPlusFamily { modifications, x1, x0, ledgers_equal, certificate })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exotica::cert::{check_certificate, Verdict};
    use crate::handlebody::{boundary_sum, gompf_nucleus, knot_handle, StandardKnot};
    use crate::surgery::strip_corks;

    fn pipeline_input() -> Handlebody {
        boundary_sum(&gompf_nucleus(2).unwrap(), &knot_handle("u", StandardKnot::Trefoil, 0))
    }

    #[test]
    fn stein_nonstein_on_g2_plus_trefoil() {
        let x = pipeline_input();
        let ledger = GenusLedger::declared([("S_5".to_string(), 5)]).unwrap();
        let f = stein_nonstein_pipeline(&x, "N", 2, 2, &ledger, LedgerPolicy::DeclaredOnly).unwrap();
        assert_eq!(f.k0, "fiber");
        assert_eq!(f.p_values, vec![1, 2]);
        assert_eq!(f.stein_members.len(), 2);
        assert!(f.stein_members.iter().all(|s| s.stein == Some(true)));
        assert_eq!(f.x_tilde.stein, Some(true));
        assert_eq!(f.tail.iter().map(|t| t.p).collect::<Vec<_>>(), vec![5, 13]);
        assert!(f.tail.iter().all(|t| t.obstruction.accepted));
        assert!(f.ledgers_equal);
        assert_eq!(f.certificate.verdict, Verdict::Accept);
        assert!(check_certificate(&f.certificate).accepted());
        let ids: Vec<String> = f.x0.manifold.cork_registry.iter().map(|c| c.id.clone()).collect();
        assert_eq!(strip_corks(&f.x0.manifold, &ids).unwrap(), x);
    }

    #[test]
    fn rejects_non_stein_nucleus_and_bad_input() {
        let mut x = pipeline_input();
        x.handle_mut("section").unwrap().framing = 5;
        assert!(matches!(
            stein_nonstein_pipeline(&x, "N", 1, 1, &GenusLedger::new(), LedgerPolicy::DeclaredOnly),
            Err(ExoticaError::SteinificationFailed(_))
        ));
        let g1 = gompf_nucleus(1).unwrap();
        assert!(matches!(
            stein_nonstein_pipeline(&g1, "N", 1, 1, &GenusLedger::new(), LedgerPolicy::DeclaredOnly),
            Err(ExoticaError::NotGoodHandlebody(_))
        ));
    }

    #[test]
    fn w_plus_example() {
        let x = boundary_sum(&gompf_nucleus(2).unwrap(), &knot_handle("u", StandardKnot::Trefoil, 3));
        let f = w_plus_exotica_pipeline(&x, "N", 2, &GenusLedger::new(), LedgerPolicy::DeclaredOnly).unwrap();
        assert_eq!(f.modifications.len(), 1);
        assert_eq!((f.modifications[0].0.as_str(), f.modifications[0].1), ("u", 3));
        assert_eq!(f.x1.stein, Some(true));
        assert!(f.ledgers_equal);
        assert_eq!(f.x0.homology, f.x1.homology);
        assert!(check_certificate(&f.certificate).accepted());

        let g = gompf_nucleus(2).unwrap();
        let f = w_plus_exotica_pipeline(&g, "N", 2, &GenusLedger::new(), LedgerPolicy::DeclaredOnly).unwrap();
        assert!(f.modifications.is_empty());
        assert_eq!(f.x1.manifold, g);
        assert_eq!(f.x0.manifold, g);
    }
}
