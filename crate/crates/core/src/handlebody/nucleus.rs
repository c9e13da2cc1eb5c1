use std::fmt;

use serde::{Deserialize, Serialize};

use super::{
    default_tietze_budget, homology, pi1_presentation, simplify_presentation, Handlebody,
    HandlebodyError, HomologyReport, MarkerOrigin, NucleusMarker, Pi1Verdict,
};
use crate::intlat::content;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditionStatus {
    Proved,
    Assumed,
    Unknown,
    Failed,
}

impl fmt::Display for ConditionStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ConditionStatus::Proved => "proved",
            ConditionStatus::Assumed => "assumed",
            ConditionStatus::Unknown => "unknown",
            ConditionStatus::Failed => "failed",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub id: String,
    pub status: ConditionStatus,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NucleusReport {
    pub marker: String,
    pub divisor: i64,
    pub pi1: Pi1Verdict,
    pub homology: HomologyReport,
    pub conditions: Vec<ConditionReport>,
}

impl NucleusReport {
    /// No condition failed (some may rest on assumptions).
    pub fn is_nucleus(&self) -> bool {
        self.conditions.iter().all(|c| c.status != ConditionStatus::Failed)
    }

    pub fn all_proved(&self) -> bool {
        self.conditions.iter().all(|c| c.status == ConditionStatus::Proved)
    }

    pub fn status(&self, id: &str) -> Option<ConditionStatus> {
        self.conditions.iter().find(|c| c.id == id).map(|c| c.status)
    }
}

/// Checks that the marker's classes are cycles of the nucleus with
/// `T̂ = class_T / d_T`, `d_T` the content of `class_T`, and `S·T̂ = 1`.
pub fn check_marker(x: &Handlebody, name: &str, m: &NucleusMarker) -> Result<(), HandlebodyError> {
    let bad = |msg: String| Err(HandlebodyError::InconsistentMarker(format!("{name}: {msg}")));
    for h in m.class_t.keys().chain(m.class_s.keys()).chain(&m.torus_handles) {
        if !m.handles.contains(h) || !x.two_handles.contains_key(h) {
            return bad(format!("{h} is not a 2-handle of the nucleus"));
        }
    }
    if !x.is_cycle(&m.class_t) || !x.is_cycle(&m.class_s) {
        return bad("marked classes are not cycles".into());
    }
    let coeffs: Vec<i64> = m.class_t.values().copied().collect();
    let d = content(&coeffs);
    if d == 0 {
        return bad("class_T is zero".into());
    }
    if d != m.divisor {
        return bad(format!("divisor {} but class_T has content {d}", m.divisor));
    }
    let t_hat = m.class_t.iter().map(|(k, v)| (k.clone(), v / d)).collect();
    let st = x.pairing(&m.class_s, &t_hat);
    if st != 1 {
        return bad(format!("S·T̂ = {st}, expected 1"));
    }
    Ok(())
}

pub fn verify_nucleus(x: &Handlebody, marker: &str) -> Result<NucleusReport, HandlebodyError> {
    verify_nucleus_with_budget(x, marker, default_tietze_budget())
}

pub fn verify_nucleus_with_budget(
    x: &Handlebody,
    marker: &str,
    budget: usize,
) -> Result<NucleusReport, HandlebodyError> {
    x.validate()?;
    let m = x.marker(marker)?;
    check_marker(x, marker, m)?;
    let n = x.restrict(&m.handles, &m.one_handles)?;
    let h = homology(&n)?;
    let pi1 = simplify_presentation(&pi1_presentation(&n), budget);

    let mut conditions = Vec::new();
    let mut push = |id: &str, status: ConditionStatus, detail: String| {
        conditions.push(ConditionReport { id: id.to_string(), status, detail });
    };

    let (status, detail) = match pi1 {
        Pi1Verdict::Trivial => (ConditionStatus::Proved, "presentation reduces to the empty one".to_string()),
        Pi1Verdict::NontrivialAbelianization => (ConditionStatus::Failed, format!("H1 = {}", h.h1)),
        Pi1Verdict::Unknown => (ConditionStatus::Unknown, format!("not simplified within {budget} steps")),
    };
    push("i", status, detail);

    let ok = h.h2_free_rank == 2 && h.form.unimodular && h.boundary_h1.is_trivial();
    push(
        "ii",
        if ok { ConditionStatus::Proved } else { ConditionStatus::Failed },
        format!("H2 rank {}, form {}, boundary H1 = {}", h.h2_free_rank, h.form, h.boundary_h1),
    );

    let t_square = x.pairing(&m.class_t, &m.class_t);
    let ok = !m.torus_handles.is_empty() && t_square == 0;
    push(
        "iii",
        if ok { ConditionStatus::Proved } else { ConditionStatus::Failed },
        format!("cusp handles [{}], T·T = {t_square}", m.torus_handles.join(", ")),
    );

    push("iv", ConditionStatus::Proved, format!("d_T = {} is the content of class_T", m.divisor));

    let (status, detail) = match m.origin {
        MarkerOrigin::BuiltIn => (ConditionStatus::Proved, "built-in construction".to_string()),
        MarkerOrigin::Derived => (
            ConditionStatus::Assumed,
            "relaxed: simple connectivity of the transformed nucleus is checked directly".to_string(),
        ),
        MarkerOrigin::Declared => (ConditionStatus::Unknown, "not machine-checkable for declared diagrams".to_string()),
    };
    push("v", status, detail);

    Ok(NucleusReport { marker: marker.to_string(), divisor: m.divisor, pi1, homology: h, conditions })
}
