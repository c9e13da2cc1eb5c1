//! Combinatorial Kirby data for 4-dimensional 2-handlebodies.
//!
//! A [`Handlebody`] is one 0-handle plus named 1-handles (dotted circles) and
//! named framed 2-handles. Each 2-handle stores its attaching word in the
//! free group on the 1-handles, its framing, and its algebraic linking with
//! the other 2-handles. Linking data is trusted: geometric realisability of
//! the declared numbers is not checked.
//!
//! Second homology classes are chains in the 2-handles, written as sparse
//! maps from handle name to coefficient. A chain is a cycle when its
//! weighted run-over vector vanishes.

mod build;
mod homology;
mod manifest;
mod nucleus;
mod pi1;
mod word;

pub use build::{boundary_sum, cusp_neighborhood, gompf_nucleus, knot_handle, StandardKnot};
pub use homology::{boundary_presentation, homology, intersection_form, run_over_matrix, HomologyReport};
pub use manifest::{canonical_json, content_hash, MANIFEST_SCHEMA};
pub use nucleus::{check_marker, verify_nucleus, verify_nucleus_with_budget, ConditionReport, ConditionStatus, NucleusReport};
pub use pi1::{default_tietze_budget, DEFAULT_TIETZE_BUDGET, pi1_presentation, simplify_presentation, Pi1Verdict, Presentation};
pub use word::{Letter, Word};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::legendrian::{FrontDiagram, LegendrianData};
use crate::swadj::KnotSpec;

/// Sparse integer chain on the 2-handles.
pub type Class = BTreeMap<String, i64>;

pub fn unit_class(handle: &str) -> Class {
    Class::from([(handle.to_string(), 1)])
}

/// Drops zero coefficients.
pub fn normalize_class(c: &Class) -> Class {
    c.iter().filter(|(_, v)| **v != 0).map(|(k, v)| (k.clone(), *v)).collect()
}

pub fn scale_class(c: &Class, k: i64) -> Class {
    normalize_class(&c.iter().map(|(n, v)| (n.clone(), v * k)).collect())
}

pub fn add_classes(a: &Class, b: &Class) -> Class {
    let mut out = a.clone();
    for (n, v) in b {
        *out.entry(n.clone()).or_insert(0) += v;
    }
    normalize_class(&out)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HandlebodyError {
    #[error("malformed diagram: {0}")]
    MalformedDiagram(String),
    #[error("unknown handle {0}")]
    UnknownHandle(String),
    #[error("unknown nucleus marker {0}")]
    UnknownMarker(String),
    #[error("inconsistent nucleus marker: {0}")]
    InconsistentMarker(String),
    #[error("bad parameter: {0}")]
    BadParameter(String),
    #[error("manifest error: {0}")]
    Manifest(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TwoHandle {
    pub attaching_word: Word,
    /// Seifert framing.
    pub framing: i64,
    /// Non-zero algebraic linking numbers with other 2-handles.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub linking: BTreeMap<String, i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub legendrian: Option<LegendrianData>,
    /// Front of the attaching knot; only for handles not running over 1-handles.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub front: Option<FrontDiagram>,
    /// Genus of a declared surface bounded by the attaching circle.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seifert_genus: Option<u32>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pi1Status {
    Proved,
    Assumed,
    Unknown,
}

/// Where a nucleus marker came from; decides how the peripheral π₁
/// condition is reported.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MarkerOrigin {
    BuiltIn,
    Derived,
    Declared,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NucleusMarker {
    /// 2-handles of the nucleus sub-handlebody.
    pub handles: BTreeSet<String>,
    /// 1-handles of the nucleus sub-handlebody.
    #[serde(default, skip_serializing_if = "BTreeSet::is_empty")]
    pub one_handles: BTreeSet<String>,
    /// 2-handles carrying the cusp fibre.
    pub torus_handles: Vec<String>,
    pub class_t: Class,
    pub class_s: Class,
    pub divisor: i64,
    pub pi1_status: Pi1Status,
    pub origin: MarkerOrigin,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CorkSign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl CorkSign {
    pub fn flipped(self) -> CorkSign {
        match self {
            CorkSign::Plus => CorkSign::Minus,
            CorkSign::Minus => CorkSign::Plus,
        }
    }
}

impl fmt::Display for CorkSign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CorkSign::Plus => "+",
            CorkSign::Minus => "-",
        })
    }
}

/// A W±(p)-modification of `target`: the added 1-handle and the 0-framed
/// auxiliary 2-handle running over it once algebraically.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorkRecord {
    pub id: String,
    pub sign: CorkSign,
    pub p: i64,
    pub target: String,
    pub auxiliary_handle: String,
    pub one_handle: String,
    /// Front the target carried before the modification, restored on stripping.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_front: Option<FrontDiagram>,
}

/// Symbolic knot surgery along the torus of a marked nucleus.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KnotSurgeryTag {
    pub marker: String,
    pub knot: KnotSpec,
}

#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Handlebody {
    #[serde(default)]
    pub one_handles: BTreeSet<String>,
    #[serde(default)]
    pub two_handles: BTreeMap<String, TwoHandle>,
    #[serde(default)]
    pub markers: BTreeMap<String, NucleusMarker>,
    #[serde(default)]
    pub cork_registry: Vec<CorkRecord>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub knot_surgeries: Vec<KnotSurgeryTag>,
}

impl Handlebody {
    pub fn handle(&self, name: &str) -> Result<&TwoHandle, HandlebodyError> {
        self.two_handles.get(name).ok_or_else(|| HandlebodyError::UnknownHandle(name.to_string()))
    }

    pub fn handle_mut(&mut self, name: &str) -> Result<&mut TwoHandle, HandlebodyError> {
        self.two_handles.get_mut(name).ok_or_else(|| HandlebodyError::UnknownHandle(name.to_string()))
    }

    pub fn marker(&self, name: &str) -> Result<&NucleusMarker, HandlebodyError> {
        self.markers.get(name).ok_or_else(|| HandlebodyError::UnknownMarker(name.to_string()))
    }

    /// The marker name when exactly one marker is present.
    pub fn sole_marker(&self) -> Result<&str, HandlebodyError> {
        let mut names = self.markers.keys();
        match (names.next(), names.next()) {
            (Some(n), None) => Ok(n),
            (None, _) => Err(HandlebodyError::UnknownMarker("(none present)".into())),
            _ => Err(HandlebodyError::UnknownMarker("(several present; name one)".into())),
        }
    }

    /// Framing on the diagonal, linking off it.
    pub fn linking(&self, a: &str, b: &str) -> i64 {
        if a == b {
            return self.two_handles.get(a).map_or(0, |h| h.framing);
        }
        self.two_handles.get(a).and_then(|h| h.linking.get(b)).copied().unwrap_or(0)
    }

    /// Sets `lk(a, b)` on both handles; `a ≠ b`.
    pub fn set_linking(&mut self, a: &str, b: &str, value: i64) {
        assert_ne!(a, b, "use the framing for self-linking");
        for (x, y) in [(a, b), (b, a)] {
            let h = self.two_handles.get_mut(x).expect("handle exists");
            if value == 0 {
                h.linking.remove(y);
            } else {
                h.linking.insert(y.to_string(), value);
            }
        }
    }

    pub fn run_over(&self, handle: &str) -> BTreeMap<String, i64> {
        self.two_handles.get(handle).map(|h| h.attaching_word.abelianization()).unwrap_or_default()
    }

    /// Intersection pairing of two chains.
    pub fn pairing(&self, a: &Class, b: &Class) -> i64 {
        let mut acc = 0i64;
        for (x, cx) in a {
            for (y, cy) in b {
                acc += cx * cy * self.linking(x, y);
            }
        }
        acc
    }

    /// Boundary of a chain in the 1-handle chain group.
    pub fn boundary_of(&self, c: &Class) -> BTreeMap<String, i64> {
        let mut out: BTreeMap<String, i64> = BTreeMap::new();
        for (h, k) in c {
            for (g, e) in self.run_over(h) {
                *out.entry(g).or_insert(0) += k * e;
            }
        }
        out.retain(|_, v| *v != 0);
        out
    }

    pub fn is_cycle(&self, c: &Class) -> bool {
        self.boundary_of(c).is_empty()
    }

    /// A name not yet used by any handle, built from `base`.
    pub fn fresh_name(&self, base: &str) -> String {
        let taken = |n: &str| self.two_handles.contains_key(n) || self.one_handles.contains(n);
        if !taken(base) {
            return base.to_string();
        }
        (2..).map(|k| format!("{base}#{k}")).find(|n| !taken(n)).expect("unbounded search")
    }

    /// Checks the structural invariants.
    pub fn validate(&self) -> Result<(), HandlebodyError> {
        let bad = |m: String| Err(HandlebodyError::MalformedDiagram(m));
        for n in &self.one_handles {
            if self.two_handles.contains_key(n) {
                return bad(format!("name {n} used by a 1-handle and a 2-handle"));
            }
        }
        for (name, h) in &self.two_handles {
            for g in h.attaching_word.generators() {
                if !self.one_handles.contains(g) {
                    return bad(format!("handle {name} runs over unknown 1-handle {g}"));
                }
            }
            for (other, v) in &h.linking {
                if other == name {
                    return bad(format!("handle {name} lists itself in its linking data"));
                }
                let Some(oh) = self.two_handles.get(other) else {
                    return bad(format!("handle {name} links unknown handle {other}"));
                };
                if oh.linking.get(name) != Some(v) || *v == 0 {
                    return bad(format!("linking between {name} and {other} is not symmetric"));
                }
            }
            if h.front.is_some() && !h.attaching_word.is_empty() {
                return bad(format!("handle {name} has a front but runs over 1-handles"));
            }
            if let (Some(front), Some(data)) = (&h.front, h.legendrian) {
                let computed = front
                    .invariants()
                    .map_err(|e| HandlebodyError::MalformedDiagram(format!("handle {name}: {e}")))?;
                if computed != data {
                    return bad(format!("handle {name}: front gives {computed} but {data} is declared"));
                }
            }
            if h.front.is_some() && h.legendrian.is_none() {
                return bad(format!("handle {name} has a front but no Legendrian data"));
            }
        }
        for (mname, m) in &self.markers {
            for h in m.handles.iter().chain(&m.torus_handles).chain(m.class_t.keys()).chain(m.class_s.keys()) {
                if !m.handles.contains(h) || !self.two_handles.contains_key(h) {
                    return bad(format!("marker {mname} references {h} outside its nucleus"));
                }
            }
            for g in &m.one_handles {
                if !self.one_handles.contains(g) {
                    return bad(format!("marker {mname} references unknown 1-handle {g}"));
                }
            }
        }
        let mut ids = BTreeSet::new();
        for c in &self.cork_registry {
            if !ids.insert(&c.id) {
                return bad(format!("duplicate cork id {}", c.id));
            }
            if c.p < 1 {
                return bad(format!("cork {} has coefficient {}", c.id, c.p));
            }
            for h in [&c.target, &c.auxiliary_handle] {
                if !self.two_handles.contains_key(h) {
                    return bad(format!("cork {} references unknown handle {h}", c.id));
                }
            }
            if !self.one_handles.contains(&c.one_handle) {
                return bad(format!("cork {} references unknown 1-handle {}", c.id, c.one_handle));
            }
            if self.two_handles[&c.auxiliary_handle].framing != 0 {
                return bad(format!("auxiliary handle of cork {} is not 0-framed", c.id));
            }
        }
        for t in &self.knot_surgeries {
            if !self.markers.contains_key(&t.marker) {
                return bad(format!("knot surgery references unknown marker {}", t.marker));
            }
        }
        Ok(())
    }

    /// The sub-handlebody spanned by the given handles. Linking with handles
    /// outside the set is dropped; markers and corks are not carried.
    pub fn restrict(&self, two: &BTreeSet<String>, one: &BTreeSet<String>) -> Result<Handlebody, HandlebodyError> {
        let mut out = Handlebody { one_handles: one.clone(), ..Handlebody::default() };
        for name in two {
            let mut h = self.handle(name)?.clone();
            h.linking.retain(|k, _| two.contains(k));
            if let Some(g) = h.attaching_word.generators().find(|g| !one.contains(*g)) {
                return Err(HandlebodyError::MalformedDiagram(format!(
                    "handle {name} runs over 1-handle {g} outside the sub-handlebody"
                )));
            }
            out.two_handles.insert(name.clone(), h);
        }
        Ok(out)
    }

    pub fn rename_two_handle(&mut self, from: &str, to: &str) {
        if from == to {
            return;
        }
        let Some(h) = self.two_handles.remove(from) else { return };
        self.two_handles.insert(to.to_string(), h);
        for h in self.two_handles.values_mut() {
            if let Some(v) = h.linking.remove(from) {
                h.linking.insert(to.to_string(), v);
            }
        }
        let rename_class = |c: &mut Class| {
            if let Some(v) = c.remove(from) {
                c.insert(to.to_string(), v);
            }
        };
        for m in self.markers.values_mut() {
            if m.handles.remove(from) {
                m.handles.insert(to.to_string());
            }
            for t in &mut m.torus_handles {
                if t == from {
                    *t = to.to_string();
                }
            }
            rename_class(&mut m.class_t);
            rename_class(&mut m.class_s);
        }
        for c in &mut self.cork_registry {
            for h in [&mut c.target, &mut c.auxiliary_handle] {
                if h == from {
                    *h = to.to_string();
                }
            }
        }
    }

    pub fn rename_one_handle(&mut self, from: &str, to: &str) {
        if from == to || !self.one_handles.remove(from) {
            return;
        }
        self.one_handles.insert(to.to_string());
        for h in self.two_handles.values_mut() {
            h.attaching_word = h.attaching_word.rename(from, to);
        }
        for m in self.markers.values_mut() {
            if m.one_handles.remove(from) {
                m.one_handles.insert(to.to_string());
            }
        }
        for c in &mut self.cork_registry {
            if c.one_handle == from {
                c.one_handle = to.to_string();
            }
        }
    }
}
