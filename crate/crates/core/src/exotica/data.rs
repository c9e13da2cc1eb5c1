use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{Assumption, AssumptionStatus, ExoticaError};
use crate::handlebody::{intersection_form, verify_nucleus, Class, ConditionStatus, Handlebody};
use crate::intlat::IntMatrix;
use crate::swadj::{BasicClassSet, KnotSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    /// Pushed-in Seifert surface of a declared Seifert genus.
    SeifertGenus,
    Declared,
    /// Supplied by a registered [`GenusBoundProvider`].
    DerivedPolicy,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GenusEntry {
    pub bound: i64,
    pub provenance: Provenance,
}

/// Upper bounds for the genus of named classes. Keys are `S`, `u1`, `u2`, …
/// for the data set, `S_p` for log transforms and `S_K[label]` for knot
/// surgeries.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GenusLedger {
    pub entries: BTreeMap<String, GenusEntry>,
}

impl GenusLedger {
    pub fn new() -> Self {
        Self::default()
    }

    /// A ledger of declared values.
    pub fn declared(values: impl IntoIterator<Item = (String, i64)>) -> Result<Self, ExoticaError> {
        let mut out = GenusLedger::new();
        for (k, v) in values {
            out.insert(&k, v, Provenance::Declared)?;
        }
        Ok(out)
    }

    /// Parses either `{"S_5": 5}` or `{"S_5": {"bound": 5, "provenance": "declared"}}`.
    pub fn from_json(text: &str) -> Result<Self, ExoticaError> {
        let v: serde_json::Value =
            serde_json::from_str(text).map_err(|e| ExoticaError::MalformedLedger(e.to_string()))?;
        let obj = v.as_object().ok_or_else(|| ExoticaError::MalformedLedger("expected a JSON object".into()))?;
        let mut out = GenusLedger::new();
        for (k, e) in obj {
            let entry = match e.as_i64() {
                Some(b) => GenusEntry { bound: b, provenance: Provenance::Declared },
                None => serde_json::from_value(e.clone()).map_err(|err| ExoticaError::MalformedLedger(format!("{k}: {err}")))?,
            };
            out.insert(k, entry.bound, entry.provenance)?;
        }
        Ok(out)
    }

    pub fn insert(&mut self, key: &str, bound: i64, provenance: Provenance) -> Result<(), ExoticaError> {
        if bound < 0 {
            return Err(ExoticaError::MalformedLedger(format!("{key}: negative genus bound {bound}")));
        }
        self.entries.insert(key.to_string(), GenusEntry { bound, provenance });
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<GenusEntry> {
        self.entries.get(key).copied()
    }
}

pub fn log_key(p: i64) -> String {
    if p == 1 {
        "S".into()
    } else {
        format!("S_{p}")
    }
}

pub fn knot_key(knot: &KnotSpec) -> String {
    if knot.seifert_matrix().rows() == 0 {
        "S".into()
    } else {
        format!("S_K[{}]", knot.label())
    }
}

/// Source of genus bounds for classes the ledger lacks. Values are upper
/// bounds on the minimal genus; returning `None` declines.
pub trait GenusBoundProvider {
    fn bound(&self, key: &str) -> Option<i64>;
}

/// Where sequence generation finds `g(S_p)` and `g(S_K)`.
#[derive(Clone, Copy, Default)]
pub enum LedgerPolicy<'a> {
    /// Only explicit ledger entries.
    #[default]
    DeclaredOnly,
    /// Ledger entries first, then the provider.
    Provider(&'a dyn GenusBoundProvider),
}

/// `max{g, 1}` for classes of negative square.
pub fn effective_genus(bound: i64, square: i64) -> i64 {
    if square < 0 {
        bound.max(1)
    } else {
        bound
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplementClass {
    pub label: String,
    pub class: Class,
    pub square: i64,
    pub genus: GenusEntry,
}

/// The data a family construction needs from `X` and its marked nucleus.
/// Coordinates are in the basis `(S, T̂, u₁, …, u_k)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DataSet {
    pub marker: String,
    pub divisor: i64,
    pub class_s: Class,
    pub class_t_hat: Class,
    pub s_square: i64,
    /// `g(S)`, after the `max{·, 1}` rule.
    pub s_genus: GenusEntry,
    pub complement: Vec<ComplementClass>,
    pub complement_form: IntMatrix,
    pub basics: BasicClassSet,
    pub simple_type: bool,
    pub assumptions: Vec<Assumption>,
}

impl DataSet {
    pub fn k(&self) -> usize {
        self.complement.len()
    }

    pub fn rank(&self) -> usize {
        self.k() + 2
    }

    /// Whether condition (v) applies: even nucleus form and odd divisor.
    pub fn parity_constrained(&self) -> bool {
        self.s_square % 2 == 0 && self.divisor % 2 != 0
    }

    /// Intersection matrix in the basis `(S, T̂, u₁, …, u_k)`.
    pub fn form(&self) -> IntMatrix {
        IntMatrix::from_rows(&[[self.s_square, 1], [1, 0]]).direct_sum(&self.complement_form)
    }

    /// `⟨PD[T], ·⟩` on the basis.
    pub fn torus_dual(&self) -> Vec<i64> {
        let mut v = vec![0; self.rank()];
        v[0] = self.divisor;
        v
    }
}

/// Extracts the data set of `x` along `marker`. Genus bounds for `S` and the
/// complement basis come from declared Seifert genera of single-handle
/// classes, else from `declared` under keys `S` and `u1`, `u2`, ….
/// `basics` defaults to the single class 0 of a simple-type ambient.
pub fn build_data_set(
    x: &Handlebody,
    marker: &str,
    basics: Option<&BasicClassSet>,
    simple_type: bool,
    declared: &GenusLedger,
) -> Result<DataSet, ExoticaError> {
    let report = verify_nucleus(x, marker)?;
    let failed: Vec<String> = report
        .conditions
        .iter()
        .filter(|c| c.status == ConditionStatus::Failed)
        .map(|c| format!("({}) {}", c.id, c.detail))
        .collect();
    if !failed.is_empty() {
        return Err(ExoticaError::NucleusFailed(failed.join("; ")));
    }
    let m = x.marker(marker)?;
    let d = m.divisor;
    let class_t_hat: Class = m.class_t.iter().map(|(k, v)| (k.clone(), v / d)).collect();
    let s_square = x.pairing(&m.class_s, &m.class_s);

    let outside_two: BTreeSet<String> = x.two_handles.keys().filter(|k| !m.handles.contains(*k)).cloned().collect();
    let outside_one: BTreeSet<String> = x.one_handles.difference(&m.one_handles).cloned().collect();
    for name in &m.handles {
        if let Some(k) = x.handle(name)?.linking.keys().find(|k| outside_two.contains(*k)) {
            return Err(ExoticaError::NotSplit(format!("nucleus handle {name} links {k}")));
        }
    }
    let complement_x = x.restrict(&outside_two, &outside_one).map_err(|e| ExoticaError::NotSplit(e.to_string()))?;
    let (classes, _) = intersection_form(&complement_x);

    let genus_of = |class: &Class, key: &str, square: i64| -> Result<GenusEntry, ExoticaError> {
        let seifert = match class.iter().collect::<Vec<_>>().as_slice() {
            [(h, c)] if c.abs() == 1 => x.handle(h)?.seifert_genus,
            _ => None,
        };
        let raw = match (seifert, declared.get(key)) {
            (Some(g), _) => GenusEntry { bound: g as i64, provenance: Provenance::SeifertGenus },
            (None, Some(e)) => e,
            (None, None) => return Err(ExoticaError::MissingGenusData(key.to_string())),
        };
        Ok(GenusEntry { bound: effective_genus(raw.bound, square), provenance: raw.provenance })
    };

    let s_genus = genus_of(&m.class_s, "S", s_square)?;
    let mut complement = Vec::new();
    for (i, class) in classes.into_iter().enumerate() {
        // Prefer +h over −h for single-handle classes.
        let class: Class = if class.len() == 1 && class.values().all(|v| *v < 0) {
            class.into_iter().map(|(k, v)| (k, -v)).collect()
        } else {
            class
        };
        let label = format!("u{}", i + 1);
        let square = x.pairing(&class, &class);
        let genus = genus_of(&class, &label, square)?;
        complement.push(ComplementClass { label, class, square, genus });
    }
    let complement_form = {
        let k = complement.len();
        let mut q = IntMatrix::zeros(k, k);
        for i in 0..k {
            for j in 0..k {
                q.set(i, j, x.pairing(&complement[i].class, &complement[j].class).into());
            }
        }
        q
    };

    let rank = complement.len() + 2;
    let basics = match basics {
        Some(b) if b.rank != rank => {
            return Err(ExoticaError::BadParameter(format!("basic classes of rank {} for a basis of rank {rank}", b.rank)))
        }
        Some(b) => b.clone(),
        None => BasicClassSet::single(vec![0; rank]),
    };

    let mut assumptions: Vec<Assumption> = report
        .conditions
        .iter()
        .map(|c| Assumption {
            id: format!("nucleus.{}", c.id),
            statement: c.detail.clone(),
            status: match c.status {
                ConditionStatus::Proved => AssumptionStatus::Proved,
                ConditionStatus::Assumed => AssumptionStatus::Assumed,
                ConditionStatus::Unknown => AssumptionStatus::Unknown,
                ConditionStatus::Failed => AssumptionStatus::Failed,
            },
        })
        .collect();
    assumptions.push(Assumption {
        id: "basic-classes".into(),
        statement: format!(
            "ambient basic classes {} declared{}",
            serde_json::to_string(&basics).expect("serialisable"),
            if simple_type { ", simple type" } else { "" }
        ),
        status: AssumptionStatus::Assumed,
    });

    Ok(DataSet {
        marker: marker.to_string(),
        divisor: d,
        class_s: m.class_s.clone(),
        class_t_hat,
        s_square,
        s_genus,
        complement,
        complement_form,
        basics,
        simple_type,
        assumptions,
    })
}
