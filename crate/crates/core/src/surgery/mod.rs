//! Rewrites of handlebodies: log transforms and knot surgery along a marked
//! nucleus, W±(p)-modifications and cork twists, cork stripping, and handle
//! slides. Every rewrite is pure and can be recorded as an [`Op`] for replay.

use std::collections::BTreeSet;

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::handlebody::{
    add_classes, Class, CorkSign, Handlebody, HandlebodyError, KnotSurgeryTag, MarkerOrigin, NucleusMarker,
    Pi1Status, TwoHandle, Word,
};
pub use crate::handlebody::CorkRecord;
use crate::intlat::Parity;
use crate::legendrian::{steinify, FrontDiagram, LegendrianData, LegendrianError};
use crate::swadj::{KnotSpec, LaurentPoly, SwError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SurgeryError {
    #[error(transparent)]
    Handlebody(#[from] HandlebodyError),
    #[error(transparent)]
    Legendrian(#[from] LegendrianError),
    #[error(transparent)]
    Knot(#[from] SwError),
    #[error("gcd({p}, d_T = {divisor}) ≠ 1")]
    GcdViolation { p: i64, divisor: i64 },
    #[error("invalid marker: {0}")]
    InvalidMarker(String),
    #[error("knot surgery needs d_T = 1, marker has d_T = {0}")]
    DivisorNotOne(i64),
    #[error("coefficient must be ≥ 1, got {0}")]
    BadCoefficient(i64),
    #[error("unknown cork {0}")]
    UnknownCork(String),
    #[error("cannot slide {0} over itself")]
    SelfSlide(String),
}

/// `p²s + d²(p − 1)`.
pub fn transformed_square(s: i64, divisor: i64, p: i64) -> i64 {
    p * p * s + divisor * divisor * (p - 1)
}

/// Parity of the transformed nucleus form: even iff `s` is even and `p` is
/// odd or `d_T` even.
pub fn transformed_parity(s: i64, divisor: i64, p: i64) -> Parity {
    if s.is_even() && (p.is_odd() || divisor.is_even()) {
        Parity::Even
    } else {
        Parity::Odd
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogTransformResult {
    pub manifold: Handlebody,
    pub marker: String,
    pub p: i64,
    /// `[T_p] = d_T · T̂_p`.
    pub class_tp: Class,
    /// `S'` with `S'·T̂_p = 1`.
    pub class_shat: Class,
    pub s: i64,
    pub s_prime: i64,
    pub parity: Parity,
    pub nucleus_marker: NucleusMarker,
}

fn marker_checked(x: &Handlebody, marker: &str) -> Result<NucleusMarker, SurgeryError> {
    x.validate()?;
    let m = x.marker(marker)?.clone();
    crate::handlebody::check_marker(x, marker, &m).map_err(|e| SurgeryError::InvalidMarker(e.to_string()))?;
    Ok(m)
}

/// The p-log transform along the marked torus.
///
/// The nucleus handles are replaced by an algebraic model of the transformed
/// nucleus: a 1-handle `x`, a 0-framed circle `Z` carrying `T̂_p`, an
/// `s`-framed `L₁` running over `x` `d_T` times and a `(p−1)`-framed `L₂`
/// running over `x` `−p` times, with `lk(Z,L₁)·p + lk(Z,L₂)·d_T = 1` and
/// `lk(L₁,L₂) = 0`. Then `S' = p·L₁ + d_T·L₂`. Only the algebraic linking is
/// modelled. The nucleus must be algebraically split from the other handles.
pub fn log_transform(x: &Handlebody, marker: &str, p: i64) -> Result<LogTransformResult, SurgeryError> {
    let m = marker_checked(x, marker)?;
    if p < 1 {
        return Err(SurgeryError::BadCoefficient(p));
    }
    let d = m.divisor;
    if p.gcd(&d) != 1 {
        return Err(SurgeryError::GcdViolation { p, divisor: d });
    }
    let s = x.pairing(&m.class_s, &m.class_s);
    if p == 1 {
        return Ok(LogTransformResult {
            manifold: x.clone(),
            marker: marker.to_string(),
            p,
            class_tp: m.class_t.clone(),
            class_shat: m.class_s.clone(),
            s,
            s_prime: s,
            parity: transformed_parity(s, d, 1),
            nucleus_marker: m,
        });
    }
    if x.knot_surgeries.iter().any(|t| t.marker == marker) {
        return Err(SurgeryError::InvalidMarker(format!("{marker} carries a symbolic knot surgery")));
    }
    for (other, om) in &x.markers {
        if other != marker && !om.handles.is_disjoint(&m.handles) {
            return Err(SurgeryError::InvalidMarker(format!("{marker} overlaps marker {other}")));
        }
    }
    for (name, h) in &x.two_handles {
        if m.handles.contains(name) {
            if let Some(k) = h.linking.keys().find(|k| !m.handles.contains(*k)) {
                return Err(SurgeryError::InvalidMarker(format!(
                    "nucleus handle {name} links {k} outside the nucleus"
                )));
            }
        } else if let Some(g) = h.attaching_word.generators().find(|g| m.one_handles.contains(*g)) {
            return Err(SurgeryError::InvalidMarker(format!("{name} runs over nucleus 1-handle {g}")));
        }
    }

    let mut out = x.clone();
    for name in &m.handles {
        out.two_handles.remove(name);
    }
    for g in &m.one_handles {
        out.one_handles.remove(g);
    }
    let gen = out.fresh_name(&format!("{marker}.x"));
    out.one_handles.insert(gen.clone());
    let z = out.fresh_name(&format!("{marker}.t"));
    out.two_handles.insert(z.clone(), TwoHandle::default());
    let l1 = out.fresh_name(&format!("{marker}.l1"));
    out.two_handles.insert(l1.clone(), TwoHandle { attaching_word: Word::power(&gen, d), framing: s, ..TwoHandle::default() });
    let l2 = out.fresh_name(&format!("{marker}.l2"));
    out.two_handles
        .insert(l2.clone(), TwoHandle { attaching_word: Word::power(&gen, -p), framing: p - 1, ..TwoHandle::default() });
    let (a1, a2) = bezout(p, d);
    out.set_linking(&z, &l1, a1);
    out.set_linking(&z, &l2, a2);

    for c in &mut out.cork_registry {
        if m.handles.contains(&c.target) {
            c.target = if m.torus_handles.contains(&c.target) { z.clone() } else { l1.clone() };
            c.target_front = None;
        }
    }

    let class_tp = Class::from([(z.clone(), d)]);
    let class_shat = Class::from([(l1.clone(), p), (l2.clone(), d)]);
    let new_marker = NucleusMarker {
        handles: BTreeSet::from([z.clone(), l1, l2]),
        one_handles: BTreeSet::from([gen]),
        torus_handles: vec![z.clone()],
        class_t: Class::from([(z, p * d)]),
        class_s: class_shat.clone(),
        divisor: p * d,
        pi1_status: Pi1Status::Proved,
        origin: MarkerOrigin::Derived,
    };
    out.markers.insert(marker.to_string(), new_marker.clone());
    out.validate()?;
    let s_prime = out.pairing(&class_shat, &class_shat);
    Ok(LogTransformResult {
        manifold: out,
        marker: marker.to_string(),
        p,
        class_tp,
        class_shat,
        s,
        s_prime,
        parity: if s_prime.is_even() { Parity::Even } else { Parity::Odd },
        nucleus_marker: new_marker,
    })
}

/// `(a, b)` with `p·a + d·b = 1`, preferring `(0, 1)` when `d = 1`.
fn bezout(p: i64, d: i64) -> (i64, i64) {
    if d == 1 {
        return (0, 1);
    }
    let e = p.extended_gcd(&d);
    debug_assert_eq!(e.gcd, 1);
    (e.x, e.y)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KnotSurgeryResult {
    pub manifold: Handlebody,
    pub knot: KnotSpec,
    pub alexander: LaurentPoly,
    /// `[T]` stays primitive after the surgery.
    pub class_t_primitive: bool,
}

/// Knot surgery along the marked torus, recorded symbolically: the handle
/// data is kept (homology and form are unchanged) and a tag is attached.
/// Legendrian data on the nucleus no longer describes the result and is
/// dropped. Surgery along the unknot returns `x` unchanged.
pub fn knot_surgery(x: &Handlebody, marker: &str, knot: &KnotSpec) -> Result<KnotSurgeryResult, SurgeryError> {
    let m = marker_checked(x, marker)?;
    if m.divisor != 1 {
        return Err(SurgeryError::DivisorNotOne(m.divisor));
    }
    let alexander = knot.alexander()?;
    let mut out = x.clone();
    if knot.seifert_matrix().rows() > 0 {
        for name in &m.handles {
            let h = out.handle_mut(name)?;
            h.legendrian = None;
            h.front = None;
        }
        out.knot_surgeries.push(KnotSurgeryTag { marker: marker.to_string(), knot: knot.clone() });
    }
    Ok(KnotSurgeryResult { manifold: out, knot: knot.clone(), alexander, class_t_primitive: true })
}

/// Legendrian data of the auxiliary handle for each sign.
pub fn auxiliary_legendrian(sign: CorkSign) -> LegendrianData {
    match sign {
        CorkSign::Plus => LegendrianData { tb: 2, r: 0 },
        CorkSign::Minus => LegendrianData { tb: 1, r: 1 },
    }
}

fn next_cork_id(x: &Handlebody) -> String {
    let max = x
        .cork_registry
        .iter()
        .filter_map(|c| c.id.strip_prefix('w').and_then(|n| n.parse::<u64>().ok()))
        .max()
        .unwrap_or(0);
    format!("w{}", max + 1)
}

/// W±(p)-modification of `handle`: adds a 1-handle and a 0-framed auxiliary
/// 2-handle going over it once. W⁺ raises the target's tb by `p`. The target
/// leaves S³, so its front moves into the record. `p = 0` is a no-op.
pub fn w_modify(x: &Handlebody, handle: &str, sign: CorkSign, p: i64) -> Result<Handlebody, SurgeryError> {
    if p < 0 {
        return Err(SurgeryError::BadCoefficient(p));
    }
    x.handle(handle)?;
    if p == 0 {
        return Ok(x.clone());
    }
    let mut out = x.clone();
    let id = next_cork_id(&out);
    let gen = out.fresh_name(&format!("{id}.x"));
    out.one_handles.insert(gen.clone());
    let aux = out.fresh_name(&format!("{id}.aux"));
    out.two_handles.insert(
        aux.clone(),
        TwoHandle {
            attaching_word: Word::power(&gen, 1),
            framing: 0,
            legendrian: Some(auxiliary_legendrian(sign)),
            ..TwoHandle::default()
        },
    );
    let target = out.handle_mut(handle)?;
    if let (CorkSign::Plus, Some(l)) = (sign, target.legendrian.as_mut()) {
        l.tb += p;
    }
    let target_front = target.front.take();
    out.cork_registry.push(CorkRecord {
        id,
        sign,
        p,
        target: handle.to_string(),
        auxiliary_handle: aux,
        one_handle: gen,
        target_front,
    });
    Ok(out)
}

fn cork_index(x: &Handlebody, id: &str) -> Result<usize, SurgeryError> {
    x.cork_registry.iter().position(|c| c.id == id).ok_or_else(|| SurgeryError::UnknownCork(id.to_string()))
}

/// Twists the cork of record `id`: W⁺ becomes W⁻ and back. The target's tb
/// moves by `∓p` and the auxiliary handle's (tb, r) by `(∓1, ±1)`.
pub fn cork_twist(x: &Handlebody, id: &str) -> Result<Handlebody, SurgeryError> {
    let i = cork_index(x, id)?;
    let mut out = x.clone();
    let rec = out.cork_registry[i].clone();
    let (tb_shift, aux_tb, aux_r) = match rec.sign {
        CorkSign::Plus => (-rec.p, -1, 1),
        CorkSign::Minus => (rec.p, 1, -1),
    };
    if let Some(l) = out.handle_mut(&rec.target)?.legendrian.as_mut() {
        l.tb += tb_shift;
    }
    let aux = out.handle_mut(&rec.auxiliary_handle)?;
    if let Some(l) = aux.legendrian.as_mut() {
        l.tb += aux_tb;
        l.r += aux_r;
    }
    aux.front = None;
    out.cork_registry[i].sign = rec.sign.flipped();
    Ok(out)
}

/// Removes the 1- and 2-handle of each listed record and undoes its tb
/// change on the target, restoring the target's front when it still fits.
pub fn strip_corks(x: &Handlebody, ids: &[String]) -> Result<Handlebody, SurgeryError> {
    let mut out = x.clone();
    for id in ids {
        let i = cork_index(&out, id)?;
        let rec = out.cork_registry.remove(i);
        out.two_handles.remove(&rec.auxiliary_handle);
        for h in out.two_handles.values_mut() {
            h.linking.remove(&rec.auxiliary_handle);
        }
        if let Some((name, _)) =
            out.two_handles.iter().find(|(_, h)| h.attaching_word.generators().any(|g| g == rec.one_handle))
        {
            return Err(HandlebodyError::MalformedDiagram(format!(
                "{name} runs over 1-handle {} of cork {id}",
                rec.one_handle
            ))
            .into());
        }
        out.one_handles.remove(&rec.one_handle);
        let target = out.handle_mut(&rec.target)?;
        if let (CorkSign::Plus, Some(l)) = (rec.sign, target.legendrian.as_mut()) {
            l.tb -= rec.p;
        }
        if let Some(front) = rec.target_front {
            if target.front.is_none() && front.invariants().ok() == target.legendrian {
                target.front = Some(front);
            }
        }
    }
    Ok(out)
}

/// Slides `from` over `over` (`sign = ±1`): the new `from` represents
/// `[from] + sign·[over]`. Framing, linking and word follow the slide
/// formulas; marker classes are rewritten in the new basis. The slid handle
/// loses its Legendrian data, front and declared genus.
pub fn slide(x: &Handlebody, from: &str, over: &str, sign: i64) -> Result<Handlebody, SurgeryError> {
    if from == over {
        return Err(SurgeryError::SelfSlide(from.to_string()));
    }
    if sign != 1 && sign != -1 {
        return Err(HandlebodyError::BadParameter(format!("slide sign must be ±1, got {sign}")).into());
    }
    x.handle(from)?;
    x.handle(over)?;
    for c in &x.cork_registry {
        if c.auxiliary_handle == from || c.auxiliary_handle == over {
            return Err(HandlebodyError::BadParameter(format!("{} is the auxiliary handle of cork {}", c.auxiliary_handle, c.id)).into());
        }
    }
    for (name, m) in &x.markers {
        if m.handles.contains(from) && !m.handles.contains(over) {
            return Err(SurgeryError::InvalidMarker(format!("{name}: {from} would slide over {over} outside the nucleus")));
        }
    }
    let mut out = x.clone();
    let f_from = x.linking(from, from);
    let f_over = x.linking(over, over);
    let lk = x.linking(from, over);
    let others: Vec<String> = x.two_handles.keys().filter(|k| *k != from && *k != over).cloned().collect();
    for k in &others {
        let v = x.linking(from, k) + sign * x.linking(over, k);
        out.set_linking(from, k, v);
    }
    out.set_linking(from, over, lk + sign * f_over);
    let over_word = x.handle(over)?.attaching_word.clone();
    let h = out.handle_mut(from)?;
    h.framing = f_from + f_over + 2 * sign * lk;
    h.attaching_word = h.attaching_word.concat(&if sign > 0 { over_word } else { over_word.inverse() });
    h.legendrian = None;
    h.front = None;
    h.seifert_genus = None;
    for m in out.markers.values_mut() {
        for class in [&mut m.class_t, &mut m.class_s] {
            if let Some(&c) = class.get(from) {
                *class = add_classes(class, &Class::from([(over.to_string(), -sign * c)]));
            }
        }
    }
    Ok(out)
}

/// One recorded rewrite.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Op {
    LogTransform { marker: String, p: i64 },
    KnotSurgery { marker: String, knot: KnotSpec },
    WModify { handle: String, sign: CorkSign, p: i64 },
    CorkTwist { id: String },
    StripCorks { ids: Vec<String> },
    Slide { from: String, over: String, sign: i64 },
    Steinify,
    /// Overwrites a handle's Legendrian data and front.
    SetLegendrian {
        handle: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        legendrian: Option<LegendrianData>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        front: Option<FrontDiagram>,
    },
}

pub fn apply(x: &Handlebody, op: &Op) -> Result<Handlebody, SurgeryError> {
    match op {
        Op::LogTransform { marker, p } => Ok(log_transform(x, marker, *p)?.manifold),
        Op::KnotSurgery { marker, knot } => Ok(knot_surgery(x, marker, knot)?.manifold),
        Op::WModify { handle, sign, p } => w_modify(x, handle, *sign, *p),
        Op::CorkTwist { id } => cork_twist(x, id),
        Op::StripCorks { ids } => strip_corks(x, ids),
        Op::Slide { from, over, sign } => slide(x, from, over, *sign),
        Op::Steinify => Ok(steinify(x)?),
        Op::SetLegendrian { handle, legendrian, front } => {
            let mut out = x.clone();
            let h = out.handle_mut(handle)?;
            h.legendrian = *legendrian;
            h.front = front.clone();
            out.validate()?;
            Ok(out)
        }
    }
}

pub fn replay(x: &Handlebody, ops: &[Op]) -> Result<Handlebody, SurgeryError> {
    ops.iter().try_fold(x.clone(), |acc, op| apply(&acc, op))
}
