//! Legendrian attributes of 2-handles, zig-zags and the Stein framing
//! condition `framing = tb − 1`.

mod front;

pub use front::{CuspDir, FrontDiagram, FrontEvent};

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::handlebody::{Handlebody, TwoHandle};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LegendrianData {
    pub tb: i64,
    pub r: i64,
}

impl fmt::Display for LegendrianData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(tb {}, r {})", self.tb, self.r)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZigZag {
    Up,
    Down,
}

impl ZigZag {
    pub fn rotation_shift(self) -> i64 {
        match self {
            ZigZag::Up => 1,
            ZigZag::Down => -1,
        }
    }

    /// The k-th zig-zag (0-based) under the alternating policy starting `Down`.
    pub fn alternating(k: usize) -> ZigZag {
        if k.is_multiple_of(2) {
            ZigZag::Down
        } else {
            ZigZag::Up
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LegendrianError {
    #[error("front is not closed: {0}")]
    OpenFront(String),
    #[error("front has more than one component ({0} cusps off the first one)")]
    MultiComponent(usize),
    #[error("front labels are inconsistent: {0}")]
    InconsistentFront(String),
    #[error("front parse error: {0}")]
    Parse(String),
    #[error("handle {0} carries no Legendrian data")]
    NoLegendrianData(String),
    #[error("handles without Legendrian data: {}", .0.join(", "))]
    MissingLegendrianData(Vec<String>),
    #[error("framing exceeds tb − 1: {}", .0.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("; "))]
    FramingTooHigh(Vec<FramingDeficit>),
}

/// A handle whose framing can only be reached after raising tb by
/// `required_p`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FramingDeficit {
    pub handle: String,
    pub framing: i64,
    pub tb: i64,
    pub required_p: i64,
}

impl fmt::Display for FramingDeficit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} (framing {}, tb {}) needs W+({})",
            self.handle, self.framing, self.tb, self.required_p
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SteinViolation {
    pub handle: String,
    pub framing: i64,
    pub tb: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SteinReport {
    pub violations: Vec<SteinViolation>,
}

impl SteinReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn tb_rotation(front: &FrontDiagram) -> Result<LegendrianData, LegendrianError> {
    front.invariants()
}

/// Lowers tb by one and shifts r by ±1. A stored front is stabilised in place
/// so it keeps describing the handle.
pub fn add_zigzag(h: &TwoHandle, dir: ZigZag, name: &str) -> Result<TwoHandle, LegendrianError> {
    let data = h.legendrian.ok_or_else(|| LegendrianError::NoLegendrianData(name.to_string()))?;
    let mut out = h.clone();
    out.legendrian = Some(LegendrianData { tb: data.tb - 1, r: data.r + dir.rotation_shift() });
    if let Some(front) = &h.front {
        out.front = Some(front.stabilize(dir)?);
    }
    Ok(out)
}

fn require_legendrian(x: &Handlebody) -> Result<(), LegendrianError> {
    let missing: Vec<String> = x
        .two_handles
        .iter()
        .filter(|(_, h)| h.legendrian.is_none())
        .map(|(n, _)| n.clone())
        .collect();
    if missing.is_empty() {
        Ok(())
    } else {
        Err(LegendrianError::MissingLegendrianData(missing))
    }
}

pub fn stein_check(x: &Handlebody) -> Result<SteinReport, LegendrianError> {
    require_legendrian(x)?;
    let violations = x
        .two_handles
        .iter()
        .filter_map(|(name, h)| {
            let d = h.legendrian.expect("checked above");
            (h.framing != d.tb - 1).then(|| SteinViolation { handle: name.clone(), framing: h.framing, tb: d.tb })
        })
        .collect();
    Ok(SteinReport { violations })
}

/// Zig-zags needed on each handle to reach `framing = tb − 1`, or the
/// W⁺ coefficients that would be needed first.
pub fn zigzag_plan(x: &Handlebody) -> Result<Vec<(String, usize)>, LegendrianError> {
    require_legendrian(x)?;
    let mut deficits = Vec::new();
    let mut plan = Vec::new();
    for (name, h) in &x.two_handles {
        let d = h.legendrian.expect("checked above");
        let excess = d.tb - 1 - h.framing;
        if excess < 0 {
            deficits.push(FramingDeficit {
                handle: name.clone(),
                framing: h.framing,
                tb: d.tb,
                required_p: h.framing - d.tb + 1,
            });
        } else if excess > 0 {
            plan.push((name.clone(), excess as usize));
        }
    }
    if deficits.is_empty() {
        Ok(plan)
    } else {
        Err(LegendrianError::FramingTooHigh(deficits))
    }
}

/// Adds zig-zags (alternating, starting `Down`, per handle) until every
/// 2-handle satisfies the Stein framing condition.
pub fn steinify(x: &Handlebody) -> Result<Handlebody, LegendrianError> {
    Ok(steinify_logged(x)?.0)
}

/// As [`steinify`], also returning the zig-zags applied in order.
pub fn steinify_logged(x: &Handlebody) -> Result<(Handlebody, Vec<(String, ZigZag)>), LegendrianError> {
    let plan = zigzag_plan(x)?;
    let mut out = x.clone();
    let mut applied = Vec::new();
    for (name, count) in plan {
        let mut h = out.two_handles[&name].clone();
        for k in 0..count {
            let dir = ZigZag::alternating(k);
            h = add_zigzag(&h, dir, &name)?;
            applied.push((name.clone(), dir));
        }
        out.two_handles.insert(name, h);
    }
    Ok((out, applied))
}
