use serde::{Deserialize, Serialize};

use super::obligation::{Expr, Obligation, Relation};
use super::{Assumption, AssumptionStatus, ExoticaError};
use crate::handlebody::Handlebody;
use crate::swadj::KnotSpec;

/// Default lower bound for `[S]·[T_p]` supplied by the closing construction.
pub const DEFAULT_INTERSECTION_BOUND: i64 = 3;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObstructedOp {
    Log { p: i64 },
    Knot { knot: KnotSpec },
}

/// Why `X_(p)` or `X_K` carries no Stein structure: the two adjunction
/// inequalities `|x + q·m| ≤ 2` and `|x − q·m| ≤ 2` for the sphere `S`
/// cannot both hold, since together they give `2·q·m ≤ 4`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObstructionRecord {
    pub marker: String,
    pub operation: ObstructedOp,
    /// Shift of the extreme basic classes in units of `PD[T_p]`: `p − 1`, or
    /// `2·deg Δ_K` for knot surgery.
    pub q: i64,
    /// Lower bound for `[S]·[T_p]`.
    pub m: i64,
    pub hypotheses: Vec<Assumption>,
    pub obligations: Vec<Obligation>,
    pub both_orientations: bool,
    pub accepted: bool,
}

impl ObstructionRecord {
    /// Re-evaluates the obligations and hypotheses.
    pub fn recheck(&self) -> bool {
        self.obligations.iter().all(|o| o.recheck() == Ok(true))
            && self.hypotheses.iter().all(|h| h.status != AssumptionStatus::Failed)
            && self.accepted
    }
}

/// Brute-force witness search for `|x + qm| ≤ 2 ∧ |x − qm| ≤ 2`.
pub fn inequality_pair_witness(q: i64, m: i64) -> Option<i64> {
    let r = (q * m).abs() + 2;
    (-r..=r).find(|x| (x + q * m).abs() <= 2 && (x - q * m).abs() <= 2)
}

pub fn nonstein_obstruction(
    x: &Handlebody,
    marker: &str,
    op: &ObstructedOp,
    m: i64,
) -> Result<ObstructionRecord, ExoticaError> {
    x.validate()?;
    let mk = x.marker(marker)?;
    let q = match op {
        ObstructedOp::Log { p } if *p < 1 => return Err(ExoticaError::BadParameter(format!("p = {p}"))),
        ObstructedOp::Log { p: 1 } => {
            return Err(ExoticaError::HypothesisUnmet("p = 1: the 1-log transform is diffeomorphic to X".into()))
        }
        ObstructedOp::Log { p } => p - 1,
        ObstructedOp::Knot { knot } => {
            let delta = knot.alexander()?;
            if delta.degree() == 0 {
                return Err(ExoticaError::HypothesisUnmet(format!("Δ_{} = {delta} is trivial", knot.label())));
            }
            2 * delta.degree()
        }
    };
    if mk.class_t.values().all(|v| *v == 0) || !x.is_cycle(&mk.class_t) {
        return Err(ExoticaError::HypothesisUnmet("[T] is torsion".into()));
    }

    let hypotheses = vec![
        Assumption {
            id: "non-torsion".into(),
            statement: format!("[T] = {:?} is a non-zero cycle with divisor {}, so [T_p] is non-torsion", mk.class_t, mk.divisor),
            status: AssumptionStatus::Proved,
        },
        Assumption {
            id: "c-embedded".into(),
            statement: format!("T is the fiber of the cusp neighborhood on [{}]", mk.torus_handles.join(", ")),
            status: if mk.torus_handles.is_empty() { AssumptionStatus::Failed } else { AssumptionStatus::Proved },
        },
        Assumption {
            id: "closing".into(),
            statement: format!("a Stein structure would close up to a symplectic manifold with b₂⁺ > 1 holding a −2 sphere S with [S]·[T_p] ≥ {m}"),
            status: AssumptionStatus::Axiom,
        },
    ];
    let two_qm = Expr::product([Expr::int(2), Expr::int(q), Expr::int(m)]);
    let obligations = vec![
        Obligation::new("q", "", "q ≥ 1", Expr::int(q), Relation::Ge, Expr::int(1)),
        Obligation::new("m", "", "[S]·[T_p] ≥ 3", Expr::int(m), Relation::Ge, Expr::int(3)),
        Obligation::new("unsat", "", "|x + qm| ≤ 2 and |x − qm| ≤ 2 imply 2qm ≤ 4", two_qm, Relation::Gt, Expr::int(4)),
    ];
    let accepted = obligations.iter().all(|o| o.holds) && hypotheses.iter().all(|h| h.status != AssumptionStatus::Failed);
    debug_assert!(!accepted || inequality_pair_witness(q, m).is_none());
    Ok(ObstructionRecord {
        marker: marker.to_string(),
        operation: op.clone(),
        q,
        m,
        hypotheses,
        obligations,
        both_orientations: !mk.torus_handles.is_empty(),
        accepted,
    })
}
