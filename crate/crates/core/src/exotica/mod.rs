//! Families of pairwise non-diffeomorphic, homeomorphic handlebodies, with
//! machine-checkable certificates.

mod cert;
mod data;
mod obligation;
mod obstruction;
mod pipeline;
mod sequence;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::handlebody::HandlebodyError;
use crate::legendrian::LegendrianError;
use crate::surgery::SurgeryError;
use crate::swadj::SwError;

pub use cert::{
    certify_family, check_certificate, check_certificate_json, CheckFailure, CheckReport, Construction,
    ExoticaCertificate, FamilyMember, PairSeparation, RelGenusQuery, Verdict, CERT_SCHEMA,
};
pub use data::{
    build_data_set, effective_genus, knot_key, log_key, ComplementClass, DataSet, GenusBoundProvider, GenusEntry,
    GenusLedger, LedgerPolicy, Provenance,
};
pub use obligation::{Expr, Obligation, Relation};
pub use obstruction::{
    inequality_pair_witness, nonstein_obstruction, ObstructedOp, ObstructionRecord, DEFAULT_INTERSECTION_BOUND,
};
pub use pipeline::{
    is_good_handlebody, stein_nonstein_pipeline, w_plus_exotica_pipeline, Stage, SteinNonsteinFamily, TailMember,
    WPlusFamily,
};
pub use sequence::{gen_knot_sequence, gen_p_sequence, FamilyParameters, FamilySequence};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AssumptionStatus {
    Proved,
    Assumed,
    Axiom,
    Unknown,
    Failed,
}

/// A fact a certificate rests on, with how it was established.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assumption {
    pub id: String,
    pub statement: String,
    pub status: AssumptionStatus,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExoticaError {
    #[error(transparent)]
    Handlebody(#[from] HandlebodyError),
    #[error(transparent)]
    Surgery(#[from] SurgeryError),
    #[error(transparent)]
    Legendrian(#[from] LegendrianError),
    #[error(transparent)]
    Sw(#[from] SwError),
    #[error("nucleus check failed: {0}")]
    NucleusFailed(String),
    #[error("missing genus data for {0}")]
    MissingGenusData(String),
    #[error("genus ledger has no bound for {0}")]
    LedgerIncomplete(String),
    #[error("construction needs d_T = 1, marker has d_T = {0}")]
    DivisorNotOne(i64),
    #[error("obligation failed: {0}")]
    ObligationFailure(String),
    #[error("malformed certificate: {0}")]
    MalformedCertificate(String),
    #[error("malformed genus ledger: {0}")]
    MalformedLedger(String),
    #[error("hypothesis unmet: {0}")]
    HypothesisUnmet(String),
    #[error("not a good handlebody: {0}")]
    NotGoodHandlebody(String),
    #[error("Stein-ification failed: {0}")]
    SteinificationFailed(String),
    #[error("nucleus does not split off: {0}")]
    NotSplit(String),
    #[error("bad parameter: {0}")]
    BadParameter(String),
}
