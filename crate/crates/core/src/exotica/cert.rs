use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::data::{build_data_set, DataSet, GenusLedger, Provenance};
use super::obligation::{Expr, Obligation, Relation};
use super::sequence::{member_genus, sequence_obligations, FamilyParameters, FamilySequence};
use super::{Assumption, AssumptionStatus, ExoticaError};
use crate::handlebody::{canonical_json, content_hash, homology, Handlebody, HomologyReport};
use crate::intlat::IntMatrix;
use crate::surgery::{replay, Op};
use crate::swadj::{genus_lower_bound, sw_knot_surgery, sw_log_transform, BasicClassSet};

pub const CERT_SCHEMA: &str = "nf-cert/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Construction {
    LogFamily,
    KnotFamily,
    SteinNonstein,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Accept,
    Reject,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyMember {
    pub n: usize,
    pub ops: Vec<Op>,
    pub manifest_hash: String,
    pub homology: HomologyReport,
    /// `S'·S'` of the transformed nucleus (log families).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nucleus_square: Option<i64>,
    /// `k` with `(S' + k·T̂_p)² = S·S`, the explicit basis of the form
    /// isomorphism (log families, when it exists).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis_shift: Option<i64>,
    pub basic_classes: BasicClassSet,
    pub genus_key: String,
    /// Ledger upper bound for `g(S_·)` of this member, when declared.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub genus_upper: Option<i64>,
}

/// The adjunction chain for members `n − 1` and `n`: each listed obligation
/// forces one coefficient `a₀` to vanish, and all of them together
/// contradict the basis assumption.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairSeparation {
    pub n: usize,
    pub lower_key: String,
    pub lower_value: i64,
    pub chain: Vec<String>,
    pub basis_contradiction: bool,
}

/// `(Q, d, g)` over the index set `Λ`, with `λ₀` the first index.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelGenusQuery {
    pub index: Vec<String>,
    pub q: IntMatrix,
    pub d: Vec<i64>,
    /// Indexed by `Λ ∖ {λ₀}`.
    pub g: Vec<i64>,
    pub lambda0: String,
}

impl RelGenusQuery {
    pub fn from_data_set(ds: &DataSet) -> RelGenusQuery {
        let mut index = vec!["S".to_string(), "T_hat".to_string()];
        index.extend(ds.complement.iter().map(|u| u.label.clone()));
        let mut d = vec![1, ds.divisor];
        d.extend(std::iter::repeat_n(1, ds.k()));
        let mut g = vec![1];
        g.extend(ds.complement.iter().map(|u| u.genus.bound));
        RelGenusQuery { index, q: ds.form(), d, g, lambda0: "S".into() }
    }

    pub fn is_consistent(&self) -> bool {
        let n = self.index.len();
        self.q.rows() == n && self.q.cols() == n && self.d.len() == n && self.g.len() + 1 == n && self.g.iter().all(|g| *g >= 0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExoticaCertificate {
    pub schema: String,
    pub construction: Construction,
    pub strengthened: bool,
    pub parameters: FamilyParameters,
    pub marker: String,
    pub manifest: Value,
    pub manifest_hash: String,
    pub data_set: DataSet,
    pub ledger: GenusLedger,
    pub members: Vec<FamilyMember>,
    pub obligations: Vec<Obligation>,
    pub separation: Vec<PairSeparation>,
    pub query: RelGenusQuery,
    pub assumptions: Vec<Assumption>,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stamp: Option<String>,
}

impl ExoticaCertificate {
    pub fn to_json(&self) -> String {
        canonical_json(self)
    }

    pub fn from_json(text: &str) -> Result<ExoticaCertificate, ExoticaError> {
        serde_json::from_str(text).map_err(|e| ExoticaError::MalformedCertificate(e.to_string()))
    }

    pub fn failed_obligations(&self) -> Vec<&Obligation> {
        self.obligations.iter().filter(|o| !o.holds).collect()
    }

    /// `Err(ObligationFailure)` naming the violated instances.
    pub fn require_accept(&self) -> Result<(), ExoticaError> {
        if self.verdict == Verdict::Accept {
            return Ok(());
        }
        let mut names: Vec<String> = self.failed_obligations().iter().map(|o| o.to_string()).collect();
        names.extend(self.assumptions.iter().filter(|a| a.status == AssumptionStatus::Failed).map(|a| format!("assumption {}", a.id)));
        Err(ExoticaError::ObligationFailure(names.join("; ")))
    }
}

fn gap(params: &FamilyParameters, ds: &DataSet, n: usize) -> Result<Expr, ExoticaError> {
    Ok(match params {
        FamilyParameters::Log(ps) => {
            Expr::product([Expr::int(ds.divisor), Expr::sum([Expr::int(ps[n - 1]), Expr::int(-1)])])
        }
        FamilyParameters::Knot(ks) => Expr::product([Expr::int(2), Expr::int(ks[n - 1].alexander()?.degree())]),
    })
}

fn two_g_minus_two(g: i64) -> Expr {
    Expr::sum([Expr::product([Expr::int(2), Expr::int(g)]), Expr::int(-2)])
}

struct Assembled {
    members: Vec<FamilyMember>,
    obligations: Vec<Obligation>,
    separation: Vec<PairSeparation>,
    assumptions: Vec<Assumption>,
}

fn assemble(
    x: &Handlebody,
    ds: &DataSet,
    params: &FamilyParameters,
    strengthened: bool,
    ledger: &GenusLedger,
) -> Result<Assembled, ExoticaError> {
    let mut obligations = sequence_obligations(ds, params, strengthened, &mut |k| member_genus(ds, ledger, k))?;
    let base = homology(x)?;
    let q = ds.form();
    let mut e0 = vec![0i64; ds.rank()];
    e0[0] = 1;

    let mut members = Vec::new();
    let mut ledgers_equal = true;
    let mut forms_iso = true;
    for n in 1..=params.len() {
        let tag = format!("n={n}");
        let (ops, basics, nucleus_square) = match params {
            FamilyParameters::Log(ps) => {
                let p = ps[n - 1];
                let basics = sw_log_transform(&ds.basics, &ds.torus_dual(), p)?;
                let sq = p * p * ds.s_square + ds.divisor * ds.divisor * (p - 1);
                (vec![Op::LogTransform { marker: ds.marker.clone(), p }], basics, Some(sq))
            }
            FamilyParameters::Knot(ks) => {
                let k = &ks[n - 1];
                let basics = sw_knot_surgery(&ds.basics, &ds.torus_dual(), &k.alexander()?)?;
                (vec![Op::KnotSurgery { marker: ds.marker.clone(), knot: k.clone() }], basics, None)
            }
        };
        let manifold = replay(x, &ops)?;
        let h = homology(&manifold)?;
        ledgers_equal &= h == base;
        let mut basis_shift = None;
        if let (FamilyParameters::Log(ps), Some(sq)) = (params, nucleus_square) {
            let p = ps[n - 1];
            let (s, d) = (ds.s_square, ds.divisor);
            let o = Obligation::new(
                "form",
                &tag,
                "S'·S' − S·S even, so {T̂_p, S' + k·T̂_p} carries the form of N",
                Expr::modulo(
                    Expr::minus(
                        Expr::sum([
                            Expr::product([Expr::int(p), Expr::int(p), Expr::int(s)]),
                            Expr::product([Expr::int(d), Expr::int(d), Expr::sum([Expr::int(p), Expr::int(-1)])]),
                        ]),
                        Expr::int(s),
                    ),
                    Expr::int(2),
                ),
                Relation::Eq,
                Expr::int(0),
            );
            if o.holds {
                basis_shift = Some((s - sq) / 2);
            }
            forms_iso &= o.holds;
            obligations.push(o);
        }
        let genus_key = params.member_key(n);
        let genus_upper = member_genus(ds, ledger, &genus_key).ok();
        if let Some(upper) = genus_upper {
            let lower = genus_lower_bound(&basics, &e0, &q, ds.simple_type)?;
            obligations.push(Obligation::new(
                "ledger-bound",
                &tag,
                "declared g(S_·) is at least the adjunction lower bound",
                Expr::int(upper),
                Relation::Ge,
                Expr::int(lower),
            ));
        }
        members.push(FamilyMember {
            n,
            ops,
            manifest_hash: manifold.content_hash(),
            homology: h,
            nucleus_square,
            basis_shift,
            basic_classes: basics,
            genus_key,
            genus_upper,
        });
    }

    let mut separation = Vec::new();
    for n in 2..=params.len() {
        let tag = format!("n={n}");
        let lower_key = params.member_key(n - 1);
        let lower_value = member_genus(ds, ledger, &lower_key)?;
        let g = gap(params, ds, n)?;
        let mut chain = vec![Obligation::new(
            "chain.v0",
            &tag,
            "2g(S_prev) − 2 ≥ gap·|a₀| + S·S forces a₀ = 0",
            Expr::sum([g.clone(), Expr::int(ds.s_square)]),
            Relation::Gt,
            two_g_minus_two(lower_value),
        )];
        if strengthened {
            chain.push(Obligation::new(
                "chain.v0-",
                &tag,
                "reversed orientation: gap·|a₀| − S·S forces a₀ = 0",
                Expr::minus(g.clone(), Expr::int(ds.s_square)),
                Relation::Gt,
                two_g_minus_two(lower_value),
            ));
        }
        chain.push(Obligation::new("chain.v1", &tag, "0 = |⟨K,v₁⟩ ± gap·a₀| forces a₀ = 0", g.clone(), Relation::Gt, Expr::int(0)));
        for u in &ds.complement {
            chain.push(Obligation::new(
                &format!("chain.{}", u.label),
                &tag,
                "2g(u) − 2 ≥ gap·|a₀| + u·u forces a₀ = 0",
                Expr::sum([g.clone(), Expr::int(u.square)]),
                Relation::Gt,
                two_g_minus_two(u.genus.bound),
            ));
            if strengthened {
                chain.push(Obligation::new(
                    &format!("chain.{}-", u.label),
                    &tag,
                    "reversed orientation: gap·|a₀| − u·u forces a₀ = 0",
                    Expr::minus(g.clone(), Expr::int(u.square)),
                    Relation::Gt,
                    two_g_minus_two(u.genus.bound),
                ));
            }
        }
        separation.push(PairSeparation {
            n,
            lower_key,
            lower_value,
            chain: chain.iter().map(|o| o.id.clone()).collect(),
            basis_contradiction: chain.iter().all(|o| o.holds),
        });
        obligations.extend(chain);
    }

    let mut assumptions = ds.assumptions.clone();
    let mut ledger_assumption = |key: &str, bound: i64, provenance: Provenance| {
        assumptions.push(Assumption {
            id: format!("genus.{key}"),
            statement: format!("g({key}) ≤ {bound} ({})", serde_json::to_value(provenance).expect("enum").as_str().unwrap_or("")),
            status: match provenance {
                Provenance::SeifertGenus => AssumptionStatus::Proved,
                Provenance::Declared | Provenance::DerivedPolicy => AssumptionStatus::Assumed,
            },
        });
    };
    ledger_assumption("S", ds.s_genus.bound, ds.s_genus.provenance);
    for u in &ds.complement {
        ledger_assumption(&u.label, u.genus.bound, u.genus.provenance);
    }
    for (k, e) in &ledger.entries {
        if k != "S" && !ds.complement.iter().any(|u| &u.label == k) {
            ledger_assumption(k, e.bound, e.provenance);
        }
    }
    assumptions.push(Assumption {
        id: "homeomorphism".into(),
        statement: "members are homeomorphic to X: forms isomorphic by explicit basis and invariant ledgers equal, \
                    so the nucleus homeomorphism extends"
            .into(),
        status: if ledgers_equal && forms_iso { AssumptionStatus::Axiom } else { AssumptionStatus::Failed },
    });
    Ok(Assembled { members, obligations, separation, assumptions })
}

/// The ledger a certificate carries: every entry the family consumed plus
/// declared bounds the data set used.
fn certificate_ledger(ds: &DataSet, seq_ledger: &GenusLedger) -> GenusLedger {
    let mut out = seq_ledger.clone();
    if ds.s_genus.provenance != Provenance::SeifertGenus {
        out.entries.insert("S".into(), ds.s_genus);
    }
    for u in &ds.complement {
        if u.genus.provenance != Provenance::SeifertGenus {
            out.entries.insert(u.label.clone(), u.genus);
        }
    }
    out
}

/// Builds the separation certificate for a family on `x`. A family whose
/// conditions fail still yields a certificate, with verdict `reject`.
pub fn certify_family(x: &Handlebody, ds: &DataSet, seq: &FamilySequence) -> Result<ExoticaCertificate, ExoticaError> {
    let construction = match seq.parameters {
        FamilyParameters::Log(_) => Construction::LogFamily,
        FamilyParameters::Knot(_) => Construction::KnotFamily,
    };
    certify_with(x, ds, seq, construction)
}

pub(crate) fn certify_with(
    x: &Handlebody,
    ds: &DataSet,
    seq: &FamilySequence,
    construction: Construction,
) -> Result<ExoticaCertificate, ExoticaError> {
    if seq.parameters.is_empty() {
        return Err(ExoticaError::BadParameter("empty family".into()));
    }
    // Entries for later members may be absent; only earlier members feed
    // the conditions.
    let ledger = certificate_ledger(ds, &seq.ledger);
    let a = assemble(x, ds, &seq.parameters, seq.strengthened, &ledger)?;
    let accept = a.obligations.iter().all(|o| o.holds) && a.assumptions.iter().all(|s| s.status != AssumptionStatus::Failed);
    Ok(ExoticaCertificate {
        schema: CERT_SCHEMA.into(),
        construction,
        strengthened: seq.strengthened,
        parameters: seq.parameters.clone(),
        marker: ds.marker.clone(),
        manifest: x.to_manifest_value(),
        manifest_hash: x.content_hash(),
        data_set: ds.clone(),
        ledger,
        members: a.members,
        obligations: a.obligations,
        separation: a.separation,
        query: RelGenusQuery::from_data_set(ds),
        assumptions: a.assumptions,
        verdict: if accept { Verdict::Accept } else { Verdict::Reject },
        stamp: None,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckFailure {
    /// Obligation id, or the certificate field at fault.
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub condition: Option<String>,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub verdict: Verdict,
    pub failures: Vec<CheckFailure>,
}

impl CheckReport {
    pub fn accepted(&self) -> bool {
        self.verdict == Verdict::Accept
    }

    pub fn names(&self, condition: &str) -> bool {
        self.failures.iter().any(|f| f.condition.as_deref() == Some(condition))
    }
}

/// Re-derives everything from the embedded manifest and the recorded
/// inputs, re-evaluates each obligation from its expressions, and compares.
/// Stored flags and verdicts are never trusted.
pub fn check_certificate(c: &ExoticaCertificate) -> CheckReport {
    let mut failures = Vec::new();
    let mut fail = |id: &str, condition: Option<&str>, reason: String| {
        failures.push(CheckFailure { id: id.to_string(), condition: condition.map(str::to_string), reason });
    };

    let mut all_hold = true;
    for o in &c.obligations {
        match o.recheck() {
            Ok(true) => {}
            Ok(false) => {
                all_hold = false;
                fail(&o.id, Some(&o.condition), format!("does not hold: {o}"));
            }
            Err(e) => {
                all_hold = false;
                fail(&o.id, Some(&o.condition), e);
            }
        }
    }
    for a in &c.assumptions {
        if a.status == AssumptionStatus::Failed {
            fail(&format!("assumption:{}", a.id), None, format!("assumption failed: {}", a.statement));
        }
    }

    if c.schema != CERT_SCHEMA {
        fail("schema", None, format!("unsupported schema {}", c.schema));
    }
    let x = match Handlebody::from_manifest_value(&c.manifest) {
        Ok(x) => Some(x),
        Err(e) => {
            fail("manifest", None, e.to_string());
            None
        }
    };
    if let Some(x) = &x {
        let hash = content_hash(&canonical_json(&c.manifest));
        if hash != c.manifest_hash || x.content_hash() != c.manifest_hash {
            fail("manifest_hash", None, format!("recorded {} but manifest hashes to {hash}", c.manifest_hash));
        }
        rederive(c, x, &mut fail);
    }

    let expected = if all_hold && c.assumptions.iter().all(|a| a.status != AssumptionStatus::Failed) {
        Verdict::Accept
    } else {
        Verdict::Reject
    };
    if expected != c.verdict {
        fail("verdict", None, format!("recorded {:?} but obligations give {:?}", c.verdict, expected));
    }
    let verdict = if failures.is_empty() { Verdict::Accept } else { Verdict::Reject };
    CheckReport { verdict, failures }
}

fn rederive(c: &ExoticaCertificate, x: &Handlebody, fail: &mut dyn FnMut(&str, Option<&str>, String)) {
    let ds = match build_data_set(x, &c.marker, Some(&c.data_set.basics), c.data_set.simple_type, &c.ledger) {
        Ok(ds) => ds,
        Err(e) => return fail("data_set", None, e.to_string()),
    };
    if ds != c.data_set {
        fail("data_set", None, "recorded data set differs from the one extracted from the manifest".into());
    }
    let expected_construction = matches!(
        (&c.parameters, c.construction),
        (FamilyParameters::Log(_), Construction::LogFamily | Construction::SteinNonstein)
            | (FamilyParameters::Knot(_), Construction::KnotFamily)
    );
    if !expected_construction {
        fail("construction", None, format!("{:?} does not match the parameters", c.construction));
    }
    if c.query != RelGenusQuery::from_data_set(&ds) || !c.query.is_consistent() {
        fail("query", None, "relative genus query does not match the data set".into());
    }
    let a = match assemble(x, &ds, &c.parameters, c.strengthened, &c.ledger) {
        Ok(a) => a,
        Err(e) => return fail("members", None, e.to_string()),
    };
    if a.members.len() != c.members.len() {
        fail("members", None, format!("{} members recorded, {} derived", c.members.len(), a.members.len()));
    }
    for (got, want) in c.members.iter().zip(&a.members) {
        if got != want {
            fail(&format!("member[n={}]", want.n), None, "member record differs from replay".into());
        }
    }
    for want in &a.obligations {
        match c.obligations.iter().find(|o| o.id == want.id) {
            None => fail(&want.id, Some(&want.condition), "obligation missing".into()),
            Some(got) if got != want => fail(&want.id, Some(&want.condition), format!("recorded {got}, derived {want}")),
            Some(_) => {}
        }
    }
    for got in &c.obligations {
        if !a.obligations.iter().any(|o| o.id == got.id) {
            fail(&got.id, Some(&got.condition), "obligation not derivable from the parameters".into());
        }
    }
    if a.separation != c.separation {
        fail("separation", None, "adjunction chain differs from derivation".into());
    }
    if a.assumptions != c.assumptions {
        fail("assumptions", None, "assumption list differs from derivation".into());
    }
}

/// Parses and checks a certificate document.
pub fn check_certificate_json(text: &str) -> Result<CheckReport, ExoticaError> {
    Ok(check_certificate(&ExoticaCertificate::from_json(text)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exotica::data::LedgerPolicy;
    use crate::exotica::sequence::{gen_knot_sequence, gen_p_sequence};
    use crate::handlebody::gompf_nucleus;

    fn setup() -> (Handlebody, DataSet, GenusLedger) {
        let x = gompf_nucleus(2).unwrap();
        let ds = build_data_set(&x, "N", None, true, &GenusLedger::new()).unwrap();
        let ledger = GenusLedger::declared([("S_3".to_string(), 3), ("S_5".to_string(), 5)]).unwrap();
        (x, ds, ledger)
    }

    #[test]
    fn round_trip_accepts() {
        let (x, ds, ledger) = setup();
        let seq = gen_p_sequence(&ds, 3, false, &ledger, LedgerPolicy::DeclaredOnly).unwrap();
        let c = certify_family(&x, &ds, &seq).unwrap();
        assert_eq!(c.verdict, Verdict::Accept, "{:?}", c.failed_obligations());
        let text = c.to_json();
        let r = check_certificate_json(&text).unwrap();
        assert!(r.accepted(), "{:?}", r.failures);
        assert_eq!(ExoticaCertificate::from_json(&text).unwrap().to_json(), text);
        assert_eq!(c.query.d, vec![1, 1]);
        assert_eq!(c.query.g, vec![1]);
        assert!(c.separation.iter().all(|s| s.basis_contradiction));
        assert_eq!(c.members[2].basic_classes.len(), 13);
    }

    #[test]
    fn mutated_p2_is_rejected() {
        let (x, ds, ledger) = setup();
        let mut seq = gen_p_sequence(&ds, 3, false, &ledger, LedgerPolicy::DeclaredOnly).unwrap();
        seq.parameters = FamilyParameters::Log(vec![1, 3, 13]);
        seq.ledger = ledger.clone();
        let c = certify_family(&x, &ds, &seq).unwrap();
        assert_eq!(c.verdict, Verdict::Reject);
        assert!(matches!(c.require_accept(), Err(ExoticaError::ObligationFailure(m)) if m.contains("iii[n=2]")));
        let r = check_certificate(&c);
        assert!(!r.accepted());
        assert!(r.failures.iter().any(|f| f.id == "iii[n=2]"));
    }

    #[test]
    fn tampering_is_caught() {
        let (x, ds, ledger) = setup();
        let seq = gen_p_sequence(&ds, 3, false, &ledger, LedgerPolicy::DeclaredOnly).unwrap();
        let c = certify_family(&x, &ds, &seq).unwrap();
        let mut t = c.clone();
        t.obligations[3].lhs_value += 1;
        assert!(!check_certificate(&t).accepted());
        let mut t = c.clone();
        t.obligations[3].lhs = Expr::int(t.obligations[3].lhs_value);
        assert!(!check_certificate(&t).accepted());
        let mut t = c.clone();
        t.assumptions[0].status = AssumptionStatus::Failed;
        assert!(!check_certificate(&t).accepted());
        let mut t = c.clone();
        t.members[1].homology.h2_free_rank += 1;
        assert!(!check_certificate(&t).accepted());
        let mut t = c;
        t.manifest["two_handles"]["section"]["framing"] = Value::from(-4);
        assert!(!check_certificate(&t).accepted());
    }

    #[test]
    fn single_member_is_vacuous() {
        let (x, ds, _) = setup();
        let seq = gen_p_sequence(&ds, 1, false, &GenusLedger::new(), LedgerPolicy::DeclaredOnly).unwrap();
        let c = certify_family(&x, &ds, &seq).unwrap();
        assert_eq!(c.verdict, Verdict::Accept);
        assert!(c.separation.is_empty());
        assert!(check_certificate(&c).accepted());
    }

    #[test]
    fn knot_family_certificate() {
        let x = gompf_nucleus(2).unwrap();
        let ds = build_data_set(&x, "N", None, true, &GenusLedger::new()).unwrap();
        let seq = gen_knot_sequence(&ds, 2, true, &GenusLedger::new(), LedgerPolicy::DeclaredOnly).unwrap();
        let c = certify_family(&x, &ds, &seq).unwrap();
        assert_eq!(c.construction, Construction::KnotFamily);
        assert!(check_certificate(&c).accepted(), "{:?}", check_certificate(&c).failures);
    }
}
