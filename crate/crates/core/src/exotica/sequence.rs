use num_integer::Integer;
use serde::{Deserialize, Serialize};

use super::data::{effective_genus, knot_key, log_key, DataSet, GenusLedger, LedgerPolicy, Provenance};
use super::obligation::{Expr, Obligation, Relation};
use super::ExoticaError;
use crate::swadj::KnotSpec;

/// The varying parameter of a family.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyParameters {
    Log(Vec<i64>),
    Knot(Vec<KnotSpec>),
}

impl FamilyParameters {
    pub fn len(&self) -> usize {
        match self {
            FamilyParameters::Log(ps) => ps.len(),
            FamilyParameters::Knot(ks) => ks.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Ledger key of the class `S` in member `n` (1-based).
    pub fn member_key(&self, n: usize) -> String {
        match self {
            FamilyParameters::Log(ps) => log_key(ps[n - 1]),
            FamilyParameters::Knot(ks) => knot_key(&ks[n - 1]),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilySequence {
    pub parameters: FamilyParameters,
    pub strengthened: bool,
    /// Every `g(S_·)` entry the conditions consumed, with provenance.
    pub ledger: GenusLedger,
    pub obligations: Vec<Obligation>,
}

impl FamilySequence {
    /// A family with given parameters. Every `g(S_·)` the conditions need
    /// must be in `ledger`; the obligations are stated whether or not they
    /// hold.
    pub fn with_parameters(
        ds: &DataSet,
        parameters: FamilyParameters,
        strengthened: bool,
        ledger: &GenusLedger,
    ) -> Result<FamilySequence, ExoticaError> {
        if parameters.is_empty() {
            return Err(ExoticaError::BadParameter("a family needs at least one member".into()));
        }
        let obligations = sequence_obligations(ds, &parameters, strengthened, &mut |k| member_genus(ds, ledger, k))?;
        let mut used = GenusLedger::new();
        for n in 1..parameters.len() {
            let key = parameters.member_key(n);
            if let Some(e) = ledger.get(&key) {
                used.entries.insert(key, e);
            }
        }
        Ok(FamilySequence { parameters, strengthened, ledger: used, obligations })
    }
}

/// `g(S_·)` for the class keyed `key`, after the `max{·,1}` rule.
pub(crate) fn member_genus(ds: &DataSet, ledger: &GenusLedger, key: &str) -> Result<i64, ExoticaError> {
    if key == "S" {
        return Ok(ds.s_genus.bound);
    }
    let e = ledger.get(key).ok_or_else(|| ExoticaError::LedgerIncomplete(key.to_string()))?;
    Ok(effective_genus(e.bound, ds.s_square))
}

fn resolve(ds: &DataSet, ledger: &mut GenusLedger, policy: LedgerPolicy<'_>, key: &str) -> Result<i64, ExoticaError> {
    if key != "S" && ledger.get(key).is_none() {
        match policy {
            LedgerPolicy::Provider(p) => match p.bound(key) {
                Some(b) => ledger.insert(key, b, Provenance::DerivedPolicy)?,
                None => return Err(ExoticaError::LedgerIncomplete(key.to_string())),
            },
            LedgerPolicy::DeclaredOnly => return Err(ExoticaError::LedgerIncomplete(key.to_string())),
        }
    }
    member_genus(ds, ledger, key)
}

fn two_g_minus_two(g: i64) -> Expr {
    Expr::sum([Expr::product([Expr::int(2), Expr::int(g)]), Expr::int(-2)])
}

/// `d_T·(p − 1)`.
fn log_gap(d: i64, p: i64) -> Expr {
    Expr::product([Expr::int(d), Expr::sum([Expr::int(p), Expr::int(-1)])])
}

/// `2·deg Δ_K`.
fn knot_gap(deg: i64) -> Expr {
    Expr::product([Expr::int(2), Expr::int(deg)])
}

fn knot_degree(k: &KnotSpec) -> Result<i64, ExoticaError> {
    Ok(k.alexander()?.degree())
}

/// Condition instances for the sequence definitions. `genus(key)` looks up
/// `g(S_·)` for earlier members.
pub(crate) fn sequence_obligations(
    ds: &DataSet,
    params: &FamilyParameters,
    strengthened: bool,
    genus: &mut dyn FnMut(&str) -> Result<i64, ExoticaError>,
) -> Result<Vec<Obligation>, ExoticaError> {
    let mut out = Vec::new();
    let d = ds.divisor;
    let s = ds.s_square;
    match params {
        FamilyParameters::Log(ps) => {
            if let Some(&p1) = ps.first() {
                out.push(Obligation::new("p1", "", "p_1 = 1", Expr::int(p1), Relation::Eq, Expr::int(1)));
            }
            for n in 2..=ps.len() {
                let (prev, p) = (ps[n - 2], ps[n - 1]);
                let tag = format!("n={n}");
                out.push(Obligation::new("i", &tag, "p_n > p_{n−1}", Expr::int(p), Relation::Gt, Expr::int(prev)));
                if n == 2 {
                    for u in &ds.complement {
                        let t = format!("n=2,{}", u.label);
                        out.push(Obligation::new(
                            "ii",
                            &t,
                            "d_T(p_2 − 1) + u·u > 2g(u) − 2",
                            Expr::sum([log_gap(d, p), Expr::int(u.square)]),
                            Relation::Gt,
                            two_g_minus_two(u.genus.bound),
                        ));
                        if strengthened {
                            out.push(Obligation::new(
                                "vi",
                                &t,
                                "d_T(p_2 − 1) − u·u > 2g(u) − 2",
                                Expr::minus(log_gap(d, p), Expr::int(u.square)),
                                Relation::Gt,
                                two_g_minus_two(u.genus.bound),
                            ));
                        }
                    }
                }
                let g_prev = genus(&log_key(prev))?;
                out.push(Obligation::new(
                    "iii",
                    &tag,
                    "d_T(p_n − 1) + S·S > 2g(S_{p_{n−1}}) − 2",
                    Expr::sum([log_gap(d, p), Expr::int(s)]),
                    Relation::Gt,
                    two_g_minus_two(g_prev),
                ));
                out.push(Obligation::new(
                    "iv",
                    &tag,
                    "gcd(p_n, d_T) = 1",
                    Expr::gcd(Expr::int(p), Expr::int(d)),
                    Relation::Eq,
                    Expr::int(1),
                ));
                if ds.parity_constrained() {
                    out.push(Obligation::new(
                        "v",
                        &tag,
                        "p_n odd",
                        Expr::modulo(Expr::int(p), Expr::int(2)),
                        Relation::Eq,
                        Expr::int(1),
                    ));
                }
                if strengthened {
                    out.push(Obligation::new(
                        "vii",
                        &tag,
                        "d_T(p_n − 1) − S·S > 2g(S_{p_{n−1}}) − 2",
                        Expr::minus(log_gap(d, p), Expr::int(s)),
                        Relation::Gt,
                        two_g_minus_two(g_prev),
                    ));
                }
            }
        }
        FamilyParameters::Knot(ks) => {
            if d != 1 {
                return Err(ExoticaError::DivisorNotOne(d));
            }
            if let Some(k1) = ks.first() {
                out.push(Obligation::new(
                    "k1",
                    "",
                    "deg Δ_{K_1} = 0",
                    Expr::int(knot_degree(k1)?),
                    Relation::Eq,
                    Expr::int(0),
                ));
            }
            for n in 2..=ks.len() {
                let deg = knot_degree(&ks[n - 1])?;
                let prev_deg = knot_degree(&ks[n - 2])?;
                let tag = format!("n={n}");
                out.push(Obligation::new(
                    "i",
                    &tag,
                    "deg Δ_{K_n} > deg Δ_{K_{n−1}}",
                    Expr::int(deg),
                    Relation::Gt,
                    Expr::int(prev_deg),
                ));
                if n == 2 {
                    for u in &ds.complement {
                        let t = format!("n=2,{}", u.label);
                        out.push(Obligation::new(
                            "ii",
                            &t,
                            "2 deg Δ_{K_2} + u·u > 2g(u) − 2",
                            Expr::sum([knot_gap(deg), Expr::int(u.square)]),
                            Relation::Gt,
                            two_g_minus_two(u.genus.bound),
                        ));
                        if strengthened {
                            out.push(Obligation::new(
                                "iv",
                                &t,
                                "2 deg Δ_{K_2} − u·u > 2g(u) − 2",
                                Expr::minus(knot_gap(deg), Expr::int(u.square)),
                                Relation::Gt,
                                two_g_minus_two(u.genus.bound),
                            ));
                        }
                    }
                }
                let g_prev = genus(&knot_key(&ks[n - 2]))?;
                out.push(Obligation::new(
                    "iii",
                    &tag,
                    "2 deg Δ_{K_n} + S·S > 2g(S_{K_{n−1}}) − 2",
                    Expr::sum([knot_gap(deg), Expr::int(s)]),
                    Relation::Gt,
                    two_g_minus_two(g_prev),
                ));
                if strengthened {
                    out.push(Obligation::new(
                        "v",
                        &tag,
                        "2 deg Δ_{K_n} − S·S > 2g(S_{K_{n−1}}) − 2",
                        Expr::minus(knot_gap(deg), Expr::int(s)),
                        Relation::Gt,
                        two_g_minus_two(g_prev),
                    ));
                }
            }
        }
    }
    Ok(out)
}

/// Least `c` with `step·c + offset > rhs` for `step > 0`.
fn least_above(step: i64, offset: i64, rhs: i64) -> i64 {
    Integer::div_floor(&(rhs - offset), &step) + 1
}

/// `p₁ = 1`, then each `p_n` the least integer meeting every active
/// condition given the ledger.
pub fn gen_p_sequence(
    ds: &DataSet,
    n: usize,
    strengthened: bool,
    ledger: &GenusLedger,
    policy: LedgerPolicy<'_>,
) -> Result<FamilySequence, ExoticaError> {
    if n == 0 {
        return Err(ExoticaError::BadParameter("a family needs at least one member".into()));
    }
    let d = ds.divisor;
    let s = ds.s_square;
    let mut used = GenusLedger::new();
    let mut working = ledger.clone();
    let mut ps = vec![1i64];
    while ps.len() < n {
        let prev = *ps.last().expect("non-empty");
        let key = log_key(prev);
        let g_prev = resolve(ds, &mut working, policy, &key)?;
        if let Some(e) = working.get(&key) {
            used.entries.insert(key, e);
        }
        // Linear conditions in `m = p − 1`: d·m + offset > rhs.
        let mut lower = prev + 1;
        let mut push = |offset: i64, rhs: i64| lower = lower.max(least_above(d, offset, rhs) + 1);
        push(s, 2 * g_prev - 2);
        if strengthened {
            push(-s, 2 * g_prev - 2);
        }
        if ps.len() == 1 {
            for u in &ds.complement {
                push(u.square, 2 * u.genus.bound - 2);
                if strengthened {
                    push(-u.square, 2 * u.genus.bound - 2);
                }
            }
        }
        let p = (lower..)
            .find(|p| p.gcd(&d) == 1 && (!ds.parity_constrained() || p % 2 != 0))
            .expect("coprime values are unbounded");
        ps.push(p);
    }
    let params = FamilyParameters::Log(ps);
    let obligations = sequence_obligations(ds, &params, strengthened, &mut |k| member_genus(ds, &used, k))?;
    debug_assert!(obligations.iter().all(|o| o.holds));
    Ok(FamilySequence { parameters: params, strengthened, ledger: used, obligations })
}

/// `K₁` the unknot, then each `K_n = T(2, 2k+1)` with the least `k` meeting
/// every active degree condition. Needs `d_T = 1`.
pub fn gen_knot_sequence(
    ds: &DataSet,
    n: usize,
    strengthened: bool,
    ledger: &GenusLedger,
    policy: LedgerPolicy<'_>,
) -> Result<FamilySequence, ExoticaError> {
    if ds.divisor != 1 {
        return Err(ExoticaError::DivisorNotOne(ds.divisor));
    }
    if n == 0 {
        return Err(ExoticaError::BadParameter("a family needs at least one member".into()));
    }
    let s = ds.s_square;
    let mut used = GenusLedger::new();
    let mut working = ledger.clone();
    let mut ks = vec![KnotSpec::unknot()];
    let mut prev_deg = 0i64;
    while ks.len() < n {
        let key = knot_key(ks.last().expect("non-empty"));
        let g_prev = resolve(ds, &mut working, policy, &key)?;
        if let Some(e) = working.get(&key) {
            used.entries.insert(key, e);
        }
        let mut lower = prev_deg + 1;
        let mut push = |offset: i64, rhs: i64| lower = lower.max(least_above(2, offset, rhs));
        push(s, 2 * g_prev - 2);
        if strengthened {
            push(-s, 2 * g_prev - 2);
        }
        if ks.len() == 1 {
            for u in &ds.complement {
                push(u.square, 2 * u.genus.bound - 2);
                if strengthened {
                    push(-u.square, 2 * u.genus.bound - 2);
                }
            }
        }
        let k = u32::try_from(lower).map_err(|_| ExoticaError::BadParameter(format!("knot degree {lower} out of range")))?;
        ks.push(KnotSpec::Torus(k));
        prev_deg = lower;
    }
    let params = FamilyParameters::Knot(ks);
    let obligations = sequence_obligations(ds, &params, strengthened, &mut |k| member_genus(ds, &used, k))?;
    debug_assert!(obligations.iter().all(|o| o.holds));
    Ok(FamilySequence { parameters: params, strengthened, ledger: used, obligations })
}
