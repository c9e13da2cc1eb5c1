use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

/// Closed integer expression. Leaves are literals, so an expression has no
/// free symbols and evaluates the same way everywhere.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Expr {
    Int(i64),
    Add(Vec<Expr>),
    Mul(Vec<Expr>),
    Neg(Box<Expr>),
    Abs(Box<Expr>),
    Gcd(Box<Expr>, Box<Expr>),
    /// Euclidean remainder, always in `0..|b|`.
    Rem(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn int(v: i64) -> Expr {
        Expr::Int(v)
    }

    pub fn sum(terms: impl IntoIterator<Item = Expr>) -> Expr {
        Expr::Add(terms.into_iter().collect())
    }

    pub fn product(factors: impl IntoIterator<Item = Expr>) -> Expr {
        Expr::Mul(factors.into_iter().collect())
    }

    pub fn minus(a: Expr, b: Expr) -> Expr {
        Expr::Add(vec![a, Expr::Neg(Box::new(b))])
    }

    pub fn gcd(a: Expr, b: Expr) -> Expr {
        Expr::Gcd(Box::new(a), Box::new(b))
    }

    pub fn modulo(a: Expr, b: Expr) -> Expr {
        Expr::Rem(Box::new(a), Box::new(b))
    }

    /// `None` on overflow or a zero modulus.
    pub fn eval(&self) -> Option<i64> {
        match self {
            Expr::Int(v) => Some(*v),
            Expr::Add(ts) => ts.iter().try_fold(0i64, |acc, t| acc.checked_add(t.eval()?)),
            Expr::Mul(ts) => ts.iter().try_fold(1i64, |acc, t| acc.checked_mul(t.eval()?)),
            Expr::Neg(e) => e.eval()?.checked_neg(),
            Expr::Abs(e) => e.eval()?.checked_abs(),
            Expr::Gcd(a, b) => Some(a.eval()?.gcd(&b.eval()?)),
            Expr::Rem(a, b) => {
                let m = b.eval()?;
                (m != 0).then(|| a.eval().map(|x| x.rem_euclid(m)))?
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |f: &mut fmt::Formatter<'_>, ts: &[Expr], sep: &str| -> fmt::Result {
            write!(f, "(")?;
            for (i, t) in ts.iter().enumerate() {
                if i > 0 {
                    write!(f, "{sep}")?;
                }
                write!(f, "{t}")?;
            }
            write!(f, ")")
        };
        match self {
            Expr::Int(v) => write!(f, "{v}"),
            Expr::Add(ts) => join(f, ts, " + "),
            Expr::Mul(ts) => join(f, ts, "·"),
            Expr::Neg(e) => write!(f, "−{e}"),
            Expr::Abs(e) => write!(f, "|{e}|"),
            Expr::Gcd(a, b) => write!(f, "gcd({a}, {b})"),
            Expr::Rem(a, b) => write!(f, "({a} mod {b})"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "=")]
    Eq,
}

impl Relation {
    pub fn holds(self, lhs: i64, rhs: i64) -> bool {
        match self {
            Relation::Gt => lhs > rhs,
            Relation::Ge => lhs >= rhs,
            Relation::Lt => lhs < rhs,
            Relation::Le => lhs <= rhs,
            Relation::Eq => lhs == rhs,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Gt => ">",
            Relation::Ge => "≥",
            Relation::Lt => "<",
            Relation::Le => "≤",
            Relation::Eq => "=",
        }
    }
}

/// One instance of a condition with every value substituted. The stored
/// values and `holds` flag are what the generator computed; checkers
/// recompute them from `lhs` and `rhs`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Obligation {
    pub id: String,
    pub condition: String,
    pub statement: String,
    pub lhs: Expr,
    pub relation: Relation,
    pub rhs: Expr,
    pub lhs_value: i64,
    pub rhs_value: i64,
    pub holds: bool,
}

impl Obligation {
    /// `id` is `condition[tag]`, or just `condition` when `tag` is empty.
    pub fn new(condition: &str, tag: &str, statement: &str, lhs: Expr, relation: Relation, rhs: Expr) -> Obligation {
        let id = if tag.is_empty() { condition.to_string() } else { format!("{condition}[{tag}]") };
        let lhs_value = lhs.eval().unwrap_or(i64::MIN);
        let rhs_value = rhs.eval().unwrap_or(i64::MIN);
        let holds = lhs.eval().is_some() && rhs.eval().is_some() && relation.holds(lhs_value, rhs_value);
        Obligation {
            id,
            condition: condition.to_string(),
            statement: statement.to_string(),
            lhs,
            relation,
            rhs,
            lhs_value,
            rhs_value,
            holds,
        }
    }

    /// Re-evaluates from the expressions alone. `Err` describes a mismatch
    /// with the stored values; `Ok` carries whether the relation holds.
    pub fn recheck(&self) -> Result<bool, String> {
        let (Some(l), Some(r)) = (self.lhs.eval(), self.rhs.eval()) else {
            return Err("expression does not evaluate".into());
        };
        if l != self.lhs_value || r != self.rhs_value {
            return Err(format!(
                "stored values {} {} {} but expressions give {l} {} {r}",
                self.lhs_value,
                self.relation.symbol(),
                self.rhs_value,
                self.relation.symbol()
            ));
        }
        let holds = self.relation.holds(l, r);
        if holds != self.holds {
            return Err(format!("stored flag {} but relation evaluates to {holds}", self.holds));
        }
        Ok(holds)
    }
}

impl fmt::Display for Obligation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {} {} {}  [{} {} {}]",
            self.id,
            self.lhs,
            self.relation.symbol(),
            self.rhs,
            self.lhs_value,
            self.relation.symbol(),
            self.rhs_value
        )
    }
}
