//! Formal Seiberg–Witten calculus: basic classes as finite sets of
//! cohomology vectors with integer coefficients, transformed by the log
//! transform and knot surgery product formulas, and the adjunction
//! inequality as a genus constraint. Nothing here solves the SW equations.

mod laurent;

pub use laurent::LaurentPoly;

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::intlat::{IntMatrix, JsonInt};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SwError {
    #[error("Seifert matrix is not square")]
    NonSquare,
    #[error("Seifert matrix has vanishing or asymmetric Alexander polynomial")]
    DegenerateSeifertMatrix,
    #[error("coefficient must be ≥ 1, got {0}")]
    BadCoefficient(i64),
    #[error("the torus class is torsion")]
    TorsionClass,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("empty basic class set")]
    EmptyBasicSet,
}

/// `det(V − t·Vᵀ)` normalised by `±t^k` to be symmetric with `Δ(1) > 0`.
pub fn alexander(v: &IntMatrix) -> Result<LaurentPoly, SwError> {
    if !v.is_square() {
        return Err(SwError::NonSquare);
    }
    let n = v.rows();
    // The determinant has degree ≤ n; sample it at t = 0..=n and interpolate.
    let vt = v.transpose();
    let samples: Vec<BigInt> = (0..=n)
        .map(|t| {
            let t = BigInt::from(t);
            let entries = (0..n * n).map(|k| v.get(k / n, k % n) - &t * vt.get(k / n, k % n)).collect();
            IntMatrix::new(n, n, entries).determinant()
        })
        .collect();
    let coeffs = interpolate(&samples);
    let raw = LaurentPoly::from_terms(coeffs.into_iter().enumerate().map(|(e, c)| (e as i64, c)));
    let (Some(lo), Some(hi)) = (raw.min_exponent(), raw.max_exponent()) else {
        return Err(SwError::DegenerateSeifertMatrix);
    };
    if (lo + hi) % 2 != 0 {
        return Err(SwError::DegenerateSeifertMatrix);
    }
    let mut d = raw.shift(-(lo + hi) / 2);
    if d.eval_at_one().is_negative() {
        d = -&d;
    }
    if !d.is_palindromic() {
        return Err(SwError::DegenerateSeifertMatrix);
    }
    Ok(d)
}

/// Coefficients of the polynomial through `(k, samples[k])`, via Newton
/// divided differences over the rationals.
fn interpolate(samples: &[BigInt]) -> Vec<BigInt> {
    let n = samples.len();
    let mut dd: Vec<BigRational> = samples.iter().map(|s| BigRational::from_integer(s.clone())).collect();
    for level in 1..n {
        for i in (level..n).rev() {
            dd[i] = (&dd[i] - &dd[i - 1]) / BigRational::from_integer(BigInt::from(level));
        }
    }
    // Horner on the Newton form Σ dd[i] · Π_{j<i} (t − j).
    let mut poly: Vec<BigRational> = vec![BigRational::zero(); n.max(1)];
    for i in (0..n).rev() {
        // poly = poly·(t − i) + dd[i]
        let mut next = vec![BigRational::zero(); n.max(1)];
        for (k, c) in poly.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if k + 1 < next.len() {
                next[k + 1] += c;
            }
            next[k] -= c * BigRational::from_integer(BigInt::from(i));
        }
        next[0] += &dd[i];
        poly = next;
    }
    poly.into_iter()
        .map(|c| {
            assert!(c.is_integer(), "integer samples of an integer polynomial");
            c.to_integer()
        })
        .collect()
}

/// A knot from one of the built-in families, or by Seifert matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KnotSpec {
    /// Torus knot T(2, 2k+1); `k = 0` is the unknot.
    Torus(u32),
    /// Twist knot with `k` full twists; `k = 0` is the unknot.
    Twist(i64),
    Seifert(IntMatrix),
}

impl KnotSpec {
    pub fn unknot() -> Self {
        KnotSpec::Torus(0)
    }

    pub fn trefoil() -> Self {
        KnotSpec::Torus(1)
    }

    pub fn seifert_matrix(&self) -> IntMatrix {
        match self {
            KnotSpec::Torus(k) => {
                let n = 2 * *k as usize;
                let mut v = IntMatrix::zeros(n, n);
                for i in 0..n {
                    v.set(i, i, BigInt::from(-1));
                    if i + 1 < n {
                        v.set(i, i + 1, BigInt::one());
                    }
                }
                v
            }
            KnotSpec::Twist(0) => IntMatrix::zeros(0, 0),
            KnotSpec::Twist(k) => IntMatrix::from_rows(&[[-1, 1], [0, *k]]),
            KnotSpec::Seifert(v) => v.clone(),
        }
    }

    pub fn alexander(&self) -> Result<LaurentPoly, SwError> {
        alexander(&self.seifert_matrix())
    }

    /// Genus of the Seifert surface the matrix comes from.
    pub fn seifert_genus(&self) -> u32 {
        (self.seifert_matrix().rows() / 2) as u32
    }

    pub fn label(&self) -> String {
        match self {
            KnotSpec::Torus(0) | KnotSpec::Twist(0) => "unknot".into(),
            KnotSpec::Torus(k) => format!("T(2,{})", 2 * k + 1),
            KnotSpec::Twist(k) => format!("twist({k})"),
            KnotSpec::Seifert(v) => format!("seifert{v}"),
        }
    }
}

impl fmt::Display for KnotSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// `t^{−(p−1)} + t^{−(p−3)} + … + t^{p−1}`.
pub fn log_multiplier(p: i64) -> Result<LaurentPoly, SwError> {
    if p < 1 {
        return Err(SwError::BadCoefficient(p));
    }
    Ok(LaurentPoly::from_terms((0..p).map(|k| (-(p - 1) + 2 * k, BigInt::one()))))
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BasicClass {
    pub class: Vec<i64>,
    pub coefficient: JsonInt,
}

/// Formal SW support: distinct cohomology vectors of a fixed rank with
/// non-zero coefficients, kept sorted by vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BasicClassSet {
    pub rank: usize,
    pub classes: Vec<BasicClass>,
}

impl BasicClassSet {
    /// Sums coefficients of repeated vectors and drops zero sums.
    pub fn new(rank: usize, entries: impl IntoIterator<Item = (Vec<i64>, BigInt)>) -> Result<Self, SwError> {
        let mut map: BTreeMap<Vec<i64>, BigInt> = BTreeMap::new();
        for (k, c) in entries {
            if k.len() != rank {
                return Err(SwError::DimensionMismatch(format!("class of length {} in rank {rank}", k.len())));
            }
            *map.entry(k).or_insert_with(BigInt::zero) += c;
        }
        map.retain(|_, c| !c.is_zero());
        Ok(BasicClassSet {
            rank,
            classes: map.into_iter().map(|(class, c)| BasicClass { class, coefficient: JsonInt(c) }).collect(),
        })
    }

    pub fn single(class: Vec<i64>) -> Self {
        let rank = class.len();
        Self::new(rank, [(class, BigInt::one())]).expect("consistent rank")
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn coefficient(&self, class: &[i64]) -> BigInt {
        self.classes.iter().find(|b| b.class == class).map(|b| b.coefficient.0.clone()).unwrap_or_default()
    }

    /// `Σ_K c_K · Σ_j a_j · [K + j·step]` for `multiplier = Σ_j a_j t^j`.
    fn multiply(&self, step: &[i64], multiplier: &LaurentPoly) -> Result<Self, SwError> {
        if step.len() != self.rank {
            return Err(SwError::DimensionMismatch(format!("step of length {} in rank {}", step.len(), self.rank)));
        }
        let mut out = Vec::new();
        for b in &self.classes {
            for (j, a) in multiplier.terms() {
                let k: Vec<i64> = b.class.iter().zip(step).map(|(x, s)| x + j * s).collect();
                out.push((k, &b.coefficient.0 * a));
            }
        }
        Self::new(self.rank, out)
    }
}

fn check_nontorsion(v: &[i64]) -> Result<(), SwError> {
    if v.iter().all(|x| *x == 0) {
        Err(SwError::TorsionClass)
    } else {
        Ok(())
    }
}

/// Multiplies by the log multiplier with `t = exp(PD[T_p])`.
pub fn sw_log_transform(sw: &BasicClassSet, pd_tp: &[i64], p: i64) -> Result<BasicClassSet, SwError> {
    check_nontorsion(pd_tp)?;
    sw.multiply(pd_tp, &log_multiplier(p)?)
}

/// Multiplies by `Δ_K` with `t = exp(2·PD[T])`.
pub fn sw_knot_surgery(sw: &BasicClassSet, pd_t: &[i64], delta: &LaurentPoly) -> Result<BasicClassSet, SwError> {
    check_nontorsion(pd_t)?;
    let doubled: Vec<i64> = pd_t.iter().map(|x| 2 * x).collect();
    sw.multiply(&doubled, delta)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AdjunctionVerdict {
    Satisfied,
    Violated,
    NotApplicable,
}

fn square(alpha: &[i64], q: &IntMatrix) -> Result<i64, SwError> {
    if q.rows() != alpha.len() || q.cols() != alpha.len() {
        return Err(SwError::DimensionMismatch(format!("class of length {} against a {}×{} form", alpha.len(), q.rows(), q.cols())));
    }
    q.bilinear(alpha, alpha).to_i64().ok_or_else(|| SwError::DimensionMismatch("square overflows i64".into()))
}

fn evaluate(k: &[i64], alpha: &[i64]) -> Result<i64, SwError> {
    if k.len() != alpha.len() {
        return Err(SwError::DimensionMismatch(format!("class of length {} against {}", k.len(), alpha.len())));
    }
    Ok(k.iter().zip(alpha).map(|(a, b)| a * b).sum())
}

/// `α·α + |⟨K, α⟩| ≤ 2g − 2`, applicable when `α·α ≥ 0`, or the manifold is of
/// simple type and `g ≥ 1`.
pub fn adjunction_check(
    k: &[i64],
    alpha: &[i64],
    q: &IntMatrix,
    genus: i64,
    simple_type: bool,
) -> Result<AdjunctionVerdict, SwError> {
    let a2 = square(alpha, q)?;
    let pairing = evaluate(k, alpha)?;
    if alpha.iter().all(|x| *x == 0) || (a2 < 0 && !(simple_type && genus >= 1)) {
        return Ok(AdjunctionVerdict::NotApplicable);
    }
    Ok(if a2 + pairing.abs() <= 2 * genus - 2 {
        AdjunctionVerdict::Satisfied
    } else {
        AdjunctionVerdict::Violated
    })
}

/// Least genus the adjunction inequality allows for a surface representing
/// `α`, over all basic classes. For `α·α < 0` (simple type only) the bound
/// applies to representatives of positive genus. Zero when nothing applies.
pub fn genus_lower_bound(basics: &BasicClassSet, alpha: &[i64], q: &IntMatrix, simple_type: bool) -> Result<i64, SwError> {
    if basics.is_empty() {
        return Err(SwError::EmptyBasicSet);
    }
    let a2 = square(alpha, q)?;
    let mut worst = 0i64;
    for b in &basics.classes {
        worst = worst.max(evaluate(&b.class, alpha)?.abs());
    }
    if alpha.iter().all(|x| *x == 0) || (a2 < 0 && !simple_type) {
        return Ok(0);
    }
    // 2g − 2 ≥ α² + |⟨K,α⟩|  ⇔  g ≥ ⌈(α² + |⟨K,α⟩| + 2) / 2⌉
    let need = a2 + worst + 2;
    Ok((need + 1).div_euclid(2).max(0))
}
