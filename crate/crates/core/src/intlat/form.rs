use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{IntMatrix, JsonInt, LatticeError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    Even,
    Odd,
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        })
    }
}

/// `Semidefinite` covers forms with a radical whose non-zero part has a
/// single sign, including the empty form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Definiteness {
    Positive,
    Negative,
    Indefinite,
    Semidefinite,
}

impl fmt::Display for Definiteness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Definiteness::Positive => "positive definite",
            Definiteness::Negative => "negative definite",
            Definiteness::Indefinite => "indefinite",
            Definiteness::Semidefinite => "semidefinite",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FormClass {
    /// Dimension of the lattice.
    pub rank: usize,
    pub signature: i64,
    pub nullity: usize,
    pub parity: Parity,
    pub unimodular: bool,
    pub definiteness: Definiteness,
    pub determinant: JsonInt,
}

impl fmt::Display for FormClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "rank {}, signature {}, {}, {}, {}",
            self.rank,
            self.signature,
            self.parity,
            if self.unimodular { "unimodular" } else { "non-unimodular" },
            self.definiteness
        )
    }
}

pub fn classify_form(q: &IntMatrix) -> Result<FormClass, LatticeError> {
    if !q.is_symmetric() {
        return Err(LatticeError::NonSymmetric);
    }
    let n = q.rows();
    let (plus, minus) = inertia(q);
    let nullity = n - plus - minus;
    let parity = if (0..n).all(|i| q.get(i, i).is_even()) { Parity::Even } else { Parity::Odd };
    let det = q.determinant();
    let definiteness = if n > 0 && plus == n {
        Definiteness::Positive
    } else if n > 0 && minus == n {
        Definiteness::Negative
    } else if plus > 0 && minus > 0 {
        Definiteness::Indefinite
    } else {
        Definiteness::Semidefinite
    };
    Ok(FormClass {
        rank: n,
        signature: plus as i64 - minus as i64,
        nullity,
        parity,
        unimodular: det.abs().is_one(),
        definiteness,
        determinant: JsonInt(det),
    })
}

/// Counts of positive and negative diagonal entries after rational
/// congruence diagonalisation. A zero pivot is repaired by replacing the
/// basis vector `e_k` with `e_k ± e_j` for the first `j` with `q(e_k,e_j) ≠ 0`.
#[allow(clippy::needless_range_loop)]
fn inertia(q: &IntMatrix) -> (usize, usize) {
    let n = q.rows();
    let mut a: Vec<Vec<BigRational>> = (0..n)
        .map(|i| (0..n).map(|j| BigRational::from_integer(q.get(i, j).clone())).collect())
        .collect();
    let (mut plus, mut minus) = (0, 0);
    for k in 0..n {
        if a[k][k].is_zero() {
            let Some(j) = (k + 1..n).find(|&j| !a[k][j].is_zero()) else {
                continue; // e_k lies in the radical of the remaining block
            };
            let two = BigRational::from_integer(BigInt::from(2));
            let sign = if (&a[k][k] + &two * &a[k][j] + &a[j][j]).is_zero() {
                -BigRational::one()
            } else {
                BigRational::one()
            };
            // row_k += sign·row_j, then col_k += sign·col_j
            for c in 0..n {
                let v = &sign * &a[j][c];
                a[k][c] += v;
            }
            for r in 0..n {
                let v = &sign * &a[r][j];
                a[r][k] += v;
            }
        }
        let pivot = a[k][k].clone();
        for i in k + 1..n {
            if a[i][k].is_zero() {
                continue;
            }
            let f = &a[i][k] / &pivot;
            for c in 0..n {
                let v = &f * &a[k][c];
                a[i][c] -= v;
            }
            for r in 0..n {
                let v = &f * &a[r][k];
                a[r][i] -= v;
            }
        }
        if pivot.is_positive() {
            plus += 1;
        } else {
            minus += 1;
        }
    }
    (plus, minus)
}
