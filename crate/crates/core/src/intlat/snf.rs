use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{IntMatrix, JsonInt};

/// `left · M · right = diag(diagonal)` padded with zeros to the shape of `M`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SnfResult {
    pub diagonal: Vec<BigInt>,
    pub left: IntMatrix,
    pub right: IntMatrix,
}

impl SnfResult {
    /// Number of non-zero invariant factors.
    pub fn rank(&self) -> usize {
        self.diagonal.iter().filter(|d| !d.is_zero()).count()
    }
}

pub fn smith_normal_form(m: &IntMatrix) -> SnfResult {
    let (rows, cols) = (m.rows(), m.cols());
    let mut a = m.clone();
    let mut left = IntMatrix::identity(rows);
    let mut right = IntMatrix::identity(cols);
    let steps = rows.min(cols);

    for t in 0..steps {
        // pivot: smallest non-zero magnitude in the trailing block
        let Some((pi, pj)) = min_nonzero(&a, t) else { break };
        a.swap_rows(t, pi);
        left.swap_rows(t, pi);
        a.swap_cols(t, pj);
        right.swap_cols(t, pj);

        loop {
            let mut dirty = false;
            for i in t + 1..rows {
                if a.get(i, t).is_zero() {
                    continue;
                }
                let q = -a.get(i, t).div_floor(a.get(t, t));
                a.add_row_multiple(i, t, &q);
                left.add_row_multiple(i, t, &q);
                if !a.get(i, t).is_zero() {
                    dirty = true;
                }
            }
            for j in t + 1..cols {
                if a.get(t, j).is_zero() {
                    continue;
                }
                let q = -a.get(t, j).div_floor(a.get(t, t));
                a.add_col_multiple(j, t, &q);
                right.add_col_multiple(j, t, &q);
                if !a.get(t, j).is_zero() {
                    dirty = true;
                }
            }
            if dirty {
                // a remainder is now smaller than the pivot; bring it up
                let (bi, bj) = min_in_cross(&a, t);
                a.swap_rows(t, bi);
                left.swap_rows(t, bi);
                a.swap_cols(t, bj);
                right.swap_cols(t, bj);
                continue;
            }
            // the pivot must divide everything below and to the right
            let bad = (t + 1..rows)
                .flat_map(|i| (t + 1..cols).map(move |j| (i, j)))
                .find(|&(i, j)| !a.get(i, j).is_multiple_of(a.get(t, t)));
            match bad {
                Some((i, _)) => {
                    let one = BigInt::one();
                    a.add_row_multiple(t, i, &one);
                    left.add_row_multiple(t, i, &one);
                }
                None => break,
            }
        }
        if a.get(t, t).is_negative() {
            a.negate_row(t);
            left.negate_row(t);
        }
    }

    let diagonal = (0..steps).map(|i| a.get(i, i).clone()).collect();
    SnfResult { diagonal, left, right }
}

fn min_nonzero(a: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in t..a.rows() {
        for j in t..a.cols() {
            let v = a.get(i, j);
            if v.is_zero() {
                continue;
            }
            if best.is_none_or(|(bi, bj)| v.abs() < a.get(bi, bj).abs()) {
                best = Some((i, j));
            }
        }
    }
    best
}

fn min_in_cross(a: &IntMatrix, t: usize) -> (usize, usize) {
    let mut best = (t, t);
    let mut consider = |i: usize, j: usize| {
        let v = a.get(i, j);
        let b = a.get(best.0, best.1);
        if !v.is_zero() && (b.is_zero() || v.abs() < b.abs()) {
            best = (i, j);
        }
    };
    for i in t..a.rows() {
        consider(i, t);
    }
    for j in t..a.cols() {
        consider(t, j);
    }
    best
}

/// Finitely generated abelian group `Z^free_rank ⊕ ⊕ Z/torsion_i`, torsion
/// factors > 1 in divisibility order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AbelianGroup {
    pub free_rank: usize,
    pub torsion: Vec<JsonInt>,
}

impl AbelianGroup {
    pub fn trivial() -> Self {
        AbelianGroup { free_rank: 0, torsion: Vec::new() }
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    pub fn free(rank: usize) -> Self {
        AbelianGroup { free_rank: rank, torsion: Vec::new() }
    }

    /// Invariant factors as a list: torsion factors followed by one zero per
    /// free summand.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        let mut out: Vec<BigInt> = self.torsion.iter().map(|t| t.0.clone()).collect();
        out.extend(std::iter::repeat_n(BigInt::zero(), self.free_rank));
        out
    }
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        parts.extend(self.torsion.iter().map(|t| format!("Z/{}", t.0)));
        write!(f, "{}", parts.join(" + "))
    }
}

/// `Z^rows / M·Z^cols`.
pub fn cokernel(m: &IntMatrix) -> AbelianGroup {
    let snf = smith_normal_form(m);
    let rank = snf.rank();
    let torsion = snf
        .diagonal
        .iter()
        .filter(|d| !d.is_zero() && !d.is_one())
        .cloned()
        .map(JsonInt)
        .collect();
    AbelianGroup { free_rank: m.rows() - rank, torsion }
}

/// A basis of `{x : M x = 0}` as the columns of the returned matrix
/// (`cols(M) × nullity`). The basis spans the saturated kernel lattice.
pub fn kernel_basis(m: &IntMatrix) -> IntMatrix {
    let snf = smith_normal_form(m);
    let rank = snf.rank();
    let n = m.cols();
    let mut out = IntMatrix::zeros(n, n - rank);
    for (k, j) in (rank..n).enumerate() {
        for i in 0..n {
            out.set(i, k, snf.right.get(i, j).clone());
        }
    }
    out
}
