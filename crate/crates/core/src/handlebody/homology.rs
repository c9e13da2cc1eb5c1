use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use super::{Class, Handlebody, HandlebodyError};
use crate::intlat::{classify_form, cokernel, kernel_basis, AbelianGroup, FormClass, IntMatrix};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HomologyReport {
    pub h1: AbelianGroup,
    pub h2_free_rank: usize,
    pub h2_torsion: AbelianGroup,
    pub form: FormClass,
    pub boundary_h1: AbelianGroup,
}

impl HomologyReport {
    /// H1 = 0, rank 2, unimodular form, homology-sphere boundary.
    pub fn is_nucleus_like(&self) -> bool {
        self.h1.is_trivial() && self.h2_free_rank == 2 && self.form.unimodular && self.boundary_h1.is_trivial()
    }
}

/// 1-handles × 2-handles matrix of exponent sums, both in name order.
pub fn run_over_matrix(x: &Handlebody) -> IntMatrix {
    let ones: Vec<&String> = x.one_handles.iter().collect();
    let twos: Vec<&String> = x.two_handles.keys().collect();
    let mut m = IntMatrix::zeros(ones.len(), twos.len());
    for (j, name) in twos.iter().enumerate() {
        for (g, e) in x.run_over(name) {
            let i = ones.iter().position(|o| **o == g).expect("validated word");
            m.set(i, j, BigInt::from(e));
        }
    }
    m
}

fn linking_matrix(x: &Handlebody) -> IntMatrix {
    let twos: Vec<&String> = x.two_handles.keys().collect();
    let n = twos.len();
    let mut m = IntMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            m.set(i, j, BigInt::from(x.linking(twos[i], twos[j])));
        }
    }
    m
}

/// `[[L, Rᵀ], [R, 0]]`: columns are 2-handles then 1-handles, by name.
pub fn boundary_presentation(x: &Handlebody) -> IntMatrix {
    let l = linking_matrix(x);
    let r = run_over_matrix(x);
    let (n2, n1) = (x.two_handles.len(), x.one_handles.len());
    let mut p = IntMatrix::zeros(n2 + n1, n2 + n1);
    for i in 0..n2 {
        for j in 0..n2 {
            p.set(i, j, l.get(i, j).clone());
        }
    }
    for a in 0..n1 {
        for j in 0..n2 {
            p.set(n2 + a, j, r.get(a, j).clone());
            p.set(j, n2 + a, r.get(a, j).clone());
        }
    }
    p
}

/// A basis of H₂ as chains (saturated kernel of the run-over matrix) and the
/// intersection form in that basis.
pub fn intersection_form(x: &Handlebody) -> (Vec<Class>, IntMatrix) {
    let basis = kernel_basis(&run_over_matrix(x));
    let form = linking_matrix(x).congruent(&basis);
    let names: Vec<&String> = x.two_handles.keys().collect();
    let classes = (0..basis.cols())
        .map(|k| {
            names
                .iter()
                .enumerate()
                .filter_map(|(i, n)| {
                    let v = i64::try_from(basis.get(i, k)).expect("kernel coefficient fits in i64");
                    (v != 0).then(|| ((*n).clone(), v))
                })
                .collect()
        })
        .collect();
    (classes, form)
}

pub fn homology(x: &Handlebody) -> Result<HomologyReport, HandlebodyError> {
    x.validate()?;
    let r = run_over_matrix(x);
    let (_, form) = intersection_form(x);
    let form = classify_form(&form).expect("congruent to a symmetric matrix");
    Ok(HomologyReport {
        h1: cokernel(&r),
        h2_free_rank: form.rank,
        h2_torsion: AbelianGroup::trivial(),
        form,
        boundary_h1: cokernel(&boundary_presentation(x)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::handlebody::{boundary_sum, cusp_neighborhood, gompf_nucleus, TwoHandle};
    use crate::intlat::{Definiteness, Parity};

    #[test]
    fn gompf_examples() {
        let h = homology(&gompf_nucleus(3).unwrap()).unwrap();
        assert!(h.is_nucleus_like());
        assert_eq!(h.form.parity, Parity::Odd);
        assert_eq!(h.form.definiteness, Definiteness::Indefinite);
        let (_, q) = intersection_form(&gompf_nucleus(3).unwrap());
        assert_eq!(q, IntMatrix::from_rows(&[[0, 1], [1, -3]]));
    }

    #[test]
    fn cusp_example() {
        let x = cusp_neighborhood();
        let h = homology(&x).unwrap();
        assert!(h.h1.is_trivial());
        assert_eq!(h.h2_free_rank, 1);
        assert_eq!(intersection_form(&x).1, IntMatrix::from_rows(&[[0]]));
        assert_eq!(h.boundary_h1, AbelianGroup::free(1));
    }

    #[test]
    fn boundary_sum_of_two_g2() {
        let g = gompf_nucleus(2).unwrap();
        let x = boundary_sum(&g, &g);
        let h = homology(&x).unwrap();
        assert_eq!(h.h2_free_rank, 4);
        let (_, q) = intersection_form(&x);
        let single = IntMatrix::from_rows(&[[0, 1], [1, -2]]);
        // name order interleaves the copies, so compare invariants
        assert_eq!(q.determinant(), single.direct_sum(&single).determinant());
        assert_eq!(h.form.signature, 0);
    }

    #[test]
    fn one_handles_and_torsion() {
        // a 1-handle with a 2-handle running over it twice: H1 = Z/2, H2 = 0,
        // boundary = L(4,1)-like presentation [[f,2],[2,0]]
        let mut x = Handlebody::default();
        x.one_handles.insert("a".into());
        x.two_handles.insert(
            "k".into(),
            TwoHandle { attaching_word: "a a".parse().unwrap(), framing: 3, ..TwoHandle::default() },
        );
        let h = homology(&x).unwrap();
        assert_eq!(h.h1.to_string(), "Z/2");
        assert_eq!(h.h2_free_rank, 0);
        assert_eq!(h.boundary_h1.to_string(), "Z/4");
    }

    #[test]
    fn cancelling_pair_is_trivial() {
        let mut x = Handlebody::default();
        x.one_handles.insert("a".into());
        x.two_handles.insert("k".into(), TwoHandle { attaching_word: "a".parse().unwrap(), ..TwoHandle::default() });
        let h = homology(&x).unwrap();
        assert!(h.h1.is_trivial() && h.h2_free_rank == 0 && h.boundary_h1.is_trivial());
    }
}
