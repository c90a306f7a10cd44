//! Finite subgroups of `GL_n(Z)`: signed permutation matrices, vectors with
//! trivial stabilizer, and averaged invariant forms.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::groups::{FiniteMatrixGroup, IntMatrix};

/// Largest dimension accepted by [`signed_permutation_group`] (`4!·2^4 = 384`).
pub const MAX_SIGNED_PERM_DIM: usize = 4;

/// A vector whose `A`-orbit has `|A|` elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrivialStabVector {
    pub v: Vec<i64>,
    pub orbit_size: usize,
}

/// Unscaled `A`-invariant Gram matrix `Σ_{a∈A} aᵀa`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GramMatrix(pub IntMatrix);

impl GramMatrix {
    /// `uᵀ G w`.
    pub fn form(&self, u: &[i64], w: &[i64]) -> i128 {
        let gw = self.0.mul_vec(w);
        u.iter()
            .zip(&gw)
            .map(|(a, b)| *a as i128 * *b as i128)
            .sum()
    }

    pub fn is_invariant_under(&self, group: &FiniteMatrixGroup) -> bool {
        group
            .elements()
            .iter()
            .all(|a| a.transpose().mul(&self.0).mul(a) == self.0)
    }
}

/// All `n × n` matrices with exactly one `±1` in every row and column,
/// identity first and the rest ordered by [`IntMatrix::key_bytes`].
pub fn signed_permutation_group(n: usize) -> Result<FiniteMatrixGroup> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "signed permutation group needs n >= 1".into(),
        ));
    }
    if n > MAX_SIGNED_PERM_DIM {
        return Err(Error::ResourceLimit {
            what: format!("signed permutation group of dimension {n}"),
            cap: MAX_SIGNED_PERM_DIM,
            stats: None,
        });
    }
    let mut mats = Vec::new();
    for perm in permutations(n) {
        for signs in 0u32..(1 << n) {
            let mut m = IntMatrix::zero(n);
            for (row, &col) in perm.iter().enumerate() {
                let sign = if signs >> row & 1 == 1 { -1 } else { 1 };
                m.set(row, col, sign);
            }
            mats.push(m);
        }
    }
    let id = IntMatrix::identity(n);
    mats.retain(|m| *m != id);
    mats.sort_by_key(|m| m.key_bytes());
    mats.insert(0, id);
    FiniteMatrixGroup::from_elements(mats)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                rec(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

pub fn orbit_size(group: &FiniteMatrixGroup, v: &[i64]) -> usize {
    group
        .elements()
        .iter()
        .map(|a| a.mul_vec(v))
        .collect::<HashSet<_>>()
        .len()
}

/// Finds `v` with trivial stabilizer: `(1, 2, …, n)` first, then every vector
/// of the box `[-r, r]^n` in lexicographic order for `r = 1, 2, …`.
///
/// Such a vector always exists: the fixed lattice of every non-identity
/// element has rank below `n`, so finitely many proper sublattices cannot
/// cover a large enough box.
pub fn find_trivial_stabilizer_vector(group: &FiniteMatrixGroup) -> TrivialStabVector {
    let n = group.dim();
    let order = group.order();
    let first: Vec<i64> = (1..=n as i64).collect();
    if orbit_size(group, &first) == order {
        return TrivialStabVector {
            v: first,
            orbit_size: order,
        };
    }
    let mut r = 1i64;
    loop {
        let mut v = vec![-r; n];
        loop {
            if orbit_size(group, &v) == order {
                return TrivialStabVector {
                    v,
                    orbit_size: order,
                };
            }
            if !next_in_box(&mut v, r) {
                break;
            }
        }
        r += 1;
    }
}

/// Lexicographic successor in `[-r, r]^n`, last coordinate fastest.
fn next_in_box(v: &mut [i64], r: i64) -> bool {
    for k in (0..v.len()).rev() {
        if v[k] < r {
            v[k] += 1;
            for x in &mut v[k + 1..] {
                *x = -r;
            }
            return true;
        }
    }
    false
}

/// `Σ_{a∈A} aᵀ a`, the standard form averaged over the group (unscaled).
pub fn invariant_inner_product(group: &FiniteMatrixGroup) -> GramMatrix {
    let n = group.dim();
    GramMatrix(
        group
            .elements()
            .iter()
            .fold(IntMatrix::zero(n), |acc, a| acc.add(&a.transpose().mul(a))),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::DEFAULT_GROUP_CAP;

    fn m(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn signed_perm_sizes() {
        assert_eq!(signed_permutation_group(1).unwrap().order(), 2);
        assert_eq!(signed_permutation_group(2).unwrap().order(), 8);
        assert_eq!(signed_permutation_group(3).unwrap().order(), 48);
        assert_eq!(signed_permutation_group(4).unwrap().order(), 384);
        assert!(matches!(
            signed_permutation_group(5),
            Err(Error::ResourceLimit { .. })
        ));
        assert!(signed_permutation_group(0).is_err());
        let one = signed_permutation_group(1).unwrap();
        assert_eq!(one.elements(), &[m(&[&[1]]), m(&[&[-1]])]);
    }

    #[test]
    fn signed_perm_matches_closure_of_generators() {
        for n in 1..=3 {
            let mut gens = vec![];
            let mut flip = IntMatrix::identity(n);
            flip.set(0, 0, -1);
            gens.push(flip);
            for i in 0..n.saturating_sub(1) {
                let mut swap = IntMatrix::identity(n);
                swap.set(i, i, 0);
                swap.set(i + 1, i + 1, 0);
                swap.set(i, i + 1, 1);
                swap.set(i + 1, i, 1);
                gens.push(swap);
            }
            let closed = FiniteMatrixGroup::generate(n, &gens, DEFAULT_GROUP_CAP).unwrap();
            assert_eq!(closed, signed_permutation_group(n).unwrap(), "n={n}");
        }
    }

    #[test]
    fn stabilizer_vectors() {
        let a = signed_permutation_group(2).unwrap();
        let v = find_trivial_stabilizer_vector(&a);
        assert_eq!(v.v, vec![1, 2]);
        assert_eq!(v.orbit_size, 8);

        let trivial = FiniteMatrixGroup::generate(2, &[], DEFAULT_GROUP_CAP).unwrap();
        assert_eq!(find_trivial_stabilizer_vector(&trivial).orbit_size, 1);

        let rot =
            FiniteMatrixGroup::generate(2, &[m(&[&[0, -1], &[1, 0]])], DEFAULT_GROUP_CAP).unwrap();
        let v = find_trivial_stabilizer_vector(&rot);
        assert_eq!(v.v, vec![1, 2]);
        assert_eq!(v.orbit_size, 4);
    }

    #[test]
    fn stabilizer_search_falls_back_to_boxes() {
        // an involution fixing (1, 2)
        let inv = m(&[&[-1, 1], &[0, 1]]);
        assert_eq!(inv.mul_vec(&[1, 2]), vec![1, 2]);
        let g = FiniteMatrixGroup::generate(2, &[inv], DEFAULT_GROUP_CAP).unwrap();
        assert_eq!(orbit_size(&g, &[1, 2]), 1);
        let v = find_trivial_stabilizer_vector(&g);
        assert_eq!(v.orbit_size, 2);
        assert_eq!(v.v, vec![-1, -1]);
    }

    #[test]
    fn box_successor_order() {
        let mut v = vec![-1, -1];
        let mut seen = vec![v.clone()];
        while next_in_box(&mut v, 1) {
            seen.push(v.clone());
        }
        assert_eq!(seen.len(), 9);
        assert_eq!(seen[1], vec![-1, 0]);
        assert_eq!(seen[8], vec![1, 1]);
    }

    #[test]
    fn gram_examples() {
        let a = signed_permutation_group(2).unwrap();
        let g = invariant_inner_product(&a);
        assert_eq!(g.0, m(&[&[8, 0], &[0, 8]]));
        let trivial = FiniteMatrixGroup::generate(2, &[], DEFAULT_GROUP_CAP).unwrap();
        assert_eq!(invariant_inner_product(&trivial).0, IntMatrix::identity(2));
    }

    #[test]
    fn gram_order_three_by_hand() {
        let gen = m(&[&[0, -1], &[1, -1]]);
        let a = FiniteMatrixGroup::generate(2, std::slice::from_ref(&gen), DEFAULT_GROUP_CAP).unwrap();
        assert_eq!(a.order(), 3);
        // I + MᵀM + (M²)ᵀM² written out entrywise
        let mtm = m(&[&[1, -1], &[-1, 2]]);
        let m2tm2 = m(&[&[2, -1], &[-1, 1]]);
        let expected = IntMatrix::identity(2).add(&mtm).add(&m2tm2);
        assert_eq!(expected, m(&[&[4, -2], &[-2, 4]]));
        let g = invariant_inner_product(&a);
        assert_eq!(g.0, expected);
        assert!(g.is_invariant_under(&a));
        assert!(g.0.is_positive_definite());
    }
}
