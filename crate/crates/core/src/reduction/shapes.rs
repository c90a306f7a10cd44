//! Syntactic recognisers for the word shapes the constructions rely on.

use crate::groups::FiniteMatrixGroup;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum XsyLetter {
    X,
    S,
    Y,
}

/// Returns `l` if `w = x^l s y^l`.
pub fn check_xsy_shape(w: &[XsyLetter]) -> Option<usize> {
    let l = w.iter().take_while(|&&c| c == XsyLetter::X).count();
    if w.len() != 2 * l + 1 || w[l] != XsyLetter::S {
        return None;
    }
    w[l + 1..].iter().all(|&c| c == XsyLetter::Y).then_some(l)
}

/// For letters `t_ij` of `Z wr Z_n` given as `(i, j)`: returns the vertex
/// sequence `(0 = i_0, i_1, …, i_l = 1)` if consecutive letters chain.
pub fn check_path_shape(n: usize, w: &[(usize, usize)]) -> Option<Vec<usize>> {
    if n == 0 {
        return None;
    }
    let mut path = vec![0];
    let mut at = 0;
    for &(i, j) in w {
        if i % n != at {
            return None;
        }
        at = j % n;
        path.push(at);
    }
    (at == 1 % n).then_some(path)
}

/// For letters `t_ab = a^{-1} v b` of `Z^n ⋊ A` given as element indices
/// `(a, b)`: returns the chain `(Id = a_0, a_1, …, a_l)` if consecutive
/// letters chain starting from the identity.
pub fn check_vla_shape(group: &FiniteMatrixGroup, w: &[(usize, usize)]) -> Option<Vec<usize>> {
    let mut chain = vec![group.identity()];
    for &(a, b) in w {
        if a != *chain.last().unwrap() || b >= group.order() {
            return None;
        }
        chain.push(b);
    }
    Some(chain)
}
