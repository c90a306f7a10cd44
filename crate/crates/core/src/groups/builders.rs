//! The concrete groups the reductions are built from.

use super::element::Element;
use super::matrix::IntMatrix;
use super::spec::GroupSpec;
use crate::error::{Error, Result};

/// A group `H` with elements `x, s, y` such that a positive word over
/// `{x, s, y}` evaluates to `s` exactly when it is `x^l s y^l`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XsyGroup {
    pub spec: GroupSpec,
    pub x: Element,
    pub s: Element,
    pub y: Element,
}

/// Which [`XsyGroup`] to use for the "pair of submonoids" step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum XsyChoice {
    /// `Z^2 ⋊ Z` with `s` rotating the lattice by a quarter turn.
    #[default]
    Rotation,
    /// `Z^n ⋊ Z` with `s` the cyclic shift, `n ≥ 3`.
    CyclicShift(usize),
}

impl XsyChoice {
    pub fn build(self) -> Result<XsyGroup> {
        match self {
            XsyChoice::Rotation => Ok(build_prop3_group()),
            XsyChoice::CyclicShift(n) => build_cyclic_shift_group(n),
        }
    }
}

/// `H = <x, s, y | [x,y] = 1, x^s = y^{-1}, y^s = x>`, realised as `Z^2 ⋊ Z`
/// with the top generator acting by a quarter-turn rotation. The top exponent
/// is never reduced mod 4.
pub fn build_prop3_group() -> XsyGroup {
    // conjugation u ↦ s u s^{-1}: x ↦ y, y ↦ -x
    let rot = IntMatrix::from_columns(&[vec![0, 1], vec![-1, 0]]).expect("2x2");
    let spec = GroupSpec::semidirect_integer(2, rot, 4).expect("rotation has order 4");
    XsyGroup {
        x: lattice(vec![1, 0], 0),
        s: lattice(vec![0, 0], 1),
        y: lattice(vec![0, 1], 0),
        spec,
    }
}

/// `H = Z^n ⋊ Z` with `s^{-1} e_i s = e_{i+1}` (indices mod n), `x = e_0^{-1}`,
/// `y = e_1`.
pub fn build_cyclic_shift_group(n: usize) -> Result<XsyGroup> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!(
            "cyclic shift group needs n >= 3, got {n}"
        )));
    }
    // s e_i s^{-1} = e_{i-1}
    let cols: Vec<Vec<i64>> = (0..n).map(|i| unit(n, (i + n - 1) % n)).collect();
    let shift = IntMatrix::from_columns(&cols)?;
    let spec = GroupSpec::semidirect_integer(n, shift, n as u32)?;
    let mut x = vec![0; n];
    x[0] = -1;
    Ok(XsyGroup {
        x: lattice(x, 0),
        s: lattice(vec![0; n], 1),
        y: lattice(unit(n, 1), 0),
        spec,
    })
}

/// Basis vector `e_i` of `Z wr Z_n`.
pub fn wreath_basis(n: usize, i: usize) -> Element {
    Element::Wreath {
        coords: unit(n, i),
        shift: 0,
    }
}

/// The shifting element `s^k` of `Z wr Z_n`.
pub fn wreath_shift(n: usize, k: usize) -> Element {
    Element::Wreath {
        coords: vec![0; n],
        shift: (k % n) as u32,
    }
}

/// Edge letter `t_ij = e_i s^{j-i}` of `Z wr Z_n`.
pub fn wreath_edge(n: usize, i: usize, j: usize) -> Element {
    Element::Wreath {
        coords: unit(n, i),
        shift: ((j + n - i % n) % n) as u32,
    }
}

/// `e_0^l s`, the value of a path word `0 → 1` of length `l`.
pub fn wreath_path_value(n: usize, l: i64) -> Element {
    let mut coords = vec![0; n];
    coords[0] = l;
    Element::Wreath {
        coords,
        shift: (1 % n) as u32,
    }
}

fn lattice(vec: Vec<i64>, top: i64) -> Element {
    Element::Semidirect { vec, top }
}

fn unit(n: usize, i: usize) -> Vec<i64> {
    let mut v = vec![0; n];
    v[i] = 1;
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::GeneratorWord;

    fn conj(spec: &GroupSpec, a: &Element, by: &Element) -> Element {
        let inv = spec.invert(by).unwrap();
        spec.product([&inv, a, by]).unwrap()
    }

    #[test]
    fn prop3_presentation_relations() {
        let h = build_prop3_group();
        let sp = &h.spec;
        assert_eq!(conj(sp, &h.x, &h.s), sp.invert(&h.y).unwrap());
        assert_eq!(conj(sp, &h.y, &h.s), h.x);
        assert_eq!(
            sp.multiply(&h.x, &h.y).unwrap(),
            sp.multiply(&h.y, &h.x).unwrap()
        );
    }

    #[test]
    fn prop3_action_order_and_unreduced_top() {
        let h = build_prop3_group();
        let GroupSpec::SemidirectLattice(sd) = &h.spec else {
            unreachable!()
        };
        let m = sd.action(1);
        assert!(m.pow(4).is_identity());
        assert!(!m.pow(2).is_identity());
        assert_ne!(h.spec.pow(&h.s, 5).unwrap(), h.s);
    }

    #[test]
    fn prop3_rewrite_example() {
        // x y s x = s x x y^{-1}
        let h = build_prop3_group();
        let sp = &h.spec;
        let yinv = sp.invert(&h.y).unwrap();
        let lhs = sp.product([&h.x, &h.y, &h.s, &h.x]).unwrap();
        let rhs = sp.product([&h.s, &h.x, &h.x, &yinv]).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn cyclic_shift_relations() {
        for n in 3..=6 {
            let h = build_cyclic_shift_group(n).unwrap();
            let sp = &h.spec;
            for i in 0..n {
                let mut ei = vec![0; n];
                ei[i] = 1;
                let mut ej = vec![0; n];
                ej[(i + 1) % n] = 1;
                assert_eq!(conj(sp, &lattice(ei, 0), &h.s), lattice(ej, 0));
            }
        }
    }

    #[test]
    fn cyclic_shift_examples() {
        let h = build_cyclic_shift_group(3).unwrap();
        let gens = [h.x.clone(), h.s.clone(), h.y.clone()];
        let eval = |w: &[usize]| {
            h.spec
                .evaluate_word(&gens, &GeneratorWord::positive(w.iter().copied()))
                .unwrap()
        };
        assert_eq!(eval(&[0, 1, 2]), h.s);
        assert_ne!(eval(&[0, 0, 1, 2]), h.s);
        let h4 = build_cyclic_shift_group(4).unwrap();
        let gens4 = [h4.x.clone(), h4.s.clone(), h4.y.clone()];
        assert_eq!(
            h4.spec
                .evaluate_word(&gens4, &GeneratorWord::positive([1]))
                .unwrap(),
            h4.s
        );
        assert!(build_cyclic_shift_group(2).is_err());
    }

    #[test]
    fn wreath_edges() {
        let sp = GroupSpec::Wreath { n: 3 };
        // t_01 t_11 = e_0^2 s
        let w = sp
            .multiply(&wreath_edge(3, 0, 1), &wreath_edge(3, 1, 1))
            .unwrap();
        assert_eq!(w, wreath_path_value(3, 2));
        let e0 = wreath_basis(3, 0);
        let s = wreath_shift(3, 1);
        assert_eq!(sp.product([&e0, &e0, &s]).unwrap(), w);
        assert_eq!(wreath_edge(3, 0, 1), sp.multiply(&e0, &s).unwrap());
    }
}
