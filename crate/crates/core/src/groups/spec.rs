use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::element::Element;
use super::finite::FiniteMatrixGroup;
use super::matrix::IntMatrix;
use super::word::GeneratorWord;
use crate::error::{Error, Result};

/// Declarative description of a supported group.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GroupSpecRepr", into = "GroupSpecRepr")]
pub enum GroupSpec {
    FreeAbelian {
        rank: usize,
    },
    Free {
        rank: usize,
    },
    SemidirectLattice(Arc<Semidirect>),
    /// `Z wr Z_n = Z^n ⋊ Z_n` with `s^{-1} e_i s = e_{i+1}`.
    Wreath {
        n: usize,
    },
    DirectProduct(Vec<GroupSpec>),
}

/// `Z^rank ⋊ T` where `T` acts on the lattice through integer matrices.
///
/// Multiplication is `(u, t)(u', t') = (u + ρ(t)u', t t')`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Semidirect {
    rank: usize,
    top: TopGroup,
    powers: Vec<IntMatrix>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TopGroup {
    /// Infinite cyclic top acting through `action`, with `action^order = Id`.
    /// Exponents are kept in full; only the action is periodic.
    Integer {
        action: IntMatrix,
        order: u32,
    },
    /// Finite cyclic top `Z_n` acting through `action`, with `action^n = Id`.
    Cyclic {
        n: u32,
        action: IntMatrix,
    },
    Finite(FiniteMatrixGroup),
}

impl Semidirect {
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn top(&self) -> &TopGroup {
        &self.top
    }

    /// Matrix by which the top component `top` acts on the lattice.
    pub fn action(&self, top: i64) -> &IntMatrix {
        match &self.top {
            TopGroup::Integer { order, .. } => &self.powers[top.rem_euclid(*order as i64) as usize],
            TopGroup::Cyclic { .. } => &self.powers[top as usize],
            TopGroup::Finite(g) => g.matrix(top as usize),
        }
    }

    fn top_mul(&self, a: i64, b: i64) -> i64 {
        match &self.top {
            TopGroup::Integer { .. } => a + b,
            TopGroup::Cyclic { n, .. } => (a + b).rem_euclid(*n as i64),
            TopGroup::Finite(g) => g.mul(a as usize, b as usize) as i64,
        }
    }

    fn top_inv(&self, a: i64) -> i64 {
        match &self.top {
            TopGroup::Integer { .. } => -a,
            TopGroup::Cyclic { n, .. } => (-a).rem_euclid(*n as i64),
            TopGroup::Finite(g) => g.inverse(a as usize) as i64,
        }
    }

    fn top_identity(&self) -> i64 {
        match &self.top {
            TopGroup::Finite(g) => g.identity() as i64,
            _ => 0,
        }
    }

    fn top_valid(&self, a: i64) -> bool {
        match &self.top {
            TopGroup::Integer { .. } => true,
            TopGroup::Cyclic { n, .. } => (0..*n as i64).contains(&a),
            TopGroup::Finite(g) => (0..g.order() as i64).contains(&a),
        }
    }
}

impl GroupSpec {
    /// `Z^rank ⋊ Z` with the generator of `Z` acting by `action`.
    pub fn semidirect_integer(rank: usize, action: IntMatrix, order: u32) -> Result<Self> {
        check_action(rank, &action)?;
        if order == 0 {
            return Err(Error::InvalidParameter(
                "action order must be positive".into(),
            ));
        }
        if !action.pow(order).is_identity() {
            return Err(Error::InvalidParameter(format!(
                "action {action:?} does not satisfy M^{order} = Id"
            )));
        }
        let powers = (0..order).map(|k| action.pow(k)).collect();
        Ok(GroupSpec::SemidirectLattice(Arc::new(Semidirect {
            rank,
            top: TopGroup::Integer { action, order },
            powers,
        })))
    }

    /// `Z^rank ⋊ Z_n` with the generator of `Z_n` acting by `action`.
    pub fn semidirect_cyclic(rank: usize, n: u32, action: IntMatrix) -> Result<Self> {
        check_action(rank, &action)?;
        if n == 0 {
            return Err(Error::InvalidParameter(
                "cyclic top order must be positive".into(),
            ));
        }
        if !action.pow(n).is_identity() {
            return Err(Error::InvalidParameter(format!(
                "action {action:?} does not satisfy M^{n} = Id"
            )));
        }
        let powers = (0..n).map(|k| action.pow(k)).collect();
        Ok(GroupSpec::SemidirectLattice(Arc::new(Semidirect {
            rank,
            top: TopGroup::Cyclic { n, action },
            powers,
        })))
    }

    /// `Z^n ⋊ A` for a finite matrix group `A ≤ GL_n(Z)`.
    pub fn semidirect_finite(group: FiniteMatrixGroup) -> Self {
        GroupSpec::SemidirectLattice(Arc::new(Semidirect {
            rank: group.dim(),
            top: TopGroup::Finite(group),
            powers: Vec::new(),
        }))
    }

    pub fn wreath(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter(
                "wreath top order must be positive".into(),
            ));
        }
        Ok(GroupSpec::Wreath { n })
    }

    pub fn direct_product(factors: Vec<GroupSpec>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidParameter(
                "direct product needs at least one factor".into(),
            ));
        }
        Ok(GroupSpec::DirectProduct(factors))
    }

    pub fn factors(&self) -> Option<&[GroupSpec]> {
        match self {
            GroupSpec::DirectProduct(f) => Some(f),
            _ => None,
        }
    }

    pub fn identity(&self) -> Element {
        match self {
            GroupSpec::FreeAbelian { rank } => Element::FreeAbelian(vec![0; *rank]),
            GroupSpec::Free { .. } => Element::Free(Vec::new()),
            GroupSpec::SemidirectLattice(sd) => Element::Semidirect {
                vec: vec![0; sd.rank],
                top: sd.top_identity(),
            },
            GroupSpec::Wreath { n } => Element::Wreath {
                coords: vec![0; *n],
                shift: 0,
            },
            GroupSpec::DirectProduct(f) => {
                Element::Product(f.iter().map(|g| g.identity()).collect())
            }
        }
    }

    /// Checks that `a` is a canonical element of this group.
    pub fn check(&self, a: &Element) -> Result<()> {
        match (self, a) {
            (GroupSpec::FreeAbelian { rank }, Element::FreeAbelian(v)) if v.len() == *rank => {
                Ok(())
            }
            (GroupSpec::Free { rank }, Element::Free(w)) => {
                for (i, &l) in w.iter().enumerate() {
                    if l == 0 || l.unsigned_abs() as usize > *rank {
                        return Err(Error::mismatch(format!(
                            "free group letter {l} out of range for rank {rank}"
                        )));
                    }
                    if i > 0 && w[i - 1] == -l {
                        return Err(Error::mismatch("free group word is not reduced"));
                    }
                }
                Ok(())
            }
            (GroupSpec::SemidirectLattice(sd), Element::Semidirect { vec, top })
                if vec.len() == sd.rank && sd.top_valid(*top) =>
            {
                Ok(())
            }
            (GroupSpec::Wreath { n }, Element::Wreath { coords, shift })
                if coords.len() == *n && (*shift as usize) < *n =>
            {
                Ok(())
            }
            (GroupSpec::DirectProduct(f), Element::Product(parts)) if f.len() == parts.len() => {
                f.iter().zip(parts).try_for_each(|(g, p)| g.check(p))
            }
            _ => Err(Error::mismatch(format!(
                "element {a:?} does not belong to {self}"
            ))),
        }
    }

    pub fn multiply(&self, a: &Element, b: &Element) -> Result<Element> {
        match (self, a, b) {
            (GroupSpec::FreeAbelian { rank }, Element::FreeAbelian(u), Element::FreeAbelian(v))
                if u.len() == *rank && v.len() == *rank =>
            {
                Ok(Element::FreeAbelian(
                    u.iter().zip(v).map(|(x, y)| x + y).collect(),
                ))
            }
            (GroupSpec::Free { .. }, Element::Free(u), Element::Free(v)) => {
                let mut out = u.clone();
                for &l in v {
                    if out.last() == Some(&-l) {
                        out.pop();
                    } else {
                        out.push(l);
                    }
                }
                Ok(Element::Free(out))
            }
            (
                GroupSpec::SemidirectLattice(sd),
                Element::Semidirect { vec: u, top: t },
                Element::Semidirect { vec: v, top: t2 },
            ) if u.len() == sd.rank && v.len() == sd.rank => {
                let moved = sd.action(*t).mul_vec(v);
                Ok(Element::Semidirect {
                    vec: u.iter().zip(&moved).map(|(x, y)| x + y).collect(),
                    top: sd.top_mul(*t, *t2),
                })
            }
            (
                GroupSpec::Wreath { n },
                Element::Wreath {
                    coords: c,
                    shift: k,
                },
                Element::Wreath {
                    coords: c2,
                    shift: k2,
                },
            ) if c.len() == *n && c2.len() == *n => {
                let k = *k as usize;
                let coords = (0..*n).map(|j| c[j] + c2[(j + k) % n]).collect();
                Ok(Element::Wreath {
                    coords,
                    shift: ((k + *k2 as usize) % n) as u32,
                })
            }
            (GroupSpec::DirectProduct(f), Element::Product(p), Element::Product(q))
                if f.len() == p.len() && f.len() == q.len() =>
            {
                Ok(Element::Product(
                    f.iter()
                        .zip(p.iter().zip(q))
                        .map(|(g, (x, y))| g.multiply(x, y))
                        .collect::<Result<_>>()?,
                ))
            }
            _ => Err(Error::mismatch(format!(
                "cannot multiply {a:?} and {b:?} in {self}"
            ))),
        }
    }

    pub fn invert(&self, a: &Element) -> Result<Element> {
        match (self, a) {
            (GroupSpec::FreeAbelian { rank }, Element::FreeAbelian(u)) if u.len() == *rank => {
                Ok(Element::FreeAbelian(u.iter().map(|x| -x).collect()))
            }
            (GroupSpec::Free { .. }, Element::Free(w)) => {
                Ok(Element::Free(w.iter().rev().map(|l| -l).collect()))
            }
            (GroupSpec::SemidirectLattice(sd), Element::Semidirect { vec, top })
                if vec.len() == sd.rank =>
            {
                let inv_top = sd.top_inv(*top);
                let moved = sd.action(inv_top).mul_vec(vec);
                Ok(Element::Semidirect {
                    vec: moved.into_iter().map(|x| -x).collect(),
                    top: inv_top,
                })
            }
            (GroupSpec::Wreath { n }, Element::Wreath { coords, shift }) if coords.len() == *n => {
                // (c, k)^{-1} = (c', -k) with c'[j] = -c[j - k]
                let k = *shift as usize;
                let coords = (0..*n).map(|j| -coords[(j + n - k) % n]).collect();
                Ok(Element::Wreath {
                    coords,
                    shift: ((n - k) % n) as u32,
                })
            }
            (GroupSpec::DirectProduct(f), Element::Product(p)) if f.len() == p.len() => {
                Ok(Element::Product(
                    f.iter()
                        .zip(p)
                        .map(|(g, x)| g.invert(x))
                        .collect::<Result<_>>()?,
                ))
            }
            _ => Err(Error::mismatch(format!("cannot invert {a:?} in {self}"))),
        }
    }

    /// Left-to-right product of the referenced generators; the empty word is
    /// the identity.
    pub fn evaluate_word(&self, gens: &[Element], w: &GeneratorWord) -> Result<Element> {
        let mut acc = self.identity();
        for letter in w.letters() {
            let g = gens.get(letter.index).ok_or(Error::IndexOutOfRange {
                index: letter.index,
                len: gens.len(),
            })?;
            acc = if letter.inverse {
                self.multiply(&acc, &self.invert(g)?)?
            } else {
                self.multiply(&acc, g)?
            };
        }
        Ok(acc)
    }

    /// Product of a sequence of elements.
    pub fn product<'a>(&self, items: impl IntoIterator<Item = &'a Element>) -> Result<Element> {
        items
            .into_iter()
            .try_fold(self.identity(), |acc, x| self.multiply(&acc, x))
    }

    pub fn pow(&self, a: &Element, exp: i64) -> Result<Element> {
        let base = if exp < 0 { self.invert(a)? } else { a.clone() };
        let mut acc = self.identity();
        for _ in 0..exp.unsigned_abs() {
            acc = self.multiply(&acc, &base)?;
        }
        Ok(acc)
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupSpec::FreeAbelian { rank } => write!(f, "Z^{rank}"),
            GroupSpec::Free { rank } => write!(f, "F_{rank}"),
            GroupSpec::SemidirectLattice(sd) => match &sd.top {
                TopGroup::Integer { order, .. } => {
                    write!(f, "Z^{} ⋊ Z (action of order {order})", sd.rank)
                }
                TopGroup::Cyclic { n, .. } => write!(f, "Z^{} ⋊ Z_{n}", sd.rank),
                TopGroup::Finite(g) => write!(f, "Z^{} ⋊ A (|A| = {})", sd.rank, g.order()),
            },
            GroupSpec::Wreath { n } => write!(f, "Z wr Z_{n}"),
            GroupSpec::DirectProduct(factors) => {
                for (i, g) in factors.iter().enumerate() {
                    if i > 0 {
                        write!(f, " × ")?;
                    }
                    if matches!(g, GroupSpec::DirectProduct(_)) {
                        write!(f, "({g})")?;
                    } else {
                        write!(f, "{g}")?;
                    }
                }
                Ok(())
            }
        }
    }
}

fn check_action(rank: usize, action: &IntMatrix) -> Result<()> {
    if action.dim() != rank {
        return Err(Error::InvalidParameter(format!(
            "action matrix has size {}, lattice rank is {rank}",
            action.dim()
        )));
    }
    let det = action.determinant();
    if det != 1 && det != -1 {
        return Err(Error::InvalidParameter(format!(
            "action matrix {action:?} has determinant {det}, expected ±1"
        )));
    }
    Ok(())
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
enum GroupSpecRepr {
    FreeAbelian { rank: usize },
    Free { rank: usize },
    Semidirect { rank: usize, top: TopRepr },
    Wreath { n: usize },
    Product { factors: Vec<GroupSpecRepr> },
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum TopRepr {
    Integer { order: u32, action: Vec<Vec<i64>> },
    Cyclic { n: u32, action: Vec<Vec<i64>> },
    Finite { elements: Vec<Vec<Vec<i64>>> },
}

impl TryFrom<GroupSpecRepr> for GroupSpec {
    type Error = Error;

    fn try_from(repr: GroupSpecRepr) -> Result<Self> {
        match repr {
            GroupSpecRepr::FreeAbelian { rank } => Ok(GroupSpec::FreeAbelian { rank }),
            GroupSpecRepr::Free { rank } => Ok(GroupSpec::Free { rank }),
            GroupSpecRepr::Wreath { n } => GroupSpec::wreath(n),
            GroupSpecRepr::Product { factors } => GroupSpec::direct_product(
                factors
                    .into_iter()
                    .map(GroupSpec::try_from)
                    .collect::<Result<_>>()?,
            ),
            GroupSpecRepr::Semidirect { rank, top } => match top {
                TopRepr::Integer { order, action } => {
                    GroupSpec::semidirect_integer(rank, IntMatrix::from_rows(&action)?, order)
                }
                TopRepr::Cyclic { n, action } => {
                    GroupSpec::semidirect_cyclic(rank, n, IntMatrix::from_rows(&action)?)
                }
                TopRepr::Finite { elements } => {
                    let mats = elements
                        .iter()
                        .map(|m| IntMatrix::from_rows(m))
                        .collect::<Result<Vec<_>>>()?;
                    let group = FiniteMatrixGroup::from_elements(mats)?;
                    if group.dim() != rank {
                        return Err(Error::InvalidParameter(format!(
                            "finite group acts on Z^{}, lattice rank is {rank}",
                            group.dim()
                        )));
                    }
                    Ok(GroupSpec::semidirect_finite(group))
                }
            },
        }
    }
}

impl From<GroupSpec> for GroupSpecRepr {
    fn from(spec: GroupSpec) -> Self {
        match spec {
            GroupSpec::FreeAbelian { rank } => GroupSpecRepr::FreeAbelian { rank },
            GroupSpec::Free { rank } => GroupSpecRepr::Free { rank },
            GroupSpec::Wreath { n } => GroupSpecRepr::Wreath { n },
            GroupSpec::DirectProduct(f) => GroupSpecRepr::Product {
                factors: f.into_iter().map(Into::into).collect(),
            },
            GroupSpec::SemidirectLattice(sd) => GroupSpecRepr::Semidirect {
                rank: sd.rank,
                top: match &sd.top {
                    TopGroup::Integer { action, order } => TopRepr::Integer {
                        order: *order,
                        action: action.to_rows(),
                    },
                    TopGroup::Cyclic { n, action } => TopRepr::Cyclic {
                        n: *n,
                        action: action.to_rows(),
                    },
                    TopGroup::Finite(g) => TopRepr::Finite {
                        elements: g.elements().iter().map(|m| m.to_rows()).collect(),
                    },
                },
            },
        }
    }
}
