use std::collections::HashMap;

use super::matrix::IntMatrix;
use crate::error::{Error, Result};

/// Default cap on the number of elements produced by [`FiniteMatrixGroup::generate`].
pub const DEFAULT_GROUP_CAP: usize = 10_000;

/// A finite subgroup of `GL_n(Z)` given by its complete element list.
///
/// Elements are addressed by their index in the list. The multiplication and
/// inverse tables are computed once on construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteMatrixGroup {
    dim: usize,
    elements: Vec<IntMatrix>,
    identity: usize,
    table: Vec<u32>,
    inverses: Vec<u32>,
}

impl FiniteMatrixGroup {
    /// Closes `generators` under multiplication.
    ///
    /// The element list is ordered with the identity first and the rest sorted
    /// by [`IntMatrix::key_bytes`], so the result does not depend on the order
    /// of the generators.
    pub fn generate(dim: usize, generators: &[IntMatrix], cap: usize) -> Result<Self> {
        for g in generators {
            check_unimodular(dim, g)?;
        }
        let id = IntMatrix::identity(dim);
        let mut seen: HashMap<IntMatrix, ()> = HashMap::new();
        let mut all = vec![id.clone()];
        seen.insert(id, ());
        let mut next = 0;
        while next < all.len() {
            let current = all[next].clone();
            next += 1;
            for g in generators {
                let prod = current.mul(g);
                if !seen.contains_key(&prod) {
                    if all.len() >= cap {
                        return Err(Error::ResourceLimit {
                            what: "finite matrix group closure".into(),
                            cap,
                            stats: None,
                        });
                    }
                    seen.insert(prod.clone(), ());
                    all.push(prod);
                }
            }
        }
        let mut rest: Vec<IntMatrix> = all.split_off(1);
        rest.sort_by_key(|m| m.key_bytes());
        all.extend(rest);
        Self::from_elements(all)
    }

    /// Validates a complete element list and builds the tables. The list
    /// order is kept as given.
    pub fn from_elements(elements: Vec<IntMatrix>) -> Result<Self> {
        let Some(first) = elements.first() else {
            return Err(Error::InvalidParameter(
                "finite group needs at least one element".into(),
            ));
        };
        let dim = first.dim();
        let mut index = HashMap::with_capacity(elements.len());
        for (i, m) in elements.iter().enumerate() {
            check_unimodular(dim, m)?;
            if index.insert(m.clone(), i as u32).is_some() {
                return Err(Error::InvalidParameter(format!(
                    "finite group lists matrix {m:?} twice"
                )));
            }
        }
        let identity = *index.get(&IntMatrix::identity(dim)).ok_or_else(|| {
            Error::InvalidParameter("finite group does not contain the identity".into())
        })? as usize;
        let n = elements.len();
        let mut table = Vec::with_capacity(n * n);
        for a in &elements {
            for b in &elements {
                let prod = a.mul(b);
                let k = index.get(&prod).ok_or_else(|| {
                    Error::InvalidParameter(format!(
                        "finite group not closed: {a:?} * {b:?} = {prod:?} missing"
                    ))
                })?;
                table.push(*k);
            }
        }
        let mut inverses = Vec::with_capacity(n);
        for a in 0..n {
            let inv = (0..n)
                .find(|&b| table[a * n + b] as usize == identity)
                .ok_or_else(|| {
                    Error::InvalidParameter(format!("element {a} has no inverse in the list"))
                })?;
            inverses.push(inv as u32);
        }
        Ok(FiniteMatrixGroup {
            dim,
            elements,
            identity,
            table,
            inverses,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn elements(&self) -> &[IntMatrix] {
        &self.elements
    }

    pub fn matrix(&self, a: usize) -> &IntMatrix {
        &self.elements[a]
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.elements.len() + b] as usize
    }

    pub fn inverse(&self, a: usize) -> usize {
        self.inverses[a] as usize
    }

    pub fn index_of(&self, m: &IntMatrix) -> Option<usize> {
        self.elements.iter().position(|e| e == m)
    }
}

fn check_unimodular(dim: usize, m: &IntMatrix) -> Result<()> {
    if m.dim() != dim {
        return Err(Error::InvalidParameter(format!(
            "matrix of size {} in a group of dimension {dim}",
            m.dim()
        )));
    }
    let det = m.determinant();
    if det != 1 && det != -1 {
        return Err(Error::InvalidParameter(format!(
            "matrix {m:?} has determinant {det}; action matrices must be invertible over Z"
        )));
    }
    Ok(())
}
