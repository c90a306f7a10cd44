use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One letter of a [`GeneratorWord`]: a generator index, possibly inverted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub index: usize,
    pub inverse: bool,
}

impl Letter {
    pub fn pos(index: usize) -> Self {
        Letter {
            index,
            inverse: false,
        }
    }

    pub fn inv(index: usize) -> Self {
        Letter {
            index,
            inverse: true,
        }
    }

    /// Signed 1-based generator reference: `k` is generator `k-1`, `-k` its inverse.
    pub fn from_signed_ref(r: i64) -> Result<Self> {
        if r == 0 {
            return Err(Error::InvalidParameter(
                "generator references are 1-based; 0 is not a valid reference".into(),
            ));
        }
        Ok(Letter {
            index: (r.unsigned_abs() - 1) as usize,
            inverse: r < 0,
        })
    }

    pub fn signed_ref(self) -> i64 {
        let r = self.index as i64 + 1;
        if self.inverse {
            -r
        } else {
            r
        }
    }
}

/// A word over a declared generator list.
///
/// Positive words (the monoid setting) never contain inverted letters.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<i64>", into = "Vec<i64>")]
pub struct GeneratorWord {
    letters: Vec<Letter>,
    positive: bool,
}

impl GeneratorWord {
    pub fn empty() -> Self {
        GeneratorWord {
            letters: Vec::new(),
            positive: true,
        }
    }

    /// Positive word from generator indices.
    pub fn positive(indices: impl IntoIterator<Item = usize>) -> Self {
        GeneratorWord {
            letters: indices.into_iter().map(Letter::pos).collect(),
            positive: true,
        }
    }

    /// Word with arbitrary letters. The positive flag is set when no letter is
    /// inverted.
    pub fn from_letters(letters: Vec<Letter>) -> Self {
        let positive = letters.iter().all(|l| !l.inverse);
        GeneratorWord { letters, positive }
    }

    pub fn from_signed_refs(refs: &[i64]) -> Result<Self> {
        Ok(Self::from_letters(
            refs.iter()
                .map(|&r| Letter::from_signed_ref(r))
                .collect::<Result<_>>()?,
        ))
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_positive(&self) -> bool {
        self.positive
    }

    /// Generator indices of a positive word, or an error if any letter is inverted.
    pub fn indices(&self) -> Result<Vec<usize>> {
        if !self.positive {
            return Err(Error::InvalidParameter(
                "expected a positive (inverse-free) word".into(),
            ));
        }
        Ok(self.letters.iter().map(|l| l.index).collect())
    }

    pub fn push(&mut self, letter: Letter) {
        self.positive &= !letter.inverse;
        self.letters.push(letter);
    }

    pub fn check_range(&self, gens: usize) -> Result<()> {
        match self.letters.iter().find(|l| l.index >= gens) {
            Some(l) => Err(Error::IndexOutOfRange {
                index: l.index,
                len: gens,
            }),
            None => Ok(()),
        }
    }
}

impl TryFrom<Vec<i64>> for GeneratorWord {
    type Error = Error;

    fn try_from(refs: Vec<i64>) -> Result<Self> {
        Self::from_signed_refs(&refs)
    }
}

impl From<GeneratorWord> for Vec<i64> {
    fn from(w: GeneratorWord) -> Self {
        w.letters.iter().map(|l| l.signed_ref()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn signed_refs_roundtrip() {
        let w = GeneratorWord::from_signed_refs(&[1, -2, 3]).unwrap();
        assert!(!w.is_positive());
        assert_eq!(w.letters()[1], Letter::inv(1));
        assert_eq!(Vec::<i64>::from(w), vec![1, -2, 3]);
        assert!(GeneratorWord::from_signed_refs(&[0]).is_err());
    }

    #[test]
    fn positive_words_expose_indices() {
        let w = GeneratorWord::positive([0, 2, 1]);
        assert_eq!(w.indices().unwrap(), vec![0, 2, 1]);
        let neg = GeneratorWord::from_letters(vec![Letter::inv(0)]);
        assert!(neg.indices().is_err());
        assert!(w.check_range(2).is_err());
        assert!(w.check_range(3).is_ok());
    }
}
