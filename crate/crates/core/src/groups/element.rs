/// Exact canonical value of a group element.
///
/// The payload shape is dictated by the [`GroupSpec`](super::GroupSpec) the
/// element belongs to; the spec is not stored here so elements stay cheap to
/// copy inside large searches. Every operation that combines elements takes
/// the spec explicitly and checks the shapes agree.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Element {
    /// Integer vector in `Z^d`.
    FreeAbelian(Vec<i64>),
    /// Freely reduced word. Letter `k > 0` is generator `k - 1`, `-k` its inverse.
    Free(Vec<i32>),
    /// `(vec, top)` in vector-first normal form. `top` is the full integer
    /// exponent for an infinite cyclic top, a residue for a finite cyclic top,
    /// or an index into the element list of a finite matrix group.
    Semidirect {
        vec: Vec<i64>,
        top: i64,
    },
    /// `e_0^{c_0} ... e_{n-1}^{c_{n-1}} s^shift`.
    Wreath {
        coords: Vec<i64>,
        shift: u32,
    },
    Product(Vec<Element>),
}

const TAG_FREE_ABELIAN: u8 = 1;
const TAG_FREE: u8 = 2;
const TAG_SEMIDIRECT: u8 = 3;
const TAG_WREATH: u8 = 4;
const TAG_PRODUCT: u8 = 5;

impl Element {
    /// Length-prefixed little-endian encoding of the payload with variant tags.
    ///
    /// Injective within any one group, and independent of process state.
    pub fn canonical_key(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(32);
        self.write_key(&mut out);
        out
    }

    pub(crate) fn write_key(&self, out: &mut Vec<u8>) {
        match self {
            Element::FreeAbelian(v) => {
                out.push(TAG_FREE_ABELIAN);
                write_ints(out, v);
            }
            Element::Free(letters) => {
                out.push(TAG_FREE);
                out.extend_from_slice(&(letters.len() as u32).to_le_bytes());
                for l in letters {
                    out.extend_from_slice(&l.to_le_bytes());
                }
            }
            Element::Semidirect { vec, top } => {
                out.push(TAG_SEMIDIRECT);
                write_ints(out, vec);
                out.extend_from_slice(&top.to_le_bytes());
            }
            Element::Wreath { coords, shift } => {
                out.push(TAG_WREATH);
                write_ints(out, coords);
                out.extend_from_slice(&shift.to_le_bytes());
            }
            Element::Product(parts) => {
                out.push(TAG_PRODUCT);
                out.extend_from_slice(&(parts.len() as u32).to_le_bytes());
                for p in parts {
                    let start = out.len();
                    out.extend_from_slice(&0u32.to_le_bytes());
                    p.write_key(out);
                    let len = (out.len() - start - 4) as u32;
                    out[start..start + 4].copy_from_slice(&len.to_le_bytes());
                }
            }
        }
    }

    /// Factor `i` of a direct-product element.
    pub fn factor(&self, i: usize) -> Option<&Element> {
        match self {
            Element::Product(parts) => parts.get(i),
            _ => None,
        }
    }
}

fn write_ints(out: &mut Vec<u8>, v: &[i64]) {
    out.extend_from_slice(&(v.len() as u32).to_le_bytes());
    for x in v {
        out.extend_from_slice(&x.to_le_bytes());
    }
}
