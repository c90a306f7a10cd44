//! JSON payloads for elements.
//!
//! | group         | payload                                   |
//! |---------------|-------------------------------------------|
//! | `free_abelian`| `[2, -1]`                                 |
//! | `free`        | `[1, -2]` (signed 1-based letters)        |
//! | `semidirect`  | `{"vec": [0, 1], "top": 3}`               |
//! | `wreath`      | `{"coords": [1, 0, 0], "shift": 1}`       |
//! | `product`     | `[<factor payload>, <factor payload>, …]` |
//!
//! Parsing is driven by the group spec, and parsed elements are brought to
//! canonical form (free words are reduced, cyclic exponents are reduced mod n).

use serde_json::{json, Value};

use super::element::Element;
use super::spec::{GroupSpec, TopGroup};
use crate::error::{Error, Result};

impl GroupSpec {
    pub fn element_to_json(&self, a: &Element) -> Value {
        match a {
            Element::FreeAbelian(v) => json!(v),
            Element::Free(w) => json!(w),
            Element::Semidirect { vec, top } => json!({ "vec": vec, "top": top }),
            Element::Wreath { coords, shift } => json!({ "coords": coords, "shift": shift }),
            Element::Product(parts) => match self {
                GroupSpec::DirectProduct(f) => Value::Array(
                    f.iter()
                        .zip(parts)
                        .map(|(g, p)| g.element_to_json(p))
                        .collect(),
                ),
                _ => Value::Array(parts.iter().map(|p| self.element_to_json(p)).collect()),
            },
        }
    }

    pub fn element_from_json(&self, v: &Value) -> Result<Element> {
        self.element_from_json_at(v, "$")
    }

    pub(crate) fn element_from_json_at(&self, v: &Value, path: &str) -> Result<Element> {
        let el =
            match self {
                GroupSpec::FreeAbelian { rank } => {
                    let ints = int_array(v, path)?;
                    if ints.len() != *rank {
                        return Err(Error::schema(
                            path,
                            format!("expected {rank} integers, got {}", ints.len()),
                        ));
                    }
                    Element::FreeAbelian(ints)
                }
                GroupSpec::Free { .. } => {
                    let ints = int_array(v, path)?;
                    let mut acc = Element::Free(Vec::new());
                    for (i, l) in ints.into_iter().enumerate() {
                        let letter = i32::try_from(l).map_err(|_| {
                            Error::schema(format!("{path}[{i}]"), "letter out of range")
                        })?;
                        acc = self.multiply(&acc, &Element::Free(vec![letter]))?;
                    }
                    acc
                }
                GroupSpec::SemidirectLattice(sd) => {
                    let obj = v
                        .as_object()
                        .ok_or_else(|| Error::schema(path, "expected an object {vec, top}"))?;
                    let vec = int_array(
                        obj.get("vec")
                            .ok_or_else(|| Error::schema(path, "missing field `vec`"))?,
                        &format!("{path}.vec"),
                    )?;
                    if vec.len() != sd.rank() {
                        return Err(Error::schema(
                            format!("{path}.vec"),
                            format!("expected {} integers, got {}", sd.rank(), vec.len()),
                        ));
                    }
                    let top = obj.get("top").and_then(Value::as_i64).ok_or_else(|| {
                        Error::schema(format!("{path}.top"), "expected an integer")
                    })?;
                    let top = match sd.top() {
                        TopGroup::Cyclic { n, .. } => top.rem_euclid(*n as i64),
                        _ => top,
                    };
                    Element::Semidirect { vec, top }
                }
                GroupSpec::Wreath { n } => {
                    let obj = v
                        .as_object()
                        .ok_or_else(|| Error::schema(path, "expected an object {coords, shift}"))?;
                    let coords = int_array(
                        obj.get("coords")
                            .ok_or_else(|| Error::schema(path, "missing field `coords`"))?,
                        &format!("{path}.coords"),
                    )?;
                    if coords.len() != *n {
                        return Err(Error::schema(
                            format!("{path}.coords"),
                            format!("expected {n} integers, got {}", coords.len()),
                        ));
                    }
                    let shift = obj.get("shift").and_then(Value::as_i64).ok_or_else(|| {
                        Error::schema(format!("{path}.shift"), "expected an integer")
                    })?;
                    Element::Wreath {
                        coords,
                        shift: shift.rem_euclid(*n as i64) as u32,
                    }
                }
                GroupSpec::DirectProduct(f) => {
                    let arr = v.as_array().ok_or_else(|| {
                        Error::schema(path, "expected an array of factor payloads")
                    })?;
                    if arr.len() != f.len() {
                        return Err(Error::schema(
                            path,
                            format!("expected {} factors, got {}", f.len(), arr.len()),
                        ));
                    }
                    Element::Product(
                        f.iter()
                            .zip(arr)
                            .enumerate()
                            .map(|(i, (g, x))| g.element_from_json_at(x, &format!("{path}[{i}]")))
                            .collect::<Result<_>>()?,
                    )
                }
            };
        self.check(&el)
            .map_err(|e| Error::schema(path, e.to_string()))?;
        Ok(el)
    }
}

fn int_array(v: &Value, path: &str) -> Result<Vec<i64>> {
    let arr = v
        .as_array()
        .ok_or_else(|| Error::schema(path, "expected an array of integers"))?;
    arr.iter()
        .enumerate()
        .map(|(i, x)| {
            x.as_i64()
                .ok_or_else(|| Error::schema(format!("{path}[{i}]"), "expected an integer"))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::build_prop3_group;

    #[test]
    fn product_roundtrip() {
        let h = build_prop3_group();
        let spec = GroupSpec::direct_product(vec![
            GroupSpec::FreeAbelian { rank: 1 },
            h.spec.clone(),
            GroupSpec::Wreath { n: 3 },
        ])
        .unwrap();
        let v = json!([[5], {"vec": [0, 0], "top": 1}, {"coords": [1, 0, 2], "shift": 2}]);
        let el = spec.element_from_json(&v).unwrap();
        assert_eq!(spec.element_to_json(&el), v);
    }

    #[test]
    fn free_words_are_reduced_on_parse() {
        let spec = GroupSpec::Free { rank: 2 };
        let el = spec.element_from_json(&json!([1, 2, -2, -1, 2])).unwrap();
        assert_eq!(el, Element::Free(vec![2]));
        assert!(spec.element_from_json(&json!([3])).is_err());
    }

    #[test]
    fn schema_errors_name_the_field() {
        let spec = GroupSpec::direct_product(vec![
            GroupSpec::FreeAbelian { rank: 2 },
            GroupSpec::Wreath { n: 2 },
        ])
        .unwrap();
        let err = spec
            .element_from_json(&json!([[1, 2], {"coords": [1], "shift": 0}]))
            .unwrap_err();
        assert!(err.to_string().contains("$[1].coords"), "{err}");
    }
}
