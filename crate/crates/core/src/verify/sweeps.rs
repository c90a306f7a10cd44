use std::time::Instant;

use rayon::prelude::*;
use serde_json::json;

use super::{Suite, SuiteReport, Tally};
use crate::error::Result;
use crate::groups::{
    build_cyclic_shift_group, build_prop3_group, wreath_edge, Element, FiniteMatrixGroup,
    GroupSpec, IntMatrix, XsyGroup, DEFAULT_GROUP_CAP,
};
use crate::reduction::{
    check_path_shape, check_vla_shape, check_xsy_shape, find_trivial_stabilizer_vector,
    invariant_inner_product, lattice_edge, signed_permutation_group, XsyLetter,
};

/// Runs `check` on every nonempty positive word of length at most `max_len`
/// over `letters`, with the word's value. Words sharing a first letter are
/// handled by one task; failures are reported in word order.
pub fn sweep_words<F>(
    spec: &GroupSpec,
    letters: &[Element],
    max_len: usize,
    check: F,
) -> Result<(u64, Vec<String>)>
where
    F: Fn(&[usize], &Element) -> Option<String> + Sync,
{
    let mut tally = Tally::default();
    for part in sweep(spec, letters, max_len, &check)? {
        tally.merge(part);
    }
    Ok((tally.checked, tally.counterexamples))
}

fn sweep<F>(spec: &GroupSpec, letters: &[Element], max_len: usize, check: &F) -> Result<Vec<Tally>>
where
    F: Fn(&[usize], &Element) -> Option<String> + Sync,
{
    if max_len == 0 {
        return Ok(Vec::new());
    }
    (0..letters.len())
        .into_par_iter()
        .map(|first| {
            let mut tally = Tally::default();
            let mut word = vec![first];
            let mut values = vec![letters[first].clone()];
            loop {
                let top = values.last().expect("nonempty");
                let verdict = check(&word, top);
                tally.checked += 1;
                if let Some(msg) = verdict {
                    tally.fail(msg);
                }
                if word.len() < max_len {
                    let next = spec.multiply(top, &letters[0])?;
                    word.push(0);
                    values.push(next);
                    continue;
                }
                // advance the last position, backtracking over exhausted ones
                loop {
                    if word.len() == 1 {
                        return Ok(tally);
                    }
                    let last = word.pop().expect("nonempty");
                    values.pop();
                    if last + 1 < letters.len() {
                        let base = values.last().expect("nonempty");
                        let next = spec.multiply(base, &letters[last + 1])?;
                        word.push(last + 1);
                        values.push(next);
                        break;
                    }
                }
            }
        })
        .collect()
}

fn merged(parts: Vec<Tally>) -> Tally {
    let mut tally = Tally::default();
    for part in parts {
        tally.merge(part);
    }
    tally
}

fn xsy_sweep(h: &XsyGroup, max_len: usize) -> Result<Tally> {
    let letters = [h.x.clone(), h.s.clone(), h.y.clone()];
    let names = [XsyLetter::X, XsyLetter::S, XsyLetter::Y];
    let parts = sweep(
        &h.spec,
        &letters,
        max_len,
        &|w: &[usize], value: &Element| {
            let shape: Vec<XsyLetter> = w.iter().map(|&i| names[i]).collect();
            let is_s = *value == h.s;
            let matched = check_xsy_shape(&shape);
            (is_s != matched.is_some())
                .then(|| format!("word {shape:?}: value {value:?}, shape match {matched:?}"))
        },
    )?;
    Ok(merged(parts))
}

/// Words over `x, s, y` in the rotation group: value `s` exactly for
/// `x^l s y^l`.
pub fn prop3(max_len: usize) -> Result<SuiteReport> {
    let started = Instant::now();
    let tally = xsy_sweep(&build_prop3_group(), max_len)?;
    let details = json!({ "group": "rotation", "max_len": max_len, "words": tally.checked });
    Ok(tally.into_report(Suite::Prop3, details, started))
}

/// The same sweep in the cyclic shift groups `Z^n ⋊ Z`.
pub fn prop3_shift(ns: &[usize], max_len: usize) -> Result<SuiteReport> {
    let started = Instant::now();
    let mut tally = Tally::default();
    let mut per_n = Vec::new();
    for &n in ns {
        let t = xsy_sweep(&build_cyclic_shift_group(n)?, max_len)?;
        per_n.push(json!({ "n": n, "words": t.checked, "failures": t.failures }));
        tally.merge(t);
    }
    let details = json!({ "max_len": max_len, "groups": per_n });
    Ok(tally.into_report(Suite::Prop3Shift, details, started))
}

/// `l` if `e` is `e_0^l s` in `Z wr Z_n`.
fn path_value_exponent(e: &Element) -> Option<i64> {
    match e {
        Element::Wreath { coords, shift } if *shift as usize == 1 % coords.len() => {
            coords[1..].iter().all(|&c| c == 0).then_some(coords[0])
        }
        _ => None,
    }
}

/// Words over the letters `t_ij` of `Z wr Z_n`: value `e_0^l s` exactly for
/// paths `0 → 1`, and then `l = |w|`.
pub fn prop5(n: usize, max_len: usize) -> Result<SuiteReport> {
    let started = Instant::now();
    let spec = GroupSpec::wreath(n)?;
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
    let letters: Vec<Element> = pairs.iter().map(|&(i, j)| wreath_edge(n, i, j)).collect();
    let parts = sweep(&spec, &letters, max_len, &|w: &[usize], value: &Element| {
        let edges: Vec<(usize, usize)> = w.iter().map(|&k| pairs[k]).collect();
        let l = path_value_exponent(value);
        let path = check_path_shape(n, &edges);
        let ok = match (&path, l) {
            (Some(_), Some(l)) => l == edges.len() as i64,
            (None, None) => true,
            _ => false,
        };
        (!ok).then(|| format!("word {edges:?}: value {value:?}, path {path:?}"))
    })?;
    let tally = merged(parts);
    let details =
        json!({ "n": n, "max_len": max_len, "letters": letters.len(), "words": tally.checked });
    Ok(tally.into_report(Suite::Prop5, details, started))
}

/// `l` with `u = l·v`, if any.
fn multiple_of(u: &[i64], v: &[i64]) -> Option<i64> {
    let k = v.iter().position(|&x| x != 0)?;
    if u[k] % v[k] != 0 {
        return None;
    }
    let l = u[k] / v[k];
    u.iter().zip(v).all(|(a, b)| *a == l * b).then_some(l)
}

/// Words `w` over the letters `t_ab = a^{-1} v b` of `Z^n ⋊ A`, `A` the
/// signed permutations: value `v^{|w|} a` exactly for chains from the
/// identity, and then `a` is the end of the chain.
pub fn prop8(n: usize, max_len: usize) -> Result<SuiteReport> {
    let started = Instant::now();
    let a = signed_permutation_group(n)?;
    let v = find_trivial_stabilizer_vector(&a).v;
    let spec = GroupSpec::semidirect_finite(a.clone());
    let pairs: Vec<(usize, usize)> = (0..a.order())
        .flat_map(|x| (0..a.order()).map(move |y| (x, y)))
        .collect();
    let letters: Vec<Element> = pairs
        .iter()
        .map(|&(x, y)| lattice_edge(&a, &v, x, y))
        .collect();
    let parts = sweep(&spec, &letters, max_len, &|w: &[usize], value: &Element| {
        let edges: Vec<(usize, usize)> = w.iter().map(|&k| pairs[k]).collect();
        let Element::Semidirect { vec, top } = value else {
            return Some(format!("value {value:?} is not in Z^n ⋊ A"));
        };
        // the statement is about words of length l with value v^l a
        let is_vla = multiple_of(vec, &v) == Some(edges.len() as i64);
        let chain = check_vla_shape(&a, &edges);
        let ok = match &chain {
            Some(c) => is_vla && *c.last().unwrap() as i64 == *top,
            None => !is_vla,
        };
        (!ok).then(|| format!("word {edges:?}: value {value:?}, chain {chain:?}"))
    })?;
    let tally = merged(parts);
    let details = json!({
        "n": n,
        "group_order": a.order(),
        "v": v,
        "max_len": max_len,
        "letters": letters.len(),
        "words": tally.checked,
    });
    Ok(tally.into_report(Suite::Prop8, details, started))
}

fn named_groups() -> Result<Vec<(&'static str, FiniteMatrixGroup)>> {
    let order3 = IntMatrix::from_rows(&[vec![0, -1], vec![1, -1]])?;
    let rot = IntMatrix::from_rows(&[vec![0, -1], vec![1, 0]])?;
    Ok(vec![
        ("signed permutations n=2", signed_permutation_group(2)?),
        ("signed permutations n=3", signed_permutation_group(3)?),
        (
            "order 3 [[0,-1],[1,-1]]",
            FiniteMatrixGroup::generate(2, &[order3], DEFAULT_GROUP_CAP)?,
        ),
        (
            "rotation order 4",
            FiniteMatrixGroup::generate(2, &[rot], DEFAULT_GROUP_CAP)?,
        ),
    ])
}

/// For each test group: the averaged form is symmetric, positive definite
/// and invariant, and `vᵀG(av) < vᵀGv` for every `a ≠ Id`.
pub fn gram() -> Result<SuiteReport> {
    let started = Instant::now();
    let mut tally = Tally::default();
    let mut groups = Vec::new();
    for (name, a) in named_groups()? {
        let g = invariant_inner_product(&a);
        tally.check(g.0.is_symmetric(), || {
            format!("{name}: Gram matrix not symmetric")
        });
        tally.check(g.0.is_positive_definite(), || {
            format!("{name}: Gram matrix not positive definite")
        });
        for (i, m) in a.elements().iter().enumerate() {
            tally.check(m.transpose().mul(&g.0).mul(m) == g.0, || {
                format!(
                    "{name}: element {i} {:?} does not preserve the form",
                    m.to_rows()
                )
            });
        }
        let v = find_trivial_stabilizer_vector(&a);
        tally.check(v.orbit_size == a.order(), || {
            format!(
                "{name}: vector {:?} has orbit {} < {}",
                v.v,
                v.orbit_size,
                a.order()
            )
        });
        let norm = g.form(&v.v, &v.v);
        for (i, m) in a.elements().iter().enumerate() {
            if i == a.identity() {
                continue;
            }
            let cross = g.form(&v.v, &m.mul_vec(&v.v));
            tally.check(cross < norm, || {
                format!("{name}: element {i}: vᵀG(av) = {cross} is not below vᵀGv = {norm}")
            });
        }
        groups.push(json!({
            "group": name,
            "order": a.order(),
            "gram": g.0.to_rows(),
            "v": v.v,
        }));
    }
    Ok(tally.into_report(Suite::Gram, json!({ "groups": groups }), started))
}
