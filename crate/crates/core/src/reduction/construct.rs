use crate::error::{Error, Result};
use crate::groups::{
    wreath_basis, wreath_edge, wreath_shift, Element, FiniteMatrixGroup, GroupSpec, XsyChoice,
};
use crate::rational::{Automaton, BaseGroup};
use serde_json::Value;

use super::bundle::{automaton_hash, BundleGenerator, Origin, ReductionBundle, Variant};
use super::lattice::{orbit_size, TrivialStabVector};

fn gen(element: Element, origin: Origin) -> BundleGenerator {
    BundleGenerator { element, origin }
}

fn pair(g: &Element, h: &Element) -> Element {
    Element::Product(vec![g.clone(), h.clone()])
}

fn triple(g: &Element, h1: &Element, h2: &Element) -> Element {
    Element::Product(vec![g.clone(), h1.clone(), h2.clone()])
}

fn dedup_with_identity(spec: &GroupSpec, set: &[Element], what: &str) -> Result<Vec<Element>> {
    let mut out: Vec<Element> = Vec::with_capacity(set.len() + 1);
    for (i, e) in set.iter().enumerate() {
        spec.check(e)
            .map_err(|err| Error::mismatch(format!("{what}[{i}]: {err}")))?;
        if !out.contains(e) {
            out.push(e.clone());
        }
    }
    let id = spec.identity();
    if !out.contains(&id) {
        out.push(id);
    }
    Ok(out)
}

/// Reads the `{group, a, b}` input of the pair construction. Labels are
/// written as in automata.
pub fn pair_from_json(v: &Value) -> Result<(GroupSpec, Vec<Element>, Vec<Element>)> {
    let obj = v
        .as_object()
        .ok_or_else(|| Error::schema("$", "expected an object {group, a, b}"))?;
    let base = BaseGroup::from_json_at(
        obj.get("group")
            .ok_or_else(|| Error::schema("$", "missing field `group`"))?,
        "$.group",
    )?;
    if let Some(k) = obj
        .keys()
        .find(|k| !["group", "a", "b"].contains(&k.as_str()))
    {
        return Err(Error::schema(
            "$",
            format!("unknown field `{k}`, expected group, a, b"),
        ));
    }
    let side = |name: &str| -> Result<Vec<Element>> {
        let arr = match obj.get(name) {
            None => return Err(Error::schema("$", format!("missing field `{name}`"))),
            Some(Value::Array(a)) => a,
            Some(_) => return Err(Error::schema(format!("$.{name}"), "expected an array")),
        };
        arr.iter()
            .enumerate()
            .map(|(i, l)| base.label_from_json_at(l, &format!("$.{name}[{i}]")))
            .collect()
    };
    let (a, b) = (side("a")?, side("b")?);
    Ok((base.spec, a, b))
}

/// `C_0 = A_0×{x} ∪ {(1,s)} ∪ B_0×{y}` in `G × H`, with the identity added to
/// `A_0` and `B_0`. The `s`-section of `C_0*` is `A_0* B_0*`.
pub fn reduce_pair(
    g: &GroupSpec,
    a0: &[Element],
    b0: &[Element],
    h: XsyChoice,
) -> Result<ReductionBundle> {
    let xsy = h.build()?;
    let a = dedup_with_identity(g, a0, "A_0")?;
    let b = dedup_with_identity(g, b0, "B_0")?;
    let mut generators = Vec::with_capacity(a.len() + b.len() + 1);
    generators.extend(a.iter().map(|e| gen(pair(e, &xsy.x), Origin::ALetter)));
    generators.push(gen(pair(&g.identity(), &xsy.s), Origin::Separator));
    generators.extend(b.iter().map(|e| gen(pair(e, &xsy.y), Origin::BLetter)));
    Ok(ReductionBundle {
        variant: Variant::ReducePair,
        ambient: GroupSpec::direct_product(vec![g.clone(), xsy.spec])?,
        generators,
        target: xsy.s,
        source: None,
        source_hash: None,
        state_images: None,
        lattice_vector: None,
    })
}

/// Order of the cyclic top of `Z wr Z_m` used for an automaton with
/// `states` states before normalization.
pub fn wreath_order(states: usize, pad_pow2: bool) -> usize {
    let m = states + 1;
    if pad_pow2 {
        m.next_power_of_two()
    } else {
        m
    }
}

/// Result of [`pair_to_rat`]: `R` is the `s`-section of `<y>* T*`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairToRatOutput {
    /// Generators `[y, T…]`, tagged `yPow` and `T-edge`.
    pub bundle: ReductionBundle,
    pub y: Element,
    pub t: Vec<Element>,
}

/// `T = {(g, t_ij) | (v_i, g, v_j) ∈ S}` and `y = (1, e_0^{-1})` in
/// `G × (Z wr Z_m)`, for the automaton normalized to one accepting state.
pub fn pair_to_rat(aut: &Automaton, pad_pow2: bool) -> Result<PairToRatOutput> {
    let norm = aut.normalize_single_accept();
    let m = wreath_order(aut.state_count(), pad_pow2);
    let g = aut.group();
    let h1 = GroupSpec::wreath(m)?;
    let y = pair(&g.identity(), &h1.invert(&wreath_basis(m, 0))?);
    let mut generators = vec![gen(y.clone(), Origin::YPow)];
    let mut t = Vec::with_capacity(norm.transitions().len());
    for (k, tr) in norm.transitions().iter().enumerate() {
        let e = pair(&tr.label, &wreath_edge(m, tr.from, tr.to));
        t.push(e.clone());
        generators.push(gen(
            e,
            Origin::TEdge {
                from: tr.from,
                to: tr.to,
                transition: k,
            },
        ));
    }
    let bundle = ReductionBundle {
        variant: Variant::PairToRat,
        ambient: GroupSpec::direct_product(vec![g.clone(), h1])?,
        generators,
        target: wreath_shift(m, 1),
        source: Some(norm),
        source_hash: Some(automaton_hash(aut)),
        state_images: None,
        lattice_vector: None,
    };
    Ok(PairToRatOutput { bundle, y, t })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct MonToRatOptions {
    pub pad_pow2: bool,
    pub xsy: XsyChoice,
}

/// `M = {(y, x)} ∪ {(1, s)} ∪ T×{y}` in `G × (Z wr Z_m) × H_2`, with section
/// coordinate `(s_1, s_2)`.
///
/// The pair step is applied without inserting identities: both sides of a
/// witness already have the path length as their length.
pub fn mon_to_rat(aut: &Automaton, opts: MonToRatOptions) -> Result<ReductionBundle> {
    let inner = pair_to_rat(aut, opts.pad_pow2)?;
    let xsy = opts.xsy.build()?;
    let [g_spec, h1]: [GroupSpec; 2] = inner
        .bundle
        .ambient
        .factors()
        .expect("product")
        .to_vec()
        .try_into()
        .expect("two factors");
    let split = |e: &Element| match e {
        Element::Product(p) => (p[0].clone(), p[1].clone()),
        _ => unreachable!("pair_to_rat builds products"),
    };
    let (yg, yh) = split(&inner.y);
    let mut generators = vec![
        gen(triple(&yg, &yh, &xsy.x), Origin::YPow),
        gen(
            triple(&g_spec.identity(), &h1.identity(), &xsy.s),
            Origin::Separator,
        ),
    ];
    for bg in &inner.bundle.generators[1..] {
        let (tg, th) = split(&bg.element);
        generators.push(gen(triple(&tg, &th, &xsy.y), bg.origin));
    }
    Ok(ReductionBundle {
        variant: Variant::MonToRat,
        ambient: GroupSpec::direct_product(vec![g_spec, h1, xsy.spec])?,
        generators,
        target: Element::Product(vec![inner.bundle.target, xsy.s]),
        source: inner.bundle.source,
        source_hash: inner.bundle.source_hash,
        state_images: None,
        lattice_vector: None,
    })
}

/// Elements of `A` in the order states are mapped to them: the identity,
/// then the rest by [`crate::groups::IntMatrix::key_bytes`].
pub fn state_image_order(a: &FiniteMatrixGroup) -> Vec<usize> {
    let id = a.identity();
    let mut rest: Vec<usize> = (0..a.order()).filter(|&i| i != id).collect();
    rest.sort_by_key(|&i| a.matrix(i).key_bytes());
    std::iter::once(id).chain(rest).collect()
}

/// `t_ab = a^{-1} v b` as an element of `Z^n ⋊ A`.
pub fn lattice_edge(a: &FiniteMatrixGroup, v: &[i64], from: usize, to: usize) -> Element {
    let inv = a.inverse(from);
    Element::Semidirect {
        vec: a.matrix(inv).mul_vec(v),
        top: a.mul(inv, to) as i64,
    }
}

/// `T = {(g, a^{-1}vb, x) | (a, g, b) ∈ S} ∪ {(1, c^{-1}, s), (1, v^{-1}, y)}`
/// in `G × (Z^n ⋊ A) × H_2`, with states injected into `A` (initial state to
/// the identity, accepting state to `c`). The section coordinate is
/// `(1, s)`.
///
/// `(1, 1, y)` is never a generator: with it the section is no longer `R`.
pub fn tighter_aut(
    aut: &Automaton,
    a: &FiniteMatrixGroup,
    v: &TrivialStabVector,
    h: XsyChoice,
) -> Result<ReductionBundle> {
    let norm = aut.normalize_single_accept();
    if norm.state_count() > a.order() {
        return Err(Error::InvalidParameter(format!(
            "too many states: {} after normalization, but |A| = {}",
            norm.state_count(),
            a.order()
        )));
    }
    if v.v.len() != a.dim() {
        return Err(Error::InvalidParameter(format!(
            "vector has length {}, expected {}",
            v.v.len(),
            a.dim()
        )));
    }
    if orbit_size(a, &v.v) != a.order() {
        return Err(Error::InvalidParameter(format!(
            "vector {:?} has a nontrivial stabilizer in A",
            v.v
        )));
    }
    if a.order() < 2 {
        return Err(Error::InvalidParameter(
            "A must have a non-identity element to serve as the accepting image".into(),
        ));
    }
    let xsy = h.build()?;
    let g = aut.group();
    let lattice = GroupSpec::semidirect_finite(a.clone());
    let order = state_image_order(a);
    let images: Vec<usize> = order[..norm.state_count()].to_vec();
    let c = images[1];

    let mut generators = Vec::with_capacity(norm.transitions().len() + 2);
    for (k, tr) in norm.transitions().iter().enumerate() {
        let t = lattice_edge(a, &v.v, images[tr.from], images[tr.to]);
        generators.push(gen(
            triple(&tr.label, &t, &xsy.x),
            Origin::TEdge {
                from: tr.from,
                to: tr.to,
                transition: k,
            },
        ));
    }
    let c_inv = Element::Semidirect {
        vec: vec![0; a.dim()],
        top: a.inverse(c) as i64,
    };
    generators.push(gen(triple(&g.identity(), &c_inv, &xsy.s), Origin::CInvSep));
    let v_inv = Element::Semidirect {
        vec: v.v.iter().map(|x| -x).collect(),
        top: a.identity() as i64,
    };
    generators.push(gen(
        triple(&g.identity(), &v_inv, &xsy.y),
        Origin::VInvLetter,
    ));

    Ok(ReductionBundle {
        variant: Variant::TighterAut,
        target: Element::Product(vec![lattice.identity(), xsy.s]),
        ambient: GroupSpec::direct_product(vec![g.clone(), lattice, xsy.spec])?,
        generators,
        source: Some(norm),
        source_hash: Some(automaton_hash(aut)),
        state_images: Some(images),
        lattice_vector: Some(v.v.clone()),
    })
}
