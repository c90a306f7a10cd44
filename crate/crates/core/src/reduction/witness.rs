use crate::error::{Error, Result};
use crate::groups::{
    build_cyclic_shift_group, build_prop3_group, Element, GeneratorWord, GroupSpec, XsyGroup,
};
use crate::rational::{Automaton, PathWitness};

use super::bundle::{Origin, ReductionBundle, Variant};
use super::shapes::{check_path_shape, check_vla_shape, check_xsy_shape, XsyLetter};

fn source(bundle: &ReductionBundle) -> Result<&Automaton> {
    bundle.source.as_ref().ok_or_else(|| {
        Error::InvalidParameter(format!("{} bundle has no source automaton", bundle.variant))
    })
}

fn find_origin(bundle: &ReductionBundle, origin: Origin) -> Result<usize> {
    bundle
        .generators
        .iter()
        .position(|g| g.origin == origin)
        .ok_or_else(|| {
            Error::InternalConsistency(format!("bundle has no {} generator", origin.tag()))
        })
}

fn edge_generator(bundle: &ReductionBundle, transition: usize) -> Result<usize> {
    bundle
        .generators
        .iter()
        .position(|g| matches!(g.origin, Origin::TEdge { transition: t, .. } if t == transition))
        .ok_or_else(|| {
            Error::InternalConsistency(format!("no generator for transition {transition}"))
        })
}

/// Word over the bundle generators for an accepting path of the source
/// automaton. For `MonToRat` and `TighterAut` its length is `2l + 1`.
pub fn path_to_witness(bundle: &ReductionBundle, p: &PathWitness) -> Result<GeneratorWord> {
    let aut = source(bundle)?;
    aut.path_label(p)?;
    let edges =
        p.0.iter()
            .map(|&t| edge_generator(bundle, t))
            .collect::<Result<Vec<_>>>()?;
    let l = edges.len();
    let letters: Vec<usize> = match bundle.variant {
        Variant::ReducePair => unreachable!("no source automaton"),
        Variant::PairToRat => {
            let y = find_origin(bundle, Origin::YPow)?;
            std::iter::repeat_n(y, l).chain(edges).collect()
        }
        Variant::MonToRat => {
            let y = find_origin(bundle, Origin::YPow)?;
            let sep = find_origin(bundle, Origin::Separator)?;
            std::iter::repeat_n(y, l)
                .chain([sep])
                .chain(edges)
                .collect()
        }
        Variant::TighterAut => {
            let sep = find_origin(bundle, Origin::CInvSep)?;
            let v_inv = find_origin(bundle, Origin::VInvLetter)?;
            edges
                .into_iter()
                .chain([sep])
                .chain(std::iter::repeat_n(v_inv, l))
                .collect()
        }
    };
    Ok(GeneratorWord::positive(letters))
}

/// `(a_1, x)⋯(a_k, x)(1, s)(b_1, y)⋯(b_k, y)` for a `ReducePair` bundle, with
/// the shorter side padded by identity letters. `a` and `b` are elements of
/// `A_0` and `B_0`.
pub fn reduce_pair_witness(
    bundle: &ReductionBundle,
    a: &[Element],
    b: &[Element],
) -> Result<GeneratorWord> {
    if bundle.variant != Variant::ReducePair {
        return Err(Error::InvalidParameter(format!(
            "expected a pair bundle, got {}",
            bundle.variant
        )));
    }
    let g_id = bundle.g_spec().identity();
    let lookup = |origin: Origin, e: &Element| -> Result<usize> {
        bundle
            .generators
            .iter()
            .position(|gen| {
                gen.origin == origin && matches!(&gen.element, Element::Product(p) if &p[0] == e)
            })
            .ok_or_else(|| {
                Error::InvalidParameter(format!("{e:?} is not a {} of the bundle", origin.tag()))
            })
    };
    let k = a.len().max(b.len());
    let pad = |side: &[Element], origin: Origin| -> Result<Vec<usize>> {
        side.iter()
            .chain(std::iter::repeat_n(&g_id, k - side.len()))
            .map(|e| lookup(origin, e))
            .collect()
    };
    let mut letters = pad(a, Origin::ALetter)?;
    letters.push(find_origin(bundle, Origin::Separator)?);
    letters.extend(pad(b, Origin::BLetter)?);
    Ok(GeneratorWord::positive(letters))
}

/// The [`XsyGroup`] whose spec is `spec`.
fn recover_xsy(spec: &GroupSpec) -> Result<XsyGroup> {
    let rot = build_prop3_group();
    if &rot.spec == spec {
        return Ok(rot);
    }
    if let GroupSpec::SemidirectLattice(sd) = spec {
        if let Ok(shift) = build_cyclic_shift_group(sd.rank()) {
            if &shift.spec == spec {
                return Ok(shift);
            }
        }
    }
    Err(Error::InternalConsistency(format!(
        "last factor {spec} is not a known x, s, y group"
    )))
}

/// Classifies each letter by the last ambient coordinate of its generator.
fn xsy_letters(bundle: &ReductionBundle, idx: &[usize]) -> Result<Vec<XsyLetter>> {
    let factors = bundle.ambient.factors().expect("product");
    let xsy = recover_xsy(factors.last().expect("nonempty"))?;
    idx.iter()
        .map(|&i| {
            let Element::Product(parts) = &bundle.generators[i].element else {
                unreachable!("ambient is a product")
            };
            let last = parts.last().expect("nonempty");
            if *last == xsy.x {
                Ok(XsyLetter::X)
            } else if *last == xsy.s {
                Ok(XsyLetter::S)
            } else if *last == xsy.y {
                Ok(XsyLetter::Y)
            } else {
                Err(Error::InternalConsistency(format!(
                    "generator {i} has last coordinate {last:?}, not x, s or y"
                )))
            }
        })
        .collect()
}

fn edges_of(bundle: &ReductionBundle, idx: &[usize]) -> Result<Vec<(usize, usize, usize)>> {
    idx.iter()
        .map(|&i| match bundle.generators[i].origin {
            Origin::TEdge {
                from,
                to,
                transition,
            } => Ok((from, to, transition)),
            other => Err(Error::InternalConsistency(format!(
                "expected an edge letter, found generator {i} ({})",
                other.tag()
            ))),
        })
        .collect()
}

fn require_origin(bundle: &ReductionBundle, idx: &[usize], origin: Origin) -> Result<()> {
    match idx.iter().find(|&&i| bundle.generators[i].origin != origin) {
        None => Ok(()),
        Some(&i) => Err(Error::InternalConsistency(format!(
            "expected {} letters, found generator {i} ({})",
            origin.tag(),
            bundle.generators[i].origin.tag()
        ))),
    }
}

/// Recovers the accepting path encoded by a word whose value lies in the
/// bundle's section, and checks that the path's label is the word's
/// `G`-coordinate.
///
/// A word whose value misses the section coordinate is a
/// [`Error::MalformedWitness`]. A word that hits it but does not decode to a
/// path is an [`Error::InternalConsistency`]; for bundles built by this crate
/// that cannot happen.
pub fn witness_to_path(bundle: &ReductionBundle, w: &GeneratorWord) -> Result<PathWitness> {
    let aut = source(bundle)?;
    let idx = w
        .indices()
        .map_err(|_| Error::MalformedWitness("witness contains inverse letters".into()))?;
    w.check_range(bundle.len())?;
    let value = bundle.ambient.evaluate_word(&bundle.elements(), w)?;
    let (g, h) = bundle
        .selector()
        .split(&value)
        .expect("ambient is a product");
    if h != bundle.target {
        return Err(Error::MalformedWitness(format!(
            "word evaluates to H-coordinate {h:?}, expected {:?}",
            bundle.target
        )));
    }

    let (edges, l) = match bundle.variant {
        Variant::ReducePair => unreachable!("no source automaton"),
        Variant::PairToRat => {
            let k = idx
                .iter()
                .take_while(|&&i| bundle.generators[i].origin == Origin::YPow)
                .count();
            if idx[k..]
                .iter()
                .any(|&i| !matches!(bundle.generators[i].origin, Origin::TEdge { .. }))
            {
                return Err(Error::MalformedWitness(
                    "word is not a power of y followed by edge letters".into(),
                ));
            }
            (edges_of(bundle, &idx[k..])?, k)
        }
        Variant::MonToRat | Variant::TighterAut => {
            let shape = xsy_letters(bundle, &idx)?;
            let l = check_xsy_shape(&shape).ok_or_else(|| {
                Error::InternalConsistency(
                    "value has coordinate s but word is not x^l s y^l".into(),
                )
            })?;
            if bundle.variant == Variant::MonToRat {
                require_origin(bundle, &idx[..l], Origin::YPow)?;
                require_origin(bundle, &idx[l..=l], Origin::Separator)?;
                (edges_of(bundle, &idx[l + 1..])?, l)
            } else {
                let edges = edges_of(bundle, &idx[..l])?;
                check_tighter_chain(bundle, &edges)?;
                require_origin(bundle, &idx[l..=l], Origin::CInvSep)?;
                require_origin(bundle, &idx[l + 1..], Origin::VInvLetter)?;
                (edges, l)
            }
        }
    };
    if edges.len() != l {
        return Err(Error::InternalConsistency(format!(
            "{l} y-letters but {} edge letters",
            edges.len()
        )));
    }
    let pairs: Vec<(usize, usize)> = edges.iter().map(|&(f, t, _)| (f, t)).collect();
    if bundle.variant != Variant::TighterAut {
        let n = match bundle.ambient.factors().expect("product")[1] {
            GroupSpec::Wreath { n } => n,
            ref other => {
                return Err(Error::InternalConsistency(format!(
                    "second factor {other} is not a wreath product"
                )))
            }
        };
        check_path_shape(n, &pairs).ok_or_else(|| {
            Error::InternalConsistency(format!("edge letters {pairs:?} do not form a path 0 → 1"))
        })?;
    }
    let path = PathWitness(edges.iter().map(|&(_, _, t)| t).collect());
    let label = aut
        .path_label(&path)
        .map_err(|e| Error::InternalConsistency(format!("decoded path is invalid: {e}")))?;
    if label != g {
        return Err(Error::InternalConsistency(format!(
            "decoded path has label {label:?}, word has G-coordinate {g:?}"
        )));
    }
    Ok(path)
}

fn check_tighter_chain(bundle: &ReductionBundle, edges: &[(usize, usize, usize)]) -> Result<()> {
    let a = bundle
        .lattice_group()
        .ok_or_else(|| Error::InternalConsistency("bundle has no finite group A".into()))?;
    let images = bundle
        .state_images
        .as_ref()
        .ok_or_else(|| Error::InternalConsistency("bundle has no state images".into()))?;
    let img = |q: usize| {
        images
            .get(q)
            .copied()
            .ok_or_else(|| Error::InternalConsistency(format!("state {q} has no image in A")))
    };
    let pairs = edges
        .iter()
        .map(|&(f, t, _)| Ok((img(f)?, img(t)?)))
        .collect::<Result<Vec<_>>>()?;
    let chain = check_vla_shape(a, &pairs).ok_or_else(|| {
        Error::InternalConsistency(format!("edge letters {pairs:?} do not chain from Id"))
    })?;
    let c = img(1)?;
    if *chain.last().expect("nonempty") != c {
        return Err(Error::InternalConsistency(format!(
            "edge chain ends at {}, expected the accepting image {c}",
            chain.last().unwrap()
        )));
    }
    Ok(())
}
