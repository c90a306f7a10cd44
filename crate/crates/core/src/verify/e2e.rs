use std::collections::HashMap;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;

use super::{Suite, SuiteReport, Tally, VerifyOptions};
use crate::error::Result;
use crate::groups::{Element, GroupSpec, XsyChoice};
use crate::oracle::{reachable_set, SearchConfig};
use crate::rational::{Automaton, Transition};
use crate::reduction::{
    find_trivial_stabilizer_vector, mon_to_rat, path_to_witness, signed_permutation_group,
    state_image_order, tighter_aut, witness_to_path, MonToRatOptions, ReductionBundle,
};

/// Labels drawn uniformly from `{lo..=hi}^rank ⊆ Z^rank`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LabelRange {
    pub rank: usize,
    pub lo: i64,
    pub hi: i64,
}

impl LabelRange {
    fn sample(&self, rng: &mut impl Rng) -> Element {
        Element::FreeAbelian(
            (0..self.rank)
                .map(|_| rng.gen_range(self.lo..=self.hi))
                .collect(),
        )
    }
}

/// An automaton over `Z^rank` with between 1 and `max_states` states, between
/// 1 and `max_transitions` transitions, and at least one accepting state.
pub fn random_automaton(
    rng: &mut impl Rng,
    max_states: usize,
    max_transitions: usize,
    labels: LabelRange,
) -> Automaton {
    let states = rng.gen_range(1..=max_states);
    let count = rng.gen_range(1..=max_transitions);
    let transitions = (0..count)
        .map(|_| Transition {
            from: rng.gen_range(0..states),
            label: labels.sample(rng),
            to: rng.gen_range(0..states),
        })
        .collect();
    let mut accepting = vec![rng.gen_range(0..states)];
    accepting.extend((0..states).filter(|_| rng.gen_bool(0.3)));
    Automaton::new(
        GroupSpec::FreeAbelian { rank: labels.rank },
        states,
        0,
        accepting,
        transitions,
    )
    .expect("valid by construction")
}

const E2E_LABELS: LabelRange = LabelRange {
    rank: 2,
    lo: -2,
    hi: 2,
};
const E2E_COUNT: usize = 50;
const E2E_MAX_LEN: usize = 9;

/// Checks one bundle against its automaton: every label with minimal path
/// length `l` is in the section at minimal witness length `2l + 1`, and every
/// section element found decodes to an accepting path with that label.
fn check_bundle(aut_id: usize, bundle: &ReductionBundle, cfg: &SearchConfig) -> Result<Tally> {
    let mut tally = Tally::default();
    let norm = bundle.source.as_ref().expect("automaton bundle");
    let label_len = cfg.max_len.saturating_sub(1) / 2;
    let labels = norm.enumerate_path_labels_capped(label_len, cfg.max_elements)?;
    let hits = bundle.section_bounded(cfg)?;
    let by_key: HashMap<Vec<u8>, usize> = hits
        .iter()
        .enumerate()
        .map(|(i, h)| (h.element.canonical_key(), i))
        .collect();
    let min_len: HashMap<Vec<u8>, usize> = labels
        .iter()
        .map(|l| (l.element.canonical_key(), l.length))
        .collect();

    for label in &labels {
        let hit = by_key
            .get(&label.element.canonical_key())
            .map(|&i| &hits[i]);
        tally.check(hit.map(|h| h.length) == Some(2 * label.length + 1), || {
            format!(
                "automaton {aut_id}: label {:?} with path length {} found at {:?}, expected {}",
                label.element,
                label.length,
                hit.map(|h| h.length),
                2 * label.length + 1
            )
        });
    }

    for hit in &hits {
        match witness_to_path(bundle, &hit.witness) {
            Ok(path) => {
                let label = norm.path_label(&path);
                let expected = min_len.get(&hit.element.canonical_key()).copied();
                tally.check(
                    label.as_ref().ok() == Some(&hit.element)
                        && hit.length == 2 * path.len() + 1
                        && expected == Some(path.len()),
                    || {
                        format!(
                            "automaton {aut_id}: witness {:?} of {:?} decodes to path {:?} (label {label:?}, minimal length {expected:?})",
                            hit.witness.indices().unwrap_or_default(),
                            hit.element,
                            path.0
                        )
                    },
                );
                let back = path_to_witness(bundle, &path)?;
                let value = bundle.ambient.evaluate_word(&bundle.elements(), &back)?;
                tally.check(value == bundle.ambient_target(&hit.element)?, || {
                    format!(
                        "automaton {aut_id}: path {:?} re-encodes to value {value:?}",
                        path.0
                    )
                });
            }
            Err(e) => tally.fail(format!(
                "automaton {aut_id}: witness {:?} of {:?} does not decode: {e}",
                hit.witness.indices().unwrap_or_default(),
                hit.element
            )),
        }
    }
    Ok(tally)
}

fn e2e(
    suite: Suite,
    opts: &VerifyOptions,
    max_states: usize,
    max_transitions: usize,
    build: impl Fn(&Automaton) -> Result<ReductionBundle> + Sync,
) -> Result<SuiteReport> {
    let started = Instant::now();
    let count = opts.count.unwrap_or(E2E_COUNT);
    let max_len = opts.max_len.unwrap_or(E2E_MAX_LEN);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let automata: Vec<Automaton> = (0..count)
        .map(|_| random_automaton(&mut rng, max_states, max_transitions, E2E_LABELS))
        .collect();
    let cfg = SearchConfig::new(max_len).with_max_elements(opts.max_elements);
    let run = |(i, aut): (usize, &Automaton)| -> Result<(Tally, usize)> {
        let bundle = build(aut)?;
        Ok((check_bundle(i, &bundle, &cfg)?, bundle.len()))
    };
    let parts: Vec<(Tally, usize)> = if opts.parallel {
        automata
            .par_iter()
            .enumerate()
            .map(run)
            .collect::<Result<_>>()?
    } else {
        automata
            .iter()
            .enumerate()
            .map(run)
            .collect::<Result<_>>()?
    };
    let mut tally = Tally::default();
    let mut generators = Vec::with_capacity(parts.len());
    for (t, g) in parts {
        tally.merge(t);
        generators.push(g);
    }
    let details = json!({
        "seed": opts.seed,
        "automata": count,
        "max_states": max_states,
        "max_transitions": max_transitions,
        "max_len": max_len,
        "generators_per_bundle": generators,
    });
    Ok(tally.into_report(suite, details, started))
}

/// Random automata over `Z^2` with at most 3 states, each reduced through the
/// `MonToRat` construction.
pub fn thm7_e2e(opts: &VerifyOptions) -> Result<SuiteReport> {
    e2e(Suite::Thm7E2e, opts, 3, 4, |aut| {
        mon_to_rat(aut, MonToRatOptions::default())
    })
}

/// Random automata over `Z^2` with at most 7 states, each reduced through the
/// `TighterAut` construction with `A` the signed 2×2 permutations.
pub fn thm9_e2e(opts: &VerifyOptions) -> Result<SuiteReport> {
    let a = signed_permutation_group(2)?;
    let v = find_trivial_stabilizer_vector(&a);
    e2e(Suite::Thm9E2e, opts, 7, 7, |aut| {
        tighter_aut(aut, &a, &v, XsyChoice::Rotation)
    })
}

/// A 7-state automaton over `Z` accepting only the label 1, whose
/// `TighterAut` bundle with an added `(1, 1, y)` has the word
/// `edge · edge · (1, c^{-1}, s) · (1, 1, y)^2` in the section at label 2.
///
/// The first edge goes from the initial state to a state with image `b`, the
/// second from the state with image `-b` to the state with image `-c`; the
/// two lattice letters multiply to `c` although they do not chain.
pub fn negative_control_fixture() -> Result<Automaton> {
    let a = signed_permutation_group(2)?;
    let order = state_image_order(&a);
    let neg = |i: usize| {
        let m = a.matrix(i);
        let negated = crate::groups::IntMatrix::from_rows(
            &m.to_rows()
                .iter()
                .map(|r| r.iter().map(|x| -x).collect())
                .collect::<Vec<_>>(),
        )
        .expect("square");
        a.index_of(&negated).expect("closed under negation")
    };
    let pos = |i: usize| order.iter().position(|&x| x == i).expect("in order");
    let id = a.identity();
    let c = order[1];
    let b = order[2..]
        .iter()
        .copied()
        .find(|&b| ![id, neg(id), c, neg(c)].contains(&b))
        .expect("|A| = 8");
    // normalized state k ≥ 2 is pre-normalization state k - 1
    let pre = |k: usize| if k == 0 { 0 } else { k - 1 };
    let (kb, knb, knc) = (pos(b), pos(neg(b)), pos(neg(c)));
    let one = Element::FreeAbelian(vec![1]);
    Automaton::new(
        GroupSpec::FreeAbelian { rank: 1 },
        7,
        0,
        [pre(kb)],
        vec![
            Transition {
                from: 0,
                label: one.clone(),
                to: pre(kb),
            },
            Transition {
                from: pre(knb),
                label: one,
                to: pre(knc),
            },
        ],
    )
}

/// Adds `(1, 1, y)` to the `TighterAut` bundle of the fixture: at least one
/// section element found must fail to decode, while the unmodified bundle
/// decodes everything.
pub fn negative_control(opts: &VerifyOptions) -> Result<SuiteReport> {
    let started = Instant::now();
    let max_len = opts.max_len.unwrap_or(E2E_MAX_LEN);
    let cfg = SearchConfig::new(max_len).with_max_elements(opts.max_elements);
    let aut = negative_control_fixture()?;
    let a = signed_permutation_group(2)?;
    let v = find_trivial_stabilizer_vector(&a);
    let bundle = tighter_aut(&aut, &a, &v, XsyChoice::Rotation)?;
    let mut tally = Tally::default();

    let clean = bundle.section_bounded(&cfg)?;
    for hit in &clean {
        let decoded = witness_to_path(&bundle, &hit.witness);
        tally.check(decoded.is_ok(), || {
            format!(
                "unmodified bundle: {:?} does not decode: {:?}",
                hit.element,
                decoded.err()
            )
        });
    }

    let factors = bundle.ambient.factors().expect("product");
    let extra = Element::Product(vec![
        factors[0].identity(),
        factors[1].identity(),
        crate::groups::build_prop3_group().y,
    ]);
    let broken = bundle.clone().with_extra_generator(extra)?;
    let hits = broken.section_bounded(&cfg)?;
    let mut failing = Vec::new();
    for hit in &hits {
        if let Err(e) = witness_to_path(&broken, &hit.witness) {
            failing.push(json!({
                "element": broken.g_spec().element_to_json(&hit.element),
                "witness": hit.witness.indices()?,
                "error": e.to_string(),
            }));
        }
    }
    tally.check(!failing.is_empty(), || {
        format!(
            "no section element of the modified bundle fails to decode ({} found)",
            hits.len()
        )
    });
    let details = json!({
        "max_len": max_len,
        "clean_section": clean.len(),
        "modified_section": hits.len(),
        "failing": failing,
    });
    Ok(tally.into_report(Suite::NegativeControl, details, started))
}

/// Shortest length of every element over all sequences of at most `max_len`
/// generators, by plain enumeration.
fn naive_lengths(
    spec: &GroupSpec,
    gens: &[Element],
    max_len: usize,
) -> Result<HashMap<Vec<u8>, usize>> {
    let mut out = HashMap::new();
    let mut layer = vec![spec.identity()];
    out.insert(spec.identity().canonical_key(), 0);
    for len in 1..=max_len {
        let mut next = Vec::with_capacity(layer.len() * gens.len());
        for e in &layer {
            for g in gens {
                let p = spec.multiply(e, g)?;
                out.entry(p.canonical_key()).or_insert(len);
                next.push(p);
            }
        }
        layer = next;
    }
    Ok(out)
}

/// Seeded generator sets over `Z^2`: the reachable set at every bound up to
/// `max_len` equals plain enumeration of generator sequences, witnesses
/// evaluate to their element at the minimal length, and the sets grow with
/// the bound.
pub fn oracle_completeness(opts: &VerifyOptions) -> Result<SuiteReport> {
    let started = Instant::now();
    let count = opts.count.unwrap_or(20);
    let max_len = opts.max_len.unwrap_or(6);
    let spec = GroupSpec::FreeAbelian { rank: 2 };
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut tally = Tally::default();
    for set_id in 0..count {
        let k = rng.gen_range(1..=4);
        let gens: Vec<Element> = (0..k).map(|_| E2E_LABELS.sample(&mut rng)).collect();
        let naive = naive_lengths(&spec, &gens, max_len)?;
        let mut previous: Option<Vec<Vec<u8>>> = None;
        for len in 0..=max_len {
            let cfg = SearchConfig::new(len)
                .with_max_elements(opts.max_elements)
                .with_parallel(opts.parallel);
            let set = reachable_set(&spec, &gens, &cfg)?;
            let expected: HashMap<&Vec<u8>, usize> = naive
                .iter()
                .filter(|(_, &l)| l <= len)
                .map(|(k, &l)| (k, l))
                .collect();
            tally.check(set.len() == expected.len(), || {
                format!(
                    "set {set_id}, L={len}: {} elements, enumeration gives {}",
                    set.len(),
                    expected.len()
                )
            });
            for r in set.iter() {
                let key = r.element().canonical_key();
                let w = r.witness();
                let value = spec.evaluate_word(&gens, &w)?;
                tally.check(
                    expected.get(&key) == Some(&r.length()) && w.len() == r.length() && &value == r.element(),
                    || {
                        format!(
                            "set {set_id}, L={len}: {:?} at length {} (enumeration {:?}), witness value {value:?}",
                            r.element(),
                            r.length(),
                            expected.get(&key)
                        )
                    },
                );
            }
            if let Some(prev) = &previous {
                tally.check(prev.iter().all(|k| set.get_by_key(k).is_some()), || {
                    format!(
                        "set {set_id}: reachable set at L={} not contained in L={len}",
                        len - 1
                    )
                });
            }
            previous = Some(set.iter().map(|r| r.element().canonical_key()).collect());
        }
    }
    let details = json!({ "seed": opts.seed, "generator_sets": count, "max_len": max_len });
    Ok(tally.into_report(Suite::Oracle, details, started))
}
