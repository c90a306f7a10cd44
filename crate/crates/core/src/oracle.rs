//! Bounded brute-force membership and section extraction for finitely
//! generated submonoids.
//!
//! All searches are breadth-first by word length and deduplicate on
//! [`Element::canonical_key`]. A layer is expanded in the order of the
//! previous layer, generators in index order, and the first discovery of an
//! element wins; this makes every stored witness the lexicographically
//! smallest among the minimal-length ones. The parallel mode computes
//! candidate products concurrently and merges them in that same order, so
//! it returns exactly what the sequential search returns.

use std::collections::HashMap;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{Error, Result, SearchStatsSnapshot};
use crate::groups::{Element, GeneratorWord, GroupSpec};

/// Default cap on the number of distinct elements a search may hold.
pub const DEFAULT_MAX_ELEMENTS: usize = 1_000_000;

const PARALLEL_CHUNK: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchConfig {
    pub max_len: usize,
    pub max_elements: usize,
    /// Witnesses are always the lexicographically smallest minimal ones; the
    /// flag is kept so callers can state the requirement explicitly.
    pub deterministic_witness: bool,
    pub parallel: bool,
}

impl SearchConfig {
    pub fn new(max_len: usize) -> Self {
        SearchConfig {
            max_len,
            max_elements: DEFAULT_MAX_ELEMENTS,
            deterministic_witness: true,
            parallel: false,
        }
    }

    pub fn with_max_elements(mut self, max_elements: usize) -> Self {
        self.max_elements = max_elements;
        self
    }

    pub fn with_parallel(mut self, parallel: bool) -> Self {
        self.parallel = parallel;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.max_elements == 0 {
            return Err(Error::InvalidParameter(
                "max_elements must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Found,
    /// The whole bound was explored without finding the target. This is not
    /// a proof of non-membership.
    NotFoundWithinBound,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Found => "FOUND",
            Verdict::NotFoundWithinBound => "NOT_FOUND_WITHIN_BOUND",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SearchStats {
    pub visited: usize,
    pub max_frontier: usize,
    pub depth_reached: usize,
    pub wall_time: Duration,
}

impl SearchStats {
    pub fn to_json(&self) -> Value {
        json!({
            "visited": self.visited,
            "max_frontier": self.max_frontier,
            "depth_reached": self.depth_reached,
            "wall_time_ms": self.wall_time.as_secs_f64() * 1e3,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchResult<W> {
    pub verdict: Verdict,
    pub witness: Option<W>,
    pub stats: SearchStats,
}

impl<W> SearchResult<W> {
    pub fn found(&self) -> bool {
        self.verdict == Verdict::Found
    }
}

#[derive(Debug, Clone)]
struct Node {
    element: Element,
    length: u32,
    parent: Option<(u32, u32)>,
}

/// Every product of at most `max_len` generators, each with a minimal witness.
#[derive(Debug, Clone)]
pub struct ReachableSet {
    nodes: Vec<Node>,
    index: HashMap<Vec<u8>, u32>,
    stats: SearchStats,
}

/// One entry of a [`ReachableSet`].
#[derive(Debug, Clone, Copy)]
pub struct Reached<'a> {
    set: &'a ReachableSet,
    id: usize,
}

impl<'a> Reached<'a> {
    pub fn element(&self) -> &'a Element {
        &self.set.nodes[self.id].element
    }

    /// Minimal word length.
    pub fn length(&self) -> usize {
        self.set.nodes[self.id].length as usize
    }

    pub fn witness(&self) -> GeneratorWord {
        self.set.witness(self.id)
    }
}

impl ReachableSet {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn stats(&self) -> SearchStats {
        self.stats
    }

    pub fn get(&self, element: &Element) -> Option<Reached<'_>> {
        self.get_by_key(&element.canonical_key())
    }

    pub fn get_by_key(&self, key: &[u8]) -> Option<Reached<'_>> {
        self.index.get(key).map(|&id| Reached {
            set: self,
            id: id as usize,
        })
    }

    /// Entries in discovery order (by length, then by witness).
    pub fn iter(&self) -> impl Iterator<Item = Reached<'_>> {
        (0..self.nodes.len()).map(move |id| Reached { set: self, id })
    }

    fn witness(&self, mut id: usize) -> GeneratorWord {
        let mut rev = Vec::with_capacity(self.nodes[id].length as usize);
        while let Some((parent, g)) = self.nodes[id].parent {
            rev.push(g as usize);
            id = parent as usize;
        }
        rev.reverse();
        GeneratorWord::positive(rev)
    }
}

/// Breadth-first enumeration of the submonoid generated by `gens`.
///
/// `stop` is consulted for every newly discovered element; returning true
/// ends the search early.
fn bfs(
    spec: &GroupSpec,
    gens: &[Element],
    cfg: &SearchConfig,
    prune: Option<&Pruner>,
    mut stop: impl FnMut(&Element) -> bool,
) -> Result<ReachableSet> {
    cfg.validate()?;
    for (i, g) in gens.iter().enumerate() {
        spec.check(g)
            .map_err(|e| Error::mismatch(format!("generator {i}: {e}")))?;
    }
    let started = Instant::now();
    let identity = spec.identity();
    let mut set = ReachableSet {
        nodes: Vec::new(),
        index: HashMap::new(),
        stats: SearchStats::default(),
    };
    set.index.insert(identity.canonical_key(), 0);
    let done = stop(&identity);
    set.nodes.push(Node {
        element: identity,
        length: 0,
        parent: None,
    });
    set.stats.max_frontier = 1;
    if done {
        set.stats.visited = 1;
        set.stats.wall_time = started.elapsed();
        return Ok(set);
    }

    let mut layer = 0..1usize;
    'layers: for depth in 1..=cfg.max_len {
        let layer_start = set.nodes.len();
        let mut chunk_start = layer.start;
        while chunk_start < layer.end {
            let chunk_end = (chunk_start + PARALLEL_CHUNK).min(layer.end);
            let expand = |id: usize| -> Result<Vec<(u32, Element, Vec<u8>)>> {
                let base = &set.nodes[id].element;
                let mut out = Vec::with_capacity(gens.len());
                for (g, gen) in gens.iter().enumerate() {
                    let e = spec.multiply(base, gen)?;
                    if prune.is_none_or(|p| p.admits(&e, depth)) {
                        let k = e.canonical_key();
                        out.push((g as u32, e, k));
                    }
                }
                Ok(out)
            };
            let candidates: Vec<Vec<(u32, Element, Vec<u8>)>> = if cfg.parallel {
                (chunk_start..chunk_end)
                    .into_par_iter()
                    .map(expand)
                    .collect::<Result<_>>()?
            } else {
                (chunk_start..chunk_end)
                    .map(expand)
                    .collect::<Result<_>>()?
            };
            for (offset, products) in candidates.into_iter().enumerate() {
                let parent = (chunk_start + offset) as u32;
                for (g, element, key) in products {
                    if set.index.contains_key(&key) {
                        continue;
                    }
                    if set.nodes.len() >= cfg.max_elements {
                        return Err(Error::ResourceLimit {
                            what: "submonoid search distinct elements".into(),
                            cap: cfg.max_elements,
                            stats: Some(SearchStatsSnapshot {
                                visited: set.nodes.len(),
                                max_frontier: set.stats.max_frontier,
                                depth_reached: depth,
                            }),
                        });
                    }
                    let done = stop(&element);
                    set.index.insert(key, set.nodes.len() as u32);
                    set.nodes.push(Node {
                        element,
                        length: depth as u32,
                        parent: Some((parent, g)),
                    });
                    if done {
                        set.stats.depth_reached = depth;
                        break 'layers;
                    }
                }
            }
            chunk_start = chunk_end;
        }
        layer = layer_start..set.nodes.len();
        set.stats.depth_reached = depth;
        set.stats.max_frontier = set.stats.max_frontier.max(layer.len());
        if layer.is_empty() {
            break;
        }
    }
    set.stats.visited = set.nodes.len();
    set.stats.wall_time = started.elapsed();
    Ok(set)
}

/// All products of at most `cfg.max_len` generators, breadth-first by length.
/// With no generators the set is just the identity.
pub fn reachable_set(
    spec: &GroupSpec,
    gens: &[Element],
    cfg: &SearchConfig,
) -> Result<ReachableSet> {
    bfs(spec, gens, cfg, None, |_| false)
}

/// Bounded submonoid membership with a minimal-length witness.
pub fn submonoid_member_bounded(
    spec: &GroupSpec,
    gens: &[Element],
    target: &Element,
    cfg: &SearchConfig,
) -> Result<SearchResult<GeneratorWord>> {
    spec.check(target)?;
    let pruner = match spec.factors() {
        Some(f) => Pruner::new(
            spec,
            gens,
            (0..f.len()).map(|i| (i, target.factor(i).cloned())),
            cfg.max_len,
        )?,
        None => None,
    };
    let set = bfs(spec, gens, cfg, pruner.as_ref(), |e| e == target)?;
    let stats = set.stats;
    Ok(match set.get(target) {
        Some(hit) => SearchResult {
            verdict: Verdict::Found,
            witness: Some(hit.witness()),
            stats,
        },
        None => SearchResult {
            verdict: Verdict::NotFoundWithinBound,
            witness: None,
            stats,
        },
    })
}

/// Cap on the size of a single factor's distance table; factors whose ball
/// is larger are not used for pruning.
const PRUNE_TABLE_CAP: usize = 200_000;

struct FactorTable {
    factor: usize,
    spec: GroupSpec,
    target: Element,
    dist: HashMap<Vec<u8>, u32>,
}

/// Discards prefixes that cannot be completed to a target within the length
/// bound. For each tabled factor of a direct product, a prefix survives only
/// if `prefix⁻¹ · target` in that factor is a product of at most the
/// remaining number of the generators' projections.
///
/// Every prefix of a word reaching the target survives, and so does every
/// parent of such a prefix in the breadth-first tree, so a pruned search
/// finds the same targets with the same witnesses as an unpruned one.
struct Pruner {
    max_len: usize,
    tables: Vec<FactorTable>,
}

impl Pruner {
    fn new(
        spec: &GroupSpec,
        gens: &[Element],
        targets: impl IntoIterator<Item = (usize, Option<Element>)>,
        max_len: usize,
    ) -> Result<Option<Self>> {
        let Some(factors) = spec.factors() else {
            return Ok(None);
        };
        let mut tables = Vec::new();
        for (i, target) in targets {
            let Some(target) = target else { continue };
            let mut proj: Vec<Element> = Vec::new();
            for (k, g) in gens.iter().enumerate() {
                let p = g
                    .factor(i)
                    .ok_or_else(|| Error::mismatch(format!("generator {k} has no factor {i}")))?;
                if !proj.contains(p) {
                    proj.push(p.clone());
                }
            }
            let cfg = SearchConfig::new(max_len).with_max_elements(PRUNE_TABLE_CAP);
            let ball = match bfs(&factors[i], &proj, &cfg, None, |_| false) {
                Ok(ball) => ball,
                Err(Error::ResourceLimit { .. }) => continue,
                Err(e) => return Err(e),
            };
            let dist = ball
                .index
                .iter()
                .map(|(k, &id)| (k.clone(), ball.nodes[id as usize].length))
                .collect();
            tables.push(FactorTable {
                factor: i,
                spec: factors[i].clone(),
                target,
                dist,
            });
        }
        Ok((!tables.is_empty()).then_some(Pruner { max_len, tables }))
    }

    fn admits(&self, e: &Element, depth: usize) -> bool {
        let budget = self.max_len.saturating_sub(depth);
        self.tables.iter().all(|t| {
            let Some(part) = e.factor(t.factor) else {
                return true;
            };
            match t
                .spec
                .invert(part)
                .and_then(|inv| t.spec.multiply(&inv, &t.target))
            {
                Ok(rest) => t
                    .dist
                    .get(&rest.canonical_key())
                    .is_some_and(|&d| d as usize <= budget),
                Err(_) => true,
            }
        })
    }
}

/// Splits a direct product into a `G` part (the first `g_factors` factors)
/// and an `H` part (the rest). A part with a single factor is that factor's
/// element itself, otherwise a product element.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoordinateSelector {
    pub g_factors: usize,
}

impl CoordinateSelector {
    pub fn new(g_factors: usize) -> Self {
        CoordinateSelector { g_factors }
    }

    fn validate(&self, spec: &GroupSpec) -> Result<usize> {
        let factors = spec.factors().ok_or_else(|| {
            Error::InvalidParameter("section needs a direct product ambient group".into())
        })?;
        if self.g_factors == 0 || self.g_factors >= factors.len() {
            return Err(Error::InvalidParameter(format!(
                "selector takes {} G-factors of {}; both parts must be nonempty",
                self.g_factors,
                factors.len()
            )));
        }
        Ok(factors.len())
    }

    pub fn g_spec(&self, spec: &GroupSpec) -> Result<GroupSpec> {
        self.validate(spec)?;
        Ok(part_spec(&spec.factors().unwrap()[..self.g_factors]))
    }

    pub fn h_spec(&self, spec: &GroupSpec) -> Result<GroupSpec> {
        self.validate(spec)?;
        Ok(part_spec(&spec.factors().unwrap()[self.g_factors..]))
    }

    /// `(G-part, H-part)` of an ambient element.
    pub fn split(&self, e: &Element) -> Option<(Element, Element)> {
        let Element::Product(parts) = e else {
            return None;
        };
        if self.g_factors == 0 || self.g_factors >= parts.len() {
            return None;
        }
        Some((
            part_element(&parts[..self.g_factors]),
            part_element(&parts[self.g_factors..]),
        ))
    }

    fn h_matches(&self, e: &Element, h: &Element) -> bool {
        let Element::Product(parts) = e else {
            return false;
        };
        let rest = &parts[self.g_factors..];
        match (rest, h) {
            ([single], _) => single == h,
            (many, Element::Product(hs)) => many == hs.as_slice(),
            _ => false,
        }
    }

    /// Ambient element with the given parts.
    pub fn join(&self, spec: &GroupSpec, g: &Element, h: &Element) -> Result<Element> {
        let total = self.validate(spec)?;
        let mut parts = Vec::with_capacity(total);
        for (part, count) in [(g, self.g_factors), (h, total - self.g_factors)] {
            match part {
                Element::Product(ps) if count != 1 => parts.extend(ps.iter().cloned()),
                other => parts.push(other.clone()),
            }
        }
        let e = Element::Product(parts);
        spec.check(&e)?;
        Ok(e)
    }
}

fn part_spec(factors: &[GroupSpec]) -> GroupSpec {
    match factors {
        [single] => single.clone(),
        many => GroupSpec::DirectProduct(many.to_vec()),
    }
}

fn part_element(parts: &[Element]) -> Element {
    match parts {
        [single] => single.clone(),
        many => Element::Product(many.to_vec()),
    }
}

/// One element of a bounded section with its minimal witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectionHit {
    pub element: Element,
    pub length: usize,
    pub witness: GeneratorWord,
}

/// The `h`-section of the bounded submonoid: every `G`-part `g` such that
/// `(g, h_target)` is a product of at most `cfg.max_len` generators.
pub fn section_bounded(
    spec: &GroupSpec,
    gens: &[Element],
    selector: CoordinateSelector,
    h_target: &Element,
    cfg: &SearchConfig,
) -> Result<Vec<SectionHit>> {
    let h_spec = selector.h_spec(spec)?;
    h_spec.check(h_target)?;
    let total = spec.factors().expect("validated").len();
    let h_parts: Vec<Element> = match h_target {
        Element::Product(parts) if total - selector.g_factors > 1 => parts.clone(),
        single => vec![single.clone()],
    };
    let targets = (selector.g_factors..total).zip(h_parts.into_iter().map(Some));
    let pruner = Pruner::new(spec, gens, targets, cfg.max_len)?;
    let set = bfs(spec, gens, cfg, pruner.as_ref(), |_| false)?;
    Ok(section_of(&set, selector, h_target))
}

/// Section hits of an already computed reachable set.
pub fn section_of(
    set: &ReachableSet,
    selector: CoordinateSelector,
    h_target: &Element,
) -> Vec<SectionHit> {
    set.iter()
        .filter(|r| selector.h_matches(r.element(), h_target))
        .map(|r| SectionHit {
            element: selector.split(r.element()).expect("validated").0,
            length: r.length(),
            witness: r.witness(),
        })
        .collect()
}

/// Bounded search in a product of two submonoids `first* · second*`.
///
/// Witnesses index the concatenated generator list `first ++ second`; they
/// consist of letters from `first` followed by letters from `second`.
/// Returned elements are ordered by minimal total length, ties broken by
/// the lexicographically smallest witness.
pub fn product_reachable(
    spec: &GroupSpec,
    first: &[Element],
    second: &[Element],
    cfg: &SearchConfig,
) -> Result<Vec<SectionHit>> {
    let a = reachable_set(spec, first, cfg)?;
    let b = reachable_set(spec, second, cfg)?;
    let offset = first.len();
    let mut best: HashMap<Vec<u8>, usize> = HashMap::new();
    let mut hits: Vec<SectionHit> = Vec::new();
    for ra in a.iter() {
        for rb in b.iter() {
            let length = ra.length() + rb.length();
            if length > cfg.max_len {
                continue;
            }
            let element = spec.multiply(ra.element(), rb.element())?;
            let mut letters = ra.witness().indices()?;
            letters.extend(rb.witness().indices()?.into_iter().map(|i| i + offset));
            let witness = GeneratorWord::positive(letters);
            let key = element.canonical_key();
            match best.get(&key) {
                Some(&i) => {
                    let cur = &hits[i];
                    let better =
                        (length, witness.indices()?) < (cur.length, cur.witness.indices()?);
                    if better {
                        hits[i] = SectionHit {
                            element,
                            length,
                            witness,
                        };
                    }
                }
                None => {
                    if hits.len() >= cfg.max_elements {
                        return Err(Error::ResourceLimit {
                            what: "product search distinct elements".into(),
                            cap: cfg.max_elements,
                            stats: None,
                        });
                    }
                    best.insert(key, hits.len());
                    hits.push(SectionHit {
                        element,
                        length,
                        witness,
                    });
                }
            }
        }
    }
    hits.sort_by(|x, y| (x.length, x.witness.letters()).cmp(&(y.length, y.witness.letters())));
    Ok(hits)
}
