use std::fmt;
use std::str::FromStr;

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::groups::{Element, FiniteMatrixGroup, GroupSpec, TopGroup};
use crate::oracle::{
    product_reachable, section_bounded, submonoid_member_bounded, CoordinateSelector, SearchConfig,
    SearchResult, SectionHit, Verdict,
};
use crate::rational::Automaton;

/// Which construction produced a bundle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    /// `A_0* B_0*` as the `s`-section of a submonoid of `G × H`.
    ReducePair,
    /// A rational subset as a section of `<y>* T*` in `G × (Z wr Z_m)`.
    PairToRat,
    /// A rational subset as a section of a submonoid of `G × (Z wr Z_m) × H`.
    MonToRat,
    /// A rational subset as a section of a submonoid of `G × (Z^n ⋊ A) × H`.
    TighterAut,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::ReducePair => "pair",
            Variant::PairToRat => "pair2rat",
            Variant::MonToRat => "mon2rat",
            Variant::TighterAut => "tighter",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pair" => Ok(Variant::ReducePair),
            "pair2rat" => Ok(Variant::PairToRat),
            "mon2rat" => Ok(Variant::MonToRat),
            "tighter" => Ok(Variant::TighterAut),
            other => Err(Error::InvalidParameter(format!(
                "unknown variant `{other}`"
            ))),
        }
    }
}

/// Role of a generator in the construction that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Origin {
    /// `(a, x)` for `a ∈ A_0`.
    ALetter,
    /// `(1, s)`.
    Separator,
    /// `(b, y)` for `b ∈ B_0`.
    BLetter,
    /// The letter of automaton transition `transition`, from state `from` to `to`.
    TEdge {
        from: usize,
        to: usize,
        transition: usize,
    },
    /// `(1, e_0^{-1}, …)`.
    YPow,
    /// `(1, c^{-1}, s)`.
    CInvSep,
    /// `(1, v^{-1}, y)`.
    VInvLetter,
    /// Added by hand, not part of the construction.
    Extra,
}

impl Origin {
    pub fn tag(&self) -> String {
        match self {
            Origin::ALetter => "A-letter".into(),
            Origin::Separator => "separator".into(),
            Origin::BLetter => "B-letter".into(),
            Origin::TEdge { from, to, .. } => format!("T-edge({from},{to})"),
            Origin::YPow => "yPow".into(),
            Origin::CInvSep => "cInvSep".into(),
            Origin::VInvLetter => "vInvLetter".into(),
            Origin::Extra => "extra".into(),
        }
    }

    fn parse(tag: &str, transition: Option<usize>, path: &str) -> Result<Self> {
        Ok(match tag {
            "A-letter" => Origin::ALetter,
            "separator" => Origin::Separator,
            "B-letter" => Origin::BLetter,
            "yPow" => Origin::YPow,
            "cInvSep" => Origin::CInvSep,
            "vInvLetter" => Origin::VInvLetter,
            "extra" => Origin::Extra,
            t if t.starts_with("T-edge(") && t.ends_with(')') => {
                let inner = &t["T-edge(".len()..t.len() - 1];
                let (i, j) = inner
                    .split_once(',')
                    .ok_or_else(|| Error::schema(path, format!("bad edge tag `{t}`")))?;
                let parse = |x: &str| {
                    x.trim()
                        .parse::<usize>()
                        .map_err(|_| Error::schema(path, format!("bad edge tag `{t}`")))
                };
                Origin::TEdge {
                    from: parse(i)?,
                    to: parse(j)?,
                    transition: transition.ok_or_else(|| {
                        Error::schema(path, "T-edge generator needs a `transition` index")
                    })?,
                }
            }
            other => return Err(Error::schema(path, format!("unknown origin tag `{other}`"))),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BundleGenerator {
    pub element: Element,
    pub origin: Origin,
}

/// Output of a construction: an ambient group `G × H…`, a generator list
/// tagged with origins, and the `H`-coordinate `target` at which the section
/// is taken.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionBundle {
    pub variant: Variant,
    pub ambient: GroupSpec,
    pub generators: Vec<BundleGenerator>,
    /// `H`-part of the section coordinate.
    pub target: Element,
    /// The automaton after normalization to a single accepting state; paths
    /// and witnesses refer to its transitions.
    pub source: Option<Automaton>,
    /// SHA-256 of the JSON of the automaton as given, before normalization.
    pub source_hash: Option<String>,
    /// `TighterAut`: index in `A` assigned to each state.
    pub state_images: Option<Vec<usize>>,
    /// `TighterAut`: the trivial-stabilizer vector `v`.
    pub lattice_vector: Option<Vec<i64>>,
}

pub(crate) fn automaton_hash(aut: &Automaton) -> String {
    let text = serde_json::to_string(&aut.to_json()).expect("json");
    hex::encode(Sha256::digest(text.as_bytes()))
}

impl ReductionBundle {
    pub fn selector(&self) -> CoordinateSelector {
        CoordinateSelector::new(1)
    }

    /// The group `G` whose subset is being described.
    pub fn g_spec(&self) -> &GroupSpec {
        &self.ambient.factors().expect("ambient is a product")[0]
    }

    pub fn h_spec(&self) -> GroupSpec {
        self.selector()
            .h_spec(&self.ambient)
            .expect("ambient is a product")
    }

    pub fn elements(&self) -> Vec<Element> {
        self.generators.iter().map(|g| g.element.clone()).collect()
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    /// `(g, target)` in the ambient group.
    pub fn ambient_target(&self, g: &Element) -> Result<Element> {
        self.selector().join(&self.ambient, g, &self.target)
    }

    /// The finite group `A` of a `TighterAut` bundle.
    pub fn lattice_group(&self) -> Option<&FiniteMatrixGroup> {
        match self.ambient.factors()?.get(1)? {
            GroupSpec::SemidirectLattice(sd) => match sd.top() {
                TopGroup::Finite(g) => Some(g),
                _ => None,
            },
            _ => None,
        }
    }

    /// Adds a generator outside the construction, tagged [`Origin::Extra`].
    pub fn with_extra_generator(mut self, element: Element) -> Result<Self> {
        self.ambient.check(&element)?;
        self.generators.push(BundleGenerator {
            element,
            origin: Origin::Extra,
        });
        Ok(self)
    }

    /// Indices of the generators forming the first and second factor of a
    /// `PairToRat` bundle (`<y>*` and `T*`).
    fn pair_factors(&self) -> (Vec<usize>, Vec<usize>) {
        let first = (0..self.len())
            .filter(|&i| self.generators[i].origin == Origin::YPow)
            .collect();
        let second = (0..self.len())
            .filter(|&i| self.generators[i].origin != Origin::YPow)
            .collect();
        (first, second)
    }

    /// Bounded membership of an ambient element in the bundle's monoid
    /// (`<y>* T*` for `PairToRat`, the generated submonoid otherwise).
    pub fn member_bounded(
        &self,
        target: &Element,
        cfg: &SearchConfig,
    ) -> Result<SearchResult<crate::groups::GeneratorWord>> {
        self.ambient.check(target)?;
        match self.variant {
            Variant::PairToRat => {
                let started = std::time::Instant::now();
                let hits = self.pair_product(cfg)?;
                let found = hits.iter().find(|h| &h.element == target);
                let stats = crate::oracle::SearchStats {
                    visited: hits.len(),
                    max_frontier: hits.len(),
                    depth_reached: cfg.max_len,
                    wall_time: started.elapsed(),
                };
                Ok(SearchResult {
                    verdict: if found.is_some() {
                        Verdict::Found
                    } else {
                        Verdict::NotFoundWithinBound
                    },
                    witness: found.map(|h| h.witness.clone()),
                    stats,
                })
            }
            _ => submonoid_member_bounded(&self.ambient, &self.elements(), target, cfg),
        }
    }

    /// Every `g` with `(g, target)` reachable within the bound, each with a
    /// minimal witness over the bundle generators.
    pub fn section_bounded(&self, cfg: &SearchConfig) -> Result<Vec<SectionHit>> {
        match self.variant {
            Variant::PairToRat => {
                let sel = self.selector();
                Ok(self
                    .pair_product(cfg)?
                    .into_iter()
                    .filter_map(|h| {
                        let (g, rest) = sel.split(&h.element)?;
                        (rest == self.target).then_some(SectionHit {
                            element: g,
                            length: h.length,
                            witness: h.witness,
                        })
                    })
                    .collect())
            }
            _ => section_bounded(
                &self.ambient,
                &self.elements(),
                self.selector(),
                &self.target,
                cfg,
            ),
        }
    }

    /// Ambient elements of `<y>* T*` with witnesses over the bundle's own
    /// generator indices.
    fn pair_product(&self, cfg: &SearchConfig) -> Result<Vec<SectionHit>> {
        let (first, second) = self.pair_factors();
        let pick = |ix: &[usize]| {
            ix.iter()
                .map(|&i| self.generators[i].element.clone())
                .collect::<Vec<_>>()
        };
        let hits = product_reachable(&self.ambient, &pick(&first), &pick(&second), cfg)?;
        let remap: Vec<usize> = first.iter().chain(&second).copied().collect();
        Ok(hits
            .into_iter()
            .map(|h| SectionHit {
                element: h.element,
                length: h.length,
                witness: crate::groups::GeneratorWord::positive(
                    h.witness.letters().iter().map(|l| remap[l.index]),
                ),
            })
            .collect())
    }

    pub fn to_json(&self) -> Value {
        let gens: Vec<Value> = self
            .generators
            .iter()
            .map(|g| {
                let mut obj = json!({
                    "origin": g.origin.tag(),
                    "element": self.ambient.element_to_json(&g.element),
                });
                if let Origin::TEdge { transition, .. } = g.origin {
                    obj["transition"] = json!(transition);
                }
                obj
            })
            .collect();
        let mut out = json!({
            "variant": self.variant.name(),
            "ambient": self.ambient,
            "ambient_description": self.ambient.to_string(),
            "g_factors": 1,
            "generators": gens,
            "target": self.h_spec().element_to_json(&self.target),
        });
        if let Some(src) = &self.source {
            out["source"] = src.to_json();
        }
        if let Some(h) = &self.source_hash {
            out["source_hash"] = json!(h);
        }
        if let Some(images) = &self.state_images {
            out["state_images"] = json!(images);
        }
        if let Some(v) = &self.lattice_vector {
            out["lattice_vector"] = json!(v);
        }
        out
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let obj = v
            .as_object()
            .ok_or_else(|| Error::schema("$", "bundle must be a JSON object"))?;
        let field = |name: &str| {
            obj.get(name)
                .ok_or_else(|| Error::schema("$", format!("missing field `{name}`")))
        };
        let variant: Variant = field("variant")?
            .as_str()
            .ok_or_else(|| Error::schema("$.variant", "expected a string"))?
            .parse()
            .map_err(|e: Error| Error::schema("$.variant", e.to_string()))?;
        let ambient: GroupSpec = serde_json::from_value(field("ambient")?.clone())
            .map_err(|e| Error::schema("$.ambient", e.to_string()))?;
        if ambient.factors().is_none_or(|f| f.len() < 2) {
            return Err(Error::schema(
                "$.ambient",
                "ambient group must be a product G × H",
            ));
        }
        if let Some(k) = obj.get("g_factors") {
            if k.as_u64() != Some(1) {
                return Err(Error::schema(
                    "$.g_factors",
                    "only g_factors = 1 is supported",
                ));
            }
        }
        let gens = field("generators")?
            .as_array()
            .ok_or_else(|| Error::schema("$.generators", "expected an array"))?;
        let mut generators = Vec::with_capacity(gens.len());
        for (i, g) in gens.iter().enumerate() {
            let path = format!("$.generators[{i}]");
            let tag = g
                .get("origin")
                .and_then(Value::as_str)
                .ok_or_else(|| Error::schema(&path, "missing string field `origin`"))?;
            let transition = g
                .get("transition")
                .and_then(Value::as_u64)
                .map(|t| t as usize);
            let origin = Origin::parse(tag, transition, &path)?;
            let element = ambient.element_from_json_at(
                g.get("element")
                    .ok_or_else(|| Error::schema(&path, "missing field `element`"))?,
                &format!("{path}.element"),
            )?;
            generators.push(BundleGenerator { element, origin });
        }
        let h_spec = CoordinateSelector::new(1).h_spec(&ambient)?;
        let target = h_spec.element_from_json_at(field("target")?, "$.target")?;
        let source = obj
            .get("source")
            .map(|s| Automaton::from_json(s).map_err(|e| Error::schema("$.source", e.to_string())))
            .transpose()?;
        let bundle = ReductionBundle {
            variant,
            ambient,
            generators,
            target,
            source,
            source_hash: obj
                .get("source_hash")
                .and_then(Value::as_str)
                .map(str::to_owned),
            state_images: obj
                .get("state_images")
                .map(|v| serde_json::from_value(v.clone()))
                .transpose()
                .map_err(|e| Error::schema("$.state_images", e.to_string()))?,
            lattice_vector: obj
                .get("lattice_vector")
                .map(|v| serde_json::from_value(v.clone()))
                .transpose()
                .map_err(|e| Error::schema("$.lattice_vector", e.to_string()))?,
        };
        bundle.validate()?;
        Ok(bundle)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text)?;
        Self::from_json(&v)
    }

    fn validate(&self) -> Result<()> {
        if let Some(src) = &self.source {
            if src.group() != self.g_spec() {
                return Err(Error::schema(
                    "$.source",
                    "automaton group differs from the G factor",
                ));
            }
            for (i, g) in self.generators.iter().enumerate() {
                if let Origin::TEdge {
                    from,
                    to,
                    transition,
                } = g.origin
                {
                    let t = src.transitions().get(transition).ok_or_else(|| {
                        Error::schema(
                            format!("$.generators[{i}].transition"),
                            format!("transition {transition} out of range"),
                        )
                    })?;
                    if t.from != from || t.to != to {
                        return Err(Error::schema(
                            format!("$.generators[{i}].origin"),
                            format!(
                                "tag T-edge({from},{to}) disagrees with transition {transition}"
                            ),
                        ));
                    }
                }
            }
        }
        if self.variant == Variant::TighterAut {
            let group = self.lattice_group().ok_or_else(|| {
                Error::schema("$.ambient", "tighter bundles need Z^n ⋊ A as second factor")
            })?;
            let images = self
                .state_images
                .as_ref()
                .ok_or_else(|| Error::schema("$", "tighter bundles need `state_images`"))?;
            if let Some(&bad) = images.iter().find(|&&a| a >= group.order()) {
                return Err(Error::schema(
                    "$.state_images",
                    format!("index {bad} out of range"),
                ));
            }
        }
        Ok(())
    }
}
