//! Group-labelled automata defining rational subsets, and a direct bounded
//! oracle over their path labels.

use std::collections::HashMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result, SearchStatsSnapshot};
use crate::groups::{Element, GeneratorWord, GroupSpec};
use crate::oracle::{SearchResult, SearchStats, Verdict, DEFAULT_MAX_ELEMENTS};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transition {
    pub from: usize,
    pub label: Element,
    pub to: usize,
}

/// A finite graph with edges labelled by elements of a base group. The
/// rational subset it defines is the set of labels of paths from the initial
/// state to an accepting state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Automaton {
    group: GroupSpec,
    generators: Vec<Element>,
    states: usize,
    initial: usize,
    accepting: Vec<usize>,
    transitions: Vec<Transition>,
}

/// Transition indices of a path from the initial state to an accepting state.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PathWitness(pub Vec<usize>);

impl PathWitness {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// One label of the rational subset with a minimal-length witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathLabel {
    pub element: Element,
    pub length: usize,
    pub witness: PathWitness,
}

impl Automaton {
    pub fn new(
        group: GroupSpec,
        states: usize,
        initial: usize,
        accepting: impl IntoIterator<Item = usize>,
        transitions: Vec<Transition>,
    ) -> Result<Self> {
        let mut accepting: Vec<usize> = accepting.into_iter().collect();
        accepting.sort_unstable();
        accepting.dedup();
        if initial >= states {
            return Err(Error::InvalidParameter(format!(
                "initial state {initial} out of range for {states} states"
            )));
        }
        if let Some(&a) = accepting.iter().find(|&&a| a >= states) {
            return Err(Error::InvalidParameter(format!(
                "accepting state {a} out of range for {states} states"
            )));
        }
        for (k, t) in transitions.iter().enumerate() {
            if t.from >= states || t.to >= states {
                return Err(Error::InvalidParameter(format!(
                    "transition {k} ({} -> {}) references a state out of range",
                    t.from, t.to
                )));
            }
            group
                .check(&t.label)
                .map_err(|e| Error::InvalidParameter(format!("transition {k} label: {e}")))?;
        }
        Ok(Automaton {
            group,
            generators: Vec::new(),
            states,
            initial,
            accepting,
            transitions,
        })
    }

    /// Declared generators of the base group, used to read labels given as words.
    pub fn with_generators(mut self, generators: Vec<Element>) -> Self {
        self.generators = generators;
        self
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn generators(&self) -> &[Element] {
        &self.generators
    }

    pub fn state_count(&self) -> usize {
        self.states
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn accepting(&self) -> &[usize] {
        &self.accepting
    }

    pub fn is_accepting(&self, state: usize) -> bool {
        self.accepting.binary_search(&state).is_ok()
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    /// Adds a fresh sink as the unique accepting state, reached by identity
    /// edges from every old accepting state, and renames states so that the
    /// initial state is 0 and the sink is 1. The other states keep their
    /// relative order from 2 on. Original transitions keep their indices; the
    /// new identity edges follow them in order of the accepting states.
    pub fn normalize_single_accept(&self) -> Automaton {
        let n = self.states;
        let mut rename = vec![0; n];
        let mut next = 2;
        for (q, slot) in rename.iter_mut().enumerate() {
            if q != self.initial {
                *slot = next;
                next += 1;
            }
        }
        let mut transitions: Vec<Transition> = self
            .transitions
            .iter()
            .map(|t| Transition {
                from: rename[t.from],
                label: t.label.clone(),
                to: rename[t.to],
            })
            .collect();
        let id = self.group.identity();
        for &a in &self.accepting {
            transitions.push(Transition {
                from: rename[a],
                label: id.clone(),
                to: 1,
            });
        }
        Automaton {
            group: self.group.clone(),
            generators: self.generators.clone(),
            states: n + 1,
            initial: 0,
            accepting: vec![1],
            transitions,
        }
    }

    /// Label of a path, after checking it chains from the initial state to
    /// an accepting state.
    pub fn path_label(&self, p: &PathWitness) -> Result<Element> {
        let mut state = self.initial;
        let mut acc = self.group.identity();
        for (k, &ti) in p.0.iter().enumerate() {
            let t = self.transitions.get(ti).ok_or(Error::IndexOutOfRange {
                index: ti,
                len: self.transitions.len(),
            })?;
            if t.from != state {
                return Err(Error::InvalidParameter(format!(
                    "path step {k} uses transition {ti} from state {}, but the path is at state {state}",
                    t.from
                )));
            }
            acc = self.group.multiply(&acc, &t.label)?;
            state = t.to;
        }
        if !self.is_accepting(state) {
            return Err(Error::InvalidParameter(format!(
                "path ends at non-accepting state {state}"
            )));
        }
        Ok(acc)
    }

    /// Labels of all accepting paths with at most `max_len` transitions.
    pub fn enumerate_path_labels(&self, max_len: usize) -> Result<Vec<PathLabel>> {
        self.enumerate_path_labels_capped(max_len, DEFAULT_MAX_ELEMENTS)
    }

    /// As [`Self::enumerate_path_labels`], with an explicit cap on the number of
    /// `(state, element)` pairs kept by the search.
    ///
    /// Each label comes with its minimal path length and the lexicographically
    /// smallest transition sequence of that length. Results are ordered by
    /// length, then by witness.
    pub fn enumerate_path_labels_capped(
        &self,
        max_len: usize,
        cap: usize,
    ) -> Result<Vec<PathLabel>> {
        let mut out = Vec::new();
        let mut seen: HashMap<Vec<u8>, ()> = HashMap::new();
        let mut bfs = PairSearch::new(self, cap);
        bfs.run(max_len, |bfs, node| {
            if self.is_accepting(bfs.nodes[node].state) {
                let key = bfs.nodes[node].element.canonical_key();
                if seen.insert(key, ()).is_none() {
                    out.push(PathLabel {
                        element: bfs.nodes[node].element.clone(),
                        length: bfs.nodes[node].depth,
                        witness: bfs.witness(node),
                    });
                }
            }
            false
        })?;
        Ok(out)
    }

    /// Bounded membership: `Found` if some accepting path of at most
    /// `max_len` transitions has label `g`. `NotFoundWithinBound` is not a
    /// proof of non-membership.
    pub fn rat_member_bounded(
        &self,
        g: &Element,
        max_len: usize,
        cap: usize,
    ) -> Result<SearchResult<PathWitness>> {
        self.group.check(g)?;
        let start = Instant::now();
        let mut found = None;
        let mut bfs = PairSearch::new(self, cap);
        bfs.run(max_len, |bfs, node| {
            let n = &bfs.nodes[node];
            if self.is_accepting(n.state) && n.element == *g {
                found = Some(bfs.witness(node));
                return true;
            }
            false
        })?;
        let stats = SearchStats {
            visited: bfs.nodes.len(),
            max_frontier: bfs.max_frontier,
            depth_reached: bfs.depth,
            wall_time: start.elapsed(),
        };
        Ok(match found {
            Some(w) => SearchResult {
                verdict: Verdict::Found,
                witness: Some(w),
                stats,
            },
            None => SearchResult {
                verdict: Verdict::NotFoundWithinBound,
                witness: None,
                stats,
            },
        })
    }
}

struct PairNode {
    state: usize,
    element: Element,
    depth: usize,
    parent: Option<(usize, usize)>,
}

/// Breadth-first search over `(state, element)` pairs, layer by layer.
///
/// Within a layer nodes are stored in lexicographic order of their witnesses:
/// each layer is expanded in order, outgoing transitions in index order, and
/// the first discovery of a pair is kept.
struct PairSearch<'a> {
    aut: &'a Automaton,
    cap: usize,
    nodes: Vec<PairNode>,
    index: HashMap<(usize, Vec<u8>), usize>,
    outgoing: Vec<Vec<usize>>,
    max_frontier: usize,
    depth: usize,
}

impl<'a> PairSearch<'a> {
    fn new(aut: &'a Automaton, cap: usize) -> Self {
        let mut outgoing = vec![Vec::new(); aut.states];
        for (k, t) in aut.transitions.iter().enumerate() {
            outgoing[t.from].push(k);
        }
        PairSearch {
            aut,
            cap,
            nodes: Vec::new(),
            index: HashMap::new(),
            outgoing,
            max_frontier: 0,
            depth: 0,
        }
    }

    fn witness(&self, mut node: usize) -> PathWitness {
        let mut rev = Vec::new();
        while let Some((parent, t)) = self.nodes[node].parent {
            rev.push(t);
            node = parent;
        }
        rev.reverse();
        PathWitness(rev)
    }

    /// Calls `visit` on every new node; stops early when it returns true.
    fn run(&mut self, max_len: usize, mut visit: impl FnMut(&Self, usize) -> bool) -> Result<()> {
        let start = PairNode {
            state: self.aut.initial,
            element: self.aut.group.identity(),
            depth: 0,
            parent: None,
        };
        self.index
            .insert((start.state, start.element.canonical_key()), 0);
        self.nodes.push(start);
        if visit(self, 0) {
            return Ok(());
        }
        let mut layer = 0..1;
        self.max_frontier = 1;
        for depth in 1..=max_len {
            let layer_start = self.nodes.len();
            for node in layer.clone() {
                let state = self.nodes[node].state;
                for &ti in &self.outgoing[state] {
                    let t = &self.aut.transitions[ti];
                    let element = self
                        .aut
                        .group
                        .multiply(&self.nodes[node].element, &t.label)?;
                    let key = (t.to, element.canonical_key());
                    if self.index.contains_key(&key) {
                        continue;
                    }
                    if self.nodes.len() >= self.cap {
                        return Err(Error::ResourceLimit {
                            what: "rational path search (state, element) pairs".into(),
                            cap: self.cap,
                            stats: Some(SearchStatsSnapshot {
                                visited: self.nodes.len(),
                                max_frontier: self.max_frontier,
                                depth_reached: depth,
                            }),
                        });
                    }
                    let id = self.nodes.len();
                    self.index.insert(key, id);
                    self.nodes.push(PairNode {
                        state: t.to,
                        element,
                        depth,
                        parent: Some((node, ti)),
                    });
                    if visit(self, id) {
                        self.depth = depth;
                        return Ok(());
                    }
                }
            }
            layer = layer_start..self.nodes.len();
            self.depth = depth;
            self.max_frontier = self.max_frontier.max(layer.len());
            if layer.is_empty() {
                break;
            }
        }
        Ok(())
    }
}

/// A group spec together with its declared generator list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaseGroup {
    pub spec: GroupSpec,
    pub generators: Vec<Element>,
}

impl BaseGroup {
    pub fn to_json(&self) -> Value {
        json!({
            "spec": self.spec,
            "generators": self.generators.iter().map(|g| self.spec.element_to_json(g)).collect::<Vec<_>>(),
        })
    }

    pub fn from_json_at(v: &Value, path: &str) -> Result<Self> {
        let obj = v
            .as_object()
            .ok_or_else(|| Error::schema(path, "expected an object {spec, generators}"))?;
        let spec: GroupSpec = serde_json::from_value(
            obj.get("spec")
                .cloned()
                .ok_or_else(|| Error::schema(path, "missing field `spec`"))?,
        )
        .map_err(|e| Error::schema(format!("{path}.spec"), e.to_string()))?;
        let generators = match obj.get("generators") {
            None => Vec::new(),
            Some(Value::Array(arr)) => arr
                .iter()
                .enumerate()
                .map(|(i, g)| spec.element_from_json_at(g, &format!("{path}.generators[{i}]")))
                .collect::<Result<_>>()?,
            Some(_) => {
                return Err(Error::schema(
                    format!("{path}.generators"),
                    "expected an array",
                ))
            }
        };
        Ok(BaseGroup { spec, generators })
    }

    /// Reads a label given either as a word of signed 1-based generator
    /// references or as `{"element": <payload>}`.
    pub fn label_from_json_at(&self, v: &Value, path: &str) -> Result<Element> {
        match v {
            Value::Array(refs) => {
                let refs = refs
                    .iter()
                    .enumerate()
                    .map(|(i, r)| {
                        r.as_i64().ok_or_else(|| {
                            Error::schema(format!("{path}[{i}]"), "expected a generator reference")
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                let word = GeneratorWord::from_signed_refs(&refs)
                    .map_err(|e| Error::schema(path, e.to_string()))?;
                self.spec
                    .evaluate_word(&self.generators, &word)
                    .map_err(|e| Error::schema(path, e.to_string()))
            }
            Value::Object(obj) => {
                let payload = obj
                    .get("element")
                    .ok_or_else(|| Error::schema(path, "expected `element` in label object"))?;
                self.spec
                    .element_from_json_at(payload, &format!("{path}.element"))
            }
            _ => Err(Error::schema(
                path,
                "label must be a generator word or {\"element\": ...}",
            )),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AutomatonRepr {
    group: Value,
    states: usize,
    initial: usize,
    #[serde(default)]
    accepting: Vec<usize>,
    #[serde(default)]
    transitions: Vec<TransitionRepr>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TransitionRepr {
    from: usize,
    label: Value,
    to: usize,
}

impl Automaton {
    pub fn base_group(&self) -> BaseGroup {
        BaseGroup {
            spec: self.group.clone(),
            generators: self.generators.clone(),
        }
    }

    /// JSON form; labels are written as `{"element": ...}`.
    pub fn to_json(&self) -> Value {
        json!({
            "group": self.base_group().to_json(),
            "states": self.states,
            "initial": self.initial,
            "accepting": self.accepting,
            "transitions": self.transitions.iter().map(|t| json!({
                "from": t.from,
                "label": {"element": self.group.element_to_json(&t.label)},
                "to": t.to,
            })).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let repr: AutomatonRepr =
            serde_json::from_value(v.clone()).map_err(|e| Error::schema("$", e.to_string()))?;
        let base = BaseGroup::from_json_at(&repr.group, "$.group")?;
        if repr.initial >= repr.states {
            return Err(Error::schema(
                "$.initial",
                format!(
                    "state {} out of range for {} states",
                    repr.initial, repr.states
                ),
            ));
        }
        for (i, &a) in repr.accepting.iter().enumerate() {
            if a >= repr.states {
                return Err(Error::schema(
                    format!("$.accepting[{i}]"),
                    format!("state {a} out of range for {} states", repr.states),
                ));
            }
        }
        let mut transitions = Vec::with_capacity(repr.transitions.len());
        for (k, t) in repr.transitions.iter().enumerate() {
            for (field, q) in [("from", t.from), ("to", t.to)] {
                if q >= repr.states {
                    return Err(Error::schema(
                        format!("$.transitions[{k}].{field}"),
                        format!("state {q} out of range for {} states", repr.states),
                    ));
                }
            }
            transitions.push(Transition {
                from: t.from,
                label: base.label_from_json_at(&t.label, &format!("$.transitions[{k}].label"))?,
                to: t.to,
            });
        }
        Ok(Automaton::new(
            base.spec,
            repr.states,
            repr.initial,
            repr.accepting,
            transitions,
        )?
        .with_generators(base.generators))
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text)?;
        Self::from_json(&v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::Element as E;

    fn z() -> GroupSpec {
        GroupSpec::FreeAbelian { rank: 1 }
    }

    fn loop_automaton() -> Automaton {
        Automaton::new(
            z(),
            1,
            0,
            [0],
            vec![Transition {
                from: 0,
                label: E::FreeAbelian(vec![1]),
                to: 0,
            }],
        )
        .unwrap()
    }

    fn labels(aut: &Automaton, l: usize) -> Vec<Element> {
        let mut v: Vec<_> = aut
            .enumerate_path_labels(l)
            .unwrap()
            .into_iter()
            .map(|p| p.element)
            .collect();
        v.sort();
        v
    }

    #[test]
    fn normalize_three_states_two_accepting() {
        let t = |from, to| Transition {
            from,
            label: E::FreeAbelian(vec![1]),
            to,
        };
        let aut = Automaton::new(z(), 3, 0, [1, 2], vec![t(0, 1), t(1, 2)]).unwrap();
        let norm = aut.normalize_single_accept();
        assert_eq!(norm.state_count(), 4);
        assert_eq!(norm.accepting(), &[1]);
        assert_eq!(norm.initial(), 0);
        assert_eq!(norm.transitions().len(), 4);
        let new_edges = &norm.transitions()[2..];
        assert!(new_edges
            .iter()
            .all(|t| t.to == 1 && t.label == z().identity()));
        // old states 1, 2 became 2, 3
        assert_eq!(new_edges[0].from, 2);
        assert_eq!(new_edges[1].from, 3);
    }

    #[test]
    fn normalize_single_state() {
        let norm = loop_automaton().normalize_single_accept();
        assert_eq!(norm.state_count(), 2);
        assert_eq!(norm.transitions().len(), 2);
        assert_eq!(norm.transitions()[1].from, 0);
        assert_eq!(norm.transitions()[1].to, 1);
    }

    #[test]
    fn normalize_renames_initial_to_zero() {
        let t = Transition {
            from: 2,
            label: E::FreeAbelian(vec![5]),
            to: 0,
        };
        let aut = Automaton::new(z(), 3, 2, [0], vec![t]).unwrap();
        let norm = aut.normalize_single_accept();
        assert_eq!(norm.transitions()[0].from, 0);
        assert_eq!(norm.transitions()[0].to, 2);
        assert_eq!(labels(&norm, 3), vec![E::FreeAbelian(vec![5])]);
    }

    #[test]
    fn normalize_empty_accepting() {
        let aut = Automaton::new(z(), 2, 0, [], vec![]).unwrap();
        let norm = aut.normalize_single_accept();
        assert_eq!(norm.state_count(), 3);
        assert!(norm.enumerate_path_labels(5).unwrap().is_empty());
    }

    #[test]
    fn loop_labels() {
        let got = labels(&loop_automaton(), 3);
        let want: Vec<_> = (0..=3).map(|k| E::FreeAbelian(vec![k])).collect();
        assert_eq!(got, want);
    }

    #[test]
    fn no_accepting_path() {
        let aut = Automaton::new(z(), 2, 0, [1], vec![]).unwrap();
        assert!(aut.enumerate_path_labels(4).unwrap().is_empty());
    }

    #[test]
    fn parallel_free_edges() {
        let f2 = GroupSpec::Free { rank: 2 };
        let aut = Automaton::new(
            f2,
            2,
            0,
            [1],
            vec![
                Transition {
                    from: 0,
                    label: E::Free(vec![1]),
                    to: 1,
                },
                Transition {
                    from: 0,
                    label: E::Free(vec![2]),
                    to: 1,
                },
            ],
        )
        .unwrap();
        assert_eq!(labels(&aut, 1), vec![E::Free(vec![1]), E::Free(vec![2])]);
    }

    #[test]
    fn member_bounded() {
        let aut = loop_automaton();
        let g = E::FreeAbelian(vec![4]);
        let r = aut.rat_member_bounded(&g, 4, 1000).unwrap();
        assert_eq!(r.verdict, Verdict::Found);
        assert_eq!(r.witness.unwrap().len(), 4);
        let r = aut.rat_member_bounded(&g, 3, 1000).unwrap();
        assert_eq!(r.verdict, Verdict::NotFoundWithinBound);
        let r = aut
            .rat_member_bounded(&E::FreeAbelian(vec![-1]), 10, 1000)
            .unwrap();
        assert_eq!(r.verdict, Verdict::NotFoundWithinBound);
        assert!(aut
            .rat_member_bounded(&E::FreeAbelian(vec![1, 1]), 3, 10)
            .is_err());
    }

    #[test]
    fn witnesses_reevaluate_and_are_lex_minimal() {
        // two loops labelled 0 and 0: every label 0 witness should use transition 0
        let t = |label| Transition {
            from: 0,
            label: E::FreeAbelian(vec![label]),
            to: 0,
        };
        let aut = Automaton::new(z(), 1, 0, [0], vec![t(1), t(0), t(1)]).unwrap();
        for pl in aut.enumerate_path_labels(3).unwrap() {
            assert_eq!(aut.path_label(&pl.witness).unwrap(), pl.element);
            assert_eq!(pl.witness.len(), pl.length);
        }
        let one = aut
            .enumerate_path_labels(3)
            .unwrap()
            .into_iter()
            .find(|p| p.element == E::FreeAbelian(vec![1]))
            .unwrap();
        assert_eq!(one.witness, PathWitness(vec![0]));
    }

    #[test]
    fn frontier_cap() {
        let err = loop_automaton()
            .enumerate_path_labels_capped(50, 10)
            .unwrap_err();
        assert!(matches!(err, Error::ResourceLimit { cap: 10, .. }));
    }

    #[test]
    fn json_roundtrip_and_word_labels() {
        let text = r#"{
            "group": {"spec": {"type": "free_abelian", "rank": 2}, "generators": [[1, 0], [0, 1]]},
            "states": 2, "initial": 0, "accepting": [1],
            "transitions": [
                {"from": 0, "label": [1, 1, -2], "to": 1},
                {"from": 1, "label": {"element": [0, 3]}, "to": 1}
            ]
        }"#;
        let aut = Automaton::from_json_str(text).unwrap();
        assert_eq!(aut.transitions()[0].label, E::FreeAbelian(vec![2, -1]));
        let back = Automaton::from_json(&aut.to_json()).unwrap();
        assert_eq!(back, aut);
    }

    #[test]
    fn json_errors_name_fields() {
        let text = r#"{
            "group": {"spec": {"type": "free_abelian", "rank": 1}, "generators": [[1]]},
            "states": 2, "initial": 0, "accepting": [1],
            "transitions": [{"from": 0, "label": [2], "to": 1}]
        }"#;
        let err = Automaton::from_json_str(text).unwrap_err();
        assert!(err.to_string().contains("transitions[0].label"), "{err}");
        let text = r#"{"group": {"spec": {"type": "free_abelian", "rank": 1}},
            "states": 2, "initial": 0, "accepting": [1],
            "transitions": [{"from": 0, "label": [], "to": 7}]}"#;
        let err = Automaton::from_json_str(text).unwrap_err();
        assert!(err.to_string().contains("transitions[0].to"), "{err}");
    }
}
