use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::embedding::{compute_embeddings, is_strong_embedding};
use super::StructureError;
use crate::logic::{Formula, Signature, Structure};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExtensionMode {
    Auto,
    Explicit,
}

/// A listed extension: an element map from node `from` into node `to`,
/// with optional labels naming the forcing and its size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Embedding {
    pub from: usize,
    pub to: usize,
    pub map: Vec<usize>,
    pub forcing: Option<String>,
    pub size: Option<u64>,
}

impl Embedding {
    pub fn is_identity(&self) -> bool {
        self.from == self.to && self.map.iter().enumerate().all(|(i, &x)| i == x)
    }
}

/// A directed graph of finite structures whose edges are embeddings.
#[derive(Debug, Clone)]
pub struct ExtensionSystem {
    pub signature: Signature,
    pub mode: ExtensionMode,
    nodes: Vec<Structure>,
    edges: Vec<Embedding>,
    node_index: HashMap<String, usize>,
    out: Vec<Vec<usize>>,
    by_map: HashMap<(usize, usize, Vec<usize>), usize>,
}

/// Element names in documents may be written as strings or integers.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
enum Name {
    Text(String),
    Int(i64),
}

impl Name {
    fn into_string(self) -> String {
        match self {
            Name::Text(s) => s,
            Name::Int(i) => i.to_string(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ClassDocument {
    signature: Signature,
    #[serde(default)]
    structures: Vec<StructureDoc>,
    extensions: ExtensionsDoc,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StructureDoc {
    id: String,
    universe: Vec<Name>,
    #[serde(default)]
    relations: BTreeMap<String, Vec<Vec<Name>>>,
    #[serde(default)]
    constants: BTreeMap<String, Name>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum ExtensionsDoc {
    Keyword(String),
    Listed(Vec<EdgeDoc>),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeDoc {
    from: String,
    to: String,
    map: BTreeMap<String, Name>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    forcing: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    size: Option<u64>,
}

/// Outcome of [`check_extension_system`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub passes: bool,
    pub reflexive: bool,
    pub composition_closed: bool,
    pub strong_embeddings: bool,
    pub failures: Vec<String>,
}

impl ExtensionSystem {
    /// Builds an auto-mode system: edges are all embeddings between nodes,
    /// ordered by source, then target, then map.
    pub fn auto(signature: Signature, nodes: Vec<Structure>) -> Result<Self, StructureError> {
        let mut edges = Vec::new();
        for (i, a) in nodes.iter().enumerate() {
            for (j, b) in nodes.iter().enumerate() {
                for map in compute_embeddings(&signature, a, b) {
                    edges.push(Embedding {
                        from: i,
                        to: j,
                        map,
                        forcing: None,
                        size: None,
                    });
                }
            }
        }
        Self::assemble(signature, nodes, edges, ExtensionMode::Auto)
    }

    /// Builds an explicit-mode system without validating the edge laws;
    /// [`check_extension_system`] reports on them.
    pub fn explicit_unchecked(
        signature: Signature,
        nodes: Vec<Structure>,
        edges: Vec<Embedding>,
    ) -> Result<Self, StructureError> {
        for e in &edges {
            if e.from >= nodes.len() || e.to >= nodes.len() {
                return Err(StructureError::Schema("edge endpoint out of range".into()));
            }
            if e.map.len() != nodes[e.from].size() {
                return Err(StructureError::Schema(format!(
                    "edge {} -> {} does not map every element",
                    nodes[e.from].id, nodes[e.to].id
                )));
            }
        }
        Self::assemble(signature, nodes, edges, ExtensionMode::Explicit)
    }

    /// Builds an explicit-mode system and rejects it unless every edge is a
    /// strong embedding and the edge set is reflexive and composition closed.
    pub fn explicit(
        signature: Signature,
        nodes: Vec<Structure>,
        edges: Vec<Embedding>,
    ) -> Result<Self, StructureError> {
        let sys = Self::explicit_unchecked(signature, nodes, edges)?;
        sys.validate()?;
        Ok(sys)
    }

    fn assemble(
        signature: Signature,
        nodes: Vec<Structure>,
        edges: Vec<Embedding>,
        mode: ExtensionMode,
    ) -> Result<Self, StructureError> {
        let mut node_index = HashMap::new();
        for (i, n) in nodes.iter().enumerate() {
            if node_index.insert(n.id.clone(), i).is_some() {
                return Err(StructureError::DuplicateNode(n.id.clone()));
            }
        }
        let mut out = vec![Vec::new(); nodes.len()];
        let mut by_map = HashMap::new();
        for (k, e) in edges.iter().enumerate() {
            out[e.from].push(k);
            by_map.entry((e.from, e.to, e.map.clone())).or_insert(k);
        }
        Ok(Self {
            signature,
            mode,
            nodes,
            edges,
            node_index,
            out,
            by_map,
        })
    }

    fn validate(&self) -> Result<(), StructureError> {
        for e in &self.edges {
            let (a, b) = (&self.nodes[e.from], &self.nodes[e.to]);
            if let Err(reason) = is_strong_embedding(&self.signature, a, b, &e.map) {
                return Err(StructureError::NotAnEmbedding {
                    from: a.id.clone(),
                    to: b.id.clone(),
                    reason,
                });
            }
        }
        for (i, n) in self.nodes.iter().enumerate() {
            if self.identity_edge(i).is_none() {
                return Err(StructureError::MissingIdentity(n.id.clone()));
            }
        }
        if let Some((e, f)) = self.first_missing_composite() {
            let (e, f) = (&self.edges[e], &self.edges[f]);
            return Err(StructureError::MissingComposite {
                first: format!("{} -> {}", self.nodes[e.from].id, self.nodes[e.to].id),
                second: format!("{} -> {}", self.nodes[f.from].id, self.nodes[f.to].id),
            });
        }
        Ok(())
    }

    fn first_missing_composite(&self) -> Option<(usize, usize)> {
        for (k, e) in self.edges.iter().enumerate() {
            for &l in &self.out[e.to] {
                if self.compose(k, l).is_none() {
                    return Some((k, l));
                }
            }
        }
        None
    }

    pub fn nodes(&self) -> &[Structure] {
        &self.nodes
    }

    pub fn node(&self, i: usize) -> &Structure {
        &self.nodes[i]
    }

    pub fn node_id(&self, i: usize) -> &str {
        &self.nodes[i].id
    }

    pub fn node_index(&self, id: &str) -> Option<usize> {
        self.node_index.get(id).copied()
    }

    /// Looks up a node, failing with [`StructureError::UnknownNode`].
    pub fn require_node(&self, id: &str) -> Result<usize, StructureError> {
        self.node_index(id)
            .ok_or_else(|| StructureError::UnknownNode(id.to_string()))
    }

    pub fn edges(&self) -> &[Embedding] {
        &self.edges
    }

    pub fn edge(&self, k: usize) -> &Embedding {
        &self.edges[k]
    }

    /// Outgoing edge indices of node `i`, in listing order.
    pub fn out_edges(&self, i: usize) -> &[usize] {
        &self.out[i]
    }

    pub fn identity_edge(&self, i: usize) -> Option<usize> {
        let id: Vec<usize> = (0..self.nodes[i].size()).collect();
        self.find_edge(i, i, &id)
    }

    pub fn find_edge(&self, from: usize, to: usize, map: &[usize]) -> Option<usize> {
        self.by_map.get(&(from, to, map.to_vec())).copied()
    }

    /// The listed edge equal to `second ∘ first`, if any.
    pub fn compose(&self, first: usize, second: usize) -> Option<usize> {
        let (e, f) = (&self.edges[first], &self.edges[second]);
        if e.to != f.from {
            return None;
        }
        let map: Vec<usize> = e.map.iter().map(|&x| f.map[x]).collect();
        self.find_edge(e.from, f.to, &map)
    }

    /// Nodes reachable from `i` along edges, `i` first, then in node order.
    pub fn reachable(&self, i: usize) -> Vec<usize> {
        let mut seen = vec![false; self.nodes.len()];
        let mut stack = vec![i];
        seen[i] = true;
        while let Some(n) = stack.pop() {
            for &k in &self.out[n] {
                let t = self.edges[k].to;
                if !seen[t] {
                    seen[t] = true;
                    stack.push(t);
                }
            }
        }
        let mut out = vec![i];
        out.extend((0..self.nodes.len()).filter(|&n| seen[n] && n != i));
        out
    }

    /// Element map of some path from `from` to `to`: the first listed
    /// direct edge if one exists, otherwise the first path found by
    /// breadth-first search in edge order.
    pub fn path_map(&self, from: usize, to: usize) -> Option<Vec<usize>> {
        let mut maps: Vec<Option<Vec<usize>>> = vec![None; self.nodes.len()];
        maps[from] = Some((0..self.nodes[from].size()).collect());
        if from == to {
            return maps[from].clone();
        }
        let mut queue = std::collections::VecDeque::from([from]);
        while let Some(n) = queue.pop_front() {
            let cur = maps[n].clone().expect("queued nodes have maps");
            for &k in &self.out[n] {
                let e = &self.edges[k];
                if maps[e.to].is_none() {
                    let m: Vec<usize> = cur.iter().map(|&x| e.map[x]).collect();
                    if e.to == to {
                        return Some(m);
                    }
                    maps[e.to] = Some(m);
                    queue.push_back(e.to);
                }
            }
        }
        None
    }

    /// Parameter names of node `i`, i.e. its element names.
    pub fn params(&self, i: usize) -> &[String] {
        self.nodes[i].universe()
    }

    /// Renames the parameters of `phi` (elements of the edge's source) to
    /// their images in the edge's target.
    pub fn transport(&self, edge: usize, phi: &Formula) -> Formula {
        let e = &self.edges[edge];
        self.transport_map(e.from, e.to, &e.map, phi)
    }

    pub fn transport_map(&self, from: usize, to: usize, map: &[usize], phi: &Formula) -> Formula {
        let (a, b) = (&self.nodes[from], &self.nodes[to]);
        let renaming: HashMap<String, String> = (0..a.size())
            .map(|i| (a.element_name(i).to_string(), b.element_name(map[i]).to_string()))
            .collect();
        phi.rename_params(&renaming)
    }

    /// Loads a class or multiverse document.
    pub fn from_json(text: &str) -> Result<Self, StructureError> {
        let doc: ClassDocument = serde_json::from_str(text)?;
        Self::from_document(doc, true)
    }

    /// Loads a document without enforcing the explicit-mode edge laws, so
    /// that [`check_extension_system`] can report on a defective file.
    pub fn from_json_unchecked(text: &str) -> Result<Self, StructureError> {
        let doc: ClassDocument = serde_json::from_str(text)?;
        Self::from_document(doc, false)
    }

    fn from_document(doc: ClassDocument, enforce: bool) -> Result<Self, StructureError> {
        doc.signature.validate()?;
        let sig = doc.signature;
        let mut seen = HashSet::new();
        let mut nodes = Vec::with_capacity(doc.structures.len());
        for s in doc.structures {
            if !seen.insert(s.id.clone()) {
                return Err(StructureError::DuplicateNode(s.id));
            }
            let universe = s.universe.into_iter().map(Name::into_string).collect();
            let relations: HashMap<String, Vec<Vec<String>>> = s
                .relations
                .into_iter()
                .map(|(r, ts)| {
                    let ts = ts
                        .into_iter()
                        .map(|t| t.into_iter().map(Name::into_string).collect())
                        .collect();
                    (r, ts)
                })
                .collect();
            let constants: HashMap<String, String> = s
                .constants
                .into_iter()
                .map(|(c, e)| (c, e.into_string()))
                .collect();
            nodes.push(Structure::new(&sig, s.id, universe, &relations, &constants)?);
        }
        match doc.extensions {
            ExtensionsDoc::Keyword(k) if k == "auto" => Self::auto(sig, nodes),
            ExtensionsDoc::Keyword(k) => Err(StructureError::Schema(format!(
                "`extensions` must be \"auto\" or a list, found \"{k}\""
            ))),
            ExtensionsDoc::Listed(list) => {
                let index: HashMap<&str, usize> = nodes
                    .iter()
                    .enumerate()
                    .map(|(i, n)| (n.id.as_str(), i))
                    .collect();
                let mut edges = Vec::with_capacity(list.len());
                for e in list {
                    let from = *index
                        .get(e.from.as_str())
                        .ok_or_else(|| StructureError::UnknownNode(e.from.clone()))?;
                    let to = *index
                        .get(e.to.as_str())
                        .ok_or_else(|| StructureError::UnknownNode(e.to.clone()))?;
                    let (a, b) = (&nodes[from], &nodes[to]);
                    let mut map = vec![None; a.size()];
                    for (src, dst) in e.map {
                        let dst = dst.into_string();
                        let i = a.element(&src).ok_or_else(|| {
                            StructureError::Schema(format!(
                                "edge {} -> {}: `{src}` is not an element of `{}`",
                                a.id, b.id, a.id
                            ))
                        })?;
                        let j = b.element(&dst).ok_or_else(|| {
                            StructureError::Schema(format!(
                                "edge {} -> {}: `{dst}` is not an element of `{}`",
                                a.id, b.id, b.id
                            ))
                        })?;
                        map[i] = Some(j);
                    }
                    let map = map
                        .into_iter()
                        .enumerate()
                        .map(|(i, m)| {
                            m.ok_or_else(|| {
                                StructureError::Schema(format!(
                                    "edge {} -> {}: `{}` is unmapped",
                                    a.id,
                                    b.id,
                                    a.element_name(i)
                                ))
                            })
                        })
                        .collect::<Result<Vec<_>, _>>()?;
                    if e.size == Some(0) {
                        return Err(StructureError::Schema(
                            "edge size label must be positive".into(),
                        ));
                    }
                    edges.push(Embedding {
                        from,
                        to,
                        map,
                        forcing: e.forcing,
                        size: e.size,
                    });
                }
                if enforce {
                    Self::explicit(sig, nodes, edges)
                } else {
                    Self::explicit_unchecked(sig, nodes, edges)
                }
            }
        }
    }

    /// Serializes back to the document format. Auto-mode systems keep the
    /// `"auto"` keyword.
    pub fn to_json(&self) -> String {
        let structures = self
            .nodes
            .iter()
            .map(|s| StructureDoc {
                id: s.id.clone(),
                universe: s.universe().iter().cloned().map(Name::Text).collect(),
                relations: self
                    .signature
                    .relations
                    .iter()
                    .enumerate()
                    .map(|(r, d)| {
                        let ts = s
                            .tuples(r, d.arity)
                            .into_iter()
                            .map(|t| {
                                t.into_iter()
                                    .map(|x| Name::Text(s.element_name(x).to_string()))
                                    .collect()
                            })
                            .collect();
                        (d.name.clone(), ts)
                    })
                    .collect(),
                constants: self
                    .signature
                    .constants
                    .iter()
                    .enumerate()
                    .map(|(c, name)| {
                        (
                            name.clone(),
                            Name::Text(s.element_name(s.constant(c)).to_string()),
                        )
                    })
                    .collect(),
            })
            .collect();
        let extensions = match self.mode {
            ExtensionMode::Auto => ExtensionsDoc::Keyword("auto".into()),
            ExtensionMode::Explicit => ExtensionsDoc::Listed(
                self.edges
                    .iter()
                    .map(|e| {
                        let (a, b) = (&self.nodes[e.from], &self.nodes[e.to]);
                        EdgeDoc {
                            from: a.id.clone(),
                            to: b.id.clone(),
                            map: e
                                .map
                                .iter()
                                .enumerate()
                                .map(|(i, &j)| {
                                    (
                                        a.element_name(i).to_string(),
                                        Name::Text(b.element_name(j).to_string()),
                                    )
                                })
                                .collect(),
                            forcing: e.forcing.clone(),
                            size: e.size,
                        }
                    })
                    .collect(),
            ),
        };
        let doc = ClassDocument {
            signature: self.signature.clone(),
            structures,
            extensions,
        };
        serde_json::to_string_pretty(&doc).expect("documents always serialize")
    }
}

/// Reports reflexivity, composition closure and the strong-embedding
/// property of every edge.
pub fn check_extension_system(sys: &ExtensionSystem) -> ValidationReport {
    let mut failures = Vec::new();
    let mut strong = true;
    for e in sys.edges() {
        let (a, b) = (sys.node(e.from), sys.node(e.to));
        if let Err(reason) = is_strong_embedding(&sys.signature, a, b, &e.map) {
            strong = false;
            failures.push(format!("edge {} -> {} is not a strong embedding: {reason}", a.id, b.id));
        }
    }
    let mut reflexive = true;
    for i in 0..sys.nodes().len() {
        if sys.identity_edge(i).is_none() {
            reflexive = false;
            failures.push(format!("node {} has no identity edge", sys.node_id(i)));
        }
    }
    let mut closed = true;
    for (k, e) in sys.edges().iter().enumerate() {
        for &l in sys.out_edges(e.to) {
            if sys.compose(k, l).is_none() {
                closed = false;
                let f = sys.edge(l);
                failures.push(format!(
                    "composite of {} -> {} and {} -> {} is not listed",
                    sys.node_id(e.from),
                    sys.node_id(e.to),
                    sys.node_id(f.from),
                    sys.node_id(f.to)
                ));
            }
        }
    }
    ValidationReport {
        passes: strong && reflexive && closed,
        reflexive,
        composition_closed: closed,
        strong_embeddings: strong,
        failures,
    }
}
