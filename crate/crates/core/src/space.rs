//! Assembly spaces: acyclic multigraphs whose edges join a source object with
//! a label object into a target object.

use std::collections::{BTreeSet, HashMap};
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::object::ObjectString;

pub type VertexId = usize;
pub type EdgeId = usize;

/// Where the label is attached: `Right` means `target = source · label`,
/// `Left` means `target = label · source`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Left => "left",
            Side::Right => "right",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub source: VertexId,
    pub label: VertexId,
    pub target: VertexId,
    pub side: Side,
}

#[derive(Debug, Error)]
pub enum SpaceError {
    #[error("malformed space JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("edge {edge} references unknown vertex {name:?}")]
    UnknownVertex { edge: usize, name: String },
    #[error("invalid assembly space: {0}")]
    Invalid(ValidationReport),
    #[error("terminal vertex {0} is not the unique sink of the space")]
    NotRooted(VertexId),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssemblySpace {
    pub basis: Vec<ObjectString>,
    pub vertices: Vec<ObjectString>,
    pub edges: Vec<Edge>,
}

#[derive(Serialize, Deserialize)]
struct SpaceJson {
    basis: Vec<ObjectString>,
    vertices: Vec<ObjectString>,
    edges: Vec<EdgeJson>,
}

#[derive(Serialize, Deserialize)]
struct EdgeJson {
    src: ObjectString,
    label: ObjectString,
    tgt: ObjectString,
    side: Side,
}

impl Serialize for Edge {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        (self.source, self.label, self.target, self.side).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Edge {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let (source, label, target, side) = Deserialize::deserialize(d)?;
        Ok(Edge { source, label, target, side })
    }
}

impl AssemblySpace {
    pub fn vertex_id(&self, v: &ObjectString) -> Option<VertexId> {
        self.vertices.iter().position(|u| u == v)
    }

    pub fn is_basis(&self, id: VertexId) -> bool {
        self.basis.contains(&self.vertices[id])
    }

    /// Concatenation an edge claims to perform.
    pub fn joined(&self, e: &Edge) -> ObjectString {
        let (src, lbl) = (&self.vertices[e.source], &self.vertices[e.label]);
        match e.side {
            Side::Right => src.concat(lbl),
            Side::Left => lbl.concat(src),
        }
    }

    pub fn in_edges(&self, v: VertexId) -> impl Iterator<Item = (EdgeId, &Edge)> {
        self.edges.iter().enumerate().filter(move |(_, e)| e.target == v)
    }

    /// Augmented cardinality: vertices outside the basis.
    pub fn augmented_cardinality(&self) -> usize {
        self.vertices.iter().filter(|v| !self.basis.contains(v)).count()
    }

    pub fn from_json_str(s: &str) -> Result<Self, SpaceError> {
        let raw: SpaceJson = serde_json::from_str(s)?;
        let index: HashMap<&ObjectString, usize> =
            raw.vertices.iter().enumerate().map(|(i, v)| (v, i)).collect();
        let lookup = |edge: usize, v: &ObjectString| {
            index.get(v).copied().ok_or_else(|| SpaceError::UnknownVertex {
                edge,
                name: v.to_string(),
            })
        };
        let mut edges = Vec::with_capacity(raw.edges.len());
        for (i, e) in raw.edges.iter().enumerate() {
            edges.push(Edge {
                source: lookup(i, &e.src)?,
                label: lookup(i, &e.label)?,
                target: lookup(i, &e.tgt)?,
                side: e.side,
            });
        }
        Ok(Self { basis: raw.basis.clone(), vertices: raw.vertices.clone(), edges })
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let raw = SpaceJson {
            basis: self.basis.clone(),
            vertices: self.vertices.clone(),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeJson {
                    src: self.vertices[e.source].clone(),
                    label: self.vertices[e.label].clone(),
                    tgt: self.vertices[e.target].clone(),
                    side: e.side,
                })
                .collect(),
        };
        serde_json::to_value(raw).expect("space serializes")
    }

    pub fn to_json_string(&self) -> String {
        self.to_json_value().to_string()
    }

    /// Graphviz rendering; edges carry `label/side`.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph assembly {\n  rankdir=BT;\n");
        for (i, v) in self.vertices.iter().enumerate() {
            let shape = if self.is_basis(i) { "box" } else { "ellipse" };
            let _ = writeln!(out, "  v{i} [label=\"{}\", shape={shape}];", escape_dot(v.as_str()));
        }
        for e in &self.edges {
            let _ = writeln!(
                out,
                "  v{} -> v{} [label=\"{}/{}\"];",
                e.source,
                e.target,
                escape_dot(self.vertices[e.label].as_str()),
                e.side
            );
        }
        out.push_str("}\n");
        out
    }
}

fn escape_dot(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    BasisNotUnit(ObjectString),
    BasisNotVertex(ObjectString),
    UnitVertexOutsideBasis(VertexId),
    DuplicateVertex(VertexId),
    EdgeOutOfRange(EdgeId),
    ConcatenationMismatch(EdgeId),
    Cycle(Vec<VertexId>),
    MissingInEdge(VertexId),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::BasisNotUnit(b) => write!(f, "basis element {b:?} is not a unit symbol"),
            Violation::BasisNotVertex(b) => write!(f, "basis element {b:?} is not a vertex"),
            Violation::UnitVertexOutsideBasis(v) => write!(f, "unit vertex {v} is not in the basis"),
            Violation::DuplicateVertex(v) => write!(f, "vertex {v} is duplicated"),
            Violation::EdgeOutOfRange(e) => write!(f, "edge {e}: vertex id out of range"),
            Violation::ConcatenationMismatch(e) => write!(f, "edge {e}: edge concatenation mismatch"),
            Violation::Cycle(vs) => write!(f, "cycle detected through vertices {vs:?}"),
            Violation::MissingInEdge(v) => write!(f, "non-basis vertex {v} has no incoming edge"),
        }
    }
}

/// Every violated invariant of a space; empty iff the space is valid.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return f.write_str("valid");
        }
        let msgs: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        f.write_str(&msgs.join("; "))
    }
}

pub fn validate_space(s: &AssemblySpace) -> ValidationReport {
    let mut violations = Vec::new();
    let n = s.vertices.len();

    for b in &s.basis {
        if !b.is_unit() {
            violations.push(Violation::BasisNotUnit(b.clone()));
        }
        if !s.vertices.contains(b) {
            violations.push(Violation::BasisNotVertex(b.clone()));
        }
    }
    let mut seen = BTreeSet::new();
    for (i, v) in s.vertices.iter().enumerate() {
        if v.is_unit() && !s.basis.contains(v) {
            violations.push(Violation::UnitVertexOutsideBasis(i));
        }
        if !seen.insert(v) {
            violations.push(Violation::DuplicateVertex(i));
        }
    }

    let mut usable = Vec::with_capacity(s.edges.len());
    for (i, e) in s.edges.iter().enumerate() {
        if e.source >= n || e.label >= n || e.target >= n {
            violations.push(Violation::EdgeOutOfRange(i));
            continue;
        }
        if s.joined(e) != s.vertices[e.target] {
            violations.push(Violation::ConcatenationMismatch(i));
        }
        usable.push(*e);
    }

    if let Some(cycle) = find_cycle(n, &usable) {
        violations.push(Violation::Cycle(cycle));
    }

    let mut has_in = vec![false; n];
    for e in &usable {
        has_in[e.target] = true;
    }
    for (i, v) in s.vertices.iter().enumerate() {
        if !s.basis.contains(v) && !has_in[i] {
            violations.push(Violation::MissingInEdge(i));
        }
    }
    ValidationReport { violations }
}

/// Depth-first search over source→target edges; returns one cycle if any.
fn find_cycle(n: usize, edges: &[Edge]) -> Option<Vec<VertexId>> {
    let mut adj = vec![Vec::new(); n];
    for e in edges {
        adj[e.source].push(e.target);
    }
    // 0 = unvisited, 1 = on stack, 2 = done
    let mut state = vec![0u8; n];
    let mut stack: Vec<(VertexId, usize)> = Vec::new();
    for root in 0..n {
        if state[root] != 0 {
            continue;
        }
        stack.push((root, 0));
        state[root] = 1;
        while let Some(&mut (v, ref mut next)) = stack.last_mut() {
            if *next < adj[v].len() {
                let w = adj[v][*next];
                *next += 1;
                match state[w] {
                    0 => {
                        state[w] = 1;
                        stack.push((w, 0));
                    }
                    1 => {
                        let start = stack.iter().position(|&(u, _)| u == w).unwrap();
                        return Some(stack[start..].iter().map(|&(u, _)| u).collect());
                    }
                    _ => {}
                }
            } else {
                state[v] = 2;
                stack.pop();
            }
        }
    }
    None
}

/// A directed path of contiguous edges starting at a basis vertex.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RootedPath {
    pub start: VertexId,
    pub edges: Vec<EdgeId>,
}

impl RootedPath {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn end(&self, space: &AssemblySpace) -> VertexId {
        self.edges.last().map_or(self.start, |&e| space.edges[e].target)
    }

    pub fn is_contiguous(&self, space: &AssemblySpace) -> bool {
        let mut at = self.start;
        for &e in &self.edges {
            match space.edges.get(e) {
                Some(edge) if edge.source == at => at = edge.target,
                _ => return false,
            }
        }
        true
    }
}

/// A rooted assembly subspace together with its terminal object and the
/// extreme rooted paths that reach it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinimalSubspace {
    pub space: AssemblySpace,
    pub terminal: VertexId,
    pub index: usize,
    pub gamma_min: RootedPath,
    pub gamma_max: RootedPath,
}

impl MinimalSubspace {
    /// Checks the space, that `terminal` is its unique sink, and derives the
    /// index and extreme paths.
    pub fn new(space: AssemblySpace, terminal: VertexId) -> Result<Self, SpaceError> {
        let report = validate_space(&space);
        if !report.is_valid() {
            return Err(SpaceError::Invalid(report));
        }
        if terminal >= space.vertices.len() || !reaches_all(&space, terminal) {
            return Err(SpaceError::NotRooted(terminal));
        }
        let index = space.augmented_cardinality();
        let paths = rooted_paths(&space, terminal, usize::MAX);
        let (gamma_min, gamma_max) = extremes(&paths).ok_or(SpaceError::NotRooted(terminal))?;
        Ok(Self { space, terminal, index, gamma_min, gamma_max })
    }

    pub fn terminal_object(&self) -> &ObjectString {
        &self.space.vertices[self.terminal]
    }

    /// Replays the edges in topological order starting from the basis and
    /// returns the object built at the terminal.
    pub fn replay(&self) -> Option<ObjectString> {
        let s = &self.space;
        let mut built: Vec<Option<ObjectString>> = s
            .vertices
            .iter()
            .map(|v| s.basis.contains(v).then(|| v.clone()))
            .collect();
        let mut progress = true;
        while progress {
            progress = false;
            for e in &s.edges {
                if built[e.target].is_some() {
                    continue;
                }
                if let (Some(src), Some(lbl)) = (&built[e.source], &built[e.label]) {
                    built[e.target] = Some(match e.side {
                        Side::Right => src.concat(lbl),
                        Side::Left => lbl.concat(src),
                    });
                    progress = true;
                }
            }
        }
        built[self.terminal].clone()
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::json!({
            "terminal": self.terminal_object(),
            "index": self.index,
            "gamma_min": self.gamma_min.len(),
            "gamma_max": self.gamma_max.len(),
            "space": self.space.to_json_value(),
        })
    }
}

/// True when every vertex has a directed route (via source or label roles)
/// to `terminal`, and `terminal` is not used by any edge.
fn reaches_all(space: &AssemblySpace, terminal: VertexId) -> bool {
    if space.edges.iter().any(|e| e.source == terminal || e.label == terminal) {
        return false;
    }
    let n = space.vertices.len();
    let mut reach = vec![false; n];
    reach[terminal] = true;
    let mut stack = vec![terminal];
    while let Some(v) = stack.pop() {
        for (_, e) in space.in_edges(v) {
            for u in [e.source, e.label] {
                if !reach[u] {
                    reach[u] = true;
                    stack.push(u);
                }
            }
        }
    }
    reach.into_iter().all(|r| r)
}

/// Rooted paths ending at `terminal`, in lexicographic edge-id order, at most
/// `limit` of them.
fn rooted_paths(space: &AssemblySpace, terminal: VertexId, limit: usize) -> Vec<RootedPath> {
    let mut out = Vec::new();
    let mut suffix: Vec<EdgeId> = Vec::new();
    walk_back(space, terminal, &mut suffix, &mut out, limit);
    out.sort_by(|a, b| a.edges.cmp(&b.edges));
    out
}

fn walk_back(
    space: &AssemblySpace,
    v: VertexId,
    suffix: &mut Vec<EdgeId>,
    out: &mut Vec<RootedPath>,
    limit: usize,
) {
    if out.len() >= limit {
        return;
    }
    if space.is_basis(v) {
        let mut edges = suffix.clone();
        edges.reverse();
        out.push(RootedPath { start: v, edges });
        return;
    }
    let incoming: Vec<EdgeId> = space.in_edges(v).map(|(i, _)| i).collect();
    for e in incoming {
        suffix.push(e);
        walk_back(space, space.edges[e].source, suffix, out, limit);
        suffix.pop();
    }
}

fn extremes(paths: &[RootedPath]) -> Option<(RootedPath, RootedPath)> {
    // `paths` is sorted by edge list, so the first hit of each length wins ties.
    let min = paths.iter().min_by_key(|p| p.len())?;
    let max_len = paths.iter().map(|p| p.len()).max()?;
    let max = paths.iter().find(|p| p.len() == max_len)?;
    Some((min.clone(), max.clone()))
}

/// Shortest and longest rooted paths of a witness plus (up to `limit`) all of
/// its rooted paths.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathSet {
    pub gamma_min: RootedPath,
    pub gamma_max: RootedPath,
    pub all: Vec<RootedPath>,
    pub truncated: bool,
}

pub const PATH_LIMIT: usize = 10_000;

pub fn extract_paths(w: &MinimalSubspace) -> PathSet {
    let all = rooted_paths(&w.space, w.terminal, PATH_LIMIT + 1);
    let truncated = all.len() > PATH_LIMIT;
    let all: Vec<RootedPath> = all.into_iter().take(PATH_LIMIT).collect();
    let (gamma_min, gamma_max) =
        extremes(&all).unwrap_or_else(|| (w.gamma_min.clone(), w.gamma_max.clone()));
    PathSet { gamma_min, gamma_max, all, truncated }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn o(s: &str) -> ObjectString {
        s.parse().unwrap()
    }

    fn aa_space() -> AssemblySpace {
        AssemblySpace {
            basis: vec![o("A")],
            vertices: vec![o("A"), o("AA")],
            edges: vec![Edge { source: 0, label: 0, target: 1, side: Side::Right }],
        }
    }

    #[test]
    fn single_edge_space_is_valid() {
        assert!(validate_space(&aa_space()).is_valid());
        let w = MinimalSubspace::new(aa_space(), 1).unwrap();
        let p = extract_paths(&w);
        assert_eq!((p.gamma_min.len(), p.gamma_max.len()), (1, 1));
        assert_eq!(w.replay().unwrap(), o("AA"));
    }

    #[test]
    fn concatenation_mismatch_is_reported_once() {
        let mut s = aa_space();
        s.vertices.push(o("AB"));
        s.basis.push(o("B"));
        s.vertices.push(o("B"));
        s.edges.push(Edge { source: 1, label: 0, target: 2, side: Side::Right });
        let r = validate_space(&s);
        assert_eq!(r.violations, vec![Violation::ConcatenationMismatch(1)]);
        assert!(r.to_string().contains("edge concatenation mismatch"));
    }

    #[test]
    fn cycle_is_reported() {
        let mut s = aa_space();
        s.edges.push(Edge { source: 1, label: 0, target: 0, side: Side::Right });
        let r = validate_space(&s);
        assert!(r.violations.iter().any(|v| matches!(v, Violation::Cycle(_))));
        assert!(r.to_string().contains("cycle detected"));
    }

    #[test]
    fn missing_in_edge_and_basis_checks() {
        let s = AssemblySpace {
            basis: vec![o("A"), o("BC")],
            vertices: vec![o("A"), o("B"), o("AA")],
            edges: vec![],
        };
        let r = validate_space(&s);
        assert!(r.violations.contains(&Violation::BasisNotUnit(o("BC"))));
        assert!(r.violations.contains(&Violation::BasisNotVertex(o("BC"))));
        assert!(r.violations.contains(&Violation::UnitVertexOutsideBasis(1)));
        assert!(r.violations.contains(&Violation::MissingInEdge(2)));
    }

    #[test]
    fn json_round_trip_and_unknown_vertex() {
        let s = aa_space();
        let back = AssemblySpace::from_json_str(&s.to_json_string()).unwrap();
        assert_eq!(back, s);
        let bad = r#"{"basis":["A"],"vertices":["A"],"edges":[{"src":"A","label":"A","tgt":"AA","side":"right"}]}"#;
        assert!(matches!(
            AssemblySpace::from_json_str(bad),
            Err(SpaceError::UnknownVertex { edge: 0, .. })
        ));
    }

    #[test]
    fn dot_has_label_side() {
        let dot = aa_space().to_dot();
        assert!(dot.contains("v0 -> v1 [label=\"A/right\"]"));
    }

    #[test]
    fn terminal_must_be_sink() {
        assert!(matches!(MinimalSubspace::new(aa_space(), 0), Err(SpaceError::NotRooted(0))));
    }

    #[test]
    fn paths_in_a_diamond() {
        // A, AA, AAA (= AA·A), AAAA (= AA·AA and AAA·A)
        let s = AssemblySpace {
            basis: vec![o("A")],
            vertices: vec![o("A"), o("AA"), o("AAA"), o("AAAA")],
            edges: vec![
                Edge { source: 0, label: 0, target: 1, side: Side::Right },
                Edge { source: 1, label: 0, target: 2, side: Side::Right },
                Edge { source: 1, label: 1, target: 3, side: Side::Right },
                Edge { source: 2, label: 0, target: 3, side: Side::Right },
            ],
        };
        let w = MinimalSubspace::new(s, 3).unwrap();
        let p = extract_paths(&w);
        assert_eq!(p.all.len(), 2);
        assert_eq!(p.gamma_min.edges, vec![0, 2]);
        assert_eq!(p.gamma_max.edges, vec![0, 1, 3]);
        assert!(p.gamma_max.is_contiguous(&w.space));
    }
}
