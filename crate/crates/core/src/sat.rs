//! The enumeration-based encoding of minimal witnesses and the two object
//! recovery procedures built on the same enumeration.
//!
//! A codeword is the bit stream
//!
//! ```text
//! gamma(t) gamma(L) gamma(|B|) B[0]:8 .. B[k-1]:8 gamma(v_B+1)
//!     { gamma(c) gamma(i_t+1) gamma(v_l+1) }  for c = 1..|γmin|
//! ```
//!
//! where `t` is the 1-based rank of the witness among all canonical minimal
//! structures of height `L` over basis `B`. Structures are ordered by the
//! number of edges beyond the longest path, then by their canonical edge
//! list. A canonical structure has its vertices sorted shortlex (basis
//! first), exactly one in-edge per non-basis vertex, and every edge oriented
//! with the deeper part as source (the left part on ties). `i_t` is the id of
//! the tuple's path edge and `v_l` the vertex id of its label.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::bits::{to_hex, BitError, BitReader, BitWriter};
use crate::index::{assembly_index_value, optimal_sets, ExactLimits, IndexError};
use crate::object::ObjectString;
use crate::space::{AssemblySpace, Edge, MinimalSubspace, RootedPath, Side};

/// Largest longest-path length the codec accepts.
pub const MAX_HEIGHT: usize = 4;
/// Largest basis the codec accepts.
pub const MAX_BASIS: usize = 3;
/// Default number of search nodes an enumerator may expand.
pub const DEFAULT_BUDGET: u64 = 50_000_000;
pub const FILE_MAGIC: &[u8; 4] = b"SAT1";

#[derive(Debug, Error)]
pub enum SatError {
    #[error("witness has longest path {height} and basis size {basis}; the codec is limited to {MAX_HEIGHT} and {MAX_BASIS}")]
    Guard { height: usize, basis: usize },
    #[error("enumeration budget exceeded after {examined} nodes ({classes} classes complete)")]
    Budget { examined: u64, classes: usize },
    #[error("malformed stream: {0}")]
    Malformed(String),
    #[error("t out of range: only {available} structures exist")]
    TOutOfRange { available: BigUint },
    #[error("pointer outside subspace: {0}")]
    Pointer(String),
    #[error("witness is not minimal: index {index}, witness has {size} objects")]
    NotMinimal { index: usize, size: usize },
    #[error("no minimal subspace is consistent with the input")]
    NoSubspace,
    #[error("invalid witness: {0}")]
    Invalid(String),
    #[error(transparent)]
    Index(#[from] IndexError),
}

impl From<BitError> for SatError {
    fn from(e: BitError) -> Self {
        SatError::Malformed(e.to_string())
    }
}

/// Size bounds on the multigraph every candidate embeds into.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DamgBounds {
    pub height: usize,
    pub basis_size: usize,
    /// 2^(L+2).
    #[serde(serialize_with = "ser_big")]
    pub max_vertices: BigUint,
    /// 2^(3L+6).
    #[serde(serialize_with = "ser_big")]
    pub max_edges: BigUint,
    /// log2 of the largest rank: 2^(3L+6) + log2(|B|!).
    pub log2_max_t: f64,
}

pub fn damg_bounds(height: usize, basis_size: usize) -> DamgBounds {
    let max_vertices = BigUint::one() << (height + 2);
    let max_edges = BigUint::one() << (3 * height + 6);
    let log2_fact: f64 = (2..=basis_size).map(|i| (i as f64).log2()).sum();
    let log2_max_t = max_edges.to_f64().unwrap_or(f64::INFINITY) + log2_fact;
    DamgBounds { height, basis_size, max_vertices, max_edges, log2_max_t }
}

/// A canonical structure: basis symbols, then non-basis vertices in shortlex
/// order, each with its single in-edge `(source, label, side)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Structure {
    pub vertices: Vec<Vec<u8>>,
    pub basis_size: usize,
    /// In-edge of vertex `basis_size + j` at position `j`.
    pub edges: Vec<(usize, usize, Side)>,
}

impl Structure {
    pub fn terminal(&self) -> usize {
        self.vertices.len() - 1
    }

    fn depths(&self) -> Vec<usize> {
        let mut d = vec![0; self.vertices.len()];
        for (j, &(s, l, _)) in self.edges.iter().enumerate() {
            d[self.basis_size + j] = 1 + d[s].max(d[l]);
        }
        d
    }

    pub fn height(&self) -> usize {
        self.depths()[self.terminal()]
    }

    /// Edge ids of the unique rooted path to the terminal, from the basis up.
    pub fn path(&self) -> (usize, Vec<usize>) {
        let mut v = self.terminal();
        let mut edges = Vec::new();
        while v >= self.basis_size {
            let e = v - self.basis_size;
            edges.push(e);
            v = self.edges[e].0;
        }
        edges.reverse();
        (v, edges)
    }

    pub fn to_witness(&self) -> MinimalSubspace {
        let vertices: Vec<ObjectString> =
            self.vertices.iter().map(|v| ObjectString::new(v.clone()).unwrap()).collect();
        let basis = vertices[..self.basis_size].to_vec();
        let edges = self
            .edges
            .iter()
            .enumerate()
            .map(|(j, &(source, label, side))| Edge { source, label, target: self.basis_size + j, side })
            .collect();
        let space = AssemblySpace { basis, vertices, edges };
        MinimalSubspace::new(space, self.terminal()).expect("canonical structures are valid")
    }

    /// Canonical form of a witness: first in-edge per vertex, re-oriented by
    /// depth, vertices sorted shortlex.
    pub fn from_witness(w: &MinimalSubspace) -> Result<Self, SatError> {
        let s = &w.space;
        let mut order: Vec<usize> = (0..s.vertices.len()).collect();
        order.sort_by(|&a, &b| {
            (!s.is_basis(a), s.vertices[a].len(), s.vertices[a].as_bytes()).cmp(&(
                !s.is_basis(b),
                s.vertices[b].len(),
                s.vertices[b].as_bytes(),
            ))
        });
        let mut pos = vec![0; order.len()];
        for (i, &v) in order.iter().enumerate() {
            pos[v] = i;
        }
        let basis_size = (0..s.vertices.len()).filter(|&v| s.is_basis(v)).count();
        let vertices: Vec<Vec<u8>> = order.iter().map(|&v| s.vertices[v].as_bytes().to_vec()).collect();
        let mut depth = vec![0usize; vertices.len()];
        let mut edges = Vec::new();
        for &v in &order[basis_size..] {
            let (_, e) = s
                .in_edges(v)
                .next()
                .ok_or_else(|| SatError::Invalid(format!("vertex {} has no in-edge", s.vertices[v])))?;
            // Parts in reading order.
            let (left, right) = match e.side {
                Side::Right => (pos[e.source], pos[e.label]),
                Side::Left => (pos[e.label], pos[e.source]),
            };
            if left >= pos[v] || right >= pos[v] {
                return Err(SatError::Invalid("edge part is not shorter than its target".into()));
            }
            edges.push(orient(left, right, &depth));
            depth[pos[v]] = 1 + depth[left].max(depth[right]);
        }
        let st = Structure { vertices, basis_size, edges };
        if pos[w.terminal] != st.terminal() {
            return Err(SatError::Invalid("terminal is not the longest object".into()));
        }
        Ok(st)
    }
}

fn orient(left: usize, right: usize, depth: &[usize]) -> (usize, usize, Side) {
    if depth[left] >= depth[right] {
        (left, right, Side::Right)
    } else {
        (right, left, Side::Left)
    }
}

fn shortlex_less(a: &[u8], b: &[u8]) -> bool {
    (a.len(), a) < (b.len(), b)
}

/// Enumerates canonical minimal structures class by class, caching classes
/// and exact indices. Not shared between threads.
#[derive(Debug)]
pub struct CanonicalEnumerator {
    budget: u64,
    examined: u64,
    classes: HashMap<(usize, Vec<u8>, usize), Vec<Structure>>,
    indices: HashMap<Vec<u8>, usize>,
}

impl Default for CanonicalEnumerator {
    fn default() -> Self {
        Self::new(DEFAULT_BUDGET)
    }
}

impl CanonicalEnumerator {
    pub fn new(budget: u64) -> Self {
        Self { budget, examined: 0, classes: HashMap::new(), indices: HashMap::new() }
    }

    pub fn examined(&self) -> u64 {
        self.examined
    }

    fn index_of(&mut self, s: &[u8]) -> Result<usize, SatError> {
        if let Some(&c) = self.indices.get(s) {
            return Ok(c);
        }
        let x = ObjectString::new(s.to_vec()).map_err(|e| SatError::Invalid(e.to_string()))?;
        let c = assembly_index_value(&x, ExactLimits::default())?;
        self.indices.insert(s.to_vec(), c);
        Ok(c)
    }

    /// Canonical minimal structures of height `height` over `basis` with
    /// `extra` edges beyond the longest path, sorted by edge list.
    pub fn class(&mut self, height: usize, basis: &[u8], extra: usize) -> Result<&[Structure], SatError> {
        let key = (height, basis.to_vec(), extra);
        if !self.classes.contains_key(&key) {
            let mut gen = Generator {
                height,
                size: height + extra,
                vertices: basis.iter().map(|&b| vec![b]).collect(),
                depth: vec![0; basis.len()],
                uses: vec![0; basis.len()],
                edges: Vec::new(),
                out: Vec::new(),
                examined: self.examined,
                budget: self.budget,
            };
            let ok = gen.run();
            self.examined = gen.examined;
            if !ok {
                return Err(SatError::Budget { examined: self.examined, classes: self.classes.len() });
            }
            let mut found = Vec::new();
            for st in gen.out {
                let c = st.edges.len();
                if self.index_of(&st.vertices[st.terminal()])? == c {
                    found.push(st);
                }
            }
            found.sort_by(|a, b| a.edges.cmp(&b.edges));
            self.classes.insert(key.clone(), found);
        }
        Ok(&self.classes[&key])
    }

    /// 1-based rank of `st` in the enumeration for its height and basis.
    pub fn rank(&mut self, st: &Structure) -> Result<BigUint, SatError> {
        let height = st.height();
        let basis: Vec<u8> = st.vertices[..st.basis_size].iter().map(|v| v[0]).collect();
        let extra = st.edges.len() - height;
        let mut t = BigUint::zero();
        for e in 0..extra {
            t += self.class(height, &basis, e)?.len();
        }
        let class = self.class(height, &basis, extra)?;
        let pos = class
            .binary_search_by(|s| s.edges.cmp(&st.edges))
            .map_err(|_| SatError::Invalid("structure is not in its class".into()))?;
        Ok(t + pos + 1u32)
    }

    /// The structure of rank `t`.
    pub fn unrank(&mut self, height: usize, basis: &[u8], t: &BigUint) -> Result<Structure, SatError> {
        if t.is_zero() {
            return Err(SatError::TOutOfRange { available: BigUint::zero() });
        }
        // Non-basis objects are at most |y| - 1 ≤ 2^L - 1.
        let max_extra = (1usize << height) - 1 - height;
        let mut before = BigUint::zero();
        for e in 0..=max_extra {
            let class = self.class(height, basis, e)?;
            let end = &before + class.len();
            if t <= &end {
                let i = (t - &before - 1u32).to_usize().unwrap();
                return Ok(class[i].clone());
            }
            before = end;
        }
        Err(SatError::TOutOfRange { available: before })
    }
}

/// Orderly generation of structures: vertices are added in strictly
/// increasing shortlex order, so each structure is produced once.
struct Generator {
    height: usize,
    size: usize,
    vertices: Vec<Vec<u8>>,
    depth: Vec<usize>,
    uses: Vec<usize>,
    edges: Vec<(usize, usize, Side)>,
    out: Vec<Structure>,
    examined: u64,
    budget: u64,
}

impl Generator {
    fn run(&mut self) -> bool {
        let k = self.depth.len();
        self.grow(k)
    }

    fn grow(&mut self, k: usize) -> bool {
        self.examined += 1;
        if self.examined > self.budget {
            return false;
        }
        let added = self.edges.len();
        let remaining = self.size - added;
        let unused = self.uses.iter().filter(|&&u| u == 0).count();
        let max_depth = self.depth.iter().copied().max().unwrap_or(0);
        if remaining == 0 {
            let t = self.vertices.len() - 1;
            if unused == 1 && self.uses[t] == 0 && self.depth[t] == self.height {
                self.out.push(Structure {
                    vertices: self.vertices.clone(),
                    basis_size: k,
                    edges: self.edges.clone(),
                });
            }
            return true;
        }
        // Each join consumes at most two unused vertices and adds one.
        if unused > remaining + 1 || max_depth + remaining < self.height {
            return true;
        }
        let max_len = 1usize << self.height;
        let n = self.vertices.len();
        let mut candidates: Vec<(Vec<u8>, usize, usize)> = Vec::new();
        for a in 0..n {
            for b in 0..n {
                let len = self.vertices[a].len() + self.vertices[b].len();
                if len > max_len || 1 + self.depth[a].max(self.depth[b]) > self.height {
                    continue;
                }
                let s = [self.vertices[a].as_slice(), &self.vertices[b]].concat();
                if shortlex_less(&self.vertices[n - 1], &s) {
                    candidates.push((s, a, b));
                }
            }
        }
        candidates.sort_by(|x, y| (x.0.len(), &x.0, x.1, x.2).cmp(&(y.0.len(), &y.0, y.1, y.2)));
        for (s, a, b) in candidates {
            let edge = orient(a, b, &self.depth);
            self.vertices.push(s);
            self.depth.push(1 + self.depth[a].max(self.depth[b]));
            self.uses.push(0);
            self.uses[a] += 1;
            self.uses[b] += 1;
            self.edges.push(edge);
            let ok = self.grow(k);
            self.edges.pop();
            self.uses[a] -= 1;
            self.uses[b] -= 1;
            self.uses.pop();
            self.depth.pop();
            self.vertices.pop();
            if !ok {
                return false;
            }
        }
        true
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SatTuple {
    pub c: usize,
    pub i_t: usize,
    pub v_l: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SatCodeword {
    #[serde(serialize_with = "ser_big")]
    pub t: BigUint,
    pub gamma_max_len: usize,
    pub basis: Vec<u8>,
    pub v_b: usize,
    pub tuples: Vec<SatTuple>,
    pub bytes: Vec<u8>,
    pub bit_len: usize,
}

fn ser_big<S: serde::Serializer>(t: &BigUint, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&t.to_string())
}

impl SatCodeword {
    fn pack(t: BigUint, gamma_max_len: usize, basis: Vec<u8>, v_b: usize, tuples: Vec<SatTuple>) -> Self {
        let mut w = BitWriter::new();
        w.push_gamma_big(&t);
        w.push_gamma(gamma_max_len as u64);
        w.push_gamma(basis.len() as u64);
        for &b in &basis {
            w.push_byte(b);
        }
        w.push_gamma(v_b as u64 + 1);
        for tp in &tuples {
            w.push_gamma(tp.c as u64);
            w.push_gamma(tp.i_t as u64 + 1);
            w.push_gamma(tp.v_l as u64 + 1);
        }
        let bit_len = w.len();
        Self { t, gamma_max_len, basis, v_b, tuples, bytes: w.into_bytes(), bit_len }
    }

    pub fn to_hex(&self) -> String {
        to_hex(&self.bytes)
    }

    /// File form: the magic bytes followed by the packed stream.
    pub fn to_file_bytes(&self) -> Vec<u8> {
        [FILE_MAGIC.as_slice(), &self.bytes].concat()
    }
}

/// Strips the file magic.
pub fn read_sat_file(bytes: &[u8]) -> Result<&[u8], SatError> {
    bytes
        .strip_prefix(FILE_MAGIC.as_slice())
        .ok_or_else(|| SatError::Malformed("missing SAT1 magic".into()))
}

fn guard(height: usize, basis: usize) -> Result<(), SatError> {
    if height == 0 || height > MAX_HEIGHT || basis == 0 || basis > MAX_BASIS {
        return Err(SatError::Guard { height, basis });
    }
    Ok(())
}

pub fn encode_sat(w: &MinimalSubspace, en: &mut CanonicalEnumerator) -> Result<SatCodeword, SatError> {
    let st = Structure::from_witness(w)?;
    let height = st.height();
    guard(height, st.basis_size)?;
    let c = st.edges.len();
    let index = en.index_of(&st.vertices[st.terminal()])?;
    if index != c {
        return Err(SatError::NotMinimal { index, size: c });
    }
    let t = en.rank(&st)?;
    let (v_b, path) = st.path();
    let tuples = path
        .iter()
        .enumerate()
        .map(|(i, &e)| SatTuple { c: i + 1, i_t: e, v_l: st.edges[e].1 })
        .collect();
    let basis = st.vertices[..st.basis_size].iter().map(|v| v[0]).collect();
    Ok(SatCodeword::pack(t, height, basis, v_b, tuples))
}

pub fn decode_sat(bytes: &[u8], en: &mut CanonicalEnumerator) -> Result<ObjectString, SatError> {
    let mut r = BitReader::new(bytes);
    let t = r.read_gamma_big()?;
    let height = r.read_gamma()? as usize;
    let k = r.read_gamma()? as usize;
    guard(height, k)?;
    let mut basis = Vec::with_capacity(k);
    for _ in 0..k {
        basis.push(r.read_byte()?);
    }
    if basis.windows(2).any(|w| w[0] >= w[1]) || basis.iter().any(|b| !b.is_ascii()) {
        return Err(SatError::Malformed("basis symbols must be distinct ASCII in order".into()));
    }
    let v_b = r.read_gamma()? as usize - 1;
    let st = en.unrank(height, &basis, &t)?;
    if v_b >= st.basis_size {
        return Err(SatError::Pointer(format!("start vertex {v_b} is not a basis vertex")));
    }
    let (_, path) = st.path();
    let mut at = v_b;
    let mut built = st.vertices[v_b].clone();
    for c in 1..=path.len() {
        if r.read_gamma()? as usize != c {
            return Err(SatError::Malformed(format!("tuple counter {c} out of sequence")));
        }
        let i_t = r.read_gamma()? as usize - 1;
        let v_l = r.read_gamma()? as usize - 1;
        let &(src, lbl, side) = st
            .edges
            .get(i_t)
            .ok_or_else(|| SatError::Pointer(format!("edge {i_t}")))?;
        if v_l >= st.vertices.len() {
            return Err(SatError::Pointer(format!("vertex {v_l}")));
        }
        if src != at || lbl != v_l {
            return Err(SatError::Pointer(format!("tuple {c} does not continue the path")));
        }
        built = match side {
            Side::Right => [built.as_slice(), &st.vertices[v_l]].concat(),
            Side::Left => [st.vertices[v_l].as_slice(), &built].concat(),
        };
        at = st.basis_size + i_t;
    }
    if at != st.terminal() {
        return Err(SatError::Malformed("path ends before the terminal".into()));
    }
    if r.remaining() >= 8 || (0..r.remaining()).any(|_| r.read_bit().unwrap_or(true)) {
        return Err(SatError::Malformed("trailing data".into()));
    }
    ObjectString::new(built).map_err(|e| SatError::Malformed(e.to_string()))
}

/// Size bounds for one codeword, each expression with unit constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SizeSandwich {
    pub bits: usize,
    pub lower: f64,
    pub upper_by_height: f64,
    pub upper_by_index: f64,
    /// Bound for single-thread witnesses, polynomial in the height.
    pub upper_linear: f64,
    pub log2_t: f64,
    pub log2_max_t: f64,
}

impl SizeSandwich {
    pub fn holds(&self) -> bool {
        let b = self.bits as f64;
        self.lower <= b && b <= self.upper_by_height && b <= self.upper_by_index && self.log2_t <= self.log2_max_t
    }
}

fn lg(x: f64) -> f64 {
    if x <= 1.0 {
        0.0
    } else {
        x.log2()
    }
}

fn upper(m: f64, gmin: f64, k: f64) -> f64 {
    (2f64.powf(3.0 * m + 6.0) + k * lg(k)) + lg(m) + (k + 1.0) * lg(k) + gmin * ((3.0 * m + 6.0) + lg(gmin))
}

/// Gamma-code length bound for any value up to `n`.
fn gamma_bound(n: f64) -> f64 {
    2.0 * lg(n).floor() + 1.0
}

/// Bits of a single-thread codeword whose rank is at most `L²·|B|`.
pub fn linear_bound(height: usize, basis: usize) -> f64 {
    let (l, k) = (height as f64, basis as f64);
    gamma_bound(l * l * k)
        + gamma_bound(l)
        + 2.0 * gamma_bound(k)
        + 8.0 * k
        + l * (gamma_bound(l) + 2.0 * gamma_bound(l + k))
}

pub fn size_sandwich(code: &SatCodeword, index: usize) -> SizeSandwich {
    let l = code.gamma_max_len as f64;
    let k = code.basis.len() as f64;
    let gmin = code.tuples.len() as f64;
    SizeSandwich {
        bits: code.bit_len,
        lower: gmin,
        upper_by_height: upper(l, gmin, k),
        upper_by_index: upper(index as f64, index as f64, k),
        upper_linear: linear_bound(code.gamma_max_len, code.basis.len()),
        log2_t: code.t.bits() as f64,
        log2_max_t: damg_bounds(code.gamma_max_len, code.basis.len()).log2_max_t,
    }
}

/// Recovers an object from the vertex set of one of its minimal subspaces:
/// tries every one-edge-per-vertex subspace on exactly these vertices in
/// canonical order and returns the end of the longest rooted paths of the
/// first minimal one.
pub fn decode_from_vertex_set(vertices: &[ObjectString], budget: u64) -> Result<ObjectString, SatError> {
    let mut vs: Vec<Vec<u8>> = vertices.iter().map(|v| v.as_bytes().to_vec()).collect();
    vs.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
    vs.dedup();
    let k = vs.iter().take_while(|v| v.len() == 1).count();
    let pos: HashMap<&[u8], usize> = vs.iter().enumerate().map(|(i, v)| (v.as_slice(), i)).collect();

    // Candidate in-edges per non-basis vertex, both orientations.
    let mut options: Vec<Vec<(usize, usize, Side)>> = Vec::new();
    for v in &vs[k..] {
        let mut opts = Vec::new();
        for cut in 1..v.len() {
            if let (Some(&a), Some(&b)) = (pos.get(&v[..cut]), pos.get(&v[cut..])) {
                opts.push((a, b, Side::Right));
                opts.push((b, a, Side::Left));
            }
        }
        if opts.is_empty() {
            return Err(SatError::NoSubspace);
        }
        options.push(opts);
    }

    let basis: Vec<ObjectString> = vs[..k].iter().map(|v| ObjectString::new(v.clone()).unwrap()).collect();
    let objects: Vec<ObjectString> = vs.iter().map(|v| ObjectString::new(v.clone()).unwrap()).collect();
    let mut minimal_cache: HashMap<usize, bool> = HashMap::new();
    let mut choice = vec![0usize; options.len()];
    let mut examined = 0u64;
    loop {
        examined += 1;
        if examined > budget {
            return Err(SatError::Budget { examined, classes: 0 });
        }
        let edges: Vec<Edge> = choice
            .iter()
            .enumerate()
            .map(|(j, &c)| {
                let (source, label, side) = options[j][c];
                Edge { source, label, target: k + j, side }
            })
            .collect();
        let space = AssemblySpace { basis: basis.clone(), vertices: objects.clone(), edges };
        if let Some(sink) = unique_sink(&space) {
            if let Ok(w) = MinimalSubspace::new(space, sink) {
                let minimal = match minimal_cache.get(&sink) {
                    Some(&m) => m,
                    None => {
                        let m = assembly_index_value(&objects[sink], ExactLimits::default())? == w.index;
                        minimal_cache.insert(sink, m);
                        m
                    }
                };
                if minimal {
                    return Ok(w.space.vertices[w.gamma_max.end(&w.space)].clone());
                }
            }
        }
        // Odometer step over the choices, last vertex fastest.
        let mut j = choice.len();
        loop {
            if j == 0 {
                return Err(SatError::NoSubspace);
            }
            j -= 1;
            choice[j] += 1;
            if choice[j] < options[j].len() {
                break;
            }
            choice[j] = 0;
        }
    }
}

fn unique_sink(s: &AssemblySpace) -> Option<usize> {
    let mut used = vec![false; s.vertices.len()];
    for e in &s.edges {
        used[e.source] = true;
        used[e.label] = true;
    }
    let mut sinks = (0..s.vertices.len()).filter(|&v| !used[v]);
    let first = sinks.next()?;
    sinks.next().is_none().then_some(first)
}

/// A rooted path given by its start symbol and its edges as objects.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, serde::Deserialize)]
pub struct EncodedPath {
    pub start: ObjectString,
    pub edges: Vec<PathEdge>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, serde::Deserialize)]
pub struct PathEdge {
    pub src: ObjectString,
    pub label: ObjectString,
    pub tgt: ObjectString,
    pub side: Side,
}

impl EncodedPath {
    pub fn from_rooted(space: &AssemblySpace, p: &RootedPath) -> Self {
        let name = |v: usize| space.vertices[v].clone();
        EncodedPath {
            start: name(p.start),
            edges: p
                .edges
                .iter()
                .map(|&e| {
                    let e = space.edges[e];
                    PathEdge { src: name(e.source), label: name(e.label), tgt: name(e.target), side: e.side }
                })
                .collect(),
        }
    }
}

impl fmt::Display for EncodedPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.start)?;
        for e in &self.edges {
            write!(f, " -[{}/{}]-> {}", e.label, e.side, e.tgt)?;
        }
        Ok(())
    }
}

/// Recovers an object from one of the longest rooted paths of a minimal
/// subspace: finds the first minimal subspace (in canonical order of its
/// object set) that contains the path and hands its vertex set to
/// [`decode_from_vertex_set`].
pub fn decode_from_path(path: &EncodedPath, budget: u64) -> Result<ObjectString, SatError> {
    if !path.start.is_unit() {
        return Err(SatError::Malformed("path must start at a basis symbol".into()));
    }
    let mut at = path.start.clone();
    for (i, e) in path.edges.iter().enumerate() {
        let joined = match e.side {
            Side::Right => e.src.concat(&e.label),
            Side::Left => e.label.concat(&e.src),
        };
        if e.src != at || joined != e.tgt {
            return Err(SatError::Malformed(format!("path edge {i} is inconsistent")));
        }
        at = e.tgt.clone();
    }
    let y = at;
    let sets = optimal_sets(&y, ExactLimits::default())?;
    for set in sets {
        let has = |o: &ObjectString| o.is_unit() || set.contains(o);
        if path.edges.iter().all(|e| has(&e.src) && has(&e.label) && has(&e.tgt)) {
            // One in-edge per vertex: the only rooted path to the terminal is
            // the one threading the chosen splits, so it is the longest.
            let mut vertices = crate::object::basis_of(&y);
            vertices.extend(set);
            return decode_from_vertex_set(&vertices, budget);
        }
    }
    Err(SatError::NoSubspace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index::assembly_index_exact;

    fn o(s: &str) -> ObjectString {
        s.parse().unwrap()
    }

    fn witness(s: &str) -> MinimalSubspace {
        assembly_index_exact(&o(s), ExactLimits::default()).unwrap().witness
    }

    #[test]
    fn bounds_by_substitution() {
        let b = damg_bounds(1, 2);
        assert_eq!(b.max_vertices, BigUint::from(8u32));
        assert_eq!(b.max_edges, BigUint::from(512u32));
        assert_eq!(b.log2_max_t, 513.0);
        let b = damg_bounds(2, 1);
        assert_eq!(b.max_vertices, BigUint::from(16u32));
        assert_eq!(b.max_edges, BigUint::from(4096u32));
    }

    #[test]
    fn aa_round_trip() {
        let mut en = CanonicalEnumerator::default();
        let code = encode_sat(&witness("AA"), &mut en).unwrap();
        assert_eq!(code.tuples.len(), 1);
        assert_eq!(code.t, BigUint::one());
        assert_eq!(decode_sat(&code.bytes, &mut en).unwrap(), o("AA"));
    }

    #[test]
    fn aaaa_has_two_tuples() {
        let mut en = CanonicalEnumerator::default();
        let code = encode_sat(&witness("AAAA"), &mut en).unwrap();
        assert_eq!(code.tuples.len(), 2);
        assert_eq!(decode_sat(&code.bytes, &mut en).unwrap(), o("AAAA"));
        assert!(size_sandwich(&code, 2).holds());
    }

    #[test]
    fn truncated_stream_is_malformed() {
        let mut en = CanonicalEnumerator::default();
        let code = encode_sat(&witness("AAAA"), &mut en).unwrap();
        let err = decode_sat(&code.bytes[..1], &mut en).unwrap_err();
        assert!(err.to_string().starts_with("malformed stream"), "{err}");
    }

    #[test]
    fn rank_out_of_range() {
        let mut en = CanonicalEnumerator::default();
        let mut w = BitWriter::new();
        w.push_gamma(2);
        w.push_gamma(1);
        w.push_gamma(1);
        w.push_byte(b'A');
        w.push_gamma(1);
        w.push_gamma(1);
        w.push_gamma(1);
        w.push_gamma(1);
        let err = decode_sat(w.as_bytes(), &mut en).unwrap_err();
        assert!(matches!(err, SatError::TOutOfRange { .. }), "{err}");
    }

    #[test]
    fn vertex_set_recovery() {
        assert_eq!(decode_from_vertex_set(&[o("A"), o("AA")], 1000).unwrap(), o("AA"));
        assert_eq!(decode_from_vertex_set(&[o("A")], 1000).unwrap(), o("A"));
        let w = witness("BANANA");
        assert_eq!(decode_from_vertex_set(&w.space.vertices, 100_000).unwrap(), o("BANANA"));
        assert!(decode_from_vertex_set(&[o("A"), o("B")], 1000).is_err());
    }

    #[test]
    fn path_recovery() {
        let w = witness("AA");
        let p = EncodedPath::from_rooted(&w.space, &w.gamma_max);
        assert_eq!(decode_from_path(&p, 1000).unwrap(), o("AA"));
        let w = witness("BANANA");
        let p = EncodedPath::from_rooted(&w.space, &w.gamma_max);
        assert_eq!(decode_from_path(&p, 100_000).unwrap(), o("BANANA"));
        let mut bad = p.clone();
        bad.edges[0].label = o("B");
        assert!(decode_from_path(&bad, 1000).is_err());
    }
}
