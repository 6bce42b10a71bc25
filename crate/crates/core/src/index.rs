//! Exact and split-branch assembly indices of strings.
//!
//! The exact search works top-down over sets of substrings of the target: a
//! set `S` of non-basis substrings is a valid assembly plan when every member
//! splits into two parts drawn from `S` or the basis, and the assembly index
//! is the size of the smallest such set containing the target. Members are
//! resolved longest-first, so a partial plan is fully described by
//! `(chosen, open)` and repeated states are pruned.

use std::cmp::Reverse;
use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, HashMap, HashSet};
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::object::{basis_of, ObjectString};
use crate::space::{AssemblySpace, Edge, MinimalSubspace, Side};

/// Longest object the exact search accepts regardless of limits.
pub const MAX_EXACT_LEN: usize = 22;
pub const DEFAULT_MAX_LEN: usize = 16;
pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(60);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExactLimits {
    pub max_len: usize,
    pub timeout: Duration,
}

impl Default for ExactLimits {
    fn default() -> Self {
        Self { max_len: DEFAULT_MAX_LEN, timeout: DEFAULT_TIMEOUT }
    }
}

#[derive(Debug, Error)]
pub enum IndexError {
    #[error("object of length {len} exceeds the exact-search limit of {max_len}; use the split-branch index instead")]
    TooLong { len: usize, max_len: usize },
    #[error("exact search timed out; best known upper bound is {best_upper_bound}")]
    Timeout { best_upper_bound: usize, witness: Box<MinimalSubspace> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct IndexResult {
    pub index: usize,
    /// False when the value is only an upper bound.
    pub exact: bool,
    pub witness: MinimalSubspace,
}

/// One join of a plan: `product = left · right`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Join {
    pub product: ObjectString,
    pub left: ObjectString,
    pub right: ObjectString,
}

/// A straight-line assembly of `target`: one join per non-basis object,
/// listed shortest product first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Plan {
    pub target: ObjectString,
    pub joins: Vec<Join>,
}

impl Plan {
    pub fn len(&self) -> usize {
        self.joins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.joins.is_empty()
    }

    /// Builds the witness space. Each join becomes one edge whose source is
    /// the deeper part (ties go to the left part), so the witness's rooted
    /// path to the target is as long as the plan allows.
    pub fn to_witness(&self) -> MinimalSubspace {
        let basis = basis_of(&self.target);
        let mut vertices = basis.clone();
        let mut joins = self.joins.clone();
        joins.sort_by(|a, b| a.product.shortlex_cmp(&b.product));
        vertices.extend(joins.iter().map(|j| j.product.clone()));
        let id: HashMap<&ObjectString, usize> =
            vertices.iter().enumerate().map(|(i, v)| (v, i)).collect();

        let mut depth = vec![0usize; vertices.len()];
        let mut edges = Vec::with_capacity(joins.len());
        for j in &joins {
            let (l, r, t) = (id[&j.left], id[&j.right], id[&j.product]);
            let edge = if depth[l] >= depth[r] {
                Edge { source: l, label: r, target: t, side: Side::Right }
            } else {
                Edge { source: r, label: l, target: t, side: Side::Left }
            };
            depth[t] = 1 + depth[l].max(depth[r]);
            edges.push(edge);
        }
        let terminal = id[&self.target];
        let space = AssemblySpace { basis, vertices, edges };
        MinimalSubspace::new(space, terminal).expect("plans produce valid witnesses")
    }
}

pub fn assembly_index_exact(x: &ObjectString, limits: ExactLimits) -> Result<IndexResult, IndexError> {
    let (table, sets) = exact_sets(x, limits)?;
    let plan = table.canonical_plan(&sets);
    Ok(IndexResult { index: plan.len(), exact: true, witness: plan.to_witness() })
}

/// The exact index alone, without building a witness.
pub fn assembly_index_value(x: &ObjectString, limits: ExactLimits) -> Result<usize, IndexError> {
    let (table, sets) = exact_sets(x, limits)?;
    Ok(table.objects(&sets[0]).len())
}

/// Every minimum plan set of `x`, each as the sorted list of its non-basis
/// objects.
pub fn optimal_sets(x: &ObjectString, limits: ExactLimits) -> Result<Vec<Vec<ObjectString>>, IndexError> {
    let (table, mut sets) = exact_sets(x, limits)?;
    sets.sort();
    Ok(sets.iter().map(|s| table.objects(s)).collect())
}

fn exact_sets(x: &ObjectString, limits: ExactLimits) -> Result<(SubstringTable, Vec<Bits>), IndexError> {
    let max_len = limits.max_len.min(MAX_EXACT_LEN);
    if x.len() > max_len {
        return Err(IndexError::TooLong { len: x.len(), max_len });
    }
    let deadline = Instant::now() + limits.timeout;
    let table = SubstringTable::new(x);
    let upper = split_branch_plan(x);
    let mut search = Search::new(&table, deadline);

    // Iterative deepening on the plan size: the first size that admits a plan
    // is the index, and that pass has collected every optimal set.
    let floor = usize::BITS as usize - (x.len() - 1).leading_zeros() as usize;
    for bound in floor.min(upper.len())..=upper.len() {
        let sets = search.collect_optimal(table.full_open(), bound);
        if search.timed_out {
            return Err(IndexError::Timeout {
                best_upper_bound: upper.len(),
                witness: Box::new(upper.to_witness()),
            });
        }
        if !sets.is_empty() {
            return Ok((table, sets));
        }
    }
    unreachable!("the split-branch plan has size {}", upper.len())
}

/// Greedy upper bound: repeatedly build the longest substring that occurs at
/// least twice without overlap, then fold the object left to right over
/// occurrences of it and single symbols.
pub fn assembly_index_split_branch(x: &ObjectString) -> IndexResult {
    let plan = split_branch_plan(x);
    IndexResult { index: plan.len(), exact: false, witness: plan.to_witness() }
}

fn split_branch_plan(x: &ObjectString) -> Plan {
    let mut built: BTreeMap<Vec<u8>, (Vec<u8>, Vec<u8>)> = BTreeMap::new();
    ensure(x.as_bytes(), &mut built);
    // A prefix can be built and then bypassed when a longer prefix already
    // exists with another split; keep only joins the target depends on.
    let mut keep: BTreeMap<Vec<u8>, (Vec<u8>, Vec<u8>)> = BTreeMap::new();
    let mut stack = vec![x.as_bytes().to_vec()];
    while let Some(p) = stack.pop() {
        if let Some((l, r)) = built.get(&p) {
            if let Entry::Vacant(slot) = keep.entry(p) {
                stack.push(l.clone());
                stack.push(r.clone());
                slot.insert((l.clone(), r.clone()));
            }
        }
    }
    let joins = keep
        .into_iter()
        .map(|(p, (l, r))| Join {
            product: ObjectString::new(p).unwrap(),
            left: ObjectString::new(l).unwrap(),
            right: ObjectString::new(r).unwrap(),
        })
        .collect::<Vec<_>>();
    let mut plan = Plan { target: x.clone(), joins };
    plan.joins.sort_by(|a, b| a.product.shortlex_cmp(&b.product));
    plan
}

fn ensure(s: &[u8], built: &mut BTreeMap<Vec<u8>, (Vec<u8>, Vec<u8>)>) {
    if s.len() == 1 || built.contains_key(s) {
        return;
    }
    let tokens: Vec<&[u8]> = match longest_repeat(s) {
        Some(w) => {
            ensure(w, built);
            let mut toks = Vec::new();
            let mut i = 0;
            while i < s.len() {
                if s[i..].starts_with(w) {
                    toks.push(&s[i..i + w.len()]);
                    i += w.len();
                } else {
                    toks.push(&s[i..i + 1]);
                    i += 1;
                }
            }
            toks
        }
        None => s.chunks(1).collect(),
    };
    let mut acc: Vec<u8> = tokens[0].to_vec();
    for tok in &tokens[1..] {
        let mut next = acc.clone();
        next.extend_from_slice(tok);
        if !built.contains_key(&next) && next.len() > 1 {
            built.insert(next.clone(), (acc.clone(), tok.to_vec()));
        }
        acc = next;
    }
}

/// Longest substring of length ≥ 2 with two non-overlapping occurrences;
/// lexicographically smallest among equals.
fn longest_repeat(s: &[u8]) -> Option<&[u8]> {
    for len in (2..=s.len() / 2).rev() {
        let mut first: HashMap<&[u8], usize> = HashMap::new();
        let mut found: Option<&[u8]> = None;
        for i in 0..=s.len() - len {
            let w = &s[i..i + len];
            match first.get(w) {
                Some(&j) if j + len <= i => {
                    if found.is_none_or(|f| w < f) {
                        found = Some(w);
                    }
                }
                Some(_) => {}
                None => {
                    first.insert(w, i);
                }
            }
        }
        if found.is_some() {
            return found;
        }
    }
    None
}

/// Fixed-width bit set over substring ids.
type Bits = [u64; 4];

fn set_bit(b: &mut Bits, i: usize) {
    b[i >> 6] |= 1 << (i & 63);
}

fn clear_bit(b: &mut Bits, i: usize) {
    b[i >> 6] &= !(1 << (i & 63));
}

fn has_bit(b: &Bits, i: usize) -> bool {
    b[i >> 6] >> (i & 63) & 1 == 1
}

fn highest_bit(b: &Bits) -> Option<usize> {
    (0..4).rev().find(|&w| b[w] != 0).map(|w| w * 64 + 63 - b[w].leading_zeros() as usize)
}

fn bit_ids(b: &Bits) -> impl Iterator<Item = usize> + '_ {
    (0..256).filter(move |&i| has_bit(b, i))
}

/// Distinct substrings of the target, numbered in shortlex order, with every
/// two-part split of each.
struct SubstringTable {
    strings: Vec<Vec<u8>>,
    splits: Vec<Vec<(usize, usize)>>,
}

impl SubstringTable {
    fn new(x: &ObjectString) -> Self {
        let s = x.as_bytes();
        let mut all: Vec<Vec<u8>> = Vec::new();
        for i in 0..s.len() {
            for j in i + 1..=s.len() {
                all.push(s[i..j].to_vec());
            }
        }
        all.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        all.dedup();
        assert!(all.len() <= 256, "substring table overflow");
        let id: HashMap<&[u8], usize> = all.iter().enumerate().map(|(i, v)| (v.as_slice(), i)).collect();
        let splits = all
            .iter()
            .map(|w| (1..w.len()).map(|k| (id[&w[..k]], id[&w[k..]])).collect())
            .collect();
        Self { strings: all, splits }
    }

    fn is_unit(&self, id: usize) -> bool {
        self.strings[id].len() == 1
    }

    fn target(&self) -> usize {
        self.strings.len() - 1
    }

    fn full_open(&self) -> Bits {
        let mut b = [0; 4];
        if !self.is_unit(self.target()) {
            set_bit(&mut b, self.target());
        }
        b
    }

    fn objects(&self, set: &Bits) -> Vec<ObjectString> {
        bit_ids(set).map(|i| ObjectString::new(self.strings[i].clone()).unwrap()).collect()
    }

    fn available(&self, set: &Bits, id: usize) -> bool {
        self.is_unit(id) || has_bit(set, id)
    }

    /// Deepest split per member (ties: shortest left part) and the depth it
    /// yields for the target.
    fn deepest_splits(&self, set: &Bits) -> (usize, Vec<(usize, usize, usize)>) {
        let mut depth: HashMap<usize, usize> = HashMap::new();
        let mut chosen = Vec::new();
        for id in bit_ids(set) {
            let mut best: Option<(usize, usize, usize)> = None;
            for &(a, b) in &self.splits[id] {
                if !(self.available(set, a) && self.available(set, b)) {
                    continue;
                }
                let d = 1 + depth.get(&a).copied().unwrap_or(0).max(depth.get(&b).copied().unwrap_or(0));
                if best.is_none_or(|(bd, _, _)| d > bd) {
                    best = Some((d, a, b));
                }
            }
            let (d, a, b) = best.expect("every member of a plan set splits inside it");
            depth.insert(id, d);
            chosen.push((id, a, b));
        }
        (depth.get(&self.target()).copied().unwrap_or(0), chosen)
    }

    fn plan_for(&self, set: &Bits) -> Plan {
        let (_, chosen) = self.deepest_splits(set);
        let obj = |i: usize| ObjectString::new(self.strings[i].clone()).unwrap();
        Plan {
            target: obj(self.target()),
            joins: chosen
                .into_iter()
                .map(|(p, l, r)| Join { product: obj(p), left: obj(l), right: obj(r) })
                .collect(),
        }
    }

    /// Among optimal sets prefer the deepest target, then the shortlex-smallest
    /// member list.
    fn canonical_plan(&self, sets: &[Bits]) -> Plan {
        let best = sets
            .iter()
            .min_by_key(|s| (Reverse(self.deepest_splits(s).0), bit_ids(s).collect::<Vec<_>>()))
            .expect("at least one optimal set");
        self.plan_for(best)
    }
}

struct Search<'a> {
    table: &'a SubstringTable,
    deadline: Instant,
    ticks: u32,
    timed_out: bool,
    bound: usize,
    visited: HashSet<(Bits, Bits)>,
}

impl<'a> Search<'a> {
    fn new(table: &'a SubstringTable, deadline: Instant) -> Self {
        Self { table, deadline, ticks: 0, timed_out: false, bound: 0, visited: HashSet::new() }
    }

    fn tick(&mut self) -> bool {
        self.ticks = self.ticks.wrapping_add(1);
        if self.ticks.is_multiple_of(4096) && Instant::now() >= self.deadline {
            self.timed_out = true;
        }
        self.timed_out
    }

    /// Splits of `u` with the parts it would add to the plan, cheapest first.
    fn branches(&self, chosen: &Bits, u: usize) -> Vec<(usize, [Option<usize>; 2])> {
        let mut out: Vec<(usize, [Option<usize>; 2])> = self.table.splits[u]
            .iter()
            .map(|&(a, b)| {
                let fresh = |i: usize| (!self.table.available(chosen, i)).then_some(i);
                let (na, mut nb) = (fresh(a), fresh(b));
                if a == b {
                    nb = None;
                }
                let cost = na.is_some() as usize + nb.is_some() as usize;
                (cost, [na, nb])
            })
            .collect();
        out.sort_by_key(|(c, _)| *c);
        out
    }

    /// Admissible bound on members still to be added: one if some open member
    /// has no split inside the current plan.
    fn lower_bound(&self, chosen: &Bits, open: &Bits) -> usize {
        let stuck = bit_ids(open).any(|u| {
            !self.table.splits[u]
                .iter()
                .any(|&(a, b)| self.table.available(chosen, a) && self.table.available(chosen, b))
        });
        stuck as usize
    }

    /// Every plan set of size at most `bound`.
    fn collect_optimal(&mut self, open: Bits, bound: usize) -> Vec<Bits> {
        self.bound = bound;
        self.visited.clear();
        let count = bit_ids(&open).count();
        let mut found = Vec::new();
        self.descend(open, open, count, &mut found);
        let mut seen = HashSet::new();
        found.retain(|s| seen.insert(*s));
        found
    }

    fn descend(&mut self, chosen: Bits, open: Bits, count: usize, found: &mut Vec<Bits>) {
        if self.tick() {
            return;
        }
        let Some(u) = highest_bit(&open) else {
            found.push(chosen);
            return;
        };
        if count + self.lower_bound(&chosen, &open) > self.bound {
            return;
        }
        if !self.visited.insert((chosen, open)) {
            return;
        }
        let mut rest = open;
        clear_bit(&mut rest, u);
        for (cost, fresh) in self.branches(&chosen, u) {
            if count + cost > self.bound {
                break;
            }
            let (mut c, mut o) = (chosen, rest);
            for i in fresh.into_iter().flatten() {
                set_bit(&mut c, i);
                set_bit(&mut o, i);
            }
            self.descend(c, o, count + cost, found);
            if self.timed_out {
                return;
            }
        }
    }
}
