//! Ensembles of objects: the assembly number, its normalised forms, the
//! prefix code they induce and a biased-selection simulator.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::index::{assembly_index_exact, assembly_index_split_branch, ExactLimits, DEFAULT_MAX_LEN};
use crate::object::ObjectString;

#[derive(Debug, Error)]
pub enum EnsembleError {
    #[error("empty ensemble")]
    Empty,
    #[error("object {0} appears twice")]
    Duplicate(ObjectString),
    #[error("object {0} has zero copies")]
    ZeroCopies(ObjectString),
    #[error("no ensemble in the catalog shares the weight of this one")]
    EmptyClass,
    #[error("ensemble {0} has zero measure")]
    ZeroMeasure(usize),
    #[error("measure values sum to {0} > 1")]
    NotSemimeasure(f64),
    #[error("code lengths violate the Kraft inequality")]
    Kraft,
    #[error("malformed ensemble JSON: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Item {
    pub object: ObjectString,
    pub copies: u64,
    pub index: usize,
    /// False when `index` is a split-branch upper bound.
    pub exact: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Ensemble {
    pub items: Vec<Item>,
}

#[derive(Deserialize)]
struct ItemJson {
    object: ObjectString,
    copies: u64,
    #[serde(default)]
    index: Option<usize>,
    #[serde(default)]
    exact: Option<bool>,
}

#[derive(Deserialize)]
struct EnsembleJson {
    items: Vec<ItemJson>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum CatalogJson {
    List(Vec<EnsembleJson>),
    Wrapped { ensembles: Vec<EnsembleJson> },
    Single(EnsembleJson),
}

/// Index of `x`: exact up to the default exact-search length, split-branch
/// beyond it or on timeout.
pub fn object_index(x: &ObjectString) -> (usize, bool) {
    if x.len() <= DEFAULT_MAX_LEN {
        if let Ok(r) = assembly_index_exact(x, ExactLimits::default()) {
            return (r.index, true);
        }
    }
    (assembly_index_split_branch(x).index, false)
}

impl Ensemble {
    /// Builds an ensemble, computing indices for every object.
    pub fn from_copies(items: impl IntoIterator<Item = (ObjectString, u64)>) -> Result<Self, EnsembleError> {
        let items = items
            .into_iter()
            .map(|(object, copies)| {
                let (index, exact) = object_index(&object);
                Item { object, copies, index, exact }
            })
            .collect();
        Self::new(items)
    }

    pub fn new(items: Vec<Item>) -> Result<Self, EnsembleError> {
        if items.is_empty() {
            return Err(EnsembleError::Empty);
        }
        let mut seen = std::collections::HashSet::new();
        for it in &items {
            if it.copies == 0 {
                return Err(EnsembleError::ZeroCopies(it.object.clone()));
            }
            if !seen.insert(&it.object) {
                return Err(EnsembleError::Duplicate(it.object.clone()));
            }
        }
        Ok(Self { items })
    }

    fn from_json(raw: EnsembleJson) -> Result<Self, EnsembleError> {
        let items = raw
            .items
            .into_iter()
            .map(|it| {
                let (index, exact) = match it.index {
                    Some(i) => (i, it.exact.unwrap_or(true)),
                    None => object_index(&it.object),
                };
                Item { object: it.object, copies: it.copies, index, exact }
            })
            .collect();
        Self::new(items)
    }

    /// N: number of distinct objects.
    pub fn unique(&self) -> usize {
        self.items.len()
    }

    /// N_T: total copies.
    pub fn total(&self) -> u64 {
        self.items.iter().map(|i| i.copies).sum()
    }

    /// Multiset of indices; two ensembles have equal Σ e^(a_i) exactly when
    /// these agree, since e is transcendental.
    pub fn weight_key(&self) -> Vec<usize> {
        let mut k: Vec<usize> = self.items.iter().map(|i| i.index).collect();
        k.sort_unstable();
        k
    }

    /// Hash of the sorted `object:copies` list.
    pub fn object_set_hash(&self) -> String {
        let mut lines: Vec<String> = self.items.iter().map(|i| format!("{}:{}\n", i.object, i.copies)).collect();
        lines.sort();
        let digest = Sha256::digest(lines.concat().as_bytes());
        crate::bits::to_hex(&digest)
    }
}

/// Reads a catalog: a list of ensembles, `{"ensembles": [...]}`, or a single
/// ensemble.
pub fn catalog_from_json(s: &str) -> Result<Vec<Ensemble>, EnsembleError> {
    let raw: CatalogJson = serde_json::from_str(s)?;
    let list = match raw {
        CatalogJson::List(l) | CatalogJson::Wrapped { ensembles: l } => l,
        CatalogJson::Single(e) => vec![e],
    };
    if list.is_empty() {
        return Err(EnsembleError::Empty);
    }
    list.into_iter().map(Ensemble::from_json).collect()
}

/// A# = Σ e^(a_i) (n_i − 1) / N_T.
pub fn assembly_number(x: &Ensemble) -> f64 {
    let nt = x.total() as f64;
    x.items.iter().map(|i| (i.index as f64).exp() * (i.copies - 1) as f64 / nt).sum()
}

/// A′#: A# divided by the total A# of the catalog ensembles with the same
/// Σ e^(a_i). Zero when the whole class has A# = 0.
pub fn assembly_number_normalized(x: &Ensemble, catalog: &[Ensemble]) -> Result<f64, EnsembleError> {
    let key = x.weight_key();
    let class: Vec<&Ensemble> = catalog.iter().filter(|e| e.weight_key() == key).collect();
    if class.is_empty() {
        return Err(EnsembleError::EmptyClass);
    }
    let total: f64 = class.iter().map(|e| assembly_number(e)).sum();
    let a = assembly_number(x);
    Ok(if total > 0.0 { a / total } else { 0.0 })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CodeEntry {
    pub hash: String,
    pub assembly_number: f64,
    pub measure: f64,
    pub length: u32,
    pub codeword: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleCode {
    pub entries: Vec<CodeEntry>,
    pub kraft_sum: f64,
}

/// The default measure A″#: A# normalised over the catalog.
pub fn catalog_measure(catalog: &[Ensemble]) -> Vec<f64> {
    let a: Vec<f64> = catalog.iter().map(assembly_number).collect();
    let total: f64 = a.iter().sum();
    a.iter().map(|v| if total > 0.0 { v / total } else { 0.0 }).collect()
}

/// Code lengths ⌈−log2 m⌉ and a canonical prefix code: entries sorted by
/// (length, catalog position) take consecutive codewords.
pub fn ensemble_prefix_code(catalog: &[Ensemble], measure: &[f64]) -> Result<EnsembleCode, EnsembleError> {
    assert_eq!(catalog.len(), measure.len());
    let sum: f64 = measure.iter().sum();
    if sum > 1.0 + 1e-9 {
        return Err(EnsembleError::NotSemimeasure(sum));
    }
    let mut lengths = Vec::with_capacity(measure.len());
    for (i, &m) in measure.iter().enumerate() {
        if m <= 0.0 || m > 1.0 {
            return Err(EnsembleError::ZeroMeasure(i));
        }
        lengths.push((-m.log2()).ceil().max(0.0) as u32);
    }
    let codes = canonical_codewords(&lengths).ok_or(EnsembleError::Kraft)?;
    let kraft_sum = lengths.iter().map(|&l| 2f64.powi(-(l as i32))).sum();
    let entries = catalog
        .iter()
        .zip(measure)
        .zip(lengths.iter().zip(codes))
        .map(|((e, &m), (&length, codeword))| CodeEntry {
            hash: e.object_set_hash(),
            assembly_number: assembly_number(e),
            measure: m,
            length,
            codeword,
        })
        .collect();
    Ok(EnsembleCode { entries, kraft_sum })
}

/// Canonical codewords for the given lengths, or `None` when the Kraft sum
/// exceeds one.
pub fn canonical_codewords(lengths: &[u32]) -> Option<Vec<String>> {
    let mut order: Vec<usize> = (0..lengths.len()).collect();
    order.sort_by_key(|&i| (lengths[i], i));
    let mut out = vec![String::new(); lengths.len()];
    // Next free codeword, as a bit vector of the current length.
    let mut next: Vec<bool> = Vec::new();
    let mut exhausted = false;
    for &i in &order {
        if exhausted {
            return None;
        }
        next.resize(lengths[i] as usize, false);
        out[i] = next.iter().map(|&b| if b { '1' } else { '0' }).collect();
        // Increment as a binary number; carrying out of the top means every
        // codeword of this length is taken.
        exhausted = true;
        for b in next.iter_mut().rev() {
            if *b {
                *b = false;
            } else {
                *b = true;
                exhausted = false;
                break;
            }
        }
    }
    Some(out)
}

pub fn is_prefix_free(codes: &[String]) -> bool {
    let mut sorted: Vec<&String> = codes.iter().collect();
    sorted.sort();
    sorted.windows(2).all(|w| !w[1].starts_with(w[0].as_str()))
}

/// Smallest natural k₀ such that every pair with A#(X) + k₀ ≤ A#(X′) has a
/// strictly shorter code for X′.
pub fn monotonicity_threshold(code: &EnsembleCode) -> u64 {
    let mut k0 = 0u64;
    for x in &code.entries {
        for y in &code.entries {
            let gap = y.assembly_number - x.assembly_number;
            if gap >= 0.0 && y.length >= x.length {
                k0 = k0.max(gap.floor() as u64 + 1);
            }
        }
    }
    k0
}

/// Code table rows: hash, A#, A″#, length, codeword.
pub fn code_table_csv(code: &EnsembleCode) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["object_set_hash", "assembly_number", "measure", "length", "codeword"])
        .expect("in-memory write");
    for e in &code.entries {
        w.write_record([
            e.hash.clone(),
            format!("{:.6}", e.assembly_number),
            format!("{:.6}", e.measure),
            e.length.to_string(),
            e.codeword.clone(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory write")).expect("utf8")
}

/// 32-bit linear congruential generator (multiplier 1664525, increment
/// 1013904223).
#[derive(Debug, Clone)]
pub struct Lcg(u32);

impl Lcg {
    pub fn new(seed: u64) -> Self {
        Lcg((seed as u32) ^ (seed >> 32) as u32)
    }

    pub fn next_u32(&mut self) -> u32 {
        self.0 = self.0.wrapping_mul(1_664_525).wrapping_add(1_013_904_223);
        self.0
    }

    /// Uniform in `0..n`, taken from the high bits; the low bits of a
    /// power-of-two LCG have short periods.
    pub fn below(&mut self, n: u32) -> u32 {
        ((self.next_u32() as u64 * n as u64) >> 32) as u32
    }

    /// Uniform in [0, 1).
    pub fn next_f64(&mut self) -> f64 {
        self.next_u32() as f64 / 4_294_967_296.0
    }
}

/// Objects longer than this are not picked, so products stay within twice
/// that length.
pub const MAX_PART_LEN: usize = 32;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionConfig {
    pub pool: Vec<u8>,
    pub steps: usize,
    pub bias: f64,
    pub seed: u64,
}

impl SelectionConfig {
    pub fn binary(steps: usize, bias: f64, seed: u64) -> Self {
        Self { pool: b"01".to_vec(), steps, bias, seed }
    }
}

/// Each step picks two members of the pool (basis symbols plus everything
/// built so far), each with weight (1 + prior uses)^bias, and records one
/// copy of their concatenation. Indices are split-branch.
pub fn simulate_selection(cfg: &SelectionConfig) -> Result<Ensemble, EnsembleError> {
    if cfg.steps == 0 || cfg.pool.is_empty() {
        return Err(EnsembleError::Empty);
    }
    let mut rng = Lcg::new(cfg.seed);
    let mut members: Vec<ObjectString> = cfg.pool.iter().map(|&b| ObjectString::symbol(b)).collect();
    let mut position: HashMap<ObjectString, usize> =
        members.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();
    let mut uses: Vec<u64> = vec![0; members.len()];
    let mut copies: BTreeMap<usize, u64> = BTreeMap::new();
    let mut order: Vec<usize> = Vec::new();

    for _ in 0..cfg.steps {
        let a = pick(&members, &uses, cfg.bias, &mut rng);
        uses[a] += 1;
        let b = pick(&members, &uses, cfg.bias, &mut rng);
        uses[b] += 1;
        let product = members[a].concat(&members[b]);
        let id = *position.entry(product.clone()).or_insert_with(|| {
            members.push(product);
            uses.push(0);
            members.len() - 1
        });
        let c = copies.entry(id).or_insert(0);
        if *c == 0 {
            order.push(id);
        }
        *c += 1;
    }
    let items = order
        .into_iter()
        .map(|id| {
            let object = members[id].clone();
            Item { index: assembly_index_split_branch(&object).index, object, copies: copies[&id], exact: false }
        })
        .collect();
    Ensemble::new(items)
}

fn pick(members: &[ObjectString], uses: &[u64], bias: f64, rng: &mut Lcg) -> usize {
    let weight = |i: usize| {
        if members[i].len() > MAX_PART_LEN {
            0.0
        } else {
            (1.0 + uses[i] as f64).powf(bias)
        }
    };
    let total: f64 = (0..members.len()).map(weight).sum();
    let mut r = rng.next_f64() * total;
    for i in 0..members.len() {
        let w = weight(i);
        if r < w {
            return i;
        }
        r -= w;
    }
    // Rounding left r at the very top: take the last eligible member.
    (0..members.len()).rev().find(|&i| weight(i) > 0.0).expect("basis symbols are eligible")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn item(o: &str, copies: u64, index: usize) -> Item {
        Item { object: o.parse().unwrap(), copies, index, exact: true }
    }

    #[test]
    fn assembly_number_examples() {
        let all_single = Ensemble::new(vec![item("AB", 1, 1), item("ABC", 1, 2)]).unwrap();
        assert_eq!(assembly_number(&all_single), 0.0);
        let one = Ensemble::new(vec![item("AA", 2, 1)]).unwrap();
        assert!((assembly_number(&one) - 1.35914).abs() < 1e-5);
        let two = Ensemble::new(vec![item("AAAA", 2, 2), item("ABCD", 1, 3)]).unwrap();
        assert!((assembly_number(&two) - 2.46302).abs() < 1e-5);
        assert!(matches!(Ensemble::new(vec![]), Err(EnsembleError::Empty)));
    }

    #[test]
    fn normalisation_within_weight_class() {
        let x = Ensemble::new(vec![item("AB", 4, 1), item("BA", 1, 1)]).unwrap();
        assert_eq!(assembly_number_normalized(&x, std::slice::from_ref(&x)).unwrap(), 1.0);
        // Same index multiset {1, 1, 1}; A# = 3e/4 against e/4.
        let x = Ensemble::new(vec![item("AB", 10, 1), item("BA", 1, 1), item("AC", 1, 1)]).unwrap();
        let y = Ensemble::new(vec![item("CA", 2, 1), item("BC", 1, 1), item("CB", 1, 1)]).unwrap();
        let cat = vec![x.clone(), y.clone()];
        assert!((assembly_number_normalized(&x, &cat).unwrap() - 0.75).abs() < 1e-12);
        assert!((assembly_number_normalized(&y, &cat).unwrap() - 0.25).abs() < 1e-12);
        let zero = Ensemble::new(vec![item("AB", 1, 1), item("BA", 1, 1), item("CC", 1, 1)]).unwrap();
        assert_eq!(assembly_number_normalized(&zero, &[x.clone(), zero.clone()]).unwrap(), 0.0);
        let other = Ensemble::new(vec![item("AB", 2, 1)]).unwrap();
        assert!(matches!(assembly_number_normalized(&other, &cat[1..]), Err(EnsembleError::EmptyClass)));
    }

    #[test]
    fn dyadic_and_skewed_lengths() {
        let e = Ensemble::new(vec![item("AA", 2, 1)]).unwrap();
        let cat = vec![e.clone(), e];
        let c = ensemble_prefix_code(&cat, &[0.5, 0.5]).unwrap();
        assert_eq!(c.entries.iter().map(|e| e.length).collect::<Vec<_>>(), [1, 1]);
        assert_eq!(c.kraft_sum, 1.0);
        let c = ensemble_prefix_code(&cat, &[0.75, 0.25]).unwrap();
        assert_eq!(c.entries.iter().map(|e| e.length).collect::<Vec<_>>(), [1, 2]);
        assert_eq!(c.kraft_sum, 0.75);
        let words: Vec<String> = c.entries.iter().map(|e| e.codeword.clone()).collect();
        assert!(is_prefix_free(&words));
        assert!(matches!(ensemble_prefix_code(&cat, &[1.0, 0.0]), Err(EnsembleError::ZeroMeasure(1))));
    }

    #[test]
    fn canonical_codewords_respect_kraft() {
        assert_eq!(canonical_codewords(&[2, 1, 2]).unwrap(), ["10", "0", "11"]);
        assert!(canonical_codewords(&[1, 1, 1]).is_none());
    }

    #[test]
    fn lcg_sequence() {
        let mut r = Lcg::new(0);
        assert_eq!(r.next_u32(), 1_013_904_223);
        assert_eq!(r.next_u32(), 1_196_435_762);
    }

    #[test]
    fn one_step_makes_one_pair() {
        let e = simulate_selection(&SelectionConfig::binary(1, 0.0, 7)).unwrap();
        assert_eq!(e.items.len(), 1);
        assert_eq!(e.items[0].object.len(), 2);
        assert_eq!(e.items[0].copies, 1);
    }
}
