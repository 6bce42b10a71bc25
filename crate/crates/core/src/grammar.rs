//! Straight-line grammars read off minimal assembly witnesses.
//!
//! Every vertex `v` of the witness becomes a nonterminal `N_v`. Each edge
//! contributes one binary rule for its target, each basis symbol one rule
//! `N_b -> 'b'`, and `N_x` for the terminal object is the start symbol.

use std::collections::{BTreeSet, HashMap};
use std::fmt::{self, Write as _};

use serde::Serialize;
use thiserror::Error;

use crate::object::ObjectString;
use crate::space::{MinimalSubspace, Side, SpaceError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    Terminal(u8),
    Nonterminal(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Rule {
    pub lhs: usize,
    pub rhs: Vec<Symbol>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cfg {
    /// Nonterminal names, indexed by id.
    pub nonterminals: Vec<String>,
    pub terminals: BTreeSet<u8>,
    pub rules: Vec<Rule>,
    pub start: usize,
}

#[derive(Debug, Error)]
pub enum GrammarError {
    #[error("grammar not acyclic (at {0})")]
    NotAcyclic(String),
    #[error("nonterminal {0} has no rule")]
    NoRule(String),
    #[error("grammar derives the empty string")]
    Empty,
    #[error(transparent)]
    Space(#[from] SpaceError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GrammarMetrics {
    /// |R| of the constructed grammar.
    pub raw_size: usize,
    /// |G*|: rules left after pruning.
    pub pruned_size: usize,
    pub basis_size: usize,
    pub edge_count: usize,
    /// Rule count when two start rules are charged per basis symbol.
    pub doubled_basis_size: usize,
    pub index: usize,
    /// `index == pruned_size - basis_size`.
    pub identity: bool,
}

fn nonterminal_name(v: &ObjectString) -> String {
    format!("N_{v}")
}

pub fn space_to_cfg(w: &MinimalSubspace) -> Result<Cfg, GrammarError> {
    let report = crate::space::validate_space(&w.space);
    if !report.is_valid() {
        return Err(SpaceError::Invalid(report).into());
    }
    let s = &w.space;
    let nonterminals: Vec<String> = s.vertices.iter().map(nonterminal_name).collect();
    let mut rules = Vec::with_capacity(s.edges.len() + s.basis.len());
    for (id, v) in s.vertices.iter().enumerate() {
        if s.is_basis(id) {
            rules.push(Rule { lhs: id, rhs: vec![Symbol::Terminal(v.as_bytes()[0])] });
        }
    }
    for e in &s.edges {
        let (src, lbl) = (Symbol::Nonterminal(e.source), Symbol::Nonterminal(e.label));
        let rhs = match e.side {
            Side::Right => vec![src, lbl],
            Side::Left => vec![lbl, src],
        };
        rules.push(Rule { lhs: e.target, rhs });
    }
    let terminals = s.basis.iter().map(|b| b.as_bytes()[0]).collect();
    Ok(Cfg { nonterminals, terminals, rules, start: w.terminal })
}

/// Drops rules that cannot take part in the derivation of the start symbol:
/// rules of unreachable nonterminals and repeated alternatives. A
/// straight-line grammar derives one string per nonterminal, so only the
/// first rule of each nonterminal is kept.
pub fn prune_useless(g: &Cfg) -> Cfg {
    let mut first: HashMap<usize, &Rule> = HashMap::new();
    for r in &g.rules {
        first.entry(r.lhs).or_insert(r);
    }
    let mut reachable = vec![false; g.nonterminals.len()];
    let mut stack = vec![g.start];
    reachable[g.start] = true;
    while let Some(n) = stack.pop() {
        if let Some(r) = first.get(&n) {
            for s in &r.rhs {
                if let Symbol::Nonterminal(m) = *s {
                    if !reachable[m] {
                        reachable[m] = true;
                        stack.push(m);
                    }
                }
            }
        }
    }
    let mut seen = vec![false; g.nonterminals.len()];
    let rules = g
        .rules
        .iter()
        .filter(|r| reachable[r.lhs] && !std::mem::replace(&mut seen[r.lhs], true))
        .cloned()
        .collect();
    Cfg { rules, ..g.clone() }
}

/// Expands the start symbol using the first rule of every nonterminal.
pub fn cfg_expand(g: &Cfg) -> Result<ObjectString, GrammarError> {
    let mut first: HashMap<usize, &Rule> = HashMap::new();
    for r in &g.rules {
        first.entry(r.lhs).or_insert(r);
    }
    let mut memo: Vec<Option<Vec<u8>>> = vec![None; g.nonterminals.len()];
    let mut on_stack = vec![false; g.nonterminals.len()];
    let out = expand(g, g.start, &first, &mut memo, &mut on_stack)?;
    ObjectString::new(out).map_err(|_| GrammarError::Empty)
}

fn expand(
    g: &Cfg,
    n: usize,
    first: &HashMap<usize, &Rule>,
    memo: &mut Vec<Option<Vec<u8>>>,
    on_stack: &mut Vec<bool>,
) -> Result<Vec<u8>, GrammarError> {
    if let Some(s) = &memo[n] {
        return Ok(s.clone());
    }
    if on_stack[n] {
        return Err(GrammarError::NotAcyclic(g.nonterminals[n].clone()));
    }
    let rule = first.get(&n).ok_or_else(|| GrammarError::NoRule(g.nonterminals[n].clone()))?;
    on_stack[n] = true;
    let mut out = Vec::new();
    for s in &rule.rhs {
        match *s {
            Symbol::Terminal(b) => out.push(b),
            Symbol::Nonterminal(m) => out.extend(expand(g, m, first, memo, on_stack)?),
        }
    }
    on_stack[n] = false;
    memo[n] = Some(out.clone());
    Ok(out)
}

pub fn grammar_metrics(w: &MinimalSubspace) -> Result<GrammarMetrics, GrammarError> {
    let g = space_to_cfg(w)?;
    let pruned = prune_useless(&g);
    let basis_size = w.space.basis.len();
    let pruned_size = pruned.rules.len();
    Ok(GrammarMetrics {
        raw_size: g.rules.len(),
        pruned_size,
        basis_size,
        edge_count: w.space.edges.len(),
        doubled_basis_size: w.space.edges.len() + 2 * basis_size,
        index: w.index,
        identity: pruned_size >= basis_size && w.index == pruned_size - basis_size,
    })
}

impl Cfg {
    fn show(&self, s: Symbol) -> String {
        match s {
            Symbol::Terminal(b) => format!("'{}'", b as char),
            Symbol::Nonterminal(n) => self.nonterminals[n].clone(),
        }
    }
}

/// One rule per line, `N_i -> α β`, start rules first and then in the order
/// the grammar lists them.
impl fmt::Display for Cfg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        for r in &self.rules {
            let rhs: Vec<String> = r.rhs.iter().map(|&s| self.show(s)).collect();
            writeln!(out, "{} -> {}", self.nonterminals[r.lhs], rhs.join(" "))?;
        }
        f.write_str(&out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index::{assembly_index_exact, ExactLimits};

    fn witness(s: &str) -> MinimalSubspace {
        assembly_index_exact(&s.parse().unwrap(), ExactLimits::default()).unwrap().witness
    }

    #[test]
    fn aa_grammar() {
        let g = space_to_cfg(&witness("AA")).unwrap();
        assert_eq!(g.rules.len(), 2);
        assert_eq!(g.to_string(), "N_A -> 'A'\nN_AA -> N_A N_A\n");
        assert_eq!(cfg_expand(&g).unwrap().as_str(), "AA");
    }

    #[test]
    fn basis_object_grammar() {
        let g = space_to_cfg(&witness("A")).unwrap();
        assert_eq!(g.rules.len(), 1);
        assert_eq!(cfg_expand(&g).unwrap().as_str(), "A");
        let m = grammar_metrics(&witness("A")).unwrap();
        assert_eq!((m.index, m.pruned_size, m.basis_size), (0, 1, 1));
        assert!(m.identity);
    }

    #[test]
    fn orphan_rule_is_pruned() {
        let mut g = space_to_cfg(&witness("AA")).unwrap();
        g.nonterminals.push("N_orphan".into());
        g.rules.push(Rule { lhs: 2, rhs: vec![Symbol::Terminal(b'Z')] });
        let p = prune_useless(&g);
        assert_eq!(p.rules.len(), 2);
        assert_eq!(cfg_expand(&p).unwrap(), cfg_expand(&g).unwrap());
        assert_eq!(prune_useless(&p), p);
    }

    #[test]
    fn recursion_is_detected() {
        let g = Cfg {
            nonterminals: vec!["S".into()],
            terminals: BTreeSet::from(*b"A"),
            rules: vec![Rule { lhs: 0, rhs: vec![Symbol::Nonterminal(0), Symbol::Terminal(b'A')] }],
            start: 0,
        };
        let err = cfg_expand(&g).unwrap_err();
        assert!(err.to_string().contains("grammar not acyclic"));
    }
}
