//! Test-only oracles, independent of the library's search paths.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet};

/// Minimum number of binary joins that builds `x` from its symbols, by
/// breadth-first search over the sets of already-built substrings.
pub fn bfs_assembly_index(x: &str) -> usize {
    let x = x.as_bytes();
    if x.len() == 1 {
        return 0;
    }
    let units: BTreeSet<Vec<u8>> = x.iter().map(|&b| vec![b]).collect();
    let is_sub = |w: &[u8]| x.windows(w.len()).any(|v| v == w);
    let mut frontier: HashSet<BTreeSet<Vec<u8>>> = HashSet::new();
    frontier.insert(BTreeSet::new());
    let mut steps = 0;
    loop {
        steps += 1;
        let mut next = HashSet::new();
        for built in &frontier {
            let pool: Vec<&Vec<u8>> = units.iter().chain(built.iter()).collect();
            for a in &pool {
                for b in &pool {
                    if a.len() + b.len() > x.len() {
                        continue;
                    }
                    let mut joined = (*a).clone();
                    joined.extend_from_slice(b);
                    if joined == x {
                        return steps;
                    }
                    if built.contains(&joined) || !is_sub(&joined) {
                        continue;
                    }
                    let mut s = built.clone();
                    s.insert(joined);
                    next.insert(s);
                }
            }
        }
        frontier = next;
    }
}

/// All strings over `alphabet` with lengths in `1..=max_len`.
pub fn all_strings(alphabet: &[u8], max_len: usize) -> Vec<String> {
    let mut out = Vec::new();
    let mut layer = vec![String::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for s in &layer {
            for &c in alphabet {
                let mut t = s.clone();
                t.push(c as char);
                next.push(t);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}
