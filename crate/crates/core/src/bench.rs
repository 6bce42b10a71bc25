//! Corpus evaluation: per-object metrics, correlations between them, the
//! divergence table for concatenated binary numerals, and CSV/SVG output.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::codecs::{empirical_entropy, factorize, huffman_length, k_upper_bound, rle_encode, Scheme};
use crate::ensemble::Lcg;
use crate::index::{assembly_index_exact, assembly_index_split_branch, ExactLimits, IndexError};
use crate::object::{basis_of, ObjectString};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("correlation needs at least 3 rows, got {0}")]
    TooFewRows(usize),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum IndexKind {
    Exact,
    SplitBranch,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metrics {
    pub length: usize,
    pub basis_size: usize,
    pub index: usize,
    pub index_kind: IndexKind,
    pub lz77_factors: usize,
    pub lz77_bits: usize,
    pub lz78_factors: usize,
    pub lz78_bits: usize,
    pub lzw_factors: usize,
    pub lzw_bits: usize,
    pub rle_bits: usize,
    pub huffman_bits: usize,
    pub entropy_bits: f64,
    pub k_upper_bound: usize,
}

/// One corpus line. `metrics` is `None` when the line could not be
/// evaluated, and `note` says why (or why the index is only a bound).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsRow {
    pub id: usize,
    pub object: String,
    pub metrics: Option<Metrics>,
    pub note: Option<String>,
}

pub fn object_metrics(x: &ObjectString, limits: ExactLimits) -> (Metrics, Option<String>) {
    let (index, index_kind, note) = if x.len() > limits.max_len {
        (assembly_index_split_branch(x).index, IndexKind::SplitBranch, Some(format!("length {} over exact limit", x.len())))
    } else {
        match assembly_index_exact(x, limits) {
            Ok(r) => (r.index, IndexKind::Exact, None),
            Err(IndexError::Timeout { best_upper_bound, .. }) => {
                (best_upper_bound, IndexKind::SplitBranch, Some("exact search timed out".into()))
            }
            Err(e @ IndexError::TooLong { .. }) => {
                (assembly_index_split_branch(x).index, IndexKind::SplitBranch, Some(e.to_string()))
            }
        }
    };
    let lz77 = factorize(x, Scheme::Lz77);
    let lz78 = factorize(x, Scheme::Lz78);
    let lzw = factorize(x, Scheme::Lzw);
    let m = Metrics {
        length: x.len(),
        basis_size: basis_of(x).len(),
        index,
        index_kind,
        lz77_factors: lz77.factor_count,
        lz77_bits: lz77.bit_length,
        lz78_factors: lz78.factor_count,
        lz78_bits: lz78.bit_length,
        lzw_factors: lzw.factor_count,
        lzw_bits: lzw.bit_length,
        rle_bits: rle_encode(x).summary.size_bits as usize,
        huffman_bits: huffman_length(x).summary.size_bits as usize,
        entropy_bits: empirical_entropy(x).size_bits,
        k_upper_bound: k_upper_bound(x).bits,
    };
    (m, note)
}

/// Evaluates every line in parallel; rows keep input order and failures stay
/// inside their row.
pub fn corpus_metrics(corpus: &[String], limits: ExactLimits) -> Result<Vec<MetricsRow>, BenchError> {
    if corpus.is_empty() {
        return Err(BenchError::EmptyCorpus);
    }
    Ok(corpus
        .par_iter()
        .enumerate()
        .map(|(id, line)| match line.parse::<ObjectString>() {
            Ok(x) => {
                let (m, note) = object_metrics(&x, limits);
                MetricsRow { id, object: line.clone(), metrics: Some(m), note }
            }
            Err(e) => MetricsRow { id, object: line.clone(), metrics: None, note: Some(format!("skipped: {e}")) },
        })
        .collect())
}

/// Non-empty lines of a newline-delimited corpus, trailing whitespace removed.
pub fn parse_corpus(text: &str) -> Vec<String> {
    text.lines().map(str::trim_end).filter(|l| !l.is_empty()).map(String::from).collect()
}

pub const COLUMNS: [&str; 8] = [
    "assembly_index",
    "lz77_factors",
    "lz78_factors",
    "lzw_factors",
    "rle_bits",
    "huffman_bits",
    "entropy_bits",
    "k_upper_bound",
];

fn column_values(m: &Metrics) -> [f64; 8] {
    [
        m.index as f64,
        m.lz77_factors as f64,
        m.lz78_factors as f64,
        m.lzw_factors as f64,
        m.rle_bits as f64,
        m.huffman_bits as f64,
        m.entropy_bits,
        m.k_upper_bound as f64,
    ]
}

/// Pearson and Spearman coefficients for every column pair; `None` marks an
/// undefined coefficient (a constant column).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationMatrix {
    pub columns: Vec<String>,
    pub pearson: Vec<Vec<Option<f64>>>,
    pub spearman: Vec<Vec<Option<f64>>>,
    pub n: usize,
}

impl CorrelationMatrix {
    pub fn spearman_of(&self, a: &str, b: &str) -> Option<f64> {
        let i = self.columns.iter().position(|c| c == a)?;
        let j = self.columns.iter().position(|c| c == b)?;
        self.spearman[i][j]
    }

    pub fn pearson_of(&self, a: &str, b: &str) -> Option<f64> {
        let i = self.columns.iter().position(|c| c == a)?;
        let j = self.columns.iter().position(|c| c == b)?;
        self.pearson[i][j]
    }
}

pub fn correlation(rows: &[MetricsRow]) -> Result<CorrelationMatrix, BenchError> {
    let data: Vec<[f64; 8]> = rows.iter().filter_map(|r| r.metrics.as_ref()).map(column_values).collect();
    let columns: Vec<(String, Vec<f64>)> = COLUMNS
        .iter()
        .enumerate()
        .map(|(j, name)| (name.to_string(), data.iter().map(|r| r[j]).collect()))
        .collect();
    correlate(&columns)
}

/// Correlation matrix over named columns of equal length.
pub fn correlate(columns: &[(String, Vec<f64>)]) -> Result<CorrelationMatrix, BenchError> {
    let n = columns.first().map_or(0, |c| c.1.len());
    if n < 3 {
        return Err(BenchError::TooFewRows(n));
    }
    let ranks: Vec<Vec<f64>> = columns.iter().map(|c| average_ranks(&c.1)).collect();
    let k = columns.len();
    let mut pearson = vec![vec![None; k]; k];
    let mut spearman = vec![vec![None; k]; k];
    for i in 0..k {
        for j in 0..k {
            pearson[i][j] = pearson_r(&columns[i].1, &columns[j].1);
            spearman[i][j] = pearson_r(&ranks[i], &ranks[j]);
        }
    }
    Ok(CorrelationMatrix { columns: columns.iter().map(|c| c.0.clone()).collect(), pearson, spearman, n })
}

pub fn pearson_r(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// 1-based ranks with ties sharing their average rank.
pub fn average_ranks(x: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut ranks = vec![0.0; x.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && x[order[j + 1]] == x[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &o in &order[i..=j] {
            ranks[o] = avg;
        }
        i = j + 1;
    }
    ranks
}

pub fn spearman_rho(x: &[f64], y: &[f64]) -> Option<f64> {
    pearson_r(&average_ranks(x), &average_ranks(y))
}

/// Bits charged for the generator of `s_n` besides the numeral `n` itself.
pub const GENERATOR_BITS: u32 = 64;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DivergenceRow {
    pub n: u64,
    pub length: usize,
    pub lz77_factors: usize,
    pub basis_size: usize,
    /// lz77_factors − |B|, a lower bound on the assembly index.
    pub index_lower_bound: i64,
    pub description_bits: u32,
}

/// `s_n`: the binary numerals of 1..=n, concatenated.
pub fn binary_numerals(n: u64) -> ObjectString {
    let s: String = (1..=n).map(|i| format!("{i:b}")).collect();
    s.parse().expect("n >= 1")
}

/// D(n) = 2⌈log2 n⌉ + [`GENERATOR_BITS`].
pub fn description_bits(n: u64) -> u32 {
    let ceil_log = if n <= 1 { 0 } else { 64 - (n - 1).leading_zeros() };
    2 * ceil_log + GENERATOR_BITS
}

pub fn divergence_row(n: u64) -> DivergenceRow {
    let s = binary_numerals(n);
    let lz77 = factorize(&s, Scheme::Lz77).factor_count;
    let basis = basis_of(&s).len();
    DivergenceRow {
        n,
        length: s.len(),
        lz77_factors: lz77,
        basis_size: basis,
        index_lower_bound: lz77 as i64 - basis as i64,
        description_bits: description_bits(n),
    }
}

/// Rows for n = 1..=n_max.
pub fn divergence_demo(n_max: u64) -> Vec<DivergenceRow> {
    (1..=n_max).into_par_iter().map(divergence_row).collect()
}

/// Seeded corpus of `count` strings with lengths 6..=14 over alphabets of
/// 2..=4 symbols drawn from `ABCD`.
pub fn synthetic_corpus(seed: u64, count: usize) -> Vec<String> {
    let mut rng = Lcg::new(seed);
    (0..count)
        .map(|_| {
            let len = 6 + rng.below(9) as usize;
            let k = 2 + rng.below(3);
            (0..len).map(|_| b"ABCD"[rng.below(k) as usize] as char).collect()
        })
        .collect()
}

pub fn rows_to_csv(rows: &[MetricsRow]) -> Result<String, BenchError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "id",
        "object",
        "length",
        "basis_size",
        "assembly_index",
        "index_kind",
        "lz77_factors",
        "lz77_bits",
        "lz78_factors",
        "lz78_bits",
        "lzw_factors",
        "lzw_bits",
        "rle_bits",
        "huffman_bits",
        "entropy_bits",
        "k_upper_bound",
        "note",
    ])?;
    for r in rows {
        let mut rec = vec![r.id.to_string(), r.object.clone()];
        match &r.metrics {
            Some(m) => rec.extend([
                m.length.to_string(),
                m.basis_size.to_string(),
                m.index.to_string(),
                match m.index_kind {
                    IndexKind::Exact => "exact".to_string(),
                    IndexKind::SplitBranch => "split-branch".to_string(),
                },
                m.lz77_factors.to_string(),
                m.lz77_bits.to_string(),
                m.lz78_factors.to_string(),
                m.lz78_bits.to_string(),
                m.lzw_factors.to_string(),
                m.lzw_bits.to_string(),
                m.rle_bits.to_string(),
                m.huffman_bits.to_string(),
                format!("{:.4}", m.entropy_bits),
                m.k_upper_bound.to_string(),
            ]),
            None => rec.extend(std::iter::repeat_n(String::new(), 14)),
        }
        rec.push(r.note.clone().unwrap_or_default());
        w.write_record(&rec)?;
    }
    Ok(String::from_utf8(w.into_inner().map_err(|e| csv::Error::from(e.into_error()))?).expect("utf8"))
}

/// Scatter panels of the assembly index against every other column.
pub fn scatter_svg(rows: &[MetricsRow], corr: Option<&CorrelationMatrix>) -> String {
    let data: Vec<[f64; 8]> = rows.iter().filter_map(|r| r.metrics.as_ref()).map(column_values).collect();
    let (pw, ph, pad) = (260.0, 200.0, 40.0);
    let cols = 4;
    let panels = COLUMNS.len() - 1;
    let rows_n = panels.div_ceil(cols);
    let width = cols as f64 * (pw + pad) + pad;
    let height = rows_n as f64 * (ph + 2.0 * pad) + pad;
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let range = |j: usize| {
        let lo = data.iter().map(|r| r[j]).fold(f64::INFINITY, f64::min);
        let hi = data.iter().map(|r| r[j]).fold(f64::NEG_INFINITY, f64::max);
        if lo.is_finite() && hi > lo {
            (lo, hi)
        } else {
            (lo.min(0.0), lo.max(0.0) + 1.0)
        }
    };
    let (x0, x1) = range(0);
    for p in 0..panels {
        let j = p + 1;
        let (y0, y1) = range(j);
        let ox = pad + (p % cols) as f64 * (pw + pad);
        let oy = pad + (p / cols) as f64 * (ph + 2.0 * pad);
        let _ = writeln!(svg, r##"<g transform="translate({ox},{oy})">"##);
        let _ = writeln!(svg, r##"<rect width="{pw}" height="{ph}" fill="none" stroke="#444"/>"##);
        for r in &data {
            let cx = (r[0] - x0) / (x1 - x0) * (pw - 10.0) + 5.0;
            let cy = ph - ((r[j] - y0) / (y1 - y0) * (ph - 10.0) + 5.0);
            let _ = writeln!(svg, r##"<circle cx="{cx:.1}" cy="{cy:.1}" r="2" fill="#1f77b4" fill-opacity="0.6"/>"##);
        }
        let rho = corr
            .and_then(|c| c.spearman_of(COLUMNS[0], COLUMNS[j]))
            .map_or("rho undefined".to_string(), |v| format!("rho = {v:.3}"));
        let _ = writeln!(svg, r#"<text x="0" y="-6">{} ({rho})</text>"#, COLUMNS[j]);
        let _ = writeln!(svg, r#"<text x="{}" y="{}" text-anchor="middle">assembly index</text>"#, pw / 2.0, ph + 16.0);
        let _ = writeln!(svg, "</g>");
    }
    svg.push_str("</svg>\n");
    svg
}
