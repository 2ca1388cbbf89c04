//! Plain-text formats.
//!
//! A matrix record is a header `n <dim>` followed by `dim` rows of `dim`
//! whitespace-separated entries (integers, `p/q` or finite decimals).
//! Text after `#` is a comment. A records file holds several matrices, each
//! normally preceded by a `# index i` line and separated by blank lines.

use std::fmt::Write as _;
use std::str::FromStr;

use crate::bistoch::BistochMatrix;
use crate::exactalg::{ExactMatrix, Perm, Rational};
use crate::{Error, Result};

/// Largest dimension accepted by the parsers.
pub const MAX_DIM: usize = 512;

const APPENDIX_A: &str = include_str!("../data/appendix_a.txt");

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Record {
    /// Value of a preceding `# index i` comment, if any.
    pub index: Option<usize>,
    pub matrix: ExactMatrix,
}

/// Parses every record in `text`.
pub fn parse_records(text: &str) -> Result<Vec<Record>> {
    let mut out = Vec::new();
    let mut pending_index = None;
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    while let Some((lineno, raw)) = lines.next() {
        let (content, comment) = split_comment(raw);
        if let Some(c) = comment {
            if let Some(idx) = c.trim().strip_prefix("index") {
                let idx = idx.trim();
                pending_index =
                    Some(idx.parse().map_err(|_| Error::parse(lineno, format!("bad record index `{idx}`")))?);
            }
        }
        if content.is_empty() {
            continue;
        }
        let dim = parse_header(lineno, content)?;
        let mut entries = Vec::with_capacity(dim * dim);
        let mut last = lineno;
        while entries.len() < dim * dim {
            let Some((lineno, raw)) = lines.next() else {
                return Err(Error::parse(last, format!("expected {dim} rows, input ended")));
            };
            last = lineno;
            let content = split_comment(raw).0;
            if content.is_empty() {
                continue;
            }
            let before = entries.len();
            for tok in content.split_whitespace() {
                let v = Rational::from_str(tok).map_err(|_| Error::parse(lineno, format!("bad entry `{tok}`")))?;
                entries.push(v);
            }
            if entries.len() - before != dim {
                return Err(Error::parse(lineno, format!("expected {dim} entries, found {}", entries.len() - before)));
            }
        }
        let matrix = ExactMatrix::from_entries(dim, dim, entries)?;
        out.push(Record { index: pending_index.take(), matrix });
    }
    Ok(out)
}

/// Parses exactly one matrix record.
pub fn parse_matrix(text: &str) -> Result<ExactMatrix> {
    let mut records = parse_records(text)?;
    match records.len() {
        1 => Ok(records.pop().unwrap().matrix),
        0 => Err(Error::parse(1, "no matrix found")),
        k => Err(Error::parse(1, format!("expected one matrix, found {k}"))),
    }
}

fn split_comment(line: &str) -> (&str, Option<&str>) {
    match line.split_once('#') {
        Some((c, rest)) => (c.trim(), Some(rest)),
        None => (line.trim(), None),
    }
}

fn parse_header(lineno: usize, content: &str) -> Result<usize> {
    let mut toks = content.split_whitespace();
    let (Some("n"), Some(d), None) = (toks.next(), toks.next(), toks.next()) else {
        return Err(Error::parse(lineno, format!("expected header `n <dim>`, found `{content}`")));
    };
    let dim: usize = d.parse().map_err(|_| Error::parse(lineno, format!("bad dimension `{d}`")))?;
    if dim == 0 || dim > MAX_DIM {
        return Err(Error::parse(lineno, format!("dimension {dim} outside 1..={MAX_DIM}")));
    }
    Ok(dim)
}

/// Writes one record; `parse_matrix(&write_matrix(m)) == m`.
pub fn write_matrix(m: &ExactMatrix) -> String {
    let mut s = String::new();
    writeln!(s, "n {}", m.rows()).unwrap();
    for i in 0..m.rows() {
        let row: Vec<String> = m.row(i).iter().map(Rational::to_string).collect();
        writeln!(s, "{}", row.join(" ")).unwrap();
    }
    s
}

/// Writes indexed records (1-based), separated by blank lines.
pub fn write_records<'a>(ms: impl IntoIterator<Item = &'a ExactMatrix>) -> String {
    ms.into_iter()
        .enumerate()
        .map(|(i, m)| format!("# index {}\n{}", i + 1, write_matrix(m)))
        .collect::<Vec<_>>()
        .join("\n")
}

/// Permutation in 1-indexed one-line notation, e.g. `2 3 1` or `2,3,1`.
pub fn parse_perm(text: &str) -> Result<Perm> {
    if text.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty()).count() > MAX_DIM {
        return Err(Error::parse(1, format!("permutation longer than {MAX_DIM}")));
    }
    Perm::from_str(text)
}

pub fn parse_rational(text: &str) -> Result<Rational> {
    Rational::from_str(text.trim()).map_err(|e| Error::parse(1, e.to_string()))
}

/// Kernel selector for the discretisation checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelSpec {
    Uniform,
    /// `1 + eps·cos(2πx)·cos(2πy)`, requires `|eps| <= 1`.
    Cosine(f64),
    /// Random step kernel drawn from the given seed.
    Random(u64),
}

impl FromStr for KernelSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = |msg: String| Error::parse(1, msg);
        match s.split_once(':') {
            None if s == "uniform" => Ok(KernelSpec::Uniform),
            Some(("cosine", eps)) => {
                let eps: f64 = eps.parse().map_err(|_| bad(format!("bad cosine amplitude `{eps}`")))?;
                if !eps.is_finite() || eps.abs() > 1.0 {
                    return Err(bad(format!("cosine amplitude {eps} outside [-1, 1]")));
                }
                Ok(KernelSpec::Cosine(eps))
            }
            Some(("random", seed)) => {
                Ok(KernelSpec::Random(seed.parse().map_err(|_| bad(format!("bad seed `{seed}`")))?))
            }
            _ => Err(bad(format!("unknown kernel `{s}` (expected uniform, cosine:EPS or random:SEED)"))),
        }
    }
}

impl std::fmt::Display for KernelSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            KernelSpec::Uniform => f.write_str("uniform"),
            KernelSpec::Cosine(e) => write!(f, "cosine:{e}"),
            KernelSpec::Random(s) => write!(f, "random:{s}"),
        }
    }
}

pub fn parse_kernel_spec(text: &str) -> Result<KernelSpec> {
    text.parse()
}

/// `x` with 15 significant digits, trailing zeros trimmed.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".into() } else { x.to_string() };
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..15).contains(&exp) {
        let decimals = (14 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        format!("{x:.14e}")
    }
}

/// Float matrix as whitespace-separated rows with 15 significant digits.
pub fn write_float_matrix(rows: &[Vec<f64>]) -> String {
    let mut s = String::new();
    writeln!(s, "n {}", rows.len()).unwrap();
    for r in rows {
        let cells: Vec<String> = r.iter().map(|&x| fmt_sig(x)).collect();
        writeln!(s, "{}", cells.join(" ")).unwrap();
    }
    s
}

/// Sparse `i j value` lines, indices written as given.
pub fn write_triplets<'a>(cells: impl IntoIterator<Item = (usize, usize, &'a Rational)>) -> String {
    let mut s = String::new();
    for (i, j, v) in cells {
        writeln!(s, "{i} {j} {v}").unwrap();
    }
    s
}

/// The bundled catalogue of the 41 classes of 4×4 Erdős matrices.
pub fn appendix_text() -> &'static str {
    APPENDIX_A
}

pub fn appendix_a() -> Vec<BistochMatrix> {
    parse_records(APPENDIX_A)
        .expect("bundled dataset parses")
        .into_iter()
        .map(|r| BistochMatrix::new(r.matrix).expect("bundled dataset is bistochastic"))
        .collect()
}
