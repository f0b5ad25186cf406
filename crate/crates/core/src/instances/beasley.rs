//! OR-Library `bqp` files.
//!
//! A file holds either one instance (`n nnz` followed by `nnz` lines
//! `i j v`, 1-indexed) or a collection whose first line is the instance
//! count `K`, followed by `K` such blocks. Each unordered pair appears once;
//! it stands for the symmetric matrix `Q̃` with `Q̃ᵢⱼ = Q̃ⱼᵢ = v`, and the
//! problem is `max ⟨x, Q̃x⟩`. We minimize `½⟨x, Qx⟩` with `Q = −2Q̃`.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::linalg::Matrix;

use super::qubo::{QuboInstance, QuboSource};

const BEST_KNOWN_TSV: &str = include_str!("../../data/beasley_best_known.tsv");

/// Directory holding `bqp*.txt`; overrides the bundled `data/beasley`.
pub const CORPUS_ENV: &str = "BINOPT_BEASLEY_DIR";

fn best_known_table() -> &'static BTreeMap<String, f64> {
    static TABLE: OnceLock<BTreeMap<String, f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        BEST_KNOWN_TSV
            .lines()
            .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
            .filter_map(|l| {
                let mut parts = l.split('\t');
                let name = parts.next()?.trim().to_string();
                let value = parts.next()?.trim().parse().ok()?;
                Some((name, value))
            })
            .collect()
    })
}

fn normalize_name(name: &str) -> String {
    name.trim().to_ascii_lowercase().replace(['.', '_'], "-")
}

/// Best known value of `max ⟨x, Q̃x⟩`.
pub fn best_known_max(name: &str) -> Option<f64> {
    best_known_table().get(&normalize_name(name)).copied()
}

pub fn best_known_names() -> Vec<String> {
    best_known_table().keys().cloned().collect()
}

/// The same value in the minimization convention, `−V`.
pub fn best_known_min(name: &str) -> Option<f64> {
    best_known_max(name).map(|v| -v)
}

struct Tokens<'a> {
    lines: std::iter::Enumerate<std::str::Lines<'a>>,
    pending: Vec<&'a str>,
    line: usize,
}

impl<'a> Tokens<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            lines: text.lines().enumerate(),
            pending: Vec::new(),
            line: 0,
        }
    }

    /// The non-empty next line split on whitespace.
    fn next_line(&mut self) -> Option<Vec<&'a str>> {
        if !self.pending.is_empty() {
            return Some(std::mem::take(&mut self.pending));
        }
        for (i, l) in self.lines.by_ref() {
            let t: Vec<&str> = l.split_whitespace().collect();
            if !t.is_empty() {
                self.line = i + 1;
                return Some(t);
            }
        }
        None
    }

    fn err(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            path: None,
            line: self.line,
            message: message.into(),
        }
    }
}

fn parse_num<T: std::str::FromStr>(tok: &Tokens<'_>, s: &str, what: &str) -> Result<T> {
    s.parse().map_err(|_| tok.err(format!("invalid {what} '{s}'")))
}

fn parse_block(tok: &mut Tokens<'_>) -> Result<Matrix> {
    let header = tok.next_line().ok_or_else(|| tok.err("missing 'n nnz' header"))?;
    if header.len() != 2 {
        return Err(tok.err(format!("expected 'n nnz', found {} fields", header.len())));
    }
    let n: usize = parse_num(tok, header[0], "dimension")?;
    let nnz: usize = parse_num(tok, header[1], "entry count")?;
    if n == 0 {
        return Err(tok.err("dimension must be positive"));
    }
    let mut triplets = Vec::with_capacity(2 * nnz);
    for _ in 0..nnz {
        let t = tok
            .next_line()
            .ok_or_else(|| tok.err("file ends before all entries were read"))?;
        if t.len() != 3 {
            return Err(tok.err(format!("expected 'i j v', found {} fields", t.len())));
        }
        let i: usize = parse_num(tok, t[0], "row index")?;
        let j: usize = parse_num(tok, t[1], "column index")?;
        let v: f64 = parse_num(tok, t[2], "value")?;
        if i == 0 || j == 0 || i > n || j > n {
            return Err(tok.err(format!("index ({i}, {j}) outside 1..={n}")));
        }
        let (i, j) = (i - 1, j - 1);
        // Q = −2Q̃ with Q̃ symmetric
        triplets.push((i, j, -2.0 * v));
        if i != j {
            triplets.push((j, i, -2.0 * v));
        }
    }
    Matrix::from_triplets(n, n, &triplets)
}

/// Parses a single instance or a collection into minimization matrices `Q`.
pub fn parse_beasley_str(text: &str) -> Result<Vec<Matrix>> {
    let mut tok = Tokens::new(text);
    let first = tok.next_line().ok_or_else(|| tok.err("empty file"))?;
    let count = match first.len() {
        1 => parse_num(&tok, first[0], "instance count")?,
        2 => {
            tok.pending = first;
            1
        }
        k => return Err(tok.err(format!("unrecognized header with {k} fields"))),
    };
    let out = (0..count).map(|_| parse_block(&mut tok)).collect::<Result<Vec<_>>>()?;
    if tok.next_line().is_some() {
        return Err(tok.err("trailing data after the last instance"));
    }
    Ok(out)
}

/// Loads every instance in `path`. Collections are named `<stem>-<k>`.
pub fn load_beasley(path: &Path) -> Result<Vec<QuboInstance>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::from(e).with_path(path))?;
    let mats = parse_beasley_str(&text).map_err(|e| e.with_path(path))?;
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "bqp".into());
    let single = mats.len() == 1
        && !text
            .trim_start()
            .lines()
            .next()
            .is_some_and(|l| l.split_whitespace().count() == 1);
    Ok(mats
        .into_iter()
        .enumerate()
        .map(|(k, q)| {
            let name = if single {
                normalize_name(&stem)
            } else {
                format!("{}-{}", normalize_name(&stem), k + 1)
            };
            QuboInstance {
                best_known: best_known_min(&name),
                source: QuboSource::Beasley { name },
                q,
            }
        })
        .collect())
}

/// Writes `Q` as a single-instance file holding the upper triangle of `−Q/2`.
pub fn write_beasley(q: &Matrix, mut w: impl Write) -> Result<()> {
    if !q.is_symmetric() {
        return Err(Error::Domain("only symmetric matrices can be exported".into()));
    }
    let entries: Vec<(usize, usize, f64)> = q
        .triplets()
        .into_iter()
        .filter(|(i, j, _)| i <= j)
        .map(|(i, j, v)| (i, j, -v / 2.0))
        .collect();
    writeln!(w, "{} {}", q.rows(), entries.len())?;
    for (i, j, v) in entries {
        writeln!(w, "{} {} {}", i + 1, j + 1, v)?;
    }
    Ok(())
}

/// `$BINOPT_BEASLEY_DIR`, else the crate's `data/beasley` when present.
pub fn corpus_dir() -> Option<PathBuf> {
    if let Some(dir) = std::env::var_os(CORPUS_ENV) {
        return Some(PathBuf::from(dir));
    }
    let bundled = Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join("beasley");
    bundled.is_dir().then_some(bundled)
}

/// Finds `name` (e.g. `bqp100-3`) in the corpus, either as its own file or
/// inside the collection file `bqp100.txt`.
pub fn load_named(name: &str) -> Result<QuboInstance> {
    let dir = corpus_dir().ok_or_else(|| {
        Error::Instance(format!(
            "no Beasley corpus found; set {CORPUS_ENV} to a directory of bqp files"
        ))
    })?;
    let name = normalize_name(name);
    for candidate in [format!("{name}.txt"), name.clone()] {
        let p = dir.join(&candidate);
        if p.is_file() {
            let mut v = load_beasley(&p)?;
            if v.len() == 1 {
                let mut inst = v.remove(0);
                inst.source = QuboSource::Beasley { name: name.clone() };
                inst.best_known = best_known_min(&name);
                return Ok(inst);
            }
        }
    }
    if let Some((set, idx)) = name.rsplit_once('-') {
        let p = dir.join(format!("{set}.txt"));
        if p.is_file() {
            let k: usize = idx
                .parse()
                .map_err(|_| Error::Instance(format!("bad instance index in '{name}'")))?;
            let all = load_beasley(&p)?;
            let count = all.len();
            return all
                .into_iter()
                .nth(k.wrapping_sub(1))
                .ok_or_else(|| Error::Instance(format!("{} holds {count} instances, asked for #{k}", p.display())));
        }
    }
    Err(Error::Instance(format!(
        "instance '{name}' not found under {}",
        dir.display()
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_instance_sign_convention() {
        let q = &parse_beasley_str("2 2\n1 1 3\n1 2 -5\n").unwrap()[0];
        assert_eq!(q.get(0, 0), -6.0);
        assert_eq!(q.get(0, 1), 10.0);
        assert_eq!(q.get(1, 0), 10.0);
        // ½⟨x,Qx⟩ = −⟨x,Q̃x⟩ at x = (1,1): −(3 − 10) = 7
        let obj = crate::objectives::QuboObjective::new(q.clone()).unwrap();
        use crate::objectives::Objective;
        assert_eq!(obj.value(&[1.0, 1.0]), 7.0);
    }

    #[test]
    fn collection_format() {
        let text = "2\n2 1\n1 2 4\n3 1\n3 3 -1\n";
        let all = parse_beasley_str(text).unwrap();
        assert_eq!(all.len(), 2);
        assert_eq!(all[1].rows(), 3);
        assert_eq!(all[1].get(2, 2), 2.0);
    }

    #[test]
    fn malformed_line_reports_position() {
        match parse_beasley_str("2 2\n1 1 3\n1 x 4\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_beasley_str("2 1\n3 1 1\n").is_err());
        assert!(parse_beasley_str("2 2\n1 1 1\n").is_err());
    }

    #[test]
    fn round_trip() {
        let q = &parse_beasley_str("3 3\n1 1 3\n1 3 -5\n2 3 7\n").unwrap()[0];
        let mut buf = Vec::new();
        write_beasley(q, &mut buf).unwrap();
        let back = &parse_beasley_str(std::str::from_utf8(&buf).unwrap()).unwrap()[0];
        assert_eq!(back, q);
    }

    #[test]
    fn sidecar_values() {
        assert_eq!(best_known_max("bqp100-1"), Some(7970.0));
        assert_eq!(best_known_min("bqp500.10"), Some(-130619.0));
        assert_eq!(best_known_names().len(), 30);
        assert_eq!(best_known_max("bqp999-1"), None);
    }
}
