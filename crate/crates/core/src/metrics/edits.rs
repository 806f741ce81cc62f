use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Replace `source[start..end]` with `replacement`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edit {
    pub start: usize,
    pub end: usize,
    pub replacement: Vec<String>,
}

impl Edit {
    pub fn new(start: usize, end: usize, replacement: &[&str]) -> Self {
        Edit { start, end, replacement: replacement.iter().map(|s| (*s).to_owned()).collect() }
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Op {
    Keep,
    Substitute,
    Delete,
    Insert,
}

/// Edits from a minimal-cost Levenshtein alignment, with adjacent changes
/// merged into one edit.
pub fn extract_edits<S: AsRef<str>, H: AsRef<str>>(source: &[S], hypothesis: &[H]) -> Vec<Edit> {
    let (n, m) = (source.len(), hypothesis.len());
    let same = |i: usize, j: usize| source[i].as_ref() == hypothesis[j].as_ref();
    let width = m + 1;
    let mut d = vec![0usize; (n + 1) * width];
    for j in 0..=m {
        d[j] = j;
    }
    for i in 1..=n {
        d[i * width] = i;
        for j in 1..=m {
            let diag = d[(i - 1) * width + j - 1] + usize::from(!same(i - 1, j - 1));
            let up = d[(i - 1) * width + j] + 1;
            let left = d[i * width + j - 1] + 1;
            d[i * width + j] = diag.min(up).min(left);
        }
    }
    let mut ops = Vec::with_capacity(n.max(m));
    let (mut i, mut j) = (n, m);
    while i > 0 || j > 0 {
        let here = d[i * width + j];
        if i > 0 && j > 0 && same(i - 1, j - 1) && here == d[(i - 1) * width + j - 1] {
            ops.push(Op::Keep);
            i -= 1;
            j -= 1;
        } else if i > 0 && j > 0 && here == d[(i - 1) * width + j - 1] + 1 {
            ops.push(Op::Substitute);
            i -= 1;
            j -= 1;
        } else if i > 0 && here == d[(i - 1) * width + j] + 1 {
            ops.push(Op::Delete);
            i -= 1;
        } else {
            ops.push(Op::Insert);
            j -= 1;
        }
    }
    ops.reverse();

    let mut edits = Vec::new();
    let (mut i, mut j) = (0, 0);
    let mut open: Option<Edit> = None;
    for op in ops {
        if op == Op::Keep {
            edits.extend(open.take());
            i += 1;
            j += 1;
            continue;
        }
        let edit = open.get_or_insert_with(|| Edit { start: i, end: i, replacement: Vec::new() });
        if matches!(op, Op::Substitute | Op::Delete) {
            i += 1;
            edit.end = i;
        }
        if matches!(op, Op::Substitute | Op::Insert) {
            edit.replacement.push(hypothesis[j].as_ref().to_owned());
            j += 1;
        }
    }
    edits.extend(open);
    edits
}

/// Applies non-overlapping edits to `source`.
pub fn apply_edits<S: AsRef<str>>(source: &[S], edits: &[Edit]) -> Result<Vec<String>> {
    let mut sorted: Vec<&Edit> = edits.iter().collect();
    sorted.sort_by_key(|e| (e.start, e.end));
    let mut out = Vec::with_capacity(source.len());
    let mut pos = 0;
    for e in sorted {
        if e.start < pos || e.end < e.start || e.end > source.len() {
            return Err(Error::invalid(format!("edit {}..{} overlaps or is out of range", e.start, e.end)));
        }
        out.extend(source[pos..e.start].iter().map(|s| s.as_ref().to_owned()));
        out.extend(e.replacement.iter().cloned());
        pos = e.end;
    }
    out.extend(source[pos..].iter().map(|s| s.as_ref().to_owned()));
    Ok(out)
}
