//! Token-level LCS alignment.
//!
//! Common prefixes and suffixes are stripped first. Small remaining cores
//! are solved with a suffix-LCS table and a tie-break that only looks at the
//! two tokens in question, which makes the alignment symmetric under
//! swapping the inputs. Large cores use linear-space Myers divide and
//! conquer.

use std::collections::HashMap;
use std::ops::{Index, IndexMut, Range};

/// Cores with more cells than this use the Myers path.
const TABLE_CELL_LIMIT: usize = 1 << 22;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpanKind {
    Matched,
    Unmatched,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlignmentSpan {
    pub kind: SpanKind,
    pub old: Range<usize>,
    pub new: Range<usize>,
}

impl AlignmentSpan {
    pub fn is_matched(&self) -> bool {
        self.kind == SpanKind::Matched
    }
}

/// Tiles `old` and `new` into alternating matched and unmatched spans.
pub fn align<T: AsRef<str>>(old: &[T], new: &[T]) -> Vec<AlignmentSpan> {
    let (a, b) = intern(old, new);
    let pairs = matched_pairs(&a, &b, |x, y| old[x].as_ref().cmp(new[y].as_ref()));
    spans_from_pairs(&pairs, a.len(), b.len())
}

fn intern<T: AsRef<str>>(old: &[T], new: &[T]) -> (Vec<u32>, Vec<u32>) {
    let mut ids: HashMap<&str, u32> = HashMap::new();
    let mut a = Vec::with_capacity(old.len());
    for t in old {
        let next = ids.len() as u32;
        a.push(*ids.entry(t.as_ref()).or_insert(next));
    }
    let mut b = Vec::with_capacity(new.len());
    for t in new {
        let next = ids.len() as u32;
        b.push(*ids.entry(t.as_ref()).or_insert(next));
    }
    (a, b)
}

/// Matched index pairs `(i, j)` with `old[i] == new[j]`, increasing in both.
fn matched_pairs(a: &[u32], b: &[u32], order: impl Fn(usize, usize) -> std::cmp::Ordering) -> Vec<(usize, usize)> {
    let prefix = a.iter().zip(b).take_while(|(x, y)| x == y).count();
    let suffix = a[prefix..].iter().rev().zip(b[prefix..].iter().rev()).take_while(|(x, y)| x == y).count();
    let core_a = &a[prefix..a.len() - suffix];
    let core_b = &b[prefix..b.len() - suffix];

    let mut pairs: Vec<(usize, usize)> = (0..prefix).map(|i| (i, i)).collect();
    let cells = (core_a.len() + 1).saturating_mul(core_b.len() + 1);
    if cells <= TABLE_CELL_LIMIT {
        table_lcs(core_a, core_b, prefix, prefix, &order, &mut pairs);
    } else {
        myers_lcs(core_a, core_b, prefix, prefix, &mut pairs);
    }
    let (tail_a, tail_b) = (a.len() - suffix, b.len() - suffix);
    pairs.extend((0..suffix).map(|k| (tail_a + k, tail_b + k)));
    pairs
}

fn table_lcs(
    a: &[u32],
    b: &[u32],
    off_a: usize,
    off_b: usize,
    order: &impl Fn(usize, usize) -> std::cmp::Ordering,
    out: &mut Vec<(usize, usize)>,
) {
    let (n, m) = (a.len(), b.len());
    if n == 0 || m == 0 {
        return;
    }
    let w = m + 1;
    // lcs[i * w + j] = LCS length of a[i..] and b[j..]
    let mut lcs = vec![0u32; (n + 1) * w];
    for i in (0..n).rev() {
        for j in (0..m).rev() {
            lcs[i * w + j] =
                if a[i] == b[j] { lcs[(i + 1) * w + j + 1] + 1 } else { lcs[(i + 1) * w + j].max(lcs[i * w + j + 1]) };
        }
    }
    let (mut i, mut j) = (0, 0);
    while i < n && j < m {
        if a[i] == b[j] {
            out.push((off_a + i, off_b + j));
            i += 1;
            j += 1;
            continue;
        }
        let skip_old = lcs[(i + 1) * w + j];
        let skip_new = lcs[i * w + j + 1];
        let advance_old = match skip_old.cmp(&skip_new) {
            std::cmp::Ordering::Greater => true,
            std::cmp::Ordering::Less => false,
            // Tie: skip the lexicographically smaller token. Swapping the
            // inputs swaps the sides but not the comparison outcome.
            std::cmp::Ordering::Equal => order(off_a + i, off_b + j).is_lt(),
        };
        if advance_old {
            i += 1;
        } else {
            j += 1;
        }
    }
}

/// Diagonal-indexed furthest-reaching array.
struct V {
    offset: isize,
    v: Vec<isize>,
}

impl V {
    fn new(max_d: usize) -> Self {
        V { offset: max_d as isize + 1, v: vec![0; 2 * max_d + 3] }
    }
}

impl Index<isize> for V {
    type Output = isize;
    fn index(&self, k: isize) -> &isize {
        &self.v[(k + self.offset) as usize]
    }
}

impl IndexMut<isize> for V {
    fn index_mut(&mut self, k: isize) -> &mut isize {
        &mut self.v[(k + self.offset) as usize]
    }
}

fn myers_lcs(a: &[u32], b: &[u32], off_a: usize, off_b: usize, out: &mut Vec<(usize, usize)>) {
    let max_d = (a.len() + b.len()).div_ceil(2) + 1;
    let mut vf = V::new(max_d);
    let mut vb = V::new(max_d);
    conquer(a, off_a, b, off_b, &mut vf, &mut vb, out);
}

fn conquer(a: &[u32], off_a: usize, b: &[u32], off_b: usize, vf: &mut V, vb: &mut V, out: &mut Vec<(usize, usize)>) {
    let prefix = a.iter().zip(b).take_while(|(x, y)| x == y).count();
    out.extend((0..prefix).map(|k| (off_a + k, off_b + k)));
    let (a, b) = (&a[prefix..], &b[prefix..]);
    let (off_a, off_b) = (off_a + prefix, off_b + prefix);
    let suffix = a.iter().rev().zip(b.iter().rev()).take_while(|(x, y)| x == y).count();
    let (core_a, core_b) = (&a[..a.len() - suffix], &b[..b.len() - suffix]);

    if !core_a.is_empty() && !core_b.is_empty() {
        if let Some((x, y)) = middle_snake(core_a, core_b, vf, vb) {
            conquer(&core_a[..x], off_a, &core_b[..y], off_b, vf, vb, out);
            conquer(&core_a[x..], off_a + x, &core_b[y..], off_b + y, vf, vb, out);
        }
    }
    let (tail_a, tail_b) = (off_a + core_a.len(), off_b + core_b.len());
    out.extend((0..suffix).map(|k| (tail_a + k, tail_b + k)));
}

fn middle_snake(a: &[u32], b: &[u32], vf: &mut V, vb: &mut V) -> Option<(usize, usize)> {
    let n = a.len() as isize;
    let m = b.len() as isize;
    let delta = n - m;
    let odd = delta & 1 == 1;
    vf[1] = 0;
    vb[1] = 0;
    let d_max = (n + m + 1) / 2 + 1;
    for d in 0..d_max {
        let mut k = d;
        while k >= -d {
            let mut x = if k == -d || (k != d && vf[k - 1] < vf[k + 1]) { vf[k + 1] } else { vf[k - 1] + 1 };
            let mut y = x - k;
            let (x0, y0) = (x, y);
            while x < n && y < m && a[x as usize] == b[y as usize] {
                x += 1;
                y += 1;
            }
            vf[k] = x;
            if odd && (k - delta).abs() < d && vf[k] + vb[-(k - delta)] >= n {
                return Some((x0 as usize, y0 as usize));
            }
            k -= 2;
        }
        let mut k = d;
        while k >= -d {
            let mut x = if k == -d || (k != d && vb[k - 1] < vb[k + 1]) { vb[k + 1] } else { vb[k - 1] + 1 };
            let mut y = x - k;
            while x < n && y < m && a[(n - x - 1) as usize] == b[(m - y - 1) as usize] {
                x += 1;
                y += 1;
            }
            vb[k] = x;
            if !odd && (k - delta).abs() <= d && vb[k] + vf[-(k - delta)] >= n {
                return Some(((n - x) as usize, (m - y) as usize));
            }
            k -= 2;
        }
    }
    None
}

fn spans_from_pairs(pairs: &[(usize, usize)], n: usize, m: usize) -> Vec<AlignmentSpan> {
    let mut spans = Vec::new();
    let (mut i, mut j) = (0, 0);
    let mut k = 0;
    while k < pairs.len() {
        let (pi, pj) = pairs[k];
        if pi > i || pj > j {
            spans.push(AlignmentSpan { kind: SpanKind::Unmatched, old: i..pi, new: j..pj });
        }
        let mut len = 1;
        while k + len < pairs.len() && pairs[k + len] == (pi + len, pj + len) {
            len += 1;
        }
        spans.push(AlignmentSpan { kind: SpanKind::Matched, old: pi..pi + len, new: pj..pj + len });
        i = pi + len;
        j = pj + len;
        k += len;
    }
    if i < n || j < m {
        spans.push(AlignmentSpan { kind: SpanKind::Unmatched, old: i..n, new: j..m });
    }
    spans
}
