use std::collections::BTreeMap;
use std::io::BufRead;

use crate::error::{Error, Result};

/// A gold edit with one or more acceptable corrections.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoldEdit {
    pub start: usize,
    pub end: usize,
    pub corrections: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct M2Sentence {
    pub source: Vec<String>,
    /// Edits keyed by annotator id. An annotator that marked the sentence
    /// correct has an empty list.
    pub annotators: BTreeMap<usize, Vec<GoldEdit>>,
}

impl M2Sentence {
    /// Gold edits in annotator order, the shape `score_edits` takes.
    pub fn gold(&self) -> Vec<Vec<GoldEdit>> {
        self.annotators.values().cloned().collect()
    }
}

const NONE: &str = "-NONE-";

fn parse_annotation(body: &str, line_no: usize) -> Result<(usize, Option<GoldEdit>)> {
    let bad = |what: &str| Error::invalid(format!("m2 line {line_no}: {what}"));
    let fields: Vec<&str> = body.split("|||").collect();
    if fields.len() < 3 {
        return Err(bad("expected at least three |||-separated fields"));
    }
    let annotator = match fields.last() {
        Some(id) if fields.len() >= 6 => id.trim().parse().map_err(|_| bad("bad annotator id"))?,
        _ => 0,
    };
    let kind = fields[1].trim();
    let mut span = fields[0].split_whitespace();
    let (Some(start), Some(end), None) = (span.next(), span.next(), span.next()) else {
        return Err(bad("expected 'start end'"));
    };
    if kind.eq_ignore_ascii_case("noop") || start == "-1" {
        return Ok((annotator, None));
    }
    let start: usize = start.parse().map_err(|_| bad("bad span start"))?;
    let end: usize = end.parse().map_err(|_| bad("bad span end"))?;
    if end < start {
        return Err(bad("span end before start"));
    }
    let corrections = fields[2]
        .split("||")
        .map(|c| {
            let c = c.trim();
            if c == NONE {
                Vec::new()
            } else {
                c.split_whitespace().map(str::to_owned).collect()
            }
        })
        .collect();
    Ok((annotator, Some(GoldEdit { start, end, corrections })))
}

pub fn read_m2(reader: impl BufRead) -> Result<Vec<M2Sentence>> {
    let mut out = Vec::new();
    let mut current: Option<M2Sentence> = None;
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim_end_matches('\r');
        if let Some(rest) = line.strip_prefix("S ").or(if line == "S" { Some("") } else { None }) {
            out.extend(current.take());
            current = Some(M2Sentence {
                source: rest.split_whitespace().map(str::to_owned).collect(),
                annotators: BTreeMap::new(),
            });
        } else if let Some(rest) = line.strip_prefix("A ") {
            let sentence = current
                .as_mut()
                .ok_or_else(|| Error::invalid(format!("m2 line {}: annotation before any sentence", i + 1)))?;
            let (annotator, edit) = parse_annotation(rest, i + 1)?;
            let edits = sentence.annotators.entry(annotator).or_default();
            if let Some(e) = edit {
                if e.end > sentence.source.len() {
                    return Err(Error::invalid(format!("m2 line {}: span beyond sentence", i + 1)));
                }
                edits.push(e);
            }
        } else if line.trim().is_empty() {
            out.extend(current.take());
        } else {
            return Err(Error::invalid(format!("m2 line {}: unrecognised line", i + 1)));
        }
    }
    out.extend(current);
    Ok(out)
}

pub fn parse_m2(text: &str) -> Result<Vec<M2Sentence>> {
    read_m2(text.as_bytes())
}
