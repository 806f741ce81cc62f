//! Wikitext to plain text.
//!
//! This is a scanner, not a parser: it drops templates, tables, references,
//! comments, HTML tags and file/category links, replaces internal and
//! external links by their visible text, and flattens headings and list
//! markers. Unterminated constructs are dropped to the end of the input.

const DROP_CONTENT_TAGS: &[&str] = &[
    "ref",
    "references",
    "math",
    "gallery",
    "timeline",
    "syntaxhighlight",
    "source",
    "score",
    "imagemap",
    "chem",
    "ce",
    "templatedata",
    "graph",
    "mapframe",
    "hiero",
];

const DROPPED_LINK_NAMESPACES: &[&str] = &["file", "image", "media", "category"];

const URL_SCHEMES: &[&str] = &["http://", "https://", "ftp://", "//", "mailto:", "irc://", "news:"];

pub fn extract_text(wikitext: &str) -> String {
    let mut stripped = String::with_capacity(wikitext.len());
    strip_inline(wikitext, &mut stripped);

    let mut out = String::with_capacity(stripped.len());
    for line in stripped.lines() {
        let line = flatten_line(line);
        if line.is_empty() {
            continue;
        }
        if !out.is_empty() {
            out.push('\n');
        }
        out.push_str(&line);
    }
    out
}

fn flatten_line(line: &str) -> String {
    let mut line = line.trim();
    if !line.is_empty() && line.chars().all(|c| c == '-') && line.len() >= 4 {
        return String::new();
    }
    if line.len() >= 2 && line.starts_with('=') && line.ends_with('=') {
        line = line.trim_matches('=');
    }
    line = line.trim_start_matches(['*', '#', ':', ';']);
    let mut out = String::with_capacity(line.len());
    for word in line.split_whitespace() {
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(word);
    }
    out
}

fn at_line_start(s: &str, i: usize) -> bool {
    s[..i].chars().rev().take_while(|&c| c != '\n').all(|c| c == ' ' || c == '\t')
}

fn strip_inline(s: &str, out: &mut String) {
    let mut i = 0;
    while i < s.len() {
        let rest = &s[i..];
        if rest.starts_with("<!--") {
            i = match rest.find("-->") {
                Some(end) => i + end + 3,
                None => s.len(),
            };
        } else if rest.starts_with("{{") {
            i = skip_balanced(s, i, "{{", "}}");
        } else if rest.starts_with("{|") && at_line_start(s, i) {
            i = skip_balanced(s, i, "{|", "|}");
        } else if rest.starts_with("[[") {
            let end = skip_balanced(s, i, "[[", "]]");
            if end <= s.len() && s[..end].ends_with("]]") && end >= i + 4 {
                render_link(&s[i + 2..end - 2], out);
            }
            i = end;
        } else if rest.starts_with('[') && URL_SCHEMES.iter().any(|p| rest[1..].starts_with(p)) {
            match rest.find(']') {
                Some(close) => {
                    let inner = &rest[1..close];
                    if let Some((_, label)) = inner.split_once(' ') {
                        strip_inline(label, out);
                    }
                    i += close + 1;
                }
                None => {
                    out.push('[');
                    i += 1;
                }
            }
        } else if rest.starts_with('<') {
            i = handle_tag(s, i, out);
        } else if rest.starts_with("''") {
            i += rest.len() - rest.trim_start_matches('\'').len();
        } else if rest.starts_with("__") {
            let magic =
                rest[2..].find("__").filter(|&e| e > 0 && rest[2..2 + e].chars().all(|c| c.is_ascii_uppercase()));
            match magic {
                Some(e) => i += e + 4,
                None => {
                    out.push('_');
                    i += 1;
                }
            }
        } else if rest.starts_with('&') {
            match decode_entity(rest) {
                Some((decoded, len)) => {
                    out.push_str(decoded);
                    i += len;
                }
                None => {
                    out.push('&');
                    i += 1;
                }
            }
        } else {
            let c = rest.chars().next().expect("non-empty");
            out.push(c);
            i += c.len_utf8();
        }
    }
}

/// Returns the index just past the construct opened at `start`, honouring
/// nesting. Unterminated constructs extend to the end of `s`.
fn skip_balanced(s: &str, start: usize, open: &str, close: &str) -> usize {
    let mut depth = 0usize;
    let mut i = start;
    while i < s.len() {
        let rest = &s[i..];
        if rest.starts_with(open) {
            depth += 1;
            i += open.len();
        } else if rest.starts_with(close) {
            depth -= 1;
            i += close.len();
            if depth == 0 {
                return i;
            }
        } else {
            i += rest.chars().next().map_or(1, char::len_utf8);
        }
    }
    s.len()
}

fn render_link(inner: &str, out: &mut String) {
    let (target, anchor) = match inner.split_once('|') {
        Some((t, a)) => (t, Some(a)),
        None => (inner, None),
    };
    let target = target.trim().trim_start_matches(':');
    if let Some((ns, _)) = target.split_once(':') {
        let ns = ns.trim().to_ascii_lowercase();
        if DROPPED_LINK_NAMESPACES.contains(&ns.as_str()) {
            return;
        }
    }
    match anchor {
        Some(a) => strip_inline(a, out),
        None => strip_inline(target.split('#').next().unwrap_or(target), out),
    }
}

struct Tag<'a> {
    name: &'a str,
    closing: bool,
    self_closing: bool,
    len: usize,
}

fn parse_tag(rest: &str) -> Option<Tag<'_>> {
    let body_end = rest.find('>')?;
    let body = &rest[1..body_end];
    let (closing, body) = match body.strip_prefix('/') {
        Some(b) => (true, b),
        None => (false, body),
    };
    let name_len = body.find(|c: char| !c.is_ascii_alphanumeric()).unwrap_or(body.len());
    let name = &body[..name_len];
    if name.is_empty() || !name.starts_with(|c: char| c.is_ascii_alphabetic()) {
        return None;
    }
    let after = &body[name_len..];
    if !after.is_empty() && !after.starts_with(|c: char| c.is_whitespace() || c == '/') {
        return None;
    }
    Some(Tag { name, closing, self_closing: body.trim_end().ends_with('/'), len: body_end + 1 })
}

fn handle_tag(s: &str, i: usize, out: &mut String) -> usize {
    let rest = &s[i..];
    let Some(tag) = parse_tag(rest) else {
        out.push('<');
        return i + 1;
    };
    let name = tag.name.to_ascii_lowercase();
    let mut next = i + tag.len;
    if DROP_CONTENT_TAGS.contains(&name.as_str()) && !tag.closing && !tag.self_closing {
        let lower = s[next..].to_ascii_lowercase();
        let close = format!("</{name}");
        next = match lower.find(&close) {
            Some(pos) => {
                let after = next + pos;
                s[after..].find('>').map_or(s.len(), |gt| after + gt + 1)
            }
            None => s.len(),
        };
    } else if name == "br" {
        out.push(' ');
    }
    next
}

fn decode_entity(rest: &str) -> Option<(&'static str, usize)> {
    const ENTITIES: &[(&str, &str)] = &[
        ("&nbsp;", " "),
        ("&amp;", "&"),
        ("&lt;", "<"),
        ("&gt;", ">"),
        ("&quot;", "\""),
        ("&apos;", "'"),
        ("&ndash;", "\u{2013}"),
        ("&mdash;", "\u{2014}"),
        ("&minus;", "\u{2212}"),
        ("&times;", "\u{00d7}"),
    ];
    ENTITIES.iter().find(|(e, _)| rest.starts_with(e)).map(|(e, d)| (*d, e.len()))
}
