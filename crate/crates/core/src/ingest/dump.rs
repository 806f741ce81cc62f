use std::io::BufRead;

use log::warn;
use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;
use serde::Serialize;

use super::{Page, Snapshot};
use crate::error::{Error, Result};

/// 64 MiB, applied to the cumulative revision-text size of a page.
pub const DEFAULT_MAX_PAGE_BYTES: u64 = 64 << 20;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct IngestStats {
    pub pages_read: u64,
    pub pages_skipped_oversize: u64,
    pub revisions_skipped: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Field {
    Title,
    PageId,
    RevisionId,
    Timestamp,
    Text,
}

#[derive(Default)]
struct PartialRevision {
    id: Option<u64>,
    timestamp: String,
    text: Option<String>,
}

struct PartialPage {
    id: Option<u64>,
    title: String,
    revisions: Vec<Snapshot>,
    text_bytes: u64,
    oversize: bool,
}

/// Streams [`Page`]s out of a pages-meta-history XML dump.
///
/// Pages whose revision texts together exceed `max_page_bytes` are dropped as
/// soon as the limit is crossed, so at most one retained page is held in
/// memory at a time.
pub struct DumpReader<R: BufRead> {
    reader: Reader<R>,
    buf: Vec<u8>,
    max_page_bytes: u64,
    stats: IngestStats,
    finished: bool,
}

impl<R: BufRead> DumpReader<R> {
    pub fn new(source: R, max_page_bytes: u64) -> Self {
        DumpReader {
            reader: Reader::from_reader(source),
            buf: Vec::with_capacity(8 * 1024),
            max_page_bytes,
            stats: IngestStats::default(),
            finished: false,
        }
    }

    pub fn stats(&self) -> IngestStats {
        self.stats
    }

    fn xml_error(&self, message: impl Into<String>) -> Error {
        Error::Xml { offset: self.reader.buffer_position(), message: message.into() }
    }

    fn next_page(&mut self) -> Result<Option<Page>> {
        let mut path: Vec<Vec<u8>> = Vec::new();
        let mut page: Option<PartialPage> = None;
        let mut revision: Option<PartialRevision> = None;
        let mut capture: Option<(Field, String)> = None;

        loop {
            self.buf.clear();
            let event = match self.reader.read_event_into(&mut self.buf) {
                Ok(ev) => ev.into_owned(),
                Err(e) => return Err(Error::Xml { offset: self.reader.error_position(), message: e.to_string() }),
            };
            match event {
                Event::Start(start) => {
                    let name = start.local_name().as_ref().to_vec();
                    let parent = path.last().map(Vec::as_slice);
                    match (name.as_slice(), parent) {
                        (b"page", _) => {
                            page = Some(PartialPage {
                                id: None,
                                title: String::new(),
                                revisions: Vec::new(),
                                text_bytes: 0,
                                oversize: false,
                            });
                        }
                        (b"revision", Some(b"page")) => revision = Some(PartialRevision::default()),
                        (b"title", Some(b"page")) => capture = Some((Field::Title, String::new())),
                        (b"id", Some(b"page")) => capture = Some((Field::PageId, String::new())),
                        (b"id", Some(b"revision")) => capture = Some((Field::RevisionId, String::new())),
                        (b"timestamp", Some(b"revision")) => capture = Some((Field::Timestamp, String::new())),
                        (b"text", Some(b"revision")) if !is_deleted(&start) => {
                            capture = Some((Field::Text, String::new()));
                        }
                        _ => {}
                    }
                    path.push(name);
                }
                Event::Empty(start) => {
                    let parent = path.last().map(Vec::as_slice);
                    if start.local_name().as_ref() == b"text"
                        && parent == Some(b"revision".as_slice())
                        && !is_deleted(&start)
                    {
                        if let Some(rev) = revision.as_mut() {
                            rev.text = Some(String::new());
                        }
                    }
                }
                Event::Text(text) => {
                    if let Some((_, value)) = capture.as_mut() {
                        let unescaped = text.unescape().map_err(|e| self.xml_error(e.to_string()))?;
                        value.push_str(&unescaped);
                    }
                }
                Event::CData(data) => {
                    if let Some((_, value)) = capture.as_mut() {
                        value.push_str(&String::from_utf8_lossy(&data.into_inner()));
                    }
                }
                Event::End(end) => {
                    path.pop();
                    let name = end.local_name();
                    if let Some((field, value)) = capture.take() {
                        self.store_field(field, value, page.as_mut(), revision.as_mut())?;
                        continue;
                    }
                    match name.as_ref() {
                        b"revision" if page.is_some() => {
                            if let (Some(rev), Some(p)) = (revision.take(), page.as_mut()) {
                                self.finish_revision(rev, p)?;
                            }
                        }
                        b"page" => {
                            if let Some(p) = page.take() {
                                self.stats.pages_read += 1;
                                if p.oversize {
                                    self.stats.pages_skipped_oversize += 1;
                                    continue;
                                }
                                let page_id = p.id.ok_or_else(|| self.xml_error("page without <id>"))?;
                                return Ok(Some(Page { page_id, title: p.title, revisions: p.revisions }));
                            }
                        }
                        _ => {}
                    }
                }
                Event::Eof => {
                    if page.is_some() || !path.is_empty() {
                        return Err(self.xml_error("unexpected end of input inside an element"));
                    }
                    return Ok(None);
                }
                _ => {}
            }
        }
    }

    fn store_field(
        &self,
        field: Field,
        value: String,
        page: Option<&mut PartialPage>,
        revision: Option<&mut PartialRevision>,
    ) -> Result<()> {
        match field {
            Field::Title => {
                if let Some(p) = page {
                    p.title = value;
                }
            }
            Field::PageId => {
                if let Some(p) = page {
                    p.id = Some(self.parse_id(&value)?);
                }
            }
            Field::RevisionId => {
                if let Some(r) = revision {
                    r.id = Some(self.parse_id(&value)?);
                }
            }
            Field::Timestamp => {
                if let Some(r) = revision {
                    r.timestamp = value;
                }
            }
            Field::Text => {
                if let Some(r) = revision {
                    r.text = Some(value);
                }
            }
        }
        Ok(())
    }

    fn parse_id(&self, value: &str) -> Result<u64> {
        value.trim().parse().map_err(|_| self.xml_error(format!("invalid id {value:?}")))
    }

    fn finish_revision(&mut self, rev: PartialRevision, page: &mut PartialPage) -> Result<()> {
        let revision_id = rev.id.ok_or_else(|| self.xml_error("revision without <id>"))?;
        let Some(text) = rev.text else {
            warn!("revision {revision_id} has no text; skipped");
            self.stats.revisions_skipped += 1;
            return Ok(());
        };
        page.text_bytes += text.len() as u64;
        if page.oversize {
            return Ok(());
        }
        if page.text_bytes > self.max_page_bytes {
            page.oversize = true;
            page.revisions = Vec::new();
            return Ok(());
        }
        page.revisions.push(Snapshot { revision_id, timestamp: rev.timestamp, text });
        Ok(())
    }
}

fn is_deleted(start: &BytesStart<'_>) -> bool {
    start.attributes().flatten().any(|a| a.key.local_name().as_ref() == b"deleted")
}

impl<R: BufRead> Iterator for DumpReader<R> {
    type Item = Result<Page>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.finished {
            return None;
        }
        match self.next_page() {
            Ok(Some(page)) => Some(Ok(page)),
            Ok(None) => {
                self.finished = true;
                None
            }
            Err(e) => {
                self.finished = true;
                Some(Err(e))
            }
        }
    }
}
