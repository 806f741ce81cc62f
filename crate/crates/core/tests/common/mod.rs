#![allow(dead_code)]

use std::collections::HashMap;
use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpListener;
use std::path::PathBuf;
use std::thread::JoinHandle;

use gecgen::decode::{Hypothesis, Scorer};
use gecgen::pipeline::PipelineConfig;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn read_fixture(name: &str) -> String {
    std::fs::read_to_string(fixture(name)).unwrap()
}

pub fn fixture_config() -> PipelineConfig {
    PipelineConfig::load(&fixture("pipeline.toml")).unwrap()
}

pub const PIZZA: [&str; 5] = [
    "this is nto the pizzza that i ordering",
    "this is not the pizza that I ordering",
    "This is not the pizza that I ordering",
    "This is not the pizza that I ordered",
    "This is not the pizza that I ordered.",
];

/// Scripted n-best lists: each step of the pizza trajectory is the cheapest
/// rewrite of the previous one, with a distractor and the identity behind.
pub struct PizzaScorer(HashMap<String, Vec<Hypothesis>>);

impl PizzaScorer {
    pub fn new() -> Self {
        let mut lists = HashMap::new();
        for w in PIZZA.windows(2) {
            lists.insert(
                w[0].to_owned(),
                vec![
                    Hypothesis::new(w[1], 1.5),
                    Hypothesis::new(format!("{} !", w[1]), 2.5),
                    Hypothesis::new(w[0], 4.0),
                ],
            );
        }
        let last = PIZZA[4];
        lists.insert(
            last.to_owned(),
            vec![Hypothesis::new(last, 0.2), Hypothesis::new("This is not the pizza I ordered.", 3.0)],
        );
        PizzaScorer(lists)
    }
}

impl Scorer for PizzaScorer {
    fn nbest(&self, input: &str, beam: usize) -> gecgen::Result<Vec<Hypothesis>> {
        let mut list = self.0.get(input).cloned().unwrap_or_else(|| vec![Hypothesis::new(input, 0.0)]);
        list.truncate(beam);
        Ok(list)
    }
}

/// A request seen by [`serve`].
#[derive(Debug, Clone)]
pub struct SeenRequest {
    pub path: String,
    pub headers: HashMap<String, String>,
    pub body: String,
}

/// Answers `count` HTTP requests on a local port with `respond(body)`,
/// one request per connection. Returns the base URL and a handle yielding
/// the requests seen.
pub fn serve<F>(count: usize, respond: F) -> (String, JoinHandle<Vec<SeenRequest>>)
where
    F: Fn(&str) -> (u16, String) + Send + 'static,
{
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let url = format!("http://{}", listener.local_addr().unwrap());
    let handle = std::thread::spawn(move || {
        let mut seen = Vec::new();
        for stream in listener.incoming().take(count) {
            let mut stream = stream.unwrap();
            let mut reader = BufReader::new(stream.try_clone().unwrap());
            let mut request_line = String::new();
            reader.read_line(&mut request_line).unwrap();
            let path = request_line.split_whitespace().nth(1).unwrap_or("").to_owned();
            let mut headers = HashMap::new();
            loop {
                let mut line = String::new();
                reader.read_line(&mut line).unwrap();
                let line = line.trim_end();
                if line.is_empty() {
                    break;
                }
                if let Some((k, v)) = line.split_once(':') {
                    headers.insert(k.trim().to_ascii_lowercase(), v.trim().to_owned());
                }
            }
            let mut body = Vec::new();
            if let Some(len) = headers.get("content-length") {
                body.resize(len.parse().unwrap(), 0);
                reader.read_exact(&mut body).unwrap();
            } else if headers.get("transfer-encoding").is_some_and(|v| v.contains("chunked")) {
                loop {
                    let mut size = String::new();
                    reader.read_line(&mut size).unwrap();
                    let size = usize::from_str_radix(size.trim(), 16).unwrap();
                    let mut chunk = vec![0; size + 2];
                    reader.read_exact(&mut chunk).unwrap();
                    if size == 0 {
                        break;
                    }
                    body.extend_from_slice(&chunk[..size]);
                }
            }
            let body = String::from_utf8(body).unwrap();
            let (status, reply) = respond(&body);
            write!(
                stream,
                "HTTP/1.1 {status} X\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{reply}",
                reply.len()
            )
            .unwrap();
            stream.flush().unwrap();
            seen.push(SeenRequest { path, headers, body });
        }
        seen
    });
    (url, handle)
}
