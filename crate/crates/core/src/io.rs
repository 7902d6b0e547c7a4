//! Edge-stream text files and JSON-lines traces.
//!
//! Stream format: one edge per line as `u v w`, whitespace separated, `#`
//! starts a comment, and an optional first line `n <count>` declares the
//! vertex count.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Lines, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::types::{RawEdge, TraceEvent};

/// Lazily parsed edge stream; yields edges one at a time.
pub struct EdgeReader<R: BufRead> {
    lines: Lines<R>,
    line_no: usize,
    header: Option<u64>,
    pending: Option<RawEdge>,
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

enum Line {
    Blank,
    Header(u64),
    Edge(RawEdge),
}

fn parse_line(text: &str, line: usize) -> Result<Line> {
    let body = text.split('#').next().unwrap_or("");
    let mut toks = body.split_whitespace();
    let Some(first) = toks.next() else {
        return Ok(Line::Blank);
    };
    if first == "n" {
        let count = toks
            .next()
            .ok_or_else(|| parse_err(line, "header `n` without a count"))?
            .parse::<u64>()
            .map_err(|e| parse_err(line, format!("bad vertex count: {e}")))?;
        if toks.next().is_some() {
            return Err(parse_err(line, "trailing tokens after header"));
        }
        return Ok(Line::Header(count));
    }
    let u = first
        .parse::<u64>()
        .map_err(|_| parse_err(line, format!("bad vertex id `{first}`")))?;
    let (Some(v), Some(w)) = (toks.next(), toks.next()) else {
        return Err(parse_err(line, "expected `u v w`"));
    };
    let v = v
        .parse::<u64>()
        .map_err(|_| parse_err(line, format!("bad vertex id `{v}`")))?;
    let w = w
        .parse::<f64>()
        .map_err(|_| parse_err(line, format!("bad weight `{w}`")))?;
    if !(w.is_finite() && w > 0.0) {
        return Err(parse_err(line, format!("weight must be positive and finite, got {w}")));
    }
    if toks.next().is_some() {
        return Err(parse_err(line, "trailing tokens after weight"));
    }
    Ok(Line::Edge(RawEdge::new(u, v, w)))
}

impl<R: BufRead> EdgeReader<R> {
    /// Reads up to the first edge so the header, if any, is known.
    pub fn new(reader: R) -> Result<Self> {
        let mut r = EdgeReader {
            lines: reader.lines(),
            line_no: 0,
            header: None,
            pending: None,
        };
        for text in r.lines.by_ref() {
            r.line_no += 1;
            match parse_line(&text?, r.line_no)? {
                Line::Blank => continue,
                Line::Header(n) => r.header = Some(n),
                Line::Edge(e) => r.pending = Some(e),
            }
            break;
        }
        Ok(r)
    }

    /// Declared vertex count.
    pub fn header(&self) -> Option<u64> {
        self.header
    }
}

impl<R: BufRead> Iterator for EdgeReader<R> {
    type Item = Result<RawEdge>;

    fn next(&mut self) -> Option<Self::Item> {
        if let Some(e) = self.pending.take() {
            return Some(Ok(e));
        }
        loop {
            let text = match self.lines.next()? {
                Ok(t) => t,
                Err(e) => return Some(Err(e.into())),
            };
            self.line_no += 1;
            match parse_line(&text, self.line_no) {
                Ok(Line::Blank) => continue,
                Ok(Line::Edge(e)) => return Some(Ok(e)),
                Ok(Line::Header(_)) => {
                    return Some(Err(parse_err(self.line_no, "header `n` must come before all edges")))
                }
                Err(e) => return Some(Err(e)),
            }
        }
    }
}

pub fn open_edge_stream(path: &Path) -> Result<EdgeReader<BufReader<File>>> {
    EdgeReader::new(BufReader::new(File::open(path)?))
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct EdgeStream {
    pub n: Option<u64>,
    pub edges: Vec<RawEdge>,
}

pub fn parse_edge_stream(reader: impl BufRead) -> Result<EdgeStream> {
    let r = EdgeReader::new(reader)?;
    let n = r.header();
    let edges = r.collect::<Result<Vec<_>>>()?;
    Ok(EdgeStream { n, edges })
}

pub fn read_edge_stream(path: &Path) -> Result<EdgeStream> {
    parse_edge_stream(BufReader::new(File::open(path)?))
}

/// Shortest decimal that parses back to the same `f64`.
pub fn format_weight(w: f64) -> String {
    if w == 0.0 || (1e-6..1e16).contains(&w.abs()) {
        format!("{w}")
    } else {
        format!("{w:e}")
    }
}

pub fn write_edge_stream<W: Write>(
    out: &mut W,
    n: Option<u64>,
    comment: Option<&str>,
    edges: impl IntoIterator<Item = RawEdge>,
) -> Result<()> {
    if let Some(c) = comment {
        for line in c.lines() {
            writeln!(out, "# {line}")?;
        }
    }
    if let Some(n) = n {
        writeln!(out, "n {n}")?;
    }
    for e in edges {
        writeln!(out, "{} {} {}", e.u, e.v, format_weight(e.w))?;
    }
    Ok(())
}

pub fn write_trace<W: Write>(out: &mut W, trace: &[TraceEvent]) -> Result<()> {
    for ev in trace {
        serde_json::to_writer(&mut *out, ev)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn save_trace(path: &Path, trace: &[TraceEvent]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_trace(&mut w, trace)?;
    w.flush()?;
    Ok(())
}

pub fn parse_trace(reader: impl BufRead) -> Result<Vec<TraceEvent>> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let ev = serde_json::from_str(&line).map_err(|e| parse_err(i + 1, e.to_string()))?;
        out.push(ev);
    }
    Ok(out)
}

pub fn read_trace(path: &Path) -> Result<Vec<TraceEvent>> {
    parse_trace(BufReader::new(File::open(path)?))
}
