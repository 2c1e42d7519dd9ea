//! Plain-text graph files.
//!
//! ```text
//! undirected 4
//! 1 2 1
//! 2 3 0.5
//! 3 4 1
//! ```
//!
//! The header is `directed N` or `undirected N`; each following line is an
//! edge `i j w` with 1-based node indices. Blank lines and lines starting with
//! `#` are ignored. Undirected files list each pair once; listing the reverse
//! orientation too is accepted when the weights agree.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use super::Graph;
use crate::error::{Error, Result};

pub fn write_graph<W: Write>(g: &Graph, mut out: W) -> Result<()> {
    let header = if g.is_directed() {
        "directed"
    } else {
        "undirected"
    };
    writeln!(out, "{} {}", header, g.node_count())?;
    for (i, j, w) in g.unique_edges() {
        // `{}` on f64 prints the shortest representation that parses back exactly.
        writeln!(out, "{} {} {}", i + 1, j + 1, w)?;
    }
    Ok(())
}

pub fn read_graph<R: BufRead>(input: R) -> Result<Graph> {
    let mut header: Option<(bool, usize)> = None;
    let mut edges: BTreeMap<(usize, usize), f64> = BTreeMap::new();

    for (idx, line) in input.lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        let text = line.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = text.split_whitespace().collect();
        let Some((directed, n)) = header else {
            header = Some(parse_header(&fields, lineno)?);
            continue;
        };
        if fields.len() != 3 {
            return Err(input_err(lineno, "expected `i j w`"));
        }
        let i = parse_index(fields[0], n, lineno)?;
        let j = parse_index(fields[1], n, lineno)?;
        let w: f64 = fields[2]
            .parse()
            .map_err(|_| input_err(lineno, format!("bad weight '{}'", fields[2])))?;
        if i == j {
            return Err(input_err(lineno, "self-loop"));
        }
        if !(w.is_finite() && w >= 0.0) {
            return Err(input_err(
                lineno,
                format!("weight {} must be finite and >= 0", w),
            ));
        }
        let key = if directed {
            (i, j)
        } else {
            (i.min(j), i.max(j))
        };
        match edges.get(&key) {
            Some(&prev) if !directed && prev == w && key != (i, j) => {}
            Some(_) => {
                return Err(input_err(
                    lineno,
                    format!("duplicate edge {} {}", i + 1, j + 1),
                ))
            }
            None => {
                edges.insert(key, w);
            }
        }
    }

    let (directed, n) = header.ok_or_else(|| input_err(0, "missing header"))?;
    let triples = edges.into_iter().map(|((i, j), w)| (i, j, w));
    let g = if directed {
        Graph::directed(n, triples)
    } else {
        Graph::undirected(n, triples)
    };
    g.map_err(|e| input_err(0, e.to_string()))
}

fn parse_header(fields: &[&str], lineno: usize) -> Result<(bool, usize)> {
    if fields.len() != 2 {
        return Err(input_err(lineno, "header must be `directed|undirected N`"));
    }
    let directed = match fields[0] {
        "directed" => true,
        "undirected" => false,
        other => return Err(input_err(lineno, format!("unknown graph kind '{}'", other))),
    };
    let n: usize = fields[1]
        .parse()
        .map_err(|_| input_err(lineno, format!("bad node count '{}'", fields[1])))?;
    if n == 0 {
        return Err(input_err(lineno, "node count must be positive"));
    }
    Ok((directed, n))
}

fn parse_index(field: &str, n: usize, lineno: usize) -> Result<usize> {
    let v: usize = field
        .parse()
        .map_err(|_| input_err(lineno, format!("bad node index '{}'", field)))?;
    if v == 0 || v > n {
        return Err(input_err(
            lineno,
            format!("node index {} outside 1..={}", v, n),
        ));
    }
    Ok(v - 1)
}

fn input_err(line: usize, message: impl Into<String>) -> Error {
    Error::Input {
        line,
        message: message.into(),
    }
}
