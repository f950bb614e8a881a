//! Newline-delimited text format for trees, views and label keys.
//!
//! ```text
//! n=<n> l=<l>        # arrival tree: then `<child> <parent>` for 2..=n in order
//! n=<n>              # shape view: `<child> <parent>` rooted at label 1
//! ```
//!
//! Blank lines are ignored.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::tree::{ArrivalTree, LabelKey, ShapeView};

pub fn write_tree(tree: &ArrivalTree) -> String {
    let mut out = format!("n={} l={}\n", tree.n(), tree.seed_size());
    for (child, parent) in tree.edges() {
        writeln!(out, "{child} {parent}").unwrap();
    }
    out
}

/// Serializes a view oriented away from label 1, children in label order, so
/// the line order carries no information beyond the shape labels.
pub fn write_view(view: &ShapeView) -> String {
    let n = view.n();
    let mut out = format!("n={n}\n");
    if n == 0 {
        return out;
    }
    let (parent, _) = view.rooted(1);
    for (v, p) in parent.iter().enumerate().skip(2) {
        writeln!(out, "{v} {p}").unwrap();
    }
    out
}

/// `<shape> <arrival>` per line, in shape-label order.
pub fn write_key(key: &LabelKey) -> String {
    let mut out = format!("n={}\n", key.n());
    for (shape, arrival) in key.pairs() {
        writeln!(out, "{shape} {arrival}").unwrap();
    }
    out
}

/// Either kind of serialized tree.
#[derive(Debug, Clone)]
pub enum Parsed {
    Tree(ArrivalTree),
    View(ShapeView),
}

impl Parsed {
    /// The adjacency structure, under the labels found in the file.
    pub fn into_view(self) -> ShapeView {
        match self {
            Parsed::Tree(t) => ShapeView::of_tree(&t),
            Parsed::View(v) => v,
        }
    }
}

struct Header {
    n: usize,
    seed_size: Option<usize>,
}

fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty())
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_header(line: usize, text: &str) -> Result<Header> {
    let mut n = None;
    let mut seed_size = None;
    for field in text.split_whitespace() {
        let (name, value) = field
            .split_once('=')
            .ok_or_else(|| parse_err(line, format!("expected key=value, got `{field}`")))?;
        let value: usize = value
            .parse()
            .map_err(|_| parse_err(line, format!("`{value}` is not a non-negative integer")))?;
        match name {
            "n" if n.is_none() => n = Some(value),
            "l" if seed_size.is_none() => seed_size = Some(value),
            _ => return Err(parse_err(line, format!("unexpected header field `{name}`"))),
        }
    }
    let n = n.ok_or_else(|| parse_err(line, "missing n= in header"))?;
    Ok(Header { n, seed_size })
}

fn parse_pair(line: usize, text: &str) -> Result<(usize, usize)> {
    let mut it = text.split_whitespace();
    let mut next = || -> Result<usize> {
        let field = it
            .next()
            .ok_or_else(|| parse_err(line, "expected two labels"))?;
        field
            .parse()
            .map_err(|_| parse_err(line, format!("`{field}` is not a label")))
    };
    let pair = (next()?, next()?);
    if it.next().is_some() {
        return Err(parse_err(line, "expected exactly two labels"));
    }
    Ok(pair)
}

pub fn parse(text: &str) -> Result<Parsed> {
    let mut it = lines(text);
    let (hline, htext) = it.next().ok_or_else(|| parse_err(1, "empty input"))?;
    let header = parse_header(hline, htext)?;
    let pairs = it
        .map(|(line, t)| parse_pair(line, t).map(|p| (line, p)))
        .collect::<Result<Vec<_>>>()?;
    match header.seed_size {
        Some(seed_size) => {
            if header.n == 0 {
                return Err(parse_err(hline, "a tree needs n >= 1"));
            }
            if pairs.len() + 1 != header.n {
                return Err(parse_err(
                    hline,
                    format!("header says n={} but found {} edges", header.n, pairs.len()),
                ));
            }
            let mut parents = Vec::with_capacity(pairs.len());
            for (i, &(line, (child, parent))) in pairs.iter().enumerate() {
                if child != i + 2 {
                    return Err(parse_err(
                        line,
                        format!("expected child {} in arrival order, got {child}", i + 2),
                    ));
                }
                parents.push(parent);
            }
            let tree = ArrivalTree::from_parents(seed_size, &parents).map_err(|e| {
                let line = match &e {
                    Error::InvalidSeed { vertex, .. } => pairs[vertex - 2].0,
                    _ => hline,
                };
                parse_err(line, e.to_string())
            })?;
            Ok(Parsed::Tree(tree))
        }
        None => {
            let edges: Vec<_> = pairs.iter().map(|&(_, p)| p).collect();
            ShapeView::from_edges(header.n, &edges)
                .map(Parsed::View)
                .map_err(|e| parse_err(hline, e.to_string()))
        }
    }
}

pub fn parse_tree(text: &str) -> Result<ArrivalTree> {
    match parse(text)? {
        Parsed::Tree(t) => Ok(t),
        Parsed::View(_) => Err(parse_err(1, "expected an arrival tree (header with l=)")),
    }
}

pub fn parse_view(text: &str) -> Result<ShapeView> {
    match parse(text)? {
        Parsed::View(v) => Ok(v),
        Parsed::Tree(_) => Err(parse_err(1, "expected a shape view (header without l=)")),
    }
}

pub fn parse_key(text: &str) -> Result<LabelKey> {
    let mut it = lines(text);
    let (hline, htext) = it.next().ok_or_else(|| parse_err(1, "empty input"))?;
    let header = parse_header(hline, htext)?;
    let mut to_arrival = Vec::with_capacity(header.n);
    for (line, t) in it {
        let (shape, arrival) = parse_pair(line, t)?;
        if shape != to_arrival.len() + 1 {
            return Err(parse_err(
                line,
                format!("expected shape label {}", to_arrival.len() + 1),
            ));
        }
        to_arrival.push(arrival);
    }
    if to_arrival.len() != header.n {
        return Err(parse_err(hline, "key length does not match n"));
    }
    LabelKey::from_arrivals(to_arrival).map_err(|e| parse_err(hline, e.to_string()))
}
