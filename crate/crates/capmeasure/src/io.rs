//! Plain-text and JSON file formats for spaces and maps.
//!
//! Space files:
//! ```text
//! carrier a b
//! matrix
//! 0 2
//! 3 0
//! ```
//! Rows are generating points in carrier order, columns evaluation points,
//! entries exact value tokens (`p`, `p/q`, or `inf`). The JSON form (used
//! when the file name ends in `.json`) mirrors the same fields:
//! `{"carrier": ["a","b"], "matrix": [["0","2"],["3","0"]]}`.
//!
//! Map files:
//! ```text
//! map
//! a -> p
//! b -> q
//! ```
//! with one arrow per domain element; in JSON,
//! `{"map": [["a","p"],["b","q"]]}`.

use std::str::FromStr;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::extreal::ExtReal;
use crate::filter::{Carrier, Map};
use crate::space::CapStructure;

fn parse_err(line: usize, col: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        col,
        message: message.into(),
    }
}

/// Parses the plain-text space format. Line and column numbers are 1-based.
pub fn parse_space_text(text: &str) -> Result<CapStructure> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (ln, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, 1, "empty space file"))?;
    let mut toks = header.split_whitespace();
    if toks.next() != Some("carrier") {
        return Err(parse_err(ln, 1, "expected `carrier <labels...>`"));
    }
    let labels: Vec<&str> = toks.collect();
    if labels.is_empty() {
        return Err(parse_err(ln, 8, "carrier needs at least one label"));
    }
    let carrier = Carrier::new(labels)?;
    let n = carrier.len();

    let (ln, marker) = lines
        .next()
        .ok_or_else(|| parse_err(ln, 1, "expected `matrix` line"))?;
    if marker != "matrix" {
        return Err(parse_err(ln, 1, "expected `matrix` line"));
    }

    let mut rows: Vec<Vec<ExtReal>> = Vec::with_capacity(n);
    for _ in 0..n {
        let (ln, row_line) = lines
            .next()
            .ok_or_else(|| parse_err(ln, 1, format!("expected {n} matrix rows")))?;
        let mut row = Vec::with_capacity(n);
        let mut col = 1;
        for tok in row_line.split_whitespace() {
            let v = ExtReal::from_str(tok)
                .map_err(|e| parse_err(ln, col, format!("bad value `{tok}`: {e}")))?;
            row.push(v);
            col += tok.len() + 1;
        }
        if row.len() != n {
            return Err(parse_err(
                ln,
                1,
                format!("row has {} entries, expected {n}", row.len()),
            ));
        }
        rows.push(row);
    }
    if let Some((ln, extra)) = lines.next() {
        return Err(parse_err(ln, 1, format!("unexpected trailing line `{extra}`")));
    }
    CapStructure::from_matrix(&carrier, &rows)
}

#[derive(Deserialize)]
struct SpaceJson {
    carrier: Vec<String>,
    matrix: Vec<Vec<String>>,
}

pub fn parse_space_json(text: &str) -> Result<CapStructure> {
    let raw: SpaceJson = serde_json::from_str(text)?;
    let carrier = Carrier::new(raw.carrier)?;
    let mut rows = Vec::with_capacity(raw.matrix.len());
    for row in &raw.matrix {
        let mut out = Vec::with_capacity(row.len());
        for tok in row {
            out.push(ExtReal::from_str(tok)?);
        }
        rows.push(out);
    }
    CapStructure::from_matrix(&carrier, &rows)
}

/// Dispatches on the `.json` extension.
pub fn parse_space(path_hint: &str, text: &str) -> Result<CapStructure> {
    if path_hint.ends_with(".json") {
        parse_space_json(text)
    } else {
        parse_space_text(text)
    }
}

/// Parses the plain-text map format against the given carriers.
pub fn parse_map_text(text: &str, domain: &Carrier, codomain: &Carrier) -> Result<Map> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (ln, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, 1, "empty map file"))?;
    if header != "map" {
        return Err(parse_err(ln, 1, "expected `map` line"));
    }
    let mut pairs = Vec::new();
    for (ln, line) in lines {
        let (from, to) = line
            .split_once("->")
            .ok_or_else(|| parse_err(ln, 1, "expected `x -> y`"))?;
        pairs.push((from.trim().to_string(), to.trim().to_string()));
    }
    Map::new(domain, codomain, pairs)
}

#[derive(Deserialize)]
struct MapJson {
    map: Vec<(String, String)>,
}

pub fn parse_map_json(text: &str, domain: &Carrier, codomain: &Carrier) -> Result<Map> {
    let raw: MapJson = serde_json::from_str(text)?;
    Map::new(domain, codomain, raw.map)
}

pub fn parse_map(path_hint: &str, text: &str, domain: &Carrier, codomain: &Carrier) -> Result<Map> {
    if path_hint.ends_with(".json") {
        parse_map_json(text, domain, codomain)
    } else {
        parse_map_text(text, domain, codomain)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn space_roundtrip() {
        let text = "carrier a b\nmatrix\n0 2\n3 0\n";
        let s = parse_space_text(text).unwrap();
        assert_eq!(s.render_space_file(), text);
        assert_eq!(s.entry_by_label("b", "a").unwrap(), ExtReal::int(3));
    }

    #[test]
    fn space_parse_errors() {
        assert!(matches!(
            parse_space_text("carrier a b\nmatrix\n0 1/0\n3 0\n"),
            Err(Error::Parse { line: 3, .. })
        ));
        assert!(matches!(
            parse_space_text("carrier a b\nmatrix\n0\n3 0\n"),
            Err(Error::Parse { line: 3, .. })
        ));
        assert!(matches!(
            parse_space_text("matrix\n0\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        // nonzero diagonal is rejected at construction
        assert!(matches!(
            parse_space_text("carrier a b\nmatrix\n1 2\n3 0\n"),
            Err(Error::Cal1Violation { .. })
        ));
    }

    #[test]
    fn space_json() {
        let text = r#"{"carrier": ["a","b"], "matrix": [["0","1/2"],["inf","0"]]}"#;
        let s = parse_space_json(text).unwrap();
        assert_eq!(
            s.entry_by_label("a", "b").unwrap(),
            ExtReal::rational(1, 2).unwrap()
        );
        assert_eq!(s.entry_by_label("b", "a").unwrap(), ExtReal::INFINITY);
    }

    #[test]
    fn map_formats() {
        let x = Carrier::new(["a", "b"]).unwrap();
        let y = Carrier::new(["p"]).unwrap();
        let m = parse_map_text("map\na -> p\nb -> p\n", &x, &y).unwrap();
        assert_eq!(m.apply("a").unwrap(), "p");

        let mj = parse_map_json(r#"{"map": [["a","p"],["b","p"]]}"#, &x, &y).unwrap();
        assert_eq!(m, mj);

        assert!(parse_map_text("map\na -> p\n", &x, &y).is_err()); // not total
    }
}
