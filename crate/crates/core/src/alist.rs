//! Sparse parity-check matrices in alist text format.
//!
//! ```text
//! n m
//! max_col_degree max_row_degree
//! <n column degrees>
//! <m row degrees>
//! <n lines: 1-based row indices per column, zero padded>
//! <m lines: 1-based column indices per row, zero padded>
//! ```

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::gf2::BinMatrix;

/// One whitespace separated token with its 1-based position in the source.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Token<'a> {
    pub text: &'a str,
    pub line: usize,
    pub column: usize,
}

impl Token<'_> {
    pub fn parse<T: std::str::FromStr>(&self, what: &str) -> Result<T> {
        self.text
            .parse()
            .map_err(|_| Error::parse(self.line, self.column, format!("expected {what}, found `{}`", self.text)))
    }
}

/// Non-empty lines of `src`, each split into tokens.
pub(crate) fn token_lines(src: &str) -> Vec<Vec<Token<'_>>> {
    src.lines()
        .enumerate()
        .filter_map(|(i, line)| {
            let mut toks = Vec::new();
            let mut start = None;
            for (pos, ch) in line.char_indices().chain(std::iter::once((line.len(), ' '))) {
                match (ch.is_whitespace(), start) {
                    (false, None) => start = Some(pos),
                    (true, Some(s)) => {
                        toks.push(Token {
                            text: &line[s..pos],
                            line: i + 1,
                            column: line[..s].chars().count() + 1,
                        });
                        start = None;
                    }
                    _ => {}
                }
            }
            (!toks.is_empty()).then_some(toks)
        })
        .collect()
}

fn eof(lines: &[Vec<Token<'_>>], what: &str) -> Error {
    let line = lines.last().map_or(1, |l| l[0].line + 1);
    Error::parse(line, 1, format!("unexpected end of input, expected {what}"))
}

pub fn parse_alist(src: &str) -> Result<BinMatrix> {
    let lines = token_lines(src);
    let mut it = lines.iter();
    let mut next_line = |what: &str| it.next().ok_or_else(|| eof(&lines, what));

    let header = next_line("header `n m`")?;
    if header.len() != 2 {
        return Err(Error::parse(header[0].line, header[0].column, "header must be `n m`"));
    }
    let n: usize = header[0].parse("column count")?;
    let m: usize = header[1].parse("row count")?;

    let maxes = next_line("maximum degrees")?;
    if maxes.len() != 2 {
        return Err(Error::parse(maxes[0].line, maxes[0].column, "expected `max_col_degree max_row_degree`"));
    }
    let max_col: usize = maxes[0].parse("max column degree")?;
    let max_row: usize = maxes[1].parse("max row degree")?;

    let read_degrees = |toks: &[Token<'_>], count: usize, max: usize| -> Result<Vec<usize>> {
        if toks.len() != count {
            return Err(Error::parse(toks[0].line, toks[0].column, format!("expected {count} degrees, found {}", toks.len())));
        }
        toks.iter()
            .map(|t| {
                let d: usize = t.parse("degree")?;
                if d > max {
                    return Err(Error::parse(t.line, t.column, format!("degree {d} exceeds declared maximum {max}")));
                }
                Ok(d)
            })
            .collect()
    };
    let col_deg = read_degrees(next_line("column degrees")?, n, max_col)?;
    let row_deg = read_degrees(next_line("row degrees")?, m, max_row)?;

    let mut h = BinMatrix::zeros(m, n);
    let mut read_lists = |count: usize, bound: usize, degs: &[usize], what: &str| -> Result<Vec<Vec<usize>>> {
        let mut out = Vec::with_capacity(count);
        for (i, &d) in degs.iter().enumerate().take(count) {
            let toks = next_line(what)?;
            let mut list = Vec::new();
            for t in toks {
                let idx: usize = t.parse("index")?;
                if idx == 0 {
                    continue;
                }
                if idx > bound {
                    return Err(Error::parse(t.line, t.column, format!("index {idx} out of range 1..={bound}")));
                }
                list.push(idx - 1);
            }
            if list.len() != d {
                return Err(Error::parse(toks[0].line, toks[0].column, format!("{what} {} lists {} entries but degree is {d}", i + 1, list.len())));
            }
            out.push(list);
        }
        Ok(out)
    };
    let cols = read_lists(n, m, &col_deg, "column")?;
    let rows = read_lists(m, n, &row_deg, "row")?;

    for (c, list) in cols.iter().enumerate() {
        for &r in list {
            h.set(r, c, true);
        }
    }
    for (r, list) in rows.iter().enumerate() {
        for &c in list {
            if !h.get(r, c) {
                return Err(Error::parse(0, 0, format!("row {} lists column {} but that column does not list the row", r + 1, c + 1)));
            }
        }
        if list.len() != h.row_weight(r) {
            return Err(Error::parse(0, 0, format!("row {} is inconsistent with the column lists", r + 1)));
        }
    }
    Ok(h)
}

pub fn to_alist(h: &BinMatrix) -> String {
    let cols = h.col_lists();
    let rows = h.row_lists();
    let max_col = cols.iter().map(Vec::len).max().unwrap_or(0);
    let max_row = rows.iter().map(Vec::len).max().unwrap_or(0);
    let mut s = String::new();
    let join = |v: &mut String, xs: &mut dyn Iterator<Item = usize>| {
        let parts: Vec<String> = xs.map(|x| x.to_string()).collect();
        v.push_str(&parts.join(" "));
        v.push('\n');
    };
    writeln!(s, "{} {}", h.cols(), h.rows()).unwrap();
    writeln!(s, "{max_col} {max_row}").unwrap();
    join(&mut s, &mut cols.iter().map(Vec::len));
    join(&mut s, &mut rows.iter().map(Vec::len));
    for list in &cols {
        join(&mut s, &mut list.iter().map(|r| r + 1).chain(std::iter::repeat_n(0, max_col - list.len())));
    }
    for list in &rows {
        join(&mut s, &mut list.iter().map(|c| c + 1).chain(std::iter::repeat_n(0, max_row - list.len())));
    }
    s
}

pub fn read_alist(path: impl AsRef<Path>) -> Result<BinMatrix> {
    let path = path.as_ref();
    let src = std::fs::read_to_string(path)?;
    parse_alist(&src).map_err(|e| e.with_path(path))
}

pub fn write_alist(path: impl AsRef<Path>, h: &BinMatrix) -> Result<()> {
    std::fs::write(path, to_alist(h))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const H9: &str = "9 2\n1 6\n1 1 2 1 1 2 1 1 2\n6 6\n2 1 1 2 1 1 2 1 1\n0 0 0 0 0 0 0 0 0\n";

    fn h9() -> BinMatrix {
        BinMatrix::from_rows(&[
            [0u8, 1, 1, 0, 1, 1, 0, 1, 1],
            [1, 0, 1, 1, 0, 1, 1, 0, 1],
        ])
        .unwrap()
    }

    #[test]
    fn round_trip_h9() {
        let text = to_alist(&h9());
        assert!(text.starts_with("9 2\n2 6\n1 1 2 1 1 2 1 1 2\n6 6\n2 0\n1 0\n1 2\n"));
        assert_eq!(parse_alist(&text).unwrap(), h9());
    }

    #[test]
    fn unpadded_lists_accepted() {
        let text = "3 1\n1 3\n1 1 1\n3\n1\n1\n1\n1 2 3\n";
        let h = parse_alist(text).unwrap();
        assert_eq!(h.row_ones(0), vec![0, 1, 2]);
    }

    #[test]
    fn diagnostics_carry_position() {
        let bad = "3 1\n1 3\n1 x 1\n3\n";
        match parse_alist(bad) {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (3, 3)),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_alist(H9), Err(Error::Parse { .. })));
        assert!(matches!(parse_alist("3 1\n"), Err(Error::Parse { line: 2, .. })));
    }
}
