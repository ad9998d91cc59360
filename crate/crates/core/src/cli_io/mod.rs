//! File formats, desk-scale limits, and the command-line surface.
//!
//! Scheme files come in two syntaxes. The native one is a header line
//! `n r` followed by `n` rows of colors; the GAP one is a list of lists
//! `[[...],[...]]` with colors starting at 0 or 1 (detected from the minimum
//! entry), as in the Hanaki–Miyamoto catalog of small association schemes.
//! Loop files are a line `n` followed by `n` rows. `#` starts a comment line.

mod commands;

use std::fmt;

use thiserror::Error;

use crate::loops::{loop_from_table, CayleyTable, LoopError, NormalizedLoop};
use crate::rainbow::{validate_rainbow, ColorMatrix, ExactMatrix, RainbowError};

pub use commands::{run, CliOutcome};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("SyntaxError at line {line}, column {col}: {message}")]
    Syntax {
        line: usize,
        col: usize,
        message: String,
    },
    #[error("ValidationError: {0}")]
    Validation(#[from] RainbowError),
    #[error(transparent)]
    Loop(#[from] LoopError),
}

fn syntax(line: usize, col: usize, message: impl Into<String>) -> FormatError {
    FormatError::Syntax {
        line,
        col,
        message: message.into(),
    }
}

/// A parsed scheme file: the rainbow plus its `#` comment lines.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemeFile {
    pub cm: ColorMatrix,
    pub metadata: Vec<String>,
}

/// A whitespace-separated token with its 1-based position.
struct Token<'a> {
    text: &'a str,
    line: usize,
    col: usize,
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !l.trim_start().starts_with('#') && !l.trim().is_empty())
}

fn tokens(line_no: usize, line: &str) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices().chain(std::iter::once((line.len(), ' '))) {
        match (ch.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                out.push(Token {
                    text: &line[s..i],
                    line: line_no,
                    col: line[..s].chars().count() + 1,
                });
                start = None;
            }
            _ => {}
        }
    }
    out
}

fn parse_int<T: std::str::FromStr>(t: &Token<'_>, what: &str) -> Result<T, FormatError> {
    t.text
        .parse()
        .map_err(|_| syntax(t.line, t.col, format!("expected {what}, found `{}`", t.text)))
}

/// Rows of `n` integers each after a header; shared by scheme, loop and
/// matrix files.
fn parse_rows<T: std::str::FromStr>(
    lines: &mut dyn Iterator<Item = (usize, &str)>,
    n: usize,
    header_line: usize,
    what: &str,
) -> Result<Vec<Vec<T>>, FormatError> {
    let mut rows = Vec::with_capacity(n);
    let mut last_line = header_line;
    for _ in 0..n {
        let Some((line_no, line)) = lines.next() else {
            return Err(syntax(last_line + 1, 1, format!("expected {n} rows, found {}", rows.len())));
        };
        last_line = line_no;
        let toks = tokens(line_no, line);
        if toks.len() != n {
            let col = toks.get(n).map_or(line.chars().count() + 1, |t| t.col);
            return Err(syntax(line_no, col, format!("row has {} entries, expected {n}", toks.len())));
        }
        rows.push(toks.iter().map(|t| parse_int(t, what)).collect::<Result<Vec<T>, _>>()?);
    }
    if let Some((line_no, _)) = lines.next() {
        return Err(syntax(line_no, 1, "unexpected content after the last row"));
    }
    Ok(rows)
}

pub fn parse_scheme_file(text: &str) -> Result<ColorMatrix, FormatError> {
    parse_scheme_document(text).map(|f| f.cm)
}

pub fn parse_scheme_document(text: &str) -> Result<SchemeFile, FormatError> {
    let metadata: Vec<String> = text
        .lines()
        .filter_map(|l| l.trim_start().strip_prefix('#'))
        .map(|l| l.trim().to_string())
        .collect();
    let mut lines = content_lines(text);
    let Some((first_no, first)) = lines.next() else {
        return Err(syntax(1, 1, "empty scheme file"));
    };
    let cm = if first.trim_start().starts_with('[') {
        parse_gap_matrix(text)?
    } else {
        let header = tokens(first_no, first);
        if header.len() != 2 {
            return Err(syntax(first_no, 1, "expected a header `n r`"));
        }
        let n: usize = parse_int(&header[0], "the order n")?;
        let r: usize = parse_int(&header[1], "the rank r")?;
        if n == 0 {
            return Err(syntax(first_no, header[0].col, "order must be positive"));
        }
        let rows: Vec<Vec<usize>> = parse_rows(&mut lines, n, first_no, "a color")?;
        for (i, row) in rows.iter().enumerate() {
            if let Some(j) = row.iter().position(|&c| c >= r) {
                let (line_no, line) = content_lines(text).nth(i + 1).expect("row exists");
                let col = tokens(line_no, line)[j].col;
                return Err(syntax(line_no, col, format!("color {} is not below the rank {r}", row[j])));
            }
        }
        let cm = validate_rainbow(&rows)?;
        if cm.rank() != r {
            return Err(FormatError::Validation(RainbowError::NotAPartition(format!(
                "header declares rank {r}, the matrix uses {} colors",
                cm.rank()
            ))));
        }
        cm
    };
    Ok(SchemeFile { cm, metadata })
}

/// `[[a, b, ...], ...]`, with 1-based colors shifted down.
fn parse_gap_matrix(text: &str) -> Result<ColorMatrix, FormatError> {
    let mut pos = (1usize, 0usize);
    let mut chars = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim_start().starts_with('#') {
            continue;
        }
        for (j, ch) in line.chars().enumerate() {
            chars.push((ch, i + 1, j + 1));
        }
        chars.push(('\n', i + 1, line.chars().count() + 1));
    }
    let mut k = 0;
    let skip_ws = |k: &mut usize| {
        while *k < chars.len() && chars[*k].0.is_whitespace() {
            *k += 1;
        }
    };
    let expect = |k: &mut usize, want: char, pos: &mut (usize, usize)| -> Result<(), FormatError> {
        skip_ws(k);
        match chars.get(*k) {
            Some(&(c, l, col)) if c == want => {
                *pos = (l, col);
                *k += 1;
                Ok(())
            }
            Some(&(c, l, col)) => Err(syntax(l, col, format!("expected `{want}`, found `{c}`"))),
            None => Err(syntax(pos.0, pos.1 + 1, format!("expected `{want}`, found end of input"))),
        }
    };
    let peek = |k: &mut usize| -> Option<(char, usize, usize)> {
        skip_ws(k);
        chars.get(*k).copied()
    };

    expect(&mut k, '[', &mut pos)?;
    let mut rows: Vec<Vec<usize>> = Vec::new();
    loop {
        expect(&mut k, '[', &mut pos)?;
        let mut row = Vec::new();
        loop {
            let Some((c, l, col)) = peek(&mut k) else {
                return Err(syntax(pos.0, pos.1 + 1, "unterminated row"));
            };
            if !c.is_ascii_digit() {
                return Err(syntax(l, col, format!("expected a color, found `{c}`")));
            }
            let mut value: usize = 0;
            while let Some(&(d, _, _)) = chars.get(k).filter(|x| x.0.is_ascii_digit()) {
                value = value
                    .checked_mul(10)
                    .and_then(|v| v.checked_add(d as usize - '0' as usize))
                    .ok_or_else(|| syntax(l, col, "color too large"))?;
                k += 1;
            }
            row.push(value);
            match peek(&mut k) {
                Some((',', _, _)) => k += 1,
                Some((']', l2, c2)) => {
                    pos = (l2, c2);
                    k += 1;
                    break;
                }
                Some((c, l2, c2)) => return Err(syntax(l2, c2, format!("expected `,` or `]`, found `{c}`"))),
                None => return Err(syntax(pos.0, pos.1 + 1, "unterminated row")),
            }
        }
        rows.push(row);
        match peek(&mut k) {
            Some((',', _, _)) => k += 1,
            Some((']', _, _)) => {
                k += 1;
                break;
            }
            Some((c, l, col)) => return Err(syntax(l, col, format!("expected `,` or `]`, found `{c}`"))),
            None => return Err(syntax(pos.0, pos.1 + 1, "unterminated matrix")),
        }
    }
    // a trailing `;` as written by GAP is allowed
    if let Some((';', _, _)) = peek(&mut k) {
        k += 1;
    }
    if let Some((c, l, col)) = peek(&mut k) {
        return Err(syntax(l, col, format!("unexpected `{c}` after the matrix")));
    }
    let min = rows.iter().flatten().copied().min().unwrap_or(0);
    if min == 1 {
        for x in rows.iter_mut().flatten() {
            *x -= 1;
        }
    }
    Ok(validate_rainbow(&rows)?)
}

/// Canonical native serialization.
pub fn serialize_scheme(cm: &ColorMatrix) -> String {
    let canon = cm.canonical();
    let n = canon.order();
    let width = (canon.rank().saturating_sub(1)).to_string().len();
    let mut out = format!("{n} {}\n", canon.rank());
    for row in canon.rows() {
        let cells: Vec<String> = row.iter().map(|c| format!("{c:>width$}")).collect();
        out.push_str(&cells.join(" "));
        out.push('\n');
    }
    out
}

pub fn parse_loop_file(text: &str) -> Result<NormalizedLoop, FormatError> {
    let mut lines = content_lines(text);
    let Some((first_no, first)) = lines.next() else {
        return Err(syntax(1, 1, "empty loop file"));
    };
    let header = tokens(first_no, first);
    if header.len() != 1 {
        return Err(syntax(first_no, 1, "expected a header `n`"));
    }
    let n: usize = parse_int(&header[0], "the order n")?;
    if n == 0 {
        return Err(syntax(first_no, header[0].col, "order must be positive"));
    }
    let rows: Vec<Vec<usize>> = parse_rows(&mut lines, n, first_no, "an element")?;
    Ok(loop_from_table(&rows)?)
}

pub fn serialize_loop(l: &CayleyTable) -> String {
    let n = l.order();
    let width = (n.saturating_sub(1)).to_string().len();
    let mut out = format!("{n}\n");
    for row in l.rows() {
        let cells: Vec<String> = row.iter().map(|c| format!("{c:>width$}")).collect();
        out.push_str(&cells.join(" "));
        out.push('\n');
    }
    out
}

/// An integer matrix file: a line `n` followed by `n` rows.
pub fn parse_matrix_file(text: &str) -> Result<ExactMatrix, FormatError> {
    let mut lines = content_lines(text);
    let Some((first_no, first)) = lines.next() else {
        return Err(syntax(1, 1, "empty matrix file"));
    };
    let header = tokens(first_no, first);
    if header.len() != 1 {
        return Err(syntax(first_no, 1, "expected a header `n`"));
    }
    let n: usize = parse_int(&header[0], "the order n")?;
    if n == 0 {
        return Err(syntax(first_no, header[0].col, "order must be positive"));
    }
    let rows: Vec<Vec<i64>> = parse_rows(&mut lines, n, first_no, "an integer")?;
    let flat: Vec<i64> = rows.into_iter().flatten().collect();
    Ok(ExactMatrix::from_integers(n, &flat))
}

pub const DEFAULT_CLOSURE_ORDER: usize = 128;
pub const DEFAULT_SEARCH_ORDER: usize = 8;
pub const MAX_ORDER_VAR: &str = "JORDANLAB_MAX_ORDER";

/// Desk-scale bounds: closures and exhaustive searches refuse larger orders.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub closure_order: usize,
    pub search_order: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            closure_order: DEFAULT_CLOSURE_ORDER,
            search_order: DEFAULT_SEARCH_ORDER,
        }
    }
}

impl fmt::Display for Limits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "closure:{},search:{}", self.closure_order, self.search_order)
    }
}

impl Limits {
    /// Parses `N` (both bounds) or `closure:N,search:M` (either part optional).
    pub fn parse(spec: &str) -> Option<Limits> {
        let spec = spec.trim();
        if let Ok(n) = spec.parse::<usize>() {
            return Some(Limits {
                closure_order: n,
                search_order: n,
            });
        }
        let mut limits = Limits::default();
        for part in spec.split(',') {
            let (key, value) = part.split_once(':')?;
            let value: usize = value.trim().parse().ok()?;
            match key.trim() {
                "closure" => limits.closure_order = value,
                "search" => limits.search_order = value,
                _ => return None,
            }
        }
        Some(limits)
    }

    /// Defaults, overridden by `JORDANLAB_MAX_ORDER` when it parses.
    pub fn from_env() -> Limits {
        std::env::var(MAX_ORDER_VAR)
            .ok()
            .and_then(|v| Limits::parse(&v))
            .unwrap_or_default()
    }
}
