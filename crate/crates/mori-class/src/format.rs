//! The line-based description format consumed by the CLI.
//!
//! A description file holds exactly one `[mfs]` section of `key = value`
//! pairs. Values are 64-bit signed integers, double-quoted strings, or
//! bracketed integer vectors `[..]` and matrices `[[..], [..]]`; `#` starts
//! a comment. Keys are fixed per family:
//!
//! ```text
//! [mfs]
//! name = "X as conic bundle over the plane"   # optional everywhere
//! base_dim = 2
//! kind = "singular"            # smooth | singular
//! gram = [[1]]                 # intersection form of the base surface
//! c1Y = [3]
//! eY = 3
//! c1rel = [-8]                 # singular: 2u^2 = c1 u + c2 normalization
//! c2rel = -8
//! ```
//!
//! `base_dim = 0` takes `degree` and `eX`; `base_dim = 1` takes `K` plus
//! `twist` (K = 8, 9) or `d`, `relK3`, `eX` (K <= 6); `base_dim = 2` smooth
//! takes `c1E`, `c2E` instead of the relative classes. Unknown keys, keys of
//! the wrong family, duplicates and out-of-range integers are rejected with
//! the line and column of the offending text.

use std::collections::HashMap;

use crate::intmat::IntMatrix;
use crate::lattice::BilinearLattice;
use crate::mfs::{
    DelPezzoFibration, FanoRankOne, MfsDescription, SingularConicBundle, SmoothConicBundle,
    SurfaceData,
};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
#[error("{line}:{col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl ParseError {
    fn new(line: usize, col: usize, message: impl Into<String>) -> Self {
        ParseError {
            line,
            col,
            message: message.into(),
        }
    }
}

/// A parsed description file: optional name plus the family data.
#[derive(Debug, Clone, PartialEq)]
pub struct MfsFile {
    pub name: Option<String>,
    pub description: MfsDescription,
}

#[derive(Debug, Clone, PartialEq)]
enum Value {
    Int(i64),
    Str(String),
    Vector(Vec<i64>),
    Matrix(Vec<Vec<i64>>),
}

impl Value {
    fn type_name(&self) -> &'static str {
        match self {
            Value::Int(_) => "integer",
            Value::Str(_) => "string",
            Value::Vector(_) => "vector",
            Value::Matrix(_) => "matrix",
        }
    }
}

const KEYS: &[&str] = &[
    "name", "base_dim", "kind", "gram", "c1Y", "eY", "c1E", "c2E", "c1rel", "c2rel", "K", "d",
    "relK3", "eX", "twist", "degree",
];

struct Entry {
    value: Value,
    line: usize,
    col: usize,
}

pub fn parse_str(text: &str) -> Result<MfsFile, ParseError> {
    let mut entries: HashMap<String, Entry> = HashMap::new();
    let mut section_line: Option<usize> = None;
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = strip_comment(raw);
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if trimmed == "[mfs]" {
            if section_line.is_some() {
                return Err(ParseError::new(
                    lineno,
                    1,
                    "a description file holds exactly one [mfs] section",
                ));
            }
            section_line = Some(lineno);
            continue;
        }
        if trimmed.starts_with('[') && trimmed.ends_with(']') && !trimmed.contains('=') {
            return Err(ParseError::new(
                lineno,
                1,
                format!("unknown section {trimmed}; only [mfs] is recognized"),
            ));
        }
        if section_line.is_none() {
            return Err(ParseError::new(lineno, 1, "key outside an [mfs] section"));
        }
        let eq = line.find('=').ok_or_else(|| {
            ParseError::new(
                lineno,
                1,
                format!("expected `key = value`, got `{trimmed}`"),
            )
        })?;
        let key = line[..eq].trim().to_string();
        let keycol = line.find(key.as_str()).map(|c| c + 1).unwrap_or(1);
        if !KEYS.contains(&key.as_str()) {
            return Err(ParseError::new(
                lineno,
                keycol,
                format!("unknown key `{key}`"),
            ));
        }
        if entries.contains_key(&key) {
            return Err(ParseError::new(
                lineno,
                keycol,
                format!("duplicate key `{key}`"),
            ));
        }
        let vtext = line[eq + 1..].trim();
        let vcol = eq + 2 + (line[eq + 1..].len() - line[eq + 1..].trim_start().len());
        let value = parse_value(vtext, lineno, vcol)?;
        entries.insert(
            key,
            Entry {
                value,
                line: lineno,
                col: vcol,
            },
        );
    }
    let section_line =
        section_line.ok_or_else(|| ParseError::new(1, 1, "missing [mfs] section"))?;
    build_description(entries, section_line)
}

fn strip_comment(line: &str) -> &str {
    let mut in_string = false;
    for (i, ch) in line.char_indices() {
        match ch {
            '"' => in_string = !in_string,
            '#' if !in_string => return &line[..i],
            _ => {}
        }
    }
    line
}

fn parse_value(text: &str, line: usize, col: usize) -> Result<Value, ParseError> {
    if text.is_empty() {
        return Err(ParseError::new(line, col, "missing value"));
    }
    if let Some(stripped) = text.strip_prefix('"') {
        let inner = stripped
            .strip_suffix('"')
            .ok_or_else(|| ParseError::new(line, col, "unterminated string"))?;
        if inner.contains('"') {
            return Err(ParseError::new(line, col, "embedded quote in string"));
        }
        return Ok(Value::Str(inner.to_string()));
    }
    if text.starts_with("[[") {
        let inner = text
            .strip_prefix('[')
            .and_then(|t| t.strip_suffix(']'))
            .ok_or_else(|| ParseError::new(line, col, "unterminated matrix"))?;
        let mut rows = Vec::new();
        let mut rest = inner.trim();
        while !rest.is_empty() {
            let start = rest
                .find('[')
                .ok_or_else(|| ParseError::new(line, col, "expected `[` opening a matrix row"))?;
            let end = rest[start..]
                .find(']')
                .ok_or_else(|| ParseError::new(line, col, "unterminated matrix row"))?
                + start;
            rows.push(parse_int_list(&rest[start + 1..end], line, col)?);
            rest = rest[end + 1..].trim_start_matches([',', ' ', '\t']);
        }
        if rows.is_empty() {
            return Err(ParseError::new(line, col, "empty matrix"));
        }
        return Ok(Value::Matrix(rows));
    }
    if let Some(inner) = text.strip_prefix('[') {
        let inner = inner
            .strip_suffix(']')
            .ok_or_else(|| ParseError::new(line, col, "unterminated vector"))?;
        return Ok(Value::Vector(parse_int_list(inner, line, col)?));
    }
    parse_int(text, line, col).map(Value::Int)
}

fn parse_int_list(text: &str, line: usize, col: usize) -> Result<Vec<i64>, ParseError> {
    let mut out = Vec::new();
    for piece in text.split(',') {
        let p = piece.trim();
        if p.is_empty() {
            continue;
        }
        out.push(parse_int(p, line, col)?);
    }
    if out.is_empty() {
        return Err(ParseError::new(line, col, "empty integer list"));
    }
    Ok(out)
}

fn parse_int(text: &str, line: usize, col: usize) -> Result<i64, ParseError> {
    text.parse::<i64>().map_err(|_| {
        ParseError::new(
            line,
            col,
            format!("`{text}` is not an integer fitting 64 bits"),
        )
    })
}

struct Fields {
    entries: HashMap<String, Entry>,
    section_line: usize,
}

impl Fields {
    fn take_int(&mut self, key: &str) -> Result<Option<(i64, usize)>, ParseError> {
        match self.entries.remove(key) {
            None => Ok(None),
            Some(Entry {
                value: Value::Int(v),
                line,
                ..
            }) => Ok(Some((v, line))),
            Some(e) => Err(ParseError::new(
                e.line,
                e.col,
                format!("`{key}` must be an integer, got a {}", e.value.type_name()),
            )),
        }
    }

    fn need_int(&mut self, key: &str) -> Result<(i64, usize), ParseError> {
        self.take_int(key)?
            .ok_or_else(|| ParseError::new(self.section_line, 1, format!("missing key `{key}`")))
    }

    fn need_vector(&mut self, key: &str) -> Result<(Vec<i64>, usize), ParseError> {
        match self.entries.remove(key) {
            None => Err(ParseError::new(
                self.section_line,
                1,
                format!("missing key `{key}`"),
            )),
            Some(Entry {
                value: Value::Vector(v),
                line,
                ..
            }) => Ok((v, line)),
            Some(e) => Err(ParseError::new(
                e.line,
                e.col,
                format!("`{key}` must be a vector, got a {}", e.value.type_name()),
            )),
        }
    }

    fn need_matrix(&mut self, key: &str) -> Result<(Vec<Vec<i64>>, usize), ParseError> {
        match self.entries.remove(key) {
            None => Err(ParseError::new(
                self.section_line,
                1,
                format!("missing key `{key}`"),
            )),
            Some(Entry {
                value: Value::Matrix(v),
                line,
                ..
            }) => Ok((v, line)),
            Some(e) => Err(ParseError::new(
                e.line,
                e.col,
                format!("`{key}` must be a matrix, got a {}", e.value.type_name()),
            )),
        }
    }

    fn take_string(&mut self, key: &str) -> Result<Option<String>, ParseError> {
        match self.entries.remove(key) {
            None => Ok(None),
            Some(Entry {
                value: Value::Str(s),
                ..
            }) => Ok(Some(s)),
            Some(e) => Err(ParseError::new(
                e.line,
                e.col,
                format!("`{key}` must be a string, got a {}", e.value.type_name()),
            )),
        }
    }

    fn reject_leftovers(&self) -> Result<(), ParseError> {
        if let Some((key, e)) = self.entries.iter().min_by_key(|(_, e)| e.line) {
            return Err(ParseError::new(
                e.line,
                e.col,
                format!("key `{key}` is not allowed for this family"),
            ));
        }
        Ok(())
    }
}

fn build_description(
    entries: HashMap<String, Entry>,
    section_line: usize,
) -> Result<MfsFile, ParseError> {
    let mut fields = Fields {
        entries,
        section_line,
    };
    let name = fields.take_string("name")?;
    let (base_dim, bd_line) = fields.need_int("base_dim")?;
    let description = match base_dim {
        0 => {
            let (degree, dline) = fields.need_int("degree")?;
            let (euler, _) = fields.need_int("eX")?;
            fields.reject_leftovers()?;
            let f = FanoRankOne::new(degree, euler)
                .map_err(|e| ParseError::new(dline, 1, e.to_string()))?;
            MfsDescription::Fano(f)
        }
        1 => {
            let (k, kline) = fields.need_int("K")?;
            let d = fields.take_int("d")?.map(|x| x.0);
            let rel_k3 = fields.take_int("relK3")?.map(|x| x.0);
            let euler = fields.take_int("eX")?.map(|x| x.0);
            let twist = fields.take_int("twist")?.map(|x| x.0);
            fields.reject_leftovers()?;
            let dp = DelPezzoFibration::from_parts(k, d, rel_k3, euler, twist)
                .map_err(|e| ParseError::new(kline, 1, e.to_string()))?;
            if matches!(
                dp,
                DelPezzoFibration::QuadricBundle { .. } | DelPezzoFibration::PlaneBundle { .. }
            ) && (d.is_some() || rel_k3.is_some() || euler.is_some())
            {
                return Err(ParseError::new(
                    kline,
                    1,
                    "for K = 8 or 9 only `twist` may be given; relK3 and eX are determined",
                ));
            }
            if matches!(dp, DelPezzoFibration::LowDegree { .. }) && twist.is_some() {
                return Err(ParseError::new(
                    kline,
                    1,
                    "`twist` only applies to K = 8 or 9",
                ));
            }
            MfsDescription::DelPezzo(dp)
        }
        2 => {
            let kind = fields.take_string("kind")?.ok_or_else(|| {
                ParseError::new(section_line, 1, "missing key `kind` (smooth | singular)")
            })?;
            let (gram_rows, gline) = fields.need_matrix("gram")?;
            let (c1y, c1y_line) = fields.need_vector("c1Y")?;
            let (ey, _) = fields.need_int("eY")?;
            let n = gram_rows.len();
            if gram_rows.iter().any(|r| r.len() != n) {
                return Err(ParseError::new(gline, 1, "gram matrix must be square"));
            }
            let lattice = BilinearLattice::new(IntMatrix::from_rows(&gram_rows))
                .map_err(|e| ParseError::new(gline, 1, e.to_string()))?;
            let surface = SurfaceData::new(lattice, c1y, ey)
                .map_err(|e| ParseError::new(c1y_line, 1, e.to_string()))?;
            match kind.as_str() {
                "smooth" => {
                    let (c1e, eline) = fields.need_vector("c1E")?;
                    let (c2e, _) = fields.need_int("c2E")?;
                    fields.reject_leftovers()?;
                    let m = SmoothConicBundle::new(surface, c1e, c2e)
                        .map_err(|e| ParseError::new(eline, 1, e.to_string()))?;
                    MfsDescription::CbSmooth(m)
                }
                "singular" => {
                    let (c1rel, rline) = fields.need_vector("c1rel")?;
                    let (c2rel, _) = fields.need_int("c2rel")?;
                    fields.reject_leftovers()?;
                    let m = SingularConicBundle::new(surface, c1rel, c2rel)
                        .map_err(|e| ParseError::new(rline, 1, e.to_string()))?;
                    MfsDescription::CbSingular(m)
                }
                other => {
                    return Err(ParseError::new(
                        section_line,
                        1,
                        format!("kind must be \"smooth\" or \"singular\", got \"{other}\""),
                    ));
                }
            }
        }
        other => {
            return Err(ParseError::new(
                bd_line,
                1,
                format!("base_dim must be 0, 1 or 2, got {other}"),
            ));
        }
    };
    Ok(MfsFile { name, description })
}

/// Render a description in the canonical form accepted by [`parse_str`].
pub fn print(file: &MfsFile) -> String {
    let mut out = String::from("[mfs]\n");
    if let Some(name) = &file.name {
        out.push_str(&format!("name = \"{name}\"\n"));
    }
    match &file.description {
        MfsDescription::Fano(f) => {
            out.push_str("base_dim = 0\n");
            out.push_str(&format!("degree = {}\n", f.degree));
            out.push_str(&format!("eX = {}\n", f.euler));
        }
        MfsDescription::DelPezzo(dp) => {
            out.push_str("base_dim = 1\n");
            out.push_str(&format!("K = {}\n", dp.k()));
            match dp {
                DelPezzoFibration::LowDegree {
                    d, rel_k3, euler, ..
                } => {
                    out.push_str(&format!("d = {d}\n"));
                    out.push_str(&format!("relK3 = {rel_k3}\n"));
                    out.push_str(&format!("eX = {euler}\n"));
                }
                DelPezzoFibration::QuadricBundle { twist }
                | DelPezzoFibration::PlaneBundle { twist } => {
                    out.push_str(&format!("twist = {twist}\n"));
                }
            }
        }
        MfsDescription::CbSmooth(m) => {
            out.push_str("base_dim = 2\n");
            out.push_str("kind = \"smooth\"\n");
            push_surface(&mut out, &m.surface);
            out.push_str(&format!("c1E = {}\n", render_vec(m.c1e())));
            out.push_str(&format!("c2E = {}\n", m.c2e()));
        }
        MfsDescription::CbSingular(m) => {
            out.push_str("base_dim = 2\n");
            out.push_str("kind = \"singular\"\n");
            push_surface(&mut out, &m.surface);
            out.push_str(&format!("c1rel = {}\n", render_vec(m.c1rel())));
            out.push_str(&format!("c2rel = {}\n", m.c2rel()));
        }
    }
    out
}

fn push_surface(out: &mut String, s: &SurfaceData) {
    let gram = s.lattice().gram();
    let rows: Vec<String> = (0..gram.size()).map(|r| render_vec(gram.row(r))).collect();
    out.push_str(&format!("gram = [{}]\n", rows.join(", ")));
    out.push_str(&format!("c1Y = {}\n", render_vec(s.c1y())));
    out.push_str(&format!("eY = {}\n", s.euler()));
}

fn render_vec(v: &[i64]) -> String {
    let items: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("[{}]", items.join(", "))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mfs::BaseDim;

    #[test]
    fn parse_minimal_fano() {
        let f = parse_str("[mfs]\nbase_dim = 0\ndegree = 5\neX = 4\n").unwrap();
        match f.description {
            MfsDescription::Fano(ref x) => {
                assert_eq!(x.degree, 5);
                assert_eq!(x.euler, 4);
            }
            _ => panic!("wrong family"),
        }
        assert_eq!(f.description.invariants().base_dim, BaseDim::Zero);
    }

    #[test]
    fn parse_xx_conic_bundle() {
        let text = r#"
# the double cover, presented as a conic bundle
[mfs]
name = "X over the plane"
base_dim = 2
kind = "singular"
gram = [[1]]
c1Y = [3]
eY = 3
c1rel = [-8]
c2rel = -8
"#;
        let f = parse_str(text).unwrap();
        let r = f.description.invariants();
        assert_eq!(r.b3, 40);
        assert_eq!(r.k3, Some(-6));
    }

    #[test]
    fn rejects_k7_with_location() {
        let err = parse_str("[mfs]\nbase_dim = 1\nK = 7\ntwist = 0\n").unwrap_err();
        assert_eq!(err.line, 3);
        assert!(err.message.contains("{1, ..., 6, 8, 9}"), "{err}");
    }

    #[test]
    fn rejects_unknown_key() {
        let err = parse_str("[mfs]\nbase_dim = 0\ndegree = 1\neX = 4\nc3 = 7\n").unwrap_err();
        assert_eq!(err.line, 5);
        assert!(err.message.contains("unknown key"), "{err}");
    }

    #[test]
    fn rejects_wrong_family_key() {
        let err = parse_str("[mfs]\nbase_dim = 0\ndegree = 1\neX = 4\ntwist = 0\n").unwrap_err();
        assert!(err.message.contains("not allowed"), "{err}");
    }

    #[test]
    fn rejects_duplicate_and_overflow() {
        let err = parse_str("[mfs]\nbase_dim = 0\nbase_dim = 1\n").unwrap_err();
        assert!(err.message.contains("duplicate"), "{err}");
        let err =
            parse_str("[mfs]\nbase_dim = 0\ndegree = 99999999999999999999\neX = 4\n").unwrap_err();
        assert!(err.message.contains("64 bits"), "{err}");
    }

    #[test]
    fn round_trip_canonical_descriptions() {
        let sources = [
            "[mfs]\nname = \"plane bundle\"\nbase_dim = 1\nK = 9\ntwist = 0\n",
            "[mfs]\nbase_dim = 1\nK = 2\nd = 1\nrelK3 = 6\neX = -34\n",
            "[mfs]\nbase_dim = 2\nkind = \"smooth\"\ngram = [[1]]\nc1Y = [3]\neY = 3\nc1E = [0]\nc2E = 0\n",
            "[mfs]\nbase_dim = 2\nkind = \"singular\"\ngram = [[1]]\nc1Y = [3]\neY = 3\nc1rel = [-8]\nc2rel = -8\n",
        ];
        for src in sources {
            let parsed = parse_str(src).unwrap();
            let printed = print(&parsed);
            let reparsed = parse_str(&printed).unwrap();
            assert_eq!(parsed, reparsed, "round trip failed for:\n{src}");
        }
    }

    #[test]
    fn comments_and_strings_interact() {
        let f = parse_str("[mfs]\nname = \"a # not a comment\" # real comment\nbase_dim = 0\ndegree = 1\neX = 4\n")
            .unwrap();
        assert_eq!(f.name.as_deref(), Some("a # not a comment"));
    }
}
