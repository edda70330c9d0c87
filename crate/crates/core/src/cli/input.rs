//! Algebra input files.
//!
//! ```toml
//! name = "heisenberg plus R^2"
//! dim = 5
//!
//! [[brackets]]
//! i = 1
//! j = 2
//! k = 3
//! value = 1.0
//! ```
//!
//! Indices are 1-based and each record sets `[E_i, E_j] = value·E_k` for
//! `i < j`; `[E_j, E_i]` follows by antisymmetry. Triples not listed are zero.

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;

use serde::Deserialize;
use toml::Spanned;

use crate::algebra::{BracketEntry, StructureConstants};

/// A file that failed to parse, with the offending line and field when known.
#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub path: String,
    pub line: Option<usize>,
    pub field: Option<String>,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.path)?;
        if let Some(line) = self.line {
            write!(f, ":{line}")?;
        }
        if let Some(field) = &self.field {
            write!(f, ": field `{field}`")?;
        }
        write!(f, ": {}", self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraFile {
    pub name: Option<String>,
    pub dim: usize,
    pub brackets: Vec<BracketEntry>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    name: Option<String>,
    dim: Spanned<i64>,
    #[serde(default)]
    brackets: Vec<Spanned<RawBracket>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBracket {
    i: Spanned<i64>,
    j: Spanned<i64>,
    k: Spanned<i64>,
    value: Spanned<toml::Value>,
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

impl AlgebraFile {
    pub fn read(path: &Path) -> Result<Self, ParseError> {
        let label = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|e| ParseError {
            path: label.clone(),
            line: None,
            field: None,
            message: e.to_string(),
        })?;
        Self::parse(&text, &label)
    }

    /// Parses and validates file contents; `label` names the source in errors.
    pub fn parse(text: &str, label: &str) -> Result<Self, ParseError> {
        let err = |offset: Option<usize>, field: Option<&str>, message: String| ParseError {
            path: label.to_string(),
            line: offset.map(|o| line_of(text, o)),
            field: field.map(str::to_string),
            message,
        };
        let raw: RawFile = toml::from_str(text).map_err(|e| {
            err(
                e.span().map(|s| s.start),
                None,
                e.message().trim().to_string(),
            )
        })?;

        let dim_at = raw.dim.span().start;
        let dim = *raw.dim.get_ref();
        if dim < 1 {
            return Err(err(
                Some(dim_at),
                Some("dim"),
                format!("must be at least 1, got {dim}"),
            ));
        }
        let dim = dim as usize;

        let mut seen = BTreeSet::new();
        let mut brackets = Vec::with_capacity(raw.brackets.len());
        for rec in &raw.brackets {
            let b = rec.get_ref();
            let mut idx = [0usize; 3];
            for (slot, (name, v)) in idx.iter_mut().zip([("i", &b.i), ("j", &b.j), ("k", &b.k)]) {
                let x = *v.get_ref();
                if x < 1 || x as usize > dim {
                    return Err(err(
                        Some(v.span().start),
                        Some(name),
                        format!("index {x} outside 1..={dim}"),
                    ));
                }
                *slot = x as usize;
            }
            let [i, j, k] = idx;
            if i >= j {
                return Err(err(
                    Some(b.j.span().start),
                    Some("j"),
                    format!("need i < j, got i = {i}, j = {j}"),
                ));
            }
            let value = match b.value.get_ref() {
                toml::Value::Float(v) => *v,
                toml::Value::Integer(v) => *v as f64,
                other => {
                    return Err(err(
                        Some(b.value.span().start),
                        Some("value"),
                        format!("expected a number, found {}", other.type_str()),
                    ))
                }
            };
            if !value.is_finite() {
                return Err(err(
                    Some(b.value.span().start),
                    Some("value"),
                    "must be finite".into(),
                ));
            }
            if !seen.insert((i, j, k)) {
                return Err(err(
                    Some(rec.span().start),
                    Some("brackets"),
                    format!("duplicate triple ({i}, {j}, {k})"),
                ));
            }
            brackets.push(BracketEntry::new(i, j, k, value));
        }
        Ok(Self {
            name: raw.name,
            dim,
            brackets,
        })
    }

    pub fn structure_constants(&self) -> crate::error::Result<StructureConstants> {
        StructureConstants::from_brackets(self.dim, &self.brackets)
    }

    /// Serializes back to the input format; values keep full precision.
    pub fn from_algebra(name: Option<&str>, alpha: &StructureConstants) -> Self {
        Self {
            name: name.map(str::to_string),
            dim: alpha.dim(),
            brackets: alpha.entries(),
        }
    }

    pub fn to_toml(&self) -> String {
        let mut out = String::new();
        if let Some(name) = &self.name {
            out.push_str(&format!("name = {}\n", toml::Value::String(name.clone())));
        }
        out.push_str(&format!("dim = {}\n", self.dim));
        for b in &self.brackets {
            out.push_str(&format!(
                "\n[[brackets]]\ni = {}\nj = {}\nk = {}\nvalue = {:?}\n",
                b.i, b.j, b.k, b.value
            ));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Result<AlgebraFile, ParseError> {
        AlgebraFile::parse(s, "t.toml")
    }

    #[test]
    fn parses_integer_and_float_values() {
        let f = parse("dim = 3\n[[brackets]]\ni = 1\nj = 2\nk = 3\nvalue = 2\n").unwrap();
        assert_eq!(f.brackets, vec![BracketEntry::new(1, 2, 3, 2.0)]);
        let f = parse("name = \"h\"\ndim = 3\nbrackets = [{i = 1, j = 2, k = 3, value = -0.5}]\n")
            .unwrap();
        assert_eq!(f.name.as_deref(), Some("h"));
        assert_eq!(f.brackets[0].value, -0.5);
    }

    #[test]
    fn empty_bracket_list_is_abelian() {
        let f = parse("dim = 5\n").unwrap();
        assert!(f.structure_constants().unwrap().is_abelian());
    }

    #[test]
    fn reports_line_and_field() {
        let e = parse("dim = 3\n\n[[brackets]]\ni = 1\nj = 2\nk = 4\nvalue = 1.0\n").unwrap_err();
        assert_eq!((e.line, e.field.as_deref()), (Some(6), Some("k")));
        let e = parse("dim = 3\n[[brackets]]\ni = 2\nj = 1\nk = 3\nvalue = 1.0\n").unwrap_err();
        assert_eq!((e.line, e.field.as_deref()), (Some(4), Some("j")));
        let e = parse("dim = 3\n[[brackets]]\ni = 1\nj = 2\nk = 3\nvalue = \"x\"\n").unwrap_err();
        assert_eq!((e.line, e.field.as_deref()), (Some(6), Some("value")));
        let e = parse("dim = 0\n").unwrap_err();
        assert_eq!(e.field.as_deref(), Some("dim"));
    }

    #[test]
    fn rejects_duplicates_and_unknown_keys() {
        let dup = "dim = 3\n[[brackets]]\ni = 1\nj = 2\nk = 3\nvalue = 1.0\n[[brackets]]\ni = 1\nj = 2\nk = 3\nvalue = 2.0\n";
        let e = parse(dup).unwrap_err();
        assert!(e.message.contains("duplicate"), "{e}");
        assert_eq!(e.line, Some(7));
        let e = parse("dim = 3\nsize = 4\n").unwrap_err();
        assert_eq!(e.line, Some(2), "{e}");
        assert!(parse("dim = \n").unwrap_err().line.is_some());
    }

    #[test]
    fn toml_round_trip() {
        let f = parse("name = \"a \\\"b\\\"\"\ndim = 5\nbrackets = [{i = 1, j = 2, k = 5, value = 0.1}, {i = 3, j = 4, k = 5, value = 1e-300}]\n").unwrap();
        let back = parse(&f.to_toml()).unwrap();
        assert_eq!(f, back);
    }
}
