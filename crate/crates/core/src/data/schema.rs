use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Kind of a column. Ordinal levels are listed lowest first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum AttributeKind {
    Nominal,
    Ordinal(Vec<String>),
    Numerical,
}

impl AttributeKind {
    pub fn is_categorical(&self) -> bool {
        !matches!(self, AttributeKind::Numerical)
    }

    pub fn is_numerical(&self) -> bool {
        matches!(self, AttributeKind::Numerical)
    }

    /// Position of `label` in the level list of an ordinal kind.
    pub fn rank_of(&self, label: &str) -> Option<usize> {
        match self {
            AttributeKind::Ordinal(levels) => levels.iter().position(|l| l == label),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    pub kind: AttributeKind,
}

/// Ordered column list of a table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schema {
    columns: Vec<Column>,
}

impl Schema {
    /// Builds a schema, checking names are unique and ordinal levels valid.
    pub fn new(columns: Vec<Column>) -> Result<Self> {
        if columns.is_empty() {
            return Err(Error::invalid("schema needs at least one column"));
        }
        let mut seen = HashSet::new();
        for (i, col) in columns.iter().enumerate() {
            if !seen.insert(col.name.as_str()) {
                return Err(Error::Schema { line: i + 1, message: format!("duplicate column `{}`", col.name) });
            }
            if let AttributeKind::Ordinal(levels) = &col.kind {
                check_levels(levels).map_err(|message| Error::Schema { line: i + 1, message })?;
            }
        }
        Ok(Schema { columns })
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn column(&self, r: usize) -> &Column {
        &self.columns[r]
    }

    pub fn kind(&self, r: usize) -> &AttributeKind {
        &self.columns[r].kind
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    /// Schema with column `r` removed; `None` if that would leave it empty.
    pub fn without(&self, r: usize) -> Option<Schema> {
        if self.columns.len() <= 1 || r >= self.columns.len() {
            return None;
        }
        let mut columns = self.columns.clone();
        columns.remove(r);
        Some(Schema { columns })
    }
}

impl fmt::Display for Schema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for col in &self.columns {
            match &col.kind {
                AttributeKind::Nominal => writeln!(f, "{}:nominal", col.name)?,
                AttributeKind::Numerical => writeln!(f, "{}:numerical", col.name)?,
                AttributeKind::Ordinal(levels) => writeln!(f, "{}:ordinal:{}", col.name, levels.join("<"))?,
            }
        }
        Ok(())
    }
}

fn check_levels(levels: &[String]) -> std::result::Result<(), String> {
    if levels.is_empty() || levels.iter().any(|l| l.is_empty()) {
        return Err("ordinal column needs a non-empty level list".into());
    }
    let mut seen = HashSet::new();
    for l in levels {
        if !seen.insert(l) {
            return Err(format!("duplicate ordinal level `{l}`"));
        }
    }
    Ok(())
}

/// Parses the line-oriented schema format:
///
/// ```text
/// # comment
/// age:numerical
/// menopause:ordinal:lt40<ge40<premeno
/// node-caps:nominal
/// ```
pub fn parse_schema(text: &str) -> Result<Schema> {
    let mut columns: Vec<Column> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |message: String| Error::Schema { line: line_no, message };

        let mut parts = line.splitn(3, ':');
        let name = parts.next().unwrap_or("").trim();
        let kind = parts.next().map(str::trim);
        let levels = parts.next();
        if name.is_empty() {
            return Err(err("missing column name".into()));
        }
        let kind = match (kind, levels) {
            (Some("nominal"), None) => AttributeKind::Nominal,
            (Some("numerical"), None) => AttributeKind::Numerical,
            (Some("ordinal"), Some(level_text)) => {
                let levels: Vec<String> = if level_text.trim().is_empty() {
                    Vec::new()
                } else {
                    level_text.split('<').map(|l| l.trim().to_string()).collect()
                };
                check_levels(&levels).map_err(err)?;
                AttributeKind::Ordinal(levels)
            }
            (Some("ordinal"), None) => return Err(err("ordinal column needs a non-empty level list".into())),
            (Some(k @ ("nominal" | "numerical")), Some(_)) => {
                return Err(err(format!("{k} column takes no level list")))
            }
            (Some(other), _) => return Err(err(format!("unknown kind `{other}`"))),
            (None, _) => return Err(err("missing `:kind`".into())),
        };
        if columns.iter().any(|c| c.name == name) {
            return Err(err(format!("duplicate column `{name}`")));
        }
        columns.push(Column { name: name.to_string(), kind });
    }
    if columns.is_empty() {
        return Err(Error::Schema { line: 0, message: "schema declares no columns".into() });
    }
    Ok(Schema { columns })
}
