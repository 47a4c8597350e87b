use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Pattern, WeightedMatrix};
use crate::error::{Error, Result};

/// On-disk network description. Edges point in the influence direction `u -> v`;
/// `weights`, when present, is parallel to `edges`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphFile {
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
}

impl GraphFile {
    pub fn from_pattern(pattern: &Pattern) -> Self {
        Self {
            n: pattern.n(),
            edges: pattern.edges().map(|(u, v)| [u, v]).collect(),
            weights: None,
        }
    }

    pub fn pattern(&self) -> Result<Pattern> {
        Pattern::from_edges(self.n, self.edges.iter().map(|e| (e[0], e[1])))
    }

    /// Weighted system matrix, if the file carries weights. A repeated edge keeps
    /// its last weight.
    pub fn weighted(&self) -> Result<Option<WeightedMatrix>> {
        let Some(weights) = &self.weights else {
            return Ok(None);
        };
        if weights.len() != self.edges.len() {
            return Err(Error::Parse(format!(
                "{} weights for {} edges",
                weights.len(),
                self.edges.len()
            )));
        }
        let pattern = self.pattern()?;
        let mut m = WeightedMatrix::zeros(self.n, self.n);
        for (e, &w) in self.edges.iter().zip(weights) {
            if w == 0.0 || !w.is_finite() {
                return Err(Error::Parse(format!(
                    "edge {} -> {} has weight {w}; weights must be finite and nonzero",
                    e[0], e[1]
                )));
            }
            m.set(e[1], e[0], w);
        }
        debug_assert!(m.supported_by(&pattern));
        Ok(Some(m))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: GraphFile = serde_json::from_str(text)?;
        file.pattern()?;
        Ok(file)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }
}

/// Loads a graph from JSON, or from Matrix Market when the extension is `.mtx`.
pub fn read_graph(path: impl AsRef<Path>) -> Result<GraphFile> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("mtx")) {
        read_matrix_market(&text)
    } else {
        GraphFile::from_json(&text)
    }
}

/// Parses a square Matrix Market coordinate file. Entry `(i, j)` (1-based) becomes
/// the influence edge `j-1 -> i-1`; numeric values, when present, become weights.
pub fn read_matrix_market(text: &str) -> Result<GraphFile> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty Matrix Market file".into()))?;
    let tokens: Vec<String> = header.split_whitespace().map(str::to_lowercase).collect();
    if tokens.len() < 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        return Err(Error::Parse(format!("bad Matrix Market header: {header}")));
    }
    if tokens[2] != "coordinate" {
        return Err(Error::Parse("only coordinate Matrix Market files are supported".into()));
    }
    let has_values = match tokens[3].as_str() {
        "pattern" => false,
        "real" | "integer" | "double" => true,
        other => return Err(Error::Parse(format!("unsupported field type {other}"))),
    };
    let symmetric = match tokens[4].as_str() {
        "general" => false,
        "symmetric" => true,
        other => return Err(Error::Parse(format!("unsupported symmetry {other}"))),
    };

    let mut body = lines
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('%'));
    let size_line = body
        .next()
        .ok_or_else(|| Error::Parse("missing size line".into()))?;
    let dims: Vec<usize> = size_line
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| Error::Parse(format!("bad size line: {size_line}"))))
        .collect::<Result<_>>()?;
    if dims.len() != 3 {
        return Err(Error::Parse(format!("bad size line: {size_line}")));
    }
    let (rows, cols, nnz) = (dims[0], dims[1], dims[2]);
    if rows != cols {
        return Err(Error::NotSquare { rows, cols });
    }

    let mut edges = Vec::with_capacity(nnz);
    let mut weights = Vec::with_capacity(nnz);
    for line in body {
        let t: Vec<&str> = line.split_whitespace().collect();
        let parse_idx = |s: &str| -> Result<usize> {
            let v: usize = s
                .parse()
                .map_err(|_| Error::Parse(format!("bad index in line: {line}")))?;
            if v == 0 || v > rows {
                return Err(Error::Parse(format!("index out of range in line: {line}")));
            }
            Ok(v - 1)
        };
        if t.len() < 2 {
            return Err(Error::Parse(format!("bad entry line: {line}")));
        }
        let (i, j) = (parse_idx(t[0])?, parse_idx(t[1])?);
        let value = if has_values {
            let raw = t
                .get(2)
                .ok_or_else(|| Error::Parse(format!("missing value in line: {line}")))?;
            Some(
                raw.parse::<f64>()
                    .map_err(|_| Error::Parse(format!("bad value in line: {line}")))?,
            )
        } else {
            None
        };
        let mut push = |row: usize, col: usize| {
            edges.push([col, row]);
            if let Some(v) = value {
                weights.push(v);
            }
        };
        push(i, j);
        if symmetric && i != j {
            push(j, i);
        }
    }

    let mut file = GraphFile {
        n: rows,
        edges,
        weights: has_values.then_some(weights),
    };
    // explicit zeros carry no structure
    if let Some(ws) = &file.weights {
        let keep: Vec<bool> = ws.iter().map(|w| *w != 0.0).collect();
        let mut k = keep.iter();
        file.edges.retain(|_| *k.next().unwrap());
        file.weights = Some(ws.iter().copied().filter(|w| *w != 0.0).collect());
    }
    Ok(file)
}
