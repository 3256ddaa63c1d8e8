//! File formats: split systems and X-diagrams as JSON, dissimilarity
//! matrices as CSV or JSON.
//!
//! Split systems:
//! - `{"n": 5, "splits": [[1,2],[2,3]]}` in interval form,
//! - `{"n": 5, "splits_sets": [[[2,3],[0,1,4,5]]]}` as set pairs on `0..=n`,
//! - `{"taxa": 6, "root": 6, "splits_sets": [...]}` for an unrooted system on
//!   `1..=taxa`, relabelled so that `root` becomes `0`.
//!
//! Any form may carry `"weights"`, one rational per listed split; trivial
//! splits that are not listed get weight `0`. Rationals are `"p/q"` strings,
//! exact decimal strings, JSON integers, or `{"num": p, "den": q}`.
//!
//! Matrices in CSV are either the full symmetric `n x n` table (cells below
//! the diagonal may be left empty) or the strict upper triangle with rows of
//! `n-1, n-2, …, 1` cells. A first row that does not parse is a header.
//! Lines starting with `#` are ignored. JSON matrices are
//! `{"n": 4, "delta": {"1,2": "5", …}}` with every pair `i < j` present;
//! values may also be `{"num": p, "den": q}`, the form written on output.
//! CRY matrices are square CSV tables.

use std::collections::{BTreeMap, BTreeSet};

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::cry::{CryError, CryMatrix};
use crate::netviz::{Edge, EdgeLabel, SplitNetwork};
use crate::metric::{DissimilarityMatrix, MetricError, WeightVector};
use crate::rational::{self, Rational};
use crate::split::{canonicalize, reroot, GeneralSplit, Split, SplitError, SplitSystem};
use crate::xdiagram::{XDiagram, XDiagramError};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("line {line}, field {field}: {message}")]
    Csv { line: u64, field: usize, message: String },
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("field `{field}`: {message}")]
    Field { field: String, message: String },
    #[error(transparent)]
    Split(#[from] SplitError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    XDiagram(#[from] XDiagramError),
    #[error(transparent)]
    Cry(#[from] CryError),
}

fn field_err(field: impl Into<String>, message: impl Into<String>) -> IoError {
    IoError::Field { field: field.into(), message: message.into() }
}

/// Accepts `"p/q"` strings, integers, and `{"num": p, "den": q}` objects.
fn rational_value(v: &Value, field: &str) -> Result<Rational, IoError> {
    let text = match v {
        Value::String(s) => s.clone(),
        Value::Object(o) => {
            let part = |key: &str| match o.get(key) {
                Some(Value::String(s)) => Ok(s.clone()),
                Some(Value::Number(x)) if x.is_i64() || x.is_u64() => Ok(x.to_string()),
                _ => Err(field_err(field, format!("\"{key}\" must be an integer"))),
            };
            format!("{}/{}", part("num")?, part("den")?)
        }
        Value::Number(x) if x.is_i64() || x.is_u64() => x.to_string(),
        Value::Number(x) => {
            return Err(field_err(field, format!("{x} is a float; write it as a string for exact parsing")))
        }
        other => return Err(field_err(field, format!("expected a rational, found {other}"))),
    };
    rational::parse(&text).map_err(|e| field_err(field, e.to_string()))
}

fn usize_value(v: &Value, field: &str) -> Result<usize, IoError> {
    v.as_u64()
        .and_then(|x| usize::try_from(x).ok())
        .ok_or_else(|| field_err(field, format!("expected a nonnegative integer, found {v}")))
}

fn usize_list(v: &Value, field: &str) -> Result<Vec<usize>, IoError> {
    v.as_array()
        .ok_or_else(|| field_err(field, "expected an array"))?
        .iter()
        .enumerate()
        .map(|(k, x)| usize_value(x, &format!("{field}[{k}]")))
        .collect()
}

fn set_pair(v: &Value, field: &str) -> Result<(Vec<usize>, Vec<usize>), IoError> {
    match v.as_array().map(Vec::as_slice) {
        Some([a, b]) => Ok((usize_list(a, &format!("{field}[0]"))?, usize_list(b, &format!("{field}[1]"))?)),
        _ => Err(field_err(field, "expected a pair of taxon lists")),
    }
}

/// A parsed split system together with its weights, if the file gave any.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystemFile {
    pub system: SplitSystem,
    pub weights: Option<WeightVector>,
}

pub fn parse_system_json(text: &str) -> Result<SystemFile, IoError> {
    let doc: Value = serde_json::from_str(text)?;
    let obj = doc.as_object().ok_or_else(|| field_err("<root>", "expected an object"))?;
    let mut listed: Vec<Option<Split>> = Vec::new();
    let n;
    if let Some(taxa) = obj.get("taxa") {
        let m = usize_value(taxa, "taxa")?;
        let root = usize_value(obj.get("root").ok_or_else(|| field_err("root", "missing"))?, "root")?;
        let sets = obj.get("splits_sets").ok_or_else(|| field_err("splits_sets", "missing"))?;
        let sets = sets.as_array().ok_or_else(|| field_err("splits_sets", "expected an array"))?;
        for (k, v) in sets.iter().enumerate() {
            let (a, b) = set_pair(v, &format!("splits_sets[{k}]"))?;
            listed.push(reroot(&a, &b, m, root)?);
        }
        n = m.checked_sub(1).ok_or_else(|| field_err("taxa", "must be positive"))?;
    } else {
        n = usize_value(obj.get("n").ok_or_else(|| field_err("n", "missing"))?, "n")?;
        if let Some(v) = obj.get("splits") {
            let arr = v.as_array().ok_or_else(|| field_err("splits", "expected an array"))?;
            for (k, s) in arr.iter().enumerate() {
                let field = format!("splits[{k}]");
                match usize_list(s, &field)?.as_slice() {
                    [lo, hi] => listed.push(Some(Split::new(*lo, *hi, n)?)),
                    _ => return Err(field_err(field, "expected [lo, hi]")),
                }
            }
        } else if let Some(v) = obj.get("splits_sets") {
            let arr = v.as_array().ok_or_else(|| field_err("splits_sets", "expected an array"))?;
            for (k, s) in arr.iter().enumerate() {
                let (a, b) = set_pair(s, &format!("splits_sets[{k}]"))?;
                listed.push(Some(canonicalize(&GeneralSplit::new(a, b, n)?, n)?));
            }
        } else {
            return Err(field_err("splits", "missing (or give splits_sets)"));
        }
    }

    let mut seen = BTreeSet::new();
    for s in listed.iter().flatten() {
        if !seen.insert(*s) {
            return Err(SplitError::Duplicate(*s).into());
        }
    }
    let system = SplitSystem::with_trivials(n, seen.iter().copied().filter(|s| !s.is_trivial()))?;

    let weights = match obj.get("weights") {
        None => None,
        Some(v) => {
            let arr = v.as_array().ok_or_else(|| field_err("weights", "expected an array"))?;
            if arr.len() != listed.len() {
                return Err(field_err(
                    "weights",
                    format!("has {} entries for {} splits", arr.len(), listed.len()),
                ));
            }
            let mut map: BTreeMap<Split, Rational> =
                system.splits().map(|s| (*s, Rational::default())).collect();
            for (k, (s, w)) in listed.iter().zip(arr).enumerate() {
                let w = rational_value(w, &format!("weights[{k}]"))?;
                if let Some(s) = s {
                    map.insert(*s, w);
                }
            }
            Some(WeightVector::new(&system, map)?)
        }
    };
    Ok(SystemFile { system, weights })
}

/// Interval form; weights are written when given.
pub fn system_to_json(sys: &SplitSystem, w: Option<&WeightVector>) -> Value {
    let splits: Vec<Value> = sys.splits().map(|s| json!([s.lo(), s.hi()])).collect();
    let mut doc = json!({ "n": sys.n(), "splits": splits });
    if let Some(w) = w {
        doc["weights"] = sys.splits().map(|s| rational::to_json(&w.get(s))).collect();
    }
    doc
}

/// Splits given as `lo-hi` (or a single leaf) separated by commas,
/// e.g. `1-3,3-5,2-4`.
pub fn parse_split_list(text: &str, n: usize) -> Result<Vec<Split>, IoError> {
    text.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            let t = t.trim_start_matches('[').trim_end_matches(']');
            let (lo, hi) = t.split_once(['-', ':']).unwrap_or((t, t));
            let num = |x: &str| {
                x.trim().parse::<usize>().map_err(|_| field_err("order", format!("`{t}` is not lo-hi")))
            };
            Ok(Split::new(num(lo)?, num(hi)?, n)?)
        })
        .collect()
}

/// Non-empty rows with their line numbers; trailing empty cells dropped and
/// a leading non-numeric row taken as a header.
fn csv_rows(text: &str) -> Result<Vec<(u64, Vec<String>)>, IoError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows: Vec<(u64, Vec<String>)> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            IoError::Csv { line, field: 0, message: e.to_string() }
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let mut cells: Vec<String> = record.iter().map(str::to_string).collect();
        while cells.last().is_some_and(String::is_empty) && cells.len() > 1 {
            cells.pop();
        }
        if cells.iter().all(String::is_empty) {
            continue;
        }
        rows.push((line, cells));
    }
    if let Some((_, first)) = rows.first() {
        if first.iter().any(|c| !c.is_empty() && rational::parse(c).is_err()) {
            rows.remove(0);
        }
    }
    Ok(rows)
}

pub fn parse_matrix_csv(text: &str) -> Result<DissimilarityMatrix, IoError> {
    let rows = csv_rows(text)?;
    if rows.is_empty() {
        return Err(IoError::Csv { line: 1, field: 0, message: "no matrix rows".into() });
    }
    let cell = |line: u64, field: usize, text: &str| -> Result<Rational, IoError> {
        rational::parse(text).map_err(|e| IoError::Csv { line, field: field + 1, message: e.to_string() })
    };

    let widths: Vec<usize> = rows.iter().map(|(_, r)| r.len()).collect();
    let k = rows.len();
    let square = k >= 2 && widths.iter().all(|&w| w == k || w == 0);
    let triangle = widths.iter().enumerate().all(|(i, &w)| w == k - i);
    if square {
        let n = k;
        let mut full = vec![vec![None; n]; n];
        for (i, (line, r)) in rows.iter().enumerate() {
            for (j, text) in r.iter().enumerate() {
                if !text.is_empty() {
                    full[i][j] = Some((*line, j, cell(*line, j, text)?));
                }
            }
        }
        let mut upper = Vec::with_capacity(n * (n - 1) / 2);
        for i in 0..n {
            if let Some((line, j, v)) = &full[i][i] {
                if *v != Rational::default() {
                    return Err(IoError::Csv { line: *line, field: j + 1, message: "diagonal entry is not 0".into() });
                }
            }
            for j in i + 1..n {
                let (line, field) = (rows[i].0, j + 1);
                match (&full[i][j], &full[j][i]) {
                    (Some((_, _, a)), Some((l2, f2, b))) if a != b => {
                        return Err(IoError::Csv {
                            line: *l2,
                            field: f2 + 1,
                            message: format!("not symmetric: {} vs {}", rational::format(a), rational::format(b)),
                        })
                    }
                    (Some((_, _, a)), _) | (None, Some((_, _, a))) => upper.push(a.clone()),
                    (None, None) => {
                        return Err(IoError::Csv { line, field, message: "entry is missing".into() })
                    }
                }
            }
        }
        return DissimilarityMatrix::new(n, upper).map_err(|e| match e {
            MetricError::NegativeEntry { i, j, .. } => {
                IoError::Csv { line: rows[i - 1].0, field: j, message: e.to_string() }
            }
            other => other.into(),
        });
    }
    if triangle {
        let n = k + 1;
        let mut upper = Vec::with_capacity(n * (n - 1) / 2);
        for (line, r) in &rows {
            for (j, text) in r.iter().enumerate() {
                if text.is_empty() {
                    return Err(IoError::Csv { line: *line, field: j + 1, message: "entry is missing".into() });
                }
                upper.push(cell(*line, j, text)?);
            }
        }
        return DissimilarityMatrix::new(n, upper).map_err(|e| match e {
            MetricError::NegativeEntry { i, j, .. } => {
                IoError::Csv { line: rows[i - 1].0, field: j - i, message: e.to_string() }
            }
            other => other.into(),
        });
    }
    let (line, r) = &rows[rows.len() - 1];
    Err(IoError::Csv {
        line: *line,
        field: r.len(),
        message: format!(
            "row widths {widths:?} fit neither a full square nor a strict upper triangle"
        ),
    })
}

/// Full symmetric table without header.
pub fn matrix_to_csv(d: &DissimilarityMatrix) -> String {
    let mut out = String::new();
    for i in 1..=d.n() {
        let row: Vec<String> = (1..=d.n()).map(|j| rational::format(&d.get(i, j))).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn parse_matrix_json(text: &str) -> Result<DissimilarityMatrix, IoError> {
    let doc: Value = serde_json::from_str(text)?;
    let n = usize_value(doc.get("n").ok_or_else(|| field_err("n", "missing"))?, "n")?;
    let delta = doc
        .get("delta")
        .and_then(Value::as_object)
        .ok_or_else(|| field_err("delta", "missing or not an object"))?;
    let mut entries: BTreeMap<(usize, usize), Rational> = BTreeMap::new();
    for (key, v) in delta {
        let field = format!("delta.{key}");
        let pair = key
            .split_once(',')
            .and_then(|(a, b)| Some((a.trim().parse::<usize>().ok()?, b.trim().parse::<usize>().ok()?)));
        let (i, j) = match pair {
            Some((i, j)) if 1 <= i && i < j && j <= n => (i, j),
            _ => return Err(field_err(field, format!("key must be \"i,j\" with 1 <= i < j <= {n}"))),
        };
        entries.insert((i, j), rational_value(v, &field)?);
    }
    let mut upper = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 1..=n {
        for j in i + 1..=n {
            upper.push(
                entries.remove(&(i, j)).ok_or_else(|| field_err(format!("delta.{i},{j}"), "missing"))?,
            );
        }
    }
    Ok(DissimilarityMatrix::new(n, upper)?)
}

pub fn matrix_to_json(d: &DissimilarityMatrix) -> Value {
    let delta: Map<String, Value> = d
        .entries()
        .map(|(i, j, v)| (format!("{i},{j}"), rational::to_json(v)))
        .collect();
    json!({ "n": d.n(), "delta": delta })
}

/// Square CSV table of rationals, one row per line.
pub fn parse_cry_csv(text: &str) -> Result<CryMatrix, IoError> {
    let rows = csv_rows(text)?;
    let n = rows.len();
    let mut x = Vec::with_capacity(n);
    for (line, r) in &rows {
        if r.len() != n {
            return Err(IoError::Csv { line: *line, field: r.len(), message: format!("expected {n} entries") });
        }
        let row = r
            .iter()
            .enumerate()
            .map(|(j, t)| {
                rational::parse(t).map_err(|e| IoError::Csv { line: *line, field: j + 1, message: e.to_string() })
            })
            .collect::<Result<Vec<_>, _>>()?;
        x.push(row);
    }
    Ok(CryMatrix::new(x)?)
}

pub fn cry_to_csv(x: &CryMatrix) -> String {
    let mut out = String::new();
    for row in x.rows() {
        let cells: Vec<String> = row.iter().map(rational::format).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// Parses a matrix, choosing JSON when the text starts with `{`.
pub fn parse_matrix(text: &str) -> Result<DissimilarityMatrix, IoError> {
    if text.trim_start().starts_with('{') {
        parse_matrix_json(text)
    } else {
        parse_matrix_csv(text)
    }
}

/// `{"n": 6, "f": {"3,6": 1, …}, "g": {…}, "h": {…}}`; every domain position
/// is written on output, while input may omit zeros.
pub fn xdiagram_to_json(x: &XDiagram) -> Value {
    use crate::xdiagram::Indicator;
    let dump = |which| -> Map<String, Value> {
        x.map(which).iter().map(|(&(k, l), &v)| (format!("{k},{l}"), Value::from(u8::from(v)))).collect()
    };
    json!({ "n": x.n(), "f": dump(Indicator::F), "g": dump(Indicator::G), "h": dump(Indicator::H) })
}

pub fn parse_xdiagram_json(text: &str) -> Result<XDiagram, IoError> {
    let doc: Value = serde_json::from_str(text)?;
    let n = usize_value(doc.get("n").ok_or_else(|| field_err("n", "missing"))?, "n")?;
    let ones = |name: &str| -> Result<Vec<(usize, usize)>, IoError> {
        let Some(v) = doc.get(name) else { return Ok(Vec::new()) };
        let obj = v.as_object().ok_or_else(|| field_err(name, "expected an object"))?;
        let mut out = Vec::new();
        for (key, bit) in obj {
            let field = format!("{name}.{key}");
            let (k, l) = key
                .split_once(',')
                .and_then(|(a, b)| Some((a.trim().parse::<usize>().ok()?, b.trim().parse::<usize>().ok()?)))
                .ok_or_else(|| field_err(&field, "key must be \"k,l\""))?;
            match bit.as_u64() {
                Some(1) => out.push((k, l)),
                Some(0) => {}
                _ => return Err(field_err(field, "value must be 0 or 1")),
            }
        }
        Ok(out)
    };
    Ok(XDiagram::from_ones(n, &ones("f")?, &ones("g")?, &ones("h")?)?)
}

/// `{"n", "vertices", "leaves": [v_0, …, v_n], "edges": [{"u", "v", "split": [lo, hi] | null}]}`;
/// `null` marks the root pendant edge.
pub fn network_to_json(g: &SplitNetwork) -> Value {
    let edges: Vec<Value> = g
        .edges()
        .iter()
        .map(|e| {
            let split = match e.label {
                EdgeLabel::RootPendant => Value::Null,
                EdgeLabel::Split(s) => json!([s.lo(), s.hi()]),
            };
            json!({"u": e.u, "v": e.v, "split": split})
        })
        .collect();
    let leaves: Vec<usize> = (0..=g.n()).map(|t| g.leaf(t)).collect();
    json!({"n": g.n(), "vertices": g.vertex_count(), "leaves": leaves, "edges": edges})
}

/// Checks indices only; whether the graph realizes its labels is left to
/// [`crate::netviz::verify_split_graph`].
pub fn parse_network_json(text: &str) -> Result<SplitNetwork, IoError> {
    let doc: Value = serde_json::from_str(text)?;
    let n = usize_value(doc.get("n").ok_or_else(|| field_err("n", "missing"))?, "n")?;
    let vertices =
        usize_value(doc.get("vertices").ok_or_else(|| field_err("vertices", "missing"))?, "vertices")?;
    let vertex = |v: &Value, field: &str| -> Result<usize, IoError> {
        let k = usize_value(v, field)?;
        if k >= vertices {
            return Err(field_err(field, format!("vertex {k} is not below {vertices}")));
        }
        Ok(k)
    };
    let leaves = doc
        .get("leaves")
        .and_then(Value::as_array)
        .ok_or_else(|| field_err("leaves", "missing or not an array"))?;
    if leaves.len() != n + 1 {
        return Err(field_err("leaves", format!("expected {} entries", n + 1)));
    }
    let leaves = leaves
        .iter()
        .enumerate()
        .map(|(t, v)| vertex(v, &format!("leaves[{t}]")))
        .collect::<Result<Vec<_>, _>>()?;
    let edges = doc
        .get("edges")
        .and_then(Value::as_array)
        .ok_or_else(|| field_err("edges", "missing or not an array"))?;
    let mut out = Vec::with_capacity(edges.len());
    for (k, e) in edges.iter().enumerate() {
        let field = |name: &str| format!("edges[{k}].{name}");
        let get = |name: &str| e.get(name).ok_or_else(|| field_err(field(name), "missing"));
        let u = vertex(get("u")?, &field("u"))?;
        let v = vertex(get("v")?, &field("v"))?;
        let label = match e.get("split") {
            None | Some(Value::Null) => EdgeLabel::RootPendant,
            Some(s) => match usize_list(s, &field("split"))?.as_slice() {
                [lo, hi] => EdgeLabel::Split(Split::new(*lo, *hi, n)?),
                _ => return Err(field_err(field("split"), "expected [lo, hi] or null")),
            },
        };
        out.push(Edge { u, v, label });
    }
    Ok(SplitNetwork::from_parts(n, vertices, out, leaves))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    #[test]
    fn system_forms_agree() {
        let a = parse_system_json(r#"{"n": 5, "splits": [[2,3],[1,3]]}"#).unwrap();
        let b = parse_system_json(r#"{"n": 5, "splits_sets": [[[2,3],[0,1,4,5]], [[4,5,0],[1,2,3]]]}"#).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.system.len(), 7);
        assert!(a.weights.is_none());
    }

    #[test]
    fn unrooted_form_relabels() {
        let f = parse_system_json(
            r#"{"taxa": 6, "root": 6, "splits_sets": [[[1,2,3],[4,5,6]], [[6],[1,2,3,4,5]]], "weights": ["1/2", 3]}"#,
        )
        .unwrap();
        let s13 = Split::new(1, 3, 5).unwrap();
        assert!(f.system.contains(&s13));
        assert_eq!(f.system.non_trivial().count(), 1);
        let w = f.weights.unwrap();
        assert_eq!(w.get(&s13), crate::rational::ratio(1, 2));
        assert_eq!(w.get(&Split::trivial(2)), int(0));
    }

    #[test]
    fn system_errors() {
        assert!(matches!(
            parse_system_json(r#"{"n": 5, "splits": [[2,3],[2,3]]}"#),
            Err(IoError::Split(SplitError::Duplicate(_)))
        ));
        assert!(matches!(
            parse_system_json(r#"{"n": 5, "splits_sets": [[[1,3],[0,2,4,5]]]}"#),
            Err(IoError::Split(SplitError::NotCircular(_)))
        ));
        assert!(parse_system_json(r#"{"n": 5, "splits": [[1,5]]}"#).is_err());
        let round = system_to_json(&parse_system_json(r#"{"n": 4, "splits": [[2,3]]}"#).unwrap().system, None);
        assert_eq!(parse_system_json(&round.to_string()).unwrap().system.n(), 4);
    }

    #[test]
    fn csv_shapes() {
        let full = "a,b,c\n0,1,2\n1,0,3/2\n2,3/2,0\n";
        let upper = "# comment\n1,2\n1.5\n";
        let lower_blank = "0,1,2\n,0,1.5\n,,0\n";
        let d = parse_matrix_csv(full).unwrap();
        assert_eq!(d, parse_matrix_csv(upper).unwrap());
        assert_eq!(d, parse_matrix_csv(lower_blank).unwrap());
        assert_eq!(d.get(2, 3), crate::rational::ratio(3, 2));
        assert_eq!(parse_matrix_csv(&matrix_to_csv(&d)).unwrap(), d);
        assert_eq!(parse_matrix_json(&matrix_to_json(&d).to_string()).unwrap(), d);
    }

    #[test]
    fn csv_diagnostics_name_line_and_field() {
        let err = parse_matrix_csv("0,1,2\n1,0,x\n2,3,0\n").unwrap_err().to_string();
        assert_eq!(err, "line 2, field 3: cannot parse `x` as an exact rational");
        let err = parse_matrix_csv("0,1,2\n1,0,3\n2,4,0\n").unwrap_err().to_string();
        assert!(err.starts_with("line 3, field 2: not symmetric"), "{err}");
        let err = parse_matrix_csv("1,2\n-1\n").unwrap_err().to_string();
        assert!(err.starts_with("line 2, field 1:"), "{err}");
        assert!(parse_matrix_csv("1,2,3\n4\n").is_err());
    }

    #[test]
    fn xdiagram_json_round_trip() {
        let x = XDiagram::from_ones(4, &[(1, 3)], &[(1, 3)], &[]).unwrap();
        let back = parse_xdiagram_json(&xdiagram_to_json(&x).to_string()).unwrap();
        assert_eq!(back, x);
        assert!(parse_xdiagram_json(r#"{"n": 4, "f": {"0,4": 1}}"#).is_err());
    }

    #[test]
    fn split_lists() {
        let order = parse_split_list("1-3, [3-5], 2:4", 5).unwrap();
        assert_eq!(order, vec![Split::new(1, 3, 5).unwrap(), Split::new(3, 5, 5).unwrap(), Split::new(2, 4, 5).unwrap()]);
        assert!(parse_split_list("1-5", 5).is_err());
    }

    #[test]
    fn network_and_cry_round_trips() {
        let sys = SplitSystem::with_trivials(4, [Split::new(1, 2, 4).unwrap(), Split::new(2, 3, 4).unwrap()]).unwrap();
        let g = crate::netviz::build_network(&sys, &crate::netviz::default_order(&sys)).unwrap();
        assert_eq!(parse_network_json(&network_to_json(&g).to_string()).unwrap(), g);
        assert!(parse_network_json(r#"{"n": 1, "vertices": 2, "leaves": [0, 5], "edges": []}"#).is_err());

        let x = crate::cry::vertex_for_blocks(3, &[(1, 2), (3, 3)]);
        assert_eq!(parse_cry_csv(&cry_to_csv(&x)).unwrap(), x);
        let err = parse_cry_csv("1,0\n0,1,0\n").unwrap_err().to_string();
        assert!(err.starts_with("line 2, field 3:"), "{err}");
        assert!(parse_cry_csv("0,1\n1,0\n").is_ok());
        assert!(parse_cry_csv("0,0,1\n0,1,0\n1,0,0\n").is_err());
    }
}
