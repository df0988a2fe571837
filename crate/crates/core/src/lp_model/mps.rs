//! MPS reader and writer (fixed and free format).

use std::collections::HashMap;
use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};

use super::{LpInstance, ObjectiveSense, RowKind, VarBound};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("line {line}: {kind}")]
pub struct MpsError {
    pub line: usize,
    pub kind: MpsErrorKind,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MpsErrorKind {
    #[error("malformed section header {0:?}")]
    MalformedHeader(String),
    #[error("malformed data line {0:?}")]
    MalformedLine(String),
    #[error("duplicate row name {0:?}")]
    DuplicateRow(String),
    #[error("unknown row type {0:?}")]
    UnknownRowType(String),
    #[error("reference to undeclared row {0:?}")]
    UnknownRow(String),
    #[error("reference to undeclared column {0:?}")]
    UnknownColumn(String),
    #[error("unsupported BOUNDS key {0:?}")]
    UnsupportedBound(String),
    #[error("invalid number {0:?}")]
    BadNumber(String),
    #[error("negative RANGES value on equality row {0:?}")]
    NegativeRangeOnEquality(String),
    #[error("no objective (N) row declared")]
    NoObjective,
    #[error("missing ENDATA")]
    MissingEnd,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Section {
    None,
    Name,
    ObjSense,
    Rows,
    Columns,
    Rhs,
    Ranges,
    Bounds,
}

enum RowRef {
    Objective,
    Free,
    Con(usize),
}

struct Builder {
    name: String,
    sense: ObjectiveSense,
    objective_name: Option<String>,
    objective_constant: f64,
    free_rows: Vec<String>,
    row_index: HashMap<String, usize>,
    row_names: Vec<String>,
    row_kinds: Vec<RowKind>,
    col_index: HashMap<String, usize>,
    col_names: Vec<String>,
    entries: Vec<(usize, usize, f64)>,
    cost: Vec<f64>,
    rhs: Vec<f64>,
    ranges: Vec<Option<f64>>,
    bounds: Vec<VarBound>,
}

fn err(line: usize, kind: MpsErrorKind) -> MpsError {
    MpsError { line, kind }
}

fn number(tok: &str, line: usize) -> Result<f64, MpsError> {
    let v: f64 = tok
        .replace(['d', 'D'], "e")
        .parse()
        .map_err(|_| err(line, MpsErrorKind::BadNumber(tok.to_string())))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(err(line, MpsErrorKind::BadNumber(tok.to_string())))
    }
}

/// Splits a data line by the classic fixed-format column layout.
fn fixed_fields(line: &str) -> Vec<String> {
    const SPANS: [(usize, usize); 6] = [(1, 3), (4, 12), (14, 22), (24, 36), (39, 47), (49, 61)];
    let chars: Vec<char> = line.chars().collect();
    let mut out: Vec<String> = SPANS
        .iter()
        .map(|&(a, b)| {
            let a = a.min(chars.len());
            let b = b.min(chars.len());
            chars[a..b].iter().collect::<String>().trim().to_string()
        })
        .collect();
    while out.last().is_some_and(|s| s.is_empty()) {
        out.pop();
    }
    out
}

impl Builder {
    fn new() -> Self {
        Builder {
            name: String::new(),
            sense: ObjectiveSense::Min,
            objective_name: None,
            objective_constant: 0.0,
            free_rows: Vec::new(),
            row_index: HashMap::new(),
            row_names: Vec::new(),
            row_kinds: Vec::new(),
            col_index: HashMap::new(),
            col_names: Vec::new(),
            entries: Vec::new(),
            cost: Vec::new(),
            rhs: Vec::new(),
            ranges: Vec::new(),
            bounds: Vec::new(),
        }
    }

    fn row(&self, name: &str, line: usize) -> Result<RowRef, MpsError> {
        if self.objective_name.as_deref() == Some(name) {
            Ok(RowRef::Objective)
        } else if let Some(&i) = self.row_index.get(name) {
            Ok(RowRef::Con(i))
        } else if self.free_rows.iter().any(|r| r == name) {
            Ok(RowRef::Free)
        } else {
            Err(err(line, MpsErrorKind::UnknownRow(name.to_string())))
        }
    }

    fn column(&self, name: &str, line: usize) -> Result<usize, MpsError> {
        self.col_index
            .get(name)
            .copied()
            .ok_or_else(|| err(line, MpsErrorKind::UnknownColumn(name.to_string())))
    }

    fn declare_row(&mut self, kind: &str, name: &str, line: usize) -> Result<(), MpsError> {
        let taken = self.row_index.contains_key(name)
            || self.objective_name.as_deref() == Some(name)
            || self.free_rows.iter().any(|r| r == name);
        if taken {
            return Err(err(line, MpsErrorKind::DuplicateRow(name.to_string())));
        }
        let kind = match kind.to_ascii_uppercase().as_str() {
            "N" => {
                if self.objective_name.is_none() {
                    self.objective_name = Some(name.to_string());
                } else {
                    self.free_rows.push(name.to_string());
                }
                return Ok(());
            }
            "L" => RowKind::Le,
            "G" => RowKind::Ge,
            "E" => RowKind::Eq,
            other => return Err(err(line, MpsErrorKind::UnknownRowType(other.to_string()))),
        };
        self.row_index.insert(name.to_string(), self.row_names.len());
        self.row_names.push(name.to_string());
        self.row_kinds.push(kind);
        self.rhs.push(0.0);
        self.ranges.push(None);
        Ok(())
    }

    fn column_entry(&mut self, col: &str, row: &str, val: &str, line: usize) -> Result<(), MpsError> {
        let j = match self.col_index.get(col) {
            Some(&j) => j,
            None => {
                let j = self.col_names.len();
                self.col_index.insert(col.to_string(), j);
                self.col_names.push(col.to_string());
                self.cost.push(0.0);
                self.bounds.push(VarBound::NONNEG);
                j
            }
        };
        let v = number(val, line)?;
        match self.row(row, line)? {
            RowRef::Objective => self.cost[j] = v,
            RowRef::Free => {}
            RowRef::Con(i) => self.entries.push((i, j, v)),
        }
        Ok(())
    }

    fn rhs_entry(&mut self, row: &str, val: &str, line: usize) -> Result<(), MpsError> {
        let v = number(val, line)?;
        match self.row(row, line)? {
            RowRef::Objective => self.objective_constant = -v,
            RowRef::Free => {}
            RowRef::Con(i) => self.rhs[i] = v,
        }
        Ok(())
    }

    fn range_entry(&mut self, row: &str, val: &str, line: usize) -> Result<(), MpsError> {
        let v = number(val, line)?;
        match self.row(row, line)? {
            RowRef::Objective | RowRef::Free => {}
            RowRef::Con(i) => {
                if self.row_kinds[i] == RowKind::Eq && v < 0.0 {
                    return Err(err(line, MpsErrorKind::NegativeRangeOnEquality(row.to_string())));
                }
                self.ranges[i] = Some(v);
            }
        }
        Ok(())
    }

    fn bound_entry(&mut self, key: &str, col: &str, val: Option<&str>, line: usize) -> Result<(), MpsError> {
        let j = self.column(col, line)?;
        let b = &mut self.bounds[j];
        let value = |line| -> Result<f64, MpsError> {
            match val {
                Some(v) => number(v, line),
                None => Err(err(line, MpsErrorKind::MalformedLine(format!("{key} bound needs a value")))),
            }
        };
        match key {
            "UP" => {
                let v = value(line)?;
                if v < 0.0 && b.lower == 0.0 {
                    log::warn!("line {line}: negative UP bound on {col} with zero lower bound; lower set to -inf");
                    b.lower = f64::NEG_INFINITY;
                }
                b.upper = v;
            }
            "LO" => b.lower = value(line)?,
            "FX" => {
                let v = value(line)?;
                b.lower = v;
                b.upper = v;
            }
            "FR" => *b = VarBound::FREE,
            "MI" => b.lower = f64::NEG_INFINITY,
            "PL" => b.upper = f64::INFINITY,
            other => return Err(err(line, MpsErrorKind::UnsupportedBound(other.to_string()))),
        }
        Ok(())
    }

    fn finish(self) -> Result<LpInstance, MpsError> {
        let objective_name = self.objective_name.ok_or(err(0, MpsErrorKind::NoObjective))?;
        let mut row_names = self.row_names;
        let mut row_kinds = self.row_kinds;
        let mut rhs = self.rhs;
        let mut extra: Vec<(usize, usize)> = Vec::new();
        // Ranged rows become a pair of inequalities; the partner row is appended.
        for i in 0..self.ranges.len() {
            let Some(r) = self.ranges[i] else { continue };
            let (kind, bound) = match row_kinds[i] {
                RowKind::Le => (RowKind::Ge, rhs[i] - r.abs()),
                RowKind::Ge => (RowKind::Le, rhs[i] + r.abs()),
                RowKind::Eq => {
                    if r == 0.0 {
                        continue;
                    }
                    row_kinds[i] = RowKind::Ge;
                    (RowKind::Le, rhs[i] + r)
                }
            };
            extra.push((i, row_names.len()));
            row_names.push(format!("{}:range", row_names[i]));
            row_kinds.push(kind);
            rhs.push(bound);
        }
        let m = row_names.len();
        let n = self.col_names.len();
        let mut a = DMatrix::zeros(m, n);
        for &(i, j, v) in &self.entries {
            a[(i, j)] = v;
        }
        for &(src, dst) in &extra {
            for j in 0..n {
                a[(dst, j)] = a[(src, j)];
            }
        }
        Ok(LpInstance {
            name: self.name,
            objective_sense: self.sense,
            objective_name,
            objective_constant: self.objective_constant,
            c: DVector::from_vec(self.cost),
            a,
            row_kinds,
            b: DVector::from_vec(rhs),
            bounds: self.bounds,
            row_names,
            col_names: self.col_names,
        })
    }
}

fn header(tok: &str) -> Option<Section> {
    Some(match tok.to_ascii_uppercase().as_str() {
        "NAME" => Section::Name,
        "OBJSENSE" => Section::ObjSense,
        "ROWS" => Section::Rows,
        "COLUMNS" => Section::Columns,
        "RHS" => Section::Rhs,
        "RANGES" => Section::Ranges,
        "BOUNDS" => Section::Bounds,
        _ => return None,
    })
}

fn parse_sense(tok: &str, line: usize) -> Result<ObjectiveSense, MpsError> {
    match tok.to_ascii_uppercase().as_str() {
        "MIN" | "MINIMIZE" => Ok(ObjectiveSense::Min),
        "MAX" | "MAXIMIZE" => Ok(ObjectiveSense::Max),
        other => Err(err(line, MpsErrorKind::MalformedLine(format!("objective sense {other:?}")))),
    }
}

/// Maps whitespace tokens onto the six fixed-format slots.
fn free_slots(section: Section, line: &str) -> Option<Vec<String>> {
    let t: Vec<String> = line.split_whitespace().map(str::to_string).collect();
    let blank = String::new;
    let slots = match (section, t.len()) {
        (Section::Rows, 2) => t,
        (Section::Columns, 3 | 5) => std::iter::once(blank()).chain(t).collect(),
        (Section::Rhs | Section::Ranges, 2 | 4) => [blank(), blank()].into_iter().chain(t).collect(),
        (Section::Rhs | Section::Ranges, 3 | 5) => std::iter::once(blank()).chain(t).collect(),
        (Section::Bounds, _) => {
            let valued = matches!(t[0].to_ascii_uppercase().as_str(), "UP" | "LO" | "FX");
            match (valued, t.len()) {
                (true, 3) | (false, 2) => {
                    let mut v = vec![t[0].clone(), blank()];
                    v.extend(t[1..].iter().cloned());
                    v
                }
                (true, 4) | (false, 3) => t,
                _ => return None,
            }
        }
        _ => return None,
    };
    Some(slots)
}

impl Builder {
    fn apply(&mut self, section: Section, f: &[String], line: usize, raw: &str) -> Result<(), MpsError> {
        let malformed = || err(line, MpsErrorKind::MalformedLine(raw.trim().to_string()));
        let slot = |i: usize| f.get(i).map(String::as_str).unwrap_or("");
        match section {
            Section::Rows => {
                if slot(0).is_empty() || slot(1).is_empty() || f.len() > 2 {
                    return Err(malformed());
                }
                self.declare_row(slot(0), slot(1), line)
            }
            Section::Columns => {
                let col = slot(1);
                if col.is_empty() || slot(2).is_empty() || slot(3).is_empty() {
                    return Err(malformed());
                }
                let mut pairs = vec![(slot(2), slot(3))];
                if !slot(4).is_empty() {
                    pairs.push((slot(4), slot(5)));
                }
                for &(r, v) in &pairs {
                    self.row(r, line)?;
                    number(v, line)?;
                }
                for (r, v) in pairs {
                    self.column_entry(col, r, v, line)?;
                }
                Ok(())
            }
            Section::Rhs | Section::Ranges => {
                if slot(2).is_empty() || slot(3).is_empty() {
                    return Err(malformed());
                }
                let mut pairs = vec![(slot(2), slot(3))];
                if !slot(4).is_empty() {
                    pairs.push((slot(4), slot(5)));
                }
                for &(r, v) in &pairs {
                    self.row(r, line)?;
                    number(v, line)?;
                }
                for (r, v) in pairs {
                    if section == Section::Rhs {
                        self.rhs_entry(r, v, line)?;
                    } else {
                        self.range_entry(r, v, line)?;
                    }
                }
                Ok(())
            }
            Section::Bounds => {
                let key = slot(0).to_ascii_uppercase();
                let valued = matches!(key.as_str(), "UP" | "LO" | "FX");
                if !valued && !matches!(key.as_str(), "FR" | "MI" | "PL") {
                    return Err(err(line, MpsErrorKind::UnsupportedBound(key)));
                }
                if slot(2).is_empty() || (valued && slot(3).is_empty()) {
                    return Err(malformed());
                }
                let val = if valued { Some(slot(3)) } else { None };
                self.bound_entry(&key, slot(2), val, line)
            }
            _ => Err(malformed()),
        }
    }
}

/// Parses an MPS document.
pub fn parse_mps(text: &str) -> Result<LpInstance, MpsError> {
    let mut b = Builder::new();
    let mut section = Section::None;
    let mut ended = false;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let raw = raw.trim_end();
        if raw.is_empty() || raw.starts_with('*') {
            continue;
        }
        if !raw.starts_with([' ', '\t']) {
            let mut toks = raw.split_whitespace();
            let first = toks.next().unwrap_or_default();
            if first.eq_ignore_ascii_case("ENDATA") {
                ended = true;
                break;
            }
            section = header(first).ok_or_else(|| err(line, MpsErrorKind::MalformedHeader(raw.to_string())))?;
            let rest: Vec<&str> = toks.collect();
            match section {
                Section::Name => b.name = rest.join(" "),
                Section::ObjSense if !rest.is_empty() => b.sense = parse_sense(rest[0], line)?,
                _ if !rest.is_empty() => {
                    return Err(err(line, MpsErrorKind::MalformedHeader(raw.to_string())));
                }
                _ => {}
            }
            continue;
        }
        match section {
            Section::None | Section::Name => {
                return Err(err(line, MpsErrorKind::MalformedLine(raw.trim().to_string())));
            }
            Section::ObjSense => {
                let tok = raw.split_whitespace().next().unwrap_or_default();
                b.sense = parse_sense(tok, line)?;
            }
            Section::Columns if raw.contains("'MARKER'") => {
                log::warn!("line {line}: integer marker ignored; variables are treated as continuous");
            }
            Section::Bounds
                if !matches!(
                    raw.split_whitespace().next().unwrap_or_default().to_ascii_uppercase().as_str(),
                    "UP" | "LO" | "FX" | "FR" | "MI" | "PL"
                ) =>
            {
                let key = raw.split_whitespace().next().unwrap_or_default().to_ascii_uppercase();
                return Err(err(line, MpsErrorKind::UnsupportedBound(key)));
            }
            _ => {
                // Free format first; fixed columns when the tokens do not fit.
                let first = match free_slots(section, raw) {
                    Some(f) => b.apply(section, &f, line, raw),
                    None => Err(err(line, MpsErrorKind::MalformedLine(raw.trim().to_string()))),
                };
                if let Err(e) = first {
                    if section == Section::Rows && !matches!(e.kind, MpsErrorKind::MalformedLine(_)) {
                        return Err(e);
                    }
                    b.apply(section, &fixed_fields(raw), line, raw).map_err(|_| e)?;
                }
            }
        }
    }
    if !ended {
        return Err(err(text.lines().count(), MpsErrorKind::MissingEnd));
    }
    b.finish()
}

fn num(v: f64) -> String {
    format!("{v:?}")
}

/// Writes the instance as free-format MPS.
pub fn write_mps(inst: &LpInstance) -> String {
    let mut out = String::new();
    let obj = if inst.objective_name.is_empty() { "obj" } else { inst.objective_name.as_str() };
    let _ = writeln!(out, "NAME {}", inst.name);
    if inst.objective_sense == ObjectiveSense::Max {
        let _ = writeln!(out, "OBJSENSE\n    MAX");
    }
    let _ = writeln!(out, "ROWS\n N  {obj}");
    for (kind, name) in inst.row_kinds.iter().zip(&inst.row_names) {
        let k = match kind {
            RowKind::Le => "L",
            RowKind::Ge => "G",
            RowKind::Eq => "E",
        };
        let _ = writeln!(out, " {k}  {name}");
    }
    let _ = writeln!(out, "COLUMNS");
    for (j, col) in inst.col_names.iter().enumerate() {
        let mut wrote = false;
        if inst.c[j] != 0.0 {
            let _ = writeln!(out, "    {col}  {obj}  {}", num(inst.c[j]));
            wrote = true;
        }
        for (i, row) in inst.row_names.iter().enumerate() {
            let v = inst.a[(i, j)];
            if v != 0.0 {
                let _ = writeln!(out, "    {col}  {row}  {}", num(v));
                wrote = true;
            }
        }
        if !wrote {
            let _ = writeln!(out, "    {col}  {obj}  0.0");
        }
    }
    let _ = writeln!(out, "RHS");
    if inst.objective_constant != 0.0 {
        let _ = writeln!(out, "    RHS  {obj}  {}", num(-inst.objective_constant));
    }
    for (i, row) in inst.row_names.iter().enumerate() {
        if inst.b[i] != 0.0 {
            let _ = writeln!(out, "    RHS  {row}  {}", num(inst.b[i]));
        }
    }
    let _ = writeln!(out, "BOUNDS");
    for (bd, col) in inst.bounds.iter().zip(&inst.col_names) {
        let (lo, up) = (bd.lower, bd.upper);
        if lo == up {
            let _ = writeln!(out, " FX BND  {col}  {}", num(lo));
            continue;
        }
        if lo == f64::NEG_INFINITY && up == f64::INFINITY {
            let _ = writeln!(out, " FR BND  {col}");
            continue;
        }
        if lo == f64::NEG_INFINITY {
            let _ = writeln!(out, " MI BND  {col}");
        } else if lo != 0.0 {
            let _ = writeln!(out, " LO BND  {col}  {}", num(lo));
        }
        if up != f64::INFINITY {
            let _ = writeln!(out, " UP BND  {col}  {}", num(up));
        }
    }
    let _ = writeln!(out, "ENDATA");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = "\
NAME          SMALL
ROWS
 N  COST
 L  LIM1
 E  MYEQN
COLUMNS
    X1        COST         1.0   LIM1         1.0
    X1        MYEQN       -1.0
    X2        COST         2.0   LIM1         1.0
    X2        MYEQN        1.0
RHS
    RHS       LIM1         4.0   MYEQN        1.0
BOUNDS
 UP BND       X1           3.0
ENDATA
";

    #[test]
    fn handwritten_two_by_two() {
        let lp = parse_mps(SMALL).unwrap();
        assert_eq!(lp.name, "SMALL");
        assert_eq!((lp.num_rows(), lp.num_cols()), (2, 2));
        assert_eq!(lp.row_kinds, vec![RowKind::Le, RowKind::Eq]);
        assert_eq!(lp.c.as_slice(), &[1.0, 2.0]);
        assert_eq!(lp.a, DMatrix::from_row_slice(2, 2, &[1.0, 1.0, -1.0, 1.0]));
        assert_eq!(lp.b.as_slice(), &[4.0, 1.0]);
        assert_eq!(lp.bounds[0], VarBound { lower: 0.0, upper: 3.0 });
        assert_eq!(lp.bounds[1], VarBound::NONNEG);
        lp.check().unwrap();
    }

    #[test]
    fn fixed_format_names_with_spaces() {
        let text = "\
NAME          FIXED
ROWS
 N  COST
 L  ROW 1
COLUMNS
    COL A     COST               1.0   ROW 1              2.0
RHS
    RHS       ROW 1              5.0
ENDATA
";
        let lp = parse_mps(text).unwrap();
        assert_eq!(lp.row_names, vec!["ROW 1"]);
        assert_eq!(lp.col_names, vec!["COL A"]);
        assert_eq!(lp.a[(0, 0)], 2.0);
        assert_eq!(lp.b[0], 5.0);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let dup = "NAME X\nROWS\n N C\n L R\n L R\nENDATA\n";
        assert_eq!(parse_mps(dup).unwrap_err(), err(5, MpsErrorKind::DuplicateRow("R".into())));

        let unknown_row = "NAME X\nROWS\n N C\n L R\nCOLUMNS\n    X1 Q 1.0\nENDATA\n";
        assert_eq!(parse_mps(unknown_row).unwrap_err(), err(6, MpsErrorKind::UnknownRow("Q".into())));

        let unknown_col = "NAME X\nROWS\n N C\n L R\nCOLUMNS\n    X1 R 1.0\nBOUNDS\n UP BND X9 1.0\nENDATA\n";
        assert_eq!(parse_mps(unknown_col).unwrap_err(), err(8, MpsErrorKind::UnknownColumn("X9".into())));

        let bad_key = "NAME X\nROWS\n N C\n L R\nCOLUMNS\n    X1 R 1.0\nBOUNDS\n BV BND X1\nENDATA\n";
        assert_eq!(parse_mps(bad_key).unwrap_err(), err(8, MpsErrorKind::UnsupportedBound("BV".into())));

        let bad_header = "NAME X\nROWZ\nENDATA\n";
        assert!(matches!(parse_mps(bad_header).unwrap_err(), MpsError { line: 2, kind: MpsErrorKind::MalformedHeader(_) }));
    }

    #[test]
    fn ranges_split_rows() {
        let text = "NAME X\nROWS\n N C\n L R1\n E R2\nCOLUMNS\n    X1 R1 1.0 R2 1.0\nRHS\n    RHS R1 4.0 R2 2.0\nRANGES\n    RNG R1 1.5 R2 3.0\nENDATA\n";
        let lp = parse_mps(text).unwrap();
        assert_eq!(lp.row_kinds, vec![RowKind::Le, RowKind::Ge, RowKind::Ge, RowKind::Le]);
        assert_eq!(lp.b.as_slice(), &[4.0, 2.0, 2.5, 5.0]);
        assert_eq!(lp.row_names[2], "R1:range");

        let neg = "NAME X\nROWS\n N C\n E R2\nCOLUMNS\n    X1 R2 1.0\nRANGES\n    RNG R2 -3.0\nENDATA\n";
        assert_eq!(
            parse_mps(neg).unwrap_err(),
            err(8, MpsErrorKind::NegativeRangeOnEquality("R2".into()))
        );
    }

    #[test]
    fn bound_keys_and_objective_constant() {
        let text = "NAME X\nOBJSENSE\n    MAX\nROWS\n N C\n G R\nCOLUMNS\n    X1 R 1.0\n    X2 R 1.0\n    X3 R 1.0\n    X4 R 1.0\nRHS\n    RHS C 7.5\nBOUNDS\n FR BND X1\n MI BND X2\n UP BND X2 4.0\n FX BND X3 2.0\n UP BND X4 -1.0\nENDATA\n";
        let lp = parse_mps(text).unwrap();
        assert_eq!(lp.objective_sense, ObjectiveSense::Max);
        assert_eq!(lp.objective_constant, -7.5);
        assert_eq!(lp.bounds[0], VarBound::FREE);
        assert_eq!(lp.bounds[1], VarBound { lower: f64::NEG_INFINITY, upper: 4.0 });
        assert_eq!(lp.bounds[2], VarBound { lower: 2.0, upper: 2.0 });
        assert_eq!(lp.bounds[3], VarBound { lower: f64::NEG_INFINITY, upper: -1.0 });
    }

    #[test]
    fn writer_output_reparses_to_same_data() {
        let lp = parse_mps(SMALL).unwrap();
        let back = parse_mps(&write_mps(&lp)).unwrap();
        assert_eq!(back, lp);
    }
}
