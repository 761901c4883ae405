//! Labelled symmetric distance matrices and their three on-disk layouts.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Symmetric N×N matrix with zero diagonal over a labelled set of languages.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixRepr", into = "MatrixRepr")]
pub struct DistanceMatrix {
    labels: Vec<String>,
    entries: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    labels: Vec<String>,
    entries: Vec<Vec<f64>>,
}

impl TryFrom<MatrixRepr> for DistanceMatrix {
    type Error = Error;

    fn try_from(r: MatrixRepr) -> Result<Self> {
        DistanceMatrix::from_rows(r.labels, r.entries)
    }
}

impl From<DistanceMatrix> for MatrixRepr {
    fn from(m: DistanceMatrix) -> Self {
        let entries = (0..m.len()).map(|i| m.row(i).to_vec()).collect();
        MatrixRepr {
            labels: m.labels,
            entries,
        }
    }
}

impl DistanceMatrix {
    pub fn zeros(labels: Vec<String>) -> Self {
        let n = labels.len();
        DistanceMatrix {
            labels,
            entries: vec![0.0; n * n],
        }
    }

    /// Builds a matrix from full rows, checking shape, symmetry, the zero
    /// diagonal and that every entry is finite and non-negative.
    pub fn from_rows(labels: Vec<String>, rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = labels.len();
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(Error::Matrix(format!("expected {n}x{n} entries for {n} labels")));
        }
        let m = DistanceMatrix {
            labels,
            entries: rows.into_iter().flatten().collect(),
        };
        m.check()?;
        Ok(m)
    }

    /// Builds a matrix from the strictly lower triangle, row by row.
    pub fn from_lower_triangle(labels: Vec<String>, lower: &[f64]) -> Result<Self> {
        let n = labels.len();
        if lower.len() != n * n.saturating_sub(1) / 2 {
            return Err(Error::Matrix(format!(
                "{} lower-triangle values cannot fill a {n}x{n} matrix",
                lower.len()
            )));
        }
        let mut m = DistanceMatrix::zeros(labels);
        let mut k = 0;
        for i in 1..n {
            for j in 0..i {
                m.set(i, j, lower[k]);
                k += 1;
            }
        }
        m.check()?;
        Ok(m)
    }

    fn check(&self) -> Result<()> {
        let n = self.len();
        let mut seen = std::collections::HashSet::new();
        for l in &self.labels {
            if !seen.insert(l.as_str()) {
                return Err(Error::Matrix(format!("duplicate label {l:?}")));
            }
        }
        for i in 0..n {
            if self.get(i, i) != 0.0 {
                return Err(Error::Matrix(format!("nonzero diagonal at {:?}", self.labels[i])));
            }
            for j in 0..i {
                let v = self.get(i, j);
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::Matrix(format!(
                        "entry ({}, {}) = {v} is not a finite non-negative number",
                        self.labels[i], self.labels[j]
                    )));
                }
                if v != self.get(j, i) {
                    return Err(Error::Matrix(format!(
                        "not symmetric at ({}, {})",
                        self.labels[i], self.labels[j]
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.len() + j]
    }

    /// Sets both (i, j) and (j, i).
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        let n = self.len();
        self.entries[i * n + j] = value;
        self.entries[j * n + i] = value;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.len();
        &self.entries[i * n..(i + 1) * n]
    }

    /// Number of independent off-diagonal entries, N(N-1)/2.
    pub fn pair_count(&self) -> usize {
        let n = self.len();
        n * n.saturating_sub(1) / 2
    }

    /// Applies `f` to every off-diagonal entry.
    pub fn map(&self, mut f: impl FnMut(f64) -> f64) -> DistanceMatrix {
        let mut out = DistanceMatrix::zeros(self.labels.clone());
        for i in 0..self.len() {
            for j in 0..i {
                out.set(i, j, f(self.get(i, j)));
            }
        }
        out
    }

    /// Reorders rows and columns so that new index k holds old index `order[k]`.
    pub fn permute(&self, order: &[usize]) -> DistanceMatrix {
        let labels = order.iter().map(|&k| self.labels[k].clone()).collect();
        let mut out = DistanceMatrix::zeros(labels);
        for (a, &i) in order.iter().enumerate() {
            for (b, &j) in order.iter().enumerate() {
                out.entries[a * order.len() + b] = self.get(i, j);
            }
        }
        out
    }

    /// Verifies every entry is a lexical distance, i.e. lies in [0, 1].
    pub fn check_unit_range(&self) -> Result<()> {
        for i in 0..self.len() {
            for j in 0..i {
                if self.get(i, j) > 1.0 {
                    return Err(Error::Matrix(format!(
                        "entry ({}, {}) = {} exceeds 1",
                        self.labels[i],
                        self.labels[j],
                        self.get(i, j)
                    )));
                }
            }
        }
        Ok(())
    }

    /// Lower-triangular table of entries ×1000 rounded half away from zero,
    /// a column-index footer, a blank line and a numbered label legend.
    pub fn to_appendix(&self) -> String {
        let n = self.len();
        let label_width = n.to_string().len();
        let cells: Vec<Vec<String>> = (0..n)
            .map(|i| {
                (0..i)
                    .map(|j| format!("{:03}", scaled_integer(self.get(i, j))))
                    .collect()
            })
            .collect();
        let mut col_width = vec![0usize; n];
        for row in &cells {
            for (j, c) in row.iter().enumerate() {
                col_width[j] = col_width[j].max(c.len());
            }
        }
        for (j, w) in col_width.iter_mut().enumerate() {
            *w = (*w).max((j + 1).to_string().len());
        }

        let mut out = String::new();
        for (i, row) in cells.iter().enumerate() {
            let _ = write!(out, "{:>label_width$}", i + 1);
            for (j, c) in row.iter().enumerate() {
                let _ = write!(out, " {:>w$}", c, w = col_width[j]);
            }
            out.push('\n');
        }
        out.push_str(&" ".repeat(label_width));
        for (j, w) in col_width.iter().enumerate().take(n.saturating_sub(1)) {
            let _ = write!(out, " {:>w$}", j + 1);
        }
        out.push_str("\n\n");
        for (i, l) in self.labels.iter().enumerate() {
            let _ = writeln!(out, "{} {}", i + 1, l);
        }
        out
    }

    pub fn parse_appendix(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let mut table = Vec::new();
        for line in lines.by_ref() {
            if line.trim().is_empty() {
                if table.is_empty() {
                    continue;
                }
                break;
            }
            table.push(line);
        }
        // last table line is the column-index footer
        let footer = table
            .pop()
            .ok_or_else(|| Error::Matrix("appendix table is empty".into()))?;
        let n = table.len();
        let footer_ok = footer
            .split_whitespace()
            .map(|t| t.parse::<usize>().ok())
            .eq((1..n).map(Some));
        if !footer_ok {
            return Err(Error::Matrix(format!(
                "footer must list columns 1..{}",
                n.saturating_sub(1)
            )));
        }

        let mut lower = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for (i, line) in table.iter().enumerate() {
            let mut tokens = line.split_whitespace();
            let row: Option<usize> = tokens.next().and_then(|t| t.parse().ok());
            if row != Some(i + 1) {
                return Err(Error::Matrix(format!("row {} is mislabelled: {line:?}", i + 1)));
            }
            let values: Vec<&str> = tokens.collect();
            if values.len() != i {
                return Err(Error::Matrix(format!(
                    "row {} has {} entries, expected {i}",
                    i + 1,
                    values.len()
                )));
            }
            for v in values {
                let k: u32 = v
                    .parse()
                    .map_err(|_| Error::Matrix(format!("row {}: {v:?} is not an integer", i + 1)))?;
                lower.push(f64::from(k) / 1000.0);
            }
        }

        let mut labels = Vec::with_capacity(n);
        for line in lines.filter(|l| !l.trim().is_empty()) {
            let (num, label) = line
                .trim_start()
                .split_once(' ')
                .ok_or_else(|| Error::Matrix(format!("bad legend line {line:?}")))?;
            if num.parse::<usize>().ok() != Some(labels.len() + 1) {
                return Err(Error::Matrix(format!("legend out of order at {line:?}")));
            }
            labels.push(label.trim().to_owned());
        }
        if labels.len() != n {
            return Err(Error::Matrix(format!(
                "legend names {} labels, table has {n} rows",
                labels.len()
            )));
        }
        DistanceMatrix::from_lower_triangle(labels, &lower)
    }

    /// Square CSV with a header row and a label column, full precision.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec![String::new()];
        header.extend(self.labels.iter().cloned());
        w.write_record(&header)?;
        for i in 0..self.len() {
            let mut rec = vec![self.labels[i].clone()];
            rec.extend(self.row(i).iter().map(|v| v.to_string()));
            w.write_record(&rec)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn parse_csv(text: &str) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
        let header = r.headers()?.clone();
        let labels: Vec<String> = header.iter().skip(1).map(str::to_owned).collect();
        let mut rows = Vec::with_capacity(labels.len());
        for (i, rec) in r.records().enumerate() {
            let rec = rec?;
            if rec.get(0) != labels.get(i).map(String::as_str) {
                return Err(Error::Matrix(format!("row {} label does not match header", i + 1)));
            }
            let row = rec
                .iter()
                .skip(1)
                .map(|v| {
                    v.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::Matrix(format!("row {}: {v:?} is not a number", i + 1)))
                })
                .collect::<Result<Vec<f64>>>()?;
            rows.push(row);
        }
        DistanceMatrix::from_rows(labels, rows)
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn parse_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn write(&self, format: MatrixFormat) -> Result<String> {
        match format {
            MatrixFormat::Appendix => Ok(self.to_appendix()),
            MatrixFormat::Csv => self.to_csv(),
            MatrixFormat::Json => self.to_json(),
        }
    }

    pub fn parse(text: &str, format: MatrixFormat) -> Result<Self> {
        match format {
            MatrixFormat::Appendix => DistanceMatrix::parse_appendix(text),
            MatrixFormat::Csv => DistanceMatrix::parse_csv(text),
            MatrixFormat::Json => DistanceMatrix::parse_json(text),
        }
    }
}

/// Value ×1000, rounded half away from zero.
pub fn scaled_integer(value: f64) -> i64 {
    (value * 1000.0).round() as i64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixFormat {
    Appendix,
    Csv,
    Json,
}

impl MatrixFormat {
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "csv" => Some(MatrixFormat::Csv),
            "json" => Some(MatrixFormat::Json),
            "txt" | "appendix" => Some(MatrixFormat::Appendix),
            _ => None,
        }
    }
}

impl FromStr for MatrixFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "appendix" => Ok(MatrixFormat::Appendix),
            "csv" => Ok(MatrixFormat::Csv),
            "json" => Ok(MatrixFormat::Json),
            other => Err(Error::Matrix(format!("unknown matrix format {other:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    fn sample() -> DistanceMatrix {
        DistanceMatrix::from_lower_triangle(labels(&["a", "b, c", "d"]), &[0.3234, 0.0615, 0.5]).unwrap()
    }

    #[test]
    fn lower_triangle_fills_symmetric() {
        let m = sample();
        assert_eq!(m.get(1, 0), 0.3234);
        assert_eq!(m.get(0, 1), 0.3234);
        assert_eq!(m.get(2, 1), 0.5);
        assert_eq!(m.pair_count(), 3);
    }

    #[test]
    fn appendix_layout() {
        let text = sample().to_appendix();
        assert_eq!(text, "1\n2 323\n3 062 500\n    1   2\n\n1 a\n2 b, c\n3 d\n");
    }

    #[test]
    fn rounding_half_away_from_zero() {
        assert_eq!(scaled_integer(0.0625), 63);
        assert_eq!(scaled_integer(0.0004), 0);
        assert_eq!(scaled_integer(1.0), 1000);
    }

    #[test]
    fn appendix_parses_back_rounded() {
        let m = DistanceMatrix::parse_appendix(&sample().to_appendix()).unwrap();
        assert_eq!(m.labels(), sample().labels());
        assert_eq!(m.get(1, 0), 0.323);
        assert_eq!(m.get(2, 0), 0.062);
    }

    #[test]
    fn csv_and_json_round_trip_exactly() {
        let m = sample();
        assert_eq!(DistanceMatrix::parse_csv(&m.to_csv().unwrap()).unwrap(), m);
        assert_eq!(DistanceMatrix::parse_json(&m.to_json().unwrap()).unwrap(), m);
    }

    #[test]
    fn rejects_asymmetric_rows() {
        let err = DistanceMatrix::from_rows(labels(&["a", "b"]), vec![vec![0.0, 0.1], vec![0.2, 0.0]]).unwrap_err();
        assert!(err.to_string().contains("not symmetric"));
        let err = DistanceMatrix::parse_json(r#"{"labels":["a","b"],"entries":[[0.1,0.2],[0.2,0]]}"#).unwrap_err();
        assert!(err.to_string().contains("diagonal"));
    }

    #[test]
    fn rejects_duplicate_labels() {
        assert!(DistanceMatrix::from_lower_triangle(labels(&["a", "a"]), &[0.1]).is_err());
    }

    #[test]
    fn unit_range() {
        let m = DistanceMatrix::from_lower_triangle(labels(&["a", "b"]), &[1.5]).unwrap();
        assert!(m.check_unit_range().is_err());
        assert!(sample().check_unit_range().is_ok());
    }

    #[test]
    fn permute_moves_rows_and_labels() {
        let p = sample().permute(&[2, 0, 1]);
        assert_eq!(p.labels(), &labels(&["d", "a", "b, c"])[..]);
        assert_eq!(p.get(0, 2), 0.5);
        assert_eq!(p.get(1, 2), 0.3234);
    }

    #[test]
    fn format_from_extension() {
        assert_eq!(MatrixFormat::from_path(Path::new("m.CSV")), Some(MatrixFormat::Csv));
        assert_eq!(
            MatrixFormat::from_path(Path::new("m.txt")),
            Some(MatrixFormat::Appendix)
        );
        assert_eq!(MatrixFormat::from_path(Path::new("m")), None);
    }
}
