use serde::{Deserialize, Serialize};

use super::schema::{AttributeKind, Column, Schema};
use crate::error::{Error, Result};

/// One cell of a table.
///
/// Nominal cells hold an id into the column's label dictionary, ordinal
/// cells a 0-based rank into the schema's level list.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CellValue {
    Nominal(u32),
    Ordinal(u32),
    Numeric(f64),
    Missing,
}

impl CellValue {
    pub fn is_missing(&self) -> bool {
        matches!(self, CellValue::Missing)
    }

    pub fn as_numeric(&self) -> Option<f64> {
        match *self {
            CellValue::Numeric(x) => Some(x),
            _ => None,
        }
    }

    /// Category id or ordinal rank.
    pub fn as_code(&self) -> Option<u32> {
        match *self {
            CellValue::Nominal(c) | CellValue::Ordinal(c) => Some(c),
            _ => None,
        }
    }
}

/// Observed range of a numerical column.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NumericRange {
    pub min: f64,
    pub max: f64,
}

impl NumericRange {
    pub fn width(&self) -> f64 {
        self.max - self.min
    }

    /// Maps into `[0, 1]`; a constant column maps to 0.
    pub fn normalize(&self, x: f64) -> f64 {
        let w = self.width();
        if w > 0.0 {
            (x - self.min) / w
        } else {
            0.0
        }
    }

    pub fn denormalize(&self, v: f64) -> f64 {
        self.min + v * self.width()
    }

    fn of(values: impl Iterator<Item = f64>) -> Option<Self> {
        values.fold(None, |acc, x| match acc {
            None => Some(NumericRange { min: x, max: x }),
            Some(r) => Some(NumericRange { min: r.min.min(x), max: r.max.max(x) }),
        })
    }
}

#[derive(Debug, Clone)]
pub struct LoadOptions {
    /// Token marking a missing cell. Empty fields are always missing.
    pub missing_token: String,
    /// Skip the first record.
    pub header: bool,
}

impl Default for LoadOptions {
    fn default() -> Self {
        LoadOptions { missing_token: "?".into(), header: false }
    }
}

#[derive(Debug, Clone)]
pub struct WriteOptions {
    pub missing_token: String,
    /// Round numerics to this many significant digits; `None` writes the
    /// shortest representation that parses back to the same `f64`.
    pub significant_digits: Option<usize>,
    /// Emit column names as the first record.
    pub header: bool,
}

impl Default for WriteOptions {
    fn default() -> Self {
        WriteOptions { missing_token: "?".into(), significant_digits: None, header: false }
    }
}

/// An `n x d` table of typed cells, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    schema: Schema,
    cells: Vec<CellValue>,
    n: usize,
    /// Per column: label of each nominal id (empty for other kinds).
    labels: Vec<Vec<String>>,
}

impl Dataset {
    /// Builds a dataset from rows of cells. `labels[r]` is the dictionary of
    /// nominal column `r`; pass empty vectors for other kinds.
    pub fn new(schema: Schema, rows: Vec<Vec<CellValue>>, labels: Vec<Vec<String>>) -> Result<Self> {
        let d = schema.len();
        if rows.is_empty() {
            return Err(Error::invalid("dataset needs at least one row"));
        }
        if labels.len() != d {
            return Err(Error::invalid("one label dictionary per column required"));
        }
        let n = rows.len();
        let mut cells = Vec::with_capacity(n * d);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != d {
                return Err(Error::Data {
                    row: i,
                    column: row.len().min(d),
                    message: format!("expected {d} cells, found {}", row.len()),
                });
            }
            for (r, cell) in row.iter().enumerate() {
                check_cell(schema.kind(r), cell, labels[r].len()).map_err(|message| Error::Data {
                    row: i,
                    column: r,
                    message,
                })?;
            }
            cells.extend(row);
        }
        Ok(Dataset { schema, cells, n, labels })
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    /// Number of objects.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of attributes.
    pub fn d(&self) -> usize {
        self.schema.len()
    }

    pub fn get(&self, i: usize, r: usize) -> CellValue {
        self.cells[i * self.d() + r]
    }

    pub fn row(&self, i: usize) -> &[CellValue] {
        let d = self.d();
        &self.cells[i * d..(i + 1) * d]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[CellValue]> {
        self.cells.chunks(self.d())
    }

    pub fn column(&self, r: usize) -> impl Iterator<Item = CellValue> + '_ {
        (0..self.n).map(move |i| self.get(i, r))
    }

    /// Overwrites one cell, checking it against the column kind.
    pub fn set(&mut self, i: usize, r: usize, value: CellValue) -> Result<()> {
        if i >= self.n {
            return Err(Error::OutOfRange { index: i, len: self.n });
        }
        if r >= self.d() {
            return Err(Error::OutOfRange { index: r, len: self.d() });
        }
        check_cell(self.schema.kind(r), &value, self.labels[r].len()).map_err(|message| Error::Data {
            row: i,
            column: r,
            message,
        })?;
        let d = self.d();
        self.cells[i * d + r] = value;
        Ok(())
    }

    pub fn is_missing(&self, i: usize, r: usize) -> bool {
        self.get(i, r).is_missing()
    }

    pub fn missing_count(&self) -> usize {
        self.cells.iter().filter(|c| c.is_missing()).count()
    }

    pub fn row_missing_count(&self, i: usize) -> usize {
        self.row(i).iter().filter(|c| c.is_missing()).count()
    }

    /// Rows with at least one missing cell.
    pub fn incomplete_rows(&self) -> Vec<usize> {
        (0..self.n).filter(|&i| self.row_missing_count(i) > 0).collect()
    }

    pub fn complete_rows(&self) -> Vec<usize> {
        (0..self.n).filter(|&i| self.row_missing_count(i) == 0).collect()
    }

    /// Label dictionary of a nominal column, indexed by category id.
    pub fn nominal_labels(&self, r: usize) -> &[String] {
        &self.labels[r]
    }

    /// Human-readable form of a non-missing cell.
    pub fn label_of(&self, r: usize, value: CellValue) -> Option<String> {
        match (value, self.schema.kind(r)) {
            (CellValue::Nominal(c), _) => self.labels[r].get(c as usize).cloned(),
            (CellValue::Ordinal(k), AttributeKind::Ordinal(levels)) => levels.get(k as usize).cloned(),
            (CellValue::Numeric(x), _) => Some(format_number(x, None)),
            _ => None,
        }
    }

    /// Observed range of a numerical column; `None` if none observed.
    pub fn numeric_range(&self, r: usize) -> Option<NumericRange> {
        NumericRange::of(self.column(r).filter_map(|c| c.as_numeric()))
    }

    /// Splits off column `r`, returning the remaining table and the removed cells.
    pub fn split_column(&self, r: usize) -> Result<(Dataset, Vec<CellValue>)> {
        let schema = self.schema.without(r).ok_or_else(|| Error::invalid(format!("cannot remove column {r}")))?;
        let removed = self.column(r).collect();
        let rows =
            self.rows().map(|row| row.iter().enumerate().filter(|&(s, _)| s != r).map(|(_, c)| *c).collect()).collect();
        let mut labels = self.labels.clone();
        labels.remove(r);
        Ok((Dataset::new(schema, rows, labels)?, removed))
    }

    /// Inverse of [`Dataset::split_column`]: inserts `cells` as column `r`.
    /// `labels` are the label strings of a nominal column's codes.
    pub fn insert_column(&self, r: usize, column: Column, cells: &[CellValue], labels: Vec<String>) -> Result<Dataset> {
        if r > self.d() || cells.len() != self.n() {
            return Err(Error::invalid(format!("cannot insert {} cells as column {r}", cells.len())));
        }
        let mut columns = self.schema.columns().to_vec();
        columns.insert(r, column);
        let rows = self
            .rows()
            .zip(cells)
            .map(|(row, &c)| {
                let mut row = row.to_vec();
                row.insert(r, c);
                row
            })
            .collect();
        let mut all = self.labels.clone();
        all.insert(r, labels);
        Dataset::new(Schema::new(columns)?, rows, all)
    }

    /// Serializes as header-less CSV (unless requested) with the given options.
    pub fn to_csv(&self, opts: &WriteOptions) -> String {
        self.to_csv_rounding(opts, |_, _| true)
    }

    /// Like [`Dataset::to_csv`], but only cells `(i, r)` with `round(i, r)`
    /// are rounded; the rest keep their exact value.
    pub fn to_csv_rounding(&self, opts: &WriteOptions, round: impl Fn(usize, usize) -> bool) -> String {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
        if opts.header {
            w.write_record(self.schema.columns().iter().map(|c| c.name.as_str())).expect("in-memory write");
        }
        for (i, row) in self.rows().enumerate() {
            let record: Vec<String> = row
                .iter()
                .enumerate()
                .map(|(r, &cell)| match cell {
                    CellValue::Missing => opts.missing_token.clone(),
                    CellValue::Numeric(x) => format_number(x, opts.significant_digits.filter(|_| round(i, r))),
                    other => self.label_of(r, other).unwrap_or_default(),
                })
                .collect();
            w.write_record(&record).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 output")
    }
}

fn check_cell(kind: &AttributeKind, cell: &CellValue, n_labels: usize) -> std::result::Result<(), String> {
    match (kind, cell) {
        (_, CellValue::Missing) => Ok(()),
        (AttributeKind::Nominal, CellValue::Nominal(c)) if (*c as usize) < n_labels => Ok(()),
        (AttributeKind::Nominal, CellValue::Nominal(c)) => Err(format!("unknown category id {c}")),
        (AttributeKind::Ordinal(levels), CellValue::Ordinal(k)) if (*k as usize) < levels.len() => Ok(()),
        (AttributeKind::Ordinal(_), CellValue::Ordinal(k)) => Err(format!("ordinal rank {k} out of range")),
        (AttributeKind::Numerical, CellValue::Numeric(x)) if x.is_finite() => Ok(()),
        (AttributeKind::Numerical, CellValue::Numeric(x)) => Err(format!("non-finite value {x}")),
        (kind, cell) => Err(format!("cell {cell:?} does not match column kind {kind:?}")),
    }
}

/// Formats a number, optionally rounded to `sig` significant digits.
pub fn format_number(x: f64, sig: Option<usize>) -> String {
    let x = match sig {
        Some(s) if x != 0.0 => format!("{:.*e}", s.max(1) - 1, x).parse::<f64>().unwrap_or(x),
        _ => x,
    };
    // avoid "-0"
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x}")
}

/// Parses CSV text into a typed dataset.
///
/// Unparseable non-missing tokens are errors; they never become `Missing`.
pub fn load_dataset(csv_text: &str, schema: &Schema, opts: &LoadOptions) -> Result<Dataset> {
    let d = schema.len();
    let mut reader = csv::ReaderBuilder::new().has_headers(opts.header).flexible(true).from_reader(csv_text.as_bytes());
    let mut labels: Vec<Vec<String>> = vec![Vec::new(); d];
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        if record.len() != d {
            return Err(Error::Data {
                row: i,
                column: record.len().min(d),
                message: format!("expected {d} fields, found {}", record.len()),
            });
        }
        let mut row = Vec::with_capacity(d);
        for (r, field) in record.iter().enumerate() {
            let token = field.trim();
            if token.is_empty() || token == opts.missing_token {
                row.push(CellValue::Missing);
                continue;
            }
            let cell = match schema.kind(r) {
                AttributeKind::Numerical => match token.parse::<f64>() {
                    Ok(x) if x.is_finite() => CellValue::Numeric(x),
                    _ => {
                        return Err(Error::Data {
                            row: i,
                            column: r,
                            message: format!("cannot parse `{token}` as a number"),
                        })
                    }
                },
                AttributeKind::Ordinal(levels) => match levels.iter().position(|l| l == token) {
                    Some(k) => CellValue::Ordinal(k as u32),
                    None => {
                        return Err(Error::Data {
                            row: i,
                            column: r,
                            message: format!("`{token}` is not a declared level"),
                        })
                    }
                },
                AttributeKind::Nominal => {
                    let dict = &mut labels[r];
                    let id = match dict.iter().position(|l| l == token) {
                        Some(id) => id,
                        None => {
                            dict.push(token.to_string());
                            dict.len() - 1
                        }
                    };
                    CellValue::Nominal(id as u32)
                }
            };
            row.push(cell);
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::invalid("no data rows"));
    }
    Dataset::new(schema.clone(), rows, labels)
}

/// Rescales every numerical column to `[0, 1]` by its observed range.
///
/// Constant columns map to 0. The returned ranges (`None` for categorical or
/// fully-missing columns) invert the map via [`NumericRange::denormalize`].
pub fn normalize_numeric(dataset: &Dataset) -> (Dataset, Vec<Option<NumericRange>>) {
    let d = dataset.d();
    let ranges: Vec<Option<NumericRange>> =
        (0..d).map(|r| if dataset.schema().kind(r).is_numerical() { dataset.numeric_range(r) } else { None }).collect();
    let mut out = dataset.clone();
    for cell_idx in 0..out.cells.len() {
        let r = cell_idx % d;
        if let (CellValue::Numeric(x), Some(range)) = (out.cells[cell_idx], ranges[r]) {
            out.cells[cell_idx] = CellValue::Numeric(range.normalize(x));
        }
    }
    (out, ranges)
}
