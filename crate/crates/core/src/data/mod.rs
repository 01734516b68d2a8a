//! Typed heterogeneous tables: schema, cells, CSV loading and value catalogs.

mod catalog;
mod dataset;
mod schema;

pub use catalog::{catalog_values, equal_frequency_edges, AttributeCatalog, ValueCatalog, MAX_NUMERIC_BINS};
pub use dataset::{
    format_number, load_dataset, normalize_numeric, CellValue, Dataset, LoadOptions, NumericRange, WriteOptions,
};
pub use schema::{parse_schema, AttributeKind, Column, Schema};
