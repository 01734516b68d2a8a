//! Missing value imputation for heterogeneous tabular data.
//!
//! Tables mix nominal, ordinal and numerical attributes. The central
//! procedure ([`imputer::hmvi_impute`]) learns how strongly attributes
//! depend on one another, builds a unified distance that tolerates missing
//! cells, clusters all objects (complete and incomplete) with k-medoids and
//! fills each missing cell from the target's natural neighbors inside its
//! cluster. Mean/mode and k-nearest-neighbor baselines plus the MCAR
//! evaluation harness live alongside it.
//!
//! ```
//! use hmvi_core::{parse_schema, load_dataset, LoadOptions};
//! use hmvi_core::imputer::{hmvi_impute, HmviConfig};
//!
//! let schema = parse_schema("size:numerical\ncolor:nominal").unwrap();
//! let csv = "1.0,red\n1.2,red\n0.9,?\n5.0,blue\n5.3,blue\n?,blue\n";
//! let data = load_dataset(csv, &schema, &LoadOptions::default()).unwrap();
//! let out = hmvi_impute(&data, &HmviConfig::new(2)).unwrap();
//! assert_eq!(out.dataset.missing_count(), 0);
//! ```

pub mod clustering;
pub mod data;
pub mod error;
pub mod evaluation;
pub mod imputer;
pub mod metric;
pub mod neighbors;

pub use clustering::ClusterModel;
pub use data::{
    load_dataset, normalize_numeric, parse_schema, AttributeCatalog, AttributeKind, CellValue, Column, Dataset,
    LoadOptions, NumericRange, Schema, ValueCatalog, WriteOptions,
};
pub use error::{Error, Result};
pub use metric::{DissimilarityModel, DistanceMatrix, WeightMatrix};
pub use neighbors::NaNState;
