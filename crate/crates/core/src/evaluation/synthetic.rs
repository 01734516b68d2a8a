//! Seeded generators for labeled mixed-type tables.
//!
//! Every object belongs to a planted class and carries a hidden position
//! `z` in `[0, 1)`. Attributes mix class offsets with `z` plus noise, so
//! attributes depend on each other both across and within classes.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::data::{AttributeKind, CellValue, Column, Dataset, Schema};

/// Attribute counts and size of a generated table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Shape {
    pub nominal: usize,
    pub ordinal: usize,
    pub numerical: usize,
    pub n: usize,
    pub classes: usize,
}

impl Shape {
    /// 200 objects: 3 nominal, 2 ordinal, 3 numerical attributes, 2 classes.
    pub const MIXED: Shape = Shape { nominal: 3, ordinal: 2, numerical: 3, n: 200, classes: 2 };
    /// Shaped like the Diagnosis table.
    pub const DIAGNOSIS: Shape = Shape { nominal: 5, ordinal: 0, numerical: 1, n: 120, classes: 2 };
    /// Shaped like the Teacher Assistant table.
    pub const TEACHER_ASSISTANT: Shape = Shape { nominal: 4, ordinal: 0, numerical: 1, n: 151, classes: 3 };
    /// Shaped like the Breast Cancer table.
    pub const BREAST_CANCER: Shape = Shape { nominal: 4, ordinal: 2, numerical: 3, n: 277, classes: 2 };

    pub fn by_name(name: &str) -> Option<Shape> {
        match name {
            "mixed" => Some(Shape::MIXED),
            "ds" | "diagnosis" => Some(Shape::DIAGNOSIS),
            "ta" | "teacher-assistant" => Some(Shape::TEACHER_ASSISTANT),
            "bc" | "breast-cancer" => Some(Shape::BREAST_CANCER),
            _ => None,
        }
    }

    pub fn d(&self) -> usize {
        self.nominal + self.ordinal + self.numerical
    }
}

/// A complete table with its planted class of every object.
#[derive(Debug, Clone)]
pub struct LabeledData {
    pub dataset: Dataset,
    pub labels: Vec<usize>,
}

impl LabeledData {
    /// The table with the class appended as a nominal column `class`.
    pub fn with_label_column(&self) -> Dataset {
        let mut columns = self.dataset.schema().columns().to_vec();
        columns.push(Column { name: "class".into(), kind: AttributeKind::Nominal });
        let schema = Schema::new(columns).expect("generated names are unique");
        let classes = self.labels.iter().max().map_or(0, |m| m + 1);
        let rows = self
            .dataset
            .rows()
            .zip(&self.labels)
            .map(|(row, &c)| {
                let mut row = row.to_vec();
                row.push(CellValue::Nominal(c as u32));
                row
            })
            .collect();
        let mut labels: Vec<Vec<String>> =
            (0..self.dataset.d()).map(|r| self.dataset.nominal_labels(r).to_vec()).collect();
        labels.push((0..classes).map(|c| format!("k{c}")).collect());
        Dataset::new(schema, rows, labels).expect("generated cells match the schema")
    }
}

const NOMINAL_ARITY: [usize; 5] = [3, 4, 2, 3, 5];
const ORDINAL_LEVELS: [usize; 3] = [5, 3, 4];

/// Generates a table of the given shape. Columns are nominal first, then
/// ordinal, then numerical.
pub fn generate(shape: Shape, seed: u64) -> LabeledData {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = shape.classes.max(1);
    let spread = (k.max(2) - 1) as f64;

    let mut columns = Vec::new();
    let mut labels: Vec<Vec<String>> = Vec::new();
    for j in 0..shape.nominal {
        let arity = NOMINAL_ARITY[j % NOMINAL_ARITY.len()];
        columns.push(Column { name: format!("nom{j}"), kind: AttributeKind::Nominal });
        labels.push((0..arity).map(|c| ((b'a' + c as u8) as char).to_string()).collect());
    }
    for j in 0..shape.ordinal {
        let levels = ORDINAL_LEVELS[j % ORDINAL_LEVELS.len()];
        columns.push(Column {
            name: format!("ord{j}"),
            kind: AttributeKind::Ordinal((0..levels).map(|l| format!("L{l}")).collect()),
        });
        labels.push(Vec::new());
    }
    for j in 0..shape.numerical {
        columns.push(Column { name: format!("num{j}"), kind: AttributeKind::Numerical });
        labels.push(Vec::new());
    }
    let schema = Schema::new(columns).expect("generated names are unique");

    let mut classes: Vec<usize> = (0..shape.n).map(|i| i % k).collect();
    // shuffle so class is not tied to row order
    for i in (1..classes.len()).rev() {
        let j = rng.gen_range(0..=i);
        classes.swap(i, j);
    }
    let small = Normal::new(0.0, 0.08).unwrap();
    let noise = Normal::new(0.0, 0.15).unwrap();

    let rows = classes
        .iter()
        .map(|&c| {
            let z: f64 = rng.gen();
            let cf = c as f64 / spread;
            let mut row = Vec::with_capacity(shape.d());
            for j in 0..shape.nominal {
                let arity = NOMINAL_ARITY[j % NOMINAL_ARITY.len()];
                let planted = match j % 3 {
                    0 => c % arity,
                    1 => (2 * c + (z > 0.5) as usize) % arity,
                    _ => ((z * arity as f64) as usize).min(arity - 1),
                };
                let v = if rng.gen::<f64>() < 0.12 { rng.gen_range(0..arity) } else { planted };
                row.push(CellValue::Nominal(v as u32));
            }
            for j in 0..shape.ordinal {
                let levels = ORDINAL_LEVELS[j % ORDINAL_LEVELS.len()];
                let u = if j % 2 == 0 { 0.5 * cf + 0.5 * z } else { z } + small.sample(&mut rng);
                let level = (u * levels as f64).floor().clamp(0.0, (levels - 1) as f64);
                row.push(CellValue::Ordinal(level as u32));
            }
            for j in 0..shape.numerical {
                let (gap, slope) = match j % 3 {
                    0 => (2.0, 1.5),
                    1 => (2.0, -1.5),
                    _ => (1.0, 3.0),
                };
                let x = gap * cf + slope * z + noise.sample(&mut rng);
                row.push(CellValue::Numeric((x * 1e4).round() / 1e4));
            }
            row
        })
        .collect();
    let dataset = Dataset::new(schema, rows, labels).expect("generated cells match the schema");
    LabeledData { dataset, labels: classes }
}
