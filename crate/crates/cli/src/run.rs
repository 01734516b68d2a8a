use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use hmvi_core::data::{
    format_number, load_dataset, parse_schema, CellValue, Column, Dataset, LoadOptions, WriteOptions,
};
use hmvi_core::evaluation::synthetic::{generate, Shape};
use hmvi_core::evaluation::{inject_missing, run_experiment, ExperimentConfig, Method};
use hmvi_core::imputer::{hmvi_impute, knnmi_impute, mms_impute, Ablation, HmviConfig, HmviOutcome, RefreshPolicy};
use hmvi_core::DissimilarityModel;
use serde::{Deserialize, Serialize};

use crate::args::*;

/// Bad arguments; reported with exit status 1.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

pub const METHOD_NAMES: &str = "hmvi, hmvi-0, hmvi-1, mms, knnmi";

#[derive(Debug, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub command: Command,
}

impl Manifest {
    pub fn read(path: &Path) -> Result<Manifest> {
        let text = fs::read_to_string(path).with_context(|| format!("cannot read manifest {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("malformed manifest {}", path.display()))
    }
}

/// Resolves input paths, draws missing seeds and checks everything that can
/// be checked before any computation.
pub fn prepare(command: &mut Command) -> Result<()> {
    let (input, output) = match command {
        Command::Impute(a) => {
            a.hmvi.seed.get_or_insert_with(rand::random);
            if a.hmvi.k < 2 {
                return Err(usage("--k must be at least 2"));
            }
            if a.hmvi.knn_k < 1 {
                return Err(usage("--knn-k must be at least 1"));
            }
            if let Some(dir) = &a.dump_model {
                create_dir(dir)?;
            }
            (Some(&mut a.input), &a.output)
        }
        Command::Inject(a) => {
            a.seed.get_or_insert_with(rand::random);
            if !(a.rate > 0.0 && a.rate < 1.0) {
                return Err(usage(format!("--rate must lie strictly between 0 and 1, got {}", a.rate)));
            }
            (Some(&mut a.input), &a.output)
        }
        Command::Evaluate(a) => {
            a.hmvi.seed.get_or_insert_with(rand::random);
            parse_methods(&a.methods, a.hmvi.ablation)?;
            if a.input.labels.is_none() {
                return Err(usage("evaluate needs --labels"));
            }
            if a.rates.is_empty() || a.rates.iter().any(|&r| !(r > 0.0 && r < 1.0)) {
                return Err(usage("--rates must lie strictly between 0 and 1"));
            }
            if a.repeats == 0 || a.hmvi.k < 2 || a.hmvi.knn_k < 1 {
                return Err(usage("--repeats and --knn-k must be positive and --k at least 2"));
            }
            (Some(&mut a.input), &a.output)
        }
        Command::Inspect(a) => (Some(&mut a.input), &a.output),
        Command::Generate(a) => {
            a.seed.get_or_insert_with(rand::random);
            if Shape::by_name(&a.shape).is_none() {
                return Err(usage(format!("unknown shape `{}`; expected mixed, ds, ta or bc", a.shape)));
            }
            (None, &a.output)
        }
        Command::Replay(_) => return Ok(()),
    };
    if let Some(input) = input {
        for path in [&mut input.input, &mut input.schema] {
            *path = path.canonicalize().with_context(|| format!("cannot open {}", path.display()))?;
        }
    }
    create_dir(output)
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create output directory {}", dir.display()))
}

/// Runs a prepared command and writes its manifest.
pub fn execute(command: &Command) -> Result<()> {
    let output = match command {
        Command::Impute(a) => {
            impute(a)?;
            &a.output
        }
        Command::Inject(a) => {
            inject(a)?;
            &a.output
        }
        Command::Evaluate(a) => {
            evaluate(a)?;
            &a.output
        }
        Command::Inspect(a) => {
            inspect(&a.input, &a.output)?;
            &a.output
        }
        Command::Generate(a) => {
            generate_table(a)?;
            &a.output
        }
        Command::Replay(a) => return replay(a),
    };
    let manifest =
        Manifest { tool: "hmvi".into(), version: env!("CARGO_PKG_VERSION").into(), command: command.clone() };
    let json = serde_json::to_string_pretty(&manifest)? + "\n";
    write(output, "manifest.json", &json)
}

fn replay(args: &ReplayArgs) -> Result<()> {
    let mut command = Manifest::read(&args.manifest)?.command;
    match &mut command {
        Command::Impute(a) => a.output = args.output.clone(),
        Command::Inject(a) => a.output = args.output.clone(),
        Command::Evaluate(a) => a.output = args.output.clone(),
        Command::Inspect(a) => a.output = args.output.clone(),
        Command::Generate(a) => a.output = args.output.clone(),
        Command::Replay(_) => bail!("a manifest cannot record a replay"),
    }
    prepare(&mut command)?;
    execute(&command)
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, contents).with_context(|| format!("cannot write {}", path.display()))
}

/// Table with the label column (if any) split off.
struct Table {
    data: Dataset,
    label: Option<SplitLabel>,
}

struct SplitLabel {
    index: usize,
    column: Column,
    cells: Vec<CellValue>,
    names: Vec<String>,
}

impl Table {
    fn load(input: &InputArgs) -> Result<Table> {
        let schema_text = fs::read_to_string(&input.schema)
            .with_context(|| format!("cannot read schema {}", input.schema.display()))?;
        let schema = parse_schema(&schema_text).with_context(|| format!("in schema {}", input.schema.display()))?;
        let csv = fs::read_to_string(&input.input).with_context(|| format!("cannot read {}", input.input.display()))?;
        let opts = LoadOptions { missing_token: input.missing_token.clone(), header: !input.no_header };
        let full = load_dataset(&csv, &schema, &opts).with_context(|| format!("in {}", input.input.display()))?;
        let Some(name) = &input.labels else {
            return Ok(Table { data: full, label: None });
        };
        let index = schema.index_of(name).ok_or_else(|| usage(format!("no column named `{name}` in the schema")))?;
        let (data, cells) = full.split_column(index)?;
        let label = SplitLabel {
            index,
            column: schema.column(index).clone(),
            cells,
            names: full.nominal_labels(index).to_vec(),
        };
        Ok(Table { data, label: Some(label) })
    }

    /// `data` with the label column put back in place.
    fn rejoin(&self, data: &Dataset) -> Result<Dataset> {
        Ok(match &self.label {
            Some(l) => data.insert_column(l.index, l.column.clone(), &l.cells, l.names.clone())?,
            None => data.clone(),
        })
    }

    /// Maps a column of `data` to its column in the input file.
    fn file_column(&self, r: usize) -> usize {
        match &self.label {
            Some(l) if r >= l.index => r + 1,
            _ => r,
        }
    }

    /// Class of every row, numbered by first appearance.
    fn classes(&self) -> Result<Vec<usize>> {
        let label = self.label.as_ref().expect("labels were requested");
        let mut seen: Vec<CellValue> = Vec::new();
        label
            .cells
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                if c.is_missing() {
                    bail!(hmvi_core::Error::Data {
                        row: i,
                        column: label.index,
                        message: "missing class label".into()
                    });
                }
                Ok(seen.iter().position(|&s| s == c).unwrap_or_else(|| {
                    seen.push(c);
                    seen.len() - 1
                }))
            })
            .collect()
    }
}

fn write_options(input: &InputArgs) -> WriteOptions {
    WriteOptions { missing_token: input.missing_token.clone(), significant_digits: Some(6), header: !input.no_header }
}

fn hmvi_config(a: &HmviArgs, ablation: Ablation) -> HmviConfig {
    HmviConfig {
        k: a.k,
        seed: a.seed.expect("seed is materialized before running"),
        max_iter: a.max_iter,
        refresh: a.refresh,
        ablation,
        knn_k: a.knn_k,
    }
}

fn num(x: f64) -> String {
    format_number(x, Some(6))
}

fn impute(a: &ImputeArgs) -> Result<()> {
    let table = Table::load(&a.input)?;
    let data = &table.data;
    let mut report = String::new();
    let _ = writeln!(report, "input: {}", a.input.input.display());
    let _ =
        writeln!(report, "objects: {}, attributes: {}, missing cells: {}", data.n(), data.d(), data.missing_count());
    let model = || DissimilarityModel::fit(data);
    let complete = match a.method {
        ImputeMethod::Hmvi => {
            let cfg = hmvi_config(&a.hmvi, a.hmvi.ablation);
            let HmviOutcome { dataset, clusters, report: log } = hmvi_impute(data, &cfg)?;
            let _ = writeln!(report, "method: {}", a.hmvi.ablation.label());
            let refresh = if cfg.refresh == RefreshPolicy::Full { "full" } else { "incremental" };
            let _ = writeln!(report, "k: {}, seed: {}, refresh: {refresh}", cfg.k, cfg.seed);
            let _ = writeln!(report, "objects imputed: {}", log.iterations);
            let _ = writeln!(report, "final clustering cost: {}", num(clusters.cost()));
            let mut sources: BTreeMap<String, usize> = BTreeMap::new();
            for c in &log.cells {
                *sources.entry(format!("{:?}", c.source)).or_default() += 1;
            }
            for (source, count) in &sources {
                let _ = writeln!(report, "cells from {source}: {count}");
            }
            let _ = writeln!(report, "warnings: {}", log.warnings.len());
            for w in &log.warnings {
                let _ = writeln!(report, "  {w}");
            }
            let _ = writeln!(report, "\nrow,column,value,donors,source,cluster");
            for c in &log.cells {
                let value = match c.value {
                    CellValue::Numeric(x) => num(x),
                    other => dataset.label_of(c.column, other).unwrap_or_default(),
                };
                let cluster = c.cluster.map(|k| k.to_string()).unwrap_or_default();
                let column = &data.schema().column(c.column).name;
                let _ = writeln!(report, "{},{},{},{},{:?},{}", c.row, column, value, c.donors, c.source, cluster);
            }
            let mut csv = String::from("row,cluster,medoid\n");
            for i in 0..dataset.n() {
                let k = clusters.cluster_of(i);
                let _ = writeln!(csv, "{i},{k},{}", clusters.medoids()[k]);
            }
            write(&a.output, "clusters.csv", &csv)?;
            dataset
        }
        ImputeMethod::Mms => {
            let _ = writeln!(report, "method: MMS");
            mms_impute(data)?
        }
        ImputeMethod::Knnmi => {
            let _ = writeln!(report, "method: KNNMI\nknn_k: {}", a.hmvi.knn_k);
            knnmi_impute(data, a.hmvi.knn_k, &model()?)?
        }
    };
    if let Some(dir) = &a.dump_model {
        dump_model(&table, &model()?, dir)?;
    }
    let full = table.rejoin(&complete)?;
    let missing = table.rejoin(data)?;
    let csv = full.to_csv_rounding(&write_options(&a.input), |i, r| missing.is_missing(i, r));
    write(&a.output, "complete.csv", &csv)?;
    write(&a.output, "report.txt", &report)
}

fn inject(a: &InjectArgs) -> Result<()> {
    let table = Table::load(&a.input)?;
    if table.data.missing_count() > 0 {
        bail!("inject needs a complete table; found {} missing cells", table.data.missing_count());
    }
    let (corrupted, mask) = inject_missing(&table.data, a.rate, a.seed.expect("materialized seed"))?;
    let full = table.rejoin(&corrupted)?;
    write(
        &a.output,
        "corrupted.csv",
        &full.to_csv(&WriteOptions { significant_digits: None, ..write_options(&a.input) }),
    )?;
    let mut lines = String::new();
    for &(i, r) in &mask.cells {
        let _ = writeln!(lines, "{i},{}", table.file_column(r));
    }
    write(&a.output, "mask.csv", &lines)
}

pub fn parse_methods(names: &[String], ablation: Ablation) -> Result<Vec<Method>> {
    names
        .iter()
        .map(|name| match name.trim().to_ascii_lowercase().as_str() {
            "hmvi" => Ok(Method::Hmvi(ablation)),
            "hmvi-0" => Ok(Method::Hmvi(Ablation::NoNaturalNeighbors)),
            "hmvi-1" => Ok(Method::Hmvi(Ablation::NoPreclustering)),
            "mms" => Ok(Method::Mms),
            "knnmi" => Ok(Method::Knnmi),
            other => Err(usage(format!("unknown method `{other}`; valid methods: {METHOD_NAMES}"))),
        })
        .collect()
}

fn evaluate(a: &EvaluateArgs) -> Result<()> {
    let table = Table::load(&a.input)?;
    let labels = table.classes()?;
    let seed = a.hmvi.seed.expect("materialized seed");
    let config = ExperimentConfig {
        dataset_name: a.input.input.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default(),
        methods: parse_methods(&a.methods, a.hmvi.ablation)?,
        rates: a.rates.clone(),
        repeats: a.repeats,
        base_seed: seed,
        k: a.hmvi.k,
        hmvi: hmvi_config(&a.hmvi, a.hmvi.ablation),
        gamma: a.gamma,
    };
    let report = run_experiment(&table.data, &labels, &config)?;
    for cell in report.cells.iter().filter(|c| c.error.is_some()) {
        log::warn!(
            "{} at rate {} repeat {}: {}",
            cell.method,
            cell.rate,
            cell.repeat,
            cell.error.as_deref().unwrap_or("")
        );
    }
    write(&a.output, "grid.csv", &report.grid_csv(a.timings))?;
    write(&a.output, "means.csv", &report.means_csv())
}

fn inspect(input: &InputArgs, output: &Path) -> Result<()> {
    let table = Table::load(input)?;
    let model = DissimilarityModel::fit(&table.data)?;
    dump_model(&table, &model, output)
}

fn dump_model(table: &Table, model: &DissimilarityModel, dir: &Path) -> Result<()> {
    let names: Vec<String> = table.data.schema().columns().iter().map(|c| c.name.clone()).collect();
    write(dir, "weights.csv", &model.weights_csv(&names))?;
    for (r, name) in names.iter().enumerate() {
        if let Some(csv) = model.pair_table_csv(r, &table.data) {
            write(dir, &format!("pairs_{name}.csv"), &csv)?;
        }
    }
    Ok(())
}

fn generate_table(a: &GenerateArgs) -> Result<()> {
    let shape = Shape::by_name(&a.shape).ok_or_else(|| usage(format!("unknown shape `{}`", a.shape)))?;
    let data = generate(shape, a.seed.expect("materialized seed")).with_label_column();
    write(&a.output, "data.csv", &data.to_csv(&WriteOptions { header: true, ..WriteOptions::default() }))?;
    write(&a.output, "data.schema", &data.schema().to_string())
}

/// Output directory of a command, for messages.
pub fn output_dir(command: &Command) -> Option<PathBuf> {
    match command {
        Command::Impute(a) => Some(a.output.clone()),
        Command::Inject(a) => Some(a.output.clone()),
        Command::Evaluate(a) => Some(a.output.clone()),
        Command::Inspect(a) => Some(a.output.clone()),
        Command::Generate(a) => Some(a.output.clone()),
        Command::Replay(a) => Some(a.output.clone()),
    }
}
