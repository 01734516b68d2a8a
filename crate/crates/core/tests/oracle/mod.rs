//! Brute-force reference for the heterogeneous metric.
//!
//! Works on raw cell values and recounts everything from the rows for
//! every query; nothing is cached or shared with the library.
#![allow(dead_code)]

use hmvi_core::data::{load_dataset, parse_schema, Dataset, LoadOptions};
use hmvi_core::metric::{distance_matrix, DissimilarityModel, DistanceMatrix};
use rand::Rng;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kind {
    Nominal(usize),
    Ordinal(usize),
    Numerical,
}

/// A tiny table; categorical cells hold their level number.
#[derive(Debug, Clone)]
pub struct Tiny {
    pub kinds: Vec<Kind>,
    pub cells: Vec<Vec<Option<f64>>>,
}

impl Tiny {
    /// Random table with `n <= max_n`, `d <= max_d`, at most `max_k` levels
    /// (or distinct numbers) per column and roughly 15% missing cells.
    /// Every column keeps at least one observed cell.
    pub fn random<R: Rng>(rng: &mut R, max_n: usize, max_d: usize, max_k: usize) -> Tiny {
        let n = rng.gen_range(3..=max_n);
        let d = rng.gen_range(1..=max_d);
        let kinds: Vec<Kind> = (0..d)
            .map(|_| match rng.gen_range(0..3) {
                0 => Kind::Nominal(rng.gen_range(2..=max_k)),
                1 => Kind::Ordinal(rng.gen_range(2..=max_k)),
                _ => Kind::Numerical,
            })
            .collect();
        let numbers: Vec<Vec<f64>> =
            (0..d).map(|_| (0..max_k).map(|_| rng.gen_range(-20..20) as f64 / 4.0).collect()).collect();
        let mut cells: Vec<Vec<Option<f64>>> = (0..n)
            .map(|_| {
                (0..d)
                    .map(|r| {
                        if rng.gen_bool(0.15) {
                            return None;
                        }
                        Some(match kinds[r] {
                            Kind::Nominal(k) | Kind::Ordinal(k) => rng.gen_range(0..k) as f64,
                            Kind::Numerical => numbers[r][rng.gen_range(0..max_k)],
                        })
                    })
                    .collect()
            })
            .collect();
        for r in 0..d {
            if cells.iter().all(|row| row[r].is_none()) {
                cells[0][r] = Some(match kinds[r] {
                    Kind::Numerical => numbers[r][0],
                    _ => 0.0,
                });
            }
        }
        Tiny { kinds, cells }
    }

    pub fn n(&self) -> usize {
        self.cells.len()
    }

    pub fn d(&self) -> usize {
        self.kinds.len()
    }

    pub fn schema_text(&self) -> String {
        let mut out = String::new();
        for (r, kind) in self.kinds.iter().enumerate() {
            match kind {
                Kind::Nominal(_) => out.push_str(&format!("a{r}:nominal\n")),
                Kind::Numerical => out.push_str(&format!("a{r}:numerical\n")),
                Kind::Ordinal(k) => {
                    let levels: Vec<String> = (0..*k).map(|l| format!("l{l}")).collect();
                    out.push_str(&format!("a{r}:ordinal:{}\n", levels.join("<")));
                }
            }
        }
        out
    }

    pub fn csv_text(&self) -> String {
        let header: Vec<String> = (0..self.d()).map(|r| format!("a{r}")).collect();
        let mut out = header.join(",") + "\n";
        for row in &self.cells {
            let cells: Vec<String> = row
                .iter()
                .zip(&self.kinds)
                .map(|(c, kind)| match (c, kind) {
                    (None, _) => "?".to_string(),
                    (Some(v), Kind::Nominal(_)) => format!("n{}", *v as usize),
                    (Some(v), Kind::Ordinal(_)) => format!("l{}", *v as usize),
                    (Some(v), Kind::Numerical) => format!("{v}"),
                })
                .collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn load(&self) -> Dataset {
        let schema = parse_schema(&self.schema_text()).unwrap();
        load_dataset(&self.csv_text(), &schema, &LoadOptions { header: true, ..LoadOptions::default() }).unwrap()
    }

    fn observed(&self, r: usize) -> Vec<f64> {
        self.cells.iter().filter_map(|row| row[r]).collect()
    }

    fn range(&self, r: usize) -> (f64, f64) {
        let v = self.observed(r);
        (v.iter().copied().fold(f64::INFINITY, f64::min), v.iter().copied().fold(f64::NEG_INFINITY, f64::max))
    }

    fn norm(&self, r: usize, x: f64) -> f64 {
        let (lo, hi) = self.range(r);
        if hi > lo {
            (x - lo) / (hi - lo)
        } else {
            0.0
        }
    }

    /// Lower bounds of the numeric bins of column `r`: the smallest value,
    /// then the order statistics at positions `b*m/B` that exceed every
    /// earlier bound.
    fn bin_starts(&self, r: usize) -> Vec<f64> {
        let mut v = self.observed(r);
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut distinct = v.clone();
        distinct.dedup();
        let bins = distinct.len().min(5);
        let m = v.len();
        let mut starts = vec![v[0]];
        for b in 1..bins {
            let e = v[b * m / bins];
            if starts.iter().all(|&s| e > s) {
                starts.push(e);
            }
        }
        starts
    }

    /// Catalog levels of column `r` in their canonical order: observed
    /// categorical levels, or numeric bins.
    pub fn levels(&self, r: usize) -> Vec<f64> {
        match self.kinds[r] {
            Kind::Numerical => (0..self.bin_starts(r).len()).map(|b| b as f64).collect(),
            _ => {
                let mut v = self.observed(r);
                v.sort_by(|a, b| a.partial_cmp(b).unwrap());
                v.dedup();
                v
            }
        }
    }

    /// Level of a raw value of column `r`.
    pub fn level_of(&self, r: usize, x: f64) -> f64 {
        match self.kinds[r] {
            Kind::Numerical => (self.bin_starts(r).iter().filter(|&&s| s <= x).count() - 1) as f64,
            _ => x,
        }
    }

    fn ordered(&self, r: usize) -> bool {
        !matches!(self.kinds[r], Kind::Nominal(_))
    }

    /// Reflected dissimilarity of levels `m`, `h` of `r` seen through `s`.
    pub fn psi(&self, r: usize, s: usize, m: f64, h: f64) -> f64 {
        if m == h {
            return 0.0;
        }
        let lv = self.levels(r);
        if r == s {
            let pos = |x: f64| lv.iter().position(|&l| l == x).unwrap() as f64;
            return match self.kinds[r] {
                Kind::Nominal(_) => 1.0,
                Kind::Ordinal(_) => (pos(m) - pos(h)).abs() / (lv.len() - 1) as f64,
                Kind::Numerical => {
                    let mean = |b: f64| {
                        let xs: Vec<f64> = self.observed(r).into_iter().filter(|&x| self.level_of(r, x) == b).collect();
                        xs.iter().map(|&x| self.norm(r, x)).sum::<f64>() / xs.len() as f64
                    };
                    (mean(m) - mean(h)).abs()
                }
            };
        }
        // s-values of rows where r has the given level and s is observed
        let co = |level: f64| -> Vec<f64> {
            self.cells
                .iter()
                .filter_map(|row| match (row[r], row[s]) {
                    (Some(a), Some(b)) if self.level_of(r, a) == level => Some(b),
                    _ => None,
                })
                .collect()
        };
        let (a, b) = (co(m), co(h));
        if a.is_empty() || b.is_empty() {
            return 1.0;
        }
        let frac =
            |xs: &[f64], pred: &dyn Fn(f64) -> bool| xs.iter().filter(|&&x| pred(x)).count() as f64 / xs.len() as f64;
        match self.kinds[s] {
            Kind::Numerical => {
                let mean = |xs: &[f64]| xs.iter().map(|&x| self.norm(s, x)).sum::<f64>() / xs.len() as f64;
                (mean(&a) - mean(&b)).abs()
            }
            Kind::Nominal(_) => {
                0.5 * self.levels(s).iter().map(|&t| (frac(&a, &|x| x == t) - frac(&b, &|x| x == t)).abs()).sum::<f64>()
            }
            Kind::Ordinal(_) => {
                let ls = self.levels(s);
                if ls.len() < 2 {
                    return 0.0;
                }
                let total: f64 =
                    ls[..ls.len() - 1].iter().map(|&t| (frac(&a, &|x| x <= t) - frac(&b, &|x| x <= t)).abs()).sum();
                total / (ls.len() - 1) as f64
            }
        }
    }

    /// Interdependence weight of `r` on `s`.
    pub fn weight(&self, r: usize, s: usize) -> f64 {
        let lv = self.levels(r);
        let k = lv.len();
        if k < 2 {
            return 0.0;
        }
        let mut total = 0.0;
        let mut pairs = 0.0;
        for q in 0..k {
            for c in q + 1..k {
                let span = if self.ordered(r) { (c - q) as f64 } else { 1.0 };
                total += self.psi(r, s, lv[q], lv[c]) / span;
                pairs += 1.0;
            }
        }
        total / pairs
    }

    /// Scaled value-pair dissimilarity of two levels of categorical `r`.
    pub fn pair(&self, r: usize, m: f64, h: f64) -> f64 {
        let raw = |m: f64, h: f64| (0..self.d()).map(|s| self.psi(r, s, m, h) * self.weight(r, s)).sum::<f64>();
        let lv = self.levels(r);
        let mut max = 0.0f64;
        for &a in &lv {
            for &b in &lv {
                max = max.max(raw(a, b));
            }
        }
        if max > 0.0 {
            raw(m, h) / max
        } else {
            0.0
        }
    }

    fn term(&self, r: usize, x: f64, y: f64) -> f64 {
        match self.kinds[r] {
            Kind::Numerical => {
                let (lo, hi) = self.range(r);
                if hi > lo {
                    ((x - y).abs() / (hi - lo)).min(1.0)
                } else {
                    0.0
                }
            }
            _ => self.pair(r, x, y),
        }
    }

    /// Missing-aware distance of rows `i` and `j`.
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        let d = self.d() as f64;
        let mut sum = 0.0;
        let mut present = 0.0;
        for r in 0..self.d() {
            if let (Some(x), Some(y)) = (self.cells[i][r], self.cells[j][r]) {
                sum += self.term(r, x, y).powi(2);
                present += 1.0;
            }
        }
        if present == 0.0 {
            d.sqrt()
        } else {
            (sum * d / present).sqrt()
        }
    }
}

/// Largest deviation between the library and the oracle over weights,
/// pair tables (every pair of observed cells) and the distance matrix.
pub fn max_deviation(tiny: &Tiny) -> f64 {
    let ds = tiny.load();
    let model = DissimilarityModel::fit(&ds).unwrap();
    let matrix: DistanceMatrix = distance_matrix(&ds, &model);
    let d = tiny.d();
    let mut worst = 0.0f64;
    for r in 0..d {
        for s in 0..d {
            worst = worst.max((model.weights().get(r, s) - tiny.weight(r, s)).abs());
        }
    }
    for r in 0..d {
        if matches!(tiny.kinds[r], Kind::Numerical) {
            assert!(model.pair_table(r).is_none());
            continue;
        }
        let table = model.pair_table(r).expect("categorical attribute has a pair table");
        let cat = model.catalog().attr(r);
        for i in 0..tiny.n() {
            for j in 0..tiny.n() {
                if let (Some(x), Some(y)) = (tiny.cells[i][r], tiny.cells[j][r]) {
                    let m = cat.index_of(ds.get(i, r)).unwrap();
                    let h = cat.index_of(ds.get(j, r)).unwrap();
                    worst = worst.max((table.get(m, h) - tiny.pair(r, x, y)).abs());
                }
            }
        }
    }
    for i in 0..tiny.n() {
        for j in 0..tiny.n() {
            let expected = if i == j { 0.0 } else { tiny.distance(i, j) };
            worst = worst.max((matrix.get(i, j) - expected).abs());
        }
    }
    worst
}
